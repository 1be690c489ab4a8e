//! Data-parallel map over independent work items. With the `parallel`
//! feature (default) this runs on the rayon pool; without it, sequentially.
//! Output order always matches input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub fn map<I, T, F>(items: I, f: F) -> Vec<T>
where
    I: IntoIterator,
    I::Item: Send,
    T: Send,
    F: Fn(I::Item) -> T + Sync + Send,
{
    let v: Vec<I::Item> = items.into_iter().collect();
    v.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<I, T, F>(items: I, f: F) -> Vec<T>
where
    I: IntoIterator,
    I::Item: Send,
    T: Send,
    F: Fn(I::Item) -> T + Sync + Send,
{
    items.into_iter().map(f).collect()
}

/// Sequential map regardless of features, for comparison runs.
pub fn map_sequential<I, T, F>(items: I, f: F) -> Vec<T>
where
    I: IntoIterator,
    F: Fn(I::Item) -> T,
{
    items.into_iter().map(f).collect()
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    #[test]
    fn order_preserved() {
        let v = super::map(0..100u32, |i| i * i);
        assert_eq!(v, super::map_sequential(0..100u32, |i| i * i));
    }
}
