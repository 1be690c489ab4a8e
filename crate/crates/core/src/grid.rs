//! Composite Gauss–Legendre grids on radial intervals.
//!
//! Panels are aligned with every place where data may lose smoothness
//! (potential jumps, cutoff bridge ends, bump supports). On each panel the
//! samples are treated as a degree `n − 1` polynomial, which gives spectral
//! indefinite integration, differentiation and barycentric interpolation.

use num_complex::Complex64 as C64;
use std::sync::Arc;

pub const DEFAULT_ORDER: usize = 32;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GridError {
    #[error("grid edges must be strictly increasing and finite")]
    Edges,
    #[error("quadrature order must be at least 2, got {0}")]
    Order(usize),
    #[error("sample vector has length {got}, grid has {expected} nodes")]
    Length { expected: usize, got: usize },
}

/// Gauss–Legendre rule on `[-1, 1]` with its panel matrices.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    bary: Vec<f64>,
    /// `integ[i][j] = ∫_{-1}^{x_i} ℓ_j`.
    integ: Vec<Vec<f64>>,
    /// `diff[i][j] = ℓ_j'(x_i)`.
    diff: Vec<Vec<f64>>,
}

/// `P_0..=P_kmax` at `x`.
fn legendre_all(kmax: usize, x: f64) -> Vec<f64> {
    let mut p = vec![1.0; kmax + 1];
    if kmax >= 1 {
        p[1] = x;
    }
    for k in 1..kmax {
        let kf = k as f64;
        p[k + 1] = ((2.0 * kf + 1.0) * x * p[k] - kf * p[k - 1]) / (kf + 1.0);
    }
    p
}

impl GaussRule {
    pub fn new(n: usize) -> Result<Self, GridError> {
        if n < 2 {
            return Err(GridError::Order(n));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n {
            // roots of P_n, largest first; Newton from the Tricomi guess
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let p = legendre_all(n, x);
                dp = nf * (x * p[n] - p[n - 1]) / (x * x - 1.0);
                let dx = p[n] / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let p = legendre_all(n, x);
            dp = if dp == 0.0 {
                1.0
            } else {
                nf * (x * p[n] - p[n - 1]) / (x * x - 1.0)
            };
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }

        let mut bary = vec![1.0; n];
        for j in 0..n {
            for k in 0..n {
                if k != j {
                    bary[j] *= 2.0 * (nodes[j] - nodes[k]);
                }
            }
            bary[j] = 1.0 / bary[j];
        }
        let scale = bary.iter().fold(0.0f64, |m, b| m.max(b.abs()));
        bary.iter_mut().for_each(|b| *b /= scale);

        let pnodes: Vec<Vec<f64>> = nodes.iter().map(|&x| legendre_all(n, x)).collect();
        let integ = (0..n)
            .map(|i| {
                let pi = &pnodes[i];
                (0..n)
                    .map(|j| {
                        let pj = &pnodes[j];
                        let mut s = 0.5 * (nodes[i] + 1.0);
                        for k in 1..n {
                            s += 0.5 * pj[k] * (pi[k + 1] - pi[k - 1]);
                        }
                        weights[j] * s
                    })
                    .collect()
            })
            .collect();

        let mut diff = vec![vec![0.0; n]; n];
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                if i != j {
                    let d = bary[j] / bary[i] / (nodes[i] - nodes[j]);
                    diff[i][j] = d;
                    row += d;
                }
            }
            diff[i][i] = -row;
        }

        Ok(Self {
            nodes,
            weights,
            bary,
            integ,
            diff,
        })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Barycentric interpolation of panel samples at `x ∈ [-1, 1]`.
    pub fn interpolate(&self, values: &[C64], x: f64) -> C64 {
        let mut num = C64::new(0.0, 0.0);
        let mut den = 0.0;
        for (j, &xj) in self.nodes.iter().enumerate() {
            let d = x - xj;
            if d == 0.0 {
                return values[j];
            }
            let c = self.bary[j] / d;
            num += values[j] * c;
            den += c;
        }
        num / den
    }
}

/// A partition of `[edges[0], edges[last]]` into Gauss–Legendre panels.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    rule: Arc<GaussRule>,
    edges: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl PartialEq for RadialGrid {
    fn eq(&self, other: &Self) -> bool {
        self.edges == other.edges && self.rule.order() == other.rule.order()
    }
}

impl RadialGrid {
    pub fn from_edges(edges: Vec<f64>, order: usize) -> Result<Self, GridError> {
        let rule = Arc::new(GaussRule::new(order)?);
        Self::with_rule(edges, rule)
    }

    fn with_rule(edges: Vec<f64>, rule: Arc<GaussRule>) -> Result<Self, GridError> {
        if edges.len() < 2
            || edges.iter().any(|e| !e.is_finite())
            || edges.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(GridError::Edges);
        }
        let n = rule.order();
        let mut nodes = Vec::with_capacity(n * (edges.len() - 1));
        let mut weights = Vec::with_capacity(nodes.capacity());
        for w in edges.windows(2) {
            let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            for k in 0..n {
                nodes.push(mid + half * rule.nodes[k]);
                weights.push(half * rule.weights[k]);
            }
        }
        Ok(Self {
            rule,
            edges,
            nodes,
            weights,
        })
    }

    pub fn builder(start: f64, end: f64) -> GridBuilder {
        GridBuilder {
            start,
            end,
            breaks: Vec::new(),
            zones: Vec::new(),
            max_width: 0.5,
            order: DEFAULT_ORDER,
            grade_origin: true,
        }
    }

    pub fn start(&self) -> f64 {
        self.edges[0]
    }

    pub fn end(&self) -> f64 {
        *self.edges.last().unwrap()
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn order(&self) -> usize {
        self.rule.order()
    }

    pub fn panels(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Quadrature weights for `dr` (no radial Jacobian).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of nodes strictly inside `(a, b)`.
    pub fn nodes_in(&self, a: f64, b: f64) -> usize {
        self.nodes.iter().filter(|&&r| r > a && r < b).count()
    }

    fn check(&self, f: &[C64]) -> Result<(), GridError> {
        if f.len() != self.len() {
            return Err(GridError::Length {
                expected: self.len(),
                got: f.len(),
            });
        }
        Ok(())
    }

    /// `∫ f dr` over the whole grid.
    pub fn integrate(&self, f: &[C64]) -> C64 {
        debug_assert!(self.check(f).is_ok());
        f.iter().zip(&self.weights).map(|(v, w)| v * *w).sum()
    }

    /// `∫_{start}^{r_i} f dr` at every node.
    pub fn cumulative(&self, f: &[C64]) -> Vec<C64> {
        debug_assert!(self.check(f).is_ok());
        let n = self.order();
        let mut out = vec![C64::new(0.0, 0.0); f.len()];
        let mut offset = C64::new(0.0, 0.0);
        for (p, w) in self.edges.windows(2).enumerate() {
            let half = 0.5 * (w[1] - w[0]);
            let block = &f[p * n..(p + 1) * n];
            for i in 0..n {
                let row = &self.rule.integ[i];
                let s: C64 = block.iter().zip(row).map(|(v, c)| v * *c).sum();
                out[p * n + i] = offset + s * half;
            }
            offset += block
                .iter()
                .zip(&self.weights[p * n..(p + 1) * n])
                .map(|(v, w)| v * *w)
                .sum::<C64>();
        }
        out
    }

    /// `∫_{r_i}^{end} f dr` at every node, accumulated from the right.
    pub fn cumulative_from_end(&self, f: &[C64]) -> Vec<C64> {
        debug_assert!(self.check(f).is_ok());
        let n = self.order();
        let np = self.panels();
        let mut out = vec![C64::new(0.0, 0.0); f.len()];
        let mut offset = C64::new(0.0, 0.0);
        for p in (0..np).rev() {
            let block = &f[p * n..(p + 1) * n];
            let wts = &self.weights[p * n..(p + 1) * n];
            let total: C64 = block.iter().zip(wts).map(|(v, w)| v * *w).sum();
            let half = 0.5 * (self.edges[p + 1] - self.edges[p]);
            for i in 0..n {
                let row = &self.rule.integ[i];
                let s: C64 = block.iter().zip(row).map(|(v, c)| v * *c).sum();
                out[p * n + i] = offset + total - s * half;
            }
            offset += total;
        }
        out
    }

    /// Panelwise spectral derivative.
    pub fn derivative(&self, f: &[C64]) -> Vec<C64> {
        debug_assert!(self.check(f).is_ok());
        let n = self.order();
        let mut out = vec![C64::new(0.0, 0.0); f.len()];
        for (p, w) in self.edges.windows(2).enumerate() {
            let scale = 2.0 / (w[1] - w[0]);
            let block = &f[p * n..(p + 1) * n];
            for i in 0..n {
                let s: C64 = block
                    .iter()
                    .zip(&self.rule.diff[i])
                    .map(|(v, c)| v * *c)
                    .sum();
                out[p * n + i] = s * scale;
            }
        }
        out
    }

    /// Index of the panel containing `r`, if `r` lies in the grid.
    pub fn panel_of(&self, r: f64) -> Option<usize> {
        if r < self.start() || r > self.end() {
            return None;
        }
        let p = self.edges.partition_point(|&e| e <= r);
        Some(p.saturating_sub(1).min(self.panels() - 1))
    }

    /// Polynomial interpolation of grid samples at `r`.
    pub fn interpolate(&self, f: &[C64], r: f64) -> Option<C64> {
        let p = self.panel_of(r)?;
        let n = self.order();
        let (a, b) = (self.edges[p], self.edges[p + 1]);
        let x = (2.0 * r - a - b) / (b - a);
        Some(self.rule.interpolate(&f[p * n..(p + 1) * n], x))
    }

    /// Every panel split in two.
    pub fn refined(&self) -> RadialGrid {
        let mut edges = Vec::with_capacity(2 * self.edges.len());
        for w in self.edges.windows(2) {
            edges.push(w[0]);
            edges.push(0.5 * (w[0] + w[1]));
        }
        edges.push(self.end());
        Self::with_rule(edges, self.rule.clone()).expect("refinement keeps edges increasing")
    }

    /// Samples of a real function at the nodes.
    pub fn sample(&self, f: impl Fn(f64) -> C64) -> Vec<C64> {
        self.nodes.iter().map(|&r| f(r)).collect()
    }
}

/// Collects breakpoints and resolution requirements before building a grid.
#[derive(Debug, Clone)]
pub struct GridBuilder {
    start: f64,
    end: f64,
    breaks: Vec<f64>,
    zones: Vec<(f64, f64, usize)>,
    max_width: f64,
    order: usize,
    grade_origin: bool,
}

impl GridBuilder {
    pub fn breaks(mut self, pts: impl IntoIterator<Item = f64>) -> Self {
        self.breaks.extend(pts);
        self
    }

    /// Require at least `panels` panels across `[a, b]`.
    pub fn zone(mut self, a: f64, b: f64, panels: usize) -> Self {
        self.breaks.push(a);
        self.breaks.push(b);
        self.zones.push((a, b, panels));
        self
    }

    pub fn max_width(mut self, w: f64) -> Self {
        self.max_width = w;
        self
    }

    pub fn order(mut self, n: usize) -> Self {
        self.order = n;
        self
    }

    pub fn grade_origin(mut self, on: bool) -> Self {
        self.grade_origin = on;
        self
    }

    pub fn build(self) -> Result<RadialGrid, GridError> {
        if !(self.end > self.start) || !self.max_width.is_finite() || self.max_width <= 0.0 {
            return Err(GridError::Edges);
        }
        let mut pts: Vec<f64> = self
            .breaks
            .iter()
            .copied()
            .filter(|&b| b > self.start && b < self.end)
            .collect();
        pts.push(self.start);
        pts.push(self.end);
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * b.abs().max(1.0));

        let mut edges = vec![pts[0]];
        for (idx, w) in pts.windows(2).enumerate() {
            let (a, b) = (w[0], w[1]);
            let mut count = ((b - a) / self.max_width).ceil().max(1.0) as usize;
            for &(za, zb, zn) in &self.zones {
                if a >= za - 1e-13 && b <= zb + 1e-13 {
                    let share = ((b - a) / (zb - za) * zn as f64).ceil() as usize;
                    count = count.max(share);
                }
            }
            if idx == 0 && self.grade_origin && self.start == 0.0 {
                // geometric panels toward the origin, where outgoing
                // solutions carry log r or negative powers
                let h = (b - a) / count as f64;
                for k in (1..=6).rev() {
                    edges.push(h * 0.25f64.powi(k));
                }
            }
            for i in 1..=count {
                edges.push(if i == count {
                    b
                } else {
                    a + (b - a) * i as f64 / count as f64
                });
            }
        }
        RadialGrid::from_edges(edges, self.order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn gauss_rule_integrates_polynomials() {
        let g = GaussRule::new(8).unwrap();
        let s: f64 = g
            .nodes
            .iter()
            .zip(&g.weights)
            .map(|(x, w)| w * x.powi(14))
            .sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        assert!((g.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        assert!(g.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn integration_matrix_is_exact_for_low_degree() {
        let g = GaussRule::new(10).unwrap();
        for (i, &x) in g.nodes.iter().enumerate() {
            let s: f64 = (0..10).map(|j| g.integ[i][j] * g.nodes[j].powi(3)).sum();
            assert!((s - (x.powi(4) - 1.0) / 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn cumulative_and_derivative_on_grid() {
        let grid = RadialGrid::builder(0.0, 3.0)
            .breaks([1.0, 2.0])
            .build()
            .unwrap();
        let f = grid.sample(|r| c(r.cos()));
        let cum = grid.cumulative(&f);
        let back = grid.cumulative_from_end(&f);
        let total = grid.integrate(&f);
        assert!((total.re - 3f64.sin()).abs() < 1e-14);
        for (i, &r) in grid.nodes().iter().enumerate() {
            assert!((cum[i].re - r.sin()).abs() < 1e-13);
            assert!((back[i] + cum[i] - total).norm() < 1e-13);
        }
        // differentiation loses ~n²/h digits, so check it away from the
        // graded origin panels
        let flat = RadialGrid::builder(0.0, 3.0)
            .grade_origin(false)
            .build()
            .unwrap();
        let d = flat.derivative(&flat.sample(|r| c(r.cos())));
        for (i, &r) in flat.nodes().iter().enumerate() {
            assert!((d[i].re + r.sin()).abs() < 1e-11);
        }
    }

    #[test]
    fn interpolation_and_refinement() {
        let grid = RadialGrid::builder(1.0, 4.0)
            .max_width(1.0)
            .build()
            .unwrap();
        let f = grid.sample(|r| c((2.0 * r).exp()));
        for &r in &[1.0, 1.3, 2.0, 3.77, 4.0] {
            let v = grid.interpolate(&f, r).unwrap();
            assert!((v.re - (2.0 * r).exp()).abs() < 1e-12 * (2.0 * r).exp());
        }
        assert!(grid.interpolate(&f, 4.1).is_none());
        let fine = grid.refined();
        assert_eq!(fine.panels(), 2 * grid.panels());
    }

    #[test]
    fn zones_force_resolution() {
        let grid = RadialGrid::builder(0.0, 5.0)
            .grade_origin(false)
            .max_width(10.0)
            .zone(2.0, 2.5, 4)
            .build()
            .unwrap();
        assert!(grid.nodes_in(2.0, 2.5) >= 4 * DEFAULT_ORDER);
    }

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(
            RadialGrid::from_edges(vec![1.0, 1.0], 4).unwrap_err(),
            GridError::Edges
        );
        assert_eq!(GaussRule::new(1).unwrap_err(), GridError::Order(1));
    }
}
