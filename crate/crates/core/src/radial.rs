//! Single-mode functions `u(r) cos(lθ)` sampled on a radial grid, with an
//! optional closed-form description beyond a radius.

use crate::grid::RadialGrid;
use crate::specfun::{bessel_jy, SpectralPoint};
use num_complex::Complex64 as C64;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// `∫₀^{2π} cos²(lθ) dθ`.
pub fn angular_norm(l: u32) -> f64 {
    if l == 0 {
        2.0 * PI
    } else {
        PI
    }
}

/// Harmonic exterior `c0 + clog·log r + Σ v_j r^j`, valid for `r ≥ from`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicTail {
    pub from: f64,
    pub c0: C64,
    pub clog: C64,
    pub v: BTreeMap<i32, C64>,
}

impl HarmonicTail {
    /// Tail of mode `l` from its growing and decaying coefficients:
    /// `(log r, 1)` for `l = 0`, `(r^l, r^{−l})` otherwise.
    pub fn from_mode(l: u32, from: f64, growing: C64, decaying: C64) -> Self {
        let mut v = BTreeMap::new();
        let (c0, clog) = if l == 0 {
            (decaying, growing)
        } else {
            v.insert(l as i32, growing);
            v.insert(-(l as i32), decaying);
            (ZERO, ZERO)
        };
        Self { from, c0, clog, v }
    }

    pub fn coeff(&self, j: i32) -> C64 {
        self.v.get(&j).copied().unwrap_or(ZERO)
    }

    pub fn eval(&self, r: f64) -> (C64, C64) {
        let mut u = self.c0 + self.clog * r.ln();
        let mut du = self.clog / r;
        for (&j, &c) in &self.v {
            u += c * r.powi(j);
            du += c * (j as f64) * r.powi(j - 1);
        }
        (u, du)
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self {
            from: self.from,
            c0: self.c0 * c,
            clog: self.clog * c,
            v: self.v.iter().map(|(&j, &x)| (j, x * c)).collect(),
        }
    }
}

/// Behaviour of a function beyond its sampled region.
#[derive(Debug, Clone, PartialEq)]
pub enum Tail {
    /// Identically zero beyond the grid.
    Compact,
    Harmonic(HarmonicTail),
    /// `coeff · H_l⁽¹⁾(λ r)` for `r ≥ from`.
    Outgoing {
        from: f64,
        lambda: SpectralPoint,
        coeff: C64,
    },
}

impl Tail {
    pub fn from_radius(&self) -> Option<f64> {
        match self {
            Tail::Compact => None,
            Tail::Harmonic(h) => Some(h.from),
            Tail::Outgoing { from, .. } => Some(*from),
        }
    }

    fn eval(&self, l: u32, r: f64) -> (C64, C64) {
        match self {
            Tail::Compact => (ZERO, ZERO),
            Tail::Harmonic(h) => h.eval(r),
            Tail::Outgoing { lambda, coeff, .. } => {
                let c = bessel_jy(l, lambda.scaled(r)).expect("order checked at construction");
                (*coeff * c.h1, *coeff * lambda.value() * c.dh1)
            }
        }
    }

    fn scaled(&self, c: C64) -> Tail {
        match self {
            Tail::Compact => Tail::Compact,
            Tail::Harmonic(h) => Tail::Harmonic(h.scaled(c)),
            Tail::Outgoing {
                from,
                lambda,
                coeff,
            } => Tail::Outgoing {
                from: *from,
                lambda: *lambda,
                coeff: *coeff * c,
            },
        }
    }
}

/// `u(r)·cos(lθ)` (or `u(r)` for `l = 0`), with values and radial
/// derivatives at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialFunction {
    pub mode: u32,
    pub grid: Arc<RadialGrid>,
    pub values: Vec<C64>,
    pub derivs: Vec<C64>,
    pub tail: Tail,
}

impl RadialFunction {
    pub fn new(
        mode: u32,
        grid: Arc<RadialGrid>,
        values: Vec<C64>,
        derivs: Vec<C64>,
        tail: Tail,
    ) -> Self {
        assert_eq!(values.len(), grid.len());
        assert_eq!(derivs.len(), grid.len());
        Self {
            mode,
            grid,
            values,
            derivs,
            tail,
        }
    }

    /// Samples `f(r) = (u, u')` at the nodes.
    pub fn from_fn(
        mode: u32,
        grid: Arc<RadialGrid>,
        tail: Tail,
        f: impl Fn(f64) -> (C64, C64),
    ) -> Self {
        let (values, derivs) = grid.nodes().iter().map(|&r| f(r)).unzip();
        Self::new(mode, grid, values, derivs, tail)
    }

    /// Derivatives by spectral differentiation of the samples.
    pub fn from_values(mode: u32, grid: Arc<RadialGrid>, values: Vec<C64>, tail: Tail) -> Self {
        let derivs = grid.derivative(&values);
        Self::new(mode, grid, values, derivs, tail)
    }

    pub fn zero(mode: u32, grid: Arc<RadialGrid>) -> Self {
        let n = grid.len();
        Self::new(mode, grid, vec![ZERO; n], vec![ZERO; n], Tail::Compact)
    }

    /// Smooth bump `exp(1 − 1/(1 − t²))` on `(inner, outer)`; with
    /// `inner = 0` it is centred at the origin instead, `t = r/outer`.
    pub fn bump(mode: u32, grid: Arc<RadialGrid>, inner: f64, outer: f64) -> Self {
        Self::from_fn(mode, grid, Tail::Compact, |r| {
            let (v, d) = bump_profile(inner, outer, r);
            (C64::new(v, 0.0), C64::new(d, 0.0))
        })
    }

    pub fn harmonic_tail(&self) -> Option<&HarmonicTail> {
        match &self.tail {
            Tail::Harmonic(h) => Some(h),
            _ => None,
        }
    }

    /// `(u(r), u'(r))`, from the tail where it applies.
    pub fn eval_with_deriv(&self, r: f64) -> (C64, C64) {
        if let Some(from) = self.tail.from_radius() {
            if r >= from {
                return self.tail.eval(self.mode, r);
            }
        }
        match (
            self.grid.interpolate(&self.values, r),
            self.grid.interpolate(&self.derivs, r),
        ) {
            (Some(u), Some(du)) => (u, du),
            _ => self.tail.eval(self.mode, r),
        }
    }

    pub fn eval(&self, r: f64) -> C64 {
        self.eval_with_deriv(r).0
    }

    /// `⟨u, v⟩ = ∫_{ℝ²} u v̄` over the grid; zero between different modes.
    pub fn inner(&self, other: &RadialFunction) -> C64 {
        if self.mode != other.mode {
            return ZERO;
        }
        let g = &self.grid;
        let s: C64 = if g == &other.grid {
            g.nodes()
                .iter()
                .zip(g.weights())
                .zip(self.values.iter().zip(&other.values))
                .map(|((&r, &w), (a, b))| a * b.conj() * (w * r))
                .sum()
        } else {
            g.nodes()
                .iter()
                .zip(g.weights())
                .zip(&self.values)
                .map(|((&r, &w), a)| a * other.eval(r).conj() * (w * r))
                .sum()
        };
        s * angular_norm(self.mode)
    }

    /// `∫_{ℝ²} u cos(lθ)·(angular factor)` for mode 0, i.e. `2π ∫ u r dr`.
    pub fn integral(&self) -> C64 {
        if self.mode != 0 {
            return ZERO;
        }
        let g = &self.grid;
        let s: C64 = g
            .nodes()
            .iter()
            .zip(g.weights())
            .zip(&self.values)
            .map(|((&r, &w), a)| a * (w * r))
            .sum();
        s * 2.0 * PI
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self {
            mode: self.mode,
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
            derivs: self.derivs.iter().map(|v| v * c).collect(),
            tail: self.tail.scaled(c),
        }
    }

    /// `a·self + b·other` on a shared grid; the result keeps no tail unless
    /// both are compact.
    pub fn combine(&self, a: C64, other: &RadialFunction, b: C64) -> Self {
        assert_eq!(self.mode, other.mode);
        assert!(self.grid == other.grid);
        let mix = |x: &[C64], y: &[C64]| x.iter().zip(y).map(|(p, q)| p * a + q * b).collect();
        let tail = match (&self.tail, &other.tail) {
            (Tail::Compact, Tail::Compact) => Tail::Compact,
            (Tail::Harmonic(h1), Tail::Harmonic(h2)) => {
                let mut v = h1.scaled(a).v;
                for (j, c) in h2.scaled(b).v {
                    *v.entry(j).or_insert(ZERO) += c;
                }
                Tail::Harmonic(HarmonicTail {
                    from: h1.from.max(h2.from),
                    c0: h1.c0 * a + h2.c0 * b,
                    clog: h1.clog * a + h2.clog * b,
                    v,
                })
            }
            (Tail::Compact, t) if b != ZERO => t.scaled(b),
            (t, Tail::Compact) => t.scaled(a),
            _ => Tail::Compact,
        };
        Self::new(
            self.mode,
            self.grid.clone(),
            mix(&self.values, &other.values),
            mix(&self.derivs, &other.derivs),
            tail,
        )
    }

    /// Same function sampled on another grid.
    pub fn resampled(&self, grid: Arc<RadialGrid>) -> Self {
        Self::from_fn(self.mode, grid, self.tail.clone(), |r| {
            self.eval_with_deriv(r)
        })
    }

    /// Largest radius with a nonzero sample.
    pub fn support_end(&self) -> f64 {
        let g = &self.grid;
        let last = self.values.iter().rposition(|v| v.norm() > 0.0);
        match last {
            None => g.start(),
            Some(i) => {
                let n = g.order();
                g.edges()[i / n + 1]
            }
        }
    }
}

/// `(χ, χ')` of the bump profile at `r`.
pub fn bump_profile(inner: f64, outer: f64, r: f64) -> (f64, f64) {
    let (t, dt) = if inner == 0.0 {
        (r / outer, 1.0 / outer)
    } else {
        let mid = 0.5 * (inner + outer);
        let half = 0.5 * (outer - inner);
        ((r - mid) / half, 1.0 / half)
    };
    if t.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let q = 1.0 - t * t;
    let v = (1.0 - 1.0 / q).exp();
    (v, v * (-2.0 * t / (q * q)) * dt)
}

#[derive(Serialize)]
struct ExteriorOut<'a> {
    from: f64,
    c0: C64,
    clog: C64,
    v: &'a BTreeMap<i32, C64>,
}

impl Serialize for RadialFunction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("RadialFunction", 4)?;
        st.serialize_field("mode", &self.mode)?;
        st.serialize_field("radii", self.grid.nodes())?;
        st.serialize_field("values", &self.values)?;
        match &self.tail {
            Tail::Harmonic(h) => st.serialize_field(
                "exterior",
                &Some(ExteriorOut {
                    from: h.from,
                    c0: h.c0,
                    clog: h.clog,
                    v: &h.v,
                }),
            )?,
            _ => st.serialize_field("exterior", &None::<ExteriorOut>)?,
        }
        st.end()
    }
}
