//! Radially symmetric scatterers and the cutoff used to localise them.

use crate::radial::{RadialFunction, Tail};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScattererError {
    #[error("breakpoints not increasing")]
    NonIncreasing,
    #[error("{0} must be positive and finite")]
    NonPositive(&'static str),
    #[error("{breaks} breakpoints but {values} values")]
    LengthMismatch { breaks: usize, values: usize },
    #[error("potential value is not finite")]
    NonFinite,
    #[error("cutoff r0 = {r0} lies inside the scatterer support radius {support}")]
    CutoffInside { r0: f64, support: f64 },
    #[error("only potentials can be perturbed")]
    NotPotential,
    #[error("grid too coarse: {nodes} nodes across the cutoff bridge, need at least 32")]
    CoarseBridge { nodes: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

/// `−Δ + V` with `V` piecewise constant on `(r_{j−1}, r_j)`, `r_0 = 0`, or
/// the Laplacian outside a disk with a boundary condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialScatterer {
    PiecewisePotential { breaks: Vec<f64>, values: Vec<C64> },
    DiskObstacle { radius: f64, bc: BoundaryCondition },
}

impl RadialScatterer {
    pub fn potential(breaks: Vec<f64>, values: Vec<C64>) -> Result<Self, ScattererError> {
        if breaks.len() != values.len() {
            return Err(ScattererError::LengthMismatch {
                breaks: breaks.len(),
                values: values.len(),
            });
        }
        if breaks.iter().any(|b| !b.is_finite()) || values.iter().any(|v| !v.is_finite()) {
            return Err(ScattererError::NonFinite);
        }
        if breaks.first().is_some_and(|&b| b <= 0.0) || breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ScattererError::NonIncreasing);
        }
        Ok(Self::PiecewisePotential { breaks, values })
    }

    pub fn free() -> Self {
        Self::PiecewisePotential {
            breaks: Vec::new(),
            values: Vec::new(),
        }
    }

    /// `V = v` on `r < radius`.
    pub fn well(radius: f64, v: f64) -> Result<Self, ScattererError> {
        Self::potential(vec![radius], vec![C64::new(v, 0.0)])
    }

    pub fn disk(radius: f64, bc: BoundaryCondition) -> Result<Self, ScattererError> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(ScattererError::NonPositive("radius"));
        }
        Ok(Self::DiskObstacle { radius, bc })
    }

    /// Radius beyond which the operator is `−Δ`.
    pub fn support_radius(&self) -> f64 {
        match self {
            Self::PiecewisePotential { breaks, .. } => breaks.last().copied().unwrap_or(0.0),
            Self::DiskObstacle { radius, .. } => *radius,
        }
    }

    /// Left end of the radial domain.
    pub fn inner_radius(&self) -> f64 {
        match self {
            Self::PiecewisePotential { .. } => 0.0,
            Self::DiskObstacle { radius, .. } => *radius,
        }
    }

    pub fn is_self_adjoint(&self) -> bool {
        match self {
            Self::PiecewisePotential { values, .. } => values.iter().all(|v| v.im == 0.0),
            Self::DiskObstacle { .. } => true,
        }
    }

    /// `Re V ≥ 0` everywhere.
    pub fn is_admissible(&self) -> bool {
        match self {
            Self::PiecewisePotential { values, .. } => values.iter().all(|v| v.re >= 0.0),
            Self::DiskObstacle { .. } => true,
        }
    }

    pub fn is_free(&self) -> bool {
        match self {
            Self::PiecewisePotential { values, .. } => {
                values.iter().all(|v| *v == C64::new(0.0, 0.0))
            }
            Self::DiskObstacle { .. } => false,
        }
    }

    /// `(a, b, V)` for each potential piece; empty for obstacles.
    pub fn pieces(&self) -> Vec<(f64, f64, C64)> {
        match self {
            Self::PiecewisePotential { breaks, values } => {
                let mut a = 0.0;
                breaks
                    .iter()
                    .zip(values)
                    .map(|(&b, &v)| {
                        let p = (a, b, v);
                        a = b;
                        p
                    })
                    .collect()
            }
            Self::DiskObstacle { .. } => Vec::new(),
        }
    }

    /// Radii where the data changes.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::PiecewisePotential { breaks, .. } => breaks.clone(),
            Self::DiskObstacle { radius, .. } => vec![*radius],
        }
    }

    pub fn potential_at(&self, r: f64) -> C64 {
        self.pieces()
            .into_iter()
            .find(|&(a, b, _)| r > a && r <= b)
            .map(|p| p.2)
            .unwrap_or(C64::new(0.0, 0.0))
    }

    /// `V + ε V₁` for two piecewise potentials.
    pub fn perturbed(&self, eps: f64, v1: &RadialScatterer) -> Result<Self, ScattererError> {
        let (
            Self::PiecewisePotential { breaks: b0, .. },
            Self::PiecewisePotential { breaks: b1, .. },
        ) = (self, v1)
        else {
            return Err(ScattererError::NotPotential);
        };
        let mut breaks: Vec<f64> = b0.iter().chain(b1).copied().collect();
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
        let values = breaks
            .iter()
            .map(|&b| {
                let r = b - 1e-12 * b.max(1.0);
                self.potential_at(r) + eps * v1.potential_at(r)
            })
            .collect();
        Self::potential(breaks, values)
    }
}

/// `χ₁ = 1` on `r ≤ r0`, `0` on `r ≥ r0 + width`, with the smooth
/// `exp(1/t − 1/(1−t))` bridge in between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffProfile {
    pub r0: f64,
    pub width: f64,
}

impl CutoffProfile {
    pub fn new(r0: f64, width: f64) -> Result<Self, ScattererError> {
        if !(r0 > 0.0) || !r0.is_finite() {
            return Err(ScattererError::NonPositive("cutoff.r0"));
        }
        if !(width > 0.0) || !width.is_finite() {
            return Err(ScattererError::NonPositive("cutoff.width"));
        }
        Ok(Self { r0, width })
    }

    /// Default cutoff hugging a scatterer.
    pub fn for_scatterer(s: &RadialScatterer) -> Self {
        Self {
            r0: s.support_radius().max(0.5) + 0.5,
            width: 1.0,
        }
    }

    pub fn check(&self, s: &RadialScatterer) -> Result<(), ScattererError> {
        if self.r0 < s.support_radius() {
            return Err(ScattererError::CutoffInside {
                r0: self.r0,
                support: s.support_radius(),
            });
        }
        Ok(())
    }

    pub fn outer(&self) -> f64 {
        self.r0 + self.width
    }

    /// Default radius for boundary pairings, one unit past the bridge.
    pub fn pairing_radius(&self) -> f64 {
        self.outer() + 1.0
    }

    /// `(χ, χ', χ'')` at `r`.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        let t = (r - self.r0) / self.width;
        if t <= 0.0 {
            return (1.0, 0.0, 0.0);
        }
        if t >= 1.0 {
            return (0.0, 0.0, 0.0);
        }
        let q = 1.0 / t - 1.0 / (1.0 - t);
        let e = (-q.abs()).exp();
        let sigma = if q > 0.0 {
            e / (1.0 + e)
        } else {
            1.0 / (1.0 + e)
        };
        let s1s = e / ((1.0 + e) * (1.0 + e));
        if s1s == 0.0 {
            return (1.0 - sigma, 0.0, 0.0);
        }
        let dq = -1.0 / (t * t) - 1.0 / ((1.0 - t) * (1.0 - t));
        let d2q = 2.0 / (t * t * t) - 2.0 / ((1.0 - t) * (1.0 - t) * (1.0 - t));
        let ds = -s1s * dq;
        let d2s = -(1.0 - 2.0 * sigma) * ds * dq - s1s * d2q;
        let w = self.width;
        (1.0 - sigma, -ds / w, -d2s / (w * w))
    }

    pub fn chi(&self, r: f64) -> f64 {
        self.eval(r).0
    }

    /// `Δχ₁ = χ'' + χ'/r`.
    pub fn laplacian(&self, r: f64) -> f64 {
        let (_, d1, d2) = self.eval(r);
        d2 + d1 / r
    }

    /// `[Δ, χ₁]u = (Δχ₁)u + 2χ₁'u'` on the same mode.
    pub fn commutator_apply(&self, u: &RadialFunction) -> Result<RadialFunction, ScattererError> {
        let nodes = u.grid.nodes_in(self.r0, self.outer());
        if nodes < 32 {
            return Err(ScattererError::CoarseBridge { nodes });
        }
        let g = u.grid.clone();
        let (values, derivs): (Vec<C64>, Vec<C64>) = g
            .nodes()
            .iter()
            .zip(u.values.iter().zip(&u.derivs))
            .map(|(&r, (&v, &dv))| {
                let (_, d1, d2) = self.eval(r);
                (v * (d2 + d1 / r) + dv * (2.0 * d1), C64::new(0.0, 0.0))
            })
            .unzip();
        let mut out = RadialFunction::new(u.mode, g.clone(), values, derivs, Tail::Compact);
        out.derivs = g.derivative(&out.values);
        Ok(out)
    }

    /// `χ₁ u` with the derivative `χ₁'u + χ₁u'`; the tail is dropped.
    pub fn multiply(
        &self,
        u: &RadialFunction,
        f: impl Fn(f64) -> f64,
        df: impl Fn(f64) -> f64,
    ) -> RadialFunction {
        let g = u.grid.clone();
        let (values, derivs) = g
            .nodes()
            .iter()
            .zip(u.values.iter().zip(&u.derivs))
            .map(|(&r, (&v, &dv))| (v * f(r), dv * f(r) + v * df(r)))
            .unzip();
        RadialFunction::new(u.mode, g, values, derivs, Tail::Compact)
    }
}
