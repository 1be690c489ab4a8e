//! Free and perturbed resolvents applied one angular mode at a time, and the
//! identities relating them.

use crate::grid::RadialGrid;
use crate::modes::{eval_many, ModeProblem, ModeSolution};
use crate::radial::{angular_norm, RadialFunction, Tail};
use crate::scatterer::{CutoffProfile, RadialScatterer, ScattererError};
use crate::specfun::{hankel0, GammaConstants, SpectralPoint};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;
use std::sync::Arc;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Relative size of the Wronskian below which `λ` is treated as a pole.
pub const POLE_GUARD: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ResolventError {
    #[error("kernel is singular at x = y")]
    Singular,
    #[error(
        "λ = {modulus:e}·exp({arg}i) is at a pole of mode {mode} (relative Wronskian {ratio:e})"
    )]
    AtPole {
        modulus: f64,
        arg: f64,
        mode: u32,
        ratio: f64,
    },
    #[error("input must be compactly supported inside the grid")]
    NotCompact,
    #[error("functions live in different modes ({0} and {1})")]
    ModeMismatch(u32, u32),
    #[error("harmonic expansion unavailable at r = {0}")]
    NoExpansion(f64),
    #[error(transparent)]
    Scatterer(#[from] ScattererError),
}

/// A point of the plane in polar coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polar {
    pub r: f64,
    pub theta: f64,
}

impl Polar {
    pub fn new(r: f64, theta: f64) -> Self {
        Self { r, theta }
    }

    pub fn distance(&self, o: &Polar) -> f64 {
        let d2 = self.r * self.r + o.r * o.r - 2.0 * self.r * o.r * (self.theta - o.theta).cos();
        d2.max(0.0).sqrt()
    }
}

/// `(i/4) H₀⁽¹⁾(λ|x − y|)` with `log(λ|x−y|) = log λ + ln|x−y|`.
pub fn free_kernel(lambda: SpectralPoint, x: Polar, y: Polar) -> Result<C64, ResolventError> {
    let d = x.distance(&y);
    if d == 0.0 {
        return Err(ResolventError::Singular);
    }
    Ok(C64::new(0.0, 0.25) * hankel0(lambda.scaled(d)))
}

/// The kernel multiplying `λ^{2j} (log λ)^k` in the small-`λ` expansion of
/// the free resolvent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreeCoeffKernel {
    pub j: u32,
    pub k: u32,
}

impl FreeCoeffKernel {
    pub fn new(j: u32, k: u32) -> Self {
        assert!(k <= 1, "only k = 0, 1 occur");
        Self { j, k }
    }

    /// `R_{2j,1} = −(1/2π)(−ρ²/4)^j/(j!)²`,
    /// `R_{2j,0} = −(1/2π)(log ρ − γ_j)(−ρ²/4)^j/(j!)²`.
    pub fn evaluate(&self, x: Polar, y: Polar) -> Result<C64, ResolventError> {
        let rho = x.distance(&y);
        if rho == 0.0 {
            return Err(ResolventError::Singular);
        }
        let j = self.j as usize;
        let mut p = 1.0;
        for m in 1..=j {
            p *= -rho * rho / 4.0 / (m * m) as f64;
        }
        let base = C64::new(-p / (2.0 * PI), 0.0);
        Ok(if self.k == 1 {
            base
        } else {
            let g = GammaConstants::new(j + 1).gamma_seq[j];
            base * (rho.ln() - g)
        })
    }

    /// `Σ_{j ≤ jmax, k} R_{2j,k} λ^{2j}(log λ)^k`.
    pub fn truncation(
        jmax: u32,
        lambda: SpectralPoint,
        x: Polar,
        y: Polar,
    ) -> Result<C64, ResolventError> {
        let l2 = lambda.square();
        let lg = lambda.log_value();
        let mut s = ZERO;
        for j in 0..=jmax {
            let pw = l2.powu(j);
            s += pw * (Self::new(j, 0).evaluate(x, y)? + lg * Self::new(j, 1).evaluate(x, y)?);
        }
        Ok(s)
    }
}

/// Green-function data for one mode at one `λ`: the regular solution `φ`,
/// the outgoing solution `ψ` and `C = r(φ'ψ − φψ')`.
#[derive(Debug, Clone)]
pub struct ResolventSample {
    pub lambda: SpectralPoint,
    pub mode: u32,
    pub problem: ModeProblem,
    pub phi: ModeSolution,
    pub psi: ModeSolution,
    pub wronskian: C64,
    /// `|C| / (|rφ'ψ| + |rφψ'|)` at the reference radius.
    pub pole_ratio: f64,
    support: f64,
}

impl ResolventSample {
    pub fn new(
        s: &RadialScatterer,
        lambda: SpectralPoint,
        mode: u32,
    ) -> Result<Self, ResolventError> {
        let problem = ModeProblem::new(s, mode, Some(lambda));
        let phi = problem.regular();
        let psi = problem.outgoing();
        let r = s.support_radius().max(s.inner_radius()).max(1.0);
        let v = eval_many(&[&phi, &psi], r);
        let ((p, dp), (q, dq)) = (v[0], v[1]);
        let wronskian = (dp * q - p * dq) * r;
        let scale = (dp * q * r).norm() + (p * dq * r).norm();
        let pole_ratio = wronskian.norm() / scale;
        if !(pole_ratio > POLE_GUARD) {
            return Err(ResolventError::AtPole {
                modulus: lambda.modulus(),
                arg: lambda.arg(),
                mode,
                ratio: pole_ratio,
            });
        }
        Ok(Self {
            lambda,
            mode,
            problem,
            phi,
            psi,
            wronskian,
            pole_ratio,
            support: s.support_radius(),
        })
    }

    /// Wronskian at radius `r`; constant in `r` up to rounding.
    pub fn wronskian_at(&self, r: f64) -> C64 {
        crate::modes::wronskian(&self.phi, &self.psi, r)
    }

    /// `R(λ) f` for `f` in this mode, by variation of parameters:
    /// `u = (ψ ∫₀^r φ f r' + φ ∫_r^∞ ψ f r') / C`.
    pub fn apply(&self, f: &RadialFunction) -> Result<RadialFunction, ResolventError> {
        if f.mode != self.mode {
            return Err(ResolventError::ModeMismatch(f.mode, self.mode));
        }
        if f.tail != Tail::Compact {
            return Err(ResolventError::NotCompact);
        }
        let g = f.grid.clone();
        let (pv, qv): (Vec<_>, Vec<_>) = g
            .nodes()
            .iter()
            .map(|&r| {
                let v = eval_many(&[&self.phi, &self.psi], r);
                (v[0], v[1])
            })
            .unzip();
        let a: Vec<C64> = g
            .nodes()
            .iter()
            .zip(&pv)
            .zip(&f.values)
            .map(|((&r, p), v)| p.0 * v * r)
            .collect();
        let b: Vec<C64> = g
            .nodes()
            .iter()
            .zip(&qv)
            .zip(&f.values)
            .map(|((&r, q), v)| q.0 * v * r)
            .collect();
        let ia = g.cumulative(&a);
        let ib = g.cumulative_from_end(&b);
        let total = g.integrate(&a);
        let c = self.wronskian;
        let mut values = Vec::with_capacity(g.len());
        let mut derivs = Vec::with_capacity(g.len());
        for i in 0..g.len() {
            values.push((qv[i].0 * ia[i] + pv[i].0 * ib[i]) / c);
            derivs.push((qv[i].1 * ia[i] + pv[i].1 * ib[i]) / c);
        }
        let tail = Tail::Outgoing {
            from: f.support_end().max(self.support).max(g.start()),
            lambda: self.lambda,
            coeff: total / c,
        };
        Ok(RadialFunction::new(self.mode, g, values, derivs, tail))
    }

    /// `max |(P − λ²)u − f| / max |f|` at grid nodes with `r ≥ rmin` away
    /// from panel ends, using a spectral second derivative.
    pub fn residual(
        &self,
        s: &RadialScatterer,
        f: &RadialFunction,
        u: &RadialFunction,
        rmin: f64,
    ) -> f64 {
        let g = &u.grid;
        let d2 = g.derivative(&u.derivs);
        let l2 = (self.mode * self.mode) as f64;
        let lam2 = self.lambda.square();
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        let n = g.order();
        let edges = g.edges();
        for (i, &r) in g.nodes().iter().enumerate() {
            scale = scale.max(f.values[i].norm());
            let (a, b) = (edges[i / n], edges[i / n + 1]);
            // differentiating twice loses accuracy next to panel ends
            let x = (2.0 * r - a - b) / (b - a);
            if r < rmin || x.abs() > 0.8 {
                continue;
            }
            let v = s.potential_at(r);
            let res =
                -d2[i] - u.derivs[i] / r + (l2 / (r * r) + v - lam2) * u.values[i] - f.values[i];
            worst = worst.max(res.norm());
        }
        worst / scale.max(f64::MIN_POSITIVE)
    }
}

/// `R(λ) f` for one mode.
pub fn apply_resolvent_mode(
    s: &RadialScatterer,
    lambda: SpectralPoint,
    f: &RadialFunction,
) -> Result<RadialFunction, ResolventError> {
    ResolventSample::new(s, lambda, f.mode)?.apply(f)
}

/// `R₀(λ) f`, the free resolvent, evaluated with the same machinery on the
/// grid of `f`.
pub fn apply_free_mode(
    lambda: SpectralPoint,
    f: &RadialFunction,
) -> Result<RadialFunction, ResolventError> {
    apply_resolvent_mode(&RadialScatterer::free(), lambda, f)
}

/// Grid covering a scatterer, a cutoff bridge and extra breakpoints, out to
/// `end`.
pub fn standard_grid(
    s: &RadialScatterer,
    cutoff: &CutoffProfile,
    extra: &[f64],
    end: f64,
) -> Arc<RadialGrid> {
    Arc::new(
        RadialGrid::builder(s.inner_radius(), end)
            .breaks(s.breakpoints())
            .breaks(extra.iter().copied())
            .zone(cutoff.r0, cutoff.outer(), 4)
            .build()
            .expect("scatterer and cutoff radii are ordered"),
    )
}

/// `𝔹(u, v) = ∫_{|x| = r₁} (u ∂_r v̄ − ∂_r u v̄)` from harmonic expansions:
/// `2π[c₀(u) c̄_log(v) − c_log(u) c̄₀(v) + Σ_j j v_{−j}(u) v̄_j(v)]`.
pub fn boundary_pairing(
    u: &RadialFunction,
    v: &RadialFunction,
    r1: f64,
) -> Result<C64, ResolventError> {
    if u.mode != v.mode {
        return Ok(ZERO);
    }
    let (Some(hu), Some(hv)) = (u.harmonic_tail(), v.harmonic_tail()) else {
        return Err(ResolventError::NoExpansion(r1));
    };
    if hu.from > r1 || hv.from > r1 {
        return Err(ResolventError::NoExpansion(r1));
    }
    let mut s = hu.c0 * hv.clog.conj() - hu.clog * hv.c0.conj();
    for (&j, &c) in &hv.v {
        s += (j as f64) * hu.coeff(-j) * c.conj();
    }
    Ok(s * 2.0 * PI)
}

/// The same pairing by evaluating values and radial derivatives on the
/// circle `|x| = r₁`.
pub fn boundary_pairing_direct(u: &RadialFunction, v: &RadialFunction, r1: f64) -> C64 {
    if u.mode != v.mode {
        return ZERO;
    }
    let (a, da) = u.eval_with_deriv(r1);
    let (b, db) = v.eval_with_deriv(r1);
    (a * db.conj() - da * b.conj()) * (angular_norm(u.mode) * r1)
}
