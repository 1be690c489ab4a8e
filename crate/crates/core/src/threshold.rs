//! Zero-energy analysis: which modes carry bounded or decaying solutions
//! of `Pu = 0`, and the normalised solutions that enter the low-energy
//! resolvent expansion.

use crate::grid::RadialGrid;
use crate::modes::ModeProblem;
use crate::radial::{angular_norm, RadialFunction, Tail};
use crate::scatterer::{CutoffProfile, RadialScatterer};
use crate::specfun::gamma0;
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::sync::Arc;

/// Relative size below which a connection coefficient counts as zero.
pub const ZERO_TOL: f64 = 1e-10;
const DEGENERATE_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ThresholdError {
    #[error("mode {0}: both connection coefficients vanish (degenerate scatterer)")]
    Degenerate(u32),
    #[error("lmax must be at least 2, got {0}")]
    Lmax(u32),
    #[error("no sign change of the mode-{mode} growing coefficient on [{lo}, {hi}]")]
    NoBracket { mode: u32, lo: f64, hi: f64 },
}

/// Zero-energy connection data of one mode: the regular solution equals
/// `growing·g + decaying·d` outside the support, with `(g, d) = (log r, 1)`
/// for `l = 0` and `(r^l, r^{−l})` otherwise.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdMode {
    pub mode: u32,
    pub growing: C64,
    pub decaying: C64,
    #[serde(rename = "regularSolution")]
    pub regular_solution: RadialFunction,
}

impl ThresholdMode {
    /// `|growing| R^l < tol·|decaying| R^{−l}` at `R = max(support, 1)`.
    pub fn growing_vanishes(&self, support: f64) -> bool {
        let r = support.max(1.0);
        let l = self.mode as i32;
        self.growing.norm() * r.powi(l) < ZERO_TOL * self.decaying.norm() * r.powi(-l)
    }

    /// Growing coefficient relative to the decaying one, at the same scale.
    pub fn detuning(&self, support: f64) -> C64 {
        let r = support.max(1.0);
        let l = self.mode as i32;
        self.growing * r.powi(2 * l) / self.decaying
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenMode {
    pub mode: u32,
    /// L²-normalised eigenfunction (`cos lθ` component).
    pub function: RadialFunction,
    /// Coefficient of `r^{−l}` outside the support.
    pub decay_coeff: C64,
}

/// The report assembled by [`classify`].
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ThresholdReport {
    #[serde(rename = "dimG0modG1")]
    pub dim_g0_mod_g1: u8,
    #[serde(rename = "dimG1modG2")]
    pub dim_g1_mod_g2: u8,
    pub eigen_modes: Vec<EigenMode>,
    #[serde(rename = "U0")]
    pub u0: Option<RadialFunction>,
    #[serde(rename = "Ulog")]
    pub ulog: Option<RadialFunction>,
    pub c0_ulog: Option<C64>,
    pub a: Option<C64>,
    pub capacity: Option<f64>,
    /// One radial profile per resonant direction; with `M = 2` the second
    /// direction is the `sin θ` copy of the first.
    #[serde(rename = "Uw")]
    pub uw: Vec<RadialFunction>,
    pub alpha: Vec<C64>,
    pub s: Vec<C64>,
    pub r1: f64,
    pub modes: Vec<ThresholdMode>,
}

/// Zero-energy regular solution of mode `l`, sampled on `grid`.
pub fn solve_zero_mode(s: &RadialScatterer, l: u32, grid: Arc<RadialGrid>) -> ThresholdMode {
    let sol = ModeProblem::new(s, l, None).regular();
    let tail = sol.harmonic_tail();
    let [growing, decaying] = sol.exterior();
    ThresholdMode {
        mode: l,
        growing,
        decaying,
        regular_solution: sol.sample(grid, Tail::Harmonic(tail)),
    }
}

/// Grid for zero-energy functions out to `end`.
pub fn threshold_grid(s: &RadialScatterer, cutoff: &CutoffProfile, end: f64) -> Arc<RadialGrid> {
    crate::resolvent::standard_grid(s, cutoff, &[], end)
}

/// `∫_{start}^{end} |u|² r dr` over the grid.
fn radial_mass(u: &RadialFunction) -> f64 {
    let g = &u.grid;
    g.nodes()
        .iter()
        .zip(g.weights())
        .zip(&u.values)
        .map(|((&r, &w), v)| v.norm_sqr() * r * w)
        .sum()
}

pub fn classify(
    s: &RadialScatterer,
    lmax: u32,
    grid: Arc<RadialGrid>,
) -> Result<ThresholdReport, ThresholdError> {
    if lmax < 2 {
        return Err(ThresholdError::Lmax(lmax));
    }
    let support = s.support_radius();
    let end = grid.end();
    let modes: Vec<ThresholdMode> =
        crate::exec::map(0..=lmax, |l| solve_zero_mode(s, l, grid.clone()));
    for m in &modes {
        let r = support.max(1.0);
        let l = m.mode as i32;
        let size = m.growing.norm() * r.powi(l) + m.decaying.norm() * r.powi(-l);
        let interior = m
            .regular_solution
            .values
            .iter()
            .fold(0.0f64, |acc, v| acc.max(v.norm()));
        if size < DEGENERATE_TOL * interior {
            return Err(ThresholdError::Degenerate(m.mode));
        }
    }

    let m0 = &modes[0];
    let s_res = m0.growing_vanishes(support);
    let (u0, ulog, c0_ulog, a, capacity) = if s_res {
        let u0 = m0.regular_solution.scaled(m0.decaying.inv());
        (Some(u0), None, None, None, None)
    } else {
        let ulog = m0.regular_solution.scaled(m0.growing.inv());
        let c0 = m0.decaying / m0.growing;
        let cap = matches!(s, RadialScatterer::DiskObstacle { .. }).then(|| -c0.re);
        (None, Some(ulog), Some(c0), Some(gamma0() + c0), cap)
    };

    let m1 = &modes[1];
    let p_res = m1.growing_vanishes(support);
    let mut uw = Vec::new();
    let mut alpha = Vec::new();
    let mut svals = Vec::new();
    if p_res {
        let u = m1.regular_solution.scaled(m1.decaying.inv());
        // outside the support U_w = 1/r exactly, so the limit is reached at
        // the grid end
        let al = C64::new(radial_mass(&u) - end.ln(), 0.0);
        for _ in 0..2 {
            uw.push(u.clone());
            alpha.push(al);
            svals.push(gamma0() + al);
        }
    }

    let mut eigen_modes = Vec::new();
    for m in &modes[2..] {
        if m.growing_vanishes(support) {
            let l = m.mode as i32;
            let b = m.decaying;
            let tail = b.norm_sqr() * end.powi(2 - 2 * l) / (2 * l - 2) as f64;
            let norm2 = angular_norm(m.mode) * (radial_mass(&m.regular_solution) + tail);
            let scale = C64::new(1.0 / norm2.sqrt(), 0.0);
            eigen_modes.push(EigenMode {
                mode: m.mode,
                function: m.regular_solution.scaled(scale),
                decay_coeff: b * scale,
            });
        }
    }

    Ok(ThresholdReport {
        dim_g0_mod_g1: s_res as u8,
        dim_g1_mod_g2: if p_res { 2 } else { 0 },
        eigen_modes,
        u0,
        ulog,
        c0_ulog,
        a,
        capacity,
        uw,
        alpha,
        s: svals,
        r1: end,
        modes,
    })
}

impl ThresholdReport {
    pub fn has_s_resonance(&self) -> bool {
        self.dim_g0_mod_g1 == 1
    }

    pub fn has_p_resonance(&self) -> bool {
        self.dim_g1_mod_g2 > 0
    }

    pub fn has_eigenvalue(&self) -> bool {
        !self.eigen_modes.is_empty()
    }

    /// No zero resonance and no zero eigenvalue.
    pub fn is_regular(&self) -> bool {
        !self.has_s_resonance() && !self.has_p_resonance() && !self.has_eigenvalue()
    }
}

/// `Σ ψ⟨f, ψ⟩` over the zero eigenfunctions of `f`'s mode.
pub fn eigen_projection(report: &ThresholdReport, f: &RadialFunction) -> RadialFunction {
    let mut out = RadialFunction::zero(f.mode, f.grid.clone());
    for e in report.eigen_modes.iter().filter(|e| e.mode == f.mode) {
        let psi = e.function.resampled(f.grid.clone());
        let mut psi_c = psi.clone();
        psi_c.tail = Tail::Compact;
        out = out.combine(C64::new(1.0, 0.0), &psi_c, f.inner(&psi));
    }
    out
}

/// Finds `c` in `[lo, hi]` where the mode-`l` growing coefficient of
/// `build(c)` vanishes, by bisection on its real part followed by secant
/// polishing.
pub fn tune_threshold(
    build: impl Fn(f64) -> RadialScatterer,
    l: u32,
    lo: f64,
    hi: f64,
) -> Result<f64, ThresholdError> {
    let g = |c: f64| {
        let s = build(c);
        let sol = ModeProblem::new(&s, l, None).regular();
        let [a, b] = sol.exterior();
        let r = s.support_radius().max(1.0);
        // normalise by the decaying size so the function stays O(1)
        (a * r.powi(2 * l as i32)).re / (b.norm() + a.norm() * r.powi(2 * l as i32))
    };
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (g(a), g(b));
    if fa * fb > 0.0 {
        return Err(ThresholdError::NoBracket { mode: l, lo, hi });
    }
    while (b - a) > 1e-14 * b.abs().max(1.0) {
        let m = 0.5 * (a + b);
        let fm = g(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    let (fa, fb) = (g(a), g(b));
    if fb != fa {
        let c = a - fa * (b - a) / (fb - fa);
        if c >= a && c <= b {
            return Ok(c);
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scatterer::BoundaryCondition;
    use crate::specfun::{bessel_jy, SpectralPoint};

    fn setup(s: &RadialScatterer) -> Arc<RadialGrid> {
        let c = CutoffProfile::for_scatterer(s);
        threshold_grid(s, &c, c.pairing_radius() + 1.0)
    }

    #[test]
    fn free_has_s_resonance() {
        let s = RadialScatterer::free();
        let r = classify(&s, 4, setup(&s)).unwrap();
        assert_eq!(r.dim_g0_mod_g1, 1);
        assert_eq!(r.dim_g1_mod_g2, 0);
        assert!(r.eigen_modes.is_empty());
        let u0 = r.u0.unwrap();
        assert!(u0.values.iter().all(|v| (v - 1.0).norm() < 1e-14));
    }

    #[test]
    fn dirichlet_disk_capacity() {
        let s = RadialScatterer::disk(2.0, BoundaryCondition::Dirichlet).unwrap();
        let r = classify(&s, 3, setup(&s)).unwrap();
        assert!(r.is_regular());
        assert!((r.capacity.unwrap() - 2f64.ln()).abs() < 1e-14);
        assert!((r.a.unwrap() - (gamma0() - 2f64.ln())).norm() < 1e-14);
        let ulog = r.ulog.unwrap();
        assert!((ulog.eval(3.0).re - (1.5f64).ln()).abs() < 1e-13);
    }

    #[test]
    fn neumann_disk_has_s_resonance() {
        let s = RadialScatterer::disk(1.0, BoundaryCondition::Neumann).unwrap();
        let r = classify(&s, 3, setup(&s)).unwrap();
        assert!(r.has_s_resonance() && !r.has_p_resonance());
    }

    #[test]
    fn p_resonance_depth_is_first_zero_of_j0() {
        let c = tune_threshold(|c| RadialScatterer::well(1.0, -c).unwrap(), 1, 3.0, 8.0).unwrap();
        assert!((c.sqrt() - 2.404_825_557_695_773).abs() < 1e-12);
        let s = RadialScatterer::well(1.0, -c).unwrap();
        let r = classify(&s, 4, setup(&s)).unwrap();
        assert_eq!(r.dim_g1_mod_g2, 2);
        assert!(!r.has_s_resonance() && !r.has_eigenvalue());
        assert_eq!(r.alpha[0], r.alpha[1]);
    }

    #[test]
    fn alpha_independent_of_r1() {
        let c = tune_threshold(|c| RadialScatterer::well(1.0, -c).unwrap(), 1, 3.0, 8.0).unwrap();
        let s = RadialScatterer::well(1.0, -c).unwrap();
        let cut = CutoffProfile::for_scatterer(&s);
        let a1 = classify(&s, 2, threshold_grid(&s, &cut, 5.0))
            .unwrap()
            .alpha[0];
        let a2 = classify(&s, 2, threshold_grid(&s, &cut, 10.0))
            .unwrap()
            .alpha[0];
        assert!((a1 - a2).norm() < 1e-6);
    }

    #[test]
    fn eigenfunction_is_normalised_and_projects_to_itself() {
        // V = −c on r < 1 with √c = j₁₁ carries a mode-2 zero eigenvalue
        let c = tune_threshold(|c| RadialScatterer::well(1.0, -c).unwrap(), 2, 12.0, 17.0).unwrap();
        let j11 = 3.831_705_970_207_512;
        assert!((c.sqrt() - j11).abs() < 1e-11);
        let s = RadialScatterer::well(1.0, -c).unwrap();
        let r = classify(&s, 3, setup(&s)).unwrap();
        let e = &r.eigen_modes[0];
        assert_eq!(e.mode, 2);
        // closed form: ψ ∝ J₂(√c r) inside, J₂(√c) r^{−2} outside
        let j2 = bessel_jy(2, SpectralPoint::new(j11, 0.0).unwrap())
            .unwrap()
            .j
            .re;
        let ratio = e.function.eval(0.5).re / e.decay_coeff.re;
        let expect = bessel_jy(2, SpectralPoint::new(0.5 * j11, 0.0).unwrap())
            .unwrap()
            .j
            .re
            / j2;
        assert!((ratio - expect).abs() < 1e-9);
        let mut f = e.function.clone();
        f.tail = Tail::Compact;
        let end = f.grid.end();
        let tail = std::f64::consts::PI * e.decay_coeff.norm_sqr() / (2.0 * end * end);
        assert!((f.inner(&f).re + tail - 1.0).abs() < 1e-10);
        let p = eigen_projection(&r, &e.function);
        assert!((p.eval(0.7) - e.function.eval(0.7) * (1.0 - tail)).norm() < 1e-10);
        let other = RadialFunction::bump(1, e.function.grid.clone(), 0.2, 0.8);
        assert!(eigen_projection(&r, &other)
            .values
            .iter()
            .all(|v| v.norm() == 0.0));
    }

    #[test]
    fn lmax_validated() {
        let s = RadialScatterer::free();
        assert!(matches!(
            classify(&s, 1, setup(&s)),
            Err(ThresholdError::Lmax(1))
        ));
    }
}
