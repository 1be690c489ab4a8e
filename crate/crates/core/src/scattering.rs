//! Phase shifts, the scattering phase and its low-energy asymptotic, and
//! poles of the continued resolvent near zero energy.

use crate::modes::ModeProblem;
use crate::scatterer::{RadialScatterer, ScattererError};
use crate::specfun::{SpectralPoint, MAX_ORDER};
use crate::threshold::ThresholdReport;
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScatteringError {
    #[error("λ must be positive and finite, got {0}")]
    Lambda(f64),
    #[error("asymptotic needs the non-resonant case: {0}")]
    ShapeMismatch(&'static str),
    #[error("pole search from {seed:?} did not converge in {iterations} iterations (last |W| ratio {last:e})")]
    Basin {
        seed: SpectralPoint,
        iterations: usize,
        last: f64,
        trace: Vec<SpectralPoint>,
    },
    #[error("pole trajectory jumped by {jump:e} at ε = {epsilon} (previous step {step:e})")]
    Continuation { epsilon: f64, jump: f64, step: f64 },
    #[error(transparent)]
    Scatterer(#[from] ScattererError),
}

/// `e^{2iδ_l}` for the regular solution `A J_l + B Y_l` outside:
/// `(A − iB)/(A + iB)`.
pub fn s_matrix_element(s: &RadialScatterer, lambda: f64, l: u32) -> Result<C64, ScatteringError> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(ScatteringError::Lambda(lambda));
    }
    let p = SpectralPoint::new(lambda, 0.0).expect("checked positive");
    let [a, b] = ModeProblem::new(s, l, Some(p)).regular().exterior();
    Ok((a - I * b) / (a + I * b))
}

/// Phase shifts at one energy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseShiftTable {
    pub lambda: f64,
    /// `log S_l / 2i`; real for real potentials.
    pub shifts: BTreeMap<u32, C64>,
    /// `(1/2πi) log det S`, multiplicity 2 for `l ≥ 1`.
    pub sigma: C64,
    /// `|det S|`.
    pub det_modulus: f64,
}

fn multiplicity(l: u32) -> f64 {
    if l == 0 {
        1.0
    } else {
        2.0
    }
}

/// Shifts for `l = 0, 1, …` until two consecutive `|δ_l| < 1e−14` (or
/// `lmax`), principal branch `Re δ ∈ (−π/2, π/2]`.
pub fn phase_shifts(
    s: &RadialScatterer,
    lambda: f64,
    lmax: u32,
) -> Result<PhaseShiftTable, ScatteringError> {
    let mut shifts = BTreeMap::new();
    let mut small = 0;
    let mut sigma = C64::new(0.0, 0.0);
    let mut log_det = C64::new(0.0, 0.0);
    for l in 0..=lmax.min(MAX_ORDER) {
        let sl = s_matrix_element(s, lambda, l)?;
        let mut d = sl.ln() / (2.0 * I);
        if d.re > PI / 2.0 {
            d -= PI;
        } else if d.re <= -PI / 2.0 {
            d += PI;
        }
        shifts.insert(l, d);
        sigma += d * (multiplicity(l) / PI);
        log_det += sl.ln() * multiplicity(l);
        small = if d.norm() < 1e-14 { small + 1 } else { 0 };
        if small == 2 {
            break;
        }
    }
    Ok(PhaseShiftTable {
        lambda,
        shifts,
        sigma,
        det_modulus: log_det.re.exp(),
    })
}

/// Phase-shift tables over increasing `λ`, each `δ_l` made continuous by
/// unwrapping downward from the largest `λ`.
pub fn phase_sweep(
    s: &RadialScatterer,
    lambdas: &[f64],
    lmax: u32,
) -> Result<Vec<PhaseShiftTable>, ScatteringError> {
    let mut tables: Vec<PhaseShiftTable> =
        crate::exec::map(lambdas.iter().copied(), |l| phase_shifts(s, l, lmax))
            .into_iter()
            .collect::<Result<_, _>>()?;
    for i in (0..tables.len().saturating_sub(1)).rev() {
        let (lo, hi) = tables.split_at_mut(i + 1);
        let (cur, next) = (&mut lo[i], &hi[0]);
        for (l, d) in cur.shifts.iter_mut() {
            let Some(up) = next.shifts.get(l) else {
                continue;
            };
            let k = ((up.re - d.re) / PI).round();
            *d += k * PI;
        }
        cur.sigma = cur
            .shifts
            .iter()
            .map(|(&l, d)| d * (multiplicity(l) / PI))
            .sum();
    }
    Ok(tables)
}

/// `(1/2πi) log(1 + iπ/(log λ − a))` with `a = γ₀ + c₀(U_log)`: the
/// small-`λ` scattering phase of a non-resonant scatterer.
pub fn sigma_asymptotic(report: &ThresholdReport, lambda: f64) -> Result<C64, ScatteringError> {
    if report.has_s_resonance() {
        return Err(ScatteringError::ShapeMismatch("s-resonance present"));
    }
    let Some(a) = report.a else {
        return Err(ScatteringError::ShapeMismatch("no U_log"));
    };
    if !(lambda > 0.0) {
        return Err(ScatteringError::Lambda(lambda));
    }
    Ok(sigma_asymptotic_from_shift(a, lambda))
}

pub fn sigma_asymptotic_from_shift(a: C64, lambda: f64) -> C64 {
    (C64::new(1.0, 0.0) + I * PI / (C64::new(lambda.ln(), 0.0) - a)).ln() / (2.0 * PI * I)
}

/// Where the asymptotic denominator `log λ − a` vanishes, as a point of the
/// log cover: `λ = e^a`.
pub fn asymptotic_pole(report: &ThresholdReport) -> Option<SpectralPoint> {
    report.a.and_then(|a| SpectralPoint::from_log(a).ok())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum PoleKind {
    BoundState,
    Resonance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResonancePole {
    pub lambda: SpectralPoint,
    pub mode: u32,
    pub epsilon: f64,
    pub kind: PoleKind,
    /// `|B − iA| / (|A| + |B|)` at the pole.
    pub residual: f64,
    pub iterations: usize,
}

/// Pole function of mode `l`: `B − iA` for the regular solution
/// `A J_l + B Y_l`, analytic on the log cover.
pub fn pole_function(s: &RadialScatterer, l: u32, lambda: SpectralPoint) -> (C64, f64) {
    let [a, b] = ModeProblem::new(s, l, Some(lambda)).regular().exterior();
    (b - I * a, a.norm() + b.norm())
}

const MAX_ITER: usize = 60;

/// Secant iteration for a zero of [`pole_function`]; in `μ = 1/log λ` when
/// `|seed| < 0.1`, in `log λ` otherwise.
pub fn find_pole(
    s: &RadialScatterer,
    l: u32,
    seed: SpectralPoint,
) -> Result<ResonancePole, ScatteringError> {
    let inverse = seed.modulus() < 0.1;
    let to_pt = |w: C64| -> Option<SpectralPoint> {
        let lg = if inverse { w.inv() } else { w };
        if !(lg.re.is_finite() && lg.im.is_finite()) || lg.re < -700.0 || lg.re > 5.0 {
            return None;
        }
        SpectralPoint::from_log(lg).ok()
    };
    let from_pt = |p: SpectralPoint| {
        if inverse {
            p.log_value().inv()
        } else {
            p.log_value()
        }
    };
    let eval = |w: C64| to_pt(w).map(|p| (p, pole_function(s, l, p)));

    let w0 = from_pt(seed);
    let (p_seed, (f_seed, scale0)) = eval(w0).expect("seed is a valid point");
    let mut x0 = w0;
    let mut f0 = f_seed;
    let mut x1 = w0 * (1.0 + 1e-4) + 1e-6;
    let Some((_, (mut f1, _))) = eval(x1) else {
        return Err(basin(seed, 0, f64::INFINITY, vec![]));
    };
    let mut trace = vec![seed];
    let mut prev = (p_seed, f_seed, scale0);
    let finish =
        |lambda: SpectralPoint, f: C64, scale: f64, it: usize, trace: Vec<SpectralPoint>| {
            if !(f.norm() <= 1e-6 * scale) {
                return Err(basin(seed, it, f.norm() / scale, trace));
            }
            let on_axis = (lambda.arg() - PI / 2.0).abs() < 1e-8;
            Ok(ResonancePole {
                lambda,
                mode: l,
                epsilon: 0.0,
                kind: if on_axis {
                    PoleKind::BoundState
                } else {
                    PoleKind::Resonance
                },
                residual: f.norm() / scale,
                iterations: it,
            })
        };
    for it in 1..=MAX_ITER {
        if f1 == f0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        let Some((p2, (f2, scale2))) = eval(x2) else {
            return Err(basin(seed, it, f1.norm() / scale0, trace));
        };
        trace.push(p2);
        let step = (x2 - x1).norm();
        // at the rounding floor the secant wanders; keep the better iterate
        if f2.norm() / scale2 < 1e-9 && f2.norm() >= prev.1.norm() {
            return finish(prev.0, prev.1, prev.2, it, trace);
        }
        (x0, f0, x1, f1) = (x1, f1, x2, f2);
        prev = (p2, f2, scale2);
        if f2.norm() == 0.0 || step < 1e-14 * x1.norm() {
            return finish(p2, f2, scale2, it, trace);
        }
    }
    Err(basin(seed, MAX_ITER, f1.norm() / scale0, trace))
}

fn basin(
    seed: SpectralPoint,
    iterations: usize,
    last: f64,
    trace: Vec<SpectralPoint>,
) -> ScatteringError {
    ScatteringError::Basin {
        seed,
        iterations,
        last,
        trace,
    }
}

/// Poles of mode `l` with `|λ| < radius` and `arg λ ∈ [arg_lo, arg_hi]`,
/// found by seeding the secant search on a polar grid; duplicates merged.
pub fn search_disk(
    s: &RadialScatterer,
    l: u32,
    radius: f64,
    arg_lo: f64,
    arg_hi: f64,
) -> Vec<ResonancePole> {
    let mut seeds = Vec::new();
    for i in 0..8 {
        let m = radius * 10f64.powf(-(i as f64) * 0.75);
        for j in 0..7 {
            let a = arg_lo + (arg_hi - arg_lo) * (j as f64 + 0.5) / 7.0;
            seeds.push(SpectralPoint::new(m * 0.9, a).expect("positive"));
        }
    }
    let found = crate::exec::map(seeds, |p| find_pole(s, l, p).ok());
    let mut out: Vec<ResonancePole> = Vec::new();
    for p in found.into_iter().flatten() {
        let (m, a) = (p.lambda.modulus(), p.lambda.arg());
        if m >= radius || a < arg_lo - 1e-9 || a > arg_hi + 1e-9 {
            continue;
        }
        if !out
            .iter()
            .any(|q| (q.lambda.log_value() - p.lambda.log_value()).norm() < 1e-6)
        {
            out.push(p);
        }
    }
    out
}

/// `V₀ + εV₁` for each `ε`, poles continued from `seed` in order.
pub fn perturbation_sweep(
    v0: &RadialScatterer,
    v1: &RadialScatterer,
    l: u32,
    epsilons: &[f64],
    seed: SpectralPoint,
) -> Result<Vec<ResonancePole>, ScatteringError> {
    let mut out: Vec<ResonancePole> = Vec::new();
    let mut seed = seed;
    for &eps in epsilons {
        let s = v0.perturbed(eps, v1)?;
        let mut p = find_pole(&s, l, seed)?;
        p.epsilon = eps;
        if out.len() >= 2 {
            let n = out.len();
            let step = (out[n - 1].lambda.log_value() - out[n - 2].lambda.log_value()).norm();
            let jump = (p.lambda.log_value() - out[n - 1].lambda.log_value()).norm();
            if jump > 10.0 * step && jump > 1e-3 {
                return Err(ScatteringError::Continuation {
                    epsilon: eps,
                    jump,
                    step,
                });
            }
        }
        seed = p.lambda;
        out.push(p);
    }
    Ok(out)
}

/// Peak of `dσ/dλ` along a curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeakMetrics {
    pub lambda: f64,
    pub height: f64,
    /// Full width at half maximum, linear in `λ`.
    pub width: f64,
}

/// Peak height and width of `dσ/dλ` from samples `(λ_i, Re σ_i)`.
pub fn peak_metrics(lambdas: &[f64], sigma: &[f64]) -> Option<PeakMetrics> {
    if lambdas.len() < 3 {
        return None;
    }
    let mids: Vec<f64> = lambdas.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let der: Vec<f64> = (0..mids.len())
        .map(|i| (sigma[i + 1] - sigma[i]) / (lambdas[i + 1] - lambdas[i]))
        .collect();
    let (k, &h) = der.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    let half = 0.5 * h;
    let cross = |range: &mut dyn Iterator<Item = usize>| -> Option<f64> {
        let mut prev = k;
        for i in range {
            if der[i] < half {
                let t = (der[prev] - half) / (der[prev] - der[i]);
                return Some(mids[prev] + t * (mids[i] - mids[prev]));
            }
            prev = i;
        }
        None
    };
    let left = cross(&mut (0..k).rev())?;
    let right = cross(&mut (k + 1..der.len()))?;
    Some(PeakMetrics {
        lambda: mids[k],
        height: h,
        width: right - left,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scatterer::BoundaryCondition;
    use crate::specfun::bessel_jy;

    #[test]
    fn free_has_no_phase() {
        let t = phase_shifts(&RadialScatterer::free(), 0.7, 10).unwrap();
        assert!(t.shifts.values().all(|d| d.norm() < 1e-15));
        assert!(t.sigma.norm() < 1e-15);
    }

    #[test]
    fn dirichlet_disk_closed_form() {
        let s = RadialScatterer::disk(1.0, BoundaryCondition::Dirichlet).unwrap();
        let t = phase_shifts(&s, 0.1, 20).unwrap();
        let c = bessel_jy(0, SpectralPoint::new(0.1, 0.0).unwrap()).unwrap();
        let expect = (c.j.re / c.y.re).atan();
        assert!((t.shifts[&0].re - expect).abs() < 1e-14);
        assert!((t.det_modulus - 1.0).abs() < 1e-12);
    }

    #[test]
    fn born_sign() {
        for v in [1e-3, -1e-3] {
            let s = RadialScatterer::well(1.0, v).unwrap();
            let t = phase_shifts(&s, 0.5, 3).unwrap();
            for l in 0..3 {
                assert_eq!(t.shifts[&l].re.signum(), -v.signum());
            }
        }
    }

    #[test]
    fn dirichlet_sigma_matches_asymptotic() {
        let s = RadialScatterer::disk(1.0, BoundaryCondition::Dirichlet).unwrap();
        let cut = crate::scatterer::CutoffProfile::new(2.0, 1.0).unwrap();
        let rep =
            crate::threshold::classify(&s, 3, crate::threshold::threshold_grid(&s, &cut, 6.0))
                .unwrap();
        let lam = 1e-4;
        let exact = phase_shifts(&s, lam, 10).unwrap().sigma;
        let asym = sigma_asymptotic(&rep, lam).unwrap();
        assert!(
            (exact - asym).norm() < 0.02 * exact.norm(),
            "{exact} {asym}"
        );
    }

    #[test]
    fn free_has_no_pole() {
        let s = RadialScatterer::free();
        let seed = SpectralPoint::new(0.2, 1.0).unwrap();
        assert!(find_pole(&s, 0, seed).is_err());
    }

    #[test]
    fn bound_state_of_deep_well() {
        // V = −10 on r < 1 has a mode-0 bound state; λ = iκ with
        // k J₀'(k)/J₀(k) = κ K₀'(κ)/K₀(κ), k = √(10 − κ²)
        let s = RadialScatterer::well(1.0, -10.0).unwrap();
        let p = find_pole(&s, 0, SpectralPoint::new(2.0, 1.4).unwrap()).unwrap();
        assert_eq!(p.kind, PoleKind::BoundState);
        assert!(p.residual < 1e-10);
        assert!(
            (p.lambda.modulus() - 2.6013199570686205).abs() < 1e-12,
            "{:?}",
            p.lambda
        );
    }

    #[test]
    fn peak_of_synthetic_curve() {
        let l: Vec<f64> = (0..2001).map(|i| i as f64 * 1e-3).collect();
        let (c, w) = (1.0, 0.02);
        let s: Vec<f64> = l
            .iter()
            .map(|x| ((x - c) / (w / 2.0)).atan() / PI)
            .collect();
        let m = peak_metrics(&l, &s).unwrap();
        assert!((m.lambda - c).abs() < 1e-3);
        assert!((m.width - w).abs() < 1e-3);
    }
}
