//! Numerical checks of the resolvent identities: the two-parameter
//! identity, the one-sided cutoff identity, the boundary-pairing formulas.

use crate::grid::RadialGrid;
use crate::radial::{angular_norm, HarmonicTail, RadialFunction, Tail};
use crate::resolvent::{
    apply_free_mode, apply_resolvent_mode, boundary_pairing, boundary_pairing_direct,
    standard_grid, ResolventError,
};
use crate::scatterer::{CutoffProfile, RadialScatterer};
use crate::specfun::{bessel_jy, SpectralPoint};
use crate::threshold::{classify, ThresholdError};
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IdentityError {
    #[error(transparent)]
    Resolvent(#[from] ResolventError),
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
    #[error("{0} needs a function on a grid covering the cutoff bridge")]
    Coverage(&'static str),
}

impl From<crate::scatterer::ScattererError> for IdentityError {
    fn from(e: crate::scatterer::ScattererError) -> Self {
        IdentityError::Resolvent(e.into())
    }
}

/// One row of the identity table.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub identity: String,
    pub lambda: Option<SpectralPoint>,
    pub z: Option<SpectralPoint>,
    pub residual: f64,
}

fn max_abs(v: &[C64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.norm()))
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

/// `(1 − χ₁)u`, keeping the tail of `u`.
fn one_minus_chi(c: &CutoffProfile, u: &RadialFunction) -> RadialFunction {
    let mut out = c.multiply(u, |r| 1.0 - c.chi(r), |r| -c.eval(r).1);
    out.tail = u.tail.clone();
    out
}

/// `χ₁(2 − χ₁)u`, compactly supported.
fn chi_two_minus_chi(c: &CutoffProfile, u: &RadialFunction) -> RadialFunction {
    c.multiply(
        u,
        |r| {
            let x = c.chi(r);
            x * (2.0 - x)
        },
        |r| {
            let (x, dx, _) = c.eval(r);
            2.0 * dx * (1.0 - x)
        },
    )
}

/// Relative residual of
/// `R(λ) − R(z) = (λ² − z²)R(λ)χ₁(2−χ₁)R(z) + {1 − χ₁ − R(λ)[Δ,χ₁]}(R₀(λ) − R₀(z))K₁`
/// with `K₁ = 1 − χ₁ + [Δ,χ₁]R(z)`, applied to `f` and compared at every grid
/// node.
pub fn verify_two_parameter(
    s: &RadialScatterer,
    cutoff: &CutoffProfile,
    lambda: SpectralPoint,
    z: SpectralPoint,
    f: &RadialFunction,
) -> Result<f64, IdentityError> {
    cutoff.check(s)?;
    let rl = apply_resolvent_mode(s, lambda, f)?;
    let rz = apply_resolvent_mode(s, z, f)?;

    let mut k1 = one_minus_chi(cutoff, f);
    k1.tail = Tail::Compact;
    let k1 = k1.combine(ONE, &cutoff.commutator_apply(&rz)?, ONE);

    let w = apply_free_mode(lambda, &k1)?.combine(ONE, &apply_free_mode(z, &k1)?, -ONE);
    let outer = one_minus_chi(cutoff, &w);
    let back = apply_resolvent_mode(s, lambda, &cutoff.commutator_apply(&w)?)?;

    let first = apply_resolvent_mode(s, lambda, &chi_two_minus_chi(cutoff, &rz))?;
    let dl = lambda.square() - z.square();

    let lhs: Vec<C64> = rl
        .values
        .iter()
        .zip(&rz.values)
        .map(|(a, b)| a - b)
        .collect();
    let rhs: Vec<C64> = (0..lhs.len())
        .map(|i| first.values[i] * dl + outer.values[i] - back.values[i])
        .collect();
    let scale = max_abs(&rl.values) + max_abs(&rz.values);
    Ok(max_diff(&lhs, &rhs) / scale.max(f64::MIN_POSITIVE))
}

/// Relative residual of `R(λ)(1 − χ₁)g = {1 − χ₁ − R(λ)[Δ,χ₁]}R₀(λ)g`.
pub fn verify_one_sided(
    s: &RadialScatterer,
    cutoff: &CutoffProfile,
    lambda: SpectralPoint,
    g: &RadialFunction,
) -> Result<f64, IdentityError> {
    cutoff.check(s)?;
    let mut g1 = one_minus_chi(cutoff, g);
    g1.tail = Tail::Compact;
    let lhs = apply_resolvent_mode(s, lambda, &g1)?;
    let r0 = apply_free_mode(lambda, g)?;
    let a = one_minus_chi(cutoff, &r0);
    let b = apply_resolvent_mode(s, lambda, &cutoff.commutator_apply(&r0)?)?;
    let rhs: Vec<C64> = a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect();
    let scale = max_abs(&g.values);
    Ok(max_diff(&lhs.values, &rhs) / scale.max(f64::MIN_POSITIVE))
}

/// `⟨φ, R̄₀(λ)(·, 0)⟩_{|x| > r₁} = −𝔹_{r₁}(R(λ)φ, R̄₀(λ)(·, 0))` for a mode-0
/// `φ`; returns the relative difference of the two sides.
pub fn verify_bpl(
    s: &RadialScatterer,
    lambda: SpectralPoint,
    phi: &RadialFunction,
    r1: f64,
) -> Result<f64, IdentityError> {
    if phi.mode != 0 {
        return Err(ResolventError::ModeMismatch(phi.mode, 0).into());
    }
    // R₀(λ)(x, 0) = (i/4) H₀(λ|x|) and its radial derivative
    let kernel = |r: f64| -> Result<(C64, C64), ResolventError> {
        let c = bessel_jy(0, lambda.scaled(r)).map_err(|_| ResolventError::Singular)?;
        let q = C64::new(0.0, 0.25);
        Ok((q * c.h1, q * c.dh1 * lambda.value()))
    };
    let g = &phi.grid;
    let mut lhs = C64::new(0.0, 0.0);
    for ((&r, &w), v) in g.nodes().iter().zip(g.weights()).zip(&phi.values) {
        if r > r1 {
            lhs += v * kernel(r)?.0 * (w * r);
        }
    }
    lhs *= 2.0 * PI;
    let u = apply_resolvent_mode(s, lambda, phi)?;
    let (a, da) = u.eval_with_deriv(r1);
    let (k, dk) = kernel(r1)?;
    // second argument enters conjugated, so R₀ itself appears here
    let rhs = -(a * dk - da * k) * (2.0 * PI * r1);
    Ok((lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE))
}

/// `|c_log(φ) + (1/2π)⟨[Δ,χ₁]φ, 1⟩|` for a mode-0 zero-energy solution with
/// a harmonic tail.
pub fn verify_ucommint(cutoff: &CutoffProfile, phi: &RadialFunction) -> Result<f64, IdentityError> {
    let Some(h) = phi.harmonic_tail() else {
        return Err(IdentityError::Coverage("c_log check"));
    };
    let comm = cutoff.commutator_apply(phi)?;
    let scale = h.clog.norm().max(h.c0.norm()).max(1.0);
    Ok((h.clog + comm.integral() / (2.0 * PI)).norm() / scale)
}

/// Fourier-coefficient pairing against the pairing computed on the circle.
pub fn verify_pairing(
    u: &RadialFunction,
    v: &RadialFunction,
    r1: f64,
) -> Result<f64, IdentityError> {
    let a = boundary_pairing(u, v, r1)?;
    let b = boundary_pairing_direct(u, v, r1);
    let scale = angular_norm(u.mode) * (1.0 + a.norm());
    Ok((a - b).norm() / scale)
}

/// Grid for the identity suite: scatterer, bridge, pairing radius, out to a
/// few units beyond.
pub fn identity_grid(s: &RadialScatterer, cutoff: &CutoffProfile) -> Arc<RadialGrid> {
    let r1 = cutoff.pairing_radius();
    standard_grid(s, cutoff, &[r1, r1 + 1.0], r1 + 2.0)
}

/// The full identity table for one scatterer, at fixed sample points.
pub fn identity_suite(
    s: &RadialScatterer,
    cutoff: &CutoffProfile,
) -> Result<Vec<IdentityCheck>, IdentityError> {
    let grid = identity_grid(s, cutoff);
    let inner = s.inner_radius();
    let r1 = cutoff.pairing_radius();
    let pt = |m: f64, a: f64| SpectralPoint::new(m, a).expect("positive modulus");
    let mut out = Vec::new();
    let mut push = |id: &str, lambda, z, residual| {
        out.push(IdentityCheck {
            identity: id.to_string(),
            lambda,
            z,
            residual,
        })
    };

    let pairs = [
        (pt(0.01, PI / 4.0), pt(0.02, PI / 2.0)),
        (pt(0.7, 0.3), pt(0.5, PI / 2.0)),
        (pt(0.3, -2.5), pt(1.1, 1.0)),
    ];
    for mode in [0u32, 1, 2] {
        let f = RadialFunction::bump(
            mode,
            grid.clone(),
            inner + 0.1 * (cutoff.r0 - inner),
            cutoff.outer(),
        );
        for (lambda, z) in pairs {
            let r = verify_two_parameter(s, cutoff, lambda, z, &f)?;
            push(&format!("two-parameter/l={mode}"), Some(lambda), Some(z), r);
        }
        let g = RadialFunction::bump(mode, grid.clone(), cutoff.outer(), r1 + 1.0);
        for (lambda, _) in pairs {
            let r = verify_one_sided(s, cutoff, lambda, &g)?;
            push(&format!("one-sided/l={mode}"), Some(lambda), None, r);
        }
    }

    let phi = RadialFunction::bump(0, grid.clone(), cutoff.outer(), r1 + 1.0);
    for kappa in [0.05, 0.5, 2.0] {
        let lambda = pt(kappa, PI / 2.0);
        push(
            "boundary-limit/l=0",
            Some(lambda),
            None,
            verify_bpl(s, lambda, &phi, r1)?,
        );
    }

    let report = classify(s, 2, grid.clone())?;
    for u in report.ulog.iter().chain(&report.u0) {
        push("c_log-commutator", None, None, verify_ucommint(cutoff, u)?);
    }
    for m in &report.modes {
        let u = &m.regular_solution;
        let mut set = vec![u.clone()];
        for (a, b) in [
            (ONE, C64::new(0.0, 0.0)),
            (C64::new(0.0, 0.0), ONE),
            (ONE, C64::new(0.5, -2.0)),
        ] {
            let h = HarmonicTail::from_mode(m.mode, inner, a, b);
            set.push(RadialFunction::from_fn(
                m.mode,
                grid.clone(),
                Tail::Harmonic(h.clone()),
                |r| h.eval(r),
            ));
        }
        for v in &set[1..] {
            for (x, y) in [(u, v), (v, u)] {
                push(
                    &format!("pairing-fourier/l={}", m.mode),
                    None,
                    None,
                    verify_pairing(x, y, r1)?,
                );
            }
        }
    }
    Ok(out)
}
