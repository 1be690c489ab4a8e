//! Low-energy matrix elements `⟨R(λ)f, g⟩`: sampling on rays into `λ = 0`,
//! fitting log-Laurent models, and the leading coefficients predicted from
//! zero-energy data.

use crate::radial::RadialFunction;
use crate::resolvent::{ResolventError, ResolventSample};
use crate::scatterer::RadialScatterer;
use crate::specfun::SpectralPoint;
use crate::threshold::ThresholdReport;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Largest acceptable condition number of the scaled design matrix.
pub const MAX_CONDITION: f64 = 1e12;
/// Held-out residual below which a fitted shape is accepted.
pub const ACCEPT_RESIDUAL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExpansionError {
    #[error(transparent)]
    Resolvent(#[from] ResolventError),
    #[error("design matrix condition number {0:e} exceeds 1e12; reduce jmax or kmax")]
    IllConditioned(f64),
    #[error("{samples} samples for {params} parameters; need at least twice as many")]
    TooFewSamples { samples: usize, params: usize },
    #[error("term {term} does not apply: {reason}")]
    ShapeMismatch { term: String, reason: &'static str },
    #[error("invalid λ grid: {0}")]
    Grid(&'static str),
}

/// One basis function of the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Term {
    /// `λ^{2j} (log λ)^k`, `k` of either sign.
    Regular { j: i32, k: i32 },
    /// `λ^{2j} (log λ − shift)^{−k}`.
    Pole { j: i32, k: u32 },
}

impl Term {
    pub fn eval(&self, log_lambda: C64, shift: C64) -> C64 {
        let (j, p) = match *self {
            Term::Regular { j, k } => (j, log_lambda.powi(k)),
            Term::Pole { j, k } => (j, (log_lambda - shift).powi(-(k as i32))),
        };
        (log_lambda * (2 * j) as f64).exp() * p
    }

    pub fn j(&self) -> i32 {
        match *self {
            Term::Regular { j, .. } | Term::Pole { j, .. } => j,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Regular { j, k } => write!(f, "lambda^{}*log^{}", 2 * j, k),
            Term::Pole { j, k } => write!(f, "lambda^{}*(log-shift)^-{}", 2 * j, k),
        }
    }
}

/// Which series structure the model assumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    /// Zero resonance present: `Σ_{j≥0} Σ_{k≤2j+1} λ^{2j}(log λ)^k`.
    Resonant,
    /// No zero resonance: `Σ_j λ^{2j}[Σ_{k≤j}(log λ)^k + Σ_{1≤k≤j+1}(log λ − a)^{−k}]`.
    NonResonant,
    /// p-resonant mode: `λ^{−2}` and `λ^{2j}[1 + Σ_{k≤j+2}(log λ − s)^{−k}]`.
    General,
    /// Mode carrying a zero eigenvalue: `λ^{−2}` and `λ^{2j}(log λ)^k`,
    /// `k ≤ j + 1`.
    Eigen,
}

impl Shape {
    /// Term list truncated at `j ≤ jmax` and `|k| ≤ kmax`.
    pub fn terms(self, jmax: u32, kmax: u32) -> Vec<Term> {
        let jmax = jmax as i32;
        let kmax = kmax as i32;
        let mut out = Vec::new();
        match self {
            Shape::Resonant => {
                for j in 0..=jmax {
                    for k in 0..=(2 * j + 1).min(kmax) {
                        out.push(Term::Regular { j, k });
                    }
                }
            }
            Shape::NonResonant => {
                for j in 0..=jmax {
                    for k in 0..=j.min(kmax) {
                        out.push(Term::Regular { j, k });
                    }
                    for k in 1..=(j + 1).min(kmax.max(1)) {
                        out.push(Term::Pole { j, k: k as u32 });
                    }
                }
            }
            Shape::General => {
                out.push(Term::Regular { j: -1, k: 0 });
                out.push(Term::Pole { j: -1, k: 1 });
                for j in 0..jmax {
                    out.push(Term::Regular { j, k: 0 });
                    for k in 1..=(j + 2).min(kmax.max(1)) {
                        out.push(Term::Pole { j, k: k as u32 });
                    }
                }
            }
            Shape::Eigen => {
                out.push(Term::Regular { j: -1, k: 0 });
                for j in 0..jmax {
                    for k in 0..=(j + 1).min(kmax) {
                        out.push(Term::Regular { j, k });
                    }
                }
            }
        }
        out
    }

    pub fn has_pole(self) -> bool {
        matches!(self, Shape::NonResonant | Shape::General)
    }
}

/// Coefficients of a fitted (or prescribed) log-Laurent model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogLaurentSeries {
    pub terms: Vec<(Term, C64)>,
    pub shift: Option<C64>,
}

impl LogLaurentSeries {
    pub fn eval(&self, lambda: SpectralPoint) -> C64 {
        let l = lambda.log_value();
        let a = self.shift.unwrap_or(ZERO);
        self.terms.iter().map(|(t, c)| c * t.eval(l, a)).sum()
    }

    pub fn coeff(&self, t: Term) -> Option<C64> {
        self.terms.iter().find(|(u, _)| *u == t).map(|(_, c)| *c)
    }
}

/// Moduli log-spaced on one ray, every third point held out, plus an
/// optional second ray used for fitting only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaGrid {
    pub arg: f64,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub second_arg: Option<f64>,
}

impl Default for LambdaGrid {
    fn default() -> Self {
        Self {
            arg: PI / 4.0,
            min: 1e-6,
            max: 1e-2,
            count: 24,
            second_arg: Some(PI / 2.0),
        }
    }
}

/// A sampled `λ`, flagged when it is held out of the fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub lambda: SpectralPoint,
    pub value: C64,
    pub held_out: bool,
}

impl LambdaGrid {
    pub fn validate(&self) -> Result<(), ExpansionError> {
        if !(self.min > 0.0 && self.max > self.min) {
            return Err(ExpansionError::Grid("need 0 < min < max"));
        }
        if self.count < 6 {
            return Err(ExpansionError::Grid("need at least 6 points"));
        }
        Ok(())
    }

    /// `(λ, held_out)` pairs.
    pub fn points(&self) -> Vec<(SpectralPoint, bool)> {
        let n = self.count;
        let step = (self.max / self.min).ln() / (n - 1) as f64;
        let modulus = |i: usize| self.min * (step * i as f64).exp();
        let mut out: Vec<_> = (0..n)
            .map(|i| {
                (
                    SpectralPoint::new(modulus(i), self.arg).expect("positive"),
                    i % 3 == 1,
                )
            })
            .collect();
        if let Some(b) = self.second_arg {
            for i in (0..n).step_by(3) {
                out.push((SpectralPoint::new(modulus(i), b).expect("positive"), false));
            }
        }
        out
    }
}

/// `⟨R(λ)f, g⟩` at each `λ`; zero when the modes differ.
pub fn sample_matrix_element(
    s: &RadialScatterer,
    f: &RadialFunction,
    g: &RadialFunction,
    lambdas: &[SpectralPoint],
) -> Result<Vec<C64>, ExpansionError> {
    if f.mode != g.mode {
        return Ok(vec![ZERO; lambdas.len()]);
    }
    crate::exec::map(
        lambdas.iter().copied(),
        |l| -> Result<C64, ExpansionError> {
            let u = ResolventSample::new(s, l, f.mode)?.apply(f)?;
            Ok(u.inner(g))
        },
    )
    .into_iter()
    .collect()
}

/// Samples on a [`LambdaGrid`].
pub fn sample_grid(
    s: &RadialScatterer,
    f: &RadialFunction,
    g: &RadialFunction,
    grid: &LambdaGrid,
) -> Result<Vec<Sample>, ExpansionError> {
    grid.validate()?;
    let pts = grid.points();
    let lambdas: Vec<SpectralPoint> = pts.iter().map(|p| p.0).collect();
    let values = sample_matrix_element(s, f, g, &lambdas)?;
    Ok(pts
        .iter()
        .zip(values)
        .map(|(&(lambda, held_out), value)| Sample {
            lambda,
            value,
            held_out,
        })
        .collect())
}

/// How the nonlinear shift is treated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ShiftMode {
    Fixed(C64),
    Fit(C64),
}

/// Predicted coefficient with the statement it comes from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub term: Term,
    pub value: C64,
    pub provenance: &'static str,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FitReport {
    pub shape: Option<Shape>,
    pub series: LogLaurentSeries,
    pub shift_estimate: Option<C64>,
    /// Max relative misfit over held-out samples.
    pub residual: f64,
    /// Max relative misfit over the fitted samples.
    pub fit_residual: f64,
    pub conditioning: f64,
    pub accepted: bool,
    pub predicted: BTreeMap<String, Prediction>,
    pub discrepancies: BTreeMap<String, f64>,
}

impl FitReport {
    /// Attaches predictions and their relative discrepancies.
    /// A prediction of zero is measured against the largest predicted value.
    pub fn compare(&mut self, predicted: Vec<Prediction>) {
        let scale = predicted.iter().fold(0.0f64, |m, p| m.max(p.value.norm()));
        for p in predicted {
            let key = p.term.to_string();
            let fitted = self.series.coeff(p.term).unwrap_or(ZERO);
            let denom = if p.value == ZERO {
                scale
            } else {
                p.value.norm()
            };
            let err = (fitted - p.value).norm() / denom.max(f64::MIN_POSITIVE);
            self.discrepancies.insert(key.clone(), err);
            self.predicted.insert(key, p);
        }
    }
}

struct Solve {
    coefs: Vec<C64>,
    resid: Vec<C64>,
    cond: f64,
}

/// Weighted, column-scaled least squares at fixed shift.
fn solve_linear(samples: &[&Sample], terms: &[Term], shift: C64) -> Solve {
    let (m, n) = (samples.len(), terms.len());
    let mut a = DMatrix::<C64>::zeros(m, n);
    let mut b = DVector::<C64>::zeros(m);
    for (i, s) in samples.iter().enumerate() {
        let w = 1.0 / s.value.norm().max(f64::MIN_POSITIVE);
        let l = s.lambda.log_value();
        for (c, t) in terms.iter().enumerate() {
            a[(i, c)] = t.eval(l, shift) * w;
        }
        b[i] = s.value * w;
    }
    let scale: Vec<f64> = (0..n)
        .map(|c| {
            let mx = a.column(c).iter().fold(0.0f64, |acc, v| acc.max(v.norm()));
            if mx > 0.0 {
                a.column_mut(c).iter_mut().for_each(|v| *v /= mx);
                mx
            } else {
                1.0
            }
        })
        .collect();
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let x = svd.solve(&b, smax * 1e-15).expect("u and v were computed");
    let resid = (&b - &a * &x).iter().copied().collect();
    Solve {
        coefs: x.iter().zip(&scale).map(|(v, s)| v / s).collect(),
        resid,
        cond: smax / smin,
    }
}

fn sum_sq(r: &[C64]) -> f64 {
    r.iter().map(|v| v.norm_sqr()).sum()
}

/// Fits `terms` to the non-held-out samples. With a pole term present the
/// shift is either fixed or refined by Gauss–Newton on the projected
/// residual (variable projection).
pub fn fit_terms(
    samples: &[Sample],
    terms: &[Term],
    shift: Option<ShiftMode>,
) -> Result<FitReport, ExpansionError> {
    let fit_set: Vec<&Sample> = samples.iter().filter(|s| !s.held_out).collect();
    let n_params = terms.len() + matches!(shift, Some(ShiftMode::Fit(_))) as usize;
    if fit_set.len() < 2 * n_params {
        return Err(ExpansionError::TooFewSamples {
            samples: fit_set.len(),
            params: n_params,
        });
    }
    let mut a = match shift {
        None => ZERO,
        Some(ShiftMode::Fixed(a)) | Some(ShiftMode::Fit(a)) => a,
    };
    if let Some(ShiftMode::Fit(_)) = shift {
        a = refine_shift(&fit_set, terms, a);
    }
    let sol = solve_linear(&fit_set, terms, a);
    if !(sol.cond <= MAX_CONDITION) {
        return Err(ExpansionError::IllConditioned(sol.cond));
    }
    let series = LogLaurentSeries {
        terms: terms.iter().copied().zip(sol.coefs).collect(),
        shift: shift.map(|_| a),
    };
    let misfit = |s: &Sample| {
        (series.eval(s.lambda) - s.value).norm() / s.value.norm().max(f64::MIN_POSITIVE)
    };
    let residual = samples
        .iter()
        .filter(|s| s.held_out)
        .map(misfit)
        .fold(0.0, f64::max);
    let fit_residual = fit_set.iter().map(|s| misfit(s)).fold(0.0, f64::max);
    Ok(FitReport {
        shape: None,
        shift_estimate: series.shift,
        series,
        residual,
        fit_residual,
        conditioning: sol.cond,
        accepted: residual < ACCEPT_RESIDUAL,
        predicted: BTreeMap::new(),
        discrepancies: BTreeMap::new(),
    })
}

fn refine_shift(fit_set: &[&Sample], terms: &[Term], mut a: C64) -> C64 {
    let mut cost = sum_sq(&solve_linear(fit_set, terms, a).resid);
    for _ in 0..60 {
        let r0 = solve_linear(fit_set, terms, a).resid;
        let h = 1e-5 * (1.0 + a.norm());
        let central = |d: C64| {
            let p = solve_linear(fit_set, terms, a + d).resid;
            let m = solve_linear(fit_set, terms, a - d).resid;
            p.iter()
                .zip(&m)
                .map(|(x, y)| (x - y) / (2.0 * h))
                .collect::<Vec<_>>()
        };
        let dr = central(C64::new(h, 0.0));
        let di = central(C64::new(0.0, h));
        // real Gauss–Newton in (Re a, Im a)
        let (mut jtj, mut jtr) = ([[0.0; 2]; 2], [0.0; 2]);
        for i in 0..r0.len() {
            let ja = [dr[i], di[i]];
            for p in 0..2 {
                jtr[p] += (ja[p].conj() * r0[i]).re;
                for q in 0..2 {
                    jtj[p][q] += (ja[p].conj() * ja[q]).re;
                }
            }
        }
        let det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
        if det.abs() < f64::MIN_POSITIVE {
            break;
        }
        let dx = -(jtj[1][1] * jtr[0] - jtj[0][1] * jtr[1]) / det;
        let dy = -(jtj[0][0] * jtr[1] - jtj[1][0] * jtr[0]) / det;
        let mut step = C64::new(dx, dy);
        let mut improved = false;
        for _ in 0..20 {
            let c = sum_sq(&solve_linear(fit_set, terms, a + step).resid);
            if c < cost {
                a += step;
                cost = c;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved || step.norm() < 1e-13 * (1.0 + a.norm()) {
            break;
        }
    }
    a
}

/// Fits a named shape; the shift starts at `shift_init` (or `γ₀`).
pub fn fit_log_laurent(
    samples: &[Sample],
    shape: Shape,
    jmax: u32,
    kmax: u32,
    shift_init: Option<C64>,
) -> Result<FitReport, ExpansionError> {
    let terms = shape.terms(jmax, kmax);
    let shift = shape
        .has_pole()
        .then(|| ShiftMode::Fit(shift_init.unwrap_or_else(crate::specfun::gamma0)));
    let mut r = fit_terms(samples, &terms, shift)?;
    r.shape = Some(shape);
    Ok(r)
}

fn mismatch(term: Term, reason: &'static str) -> ExpansionError {
    ExpansionError::ShapeMismatch {
        term: term.to_string(),
        reason,
    }
}

/// The closed-form value of one coefficient of `⟨R(λ)f, g⟩`, where it is
/// known from zero-energy data.
pub fn predict_term(
    report: &ThresholdReport,
    f: &RadialFunction,
    g: &RadialFunction,
    term: Term,
) -> Result<Prediction, ExpansionError> {
    let pair = |u: &RadialFunction| f.inner(u) * u.inner(g);
    let same = f.mode == g.mode;
    let (value, provenance) = match term {
        Term::Regular { j: -1, k: 0 } => {
            let v: C64 = report
                .eigen_modes
                .iter()
                .filter(|e| same && e.mode == f.mode)
                .map(|e| -pair(&e.function))
                .sum();
            (v, "B_{-2,0} = -P_e")
        }
        Term::Pole { j: -1, k: 1 } => {
            if !report.has_p_resonance() {
                return Err(mismatch(term, "no p-resonance"));
            }
            // the sin copy is orthogonal to cos-mode data
            let v = if same && f.mode == 1 {
                pair(&report.uw[0]) / PI
            } else {
                ZERO
            };
            (v, "B_{-2,-1} = (1/pi) sum U_w (x) U_w")
        }
        Term::Regular { j: 0, k: 1 } => {
            let mut v = ZERO;
            if let Some(u0) = &report.u0 {
                if same && f.mode == 0 {
                    v -= pair(u0) / (2.0 * PI);
                }
            }
            for e in report
                .eigen_modes
                .iter()
                .filter(|e| same && e.mode == 2 && f.mode == 2)
            {
                v -= pair(&e.function) * e.decay_coeff.norm_sqr() * (PI / 4.0);
            }
            (
                v,
                "B_{01} = -(1/2pi) U_0 (x) U_0 - (rho^2/2) P_e 1 Pi_{-2} 1 P_e",
            )
        }
        Term::Pole { j: 0, k: 1 } => {
            let Some(ulog) = &report.ulog else {
                return Err(mismatch(term, "U_log exists only without an s-resonance"));
            };
            let v = if same && f.mode == 0 {
                pair(ulog) / (2.0 * PI)
            } else {
                ZERO
            };
            (v, "B~_{0,-1} = (1/2pi) U_log (x) U_log")
        }
        Term::Regular { j: 0, k } if k < 0 => {
            let (Some(ulog), Some(a)) = (&report.ulog, report.a) else {
                return Err(mismatch(term, "U_log exists only without an s-resonance"));
            };
            let b = if same && f.mode == 0 {
                pair(ulog) / (2.0 * PI)
            } else {
                ZERO
            };
            (b * a.powi(-k - 1), "B_{0,-k} = a^{k-1} B_{0,-1}")
        }
        Term::Regular { j: 0, k } if k >= 2 => (ZERO, "B_{0,k} = 0 for k >= 2"),
        _ => return Err(mismatch(term, "no closed form")),
    };
    Ok(Prediction {
        term,
        value,
        provenance,
    })
}

/// Every leading coefficient whose hypothesis holds for `report`.
pub fn predict_leading_terms(
    report: &ThresholdReport,
    f: &RadialFunction,
    g: &RadialFunction,
) -> Vec<Prediction> {
    let mut out = vec![];
    let mut candidates = vec![Term::Regular { j: -1, k: 0 }, Term::Regular { j: 0, k: 1 }];
    if report.has_p_resonance() {
        candidates.push(Term::Pole { j: -1, k: 1 });
    }
    if report.ulog.is_some() {
        candidates.push(Term::Pole { j: 0, k: 1 });
    }
    for t in candidates {
        if let Ok(p) = predict_term(report, f, g, t) {
            out.push(p);
        }
    }
    out
}

/// Shape of the mode-`l` matrix elements implied by a threshold report.
pub fn shape_for(report: &ThresholdReport, mode: u32) -> Shape {
    match mode {
        0 if report.has_s_resonance() => Shape::Resonant,
        0 => Shape::NonResonant,
        1 if report.has_p_resonance() => Shape::General,
        l if report.eigen_modes.iter().any(|e| e.mode == l) => Shape::Eigen,
        _ => Shape::Resonant,
    }
}

/// Initial shift for a mode-`l` fit: `s₁` in mode 1, `a` in mode 0.
pub fn shift_hint(report: &ThresholdReport, mode: u32) -> Option<C64> {
    match mode {
        0 => report.a,
        1 => report.s.first().copied(),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(series: &LogLaurentSeries, grid: &LambdaGrid) -> Vec<Sample> {
        grid.points()
            .into_iter()
            .map(|(lambda, held_out)| Sample {
                lambda,
                value: series.eval(lambda),
                held_out,
            })
            .collect()
    }

    #[test]
    fn grid_layout() {
        let g = LambdaGrid::default();
        let p = g.points();
        assert_eq!(p.len(), 32);
        assert_eq!(p.iter().filter(|x| x.1).count(), 8);
        assert!((p[0].0.modulus() - 1e-6).abs() < 1e-20);
        assert!((p[23].0.modulus() - 1e-2).abs() < 1e-15);
    }

    #[test]
    fn resonant_round_trip() {
        let terms = Shape::Resonant.terms(1, 3);
        let series = LogLaurentSeries {
            terms: terms
                .iter()
                .enumerate()
                .map(|(i, &t)| (t, C64::new(1.0 + i as f64, 0.5 - i as f64)))
                .collect(),
            shift: None,
        };
        let r = fit_log_laurent(
            &synthetic(&series, &LambdaGrid::default()),
            Shape::Resonant,
            1,
            3,
            None,
        )
        .unwrap();
        for ((_, c), (_, d)) in r.series.terms.iter().zip(&series.terms) {
            assert!((c - d).norm() < 1e-8 * d.norm(), "{c} {d}");
        }
        assert!(r.accepted);
    }

    #[test]
    fn nonresonant_round_trip_recovers_shift() {
        let a = C64::new(0.3, 1.2);
        let terms = Shape::NonResonant.terms(1, 2);
        let series = LogLaurentSeries {
            terms: terms
                .iter()
                .enumerate()
                .map(|(i, &t)| (t, C64::new(2.0 - i as f64, 0.3)))
                .collect(),
            shift: Some(a),
        };
        let r = fit_log_laurent(
            &synthetic(&series, &LambdaGrid::default()),
            Shape::NonResonant,
            1,
            2,
            Some(C64::new(0.1, 1.5)),
        )
        .unwrap();
        assert!((r.shift_estimate.unwrap() - a).norm() < 1e-8);
        // error of each coefficient measured by its contribution on the grid
        let pts = LambdaGrid::default().points();
        let ymax = pts
            .iter()
            .map(|p| series.eval(p.0).norm())
            .fold(0.0, f64::max);
        for ((t, c), (_, d)) in r.series.terms.iter().zip(&series.terms) {
            let bmax = pts
                .iter()
                .map(|p| t.eval(p.0.log_value(), a).norm())
                .fold(0.0, f64::max);
            assert!((c - d).norm() * bmax < 1e-8 * ymax, "{t} {c} {d}");
        }
    }

    #[test]
    fn wrong_shape_is_rejected() {
        let series = LogLaurentSeries {
            terms: vec![
                (Term::Regular { j: 0, k: 0 }, C64::new(1.0, 0.0)),
                (Term::Pole { j: 0, k: 1 }, C64::new(2.0, 0.0)),
            ],
            shift: Some(C64::new(0.1, 1.57)),
        };
        let r = fit_log_laurent(
            &synthetic(&series, &LambdaGrid::default()),
            Shape::Resonant,
            1,
            3,
            None,
        )
        .unwrap();
        assert!(!r.accepted);
    }

    #[test]
    fn too_many_parameters() {
        let g = LambdaGrid {
            count: 6,
            second_arg: None,
            ..LambdaGrid::default()
        };
        let samples: Vec<Sample> = g
            .points()
            .into_iter()
            .map(|(lambda, held_out)| Sample {
                lambda,
                value: C64::new(1.0, 0.0),
                held_out,
            })
            .collect();
        assert!(matches!(
            fit_log_laurent(&samples, Shape::Resonant, 2, 5, None),
            Err(ExpansionError::TooFewSamples { .. })
        ));
    }
}
