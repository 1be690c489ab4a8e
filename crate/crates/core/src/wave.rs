//! Long-time wave asymptotics through the spectral representation
//! `w(x, t) = ∫₀^∞ sin(λt) h(λ) dλ`, `h = (2/π) Im[R(λ + i0) f](x)`.
//!
//! For a radial problem `Im R(λ + i0)` in mode 0 has the kernel
//! `φ(r)φ(r') / (4(A² + B²))`, where `φ = A J₀(λr) + B Y₀(λr)` outside is the
//! regular solution, so `h(λ) = φ(x) ∫φ f r dr / (A² + B²)`. The integral is
//! taken panel by panel: `h` is interpolated at Chebyshev–Lobatto points and
//! the interpolant is integrated against `e^{±iλt}` exactly.

use crate::grid::{GaussRule, RadialGrid};
use crate::modes::ModeProblem;
use crate::radial::RadialFunction;
use crate::scatterer::RadialScatterer;
use crate::specfun::SpectralPoint;
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WaveError {
    #[error("mode {mode} has {count} bound state(s){}", kappa.map(|k| format!(" (λ = {k}i)")).unwrap_or_default())]
    BoundState {
        mode: u32,
        count: usize,
        kappa: Option<f64>,
    },
    #[error("initial data must be mode 0, got mode {0}")]
    Mode(u32),
    #[error("the spectral formula needs a self-adjoint scatterer")]
    NotSelfAdjoint,
    #[error("observation radius {0} is outside the domain")]
    Observation(f64),
    #[error("times must be positive and finite")]
    Time,
    #[error("spectral density still at {level:e} of its peak at λ = {lambda}")]
    NotDecayed { lambda: f64, level: f64 },
    #[error("decay fit needs ≥ 6 times over ≥ 2 decades, got {count} over {decades:.2}")]
    FitData { count: usize, decades: f64 },
}

/// Initial velocity `f` (mode 0), observation radius and times.
#[derive(Debug, Clone)]
pub struct WaveQuery {
    pub scatterer: RadialScatterer,
    pub f: RadialFunction,
    pub x: f64,
    pub times: Vec<f64>,
}

/// Panel layout of the `λ` integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Quadrature {
    /// Below this `h` is treated as constant.
    pub lambda_min: f64,
    /// Geometric panels per decade on `[lambda_min, log_top]`.
    pub panels_per_decade: usize,
    pub log_top: f64,
    /// Width of the uniform panels above `log_top`.
    pub width: f64,
    /// Chebyshev points per panel minus one.
    pub degree: usize,
    /// Integration stops once `|h|` stays below `tail_tol` of its peak.
    pub tail_tol: f64,
    /// Panels are halved while their trailing Chebyshev coefficients
    /// exceed `refine_tol` of the peak of `|h|`.
    pub refine_tol: f64,
    pub max_depth: usize,
    pub lambda_cap: f64,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            lambda_min: 1e-9,
            panels_per_decade: 4,
            log_top: 1.0,
            width: 2.0,
            degree: 24,
            tail_tol: 1e-8,
            refine_tol: 1e-11,
            max_depth: 6,
            lambda_cap: 2000.0,
        }
    }
}

impl Quadrature {
    /// Twice as many panels everywhere.
    pub fn doubled(&self) -> Self {
        Self {
            panels_per_decade: 2 * self.panels_per_decade,
            width: 0.5 * self.width,
            ..*self
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    /// Chebyshev coefficients of `h` on the panel.
    coef: Vec<C64>,
}

fn lobatto(n: usize) -> Vec<f64> {
    (0..=n).map(|k| (PI * k as f64 / n as f64).cos()).collect()
}

fn chebyshev_coefficients(vals: &[C64]) -> Vec<C64> {
    let n = vals.len() - 1;
    (0..=n)
        .map(|j| {
            let mut s = ZERO;
            for (k, v) in vals.iter().enumerate() {
                let w = if k == 0 || k == n { 0.5 } else { 1.0 };
                s += v * (w * (PI * (j * k) as f64 / n as f64).cos());
            }
            let w = if j == 0 || j == n { 1.0 } else { 2.0 };
            s * (w / n as f64)
        })
        .collect()
}

fn clenshaw(c: &[C64], x: f64) -> C64 {
    let (mut b1, mut b2) = (ZERO, ZERO);
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + b1 * (2.0 * x) - b2;
        b2 = b1;
        b1 = b0;
    }
    c[0] + b1 * x - b2
}

/// `p^{(k)}(±1)` for `k = 0..=n`, derivatives in `x`.
fn endpoint_derivatives(c: &[C64]) -> (Vec<C64>, Vec<C64>) {
    let n = c.len() - 1;
    let mut right = vec![ZERO; n + 1];
    let mut left = vec![ZERO; n + 1];
    for (j, &cj) in c.iter().enumerate() {
        let jj = (j * j) as f64;
        let mut d = 1.0;
        for k in 0..=n.min(j) {
            right[k] += cj * d;
            let sign = if (j + k) % 2 == 0 { 1.0 } else { -1.0 };
            left[k] += cj * (d * sign);
            let kf = k as f64;
            d *= (jj - kf * kf) / (2.0 * kf + 1.0);
        }
    }
    (left, right)
}

/// `∫_{-1}^{1} p(x) e^{iωx} dx` for a Chebyshev series `p`.
fn filon(c: &[C64], omega: f64, rule: &GaussRule) -> C64 {
    let n = c.len() - 1;
    if omega.abs() > 2.0 * (n * n) as f64 {
        let (left, right) = endpoint_derivatives(c);
        let io = I * omega;
        let (ep, em) = (C64::from_polar(1.0, omega), C64::from_polar(1.0, -omega));
        let mut s = ZERO;
        let mut pw = io;
        for k in 0..=n {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            s += (right[k] * ep - left[k] * em) * sign / pw;
            pw *= io;
        }
        return s;
    }
    let m = (omega.abs() / 4.0).ceil().max(1.0) as usize;
    let hw = 1.0 / m as f64;
    let mut s = ZERO;
    for q in 0..m {
        let mid = -1.0 + (2 * q + 1) as f64 * hw;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let y = mid + hw * x;
            s += clenshaw(c, y) * C64::from_polar(w * hw, omega * y);
        }
    }
    s
}

/// `∫_b^∞ p(λ) e^{iωλ} dλ` by integration by parts from the last panel.
fn tail_integral(c: &[C64], half: f64, b: f64, omega: f64, terms: usize) -> C64 {
    let (_, right) = endpoint_derivatives(c);
    let io = I * omega;
    let mut s = ZERO;
    let mut pw = io;
    let mut scale = 1.0;
    let mut prev = f64::INFINITY;
    for (k, d) in right.iter().enumerate().take(terms) {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let term = d * scale * sign / pw;
        if term.norm() > prev {
            break;
        }
        prev = term.norm();
        s -= term;
        pw *= io;
        scale /= half;
    }
    s * C64::from_polar(1.0, omega * b)
}

/// Interpolated spectral density `h(λ)`.
pub struct SpectralDensity {
    head: C64,
    lambda_min: f64,
    panels: Vec<Panel>,
    rule: GaussRule,
}

/// Quadrature levels for `∫ φ f r dr`: the grid of `f`, repeatedly halved.
struct Pairing {
    levels: Vec<(f64, Vec<(f64, C64)>)>,
}

impl Pairing {
    fn new(f: &RadialFunction) -> Self {
        let grid = support_grid(f);
        let mut levels = Vec::new();
        let mut g = grid;
        for _ in 0..8 {
            let width = g
                .edges()
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(0.0, f64::max);
            let pts = g
                .nodes()
                .iter()
                .zip(g.weights())
                .map(|(&r, &w)| (r, f.eval(r) * (w * r)))
                .filter(|(_, v)| v.norm() > 0.0)
                .collect();
            levels.push((width, pts));
            g = Arc::new(g.refined());
        }
        Self { levels }
    }

    /// Rule resolving `J₀(λr)` (panel phase ≤ 10).
    fn at(&self, lambda: f64) -> &[(f64, C64)] {
        let pick = self
            .levels
            .iter()
            .find(|(w, _)| w * lambda <= 10.0)
            .unwrap_or(self.levels.last().unwrap());
        &pick.1
    }
}

/// Panels of `f.grid` on which `f` does not vanish.
fn support_grid(f: &RadialFunction) -> Arc<RadialGrid> {
    let g = &f.grid;
    let n = g.order();
    let live: Vec<usize> = (0..g.panels())
        .filter(|p| f.values[p * n..(p + 1) * n].iter().any(|v| v.norm() > 0.0))
        .collect();
    if live.is_empty() {
        return f.grid.clone();
    }
    let edges = g.edges()[live[0]..=live[live.len() - 1] + 1].to_vec();
    Arc::new(RadialGrid::from_edges(edges, n).expect("sub-partition of a valid grid"))
}

fn density_at(s: &RadialScatterer, pairing: &Pairing, x: f64, lambda: f64) -> C64 {
    let p = SpectralPoint::new(lambda, 0.0).expect("positive λ");
    let phi = ModeProblem::new(s, 0, Some(p)).regular();
    let [a, b] = phi.exterior();
    let fp: C64 = pairing
        .at(lambda)
        .iter()
        .map(|&(r, wf)| phi.eval(r).0 * wf)
        .sum();
    // Y₀ carries a zero coefficient at the origin but is infinite there
    phi.eval(x.max(1e-200)).0 * fp / (a * a + b * b)
}

/// `h(λ)` at the given points, without interpolation.
pub fn density_values(q: &WaveQuery, lambdas: &[f64]) -> Result<Vec<C64>, WaveError> {
    check_query(q)?;
    let pairing = Pairing::new(&q.f);
    Ok(crate::exec::map(lambdas.to_vec(), |l| {
        density_at(&q.scatterer, &pairing, q.x, l)
    }))
}

fn check_query(q: &WaveQuery) -> Result<(), WaveError> {
    if q.f.mode != 0 {
        return Err(WaveError::Mode(q.f.mode));
    }
    if !q.scatterer.is_self_adjoint() {
        return Err(WaveError::NotSelfAdjoint);
    }
    if !(q.x >= q.scatterer.inner_radius() && q.x.is_finite()) {
        return Err(WaveError::Observation(q.x));
    }
    if q.times.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(WaveError::Time);
    }
    check_bound_states(&q.scatterer)
}

/// Sign changes of the zero-energy regular solution of mode `l` on `(0, ∞)`,
/// which for a real potential is the number of negative eigenvalues.
pub fn count_bound_states(s: &RadialScatterer, l: u32) -> usize {
    let depth = s
        .pieces()
        .iter()
        .map(|p| (-p.2.re).max(0.0))
        .fold(0.0, f64::max);
    if depth == 0.0 {
        return 0;
    }
    let sol = ModeProblem::new(s, l, None).regular();
    let (r0, r1) = (s.inner_radius(), s.support_radius());
    let steps = ((r1 - r0) * (depth.sqrt() + 1.0) * 40.0).ceil() as usize + 40;
    let mut vals: Vec<C64> = (1..=steps)
        .map(|i| sol.eval(r0 + (r1 - r0) * i as f64 / steps as f64).0)
        .collect();
    let [g, d] = sol.exterior();
    // sign at infinity of g·(log r | r^l) + d·(1 | r^{−l})
    vals.push(if g.norm() > 0.0 { g * 1e300 } else { d });
    let phase = vals
        .iter()
        .find(|v| v.norm() > 0.0)
        .map(|v| v.conj() / v.norm())
        .unwrap_or(C64::new(1.0, 0.0));
    let signs: Vec<f64> = vals
        .iter()
        .map(|v| (v * phase).re)
        .filter(|v| *v != 0.0)
        .collect();
    signs
        .windows(2)
        .filter(|w| w[0].signum() != w[1].signum())
        .count()
}

fn check_bound_states(s: &RadialScatterer) -> Result<(), WaveError> {
    let depth = s
        .pieces()
        .iter()
        .map(|p| (-p.2.re).max(0.0))
        .fold(0.0, f64::max);
    let lmax = (depth.sqrt() * s.support_radius()).ceil() as u32;
    for l in 0..=lmax.min(crate::specfun::MAX_ORDER) {
        let count = count_bound_states(s, l);
        if count > 0 {
            let kappa = (1..=8)
                .filter_map(|i| {
                    let k = (depth.sqrt() * i as f64 / 8.0).clamp(1e-3, 2.0);
                    crate::scattering::find_pole(s, l, SpectralPoint::new(k, PI / 2.0).ok()?).ok()
                })
                .find(|p| p.kind == crate::scattering::PoleKind::BoundState)
                .map(|p| p.lambda.modulus());
            return Err(WaveError::BoundState {
                mode: l,
                count,
                kappa,
            });
        }
    }
    Ok(())
}

impl SpectralDensity {
    pub fn new(q: &WaveQuery, quad: &Quadrature) -> Result<Self, WaveError> {
        check_query(q)?;
        let pairing = Pairing::new(&q.f);
        let s = &q.scatterer;
        let eval = |lams: Vec<f64>| crate::exec::map(lams, |l| density_at(s, &pairing, q.x, l));
        let nodes = lobatto(quad.degree);
        let mut top = 0.0f64;
        // Chebyshev panels on each cell, halved until the trailing
        // coefficients fall below `refine_tol` of the running peak
        let adaptive = |cells: &[(f64, f64)], top: &mut f64| -> Vec<(usize, Panel)> {
            let mut todo: Vec<(usize, f64, f64)> = cells
                .iter()
                .enumerate()
                .map(|(i, &(a, b))| (i, a, b))
                .collect();
            let mut done = Vec::new();
            for depth in 0..=quad.max_depth {
                if todo.is_empty() {
                    break;
                }
                let lams: Vec<f64> = todo
                    .iter()
                    .flat_map(|&(_, a, b)| {
                        nodes.iter().map(move |x| 0.5 * (a + b) + 0.5 * (b - a) * x)
                    })
                    .collect();
                let vals = eval(lams);
                *top = vals.iter().map(|v| v.norm()).fold(*top, f64::max);
                let mut next = Vec::new();
                for (&(i, a, b), v) in todo.iter().zip(vals.chunks(nodes.len())) {
                    let coef = chebyshev_coefficients(v);
                    let n = coef.len();
                    let trailing = coef[n - 3..].iter().map(|c| c.norm()).fold(0.0, f64::max);
                    if trailing <= quad.refine_tol * *top || depth == quad.max_depth {
                        done.push((i, Panel { a, b, coef }));
                    } else {
                        let m = 0.5 * (a + b);
                        next.push((i, a, m));
                        next.push((i, m, b));
                    }
                }
                todo = next;
            }
            done.sort_by(|x, y| x.1.a.total_cmp(&y.1.a));
            done
        };

        let decades = (quad.log_top / quad.lambda_min).log10();
        let nlog = (decades * quad.panels_per_decade as f64).ceil() as usize;
        let ratio = (quad.log_top / quad.lambda_min).powf(1.0 / nlog as f64);
        let log_edges: Vec<(f64, f64)> = (0..nlog)
            .map(|i| {
                let a = quad.lambda_min * ratio.powi(i as i32);
                let b = if i + 1 == nlog {
                    quad.log_top
                } else {
                    a * ratio
                };
                (a, b)
            })
            .collect();
        let mut panels: Vec<Panel> = adaptive(&log_edges, &mut top)
            .into_iter()
            .map(|(_, p)| p)
            .collect();
        let head = eval(vec![quad.lambda_min])[0];

        let batch = 16;
        let mut quiet = 0;
        let mut level = 1.0;
        let mut a = quad.log_top;
        'outer: while a < quad.lambda_cap {
            let cells: Vec<(f64, f64)> = (0..batch)
                .map(|i| (a + i as f64 * quad.width, a + (i + 1) as f64 * quad.width))
                .collect();
            a += batch as f64 * quad.width;
            let refined = adaptive(&cells, &mut top);
            let peak = top;
            let mut size = vec![0.0f64; batch];
            for (i, p) in &refined {
                size[*i] = size[*i].max(p.coef.iter().map(|c| c.norm()).sum::<f64>());
            }
            let mut iter = refined.into_iter().peekable();
            for (i, s) in size.iter().enumerate() {
                while let Some((_, p)) = iter.next_if(|(j, _)| *j == i) {
                    panels.push(p);
                }
                level = s / peak;
                quiet = if level < quad.tail_tol { quiet + 1 } else { 0 };
                if quiet == 2 {
                    break 'outer;
                }
            }
        }
        if quiet < 2 {
            let lambda = panels.last().map(|p| p.b).unwrap_or(a);
            return Err(WaveError::NotDecayed { lambda, level });
        }
        Ok(Self {
            head,
            lambda_min: quad.lambda_min,
            panels,
            rule: GaussRule::new(24).expect("fixed order"),
        })
    }

    pub fn value(&self, lambda: f64) -> C64 {
        if lambda <= self.lambda_min {
            return self.head;
        }
        match self.panels.iter().find(|p| lambda <= p.b) {
            Some(p) => clenshaw(&p.coef, (2.0 * lambda - p.a - p.b) / (p.b - p.a)),
            None => ZERO,
        }
    }

    /// `∫₀^∞ e^{iωλ} h(λ) dλ`.
    fn oscillatory(&self, omega: f64) -> C64 {
        let lm = self.lambda_min;
        let mut s = if omega == 0.0 {
            self.head * lm
        } else {
            self.head * (C64::from_polar(1.0, omega * lm) - 1.0) / (I * omega)
        };
        for p in &self.panels {
            let (mid, half) = (0.5 * (p.a + p.b), 0.5 * (p.b - p.a));
            s += filon(&p.coef, omega * half, &self.rule) * C64::from_polar(half, omega * mid);
        }
        let last = self.panels.last().unwrap();
        let half = 0.5 * (last.b - last.a);
        if (omega * half).abs() < 4.0 {
            // no asymptotic regime; the truncation error is ∫|h| past the cutoff
            return s;
        }
        s + tail_integral(&last.coef, half, last.b, omega, 4)
    }

    /// `∫₀^∞ sin(λt) h(λ) dλ`.
    pub fn sine_transform(&self, t: f64) -> C64 {
        (self.oscillatory(t) - self.oscillatory(-t)) / (2.0 * I)
    }

    pub fn panel_count(&self) -> usize {
        self.panels.len()
    }

    pub fn cutoff(&self) -> f64 {
        self.panels.last().map(|p| p.b).unwrap_or(self.lambda_min)
    }
}

/// `w(x, t)` for every requested time.
pub fn evolve(q: &WaveQuery, quad: &Quadrature) -> Result<Vec<C64>, WaveError> {
    let h = SpectralDensity::new(q, quad)?;
    Ok(crate::exec::map(q.times.clone(), |t| h.sine_transform(t)))
}

/// `(1/2π t)(∫ f)`, the free leading term.
pub fn free_leading(f: &RadialFunction, t: f64) -> C64 {
    f.integral() / (2.0 * PI * t)
}

/// `U_log(x) ⟨f, U_log⟩ / (2π t (log t)²)`, the leading term without a zero
/// resonance.
pub fn log_law_leading(ulog: &RadialFunction, f: &RadialFunction, x: f64, t: f64) -> C64 {
    let lt = t.ln();
    ulog.eval(x) * f.inner(ulog) / (2.0 * PI * t * lt * lt)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DecayLaw {
    #[serde(rename = "t^-1")]
    InverseT,
    #[serde(rename = "t^-1 (log t)^-2")]
    InverseTLogSquared,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DecayReport {
    pub law: DecayLaw,
    /// `c` in `w ≈ c/t` or `w ≈ c/(t (log t)²)`, signed.
    pub coefficient: f64,
    pub residual: f64,
    pub residual_inverse_t: f64,
    pub residual_log_squared: f64,
}

/// Fits `log|w|` against `−log t` and `−log t − 2 log log t` (one free
/// constant each) and picks the smaller RMS residual.
pub fn decay_fit(data: &[(f64, f64)]) -> Result<DecayReport, WaveError> {
    let count = data.len();
    let (tmin, tmax) = data
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &(t, _)| {
            (a.min(t), b.max(t))
        });
    let decades = if count > 0 {
        (tmax / tmin).log10()
    } else {
        0.0
    };
    if count < 6 || decades < 2.0 || data.iter().any(|&(t, w)| !(t > 1.0) || w == 0.0) {
        return Err(WaveError::FitData { count, decades });
    }
    let fit = |model: &dyn Fn(f64) -> f64| -> (f64, f64) {
        let res: Vec<f64> = data.iter().map(|&(t, w)| w.abs().ln() - model(t)).collect();
        let c = res.iter().sum::<f64>() / count as f64;
        let rms = (res.iter().map(|r| (r - c).powi(2)).sum::<f64>() / count as f64).sqrt();
        (c.exp(), rms)
    };
    let (c1, r1) = fit(&|t: f64| -t.ln());
    let (c2, r2) = fit(&|t: f64| -t.ln() - 2.0 * t.ln().ln());
    let sign = data[count - 1].1.signum();
    let (law, coefficient, residual) = if r1.min(r2) > 0.1 {
        (DecayLaw::Inconclusive, f64::NAN, r1.min(r2))
    } else if r1 <= r2 {
        (DecayLaw::InverseT, sign * c1, r1)
    } else {
        (DecayLaw::InverseTLogSquared, sign * c2, r2)
    };
    Ok(DecayReport {
        law,
        coefficient,
        residual,
        residual_inverse_t: r1,
        residual_log_squared: r2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resolvent::apply_resolvent_mode;

    fn bump_query(s: RadialScatterer, inner: f64, outer: f64, times: Vec<f64>) -> WaveQuery {
        let edges: Vec<f64> = (0..=16)
            .map(|i| inner + (outer - inner) * i as f64 / 16.0)
            .collect();
        let grid = Arc::new(RadialGrid::from_edges(edges, 16).unwrap());
        WaveQuery {
            scatterer: s,
            f: RadialFunction::bump(0, grid, inner, outer),
            x: 0.0,
            times,
        }
    }

    #[test]
    fn chebyshev_filon_matches_quadrature() {
        let vals: Vec<C64> = lobatto(20)
            .iter()
            .map(|&x| C64::new((2.0 * x).cos() + x * x, x))
            .collect();
        let c = chebyshev_coefficients(&vals);
        let rule = GaussRule::new(24).unwrap();
        for omega in [0.0, 3.0, 50.0, 900.0, 5000.0] {
            let exact = filon(&c, omega, &rule);
            let m = 200_000;
            let direct: C64 = (0..m)
                .map(|k| {
                    let y = -1.0 + (2 * k + 1) as f64 / m as f64;
                    C64::new((2.0 * y).cos() + y * y, y)
                        * C64::from_polar(2.0 / m as f64, omega * y)
                })
                .sum();
            assert!(
                (exact - direct).norm() < 1e-6,
                "ω = {omega}: {exact} {direct}"
            );
        }
    }

    #[test]
    fn density_is_im_resolvent() {
        let s = RadialScatterer::well(1.0, 3.0).unwrap();
        let edges: Vec<f64> = (0..=40).map(|i| i as f64 * 0.1).collect();
        let grid = Arc::new(RadialGrid::from_edges(edges, 16).unwrap());
        let f = RadialFunction::bump(0, grid, 0.5, 2.5);
        let pairing = Pairing::new(&f);
        for lam in [0.01, 0.7, 3.0] {
            let u = apply_resolvent_mode(&s, SpectralPoint::new(lam, 0.0).unwrap(), &f).unwrap();
            for x in [0.0, 0.8, 3.2] {
                let h = density_at(&s, &pairing, x, lam);
                let expect = 2.0 / PI * u.eval(x).im;
                assert!(
                    (h.re - expect).abs() < 1e-9 * (1.0 + expect.abs()),
                    "{lam} {x}: {h} {expect}"
                );
            }
        }
    }

    #[test]
    fn free_wave_vanishes_at_zero_and_matches_kernel() {
        let q = bump_query(
            RadialScatterer::free(),
            0.0,
            1.0,
            vec![1e-9, 0.5, 3.0, 40.0],
        );
        let w = evolve(&q, &Quadrature::default()).unwrap();
        assert!(w[0].norm() < 1e-8 * q.f.integral().norm());
        // w(0, t) = ∫₀^{min(t,1)} f r / √(t² − r²) dr
        let exact = |t: f64| -> f64 {
            let n = 200_000;
            let top = t.min(1.0);
            // r = top·sin θ removes the endpoint singularity when t < 1
            (0..n)
                .map(|k| {
                    let th = (k as f64 + 0.5) / n as f64 * (PI / 2.0);
                    let r = top * th.sin();
                    let jac = top * th.cos() / (t * t - r * r).sqrt();
                    crate::radial::bump_profile(0.0, 1.0, r).0 * r * jac * (PI / 2.0) / n as f64
                })
                .sum()
        };
        for (t, wt) in q.times.iter().zip(&w).skip(1) {
            assert!(
                (wt.re - exact(*t)).abs() < 1e-8,
                "t = {t}: {} {}",
                wt.re,
                exact(*t)
            );
        }
    }

    #[test]
    fn bound_states_are_refused() {
        let s = RadialScatterer::well(1.0, -10.0).unwrap();
        assert_eq!(count_bound_states(&s, 0), 1);
        assert_eq!(
            count_bound_states(&RadialScatterer::well(1.0, 10.0).unwrap(), 0),
            0
        );
        let q = bump_query(s, 0.0, 1.0, vec![10.0]);
        match evolve(&q, &Quadrature::default()) {
            Err(WaveError::BoundState {
                mode: 0,
                count: 1,
                kappa: Some(k),
            }) => {
                assert!((k - 2.6013199570686205).abs() < 1e-9)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn synthetic_decay_laws() {
        let ts: Vec<f64> = (0..8).map(|i| 10f64.powf(2.0 + 0.5 * i as f64)).collect();
        let a: Vec<(f64, f64)> = ts.iter().map(|&t| (t, 3.0 / t)).collect();
        let r = decay_fit(&a).unwrap();
        assert_eq!(r.law, DecayLaw::InverseT);
        assert!((r.coefficient - 3.0).abs() < 1e-6);
        let b: Vec<(f64, f64)> = ts
            .iter()
            .map(|&t| (t, 5.0 / (t * t.ln().powi(2))))
            .collect();
        let r = decay_fit(&b).unwrap();
        assert_eq!(r.law, DecayLaw::InverseTLogSquared);
        assert!((r.coefficient - 5.0).abs() < 1e-4);
        assert!(decay_fit(&a[..4]).is_err());
    }
}
