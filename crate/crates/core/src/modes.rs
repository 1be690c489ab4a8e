//! Exact solutions of the mode equation
//! `−u'' − u'/r + l²u/r² + V u = λ² u` for piecewise-constant `V`.
//!
//! On each piece the solution is `A g₁ + B g₂` where `(g₁, g₂)` is
//! `(J_l(kr), Y_l(kr))` with `k² = λ² − V`, or the harmonic pair
//! `(log r, 1)` / `(r^l, r^{−l})` when `k = 0`. Coefficients are carried across
//! breakpoints by matching `u` and `u'`. On the exterior piece `k` is `λ`
//! itself as a point of the logarithmic cover, so `J + iY = H⁽¹⁾_l(λr)` there.

use crate::grid::RadialGrid;
use crate::radial::{HarmonicTail, RadialFunction, Tail};
use crate::scatterer::{BoundaryCondition, RadialScatterer};
use crate::specfun::{bessel_jy, SpectralPoint, MAX_ORDER};
use num_complex::Complex64 as C64;
use std::sync::Arc;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Basis {
    Harmonic,
    Bessel(SpectralPoint),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: f64,
    pub b: f64,
    pub basis: Basis,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Start {
    Origin,
    Boundary { radius: f64, bc: BoundaryCondition },
}

/// Mode `l` of a scatterer at one spectral parameter (`None` = zero energy).
#[derive(Debug, Clone, PartialEq)]
pub struct ModeProblem {
    pub l: u32,
    pub lambda: Option<SpectralPoint>,
    segments: Arc<Vec<Segment>>,
    start: Start,
}

/// One solution of a [`ModeProblem`], as basis coefficients per segment.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSolution {
    pub l: u32,
    segments: Arc<Vec<Segment>>,
    pub coefs: Vec<[C64; 2]>,
}

/// `(g, g')` for both basis functions at `r`.
pub fn basis_values(l: u32, basis: Basis, r: f64) -> [(C64, C64); 2] {
    match basis {
        Basis::Harmonic if l == 0 => [(C64::new(r.ln(), 0.0), C64::new(1.0 / r, 0.0)), (ONE, ZERO)],
        Basis::Harmonic => {
            let li = l as i32;
            let lf = l as f64;
            [
                (
                    C64::new(r.powi(li), 0.0),
                    C64::new(lf * r.powi(li - 1), 0.0),
                ),
                (
                    C64::new(r.powi(-li), 0.0),
                    C64::new(-lf * r.powi(-li - 1), 0.0),
                ),
            ]
        }
        Basis::Bessel(k) => {
            let c = bessel_jy(l, k.scaled(r)).expect("order checked at construction");
            let kv = k.value();
            [(c.j, kv * c.dj), (c.y, kv * c.dy)]
        }
    }
}

fn piece_basis(k2: C64) -> Basis {
    if k2 == ZERO {
        Basis::Harmonic
    } else {
        Basis::Bessel(SpectralPoint::from_complex(k2.sqrt()).expect("nonzero wavenumber"))
    }
}

fn factorial(n: u32) -> f64 {
    (2..=n).map(|i| i as f64).product()
}

fn solve2(b: [(C64, C64); 2], u: C64, du: C64) -> [C64; 2] {
    let (g1, d1) = b[0];
    let (g2, d2) = b[1];
    let det = g1 * d2 - d1 * g2;
    [(u * d2 - du * g2) / det, (g1 * du - d1 * u) / det]
}

impl ModeProblem {
    pub fn new(s: &RadialScatterer, l: u32, lambda: Option<SpectralPoint>) -> Self {
        assert!(l <= MAX_ORDER, "mode {l} above supported order");
        let lam2 = lambda.map(|p| p.square()).unwrap_or(ZERO);
        let exterior = match lambda {
            Some(p) => Basis::Bessel(p),
            None => Basis::Harmonic,
        };
        let mut segments = Vec::new();
        let start = match s {
            RadialScatterer::PiecewisePotential { .. } => {
                for (a, b, v) in s.pieces() {
                    segments.push(Segment {
                        a,
                        b,
                        basis: piece_basis(lam2 - v),
                    });
                }
                Start::Origin
            }
            RadialScatterer::DiskObstacle { radius, bc } => Start::Boundary {
                radius: *radius,
                bc: *bc,
            },
        };
        segments.push(Segment {
            a: s.support_radius(),
            b: f64::INFINITY,
            basis: exterior,
        });
        Self {
            l,
            lambda,
            segments: Arc::new(segments),
            start,
        }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    fn solution(&self, coefs: Vec<[C64; 2]>) -> ModeSolution {
        ModeSolution {
            l: self.l,
            segments: self.segments.clone(),
            coefs,
        }
    }

    /// The solution regular at the origin, `r^l(1 + O(r²))`, or the one
    /// with `u(a₀) = 0, u'(a₀) = 1/a₀` (Dirichlet) / `u(a₀) = 1, u'(a₀) = 0`
    /// (Neumann). Entire in `λ²`.
    pub fn regular(&self) -> ModeSolution {
        let l = self.l;
        let segs = &self.segments;
        let mut coefs = Vec::with_capacity(segs.len());
        let first = segs[0];
        coefs.push(match self.start {
            Start::Origin => match first.basis {
                Basis::Harmonic if l == 0 => [ZERO, ONE],
                Basis::Harmonic => [ONE, ZERO],
                Basis::Bessel(k) => {
                    let a = factorial(l) * (C64::new(2.0, 0.0) / k.value()).powu(l);
                    [a, ZERO]
                }
            },
            Start::Boundary { radius, bc } => {
                let (u, du) = match bc {
                    BoundaryCondition::Dirichlet => (ZERO, C64::new(1.0 / radius, 0.0)),
                    BoundaryCondition::Neumann => (ONE, ZERO),
                };
                solve2(basis_values(l, first.basis, radius), u, du)
            }
        });
        for i in 1..segs.len() {
            let r = segs[i].a;
            let (u, du) = combine(basis_values(l, segs[i - 1].basis, r), coefs[i - 1]);
            coefs.push(solve2(basis_values(l, segs[i].basis, r), u, du));
        }
        self.solution(coefs)
    }

    /// The solution with the given exterior coefficients, continued inward.
    pub fn from_exterior(&self, ext: [C64; 2]) -> ModeSolution {
        let l = self.l;
        let segs = &self.segments;
        let n = segs.len();
        let mut coefs = vec![[ZERO; 2]; n];
        coefs[n - 1] = ext;
        for i in (0..n - 1).rev() {
            let r = segs[i].b;
            let (u, du) = combine(basis_values(l, segs[i + 1].basis, r), coefs[i + 1]);
            coefs[i] = solve2(basis_values(l, segs[i].basis, r), u, du);
        }
        self.solution(coefs)
    }

    /// `H⁽¹⁾_l(λr)` outside, continued inward.
    pub fn outgoing(&self) -> ModeSolution {
        assert!(self.lambda.is_some(), "outgoing solution needs λ ≠ 0");
        self.from_exterior([ONE, C64::i()])
    }
}

fn combine(b: [(C64, C64); 2], c: [C64; 2]) -> (C64, C64) {
    (c[0] * b[0].0 + c[1] * b[1].0, c[0] * b[0].1 + c[1] * b[1].1)
}

impl ModeSolution {
    fn segment_index(&self, r: f64) -> usize {
        self.segments
            .iter()
            .position(|s| r < s.b)
            .unwrap_or(self.segments.len() - 1)
    }

    pub fn eval(&self, r: f64) -> (C64, C64) {
        let i = self.segment_index(r);
        combine(
            basis_values(self.l, self.segments[i].basis, r),
            self.coefs[i],
        )
    }

    /// Coefficients on the exterior piece.
    pub fn exterior(&self) -> [C64; 2] {
        *self.coefs.last().unwrap()
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }
}

/// Evaluates several solutions of the same problem at `r`, sharing the
/// Bessel evaluations.
pub fn eval_many(sols: &[&ModeSolution], r: f64) -> Vec<(C64, C64)> {
    let s0 = sols[0];
    let i = s0.segment_index(r);
    let b = basis_values(s0.l, s0.segments[i].basis, r);
    sols.iter().map(|s| combine(b, s.coefs[i])).collect()
}

/// `r (φ'ψ − φψ')`, constant in `r` for two solutions of one problem.
pub fn wronskian(phi: &ModeSolution, psi: &ModeSolution, r: f64) -> C64 {
    let v = eval_many(&[phi, psi], r);
    let ((p, dp), (q, dq)) = (v[0], v[1]);
    (dp * q - p * dq) * r
}

impl ModeSolution {
    /// Samples on a grid; beyond `tail_from` a zero-energy solution is
    /// described by its harmonic exterior.
    pub fn sample(&self, grid: Arc<RadialGrid>, tail: Tail) -> RadialFunction {
        let l = self.l;
        RadialFunction::from_fn(l, grid, tail, |r| self.eval(r))
    }

    /// Harmonic exterior of a zero-energy solution.
    pub fn harmonic_tail(&self) -> HarmonicTail {
        let seg = self.segments.last().unwrap();
        assert_eq!(
            seg.basis,
            Basis::Harmonic,
            "harmonic tail needs a zero-energy solution"
        );
        let [g, d] = self.exterior();
        HarmonicTail::from_mode(self.l, seg.a, g, d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn pt(r: f64, t: f64) -> SpectralPoint {
        SpectralPoint::new(r, t).unwrap()
    }

    #[test]
    fn free_regular_solution_is_scaled_bessel() {
        let s = RadialScatterer::free();
        let lam = pt(0.7, 0.3);
        let p = ModeProblem::new(&s, 2, Some(lam));
        let u = p.regular();
        let r = 1.7;
        let j = bessel_jy(2, lam.scaled(r)).unwrap().j;
        let scale = 2.0 * (C64::new(2.0, 0.0) / lam.value()).powu(2);
        assert!((u.eval(r).0 - scale * j).norm() < 1e-13 * j.norm() * scale.norm());
    }

    #[test]
    fn wronskian_constant_across_pieces() {
        let s = RadialScatterer::potential(
            vec![0.5, 1.0, 1.5],
            vec![C64::new(-4.0, 0.0), C64::new(2.0, 0.5), C64::new(0.0, 0.0)],
        )
        .unwrap();
        let p = ModeProblem::new(&s, 1, Some(pt(0.3, 0.7)));
        let (phi, psi) = (p.regular(), p.outgoing());
        let w0 = wronskian(&phi, &psi, 0.2);
        for &r in &[0.4, 0.8, 1.2, 2.0, 7.0] {
            assert!((wronskian(&phi, &psi, r) - w0).norm() < 1e-10 * w0.norm());
        }
    }

    #[test]
    fn free_outgoing_wronskian() {
        // φ = J₀, ψ = H₀ gives r(φ'ψ − φψ') = −2i/π
        let s = RadialScatterer::free();
        let p = ModeProblem::new(&s, 0, Some(pt(1.3, 0.2)));
        let w = wronskian(&p.regular(), &p.outgoing(), 2.0);
        assert!((w - C64::new(0.0, -2.0 / PI)).norm() < 1e-13);
    }

    #[test]
    fn zero_energy_dirichlet_disk() {
        let s = RadialScatterer::disk(2.0, BoundaryCondition::Dirichlet).unwrap();
        let u = ModeProblem::new(&s, 0, None).regular();
        let t = u.harmonic_tail();
        assert!((t.clog - 1.0).norm() < 1e-15);
        assert!((t.c0 + 2f64.ln()).norm() < 1e-15);
    }

    #[test]
    fn zero_energy_free_mode() {
        let s = RadialScatterer::free();
        let u = ModeProblem::new(&s, 0, None).regular();
        assert_eq!(u.exterior(), [ZERO, ONE]);
        let u = ModeProblem::new(&s, 3, None).regular();
        assert_eq!(u.exterior(), [ONE, ZERO]);
    }

    #[test]
    fn well_zero_energy_matches_closed_form() {
        // V = −c on r < 1: inside J₀(√c r), outside A log r + B with
        // A = u'(1) = −√c J₁(√c), B = J₀(√c)
        let c: f64 = 3.0;
        let s = RadialScatterer::well(1.0, -c).unwrap();
        let u = ModeProblem::new(&s, 0, None).regular();
        let k = c.sqrt();
        let jk = bessel_jy(0, pt(k, 0.0)).unwrap();
        let [a, b] = u.exterior();
        assert!((a.re - k * jk.dj.re).abs() < 1e-13);
        assert!((b.re - jk.j.re).abs() < 1e-13);
    }
}
