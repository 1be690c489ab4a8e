#![allow(dead_code)]

use lowfreq2d::radial::RadialFunction;
use lowfreq2d::resolvent::standard_grid;
use lowfreq2d::scatterer::{BoundaryCondition, CutoffProfile, RadialScatterer};
use lowfreq2d::threshold::tune_threshold;
use num_complex::Complex64 as C64;
use std::sync::Arc;

use lowfreq2d::grid::RadialGrid;

pub fn dirichlet(radius: f64) -> RadialScatterer {
    RadialScatterer::disk(radius, BoundaryCondition::Dirichlet).unwrap()
}

pub fn neumann(radius: f64) -> RadialScatterer {
    RadialScatterer::disk(radius, BoundaryCondition::Neumann).unwrap()
}

pub fn generic_well() -> RadialScatterer {
    RadialScatterer::potential(
        vec![0.6, 1.2],
        vec![C64::new(-3.0, 0.0), C64::new(1.5, 0.0)],
    )
    .unwrap()
}

/// `−c` on `r < 0.5`, `−c/2` on `0.5 < r < 1`.
pub fn two_step(c: f64) -> RadialScatterer {
    RadialScatterer::potential(
        vec![0.5, 1.0],
        vec![C64::new(-c, 0.0), C64::new(-c / 2.0, 0.0)],
    )
    .unwrap()
}

pub fn plain_well(c: f64) -> RadialScatterer {
    RadialScatterer::well(1.0, -c).unwrap()
}

pub fn s_resonant_well() -> RadialScatterer {
    two_step(tune_threshold(two_step, 0, 18.5, 19.5).unwrap())
}

pub fn p_resonant_well() -> RadialScatterer {
    plain_well(tune_threshold(plain_well, 1, 3.0, 8.0).unwrap())
}

pub fn eigen_well() -> RadialScatterer {
    two_step(tune_threshold(two_step, 2, 26.5, 27.5).unwrap())
}

/// Grid out past the pairing radius, with bumps `f` on `(a, r0)` and `g`
/// on `((a + r0)/2, r0)` where `a` sits just outside the obstacle.
pub struct Fixture {
    pub grid: Arc<RadialGrid>,
    pub f: RadialFunction,
    pub g: RadialFunction,
}

pub fn fixture(s: &RadialScatterer, mode: u32, same: bool) -> Fixture {
    let c = CutoffProfile::for_scatterer(s);
    let a = s.inner_radius() + 0.1;
    let b = c.r0;
    let mid = 0.5 * (a + b);
    let grid = standard_grid(s, &c, &[a, b, mid], c.pairing_radius() + 1.0);
    let f = RadialFunction::bump(mode, grid.clone(), a, b);
    let g = if same {
        f.clone()
    } else {
        RadialFunction::bump(mode, grid.clone(), mid, b)
    };
    Fixture { grid, f, g }
}

/// Bump on `(inner, outer)` with its own 16-panel order-16 grid.
pub fn bump_on(inner: f64, outer: f64) -> RadialFunction {
    let edges: Vec<f64> = (0..=16)
        .map(|i| inner + (outer - inner) * i as f64 / 16.0)
        .collect();
    let grid = Arc::new(RadialGrid::from_edges(edges, 16).unwrap());
    RadialFunction::bump(0, grid, inner, outer)
}
