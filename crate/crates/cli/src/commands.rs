use crate::error::CliError;
use crate::output::{num, OutputDir};
use lowfreq2d::config::ScattererConfig;
use lowfreq2d::expansion::{
    fit_log_laurent, predict_leading_terms, sample_grid, shape_for, shift_hint,
};
use lowfreq2d::grid::RadialGrid;
use lowfreq2d::identities::identity_suite;
use lowfreq2d::radial::RadialFunction;
use lowfreq2d::resolvent::standard_grid;
use lowfreq2d::scatterer::RadialScatterer;
use lowfreq2d::scattering::{
    find_pole, peak_metrics, perturbation_sweep, phase_sweep, search_disk, sigma_asymptotic,
    PeakMetrics, ResonancePole,
};
use lowfreq2d::specfun::{gamma0, SpectralPoint};
use lowfreq2d::threshold::{classify, threshold_grid, ThresholdReport};
use lowfreq2d::wave::{
    decay_fit, evolve, free_leading, log_law_leading, DecayReport, Quadrature, WaveQuery,
};
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

/// Highest partial wave summed in `σ`; the sum stops earlier once the
/// shifts are negligible.
const PHASE_LMAX: u32 = 60;

pub struct Context<'a> {
    pub cfg: &'a ScattererConfig,
    pub scatterer: RadialScatterer,
}

impl Context<'_> {
    fn report(&self) -> Result<ThresholdReport, CliError> {
        let c = &self.cfg.cutoff;
        let grid = threshold_grid(&self.scatterer, c, c.pairing_radius() + 1.0);
        Ok(classify(&self.scatterer, self.cfg.lmax, grid)?)
    }
}

pub fn classify_cmd(ctx: &Context, out: &mut OutputDir) -> Result<(), CliError> {
    out.json("classify.json", &ctx.report()?)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CapacityReport {
    capacity: Option<f64>,
    a: C64,
    c0_ulog: C64,
    gamma0: C64,
}

pub fn capacity_cmd(ctx: &Context, out: &mut OutputDir) -> Result<(), CliError> {
    let rep = ctx.report()?;
    let (Some(a), Some(c0)) = (rep.a, rep.c0_ulog) else {
        return Err(CliError::validation(
            "the scatterer has a zero resonance, so U_log and the capacity shift do not exist",
        ));
    };
    out.json(
        "capacity.json",
        &CapacityReport {
            capacity: rep.capacity.map(|c| c + 0.0),
            a,
            c0_ulog: c0,
            gamma0: gamma0(),
        },
    )
}

pub fn expand_cmd(ctx: &Context, out: &mut OutputDir) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let s = &ctx.scatterer;
    let c = &cfg.cutoff;
    let (f, g) = (cfg.f, cfg.g);
    let grid = standard_grid(
        s,
        c,
        &[f.inner, f.outer, g.inner, g.outer],
        c.pairing_radius() + 1.0,
    );
    let fb = RadialFunction::bump(cfg.f_mode, grid.clone(), f.inner, f.outer);
    let gb = RadialFunction::bump(cfg.f_mode, grid.clone(), g.inner, g.outer);
    let rep = classify(s, cfg.lmax.max(cfg.f_mode), grid)?;
    let samples = sample_grid(s, &fb, &gb, &cfg.grid.lambda_grid())?;
    let rows: Vec<Vec<String>> = samples
        .iter()
        .map(|p| {
            vec![
                num(p.lambda.modulus()),
                num(p.lambda.arg()),
                num(p.value.re),
                num(p.value.im),
                p.held_out.to_string(),
            ]
        })
        .collect();
    out.csv(
        "samples.csv",
        &["modulus", "arg", "re", "im", "held_out"],
        &rows,
    )?;
    let shape = shape_for(&rep, cfg.f_mode);
    let mut fit = fit_log_laurent(
        &samples,
        shape,
        cfg.jmax,
        cfg.kmax,
        shift_hint(&rep, cfg.f_mode),
    )?;
    fit.compare(predict_leading_terms(&rep, &fb, &gb));
    out.json("fit.json", &fit)
}

pub fn phase_cmd(ctx: &Context, out: &mut OutputDir) -> Result<(), CliError> {
    let rep = ctx.report()?;
    let lambdas = ctx.cfg.phase.lambdas();
    let tables = phase_sweep(&ctx.scatterer, &lambdas, PHASE_LMAX)?;
    let mut rows = Vec::with_capacity(tables.len());
    for t in &tables {
        let (are, aim) = match sigma_asymptotic(&rep, t.lambda) {
            Ok(z) => (num(z.re), num(z.im)),
            Err(_) => (String::new(), String::new()),
        };
        rows.push(vec![
            num(t.lambda),
            num(t.sigma.re),
            num(t.sigma.im),
            are,
            aim,
            num(t.det_modulus),
        ]);
    }
    out.csv(
        "phase.csv",
        &[
            "lambda",
            "sigma_re",
            "sigma_im",
            "sigma_asymptotic_re",
            "sigma_asymptotic_im",
            "det_modulus",
        ],
        &rows,
    )
}

/// Physical sheet plus the strip below the real axis where resonances live.
const ARG_RANGE: (f64, f64) = (-PI / 2.0, PI);

fn seed_point(z: C64) -> Result<SpectralPoint, CliError> {
    SpectralPoint::from_complex(z).map_err(|e| CliError::validation(format!("pole.seed: {e}")))
}

#[derive(Serialize)]
struct PoleList<'a> {
    mode: u32,
    radius: f64,
    seed: Option<C64>,
    poles: &'a [ResonancePole],
}

pub fn resonance_cmd(ctx: &Context, out: &mut OutputDir) -> Result<(), CliError> {
    let p = &ctx.cfg.pole;
    let poles = match p.seed {
        Some(z) => vec![find_pole(&ctx.scatterer, p.mode, seed_point(z)?)?],
        None => search_disk(&ctx.scatterer, p.mode, p.radius, ARG_RANGE.0, ARG_RANGE.1),
    };
    out.json(
        "resonance.json",
        &PoleList {
            mode: p.mode,
            radius: p.radius,
            seed: p.seed,
            poles: &poles,
        },
    )
}

#[derive(Serialize)]
struct EpsilonSummary {
    epsilon: f64,
    poles: Vec<ResonancePole>,
    peak: Option<PeakMetrics>,
}

pub fn perturb_cmd(ctx: &Context, out: &mut OutputDir) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let Some(v1) = &cfg.perturbation else {
        return Err(CliError::validation(
            "perturb needs perturb.breaks and perturb.values",
        ));
    };
    if cfg.epsilons.is_empty() {
        return Err(CliError::validation("perturb needs epsilons"));
    }
    let p = &cfg.pole;
    let continued = match p.seed {
        Some(z) => Some(perturbation_sweep(
            &ctx.scatterer,
            v1,
            p.mode,
            &cfg.epsilons,
            seed_point(z)?,
        )?),
        None => None,
    };
    let lambdas = cfg.phase.lambdas();
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for (i, &eps) in cfg.epsilons.iter().enumerate() {
        let s = ctx.scatterer.perturbed(eps, v1)?;
        let tables = phase_sweep(&s, &lambdas, PHASE_LMAX)?;
        for t in &tables {
            rows.push(vec![
                num(eps),
                num(t.lambda),
                num(t.sigma.re),
                num(t.sigma.im),
            ]);
        }
        let sigma: Vec<f64> = tables.iter().map(|t| t.sigma.re).collect();
        let poles = match &continued {
            Some(c) => vec![c[i].clone()],
            None => search_disk(&s, p.mode, p.radius, ARG_RANGE.0, ARG_RANGE.1)
                .into_iter()
                .map(|mut q| {
                    q.epsilon = eps;
                    q
                })
                .collect(),
        };
        summary.push(EpsilonSummary {
            epsilon: eps,
            poles,
            peak: peak_metrics(&lambdas, &sigma),
        });
    }
    out.csv(
        "perturb.csv",
        &["epsilon", "lambda", "sigma_re", "sigma_im"],
        &rows,
    )?;
    out.json("perturb.json", &summary)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct WaveSummary {
    quadrature: Quadrature,
    integral_f: C64,
    decay_fit: Option<DecayReport>,
    decay_fit_note: Option<String>,
}

pub fn wave_cmd(ctx: &Context, out: &mut OutputDir) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let (a, b) = (cfg.f.inner, cfg.f.outer);
    let edges: Vec<f64> = (0..=16).map(|i| a + (b - a) * i as f64 / 16.0).collect();
    let grid = Arc::new(
        RadialGrid::from_edges(edges, 16).map_err(|e| CliError::validation(e.to_string()))?,
    );
    let f = RadialFunction::bump(cfg.f_mode, grid, a, b);
    let q = WaveQuery {
        scatterer: ctx.scatterer.clone(),
        f: f.clone(),
        x: cfg.wave_x,
        times: cfg.wave_times.clone(),
    };
    let quad = Quadrature::default();
    let w = evolve(&q, &quad)?;
    let rep = ctx.report()?;
    let mut rows = Vec::new();
    for (&t, wt) in cfg.wave_times.iter().zip(&w) {
        let free = free_leading(&f, t).re;
        let (log_lead, log_ratio) = match &rep.ulog {
            Some(u) => {
                let l = log_law_leading(u, &f, cfg.wave_x, t).re;
                (num(l), num(wt.re / l))
            }
            None => (String::new(), String::new()),
        };
        rows.push(vec![
            num(t),
            num(wt.re),
            num(wt.im),
            num(free),
            num(wt.re / free),
            log_lead,
            log_ratio,
        ]);
    }
    out.csv(
        "wave.csv",
        &[
            "t",
            "w_re",
            "w_im",
            "free_leading",
            "ratio_free",
            "log_leading",
            "ratio_log",
        ],
        &rows,
    )?;
    let data: Vec<(f64, f64)> = cfg
        .wave_times
        .iter()
        .zip(&w)
        .map(|(&t, wt)| (t, wt.re))
        .collect();
    let (fit, note) = match decay_fit(&data) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    out.json(
        "wave.json",
        &WaveSummary {
            quadrature: quad,
            integral_f: f.integral(),
            decay_fit: fit,
            decay_fit_note: note,
        },
    )
}

fn point_cells(p: Option<SpectralPoint>) -> [String; 2] {
    match p {
        Some(p) => [num(p.modulus()), num(p.arg())],
        None => [String::new(), String::new()],
    }
}

pub fn verify_cmd(ctx: &Context, out: &mut OutputDir) -> Result<(), CliError> {
    let tol = ctx.cfg.identity_tol;
    let checks = identity_suite(&ctx.scatterer, &ctx.cfg.cutoff)?;
    let mut failed = 0;
    let rows: Vec<Vec<String>> = checks
        .iter()
        .map(|c| {
            let pass = c.residual < tol;
            failed += usize::from(!pass);
            let [lm, la] = point_cells(c.lambda);
            let [zm, za] = point_cells(c.z);
            vec![
                c.identity.clone(),
                lm,
                la,
                zm,
                za,
                num(c.residual),
                pass.to_string(),
            ]
        })
        .collect();
    out.csv(
        "identities.csv",
        &[
            "identity",
            "lambda_modulus",
            "lambda_arg",
            "z_modulus",
            "z_arg",
            "residual",
            "pass",
        ],
        &rows,
    )?;
    if failed > 0 {
        return Err(CliError::numerical(format!(
            "{failed} of {} identity checks exceed the tolerance {tol:e}",
            checks.len()
        )));
    }
    Ok(())
}
