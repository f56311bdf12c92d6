use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use zenotraj::dephasing::{dephasing_exponent, modified_dephasing, single_path_factor, DephasingParams};
use zenotraj::dicke::{excited_population_analytic, simulate, Geometry};
use zenotraj::dissipative::{
    decay_amplitude, divisibility_report, memory_kernel, survival_probability_diss, trace_distance_diss, DecayAmplitude,
};
use zenotraj::perturbation::{general_filter, CouplingModel};
use zenotraj::zeno_filter::{decay_factor_overlap, perturbative_consistency, FilterSpec};
use zenotraj::{sinc, QubitState, SpectralDensity, TimeGrid};

use crate::config::{missing, ConfigLayer, DickeMethod, KernelChoice, Model, PathPair, PerturbationMode, RunConfig, Scenario, Spectral};
use crate::error::{CliError, CliResult, Context};
use crate::table::{Metadata, ResultTable};

pub fn run(config: &RunConfig) -> CliResult<ResultTable> {
    let mut table = match config.scenario {
        Scenario::Filter => filter(config)?,
        Scenario::DynamicsDiss => dynamics_diss(config)?,
        Scenario::DynamicsDeph => dynamics_deph(config)?,
        Scenario::Dicke => dicke(config)?,
        Scenario::Nonmarkov => match config.model {
            Model::Diss => nonmarkov_diss(config)?,
            Model::Deph => nonmarkov_deph(config)?,
        },
        Scenario::Perturbation => match config.settings.mode {
            Some(PerturbationMode::Filter) => perturbation_filter(config)?,
            _ => perturbation(config)?,
        },
    };
    if let Some(recipe) = config.settings.recipe {
        table.flag("recipe", recipe);
    }
    Ok(table)
}

fn req<T: Clone>(value: &Option<T>, field: &str) -> CliResult<T> {
    value.clone().ok_or_else(|| missing(field))
}

fn metadata(config: &RunConfig) -> Metadata {
    let units = match config.scenario {
        Scenario::Dicke => format!(
            "hbar = 1; time column is Gamma0*t, Gamma0 = {} in units of omega_q",
            config.settings.gamma0.unwrap_or(f64::NAN)
        ),
        _ => format!(
            "hbar = k_B = 1; frequencies in the units of omega_q (omega_q = {}), times in their inverse",
            config.settings.omega_q.unwrap_or(1.0)
        ),
    };
    Metadata {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        scenario: config.scenario.name().to_string(),
        units,
        config: serde_json::to_value(&config.settings).expect("config serializes"),
        flags: BTreeMap::new(),
    }
}

fn density(s: &ConfigLayer) -> CliResult<SpectralDensity> {
    let kind = req(&s.spectral, "spectral")?;
    let d = match kind {
        Spectral::Lorentzian => SpectralDensity::lorentzian(req(&s.gamma0, "gamma0")?, req(&s.lambda, "lambda")?, req(&s.omega_q, "omega-q")?),
        Spectral::Ohmic => SpectralDensity::ohmic(req(&s.eta, "eta")?, req(&s.s, "s")?, req(&s.omega_c, "omega-c")?),
        Spectral::Gaussian => SpectralDensity::gaussian_peak(req(&s.omega_m, "omega-m")?, req(&s.delta, "delta")?),
        Spectral::Tabulated => SpectralDensity::tabulated(req(&s.points, "points")?.iter().map(|p| (p[0], p[1])).collect()),
        Spectral::Zero => Ok(SpectralDensity::zero()),
    }
    .context("spectral density")?;
    match s.omega_max {
        Some(w) => d.with_omega_max(w).context("spectral density"),
        None => Ok(d),
    }
}

fn frequency_grid(s: &ConfigLayer) -> CliResult<Vec<f64>> {
    let (lo, hi, n) = (req(&s.w_min, "w-min")?, req(&s.w_max, "w-max")?, req(&s.w_points, "w-points")?);
    let h = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|k| if k + 1 == n { hi } else { lo + k as f64 * h }).collect())
}

fn time_grid(s: &ConfigLayer) -> CliResult<TimeGrid> {
    TimeGrid::from_zero(req(&s.tmax, "tmax")?, req(&s.dt, "dt")?).context("time grid")
}

/// Indices of the grid points written out, every `output-dt`.
fn output_indices(s: &ConfigLayer, grid: &TimeGrid) -> CliResult<Vec<usize>> {
    let every = match s.output_dt {
        Some(out) => {
            let ratio = out / grid.dt();
            let k = ratio.round();
            if k < 1.0 || (ratio - k).abs() > 1e-6 * k {
                return Err(CliError::config(format!(
                    "field `output-dt`: {out} is not a multiple of the step {}",
                    grid.dt()
                )));
            }
            k as usize
        }
        None => 1,
    };
    Ok((0..grid.count()).filter(|i| i % every == 0).collect())
}

fn filter(config: &RunConfig) -> CliResult<ResultTable> {
    let s = &config.settings;
    let j = density(s)?;
    let (t, omega_q) = (req(&s.t, "t")?, req(&s.omega_q, "omega-q")?);
    let n = s.pi_shifts.unwrap_or(0);
    let mut specs = Vec::new();
    let mut columns = vec!["omega".to_string(), "J".to_string()];
    for &n_paths in s.path_counts.as_deref().unwrap_or(&[]) {
        specs.push(FilterSpec::diss(n_paths, n, t, omega_q).context("filter")?);
        columns.push(if n == 0 { format!("F_N{n_paths}") } else { format!("F_N{n_paths}_n{n}") });
    }
    for &m in s.measurements.as_deref().unwrap_or(&[]) {
        specs.push(FilterSpec::traditional(m as f64, t, omega_q).context("traditional filter")?);
        columns.push(format!("Ftilde_N{m}"));
    }
    let omegas = frequency_grid(s)?;
    let rows: Vec<Vec<f64>> = omegas
        .par_iter()
        .map(|&w| {
            let mut row = vec![w, j.eval(w)];
            row.extend(specs.iter().map(|f| f.eval(w)));
            row
        })
        .collect();
    let gammas = specs
        .par_iter()
        .map(|f| decay_factor_overlap(&j, f))
        .collect::<zenotraj::Result<Vec<_>>>()
        .context("overlap integral")?;
    let mut table = ResultTable::new(columns.clone(), metadata(config));
    rows.into_iter().for_each(|r| table.push(r));
    table.flag("omega_q_t", omega_q * t);
    let decay: BTreeMap<String, f64> = columns[2..].iter().cloned().zip(gammas).collect();
    table.flag("decay_factor", decay);
    Ok(table)
}

fn amplitude(config: &RunConfig, j: &SpectralDensity, grid: TimeGrid) -> CliResult<DecayAmplitude> {
    let s = &config.settings;
    let omega_q = req(&s.omega_q, "omega-q")?;
    match req(&s.kernel, "kernel")? {
        KernelChoice::Auto => decay_amplitude(j, omega_q, grid).context("dissipation function"),
        KernelChoice::Numeric => {
            let kernel = memory_kernel(j, omega_q).context("memory kernel")?;
            DecayAmplitude::from_kernel(&kernel, grid).context("dissipation function")
        }
        KernelChoice::Closed => {
            if s.spectral != Some(Spectral::Lorentzian) {
                return Err(CliError::config("field `kernel`: the closed form needs `spectral = lorentzian`"));
            }
            DecayAmplitude::lorentzian_closed(req(&s.gamma0, "gamma0")?, req(&s.lambda, "lambda")?, grid).context("dissipation function")
        }
    }
}

fn dynamics_diss(config: &RunConfig) -> CliResult<ResultTable> {
    let s = &config.settings;
    let j = density(s)?;
    let pairs = config.pairs();
    let amp = amplitude(config, &j, time_grid(s)?)?;
    let mut columns = vec!["t".to_string(), "abs_G2".to_string()];
    for p in &pairs {
        columns.push(format!("p_{}", p.label()));
        columns.push(format!("D_{}", p.label()));
    }
    let mut table = ResultTable::new(columns, metadata(config));
    table.flag("kernel", amp.source());
    for i in output_indices(s, amp.grid())? {
        let g = amp.values()[i];
        let mut row = vec![amp.grid().time(i), g.norm_sqr()];
        for p in &pairs {
            row.push(survival_probability_diss(g, p.paths, p.pi_shifts).context("survival probability")?);
            row.push(trace_distance_diss(g, p.paths, p.pi_shifts).context("trace distance")?);
        }
        table.push(row);
    }
    Ok(table)
}

struct Dephasing {
    times: Vec<f64>,
    exponent: Vec<f64>,
    phi: Vec<f64>,
}

fn dephasing_run(config: &RunConfig) -> CliResult<(TimeGrid, Vec<usize>, Dephasing)> {
    let s = &config.settings;
    let params = DephasingParams::new(density(s)?, req(&s.temperature, "temperature")?).context("dephasing parameters")?;
    let grid = time_grid(s)?;
    let keep = output_indices(s, &grid)?;
    let times: Vec<f64> = keep.iter().map(|&i| grid.time(i)).collect();
    let exponent = times
        .par_iter()
        .map(|&t| dephasing_exponent(&params, t))
        .collect::<zenotraj::Result<Vec<_>>>()
        .context("dephasing exponent")?;
    let phi = exponent.iter().map(|&g| single_path_factor(g)).collect::<zenotraj::Result<Vec<_>>>().context("dephasing factor")?;
    Ok((grid, keep, Dephasing { times, exponent, phi }))
}

fn modified(phi: f64, p: &PathPair) -> CliResult<f64> {
    modified_dephasing(phi, p.paths, p.pi_shifts).context("modified dephasing factor")
}

fn dynamics_deph(config: &RunConfig) -> CliResult<ResultTable> {
    let pairs = config.pairs();
    let (_, _, run) = dephasing_run(config)?;
    let mut columns = vec!["t".to_string(), "Gamma".to_string(), "phi".to_string()];
    columns.extend(pairs.iter().map(|p| format!("Phi_{}", p.label())));
    let mut table = ResultTable::new(columns, metadata(config));
    table.flag("phi", "exp(-Gamma)");
    for k in 0..run.times.len() {
        let mut row = vec![run.times[k], run.exponent[k], run.phi[k]];
        for p in &pairs {
            row.push(modified(run.phi[k], p)?);
        }
        table.push(row);
    }
    Ok(table)
}

fn nonmarkov_deph(config: &RunConfig) -> CliResult<ResultTable> {
    let pairs = config.pairs();
    let (_, _, run) = dephasing_run(config)?;
    let mut columns = vec!["t".to_string()];
    columns.extend(pairs.iter().map(|p| format!("D_{}", p.label())));
    let mut table = ResultTable::new(columns, metadata(config));
    table.flag("model", Model::Deph);
    table.flag("trace_distance", "|Phi| for the pair |+>, |->");
    for k in 0..run.times.len() {
        let mut row = vec![run.times[k]];
        for p in &pairs {
            row.push(modified(run.phi[k], p)?.abs());
        }
        table.push(row);
    }
    Ok(table)
}

fn nonmarkov_diss(config: &RunConfig) -> CliResult<ResultTable> {
    let s = &config.settings;
    let j = density(s)?;
    let pairs = config.pairs();
    let amp = amplitude(config, &j, time_grid(s)?)?;
    let mut columns = vec!["t".to_string()];
    columns.extend(pairs.iter().map(|p| format!("D_{}", p.label())));
    let mut table = ResultTable::new(columns, metadata(config));
    table.flag("model", Model::Diss);
    table.flag("kernel", amp.source());
    table.flag("trace_distance", "pair |+>, |->");
    let reports = pairs
        .par_iter()
        .map(|p| divisibility_report(&amp, p.paths, p.pi_shifts, None))
        .collect::<zenotraj::Result<Vec<_>>>()
        .context("CP divisibility")?;
    let mut divisibility = BTreeMap::new();
    for (p, r) in pairs.iter().zip(&reports) {
        divisibility.insert(
            p.label(),
            serde_json::json!({
                "cp_divisible": r.divisible(),
                "first_violation_time": r.first_violation_time(),
                "criteria_agree": r.criteria_agree(),
                "compared_pairs": r.compared_pairs(),
                "tolerance": r.tolerance,
            }),
        );
    }
    table.flag("divisibility", divisibility);
    for i in output_indices(s, amp.grid())? {
        let g = amp.values()[i];
        let mut row = vec![amp.grid().time(i)];
        for p in &pairs {
            row.push(trace_distance_diss(g, p.paths, p.pi_shifts).context("trace distance")?);
        }
        table.push(row);
    }
    Ok(table)
}

fn dicke(config: &RunConfig) -> CliResult<ResultTable> {
    let s = &config.settings;
    let gamma0 = req(&s.gamma0, "gamma0")?;
    let factor = match (s.sinc, s.qd) {
        (_, Some(qd)) => sinc(qd),
        (Some(x), None) => x,
        (None, None) => return Err(missing("sinc")),
    };
    let pairs = config.pairs();
    let grid = TimeGrid::from_zero(req(&s.tmax, "tmax")?, req(&s.dt, "dt")?).context("time grid")?;
    let keep = output_indices(s, &grid)?;
    let method = req(&s.method, "method")?;
    let columns_p: Vec<Vec<f64>> = pairs
        .par_iter()
        .map(|p| -> CliResult<Vec<f64>> {
            match method {
                DickeMethod::Analytic => keep
                    .iter()
                    .map(|&i| excited_population_analytic(grid.time(i) / gamma0, p.paths, p.pi_shifts, gamma0, factor))
                    .collect::<zenotraj::Result<Vec<_>>>()
                    .context("excited population"),
                DickeMethod::Numeric => {
                    let geometry = match s.qd {
                        Some(qd) => Geometry::regular(p.paths, qd, 1.0),
                        None => Geometry::regular_with_factor(p.paths, factor),
                    }
                    .context("emitter geometry")?;
                    let run = simulate(&geometry, p.paths, p.pi_shifts, gamma0, grid.t_max(), grid.dt()).context("master equation")?;
                    Ok(keep.iter().map(|&i| run.excited_population[i]).collect())
                }
            }
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut columns = vec!["gamma0_t".to_string()];
    columns.extend(pairs.iter().map(|p| format!("Pe_{}", p.label())));
    columns.extend(["exp_minus_gamma_plus_t", "exp_minus_gamma_minus_t", "exp_minus_gamma0_t"].map(String::from));
    let mut table = ResultTable::new(columns, metadata(config));
    table.flag("method", method);
    table.flag("collective_factor", factor);
    for (k, &i) in keep.iter().enumerate() {
        let x = grid.time(i);
        let mut row = vec![x];
        row.extend(columns_p.iter().map(|c| c[k]));
        row.extend([(-(1.0 + factor) * x).exp(), (-(1.0 - factor) * x).exp(), (-x).exp()]);
        table.push(row);
    }
    Ok(table)
}

fn perturbation(config: &RunConfig) -> CliResult<ResultTable> {
    let s = &config.settings;
    let j = density(s)?;
    let (omega_q, t, dt) = (req(&s.omega_q, "omega-q")?, req(&s.t, "t")?, req(&s.dt, "dt")?);
    let eps = req(&s.epsilon, "epsilon")?;
    let jobs: Vec<(PathPair, f64)> = config.pairs().into_iter().flat_map(|p| eps.iter().map(move |&e| (p, e))).collect();
    let results = jobs
        .par_iter()
        .map(|&(p, e)| perturbative_consistency(&j, omega_q, t, p.paths, p.pi_shifts, e, dt))
        .collect::<zenotraj::Result<Vec<_>>>()
        .context("perturbative comparison")?;
    let columns = ["N", "n", "epsilon", "gamma_exact", "gamma_overlap", "relative_mismatch"].map(String::from).to_vec();
    let mut table = ResultTable::new(columns, metadata(config));
    table.flag("exact_kernel", "numeric");
    for ((p, e), c) in jobs.iter().zip(&results) {
        let mismatch = if c.overlap > 0.0 { c.relative_mismatch() } else { 0.0 };
        table.push(vec![p.paths as f64, p.pi_shifts as f64, *e, c.exact, c.overlap, mismatch]);
    }
    Ok(table)
}

fn perturbation_filter(config: &RunConfig) -> CliResult<ResultTable> {
    let s = &config.settings;
    let j = density(s)?;
    let (omega_q, t) = (req(&s.omega_q, "omega-q")?, req(&s.t, "t")?);
    let phases = req(&s.phases, "phases")?;
    let model = CouplingModel::dissipative(omega_q, vec![j.clone(); phases.len()]).context("coupling model")?;
    let psi0 = QubitState::pure(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)).context("initial state")?;
    let omegas = frequency_grid(s)?;
    let rows = omegas
        .par_iter()
        .map(|&w| -> zenotraj::Result<Vec<f64>> {
            let mut row = vec![w, j.eval(w)];
            for path in 0..phases.len() {
                row.push(general_filter(&model, &psi0, w, t, &phases, path)?);
            }
            Ok(row)
        })
        .collect::<zenotraj::Result<Vec<_>>>()
        .context("general filter")?;
    let mut columns = vec!["omega".to_string(), "J".to_string()];
    columns.extend((0..phases.len()).map(|k| format!("F_path{k}")));
    let mut table = ResultTable::new(columns, metadata(config));
    table.flag("initial_state", "|e>");
    table.flag("model", "dissipative, identical J on every path");
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}
