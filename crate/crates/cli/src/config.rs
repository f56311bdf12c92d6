use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Filter,
    DynamicsDiss,
    DynamicsDeph,
    Dicke,
    Nonmarkov,
    Perturbation,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Filter => "filter",
            Scenario::DynamicsDiss => "dynamics-diss",
            Scenario::DynamicsDeph => "dynamics-deph",
            Scenario::Dicke => "dicke",
            Scenario::Nonmarkov => "nonmarkov",
            Scenario::Perturbation => "perturbation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Recipe {
    Fig2,
    Fig3,
    Fig4a,
    Fig4b,
    Fig4c,
}

impl Recipe {
    pub fn scenario(self) -> Scenario {
        match self {
            Recipe::Fig2 => Scenario::Filter,
            Recipe::Fig3 => Scenario::Dicke,
            Recipe::Fig4a | Recipe::Fig4b | Recipe::Fig4c => Scenario::Nonmarkov,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Spectral {
    Lorentzian,
    Ohmic,
    Gaussian,
    Tabulated,
    Zero,
}

/// How the dissipative memory kernel is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum KernelChoice {
    /// Closed-form Lorentzian amplitude when the peak is narrow, quadrature otherwise.
    Auto,
    Closed,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Diss,
    Deph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum DickeMethod {
    Analytic,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PerturbationMode {
    /// Exact against overlap-integral decay factor over a list of ε.
    Consistency,
    /// Filter of the general second-order engine for an explicit phase list.
    Filter,
}

/// `N:n` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathPair {
    pub paths: usize,
    pub pi_shifts: usize,
}

impl PathPair {
    pub fn new(paths: usize, pi_shifts: usize) -> Self {
        Self { paths, pi_shifts }
    }

    pub fn label(&self) -> String {
        format!("N{}_n{}", self.paths, self.pi_shifts)
    }
}

impl fmt::Display for PathPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.paths, self.pi_shifts)
    }
}

impl FromStr for PathPair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once(':').ok_or_else(|| format!("expected N:n, got `{s}`"))?;
        let paths = a.trim().parse().map_err(|_| format!("bad N in `{s}`"))?;
        let pi_shifts = b.trim().parse().map_err(|_| format!("bad n in `{s}`"))?;
        Ok(Self { paths, pi_shifts })
    }
}

impl Serialize for PathPair {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PathPair {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One layer of settings. The command line, the config file and the recipe
/// each produce one; [`ConfigLayer::over`] stacks them.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigLayer {
    /// Scenario; only meaningful in a config file, where it must match the subcommand.
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,

    /// Figure recipe supplying defaults.
    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recipe: Option<Recipe>,

    /// Output file (stdout if absent).
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,

    /// Spectral density shape.
    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral: Option<Spectral>,

    /// Lorentzian coupling γ0, or the single-emitter rate Γ0 for `dicke`.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma0: Option<f64>,

    /// Lorentzian width.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,

    /// Qubit frequency.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_q: Option<f64>,

    /// Ohmic coupling.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,

    /// Ohmicity exponent.
    #[arg(long = "s", global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,

    /// Ohmic cutoff frequency.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_c: Option<f64>,

    /// Gaussian peak centre.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_m: Option<f64>,

    /// Gaussian peak width parameter.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,

    /// High-frequency truncation of J.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_max: Option<f64>,

    /// Tabulated `(ω, J)` samples (config file only).
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[f64; 2]>>,

    /// Bath temperature (k_B = ħ = 1).
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,

    /// Number of paths.
    #[arg(long = "N", global = true)]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub paths: Option<usize>,

    /// Number of π phase shifters.
    #[arg(long = "n", global = true)]
    #[serde(rename = "n", skip_serializing_if = "Option::is_none")]
    pub pi_shifts: Option<usize>,

    /// List of `N:n` pairs, e.g. `1:0,3:0,3:1`.
    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<PathPair>>,

    /// Explicit phase list for the general engine.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phases: Option<Vec<f64>>,

    /// Path counts for the superposed filters.
    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path_counts: Option<Vec<usize>>,

    /// Measurement counts Ñ for the traditional Zeno filter.
    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measurements: Option<Vec<usize>>,

    /// Evolution time of the filter and perturbation scenarios.
    #[arg(long = "t", global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,

    /// End of the time grid (units of 1/Γ0 for `dicke`).
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tmax: Option<f64>,

    /// Integration step (units of 1/Γ0 for `dicke`).
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,

    /// Spacing of output rows; defaults to `dt`.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dt: Option<f64>,

    /// Lower end of the frequency grid.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_min: Option<f64>,

    /// Upper end of the frequency grid.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_max: Option<f64>,

    /// Number of frequency points.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_points: Option<usize>,

    /// Collective factor sinc(qd) between equidistant sites.
    #[arg(long, global = true, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sinc: Option<f64>,

    /// Site separation in units of 1/q, alternative to `--sinc`.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qd: Option<f64>,

    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<DickeMethod>,

    /// Environment model of the `nonmarkov` scenario.
    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<Model>,

    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelChoice>,

    /// Coupling scale factors ε (J → ε² J).
    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Vec<f64>>,

    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<PerturbationMode>,
}

macro_rules! stack {
    ($top:ident, $bottom:ident; $($field:ident),* $(,)?) => {
        ConfigLayer { $($field: $top.$field.or($bottom.$field)),* }
    };
}

impl ConfigLayer {
    /// `self` where set, `lower` otherwise.
    pub fn over(self, lower: ConfigLayer) -> ConfigLayer {
        let (a, b) = (self, lower);
        stack!(a, b; scenario, recipe, out, format, spectral, gamma0, lambda, omega_q, eta, s,
            omega_c, omega_m, delta, omega_max, points, temperature, paths, pi_shifts, pairs,
            phases, path_counts, measurements, t, tmax, dt, output_dt, w_min, w_max, w_points,
            sinc, qd, method, model, kernel, epsilon, mode)
    }

    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::config(format!("config file: {}", e.message().trim())))
    }

    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("config file {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }
}

const SPECTRAL_KEYS: &[&str] = &[
    "spectral", "gamma0", "lambda", "omega-q", "eta", "s", "omega-c", "omega-m", "delta", "omega-max", "points",
];
const COMMON_KEYS: &[&str] = &["scenario", "recipe", "out", "format"];

fn allowed_keys(scenario: Scenario, model: Model) -> Vec<&'static str> {
    let mut keys = COMMON_KEYS.to_vec();
    let specific: &[&str] = match scenario {
        Scenario::Filter => &["n", "path-counts", "measurements", "t", "w-min", "w-max", "w-points"],
        Scenario::DynamicsDiss => &["N", "n", "pairs", "tmax", "dt", "output-dt", "kernel"],
        Scenario::DynamicsDeph => &["N", "n", "pairs", "tmax", "dt", "output-dt", "temperature"],
        Scenario::Dicke => &["gamma0", "N", "n", "pairs", "sinc", "qd", "tmax", "dt", "output-dt", "method"],
        Scenario::Nonmarkov => match model {
            Model::Diss => &["model", "N", "n", "pairs", "tmax", "dt", "output-dt", "kernel"],
            Model::Deph => &["model", "N", "n", "pairs", "tmax", "dt", "output-dt", "temperature"],
        },
        Scenario::Perturbation => &["N", "n", "pairs", "phases", "t", "dt", "epsilon", "mode", "w-min", "w-max", "w-points"],
    };
    keys.extend_from_slice(specific);
    if scenario != Scenario::Dicke {
        keys.extend_from_slice(SPECTRAL_KEYS);
    }
    keys
}

/// Keys set in `layer` that `scenario` would silently ignore.
fn unused_keys(layer: &ConfigLayer, scenario: Scenario, model: Model) -> Vec<String> {
    let allowed = allowed_keys(scenario, model);
    let value = serde_json::to_value(layer).expect("config layer serializes");
    value
        .as_object()
        .map(|m| m.keys().filter(|k| !allowed.contains(&k.as_str())).cloned().collect())
        .unwrap_or_default()
}

fn pairs(list: &str) -> Option<Vec<PathPair>> {
    Some(list.split(',').map(|p| p.parse().expect("static pair list")).collect())
}

/// Settings a figure recipe pins down.
pub fn recipe_layer(recipe: Recipe) -> ConfigLayer {
    let base = ConfigLayer {
        recipe: Some(recipe),
        ..ConfigLayer::default()
    };
    match recipe {
        Recipe::Fig2 => ConfigLayer {
            spectral: Some(Spectral::Gaussian),
            omega_q: Some(1.0),
            omega_m: Some(1.5),
            delta: Some(0.2),
            t: Some(5.0),
            pi_shifts: Some(0),
            path_counts: Some(vec![1, 4, 8]),
            measurements: Some(vec![1, 4, 8]),
            w_min: Some(0.0),
            w_max: Some(3.0),
            w_points: Some(601),
            ..base
        },
        Recipe::Fig3 => ConfigLayer {
            gamma0: Some(0.01),
            sinc: Some(1.0 / 6.0),
            pairs: pairs("3:0,3:1"),
            tmax: Some(5.0),
            dt: Some(1e-3),
            output_dt: Some(0.01),
            method: Some(DickeMethod::Analytic),
            ..base
        },
        Recipe::Fig4a => ConfigLayer {
            model: Some(Model::Diss),
            spectral: Some(Spectral::Lorentzian),
            gamma0: Some(1.0),
            lambda: Some(0.1),
            omega_q: Some(1.0),
            pairs: pairs("1:0,3:0,3:1"),
            tmax: Some(60.0),
            dt: Some(0.01),
            kernel: Some(KernelChoice::Closed),
            ..base
        },
        Recipe::Fig4b | Recipe::Fig4c => ConfigLayer {
            model: Some(Model::Deph),
            spectral: Some(Spectral::Ohmic),
            eta: Some(1.0 / 3.0),
            s: Some(if recipe == Recipe::Fig4b { 1.0 } else { 4.0 }),
            omega_c: Some(1.0),
            temperature: Some(0.0),
            pairs: pairs("1:0,3:0,3:1"),
            tmax: Some(if recipe == Recipe::Fig4b { 10.0 } else { 50.0 }),
            dt: Some(if recipe == Recipe::Fig4b { 0.01 } else { 0.05 }),
            ..base
        },
    }
}

/// Scenario defaults, below every other layer.
fn scenario_defaults(scenario: Scenario, model: Model) -> ConfigLayer {
    let base = ConfigLayer {
        format: Some(Format::Csv),
        ..ConfigLayer::default()
    };
    match scenario {
        Scenario::Filter => ConfigLayer {
            spectral: Some(Spectral::Gaussian),
            ..recipe_layer(Recipe::Fig2).over(base)
        }
        .without_recipe(),
        Scenario::DynamicsDiss => ConfigLayer {
            spectral: Some(Spectral::Lorentzian),
            pairs: pairs("1:0,3:0,3:1"),
            tmax: Some(20.0),
            dt: Some(0.01),
            kernel: Some(KernelChoice::Auto),
            ..base
        },
        Scenario::DynamicsDeph => ConfigLayer {
            spectral: Some(Spectral::Ohmic),
            temperature: Some(0.0),
            pairs: pairs("1:0,3:0,3:1"),
            tmax: Some(10.0),
            dt: Some(0.01),
            ..base
        },
        Scenario::Dicke => recipe_layer(Recipe::Fig3).over(base).without_recipe(),
        Scenario::Nonmarkov => match model {
            Model::Diss => ConfigLayer {
                kernel: Some(KernelChoice::Auto),
                ..recipe_layer(Recipe::Fig4a)
            },
            Model::Deph => recipe_layer(Recipe::Fig4b),
        }
        .over(base)
        .without_recipe(),
        Scenario::Perturbation => ConfigLayer {
            spectral: Some(Spectral::Lorentzian),
            pairs: pairs("1:0"),
            t: Some(0.2),
            dt: Some(5e-4),
            epsilon: Some(vec![0.2, 0.1, 0.05]),
            mode: Some(PerturbationMode::Consistency),
            w_min: Some(0.0),
            w_max: Some(2.0),
            w_points: Some(101),
            ..base
        },
    }
}

fn spectral_defaults(kind: Spectral) -> ConfigLayer {
    match kind {
        Spectral::Lorentzian => ConfigLayer {
            gamma0: Some(1.0),
            lambda: Some(0.1),
            ..ConfigLayer::default()
        },
        Spectral::Ohmic => ConfigLayer {
            eta: Some(1.0 / 3.0),
            s: Some(1.0),
            omega_c: Some(1.0),
            ..ConfigLayer::default()
        },
        Spectral::Gaussian => ConfigLayer {
            omega_m: Some(1.5),
            delta: Some(0.2),
            ..ConfigLayer::default()
        },
        Spectral::Tabulated | Spectral::Zero => ConfigLayer::default(),
    }
}

impl ConfigLayer {
    fn without_recipe(mut self) -> Self {
        self.recipe = None;
        self
    }

    /// Keeps the shape but leaves its parameters to [`spectral_defaults`].
    fn without_spectral_params(self) -> Self {
        ConfigLayer {
            gamma0: None,
            lambda: None,
            eta: None,
            s: None,
            omega_c: None,
            omega_m: None,
            delta: None,
            ..self
        }
    }
}

/// A validated configuration with every field the scenario reads filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub model: Model,
    pub settings: ConfigLayer,
}

impl RunConfig {
    pub fn format(&self) -> Format {
        self.settings.format.unwrap_or_default()
    }

    pub fn out(&self) -> Option<&Path> {
        self.settings.out.as_deref()
    }

    /// `(N, n)` pairs: `--N/--n` win over `--pairs`.
    pub fn pairs(&self) -> Vec<PathPair> {
        match (self.settings.paths, &self.settings.pairs) {
            (Some(n_paths), _) => vec![PathPair::new(n_paths, self.settings.pi_shifts.unwrap_or(0))],
            (None, Some(list)) => list.clone(),
            (None, None) => Vec::new(),
        }
    }
}

pub fn missing(field: &str) -> CliError {
    CliError::config(format!("missing required field `{field}`"))
}

fn null_postselection(pair: PathPair) -> CliError {
    CliError::config(format!(
        "null post-selection: n = N/2 (N = {}, n = {}) interferes completely destructively, one obtains a null result",
        pair.paths, pair.pi_shifts
    ))
}

pub fn check_pair(pair: PathPair) -> CliResult<()> {
    if pair.paths == 0 {
        return Err(CliError::config("field `N`: need at least one path"));
    }
    if pair.pi_shifts > pair.paths {
        return Err(CliError::config(format!("field `n`: n = {} exceeds N = {}", pair.pi_shifts, pair.paths)));
    }
    if 2 * pair.pi_shifts == pair.paths {
        return Err(null_postselection(pair));
    }
    Ok(())
}

fn check_positive(field: &str, value: Option<f64>) -> CliResult<()> {
    match value {
        Some(v) if !(v > 0.0 && v.is_finite()) => Err(CliError::config(format!("field `{field}` must be positive, got {v}"))),
        _ => Ok(()),
    }
}

/// Stacks command line over file over recipe over defaults and validates the result.
pub fn resolve(scenario: Scenario, cli: ConfigLayer, file: Option<ConfigLayer>) -> CliResult<RunConfig> {
    let file = file.unwrap_or_default();
    if let Some(declared) = file.scenario {
        if declared != scenario {
            return Err(CliError::config(format!(
                "field `scenario`: config file is for `{}`, not `{}`",
                declared.name(),
                scenario.name()
            )));
        }
    }
    let user = cli.over(file);
    let recipe = user.recipe;
    if let Some(r) = recipe {
        if r.scenario() != scenario {
            return Err(CliError::config(format!(
                "field `recipe`: {r:?} belongs to `{}`, not `{}`",
                r.scenario().name(),
                scenario.name()
            )));
        }
    }
    let user = match recipe {
        Some(r) => user.over(recipe_layer(r)),
        None => user,
    };
    let model = match scenario {
        Scenario::DynamicsDiss => Model::Diss,
        Scenario::DynamicsDeph => Model::Deph,
        _ => user.model.unwrap_or(Model::Diss),
    };
    let stray = unused_keys(&user, scenario, model);
    if !stray.is_empty() {
        return Err(CliError::config(format!(
            "field(s) {} not used by scenario `{}`",
            stray.iter().map(|k| format!("`{k}`")).collect::<Vec<_>>().join(", "),
            scenario.name()
        )));
    }
    let user_sinc = user.sinc;
    let mut settings;
    if scenario == Scenario::Dicke {
        settings = user.over(scenario_defaults(scenario, model));
    } else {
        settings = user.over(scenario_defaults(scenario, model).without_spectral_params());
        settings.omega_q.get_or_insert(1.0);
        let kind = settings.spectral.expect("every spectral scenario has a default shape");
        settings = settings.over(spectral_defaults(kind));
    }
    if scenario == Scenario::Dicke && settings.qd.is_some() && user_sinc.is_some() {
        return Err(CliError::config("fields `sinc` and `qd` are mutually exclusive"));
    }
    if scenario == Scenario::Dicke && settings.qd.is_some() {
        settings.sinc = None;
    }
    let config = RunConfig { scenario, model, settings };
    validate(&config)?;
    Ok(config)
}

fn validate(config: &RunConfig) -> CliResult<()> {
    let s = &config.settings;
    for (field, value) in [
        ("gamma0", s.gamma0),
        ("lambda", s.lambda),
        ("omega-q", s.omega_q),
        ("eta", s.eta),
        ("omega-c", s.omega_c),
        ("delta", s.delta),
        ("omega-max", s.omega_max),
        ("tmax", s.tmax),
        ("dt", s.dt),
        ("output-dt", s.output_dt),
    ] {
        check_positive(field, value)?;
    }
    if let Some(t) = s.t {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(CliError::config(format!("field `t` must be non-negative, got {t}")));
        }
    }
    if let Some(temp) = s.temperature {
        if !(temp >= 0.0 && temp.is_finite()) {
            return Err(CliError::config(format!("field `temperature` must be non-negative, got {temp}")));
        }
    }
    if s.spectral == Some(Spectral::Tabulated) && s.points.is_none() {
        return Err(missing("points"));
    }
    if s.pi_shifts.is_some() && s.paths.is_none() && config.scenario != Scenario::Filter {
        return Err(missing("N"));
    }
    match config.scenario {
        Scenario::Filter => {
            let n = s.pi_shifts.unwrap_or(0);
            let counts = s.path_counts.as_deref().unwrap_or(&[]);
            if counts.is_empty() && s.measurements.as_deref().unwrap_or(&[]).is_empty() {
                return Err(missing("path-counts"));
            }
            for &n_paths in counts {
                check_pair(PathPair::new(n_paths, n))?;
            }
            if s.measurements.as_deref().unwrap_or(&[]).contains(&0) {
                return Err(CliError::config("field `measurements`: counts must be at least 1"));
            }
            check_frequency_grid(s)?;
        }
        Scenario::Perturbation if s.mode == Some(PerturbationMode::Filter) => {
            let phases = s.phases.as_ref().ok_or_else(|| missing("phases"))?;
            let cfg = zenotraj::InterferometerConfig::with_phases(phases.clone())
                .map_err(|e| CliError::config(format!("field `phases`: {e}")))?;
            if cfg.is_null() {
                return Err(CliError::config(
                    "null post-selection: the phase list interferes completely destructively, one obtains a null result",
                ));
            }
            check_frequency_grid(s)?;
        }
        _ => {
            let list = config.pairs();
            if list.is_empty() {
                return Err(missing("pairs"));
            }
            for pair in list {
                check_pair(pair)?;
            }
        }
    }
    if config.scenario == Scenario::Dicke {
        if let Some(x) = s.sinc {
            if !(zenotraj::dicke::SINC_MIN..=1.0).contains(&x) {
                return Err(CliError::config(format!(
                    "field `sinc`: {x} outside the range [{}, 1] of sinc",
                    zenotraj::dicke::SINC_MIN
                )));
            }
        }
        if let Some(qd) = s.qd {
            if !(qd >= 0.0 && qd.is_finite()) {
                return Err(CliError::config(format!("field `qd` must be non-negative, got {qd}")));
            }
        }
    }
    if config.scenario == Scenario::Perturbation {
        if s.epsilon.as_deref().unwrap_or(&[]).iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
            return Err(CliError::config("field `epsilon`: values must be finite and non-negative"));
        }
    }
    Ok(())
}

fn check_frequency_grid(s: &ConfigLayer) -> CliResult<()> {
    let (lo, hi) = (s.w_min.ok_or_else(|| missing("w-min"))?, s.w_max.ok_or_else(|| missing("w-max"))?);
    let points = s.w_points.ok_or_else(|| missing("w-points"))?;
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(CliError::config(format!("fields `w-min`, `w-max`: need w-min < w-max, got [{lo}, {hi}]")));
    }
    if points < 2 {
        return Err(CliError::config(format!("field `w-points`: need at least 2, got {points}")));
    }
    Ok(())
}
