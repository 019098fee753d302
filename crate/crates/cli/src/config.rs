//! Line-oriented `key = value [unit]` configuration files.
//!
//! ```text
//! # node
//! g_mc      = 130 MHz
//! kappa_d   = 1 MHz
//! t_final   = 12 ns
//! # link
//! scenario  = metro-b
//! alpha     = 0.2 dB_per_km
//! span      = 10 km
//! eta_conv  = none
//! ```
//!
//! Keys are applied in file order, so `scenario` should precede any
//! per-field scenario overrides. Physical quantities require a unit;
//! dimensionless values must not carry one.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use magrep_core::dynamics::{HamiltonianModel, LindbladParams};
use magrep_core::network::{NoiseModel, ScenarioParams, SweepAxis};

use crate::CliError;

/// Everything a run depends on apart from the command and output location.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub scenario: ScenarioParams,
    pub hops: usize,
    pub noise: NoiseModel,
    pub lindblad: LindbladParams,
    pub model: HamiltonianModel,
    /// Approximate number of rows in the concurrence trace.
    pub samples: usize,
    /// Concurrence trace window in seconds; `None` uses `3 pi / (4 g_mc)`.
    pub t_final: Option<f64>,
    pub seed: u64,
    pub pclick_override: Option<f64>,
    /// Switch off every Lindblad dissipation channel.
    pub ideal: bool,
    pub sweep_axis: Option<SweepAxis>,
    pub sweep_values: Vec<f64>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            scenario: ScenarioParams::builtin("chip-a").expect("built-in"),
            hops: 4,
            noise: NoiseModel::default(),
            lindblad: LindbladParams::default(),
            model: HamiltonianModel::Rwa,
            samples: 400,
            t_final: None,
            seed: 0,
            pclick_override: None,
            ideal: false,
            sweep_axis: None,
            sweep_values: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Unit {
    Frequency,
    Time,
    Length,
    Attenuation,
}

impl Unit {
    fn factor(self, suffix: &str) -> Option<f64> {
        let s = suffix.to_ascii_lowercase();
        let two_pi = 2.0 * PI;
        match self {
            Unit::Frequency => match s.as_str() {
                "hz" => Some(two_pi),
                "khz" => Some(two_pi * 1e3),
                "mhz" => Some(two_pi * 1e6),
                "ghz" => Some(two_pi * 1e9),
                "rad_per_s" => Some(1.0),
                _ => None,
            },
            Unit::Time => match s.as_str() {
                "s" => Some(1.0),
                "ms" => Some(1e-3),
                "us" => Some(1e-6),
                "ns" => Some(1e-9),
                "ps" => Some(1e-12),
                _ => None,
            },
            Unit::Length => match s.as_str() {
                "km" => Some(1.0),
                "m" => Some(1e-3),
                "cm" => Some(1e-5),
                _ => None,
            },
            Unit::Attenuation => match s.as_str() {
                "db_per_km" => Some(1.0),
                "db_per_m" => Some(1e3),
                "db_per_cm" => Some(1e5),
                _ => None,
            },
        }
    }

    fn expected(self) -> &'static str {
        match self {
            Unit::Frequency => "Hz, kHz, MHz, GHz or rad_per_s",
            Unit::Time => "s, ms, us, ns or ps",
            Unit::Length => "km, m or cm",
            Unit::Attenuation => "dB_per_km, dB_per_m or dB_per_cm",
        }
    }
}

fn number(token: &str) -> Result<f64, String> {
    token.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| format!("`{token}` is not a finite number"))
}

fn quantity(key: &str, value: &str, unit: Unit) -> Result<f64, String> {
    let tokens: Vec<&str> = value.split_whitespace().collect();
    match tokens.as_slice() {
        [_] => Err(format!("missing unit suffix for `{key}` (expected {})", unit.expected())),
        [v, u] => {
            let factor = unit
                .factor(u)
                .ok_or_else(|| format!("unit `{u}` is not valid for `{key}` (expected {})", unit.expected()))?;
            Ok(number(v)? * factor)
        }
        _ => Err(format!("`{key}` expects `<number> <unit>`, got `{value}`")),
    }
}

fn plain(key: &str, value: &str) -> Result<f64, String> {
    let tokens: Vec<&str> = value.split_whitespace().collect();
    match tokens.as_slice() {
        [v] => number(v),
        _ => Err(format!("`{key}` is dimensionless and takes a single number, got `{value}`")),
    }
}

fn optional(key: &str, value: &str) -> Result<Option<f64>, String> {
    if value.eq_ignore_ascii_case("none") {
        Ok(None)
    } else {
        plain(key, value).map(Some)
    }
}

fn integer<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value.parse::<T>().map_err(|_| format!("`{key}` expects a non-negative integer, got `{value}`"))
}

fn boolean(key: &str, value: &str) -> Result<bool, String> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("`{key}` expects true or false, got `{value}`")),
    }
}

fn apply(settings: &mut Settings, key: &str, value: &str) -> Result<(), String> {
    let s = settings;
    let sc = &mut s.scenario;
    let lp = &mut s.lindblad;
    match key {
        "scenario" => *sc = ScenarioParams::builtin(value).map_err(|e| e.to_string())?,
        "label" => sc.name = value.to_string(),
        "alpha" => sc.alpha_db_per_km = quantity(key, value, Unit::Attenuation)?,
        "span" => sc.span_km = quantity(key, value, Unit::Length)?,
        "eta_read" => sc.eta_read = plain(key, value)?,
        "eta_conv" => sc.eta_conv = optional(key, value)?,
        "eta_extra" => sc.eta_extra = plain(key, value)?,
        "eta_det" => sc.eta_det = plain(key, value)?,
        "eta_col" => sc.eta_col = plain(key, value)?,
        "p_bsa" => sc.p_bsa = plain(key, value)?,
        "m_mux" => sc.m_mux = integer(key, value)?,
        "hops" => s.hops = integer(key, value)?,
        "p_link" => s.noise.p_link = plain(key, value)?,
        "q_swap" => s.noise.q_swap = plain(key, value)?,
        "omega_c" => lp.omega_c = quantity(key, value, Unit::Frequency)?,
        "omega_m" => lp.omega_m = quantity(key, value, Unit::Frequency)?,
        "g_mc" => lp.g_mc = quantity(key, value, Unit::Frequency)?,
        "kappa_d" => lp.kappa_d = quantity(key, value, Unit::Frequency)?,
        "gamma_d" => lp.gamma_d = quantity(key, value, Unit::Frequency)?,
        "kappa_phi" => lp.kappa_phi = quantity(key, value, Unit::Frequency)?,
        "gamma_phi" => lp.gamma_phi = quantity(key, value, Unit::Frequency)?,
        "dim_c" => lp.dim_c = integer(key, value)?,
        "dim_m" => lp.dim_m = integer(key, value)?,
        "model" => {
            s.model = match value.to_ascii_lowercase().as_str() {
                "rwa" => HamiltonianModel::Rwa,
                "full" => HamiltonianModel::Full,
                _ => return Err(format!("`model` expects rwa or full, got `{value}`")),
            }
        }
        "samples" => s.samples = integer(key, value)?,
        "t_final" => {
            s.t_final = if value.eq_ignore_ascii_case("auto") { None } else { Some(quantity(key, value, Unit::Time)?) }
        }
        "seed" => s.seed = integer(key, value)?,
        "pclick_override" => s.pclick_override = optional(key, value)?,
        "ideal" => s.ideal = boolean(key, value)?,
        "sweep_axis" => s.sweep_axis = Some(value.parse::<SweepAxis>()?),
        "sweep_values" => s.sweep_values = value.split(',').map(|v| plain(key, v.trim())).collect::<Result<_, _>>()?,
        _ => return Err(format!("unknown key `{key}`")),
    }
    Ok(())
}

/// Parses configuration text on top of [`Settings::default`].
pub fn parse_config(text: &str) -> Result<Settings, CliError> {
    let mut settings = Settings::default();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| CliError::Config(format!("line {line_no}: {msg}"));
        let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        if value.is_empty() {
            return Err(err(format!("`{key}` has no value")));
        }
        apply(&mut settings, &key, value).map_err(err)?;
    }
    Ok(settings)
}

pub fn load_config(path: &Path) -> Result<Settings, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Scenario fields in config syntax, in canonical units.
pub fn scenario_to_config(s: &ScenarioParams) -> String {
    let mut out = String::new();
    let opt = |v: Option<f64>| v.map_or("none".to_string(), |x| format!("{x:?}"));
    let _ = writeln!(out, "label = {}", s.name);
    let _ = writeln!(out, "alpha = {:?} dB_per_km", s.alpha_db_per_km);
    let _ = writeln!(out, "span = {:?} km", s.span_km);
    let _ = writeln!(out, "eta_read = {:?}", s.eta_read);
    let _ = writeln!(out, "eta_conv = {}", opt(s.eta_conv));
    let _ = writeln!(out, "eta_extra = {:?}", s.eta_extra);
    let _ = writeln!(out, "eta_det = {:?}", s.eta_det);
    let _ = writeln!(out, "eta_col = {:?}", s.eta_col);
    let _ = writeln!(out, "p_bsa = {:?}", s.p_bsa);
    let _ = writeln!(out, "m_mux = {}", s.m_mux);
    out
}

/// Full settings in config syntax; parsing the result reproduces `s`.
pub fn settings_to_config(s: &Settings) -> String {
    let mut out = scenario_to_config(&s.scenario);
    let lp = &s.lindblad;
    let _ = writeln!(out, "hops = {}", s.hops);
    let _ = writeln!(out, "p_link = {:?}", s.noise.p_link);
    let _ = writeln!(out, "q_swap = {:?}", s.noise.q_swap);
    for (k, v) in [
        ("omega_c", lp.omega_c),
        ("omega_m", lp.omega_m),
        ("g_mc", lp.g_mc),
        ("kappa_d", lp.kappa_d),
        ("gamma_d", lp.gamma_d),
        ("kappa_phi", lp.kappa_phi),
        ("gamma_phi", lp.gamma_phi),
    ] {
        let _ = writeln!(out, "{k} = {v:?} rad_per_s");
    }
    let _ = writeln!(out, "dim_c = {}", lp.dim_c);
    let _ = writeln!(out, "dim_m = {}", lp.dim_m);
    let model = match s.model {
        HamiltonianModel::Rwa => "rwa",
        HamiltonianModel::Full => "full",
    };
    let _ = writeln!(out, "model = {model}");
    let _ = writeln!(out, "samples = {}", s.samples);
    match s.t_final {
        Some(t) => writeln!(out, "t_final = {t:?} s"),
        None => writeln!(out, "t_final = auto"),
    }
    .expect("writing to a String");
    let _ = writeln!(out, "seed = {}", s.seed);
    let _ = writeln!(out, "pclick_override = {}", s.pclick_override.map_or("none".to_string(), |x| format!("{x:?}")));
    let _ = writeln!(out, "ideal = {}", s.ideal);
    if let Some(axis) = s.sweep_axis {
        let _ = writeln!(out, "sweep_axis = {axis}");
    }
    if !s.sweep_values.is_empty() {
        let vals: Vec<String> = s.sweep_values.iter().map(|v| format!("{v:?}")).collect();
        let _ = writeln!(out, "sweep_values = {}", vals.join(", "));
    }
    out
}
