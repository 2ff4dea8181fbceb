//! Flag parsing and resolution: explicit flags override `--config` file
//! entries, which override built-in defaults.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::hilbert::default_cutoff;
use crate::measurement::{DEFAULT_OVERLAP_TOL, DEFAULT_PACKET_THRESHOLD};
use crate::mirror_model::{DEFAULT_REVIVAL_TOL, DEFAULT_SUPPRESSION_TOL};

pub const DEFAULT_SAMPLES: usize = 512;
pub const DEFAULT_DRAWS: usize = 100_000;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    Visibility,
    EvolveCheck,
    Collapse,
    PacketCheck,
    Discriminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

/// Raw command-line flags. Every field is optional so that unset flags can
/// fall back to the config file.
#[derive(Args, Clone, Debug, Default)]
pub struct Flags {
    /// Displacement parameter k (units of the ground-state width)
    #[arg(long)]
    pub k: Option<f64>,
    /// Mirror angular frequency
    #[arg(long = "omega-m")]
    pub omega_m: Option<f64>,
    /// Photon angular frequency
    #[arg(long = "omega-p")]
    pub omega_p: Option<f64>,
    /// Fock cutoff (defaults to |a|^2 + 6|a| + 10 for the largest displacement a)
    #[arg(long = "n-max")]
    pub n_max: Option<usize>,
    /// Dephasing rate, in units of 1/T_m unless --gamma-absolute is set
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Read --gamma in absolute inverse-time units
    #[arg(long = "gamma-absolute")]
    pub gamma_absolute: bool,
    /// Grid end in units of T_m (grid starts at 0)
    #[arg(long)]
    pub periods: Option<f64>,
    /// Grid start in raw time units
    #[arg(long = "t-start")]
    pub t_start: Option<f64>,
    /// Grid end in raw time units (overrides --periods)
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,
    /// Number of grid points, endpoints included
    #[arg(long)]
    pub samples: Option<usize>,
    /// Single evaluation time in units of T_m
    #[arg(long = "t-over-tm")]
    pub t_over_tm: Option<f64>,
    /// Single evaluation time in raw units (overrides --t-over-tm)
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of selfdecoherence draws
    #[arg(long)]
    pub draws: Option<usize>,
    /// Born weights for the two arms, e.g. "0.36,0.64"
    #[arg(long)]
    pub weights: Option<String>,
    /// Coherent displacement, e.g. "5" or "5+5i"
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Cat state: superposition of +alpha and -alpha
    #[arg(long, allow_hyphen_values = true)]
    pub cat: Option<String>,
    /// Wave-packet ratio threshold
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long = "overlap-tol")]
    pub overlap_tol: Option<f64>,
    #[arg(long = "revival-tol")]
    pub revival_tol: Option<f64>,
    #[arg(long = "suppression-tol")]
    pub suppression_tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Output file (standard output when omitted)
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// key = value file; keys are long flag names
    #[arg(long)]
    pub config: Option<PathBuf>,
}

const KNOWN_KEYS: &[&str] = &[
    "k",
    "omega-m",
    "omega-p",
    "n-max",
    "gamma",
    "gamma-absolute",
    "periods",
    "t-start",
    "t-end",
    "samples",
    "t-over-tm",
    "t",
    "seed",
    "draws",
    "weights",
    "alpha",
    "cat",
    "threshold",
    "overlap-tol",
    "revival-tol",
    "suppression-tol",
    "format",
    "output",
];

/// Parsed `key = value` config file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key = value", lineno + 1))?;
            let key = key.trim().trim_start_matches("--").replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(format!("config line {}: unknown key '{key}'", lineno + 1));
            }
            entries.insert(key, value.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Self::parse(&text)
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, String>
    where
        T::Err: Display,
    {
        self.entries
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| format!("config key '{key}': {e}"))
            })
            .transpose()
    }
}

/// Fully resolved run configuration. Serialized verbatim into every JSON
/// report so a result can be traced back to its inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandName,
    pub k: f64,
    pub omega_m: f64,
    pub omega_p: f64,
    pub n_max: usize,
    /// As given on the command line; see `gamma_absolute`.
    pub gamma: f64,
    pub gamma_absolute: bool,
    pub t_start: f64,
    pub t_end: f64,
    pub samples: usize,
    pub t: f64,
    pub seed: u64,
    pub draws: usize,
    pub weights: Option<Vec<f64>>,
    pub alpha: Option<[f64; 2]>,
    pub cat: Option<[f64; 2]>,
    pub threshold: f64,
    pub overlap_tol: f64,
    pub revival_tol: f64,
    pub suppression_tol: f64,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.omega_m
    }

    /// Dephasing rate in absolute inverse-time units.
    pub fn gamma_rate(&self) -> f64 {
        if self.gamma_absolute {
            self.gamma
        } else {
            self.gamma / self.period()
        }
    }

    pub fn resolve(command: CommandName, flags: &Flags) -> Result<Self, String> {
        let file = match &flags.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        macro_rules! pick {
            ($field:ident, $key:literal) => {
                match flags.$field.clone() {
                    Some(v) => Some(v),
                    None => file.get($key)?,
                }
            };
        }

        let k: f64 = pick!(k, "k").unwrap_or(1.0);
        let omega_m: f64 = pick!(omega_m, "omega-m").unwrap_or(1.0);
        if !(omega_m > 0.0) || !omega_m.is_finite() {
            return Err("--omega-m must be positive".into());
        }
        if !(k >= 0.0) || !k.is_finite() {
            return Err("--k must be non-negative".into());
        }
        let period = std::f64::consts::TAU / omega_m;

        let alpha = pick!(alpha, "alpha").map(|s: String| parse_complex(&s)).transpose()?;
        let cat = pick!(cat, "cat").map(|s: String| parse_complex(&s)).transpose()?;
        let default_n_max = match command {
            CommandName::PacketCheck => {
                let a = alpha.or(cat).map(|[re, im]| re.hypot(im)).unwrap_or(0.0);
                default_cutoff(a)
            }
            _ => default_cutoff(2.0 * k),
        };

        let gamma_absolute = flags.gamma_absolute || file.get("gamma-absolute")?.unwrap_or(false);
        let t_start: f64 = pick!(t_start, "t-start").unwrap_or(0.0);
        let t_end: f64 = match pick!(t_end, "t-end") {
            Some(t) => t,
            None => pick!(periods, "periods").unwrap_or(1.0) * period,
        };
        let t: f64 = match pick!(t, "t") {
            Some(t) => t,
            None => pick!(t_over_tm, "t-over-tm").unwrap_or(0.5) * period,
        };
        let weights = pick!(weights, "weights")
            .map(|s: String| parse_list(&s))
            .transpose()?;
        let default_format = match command {
            CommandName::Visibility => OutputFormat::Csv,
            _ => OutputFormat::Json,
        };

        Ok(Self {
            command,
            k,
            omega_m,
            omega_p: pick!(omega_p, "omega-p").unwrap_or(0.0),
            n_max: pick!(n_max, "n-max").unwrap_or(default_n_max),
            gamma: pick!(gamma, "gamma").unwrap_or(0.0),
            gamma_absolute,
            t_start,
            t_end,
            samples: pick!(samples, "samples").unwrap_or(DEFAULT_SAMPLES),
            t,
            seed: pick!(seed, "seed").unwrap_or(DEFAULT_SEED),
            draws: pick!(draws, "draws").unwrap_or(DEFAULT_DRAWS),
            weights,
            alpha,
            cat,
            threshold: pick!(threshold, "threshold").unwrap_or(DEFAULT_PACKET_THRESHOLD),
            overlap_tol: pick!(overlap_tol, "overlap-tol").unwrap_or(DEFAULT_OVERLAP_TOL),
            revival_tol: pick!(revival_tol, "revival-tol").unwrap_or(DEFAULT_REVIVAL_TOL),
            suppression_tol: pick!(suppression_tol, "suppression-tol")
                .unwrap_or(DEFAULT_SUPPRESSION_TOL),
            format: pick!(format, "format").unwrap_or(default_format),
            output: pick!(output, "output"),
        })
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| format!("malformed number '{}' in list '{s}'", x.trim()))
        })
        .collect()
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` (also with `j`) into `[re, im]`.
pub fn parse_complex(s: &str) -> Result<[f64; 2], String> {
    let err = || format!("malformed complex number '{s}'");
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(err());
    }
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return t.parse::<f64>().map(|re| [re, 0.0]).map_err(|_| err());
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let re: f64 = re.parse().map_err(|_| err())?;
    let im: f64 = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse().map_err(|_| err())?,
    };
    if !re.is_finite() || !im.is_finite() {
        return Err(err());
    }
    Ok([re, im])
}
