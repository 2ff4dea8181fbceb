//! `mirrorsim` command-line front end.
//!
//! Exit codes: 0 success (or relative-decoherence verdict), 1 tolerance
//! failure, 2 usage or precondition error, 3 Fock cutoff too small,
//! 4 pointer packets interfere, 5 absolute-decoherence verdict,
//! 6 inconclusive verdict.

mod config;
mod output;

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand};
use num_complex::Complex;
use serde_json::{json, Value};

pub use config::{parse_complex, CommandName, ConfigFile, Flags, OutputFormat, RunConfig};
pub use output::{sig12, CURVE_HEADER};

use crate::error::Error;
use crate::hilbert::{coherent_state, quadrature_observables};
use crate::measurement::{
    chi_square, is_wave_packet, premeasure, wave_packet_ratio, Selfdecoherence,
};
use crate::mirror_model::{
    arm_basis, discriminate, initial_state, joint_state, pointer_set, visibility_curve,
    VerdictLabel,
};
use crate::propagator::{build_hamiltonian, Propagator};
use crate::{ModelParams, StateVector};

/// Largest accepted `1 - fidelity` between the closed-form and the
/// Hamiltonian-evolved state.
pub const EVOLVE_CHECK_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(i32)]
pub enum ExitCode {
    Success = 0,
    ToleranceFailure = 1,
    Usage = 2,
    Cutoff = 3,
    Interference = 4,
    AbsoluteDecoherence = 5,
    Inconclusive = 6,
}

impl ExitCode {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "mirrorsim",
    version,
    about = "Single photon + movable mirror interferometer simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Visibility, phase, mirror purity and overlap over a time grid
    Visibility(Flags),
    /// Compare the closed-form state with Hamiltonian evolution
    EvolveCheck(Flags),
    /// Born-weighted selfdecoherence sampling at one time
    Collapse(Flags),
    /// Wave-packet ratios of a coherent or cat state
    PacketCheck(Flags),
    /// Absolute-vs-relative decoherence verdict
    Discriminate(Flags),
}

struct Failure {
    code: ExitCode,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: ExitCode::Usage,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CutoffTooSmall { .. } => ExitCode::Cutoff,
            Error::PacketsInterfere { .. } => ExitCode::Interference,
            _ => ExitCode::Usage,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// A finished command: report text plus the exit code it maps to.
struct Report {
    body: String,
    code: ExitCode,
}

/// Runs the CLI with `args` (including the program name) and returns the
/// process exit code. Reports go to `out` unless `--output` names a file.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    ExitCode::Success.code()
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    ExitCode::Usage.code()
                }
            };
        }
    };
    let (name, flags) = match cli.command {
        Command::Visibility(f) => (CommandName::Visibility, f),
        Command::EvolveCheck(f) => (CommandName::EvolveCheck, f),
        Command::Collapse(f) => (CommandName::Collapse, f),
        Command::PacketCheck(f) => (CommandName::PacketCheck, f),
        Command::Discriminate(f) => (CommandName::Discriminate, f),
    };
    match execute(name, &flags) {
        Ok((config, report)) => {
            let written = match &config.output {
                Some(path) => std::fs::write(path, report.body.as_bytes())
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => out
                    .write_all(report.body.as_bytes())
                    .map_err(|e| format!("cannot write output: {e}")),
            };
            if let Err(msg) = written {
                let _ = writeln!(err, "error: {msg}");
                return ExitCode::Usage.code();
            }
            report.code.code()
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code.code()
        }
    }
}

fn execute(name: CommandName, flags: &Flags) -> Result<(RunConfig, Report), Failure> {
    let config = RunConfig::resolve(name, flags).map_err(Failure::usage)?;
    let report = match name {
        CommandName::Visibility => cmd_visibility(&config)?,
        CommandName::EvolveCheck => cmd_evolve_check(&config)?,
        CommandName::Collapse => cmd_collapse(&config)?,
        CommandName::PacketCheck => cmd_packet_check(&config)?,
        CommandName::Discriminate => cmd_discriminate(&config)?,
    };
    Ok((config, report))
}

fn model_params(config: &RunConfig) -> Result<ModelParams, Failure> {
    let params = ModelParams::new(config.k, config.omega_m)?
        .with_omega_p(config.omega_p)
        .with_n_max(config.n_max)?
        .with_gamma(config.gamma_rate())?;
    Ok(params)
}

fn to_json(config: &RunConfig, mut results: Value) -> String {
    let obj = results.as_object_mut().expect("results are a JSON object");
    obj.insert(
        "config".into(),
        serde_json::to_value(config).expect("config serializes"),
    );
    let mut s = serde_json::to_string_pretty(&results).expect("report serializes");
    s.push('\n');
    s
}

fn cmd_visibility(config: &RunConfig) -> Result<Report, Failure> {
    let params = model_params(config)?;
    let curve = visibility_curve(&params, config.t_start, config.t_end, config.samples)?;
    let body = match config.format {
        OutputFormat::Csv => output::curve_csv(&curve),
        OutputFormat::Json => to_json(
            config,
            json!({
                "times": curve.times,
                "visibility": curve.visibility,
                "phase": curve.phase,
                "mirror_purity": curve.mirror_purity,
                "overlap_re": curve.overlap.iter().map(|z| z.re).collect::<Vec<_>>(),
                "overlap_im": curve.overlap.iter().map(|z| z.im).collect::<Vec<_>>(),
            }),
        ),
    };
    Ok(Report {
        body,
        code: ExitCode::Success,
    })
}

fn cmd_evolve_check(config: &RunConfig) -> Result<Report, Failure> {
    let params = model_params(config)?;
    let times = crate::mirror_model::time_grid(config.t_start, config.t_end, config.samples)?;
    let propagator = Propagator::new(&build_hamiltonian(&params.hamiltonian_spec()?)?)?;
    let psi0 = initial_state(&params);
    let mut defect: f64 = 0.0;
    for &t in &times {
        let analytic = joint_state(&params, t)?;
        let evolved = propagator.evolve(t, &psi0)?;
        defect = defect.max(1.0 - analytic.fidelity(&evolved)?);
    }
    let defect = defect.max(0.0);
    let code = if defect <= EVOLVE_CHECK_TOL {
        ExitCode::Success
    } else {
        ExitCode::ToleranceFailure
    };
    let body = match config.format {
        OutputFormat::Csv => output::table_csv(
            &["points", "defect", "tolerance"],
            &[vec![
                times.len().to_string(),
                sig12(defect),
                sig12(EVOLVE_CHECK_TOL),
            ]],
        ),
        OutputFormat::Json => to_json(
            config,
            json!({
                "points": times.len(),
                "defect": defect,
                "tolerance": EVOLVE_CHECK_TOL,
            }),
        ),
    };
    Ok(Report { body, code })
}

fn cmd_collapse(config: &RunConfig) -> Result<Report, Failure> {
    if config.draws < 1 {
        return Err(Failure::usage("--draws must be at least 1"));
    }
    let params = model_params(config)?;
    let pointers = pointer_set(&params, config.t)?;
    let objects = arm_basis();
    let correlated = match &config.weights {
        None => joint_state(&params, config.t)?,
        Some(w) => {
            if w.len() != 2 || w.iter().any(|x| !(*x >= 0.0)) {
                return Err(Failure::usage(
                    "--weights needs two non-negative numbers",
                ));
            }
            if (w.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(Failure::usage("--weights must sum to 1"));
            }
            let coeffs: Vec<Complex<f64>> = w.iter().map(|x| Complex::new(x.sqrt(), 0.0)).collect();
            premeasure(&coeffs, &objects, &pointers, 0)?
        }
    };
    let sampler = Selfdecoherence::new(&correlated, &objects, &pointers, config.overlap_tol)?;
    let weights = sampler.weights().to_vec();
    let counts = sampler.sample_counts(config.draws, config.seed);
    let frequencies: Vec<f64> = counts
        .iter()
        .map(|c| *c as f64 / config.draws as f64)
        .collect();
    let chi2 = chi_square(&counts, &weights);
    let body = match config.format {
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = (0..weights.len())
                .map(|i| {
                    vec![
                        i.to_string(),
                        sig12(weights[i]),
                        counts[i].to_string(),
                        sig12(frequencies[i]),
                    ]
                })
                .collect();
            output::table_csv(&["branch", "weight", "count", "frequency"], &rows)
        }
        OutputFormat::Json => to_json(
            config,
            json!({
                "t": config.t,
                "weights": weights,
                "counts": counts,
                "frequencies": frequencies,
                "chi_square": chi2,
            }),
        ),
    };
    Ok(Report {
        body,
        code: ExitCode::Success,
    })
}

fn packet_state(config: &RunConfig) -> Result<StateVector, Failure> {
    let to_c = |[re, im]: [f64; 2]| Complex::new(re, im);
    match (config.alpha, config.cat) {
        (Some(a), None) => Ok(coherent_state(to_c(a), config.n_max)?),
        (None, Some(a)) => {
            let plus = coherent_state(to_c(a), config.n_max)?;
            let minus = coherent_state(-to_c(a), config.n_max)?;
            let amps = plus
                .amps()
                .iter()
                .zip(minus.amps())
                .map(|(x, y)| x + y)
                .collect();
            Ok(StateVector::normalized(plus.dims().to_vec(), amps)?)
        }
        (Some(_), Some(_)) => Err(Failure::usage("give either --alpha or --cat, not both")),
        (None, None) => Err(Failure::usage("packet-check needs --alpha or --cat")),
    }
}

fn cmd_packet_check(config: &RunConfig) -> Result<Report, Failure> {
    if !(config.threshold > 1.0) {
        return Err(Failure::usage("--threshold must exceed 1"));
    }
    let psi = packet_state(config)?;
    let (x, p) = quadrature_observables(config.n_max)?;
    let mut rows = Vec::new();
    let mut table = Vec::new();
    for (name, op) in [("X", &x), ("P", &p)] {
        let (mean, deviation) = crate::hilbert::moments(&psi, op)?;
        let ratio = wave_packet_ratio(&psi, op)?;
        let passes = is_wave_packet(&psi, std::slice::from_ref(op), config.threshold)?;
        rows.push(vec![
            name.to_string(),
            sig12(mean),
            sig12(deviation),
            sig12(ratio),
            passes.to_string(),
        ]);
        table.push(json!({
            "observable": name,
            "mean": mean,
            "deviation": deviation,
            // JSON has no infinity
            "ratio": if ratio.is_finite() { json!(ratio) } else { json!(null) },
            "passes": passes,
        }));
    }
    let verdict = is_wave_packet(&psi, &[x, p], config.threshold)?;
    let body = match config.format {
        OutputFormat::Csv => output::table_csv(
            &["observable", "mean", "deviation", "ratio", "passes"],
            &rows,
        ),
        OutputFormat::Json => to_json(
            config,
            json!({
                "observables": table,
                "threshold": config.threshold,
                "is_wave_packet": verdict,
            }),
        ),
    };
    Ok(Report {
        body,
        code: ExitCode::Success,
    })
}

fn cmd_discriminate(config: &RunConfig) -> Result<Report, Failure> {
    let params = model_params(config)?;
    let verdict = discriminate(&params, config.revival_tol, config.suppression_tol)?;
    let code = match verdict.label {
        VerdictLabel::RelativeDecoherence => ExitCode::Success,
        VerdictLabel::AbsoluteDecoherence => ExitCode::AbsoluteDecoherence,
        VerdictLabel::Inconclusive => ExitCode::Inconclusive,
    };
    let body = match config.format {
        OutputFormat::Csv => output::table_csv(
            &[
                "verdict",
                "mid_visibility",
                "revival_visibility",
                "revival_tol",
                "suppression_tol",
            ],
            &[vec![
                verdict.label.to_string(),
                sig12(verdict.mid_visibility),
                sig12(verdict.revival_visibility),
                sig12(config.revival_tol),
                sig12(config.suppression_tol),
            ]],
        ),
        OutputFormat::Json => to_json(
            config,
            json!({
                "verdict": verdict.label,
                "mid_visibility": verdict.mid_visibility,
                "revival_visibility": verdict.revival_visibility,
                "tolerances": {
                    "revival_tol": config.revival_tol,
                    "suppression_tol": config.suppression_tol,
                },
            }),
        ),
    };
    Ok(Report { body, code })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["mirrorsim"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let (code, _, err) = run_capture(&["visibility", "--bogus"]);
        assert_eq!(code, 2);
        assert!(!err.is_empty());
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("visibility"));
    }

    #[test]
    fn malformed_state_spec() {
        assert_eq!(run_capture(&["packet-check", "--alpha", "x+"]).0, 2);
        assert_eq!(run_capture(&["packet-check"]).0, 2);
        assert_eq!(run_capture(&["packet-check", "--alpha", "1", "--cat", "1"]).0, 2);
    }
}
