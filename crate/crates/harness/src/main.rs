use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use betaens::ensembles::{a_beta, sigma2_beta};
use betaens::ldp::rate_function;
use betaens::modgauss::{clt_tail, kolmogorov_bound_constant, llt_value, mdp_tail, zone_control_fit, ModGaussParams};
use betaens::partition::{cgf, log_partition, log_partition_complex};
use betaens::sampler::mcmc::default_burn_in;
use betaens::sampler::{has_exact_sampler, replicate_map, sample_exact, sample_mcmc};
use betaens::{BetaParam, ConfigurationSample, EnsembleSpec};
use betaens_harness::config::parse_spec;
use betaens_harness::verify::{all_passed, render_table, verify_suite, VerifyOptions};
use betaens_harness::{run_experiment, HarnessError, RawConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

#[derive(Parser)]
#[command(name = "betaens", version, about = "Exact and Monte Carlo tools for the log-density of beta-ensembles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct EnsembleArgs {
    #[arg(long, value_parser = ["hermite", "laguerre", "jacobi", "cauchy", "circular", "circular-jacobi"])]
    ensemble: String,
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    #[arg(long, default_value_t = 1.0)]
    kappa1: f64,
    #[arg(long, default_value_t = 1.0)]
    kappa2: f64,
    #[arg(long, default_value_t = 1.0)]
    d: f64,
}

impl EnsembleArgs {
    fn spec(&self) -> Result<EnsembleSpec, HarnessError> {
        parse_spec(&self.ensemble, self.theta, self.kappa1, self.kappa2, self.d)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PredictKind {
    Clt,
    Mdp,
    Llt,
    Kolmogorov,
}

#[derive(Subcommand)]
enum Command {
    /// log Z_n(β) from the closed form.
    Partition {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
        /// Complex β = RE + i·IM (overrides --beta).
        #[arg(long, num_args = 2, value_names = ["RE", "IM"], allow_negative_numbers = true)]
        complex: Option<Vec<f64>>,
        #[arg(long)]
        format: Option<Format>,
    },
    /// Exact log E[exp(z ℒ_n)].
    Cgf {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
        #[arg(long, allow_negative_numbers = true, conflicts_with = "z")]
        t: Option<f64>,
        #[arg(long, num_args = 2, value_names = ["RE", "IM"], allow_negative_numbers = true)]
        z: Option<Vec<f64>>,
        #[arg(long)]
        format: Option<Format>,
    },
    /// Rate function Λ* on a grid of x values (CSV `x,rate,argmax_t`).
    Rate {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
        /// Explicit comma-separated x values.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Option<Vec<f64>>,
        #[arg(long, allow_negative_numbers = true)]
        x_min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        x_max: Option<f64>,
        #[arg(long, default_value_t = 41)]
        points: usize,
        #[arg(long)]
        format: Option<Format>,
    },
    /// Limit-theorem predictions as JSON.
    Predict {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
        #[arg(long, value_enum)]
        kind: PredictKind,
        /// Threshold: y for clt, x for mdp and llt.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        x: f64,
        /// Interval (a, b) for llt.
        #[arg(long, default_value_t = -0.5, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        b: f64,
    },
    /// Draw configurations.
    Sample {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        replicas: u64,
        /// Total Metropolis sweeps for ensembles without a matrix model.
        #[arg(long)]
        steps: Option<u64>,
        #[arg(long)]
        format: Option<Format>,
    },
    /// Monte Carlo experiment with an exact-prediction report.
    Experiment {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_parser = ["hermite", "laguerre", "jacobi", "cauchy", "circular", "circular-jacobi"])]
        ensemble: Option<String>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        kappa1: Option<f64>,
        #[arg(long)]
        kappa2: Option<f64>,
        #[arg(long)]
        d: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        replicas: Option<u64>,
        #[arg(long)]
        statistic: Option<String>,
        /// Comma-separated check names.
        #[arg(long)]
        checks: Option<String>,
        /// JSON report path; the CSV goes next to it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the oracle battery.
    Verify {
        /// Evaluation cap for each quadrature oracle.
        #[arg(long, default_value_t = betaens_harness::oracle::DEFAULT_BUDGET)]
        quad_budget: u64,
        #[arg(long)]
        format: Option<Format>,
    },
}

fn fmt_scalar(x: f64) -> String {
    if x == 0.0 || (x.abs() >= 1e-3 && x.abs() < 1e12) {
        format!("{x:.12}")
    } else if x.is_finite() {
        format!("{x:.11e}")
    } else if x > 0.0 {
        "+inf".into()
    } else if x < 0.0 {
        "-inf".into()
    } else {
        "nan".into()
    }
}

/// `writeln!` to stdout; write errors (a closed pipe included) propagate.
macro_rules! out {
    ($($arg:tt)*) => {
        writeln!(std::io::stdout().lock(), $($arg)*).map_err(stdout_error)?
    };
}

fn stdout_error(source: std::io::Error) -> HarnessError {
    HarnessError::Io { path: "<stdout>".into(), source }
}

fn beta_param(b: f64) -> Result<BetaParam, HarnessError> {
    Ok(BetaParam::new(b)?)
}

fn complex_arg(v: &[f64]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

fn print_complex(label: &str, v: Complex64, format: Option<Format>) -> Result<(), HarnessError> {
    match format {
        Some(Format::Json) => out!("{}", json!({ label: { "re": v.re, "im": v.im } })),
        Some(Format::Csv) => out!("{label}_re,{label}_im\n{},{}", fmt_scalar(v.re), fmt_scalar(v.im)),
        None => out!("{} {}", fmt_scalar(v.re), fmt_scalar(v.im)),
    }
    Ok(())
}

fn print_real(label: &str, v: f64, format: Option<Format>) -> Result<(), HarnessError> {
    match format {
        Some(Format::Json) => out!("{}", json!({ label: v })),
        Some(Format::Csv) => out!("{label}\n{}", fmt_scalar(v)),
        None => out!("{}", fmt_scalar(v)),
    }
    Ok(())
}

/// Ok(true) means success, Ok(false) a failed check.
fn run(cli: Cli) -> Result<bool, HarnessError> {
    match cli.command {
        Command::Partition { ensemble, n, beta, complex, format } => {
            let spec = ensemble.spec()?;
            match complex {
                Some(c) => print_complex("log_partition", log_partition_complex(&spec, n, complex_arg(&c))?, format)?,
                None => print_real("log_partition", log_partition(&spec, n, beta_param(beta)?)?, format)?,
            }
        }
        Command::Cgf { ensemble, n, beta, t, z, format } => {
            let spec = ensemble.spec()?;
            let z = match (t, z) {
                (Some(t), _) => Complex64::new(t, 0.0),
                (None, Some(z)) => complex_arg(&z),
                (None, None) => return Err(HarnessError::Config("cgf needs --t or --z".into())),
            };
            let v = cgf(&spec, n, beta_param(beta)?, z)?.value;
            if z.im == 0.0 {
                print_real("cgf", v.re, format)?;
            } else {
                print_complex("cgf", v, format)?;
            }
        }
        Command::Rate { ensemble, beta, x, x_min, x_max, points, format } => {
            let spec = ensemble.spec()?;
            let b = beta_param(beta)?;
            let xs = match (x, x_min, x_max) {
                (Some(xs), _, _) => xs,
                (None, Some(lo), Some(hi)) if points >= 2 && lo < hi => {
                    (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect()
                }
                _ => return Err(HarnessError::Config("rate needs --x or --x-min < --x-max with --points >= 2".into())),
            };
            if xs.is_empty() {
                return Err(HarnessError::Config("empty x grid".into()));
            }
            let rows = xs.iter().map(|&x| rate_function(&spec, b, x)).collect::<Result<Vec<_>, _>>()?;
            if format == Some(Format::Json) {
                out!("{}", serde_json::to_string_pretty(&rows)?);
            } else {
                out!("x,rate,argmax_t");
                for r in rows {
                    let arg = r.argmax_t.map(fmt_scalar).unwrap_or_default();
                    out!("{},{},{arg}", fmt_scalar(r.x), fmt_scalar(r.value));
                }
            }
        }
        Command::Predict { ensemble, n, beta, kind, x, a, b } => {
            let spec = ensemble.spec()?;
            let bp = beta_param(beta)?;
            let p = ModGaussParams::new(n, bp);
            let mut out = json!({
                "ensemble": spec, "n": n, "beta": beta, "t_n": p.t_n,
                "sigma2": sigma2_beta(bp), "a_beta": a_beta(bp),
            });
            let extra = match kind {
                PredictKind::Clt => json!({ "kind": "clt", "y": x, "tail": clt_tail(x) }),
                PredictKind::Mdp => json!({ "kind": "mdp", "x": x, "tail": mdp_tail(&spec, n, bp, x)? }),
                PredictKind::Llt => {
                    let v = llt_value(x, a, b)?;
                    json!({ "kind": "llt", "x": x, "a": a, "b": b, "value": v, "probability": v / p.t_n.sqrt() })
                }
                PredictKind::Kolmogorov => {
                    let xi: Vec<f64> = (-40..=40).map(|k| 0.05 * k as f64).collect();
                    let z = zone_control_fit(&spec, bp, &[n], &xi)?;
                    json!({
                        "kind": "kolmogorov", "zone": z,
                        "constant": kolmogorov_bound_constant(z.d, z.v, z.k1)?,
                        "bound": z.kolmogorov_bound(p.t_n)?,
                    })
                }
            };
            if let (Some(o), Some(e)) = (out.as_object_mut(), extra.as_object()) {
                o.extend(e.clone());
            }
            out!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::Sample { ensemble, n, beta, seed, replicas, steps, format } => {
            let spec = ensemble.spec()?;
            let b = beta_param(beta)?;
            let exact = has_exact_sampler(&spec);
            let steps = steps.unwrap_or(default_burn_in(n) + n as u64);
            let samples: Vec<ConfigurationSample> = replicate_map(replicas, seed, |s| {
                if exact {
                    sample_exact(&spec, n, b, s)
                } else {
                    Ok(sample_mcmc(&spec, n, b, steps, s)?.0)
                }
            })?;
            if format == Some(Format::Json) {
                out!("{}", serde_json::to_string_pretty(&samples)?);
            } else {
                out!("replica,index,point,log_density");
                for (r, s) in samples.iter().enumerate() {
                    for (i, x) in s.points.iter().enumerate() {
                        out!("{r},{i},{x},{}", s.log_density);
                    }
                }
            }
        }
        Command::Experiment {
            config,
            ensemble,
            theta,
            kappa1,
            kappa2,
            d,
            n,
            beta,
            seed,
            replicas,
            statistic,
            checks,
            out,
        } => {
            let mut raw = match &config {
                Some(p) => RawConfig::from_file(p)?,
                None => RawConfig::default(),
            };
            let overrides: [(&str, Option<String>); 12] = [
                ("ensemble", ensemble),
                ("theta", theta.map(|v| v.to_string())),
                ("kappa1", kappa1.map(|v| v.to_string())),
                ("kappa2", kappa2.map(|v| v.to_string())),
                ("d", d.map(|v| v.to_string())),
                ("n", n.map(|v| v.to_string())),
                ("beta", beta.map(|v| v.to_string())),
                ("seed", seed.map(|v| v.to_string())),
                ("replicas", replicas.map(|v| v.to_string())),
                ("statistic", statistic),
                ("checks", checks),
                ("out", out.map(|p| p.display().to_string())),
            ];
            for (k, v) in overrides {
                if let Some(v) = v {
                    raw.set(k, &v)?;
                }
            }
            let cfg = raw.into_experiment()?;
            let outcome = run_experiment(&cfg)?;
            match &cfg.output_path {
                Some(path) => {
                    let csv = outcome.write(path)?;
                    out!("report: {}", path.display());
                    out!("samples: {}", csv.display());
                    for (name, ok) in &outcome.report.pass_flags {
                        out!("{name}: {}", if *ok { "pass" } else { "FAIL" });
                    }
                }
                None => out!("{}", outcome.report.to_json()?),
            }
            return Ok(outcome.report.all_passed());
        }
        Command::Verify { quad_budget, format } => {
            let rows = verify_suite(&VerifyOptions { quad_budget });
            if format == Some(Format::Json) {
                out!("{}", serde_json::to_string_pretty(&rows)?);
            } else {
                out!("{}", render_table(&rows).trim_end());
            }
            return Ok(all_passed(&rows));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        // the reader went away (e.g. `| head`)
        Err(HarnessError::Io { source, .. }) if source.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
