use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use bowen_series::analysis::{analyze, resolve_alpha, scan, AlphaSpec, AnalysisOptions};
use bowen_series::dynamics::BoundaryMap;
use bowen_series::group::{build_domain, classify_signature, GroupWord, Signature, SignatureVerdict};
use bowen_series::net::build_net;
use bowen_series::real::set_mp_precision;
use bowen_series::{Caps, Error, Mp, Tolerances};

#[derive(Parser)]
#[command(name = "bowen-series", version, about = "Boundary maps of cocompact triangle groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// Working precision in bits for orbit analysis.
    #[arg(long, global = true, default_value_t = 256, value_parser = clap::value_parser!(u32).range(64..))]
    precision: u32,
    /// Circle-point tolerance in radians.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    #[arg(long, global = true)]
    max_size: Option<usize>,
    #[arg(long, global = true)]
    lmax: Option<usize>,
    #[arg(long, global = true)]
    residual: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Accepted for reproducible runs; no command currently samples.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Clone)]
struct Sig {
    m1: u32,
    m2: u32,
    m3: u32,
}

#[derive(Args, Clone)]
#[group(multiple = false)]
struct Alpha {
    /// Comma-separated generator indices; the fixed point in an overlap is used.
    #[arg(long)]
    alpha_word: Option<String>,
    /// Explicit angle in radians.
    #[arg(long, allow_hyphen_values = true)]
    alpha_angle: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a signature.
    Check(Sig),
    /// Fundamental domain as JSON, optionally with its net.
    Build {
        #[command(flatten)]
        sig: Sig,
        #[arg(long)]
        net: bool,
    },
    /// CSV samples of the boundary map or a deformation.
    Plot {
        #[command(flatten)]
        sig: Sig,
        #[command(flatten)]
        alpha: Alpha,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long)]
        overlap: Option<usize>,
    },
    /// Surjectivity, Markov and aperiodicity report for one deformation.
    Analyze {
        #[command(flatten)]
        sig: Sig,
        #[command(flatten)]
        alpha: Alpha,
        /// Overlap to pick when both fixed points of the word qualify.
        #[arg(long)]
        overlap: Option<usize>,
    },
    /// Verdicts over a grid of deformation parameters in one overlap.
    Scan {
        #[command(flatten)]
        sig: Sig,
        #[arg(long)]
        overlap: usize,
        #[arg(long, default_value_t = 200)]
        grid: usize,
    },
}

#[derive(Serialize)]
struct CheckOutput {
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    canonical: Option<[u32; 3]>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::SignatureRejected { .. } | Error::InvalidOrder(_) => 3,
        Error::PrecisionExhausted { .. } => 4,
        Error::Consistency(_) => 5,
        Error::InvalidWord(_)
        | Error::IndexOutOfRange { .. }
        | Error::AlphaOutsideOverlap(_)
        | Error::NoFixedPointInOverlap
        | Error::AmbiguousAlpha(_) => 2,
        _ => 1,
    }
}

fn output(g: &Global) -> io::Result<Box<dyn Write>> {
    Ok(match &g.out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json(g: &Global, v: &impl serde::Serialize) -> bowen_series::Result<()> {
    let mut w = output(g)?;
    serde_json::to_writer_pretty(&mut w, v)?;
    writeln!(w)?;
    Ok(())
}

fn options(g: &Global, overlap: Option<usize>) -> AnalysisOptions {
    let mut tol = Tolerances::default();
    if let Some(t) = g.tol {
        tol.point = t;
    }
    let mut caps = Caps::default();
    if let Some(v) = g.max_iter {
        caps.max_iter = v;
    }
    if let Some(v) = g.max_size {
        caps.max_size = v;
    }
    if let Some(v) = g.lmax {
        caps.l_max = v;
    }
    if let Some(v) = g.residual {
        caps.residual = v;
    }
    AnalysisOptions {
        tol,
        caps,
        select_overlap: overlap,
    }
}

fn alpha_spec(a: &Alpha) -> bowen_series::Result<Option<AlphaSpec>> {
    Ok(match (&a.alpha_word, a.alpha_angle) {
        (Some(w), _) => Some(AlphaSpec::Word(w.parse::<GroupWord>()?)),
        (None, Some(t)) => Some(AlphaSpec::Angle(t)),
        (None, None) => None,
    })
}

fn signature(s: &Sig) -> bowen_series::Result<Signature> {
    Signature::new(s.m1, s.m2, s.m3)
}

fn run(cli: Cli) -> bowen_series::Result<u8> {
    let g = &cli.global;
    set_mp_precision(g.precision);
    match &cli.command {
        Command::Check(s) => {
            let verdict = classify_signature(s.m1, s.m2, s.m3)?;
            let (verdict, canonical, code) = match verdict {
                SignatureVerdict::InE(c) => ("InE", Some(c.m()), 0),
                SignatureVerdict::ExtensionImpossible => ("ExtensionImpossible", None, 3),
                SignatureVerdict::NotHyperbolic => ("NotHyperbolic", None, 3),
                SignatureVerdict::Degenerate => ("Degenerate", None, 3),
            };
            let value = CheckOutput { verdict, canonical };
            let mut w = output(g)?;
            serde_json::to_writer(&mut w, &value)?;
            writeln!(w)?;
            Ok(code)
        }
        Command::Build { sig, net } => {
            let opts = options(g, None);
            let fd = build_domain::<f64>(signature(sig)?, &opts.tol)?;
            if *net {
                write_json(g, &build_net(&fd, &opts.tol)?.to_json())?;
            } else {
                write_json(g, &fd.to_json())?;
            }
            Ok(0)
        }
        Command::Plot {
            sig,
            alpha,
            samples,
            overlap,
        } => {
            let opts = options(g, *overlap);
            let fd = build_domain::<f64>(signature(sig)?, &opts.tol)?;
            let net = Arc::new(build_net(&fd, &opts.tol)?);
            let map = match alpha_spec(alpha)? {
                None => BoundaryMap::base(net),
                Some(spec) => {
                    let a = resolve_alpha(&net, &spec, &opts)?;
                    BoundaryMap::deformed(net, a.alpha, opts.tol.branch::<f64>())?
                }
            };
            map.write_plot_csv(output(g)?, *samples)?;
            Ok(0)
        }
        Command::Analyze {
            sig,
            alpha,
            overlap,
        } => {
            let opts = options(g, *overlap);
            let spec = alpha_spec(alpha)?.ok_or_else(|| {
                Error::InvalidWord("one of --alpha-word or --alpha-angle is required".into())
            })?;
            let report = analyze::<Mp>(signature(sig)?, &spec, &opts)?;
            for (stage, t) in &report.timings {
                eprintln!("{stage}: {:.3}s", t.as_secs_f64());
            }
            write_json(g, &report)?;
            Ok(0)
        }
        Command::Scan { sig, overlap, grid } => {
            let opts = options(g, None);
            let fd = build_domain::<Mp>(signature(sig)?, &opts.tol)?;
            let net = Arc::new(build_net(&fd, &opts.tol)?);
            let rows = scan(&net, *overlap, *grid, &opts)?;
            let mut w = csv::Writer::from_writer(output(g)?);
            w.write_record([
                "alpha",
                "surjective_predicate",
                "surjective_empirical",
                "markov_within_cap",
            ])?;
            for r in rows {
                w.write_record([
                    format!("{:.16e}", r.alpha),
                    r.surjective_predicate.to_string(),
                    r.surjective_empirical.to_string(),
                    r.markov_within_cap.to_string(),
                ])?;
            }
            w.flush()?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
