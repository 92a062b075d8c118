//! `icrt-lab`: sample paths, p-trees and reduced ICRTs, and run the
//! verification suites.
//!
//! Exit codes: 0 success, 1 a suite failed, 2 usage or configuration error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use icrt_core::icrt::line_break_sample;
use icrt_core::paths::{sample_brownian_bridge, sample_excursion, validate_theta, DEFAULT_GRID};
use icrt_core::ptree::{make_particular_pseq, sample_ptree, Construction, PSeq};
use icrt_core::stats::{lamperti_time_with, time_changed_width, BoundaryRule};
use icrt_core::suites::{example_theta, run_suite, SuiteConfig, SuiteKind};
use icrt_core::yprocess::build_y;
use icrt_core::{RngState, Theta};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "icrt-lab", version, about = "Inhomogeneous continuum random trees: sampling and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample one object and write it as CSV (paths) or JSON (trees).
    Sample {
        kind: SampleKind,
        #[command(flatten)]
        opts: Opts,
    },
    /// Same as `sample y`.
    SampleY {
        #[command(flatten)]
        opts: Opts,
    },
    /// Same as `sample ptree`.
    SamplePtree {
        #[command(flatten)]
        opts: Opts,
    },
    /// Same as `sample icrt`.
    SampleIcrt {
        #[command(flatten)]
        opts: Opts,
    },
    /// Run a verification suite and emit a JSON-lines report.
    Verify {
        /// identities, btree-law, theorem1, theorem2, jeulin, pkey, unifconv,
        /// repeat-time or lebesgue.
        #[arg(value_name = "SUITE")]
        name: Option<String>,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SampleKind {
    Bridge,
    Excursion,
    Y,
    Ptree,
    Icrt,
    Width,
}

#[derive(Args, Debug, Default, Clone)]
struct Opts {
    /// theta0 followed by the atoms, comma separated.
    #[arg(long)]
    theta: Option<String>,
    /// Uniform p on this many vertices (p-tree sampling).
    #[arg(long)]
    uniform: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Number of leaves of the reduced tree.
    #[arg(long = "J", visible_alias = "j")]
    j: Option<usize>,
    /// Grid cells for the Brownian part.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    construction: Option<String>,
    /// key=value file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// A failure and the exit code it maps to.
enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
    SuiteFailed,
}

impl From<icrt_core::Error> for Failure {
    fn from(e: icrt_core::Error) -> Self {
        Failure::Usage(anyhow!("{}: {e}", e.kind()))
    }
}

fn usage(msg: impl std::fmt::Display) -> Failure {
    Failure::Usage(anyhow!("{msg}"))
}

impl Opts {
    /// Fills unset fields from the `--config` file.
    fn resolve(mut self) -> Result<Self, Failure> {
        let Some(path) = self.config.clone() else { return Ok(self) };
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("reading config {}", path.display()))
            .map_err(Failure::Usage)?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("{}:{}: expected key=value", path.display(), lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim().to_string());
            let num = |v: &str| v.parse::<u64>().map_err(|e| usage(format!("{key}: {e}")));
            match key {
                "theta" => self.theta = self.theta.or(Some(value)),
                "uniform" => self.uniform = self.uniform.or(Some(num(&value)? as usize)),
                "n" => self.n = self.n.or(Some(num(&value)? as usize)),
                "J" | "j" => self.j = self.j.or(Some(num(&value)? as usize)),
                "grid" => self.grid = self.grid.or(Some(num(&value)? as usize)),
                "seed" => self.seed = self.seed.or(Some(num(&value)?)),
                "samples" => self.samples = self.samples.or(Some(num(&value)? as usize)),
                "out" => self.out = self.out.or(Some(PathBuf::from(value))),
                "suite" => self.suite = self.suite.or(Some(value)),
                "construction" => self.construction = self.construction.or(Some(value)),
                other => return Err(usage(format!("{}: unknown key {other:?}", path.display()))),
            }
        }
        Ok(self)
    }

    fn theta(&self) -> Result<Theta, Failure> {
        let Some(spec) = &self.theta else { return Ok(example_theta()) };
        let values = spec
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| usage(format!("--theta {spec:?}: {e}")))?;
        let (theta0, atoms) = values.split_first().ok_or_else(|| usage("--theta is empty"))?;
        Ok(validate_theta(*theta0, atoms)?)
    }

    fn grid(&self) -> Result<usize, Failure> {
        match self.grid {
            Some(m) if m < 2 => Err(usage(format!("--grid must be at least 2, got {m}"))),
            Some(m) => Ok(m),
            None => Ok(DEFAULT_GRID),
        }
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(1)
    }

    fn construction(&self) -> Result<Construction, Failure> {
        match &self.construction {
            None => Ok(Construction::Breadth),
            Some(s) => Ok(Construction::from_str(s)?),
        }
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display())).map_err(Failure::Runtime)?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Where the one-line summary goes: stdout when the data went to a file.
fn summary(opts: &Opts, line: String) {
    if opts.out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn io_err(e: io::Error) -> Failure {
    Failure::Runtime(e.into())
}

fn cmd_sample(kind: SampleKind, opts: Opts) -> Result<(), Failure> {
    let opts = opts.resolve()?;
    let seed = opts.seed();
    let mut rng = RngState::new(seed, 0).rng();
    let mut out = open_out(opts.out.as_deref())?;
    let line = match kind {
        SampleKind::Bridge => {
            let b = sample_brownian_bridge(opts.grid()?, &mut rng)?;
            b.write_csv(&mut out).map_err(io_err)?;
            format!("bridge: {} knots, seed {seed}", b.len())
        }
        SampleKind::Excursion | SampleKind::Y | SampleKind::Width => {
            let theta = opts.theta()?;
            let x = sample_excursion(&theta, opts.grid()?, &mut rng)?.path;
            match kind {
                SampleKind::Excursion => {
                    x.write_csv(&mut out).map_err(io_err)?;
                    format!("excursion: {} knots, max {:.6}, seed {seed}", x.len(), x.supremum())
                }
                SampleKind::Y => {
                    let y = build_y(&x)?;
                    y.write_csv(&mut out).map_err(io_err)?;
                    format!("y: {} knots, max {:.6}, seed {seed}", y.len(), y.supremum())
                }
                _ => {
                    let total = lamperti_time_with(&x, x.start(), x.end(), BoundaryRule::SquareRoot)?;
                    let points = opts.samples.unwrap_or(1000).max(2);
                    let ys: Vec<f64> = (0..points).map(|k| total * k as f64 / (points - 1) as f64).collect();
                    let w = time_changed_width(&x, &ys, BoundaryRule::SquareRoot)?;
                    writeln!(out, "y,width").map_err(io_err)?;
                    for (y, w) in ys.iter().zip(&w) {
                        writeln!(out, "{y},{w}").map_err(io_err)?;
                    }
                    format!("width: {points} points on [0, {total:.6}], seed {seed}")
                }
            }
        }
        SampleKind::Ptree => {
            let (p, label) = match opts.uniform {
                Some(0) => return Err(usage("--uniform must be positive")),
                Some(n) => (PSeq::uniform(n), "uniform"),
                None => {
                    let n = opts.n.unwrap_or(1000);
                    if n <= opts.theta()?.len() {
                        return Err(usage(format!("--n must exceed the number of atoms, got {n}")));
                    }
                    (make_particular_pseq(&opts.theta()?, n), "particular")
                }
            };
            let construction = opts.construction()?;
            let real = sample_ptree(&p, construction, &mut rng);
            let t = &real.tree;
            let header = json!({
                "n": p.len(),
                "root": t.root,
                "construction": construction,
                "p_kind": label,
                "seed": seed,
                "p": p.probs(),
            });
            writeln!(out, "# {header}").map_err(io_err)?;
            writeln!(out, "vertex,parent").map_err(io_err)?;
            for (v, &u) in t.parent.iter().enumerate() {
                writeln!(out, "{v},{u}").map_err(io_err)?;
            }
            format!("ptree: n = {}, root {}, height {}, seed {seed}", p.len(), t.root, t.height())
        }
        SampleKind::Icrt => {
            let theta = opts.theta()?;
            let j = opts.j.unwrap_or(3);
            if j == 0 {
                return Err(usage("--J must be positive"));
            }
            let t = line_break_sample(&theta, j, &mut rng);
            writeln!(out, "{}", t.to_json()).map_err(io_err)?;
            format!("icrt: {j} leaves, total length {:.6}, shape {}, seed {seed}", t.total_length(), t.shape_code())
        }
    };
    out.flush().map_err(io_err)?;
    drop(out);
    summary(&opts, line);
    Ok(())
}

fn cmd_verify(suite: Option<String>, opts: Opts) -> Result<(), Failure> {
    let opts = opts.resolve()?;
    let name = suite.or(opts.suite.clone()).ok_or_else(|| usage("no suite given"))?;
    let kind = SuiteKind::from_str(&name)?;
    let cfg = SuiteConfig {
        theta: opts.theta()?,
        n: opts.n,
        j: opts.j,
        grid: opts.grid()?,
        samples: opts.samples,
        seed: opts.seed(),
    };
    let outcome = run_suite(kind, &cfg)?;
    let mut out = open_out(opts.out.as_deref())?;
    for (k, attempt) in outcome.attempts.iter().enumerate() {
        for c in &attempt.checks {
            let mut v = serde_json::to_value(c).expect("checks serialize");
            v["attempt"] = json!(k + 1);
            writeln!(out, "{v}").map_err(io_err)?;
        }
    }
    let final_line = json!({
        "suite": kind,
        "pass": outcome.pass,
        "attempts": outcome.attempts.iter().map(|a| json!({"seed": a.seed, "pass": a.pass})).collect::<Vec<_>>(),
        "config": outcome.config,
    });
    writeln!(out, "{final_line}").map_err(io_err)?;
    out.flush().map_err(io_err)?;
    drop(out);
    if opts.out.is_some() {
        println!("{}: {}", kind.name(), if outcome.pass { "pass" } else { "FAIL" });
    }
    if outcome.pass {
        Ok(())
    } else {
        Err(Failure::SuiteFailed)
    }
}

fn set_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("ICRT_LAB_THREADS") else { return Ok(()) };
    let n: usize = v.parse().map_err(|_| usage(format!("ICRT_LAB_THREADS={v:?} is not a positive integer")))?;
    if n == 0 {
        return Err(usage("ICRT_LAB_THREADS must be positive"));
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Runtime(e.into()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    set_threads()?;
    match cli.command {
        Command::Sample { kind, opts } => cmd_sample(kind, opts),
        Command::SampleY { opts } => cmd_sample(SampleKind::Y, opts),
        Command::SamplePtree { opts } => cmd_sample(SampleKind::Ptree, opts),
        Command::SampleIcrt { opts } => cmd_sample(SampleKind::Icrt, opts),
        Command::Verify { name, opts } => cmd_verify(name, opts),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::SuiteFailed) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
