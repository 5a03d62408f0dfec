use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use dtmf::dtm::dtm_on;
use dtmf::fmt::g17;
use dtmf::persistence::{flag_persistence, PersistenceDiagram};
use dtmf::prelude::*;
use dtmf::svg::render_diagram;
use dtmf::Error;

/// Largest complex the pipeline will build before giving up.
const DEFAULT_LIMIT: usize = 5_000_000;

#[derive(Parser)]
#[command(name = "dtmf", version, about = "DTM filtrations, persistence diagrams and stability checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// DTM values of the input measure at the query points (default: the input points).
    Dtm {
        #[arg(long)]
        input: PathBuf,
        /// Last column of the input holds masses.
        #[arg(long)]
        weighted: bool,
        /// Mass parameter, a decimal in (0,1) or `k/n`.
        #[arg(long, value_parser = parse_m)]
        m: DtmParams,
        #[arg(long)]
        queries: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// DTM-filtration of the input, then its persistence diagram.
    Pipeline {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        weighted: bool,
        #[arg(long, value_parser = parse_m)]
        m: DtmParams,
        /// Exponent, a decimal >= 1 or `inf`.
        #[arg(long, value_parser = parse_p)]
        p: PExponent,
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
        /// Truncation level; defaults to the diameter of the input.
        #[arg(long)]
        t_max: Option<f64>,
        /// Homology degrees; defaults to 0..max_dim.
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        #[arg(long)]
        diagram_out: PathBuf,
        #[arg(long)]
        complex_out: Option<PathBuf>,
        /// Keep zero-persistence points in the CSV.
        #[arg(long)]
        include_trivial: bool,
        /// Largest number of simplices to build.
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        limit: usize,
    },
    /// Persistence diagram of a complex file written by `pipeline --complex-out`.
    Reduce {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        #[arg(long)]
        diagram_out: PathBuf,
        #[arg(long)]
        include_trivial: bool,
    },
    /// Stability bound and measured bottleneck distance, as a JSON report.
    Stability {
        /// P4.4, T4.6, T4.13 or P4.8.
        #[arg(long)]
        theorem: Theorem,
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        gamma: Option<PathBuf>,
        #[arg(long)]
        omega: Option<PathBuf>,
        /// Second cloud; defaults to X.
        #[arg(long)]
        y: Option<PathBuf>,
        /// `--x` carries a mass column (P4.4 and P4.8).
        #[arg(long)]
        weighted: bool,
        #[arg(long, value_parser = parse_m)]
        m: DtmParams,
        #[arg(long, value_parser = parse_p, default_value = "1")]
        p: PExponent,
        #[arg(long, value_delimiter = ',', default_value = "0,1")]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        report_out: Option<PathBuf>,
    },
    /// SVG scatter plot of a diagram CSV.
    Render {
        #[arg(long)]
        diagram: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Bottleneck distance between two diagram CSVs in one degree.
    Bottleneck {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = 0)]
        dim: usize,
    },
    /// Quadratic Wasserstein distance between two point files.
    W2 {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        weighted: bool,
    },
    /// Hausdorff distance between two point files.
    Hausdorff {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Delay embedding of a time series.
    Embed {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 1)]
        stride: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Seeded synthetic point cloud.
    Synth {
        /// circle, square or circle-with-outliers.
        #[arg(long)]
        kind: SynthKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        outliers: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn parse_m(s: &str) -> std::result::Result<DtmParams, String> {
    let parsed = match s.split_once('/') {
        Some((k, n)) => {
            let k: usize = k.trim().parse().map_err(|_| format!("invalid numerator in {s:?}"))?;
            let n: usize = n.trim().parse().map_err(|_| format!("invalid denominator in {s:?}"))?;
            DtmParams::from_ratio(k, n)
        }
        None => DtmParams::new(s.trim().parse().map_err(|_| format!("invalid m {s:?}"))?),
    };
    parsed.map_err(|e| e.to_string())
}

fn parse_p(s: &str) -> std::result::Result<PExponent, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(path: &Path, weighted: bool) -> Result<DiscreteMeasure> {
    load_points(path, weighted).with_context(|| format!("reading {}", path.display()))
}

fn load_diagram(path: &Path) -> Result<PersistenceDiagram> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    PersistenceDiagram::parse_csv(&text).with_context(|| format!("parsing {}", path.display()))
}

fn default_dims(max_dim: usize) -> Vec<usize> {
    (0..max_dim.max(1)).collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Dtm { input, weighted, m, queries, output } => {
            let mu = load(&input, weighted)?;
            let at = match queries {
                Some(q) => load(&q, false)?.into_support(),
                None => mu.support().clone(),
            };
            let values = dtm_on(&mu, &at, m)?;
            let text: String = values.values().iter().map(|v| g17(*v) + "\n").collect();
            write_out(output.as_deref(), &text)
        }
        Command::Pipeline { input, weighted, m, p, max_dim, t_max, dims, diagram_out, complex_out, include_trivial, limit } => {
            let mu = load(&input, weighted)?;
            let t_max = t_max.unwrap_or_else(|| mu.support().diameter());
            let dims = dims.unwrap_or_else(|| default_dims(max_dim));
            let f = dtm_weights_of(&mu, m)?;
            let g = WeightedGraph::weighted_rips(mu.support(), &f, p, t_max)?;
            let diagram = match complex_out {
                Some(path) => {
                    let k = g.flag_complex_limited(max_dim, limit)?;
                    fs::write(&path, k.to_text()).with_context(|| format!("writing {}", path.display()))?;
                    reduce(&k, &dims)?
                }
                None => flag_persistence(&g, max_dim, &dims, limit)?,
            };
            write_out(Some(&diagram_out), &diagram.to_csv(include_trivial))
        }
        Command::Reduce { complex, dims, diagram_out, include_trivial } => {
            let text = fs::read_to_string(&complex).with_context(|| format!("reading {}", complex.display()))?;
            let k = FilteredComplex::parse(&text)?;
            let dims = dims.unwrap_or_else(|| default_dims(k.max_dim().unwrap_or(0)));
            let diagram = reduce(&k, &dims)?;
            write_out(Some(&diagram_out), &diagram.to_csv(include_trivial))
        }
        Command::Stability { theorem, x, gamma, omega, y, weighted, m, p, dims, max_dim, t_max, tol, report_out } => {
            let mx = load(&x, weighted)?;
            let my = match &y {
                Some(path) => load(path, false)?,
                None => DiscreteMeasure::uniform(mx.support().clone())?,
            };
            let mut input = CertifyInput::new(theorem, mx, my, m, p);
            input.gamma = gamma.map(|g| load(&g, false).map(DiscreteMeasure::into_support)).transpose()?;
            input.omega = omega.map(|o| load(&o, false).map(DiscreteMeasure::into_support)).transpose()?;
            input.dims = dims;
            input.max_dim = max_dim;
            input.t_max = t_max;
            input.tol = tol;
            let report = certify(&input)?;
            write_out(report_out.as_deref(), &report.to_json_string())
        }
        Command::Render { diagram, output } => write_out(output.as_deref(), &render_diagram(&load_diagram(&diagram)?)),
        Command::Bottleneck { a, b, dim } => {
            let d = bottleneck(&load_diagram(&a)?, &load_diagram(&b)?, dim);
            println!("{}", g17(d));
            Ok(())
        }
        Command::W2 { a, b, weighted } => {
            println!("{}", g17(wasserstein2(&load(&a, weighted)?, &load(&b, weighted)?)?));
            Ok(())
        }
        Command::Hausdorff { a, b } => {
            println!("{}", g17(hausdorff(load(&a, false)?.support(), load(&b, false)?.support())?));
            Ok(())
        }
        Command::Embed { input, dim, stride, output } => {
            let text = fs::read_to_string(&input).with_context(|| format!("reading {}", input.display()))?;
            let series = TimeSeries::parse(&text)?;
            write_out(output.as_deref(), &delay_embedding(&series, dim, stride)?.to_csv())
        }
        Command::Synth { kind, n, outliers, seed, output } => {
            if kind != SynthKind::CircleWithOutliers && outliers > 0 {
                bail!("--outliers only applies to circle-with-outliers");
            }
            write_out(output.as_deref(), &synth(kind, n, outliers, seed)?.to_csv())
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::SizeGuard(_)) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
