//! The batch experiment runner behind the `conelab` binary.
//!
//! `measure`, `density`, `hom` and `doubling` read a JSON [`ExperimentConfig`]
//! and write one CSV row per (point, scale) plus a JSON summary; `constants`,
//! `ef` and `verify-example` take their parameters on the command line.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 bad config or arguments, 3 an
//! invariant or verdict failed (outputs are still written), 4 a resource guard
//! refused the run.

pub mod canned;
pub mod config;
pub mod output;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::configurations::{find_cone_triple, search_counterexample_set};
use crate::density::{constants_chain_with_q, density_profile};
use crate::geometry::{build_direction_net, build_subspace_net, Point};
use crate::homogeneity::{doubling_constant, doubling_frequency, hom_estimate};
use crate::measure::{MeasureTree, RegionQuery};

pub use config::{ConfigError, ExperimentConfig, Operation};
pub use output::{ResultRow, Summary};

/// Seed used when neither the command line nor the config gives one.
pub const DEFAULT_SEED: u64 = 7;
/// Default relative depth budget for region queries.
pub const DEFAULT_DEPTH: usize = 8;

#[derive(Debug, Parser)]
#[command(
    name = "conelab",
    version,
    about = "Conical density experiments on hierarchical measures"
)]
pub struct Cli {
    /// JSON experiment config (measure, density, hom, doubling).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Relative depth budget; for verify-example, the last level.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory; without it CSV goes to stdout and the summary to stderr.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Ball measures at the configured points and radii.
    Measure,
    /// Worst-cone density profiles.
    Density,
    /// Average homogeneity partial sums.
    Hom,
    /// Doubling-scale frequencies.
    Doubling,
    /// The constants chain, as JSON.
    Constants {
        #[arg(short = 'n', long)]
        n: usize,
        #[arg(short = 'm', long)]
        m: usize,
        #[arg(short = 's', long)]
        s: f64,
        #[arg(long)]
        alpha: f64,
        /// Cone-triple count, required unless n - m = 1.
        #[arg(long)]
        q: Option<u64>,
    },
    /// Random search for point sets without a cone triple.
    Ef {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// One of the three counterexample measures, with a decay verdict.
    VerifyExample { which: Example },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Example {
    #[value(alias = "1")]
    Binomial,
    #[value(alias = "2")]
    Rotating,
    #[value(alias = "3")]
    StripBlock,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Library(#[from] crate::Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) | CliError::Csv(_) => 1,
            CliError::Library(crate::Error::DepthGuard { .. }) => 4,
            CliError::Usage(_) | CliError::Config(_) | CliError::Library(_) => 2,
        }
    }
}

/// Rows and summary of one run.
#[derive(Debug, Clone)]
pub struct Report {
    pub id: String,
    /// `None` for commands whose whole output is the summary.
    pub rows: Option<Vec<ResultRow>>,
    pub summary: Summary,
    /// Output directory requested by the config, if any.
    pub out: Option<PathBuf>,
}

impl Report {
    /// Every named invariant holds and every row has `lo ≤ hi`.
    pub fn ok(&self) -> bool {
        self.summary.all_hold() && self.rows.iter().flatten().all(|r| r.lo <= r.hi)
    }
}

/// Parses `std::env::args`, runs, writes outputs and maps the exit code.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let written = run(&cli).and_then(|rep| {
        let out = cli.out.as_deref().or(rep.out.as_deref());
        emit(&rep, out).map(|_| rep)
    });
    match written {
        Ok(rep) if rep.ok() => ExitCode::SUCCESS,
        Ok(_) => {
            eprintln!("conelab: invariant check failed");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("conelab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Runs one command on a thread pool of the requested size.
pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    pool.install(|| dispatch(cli))
}

fn dispatch(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Measure | Command::Density | Command::Hom | Command::Doubling => run_config(cli),
        Command::Constants { n, m, s, alpha, q } => {
            let rep = constants_chain_with_q(*n, *m, *s, *alpha, *q)?;
            Ok(Report {
                id: "constants".into(),
                rows: None,
                summary: Summary {
                    schema_version: config::SCHEMA_VERSION,
                    experiment: "constants".into(),
                    command: "constants".into(),
                    seed: 0,
                    measure: None,
                    invariants: rep.checks.clone(),
                    details: serde_json::to_value(&rep).expect("plain data"),
                },
                out: None,
            })
        }
        Command::Ef {
            dim,
            alpha,
            size,
            trials,
        } => {
            let seed = cli.seed.unwrap_or(DEFAULT_SEED);
            let found = search_counterexample_set(*dim, *alpha, *size, *trials, seed)?;
            let recheck = match &found {
                Some(pts) => find_cone_triple(pts, *alpha)?.is_none(),
                None => true,
            };
            let hit = found.is_some() as u8 as f64;
            let mut rows = vec![ResultRow::new("ef", "found", hit, hit)
                .meta(format!("size={size} trials={trials}"))];
            for (i, p) in found.iter().flatten().enumerate() {
                rows.push(ResultRow::new("ef", "member", 1.0, 1.0).at_point(i, p));
            }
            let points: Option<Vec<&[f64]>> = found
                .as_ref()
                .map(|v| v.iter().map(Point::as_slice).collect());
            Ok(Report {
                id: "ef".into(),
                rows: Some(rows),
                summary: Summary {
                    schema_version: config::SCHEMA_VERSION,
                    experiment: "ef".into(),
                    command: "ef".into(),
                    seed,
                    measure: None,
                    invariants: vec![("found_set_is_triple_free".into(), recheck)],
                    details: json!({
                        "dim": dim, "alpha": alpha, "size": size, "trials": trials,
                        "found": found.is_some(), "points": points,
                    }),
                },
                out: None,
            })
        }
        Command::VerifyExample { which } => {
            verify_example(*which, cli.depth, cli.seed.unwrap_or(DEFAULT_SEED))
        }
    }
}

fn verify_example(which: Example, depth: Option<usize>, seed: u64) -> Result<Report, CliError> {
    let (name, rows, invariants, details) = match which {
        Example::Binomial => {
            let rep = canned::six_interval_decay(depth.unwrap_or(20), seed)?;
            let x = Point::new(rep.x.clone()).map_err(CliError::Library)?;
            let rows = rep
                .levels
                .iter()
                .zip(&rep.constants)
                .enumerate()
                .map(|(s, (&j, &c))| {
                    ResultRow::new("binomial", "six_interval_constant", c, c)
                        .at_point(0, &x)
                        .at_scale(s, Some(0.5f64.powi(j as i32)))
                })
                .collect();
            let inv = vec![
                ("non_increasing".into(), rep.non_increasing),
                ("halved".into(), rep.halved),
            ];
            ("binomial", rows, inv, serde_json::to_value(&rep))
        }
        Example::Rotating => {
            let rep = canned::rotating_cone_decay(depth.unwrap_or(64), seed)?;
            let rows = rep
                .records
                .iter()
                .enumerate()
                .map(|(s, r)| {
                    ResultRow::new("rotating", "cone_ratio_bound", 0.0, r.ratio_bound)
                        .at_scale(s, Some(1.0 / (4.0 * r.n as f64)))
                        .meta(format!("n={} hits={} fan={}", r.n, r.hits, r.fan))
                })
                .collect();
            let inv = vec![
                ("hits_bounded_eventually".into(), rep.n0 <= 8),
                ("halved".into(), rep.halved),
            ];
            ("rotating", rows, inv, serde_json::to_value(&rep))
        }
        Example::StripBlock => {
            let rep = canned::strip_cone_decay(depth.unwrap_or(7), 40, seed)?;
            let rows = rep
                .records
                .iter()
                .enumerate()
                .map(|(s, r)| {
                    ResultRow::new("strip_block", "horizontal_cone_ratio", 0.0, r.max_hi)
                        .at_scale(s, None)
                        .meta(format!(
                            "level={} I={} bound_next={:e}",
                            r.level, r.i_level, r.bound_next
                        ))
                })
                .collect();
            let inv = vec![
                ("bounded".into(), rep.bounded),
                ("decreasing".into(), rep.decreasing),
            ];
            ("strip_block", rows, inv, serde_json::to_value(&rep))
        }
    };
    let id = format!("verify-example-{name}");
    Ok(Report {
        id: id.clone(),
        rows: Some(rows),
        summary: Summary {
            schema_version: config::SCHEMA_VERSION,
            experiment: id,
            command: "verify-example".into(),
            seed,
            measure: Some(name.into()),
            invariants,
            details: details.expect("plain data"),
        },
        out: None,
    })
}

fn run_config(cli: &Cli) -> Result<Report, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Usage("this subcommand needs --config <file>".into()))?;
    let text = fs::read_to_string(path)?;
    let cfg = ExperimentConfig::from_json(&text)?;
    let wanted = match cli.command {
        Command::Measure => "measure",
        Command::Density => "density",
        Command::Hom => "hom",
        _ => "doubling",
    };
    if cfg.operation.name() != wanted {
        return Err(CliError::Usage(format!(
            "config describes a {} operation, not {wanted}",
            cfg.operation.name()
        )));
    }
    run_experiment(&cfg, cli.seed, cli.depth)
}

/// Runs a parsed config. `seed` and `depth` override the config values.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    seed: Option<u64>,
    depth: Option<usize>,
) -> Result<Report, CliError> {
    let seed = seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let depth = depth.or(cfg.depth).unwrap_or(DEFAULT_DEPTH);
    let tree = cfg.measure.build()?;
    let id = cfg
        .id
        .clone()
        .unwrap_or_else(|| cfg.operation.name().into());
    let exp = id.as_str();
    let (rows, invariants, details) = match &cfg.operation {
        Operation::Measure(op) => {
            let points = cfg.points.realize(&tree, seed)?;
            measure_rows(&tree, exp, &points, &op.radii, depth)?
        }
        Operation::Density(op) => {
            let points = cfg.points.realize(&tree, seed)?;
            let n = tree.dim();
            if op.m >= n {
                return Err(ConfigError {
                    field: "operation.density.m".into(),
                    message: format!("codimension {} must be below the dimension {n}", op.m),
                }
                .into());
            }
            let dirs = build_direction_net(n, op.alpha)?;
            let planes = build_subspace_net(n, op.m, op.alpha)?;
            let mut rows = Vec::new();
            let mut sane = true;
            let mut sups = Vec::new();
            for (i, x) in points.iter().enumerate() {
                let prof = density_profile(
                    &tree, x, op.alpha, op.r0, op.levels, &dirs, &planes, op.c, depth,
                )?;
                for (j, m) in prof.ratios.iter().enumerate() {
                    sane &= m.lo >= -1e-12 && m.hi <= 1.0 + 1e-12;
                    rows.push(
                        ResultRow::new(exp, "worst_cone_ratio", m.lo, m.hi)
                            .at_point(i, x)
                            .at_scale(j, Some(prof.radii[j]))
                            .meta(format!(
                                "running_sup={:e} freq={}",
                                prof.running_sup[j], prof.freq[j]
                            )),
                    );
                }
                sups.push(prof.running_sup.last().copied());
            }
            let details = json!({
                "direction_net": dirs.len(), "subspace_net": planes.len(), "depth": depth,
                "final_running_sup": sups,
            });
            (
                rows,
                vec![("ratios_within_unit_interval".into(), sane)],
                details,
            )
        }
        Operation::Hom(op) => {
            let est = hom_estimate(&tree, op.i, op.l_max)?;
            let rows = est
                .partial
                .iter()
                .enumerate()
                .map(|(j, &a)| {
                    ResultRow::new(exp, "hom_partial", a, a)
                        .at_scale(j, None)
                        .meta(format!("level_sum={:e}", est.level_sums[j]))
                })
                .collect();
            let sane = est.partial.iter().all(|a| a.is_finite() && *a >= 0.0);
            let details = json!({
                "k": est.k, "n": est.n, "i": est.i, "limsup_proxy": est.limsup_proxy,
                "max_all": est.max_all, "near_ties": est.near_ties,
            });
            (rows, vec![("partial_sums_finite".into(), sane)], details)
        }
        Operation::Doubling(op) => {
            let points = cfg.points.realize(&tree, seed)?;
            let c = doubling_constant(tree.dim(), op.k, op.p)?;
            let mut rows = Vec::new();
            let mut freqs = Vec::new();
            for (i, x) in points.iter().enumerate() {
                let st = doubling_frequency(&tree, x, op.gamma, op.k, c, op.l, depth)?;
                let l = st.l as f64;
                rows.push(
                    ResultRow::new(
                        exp,
                        "doubling_frequency",
                        st.count as f64 / l,
                        (st.count + st.undecided) as f64 / l,
                    )
                    .at_point(i, x)
                    .meta(format!("c={c:e} undecided={}", st.undecided)),
                );
                freqs.push(st.frequency);
            }
            let details = json!({ "c": c, "p": op.p, "frequencies": freqs });
            (rows, Vec::new(), details)
        }
    };
    Ok(Report {
        id: id.clone(),
        rows: Some(rows),
        summary: Summary {
            schema_version: config::SCHEMA_VERSION,
            experiment: id,
            command: cfg.operation.name().into(),
            seed,
            measure: Some(tree.name()),
            invariants,
            details,
        },
        out: cfg.out.clone(),
    })
}

type Outcome = (Vec<ResultRow>, Vec<(String, bool)>, serde_json::Value);

fn measure_rows(
    tree: &MeasureTree,
    exp: &str,
    points: &[Point],
    radii: &[f64],
    depth: usize,
) -> Result<Outcome, CliError> {
    let mut rows = Vec::new();
    let mut monotone = true;
    for (i, x) in points.iter().enumerate() {
        let mut vals = Vec::new();
        for (j, &r) in radii.iter().enumerate() {
            let m = tree.region_measure(
                &RegionQuery::ball(x.clone(), r),
                tree.level_for_radius(r) + depth,
            )?;
            rows.push(
                ResultRow::new(exp, "ball_measure", m.lo, m.hi)
                    .at_point(i, x)
                    .at_scale(j, Some(r)),
            );
            vals.push((r, m));
        }
        // a larger ball can never carry less mass
        for a in &vals {
            for b in &vals {
                if a.0 < b.0 && a.1.lo > b.1.hi {
                    monotone = false;
                }
            }
        }
    }
    Ok((
        rows,
        vec![("monotone_in_radius".into(), monotone)],
        json!({ "depth": depth }),
    ))
}

/// Writes the CSV and summary under `out`, or to stdout/stderr without it.
pub fn emit(rep: &Report, out: Option<&Path>) -> Result<(), CliError> {
    let summary = serde_json::to_string_pretty(&rep.summary).expect("plain data");
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            if let Some(rows) = &rep.rows {
                output::write_csv(rows, fs::File::create(dir.join(format!("{}.csv", rep.id)))?)?;
            }
            fs::write(dir.join(format!("{}.summary.json", rep.id)), summary + "\n")?;
        }
        None => match &rep.rows {
            Some(rows) => {
                output::write_csv(rows, io::stdout().lock())?;
                writeln!(io::stderr(), "{summary}")?;
            }
            None => writeln!(io::stdout(), "{summary}")?,
        },
    }
    Ok(())
}
