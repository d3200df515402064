use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use belyi::experiments::{run_grid, GridConfig, TrialStatus};
use belyi::formats::{read_graph, write_graph, DivisionSummary, FaceSummary};
use belyi::verify::{self, Suite, VerifyConfig};
use belyi::Error;
use belyi_core::cheeger_cut::{cheeger_upper_bound, CutError};
use belyi_core::farey_tiling::{count_intersecting, enumerate_level, m_bound, n_bound, Fraction};
use belyi_core::ribbon_graph::{sample, sample_connected, RibbonGraph};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

const EXIT_INVARIANT: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_EMPTY_I1: u8 = 3;

const AFTER_HELP: &str = "\
Exit codes: 0 ok, 1 invariant failure, 2 usage or validation error, 3 no large cusp (empty I1).

Graph files are JSON: {\"n\": N, \"matching\": [[d1, d2], ...]} over darts 0..6N with
the rotation (3v, 3v+1, 3v+2) at vertex v.";

const GRID_HELP: &str = "\
Writes DIR/trials.csv (one row per trial, ordered by n then trial) and DIR/summary.json.

CSV columns:
  schema_version  format version (1)
  n               number of triangles
  seed            per-trial seed derived from (--seed, n, trial)
  trial           trial index
  status          ok | disconnected | empty_i1 | degenerate | invariant_failed
  lht             number of cusps (left-hand-turn paths)
  genus           genus, empty when disconnected
  connected       true or false
  min_d, max_d    smallest and largest cusp degree
  sum_d           sum of cusp degrees (always 6n)
  num_i1          number of large cusps
  boundary_len    length of the dividing curve, empty without a division
  area_a, area_b  areas of the two sides
  h_upper         boundary_len / min(area_a, area_b)
  s2_size         number of segments within the horoball strips (--l)
  wall_time_ms    wall-clock time of the trial, 0 with --no-timing";

#[derive(Parser)]
#[command(
    name = "belyi",
    version,
    about = "Random Belyi surfaces and Cheeger-constant upper bounds"
)]
#[command(after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a random cubic ribbon graph and write it as JSON.
    Sample {
        /// Number of triangles (vertices of the cubic graph), at least 1.
        #[arg(long)]
        n: usize,
        /// Random seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Resample until the graph is connected.
        #[arg(long)]
        connected: bool,
        /// Write the graph here instead of standard output; face statistics
        /// then go to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the dividing curve and print the Cheeger upper bound as JSON.
    Cheeger {
        #[command(flatten)]
        source: GraphSource,
        /// Cut height factor: large cusp i is cut at y = F * n * d_i. Must be
        /// positive with F * n * d_i > 1.
        #[arg(long, default_value_t = 1.0)]
        y_factor: f64,
    },
    /// Farey tiling counts and bounds for horoball length L.
    Farey {
        /// Horoball length: integer, "a/b" or decimal, positive.
        #[arg(long)]
        l: Fraction,
        /// Also list the triangles of this level (1..=30).
        #[arg(long)]
        level: Option<u32>,
    },
    /// Run invariant suites; prints the first counterexample and exits 1 on failure.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        /// Number of seeds per n.
        #[arg(long, default_value_t = 100)]
        seeds: usize,
        /// Comma-separated values of n.
        #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
        n_list: Vec<usize>,
        /// Base seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a seeded Monte Carlo grid and write CSV plus a JSON summary.
    #[command(after_help = GRID_HELP)]
    Grid {
        /// Comma-separated values of n, each at least 3.
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        /// Trials per value of n.
        #[arg(long)]
        trials: usize,
        /// Base seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory, created if missing.
        #[arg(long)]
        out: PathBuf,
        /// Cut height factor, as for `cheeger`.
        #[arg(long, default_value_t = 1.0)]
        y_factor: f64,
        /// Horoball length for the s2_size column.
        #[arg(long, default_value = "4")]
        l: Fraction,
        /// Constant c in the LHT <= c ln n row check.
        #[arg(long, default_value_t = 10.0)]
        c: f64,
        /// Write 0 in wall_time_ms so reruns are byte-identical.
        #[arg(long)]
        no_timing: bool,
    },
}

#[derive(Args)]
#[group(required = true, multiple = true)]
struct GraphSource {
    /// Sample a graph with this many triangles.
    #[arg(long, conflicts_with = "graph")]
    n: Option<usize>,
    /// Seed for the sampled graph.
    #[arg(long, default_value_t = 0, conflicts_with = "graph")]
    seed: u64,
    /// Read the graph from this JSON file, or "-" for standard input.
    #[arg(long)]
    graph: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Identities,
    Farey,
    Division,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Identities => Suite::Identities,
            SuiteArg::Farey => Suite::Farey,
            SuiteArg::Division => Suite::Division,
            SuiteArg::All => Suite::All,
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.to_string(),
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        usage(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        usage(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        usage(e)
    }
}

fn print_json(value: &impl Serialize) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn load_graph(source: &GraphSource) -> Result<(RibbonGraph, Option<u64>), Failure> {
    match (&source.graph, source.n) {
        (Some(path), _) if path.as_os_str() == "-" => Ok((read_graph(io::stdin().lock())?, None)),
        (Some(path), _) => {
            let file = File::open(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            Ok((read_graph(BufReader::new(file))?, None))
        }
        (None, Some(n)) => Ok((sample(n, source.seed).map_err(usage)?, Some(source.seed))),
        (None, None) => Err(usage("either --n or --graph is required")),
    }
}

#[derive(Serialize)]
struct LevelListing {
    level: u32,
    triangles: Vec<[String; 3]>,
}

#[derive(Serialize)]
struct FareyReport {
    l: String,
    count_intersecting: u64,
    n_bound: u64,
    m_bound: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    level: Option<LevelListing>,
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Sample {
            n,
            seed,
            connected,
            out,
        } => {
            let g = if connected {
                sample_connected(n, seed).map_err(usage)?.graph
            } else {
                sample(n, seed).map_err(usage)?
            };
            let summary = FaceSummary::new(&g.faces());
            match out {
                Some(path) => {
                    let mut w = BufWriter::new(File::create(&path)?);
                    write_graph(&mut w, &g)?;
                    w.flush()?;
                    print_json(&summary)
                }
                None => {
                    write_graph(io::stdout().lock(), &g)?;
                    eprintln!("{}", serde_json::to_string(&summary)?);
                    Ok(())
                }
            }
        }
        Command::Cheeger { source, y_factor } => {
            if !(y_factor > 0.0 && y_factor.is_finite()) {
                return Err(usage(format!(
                    "--y-factor must be positive, got {y_factor}"
                )));
            }
            let (g, seed) = load_graph(&source)?;
            let fd = g.faces();
            match cheeger_upper_bound(&g, &fd, y_factor) {
                Ok(div) => print_json(&DivisionSummary::new(&div, &fd, seed, y_factor)),
                Err(CutError::EmptyI1) => Err(Failure {
                    code: EXIT_EMPTY_I1,
                    message: format!(
                        "no cusp has degree above n/(ln n)^2 (n = {}, max degree {}); nothing to cut",
                        g.n(),
                        fd.max_degree()
                    ),
                }),
                Err(e) => Err(usage(e)),
            }
        }
        Command::Farey { l, level } => {
            let level = match level {
                Some(m) => {
                    let triangles = enumerate_level(m).map_err(usage)?;
                    Some(LevelListing {
                        level: m,
                        triangles: triangles
                            .iter()
                            .map(|t| [t.left.to_string(), t.apex.to_string(), t.right.to_string()])
                            .collect(),
                    })
                }
                None => None,
            };
            print_json(&FareyReport {
                l: l.to_string(),
                count_intersecting: count_intersecting(l).map_err(usage)?,
                n_bound: n_bound(l).map_err(usage)?,
                m_bound: m_bound(l).map_err(usage)?,
                level,
            })
        }
        Command::Verify {
            suite,
            seeds,
            n_list,
            seed,
        } => {
            if n_list.contains(&0) {
                return Err(usage("--n-list values must be positive"));
            }
            let config = VerifyConfig {
                n_values: n_list,
                seeds,
                base_seed: seed,
                ..VerifyConfig::default()
            };
            match verify::run(suite.into(), &config) {
                Ok(reports) => {
                    for r in reports {
                        println!("{}: {} checks passed", r.suite, r.checks);
                    }
                    Ok(())
                }
                Err(c) => Err(Failure {
                    code: EXIT_INVARIANT,
                    message: format!("counterexample {c}"),
                }),
            }
        }
        Command::Grid {
            n_list,
            trials,
            seed,
            out,
            y_factor,
            l,
            c,
            no_timing,
        } => {
            let config = GridConfig {
                n_values: n_list,
                trials,
                base_seed: seed,
                y_factor,
                l: Some(l),
                c,
                timing: !no_timing,
            };
            config.validate()?;
            let records = run_grid(&config, &out)?;
            let failed = records
                .iter()
                .filter(|r| r.status == TrialStatus::InvariantFailed)
                .count();
            println!(
                "wrote {} rows to {}",
                records.len(),
                out.join("trials.csv").display()
            );
            if failed > 0 {
                return Err(Failure {
                    code: EXIT_INVARIANT,
                    message: format!("{failed} trials violated a row invariant"),
                });
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("belyi: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
