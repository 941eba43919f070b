//! `splitlimit` command-line tool.

mod output;
mod selftest;

use clap::{Args, Parser, Subcommand};
use output::{envelope, write_atomic, Emit};
use serde_json::json;
use splitlimit::asymptotics::{semilarge_check, solve_constants, verify_constant_identities};
use splitlimit::sampler::{Mode, Sampler, SamplerConfig, DEFAULT_EPSILON, DEFAULT_RETRY_CAP};
use splitlimit::scalar::MpFloat;
use splitlimit::stats::{k_point_with, two_point_with, ExperimentReport, Scale};
use splitlimit::treecodec::{decompose, DhTree, Graph};
use splitlimit::{crt, enumeration, Error, Family};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "splitlimit", version, about = "Counting, sampling and distance statistics of distance-hereditary graphs")]
struct Cli {
    /// Worker threads for sampling and verification (default: logical cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone, Copy, serde::Serialize)]
struct SeedArg {
    /// Falls back to SPLITLIMIT_SEED, then 0.
    #[arg(long, env = "SPLITLIMIT_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Exact tree and graph counts as CSV.
    Count {
        /// One family, or all three when omitted.
        #[arg(long)]
        family: Option<Family>,
        #[arg(long)]
        max_n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Singularity and limit constants as JSON.
    Constants {
        #[arg(long)]
        family: Family,
        /// Mantissa bits of the software float.
        #[arg(long, default_value_t = 128)]
        precision: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random graphs, one JSON file per replicate.
    Sample {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value = "exact")]
        mode: Mode,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, default_value_t = 1)]
        count: u64,
        /// Boltzmann window half-width, relative to the size.
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        /// Boltzmann parameter (default ρ(1 - 1/(2n))).
        #[arg(long)]
        x: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_RETRY_CAP)]
        retry_cap: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Queries on a tree file.
    #[command(subcommand)]
    Tree(TreeCmd),
    /// Split-decomposition tree of a graph file.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brownian CRT distance matrices.
    #[command(subcommand)]
    Crt(CrtCmd),
    /// Monte-Carlo distance statistics.
    Verify {
        #[command(subcommand)]
        which: VerifyCmd,
    },
    /// Closed-form series identities and constant identities.
    Identities {
        #[arg(long, default_value_t = 30)]
        order: usize,
        #[arg(long, default_value_t = 128)]
        precision: usize,
    },
    /// Coefficient of `M·H^{a_n}` against its semi-large powers estimate.
    Semilarge {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        x: f64,
    },
    /// Fast consistency checks.
    Selftest {
        /// Golden counts file (default: the copy built into the binary).
        #[arg(long)]
        golden: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum TreeCmd {
    /// Graph distance between two vertices.
    Distance {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, num_args = 2)]
        pair: Vec<u32>,
    },
    /// The graph encoded by the tree.
    Graph {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Family membership of the encoded graph.
    Classify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Prints the nine-leaf example tree.
    Example,
}

#[derive(Subcommand, Debug)]
enum CrtCmd {
    Sample {
        #[arg(short, long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone, serde::Serialize)]
struct VerifyArgs {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    #[command(flatten)]
    seed: SeedArg,
    /// `printed` multiplies distances by c_f, `density` by 1/c_f.
    #[arg(long, default_value = "printed")]
    scale: Scale,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    TwoPoint(VerifyArgs),
    KPoint {
        #[command(flatten)]
        args: VerifyArgs,
        #[arg(short, long, default_value_t = 3)]
        k: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global().ok();
    }
    if let Err(msg) = validate(&cli.cmd) {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match run(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", json!({ "error": e.to_string(), "kind": kind(&e) }));
            ExitCode::from(1)
        }
    }
}

/// Flag checks that clap cannot express; failures are usage errors.
fn validate(cmd: &Cmd) -> Result<(), String> {
    let positive = |name: &str, v: usize| if v == 0 { Err(format!("{name} must be at least 1")) } else { Ok(()) };
    match cmd {
        Cmd::Count { max_n, .. } => positive("--max-n", *max_n),
        Cmd::Constants { precision, .. } if *precision < 64 => Err("--precision must be at least 64".into()),
        Cmd::Sample { size, count, epsilon, .. } => {
            positive("--size", *size)?;
            positive("--count", *count as usize)?;
            if !(0.0..1.0).contains(epsilon) {
                return Err("--epsilon must lie in [0, 1)".into());
            }
            Ok(())
        }
        Cmd::Crt(CrtCmd::Sample { k, .. }) if *k == 0 || *k > 30 => Err("-k must lie in 1..=30".into()),
        Cmd::Verify { which } => {
            let a = match which {
                VerifyCmd::TwoPoint(a) => a,
                VerifyCmd::KPoint { args, k } => {
                    if *k < 2 || *k > 8 {
                        return Err("-k must lie in 2..=8".into());
                    }
                    args
                }
            };
            positive("--n", a.n)?;
            if a.reps < splitlimit::stats::MIN_REPLICATES {
                return Err(format!("--reps must be at least {}", splitlimit::stats::MIN_REPLICATES));
            }
            Ok(())
        }
        Cmd::Identities { order, .. } if *order < 2 => Err("--order must be at least 2".into()),
        Cmd::Semilarge { n, .. } => positive("--n", *n),
        _ => Ok(()),
    }
}

fn kind(e: &Error) -> &'static str {
    match e {
        Error::RetryCap { .. } => "retry-cap",
        Error::OrderTooLow { .. } => "order-too-low",
        Error::Json(_) => "json",
        Error::NotDistanceHereditary | Error::Disconnected | Error::TooSmall(_) => "graph",
        Error::InvalidTree(_) | Error::LeafNotFound(_) => "tree",
        _ => "error",
    }
}

fn read(path: &PathBuf) -> splitlimit::Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

/// Runs one subcommand; `Ok(false)` means a check failed.
fn run(cmd: Cmd) -> splitlimit::Result<bool> {
    match cmd {
        Cmd::Count { family, max_n, out } => {
            let fams = family.map(|f| vec![f]).unwrap_or_else(|| Family::ALL.to_vec());
            let header = format!(
                "# splitlimit {} count families={} max_n={}\n",
                env!("CARGO_PKG_VERSION"),
                fams.iter().map(|f| f.tag()).collect::<Vec<_>>().join("+"),
                max_n
            );
            Emit::new(out).text(&(header + &enumeration::counts_csv(&fams, max_n)))?;
            Ok(true)
        }
        Cmd::Constants { family, precision, out } => {
            let c = solve_constants::<MpFloat>(family, precision)?;
            let body = envelope(
                "constants",
                json!({ "family": family, "precision": precision }),
                serde_json::to_value(c.to_json()).expect("serializable"),
            );
            Emit::new(out).json(&body)?;
            Ok(true)
        }
        Cmd::Sample {
            family,
            size,
            mode,
            seed,
            count,
            epsilon,
            x,
            retry_cap,
            out,
        } => {
            let cfg = SamplerConfig {
                family,
                n: size,
                mode,
                epsilon,
                seed: seed.seed,
                x,
                retry_cap,
            };
            let sampler = Sampler::new(&cfg)?;
            std::fs::create_dir_all(&out).map_err(|e| Error::Invalid(format!("{}: {e}", out.display())))?;
            use rayon::prelude::*;
            (0..count).into_par_iter().try_for_each(|i| -> splitlimit::Result<()> {
                let tree = sampler.draw_replicate(cfg.seed, i)?;
                let graph = tree.gr()?;
                let body = envelope(
                    "sample",
                    json!({ "sampler": cfg, "replicate": i }),
                    json!({
                        "size": tree.size(),
                        "tree": serde_json::from_str::<serde_json::Value>(&tree.to_json())?,
                        "graph": serde_json::from_str::<serde_json::Value>(&graph.to_json())?,
                    }),
                );
                write_atomic(&out.join(format!("graph_{i:06}.json")), &pretty(&body))
            })?;
            eprintln!("wrote {count} graph(s) to {}", out.display());
            Ok(true)
        }
        Cmd::Tree(t) => run_tree(t),
        Cmd::Decompose { input, out } => {
            let g = Graph::from_json(&read(&input)?)?;
            let t = decompose(&g)?;
            Emit::new(out).text(&(t.to_json() + "\n"))?;
            Ok(true)
        }
        Cmd::Crt(CrtCmd::Sample { k, count, seed, out }) => {
            let mut text = format!(
                "# splitlimit {} crt-sample k={k} count={count} seed={}\n",
                env!("CARGO_PKG_VERSION"),
                seed.seed
            );
            let mut cols = vec!["replicate".to_string()];
            for i in 0..=k {
                for j in 0..=k {
                    cols.push(format!("d{i}_{j}"));
                }
            }
            text.push_str(&cols.join(","));
            text.push('\n');
            for r in 0..count {
                let s = crt::sample(k, &mut splitlimit::sampler::replicate_rng(seed.seed, r));
                let row: Vec<String> = std::iter::once(r.to_string())
                    .chain(s.matrix.iter().flatten().map(|v| v.to_string()))
                    .collect();
                text.push_str(&row.join(","));
                text.push('\n');
            }
            Emit::new(out).text(&text)?;
            Ok(true)
        }
        Cmd::Verify { which } => run_verify(which),
        Cmd::Identities { order, precision } => {
            let rep = enumeration::verify_identities(order)?;
            let mut ok = rep.all_passed();
            for c in &rep.checks {
                eprintln!(
                    "{} {}{}",
                    if c.passed { "pass" } else { "FAIL" },
                    c.name,
                    if c.informational { " (informational)" } else { "" }
                );
            }
            let mut consts = Vec::new();
            for f in Family::ALL {
                let r = verify_constant_identities::<MpFloat>(f, precision)?;
                ok &= r.all_passed();
                consts.push(r);
            }
            let body = envelope(
                "identities",
                json!({ "order": order, "precision": precision }),
                json!({ "series": rep, "constants": consts, "all_passed": ok }),
            );
            println!("{}", pretty(&body));
            Ok(ok)
        }
        Cmd::Semilarge { family, n, x } => {
            let r = semilarge_check(family, n, x)?;
            println!(
                "{}",
                pretty(&envelope("semilarge", json!({ "family": family, "n": n, "x": x }), serde_json::to_value(&r)?))
            );
            Ok(true)
        }
        Cmd::Selftest { golden } => Ok(selftest::run(golden.as_deref())),
    }
}

fn run_tree(t: TreeCmd) -> splitlimit::Result<bool> {
    let load = |p: &PathBuf| -> splitlimit::Result<DhTree> {
        let tree = DhTree::from_json(&read(p)?)?;
        tree.validate_reduced()?;
        Ok(tree)
    };
    match t {
        TreeCmd::Distance { input, pair } => {
            println!("{}", load(&input)?.distance(pair[0], pair[1])?);
        }
        TreeCmd::Graph { input } => println!("{}", load(&input)?.gr()?.to_json()),
        TreeCmd::Classify { input } => println!("{}", serde_json::to_string(&load(&input)?.classify())?),
        TreeCmd::Example => println!("{}", DhTree::example().to_json()),
    }
    Ok(true)
}

fn run_verify(which: VerifyCmd) -> splitlimit::Result<bool> {
    let (args, rep, ok): (VerifyArgs, ExperimentReport, bool) = match which {
        VerifyCmd::TwoPoint(a) => {
            let r = two_point_with(a.family, a.n, a.reps, a.seed.seed, a.scale)?;
            let ok = (r.mean / r.reference_mean - 1.0).abs() <= 0.1;
            (a, r, ok)
        }
        VerifyCmd::KPoint { args, k } => {
            let r = k_point_with(args.family, args.n, k, args.reps, args.seed.seed, args.scale)?;
            let ok = r.max_shape_z() <= 3.0;
            (args, r, ok)
        }
    };
    if let Some(p) = &args.csv {
        write_atomic(p, &rep.to_csv())?;
    }
    if let Some(p) = &args.svg {
        write_atomic(p, &rep.to_svg())?;
    }
    let mut summary = serde_json::to_value(&rep)?;
    summary.as_object_mut().expect("object").remove("values");
    let body = envelope("verify", serde_json::to_value(&args)?, json!({ "report": summary, "passed": ok }));
    println!("{}", pretty(&body));
    Ok(ok)
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}
