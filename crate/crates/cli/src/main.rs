use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use invforge::harness::{
    cmd_bench, cmd_verify, write_bench_csv, BenchOptions, Family, VerifyOptions,
};
use invforge::instances::{
    parse_cvp, parse_dimacs, parse_graph_document, HalfCliqueQuery, VertexCoverQuery,
};
use invforge::oracles::{
    enumerate_patterns_invert, falsify_real, invert_binary_bruteforce, FalsifyOptions, OracleConfig,
};
use invforge::reductions::{
    cvp_to_approx_binary, cvp_to_approx_real, halfclique_to_approx, halfclique_to_approx_real,
    sat_to_exact_binary, sat_to_exact_real, vertexcover_to_approx, GadgetMode, ReduceOptions,
    ReductionArtifact,
};

const EXIT_YES: u8 = 0;
const EXIT_NO: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CAP: u8 = 3;

/// Compile hardness reductions into ReLU inversion queries and check them.
///
/// Exit codes: 0 YES or success, 1 NO or failed verification, 2 usage or
/// parse error, 3 enumeration cap exceeded. INVFORGE_CAP overrides all caps.
#[derive(Parser)]
#[command(name = "invforge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a source instance into a reduction artifact.
    Reduce {
        #[arg(long, value_enum)]
        from: Source,
        #[arg(long, value_enum)]
        latent: Latent,
        /// Norm exponent. SAT uses 1; CVP takes it from the instance file.
        #[arg(long)]
        p: Option<u32>,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Accept exponents of the wrong parity.
        #[arg(long)]
        relax_parity: bool,
        /// Binarization gadget mode for real latents; chosen from δ when absent.
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
    /// Decide the inversion query stored in an artifact.
    Invert {
        #[arg(long)]
        query: PathBuf,
        #[arg(long, value_enum)]
        oracle: OracleKind,
        #[arg(long, default_value_t = 1000)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare source and inversion oracles on generated instances.
    Verify {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        p: Option<u32>,
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = 1000)]
        restarts: usize,
    },
    /// Time exhaustive inversion across source sizes and write a CSV.
    Bench {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n_from: usize,
        #[arg(long)]
        n_to: usize,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Source {
    Sat,
    Cvp,
    Halfclique,
    Vertexcover,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Latent {
    Binary,
    Real,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Quarter,
    General,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    Brute,
    Pattern,
    Falsify,
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn reduce(
    from: Source,
    latent: Latent,
    p: Option<u32>,
    input: &Path,
    opts: ReduceOptions,
    mode: Option<GadgetMode>,
) -> Result<ReductionArtifact> {
    let text = read_text(input)?;
    let real = latent == Latent::Real;
    let art = match from {
        Source::Sat => {
            if p.is_some_and(|p| p != 1) {
                bail!(invforge::Error::Unsupported(
                    "SAT reductions use p = 1".into()
                ));
            }
            let f = parse_dimacs(&text)?;
            if real {
                sat_to_exact_real(&f)?
            } else {
                sat_to_exact_binary(&f)?
            }
        }
        Source::Cvp => {
            let c = parse_cvp(&text)?;
            if let Some(p) = p.filter(|&p| p != c.p()) {
                bail!(invforge::Error::Invalid(format!(
                    "--p {p} disagrees with the instance exponent {}",
                    c.p()
                )));
            }
            if real {
                cvp_to_approx_real(&c, opts, mode)?
            } else {
                cvp_to_approx_binary(&c, opts)?
            }
        }
        Source::Halfclique => {
            let doc = parse_graph_document(&text)?;
            let bound = doc.halfclique_bound.ok_or_else(|| {
                invforge::Error::Invalid("graph file has no `halfclique <M>` line".into())
            })?;
            let q = HalfCliqueQuery::new(doc.graph, bound)?;
            let p = p.unwrap_or(2);
            if real {
                halfclique_to_approx_real(&q, p, opts, mode)?
            } else {
                halfclique_to_approx(&q, p, opts)?
            }
        }
        Source::Vertexcover => {
            if real {
                bail!(invforge::Error::Unsupported(
                    "vertex cover has a binary-latent reduction only".into()
                ));
            }
            let doc = parse_graph_document(&text)?;
            let size = doc.cover_size.ok_or_else(|| {
                invforge::Error::Invalid("graph file has no `vertexcover <q>` line".into())
            })?;
            vertexcover_to_approx(
                &VertexCoverQuery::new(doc.graph, size)?,
                p.unwrap_or(2),
                opts,
            )?
        }
    };
    Ok(art)
}

fn run(cli: Cli) -> Result<u8> {
    let cfg = OracleConfig::from_env();
    match cli.command {
        Command::Reduce {
            from,
            latent,
            p,
            input,
            out,
            relax_parity,
            mode,
        } => {
            let mode = mode.map(|m| match m {
                Mode::Quarter => GadgetMode::Quarter,
                Mode::General => GadgetMode::General,
            });
            let art = reduce(
                from,
                latent,
                p,
                &input,
                ReduceOptions { relax_parity },
                mode,
            )?;
            fs::write(&out, art.to_json()).with_context(|| format!("writing {}", out.display()))?;
            println!("{}", art.summary());
            Ok(EXIT_YES)
        }
        Command::Invert {
            query,
            oracle,
            restarts,
            seed,
        } => {
            let bytes = fs::read(&query).with_context(|| format!("reading {}", query.display()))?;
            let art = ReductionArtifact::from_json(&bytes)?;
            let verdict = match oracle {
                OracleKind::Brute => invert_binary_bruteforce(&art.query, &cfg)?,
                OracleKind::Pattern => enumerate_patterns_invert(&art.query, &cfg)?,
                OracleKind::Falsify => {
                    let mut opts = FalsifyOptions::with_restarts(restarts, seed);
                    if let Some(g) = &art.constants.gadget {
                        opts.corners.push((Default::default(), g.upper.clone()));
                    }
                    falsify_real(&art.query, &opts)?
                }
            };
            println!("{}", verdict.to_json());
            Ok(if verdict.is_yes() { EXIT_YES } else { EXIT_NO })
        }
        Command::Verify {
            family,
            n_max,
            trials,
            seed,
            p,
            exhaustive,
            restarts,
        } => {
            let mut opts = VerifyOptions::new(family, n_max, trials, seed);
            opts.p = p;
            opts.exhaustive = exhaustive;
            opts.restarts = restarts;
            opts.oracle = cfg;
            let report = cmd_verify(&opts)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(if report.passed() { EXIT_YES } else { EXIT_NO })
        }
        Command::Bench {
            family,
            n_from,
            n_to,
            trials,
            seed,
            out,
        } => {
            let mut opts = BenchOptions::new(family, n_from, n_to, trials);
            opts.seed = seed;
            opts.oracle = cfg.sequential();
            let records = cmd_bench(&opts)?;
            let file =
                fs::File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            write_bench_csv(&records, std::io::BufWriter::new(file))?;
            write_bench_csv(&records, std::io::stdout().lock())?;
            Ok(EXIT_YES)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            let capped = err
                .downcast_ref::<invforge::Error>()
                .is_some_and(|e| matches!(e, invforge::Error::CapExceeded { .. }));
            ExitCode::from(if capped { EXIT_CAP } else { EXIT_USAGE })
        }
    }
}
