use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use peacekit::adversary::{audit_subsets, audit_uniqueness, subset_size_cap, uniqueness_sum_by_sorting};
use peacekit::graph::{adversarial_bipartite, load_graph, save_graph};
use peacekit::nibble::{idealized_trace, nibble_colour, simulate_star};
use peacekit::oracle::{min_peacefulness_with, OracleOptions};
use peacekit::{is_p_peaceful, peace_report, LogBase, PartialColouring};
use peacekit_cli::algos::{self, parse_policy, AlgoParams, Algorithm};
use peacekit_cli::families::{self, Family, GraphSpec};
use peacekit_cli::scalar::ScalarArg;
use peacekit_cli::sweep::{self, ExperimentConfig};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "peacekit", version, about = "Peaceful colourings: generators, colourers, verifiers and sweeps")]
struct Cli {
    /// Master seed; subcommands derive everything random from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Base of the logarithms in size formulas and schedules.
    #[arg(long, global = true, default_value = "natural")]
    log_base: LogBase,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Write the colouring here (JSON).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the run report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph and write it in edge-list format.
    Gen {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        delta: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Peacefulness report of a colouring.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        colouring: PathBuf,
        /// Also decide whether the colouring is total, proper and p-peaceful.
        #[arg(long)]
        p: Option<ScalarArg>,
    },
    /// Exact minimum peacefulness with a witness.
    Oracle {
        #[arg(long)]
        graph: PathBuf,
        /// Defaults to Δ + 1.
        #[arg(long)]
        colours: Option<usize>,
        #[arg(long)]
        cap: Option<u128>,
        #[command(flatten)]
        output: Output,
    },
    /// Uniform colouring, conflict removal, resampling and greedy completion.
    Oneshot {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "1/2")]
        mu: ScalarArg,
        #[arg(long)]
        palette: Option<usize>,
        #[arg(long)]
        max_rounds: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Two-phase colouring with Δ + 1 colours through a usable set Z.
    Zcolour {
        #[arg(long)]
        graph: PathBuf,
        /// Defaults to 1/8001.
        #[arg(long)]
        epsilon: Option<ScalarArg>,
        #[arg(long)]
        max_rounds: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Iterative nibble with monitors; reports the per-iteration trace.
    NibbleRun {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 4.0)]
        b_const: f64,
        /// monitor-only or restart:K
        #[arg(long, default_value = "monitor-only", value_parser = parse_policy)]
        policy: peacekit::nibble::Policy,
        #[arg(long, default_value_t = 16)]
        monitor_sample: usize,
        /// Recolour into a total colouring with at most max(Δ + 1, 4Δ/log Δ) colours.
        #[arg(long)]
        postprocess: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Monte Carlo of the idealized process on a star.
    StarSim {
        #[arg(long)]
        delta: usize,
        #[arg(long, default_value_t = 4.0)]
        b_const: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Deterministic recurrences l_i, g_i, D_i, n_i and the list targets.
    Trace {
        #[arg(long)]
        delta: usize,
        #[arg(long, default_value_t = 4.0)]
        b_const: f64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Counting audit of the bipartite construction.
    Audit {
        #[arg(long)]
        delta: usize,
        /// Colouring to audit; otherwise one is produced by --algorithm.
        #[arg(long)]
        colouring: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "greedy")]
        algorithm: Algorithm,
        /// Subsets sampled per size class (0 skips the subset audit).
        #[arg(long, default_value_t = 100)]
        subset_samples: usize,
        /// Largest subset size; defaults to the size cap of the construction.
        #[arg(long)]
        max_size: Option<usize>,
        /// Also save the generated graph.
        #[arg(long)]
        graph_out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run every cell of a TOML experiment config; resumable.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Run only these cell indices.
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<usize>>,
        /// Recompute every row from its persisted colouring instead of running.
        #[arg(long)]
        check: bool,
    },
}

fn emit(value: &impl Serialize, path: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display())),
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
            r => Ok(r?),
        },
    }
}

fn save_colouring(f: &PartialColouring, out: &Output) -> Result<()> {
    if let Some(p) = &out.out {
        f.save(p).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn read_graph(path: &Path) -> Result<peacekit::Graph> {
    load_graph(path).with_context(|| format!("reading {}", path.display()))
}

fn run_algo(path: &Path, alg: Algorithm, params: &AlgoParams, cli: &Cli, output: &Output) -> Result<()> {
    let g = read_graph(path)?;
    let run = algos::run(&g, alg, params, cli.seed, cli.log_base)?;
    save_colouring(&run.colouring, output)?;
    let report = peace_report(&g, &run.colouring)?;
    emit(
        &json!({
            "status": run.status,
            "seed": cli.seed,
            "colours_used": run.colouring.colours_used(),
            "peacefulness": report.peacefulness,
            "unique_mean": report.unique_fraction_mean(),
            "details": run.summary,
        }),
        output.report.as_deref(),
    )
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    match &cli.command {
        Command::Gen { family, n, delta, out } => {
            let spec = GraphSpec {
                family: *family,
                n: *n,
                delta: *delta,
                path: None,
                seed: cli.seed,
            };
            let g = families::obtain(&spec, families::cache_dir(None).as_deref(), cli.log_base)?;
            save_graph(&g, out)?;
            eprintln!("{} vertices, {} edges, max degree {}", g.n(), g.edge_count(), g.max_degree());
        }
        Command::Verify { graph, colouring, p } => {
            let g = read_graph(graph)?;
            let f = PartialColouring::load(colouring).with_context(|| format!("reading {}", colouring.display()))?;
            let report = peace_report(&g, &f)?;
            let verdict = match p {
                None => None,
                Some(ScalarArg::Exact(p)) => Some(is_p_peaceful(&g, &f, *p)),
                Some(ScalarArg::Float(p)) => Some(is_p_peaceful(&g, &f, *p)),
            };
            emit(
                &json!({
                    "total": f.is_total(),
                    "colours_used": f.colours_used(),
                    "peacefulness": report.peacefulness,
                    "unique_mean": report.unique_fraction_mean(),
                    "p_peaceful": verdict.map(|v| match v {
                        Ok(b) => json!(b),
                        Err(e) => json!(e.to_string()),
                    }),
                    "report": report,
                }),
                None,
            )?;
        }
        Command::Oracle {
            graph,
            colours,
            cap,
            output,
        } => {
            let g = read_graph(graph)?;
            let c = colours.unwrap_or(g.max_degree() + 1);
            let mut options = OracleOptions::default();
            if let Some(cap) = cap {
                options.cap = *cap;
            }
            let res = min_peacefulness_with(&g, c, options)?;
            save_colouring(&res.witness, output)?;
            emit(&res, output.report.as_deref())?;
        }
        Command::Oneshot {
            graph,
            mu,
            palette,
            max_rounds,
            output,
        } => {
            let params = AlgoParams {
                mu: Some(*mu),
                palette: *palette,
                max_rounds: *max_rounds,
                ..Default::default()
            };
            run_algo(graph, Algorithm::Oneshot, &params, &cli, output)?;
        }
        Command::Zcolour {
            graph,
            epsilon,
            max_rounds,
            output,
        } => {
            let params = AlgoParams {
                epsilon: *epsilon,
                max_rounds: *max_rounds,
                ..Default::default()
            };
            run_algo(graph, Algorithm::Zcolour, &params, &cli, output)?;
        }
        Command::NibbleRun {
            graph,
            b_const,
            policy,
            monitor_sample,
            postprocess,
            output,
        } => {
            let params = AlgoParams {
                b_const: Some(*b_const),
                policy: Some(*policy),
                monitor_sample: Some(*monitor_sample),
                postprocess: Some(*postprocess),
                ..Default::default()
            };
            if *postprocess {
                run_algo(graph, Algorithm::Nibble, &params, &cli, output)?;
            } else {
                // Without postprocessing the per-iteration records are the main output.
                let g = read_graph(graph)?;
                let out = nibble_colour(&g, &algos::nibble_params(&params, cli.seed, cli.log_base))?;
                save_colouring(&out.colouring, output)?;
                let iterations: Vec<_> = out
                    .stats
                    .iterations
                    .iter()
                    .map(|r| {
                        json!({
                            "iteration": r.iteration,
                            "l": r.l,
                            "list_target": r.list_target,
                            "p_star": r.p_star,
                            "anomalies": r.anomalies,
                            "monitors": r.monitors,
                        })
                    })
                    .collect();
                emit(
                    &json!({
                        "palette": out.stats.palette,
                        "i_star": out.stats.i_star,
                        "coloured": out.stats.coloured,
                        "uncoloured_by_conflict": out.stats.uncoloured_by_conflict,
                        "codegree": out.stats.codegree,
                        "codegree_warning": out.stats.codegree_warning,
                        "iterations": iterations,
                    }),
                    output.report.as_deref(),
                )?;
            }
        }
        Command::StarSim {
            delta,
            b_const,
            trials,
            report,
        } => {
            let stats = simulate_star(*delta, *b_const, cli.seed, *trials, cli.log_base)?;
            emit(&stats, report.as_deref())?;
        }
        Command::Trace { delta, b_const, report } => {
            let t = idealized_trace(*delta, *b_const, cli.log_base)?;
            let rows: Vec<_> = (1..=t.len())
                .map(|i| {
                    json!({
                        "i": i,
                        "l": t.l_at(i),
                        "list_target": t.list_target(i),
                        "g": t.g_at(i),
                        "d": t.d_at(i),
                        "n": t.n_at(i),
                    })
                })
                .collect();
            emit(
                &json!({
                    "delta": t.delta,
                    "b_const": t.b_const,
                    "alpha": t.alpha,
                    "i_star": t.i_star,
                    "l1": t.l1,
                    "schedule_ok": t.check_schedule().is_ok(),
                    "iterations": rows,
                }),
                report.as_deref(),
            )?;
        }
        Command::Audit {
            delta,
            colouring,
            algorithm,
            subset_samples,
            max_size,
            graph_out,
            report,
        } => {
            let (g, bip) = adversarial_bipartite(*delta, cli.seed, cli.log_base)?;
            if let Some(p) = graph_out {
                save_graph(&g, p)?;
            }
            let f = match colouring {
                Some(p) => PartialColouring::load(p)?,
                None => algos::run(&g, *algorithm, &AlgoParams::default(), cli.seed, cli.log_base)?.colouring,
            };
            let audit = audit_uniqueness(&g, &bip, &f)?;
            let by_sorting = uniqueness_sum_by_sorting(&g, &bip, &f);
            let peace = peace_report(&g, &f)?;
            let witness_disturbed = peace.disturbed.get(audit.witness_b).copied();
            let subsets = (*subset_samples > 0).then(|| {
                let cap = max_size.unwrap_or_else(|| subset_size_cap(*delta, cli.log_base)).max(1);
                audit_subsets(&g, &bip, cap, *subset_samples, cli.seed, cli.log_base)
            });
            if audit.m != by_sorting {
                bail!("M disagrees: {} by histogram, {by_sorting} by sorting", audit.m);
            }
            emit(
                &json!({
                    "n": g.n(),
                    "side_a": bip.side_a.len(),
                    "side_b": bip.side_b.len(),
                    "max_codegree": g.max_codegree(),
                    "m": audit.m,
                    "m_by_sorting": by_sorting,
                    "min_cb": audit.min_cb,
                    "witness_b": audit.witness_b,
                    "witness_disturbed": witness_disturbed,
                    "averaging_holds": audit.min_cb * bip.side_b.len() <= audit.m,
                    "peacefulness": peace.peacefulness,
                    "c_b": audit.c_b,
                    "subsets": subsets,
                }),
                report.as_deref(),
            )?;
        }
        Command::Sweep { config, out, only, check } => {
            let config = ExperimentConfig::load(config)?;
            if *check {
                let bad = sweep::recheck(&config, out)?;
                if !bad.is_empty() {
                    bail!("rows disagree with their colouring files: {bad:?}");
                }
                eprintln!("all recorded rows match their colouring files");
            } else {
                let s = sweep::run_experiment(&config, out, only.as_deref())?;
                eprintln!(
                    "{} cells: {} ran, {} already done, {} failed",
                    s.cells, s.ran, s.skipped, s.failed
                );
            }
        }
    }
    Ok(())
}
