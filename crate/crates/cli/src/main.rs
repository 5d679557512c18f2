use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use orv_core::analysis::{analyze_observed, AnalysisObserver, LambdaAlpha, Rule, Verdict};
use orv_core::experiment::{run_experiment, to_csv, ExperimentConfig, SliceMode};
use orv_core::explore::{explore, ExploreLogger, TraceGen, TreeRecorder};
use orv_core::formats::hcf::{LoggerSpec, Orientation};
use orv_core::formats::{parse_hcf, parse_hif, parse_hsf, parse_htf, serialize_htf, ConfigFile};
use orv_core::render::{ascii_sketch, execution_tree_dot, term_tree_dot, AnalysisGraphRecorder};
use orv_core::{Interaction, Partition, Signature};

#[derive(Parser)]
#[command(name = "orv", version, about = "Offline runtime verification of multi-traces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a sketch of the interaction and write its term tree as DOT.
    Draw {
        hsf: PathBuf,
        hif: PathBuf,
        #[arg(short, long, default_value = ".")]
        out: PathBuf,
    },
    /// Explore the semantics and run the configured loggers.
    Explore {
        hsf: PathBuf,
        hif: PathBuf,
        hcf: Option<PathBuf>,
        #[arg(short, long, default_value = ".")]
        out: PathBuf,
        /// Seed for `priorities = random`.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Analyze a multi-trace against the interaction.
    Analyze {
        hsf: PathBuf,
        hif: PathBuf,
        htf: PathBuf,
        hcf: Option<PathBuf>,
        #[arg(short, long, default_value = ".")]
        out: PathBuf,
    },
    /// Generate the accepted, slice and mutant sets, analyze them and write a CSV.
    Experiment {
        hsf: PathBuf,
        hif: PathBuf,
        hcf: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value_t = 5)]
        repetitions: usize,
        /// Random wide slices per accepted multi-trace instead of all slices.
        #[arg(long)]
        wide: Option<usize>,
        #[arg(long)]
        sequential: bool,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("ORV_LOG")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_model(hsf: &Path, hif: &Path) -> Result<(Signature, Interaction)> {
    let sig = parse_hsf(&read(hsf)?).with_context(|| hsf.display().to_string())?;
    let i = parse_hif(&read(hif)?, &sig).with_context(|| hif.display().to_string())?;
    Ok((sig, i))
}

fn load_config(hcf: Option<&Path>) -> Result<ConfigFile> {
    match hcf {
        Some(p) => parse_hcf(&read(p)?).with_context(|| p.display().to_string()),
        None => Ok(ConfigFile::default()),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}

fn run(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Draw { hsf, hif, out } => {
            let (sig, i) = load_model(&hsf, &hif)?;
            print!("{}", ascii_sketch(&i, &sig));
            let p = write(&out, "term.dot", &term_tree_dot(&i, &sig))?;
            println!("term tree: {} nodes -> {}", i.node_count(), p.display());
            Ok(0)
        }
        Command::Explore {
            hsf,
            hif,
            hcf,
            out,
            seed,
        } => {
            let (sig, i) = load_model(&hsf, &hif)?;
            let cfg = load_config(hcf.as_deref())?;
            cmd_explore(&sig, &i, &cfg, &out, seed)
        }
        Command::Analyze {
            hsf,
            hif,
            htf,
            hcf,
            out,
        } => {
            let (sig, i) = load_model(&hsf, &hif)?;
            let cfg = load_config(hcf.as_deref())?;
            let mu = parse_htf(&read(&htf)?, &sig, None).with_context(|| htf.display().to_string())?;
            let mut graph = AnalysisGraphRecorder::new(&sig);
            let mut none = Silent;
            let obs: &mut dyn AnalysisObserver<LambdaAlpha> = if cfg.analyze.loggers.is_empty() {
                &mut none
            } else {
                &mut graph
            };
            let report = analyze_observed(&i, &mu, &cfg.analyze.to_config(), obs)?;
            println!("verdict: {}", report.verdict);
            if let Some(w) = &report.witness {
                println!("witness: {}", sig.trace_str(&w.global_trace()));
                for (s, m) in w.steps.iter().zip(&w.measures) {
                    let rule = match s.rule {
                        Rule::Execute => "Re",
                        Rule::Simulate => "Rs",
                    };
                    println!("  {m} {rule} {} @{}", sig.action_str(&s.action), s.position);
                }
                println!(
                    "steps: {} Re, {} Rs",
                    w.execute_count(),
                    w.simulate_count()
                );
            }
            println!(
                "nodes: {}{}",
                report.stats.nodes,
                if report.stats.cap_hit { " (cap hit)" } else { "" }
            );
            println!("time: {:.6} s", report.stats.elapsed.as_secs_f64());
            for (k, g) in cfg.analyze.loggers.iter().enumerate() {
                let p = write(&out, &format!("analysis_{k}.dot"), &graph.to_dot(g.orientation))?;
                println!("graph: {} vertices -> {}", graph.node_count(), p.display());
            }
            Ok(match report.verdict {
                Verdict::Pass | Verdict::WeakPass => 0,
                Verdict::WeakFail => 1,
            })
        }
        Command::Experiment {
            hsf,
            hif,
            hcf,
            seed,
            out,
            repetitions,
            wide,
            sequential,
        } => {
            let (sig, i) = load_model(&hsf, &hif)?;
            let cfg = load_config(Some(&hcf))?;
            let partition = cfg
                .explore
                .loggers
                .iter()
                .find_map(|l| match l {
                    LoggerSpec::TraceGen { partition, .. } => Some(partition.resolve(&sig)),
                    LoggerSpec::Graphic(_) => None,
                })
                .unwrap_or_else(|| Ok(Partition::discrete(&sig)))
                .map_err(anyhow::Error::msg)?;
            let mut ecfg = ExperimentConfig::new(Arc::new(partition));
            let f = cfg.explore.filters;
            ecfg.generation.max_depth = f.max_depth;
            ecfg.generation.max_node_number = f.max_node_number;
            if f.max_loop_depth.is_some() {
                ecfg.generation.max_loop_instantiations = f.max_loop_depth;
            }
            ecfg.analysis = cfg.analyze.to_config();
            ecfg.repetitions = repetitions;
            ecfg.seed = seed;
            ecfg.parallel = !sequential;
            if let Some(k) = wide {
                ecfg.slices = SliceMode::RandomWide(k);
            }
            let (_, rows) = run_experiment(&i, &sig, &ecfg)?;
            let p = write(&out, "experiment.csv", &to_csv(&rows))?;
            println!("{} analyses -> {}", rows.len(), p.display());
            Ok(0)
        }
    }
}

fn cmd_explore(sig: &Signature, i: &Interaction, cfg: &ConfigFile, out: &Path, seed: u64) -> Result<u8> {
    let mut graphics = Vec::new();
    let mut gens = Vec::new();
    for l in &cfg.explore.loggers {
        match l {
            LoggerSpec::Graphic(g) => graphics.push((g.orientation, TreeRecorder::default())),
            LoggerSpec::TraceGen {
                generation,
                partition,
            } => {
                let p = partition.resolve(sig).map_err(anyhow::Error::msg)?;
                gens.push(TraceGen::new(Arc::new(p), *generation));
            }
        }
    }
    let mut loggers: Vec<&mut dyn ExploreLogger> = Vec::new();
    for (_, r) in graphics.iter_mut() {
        loggers.push(r);
    }
    for g in gens.iter_mut() {
        loggers.push(g);
    }
    let report = explore(i, &cfg.explore.to_config(seed), &mut loggers);
    println!("nodes: {}", report.nodes);
    println!("terminals: {}", report.terminals);
    for (reason, n) in &report.cuts {
        println!("cut {reason:?}: {n}");
    }
    for (k, (o, rec)) in graphics.iter().enumerate() {
        let o: Orientation = *o;
        let p = write(out, &format!("explore_{k}.dot"), &execution_tree_dot(rec, sig, o))?;
        println!("tree -> {}", p.display());
    }
    for (k, g) in gens.iter().enumerate() {
        let dir = out.join(format!("tracegen_{k}"));
        for (id, mu) in &g.emitted {
            write(&dir, &format!("t{id}.htf"), &serialize_htf(mu, sig))?;
        }
        println!("traces: {} -> {}", g.emitted.len(), dir.display());
    }
    Ok(0)
}

struct Silent;

impl AnalysisObserver<LambdaAlpha> for Silent {}
