//! Batch pipeline: accepted multi-traces, their slices and three mutant
//! families, each analyzed and timed.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;
use std::time::Duration;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::{analyze, AnalysisConfig, AnalysisError, Verdict};
use crate::explore::{generate_accepted, ExploreConfig, GenerationMode};
use crate::ir::{Interaction, Signature};
use crate::trace::{
    mutate_insert_action, mutate_swap_actions, mutate_swap_components, random_wide_slice, MultiTrace,
    Partition, DEFAULT_WIDE_SLICE_FRACTION,
};

pub const CSV_HEADER: &str = "set,index,length,verdict,median_seconds,nodes,re_steps,rs_steps";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SetName {
    Accepted,
    Slices,
    SwapActions,
    SwapComponents,
    InsertAction,
}

impl SetName {
    pub const ALL: [SetName; 5] = [
        SetName::Accepted,
        SetName::Slices,
        SetName::SwapActions,
        SetName::SwapComponents,
        SetName::InsertAction,
    ];
}

impl fmt::Display for SetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SetName::Accepted => "T",
            SetName::Slices => "S",
            SetName::SwapActions => "M_sa",
            SetName::SwapComponents => "M_sc",
            SetName::InsertAction => "M_ia",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceMode {
    /// Every slice of every accepted multi-trace.
    Exhaustive,
    /// This many random wide slices per accepted multi-trace.
    RandomWide(usize),
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub partition: Arc<Partition>,
    /// Bounds for generating the accepted set.
    pub generation: ExploreConfig,
    pub slices: SliceMode,
    pub analysis: AnalysisConfig,
    pub repetitions: usize,
    pub seed: u64,
    pub parallel: bool,
}

impl ExperimentConfig {
    pub fn new(partition: Arc<Partition>) -> Self {
        ExperimentConfig {
            partition,
            generation: ExploreConfig {
                max_loop_instantiations: Some(2),
                ..Default::default()
            },
            slices: SliceMode::Exhaustive,
            analysis: AnalysisConfig::default(),
            repetitions: 5,
            seed: 0,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExperimentSets {
    pub accepted: Vec<MultiTrace>,
    pub slices: Vec<MultiTrace>,
    pub swap_actions: Vec<MultiTrace>,
    pub swap_components: Vec<MultiTrace>,
    pub insert_action: Vec<MultiTrace>,
}

impl ExperimentSets {
    pub fn get(&self, s: SetName) -> &[MultiTrace] {
        match s {
            SetName::Accepted => &self.accepted,
            SetName::Slices => &self.slices,
            SetName::SwapActions => &self.swap_actions,
            SetName::SwapComponents => &self.swap_components,
            SetName::InsertAction => &self.insert_action,
        }
    }
}

/// Builds the five sets. Mutants derive from slices, one per slice; slices
/// with nothing to swap yield no action-swap mutant.
pub fn build_sets(i: &Interaction, sig: &Signature, cfg: &ExperimentConfig) -> ExperimentSets {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let accepted: Vec<MultiTrace> =
        generate_accepted(i, cfg.partition.clone(), &cfg.generation, GenerationMode::Exact)
            .into_iter()
            .collect();
    let slices: Vec<MultiTrace> = match cfg.slices {
        SliceMode::Exhaustive => accepted
            .iter()
            .flat_map(|mu| mu.slices())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
        SliceMode::RandomWide(k) => accepted
            .iter()
            .flat_map(|mu| {
                (0..k)
                    .map(|_| random_wide_slice(mu, &mut rng, DEFAULT_WIDE_SLICE_FRACTION))
                    .collect::<Vec<_>>()
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
    };
    let swap_actions = slices
        .iter()
        .filter_map(|s| mutate_swap_actions(s, &mut rng).ok())
        .collect();
    let swap_components = if slices.len() < 2 || cfg.partition.len() < 2 {
        Vec::new()
    } else {
        slices
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let others: Vec<usize> = (0..slices.len()).filter(|&j| j != k).collect();
                let j = *others.choose(&mut rng).expect("at least two slices");
                let c = rng.gen_range(0..cfg.partition.len());
                mutate_swap_components(s, &slices[j], c).expect("same partition")
            })
            .collect()
    };
    let insert_action = slices
        .iter()
        .map(|s| mutate_insert_action(s, &mut rng, sig))
        .collect();
    ExperimentSets {
        accepted,
        slices,
        swap_actions,
        swap_components,
        insert_action,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub set: SetName,
    pub index: usize,
    pub length: usize,
    pub verdict: Verdict,
    pub median_seconds: f64,
    pub nodes: usize,
    pub re_steps: usize,
    pub rs_steps: usize,
    pub cap_hit: bool,
}

fn median(mut xs: Vec<Duration>) -> Duration {
    xs.sort();
    let n = xs.len();
    if n == 0 {
        Duration::ZERO
    } else if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2
    }
}

fn run_one(
    i: &Interaction,
    set: SetName,
    index: usize,
    mu: &MultiTrace,
    cfg: &ExperimentConfig,
) -> Result<ExperimentRow, AnalysisError> {
    let mut times = Vec::new();
    let mut last = None;
    for _ in 0..cfg.repetitions.max(1) {
        let r = analyze(i, mu, &cfg.analysis)?;
        times.push(r.stats.elapsed);
        last = Some(r);
    }
    let r = last.expect("at least one repetition");
    let (re, rs) = r
        .witness
        .as_ref()
        .map_or((0, 0), |w| (w.execute_count(), w.simulate_count()));
    Ok(ExperimentRow {
        set,
        index,
        length: mu.len(),
        verdict: r.verdict,
        median_seconds: median(times).as_secs_f64(),
        nodes: r.stats.nodes,
        re_steps: re,
        rs_steps: rs,
        cap_hit: r.stats.cap_hit,
    })
}

/// Analyzes every member of `sets`; rows come back ordered by set, then index.
pub fn run_sets(
    i: &Interaction,
    sets: &ExperimentSets,
    cfg: &ExperimentConfig,
) -> Result<Vec<ExperimentRow>, AnalysisError> {
    let jobs: Vec<(SetName, usize, &MultiTrace)> = SetName::ALL
        .iter()
        .flat_map(|&s| sets.get(s).iter().enumerate().map(move |(k, mu)| (s, k, mu)))
        .collect();
    let mut rows: Vec<ExperimentRow> = if cfg.parallel {
        jobs.par_iter()
            .map(|(s, k, mu)| run_one(i, *s, *k, mu, cfg))
            .collect::<Result<_, _>>()?
    } else {
        jobs.iter()
            .map(|(s, k, mu)| run_one(i, *s, *k, mu, cfg))
            .collect::<Result<_, _>>()?
    };
    rows.sort_by_key(|r| (r.set, r.index));
    Ok(rows)
}

pub fn run_experiment(
    i: &Interaction,
    sig: &Signature,
    cfg: &ExperimentConfig,
) -> Result<(ExperimentSets, Vec<ExperimentRow>), AnalysisError> {
    let sets = build_sets(i, sig, cfg);
    log::debug!(
        "experiment sets: {}",
        SetName::ALL
            .iter()
            .map(|&s| format!("{s}={}", sets.get(s).len()))
            .collect::<Vec<_>>()
            .join(" ")
    );
    let rows = run_sets(i, &sets, cfg)?;
    Ok((sets, rows))
}

pub fn to_csv(rows: &[ExperimentRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{:.9},{},{},{}\n",
            r.set, r.index, r.length, r.verdict, r.median_seconds, r.nodes, r.re_steps, r.rs_steps
        ));
    }
    out
}
