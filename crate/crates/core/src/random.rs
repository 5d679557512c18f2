//! Seeded generators for interactions, partitions and multi-traces.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::analysis::{ActSource, AnalysisKind, Goal, LoopActMeasure, LoopSource, Priorities};
use crate::explore::{GenerationMode, Strategy};
use crate::formats::hcf::{
    AnalyzeOptions, ConfigFile, ExploreOptions, ExplorePriorities, Filters, GraphicFormat, GraphicLogger,
    LoggerSpec, Orientation, PartitionSpec,
};
use crate::ir::{Action, Interaction, LifelineSet, Signature};
use crate::semantics::frontier;
use crate::trace::{MultiTrace, Partition, Trace};

/// Size bounds for [`random_interaction`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TermShape {
    pub lifelines: usize,
    pub messages: usize,
    pub max_actions: usize,
    pub max_loops: usize,
}

impl TermShape {
    pub fn signature(&self) -> Signature {
        Signature::new(
            (1..=self.lifelines).map(|k| format!("l{k}")),
            (1..=self.messages).map(|k| format!("m{k}")),
        )
        .expect("generated names are distinct")
    }
}

fn random_action<R: Rng + ?Sized>(rng: &mut R, s: &TermShape) -> Action {
    let l = rng.gen_range(0..s.lifelines);
    let m = rng.gen_range(0..s.messages);
    if rng.gen_bool(0.5) {
        Action::emit(l, m)
    } else {
        Action::receive(l, m)
    }
}

fn random_region<R: Rng + ?Sized>(rng: &mut R, n: usize) -> LifelineSet {
    (0..n).filter(|_| rng.gen_bool(0.5)).collect()
}

fn gen<R: Rng + ?Sized>(rng: &mut R, s: &TermShape, actions: usize, loops: &mut usize) -> Interaction {
    if actions == 0 {
        return Interaction::Empty;
    }
    if *loops > 0 && rng.gen_bool(0.25) {
        *loops -= 1;
        let body = gen(rng, s, actions, loops);
        return match rng.gen_range(0..3) {
            0 => Interaction::loop_s(body),
            1 => Interaction::loop_w(body),
            _ => Interaction::loop_c(random_region(rng, s.lifelines), body),
        };
    }
    if actions == 1 {
        return Interaction::act(random_action(rng, s));
    }
    let left = rng.gen_range(1..actions);
    let l = gen(rng, s, left, loops);
    let r = if rng.gen_bool(0.15) {
        Interaction::Empty
    } else {
        gen(rng, s, actions - left, loops)
    };
    match rng.gen_range(0..5) {
        0 => Interaction::strict(l, r),
        1 => Interaction::alt(l, r),
        2 => Interaction::seq(l, r),
        3 => Interaction::par(&LifelineSet::from_iter(0..s.lifelines), l, r),
        _ => Interaction::coreg(random_region(rng, s.lifelines), l, r),
    }
}

/// A term with at most `max_actions` actions and `max_loops` loop nodes.
pub fn random_interaction<R: Rng + ?Sized>(rng: &mut R, s: &TermShape) -> Interaction {
    let actions = rng.gen_range(1..=s.max_actions.max(1));
    let mut loops = s.max_loops;
    gen(rng, s, actions, &mut loops)
}

pub fn random_partition<R: Rng + ?Sized>(rng: &mut R, lifelines: usize) -> Partition {
    let mut ls: Vec<usize> = (0..lifelines).collect();
    ls.shuffle(rng);
    let mut colocs: Vec<LifelineSet> = Vec::new();
    for l in ls {
        if colocs.is_empty() || rng.gen_bool(0.5) {
            colocs.push(LifelineSet::singleton(l));
        } else {
            let k = rng.gen_range(0..colocs.len());
            colocs[k].insert(l);
        }
    }
    Partition::new(colocs, lifelines).expect("covers every lifeline once")
}

/// Independent random components, up to `max_len` actions each.
pub fn random_multitrace<R: Rng + ?Sized>(
    rng: &mut R,
    partition: Arc<Partition>,
    messages: usize,
    max_len: usize,
) -> MultiTrace {
    let comps: Vec<Trace> = partition
        .colocs()
        .iter()
        .map(|c| {
            let members: Vec<usize> = c.iter().collect();
            let n = rng.gen_range(0..=max_len);
            (0..n)
                .map(|_| {
                    let l = *members.choose(rng).expect("colocs are non-empty");
                    let m = rng.gen_range(0..messages);
                    if rng.gen_bool(0.5) {
                        Action::emit(l, m)
                    } else {
                        Action::receive(l, m)
                    }
                })
                .collect()
        })
        .collect();
    MultiTrace::new(partition, comps).expect("actions drawn from their coloc")
}

/// A random execution of up to `max_len` steps. Stops early when nothing is
/// executable.
pub fn random_walk<R: Rng + ?Sized>(rng: &mut R, i: &Interaction, max_len: usize) -> Trace {
    let mut cur = i.clone();
    let mut t = Vec::new();
    while t.len() < max_len {
        let f = frontier(&cur);
        let Some(e) = f.choose(rng) else { break };
        t.push(e.action);
        cur = e.follow_up.clone();
    }
    t
}

/// Any configuration; explicit partitions name lifelines `a`, `b`, `c`.
pub fn random_config<R: Rng + ?Sized>(rng: &mut R) -> ConfigFile {
    let strategies = [Strategy::Bfs, Strategy::Dfs, Strategy::Hcs];
    let graphic = |rng: &mut R| GraphicLogger {
        format: [GraphicFormat::Svg, GraphicFormat::Png, GraphicFormat::Dot][rng.gen_range(0..3)],
        orientation: if rng.gen() {
            Orientation::Vertical
        } else {
            Orientation::Horizontal
        },
    };
    let mut loggers = Vec::new();
    for _ in 0..rng.gen_range(0..3) {
        if rng.gen() {
            loggers.push(LoggerSpec::Graphic(graphic(rng)));
        } else {
            let partition = match rng.gen_range(0..3) {
                0 => PartitionSpec::Discrete,
                1 => PartitionSpec::Trivial,
                _ => PartitionSpec::Explicit(vec![vec!["a".into(), "b".into()], vec!["c".into()]]),
            };
            loggers.push(LoggerSpec::TraceGen {
                generation: [GenerationMode::Exact, GenerationMode::Prefix, GenerationMode::Terminal]
                    [rng.gen_range(0..3)],
                partition,
            });
        }
    }
    let opt = |rng: &mut R| rng.gen_bool(0.5).then(|| rng.gen_range(0..500));
    let explore = ExploreOptions {
        loggers,
        strategy: strategies[rng.gen_range(0..3)],
        filters: Filters {
            max_depth: opt(rng),
            max_loop_depth: opt(rng),
            max_node_number: opt(rng),
        },
        priorities: match rng.gen_range(0..3) {
            0 => ExplorePriorities::Lexicographic,
            1 => ExplorePriorities::Random,
            _ => ExplorePriorities::Weighted {
                emission: rng.gen_range(-3..4),
                reception: rng.gen_range(-3..4),
                in_loop: rng.gen_range(-3..4),
            },
        },
    };
    let kind = match rng.gen_range(0..3) {
        0 => AnalysisKind::Accept,
        1 => AnalysisKind::Prefix,
        _ => AnalysisKind::Simulate(LoopActMeasure {
            loop_source: match rng.gen_range(0..3) {
                0 => LoopSource::MaxDepth,
                1 => LoopSource::TotalLoopCount,
                _ => LoopSource::Fixed(rng.gen_range(0..20)),
            },
            act_source: if rng.gen() {
                ActSource::OutsideLoops
            } else {
                ActSource::Fixed(rng.gen_range(0..20))
            },
            multiply: rng.gen(),
            reset: rng.gen(),
            before: rng.gen(),
        }),
    };
    let analyze = AnalyzeOptions {
        loggers: (0..rng.gen_range(0..2)).map(|_| graphic(rng)).collect(),
        kind,
        strategy: strategies[rng.gen_range(0..3)],
        priorities: Priorities {
            simulate: rng.gen_range(-3..4),
            emission: rng.gen_range(-3..4),
            reception: rng.gen_range(-3..4),
            in_loop: rng.gen_range(-3..4),
        },
        goal: [Goal::Pass, Goal::WeakPass, Goal::Exhaustive][rng.gen_range(0..3)],
    };
    ConfigFile { explore, analyze }
}
