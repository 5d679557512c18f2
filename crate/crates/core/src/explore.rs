//! Bounded exploration of the execution tree of an interaction.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ir::{Action, ActionKind, Interaction, Position};
use crate::semantics::{accepts_empty, frontier, FrontierEntry};
use crate::trace::{MultiTrace, Partition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    Bfs,
    #[default]
    Dfs,
    /// High coverage search: expand the open node whose path shares the
    /// least prefix with already expanded nodes.
    Hcs,
}

/// Order in which the executable actions of a node are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FrontierOrder {
    /// By position, top of the term first.
    #[default]
    Lexicographic,
    Random(u64),
    /// Higher total weight first; `in_loop` is scaled by loop depth.
    Weighted {
        emission: i32,
        reception: i32,
        in_loop: i32,
    },
}

impl FrontierOrder {
    pub(crate) fn weight(&self, e: &FrontierEntry) -> i64 {
        match *self {
            FrontierOrder::Weighted {
                emission,
                reception,
                in_loop,
            } => {
                let kind = match e.action.kind {
                    ActionKind::Emit => emission,
                    ActionKind::Receive => reception,
                };
                kind as i64 + in_loop as i64 * e.loop_depth as i64
            }
            _ => 0,
        }
    }
}

/// Stateful scheduler for one run.
pub(crate) struct Scheduler {
    order: FrontierOrder,
    rng: Option<ChaCha8Rng>,
}

impl Scheduler {
    pub(crate) fn new(order: FrontierOrder) -> Self {
        let rng = match order {
            FrontierOrder::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        Scheduler { order, rng }
    }

    pub(crate) fn sort(&mut self, entries: &mut [FrontierEntry]) {
        match &mut self.rng {
            Some(rng) => entries.shuffle(rng),
            None => {
                let order = self.order;
                entries.sort_by(|a, b| {
                    order
                        .weight(b)
                        .cmp(&order.weight(a))
                        .then_with(|| a.position.cmp(&b.position))
                });
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExploreConfig {
    pub strategy: Strategy,
    pub max_depth: Option<usize>,
    /// Cumulative loop instantiations along a path; each step adds the loop
    /// depth of the executed action.
    pub max_loop_instantiations: Option<usize>,
    pub max_node_number: Option<usize>,
    pub order: FrontierOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CutReason {
    MaxDepth,
    MaxLoopInstantiations,
    MaxNodeNumber,
}

/// A node of the execution tree as seen by loggers.
#[derive(Debug)]
pub struct ExploreNode<'a> {
    pub id: usize,
    pub parent: Option<usize>,
    pub depth: usize,
    pub loop_instantiations: usize,
    pub interaction: &'a Interaction,
    /// Global trace from the root.
    pub trace: &'a [Action],
}

impl ExploreNode<'_> {
    pub fn accepts_empty(&self) -> bool {
        accepts_empty(self.interaction)
    }
}

/// Observer of an exploration. All methods default to no-ops.
pub trait ExploreLogger {
    fn node(&mut self, _node: &ExploreNode<'_>) {}
    fn edge(&mut self, _from: usize, _to: usize, _action: Action, _position: &Position) {}
    fn cut(&mut self, _node: usize, _reason: CutReason) {}
    /// Called once a node is known to have no explored child.
    fn terminal(&mut self, _node: &ExploreNode<'_>) {}
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExplorationReport {
    pub nodes: usize,
    pub terminals: usize,
    pub cuts: BTreeMap<CutReason, usize>,
}

struct TreeNode {
    parent: Option<usize>,
    depth: usize,
    loops: usize,
    interaction: Interaction,
    trace: Vec<Action>,
    expanded_below: usize,
}

pub fn explore(
    i: &Interaction,
    cfg: &ExploreConfig,
    loggers: &mut [&mut dyn ExploreLogger],
) -> ExplorationReport {
    let mut report = ExplorationReport::default();
    let mut sched = Scheduler::new(cfg.order);
    let mut nodes = vec![TreeNode {
        parent: None,
        depth: 0,
        loops: 0,
        interaction: i.clone(),
        trace: Vec::new(),
        expanded_below: 0,
    }];
    notify_node(&nodes, 0, loggers);
    let mut open: VecDeque<usize> = VecDeque::from([0]);
    let cap = cfg.max_node_number.unwrap_or(usize::MAX);

    while let Some(id) = pop_next(cfg.strategy, &mut open, &nodes) {
        let mut entries = frontier(&nodes[id].interaction);
        sched.sort(&mut entries);
        let mut children = Vec::new();
        for e in entries {
            let depth = nodes[id].depth + 1;
            let loops = nodes[id].loops + e.loop_depth;
            let reason = if cfg.max_depth.is_some_and(|d| depth > d) {
                Some(CutReason::MaxDepth)
            } else if cfg.max_loop_instantiations.is_some_and(|l| loops > l) {
                Some(CutReason::MaxLoopInstantiations)
            } else if nodes.len() >= cap {
                Some(CutReason::MaxNodeNumber)
            } else {
                None
            };
            if let Some(r) = reason {
                *report.cuts.entry(r).or_default() += 1;
                for l in loggers.iter_mut() {
                    l.cut(id, r);
                }
                continue;
            }
            let mut trace = nodes[id].trace.clone();
            trace.push(e.action);
            let child = nodes.len();
            nodes.push(TreeNode {
                parent: Some(id),
                depth,
                loops,
                interaction: e.follow_up,
                trace,
                expanded_below: 0,
            });
            for l in loggers.iter_mut() {
                l.edge(id, child, e.action, &e.position);
            }
            notify_node(&nodes, child, loggers);
            children.push(child);
        }
        mark_expanded(&mut nodes, id);
        if children.is_empty() {
            report.terminals += 1;
            let view = view(&nodes, id);
            for l in loggers.iter_mut() {
                l.terminal(&view);
            }
        }
        match cfg.strategy {
            // the stack is popped from the back: push in reverse so the
            // first scheduled child is expanded first
            Strategy::Dfs => open.extend(children.into_iter().rev()),
            Strategy::Bfs | Strategy::Hcs => open.extend(children),
        }
    }
    report.nodes = nodes.len();
    report
}

fn pop_next(strategy: Strategy, open: &mut VecDeque<usize>, nodes: &[TreeNode]) -> Option<usize> {
    match strategy {
        Strategy::Bfs => open.pop_front(),
        Strategy::Dfs => open.pop_back(),
        Strategy::Hcs => {
            // score: total shared prefix with expanded nodes, which is the
            // sum of expanded-subtree sizes over the node's ancestors
            let (k, _) = open
                .iter()
                .enumerate()
                .map(|(k, &id)| {
                    let mut score = 0;
                    let mut cur = nodes[id].parent;
                    while let Some(a) = cur {
                        score += nodes[a].expanded_below;
                        cur = nodes[a].parent;
                    }
                    (k, (score, id))
                })
                .min_by_key(|(_, key)| *key)?;
            open.remove(k)
        }
    }
}

fn mark_expanded(nodes: &mut [TreeNode], id: usize) {
    let mut cur = Some(id);
    while let Some(a) = cur {
        nodes[a].expanded_below += 1;
        cur = nodes[a].parent;
    }
}

fn view(nodes: &[TreeNode], id: usize) -> ExploreNode<'_> {
    let n = &nodes[id];
    ExploreNode {
        id,
        parent: n.parent,
        depth: n.depth,
        loop_instantiations: n.loops,
        interaction: &n.interaction,
        trace: &n.trace,
    }
}

fn notify_node(nodes: &[TreeNode], id: usize, loggers: &mut [&mut dyn ExploreLogger]) {
    let v = view(nodes, id);
    for l in loggers.iter_mut() {
        l.node(&v);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GenerationMode {
    /// Paths ending in a node that accepts the empty trace.
    #[default]
    Exact,
    /// Every path.
    Prefix,
    /// Paths ending in a node with no explored child.
    Terminal,
}

/// Collects the multi-traces of explored paths.
#[derive(Debug, Clone)]
pub struct TraceGen {
    pub partition: Arc<Partition>,
    pub mode: GenerationMode,
    /// `(node id, multi-trace)` in emission order.
    pub emitted: Vec<(usize, MultiTrace)>,
}

impl TraceGen {
    pub fn new(partition: Arc<Partition>, mode: GenerationMode) -> Self {
        TraceGen {
            partition,
            mode,
            emitted: Vec::new(),
        }
    }

    pub fn traces(&self) -> BTreeSet<MultiTrace> {
        self.emitted.iter().map(|(_, m)| m.clone()).collect()
    }

    fn emit(&mut self, node: &ExploreNode<'_>) {
        let mu = MultiTrace::from_global(node.trace, self.partition.clone());
        self.emitted.push((node.id, mu));
    }
}

impl ExploreLogger for TraceGen {
    fn node(&mut self, node: &ExploreNode<'_>) {
        match self.mode {
            GenerationMode::Exact if node.accepts_empty() => self.emit(node),
            GenerationMode::Prefix => self.emit(node),
            _ => {}
        }
    }

    fn terminal(&mut self, node: &ExploreNode<'_>) {
        if self.mode == GenerationMode::Terminal {
            self.emit(node);
        }
    }
}

/// Records the explored tree for rendering.
#[derive(Debug, Clone, Default)]
pub struct TreeRecorder {
    pub nodes: Vec<(usize, Interaction, bool)>,
    pub edges: Vec<(usize, usize, Action, Position)>,
    pub cuts: Vec<(usize, CutReason)>,
}

impl ExploreLogger for TreeRecorder {
    fn node(&mut self, node: &ExploreNode<'_>) {
        self.nodes
            .push((node.id, node.interaction.clone(), node.accepts_empty()));
    }

    fn edge(&mut self, from: usize, to: usize, action: Action, position: &Position) {
        self.edges.push((from, to, action, position.clone()));
    }

    fn cut(&mut self, node: usize, reason: CutReason) {
        self.cuts.push((node, reason));
    }
}

/// Multi-traces of `i` on `partition` within the bounds of `cfg`.
pub fn generate_accepted(
    i: &Interaction,
    partition: Arc<Partition>,
    cfg: &ExploreConfig,
    mode: GenerationMode,
) -> BTreeSet<MultiTrace> {
    let mut tg = TraceGen::new(partition, mode);
    explore(i, cfg, &mut [&mut tg]);
    tg.traces()
}
