//! Offline analysis of a multi-trace against an interaction.
//!
//! The search walks a graph whose vertices are `(interaction, remaining
//! multi-trace, observation flags, measure)`. Four rules produce edges:
//!
//! * `Rp`: the multi-trace is empty, go to `Ok`.
//! * `Re`: execute an action that is at the head of its component and
//!   consume it.
//! * `Rs`: execute an action without consuming anything, allowed only on a
//!   co-localization whose observation has not started yet, or whose
//!   component is exhausted. Each such step must decrease the measure.
//! * `Rf`: nothing else applies, go to `Ko`.
//!
//! Reaching `Ok` without any `Rs` gives `Pass`, reaching it only through `Rs`
//! gives `WeakPass`, and never reaching it gives `WeakFail`.

use std::collections::VecDeque;
use std::hash::Hash;
use std::fmt;
use std::time::{Duration, Instant};

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::explore::Strategy;
use crate::ir::{Action, ActionKind, Interaction, Position};
use crate::semantics::{frontier, frontier_where, membership, FrontierEntry};
use crate::trace::{MultiTrace, ObsFlags};

pub const DEFAULT_MAX_NODES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("the interaction uses lifeline {0} which the multi-trace partition does not cover")]
    SignatureMismatch(usize),
}

/// What an initial measure may depend on besides the interaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InitContext {
    /// Number of actions in the analyzed multi-trace.
    pub multitrace_len: usize,
}

/// A well-founded budget for simulation steps.
///
/// `decrement` must return a strictly smaller measure, so that chains of
/// simulation steps are finite.
pub trait MeasurePolicy {
    type Measure: Clone + Ord + Hash + fmt::Debug + fmt::Display;

    fn init(&self, i: &Interaction, ctx: &InitContext) -> Self::Measure;

    /// Budget left after simulating `step` from `i`, or `None` if blocked.
    fn decrement(
        &self,
        j: &Self::Measure,
        i: &Interaction,
        step: &FrontierEntry,
        ctx: &InitContext,
    ) -> Option<Self::Measure>;

    /// Whether every simulation allowed from `b` is also allowed from `a`
    /// with a result covering `b`'s. Lets the search skip dominated vertices.
    fn covers(&self, a: &Self::Measure, b: &Self::Measure) -> bool {
        a == b
    }

    /// Whether `Re` resets the measure to `init` of the follow-up.
    fn reset_on_execute(&self) -> bool {
        true
    }

    /// Whether `Rs` may run on a co-localization before its observation
    /// starts. Without it only multi-prefixes are recognized.
    fn simulate_before_start(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LoopSource {
    /// β: deepest loop nesting.
    #[default]
    MaxDepth,
    /// Number of loop nodes in the term.
    TotalLoopCount,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ActSource {
    /// η: actions reachable outside loops.
    #[default]
    OutsideLoops,
    Fixed(usize),
}

/// The `(λ, α)` budget: loop instantiations, then actions outside loops,
/// ordered lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LambdaAlpha {
    pub lambda: usize,
    pub alpha: usize,
}

impl LambdaAlpha {
    pub fn new(lambda: usize, alpha: usize) -> Self {
        LambdaAlpha { lambda, alpha }
    }
}

impl fmt::Display for LambdaAlpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.lambda, self.alpha)
    }
}

/// Loop/action budget policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoopActMeasure {
    pub loop_source: LoopSource,
    pub act_source: ActSource,
    /// Scale both budgets by the multi-trace length. Implies no reset.
    pub multiply: bool,
    pub reset: bool,
    pub before: bool,
}

impl Default for LoopActMeasure {
    fn default() -> Self {
        LoopActMeasure {
            loop_source: LoopSource::MaxDepth,
            act_source: ActSource::OutsideLoops,
            multiply: false,
            reset: true,
            before: true,
        }
    }
}

impl LoopActMeasure {
    /// Multiply by |μ|, never reset.
    pub fn liberal() -> Self {
        LoopActMeasure {
            multiply: true,
            reset: false,
            ..Default::default()
        }
    }

    fn scale(&self, ctx: &InitContext) -> usize {
        if self.multiply {
            ctx.multitrace_len.max(1)
        } else {
            1
        }
    }

    fn loop_budget(&self, i: &Interaction) -> usize {
        match self.loop_source {
            LoopSource::MaxDepth => i.max_loop_depth(),
            LoopSource::TotalLoopCount => i.loop_count(),
            LoopSource::Fixed(n) => n,
        }
    }

    fn act_budget(&self, i: &Interaction) -> usize {
        match self.act_source {
            ActSource::OutsideLoops => i.actions_outside_loops(),
            ActSource::Fixed(n) => n,
        }
    }
}

impl MeasurePolicy for LoopActMeasure {
    type Measure = LambdaAlpha;

    fn init(&self, i: &Interaction, ctx: &InitContext) -> LambdaAlpha {
        let s = self.scale(ctx);
        LambdaAlpha::new(self.loop_budget(i) * s, self.act_budget(i) * s)
    }

    fn decrement(
        &self,
        j: &LambdaAlpha,
        _i: &Interaction,
        step: &FrontierEntry,
        ctx: &InitContext,
    ) -> Option<LambdaAlpha> {
        let s = self.scale(ctx);
        let act = self.act_budget(&step.follow_up) * s;
        let d = step.loop_depth;
        if d == 0 {
            // with the default sources act <= alpha - 1 already holds; the
            // min keeps fixed and scaled budgets strictly decreasing
            (j.alpha >= 1).then(|| LambdaAlpha::new(j.lambda, act.min(j.alpha - 1)))
        } else {
            (j.lambda >= d).then(|| LambdaAlpha::new(j.lambda - d, act))
        }
    }

    fn covers(&self, a: &LambdaAlpha, b: &LambdaAlpha) -> bool {
        a.lambda >= b.lambda && a.alpha >= b.alpha
    }

    fn reset_on_execute(&self) -> bool {
        self.reset && !self.multiply
    }

    fn simulate_before_start(&self) -> bool {
        self.before
    }
}

/// A plain step counter: every simulation costs one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepBudget(pub usize);

impl MeasurePolicy for StepBudget {
    type Measure = usize;

    fn init(&self, _i: &Interaction, _ctx: &InitContext) -> usize {
        self.0
    }

    fn decrement(&self, j: &usize, _: &Interaction, _: &FrontierEntry, _: &InitContext) -> Option<usize> {
        j.checked_sub(1)
    }

    fn covers(&self, a: &usize, b: &usize) -> bool {
        a >= b
    }
}

/// `(λ, α) ↓` under the default policy for the action at `p`.
pub fn decrement_loopact(j: LambdaAlpha, i: &Interaction, p: &Position) -> Option<LambdaAlpha> {
    let entry = frontier(i).into_iter().find(|e| &e.position == p)?;
    LoopActMeasure::default().decrement(&j, i, &entry, &InitContext { multitrace_len: 0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    Pass,
    WeakPass,
    WeakFail,
}

/// Two-valued verdict: `Pass` for any recognized multi-trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Omega {
    Pass,
    Inconc,
}

impl Verdict {
    pub fn omega(self) -> Omega {
        match self {
            Verdict::Pass | Verdict::WeakPass => Omega::Pass,
            Verdict::WeakFail => Omega::Inconc,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "Pass",
            Verdict::WeakPass => "WeakPass",
            Verdict::WeakFail => "WeakFail",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Execute,
    Simulate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub rule: Rule,
    pub action: Action,
    pub position: Position,
}

/// A vertex of the analysis graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisNode<M> {
    pub interaction: Interaction,
    pub multitrace: MultiTrace,
    pub flags: ObsFlags,
    pub measure: M,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target<M> {
    Ok,
    Ko,
    Node(AnalysisNode<M>),
}

/// An outgoing edge; `step` is `None` for `Rp` and `Rf`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge<M> {
    pub step: Option<Step>,
    pub loop_depth: usize,
    pub target: Target<M>,
}

/// Which rules the search may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleSet {
    pub simulate: bool,
}

/// All edges leaving `v`.
pub fn successors<P: MeasurePolicy>(
    v: &AnalysisNode<P::Measure>,
    policy: &P,
    ctx: &InitContext,
    rules: RuleSet,
) -> Vec<Edge<P::Measure>> {
    if v.multitrace.is_empty() {
        return vec![Edge {
            step: None,
            loop_depth: 0,
            target: Target::Ok,
        }];
    }
    let part = v.multitrace.partition().clone();
    let window_closed = |c: usize| {
        (!v.flags.get(c) && policy.simulate_before_start()) || v.multitrace.component(c).is_empty()
    };
    let useful = |a: &Action| {
        let c = part.coloc_index(a.lifeline);
        v.multitrace.component(c).first() == Some(a) || (rules.simulate && window_closed(c))
    };
    let mut out = Vec::new();
    for e in frontier_where(&v.interaction, &useful) {
        let c = part.coloc_index(e.action.lifeline);
        let comp = v.multitrace.component(c);
        if comp.first() == Some(&e.action) {
            let measure = if policy.reset_on_execute() {
                policy.init(&e.follow_up, ctx)
            } else {
                v.measure.clone()
            };
            out.push(Edge {
                step: Some(Step {
                    rule: Rule::Execute,
                    action: e.action,
                    position: e.position.clone(),
                }),
                loop_depth: e.loop_depth,
                target: Target::Node(AnalysisNode {
                    interaction: e.follow_up.clone(),
                    multitrace: v.multitrace.tail(c),
                    flags: v.flags.with(c),
                    measure,
                }),
            });
        }
        if !rules.simulate {
            continue;
        }
        if !window_closed(c) {
            continue;
        }
        if let Some(j) = policy.decrement(&v.measure, &v.interaction, &e, ctx) {
            out.push(Edge {
                step: Some(Step {
                    rule: Rule::Simulate,
                    action: e.action,
                    position: e.position.clone(),
                }),
                loop_depth: e.loop_depth,
                target: Target::Node(AnalysisNode {
                    interaction: e.follow_up,
                    multitrace: v.multitrace.clone(),
                    flags: v.flags.clone(),
                    measure: j,
                }),
            });
        }
    }
    if out.is_empty() {
        out.push(Edge {
            step: None,
            loop_depth: 0,
            target: Target::Ko,
        });
    }
    out
}

/// Edge ordering: higher score first, then `Re` before `Rs`, then position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Priorities {
    pub simulate: i32,
    pub emission: i32,
    pub reception: i32,
    pub in_loop: i32,
}

impl Default for Priorities {
    fn default() -> Self {
        Priorities {
            simulate: -1,
            emission: 1,
            reception: 0,
            in_loop: 0,
        }
    }
}

impl Priorities {
    fn score(&self, step: &Step, loop_depth: usize) -> i64 {
        let rule = match step.rule {
            Rule::Execute => 0,
            Rule::Simulate => self.simulate,
        };
        let kind = match step.action.kind {
            ActionKind::Emit => self.emission,
            ActionKind::Receive => self.reception,
        };
        rule as i64 + kind as i64 + self.in_loop as i64 * loop_depth as i64
    }

    fn sort<M>(&self, edges: &mut [Edge<M>]) {
        edges.sort_by(|a, b| match (&a.step, &b.step) {
            (Some(sa), Some(sb)) => self
                .score(sb, b.loop_depth)
                .cmp(&self.score(sa, a.loop_depth))
                .then_with(|| (sa.rule == Rule::Simulate).cmp(&(sb.rule == Rule::Simulate)))
                .then_with(|| sa.position.cmp(&sb.position)),
            _ => std::cmp::Ordering::Equal,
        });
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Goal {
    /// Stop at the first `Ok`.
    #[default]
    WeakPass,
    /// Stop only once `Pass` is established; otherwise search on.
    Pass,
    /// Explore the whole graph of the deciding phase.
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalysisKind {
    /// Executions only.
    Accept,
    /// Executions only; `Pass` only for exactly accepted multi-traces.
    Prefix,
    Simulate(LoopActMeasure),
}

impl Default for AnalysisKind {
    fn default() -> Self {
        AnalysisKind::Simulate(LoopActMeasure::default())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalysisConfig {
    pub kind: AnalysisKind,
    pub strategy: Strategy,
    pub priorities: Priorities,
    pub goal: Goal,
    pub max_nodes: usize,
    /// Treat a vertex as failed once some remaining observed action can no
    /// longer occur in its term.
    pub dead_state_cut: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            kind: AnalysisKind::default(),
            strategy: Strategy::Dfs,
            priorities: Priorities::default(),
            goal: Goal::WeakPass,
            max_nodes: DEFAULT_MAX_NODES,
            dead_state_cut: true,
        }
    }
}

impl AnalysisConfig {
    pub fn accept() -> Self {
        AnalysisConfig {
            kind: AnalysisKind::Accept,
            ..Default::default()
        }
    }

    pub fn prefix() -> Self {
        AnalysisConfig {
            kind: AnalysisKind::Prefix,
            ..Default::default()
        }
    }

    pub fn simulate(m: LoopActMeasure) -> Self {
        AnalysisConfig {
            kind: AnalysisKind::Simulate(m),
            ..Default::default()
        }
    }
}

/// A root-to-`Ok` path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness<M> {
    pub steps: Vec<Step>,
    /// Measure at each vertex, root first; one more entry than `steps`.
    pub measures: Vec<M>,
}

impl<M> Witness<M> {
    pub fn execute_count(&self) -> usize {
        self.steps.iter().filter(|s| s.rule == Rule::Execute).count()
    }

    pub fn simulate_count(&self) -> usize {
        self.steps.iter().filter(|s| s.rule == Rule::Simulate).count()
    }

    /// The reconstructed global trace.
    pub fn global_trace(&self) -> Vec<Action> {
        self.steps.iter().map(|s| s.action).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AnalysisStats {
    pub nodes: usize,
    pub re_edges: usize,
    pub rs_edges: usize,
    pub elapsed: Duration,
    /// The node cap stopped a search.
    pub cap_hit: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisReport<M> {
    pub verdict: Verdict,
    pub witness: Option<Witness<M>>,
    pub stats: AnalysisStats,
}

/// Per-vertex annotations for rendering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Badges {
    pub started: Vec<bool>,
    pub ended: Vec<bool>,
    pub simulated_before: Vec<u32>,
    pub simulated_after: Vec<u32>,
}

/// Receives the analysis graph as it is built. Vertex ids are unique within
/// one search phase; `Ok`/`Ko` sinks get their own ids. A vertex reached
/// again is reported as a new edge to its first id.
pub trait AnalysisObserver<M> {
    fn node(&mut self, _id: usize, _node: &AnalysisNode<M>, _badges: &Badges) {}
    fn edge(&mut self, _from: usize, _to: usize, _step: Option<&Step>) {}
    fn verdict_sink(&mut self, _id: usize, _ok: bool) {}
    /// A new search phase starts; previously reported vertices are stale.
    fn reset(&mut self) {}
}

struct NoObserver;
impl<M> AnalysisObserver<M> for NoObserver {}

struct Slot<M> {
    vid: usize,
    node: AnalysisNode<M>,
    parent: Option<(usize, Step)>,
    badges: Badges,
    expanded_below: usize,
}

/// Vertices are identified by term, remaining lengths and flags; measures
/// are compared with [`MeasurePolicy::covers`].
type VertexKey = (Interaction, Vec<usize>, Vec<bool>);

fn vertex_key<M>(n: &AnalysisNode<M>) -> VertexKey {
    (
        n.interaction.clone(),
        n.multitrace.components().iter().map(Vec::len).collect(),
        n.flags.as_slice().to_vec(),
    )
}

/// How many more times each action can occur; `None` means unbounded.
/// Upper bound on occurrences of `a` in a trace of `i`; `None` when unbounded.
fn occurrence_bound(i: &Interaction, a: &Action) -> Option<usize> {
    match i {
        Interaction::Empty => Some(0),
        Interaction::Act(b) => Some(usize::from(a == b)),
        Interaction::Strict(l, r) | Interaction::CoReg(_, l, r) => {
            Some(occurrence_bound(l, a)? + occurrence_bound(r, a)?)
        }
        Interaction::Alt(l, r) => Some(occurrence_bound(l, a)?.max(occurrence_bound(r, a)?)),
        Interaction::LoopS(b) | Interaction::LoopC(_, b) => {
            if occurrence_bound(b, a) == Some(0) {
                Some(0)
            } else {
                None
            }
        }
    }
}

/// True when some action left in `mu` cannot occur in any trace of `i`.
pub fn is_dead_state(i: &Interaction, mu: &MultiTrace) -> bool {
    let mut need: Vec<(Action, usize)> = Vec::new();
    for a in mu.components().iter().flatten() {
        match need.iter_mut().find(|(b, _)| b == a) {
            Some(e) => e.1 += 1,
            None => need.push((*a, 1)),
        }
    }
    need.iter()
        .any(|(a, k)| occurrence_bound(i, a).is_some_and(|n| *k > n))
}

struct SearchOutcome<M> {
    witness: Option<Witness<M>>,
    nodes: usize,
    re_edges: usize,
    rs_edges: usize,
    cap_hit: bool,
}

struct Search<'a, P: MeasurePolicy> {
    policy: &'a P,
    ctx: InitContext,
    rules: RuleSet,
    strategy: Strategy,
    priorities: Priorities,
    short_circuit: bool,
    max_nodes: usize,
    dead_state_cut: bool,
}

impl<P: MeasurePolicy> Search<'_, P> {
    fn run(
        &self,
        root: AnalysisNode<P::Measure>,
        obs: &mut dyn AnalysisObserver<P::Measure>,
    ) -> SearchOutcome<P::Measure> {
        let n = root.flags.as_slice().len();
        let badges = Badges {
            started: vec![false; n],
            ended: vec![false; n],
            simulated_before: vec![0; n],
            simulated_after: vec![0; n],
        };
        obs.node(0, &root, &badges);
        let mut seen: FxHashMap<VertexKey, Vec<(P::Measure, usize)>> = FxHashMap::default();
        seen.insert(vertex_key(&root), vec![(root.measure.clone(), 0)]);
        let mut slots = vec![Slot {
            vid: 0,
            node: root,
            parent: None,
            badges,
            expanded_below: 0,
        }];
        let mut open: VecDeque<usize> = VecDeque::from([0]);
        let mut out = SearchOutcome {
            witness: None,
            nodes: 0,
            re_edges: 0,
            rs_edges: 0,
            cap_hit: false,
        };
        let mut next_id = 1usize;

        while let Some(id) = self.pop(&mut open, &slots) {
            if out.nodes >= self.max_nodes {
                out.cap_hit = true;
                break;
            }
            out.nodes += 1;
            mark_expanded(&mut slots, id);
            let v = &slots[id].node;
            let mut edges = if self.dead_state_cut && is_dead_state(&v.interaction, &v.multitrace) {
                vec![Edge {
                    step: None,
                    loop_depth: 0,
                    target: Target::Ko,
                }]
            } else {
                successors(v, self.policy, &self.ctx, self.rules)
            };
            self.priorities.sort(&mut edges);
            let mut children = Vec::new();
            for edge in edges {
                match edge.target {
                    Target::Ok | Target::Ko => {
                        let ok = matches!(edge.target, Target::Ok);
                        let sink = next_id;
                        next_id += 1;
                        obs.verdict_sink(sink, ok);
                        obs.edge(slots[id].vid, sink, None);
                        if ok && out.witness.is_none() {
                            out.witness = Some(witness_to(&slots, id));
                            if self.short_circuit {
                                return out;
                            }
                        }
                    }
                    Target::Node(node) => {
                        let step = edge.step.expect("node edges carry a step");
                        match step.rule {
                            Rule::Execute => out.re_edges += 1,
                            Rule::Simulate => out.rs_edges += 1,
                        }
                        let key = vertex_key(&node);
                        let known = seen.get(&key).and_then(|ms| {
                            ms.iter()
                                .find(|(m, _)| self.policy.covers(m, &node.measure))
                                .map(|(_, vid)| *vid)
                        });
                        if let Some(vid) = known {
                            obs.edge(slots[id].vid, vid, Some(&step));
                            continue;
                        }
                        let c = node.multitrace.partition().coloc_index(step.action.lifeline);
                        let mut badges = slots[id].badges.clone();
                        match step.rule {
                            Rule::Execute => {
                                badges.started[c] = true;
                                badges.ended[c] = node.multitrace.component(c).is_empty();
                            }
                            Rule::Simulate => {
                                if badges.started[c] {
                                    badges.simulated_after[c] += 1;
                                } else {
                                    badges.simulated_before[c] += 1;
                                }
                            }
                        }
                        let child = slots.len();
                        let vid = next_id;
                        next_id += 1;
                        seen.entry(key).or_default().push((node.measure.clone(), vid));
                        obs.node(vid, &node, &badges);
                        obs.edge(slots[id].vid, vid, Some(&step));
                        slots.push(Slot {
                            vid,
                            node,
                            parent: Some((id, step)),
                            badges,
                            expanded_below: 0,
                        });
                        children.push(child);
                    }
                }
            }
            match self.strategy {
                Strategy::Dfs => open.extend(children.into_iter().rev()),
                Strategy::Bfs | Strategy::Hcs => open.extend(children),
            }
        }
        out
    }

    fn pop(&self, open: &mut VecDeque<usize>, slots: &[Slot<P::Measure>]) -> Option<usize> {
        match self.strategy {
            Strategy::Bfs => open.pop_front(),
            Strategy::Dfs => open.pop_back(),
            Strategy::Hcs => {
                let (k, _) = open
                    .iter()
                    .enumerate()
                    .map(|(k, &id)| {
                        let mut score = 0;
                        let mut cur = slots[id].parent.as_ref().map(|p| p.0);
                        while let Some(a) = cur {
                            score += slots[a].expanded_below;
                            cur = slots[a].parent.as_ref().map(|p| p.0);
                        }
                        (k, (score, id))
                    })
                    .min_by_key(|(_, key)| *key)?;
                open.remove(k)
            }
        }
    }
}

fn mark_expanded<M>(slots: &mut [Slot<M>], id: usize) {
    let mut cur = Some(id);
    while let Some(a) = cur {
        slots[a].expanded_below += 1;
        cur = slots[a].parent.as_ref().map(|p| p.0);
    }
}

fn witness_to<M: Clone>(slots: &[Slot<M>], mut id: usize) -> Witness<M> {
    let mut steps = Vec::new();
    let mut measures = vec![slots[id].node.measure.clone()];
    while let Some((parent, step)) = &slots[id].parent {
        steps.push(step.clone());
        id = *parent;
        measures.push(slots[id].node.measure.clone());
    }
    steps.reverse();
    measures.reverse();
    Witness { steps, measures }
}

/// Analyzes `mu` against `i` with a custom measure policy.
///
/// A first pass without simulation decides `Pass`; only if it fails does a
/// second pass with simulation look for `WeakPass`.
pub fn analyze_with<P: MeasurePolicy>(
    i: &Interaction,
    mu: &MultiTrace,
    policy: &P,
    cfg: &AnalysisConfig,
    obs: &mut dyn AnalysisObserver<P::Measure>,
) -> Result<AnalysisReport<P::Measure>, AnalysisError> {
    check_signature(i, mu)?;
    let start = Instant::now();
    let ctx = InitContext {
        multitrace_len: mu.len(),
    };
    let root = AnalysisNode {
        interaction: i.clone(),
        multitrace: mu.clone(),
        flags: ObsFlags::unset(mu.partition().len()),
        measure: policy.init(i, &ctx),
    };
    let mut search = Search {
        policy,
        ctx,
        rules: RuleSet { simulate: false },
        strategy: cfg.strategy,
        priorities: cfg.priorities,
        short_circuit: cfg.goal != Goal::Exhaustive,
        max_nodes: cfg.max_nodes,
        dead_state_cut: cfg.dead_state_cut,
    };
    let mut stats = AnalysisStats::default();
    let first = search.run(root.clone(), obs);
    absorb(&mut stats, &first);
    if first.witness.is_some() {
        stats.elapsed = start.elapsed();
        return Ok(AnalysisReport {
            verdict: Verdict::Pass,
            witness: first.witness,
            stats,
        });
    }
    obs.reset();
    search.rules = RuleSet { simulate: true };
    let second = search.run(root, obs);
    absorb(&mut stats, &second);
    stats.elapsed = start.elapsed();
    let (verdict, witness) = match second.witness {
        Some(w) => (Verdict::WeakPass, Some(w)),
        None => (Verdict::WeakFail, None),
    };
    Ok(AnalysisReport {
        verdict,
        witness,
        stats,
    })
}

fn absorb<M>(stats: &mut AnalysisStats, o: &SearchOutcome<M>) {
    stats.nodes += o.nodes;
    stats.re_edges += o.re_edges;
    stats.rs_edges += o.rs_edges;
    stats.cap_hit |= o.cap_hit;
}

fn check_signature(i: &Interaction, mu: &MultiTrace) -> Result<(), AnalysisError> {
    let n = mu.partition().lifeline_count();
    match i.lifelines_used().iter().find(|l| *l >= n) {
        Some(l) => Err(AnalysisError::SignatureMismatch(l)),
        None => Ok(()),
    }
}

/// Analyzes `mu` against `i` as configured.
pub fn analyze(
    i: &Interaction,
    mu: &MultiTrace,
    cfg: &AnalysisConfig,
) -> Result<AnalysisReport<LambdaAlpha>, AnalysisError> {
    analyze_observed(i, mu, cfg, &mut NoObserver)
}

pub fn analyze_observed(
    i: &Interaction,
    mu: &MultiTrace,
    cfg: &AnalysisConfig,
    obs: &mut dyn AnalysisObserver<LambdaAlpha>,
) -> Result<AnalysisReport<LambdaAlpha>, AnalysisError> {
    match cfg.kind {
        AnalysisKind::Simulate(m) => analyze_with(i, mu, &m, cfg, obs),
        AnalysisKind::Accept => execute_only(i, mu, cfg, obs),
        AnalysisKind::Prefix => {
            let mut r = execute_only(i, mu, cfg, obs)?;
            if r.verdict == Verdict::Pass && !membership(i, mu) {
                r.verdict = Verdict::WeakPass;
            }
            Ok(r)
        }
    }
}

fn execute_only(
    i: &Interaction,
    mu: &MultiTrace,
    cfg: &AnalysisConfig,
    obs: &mut dyn AnalysisObserver<LambdaAlpha>,
) -> Result<AnalysisReport<LambdaAlpha>, AnalysisError> {
    check_signature(i, mu)?;
    let start = Instant::now();
    let policy = LoopActMeasure {
        loop_source: LoopSource::Fixed(0),
        act_source: ActSource::Fixed(0),
        ..Default::default()
    };
    let ctx = InitContext {
        multitrace_len: mu.len(),
    };
    let root = AnalysisNode {
        interaction: i.clone(),
        multitrace: mu.clone(),
        flags: ObsFlags::unset(mu.partition().len()),
        measure: LambdaAlpha::new(0, 0),
    };
    let search = Search {
        policy: &policy,
        ctx,
        rules: RuleSet { simulate: false },
        strategy: cfg.strategy,
        priorities: cfg.priorities,
        short_circuit: cfg.goal != Goal::Exhaustive,
        max_nodes: cfg.max_nodes,
        dead_state_cut: cfg.dead_state_cut,
    };
    let o = search.run(root, obs);
    let mut stats = AnalysisStats::default();
    absorb(&mut stats, &o);
    stats.elapsed = start.elapsed();
    let verdict = if o.witness.is_some() {
        Verdict::Pass
    } else {
        Verdict::WeakFail
    };
    Ok(AnalysisReport {
        verdict,
        witness: o.witness,
        stats,
    })
}

/// `accept` analysis kind.
pub fn analysis_kind_accept(i: &Interaction, mu: &MultiTrace) -> Result<Verdict, AnalysisError> {
    analyze(i, mu, &AnalysisConfig::accept()).map(|r| r.verdict)
}

/// `prefix` analysis kind.
pub fn analysis_kind_prefix(i: &Interaction, mu: &MultiTrace) -> Result<Verdict, AnalysisError> {
    analyze(i, mu, &AnalysisConfig::prefix()).map(|r| r.verdict)
}

/// Replays a witness from the root, checking every step against the rules.
/// Returns the final vertex.
pub fn replay_witness<P: MeasurePolicy>(
    i: &Interaction,
    mu: &MultiTrace,
    policy: &P,
    witness: &Witness<P::Measure>,
) -> Option<AnalysisNode<P::Measure>> {
    let ctx = InitContext {
        multitrace_len: mu.len(),
    };
    let mut v = AnalysisNode {
        interaction: i.clone(),
        multitrace: mu.clone(),
        flags: ObsFlags::unset(mu.partition().len()),
        measure: policy.init(i, &ctx),
    };
    for step in &witness.steps {
        let edge = successors(&v, policy, &ctx, RuleSet { simulate: true })
            .into_iter()
            .find(|e| e.step.as_ref() == Some(step))?;
        match edge.target {
            Target::Node(n) => v = n,
            _ => return None,
        }
    }
    Some(v)
}
