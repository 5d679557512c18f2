//! Interaction terms, signatures and positions.
//!
//! Lifelines and messages are interned as indices into a [`Signature`], so
//! actions are small `Copy` values and term equality is cheap.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub type LifelineId = usize;
pub type MessageId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IrError {
    #[error("duplicate identifier `{0}`")]
    DuplicateIdentifier(String),
    #[error("identifiers must be non-empty")]
    EmptyIdentifier,
    #[error("invalid position {0}")]
    InvalidPosition(Position),
}

/// The lifelines `L` and messages `M` a model is written over.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Signature {
    lifelines: Vec<String>,
    messages: Vec<String>,
}

impl Signature {
    pub fn new<L, M>(lifelines: L, messages: M) -> Result<Self, IrError>
    where
        L: IntoIterator,
        L::Item: Into<String>,
        M: IntoIterator,
        M::Item: Into<String>,
    {
        let lifelines: Vec<String> = lifelines.into_iter().map(Into::into).collect();
        let messages: Vec<String> = messages.into_iter().map(Into::into).collect();
        let mut seen = BTreeSet::new();
        for name in lifelines.iter().chain(messages.iter()) {
            if name.is_empty() {
                return Err(IrError::EmptyIdentifier);
            }
            if !seen.insert(name.as_str()) {
                return Err(IrError::DuplicateIdentifier(name.clone()));
            }
        }
        Ok(Signature {
            lifelines,
            messages,
        })
    }

    pub fn lifelines(&self) -> &[String] {
        &self.lifelines
    }

    pub fn messages(&self) -> &[String] {
        &self.messages
    }

    pub fn lifeline_count(&self) -> usize {
        self.lifelines.len()
    }

    pub fn message_count(&self) -> usize {
        self.messages.len()
    }

    pub fn lifeline(&self, name: &str) -> Option<LifelineId> {
        self.lifelines.iter().position(|l| l == name)
    }

    pub fn message(&self, name: &str) -> Option<MessageId> {
        self.messages.iter().position(|m| m == name)
    }

    pub fn lifeline_name(&self, id: LifelineId) -> &str {
        &self.lifelines[id]
    }

    pub fn message_name(&self, id: MessageId) -> &str {
        &self.messages[id]
    }

    /// The full lifeline set `L`.
    pub fn all_lifelines(&self) -> LifelineSet {
        (0..self.lifelines.len()).collect()
    }

    /// Renders an action as `l!m` or `l?m`.
    pub fn action_str(&self, a: &Action) -> String {
        format!(
            "{}{}{}",
            self.lifeline_name(a.lifeline),
            a.kind.symbol(),
            self.message_name(a.message)
        )
    }

    pub fn trace_str(&self, t: &[Action]) -> String {
        if t.is_empty() {
            return "ε".to_string();
        }
        t.iter()
            .map(|a| self.action_str(a))
            .collect::<Vec<_>>()
            .join(".")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ActionKind {
    Emit,
    Receive,
}

impl ActionKind {
    pub fn symbol(self) -> char {
        match self {
            ActionKind::Emit => '!',
            ActionKind::Receive => '?',
        }
    }
}

/// A communication action `l!m` or `l?m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Action {
    pub lifeline: LifelineId,
    pub kind: ActionKind,
    pub message: MessageId,
}

impl Action {
    pub fn emit(lifeline: LifelineId, message: MessageId) -> Self {
        Action {
            lifeline,
            kind: ActionKind::Emit,
            message,
        }
    }

    pub fn receive(lifeline: LifelineId, message: MessageId) -> Self {
        Action {
            lifeline,
            kind: ActionKind::Receive,
            message,
        }
    }
}

/// A set of lifelines, iterated in increasing order.
///
/// Ids below 64 live in a bit mask; a set holding a larger id switches to a
/// shared tree, so each set has exactly one representation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LifelineSet(Bits);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Bits {
    Small(u64),
    Large(Arc<BTreeSet<LifelineId>>),
}

impl Default for LifelineSet {
    fn default() -> Self {
        LifelineSet::empty()
    }
}

impl LifelineSet {
    pub fn empty() -> Self {
        LifelineSet(Bits::Small(0))
    }

    pub fn singleton(l: LifelineId) -> Self {
        let mut s = LifelineSet::empty();
        s.insert(l);
        s
    }

    pub fn contains(&self, l: LifelineId) -> bool {
        match &self.0 {
            Bits::Small(b) => l < 64 && b >> l & 1 == 1,
            Bits::Large(t) => t.contains(&l),
        }
    }

    pub fn insert(&mut self, l: LifelineId) -> bool {
        match &mut self.0 {
            Bits::Small(b) if l < 64 => {
                let fresh = *b >> l & 1 == 0;
                *b |= 1 << l;
                fresh
            }
            Bits::Small(_) => {
                let mut t: BTreeSet<LifelineId> = self.iter().collect();
                t.insert(l);
                self.0 = Bits::Large(Arc::new(t));
                true
            }
            Bits::Large(t) => Arc::make_mut(t).insert(l),
        }
    }

    pub fn is_empty(&self) -> bool {
        match &self.0 {
            Bits::Small(b) => *b == 0,
            Bits::Large(t) => t.is_empty(),
        }
    }

    pub fn len(&self) -> usize {
        match &self.0 {
            Bits::Small(b) => b.count_ones() as usize,
            Bits::Large(t) => t.len(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = LifelineId> + '_ {
        let (bits, tree) = match &self.0 {
            Bits::Small(b) => (*b, None),
            Bits::Large(t) => (0, Some(t.iter().copied())),
        };
        (0..64)
            .filter(move |i| bits >> i & 1 == 1)
            .chain(tree.into_iter().flatten())
    }

    pub fn is_subset(&self, other: &LifelineSet) -> bool {
        match (&self.0, &other.0) {
            (Bits::Small(a), Bits::Small(b)) => a & !b == 0,
            _ => self.iter().all(|l| other.contains(l)),
        }
    }

    pub fn is_disjoint(&self, other: &LifelineSet) -> bool {
        match (&self.0, &other.0) {
            (Bits::Small(a), Bits::Small(b)) => a & b == 0,
            _ => !self.iter().any(|l| other.contains(l)),
        }
    }

    pub fn first(&self) -> Option<LifelineId> {
        self.iter().next()
    }

    /// `{l} \ self`, the set pruned away when `l` runs on the right of a
    /// region `self`.
    pub fn complement_of_singleton(&self, l: LifelineId) -> LifelineSet {
        if self.contains(l) {
            LifelineSet::empty()
        } else {
            LifelineSet::singleton(l)
        }
    }
}

impl PartialOrd for LifelineSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LifelineSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

impl fmt::Debug for LifelineSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<LifelineId> for LifelineSet {
    fn from_iter<T: IntoIterator<Item = LifelineId>>(iter: T) -> Self {
        let mut s = LifelineSet::empty();
        for l in iter {
            s.insert(l);
        }
        s
    }
}

/// An interaction term. Children are shared, so cloning is cheap.
///
/// `seq`, `par`, `loopW` and `loopP` are not separate variants; see the
/// constructor helpers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Interaction {
    Empty,
    Act(Action),
    Strict(Arc<Interaction>, Arc<Interaction>),
    Alt(Arc<Interaction>, Arc<Interaction>),
    CoReg(LifelineSet, Arc<Interaction>, Arc<Interaction>),
    LoopS(Arc<Interaction>),
    LoopC(LifelineSet, Arc<Interaction>),
}

impl Interaction {
    pub fn act(a: Action) -> Self {
        Interaction::Act(a)
    }

    pub fn strict(l: Interaction, r: Interaction) -> Self {
        Interaction::Strict(Arc::new(l), Arc::new(r))
    }

    pub fn alt(l: Interaction, r: Interaction) -> Self {
        Interaction::Alt(Arc::new(l), Arc::new(r))
    }

    pub fn coreg(region: LifelineSet, l: Interaction, r: Interaction) -> Self {
        Interaction::CoReg(region, Arc::new(l), Arc::new(r))
    }

    /// Weak sequencing: `coreg` over the empty region.
    pub fn seq(l: Interaction, r: Interaction) -> Self {
        Interaction::coreg(LifelineSet::empty(), l, r)
    }

    /// Interleaving: `coreg` over every lifeline.
    pub fn par(all: &LifelineSet, l: Interaction, r: Interaction) -> Self {
        Interaction::coreg(all.clone(), l, r)
    }

    pub fn loop_s(body: Interaction) -> Self {
        Interaction::LoopS(Arc::new(body))
    }

    pub fn loop_c(region: LifelineSet, body: Interaction) -> Self {
        Interaction::LoopC(region, Arc::new(body))
    }

    pub fn loop_w(body: Interaction) -> Self {
        Interaction::loop_c(LifelineSet::empty(), body)
    }

    pub fn loop_p(all: &LifelineSet, body: Interaction) -> Self {
        Interaction::loop_c(all.clone(), body)
    }

    /// Folds `items` into a right-nested chain `f(i1, f(i2, ...))`.
    pub fn right_nested(
        mut items: Vec<Interaction>,
        f: impl Fn(Interaction, Interaction) -> Interaction,
    ) -> Option<Interaction> {
        let mut acc = items.pop()?;
        while let Some(prev) = items.pop() {
            acc = f(prev, acc);
        }
        Some(acc)
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Interaction::Empty)
    }

    pub fn is_loop(&self) -> bool {
        matches!(self, Interaction::LoopS(_) | Interaction::LoopC(..))
    }

    /// Children in position order (`1` then `2`).
    pub fn children(&self) -> Vec<&Interaction> {
        match self {
            Interaction::Empty | Interaction::Act(_) => vec![],
            Interaction::Strict(l, r) | Interaction::Alt(l, r) | Interaction::CoReg(_, l, r) => {
                vec![l, r]
            }
            Interaction::LoopS(c) | Interaction::LoopC(_, c) => vec![c],
        }
    }

    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        let mut stack = vec![(self, Position::root())];
        while let Some((i, p)) = stack.pop() {
            for (k, c) in i.children().into_iter().enumerate().rev() {
                stack.push((c, p.child(k as u8 + 1)));
            }
            out.push(p);
        }
        out
    }

    pub fn child_at(&self, d: u8) -> Option<&Interaction> {
        match (self, d) {
            (Interaction::Strict(l, _), 1)
            | (Interaction::Alt(l, _), 1)
            | (Interaction::CoReg(_, l, _), 1)
            | (Interaction::LoopS(l), 1)
            | (Interaction::LoopC(_, l), 1) => Some(l),
            (Interaction::Strict(_, r), 2)
            | (Interaction::Alt(_, r), 2)
            | (Interaction::CoReg(_, _, r), 2) => Some(r),
            _ => None,
        }
    }

    pub fn sub_at(&self, p: &Position) -> Result<&Interaction, IrError> {
        let mut cur = self;
        for &d in p.digits() {
            cur = cur
                .child_at(d)
                .ok_or_else(|| IrError::InvalidPosition(p.clone()))?;
        }
        Ok(cur)
    }

    /// Number of loop nodes crossed when walking from the root to `p`.
    pub fn loop_depth_at(&self, p: &Position) -> Result<usize, IrError> {
        let mut cur = self;
        let mut depth = 0;
        for &d in p.digits() {
            if cur.is_loop() {
                depth += 1;
            }
            cur = cur
                .child_at(d)
                .ok_or_else(|| IrError::InvalidPosition(p.clone()))?;
        }
        Ok(depth)
    }

    /// β(i): the deepest loop nesting of any position.
    pub fn max_loop_depth(&self) -> usize {
        match self {
            Interaction::Empty | Interaction::Act(_) => 0,
            Interaction::Strict(l, r) | Interaction::Alt(l, r) | Interaction::CoReg(_, l, r) => {
                l.max_loop_depth().max(r.max_loop_depth())
            }
            Interaction::LoopS(c) | Interaction::LoopC(_, c) => 1 + c.max_loop_depth(),
        }
    }

    /// η(i): actions reachable without entering a loop, taking the larger
    /// branch of each alternative.
    pub fn actions_outside_loops(&self) -> usize {
        match self {
            Interaction::Empty => 0,
            Interaction::Act(_) => 1,
            Interaction::Strict(l, r) | Interaction::CoReg(_, l, r) => {
                l.actions_outside_loops() + r.actions_outside_loops()
            }
            Interaction::Alt(l, r) => l.actions_outside_loops().max(r.actions_outside_loops()),
            Interaction::LoopS(_) | Interaction::LoopC(..) => 0,
        }
    }

    /// |i|: number of action leaves.
    pub fn total_action_count(&self) -> usize {
        match self {
            Interaction::Empty => 0,
            Interaction::Act(_) => 1,
            _ => self.children().iter().map(|c| c.total_action_count()).sum(),
        }
    }

    pub fn loop_count(&self) -> usize {
        let own = usize::from(self.is_loop());
        own + self.children().iter().map(|c| c.loop_count()).sum::<usize>()
    }

    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(|c| c.node_count()).sum::<usize>()
    }

    pub fn lifelines_used(&self) -> LifelineSet {
        let mut set = LifelineSet::empty();
        self.collect_lifelines(&mut set);
        set
    }

    fn collect_lifelines(&self, set: &mut LifelineSet) {
        if let Interaction::Act(a) = self {
            set.insert(a.lifeline);
        }
        for c in self.children() {
            c.collect_lifelines(set);
        }
    }

    /// Replaces every loop by its `k`-fold unfolding
    /// `alt(∅, op(body, alt(∅, op(body, ... ∅))))`, so the result is
    /// loop-free and accepts exactly the traces using at most `k` iterations
    /// of each loop.
    pub fn unroll_loops(&self, k: usize) -> Interaction {
        match self {
            Interaction::Empty | Interaction::Act(_) => self.clone(),
            Interaction::Strict(l, r) => Interaction::strict(l.unroll_loops(k), r.unroll_loops(k)),
            Interaction::Alt(l, r) => Interaction::alt(l.unroll_loops(k), r.unroll_loops(k)),
            Interaction::CoReg(reg, l, r) => {
                Interaction::coreg(reg.clone(), l.unroll_loops(k), r.unroll_loops(k))
            }
            Interaction::LoopS(c) => {
                let body = c.unroll_loops(k);
                let mut acc = Interaction::Empty;
                for _ in 0..k {
                    acc = Interaction::alt(Interaction::Empty, Interaction::strict(body.clone(), acc));
                }
                acc
            }
            Interaction::LoopC(reg, c) => {
                let body = c.unroll_loops(k);
                let mut acc = Interaction::Empty;
                for _ in 0..k {
                    acc = Interaction::alt(
                        Interaction::Empty,
                        Interaction::coreg(reg.clone(), body.clone(), acc),
                    );
                }
                acc
            }
        }
    }
}

/// A node address: a word over `{1, 2}`, `ε` for the root.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Position(Vec<u8>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn from_digits(digits: Vec<u8>) -> Option<Self> {
        digits
            .iter()
            .all(|d| *d == 1 || *d == 2)
            .then_some(Position(digits))
    }

    pub fn parse(s: &str) -> Option<Self> {
        if s == "ε" || s.is_empty() {
            return Some(Position::root());
        }
        let digits = s
            .chars()
            .map(|c| match c {
                '1' => Some(1),
                '2' => Some(2),
                _ => None,
            })
            .collect::<Option<Vec<u8>>>()?;
        Some(Position(digits))
    }

    pub fn digits(&self) -> &[u8] {
        &self.0
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, d: u8) -> Position {
        let mut v = self.0.clone();
        v.push(d);
        Position(v)
    }

    /// `d.self`
    pub fn prefixed(&self, d: u8) -> Position {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(d);
        v.extend_from_slice(&self.0);
        Position(v)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for d in &self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}
