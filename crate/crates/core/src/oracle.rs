//! Denotational trace semantics, enumerated by brute force.
//!
//! Every loop is truncated to a fixed number of iterations, so results are
//! finite. This is the reference the operational side is tested against; it
//! is not meant to be fast.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::ir::{Action, Interaction, LifelineId, LifelineSet};
use crate::trace::{MultiTrace, Trace};

pub type TraceSet = BTreeSet<Trace>;

pub const DEFAULT_SIZE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("trace set exceeds the size cap of {0}")]
    TooLarge(usize),
}

/// Bounds on an enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of iterations of each loop.
    pub loop_bound: usize,
    /// Drop traces longer than this. Every operator only lengthens traces,
    /// so this is exact for the traces it keeps.
    pub max_len: Option<usize>,
    /// Refuse once any intermediate set, or the merges of a single pair of
    /// traces, grow past this.
    pub cap: usize,
}

impl Limits {
    pub fn loops(loop_bound: usize) -> Self {
        Limits {
            loop_bound,
            max_len: None,
            cap: DEFAULT_SIZE_CAP,
        }
    }

    pub fn with_max_len(mut self, max_len: usize) -> Self {
        self.max_len = Some(max_len);
        self
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    fn fits(&self, len: usize) -> bool {
        self.max_len.is_none_or(|m| len <= m)
    }
}

/// True if `t` has an action on `l` while `l` is outside `r`.
pub fn conflict(t: &[Action], l: LifelineId, r: &LifelineSet) -> bool {
    !r.contains(l) && t.iter().any(|a| a.lifeline == l)
}

/// `t1 ⨆_r t2`: merges of the two traces where an action of `t2` may move
/// ahead of the rest of `t1` only if that rest has nothing on its lifeline
/// outside `r`.
pub fn cond_seq(t1: &[Action], t2: &[Action], r: &LifelineSet) -> TraceSet {
    let mut memo = HashMap::new();
    merge(t1, t2, 0, 0, r, &mut memo).into_iter().collect()
}

fn merge(
    t1: &[Action],
    t2: &[Action],
    i: usize,
    j: usize,
    r: &LifelineSet,
    memo: &mut HashMap<(usize, usize), Vec<Trace>>,
) -> Vec<Trace> {
    if i == t1.len() {
        return vec![t2[j..].to_vec()];
    }
    if j == t2.len() {
        return vec![t1[i..].to_vec()];
    }
    if let Some(v) = memo.get(&(i, j)) {
        return v.clone();
    }
    let mut out = Vec::new();
    for rest in merge(t1, t2, i + 1, j, r, memo) {
        let mut t = Vec::with_capacity(rest.len() + 1);
        t.push(t1[i]);
        t.extend(rest);
        out.push(t);
    }
    if !conflict(&t1[i..], t2[j].lifeline, r) {
        for rest in merge(t1, t2, i, j + 1, r, memo) {
            let mut t = Vec::with_capacity(rest.len() + 1);
            t.push(t2[j]);
            t.extend(rest);
            out.push(t);
        }
    }
    memo.insert((i, j), out.clone());
    out
}

/// Number of merge paths `cond_seq` walks, saturating at `limit + 1`. Bounds
/// the size of its result from above.
fn merge_paths(t1: &[Action], t2: &[Action], r: &LifelineSet, limit: usize) -> usize {
    // paths[j] holds the count for suffixes t1[i..], t2[j..] of the current row i
    let (n, m) = (t1.len(), t2.len());
    let mut paths = vec![1usize; m + 1];
    for i in (0..n).rev() {
        let mut row = vec![1usize; m + 1];
        for j in (0..m).rev() {
            let mut c = paths[j];
            if !conflict(&t1[i..], t2[j].lifeline, r) {
                c = c.saturating_add(row[j + 1]);
            }
            row[j] = c.min(limit + 1);
        }
        paths = row;
    }
    paths[0]
}

/// Unrestricted interleaving: `⨆_r` with `r` covering both traces.
pub fn interleave(t1: &[Action], t2: &[Action]) -> TraceSet {
    let r: LifelineSet = t1.iter().chain(t2).map(|a| a.lifeline).collect();
    cond_seq(t1, t2, &r)
}

/// Weak sequencing: `⨆_∅`.
pub fn weak_seq(t1: &[Action], t2: &[Action]) -> TraceSet {
    cond_seq(t1, t2, &LifelineSet::empty())
}

/// How two trace sets are composed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Composition {
    Strict,
    CondSeq(LifelineSet),
}

fn compose(
    a: &TraceSet,
    b: &TraceSet,
    op: &Composition,
    limits: &Limits,
) -> Result<TraceSet, OracleError> {
    let mut out = TraceSet::new();
    for t1 in a {
        for t2 in b {
            if !limits.fits(t1.len() + t2.len()) {
                continue;
            }
            match op {
                Composition::Strict => {
                    let mut t = t1.clone();
                    t.extend_from_slice(t2);
                    out.insert(t);
                }
                Composition::CondSeq(r) => {
                    if merge_paths(t1, t2, r, limits.cap) > limits.cap {
                        return Err(OracleError::TooLarge(limits.cap));
                    }
                    out.extend(cond_seq(t1, t2, r))
                }
            }
            if out.len() > limits.cap {
                return Err(OracleError::TooLarge(limits.cap));
            }
        }
    }
    Ok(out)
}

/// `⋃_{j ≤ max_power} T^j` with `T^0 = {ε}` and `T^j = T ◇ T^{j-1}`.
pub fn kleene(t: &TraceSet, op: &Composition, max_power: usize) -> Result<TraceSet, OracleError> {
    kleene_limited(t, op, &Limits::loops(max_power))
}

fn kleene_limited(t: &TraceSet, op: &Composition, limits: &Limits) -> Result<TraceSet, OracleError> {
    let mut power: TraceSet = BTreeSet::from([Vec::new()]);
    let mut acc = power.clone();
    for _ in 0..limits.loop_bound {
        power = compose(t, &power, op, limits)?;
        acc.extend(power.iter().cloned());
        if acc.len() > limits.cap {
            return Err(OracleError::TooLarge(limits.cap));
        }
        // further powers cannot add anything new
        if power.iter().all(|x| x.is_empty()) {
            break;
        }
    }
    Ok(acc)
}

/// ρ(i) with every loop truncated at `loop_bound` iterations.
pub fn rho(i: &Interaction, loop_bound: usize) -> Result<TraceSet, OracleError> {
    rho_limited(i, &Limits::loops(loop_bound))
}

pub fn rho_limited(i: &Interaction, limits: &Limits) -> Result<TraceSet, OracleError> {
    let mut memo = HashMap::new();
    rho_rec(i, limits, &mut memo)
}

fn rho_rec(
    i: &Interaction,
    limits: &Limits,
    memo: &mut HashMap<Interaction, TraceSet>,
) -> Result<TraceSet, OracleError> {
    if let Some(s) = memo.get(i) {
        return Ok(s.clone());
    }
    let out = match i {
        Interaction::Empty => BTreeSet::from([Vec::new()]),
        Interaction::Act(a) => {
            if limits.fits(1) {
                BTreeSet::from([vec![*a]])
            } else {
                TraceSet::new()
            }
        }
        Interaction::Alt(l, r) => {
            let mut s = rho_rec(l, limits, memo)?;
            s.extend(rho_rec(r, limits, memo)?);
            s
        }
        Interaction::Strict(l, r) => {
            let a = rho_rec(l, limits, memo)?;
            let b = rho_rec(r, limits, memo)?;
            compose(&a, &b, &Composition::Strict, limits)?
        }
        Interaction::CoReg(reg, l, r) => {
            let a = rho_rec(l, limits, memo)?;
            let b = rho_rec(r, limits, memo)?;
            compose(&a, &b, &Composition::CondSeq(reg.clone()), limits)?
        }
        Interaction::LoopS(c) => {
            let t = rho_rec(c, limits, memo)?;
            kleene_limited(&t, &Composition::Strict, limits)?
        }
        Interaction::LoopC(reg, c) => {
            let t = rho_rec(c, limits, memo)?;
            kleene_limited(&t, &Composition::CondSeq(reg.clone()), limits)?
        }
    };
    if out.len() > limits.cap {
        return Err(OracleError::TooLarge(limits.cap));
    }
    memo.insert(i.clone(), out.clone());
    Ok(out)
}

/// True if some trace of ρ(i), projected onto `mu`'s partition, has `mu` as
/// a slice.
pub fn oracle_slice_membership(
    i: &Interaction,
    mu: &MultiTrace,
    loop_bound: usize,
) -> Result<bool, OracleError> {
    oracle_slice_membership_limited(i, mu, &Limits::loops(loop_bound))
}

pub fn oracle_slice_membership_limited(
    i: &Interaction,
    mu: &MultiTrace,
    limits: &Limits,
) -> Result<bool, OracleError> {
    let traces = rho_limited(i, limits)?;
    Ok(traces.iter().any(|t| {
        mu.is_slice_of(&MultiTrace::from_global(t, mu.partition().clone()))
            .unwrap_or(false)
    }))
}

/// True if `mu` is exactly the projection of some trace of ρ(i).
pub fn oracle_membership(i: &Interaction, mu: &MultiTrace, limits: &Limits) -> Result<bool, OracleError> {
    let traces = rho_limited(i, limits)?;
    Ok(traces
        .iter()
        .any(|t| &MultiTrace::from_global(t, mu.partition().clone()) == mu))
}

/// Prefixes `p` of traces `p.s` of ρ(i), each with the lifelines of its
/// rest `s`. The rest is empty exactly when its lifeline set is.
pub type PrefixSet = BTreeSet<(Trace, LifelineSet)>;

/// Lifeline sets of whole traces of ρ(i), and its prefix set.
type PrefixInfo = (BTreeSet<LifelineSet>, PrefixSet);

/// Every `(p, lifelines(s))` with `p.s ∈ ρ(i)` and `|p| ≤ max_len`, loops
/// truncated at `loop_bound` iterations. Built without enumerating whole
/// traces: composition only needs the lifelines of what is left.
pub fn rho_prefixes(i: &Interaction, loop_bound: usize, max_len: usize) -> Result<PrefixSet, OracleError> {
    let limits = Limits::loops(loop_bound).with_max_len(max_len);
    let mut memo = HashMap::new();
    prefixes_rec(i, &limits, &mut memo).map(|(_, p)| p)
}

fn prefixes_rec(
    i: &Interaction,
    limits: &Limits,
    memo: &mut HashMap<Interaction, PrefixInfo>,
) -> Result<PrefixInfo, OracleError> {
    if let Some(v) = memo.get(i) {
        return Ok(v.clone());
    }
    let out = match i {
        Interaction::Empty => empty_info(),
        Interaction::Act(a) => {
            let l = LifelineSet::singleton(a.lifeline);
            let mut p = PrefixSet::from([(Vec::new(), l.clone())]);
            if limits.fits(1) {
                p.insert((vec![*a], LifelineSet::empty()));
            }
            (BTreeSet::from([l]), p)
        }
        Interaction::Alt(l, r) => {
            let (mut la, mut pa) = prefixes_rec(l, limits, memo)?;
            let (lb, pb) = prefixes_rec(r, limits, memo)?;
            la.extend(lb);
            pa.extend(pb);
            (la, pa)
        }
        Interaction::Strict(l, r) => {
            let a = prefixes_rec(l, limits, memo)?;
            let b = prefixes_rec(r, limits, memo)?;
            compose_prefixes(&a, &b, &Composition::Strict, limits)?
        }
        Interaction::CoReg(reg, l, r) => {
            let a = prefixes_rec(l, limits, memo)?;
            let b = prefixes_rec(r, limits, memo)?;
            compose_prefixes(&a, &b, &Composition::CondSeq(reg.clone()), limits)?
        }
        Interaction::LoopS(c) => {
            let body = prefixes_rec(c, limits, memo)?;
            kleene_prefixes(&body, &Composition::Strict, limits)?
        }
        Interaction::LoopC(reg, c) => {
            let body = prefixes_rec(c, limits, memo)?;
            kleene_prefixes(&body, &Composition::CondSeq(reg.clone()), limits)?
        }
    };
    if out.1.len() > limits.cap {
        return Err(OracleError::TooLarge(limits.cap));
    }
    memo.insert(i.clone(), out.clone());
    Ok(out)
}

fn empty_info() -> PrefixInfo {
    (
        BTreeSet::from([LifelineSet::empty()]),
        PrefixSet::from([(Vec::new(), LifelineSet::empty())]),
    )
}

fn union(a: &LifelineSet, b: &LifelineSet) -> LifelineSet {
    a.iter().chain(b.iter()).collect()
}

fn compose_prefixes(
    a: &PrefixInfo,
    b: &PrefixInfo,
    op: &Composition,
    limits: &Limits,
) -> Result<PrefixInfo, OracleError> {
    let whole: BTreeSet<LifelineSet> = a.0.iter().flat_map(|x| b.0.iter().map(move |y| union(x, y))).collect();
    let mut out = PrefixSet::new();
    match op {
        Composition::Strict => {
            for (p1, r1) in &a.1 {
                if !r1.is_empty() {
                    // the left part is unfinished: all of the right is left
                    for s in &b.0 {
                        out.insert((p1.clone(), union(r1, s)));
                    }
                    continue;
                }
                for (p2, r2) in &b.1 {
                    if limits.fits(p1.len() + p2.len()) {
                        let mut p = p1.clone();
                        p.extend_from_slice(p2);
                        out.insert((p, r2.clone()));
                    }
                }
            }
        }
        Composition::CondSeq(reg) => {
            for (p1, r1) in &a.1 {
                for (p2, r2) in &b.1 {
                    if !limits.fits(p1.len() + p2.len()) {
                        continue;
                    }
                    let rest = union(r1, r2);
                    for m in prefix_merges(p1, r1, p2, reg) {
                        out.insert((m, rest.clone()));
                    }
                    if out.len() > limits.cap {
                        return Err(OracleError::TooLarge(limits.cap));
                    }
                }
            }
        }
    }
    if out.len() > limits.cap {
        return Err(OracleError::TooLarge(limits.cap));
    }
    Ok((whole, out))
}

/// Merges of `p1` and `p2` that are prefixes of some `cond_seq` merge of
/// `p1.s1` and `p2.s2`, where `s1` touches exactly `r1`. Every action of
/// `p2` lands before `s1`.
fn prefix_merges(p1: &[Action], r1: &LifelineSet, p2: &[Action], r: &LifelineSet) -> Vec<Trace> {
    fn go(
        p1: &[Action],
        r1: &LifelineSet,
        p2: &[Action],
        r: &LifelineSet,
        i: usize,
        j: usize,
        memo: &mut HashMap<(usize, usize), Vec<Trace>>,
    ) -> Vec<Trace> {
        if j == p2.len() {
            return vec![p1[i..].to_vec()];
        }
        if let Some(v) = memo.get(&(i, j)) {
            return v.clone();
        }
        let mut out = Vec::new();
        if i < p1.len() {
            for rest in go(p1, r1, p2, r, i + 1, j, memo) {
                let mut t = vec![p1[i]];
                t.extend(rest);
                out.push(t);
            }
        }
        let l = p2[j].lifeline;
        if r.contains(l) || (!r1.contains(l) && !conflict(&p1[i..], l, r)) {
            for rest in go(p1, r1, p2, r, i, j + 1, memo) {
                let mut t = vec![p2[j]];
                t.extend(rest);
                out.push(t);
            }
        }
        memo.insert((i, j), out.clone());
        out
    }
    go(p1, r1, p2, r, 0, 0, &mut HashMap::new())
}

fn kleene_prefixes(body: &PrefixInfo, op: &Composition, limits: &Limits) -> Result<PrefixInfo, OracleError> {
    let mut power = empty_info();
    let mut acc = power.clone();
    for _ in 0..limits.loop_bound {
        let next = compose_prefixes(body, &power, op, limits)?;
        if next == power {
            break;
        }
        power = next;
        acc.0.extend(power.0.iter().cloned());
        acc.1.extend(power.1.iter().cloned());
        if acc.1.len() > limits.cap {
            return Err(OracleError::TooLarge(limits.cap));
        }
    }
    Ok(acc)
}

/// True if `mu` is a slice of the projection of some prefix of a trace of
/// ρ(i) with at most `max_len` actions. Slices are component-wise factors,
/// so this is slice membership for ρ(i) itself, up to that prefix length.
/// Loops get `max_len` iterations, which covers every such prefix.
pub fn oracle_prefix_slice_membership(
    i: &Interaction,
    mu: &MultiTrace,
    max_len: usize,
) -> Result<bool, OracleError> {
    let prefixes = rho_prefixes(i, max_len.max(1), max_len)?;
    let seen: BTreeSet<&Trace> = prefixes.iter().map(|(p, _)| p).collect();
    let found = seen.into_iter().any(|p| {
        p.len() >= mu.len()
            && mu
                .is_slice_of(&MultiTrace::from_global(p, mu.partition().clone()))
                .unwrap_or(false)
    });
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::Signature;
    use crate::trace::Partition;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn em(l: usize, m: usize) -> Action {
        Action::emit(l, m)
    }
    fn rc(l: usize, m: usize) -> Action {
        Action::receive(l, m)
    }

    #[test]
    fn conflict_cases() {
        assert!(!conflict(&[], 0, &LifelineSet::empty()));
        assert!(conflict(&[em(0, 0), rc(1, 0)], 0, &LifelineSet::empty()));
        assert!(!conflict(&[em(0, 0)], 0, &LifelineSet::singleton(0)));
        assert!(conflict(&[em(1, 0), em(0, 0)], 0, &LifelineSet::empty()));
    }

    #[test]
    fn cond_seq_cases() {
        let t = vec![em(0, 1), rc(1, 1)];
        assert_eq!(cond_seq(&[], &t, &LifelineSet::empty()), BTreeSet::from([t.clone()]));
        assert_eq!(
            cond_seq(&[em(0, 0)], &[em(0, 1)], &LifelineSet::empty()),
            BTreeSet::from([vec![em(0, 0), em(0, 1)]])
        );
        let both: LifelineSet = [0, 1].into_iter().collect();
        assert_eq!(
            cond_seq(&[em(0, 0)], &[em(1, 1)], &both),
            BTreeSet::from([vec![em(0, 0), em(1, 1)], vec![em(1, 1), em(0, 0)]])
        );
        assert_eq!(interleave(&[em(0, 0)], &[em(1, 1)]).len(), 2);
        assert_eq!(
            weak_seq(&[em(0, 0)], &[em(0, 1)]),
            BTreeSet::from([vec![em(0, 0), em(0, 1)]])
        );
        assert_eq!(weak_seq(&[], &t), BTreeSet::from([t]));
    }

    #[test]
    fn kleene_cases() {
        let t = BTreeSet::from([vec![em(0, 0)]]);
        assert_eq!(kleene(&t, &Composition::Strict, 0).unwrap(), BTreeSet::from([vec![]]));
        assert_eq!(
            kleene(&t, &Composition::Strict, 2).unwrap(),
            BTreeSet::from([vec![], vec![em(0, 0)], vec![em(0, 0), em(0, 0)]])
        );
        let eps = BTreeSet::from([vec![]]);
        assert_eq!(kleene(&eps, &Composition::CondSeq(LifelineSet::empty()), 5).unwrap(), eps);
    }

    #[test]
    fn rho_cases() {
        assert_eq!(rho(&Interaction::Empty, 3).unwrap(), BTreeSet::from([vec![]]));
        let s = Interaction::strict(Interaction::act(em(0, 0)), Interaction::act(rc(1, 0)));
        assert_eq!(rho(&s, 3).unwrap(), BTreeSet::from([vec![em(0, 0), rc(1, 0)]]));
        let a = Interaction::alt(Interaction::act(em(0, 0)), Interaction::Empty);
        assert_eq!(rho(&a, 1).unwrap(), BTreeSet::from([vec![em(0, 0)], vec![]]));
    }

    #[test]
    fn rho_size_guard() {
        let all: LifelineSet = [0, 1].into_iter().collect();
        let body = Interaction::seq(Interaction::act(em(0, 0)), Interaction::act(rc(1, 1)));
        let i = Interaction::loop_p(&all, body);
        assert_eq!(
            rho_limited(&i, &Limits::loops(6).with_cap(100)),
            Err(OracleError::TooLarge(100))
        );
    }

    #[test]
    fn slice_membership_cases() {
        let sig = Signature::new(["l1", "l2"], ["m"]).unwrap();
        let i = Interaction::strict(Interaction::act(em(0, 0)), Interaction::act(rc(1, 0)));
        let p = Arc::new(Partition::discrete(&sig));
        let twice = MultiTrace::new(p.clone(), vec![vec![], vec![rc(1, 0), rc(1, 0)]]).unwrap();
        assert!(!oracle_slice_membership(&i, &twice, 1).unwrap());
        assert!(oracle_slice_membership(&i, &MultiTrace::empty(p.clone()), 1).unwrap());
        let once = MultiTrace::new(p, vec![vec![], vec![rc(1, 0)]]).unwrap();
        assert!(oracle_slice_membership(&i, &once, 1).unwrap());
    }

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, j| acc * (n - j) / (j + 1))
    }

    fn arb_trace(max: usize) -> impl Strategy<Value = Trace> {
        prop::collection::vec(
            (0..3usize, any::<bool>(), 0..2usize)
                .prop_map(|(l, e, m)| if e { em(l, m) } else { rc(l, m) }),
            0..=max,
        )
    }

    /// Merges computed directly from the definition: every interleaving,
    /// filtered by the ordering constraint on lifelines outside `r`.
    fn reference_cond_seq(t1: &[Action], t2: &[Action], r: &LifelineSet) -> TraceSet {
        let mut out = TraceSet::new();
        let n = t1.len() + t2.len();
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != t2.len() {
                continue;
            }
            let (mut i, mut j) = (0, 0);
            let mut t = Vec::new();
            let mut picked = Vec::new();
            for k in 0..n {
                if mask & (1 << k) != 0 {
                    t.push(t2[j]);
                    picked.push((1, j));
                    j += 1;
                } else {
                    t.push(t1[i]);
                    picked.push((0, i));
                    i += 1;
                }
            }
            // an action of t2 may not precede an action of t1 on the same
            // lifeline outside r
            let ok = picked.iter().enumerate().all(|(pos, (side, idx))| {
                *side == 0
                    || picked[pos + 1..].iter().all(|(s2, i2)| {
                        *s2 == 1 || {
                            let a1 = t1[*i2];
                            let a2 = t2[*idx];
                            a1.lifeline != a2.lifeline || r.contains(a1.lifeline)
                        }
                    })
            });
            if ok {
                out.insert(t);
            }
        }
        out
    }

    fn lifelines_of(t: &[Action]) -> LifelineSet {
        t.iter().map(|a| a.lifeline).collect()
    }

    #[test]
    fn prefix_slices_need_enough_actions() {
        // loopP(seq(l!m1, l?m2)) observed as l?m2.l?m2.l?m2: every reception
        // follows its own emission on the same lifeline
        let l: LifelineSet = [0].into_iter().collect();
        let body = Interaction::seq(Interaction::act(em(0, 0)), Interaction::act(rc(0, 1)));
        let i = Interaction::loop_p(&l, body);
        let p = Arc::new(Partition::new(vec![l], 1).unwrap());
        let mu = MultiTrace::new(p, vec![vec![rc(0, 1); 3]]).unwrap();
        assert!(!oracle_prefix_slice_membership(&i, &mu, 5).unwrap());
        assert!(oracle_prefix_slice_membership(&i, &mu, 6).unwrap());
        assert!(!oracle_prefix_slice_membership(&Interaction::act(em(0, 0)), &mu, 6).unwrap());
    }

    #[test]
    fn prefixes_of_a_single_action() {
        let i = Interaction::act(em(1, 0));
        let got = rho_prefixes(&i, 1, 5).unwrap();
        let want = PrefixSet::from([
            (vec![], LifelineSet::singleton(1)),
            (vec![em(1, 0)], LifelineSet::empty()),
        ]);
        assert_eq!(got, want);
    }

    proptest! {
        #[test]
        fn prefixes_match_split_traces(seed in any::<u64>(), k in 0..3usize, n in 0..4usize) {
            use rand::SeedableRng;
            let shape = crate::random::TermShape { lifelines: 3, messages: 2, max_actions: 5, max_loops: 2 };
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let i = crate::random::random_interaction(&mut rng, &shape);
            let Ok(whole) = rho_limited(&i, &Limits::loops(k).with_cap(20_000)) else {
                return Ok(());
            };
            let mut want = PrefixSet::new();
            for t in &whole {
                for cut in 0..=t.len().min(n) {
                    want.insert((t[..cut].to_vec(), lifelines_of(&t[cut..])));
                }
            }
            prop_assert_eq!(rho_prefixes(&i, k, n).unwrap(), want);
        }

        #[test]
        fn cond_seq_extremes(t1 in arb_trace(4), t2 in arb_trace(4)) {
            let all: LifelineSet = [0, 1, 2].into_iter().collect();
            prop_assert_eq!(cond_seq(&t1, &t2, &all), interleave(&t1, &t2));
            prop_assert_eq!(cond_seq(&t1, &t2, &LifelineSet::empty()), weak_seq(&t1, &t2));
            let il = interleave(&t1, &t2);
            prop_assert!(il.len() <= binomial(t1.len() + t2.len(), t1.len()));
        }

        #[test]
        fn cond_seq_matches_reference(t1 in arb_trace(4), t2 in arb_trace(4), bits in 0u8..8) {
            let r: LifelineSet = (0..3).filter(|l| bits & (1 << l) != 0).collect();
            prop_assert_eq!(cond_seq(&t1, &t2, &r), reference_cond_seq(&t1, &t2, &r));
        }

        #[test]
        fn merge_paths_bound_cond_seq(t1 in arb_trace(5), t2 in arb_trace(5), bits in 0u8..8) {
            let r: LifelineSet = (0..3).filter(|l| bits & (1 << l) != 0).collect();
            let n = cond_seq(&t1, &t2, &r).len();
            prop_assert!(merge_paths(&t1, &t2, &r, usize::MAX - 1) >= n);
            prop_assert_eq!(merge_paths(&t1, &t2, &r, 0).min(1), 1);
        }

        #[test]
        fn interleave_count_distinct_lifelines(n1 in 0..4usize, n2 in 0..4usize) {
            let t1: Trace = (0..n1).map(|k| em(0, k % 2)).collect();
            let t2: Trace = (0..n2).map(|k| rc(1, k % 2)).collect();
            prop_assert_eq!(interleave(&t1, &t2).len(), binomial(n1 + n2, n1));
        }
    }
}
