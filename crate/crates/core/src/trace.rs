//! Traces, co-localizations and multi-traces, plus the slice and mutant
//! generators used by the experiment pipeline.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::ir::{Action, ActionKind, LifelineId, LifelineSet, Signature};

pub type Trace = Vec<Action>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("target partition is not a refinement of the source partition")]
    NotARefinement,
    #[error("multi-traces are defined over different partitions")]
    PartitionMismatch,
    #[error("action on lifeline {lifeline} does not belong to co-localization {coloc}")]
    ActionOutsideColoc { lifeline: LifelineId, coloc: usize },
    #[error("expected {expected} components, got {got}")]
    ComponentCount { expected: usize, got: usize },
    #[error("no component has two actions to swap")]
    NothingToSwap,
    #[error("co-localization index {0} out of range")]
    ColocOutOfRange(usize),
}

/// A partition of the lifelines into co-localizations.
///
/// Co-localizations are stored sorted by their smallest lifeline so two
/// partitions with the same blocks compare equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition {
    colocs: Vec<LifelineSet>,
    owner: Vec<usize>,
}

impl Partition {
    pub fn new(mut colocs: Vec<LifelineSet>, lifeline_count: usize) -> Result<Self, TraceError> {
        if colocs.iter().any(|c| c.is_empty()) {
            return Err(TraceError::InvalidPartition(
                "empty co-localization".into(),
            ));
        }
        colocs.sort_by_key(|c| c.first());
        let mut owner = vec![usize::MAX; lifeline_count];
        for (k, c) in colocs.iter().enumerate() {
            for l in c.iter() {
                if l >= lifeline_count {
                    return Err(TraceError::InvalidPartition(format!(
                        "unknown lifeline {l}"
                    )));
                }
                if owner[l] != usize::MAX {
                    return Err(TraceError::InvalidPartition(format!(
                        "lifeline {l} appears twice"
                    )));
                }
                owner[l] = k;
            }
        }
        if let Some(l) = owner.iter().position(|o| *o == usize::MAX) {
            return Err(TraceError::InvalidPartition(format!(
                "lifeline {l} is not covered"
            )));
        }
        Ok(Partition { colocs, owner })
    }

    /// `C_t`: every lifeline on one clock.
    pub fn trivial(sig: &Signature) -> Self {
        let n = sig.lifeline_count();
        if n == 0 {
            return Partition {
                colocs: vec![],
                owner: vec![],
            };
        }
        Partition {
            colocs: vec![sig.all_lifelines()],
            owner: vec![0; n],
        }
    }

    /// `C_d`: one co-localization per lifeline.
    pub fn discrete(sig: &Signature) -> Self {
        let n = sig.lifeline_count();
        Partition {
            colocs: (0..n).map(LifelineSet::singleton).collect(),
            owner: (0..n).collect(),
        }
    }

    pub fn colocs(&self) -> &[LifelineSet] {
        &self.colocs
    }

    pub fn len(&self) -> usize {
        self.colocs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colocs.is_empty()
    }

    pub fn lifeline_count(&self) -> usize {
        self.owner.len()
    }

    /// Index of the co-localization holding `l`.
    pub fn coloc_index(&self, l: LifelineId) -> usize {
        self.owner[l]
    }

    /// θ_C(a)
    pub fn coloc_of(&self, a: &Action) -> Result<&LifelineSet, TraceError> {
        self.owner
            .get(a.lifeline)
            .map(|k| &self.colocs[*k])
            .ok_or_else(|| TraceError::InvalidPartition(format!("unknown lifeline {}", a.lifeline)))
    }

    /// True if every block of `self` lies inside a block of `coarse`.
    pub fn refines(&self, coarse: &Partition) -> bool {
        self.owner.len() == coarse.owner.len()
            && self.colocs.iter().all(|c| {
                let k = coarse.owner[c.first().expect("non-empty")];
                c.iter().all(|l| coarse.owner[l] == k)
            })
    }
}

/// Observation flags γ: whether observation has started on each
/// co-localization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ObsFlags(Vec<bool>);

impl ObsFlags {
    /// γ⊥
    pub fn unset(colocs: usize) -> Self {
        ObsFlags(vec![false; colocs])
    }

    pub fn get(&self, c: usize) -> bool {
        self.0[c]
    }

    /// γ + c
    pub fn with(&self, c: usize) -> Self {
        let mut v = self.0.clone();
        v[c] = true;
        ObsFlags(v)
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }
}

/// One local trace per co-localization of a partition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiTrace {
    partition: Arc<Partition>,
    components: Vec<Trace>,
}

impl MultiTrace {
    pub fn new(partition: Arc<Partition>, components: Vec<Trace>) -> Result<Self, TraceError> {
        if components.len() != partition.len() {
            return Err(TraceError::ComponentCount {
                expected: partition.len(),
                got: components.len(),
            });
        }
        for (k, comp) in components.iter().enumerate() {
            if let Some(a) = comp.iter().find(|a| partition.owner.get(a.lifeline) != Some(&k)) {
                return Err(TraceError::ActionOutsideColoc {
                    lifeline: a.lifeline,
                    coloc: k,
                });
            }
        }
        Ok(MultiTrace {
            partition,
            components,
        })
    }

    /// ε_C
    pub fn empty(partition: Arc<Partition>) -> Self {
        let components = vec![Vec::new(); partition.len()];
        MultiTrace {
            partition,
            components,
        }
    }

    /// Projects a global trace onto `partition`.
    pub fn from_global(trace: &[Action], partition: Arc<Partition>) -> Self {
        let mut components = vec![Vec::new(); partition.len()];
        for a in trace {
            components[partition.coloc_index(a.lifeline)].push(*a);
        }
        MultiTrace {
            partition,
            components,
        }
    }

    pub fn partition(&self) -> &Arc<Partition> {
        &self.partition
    }

    pub fn components(&self) -> &[Trace] {
        &self.components
    }

    pub fn component(&self, c: usize) -> &Trace {
        &self.components[c]
    }

    /// Total number of actions.
    pub fn len(&self) -> usize {
        self.components.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.components.iter().all(Vec::is_empty)
    }

    /// a ⊙ μ
    pub fn prepend(&self, a: Action) -> MultiTrace {
        let mut out = self.clone();
        out.components[self.partition.coloc_index(a.lifeline)].insert(0, a);
        out
    }

    /// Drops the head of component `c`, if any.
    pub fn tail(&self, c: usize) -> MultiTrace {
        let mut out = self.clone();
        if !out.components[c].is_empty() {
            out.components[c].remove(0);
        }
        out
    }

    /// Restricts each coarse component onto the blocks of `fine`.
    pub fn project(&self, fine: Arc<Partition>) -> Result<MultiTrace, TraceError> {
        if !fine.refines(&self.partition) {
            return Err(TraceError::NotARefinement);
        }
        let mut components = vec![Vec::new(); fine.len()];
        for comp in &self.components {
            for a in comp {
                components[fine.coloc_index(a.lifeline)].push(*a);
            }
        }
        Ok(MultiTrace {
            partition: fine,
            components,
        })
    }

    /// Every multi-trace whose components are contiguous subwords of the
    /// corresponding components of `self`.
    pub fn slices(&self) -> BTreeSet<MultiTrace> {
        let per_comp: Vec<BTreeSet<Trace>> = self.components.iter().map(|t| subwords(t)).collect();
        let mut acc: Vec<Vec<Trace>> = vec![Vec::new()];
        for options in &per_comp {
            let mut next = Vec::with_capacity(acc.len() * options.len());
            for prefix in &acc {
                for w in options {
                    let mut v = prefix.clone();
                    v.push(w.clone());
                    next.push(v);
                }
            }
            acc = next;
        }
        acc.into_iter()
            .map(|components| MultiTrace {
                partition: self.partition.clone(),
                components,
            })
            .collect()
    }

    /// True if `self` is a slice of `whole`.
    pub fn is_slice_of(&self, whole: &MultiTrace) -> Result<bool, TraceError> {
        if self.partition != whole.partition {
            return Err(TraceError::PartitionMismatch);
        }
        Ok(self
            .components
            .iter()
            .zip(&whole.components)
            .all(|(part, full)| is_subword(part, full)))
    }

    pub fn to_text(&self, sig: &Signature) -> String {
        let mut s = String::new();
        for (k, comp) in self.components.iter().enumerate() {
            if k > 0 {
                s.push_str("; ");
            }
            let names: Vec<&str> = self.partition.colocs[k]
                .iter()
                .map(|l| sig.lifeline_name(l))
                .collect();
            let _ = write!(s, "[{}] {}", names.join(","), sig.trace_str(comp));
        }
        s
    }
}

/// All contiguous subwords of `t`, including ε and `t` itself.
pub fn subwords(t: &[Action]) -> BTreeSet<Trace> {
    let mut out = BTreeSet::new();
    out.insert(Vec::new());
    for start in 0..t.len() {
        for end in start + 1..=t.len() {
            out.insert(t[start..end].to_vec());
        }
    }
    out
}

pub fn is_subword(part: &[Action], full: &[Action]) -> bool {
    part.is_empty() || full.windows(part.len()).any(|w| w == part)
}

/// Exchanges two actions inside one component.
pub fn mutate_swap_actions<R: Rng + ?Sized>(
    mu: &MultiTrace,
    rng: &mut R,
) -> Result<MultiTrace, TraceError> {
    let candidates: Vec<usize> = (0..mu.components.len())
        .filter(|&k| mu.components[k].len() >= 2)
        .collect();
    let &k = candidates.choose(rng).ok_or(TraceError::NothingToSwap)?;
    let comp = &mu.components[k];
    let mut pairs = Vec::new();
    for i in 0..comp.len() {
        for j in i + 1..comp.len() {
            if comp[i] != comp[j] {
                pairs.push((i, j));
            }
        }
    }
    let (i, j) = match pairs.choose(rng) {
        Some(p) => *p,
        None => (0, 1),
    };
    let mut out = mu.clone();
    out.components[k].swap(i, j);
    Ok(out)
}

/// `mu1` with component `coloc` taken from `mu2`.
pub fn mutate_swap_components(
    mu1: &MultiTrace,
    mu2: &MultiTrace,
    coloc: usize,
) -> Result<MultiTrace, TraceError> {
    if mu1.partition != mu2.partition {
        return Err(TraceError::PartitionMismatch);
    }
    if coloc >= mu1.components.len() {
        return Err(TraceError::ColocOutOfRange(coloc));
    }
    let mut out = mu1.clone();
    out.components[coloc] = mu2.components[coloc].clone();
    Ok(out)
}

/// Inserts one random well-typed action somewhere in `mu`.
pub fn mutate_insert_action<R: Rng + ?Sized>(
    mu: &MultiTrace,
    rng: &mut R,
    sig: &Signature,
) -> MultiTrace {
    let mut out = mu.clone();
    if mu.partition.is_empty() || sig.message_count() == 0 {
        return out;
    }
    let k = rng.gen_range(0..mu.partition.len());
    let lifelines: Vec<LifelineId> = mu.partition.colocs[k].iter().collect();
    let lifeline = *lifelines.choose(rng).expect("non-empty coloc");
    let kind = if rng.gen_bool(0.5) {
        ActionKind::Emit
    } else {
        ActionKind::Receive
    };
    let message = rng.gen_range(0..sig.message_count());
    let at = rng.gen_range(0..=out.components[k].len());
    out.components[k].insert(
        at,
        Action {
            lifeline,
            kind,
            message,
        },
    );
    out
}

/// A random slice where each component keeps at least `min_fraction` of
/// its original length (rounded up).
pub fn random_wide_slice<R: Rng + ?Sized>(
    mu: &MultiTrace,
    rng: &mut R,
    min_fraction: f64,
) -> MultiTrace {
    let mut out = mu.clone();
    for comp in out.components.iter_mut() {
        let n = comp.len();
        if n == 0 {
            continue;
        }
        let min_len = ((n as f64) * min_fraction).ceil().max(0.0) as usize;
        let len = rng.gen_range(min_len.min(n)..=n);
        let start = rng.gen_range(0..=n - len);
        *comp = comp[start..start + len].to_vec();
    }
    out
}

pub const DEFAULT_WIDE_SLICE_FRACTION: f64 = 1.0 / 3.0;
