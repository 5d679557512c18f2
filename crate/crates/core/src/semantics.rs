//! Operational semantics: pruning, one-step execution and membership.

use std::collections::HashSet;
use std::sync::Arc;

use thiserror::Error;

use crate::ir::{Action, Interaction, LifelineSet, Position};
use crate::trace::MultiTrace;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("no action is executable at position {0}")]
    NotExecutable(Position),
}

/// Removes every behavior of `i` that involves a lifeline of `lp`.
///
/// `None` means `i` cannot avoid `lp` at all.
pub fn prune(i: &Interaction, lp: &LifelineSet) -> Option<Interaction> {
    if lp.is_empty() {
        return Some(i.clone());
    }
    match prune_rec(i, lp) {
        Pruned::Same => Some(i.clone()),
        Pruned::New(x) => Some(x),
        Pruned::Gone => None,
    }
}

// Unchanged subterms are shared rather than rebuilt.
enum Pruned {
    Same,
    New(Interaction),
    Gone,
}

fn prune_child(c: &Arc<Interaction>, lp: &LifelineSet) -> Option<Arc<Interaction>> {
    match prune_rec(c, lp) {
        Pruned::Same => Some(c.clone()),
        Pruned::New(x) => Some(Arc::new(x)),
        Pruned::Gone => None,
    }
}

fn prune_rec(i: &Interaction, lp: &LifelineSet) -> Pruned {
    let same = |a: &Arc<Interaction>, b: &Arc<Interaction>| Arc::ptr_eq(a, b);
    match i {
        Interaction::Empty => Pruned::Same,
        Interaction::Act(a) if lp.contains(a.lifeline) => Pruned::Gone,
        Interaction::Act(_) => Pruned::Same,
        Interaction::Alt(l, r) => match (prune_child(l, lp), prune_child(r, lp)) {
            (Some(pl), Some(pr)) if same(&pl, l) && same(&pr, r) => Pruned::Same,
            (Some(pl), Some(pr)) => Pruned::New(Interaction::Alt(pl, pr)),
            (Some(x), None) | (None, Some(x)) => Pruned::New((*x).clone()),
            (None, None) => Pruned::Gone,
        },
        Interaction::Strict(l, r) | Interaction::CoReg(_, l, r) => {
            let (Some(pl), Some(pr)) = (prune_child(l, lp), prune_child(r, lp)) else {
                return Pruned::Gone;
            };
            if same(&pl, l) && same(&pr, r) {
                return Pruned::Same;
            }
            Pruned::New(match i {
                Interaction::CoReg(reg, ..) => Interaction::CoReg(reg.clone(), pl, pr),
                _ => Interaction::Strict(pl, pr),
            })
        }
        Interaction::LoopS(c) | Interaction::LoopC(_, c) => match prune_child(c, lp) {
            None => Pruned::New(Interaction::Empty),
            Some(pc) if same(&pc, c) => Pruned::Same,
            Some(pc) => Pruned::New(match i {
                Interaction::LoopC(reg, _) => Interaction::LoopC(reg.clone(), pc),
                _ => Interaction::LoopS(pc),
            }),
        },
    }
}

/// True iff `i` may terminate without executing anything, i.e. pruning by
/// every lifeline succeeds.
pub fn accepts_empty(i: &Interaction) -> bool {
    match i {
        Interaction::Empty | Interaction::LoopS(_) | Interaction::LoopC(..) => true,
        Interaction::Act(_) => false,
        Interaction::Alt(l, r) => accepts_empty(l) || accepts_empty(r),
        Interaction::Strict(l, r) | Interaction::CoReg(_, l, r) => {
            accepts_empty(l) && accepts_empty(r)
        }
    }
}

/// One transition `i --a@p--> follow_up`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontierEntry {
    pub action: Action,
    pub position: Position,
    pub follow_up: Interaction,
    /// Loop nodes above `position` in the source interaction.
    pub loop_depth: usize,
}

/// Every immediately executable action of `i`, ordered by position.
pub fn frontier(i: &Interaction) -> Vec<FrontierEntry> {
    frontier_where(i, &|_| true)
}

/// The entries of `frontier(i)` whose action satisfies `keep`.
pub fn frontier_where(i: &Interaction, keep: &dyn Fn(&Action) -> bool) -> Vec<FrontierEntry> {
    let frontier = |i: &Interaction| frontier_where(i, keep);
    match i {
        Interaction::Empty => vec![],
        Interaction::Act(a) if !keep(a) => vec![],
        Interaction::Act(a) => vec![FrontierEntry {
            action: *a,
            position: Position::root(),
            follow_up: Interaction::Empty,
            loop_depth: 0,
        }],
        Interaction::Alt(l, r) => {
            let mut out = lift(frontier(l), 1, 0, |f| f);
            out.extend(lift(frontier(r), 2, 0, |f| f));
            out
        }
        Interaction::Strict(l, r) => {
            let mut out = lift(frontier(l), 1, 0, |f| Interaction::strict(f, (**r).clone()));
            if accepts_empty(l) {
                out.extend(lift(frontier(r), 2, 0, |f| f));
            }
            out
        }
        Interaction::CoReg(reg, l, r) => {
            let mut out = lift(frontier(l), 1, 0, |f| {
                Interaction::coreg(reg.clone(), f, (**r).clone())
            });
            for e in frontier(r) {
                let lp = reg.complement_of_singleton(e.action.lifeline);
                if let Some(pruned) = prune(l, &lp) {
                    out.push(FrontierEntry {
                        action: e.action,
                        position: e.position.prefixed(2),
                        follow_up: Interaction::coreg(reg.clone(), pruned, e.follow_up),
                        loop_depth: e.loop_depth,
                    });
                }
            }
            out
        }
        Interaction::LoopS(c) => lift(frontier(c), 1, 1, |f| Interaction::strict(f, i.clone())),
        Interaction::LoopC(reg, c) => {
            let mut out = Vec::new();
            for e in frontier(c) {
                let lp = reg.complement_of_singleton(e.action.lifeline);
                if let Some(pruned) = prune(i, &lp) {
                    out.push(FrontierEntry {
                        action: e.action,
                        position: e.position.prefixed(1),
                        follow_up: Interaction::coreg(
                            reg.clone(),
                            pruned,
                            Interaction::coreg(reg.clone(), e.follow_up, i.clone()),
                        ),
                        loop_depth: e.loop_depth + 1,
                    });
                }
            }
            out
        }
    }
}

fn lift(
    entries: Vec<FrontierEntry>,
    digit: u8,
    extra_depth: usize,
    wrap: impl Fn(Interaction) -> Interaction,
) -> Vec<FrontierEntry> {
    entries
        .into_iter()
        .map(|e| FrontierEntry {
            action: e.action,
            position: e.position.prefixed(digit),
            follow_up: wrap(e.follow_up),
            loop_depth: e.loop_depth + extra_depth,
        })
        .collect()
}

/// Executes the action at `p`.
pub fn execute(i: &Interaction, p: &Position) -> Result<(Action, Interaction), SemanticsError> {
    frontier(i)
        .into_iter()
        .find(|e| &e.position == p)
        .map(|e| (e.action, e.follow_up))
        .ok_or_else(|| SemanticsError::NotExecutable(p.clone()))
}

/// μ ∈ σ_C(i): `mu` can be consumed head by head through frontier actions,
/// ending in an interaction that accepts the empty trace.
pub fn membership(i: &Interaction, mu: &MultiTrace) -> bool {
    let mut dead = HashSet::new();
    let cursors = vec![0; mu.partition().len()];
    member_rec(i, mu, cursors, &mut dead)
}

fn member_rec(
    i: &Interaction,
    mu: &MultiTrace,
    cursors: Vec<usize>,
    dead: &mut HashSet<(Interaction, Vec<usize>)>,
) -> bool {
    let done = cursors
        .iter()
        .zip(mu.components())
        .all(|(c, comp)| *c == comp.len());
    if done {
        return accepts_empty(i);
    }
    let key = (i.clone(), cursors);
    if dead.contains(&key) {
        return false;
    }
    let cursors = &key.1;
    for e in frontier(i) {
        let k = mu.partition().coloc_index(e.action.lifeline);
        if mu.component(k).get(cursors[k]) == Some(&e.action) {
            let mut next = cursors.clone();
            next[k] += 1;
            if member_rec(&e.follow_up, mu, next, dead) {
                return true;
            }
        }
    }
    dead.insert(key);
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{em, rc, running_example, single};
    use crate::trace::Partition;
    use std::sync::Arc;

    #[test]
    fn prune_basic_rules() {
        assert_eq!(prune(&em(0, 0), &single(0)), None);
        assert_eq!(prune(&em(0, 0), &single(1)), Some(em(0, 0)));
        assert_eq!(
            prune(&Interaction::loop_s(em(0, 0)), &single(0)),
            Some(Interaction::Empty)
        );
        assert_eq!(
            prune(&Interaction::Empty, &single(0)),
            Some(Interaction::Empty)
        );
    }

    #[test]
    fn prune_left_subtree_by_l3() {
        let i = running_example();
        let left = i.sub_at(&Position::parse("1").unwrap()).unwrap();
        let want = Interaction::coreg(
            single(1),
            Interaction::Empty,
            Interaction::loop_w(Interaction::strict(em(0, 1), rc(1, 1))),
        );
        assert_eq!(prune(left, &single(2)), Some(want));
    }

    #[test]
    fn accepts_empty_cases() {
        assert!(accepts_empty(&Interaction::Empty));
        assert!(!accepts_empty(&em(0, 0)));
        assert!(accepts_empty(&Interaction::alt(em(0, 0), Interaction::Empty)));
        assert!(accepts_empty(&running_example()));
    }

    #[test]
    fn running_example_frontier() {
        let i = running_example();
        let f = frontier(&i);
        let got: Vec<(Action, String)> = f
            .iter()
            .map(|e| (e.action, e.position.to_string()))
            .collect();
        assert_eq!(
            got,
            vec![
                (Action::emit(0, 0), "1111".to_string()),
                (Action::emit(0, 1), "12111".to_string()),
                (Action::emit(1, 2), "12121".to_string()),
                (Action::emit(2, 3), "2111".to_string()),
            ]
        );
        for e in &f {
            assert_eq!(i.sub_at(&e.position).unwrap(), &Interaction::Act(e.action));
            assert_eq!(i.loop_depth_at(&e.position).unwrap(), e.loop_depth);
        }
    }

    #[test]
    fn execute_cases() {
        let i = running_example();
        let (a, f) = execute(&i, &Position::parse("1111").unwrap()).unwrap();
        assert_eq!(a, Action::emit(0, 0));
        // only the executed action changed: the alt committed, l1!m1 became ∅
        let inner = f.sub_at(&Position::parse("11").unwrap()).unwrap();
        assert_eq!(
            inner,
            &Interaction::strict(Interaction::Empty, Interaction::seq(rc(1, 0), rc(2, 0)))
        );
        assert_eq!(
            execute(&em(0, 0), &Position::root()).unwrap(),
            (Action::emit(0, 0), Interaction::Empty)
        );
        assert!(execute(&Interaction::Empty, &Position::root()).is_err());
    }

    #[test]
    fn membership_cases() {
        let p = Arc::new(Partition::new(vec![[0, 1].into_iter().collect(), single(2)], 3).unwrap());
        let full = MultiTrace::new(
            p.clone(),
            vec![
                vec![Action::emit(0, 0), Action::receive(1, 0), Action::receive(1, 3)],
                vec![Action::receive(2, 0), Action::emit(2, 3)],
            ],
        )
        .unwrap();
        let slice = MultiTrace::new(
            p.clone(),
            vec![vec![Action::receive(1, 3)], vec![Action::receive(2, 0)]],
        )
        .unwrap();
        // the pending m5 exchange of the started loopP iteration keeps the
        // full multi-trace a strict prefix
        assert!(!membership(&running_example(), &full));
        assert!(!membership(&running_example(), &slice));
        let completed = MultiTrace::new(
            p.clone(),
            vec![
                vec![
                    Action::emit(0, 0),
                    Action::receive(1, 0),
                    Action::receive(1, 3),
                    Action::emit(1, 4),
                ],
                vec![Action::receive(2, 0), Action::emit(2, 3), Action::receive(2, 4)],
            ],
        )
        .unwrap();
        assert!(membership(&running_example(), &completed));
        assert!(membership(&Interaction::Empty, &MultiTrace::empty(p)));
    }
}
