//! Shared fixtures for unit tests.

use std::sync::Arc;

use crate::ir::{Action, Interaction, LifelineSet};
use crate::trace::{MultiTrace, Partition};

pub(crate) fn em(l: usize, m: usize) -> Interaction {
    Interaction::act(Action::emit(l, m))
}

pub(crate) fn rc(l: usize, m: usize) -> Interaction {
    Interaction::act(Action::receive(l, m))
}

pub(crate) fn single(l: usize) -> LifelineSet {
    LifelineSet::singleton(l)
}

/// seq(coreg_{l2}(alt(l1 -- m1 -> (l2,l3), o), loopW(alt(l1 -- m2 -> l2,
/// l2 -- m3 -> l3))), loopP(seq(l3 -- m4 -> l2, l2 -- m5 -> l3)))
pub(crate) fn running_example() -> Interaction {
    let all: LifelineSet = [0, 1, 2].into_iter().collect();
    let left = Interaction::coreg(
        single(1),
        Interaction::alt(
            Interaction::strict(em(0, 0), Interaction::seq(rc(1, 0), rc(2, 0))),
            Interaction::Empty,
        ),
        Interaction::loop_w(Interaction::alt(
            Interaction::strict(em(0, 1), rc(1, 1)),
            Interaction::strict(em(1, 2), rc(2, 2)),
        )),
    );
    let right = Interaction::loop_p(
        &all,
        Interaction::seq(
            Interaction::strict(em(2, 3), rc(1, 3)),
            Interaction::strict(em(1, 4), rc(2, 4)),
        ),
    );
    Interaction::seq(left, right)
}

/// Partition `{(l1,l2),(l3)}`.
pub(crate) fn l12_l3() -> Arc<Partition> {
    Arc::new(Partition::new(vec![[0, 1].into_iter().collect(), single(2)], 3).unwrap())
}

/// `[l1,l2] l1!m1.l2?m1.l2?m4; [l3] l3?m1.l3!m4`
pub(crate) fn running_multitrace() -> MultiTrace {
    MultiTrace::new(
        l12_l3(),
        vec![
            vec![Action::emit(0, 0), Action::receive(1, 0), Action::receive(1, 3)],
            vec![Action::receive(2, 0), Action::emit(2, 3)],
        ],
    )
    .unwrap()
}

/// `[l1,l2] l2?m4; [l3] l3?m1`
pub(crate) fn running_slice() -> MultiTrace {
    MultiTrace::new(
        l12_l3(),
        vec![vec![Action::receive(1, 3)], vec![Action::receive(2, 0)]],
    )
    .unwrap()
}
