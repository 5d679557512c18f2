//! Interaction terms.
//!
//! ```text
//! o                      empty
//! l1 -- m ->|            emission
//! m -> l2                reception
//! l1 -- m -> l2          strict(l1!m, l2?m)
//! l1 -- m -> (l2,l3)     strict(l1!m, seq(l2?m, l3?m))
//! strict|seq|par|alt(i1, i2, ...)   right-nested
//! loopS|loopW|loopP(i)
//! coreg(l1,..)(i1, i2, ...)
//! loopC(l1,..)(i)
//! ```

use super::{ErrorKind, ParseError, Parser, Tok};
use crate::ir::{Action, ActionKind, Interaction, LifelineSet, Signature};

const OPERATORS: [&str; 9] = [
    "strict", "seq", "par", "alt", "loopS", "loopW", "loopP", "coreg", "loopC",
];

pub fn parse_hif(text: &str, sig: &Signature) -> Result<Interaction, ParseError> {
    let mut p = Parser::new(text)?;
    let i = term(&mut p, sig)?;
    p.expect_eof()?;
    Ok(i)
}

fn lifeline(p: &mut Parser, sig: &Signature) -> Result<usize, ParseError> {
    let (name, loc) = p.expect_word("a lifeline")?;
    match sig.lifeline(&name) {
        Some(l) => Ok(l),
        None => p.fail(loc, ErrorKind::UnknownLifeline(name)),
    }
}

fn message(p: &Parser, sig: &Signature, name: String, loc: super::Loc) -> Result<usize, ParseError> {
    match sig.message(&name) {
        Some(m) => Ok(m),
        None => p.fail(loc, ErrorKind::UnknownMessage(name)),
    }
}

fn lifeline_list(p: &mut Parser, sig: &Signature) -> Result<LifelineSet, ParseError> {
    p.expect_sym("(")?;
    let mut set = LifelineSet::empty();
    while !p.at_sym(")") {
        set.insert(lifeline(p, sig)?);
        if !p.eat_sym(",") {
            break;
        }
    }
    p.expect_sym(")")?;
    Ok(set)
}

fn term(p: &mut Parser, sig: &Signature) -> Result<Interaction, ParseError> {
    let (word, loc) = p.expect_word("an interaction")?;
    match p.peek().clone() {
        Tok::Sym("--") => {
            p.bump();
            let l = match sig.lifeline(&word) {
                Some(l) => l,
                None => return p.fail(loc, ErrorKind::UnknownLifeline(word)),
            };
            let (mname, mloc) = p.expect_word("a message")?;
            let m = message(p, sig, mname, mloc)?;
            let emit = Interaction::act(Action::emit(l, m));
            if p.eat_sym("->|") {
                return Ok(emit);
            }
            p.expect_sym("->")?;
            let targets: Vec<usize> = if p.eat_sym("(") {
                let mut ts = vec![lifeline(p, sig)?];
                while p.eat_sym(",") {
                    ts.push(lifeline(p, sig)?);
                }
                p.expect_sym(")")?;
                ts
            } else {
                vec![lifeline(p, sig)?]
            };
            let receptions = targets
                .into_iter()
                .map(|t| Interaction::act(Action::receive(t, m)))
                .collect();
            let rec = Interaction::right_nested(receptions, Interaction::seq).expect("non-empty");
            Ok(Interaction::strict(emit, rec))
        }
        Tok::Sym("->") => {
            p.bump();
            let m = message(p, sig, word, loc)?;
            let l = lifeline(p, sig)?;
            Ok(Interaction::act(Action::receive(l, m)))
        }
        Tok::Sym("(") if OPERATORS.contains(&word.as_str()) => operator(p, sig, &word, loc),
        _ if word == "o" => Ok(Interaction::Empty),
        _ => p.fail(
            loc,
            ErrorKind::Expected {
                expected: "an operator, an action or `o`".into(),
                found: format!("`{word}`"),
            },
        ),
    }
}

fn arguments(p: &mut Parser, sig: &Signature) -> Result<Vec<Interaction>, ParseError> {
    p.expect_sym("(")?;
    let mut args = vec![term(p, sig)?];
    while p.eat_sym(",") {
        args.push(term(p, sig)?);
    }
    p.expect_sym(")")?;
    Ok(args)
}

fn operator(
    p: &mut Parser,
    sig: &Signature,
    op: &str,
    loc: super::Loc,
) -> Result<Interaction, ParseError> {
    let region = match op {
        "coreg" | "loopC" => Some(lifeline_list(p, sig)?),
        _ => None,
    };
    let args = arguments(p, sig)?;
    let unary = op.starts_with("loop");
    let arity_ok = if unary { args.len() == 1 } else { args.len() >= 2 };
    if !arity_ok {
        return p.fail(
            loc,
            ErrorKind::Arity {
                op: op.to_string(),
                expected: if unary { "1" } else { "at least 2" }.into(),
                got: args.len(),
            },
        );
    }
    let all = sig.all_lifelines();
    let mut args = args;
    Ok(match op {
        "loopS" => Interaction::loop_s(args.remove(0)),
        "loopW" => Interaction::loop_w(args.remove(0)),
        "loopP" => Interaction::loop_p(&all, args.remove(0)),
        "loopC" => Interaction::loop_c(region.expect("parsed"), args.remove(0)),
        "strict" => Interaction::right_nested(args, Interaction::strict).expect("non-empty"),
        "alt" => Interaction::right_nested(args, Interaction::alt).expect("non-empty"),
        "seq" => Interaction::right_nested(args, Interaction::seq).expect("non-empty"),
        "par" => Interaction::right_nested(args, |a, b| Interaction::par(&all, a, b)).expect("non-empty"),
        "coreg" => {
            let r = region.expect("parsed");
            Interaction::right_nested(args, |a, b| Interaction::coreg(r.clone(), a, b)).expect("non-empty")
        }
        _ => unreachable!("operator list"),
    })
}

enum Doc {
    Leaf(String),
    Node(String, Vec<Doc>),
}

const WIDTH: usize = 60;

impl Doc {
    fn flat(&self) -> String {
        match self {
            Doc::Leaf(s) => s.clone(),
            Doc::Node(head, args) => {
                let inner: Vec<String> = args.iter().map(Doc::flat).collect();
                format!("{head}({})", inner.join(", "))
            }
        }
    }

    fn layout(&self, indent: usize, out: &mut String) {
        let flat = self.flat();
        match self {
            Doc::Node(head, args) if indent + flat.len() > WIDTH => {
                out.push_str(head);
                out.push_str("(\n");
                for (k, a) in args.iter().enumerate() {
                    out.push_str(&" ".repeat(indent + 2));
                    a.layout(indent + 2, out);
                    if k + 1 < args.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                out.push_str(&" ".repeat(indent));
                out.push(')');
            }
            _ => out.push_str(&flat),
        }
    }
}

/// `strict(l!m, seq(l1?m, seq(l2?m, ...)))` as emitter and receivers.
fn broadcast(i: &Interaction) -> Option<(Action, Vec<Action>)> {
    let Interaction::Strict(e, rest) = i else {
        return None;
    };
    let Interaction::Act(emit) = **e else {
        return None;
    };
    if emit.kind != ActionKind::Emit {
        return None;
    }
    let mut receivers = Vec::new();
    let mut cur: &Interaction = rest;
    loop {
        let (head, next) = match cur {
            Interaction::CoReg(r, a, b) if r.is_empty() => (&**a, Some(&**b)),
            other => (other, None),
        };
        match head {
            Interaction::Act(a) if a.kind == ActionKind::Receive && a.message == emit.message => {
                receivers.push(*a)
            }
            _ => return None,
        }
        match next {
            Some(n) => cur = n,
            None => return Some((emit, receivers)),
        }
    }
}

fn region_str(r: &LifelineSet, sig: &Signature) -> String {
    r.iter().map(|l| sig.lifeline_name(l)).collect::<Vec<_>>().join(",")
}

fn doc(i: &Interaction, sig: &Signature) -> Doc {
    let all = sig.all_lifelines();
    if let Some((e, rs)) = broadcast(i) {
        let targets: Vec<&str> = rs.iter().map(|a| sig.lifeline_name(a.lifeline)).collect();
        let target = if targets.len() == 1 {
            targets[0].to_string()
        } else {
            format!("({})", targets.join(","))
        };
        return Doc::Leaf(format!(
            "{} -- {} -> {}",
            sig.lifeline_name(e.lifeline),
            sig.message_name(e.message),
            target
        ));
    }
    match i {
        Interaction::Empty => Doc::Leaf("o".into()),
        Interaction::Act(a) => Doc::Leaf(match a.kind {
            ActionKind::Emit => format!(
                "{} -- {} ->|",
                sig.lifeline_name(a.lifeline),
                sig.message_name(a.message)
            ),
            ActionKind::Receive => format!(
                "{} -> {}",
                sig.message_name(a.message),
                sig.lifeline_name(a.lifeline)
            ),
        }),
        Interaction::Strict(..) => {
            let items = chain(i, |x| match x {
                Interaction::Strict(a, b) if broadcast(x).is_none() => Some((&**a, &**b)),
                _ => None,
            });
            Doc::Node("strict".into(), items.into_iter().map(|x| doc(x, sig)).collect())
        }
        Interaction::Alt(..) => {
            let items = chain(i, |x| match x {
                Interaction::Alt(a, b) => Some((&**a, &**b)),
                _ => None,
            });
            Doc::Node("alt".into(), items.into_iter().map(|x| doc(x, sig)).collect())
        }
        Interaction::CoReg(r, ..) => {
            let items = chain(i, |x| match x {
                Interaction::CoReg(r2, a, b) if r2 == r => Some((&**a, &**b)),
                _ => None,
            });
            let head = if r.is_empty() {
                "seq".to_string()
            } else if *r == all {
                "par".to_string()
            } else {
                format!("coreg({})", region_str(r, sig))
            };
            Doc::Node(head, items.into_iter().map(|x| doc(x, sig)).collect())
        }
        Interaction::LoopS(b) => Doc::Node("loopS".into(), vec![doc(b, sig)]),
        Interaction::LoopC(r, b) => {
            let head = if r.is_empty() {
                "loopW".to_string()
            } else if *r == all {
                "loopP".to_string()
            } else {
                format!("loopC({})", region_str(r, sig))
            };
            Doc::Node(head, vec![doc(b, sig)])
        }
    }
}

fn chain<'a>(
    i: &'a Interaction,
    split: impl Fn(&'a Interaction) -> Option<(&'a Interaction, &'a Interaction)>,
) -> Vec<&'a Interaction> {
    let mut items = Vec::new();
    let mut cur = i;
    while let Some((a, b)) = split(cur) {
        items.push(a);
        cur = b;
    }
    items.push(cur);
    items
}

/// One-line form of [`serialize_hif`].
pub fn serialize_hif_flat(i: &Interaction, sig: &Signature) -> String {
    doc(i, sig).flat()
}

pub fn serialize_hif(i: &Interaction, sig: &Signature) -> String {
    let mut out = String::new();
    doc(i, sig).layout(0, &mut out);
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{em, rc, running_example, single};

    fn sig() -> Signature {
        Signature::new(["l1", "l2", "l3"], ["m1", "m2", "m3", "m4", "m5"]).unwrap()
    }

    #[test]
    fn broadcast_desugars_in_order() {
        let i = parse_hif("l1 -- m1 -> (l2,l3)", &sig()).unwrap();
        assert_eq!(i, Interaction::strict(em(0, 0), Interaction::seq(rc(1, 0), rc(2, 0))));
    }

    #[test]
    fn nary_is_right_nested() {
        let i = parse_hif("seq(m1 -> l1, m2 -> l1, m3 -> l1)", &sig()).unwrap();
        assert_eq!(
            i,
            Interaction::seq(rc(0, 0), Interaction::seq(rc(0, 1), rc(0, 2)))
        );
    }

    #[test]
    fn running_example_round_trips() {
        let s = sig();
        let text = serialize_hif(&running_example(), &s);
        assert_eq!(parse_hif(&text, &s).unwrap(), running_example());
    }

    #[test]
    fn coreg_and_loopc_regions() {
        let i = parse_hif("coreg(l1,l2)(o, loopC(l2)(l1 -- m1 ->|))", &sig()).unwrap();
        let r: LifelineSet = [0, 1].into_iter().collect();
        assert_eq!(
            i,
            Interaction::coreg(r, Interaction::Empty, Interaction::loop_c(single(1), em(0, 0)))
        );
        assert_eq!(parse_hif(&serialize_hif(&i, &sig()), &sig()).unwrap(), i);
    }

    #[test]
    fn errors_carry_locations() {
        let e = parse_hif("seq(\n  l9 -- m1 ->|, o)", &sig()).unwrap_err();
        assert_eq!(e.kind, ErrorKind::UnknownLifeline("l9".into()));
        assert_eq!((e.loc.line, e.loc.column), (2, 3));
        let e = parse_hif("alt(o)", &sig()).unwrap_err();
        assert!(matches!(e.kind, ErrorKind::Arity { .. }));
        let e = parse_hif("loopW(o, o)", &sig()).unwrap_err();
        assert!(matches!(e.kind, ErrorKind::Arity { .. }));
        assert!(parse_hif("seq(o, o", &sig()).is_err());
        assert!(parse_hif("frob(o, o)", &sig()).is_err());
    }

    #[test]
    fn lone_strict_of_emission_and_reception_prints_as_arrow() {
        let s = sig();
        let i = Interaction::strict(em(0, 0), rc(1, 0));
        assert_eq!(serialize_hif(&i, &s), "l1 -- m1 -> l2\n");
        let j = Interaction::strict(em(0, 0), rc(1, 1));
        assert_eq!(serialize_hif(&j, &s), "strict(l1 -- m1 ->|, m2 -> l2)\n");
    }
}
