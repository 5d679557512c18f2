//! Multi-traces: `[l1,l2] l1!m1.l2?m1; [l3] l3?m1`.
//!
//! `[#all]` stands for every lifeline, `[#any]` for the lifelines the
//! component's actions mention. Lifelines left out get their own empty
//! component.

use std::sync::Arc;

use super::{ErrorKind, Loc, ParseError, Parser};
use crate::ir::{Action, LifelineSet, Signature};
use crate::trace::{MultiTrace, Partition, Trace};

enum Coloc {
    All,
    Any,
    Listed(LifelineSet),
}

fn action(p: &mut Parser, sig: &Signature) -> Result<(Action, Loc), ParseError> {
    let (lname, loc) = p.expect_word("a lifeline")?;
    let Some(l) = sig.lifeline(&lname) else {
        return p.fail(loc, ErrorKind::UnknownLifeline(lname));
    };
    let emit = if p.eat_sym("!") {
        true
    } else if p.eat_sym("?") {
        false
    } else {
        return p.error("`!` or `?`");
    };
    let (mname, mloc) = p.expect_word("a message")?;
    let Some(m) = sig.message(&mname) else {
        return p.fail(mloc, ErrorKind::UnknownMessage(mname));
    };
    let a = if emit {
        Action::emit(l, m)
    } else {
        Action::receive(l, m)
    };
    Ok((a, loc))
}

/// Parses a multi-trace. With `partition`, the co-localizations must match it
/// and `[#any]` resolves against it.
pub fn parse_htf(
    text: &str,
    sig: &Signature,
    partition: Option<&Partition>,
) -> Result<MultiTrace, ParseError> {
    let mut p = Parser::new(text)?;
    let n = sig.lifeline_count();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut comps: Vec<(LifelineSet, Trace)> = Vec::new();
    while !p.at_eof() {
        let open = p.expect_sym("[")?;
        let coloc = if p.eat_sym("#") {
            let (kw, loc) = p.expect_word("`all` or `any`")?;
            match kw.as_str() {
                "all" => Coloc::All,
                "any" => Coloc::Any,
                _ => {
                    return p.fail(
                        loc,
                        ErrorKind::Expected {
                            expected: "`all` or `any`".into(),
                            found: format!("`{kw}`"),
                        },
                    )
                }
            }
        } else {
            let mut set = LifelineSet::empty();
            loop {
                let (name, loc) = p.expect_word("a lifeline")?;
                match sig.lifeline(&name) {
                    Some(l) => set.insert(l),
                    None => return p.fail(loc, ErrorKind::UnknownLifeline(name)),
                };
                if !p.eat_sym(",") {
                    break;
                }
            }
            Coloc::Listed(set)
        };
        p.expect_sym("]")?;
        let mut trace = Vec::new();
        let mut locs = Vec::new();
        if !p.at_sym(";") && !p.at_eof() {
            loop {
                let (a, loc) = action(&mut p, sig)?;
                trace.push(a);
                locs.push(loc);
                if !p.eat_sym(".") {
                    break;
                }
            }
        }
        let set = match coloc {
            Coloc::All => sig.all_lifelines(),
            Coloc::Listed(s) => s,
            Coloc::Any => {
                if trace.is_empty() {
                    return p.fail(open, ErrorKind::EmptyAnyComponent);
                }
                let mut s = LifelineSet::empty();
                for a in &trace {
                    match partition {
                        Some(part) => {
                            for l in part.colocs()[part.coloc_index(a.lifeline)].iter() {
                                s.insert(l);
                            }
                        }
                        None => {
                            s.insert(a.lifeline);
                        }
                    }
                }
                s
            }
        };
        for (a, loc) in trace.iter().zip(&locs) {
            if !set.contains(a.lifeline) {
                return p.fail(
                    *loc,
                    ErrorKind::ActionOutsideColoc(sig.lifeline_name(a.lifeline).to_string()),
                );
            }
        }
        for l in set.iter() {
            if owner[l].is_some() {
                return p.fail(open, ErrorKind::OverlappingColocs(sig.lifeline_name(l).to_string()));
            }
            owner[l] = Some(comps.len());
        }
        comps.push((set, trace));
        if !p.eat_sym(";") {
            break;
        }
    }
    p.expect_eof()?;
    let end = p.loc();
    for l in 0..n {
        if owner[l].is_some() {
            continue;
        }
        let set = match partition {
            Some(part) => part.colocs()[part.coloc_index(l)].clone(),
            None => LifelineSet::singleton(l),
        };
        for k in set.iter() {
            if owner[k].is_some() {
                return p.fail(end, ErrorKind::PartitionMismatch);
            }
            owner[k] = Some(comps.len());
        }
        comps.push((set, Vec::new()));
    }
    comps.sort_by_key(|(s, _)| s.first());
    let (colocs, traces): (Vec<_>, Vec<_>) = comps.into_iter().unzip();
    if let Some(part) = partition {
        if part.colocs() != colocs.as_slice() {
            return p.fail(end, ErrorKind::PartitionMismatch);
        }
    }
    let part = Partition::new(colocs, n).map_err(|_| ParseError {
        loc: end,
        kind: ErrorKind::PartitionMismatch,
    })?;
    Ok(MultiTrace::new(Arc::new(part), traces).expect("components checked while parsing"))
}

pub fn serialize_htf(mu: &MultiTrace, sig: &Signature) -> String {
    let mut lines = Vec::new();
    for (coloc, comp) in mu.partition().colocs().iter().zip(mu.components()) {
        let names: Vec<&str> = coloc.iter().map(|l| sig.lifeline_name(l)).collect();
        let mut line = format!("[{}]", names.join(","));
        if !comp.is_empty() {
            line.push(' ');
            line.push_str(&sig.trace_str(comp));
        }
        lines.push(line);
    }
    let mut out = lines.join(";\n");
    out.push('\n');
    out
}
