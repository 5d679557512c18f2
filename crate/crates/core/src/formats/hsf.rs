//! `@message{ m1; m2 } @lifeline{ l1; l2 }`

use std::collections::BTreeSet;

use super::{ErrorKind, ParseError, Parser};
use crate::ir::Signature;

pub fn parse_hsf(text: &str) -> Result<Signature, ParseError> {
    let mut p = Parser::new(text)?;
    let mut messages: Option<Vec<String>> = None;
    let mut lifelines: Option<Vec<String>> = None;
    let mut seen = BTreeSet::new();
    while !p.at_eof() {
        p.expect_sym("@")?;
        let (section, loc) = p.expect_word("`message` or `lifeline`")?;
        let slot = match section.as_str() {
            "message" => &mut messages,
            "lifeline" => &mut lifelines,
            _ => {
                return p.fail(
                    loc,
                    ErrorKind::UnknownOption {
                        name: section,
                        expected: "message, lifeline".into(),
                    },
                )
            }
        };
        if slot.is_some() {
            return p.fail(loc, ErrorKind::Repeated(section));
        }
        p.expect_sym("{")?;
        let mut names = Vec::new();
        while !p.at_sym("}") {
            let (name, loc) = p.expect_word("an identifier")?;
            if !seen.insert(name.clone()) {
                return p.fail(loc, ErrorKind::Duplicate(name));
            }
            names.push(name);
            if !p.eat_sym(";") {
                break;
            }
        }
        p.expect_sym("}")?;
        *slot = Some(names);
    }
    Ok(Signature::new(lifelines.unwrap_or_default(), messages.unwrap_or_default())
        .expect("identifiers checked while parsing"))
}

pub fn serialize_hsf(sig: &Signature) -> String {
    format!(
        "@message{{\n\t{}\n}}\n@lifeline{{\n\t{}\n}}\n",
        sig.messages().join(";"),
        sig.lifelines().join(";")
    )
}
