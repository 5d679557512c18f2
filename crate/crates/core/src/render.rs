//! DOT and ASCII renderings of terms, execution trees and analysis graphs.

use std::fmt::Write as _;

use crate::analysis::{AnalysisNode, AnalysisObserver, Badges, Rule, Step};
use crate::explore::{CutReason, TreeRecorder};
use crate::formats::hcf::Orientation;
use crate::formats::hif::serialize_hif_flat;
use crate::ir::{ActionKind, Interaction, Signature};

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out
}

fn header(name: &str, o: Orientation) -> String {
    let rank = match o {
        Orientation::Vertical => "TB",
        Orientation::Horizontal => "LR",
    };
    format!("digraph {name} {{\n  rankdir={rank};\n  node [fontname=\"monospace\"];\n")
}

fn op_label(i: &Interaction, sig: &Signature) -> String {
    let region = |r: &crate::ir::LifelineSet| {
        r.iter().map(|l| sig.lifeline_name(l)).collect::<Vec<_>>().join(",")
    };
    let all = sig.all_lifelines();
    match i {
        Interaction::Empty => "o".into(),
        Interaction::Act(a) => sig.action_str(a),
        Interaction::Strict(..) => "strict".into(),
        Interaction::Alt(..) => "alt".into(),
        Interaction::CoReg(r, ..) if r.is_empty() => "seq".into(),
        Interaction::CoReg(r, ..) if *r == all => "par".into(),
        Interaction::CoReg(r, ..) => format!("coreg({})", region(r)),
        Interaction::LoopS(_) => "loopS".into(),
        Interaction::LoopC(r, _) if r.is_empty() => "loopW".into(),
        Interaction::LoopC(r, _) if *r == all => "loopP".into(),
        Interaction::LoopC(r, _) => format!("loopC({})", region(r)),
    }
}

/// The term as a tree, one DOT node per term node.
pub fn term_tree_dot(i: &Interaction, sig: &Signature) -> String {
    fn walk(i: &Interaction, sig: &Signature, next: &mut usize, out: &mut String) -> usize {
        let id = *next;
        *next += 1;
        let shape = match i {
            Interaction::Act(_) | Interaction::Empty => "box",
            _ => "ellipse",
        };
        let _ = writeln!(out, "  n{id} [label=\"{}\", shape={shape}];", escape(&op_label(i, sig)));
        for c in i.children() {
            let cid = walk(c, sig, next, out);
            let _ = writeln!(out, "  n{id} -> n{cid};");
        }
        id
    }
    let mut out = header("term", Orientation::Vertical);
    walk(i, sig, &mut 0, &mut out);
    out.push_str("}\n");
    out
}

/// An explored execution tree.
pub fn execution_tree_dot(rec: &TreeRecorder, sig: &Signature, o: Orientation) -> String {
    let mut out = header("execution", o);
    for (id, i, accepts) in &rec.nodes {
        let periph = if *accepts { 2 } else { 1 };
        let _ = writeln!(
            out,
            "  n{id} [label=\"{}\", shape=box, peripheries={periph}];",
            escape(&serialize_hif_flat(i, sig))
        );
    }
    for (from, to, a, p) in &rec.edges {
        let _ = writeln!(out, "  n{from} -> n{to} [label=\"{} @{p}\"];", escape(&sig.action_str(a)));
    }
    for (k, (node, reason)) in rec.cuts.iter().enumerate() {
        let r = match reason {
            CutReason::MaxDepth => "max_depth",
            CutReason::MaxLoopInstantiations => "max_loop_depth",
            CutReason::MaxNodeNumber => "max_node_number",
        };
        let _ = writeln!(out, "  cut{k} [label=\"cut: {r}\", shape=plaintext];");
        let _ = writeln!(out, "  n{node} -> cut{k} [style=dashed];");
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct GraphNode {
    id: usize,
    label: String,
}

/// Records an analysis graph for [`AnalysisGraphRecorder::to_dot`]. Only the
/// deciding search phase is kept.
#[derive(Debug, Clone)]
pub struct AnalysisGraphRecorder {
    sig: Signature,
    nodes: Vec<GraphNode>,
    sinks: Vec<(usize, bool)>,
    edges: Vec<(usize, usize, Option<String>)>,
}

impl AnalysisGraphRecorder {
    pub fn new(sig: &Signature) -> Self {
        AnalysisGraphRecorder {
            sig: sig.clone(),
            nodes: Vec::new(),
            sinks: Vec::new(),
            edges: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn to_dot(&self, o: Orientation) -> String {
        let mut out = header("analysis", o);
        for n in &self.nodes {
            let _ = writeln!(out, "  v{} [label=\"{}\", shape=box];", n.id, escape(&n.label));
        }
        for (id, ok) in &self.sinks {
            let (label, color) = if *ok { ("Ok", "green") } else { ("Ko", "red") };
            let _ = writeln!(out, "  v{id} [label=\"{label}\", shape=circle, color={color}];");
        }
        for (from, to, label) in &self.edges {
            match label {
                Some(l) => {
                    let _ = writeln!(out, "  v{from} -> v{to} [label=\"{}\"];", escape(l));
                }
                None => {
                    let _ = writeln!(out, "  v{from} -> v{to};");
                }
            }
        }
        out.push_str("}\n");
        out
    }

    fn badge_text(&self, node_colocs: &[String], b: &Badges) -> String {
        let mut parts = Vec::new();
        for (c, name) in node_colocs.iter().enumerate() {
            let mut tags = Vec::new();
            if b.started[c] {
                tags.push("started".to_string());
            }
            if b.ended[c] {
                tags.push("ended".to_string());
            }
            if b.simulated_before[c] > 0 {
                tags.push(format!("sim-before x{}", b.simulated_before[c]));
            }
            if b.simulated_after[c] > 0 {
                tags.push(format!("sim-after x{}", b.simulated_after[c]));
            }
            if !tags.is_empty() {
                parts.push(format!("[{name}] {}", tags.join(", ")));
            }
        }
        parts.join("\n")
    }
}

impl<M: std::fmt::Display> AnalysisObserver<M> for AnalysisGraphRecorder {
    fn node(&mut self, id: usize, node: &AnalysisNode<M>, badges: &Badges) {
        let colocs: Vec<String> = node
            .multitrace
            .partition()
            .colocs()
            .iter()
            .map(|c| c.iter().map(|l| self.sig.lifeline_name(l)).collect::<Vec<_>>().join(","))
            .collect();
        let mut label = format!(
            "{}\n{}\n{}",
            node.measure,
            serialize_hif_flat(&node.interaction, &self.sig),
            node.multitrace.to_text(&self.sig)
        );
        let b = self.badge_text(&colocs, badges);
        if !b.is_empty() {
            label.push('\n');
            label.push_str(&b);
        }
        self.nodes.push(GraphNode { id, label });
    }

    fn edge(&mut self, from: usize, to: usize, step: Option<&Step>) {
        let label = step.map(|s| {
            let rule = match s.rule {
                Rule::Execute => "Re",
                Rule::Simulate => "Rs",
            };
            format!("{rule} {} @{}", self.sig.action_str(&s.action), s.position)
        });
        self.edges.push((from, to, label));
    }

    fn verdict_sink(&mut self, id: usize, ok: bool) {
        self.sinks.push((id, ok));
    }

    fn reset(&mut self) {
        self.nodes.clear();
        self.sinks.clear();
        self.edges.clear();
    }
}

const COL: usize = 10;

struct Sketch<'a> {
    sig: &'a Signature,
    gutter: usize,
    rows: Vec<String>,
}

impl Sketch<'_> {
    fn blank(&self) -> Vec<char> {
        let n = self.sig.lifeline_count();
        let mut row = vec![' '; self.gutter + n * COL];
        for l in 0..n {
            row[self.col(l)] = '|';
        }
        row
    }

    fn col(&self, l: usize) -> usize {
        self.gutter + l * COL + COL / 2
    }

    fn put(&mut self, depth: usize, marker: &str, mut row: Vec<char>) {
        for (k, c) in marker.chars().enumerate() {
            if 2 * depth + k < self.gutter {
                row[2 * depth + k] = c;
            }
        }
        self.rows.push(row.into_iter().collect::<String>().trim_end().to_string());
    }

    fn text_at(row: &mut [char], at: usize, s: &str) {
        for (k, c) in s.chars().enumerate() {
            if at + k < row.len() {
                row[at + k] = c;
            }
        }
    }

    fn arrow(&mut self, depth: usize, from: usize, to: &[usize], msg: &str) {
        let mut row = self.blank();
        let a = self.col(from);
        let lo = to.iter().map(|&t| self.col(t)).chain([a]).min().unwrap_or(a);
        let hi = to.iter().map(|&t| self.col(t)).chain([a]).max().unwrap_or(a);
        for c in row.iter_mut().take(hi).skip(lo + 1) {
            *c = '-';
        }
        row[a] = 'o';
        for &t in to {
            let c = self.col(t);
            row[c] = if c >= a { '>' } else { '<' };
        }
        let label_at = if hi > a { a + 2 } else { lo + 2 };
        Self::text_at(&mut row, label_at, msg);
        self.put(depth, "", row);
    }

    fn lone(&mut self, depth: usize, l: usize, text: &str) {
        let mut row = self.blank();
        let c = self.col(l);
        Self::text_at(&mut row, c + 1, text);
        self.put(depth, "", row);
    }

    fn walk(&mut self, i: &Interaction, depth: usize) {
        if let Interaction::Strict(e, r) = i {
            if let Interaction::Act(ea) = **e {
                let mut targets = Vec::new();
                let mut cur: &Interaction = r;
                let ok = loop {
                    let (head, next) = match cur {
                        Interaction::CoReg(reg, a, b) if reg.is_empty() => (&**a, Some(&**b)),
                        other => (other, None),
                    };
                    match head {
                        Interaction::Act(ra)
                            if ra.kind == ActionKind::Receive
                                && ea.kind == ActionKind::Emit
                                && ra.message == ea.message =>
                        {
                            targets.push(ra.lifeline)
                        }
                        _ => break false,
                    }
                    match next {
                        Some(n) => cur = n,
                        None => break true,
                    }
                };
                if ok {
                    self.arrow(depth, ea.lifeline, &targets, self.sig.message_name(ea.message));
                    return;
                }
            }
        }
        match i {
            Interaction::Empty => {}
            Interaction::Act(a) => {
                let m = self.sig.message_name(a.message);
                match a.kind {
                    ActionKind::Emit => self.lone(depth, a.lifeline, &format!("--{m}->")),
                    ActionKind::Receive => self.lone(depth, a.lifeline, &format!("<-{m}--")),
                }
            }
            _ => {
                let label = op_label(i, self.sig);
                let row = self.blank();
                self.put(depth, &format!("[{label}"), row);
                for (k, c) in i.children().into_iter().enumerate() {
                    if k > 0 {
                        let row = self.blank();
                        self.put(depth, "~", row);
                    }
                    self.walk(c, depth + 1);
                }
                let row = self.blank();
                self.put(depth, "]", row);
            }
        }
    }
}

/// A sequence-diagram sketch: lifelines as columns, one row per arrow,
/// operators as bracketed regions in the left gutter.
pub fn ascii_sketch(i: &Interaction, sig: &Signature) -> String {
    let depth = nesting(i);
    let widest = label_width(i, sig);
    let gutter = 2 * depth + widest + 2;
    let mut s = Sketch {
        sig,
        gutter,
        rows: Vec::new(),
    };
    let mut head = vec![' '; gutter + sig.lifeline_count() * COL];
    for l in 0..sig.lifeline_count() {
        let name = sig.lifeline_name(l);
        let at = s.col(l).saturating_sub(name.chars().count() / 2);
        Sketch::text_at(&mut head, at, name);
    }
    s.rows.push(head.into_iter().collect::<String>().trim_end().to_string());
    s.walk(i, 0);
    let mut out = s.rows.join("\n");
    out.push('\n');
    out
}

fn nesting(i: &Interaction) -> usize {
    match i {
        Interaction::Empty | Interaction::Act(_) => 0,
        _ => 1 + i.children().into_iter().map(nesting).max().unwrap_or(0),
    }
}

fn label_width(i: &Interaction, sig: &Signature) -> usize {
    let own = match i {
        Interaction::Empty | Interaction::Act(_) => 0,
        _ => op_label(i, sig).chars().count() + 1,
    };
    i.children()
        .into_iter()
        .map(|c| label_width(c, sig))
        .chain([own])
        .max()
        .unwrap_or(0)
}
