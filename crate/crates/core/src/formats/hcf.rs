//! Exploration and analysis options.
//!
//! ```text
//! @explore_option{
//!   loggers = [graphic[svg,vertical], tracegen[generation = exact, partition = {(l1,l2),(l3)}]];
//!   strategy = HCS;
//!   filters = [max_depth = 35, max_loop_depth = 4, max_node_number = 250];
//!   priorities = random
//! }
//! @analyze_option{
//!   loggers = [graphic[svg]];
//!   analysis_kind = simulate[before = true, loop max depth, reset = true, multiply = false, act num = 10];
//!   strategy = DFS;
//!   priorities = [simu = -1];
//!   goal = WeakPass
//! }
//! ```
//!
//! Both sections are optional; missing options take their defaults.

use std::fmt::Write as _;
use std::str::FromStr;

use super::{ErrorKind, Loc, ParseError, Parser};
use crate::analysis::{ActSource, AnalysisConfig, AnalysisKind, Goal, LoopActMeasure, LoopSource, Priorities};
use crate::explore::{ExploreConfig, FrontierOrder, GenerationMode, Strategy};
use crate::ir::{LifelineSet, Signature};
use crate::trace::Partition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GraphicFormat {
    #[default]
    Svg,
    Png,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    #[default]
    Vertical,
    Horizontal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GraphicLogger {
    pub format: GraphicFormat,
    pub orientation: Orientation,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum PartitionSpec {
    #[default]
    Discrete,
    Trivial,
    Explicit(Vec<Vec<String>>),
}

impl PartitionSpec {
    pub fn resolve(&self, sig: &Signature) -> Result<Partition, String> {
        match self {
            PartitionSpec::Discrete => Ok(Partition::discrete(sig)),
            PartitionSpec::Trivial => Ok(Partition::trivial(sig)),
            PartitionSpec::Explicit(groups) => {
                let mut colocs = Vec::new();
                for g in groups {
                    let mut set = LifelineSet::empty();
                    for name in g {
                        let l = sig
                            .lifeline(name)
                            .ok_or_else(|| format!("undeclared lifeline `{name}` in partition"))?;
                        set.insert(l);
                    }
                    colocs.push(set);
                }
                Partition::new(colocs, sig.lifeline_count()).map_err(|e| e.to_string())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoggerSpec {
    Graphic(GraphicLogger),
    TraceGen {
        generation: GenerationMode,
        partition: PartitionSpec,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Filters {
    pub max_depth: Option<usize>,
    pub max_loop_depth: Option<usize>,
    pub max_node_number: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExplorePriorities {
    #[default]
    Lexicographic,
    Random,
    Weighted {
        emission: i32,
        reception: i32,
        in_loop: i32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExploreOptions {
    pub loggers: Vec<LoggerSpec>,
    pub strategy: Strategy,
    pub filters: Filters,
    pub priorities: ExplorePriorities,
}

impl ExploreOptions {
    /// `seed` feeds the random frontier order.
    pub fn to_config(&self, seed: u64) -> ExploreConfig {
        ExploreConfig {
            strategy: self.strategy,
            max_depth: self.filters.max_depth,
            max_loop_instantiations: self.filters.max_loop_depth,
            max_node_number: self.filters.max_node_number,
            order: match self.priorities {
                ExplorePriorities::Lexicographic => FrontierOrder::Lexicographic,
                ExplorePriorities::Random => FrontierOrder::Random(seed),
                ExplorePriorities::Weighted {
                    emission,
                    reception,
                    in_loop,
                } => FrontierOrder::Weighted {
                    emission,
                    reception,
                    in_loop,
                },
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalyzeOptions {
    pub loggers: Vec<GraphicLogger>,
    pub kind: AnalysisKind,
    pub strategy: Strategy,
    pub priorities: Priorities,
    pub goal: Goal,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        let c = AnalysisConfig::default();
        AnalyzeOptions {
            loggers: Vec::new(),
            kind: c.kind,
            strategy: c.strategy,
            priorities: c.priorities,
            goal: c.goal,
        }
    }
}

impl AnalyzeOptions {
    pub fn to_config(&self) -> AnalysisConfig {
        AnalysisConfig {
            kind: self.kind,
            strategy: self.strategy,
            priorities: self.priorities,
            goal: self.goal,
            ..AnalysisConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConfigFile {
    pub explore: ExploreOptions,
    pub analyze: AnalyzeOptions,
}

fn unknown<T>(p: &Parser, loc: Loc, name: &str, expected: &[&str]) -> Result<T, ParseError> {
    p.fail(
        loc,
        ErrorKind::UnknownOption {
            name: name.to_string(),
            expected: expected.join(", "),
        },
    )
}

fn bad_value<T>(p: &Parser, loc: Loc, option: &str, value: &str) -> Result<T, ParseError> {
    p.fail(
        loc,
        ErrorKind::BadValue {
            option: option.to_string(),
            value: value.to_string(),
        },
    )
}

fn number<T: FromStr>(p: &mut Parser, option: &str) -> Result<T, ParseError> {
    let (w, loc) = p.expect_word("a number")?;
    match w.parse() {
        Ok(v) => Ok(v),
        Err(_) => bad_value(p, loc, option, &w),
    }
}

fn boolean(p: &mut Parser, option: &str) -> Result<bool, ParseError> {
    let (w, loc) = p.expect_word("`true` or `false`")?;
    match w.as_str() {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => bad_value(p, loc, option, &w),
    }
}

fn choice<T: Copy>(p: &mut Parser, option: &str, table: &[(&str, T)]) -> Result<T, ParseError> {
    let names: Vec<&str> = table.iter().map(|(n, _)| *n).collect();
    let (w, loc) = p.expect_word(&names.join(" or "))?;
    match table.iter().find(|(n, _)| *n == w) {
        Some((_, v)) => Ok(*v),
        None => bad_value(p, loc, option, &w),
    }
}

/// `[item, item, ...]`, possibly empty.
fn bracketed(
    p: &mut Parser,
    mut item: impl FnMut(&mut Parser) -> Result<(), ParseError>,
) -> Result<(), ParseError> {
    p.expect_sym("[")?;
    while !p.at_sym("]") {
        item(p)?;
        if !p.eat_sym(",") {
            break;
        }
    }
    p.expect_sym("]")?;
    Ok(())
}

const STRATEGIES: [(&str, Strategy); 3] = [
    ("BFS", Strategy::Bfs),
    ("DFS", Strategy::Dfs),
    ("HCS", Strategy::Hcs),
];

fn graphic(p: &mut Parser) -> Result<GraphicLogger, ParseError> {
    let mut g = GraphicLogger::default();
    if p.at_sym("[") {
        bracketed(p, |p| {
            let (w, loc) = p.expect_word("a graphic option")?;
            match w.as_str() {
                "svg" => g.format = GraphicFormat::Svg,
                "png" => g.format = GraphicFormat::Png,
                "dot" => g.format = GraphicFormat::Dot,
                "vertical" => g.orientation = Orientation::Vertical,
                "horizontal" => g.orientation = Orientation::Horizontal,
                _ => return unknown(p, loc, &w, &["svg", "png", "dot", "vertical", "horizontal"]),
            }
            Ok(())
        })?;
    }
    Ok(g)
}

fn partition_spec(p: &mut Parser) -> Result<PartitionSpec, ParseError> {
    if p.eat_sym("{") {
        let mut groups = Vec::new();
        while !p.at_sym("}") {
            p.expect_sym("(")?;
            let mut g = vec![p.expect_word("a lifeline")?.0];
            while p.eat_sym(",") {
                g.push(p.expect_word("a lifeline")?.0);
            }
            p.expect_sym(")")?;
            groups.push(g);
            if !p.eat_sym(",") {
                break;
            }
        }
        p.expect_sym("}")?;
        return Ok(PartitionSpec::Explicit(groups));
    }
    let (w, loc) = p.expect_word("`{`, `discrete` or `trivial`")?;
    match w.as_str() {
        "discrete" => Ok(PartitionSpec::Discrete),
        "trivial" => Ok(PartitionSpec::Trivial),
        _ => bad_value(p, loc, "partition", &w),
    }
}

fn logger(p: &mut Parser, allow_tracegen: bool) -> Result<LoggerSpec, ParseError> {
    let (w, loc) = p.expect_word("a logger")?;
    match w.as_str() {
        "graphic" => Ok(LoggerSpec::Graphic(graphic(p)?)),
        "tracegen" if allow_tracegen => {
            let mut generation = GenerationMode::default();
            let mut partition = PartitionSpec::default();
            if p.at_sym("[") {
                bracketed(p, |p| {
                    let (k, kloc) = p.expect_word("a tracegen option")?;
                    p.expect_sym("=")?;
                    match k.as_str() {
                        "generation" => {
                            generation = choice(
                                p,
                                "generation",
                                &[
                                    ("exact", GenerationMode::Exact),
                                    ("prefix", GenerationMode::Prefix),
                                    ("terminal", GenerationMode::Terminal),
                                ],
                            )?
                        }
                        "partition" => partition = partition_spec(p)?,
                        _ => return unknown(p, kloc, &k, &["generation", "partition"]),
                    }
                    Ok(())
                })?;
            }
            Ok(LoggerSpec::TraceGen {
                generation,
                partition,
            })
        }
        _ if allow_tracegen => unknown(p, loc, &w, &["graphic", "tracegen"]),
        _ => unknown(p, loc, &w, &["graphic"]),
    }
}

fn loggers(p: &mut Parser, allow_tracegen: bool) -> Result<Vec<LoggerSpec>, ParseError> {
    let mut out = Vec::new();
    bracketed(p, |p| {
        out.push(logger(p, allow_tracegen)?);
        Ok(())
    })?;
    Ok(out)
}

fn filters(p: &mut Parser) -> Result<Filters, ParseError> {
    let mut f = Filters::default();
    bracketed(p, |p| {
        let (k, loc) = p.expect_word("a filter")?;
        p.expect_sym("=")?;
        let slot = match k.as_str() {
            "max_depth" => &mut f.max_depth,
            "max_loop_depth" => &mut f.max_loop_depth,
            "max_node_number" => &mut f.max_node_number,
            _ => return unknown(p, loc, &k, &["max_depth", "max_loop_depth", "max_node_number"]),
        };
        *slot = Some(number(p, &k)?);
        Ok(())
    })?;
    Ok(f)
}

fn explore_priorities(p: &mut Parser) -> Result<ExplorePriorities, ParseError> {
    if !p.at_sym("[") {
        return choice(
            p,
            "priorities",
            &[
                ("random", ExplorePriorities::Random),
                ("lexicographic", ExplorePriorities::Lexicographic),
            ],
        );
    }
    let (mut emission, mut reception, mut in_loop) = (0, 0, 0);
    bracketed(p, |p| {
        let (k, loc) = p.expect_word("a priority")?;
        p.expect_sym("=")?;
        let slot = match k.as_str() {
            "emission" => &mut emission,
            "reception" => &mut reception,
            "loop" => &mut in_loop,
            _ => return unknown(p, loc, &k, &["emission", "reception", "loop"]),
        };
        *slot = number(p, &k)?;
        Ok(())
    })?;
    Ok(ExplorePriorities::Weighted {
        emission,
        reception,
        in_loop,
    })
}

fn analyze_priorities(p: &mut Parser) -> Result<Priorities, ParseError> {
    let mut pr = Priorities::default();
    bracketed(p, |p| {
        let (k, loc) = p.expect_word("a priority")?;
        p.expect_sym("=")?;
        let slot = match k.as_str() {
            "simu" => &mut pr.simulate,
            "emission" => &mut pr.emission,
            "reception" => &mut pr.reception,
            "loop" => &mut pr.in_loop,
            _ => return unknown(p, loc, &k, &["simu", "emission", "reception", "loop"]),
        };
        *slot = number(p, &k)?;
        Ok(())
    })?;
    Ok(pr)
}

/// Reads words up to `,`, `]` or `=`.
fn phrase(p: &mut Parser) -> Result<(String, Loc), ParseError> {
    let (first, loc) = p.expect_word("an option")?;
    let mut words = vec![first];
    while let super::Tok::Word(_) = p.peek() {
        words.push(p.bump_word());
    }
    Ok((words.join(" "), loc))
}

fn analysis_kind(p: &mut Parser) -> Result<AnalysisKind, ParseError> {
    let (w, loc) = p.expect_word("an analysis kind")?;
    match w.as_str() {
        "accept" => Ok(AnalysisKind::Accept),
        "prefix" => Ok(AnalysisKind::Prefix),
        "simulate" => {
            let mut m = LoopActMeasure::default();
            if p.at_sym("[") {
                bracketed(p, |p| {
                    let (k, kloc) = phrase(p)?;
                    match k.as_str() {
                        "loop max depth" => m.loop_source = LoopSource::MaxDepth,
                        "loop max num" => m.loop_source = LoopSource::TotalLoopCount,
                        "act max num" => m.act_source = ActSource::OutsideLoops,
                        "loop num" => {
                            p.expect_sym("=")?;
                            m.loop_source = LoopSource::Fixed(number(p, &k)?);
                        }
                        "act num" => {
                            p.expect_sym("=")?;
                            m.act_source = ActSource::Fixed(number(p, &k)?);
                        }
                        "before" | "reset" | "multiply" => {
                            p.expect_sym("=")?;
                            let v = boolean(p, &k)?;
                            match k.as_str() {
                                "before" => m.before = v,
                                "reset" => m.reset = v,
                                _ => m.multiply = v,
                            }
                        }
                        _ => {
                            return unknown(
                                p,
                                kloc,
                                &k,
                                &[
                                    "before",
                                    "loop max depth",
                                    "loop max num",
                                    "loop num",
                                    "reset",
                                    "multiply",
                                    "act max num",
                                    "act num",
                                ],
                            )
                        }
                    }
                    Ok(())
                })?;
            }
            Ok(AnalysisKind::Simulate(m))
        }
        _ => bad_value(p, loc, "analysis_kind", &w),
    }
}

fn section(
    p: &mut Parser,
    keys: &[&str],
    mut value: impl FnMut(&mut Parser, &str) -> Result<(), ParseError>,
) -> Result<(), ParseError> {
    p.expect_sym("{")?;
    let mut seen: Vec<String> = Vec::new();
    while !p.at_sym("}") {
        let (k, loc) = p.expect_word("an option name")?;
        if !keys.contains(&k.as_str()) {
            return unknown(p, loc, &k, keys);
        }
        if seen.contains(&k) {
            return p.fail(loc, ErrorKind::Repeated(k));
        }
        p.expect_sym("=")?;
        value(p, &k)?;
        seen.push(k);
        if !p.eat_sym(";") {
            break;
        }
    }
    p.expect_sym("}")?;
    Ok(())
}

pub fn parse_hcf(text: &str) -> Result<ConfigFile, ParseError> {
    let mut p = Parser::new(text)?;
    let mut cfg = ConfigFile::default();
    let mut seen = Vec::new();
    while !p.at_eof() {
        p.expect_sym("@")?;
        let (name, loc) = p.expect_word("a section name")?;
        if seen.contains(&name) {
            return p.fail(loc, ErrorKind::Repeated(name));
        }
        match name.as_str() {
            "explore_option" => {
                let e = &mut cfg.explore;
                section(&mut p, &["loggers", "strategy", "filters", "priorities"], |p, k| {
                    match k {
                        "loggers" => e.loggers = loggers(p, true)?,
                        "strategy" => e.strategy = choice(p, k, &STRATEGIES)?,
                        "filters" => e.filters = filters(p)?,
                        _ => e.priorities = explore_priorities(p)?,
                    }
                    Ok(())
                })?;
            }
            "analyze_option" => {
                let a = &mut cfg.analyze;
                section(
                    &mut p,
                    &["loggers", "analysis_kind", "strategy", "priorities", "goal"],
                    |p, k| {
                        match k {
                            "loggers" => {
                                a.loggers = loggers(p, false)?
                                    .into_iter()
                                    .filter_map(|l| match l {
                                        LoggerSpec::Graphic(g) => Some(g),
                                        LoggerSpec::TraceGen { .. } => None,
                                    })
                                    .collect()
                            }
                            "analysis_kind" => a.kind = analysis_kind(p)?,
                            "strategy" => a.strategy = choice(p, k, &STRATEGIES)?,
                            "priorities" => a.priorities = analyze_priorities(p)?,
                            _ => {
                                a.goal = choice(
                                    p,
                                    k,
                                    &[
                                        ("Pass", Goal::Pass),
                                        ("WeakPass", Goal::WeakPass),
                                        ("none", Goal::Exhaustive),
                                    ],
                                )?
                            }
                        }
                        Ok(())
                    },
                )?;
            }
            _ => return unknown(&p, loc, &name, &["explore_option", "analyze_option"]),
        }
        seen.push(name);
    }
    Ok(cfg)
}

fn strategy_str(s: Strategy) -> &'static str {
    match s {
        Strategy::Bfs => "BFS",
        Strategy::Dfs => "DFS",
        Strategy::Hcs => "HCS",
    }
}

fn graphic_str(g: &GraphicLogger) -> String {
    let f = match g.format {
        GraphicFormat::Svg => "svg",
        GraphicFormat::Png => "png",
        GraphicFormat::Dot => "dot",
    };
    let o = match g.orientation {
        Orientation::Vertical => "vertical",
        Orientation::Horizontal => "horizontal",
    };
    format!("graphic[{f},{o}]")
}

fn logger_str(l: &LoggerSpec) -> String {
    match l {
        LoggerSpec::Graphic(g) => graphic_str(g),
        LoggerSpec::TraceGen {
            generation,
            partition,
        } => {
            let g = match generation {
                GenerationMode::Exact => "exact",
                GenerationMode::Prefix => "prefix",
                GenerationMode::Terminal => "terminal",
            };
            let p = match partition {
                PartitionSpec::Discrete => "discrete".to_string(),
                PartitionSpec::Trivial => "trivial".to_string(),
                PartitionSpec::Explicit(groups) => {
                    let gs: Vec<String> = groups.iter().map(|g| format!("({})", g.join(","))).collect();
                    format!("{{{}}}", gs.join(","))
                }
            };
            format!("tracegen[generation = {g}, partition = {p}]")
        }
    }
}

fn kind_str(k: &AnalysisKind) -> String {
    match k {
        AnalysisKind::Accept => "accept".into(),
        AnalysisKind::Prefix => "prefix".into(),
        AnalysisKind::Simulate(m) => {
            let lp = match m.loop_source {
                LoopSource::MaxDepth => "loop max depth".to_string(),
                LoopSource::TotalLoopCount => "loop max num".to_string(),
                LoopSource::Fixed(n) => format!("loop num = {n}"),
            };
            let act = match m.act_source {
                ActSource::OutsideLoops => "act max num".to_string(),
                ActSource::Fixed(n) => format!("act num = {n}"),
            };
            format!(
                "simulate[before = {}, {lp}, reset = {}, multiply = {}, {act}]",
                m.before, m.reset, m.multiply
            )
        }
    }
}

pub fn serialize_hcf(cfg: &ConfigFile) -> String {
    let mut out = String::new();
    let e = &cfg.explore;
    let ls: Vec<String> = e.loggers.iter().map(logger_str).collect();
    let mut fs = Vec::new();
    if let Some(v) = e.filters.max_depth {
        fs.push(format!("max_depth = {v}"));
    }
    if let Some(v) = e.filters.max_loop_depth {
        fs.push(format!("max_loop_depth = {v}"));
    }
    if let Some(v) = e.filters.max_node_number {
        fs.push(format!("max_node_number = {v}"));
    }
    let pr = match e.priorities {
        ExplorePriorities::Lexicographic => "lexicographic".to_string(),
        ExplorePriorities::Random => "random".to_string(),
        ExplorePriorities::Weighted {
            emission,
            reception,
            in_loop,
        } => format!("[emission = {emission}, reception = {reception}, loop = {in_loop}]"),
    };
    let _ = write!(
        out,
        "@explore_option{{\n  loggers = [{}];\n  strategy = {};\n  filters = [{}];\n  priorities = {}\n}}\n",
        ls.join(", "),
        strategy_str(e.strategy),
        fs.join(", "),
        pr
    );
    let a = &cfg.analyze;
    let ls: Vec<String> = a.loggers.iter().map(graphic_str).collect();
    let p = a.priorities;
    let goal = match a.goal {
        Goal::Pass => "Pass",
        Goal::WeakPass => "WeakPass",
        Goal::Exhaustive => "none",
    };
    let _ = write!(
        out,
        "@analyze_option{{\n  loggers = [{}];\n  analysis_kind = {};\n  strategy = {};\n  priorities = [simu = {}, emission = {}, reception = {}, loop = {}];\n  goal = {}\n}}\n",
        ls.join(", "),
        kind_str(&a.kind),
        strategy_str(a.strategy),
        p.simulate,
        p.emission,
        p.reception,
        p.in_loop,
        goal
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_all_defaults() {
        assert_eq!(parse_hcf("").unwrap(), ConfigFile::default());
        assert_eq!(parse_hcf("  \n").unwrap(), ConfigFile::default());
    }

    #[test]
    fn unknown_option_reports_location() {
        let e = parse_hcf("@explore_option{\n  strategy = DFS;\n  speed = 3\n}").unwrap_err();
        assert!(matches!(e.kind, ErrorKind::UnknownOption { ref name, .. } if name == "speed"));
        assert_eq!((e.loc.line, e.loc.column), (3, 3));
        let e = parse_hcf("@analyze_option{ analysis_kind = simulate[loop min depth] }").unwrap_err();
        assert!(matches!(e.kind, ErrorKind::UnknownOption { .. }));
    }

    #[test]
    fn type_mismatch_is_rejected() {
        let e = parse_hcf("@explore_option{ filters = [max_depth = deep] }").unwrap_err();
        assert!(matches!(e.kind, ErrorKind::BadValue { .. }));
        let e = parse_hcf("@analyze_option{ analysis_kind = simulate[reset = 1] }").unwrap_err();
        assert!(matches!(e.kind, ErrorKind::BadValue { .. }));
    }

    #[test]
    fn tracegen_only_in_exploration() {
        assert!(parse_hcf("@analyze_option{ loggers = [tracegen] }").is_err());
        assert!(parse_hcf("@explore_option{ loggers = [tracegen] }").is_ok());
    }

    #[test]
    fn partial_priorities_keep_defaults() {
        let c = parse_hcf("@analyze_option{ priorities = [reception = 3] }").unwrap();
        assert_eq!(
            c.analyze.priorities,
            Priorities {
                reception: 3,
                ..Priorities::default()
            }
        );
    }

    #[test]
    fn round_trip_defaults_and_variants() {
        let mut c = ConfigFile::default();
        assert_eq!(parse_hcf(&serialize_hcf(&c)).unwrap(), c);
        c.explore.priorities = ExplorePriorities::Weighted {
            emission: 2,
            reception: -1,
            in_loop: 0,
        };
        c.explore.loggers.push(LoggerSpec::TraceGen {
            generation: GenerationMode::Terminal,
            partition: PartitionSpec::Explicit(vec![vec!["a".into(), "b".into()], vec!["c".into()]]),
        });
        c.analyze.kind = AnalysisKind::Prefix;
        c.analyze.goal = Goal::Exhaustive;
        assert_eq!(parse_hcf(&serialize_hcf(&c)).unwrap(), c);
    }
}
