//! Acceptance criteria 1-9. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use orv_core::analysis::{
    analyze, replay_witness, AnalysisConfig, AnalysisReport, LambdaAlpha, LoopActMeasure, MeasurePolicy,
    InitContext, Rule, Verdict,
};
use orv_core::experiment::{run_experiment, ExperimentConfig, SetName};
use orv_core::explore::{explore, ExploreConfig, ExploreLogger, ExploreNode};
use orv_core::formats::{
    parse_hcf, parse_hif, parse_hsf, parse_htf, serialize_hcf, serialize_hif, serialize_hsf, serialize_htf,
};
use orv_core::oracle::{
    oracle_membership, oracle_prefix_slice_membership, oracle_slice_membership, rho, rho_limited, Limits,
};
use orv_core::random::{random_config, random_interaction, random_multitrace, random_partition, TermShape};
use orv_core::semantics::{accepts_empty, frontier, membership, prune};
use orv_core::trace::mutate_insert_action;
use orv_core::{Action, Interaction, LifelineSet, MultiTrace, Signature};

const SEED: u64 = 0x5eed;
const CORPUS_SIZE: usize = 200;
const LOOP_BOUND: usize = 3;
/// Corpus terms whose bounded semantics exceeds these are redrawn.
const CORPUS_RHO_CAP: usize = 5_000;
const CORPUS_EXPLORE_CAP: usize = 30_000;
/// Length bound for the checks that keep the loops of the original term.
const LENGTH_BOUND: usize = 4;
const C1_TIME_LIMIT: Duration = Duration::from_secs(60);
const REPLAY_TIME_LIMIT: Duration = Duration::from_secs(1);
const FUZZ_RUNS: usize = 1_000;
const EXPERIMENT_TIME_LIMIT: Duration = Duration::from_secs(300);
const ROUND_TRIPS: usize = 500;
const NODE_CAP: usize = 1_000_000;

const SHAPE: TermShape = TermShape {
    lifelines: 3,
    messages: 2,
    max_actions: 6,
    max_loops: 2,
};

type Outcome = Result<String, String>;

fn main() -> ExitCode {
    let mut budget = NodeLedger::default();
    let corpus = progress("corpus", build_corpus);
    let results: Vec<(usize, &str, Outcome)> = vec![
        (1, "semantics equivalence", criterion_1(&corpus)),
        (2, "pruning and execution characterization", progress("2", || criterion_2(&corpus))),
        (3, "worked replays", progress("3", || criterion_3(&mut budget))),
        (4, "measure replay", progress("4", || criterion_4(&mut budget))),
        (5, "negative replays", progress("5", || criterion_5(&mut budget))),
        (6, "soundness fuzzing", progress("6", || criterion_6(&mut budget))),
        (7, "experiment pipeline", progress("7", || criterion_7(&mut budget))),
        (8, "format fidelity", progress("8", criterion_8)),
        (9, "termination regression", criterion_9(&budget)),
    ];
    let mut failed = 0;
    for (n, name, r) in &results {
        match r {
            Ok(msg) => println!("PASS criterion {n} ({name}): {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {n} ({name}): {msg}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

/// Runs `f`, noting its duration on stderr.
fn progress<T>(what: &str, f: impl FnOnce() -> T) -> T {
    let s = Instant::now();
    let v = f();
    eprintln!("[{what}: {:.1} s]", s.elapsed().as_secs_f64());
    v
}

fn fixture(name: &str) -> String {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn load(stem: &str) -> (Signature, Interaction, MultiTrace) {
    let sig = parse_hsf(&fixture(&format!("{stem}.hsf"))).expect("hsf");
    let i = parse_hif(&fixture(&format!("{stem}.hif")), &sig).expect("hif");
    let mu = parse_htf(&fixture(&format!("{stem}.htf")), &sig, None).expect("htf");
    (sig, i, mu)
}

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Node counts of every analysis run by criteria 3-7.
#[derive(Default)]
struct NodeLedger {
    runs: usize,
    max_nodes: usize,
    cap_hits: usize,
}

impl NodeLedger {
    fn record<M>(&mut self, r: &AnalysisReport<M>) {
        self.runs += 1;
        self.max_nodes = self.max_nodes.max(r.stats.nodes);
        self.cap_hits += r.stats.cap_hit as usize;
    }
}

struct GlobalTraces(BTreeSet<Vec<Action>>);

impl ExploreLogger for GlobalTraces {
    fn node(&mut self, n: &ExploreNode<'_>) {
        if n.accepts_empty() {
            self.0.insert(n.trace.to_vec());
        }
    }
}

fn explored(i: &Interaction, cfg: &ExploreConfig) -> (BTreeSet<Vec<Action>>, bool) {
    let mut g = GlobalTraces(BTreeSet::new());
    let rep = explore(i, cfg, &mut [&mut g]);
    (g.0, rep.cuts.is_empty())
}

struct Corpus {
    terms: Vec<(Interaction, BTreeSet<Vec<Action>>)>,
    redrawn: usize,
    elapsed: Duration,
    unrolled_mismatches: usize,
    bounded_mismatches: usize,
}

/// Random terms whose semantics at the loop bound fits the size guards, with
/// the criterion 1 checks run while drawing.
fn build_corpus() -> Corpus {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut c = Corpus {
        terms: Vec::new(),
        redrawn: 0,
        elapsed: Duration::ZERO,
        unrolled_mismatches: 0,
        bounded_mismatches: 0,
    };
    while c.terms.len() < CORPUS_SIZE {
        let i = random_interaction(&mut rng, &SHAPE);
        let Ok(r) = rho_limited(&i, &Limits::loops(LOOP_BOUND).with_cap(CORPUS_RHO_CAP)) else {
            c.redrawn += 1;
            continue;
        };
        let cfg = ExploreConfig {
            max_node_number: Some(CORPUS_EXPLORE_CAP),
            ..Default::default()
        };
        let (traces, complete) = explored(&i.unroll_loops(LOOP_BOUND), &cfg);
        if !complete {
            c.redrawn += 1;
            continue;
        }
        if traces != r {
            c.unrolled_mismatches += 1;
        }
        let cfg = ExploreConfig {
            max_depth: Some(LENGTH_BOUND),
            ..Default::default()
        };
        let limits = Limits::loops(LENGTH_BOUND).with_max_len(LENGTH_BOUND);
        if explored(&i, &cfg).0 != rho_limited(&i, &limits).expect("length-bounded") {
            c.bounded_mismatches += 1;
        }
        c.terms.push((i, r));
    }
    c.elapsed = start.elapsed();
    c
}

fn criterion_1(c: &Corpus) -> Outcome {
    let loops: usize = c.terms.iter().filter(|(i, _)| i.loop_count() > 0).count();
    let summary = format!(
        "{} terms ({} with loops, {} redrawn over the size guard), unrolled mismatches {}, \
         length-bounded mismatches {}, {:.1} s",
        c.terms.len(),
        loops,
        c.redrawn,
        c.unrolled_mismatches,
        c.bounded_mismatches,
        c.elapsed.as_secs_f64()
    );
    check(c.unrolled_mismatches == 0 && c.bounded_mismatches == 0, summary.clone())?;
    check(c.elapsed < C1_TIME_LIMIT, format!("over {C1_TIME_LIMIT:?}: {summary}"))?;
    Ok(summary)
}

fn touches(t: &[Action], lp: &LifelineSet) -> bool {
    t.iter().any(|a| lp.contains(a.lifeline))
}

fn criterion_2(c: &Corpus) -> Outcome {
    let mut prune_checks = 0;
    let mut prune_bad = 0;
    let mut exec_checks = 0;
    let mut exec_bad = 0;
    for (i, r) in &c.terms {
        // pruning: every non-empty lifeline subset
        for bits in 1u8..(1 << SHAPE.lifelines) {
            let lp: LifelineSet = (0..SHAPE.lifelines).filter(|l| bits & (1 << l) != 0).collect();
            let want: BTreeSet<Vec<Action>> = r.iter().filter(|t| !touches(t, &lp)).cloned().collect();
            let got = match prune(i, &lp) {
                Some(p) => rho(&p, LOOP_BOUND).expect("pruned terms are smaller"),
                None => BTreeSet::new(),
            };
            prune_checks += 1;
            prune_bad += (got != want) as usize;
        }
        // execution, loop-free: exact
        let u = i.unroll_loops(2);
        let ru = rho(&u, 0).expect("loop-free");
        exec_checks += 1;
        exec_bad += (first_steps(&ru) != frontier_steps(&u, &Limits::loops(0))) as usize;
        // execution with the loops kept: exact up to the length bound
        let lim = Limits::loops(LENGTH_BOUND).with_max_len(LENGTH_BOUND);
        let ri = rho_limited(i, &lim).expect("length-bounded");
        let tail_lim = Limits::loops(LENGTH_BOUND).with_max_len(LENGTH_BOUND - 1);
        exec_checks += 1;
        exec_bad += (first_steps(&ri) != frontier_steps(i, &tail_lim)) as usize;
    }
    let summary = format!(
        "prune {prune_checks} checks / {prune_bad} counterexamples, \
         execution {exec_checks} checks / {exec_bad} counterexamples"
    );
    check(prune_bad == 0 && exec_bad == 0, summary.clone())?;
    Ok(summary)
}

/// Non-empty traces of `r`, split as (head, tail).
fn first_steps(r: &BTreeSet<Vec<Action>>) -> BTreeSet<(Action, Vec<Action>)> {
    r.iter()
        .filter_map(|t| t.split_first().map(|(a, rest)| (*a, rest.to_vec())))
        .collect()
}

fn frontier_steps(i: &Interaction, tail_limits: &Limits) -> BTreeSet<(Action, Vec<Action>)> {
    let mut out = BTreeSet::new();
    for e in frontier(i) {
        for t in rho_limited(&e.follow_up, tail_limits).expect("follow-ups stay small") {
            out.insert((e.action, t));
        }
    }
    out
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let s = Instant::now();
    let v = f();
    (v, s.elapsed())
}

fn criterion_3(budget: &mut NodeLedger) -> Outcome {
    let (sig, i, full) = load("running");
    let slice = parse_htf(&fixture("slice.htf"), &sig, None).expect("slice");

    let (a, ta) = timed(|| analyze(&i, &full, &AnalysisConfig::accept()).expect("analysis"));
    budget.record(&a);
    let w = a.witness.as_ref().ok_or("accept on the full multi-trace gave no witness")?;
    check(
        a.verdict == Verdict::Pass && w.execute_count() == 5 && w.simulate_count() == 0,
        format!(
            "(a) got {} with {} Re / {} Rs",
            a.verdict,
            w.execute_count(),
            w.simulate_count()
        ),
    )?;

    let (b, tb) = timed(|| analyze(&i, &slice, &AnalysisConfig::default()).expect("analysis"));
    budget.record(&b);
    let w = b.witness.as_ref().ok_or("simulate on the slice gave no witness")?;
    let trace = sig.trace_str(&w.global_trace());
    check(
        b.verdict == Verdict::WeakPass
            && w.execute_count() == 2
            && w.simulate_count() == 3
            && trace == "l1!m1.l3?m1.l3!m4.l2?m1.l2?m4",
        format!("(b) got {} via {trace}", b.verdict),
    )?;

    let (c, tc) = timed(|| analyze(&i, &slice, &AnalysisConfig::accept()).expect("analysis"));
    budget.record(&c);
    check(c.verdict == Verdict::WeakFail, format!("(c) got {}", c.verdict))?;

    let worst = ta.max(tb).max(tc);
    check(worst < REPLAY_TIME_LIMIT, format!("slowest replay took {worst:?}"))?;
    Ok(format!(
        "(a) Pass 5 Re/0 Rs, (b) WeakPass 2 Re/3 Rs {trace}, (c) WeakFail; slowest {:.2} ms",
        worst.as_secs_f64() * 1e3
    ))
}

fn criterion_4(budget: &mut NodeLedger) -> Outcome {
    let (sig, i, _) = load("running");
    let slice = parse_htf(&fixture("slice.htf"), &sig, None).expect("slice");
    let policy = LoopActMeasure::default();
    let r = analyze(&i, &slice, &AnalysisConfig::simulate(policy)).expect("analysis");
    budget.record(&r);
    let w = r.witness.ok_or("no witness")?;
    let want = [(1, 3), (1, 2), (1, 1), (0, 4), (0, 3)].map(|(l, a)| LambdaAlpha::new(l, a));
    let shown: Vec<String> = w.measures.iter().map(|m| m.to_string()).collect();
    check(w.measures.len() == 6, format!("expected 6 vertices, got {shown:?}"))?;
    check(w.measures[..5] == want, format!("measures {shown:?}"))?;
    // vertex 2 and the last vertex follow executions, which reset the budget
    check(
        w.steps[1].rule == Rule::Execute && w.steps[4].rule == Rule::Execute,
        "the resets do not follow executions",
    )?;
    let end = replay_witness(&i, &slice, &policy, &w).ok_or("witness does not replay")?;
    let ctx = InitContext {
        multitrace_len: slice.len(),
    };
    let reset = policy.init(&end.interaction, &ctx);
    check(w.measures[5] == reset, format!("final vertex {} is not the reset {reset}", w.measures[5]))?;
    Ok(format!("{} then reset to {reset}", shown[..5].join(" -> ")))
}

fn criterion_5(budget: &mut NodeLedger) -> Outcome {
    let liberal = parse_hcf(&fixture("liberal.hcf")).expect("liberal.hcf").analyze.to_config();
    let mut parts = Vec::new();
    for stem in ["nested_a", "nested_b", "nested_c"] {
        let (_, i, mu) = load(stem);
        let d = analyze(&i, &mu, &AnalysisConfig::default()).expect("analysis");
        let l = analyze(&i, &mu, &liberal).expect("analysis");
        budget.record(&d);
        budget.record(&l);
        let valid = oracle_slice_membership(&i, &mu, mu.len()).expect("small oracle");
        check(
            d.verdict == Verdict::WeakFail && l.verdict == Verdict::WeakPass && valid,
            format!(
                "{stem}: default {}, liberal {}, oracle slice-valid {valid}",
                d.verdict, l.verdict
            ),
        )?;
        parts.push(format!("{stem} WeakFail->WeakPass"));
    }
    Ok(format!("{}; all oracle slice-valid", parts.join(", ")))
}

/// A random execution, cut at its last accepting point when `accepted`.
fn walk(rng: &mut ChaCha8Rng, i: &Interaction, max_len: usize, accepted: bool) -> Vec<Action> {
    let mut cur = i.clone();
    let mut t = Vec::new();
    let mut last_ok = accepts_empty(&cur).then_some(0);
    while t.len() < max_len {
        let f = frontier(&cur);
        let Some(e) = f.choose(rng) else { break };
        t.push(e.action);
        cur = e.follow_up.clone();
        if accepts_empty(&cur) {
            last_ok = Some(t.len());
        }
    }
    if accepted {
        t.truncate(last_ok.unwrap_or(0));
    }
    t
}

fn criterion_6(budget: &mut NodeLedger) -> Outcome {
    let shape = TermShape {
        max_actions: 5,
        ..SHAPE
    };
    let sig = shape.signature();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    let mut verdicts: BTreeMap<String, usize> = BTreeMap::new();
    let mut violations = Vec::new();
    let mut members = 0;
    let mut oracle_disagreements = 0;
    let start = Instant::now();
    let mut k = 0;
    while k < FUZZ_RUNS {
        let i = random_interaction(&mut rng, &shape);
        let p = Arc::new(random_partition(&mut rng, shape.lifelines));
        let mu = match k % 5 {
            0 => MultiTrace::from_global(&walk(&mut rng, &i, 6, true), p),
            1 => MultiTrace::from_global(&walk(&mut rng, &i, 6, false), p),
            2 => {
                let whole = MultiTrace::from_global(&walk(&mut rng, &i, 6, true), p);
                let all: Vec<MultiTrace> = whole.slices().into_iter().collect();
                all.choose(&mut rng).cloned().expect("the empty slice always exists")
            }
            3 => random_multitrace(&mut rng, p, shape.messages, 3),
            _ => {
                let whole = MultiTrace::from_global(&walk(&mut rng, &i, 5, true), p);
                mutate_insert_action(&whole, &mut rng, &sig)
            }
        };
        k += 1;
        let r = analyze(&i, &mu, &AnalysisConfig::default()).expect("well-typed");
        budget.record(&r);
        *verdicts.entry(r.verdict.to_string()).or_default() += 1;
        let is_member = membership(&i, &mu);
        if is_member {
            members += 1;
            if r.verdict != Verdict::Pass {
                violations.push(format!("member analyzed as {}", r.verdict));
            }
            let lim = Limits::loops(mu.len()).with_max_len(mu.len());
            if oracle_membership(&i, &mu, &lim) != Ok(true) {
                oracle_disagreements += 1;
            }
        }
        if let Some(w) = &r.witness {
            let policy = LoopActMeasure::default();
            if !replay_witness(&i, &mu, &policy, w).is_some_and(|end| end.multitrace.is_empty()) {
                violations.push("witness does not replay".into());
                continue;
            }
            // the witness trace is a prefix of some accepted trace
            let res = oracle_prefix_slice_membership(&i, &mu, w.steps.len());
            match res {
                Ok(true) => {}
                Ok(false) => violations.push(format!(
                    "{} but not a slice: {} against {}",
                    r.verdict,
                    mu.to_text(&sig),
                    orv_core::formats::hif::serialize_hif_flat(&i, &sig)
                )),
                Err(e) => violations.push(format!("oracle refused ({e})")),
            }
        }
    }
    let hist: Vec<String> = verdicts.iter().map(|(v, n)| format!("{v} {n}")).collect();
    let summary = format!(
        "{FUZZ_RUNS} analyses ({}), {members} exact members, {} violations, \
         {oracle_disagreements} membership/oracle disagreements, {:.1} s",
        hist.join(", "),
        violations.len(),
        start.elapsed().as_secs_f64()
    );
    if let Some(v) = violations.first() {
        return Err(format!("{summary}; first: {v}"));
    }
    check(oracle_disagreements == 0, summary.clone())?;
    Ok(summary)
}

fn criterion_7(budget: &mut NodeLedger) -> Outcome {
    let (sig, i, _) = load("running");
    let names: Vec<Vec<String>> = vec![vec!["l1".into(), "l2".into()], vec!["l3".into()]];
    let partition = orv_core::formats::hcf::PartitionSpec::Explicit(names)
        .resolve(&sig)
        .expect("partition");
    let mut cfg = ExperimentConfig::new(Arc::new(partition));
    cfg.seed = SEED;
    let (result, elapsed) = timed(|| run_experiment(&i, &sig, &cfg).expect("experiment"));
    let (sets, rows) = result;
    for r in &rows {
        budget.runs += 1;
        budget.max_nodes = budget.max_nodes.max(r.nodes);
        budget.cap_hits += r.cap_hit as usize;
    }
    let mut table: BTreeMap<SetName, BTreeMap<String, usize>> = BTreeMap::new();
    for r in &rows {
        *table.entry(r.set).or_default().entry(r.verdict.to_string()).or_default() += 1;
    }
    let t_not_pass = rows
        .iter()
        .filter(|r| r.set == SetName::Accepted && r.verdict != Verdict::Pass)
        .count();
    let weak_fail_slices: Vec<&MultiTrace> = rows
        .iter()
        .filter(|r| r.set == SetName::Slices && r.verdict == Verdict::WeakFail)
        .map(|r| &sets.slices[r.index])
        .collect();
    // accepted multi-traces use at most two iterations of any loop
    let traces = rho(&i, 2).expect("running example at two iterations");
    let invalid = weak_fail_slices
        .iter()
        .filter(|mu| {
            !traces.iter().any(|t| {
                mu.is_slice_of(&MultiTrace::from_global(t, mu.partition().clone()))
                    .unwrap_or(false)
            })
        })
        .count();
    let desc: Vec<String> = SetName::ALL
        .iter()
        .map(|s| {
            let v: Vec<String> = table
                .get(s)
                .map(|m| m.iter().map(|(v, n)| format!("{v} {n}")).collect())
                .unwrap_or_default();
            format!("{s}[{}]", v.join(" "))
        })
        .collect();
    let summary = format!(
        "{} analyses x{} repetitions in {:.1} s: {}; {} WeakFail slices, {invalid} not oracle slice-valid",
        rows.len(),
        cfg.repetitions,
        elapsed.as_secs_f64(),
        desc.join(" "),
        weak_fail_slices.len()
    );
    check(!sets.accepted.is_empty() && t_not_pass == 0, format!("{t_not_pass} T members not Pass: {summary}"))?;
    check(invalid == 0, summary.clone())?;
    check(elapsed < EXPERIMENT_TIME_LIMIT, format!("over {EXPERIMENT_TIME_LIMIT:?}: {summary}"))?;
    Ok(summary)
}

fn random_signature(rng: &mut ChaCha8Rng) -> Signature {
    let name = |rng: &mut ChaCha8Rng, prefix: &str, k: usize| {
        let len = rng.gen_range(0..4);
        let tail: String = (0..len).map(|_| rng.gen_range(b'a'..=b'z') as char).collect();
        format!("{prefix}{k}{tail}")
    };
    let ls: Vec<String> = (0..rng.gen_range(1..5)).map(|k| name(rng, "L", k)).collect();
    let ms: Vec<String> = (0..rng.gen_range(1..5)).map(|k| name(rng, "msg_", k)).collect();
    Signature::new(ls, ms).expect("distinct by index")
}

fn criterion_8() -> Outcome {
    let sig = parse_hsf(&fixture("running.hsf")).map_err(|e| format!("signature: {e}"))?;
    parse_hif(&fixture("running.hif"), &sig).map_err(|e| format!("interaction: {e}"))?;
    parse_htf(&fixture("running.htf"), &sig, None).map_err(|e| format!("multi-trace: {e}"))?;
    parse_hcf(&fixture("explore.hcf")).map_err(|e| format!("explore options: {e}"))?;
    parse_hcf(&fixture("analyze.hcf")).map_err(|e| format!("analyze options: {e}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 8);
    let mut failures = BTreeMap::<&str, usize>::new();
    for _ in 0..ROUND_TRIPS {
        let sig = random_signature(&mut rng);
        if parse_hsf(&serialize_hsf(&sig)).ok() != Some(sig.clone()) {
            *failures.entry("hsf").or_default() += 1;
        }
        let shape = TermShape {
            lifelines: sig.lifeline_count(),
            messages: sig.message_count(),
            max_actions: 10,
            max_loops: 3,
        };
        let i = random_interaction(&mut rng, &shape);
        if parse_hif(&serialize_hif(&i, &sig), &sig).ok() != Some(i) {
            *failures.entry("hif").or_default() += 1;
        }
        let p = Arc::new(random_partition(&mut rng, shape.lifelines));
        let mu = random_multitrace(&mut rng, p, shape.messages, 4);
        if parse_htf(&serialize_htf(&mu, &sig), &sig, None).ok() != Some(mu) {
            *failures.entry("htf").or_default() += 1;
        }
        let c = random_config(&mut rng);
        if parse_hcf(&serialize_hcf(&c)).ok() != Some(c) {
            *failures.entry("hcf").or_default() += 1;
        }
    }
    check(failures.is_empty(), format!("round-trip failures {failures:?}"))?;
    Ok(format!(
        "verbatim signature, interaction, multi-trace and both option texts parse; \
         {ROUND_TRIPS} round-trips x 4 formats identical"
    ))
}

fn criterion_9(b: &NodeLedger) -> Outcome {
    let summary = format!(
        "{} analyses, max {} expanded nodes (cap {NODE_CAP}), cap hit {} times",
        b.runs, b.max_nodes, b.cap_hits
    );
    check(b.runs > 0 && b.cap_hits == 0 && b.max_nodes < NODE_CAP, summary.clone())?;
    Ok(summary)
}
