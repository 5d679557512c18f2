//! Inputs shared by the benchmarks in `benches/`.

use orv_core::formats::{parse_hif, parse_hsf, parse_htf};
use orv_core::{Interaction, MultiTrace, Signature};

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/fixtures/");

fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{FIXTURES}{name}")).expect("fixture exists")
}

/// Signature and interaction of a fixture model, e.g. `"running"`.
pub fn model(stem: &str) -> (Signature, Interaction) {
    let sig = parse_hsf(&fixture(&format!("{stem}.hsf"))).expect("valid signature");
    let i = parse_hif(&fixture(&format!("{stem}.hif")), &sig).expect("valid interaction");
    (sig, i)
}

/// A multi-trace fixture read against `sig`.
pub fn multitrace(sig: &Signature, file: &str) -> MultiTrace {
    parse_htf(&fixture(file), sig, None).expect("valid multi-trace")
}
