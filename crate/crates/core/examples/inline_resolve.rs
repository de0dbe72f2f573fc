//! Merge app1 into the evaluator, drop the tautology, then resolve away the
//! `succ` closure constructor.
//!
//!     cargo run --example inline_resolve

use hornclaw::encoder::{encode_source, EncodingOptions};
use hornclaw::transforms::{eliminate_by_resolution, inline_predicate, remove_tautologies};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/programs/example2.hof").into());
    let sys = encode_source(&std::fs::read_to_string(path)?, &EncodingOptions::default())?;
    println!("-- specialized ({} clauses)\n{sys}", sys.clauses.len());
    let merged = inline_predicate(&sys, "app1", "Ev_clo2")?;
    println!("-- app1 merged into Ev_clo2 ({} clauses)\n{merged}", merged.clauses.len());
    let pruned = remove_tautologies(&merged);
    println!("-- tautologies removed ({} clauses)\n{pruned}", pruned.clauses.len());
    let resolved = eliminate_by_resolution(&pruned, "succ")?;
    println!("-- succ resolved away ({} clauses)\n{resolved}", resolved.clauses.len());
    Ok(())
}
