//! Emit the specialized encoding of a program as a HORN script, then read it
//! back and compare.
//!
//!     cargo run --example smtlib -- examples/programs/example2.hof

use std::collections::BTreeMap;

use hornclaw::encoder::{encode_source, EncodingOptions};
use hornclaw::horn::canon::equivalent_up_to_renaming;
use hornclaw::io::{emit_smtlib, emitted_pred_names, parse_smtlib};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/programs/mccarthy.hof").into());
    let sys = encode_source(&std::fs::read_to_string(&path)?, &EncodingOptions::default())?;
    let text = emit_smtlib(&sys)?;
    print!("{text}");
    let back = parse_smtlib(&text)?;
    let names: BTreeMap<_, _> = emitted_pred_names(&sys);
    println!("; round trip: {}", if equivalent_up_to_renaming(&sys, &back, &names) { "ok" } else { "MISMATCH" });
    Ok(())
}
