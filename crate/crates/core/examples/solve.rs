//! Run the engine portfolio on a program and print the certified verdict.
//!
//!     cargo run --example solve -- examples/programs/example1.hof

use hornclaw::encoder::{encode_source, EncodingOptions};
use hornclaw::engines::{solve, SolveConfig, Verdict};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/programs/example1.hof").into());
    let sys = encode_source(&std::fs::read_to_string(path)?, &EncodingOptions::default())?;
    let out = solve(&sys, &SolveConfig::default());
    for a in &out.trail {
        println!("{:>12}  {}", a.engine.to_string(), a.outcome);
    }
    match &out.verdict {
        Verdict::Sat(m) => println!("SAT\n{m}"),
        Verdict::Unsat(d) => println!("UNSAT\n{}", d.display(&sys)),
        Verdict::Unknown(why) => println!("UNKNOWN: {why}"),
    }
    Ok(())
}
