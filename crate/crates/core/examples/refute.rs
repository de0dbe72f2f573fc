//! Search for a counterexample derivation of bounded height.
//!
//!     cargo run --example refute -- examples/programs/mccarthy_bug.hof 8

use hornclaw::encoder::{encode_source, EncodingOptions};
use hornclaw::engines::{bounded_refutation, replay, Refutation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/programs/mccarthy_bug.hof").into());
    let depth: usize = args.next().map(|d| d.parse()).transpose()?.unwrap_or(8);
    let sys = encode_source(&std::fs::read_to_string(path)?, &EncodingOptions::default())?;
    print!("{sys}");
    match bounded_refutation(&sys, depth) {
        Refutation::Unsat(d) => {
            println!("counterexample (height {}):", d.height());
            print!("{}", d.display(&sys));
            println!("replay: {:?}", replay(&sys, &d));
        }
        Refutation::NoneFound { exhausted } => {
            println!("none found up to depth {depth} (budget exhausted: {exhausted})")
        }
    }
    Ok(())
}
