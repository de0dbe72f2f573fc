//! Check a candidate model against a Horn system.
//!
//!     cargo run --example check_model -- examples/smt/mccarthy.smt2 examples/models/mc_invariant.model

use hornclaw::engines::check_model;
use hornclaw::io::{parse_model, parse_smtlib};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let sys_path =
        args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/smt/mccarthy.smt2").into());
    let model_path =
        args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/models/mc_invariant.model").into());
    let sys = parse_smtlib(&std::fs::read_to_string(sys_path)?)?;
    let model = parse_model(&std::fs::read_to_string(model_path)?, &sys)?;
    print!("{sys}");
    println!("{model}");
    println!("{}", check_model(&sys, &model)?);
    Ok(())
}
