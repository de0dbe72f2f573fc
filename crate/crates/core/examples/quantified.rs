//! Quantified abstraction of the merged evaluator, instantiation from a
//! template file, rule reversal and Karr's affine analysis.
//!
//!     cargo run --example quantified -- examples/programs/example2.hof examples/templates/ev.templates

use hornclaw::encoder::{encode_source, EncodingOptions};
use hornclaw::engines::{karr_affine, solve, Engine, SolveConfig, Strategy};
use hornclaw::io::parse_templates;
use hornclaw::transforms::{inline_predicate, instantiate, quantified_abstraction, remove_tautologies, reverse_rules};
use num::{BigInt, BigRational};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path =
        args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/programs/example2.hof").into());
    let templates = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/templates/ev.templates").into());
    let sys = encode_source(&std::fs::read_to_string(path)?, &EncodingOptions::default())?;
    let merged = remove_tautologies(&inline_predicate(&sys, "app1", "Ev_clo2")?);
    let abstracted = quantified_abstraction(&merged, 2, &["Ev_clo2"])?;
    println!("-- abstracted with k = 2\n{abstracted}");
    let inst = instantiate(&abstracted, &parse_templates(&std::fs::read_to_string(templates)?)?)?;
    println!("-- instantiated\n{inst}");
    let reversed = reverse_rules(&inst)?;
    println!("-- reversed\n{reversed}");

    let inv = karr_affine(&reversed);
    let ev = &inv["Ev_clo2"];
    let names = ["u", "v", "i"].map(String::from);
    println!("-- Karr over the reversed rules\nEv_clo2(u, v, _, i): {}", ev.space.to_formula(&names));
    let q = |k: i64| BigRational::from_integer(BigInt::from(k));
    println!("entails 2u = v + i: {}", ev.space.entails(&[q(2), q(-1), q(-1)], &q(0)));

    let cfg = SolveConfig { strategy: Strategy(vec![Engine::Karr, Engine::ReverseKarr]), ..SolveConfig::default() };
    let out = solve(&inst, &cfg);
    println!("-- karr+reverse portfolio: {}", out.verdict.name());
    for a in &out.trail {
        println!("  {}: {}", a.engine, a.outcome);
    }
    Ok(())
}
