//! Encodes a `.hof` program and prints the canonical and specialized Horn systems.
//!
//!     cargo run --example encode -- examples/programs/example2.hof

use std::{env, fs, process};

use hornclaw::encoder::{encode_source, EncodingOptions};

fn main() {
    let path = env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/programs/example1.hof").into());
    let src = fs::read_to_string(&path).unwrap_or_else(|e| {
        eprintln!("{path}: {e}");
        process::exit(3);
    });
    for (title, opts) in [("canonical", EncodingOptions::canonical()), ("specialized", EncodingOptions::default())] {
        match encode_source(&src, &opts) {
            Ok(sys) => println!("-- {title}\n{sys}"),
            Err(e) => {
                eprintln!("{path}: {e}");
                process::exit(3);
            }
        }
    }
}
