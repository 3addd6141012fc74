//! Reads a model file, validates it, writes weight tables as CSV and shows
//! that serialization round-trips.
//!
//! cargo run --example model_files [model.json]

use cib::io::{model_to_json, parse_model, write_weight_table};
use cib::{basin_weights, SolveOptions, SuccessionRule};

const DEFAULT_MODEL: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/models/energy.json");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| DEFAULT_MODEL.to_string());
    let doc = parse_model(&std::fs::read_to_string(&path)?)?;
    let fw = doc.framework();
    println!(
        "{path}: {} descriptors, {} scenarios, {} timespan(s)",
        fw.len(),
        fw.scenario_count(),
        doc.model.timespans.len()
    );
    print!("validation: {}", doc.model.validate());

    for span in &doc.model.timespans {
        let table = basin_weights(&span.cim, SuccessionRule::Local, &SolveOptions::default())?;
        println!("\n{} (local rule)", span.label);
        print!("{}", write_weight_table(&table, 4));
    }

    let json = model_to_json(&doc);
    assert_eq!(parse_model(&json)?, doc);
    println!("\nround trip ok ({} bytes)", json.len());

    let broken = std::fs::read_to_string(&path)?.replacen("\"label\"", "\"lable\"", 1);
    match parse_model(&broken) {
        Ok(_) => println!("corrupted document accepted?"),
        Err(e) => println!("corrupted document rejected: {e}"),
    }
    Ok(())
}
