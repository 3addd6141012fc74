//! Chains the highest-weight scenario of each timespan, first by scenario
//! weight and then compounded with the model's manual state values.
//!
//! cargo run --example scenario_chain [model.json]

use cib::io::{parse_model, render_chain_report};
use cib::timechain::{build_chain, Weighting};
use cib::{SolveOptions, SuccessionRule};

const DEFAULT_MODEL: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/models/energy.json");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| DEFAULT_MODEL.to_string());
    let doc = parse_model(&std::fs::read_to_string(&path)?)?;
    let options = SolveOptions::default();

    for weighting in [Weighting::Scenario, Weighting::Compound] {
        let table = match weighting {
            Weighting::Compound => doc.manual_values.as_ref(),
            Weighting::Scenario => None,
        };
        if weighting == Weighting::Compound && table.is_none() {
            println!("(model has no manual values; skipping compound weighting)");
            continue;
        }
        let chain = build_chain(
            &doc.model,
            SuccessionRule::Global,
            weighting,
            table,
            &options,
        )?;
        let summary: Vec<String> = chain
            .links
            .iter()
            .map(|l| {
                format!(
                    "{}: {}{}",
                    l.label,
                    l.scenario,
                    if l.tie { " (tie)" } else { "" }
                )
            })
            .collect();
        println!("{weighting}: {}", summary.join("  |  "));
        if weighting == Weighting::Compound {
            println!();
            print!("{}", render_chain_report(&chain, 4));
        }
    }
    Ok(())
}
