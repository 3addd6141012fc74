//! Solves each subsystem of a split separately, aggregates the subsystem
//! scenarios that agree on shared descriptors and checks the result against
//! the consistent scenarios of the whole system.
//!
//! cargo run --example multilevel_aggregation

use cib::multilevel::{
    aggregate_combinatorial, enumerate_combinatorials, solve_subsystems, transitional_set,
    validate_split, verify_aggregation, SubsystemSplit,
};
use cib::{fixtures, Result, SolveOptions};

fn main() -> Result<()> {
    let cim = fixtures::agg3();
    let split = SubsystemSplit::new(vec![vec![0, 1], vec![1, 2]]);
    let options = SolveOptions::default();
    print!("split check: {}", validate_split(&cim, &split));

    let t = transitional_set(&split);
    println!(
        "transitional descriptors: {:?}",
        t.descriptors.iter().map(|k| k + 1).collect::<Vec<_>>()
    );

    let subsystems = solve_subsystems(&cim, &split, &options)?;
    for (n, sub) in subsystems.iter().enumerate() {
        let names: Vec<String> = sub.consistent.iter().map(ToString::to_string).collect();
        println!(
            "subsystem {} {:?}: {}",
            n + 1,
            sub.descriptors,
            names.join(" ")
        );
    }

    let sets: Vec<_> = subsystems.iter().map(|s| s.consistent.clone()).collect();
    for xi in enumerate_combinatorials(&sets, &options)? {
        let members: Vec<String> = xi.members.iter().map(ToString::to_string).collect();
        match aggregate_combinatorial(&xi, &split, &t) {
            Ok(z) => println!("  {} -> {z}", members.join(" + ")),
            Err(e) => println!("  {} -> refused: {e}", members.join(" + ")),
        }
    }

    let report = verify_aggregation(&cim, &split, &options)?;
    println!(
        "aggregated {}, consistent {}, matched {}, sound {}, complete {}",
        report.aggregated.len(),
        report.consistent.len(),
        report.matched,
        report.is_sound(),
        report.is_complete()
    );
    Ok(())
}
