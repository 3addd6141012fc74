//! Builds a three-descriptor CIM by hand, inspects impact balances and
//! enumerates the consistent scenarios at increasing tolerance.
//!
//! cargo run --example consistent_scenarios

use cib::{
    enumerate_consistent, impact_balance, inconsistency_score, CrossImpactMatrix, Descriptor,
    Framework, Result, Scenario, SolveOptions,
};

fn main() -> Result<()> {
    let framework = Framework::new(vec![
        Descriptor::new("Demand", ["low", "high"]),
        Descriptor::new("Supply", ["scarce", "ample"]),
        Descriptor::new("Price", ["falling", "stable", "rising"]),
    ])?;

    // Rows are source states, columns target states.
    let cim = CrossImpactMatrix::new(framework)
        .cell_from(0, 2, vec![vec![2, 0, -2], vec![-2, 0, 2]])?
        .cell_from(1, 2, vec![vec![-2, 0, 2], vec![2, 1, -2]])?
        .cell_from(2, 1, vec![vec![1, -1], vec![0, 0], vec![-1, 1]])?
        .cell_from(0, 1, vec![vec![-1, 1], vec![1, -1]])?;
    let fw = cim.framework();

    let probe = Scenario::new(vec![2, 1, 1]);
    println!("probe {probe}: {}", fw.describe(&probe));
    for j in 0..fw.len() {
        let ib = impact_balance(&cim, &probe, j)?;
        println!(
            "  {:<7} balances {:?} (chosen {}, max {})",
            fw.descriptor(j).name,
            ib.balances,
            ib.balances[probe.state(j) - 1],
            ib.max()
        );
    }
    println!(
        "  inconsistency score {}",
        inconsistency_score(&cim, &probe)?
    );

    let options = SolveOptions::default();
    for tolerance in [0, 1, 2] {
        let found = enumerate_consistent(&cim, tolerance, &options)?;
        println!(
            "\ntolerance {tolerance}: {} of {} scenarios",
            found.len(),
            fw.scenario_count()
        );
        for s in &found {
            println!("  {s}  {}", fw.describe(s));
        }
    }
    Ok(())
}
