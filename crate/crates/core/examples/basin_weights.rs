//! Scenario weights under each succession rule, with the trajectories that
//! produce them.
//!
//! cargo run --example basin_weights

use cib::io::write_weight_table;
use cib::{
    basin_weights, fixtures, iterate_scenarios, trace, Result, SolveOptions, SuccessionRule,
};

fn main() -> Result<()> {
    let cim = fixtures::mutual2();
    let options = SolveOptions::default();

    for rule in SuccessionRule::ALL {
        println!("== {rule}");
        for start in iterate_scenarios(cim.framework()) {
            let t = trace(&cim, &start, rule)?;
            let path: Vec<String> = t.path.iter().map(ToString::to_string).collect();
            println!("  {} => {}", path.join(" -> "), t.attractor);
        }
        let table = basin_weights(&cim, rule, &options)?;
        print!("{}", write_weight_table(&table, 6));
        println!();
    }

    // No fixed point at all: every start ends on the same 4-cycle.
    let table = basin_weights(&fixtures::pursuit2(), SuccessionRule::Global, &options)?;
    println!("== pursuit, global");
    print!("{}", write_weight_table(&table, 6));
    Ok(())
}
