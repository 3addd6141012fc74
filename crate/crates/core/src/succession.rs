//! Deterministic succession rules, attractor detection and basin weights.
//!
//! A succession rule maps every inconsistent scenario to a "less
//! inconsistent" one and leaves consistent scenarios in place, so the
//! consistent scenarios are exactly the fixed points of the map. Iterating
//! from any start ends on a fixed point or a cycle. The weight of a
//! consistent scenario is the share of all start scenarios that end on it.
//!
//! All rules break argmax ties towards the smallest state number.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::consistency::{advance, BalanceKernel, ImpactBalanceVector};
use crate::error::{Error, Result};
use crate::framework::{rank_digits, unrank_into, CrossImpactMatrix, Scenario};
use crate::options::{SolveOptions, BLOCK};

/// Exact weight, `basin count / scenario count`.
pub type Weight = Ratio<u64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SuccessionRule {
    /// Every inconsistent descriptor jumps to its best state at once.
    Global,
    /// Every inconsistent descriptor moves one state towards its best state.
    Incremental,
    /// Only the most inconsistent descriptor (lowest index on ties) jumps.
    Local,
    /// Only the first inconsistent descriptor in index order jumps.
    Adiabatic,
}

impl SuccessionRule {
    pub const ALL: [SuccessionRule; 4] = [
        SuccessionRule::Global,
        SuccessionRule::Incremental,
        SuccessionRule::Local,
        SuccessionRule::Adiabatic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuccessionRule::Global => "global",
            SuccessionRule::Incremental => "incremental",
            SuccessionRule::Local => "local",
            SuccessionRule::Adiabatic => "adiabatic",
        }
    }
}

impl fmt::Display for SuccessionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuccessionRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuccessionRule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::Scenario(format!("unknown succession rule '{s}'")))
    }
}

/// Smallest 1-based state attaining the maximal balance.
pub fn argmax_states(balance: &ImpactBalanceVector) -> usize {
    crate::consistency::argmax_with_tie(&balance.balances).0 + 1
}

/// Writes the successor of `digits` into `next` and reports whether an argmax
/// tie decided any moved descriptor.
pub(crate) fn step(
    kernel: &BalanceKernel<'_>,
    rule: SuccessionRule,
    digits: &[usize],
    next: &mut [usize],
    buf: &mut Vec<i64>,
) -> bool {
    next.copy_from_slice(digits);
    let n = kernel.len();
    match rule {
        SuccessionRule::Global | SuccessionRule::Incremental => {
            let mut tie = false;
            for j in 0..n {
                let st = kernel.status(digits, j, buf);
                if st.gap > 0 {
                    tie |= st.tied;
                    next[j] = match rule {
                        SuccessionRule::Global => st.argmax,
                        _ if st.argmax > digits[j] => digits[j] + 1,
                        _ => digits[j] - 1,
                    };
                }
            }
            tie
        }
        SuccessionRule::Local => {
            let mut pick: Option<(usize, i64, usize, bool)> = None;
            for j in 0..n {
                let st = kernel.status(digits, j, buf);
                if st.gap > 0 && pick.is_none_or(|(_, gap, _, _)| st.gap > gap) {
                    pick = Some((j, st.gap, st.argmax, st.tied));
                }
            }
            match pick {
                Some((j, _, best, tied)) => {
                    next[j] = best;
                    tied
                }
                None => false,
            }
        }
        SuccessionRule::Adiabatic => {
            for (j, slot) in next.iter_mut().enumerate() {
                let st = kernel.status(digits, j, buf);
                if st.gap > 0 {
                    *slot = st.argmax;
                    return st.tied;
                }
            }
            false
        }
    }
}

/// One application of the succession rule. Consistent scenarios map to
/// themselves.
pub fn successor(
    cim: &CrossImpactMatrix,
    scenario: &Scenario,
    rule: SuccessionRule,
) -> Result<Scenario> {
    scenario.check(cim.framework())?;
    let digits = scenario.digits();
    let mut next = vec![0; digits.len()];
    step(
        &BalanceKernel::new(cim),
        rule,
        &digits,
        &mut next,
        &mut Vec::new(),
    );
    Ok(Scenario::from_digits(&next))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Attractor {
    FixedPoint(Scenario),
    /// At least two scenarios, starting with the one of smallest rank.
    Cycle(Vec<Scenario>),
}

impl Attractor {
    pub fn is_cycle(&self) -> bool {
        matches!(self, Attractor::Cycle(_))
    }

    pub fn scenarios(&self) -> &[Scenario] {
        match self {
            Attractor::FixedPoint(s) => std::slice::from_ref(s),
            Attractor::Cycle(c) => c,
        }
    }
}

impl fmt::Display for Attractor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Attractor::FixedPoint(s) => write!(f, "{s}"),
            Attractor::Cycle(c) => {
                let parts: Vec<String> = c.iter().map(ToString::to_string).collect();
                f.write_str(&parts.join(">"))
            }
        }
    }
}

/// The visited scenarios of one walk (start first, no repeats) and where it
/// ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub path: Vec<Scenario>,
    pub attractor: Attractor,
}

/// Iterates the rule from `start` until a scenario repeats.
pub fn trace(
    cim: &CrossImpactMatrix,
    start: &Scenario,
    rule: SuccessionRule,
) -> Result<Trajectory> {
    start.check(cim.framework())?;
    let kernel = BalanceKernel::new(cim);
    let counts = kernel.counts();
    let mut digits = start.digits();
    let mut next = vec![0; digits.len()];
    let mut buf = Vec::new();
    let mut seen: HashMap<u64, usize> = HashMap::new();
    let mut path: Vec<Scenario> = Vec::new();
    let mut ranks: Vec<u64> = Vec::new();
    loop {
        let rank = rank_digits(counts, digits.iter().copied());
        if let Some(&first) = seen.get(&rank) {
            let attractor = if path.len() - first == 1 {
                Attractor::FixedPoint(path[first].clone())
            } else {
                let cycle_ranks = &ranks[first..];
                let lead = (0..cycle_ranks.len())
                    .min_by_key(|&i| cycle_ranks[i])
                    .unwrap_or(0);
                let mut cycle: Vec<Scenario> = path[first..].to_vec();
                cycle.rotate_left(lead);
                Attractor::Cycle(cycle)
            };
            return Ok(Trajectory { path, attractor });
        }
        seen.insert(rank, path.len());
        path.push(Scenario::from_digits(&digits));
        ranks.push(rank);
        step(&kernel, rule, &digits, &mut next, &mut buf);
        std::mem::swap(&mut digits, &mut next);
    }
}

pub fn trajectory(
    cim: &CrossImpactMatrix,
    start: &Scenario,
    rule: SuccessionRule,
) -> Result<Attractor> {
    Ok(trace(cim, start, rule)?.attractor)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightEntry {
    pub scenario: Scenario,
    pub rank: u64,
    /// Number of start scenarios ending here.
    pub basin: u64,
    pub weight: Weight,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleBasin {
    /// Canonical rotation, smallest rank first.
    pub cycle: Vec<Scenario>,
    pub ranks: Vec<u64>,
    pub basin: u64,
    pub weight: Weight,
}

impl CycleBasin {
    pub fn attractor(&self) -> Attractor {
        Attractor::Cycle(self.cycle.clone())
    }
}

/// Basin weights of one CIM under one succession rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightTable {
    pub rule: SuccessionRule,
    /// Size of the scenario space.
    pub total: u64,
    /// One entry per consistent scenario, ascending rank.
    pub entries: Vec<WeightEntry>,
    /// Cyclic attractors, ordered by their first rank.
    pub cycles: Vec<CycleBasin>,
    pub cycle_mass: Weight,
    /// Some moved descriptor had more than one best state somewhere in the
    /// space, so the smallest-state tie-break influenced the weights.
    pub argmax_tie: bool,
}

impl WeightTable {
    pub fn weight_of(&self, scenario: &Scenario) -> Option<Weight> {
        self.entries
            .iter()
            .find(|e| &e.scenario == scenario)
            .map(|e| e.weight)
    }

    /// Sum of all fixed-point weights plus the cycle mass; always exactly 1.
    pub fn total_mass(&self) -> Weight {
        self.entries
            .iter()
            .map(|e| e.weight)
            .fold(self.cycle_mass, |a, w| a + w)
    }
}

const UNSEEN: u32 = u32::MAX;
const ON_PATH: u32 = u32::MAX - 1;

/// Walks the succession map from every scenario and counts how many starts
/// end on each attractor.
///
/// Successors are computed in parallel; attractors are then resolved
/// sequentially with a rank -> attractor memo, so the table is identical for
/// any worker count.
pub fn basin_weights(
    cim: &CrossImpactMatrix,
    rule: SuccessionRule,
    options: &SolveOptions,
) -> Result<WeightTable> {
    options.check_cap(cim.framework().scenario_count())?;
    options.install(|| basin_weights_in_pool(cim, rule))?
}

/// [`basin_weights`] on the current rayon pool, cap already checked.
pub(crate) fn basin_weights_in_pool(
    cim: &CrossImpactMatrix,
    rule: SuccessionRule,
) -> Result<WeightTable> {
    let total = cim.framework().scenario_count();
    let size = usize::try_from(total).map_err(|_| Error::CapExceeded {
        size: total,
        cap: usize::MAX as u64,
    })?;
    let kernel = BalanceKernel::new(cim);
    let counts = kernel.counts();

    let mut succ = vec![0u64; size];
    let argmax_tie = succ
        .par_chunks_mut(BLOCK as usize)
        .enumerate()
        .map(|(block, chunk)| {
            let mut digits = vec![0; counts.len()];
            let mut next = vec![0; counts.len()];
            let mut buf = Vec::new();
            unrank_into(counts, block as u64 * BLOCK, &mut digits);
            let mut tie = false;
            for slot in chunk.iter_mut() {
                tie |= step(&kernel, rule, &digits, &mut next, &mut buf);
                *slot = rank_digits(counts, next.iter().copied());
                advance(&mut digits, counts);
            }
            tie
        })
        .reduce(|| false, |a, b| a || b);

    let mut label = vec![UNSEEN; size];
    let mut attractors: Vec<Vec<u64>> = Vec::new();
    let mut basins: Vec<u64> = Vec::new();
    let mut stack: Vec<u64> = Vec::new();
    for start in 0..size {
        if label[start] != UNSEEN {
            continue;
        }
        let mut x = start as u64;
        while label[x as usize] == UNSEEN {
            label[x as usize] = ON_PATH;
            stack.push(x);
            x = succ[x as usize];
        }
        debug_assert!(stack.len() as u64 <= total);
        let id = if label[x as usize] == ON_PATH {
            let pos = stack
                .iter()
                .rposition(|&s| s == x)
                .expect("on-path node is on the stack");
            let mut cycle = stack[pos..].to_vec();
            let lead = (0..cycle.len()).min_by_key(|&i| cycle[i]).unwrap_or(0);
            cycle.rotate_left(lead);
            attractors.push(cycle);
            basins.push(0);
            u32::try_from(attractors.len() - 1).expect("attractor count fits in u32")
        } else {
            label[x as usize]
        };
        basins[id as usize] += stack.len() as u64;
        for s in stack.drain(..) {
            label[s as usize] = id;
        }
    }

    let mut digits = vec![0; counts.len()];
    let mut scenario_at = |rank: u64| {
        unrank_into(counts, rank, &mut digits);
        Scenario::from_digits(&digits)
    };
    let mut entries = Vec::new();
    let mut cycles = Vec::new();
    let mut cycle_count = 0u64;
    for (ranks, basin) in attractors.into_iter().zip(basins) {
        let weight = Weight::new(basin, total);
        if ranks.len() == 1 {
            entries.push(WeightEntry {
                scenario: scenario_at(ranks[0]),
                rank: ranks[0],
                basin,
                weight,
            });
        } else {
            cycle_count += basin;
            cycles.push(CycleBasin {
                cycle: ranks.iter().map(|&r| scenario_at(r)).collect(),
                ranks,
                basin,
                weight,
            });
        }
    }
    entries.sort_by_key(|e| e.rank);
    cycles.sort_by_key(|c| c.ranks[0]);
    Ok(WeightTable {
        rule,
        total,
        entries,
        cycles,
        cycle_mass: Weight::new(cycle_count, total),
        argmax_tie,
    })
}
