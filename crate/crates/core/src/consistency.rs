//! Impact balances, the consistency test and exhaustive enumeration of
//! consistent scenarios.
//!
//! The impact balance of state `b` of descriptor `j` under a scenario `v` is
//! `IB_j(b) = sum over i != j of d_ij(v_i, b)`. A scenario is consistent when
//! every descriptor sits on a state of maximal balance.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::framework::{unrank_into, CrossImpactMatrix, JudgementCell, Scenario};
use crate::options::{block_bounds, block_count, SolveOptions};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImpactBalanceVector {
    /// 0-based target descriptor.
    pub descriptor: usize,
    /// `balances[b]` is the balance of 0-based state `b`.
    pub balances: Vec<i64>,
}

impl ImpactBalanceVector {
    pub fn max(&self) -> i64 {
        self.balances.iter().copied().max().unwrap_or(0)
    }
}

/// Dense view of a CIM used on every hot path.
pub(crate) struct BalanceKernel<'a> {
    n: usize,
    counts: &'a [usize],
    /// Indexed by `target * n + source`.
    cells: Vec<Option<&'a JudgementCell>>,
}

/// How one descriptor stands under a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct DescriptorStatus {
    /// `max_b IB(b) - IB(current)`, zero when consistent.
    pub gap: i64,
    /// Smallest 0-based state attaining the maximum.
    pub argmax: usize,
    /// More than one state attains the maximum.
    pub tied: bool,
}

impl<'a> BalanceKernel<'a> {
    pub fn new(cim: &'a CrossImpactMatrix) -> Self {
        let n = cim.framework().len();
        let mut cells = vec![None; n * n];
        for cell in cim.cells() {
            cells[cell.target() * n + cell.source()] = Some(cell);
        }
        BalanceKernel {
            n,
            counts: cim.framework().state_counts(),
            cells,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn counts(&self) -> &'a [usize] {
        self.counts
    }

    pub fn balances(&self, digits: &[usize], j: usize, out: &mut Vec<i64>) {
        out.clear();
        out.resize(self.counts[j], 0);
        for (i, cell) in self.cells[j * self.n..(j + 1) * self.n].iter().enumerate() {
            if let Some(cell) = cell {
                for (acc, &v) in out.iter_mut().zip(cell.row(digits[i])) {
                    *acc += v as i64;
                }
            }
        }
    }

    pub fn status(&self, digits: &[usize], j: usize, buf: &mut Vec<i64>) -> DescriptorStatus {
        self.balances(digits, j, buf);
        let (argmax, tied) = argmax_with_tie(buf);
        DescriptorStatus {
            gap: buf[argmax] - buf[digits[j]],
            argmax,
            tied,
        }
    }

    pub fn is_consistent(&self, digits: &[usize], tolerance: i64, buf: &mut Vec<i64>) -> bool {
        (0..self.n).all(|j| self.status(digits, j, buf).gap <= tolerance)
    }

    pub fn score(&self, digits: &[usize], buf: &mut Vec<i64>) -> i64 {
        (0..self.n)
            .map(|j| self.status(digits, j, buf).gap)
            .max()
            .unwrap_or(0)
    }
}

/// Smallest index attaining the maximum, and whether the maximum is shared.
pub(crate) fn argmax_with_tie(values: &[i64]) -> (usize, bool) {
    let mut best = 0;
    let mut tied = false;
    for (b, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = b;
            tied = false;
        } else if v == values[best] {
            tied = true;
        }
    }
    (best, tied)
}

fn checked_digits(cim: &CrossImpactMatrix, scenario: &Scenario) -> Result<Vec<usize>> {
    scenario.check(cim.framework())?;
    Ok(scenario.digits())
}

pub fn impact_balance(
    cim: &CrossImpactMatrix,
    scenario: &Scenario,
    j: usize,
) -> Result<ImpactBalanceVector> {
    let digits = checked_digits(cim, scenario)?;
    if j >= cim.framework().len() {
        return Err(Error::Scenario(format!(
            "descriptor index {j} outside a framework of {} descriptors",
            cim.framework().len()
        )));
    }
    let mut balances = Vec::new();
    BalanceKernel::new(cim).balances(&digits, j, &mut balances);
    Ok(ImpactBalanceVector {
        descriptor: j,
        balances,
    })
}

/// True iff every descriptor's chosen state is within `tolerance` of its
/// maximal balance. Tolerance 0 is the classic consistency check.
pub fn is_consistent(cim: &CrossImpactMatrix, scenario: &Scenario, tolerance: u32) -> Result<bool> {
    let digits = checked_digits(cim, scenario)?;
    Ok(BalanceKernel::new(cim).is_consistent(&digits, tolerance as i64, &mut Vec::new()))
}

/// Largest shortfall of a chosen state below its descriptor's maximal
/// balance; zero exactly for consistent scenarios.
pub fn inconsistency_score(cim: &CrossImpactMatrix, scenario: &Scenario) -> Result<u64> {
    let digits = checked_digits(cim, scenario)?;
    Ok(BalanceKernel::new(cim).score(&digits, &mut Vec::new()) as u64)
}

/// Ranks of all consistent scenarios, ascending.
pub(crate) fn consistent_ranks(
    cim: &CrossImpactMatrix,
    tolerance: u32,
    options: &SolveOptions,
) -> Result<Vec<u64>> {
    options.check_cap(cim.framework().scenario_count())?;
    options.install(|| consistent_ranks_in_pool(cim, tolerance))
}

/// [`consistent_ranks`] on the current rayon pool, cap already checked.
pub(crate) fn consistent_ranks_in_pool(cim: &CrossImpactMatrix, tolerance: u32) -> Vec<u64> {
    let size = cim.framework().scenario_count();
    let kernel = BalanceKernel::new(cim);
    let tolerance = tolerance as i64;
    (0..block_count(size))
        .into_par_iter()
        .flat_map_iter(|block| {
            let (start, end) = block_bounds(block, size);
            let counts = kernel.counts();
            let mut digits = vec![0; kernel.len()];
            unrank_into(counts, start, &mut digits);
            let mut buf = Vec::new();
            let mut found = Vec::new();
            for rank in start..end {
                if kernel.is_consistent(&digits, tolerance, &mut buf) {
                    found.push(rank);
                }
                advance(&mut digits, counts);
            }
            found
        })
        .collect()
}

#[inline]
pub(crate) fn advance(digits: &mut [usize], counts: &[usize]) {
    for k in (0..digits.len()).rev() {
        digits[k] += 1;
        if digits[k] < counts[k] {
            return;
        }
        digits[k] = 0;
    }
}

/// Every consistent scenario in ascending rank order.
///
/// Refuses with [`Error::CapExceeded`] when the scenario space is larger than
/// `options.cap`.
pub fn enumerate_consistent(
    cim: &CrossImpactMatrix,
    tolerance: u32,
    options: &SolveOptions,
) -> Result<Vec<Scenario>> {
    let counts = cim.framework().state_counts();
    let mut digits = vec![0; counts.len()];
    Ok(consistent_ranks(cim, tolerance, options)?
        .into_iter()
        .map(|rank| {
            unrank_into(counts, rank, &mut digits);
            Scenario::from_digits(&digits)
        })
        .collect())
}
