//! Multi-level CIB: solve overlapping subsystems separately and aggregate
//! their consistent scenarios into scenarios of the whole system.
//!
//! A split covers the descriptors with overlapping subsets. Descriptors that
//! share no subset must not impact each other. Each subsystem is solved on
//! the projection of the master CIM; one consistent scenario per subsystem
//! forms a combinatorial, and a combinatorial aggregates when all of its
//! members agree on every transitional descriptor (those in two or more
//! subsets).
//!
//! For splits whose pairwise overlaps hold at most one descriptor every
//! aggregate is consistent in the full system. [`verify_aggregation`] checks
//! that claim, and completeness, by brute force for any split.

use std::collections::{BTreeSet, VecDeque};

use crate::consistency::enumerate_consistent;
use crate::error::{Error, Result};
use crate::framework::{CrossImpactMatrix, Scenario};
use crate::options::SolveOptions;
use crate::validation::{Issue, ValidationReport};

/// Overlapping subsets of descriptor indices. Each subset is kept sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemSplit {
    subsets: Vec<Vec<usize>>,
}

impl SubsystemSplit {
    pub fn new(subsets: Vec<Vec<usize>>) -> Self {
        let subsets = subsets
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        SubsystemSplit { subsets }
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    fn descriptor_count(&self) -> usize {
        self.subsets.iter().flatten().max().map_or(0, |m| m + 1)
    }

    fn shares_subset(&self, a: usize, b: usize) -> bool {
        self.subsets
            .iter()
            .any(|s| s.binary_search(&a).is_ok() && s.binary_search(&b).is_ok())
    }

    fn overlap_graph_connected(&self) -> bool {
        let x = self.subsets.len();
        if x == 0 {
            return true;
        }
        let overlaps = |a: &[usize], b: &[usize]| a.iter().any(|d| b.binary_search(d).is_ok());
        let mut seen = vec![false; x];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for (j, sub) in self.subsets.iter().enumerate() {
                if !seen[j] && overlaps(&self.subsets[i], sub) {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Descriptors that belong to at least two subsets.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TransitionalSet {
    pub descriptors: BTreeSet<usize>,
}

impl TransitionalSet {
    pub fn contains(&self, descriptor: usize) -> bool {
        self.descriptors.contains(&descriptor)
    }

    pub fn len(&self) -> usize {
        self.descriptors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.descriptors.is_empty()
    }
}

pub fn transitional_set(split: &SubsystemSplit) -> TransitionalSet {
    let mut seen = BTreeSet::new();
    let mut shared = BTreeSet::new();
    for d in split.subsets.iter().flatten() {
        if !seen.insert(*d) {
            shared.insert(*d);
        }
    }
    TransitionalSet {
        descriptors: shared,
    }
}

/// Structural problems of the split, nonzero impacts between descriptors
/// that share no subset, and disagreements between subsystem views.
pub fn validate_split(cim: &CrossImpactMatrix, split: &SubsystemSplit) -> ValidationReport {
    let mut report = ValidationReport::new();
    let n = cim.framework().len();
    if split.len() < 2 {
        report.push(Issue::TooFewSubsets { count: split.len() });
    }
    for (i, subset) in split.subsets.iter().enumerate() {
        if subset.len() < 2 {
            report.push(Issue::SubsetTooSmall {
                subset: i,
                size: subset.len(),
            });
        }
        for &d in subset.iter().filter(|&&d| d >= n) {
            report.push(Issue::SplitUnknownDescriptor {
                subset: i,
                descriptor: d,
            });
        }
    }
    for d in 0..n {
        if !split.subsets.iter().any(|s| s.contains(&d)) {
            report.push(Issue::UncoveredDescriptor { descriptor: d });
        }
    }
    if split.len() >= 2 && !split.overlap_graph_connected() {
        report.push(Issue::DisconnectedSplit);
    }
    for cell in cim.cells() {
        if !cell.is_zero() && !split.shares_subset(cell.source(), cell.target()) {
            report.push(Issue::CrossSubsetImpact {
                source: cell.source(),
                target: cell.target(),
            });
        }
    }
    if report.is_clean() {
        let views: Result<Vec<_>> = split.subsets.iter().map(|s| project_cim(cim, s)).collect();
        if let Ok(views) = views {
            report.issues.extend(check_subsystem_views(split, &views));
        }
    }
    report
}

/// Pairs of subsystem CIMs that hold different judgement cells for the same
/// ordered descriptor pair. `views[i]` must be over `split.subsets()[i]`.
pub fn check_subsystem_views(split: &SubsystemSplit, views: &[CrossImpactMatrix]) -> Vec<Issue> {
    let mut issues = Vec::new();
    let subsets = &split.subsets;
    for m in 0..subsets.len().min(views.len()) {
        for n in m + 1..subsets.len().min(views.len()) {
            let shared: Vec<usize> = subsets[m]
                .iter()
                .copied()
                .filter(|d| subsets[n].binary_search(d).is_ok())
                .collect();
            let local = |subset: &[usize], d: usize| subset.binary_search(&d).expect("shared");
            for &i in &shared {
                for &j in shared.iter().filter(|&&j| j != i) {
                    let a = views[m].cell(local(&subsets[m], i), local(&subsets[m], j));
                    let b = views[n].cell(local(&subsets[n], i), local(&subsets[n], j));
                    let same = match (a, b) {
                        (Some(a), Some(b)) => a.to_rows() == b.to_rows(),
                        (Some(c), None) | (None, Some(c)) => c.is_zero(),
                        (None, None) => true,
                    };
                    if !same {
                        issues.push(Issue::SubsystemDisagreement {
                            source: i,
                            target: j,
                            subsets: (m, n),
                        });
                    }
                }
            }
        }
    }
    issues
}

/// The CIM of a subsystem: cells with both endpoints in `subset`, descriptors
/// in parent order.
pub fn project_cim(cim: &CrossImpactMatrix, subset: &[usize]) -> Result<CrossImpactMatrix> {
    let mut keep: Vec<usize> = subset.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.len() < 2 {
        return Err(Error::Subsystem(format!(
            "a subsystem needs at least 2 descriptors, got {}",
            keep.len()
        )));
    }
    if let Some(&d) = keep.iter().find(|&&d| d >= cim.framework().len()) {
        return Err(Error::Subsystem(format!(
            "descriptor {} is outside the framework",
            d + 1
        )));
    }
    let mut sub = CrossImpactMatrix::new(cim.framework().restrict(&keep)?)
        .with_impact_range(cim.impact_range());
    for (li, &i) in keep.iter().enumerate() {
        for (lj, &j) in keep.iter().enumerate() {
            if let Some(cell) = cim.cell(i, j) {
                sub.insert_unchecked(cell.reindexed(li, lj));
            }
        }
    }
    Ok(sub)
}

/// A subsystem together with its consistent scenarios.
#[derive(Debug, Clone, PartialEq)]
pub struct Subsystem {
    pub descriptors: Vec<usize>,
    pub cim: CrossImpactMatrix,
    pub consistent: Vec<Scenario>,
}

pub fn solve_subsystems(
    cim: &CrossImpactMatrix,
    split: &SubsystemSplit,
    options: &SolveOptions,
) -> Result<Vec<Subsystem>> {
    split
        .subsets
        .iter()
        .map(|subset| {
            let sub = project_cim(cim, subset)?;
            let consistent = enumerate_consistent(&sub, 0, options)?;
            Ok(Subsystem {
                descriptors: subset.clone(),
                cim: sub,
                consistent,
            })
        })
        .collect()
}

/// One consistent scenario per subsystem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Combinatorial {
    pub members: Vec<Scenario>,
}

/// Cartesian product of the per-subsystem consistent sets, in lexicographic
/// order of member positions.
pub fn enumerate_combinatorials<'a>(
    consistent_sets: &'a [Vec<Scenario>],
    options: &SolveOptions,
) -> Result<Combinatorials<'a>> {
    let size = consistent_sets
        .iter()
        .try_fold(1u64, |acc, s| acc.checked_mul(s.len() as u64))
        .unwrap_or(u64::MAX);
    options.check_cap(size)?;
    Ok(Combinatorials {
        sets: consistent_sets,
        cursor: vec![0; consistent_sets.len()],
        remaining: size,
    })
}

pub struct Combinatorials<'a> {
    sets: &'a [Vec<Scenario>],
    cursor: Vec<usize>,
    remaining: u64,
}

impl Iterator for Combinatorials<'_> {
    type Item = Combinatorial;

    fn next(&mut self) -> Option<Combinatorial> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let members = self
            .cursor
            .iter()
            .zip(self.sets)
            .map(|(&c, set)| set[c].clone())
            .collect();
        for k in (0..self.cursor.len()).rev() {
            self.cursor[k] += 1;
            if self.cursor[k] < self.sets[k].len() {
                break;
            }
            self.cursor[k] = 0;
        }
        Some(Combinatorial { members })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (n, Some(n))
    }
}

/// Merges the members of a combinatorial into one scenario of the whole
/// system, refusing when two members disagree on a transitional descriptor.
pub fn aggregate_combinatorial(
    combinatorial: &Combinatorial,
    split: &SubsystemSplit,
    transitional: &TransitionalSet,
) -> Result<Scenario> {
    if combinatorial.members.len() != split.len() {
        return Err(Error::Subsystem(format!(
            "combinatorial has {} members for {} subsets",
            combinatorial.members.len(),
            split.len()
        )));
    }
    let mut states: Vec<Option<usize>> = vec![None; split.descriptor_count()];
    for (member, subset) in combinatorial.members.iter().zip(&split.subsets) {
        if member.len() != subset.len() {
            return Err(Error::Subsystem(format!(
                "member {member} does not match a subset of {} descriptors",
                subset.len()
            )));
        }
        for (&d, &s) in subset.iter().zip(member.states()) {
            match states[d] {
                Some(prev) if prev != s && transitional.contains(d) => {
                    return Err(Error::AggregationConflict {
                        descriptor: d,
                        states: vec![prev, s],
                    });
                }
                Some(prev) if prev != s => {
                    return Err(Error::Subsystem(format!(
                        "descriptor {} appears in two subsets but is not transitional",
                        d + 1
                    )));
                }
                _ => states[d] = Some(s),
            }
        }
    }
    let states: Option<Vec<usize>> = states.into_iter().collect();
    states
        .map(Scenario::new)
        .ok_or_else(|| Error::Subsystem("split does not cover every descriptor".into()))
}

/// Aggregates (A) compared with the consistent scenarios of the full CIM (B).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregationReport {
    pub combinatorials: u64,
    /// Combinatorials refused for disagreeing on a transitional descriptor.
    pub conflicts: u64,
    /// A, ascending rank.
    pub aggregated: Vec<Scenario>,
    /// B, ascending rank.
    pub consistent: Vec<Scenario>,
    /// A \ B: aggregates that are not consistent in the full system.
    pub unsound: Vec<Scenario>,
    /// B \ A: consistent scenarios no combinatorial produces.
    pub missing: Vec<Scenario>,
    /// |A ∩ B|.
    pub matched: usize,
}

impl AggregationReport {
    pub fn is_sound(&self) -> bool {
        self.unsound.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.missing.is_empty()
    }
}

/// Every scenario obtained by aggregating combinatorials, ascending.
pub fn aggregate_all(
    subsystems: &[Subsystem],
    split: &SubsystemSplit,
    options: &SolveOptions,
) -> Result<(Vec<Scenario>, u64, u64)> {
    let sets: Vec<Vec<Scenario>> = subsystems.iter().map(|s| s.consistent.clone()).collect();
    let t = transitional_set(split);
    let mut aggregated = BTreeSet::new();
    let (mut total, mut conflicts) = (0u64, 0u64);
    for xi in enumerate_combinatorials(&sets, options)? {
        total += 1;
        match aggregate_combinatorial(&xi, split, &t) {
            Ok(z) => {
                aggregated.insert(z);
            }
            Err(Error::AggregationConflict { .. }) => conflicts += 1,
            Err(e) => return Err(e),
        }
    }
    Ok((aggregated.into_iter().collect(), total, conflicts))
}

/// Brute-force comparison of the aggregated scenarios with the consistent
/// scenarios of the full system. The split must pass [`validate_split`].
pub fn verify_aggregation(
    cim: &CrossImpactMatrix,
    split: &SubsystemSplit,
    options: &SolveOptions,
) -> Result<AggregationReport> {
    options.check_cap(cim.framework().scenario_count())?;
    let report = validate_split(cim, split);
    if !report.is_clean() {
        return Err(Error::Subsystem(report.to_string().trim_end().to_string()));
    }
    let subsystems = solve_subsystems(cim, split, options)?;
    let (aggregated, combinatorials, conflicts) = aggregate_all(&subsystems, split, options)?;
    let consistent = enumerate_consistent(cim, 0, options)?;
    let a: BTreeSet<&Scenario> = aggregated.iter().collect();
    let b: BTreeSet<&Scenario> = consistent.iter().collect();
    Ok(AggregationReport {
        combinatorials,
        conflicts,
        unsound: a.difference(&b).map(|&s| s.clone()).collect(),
        missing: b.difference(&a).map(|&s| s.clone()).collect(),
        matched: a.intersection(&b).count(),
        aggregated,
        consistent,
    })
}
