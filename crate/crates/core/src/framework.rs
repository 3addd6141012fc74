//! Descriptors, states, scenarios and the cross-impact matrix.
//!
//! Descriptor indices are 0-based everywhere in the API. State numbers inside
//! a [`Scenario`] and in judgement-cell lookups are 1-based, matching the way
//! analysts number states; only rank arithmetic works with 0-based digits.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::validation::{Issue, ValidationReport};

/// Impact range used by most CIB studies: judgements are integers in [-3, +3].
pub const DEFAULT_IMPACT_RANGE: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Descriptor {
    pub name: String,
    pub states: Vec<String>,
}

impl Descriptor {
    pub fn new<S: Into<String>>(
        name: S,
        states: impl IntoIterator<Item = impl Into<String>>,
    ) -> Self {
        Descriptor {
            name: name.into(),
            states: states.into_iter().map(Into::into).collect(),
        }
    }
}

/// The ordered descriptor/state structure shared by every timespan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Framework {
    descriptors: Vec<Descriptor>,
    counts: Vec<usize>,
    size: u64,
}

impl Framework {
    pub fn new(descriptors: Vec<Descriptor>) -> Result<Self> {
        if descriptors.len() < 2 {
            return Err(Error::Framework(format!(
                "at least 2 descriptors are required, found {}",
                descriptors.len()
            )));
        }
        for (k, d) in descriptors.iter().enumerate() {
            if d.name.is_empty() {
                return Err(Error::Framework(format!(
                    "descriptor {} has an empty name",
                    k + 1
                )));
            }
            if descriptors[..k].iter().any(|o| o.name == d.name) {
                return Err(Error::Framework(format!(
                    "duplicate descriptor name '{}'",
                    d.name
                )));
            }
            if d.states.is_empty() {
                return Err(Error::Framework(format!(
                    "descriptor '{}' has no states",
                    d.name
                )));
            }
            let mut seen = HashSet::with_capacity(d.states.len());
            for state in &d.states {
                if !seen.insert(state) {
                    return Err(Error::Framework(format!(
                        "duplicate state '{}' in descriptor '{}'",
                        state, d.name
                    )));
                }
            }
        }
        let counts: Vec<usize> = descriptors.iter().map(|d| d.states.len()).collect();
        let size = counts
            .iter()
            .try_fold(1u64, |acc, &s| acc.checked_mul(s as u64))
            .ok_or_else(|| Error::Framework("scenario count overflows a 64-bit count".into()))?;
        Ok(Framework {
            descriptors,
            counts,
            size,
        })
    }

    /// Framework with descriptors `D1..DN` and states `s1..s{k}`.
    pub fn from_counts(counts: &[usize]) -> Result<Self> {
        Framework::new(
            counts
                .iter()
                .enumerate()
                .map(|(k, &s)| {
                    Descriptor::new(format!("D{}", k + 1), (1..=s).map(|i| format!("s{i}")))
                })
                .collect(),
        )
    }

    pub fn descriptors(&self) -> &[Descriptor] {
        &self.descriptors
    }

    pub fn descriptor(&self, k: usize) -> &Descriptor {
        &self.descriptors[k]
    }

    pub fn len(&self) -> usize {
        self.descriptors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.descriptors.is_empty()
    }

    /// State count `s_k` per descriptor.
    pub fn state_counts(&self) -> &[usize] {
        &self.counts
    }

    /// Number of scenarios, the product of all state counts.
    pub fn scenario_count(&self) -> u64 {
        self.size
    }

    pub fn descriptor_index(&self, name: &str) -> Option<usize> {
        self.descriptors.iter().position(|d| d.name == name)
    }

    /// 1-based state number of `state` in descriptor `k`.
    pub fn state_index(&self, k: usize, state: &str) -> Option<usize> {
        self.descriptors[k]
            .states
            .iter()
            .position(|s| s == state)
            .map(|i| i + 1)
    }

    /// Sub-framework keeping `indices` in the given order.
    pub(crate) fn restrict(&self, indices: &[usize]) -> Result<Framework> {
        Framework::new(
            indices
                .iter()
                .map(|&k| self.descriptors[k].clone())
                .collect(),
        )
    }

    /// State names of a scenario, e.g. `D1=high, D2=low`.
    pub fn describe(&self, scenario: &Scenario) -> String {
        scenario
            .states()
            .iter()
            .enumerate()
            .map(|(k, &s)| {
                format!(
                    "{}={}",
                    self.descriptors[k].name,
                    self.descriptors[k].states[s - 1]
                )
            })
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// One state per descriptor, stored as 1-based state numbers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scenario(Vec<usize>);

impl Scenario {
    pub fn new(states: impl Into<Vec<usize>>) -> Self {
        Scenario(states.into())
    }

    pub(crate) fn from_digits(digits: &[usize]) -> Self {
        Scenario(digits.iter().map(|d| d + 1).collect())
    }

    pub fn states(&self) -> &[usize] {
        &self.0
    }

    /// 1-based state of descriptor `k`.
    pub fn state(&self, k: usize) -> usize {
        self.0[k]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn digits(&self) -> Vec<usize> {
        self.0.iter().map(|s| s - 1).collect()
    }

    pub fn check(&self, framework: &Framework) -> Result<()> {
        if self.0.len() != framework.len() {
            return Err(Error::Scenario(format!(
                "scenario has {} states, framework has {} descriptors",
                self.0.len(),
                framework.len()
            )));
        }
        for (k, (&s, &count)) in self.0.iter().zip(framework.state_counts()).enumerate() {
            if s == 0 || s > count {
                return Err(Error::Scenario(format!(
                    "state {s} invalid for descriptor '{}' (1..={count})",
                    framework.descriptor(k).name
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, s) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str(")")
    }
}

/// Mixed-radix rank of a scenario; descriptor 1 is the most significant digit.
pub fn scenario_rank(framework: &Framework, scenario: &Scenario) -> Result<u64> {
    scenario.check(framework)?;
    Ok(rank_digits(
        framework.state_counts(),
        scenario.states().iter().map(|s| s - 1),
    ))
}

pub(crate) fn rank_digits(counts: &[usize], digits: impl IntoIterator<Item = usize>) -> u64 {
    counts
        .iter()
        .zip(digits)
        .fold(0u64, |acc, (&radix, d)| acc * radix as u64 + d as u64)
}

pub(crate) fn unrank_into(counts: &[usize], mut rank: u64, digits: &mut [usize]) {
    for (d, &radix) in digits.iter_mut().zip(counts).rev() {
        *d = (rank % radix as u64) as usize;
        rank /= radix as u64;
    }
}

pub fn scenario_unrank(framework: &Framework, rank: u64) -> Result<Scenario> {
    if rank >= framework.scenario_count() {
        return Err(Error::RankOutOfRange {
            rank,
            size: framework.scenario_count(),
        });
    }
    let mut digits = vec![0; framework.len()];
    unrank_into(framework.state_counts(), rank, &mut digits);
    Ok(Scenario::from_digits(&digits))
}

/// Every scenario of the framework, in ascending rank order.
pub fn iterate_scenarios(framework: &Framework) -> ScenarioIter<'_> {
    ScenarioIter {
        counts: framework.state_counts(),
        digits: vec![0; framework.len()],
        remaining: framework.scenario_count(),
    }
}

/// Odometer over the mixed-radix scenario space.
pub struct ScenarioIter<'a> {
    counts: &'a [usize],
    digits: Vec<usize>,
    remaining: u64,
}

impl Iterator for ScenarioIter<'_> {
    type Item = Scenario;

    fn next(&mut self) -> Option<Scenario> {
        if self.remaining == 0 {
            return None;
        }
        let out = Scenario::from_digits(&self.digits);
        self.remaining -= 1;
        for k in (0..self.digits.len()).rev() {
            self.digits[k] += 1;
            if self.digits[k] < self.counts[k] {
                break;
            }
            self.digits[k] = 0;
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (n, Some(n))
    }
}

impl ExactSizeIterator for ScenarioIter<'_> {}

/// The `s_i x s_j` block of direct impacts of descriptor `source` on `target`.
/// Rows are source states, columns are target states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JudgementCell {
    source: usize,
    target: usize,
    rows: usize,
    cols: usize,
    values: Vec<i32>,
}

impl JudgementCell {
    /// Builds a cell from row vectors. Rows must have equal length.
    pub fn new(source: usize, target: usize, rows: Vec<Vec<i32>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::InvalidCim(format!(
                "cell ({},{}) row {} has {} entries, expected {cols}",
                source + 1,
                target + 1,
                bad + 1,
                rows[bad].len()
            )));
        }
        Ok(JudgementCell {
            source,
            target,
            rows: rows.len(),
            cols,
            values: rows.into_iter().flatten().collect(),
        })
    }

    pub fn zeros(source: usize, target: usize, rows: usize, cols: usize) -> Self {
        JudgementCell {
            source,
            target,
            rows,
            cols,
            values: vec![0; rows * cols],
        }
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Impact of source state `a` on target state `b`, both 1-based.
    pub fn get(&self, a: usize, b: usize) -> i32 {
        self.at(a - 1, b - 1)
    }

    #[inline]
    pub(crate) fn at(&self, row: usize, col: usize) -> i32 {
        self.values[row * self.cols + col]
    }

    /// Row of impacts exerted by 0-based source state `row`.
    #[inline]
    pub(crate) fn row(&self, row: usize) -> &[i32] {
        &self.values[row * self.cols..(row + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i32>> {
        if self.cols == 0 {
            return vec![Vec::new(); self.rows];
        }
        self.values.chunks(self.cols).map(<[i32]>::to_vec).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    pub(crate) fn reindexed(&self, source: usize, target: usize) -> Self {
        JudgementCell {
            source,
            target,
            ..self.clone()
        }
    }
}

/// Block matrix of judgement cells over one framework. Absent cells are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossImpactMatrix {
    framework: Framework,
    cells: BTreeMap<(usize, usize), JudgementCell>,
    impact_range: i32,
}

impl CrossImpactMatrix {
    /// All-zero matrix with the default impact range.
    pub fn new(framework: Framework) -> Self {
        CrossImpactMatrix {
            framework,
            cells: BTreeMap::new(),
            impact_range: DEFAULT_IMPACT_RANGE,
        }
    }

    pub fn with_impact_range(mut self, range: i32) -> Self {
        self.impact_range = range;
        self
    }

    /// Sets the cell `source -> target`, checking it against the framework.
    pub fn set_cell(
        &mut self,
        source: usize,
        target: usize,
        rows: Vec<Vec<i32>>,
    ) -> Result<&mut Self> {
        let cell = JudgementCell::new(source, target, rows)?;
        let mut report = ValidationReport::new();
        check_cell(&self.framework, self.impact_range, &cell, &mut report);
        if let Some(issue) = report.errors().next() {
            return Err(Error::InvalidCim(issue.to_string()));
        }
        self.cells.insert((source, target), cell);
        Ok(self)
    }

    /// Builder form of [`set_cell`](Self::set_cell).
    pub fn cell_from(mut self, source: usize, target: usize, rows: Vec<Vec<i32>>) -> Result<Self> {
        self.set_cell(source, target, rows)?;
        Ok(self)
    }

    /// Stores a cell without checking it. Run [`validate_cim`] before use.
    pub fn insert_unchecked(&mut self, cell: JudgementCell) {
        self.cells.insert((cell.source, cell.target), cell);
    }

    pub fn remove_cell(&mut self, source: usize, target: usize) -> Option<JudgementCell> {
        self.cells.remove(&(source, target))
    }

    pub fn framework(&self) -> &Framework {
        &self.framework
    }

    pub fn impact_range(&self) -> i32 {
        self.impact_range
    }

    pub fn cell(&self, source: usize, target: usize) -> Option<&JudgementCell> {
        self.cells.get(&(source, target))
    }

    /// Stored cells in `(source, target)` order.
    pub fn cells(&self) -> impl Iterator<Item = &JudgementCell> {
        self.cells.values()
    }

    /// Direct impact of state `a` of `source` on state `b` of `target`
    /// (1-based states); zero for absent cells.
    pub fn impact(&self, source: usize, a: usize, target: usize, b: usize) -> i32 {
        self.cell(source, target).map_or(0, |c| c.get(a, b))
    }

    pub fn validate(&self) -> ValidationReport {
        validate_cim(self)
    }
}

fn check_cell(
    framework: &Framework,
    range: i32,
    cell: &JudgementCell,
    report: &mut ValidationReport,
) {
    let (i, j) = (cell.source, cell.target);
    if i >= framework.len() || j >= framework.len() {
        report.push(Issue::UnknownDescriptor {
            source: i,
            target: j,
        });
        return;
    }
    if i == j {
        report.push(Issue::DiagonalCell { descriptor: i });
        return;
    }
    let expected = (framework.state_counts()[i], framework.state_counts()[j]);
    if cell.shape() != expected {
        report.push(Issue::CellShape {
            source: i,
            target: j,
            expected,
            found: cell.shape(),
        });
        return;
    }
    for row in 0..cell.rows {
        for column in 0..cell.cols {
            let value = cell.at(row, column);
            if value.checked_abs().is_none_or(|a| a > range) {
                report.push(Issue::CellOutOfRange {
                    source: i,
                    target: j,
                    row,
                    column,
                    value,
                    range,
                });
            }
        }
    }
}

/// Every invariant violation of the matrix; an empty error list means it can
/// be consumed by every downstream operation.
pub fn validate_cim(cim: &CrossImpactMatrix) -> ValidationReport {
    let mut report = ValidationReport::new();
    if cim.impact_range <= 0 {
        report.push(Issue::NonPositiveRange {
            range: cim.impact_range,
        });
    }
    for (&(i, j), cell) in &cim.cells {
        if (cell.source, cell.target) != (i, j) {
            report.push(Issue::UnknownDescriptor {
                source: i,
                target: j,
            });
            continue;
        }
        check_cell(&cim.framework, cim.impact_range, cell, &mut report);
    }
    for (k, &s) in cim.framework.state_counts().iter().enumerate() {
        if s == 1 {
            report.push(Issue::SingleStateDescriptor { descriptor: k });
        }
    }
    report
}
