//! Validation reports shared by the CIM, time-series and subsystem checks.
//!
//! Violations are data: validators never fail, they return every issue they
//! find. Descriptor and state numbers are stored 0-based and rendered 1-based.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Issue {
    /// Impact range must be a positive integer.
    NonPositiveRange {
        range: i32,
    },
    /// A judgement cell keyed on a descriptor outside the framework.
    UnknownDescriptor {
        source: usize,
        target: usize,
    },
    /// A judgement cell on the diagonal (a descriptor impacting itself).
    DiagonalCell {
        descriptor: usize,
    },
    CellShape {
        source: usize,
        target: usize,
        expected: (usize, usize),
        found: (usize, usize),
    },
    CellOutOfRange {
        source: usize,
        target: usize,
        row: usize,
        column: usize,
        value: i32,
        range: i32,
    },
    /// Warning: a one-state descriptor is always consistent.
    SingleStateDescriptor {
        descriptor: usize,
    },

    NoTimespans,
    DuplicateLabel {
        label: String,
    },
    FrameworkMismatch {
        timespan: String,
    },
    InTimespan {
        timespan: String,
        issue: Box<Issue>,
    },

    TooFewSubsets {
        count: usize,
    },
    SubsetTooSmall {
        subset: usize,
        size: usize,
    },
    SplitUnknownDescriptor {
        subset: usize,
        descriptor: usize,
    },
    UncoveredDescriptor {
        descriptor: usize,
    },
    DisconnectedSplit,
    /// Nonzero impact between descriptors that share no subset.
    CrossSubsetImpact {
        source: usize,
        target: usize,
    },
    /// Two subsystem views disagree on a shared judgement cell.
    SubsystemDisagreement {
        source: usize,
        target: usize,
        subsets: (usize, usize),
    },
}

impl Issue {
    pub fn is_warning(&self) -> bool {
        match self {
            Issue::SingleStateDescriptor { .. } => true,
            Issue::InTimespan { issue, .. } => issue.is_warning(),
            _ => false,
        }
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::NonPositiveRange { range } => {
                write!(f, "impact range {range} is not a positive integer")
            }
            Issue::UnknownDescriptor { source, target } => write!(
                f,
                "cell ({},{}) references a descriptor outside the framework",
                source + 1,
                target + 1
            ),
            Issue::DiagonalCell { descriptor } => write!(
                f,
                "cell ({0},{0}) is on the diagonal; a descriptor cannot impact itself",
                descriptor + 1
            ),
            Issue::CellShape {
                source,
                target,
                expected,
                found,
            } => write!(
                f,
                "cell ({},{}) has shape {}x{}, expected {}x{}",
                source + 1,
                target + 1,
                found.0,
                found.1,
                expected.0,
                expected.1
            ),
            Issue::CellOutOfRange {
                source,
                target,
                row,
                column,
                value,
                range,
            } => write!(
                f,
                "cell ({},{}) row {} column {}: value {value} outside [-{range}, {range}]",
                source + 1,
                target + 1,
                row + 1,
                column + 1
            ),
            Issue::SingleStateDescriptor { descriptor } => write!(
                f,
                "warning: descriptor {} has a single state and is always consistent",
                descriptor + 1
            ),
            Issue::NoTimespans => write!(f, "model has no timespans"),
            Issue::DuplicateLabel { label } => write!(f, "duplicate timespan label '{label}'"),
            Issue::FrameworkMismatch { timespan } => write!(
                f,
                "timespan '{timespan}': CIM framework differs from the model framework"
            ),
            Issue::InTimespan { timespan, issue } => write!(f, "timespan '{timespan}': {issue}"),
            Issue::TooFewSubsets { count } => {
                write!(f, "split has {count} subset(s); at least 2 are required")
            }
            Issue::SubsetTooSmall { subset, size } => write!(
                f,
                "subset {} has {size} descriptor(s); at least 2 are required",
                subset + 1
            ),
            Issue::SplitUnknownDescriptor { subset, descriptor } => write!(
                f,
                "subset {} references descriptor {} outside the framework",
                subset + 1,
                descriptor + 1
            ),
            Issue::UncoveredDescriptor { descriptor } => {
                write!(
                    f,
                    "descriptor {} is not covered by any subset",
                    descriptor + 1
                )
            }
            Issue::DisconnectedSplit => write!(f, "subset overlap graph is not connected"),
            Issue::CrossSubsetImpact { source, target } => write!(
                f,
                "pair ({},{}) shares no subset but has a nonzero judgement cell",
                source + 1,
                target + 1
            ),
            Issue::SubsystemDisagreement {
                source,
                target,
                subsets,
            } => write!(
                f,
                "subsets {} and {} disagree on cell ({},{})",
                subsets.0 + 1,
                subsets.1 + 1,
                source + 1,
                target + 1
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, issue: Issue) {
        self.issues.push(issue);
    }

    /// No errors. Warnings do not make a report dirty.
    pub fn is_clean(&self) -> bool {
        self.errors().next().is_none()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| !i.is_warning())
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.is_warning())
    }

    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn len(&self) -> usize {
        self.issues.len()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return writeln!(f, "ok: no issues");
        }
        for issue in &self.issues {
            writeln!(f, "{issue}")?;
        }
        Ok(())
    }
}
