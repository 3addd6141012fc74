//! Multi-timespan models and the chain of highest-weight scenarios.
//!
//! Every timespan has its own CIM over one shared framework. For each
//! timespan the basin weights are computed under a chosen succession rule and
//! the scenario of highest weight (or highest compound weight, when manual
//! state values are supplied) becomes that timespan's link in the chain.
//! Ties are resolved towards the smallest rank and always reported.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::framework::{CrossImpactMatrix, Framework, Scenario};
use crate::options::SolveOptions;
use crate::succession::{basin_weights_in_pool, SuccessionRule, Weight, WeightTable};
use crate::validation::{Issue, ValidationReport};

#[derive(Debug, Clone, PartialEq)]
pub struct Timespan {
    pub label: String,
    pub cim: CrossImpactMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesModel {
    pub framework: Framework,
    pub timespans: Vec<Timespan>,
}

impl TimeSeriesModel {
    pub fn new(framework: Framework) -> Self {
        TimeSeriesModel {
            framework,
            timespans: Vec::new(),
        }
    }

    pub fn with_timespan(mut self, label: impl Into<String>, cim: CrossImpactMatrix) -> Self {
        self.timespans.push(Timespan {
            label: label.into(),
            cim,
        });
        self
    }

    pub fn timespan(&self, label: &str) -> Option<&Timespan> {
        self.timespans.iter().find(|t| t.label == label)
    }

    pub fn validate(&self) -> ValidationReport {
        validate_series(self)
    }
}

/// Framework mismatches, duplicate labels and every per-CIM violation,
/// tagged with the timespan they occur in.
pub fn validate_series(model: &TimeSeriesModel) -> ValidationReport {
    let mut report = ValidationReport::new();
    if model.timespans.is_empty() {
        report.push(Issue::NoTimespans);
    }
    let mut labels = HashSet::new();
    for span in &model.timespans {
        if !labels.insert(span.label.as_str()) {
            report.push(Issue::DuplicateLabel {
                label: span.label.clone(),
            });
        }
        if span.cim.framework() != &model.framework {
            report.push(Issue::FrameworkMismatch {
                timespan: span.label.clone(),
            });
            continue;
        }
        for issue in span.cim.validate().issues {
            report.push(Issue::InTimespan {
                timespan: span.label.clone(),
                issue: Box::new(issue),
            });
        }
    }
    report
}

/// A real value for every state of every descriptor.
#[derive(Debug, Clone, PartialEq)]
pub struct ManualValueTable {
    framework: Framework,
    values: Vec<Vec<f64>>,
}

impl ManualValueTable {
    /// `values[k][s]` is the value of 0-based state `s` of descriptor `k`.
    pub fn new(framework: &Framework, values: Vec<Vec<f64>>) -> Result<Self> {
        for (k, d) in framework.descriptors().iter().enumerate() {
            let row = values.get(k).map_or(&[][..], Vec::as_slice);
            for (s, state) in d.states.iter().enumerate() {
                match row.get(s) {
                    Some(v) if v.is_finite() => {}
                    Some(v) => {
                        return Err(Error::Precondition(format!(
                            "manual value {v} for '{}'/'{state}' is not finite",
                            d.name
                        )))
                    }
                    None => {
                        return Err(Error::MissingManualValue {
                            descriptor: d.name.clone(),
                            state: state.clone(),
                        })
                    }
                }
            }
            if row.len() > d.states.len() {
                return Err(Error::Precondition(format!(
                    "descriptor '{}' has {} states but {} manual values",
                    d.name,
                    d.states.len(),
                    row.len()
                )));
            }
        }
        if values.len() > framework.len() {
            return Err(Error::Precondition(format!(
                "{} manual value rows for {} descriptors",
                values.len(),
                framework.len()
            )));
        }
        Ok(ManualValueTable {
            framework: framework.clone(),
            values,
        })
    }

    /// The same value for every state.
    pub fn constant(framework: &Framework, value: f64) -> Result<Self> {
        let values = framework
            .state_counts()
            .iter()
            .map(|&s| vec![value; s])
            .collect();
        ManualValueTable::new(framework, values)
    }

    pub fn framework(&self) -> &Framework {
        &self.framework
    }

    /// Value of 1-based state `state` of descriptor `k`.
    pub fn value(&self, k: usize, state: usize) -> Option<f64> {
        state
            .checked_sub(1)
            .and_then(|s| self.values.get(k)?.get(s).copied())
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }
}

/// Sum of the manual values of the scenario's states.
pub fn manual_weight(scenario: &Scenario, table: &ManualValueTable) -> Result<f64> {
    let fw = table.framework();
    if scenario.len() != fw.len() {
        return Err(Error::Scenario(format!(
            "scenario has {} states, value table covers {} descriptors",
            scenario.len(),
            fw.len()
        )));
    }
    scenario
        .states()
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            table.value(k, s).ok_or_else(|| Error::MissingManualValue {
                descriptor: fw.descriptor(k).name.clone(),
                state: s.to_string(),
            })
        })
        .sum()
}

pub fn compound_weight(scenario_weight: Weight, manual: f64) -> f64 {
    manual * (*scenario_weight.numer() as f64 / *scenario_weight.denom() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    /// Rank candidates by basin weight.
    #[default]
    Scenario,
    /// Rank candidates by manual weight times basin weight.
    Compound,
}

impl Weighting {
    pub fn name(self) -> &'static str {
        match self {
            Weighting::Scenario => "scenario",
            Weighting::Compound => "compound",
        }
    }
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Weighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scenario" => Ok(Weighting::Scenario),
            "compound" => Ok(Weighting::Compound),
            _ => Err(Error::Precondition(format!("unknown weighting '{s}'"))),
        }
    }
}

/// Externally supplied allow-list of scenarios per timespan label. Timespans
/// without an entry are unrestricted.
pub type ScenarioFilter = HashMap<String, BTreeSet<Scenario>>;

/// A consistent scenario competing for a chain link.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub scenario: Scenario,
    pub rank: u64,
    pub weight: Weight,
    pub manual: Option<f64>,
    pub compound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainLink {
    pub label: String,
    pub scenario: Scenario,
    pub rank: u64,
    pub weight: Weight,
    pub manual: Option<f64>,
    pub compound: Option<f64>,
    /// Two or more candidates attained the maximum.
    pub tie: bool,
    /// Every candidate attaining the maximum, ascending rank.
    pub tied: Vec<Scenario>,
    /// Compound mode only: no candidate has a positive compound weight.
    pub nonpositive_compound: bool,
    pub candidates: Vec<Candidate>,
    pub table: WeightTable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioChain {
    pub framework: Framework,
    pub rule: SuccessionRule,
    pub weighting: Weighting,
    pub links: Vec<ChainLink>,
}

/// Chain of highest-weight scenarios, one link per timespan in model order.
pub fn build_chain(
    model: &TimeSeriesModel,
    rule: SuccessionRule,
    weighting: Weighting,
    table: Option<&ManualValueTable>,
    options: &SolveOptions,
) -> Result<ScenarioChain> {
    build_chain_filtered(model, rule, weighting, table, None, options)
}

/// [`build_chain`] restricted to the scenarios an external filter allows.
pub fn build_chain_filtered(
    model: &TimeSeriesModel,
    rule: SuccessionRule,
    weighting: Weighting,
    table: Option<&ManualValueTable>,
    filter: Option<&ScenarioFilter>,
    options: &SolveOptions,
) -> Result<ScenarioChain> {
    let table = match (weighting, table) {
        (Weighting::Compound, None) => {
            return Err(Error::Precondition(
                "compound weighting requires a manual value table".into(),
            ))
        }
        (Weighting::Compound, Some(t)) => Some(t),
        (Weighting::Scenario, _) => None,
    };
    if let Some(t) = table {
        if t.framework() != &model.framework {
            return Err(Error::Precondition(
                "manual value table does not match the model framework".into(),
            ));
        }
    }
    let report = validate_series(model);
    if !report.is_clean() {
        return Err(Error::InvalidCim(report.to_string().trim_end().to_string()));
    }
    for span in &model.timespans {
        options.check_cap(span.cim.framework().scenario_count())?;
    }

    let tables = options.install(|| {
        model
            .timespans
            .par_iter()
            .map(|span| basin_weights_in_pool(&span.cim, rule))
            .collect::<Result<Vec<_>>>()
    })??;

    let links = model
        .timespans
        .iter()
        .zip(tables)
        .map(|(span, wt)| {
            let allowed = filter.and_then(|f| f.get(&span.label));
            choose_link(span, wt, table, allowed)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ScenarioChain {
        framework: model.framework.clone(),
        rule,
        weighting,
        links,
    })
}

fn choose_link(
    span: &Timespan,
    table: WeightTable,
    manual: Option<&ManualValueTable>,
    allowed: Option<&BTreeSet<Scenario>>,
) -> Result<ChainLink> {
    let fail = |reason: &str| Error::Chain {
        timespan: span.label.clone(),
        reason: reason.to_string(),
    };
    if table.entries.is_empty() {
        return Err(fail(if table.cycles.is_empty() {
            "no consistent scenarios"
        } else {
            "no consistent scenarios; all basin mass ends on cyclic attractors"
        }));
    }
    let candidates = table
        .entries
        .iter()
        .filter(|e| allowed.is_none_or(|a| a.contains(&e.scenario)))
        .map(|e| {
            let m = manual.map(|t| manual_weight(&e.scenario, t)).transpose()?;
            Ok(Candidate {
                scenario: e.scenario.clone(),
                rank: e.rank,
                weight: e.weight,
                manual: m,
                compound: m.map(|m| compound_weight(e.weight, m)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if candidates.is_empty() {
        return Err(fail(
            "the scenario filter excludes every consistent scenario",
        ));
    }

    // candidates are in ascending rank order, so the first maximum wins ties
    let tied: Vec<&Candidate> = match manual {
        None => {
            let best = candidates
                .iter()
                .map(|c| c.weight)
                .max()
                .expect("non-empty");
            candidates.iter().filter(|c| c.weight == best).collect()
        }
        Some(_) => {
            let score = |c: &Candidate| c.compound.expect("compound mode");
            let best = candidates
                .iter()
                .map(score)
                .fold(f64::NEG_INFINITY, f64::max);
            candidates.iter().filter(|c| score(c) == best).collect()
        }
    };
    let chosen = tied[0].clone();
    let nonpositive_compound = manual.is_some() && chosen.compound.is_some_and(|c| c <= 0.0);
    Ok(ChainLink {
        label: span.label.clone(),
        scenario: chosen.scenario,
        rank: chosen.rank,
        weight: chosen.weight,
        manual: chosen.manual,
        compound: chosen.compound,
        tie: tied.len() >= 2,
        tied: tied.iter().map(|c| c.scenario.clone()).collect(),
        nonpositive_compound,
        candidates,
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{anti2, mutual2, pursuit2, zero_cim};

    fn s(v: &[usize]) -> Scenario {
        Scenario::new(v.to_vec())
    }

    fn fw22() -> Framework {
        Framework::from_counts(&[2, 2]).unwrap()
    }

    fn values21() -> ManualValueTable {
        ManualValueTable::new(&fw22(), vec![vec![2.0, 1.0], vec![2.0, 1.0]]).unwrap()
    }

    fn two_spans() -> TimeSeriesModel {
        TimeSeriesModel::new(fw22())
            .with_timespan("2030", mutual2())
            .with_timespan("2040", anti2())
    }

    #[test]
    fn series_validation() {
        assert!(two_spans().validate().is_empty());

        let wide = zero_cim(&[2, 3]);
        let model = two_spans().with_timespan("2050", wide);
        assert_eq!(
            model.validate().issues,
            vec![Issue::FrameworkMismatch {
                timespan: "2050".into()
            }]
        );

        let mut bad = mutual2();
        bad.insert_unchecked(
            crate::JudgementCell::new(0, 1, vec![vec![5, 0], vec![0, 0]]).unwrap(),
        );
        let model = TimeSeriesModel::new(fw22()).with_timespan("a", bad);
        let report = model.validate();
        assert_eq!(report.len(), 1);
        assert!(
            matches!(&report.issues[0], Issue::InTimespan { timespan, issue }
            if timespan == "a" && matches!(**issue, Issue::CellOutOfRange { value: 5, .. }))
        );

        let dup = TimeSeriesModel::new(fw22())
            .with_timespan("a", mutual2())
            .with_timespan("a", mutual2());
        assert_eq!(
            dup.validate().issues,
            vec![Issue::DuplicateLabel { label: "a".into() }]
        );
        assert_eq!(
            TimeSeriesModel::new(fw22()).validate().issues,
            vec![Issue::NoTimespans]
        );
    }

    #[test]
    fn manual_weight_examples() {
        let zeros = ManualValueTable::constant(&fw22(), 0.0).unwrap();
        assert_eq!(manual_weight(&s(&[1, 2]), &zeros).unwrap(), 0.0);
        assert_eq!(manual_weight(&s(&[1, 1]), &values21()).unwrap(), 4.0);
        assert_eq!(manual_weight(&s(&[2, 2]), &values21()).unwrap(), 2.0);
        let err = manual_weight(&s(&[1, 3]), &values21()).unwrap_err();
        assert_eq!(
            err,
            Error::MissingManualValue {
                descriptor: "D2".into(),
                state: "3".into()
            }
        );
    }

    #[test]
    fn incomplete_table_is_rejected_naming_pair() {
        let err = ManualValueTable::new(&fw22(), vec![vec![1.0, 2.0], vec![1.0]]).unwrap_err();
        assert_eq!(
            err,
            Error::MissingManualValue {
                descriptor: "D2".into(),
                state: "s2".into()
            }
        );
        assert!(ManualValueTable::new(&fw22(), vec![vec![1.0, f64::NAN], vec![1.0, 1.0]]).is_err());
    }

    #[test]
    fn compound_examples() {
        assert_eq!(compound_weight(Weight::new(1, 2), 4.0), 2.0);
        assert_eq!(compound_weight(Weight::new(1, 4), 0.0), 0.0);
        assert_eq!(compound_weight(Weight::new(0, 1), 7.0), 0.0);
    }

    #[test]
    fn chain_over_two_spans_reports_ties() {
        let chain = build_chain(
            &two_spans(),
            SuccessionRule::Local,
            Weighting::Scenario,
            None,
            &SolveOptions::default(),
        )
        .unwrap();
        let got: Vec<_> = chain
            .links
            .iter()
            .map(|l| (l.scenario.clone(), l.weight, l.tie))
            .collect();
        assert_eq!(
            got,
            vec![
                (s(&[1, 1]), Weight::new(1, 2), true),
                (s(&[1, 2]), Weight::new(1, 2), true)
            ]
        );
        assert_eq!(chain.links[0].tied, vec![s(&[1, 1]), s(&[2, 2])]);
        assert_eq!(chain.links[1].tied, vec![s(&[1, 2]), s(&[2, 1])]);
    }

    #[test]
    fn compound_chain_resolves_tie() {
        let model = TimeSeriesModel::new(fw22()).with_timespan("2030", mutual2());
        let t = values21();
        let chain = build_chain(
            &model,
            SuccessionRule::Local,
            Weighting::Compound,
            Some(&t),
            &SolveOptions::default(),
        )
        .unwrap();
        let link = &chain.links[0];
        assert_eq!(link.scenario, s(&[1, 1]));
        assert_eq!(link.weight, Weight::new(1, 2));
        assert_eq!(link.manual, Some(4.0));
        assert_eq!(link.compound, Some(2.0));
        assert!(!link.tie);
        assert!(!link.nonpositive_compound);
    }

    #[test]
    fn uniform_weights_pick_smallest_rank() {
        let model = TimeSeriesModel::new(fw22()).with_timespan("t", zero_cim(&[2, 2]));
        for rule in SuccessionRule::ALL {
            let chain = build_chain(
                &model,
                rule,
                Weighting::Scenario,
                None,
                &SolveOptions::default(),
            )
            .unwrap();
            assert_eq!(chain.links[0].scenario, s(&[1, 1]));
            assert!(chain.links[0].tie);
            assert_eq!(chain.links[0].tied.len(), 4);
        }
    }

    #[test]
    fn compound_requires_table() {
        let err = build_chain(
            &two_spans(),
            SuccessionRule::Local,
            Weighting::Compound,
            None,
            &SolveOptions::default(),
        );
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn timespan_without_fixed_points_fails_by_name() {
        let model = two_spans().with_timespan("2050", pursuit2());
        let err = build_chain(
            &model,
            SuccessionRule::Global,
            Weighting::Scenario,
            None,
            &SolveOptions::default(),
        )
        .unwrap_err();
        assert!(
            matches!(&err, Error::Chain { timespan, .. } if timespan == "2050"),
            "{err}"
        );
    }

    #[test]
    fn negative_values_flag_nonpositive_compound() {
        let model = TimeSeriesModel::new(fw22()).with_timespan("t", mutual2());
        let t = ManualValueTable::new(&fw22(), vec![vec![-1.0, -2.0], vec![-1.0, -2.0]]).unwrap();
        let chain = build_chain(
            &model,
            SuccessionRule::Local,
            Weighting::Compound,
            Some(&t),
            &SolveOptions::default(),
        )
        .unwrap();
        assert_eq!(chain.links[0].scenario, s(&[1, 1]));
        assert_eq!(chain.links[0].compound, Some(-1.0));
        assert!(chain.links[0].nonpositive_compound);
    }

    #[test]
    fn filter_restricts_candidates() {
        let mut filter = ScenarioFilter::new();
        filter.insert("2030".into(), BTreeSet::from([s(&[2, 2])]));
        let chain = build_chain_filtered(
            &two_spans(),
            SuccessionRule::Local,
            Weighting::Scenario,
            None,
            Some(&filter),
            &SolveOptions::default(),
        )
        .unwrap();
        assert_eq!(chain.links[0].scenario, s(&[2, 2]));
        assert!(!chain.links[0].tie);
        assert_eq!(chain.links[1].scenario, s(&[1, 2]));

        filter.insert("2040".into(), BTreeSet::new());
        let err = build_chain_filtered(
            &two_spans(),
            SuccessionRule::Local,
            Weighting::Scenario,
            None,
            Some(&filter),
            &SolveOptions::default(),
        );
        assert!(matches!(err, Err(Error::Chain { timespan, .. }) if timespan == "2040"));
    }
}
