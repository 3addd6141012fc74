//! Model documents and report formats.
//!
//! A model is one JSON document with a strict schema (unknown fields are
//! errors):
//!
//! ```json
//! {
//!   "framework": { "descriptors": [ { "name": "Economy", "states": ["growth", "recession"] } ] },
//!   "impact_range": 3,
//!   "timespans": [ { "label": "2030", "cells": { "Economy->Energy": [[2, -2], [-1, 1]] } } ],
//!   "manual_values": { "Economy": { "growth": 2, "recession": 1 } },
//!   "split": [["Economy", "Energy"], ["Energy", "Climate"]]
//! }
//! ```
//!
//! Cell rows are source states and columns are target states. Absent cells
//! are zero. `impact_range`, `manual_values` and `split` are optional.
//!
//! Weight tables are written as CSV with `\n` line endings; chain and
//! aggregation reports are markdown-flavoured text. All writers are
//! deterministic.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framework::{CrossImpactMatrix, Descriptor, Framework, JudgementCell, Scenario};
use crate::multilevel::{AggregationReport, SubsystemSplit};
use crate::succession::{Weight, WeightTable};
use crate::timechain::{ManualValueTable, ScenarioChain, TimeSeriesModel, Timespan, Weighting};

/// Decimal digits used when rendering weights unless told otherwise.
pub const DEFAULT_PRECISION: usize = 6;

/// Largest supported decimal precision.
pub const MAX_PRECISION: usize = 18;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    framework: RawFramework,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    impact_range: Option<u32>,
    timespans: Vec<RawTimespan>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    manual_values: Option<BTreeMap<String, BTreeMap<String, f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    split: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFramework {
    descriptors: Vec<RawDescriptor>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDescriptor {
    name: String,
    states: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTimespan {
    label: String,
    #[serde(default)]
    cells: BTreeMap<String, Vec<Vec<i32>>>,
}

/// A parsed study: the time series plus its optional value table and split.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelDocument {
    pub model: TimeSeriesModel,
    /// Declared impact range; `None` means the default.
    pub impact_range: Option<u32>,
    pub manual_values: Option<ManualValueTable>,
    pub split: Option<SubsystemSplit>,
}

impl ModelDocument {
    pub fn framework(&self) -> &Framework {
        &self.model.framework
    }
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn unknown(path: impl Into<String>, name: &str) -> Error {
    Error::UnknownName {
        path: path.into(),
        name: name.to_string(),
    }
}

/// Parses a model document, resolving every name to an index.
///
/// Judgement values outside the impact range are accepted here and reported
/// by validation; everything else in the schema is enforced.
pub fn parse_model(text: &str) -> Result<ModelDocument> {
    let mut de = serde_json::Deserializer::from_str(text);
    let raw: RawModel = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let inner = e.inner();
        match inner.classify() {
            serde_json::error::Category::Data => {
                let path = match e.path().to_string() {
                    p if p == "." || p.is_empty() => "(root)".to_string(),
                    p => p,
                };
                schema(path, strip_position(inner))
            }
            _ => Error::Syntax {
                line: inner.line(),
                column: inner.column(),
                message: strip_position(inner),
            },
        }
    })?;
    de.end().map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: strip_position(&e),
    })?;
    resolve(raw)
}

fn strip_position(e: &serde_json::Error) -> String {
    let text = e.to_string();
    match text.rfind(" at line ") {
        Some(i) => text[..i].to_string(),
        None => text,
    }
}

fn resolve(raw: RawModel) -> Result<ModelDocument> {
    let framework = Framework::new(
        raw.framework
            .descriptors
            .into_iter()
            .map(|d| Descriptor::new(d.name, d.states))
            .collect(),
    )
    .map_err(|e| schema("framework.descriptors", e.to_string()))?;

    let range = match raw.impact_range {
        Some(0) => return Err(schema("impact_range", "must be a positive integer")),
        Some(r) => i32::try_from(r).map_err(|_| schema("impact_range", "too large"))?,
        None => crate::DEFAULT_IMPACT_RANGE,
    };

    if raw.timespans.is_empty() {
        return Err(schema("timespans", "at least one timespan is required"));
    }
    let mut model = TimeSeriesModel::new(framework.clone());
    for (t, span) in raw.timespans.into_iter().enumerate() {
        if model.timespan(&span.label).is_some() {
            return Err(schema(
                format!("timespans[{t}].label"),
                format!("duplicate label '{}'", span.label),
            ));
        }
        let mut cim = CrossImpactMatrix::new(framework.clone()).with_impact_range(range);
        for (key, rows) in span.cells {
            let path = format!("timespans[{t}].cells.{key}");
            let (i, j) = resolve_pair(&framework, &key, &path)?;
            let expected = (framework.state_counts()[i], framework.state_counts()[j]);
            if rows.len() != expected.0 || rows.iter().any(|r| r.len() != expected.1) {
                let found = match rows.first() {
                    Some(first) if rows.iter().all(|r| r.len() == first.len()) => {
                        format!("{}x{}", rows.len(), first.len())
                    }
                    Some(_) => format!("{} ragged rows", rows.len()),
                    None => "0 rows".to_string(),
                };
                return Err(Error::Dimension {
                    path,
                    expected_rows: expected.0,
                    expected_cols: expected.1,
                    found,
                });
            }
            cim.insert_unchecked(JudgementCell::new(i, j, rows)?);
        }
        model.timespans.push(Timespan {
            label: span.label,
            cim,
        });
    }

    let manual_values = raw
        .manual_values
        .map(|values| resolve_values(&framework, values))
        .transpose()?;

    let split = raw
        .split
        .map(|subsets| {
            subsets
                .iter()
                .enumerate()
                .map(|(x, names)| {
                    names
                        .iter()
                        .enumerate()
                        .map(|(y, name)| {
                            framework
                                .descriptor_index(name)
                                .ok_or_else(|| unknown(format!("split[{x}][{y}]"), name))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
                .map(SubsystemSplit::new)
        })
        .transpose()?;

    Ok(ModelDocument {
        model,
        impact_range: raw.impact_range,
        manual_values,
        split,
    })
}

/// Resolves `"<source>-><target>"`; names may themselves contain `->` as long
/// as exactly one split point yields two known descriptors.
fn resolve_pair(framework: &Framework, key: &str, path: &str) -> Result<(usize, usize)> {
    let candidates: Vec<(usize, usize)> = key
        .match_indices("->")
        .filter_map(|(at, _)| {
            let i = framework.descriptor_index(&key[..at])?;
            let j = framework.descriptor_index(&key[at + 2..])?;
            Some((i, j))
        })
        .collect();
    match candidates.as_slice() {
        [pair] => Ok(*pair),
        [] if !key.contains("->") => Err(schema(
            path,
            "cell key must have the form '<source>-><target>'",
        )),
        [] => Err(unknown(path, key)),
        _ => Err(schema(path, "ambiguous cell key")),
    }
}

fn resolve_values(
    framework: &Framework,
    values: BTreeMap<String, BTreeMap<String, f64>>,
) -> Result<ManualValueTable> {
    let mut rows: Vec<Vec<Option<f64>>> = framework
        .state_counts()
        .iter()
        .map(|&s| vec![None; s])
        .collect();
    for (name, states) in &values {
        let k = framework
            .descriptor_index(name)
            .ok_or_else(|| unknown(format!("manual_values.{name}"), name))?;
        for (state, &v) in states {
            let s = framework
                .state_index(k, state)
                .ok_or_else(|| unknown(format!("manual_values.{name}.{state}"), state))?;
            rows[k][s - 1] = Some(v);
        }
    }
    let mut complete = Vec::with_capacity(rows.len());
    for (k, row) in rows.into_iter().enumerate() {
        let d = framework.descriptor(k);
        let row = row
            .into_iter()
            .enumerate()
            .map(|(s, v)| {
                v.ok_or_else(|| Error::MissingManualValue {
                    descriptor: d.name.clone(),
                    state: d.states[s].clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        complete.push(row);
    }
    ManualValueTable::new(framework, complete)
}

/// Serializes a document so that [`parse_model`] reproduces it exactly.
pub fn model_to_json(doc: &ModelDocument) -> String {
    let fw = doc.framework();
    let name = |k: usize| fw.descriptor(k).name.clone();
    let raw = RawModel {
        framework: RawFramework {
            descriptors: fw
                .descriptors()
                .iter()
                .map(|d| RawDescriptor {
                    name: d.name.clone(),
                    states: d.states.clone(),
                })
                .collect(),
        },
        impact_range: doc.impact_range,
        timespans: doc
            .model
            .timespans
            .iter()
            .map(|t| RawTimespan {
                label: t.label.clone(),
                cells: t
                    .cim
                    .cells()
                    .map(|c| {
                        (
                            format!("{}->{}", name(c.source()), name(c.target())),
                            c.to_rows(),
                        )
                    })
                    .collect(),
            })
            .collect(),
        manual_values: doc.manual_values.as_ref().map(|t| {
            fw.descriptors()
                .iter()
                .zip(t.rows())
                .map(|(d, row)| {
                    (
                        d.name.clone(),
                        d.states.iter().cloned().zip(row.iter().copied()).collect(),
                    )
                })
                .collect()
        }),
        split: doc.split.as_ref().map(|s| {
            s.subsets()
                .iter()
                .map(|sub| sub.iter().map(|&k| name(k)).collect())
                .collect()
        }),
    };
    serde_json::to_string_pretty(&raw).expect("model serializes")
}

/// `num/den` as a decimal with `precision` digits, rounded half up.
pub fn format_ratio(num: u64, den: u64, precision: usize) -> String {
    let precision = precision.min(MAX_PRECISION);
    let scale = 10u128.pow(precision as u32);
    let scaled = num as u128 * scale;
    let (den, mut q) = (den as u128, scaled / den as u128);
    if 2 * (scaled % den) >= den {
        q += 1;
    }
    if precision == 0 {
        return q.to_string();
    }
    format!("{}.{:0width$}", q / scale, q % scale, width = precision)
}

pub fn format_weight(weight: Weight, precision: usize) -> String {
    format_ratio(*weight.numer(), *weight.denom(), precision)
}

/// CSV rows `scenario,rank,weight_num,weight_den,weight_decimal`: consistent
/// scenarios by descending weight then ascending rank, then one
/// `cycle:<a>><b>...` row per cyclic attractor and a final `cycle_mass` row.
pub fn write_weight_table(table: &WeightTable, precision: usize) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let mut row = |scenario: &str, rank: &str, weight: Weight| {
        w.write_record([
            scenario,
            rank,
            &weight.numer().to_string(),
            &weight.denom().to_string(),
            &format_weight(weight, precision),
        ])
        .expect("writing to memory");
    };
    let mut entries: Vec<_> = table.entries.iter().collect();
    entries.sort_by(|a, b| b.weight.cmp(&a.weight).then(a.rank.cmp(&b.rank)));
    let header = [
        "scenario",
        "rank",
        "weight_num",
        "weight_den",
        "weight_decimal",
    ];
    let mut out = header.join(",");
    out.push('\n');
    for e in entries {
        row(&e.scenario.to_string(), &e.rank.to_string(), e.weight);
    }
    for c in &table.cycles {
        row(
            &format!("cycle:{}", c.attractor()),
            &c.ranks[0].to_string(),
            c.weight,
        );
    }
    row("cycle_mass", "", table.cycle_mass);
    let body = w.into_inner().expect("in-memory writer");
    out.push_str(&String::from_utf8(body).expect("utf-8 csv"));
    out
}

fn optional(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

/// Markdown-flavoured chain report: one section per timespan with the chosen
/// scenario, the weights used, tie information and the full weight table.
pub fn render_chain_report(chain: &ScenarioChain, precision: usize) -> String {
    let fw = &chain.framework;
    let compound = chain.weighting == Weighting::Compound;
    let mut out = String::new();
    let _ = writeln!(out, "# Scenario chain");
    let _ = writeln!(out);
    let _ = writeln!(out, "rule: {}", chain.rule);
    let _ = writeln!(out, "weighting: {}", chain.weighting);
    let path: Vec<String> = chain.links.iter().map(|l| l.scenario.to_string()).collect();
    let _ = writeln!(out, "chain: {}", path.join(" -> "));
    for (n, link) in chain.links.iter().enumerate() {
        let _ = writeln!(out);
        let _ = writeln!(out, "## {}. {}", n + 1, link.label);
        let _ = writeln!(out);
        let _ = writeln!(out, "chosen: {} (rank {})", link.scenario, link.rank);
        let _ = writeln!(out, "states: {}", fw.describe(&link.scenario));
        let _ = writeln!(
            out,
            "scenario weight: {} ({})",
            link.weight,
            format_weight(link.weight, precision)
        );
        if compound {
            let _ = writeln!(out, "manual weight: {}", optional(link.manual));
            let _ = writeln!(out, "compound weight: {}", optional(link.compound));
        }
        if link.tie {
            let tied: Vec<String> = link.tied.iter().map(ToString::to_string).collect();
            let _ = writeln!(
                out,
                "tie: yes, {} scenarios share the maximum: {}",
                link.tied.len(),
                tied.join(", ")
            );
        } else {
            let _ = writeln!(out, "tie: no");
        }
        if link.nonpositive_compound {
            let _ = writeln!(out, "warning: no candidate has a positive compound weight");
        }
        if link.table.argmax_tie {
            let _ = writeln!(
                out,
                "note: argmax ties were broken towards the smallest state"
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "| scenario | rank | weight | decimal | manual | compound |"
        );
        let _ = writeln!(out, "|---|---|---|---|---|---|");
        let mut rows: Vec<_> = link.candidates.iter().collect();
        rows.sort_by(|a, b| b.weight.cmp(&a.weight).then(a.rank.cmp(&b.rank)));
        for c in rows {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} |",
                c.scenario,
                c.rank,
                c.weight,
                format_weight(c.weight, precision),
                optional(c.manual),
                optional(c.compound)
            );
        }
        for e in link
            .table
            .entries
            .iter()
            .filter(|e| !link.candidates.iter().any(|c| c.rank == e.rank))
        {
            let _ = writeln!(
                out,
                "| {} (filtered) | {} | {} | {} | - | - |",
                e.scenario,
                e.rank,
                e.weight,
                format_weight(e.weight, precision)
            );
        }
        for c in &link.table.cycles {
            let _ = writeln!(
                out,
                "| cycle:{} | {} | {} | {} | - | - |",
                c.attractor(),
                c.ranks[0],
                c.weight,
                format_weight(c.weight, precision)
            );
        }
        let _ = writeln!(
            out,
            "| cycle_mass | - | {} | {} | - | - |",
            link.table.cycle_mass,
            format_weight(link.table.cycle_mass, precision)
        );
    }
    out
}

/// Plain list of scenarios with state names.
pub fn render_scenarios(framework: &Framework, scenarios: &[Scenario]) -> String {
    let mut out = String::new();
    for s in scenarios {
        let _ = writeln!(out, "{s}  {}", framework.describe(s));
    }
    out
}

pub fn render_aggregation_report(
    framework: &Framework,
    report: &AggregationReport,
    verified: bool,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "combinatorials: {}", report.combinatorials);
    let _ = writeln!(out, "refused (transitional conflict): {}", report.conflicts);
    let _ = writeln!(out, "aggregated scenarios: {}", report.aggregated.len());
    out.push_str(&render_scenarios(framework, &report.aggregated));
    if verified {
        let _ = writeln!(out);
        let _ = writeln!(out, "## verification");
        let _ = writeln!(
            out,
            "consistent in full system: {}",
            report.consistent.len()
        );
        let _ = writeln!(out, "matched: {}", report.matched);
        let _ = writeln!(
            out,
            "unsound (aggregated but inconsistent): {}",
            report.unsound.len()
        );
        out.push_str(&render_scenarios(framework, &report.unsound));
        let _ = writeln!(
            out,
            "missing (consistent but not aggregated): {}",
            report.missing.len()
        );
        out.push_str(&render_scenarios(framework, &report.missing));
    }
    out
}
