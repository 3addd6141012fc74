//! Test support: an independent brute-force model of the analysis and seeded
//! generators for random instances.
//!
//! The oracle works on plain nested vectors and 1-based state tuples. It
//! shares no code with the library beyond reading the generated judgements,
//! so agreement between the two is evidence rather than tautology.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use cib::io::ModelDocument;
use cib::multilevel::SubsystemSplit;
use cib::timechain::{ManualValueTable, TimeSeriesModel, Timespan};
use cib::{CrossImpactMatrix, Descriptor, Framework, Scenario, SuccessionRule};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Judgements as `cells[i][j][a][b]`, `None` for an absent cell. States are
/// 0-based inside the arrays and 1-based in scenario tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub counts: Vec<usize>,
    pub cells: Vec<Vec<Option<Vec<Vec<i32>>>>>,
}

pub type Tuple = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum End {
    Fixed(Tuple),
    Cycle(Vec<Tuple>),
}

/// Basin counts per attractor over all starts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Basins {
    pub total: u64,
    pub fixed: BTreeMap<Tuple, u64>,
    pub cycles: BTreeMap<Vec<Tuple>, u64>,
}

impl Dense {
    pub fn zero(counts: &[usize]) -> Self {
        let n = counts.len();
        Dense {
            counts: counts.to_vec(),
            cells: vec![vec![None; n]; n],
        }
    }

    pub fn n(&self) -> usize {
        self.counts.len()
    }

    pub fn set(&mut self, i: usize, j: usize, rows: Vec<Vec<i32>>) {
        self.cells[i][j] = Some(rows);
    }

    pub fn to_cim(&self) -> CrossImpactMatrix {
        let fw = Framework::from_counts(&self.counts).expect("valid counts");
        let mut cim = CrossImpactMatrix::new(fw);
        for i in 0..self.n() {
            for j in 0..self.n() {
                if let Some(rows) = &self.cells[i][j] {
                    cim.set_cell(i, j, rows.clone())
                        .expect("generated cell is valid");
                }
            }
        }
        cim
    }

    fn d(&self, i: usize, a: usize, j: usize, b: usize) -> i64 {
        self.cells[i][j]
            .as_ref()
            .map_or(0, |m| m[a - 1][b - 1] as i64)
    }

    /// Every tuple in lexicographic order, built by nested loops.
    pub fn scenarios(&self) -> Vec<Tuple> {
        let mut out = vec![vec![]];
        for &s in &self.counts {
            out = out
                .into_iter()
                .flat_map(|prefix: Tuple| {
                    (1..=s).map(move |x| {
                        let mut t = prefix.clone();
                        t.push(x);
                        t
                    })
                })
                .collect();
        }
        out
    }

    pub fn balances(&self, z: &[usize], j: usize) -> Vec<i64> {
        (1..=self.counts[j])
            .map(|b| {
                (0..self.n())
                    .filter(|&i| i != j)
                    .map(|i| self.d(i, z[i], j, b))
                    .sum()
            })
            .collect()
    }

    pub fn gap(&self, z: &[usize], j: usize) -> i64 {
        let ib = self.balances(z, j);
        ib.iter().max().unwrap() - ib[z[j] - 1]
    }

    pub fn consistent(&self, z: &[usize], tolerance: i64) -> bool {
        (0..self.n()).all(|j| self.gap(z, j) <= tolerance)
    }

    pub fn consistent_set(&self, tolerance: i64) -> Vec<Tuple> {
        self.scenarios()
            .into_iter()
            .filter(|z| self.consistent(z, tolerance))
            .collect()
    }

    /// First state (1-based) reaching the maximal balance.
    pub fn best(&self, z: &[usize], j: usize) -> usize {
        let ib = self.balances(z, j);
        let max = *ib.iter().max().unwrap();
        ib.iter().position(|&v| v == max).unwrap() + 1
    }

    pub fn has_best_tie(&self, z: &[usize], j: usize) -> bool {
        let ib = self.balances(z, j);
        let max = *ib.iter().max().unwrap();
        ib.iter().filter(|&&v| v == max).count() > 1
    }

    pub fn step(&self, z: &[usize], rule: SuccessionRule) -> Tuple {
        let bad: Vec<usize> = (0..self.n()).filter(|&j| self.gap(z, j) > 0).collect();
        let mut next = z.to_vec();
        match rule {
            SuccessionRule::Global => {
                for &j in &bad {
                    next[j] = self.best(z, j);
                }
            }
            SuccessionRule::Incremental => {
                for &j in &bad {
                    let target = self.best(z, j);
                    next[j] = if target > z[j] { z[j] + 1 } else { z[j] - 1 };
                }
            }
            SuccessionRule::Local => {
                let mut pick: Option<usize> = None;
                for &j in &bad {
                    if pick.is_none_or(|p| self.gap(z, j) > self.gap(z, p)) {
                        pick = Some(j);
                    }
                }
                if let Some(j) = pick {
                    next[j] = self.best(z, j);
                }
            }
            SuccessionRule::Adiabatic => {
                if let Some(&j) = bad.first() {
                    next[j] = self.best(z, j);
                }
            }
        }
        next
    }

    /// Walks from `start` keeping the full history; cycles are rotated to
    /// start at their lexicographically smallest tuple.
    pub fn walk(&self, start: &[usize], rule: SuccessionRule) -> (Vec<Tuple>, End) {
        let mut history: Vec<Tuple> = vec![start.to_vec()];
        loop {
            let next = self.step(history.last().unwrap(), rule);
            if let Some(at) = history.iter().position(|h| *h == next) {
                let mut cycle = history[at..].to_vec();
                if cycle.len() == 1 {
                    return (history, End::Fixed(next));
                }
                let lead = (0..cycle.len())
                    .min_by(|&a, &b| cycle[a].cmp(&cycle[b]))
                    .unwrap();
                cycle.rotate_left(lead);
                return (history, End::Cycle(cycle));
            }
            history.push(next);
        }
    }

    pub fn basins(&self, rule: SuccessionRule) -> Basins {
        let mut out = Basins::default();
        for z in self.scenarios() {
            out.total += 1;
            match self.walk(&z, rule).1 {
                End::Fixed(f) => *out.fixed.entry(f).or_default() += 1,
                End::Cycle(c) => *out.cycles.entry(c).or_default() += 1,
            }
        }
        out
    }

    /// True when any trajectory under `rule` moves a descriptor whose best
    /// state is not unique.
    pub fn meets_best_tie(&self, rule: SuccessionRule) -> bool {
        self.scenarios().iter().any(|z| {
            let next = self.step(z, rule);
            (0..self.n()).any(|j| next[j] != z[j] && self.has_best_tie(z, j))
        })
    }

    /// Relabels the states of descriptor `k` so old state `a` becomes
    /// `perm[a-1]`.
    pub fn relabel(&self, k: usize, perm: &[usize]) -> Dense {
        let mut out = self.clone();
        for i in 0..self.n() {
            for j in 0..self.n() {
                let Some(m) = &self.cells[i][j] else { continue };
                let mut p = m.clone();
                for a in 0..m.len() {
                    for b in 0..m[a].len() {
                        let a2 = if i == k { perm[a] - 1 } else { a };
                        let b2 = if j == k { perm[b] - 1 } else { b };
                        p[a2][b2] = m[a][b];
                    }
                }
                out.cells[i][j] = Some(p);
            }
        }
        out
    }
}

pub fn tuple(s: &Scenario) -> Tuple {
    s.states().to_vec()
}

pub fn scenario(t: &[usize]) -> Scenario {
    Scenario::new(t.to_vec())
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, range: i32) -> Vec<Vec<i32>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-range..=range)).collect())
        .collect()
}

/// `n` descriptors with `1..=max_s` states; each off-diagonal cell present
/// with probability `density`, entries uniform in `[-3, 3]`.
pub fn random_dense(rng: &mut ChaCha8Rng, n: usize, max_s: usize, density: f64) -> Dense {
    let counts: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=max_s)).collect();
    let mut d = Dense::zero(&counts);
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen_bool(density) {
                d.set(i, j, random_matrix(rng, counts[i], counts[j], 3));
            }
        }
    }
    d
}

/// A split whose subsets pairwise share at most one descriptor, together
/// with a CIM that is nonzero only inside subsets.
pub fn random_split_instance(
    rng: &mut ChaCha8Rng,
    max_n: usize,
    max_s: usize,
) -> (Dense, SubsystemSplit) {
    let n = rng.gen_range(3..=max_n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    // Grow a hypertree: each new subset attaches to exactly one descriptor
    // already placed, so two subsets meet in at most that descriptor.
    let first = rng.gen_range(2..n);
    let mut subsets = vec![order[..first].to_vec()];
    let mut placed = first;
    while placed < n {
        let anchor = *subsets.choose(rng).unwrap().choose(rng).unwrap();
        let take = rng.gen_range(1..=(n - placed).min(3));
        let mut sub = vec![anchor];
        sub.extend_from_slice(&order[placed..placed + take]);
        placed += take;
        subsets.push(sub);
    }

    let counts: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=max_s)).collect();
    let mut d = Dense::zero(&counts);
    let density = rng.gen_range(0.3..=1.0);
    for i in 0..n {
        for j in 0..n {
            let shared = subsets.iter().any(|s| s.contains(&i) && s.contains(&j));
            if i != j && shared && rng.gen_bool(density) {
                d.set(i, j, random_matrix(rng, counts[i], counts[j], 3));
            }
        }
    }
    (d, SubsystemSplit::new(subsets))
}

fn random_name(rng: &mut ChaCha8Rng, used: &mut BTreeSet<String>) -> String {
    const PIECES: [&str; 11] = [
        "a", "Zeta", "ß", "energy", " ", "-", "_", "7", "\"q\"", "\\", "ö",
    ];
    loop {
        let len = rng.gen_range(1..=4);
        let name: String = (0..len).map(|_| *PIECES.choose(rng).unwrap()).collect();
        if used.insert(name.clone()) {
            return name;
        }
    }
}

/// A random well-formed document: names with awkward characters, several
/// timespans, optional manual values, split and impact range.
pub fn random_document(rng: &mut ChaCha8Rng) -> ModelDocument {
    let n = rng.gen_range(2..=4);
    let mut names = BTreeSet::new();
    let descriptors: Vec<Descriptor> = (0..n)
        .map(|_| {
            let name = random_name(rng, &mut names);
            let mut states = BTreeSet::new();
            let s = rng.gen_range(1..=3);
            let states: Vec<String> = (0..s).map(|_| random_name(rng, &mut states)).collect();
            Descriptor::new(name, states)
        })
        .collect();
    let framework = Framework::new(descriptors).expect("unique names");
    let counts = framework.state_counts().to_vec();

    let impact_range = if rng.gen_bool(0.5) {
        Some(rng.gen_range(1..=5u32))
    } else {
        None
    };
    let range = impact_range.map_or(cib::DEFAULT_IMPACT_RANGE, |r| r as i32);
    let mut model = TimeSeriesModel::new(framework.clone());
    for t in 0..rng.gen_range(1..=3) {
        let mut cim = CrossImpactMatrix::new(framework.clone()).with_impact_range(range);
        for i in 0..n {
            for j in 0..n {
                if i != j && rng.gen_bool(0.6) {
                    cim.set_cell(i, j, random_matrix(rng, counts[i], counts[j], range))
                        .unwrap();
                }
            }
        }
        model.timespans.push(Timespan {
            label: format!("t{t}"),
            cim,
        });
    }

    let manual_values = rng.gen_bool(0.5).then(|| {
        let rows = counts
            .iter()
            .map(|&s| (0..s).map(|_| rng.gen_range(-1.0e3..1.0e3)).collect())
            .collect();
        ManualValueTable::new(&framework, rows).unwrap()
    });
    let split = rng.gen_bool(0.5).then(|| {
        let x = rng.gen_range(1..=3);
        SubsystemSplit::new(
            (0..x)
                .map(|_| {
                    (0..rng.gen_range(1..=n))
                        .map(|_| rng.gen_range(0..n))
                        .collect()
                })
                .collect(),
        )
    });
    ModelDocument {
        model,
        impact_range,
        manual_values,
        split,
    }
}

/// Schema field names that may appear as object keys in a document.
pub const FIELD_NAMES: [&str; 10] = [
    "framework",
    "descriptors",
    "name",
    "states",
    "impact_range",
    "timespans",
    "label",
    "cells",
    "manual_values",
    "split",
];

/// Every document obtained by replacing one character of one field-name key
/// with `replacement`.
pub fn field_corruptions(json: &str, replacement: char) -> Vec<String> {
    let mut out = Vec::new();
    for field in FIELD_NAMES {
        let key = format!("\"{field}\":");
        let Some(at) = json.find(&key) else { continue };
        for (offset, c) in field.char_indices() {
            if c == replacement {
                continue;
            }
            let mut text = json.to_string();
            let pos = at + 1 + offset;
            text.replace_range(pos..pos + 1, &replacement.to_string());
            out.push(text);
        }
    }
    out
}
