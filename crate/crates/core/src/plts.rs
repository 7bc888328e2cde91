//! Finite probabilistic labeled transition systems.
//!
//! File format, one declaration per line, `#` starts a comment:
//!
//! ```text
//! states: p z
//! labels: a
//! trans p a { p: 1/2, z: 1/2 }
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::formula::Label;

/// Tolerance on the total mass of a distribution.
pub const MASS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PltsError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid model: {0}")]
    Invalid(String),
}

/// A probability as written in the input: a decimal or an exact ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weight {
    Decimal(f64),
    Ratio(u64, u64),
}

impl Weight {
    pub fn value(self) -> f64 {
        match self {
            Weight::Decimal(x) => x,
            Weight::Ratio(n, d) => n as f64 / d as f64,
        }
    }

    fn parse(text: &str) -> Option<Weight> {
        let text = text.trim();
        if let Some((n, d)) = text.split_once('/') {
            let n: u64 = n.trim().parse().ok()?;
            let d: u64 = d.trim().parse().ok()?;
            (d != 0).then_some(Weight::Ratio(n, d))
        } else {
            let x: f64 = text.parse().ok()?;
            x.is_finite().then_some(Weight::Decimal(x))
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Decimal(x) => write!(f, "{x}"),
            Weight::Ratio(n, d) => write!(f, "{n}/{d}"),
        }
    }
}

/// A finite-support distribution over state indices. Entries are sorted by
/// state and every weight is strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    entries: Vec<(usize, Weight)>,
}

impl Distribution {
    pub fn new(mut entries: Vec<(usize, Weight)>) -> Result<Self, String> {
        entries.sort_by_key(|&(q, _)| q);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err("state listed twice in one distribution".into());
        }
        if entries.is_empty() {
            return Err("empty distribution".into());
        }
        for &(_, w) in &entries {
            let x = w.value();
            if x <= 0.0 {
                return Err(format!("weight {w} is not strictly positive"));
            }
            if x > 1.0 + MASS_TOLERANCE {
                return Err(format!("weight {w} exceeds 1"));
            }
        }
        let total: f64 = entries.iter().map(|&(_, w)| w.value()).sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(format!("weights sum to {total}, not 1"));
        }
        Ok(Distribution { entries })
    }

    /// Point mass on `q`.
    pub fn dirac(q: usize) -> Self {
        Distribution {
            entries: vec![(q, Weight::Ratio(1, 1))],
        }
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|&(q, _)| q)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().map(|&(q, w)| (q, w.value()))
    }

    pub fn weights(&self) -> &[(usize, Weight)] {
        &self.entries
    }

    pub fn prob(&self, q: usize) -> f64 {
        self.entries
            .iter()
            .find(|&&(s, _)| s == q)
            .map_or(0.0, |&(_, w)| w.value())
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    /// `Σ d(q)·v(q)`, renormalised by the stored mass so that constant
    /// valuations are reproduced exactly.
    pub fn expectation(&self, v: &[f64]) -> f64 {
        let (mut num, mut mass) = (0.0, 0.0);
        for (q, p) in self.iter() {
            num += p * v[q];
            mass += p;
        }
        (num / mass).clamp(0.0, 1.0)
    }

    fn same_as(&self, other: &Distribution) -> bool {
        self.entries.len() == other.entries.len()
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.0 == b.0 && a.1.value() == b.1.value())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub source: usize,
    pub label: usize,
    pub dist: usize,
}

#[derive(Debug, Clone)]
pub struct Plts {
    states: Vec<String>,
    state_index: HashMap<String, usize>,
    labels: Vec<Label>,
    dists: Vec<Distribution>,
    transitions: Vec<Transition>,
    /// (state, label) → distribution ids, in declaration order.
    successors: HashMap<(usize, usize), Vec<usize>>,
}

impl Plts {
    pub fn builder(states: &[&str], labels: &[&str]) -> Result<PltsBuilder, PltsError> {
        PltsBuilder::new(
            states.iter().map(|s| s.to_string()).collect(),
            labels.iter().map(|s| s.to_string()).collect(),
        )
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, p: usize) -> &str {
        &self.states[p]
    }

    pub fn state(&self, name: &str) -> Option<usize> {
        self.state_index.get(name).copied()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label_index(&self, a: &Label) -> Option<usize> {
        self.labels.iter().position(|l| l == a)
    }

    pub fn distributions(&self) -> &[Distribution] {
        &self.dists
    }

    pub fn distribution(&self, d: usize) -> &Distribution {
        &self.dists[d]
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Distribution ids `d` with `p --a--> d`. Unknown labels have none.
    pub fn successors(&self, p: usize, a: &Label) -> &[usize] {
        match self.label_index(a) {
            Some(l) => self.successors_by_index(p, l),
            None => &[],
        }
    }

    pub fn successors_by_index(&self, p: usize, label: usize) -> &[usize] {
        self.successors
            .get(&(p, label))
            .map_or(&[][..], |v| v.as_slice())
    }

    /// True iff every distribution is a point mass.
    pub fn is_non_probabilistic(&self) -> bool {
        self.dists.iter().all(|d| d.support_len() == 1)
    }

    pub fn parse(text: &str) -> Result<Plts, PltsError> {
        let mut states: Option<Vec<String>> = None;
        let mut labels: Option<Vec<String>> = None;
        let mut builder: Option<PltsBuilder> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| PltsError::Parse { line: line_no, msg };
            if let Some(rest) = line.strip_prefix("states:") {
                if states.is_some() {
                    return Err(perr("duplicate `states:` line".into()));
                }
                states = Some(rest.split_whitespace().map(String::from).collect());
            } else if let Some(rest) = line.strip_prefix("labels:") {
                if labels.is_some() {
                    return Err(perr("duplicate `labels:` line".into()));
                }
                labels = Some(rest.split_whitespace().map(String::from).collect());
            } else if let Some(rest) = line.strip_prefix("trans") {
                if builder.is_none() {
                    let (Some(s), Some(l)) = (states.clone(), labels.clone()) else {
                        return Err(perr("`trans` before `states:` and `labels:`".into()));
                    };
                    builder = Some(PltsBuilder::new(s, l).map_err(|e| perr(e.to_string()))?);
                }
                let b = builder.as_mut().unwrap();
                let (head, body) = rest
                    .split_once('{')
                    .ok_or_else(|| perr("expected `{`".into()))?;
                let body = body
                    .trim()
                    .strip_suffix('}')
                    .ok_or_else(|| perr("expected `}` at end of line".into()))?;
                let head: Vec<&str> = head.split_whitespace().collect();
                let [source, label] = head[..] else {
                    return Err(perr("expected `trans <state> <label> { ... }`".into()));
                };
                let mut entries = Vec::new();
                for item in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let (q, w) = item
                        .split_once(':')
                        .ok_or_else(|| perr(format!("expected `state: weight`, found `{item}`")))?;
                    let w = Weight::parse(w)
                        .ok_or_else(|| perr(format!("bad probability `{}`", w.trim())))?;
                    entries.push((q.trim().to_string(), w));
                }
                b.transition(source, label, &entries)
                    .map_err(|e| perr(e.to_string()))?;
            } else {
                return Err(perr(format!("unrecognised line `{line}`")));
            }
        }
        match builder {
            Some(b) => Ok(b.build()),
            None => {
                let states = states.ok_or_else(|| PltsError::Invalid("missing `states:`".into()))?;
                let labels = labels.unwrap_or_default();
                Ok(PltsBuilder::new(states, labels)?.build())
            }
        }
    }

    /// Serialise in the file format. Ratios are written back as ratios.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "states: {}", self.states.join(" ")).unwrap();
        let labels: Vec<_> = self.labels.iter().map(|l| l.to_string()).collect();
        writeln!(out, "labels: {}", labels.join(" ")).unwrap();
        for t in &self.transitions {
            let body: Vec<String> = self.dists[t.dist]
                .weights()
                .iter()
                .map(|(q, w)| format!("{}: {}", self.states[*q], w))
                .collect();
            writeln!(
                out,
                "trans {} {} {{ {} }}",
                self.states[t.source],
                self.labels[t.label],
                body.join(", ")
            )
            .unwrap();
        }
        out
    }

    /// Same states, labels and transition relation, ignoring the numbering
    /// of distributions.
    pub fn same_model(&self, other: &Plts) -> bool {
        if self.states != other.states || self.labels != other.labels {
            return false;
        }
        let relation = |m: &Plts| {
            let mut rel: Vec<(usize, usize, Vec<(usize, f64)>)> = m
                .transitions
                .iter()
                .map(|t| (t.source, t.label, m.dists[t.dist].iter().collect()))
                .collect();
            rel.sort_by(|a, b| a.partial_cmp(b).unwrap());
            rel
        };
        relation(self) == relation(other)
    }

    /// A random model, deterministic in `seed`. Weights are small-integer
    /// ratios.
    pub fn random(
        seed: u64,
        n_states: usize,
        n_labels: usize,
        max_choices: usize,
        max_support: usize,
    ) -> Plts {
        let n_states = n_states.max(1);
        let n_labels = n_labels.max(1);
        let max_support = max_support.clamp(1, n_states);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let states: Vec<String> = (0..n_states).map(|i| format!("s{i}")).collect();
        let labels: Vec<String> = (0..n_labels).map(label_name).collect();
        let mut b = PltsBuilder::new(states.clone(), labels.clone()).expect("generated names are valid");
        for p in 0..n_states {
            for a in 0..n_labels {
                let choices = rng.gen_range(0..=max_choices);
                for _ in 0..choices {
                    let k = rng.gen_range(1..=max_support);
                    let support = rand::seq::index::sample(&mut rng, n_states, k).into_vec();
                    let raw: Vec<u64> = support.iter().map(|_| rng.gen_range(1..=4)).collect();
                    let total: u64 = raw.iter().sum();
                    let entries: Vec<(String, Weight)> = support
                        .iter()
                        .zip(&raw)
                        .map(|(&q, &w)| {
                            let g = gcd(w, total);
                            (states[q].clone(), Weight::Ratio(w / g, total / g))
                        })
                        .collect();
                    b.transition(&states[p], &labels[a], &entries)
                        .expect("generated distributions are valid");
                }
            }
        }
        b.build()
    }
}

fn label_name(i: usize) -> String {
    let letters = b"abcdefghijklmnopqrstuvwxyz";
    if i < letters.len() {
        (letters[i] as char).to_string()
    } else {
        format!("l{i}")
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for Plts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl std::str::FromStr for Plts {
    type Err = PltsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Plts::parse(s)
    }
}

/// Incremental construction with validation of every reference.
#[derive(Debug, Clone)]
pub struct PltsBuilder {
    plts: Plts,
    seen: BTreeMap<(usize, usize, usize), ()>,
}

impl PltsBuilder {
    pub fn new(states: Vec<String>, labels: Vec<String>) -> Result<Self, PltsError> {
        if states.is_empty() {
            return Err(PltsError::Invalid("a model needs at least one state".into()));
        }
        let mut state_index = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if s.is_empty() || !s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'') {
                return Err(PltsError::Invalid(format!("bad state name `{s}`")));
            }
            if state_index.insert(s.clone(), i).is_some() {
                return Err(PltsError::Invalid(format!("state `{s}` declared twice")));
            }
        }
        let mut lbls: Vec<Label> = Vec::new();
        for l in &labels {
            let label = Label::new(l).map_err(|_| PltsError::Invalid(format!("bad label `{l}`")))?;
            if lbls.contains(&label) {
                return Err(PltsError::Invalid(format!("label `{l}` declared twice")));
            }
            lbls.push(label);
        }
        Ok(PltsBuilder {
            plts: Plts {
                states,
                state_index,
                labels: lbls,
                dists: Vec::new(),
                transitions: Vec::new(),
                successors: HashMap::new(),
            },
            seen: BTreeMap::new(),
        })
    }

    /// Add `source --label--> {q: w, ...}`. Identical distributions share an
    /// id; repeating a transition is a no-op.
    pub fn transition(
        &mut self,
        source: &str,
        label: &str,
        entries: &[(String, Weight)],
    ) -> Result<&mut Self, PltsError> {
        let m = &mut self.plts;
        let p = m
            .state(source)
            .ok_or_else(|| PltsError::Invalid(format!("undeclared state `{source}`")))?;
        let a = m
            .labels
            .iter()
            .position(|l| l.as_str() == label)
            .ok_or_else(|| PltsError::Invalid(format!("undeclared label `{label}`")))?;
        let mut resolved = Vec::with_capacity(entries.len());
        for (q, w) in entries {
            let qi = m
                .state(q)
                .ok_or_else(|| PltsError::Invalid(format!("undeclared state `{q}`")))?;
            resolved.push((qi, *w));
        }
        let dist = Distribution::new(resolved)
            .map_err(|e| PltsError::Invalid(format!("transition {source} {label}: {e}")))?;
        let d = match m.dists.iter().position(|e| e.same_as(&dist)) {
            Some(d) => d,
            None => {
                m.dists.push(dist);
                m.dists.len() - 1
            }
        };
        if self.seen.insert((p, a, d), ()).is_none() {
            m.transitions.push(Transition { source: p, label: a, dist: d });
            m.successors.entry((p, a)).or_default().push(d);
        }
        Ok(self)
    }

    pub fn build(self) -> Plts {
        self.plts
    }
}
