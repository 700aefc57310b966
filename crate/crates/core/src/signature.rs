//! Fidelity signatures: the fidelities between every enumerated pair of
//! equal-size subsystems of a pure state.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fidelity::{self, Convention};
use crate::limits;
use crate::state::{DensityMatrix, SpinState, SubsystemSpec};

pub const DEFAULT_TUPLE_CAP: usize = 20_000;

/// Below this many items, work is done on the calling thread.
const PARALLEL_THRESHOLD: usize = 32;

/// Upper bound on any single value, allowing for roundoff.
pub const VALUE_SLACK: f64 = 1e-12;

/// How subsystem pairs are chosen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PairMode {
    /// All pairs of distinct single spins.
    Single,
    /// Unordered pairs of distinct sorted `k`-subsets.
    Subsets { k: usize },
    /// Unordered pairs of distinct ordered `k`-tuples; refuses to enumerate
    /// more than `cap` pairs.
    Tuples { k: usize, cap: usize },
    /// A caller-supplied list.
    Explicit { pairs: Vec<(SubsystemSpec, SubsystemSpec)> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairFamily {
    #[serde(flatten)]
    pub mode: PairMode,
    pub overlap_allowed: bool,
}

impl Default for PairFamily {
    fn default() -> Self {
        Self::single_spin()
    }
}

impl PairFamily {
    pub fn single_spin() -> Self {
        Self {
            mode: PairMode::Single,
            overlap_allowed: true,
        }
    }

    pub fn subsets(k: usize, overlap_allowed: bool) -> Self {
        Self {
            mode: PairMode::Subsets { k },
            overlap_allowed,
        }
    }

    pub fn tuples(k: usize, overlap_allowed: bool) -> Self {
        Self::tuples_capped(k, DEFAULT_TUPLE_CAP, overlap_allowed)
    }

    pub fn tuples_capped(k: usize, cap: usize, overlap_allowed: bool) -> Self {
        Self {
            mode: PairMode::Tuples { k, cap },
            overlap_allowed,
        }
    }

    pub fn explicit(pairs: Vec<(SubsystemSpec, SubsystemSpec)>, overlap_allowed: bool) -> Self {
        Self {
            mode: PairMode::Explicit { pairs },
            overlap_allowed,
        }
    }

    /// Short human-readable name, e.g. `tuples(k=2)`.
    pub fn label(&self) -> String {
        match &self.mode {
            PairMode::Single => "single".to_string(),
            PairMode::Subsets { k } => format!("subsets(k={k})"),
            PairMode::Tuples { k, .. } => format!("tuples(k={k})"),
            PairMode::Explicit { pairs } => format!("explicit({} pairs)", pairs.len()),
        }
    }

    pub fn validate(&self, num_spins: usize) -> Result<()> {
        let check_k = |k: usize| {
            if k == 0 || k > num_spins {
                Err(Error::InvalidInput(format!(
                    "subsystem size {k} must be in 1..={num_spins}"
                )))
            } else {
                Ok(())
            }
        };
        match &self.mode {
            PairMode::Single => Ok(()),
            PairMode::Subsets { k } => check_k(*k),
            PairMode::Tuples { k, cap } => {
                check_k(*k)?;
                if *cap == 0 {
                    return Err(Error::InvalidInput("tuple enumeration cap must be >= 1".into()));
                }
                Ok(())
            }
            PairMode::Explicit { pairs } => {
                for (a, b) in pairs {
                    if a.len() != b.len() {
                        return Err(Error::InvalidInput(format!(
                            "pair {a} / {b} has unequal sizes"
                        )));
                    }
                    a.check_within(num_spins)?;
                    b.check_within(num_spins)?;
                }
                Ok(())
            }
        }
    }
}

/// Canonical pair key with `a <= b` lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PairKey {
    pub a: SubsystemSpec,
    pub b: SubsystemSpec,
}

impl PairKey {
    pub fn new(x: SubsystemSpec, y: SubsystemSpec) -> Self {
        if x <= y {
            Self { a: x, b: y }
        } else {
            Self { a: y, b: x }
        }
    }

    /// Key obtained by relabeling every spin through `perm`.
    pub fn relabeled(&self, perm: &[usize]) -> PairKey {
        PairKey::new(self.a.relabeled(perm), self.b.relabeled(perm))
    }
}

impl std::fmt::Display for PairKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} / {}", self.a, self.b)
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

fn arrangements(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 1..=n {
            if !cur.contains(&i) {
                cur.push(i);
                rec(n, k, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

fn falling(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n.saturating_sub(i)))
}

/// Number of pairs an ordered-tuple family would enumerate.
pub fn tuple_pair_count(num_spins: usize, k: usize, overlap_allowed: bool) -> u128 {
    let n = num_spins as u128;
    let k = k as u128;
    let tuples = falling(n, k);
    if overlap_allowed {
        tuples.saturating_mul(tuples.saturating_sub(1)) / 2
    } else {
        tuples.saturating_mul(falling(n.saturating_sub(k), k)) / 2
    }
}

fn pairs_from_list(items: Vec<Vec<usize>>, overlap_allowed: bool) -> Result<Vec<PairKey>> {
    let specs = items
        .into_iter()
        .map(SubsystemSpec::new)
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for i in 0..specs.len() {
        for j in (i + 1)..specs.len() {
            if !overlap_allowed && specs[i].overlaps(&specs[j]) {
                continue;
            }
            out.push(PairKey::new(specs[i].clone(), specs[j].clone()));
        }
    }
    out.sort();
    Ok(out)
}

/// Deterministic, duplicate-free list of canonical pairs for `family`.
pub fn enumerate_pairs(num_spins: usize, family: &PairFamily) -> Result<Vec<PairKey>> {
    limits::check_spins(num_spins)?;
    family.validate(num_spins)?;
    match &family.mode {
        PairMode::Single => pairs_from_list((1..=num_spins).map(|i| vec![i]).collect(), true),
        PairMode::Subsets { k } => pairs_from_list(combinations(num_spins, *k), family.overlap_allowed),
        PairMode::Tuples { k, cap } => {
            let count = tuple_pair_count(num_spins, *k, family.overlap_allowed);
            if count > *cap as u128 {
                return Err(Error::EnumerationTooLarge { count, cap: *cap });
            }
            pairs_from_list(arrangements(num_spins, *k), family.overlap_allowed)
        }
        PairMode::Explicit { pairs } => {
            let set: BTreeSet<PairKey> = pairs
                .iter()
                .filter(|(a, b)| a != b)
                .filter(|(a, b)| family.overlap_allowed || !a.overlaps(b))
                .map(|(a, b)| PairKey::new(a.clone(), b.clone()))
                .collect();
            Ok(set.into_iter().collect())
        }
    }
}

/// Fidelities for every pair of a family, in one convention.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelitySignature {
    num_spins: usize,
    convention: Convention,
    family: PairFamily,
    entries: BTreeMap<PairKey, f64>,
}

#[derive(Serialize, Deserialize)]
struct EntryDoc {
    a: SubsystemSpec,
    b: SubsystemSpec,
    value: f64,
}

#[derive(Serialize, Deserialize)]
struct SignatureDoc {
    num_spins: usize,
    convention: Convention,
    family: PairFamily,
    entries: Vec<EntryDoc>,
}

impl FidelitySignature {
    pub fn num_spins(&self) -> usize {
        self.num_spins
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn family(&self) -> &PairFamily {
        &self.family
    }

    pub fn entries(&self) -> &BTreeMap<PairKey, f64> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, a: &SubsystemSpec, b: &SubsystemSpec) -> Option<f64> {
        self.entries.get(&PairKey::new(a.clone(), b.clone())).copied()
    }

    /// Same signature expressed in another convention.
    pub fn converted(&self, convention: Convention) -> FidelitySignature {
        if convention == self.convention {
            return self.clone();
        }
        let entries = self
            .entries
            .iter()
            .map(|(k, &v)| {
                let sqrt = match self.convention {
                    Convention::Sqrt => v,
                    Convention::Squared => v.max(0.0).sqrt(),
                };
                (k.clone(), convention.from_sqrt(sqrt))
            })
            .collect();
        FidelitySignature {
            num_spins: self.num_spins,
            convention,
            family: self.family.clone(),
            entries,
        }
    }

    pub fn to_json(&self) -> String {
        let doc = SignatureDoc {
            num_spins: self.num_spins,
            convention: self.convention,
            family: self.family.clone(),
            entries: self
                .entries
                .iter()
                .map(|(k, &value)| EntryDoc {
                    a: k.a.clone(),
                    b: k.b.clone(),
                    value,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("signature serializes")
    }

    pub fn from_json(text: &str) -> Result<FidelitySignature> {
        let doc: SignatureDoc =
            serde_json::from_str(text).map_err(|e| Error::MalformedDocument(e.to_string()))?;
        limits::check_storage(doc.num_spins)?;
        doc.family.validate(doc.num_spins)?;
        let mut entries = BTreeMap::new();
        for e in doc.entries {
            if e.a.len() != e.b.len() {
                return Err(Error::MalformedDocument(format!(
                    "entry {} / {} has unequal sizes",
                    e.a, e.b
                )));
            }
            e.a.check_within(doc.num_spins)?;
            e.b.check_within(doc.num_spins)?;
            if !(e.value >= 0.0 && e.value <= 1.0 + VALUE_SLACK) {
                return Err(Error::MalformedDocument(format!(
                    "value {} out of [0, 1]",
                    e.value
                )));
            }
            entries.insert(PairKey::new(e.a, e.b), e.value);
        }
        Ok(FidelitySignature {
            num_spins: doc.num_spins,
            convention: doc.convention,
            family: doc.family,
            entries,
        })
    }
}

/// Reduces `state` onto every distinct subsystem appearing in `pairs`.
pub(crate) fn reduce_all(
    state: &SpinState,
    pairs: &[PairKey],
) -> Result<BTreeMap<SubsystemSpec, DensityMatrix>> {
    let specs: BTreeSet<&SubsystemSpec> = pairs.iter().flat_map(|k| [&k.a, &k.b]).collect();
    let specs: Vec<&SubsystemSpec> = specs.into_iter().collect();
    let reduce = |s: &&SubsystemSpec| state.reduce(s).map(|r| ((*s).clone(), r));
    let reduced = if specs.len() < PARALLEL_THRESHOLD {
        specs.iter().map(reduce).collect::<Result<Vec<_>>>()?
    } else {
        specs.par_iter().map(reduce).collect::<Result<Vec<_>>>()?
    };
    Ok(reduced.into_iter().collect())
}

/// Signature of `state` over `family`.
pub fn signature(state: &SpinState, family: &PairFamily, convention: Convention) -> Result<FidelitySignature> {
    let pairs = enumerate_pairs(state.num_spins(), family)?;
    signature_over(state, &pairs, family.clone(), convention)
}

pub(crate) fn signature_over(
    state: &SpinState,
    pairs: &[PairKey],
    family: PairFamily,
    convention: Convention,
) -> Result<FidelitySignature> {
    let reduced = reduce_all(state, pairs)?;
    let value = |k: &PairKey| fidelity::fidelity_in(&reduced[&k.a], &reduced[&k.b], convention);
    let values = if pairs.len() < PARALLEL_THRESHOLD {
        pairs.iter().map(value).collect::<Result<Vec<f64>>>()?
    } else {
        pairs.par_iter().map(value).collect::<Result<Vec<f64>>>()?
    };
    Ok(FidelitySignature {
        num_spins: state.num_spins(),
        convention,
        family,
        entries: pairs.iter().cloned().zip(values).collect(),
    })
}

/// Per-key comparison of two signatures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignatureDiff {
    pub max_abs_diff: f64,
    pub entries: Vec<DiffEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffEntry {
    pub a: SubsystemSpec,
    pub b: SubsystemSpec,
    pub first: f64,
    pub second: f64,
    pub abs_diff: f64,
}

pub fn signature_diff(first: &FidelitySignature, second: &FidelitySignature) -> Result<SignatureDiff> {
    if first.num_spins != second.num_spins {
        return Err(Error::IncomparableSignatures(format!(
            "{} vs {} spins",
            first.num_spins, second.num_spins
        )));
    }
    if first.convention != second.convention {
        return Err(Error::IncomparableSignatures(format!(
            "convention {} vs {}",
            first.convention.name(),
            second.convention.name()
        )));
    }
    if first.family != second.family {
        return Err(Error::IncomparableSignatures("pair families differ".into()));
    }
    let mut entries = Vec::with_capacity(first.entries.len());
    let mut max_abs_diff: f64 = 0.0;
    for (k, &v1) in &first.entries {
        let v2 = *second.entries.get(k).ok_or_else(|| {
            Error::IncomparableSignatures(format!("pair {k} missing from second signature"))
        })?;
        let d = (v1 - v2).abs();
        max_abs_diff = max_abs_diff.max(d);
        entries.push(DiffEntry {
            a: k.a.clone(),
            b: k.b.clone(),
            first: v1,
            second: v2,
            abs_diff: d,
        });
    }
    if second.entries.len() != first.entries.len() {
        return Err(Error::IncomparableSignatures("pair sets differ".into()));
    }
    Ok(SignatureDiff {
        max_abs_diff,
        entries,
    })
}

/// Maximum absolute per-key difference.
pub fn signature_distance(first: &FidelitySignature, second: &FidelitySignature) -> Result<f64> {
    signature_diff(first, second).map(|d| d.max_abs_diff)
}

pub fn signatures_equal(first: &FidelitySignature, second: &FidelitySignature, tol: f64) -> Result<bool> {
    signature_distance(first, second).map(|d| d <= tol)
}
