//! Micro/macro superpositions, the basis relabeling that maps one onto the
//! other, the per-pair fidelity table, non-collectivity witnesses, and a
//! search for states with a prescribed signature.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fidelity::Convention;
use crate::limits;
use crate::linalg::C64;
use crate::optim::{multistart, NelderMeadConfig};
use crate::rng::{stream_rng, Stream};
use crate::signature::{
    enumerate_pairs, signature_distance, signature_over, FidelitySignature, PairFamily, PairKey,
};
use crate::state::{SpinState, SubsystemSpec};
use crate::symmetry::haar_random_state_with;
use crate::unitary::GlobalUnitary;

pub const AMPLITUDE_TOLERANCE: f64 = 1e-12;
pub const TABLE_TOLERANCE: f64 = 1e-10;
pub const WITNESS_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMicroMacro")]
pub struct MicroMacroConfig {
    pub m: usize,
    pub alpha: C64,
    pub beta: C64,
}

#[derive(Deserialize)]
struct RawMicroMacro {
    m: usize,
    alpha: C64,
    beta: C64,
}

impl TryFrom<RawMicroMacro> for MicroMacroConfig {
    type Error = Error;

    fn try_from(raw: RawMicroMacro) -> Result<Self> {
        MicroMacroConfig::new(raw.m, raw.alpha, raw.beta)
    }
}

impl MicroMacroConfig {
    pub fn new(m: usize, alpha: C64, beta: C64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidInput(format!("M = {m} must be at least 2")));
        }
        limits::check_spins(m)?;
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > AMPLITUDE_TOLERANCE {
            return Err(Error::NormViolation {
                norm: norm.sqrt(),
                tolerance: AMPLITUDE_TOLERANCE,
            });
        }
        Ok(Self { m, alpha, beta })
    }

    /// Real `α` with `β = √(1 − α²)`.
    pub fn real(m: usize, alpha: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidInput(format!("alpha {alpha} must lie in [-1, 1]")));
        }
        let beta = (1.0 - alpha * alpha).max(0.0).sqrt();
        Self::new(m, C64::new(alpha, 0.0), C64::new(beta, 0.0))
    }
}

fn two_term_state(n: usize, i: usize, a: C64, j: usize, b: C64) -> SpinState {
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    amps[i] += a;
    amps[j] += b;
    SpinState::new(n, amps).expect("validated amplitudes")
}

/// `α|0…00⟩ + β|0…01⟩`.
pub fn micro_state(cfg: &MicroMacroConfig) -> SpinState {
    two_term_state(cfg.m, 0, cfg.alpha, 1, cfg.beta)
}

/// `α|0…00⟩ + β|1…10⟩`.
pub fn macro_state(cfg: &MicroMacroConfig) -> SpinState {
    two_term_state(cfg.m, 0, cfg.alpha, (1 << cfg.m) - 2, cfg.beta)
}

/// Permutation complementing every basis string except `0…0` and `1…1`.
pub fn relabel_unitary(m: usize) -> Result<GlobalUnitary> {
    limits::check_spins(m)?;
    let all = (1usize << m) - 1;
    let image: Vec<usize> = (0..=all)
        .map(|s| if s == 0 || s == all { s } else { all ^ s })
        .collect();
    GlobalUnitary::from_permutation(m, &image)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableRow {
    /// Neither subsystem contains spin M.
    ExcludeM,
    /// Exactly one subsystem contains spin M.
    ExactlyOne,
    /// Both contain spin M, at different tuple positions.
    DifferentSites,
    /// Both contain spin M at the same tuple position.
    SameSite,
}

impl TableRow {
    pub const ALL: [TableRow; 4] = [
        TableRow::ExcludeM,
        TableRow::ExactlyOne,
        TableRow::DifferentSites,
        TableRow::SameSite,
    ];

    pub fn classify(a: &SubsystemSpec, b: &SubsystemSpec, m: usize) -> TableRow {
        match (a.position(m), b.position(m)) {
            (None, None) => TableRow::ExcludeM,
            (Some(_), None) | (None, Some(_)) => TableRow::ExactlyOne,
            (Some(x), Some(y)) if x == y => TableRow::SameSite,
            _ => TableRow::DifferentSites,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TableRow::ExcludeM => "exclude M",
            TableRow::ExactlyOne => "M in exactly one",
            TableRow::DifferentSites => "M at different sites",
            TableRow::SameSite => "M at same site",
        }
    }

    /// Value claimed for this row, stated in the squared convention.
    pub fn claimed_squared(self, alpha: C64) -> f64 {
        let a2 = alpha.norm_sqr();
        match self {
            TableRow::ExcludeM | TableRow::SameSite => 1.0,
            TableRow::ExactlyOne => a2,
            TableRow::DifferentSites => a2 * a2,
        }
    }

    /// Claimed value expressed in `convention`.
    pub fn expected(self, alpha: C64, convention: Convention) -> f64 {
        let sq = self.claimed_squared(alpha);
        match convention {
            Convention::Squared => sq,
            Convention::Sqrt => sq.sqrt(),
        }
    }
}

/// Whether the literal claimed value is reproduced when both states are
/// evaluated in each convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConventionMatch {
    pub sqrt: bool,
    pub squared: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub a: SubsystemSpec,
    pub b: SubsystemSpec,
    pub row: TableRow,
    pub value_phi: f64,
    pub value_phi_prime: f64,
    pub expected: f64,
    #[serde(rename = "match")]
    pub matches: bool,
    pub literal_value: f64,
    pub literal_match: ConventionMatch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowSummary {
    pub row: TableRow,
    pub pairs: usize,
    pub matched: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MicroMacroTable {
    pub config: MicroMacroConfig,
    pub convention: Convention,
    pub family: PairFamily,
    pub tolerance: f64,
    pub entries: Vec<TableEntry>,
    pub summary: Vec<RowSummary>,
}

impl MicroMacroTable {
    pub fn entry(&self, a: &SubsystemSpec, b: &SubsystemSpec) -> Option<&TableEntry> {
        let key = PairKey::new(a.clone(), b.clone());
        self.entries.iter().find(|e| e.a == key.a && e.b == key.b)
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &TableEntry> {
        self.entries.iter().filter(|e| !e.matches)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("family,a,b,row,value_phi,value_phi_prime,expected,match\n");
        let family = self.family.label();
        for e in &self.entries {
            out.push_str(&format!(
                "{},\"{}\",\"{}\",{},{:.16e},{:.16e},{:.16e},{}\n",
                family,
                e.a,
                e.b,
                e.row.label(),
                e.value_phi,
                e.value_phi_prime,
                e.expected,
                e.matches
            ));
        }
        out
    }
}

fn close(x: f64, y: f64) -> bool {
    (x - y).abs() <= TABLE_TOLERANCE
}

/// Evaluates both states on every pair of `family` and checks each value
/// against the claimed common value for its row.
pub fn micromacro_table(
    cfg: &MicroMacroConfig,
    family: &PairFamily,
    convention: Convention,
) -> Result<MicroMacroTable> {
    let pairs = enumerate_pairs(cfg.m, family)?;
    let phi = signature_over(&micro_state(cfg), &pairs, family.clone(), Convention::Sqrt)?;
    let phi_prime = signature_over(&macro_state(cfg), &pairs, family.clone(), Convention::Sqrt)?;
    let mut entries = Vec::with_capacity(pairs.len());
    for key in &pairs {
        let f = phi.get(&key.a, &key.b).expect("pair enumerated");
        let g = phi_prime.get(&key.a, &key.b).expect("pair enumerated");
        let row = TableRow::classify(&key.a, &key.b, cfg.m);
        let literal = row.claimed_squared(cfg.alpha);
        let value_phi = convention.from_sqrt(f);
        let value_phi_prime = convention.from_sqrt(g);
        let expected = row.expected(cfg.alpha, convention);
        entries.push(TableEntry {
            a: key.a.clone(),
            b: key.b.clone(),
            row,
            value_phi,
            value_phi_prime,
            expected,
            matches: close(value_phi, expected) && close(value_phi_prime, expected),
            literal_value: literal,
            literal_match: ConventionMatch {
                sqrt: close(f, literal) && close(g, literal),
                squared: close(f * f, literal) && close(g * g, literal),
            },
        });
    }
    let summary = TableRow::ALL
        .iter()
        .map(|&row| {
            let in_row = entries.iter().filter(|e| e.row == row);
            RowSummary {
                row,
                pairs: in_row.clone().count(),
                matched: in_row.filter(|e| e.matches).count(),
            }
        })
        .collect();
    Ok(MicroMacroTable {
        config: *cfg,
        convention,
        family: family.clone(),
        tolerance: TABLE_TOLERANCE,
        entries,
        summary,
    })
}

/// Structured candidates tried before random states, in a fixed order.
pub fn witness_library(n: usize) -> Result<Vec<(String, SpinState)>> {
    limits::check_spins(n)?;
    let dim = 1usize << n;
    let zero = C64::new(0.0, 0.0);
    let mut out = Vec::new();
    for s in 0..dim {
        let bits: Vec<u8> = (0..n).map(|i| ((s >> (n - 1 - i)) & 1) as u8).collect();
        let label: String = bits.iter().map(|b| char::from(b'0' + b)).collect();
        out.push((format!("basis |{label}>"), SpinState::basis(&bits)?));
    }
    out.push((
        "uniform".to_string(),
        SpinState::normalized(n, vec![C64::new(1.0, 0.0); dim])?,
    ));
    for spin in 1..=n {
        let mut amps = vec![zero; dim];
        amps[0] = C64::new(1.0, 0.0);
        amps[1 << (n - spin)] = C64::new(1.0, 0.0);
        out.push((
            format!("single excitation on spin {spin}"),
            SpinState::normalized(n, amps)?,
        ));
    }
    let mut ghz = vec![zero; dim];
    ghz[0] = C64::new(1.0, 0.0);
    ghz[dim - 1] = C64::new(1.0, 0.0);
    out.push(("GHZ".to_string(), SpinState::normalized(n, ghz)?));
    let mut w = vec![zero; dim];
    for spin in 1..=n {
        w[1 << (n - spin)] = C64::new(1.0, 0.0);
    }
    out.push(("W".to_string(), SpinState::normalized(n, w)?));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessCandidate {
    pub attempt: usize,
    pub label: String,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    /// True when some candidate's deviation exceeds the threshold.
    pub found: bool,
    pub threshold: f64,
    pub witness: SpinState,
    pub label: String,
    pub deviation: f64,
    /// Candidates examined up to and including the first one above threshold
    /// (or the whole budget when none qualifies).
    pub attempts_used: usize,
    pub candidates: Vec<WitnessCandidate>,
}

/// Looks for a state whose signature changes under `u`: the structured
/// library first, then random states, `attempts` candidates in total.
pub fn non_collectivity_witness(
    u: &GlobalUnitary,
    family: &PairFamily,
    convention: Convention,
    attempts: usize,
    seed: u64,
) -> Result<WitnessReport> {
    if attempts == 0 {
        return Err(Error::InvalidInput("need at least one attempt".into()));
    }
    let n = u.num_spins();
    let pairs = enumerate_pairs(n, family)?;
    let mut library = witness_library(n)?;
    library.truncate(attempts);
    let from_library = library.len();
    let results = (0..attempts)
        .into_par_iter()
        .map(|k| -> Result<(String, SpinState, f64)> {
            let (label, state) = if k < from_library {
                library[k].clone()
            } else {
                let mut rng = stream_rng(seed, Stream::WitnessSearch, k as u64);
                (format!("random #{}", k - from_library), haar_random_state_with(n, &mut rng)?)
            };
            let before = signature_over(&state, &pairs, family.clone(), convention)?;
            let after = signature_over(&state.apply(u)?, &pairs, family.clone(), convention)?;
            let deviation = signature_distance(&before, &after)?;
            Ok((label, state, deviation))
        })
        .collect::<Result<Vec<_>>>()?;
    let best = results
        .iter()
        .enumerate()
        .max_by(|(i, x), (j, y)| x.2.total_cmp(&y.2).then(j.cmp(i)))
        .map(|(i, _)| i)
        .expect("at least one attempt");
    let first_hit = results.iter().position(|r| r.2 > WITNESS_THRESHOLD);
    let (label, witness, deviation) = results[best].clone();
    Ok(WitnessReport {
        found: first_hit.is_some(),
        threshold: WITNESS_THRESHOLD,
        witness,
        label,
        deviation,
        attempts_used: first_hit.map_or(attempts, |i| i + 1),
        candidates: results
            .into_iter()
            .enumerate()
            .map(|(attempt, (label, _, deviation))| WitnessCandidate {
                attempt,
                label,
                deviation,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    /// A restart stops once its residual reaches this value.
    pub target_residual: f64,
}

impl SearchConfig {
    pub fn new(restarts: usize, seed: u64) -> Self {
        Self {
            restarts,
            max_iters: 40_000,
            seed,
            target_residual: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchRestart {
    pub restart: usize,
    pub residual: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Best residual after each iteration.
    pub trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub state: SpinState,
    pub residual: f64,
    pub best_restart: usize,
    pub restarts: Vec<SearchRestart>,
}

/// Unit-norm, phase-fixed state from `2·2^N` reals; `None` for a zero vector.
pub fn state_from_params(num_spins: usize, x: &[f64]) -> Option<SpinState> {
    let amps: Vec<C64> = x.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if !(norm.is_finite() && norm > 1e-150) {
        return None;
    }
    SpinState::normalized(num_spins, amps).ok().map(|s| s.phase_fixed())
}

/// Sum of squared per-key differences between the signature of `state` and
/// `target`.
pub fn signature_residual(state: &SpinState, target: &FidelitySignature, pairs: &[PairKey]) -> Result<f64> {
    let sig = signature_over(state, pairs, target.family().clone(), target.convention())?;
    Ok(pairs
        .iter()
        .map(|k| {
            let d = sig.get(&k.a, &k.b).unwrap_or(f64::NAN) - target.get(&k.a, &k.b).unwrap_or(f64::NAN);
            d * d
        })
        .sum())
}

/// Multistart Nelder-Mead search for a state whose signature matches
/// `target`. Best-effort: no global optimality is claimed.
pub fn search_state_with_signature(target: &FidelitySignature, cfg: &SearchConfig) -> Result<SearchResult> {
    let n = target.num_spins();
    limits::check_spins(n)?;
    if cfg.restarts == 0 || cfg.max_iters == 0 {
        return Err(Error::InvalidInput("restarts and max_iters must be positive".into()));
    }
    let pairs: Vec<PairKey> = target.entries().keys().cloned().collect();
    if pairs.is_empty() {
        return Err(Error::InvalidInput("target signature has no entries".into()));
    }
    for k in &pairs {
        k.a.check_within(n)?;
        k.b.check_within(n)?;
    }
    let dim = 1usize << n;
    let objective = |x: &[f64]| match state_from_params(n, x) {
        Some(s) => signature_residual(&s, target, &pairs).unwrap_or(f64::INFINITY),
        None => f64::INFINITY,
    };
    let start = |r: usize| {
        let mut rng = stream_rng(cfg.seed, Stream::StateSearch, r as u64);
        (0..2 * dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect::<Vec<f64>>()
    };
    let nm = NelderMeadConfig {
        max_iters: cfg.max_iters,
        diameter_tol: 1e-12,
        initial_step: 0.3,
        target_value: Some(cfg.target_residual),
    };
    let ms = multistart(objective, start, cfg.restarts, &nm);
    let best = ms.best();
    let state = state_from_params(n, &best.x)
        .ok_or_else(|| Error::NumericalConsistency("search collapsed to the zero vector".into()))?;
    let residual = signature_residual(&state, target, &pairs)?;
    Ok(SearchResult {
        state,
        residual,
        best_restart: ms.best,
        restarts: ms
            .runs
            .iter()
            .enumerate()
            .map(|(restart, m)| SearchRestart {
                restart,
                residual: m.value,
                iterations: m.iterations,
                evaluations: m.evaluations,
                converged: m.converged,
                trace: m.trace.clone(),
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::{signature, signatures_equal};
    use crate::symmetry::{collective, haar_random_u2};

    fn spec(v: &[usize]) -> SubsystemSpec {
        SubsystemSpec::new(v.to_vec()).unwrap()
    }

    fn cfg4() -> MicroMacroConfig {
        MicroMacroConfig::real(4, 0.6).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(MicroMacroConfig::real(1, 0.6).is_err());
        assert!(MicroMacroConfig::new(3, C64::new(0.6, 0.0), C64::new(0.6, 0.0)).is_err());
        assert!(MicroMacroConfig::new(3, C64::new(0.0, 0.6), C64::new(0.8, 0.0)).is_ok());
    }

    #[test]
    fn states_for_three_spins() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let cfg = MicroMacroConfig::real(3, h).unwrap();
        let micro = micro_state(&cfg);
        let mac = macro_state(&cfg);
        assert!((micro.amplitudes()[0].re - h).abs() < 1e-15);
        assert!((micro.amplitudes()[1].re - h).abs() < 1e-15);
        assert!((mac.amplitudes()[6].re - h).abs() < 1e-15);
        let degenerate = MicroMacroConfig::real(2, 1.0).unwrap();
        assert_eq!(micro_state(&degenerate), SpinState::basis(&[0, 0]).unwrap());
    }

    #[test]
    fn relabel_maps_micro_to_macro() {
        let pi = relabel_unitary(3).unwrap();
        let m = pi.matrix();
        for (s, t) in [(1, 6), (2, 5), (3, 4), (0, 0), (7, 7)] {
            assert_eq!(m[(t, s)].re, 1.0);
        }
        let cfg = cfg4();
        let image = micro_state(&cfg).apply(&relabel_unitary(4).unwrap()).unwrap();
        assert_eq!(image, macro_state(&cfg));
    }

    #[test]
    fn table_examples_squared() {
        let t = micromacro_table(&cfg4(), &PairFamily::tuples(2, true), Convention::Squared).unwrap();
        let check = |a: &[usize], b: &[usize], row, phi: f64, phi_p: f64, ok| {
            let e = t.entry(&spec(a), &spec(b)).unwrap();
            assert_eq!(e.row, row);
            assert!((e.value_phi - phi).abs() < 1e-10, "{a:?} {b:?} {}", e.value_phi);
            assert!((e.value_phi_prime - phi_p).abs() < 1e-10, "{a:?} {b:?} {}", e.value_phi_prime);
            assert_eq!(e.matches, ok);
        };
        check(&[4, 1], &[2, 4], TableRow::DifferentSites, 0.1296, 0.1296, true);
        check(&[4, 1], &[4, 2], TableRow::SameSite, 1.0, 1.0, true);
        check(&[1, 4], &[2, 3], TableRow::ExactlyOne, 0.36, 0.1296, false);
        let single = micromacro_table(&cfg4(), &PairFamily::single_spin(), Convention::Squared).unwrap();
        let e = single.entry(&spec(&[1]), &spec(&[4])).unwrap();
        assert!(e.matches && e.literal_match.squared && !e.literal_match.sqrt);
        assert!((e.value_phi - 0.36).abs() < 1e-12);
        assert!(single.entries.iter().all(|e| e.matches));
    }

    #[test]
    fn table_rows_match_in_sqrt_convention() {
        for m in 3..=5 {
            let cfg = MicroMacroConfig::real(m, 0.6).unwrap();
            let t = micromacro_table(&cfg, &PairFamily::tuples(2, true), Convention::Sqrt).unwrap();
            assert!(t
                .entries
                .iter()
                .filter(|e| e.row != TableRow::ExactlyOne)
                .all(|e| e.matches));
        }
    }

    #[test]
    fn single_spin_signatures_agree() {
        let cfg = cfg4();
        let f = PairFamily::single_spin();
        let a = signature(&micro_state(&cfg), &f, Convention::Sqrt).unwrap();
        let b = signature(&macro_state(&cfg), &f, Convention::Sqrt).unwrap();
        assert!(signatures_equal(&a, &b, 1e-10).unwrap());
    }

    #[test]
    fn witness_for_relabel() {
        let pi = relabel_unitary(3).unwrap();
        let r = non_collectivity_witness(&pi, &PairFamily::tuples(2, true), Convention::Sqrt, 100, 1).unwrap();
        assert!(r.found);
        assert!(r.deviation > 0.2, "{}", r.deviation);
        assert!(r.candidates.iter().all(|c| c.deviation >= 0.0));
    }

    #[test]
    fn no_witness_for_collective() {
        let u = collective(&haar_random_u2(3), 3).unwrap();
        let r = non_collectivity_witness(&u, &PairFamily::tuples(2, true), Convention::Sqrt, 30, 2).unwrap();
        assert!(!r.found);
        assert!(r.deviation < 1e-9, "{:?}", r.candidates);
    }

    #[test]
    fn search_recovers_product_signature() {
        let target = signature(&SpinState::basis(&[0, 0]).unwrap(), &PairFamily::single_spin(), Convention::Sqrt)
            .unwrap();
        let r = search_state_with_signature(&target, &SearchConfig::new(4, 5)).unwrap();
        assert!(r.residual < 1e-8, "{}", r.residual);
        assert!((r.state.norm() - 1.0).abs() < 1e-10);
        for run in &r.restarts {
            assert!(run.trace.windows(2).all(|w| w[1] <= w[0]));
        }
    }
}
