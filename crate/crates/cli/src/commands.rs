use std::fmt::Write as _;
use std::process::ExitCode;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use spinframe_core::equivalence::witness_library;
use spinframe_core::{
    bloch_vector, falsification_experiment, haar_random_state, macro_state, micro_state, micromacro_table,
    non_collectivity_witness, play, relabel_unitary, relative_angle, search_state_with_signature,
    Convention, FalsificationConfig, FidelitySignature, GameConfig, MicroMacroConfig, PairFamily,
    SearchConfig, SpinState, SubsystemSpec, C64,
};

use crate::{
    BlochArgs, ConventionArg, FamilyArgs, FamilyKind, GameArgs, MicroMacroArgs, SearchArgs, SignatureArgs,
    StateArgs, StateKind, VerifyArgs, WitnessArgs,
};

/// Fraction of Haar trials that must move the signature.
const REQUIRED_FRACTION: f64 = 0.99;

#[derive(Debug)]
pub enum Failure {
    /// Bad flags, files or documents (exit 2).
    Input(String),
    /// A checked property did not hold (exit 1).
    Invariant(String),
}

impl Failure {
    pub fn input(msg: impl Into<String>) -> Self {
        Failure::Input(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Failure::Invariant(msg.into())
    }

    pub fn report(&self) -> ExitCode {
        match self {
            Failure::Input(m) => {
                eprintln!("error: {m}");
                ExitCode::from(2)
            }
            Failure::Invariant(m) => {
                eprintln!("check failed: {m}");
                ExitCode::from(1)
            }
        }
    }
}

impl From<spinframe_core::Error> for Failure {
    fn from(e: spinframe_core::Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Invariant(e.to_string())
        }
    }
}

type CmdResult = Result<(), Failure>;

#[derive(Serialize)]
struct RunManifest<'a, P: Serialize> {
    subcommand: &'a str,
    params: &'a P,
    seed: Option<u64>,
    version: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    duration_seconds: Option<f64>,
}

struct Run {
    name: &'static str,
    started: Instant,
    timing: bool,
}

impl Run {
    fn new(name: &'static str, timing: bool) -> Self {
        Self {
            name,
            started: Instant::now(),
            timing,
        }
    }

    /// Embeds the manifest into `body` and serializes it.
    fn document<P: Serialize>(&self, params: &P, seed: Option<u64>, mut body: Value) -> Result<String, Failure> {
        let manifest = RunManifest {
            subcommand: self.name,
            params,
            seed,
            version: env!("CARGO_PKG_VERSION"),
            duration_seconds: self.timing.then(|| self.started.elapsed().as_secs_f64()),
        };
        let manifest = serde_json::to_value(&manifest).map_err(|e| Failure::invariant(e.to_string()))?;
        match body.as_object_mut() {
            Some(obj) => {
                obj.insert("manifest".to_string(), manifest);
            }
            None => body = json!({ "manifest": manifest, "result": body }),
        }
        let mut text = serde_json::to_string_pretty(&body).map_err(|e| Failure::invariant(e.to_string()))?;
        text.push('\n');
        Ok(text)
    }
}

/// Writes the document to `out` (or stdout) and the summary to stdout (or
/// stderr when stdout carries the document).
fn emit(out: Option<&str>, document: &str, summary: &str) -> CmdResult {
    match out {
        Some(path) => {
            write_file(path, document)?;
            print!("{summary}");
        }
        None => {
            print!("{document}");
            eprint!("{summary}");
        }
    }
    Ok(())
}

fn write_file(path: &str, text: &str) -> CmdResult {
    std::fs::write(path, text).map_err(|e| Failure::input(format!("cannot write {path}: {e}")))
}

fn read_file(path: &str) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {path}: {e}")))
}

fn read_state(path: &str) -> Result<SpinState, Failure> {
    Ok(SpinState::from_json(&read_file(path)?)?)
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, Failure> {
    serde_json::to_value(v).map_err(|e| Failure::invariant(e.to_string()))
}

fn convention(c: ConventionArg) -> Convention {
    match c {
        ConventionArg::Sqrt => Convention::Sqrt,
        ConventionArg::Squared => Convention::Squared,
    }
}

fn family(args: &FamilyArgs, kind: FamilyKind) -> PairFamily {
    match kind {
        FamilyKind::Single => PairFamily::single_spin(),
        FamilyKind::Subsets => PairFamily::subsets(args.k, args.overlap),
        FamilyKind::Tuples => PairFamily::tuples_capped(args.k, args.cap, args.overlap),
    }
}

fn signature_value(sig: &FidelitySignature) -> Result<Value, Failure> {
    serde_json::from_str(&sig.to_json()).map_err(|e| Failure::invariant(e.to_string()))
}

pub fn signature(a: SignatureArgs) -> CmdResult {
    let run = Run::new("signature", a.common.timing);
    let state = read_state(&a.state)?;
    let fam = family(&a.family, a.family.family.unwrap_or(FamilyKind::Single));
    let sig = spinframe_core::signature(&state, &fam, convention(a.convention))?;
    let doc = run.document(&a, None, signature_value(&sig)?)?;
    let summary = format!(
        "{} pairs over {} spins ({} convention)\n",
        sig.len(),
        sig.num_spins(),
        sig.convention().name()
    );
    emit(a.out.as_deref(), &doc, &summary)
}

pub fn verify_theorem1(a: VerifyArgs) -> CmdResult {
    let run = Run::new("verify-theorem1", a.common.timing);
    let mut cfg = FalsificationConfig::new(a.n, a.trials, a.seed);
    cfg.family = family(&a.family, a.family.family.unwrap_or(FamilyKind::Single));
    cfg.convention = convention(a.convention);
    let report = falsification_experiment(&cfg)?;
    let controls_pass = report.controls_pass();
    let fraction_pass = report.fraction_above_threshold >= REQUIRED_FRACTION;
    let pass = controls_pass && fraction_pass;
    let body = json!({
        "report": to_value(&report)?,
        "controls_pass": controls_pass,
        "required_fraction": REQUIRED_FRACTION,
        "pass": pass,
    });
    let doc = run.document(&a, Some(a.seed), body)?;
    let summary = format!(
        "collective control max deviation {:.3e} ({})\nHaar trials above {:.0e}: {:.1}% ({})\n",
        report.max_control_deviation,
        if controls_pass { "ok" } else { "FAIL" },
        cfg.threshold,
        100.0 * report.fraction_above_threshold,
        if fraction_pass { "ok" } else { "FAIL" },
    );
    emit(a.report.as_deref(), &doc, &summary)?;
    if pass {
        Ok(())
    } else {
        Err(Failure::invariant("collective invariance or falsification probe failed"))
    }
}

pub fn micromacro(a: MicroMacroArgs) -> CmdResult {
    let run = Run::new("micromacro", a.common.timing);
    let alpha = C64::new(a.alpha, a.alpha_im);
    let rest = 1.0 - alpha.norm_sqr();
    if rest.is_nan() || rest < -1e-12 {
        return Err(Failure::input(format!("|alpha| = {} exceeds 1", alpha.norm())));
    }
    let cfg = MicroMacroConfig::new(a.m, alpha, C64::new(rest.max(0.0).sqrt(), 0.0))?;
    let families = match a.family.family {
        Some(kind) => vec![family(&a.family, kind)],
        None => vec![PairFamily::single_spin(), family(&a.family, FamilyKind::Tuples)],
    };
    let conv = convention(a.convention);
    let tables = families
        .iter()
        .map(|f| micromacro_table(&cfg, f, conv))
        .collect::<Result<Vec<_>, _>>()?;

    let mut summary = String::new();
    for t in &tables {
        let _ = writeln!(summary, "family {} ({} convention)", t.family.label(), conv.name());
        let _ = writeln!(summary, "  {:<22} {:>6} {:>8} {:>10}", "row", "pairs", "matched", "mismatched");
        for r in &t.summary {
            let _ = writeln!(
                summary,
                "  {:<22} {:>6} {:>8} {:>10}",
                r.row.label(),
                r.pairs,
                r.matched,
                r.pairs - r.matched
            );
        }
    }
    if let Some(path) = &a.csv {
        let mut csv = String::new();
        for (i, t) in tables.iter().enumerate() {
            let text = t.to_csv();
            let body = if i == 0 { text.as_str() } else { text.split_once('\n').map_or("", |x| x.1) };
            csv.push_str(body);
        }
        write_file(path, &csv)?;
    }
    let body = json!({ "tables": to_value(&tables)? });
    let doc = run.document(&a, None, body)?;
    emit(a.out.as_deref(), &doc, &summary)
}

fn thin(trace: &[f64], stride: usize) -> Vec<f64> {
    let stride = stride.max(1);
    if trace.is_empty() {
        return Vec::new();
    }
    let mut out: Vec<f64> = trace.iter().step_by(stride).copied().collect();
    if !(trace.len() - 1).is_multiple_of(stride) {
        out.extend(trace.last());
    }
    out
}

pub fn search(a: SearchArgs) -> CmdResult {
    let run = Run::new("search", a.common.timing);
    let target = match (&a.target, &a.state) {
        (Some(path), _) => FidelitySignature::from_json(&read_file(path)?)?,
        (None, Some(path)) => {
            let state = read_state(path)?;
            let fam = family(&a.family, a.family.family.unwrap_or(FamilyKind::Single));
            spinframe_core::signature(&state, &fam, convention(a.convention))?
        }
        (None, None) => return Err(Failure::input("either --target or --state is required")),
    };
    let cfg = SearchConfig {
        restarts: a.restarts,
        max_iters: a.max_iters,
        ..SearchConfig::new(a.restarts, a.seed)
    };
    let mut result = search_state_with_signature(&target, &cfg)?;
    for r in &mut result.restarts {
        r.trace = thin(&r.trace, a.trace_stride);
    }
    if let Some(path) = &a.state_out {
        let state_doc = run.document(&a, Some(a.seed), to_value(&result.state)?)?;
        write_file(path, &state_doc)?;
    }
    let summary = format!(
        "best residual {:.3e} from restart {} of {}\n",
        result.residual, result.best_restart, a.restarts
    );
    let body = json!({ "target": signature_value(&target)?, "result": to_value(&result)? });
    let doc = run.document(&a, Some(a.seed), body)?;
    emit(a.out.as_deref(), &doc, &summary)
}

pub fn witness(a: WitnessArgs) -> CmdResult {
    let run = Run::new("witness", a.common.timing);
    let pi = relabel_unitary(a.m)?;
    let fam = family(&a.family, a.family.family.unwrap_or(FamilyKind::Tuples));
    let report = non_collectivity_witness(&pi, &fam, convention(a.convention), a.attempts, a.seed)?;
    let summary = if report.found {
        format!(
            "witness `{}` changes the signature by {:.6} (found after {} attempts)\n",
            report.label, report.deviation, report.attempts_used
        )
    } else {
        format!(
            "no witness above {:.0e} in {} attempts (best {:.3e})\n",
            report.threshold, report.attempts_used, report.deviation
        )
    };
    let doc = run.document(&a, Some(a.seed), to_value(&report)?)?;
    emit(a.out.as_deref(), &doc, &summary)
}

pub fn game(a: GameArgs) -> CmdResult {
    let run = Run::new("game", a.timing);
    let mut cfg: GameConfig = serde_json::from_str(&read_file(&a.config)?)
        .map_err(|e| Failure::input(format!("malformed game config: {e}")))?;
    if let Some(t) = a.trials {
        cfg.trials = t;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(p) = a.p {
        cfg.p = p;
    }
    let report = play(&cfg)?;
    let mut summary = String::new();
    let _ = writeln!(summary, "{:<16} {:>10} {:>12} {:>12} {:>10}", "lab", "collective", "analytic", "monte carlo", "std err");
    for l in &report.labs {
        let _ = writeln!(
            summary,
            "{:<16} {:>10} {:>12.8} {:>12.8} {:>10.2e}",
            l.lab, l.collective, l.analytic_p_err, l.mc_p_err, l.mc_std_err
        );
    }
    let p1 = report.postulate1;
    let _ = writeln!(
        summary,
        "max spread {:.3e}: {}",
        p1.max_spread,
        if p1.pass { "same for all labs" } else { "labs disagree" }
    );
    let doc = run.document(&a, Some(cfg.seed), to_value(&report)?)?;
    emit(a.out.as_deref(), &doc, &summary)?;
    if p1.all_collective && !p1.pass {
        return Err(Failure::invariant("collective labs disagree on the optimal error"));
    }
    Ok(())
}

fn marginal(state: &SpinState, spin: Option<usize>) -> Result<spinframe_core::DensityMatrix, Failure> {
    let spin = match spin {
        Some(s) => s,
        None if state.num_spins() == 1 => 1,
        None => return Err(Failure::input("--spin is required for multi-spin states")),
    };
    Ok(state.reduce(&SubsystemSpec::single(spin)?)?)
}

pub fn bloch(a: BlochArgs) -> CmdResult {
    let run = Run::new("bloch", a.common.timing);
    let v = bloch_vector(&marginal(&read_state(&a.state)?, a.spin)?)?;
    let mut body = json!({ "bloch": v.as_array(), "norm": v.norm() });
    let mut summary = format!("bloch ({:.12}, {:.12}, {:.12})  |r| = {:.12}\n", v.x, v.y, v.z, v.norm());
    if let Some(path) = &a.against {
        let w = bloch_vector(&marginal(&read_state(path)?, a.against_spin)?)?;
        let angle = relative_angle(&v, &w)?;
        body["against"] = json!(w.as_array());
        body["angle"] = json!(angle);
        let _ = writeln!(summary, "angle {angle:.12} rad");
    }
    let doc = run.document(&a, None, body)?;
    emit(a.out.as_deref(), &doc, &summary)
}

pub fn state(a: StateArgs) -> CmdResult {
    let run = Run::new("state", a.common.timing);
    let n = a.n;
    let st = match a.kind {
        StateKind::Micro => micro_state(&MicroMacroConfig::real(n, a.alpha)?),
        StateKind::Macro => macro_state(&MicroMacroConfig::real(n, a.alpha)?),
        StateKind::Basis => {
            let bits = a.bits.as_deref().ok_or_else(|| Failure::input("--bits is required for basis states"))?;
            let bits = bits
                .chars()
                .map(|c| match c {
                    '0' => Ok(0u8),
                    '1' => Ok(1u8),
                    other => Err(Failure::input(format!("invalid bit `{other}`"))),
                })
                .collect::<Result<Vec<u8>, _>>()?;
            SpinState::basis(&bits)?
        }
        StateKind::Plus => {
            spinframe_core::limits::check_spins(n)?;
            SpinState::normalized(n, vec![C64::new(1.0, 0.0); 1 << n])?
        }
        StateKind::Ghz | StateKind::W => {
            let label = if a.kind == StateKind::Ghz { "GHZ" } else { "W" };
            witness_library(n)?
                .into_iter()
                .find(|(l, _)| l == label)
                .map(|(_, s)| s)
                .ok_or_else(|| Failure::invariant("structured state missing"))?
        }
        StateKind::Haar => {
            spinframe_core::limits::check_spins(n)?;
            haar_random_state(n, a.seed)?
        }
    };
    let seed = (a.kind == StateKind::Haar).then_some(a.seed);
    let doc = run.document(&a, seed, to_value(&st)?)?;
    let summary = format!("{:?} state on {} spins\n", a.kind, st.num_spins());
    emit(a.out.as_deref(), &doc, &summary)
}
