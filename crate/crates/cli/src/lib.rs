//! Command-line front end for the `matlift` engine.
//!
//! Every command is a pure function from input text to output text, so the binary and the
//! tests share one code path. Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 2 | unreadable file, malformed input, unknown demo |
//! | 3 | hypothesis failure or engine error |
//! | 4 | verification failed (residual or tower link) |
//! | 5 | search budget exceeded |
//!
//! Failures print one JSON object `{"error", "message", "exit_code"}` on stderr.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use matlift::lift::{correction_weights, weight_sum};
use matlift::search::{
    choose_ambient, cross_check_lift, exhaustive_solutions_over_ring, residue_solutions, Ambient, SearchBudget,
    DEFAULT_BUDGET,
};
use matlift::wire::{LiftProblemJson, MatrixJson, ResidueReportJson, TranscriptJson};
use matlift::{lift_to_length, validate_hypotheses, LiftProblem, Matrix, RingSpec};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const PADIC5: &str = include_str!("../fixtures/padic5.json");
pub const Z9_COUNTEREXAMPLE: &str = include_str!("../fixtures/z9-counterexample.json");
pub const CASE2_WEIGHTS: &str = include_str!("../fixtures/case2-weights.json");

pub const DEMOS: [&str; 3] = ["padic5", "z9-counterexample", "case2-weights"];

/// The bundled problem file of a demo.
pub fn demo_fixture(name: &str) -> Option<&'static str> {
    match name {
        "padic5" => Some(PADIC5),
        "z9-counterexample" => Some(Z9_COUNTEREXAMPLE),
        "case2-weights" => Some(CASE2_WEIGHTS),
        _ => None,
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot access {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("unknown demo {0:?}; available: padic5, z9-counterexample, case2-weights")]
    UnknownDemo(String),
    #[error(transparent)]
    Engine(#[from] matlift::Error),
    #[error("F(B) differs from A at level {level}, entry ({row}, {col}): expected {expected}, found {found}")]
    VerificationFailed { level: u32, row: usize, col: usize, expected: String, found: String },
    #[error("level {upper} of variable {variable} does not reduce to level {lower}")]
    TowerMismatch { lower: u32, upper: u32, variable: usize },
}

impl CliError {
    pub fn name(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "IoError",
            CliError::Parse(_) => "ParseError",
            CliError::UnknownDemo(_) => "UnknownDemo",
            CliError::Engine(e) => e.name(),
            CliError::VerificationFailed { .. } => "VerificationFailed",
            CliError::TowerMismatch { .. } => "TowerMismatch",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Parse(_) | CliError::UnknownDemo(_) => 2,
            CliError::Engine(matlift::Error::Parse(_)) => 2,
            CliError::Engine(matlift::Error::BudgetExceeded { .. }) => 5,
            CliError::Engine(_) => 3,
            CliError::VerificationFailed { .. } | CliError::TowerMismatch { .. } => 4,
        }
    }

    pub fn diagnostic(&self) -> String {
        serde_json::json!({ "error": self.name(), "message": self.to_string(), "exit_code": self.exit_code() })
            .to_string()
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn parse_err(e: serde_json::Error) -> CliError {
    CliError::Parse(e.to_string())
}

/// A problem on disk: the lifting problem plus run options.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemFile {
    #[serde(flatten)]
    pub problem: LiftProblemJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_length: Option<u32>,
    #[serde(default)]
    pub strict_monic: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

impl ProblemFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        let file: ProblemFile = serde_json::from_str(text).map_err(parse_err)?;
        let ell = file.problem.ring.ell();
        if let Some(t) = file.target_length {
            if t == 0 || t > ell {
                return Err(CliError::Parse(format!("target_length {t} outside 1..={ell}")));
            }
        }
        // Decode eagerly so shape and canonicity errors surface as parse errors.
        file.problem.matrix_a().map_err(|e| CliError::Parse(e.to_string()))?;
        file.problem.poly_f().map_err(|e| CliError::Parse(e.to_string()))?;
        file.problem.seed_matrices().map_err(|e| CliError::Parse(e.to_string()))?;
        Ok(file)
    }

    pub fn ring(&self) -> RingSpec {
        self.problem.ring
    }

    fn target(&self, flags: &Flags) -> CliResult<u32> {
        let ell = self.ring().ell();
        let t = flags.target_length.or(self.target_length).unwrap_or(ell);
        if t == 0 || t > ell {
            return Err(CliError::Parse(format!("target length {t} outside 1..={ell}")));
        }
        Ok(t)
    }

    fn budget(&self, flags: &Flags) -> CliResult<SearchBudget> {
        Ok(SearchBudget::new(flags.budget.or(self.budget).unwrap_or(DEFAULT_BUDGET))?)
    }

    /// The lifting problem truncated to the effective target length.
    pub fn lift_problem(&self, flags: &Flags) -> CliResult<LiftProblem> {
        let mut p = self.problem.to_problem()?;
        p.strict_monic = flags.strict_monic || self.strict_monic;
        Ok(p.truncate(self.target(flags)?)?)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Table,
}

/// Options shared by all commands; command-line values override the problem file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Flags {
    pub target_length: Option<u32>,
    pub budget: Option<u64>,
    pub strict_monic: bool,
    pub format: Format,
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("wire types serialize");
    s.push('\n');
    s
}

fn compact<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("wire types serialize")
}

fn lift_table(t: &TranscriptJson) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "ring {}  variables {}  invertible partials r = {}", t.ring, t.nvars, t.profile.r);
    for l in &t.levels {
        let ms: Vec<String> = l.matrices.iter().map(|m| compact(&m.entries)).collect();
        let res = if l.residual_zero { "0" } else { "nonzero" };
        let _ = writeln!(out, "level {}  B = ({})  residual {}", l.level, ms.join(", "), res);
    }
    out
}

/// Lifts the problem's seed to the target length; returns the transcript.
pub fn cmd_lift(problem_text: &str, flags: &Flags) -> CliResult<String> {
    let file = ProblemFile::parse(problem_text)?;
    let problem = file.lift_problem(flags)?;
    let transcript = TranscriptJson::from_transcript(&lift_to_length(&problem)?);
    Ok(match flags.format {
        Format::Json => to_json(&transcript),
        Format::Table => lift_table(&transcript),
    })
}

fn residue_table(r: &ResidueReportJson) -> String {
    let mut out = String::new();
    let mode = match r.mode {
        Ambient::FullSpace => "full space",
        Ambient::InCentralizer => "centralizer",
    };
    let _ = writeln!(
        out,
        "{} residue solutions among {} candidates ({mode}); A mod p cyclic: {}",
        r.solutions.len(),
        r.candidates,
        r.cyclic
    );
    for s in &r.solutions {
        let ms: Vec<String> = s.tuple.iter().map(|m| compact(&m.entries)).collect();
        let kinds = compact(&s.partials);
        let lift = match (s.liftable, s.r) {
            (true, Some(r)) => format!("liftable, r = {r}"),
            _ => "not liftable".to_string(),
        };
        let _ = writeln!(out, "({})  partials {kinds}  {lift}", ms.join(", "));
    }
    out
}

fn residue_report(file: &ProblemFile, flags: &Flags) -> CliResult<ResidueReportJson> {
    let budget = file.budget(flags)?;
    let abar = file.problem.matrix_a()?.reduce(1)?;
    let fbar = file.problem.poly_f()?.reduce(1)?;
    let ambient = choose_ambient(&abar, fbar.nvars(), budget)?;
    Ok(ResidueReportJson::from_report(&residue_solutions(&abar, &fbar, ambient, budget)?))
}

/// Enumerates residue-level solutions with their derivative classification.
pub fn cmd_solve_residue(problem_text: &str, flags: &Flags) -> CliResult<String> {
    let file = ProblemFile::parse(problem_text)?;
    let report = residue_report(&file, flags)?;
    Ok(match flags.format {
        Format::Json => to_json(&report),
        Format::Table => residue_table(&report),
    })
}

/// A bare candidate solution: matrices over `O_level` (default: the target length).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
    pub tuple: Vec<MatrixJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub verified: bool,
    pub kind: String,
    pub levels: Vec<u32>,
}

fn check_level(file: &ProblemFile, level: u32, bs: &[Matrix]) -> CliResult<()> {
    let a = file.problem.matrix_a()?.reduce(level)?;
    let f = file.problem.poly_f()?.reduce(level)?;
    let value = f.eval_at_tuple(bs)?;
    if let Some((row, col)) = a.first_difference(&value) {
        return Err(CliError::VerificationFailed {
            level,
            row,
            col,
            expected: compact(&matlift::wire::ElementJson::from_element(&a.get(row, col))),
            found: compact(&matlift::wire::ElementJson::from_element(&value.get(row, col))),
        });
    }
    Ok(())
}

/// Checks a transcript (every level solves the equation and reduces to the one below) or a
/// bare tuple against the problem.
pub fn cmd_verify(problem_text: &str, solution_text: &str, flags: &Flags) -> CliResult<String> {
    let file = ProblemFile::parse(problem_text)?;
    let value: serde_json::Value = serde_json::from_str(solution_text).map_err(parse_err)?;
    let ring = file.ring();
    let report = if value.get("levels").is_some() {
        let t: TranscriptJson = serde_json::from_value(value).map_err(parse_err)?;
        if t.ring.p() != ring.p() || t.ring.family() != ring.family() || t.ring.ell() > ring.ell() {
            return Err(CliError::Parse(format!("transcript ring {} does not match problem ring {ring}", t.ring)));
        }
        let levels = t.level_matrices()?;
        let mut prev: Option<(u32, Vec<Matrix>)> = None;
        for (level, bs) in &levels {
            if bs.len() != file.problem.f.nvars {
                return Err(CliError::Parse(format!("level {level} has {} matrices", bs.len())));
            }
            if let Some((pl, pbs)) = &prev {
                if *level != pl + 1 {
                    return Err(CliError::Parse(format!("levels jump from {pl} to {level}")));
                }
                for (i, (b, pb)) in bs.iter().zip(pbs).enumerate() {
                    if &b.reduce(*pl)? != pb {
                        return Err(CliError::TowerMismatch { lower: *pl, upper: *level, variable: i });
                    }
                }
            } else if *level != 1 {
                return Err(CliError::Parse("transcript must start at level 1".into()));
            }
            check_level(&file, *level, bs)?;
            prev = Some((*level, bs.clone()));
        }
        VerifyReport { verified: true, kind: "transcript".into(), levels: levels.iter().map(|(l, _)| *l).collect() }
    } else {
        let t: TupleFile = serde_json::from_value(value).map_err(parse_err)?;
        let level = match t.level {
            Some(l) if l == 0 || l > ring.ell() => {
                return Err(CliError::Parse(format!("level {l} outside 1..={}", ring.ell())))
            }
            Some(l) => l,
            None => file.target(flags)?,
        };
        let spec = ring.with_ell(level)?;
        let bs = t.tuple.iter().map(|m| m.to_matrix(spec)).collect::<matlift::Result<Vec<_>>>()?;
        if bs.len() != file.problem.f.nvars {
            return Err(CliError::Parse(format!("{} matrices for {} variables", bs.len(), file.problem.f.nvars)));
        }
        check_level(&file, level, &bs)?;
        VerifyReport { verified: true, kind: "tuple".into(), levels: vec![level] }
    };
    Ok(match flags.format {
        Format::Json => to_json(&report),
        Format::Table => {
            let ls: Vec<String> = report.levels.iter().map(u32::to_string).collect();
            format!("verified {} at level(s) {}\n", report.kind, ls.join(", "))
        }
    })
}

#[derive(Clone, Debug, Serialize)]
struct DemoReport {
    demo: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    transcript: Option<TranscriptJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residue: Option<ResidueReportJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lift_error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ring_solutions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weight_inverse_sum: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleSummary>,
}

#[derive(Clone, Debug, Serialize)]
struct OracleSummary {
    level: u32,
    candidates: u64,
    solutions: usize,
    member: bool,
}

impl DemoReport {
    fn new(name: &str) -> Self {
        DemoReport {
            demo: name.into(),
            transcript: None,
            residue: None,
            lift_error: None,
            ring_solutions: None,
            weights: None,
            weight_inverse_sum: None,
            oracle: None,
        }
    }

    fn table(&self) -> String {
        let mut out = format!("demo {}\n", self.demo);
        if let Some(r) = &self.residue {
            out.push_str(&residue_table(r));
        }
        if let Some(e) = &self.lift_error {
            let _ = writeln!(out, "lift rejected: {e}");
        }
        if let Some(n) = self.ring_solutions {
            if n == 0 {
                out.push_str("no lift exists (exhaustive)\n");
            } else {
                let _ = writeln!(out, "{n} solutions over the full ring");
            }
        }
        if let (Some(w), Some(s)) = (&self.weights, self.weight_inverse_sum) {
            let ws: Vec<String> = w.iter().map(u64::to_string).collect();
            let _ = writeln!(out, "correction weights ({}), sum of inverses {s}", ws.join(", "));
        }
        if let Some(t) = &self.transcript {
            out.push_str(&lift_table(t));
        }
        if let Some(o) = &self.oracle {
            let _ = writeln!(
                out,
                "oracle at level {}: {} solutions among {} candidates, lift is a member: {}",
                o.level, o.solutions, o.candidates, o.member
            );
        }
        out
    }
}

/// Runs a bundled end-to-end reproduction.
pub fn cmd_demo(name: &str, flags: &Flags) -> CliResult<String> {
    let text = demo_fixture(name).ok_or_else(|| CliError::UnknownDemo(name.into()))?;
    let file = ProblemFile::parse(text)?;
    let budget = file.budget(flags)?;
    let mut report = DemoReport::new(name);
    match name {
        "padic5" => {
            let problem = file.lift_problem(flags)?;
            report.transcript = Some(TranscriptJson::from_transcript(&lift_to_length(&problem)?));
        }
        "z9-counterexample" => {
            report.residue = Some(residue_report(&file, flags)?);
            let problem = file.lift_problem(flags)?;
            report.lift_error = validate_hypotheses(&problem).err().map(|e| e.name().to_string());
            let set = exhaustive_solutions_over_ring(&problem.a, &problem.f, Ambient::FullSpace, budget)?;
            report.ring_solutions = Some(set.solutions.len());
        }
        _ => {
            let problem = file.lift_problem(flags)?;
            let profile = validate_hypotheses(&problem)?;
            let spec = problem.spec();
            report.weights = Some(correction_weights(spec, profile.r).iter().map(|w| w.value()).collect());
            report.weight_inverse_sum = Some(weight_sum(spec, profile.r)?.value());
            report.transcript = Some(TranscriptJson::from_transcript(&lift_to_length(&problem)?));
            let check = problem.truncate(2.min(spec.ell()))?;
            let cc = cross_check_lift(&check, budget)?;
            report.oracle = Some(OracleSummary {
                level: check.spec().ell(),
                candidates: cc.candidates,
                solutions: cc.solution_count,
                member: cc.member,
            });
        }
    }
    Ok(match flags.format {
        Format::Json => to_json(&report),
        Format::Table => report.table(),
    })
}

#[derive(Debug, Parser)]
#[command(name = "matlift", version, about = "Lift solutions of F(B) = A from F_p to Z/p^l and F_p[u]/(u^l)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Lift or check up to this length (at most the ring's length).
    #[arg(long, global = true)]
    pub target_length: Option<u32>,
    /// Maximum number of candidates an exhaustive search may visit.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Reject non-monic univariate polynomials.
    #[arg(long, global = true)]
    pub strict_monic: bool,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lift the problem's seed and emit the verified transcript.
    Lift { problem: PathBuf },
    /// Enumerate residue-level solutions and classify their partial derivatives.
    SolveResidue { problem: PathBuf },
    /// Check a transcript or a bare tuple against the problem.
    Verify { problem: PathBuf, solution: PathBuf },
    /// Run a bundled reproduction: padic5, z9-counterexample or case2-weights.
    Demo { name: String },
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })
}

fn dispatch(cli: &Cli) -> CliResult<String> {
    let flags = Flags {
        target_length: cli.target_length,
        budget: cli.budget,
        strict_monic: cli.strict_monic,
        format: cli.format,
    };
    match &cli.command {
        Command::Lift { problem } => cmd_lift(&read(problem)?, &flags),
        Command::SolveResidue { problem } => cmd_solve_residue(&read(problem)?, &flags),
        Command::Verify { problem, solution } => cmd_verify(&read(problem)?, &read(solution)?, &flags),
        Command::Demo { name } => cmd_demo(name, &flags),
    }
}

/// Executes a parsed command line; output goes to `--out` when given.
pub fn run(cli: &Cli) -> Outcome {
    let result = dispatch(cli).and_then(|text| match &cli.out {
        Some(path) => std::fs::write(path, &text)
            .map(|_| String::new())
            .map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() }),
        None => Ok(text),
    });
    match result {
        Ok(stdout) => Outcome { code: 0, stdout, stderr: String::new() },
        Err(e) => Outcome { code: e.exit_code(), stdout: String::new(), stderr: e.diagnostic() + "\n" },
    }
}

/// Parses arguments (including the program name) and runs.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            }
        }
    }
}
