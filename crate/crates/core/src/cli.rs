//! Instance files, machine-readable reports and the subcommands of the
//! `padic-coleman` binary.
//!
//! Every input and output is JSON. Big integers are decimal strings and
//! p-adic scalars use the `{v, u, prec}` form of [`ScalarRecord`]. An
//! instance file carries the Frobenius data and optional sections:
//!
//! ```json
//! {
//!   "p": 3, "d": 2, "d0": 1, "r": 1,
//!   "C": [["0", "-1"], ["1", "0"]],
//!   "rel_prec": 30, "denom_budget": 20,
//!   "basis": { "vectors": [["1", "0"], ["0", "1"]] },
//!   "coleman": [ { "n": 1, "components": [[...], [...]] } ],
//!   "wach": { "c": "4", "trunc": 30, "levels": 2 }
//! }
//! ```
//!
//! Exit status: 0 when every check passes, 1 on a verification failure,
//! 2 when some check is undecidable at the working precision, 3 on bad
//! input.
//!
//! [`ScalarRecord`]: crate::padic::ScalarRecord

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::basis::{self, BasisError, CandidateSource, LatticeSetup, SetupRecord};
use crate::coleman::{self, ColemanError, RegulatorVector, VectorRecord};
use crate::log_matrix::{self, FrobeniusData, FrobeniusRecord, LogMatrixError};
use crate::padic::{BigIntText, PadicContext, PadicError};
use crate::pollack::{self, PollackInstance};
use crate::report::{CheckSet, Verdict};
use crate::series::{LambdaN, Poly, PolyRecord};
use crate::wach::{self, GammaElement, WachError, WachSetup};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    LogMatrix(#[from] LogMatrixError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Coleman(#[from] ColemanError),
    #[error(transparent)]
    Wach(#[from] WachError),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

impl CliError {
    pub const EXIT_CODE: i32 = 3;
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Basis section of an instance file. Without `setup` the lattice comes
/// from the dual of the instance itself.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisSection {
    #[serde(default)]
    pub setup: Option<SetupRecord>,
    #[serde(default)]
    pub vectors: Option<Vec<Vec<BigIntText>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WachParams {
    pub c: BigIntText,
    #[serde(default = "default_trunc")]
    pub trunc: usize,
    #[serde(default = "default_levels")]
    pub levels: u32,
}

fn default_trunc() -> usize {
    wach::DEFAULT_TRUNC
}
fn default_levels() -> u32 {
    2
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(flatten)]
    pub frobenius: FrobeniusRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<BasisSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coleman: Option<Vec<VectorRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wach: Option<WachParams>,
}

impl InstanceFile {
    /// Validated Frobenius data; `forced` skips the slope hypothesis (used
    /// by `check`, which reports on it instead).
    pub fn frobenius_data(&self, forced: bool) -> Result<FrobeniusData> {
        let r = &self.frobenius;
        if r.c.len() != r.r * r.d || r.c.iter().any(|row| row.len() != r.r * r.d) {
            return Err(CliError::Invalid(format!("C must be {0}x{0}", r.r * r.d)));
        }
        Ok(if forced { r.build_forced()? } else { r.build()? })
    }
}

/// Reads any JSON artifact, reporting parse errors with their location.
pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_json(&path.display().to_string(), &text)
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(origin: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrecisionInfo {
    pub p: u32,
    pub rel_prec: u32,
    pub denom_budget: u32,
    pub floor: i64,
}

impl PrecisionInfo {
    fn of(ctx: &PadicContext, floor: i64) -> Self {
        Self {
            p: ctx.p(),
            rel_prec: ctx.rel_prec(),
            denom_budget: ctx.denom_budget(),
            floor,
        }
    }
}

/// What every subcommand emits.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub verdict: Verdict,
    pub checks: CheckSet,
    pub precision: PrecisionInfo,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub elapsed_ms: f64,
    pub artifacts: Value,
}

impl Report {
    fn new(command: &str, checks: CheckSet, precision: PrecisionInfo, seed: Option<u64>, artifacts: Value) -> Self {
        Self {
            command: command.into(),
            verdict: checks.overall(),
            checks,
            precision,
            seed,
            elapsed_ms: 0.0,
            artifacts,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.verdict.exit_code()
    }
}

#[derive(Debug, Parser)]
#[command(name = "padic-coleman", version, about = "Verify logarithmic matrices, Coleman factorizations, admissible bases and Wach recursions")]
pub struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ColemanMode {
    /// Push Coleman vectors forward, factor back and push again.
    Roundtrip,
    /// Factor regulator vectors and check the re-multiplication identity.
    Factor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisMode {
    Check,
    Construct,
    ConstructStrong,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the slope hypothesis on an instance.
    Check {
        #[arg(long)]
        input: PathBuf,
    },
    /// Build M_n and check stabilization, evaluation and the determinant.
    Logmatrix {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        n: u32,
    },
    /// Factor vectors through h_n = C_n ⋯ C_1.
    Coleman {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ColemanMode::Roundtrip)]
        mode: ColemanMode,
        /// A vector file (`{n, components}` or a list of them); defaults to
        /// the instance's `coleman` section, then to random vectors.
        #[arg(long)]
        vectors: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        count: usize,
    },
    /// Check or construct (strongly) admissible bases.
    Basis {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = BasisMode::Construct)]
        mode: BasisMode,
        /// Seed for the randomized strong construction; without it the
        /// candidates are enumerated.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Verify the antidiagonal ±-logarithm form of M_n for C = [[0,-1],[1,0]].
    Pollack {
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 2)]
        levels: u32,
        #[arg(long, default_value_t = 40)]
        rel_prec: u32,
    },
    /// Verify the Wach-module matrix identities.
    Wach {
        /// Defaults to the Pollack instance at `--p`.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        p: Option<u32>,
        /// Cyclotomic character value, `c = 1 mod p`.
        #[arg(long)]
        c: Option<i64>,
        #[arg(long)]
        levels: Option<u32>,
        #[arg(long)]
        trunc: Option<usize>,
        #[arg(long, default_value_t = 60)]
        rel_prec: u32,
    },
}

/// Runs one subcommand and times it.
pub fn run(command: &Command) -> Result<Report> {
    let start = Instant::now();
    let mut report = match command {
        Command::Check { input } => cmd_check(&read_json(input)?),
        Command::Logmatrix { input, n } => cmd_logmatrix(&read_json(input)?, *n),
        Command::Coleman {
            input,
            mode,
            vectors,
            n,
            seed,
            count,
        } => {
            let instance: InstanceFile = read_json(input)?;
            let supplied = match vectors {
                Some(path) => Some(read_vectors(path)?),
                None => instance.coleman.clone(),
            };
            cmd_coleman(&instance, *mode, supplied, *n, *seed, *count)
        }
        Command::Basis { input, mode, seed } => cmd_basis(&read_json(input)?, *mode, *seed),
        Command::Pollack { p, levels, rel_prec } => cmd_pollack(*p, *levels, *rel_prec),
        Command::Wach {
            input,
            p,
            c,
            levels,
            trunc,
            rel_prec,
        } => {
            let instance: Option<InstanceFile> = input.as_deref().map(read_json).transpose()?;
            let params = instance.as_ref().and_then(|i| i.wach.clone());
            let c = match (c, &params) {
                (Some(c), _) => *c,
                (None, Some(w)) => i64::try_from(&w.c.0).map_err(|_| CliError::Invalid("wach.c out of range".into()))?,
                (None, None) => 1 + p.unwrap_or(3) as i64,
            };
            let levels = levels.or(params.as_ref().map(|w| w.levels)).unwrap_or(2);
            let trunc = trunc.or(params.as_ref().map(|w| w.trunc)).unwrap_or(wach::DEFAULT_TRUNC);
            cmd_wach(instance.as_ref(), *p, c, levels, trunc, *rel_prec)
        }
    }?;
    report.elapsed_ms = start.elapsed().as_secs_f64() * 1000.0;
    Ok(report)
}

/// A vector file holds one record or a list of them.
fn read_vectors(path: &Path) -> Result<Vec<VectorRecord>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(VectorRecord),
        Many(Vec<VectorRecord>),
    }
    Ok(match read_json::<OneOrMany>(path)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    })
}

pub fn cmd_check(instance: &InstanceFile) -> Result<Report> {
    let fd = instance.frobenius_data(true)?;
    let h = log_matrix::check_hypotheses(&fd);
    let mut checks = CheckSet::new();
    checks.insert("slope_hypothesis", h.verdict());
    let artifacts = json!({
        "charpoly": h.charpoly.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
        "newton_vertices": h.newton_vertices,
        "root_valuations": h.root_valuations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "slope_bound": h.slope_bound().map(|b| b.to_string()),
        "det_c": h.det_c.to_string(),
        "det_c_phi_minus_one": h.det_c_phi_minus_one.to_string(),
        "clause": h.outcome.err(),
    });
    Ok(Report::new("check", checks, PrecisionInfo::of(fd.ctx(), fd.floor()), None, artifacts))
}

pub fn cmd_logmatrix(instance: &InstanceFile, n: u32) -> Result<Report> {
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let fd = instance.frobenius_data(false)?;
    let mn = log_matrix::build_mn(&fd, n)?;
    let mut checks = CheckSet::new();
    for k in 1..n {
        let mk = log_matrix::build_mn(&fd, k)?;
        checks.insert(format!("stabilization_{n}_{k}"), log_matrix::stabilization_verdict(&mn, &mk));
    }
    checks.insert("evaluation_at_zero", log_matrix::evaluation_verdict(&mn));
    checks.insert("valuation_bound", log_matrix::valuation_bound_verdict(&mn));
    checks.insert("determinant", log_matrix::det_mn(&fd, n)?.verdict);
    let artifacts = json!({
        "matrix": mn.to_record(),
        "min_valuation": mn.min_valuation,
        "min_abs_prec": mn.min_abs_prec,
    });
    Ok(Report::new("logmatrix", checks, PrecisionInfo::of(fd.ctx(), fd.floor()), None, artifacts))
}

pub fn cmd_coleman(
    instance: &InstanceFile,
    mode: ColemanMode,
    supplied: Option<Vec<VectorRecord>>,
    n: u32,
    seed: u64,
    count: usize,
) -> Result<Report> {
    let fd = instance.frobenius_data(false)?;
    let ctx = fd.ctx();
    let used_seed = supplied.is_none().then_some(seed);
    let vectors = match supplied {
        Some(records) => records
            .iter()
            .map(|r| {
                let comps = r.to_components(&LambdaN::new(ctx, r.n))?;
                if comps.len() != fd.rd() {
                    return Err(CliError::Invalid(format!("vector has {} components, expected {}", comps.len(), fd.rd())));
                }
                Ok(comps)
            })
            .collect::<Result<Vec<_>>>()?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ring = LambdaN::new(ctx, n);
            let mut out: Vec<_> = (0..count).map(|_| coleman::random_col(&fd, &ring, &mut rng)).collect();
            if mode == ColemanMode::Factor {
                out = out
                    .iter()
                    .map(|col| coleman::forward(&fd, n, col).map(|l| l.components))
                    .collect::<coleman::Result<_>>()?;
            }
            out
        }
    };
    let mut checks = CheckSet::new();
    let mut outputs = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        let level = v[0].level();
        match mode {
            ColemanMode::Roundtrip => {
                checks.insert(format!("roundtrip_{i}"), coleman::roundtrip_verdict(&fd, v));
                outputs.push(VectorRecord::from_components(level, &coleman::forward(&fd, level, v)?.components));
            }
            ColemanMode::Factor => {
                let l = RegulatorVector {
                    level,
                    components: v.clone(),
                };
                let verdict = match coleman::factor_level(&fd, &l) {
                    Ok(col) => {
                        let again = coleman::forward(&fd, level, &col.components)?;
                        outputs.push(VectorRecord::from_components(level, &col.components));
                        coleman::vector_equal(&again.components, &l.components, fd.floor())
                    }
                    Err(e @ ColemanError::NotInImage { .. }) => Verdict::fail(e.to_string()),
                    Err(e @ ColemanError::PrecisionLoss { .. }) => Verdict::indeterminate(e.to_string()),
                    Err(e) => return Err(e.into()),
                };
                checks.insert(format!("factor_{i}"), verdict);
            }
        }
    }
    let key = match mode {
        ColemanMode::Roundtrip => "regulator_vectors",
        ColemanMode::Factor => "coleman_vectors",
    };
    let artifacts = json!({ key: outputs });
    Ok(Report::new("coleman", checks, PrecisionInfo::of(ctx, fd.floor()), used_seed, artifacts))
}

pub fn cmd_basis(instance: &InstanceFile, mode: BasisMode, seed: Option<u64>) -> Result<Report> {
    let section = instance.basis.clone().unwrap_or_default();
    let setup = match &section.setup {
        Some(record) => record.build()?,
        None => LatticeSetup::dual_of(&instance.frobenius_data(false)?)?,
    };
    let ctx = *setup.ctx();
    let mut checks = CheckSet::new();
    let artifacts = match mode {
        BasisMode::Check => {
            let vectors = section
                .vectors
                .as_ref()
                .ok_or_else(|| CliError::Usage("basis check needs basis.vectors in the instance".into()))?;
            let vectors: Vec<basis::Vector> = vectors
                .iter()
                .map(|v| v.iter().map(|x| ctx.from_bigint(&x.0)).collect())
                .collect();
            let plain = basis::is_admissible(&setup, &vectors)?;
            checks.insert("admissible", plain.verdict());
            let strong = if setup.phi().is_some() {
                let s = basis::is_strongly_admissible(&setup, &vectors)?;
                checks.insert("strongly_admissible", s.verdict());
                Some(s)
            } else {
                None
            };
            json!({ "setup": setup.to_record(), "certificate": plain, "strong_certificate": strong })
        }
        BasisMode::Construct | BasisMode::ConstructStrong => {
            let candidate = if mode == BasisMode::Construct {
                basis::construct_admissible(&setup)?
            } else {
                let source = seed.map_or(CandidateSource::Enumerated, |seed| CandidateSource::Random { seed });
                basis::construct_strongly_admissible(&setup, source)?
            };
            // independent re-check of the output
            let recheck = basis::is_admissible(&setup, &candidate.vectors)?;
            checks.insert("admissible", recheck.verdict());
            if mode == BasisMode::ConstructStrong {
                checks.insert(
                    "strongly_admissible",
                    basis::is_strongly_admissible(&setup, &candidate.vectors)?.verdict(),
                );
            }
            json!({ "setup": setup.to_record(), "basis": candidate.to_record(&ctx) })
        }
    };
    let seed = (mode == BasisMode::ConstructStrong).then_some(seed).flatten();
    Ok(Report::new("basis", checks, PrecisionInfo::of(&ctx, log_matrix::default_floor(&ctx)), seed, artifacts))
}

pub fn cmd_pollack(p: u32, levels: u32, rel_prec: u32) -> Result<Report> {
    let ctx = PadicContext::new(p, rel_prec, rel_prec)?;
    let inst = PollackInstance::new(&ctx)?;
    let mut checks = CheckSet::new();
    let mut per_level = Vec::new();
    for n in 1..=levels {
        let r = pollack::verify_antidiagonal(&inst, n)?;
        for (name, v) in &r.checks.checks {
            checks.insert(format!("level_{n}/{name}"), v.clone());
        }
        per_level.push(json!({
            "level": n,
            "matrix": log_matrix::build_mn(inst.fd(), n)?.to_record(),
            "lower_vs_literal_log_minus": r.lower_vs_literal_log_minus,
            "sign_convention": r.sign_convention,
        }));
    }
    Ok(Report::new(
        "pollack",
        checks,
        PrecisionInfo::of(&ctx, inst.fd().floor()),
        None,
        json!({ "instance": inst.fd().to_record(), "levels": per_level }),
    ))
}

fn poly_matrix_record(m: &crate::Matrix<Poly>) -> Vec<Vec<PolyRecord>> {
    m.to_rows().iter().map(|row| row.iter().map(Poly::to_record).collect()).collect()
}

pub fn cmd_wach(
    instance: Option<&InstanceFile>,
    p: Option<u32>,
    c: i64,
    levels: u32,
    trunc: usize,
    rel_prec: u32,
) -> Result<Report> {
    let fd = match (instance, p) {
        (Some(i), _) => {
            let mut record = i.frobenius.clone();
            record.rel_prec = record.rel_prec.max(rel_prec);
            record.denom_budget = record.denom_budget.max(rel_prec / 2);
            record.build()?
        }
        (None, Some(p)) => PollackInstance::new(&PadicContext::new(p, rel_prec, rel_prec / 2)?)?.fd().clone(),
        (None, None) => return Err(CliError::Usage("wach needs --p or --input".into())),
    };
    let ws = WachSetup::new(fd, trunc)?;
    let gamma = GammaElement::from_int(ws.ctx(), c)?;
    let report = wach::verify_levels(&ws, levels, &gamma)?;
    let mut checks = CheckSet::new();
    checks.insert("lemma_a", report.lemma_a.clone());
    for level in &report.levels {
        for (name, v) in &level.checks.checks {
            checks.insert(format!("level_{}/{name}", level.level), v.clone());
        }
    }
    let m_prime: Vec<Value> = (1..=levels)
        .map(|n| wach::build_m_prime(&ws, n).map(|t| json!({ "level": n, "m_prime": poly_matrix_record(&t.m_prime) })))
        .collect::<wach::Result<_>>()?;
    Ok(Report::new(
        "wach",
        checks,
        PrecisionInfo::of(ws.ctx(), ws.floor()),
        None,
        json!({ "instance": ws.fd().to_record(), "report": report, "m_prime": m_prime }),
    ))
}

/// Entry point of the binary: parses arguments, writes the report and
/// returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { CliError::EXIT_CODE } else { 0 };
        }
    };
    match run(&cli.command) {
        Ok(report) => {
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            for (name, v) in &report.checks.checks {
                eprintln!("{name}: {v}");
            }
            eprintln!("{}: {}", report.command, report.verdict);
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text + "\n") {
                        eprintln!("{}: {e}", path.display());
                        return CliError::EXIT_CODE;
                    }
                }
                None => println!("{text}"),
            }
            report.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            CliError::EXIT_CODE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const POLLACK: &str = r#"{"p": 3, "d": 2, "d0": 1, "C": [["0", "-1"], ["1", "0"]], "rel_prec": 30, "denom_budget": 20}"#;

    fn pollack() -> InstanceFile {
        parse_json("inline", POLLACK).unwrap()
    }

    #[test]
    fn instance_roundtrip() {
        let i = pollack();
        assert_eq!(i.frobenius.r, 1);
        let text = serde_json::to_string(&i).unwrap();
        assert_eq!(parse_json::<InstanceFile>("again", &text).unwrap(), i);
    }

    #[test]
    fn parse_error_has_location() {
        let e = parse_json::<InstanceFile>("bad.json", "{\n  \"p\": 3,\n  \"d\": }").unwrap_err();
        assert!(matches!(e, CliError::Parse { line: 3, .. }), "{e}");
    }

    #[test]
    fn check_rejects_identity() {
        let mut i = pollack();
        i.frobenius.d0 = 2;
        i.frobenius.c = vec![
            vec![BigIntText(1.into()), BigIntText(0.into())],
            vec![BigIntText(0.into()), BigIntText(1.into())],
        ];
        let r = cmd_check(&i).unwrap();
        assert!(r.verdict.is_fail());
        assert!(r.verdict.to_string().contains("1 is an eigenvalue"), "{}", r.verdict);
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn commands_pass_on_pollack() {
        let i = pollack();
        assert!(cmd_check(&i).unwrap().verdict.is_pass());
        assert!(cmd_logmatrix(&i, 3).unwrap().verdict.is_pass());
        let r = cmd_coleman(&i, ColemanMode::Roundtrip, None, 2, 7, 3).unwrap();
        assert!(r.verdict.is_pass());
        assert_eq!(r.seed, Some(7));
        assert!(cmd_coleman(&i, ColemanMode::Factor, None, 2, 7, 3).unwrap().verdict.is_pass());
        assert!(cmd_basis(&i, BasisMode::Construct, None).unwrap().verdict.is_pass());
        assert!(cmd_basis(&i, BasisMode::ConstructStrong, Some(1)).unwrap().verdict.is_pass());
        assert!(cmd_pollack(3, 2, 30).unwrap().verdict.is_pass());
    }

    #[test]
    fn report_roundtrip() {
        let r = cmd_pollack(3, 1, 30).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back.checks, r.checks);
        assert_eq!(back.artifacts, r.artifacts);
    }
}
