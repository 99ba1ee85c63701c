//! Command-line front end. Every subcommand writes JSON lines (or CSV for
//! tables) to the given writer; [`run`] returns the process exit code:
//! 0 on success, 1 when a verification suite fails, 2 on usage errors.

use std::cmp::Ordering;
use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::exact::{parse_rational, BigRational, PerSqrtPi, PiMixed, SignedSqrtRational};
use crate::misiolek::{
    compare_published_table, critical_table, mc_coriolis, mc_flat, rhw_mc, rhw_threshold, theorem_scan,
    CriticalRatio, Direction, ExactComplex, MCReport, RHWave,
};
use crate::oracle::StructureOracle;
use crate::structure::{validate_symmetries, HarmonicIndex};
use crate::wigner::{check_closed_forms, check_symmetries, threej, ThreeJArgs};

/// Largest degree accepted on the command line.
pub const MAX_DEGREE: u32 = 400;

#[derive(Debug, Parser)]
#[command(name = "spherical-mc", version, about = "Exact 3j symbols, sphere structure constants and Misiolek criteria")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Wigner 3j symbol (l1 l2 l3; m1 m2 m3)
    Wigner3j {
        #[arg(long, num_args = 3, value_names = ["L1", "L2", "L3"], required = true)]
        l: Vec<u32>,
        #[arg(long, num_args = 3, value_names = ["M1", "M2", "M3"], allow_negative_numbers = true, required = true)]
        m: Vec<i32>,
    },
    /// Misiolek criterion MC(e_a, e_b), with rotation rate if given
    Mc {
        #[arg(long, num_args = 2, value_names = ["L", "M"], allow_negative_numbers = true, required = true)]
        a: Vec<i64>,
        #[arg(long, num_args = 2, value_names = ["L", "M"], allow_negative_numbers = true, required = true)]
        b: Vec<i64>,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_rational)]
        rotation: Option<BigRational>,
        #[arg(long)]
        verbose: bool,
    },
    /// Critical rotation ratios for the zonal flow e_{l1 0}
    CriticalTable {
        #[arg(long)]
        l1: u32,
        #[arg(long, default_value_t = 6)]
        l2_max: u32,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run invariant suites; exits 1 on any failure
    Verify {
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        #[arg(long)]
        lmax: Option<u32>,
    },
    /// Criterion along a Rossby-Haurwitz wave, or its amplitude threshold
    Rhw {
        #[arg(long = "A", num_args = 2, value_names = ["RE", "IM"], allow_hyphen_values = true, value_parser = parse_rational)]
        amplitude: Option<Vec<BigRational>>,
        #[arg(long = "C", allow_hyphen_values = true, value_parser = parse_rational)]
        c: Option<BigRational>,
        #[arg(long, num_args = 2, value_names = ["L1", "M1"], allow_negative_numbers = true, required = true)]
        wave: Vec<i64>,
        #[arg(long, num_args = 2, value_names = ["L2", "M2"], allow_negative_numbers = true)]
        probe: Option<Vec<i64>>,
        #[arg(long = "K", allow_hyphen_values = true, value_parser = parse_rational)]
        k: Option<BigRational>,
        #[arg(long, allow_negative_numbers = true)]
        threshold: Option<i64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Wigner,
    Structure,
    Oracle,
    Theorem,
    Table,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Wigner => "wigner",
            Suite::Structure => "structure",
            Suite::Oracle => "oracle",
            Suite::Theorem => "theorem",
            Suite::Table => "table",
        }
    }

    fn default_lmax(self) -> u32 {
        match self {
            Suite::Oracle => 6,
            _ => 12,
        }
    }
}

/// Parse arguments without running anything.
pub fn parse_args<I, T>(args: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    Cli::try_parse_from(args)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    ZeroBySelectionRule,
    Undefined,
    NotApplicable,
}

/// One term `sign · q^{1/2 if sqrt} · π^{pi_exp}` of an exact value; a value
/// is the sum of its terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactTerm {
    pub sign: i8,
    pub rational: String,
    pub sqrt: bool,
    pub pi_exp: f64,
}

impl ExactTerm {
    fn rational_term(q: &BigRational, pi_exp: f64) -> Self {
        Self {
            sign: signum(q),
            rational: q.abs().to_string(),
            sqrt: false,
            pi_exp,
        }
    }

    fn root_term(v: &SignedSqrtRational, pi_exp: f64) -> Self {
        Self {
            sign: v.signum(),
            rational: v.radicand().to_string(),
            sqrt: true,
            pi_exp,
        }
    }

    fn zero() -> Self {
        Self {
            sign: 0,
            rational: "0".into(),
            sqrt: false,
            pi_exp: 0.0,
        }
    }

    /// Decode back to exact parts.
    pub fn parse(&self) -> Result<(i8, BigRational), DecodeError> {
        if !(-1..=1).contains(&self.sign) {
            return Err(DecodeError::Invalid("term sign outside {-1, 0, 1}"));
        }
        if ![0.0, -0.5, -1.0, 1.0].contains(&self.pi_exp) {
            return Err(DecodeError::Invalid("unsupported power of pi"));
        }
        let q = parse_rational(&self.rational).map_err(|_| DecodeError::Invalid("bad rational"))?;
        if q.is_negative() || (q == BigRational::from_integer(0.into())) != (self.sign == 0) {
            return Err(DecodeError::Invalid("term sign disagrees with its magnitude"));
        }
        Ok((self.sign, q))
    }

    pub fn to_f64(&self) -> Result<f64, DecodeError> {
        let (sign, q) = self.parse()?;
        let magnitude = if self.sqrt {
            SignedSqrtRational::new(false, q).to_f64()
        } else {
            crate::exact::rational_to_f64(&q).map_err(|_| DecodeError::Invalid("overflow"))?
        };
        Ok(sign as f64 * magnitude * std::f64::consts::PI.powf(self.pi_exp))
    }
}

fn signum(q: &BigRational) -> i8 {
    match q.cmp(&BigRational::from_integer(0.into())) {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

pub fn terms_of_root(v: &SignedSqrtRational) -> Vec<ExactTerm> {
    if v.is_zero() {
        vec![ExactTerm::zero()]
    } else {
        vec![ExactTerm::root_term(v, 0.0)]
    }
}

pub fn terms_of_mixed(mixed: &PiMixed, root: &PerSqrtPi) -> Vec<ExactTerm> {
    let mut terms = Vec::new();
    if mixed.rational != BigRational::from_integer(0.into()) {
        terms.push(ExactTerm::rational_term(&mixed.rational, 0.0));
    }
    if !root.is_zero() {
        terms.push(ExactTerm::root_term(&root.0, -0.5));
    }
    if mixed.per_pi != BigRational::from_integer(0.into()) {
        terms.push(ExactTerm::rational_term(&mixed.per_pi, -1.0));
    }
    if terms.is_empty() {
        terms.push(ExactTerm::zero());
    }
    terms
}

/// One JSON line of output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputRecord {
    pub command: String,
    pub request: Map<String, Value>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<Vec<ExactTerm>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("malformed JSON record: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed CSV table: {0}")]
    Csv(#[from] csv::Error),
    #[error("invalid record: {0}")]
    Invalid(&'static str),
}

impl OutputRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }

    /// Parse and check one JSON line.
    pub fn decode(line: &str) -> Result<Self, DecodeError> {
        let record: OutputRecord = serde_json::from_str(line)?;
        match record.status {
            Status::Undefined | Status::NotApplicable if record.value.is_some() => {
                return Err(DecodeError::Invalid("value present on an undefined record"));
            }
            _ => {}
        }
        if let Some(v) = record.value {
            if !v.is_finite() {
                return Err(DecodeError::Invalid("non-finite value"));
            }
        }
        for term in record.exact.iter().flatten() {
            term.parse()?;
        }
        Ok(record)
    }
}

/// A row of the CSV critical-ratio table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub l2: u32,
    pub m2: i32,
    pub ratio: Option<f64>,
    pub direction: Option<Direction>,
    pub status: Status,
}

fn status_of(ratio: &CriticalRatio) -> Status {
    match ratio {
        CriticalRatio::Defined { .. } => Status::Ok,
        CriticalRatio::Undefined(_) => Status::Undefined,
        CriticalRatio::NotApplicable => Status::NotApplicable,
    }
}

pub fn encode_table_csv(rows: &[TableRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("rows serialize");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is utf-8")
}

/// Parse a CSV table, requiring the exact header and consistent rows.
pub fn decode_table_csv(text: &str) -> Result<Vec<TableRow>, DecodeError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    if r.headers()?.iter().collect::<Vec<_>>() != ["l2", "m2", "ratio", "direction", "status"] {
        return Err(DecodeError::Invalid("unexpected header"));
    }
    let mut rows = Vec::new();
    for row in r.deserialize() {
        let row: TableRow = row?;
        let defined = row.status == Status::Ok;
        if defined != row.ratio.is_some() || defined != row.direction.is_some() {
            return Err(DecodeError::Invalid("ratio and direction must accompany status ok"));
        }
        if row.ratio.is_some_and(|v| !v.is_finite()) {
            return Err(DecodeError::Invalid("non-finite ratio"));
        }
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("output failed: {0}")]
    Io(#[from] std::io::Error),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn index(pair: &[i64], what: &str) -> Result<HarmonicIndex, CliError> {
    let (l, m) = (pair[0], pair[1]);
    if l < 0 || l > MAX_DEGREE as i64 {
        return Err(usage(format!("{what}: degree {l} outside 0..={MAX_DEGREE}")));
    }
    if m.abs() > l {
        return Err(usage(format!("{what}: order {m} exceeds degree {l}")));
    }
    Ok(HarmonicIndex::new(l as u32, m as i32).expect("checked"))
}

fn sign_word(sign: Option<Ordering>) -> &'static str {
    match sign {
        Some(Ordering::Greater) => "positive",
        Some(Ordering::Equal) => "zero",
        Some(Ordering::Less) => "negative",
        None => "undetermined",
    }
}

fn mc_record(report: &MCReport, verbose: bool, rotation: Option<&BigRational>) -> OutputRecord {
    let mut request = Map::new();
    request.insert("a".into(), json!([report.a.l(), report.a.m()]));
    request.insert("b".into(), json!([report.b.l(), report.b.m()]));
    if let Some(r) = rotation {
        request.insert("rotation".into(), json!(r.to_string()));
    }
    let mut detail = Map::new();
    detail.insert("sign".into(), json!(sign_word(report.sign())));
    if verbose {
        let summands: Vec<Value> = report
            .summands
            .iter()
            .map(|s| json!({"l3": s.l3, "g_squared_per_pi": s.g_squared.to_string(), "weight": s.weight}))
            .collect();
        detail.insert("summands".into(), Value::Array(summands));
        detail.insert("delta_term".into(), json!(report.delta_term.to_string()));
        detail.insert(
            "coriolis_slope".into(),
            serde_json::to_value(terms_of_mixed(&PiMixed::zero(), &report.coriolis_slope)).expect("terms"),
        );
    }
    OutputRecord {
        command: "mc".into(),
        request,
        status: Status::Ok,
        exact: Some(terms_of_mixed(&report.value, &report.coriolis_term)),
        value: Some(report.value_float),
        detail: Some(Value::Object(detail)),
    }
}

fn table_records(l1: u32, l2_max: u32) -> Result<(Vec<TableRow>, Vec<OutputRecord>), CliError> {
    let table = critical_table(l1, l2_max).map_err(|e| usage(e.to_string()))?;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for cell in &table.cells {
        rows.push(TableRow {
            l2: cell.l2,
            m2: cell.m2,
            ratio: cell.ratio.value(),
            direction: cell.ratio.direction(),
            status: status_of(&cell.ratio),
        });
        let mut request = Map::new();
        request.insert("l1".into(), json!(l1));
        request.insert("l2".into(), json!(cell.l2));
        request.insert("m2".into(), json!(cell.m2));
        let (exact, detail) = match &cell.ratio {
            CriticalRatio::Defined { exact, direction } => (
                Some(terms_of_mixed(&PiMixed::zero(), exact)),
                Some(json!({"direction": direction.symbol()})),
            ),
            CriticalRatio::Undefined(reason) => (None, Some(json!({"reason": reason.as_str()}))),
            CriticalRatio::NotApplicable => (None, None),
        };
        records.push(OutputRecord {
            command: "critical-table".into(),
            request,
            status: status_of(&cell.ratio),
            exact,
            value: cell.ratio.value(),
            detail,
        });
    }
    Ok((rows, records))
}

fn emit(out: &mut dyn Write, record: &OutputRecord) -> Result<(), CliError> {
    writeln!(out, "{}", record.to_json_line())?;
    Ok(())
}

fn run_verify(out: &mut dyn Write, suite: Option<Suite>, lmax: Option<u32>) -> Result<bool, CliError> {
    let suites = match suite {
        Some(s) => vec![s],
        None => vec![Suite::Wigner, Suite::Structure, Suite::Oracle, Suite::Theorem, Suite::Table],
    };
    let mut all_passed = true;
    for s in suites {
        let l = lmax.unwrap_or(s.default_lmax());
        if l > MAX_DEGREE {
            return Err(usage(format!("--lmax {l} exceeds {MAX_DEGREE}")));
        }
        let summary = match s {
            Suite::Wigner => {
                let sym = check_symmetries(l);
                let closed = check_closed_forms(l);
                let failures: Vec<Value> = sym
                    .failures
                    .iter()
                    .chain(&closed.failures)
                    .map(|(k, a)| json!({"identity": k, "l": a.l, "m": a.m}))
                    .collect();
                json!({"checks": sym.checks + closed.checks, "failures": failures})
            }
            Suite::Structure => {
                let r = validate_symmetries(l);
                json!({"checks": r.checks, "nonzero": r.nonzero, "failures": r.failures})
            }
            Suite::Oracle => {
                let r = StructureOracle::new(l).compare_all();
                let failures: Vec<Value> = if r.max_deviation <= 1e-9 {
                    Vec::new()
                } else {
                    vec![json!({"worst": r.worst, "deviation": r.max_deviation})]
                };
                json!({"checks": r.tuples, "max_deviation": r.max_deviation, "failures": failures})
            }
            Suite::Theorem => {
                let r = theorem_scan(l);
                let mut failures: Vec<Value> = r
                    .falsifications
                    .iter()
                    .map(|f| {
                        json!({"a": [f.a.l(), f.a.m()], "b": [f.b.l(), f.b.m()],
                               "summands": f.summands.iter().map(|s| json!([s.l3, s.g_squared.to_string(), s.weight])).collect::<Vec<_>>()})
                    })
                    .collect();
                failures.extend(r.zonal_positive.iter().map(|z| json!({"zonal_positive": z})));
                json!({
                    "checks": r.part_i_checked + r.part_ii_checked + r.zonal_checked,
                    "chains": r.chains.len(),
                    "chains_hold": r.chains_hold(),
                    "extended_checked": r.extended_checked,
                    "extended_nonpositive": r.extended_nonpositive,
                    "failures": failures,
                })
            }
            Suite::Table => {
                let cells = compare_published_table();
                let failures: Vec<&_> = cells.iter().filter(|c| !c.passed()).collect();
                let worst = cells.iter().filter_map(|c| c.relative_error).fold(0.0, f64::max);
                json!({"checks": cells.len(), "max_relative_error": worst, "failures": failures})
            }
        };
        let passed = summary["failures"].as_array().is_some_and(|f| f.is_empty());
        all_passed &= passed;
        let mut line = Map::new();
        line.insert("suite".into(), json!(s.name()));
        if s != Suite::Table {
            line.insert("lmax".into(), json!(l));
        }
        line.insert("passed".into(), json!(passed));
        if let Value::Object(fields) = summary {
            line.extend(fields);
        }
        writeln!(out, "{}", Value::Object(line))?;
    }
    Ok(all_passed)
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<bool, CliError> {
    match cli.command {
        Command::Wigner3j { l, m } => {
            for (&li, &mi) in l.iter().zip(&m) {
                if li > MAX_DEGREE {
                    return Err(usage(format!("degree {li} exceeds {MAX_DEGREE}")));
                }
                if mi.unsigned_abs() > li {
                    return Err(usage(format!("order {mi} exceeds degree {li}")));
                }
            }
            let args = ThreeJArgs::new(l[0], l[1], l[2], m[0], m[1], m[2]).map_err(|e| usage(e.to_string()))?;
            let value = threej(args);
            let parity_zero = args.m == [0, 0, 0] && (l[0] + l[1] + l[2]) % 2 == 1;
            let status = if !args.is_allowed() || parity_zero {
                Status::ZeroBySelectionRule
            } else {
                Status::Ok
            };
            let mut request = Map::new();
            request.insert("l".into(), json!(l));
            request.insert("m".into(), json!(m));
            emit(
                out,
                &OutputRecord {
                    command: "wigner3j".into(),
                    request,
                    status,
                    exact: Some(terms_of_root(&value)),
                    value: Some(value.to_f64()),
                    detail: None,
                },
            )?;
            Ok(true)
        }
        Command::Mc {
            a,
            b,
            rotation,
            verbose,
        } => {
            let (ia, ib) = (index(&a, "--a")?, index(&b, "--b")?);
            let report = match &rotation {
                Some(r) => mc_coriolis(ia, ib, r),
                None => mc_flat(ia, ib),
            }
            .map_err(|e| usage(e.to_string()))?;
            emit(out, &mc_record(&report, verbose, rotation.as_ref()))?;
            Ok(true)
        }
        Command::CriticalTable { l1, l2_max, format } => {
            if l1 > MAX_DEGREE || l2_max > MAX_DEGREE {
                return Err(usage(format!("degrees are limited to {MAX_DEGREE}")));
            }
            let (rows, records) = table_records(l1, l2_max)?;
            match format {
                Format::Csv => out.write_all(encode_table_csv(&rows).as_bytes())?,
                Format::Json => {
                    for r in &records {
                        emit(out, r)?;
                    }
                }
            }
            Ok(true)
        }
        Command::Verify { suite, lmax } => run_verify(out, suite, lmax),
        Command::Rhw {
            amplitude,
            c,
            wave,
            probe,
            k,
            threshold,
        } => {
            let w = index(&wave, "--wave")?;
            if w.m() == 0 {
                return Err(usage(
                    "--wave order must be nonzero: the Rossby-Haurwitz criterion assumes m1 != 0",
                ));
            }
            let k = k.unwrap_or_else(|| BigRational::from_integer(0.into()));
            let mut request = Map::new();
            request.insert("wave".into(), json!([w.l(), w.m()]));
            request.insert("K".into(), json!(k.to_string()));
            if let Some(m) = threshold {
                let m = i32::try_from(m).map_err(|_| usage("--threshold out of range"))?;
                let t = rhw_threshold(w.l(), w.m(), m, &k).map_err(|e| usage(e.to_string()))?;
                request.insert("threshold".into(), json!(m));
                let exact = if t.pi_coefficient == BigRational::from_integer(0.into()) {
                    vec![ExactTerm::zero()]
                } else {
                    vec![ExactTerm::rational_term(&t.pi_coefficient, 1.0)]
                };
                emit(
                    out,
                    &OutputRecord {
                        command: "rhw".into(),
                        request,
                        status: Status::Ok,
                        exact: Some(exact),
                        value: Some(t.value),
                        detail: None,
                    },
                )?;
                return Ok(true);
            }
            let (Some(amp), Some(c), Some(probe)) = (amplitude, c, probe) else {
                return Err(usage("rhw needs --A, --C and --probe unless --threshold is given"));
            };
            let p = index(&probe, "--probe")?;
            let wave = RHWave::new(ExactComplex::new(amp[0].clone(), amp[1].clone()), c.clone(), w)
                .map_err(|e| usage(e.to_string()))?;
            let rotation = -(&k * &c);
            let report = rhw_mc(&wave, p, &rotation).map_err(|e| usage(e.to_string()))?;
            request.insert("A".into(), json!([amp[0].to_string(), amp[1].to_string()]));
            request.insert("C".into(), json!(c.to_string()));
            request.insert("probe".into(), json!([p.l(), p.m()]));
            emit(
                out,
                &OutputRecord {
                    command: "rhw".into(),
                    request,
                    status: Status::Ok,
                    exact: Some(terms_of_mixed(&report.value, &PerSqrtPi::zero())),
                    value: Some(report.value_float),
                    detail: Some(json!({"sign": sign_word(report.sign())})),
                },
            )?;
            Ok(true)
        }
    }
}

/// Run the CLI on `args` (including the program name), writing results to
/// `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match parse_args(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(e @ CliError::Io(_)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
