//! Job configuration, dispatch and JSON reporting for the `gmexp` binary.

pub mod parse;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::time::Instant;

use gm_exponents::arrangements::{
    candidate_exponents, convolution_candidate_set, determinant_d, determinant_poly, gcd_criterion, lambda_poly, oracle_suite,
    Arrangement, ArrangementError,
};
use gm_exponents::koszul::{generic_system, scan_alphas, MAX_CELLS_ENV};
use gm_exponents::operators::{apply, invert_diagonal, invertible_on, OperatorError};
use gm_exponents::rational::format_rational;
use gm_exponents::reduction::{reduce_family, scale_exponents, univariate_regular_exponents, FamilySpec, ReductionError, UnivariateOperator};
use gm_exponents::ring::RingElement;
use gm_exponents::{DegreeWindow, EngineError, EngineOptions, ExecMode, ProblemInstance, Rational, SolverPath, Verdict, WindowSchedule};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::parse::{format_operator, infer_nvars, parse_alpha, parse_operator, parse_poly, parse_univariate, parse_upoly, ParseError};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("limit: {0}")]
    Limit(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Limit(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::ResourceLimit { .. } => CliError::Limit(e.to_string()),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

impl From<ArrangementError> for CliError {
    fn from(e: ArrangementError) -> Self {
        match e {
            ArrangementError::Engine(inner) => inner.into(),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

impl From<ReductionError> for CliError {
    fn from(e: ReductionError) -> Self {
        match e {
            ReductionError::Engine(inner) => inner.into(),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

impl From<OperatorError> for CliError {
    fn from(e: OperatorError) -> Self {
        CliError::Precondition(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    ExponentTest,
    Arrangement,
    Family,
    Univariate,
    OperatorCheck,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleConfig {
    pub t_start: i64,
    pub x_start: Option<u32>,
    pub t_step: i64,
    pub x_step: u32,
    pub max_rounds: usize,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        let d = WindowSchedule::default();
        ScheduleConfig {
            t_start: d.t_start,
            x_start: d.x_start,
            t_step: d.t_step,
            x_step: d.x_step,
            max_rounds: d.max_rounds,
        }
    }
}

impl From<&ScheduleConfig> for WindowSchedule {
    fn from(s: &ScheduleConfig) -> Self {
        WindowSchedule {
            t_start: s.t_start,
            x_start: s.x_start,
            t_step: s.t_step,
            x_step: s.x_step,
            max_rounds: s.max_rounds,
        }
    }
}

/// Explicit window for `operator-check`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowConfig {
    pub tmin: i64,
    pub tmax: i64,
    pub xmax: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobConfig {
    pub mode: Mode,
    /// Number of x variables; inferred from the expressions when absent.
    pub n: Option<usize>,
    pub f: Option<String>,
    pub g: Option<String>,
    pub p: Option<String>,
    pub q: Option<String>,
    pub r: Option<String>,
    pub d: Option<u32>,
    pub weights: Option<Vec<u32>>,
    pub alphas: Vec<String>,
    pub schedule: ScheduleConfig,
    pub path: SolverPath,
    pub sequential: bool,
    pub koszul: bool,
    /// `A0` for univariate mode, or a full `A0=...; A1=...` list.
    pub a0: Option<String>,
    pub higher: BTreeMap<usize, String>,
    pub operator: Option<String>,
    pub window: Option<WindowConfig>,
    pub element: Option<String>,
    /// `l` range and `m` for the determinant table.
    pub l_range: (i64, i64),
    pub m: u64,
    pub dump_matrix: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

impl JobConfig {
    pub fn new(mode: Mode) -> Self {
        JobConfig {
            mode,
            n: None,
            f: None,
            g: None,
            p: None,
            q: None,
            r: None,
            d: None,
            weights: None,
            alphas: Vec::new(),
            schedule: ScheduleConfig::default(),
            path: SolverPath::Auto,
            sequential: false,
            koszul: false,
            a0: None,
            higher: BTreeMap::new(),
            operator: None,
            window: None,
            element: None,
            l_range: (-3, 3),
            m: 0,
            dump_matrix: None,
            output: None,
        }
    }

    fn present(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let flags = [
            ("f", self.f.is_some()),
            ("g", self.g.is_some()),
            ("p", self.p.is_some()),
            ("q", self.q.is_some()),
            ("r", self.r.is_some()),
            ("d", self.d.is_some()),
            ("weights", self.weights.is_some()),
            ("alphas", !self.alphas.is_empty()),
            ("a0", self.a0.is_some()),
            ("higher", !self.higher.is_empty()),
            ("operator", self.operator.is_some()),
            ("window", self.window.is_some()),
            ("element", self.element.is_some()),
            ("dump_matrix", self.dump_matrix.is_some()),
        ];
        for (name, on) in flags {
            if on {
                out.push(name);
            }
        }
        out
    }

    /// Checks that the mode's required fields are present and no foreign ones are.
    pub fn validate(&self) -> Result<(), CliError> {
        let (required, optional): (&[&str], &[&str]) = match self.mode {
            Mode::ExponentTest => (&["f", "alphas"], &["g", "dump_matrix"]),
            Mode::Arrangement => (&["weights"], &["alphas"]),
            Mode::Family => (&["p", "alphas"], &["q", "r", "d"]),
            Mode::Univariate => (&["a0"], &["higher"]),
            Mode::OperatorCheck => (&["operator", "window"], &["element", "g"]),
        };
        let present = self.present();
        for req in required {
            if !present.contains(req) {
                return Err(CliError::Precondition(format!("missing required field '{req}'")));
            }
        }
        for p in &present {
            if !required.contains(p) && !optional.contains(p) {
                return Err(CliError::Precondition(format!("field '{p}' is not used by this mode")));
            }
        }
        if self.l_range.0 > self.l_range.1 {
            return Err(CliError::Precondition("l range is empty".into()));
        }
        if self.schedule.max_rounds < 2 {
            return Err(CliError::Precondition("max-rounds must be at least 2".into()));
        }
        Ok(())
    }

    fn nvars(&self) -> usize {
        self.n.unwrap_or_else(|| {
            let srcs = [&self.f, &self.g, &self.p, &self.q, &self.r, &self.operator, &self.element];
            infer_nvars(srcs.iter().filter_map(|s| s.as_deref()))
        })
    }

    fn engine_options(&self) -> EngineOptions {
        EngineOptions {
            path: self.path,
            exec: if self.sequential { ExecMode::Sequential } else { ExecMode::default() },
            koszul: self.koszul,
            ..EngineOptions::from_env()
        }
    }

    fn parsed_alphas(&self) -> Result<Vec<Rational>, CliError> {
        Ok(self.alphas.iter().map(|a| parse_alpha(a)).collect::<Result<_, _>>()?)
    }
}

fn q(r: &Rational) -> String {
    format_rational(r)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn report_row(alpha: &Rational, report: &gm_exponents::ExponentReport) -> Value {
    let mut v = to_value(report);
    v["alpha"] = json!(q(alpha));
    v
}

/// Runs the job and returns the report. The `timing_ms` field is the only nondeterministic part.
pub fn run(cfg: &JobConfig) -> Result<Value, CliError> {
    cfg.validate()?;
    let start = Instant::now();
    let (results, windows) = match cfg.mode {
        Mode::ExponentTest => run_exponent_test(cfg)?,
        Mode::Arrangement => run_arrangement(cfg)?,
        Mode::Family => run_family(cfg)?,
        Mode::Univariate => (run_univariate(cfg)?, Value::Null),
        Mode::OperatorCheck => run_operator_check(cfg)?,
    };
    let timing_ms = start.elapsed().as_millis() as u64;
    Ok(json!({
        "schema": SCHEMA,
        "version": env!("CARGO_PKG_VERSION"),
        "mode": cfg.mode,
        "input": to_value(cfg),
        "max_cells_env": MAX_CELLS_ENV,
        "results": results,
        "windows": windows,
        "timing_ms": timing_ms,
    }))
}

fn engine_scan(
    template: &ProblemInstance,
    alphas: &[Rational],
    cfg: &JobConfig,
) -> Result<(Vec<(Rational, gm_exponents::ExponentReport)>, Vec<DegreeWindow>), CliError> {
    let windows = WindowSchedule::from(&cfg.schedule).windows(template);
    let reports = scan_alphas(template, alphas, &windows, &cfg.engine_options());
    let mut out = Vec::new();
    for (a, r) in alphas.iter().zip(reports) {
        out.push((a.clone(), r?));
    }
    Ok((out, windows))
}

fn run_exponent_test(cfg: &JobConfig) -> Result<(Value, Value), CliError> {
    let n = cfg.nvars();
    let f = parse_poly(cfg.f.as_deref().unwrap_or("0"), n)?;
    let g = parse_poly(cfg.g.as_deref().unwrap_or("1"), n)?;
    let alphas = cfg.parsed_alphas()?;
    let template = ProblemInstance::new(f, g, Rational::from_integer(0.into()))?;
    let (rows, windows) = engine_scan(&template, &alphas, cfg)?;
    let mut results: Vec<Value> = rows.iter().map(|(a, r)| report_row(a, r)).collect();
    if let Some(path) = &cfg.dump_matrix {
        let first = template.with_alpha(alphas[0].clone());
        let (a, targets) = generic_system(&first, &windows[0], &cfg.engine_options())?;
        a.write_triplets(BufWriter::new(File::create(path)?))?;
        results[0]["matrix_dump"] = json!({
            "path": path,
            "rows": a.nrows(),
            "cols": a.ncols(),
            "nnz": a.nnz(),
            "target_rows": targets.len(),
        });
    }
    Ok((Value::Array(results), to_value(&windows)))
}

fn run_arrangement(cfg: &JobConfig) -> Result<(Value, Value), CliError> {
    let weights = cfg.weights.clone().unwrap_or_default();
    let arr = Arrangement::new(weights.clone())?;
    let extras = cfg.parsed_alphas()?;
    let candidates: Vec<String> = candidate_exponents(&arr).iter().map(q).collect();
    let tail = &weights[1..];
    let gcd = if tail.len() >= 2 { gcd_criterion(tail).ok() } else { None };
    let convolution = convolution_candidate_set(&weights, 1)
        .ok()
        .map(|s| s.iter().map(q).collect::<Vec<_>>());

    let mut det_alphas: Vec<Rational> = candidate_exponents(&arr).into_iter().collect();
    det_alphas.extend(extras.iter().cloned());
    det_alphas.sort();
    det_alphas.dedup();
    let determinant = if weights[0] >= 2 {
        let mut table = Vec::new();
        for l in cfg.l_range.0..=cfg.l_range.1 {
            let poly = determinant_poly(&arr, l, cfg.m)?;
            let (roots, _) = poly.rational_roots();
            let values: BTreeMap<String, Value> = det_alphas
                .iter()
                .map(|a| {
                    let v = match determinant_d(&arr, a, l, cfg.m) {
                        Ok(d) => json!(q(&d)),
                        Err(ArrangementError::Pole) => json!("pole"),
                        Err(e) => json!(e.to_string()),
                    };
                    (q(a), v)
                })
                .collect();
            table.push(json!({
                "l": l,
                "polynomial_part": poly.display_in("a"),
                "roots": roots.iter().map(|(r, k)| json!([q(r), k])).collect::<Vec<_>>(),
                "values": values,
            }));
        }
        json!({ "m": cfg.m, "table": table })
    } else {
        Value::Null
    };

    let n = arr.n();
    let engine_ready = n >= 1 && weights[1..].iter().all(|w| *w > 0);
    let (oracle, windows) = if engine_ready {
        let oracle = oracle_suite(&arr, &extras, &WindowSchedule::from(&cfg.schedule), &cfg.engine_options())?;
        let f = lambda_poly(&arr)?;
        let template = ProblemInstance::new(f, RingElement::one(n), Rational::from_integer(0.into()))?;
        (oracle, to_value(&WindowSchedule::from(&cfg.schedule).windows(&template)))
    } else {
        (Vec::new(), Value::Null)
    };
    let oracle_rows: Vec<Value> = oracle
        .iter()
        .map(|row| {
            let mut v = to_value(row);
            v["estimates"] = to_value(&row.report.estimates);
            v["path"] = to_value(&row.report.path);
            v
        })
        .collect();
    let disagreements = oracle.iter().filter(|r| r.agree == Some(false)).count();
    let undetermined = oracle.iter().filter(|r| r.verdict == Verdict::Undetermined).count();
    Ok((
        json!({
            "weights": weights,
            "candidate_set": candidates,
            "gcd_criterion": gcd,
            "convolution_set": convolution,
            "determinant": determinant,
            "oracle": oracle_rows,
            "disagreements": disagreements,
            "undetermined": undetermined,
        }),
        windows,
    ))
}

fn run_family(cfg: &JobConfig) -> Result<(Value, Value), CliError> {
    let n = cfg.nvars();
    let fam = FamilySpec {
        p: parse_poly(cfg.p.as_deref().unwrap_or("0"), n)?,
        q: parse_poly(cfg.q.as_deref().unwrap_or("1"), n)?,
        r: parse_poly(cfg.r.as_deref().unwrap_or("1"), n)?,
        d: cfg.d.unwrap_or(1),
    };
    let (template, scale) = reduce_family(&fam)?;
    let alphas = cfg.parsed_alphas()?;
    let (rows, windows) = engine_scan(&template, &alphas, cfg)?;
    let found: Vec<Rational> = rows
        .iter()
        .filter(|(_, r)| r.verdict == Verdict::Exponent)
        .map(|(a, _)| a.clone())
        .collect();
    let scaled: Vec<String> = scale_exponents(&found, scale).iter().map(q).collect();
    Ok((
        json!({
            "f": template.f().to_string(),
            "g": template.g().to_string(),
            "scale": scale,
            "reports": rows.iter().map(|(a, r)| report_row(a, r)).collect::<Vec<_>>(),
            "scaled_exponents": scaled,
        }),
        to_value(&windows),
    ))
}

fn run_univariate(cfg: &JobConfig) -> Result<Value, CliError> {
    let src = cfg.a0.as_deref().unwrap_or("");
    let mut coeffs = if src.contains('=') {
        parse_univariate(src)?
    } else {
        BTreeMap::from([(0, parse_upoly(src)?)])
    };
    for (i, body) in &cfg.higher {
        coeffs.insert(*i, parse_upoly(body)?);
    }
    let op = UnivariateOperator::new(coeffs);
    let rp = univariate_regular_exponents(&op)?;
    let mut v = to_value(&rp);
    v["a0"] = json!(op.a0().to_string());
    v["coefficients"] = op.coefficients.iter().map(|(i, p)| (format!("A{i}"), json!(p.to_string()))).collect();
    Ok(v)
}

fn run_operator_check(cfg: &JobConfig) -> Result<(Value, Value), CliError> {
    let n = cfg.nvars();
    let op = parse_operator(cfg.operator.as_deref().unwrap_or(""), n)?;
    let g = parse_poly(cfg.g.as_deref().unwrap_or("1"), n)?;
    let wc = cfg.window.expect("validated");
    let w = DegreeWindow::new(wc.tmin, wc.tmax, wc.xmax, 0).map_err(|e| CliError::Precondition(e.to_string()))?;
    let verdict = match invertible_on(&op, &w, n) {
        Ok(v) => json!({
            "diagonal": true,
            "invertible": v.invertible,
            "witness": v.witness.as_ref().map(|wt| json!({
                "monomial": wt.monomial.to_string(),
                "eigenvalue": q(&wt.eigenvalue),
            })),
            "witness_in_window": v.witness_in_window,
        }),
        Err(OperatorError::NonDiagonal(why)) => json!({ "diagonal": false, "reason": why }),
        Err(e) => return Err(e.into()),
    };
    let mut out = json!({ "operator": format_operator(&op), "invertibility": verdict });
    if let Some(src) = &cfg.element {
        let e = parse_poly(src, n)?;
        out["element"] = json!(e.to_string());
        out["image"] = json!(apply(&op, &e, &g)?.to_string());
        if out["invertibility"]["invertible"] == json!(true) {
            out["preimage"] = json!(invert_diagonal(&op, &e, &w)?.to_string());
        }
    }
    Ok((out, to_value(&w)))
}

/// Drops the timing field so two reports can be compared byte for byte.
pub fn without_timing(mut v: Value) -> Value {
    if let Some(obj) = v.as_object_mut() {
        obj.remove("timing_ms");
    }
    v
}

/// Writes the report to `cfg.output` or returns it as a string for stdout.
pub fn emit(cfg: &JobConfig, report: &Value) -> Result<Option<String>, CliError> {
    let text = serde_json::to_string_pretty(report).expect("json");
    match &cfg.output {
        Some(path) => {
            std::fs::write(path, text + "\n")?;
            Ok(None)
        }
        None => Ok(Some(text)),
    }
}
