//! JSON report and sidecar schemas.
//!
//! Reports embed the full reduction trace so `formreg verify` can replay it
//! later; matrices are serialized as entry-literal strings in the same
//! format the matrix files use. Struct field order is the serialization
//! order, which keeps reports diffable.

use formreg::{
    FormKind, Matrix, RankReport, ReductionTrace, RegularizingDecomposition, StepRecord,
};
use serde::{Deserialize, Serialize};

use crate::io::EntryScalar;
use crate::CliError;

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixDto {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<String>,
}

impl MatrixDto {
    pub fn from_matrix<T: EntryScalar>(m: &Matrix<T>) -> Self {
        MatrixDto {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.entries().iter().map(EntryScalar::write_literal).collect(),
        }
    }

    pub fn to_matrix<T: EntryScalar>(&self) -> Result<Matrix<T>, CliError> {
        if self.entries.len() != self.rows * self.cols {
            return Err(CliError::Parse(format!(
                "matrix dto claims {}x{} but carries {} entries",
                self.rows,
                self.cols,
                self.entries.len()
            )));
        }
        let mut entries = Vec::with_capacity(self.entries.len());
        for token in &self.entries {
            entries.push(T::parse_literal(token).map_err(CliError::Parse)?);
        }
        Ok(Matrix::new(self.rows, self.cols, entries).expect("counted above"))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankReportDto {
    pub rank: usize,
    pub smallest_accepted: Option<f64>,
    pub threshold: Option<f64>,
}

impl RankReportDto {
    fn from_report(r: &RankReport) -> Self {
        RankReportDto {
            rank: r.rank,
            smallest_accepted: r.smallest_accepted,
            threshold: r.threshold,
        }
    }

    fn to_report(&self) -> RankReport {
        RankReport {
            rank: self.rank,
            smallest_accepted: self.smallest_accepted,
            threshold: self.threshold,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepDto {
    pub m1: usize,
    pub m2: usize,
    pub s: MatrixDto,
    pub s1: MatrixDto,
    pub d: MatrixDto,
    pub e: MatrixDto,
    pub f: MatrixDto,
    pub c1: MatrixDto,
    pub a2: MatrixDto,
    pub rank_reports: [RankReportDto; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceDto {
    pub input_size: usize,
    pub form: String,
    pub steps: Vec<StepDto>,
    pub regular: MatrixDto,
    pub terminal_report: RankReportDto,
    pub reference_scale: Option<f64>,
}

impl TraceDto {
    pub fn from_trace<T: EntryScalar>(trace: &ReductionTrace<T>) -> Self {
        TraceDto {
            input_size: trace.input_size,
            form: form_token(trace.form).to_string(),
            steps: trace
                .steps
                .iter()
                .map(|s| StepDto {
                    m1: s.m1,
                    m2: s.m2,
                    s: MatrixDto::from_matrix(&s.s),
                    s1: MatrixDto::from_matrix(&s.s1),
                    d: MatrixDto::from_matrix(&s.d),
                    e: MatrixDto::from_matrix(&s.e),
                    f: MatrixDto::from_matrix(&s.f),
                    c1: MatrixDto::from_matrix(&s.c1),
                    a2: MatrixDto::from_matrix(&s.a2),
                    rank_reports: [
                        RankReportDto::from_report(&s.rank_reports[0]),
                        RankReportDto::from_report(&s.rank_reports[1]),
                    ],
                })
                .collect(),
            regular: MatrixDto::from_matrix(&trace.regular),
            terminal_report: RankReportDto::from_report(&trace.terminal_report),
            reference_scale: trace.reference_scale,
        }
    }

    pub fn to_trace<T: EntryScalar>(&self) -> Result<ReductionTrace<T>, CliError> {
        let mut steps = Vec::with_capacity(self.steps.len());
        for s in &self.steps {
            steps.push(StepRecord {
                m1: s.m1,
                m2: s.m2,
                s: s.s.to_matrix()?,
                s1: s.s1.to_matrix()?,
                d: s.d.to_matrix()?,
                e: s.e.to_matrix()?,
                f: s.f.to_matrix()?,
                c1: s.c1.to_matrix()?,
                a2: s.a2.to_matrix()?,
                rank_reports: [s.rank_reports[0].to_report(), s.rank_reports[1].to_report()],
            });
        }
        Ok(ReductionTrace {
            input_size: self.input_size,
            form: parse_form(&self.form)?,
            steps,
            regular: self.regular.to_matrix()?,
            terminal_report: self.terminal_report.to_report(),
            reference_scale: self.reference_scale,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepMarginDto {
    pub step: usize,
    pub row_margin: Option<f64>,
    pub coupling_margin: Option<f64>,
}

/// The full decomposition report written by `formreg regularize`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub schema: u32,
    pub input_digest: String,
    pub field: String,
    pub arithmetic: String,
    pub form: String,
    pub tol_scale: f64,
    pub m_sequence: Vec<usize>,
    pub blocks: Vec<usize>,
    pub regular: MatrixDto,
    pub step_margins: Vec<StepMarginDto>,
    pub terminal_margin: Option<f64>,
    pub min_margin: Option<f64>,
    pub warnings: Vec<String>,
    pub trace: TraceDto,
}

impl DecompositionReport {
    pub fn new<T: EntryScalar>(
        input_digest: String,
        form: FormKind,
        tol_scale: f64,
        decomposition: &RegularizingDecomposition<T>,
        trace: &ReductionTrace<T>,
    ) -> Self {
        let spec = formreg::ScalarSpec::of::<T>();
        let mut warnings = Vec::new();
        if trace.is_ill_conditioned() {
            warnings.push(
                "ill-conditioned: the regular part has a singular value within 10x of the rank threshold"
                    .to_string(),
            );
        }
        if trace.min_margin() <= 10.0 {
            warnings.push(
                "fragile: a structural decision lies within the accumulated drift estimate; cross-check with the exact backend"
                    .to_string(),
            );
        }
        DecompositionReport {
            schema: REPORT_SCHEMA,
            input_digest,
            field: crate::io::field_token(spec.field).to_string(),
            arithmetic: crate::io::arithmetic_token(spec.arithmetic).to_string(),
            form: form_token(form).to_string(),
            tol_scale,
            m_sequence: decomposition.m_sequence.clone(),
            blocks: decomposition.blocks.clone(),
            regular: MatrixDto::from_matrix(&decomposition.regular),
            step_margins: trace
                .steps
                .iter()
                .enumerate()
                .map(|(i, s)| StepMarginDto {
                    step: i + 1,
                    row_margin: finite(s.rank_reports[0].margin()),
                    coupling_margin: finite(s.rank_reports[1].margin()),
                })
                .collect(),
            terminal_margin: finite(trace.terminal_report.margin()),
            min_margin: finite(trace.min_margin()),
            warnings,
            trace: TraceDto::from_trace(trace),
        }
    }
}

/// Ground-truth sidecar written next to synthesized instances.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroundTruthSidecar {
    pub schema: u32,
    pub generator: String,
    pub seed: u64,
    pub scramble: String,
    pub field: String,
    pub arithmetic: String,
    pub form: String,
    pub entry_bound: i64,
    pub total_size: usize,
    pub regular_size: usize,
    pub blocks: Vec<usize>,
    pub m_sequence: Vec<usize>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn form_token(form: FormKind) -> &'static str {
    match form {
        FormKind::Bilinear => "bilinear",
        FormKind::Sesquilinear => "sesquilinear",
    }
}

pub fn parse_form(token: &str) -> Result<FormKind, CliError> {
    match token {
        "bilinear" => Ok(FormKind::Bilinear),
        "sesquilinear" => Ok(FormKind::Sesquilinear),
        other => Err(CliError::Parse(format!("unknown form `{other}`"))),
    }
}
