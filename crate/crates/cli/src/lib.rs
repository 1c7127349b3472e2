//! Command-line front end: matrix I/O, decomposition reports, comparison
//! verdicts, and trace verification.

pub mod io;
pub mod report;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use formreg::{
    check_congruence_witness, compare, regularize, synthesize, verify_trace, Arithmetic,
    FormKind, Matrix, Scramble, SynthesisSpec, TolPolicy, Verdict, GENERATOR_ID,
};
use thiserror::Error;

use io::{read_matrix_file, with_matrix, AnyMatrix, EntryScalar};
use report::{form_token, DecompositionReport, GroundTruthSidecar, TraceDto, REPORT_SCHEMA};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
/// `regularize` only: the result is numerically fragile.
pub const EXIT_ILL_CONDITIONED: i32 = 2;
pub const EXIT_NOT_EQUIVALENT: i32 = 3;
pub const EXIT_REDUCED_TO_REGULAR_PARTS: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] formreg::Error),
    #[error("{0}")]
    Io(String),
}

#[derive(Debug, Parser)]
#[command(
    name = "formreg",
    about = "Regularizing decompositions of bilinear and sesquilinear forms",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Bilinear,
    Sesquilinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldArg {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScrambleArg {
    None,
    Unitary,
    General,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the regularizing decomposition of a matrix file.
    Regularize {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "bilinear")]
        form: FormArg,
        /// Arithmetic backend; defaults to the file's own arithmetic.
        #[arg(long, value_enum)]
        backend: Option<BackendArg>,
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
        /// Print the full JSON report instead of a text summary.
        #[arg(long, conflicts_with = "text")]
        json: bool,
        #[arg(long)]
        text: bool,
        /// Also write the JSON report to this path (verifiable later).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide topological congruence of two matrix files up to regular parts.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value = "bilinear")]
        form: FormArg,
        #[arg(long, value_enum)]
        backend: Option<BackendArg>,
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
        /// Congruence witness between the regular parts.
        #[arg(long)]
        witness: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-9)]
        witness_tol: f64,
    },
    /// Generate a seeded instance with a known decomposition.
    Synthesize {
        #[arg(long, default_value_t = 0)]
        regular_size: usize,
        /// Singular block sizes, comma separated (e.g. `--blocks 3,1,1`).
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        blocks: Vec<usize>,
        #[arg(long, value_enum, default_value = "none")]
        scramble: ScrambleArg,
        /// Seed; the FORMREG_SEED environment variable overrides it.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "real")]
        field: FieldArg,
        #[arg(long, value_enum, default_value = "exact")]
        arithmetic: BackendArg,
        #[arg(long, default_value_t = 3)]
        entry_bound: i64,
        /// Use this matrix file as the regular part instead of sampling one.
        #[arg(long)]
        regular: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "bilinear")]
        form: FormArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Replay a JSON report against its input matrix.
    Verify {
        input: PathBuf,
        report: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Regularize {
            input,
            form,
            backend,
            tol_scale,
            json,
            text: _,
            out,
        } => cmd_regularize(&input, form, backend, tol_scale, json, out.as_deref()),
        Command::Compare {
            a,
            b,
            form,
            backend,
            tol_scale,
            witness,
            witness_tol,
        } => cmd_compare(&a, &b, form, backend, tol_scale, witness.as_deref(), witness_tol),
        Command::Synthesize {
            regular_size,
            blocks,
            scramble,
            seed,
            field,
            arithmetic,
            entry_bound,
            regular,
            form,
            out,
        } => cmd_synthesize(
            regular_size,
            blocks,
            scramble,
            seed,
            field,
            arithmetic,
            entry_bound,
            regular.as_deref(),
            form,
            &out,
        ),
        Command::Verify { input, report, tol } => cmd_verify(&input, &report, tol),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn to_form(arg: FormArg) -> FormKind {
    match arg {
        FormArg::Bilinear => FormKind::Bilinear,
        FormArg::Sesquilinear => FormKind::Sesquilinear,
    }
}

fn to_arithmetic(arg: BackendArg) -> Arithmetic {
    match arg {
        BackendArg::Exact => Arithmetic::Exact,
        BackendArg::Float => Arithmetic::Float,
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

// ── regularize ───────────────────────────────────────────────────────

fn cmd_regularize(
    input: &Path,
    form: FormArg,
    backend: Option<BackendArg>,
    tol_scale: f64,
    json: bool,
    out: Option<&Path>,
) -> Result<i32, CliError> {
    let any = read_matrix_file(input)?;
    let target = backend.map(to_arithmetic).unwrap_or(any.spec().arithmetic);
    let any = any.convert_arithmetic(target)?;
    let form = to_form(form);
    let tol = TolPolicy::new(tol_scale);
    let digest = io::digest(&any);

    fn build<T: EntryScalar>(
        m: &Matrix<T>,
        form: FormKind,
        tol: &TolPolicy,
        digest: String,
    ) -> Result<DecompositionReport, CliError> {
        let (d, trace) = regularize(m, form, tol)?;
        Ok(DecompositionReport::new(digest, form, tol.tol_scale, &d, &trace))
    }
    let report = with_matrix!(&any, |m| build(m, form, &tol, digest)?);
    let ill_conditioned = !report.warnings.is_empty();

    let rendered = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Io(format!("report serialization: {e}")))?;
    if let Some(path) = out {
        write_file(path, &format!("{rendered}\n"))?;
    }
    if json {
        println!("{rendered}");
    } else {
        print_summary(&report, &any);
    }
    Ok(if ill_conditioned { EXIT_ILL_CONDITIONED } else { EXIT_OK })
}

fn print_summary(report: &DecompositionReport, input: &AnyMatrix) {
    println!(
        "input: {}x{} {} {}  digest {}",
        input.rows(),
        input.cols(),
        report.field,
        report.arithmetic,
        report.input_digest
    );
    println!(
        "form: {}  tol-scale: {}",
        report.form, report.tol_scale
    );
    println!("m-sequence: {}", join_usizes(&report.m_sequence));
    println!("blocks: {}", join_usizes(&report.blocks));
    println!(
        "regular part: {}x{}{}",
        report.regular.rows,
        report.regular.cols,
        if report.regular.rows > 0 && report.regular.rows <= 6 {
            format!("  [{}]", report.regular.entries.join(" "))
        } else {
            String::new()
        }
    );
    match report.terminal_margin {
        Some(m) => println!("terminal rank margin: {m:.3e}"),
        None => println!("terminal rank margin: n/a"),
    }
    if let Some(m) = report.min_margin {
        println!("min confidence margin: {m:.3e}");
    }
    if report.warnings.is_empty() {
        println!("warnings: none");
    } else {
        for w in &report.warnings {
            println!("warning: {w}");
        }
    }
}

fn join_usizes(values: &[usize]) -> String {
    if values.is_empty() {
        "(empty)".to_string()
    } else {
        values
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(", ")
    }
}

// ── compare ──────────────────────────────────────────────────────────

fn cmd_compare(
    path_a: &Path,
    path_b: &Path,
    form: FormArg,
    backend: Option<BackendArg>,
    tol_scale: f64,
    witness: Option<&Path>,
    witness_tol: f64,
) -> Result<i32, CliError> {
    let a = read_matrix_file(path_a)?;
    let b = read_matrix_file(path_b)?;
    if a.spec().field != b.spec().field {
        return Err(CliError::Usage(format!(
            "mixed scalar specs: {} vs {}",
            a.spec(),
            b.spec()
        )));
    }
    let target = match backend {
        Some(arg) => to_arithmetic(arg),
        None if a.spec().arithmetic == b.spec().arithmetic => a.spec().arithmetic,
        None => {
            return Err(CliError::Usage(format!(
                "mixed scalar specs: {} vs {}; pass --backend to unify",
                a.spec(),
                b.spec()
            )))
        }
    };
    let a = a.convert_arithmetic(target)?;
    let b = b.convert_arithmetic(target)?;
    let witness = witness
        .map(|p| {
            let w = read_matrix_file(p)?;
            if w.spec().field != a.spec().field {
                return Err(CliError::Usage(format!(
                    "witness spec {} does not match inputs ({})",
                    w.spec(),
                    a.spec()
                )));
            }
            w.convert_arithmetic(target)
        })
        .transpose()?;

    let form = to_form(form);
    let tol = TolPolicy::new(tol_scale);

    fn decide<T: EntryScalar>(
        a: &Matrix<T>,
        b: &Matrix<T>,
        witness: Option<&Matrix<T>>,
        form: FormKind,
        tol: &TolPolicy,
        witness_tol: f64,
    ) -> Result<i32, CliError> {
        match compare(a, b, form, tol)? {
            Verdict::Equivalent => {
                println!("equivalent");
                Ok(EXIT_OK)
            }
            Verdict::NotEquivalent(why) => {
                println!("not equivalent: {why}");
                Ok(EXIT_NOT_EQUIVALENT)
            }
            Verdict::ReducedToRegularParts { regular_a, regular_b } => {
                if let Some(w) = witness {
                    if check_congruence_witness(&regular_a, &regular_b, w, form, witness_tol)? {
                        println!("equivalent (congruence witness verified on the regular parts)");
                        return Ok(EXIT_OK);
                    }
                    println!("witness did not establish congruence of the regular parts");
                }
                println!(
                    "reduced to regular parts: singular structure agrees; equivalence holds iff the {}x{0} regular parts are topologically congruent",
                    regular_a.rows()
                );
                println!("regular part of A: {regular_a}");
                println!("regular part of B: {regular_b}");
                Ok(EXIT_REDUCED_TO_REGULAR_PARTS)
            }
        }
    }

    match (&a, &b) {
        (AnyMatrix::RealFloat(x), AnyMatrix::RealFloat(y)) => {
            let w = extract_witness(&witness, AnyMatrix::as_real_float)?;
            decide(x, y, w, form, &tol, witness_tol)
        }
        (AnyMatrix::RealExact(x), AnyMatrix::RealExact(y)) => {
            let w = extract_witness(&witness, AnyMatrix::as_real_exact)?;
            decide(x, y, w, form, &tol, witness_tol)
        }
        (AnyMatrix::ComplexFloat(x), AnyMatrix::ComplexFloat(y)) => {
            let w = extract_witness(&witness, AnyMatrix::as_complex_float)?;
            decide(x, y, w, form, &tol, witness_tol)
        }
        (AnyMatrix::ComplexExact(x), AnyMatrix::ComplexExact(y)) => {
            let w = extract_witness(&witness, AnyMatrix::as_complex_exact)?;
            decide(x, y, w, form, &tol, witness_tol)
        }
        _ => unreachable!("specs were unified above"),
    }
}

fn extract_witness<'a, T>(
    witness: &'a Option<AnyMatrix>,
    as_variant: impl Fn(&'a AnyMatrix) -> Option<&'a Matrix<T>>,
) -> Result<Option<&'a Matrix<T>>, CliError> {
    match witness {
        None => Ok(None),
        Some(any) => as_variant(any)
            .map(Some)
            .ok_or_else(|| CliError::Usage("witness spec does not match inputs".into())),
    }
}

impl AnyMatrix {
    fn as_real_float(&self) -> Option<&Matrix<f64>> {
        match self {
            AnyMatrix::RealFloat(m) => Some(m),
            _ => None,
        }
    }

    fn as_real_exact(&self) -> Option<&Matrix<num_rational::BigRational>> {
        match self {
            AnyMatrix::RealExact(m) => Some(m),
            _ => None,
        }
    }

    fn as_complex_float(&self) -> Option<&Matrix<formreg::Complex64>> {
        match self {
            AnyMatrix::ComplexFloat(m) => Some(m),
            _ => None,
        }
    }

    fn as_complex_exact(&self) -> Option<&Matrix<formreg::GaussianRational>> {
        match self {
            AnyMatrix::ComplexExact(m) => Some(m),
            _ => None,
        }
    }
}

// ── synthesize ───────────────────────────────────────────────────────

#[allow(clippy::too_many_arguments)]
fn cmd_synthesize(
    regular_size: usize,
    blocks: Vec<usize>,
    scramble: ScrambleArg,
    seed_arg: u64,
    field: FieldArg,
    arithmetic: BackendArg,
    entry_bound: i64,
    regular: Option<&Path>,
    form: FormArg,
    out: &Path,
) -> Result<i32, CliError> {
    let seed = match std::env::var("FORMREG_SEED") {
        Ok(v) => v
            .parse::<u64>()
            .map_err(|_| CliError::Usage(format!("FORMREG_SEED is not a u64: `{v}`")))?,
        Err(_) => seed_arg,
    };
    let spec = SynthesisSpec {
        regular_size,
        blocks,
        scramble: match scramble {
            ScrambleArg::None => Scramble::None,
            ScrambleArg::Unitary => Scramble::Unitary,
            ScrambleArg::General => Scramble::GeneralNonsingular,
        },
        seed,
        entry_bound,
    };
    let form = to_form(form);
    let tol = TolPolicy::default();
    let target = to_arithmetic(arithmetic);
    let regular = regular
        .map(|p| read_matrix_file(p)?.convert_arithmetic(target))
        .transpose()?;

    fn build<T: EntryScalar>(
        spec: &SynthesisSpec,
        regular: Option<Matrix<T>>,
        form: FormKind,
        tol: &TolPolicy,
        wrap: impl Fn(Matrix<T>) -> AnyMatrix,
    ) -> Result<(AnyMatrix, Vec<usize>, Vec<usize>), CliError> {
        let (a, truth) = synthesize(spec, regular, form, tol)?;
        Ok((wrap(a), truth.blocks, truth.m_sequence))
    }

    let (instance, truth_blocks, truth_m_sequence) = match (field, arithmetic) {
        (FieldArg::Real, BackendArg::Float) => {
            let reg = regular.map(|r| r.as_real_float().cloned().ok_or_else(bad_regular)).transpose()?;
            build(&spec, reg, form, &tol, AnyMatrix::RealFloat)?
        }
        (FieldArg::Real, BackendArg::Exact) => {
            let reg = regular.map(|r| r.as_real_exact().cloned().ok_or_else(bad_regular)).transpose()?;
            build(&spec, reg, form, &tol, AnyMatrix::RealExact)?
        }
        (FieldArg::Complex, BackendArg::Float) => {
            let reg = regular.map(|r| r.as_complex_float().cloned().ok_or_else(bad_regular)).transpose()?;
            build(&spec, reg, form, &tol, AnyMatrix::ComplexFloat)?
        }
        (FieldArg::Complex, BackendArg::Exact) => {
            let reg = regular.map(|r| r.as_complex_exact().cloned().ok_or_else(bad_regular)).transpose()?;
            build(&spec, reg, form, &tol, AnyMatrix::ComplexExact)?
        }
    };

    let sidecar = GroundTruthSidecar {
        schema: REPORT_SCHEMA,
        generator: GENERATOR_ID.to_string(),
        seed,
        scramble: match spec.scramble {
            Scramble::None => "none",
            Scramble::Unitary => "unitary",
            Scramble::GeneralNonsingular => "general",
        }
        .to_string(),
        field: io::field_token(instance.spec().field).to_string(),
        arithmetic: io::arithmetic_token(instance.spec().arithmetic).to_string(),
        form: form_token(form).to_string(),
        entry_bound,
        total_size: spec.total_size(),
        regular_size: spec.regular_size,
        blocks: truth_blocks,
        m_sequence: truth_m_sequence,
    };

    write_file(out, &io::write_matrix_text(&instance))?;
    let sidecar_path = PathBuf::from(format!("{}.truth.json", out.display()));
    let sidecar_json = serde_json::to_string_pretty(&sidecar)
        .map_err(|e| CliError::Io(format!("sidecar serialization: {e}")))?;
    write_file(&sidecar_path, &format!("{sidecar_json}\n"))?;
    println!(
        "wrote {} ({}x{} {}) and {}",
        out.display(),
        instance.rows(),
        instance.cols(),
        instance.spec(),
        sidecar_path.display()
    );
    Ok(EXIT_OK)
}

fn bad_regular() -> CliError {
    CliError::Usage("--regular file spec does not match --field/--arithmetic".into())
}

// ── verify ───────────────────────────────────────────────────────────

fn cmd_verify(input: &Path, report_path: &Path, tol: f64) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(report_path)
        .map_err(|e| CliError::Io(format!("{}: {e}", report_path.display())))?;
    let report: DecompositionReport = serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", report_path.display())))?;
    if report.schema != REPORT_SCHEMA {
        return Err(CliError::Parse(format!(
            "unsupported report schema {}",
            report.schema
        )));
    }
    let field = io::parse_field(&report.field)?;
    let arithmetic = io::parse_arithmetic(&report.arithmetic)?;
    let form = report::parse_form(&report.form)?;

    let any = read_matrix_file(input)?;
    if any.spec().field != field {
        return Err(CliError::Usage(format!(
            "wrong input for this report: field {} vs {}",
            io::field_token(any.spec().field),
            report.field
        )));
    }
    let any = any.convert_arithmetic(arithmetic)?;
    if io::digest(&any) != report.input_digest {
        return Err(CliError::Usage(
            "wrong input for this report: digest mismatch".into(),
        ));
    }

    fn replay<T: EntryScalar>(
        m: &Matrix<T>,
        trace_dto: &TraceDto,
        form: FormKind,
        tol: f64,
    ) -> Result<formreg::VerificationReport, CliError> {
        let trace = trace_dto.to_trace::<T>()?;
        Ok(verify_trace(m, &trace, form, tol)?)
    }
    let outcome = with_matrix!(&any, |m| replay(m, &report.trace, form, tol)?);

    print!("{outcome}");
    if outcome.passed() {
        println!("verification passed ({} checks)", outcome.checks.len());
        Ok(EXIT_OK)
    } else {
        let failed: Vec<&str> = outcome.failures().map(|c| c.name.as_str()).collect();
        println!("verification FAILED: {}", failed.join(", "));
        Ok(EXIT_ERROR)
    }
}
