//! The `mpdecomp` command line: input detection, the decomposition pipeline
//! and report serialization.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::diagonalize::{basis_labels, tot_diagonalize, Diagonalization, DiagonalizeOptions};
use crate::error::{Error, Result};
use crate::filtration::{parse_filtration, Filtration};
use crate::graded_matrix::GradedMatrix;
use crate::grades::{Grade, GradeOrderContext};
use crate::invariants::{
    betti_table, block_matrix, dimension_function, persistent_betti, summand_matrix, BettiTable,
    DimFunction, GradeBox,
};
use crate::oracle::{brute_force_finest, dim_oracle, DEFAULT_BUDGET};
use crate::presentation::{
    minimize, parse_presentation, pres_2param, pres_dparam, pres_h0, write_presentation, CaseTag,
    Presentation,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_TIES: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::TiedGrades { .. } => EXIT_TIES,
        Error::Internal(_) => EXIT_INTERNAL,
        _ => EXIT_INPUT,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
    Csv,
}

/// How a presentation of `H_p`, `p >= 1`, is built from a filtration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Construction {
    /// Kernel basis for two parameters, generators plus syzygies otherwise.
    #[default]
    Auto,
    TwoParam,
    DParam,
}

#[derive(Parser, Debug)]
#[command(name = "mpdecomp", version, about = "Decompose multi-parameter persistence modules over F2")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Blocks, Betti tables and dimension functions.
    Decompose(RunArgs),
    /// Block structure of the diagonalized presentation only.
    Diagonalize(RunArgs),
    /// Persistent graded Betti numbers.
    Betti(RunArgs),
    /// Dimension functions of the summands.
    Blockcode(RunArgs),
    /// Compare the diagonalization with brute-force references.
    Check(RunArgs),
    /// Write the minimized presentation in the raw text format.
    ExportPres(RunArgs),
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Filtration (`mpfilt`) or presentation (`mppres`) file.
    pub input: PathBuf,
    /// Homology degree, for filtration input.
    #[arg(long = "dim", default_value_t = 0)]
    pub dim: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Resolve tied grades by input order instead of refusing.
    #[arg(long)]
    pub perturb_ties: bool,
    /// Evaluation box as `lo:hi`, e.g. `0,0:3,3`.
    #[arg(long = "box")]
    pub grade_box: Option<String>,
    #[arg(long, value_enum, default_value_t = Construction::Auto)]
    pub construction: Construction,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputKind {
    Filtration,
    Presentation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub kind: InputKind,
    pub p: usize,
    pub perturb_ties: bool,
    pub grade_box: Option<GradeBox>,
    pub construction: Construction,
}

pub enum Input {
    Filtration(Filtration),
    Presentation(GradedMatrix),
}

/// Detects the format from the header and parses the text.
pub fn parse_input(text: &str) -> Result<Input> {
    let first = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .unwrap_or("");
    match first.split_whitespace().next() {
        Some("mpfilt") => parse_filtration(text).map(Input::Filtration),
        Some("mppres") => parse_presentation(text).map(Input::Presentation),
        _ => Err(Error::Parse {
            line: 1,
            message: "unknown header, expected 'mpfilt 1' or 'mppres 1'".into(),
        }),
    }
}

pub fn parse_box(s: &str) -> Result<GradeBox> {
    let coords = |part: &str| -> Result<Grade> {
        part.split(',')
            .map(|c| {
                c.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Input(format!("invalid box coordinate '{c}'")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Grade::new)
    };
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| Error::Input(format!("box '{s}' is not of the form lo:hi")))?;
    GradeBox::new(coords(lo)?, coords(hi)?)
}

/// The presentation to be diagonalized, before minimization.
pub fn build_presentation(input: &Input, p: usize, construction: Construction) -> Result<Presentation> {
    match input {
        Input::Presentation(m) => {
            if p != 0 {
                return Err(Error::Input("--dim applies to filtration input only".into()));
            }
            Ok(Presentation::new(m.clone(), CaseTag::Raw))
        }
        Input::Filtration(f) if p == 0 => pres_h0(f),
        Input::Filtration(f) => match construction {
            Construction::TwoParam => pres_2param(f, p),
            Construction::DParam => pres_dparam(f, p),
            Construction::Auto if f.d() == 2 => pres_2param(f, p),
            Construction::Auto => pres_dparam(f, p),
        },
    }
}

/// Minimizes and sorts rows and columns along the grade order.
pub fn prepare(p: &Presentation) -> Presentation {
    let mut m = minimize(p);
    let (sorted, _, _) = m.matrix.sorted(&GradeOrderContext::new(m.matrix.d()));
    m.matrix = sorted;
    m
}

/// Everything computed for one run.
pub struct Outcome {
    pub presentation: Presentation,
    pub diag: Diagonalization,
    pub grade_box: GradeBox,
}

pub fn run_pipeline(input: &Input, cfg: &RunConfig) -> Result<Outcome> {
    let pres = prepare(&build_presentation(input, cfg.p, cfg.construction)?);
    let diag = tot_diagonalize(
        &pres.matrix,
        DiagonalizeOptions {
            perturb_ties: cfg.perturb_ties,
        },
    )?;
    if let Err(e) = diag.certificate.replay(&pres.matrix).map(|m| m == diag.matrix) {
        return Err(Error::Internal(format!("certificate replay failed: {e}")));
    }
    let m = &pres.matrix;
    let grade_box = match &cfg.grade_box {
        Some(b) => b.clone(),
        None => {
            let all: Vec<Grade> = m.row_grades().iter().chain(m.col_grades()).cloned().collect();
            GradeBox::around(&all, m.d())
        }
    };
    Ok(Outcome {
        presentation: pres,
        diag,
        grade_box,
    })
}

#[derive(Serialize)]
struct BlockReport {
    id: usize,
    rows: Vec<usize>,
    cols: Vec<usize>,
    row_grades: Vec<Grade>,
    col_grades: Vec<Grade>,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
}

fn betti_json(t: &BettiTable) -> Value {
    let mut degrees = serde_json::Map::new();
    for j in 0..=t.max_degree_computed {
        degrees.insert(j.to_string(), json!(t.grades(j)));
    }
    json!({ "degrees": degrees, "max_degree_computed": t.max_degree_computed })
}

fn matrix_rows(m: &GradedMatrix) -> Vec<Vec<u8>> {
    m.matrix().to_rows()
}

struct Computed {
    blocks: Vec<BlockReport>,
    betti: Vec<BettiTable>,
    dims: Vec<DimFunction>,
    global_betti: BettiTable,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
}

fn compute(out: &Outcome, need_betti: bool, need_dims: bool) -> Result<Computed> {
    let diag = &out.diag;
    let (row_labels, col_labels) = basis_labels(&out.presentation.matrix, &diag.certificate);
    let blocks: Vec<BlockReport> = diag
        .blocks
        .summands()
        .enumerate()
        .map(|(id, b)| BlockReport {
            id,
            rows: b.rows.clone(),
            cols: b.cols.clone(),
            row_grades: b.rows.iter().map(|&i| diag.matrix.row_grade(i).clone()).collect(),
            col_grades: b.cols.iter().map(|&j| diag.matrix.col_grade(j).clone()).collect(),
            row_labels: b.rows.iter().map(|&i| row_labels[i].clone()).collect(),
            col_labels: b.cols.iter().map(|&j| col_labels[j].clone()).collect(),
        })
        .collect();
    let betti = if need_betti { persistent_betti(diag)? } else { Vec::new() };
    let global_betti = if need_betti {
        betti_table(&summand_matrix(diag))?
    } else {
        BettiTable::default()
    };
    let dims = if need_dims {
        diag.blocks
            .summands()
            .map(|b| dimension_function(&block_matrix(diag, b), &out.grade_box))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    Ok(Computed {
        blocks,
        betti,
        dims,
        global_betti,
        row_labels,
        col_labels,
    })
}

fn header_json(out: &Outcome) -> serde_json::Map<String, Value> {
    let m = &out.diag.matrix;
    let mut top = serde_json::Map::new();
    top.insert("case_tag".into(), json!(out.presentation.case_tag.as_str()));
    top.insert("perturbed".into(), json!(out.diag.perturbed));
    top.insert("num_ops_applied".into(), json!(out.diag.certificate.len()));
    top.insert("params".into(), json!(m.d()));
    top.insert(
        "zero_columns".into(),
        json!(out
            .diag
            .blocks
            .zero_columns()
            .iter()
            .map(|&j| json!({ "col": j, "grade": m.col_grade(j) }))
            .collect::<Vec<_>>()),
    );
    top
}

fn report_json(cmd: &Command, out: &Outcome) -> Result<Value> {
    let (betti, dims) = match cmd {
        Command::Decompose(_) => (true, true),
        Command::Betti(_) => (true, false),
        Command::Blockcode(_) => (false, true),
        _ => (false, false),
    };
    let c = compute(out, betti, dims)?;
    let m = &out.diag.matrix;
    let mut top = header_json(out);
    let mut blocks = Vec::new();
    for (k, b) in c.blocks.iter().enumerate() {
        let mut v = serde_json::to_value(b).map_err(|e| Error::Internal(e.to_string()))?;
        let obj = v.as_object_mut().expect("block is an object");
        if betti {
            obj.insert("betti".into(), betti_json(&c.betti[k]));
        }
        if dims {
            obj.insert("dim_function".into(), json!(c.dims[k]));
        }
        blocks.push(v);
    }
    top.insert("blocks".into(), Value::Array(blocks));
    if betti {
        top.insert("global_betti".into(), betti_json(&c.global_betti));
    }
    if dims {
        top.insert("box".into(), json!({ "lo": out.grade_box.lo, "hi": out.grade_box.hi }));
    }
    top.insert(
        "matrix".into(),
        json!({
            "rows": matrix_rows(m),
            "row_grades": m.row_grades(),
            "col_grades": m.col_grades(),
            "row_labels": c.row_labels,
            "col_labels": c.col_labels,
        }),
    );
    Ok(Value::Object(top))
}

fn report_text(cmd: &Command, out: &Outcome) -> Result<String> {
    let (betti, dims) = match cmd {
        Command::Decompose(_) => (true, true),
        Command::Betti(_) => (true, false),
        Command::Blockcode(_) => (false, true),
        _ => (false, false),
    };
    let c = compute(out, betti, dims)?;
    let m = &out.diag.matrix;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "case {}  params {}  ops {}{}",
        out.presentation.case_tag.as_str(),
        m.d(),
        out.diag.certificate.len(),
        if out.diag.perturbed { "  perturbed" } else { "" }
    );
    let col_heads: Vec<String> = (0..m.n_cols())
        .map(|j| format!("{}^{}", c.col_labels[j], m.col_grade(j)))
        .collect();
    let row_heads: Vec<String> = (0..m.n_rows())
        .map(|i| format!("{}^{}", c.row_labels[i], m.row_grade(i)))
        .collect();
    let w = row_heads.iter().map(String::len).max().unwrap_or(0);
    let _ = writeln!(s, "{:w$}  {}", "", col_heads.join("  "));
    for (i, head) in row_heads.iter().enumerate() {
        let cells: Vec<String> = (0..m.n_cols())
            .map(|j| format!("{:<width$}", u8::from(m.get(i, j)), width = col_heads[j].len()))
            .collect();
        let _ = writeln!(s, "{head:<w$}  {}", cells.join("  ").trim_end());
    }
    for (k, b) in c.blocks.iter().enumerate() {
        let _ = writeln!(s, "block {}: rows {:?} cols {:?}", b.id, b.row_labels, b.col_labels);
        if betti {
            for j in 0..=c.betti[k].max_degree_computed {
                let gs: Vec<String> = c.betti[k].grades(j).iter().map(Grade::to_string).collect();
                let _ = writeln!(s, "  beta_{j}: {}", gs.join(" "));
            }
        }
        if dims {
            let support: Vec<String> = out
                .grade_box
                .points()
                .into_iter()
                .zip(&c.dims[k].values)
                .filter(|(_, &v)| v > 0)
                .map(|(g, v)| if *v == 1 { g.to_string() } else { format!("{g}x{v}") })
                .collect();
            let _ = writeln!(s, "  support: {}", support.join(" "));
        }
    }
    for j in out.diag.blocks.zero_columns() {
        let _ = writeln!(s, "zero column: {}^{}", c.col_labels[j], m.col_grade(j));
    }
    Ok(s)
}

fn report_csv(out: &Outcome) -> Result<String> {
    let c = compute(out, false, true)?;
    let d = out.grade_box.d();
    let mut s = String::new();
    let header: Vec<String> = (1..=d).map(|k| format!("x{k}")).collect();
    let _ = writeln!(s, "{},block_id,dim", header.join(","));
    for (g_idx, g) in out.grade_box.points().iter().enumerate() {
        let coords: Vec<String> = g.coords().iter().map(i64::to_string).collect();
        for (k, b) in c.blocks.iter().enumerate() {
            let _ = writeln!(s, "{},{},{}", coords.join(","), b.id, c.dims[k].values[g_idx]);
        }
    }
    Ok(s)
}

fn check_json(out: &Outcome) -> Result<(Value, bool)> {
    let brute = brute_force_finest(&out.presentation.matrix, DEFAULT_BUDGET)?;
    let partition_ok = brute == out.diag.blocks;
    let whole = dimension_function(&out.presentation.matrix, &out.grade_box)?;
    let mut dims_ok = true;
    let mut additive_ok = true;
    let parts: Vec<DimFunction> = out
        .diag
        .blocks
        .summands()
        .map(|b| dimension_function(&block_matrix(&out.diag, b), &out.grade_box))
        .collect::<Result<_>>()?;
    for (k, u) in out.grade_box.points().iter().enumerate() {
        dims_ok &= dim_oracle(&out.presentation.matrix, u) == whole.values[k];
        additive_ok &= parts.iter().map(|p| p.values[k]).sum::<usize>() == whole.values[k];
    }
    let mut top = header_json(out);
    top.insert("partition_agrees".into(), json!(partition_ok));
    top.insert("oracle_blocks".into(), json!(brute.blocks));
    top.insert("algorithm_blocks".into(), json!(out.diag.blocks.blocks));
    top.insert("dimension_oracle_agrees".into(), json!(dims_ok));
    top.insert("dimension_additive".into(), json!(additive_ok));
    let ok = partition_ok && dims_ok && additive_ok;
    top.insert("ok".into(), json!(ok));
    Ok((Value::Object(top), ok))
}

/// Runs one subcommand and returns `(exit code, stdout, stderr)`.
pub fn execute(cmd: &Command) -> (i32, String, String) {
    let args = match cmd {
        Command::Decompose(a)
        | Command::Diagonalize(a)
        | Command::Betti(a)
        | Command::Blockcode(a)
        | Command::Check(a)
        | Command::ExportPres(a) => a,
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads.max(1))
        .build()
    {
        Ok(p) => p,
        Err(e) => return (EXIT_INTERNAL, String::new(), format!("error: {e}\n")),
    };
    match pool.install(|| execute_inner(cmd, args)) {
        Ok((code, text)) => (code, text, String::new()),
        Err(e) => (exit_code(&e), String::new(), format!("error: {e}\n")),
    }
}

fn execute_inner(cmd: &Command, args: &RunArgs) -> Result<(i32, String)> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| Error::Input(format!("{}: {e}", args.input.display())))?;
    let input = parse_input(&text)?;
    let kind = match input {
        Input::Filtration(_) => InputKind::Filtration,
        Input::Presentation(_) => InputKind::Presentation,
    };
    let cfg = RunConfig {
        kind,
        p: args.dim,
        perturb_ties: args.perturb_ties,
        grade_box: args.grade_box.as_deref().map(parse_box).transpose()?,
        construction: args.construction,
    };
    if let Command::ExportPres(_) = cmd {
        let pres = prepare(&build_presentation(&input, cfg.p, cfg.construction)?);
        return Ok((EXIT_OK, write_presentation(&pres.matrix)));
    }
    let out = run_pipeline(&input, &cfg)?;
    let pretty = |v: &Value| serde_json::to_string_pretty(v).map(|s| s + "\n");
    if let Command::Check(_) = cmd {
        let (v, ok) = check_json(&out)?;
        let body = pretty(&v).map_err(|e| Error::Internal(e.to_string()))?;
        return Ok((if ok { EXIT_OK } else { EXIT_INTERNAL }, body));
    }
    let body = match args.format {
        Format::Json => pretty(&report_json(cmd, &out)?).map_err(|e| Error::Internal(e.to_string()))?,
        Format::Text => report_text(cmd, &out)?,
        Format::Csv => report_csv(&out)?,
    };
    Ok((EXIT_OK, body))
}

/// Parses arguments, runs, prints, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (code, out, err) = execute(&cli.command);
    print!("{out}");
    eprint!("{err}");
    code
}
