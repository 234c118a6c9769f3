//! The `troprat` command line.
//!
//! Exit codes: 0 success, 1 I/O or parse failure, 2 validation or certificate failure,
//! 3 function not in Rat, 4 resource caps.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::bary::{
    barycentric_subdivision, coordinate_functions, embed_barycentric, faithfulness_check, lattice_preservation_check,
    BaryError, Perturbation, Subdivision,
};
use crate::complex::{arrangement_completion, AbstractComplex, AbstractInput, ComplexError, PolyhedralComplex};
use crate::io::{self, ComplexJson, FormJson, FunctionBuildError, FunctionJson};
use crate::num::parse_rat;
use crate::plot::{render_svg, PlotError, Projection};
use crate::pwa::{equal_on, rat_membership, FacewiseAffine, Func, PwaError};
use crate::synth::{synthesize, verify_synthesis, SynthError};
use crate::trop::parse_rational;
use crate::Caps;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NOT_IN_RAT: i32 = 3;
pub const EXIT_CAPS: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "troprat", version, about = "Exact tropical rational functions on polyhedral complexes")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Seed for the sampling used by --oracle.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 8)]
    pub max_dim: usize,
    #[arg(long, global = true, default_value_t = 10_000)]
    pub max_cells: usize,
    /// Reject complexes whose faces are not all listed instead of completing them.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Cross-check results by sampling and direct evaluation.
    #[arg(long, global = true)]
    pub oracle: bool,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a complex, abstract complex, or function file.
    Validate { path: PathBuf },
    /// Common refinement of a complex with another complex or a list of hyperplanes.
    Refine { complex: PathBuf, other: PathBuf },
    /// Decide membership in Rat for a function file.
    RatCheck {
        function: PathBuf,
        #[arg(long)]
        complex: Option<PathBuf>,
    },
    /// Express a function in Rat as a tropical rational expression.
    Synthesize {
        function: PathBuf,
        #[arg(long)]
        complex: Option<PathBuf>,
    },
    /// Check that an expression equals a function on its support.
    Verify {
        function: PathBuf,
        /// Expression text, or a file containing it.
        expr: String,
        #[arg(long)]
        complex: Option<PathBuf>,
    },
    /// Barycentric subdivision of an abstract complex.
    Bary { path: PathBuf },
    /// Embedding of the barycentric subdivision with its lattice certificate.
    Embed {
        path: PathBuf,
        /// Scale one vertex image, as `LABEL:FACTOR`.
        #[arg(long)]
        perturb: Option<String>,
    },
    /// Faithfulness certificate for the coordinate functions of the embedding.
    Faithful {
        path: PathBuf,
        #[arg(long)]
        perturb: Option<String>,
    },
    /// Evaluate an expression at a point given as comma-separated rationals.
    Eval {
        expr: String,
        #[arg(allow_hyphen_values = true)]
        point: String,
    },
    /// Arrangement completion of a complex.
    Complete { path: PathBuf },
    /// Draw a complex as SVG.
    Plot {
        path: PathBuf,
        /// Label maximal cells with the forms of this function.
        #[arg(long)]
        function: Option<PathBuf>,
        /// Coordinate axes to project onto, as `I,J` (0-based).
        #[arg(long)]
        project: Option<String>,
        /// For an abstract complex, draw its barycentric subdivision.
        #[arg(long)]
        bary: bool,
    },
}

/// A failed run: exit code, message for stderr, and an optional JSON report for stdout.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
    pub report: Option<Value>,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Failure {
        Failure { code, message: message.into(), report: None }
    }

    fn with_report(code: i32, message: impl Into<String>, report: Value) -> Failure {
        Failure { code, message: message.into(), report: Some(report) }
    }
}

impl From<io::FormatError> for Failure {
    fn from(e: io::FormatError) -> Failure {
        Failure::new(EXIT_IO, e.to_string())
    }
}

fn complex_code(e: &ComplexError) -> i32 {
    if matches!(e, ComplexError::CapExceeded { .. }) {
        EXIT_CAPS
    } else {
        EXIT_INVALID
    }
}

fn complex_failure(e: ComplexError) -> Failure {
    let cells = match &e {
        ComplexError::Duplicate(a, b) | ComplexError::NotAFace(a, b) | ComplexError::NotAFan(a, b) => json!([a, b]),
        ComplexError::EmptyCell(a) | ComplexError::MissingFace(a) => json!([a]),
        ComplexError::Dimension { cell, .. } => json!([cell]),
        _ => json!([]),
    };
    Failure::with_report(complex_code(&e), e.to_string(), json!({ "valid": false, "error": e.to_string(), "cells": cells }))
}

fn pwa_failure(e: PwaError) -> Failure {
    match e {
        PwaError::Complex(c) => complex_failure(c),
        PwaError::DimensionCap { .. } => Failure::new(EXIT_CAPS, e.to_string()),
        e => Failure::with_report(EXIT_INVALID, e.to_string(), json!({ "valid": false, "error": e.to_string() })),
    }
}

fn bary_failure(e: BaryError) -> Failure {
    match e {
        BaryError::CapExceeded { .. } => Failure::new(EXIT_CAPS, e.to_string()),
        BaryError::ImageNotComplex(c) => complex_failure(c),
        BaryError::Pwa(p) => pwa_failure(p),
        BaryError::UnknownVertex(_) | BaryError::ZeroFactor => Failure::new(EXIT_IO, e.to_string()),
        e => Failure::with_report(EXIT_INVALID, e.to_string(), json!({ "valid": false, "error": e.to_string() })),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    io::parse(&read(path)?).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn from_value<T: serde::de::DeserializeOwned>(v: Value, path: &Path) -> Result<T, Failure> {
    serde_json::from_value(v).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

/// Writes `text` to `--out` through a temporary file and a rename, or to stdout.
fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            let tmp = path.with_extension("tmp~");
            fs::write(&tmp, text)
                .and_then(|_| fs::rename(&tmp, path))
                .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
        }
        None => {
            let mut s = std::io::stdout().lock();
            s.write_all(text.as_bytes()).map_err(|e| Failure::new(EXIT_IO, e.to_string()))
        }
    }
}

struct Ctx {
    caps: Caps,
    g: Global,
}

impl Ctx {
    fn check_dim(&self, n: usize) -> Result<(), Failure> {
        if n > self.caps.max_dim {
            return Err(Failure::new(EXIT_CAPS, format!("dimension {n} exceeds the cap {}", self.caps.max_dim)));
        }
        Ok(())
    }

    fn complex(&self, path: &Path) -> Result<PolyhedralComplex, Failure> {
        let c: ComplexJson = from_value(read_json(path)?, path)?;
        self.check_dim(c.dim)?;
        let c = c.build(!self.g.strict)?.map_err(complex_failure)?;
        c.check_caps(&self.caps).map_err(complex_failure)?;
        Ok(c)
    }

    fn function(&self, path: &Path, complex: &Option<PathBuf>) -> Result<FacewiseAffine, Failure> {
        let mut v = read_json(path)?;
        if let (Some(cp), Some(obj)) = (complex, v.as_object_mut()) {
            if !obj.contains_key("complex") {
                obj.insert("complex".into(), read_json(cp)?);
            }
        }
        let f: FunctionJson = from_value(v, path)?;
        self.check_dim(f.complex.dim)?;
        match f.build(!self.g.strict)? {
            Ok(f) => Ok(f),
            Err(FunctionBuildError::Complex(e)) => Err(complex_failure(e)),
            Err(FunctionBuildError::Pwa(e)) => Err(pwa_failure(e)),
        }
    }

    fn abstract_complex(&self, path: &Path) -> Result<AbstractComplex, Failure> {
        let input: AbstractInput = from_value(read_json(path)?, path)?;
        let ac = AbstractComplex::new(&input).map_err(|e| {
            Failure::with_report(EXIT_INVALID, e.to_string(), json!({ "valid": false, "error": e.to_string() }))
        })?;
        self.check_dim(ac.ambient_dim())?;
        Ok(ac)
    }

    fn subdivision(&self, path: &Path) -> Result<Subdivision, Failure> {
        barycentric_subdivision(&self.abstract_complex(path)?, &self.caps).map_err(bary_failure)
    }

    fn out(&self, v: &Value) -> Result<(), Failure> {
        emit(&self.g.out, &io::to_pretty(v))
    }
}

fn perturbation(sub: &Subdivision, spec: &Option<String>) -> Result<Option<Perturbation>, Failure> {
    let Some(s) = spec else { return Ok(None) };
    let (label, factor) =
        s.rsplit_once(':').ok_or_else(|| Failure::new(EXIT_IO, format!("--perturb expects LABEL:FACTOR, got `{s}`")))?;
    let factor = parse_rat(factor).map_err(|e| Failure::new(EXIT_IO, e))?;
    let vertex = sub.vertex_named(label).ok_or_else(|| bary_failure(BaryError::UnknownVertex(label.into())))?;
    Ok(Some(Perturbation { vertex, factor }))
}

fn expression_text(arg: &str) -> Result<String, Failure> {
    let p = Path::new(arg);
    if p.is_file() {
        Ok(read(p)?.trim().to_string())
    } else {
        Ok(arg.to_string())
    }
}

fn cmd_validate(ctx: &Ctx, path: &Path) -> Result<(), Failure> {
    let v = read_json(path)?;
    let report = if v.get("V_f").is_some() {
        let ac = ctx.abstract_complex(path)?;
        json!({ "valid": true, "kind": "abstract", "elements": ac.len(), "dim": ac.ambient_dim() })
    } else if v.get("pieces").is_some() {
        let f = ctx.function(path, &None)?;
        json!({ "valid": true, "kind": "function", "dim": f.dim(), "cells": f.complex().len() })
    } else {
        let c = ctx.complex(path)?;
        json!({ "valid": true, "kind": "complex", "dim": c.dim(), "f_vector": c.f_vector() })
    };
    ctx.out(&report)
}

fn cmd_refine(ctx: &Ctx, a: &Path, b: &Path) -> Result<(), Failure> {
    let c = ctx.complex(a)?;
    let other = read_json(b)?;
    let refined = if other.is_array() {
        let hs: Vec<FormJson> = from_value(other, b)?;
        let hs = hs.iter().map(|h| h.to_form(c.dim())).collect::<Result<Vec<_>, _>>()?;
        if hs.len() > ctx.caps.max_hyperplanes {
            return Err(Failure::new(EXIT_CAPS, format!("{} hyperplanes exceed the cap {}", hs.len(), ctx.caps.max_hyperplanes)));
        }
        c.refine_by(&hs)
    } else {
        c.common_refinement(&ctx.complex(b)?)
    };
    refined.check_caps(&ctx.caps).map_err(complex_failure)?;
    ctx.out(&serde_json::to_value(ComplexJson::from(&refined)).unwrap())
}

fn cmd_rat_check(ctx: &Ctx, path: &Path, complex: &Option<PathBuf>) -> Result<(), Failure> {
    let f = ctx.function(path, complex)?;
    let verdict = rat_membership(&f);
    if ctx.g.oracle {
        let slow = crate::oracle::increments_disagree(&f);
        if slow.is_none() != verdict.is_ok() {
            return Err(Failure::new(EXIT_INVALID, "the increment oracle disagrees with the membership check"));
        }
    }
    match verdict {
        Ok(()) => ctx.out(&json!({ "in_rat": true })),
        Err(w) => Err(Failure::with_report(EXIT_NOT_IN_RAT, w.to_string(), io::not_in_rat_value(&w))),
    }
}

fn cmd_synthesize(ctx: &Ctx, path: &Path, complex: &Option<PathBuf>) -> Result<(), Failure> {
    let f = ctx.function(path, complex)?;
    let r = match synthesize(&f, &ctx.caps) {
        Ok(r) => r,
        Err(SynthError::NotInRat(w)) => {
            return Err(Failure::with_report(EXIT_NOT_IN_RAT, w.to_string(), io::not_in_rat_value(&w)))
        }
        Err(SynthError::Complex(e)) => return Err(complex_failure(e)),
        Err(SynthError::Pwa(e)) => return Err(pwa_failure(e)),
        Err(e) => return Err(Failure::new(EXIT_INVALID, e.to_string())),
    };
    let check = verify_synthesis(&f, &r, &ctx.caps).map_err(pwa_failure)?;
    if check.is_some() {
        return Err(Failure::with_report(EXIT_INVALID, "synthesized expression failed verification", io::verify_value(&check)));
    }
    if ctx.g.oracle {
        oracle_compare(ctx, &f, Func::Expr(&r.expression))?;
    }
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(stdout, "{}", r.expression);
    if ctx.g.out.is_some() {
        ctx.out(&io::synthesis_value(&r))?;
    }
    Ok(())
}

fn oracle_compare(ctx: &Ctx, f: &FacewiseAffine, e: Func<'_>) -> Result<(), Failure> {
    let mut rng = crate::gen::rng(ctx.g.seed);
    let pts = crate::oracle::sample_points(&mut rng, f.complex(), 8);
    match crate::oracle::sampled_difference(Func::Facewise(f), e, &pts) {
        None => Ok(()),
        Some((u, _, _)) => Err(Failure::with_report(
            EXIT_INVALID,
            "sampling oracle found a difference",
            json!({ "oracle": "sampling", "point": u.iter().map(crate::num::fmt_rat).collect::<Vec<_>>() }),
        )),
    }
}

fn cmd_verify(ctx: &Ctx, path: &Path, expr: &str, complex: &Option<PathBuf>) -> Result<(), Failure> {
    let f = ctx.function(path, complex)?;
    let text = expression_text(expr)?;
    let e = parse_rational(&text, f.dim()).map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
    let c = equal_on(f.complex(), Func::Expr(&e), Func::Facewise(&f), &ctx.caps).map_err(pwa_failure)?;
    if ctx.g.oracle && c.is_equal() {
        oracle_compare(ctx, &f, Func::Expr(&e))?;
    }
    let report = io::comparison_value(&c);
    if c.is_equal() {
        ctx.out(&report)
    } else {
        Err(Failure::with_report(EXIT_INVALID, "expression and function differ", report))
    }
}

fn cmd_embed(ctx: &Ctx, path: &Path, perturb: &Option<String>) -> Result<(), Failure> {
    let sub = ctx.subdivision(path)?;
    let p = perturbation(&sub, perturb)?;
    let emb = embed_barycentric(&sub, p.as_ref()).map_err(bary_failure)?;
    match lattice_preservation_check(&sub, &emb) {
        Ok(cert) => {
            let mut v = io::embedding_value(&emb);
            v["lattice"] = io::lattice_value(&cert);
            ctx.out(&v)
        }
        Err(viol) => {
            Err(Failure::with_report(EXIT_INVALID, format!("lattice check failed: {:?}", viol.failure), io::lattice_violation_value(&viol)))
        }
    }
}

fn cmd_faithful(ctx: &Ctx, path: &Path, perturb: &Option<String>) -> Result<(), Failure> {
    let sub = ctx.subdivision(path)?;
    let p = perturbation(&sub, perturb)?;
    let emb = embed_barycentric(&sub, p.as_ref()).map_err(bary_failure)?;
    let lattice = lattice_preservation_check(&sub, &emb).map_err(|viol| {
        Failure::with_report(EXIT_INVALID, format!("lattice check failed: {:?}", viol.failure), io::lattice_violation_value(&viol))
    })?;
    let maps = coordinate_functions(&sub, &emb).map_err(bary_failure)?;
    let cert = faithfulness_check(&emb.domain, &maps).map_err(|v| {
        Failure::with_report(EXIT_INVALID, v.to_string(), io::faithfulness_violation_value(&v))
    })?;
    let mut v = io::faithfulness_value(&cert);
    v["coordinate_cells"] = v["cells"].take();
    v["cells"] = io::lattice_value(&lattice)["cells"].take();
    ctx.out(&v)
}

fn cmd_eval(ctx: &Ctx, expr: &str, point: &str) -> Result<(), Failure> {
    let u = io::parse_point(point)?;
    ctx.check_dim(u.len())?;
    let text = expression_text(expr)?;
    let e = parse_rational(&text, u.len()).map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
    let value = e.eval(&u).map_err(|e| Failure::new(EXIT_INVALID, e.to_string()))?;
    emit(&ctx.g.out, &format!("{value}\n"))
}

fn cmd_complete(ctx: &Ctx, path: &Path) -> Result<(), Failure> {
    let c = ctx.complex(path)?;
    let (arr, beta) = arrangement_completion(&c, &ctx.caps).map_err(complex_failure)?;
    ctx.out(&json!({
        "hyperplanes": arr.hyperplanes.iter().map(io::form_value).collect::<Vec<_>>(),
        "arrangement": serde_json::to_value(ComplexJson::from(&arr.complex)).unwrap(),
        "sigma_beta": serde_json::to_value(ComplexJson::from(&beta)).unwrap(),
    }))
}

fn cmd_plot(ctx: &Ctx, path: &Path, function: &Option<PathBuf>, project: &Option<String>, bary: bool) -> Result<(), Failure> {
    let v = read_json(path)?;
    let abstract_input = v.get("V_f").is_some();
    let complex = if abstract_input {
        let realized = if bary {
            ctx.subdivision(path)?.realize()
        } else {
            ctx.abstract_complex(path)?.realize()
        };
        realized.map_err(|e| Failure::new(EXIT_INVALID, e.to_string()))?
    } else {
        let c: ComplexJson = from_value(v, path)?;
        c.build(!ctx.g.strict)?.map_err(complex_failure)?
    };
    let f = match function {
        // A pieces-only function file takes its cells from the plotted complex.
        Some(p) => Some(ctx.function(p, &(!abstract_input).then(|| path.to_path_buf()))?),
        None => None,
    };
    let proj = match project {
        Some(s) => {
            let axes: Vec<usize> = s
                .split(',')
                .map(|x| x.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|e| Failure::new(EXIT_IO, format!("--project: {e}")))?;
            if axes.len() != 2 {
                return Err(Failure::new(EXIT_IO, "--project expects two axes I,J"));
            }
            Some(Projection::axes(complex.dim(), axes[0], axes[1]).map_err(|e| Failure::new(EXIT_IO, e.to_string()))?)
        }
        None => None,
    };
    let svg = render_svg(&complex, f.as_ref(), proj.as_ref()).map_err(|e| match e {
        PlotError::NeedsProjection(_) => Failure::new(EXIT_CAPS, e.to_string()),
        _ => Failure::new(EXIT_IO, e.to_string()),
    })?;
    emit(&ctx.g.out, &svg)
}

/// Runs one parsed invocation.
pub fn execute(cli: Cli) -> Result<(), Failure> {
    let g = cli.global;
    if g.max_dim == 0 || g.max_cells == 0 {
        return Err(Failure::new(EXIT_IO, "caps must be positive"));
    }
    let caps = Caps { max_dim: g.max_dim, max_cells: g.max_cells, ..Caps::default() };
    let ctx = Ctx { caps, g };
    match &cli.command {
        Command::Validate { path } => cmd_validate(&ctx, path),
        Command::Refine { complex, other } => cmd_refine(&ctx, complex, other),
        Command::RatCheck { function, complex } => cmd_rat_check(&ctx, function, complex),
        Command::Synthesize { function, complex } => cmd_synthesize(&ctx, function, complex),
        Command::Verify { function, expr, complex } => cmd_verify(&ctx, function, expr, complex),
        Command::Bary { path } => {
            let sub = ctx.subdivision(path)?;
            ctx.out(&io::subdivision_value(&sub))
        }
        Command::Embed { path, perturb } => cmd_embed(&ctx, path, perturb),
        Command::Faithful { path, perturb } => cmd_faithful(&ctx, path, perturb),
        Command::Eval { expr, point } => cmd_eval(&ctx, expr, point),
        Command::Complete { path } => cmd_complete(&ctx, path),
        Command::Plot { path, function, project, bary } => cmd_plot(&ctx, path, function, project, *bary),
    }
}

/// Parses `args`, runs, prints reports, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_IO } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            if let Some(r) = &f.report {
                print!("{}", io::to_pretty(r));
            }
            eprintln!("troprat: {}", f.message);
            f.code
        }
    }
}
