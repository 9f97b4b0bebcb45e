//! `mosva`: build, transform and check truncated MOSVA instances.
//!
//! Exit codes: 0 all obligations pass, 1 a verified failure, 2 the window
//! is insufficient, 3 usage or parse error.

mod args;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mosva_core::constructions::{contragredient_module, opposite_mosva, transport_module, Direction};
use mosva_core::exact_laurent::scalar::{format_scalar, int, parse_scalar, Scalar};
use mosva_core::graded::DualVector;
use mosva_core::report::{Obligation, Report, Verdict};
use mosva_core::structures::{validate_algebra, validate_module, Ctx, Elem, Side, Sp};
use mosva_core::verification::{
    audit_pole_order, basis_triples, check_contragredient_obligations, check_region_consistency, correlate,
    estimate_poles, reconstruct_rational, run_suite, triple_shapes, CorrelationMode, CorrelationSeries, Suite,
    SuiteOptions,
};
use mosva_core::workbench::{
    build_heisenberg, certificate_from_json, certificate_to_json, matrix_algebra, regular_module, Instance,
    InstanceDocument,
};
use mosva_core::Error;

#[derive(Parser)]
#[command(name = "mosva", version, about = "Exact checks for truncated MOSVAs and their modules")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = ReportFormat::Text, global = true)]
    report: ReportFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Machine,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExampleKind {
    Matrix,
    Heisenberg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModuleArg {
    Left,
    Right,
    Bi,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProductMode {
    Product,
    Mixed,
}

#[derive(clap::Args)]
struct CorrelatorArgs {
    file: PathBuf,
    /// Dual basis combination in the final space.
    #[arg(long)]
    bra: String,
    /// Comma separated `element@variable` list, leftmost first.
    #[arg(long)]
    ops: String,
    #[arg(long)]
    ket: String,
}

#[derive(Subcommand)]
enum Command {
    /// Write a shipped example as an instance document.
    Example {
        #[arg(value_enum)]
        which: ExampleKind,
        /// Weight cutoff (Heisenberg only; default 6).
        #[arg(long)]
        cutoff: Option<u32>,
        /// Level as p/q (Heisenberg only; default 1).
        #[arg(long)]
        level: Option<String>,
        /// Matrix size (matrix only; default 2).
        #[arg(long)]
        size: Option<usize>,
        /// Write the algebra as a module over itself instead.
        #[arg(long, value_enum)]
        module: Option<ModuleArg>,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Run a checker suite.
    Check {
        file: PathBuf,
        #[arg(long, value_parser = parse_suite)]
        suite: Suite,
        #[arg(long = "p1-max")]
        p1_max: Option<i64>,
        /// Largest weight sum of sampled triples, as p/q.
        #[arg(long = "max-weight")]
        max_weight: Option<String>,
    },
    /// Write the opposite algebra.
    Oppose {
        file: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Move a module across the left/right divide.
    Transport {
        file: PathBuf,
        /// right_to_left_op, left_to_right_op, left_op_to_right or right_op_to_left.
        #[arg(long, value_parser = parse_direction)]
        direction: Direction,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Write the contragredient of a Mobius left module.
    Contragredient {
        file: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
        /// Pole-order certificate that admits a module not claimed grading-restricted.
        #[arg(long = "allow-unrestricted-with-certificate")]
        certificate: Option<PathBuf>,
        /// Also run the contragredient obligations.
        #[arg(long)]
        verify: bool,
        /// Weight-sum limit for the region checks of --verify.
        #[arg(long = "region-weight", default_value_t = 4)]
        region_weight: i64,
        #[arg(long, default_value_t = 6)]
        order: i64,
    },
    /// Audit pole orders over all basis triples and write a certificate.
    Audit {
        file: PathBuf,
        #[arg(long = "p1-max")]
        p1_max: Option<i64>,
        #[arg(long = "max-weight")]
        max_weight: Option<String>,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Compute a correlator series.
    Correlate {
        #[command(flatten)]
        args: CorrelatorArgs,
        #[arg(long, value_parser = parse_mode)]
        mode: CorrelationMode,
        /// Require this many certified steps past each lowest exponent.
        #[arg(long)]
        order: Option<i64>,
    },
    /// Reconstruct the rational function behind a product correlator.
    Reconstruct {
        #[command(flatten)]
        args: CorrelatorArgs,
        #[arg(long, value_enum, default_value_t = ProductMode::Product)]
        mode: ProductMode,
    },
    /// Compare product and iterate expansions with the direct series.
    Regions {
        #[command(flatten)]
        args: CorrelatorArgs,
        #[arg(long, default_value_t = 6)]
        order: i64,
    },
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_direction(s: &str) -> Result<Direction, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<CorrelationMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::WindowInsufficient { .. } => 2,
            Error::Parse(_)
            | Error::Document(_)
            | Error::UnknownLabel(_)
            | Error::Argument(_)
            | Error::Variable(_)
            | Error::SpaceMismatch(_)
            | Error::EmptySamples(_) => 3,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 3, message: message.into() }
}

struct Outcome {
    report: Report,
    text: String,
    details: Value,
}

impl Outcome {
    fn new(report: Report) -> Self {
        Outcome { report, text: String::new(), details: Value::Null }
    }
}

fn exit_code(v: Verdict) -> u8 {
    match v {
        Verdict::Pass => 0,
        Verdict::Fail => 1,
        Verdict::Insufficient => 2,
    }
}

fn load(path: &Path) -> Result<InstanceDocument, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    InstanceDocument::from_json(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn save(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn ctx_of(doc: &InstanceDocument) -> Ctx<'_> {
    match &doc.instance {
        Instance::Algebra(v) => Ctx::algebra(v),
        Instance::Module(w) => Ctx::module(w),
    }
}

fn weight_arg(s: &Option<String>) -> Result<Option<Scalar>, Failure> {
    s.as_deref().map(parse_scalar).transpose().map_err(Failure::from)
}

fn summary(doc: &InstanceDocument) -> Value {
    let space = match &doc.instance {
        Instance::Algebra(v) => &v.space,
        Instance::Module(w) => &w.space,
    };
    json!({
        "name": doc.instance.name(),
        "kind": doc.instance.kind().to_string(),
        "dimension": space.dim(),
        "cutoff": doc.instance.cutoff().map(format_scalar),
    })
}

fn written(doc: &InstanceDocument, path: &Path, report: Report) -> Outcome {
    Outcome {
        text: format!(
            "wrote {} ({}, dimension {}) to {}\n",
            doc.instance.name(),
            doc.instance.kind(),
            summary(doc)["dimension"],
            path.display()
        ),
        details: json!({ "output": path.display().to_string(), "instance": summary(doc) }),
        report,
    }
}

fn example(
    which: ExampleKind,
    cutoff: Option<u32>,
    level: &Option<String>,
    size: Option<usize>,
    module: Option<ModuleArg>,
    output: &Path,
) -> Result<Outcome, Failure> {
    let side = module.map(|m| match m {
        ModuleArg::Left => Side::Left,
        ModuleArg::Right => Side::Right,
        ModuleArg::Bi => Side::Bi,
    });
    let (algebra, fock, provenance) = match which {
        ExampleKind::Matrix => {
            if cutoff.is_some() || level.is_some() {
                return Err(usage("--cutoff and --level apply to the heisenberg example only"));
            }
            let k = size.unwrap_or(2);
            if k == 0 {
                return Err(usage("--size must be positive"));
            }
            (Arc::new(matrix_algebra(k)?), None, format!("example matrix size {k}"))
        }
        ExampleKind::Heisenberg => {
            if size.is_some() {
                return Err(usage("--size applies to the matrix example only"));
            }
            let level = parse_scalar(level.as_deref().unwrap_or("1"))?;
            let cutoff = cutoff.unwrap_or(6);
            let (v, w) = build_heisenberg(&level, cutoff)?;
            (v, Some(w), format!("example heisenberg level {} cutoff {cutoff}", format_scalar(&level)))
        }
    };
    let instance = match (side, fock) {
        (None, _) => Instance::Algebra(algebra),
        (Some(Side::Left), Some(w)) => Instance::Module(w),
        (Some(s), _) => Instance::Module(regular_module(&algebra, s)),
    };
    let doc = InstanceDocument::new(instance, provenance);
    save(output, &doc.to_json())?;
    let report = doc.instance.validate();
    Ok(written(&doc, output, report))
}

fn check(file: &Path, suite: Suite, p1_max: Option<i64>, max_weight: &Option<String>) -> Result<Outcome, Failure> {
    let doc = load(file)?;
    let opts = SuiteOptions { p1_max, max_weight: weight_arg(max_weight)?, ..Default::default() };
    let report = run_suite(&ctx_of(&doc), suite, &opts)?;
    Ok(Outcome { details: json!({ "instance": summary(&doc), "suite": suite.to_string() }), ..Outcome::new(report) })
}

fn oppose(file: &Path, output: &Path) -> Result<Outcome, Failure> {
    let doc = load(file)?;
    let Instance::Algebra(v) = &doc.instance else {
        return Err(usage("oppose takes an algebra document"));
    };
    let op = opposite_mosva(v)?;
    let out = InstanceDocument::new(Instance::Algebra(op.result.clone()), match doc.provenance.strip_prefix("opposite of ") {
        Some(base) => base.to_string(),
        None => format!("opposite of {}", doc.provenance),
    });
    save(output, &out.to_json())?;
    Ok(written(&out, output, validate_algebra(&op.result)))
}

fn transport(file: &Path, direction: Direction, output: &Path) -> Result<Outcome, Failure> {
    let doc = load(file)?;
    let Instance::Module(w) = &doc.instance else {
        return Err(usage("transport takes a module document"));
    };
    let t = transport_module(w, direction, None)?;
    let report = validate_module(&t);
    let provenance = match doc.provenance.strip_prefix(&format!("{} transport of ", direction.inverse())) {
        Some(base) => base.to_string(),
        None => format!("{direction} transport of {}", doc.provenance),
    };
    let out = InstanceDocument::new(Instance::Module(t), provenance);
    save(output, &out.to_json())?;
    Ok(written(&out, output, report))
}

fn contragredient(
    file: &Path,
    output: &Path,
    certificate: &Option<PathBuf>,
    verify: bool,
    region_weight: i64,
    order: i64,
) -> Result<Outcome, Failure> {
    let doc = load(file)?;
    let Instance::Module(w) = &doc.instance else {
        return Err(usage("contragredient takes a module document"));
    };
    let cert = match certificate {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| usage(format!("cannot read {}: {e}", p.display())))?;
            Some(certificate_from_json(&text).map_err(|e| usage(format!("{}: {e}", p.display())))?)
        }
        None => None,
    };
    let dual = contragredient_module(w, cert.as_ref())?;
    let mut report = validate_module(&dual);
    if verify {
        report.extend(check_contragredient_obligations(w, cert.as_ref(), &SuiteOptions::default(), region_weight, order)?);
    }
    let out = InstanceDocument::new(Instance::Module(dual), format!("contragredient of {}", doc.provenance));
    save(output, &out.to_json())?;
    Ok(written(&out, output, report))
}

fn audit(file: &Path, p1_max: Option<i64>, max_weight: &Option<String>, output: &Option<PathBuf>) -> Result<Outcome, Failure> {
    let doc = load(file)?;
    let ctx = ctx_of(&doc);
    let limit = match weight_arg(max_weight)? {
        Some(m) => Some(m),
        None => ctx.algebra.cutoff().map(|c| c - int(2)),
    };
    let mut samples = Vec::new();
    for shape in triple_shapes(&ctx) {
        samples.extend(basis_triples(&ctx, shape, limit.as_ref())?);
    }
    let audit = audit_pole_order(&ctx, &samples, p1_max)?;
    let mut report = Report::new(format!("pole-order audit on {}", doc.instance.name()));
    report.push(Obligation::pass(
        "pole-order audit",
        format!("{} basis triples", samples.len()),
        audit.disclaimer.clone(),
    ));
    if let Some(p) = output {
        save(p, &certificate_to_json(&audit.witness))?;
    }
    Ok(Outcome {
        text: audit.to_text(),
        details: json!({
            "constant_c": audit.witness.constant_c.as_ref().map(format_scalar),
            "max_p1": audit.witness.p_axis.get(&0),
            "samples": audit.samples.len(),
        }),
        report,
    })
}

struct Correlator {
    doc: InstanceDocument,
    bra: String,
    ops: String,
    ket: String,
}

impl Correlator {
    fn load(a: &CorrelatorArgs) -> Result<Self, Failure> {
        Ok(Correlator { doc: load(&a.file)?, bra: a.bra.clone(), ops: a.ops.clone(), ket: a.ket.clone() })
    }

    fn parse(&self) -> Result<(Ctx<'_>, DualVector, Vec<(Elem, String)>, Elem), Failure> {
        let ctx = ctx_of(&self.doc);
        let default = if ctx.module.is_some() { Sp::W } else { Sp::V };
        let ops = args::parse_ops(&ctx, &self.ops)?;
        let ket = args::parse_elem(&ctx, &self.ket, default)?;
        let final_sp = if ket.sp == Sp::W || ops.iter().any(|(e, _)| e.sp == Sp::W) { Sp::W } else { Sp::V };
        let bra = args::parse_combination(ctx.space(final_sp)?, &self.bra)?;
        Ok((ctx, DualVector(bra), ops, ket))
    }
}

fn series_json(s: &CorrelationSeries) -> Value {
    let terms: Vec<Value> = s
        .series
        .poly
        .terms()
        .map(|(e, c)| json!({ "exponents": e, "coefficient": format_scalar(c) }))
        .collect();
    json!({
        "description": s.description,
        "mode": s.mode.to_string(),
        "variables": s.series.poly.vars(),
        "window": s.series.window.to_string(),
        "degree": s.degree,
        "terms": terms,
    })
}

fn correlate_cmd(a: &CorrelatorArgs, mode: CorrelationMode, order: Option<i64>) -> Result<Outcome, Failure> {
    let c = Correlator::load(a)?;
    let (ctx, bra, ops, ket) = c.parse()?;
    let s = correlate(&ctx, &bra, &ops, &ket, mode, order)?;
    let mut report = Report::new(format!("correlator {}", s.description));
    report.push(Obligation::pass("correlator computed", s.description.clone(), format!("[{}]", s.series.window)));
    Ok(Outcome { text: s.to_text(), details: series_json(&s), report })
}

fn reconstruct_cmd(a: &CorrelatorArgs, mode: ProductMode) -> Result<Outcome, Failure> {
    let c = Correlator::load(a)?;
    let (ctx, bra, ops, ket) = c.parse()?;
    let mode = match mode {
        ProductMode::Product => CorrelationMode::Product,
        ProductMode::Mixed => CorrelationMode::Mixed,
    };
    let s = correlate(&ctx, &bra, &ops, &ket, mode, None)?;
    let elems: Vec<Elem> = ops.iter().map(|(e, _)| e.clone()).collect();
    let poles = estimate_poles(&ctx, &elems, &ket)?;
    let rec = reconstruct_rational(&s, &poles)?;
    let name = "degree-certified reconstruction";
    let o = match (&rec.function, rec.shortfall) {
        (Some(f), _) => Obligation::pass(name, s.description.clone(), format!("f = {f}; {}", rec.explanation)),
        (None, Some(d)) => Obligation::insufficient(
            name,
            s.description.clone(),
            rec.explanation.clone(),
            format!("a cutoff raised by {d} would suffice"),
        ),
        (None, None) => Obligation::fail(name, s.description.clone(), "", rec.explanation.clone()),
    };
    let mut report = Report::new(format!("reconstruction of {}", s.description));
    report.push(o);
    let f = rec.function.as_ref().map(|f| f.to_string());
    Ok(Outcome {
        text: format!(
            "{}predicted numerator degree: {}\nfunction: {}\n",
            s.to_text(),
            rec.degree,
            f.as_deref().unwrap_or("not certified")
        ),
        details: json!({
            "series": series_json(&s),
            "degree": rec.degree,
            "certified": rec.certified,
            "function": f,
            "explanation": rec.explanation,
            "shortfall": rec.shortfall,
        }),
        report,
    })
}

fn regions_cmd(a: &CorrelatorArgs, order: i64) -> Result<Outcome, Failure> {
    let c = Correlator::load(a)?;
    let (ctx, bra, ops, ket) = c.parse()?;
    let report = match check_region_consistency(&ctx, &bra, &ops, &ket, order) {
        Ok(r) => r,
        Err(Error::WindowInsufficient { message, needed }) => {
            let mut r = Report::new("region consistency");
            r.push(Obligation::insufficient("degree-certified reconstruction", c.ops.clone(), message, needed));
            r
        }
        Err(e) => return Err(e.into()),
    };
    Ok(Outcome::new(report))
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Example { which, cutoff, level, size, module, output } => {
            example(*which, *cutoff, level, *size, *module, output)
        }
        Command::Check { file, suite, p1_max, max_weight } => check(file, *suite, *p1_max, max_weight),
        Command::Oppose { file, output } => oppose(file, output),
        Command::Transport { file, direction, output } => transport(file, *direction, output),
        Command::Contragredient { file, output, certificate, verify, region_weight, order } => {
            contragredient(file, output, certificate, *verify, *region_weight, *order)
        }
        Command::Audit { file, p1_max, max_weight, output } => audit(file, *p1_max, max_weight, output),
        Command::Correlate { args, mode, order } => correlate_cmd(args, *mode, *order),
        Command::Reconstruct { args, mode } => reconstruct_cmd(args, *mode),
        Command::Regions { args, order } => regions_cmd(args, *order),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Example { .. } => "example",
        Command::Check { .. } => "check",
        Command::Oppose { .. } => "oppose",
        Command::Transport { .. } => "transport",
        Command::Contragredient { .. } => "contragredient",
        Command::Audit { .. } => "audit",
        Command::Correlate { .. } => "correlate",
        Command::Reconstruct { .. } => "reconstruct",
        Command::Regions { .. } => "regions",
    }
}

/// Prints the report, or writes it to `$MOSVA_REPORT_DIR` when set.
fn emit(command: &str, format: ReportFormat, body: &str) -> Result<(), String> {
    match std::env::var_os("MOSVA_REPORT_DIR") {
        Some(dir) if !dir.is_empty() => {
            let dir = PathBuf::from(dir);
            fs::create_dir_all(&dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
            let ext = if format == ReportFormat::Machine { "json" } else { "txt" };
            let path = dir.join(format!("{command}-report.{ext}"));
            fs::write(&path, body).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            eprintln!("report written to {}", path.display());
        }
        _ => print!("{body}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let command = command_name(&cli.command);
    let (code, body) = match run(&cli) {
        Ok(out) => {
            let code = exit_code(out.report.verdict());
            let body = match cli.report {
                ReportFormat::Text => format!("{}{}", out.text, out.report.to_text()),
                ReportFormat::Machine => {
                    let v = json!({
                        "command": command,
                        "exit_code": code,
                        "verdict": out.report.verdict(),
                        "details": out.details,
                        "report": out.report,
                    });
                    format!("{}\n", serde_json::to_string_pretty(&v).expect("report serializes"))
                }
            };
            (code, body)
        }
        Err(f) => {
            let body = match cli.report {
                ReportFormat::Text => {
                    eprintln!("error: {}", f.message);
                    String::new()
                }
                ReportFormat::Machine => format!(
                    "{}\n",
                    serde_json::to_string_pretty(&json!({
                        "command": command,
                        "exit_code": f.code,
                        "error": f.message,
                    }))
                    .expect("error serializes")
                ),
            };
            (f.code, body)
        }
    };
    if !body.is_empty() {
        if let Err(e) = emit(command, cli.report, &body) {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    ExitCode::from(code)
}
