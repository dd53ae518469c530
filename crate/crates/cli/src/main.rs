//! unifree: analyze described self-maps, lift targets through universal
//! maps, run category law suites, and drive the exact l1 lifting pipeline.
//!
//! Every command reads JSON inputs, prints a human-readable or `--json`
//! report, and exits 0 when all checks pass, 1 when a check fails, and 2 on
//! input errors. JSON reports are byte-deterministic for identical inputs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use unifree_core::action::{Point, SetCarrier};
use unifree_core::cert::{CertSquare, Certificate};
use unifree_core::ellone::{NuOperator, TargetOperator};
use unifree_core::freecat::{
    diagram_coherence, run_law_suite, ConcreteCategory, EnsCat, FinVecQCat, FreeMAction,
    LawSuiteConfig, MonounaryCat,
};
use unifree_core::funcgraph::{
    decide_universality, lift_with_fixed_point, ComponentClass, SelfMapDescription, TargetMap,
};
use unifree_core::linalg::Matrix;
use unifree_core::monoid::{EnumerationBound, Monoid};
use unifree_core::Rat;

#[derive(Parser)]
#[command(
    name = "unifree",
    version,
    about = "Universal monoid actions on free objects: verdicts, liftings, and certificates",
    after_help = "EXIT CODES:\n  0  all checks pass\n  1  a check failed\n  2  input error"
)]
struct Cli {
    /// Emit a machine-readable JSON report
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide surjective universality of a described self-map
    Analyze {
        /// Self-map description (JSON)
        file: PathBuf,
    },
    /// Lift a finite target self-map through a described source map
    Lift {
        /// Source self-map description (JSON)
        #[arg(long)]
        source: PathBuf,
        /// Finite target self-map (JSON)
        #[arg(long)]
        target: PathBuf,
        /// Evaluation depth per component
        #[arg(long)]
        depth: u64,
        /// Components to materialize from the source
        #[arg(long, default_value_t = 6)]
        components: usize,
        /// Use the fixed-point route; pass a point label to designate it
        #[arg(long, value_name = "LABEL", num_args = 0..=1, default_missing_value = "")]
        fixed_point: Option<String>,
    },
    /// Re-verify every commutation certificate found in a report file
    Certify {
        /// Report or certificate file (JSON)
        file: PathBuf,
    },
    /// Run the extension laws and nice-epi axioms on a category instance
    Laws {
        /// Instance: ens, monounary, or finvecq
        #[arg(long)]
        category: String,
        /// Object size bound
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// Exact l1 operator commands
    Ellone {
        #[command(subcommand)]
        command: ElloneCommand,
    },
    /// Build the universal monoid action on a free object
    Universal {
        /// Instance: ens, monounary, or finvecq
        #[arg(long)]
        category: String,
        /// Monoid description (JSON)
        #[arg(long)]
        monoid: PathBuf,
        /// Number of index points of the base set
        #[arg(long, default_value_t = 3)]
        index_bound: usize,
        /// Enumeration bound for monoid elements and words
        #[arg(long, default_value_t = 6)]
        bound: usize,
    },
}

#[derive(Subcommand)]
enum ElloneCommand {
    /// Lift a rational nonexpansive matrix through l1(nu)
    Lift {
        /// Target operator matrix (JSON, rationals as "p/q" strings)
        #[arg(long)]
        target: PathBuf,
        /// Seed points of the unit ball (JSON)
        #[arg(long)]
        seed: PathBuf,
        /// Closure depth for the seed orbit
        #[arg(long)]
        depth: u64,
        /// Rows of the evaluated nu rectangle
        #[arg(long, default_value_t = 6)]
        nu_depth: u64,
        /// Seed for the sampled combination checks
        #[arg(long, default_value_t = 0)]
        sample_seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(all_pass) => {
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Analyze { file } => analyze(cli.json, file),
        Command::Lift { source, target, depth, components, fixed_point } => {
            lift(cli.json, source, target, *depth, *components, fixed_point.as_deref())
        }
        Command::Certify { file } => certify(cli.json, file),
        Command::Laws { category, bound } => laws(cli.json, category, *bound),
        Command::Ellone { command } => match command {
            ElloneCommand::Lift { target, seed, depth, nu_depth, sample_seed } => {
                ellone_lift(cli.json, target, seed, *depth, *nu_depth, *sample_seed)
            }
        },
        Command::Universal { category, monoid, index_bound, bound } => {
            universal(cli.json, category, monoid, *index_bound, *bound)
        }
    }
}

// ------------------------------------------------------------ file loading

fn load_json(path: &Path) -> Result<serde_json::Value> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))
}

fn load_description(path: &Path) -> Result<SelfMapDescription> {
    let v = load_json(path)?;
    let d: SelfMapDescription = serde_json::from_value(v)
        .with_context(|| format!("{} is not a self-map description", path.display()))?;
    d.validate().map_err(|e| anyhow!("{}: {e}", path.display()))?;
    Ok(d)
}

fn load_target(path: &Path) -> Result<TargetMap> {
    let v = load_json(path)?;
    let t: TargetMap = serde_json::from_value(v)
        .with_context(|| format!("{} is not a target self-map", path.display()))?;
    t.validate().map_err(|e| anyhow!("{}: {e}", path.display()))?;
    Ok(t)
}

fn parse_rat(v: &serde_json::Value) -> Result<Rat> {
    match v {
        serde_json::Value::String(s) => {
            Rat::from_str(s).map_err(|e| anyhow!("bad rational {s:?}: {e}"))
        }
        serde_json::Value::Number(n) => {
            let i = n.as_i64().ok_or_else(|| anyhow!("bad rational {n}"))?;
            Ok(Rat::from_integer(i.into()))
        }
        other => bail!("expected a rational, got {other}"),
    }
}

fn parse_matrix(v: &serde_json::Value) -> Result<Matrix<Rat>> {
    let rows_val = v
        .get("matrix")
        .and_then(|m| m.as_array())
        .ok_or_else(|| anyhow!("expected {{\"matrix\": [[...]]}}"))?;
    let mut rows = Vec::with_capacity(rows_val.len());
    for row in rows_val {
        let cells = row.as_array().ok_or_else(|| anyhow!("matrix rows must be arrays"))?;
        rows.push(cells.iter().map(parse_rat).collect::<Result<Vec<_>>>()?);
    }
    Matrix::from_rows(rows).ok_or_else(|| anyhow!("matrix rows have unequal lengths"))
}

fn parse_points(v: &serde_json::Value) -> Result<Vec<Vec<Rat>>> {
    let pts = v
        .get("points")
        .and_then(|m| m.as_array())
        .ok_or_else(|| anyhow!("expected {{\"points\": [[...]]}}"))?;
    let mut out = Vec::with_capacity(pts.len());
    for p in pts {
        let cells = p.as_array().ok_or_else(|| anyhow!("points must be arrays"))?;
        out.push(cells.iter().map(parse_rat).collect::<Result<Vec<_>>>()?);
    }
    Ok(out)
}

fn load_monoid(path: &Path) -> Result<Monoid> {
    let v = load_json(path)?;
    let m: Monoid = serde_json::from_value(v)
        .with_context(|| format!("{} is not a monoid description", path.display()))?;
    m.validate().map_err(|e| anyhow!("{}: {e}", path.display()))?;
    Ok(m)
}

// ---------------------------------------------------------------- reports

#[derive(Serialize)]
struct CertificateReport {
    passing: bool,
    square_count: usize,
    skipped: usize,
    failures: Vec<CertSquare>,
    /// The full certificate, re-verifiable with `unifree certify`.
    certificate: Certificate,
}

impl CertificateReport {
    fn from(cert: &Certificate) -> Self {
        CertificateReport {
            passing: cert.all_pass(),
            square_count: cert.len(),
            skipped: cert.skipped,
            failures: cert.failures().cloned().collect(),
            certificate: cert.clone(),
        }
    }
}

fn emit<R: Serialize>(json: bool, report: &R, text: impl FnOnce()) -> Result<()> {
    if json {
        println!("{}", serde_json::to_string_pretty(report)?);
    } else {
        text();
    }
    Ok(())
}

// ---------------------------------------------------------------- analyze

#[derive(Serialize)]
struct AnalyzeReport {
    universal: bool,
    #[serde(rename = "condition_I")]
    condition_i: String,
    #[serde(rename = "condition_W")]
    condition_w: String,
    components: Vec<String>,
    counterexample: Option<String>,
}

fn analyze(json: bool, file: &Path) -> Result<bool> {
    let d = load_description(file)?;
    let verdict = decide_universality(&d).map_err(|e| anyhow!("{e}"))?;
    let condition_w = if verdict
        .condition_w
        .iter()
        .all(|(_, c)| *c == ComponentClass::Natural)
    {
        "all natural".to_string()
    } else {
        verdict
            .condition_w
            .iter()
            .filter(|(_, c)| *c != ComponentClass::Natural)
            .map(|(id, c)| format!("{id}: {c}"))
            .collect::<Vec<_>>()
            .join("; ")
    };
    let report = AnalyzeReport {
        universal: verdict.is_universal,
        condition_i: verdict.component_count.to_string(),
        condition_w,
        components: verdict
            .condition_w
            .iter()
            .map(|(id, c)| format!("{id}: {c}"))
            .collect(),
        counterexample: verdict.counterexample.as_ref().map(|c| c.to_string()),
    };
    emit(json, &report, || {
        println!("universal: {}", report.universal);
        println!("condition I: {}", report.condition_i);
        println!("condition W: {}", report.condition_w);
        if let Some(ce) = &report.counterexample {
            println!("counterexample: {ce}");
        }
    })?;
    Ok(report.universal)
}

// ------------------------------------------------------------------- lift

#[derive(Serialize)]
struct LiftReport {
    route: String,
    depth: u64,
    components: usize,
    vertices: usize,
    surjective_on_bound: bool,
    certificate: CertificateReport,
    assignment: BTreeMap<String, String>,
}

fn lift(
    json: bool,
    source: &Path,
    target_path: &Path,
    depth: u64,
    components: usize,
    fixed_point: Option<&str>,
) -> Result<bool> {
    let d = load_description(source)?;
    let target = load_target(target_path)?;
    let lifting = match fixed_point {
        Some(label) => {
            let designated = if label.is_empty() {
                None
            } else {
                Some(
                    target
                        .points
                        .iter()
                        .position(|p| p == label)
                        .ok_or_else(|| anyhow!("unknown target point {label:?}"))?,
                )
            };
            lift_with_fixed_point(&d, &target, designated, depth, components)
                .map_err(|e| anyhow!("{e}"))?
        }
        None => {
            let verdict = decide_universality(&d).map_err(|e| anyhow!("{e}"))?;
            match verdict.witness {
                Some(w) => w.onto(&target, depth, components).map_err(|e| anyhow!("{e}"))?,
                None => {
                    let ce = verdict
                        .counterexample
                        .map(|c| c.to_string())
                        .unwrap_or_else(|| "not universal".into());
                    bail!("source is not surjectively universal ({ce}); try --fixed-point");
                }
            }
        }
    };
    let assignment: BTreeMap<String, String> = (0..lifting.truncation.len())
        .map(|v| {
            (
                lifting.truncation.vertex_name(v),
                target.points[lifting.assignment[v]].clone(),
            )
        })
        .collect();
    let report = LiftReport {
        route: if fixed_point.is_some() { "fixed_point".into() } else { "universal".into() },
        depth,
        components: lifting.truncation.slots.len(),
        vertices: lifting.truncation.len(),
        surjective_on_bound: lifting.surjective_on_bound,
        certificate: CertificateReport::from(&lifting.certificate),
        assignment,
    };
    emit(json, &report, || {
        println!("route: {}", report.route);
        println!(
            "lifting on {} vertices in {} components",
            report.vertices, report.components
        );
        println!("surjective on bound: {}", report.surjective_on_bound);
        println!(
            "certificate: {} squares, {} skipped, passing: {}",
            report.certificate.square_count,
            report.certificate.skipped,
            report.certificate.passing
        );
    })?;
    Ok(report.certificate.passing && report.surjective_on_bound)
}

// ---------------------------------------------------------------- certify

#[derive(Serialize)]
struct CertifyReport {
    certificates: usize,
    squares: usize,
    skipped: u64,
    failures: Vec<CertSquare>,
}

fn collect_certificates(v: &serde_json::Value, out: &mut Vec<Certificate>) {
    match v {
        serde_json::Value::Object(map) => {
            if map.contains_key("squares") {
                if let Ok(cert) = serde_json::from_value::<Certificate>(v.clone()) {
                    out.push(cert);
                    return;
                }
            }
            for child in map.values() {
                collect_certificates(child, out);
            }
        }
        serde_json::Value::Array(items) => {
            for child in items {
                collect_certificates(child, out);
            }
        }
        _ => {}
    }
}

fn certify(json: bool, file: &Path) -> Result<bool> {
    let v = load_json(file)?;
    let mut certs = Vec::new();
    collect_certificates(&v, &mut certs);
    if certs.is_empty() {
        bail!("{} contains no certificates", file.display());
    }
    let report = CertifyReport {
        certificates: certs.len(),
        squares: certs.iter().map(Certificate::len).sum(),
        skipped: certs.iter().map(|c| c.skipped as u64).sum(),
        failures: certs
            .iter()
            .flat_map(|c| c.failures().cloned().collect::<Vec<_>>())
            .collect(),
    };
    let ok = report.failures.is_empty();
    emit(json, &report, || {
        println!(
            "{} certificates, {} squares, {} skipped",
            report.certificates, report.squares, report.skipped
        );
        if ok {
            println!("all squares verify");
        } else {
            println!("{} squares FAIL", report.failures.len());
            for f in &report.failures {
                println!("  [{} @ {}] {} != {}", f.label, f.input, f.lhs, f.rhs);
            }
        }
    })?;
    Ok(ok)
}

// ------------------------------------------------------------------- laws

#[derive(Serialize)]
struct LawLine {
    law: String,
    checked: usize,
    failures: Vec<String>,
}

#[derive(Serialize)]
struct LawsReport {
    category: String,
    size_bound: usize,
    passed: bool,
    laws: Vec<LawLine>,
}

fn laws(json: bool, category: &str, bound: usize) -> Result<bool> {
    let config = LawSuiteConfig { size_bound: bound, ..Default::default() };
    let report = match category {
        "ens" => run_law_suite(&EnsCat, &config),
        "monounary" => run_law_suite(&MonounaryCat::default(), &config),
        "finvecq" => run_law_suite(&FinVecQCat, &config),
        other => bail!("unknown category {other:?}; expected ens, monounary, or finvecq"),
    };
    let out = LawsReport {
        category: category.to_string(),
        size_bound: bound,
        passed: report.passed(),
        laws: report
            .laws()
            .into_iter()
            .map(|(name, law)| LawLine {
                law: name.to_string(),
                checked: law.checked,
                failures: law.failures.clone(),
            })
            .collect(),
    };
    emit(json, &out, || {
        println!("category: {}", out.category);
        for line in &out.laws {
            let status = if line.failures.is_empty() { "pass" } else { "FAIL" };
            println!("  {:<22} {:>6} checks  {status}", line.law, line.checked);
            for f in &line.failures {
                println!("    {f}");
            }
        }
        println!("all laws pass: {}", out.passed);
    })?;
    Ok(out.passed)
}

// ----------------------------------------------------------------- ellone

#[derive(Serialize)]
struct ElloneReport {
    dim: usize,
    closure_size: usize,
    closure_truncated: bool,
    surjective_by_rank: bool,
    nonexpansive: bool,
    norm_one_projection: bool,
    samples_checked: usize,
    certified: bool,
    target_certificate: CertificateReport,
    set_certificate: CertificateReport,
    square_certificate: CertificateReport,
    composite_certificate: CertificateReport,
}

fn ellone_lift(
    json: bool,
    target_path: &Path,
    seed_path: &Path,
    depth: u64,
    nu_depth: u64,
    sample_seed: u64,
) -> Result<bool> {
    let target = TargetOperator::new(parse_matrix(&load_json(target_path)?)?)
        .map_err(|e| anyhow!("{}: {e}", target_path.display()))?;
    let seeds = parse_points(&load_json(seed_path)?)?;
    let nuop = NuOperator::new(nu_depth);
    let lifting = nuop
        .lift(&target, &seeds, depth, sample_seed)
        .map_err(|e| anyhow!("{e}"))?;
    let report = ElloneReport {
        dim: target.dim,
        closure_size: lifting.target_lifting.basis.len(),
        closure_truncated: lifting.target_lifting.truncated,
        surjective_by_rank: lifting.surjective,
        nonexpansive: lifting.nonexpansive,
        norm_one_projection: lifting.square.norm_one,
        samples_checked: lifting.square.samples_checked,
        certified: lifting.certified(),
        target_certificate: CertificateReport::from(&lifting.target_lifting.certificate),
        set_certificate: CertificateReport::from(&lifting.set_lifting.certificate),
        square_certificate: CertificateReport::from(&lifting.square.certificate),
        composite_certificate: CertificateReport::from(&lifting.composite_certificate),
    };
    emit(json, &report, || {
        println!("target dimension: {}", report.dim);
        println!(
            "invariant closure: {} vectors (truncated: {})",
            report.closure_size, report.closure_truncated
        );
        println!("q surjective by exact rank: {}", report.surjective_by_rank);
        println!("q nonexpansive: {}", report.nonexpansive);
        println!("l1(p) norm one: {}", report.norm_one_projection);
        println!("certified: {}", report.certified);
    })?;
    Ok(report.certified)
}

// -------------------------------------------------------------- universal

#[derive(Serialize)]
struct UniversalReport {
    category: String,
    basis: Vec<String>,
    endomorphisms: BTreeMap<String, String>,
    skipped_elements: usize,
    action_laws_pass: bool,
    diagram_coherent: bool,
}

fn universal_report<C: ConcreteCategory>(
    cat: &C,
    category: &str,
    free: &FreeMAction<C>,
    describe: impl Fn(&C::Morphism) -> String,
) -> UniversalReport {
    UniversalReport {
        category: category.to_string(),
        basis: free.basis.iter().map(Point::to_string).collect(),
        endomorphisms: free
            .action
            .table
            .iter()
            .map(|(m, f)| (m.to_string(), describe(f)))
            .collect(),
        skipped_elements: free.skipped_elements,
        action_laws_pass: free.action.check_laws(cat).passed(),
        diagram_coherent: diagram_coherence(cat, free).unwrap_or(false),
    }
}

fn universal(
    json: bool,
    category: &str,
    monoid_path: &Path,
    index_bound: usize,
    bound: usize,
) -> Result<bool> {
    let monoid = load_monoid(monoid_path)?;
    let index = SetCarrier::finite((0..index_bound).map(|i| format!("i{i}")))
        .map_err(|e| anyhow!("{e}"))?;
    let enum_bound =
        EnumerationBound::new(bound, bound.min(6)).map_err(|e| anyhow!("{e}"))?;
    let report = match category {
        "ens" => {
            let cat = EnsCat;
            let free = unifree_core::freecat::universal_action_on_free(
                &cat, &monoid, &index, &enum_bound,
            )
            .map_err(|e| anyhow!("{e}"))?;
            universal_report(&cat, category, &free, |f| {
                f.map
                    .iter()
                    .map(|(x, y)| format!("{x}->{y}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            })
        }
        "monounary" => {
            let cat = MonounaryCat::default();
            let free = unifree_core::freecat::universal_action_on_free(
                &cat, &monoid, &index, &enum_bound,
            )
            .map_err(|e| anyhow!("{e}"))?;
            universal_report(&cat, category, &free, |f| format!("{:?}", f.map))
        }
        "finvecq" => {
            let cat = FinVecQCat;
            let free = unifree_core::freecat::universal_action_on_free(
                &cat, &monoid, &index, &enum_bound,
            )
            .map_err(|e| anyhow!("{e}"))?;
            universal_report(&cat, category, &free, |f| f.matrix.to_string())
        }
        other => bail!("unknown category {other:?}; expected ens, monounary, or finvecq"),
    };
    emit(json, &report, || {
        println!("category: {}", report.category);
        println!("basis ({} pairs):", report.basis.len());
        for b in &report.basis {
            println!("  {b}");
        }
        println!("endomorphisms:");
        for (m, desc) in &report.endomorphisms {
            println!("  {m}: {desc}");
        }
        if report.skipped_elements > 0 {
            println!(
                "{} monoid elements shift outside the enumerated basis",
                report.skipped_elements
            );
        }
        println!("action laws pass: {}", report.action_laws_pass);
        println!("diagram coherent: {}", report.diagram_coherent);
    })?;
    Ok(report.action_laws_pass && report.diagram_coherent)
}

