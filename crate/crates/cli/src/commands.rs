use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use toeplitz_core::dimension::{dim_ambient, dim_boundary, DimReport, Hypothesis, Ratio};
use toeplitz_core::families::{generate, validate, LevelVerdict, Preset};
use toeplitz_core::numeric::{parse_rational, rational_string, render};
use toeplitz_core::skeleton::{Essentiality, Regularity};
use toeplitz_core::window::{boundary_measure, project_check, properness_check, window_level, Properness};
use toeplitz_core::{Metric, SkeletonSpec, DEFAULT_BUDGET};

use crate::report::{decimal, exact, int, interval, Report, Table, DIGITS};
use crate::specfile::{parse_spec, SpecFile};

/// Depth used for presets when `--depth` is not given.
pub const PRESET_DEPTH: usize = 16;

#[derive(Parser, Debug)]
#[command(name = "toeplitz", version, about = "Binary Toeplitz skeletons, their model-set windows and boundary dimensions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Emit a spec file for a preset, rule or existing spec.
    Gen(GenArgs),
    /// Density table, regularity verdict and boundary-measure interval.
    Analyze(AnalyzeArgs),
    /// |U_ℓ|, |V_ℓ| and N(ℓ) per level, optionally with residues.
    Window(WindowArgs),
    /// Λ(W) on a range, cross-checked against direct evaluation.
    Project(ProjectArgs),
    /// Ambient and boundary box-dimension reports.
    Dim(DimArgs),
    /// Validation report and properness checks.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct SourceArgs {
    /// Spec file (JSON).
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    pub spec: Option<PathBuf>,
    /// Preset name: ruler-alt, fat-cantor or half-dim.
    #[arg(long)]
    pub preset: Option<String>,
    /// Depth of the skeleton (ruled specs are extended, finite ones truncated).
    #[arg(long)]
    pub depth: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Output file; relative paths resolve against $TOEPLITZ_OUT_DIR when set.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Unroll the layers into a finite table.
    #[arg(long)]
    pub finite: bool,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Deepest level analysed (default: the spec depth).
    #[arg(long)]
    pub lmax: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct WindowArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub lmax: Option<usize>,
    /// List residues of U_ℓ and V_ℓ where p_ℓ is within the budget.
    #[arg(long)]
    pub residues: bool,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ProjectArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Integer range `a:b`, inclusive.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
    pub range: (i64, i64),
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct DimArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub lmax: Option<usize>,
    /// `canonical`, or a JSON file `{"diameters": ["1/2", …]}` listing d_0, d_1, ….
    #[arg(long, default_value = "canonical")]
    pub metric: String,
    /// First level of the tail summary (default: lmax / 2).
    #[arg(long)]
    pub tail_start: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Integers that must be determined, `a:b`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range, default_value = "-100:100")]
    pub range: (i64, i64),
    /// Levels κ for the properness check.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub kappa: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("range {s:?} is not of the form a:b"))?;
    let a = a.trim().parse().map_err(|_| format!("bad range start {a:?}"))?;
    let b = b.trim().parse().map_err(|_| format!("bad range end {b:?}"))?;
    Ok((a, b))
}

/// A loaded skeleton with its canonical document and digest.
pub struct Loaded {
    pub spec: SkeletonSpec,
    pub source: Value,
    pub digest: String,
}

pub fn load(args: &SourceArgs) -> anyhow::Result<Loaded> {
    let (spec, source) = match (&args.spec, &args.preset) {
        (Some(path), _) => (parse_spec(path)?, json!({ "spec": path.display().to_string() })),
        (None, Some(name)) => {
            let preset = Preset::from_name(name).with_context(|| {
                format!("unknown preset {name:?}; expected one of {}", Preset::ALL.map(Preset::name).join(", "))
            })?;
            (generate(&preset.rule(), args.depth.unwrap_or(PRESET_DEPTH))?, json!({ "preset": name }))
        }
        (None, None) => bail!("either --spec or --preset is required"),
    };
    let spec = match args.depth {
        Some(d) if d != spec.depth() => {
            if !spec.is_ruled() && d > spec.depth() {
                bail!("--depth {d} exceeds the depth {} of the finite table", spec.depth());
            }
            spec.with_depth(d)?
        }
        _ => spec,
    };
    let digest = format!("sha256:{:x}", Sha256::digest(SpecFile::emit(&spec).to_json().as_bytes()));
    Ok(Loaded { spec, source, digest })
}

fn header(name: &str, loaded: &Loaded, args: Value) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!({ "name": name, "source": loaded.source, "args": args }));
    m.insert("spec".into(), json!({ "digest": loaded.digest, "depth": loaded.spec.depth(), "ruled": loaded.spec.is_ruled() }));
    m
}

fn finish(mut m: Map<String, Value>, table: Table, passed: bool, notes: Vec<String>) -> Report {
    m.insert("status".into(), Value::String(if passed { "PASS" } else { "FAIL" }.into()));
    Report { json: Value::Object(m), table, passed, notes }
}

fn lmax_for(spec: &SkeletonSpec, lmax: Option<usize>) -> anyhow::Result<usize> {
    let l = lmax.unwrap_or(spec.depth());
    if l > spec.depth() && !spec.is_ruled() {
        bail!("--lmax {l} exceeds the depth {} of the finite table", spec.depth());
    }
    Ok(l)
}

pub fn gen(args: &GenArgs) -> anyhow::Result<Vec<u8>> {
    let loaded = load(&args.source)?;
    let doc = if args.finite {
        let p = loaded.spec.scale().modulus(loaded.spec.depth());
        if p > &BigUint::from(args.budget) {
            bail!("p_{} = {p} exceeds the budget {}; emit the ruled form instead", loaded.spec.depth(), args.budget);
        }
        SpecFile::emit_finite(&loaded.spec)?
    } else {
        SpecFile::emit(&loaded.spec)
    };
    Ok(doc.to_json().into_bytes())
}

pub fn analyze(args: &AnalyzeArgs) -> anyhow::Result<Report> {
    let loaded = load(&args.source)?;
    let spec = &loaded.spec;
    let lmax = lmax_for(spec, args.lmax)?;
    let mut m = header("analyze", &loaded, json!({ "lmax": lmax }));

    let mut table = Table::new(&["level", "modulus", "filled", "density", "density_decimal", "defect", "defect_decimal"]);
    let mut rows = Vec::new();
    for row in spec.density_table(lmax)? {
        table.push(vec![
            row.level.to_string(),
            row.modulus.to_string(),
            row.filled.to_string(),
            rational_string(&row.density),
            decimal(&row.density),
            rational_string(&row.defect),
            decimal(&row.defect),
        ]);
        rows.push(json!({
            "level": row.level,
            "modulus": int(&row.modulus),
            "filled": int(&row.filled),
            "density": exact(&row.density),
            "defect": exact(&row.defect),
        }));
    }
    m.insert("densities".into(), Value::Array(rows));
    m.insert("regularity".into(), regularity_json(&spec.regularity(lmax)?));
    m.insert("boundary_measure".into(), interval(&boundary_measure(spec, lmax)?));
    Ok(finish(m, table, true, Vec::new()))
}

fn regularity_json(r: &Regularity) -> Value {
    match r {
        Regularity::Regular => json!({ "verdict": "Regular" }),
        Regularity::Irregular { defect } => json!({ "verdict": "Irregular", "limit_defect": interval(defect) }),
        Regularity::Undetermined { limit_density } => {
            json!({ "verdict": "Undetermined", "limit_density": interval(limit_density) })
        }
    }
}

pub fn window(args: &WindowArgs) -> anyhow::Result<Report> {
    let loaded = load(&args.source)?;
    let spec = &loaded.spec;
    let lmax = lmax_for(spec, args.lmax)?;
    let mut m = header("window", &loaded, json!({ "lmax": lmax, "residues": args.residues, "budget": args.budget }));
    let counts = spec.level_counts(lmax)?;
    let densities = spec.density_table(lmax)?;

    let mut table = Table::new(&["level", "modulus", "u", "v", "undetermined", "partition", "disjoint", "monotone"]);
    let mut rows = Vec::new();
    let mut passed = true;
    let mut prev = window_level(spec, 0, args.budget)?;
    for level in 0..=lmax {
        let w = if level == 0 { prev.clone() } else { window_level(spec, level, args.budget)? };
        let p = w.modulus().clone();
        let sum = w.u.len() + w.v.len() + &w.undetermined;
        let defect = if level == 0 { BigRational::one() } else { densities[level - 1].defect.clone() };
        let partition = sum == p
            && BigRational::new(w.undetermined.clone().into(), p.clone().into()) == defect
            && w.undetermined == counts[level].holes;
        let disjoint = w.u.is_disjoint(&w.v);
        let monotone = if level == 0 {
            Some(true)
        } else {
            prev.u.lifts_into(&w.u).zip(prev.v.lifts_into(&w.v)).map(|(a, b)| a && b)
        };
        passed &= partition && disjoint != Some(false) && monotone != Some(false);
        let flag = |b: Option<bool>| b.map_or("unchecked".to_string(), |b| b.to_string());
        table.push(vec![
            level.to_string(),
            p.to_string(),
            w.u.len().to_string(),
            w.v.len().to_string(),
            w.undetermined.to_string(),
            partition.to_string(),
            flag(disjoint),
            flag(monotone),
        ]);
        let mut row = json!({
            "level": level,
            "modulus": int(&p),
            "u": int(w.u.len()),
            "v": int(w.v.len()),
            "undetermined": int(&w.undetermined),
            "measure_u": exact(&w.u.measure()),
            "measure_v": exact(&w.v.measure()),
            "checks": { "partition": partition, "disjoint": disjoint, "monotone": monotone },
        });
        if args.residues {
            if let (Some(u), Some(v)) = (w.u.residues(), w.v.residues()) {
                row["u_residues"] = json!(u);
                row["v_residues"] = json!(v);
            }
        }
        rows.push(row);
        prev = w;
    }
    m.insert("levels".into(), Value::Array(rows));
    Ok(finish(m, table, passed, Vec::new()))
}

pub fn project(args: &ProjectArgs) -> anyhow::Result<Report> {
    let loaded = load(&args.source)?;
    let spec = &loaded.spec;
    let (a, b) = args.range;
    let depth = spec.depth();
    let mut m = header("project", &loaded, json!({ "range": format!("{a}:{b}"), "depth": depth }));
    let check = project_check(spec, a, b, depth)?;
    let members: std::collections::BTreeSet<i64> = check.members.iter().copied().collect();
    let mut table = Table::new(&["n", "in_window", "xi"]);
    for n in a..=b {
        let inside = members.contains(&n);
        table.push(vec![n.to_string(), inside.to_string(), u8::from(inside).to_string()]);
    }
    let verdict = if check.matches() { "MATCH" } else { "MISMATCH" };
    m.insert("members".into(), json!(check.members));
    m.insert("count".into(), json!(check.members.len()));
    m.insert("cross_check".into(), json!({ "verdict": verdict, "mismatches": check.mismatches }));
    let notes = vec![format!("{verdict}: Λ(W) ∩ [{a}, {b}] has {} points", check.members.len())];
    Ok(finish(m, table, check.matches(), notes))
}

fn ratio_json(r: &Ratio) -> Value {
    json!({
        "exact": r.exact.as_ref().map(rational_string),
        "decimal": render(&r.approx, DIGITS),
    })
}

fn ratio_cell(r: Option<&Ratio>) -> (String, String) {
    match r {
        Some(r) => (render(&r.approx, DIGITS), r.exact.as_ref().map(rational_string).unwrap_or_default()),
        None => (String::new(), String::new()),
    }
}

fn load_metric(arg: &str) -> anyhow::Result<Metric> {
    if arg == "canonical" {
        return Ok(Metric::Canonical);
    }
    #[derive(serde::Deserialize)]
    #[serde(deny_unknown_fields)]
    struct MetricFile {
        diameters: Vec<String>,
    }
    let text = std::fs::read_to_string(arg).with_context(|| format!("cannot read metric file {arg}"))?;
    let file: MetricFile = serde_json::from_str(&text).context("malformed metric file")?;
    let ds = file
        .diameters
        .iter()
        .map(|s| parse_rational(s).with_context(|| format!("diameter {s:?} is not a rational")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(Metric::custom(ds)?)
}

fn tail_json(report: &DimReport) -> Value {
    let b = |x: &toeplitz_core::dimension::Bounds| json!({ "sup": render(&x.sup, DIGITS), "inf": render(&x.inf, DIGITS) });
    json!({
        "start": report.tail.start,
        "end": report.tail.end,
        "ambient": b(&report.tail.ambient),
        "raw": report.tail.raw.as_ref().map(b),
        "slope": report.tail.slope.as_ref().map(b),
    })
}

pub fn dim(args: &DimArgs) -> anyhow::Result<Report> {
    let loaded = load(&args.source)?;
    let spec = &loaded.spec;
    let lmax = lmax_for(spec, args.lmax)?;
    let metric = load_metric(&args.metric)?;
    let mut m = header("dim", &loaded, json!({ "lmax": lmax, "metric": args.metric, "tail_start": args.tail_start }));

    let tail_start = args.tail_start.unwrap_or((lmax / 2).max(1));
    let boundary = dim_boundary(spec, &metric, lmax)?.with_tail_start(tail_start);
    let scale = spec.scale_to(lmax + 1).or_else(|_| spec.scale_to(lmax))?;
    let ambient = dim_ambient(&scale, &metric, lmax)?.with_tail_start(tail_start);

    let tolerance = parse_rational("1/1000000000000").expect("literal");
    let tol = toeplitz_core::numeric::decimal_of_ratio(&tolerance);
    let mut table = Table::new(&[
        "level", "modulus", "cover", "diameter", "raw", "raw_exact", "slope", "slope_exact", "ambient", "ambient_exact",
    ]);
    let mut rows = Vec::new();
    let mut passed = true;
    for row in &boundary.rows {
        let within = row.factorization_error().is_some_and(|e| e < tol);
        passed &= within;
        let (raw, raw_exact) = ratio_cell(row.raw.as_ref());
        let (slope, slope_exact) = ratio_cell(row.slope.as_ref());
        let (amb, amb_exact) = ratio_cell(Some(&row.ambient));
        let cover = row.cover.as_ref().map(|c| c.to_string()).unwrap_or_default();
        table.push(vec![
            row.level.to_string(),
            row.modulus.to_string(),
            cover.clone(),
            rational_string(&row.diameter),
            raw,
            raw_exact,
            slope,
            slope_exact,
            amb,
            amb_exact,
        ]);
        rows.push(json!({
            "level": row.level,
            "modulus": int(&row.modulus),
            "cover": cover,
            "diameter": exact(&row.diameter),
            "raw": row.raw.as_ref().map(ratio_json),
            "slope": row.slope.as_ref().map(ratio_json),
            "ambient": ratio_json(&row.ambient),
            "factorization_ok": within,
        }));
    }
    let hypothesis = match boundary.hypothesis {
        Some(Hypothesis::Satisfied) => "satisfied",
        Some(Hypothesis::Violated) => "VIOLATED",
        _ => "unverified",
    };
    let mut notes = Vec::new();
    if boundary.hypothesis == Some(Hypothesis::Violated) {
        notes.push("warning: lim D(p_ℓ) < 1, so the boundary dimension formula does not apply".to_string());
    }
    m.insert("hypothesis".into(), json!(hypothesis));
    m.insert("boundary".into(), json!({ "rows": rows, "tail": tail_json(&boundary) }));
    m.insert(
        "ambient".into(),
        json!({
            "rows": ambient.rows.iter().map(|r| json!({ "level": r.level, "ratio": ratio_json(&r.ambient) })).collect::<Vec<_>>(),
            "tail": tail_json(&ambient),
        }),
    );
    Ok(finish(m, table, passed, notes))
}

fn essential_json(e: &Essentiality) -> Value {
    match e {
        Essentiality::Essential => json!({ "verdict": "Essential" }),
        Essentiality::NotEssential { divisor } => json!({ "verdict": "NotEssential", "divisor": int(divisor) }),
        Essentiality::UnverifiableAtDepth => json!({ "verdict": "UnverifiableAtDepth" }),
    }
}

pub fn verify(args: &VerifyArgs) -> anyhow::Result<Report> {
    let loaded = load(&args.source)?;
    let spec = &loaded.spec;
    let depth = spec.depth();
    let (a, b) = args.range;
    let mut m = header(
        "verify",
        &loaded,
        json!({ "range": format!("{a}:{b}"), "kappa": args.kappa, "budget": args.budget, "depth": depth }),
    );
    let report = validate(spec, depth, a, b, args.budget)?;
    let mut table = Table::new(&["check", "level", "verdict", "witness"]);
    let mut add = |check: &str, level: String, verdict: &str, witness: String| {
        table.push(vec![check.into(), level, verdict.into(), witness]);
    };

    match &report.refinement {
        None => add("refinement", String::new(), "pass", String::new()),
        Some(c) => add("refinement", c.level.to_string(), "fail", format!("{} (filled at level {})", c.residue, c.earlier_level)),
    }
    let mut periodicity = Vec::new();
    for (level, v) in &report.periodicity {
        let (verdict, witness) = match v {
            LevelVerdict::Pass => ("pass", None),
            LevelVerdict::Fail { residue } => ("fail", Some(residue)),
            LevelVerdict::Unverifiable { residue } => ("unverifiable", Some(residue)),
        };
        add("periodicity", level.to_string(), verdict, witness.map(|w| w.to_string()).unwrap_or_default());
        periodicity.push(json!({ "level": level, "verdict": verdict, "residue": witness.map(int) }));
    }
    let cov = &report.coverage;
    add(
        "coverage",
        String::new(),
        if cov.total_uncovered == 0 { "pass" } else { "fail" },
        cov.uncovered.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" "),
    );
    for (level, e) in &report.essential {
        let (verdict, witness) = match e {
            Essentiality::Essential => ("pass", String::new()),
            Essentiality::NotEssential { divisor } => ("fail", divisor.to_string()),
            Essentiality::UnverifiableAtDepth => ("unverifiable", String::new()),
        };
        add("essential", level.to_string(), verdict, witness);
    }
    for level in &report.holeless_levels {
        add("holes", level.to_string(), "fail", String::new());
    }

    let mut properness = Vec::new();
    let mut proper = true;
    for &kappa in &args.kappa {
        if kappa == 0 || kappa > depth {
            bail!("--kappa {kappa} outside 1..={depth}");
        }
        match properness_check(spec, kappa, depth, args.budget)? {
            Properness::VerifiedToDepth(d) => {
                add("properness", kappa.to_string(), "pass", String::new());
                properness.push(json!({ "kappa": kappa, "verdict": "VerifiedToDepth", "depth": d }));
            }
            Properness::Counterexample { residue, missing } => {
                proper = false;
                add("properness", kappa.to_string(), "fail", format!("{residue} (no symbol {missing})"));
                properness.push(json!({
                    "kappa": kappa,
                    "verdict": "Counterexample",
                    "residue": int(&residue),
                    "missing_symbol": missing.as_u8(),
                }));
            }
        }
    }

    m.insert(
        "validation".into(),
        json!({
            "refinement": report.refinement.as_ref().map(|c| json!({
                "level": c.level, "residue": int(&c.residue), "earlier_level": c.earlier_level,
            })),
            "periodicity": periodicity,
            "coverage": {
                "range": format!("{}:{}", cov.start, cov.end),
                "uncovered": cov.uncovered,
                "total_uncovered": cov.total_uncovered,
            },
            "essential": report.essential.iter().map(|(l, e)| json!({ "level": l, "result": essential_json(e) })).collect::<Vec<_>>(),
            "holeless_levels": report.holeless_levels,
            "passed": report.passed(),
        }),
    );
    m.insert("properness".into(), Value::Array(properness));
    let passed = report.passed() && proper;
    Ok(finish(m, table, passed, Vec::new()))
}

/// Bytes to write for one command invocation.
pub struct Outcome {
    pub bytes: Vec<u8>,
    pub out: Option<PathBuf>,
    /// Every check of the command passed.
    pub passed: bool,
    pub notes: Vec<String>,
}

pub fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let (report, output) = match &cli.command {
        Command::Gen(args) => {
            return Ok(Outcome { bytes: gen(args)?, out: args.out.clone(), passed: true, notes: Vec::new() })
        }
        Command::Analyze(args) => (analyze(args)?, &args.output),
        Command::Window(args) => (window(args)?, &args.output),
        Command::Project(args) => (project(args)?, &args.output),
        Command::Dim(args) => (dim(args)?, &args.output),
        Command::Verify(args) => (verify(args)?, &args.output),
    };
    let bytes = match output.format {
        Format::Json => report.to_json(),
        Format::Csv => report.table.to_csv(),
    };
    Ok(Outcome { bytes, out: output.out.clone(), passed: report.passed, notes: report.notes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("toeplitz").chain(args.iter().copied())).unwrap()
    }

    fn source(preset: &str, depth: usize) -> SourceArgs {
        SourceArgs { spec: None, preset: Some(preset.into()), depth: Some(depth) }
    }

    fn output() -> OutputArgs {
        OutputArgs { format: Format::Json, out: None }
    }

    #[test]
    fn ranges_parse() {
        assert_eq!(parse_range("-10000:10000"), Ok((-10000, 10000)));
        assert_eq!(parse_range("0:9"), Ok((0, 9)));
        assert!(parse_range("3").is_err());
        let c = cli(&["project", "--preset", "ruler-alt", "--range", "-4:-1"]);
        match c.command {
            Command::Project(p) => assert_eq!(p.range, (-4, -1)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn analyze_fat_cantor() {
        let r = analyze(&AnalyzeArgs { source: source("fat-cantor", 6), lmax: Some(40), output: output() }).unwrap();
        assert_eq!(r.json["regularity"]["verdict"], "Irregular");
        let hi = r.json["boundary_measure"]["hi"]["decimal"].as_str().unwrap();
        assert!(hi.starts_with("0.2887880950868"), "{hi}");
        assert_eq!(r.table.rows.len(), 40);
    }

    #[test]
    fn project_ruler() {
        let r = project(&ProjectArgs { source: source("ruler-alt", 8), range: (0, 9), output: output() }).unwrap();
        assert_eq!(r.json["members"], json!([0, 1, 2, 4, 5, 6, 8, 9]));
        assert_eq!(r.json["cross_check"]["verdict"], "MATCH");
        assert!(r.passed);
        assert!(project(&ProjectArgs { source: source("ruler-alt", 3), range: (0, 9), output: output() }).is_err());
    }

    #[test]
    fn dim_half_dim_slope_column() {
        let r = dim(&DimArgs {
            source: source("half-dim", 4),
            lmax: Some(10),
            metric: "canonical".into(),
            tail_start: None,
            output: output(),
        })
        .unwrap();
        for row in r.json["boundary"]["rows"].as_array().unwrap() {
            assert_eq!(row["slope"]["exact"], "1/2");
            assert_eq!(row["slope"]["decimal"], "0.5");
        }
        assert_eq!(r.json["boundary"]["rows"][9]["raw"]["exact"], "5/11");
        assert_eq!(r.json["hypothesis"], "satisfied");
        assert!(r.passed);
    }

    #[test]
    fn window_and_verify_pass_on_presets() {
        for preset in Preset::ALL {
            let depth = if preset == Preset::FatCantor { 5 } else { 10 };
            let w = window(&WindowArgs {
                source: source(preset.name(), depth),
                lmax: Some(depth.min(8)),
                residues: false,
                budget: DEFAULT_BUDGET,
                output: output(),
            })
            .unwrap();
            assert!(w.passed, "{preset}");
            let v = verify(&VerifyArgs {
                source: source(preset.name(), depth),
                range: (-100, 100),
                kappa: vec![1, 2, 3],
                budget: DEFAULT_BUDGET,
                output: output(),
            })
            .unwrap();
            assert!(v.passed, "{preset}: {}", v.json);
        }
    }
}
