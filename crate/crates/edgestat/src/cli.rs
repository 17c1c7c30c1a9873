//! Command-line front end. Exit codes: 0 when every certificate passes, 1 when
//! one fails, 2 on usage or resource errors.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use edgestat_core::constructions::{
    build_host, edge_count_dist, greedy_clique_sizes, limit_probability, PartFamily,
};
use edgestat_core::dist::{bernoulli_value_dist, slice_value_dist, SliceSpec};
use edgestat_core::rational::{decimal_string, fraction_string, parse_rational};
use edgestat_core::verify::{
    better34_report, default_grid, prop027_report, rerun, star_zero_probability_search,
    table_report_from, verify_prop_033, VerificationReport, DEFAULT_GRID_DENOMINATOR,
};
use edgestat_core::{Caps, Error, MultilinearPoly, Rational};
use serde_json::{json, Value};

use crate::format;
use crate::parallel;
use crate::reproduce::{reference_constant, Reproduction};
use crate::suites;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

type CliResult<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

fn exact(text: &str) -> std::result::Result<Rational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

fn integer<T: TryFrom<i128>>(text: &str) -> std::result::Result<T, String> {
    let v = exact(text)?;
    if !v.is_integer() {
        return Err(format!("{text} is not an integer"));
    }
    let big = v.to_integer();
    let small: i128 = big.try_into().map_err(|_| format!("{text} is out of range"))?;
    T::try_from(small).map_err(|_| format!("{text} is out of range"))
}

fn positive<T: TryFrom<i128> + PartialOrd + Default>(text: &str) -> std::result::Result<T, String> {
    let v: T = integer(text)?;
    if v <= T::default() {
        return Err(format!("{text} must be positive"));
    }
    Ok(v)
}

fn slice_arg(text: &str) -> std::result::Result<(usize, usize), String> {
    let (n, k) = text.split_once(',').ok_or("expected N,K")?;
    Ok((integer(n.trim())?, integer(k.trim())?))
}

#[derive(Parser, Debug)]
#[command(name = "edgestat", version, about = "Exact point-concentration certificates for induced edge counts")]
pub struct Cli {
    /// Write JSON output (reports, distributions, members) to this path.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Write CSV output to this path.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Worker threads (default: EDGESTAT_WORKERS, else one per core).
    #[arg(long, global = true, value_parser = positive::<usize>)]
    workers: Option<usize>,
    #[arg(long, global = true, value_parser = positive::<u64>)]
    assignment_cap: Option<u64>,
    #[arg(long, global = true, value_parser = positive::<u64>)]
    subset_cap: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate G(m) up to permutation of variables.
    Enumerate {
        #[arg(long, value_parser = positive::<u32>)]
        m: u32,
        /// Also print the number of classes per variable count.
        #[arg(long)]
        per_s: bool,
    },
    /// Run certificates.
    Verify {
        target: Target,
        /// Largest m for the table (6 is slow and has no published value).
        #[arg(long, default_value = "5", value_parser = positive::<u32>)]
        max_m: u32,
        #[arg(long, default_value_t = DEFAULT_GRID_DENOMINATOR, value_parser = positive::<u32>)]
        grid_denominator: u32,
    },
    /// Exact value distribution of a polynomial.
    Dist {
        #[arg(long)]
        poly: String,
        #[arg(long, value_parser = exact)]
        p: Option<Rational>,
        #[arg(long, value_parser = integer::<i64>, allow_hyphen_values = true)]
        ell: Option<i64>,
        /// Uniform k-subsets of [N] instead of independent bits.
        #[arg(long, value_parser = slice_arg)]
        slice: Option<(usize, usize)>,
    },
    /// Host-graph constructions and their edge-count probabilities.
    Construct {
        #[arg(long)]
        family: FamilyKind,
        #[arg(long, default_value = "1", value_parser = positive::<u64>)]
        a: u64,
        /// Clique part size for the blocker families.
        #[arg(long, value_parser = positive::<u64>)]
        m: Option<u64>,
        #[arg(long, value_parser = positive::<u64>)]
        k: u64,
        #[arg(long, value_parser = integer::<i64>)]
        ell: i64,
        /// Finite host size; omitted means the limit only.
        #[arg(long, value_parser = positive::<usize>)]
        n: Option<usize>,
        /// Clique sizes for `cliques`, e.g. 3,2 (default: greedy decomposition of ell).
        #[arg(long)]
        sizes: Option<String>,
    },
    /// Run every acceptance criterion and print a pass/fail matrix.
    Reproduce,
    /// Load JSON reports, recompute them from their inputs and compare.
    Recheck { path: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Target {
    Prop033,
    Prop027,
    Table,
    Better34,
    Lemmas,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyKind {
    Bipartite,
    BipartitePlusClique,
    Cliques,
    TwoCliques,
    BlockerWithClique,
    BlockerAvoiding,
}

struct Ctx<'a> {
    cli: &'a Cli,
    caps: Caps,
    out: Vec<u8>,
}

impl Ctx<'_> {
    fn line(&mut self, text: impl std::fmt::Display) -> CliResult<()> {
        writeln!(self.out, "{text}").map_err(io_err(Path::new("<stdout>")))
    }

    fn write_json(&self, value: &Value) -> CliResult<()> {
        if let Some(path) = &self.cli.json {
            let mut f = BufWriter::new(File::create(path).map_err(io_err(path))?);
            serde_json::to_writer_pretty(&mut f, value).map_err(|e| CliError::Io {
                path: path.display().to_string(),
                source: e.into(),
            })?;
            writeln!(f).map_err(io_err(path))?;
        }
        Ok(())
    }

    fn csv_file(&self) -> CliResult<Option<BufWriter<File>>> {
        self.cli
            .csv
            .as_ref()
            .map(|path| File::create(path).map(BufWriter::new).map_err(io_err(path)))
            .transpose()
    }
}

/// Parses `argv` (program name first) and runs it, writing to `out` and `err`.
pub fn run_with(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let defaults = Caps::default();
    let caps = Caps {
        assignments: cli.assignment_cap.unwrap_or(defaults.assignments),
        subsets: cli.subset_cap.unwrap_or(defaults.subsets),
    };
    let pool = parallel::pool(parallel::worker_count(cli.workers));
    let (result, buffered) = pool.install(|| {
        let mut ctx = Ctx { cli: &cli, caps, out: Vec::new() };
        let result = dispatch(&mut ctx);
        (result, ctx.out)
    });
    let _ = out.write_all(&buffered);
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let kind = match &e {
                CliError::Core(c) if c.is_resource() => "resource limit",
                CliError::Core(_) | CliError::Usage(_) => "error",
                CliError::Io { .. } => "io error",
            };
            let _ = writeln!(err, "edgestat: {kind}: {e}");
            2
        }
    }
}

pub fn run(argv: &[String]) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

fn dispatch(ctx: &mut Ctx<'_>) -> CliResult<bool> {
    match &ctx.cli.command {
        Command::Enumerate { m, per_s } => enumerate(ctx, *m, *per_s),
        Command::Verify { target, max_m, grid_denominator } => verify(ctx, *target, *max_m, *grid_denominator),
        Command::Dist { poly, p, ell, slice } => dist(ctx, poly, p.as_ref(), *ell, *slice),
        Command::Construct { family, a, m, k, ell, n, sizes } => {
            construct(ctx, *family, *a, *m, *k, *ell, *n, sizes.as_deref())
        }
        Command::Reproduce => reproduce(ctx),
        Command::Recheck { path } => recheck(ctx, path),
    }
}

fn enumerate(ctx: &mut Ctx<'_>, m: u32, per_s: bool) -> CliResult<bool> {
    let start = Instant::now();
    let family = parallel::enumerate_gm(m)?;
    let elapsed = start.elapsed();
    let valid = family.validate().is_ok();
    ctx.line("m,count,max_s,wall_time")?;
    ctx.line(format!("{m},{},{},{:.3}", family.len(), family.max_num_vars(), elapsed.as_secs_f64()))?;
    if per_s {
        ctx.line("s,count")?;
        for (s, c) in family.per_s_counts() {
            ctx.line(format!("{s},{c}"))?;
        }
    }
    if let Some(path) = &ctx.cli.json {
        let mut f = BufWriter::new(File::create(path).map_err(io_err(path))?);
        format::write_members_jsonl(&family, &mut f).map_err(io_err(path))?;
        f.flush().map_err(io_err(path))?;
    }
    if let Some(f) = ctx.csv_file()? {
        format::write_enumerate_csv(&family, elapsed, f)?;
    }
    Ok(valid)
}

fn timed(f: impl FnOnce() -> edgestat_core::Result<VerificationReport>) -> edgestat_core::Result<VerificationReport> {
    let start = Instant::now();
    let mut r = f()?;
    r.wall_time = Some(start.elapsed());
    Ok(r)
}

fn table_reports(caps: &Caps, max_m: u32, den: u32) -> edgestat_core::Result<Vec<VerificationReport>> {
    let grid = default_grid(den);
    (2..=max_m)
        .map(|m| {
            timed(|| {
                let family = parallel::enumerate_gm(m)?;
                let table = parallel::profile_table(&family, caps)?;
                let opt = parallel::optimize_p(&table, &grid, 2)?;
                Ok(table_report_from(&table, &opt, &grid))
            })
        })
        .collect()
}

fn lemma_reports(caps: &Caps) -> edgestat_core::Result<Vec<VerificationReport>> {
    let mut reports = vec![timed(|| {
        Ok(star_zero_probability_search(5, &[1, -1, 2, -2], &Rational::new(97.into(), 250.into()), caps)?.report())
    })?];
    let families = (2..=5).map(parallel::enumerate_gm).collect::<edgestat_core::Result<Vec<_>>>()?;
    for outcome in suites::all_suites(&families, caps)? {
        reports.push(outcome.report());
    }
    Ok(reports)
}

fn verify(ctx: &mut Ctx<'_>, target: Target, max_m: u32, den: u32) -> CliResult<bool> {
    if max_m > 6 {
        return Err(CliError::Usage(format!("--max-m {max_m} is beyond the enumerable range (<= 6)")));
    }
    let caps = ctx.caps;
    let mut reports = Vec::new();
    let wants = |t: Target| target == t || target == Target::All;
    if wants(Target::Prop033) {
        reports.push(timed(|| verify_prop_033(&caps))?);
    }
    if wants(Target::Prop027) {
        reports.push(timed(|| Ok(prop027_report(&Rational::new(213.into(), 500.into()))))?);
    }
    let mut table = Vec::new();
    if wants(Target::Table) {
        table = table_reports(&caps, max_m, den)?;
        reports.extend(table.iter().cloned());
    }
    if wants(Target::Better34) {
        reports.push(timed(|| Ok(better34_report(&Rational::new(97.into(), 250.into()))))?);
    }
    if wants(Target::Lemmas) {
        reports.extend(lemma_reports(&caps)?);
    }
    for r in &reports {
        ctx.line(r)?;
    }
    let passed = reports.iter().all(|r| r.passed);
    ctx.line(format!("overall: {}", if passed { "PASS" } else { "FAIL" }))?;
    let json: Vec<Value> = reports.iter().map(format::report_to_json).collect();
    ctx.write_json(&if json.len() == 1 { json[0].clone() } else { Value::Array(json) })?;
    if let Some(f) = ctx.csv_file()? {
        if table.is_empty() {
            return Err(CliError::Usage("--csv is only produced by the table target".into()));
        }
        format::write_table_csv(&table, f)?;
    }
    Ok(passed)
}

fn dist(
    ctx: &mut Ctx<'_>,
    poly: &str,
    p: Option<&Rational>,
    ell: Option<i64>,
    slice: Option<(usize, usize)>,
) -> CliResult<bool> {
    let d = match (p, slice) {
        (Some(p), None) => bernoulli_value_dist(&edgestat_core::poly::parse_poly(poly)?, p, &ctx.caps)?,
        (None, Some((n, k))) => {
            let f = MultilinearPoly::parse_with_vars(poly, n)?;
            slice_value_dist(&f, SliceSpec::new(n, k)?, &ctx.caps)?
        }
        _ => return Err(CliError::Usage("give exactly one of --p and --slice".into())),
    };
    match ell {
        Some(ell) => {
            let mass = d.prob(ell);
            ctx.line(format!("{}\t{}", fraction_string(&mass), decimal_string(&mass, 12)))?;
        }
        None => {
            for (v, mass) in d.iter() {
                ctx.line(format!("{v}\t{}\t{}", fraction_string(mass), decimal_string(mass, 12)))?;
            }
        }
    }
    ctx.write_json(&format::dist_to_json(&d))?;
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
fn construct(
    ctx: &mut Ctx<'_>,
    kind: FamilyKind,
    a: u64,
    m: Option<u64>,
    k: u64,
    ell: i64,
    n: Option<usize>,
    sizes: Option<&str>,
) -> CliResult<bool> {
    let need_m = || m.ok_or_else(|| CliError::Usage("this family needs --m".into()));
    let mut reference: Option<(String, Rational)> = None;
    let family = match kind {
        FamilyKind::Bipartite | FamilyKind::BipartitePlusClique => {
            reference = Some((format!("{a}^{a}/(e^{a} {a}!)"), reference_constant(a as u32)));
            if kind == FamilyKind::Bipartite {
                PartFamily::bipartite(a, k)?
            } else {
                PartFamily::bipartite_plus_clique(a, k)?
            }
        }
        FamilyKind::Cliques => {
            let sizes: Vec<u64> = match sizes {
                Some(text) => text
                    .split(',')
                    .map(|s| integer::<u64>(s.trim()).map_err(CliError::Usage))
                    .collect::<CliResult<_>>()?,
                None => greedy_clique_sizes(u64::try_from(ell).map_err(|_| CliError::Usage("ell must be >= 0".into()))?),
            };
            PartFamily::cliques(&sizes, k)?
        }
        FamilyKind::TwoCliques => PartFamily::two_cliques(),
        FamilyKind::BlockerWithClique => PartFamily::blocker_with_clique(a, need_m()?, k)?,
        FamilyKind::BlockerAvoiding => PartFamily::blocker_avoiding(a, need_m()?, k)?,
    };
    ctx.line(format!("family\t{}", family.tag()))?;
    ctx.line(format!("k\t{k}\nell\t{ell}"))?;
    let mut json = json!({ "family": family.tag(), "k": k, "ell": ell });
    if let Some(n) = n {
        let host = build_host(&family, n)?;
        let v = edge_count_dist(&host, k as usize, &ctx.caps)?.prob(ell);
        ctx.line(format!("finite(n={n})\t{}\t{}", fraction_string(&v), decimal_string(&v, 12)))?;
        json["n"] = json!(n);
        json["finite"] = json!(fraction_string(&v));
    }
    let limit = limit_probability(&family, k, ell, &ctx.caps)?;
    ctx.line(format!("limit\t{}\t{}", fraction_string(&limit), decimal_string(&limit, 12)))?;
    json["limit"] = json!(fraction_string(&limit));
    if let Some((label, value)) = reference {
        ctx.line(format!("reference {label}\t{}", decimal_string(&value, 12)))?;
        json["reference"] = json!(decimal_string(&value, 12));
    }
    ctx.write_json(&json)?;
    Ok(true)
}

fn reproduce(ctx: &mut Ctx<'_>) -> CliResult<bool> {
    let mut rep = Reproduction::new(ctx.caps);
    let mut outcomes = Vec::new();
    for id in 1..=9 {
        let outcome = rep.criterion(id)?;
        ctx.line(&outcome)?;
        outcomes.push(outcome);
    }
    let passed = outcomes.iter().all(|o| o.passed);
    ctx.line(format!("overall: {}", if passed { "PASS" } else { "FAIL" }))?;
    let criteria: Vec<Value> = outcomes
        .iter()
        .map(|o| {
            json!({
                "id": o.id,
                "title": o.title,
                "passed": o.passed,
                "detail": o.detail,
                "wall_time": o.elapsed.as_secs_f64(),
            })
        })
        .collect();
    let reports: Vec<Value> = rep.reports.iter().map(format::report_to_json).collect();
    ctx.write_json(&json!({ "criteria": criteria, "reports": reports, "passed": passed }))?;
    Ok(passed)
}

fn recheck(ctx: &mut Ctx<'_>, path: &Path) -> CliResult<bool> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let items: Vec<&Value> = match &value {
        Value::Array(items) => items.iter().collect(),
        Value::Object(obj) if obj.contains_key("reports") => {
            value["reports"].as_array().map(|a| a.iter().collect()).unwrap_or_default()
        }
        other => vec![other],
    };
    let caps = ctx.caps;
    let mut all_ok = true;
    for item in items {
        let stored = format::report_from_json(item)?;
        let again = if stored.name.starts_with("suite:") {
            suites::rerun_suite(&stored, || (2..=5).map(parallel::enumerate_gm).collect(), &caps)?.report()
        } else {
            rerun(&stored, &caps)?
        };
        let consistent = stored.is_self_consistent();
        let same = again.exact_values == stored.exact_values && again.passed == stored.passed;
        let ok = consistent && same && stored.passed;
        all_ok &= ok;
        let label = match stored.get_input("m") {
            Some(m) => format!("{} (m = {m})", stored.name),
            None => stored.name.clone(),
        };
        ctx.line(format!(
            "{label}: {}",
            match (consistent, same, stored.passed) {
                (false, _, _) => "stored verdicts are inconsistent",
                (_, false, _) => "recomputation differs",
                (_, _, false) => "reproduced, certificate fails",
                _ => "reproduced, passes",
            }
        ))?;
    }
    Ok(all_ok)
}
