//! Command-line driver: `verify`, `show`, `list` and `sample`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;
use thiserror::Error;

use crate::catalog::{Catalog, CatalogError, Definition, Kind};
use crate::driver::{Engine, Suite, SuiteConfig};
use crate::expr::Expr;
use crate::lattice::{self, Family};
use crate::opalg::{self, Param};
use crate::qseries::{render_rational, Rational};
use crate::report::{Record, Report, Status};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

pub const DEFAULT_REPORT: &str = "twistverify-report.json";

#[derive(Debug, Parser)]
#[command(name = "twistverify", version, about = "Exact checks of Jordanian quantum algebras and their lattice realizations")]
pub struct Cli {
    /// Catalog directory (default: $TWISTVERIFY_CATALOG, ./catalog, then the shipped one).
    #[arg(long, global = true)]
    pub catalog: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run suites: `verify all`, `verify twist map_bh`, `verify hopf rmatrix uz_sl2_ba`.
    Verify(VerifyArgs),
    /// Render one catalog entry.
    Show {
        id: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Also print normal-ordered coproducts of a presentation.
        #[arg(long)]
        expand: bool,
        /// Truncation order for --expand.
        #[arg(long, default_value_t = 4)]
        order: usize,
    },
    /// List catalog ids, optionally of one kind.
    List {
        /// presentation, twist, contraction, embedding, realization, casimir or symmetry_table.
        #[arg(long)]
        kind: Option<String>,
    },
    /// Write grid samples of a solution family as CSV.
    Sample {
        #[arg(value_enum)]
        family: FamilyName,
        /// Wave number of the geometric and exponential families.
        #[arg(long, default_value = "1")]
        k: String,
        /// Degree of the polynomial families.
        #[arg(long, default_value_t = 3)]
        degree: u32,
        #[arg(long, default_value = "1/10")]
        sigma: String,
        #[arg(long, default_value = "1/10")]
        tau: String,
        #[arg(long, default_value = "1/2")]
        m: String,
        #[arg(long, default_value_t = 16)]
        nx: usize,
        #[arg(long, default_value_t = 16)]
        nt: usize,
        /// CSV output path.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Latex,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Geometric,
    Exponential,
    Heat,
    TimeHeat,
    Constant,
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    /// `all` or suite names, followed by catalog ids restricting the checks.
    #[arg(required = true, num_args = 1..)]
    pub targets: Vec<String>,
    /// Config file in the catalog's TOML format (`kind = "config"`).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Truncation order in the deformation parameter (default 4).
    #[arg(long)]
    pub order: Option<usize>,
    /// Truncation order for R-matrix checks (default 3).
    #[arg(long)]
    pub rmatrix_order: Option<usize>,
    /// Cap on word degree during normal ordering (default 12).
    #[arg(long)]
    pub degree: Option<usize>,
    /// Rewrite-step budget per normal-ordering call (default 1000000).
    #[arg(long)]
    pub fuel: Option<usize>,
    /// Lattice step of the space-lattice grid.
    #[arg(long)]
    pub sigma: Option<String>,
    /// Lattice step of the time-lattice grid.
    #[arg(long)]
    pub tau: Option<String>,
    /// Mass parameter (default 1/2).
    #[arg(long)]
    pub m: Option<String>,
    /// Grid points in x (default 16).
    #[arg(long)]
    pub nx: Option<usize>,
    /// Grid points in t (default 16).
    #[arg(long)]
    pub nt: Option<usize>,
    /// Realization sample `step,m`; repeat to give several.
    #[arg(long = "sample")]
    pub samples: Vec<String>,
    /// Absolute tolerance for floating-point lattice checks (default 1e-10).
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Report path (default twistverify-report.json).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Do not write a JSON report.
    #[arg(long, conflicts_with = "report")]
    pub no_report: bool,
    /// Exit 0 when the only discrepancies are suspected errata.
    #[arg(long)]
    pub allow_errata: bool,
    /// Only print the summary.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}:{line}: {message}", file.display())]
    Config { file: PathBuf, line: usize, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Internal(_) => EXIT_INTERNAL,
            _ => EXIT_USAGE,
        }
    }
}

/// Contents of `[definition]` in a config document. All fields optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub order: Option<usize>,
    pub rmatrix_order: Option<usize>,
    pub degree: Option<usize>,
    pub fuel: Option<usize>,
    pub sigma: Option<String>,
    pub tau: Option<String>,
    pub m: Option<String>,
    pub nx: Option<usize>,
    pub nt: Option<usize>,
    pub samples: Option<Vec<[String; 2]>>,
    pub tolerance: Option<f64>,
    pub allow_errata: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDocument {
    id: String,
    kind: String,
    #[serde(default)]
    paper_label: Option<String>,
    #[serde(default)]
    source_text: Option<String>,
    #[serde(default)]
    definition: ConfigFile,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses a config document; errors carry the offending line.
pub fn parse_config(file: &Path, text: &str) -> Result<ConfigFile, CliError> {
    let doc: ConfigDocument = toml::from_str(text).map_err(|e| CliError::Config {
        file: file.to_path_buf(),
        line: e.span().map_or(1, |s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    if doc.kind != "config" {
        let line = text.lines().position(|l| l.trim_start().starts_with("kind")).map_or(1, |i| i + 1);
        return Err(CliError::Config {
            file: file.to_path_buf(),
            line,
            message: format!("`{}` has kind `{}`, expected `config`", doc.id, doc.kind),
        });
    }
    let _ = (doc.paper_label, doc.source_text);
    Ok(doc.definition)
}

pub fn parse_rational(s: &str) -> Result<Rational, CliError> {
    s.trim()
        .parse::<Rational>()
        .map_err(|_| CliError::Usage(format!("`{s}` is not a rational number p/q")))
}

fn sample_pair(s: &str) -> Result<(Rational, Rational), CliError> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| CliError::Usage(format!("sample `{s}` is not of the form step,m")))?;
    Ok((parse_rational(a)?, parse_rational(b)?))
}

/// Defaults, then the config file, then command-line flags.
pub fn build_config(args: &VerifyArgs) -> Result<SuiteConfig, CliError> {
    let mut c = SuiteConfig::default();
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
                file: path.clone(),
                line: 1,
                message: e.to_string(),
            })?;
            parse_config(path, &text)?
        }
        None => ConfigFile::default(),
    };
    let pick = |cli: &Option<String>, f: &Option<String>| cli.clone().or_else(|| f.clone());
    if let Some(n) = args.order.or(file.order) {
        c.order = n;
    }
    if let Some(n) = args.rmatrix_order.or(file.rmatrix_order) {
        c.rmatrix_order = n;
    }
    if let Some(n) = args.degree.or(file.degree) {
        c.degree_cap = n;
    }
    if let Some(n) = args.fuel.or(file.fuel) {
        c.fuel = n;
    }
    if let Some(s) = pick(&args.sigma, &file.sigma) {
        c.lattice.grid.sigma = parse_rational(&s)?;
    }
    if let Some(s) = pick(&args.tau, &file.tau) {
        c.lattice.grid.tau = parse_rational(&s)?;
    }
    if let Some(s) = pick(&args.m, &file.m) {
        c.lattice.m = parse_rational(&s)?;
    }
    if let Some(n) = args.nx.or(file.nx) {
        c.lattice.grid.nx = n;
    }
    if let Some(n) = args.nt.or(file.nt) {
        c.lattice.grid.nt = n;
    }
    if !args.samples.is_empty() {
        c.samples = args.samples.iter().map(|s| sample_pair(s)).collect::<Result<_, _>>()?;
    } else if let Some(v) = &file.samples {
        c.samples = v
            .iter()
            .map(|[a, b]| Ok((parse_rational(a)?, parse_rational(b)?)))
            .collect::<Result<_, CliError>>()?;
    }
    if let Some(t) = args.tolerance.or(file.tolerance) {
        c.tolerance = t;
    }
    c.allow_errata = args.allow_errata || file.allow_errata.unwrap_or(false);
    validate(&c)?;
    Ok(c)
}

fn validate(c: &SuiteConfig) -> Result<(), CliError> {
    let bad = |m: &str| Err(CliError::Usage(m.to_string()));
    if c.order < 1 || c.rmatrix_order < 1 {
        return bad("truncation order must be at least 1");
    }
    if !(c.tolerance > 0.0) {
        return bad("tolerance must be positive");
    }
    let zero = Rational::from_integer(0.into());
    if c.lattice.grid.sigma == zero || c.lattice.grid.tau == zero || c.lattice.m == zero {
        return bad("sigma, tau and m must be nonzero");
    }
    if c.samples.is_empty() || c.samples.iter().any(|(s, m)| *s == zero || *m == zero) {
        return bad("realization samples must be nonzero");
    }
    if c.lattice.grid.nx == 0 || c.lattice.grid.nt == 0 {
        return bad("grid sizes must be positive");
    }
    Ok(())
}

/// Splits `verify` targets into suites and catalog ids.
pub fn split_targets(targets: &[String]) -> Result<(Vec<Suite>, Vec<String>), CliError> {
    let mut suites = Vec::new();
    let mut rest = targets.iter().peekable();
    while let Some(t) = rest.peek() {
        if *t == "all" {
            suites.extend(Suite::ALL);
        } else if let Some(s) = Suite::from_name(t) {
            suites.push(s);
        } else {
            break;
        }
        rest.next();
    }
    if suites.is_empty() {
        return Err(CliError::Usage(format!(
            "expected `all` or a suite name ({}) before catalog ids",
            Suite::ALL.map(|s| s.name()).join(", ")
        )));
    }
    suites.sort();
    suites.dedup();
    Ok((suites, rest.cloned().collect()))
}

fn load_catalog(explicit: Option<&Path>) -> Result<Catalog, CliError> {
    Ok(Catalog::load_dir(&Catalog::locate(explicit))?)
}

/// `file:line` of the catalog item a record is about, when known.
fn locate(cat: &Catalog, r: &Record) -> Option<String> {
    r.catalog_ids.iter().find_map(|id| {
        let e = cat.load(id).ok()?;
        e.lines
            .keys()
            .find(|k| k.split_once(' ').is_some_and(|(_, item)| item == r.finding.subject))
            .map(|k| e.location(k))
    })
}

fn print_summary(out: &mut dyn Write, cat: &Catalog, report: &Report, allow_errata: bool, quiet: bool) -> std::io::Result<()> {
    let mut per_suite: BTreeMap<&str, [usize; 3]> = BTreeMap::new();
    for r in &report.records {
        let slot = per_suite.entry(&r.suite).or_default();
        slot[match r.finding.status {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::ErratumSuspected => 2,
        }] += 1;
    }
    if !quiet {
        writeln!(out, "{:<12} {:>6} {:>6} {:>8}", "suite", "pass", "fail", "erratum")?;
        for (s, [p, f, e]) in &per_suite {
            writeln!(out, "{s:<12} {p:>6} {f:>6} {e:>8}")?;
        }
        for r in &report.records {
            let tag = match r.finding.status {
                Status::Pass => continue,
                Status::Fail if r.finding.informational => "NOTE",
                Status::Fail => "FAIL",
                Status::ErratumSuspected => "ERRATUM",
            };
            write!(out, "{tag} {} [{}] {} {}", r.suite, r.catalog_ids.join(","), r.finding.check, r.finding.subject)?;
            if let Some(loc) = locate(cat, r) {
                write!(out, " ({loc})")?;
            }
            writeln!(out)?;
            if let Some(res) = &r.finding.residual {
                writeln!(out, "    residual: {res}")?;
            }
            if let Some(n) = &r.finding.note {
                writeln!(out, "    {n}")?;
            }
        }
    }
    let s = &report.summary;
    writeln!(
        out,
        "{} checks: {} pass, {} fail, {} erratum-suspected ({} informational)",
        s.total, s.pass, s.fail, s.erratum_suspected, s.informational
    )?;
    writeln!(out, "{}", if report.passed(allow_errata) { "PASS" } else { "FAIL" })
}

fn verify(cli_catalog: Option<&Path>, args: &VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let config = build_config(args)?;
    let (suites, ids) = split_targets(&args.targets)?;
    let cat = load_catalog(cli_catalog)?;
    let allow = config.allow_errata;
    let report = Engine::new(&cat, config).run(&suites, &ids)?;
    let io = |e: std::io::Error| CliError::Internal(e.to_string());
    print_summary(out, &cat, &report, allow, args.quiet).map_err(io)?;
    if !args.no_report {
        let path = args.report.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_REPORT));
        std::fs::write(&path, report.to_json()).map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))?;
        writeln!(out, "report: {}", path.display()).map_err(io)?;
    }
    Ok(if report.passed(allow) { EXIT_PASS } else { EXIT_FAIL })
}

/// Named items of an entry, in display order.
pub fn entry_items(cat: &Catalog, id: &str, expand: Option<usize>) -> Result<Vec<(String, String)>, CliError> {
    let e = cat.load(id)?;
    let ex = |x: &Expr| x.to_string();
    let mut items: Vec<(String, String)> = Vec::new();
    match &e.definition {
        Definition::Presentation(p) => {
            items.push(("parameter".into(), p.parameter.clone()));
            items.push(("generators".into(), p.generators.join(", ")));
            for r in &p.brackets {
                items.push((format!("[{}, {}]", r.left, r.right), ex(&r.rhs)));
            }
            for g in &p.generators {
                if !p.brackets.iter().any(|r| &r.left == g || &r.right == g) {
                    items.push((format!("[{g}, ·]"), "0".into()));
                }
            }
            for (g, d) in &p.coproducts {
                items.push((format!("Δ({g})"), ex(d)));
            }
            if let Some(g) = &p.grouplike {
                items.push(("grouplike".into(), ex(g)));
            }
            if let Some(r) = &p.rmatrix {
                let f: Vec<String> = r.factors.iter().map(|x| format!("exp({x})")).collect();
                items.push(("R".into(), f.join(" · ")));
                items.push(("r".into(), ex(&r.classical)));
            }
            if let Some(order) = expand {
                let built = p.build(id, crate::ncalg::EngineLimits::default()).map_err(|e| CliError::Internal(e.to_string()))?;
                for g in &p.generators {
                    let d = built.coproduct(g, order).map_err(|e| CliError::Internal(e.to_string()))?;
                    items.push((format!("Δ({g}) mod {}^{order}", p.parameter), built.render_tensor(&d)));
                }
            }
        }
        Definition::Twist(t) => {
            items.push(("map".into(), format!("{} -> {}", t.source, t.target)));
            for (g, x) in &t.map.assignments {
                items.push((g.clone(), ex(x)));
            }
            for (g, x) in t.map.inverse.iter().flatten() {
                items.push((format!("inverse {g}"), ex(x)));
            }
        }
        Definition::Contraction(c) => {
            items.push(("map".into(), format!("{} -> {}", c.source, c.target)));
            for s in &c.spec.scalings {
                items.push((s.new.clone(), format!("{}*eps^{}*{}", render_rational(&s.factor), s.eps_power, s.old)));
            }
            items.push((
                "parameter".into(),
                format!("{}*eps^{}", render_rational(&c.spec.parameter_factor), c.spec.parameter_eps_power),
            ));
        }
        Definition::Embedding(m) => {
            items.push(("map".into(), format!("{} -> {}", m.sub, m.big)));
            items.push(("parameter".into(), ex(&m.spec.parameter)));
            for (g, x) in &m.spec.images {
                items.push((g.clone(), ex(x)));
            }
        }
        Definition::Realization(r) => {
            items.push(("presentation".into(), r.presentation.clone()));
            items.push(("lattice".into(), format!("{:?}", r.lattice).to_lowercase()));
            let real = opalg::realize(cat, id, Param::Formal, Param::Formal).map_err(|e| CliError::Internal(e.to_string()))?;
            for g in &real.generators {
                items.push((g.clone(), real.render(real.op(g))));
            }
        }
        Definition::Casimir(c) => {
            items.push(("presentation".into(), c.presentation.clone()));
            items.push(("E".into(), ex(&c.expr)));
            for (r, x) in &c.realized {
                items.push((format!("in {r}"), ex(x)));
            }
        }
        Definition::SymmetryTable(s) => {
            items.push(("realization".into(), s.realization.clone()));
            items.push(("casimir".into(), s.casimir.clone()));
            for (g, x) in &s.lambdas {
                items.push((format!("Λ({g})"), ex(x)));
            }
        }
    }
    Ok(items)
}

/// Rough LaTeX spelling of a rendered expression.
pub fn latexish(s: &str) -> String {
    let mut out = String::new();
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        if c.is_ascii_alphabetic() {
            let mut word = c.to_string();
            while let Some(&n) = chars.peek() {
                if !n.is_ascii_alphanumeric() && n != '_' {
                    break;
                }
                word.push(n);
                chars.next();
            }
            out.push_str(match word.as_str() {
                "sigma" => "\\sigma",
                "tau" => "\\tau",
                "eps" => "\\varepsilon",
                "dx" => "\\partial_x",
                "dt" => "\\partial_t",
                "Dx" => "\\Delta_x",
                "Dt" => "\\Delta_t",
                "Tx" => "T_x",
                "Tt" => "T_t",
                "exp" => "\\exp",
                "sinh" => "\\sinh",
                "cosh" => "\\cosh",
                "log" => "\\log",
                w => {
                    out.push_str(w);
                    continue;
                }
            });
        } else if c == '^' && matches!(chars.peek(), Some('-')) {
            let mut exp = String::new();
            chars.next();
            while let Some(&n) = chars.peek() {
                if !(n.is_ascii_digit() || n == '/') {
                    break;
                }
                exp.push(n);
                chars.next();
            }
            out.push_str(&format!("^{{-{exp}}}"));
        } else if c == '*' {
            out.push_str(" \\, ");
        } else {
            out.push(c);
        }
    }
    out
}

fn show(cat: &Catalog, id: &str, format: Format, expand: Option<usize>, out: &mut dyn Write) -> Result<(), CliError> {
    let e = cat.load(id)?;
    let items = entry_items(cat, id, expand)?;
    let io = |e: std::io::Error| CliError::Internal(e.to_string());
    match format {
        Format::Json => {
            let v = json!({
                "id": e.id,
                "kind": e.kind.name(),
                "paper_label": e.paper_label,
                "source_text": e.source_text,
                "items": items.iter().map(|(k, v)| json!({"name": k, "value": v})).collect::<Vec<_>>(),
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json")).map_err(io)
        }
        Format::Text | Format::Latex => {
            writeln!(out, "{} ({}, {})", e.id, e.kind.name(), e.paper_label).map_err(io)?;
            for (k, v) in items {
                if format == Format::Latex {
                    writeln!(out, "  {} = {}", latexish(&k), latexish(&v)).map_err(io)?;
                } else {
                    writeln!(out, "  {k} = {v}").map_err(io)?;
                }
            }
            Ok(())
        }
    }
}

fn sample(command: &Command, out: &mut dyn Write) -> Result<(), CliError> {
    let Command::Sample { family, k, degree, sigma, tau, m, nx, nt, out: path } = command else {
        unreachable!("sample called with another command")
    };
    let mut p = lattice::LatticeParams::default();
    p.grid.sigma = parse_rational(sigma)?;
    p.grid.tau = parse_rational(tau)?;
    p.m = parse_rational(m)?;
    p.grid.nx = *nx;
    p.grid.nt = *nt;
    let k = parse_rational(k)?;
    let fam = match family {
        FamilyName::Geometric => Family::Geometric { k },
        FamilyName::Exponential => Family::Exponential { k },
        FamilyName::Heat => Family::HeatPolynomial { degree: *degree },
        FamilyName::TimeHeat => Family::TimeHeatPolynomial { degree: *degree },
        FamilyName::Constant => Family::Constant,
    };
    let samples = lattice::sample(&fam.float(&p), &p.grid);
    lattice::write_csv(path, &samples).map_err(|e| CliError::Internal(e.to_string()))?;
    writeln!(out, "{} samples of {} written to {}", samples.len(), fam.name(), path.display())
        .map_err(|e| CliError::Internal(e.to_string()))
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Verify(args) => verify(cli.catalog.as_deref(), args, out),
        Command::Show { id, format, expand, order } => load_catalog(cli.catalog.as_deref())
            .and_then(|cat| show(&cat, id, *format, expand.then_some(*order), out))
            .map(|_| EXIT_PASS),
        Command::List { kind } => list(cli.catalog.as_deref(), kind.as_deref(), out).map(|_| EXIT_PASS),
        Command::Sample { .. } => sample(&cli.command, out).map(|_| EXIT_PASS),
    };
    result.unwrap_or_else(|e| {
        let _ = writeln!(err, "error: {e}");
        e.exit_code()
    })
}

fn list(catalog: Option<&Path>, kind: Option<&str>, out: &mut dyn Write) -> Result<(), CliError> {
    let kind = kind
        .map(|k| {
            Kind::from_name(k).ok_or_else(|| {
                CliError::Usage(format!("unknown kind `{k}` (one of {})", Kind::ALL.map(|k| k.name()).join(", ")))
            })
        })
        .transpose()?;
    let cat = load_catalog(catalog)?;
    for e in cat.entries().filter(|e| kind.is_none_or(|k| e.kind == k)) {
        writeln!(out, "{:<22} {:<15} {}", e.id, e.kind.name(), e.paper_label).map_err(|e| CliError::Internal(e.to_string()))?;
    }
    for w in &cat.warnings {
        writeln!(out, "warning: {w}").map_err(|e| CliError::Internal(e.to_string()))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn targets_split_into_suites_and_ids() {
        let t = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let (s, ids) = split_targets(&t(&["twist", "map_bh"])).unwrap();
        assert_eq!(s, vec![Suite::Twist]);
        assert_eq!(ids, t(&["map_bh"]));
        assert_eq!(split_targets(&t(&["all"])).unwrap().0.len(), Suite::ALL.len());
        assert!(split_targets(&t(&["map_bh"])).is_err());
    }

    #[test]
    fn config_errors_carry_lines() {
        let text = "id = \"c\"\nkind = \"config\"\n[definition]\norder = 3\nbogus = 1\n";
        match parse_config(Path::new("c.toml"), text) {
            Err(CliError::Config { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
        let ok = parse_config(Path::new("c.toml"), "id = \"c\"\nkind = \"config\"\n[definition]\norder = 3\n").unwrap();
        assert_eq!(ok.order, Some(3));
    }

    #[test]
    fn latex_spelling() {
        assert_eq!(latexish("m*sigma/2*Tx^-1"), "m \\, \\sigma/2 \\, T_x^{-1}");
    }
}
