//! Command implementations behind the `tailfence` binary.
//!
//! Every command writes its table to a caller-supplied writer so it can be
//! exercised without spawning a process. Numbers are printed with
//! [`format_g12`], which is locale-independent.

use std::collections::HashMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use tailfence::report::{format_g12, format_opt};
use tailfence::tail_chars::{characteristics_with, closed_form_p_e_left, closed_form_p_e_right};
use tailfence::{
    run_study, Axis, DistributionSpec, FenceMultipliers, Method, Sample, StudyConfig,
    TailCharacteristics,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Reference values of `p_eR` for Student-t with `n = 1..=10`, four decimals.
pub const STUDENT_T_REFERENCE: [f64; 10] = [
    0.0453, 0.0146, 0.0064, 0.0033, 0.0019, 0.0012, 0.0008, 0.0006, 0.0004, 0.0003,
];

#[derive(Debug, Parser)]
#[command(
    name = "tailfence",
    version,
    about = "Outlier-based tail heaviness and tail-index estimation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tail characteristics (fences and outlier probabilities) of distributions.
    Chars(CharsArgs),
    /// Estimate the tail index of a sample read from a file.
    Estimate(EstimateArgs),
    /// Seeded Monte Carlo comparison of the estimators.
    Simulate(SimulateArgs),
    /// p_eR for Student-t with 1 to 10 degrees of freedom.
    Table1(OutArgs),
    /// Check computed characteristics against reference values.
    Selftest,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output file; standard output when omitted.
    #[arg(long = "out")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FenceArgs {
    #[arg(long = "inner-fence", default_value_t = 1.5)]
    pub inner: f64,
    #[arg(long = "outer-fence", default_value_t = 3.0)]
    pub outer: f64,
}

impl FenceArgs {
    fn multipliers(&self) -> tailfence::Result<FenceMultipliers> {
        FenceMultipliers::new(self.inner, self.outer)
    }
}

#[derive(Debug, Args)]
pub struct CharsArgs {
    /// Distribution spec such as `pareto(alpha=0.5,delta=1)`; repeatable.
    #[arg(long = "dist", required = true)]
    pub dists: Vec<String>,
    #[command(flatten)]
    pub fences: FenceArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Input file with one value per line (or a single-column CSV); `-` for stdin.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// One of par_n, par_q, fr_n, fr_q, hh_n, hh_q, hill, thill, pickands, moment.
    #[arg(long)]
    pub method: String,
    /// Order-statistic count for hill, thill, pickands and moment.
    #[arg(long)]
    pub k: Option<usize>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Distribution spec; repeatable, one pair of tables per distribution.
    #[arg(long = "dist", required = true)]
    pub dists: Vec<String>,
    /// Output directory, created if missing.
    #[arg(long = "out")]
    pub out: PathBuf,
    /// Study seed; replicate streams are derived from it.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Replicates per sample size.
    #[arg(long, default_value_t = 1000)]
    pub m: usize,
    /// Sample sizes as `start:end:step` (inclusive).
    #[arg(long = "n-grid", default_value = "10:100:5")]
    pub n_grid: String,
    /// Order-statistic counts as `start:end:step` (inclusive).
    #[arg(long = "k-grid", default_value = "2:99:1")]
    pub k_grid: String,
    /// Comma-separated estimator names; all ten when omitted.
    #[arg(long)]
    pub methods: Option<String>,
}

/// Parses `start:end:step` (inclusive end) or a single integer.
pub fn parse_grid(text: &str) -> anyhow::Result<Vec<usize>> {
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let num = |s: &str| -> anyhow::Result<usize> {
        s.parse()
            .with_context(|| format!("grid `{text}`: `{s}` is not a non-negative integer"))
    };
    let (start, end, step) = match parts.as_slice() {
        [a] => {
            let a = num(a)?;
            (a, a, 1)
        }
        [a, b] => (num(a)?, num(b)?, 1),
        [a, b, s] => (num(a)?, num(b)?, num(s)?),
        _ => bail!("grid `{text}`: expected start:end:step"),
    };
    if step == 0 {
        bail!("grid `{text}`: step must be positive");
    }
    if end < start {
        bail!("grid `{text}`: end is below start");
    }
    Ok((start..=end).step_by(step).collect())
}

pub fn parse_methods(text: &str) -> anyhow::Result<Vec<Method>> {
    let mut methods = Vec::new();
    for name in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let m: Method = name.parse()?;
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    if methods.is_empty() {
        bail!("no methods given");
    }
    Ok(methods)
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> anyhow::Result<i32> {
    match cli.command {
        Command::Chars(args) => {
            let specs = parse_specs(&args.dists)?;
            let table = chars_csv(&specs, args.fences.multipliers()?);
            emit(&args.out, &table, stdout)?;
        }
        Command::Estimate(args) => {
            let text = read_input(&args.input)?;
            let sample = Sample::parse(&text)?;
            let method: Method = args.method.parse()?;
            emit(&args.out, &estimate_csv(&sample, method, args.k)?, stdout)?;
        }
        Command::Simulate(args) => {
            let files = simulate(&args)?;
            for f in files {
                writeln!(stdout, "{}", f.display())?;
            }
        }
        Command::Table1(out) => emit(&out, &table1_csv(), stdout)?,
        Command::Selftest => {
            let checks = selftest();
            for c in &checks {
                writeln!(stdout, "{}", c.line())?;
            }
            let failed = checks.iter().filter(|c| !c.pass).count();
            writeln!(stdout, "{} passed, {failed} failed", checks.len() - failed)?;
            return Ok(if failed == 0 { 0 } else { 1 });
        }
    }
    Ok(0)
}

fn parse_specs(texts: &[String]) -> tailfence::Result<Vec<DistributionSpec>> {
    texts.iter().map(|t| t.parse()).collect()
}

fn read_input(path: &Path) -> anyhow::Result<String> {
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text)?;
        return Ok(text);
    }
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(out: &OutArgs, table: &str, stdout: &mut dyn Write) -> anyhow::Result<()> {
    match &out.out {
        Some(path) => {
            fs::write(path, table).with_context(|| format!("cannot write {}", path.display()))
        }
        None => Ok(stdout.write_all(table.as_bytes())?),
    }
}

pub const CHARS_HEADER: &str =
    "family,params,q1,q3,iqr,outer_low,outer_high,p_eL,p_eR,p_e2,p_mL,p_mR,p_m2";

fn chars_row(spec: &DistributionSpec, c: &TailCharacteristics) -> String {
    let f = &c.fences;
    let cells = [
        f.q1,
        f.q3,
        f.iqr,
        f.outer_low,
        f.outer_high,
        c.p_el,
        c.p_er,
        c.p_e2,
        c.p_ml,
        c.p_mr,
        c.p_m2,
    ]
    .map(format_g12)
    .join(",");
    // params are `;`-separated so the cell needs no quoting
    format!("{},{},{cells}", spec.family(), spec.params_string())
}

pub fn chars_csv(specs: &[DistributionSpec], multipliers: FenceMultipliers) -> String {
    let mut out = format!("{CHARS_HEADER}\n");
    for spec in specs {
        out.push_str(&chars_row(spec, &characteristics_with(spec, multipliers)));
        out.push('\n');
    }
    out
}

pub fn estimate_csv(sample: &Sample, method: Method, k: Option<usize>) -> anyhow::Result<String> {
    if k.is_some() && !method.is_classical() {
        bail!("--k only applies to hill, thill, pickands and moment");
    }
    if k.is_none() && method.is_classical() {
        bail!("{method} needs --k");
    }
    let r = method.estimate(sample, k)?;
    Ok(format!(
        "method,k,alpha_hat,valid,reason\n{},{},{},{},{}\n",
        r.method,
        r.k.map(|k| k.to_string()).unwrap_or_default(),
        format_opt(r.alpha_hat),
        r.valid,
        r.reason.map(|r| r.to_string()).unwrap_or_default(),
    ))
}

pub fn table1_csv() -> String {
    let mut out = String::from("n,p_eR,p_eL\n");
    for n in 1..=10u32 {
        let c = characteristics_with(
            &DistributionSpec::student_t(n).unwrap(),
            FenceMultipliers::default(),
        );
        out.push_str(&format!(
            "{n},{},{}\n",
            format_g12(c.p_er),
            format_g12(c.p_el)
        ));
    }
    out
}

#[derive(Debug, Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    seed: u64,
    m: usize,
    n_grid: Vec<usize>,
    k_grid: Vec<usize>,
    methods: Vec<Method>,
    runs: Vec<ManifestRun>,
}

#[derive(Debug, Serialize)]
struct ManifestRun {
    spec: String,
    files: Vec<String>,
}

/// Runs one study per distribution and writes `<family>_n.csv`,
/// `<family>_k.csv` (when a classical method is selected) and
/// `manifest.json`. Returns the paths written.
pub fn simulate(args: &SimulateArgs) -> anyhow::Result<Vec<PathBuf>> {
    let specs = parse_specs(&args.dists)?;
    let n_grid = parse_grid(&args.n_grid)?;
    let k_grid = parse_grid(&args.k_grid)?;
    let methods = match &args.methods {
        Some(text) => parse_methods(text)?,
        None => Method::ALL.to_vec(),
    };
    let configs: Vec<StudyConfig> = specs
        .iter()
        .map(|spec| StudyConfig {
            spec: *spec,
            n_grid: n_grid.clone(),
            m: args.m,
            k_grid: k_grid.clone(),
            seed: args.seed,
            methods: methods.clone(),
        })
        .collect();
    // fail on a bad config before touching the filesystem
    for c in &configs {
        c.validate()?;
    }
    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;

    let mut seen: HashMap<&'static str, usize> = HashMap::new();
    let mut written = Vec::new();
    let mut runs = Vec::new();
    for config in &configs {
        let result = run_study(config)?;
        let family = config.spec.family().keyword();
        let count = seen.entry(family).or_insert(0);
        *count += 1;
        let stem = if *count == 1 {
            family.to_string()
        } else {
            format!("{family}_{count}")
        };
        let mut files = Vec::new();
        for axis in [Axis::N, Axis::K] {
            if result.rows_on(axis).next().is_none() {
                continue;
            }
            let name = format!("{stem}_{}.csv", axis.name());
            let path = args.out.join(&name);
            fs::write(&path, result.to_csv(axis))
                .with_context(|| format!("cannot write {}", path.display()))?;
            written.push(path);
            files.push(name);
        }
        runs.push(ManifestRun {
            spec: config.spec.to_string(),
            files,
        });
    }
    let manifest = Manifest {
        tool: "tailfence",
        version: VERSION,
        seed: args.seed,
        m: args.m,
        n_grid,
        k_grid,
        methods,
        runs,
    };
    let path = args.out.join("manifest.json");
    fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")
        .with_context(|| format!("cannot write {}", path.display()))?;
    written.push(path);
    Ok(written)
}

/// One self-test comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub computed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub relative: bool,
    pub pass: bool,
}

impl Check {
    fn new(
        name: impl Into<String>,
        computed: f64,
        expected: f64,
        tolerance: f64,
        relative: bool,
    ) -> Self {
        let err = (computed - expected).abs();
        let bound = if relative {
            tolerance * expected.abs()
        } else {
            tolerance
        };
        Self {
            name: name.into(),
            computed,
            expected,
            tolerance,
            relative,
            pass: err <= bound,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: computed {} expected {} ({} tolerance {})",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            format_g12(self.computed),
            format_g12(self.expected),
            if self.relative {
                "relative"
            } else {
                "absolute"
            },
            format_g12(self.tolerance),
        )
    }
}

/// The Student-t tail table plus the exponential, normal and Gumbel closed forms.
pub fn selftest() -> Vec<Check> {
    let d = FenceMultipliers::default();
    let mut checks = Vec::new();
    for (i, &expected) in STUDENT_T_REFERENCE.iter().enumerate() {
        let n = i as u32 + 1;
        let c = characteristics_with(&DistributionSpec::student_t(n).unwrap(), d);
        checks.push(Check::new(
            format!("t({n}) p_eR"),
            c.p_er,
            expected,
            5e-5,
            false,
        ));
    }
    let exp = DistributionSpec::exponential(1.0).unwrap();
    checks.push(Check::new(
        "exp(1) p_eR",
        closed_form_p_e_right(&exp).unwrap(),
        1.0 / 108.0,
        1e-12,
        false,
    ));
    let normal = characteristics_with(&DistributionSpec::normal(0.0, 1.0).unwrap(), d);
    checks.push(Check::new(
        "normal p_eR",
        normal.p_er,
        1.171e-6,
        1e-9,
        false,
    ));
    checks.push(Check::new(
        "normal p_eL",
        normal.p_el,
        1.171e-6,
        1e-9,
        false,
    ));
    let gumbel = DistributionSpec::gumbel(0.0, 1.0).unwrap();
    checks.push(Check::new(
        "gumbel p_eR",
        closed_form_p_e_right(&gumbel).unwrap(),
        0.0026,
        1e-4,
        false,
    ));
    checks.push(Check::new(
        "gumbel p_eL",
        closed_form_p_e_left(&gumbel).unwrap(),
        4.264e-68,
        1e-3,
        true,
    ));
    checks
}

/// Short machine-readable category for an error.
pub fn error_kind(err: &anyhow::Error) -> &'static str {
    use tailfence::Error as E;
    if let Some(e) = err.downcast_ref::<E>() {
        return match e {
            E::Parse { .. } => "parse",
            E::InvalidParameter { .. } => "invalid_parameter",
            E::ProbabilityOutOfRange(_) => "probability_out_of_range",
            E::EmptySample | E::NonFinite(_) | E::SampleTooSmall(_) => "invalid_sample",
            E::InvalidK { .. } => "invalid_k",
            E::InvalidFences(_) => "invalid_fences",
            E::InvalidConfig(_) => "invalid_config",
        };
    }
    if err.chain().any(|e| e.is::<std::io::Error>()) {
        return "io";
    }
    "usage"
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("10:30:10").unwrap(), vec![10, 20, 30]);
        assert_eq!(parse_grid("10:32:10").unwrap(), vec![10, 20, 30]);
        assert_eq!(parse_grid("7").unwrap(), vec![7]);
        assert_eq!(parse_grid("2:4").unwrap(), vec![2, 3, 4]);
        assert!(parse_grid("5:1:1").is_err());
        assert!(parse_grid("1:5:0").is_err());
        assert!(parse_grid("a:5:1").is_err());
    }

    #[test]
    fn method_lists() {
        assert_eq!(
            parse_methods("hill, par_q,hill").unwrap(),
            vec![Method::Hill, Method::ParQ]
        );
        assert!(parse_methods("hill,nope").is_err());
        assert!(parse_methods(",").is_err());
    }

    #[test]
    fn exponential_row() {
        let spec = DistributionSpec::exponential(1.0).unwrap();
        let csv = chars_csv(&[spec], FenceMultipliers::default());
        let row = csv.lines().nth(1).unwrap();
        assert!(row.starts_with("exp,lambda=1,"));
        assert_eq!(row.split(',').nth(8), Some("0.00925925925926"));
    }

    #[test]
    fn selftest_covers_every_example() {
        let checks = selftest();
        assert_eq!(checks.len(), 15);
        // every row except the Cauchy one agrees with the reference table
        for c in &checks[1..] {
            assert!(c.pass, "{}", c.line());
        }
    }
}
