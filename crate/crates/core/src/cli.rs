//! The `rumor-lab` command line.
//!
//! Exit codes: 0 success, 1 an experiment ran but missed its criterion,
//! 2 usage or configuration error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::analytic::{self, InitialCondition, Sigma2};
use crate::error::{Error, Result};
use crate::experiments::{self, Tolerances};
use crate::oracle;
use crate::sim::{self, Scenario};
use crate::stifling::StiflingDistribution;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Closed-form x_inf, sigma^2, t_inf and case for one parameter set.
    Analytic,
    /// Per-replica simulation records (JSONL).
    Simulate,
    /// Exact final-ignorant distribution by dynamic programming.
    Oracle,
    /// Monte Carlo law of large numbers check.
    Lln,
    /// Monte Carlo central limit theorem check.
    Clt,
    /// Monte Carlo check of jumps per capita against t_inf.
    Transitions,
    /// Monte Carlo check for a law with infinite mean.
    Muinf,
    /// Monte Carlo comparison of two stochastically ordered laws.
    Monotone,
    /// Limit fraction and variance tables for the constant, geometric and
    /// Poisson families.
    Tables,
    /// x_inf(mu, 1, 0) over a grid of mu.
    Curve,
    /// Profile of f over (0, x0] with its root marked.
    Fprofile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Reduced,
    Full,
}

fn parse_dist(spec: &str) -> std::result::Result<StiflingDistribution, String> {
    spec.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Clone, Parser)]
#[command(name = "rumor-lab", version, about = "Maki-Thompson rumour process with random stifling")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,

    /// Law of R: constant:K, geometric:P, poisson:L, zeta:S or pmf:0=0.1,1=0.9.
    #[arg(long = "dist", default_value = "constant:1", value_parser = parse_dist)]
    pub dist: StiflingDistribution,

    /// Larger law for `monotone` (`--dist` is the smaller one).
    #[arg(long = "dist-high", value_parser = parse_dist)]
    pub dist_high: Option<StiflingDistribution>,

    /// Population size minus one.
    #[arg(long = "N", default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,

    /// Number of replicas.
    #[arg(long = "M", default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub m: u64,

    #[arg(long, default_value_t = 1.0)]
    pub x0: f64,

    #[arg(long, default_value_t = 0.0)]
    pub w0: f64,

    /// Initial spreader proportions by type, e.g. `1=0.05,3=0.01`; overrides --w0.
    #[arg(long)]
    pub y0: Option<String>,

    /// Type of the lone initial spreader (default: drawn from R given R >= 1).
    #[arg(long = "initial-type")]
    pub initial_type: Option<u64>,

    #[arg(long, env = "RUMOR_LAB_SEED", default_value_t = 1)]
    pub seed: u64,

    /// Output file; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Worker threads for Monte Carlo commands (0: one per core).
    #[arg(long, default_value_t = 0)]
    pub threads: usize,

    /// Significant digits in CSV output.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u8).range(1..=17))]
    pub digits: u8,

    /// Engine for `simulate`.
    #[arg(long, value_enum, default_value_t = Engine::Reduced)]
    pub engine: Engine,

    /// Simulate exponential clocks (full engine only).
    #[arg(long)]
    pub clocks: bool,

    /// Population grid for `muinf`.
    #[arg(long = "n-grid", value_delimiter = ',', default_value = "1000,10000,100000")]
    pub n_grid: Vec<u64>,

    /// mu grid for `curve`: comma list or start:stop:step.
    #[arg(long = "mu-grid", default_value = "0.1:8:0.1")]
    pub mu_grid: String,

    /// Grid size for `fprofile`.
    #[arg(long, default_value_t = 200)]
    pub points: usize,

    /// Where `clt` writes its standardized samples as CSV.
    #[arg(long = "samples-csv")]
    pub samples_csv: Option<PathBuf>,
}

pub fn parse_config<I, T>(argv: I) -> std::result::Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    RunConfig::try_parse_from(argv)
}

impl RunConfig {
    pub fn initial_condition(&self) -> Result<InitialCondition> {
        match &self.y0 {
            Some(spec) => InitialCondition::with_spreaders(self.x0, parse_y0(spec)?),
            None => InitialCondition::new(self.x0, self.w0),
        }
    }

    pub fn scenario(&self) -> Result<Scenario> {
        Ok(Scenario {
            n: self.n,
            ic: self.initial_condition()?,
            dist: self.dist.clone(),
            initial_type: self.initial_type,
        })
    }

    fn format_or(&self, default: Format, allowed: &[Format]) -> Result<Format> {
        let f = self.format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(Error::Config(format!(
                "format {f:?} is not available for {:?}",
                self.command
            )))
        }
    }
}

fn parse_y0(spec: &str) -> Result<BTreeMap<u64, f64>> {
    let bad = || Error::Config(format!("cannot parse --y0 `{spec}`; expected TYPE=PROP,..."));
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let (i, y) = item.split_once('=').ok_or_else(bad)?;
            Ok((
                i.trim().parse().map_err(|_| bad())?,
                y.trim().parse().map_err(|_| bad())?,
            ))
        })
        .collect()
}

/// Parses `a,b,c` or `start:stop:step` (inclusive of `stop` up to rounding).
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| Error::Config(format!("bad grid `{spec}`: {why}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    if let [start, stop, step] = spec.split(':').collect::<Vec<_>>()[..] {
        let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
        if !(step > 0.0) || stop < start {
            return Err(bad("need step > 0 and stop >= start"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize;
        Ok((0..=count).map(|k| start + k as f64 * step).collect())
    } else {
        spec.split(',').map(num).collect()
    }
}

/// Formats `v` with `digits` significant digits in plain decimal notation
/// (scientific only for very large or very small magnitudes).
pub fn format_sig(v: f64, digits: u8) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let digits = digits.max(1) as usize;
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-10..=15).contains(&exp) {
        return sci;
    }
    let negative = mantissa.starts_with('-');
    let digits_only: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if exp < 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
        out.push_str(&digits_only);
    } else {
        let int_len = exp as usize + 1;
        if digits_only.len() <= int_len {
            out.push_str(&digits_only);
            out.extend(std::iter::repeat_n('0', int_len - digits_only.len()));
        } else {
            out.push_str(&digits_only[..int_len]);
            out.push('.');
            out.push_str(&digits_only[int_len..]);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub family: &'static str,
    pub parameter: f64,
    pub x_inf: f64,
    pub sigma2: f64,
}

/// Limit fraction and CLT variance for the classical start (`x0 = 1`,
/// `w0 = 0`): constant `kappa = 1..8`, geometric `p = 0.1..0.9`, Poisson
/// `lambda = 0.1..1.9` in steps of 0.2.
pub fn cmd_tables() -> Result<Vec<TableRow>> {
    let mut rows = Vec::new();
    let mut push = |family: &'static str, parameter: f64, dist: StiflingDistribution| -> Result<()> {
        let (mu, nu2) = dist.moments();
        let x_inf = analytic::limit_fraction(mu, 1.0, 0.0)?;
        let sigma2 = match analytic::clt_variance(mu, nu2, 1.0, 0.0)? {
            Sigma2::Value(v) => v,
            Sigma2::HypothesesViolated => f64::NAN,
        };
        rows.push(TableRow {
            family,
            parameter,
            x_inf,
            sigma2,
        });
        Ok(())
    };
    for kappa in 1..=8u64 {
        push("kappa", kappa as f64, StiflingDistribution::constant(kappa)?)?;
    }
    for k in 1..=9 {
        let p = k as f64 / 10.0;
        push("geometric", p, StiflingDistribution::geometric(p)?)?;
    }
    for k in 0..10 {
        let lambda = (2 * k + 1) as f64 / 10.0;
        push("poisson", lambda, StiflingDistribution::poisson(lambda)?)?;
    }
    Ok(rows)
}

pub fn cmd_curve(mu_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    mu_grid
        .iter()
        .map(|&mu| Ok((mu, analytic::limit_fraction(mu, 1.0, 0.0)?)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FProfile {
    pub case: analytic::RootCase,
    pub x_inf: f64,
    /// `(x, f(x), is_root)` sorted by `x`.
    pub rows: Vec<(f64, f64, bool)>,
}

pub fn cmd_fprofile(mu: f64, x0: f64, w0: f64, points: usize) -> Result<FProfile> {
    let x_inf = analytic::limit_fraction(mu, x0, w0)?;
    let mut rows: Vec<(f64, f64, bool)> = analytic::f_profile(mu, x0, w0, points)
        .into_iter()
        .map(|(x, f)| (x, f, false))
        .collect();
    match rows.iter_mut().find(|r| r.0 == x_inf) {
        Some(r) => r.2 = true,
        None => {
            let at = rows.partition_point(|r| r.0 < x_inf);
            rows.insert(at, (x_inf, analytic::f_eval(x_inf, mu, x0, w0)?, true));
        }
    }
    Ok(FProfile {
        case: analytic::classify_case(mu, x0, w0),
        x_inf,
        rows,
    })
}

/// Rendered output of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub body: String,
    pub passed: bool,
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

fn finite_mu(dist: &StiflingDistribution) -> Result<f64> {
    let mu = dist.mean();
    if !mu.is_finite() {
        return Err(Error::Domain(format!("{dist} has infinite mean")));
    }
    Ok(mu)
}

/// Runs the command and renders its output.
pub fn execute(cfg: &RunConfig) -> Result<CommandOutput> {
    let sig = |v: f64| format_sig(v, cfg.digits);
    let tol = Tolerances::default();
    let ok = |body: String| CommandOutput { body, passed: true };
    match cfg.command {
        Command::Analytic => {
            let result = analytic::analyze(&cfg.dist, &cfg.initial_condition()?)?;
            match cfg.format_or(Format::Json, &[Format::Json, Format::Csv])? {
                Format::Csv => {
                    let opt = |v: Option<f64>| v.map(sig).unwrap_or_default();
                    Ok(ok(format!(
                        "mu,nu2,x0,w0,x_inf,sigma2,t_inf,case\n{},{},{},{},{},{},{},{}\n",
                        sig(result.mu),
                        opt(result.nu2),
                        sig(result.x0),
                        sig(result.w0),
                        sig(result.x_inf),
                        match result.sigma2 {
                            Some(Sigma2::Value(v)) => sig(v),
                            Some(s) => s.to_string(),
                            None => String::new(),
                        },
                        opt(result.t_inf),
                        result.case.map(|c| c.label()).unwrap_or(""),
                    )))
                }
                _ => Ok(ok(json(&result))),
            }
        }
        Command::Simulate => {
            cfg.format_or(Format::Jsonl, &[Format::Jsonl])?;
            let scenario = cfg.scenario()?;
            let runs: Vec<_> = {
                use rayon::prelude::*;
                (0..cfg.m)
                    .into_par_iter()
                    .map(|r| match cfg.engine {
                        Engine::Reduced => sim::run_reduced_replica(&scenario, cfg.seed, r),
                        Engine::Full => sim::run_full_replica(&scenario, cfg.seed, r, cfg.clocks),
                    })
                    .collect::<Result<_>>()?
            };
            let mut body = String::new();
            for run in &runs {
                body.push_str(&serde_json::to_string(run).expect("serializable outcome"));
                body.push('\n');
            }
            Ok(ok(body))
        }
        Command::Oracle => {
            let dist = oracle::exact_final_distribution(&cfg.scenario()?)?;
            match cfg.format_or(Format::Csv, &[Format::Csv, Format::Json])? {
                Format::Json => Ok(ok(json(&dist))),
                _ => Ok(ok(dist.to_csv())),
            }
        }
        Command::Lln | Command::Clt | Command::Transitions => {
            cfg.format_or(Format::Json, &[Format::Json])?;
            let scenario = cfg.scenario()?;
            let report = match cfg.command {
                Command::Lln => experiments::mc_lln(&scenario, cfg.m, cfg.seed, &tol)?,
                Command::Clt => experiments::mc_clt(&scenario, cfg.m, cfg.seed, &tol)?,
                _ => experiments::mc_transitions(&scenario, cfg.m, cfg.seed, &tol)?,
            };
            if let (Some(path), Some(csv)) = (&cfg.samples_csv, report.standardized_csv()) {
                std::fs::write(path, csv)
                    .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
            }
            Ok(CommandOutput {
                body: json(&report),
                passed: report.pass,
            })
        }
        Command::Muinf => {
            cfg.format_or(Format::Json, &[Format::Json])?;
            let report = experiments::mc_mu_infinity(&cfg.scenario()?, &cfg.n_grid, cfg.m, cfg.seed, &tol)?;
            Ok(CommandOutput {
                body: json(&report),
                passed: report.pass,
            })
        }
        Command::Monotone => {
            cfg.format_or(Format::Json, &[Format::Json])?;
            let high = cfg
                .dist_high
                .as_ref()
                .ok_or_else(|| Error::Config("monotone needs --dist-high".into()))?;
            let report = experiments::mc_monotone(&cfg.scenario()?, cfg.m, &cfg.dist, high, cfg.seed, &tol)?;
            Ok(CommandOutput {
                body: json(&report),
                passed: report.pass,
            })
        }
        Command::Tables => {
            let rows = cmd_tables()?;
            match cfg.format_or(Format::Csv, &[Format::Csv, Format::Json])? {
                Format::Json => Ok(ok(json(&rows))),
                _ => {
                    let mut body = String::from("family,parameter,x_inf,sigma2\n");
                    for r in rows {
                        body.push_str(&format!(
                            "{},{},{},{}\n",
                            r.family,
                            r.parameter,
                            sig(r.x_inf),
                            sig(r.sigma2)
                        ));
                    }
                    Ok(ok(body))
                }
            }
        }
        Command::Curve => {
            cfg.format_or(Format::Csv, &[Format::Csv])?;
            let mut body = String::from("mu,x_inf\n");
            for (mu, x) in cmd_curve(&parse_grid(&cfg.mu_grid)?)? {
                body.push_str(&format!("{},{}\n", sig(mu), sig(x)));
            }
            Ok(ok(body))
        }
        Command::Fprofile => {
            cfg.format_or(Format::Csv, &[Format::Csv])?;
            let ic = cfg.initial_condition()?;
            let profile = cmd_fprofile(finite_mu(&cfg.dist)?, ic.x0(), ic.w0(), cfg.points)?;
            let mut body = String::from("case,x,f,is_root\n");
            for (x, f, root) in profile.rows {
                body.push_str(&format!(
                    "{},{},{},{}\n",
                    profile.case.label(),
                    sig(x),
                    sig(f),
                    root as u8
                ));
            }
            Ok(ok(body))
        }
    }
}

fn write_output(cfg: &RunConfig, body: &str) -> std::io::Result<()> {
    match &cfg.output {
        Some(path) => std::fs::write(path, body),
        None => std::io::stdout().lock().write_all(body.as_bytes()),
    }
}

/// Full command-line entry point; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match parse_config(argv) {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start thread pool: {e}");
            return EXIT_USAGE;
        }
    };
    match pool.install(|| execute(&cfg)) {
        Ok(out) => {
            if let Err(e) = write_output(&cfg, &out.body) {
                eprintln!("error: cannot write output: {e}");
                return EXIT_USAGE;
            }
            if out.passed {
                EXIT_OK
            } else {
                eprintln!("criterion not met");
                EXIT_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_defaults() {
        let cfg = parse_config(["rumor-lab", "analytic", "--dist", "constant:1"]).unwrap();
        assert_eq!(cfg.command, Command::Analytic);
        assert_eq!(cfg.dist.moments(), (1.0, 0.0));
        assert_eq!((cfg.x0, cfg.w0), (1.0, 0.0));
    }

    #[test]
    fn fully_specified_clt() {
        let cfg = parse_config([
            "rumor-lab", "clt", "--dist", "geometric:0.5", "--N", "10000", "--M", "2000", "--seed", "7",
        ])
        .unwrap();
        assert_eq!(cfg.command, Command::Clt);
        assert_eq!((cfg.n, cfg.m, cfg.seed), (10_000, 2_000, 7));
        assert_eq!(cfg.dist, StiflingDistribution::geometric(0.5).unwrap());
    }

    #[test]
    fn rejections_are_usage_errors() {
        for argv in [
            vec!["rumor-lab", "analytic", "--dist", "pmf:0=1.0"],
            vec!["rumor-lab", "analytic", "--dist", "bogus"],
            vec!["rumor-lab", "lln", "--N", "0"],
            vec!["rumor-lab", "lln", "--M", "0"],
            vec!["rumor-lab", "nonsense"],
        ] {
            let err = parse_config(argv.clone()).unwrap_err();
            assert_eq!(err.exit_code(), EXIT_USAGE, "{argv:?}");
        }
    }

    #[test]
    fn sig_formatting() {
        assert_eq!(format_sig(0.20318786997998, 6), "0.203188");
        assert_eq!(format_sig(0.20318786997998, 3), "0.203");
        assert_eq!(format_sig(1.6704770051011927e-05, 3), "0.0000167");
        assert_eq!(format_sig(2.9081960590946587, 4), "2.908");
        assert_eq!(format_sig(-12.6, 2), "-13");
        assert_eq!(format_sig(1234.5, 3), "1230");
        assert_eq!(format_sig(0.0, 3), "0");
        assert_eq!(format_sig(1.5e-20, 2), "1.5e-20");
        assert_eq!(format_sig(0.1, 6), "0.100000");
    }

    #[test]
    fn grids() {
        let g = parse_grid("0.1:8:0.1").unwrap();
        assert_eq!(g.len(), 80);
        assert!((g[79] - 8.0).abs() < 1e-12);
        assert_eq!(parse_grid("1,2.5").unwrap(), vec![1.0, 2.5]);
        assert!(parse_grid("1:0:1").is_err());
        assert!(parse_grid("a,b").is_err());
    }

    #[test]
    fn table_rows() {
        let rows = cmd_tables().unwrap();
        assert_eq!(rows.len(), 27);
        let find = |fam: &str, p: f64| {
            rows.iter()
                .find(|r| r.family == fam && (r.parameter - p).abs() < 1e-12)
                .unwrap()
                .clone()
        };
        let r = find("kappa", 1.0);
        assert_eq!((format_sig(r.x_inf, 3), format_sig(r.sigma2, 3)), ("0.203".into(), "0.273".into()));
        let r = find("geometric", 0.9);
        assert_eq!((format_sig(r.x_inf, 3), format_sig(r.sigma2, 3)), ("0.175".into(), "0.238".into()));
        let r = find("poisson", 1.9);
        assert_eq!((format_sig(r.x_inf, 3), format_sig(r.sigma2, 3)), ("0.0668".into(), "0.0895".into()));
    }

    #[test]
    fn curve_examples() {
        let rows = cmd_curve(&[0.1, 1.0, 8.0]).unwrap();
        assert_eq!(format_sig(rows[0].1, 3), "0.824");
        assert_eq!(format_sig(rows[1].1, 3), "0.203");
        assert!(rows[2].1 < 0.001);
        assert_eq!(format_sig(rows[2].1, 3), "0.000124");
        let all = cmd_curve(&parse_grid("0.1:8:0.1").unwrap()).unwrap();
        assert!(all.windows(2).all(|w| w[1].1 < w[0].1));
    }

    #[test]
    fn fprofile_marks_root() {
        use analytic::RootCase::*;
        for (w0, x0, case) in [(0.0, 1.0, W0ZeroSupercritical), (0.0, 0.4, W0ZeroCriticalOrSub), (0.3, 1.0, W0Positive)] {
            let p = cmd_fprofile(1.0, x0, w0, 50).unwrap();
            assert_eq!(p.case, case);
            let roots: Vec<_> = p.rows.iter().filter(|r| r.2).collect();
            assert_eq!(roots.len(), 1);
            assert!(roots[0].1.abs() < 1e-10);
            assert!(p.rows.windows(2).all(|w| w[0].0 <= w[1].0));
        }
    }

    #[test]
    fn execute_reports_usage_problems() {
        let cfg = parse_config(["rumor-lab", "monotone"]).unwrap();
        assert!(matches!(execute(&cfg), Err(Error::Config(_))));
        let cfg = parse_config(["rumor-lab", "tables", "--format", "jsonl"]).unwrap();
        assert!(matches!(execute(&cfg), Err(Error::Config(_))));
        let cfg = parse_config(["rumor-lab", "analytic", "--x0", "1.5"]).unwrap();
        assert!(matches!(execute(&cfg), Err(Error::InitialCondition(_))));
    }

    #[test]
    fn y0_spec() {
        let cfg = parse_config(["rumor-lab", "analytic", "--x0", "0.9", "--y0", "1=0.05,2=0.05"]).unwrap();
        let ic = cfg.initial_condition().unwrap();
        assert!((ic.w0() - 0.15).abs() < 1e-15);
        let cfg = parse_config(["rumor-lab", "analytic", "--y0", "1:0.1"]).unwrap();
        assert!(cfg.initial_condition().is_err());
    }
}
