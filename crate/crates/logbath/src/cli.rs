//! Command-line front end.
//!
//! Every subcommand resolves its density from inline flags, an optional
//! `key = value` config file (flags win), and writes decimal text with 17
//! significant digits, so identical invocations produce byte-identical
//! output. Exit codes: 0 success, 2 configuration or domain error, 3
//! numerical failure, 4 validation suite red.

use std::fmt::Write as _;
use std::fs;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::asymptotic::{bcf_asymptotic, short_time};
use crate::error::{Error, Result};
use crate::harness::figure_data;
use crate::mellin::{fit_loglog, mellin_numeric, mellin_numeric_thermal};
use crate::quad::{bcf_numeric, moment, QuadConfig};
use crate::sd::{SdParams, SpectralDensity};
use crate::validate::run_suite;

#[derive(Parser, Debug)]
#[command(
    name = "logbath",
    version,
    about = "Bath correlation functions for spectral densities with logarithmic factors"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// A parsed invocation ready to execute.
#[derive(Debug)]
pub struct RunConfig {
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Direct quadrature of the correlation pair over a time grid
    Bcf {
        #[command(flatten)]
        sd: SdArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        tols: TolArgs,
        /// Dimensionless temperature theta = T / omega_s
        #[arg(long = "T", default_value_t = 0.0)]
        temperature: f64,
        /// Output file (stdout when absent)
        #[arg(long)]
        out: Option<String>,
    },
    /// Long-time law evaluation with per-component law metadata
    Asympt {
        #[command(flatten)]
        sd: SdArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long = "T", default_value_t = 0.0)]
        temperature: f64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Short-time expansion (quadratic real part, linear imaginary part)
    Short {
        #[command(flatten)]
        sd: SdArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long = "T", default_value_t = 0.0)]
        temperature: f64,
        #[arg(long)]
        out: Option<String>,
    },
    /// First three spectral moments and the zero-time thermal value
    Moments {
        #[command(flatten)]
        sd: SdArgs,
        #[arg(long = "T", default_value_t = 0.0)]
        temperature: f64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Decay profile of the continued density transform along a line
    Mellin {
        #[command(flatten)]
        sd: SdArgs,
        #[command(flatten)]
        tols: TolArgs,
        #[arg(long = "T", default_value_t = 0.0)]
        temperature: f64,
        /// Real part of the probed line; the profile samples the
        /// transform at 1 - s
        #[arg(long, default_value_t = 0.5)]
        line_re: f64,
        /// Smallest sampled Im(s), must be positive
        #[arg(long, default_value_t = 10.0)]
        im_min: f64,
        /// Largest sampled Im(s)
        #[arg(long, default_value_t = 80.0)]
        im_max: f64,
        /// Number of samples along the line (at least 8)
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[arg(long)]
        out: Option<String>,
    },
    /// Data behind one catalogued figure (1..6)
    Figures {
        /// Figure number
        fig: u8,
        #[command(flatten)]
        tols: TolArgs,
        #[arg(long)]
        out: Option<String>,
    },
    /// Run a validation suite; exits 4 if any criterion fails
    Validate {
        /// ohmic, full, or a single criterion id 1..9
        #[arg(long, default_value = "full")]
        suite: String,
        #[arg(long)]
        out: Option<String>,
    },
}

/// Density selection: inline flags override config-file values. The kind
/// is inferred (table implies tabulated, beta implies real-log) unless the
/// config file names one.
#[derive(Args, Debug, Default, Clone)]
pub struct SdArgs {
    /// Density strength q > 0
    #[arg(long)]
    q: Option<f64>,
    /// Low-frequency exponent alpha > 0
    #[arg(long)]
    alpha: Option<f64>,
    /// Exponential decay rate l > 0
    #[arg(long)]
    l: Option<f64>,
    /// Integer log power (int-log kind)
    #[arg(long, conflicts_with = "beta")]
    n: Option<u32>,
    /// Real log power (real-log kind)
    #[arg(long)]
    beta: Option<f64>,
    /// Density config file: line-oriented `key = value` with # comments;
    /// keys kind, q, alpha, l, n, beta, omega_s, chi0, table
    #[arg(long)]
    config: Option<String>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct GridArgs {
    /// Single evaluation time
    #[arg(long, conflicts_with_all = ["tau_start", "tau_stop"])]
    tau: Option<f64>,
    /// Grid start
    #[arg(long, requires = "tau_stop")]
    tau_start: Option<f64>,
    /// Grid stop
    #[arg(long, requires = "tau_start")]
    tau_stop: Option<f64>,
    /// Number of grid points
    #[arg(long, default_value_t = 100)]
    tau_count: usize,
    /// Grid spacing
    #[arg(long, value_enum, default_value_t = Spacing::Log)]
    tau_spacing: Spacing,
}

#[derive(ValueEnum, Debug, Default, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    #[default]
    Log,
}

#[derive(Args, Debug, Default, Clone)]
pub struct TolArgs {
    /// Absolute tolerance per component
    #[arg(long)]
    abs_tol: Option<f64>,
    /// Relative tolerance per component
    #[arg(long)]
    rel_tol: Option<f64>,
}

impl TolArgs {
    fn to_config(&self) -> QuadConfig {
        let d = QuadConfig::default();
        QuadConfig {
            abs_tol: self.abs_tol.unwrap_or(d.abs_tol),
            rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
            ..d
        }
    }
}

/// Executes a parsed invocation; returns the process exit code.
pub fn run(cfg: RunConfig) -> Result<i32> {
    match &cfg.command {
        Command::Bcf { sd, grid, tols, temperature, out } => {
            let sd = build_sd(sd)?;
            let taus = resolve_taus(grid)?;
            let samples = bcf_numeric(&sd, *temperature, &taus, &tols.to_config())?;
            emit(out.as_deref(), &sample_csv(&samples))?;
            Ok(0)
        }
        Command::Asympt { sd, grid, temperature, out } => {
            let sd = build_sd(sd)?;
            let taus = resolve_taus(grid)?;
            let rows = bcf_asymptotic(&sd, *temperature, &taus)?;
            let mut text = String::from(
                "tau,xi1,xi2,err1,err2,law1,p1,m1,term_index1,law2,p2,m2,term_index2\n",
            );
            for r in &rows {
                let s = &r.sample;
                let (b1, b2) = (&r.xi1_branch, &r.xi2_branch);
                writeln!(
                    text,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    num(s.tau),
                    num(s.xi1),
                    num(s.xi2),
                    num(s.err1),
                    num(s.err2),
                    b1.law.as_str(),
                    num(b1.power),
                    num(b1.log_power),
                    b1.used_term_index,
                    b2.law.as_str(),
                    num(b2.power),
                    num(b2.log_power),
                    b2.used_term_index,
                )
                .expect("string write");
            }
            emit(out.as_deref(), &text)?;
            Ok(0)
        }
        Command::Short { sd, grid, temperature, out } => {
            let sd = build_sd(sd)?;
            let taus = resolve_taus(grid)?;
            let samples = short_time(&sd, *temperature, &taus)?;
            emit(out.as_deref(), &sample_csv(&samples))?;
            Ok(0)
        }
        Command::Moments { sd, temperature, out } => {
            let sd = build_sd(sd)?;
            let mut text = String::from("quantity,value\n");
            for p in 0..=2u32 {
                writeln!(text, "m{p},{}", num(moment(&sd, p, 0.0)?)).expect("string write");
            }
            writeln!(text, "c1_zero_time,{}", num(moment(&sd, 0, *temperature)?))
                .expect("string write");
            emit(out.as_deref(), &text)?;
            Ok(0)
        }
        Command::Mellin { sd, tols, temperature, line_re, im_min, im_max, samples, out } => {
            let sd = build_sd(sd)?;
            let text = mellin_profile_report(
                &sd,
                *temperature,
                *line_re,
                *im_min,
                *im_max,
                *samples,
                &tols.to_config(),
            )?;
            emit(out.as_deref(), &text)?;
            Ok(0)
        }
        Command::Figures { fig, tols, out } => {
            let data = figure_data(*fig, &tols.to_config())?;
            let mut text = String::new();
            for note in &data.notes {
                writeln!(text, "# {note}").expect("string write");
            }
            text.push_str("fig,curve,x,y,source\n");
            for r in &data.rows {
                writeln!(
                    text,
                    "{},{},{},{},{}",
                    r.fig,
                    r.curve,
                    num(r.x),
                    num(r.y),
                    r.source.as_str()
                )
                .expect("string write");
            }
            emit(out.as_deref(), &text)?;
            Ok(0)
        }
        Command::Validate { suite, out } => {
            let results = run_suite(suite)?;
            let mut text = String::new();
            for r in &results {
                writeln!(text, "{}", r.line()).expect("string write");
            }
            let all_pass = results.iter().all(|r| r.pass);
            writeln!(
                text,
                "suite {suite}: {}",
                if all_pass { "all criteria passed" } else { "FAILED" }
            )
            .expect("string write");
            emit(out.as_deref(), &text)?;
            if out.is_some() {
                // Keep the verdict visible when the report goes to a file.
                print!("{text}");
            }
            Ok(if all_pass { 0 } else { 4 })
        }
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn sample_csv(samples: &[crate::quad::BcfSample]) -> String {
    let mut text = String::from("tau,xi1,xi2,err1,err2\n");
    for s in samples {
        writeln!(
            text,
            "{},{},{},{},{}",
            num(s.tau),
            num(s.xi1),
            num(s.xi2),
            num(s.err1),
            num(s.err2)
        )
        .expect("string write");
    }
    text
}

fn emit(out: Option<&str>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Builds the density from a config file (if any) overlaid with flags.
fn build_sd(args: &SdArgs) -> Result<SpectralDensity> {
    let mut params = match &args.config {
        Some(path) => parse_config(&fs::read_to_string(path)?)?,
        None => SdParams::default(),
    };
    if args.q.is_some() {
        params.q = args.q;
    }
    if args.alpha.is_some() {
        params.alpha = args.alpha;
    }
    if args.l.is_some() {
        params.l = args.l;
    }
    if args.n.is_some() {
        params.n = args.n;
    }
    if args.beta.is_some() {
        params.beta = args.beta;
    }
    params.build()
}

/// Parses the line-oriented `key = value` density grammar.
pub fn parse_config(text: &str) -> Result<SdParams> {
    let mut p = SdParams::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected key = value, got '{line}'", lineno + 1))
        })?;
        let (key, value) = (key.trim(), value.trim());
        let parse_f64 = || -> Result<f64> {
            value.parse::<f64>().map_err(|_| {
                Error::Config(format!("line {}: {key} wants a number, got '{value}'", lineno + 1))
            })
        };
        match key {
            "kind" => p.kind = Some(value.to_string()),
            "q" => p.q = Some(parse_f64()?),
            "alpha" => p.alpha = Some(parse_f64()?),
            "l" => p.l = Some(parse_f64()?),
            "n" => {
                p.n = Some(value.parse::<u32>().map_err(|_| {
                    Error::Config(format!(
                        "line {}: n wants a non-negative integer, got '{value}'",
                        lineno + 1
                    ))
                })?)
            }
            "beta" => p.beta = Some(parse_f64()?),
            "omega_s" => p.omega_s = Some(parse_f64()?),
            "chi0" => p.chi0 = Some(parse_f64()?),
            "table" => p.table = Some(value.to_string()),
            other => {
                return Err(Error::Config(format!(
                    "line {}: unknown key '{other}' (expected kind, q, alpha, l, n, beta, \
                     omega_s, chi0, or table)",
                    lineno + 1
                )))
            }
        }
    }
    Ok(p)
}

fn resolve_taus(grid: &GridArgs) -> Result<Vec<f64>> {
    if let Some(tau) = grid.tau {
        return Ok(vec![tau]);
    }
    let (start, stop) = match (grid.tau_start, grid.tau_stop) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::Config(
                "provide either --tau or both --tau-start and --tau-stop".into(),
            ))
        }
    };
    if !(stop > start) {
        return Err(Error::Config(format!(
            "tau grid wants start < stop, got [{start}, {stop}]"
        )));
    }
    if grid.tau_count < 2 {
        return Err(Error::Config("tau grid wants at least 2 points".into()));
    }
    let count = grid.tau_count;
    let step = |i: usize, a: f64, b: f64| a + (b - a) * i as f64 / (count - 1) as f64;
    match grid.tau_spacing {
        Spacing::Linear => Ok((0..count).map(|i| step(i, start, stop)).collect()),
        Spacing::Log => {
            if !(start > 0.0) {
                return Err(Error::Config(format!(
                    "log spacing wants tau-start > 0, got {start}"
                )));
            }
            Ok((0..count).map(|i| step(i, start.ln(), stop.ln()).exp()).collect())
        }
    }
}

/// Samples `|transform(1 - s)|` along `Re(s) = line_re` and fits its decay
/// exponent. The pass threshold is `1/2 + max(0, line_re)`: a kernel that
/// grows like `|Im s|^(Re s - 1/2)` times a profile decaying faster than
/// that is absolutely integrable along the shifted line.
fn mellin_profile_report(
    sd: &SpectralDensity,
    theta: f64,
    line_re: f64,
    im_min: f64,
    im_max: f64,
    samples: usize,
    cfg: &QuadConfig,
) -> Result<String> {
    if samples < 8 {
        return Err(Error::InsufficientSamples { need: 8, got: samples });
    }
    if !(im_min > 0.0) || !(im_max > im_min) {
        return Err(Error::Config(format!(
            "the sampled line wants 0 < im-min < im-max, got [{im_min}, {im_max}]"
        )));
    }
    let im_grid: Vec<f64> = (0..samples)
        .map(|i| im_min + (im_max - im_min) * i as f64 / (samples - 1) as f64)
        .collect();
    let mut values = Vec::with_capacity(samples);
    for &t in &im_grid {
        let arg = Complex64::new(1.0 - line_re, -t);
        let v = if theta > 0.0 {
            mellin_numeric_thermal(sd, arg, theta, cfg)?
        } else {
            mellin_numeric(sd, arg, cfg)?
        };
        values.push(v);
    }
    let (zeta, rms) = fit_loglog(&im_grid, &values)?;
    let threshold = 0.5 + line_re.max(0.0);
    let mut text = format!(
        "# decay profile of the density transform at 1 - s along Re(s) = {line_re}, \
         theta = {theta}\n"
    );
    text.push_str("re_s,im_s,re_val,im_val,abs_val\n");
    for (&t, v) in im_grid.iter().zip(&values) {
        writeln!(
            text,
            "{},{},{},{},{}",
            num(line_re),
            num(t),
            num(v.re),
            num(v.im),
            num(v.norm())
        )
        .expect("string write");
    }
    writeln!(text, "zeta = {}", num(zeta)).expect("string write");
    writeln!(text, "fit_rms = {}", num(rms)).expect("string write");
    writeln!(text, "threshold = {}", num(threshold)).expect("string write");
    writeln!(text, "pass = {}", zeta > threshold).expect("string write");
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_grammar_parses_comments_and_overrides() {
        let p = parse_config(
            "# a density\nkind = int-log\nq = 2.0  # strength\nalpha = 1.5\nl = 1\nn = 3\n",
        )
        .unwrap();
        assert_eq!(p.kind.as_deref(), Some("int-log"));
        assert_eq!(p.q, Some(2.0));
        assert_eq!(p.n, Some(3));
        assert!(p.beta.is_none());
    }

    #[test]
    fn config_grammar_rejects_unknown_keys_and_bad_lines() {
        assert!(matches!(parse_config("frequency = 3\n"), Err(Error::Config(_))));
        assert!(matches!(parse_config("just words\n"), Err(Error::Config(_))));
        assert!(matches!(parse_config("alpha = fast\n"), Err(Error::Config(_))));
    }

    #[test]
    fn tau_grids_resolve_linear_and_log() {
        let lin = resolve_taus(&GridArgs {
            tau: None,
            tau_start: Some(0.0),
            tau_stop: Some(1.0),
            tau_count: 5,
            tau_spacing: Spacing::Linear,
        })
        .unwrap();
        assert_eq!(lin, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let log = resolve_taus(&GridArgs {
            tau: None,
            tau_start: Some(1.0),
            tau_stop: Some(100.0),
            tau_count: 3,
            tau_spacing: Spacing::Log,
        })
        .unwrap();
        assert!((log[1] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn log_grid_rejects_zero_start() {
        let r = resolve_taus(&GridArgs {
            tau: None,
            tau_start: Some(0.0),
            tau_stop: Some(1.0),
            tau_count: 3,
            tau_spacing: Spacing::Log,
        });
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
