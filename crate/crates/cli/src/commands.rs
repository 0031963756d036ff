//! Subcommands. Each returns what to print and the exit code; errors carry
//! their own exit codes.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use powerbin_core::oracles::{mc_price, quad_price, McConfig, QuadratureConfig};
use powerbin_core::products::{convergence_study, ConvergenceRow, StudyProduct};
use powerbin_core::{ContractSpec, MarketParams, PriceResult, PricingError};

use crate::contract_file::{load_contract, ContractFile};
use crate::error::CliError;
use crate::report::{price_json, price_text, sig12};

pub const SEED_ENV: &str = "POWERBIN_SEED";

/// Closed-form option pricing with quadrature and Monte Carlo cross-checks.
///
/// Exit codes: 0 ok or PASS, 1 validation FAIL, 2 bad arguments or contract
/// file, 3 numerical failure, 4 unsupported contract/oracle combination,
/// 5 I/O error.
#[derive(Debug, Parser)]
#[command(name = "powerbin", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Price a contract file with its closed form.
    Price {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Compare the closed form with the quadrature and/or Monte Carlo oracle.
    Validate {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        oracle: Oracle,
        /// Monte Carlo paths (antithetic pairs count as two).
        #[arg(long, default_value_t = 1_000_000)]
        paths: usize,
        /// Quadrature tolerance; the closed form passes within 10x this.
        #[arg(long, default_value_t = 1e-8)]
        rel_tol: f64,
        #[arg(long, env = SEED_ENV, default_value_t = 0)]
        seed: u64,
        /// Time steps for continuously averaged payoffs.
        #[arg(long, default_value_t = 1024)]
        steps: usize,
        /// Corrupt the closed form by flipping the sign of its theta exponent.
        #[arg(long, hide = true)]
        flip_theta: bool,
    },
    /// Discrete-to-continuous convergence of geometric Asians as CSV.
    Converge {
        #[arg(long, value_enum)]
        product: Product,
        /// Comma-separated numbers of monitoring dates, ascending.
        #[arg(long, value_delimiter = ',', required = true)]
        ladder: Vec<usize>,
        #[arg(long, default_value_t = 100.0)]
        x: f64,
        /// Fixed-strike only.
        #[arg(long, default_value_t = 100.0)]
        strike: f64,
        #[arg(long, default_value_t = 0.05)]
        r: f64,
        #[arg(long, default_value_t = 0.0)]
        q: f64,
        #[arg(long, default_value_t = 0.2)]
        sigma: f64,
        #[arg(long, default_value_t = 1.0)]
        maturity: f64,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Oracle {
    Mc,
    Quad,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Product {
    Fixed,
    Floating,
}

pub struct Outcome {
    pub stdout: String,
    pub code: u8,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, code: 0 }
    }
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Price { file, format } => price(&file, format),
        Command::Validate {
            file,
            oracle,
            paths,
            rel_tol,
            seed,
            steps,
            flip_theta,
        } => {
            let mc = McConfig::new(paths, seed, true, steps).map_err(|e| CliError::Usage(e.to_string()))?;
            let quad = QuadratureConfig::new(rel_tol, 16, 10.0).map_err(|e| CliError::Usage(e.to_string()))?;
            validate(&file, oracle, &mc, &quad, flip_theta)
        }
        Command::Converge {
            product,
            ladder,
            x,
            strike,
            r,
            q,
            sigma,
            maturity,
            out,
        } => {
            let params = MarketParams::new(r, q, sigma).map_err(|e| CliError::Usage(e.to_string()))?;
            let product = match product {
                Product::Fixed => StudyProduct::Fixed { strike },
                Product::Floating => StudyProduct::Floating,
            };
            converge(product, &ladder, x, maturity, &params, out.as_deref())
        }
    }
}

pub fn price(file: &Path, format: Format) -> Result<Outcome, CliError> {
    let ContractFile { contract, x, t } = load_contract(file)?;
    let result = contract.price(x, t)?;
    let stdout = match format {
        Format::Text => price_text(contract.kind_name(), x, t, &result),
        Format::Json => format!("{:#}\n", price_json(contract.kind_name(), x, t, &result)),
    };
    Ok(Outcome::ok(stdout))
}

/// `value - leg + leg e^{-2 theta}`: the leg carrying `e^theta` re-evaluated
/// with `e^{-theta}`.
pub fn flip_theta(result: &PriceResult) -> Option<f64> {
    let theta = result.get("theta")?;
    let leg = result.get("theta_leg")?;
    Some(result.value - leg + leg * (-2.0 * theta).exp())
}

pub fn validate(
    file: &Path,
    oracle: Oracle,
    mc: &McConfig,
    quad: &QuadratureConfig,
    flip: bool,
) -> Result<Outcome, CliError> {
    let ContractFile { contract, x, t } = load_contract(file)?;
    let priced = contract.price(x, t)?;
    let closed = if flip {
        flip_theta(&priced)
            .ok_or_else(|| CliError::Unsupported(format!("{} reports no theta leg to flip", contract.kind_name())))?
    } else {
        priced.value
    };
    let mut out = format!("kind         {}\nclosed form  {}\n", contract.kind_name(), sig12(closed));
    let mut pass = true;
    let mut ran = 0;

    let wanted = |o: Oracle| oracle == o || oracle == Oracle::Both;
    if wanted(Oracle::Quad) {
        match run_quad(&contract, x, t, quad) {
            Ok(q) => {
                let gap = (closed - q.value).abs();
                let rel = gap / q.value.abs().max(f64::MIN_POSITIVE);
                let ok = rel <= 10.0 * quad.rel_tol || gap == 0.0;
                pass &= ok;
                ran += 1;
                out.push_str(&format!(
                    "quad         {}  gap {:.3e}  rel gap {:.3e}  limit {:.1e}  {}\n",
                    sig12(q.value),
                    gap,
                    rel,
                    10.0 * quad.rel_tol,
                    verdict(ok)
                ));
            }
            Err(CliError::Unsupported(why)) if oracle == Oracle::Both => {
                out.push_str(&format!("quad         skipped ({why})\n"));
            }
            Err(e) => return Err(e),
        }
    }
    if wanted(Oracle::Mc) {
        match run_mc(&contract, x, t, mc) {
            Ok(m) => {
                let se = m.stderr.unwrap_or(0.0);
                let gap = (closed - m.value).abs();
                // a zero-variance estimate is exact up to rounding
                let ok = gap <= 3.0 * se || gap <= 1e-12 * closed.abs().max(1.0);
                pass &= ok;
                ran += 1;
                let z = if se > 0.0 { format!("{:.2}", gap / se) } else { "-".into() };
                out.push_str(&format!(
                    "mc           {}  se {:.3e}  gap {:.3e}  gap/se {z}  paths {}  seed {}  {}\n",
                    sig12(m.value),
                    se,
                    gap,
                    mc.paths,
                    mc.seed,
                    verdict(ok)
                ));
            }
            Err(CliError::Unsupported(why)) if oracle == Oracle::Both => {
                out.push_str(&format!("mc           skipped ({why})\n"));
            }
            Err(e) => return Err(e),
        }
    }
    if ran == 0 {
        return Err(CliError::Unsupported(format!("no oracle supports {}", contract.kind_name())));
    }
    out.push_str(&format!("result       {}\n", verdict(pass)));
    Ok(Outcome {
        stdout: out,
        code: if pass { 0 } else { 1 },
    })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn run_quad(c: &ContractSpec, x: f64, t: f64, cfg: &QuadratureConfig) -> Result<PriceResult, CliError> {
    Ok(quad_price(c, x, t, cfg)?)
}

fn run_mc(c: &ContractSpec, x: f64, t: f64, cfg: &McConfig) -> Result<PriceResult, CliError> {
    mc_price(c, x, t, cfg).map_err(|e| match e {
        PricingError::DegenerateHorizon => {
            CliError::Unsupported("nothing left to simulate at this valuation time".into())
        }
        other => other.into(),
    })
}

pub const CSV_HEADER: [&str; 6] = ["n", "V_n", "V_continuous", "abs_error", "rel_error", "error_ratio_vs_prev"];

pub fn write_csv<W: Write>(rows: &[ConvergenceRow], w: W) -> csv::Result<()> {
    let mut wr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    wr.write_record(CSV_HEADER)?;
    for r in rows {
        wr.write_record([
            r.n.to_string(),
            r.v_n.to_string(),
            r.v_continuous.to_string(),
            r.abs_error.to_string(),
            r.rel_error.to_string(),
            r.error_ratio_vs_prev.map(|q| q.to_string()).unwrap_or_default(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn converge(
    product: StudyProduct,
    ladder: &[usize],
    x: f64,
    maturity: f64,
    params: &MarketParams,
    out: Option<&Path>,
) -> Result<Outcome, CliError> {
    if ladder.iter().any(|&n| n < 2) {
        return Err(CliError::Usage("--ladder: entries must be >= 2".into()));
    }
    if ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Usage("--ladder: entries must be strictly ascending".into()));
    }
    let rows = convergence_study(product, ladder, x, maturity, params)?;
    let io_err = |path: &Path, e: csv::Error| CliError::Io {
        path: path.to_path_buf(),
        source: e.into(),
    };
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|source| CliError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            write_csv(&rows, file).map_err(|e| io_err(path, e))?;
            Ok(Outcome::ok(format!("wrote {} rows to {}\n", rows.len(), path.display())))
        }
        None => {
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf).map_err(|e| io_err(Path::new("<stdout>"), e))?;
            Ok(Outcome::ok(String::from_utf8(buf).expect("csv output is utf-8")))
        }
    }
}
