//! Command-line front end. The binary only calls [`main_with_args`].
//!
//! Exit status: 0 success, 1 verification failure or numerical error,
//! 2 input error, 3 verification unsupported for the domain, 4 kernel-check failure.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::{run_algorithm, truncation_height};
use crate::domain::{load_domain, psl2z, FundamentalDomain, RegionTag};
use crate::error::{Error, Result};
use crate::kernels::suite::{run as run_kernel_suite, KernelReport, KernelSuiteConfig};
use crate::numfmt::sig;
use crate::verifier::verify_domain;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;
pub const EXIT_KERNEL: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "supnorm", version, about = "Effective sup-norm bounds for cusp forms on Fuchsian groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the ledger of effective constants.
    Constants(DomainArgs),
    /// Per-weight bound table `k,region,upper,lower,source`.
    Bounds(BoundsArgs),
    /// Plot-ready `k,bound` series, one per region.
    Curves(BoundsArgs),
    /// Numerical verification on the modular group.
    Verify(VerifyArgs),
    /// Property suites over the kernel layer.
    KernelCheck(KernelArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file (a directory for `curves`); standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DomainArgs {
    /// Domain description (JSON). Defaults to the bundled modular group.
    #[arg(long)]
    pub domain: Option<PathBuf>,
    #[arg(long = "Y0", default_value_t = 2.0)]
    pub y0: f64,
    /// Truncation height; must equal max(2 Y0, 16/sqrt 15) when given.
    #[arg(long = "Y")]
    pub y: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub domain: DomainArgs,
    #[arg(long, default_value_t = 2)]
    pub k_min: u32,
    #[arg(long, default_value_t = 30)]
    pub k_max: u32,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub domain: DomainArgs,
    /// Weights 2k, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "12")]
    pub weights: Vec<u32>,
    /// Grid points per axis.
    #[arg(long, default_value_t = 100)]
    pub grid: usize,
}

#[derive(Args, Debug)]
pub struct KernelArgs {
    #[arg(long, default_value_t = KernelSuiteConfig::default().k_max)]
    pub k_max: u32,
    /// Relative tolerance of the heat-kernel transform identity.
    #[arg(long, default_value_t = KernelSuiteConfig::default().transform_tol)]
    pub transform_tol: f64,
    /// Relative tolerance between the two evaluations of `g_k`.
    #[arg(long, default_value_t = KernelSuiteConfig::default().gk_tol)]
    pub gk_tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Maps an error to its exit status.
pub fn exit_code(e: &Error) -> i32 {
    match e.root() {
        Error::UnsupportedVerification => EXIT_UNSUPPORTED,
        Error::Load(_)
        | Error::Io(_)
        | Error::Json(_)
        | Error::Domain(_)
        | Error::Precondition(_)
        | Error::UnsupportedWeight(_)
        | Error::MissingData(_)
        | Error::NotHyperbolic(_) => EXIT_INPUT,
        _ => EXIT_FAILED,
    }
}

impl DomainArgs {
    fn load(&self) -> Result<FundamentalDomain> {
        if !(self.y0 > 0.0) {
            return Err(Error::Precondition(format!("Y0 must be positive, got {}", self.y0)));
        }
        let expected = truncation_height(self.y0)?;
        if let Some(y) = self.y {
            if (y - expected).abs() > 1e-9 * expected {
                return Err(Error::Precondition(format!("Y must equal max(2 Y0, 16/sqrt 15) = {}, got {y}", sig(expected))));
            }
        }
        match &self.domain {
            Some(p) => load_domain(p),
            None => Ok(psl2z()),
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => Ok(fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn region_file(tag: RegionTag) -> String {
    match tag {
        RegionTag::Compact => "compact.csv".into(),
        RegionTag::Cusp(j) => format!("cusp{}.csv", j + 1),
    }
}

fn check_range(k_min: u32, k_max: u32) -> Result<()> {
    if k_min > k_max {
        return Err(Error::Precondition(format!("k-min {k_min} exceeds k-max {k_max}")));
    }
    Ok(())
}

fn kernel_table(r: &KernelReport) -> String {
    let mut out = String::new();
    for i in &r.items {
        out.push_str(&format!(
            "{:<4} {:<24} {:>7} {:>20}  {}\n",
            if i.passed { "PASS" } else { "FAIL" },
            i.name,
            i.points,
            sig(i.worst),
            i.detail
        ));
    }
    out
}

fn write_curves(dir: &Path, curves: &[(RegionTag, String)]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (tag, csv) in curves {
        fs::write(dir.join(region_file(*tag)), csv)?;
    }
    Ok(())
}

/// Runs a parsed command and returns its exit status.
pub fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Constants(a) => {
            let d = a.load()?;
            let (c, _) = run_algorithm(&d, a.y0, 2, 1)?;
            let text = match a.output.format {
                Format::Csv => c.ledger_csv(),
                Format::Json => c.to_json()? + "\n",
            };
            emit(&a.output.out, &text)?;
            Ok(EXIT_OK)
        }
        Command::Bounds(a) => {
            check_range(a.k_min, a.k_max)?;
            let d = a.domain.load()?;
            let (_, report) = run_algorithm(&d, a.domain.y0, a.k_min, a.k_max)?;
            let text = match a.domain.output.format {
                Format::Csv => report.to_csv(),
                Format::Json => report.to_json()? + "\n",
            };
            emit(&a.domain.output.out, &text)?;
            Ok(EXIT_OK)
        }
        Command::Curves(a) => {
            check_range(a.k_min, a.k_max)?;
            let d = a.domain.load()?;
            let (_, report) = run_algorithm(&d, a.domain.y0, a.k_min, a.k_max)?;
            let curves = report.curves();
            match &a.domain.output.out {
                Some(dir) => write_curves(dir, &curves)?,
                None => {
                    for (tag, csv) in &curves {
                        println!("# {tag}");
                        print!("{csv}");
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Verify(a) => {
            if a.grid < 1 {
                return Err(Error::Precondition("grid must be at least 1".into()));
            }
            let d = a.domain.load()?;
            let report = verify_domain(&d, a.domain.y0, &a.weights, a.grid)?;
            let text = match a.domain.output.format {
                Format::Csv => report.table(),
                Format::Json => report.to_json()? + "\n",
            };
            emit(&a.domain.output.out, &text)?;
            if a.domain.output.out.is_some() {
                eprint!("{}", report.table());
            }
            Ok(if report.all_passed() { EXIT_OK } else { EXIT_FAILED })
        }
        Command::KernelCheck(a) => {
            let cfg = KernelSuiteConfig { k_max: a.k_max, transform_tol: a.transform_tol, gk_tol: a.gk_tol };
            let report = run_kernel_suite(&cfg);
            let text = match a.output.format {
                Format::Csv => kernel_table(&report),
                Format::Json => serde_json::to_string_pretty(&report)? + "\n",
            };
            emit(&a.output.out, &text)?;
            Ok(if report.all_passed() { EXIT_OK } else { EXIT_KERNEL })
        }
    }
}

/// Parses `args` (including the program name), runs, and reports errors on stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
