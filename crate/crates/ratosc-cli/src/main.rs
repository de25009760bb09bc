//! Command-line front end: exact states, figure-data CSV emission, and the
//! validation suite.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ratosc::figures::{
    exact_points, ground_locus_rows, run_validation, variational_curves, write_curves_csv,
    write_ground_locus_csv, write_points_csv, ExactPoint, ScanConfig,
};
use ratosc::spectrum::exact_states;
use ratosc::{Error, Parity};

#[derive(Parser)]
#[command(
    name = "ratosc",
    version,
    about = "Exact, variational, and grid spectra of the oscillator x^2 + lambda x^2/(1 + g x^2)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ScanArgs {
    /// Coupling g of the rational term (must be positive).
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    g: f64,
    /// Left edge of the lambda window.
    #[arg(long, default_value_t = -40.0, allow_negative_numbers = true)]
    lambda_min: f64,
    /// Right edge of the lambda window.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    lambda_max: f64,
    /// Number of lambda grid points (endpoints included).
    #[arg(long, default_value_t = 201)]
    lambda_steps: usize,
    /// Variational basis size.
    #[arg(long, default_value_t = 22)]
    basis_size: usize,
    /// Largest sector degree mined for exact points.
    #[arg(long, default_value_t = 6)]
    n_max: usize,
    /// Output directory for the CSV files (created if missing).
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Print the exact states of sectors n = 0..=n_max as CSV.
    Exact {
        /// Largest sector degree.
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        /// Parity sector: 0 (even) or 1 (odd).
        #[arg(long, default_value_t = 0)]
        s: usize,
        /// Coupling g of the rational term (must be positive).
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        g: f64,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Even-parity energy curves over a lambda window, with exact points.
    Figure1 {
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Odd-parity companion of figure1.
    Figure2 {
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Exact nodeless ground-state locus lambda^(n,1), E^(n,1) versus n.
    Figure3 {
        /// Comma-separated g values.
        #[arg(long, value_delimiter = ',', default_values_t = [0.2, 0.5, 1.0])]
        g: Vec<f64>,
        /// Largest sector degree.
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        /// Output directory for figure3.csv (created if missing).
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the cross-module validation suite and report per-check margins.
    Validate {
        /// Shrink parameter grids and meshes; same tolerances.
        #[arg(long)]
        quick: bool,
        /// Failure-injection hook: displace one state's coupling by this
        /// amount before the residual check, which must then fail.
        #[arg(long, hide = true, allow_negative_numbers = true)]
        perturb_lambda: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidParameter { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Exact { n_max, s, g, out } => cmd_exact(n_max, s, g, out.as_deref()),
        Command::Figure1 { scan } => cmd_scan(scan, ScanConfig::figure1_default(), "figure1"),
        Command::Figure2 { scan } => cmd_scan(scan, ScanConfig::figure2_default(), "figure2"),
        Command::Figure3 { g, n_max, out } => cmd_figure3(&g, n_max, &out),
        Command::Validate {
            quick,
            perturb_lambda,
        } => Ok(cmd_validate(quick, perturb_lambda)),
    }
}

fn cmd_exact(n_max: usize, s: usize, g: f64, out: Option<&Path>) -> Result<ExitCode, Error> {
    let s = Parity::from_index(s)?;
    let mut points = Vec::new();
    for n in 0..=n_max {
        for st in exact_states(n, s, g)? {
            points.push(ExactPoint {
                n: st.n(),
                i: st.i(),
                lambda: st.lambda(),
                energy: st.energy(),
                nu: st.nu(),
            });
        }
    }
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_points_csv(&mut w, &points)?;
            w.flush()?;
        }
        None => write_points_csv(&mut io::stdout().lock(), &points)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_scan(args: ScanArgs, defaults: ScanConfig, stem: &str) -> Result<ExitCode, Error> {
    let cfg = ScanConfig {
        g: args.g,
        lambda_min: args.lambda_min,
        lambda_max: args.lambda_max,
        lambda_steps: args.lambda_steps,
        basis_size: args.basis_size,
        n_max: args.n_max,
        ..defaults
    };
    cfg.validate()?;
    let rows = variational_curves(&cfg)?;
    let points = exact_points(&cfg)?;

    fs::create_dir_all(&args.out)?;
    let curves_path = args.out.join(format!("{stem}_curves.csv"));
    let mut w = BufWriter::new(File::create(&curves_path)?);
    write_curves_csv(&mut w, &cfg, &rows)?;
    w.flush()?;
    println!("wrote {} ({} rows)", curves_path.display(), rows.len());

    let points_path = args.out.join(format!("{stem}_points.csv"));
    let mut w = BufWriter::new(File::create(&points_path)?);
    write_points_csv(&mut w, &points)?;
    w.flush()?;
    println!("wrote {} ({} points)", points_path.display(), points.len());
    Ok(ExitCode::SUCCESS)
}

fn cmd_figure3(g_values: &[f64], n_max: usize, out: &Path) -> Result<ExitCode, Error> {
    let rows = ground_locus_rows(g_values, n_max)?;
    fs::create_dir_all(out)?;
    let path = out.join("figure3.csv");
    let mut w = BufWriter::new(File::create(&path)?);
    write_ground_locus_csv(&mut w, &rows)?;
    w.flush()?;
    println!("wrote {} ({} rows)", path.display(), rows.len());
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(quick: bool, perturb_lambda: Option<f64>) -> ExitCode {
    let report = run_validation(quick, perturb_lambda);
    let mut passed = 0;
    for c in &report.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        passed += usize::from(c.passed);
        println!("{tag} {:<26} {}", c.name, c.detail);
    }
    println!(
        "validation{}: {passed}/{} checks passed",
        if report.quick { " (quick)" } else { "" },
        report.checks.len()
    );
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
