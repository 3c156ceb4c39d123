use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use apme::cli::{self, SuiteOptions, EXIT_CHECK_FAILED, EXIT_ERROR, EXIT_OK};
use apme::{compute_profile, io, MediumParams, ProfileOptions};

#[derive(Parser)]
#[command(name = "apme", version, about = "Anisotropic porous medium experiments")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the exponent table and the hypothesis verdict.
    Info {
        /// Exponents m_1 ... m_N.
        #[arg(required = true, allow_negative_numbers = true)]
        m: Vec<f64>,
    },
    /// Run the experiment described by a config file.
    Run { config: PathBuf },
    /// Compute a self-similar profile and write it as CSV plus a JSON manifest.
    Profile {
        #[arg(required = true)]
        m: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, default_value_t = 128)]
        cells: usize,
        /// Box half-width on every axis; estimated when omitted.
        #[arg(long)]
        half_width: Option<f64>,
        #[arg(long, default_value = "profile-out")]
        out: PathBuf,
    },
    /// Run the randomized structural property suites.
    Verify {
        /// Fixed exponents; drawn per case when omitted.
        m: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        cases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated subset of the checks.
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
        #[arg(long, default_value_t = 40)]
        cells: usize,
    },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let code = match cli::configure_threads() {
        Ok(_) => dispatch(args.command),
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    };
    ExitCode::from(code as u8)
}

fn dispatch(command: Command) -> i32 {
    match command {
        Command::Info { m } => {
            let (table, ok) = cli::info(&m);
            print!("{table}");
            if ok {
                EXIT_OK
            } else {
                EXIT_ERROR
            }
        }
        Command::Run { config } => cli::run(&config),
        Command::Profile {
            m,
            mass,
            cells,
            half_width,
            out,
        } => report(profile(m, mass, cells, half_width, out)),
        Command::Verify {
            m,
            cases,
            seed,
            checks,
            cells,
        } => {
            let mut opts = SuiteOptions {
                cases,
                seed,
                cells,
                m: (!m.is_empty()).then_some(m),
                ..SuiteOptions::default()
            };
            if let Some(checks) = checks {
                opts.checks = checks;
            }
            report(verify(&opts))
        }
    }
}

fn report(result: Result<bool, Box<dyn std::error::Error>>) -> i32 {
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn profile(
    m: Vec<f64>,
    mass: f64,
    cells: usize,
    half_width: Option<f64>,
    out: PathBuf,
) -> Result<bool, Box<dyn std::error::Error>> {
    let params = MediumParams::new(m)?;
    let opts = ProfileOptions {
        cells,
        half_width: half_width.map(|l| vec![l; params.dim()]),
        ..ProfileOptions::default()
    };
    let p = compute_profile(&params, mass, &opts)?;
    std::fs::create_dir_all(&out)?;
    io::write_field(&out.join("profile.csv"), &p.field)?;
    let manifest = serde_json::to_string_pretty(&p.manifest())?;
    std::fs::write(out.join("profile.json"), &manifest)?;
    println!("{manifest}");
    Ok(p.residual < p.tol)
}

fn verify(opts: &SuiteOptions) -> Result<bool, Box<dyn std::error::Error>> {
    let report = cli::run_suite(opts)?;
    for c in &report.checks {
        println!(
            "{} {} ({} of {} cases failed, worst defect {:.3e})",
            if c.passed() { "PASS" } else { "FAIL" },
            c.name,
            c.failures(),
            c.cases.len(),
            c.worst()
        );
    }
    Ok(report.passed())
}
