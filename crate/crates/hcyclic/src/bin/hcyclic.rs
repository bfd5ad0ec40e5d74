//! Command-line interface: analyze matrices for h-cyclic structure, rotate
//! Jordan chains, print component matrices, run the Perron-Frobenius suite,
//! and execute the randomized selftest.
//!
//! Exit codes: 0 success, 2 parse/usage error, 3 reducible or primitive
//! input, 4 decomposition failure, 5 verification failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hcyclic::analyze::{analyze, AnalysisError, AnalyzeOptions};
use hcyclic::graph::{detect_cyclic_structure, CyclicDetection};
use hcyclic::io::{
    chain_json_string, format_for_path, read_chain, read_matrix, IoError, MatrixFormat,
};
use hcyclic::matrix::ComplexMatrix;
use hcyclic::report::InputDescriptor;
use hcyclic::selftest::{run_all, SelftestOptions};

const EXIT_PARSE: u8 = 2;
const EXIT_REDUCIBLE: u8 = 3;
const EXIT_DECOMPOSITION: u8 = 4;
const EXIT_VERIFICATION: u8 = 5;

#[derive(Parser)]
#[command(
    name = "hcyclic",
    about = "Detect h-cyclic structure, rotate Jordan chains, and build spectral components",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Matrix file format: matrix-market or json (default: by extension)
    #[arg(long, global = true)]
    format: Option<String>,
    /// Write the JSON report to this path
    #[arg(long, value_name = "PATH", global = true)]
    json: Option<PathBuf>,
    /// Absolute zero-pattern tolerance (default: 1e-12 * max |a_ij|)
    #[arg(long, global = true)]
    zero_tol: Option<f64>,
    /// Relative chain-residual and property tolerance
    #[arg(long, default_value_t = 1e-9, global = true)]
    chain_tol: f64,
    /// Relative orbit-pairing and clustering tolerance
    #[arg(long, default_value_t = 1e-8, global = true)]
    orbit_tol: f64,
    /// Report primitive (h = 1) input instead of failing
    #[arg(long, global = true)]
    allow_primitive: bool,
    /// Seed for the randomized suites
    #[arg(long, default_value_t = 20140704, global = true)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Full analysis: detect, decompose, build components, verify
    Analyze {
        matrix: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Rotate a Jordan chain by omega^k
    Rotate {
        matrix: PathBuf,
        /// JSON chain file {"side", "eigenvalue", "vectors"}
        chain: PathBuf,
        /// Rotation exponent in 0..h-1
        #[arg(short, long)]
        k: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Print the spectral component matrices
    Components {
        matrix: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Perron-Frobenius data and the nonnegative Perron component
    Perron {
        matrix: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run the randomized property suites
    Selftest {
        #[arg(long, default_value_t = 500)]
        chain_cases: usize,
        #[arg(long, default_value_t = 200)]
        decomposition_cases: usize,
        #[arg(long, default_value_t = 100)]
        theorem_cases: usize,
        #[arg(long, default_value_t = 100)]
        perron_cases: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn load_matrix(
    path: &PathBuf,
    common: &CommonOpts,
) -> Result<(ComplexMatrix, MatrixFormat), IoError> {
    let format = match &common.format {
        Some(text) => text.parse()?,
        None => format_for_path(path)?,
    };
    let matrix = read_matrix(path, format)?;
    Ok((matrix, format))
}

fn options_from(common: &CommonOpts) -> AnalyzeOptions {
    AnalyzeOptions {
        zero_tol: common.zero_tol,
        chain_tol: common.chain_tol,
        orbit_tol: common.orbit_tol,
        allow_primitive: common.allow_primitive,
    }
}

fn analysis_exit(error: &AnalysisError) -> u8 {
    match error {
        AnalysisError::Reducible | AnalysisError::Primitive => EXIT_REDUCIBLE,
        _ => EXIT_DECOMPOSITION,
    }
}

fn run_analysis_command(
    matrix_path: &PathBuf,
    common: &CommonOpts,
    print: impl FnOnce(&hcyclic::report::AnalysisReport),
) -> u8 {
    let (matrix, format) = match load_matrix(matrix_path, common) {
        Ok(pair) => pair,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_PARSE;
        }
    };
    let descriptor = InputDescriptor {
        path: Some(matrix_path.display().to_string()),
        format: Some(format.to_string()),
        rows: matrix.rows(),
        cols: matrix.cols(),
    };
    match analyze(&matrix, &options_from(common), descriptor) {
        Ok(report) => {
            print(&report);
            if let Some(json_path) = &common.json {
                if let Err(e) = std::fs::write(json_path, report.to_json()) {
                    eprintln!("error: cannot write {}: {e}", json_path.display());
                    return EXIT_PARSE;
                }
            }
            if report.pass {
                0
            } else {
                eprintln!("verification failed; see the report above");
                EXIT_VERIFICATION
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            analysis_exit(&e)
        }
    }
}

fn run_rotate(matrix_path: &PathBuf, chain_path: &PathBuf, k: usize, common: &CommonOpts) -> u8 {
    let (matrix, _) = match load_matrix(matrix_path, common) {
        Ok(pair) => pair,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_PARSE;
        }
    };
    let chain = match read_chain(chain_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_PARSE;
        }
    };
    let zero_tol = common
        .zero_tol
        .unwrap_or_else(|| hcyclic::graph::default_zero_tol(&matrix));
    let structure = match detect_cyclic_structure(&matrix, zero_tol) {
        Ok(CyclicDetection::Cyclic(s)) => s,
        Ok(CyclicDetection::Primitive) => {
            eprintln!("error: matrix is primitive (h = 1); there is no rotation to apply");
            return EXIT_REDUCIBLE;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_REDUCIBLE;
        }
    };
    if k >= structure.h {
        eprintln!("error: k must lie in 0..{}", structure.h - 1);
        return EXIT_PARSE;
    }
    if !structure.partition.is_consecutive() {
        eprintln!(
            "error: the cyclic partition is not consecutive; permute the matrix with the \
             consecutive permutation first"
        );
        return EXIT_PARSE;
    }

    // the input chain must verify before rotation means anything
    let tol = common.chain_tol * matrix.inf_norm() * chain.max_vector_norm().max(1.0);
    match hcyclic::chain::verify_chain(&matrix, &chain, tol) {
        Ok(report) if report.pass => {}
        Ok(report) => {
            eprintln!(
                "error: input chain fails verification (residual {:.3e} > {:.3e})",
                report.max_residual(),
                tol
            );
            return EXIT_VERIFICATION;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_VERIFICATION;
        }
    }

    let rotated = match hcyclic::chain::rotate_chain(&chain, k, &structure.partition) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_DECOMPOSITION;
        }
    };
    let tol = common.chain_tol * matrix.inf_norm() * rotated.max_vector_norm().max(1.0);
    let verification = match hcyclic::chain::verify_chain(&matrix, &rotated, tol) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_VERIFICATION;
        }
    };

    let payload = serde_json::json!({
        "h": structure.h,
        "k": k,
        "chain": serde_json::from_str::<serde_json::Value>(&chain_json_string(&rotated))
            .expect("chain JSON is valid"),
        "residuals": verification.residuals,
        "tolerance": verification.tolerance,
        "pass": verification.pass,
    });
    println!("{}", serde_json::to_string_pretty(&payload).expect("payload serializes"));
    if verification.pass {
        0
    } else {
        EXIT_VERIFICATION
    }
}

fn run_selftest(
    seed: u64,
    chain_cases: usize,
    decomposition_cases: usize,
    theorem_cases: usize,
    perron_cases: usize,
) -> u8 {
    let options = SelftestOptions {
        seed,
        chain_cases,
        decomposition_cases,
        theorem_cases,
        perron_cases,
    };
    println!("selftest seed {seed}");
    let results = run_all(&options);
    let mut all_passed = true;
    for suite in &results {
        println!(
            "{}: {}/{} cases passed",
            suite.name,
            suite.cases - suite.failures.len(),
            suite.cases
        );
        for failure in &suite.failures {
            println!("  FAIL {failure}");
        }
        all_passed &= suite.passed();
    }
    if all_passed {
        println!("selftest: PASS");
        0
    } else {
        println!("selftest: FAIL (replay with --seed {seed})");
        EXIT_VERIFICATION
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Analyze { matrix, common } => {
            run_analysis_command(matrix, common, |report| print!("{}", report.render_text()))
        }
        Command::Components { matrix, common } => run_analysis_command(matrix, common, |report| {
            for component in &report.components {
                println!(
                    "component for orbit {} (base {:+.9}{:+.9}i):",
                    component.orbit, component.base.0, component.base.1
                );
                let m = &component.matrix;
                for i in 0..m.rows {
                    let row: Vec<String> = (0..m.cols)
                        .map(|j| {
                            let (re, im) = m.entries[i * m.cols + j];
                            format!("{re:+.6}{im:+.6}i")
                        })
                        .collect();
                    println!("  {}", row.join(" "));
                }
            }
        }),
        Command::Perron { matrix, common } => {
            let mut common = common.clone();
            // the Perron report is meaningful for primitive input too
            common.allow_primitive = true;
            run_analysis_command(matrix, &common, |report| match &report.perron {
                Some(perron) => {
                    println!("spectral radius: {:.12}", perron.spectral_radius);
                    println!("cyclic index: {}", perron.cyclic_index);
                    let fmt = |v: &Vec<f64>| {
                        v.iter().map(|x| format!("{x:.12}")).collect::<Vec<_>>().join(", ")
                    };
                    println!("right perron (||x||_1 = 1): [{}]", fmt(&perron.right));
                    println!("left perron (y^T x = 1): [{}]", fmt(&perron.left));
                    println!(
                        "peripheral residual {:.3e}, rotation residual {:.3e} (tol {:.3e}): {}",
                        perron.peripheral.peripheral_residual,
                        perron.peripheral.rotation_residual,
                        perron.peripheral.tolerance,
                        if perron.peripheral.pass { "ok" } else { "FAIL" }
                    );
                }
                None => println!("matrix is not nonnegative irreducible; no Perron data"),
            })
        }
        Command::Rotate { matrix, chain, k, common } => run_rotate(matrix, chain, *k, common),
        Command::Selftest {
            chain_cases,
            decomposition_cases,
            theorem_cases,
            perron_cases,
            common,
        } => run_selftest(
            common.seed,
            *chain_cases,
            *decomposition_cases,
            *theorem_cases,
            *perron_cases,
        ),
    };
    ExitCode::from(code)
}
