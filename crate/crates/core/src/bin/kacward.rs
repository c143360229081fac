//! Command-line front end: critical temperature, spectral scans, free
//! energy, the identity suite, dualization, and built-in example graphs.
//!
//! Exit codes: 1 for parse problems, 2 for validation or computation
//! failures, 3 when a verification check fails.

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use kacward::builtins;
use kacward::critical;
use kacward::error::Error;
use kacward::fan_wu;
use kacward::free_energy;
use kacward::kac_ward;
use kacward::toric_graph::{parse_graph, ToricGraph};
use kacward::verify;
use kacward::weights::WeightSystem;

#[derive(Parser)]
#[command(
    name = "kacward",
    version,
    about = "Exact Ising criticality on toric graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the critical inverse temperature of the input graph
    Betac {
        /// Graph file path, or example:<name> for a built-in
        input: String,
        /// Absolute tolerance on beta_c
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Print the Kac-Ward determinant over a grid of unit phases
    Spectral {
        input: String,
        #[arg(long)]
        beta: f64,
        /// Grid points per torus direction
        #[arg(long, default_value_t = 16)]
        grid: usize,
        /// Evaluate only at z = exp(2*pi*i*a/grid)
        #[arg(long)]
        z_exp: Option<i64>,
        /// Evaluate only at w = exp(2*pi*i*b/grid)
        #[arg(long)]
        w_exp: Option<i64>,
    },
    /// Free energy per fundamental domain by toroidal quadrature
    Freeenergy {
        input: String,
        #[arg(long)]
        beta: f64,
        /// Quadrature grid (power of two, at least 8)
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
    /// Run the identity suite and report per-check residuals
    Verify {
        input: String,
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Emit the dual graph with Kramers-Wannier dual weights
    Dualize {
        input: String,
        /// Inverse temperature fixing x = tanh(beta*J) before dualizing
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
    },
    /// Show a built-in example graph; --emit prints its graph file
    Example {
        name: String,
        #[arg(long)]
        emit: bool,
    },
}

fn main() {
    // Die quietly when a downstream pipe closes, like any line-oriented tool.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    if let Ok(threads) = std::env::var("KACWARD_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code(&e));
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::UnknownExample(_) => 1,
        _ => 2,
    }
}

fn load(input: &str) -> Result<ToricGraph, Error> {
    if let Some(name) = input.strip_prefix("example:") {
        return builtins::builtin(name);
    }
    let text = std::fs::read_to_string(input).map_err(|e| Error::Parse {
        line: 0,
        message: format!("cannot read `{input}`: {e}"),
    })?;
    parse_graph(&text)?.build()
}

fn run(command: Command) -> Result<i32, Error> {
    match command {
        Command::Betac { input, tol } => {
            let g = load(&input)?;
            let point = critical::critical_beta(&g, &g.couplings(), tol)?;
            println!(
                "beta_c={} residual={:e} method={}",
                point.beta_c, point.residual, point.method
            );
            Ok(0)
        }
        Command::Spectral {
            input,
            beta,
            grid,
            z_exp,
            w_exp,
        } => {
            let g = load(&input)?;
            let x = WeightSystem::from_beta(&g, beta);
            let step = 2.0 * std::f64::consts::PI / grid as f64;
            let eval = |theta: f64, eta: f64| {
                let p = kac_ward::determinant(
                    &g,
                    &x,
                    Complex64::from_polar(1.0, theta),
                    Complex64::from_polar(1.0, eta),
                );
                println!("{theta} {eta} {}", p.value.re);
            };
            match (z_exp, w_exp) {
                (Some(a), Some(b)) => eval(step * a as f64, step * b as f64),
                _ => {
                    for j in 0..grid {
                        for k in 0..grid {
                            eval(step * j as f64, step * k as f64);
                        }
                    }
                }
            }
            Ok(0)
        }
        Command::Freeenergy { input, beta, grid } => {
            let g = load(&input)?;
            let r = free_energy::free_energy_ising(&g, &g.couplings(), beta, grid)?;
            let x = WeightSystem::from_beta(&g, beta);
            let base = free_energy::free_energy(&g, &x, grid)?;
            println!("free_energy={}", r.value);
            println!("log_z_x={}", base.value);
            println!("error_estimate={:e}", r.error_estimate);
            println!("grid={grid}");
            println!("near_singular={}", r.near_singular);
            Ok(0)
        }
        Command::Verify { input, beta, seed } => {
            let g = load(&input)?;
            let x = WeightSystem::from_beta(&g, beta);
            let table = kacward::homology::homology_table(&g, &x)?;
            println!("z00={}", table.z00);
            println!("z10={}", table.z10);
            println!("z01={}", table.z01);
            println!("z11={}", table.z11);
            println!("cycle_rank={}", table.cycle_rank);
            let results = verify::identity_suite(&g, beta, seed)?;
            let mut all_pass = true;
            for check in &results {
                let status = if check.passed() { "PASS" } else { "FAIL" };
                all_pass &= check.passed();
                println!(
                    "check={} residual={:e} tol={:e} status={status}",
                    check.name, check.residual, check.tolerance
                );
            }
            println!("verify={}", if all_pass { "PASS" } else { "FAIL" });
            Ok(if all_pass { 0 } else { 3 })
        }
        Command::Dualize { input, beta } => {
            let g = load(&input)?;
            let dual = g.dual()?;
            let x = WeightSystem::from_beta(&g, beta);
            let xd = fan_wu::dual_weights(&x);
            // Re-emit the dual with the dual weights in x-form.
            let mut data = kacward::toric_graph::GraphData {
                basis: dual.basis(),
                vertices: dual.vertices().to_vec(),
                edges: dual.edges().to_vec(),
            };
            for (i, e) in data.edges.iter_mut().enumerate() {
                e.weight = kacward::toric_graph::CouplingSpec::X(xd.x(i));
            }
            print!("{}", data.to_file_string());
            Ok(0)
        }
        Command::Example { name, emit } => {
            let g = builtins::builtin(&name)?;
            if emit {
                print!("{}", g.to_file_string());
            } else {
                println!("name={name}");
                println!("vertices={}", g.vertex_count());
                println!("edges={}", g.edge_count());
                println!("faces={}", g.face_count());
                println!("cycle_rank={}", g.cycle_rank());
            }
            Ok(0)
        }
    }
}
