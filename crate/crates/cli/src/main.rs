use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pseudofermion::algebra::{build_hamiltonian, hamiltonian_spectrum, FiniteEigensystem};
use pseudofermion::checks;
use pseudofermion::figure::{generate_figure, write_csv, write_json, FigureConfig};
use pseudofermion::fock::{
    build_fock, build_pseudo_fermions, build_t_operators_fock, diagonal_form_residual,
};
use pseudofermion::metric::{build_metric, metric_residuals};
use pseudofermion::thermo::{em_expectations, exact_expectations, ThermoPoint, DEFAULT_TAIL_TOL};
use pseudofermion::{make_params, Result};

#[derive(Parser)]
#[command(
    name = "pseudofermion",
    version,
    about = "Non-Hermitian fermion model: spectra, metric, Fock algebra, thermodynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lowest eigenvalues of the truncated one-particle Hamiltonian.
    Spectrum {
        #[arg(long, default_value_t = 0.6, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long, default_value_t = 100)]
        truncation: usize,
        #[arg(long, default_value_t = 8)]
        count: usize,
    },
    /// Residuals of the metric identities on the interior block.
    MetricCheck {
        #[arg(long, default_value_t = 0.6, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long, default_value_t = 60)]
        truncation: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Pseudo-fermion algebra on a finite mode set.
    FockCheck {
        #[arg(long, default_value_t = 0.6, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long, default_value_t = 6)]
        modes: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Grand-canonical averages at one (β, μ).
    Thermo {
        #[arg(long, default_value_t = 0.6, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
        method: MethodArg,
        #[arg(long, default_value_t = DEFAULT_TAIL_TOL)]
        tail_tol: f64,
    },
    /// Curve families, hull boundary and joint spectrum.
    Figure {
        /// JSON config; the built-in defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Runs every acceptance check; exit code 1 if any fails.
    Selfcheck {
        /// Print the reports as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Em,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn verdict(label: &str, value: f64, tol: f64) -> bool {
    let ok = value <= tol;
    println!(
        "{label:<32} {value:>12.3e}  {}",
        if ok { "ok" } else { "FAIL" }
    );
    ok
}

fn print_point(p: &ThermoPoint) {
    println!(
        "{:<16} log_z={:<24} energy={:<24} number={:<24} entropy={:<24} zeta'={} modes={}",
        p.method, p.log_z, p.energy, p.number, p.entropy, p.zeta_prime, p.modes
    );
}

fn run(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Spectrum {
            gamma,
            truncation,
            count,
        } => {
            let p = make_params(gamma)?;
            let ev = hamiltonian_spectrum(&p, truncation, count)?;
            println!("Λ = {}", p.lambda_scale);
            println!(
                "{:>4} {:>24} {:>24} {:>11}",
                "n", "eigenvalue", "Λ(4n−3)/4", "rel. error"
            );
            for (n, e) in ev.iter().enumerate() {
                let want = p.mode_energy(n + 1)?;
                println!(
                    "{:>4} {:>24} {:>24} {:>11.3e}",
                    n + 1,
                    e,
                    want,
                    (e - want).abs() / want
                );
            }
            Ok(true)
        }
        Command::MetricCheck {
            gamma,
            truncation,
            tol,
        } => {
            let p = make_params(gamma)?;
            let m = build_metric(&p, truncation)?;
            let r = metric_residuals(&p, &m);
            println!("interior block {0}×{0}", r.block);
            let mut ok = verdict("D²H − HᵀD²", r.hermitization, tol);
            ok &= verdict("D²T₊ − T₋ᵀD²", r.t_adjoint, tol);
            ok &= verdict("DHD⁻¹ asymmetry", r.similarity_asymmetry, tol);
            for (name, v) in ["S₀ → T₀", "S₊ → T₊", "S₋ → T₋"].iter().zip(r.conjugation)
            {
                ok &= verdict(&format!("conjugated {name}"), v, tol);
            }
            Ok(ok)
        }
        Command::FockCheck { gamma, modes, tol } => {
            let p = make_params(gamma)?;
            let space = build_fock(modes)?;
            let sys = FiniteEigensystem::new(&build_hamiltonian(&p, modes)?.entries)?;
            let pf = build_pseudo_fermions(&space, &sys, tol)?;
            let d = pf.anticommutator_defects();
            let mut ok = verdict("{d‡,d} − δ", d[0], tol);
            ok &= verdict("{d‡,d‡}", d[1], tol);
            ok &= verdict("{d,d}", d[2], tol);
            ok &= verdict("H − Σλd‡d", diagonal_form_residual(&space, &p, &pf)?, tol);
            if modes >= 2 {
                let t = build_t_operators_fock(&space, &p, &pf)?;
                println!("T forms on A₁ (informational):");
                for (name, v) in ["T₀", "T₊", "T₋"].iter().zip(t.sector_one_gap) {
                    println!("  {name} bilinear − combination   {v:>12.3e}");
                }
                println!(
                    "  combination T₊ψ₁ residual      {:>12.3e}",
                    t.raising_residual[0]
                );
                println!(
                    "  bilinear T₊ψ₁ residual         {:>12.3e}",
                    t.raising_residual[1]
                );
            }
            Ok(ok)
        }
        Command::Thermo {
            gamma,
            beta,
            mu,
            method,
            tail_tol,
        } => {
            let p = make_params(gamma)?;
            if matches!(method, MethodArg::Exact | MethodArg::Both) {
                print_point(&exact_expectations(&p, beta, mu, tail_tol)?);
            }
            if matches!(method, MethodArg::Em | MethodArg::Both) {
                print_point(&em_expectations(&p, beta, mu)?);
            }
            Ok(true)
        }
        Command::Figure {
            config,
            out,
            format,
        } => {
            let cfg = match config {
                Some(path) => FigureConfig::load(path)?,
                None => FigureConfig::default(),
            };
            let data = generate_figure(&cfg)?;
            let sink: Box<dyn Write> = match &out {
                Some(path) => Box::new(BufWriter::new(File::create(path)?)),
                None => Box::new(BufWriter::new(io::stdout().lock())),
            };
            match format {
                Format::Csv => write_csv(&data, sink)?,
                Format::Json => write_json(&data, sink)?,
            }
            let c = &data.containment;
            eprintln!(
                "{} curves, {} exact points, smallest hull margin {:.3e}, {} violations",
                data.curves.len(),
                c.margins.len(),
                c.min_margin,
                c.violations.len()
            );
            Ok(c.passed())
        }
        Command::Selfcheck { json } => {
            let reports = checks::run_all();
            if json {
                println!("{}", serde_json::to_string_pretty(&reports)?);
            } else {
                for r in &reports {
                    println!("{r}");
                }
            }
            let failed = reports.iter().filter(|r| !r.passed).count();
            eprintln!(
                "{} of {} criteria passed",
                reports.len() - failed,
                reports.len()
            );
            Ok(failed == 0)
        }
    }
}
