mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use hochkit::{
    dualize_algebra, hh_cohomology, hh_homology, hh_inverse_limit, koszul_dual, parse_algebra, parse_bimodule,
    reduced_bar, reduced_cobar, truncation_tower, verify_koszul_duality, DGAlgebra, DGBimodule, Field, GroupModel,
    Verdict,
};
use serde_json::json;

use report::Report;

#[derive(Parser)]
#[command(name = "hochkit", version, about = "Exact Hochschild cohomology and Koszul duality for DG algebras")]
struct Cli {
    /// Print a JSON report instead of a table.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the DG algebra axioms of an algebra file.
    Validate {
        file: PathBuf,
        /// Also check a bimodule file over the algebra.
        #[arg(long)]
        module: Option<PathBuf>,
    },
    /// Cohomology of the reduced bar construction on degrees -N..=N.
    Bar {
        file: PathBuf,
        #[arg(long)]
        max_degree: i64,
    },
    /// Cohomology of the reduced cobar construction of the dual coalgebra.
    Cobar {
        file: PathBuf,
        #[arg(long)]
        max_degree: i64,
    },
    /// Cohomology of the Koszul dual, the dual of the bar construction.
    KoszulDual {
        file: PathBuf,
        #[arg(long)]
        max_degree: i64,
    },
    /// Hochschild cohomology with coefficients in the algebra or a module.
    Hh {
        file: PathBuf,
        #[arg(long)]
        module: Option<PathBuf>,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: (i64, i64),
    },
    /// Hochschild homology with coefficients in the algebra or a module.
    HhHomology {
        file: PathBuf,
        #[arg(long)]
        module: Option<PathBuf>,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: (i64, i64),
    },
    /// Inverse limit of Hochschild cohomology over the truncation tower of
    /// the algebra.
    LimitHh {
        file: PathBuf,
        #[arg(long)]
        stages: usize,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: (i64, i64),
    },
    /// Compare HH* of the exterior and polynomial models of a group.
    VerifyKoszul {
        #[arg(long)]
        group: String,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: (i64, i64),
        #[arg(long, default_value = "q")]
        field: String,
    },
}

fn parse_window(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected LO:HI, got {s:?}"))?;
    let lo: i64 = lo.trim().parse().map_err(|_| format!("bad lower bound in {s:?}"))?;
    let hi: i64 = hi.trim().parse().map_err(|_| format!("bad upper bound in {s:?}"))?;
    if lo > hi {
        return Err(format!("empty window {s:?}"));
    }
    Ok((lo, hi))
}

/// Bad input or usage; exits with code 2. Verification failures are
/// carried by the report verdict instead.
enum Failure {
    Input(String),
}

impl From<hochkit::Error> for Failure {
    fn from(e: hochkit::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_algebra(path: &Path) -> Result<Arc<DGAlgebra>, Failure> {
    let a = parse_algebra(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "A".into());
    let a = a.with_name(name);
    if let Some(v) = a.validate().violation {
        return Err(Failure::Input(format!("{}: {v}", path.display())));
    }
    Ok(Arc::new(a))
}

fn load_module(a: &Arc<DGAlgebra>, path: Option<&Path>) -> Result<Arc<DGBimodule>, Failure> {
    let Some(path) = path else {
        return Ok(Arc::new(DGBimodule::regular(a.clone())));
    };
    let m = parse_bimodule(&read(path)?, a.clone()).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    if let Some(v) = m.validate().violation {
        return Err(Failure::Input(format!("{}: {v}", path.display())));
    }
    Ok(Arc::new(m))
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    match &cli.command {
        Command::Validate { file, module } => {
            let a = load_algebra(file)?;
            load_module(&a, module.as_deref())?;
            let dims = a.basis().space(a.field()).dims();
            let (lo, hi) = (dims.keys().next().copied().unwrap_or(0), dims.keys().last().copied().unwrap_or(0));
            let mut r = Report::new("validate", (lo, hi), dims);
            r.extra.push(("valid".into(), json!(true)));
            Ok(r)
        }
        Command::Bar { file, max_degree } => {
            let a = load_algebra(file)?;
            let w = (-max_degree, *max_degree);
            Ok(Report::new("bar", w, reduced_bar(a, w)?.cohomology_dims()?))
        }
        Command::Cobar { file, max_degree } => {
            let a = load_algebra(file)?;
            let w = (-max_degree, *max_degree);
            let s = Arc::new(dualize_algebra(&a));
            Ok(Report::new("cobar", w, reduced_cobar(s, w)?.cohomology_dims()?))
        }
        Command::KoszulDual { file, max_degree } => {
            let a = load_algebra(file)?;
            let w = (-max_degree, *max_degree);
            Ok(Report::new("koszul-dual", w, koszul_dual(a, w)?.cohomology_dims()?))
        }
        Command::Hh { file, module, window } => {
            let a = load_algebra(file)?;
            let m = load_module(&a, module.as_deref())?;
            let ring = hh_cohomology(a, m, *window)?;
            let mut r = Report::new("hh", *window, ring.dims.clone());
            r.products = report::products(&ring);
            Ok(r)
        }
        Command::HhHomology { file, module, window } => {
            let a = load_algebra(file)?;
            let m = load_module(&a, module.as_deref())?;
            Ok(Report::new("hh-homology", *window, hh_homology(a, m, *window)?.dims()?))
        }
        Command::LimitHh { file, stages, window } => {
            let a = load_algebra(file)?;
            if *stages == 0 {
                return Err(Failure::Input("--stages must be at least 1".into()));
            }
            let tower = truncation_tower(&a, *stages)?;
            let limit = hh_inverse_limit(a, &tower, *window)?;
            let mut r = Report::new("limit-hh", *window, limit.dims());
            if let Some(ring) = &limit.limit {
                r.products = report::products(ring);
            }
            r.unstabilized_degrees = limit.unstabilized_degrees.clone();
            r.verdict = if !limit.mittag_leffler_failures.is_empty() {
                Verdict::Fail
            } else if limit.unstabilized_degrees.is_empty() {
                Verdict::Pass
            } else {
                Verdict::Inconclusive
            };
            r.extra = report::limit_fields(&limit);
            Ok(r)
        }
        Command::VerifyKoszul { group, window, field } => {
            let field: Field = field.parse().map_err(|e: hochkit::Error| Failure::Input(e.to_string()))?;
            let g = GroupModel::builtin(group, field)?;
            Ok(report::verification(&verify_koszul_duality(&g, *window)?))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            if cli.json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.to_table());
                if !report.unstabilized_degrees.is_empty() {
                    println!("unstabilized degrees: {:?}", report.unstabilized_degrees);
                }
                if matches!(cli.command, Command::VerifyKoszul { .. } | Command::LimitHh { .. }) {
                    println!("verdict: {}", report.verdict);
                }
                if report.formality_caveat() {
                    println!("note: over a prime field the formal models may not compute the cochain algebras");
                }
                if let Some(d) = &report.first_discrepancy {
                    println!("first discrepancy: {d}");
                }
            }
            match report.verdict {
                Verdict::Pass => ExitCode::SUCCESS,
                Verdict::Fail => ExitCode::from(1),
                // a limit with unstabilized degrees still returns its partial result
                Verdict::Inconclusive if matches!(cli.command, Command::LimitHh { .. }) => ExitCode::SUCCESS,
                Verdict::Inconclusive => ExitCode::from(1),
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
