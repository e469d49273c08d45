use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use pergraph::band::{compute_bands, effective_mass, gaps, sample_path, spectrum_union, BzGrid};
use pergraph::band::{DEFAULT_GRID, DEFAULT_STEP, FLAT_TOL};
use pergraph::catalog::{generate, CrystalFamily};
use pergraph::estimates::{
    factorization_residual, form_residuals, laplacian_range, perron_ratio, report, FirstBand,
};
use pergraph::graph::PeriodicGraph;
use pergraph::io::{
    bands_csv, emit_graph, load_graph, parse_path, parse_potential, path_csv, sig15, to_json,
};
use pergraph::Error;

#[derive(Parser)]
#[command(name = "pergraph", version, about = "Band spectra of periodic graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a catalog graph as JSON.
    Generate {
        #[command(subcommand)]
        family: Family,
        /// Output file (stdout if omitted).
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Band edges, flat bands and gaps.
    Bands {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        /// Emit the band table as CSV.
        #[arg(long)]
        csv: bool,
        /// Sample eigenvalues along `from..to:steps` instead, e.g. `0,0..pi,pi:32`.
        #[arg(long)]
        path: Option<String>,
    },
    /// Full spectral report as JSON.
    Report {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
    },
    /// Numerical self-checks at random quasimomenta and potentials.
    Check {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Effective mass tensor of the lowest band at θ = 0.
    Mass {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = DEFAULT_STEP)]
        step: f64,
    },
}

#[derive(Subcommand, Clone, Copy)]
enum Family {
    Lattice {
        #[arg(long)]
        d: usize,
    },
    #[command(alias = "star-decorated")]
    Star {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        nu: usize,
    },
    Subdivided {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
    },
    Bcc,
    Fcc,
}

impl From<Family> for CrystalFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::Lattice { d } => CrystalFamily::Lattice { d },
            Family::Star { d, nu } => CrystalFamily::StarDecorated { d, nu },
            Family::Subdivided { d, n } => CrystalFamily::Subdivided { d, n },
            Family::Bcc => CrystalFamily::Bcc,
            Family::Fcc => CrystalFamily::Fcc,
        }
    }
}

#[derive(Args)]
struct Input {
    /// Graph file (JSON).
    graph: PathBuf,
    /// Potential file `{"id": value}`; overrides potentials in the graph file.
    #[arg(long)]
    potential: Option<PathBuf>,
}

enum Failure {
    Input(String),
    Check,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

impl Input {
    fn load(&self) -> Result<(PeriodicGraph, Vec<f64>), Failure> {
        let graph = load_graph(&read(&self.graph)?)?;
        for w in graph.to_fundamental().validate().warnings {
            eprintln!("warning: {w}");
        }
        let q = match &self.potential {
            Some(p) => parse_potential(&read(p)?, &graph)?,
            None => graph.potential().to_vec(),
        };
        Ok((graph, q))
    }
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("PERGRAPH_THREADS") {
        let n: usize = v.parse().map_err(|_| {
            Failure::Input(format!("PERGRAPH_THREADS must be an integer, got '{v}'"))
        })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Input(e.to_string()))?;
    }
    Ok(())
}

fn write_out(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn bands(input: &Input, grid: usize, csv: bool, path: Option<&str>) -> Result<(), Failure> {
    let (g, q) = input.load()?;
    if let Some(spec) = path {
        let spec = parse_path(spec)?;
        let samples = sample_path(&g, &q, &spec.from, &spec.to, spec.steps)?;
        print!("{}", path_csv(&samples));
        return Ok(());
    }
    let b = compute_bands(&g, &q, &BzGrid::new(g.dim(), grid)?, FLAT_TOL)?;
    if csv {
        print!("{}", bands_csv(&b));
        return Ok(());
    }
    for (n, band) in b.bands.iter().enumerate() {
        println!(
            "band {}: [{}, {}]",
            n + 1,
            sig15(band.lower),
            sig15(band.upper)
        );
    }
    for f in &b.flat_bands {
        println!("flat: {} multiplicity {}", sig15(f.value), f.multiplicity);
    }
    println!("measure: {}", sig15(spectrum_union(&b).measure));
    for gap in gaps(&b) {
        println!("gap: ({}, {})", sig15(gap.lower), sig15(gap.upper));
    }
    Ok(())
}

fn line(ok: bool, name: &str, detail: String) -> bool {
    println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn check(input: &Input, grid: usize, trials: usize, seed: u64) -> Result<(), Failure> {
    let (g, _) = input.load()?;
    let (d, nu) = (g.dim(), g.order());
    let mut rng = StdRng::seed_from_u64(seed);
    let mut theta = || -> Vec<f64> {
        (0..d)
            .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
            .collect()
    };
    let thetas: Vec<Vec<f64>> = (0..trials).map(|_| theta()).collect();

    let mut all = true;
    let mut worst = 0.0f64;
    for t in &thetas {
        worst = worst.max(factorization_residual(&g, t)?);
    }
    all &= line(
        worst < 1e-12,
        "factorization",
        format!("max residual {}", sig15(worst)),
    );

    let (mut lap, mut weighted) = (0.0f64, 0.0f64);
    for t in &thetas {
        let q: Vec<f64> = (0..nu).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f: Vec<Complex64> = (0..nu)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let r = form_residuals(&g, &q, t, &f)?;
        lap = lap.max(r.laplacian);
        weighted = weighted.max(r.weighted);
    }
    all &= line(
        lap < 1e-10,
        "quadratic_form",
        format!("max relative error {}", sig15(lap)),
    );
    all &= line(
        weighted < 1e-10,
        "weighted_form",
        format!("max relative error {}", sig15(weighted)),
    );

    let grid = BzGrid::new(d, grid)?;
    let (lo, hi) = laplacian_range(&g, &grid)?;
    all &= line(
        lo >= -1e-10 && hi <= 2.0 + 1e-10,
        "laplacian_range",
        format!("[{}, {}]", sig15(lo), sig15(hi)),
    );

    let laplacian = compute_bands(&g, &vec![0.0; nu], &grid, FLAT_TOL)?;
    let mut failures = 0;
    for _ in 0..trials {
        let q: Vec<f64> = (0..nu).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let c0 = perron_ratio(&g, &q)?.c0;
        let b = compute_bands(&g, &q, &grid, FLAT_TOL)?;
        if !FirstBand::from_bands(c0, &b, &laplacian).holds {
            failures += 1;
        }
    }
    all &= line(
        failures == 0,
        "first_band",
        format!("{failures} of {trials} trials violated"),
    );

    if all {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Generate { family, output } => {
            let g = generate(family.into())?;
            write_out(output.as_deref(), &emit_graph(&g))
        }
        Command::Bands {
            input,
            grid,
            csv,
            path,
        } => bands(&input, grid, csv, path.as_deref()),
        Command::Report { input, grid } => {
            let (g, q) = input.load()?;
            let r = report(&g, &q, &BzGrid::new(g.dim(), grid)?)?;
            print!("{}", to_json(&r)?);
            Ok(())
        }
        Command::Check {
            input,
            grid,
            trials,
            seed,
        } => check(&input, grid, trials, seed),
        Command::Mass { input, step } => {
            let (g, q) = input.load()?;
            let m = effective_mass(&g, &q, step)?;
            print!("{}", to_json(&m)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
