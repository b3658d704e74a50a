//! Argument handling and report emission for the `qamlab` binary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use qamlab::diagnostics::phi_diagnostics;
use qamlab::qam::DEFAULT_TOLERANCE;
use qamlab::suite::{run_suite, SuiteConfig, TrialRecord};
use qamlab::witness::{block_witness_search, full_witness_search, DEFAULT_THRESHOLD};
use qamlab::{
    commutation_residual, Error, Generator, GeneratorDocument, GridSpec, Interval, MatrixDocument, ProductGrid,
    SearchOptions, SimpleFunctionMatrix, SpaceDocument,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_RANGE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "qamlab", version, about = "Commutation checks for quasi-arithmetic means")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Evaluate both mixed means on one simple function.
    Check,
    /// Search a value grid for a simple function on which the means differ.
    Witness,
    /// Run the seeded property suites for both theorem settings.
    Suite,
    /// Report every phi-reduction diagnostic for the pair.
    Phi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Options {
    /// Outer generator: a JSON file or an inline JSON document.
    #[arg(long, global = true)]
    pub f: Option<String>,
    /// Inner generator: a JSON file or an inline JSON document.
    #[arg(long, global = true)]
    pub g: Option<String>,
    /// Space X (rows of h). Defaults to two atoms of mass 1.
    #[arg(long = "space-x", global = true)]
    pub space_x: Option<String>,
    /// Space Y (columns of h). Defaults to two atoms of mass 1.
    #[arg(long = "space-y", global = true)]
    pub space_y: Option<String>,
    /// Simple function for `check`; drawn from the seed when absent.
    #[arg(long, global = true)]
    pub h: Option<String>,
    /// Number of grid values for `witness`.
    #[arg(long, default_value_t = 21, global = true)]
    pub grid: usize,
    /// Grid range LO:HI; geometric when LO > 0, linear otherwise.
    #[arg(long, default_value = "0.1:10", global = true)]
    pub range: String,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE, global = true)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD, global = true)]
    pub threshold: f64,
    #[arg(long, default_value_t = 42, global = true)]
    pub seed: u64,
    /// Worker threads for searches; the global pool when absent.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Search full value matrices on the given spaces instead of blocks.
    #[arg(long, global = true)]
    pub matrix: bool,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
}

/// Parsed and validated inputs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub f: Option<GeneratorDocument>,
    pub g: Option<GeneratorDocument>,
    pub space_x: SpaceDocument,
    pub space_y: SpaceDocument,
    pub h: Option<MatrixDocument>,
    pub grid_points: usize,
    pub range: (f64, f64),
    pub tol: f64,
    pub threshold: f64,
    pub seed: u64,
    pub workers: Option<usize>,
    pub matrix: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsvRow {
    pub check: String,
    pub pair: String,
    pub masses: String,
    pub case_id: usize,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub abs_residual: Option<f64>,
    pub rel_residual: Option<f64>,
    pub pass: bool,
}

impl From<TrialRecord> for CsvRow {
    fn from(r: TrialRecord) -> Self {
        Self {
            check: r.check,
            pair: r.pair,
            masses: r.masses,
            case_id: r.case_id,
            lhs: Some(r.lhs),
            rhs: Some(r.rhs),
            abs_residual: Some(r.abs_residual),
            rel_residual: Some(r.rel_residual),
            pass: r.pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
    pub rows: Vec<CsvRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
    pub stage: Option<String>,
}

impl Failure {
    fn malformed(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_MALFORMED,
            message: message.into(),
            stage: None,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": self.message, "stage": self.stage, "exit_code": self.code })
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Input(_) | Error::Domain { .. } => EXIT_MALFORMED,
            Error::Range { .. } | Error::NonFinite { .. } => EXIT_RANGE,
        };
        Self {
            code,
            stage: e.stage().map(|s| s.as_str().to_string()),
            message: e.to_string(),
        }
    }
}

fn load<T: serde::de::DeserializeOwned>(what: &str, arg: &str) -> Result<T, Failure> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(Path::new(arg)).map_err(|e| Failure::malformed(format!("cannot read {what} {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::malformed(format!("malformed {what} document: {e}")))
}

fn parse_range(s: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::malformed(format!("range must be LO:HI, got {s}"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn unit_space() -> SpaceDocument {
    SpaceDocument {
        weights: vec![1.0, 1.0],
        labels: None,
    }
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, Failure> {
        let o = &cli.options;
        if !(o.tol > 0.0 && o.tol.is_finite()) {
            return Err(Failure::malformed("tolerance must be positive"));
        }
        if !(o.threshold >= 0.0 && o.threshold.is_finite()) {
            return Err(Failure::malformed("threshold must be non-negative"));
        }
        Ok(Self {
            command: cli.command,
            f: o.f.as_deref().map(|s| load("generator f", s)).transpose()?,
            g: o.g.as_deref().map(|s| load("generator g", s)).transpose()?,
            space_x: o.space_x.as_deref().map(|s| load("space X", s)).transpose()?.unwrap_or_else(unit_space),
            space_y: o.space_y.as_deref().map(|s| load("space Y", s)).transpose()?.unwrap_or_else(unit_space),
            h: o.h.as_deref().map(|s| load("simple function", s)).transpose()?,
            grid_points: o.grid,
            range: parse_range(&o.range)?,
            tol: o.tol,
            threshold: o.threshold,
            seed: o.seed,
            workers: o.workers,
            matrix: o.matrix,
        })
    }

    fn pair(&self) -> Result<(Generator<f64>, Generator<f64>), Failure> {
        let need = |d: &Option<GeneratorDocument>, name: &str| {
            d.as_ref()
                .ok_or_else(|| Failure::malformed(format!("--{name} is required")))
                .and_then(|d| d.to_generator::<f64>().map_err(Failure::from))
        };
        Ok((need(&self.f, "f")?, need(&self.g, "g")?))
    }

    fn spaces(&self) -> Result<ProductGrid<f64>, Failure> {
        Ok(ProductGrid::new(self.space_x.to_space()?, self.space_y.to_space()?))
    }

    fn grid_spec(&self) -> Result<GridSpec<f64>, Failure> {
        let (lo, hi) = self.range;
        Ok(if lo > 0.0 {
            GridSpec::geometric(self.grid_points, lo, hi)?
        } else {
            GridSpec::linear(self.grid_points, lo, hi)?
        })
    }
}

/// Sampling window for random simple functions inside the common domain.
fn sampling_window(f: &Generator<f64>, g: &Generator<f64>) -> Result<(f64, f64), Failure> {
    let d: Interval<f64> = f
        .domain()
        .intersect(&g.domain())
        .ok_or_else(|| Failure::malformed("the generators have disjoint domains"))?;
    Ok(match (d.lower.is_finite(), d.upper.is_finite()) {
        (true, true) => {
            let w = d.upper - d.lower;
            (d.lower + 0.1 * w, d.upper - 0.1 * w)
        }
        (true, false) => (d.lower + 0.1, d.lower + 5.0),
        (false, true) => (d.upper - 5.0, d.upper - 0.1),
        (false, false) => (-2.0, 2.0),
    })
}

fn random_matrix(rows: usize, cols: usize, window: (f64, f64), seed: u64) -> SimpleFunctionMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vals = (0..rows * cols).map(|_| rng.gen_range(window.0..window.1)).collect();
    SimpleFunctionMatrix::from_row_major(rows, cols, vals).expect("shape")
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serialisable")
}

fn masses_label(grid: &ProductGrid<f64>) -> String {
    let j = |w: &[f64]| w.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(";");
    format!("[{}]x[{}]", j(grid.space_x.weights()), j(grid.space_y.weights()))
}

pub fn dispatch(cfg: &RunConfig) -> Result<Outcome, Failure> {
    match cfg.command {
        Command::Check => check(cfg),
        Command::Witness => witness(cfg),
        Command::Suite => suite(cfg),
        Command::Phi => phi(cfg),
    }
}

fn check(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let (f, g) = cfg.pair()?;
    let spaces = cfg.spaces()?;
    let (rows, cols) = spaces.shape();
    let h = match &cfg.h {
        Some(doc) => doc.to_matrix::<f64>()?,
        None => random_matrix(rows, cols, sampling_window(&f, &g)?, cfg.seed),
    };
    let r = commutation_residual(&f, &g, &spaces, &h)?;
    let pass = r.passes(cfg.tol);
    let pair = format!("{f} vs {g}");
    Ok(Outcome {
        code: if pass { EXIT_OK } else { EXIT_NEGATIVE },
        report: json!({
            "command": "check",
            "inputs": {
                "f": f.to_document(),
                "g": g.to_document(),
                "space_x": cfg.space_x,
                "space_y": cfg.space_y,
                "h": h.to_document(),
                "tol": cfg.tol,
                "seed": cfg.seed,
            },
            "report": r,
            "pass": pass,
        }),
        rows: vec![CsvRow {
            check: "check".into(),
            pair,
            masses: masses_label(&spaces),
            case_id: 0,
            lhs: Some(r.lhs),
            rhs: Some(r.rhs),
            abs_residual: Some(r.abs_residual),
            rel_residual: Some(r.rel_residual),
            pass,
        }],
    })
}

fn witness(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let (f, g) = cfg.pair()?;
    let spaces = cfg.spaces()?;
    let grid = cfg.grid_spec()?;
    let opts = SearchOptions {
        threshold: cfg.threshold,
        workers: cfg.workers,
    };
    let found = if cfg.matrix {
        full_witness_search(&f, &g, spaces.shape(), &spaces, &grid, &opts)?
    } else {
        let alpha = spaces.space_x.split_first()?;
        let beta = spaces.space_y.split_first()?;
        block_witness_search(&f, &g, alpha, beta, &grid, &opts)?
    };
    let inputs = json!({
        "f": f.to_document(),
        "g": g.to_document(),
        "space_x": cfg.space_x,
        "space_y": cfg.space_y,
        "grid": cfg.grid_points,
        "range": [cfg.range.0, cfg.range.1],
        "threshold": cfg.threshold,
        "matrix": cfg.matrix,
    });
    let pair = format!("{f} vs {g}");
    Ok(match found {
        Some(w) => {
            let r = w.report;
            Outcome {
                code: EXIT_NEGATIVE,
                report: json!({ "command": "witness", "inputs": inputs, "witness": w.to_document() }),
                rows: vec![CsvRow {
                    check: "witness".into(),
                    pair,
                    masses: masses_label(&spaces),
                    case_id: 0,
                    lhs: Some(r.lhs),
                    rhs: Some(r.rhs),
                    abs_residual: Some(r.abs_residual),
                    rel_residual: Some(r.rel_residual),
                    pass: false,
                }],
            }
        }
        None => Outcome {
            code: EXIT_OK,
            report: json!({ "command": "witness", "inputs": inputs, "witness": { "kind": "none" } }),
            rows: Vec::new(),
        },
    })
}

fn suite(cfg: &RunConfig) -> Result<Outcome, Failure> {
    if cfg.grid_points < 2 {
        return Err(Failure::malformed("the witness grid needs at least 2 points"));
    }
    let report = run_suite(&SuiteConfig {
        seed: cfg.seed,
        tolerance: cfg.tol,
        threshold: cfg.threshold,
        witness_grid_points: cfg.grid_points,
        workers: cfg.workers,
        ..SuiteConfig::default()
    });
    Ok(Outcome {
        code: if report.pass { EXIT_OK } else { EXIT_NEGATIVE },
        report: json!({
            "command": "suite",
            "inputs": { "seed": cfg.seed, "tol": cfg.tol, "threshold": cfg.threshold, "grid": cfg.grid_points },
            "report": to_value(&report),
        }),
        rows: report.records.into_iter().map(CsvRow::from).collect(),
    })
}

fn phi(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let (f, g) = cfg.pair()?;
    let spaces = cfg.spaces()?;
    let alpha = spaces.space_x.split_first()?;
    let beta = spaces.space_y.split_first()?;
    let diags = phi_diagnostics(&f, &g, alpha, beta, cfg.tol)?;
    let pair = format!("{f} vs {g}");
    let masses = format!("[{};{}]x[{};{}]", alpha.0, alpha.1, beta.0, beta.1);
    let rows = diags
        .iter()
        .enumerate()
        .map(|(i, d)| CsvRow {
            check: d.name.clone(),
            pair: pair.clone(),
            masses: masses.clone(),
            case_id: i,
            lhs: d.lhs,
            rhs: d.rhs,
            abs_residual: d.abs_residual,
            rel_residual: d.rel_residual,
            pass: d.pass,
        })
        .collect();
    Ok(Outcome {
        code: EXIT_OK,
        report: json!({
            "command": "phi",
            "inputs": {
                "f": f.to_document(),
                "g": g.to_document(),
                "space_x": cfg.space_x,
                "space_y": cfg.space_y,
                "tol": cfg.tol,
            },
            "diagnostics": to_value(&diags),
            "all_pass": diags.iter().all(|d| d.pass),
        }),
        rows,
    })
}

pub fn render(outcome: &Outcome, format: Format) -> Result<Vec<u8>, Failure> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_vec_pretty(&outcome.report).expect("serialisable");
            s.push(b'\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            if outcome.rows.is_empty() {
                w.write_record(["check", "pair", "masses", "case_id", "lhs", "rhs", "abs_residual", "rel_residual", "pass"])
                    .map_err(|e| Failure::malformed(e.to_string()))?;
            }
            for row in &outcome.rows {
                w.serialize(row).map_err(|e| Failure::malformed(e.to_string()))?;
            }
            w.into_inner().map_err(|e| Failure::malformed(e.to_string()))
        }
    }
}

/// Runs one invocation and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = RunConfig::from_cli(cli)
        .and_then(|cfg| dispatch(&cfg))
        .and_then(|outcome| render(&outcome, cli.options.format).map(|bytes| (outcome.code, bytes)));
    match result {
        Ok((code, bytes)) => {
            let written = match &cli.options.out {
                Some(path) => fs::write(path, &bytes),
                None => std::io::stdout().write_all(&bytes),
            };
            match written {
                Ok(()) => code,
                Err(e) => {
                    eprintln!("{}", Failure::malformed(format!("cannot write output: {e}")).to_json());
                    EXIT_MALFORMED
                }
            }
        }
        Err(fail) => {
            eprintln!("{}", fail.to_json());
            fail.code
        }
    }
}
