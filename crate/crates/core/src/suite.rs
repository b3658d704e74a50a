//! Seeded property suites for both theorem settings.
//!
//! The "if" checks draw random spaces and simple functions and confirm that
//! equivalent generator pairs commute. The "only if" checks run the block
//! witness search on inequivalent pairs and confirm a violation is found.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::generators::Generator;
use crate::measure_space::{DiscreteMeasureSpace, ProductGrid};
use crate::qam::{commutation_residual, SimpleFunctionMatrix};
use crate::witness::{block_witness_search, GridSpec, SearchOptions};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Relative residual below which an "if" trial passes.
    pub tolerance: f64,
    /// Witness threshold for the "only if" searches.
    pub threshold: f64,
    pub theorem1_trials: usize,
    /// Random space pairs per (generator, scale) combination.
    pub theorem2_space_pairs: usize,
    pub functions_per_space_pair: usize,
    pub witness_grid_points: usize,
    pub workers: Option<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            tolerance: 1e-8,
            threshold: 1e-4,
            theorem1_trials: 1000,
            theorem2_space_pairs: 200,
            functions_per_space_pair: 5,
            witness_grid_points: 21,
            workers: None,
        }
    }
}

/// One evaluated case; one CSV row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub check: String,
    pub pair: String,
    pub masses: String,
    pub case_id: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub errors: usize,
    pub max_rel_residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub tolerance: f64,
    pub threshold: f64,
    pub checks: Vec<CheckSummary>,
    #[serde(skip)]
    pub records: Vec<TrialRecord>,
    pub pass: bool,
}

/// Strictly positive weights on 2 to 4 atoms, rescaled to `mass`.
pub fn random_space<R: Rng>(rng: &mut R, mass: f64) -> DiscreteMeasureSpace<f64> {
    let n = rng.gen_range(2..=4);
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    DiscreteMeasureSpace::new(raw.iter().map(|w| w / total * mass).collect()).expect("positive weights")
}

/// Total mass drawn from `[0.2, 5]` avoiding a neighbourhood of 1.
pub fn random_non_probability_mass<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let m: f64 = rng.gen_range(0.2..=5.0);
        if (m - 1.0).abs() > 1e-3 {
            return m;
        }
    }
}

/// Values drawn from a range inside the generator domain: `[-2, 2]` on the
/// real line, `[0.1, 5]` on the half-line.
pub fn random_values<R: Rng>(rng: &mut R, gen: &Generator<f64>, rows: usize, cols: usize) -> SimpleFunctionMatrix<f64> {
    let (lo, hi) = if gen.domain().lower.is_finite() { (0.1, 5.0) } else { (-2.0, 2.0) };
    let vals = (0..rows * cols).map(|_| rng.gen_range(lo..hi)).collect();
    SimpleFunctionMatrix::from_row_major(rows, cols, vals).expect("shape")
}

fn fmt_masses(grid: &ProductGrid<f64>) -> String {
    let j = |s: &DiscreteMeasureSpace<f64>| {
        s.weights().iter().map(|w| format!("{w:.6}")).collect::<Vec<_>>().join(";")
    };
    format!("[{}]x[{}]", j(&grid.space_x), j(&grid.space_y))
}

struct Tally {
    name: String,
    cases: usize,
    failures: usize,
    errors: usize,
    max_rel: f64,
}

impl Tally {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            cases: 0,
            failures: 0,
            errors: 0,
            max_rel: 0.0,
        }
    }

    fn finish(self) -> CheckSummary {
        CheckSummary {
            pass: self.failures == 0 && self.errors == 0,
            name: self.name,
            cases: self.cases,
            failures: self.failures,
            errors: self.errors,
            max_rel_residual: self.max_rel,
        }
    }
}

fn theorem2_catalog() -> Vec<Generator<f64>> {
    let mut v: Vec<_> = [-1.0, 1.0, 2.0].iter().map(|&k| Generator::exp(k).unwrap()).collect();
    v.extend([-1.0, 0.5, 2.0].iter().map(|&p| Generator::power(p).unwrap()));
    v
}

fn theorem1_catalog() -> Vec<Generator<f64>> {
    vec![
        Generator::identity(),
        Generator::log(),
        Generator::exp(1.0).unwrap(),
        Generator::power(2.0).unwrap(),
    ]
}

/// Finite measures, `f = c g` with `g` onto `(0, inf)`.
fn theorem2_if(cfg: &SuiteConfig, rng: &mut ChaCha8Rng, records: &mut Vec<TrialRecord>) -> CheckSummary {
    let mut t = Tally::new("theorem2_if");
    let mut case_id = 0;
    for g in theorem2_catalog() {
        for c in [0.5, 2.0, 10.0] {
            let f = g.scale(c).expect("positive scale");
            let pair = format!("{f} vs {g}");
            for _ in 0..cfg.theorem2_space_pairs {
                let mx = random_non_probability_mass(rng);
                let my = random_non_probability_mass(rng);
                let grid = ProductGrid::new(random_space(rng, mx), random_space(rng, my));
                for _ in 0..cfg.functions_per_space_pair {
                    let (r, c_) = grid.shape();
                    let h = random_values(rng, &g, r, c_);
                    t.cases += 1;
                    record(&mut t, records, "theorem2_if", &pair, &grid, case_id, commutation_residual(&f, &g, &grid, &h), cfg.tolerance);
                    case_id += 1;
                }
            }
        }
    }
    t.finish()
}

/// Probability spaces, `f = a g + b`.
fn theorem1_if(cfg: &SuiteConfig, rng: &mut ChaCha8Rng, records: &mut Vec<TrialRecord>) -> CheckSummary {
    let mut t = Tally::new("theorem1_if");
    let gens = theorem1_catalog();
    let combos: Vec<(usize, f64, f64)> = (0..gens.len())
        .flat_map(|gi| [-2.0, 0.5, 3.0].into_iter().flat_map(move |a| [-1.0, 0.0, 4.0].into_iter().map(move |b| (gi, a, b))))
        .collect();
    for case_id in 0..cfg.theorem1_trials {
        let (gi, a, b) = combos[case_id % combos.len()];
        let g = &gens[gi];
        let f = g.affine(a, b).expect("non-zero slope");
        let grid = ProductGrid::new(random_space(rng, 1.0), random_space(rng, 1.0));
        let (r, c) = grid.shape();
        let h = random_values(rng, g, r, c);
        t.cases += 1;
        record(&mut t, records, "theorem1_if", &format!("{f} vs {g}"), &grid, case_id, commutation_residual(&f, g, &grid, &h), cfg.tolerance);
    }
    t.finish()
}

#[allow(clippy::too_many_arguments)]
fn record(
    t: &mut Tally,
    records: &mut Vec<TrialRecord>,
    check: &str,
    pair: &str,
    grid: &ProductGrid<f64>,
    case_id: usize,
    r: Result<crate::qam::ResidualReport<f64>>,
    tol: f64,
) {
    match r {
        Ok(r) => {
            let pass = r.passes(tol);
            if !pass {
                t.failures += 1;
            }
            t.max_rel = t.max_rel.max(r.rel_residual);
            records.push(TrialRecord {
                check: check.to_string(),
                pair: pair.to_string(),
                masses: fmt_masses(grid),
                case_id,
                lhs: r.lhs,
                rhs: r.rhs,
                abs_residual: r.abs_residual,
                rel_residual: r.rel_residual,
                pass,
            });
        }
        Err(_) => t.errors += 1,
    }
}

/// `(f, g, alpha, beta, grid)` for one block search.
type SearchCase = (Generator<f64>, Generator<f64>, (f64, f64), (f64, f64), GridSpec<f64>);

/// Block searches on inequivalent pairs must each return a witness.
fn only_if(
    name: &str,
    cfg: &SuiteConfig,
    cases: &[SearchCase],
    records: &mut Vec<TrialRecord>,
) -> CheckSummary {
    let mut t = Tally::new(name);
    let opts = SearchOptions {
        threshold: cfg.threshold,
        workers: cfg.workers,
    };
    for (case_id, (f, g, alpha, beta, grid)) in cases.iter().enumerate() {
        t.cases += 1;
        match block_witness_search(f, g, *alpha, *beta, grid, &opts) {
            Ok(Some(w)) => {
                t.max_rel = t.max_rel.max(w.report.rel_residual);
                records.push(TrialRecord {
                    check: name.to_string(),
                    pair: format!("{f} vs {g}"),
                    masses: format!("[{};{}]x[{};{}]", alpha.0, alpha.1, beta.0, beta.1),
                    case_id,
                    lhs: w.report.lhs,
                    rhs: w.report.rhs,
                    abs_residual: w.report.abs_residual,
                    rel_residual: w.report.rel_residual,
                    pass: true,
                });
            }
            Ok(None) => t.failures += 1,
            Err(_) => t.errors += 1,
        }
    }
    t.finish()
}

pub fn run_suite(cfg: &SuiteConfig) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut records = Vec::new();
    let mut checks = vec![
        theorem1_if(cfg, &mut rng, &mut records),
        theorem2_if(cfg, &mut rng, &mut records),
    ];

    let n = cfg.witness_grid_points;
    let geo = GridSpec::geometric(n, 0.1, 10.0).expect("valid grid");
    let e = |k: f64| Generator::exp(k).unwrap();
    let p = |q: f64| Generator::power(q).unwrap();
    checks.push(only_if(
        "theorem2_only_if",
        cfg,
        &[
            (e(1.0), e(2.0), (1.0, 1.0), (1.0, 1.0), geo.clone()),
            (p(1.0), p(2.0), (1.0, 1.0), (1.0, 1.0), geo.clone()),
            (e(1.0), p(1.0), (1.0, 1.0), (1.0, 1.0), geo.clone()),
            (e(-1.0), e(1.0), (2.0, 0.5), (0.3, 3.0), geo.clone()),
        ],
        &mut records,
    ));
    let lin = GridSpec::linear(n, -2.0, 2.0).expect("valid grid");
    checks.push(only_if(
        "theorem1_only_if",
        cfg,
        &[
            (e(1.0), Generator::identity(), (0.5, 0.5), (0.5, 0.5), lin.clone()),
            (e(1.0), e(2.0), (0.3, 0.7), (0.6, 0.4), lin),
            (Generator::log(), p(2.0), (0.25, 0.75), (0.5, 0.5), geo),
        ],
        &mut records,
    ));

    let pass = checks.iter().all(|c| c.pass);
    SuiteReport {
        seed: cfg.seed,
        tolerance: cfg.tolerance,
        threshold: cfg.threshold,
        checks,
        records,
        pass,
    }
}
