//! Search for simple functions on which two mixed means disagree.
//!
//! Both searches enumerate every assignment of grid values to the blocks (or
//! matrix entries) and keep the assignment with the largest relative
//! residual. The index tuples are ordered lexicographically, first coordinate
//! most significant, and ties go to the smallest tuple. Work is split into
//! contiguous chunks of that order; each chunk reports its own best and the
//! chunks are merged with the same rule, so the answer does not depend on how
//! many workers ran or in which order they finished.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::generators::{Generator, Interval};
use crate::measure_space::ProductGrid;
use crate::phi::{block_scenario_residual, geometric_points, BlockScenario, Pair};
use crate::qam::{commutation_residual, ResidualReport, SimpleFunctionMatrix};
use crate::scalar::Scalar;

pub const DEFAULT_THRESHOLD: f64 = 1e-4;
/// Largest number of value assignments a full matrix search may visit.
pub const MAX_EVALUATIONS: u64 = 10_000_000;
/// Refinement ignores gains smaller than this; they are rounding noise.
pub const IMPROVEMENT_FLOOR: f64 = 1e-12;

/// Values tried for each block or matrix entry.
#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec<T> {
    Linear { points: usize, lo: T, hi: T },
    Geometric { points: usize, lo: T, hi: T },
    Explicit(Vec<T>),
}

impl<T: Scalar> GridSpec<T> {
    pub fn linear(points: usize, lo: T, hi: T) -> Result<Self> {
        check_range(points, lo, hi)?;
        Ok(GridSpec::Linear { points, lo, hi })
    }

    pub fn geometric(points: usize, lo: T, hi: T) -> Result<Self> {
        check_range(points, lo, hi)?;
        if !(lo > T::zero()) {
            return Err(Error::input(format!("a geometric grid needs a positive lower end, got {lo}")));
        }
        Ok(GridSpec::Geometric { points, lo, hi })
    }

    /// An explicit list of distinct finite values, kept in the given order.
    pub fn explicit(values: Vec<T>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::input("a value grid needs at least two points"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("grid values must be finite"));
        }
        for (i, a) in values.iter().enumerate() {
            if values[..i].contains(a) {
                return Err(Error::input(format!("duplicate grid value {a}")));
            }
        }
        Ok(GridSpec::Explicit(values))
    }

    pub fn points(&self) -> Vec<T> {
        match self {
            GridSpec::Linear { points, lo, hi } => {
                let n = *points;
                (0..n)
                    .map(|i| {
                        if i == n - 1 {
                            *hi
                        } else {
                            *lo + (*hi - *lo) * T::lit(i as f64 / (n - 1) as f64)
                        }
                    })
                    .collect()
            }
            GridSpec::Geometric { points, lo, hi } => geometric_points(*lo, *hi, *points),
            GridSpec::Explicit(v) => v.clone(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            GridSpec::Linear { points, .. } | GridSpec::Geometric { points, .. } => *points,
            GridSpec::Explicit(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn check_range<T: Scalar>(points: usize, lo: T, hi: T) -> Result<()> {
    if points < 2 {
        return Err(Error::input("a value grid needs at least two points per axis"));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::input(format!("invalid grid range {lo}:{hi}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions<T> {
    /// A witness is reported only when its relative residual exceeds this.
    pub threshold: T,
    /// Worker threads; `None` uses the global pool, `Some(1)` runs inline.
    pub workers: Option<usize>,
}

impl<T: Scalar> Default for SearchOptions<T> {
    fn default() -> Self {
        Self {
            threshold: T::lit(DEFAULT_THRESHOLD),
            workers: None,
        }
    }
}

impl<T: Scalar> SearchOptions<T> {
    pub fn with_threshold(threshold: T) -> Self {
        Self {
            threshold,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WitnessSubject<T> {
    Block(BlockScenario<T>),
    Matrix {
        grid: ProductGrid<T>,
        h: SimpleFunctionMatrix<T>,
    },
}

impl<T: Scalar> WitnessSubject<T> {
    fn values(&self) -> Vec<T> {
        match self {
            WitnessSubject::Block(sc) => sc.values().to_vec(),
            WitnessSubject::Matrix { h, .. } => h.values().to_vec(),
        }
    }

    fn with_values(&self, values: &[T]) -> Self {
        match self {
            WitnessSubject::Block(sc) => {
                WitnessSubject::Block(sc.with_values([values[0], values[1], values[2], values[3]]))
            }
            WitnessSubject::Matrix { grid, h } => {
                let (r, c) = h.shape();
                WitnessSubject::Matrix {
                    grid: grid.clone(),
                    h: SimpleFunctionMatrix::from_row_major(r, c, values.to_vec()).expect("same shape"),
                }
            }
        }
    }

    /// Residual through the route native to the subject: the closed block
    /// formula for blocks, the nested means for matrices.
    fn residual(&self, f: &Generator<T>, g: &Generator<T>) -> Result<ResidualReport<T>> {
        match self {
            WitnessSubject::Block(sc) => block_scenario_residual(f, g, sc),
            WitnessSubject::Matrix { grid, h } => commutation_residual(f, g, grid, h),
        }
    }
}

/// A simple function on which the two mixed means differ.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness<T> {
    pub subject: WitnessSubject<T>,
    pub report: ResidualReport<T>,
    /// Grid points skipped during the search because evaluation failed.
    pub skipped_points: usize,
}

impl<T: Scalar> Witness<T> {
    /// Evaluates `subject` and wraps it, with no threshold applied.
    pub fn evaluate(f: &Generator<T>, g: &Generator<T>, subject: WitnessSubject<T>) -> Result<Self> {
        let report = subject.residual(f, g)?;
        Ok(Self {
            subject,
            report,
            skipped_points: 0,
        })
    }

    /// Re-evaluates the witness through the nested-mean route on its grid
    /// and matrix form, independent of how it was found.
    pub fn recheck(&self, f: &Generator<T>, g: &Generator<T>) -> Result<ResidualReport<T>> {
        match &self.subject {
            WitnessSubject::Block(sc) => {
                let (grid, h) = sc.to_grid_and_matrix();
                commutation_residual(f, g, &grid, &h)
            }
            WitnessSubject::Matrix { grid, h } => commutation_residual(f, g, grid, h),
        }
    }

    pub fn to_document(&self) -> WitnessDocument {
        let f64s = |v: &[T]| v.iter().map(|x| x.as_f64()).collect::<Vec<_>>();
        let (kind, masses, values) = match &self.subject {
            WitnessSubject::Block(sc) => ("block", json!(f64s(&sc.masses())), json!(f64s(&sc.values()))),
            WitnessSubject::Matrix { grid, h } => (
                "matrix",
                json!([f64s(grid.space_x.weights()), f64s(grid.space_y.weights())]),
                json!(h.to_document().values),
            ),
        };
        WitnessDocument {
            kind: kind.to_string(),
            masses,
            values,
            lhs: self.report.lhs.as_f64(),
            rhs: self.report.rhs.as_f64(),
            abs_residual: self.report.abs_residual.as_f64(),
            rel_residual: self.report.rel_residual.as_f64(),
            skipped_points: self.skipped_points,
        }
    }
}

/// JSON form of a witness. For blocks `masses` is `[a1, a2, b1, b2]` and
/// `values` is `[x, y, z, w]`; for matrices `masses` is `[[X weights], [Y
/// weights]]` and `values` the row-major value matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessDocument {
    pub kind: String,
    pub masses: Value,
    pub values: Value,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub skipped_points: usize,
}

/// Best residual over a range of linear indices: (rel residual, index).
type Best<T> = Option<(T, u64)>;

fn better<T: Scalar>(a: Best<T>, b: Best<T>) -> Best<T> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some((ra, ia)), Some((rb, ib))) => {
            if ra > rb || (ra == rb && ia < ib) {
                Some((ra, ia))
            } else {
                Some((rb, ib))
            }
        }
    }
}

/// Mixed-radix digits of `index`, most significant first.
fn digits(mut index: u64, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = (index % base as u64) as usize;
        index /= base as u64;
    }
    out
}

/// Exhaustive maximisation of `score` over `base^len` index tuples.
/// `score` returns `None` for tuples that cannot be evaluated.
fn exhaustive_max<T, F>(base: usize, len: usize, workers: Option<usize>, score: F) -> Result<(Best<T>, usize)>
where
    T: Scalar,
    F: Fn(&[usize]) -> Option<T> + Sync,
{
    let total = (base as u64)
        .checked_pow(len as u32)
        .ok_or_else(|| Error::input("search space size overflows"))?;
    let scan = |start: u64, end: u64| -> (Best<T>, usize) {
        let mut best: Best<T> = None;
        let mut skipped = 0;
        let mut idx = digits(start, base, len);
        for linear in start..end {
            match score(&idx) {
                Some(r) if r.is_finite() => {
                    if best.is_none_or(|(b, _)| r > b) {
                        best = Some((r, linear));
                    }
                }
                _ => skipped += 1,
            }
            // odometer increment
            for d in idx.iter_mut().rev() {
                *d += 1;
                if *d < base {
                    break;
                }
                *d = 0;
            }
        }
        (best, skipped)
    };
    let merge = |a: (Best<T>, usize), b: (Best<T>, usize)| (better(a.0, b.0), a.1 + b.1);

    if workers == Some(1) {
        return Ok(scan(0, total));
    }
    const CHUNKS: u64 = 256;
    let chunk = total.div_ceil(CHUNKS).max(1);
    let run = || {
        (0..total.div_ceil(chunk))
            .into_par_iter()
            .map(|c| scan(c * chunk, ((c + 1) * chunk).min(total)))
            .reduce(|| (None, 0), merge)
    };
    match workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::input(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(run))
        }
        None => Ok(run()),
    }
}

fn check_grid_inside<T: Scalar>(f: &Generator<T>, g: &Generator<T>, points: &[T]) -> Result<Interval<T>> {
    let domain = f
        .domain()
        .intersect(&g.domain())
        .ok_or_else(|| Error::input("the generators have no common domain"))?;
    if let Some(p) = points.iter().find(|p| !domain.contains_interior(**p)) {
        return Err(Error::input(format!(
            "grid value {p} is not strictly inside the common domain {domain}"
        )));
    }
    Ok(domain)
}

/// Exhaustive search over four-block functions with the given block masses.
pub fn block_witness_search<T: Scalar>(
    f: &Generator<T>,
    g: &Generator<T>,
    alpha: Pair<T>,
    beta: Pair<T>,
    grid: &GridSpec<T>,
    opts: &SearchOptions<T>,
) -> Result<Option<Witness<T>>> {
    let template = BlockScenario::new(alpha, beta, [T::zero(); 4])?;
    let pts = grid.points();
    check_grid_inside(f, g, &pts)?;
    let score = |idx: &[usize]| {
        let sc = template.with_values([pts[idx[0]], pts[idx[1]], pts[idx[2]], pts[idx[3]]]);
        block_scenario_residual(f, g, &sc).ok().map(|r| r.rel_residual)
    };
    let (best, skipped) = exhaustive_max(pts.len(), 4, opts.workers, score)?;
    finish(best, skipped, opts.threshold, |linear| {
        let idx = digits(linear, pts.len(), 4);
        WitnessSubject::Block(template.with_values([pts[idx[0]], pts[idx[1]], pts[idx[2]], pts[idx[3]]]))
    }, f, g)
}

/// Exhaustive search over all value matrices of the given shape on `spaces`.
pub fn full_witness_search<T: Scalar>(
    f: &Generator<T>,
    g: &Generator<T>,
    shape: (usize, usize),
    spaces: &ProductGrid<T>,
    grid: &GridSpec<T>,
    opts: &SearchOptions<T>,
) -> Result<Option<Witness<T>>> {
    if spaces.shape() != shape {
        return Err(Error::input(format!(
            "search shape {shape:?} does not match the spaces {:?}",
            spaces.shape()
        )));
    }
    let pts = grid.points();
    let cells = shape.0 * shape.1;
    let budget = (pts.len() as u64).checked_pow(cells as u32);
    if budget.is_none_or(|n| n > MAX_EVALUATIONS) {
        return Err(Error::input(format!(
            "{} values on {cells} cells exceeds the budget of {MAX_EVALUATIONS} evaluations",
            pts.len()
        )));
    }
    check_grid_inside(f, g, &pts)?;
    let build = |idx: &[usize]| {
        SimpleFunctionMatrix::from_row_major(shape.0, shape.1, idx.iter().map(|&i| pts[i]).collect())
            .expect("shape checked")
    };
    let score = |idx: &[usize]| {
        commutation_residual(f, g, spaces, &build(idx)).ok().map(|r| r.rel_residual)
    };
    let (best, skipped) = exhaustive_max(pts.len(), cells, opts.workers, score)?;
    finish(best, skipped, opts.threshold, |linear| WitnessSubject::Matrix {
        grid: spaces.clone(),
        h: build(&digits(linear, pts.len(), cells)),
    }, f, g)
}

fn finish<T: Scalar>(
    best: Best<T>,
    skipped: usize,
    threshold: T,
    subject_at: impl Fn(u64) -> WitnessSubject<T>,
    f: &Generator<T>,
    g: &Generator<T>,
) -> Result<Option<Witness<T>>> {
    match best {
        Some((rel, linear)) if rel > threshold => {
            let mut w = Witness::evaluate(f, g, subject_at(linear))?;
            w.skipped_points = skipped;
            Ok(Some(w))
        }
        _ => Ok(None),
    }
}

/// Coordinate-wise golden-section ascent of the relative residual starting
/// from `start`. Each sweep searches every value coordinate over a window
/// around its current value (clipped to the common domain) and keeps a move
/// only if it raises the residual by more than [`IMPROVEMENT_FLOOR`]. The
/// window shrinks geometrically between sweeps. The result never has a
/// smaller residual than `start`.
pub fn refine_witness<T: Scalar>(
    f: &Generator<T>,
    g: &Generator<T>,
    start: &Witness<T>,
    iterations: usize,
) -> Witness<T> {
    let Some(domain) = f.domain().intersect(&g.domain()) else {
        return start.clone();
    };
    let objective = |vals: &[T]| -> Option<T> {
        if vals.iter().any(|v| !domain.contains_interior(*v)) {
            return None;
        }
        start
            .subject
            .with_values(vals)
            .residual(f, g)
            .ok()
            .map(|r| r.rel_residual)
            .filter(|r| r.is_finite())
    };

    let floor = T::lit(IMPROVEMENT_FLOOR);
    let mut values = start.subject.values();
    let mut best = start.report.rel_residual;
    let mut radius: Vec<T> = values.iter().map(|v| T::lit(0.25) * T::one().max(v.abs())).collect();
    let inv_golden = T::lit(0.618_033_988_749_894_8);

    for _ in 0..iterations {
        for i in 0..values.len() {
            let v = values[i];
            let lo = if domain.lower.is_finite() && v - radius[i] <= domain.lower {
                domain.lower + (v - domain.lower) * T::lit(0.5)
            } else {
                v - radius[i]
            };
            let hi = if domain.upper.is_finite() && v + radius[i] >= domain.upper {
                domain.upper - (domain.upper - v) * T::lit(0.5)
            } else {
                v + radius[i]
            };
            let mut trial = values.clone();
            let mut probe = |x: T| -> Option<T> {
                trial[i] = x;
                objective(&trial)
            };
            let rank = |r: Option<T>| r.unwrap_or(T::neg_infinity());

            let (mut a, mut b) = (lo, hi);
            let mut c = b - (b - a) * inv_golden;
            let mut d = a + (b - a) * inv_golden;
            let mut fc = probe(c);
            let mut fd = probe(d);
            let mut local = if rank(fc) >= rank(fd) { (fc, c) } else { (fd, d) };
            for _ in 0..24 {
                if rank(fc) >= rank(fd) {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - (b - a) * inv_golden;
                    fc = probe(c);
                    if rank(fc) > rank(local.0) {
                        local = (fc, c);
                    }
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + (b - a) * inv_golden;
                    fd = probe(d);
                    if rank(fd) > rank(local.0) {
                        local = (fd, d);
                    }
                }
            }
            if let (Some(r), x) = local {
                if r > best + floor {
                    best = r;
                    values[i] = x;
                }
            }
        }
        for r in radius.iter_mut() {
            *r *= T::lit(0.6);
        }
    }

    if best > start.report.rel_residual {
        let subject = start.subject.with_values(&values);
        let report = subject.residual(f, g).expect("evaluated during refinement");
        Witness {
            subject,
            report,
            skipped_points: start.skipped_points,
        }
    } else {
        start.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure_space::DiscreteMeasureSpace;
    use std::f64::consts::LN_2;

    type G = Generator<f64>;

    fn anchor_grid() -> GridSpec<f64> {
        GridSpec::explicit(vec![0.0, LN_2, 3f64.ln(), 4f64.ln()]).unwrap()
    }

    fn sqrt_pair() -> (G, G) {
        (G::exp(1.0).unwrap(), G::exp(2.0).unwrap())
    }

    fn opts(threshold: f64) -> SearchOptions<f64> {
        SearchOptions::with_threshold(threshold)
    }

    #[test]
    fn grid_spec_points() {
        assert_eq!(GridSpec::linear(3, 0.0, 1.0).unwrap().points(), vec![0.0, 0.5, 1.0]);
        let g = GridSpec::<f64>::geometric(3, 1.0, 100.0).unwrap().points();
        assert_eq!(g[0], 1.0);
        assert!((g[1] - 10.0).abs() < 1e-13);
        assert_eq!(g[2], 100.0);
        assert!(GridSpec::geometric(3, 0.0, 1.0).is_err());
        assert!(GridSpec::linear(1, 0.0, 1.0).is_err());
        assert!(GridSpec::linear(3, 1.0, 1.0).is_err());
        assert!(GridSpec::explicit(vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn digits_are_lexicographic() {
        assert_eq!(digits(0, 3, 2), vec![0, 0]);
        assert_eq!(digits(5, 3, 2), vec![1, 2]);
        assert_eq!(digits(8, 3, 2), vec![2, 2]);
    }

    #[test]
    fn tie_break_prefers_smallest_index() {
        // constant score: every tuple ties, the first must win for any worker count
        for workers in [Some(1), Some(3), None] {
            let (best, skipped) = exhaustive_max::<f64, _>(5, 3, workers, |_| Some(1.0)).unwrap();
            assert_eq!(best, Some((1.0, 0)));
            assert_eq!(skipped, 0);
        }
        // two maxima: the lexicographically smaller wins
        let score = |idx: &[usize]| Some(if idx == [1, 4] || idx == [3, 0] { 2.0 } else { 0.0 });
        for workers in [Some(1), Some(4)] {
            let (best, _) = exhaustive_max::<f64, _>(5, 2, workers, score).unwrap();
            assert_eq!(best, Some((2.0, 9)));
        }
    }

    #[test]
    fn skipped_points_are_counted() {
        let (best, skipped) =
            exhaustive_max::<f64, _>(4, 2, Some(2), |idx| (idx[0] != 2).then_some(idx[1] as f64)).unwrap();
        assert_eq!(skipped, 4);
        assert_eq!(best, Some((3.0, 3)));
    }

    #[test]
    fn block_search_finds_anchor_violation() {
        let (f, g) = sqrt_pair();
        let w = block_witness_search(&f, &g, (1.0, 1.0), (1.0, 1.0), &anchor_grid(), &opts(1e-4))
            .unwrap()
            .unwrap();
        assert!(w.report.rel_residual >= 1.7e-3);
        assert!(w.report.abs_residual >= 3.456e-3);
        let again = w.recheck(&f, &g).unwrap();
        assert!((again.rel_residual - w.report.rel_residual).abs() <= 1e-12);
    }

    #[test]
    fn proportional_and_affine_pairs_have_no_witness() {
        let g = G::power(0.5).unwrap();
        let grid = GridSpec::geometric(6, 0.2, 5.0).unwrap();
        let f = g.scale(2.0).unwrap();
        assert!(block_witness_search(&f, &g, (1.0, 3.0), (0.5, 2.0), &grid, &opts(1e-6)).unwrap().is_none());
        let f = g.affine(2.0, 3.0).unwrap();
        assert!(block_witness_search(&f, &g, (0.5, 0.5), (0.5, 0.5), &grid, &opts(1e-6)).unwrap().is_none());
    }

    #[test]
    fn grid_outside_domain_is_rejected() {
        let g = G::power(2.0).unwrap();
        let grid = GridSpec::linear(3, -1.0, 1.0).unwrap();
        assert!(matches!(
            block_witness_search(&g, &g, (1.0, 1.0), (1.0, 1.0), &grid, &opts(1e-4)),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn full_search_matches_block_search_on_2x2() {
        let (f, g) = sqrt_pair();
        let spaces = ProductGrid::new(
            DiscreteMeasureSpace::new(vec![1.0, 1.0]).unwrap(),
            DiscreteMeasureSpace::new(vec![1.0, 1.0]).unwrap(),
        );
        let b = block_witness_search(&f, &g, (1.0, 1.0), (1.0, 1.0), &anchor_grid(), &opts(1e-4))
            .unwrap()
            .unwrap();
        let m = full_witness_search(&f, &g, (2, 2), &spaces, &anchor_grid(), &opts(1e-4))
            .unwrap()
            .unwrap();
        let WitnessSubject::Matrix { h, .. } = &m.subject else { panic!() };
        assert_eq!(h.values(), &b.subject.values()[..]);
        assert_eq!(m.report.rel_residual, b.report.rel_residual);
    }

    #[test]
    fn full_search_budget_and_shape_guards() {
        let (f, g) = sqrt_pair();
        let spaces = ProductGrid::new(
            DiscreteMeasureSpace::new(vec![1.0, 1.0, 1.0]).unwrap(),
            DiscreteMeasureSpace::new(vec![1.0, 1.0, 1.0]).unwrap(),
        );
        let grid = GridSpec::linear(7, 0.0, 1.0).unwrap(); // 7^9 > 10^7
        assert!(matches!(
            full_witness_search(&f, &g, (3, 3), &spaces, &grid, &opts(1e-4)),
            Err(Error::Input(_))
        ));
        assert!(full_witness_search(&f, &g, (2, 2), &spaces, &grid, &opts(1e-4)).is_err());
    }

    #[test]
    fn single_cell_on_probability_spaces_has_no_witness() {
        let (f, g) = sqrt_pair();
        let spaces = ProductGrid::new(
            DiscreteMeasureSpace::new(vec![1.0]).unwrap(),
            DiscreteMeasureSpace::new(vec![1.0]).unwrap(),
        );
        let grid = GridSpec::linear(11, -2.0, 2.0).unwrap();
        assert!(full_witness_search(&f, &g, (1, 1), &spaces, &grid, &opts(1e-6)).unwrap().is_none());
    }

    #[test]
    fn single_cell_off_probability_mass_can_witness() {
        // exp pairs commute on constants (both sides shift by logs of the
        // masses), but e^x against x on masses 2 x 3 does not:
        // lhs = 3h + ln 2, rhs = 3h + 3 ln 2
        let f = G::exp(1.0).unwrap();
        let g = G::power(1.0).unwrap();
        let spaces = ProductGrid::new(
            DiscreteMeasureSpace::new(vec![2.0]).unwrap(),
            DiscreteMeasureSpace::new(vec![3.0]).unwrap(),
        );
        let grid = GridSpec::linear(3, 0.5, 1.5).unwrap();
        let w = full_witness_search(&f, &g, (1, 1), &spaces, &grid, &opts(1e-6)).unwrap().unwrap();
        assert!((w.report.abs_residual - 2.0 * LN_2).abs() < 1e-12);
    }

    #[test]
    fn refinement_never_decreases() {
        let (f, g) = sqrt_pair();
        let start = block_witness_search(&f, &g, (1.0, 1.0), (1.0, 1.0), &anchor_grid(), &opts(1e-4))
            .unwrap()
            .unwrap();
        let zero = refine_witness(&f, &g, &start, 0);
        assert_eq!(zero, start);
        let refined = refine_witness(&f, &g, &start, 50);
        assert!(refined.report.rel_residual > start.report.rel_residual);
        assert!(refined.report.rel_residual >= 1.7e-3);
    }

    #[test]
    fn refinement_keeps_zero_residual_start() {
        let g = G::exp(1.0).unwrap();
        let f = g.scale(3.0).unwrap();
        let sc = BlockScenario::new((1.0, 2.0), (0.5, 0.5), [0.1, 0.2, 0.3, 0.4]).unwrap();
        let start = Witness {
            subject: WitnessSubject::Block(sc),
            report: ResidualReport::new(1.0, 1.0),
            skipped_points: 0,
        };
        assert_eq!(refine_witness(&f, &g, &start, 10), start);
    }

    #[test]
    fn witness_document_shape() {
        let (f, g) = sqrt_pair();
        let w = block_witness_search(&f, &g, (1.0, 1.0), (1.0, 1.0), &anchor_grid(), &opts(1e-4))
            .unwrap()
            .unwrap();
        let doc = serde_json::to_value(w.to_document()).unwrap();
        assert_eq!(doc["kind"], "block");
        assert_eq!(doc["masses"].as_array().unwrap().len(), 4);
        assert_eq!(doc["values"].as_array().unwrap().len(), 4);
        assert_eq!(doc["skipped_points"], 0);
    }

    #[test]
    fn refinement_regression_anchor() {
        let (f, g) = (Generator::exp(1.0).unwrap(), Generator::exp(2.0).unwrap());
        let sc = BlockScenario::new((1.0, 1.0), (1.0, 1.0), [0.0, LN_2, 3f64.ln(), 4f64.ln()]).unwrap();
        let w = Witness::evaluate(&f, &g, WitnessSubject::Block(sc)).unwrap();
        let r = refine_witness(&f, &g, &w, 50);
        assert!((r.report.rel_residual - 0.071_441_095_469_665_94).abs() < 1e-9);
        assert!((r.report.abs_residual - 0.162_790_386_891_622_06).abs() < 1e-9);
    }
}
