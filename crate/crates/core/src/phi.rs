//! Reduction of the commutation equation to a scalar functional equation.
//!
//! Plugging a four-block simple function into the commutation equation gives
//! an identity in eight numbers (the block masses and values), collected in
//! [`BlockScenario`]. Substituting `s = g(x)` and friends turns it into an
//! equation for the single function `phi = f o g^-1` on `(0, inf)`, and
//! writing `Phi(x, y) = phi^-1(a1 phi(x) + a2 phi(y))` recasts that as a
//! two-weight affinity of `Phi`. The chain continues through homogeneity,
//! additivity, linearity of `Phi` and finally `phi(s) = c s`.
//!
//! Each step is exposed as a residual so that it can be checked on samples.
//! For proportional pairs every residual vanishes; for other pairs the
//! residuals show where the chain breaks.

use crate::error::{Error, Result, Stage};
use crate::generators::{Generator, Setting};
use crate::measure_space::{DiscreteMeasureSpace, ProductGrid};
use crate::qam::{ResidualReport, SimpleFunctionMatrix};
use crate::scalar::Scalar;

/// A pair of reals: block masses `(first, complement)` or a point of `(0, inf)^2`.
pub type Pair<T> = (T, T);

/// A four-block simple function: value `x` on `A x B`, `y` on `A x B^c`,
/// `z` on `A^c x B` and `w` on `A^c x B^c`, with `alpha = (l(A), l(A^c))` and
/// `beta = (m(B), m(B^c))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockScenario<T> {
    pub alpha1: T,
    pub alpha2: T,
    pub beta1: T,
    pub beta2: T,
    pub x: T,
    pub y: T,
    pub z: T,
    pub w: T,
}

impl<T: Scalar> BlockScenario<T> {
    pub fn new(alpha: Pair<T>, beta: Pair<T>, values: [T; 4]) -> Result<Self> {
        let masses = [alpha.0, alpha.1, beta.0, beta.1];
        if masses.iter().any(|m| !(m.is_finite() && *m > T::zero())) {
            return Err(Error::input(format!(
                "block masses must be finite and positive, got {masses:?}"
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("block values must be finite"));
        }
        let [x, y, z, w] = values;
        Ok(Self {
            alpha1: alpha.0,
            alpha2: alpha.1,
            beta1: beta.0,
            beta2: beta.1,
            x,
            y,
            z,
            w,
        })
    }

    pub fn masses(&self) -> [T; 4] {
        [self.alpha1, self.alpha2, self.beta1, self.beta2]
    }

    pub fn values(&self) -> [T; 4] {
        [self.x, self.y, self.z, self.w]
    }

    pub fn with_values(&self, values: [T; 4]) -> Self {
        let [x, y, z, w] = values;
        Self { x, y, z, w, ..*self }
    }

    /// The same function as a 2x2 value matrix on a two-atom product grid.
    pub fn to_grid_and_matrix(&self) -> (ProductGrid<T>, SimpleFunctionMatrix<T>) {
        let sx = DiscreteMeasureSpace::new(vec![self.alpha1, self.alpha2]).expect("masses validated");
        let sy = DiscreteMeasureSpace::new(vec![self.beta1, self.beta2]).expect("masses validated");
        let h = SimpleFunctionMatrix::from_row_major(2, 2, self.values().to_vec()).expect("2x2");
        (ProductGrid::new(sx, sy), h)
    }

    /// `(s, t, u, v) = (g(x), g(y), g(z), g(w))`.
    pub fn substitute(&self, g: &Generator<T>) -> Result<[T; 4]> {
        Ok([g.eval(self.x)?, g.eval(self.y)?, g.eval(self.z)?, g.eval(self.w)?])
    }
}

/// Both sides of the commutation equation evaluated on a block function
/// directly from the closed four-block formula.
pub fn block_scenario_residual<T: Scalar>(
    f: &Generator<T>,
    g: &Generator<T>,
    sc: &BlockScenario<T>,
) -> Result<ResidualReport<T>> {
    let inner_y = |a: T, b: T| -> Result<T> {
        g.inverse(sc.beta1 * g.eval(a)? + sc.beta2 * g.eval(b)?)
            .map_err(|e| e.at_stage(Stage::InnerY))
    };
    let m1 = inner_y(sc.x, sc.y)?;
    let m2 = inner_y(sc.z, sc.w)?;
    let lhs = f
        .inverse(sc.alpha1 * f.eval(m1)? + sc.alpha2 * f.eval(m2)?)
        .map_err(|e| e.at_stage(Stage::OuterX))?;

    let inner_x = |a: T, b: T| -> Result<T> {
        f.inverse(sc.alpha1 * f.eval(a)? + sc.alpha2 * f.eval(b)?)
            .map_err(|e| e.at_stage(Stage::InnerX))
    };
    let n1 = inner_x(sc.x, sc.z)?;
    let n2 = inner_x(sc.y, sc.w)?;
    let rhs = g
        .inverse(sc.beta1 * g.eval(n1)? + sc.beta2 * g.eval(n2)?)
        .map_err(|e| e.at_stage(Stage::OuterY))?;
    Ok(ResidualReport::new(lhs, rhs))
}

/// The conjugating map `phi = f o g^-1` of a pair of bijections onto `(0, inf)`.
#[derive(Debug, Clone, Copy)]
pub struct Phi<'a, T> {
    f: &'a Generator<T>,
    g: &'a Generator<T>,
}

pub const DEFAULT_FIT_TOLERANCE: f64 = 1e-8;

/// Least-squares fit `Phi(x, y) ~ a x + b y` through the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit<T> {
    pub a: T,
    pub b: T,
    /// Largest of `|Phi - (a x + b y)| / max(1, |Phi|)` over the grid.
    pub max_fit_residual: T,
}

impl<'a, T: Scalar> Phi<'a, T> {
    /// Both generators must be continuous bijections of one interval onto
    /// `(0, inf)`.
    pub fn new(f: &'a Generator<T>, g: &'a Generator<T>) -> Result<Self> {
        for (name, gen) in [("f", f), ("g", g)] {
            if !gen.validate_for_theorem(Setting::Theorem2) {
                return Err(Error::input(format!(
                    "{name} = {gen} is not a bijection onto the positive reals"
                )));
            }
        }
        if f.domain() != g.domain() {
            return Err(Error::input(format!(
                "f and g are defined on different intervals: {} and {}",
                f.domain(),
                g.domain()
            )));
        }
        Ok(Self { f, g })
    }

    pub fn eval(&self, s: T) -> Result<T> {
        let x = self.g.inverse(s).map_err(|e| e.at_stage(Stage::Phi))?;
        self.f.eval(x)
    }

    pub fn inverse(&self, t: T) -> Result<T> {
        let x = self.f.inverse(t).map_err(|e| e.at_stage(Stage::PhiInverse))?;
        self.g.eval(x)
    }

    /// `Phi(x, y) = phi^-1(a1 phi(x) + a2 phi(y))`.
    pub fn big_phi(&self, alpha: Pair<T>, p: Pair<T>) -> Result<T> {
        check_masses(alpha)?;
        self.inverse(alpha.0 * self.eval(p.0)? + alpha.1 * self.eval(p.1)?)
    }

    /// Commutation on a block function after the change of variables
    /// `s = g(x), t = g(y), u = g(z), v = g(w)`:
    /// `Phi(b1 s + b2 t, b1 u + b2 v)` against `b1 Phi(s, u) + b2 Phi(t, v)`.
    pub fn equation_residual(&self, alpha: Pair<T>, beta: Pair<T>, stuv: [T; 4]) -> Result<ResidualReport<T>> {
        check_masses(beta)?;
        let [s, t, u, v] = stuv;
        let lhs = self.big_phi(alpha, (beta.0 * s + beta.1 * t, beta.0 * u + beta.1 * v))?;
        let rhs = beta.0 * self.big_phi(alpha, (s, u))? + beta.1 * self.big_phi(alpha, (t, v))?;
        Ok(ResidualReport::new(lhs, rhs))
    }

    /// `Phi(b1 x + b2 y)` against `b1 Phi(x) + b2 Phi(y)` for points of `(0, inf)^2`.
    pub fn jensen_affinity_residual(
        &self,
        alpha: Pair<T>,
        beta: Pair<T>,
        xv: Pair<T>,
        yv: Pair<T>,
    ) -> Result<ResidualReport<T>> {
        check_masses(beta)?;
        let combined = (beta.0 * xv.0 + beta.1 * yv.0, beta.0 * xv.1 + beta.1 * yv.1);
        let lhs = self.big_phi(alpha, combined)?;
        let rhs = beta.0 * self.big_phi(alpha, xv)? + beta.1 * self.big_phi(alpha, yv)?;
        Ok(ResidualReport::new(lhs, rhs))
    }

    /// `Phi(b x)` against `b Phi(x)`.
    pub fn beta_homogeneity_residual(&self, alpha: Pair<T>, beta: T, xv: Pair<T>) -> Result<ResidualReport<T>> {
        if !(beta.is_finite() && beta > T::zero()) {
            return Err(Error::input(format!("homogeneity factor must be positive, got {beta}")));
        }
        let lhs = self.big_phi(alpha, (beta * xv.0, beta * xv.1))?;
        let rhs = beta * self.big_phi(alpha, xv)?;
        Ok(ResidualReport::new(lhs, rhs))
    }

    /// `Phi(x + y)` against `Phi(x) + Phi(y)`.
    pub fn additivity_residual(&self, alpha: Pair<T>, xv: Pair<T>, yv: Pair<T>) -> Result<ResidualReport<T>> {
        let lhs = self.big_phi(alpha, (xv.0 + yv.0, xv.1 + yv.1))?;
        let rhs = self.big_phi(alpha, xv)? + self.big_phi(alpha, yv)?;
        Ok(ResidualReport::new(lhs, rhs))
    }

    /// Checks `Phi(p) < Phi(q)` for every pair with `p <= q` componentwise and
    /// `p != q`. Unordered or equal pairs are rejected before any evaluation.
    pub fn monotone_check(&self, alpha: Pair<T>, pairs: &[(Pair<T>, Pair<T>)]) -> Result<bool> {
        for (k, (p, q)) in pairs.iter().enumerate() {
            if !(p.0 <= q.0 && p.1 <= q.1) || p == q {
                return Err(Error::input(format!(
                    "pair {k} is not strictly ordered in the product order: ({}, {}) vs ({}, {})",
                    p.0, p.1, q.0, q.1
                )));
            }
        }
        for (p, q) in pairs {
            if !(self.big_phi(alpha, *p)? < self.big_phi(alpha, *q)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `xi_n = Phi(1/n, 1/n)` for `n = 1..=n_max`.
    pub fn origin_limit(&self, alpha: Pair<T>, n_max: usize) -> Result<Vec<T>> {
        if n_max < 2 {
            return Err(Error::input("the origin sequence needs n_max >= 2"));
        }
        (1..=n_max)
            .map(|n| {
                let r = T::one() / T::lit(n as f64);
                self.big_phi(alpha, (r, r))
            })
            .collect()
    }

    /// Least-squares `(a, b)` for `Phi(x, y) = a x + b y` over `grid`, without
    /// any acceptance test.
    pub fn fit_linear_form(&self, alpha: Pair<T>, grid: &[Pair<T>]) -> Result<LinearFit<T>> {
        check_fit_grid(grid)?;
        let mut values = Vec::with_capacity(grid.len());
        let (mut sxx, mut sxy, mut syy, mut sxp, mut syp) =
            (T::zero(), T::zero(), T::zero(), T::zero(), T::zero());
        for &(x, y) in grid {
            let p = self.big_phi(alpha, (x, y))?;
            values.push(p);
            sxx += x * x;
            sxy += x * y;
            syy += y * y;
            sxp += x * p;
            syp += y * p;
        }
        let det = sxx * syy - sxy * sxy;
        if !(det.abs() > T::epsilon() * sxx * syy) {
            return Err(Error::input("fit grid is degenerate: all points lie on one ray"));
        }
        let a = (syy * sxp - sxy * syp) / det;
        let b = (sxx * syp - sxy * sxp) / det;
        let max_fit_residual = grid
            .iter()
            .zip(&values)
            .map(|(&(x, y), &p)| (p - (a * x + b * y)).abs() / T::one().max(p.abs()))
            .fold(T::zero(), T::max);
        Ok(LinearFit { a, b, max_fit_residual })
    }

    /// Accepts the least-squares fit when its worst relative residual is at
    /// most `tol` and the coefficients are non-negative with positive sum
    /// (up to `tol`), as they must be for a positive linear `Phi`.
    pub fn linear_form_fit(&self, alpha: Pair<T>, grid: &[Pair<T>], tol: T) -> Result<Option<LinearFit<T>>> {
        let fit = self.fit_linear_form(alpha, grid)?;
        let accepted =
            fit.max_fit_residual <= tol && fit.a >= -tol && fit.b >= -tol && fit.a + fit.b > T::zero();
        Ok(accepted.then_some(fit))
    }

    /// `a1 phi(x) + a2 phi(y)` against `phi(a x + b y)`.
    pub fn scaled_cauchy_residual(&self, alpha: Pair<T>, coeffs: Pair<T>, x: T, y: T) -> Result<ResidualReport<T>> {
        check_masses(alpha)?;
        let (a, b) = coeffs;
        if !(a >= T::zero() && b >= T::zero() && a + b > T::zero()) {
            return Err(Error::input(format!(
                "linear form coefficients must be non-negative with positive sum, got ({a}, {b})"
            )));
        }
        let lhs = alpha.0 * self.eval(x)? + alpha.1 * self.eval(y)?;
        let rhs = self.eval(a * x + b * y)?;
        Ok(ResidualReport::new(lhs, rhs))
    }

    /// Returns `c` when `phi(s) = c s` on `grid`: the ratio `phi(s) / s` is
    /// constant to relative `tol` and `phi` is additive on all grid pairs.
    pub fn proportionality_extract(&self, grid: &[T], tol: T) -> Result<Option<T>> {
        if grid.is_empty() || grid.iter().any(|s| !(*s > T::zero() && s.is_finite())) {
            return Err(Error::input("proportionality grid must be non-empty and positive"));
        }
        let mut images = Vec::with_capacity(grid.len());
        for &s in grid {
            images.push(self.eval(s)?);
        }
        let mut ratios: Vec<T> = grid.iter().zip(&images).map(|(s, p)| *p / *s).collect();
        ratios.sort_by(|a, b| a.partial_cmp(b).expect("finite ratios"));
        let c = ratios[ratios.len() / 2];
        if !(c > T::zero()) || ratios.iter().any(|r| (*r - c).abs() > tol * T::one().max(c)) {
            return Ok(None);
        }
        for i in 0..grid.len() {
            for j in i..grid.len() {
                let sum = self.eval(grid[i] + grid[j])?;
                let excess = (sum - images[i] - images[j]).abs();
                if excess > tol * T::one().max(sum.abs()) {
                    return Ok(None);
                }
            }
        }
        Ok(Some(c))
    }

    /// A point with `Phi(x, y) = z`: choose `a1 phi(x) = a2 phi(y) = phi(z) / 2`.
    pub fn surjective_preimage(&self, alpha: Pair<T>, z: T) -> Result<Pair<T>> {
        check_masses(alpha)?;
        let half = self.eval(z)? * T::lit(0.5);
        Ok((self.inverse(half / alpha.0)?, self.inverse(half / alpha.1)?))
    }
}

fn check_masses<T: Scalar>(m: Pair<T>) -> Result<()> {
    if m.0.is_finite() && m.1.is_finite() && m.0 > T::zero() && m.1 > T::zero() {
        Ok(())
    } else {
        Err(Error::input(format!("masses must be finite and positive, got ({}, {})", m.0, m.1)))
    }
}

fn check_fit_grid<T: Scalar>(grid: &[Pair<T>]) -> Result<()> {
    if grid.len() < 3 {
        return Err(Error::input("a linear-form fit needs at least three points"));
    }
    if grid.iter().any(|&(x, y)| !(x > T::zero() && y > T::zero() && x.is_finite() && y.is_finite())) {
        return Err(Error::input("fit grid points must lie in (0, inf)^2"));
    }
    let (x0, y0) = grid[0];
    let Some(&(x1, y1)) = grid.iter().find(|&&p| p != grid[0]) else {
        return Err(Error::input("fit grid has a single distinct point"));
    };
    let collinear = grid.iter().all(|&(x, y)| {
        let cross = (x1 - x0) * (y - y0) - (y1 - y0) * (x - x0);
        cross.abs() <= T::lit(1e-12) * T::one().max(x.abs() + y.abs()).powi(2)
    });
    if collinear {
        return Err(Error::input("fit grid points are collinear"));
    }
    Ok(())
}

/// Geometric points `lo (hi/lo)^(i/(n-1))`, `i = 0..n`.
pub fn geometric_points<T: Scalar>(lo: T, hi: T, n: usize) -> Vec<T> {
    if n == 1 {
        return vec![lo];
    }
    let ratio = hi / lo;
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo * ratio.powf(T::lit(i as f64 / (n - 1) as f64))
            }
        })
        .collect()
}

/// The 9x9 geometric grid over `[0.1, 10]^2` used for linear-form fits.
pub fn default_fit_grid<T: Scalar>() -> Vec<Pair<T>> {
    let axis = geometric_points(T::lit(0.1), T::lit(10.0), 9);
    axis.iter()
        .flat_map(|&x| axis.iter().map(move |&y| (x, y)))
        .collect()
}

/// 17 geometric points over `[0.1, 10]` used for proportionality extraction.
pub fn default_ratio_grid<T: Scalar>() -> Vec<T> {
    geometric_points(T::lit(0.1), T::lit(10.0), 17)
}
