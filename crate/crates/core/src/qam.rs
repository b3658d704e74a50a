//! Integral quasi-arithmetic means and the two partially mixed means.
//!
//! For a generator `w` and a measure `gamma`, the quasi-arithmetic mean of a
//! simple function `h` is `w^-1(integral of w(h) d gamma)`. The commutation
//! equation compares
//!
//! ```text
//! lhs = f^-1( int_X f( g^-1( int_Y g(h(x, .)) dmu ) ) dlambda )
//! rhs = g^-1( int_Y g( f^-1( int_X f(h(., y)) dlambda ) ) dmu )
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Stage};
use crate::generators::Generator;
use crate::measure_space::{DiscreteMeasureSpace, ProductGrid};
use crate::scalar::Scalar;

/// Values of a simple function on the atom grid of `X x Y`, stored row major
/// with one row per `X` atom.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleFunctionMatrix<T> {
    rows: usize,
    cols: usize,
    values: Vec<T>,
}

impl<T: Scalar> SimpleFunctionMatrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if nrows == 0 || ncols == 0 {
            return Err(Error::input("a simple function needs at least one value"));
        }
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::input("ragged value matrix"));
        }
        let values: Vec<T> = rows.into_iter().flatten().collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("non-finite value in simple function"));
        }
        Ok(Self {
            rows: nrows,
            cols: ncols,
            values,
        })
    }

    pub fn from_row_major(rows: usize, cols: usize, values: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 || values.len() != rows * cols {
            return Err(Error::input(format!(
                "{} values do not fill a {rows}x{cols} matrix",
                values.len()
            )));
        }
        Self::from_rows(values.chunks(cols).map(<[T]>::to_vec).collect())
    }

    pub fn constant(rows: usize, cols: usize, c: T) -> Result<Self> {
        Self::from_row_major(rows, cols, vec![c; rows * cols])
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = T> + '_ {
        (0..self.rows).map(move |i| self.get(i, j))
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn transposed(&self) -> Self {
        let mut values = Vec::with_capacity(self.values.len());
        for j in 0..self.cols {
            values.extend(self.column(j));
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            values,
        }
    }

    pub fn to_document(&self) -> MatrixDocument {
        MatrixDocument {
            values: (0..self.rows)
                .map(|i| self.row(i).iter().map(|v| v.as_f64()).collect())
                .collect(),
        }
    }
}

/// JSON form of a simple function: `{"values": [[...], [...]]}`, one row per
/// `X` atom and one column per `Y` atom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub values: Vec<Vec<f64>>,
}

impl MatrixDocument {
    pub fn to_matrix<T: Scalar>(&self) -> Result<SimpleFunctionMatrix<T>> {
        SimpleFunctionMatrix::from_rows(
            self.values
                .iter()
                .map(|r| r.iter().map(|&v| T::lit(v)).collect())
                .collect(),
        )
    }
}

/// Outcome of comparing the two sides of an identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualReport<T> {
    pub lhs: T,
    pub rhs: T,
    pub abs_residual: T,
    /// `abs_residual / max(1, |lhs|, |rhs|)`.
    pub rel_residual: T,
}

impl<T: Scalar> ResidualReport<T> {
    pub fn new(lhs: T, rhs: T) -> Self {
        let abs_residual = (lhs - rhs).abs();
        let scale = T::one().max(lhs.abs()).max(rhs.abs());
        Self {
            lhs,
            rhs,
            abs_residual,
            rel_residual: abs_residual / scale,
        }
    }

    pub fn passes(&self, tol: T) -> bool {
        self.rel_residual <= tol
    }

    pub fn to_f64(&self) -> ResidualReport<f64> {
        ResidualReport {
            lhs: self.lhs.as_f64(),
            rhs: self.rhs.as_f64(),
            abs_residual: self.abs_residual.as_f64(),
            rel_residual: self.rel_residual.as_f64(),
        }
    }
}

/// Default relative threshold below which two sides count as equal.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// `gen^-1( sum_i weight_i * gen(values_i) )`.
pub fn qam<T: Scalar>(gen: &Generator<T>, space: &DiscreteMeasureSpace<T>, values: &[T]) -> Result<T> {
    if values.len() != space.len() {
        return Err(Error::input(format!(
            "{} values for a space with {} atoms",
            values.len(),
            space.len()
        )));
    }
    mean_of(gen, space, values.iter().copied())
}

fn mean_of<T: Scalar>(
    gen: &Generator<T>,
    space: &DiscreteMeasureSpace<T>,
    values: impl Iterator<Item = T>,
) -> Result<T> {
    let mut images = Vec::with_capacity(space.len());
    for v in values {
        images.push(gen.eval(v)?);
    }
    let integral = space.integrate_unchecked(images.into_iter());
    gen.inverse(integral)
}

fn check_shape<T: Scalar>(grid: &ProductGrid<T>, h: &SimpleFunctionMatrix<T>) -> Result<()> {
    if grid.shape() != h.shape() {
        return Err(Error::input(format!(
            "simple function has shape {:?} but the grid has {:?}",
            h.shape(),
            grid.shape()
        )));
    }
    Ok(())
}

/// Left side: inner `g`-mean over `Y` for each `X` atom, then outer `f`-mean
/// over `X`.
pub fn lhs_mixed_mean<T: Scalar>(
    f: &Generator<T>,
    g: &Generator<T>,
    grid: &ProductGrid<T>,
    h: &SimpleFunctionMatrix<T>,
) -> Result<T> {
    check_shape(grid, h)?;
    let (rows, _) = h.shape();
    let mut inner = Vec::with_capacity(rows);
    for i in 0..rows {
        let m = mean_of(g, &grid.space_y, h.row(i).iter().copied()).map_err(|e| e.at_stage(Stage::InnerY))?;
        inner.push(m);
    }
    mean_of(f, &grid.space_x, inner.into_iter()).map_err(|e| e.at_stage(Stage::OuterX))
}

/// Right side: inner `f`-mean over `X` for each `Y` atom, then outer `g`-mean
/// over `Y`.
pub fn rhs_mixed_mean<T: Scalar>(
    f: &Generator<T>,
    g: &Generator<T>,
    grid: &ProductGrid<T>,
    h: &SimpleFunctionMatrix<T>,
) -> Result<T> {
    check_shape(grid, h)?;
    let (_, cols) = h.shape();
    let mut inner = Vec::with_capacity(cols);
    for j in 0..cols {
        let m = mean_of(f, &grid.space_x, h.column(j)).map_err(|e| e.at_stage(Stage::InnerX))?;
        inner.push(m);
    }
    mean_of(g, &grid.space_y, inner.into_iter()).map_err(|e| e.at_stage(Stage::OuterY))
}

pub fn commutation_residual<T: Scalar>(
    f: &Generator<T>,
    g: &Generator<T>,
    grid: &ProductGrid<T>,
    h: &SimpleFunctionMatrix<T>,
) -> Result<ResidualReport<T>> {
    let lhs = lhs_mixed_mean(f, g, grid, h)?;
    let rhs = rhs_mixed_mean(f, g, grid, h)?;
    Ok(ResidualReport::new(lhs, rhs))
}

/// Compares the mean generated by `gen` with the mean generated by
/// `alpha * gen`; the two coincide for every positive `alpha`.
pub fn scale_invariance_residual<T: Scalar>(
    gen: &Generator<T>,
    alpha: T,
    space: &DiscreteMeasureSpace<T>,
    values: &[T],
) -> Result<ResidualReport<T>> {
    let scaled = gen.scale(alpha)?;
    let lhs = qam(gen, space, values)?;
    let rhs = qam(&scaled, space, values)?;
    Ok(ResidualReport::new(lhs, rhs))
}
