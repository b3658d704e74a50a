//! Finite discrete measure spaces and integration of simple functions.
//!
//! A space is a list of atoms, each carrying a strictly positive mass. Every
//! subset of atoms is measurable, so on a product of two such spaces every
//! function on the atom grid is a measurable simple function.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasureSpace<T> {
    labels: Vec<String>,
    weights: Vec<T>,
}

impl<T: Scalar> DiscreteMeasureSpace<T> {
    /// Builds a space whose atoms are labelled by their index.
    pub fn new(weights: Vec<T>) -> Result<Self> {
        let labels = (0..weights.len()).map(|i| i.to_string()).collect();
        Self::with_labels(labels, weights)
    }

    pub fn with_labels(labels: Vec<String>, weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::input("a measure space needs at least one atom"));
        }
        if labels.len() != weights.len() {
            return Err(Error::input(format!(
                "{} labels for {} atoms",
                labels.len(),
                weights.len()
            )));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > T::zero()))
        {
            return Err(Error::input(format!(
                "atom {i} has weight {w}; weights must be finite and positive"
            )));
        }
        let space = Self { labels, weights };
        if !space.total_mass().is_finite() {
            return Err(Error::input("total mass overflows"));
        }
        Ok(space)
    }

    /// Uniform probability measure on `n` atoms.
    pub fn uniform_probability(n: usize) -> Result<Self> {
        let n_t = T::from_usize(n).ok_or_else(|| Error::input("atom count too large"))?;
        Self::new(vec![T::one() / n_t; n])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn total_mass(&self) -> T {
        sum_in_order(self.weights.iter().copied())
    }

    /// A space is non-degenerate when some measurable set has mass strictly
    /// between zero and the total. With positive atoms that is exactly "at
    /// least two atoms".
    pub fn is_non_degenerate(&self) -> bool {
        self.weights.len() >= 2
    }

    /// Integral of the simple function taking `values[i]` on atom `i`.
    pub fn integrate(&self, values: &[T]) -> Result<T> {
        if values.len() != self.weights.len() {
            return Err(Error::input(format!(
                "{} values for a space with {} atoms",
                values.len(),
                self.weights.len()
            )));
        }
        Ok(self.integrate_unchecked(values.iter().copied()))
    }

    /// Weighted sum in index order. The caller guarantees the iterator yields
    /// exactly one value per atom.
    pub(crate) fn integrate_unchecked(&self, values: impl Iterator<Item = T>) -> T {
        sum_in_order(self.weights.iter().zip(values).map(|(w, v)| *w * v))
    }

    /// Mass of the first atom and of its complement, i.e. the block masses
    /// obtained from the partition `{A, A^c}` with `A` the first atom.
    pub fn split_first(&self) -> Result<(T, T)> {
        if !self.is_non_degenerate() {
            return Err(Error::input(
                "a degenerate space cannot be split into two blocks of positive mass",
            ));
        }
        let rest = sum_in_order(self.weights[1..].iter().copied());
        Ok((self.weights[0], rest))
    }

    pub fn to_document(&self) -> SpaceDocument {
        SpaceDocument {
            weights: self.weights.iter().map(|w| w.as_f64()).collect(),
            labels: Some(self.labels.clone()),
        }
    }
}

/// Plain left-to-right summation. The order is fixed so residuals are
/// reproducible bit for bit.
#[inline]
pub(crate) fn sum_in_order<T: Scalar>(terms: impl Iterator<Item = T>) -> T {
    terms.fold(T::zero(), |acc, t| acc + t)
}

/// Product of two discrete spaces; atom `(i, j)` has mass `wx[i] * wy[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductGrid<T> {
    pub space_x: DiscreteMeasureSpace<T>,
    pub space_y: DiscreteMeasureSpace<T>,
}

impl<T: Scalar> ProductGrid<T> {
    pub fn new(space_x: DiscreteMeasureSpace<T>, space_y: DiscreteMeasureSpace<T>) -> Self {
        Self { space_x, space_y }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.space_x.len(), self.space_y.len())
    }

    pub fn product_weight(&self, i: usize, j: usize) -> T {
        self.space_x.weights()[i] * self.space_y.weights()[j]
    }

    /// Same grid with the roles of the two axes exchanged.
    pub fn transposed(&self) -> Self {
        Self {
            space_x: self.space_y.clone(),
            space_y: self.space_x.clone(),
        }
    }
}

/// JSON form of a space: `{"weights": [1.0, 2.0], "labels": ["a", "b"]}`.
/// Labels are optional and default to atom indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceDocument {
    pub weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl SpaceDocument {
    pub fn to_space<T: Scalar>(&self) -> Result<DiscreteMeasureSpace<T>> {
        let weights = self.weights.iter().map(|&w| T::lit(w)).collect();
        match &self.labels {
            Some(labels) => DiscreteMeasureSpace::with_labels(labels.clone(), weights),
            None => DiscreteMeasureSpace::new(weights),
        }
    }
}
