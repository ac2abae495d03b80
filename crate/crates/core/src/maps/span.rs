use std::fmt;

use crate::error::{Error, Result};
use crate::fields::{FieldElement, Rational, TowerField};
use crate::linalg;

/// A finite-dimensional Q-subspace of a tower field, given by a Q-linearly independent basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Span {
    tower: TowerField,
    basis: Vec<FieldElement>,
}

impl Span {
    pub fn new(tower: &TowerField, basis: Vec<FieldElement>) -> Result<Self> {
        if basis.iter().any(|b| b.tower() != tower) {
            return Err(Error::TowerMismatch);
        }
        let coords = linalg::coordinates(&basis);
        if linalg::rank(&coords) < basis.len() {
            return Err(Error::DependentBasis);
        }
        Ok(Span {
            tower: tower.clone(),
            basis,
        })
    }

    pub fn tower(&self) -> &TowerField {
        &self.tower
    }

    pub fn basis(&self) -> &[FieldElement] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of `x` in the basis, or `None` if `x` is outside the span.
    pub fn coords(&self, x: &FieldElement) -> Result<Option<Vec<Rational>>> {
        if x.tower() != &self.tower {
            return Err(Error::TowerMismatch);
        }
        let mut all = self.basis.clone();
        all.push(x.clone());
        let mut cols = linalg::coordinates(&all);
        let b = cols.pop().expect("x column");
        Ok(linalg::solve(&cols, &b))
    }

    pub fn contains(&self, x: &FieldElement) -> bool {
        matches!(self.coords(x), Ok(Some(_)))
    }

    /// Intersection, from the null space of [A | −B].
    pub fn intersect(&self, other: &Span) -> Result<Span> {
        if self.tower != other.tower {
            return Err(Error::TowerMismatch);
        }
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().map(FieldElement::neg));
        let cols = linalg::coordinates(&all);
        let k = self.basis.len();
        let mut basis = Vec::new();
        for v in linalg::nullspace(&cols) {
            let mut e = self.tower.zero();
            for (c, b) in v[..k].iter().zip(&self.basis) {
                e = e.add(&b.scale(c))?;
            }
            basis.push(e);
        }
        Span::new(&self.tower, basis)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b: Vec<String> = self.basis.iter().map(ToString::to_string).collect();
        write!(f, "span({})", b.join(", "))
    }
}
