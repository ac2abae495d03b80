use std::fmt;
use std::hash::{Hash, Hasher};

use num::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::rational::Rational;
use super::tower::{Repr, TowerField};
use crate::error::{Error, Result};

/// An element of a tower field in canonical form.
///
/// Equality is exact: two elements are equal iff they belong to equal towers
/// and have identical canonical representations.
#[derive(Clone, Debug)]
pub struct FieldElement {
    pub(crate) tower: TowerField,
    pub(crate) repr: Repr,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.repr == other.repr && self.tower == other.tower
    }
}

impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.repr.hash(state);
    }
}

impl FieldElement {
    pub fn tower(&self) -> &TowerField {
        &self.tower
    }

    fn same(&self, other: &Self) -> Result<usize> {
        if self.tower != other.tower {
            return Err(Error::TowerMismatch);
        }
        Ok(self.tower.top())
    }

    pub fn is_zero(&self) -> bool {
        self.tower.data.is_zero(&self.repr)
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|q| q.is_one())
    }

    /// The rational value of this element, if it lies in Q.
    pub fn as_rational(&self) -> Option<Rational> {
        self.tower.data.as_rational(&self.repr)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let lvl = self.same(other)?;
        Ok(self.tower.wrap(self.tower.data.add(lvl, &self.repr, &other.repr)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let lvl = self.same(other)?;
        Ok(self.tower.wrap(self.tower.data.sub(lvl, &self.repr, &other.repr)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let lvl = self.same(other)?;
        Ok(self.tower.wrap(self.tower.data.mul(lvl, &self.repr, &other.repr)))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        self.mul(&other.inv()?)
    }

    pub fn neg(&self) -> Self {
        self.tower.wrap(self.tower.data.neg(self.tower.top(), &self.repr))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.tower.wrap(self.tower.data.inv(self.tower.top(), &self.repr)?))
    }

    pub fn scale(&self, q: &Rational) -> Self {
        self.tower.wrap(self.tower.data.scale(self.tower.top(), &self.repr, q))
    }

    pub fn add_rational(&self, q: &Rational) -> Self {
        self.add(&self.tower.rational(q)).expect("same tower")
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = self.tower.one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq)?;
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq)?;
            }
        }
        Ok(acc)
    }

    /// Sum of a nonempty or empty family in `tower`.
    pub fn sum<'a>(tower: &TowerField, items: impl IntoIterator<Item = &'a FieldElement>) -> Result<Self> {
        items.into_iter().try_fold(tower.zero(), |acc, x| acc.add(x))
    }

    pub fn product<'a>(tower: &TowerField, items: impl IntoIterator<Item = &'a FieldElement>) -> Result<Self> {
        items.into_iter().try_fold(tower.one(), |acc, x| acc.mul(x))
    }

    /// Sign of a rational element; `None` for irrational ones.
    pub fn rational_sign(&self) -> Option<i8> {
        self.as_rational().map(|q| {
            if q.is_zero() {
                0
            } else if q.is_positive() {
                1
            } else {
                -1
            }
        })
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tower.data.fmt_repr(self.tower.top(), &self.repr))
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
