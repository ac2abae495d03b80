//! Dense univariate polynomials over Q.
//!
//! Coefficients are stored lowest degree first. The zero polynomial is the
//! empty vector; otherwise the last coefficient is nonzero.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, One, Signed, Zero};

use super::rational::{fmt_rational, lcm_of_denominators, positive_divisors, rational_sqrt, Rational};

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The indeterminate.
    pub fn x() -> Self {
        Self::from_coeffs(vec![Rational::zero(), Rational::one()])
    }

    pub fn monomial(c: Rational, deg: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); deg + 1];
        coeffs[deg] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| Rational::from_integer(BigInt::from(c))).collect())
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Divides by the leading coefficient. The zero polynomial is returned unchanged.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(lc) if !lc.is_one() => self.scale(&lc.recip()),
            _ => self.clone(),
        }
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// Euclidean division. Panics if `divisor` is zero.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("polynomial division by zero");
        let lc_inv = divisor.coeffs[dd].recip();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = &rem[i] * &lc_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[i - dd + j] -= &c * dc;
            }
            quot[i - dd] = c;
        }
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    pub fn exact_div(&self, divisor: &Poly) -> Poly {
        let (q, r) = self.div_rem(divisor);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn lcm(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        (self * other).exact_div(&self.gcd(other)).monic()
    }

    pub fn pow(&self, mut k: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    /// Square root in Q[x], if the polynomial is a perfect square.
    pub fn sqrt(&self) -> Option<Poly> {
        let Some(deg) = self.degree() else {
            return Some(Poly::zero());
        };
        if deg % 2 == 1 {
            return None;
        }
        let m = deg / 2;
        let lead = rational_sqrt(&self.coeffs[deg])?;
        // Top-down: root coefficients r_m, r_{m-1}, ..., r_0.
        let mut root = vec![Rational::zero(); m + 1];
        root[m] = lead.clone();
        let two_lead = &lead + &lead;
        for k in (0..m).rev() {
            // coefficient of x^(m + k) in root^2 determines root[k]
            let target = self.coeff(m + k);
            let mut acc = Rational::zero();
            for i in (k + 1)..=m {
                let j = m + k - i;
                if j > k && j <= m {
                    acc += &root[i] * &root[j];
                }
            }
            root[k] = (target - acc) / &two_lead;
        }
        let r = Poly::from_coeffs(root);
        if &(&r * &r) == self {
            Some(r)
        } else {
            None
        }
    }

    /// Rational roots, or `None` if the coefficients are too large to enumerate candidates.
    pub fn rational_roots(&self) -> Option<Vec<Rational>> {
        let deg = self.degree()?;
        if deg == 0 {
            return Some(Vec::new());
        }
        let mut roots = Vec::new();
        let mut p = self.clone();
        // strip factors of x
        while p.coeff(0).is_zero() {
            if !roots.contains(&Rational::zero()) {
                roots.push(Rational::zero());
            }
            p = Poly::from_coeffs(p.coeffs[1..].to_vec());
        }
        if p.degree() == Some(0) {
            return Some(roots);
        }
        if p.degree() == Some(2) {
            // quadratic formula with an exact square test
            let (c, b, a) = (p.coeff(0), p.coeff(1), p.coeff(2));
            let disc = &b * &b - Rational::from_integer(4.into()) * &a * &c;
            if let Some(s) = rational_sqrt(&disc) {
                let two_a = &a + &a;
                for r in [(-&b + &s) / &two_a, (-&b - &s) / &two_a] {
                    if !roots.contains(&r) {
                        roots.push(r);
                    }
                }
            }
            return Some(roots);
        }
        let l = lcm_of_denominators(p.coeffs.iter());
        let ints: Vec<BigInt> = p
            .coeffs
            .iter()
            .map(|c| (c * Rational::from_integer(l.clone())).to_integer())
            .collect();
        let nums = positive_divisors(&ints[0])?;
        let dens = positive_divisors(ints.last().unwrap())?;
        for n in &nums {
            for d in &dens {
                for cand in [Rational::new(n.clone(), d.clone()), -Rational::new(n.clone(), d.clone())] {
                    if p.eval(&cand).is_zero() && !roots.contains(&cand) {
                        roots.push(cand);
                    }
                }
            }
        }
        Some(roots)
    }

    /// Formats with the given variable name, highest degree first.
    pub fn fmt_with(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            if mono.is_empty() {
                out.push_str(&fmt_rational(&abs));
            } else if abs.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&fmt_rational(&abs));
                out.push('*');
                out.push_str(&mono);
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with("x"))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::rational::{rat, ratio};

    #[test]
    fn division_and_gcd() {
        // (x-1)(x+2) and (x-1)(x-3)
        let a = Poly::from_i64(&[-2, 1, 1]);
        let b = Poly::from_i64(&[3, -4, 1]);
        assert_eq!(a.gcd(&b), Poly::from_i64(&[-1, 1]));
        let (q, r) = a.div_rem(&Poly::from_i64(&[-1, 1]));
        assert_eq!(q, Poly::from_i64(&[2, 1]));
        assert!(r.is_zero());
    }

    #[test]
    fn square_roots() {
        let p = Poly::from_i64(&[1, 2, 1]);
        assert_eq!(p.sqrt(), Some(Poly::from_i64(&[1, 1])));
        assert_eq!(Poly::from_i64(&[0, 1]).sqrt(), None);
        let q = &Poly::from_coeffs(vec![ratio(1, 2), rat(3), ratio(-2, 3)]).pow(2) * &Poly::constant(ratio(4, 9));
        assert!(q.sqrt().is_some());
        assert_eq!(Poly::from_i64(&[2, 0, 1]).sqrt(), None);
    }

    #[test]
    fn rational_roots_found() {
        assert_eq!(Poly::from_i64(&[-4, 0, 1]).rational_roots().unwrap().len(), 2);
        assert!(Poly::from_i64(&[-2, 0, 1]).rational_roots().unwrap().is_empty());
        assert!(Poly::from_i64(&[-2, 0, 0, 1]).rational_roots().unwrap().is_empty());
        // 2x^3 - x^2 - 1 has the root 1
        assert_eq!(Poly::from_i64(&[-1, 0, -1, 2]).rational_roots().unwrap(), vec![rat(1)]);
        // 6x^3 - 5x^2 - x + 1 = (2x - 1)(3x^2 - x - 1)
        assert!(Poly::from_i64(&[1, -1, -5, 6]).rational_roots().unwrap().contains(&ratio(1, 2)));
    }

    #[test]
    fn display() {
        assert_eq!(Poly::from_i64(&[1, -3, 1]).fmt_with("t"), "t^2 - 3*t + 1");
        assert_eq!(Poly::from_coeffs(vec![ratio(-1, 2)]).fmt_with("t"), "-1/2");
        assert_eq!(Poly::from_i64(&[0, -1]).fmt_with("t"), "-t");
    }
}
