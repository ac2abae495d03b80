use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{binomial, PointFunction};
use crate::error::{Error, Result};
use crate::fields::{FieldElement, Rational};
use crate::maps::AdditiveMap;
use crate::report::{check_identity, NamedElement, VerdictReport};
use crate::samples::{small_rational, SampleSet};

/// Largest arity accepted by the symmetrizers.
pub const MAX_ARITY: usize = 12;

type Eval = dyn Fn(&[FieldElement]) -> Result<FieldElement> + Send + Sync;

/// An n-ary map, additive in each slot (checked on samples, not assumed).
#[derive(Clone)]
pub struct MultiAdditiveMap {
    name: String,
    arity: usize,
    symmetric: bool,
    f: Arc<Eval>,
}

impl fmt::Debug for MultiAdditiveMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiAdditiveMap({}, arity {})", self.name, self.arity)
    }
}

pub const SLOT_ANCHOR: &str = "F(.., x + r y, ..) = F(.., x, ..) + r F(.., y, ..)";
pub const SYMMETRY_ANCHOR: &str = "F(x_p(1), ..., x_p(n)) = F(x1, ..., xn)";
pub const TRACE_MATCH_ANCHOR: &str = "F(x, ..., x) = phi(x)";

impl MultiAdditiveMap {
    pub fn new(
        name: &str,
        arity: usize,
        symmetric: bool,
        f: impl Fn(&[FieldElement]) -> Result<FieldElement> + Send + Sync + 'static,
    ) -> Result<Self> {
        if arity == 0 {
            return Err(Error::ArityError("arity must be at least 1".into()));
        }
        Ok(MultiAdditiveMap {
            name: name.to_string(),
            arity,
            symmetric,
            f: Arc::new(f),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn eval(&self, xs: &[FieldElement]) -> Result<FieldElement> {
        if xs.len() != self.arity {
            return Err(Error::ArityError(format!(
                "{} takes {} arguments, got {}",
                self.name,
                self.arity,
                xs.len()
            )));
        }
        (self.f)(xs)
    }

    /// The diagonal x ↦ F(x, …, x).
    pub fn trace(&self) -> PointFunction {
        let m = self.clone();
        PointFunction::new(&format!("trace({})", self.name), move |x| m.eval(&vec![x.clone(); m.arity]))
    }

    fn random_tuple(&self, xs: &[FieldElement], rng: &mut ChaCha8Rng) -> Vec<FieldElement> {
        (0..self.arity).map(|_| xs[rng.gen_range(0..xs.len())].clone()).collect()
    }

    /// F(.., xᵢ + r·y, ..) = F(.., xᵢ, ..) + r·F(.., y, ..) for `trials` random
    /// instances per slot, with r a small nonzero rational.
    pub fn check_slot_additivity(&self, samples: &SampleSet, trials: usize, seed: u64) -> Result<VerdictReport> {
        let xs = samples.elements();
        let mut report = VerdictReport::new("slot_additivity", SLOT_ANCHOR);
        if xs.is_empty() {
            return Ok(report);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cases = Vec::new();
        for slot in 0..self.arity {
            for _ in 0..trials {
                let tuple = self.random_tuple(xs, &mut rng);
                let y = xs[rng.gen_range(0..xs.len())].clone();
                let mut r = small_rational(&mut rng);
                if r == Rational::from_integer(0.into()) {
                    r = Rational::from_integer(1.into());
                }
                cases.push((slot, tuple, y, r));
            }
        }
        let tuples: Vec<Vec<NamedElement>> = cases
            .iter()
            .map(|(slot, tuple, y, r)| {
                let mut t: Vec<NamedElement> = tuple
                    .iter()
                    .enumerate()
                    .map(|(i, x)| NamedElement::new(&format!("x{}", i + 1), x))
                    .collect();
                t.push(NamedElement::new("y", y));
                t.push(NamedElement::new("r", &y.tower().rational(r)));
                t.push(NamedElement::new("slot", &y.tower().integer(*slot as i64 + 1)));
                t
            })
            .collect();
        let n = self.arity;
        report = check_identity("slot_additivity", SLOT_ANCHOR, &tuples, |a| {
            let xs = &a[..n];
            let (y, r) = (&a[n], &a[n + 1]);
            let slot = a[n + 2].as_rational().expect("slot index").to_integer();
            let slot: usize = slot.try_into().expect("small slot index");
            let slot = slot - 1;
            let mut moved = xs.to_vec();
            moved[slot] = xs[slot].add(&y.mul(r)?)?;
            let mut ys = xs.to_vec();
            ys[slot] = y.clone();
            let lhs = self.eval(&moved)?;
            let rhs = self.eval(xs)?.add(&self.eval(&ys)?.mul(r)?)?;
            Ok((lhs, rhs))
        })?;
        Ok(report.with_value("trials_per_slot", trials))
    }

    /// Invariance under random permutations of random sample tuples.
    pub fn check_symmetry(&self, samples: &SampleSet, trials: usize, seed: u64) -> Result<VerdictReport> {
        let xs = samples.elements();
        if xs.is_empty() {
            return Ok(VerdictReport::new("symmetry", SYMMETRY_ANCHOR));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tuples = Vec::new();
        for _ in 0..trials {
            let tuple = self.random_tuple(xs, &mut rng);
            let mut perm = tuple.clone();
            perm.shuffle(&mut rng);
            let mut t: Vec<NamedElement> = tuple
                .iter()
                .enumerate()
                .map(|(i, x)| NamedElement::new(&format!("x{}", i + 1), x))
                .collect();
            t.extend(perm.iter().enumerate().map(|(i, x)| NamedElement::new(&format!("p{}", i + 1), x)));
            tuples.push(t);
        }
        let n = self.arity;
        check_identity("symmetry", SYMMETRY_ANCHOR, &tuples, |a| {
            Ok((self.eval(&a[n..])?, self.eval(&a[..n])?))
        })
    }
}

fn product(xs: &[&FieldElement], one: &FieldElement) -> Result<FieldElement> {
    xs.iter().try_fold(one.clone(), |acc, x| acc.mul(x))
}

/// Φ(x₁..xₙ) = f(x₁⋯xₙ) − C(n,m)⁻¹ Σ_{|I|=m} (Π_{j∉I} xⱼ)·g(Π_{i∈I} xᵢ); its trace is
/// f(xⁿ) − x^(n−m)·g(x^m).
pub fn symmetrize_power_pair(f: &AdditiveMap, g: &AdditiveMap, n: usize, m: usize) -> Result<MultiAdditiveMap> {
    if m < 1 || m >= n {
        return Err(Error::ArityError(format!("need n > m >= 1, got n={n}, m={m}")));
    }
    if n > MAX_ARITY {
        return Err(Error::ArityError(format!("arity {n} exceeds {MAX_ARITY}")));
    }
    let weight = Rational::from_integer(binomial(n, m)).recip();
    let subsets: Vec<Vec<usize>> = (0..n).combinations(m).collect();
    let (f, g) = (f.clone(), g.clone());
    MultiAdditiveMap::new(&format!("Phi[{n},{m}]"), n, true, move |xs| {
        let one = xs[0].tower().one();
        let all: Vec<&FieldElement> = xs.iter().collect();
        let head = f.eval(&product(&all, &one)?)?;
        let mut sum = one.tower().zero();
        for subset in &subsets {
            let inside: Vec<&FieldElement> = subset.iter().map(|&i| &xs[i]).collect();
            let outside: Vec<&FieldElement> = (0..xs.len()).filter(|j| !subset.contains(j)).map(|j| &xs[j]).collect();
            let term = product(&outside, &one)?.mul(&g.eval(&product(&inside, &one)?)?)?;
            sum = sum.add(&term)?;
        }
        head.sub(&sum.scale(&weight))
    })
}

/// Φ(x₁..xₙ) = f(x₁⋯xₙ) − f(x₁)⋯f(xₙ); its trace is f(xⁿ) − f(x)ⁿ.
pub fn symmetrize_linearity(f: &AdditiveMap, n: usize) -> Result<MultiAdditiveMap> {
    if n < 2 {
        return Err(Error::ArityError(format!("need n >= 2, got {n}")));
    }
    if n > MAX_ARITY {
        return Err(Error::ArityError(format!("arity {n} exceeds {MAX_ARITY}")));
    }
    let f = f.clone();
    MultiAdditiveMap::new(&format!("Phi_lin[{n}]"), n, true, move |xs| {
        let one = xs[0].tower().one();
        let all: Vec<&FieldElement> = xs.iter().collect();
        let head = f.eval(&product(&all, &one)?)?;
        let mut tail = one;
        for x in xs {
            tail = tail.mul(&f.eval(x)?)?;
        }
        head.sub(&tail)
    })
}

/// Compares the trace of `map` with `target` on every sample.
pub fn check_trace(map: &MultiAdditiveMap, target: &PointFunction, samples: &SampleSet) -> Result<VerdictReport> {
    let tuples: Vec<Vec<NamedElement>> = samples.iter().map(|x| vec![NamedElement::new("x", x)]).collect();
    let tr = map.trace();
    let r = check_identity("trace", TRACE_MATCH_ANCHOR, &tuples, |a| Ok((tr.eval(&a[0])?, target.eval(&a[0])?)))?;
    Ok(r.with_value("map", map.name()).with_value("target", target.name()))
}
