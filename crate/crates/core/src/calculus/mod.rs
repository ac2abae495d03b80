//! Difference operators, polynomial functions and their decomposition into traces
//! of symmetric multi-additive maps.

mod multi;

use std::fmt;
use std::sync::Arc;

use num::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use multi::{
    check_trace, symmetrize_linearity, symmetrize_power_pair, MultiAdditiveMap, MAX_ARITY, SLOT_ANCHOR, SYMMETRY_ANCHOR,
    TRACE_MATCH_ANCHOR,
};

use crate::error::{Error, Result};
use crate::fields::{FieldElement, Rational};
use crate::maps::AdditiveMap;
use crate::report::{check_identity, NamedElement, VerdictReport};
use crate::samples::SampleSet;

type Eval = dyn Fn(&FieldElement) -> Result<FieldElement> + Send + Sync;

/// A unary function on field elements, evaluated exactly.
#[derive(Clone)]
pub struct PointFunction {
    name: String,
    f: Arc<Eval>,
}

impl fmt::Debug for PointFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PointFunction({})", self.name)
    }
}

impl fmt::Display for PointFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl PointFunction {
    pub fn new(name: &str, f: impl Fn(&FieldElement) -> Result<FieldElement> + Send + Sync + 'static) -> Self {
        PointFunction {
            name: name.to_string(),
            f: Arc::new(f),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: &FieldElement) -> Result<FieldElement> {
        (self.f)(x)
    }

    pub fn from_map(map: &AdditiveMap) -> Self {
        let m = map.clone();
        PointFunction::new(&map.to_string(), move |x| m.eval(x))
    }

    pub fn constant(c: FieldElement) -> Self {
        PointFunction::new(&c.to_string(), move |_| Ok(c.clone()))
    }

    pub fn power(k: i64) -> Self {
        PointFunction::new(&format!("x^{k}"), move |x| x.pow(k))
    }

    pub fn plus(&self, other: &PointFunction) -> Self {
        let (a, b) = (self.clone(), other.clone());
        PointFunction::new(&format!("{} + {}", self.name, other.name), move |x| a.eval(x)?.add(&b.eval(x)?))
    }

    pub fn minus(&self, other: &PointFunction) -> Self {
        let (a, b) = (self.clone(), other.clone());
        PointFunction::new(&format!("{} - ({})", self.name, other.name), move |x| a.eval(x)?.sub(&b.eval(x)?))
    }

    pub fn times(&self, other: &PointFunction) -> Self {
        let (a, b) = (self.clone(), other.clone());
        PointFunction::new(&format!("({})*({})", self.name, other.name), move |x| a.eval(x)?.mul(&b.eval(x)?))
    }

    pub fn scaled(&self, r: &Rational) -> Self {
        let (a, r) = (self.clone(), r.clone());
        PointFunction::new(&format!("{}*({})", crate::fields::fmt_rational(&r), self.name), move |x| {
            Ok(a.eval(x)?.scale(&r))
        })
    }
}

/// Δ_h f : x ↦ f(x + h) − f(x).
pub fn delta(f: &PointFunction, h: &FieldElement) -> PointFunction {
    let (g, h) = (f.clone(), h.clone());
    PointFunction::new(&format!("D_{{{h}}}({})", f.name), move |x| g.eval(&x.add(&h)?)?.sub(&g.eval(x)?))
}

/// Δ_{h₁} ⋯ Δ_{hₖ} f; with no spans this is f itself.
pub fn delta_multi(f: &PointFunction, spans: &[FieldElement]) -> PointFunction {
    spans.iter().rev().fold(f.clone(), |acc, h| delta(&acc, h))
}

pub(crate) fn binomial(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub(crate) fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::from(1), |acc, i| acc * BigInt::from(i))
}

pub const POLY_ANCHOR: &str = "D_{y1,...,y(n+1)} f(x) = 0";
pub const TRACE_ANCHOR: &str = "D_{y1,...,yn} f(x) = n! F(y1, ..., yn)";
pub const DECOMPOSE_ANCHOR: &str = "p(x) = sum_{k=0}^{n} f_k(x)";

const DEGREE_TRIALS: usize = 32;
const DEGREE_SEED: u64 = 0x5eed_0001;

/// Checks Δ_{y₁..y_{n+1}} f(x) = 0 on tuples drawn deterministically from the samples.
pub fn poly_degree_check(f: &PointFunction, n: usize, samples: &SampleSet) -> Result<VerdictReport> {
    let xs = samples.elements();
    let mut tuples = Vec::new();
    if !xs.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(DEGREE_SEED + n as u64);
        for _ in 0..DEGREE_TRIALS {
            let mut t = vec![NamedElement::new("x", &xs[rng.gen_range(0..xs.len())])];
            for i in 0..=n {
                t.push(NamedElement::new(&format!("y{}", i + 1), &xs[rng.gen_range(0..xs.len())]));
            }
            tuples.push(t);
        }
    }
    let report = check_identity("poly_degree_check", POLY_ANCHOR, &tuples, |a| {
        let d = delta_multi(f, &a[1..]).eval(&a[0])?;
        Ok((d, a[0].tower().zero()))
    })?;
    Ok(report.with_value("n", n).with_value("function", f))
}

/// Basepoints 0 and 1 plus five further points drawn from the samples.
pub fn standard_basepoints(samples: &SampleSet) -> Vec<FieldElement> {
    let xs = samples.elements();
    let Some(first) = xs.first() else {
        return Vec::new();
    };
    let k = first.tower();
    let mut out = vec![k.zero(), k.one()];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut guard = 0;
    while out.len() < 7 && guard < 100 {
        guard += 1;
        let x = &xs[rng.gen_range(0..xs.len())];
        if !out.contains(x) {
            out.push(x.clone());
        }
    }
    out
}

/// Recovers F(y₁..yₙ) = Δ_{y₁..yₙ} f(x)/n! for a trace f of a symmetric n-additive F,
/// after confirming the difference does not depend on the basepoint x.
pub fn trace_to_multiadditive(
    f: &PointFunction,
    n: usize,
    ys: &[FieldElement],
    basepoints: &[FieldElement],
) -> Result<FieldElement> {
    if ys.len() != n {
        return Err(Error::ArityError(format!("expected {n} arguments, got {}", ys.len())));
    }
    let Some(x0) = basepoints.first() else {
        return Err(Error::ArityError("at least one basepoint is required".into()));
    };
    let g = delta_multi(f, ys);
    let v0 = g.eval(x0)?;
    for x in &basepoints[1..] {
        let v = g.eval(x)?;
        if v != v0 {
            return Err(Error::BasePointDependence {
                first: x0.to_string(),
                at_first: v0.to_string(),
                other: x.to_string(),
                at_other: v.to_string(),
            });
        }
    }
    Ok(v0.scale(&Rational::from_integer(factorial(n)).recip()))
}

/// p = f₀ + … + fₙ with fₖ the trace of a symmetric k-additive map.
#[derive(Clone, Debug)]
pub struct PolynomialDecomposition {
    degree: usize,
    traces: Vec<PointFunction>,
}

impl PolynomialDecomposition {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// The degree-k trace fₖ.
    pub fn trace(&self, k: usize) -> Option<&PointFunction> {
        self.traces.get(k)
    }

    pub fn traces(&self) -> &[PointFunction] {
        &self.traces
    }

    /// Σₖ fₖ(x).
    pub fn eval_sum(&self, x: &FieldElement) -> Result<FieldElement> {
        let mut acc = x.tower().zero();
        for f in &self.traces {
            acc = acc.add(&f.eval(x)?)?;
        }
        Ok(acc)
    }
}

/// Top-down extraction: fₖ(x) = Δ_xᵏ rₖ(0)/k!, then r_{k−1} = rₖ − fₖ, starting from rₙ = p.
pub fn decompose_polynomial(p: &PointFunction, n: usize, samples: &SampleSet) -> Result<PolynomialDecomposition> {
    let check = poly_degree_check(p, n, samples)?;
    if !check.passed() {
        let detail = match &check.witness {
            Some(w) => {
                let inputs: Vec<String> = w.inputs.iter().map(|i| format!("{}={}", i.name, i.value)).collect();
                format!("nonzero difference {} at {}", w.lhs, inputs.join(", "))
            }
            None => "degree check failed".into(),
        };
        return Err(Error::DegreeExceeded { degree: n, detail });
    }
    let traces = (0..=n)
        .map(|k| {
            let p = p.clone();
            PointFunction::new(&format!("f{k}"), move |x| Ok(traces_at(&p, n, x)?.swap_remove(k)))
        })
        .collect();
    Ok(PolynomialDecomposition { degree: n, traces })
}

/// All of f₀(x) … fₙ(x) from the n + 1 values p(j·x). Since fᵢ(j·x) = jⁱ·fᵢ(x),
/// the residual rₖ = p − Σ_{i>k} fᵢ is known at every j·x once the higher traces are.
fn traces_at(p: &PointFunction, n: usize, x: &FieldElement) -> Result<Vec<FieldElement>> {
    let mut vals = (0..=n)
        .map(|j| p.eval(&x.scale(&Rational::from_integer((j as i64).into()))))
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![x.tower().zero(); n + 1];
    for k in (0..=n).rev() {
        let mut acc = x.tower().zero();
        for (j, v) in vals.iter().enumerate().take(k + 1) {
            let c = binomial(k, j);
            let c = if (k - j) % 2 == 1 { -c } else { c };
            acc = acc.add(&v.scale(&Rational::from_integer(c)))?;
        }
        let fk = acc.scale(&Rational::from_integer(factorial(k)).recip());
        for (j, v) in vals.iter_mut().enumerate() {
            let jk = Rational::from_integer(num::pow(BigInt::from(j), k));
            *v = v.sub(&fk.scale(&jk))?;
        }
        out[k] = fk;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{build_tower, rat, GeneratorSpec, Poly, TowerField};
    use crate::maps::{derivation_extend, matrix_map};

    fn qt() -> TowerField {
        build_tower(&[GeneratorSpec::transcendental("t")]).unwrap()
    }

    #[test]
    fn delta_of_square() {
        let k = qt();
        let t = k.generator("t").unwrap();
        let sq = PointFunction::power(2);
        let d = delta(&sq, &t);
        let x = k.integer(3);
        // 2tx + t²
        let expected = t.scale(&rat(6)).add(&t.mul(&t).unwrap()).unwrap();
        assert_eq!(d.eval(&x).unwrap(), expected);
        assert_eq!(delta_multi(&sq, &[]).eval(&x).unwrap(), k.integer(9));
    }

    #[test]
    fn additive_differences() {
        let k = qt();
        let t = k.generator("t").unwrap();
        let d = PointFunction::from_map(&derivation_extend(&k, &[("t", k.one())]).unwrap());
        let x = t.mul(&t).unwrap();
        let h = t.add_rational(&rat(2));
        assert_eq!(delta(&d, &h).eval(&x).unwrap(), k.one());
        assert!(delta_multi(&d, &[h.clone(), x.clone()]).eval(&t).unwrap().is_zero());
    }

    #[test]
    fn degree_of_x_times_derivative() {
        let k = qt();
        let dm = derivation_extend(&k, &[("t", k.one())]).unwrap();
        let f = PointFunction::new("x D(x)", move |x| x.mul(&dm.eval(x)?));
        let s = SampleSet::default_for(&k);
        assert!(poly_degree_check(&f, 1, &s).unwrap().failed());
        assert!(poly_degree_check(&f, 2, &s).unwrap().passed());
        let c = PointFunction::constant(k.integer(4));
        assert!(poly_degree_check(&c, 0, &s).unwrap().passed());
    }

    #[test]
    fn trace_of_biadditive() {
        // f(x) = 2x D(x) is the trace of B(x, y) = x D(y) + y D(x).
        let k = qt();
        let t = k.generator("t").unwrap();
        let dm = derivation_extend(&k, &[("t", k.one())]).unwrap();
        let f = PointFunction::new("2x D(x)", move |x| Ok(x.mul(&dm.eval(x)?)?.scale(&rat(2))));
        let s = SampleSet::default_for(&k);
        let bp = standard_basepoints(&s);
        assert_eq!(bp.len(), 7);
        let t2 = t.mul(&t).unwrap();
        let v = trace_to_multiadditive(&f, 2, &[t.clone(), t2.clone()], &bp).unwrap();
        assert_eq!(v, t2.scale(&rat(3)));
    }

    #[test]
    fn mixed_degree_trace_is_basepoint_free() {
        let k = qt();
        let t = k.generator("t").unwrap();
        let f = PointFunction::power(2).plus(&PointFunction::power(1));
        let bp = standard_basepoints(&SampleSet::default_for(&k));
        let y1 = t.clone();
        let y2 = k.integer(3);
        let v = trace_to_multiadditive(&f, 2, &[y1.clone(), y2.clone()], &bp).unwrap();
        assert_eq!(v, y1.mul(&y2).unwrap());
        let err = trace_to_multiadditive(&PointFunction::power(3), 2, &[y1, y2], &bp).unwrap_err();
        assert!(matches!(err, Error::BasePointDependence { .. }));
    }

    #[test]
    fn decompose_quadratic() {
        let k = qt();
        let p = PointFunction::new("x^2 + 3x + 5", |x| {
            Ok(x.mul(x)?.add(&x.scale(&rat(3)))?.add_rational(&rat(5)))
        });
        let s = SampleSet::default_for(&k);
        let dec = decompose_polynomial(&p, 2, &s).unwrap();
        let t = k.generator("t").unwrap();
        assert_eq!(dec.trace(2).unwrap().eval(&t).unwrap(), t.mul(&t).unwrap());
        assert_eq!(dec.trace(1).unwrap().eval(&t).unwrap(), t.scale(&rat(3)));
        assert_eq!(dec.trace(0).unwrap().eval(&t).unwrap(), k.integer(5));
        let cube = decompose_polynomial(&PointFunction::power(3), 3, &s).unwrap();
        for j in 0..3 {
            assert!(cube.trace(j).unwrap().eval(&t).unwrap().is_zero());
        }
        assert!(matches!(
            decompose_polynomial(&PointFunction::power(3), 2, &s),
            Err(Error::DegreeExceeded { degree: 2, .. })
        ));
    }

    #[test]
    fn decompose_nonlinear_square() {
        let k = build_tower(&[GeneratorSpec::algebraic("r", Poly::from_i64(&[-2, 0, 1]))]).unwrap();
        let r = k.generator("r").unwrap();
        let a = matrix_map(vec![k.one(), r.clone()], vec![k.zero(), k.one()]).unwrap();
        let a2 = a.clone();
        let p = PointFunction::new("a(x)^2 + a(x)", move |x| {
            let v = a2.eval(x)?;
            v.mul(&v)?.add(&v)
        });
        let s = SampleSet::default_for(&k);
        let dec = decompose_polynomial(&p, 2, &s).unwrap();
        for x in SampleSet::random(&k, 10, 11).iter() {
            let ax = a.eval(x).unwrap();
            assert_eq!(dec.trace(2).unwrap().eval(x).unwrap(), ax.mul(&ax).unwrap());
            assert_eq!(dec.trace(1).unwrap().eval(x).unwrap(), ax);
            assert!(dec.trace(0).unwrap().eval(x).unwrap().is_zero());
        }
    }
}
