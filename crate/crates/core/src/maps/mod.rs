//! Additive (Q-linear) maps on tower fields.

mod derivation;
mod span;

use std::fmt;
use std::sync::Arc;

use num::{One, Zero};

pub use derivation::Derivation;
pub use span::Span;

use crate::error::{Error, Result};
use crate::fields::{fmt_rational, FieldElement, Rational, TowerField};
use crate::report::{check_identity, NamedElement, VerdictReport};
use crate::samples::SampleSet;

/// A Q-linear map given by prescribed images of a Q-basis of its domain.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixMap {
    span: Span,
    images: Vec<FieldElement>,
}

impl MatrixMap {
    pub fn span(&self) -> &Span {
        &self.span
    }

    pub fn images(&self) -> &[FieldElement] {
        &self.images
    }

    pub fn apply(&self, x: &FieldElement) -> Result<FieldElement> {
        let coords = self
            .span
            .coords(x)?
            .ok_or_else(|| Error::OutOfDomain(x.to_string()))?;
        let mut acc = self.span.tower().zero();
        for (c, img) in coords.iter().zip(&self.images) {
            if !c.is_zero() {
                acc = acc.add(&img.scale(c))?;
            }
        }
        Ok(acc)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AdditiveMap {
    /// x ↦ λx for rational λ.
    ScaledIdentity(Rational),
    /// x ↦ λx for an arbitrary field element λ.
    Multiplication(FieldElement),
    StructuralDerivation(Arc<Derivation>),
    Matrix(Arc<MatrixMap>),
    Sum(Vec<AdditiveMap>),
    Scale(Rational, Box<AdditiveMap>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum MapDomain {
    WholeTower,
    QSpan(Span),
}

impl MapDomain {
    pub fn contains(&self, x: &FieldElement) -> bool {
        match self {
            MapDomain::WholeTower => true,
            MapDomain::QSpan(s) => s.contains(x),
        }
    }

    fn intersect(self, other: MapDomain) -> Result<MapDomain> {
        Ok(match (self, other) {
            (MapDomain::WholeTower, d) | (d, MapDomain::WholeTower) => d,
            (MapDomain::QSpan(a), MapDomain::QSpan(b)) => MapDomain::QSpan(a.intersect(&b)?),
        })
    }
}

/// The unique derivation on `tower` with the given images of the transcendental generator.
pub fn derivation_extend(tower: &TowerField, images: &[(&str, FieldElement)]) -> Result<AdditiveMap> {
    let owned: Vec<(String, FieldElement)> =
        images.iter().map(|(n, e)| (n.to_string(), e.clone())).collect();
    Ok(AdditiveMap::StructuralDerivation(Arc::new(Derivation::extend(tower, &owned)?)))
}

/// The Q-linear map sending `basis[i]` to `images[i]`, defined on the Q-span of `basis`.
pub fn matrix_map(basis: Vec<FieldElement>, images: Vec<FieldElement>) -> Result<AdditiveMap> {
    if basis.len() != images.len() {
        return Err(Error::LengthMismatch {
            left: basis.len(),
            right: images.len(),
        });
    }
    let tower = match basis.first() {
        Some(b) => b.tower().clone(),
        None => return Err(Error::DependentBasis),
    };
    if images.iter().any(|i| i.tower() != &tower) {
        return Err(Error::TowerMismatch);
    }
    let span = Span::new(&tower, basis)?;
    Ok(AdditiveMap::Matrix(Arc::new(MatrixMap { span, images })))
}

/// Field conjugation fixing everything but the sign of a quadratic generator `g` with g² rational,
/// as a matrix map on span(1, g).
pub fn quadratic_conjugation(tower: &TowerField, g: &str) -> Result<AdditiveMap> {
    let gen = tower.generator(g)?;
    matrix_map(vec![tower.one(), gen.clone()], vec![tower.one(), gen.neg()])
}

impl AdditiveMap {
    pub fn identity() -> Self {
        AdditiveMap::ScaledIdentity(Rational::one())
    }

    pub fn zero() -> Self {
        AdditiveMap::ScaledIdentity(Rational::zero())
    }

    pub fn scaled_identity(q: Rational) -> Self {
        AdditiveMap::ScaledIdentity(q)
    }

    pub fn plus(&self, other: &AdditiveMap) -> Self {
        let mut parts = match self {
            AdditiveMap::Sum(v) => v.clone(),
            f => vec![f.clone()],
        };
        match other {
            AdditiveMap::Sum(v) => parts.extend(v.iter().cloned()),
            g => parts.push(g.clone()),
        }
        AdditiveMap::Sum(parts)
    }

    pub fn scaled(&self, r: &Rational) -> Self {
        match self {
            AdditiveMap::ScaledIdentity(q) => AdditiveMap::ScaledIdentity(q * r),
            f => AdditiveMap::Scale(r.clone(), Box::new(f.clone())),
        }
    }

    pub fn eval(&self, x: &FieldElement) -> Result<FieldElement> {
        match self {
            AdditiveMap::ScaledIdentity(q) => Ok(x.scale(q)),
            AdditiveMap::Multiplication(l) => l.mul(x),
            AdditiveMap::StructuralDerivation(d) => d.apply(x),
            AdditiveMap::Matrix(m) => m.apply(x),
            AdditiveMap::Sum(parts) => {
                let mut acc = x.tower().zero();
                for p in parts {
                    acc = acc.add(&p.eval(x)?)?;
                }
                Ok(acc)
            }
            AdditiveMap::Scale(r, inner) => Ok(inner.eval(x)?.scale(r)),
        }
    }

    pub fn domain(&self) -> Result<MapDomain> {
        match self {
            AdditiveMap::Matrix(m) => Ok(MapDomain::QSpan(m.span.clone())),
            AdditiveMap::Sum(parts) => parts
                .iter()
                .try_fold(MapDomain::WholeTower, |acc, p| acc.intersect(p.domain()?)),
            AdditiveMap::Scale(_, inner) => inner.domain(),
            _ => Ok(MapDomain::WholeTower),
        }
    }

    /// Splits f into F + λ·id with λ = f(1) and F(1) = 0.
    pub fn linear_part_split(&self, tower: &TowerField) -> Result<(AdditiveMap, FieldElement)> {
        let lambda = self.eval(&tower.one())?;
        let minus = match lambda.as_rational() {
            Some(q) => AdditiveMap::ScaledIdentity(-q),
            None => AdditiveMap::Multiplication(lambda.neg()),
        };
        Ok((self.plus(&minus), lambda))
    }

    /// The structural derivations occurring in this map expression, with their net rational weights.
    pub fn derivation_terms(&self) -> Option<Vec<(Rational, Arc<Derivation>)>> {
        match self {
            AdditiveMap::ScaledIdentity(_) => Some(Vec::new()),
            AdditiveMap::StructuralDerivation(d) => Some(vec![(Rational::one(), d.clone())]),
            AdditiveMap::Sum(parts) => {
                let mut out = Vec::new();
                for p in parts {
                    out.extend(p.derivation_terms()?);
                }
                Some(out)
            }
            AdditiveMap::Scale(r, inner) => Some(
                inner
                    .derivation_terms()?
                    .into_iter()
                    .map(|(w, d)| (w * r, d))
                    .collect(),
            ),
            AdditiveMap::Multiplication(_) | AdditiveMap::Matrix(_) => None,
        }
    }
}

impl fmt::Display for AdditiveMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdditiveMap::ScaledIdentity(q) if q.is_one() => write!(f, "id"),
            AdditiveMap::ScaledIdentity(q) => write!(f, "{}*id", fmt_rational(q)),
            AdditiveMap::Multiplication(l) => write!(f, "({l})*id"),
            AdditiveMap::StructuralDerivation(d) => match (d.tower().transcendental(), d.transcendental_image()) {
                (Some(t), Some(img)) => write!(f, "D[{t} -> {img}]"),
                _ => write!(f, "D[0]"),
            },
            AdditiveMap::Matrix(m) => {
                let imgs: Vec<String> = m.images.iter().map(ToString::to_string).collect();
                write!(f, "matrix[{} -> ({})]", m.span, imgs.join(", "))
            }
            AdditiveMap::Sum(parts) => {
                let s: Vec<String> = parts.iter().map(ToString::to_string).collect();
                write!(f, "{}", s.join(" + "))
            }
            AdditiveMap::Scale(r, inner) => write!(f, "{}*({})", fmt_rational(r), inner),
        }
    }
}

/// Free-function form of [`AdditiveMap::eval`].
pub fn eval(f: &AdditiveMap, x: &FieldElement) -> Result<FieldElement> {
    f.eval(x)
}

/// Free-function form of [`AdditiveMap::linear_part_split`].
pub fn linear_part_split(f: &AdditiveMap, tower: &TowerField) -> Result<(AdditiveMap, FieldElement)> {
    f.linear_part_split(tower)
}

pub const LEIBNIZ_ANCHOR: &str = "f(xy) = x f(y) + y f(x)";
pub const LINEAR_ANCHOR: &str = "f(x) = f(1) x";
pub const ADDITIVE_ANCHOR: &str = "f(x + y) = f(x) + f(y), f(rx) = r f(x)";

/// Unordered sample pairs (including x = y) in sample order.
pub(crate) fn sample_pairs(samples: &SampleSet) -> Vec<Vec<NamedElement>> {
    let xs = samples.elements();
    let mut out = Vec::new();
    for i in 0..xs.len() {
        for y in &xs[i..] {
            out.push(vec![NamedElement::new("x", &xs[i]), NamedElement::new("y", y)]);
        }
    }
    out
}

/// Leibniz rule on all sample pairs. A pass certifies a derivation on the samples only.
pub fn is_derivation_on_samples(f: &AdditiveMap, samples: &SampleSet) -> Result<VerdictReport> {
    let report = check_identity("derivation-on-samples", LEIBNIZ_ANCHOR, &sample_pairs(samples), |a| {
        let (x, y) = (&a[0], &a[1]);
        let lhs = f.eval(&x.mul(y)?)?;
        let rhs = x.mul(&f.eval(y)?)?.add(&y.mul(&f.eval(x)?)?)?;
        Ok((lhs, rhs))
    })?;
    Ok(report.with_value("map", f))
}

pub fn is_linear_on_samples(f: &AdditiveMap, samples: &SampleSet) -> Result<VerdictReport> {
    let Some(first) = samples.elements().first() else {
        return Ok(VerdictReport::new("linear-on-samples", LINEAR_ANCHOR));
    };
    let f1 = f.eval(&first.tower().one())?;
    let tuples: Vec<Vec<NamedElement>> =
        samples.iter().map(|x| vec![NamedElement::new("x", x)]).collect();
    let report = check_identity("linear-on-samples", LINEAR_ANCHOR, &tuples, |a| {
        Ok((f.eval(&a[0])?, f1.mul(&a[0])?))
    })?;
    Ok(report.with_value("f(1)", f1).with_value("map", f))
}

/// Additivity on sample pairs and Q-homogeneity for the given rationals.
pub fn check_additivity(f: &AdditiveMap, samples: &SampleSet, rationals: &[Rational]) -> Result<VerdictReport> {
    let pairs = sample_pairs(samples);
    let add = check_identity("additive-on-samples", ADDITIVE_ANCHOR, &pairs, |a| {
        Ok((f.eval(&a[0].add(&a[1])?)?, f.eval(&a[0])?.add(&f.eval(&a[1])?)?))
    })?;
    if !add.passed() {
        return Ok(add);
    }
    let mut tuples = Vec::new();
    for x in samples.iter() {
        for r in rationals {
            tuples.push(vec![NamedElement::new("x", x), NamedElement::new("r", &x.tower().rational(r))]);
        }
    }
    let hom = check_identity("additive-on-samples", ADDITIVE_ANCHOR, &tuples, |a| {
        Ok((f.eval(&a[0].mul(&a[1])?)?, f.eval(&a[0])?.mul(&a[1])?))
    })?;
    let mut report = hom;
    report.samples_tested += add.samples_tested;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{build_tower, rat, GeneratorSpec, Poly};
    use crate::report::Status;

    fn qt() -> TowerField {
        build_tower(&[GeneratorSpec::transcendental("t")]).unwrap()
    }

    fn q_sqrt2() -> TowerField {
        build_tower(&[GeneratorSpec::algebraic("sqrt2", Poly::from_i64(&[-2, 0, 1]))]).unwrap()
    }

    fn q_t_s() -> TowerField {
        let base = qt();
        let t = base.generator("t").unwrap();
        build_tower(&[
            GeneratorSpec::transcendental("t"),
            GeneratorSpec::algebraic_over("s", vec![t.neg(), base.zero(), base.one()]),
        ])
        .unwrap()
    }

    #[test]
    fn derivative_of_square() {
        let k = qt();
        let t = k.generator("t").unwrap();
        let d = derivation_extend(&k, &[("t", k.one())]).unwrap();
        assert_eq!(d.eval(&t.mul(&t).unwrap()).unwrap(), t.scale(&rat(2)));
    }

    #[test]
    fn forced_image_of_square_root_of_t() {
        // 2s·D(s) = D(t) = 1 characterizes D(s) = 1/(2s).
        let k = q_t_s();
        let s = k.generator("s").unwrap();
        let d = derivation_extend(&k, &[("t", k.one())]).unwrap();
        let ds = d.eval(&s).unwrap();
        assert_eq!(s.scale(&rat(2)).mul(&ds).unwrap(), k.one());
    }

    #[test]
    fn derivations_kill_algebraic_numbers() {
        let k = q_sqrt2();
        let d = derivation_extend(&k, &[]).unwrap();
        for x in SampleSet::random(&k, 20, 3).iter() {
            assert!(d.eval(x).unwrap().is_zero());
        }
    }

    #[test]
    fn image_errors() {
        let k = q_t_s();
        let s = k.generator("s").unwrap();
        assert_eq!(
            derivation_extend(&k, &[("s", s.clone())]).unwrap_err(),
            Error::ForcedImage("s".into())
        );
        assert_eq!(derivation_extend(&k, &[]).unwrap_err(), Error::MissingImage("t".into()));
        assert_eq!(
            derivation_extend(&k, &[("u", s)]).unwrap_err(),
            Error::UnknownGenerator("u".into())
        );
    }

    #[test]
    fn matrix_maps() {
        let k = q_sqrt2();
        let r = k.generator("sqrt2").unwrap();
        let p = matrix_map(vec![k.one(), r.clone()], vec![k.zero(), k.one()]).unwrap();
        let x = r.scale(&rat(2)).add_rational(&rat(5));
        assert_eq!(p.eval(&x).unwrap(), k.integer(2));
        // change of basis: eval(sqrt2) = img2 - img1
        let b = r.add_rational(&rat(1));
        let (i1, i2) = (k.integer(7), r.scale(&rat(3)));
        let m = matrix_map(vec![k.one(), b], vec![i1.clone(), i2.clone()]).unwrap();
        assert_eq!(m.eval(&r).unwrap(), i2.sub(&i1).unwrap());
        assert_eq!(
            matrix_map(vec![k.one()], vec![]).unwrap_err(),
            Error::LengthMismatch { left: 1, right: 0 }
        );
        assert_eq!(
            matrix_map(vec![k.one(), k.integer(2)], vec![k.one(), k.one()]).unwrap_err(),
            Error::DependentBasis
        );
    }

    #[test]
    fn out_of_domain() {
        let k = qt();
        let t = k.generator("t").unwrap();
        let m = matrix_map(vec![k.one(), t.clone()], vec![k.one(), k.one()]).unwrap();
        assert!(matches!(m.eval(&t.mul(&t).unwrap()), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn sums_and_split() {
        let k = qt();
        let t = k.generator("t").unwrap();
        let d = derivation_extend(&k, &[("t", k.one())]).unwrap();
        let f = d.plus(&AdditiveMap::scaled_identity(rat(2)));
        let t2 = t.mul(&t).unwrap();
        assert_eq!(f.eval(&t2).unwrap(), t.scale(&rat(2)).add(&t2.scale(&rat(2))).unwrap());
        let (big_f, lambda) = f.linear_part_split(&k).unwrap();
        assert_eq!(lambda, k.integer(2));
        assert_eq!(big_f.eval(&t2).unwrap(), d.eval(&t2).unwrap());
        assert!(big_f.eval(&k.one()).unwrap().is_zero());
    }

    #[test]
    fn leibniz_and_linearity_verdicts() {
        let k = qt();
        let t = k.generator("t").unwrap();
        let d = derivation_extend(&k, &[("t", k.one())]).unwrap();
        let s = SampleSet::default_for(&k);
        assert_eq!(is_derivation_on_samples(&d, &s).unwrap().status, Status::Pass);
        let id = is_derivation_on_samples(&AdditiveMap::identity(), &s).unwrap();
        assert_eq!(id.status, Status::Fail);
        let w = id.witness.unwrap();
        assert_ne!(w.lhs, w.rhs);
        assert!(is_derivation_on_samples(&AdditiveMap::zero(), &s).unwrap().passed());
        assert!(is_linear_on_samples(&AdditiveMap::scaled_identity(rat(-5)), &s).unwrap().passed());
        let lin = is_linear_on_samples(&d, &SampleSet::new(vec![t.clone()])).unwrap();
        assert_eq!(lin.witness.unwrap().lhs, k.one());
    }

    #[test]
    fn conjugation_is_linear_nowhere_but_additive() {
        let k = q_sqrt2();
        let sigma = quadratic_conjugation(&k, "sqrt2").unwrap();
        let s = SampleSet::default_for(&k);
        assert!(check_additivity(&sigma, &s, &[rat(2), rat(-1)]).unwrap().passed());
        assert!(is_linear_on_samples(&sigma, &s).unwrap().failed());
    }
}
