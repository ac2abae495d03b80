use num::Zero;

use crate::error::{Error, Result};
use crate::fields::{fmt_rational, FieldElement, MobiusCoeffs, Rational};
use crate::maps::{is_derivation_on_samples, AdditiveMap};
use crate::report::{check_identity, NamedElement, VerdictReport};
use crate::samples::SampleSet;

use super::tower_of;

pub const MOBIUS_ANCHOR: &str = "phi(x) = f((a x^n + b)/(c x^n + d)) - x^(n-1) g(x)/(c x^n + d)^2";
pub const STAR_ANCHOR: &str = "f((a x^n + b)/(c x^n + d)) = x^(n-1) g(x)/(c x^n + d)^2";
pub const TRIANGLE_ANCHOR: &str = "f((a x^n + b)/(c x^n + d)) = (a g(x)^n + b)/(c g(x)^n + d)";

fn named(samples: &SampleSet) -> Vec<Vec<NamedElement>> {
    samples.iter().map(|x| vec![NamedElement::new("x", x)]).collect()
}

/// x^(n−1)·g(x)/(c·xⁿ + d)².
fn star_rhs(g: &AdditiveMap, n: i64, m: &MobiusCoeffs, x: &FieldElement) -> Result<FieldElement> {
    let den = m.denominator(n, x)?;
    if den.is_zero() {
        return Err(Error::PoleHit(format!("c*x^{n} + d vanishes at x = {x}")));
    }
    x.pow(n - 1)?.mul(&g.eval(x)?)?.div(&den.mul(&den)?)
}

/// φ(x) = f(M(xⁿ)) − x^(n−1)·g(x)/(c·xⁿ + d)², with f applied to the substitution.
pub fn phi_mobius(f: &AdditiveMap, g: &AdditiveMap, n: i64, m: &MobiusCoeffs, x: &FieldElement) -> Result<FieldElement> {
    f.eval(&m.apply(n, x)?)?.sub(&star_rhs(g, n, m, x)?)
}

fn pole_free(samples: &SampleSet, m: &MobiusCoeffs, n: i64) -> SampleSet {
    samples.clone().nonzero().pole_free(m, n)
}

fn check_n(n: i64) -> Result<()> {
    if n == 0 {
        return Err(Error::ParameterOutOfRange("n must be nonzero".into()));
    }
    Ok(())
}

/// Forward check for f = F + α·id and g = λ·F + β·id with F a derivation:
/// φ(x) = α·M(xⁿ) − β·xⁿ/(c·xⁿ + d)². The factor λ defaults to n·det(M),
/// the value for which the derivation parts cancel.
pub fn verify_mobius_forward(
    f_der: &AdditiveMap,
    alpha: &Rational,
    beta: &Rational,
    n: i64,
    m: &MobiusCoeffs,
    samples: &SampleSet,
    g_factor: Option<&Rational>,
) -> Result<VerdictReport> {
    check_n(n)?;
    if m.c().is_zero() && n == 1 {
        return Err(Error::ParameterOutOfRange("c = 0 requires n != 1".into()));
    }
    if m.d().is_zero() && n == -1 {
        return Err(Error::ParameterOutOfRange("d = 0 requires n != -1".into()));
    }
    let s = pole_free(samples, m, n);
    tower_of(&s)?;
    let default_factor = m.det() * Rational::from_integer(n.into());
    let factor = g_factor.cloned().unwrap_or(default_factor);
    let f = f_der.plus(&AdditiveMap::scaled_identity(alpha.clone()));
    let g = f_der.scaled(&factor).plus(&AdditiveMap::scaled_identity(beta.clone()));
    let pre = is_derivation_on_samples(f_der, &s)?;
    let main = check_identity("mobius_forward", MOBIUS_ANCHOR, &named(&s), |a| {
        let x = &a[0];
        let lhs = phi_mobius(&f, &g, n, m, x)?;
        let den = m.denominator(n, x)?;
        let xn = x.pow(n)?;
        let rhs = m.apply(n, x)?.scale(alpha).sub(&xn.scale(beta).div(&den.mul(&den)?)?)?;
        Ok((lhs, rhs))
    })?;
    let r = VerdictReport::new("mobius_forward", MOBIUS_ANCHOR).with_sub_verdicts(vec![pre, main]);
    Ok(r.with_value("M", m)
        .with_value("n", n)
        .with_value("alpha", fmt_rational(alpha))
        .with_value("beta", fmt_rational(beta))
        .with_value("g_factor", fmt_rational(&factor))
        .with_value("target", "alpha (a x^n + b)/(c x^n + d) - beta x^n/(c x^n + d)^2"))
}

/// f(M(xⁿ)) = x^(n−1)·g(x)/(c·xⁿ + d)² on pole-free nonzero samples.
pub fn check_star(f: &AdditiveMap, g: &AdditiveMap, n: i64, m: &MobiusCoeffs, samples: &SampleSet) -> Result<VerdictReport> {
    check_n(n)?;
    let s = pole_free(samples, m, n);
    tower_of(&s)?;
    let r = check_identity("star", STAR_ANCHOR, &named(&s), |a| {
        let x = &a[0];
        Ok((f.eval(&m.apply(n, x)?)?, star_rhs(g, n, m, x)?))
    })?;
    Ok(r.with_value("M", m).with_value("n", n).with_value("f", f).with_value("g", g))
}

/// f(M(xⁿ)) = M(g(x)ⁿ) on samples where both sides are pole-free.
pub fn check_triangle(f: &AdditiveMap, g: &AdditiveMap, n: i64, m: &MobiusCoeffs, samples: &SampleSet) -> Result<VerdictReport> {
    check_n(n)?;
    let s = pole_free(samples, m, n);
    let (g2, m2) = (g.clone(), m.clone());
    let s = s.filter(
        crate::samples::Constraint::Custom(format!("c g(x)^{n} + d != 0")),
        move |x| match g2.eval(x) {
            Ok(gx) => !m2.is_pole(n, &gx),
            Err(_) => true,
        },
    );
    tower_of(&s)?;
    let r = check_identity("triangle", TRIANGLE_ANCHOR, &named(&s), |a| {
        let x = &a[0];
        Ok((f.eval(&m.apply(n, x)?)?, m.apply(n, &g.eval(x)?)?))
    })?;
    Ok(r.with_value("M", m).with_value("n", n).with_value("f", f).with_value("g", g))
}
