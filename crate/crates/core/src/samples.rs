//! Deterministic sample sets standing in for "all x in the field".

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fields::{ratio, FieldElement, MobiusCoeffs, Rational, TowerField};
use crate::maps::Span;

#[derive(Clone, Debug, PartialEq)]
pub enum Constraint {
    NonZero,
    MobiusPoleFree { m: MobiusCoeffs, n: i64 },
    Excluding(Vec<FieldElement>),
    InSpan(usize),
    Custom(String),
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::NonZero => write!(f, "nonzero"),
            Constraint::MobiusPoleFree { m, n } => write!(f, "pole-free for M={m}, n={n}"),
            Constraint::Excluding(xs) => {
                let xs: Vec<String> = xs.iter().map(ToString::to_string).collect();
                write!(f, "excluding {}", xs.join(", "))
            }
            Constraint::InSpan(d) => write!(f, "in a {d}-dimensional Q-span"),
            Constraint::Custom(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    elements: Vec<FieldElement>,
    constraints: Vec<Constraint>,
}

const RATIONALS: [(i64, i64); 20] = [
    (2, 1),
    (3, 1),
    (-1, 1),
    (1, 2),
    (-2, 3),
    (5, 1),
    (7, 4),
    (-3, 1),
    (1, 1),
    (4, 3),
    (-5, 2),
    (6, 1),
    (3, 5),
    (-7, 1),
    (9, 2),
    (8, 1),
    (-1, 3),
    (11, 1),
    (5, 6),
    (-4, 1),
];

impl SampleSet {
    pub fn new(elements: Vec<FieldElement>) -> Self {
        SampleSet {
            elements,
            constraints: Vec::new(),
        }
    }

    pub fn elements(&self) -> &[FieldElement] {
        &self.elements
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, FieldElement> {
        self.elements.iter()
    }

    /// The 20-element default: small rationals, polynomials of degree at most 2 in
    /// the transcendental, simple expressions in each algebraic generator, and
    /// mixed elements, interleaved in that order.
    pub fn default_for(tower: &TowerField) -> Self {
        Self::default_sized(tower, 20)
    }

    pub fn default_sized(tower: &TowerField, size: usize) -> Self {
        let mut categories: Vec<Vec<FieldElement>> = Vec::new();
        categories.push(
            RATIONALS
                .iter()
                .map(|&(n, d)| tower.rational(&ratio(n, d)))
                .collect(),
        );
        let t = tower.transcendental().map(|name| tower.generator(name).expect("declared"));
        if let Some(t) = &t {
            let polys: [[i64; 3]; 10] = [
                [0, 1, 0],
                [1, 1, 0],
                [-2, 0, 1],
                [-3, 2, 0],
                [1, 1, 1],
                [0, -1, 0],
                [-1, 0, 3],
                [0, 2, 1],
                [1, -1, 0],
                [2, -3, 1],
            ];
            categories.push(polys.iter().map(|c| poly_in(tower, t, c)).collect());
        }
        let gens: Vec<FieldElement> = tower
            .algebraic_names()
            .iter()
            .map(|n| tower.generator(n).expect("declared"))
            .collect();
        if !gens.is_empty() {
            let mut alg = Vec::new();
            let shapes: [(i64, i64, i64); 7] = [(0, 1, 0), (1, 1, 0), (2, -3, 0), (0, 1, 1), (-1, 1, 0), (0, -1, 0), (3, 0, 1)];
            for &(c0, c1, c2) in &shapes {
                for g in &gens {
                    let g2 = g.mul(g).expect("same tower");
                    let e = tower
                        .integer(c0)
                        .add(&g.scale(&Rational::from_integer(c1.into())))
                        .and_then(|e| e.add(&g2.scale(&Rational::from_integer(c2.into()))))
                        .expect("same tower");
                    alg.push(e);
                }
            }
            for (i, g) in gens.iter().enumerate() {
                for h in &gens[i + 1..] {
                    alg.push(g.mul(h).expect("same tower"));
                    alg.push(g.add(h).expect("same tower"));
                }
            }
            categories.push(alg);
        }
        if let (Some(t), Some(g)) = (&t, gens.first()) {
            let one = tower.one();
            let mixed = vec![
                t.add(g).expect("same tower"),
                t.mul(g).and_then(|x| x.sub(&one)).expect("same tower"),
                t.add(&one).and_then(|x| x.mul(g)).expect("same tower"),
                t.mul(t).and_then(|x| x.mul(g)).and_then(|x| x.add(&one)).expect("same tower"),
            ];
            categories.push(mixed);
        }
        let mut out: Vec<FieldElement> = Vec::new();
        let mut idx = 0;
        while out.len() < size {
            let mut progressed = false;
            for cat in &categories {
                if let Some(e) = cat.get(idx) {
                    progressed = true;
                    if !e.is_zero() && !out.contains(e) && out.len() < size {
                        out.push(e.clone());
                    }
                }
            }
            if !progressed {
                break;
            }
            idx += 1;
        }
        let mut s = Self::new(out);
        s.constraints.push(Constraint::NonZero);
        s
    }

    /// `n` distinct nonzero pseudo-random elements, reproducible from `seed`.
    pub fn random(tower: &TowerField, n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let basis = tower.power_basis();
        let t = tower.transcendental().map(|name| tower.generator(name).expect("declared"));
        let mut out: Vec<FieldElement> = Vec::new();
        let mut attempts = 0;
        while out.len() < n && attempts < 50 * n + 100 {
            attempts += 1;
            let mut e = tower.zero();
            for b in &basis {
                if !rng.gen_bool(0.7) {
                    continue;
                }
                let coeff = match &t {
                    Some(t) => {
                        let c = [small_rational(&mut rng), small_rational(&mut rng), small_rational(&mut rng)];
                        let deg = rng.gen_range(0..3usize);
                        let mut acc = tower.zero();
                        for (i, ci) in c.iter().enumerate().take(deg + 1) {
                            acc = acc.add(&t.pow(i as i64).expect("power").scale(ci)).expect("same tower");
                        }
                        if rng.gen_bool(0.15) {
                            let shift = Rational::from_integer(rng.gen_range(1..4i64).into());
                            acc = acc.div(&t.add_rational(&shift)).expect("nonzero");
                        }
                        acc
                    }
                    None => tower.rational(&small_rational(&mut rng)),
                };
                e = e.add(&coeff.mul(b).expect("same tower")).expect("same tower");
            }
            if !e.is_zero() && !out.contains(&e) {
                out.push(e);
            }
        }
        let mut s = Self::new(out);
        s.constraints.push(Constraint::NonZero);
        s
    }

    /// Keeps the elements satisfying `keep`, recording `constraint`.
    pub fn filter(mut self, constraint: Constraint, keep: impl Fn(&FieldElement) -> bool) -> Self {
        self.elements.retain(|e| keep(e));
        if !self.constraints.contains(&constraint) {
            self.constraints.push(constraint);
        }
        self
    }

    pub fn nonzero(self) -> Self {
        self.filter(Constraint::NonZero, |e| !e.is_zero())
    }

    /// Drops poles of x ↦ (a·xⁿ+b)/(c·xⁿ+d), and zero when n < 0.
    pub fn pole_free(self, m: &MobiusCoeffs, n: i64) -> Self {
        let m2 = m.clone();
        self.filter(Constraint::MobiusPoleFree { m: m.clone(), n }, move |e| !m2.is_pole(n, e))
    }

    pub fn excluding(self, xs: &[FieldElement]) -> Self {
        let xs2 = xs.to_vec();
        self.filter(Constraint::Excluding(xs.to_vec()), move |e| !xs2.contains(e))
    }

    pub fn in_span(self, span: &Span) -> Self {
        let dim = span.dim();
        self.filter(Constraint::InSpan(dim), |e| span.contains(e))
    }

    pub fn take(mut self, n: usize) -> Self {
        self.elements.truncate(n);
        self
    }

    /// Appends elements not already present.
    pub fn extend(mut self, more: &[FieldElement]) -> Self {
        for e in more {
            if !self.elements.contains(e) {
                self.elements.push(e.clone());
            }
        }
        self
    }
}

fn poly_in(tower: &TowerField, t: &FieldElement, c: &[i64; 3]) -> FieldElement {
    let t2 = t.mul(t).expect("same tower");
    tower
        .integer(c[0])
        .add(&t.scale(&Rational::from_integer(c[1].into())))
        .and_then(|x| x.add(&t2.scale(&Rational::from_integer(c[2].into()))))
        .expect("same tower")
}

pub(crate) fn small_rational(rng: &mut impl Rng) -> Rational {
    ratio(rng.gen_range(-5..=5), rng.gen_range(1..=4))
}
