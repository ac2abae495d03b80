use crate::error::{Error, Result};
use crate::fields::tower::Repr;
use crate::fields::{rat, FieldElement, TowerField};

/// A derivation on a whole tower, determined by the image of the transcendental
/// generator; images of algebraic generators follow from their minimal polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct Derivation {
    tower: TowerField,
    t_image: Option<FieldElement>,
    generators: Vec<FieldElement>,
    images: Vec<FieldElement>,
}

impl Derivation {
    pub(crate) fn extend(tower: &TowerField, assignments: &[(String, FieldElement)]) -> Result<Self> {
        let mut t_image = None;
        for (name, image) in assignments {
            if image.tower() != tower {
                return Err(Error::TowerMismatch);
            }
            if tower.transcendental() == Some(name.as_str()) {
                t_image = Some(image.clone());
            } else if tower.algebraic_names().contains(&name.as_str()) {
                return Err(Error::ForcedImage(name.clone()));
            } else {
                return Err(Error::UnknownGenerator(name.clone()));
            }
        }
        if let Some(t) = tower.transcendental() {
            if t_image.is_none() {
                return Err(Error::MissingImage(t.to_string()));
            }
        }
        let generators: Vec<FieldElement> = tower
            .algebraic_names()
            .iter()
            .map(|n| tower.generator(n).expect("declared"))
            .collect();
        let mut d = Derivation {
            tower: tower.clone(),
            t_image,
            generators,
            images: Vec::new(),
        };
        let data = tower.data.clone();
        for (idx, level) in data.levels.iter().enumerate() {
            let g = d.generators[idx].clone();
            // p(g) = 0 gives Σ D(aⱼ)·gʲ + p'(g)·D(g) = 0.
            let mut num = tower.zero();
            let mut dp = tower.zero();
            let mut gpow = tower.one();
            let mut gpow_prev = tower.zero();
            for (j, a) in level.min_poly.iter().enumerate() {
                let da = d.apply_level(idx, a)?;
                num = num.add(&da.mul(&gpow)?)?;
                if j > 0 {
                    let aj = tower.lift(idx, a.clone());
                    let term = aj.mul(&gpow_prev)?.scale(&rat(j as i64));
                    dp = dp.add(&term)?;
                }
                gpow_prev = gpow.clone();
                gpow = gpow.mul(&g)?;
            }
            if dp.is_zero() {
                return Err(Error::InseparableGenerator(level.name.clone()));
            }
            let image = num.neg().div(&dp).map_err(|e| match e {
                Error::DivisionByZero => Error::InseparableGenerator(level.name.clone()),
                other => other,
            })?;
            d.images.push(image);
        }
        Ok(d)
    }

    pub fn tower(&self) -> &TowerField {
        &self.tower
    }

    /// Image of a generator (transcendental or algebraic).
    pub fn image(&self, name: &str) -> Option<FieldElement> {
        if self.tower.transcendental() == Some(name) {
            return self.t_image.clone();
        }
        let idx = self.tower.algebraic_names().iter().position(|n| *n == name)?;
        self.images.get(idx).cloned()
    }

    pub fn transcendental_image(&self) -> Option<&FieldElement> {
        self.t_image.as_ref()
    }

    pub fn apply(&self, x: &FieldElement) -> Result<FieldElement> {
        if x.tower() != &self.tower {
            return Err(Error::TowerMismatch);
        }
        self.apply_level(self.tower.top(), &x.repr)
    }

    /// D of a representation at level `lvl`, as an element of the whole tower.
    fn apply_level(&self, lvl: usize, r: &Repr) -> Result<FieldElement> {
        match r {
            Repr::Base(f) => match &self.t_image {
                Some(img) if !f.is_zero() => {
                    let df = self.tower.lift(0, Repr::Base(f.derivative()));
                    df.mul(img)
                }
                _ => Ok(self.tower.zero()),
            },
            Repr::Alg(v) => {
                let g = &self.generators[lvl - 1];
                let dg = &self.images[lvl - 1];
                let mut acc = self.tower.zero();
                let mut gpow = self.tower.one();
                let mut gpow_prev = self.tower.zero();
                for (j, c) in v.iter().enumerate() {
                    let dc = self.apply_level(lvl - 1, c)?;
                    acc = acc.add(&dc.mul(&gpow)?)?;
                    if j > 0 {
                        let cl = self.tower.lift(lvl - 1, c.clone());
                        let term = cl.mul(&gpow_prev)?.mul(dg)?.scale(&rat(j as i64));
                        acc = acc.add(&term)?;
                    }
                    gpow_prev = gpow.clone();
                    gpow = gpow.mul(g)?;
                }
                Ok(acc)
            }
        }
    }
}
