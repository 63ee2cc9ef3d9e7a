//! Geodesic ray specifications: an eventually periodic word (prefix + period)
//! or a plain finite prefix, verified geodesic up to an explicit horizon.

use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec, Letter};
use serde::{Deserialize, Serialize};

/// A based geodesic walk c with c(0) = identity. `eval(t)` spells the first
/// t letters of prefix followed by repetitions of the period. An empty period
/// makes the ray finite: only t up to the prefix length is evaluable.
#[derive(Debug, Clone)]
pub struct RayWalk {
    prefix: Vec<Letter>,
    period: Vec<Letter>,
    verified_horizon: u32,
}

/// On-disk shape of a ray spec file. Words are space-separated generator
/// names, inverses written with a trailing apostrophe. An empty period
/// string declares a finite ray.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RayFile {
    pub prefix: String,
    #[serde(default)]
    pub period: String,
}

impl RayWalk {
    /// Builds an eventually periodic ray and verifies the geodesic condition
    /// |c(t)| = t for every t up to `horizon`.
    pub fn periodic(
        spec: &GroupSpec,
        prefix: Vec<Letter>,
        period: Vec<Letter>,
        horizon: u32,
    ) -> Result<RayWalk> {
        if period.is_empty() {
            return Err(Error::InvalidWord("period must be nonempty".into()));
        }
        let ray = RayWalk {
            prefix,
            period,
            verified_horizon: 0,
        };
        ray.verify(spec, horizon)
    }

    /// Builds a finite ray (prefix only), verified geodesic over its whole
    /// length. Evaluation beyond the prefix is an error.
    pub fn finite(spec: &GroupSpec, prefix: Vec<Letter>) -> Result<RayWalk> {
        let horizon = prefix.len() as u32;
        let ray = RayWalk {
            prefix,
            period: Vec::new(),
            verified_horizon: 0,
        };
        ray.verify(spec, horizon)
    }

    pub fn from_file(spec: &GroupSpec, file: &RayFile, horizon: u32) -> Result<RayWalk> {
        let prefix = spec.parse_word(&file.prefix)?;
        let period = spec.parse_word(&file.period)?;
        if period.is_empty() {
            RayWalk::finite(spec, prefix)
        } else {
            RayWalk::periodic(spec, prefix, period, horizon)
        }
    }

    fn verify(mut self, spec: &GroupSpec, horizon: u32) -> Result<RayWalk> {
        let horizon = if self.is_finite() {
            horizon.min(self.prefix.len() as u32)
        } else {
            horizon
        };
        let mut e = Element::identity();
        let mut word = String::new();
        for t in 1..=horizon {
            let letter = self.letter_at(t - 1)?;
            e = spec.apply_letter(&e, letter);
            if !word.is_empty() {
                word.push(' ');
            }
            word.push_str(&spec.letter_name(letter));
            let len = spec.length(&e);
            if len != t {
                return Err(Error::NotGeodesic {
                    word,
                    length: len,
                    letters: t,
                });
            }
        }
        self.verified_horizon = horizon;
        Ok(self)
    }

    fn letter_at(&self, i: u32) -> Result<Letter> {
        let i = i as usize;
        if i < self.prefix.len() {
            return Ok(self.prefix[i]);
        }
        if self.period.is_empty() {
            return Err(Error::RayExhausted {
                available: self.prefix.len() as u32,
                requested: i as u32 + 1,
            });
        }
        Ok(self.period[(i - self.prefix.len()) % self.period.len()])
    }

    pub fn is_finite(&self) -> bool {
        self.period.is_empty()
    }

    pub fn period_len(&self) -> u32 {
        self.period.len() as u32
    }

    /// Largest evaluable t (None for periodic rays).
    pub fn max_t(&self) -> Option<u32> {
        self.is_finite().then_some(self.prefix.len() as u32)
    }

    pub fn verified_horizon(&self) -> u32 {
        self.verified_horizon
    }

    /// c(t): the element spelled by the first t letters.
    pub fn eval(&self, spec: &GroupSpec, t: u32) -> Result<Element> {
        let mut e = Element::identity();
        for i in 0..t {
            e = spec.apply_letter(&e, self.letter_at(i)?);
        }
        Ok(e)
    }

    /// c(0), c(1), ..., c(t) as a vector.
    pub fn image_up_to(&self, spec: &GroupSpec, t: u32) -> Result<Vec<Element>> {
        let t = match self.max_t() {
            Some(m) => t.min(m),
            None => t,
        };
        let mut out = Vec::with_capacity(t as usize + 1);
        let mut e = Element::identity();
        out.push(e.clone());
        for i in 0..t {
            e = spec.apply_letter(&e, self.letter_at(i)?);
            out.push(e.clone());
        }
        Ok(out)
    }

    pub fn require_horizon(&self, required: u32) -> Result<()> {
        if self.verified_horizon < required {
            return Err(Error::HorizonTooShort {
                verified: self.verified_horizon,
                required,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn powers_of_a_are_geodesic() {
        let g = fixtures::f2();
        let ray = RayWalk::periodic(&g, vec![], g.parse_word("a").unwrap(), 20).unwrap();
        let a3 = ray.eval(&g, 3).unwrap();
        assert_eq!(a3, g.parse_element("a a a").unwrap());
        assert_eq!(g.length(&a3), 3);
    }

    #[test]
    fn prefix_then_period_evaluates() {
        let g = fixtures::z2();
        let ray = RayWalk::periodic(
            &g,
            g.parse_word("a a").unwrap(),
            g.parse_word("b").unwrap(),
            20,
        )
        .unwrap();
        assert_eq!(ray.eval(&g, 2).unwrap(), g.parse_element("a a").unwrap());
        assert_eq!(ray.eval(&g, 0).unwrap(), Element::identity());
        for s in 0..15u32 {
            for t in 0..15u32 {
                let d = g.distance(&ray.eval(&g, s).unwrap(), &ray.eval(&g, t).unwrap());
                assert_eq!(d, s.abs_diff(t));
            }
        }
    }

    #[test]
    fn non_geodesic_word_is_rejected() {
        let g = fixtures::f2();
        let err = RayWalk::periodic(&g, vec![], g.parse_word("a a'").unwrap(), 10);
        assert!(matches!(err, Err(Error::NotGeodesic { .. })));
    }

    #[test]
    fn finite_ray_bounds_evaluation() {
        let g = fixtures::z2_free_z();
        let ray = RayWalk::finite(&g, g.parse_word("a c a a c").unwrap()).unwrap();
        assert_eq!(ray.max_t(), Some(5));
        assert!(ray.eval(&g, 5).is_ok());
        assert!(matches!(ray.eval(&g, 6), Err(Error::RayExhausted { .. })));
    }
}
