use std::fmt;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::point::{Point, Sign};
use crate::error::{Error, Result};

/// A partial assignment in {−1, +1, ∗}ⁿ.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Restriction {
    slots: Vec<Option<Sign>>,
}

impl Restriction {
    pub fn all_stars(n: usize) -> Self {
        Restriction { slots: vec![None; n] }
    }

    pub fn from_slots(slots: Vec<Option<Sign>>) -> Self {
        Restriction { slots }
    }

    /// Restriction on `n` coordinates fixing `pairs` and leaving the rest free.
    pub fn fixing(n: usize, pairs: &[(usize, Sign)]) -> Result<Self> {
        let mut r = Restriction::all_stars(n);
        for &(i, s) in pairs {
            if i >= n {
                return Err(Error::DimensionMismatch { expected: n, got: i + 1 });
            }
            if r.slots[i].is_some() {
                return Err(Error::OverlappingSupports { index: i });
            }
            r.slots[i] = Some(s);
        }
        Ok(r)
    }

    /// Uniform assignment on the coordinates `support`; every other coordinate a star.
    pub fn random_assignment<R: Rng + ?Sized>(n: usize, support: &[usize], rng: &mut R) -> Self {
        let mut r = Restriction::all_stars(n);
        for &i in support {
            r.slots[i] = Some(Sign::from_bool(rng.random::<bool>()));
        }
        r
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.slots.len()
    }

    #[inline]
    pub fn get(&self, i: usize) -> Option<Sign> {
        self.slots[i]
    }

    #[inline]
    pub fn is_star(&self, i: usize) -> bool {
        self.slots[i].is_none()
    }

    pub fn slots(&self) -> &[Option<Sign>] {
        &self.slots
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| !self.is_star(i)).collect()
    }

    pub fn stars(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.is_star(i)).collect()
    }

    pub fn star_count(&self) -> usize {
        self.slots.iter().filter(|s| s.is_none()).count()
    }

    pub fn support_len(&self) -> usize {
        self.dim() - self.star_count()
    }

    /// `ρρ′`: merges two restrictions with disjoint supports.
    pub fn compose(&self, other: &Restriction) -> Result<Restriction> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        let slots = self
            .slots
            .iter()
            .zip(&other.slots)
            .enumerate()
            .map(|(i, (a, b))| match (a, b) {
                (Some(_), Some(_)) => Err(Error::OverlappingSupports { index: i }),
                (Some(s), None) | (None, Some(s)) => Ok(Some(*s)),
                (None, None) => Ok(None),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Restriction { slots })
    }

    /// True when `self` extends `base`: it fixes everything `base` fixes, to the same values.
    pub fn extends(&self, base: &Restriction) -> bool {
        self.dim() == base.dim()
            && base
                .slots
                .iter()
                .zip(&self.slots)
                .all(|(b, s)| b.is_none() || b == s)
    }

    /// Fills the stars, in ascending order, with the coordinates of `y`.
    pub fn merge(&self, y: &Point) -> Result<Point> {
        let stars = self.stars();
        if y.dim() != stars.len() {
            return Err(Error::DimensionMismatch { expected: stars.len(), got: y.dim() });
        }
        let mut x = self.base_point();
        for (j, &i) in stars.iter().enumerate() {
            x.set(i, y.get(j));
        }
        Ok(x)
    }

    /// Point with the fixed coordinates set and every star at −1.
    pub fn base_point(&self) -> Point {
        let mut x = Point::all_minus(self.dim());
        for (i, s) in self.slots.iter().enumerate() {
            if let Some(Sign::Plus) = s {
                x.set(i, Sign::Plus);
            }
        }
        x
    }

    /// Lifts a restriction stated over `self`'s stars into a restriction over all coordinates.
    pub fn refine(&self, local: &Restriction) -> Result<Restriction> {
        let stars = self.stars();
        if local.dim() != stars.len() {
            return Err(Error::DimensionMismatch { expected: stars.len(), got: local.dim() });
        }
        let mut out = self.clone();
        for (j, &i) in stars.iter().enumerate() {
            out.slots[i] = local.slots[j];
        }
        Ok(out)
    }

    pub fn to_pattern(&self) -> String {
        self.slots
            .iter()
            .map(|s| s.map_or('*', Sign::symbol))
            .collect()
    }

    pub fn parse_pattern(s: &str) -> Result<Restriction> {
        let slots = s
            .chars()
            .map(|c| match c {
                '+' => Ok(Some(Sign::Plus)),
                '-' => Ok(Some(Sign::Minus)),
                '*' => Ok(None),
                other => Err(Error::Parse(format!("unexpected character {other:?} in restriction"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Restriction { slots })
    }
}

impl fmt::Debug for Restriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Restriction({})", self.to_pattern())
    }
}

impl Serialize for Restriction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_pattern())
    }
}

impl<'de> Deserialize<'de> for Restriction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Restriction::parse_pattern(&s).map_err(serde::de::Error::custom)
    }
}
