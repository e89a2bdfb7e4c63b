use std::fmt;
use std::ops::Neg;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A value in {−1, +1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    #[inline]
    pub fn from_bool(plus: bool) -> Self {
        if plus {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    /// `sign(v)` with the convention `sign(0) = +1`.
    #[inline]
    pub fn of(v: f64) -> Self {
        Sign::from_bool(v >= 0.0)
    }

    #[inline]
    pub fn is_plus(self) -> bool {
        self == Sign::Plus
    }

    #[inline]
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self.value() as f64
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// A point of {−1, 1}ⁿ, bit-packed: bit `i` set means coordinate `i` is +1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Point {
    n: usize,
    words: Vec<u64>,
}

#[inline]
pub(crate) fn word_count(n: usize) -> usize {
    n.div_ceil(64)
}

#[inline]
pub(crate) fn tail_mask(n: usize) -> u64 {
    match n % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

impl Point {
    pub fn all_minus(n: usize) -> Self {
        Point { n, words: vec![0; word_count(n)] }
    }

    pub fn all_plus(n: usize) -> Self {
        let mut p = Point { n, words: vec![u64::MAX; word_count(n)] };
        p.mask_tail();
        p
    }

    pub fn from_signs(signs: &[Sign]) -> Self {
        let mut p = Point::all_minus(signs.len());
        for (i, s) in signs.iter().enumerate() {
            p.set(i, *s);
        }
        p
    }

    /// Point whose coordinate `i` is +1 iff bit `i` of `index` is set (n ≤ 64).
    pub fn from_index(n: usize, index: u64) -> Self {
        assert!(n <= 64, "from_index needs n <= 64");
        let mut p = Point { n, words: vec![index; word_count(n)] };
        p.mask_tail();
        p
    }

    /// Overwrites this point with the coordinates encoded by `index` (n ≤ 64).
    #[inline]
    pub(crate) fn set_index(&mut self, index: u64) {
        if let Some(first) = self.words.first_mut() {
            *first = index;
        }
        self.mask_tail();
    }

    /// Uniform point: every coordinate an independent fair ±1.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut p = Point { n, words: vec![0; word_count(n)] };
        p.randomize(rng);
        p
    }

    /// Refills this point with fresh uniform coordinates.
    #[inline]
    pub fn randomize<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for w in &mut self.words {
            *w = rng.next_u64();
        }
        self.mask_tail();
    }

    #[inline]
    fn mask_tail(&mut self) {
        if let Some(last) = self.words.last_mut() {
            *last &= tail_mask(self.n);
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> Sign {
        debug_assert!(i < self.n);
        Sign::from_bool(self.words[i / 64] >> (i % 64) & 1 == 1)
    }

    #[inline]
    pub fn set(&mut self, i: usize, s: Sign) {
        debug_assert!(i < self.n);
        let bit = 1u64 << (i % 64);
        match s {
            Sign::Plus => self.words[i / 64] |= bit,
            Sign::Minus => self.words[i / 64] &= !bit,
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.n);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn with(&self, i: usize, s: Sign) -> Point {
        let mut p = self.clone();
        p.set(i, s);
        p
    }

    /// Low 64 bits as an index (exact when n ≤ 64).
    #[inline]
    pub fn index(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = Sign> + '_ {
        (0..self.n).map(move |i| self.get(i))
    }

    /// Coordinatewise partial order `self ⪯ other`.
    pub fn precedes(&self, other: &Point) -> bool {
        self.n == other.n && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn to_sign_string(&self) -> String {
        self.iter().map(Sign::symbol).collect()
    }

    pub fn parse_sign_string(s: &str) -> Result<Point> {
        let signs = s
            .chars()
            .map(|c| match c {
                '+' => Ok(Sign::Plus),
                '-' => Ok(Sign::Minus),
                other => Err(Error::Parse(format!("unexpected character {other:?} in point"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if signs.is_empty() {
            return Err(Error::Parse("empty point".into()));
        }
        Ok(Point::from_signs(&signs))
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Point({})", self.to_sign_string())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sign_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedKey;

    #[test]
    fn set_get_flip() {
        let mut p = Point::all_minus(70);
        p.set(3, Sign::Plus);
        p.set(69, Sign::Plus);
        assert_eq!(p.get(3), Sign::Plus);
        assert_eq!(p.get(69), Sign::Plus);
        assert_eq!(p.get(4), Sign::Minus);
        p.flip(3);
        assert_eq!(p.get(3), Sign::Minus);
        assert_eq!(Point::all_plus(70).words()[1], (1 << 6) - 1);
    }

    #[test]
    fn sign_string_round_trip() {
        let p = Point::parse_sign_string("+--+-").unwrap();
        assert_eq!(p.dim(), 5);
        assert_eq!(p.to_sign_string(), "+--+-");
        assert!(Point::parse_sign_string("+x").is_err());
    }

    #[test]
    fn partial_order() {
        let lo = Point::parse_sign_string("-+-").unwrap();
        let hi = Point::parse_sign_string("++-").unwrap();
        assert!(lo.precedes(&hi));
        assert!(!hi.precedes(&lo));
        assert!(lo.precedes(&lo));
    }

    #[test]
    fn random_coordinates_are_unbiased() {
        let mut rng = SeedKey::new(11).rng();
        let draws = 100_000;
        let mut p = Point::all_minus(3);
        let mut sums = [0i64; 3];
        for _ in 0..draws {
            p.randomize(&mut rng);
            for (i, s) in sums.iter_mut().enumerate() {
                *s += p.get(i).value();
            }
        }
        for s in sums {
            let mean = s as f64 / draws as f64;
            assert!(mean.abs() <= 0.02, "mean {mean}");
        }
    }
}
