use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::point::{Point, Sign};
use super::restriction::Restriction;
use crate::error::{Error, Result};

/// `f(x) = sign(w · x − θ)` with `sign(0) = +1`.
///
/// Serialises to the instance-file schema `{"n": int, "weights": [f64...], "theta": f64}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LtfSpec {
    n: usize,
    weights: Vec<f64>,
    theta: f64,
}

impl LtfSpec {
    pub fn new(weights: Vec<f64>, theta: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("an LTF needs at least one weight"));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_finite()) {
            return Err(Error::invalid(format!("weight {i} is not finite")));
        }
        if !theta.is_finite() {
            return Err(Error::invalid("threshold is not finite"));
        }
        Ok(LtfSpec { n: weights.len(), weights, theta })
    }

    /// Majority on `n` inputs, `sign(Σ xᵢ)`.
    pub fn majority(n: usize) -> Self {
        LtfSpec::new(vec![1.0; n], 0.0).expect("valid majority")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `P = {i : wᵢ ≥ 0}`; zero weights count as non-negative.
    pub fn positive_indices(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.weights[i] >= 0.0).collect()
    }

    /// `N = {i : wᵢ < 0}`.
    pub fn negative_indices(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.weights[i] < 0.0).collect()
    }

    /// `w · x`, summed in index order.
    pub fn dot(&self, x: &Point) -> f64 {
        let mut s = 0.0;
        for (chunk, &word) in self.weights.chunks(64).zip(x.words()) {
            for (j, w) in chunk.iter().enumerate() {
                s += signed(*w, word >> j);
            }
        }
        s
    }

    /// `(w · x, g · x)` for the drop-negative `g`, each summed in index order.
    pub(crate) fn dot_and_dropped(&self, x: &Point) -> (f64, f64) {
        let (mut s, mut p) = (0.0, 0.0);
        for (chunk, &word) in self.weights.chunks(64).zip(x.words()) {
            for (j, w) in chunk.iter().enumerate() {
                let v = signed(*w, word >> j);
                s += v;
                p += if *w < 0.0 { 0.0 } else { v };
            }
        }
        (s, p)
    }

    pub fn margin(&self, x: &Point) -> f64 {
        self.dot(x) - self.theta
    }

    pub fn eval(&self, x: &Point) -> Result<Sign> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.dim() });
        }
        Ok(self.eval_unchecked(x))
    }

    #[inline]
    pub fn eval_unchecked(&self, x: &Point) -> Sign {
        Sign::from_bool(self.dot(x) >= self.theta)
    }

    /// The LTF induced on `stars(ρ)`: same weights, threshold `θ − Σ_{j ∈ supp ρ} wⱼ ρ(j)`.
    pub fn restrict(&self, rho: &Restriction) -> Result<LtfSpec> {
        if rho.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: rho.dim() });
        }
        let mut weights = Vec::with_capacity(rho.star_count());
        let mut shift = 0.0;
        for (i, slot) in rho.slots().iter().enumerate() {
            match slot {
                None => weights.push(self.weights[i]),
                Some(s) => shift += self.weights[i] * s.as_f64(),
            }
        }
        if weights.is_empty() {
            // Constant function: keep one irrelevant coordinate so the spec stays valid.
            weights.push(0.0);
        }
        Ok(LtfSpec { n: weights.len(), weights, theta: self.theta - shift })
    }

    /// `g` with every negative weight replaced by zero.
    pub fn drop_negative_weights(&self) -> LtfSpec {
        LtfSpec {
            n: self.n,
            weights: self.weights.iter().map(|w| w.max(0.0)).collect(),
            theta: self.theta,
        }
    }

    pub fn is_monotone_by_weights(&self) -> bool {
        self.weights.iter().all(|w| *w >= 0.0)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        LtfSpec::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: LtfSpec = serde_json::from_str(text)?;
        if raw.n != raw.weights.len() {
            return Err(Error::Parse(format!(
                "instance declares n = {} but carries {} weights",
                raw.n,
                raw.weights.len()
            )));
        }
        LtfSpec::new(raw.weights, raw.theta)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("LTF serialises")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json())?;
        Ok(())
    }
}

/// Fast evaluator for points drawn by the samplers.
///
/// Small dimensions use a full truth table; larger ones sum per-byte lookup
/// tables. Both agree with [`LtfSpec::eval_unchecked`] away from ties.
#[derive(Debug)]
pub(crate) enum LtfEvaluator {
    Table { bits: Vec<u64> },
    Bytes { tables: Vec<[f64; 256]>, theta: f64 },
}

pub(crate) const TABLE_MAX_DIM: usize = 18;

impl LtfEvaluator {
    pub(crate) fn new(spec: &LtfSpec) -> Self {
        if spec.dim() <= TABLE_MAX_DIM {
            let size = 1usize << spec.dim();
            let mut bits = vec![0u64; size.div_ceil(64)];
            let mut x = Point::all_minus(spec.dim());
            for idx in 0..size {
                x.set_index(idx as u64);
                if spec.eval_unchecked(&x).is_plus() {
                    bits[idx / 64] |= 1 << (idx % 64);
                }
            }
            LtfEvaluator::Table { bits }
        } else {
            let w = spec.weights();
            let tables = (0..w.len().div_ceil(8))
                .map(|g| {
                    let mut t = [0.0; 256];
                    for (byte, slot) in t.iter_mut().enumerate() {
                        *slot = (0..8)
                            .filter_map(|j| w.get(8 * g + j).map(|wi| if byte >> j & 1 == 1 { *wi } else { -*wi }))
                            .sum();
                    }
                    t
                })
                .collect();
            LtfEvaluator::Bytes { tables, theta: spec.theta() }
        }
    }

    #[inline]
    pub(crate) fn eval(&self, x: &Point) -> Sign {
        match self {
            LtfEvaluator::Table { bits } => {
                let idx = x.index() as usize;
                Sign::from_bool(bits[idx / 64] >> (idx % 64) & 1 == 1)
            }
            LtfEvaluator::Bytes { tables, theta } => {
                // Four partial sums keep the adds off one dependency chain.
                let (mut a, mut b, mut c, mut d) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
                for (&word, chunk) in x.words().iter().zip(tables.chunks(8)) {
                    let mut quads = chunk.chunks_exact(4);
                    let mut wbits = word;
                    for q in &mut quads {
                        a += q[0][(wbits & 0xff) as usize];
                        b += q[1][(wbits >> 8 & 0xff) as usize];
                        c += q[2][(wbits >> 16 & 0xff) as usize];
                        d += q[3][(wbits >> 24 & 0xff) as usize];
                        wbits >>= 32;
                    }
                    for t in quads.remainder() {
                        a += t[(wbits & 0xff) as usize];
                        wbits >>= 8;
                    }
                }
                let acc = (a + b) + (c + d);
                Sign::from_bool(acc >= *theta)
            }
        }
    }
}

/// `w` if the low bit of `bits` is set, else `−w`, without a branch.
#[inline]
fn signed(w: f64, bits: u64) -> f64 {
    f64::from_bits(w.to_bits() ^ ((!bits & 1) << 63))
}
