//! Exact Fourier spectra by enumeration, used as ground truth.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::{BooleanFunction, LtfSpec, LtfTarget, TruthTable};

/// Largest dimension with a full spectrum.
pub const FULL_MAX_DIM: usize = 16;
/// Largest dimension with a degree-≤1 slice.
pub const SLICE_MAX_DIM: usize = TruthTable::MAX_DIM;

#[derive(Clone, Debug, PartialEq, Serialize)]
enum Coefficients {
    /// `f̂(S)` indexed by the bitmask of `S`.
    Full(Vec<f64>),
    /// `f̂(∅)` followed by `f̂({i})`.
    DegreeOne(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactSpectrum {
    n: usize,
    coefficients: Coefficients,
}

/// In-place Walsh–Hadamard transform over integers.
fn fwht(values: &mut [i64]) {
    let mut h = 1;
    while h < values.len() {
        for block in values.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

impl ExactSpectrum {
    pub fn of_table(table: &TruthTable) -> Self {
        let n = table.dim();
        let size = 1usize << n;
        let scale = size as f64;
        if n <= FULL_MAX_DIM {
            let mut values: Vec<i64> = (0..size).map(|idx| table.at(idx).value()).collect();
            fwht(&mut values);
            // bit set means +1, so x_S = (−1)^|S| · (−1)^|S ∩ idx|
            let coefficients = (0..size)
                .map(|s| {
                    let parity = if s.count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
                    parity * values[s] as f64 / scale
                })
                .collect();
            return ExactSpectrum { n, coefficients: Coefficients::Full(coefficients) };
        }
        let mut plus = 0i64;
        let mut plus_with = vec![0i64; n];
        for idx in 0..size {
            if table.at(idx).is_plus() {
                plus += 1;
                for (i, c) in plus_with.iter_mut().enumerate() {
                    *c += (idx >> i & 1) as i64;
                }
            }
        }
        let mut coefficients = Vec::with_capacity(n + 1);
        coefficients.push((2 * plus - size as i64) as f64 / scale);
        coefficients.extend(plus_with.iter().map(|&p| (4 * p - 2 * plus) as f64 / scale));
        ExactSpectrum { n, coefficients: Coefficients::DegreeOne(coefficients) }
    }

    pub fn of_function(f: &dyn BooleanFunction) -> Result<Self> {
        if f.dim() > SLICE_MAX_DIM {
            return Err(Error::DimensionTooLarge { n: f.dim(), max: SLICE_MAX_DIM });
        }
        Ok(Self::of_table(&TruthTable::of(f)?))
    }

    pub fn of_ltf(spec: &LtfSpec) -> Result<Self> {
        Self::of_function(&LtfTarget::new(spec.clone()))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_full(&self) -> bool {
        matches!(self.coefficients, Coefficients::Full(_))
    }

    /// `f̂(S)` for `S` given as a bitmask; `None` outside the stored slice.
    pub fn coefficient(&self, mask: u64) -> Option<f64> {
        match &self.coefficients {
            Coefficients::Full(c) => c.get(mask as usize).copied(),
            Coefficients::DegreeOne(c) => match mask.count_ones() {
                0 => Some(c[0]),
                1 => Some(c[1 + mask.trailing_zeros() as usize]),
                _ => None,
            },
        }
    }

    pub fn mean(&self) -> f64 {
        self.coefficient(0).unwrap_or(0.0)
    }

    pub fn degree_one(&self, i: usize) -> f64 {
        self.coefficient(1 << i).expect("degree-1 coefficients are always stored")
    }

    pub fn degree_one_all(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.degree_one(i)).collect()
    }

    pub fn sum_of_squares(&self, t: &[usize]) -> f64 {
        t.iter().map(|&i| self.degree_one(i).powi(2)).sum()
    }

    pub fn fourth_moment(&self, t: &[usize]) -> f64 {
        t.iter().map(|&i| self.degree_one(i).powi(4)).sum()
    }

    /// `Σ_S f̂(S)²`, available on full spectra only.
    pub fn parseval(&self) -> Option<f64> {
        match &self.coefficients {
            Coefficients::Full(c) => Some(c.iter().map(|v| v * v).sum()),
            Coefficients::DegreeOne(_) => None,
        }
    }
}

/// `Pr_x[f(x) ≠ f(x ⊕ eᵢ)]` for every coordinate, by enumeration.
pub fn influences(table: &TruthTable) -> Vec<f64> {
    let n = table.dim();
    let size = 1usize << n;
    (0..n)
        .map(|i| {
            let flips = (0..size).filter(|&idx| idx >> i & 1 == 0 && table.at(idx) != table.at(idx | 1 << i)).count();
            2.0 * flips as f64 / size as f64
        })
        .collect()
}
