//! Per-coordinate counting of `f(x)·xᵢ` over a stream of samples.

use crate::oracle::point::tail_mask;
use crate::oracle::{Point, Sign};

const PLANES: usize = 16;
const FLUSH_EVERY: u32 = (1 << PLANES) - 1;

/// Counts, for every coordinate `i`, how many samples had `f(x)·xᵢ = −1`.
///
/// Rows are accumulated in bit-sliced vertical counters (`PLANES` bits per
/// column) and flushed into exact totals before they can overflow.
#[derive(Clone, Debug)]
pub(crate) struct ColumnCounter {
    n: usize,
    words: usize,
    planes: Vec<u64>,
    pending: u32,
    rows: u64,
    totals: Vec<u64>,
}

impl ColumnCounter {
    pub(crate) fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        ColumnCounter { n, words, planes: vec![0; words * PLANES], pending: 0, rows: 0, totals: vec![0; n] }
    }

    pub(crate) fn reset(&mut self) {
        self.planes.fill(0);
        self.totals.fill(0);
        self.pending = 0;
        self.rows = 0;
    }

    #[cfg(test)]
    pub(crate) fn rows(&self) -> u64 {
        self.rows
    }

    #[inline]
    pub(crate) fn add(&mut self, x: &Point, fx: Sign) {
        debug_assert_eq!(x.dim(), self.n);
        let flip = if fx.is_plus() { u64::MAX } else { 0 };
        for (w, &word) in x.words().iter().enumerate() {
            let mut carry = word ^ flip;
            if w + 1 == self.words {
                carry &= tail_mask(self.n);
            }
            for plane in &mut self.planes[w * PLANES..(w + 1) * PLANES] {
                if carry == 0 {
                    break;
                }
                let next = *plane & carry;
                *plane ^= carry;
                carry = next;
            }
        }
        self.rows += 1;
        self.pending += 1;
        if self.pending == FLUSH_EVERY {
            self.flush();
        }
    }

    fn flush(&mut self) {
        for w in 0..self.words {
            let planes = &mut self.planes[w * PLANES..(w + 1) * PLANES];
            for b in 0..64.min(self.n - 64 * w) {
                let mut v = 0u64;
                for (k, plane) in planes.iter().enumerate() {
                    v |= (plane >> b & 1) << k;
                }
                self.totals[64 * w + b] += v;
            }
            planes.fill(0);
        }
        self.pending = 0;
    }

    /// `Σ_samples f(x)·xᵢ` for each coordinate.
    pub(crate) fn correlations(&mut self) -> Vec<i64> {
        if self.pending > 0 {
            self.flush();
        }
        let m = self.rows as i64;
        self.totals.iter().map(|&d| m - 2 * d as i64).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedKey;

    #[test]
    fn matches_naive_sums_across_flushes() {
        let n = 70;
        let mut rng = SeedKey::new(9).rng();
        let mut counter = ColumnCounter::new(n);
        let mut naive = vec![0i64; n];
        let rows = FLUSH_EVERY as usize + 1234;
        for r in 0..rows {
            let x = Point::random(n, &mut rng);
            let fx = Sign::from_bool(r % 3 == 0);
            counter.add(&x, fx);
            for (i, acc) in naive.iter_mut().enumerate() {
                *acc += fx.value() * x.get(i).value();
            }
        }
        assert_eq!(counter.rows(), rows as u64);
        assert_eq!(counter.correlations(), naive);
    }

    #[test]
    fn reset_clears_everything() {
        let mut counter = ColumnCounter::new(3);
        counter.add(&Point::all_plus(3), Sign::Minus);
        counter.reset();
        counter.add(&Point::all_plus(3), Sign::Plus);
        assert_eq!(counter.correlations(), vec![1, 1, 1]);
    }
}
