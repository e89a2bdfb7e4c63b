use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit_open, Error, Result};
use crate::oracle::{LtfSpec, Point, TruthTable};

/// Largest dimension accepted by the matching oracle.
pub const MATCHING_MAX_DIM: usize = 12;
/// Largest dimension accepted by the exact LTF distance.
pub const EXACT_MAX_DIM: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMethod {
    Matching,
    DropNegativeExact,
    DropNegativeMc,
}

impl DistanceMethod {
    pub fn name(self) -> &'static str {
        match self {
            DistanceMethod::Matching => "matching",
            DistanceMethod::DropNegativeExact => "drop_negative_exact",
            DistanceMethod::DropNegativeMc => "drop_negative_mc",
        }
    }

    pub fn is_exact(self) -> bool {
        !matches!(self, DistanceMethod::DropNegativeMc)
    }
}

/// Distance to the nearest monotone function.
///
/// Exact reports carry `count` with `value == count / 2ⁿ` and radius 0.
/// Monte-Carlo reports carry `samples` and a Hoeffding radius. `value ≤ 1/2` always.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub method: DistanceMethod,
    pub n: usize,
    pub count: Option<u64>,
    pub samples: Option<u64>,
    pub value: f64,
    pub radius: f64,
}

impl DistanceReport {
    fn exact(method: DistanceMethod, n: usize, count: u64) -> Self {
        debug_assert!(count <= (1u64 << n) >> 1);
        DistanceReport {
            method,
            n,
            count: Some(count),
            samples: None,
            value: count as f64 / (1u64 << n) as f64,
            radius: 0.0,
        }
    }

    /// Distance 0 for an LTF known to have no negative weight, so `f = g` pointwise.
    pub fn monotone_by_construction(n: usize) -> Self {
        DistanceReport {
            method: DistanceMethod::DropNegativeExact,
            n,
            count: Some(0),
            samples: None,
            value: 0.0,
            radius: 0.0,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.count.is_some()
    }

    /// `(count, 2ⁿ)` for exact reports with `n < 64`.
    pub fn fraction(&self) -> Option<(u64, u64)> {
        Some((self.count?, 1u64.checked_shl(self.n as u32)?))
    }

    /// Lower end of the confidence interval; `value` itself for exact reports.
    pub fn lower(&self) -> f64 {
        (self.value - self.radius).max(0.0)
    }

    /// True when the report certifies distance at least `eps`.
    pub fn certifies_at_least(&self, eps: f64) -> bool {
        self.lower() >= eps
    }
}

/// Exact distance of an explicit function from monotone, as the maximum
/// matching in the violation graph over `{(x, y) : x ⪯ y, f(x) = +1, f(y) = −1}`
/// divided by 2ⁿ.
pub fn dist_to_monotone_matching(f: &TruthTable) -> Result<DistanceReport> {
    let n = f.dim();
    if n > MATCHING_MAX_DIM {
        return Err(Error::DimensionTooLarge { n, max: MATCHING_MAX_DIM });
    }
    let size = f.len();
    let full = size - 1;
    // Dense ids for each side.
    let mut id = vec![usize::MAX; size];
    let (mut left, mut right) = (0usize, 0usize);
    for (x, slot) in id.iter_mut().enumerate() {
        if f.at(x).is_plus() {
            *slot = left;
            left += 1;
        } else {
            *slot = right;
            right += 1;
        }
    }
    let mut offsets = Vec::with_capacity(left + 1);
    let mut targets = Vec::new();
    offsets.push(0);
    for x in (0..size).filter(|&x| f.at(x).is_plus()) {
        let free = full & !x;
        let mut s = free;
        loop {
            let y = x | s;
            if !f.at(y).is_plus() {
                targets.push(id[y]);
            }
            if s == 0 {
                break;
            }
            s = (s - 1) & free;
        }
        offsets.push(targets.len());
    }
    let matched = hopcroft_karp(left, right, &offsets, &targets);
    Ok(DistanceReport::exact(DistanceMethod::Matching, n, matched as u64))
}

const FREE: usize = usize::MAX;

/// Maximum matching size of a bipartite graph in CSR form (`offsets.len() == left + 1`).
fn hopcroft_karp(left: usize, right: usize, offsets: &[usize], targets: &[usize]) -> usize {
    let adj = |u: usize| &targets[offsets[u]..offsets[u + 1]];
    let mut mate_l = vec![FREE; left];
    let mut mate_r = vec![FREE; right];
    let mut layer = vec![0usize; left];
    let mut cursor = vec![0usize; left];
    let mut matched = 0;
    loop {
        // BFS layers from every free left vertex; `reachable` records whether a free right vertex was seen.
        let mut queue = VecDeque::new();
        for u in 0..left {
            if mate_l[u] == FREE {
                layer[u] = 0;
                queue.push_back(u);
            } else {
                layer[u] = FREE;
            }
        }
        let mut reachable = false;
        while let Some(u) = queue.pop_front() {
            for &v in adj(u) {
                match mate_r[v] {
                    FREE => reachable = true,
                    w if layer[w] == FREE => {
                        layer[w] = layer[u] + 1;
                        queue.push_back(w);
                    }
                    _ => {}
                }
            }
        }
        if !reachable {
            return matched;
        }
        cursor.iter_mut().enumerate().for_each(|(u, c)| *c = offsets[u]);
        let mut stack = Vec::new();
        for root in 0..left {
            if mate_l[root] != FREE {
                continue;
            }
            // Iterative layered DFS; `stack` holds the left vertices on the current path.
            stack.clear();
            stack.push(root);
            while let Some(&u) = stack.last() {
                if cursor[u] == offsets[u + 1] {
                    layer[u] = FREE;
                    stack.pop();
                    continue;
                }
                let v = targets[cursor[u]];
                let w = mate_r[v];
                if w == FREE {
                    // Augment along the stack, each left vertex taking the edge under its cursor.
                    for &p in &stack {
                        let q = targets[cursor[p]];
                        mate_l[p] = q;
                        mate_r[q] = p;
                    }
                    matched += 1;
                    break;
                }
                if layer[w] == layer[u] + 1 {
                    stack.push(w);
                } else {
                    cursor[u] += 1;
                }
            }
            // Left vertices on a failed or used path must not be revisited this phase.
            for &p in &stack {
                layer[p] = FREE;
            }
        }
    }
}

/// Truth table evaluated with [`LtfSpec::eval_unchecked`], so ties follow the spec exactly.
pub fn ltf_table(spec: &LtfSpec) -> Result<TruthTable> {
    TruthTable::from_fn(spec.dim(), |x| spec.eval_unchecked(x))
}

fn check_exact_dim(n: usize) -> Result<()> {
    if n > EXACT_MAX_DIM {
        return Err(Error::DimensionTooLarge { n, max: EXACT_MAX_DIM });
    }
    Ok(())
}

/// Exact `|{x : f(x) ≠ g(x)}| / 2ⁿ` for the drop-negative LTF `g`.
///
/// Also computes `Σ_{x′} min(c⁺(x′), 2^|N| − c⁺(x′))` over assignments `x′`
/// to the non-negative coordinates, where `c⁺(x′)` counts the completions on
/// which `f = +1`.
///
/// # Panics
/// If the two counts disagree.
pub fn dist_ltf_to_monotone_exact(spec: &LtfSpec) -> Result<DistanceReport> {
    let n = spec.dim();
    check_exact_dim(n)?;
    let g_spec = spec.drop_negative_weights();
    let f = ltf_table(spec)?;
    let g = ltf_table(&g_spec)?;
    let direct = (0..f.len()).filter(|&x| f.at(x) != g.at(x)).count() as u64;

    let neg_mask: usize = spec.negative_indices().iter().map(|&i| 1usize << i).sum();
    let pos_mask = (f.len() - 1) & !neg_mask;
    let completions = 1u64 << spec.negative_indices().len();
    let mut split = 0u64;
    let mut xp = pos_mask;
    loop {
        let mut plus = 0u64;
        let mut y = neg_mask;
        loop {
            plus += u64::from(f.at(xp | y).is_plus());
            if y == 0 {
                break;
            }
            y = (y - 1) & neg_mask;
        }
        split += plus.min(completions - plus);
        if xp == 0 {
            break;
        }
        xp = (xp - 1) & pos_mask;
    }
    assert_eq!(direct, split, "disagreement count and per-fibre minority count differ for {spec:?}");
    Ok(DistanceReport::exact(DistanceMethod::DropNegativeExact, n, direct))
}

/// Monte-Carlo estimate of `Pr[f ≠ g]` with Hoeffding radius `√(ln(2/δ)/(2s))`.
pub fn dist_ltf_to_monotone_mc<R: Rng + ?Sized>(
    spec: &LtfSpec,
    samples: u64,
    delta: f64,
    rng: &mut R,
) -> Result<DistanceReport> {
    check_unit_open("delta", delta)?;
    if samples == 0 {
        return Err(Error::invalid("at least one sample is needed"));
    }
    let mut x = Point::all_minus(spec.dim());
    let mut differ = 0u64;
    for _ in 0..samples {
        x.randomize(rng);
        let (f, g) = spec.dot_and_dropped(&x);
        differ += u64::from((f >= spec.theta()) != (g >= spec.theta()));
    }
    Ok(DistanceReport {
        method: DistanceMethod::DropNegativeMc,
        n: spec.dim(),
        count: None,
        samples: Some(samples),
        value: (differ as f64 / samples as f64).min(0.5),
        radius: hoeffding_radius(samples, delta),
    })
}

pub fn hoeffding_radius(samples: u64, delta: f64) -> f64 {
    ((2.0 / delta).ln() / (2.0 * samples as f64)).sqrt()
}

/// Samples needed for the Hoeffding radius to drop to `radius`.
pub fn samples_for_radius(radius: f64, delta: f64) -> u64 {
    ((2.0 / delta).ln() / (2.0 * radius * radius)).ceil() as u64
}

/// Exact distance when `n` allows it, otherwise Monte-Carlo with the given radius.
pub fn dist_ltf_to_monotone<R: Rng + ?Sized>(
    spec: &LtfSpec,
    radius: f64,
    delta: f64,
    rng: &mut R,
) -> Result<DistanceReport> {
    if spec.dim() <= EXACT_MAX_DIM {
        dist_ltf_to_monotone_exact(spec)
    } else {
        dist_ltf_to_monotone_mc(spec, samples_for_radius(radius, delta), delta, rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::Sign;
    use crate::rng::SeedKey;
    use proptest::prelude::*;

    fn table(spec: &LtfSpec) -> TruthTable {
        ltf_table(spec).unwrap()
    }

    fn is_monotone(bits: u64, n: usize) -> bool {
        let size = 1usize << n;
        (0..size).all(|x| (0..n).all(|i| x >> i & 1 == 1 || bits >> x & 1 <= bits >> (x | 1 << i) & 1))
    }

    /// Minimum Hamming distance to any monotone function, by listing them all.
    fn brute_force_count(f: &TruthTable) -> u64 {
        let n = f.dim();
        let size = 1usize << n;
        let fb: u64 = (0..size).filter(|&x| f.at(x).is_plus()).map(|x| 1u64 << x).sum();
        (0..1u64 << size)
            .filter(|&g| is_monotone(g, n))
            .map(|g| u64::from((g ^ fb).count_ones()))
            .min()
            .unwrap()
    }

    #[test]
    fn twenty_monotone_functions_on_three_variables() {
        assert_eq!((0..256u64).filter(|&g| is_monotone(g, 3)).count(), 20);
        assert_eq!((0..1u64 << 16).filter(|&g| is_monotone(g, 4)).count(), 168);
    }

    #[test]
    fn anti_dictator_is_half_far() {
        let f = TruthTable::from_fn(1, |x| -x.get(0)).unwrap();
        let r = dist_to_monotone_matching(&f).unwrap();
        assert_eq!(r.fraction(), Some((1, 2)));
        assert_eq!(r.value, 0.5);
    }

    #[test]
    fn monotone_is_zero() {
        let f = table(&LtfSpec::majority(7));
        assert_eq!(dist_to_monotone_matching(&f).unwrap().count, Some(0));
        let c = TruthTable::from_fn(0, |_| Sign::Minus).unwrap();
        assert_eq!(dist_to_monotone_matching(&c).unwrap().count, Some(0));
    }

    #[test]
    fn maj3_with_negated_input_matches_brute_force() {
        let spec = LtfSpec::new(vec![-1.0, 1.0, 1.0], 0.0).unwrap();
        let f = table(&spec);
        let m = dist_to_monotone_matching(&f).unwrap();
        assert_eq!(m.count, Some(brute_force_count(&f)));
        assert_eq!(m.count, Some(2));
        assert_eq!(dist_ltf_to_monotone_exact(&spec).unwrap().count, Some(2));
    }

    #[test]
    fn matching_agrees_with_brute_force_on_every_three_variable_function() {
        for bits in 0..256u64 {
            let f = TruthTable::from_fn(3, |x| Sign::from_bool(bits >> x.index() & 1 == 1)).unwrap();
            assert_eq!(dist_to_monotone_matching(&f).unwrap().count, Some(brute_force_count(&f)), "{bits:08b}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn matching_agrees_with_brute_force_on_four_variables(bits in 0u64..1 << 16) {
            let f = TruthTable::from_fn(4, |x| Sign::from_bool(bits >> x.index() & 1 == 1)).unwrap();
            let r = dist_to_monotone_matching(&f).unwrap();
            prop_assert_eq!(r.count, Some(brute_force_count(&f)));
            prop_assert!(r.value <= 0.5);
        }

        #[test]
        fn drop_negative_equals_matching(
            w in prop::collection::vec(-3.0f64..3.0, 1..=10),
            theta in -2.0f64..2.0,
        ) {
            let spec = LtfSpec::new(w, theta).unwrap();
            let exact = dist_ltf_to_monotone_exact(&spec).unwrap();
            let matched = dist_to_monotone_matching(&table(&spec)).unwrap();
            prop_assert_eq!(exact.count, matched.count);
            prop_assert!(exact.value <= 0.5);
        }
    }

    #[test]
    fn drop_negative_examples() {
        let g = LtfSpec::new(vec![1.0, -1.0], 0.0).unwrap().drop_negative_weights();
        assert_eq!(g.weights(), &[1.0, 0.0]);
        let c = LtfSpec::new(vec![-1.0, -2.0], 0.0).unwrap().drop_negative_weights();
        assert!((0..4).all(|i| c.eval_unchecked(&Point::from_index(2, i)) == Sign::Plus));
        let m = LtfSpec::new(vec![1.0, 1.0, 1.0], 0.0).unwrap();
        assert_eq!(dist_ltf_to_monotone_exact(&m).unwrap().count, Some(0));
        let one_neg = LtfSpec::new(vec![1.0, 1.0, -1.0], 0.0).unwrap();
        assert_eq!(
            dist_ltf_to_monotone_exact(&one_neg).unwrap().count,
            dist_to_monotone_matching(&table(&one_neg)).unwrap().count
        );
    }

    #[test]
    fn exact_rejects_large_dimension() {
        assert!(dist_ltf_to_monotone_exact(&LtfSpec::majority(21)).is_err());
        assert!(dist_to_monotone_matching(&table(&LtfSpec::majority(13))).is_err());
    }

    #[test]
    fn monte_carlo_within_radius() {
        let spec = LtfSpec::new(vec![1.0, 1.0, -1.0], 0.0).unwrap();
        let exact = dist_ltf_to_monotone_exact(&spec).unwrap().value;
        let mut rng = SeedKey::new(5).rng();
        let mc = dist_ltf_to_monotone_mc(&spec, 1_000_000, 0.01, &mut rng).unwrap();
        assert!((mc.value - exact).abs() <= mc.radius, "{} vs {exact}", mc.value);
        let mono = dist_ltf_to_monotone_mc(&LtfSpec::majority(9), 1000, 0.01, &mut rng).unwrap();
        assert_eq!(mono.value, 0.0);
    }

    #[test]
    fn monte_carlo_stable_across_seeds() {
        let mut w = vec![1.0; 101];
        w[0] = -1.0;
        let spec = LtfSpec::new(w, 0.0).unwrap();
        let runs: Vec<DistanceReport> = (0..4)
            .map(|s| dist_ltf_to_monotone_mc(&spec, 200_000, 0.05, &mut SeedKey::new(s).rng()).unwrap())
            .collect();
        for a in &runs {
            for b in &runs {
                assert!((a.value - b.value).abs() <= 2.0 * a.radius);
            }
        }
    }

    #[test]
    fn radius_and_sample_count_are_inverse() {
        let s = samples_for_radius(0.005, 0.01);
        assert!(hoeffding_radius(s, 0.01) <= 0.005);
        assert!(hoeffding_radius(s - 1, 0.01) > 0.005);
    }
}
