use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use super::ltf::{LtfEvaluator, LtfSpec};
use super::point::{Point, Sign};
use super::restriction::Restriction;
use crate::error::{Error, Result};

/// A Boolean function on {−1, 1}ⁿ.
pub trait BooleanFunction: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn eval(&self, x: &Point) -> Sign;

    /// The explicit representation, when the function is an LTF. Only the
    /// oracle plumbing uses this (to evaluate restrictions in O(stars)); the
    /// algorithms never see it.
    fn as_ltf(&self) -> Option<&LtfSpec> {
        None
    }
}

#[derive(Debug)]
pub struct LtfTarget {
    spec: LtfSpec,
    evaluator: LtfEvaluator,
}

impl LtfTarget {
    pub fn new(spec: LtfSpec) -> Self {
        let evaluator = LtfEvaluator::new(&spec);
        LtfTarget { spec, evaluator }
    }
}

impl BooleanFunction for LtfTarget {
    fn dim(&self) -> usize {
        self.spec.dim()
    }

    #[inline]
    fn eval(&self, x: &Point) -> Sign {
        self.evaluator.eval(x)
    }

    fn as_ltf(&self) -> Option<&LtfSpec> {
        Some(&self.spec)
    }
}

/// An explicit truth table, indexed by [`Point::index`] (n ≤ 24).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthTable {
    n: usize,
    bits: Vec<u64>,
}

impl TruthTable {
    pub const MAX_DIM: usize = 24;

    pub fn from_fn(n: usize, f: impl Fn(&Point) -> Sign) -> Result<Self> {
        if n > Self::MAX_DIM {
            return Err(Error::DimensionTooLarge { n, max: Self::MAX_DIM });
        }
        let size = 1usize << n;
        let mut bits = vec![0u64; size.div_ceil(64)];
        let mut x = Point::all_minus(n);
        for idx in 0..size {
            x.set_index(idx as u64);
            if f(&x).is_plus() {
                bits[idx / 64] |= 1 << (idx % 64);
            }
        }
        Ok(TruthTable { n, bits })
    }

    pub fn of(f: &dyn BooleanFunction) -> Result<Self> {
        TruthTable::from_fn(f.dim(), |x| f.eval(x))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn at(&self, idx: usize) -> Sign {
        Sign::from_bool(self.bits[idx / 64] >> (idx % 64) & 1 == 1)
    }

    pub fn count_plus(&self) -> u64 {
        self.bits.iter().map(|w| u64::from(w.count_ones())).sum()
    }
}

impl BooleanFunction for TruthTable {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &Point) -> Sign {
        self.at(x.index() as usize)
    }
}

/// Wraps a closure as a [`BooleanFunction`].
pub struct FnTarget<F> {
    n: usize,
    f: F,
}

impl<F> FnTarget<F>
where
    F: Fn(&Point) -> Sign + Send + Sync,
{
    pub fn new(n: usize, f: F) -> Self {
        FnTarget { n, f }
    }
}

impl<F> fmt::Debug for FnTarget<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnTarget(n = {})", self.n)
    }
}

impl<F> BooleanFunction for FnTarget<F>
where
    F: Fn(&Point) -> Sign + Send + Sync,
{
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &Point) -> Sign {
        (self.f)(x)
    }
}

/// Evaluates a root function with some coordinates pinned.
#[derive(Debug)]
struct Pinned {
    root: Arc<dyn BooleanFunction>,
    base: Point,
    stars: Vec<usize>,
}

impl BooleanFunction for Pinned {
    fn dim(&self) -> usize {
        self.stars.len()
    }

    fn eval(&self, y: &Point) -> Sign {
        let mut x = self.base.clone();
        for (j, &i) in self.stars.iter().enumerate() {
            x.set(i, y.get(j));
        }
        self.root.eval(&x)
    }
}

#[derive(Debug)]
struct Budget {
    used: AtomicU64,
    cap: Option<u64>,
}

#[derive(Debug)]
struct View {
    rho: Restriction,
    stars: Vec<usize>,
}

/// Query-counting black-box access to a Boolean function.
///
/// Restricted handles evaluate over `stars(ρ)` (in ascending coordinate
/// order) and charge the same counter as the handle they came from. The
/// counter is atomic, so clones may be queried from several threads.
#[derive(Clone)]
pub struct Oracle {
    root: Arc<dyn BooleanFunction>,
    local: Arc<dyn BooleanFunction>,
    view: Option<Arc<View>>,
    budget: Arc<Budget>,
}

impl fmt::Debug for Oracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Oracle")
            .field("dim", &self.dim())
            .field("root_dim", &self.root.dim())
            .field("queries", &self.queries())
            .field("cap", &self.budget.cap)
            .finish()
    }
}

impl Oracle {
    pub const UNCAPPED_PLAN_LIMIT: u64 = 1 << 44;

    pub fn new(target: Arc<dyn BooleanFunction>) -> Self {
        Oracle::with_cap(target, None)
    }

    pub fn with_cap(target: Arc<dyn BooleanFunction>, cap: Option<u64>) -> Self {
        Oracle {
            local: Arc::clone(&target),
            root: target,
            view: None,
            budget: Arc::new(Budget { used: AtomicU64::new(0), cap }),
        }
    }

    pub fn ltf(spec: LtfSpec) -> Self {
        Oracle::new(Arc::new(LtfTarget::new(spec)))
    }

    pub fn ltf_with_cap(spec: LtfSpec, cap: Option<u64>) -> Self {
        Oracle::with_cap(Arc::new(LtfTarget::new(spec)), cap)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.local.dim()
    }

    /// Dimension of the unrestricted function this handle descends from.
    pub fn root_dim(&self) -> usize {
        self.root.dim()
    }

    pub fn queries(&self) -> u64 {
        self.budget.used.load(Ordering::Relaxed)
    }

    pub fn cap(&self) -> Option<u64> {
        self.budget.cap
    }

    /// One black-box evaluation. Fails, without evaluating, once the cap is reached.
    #[inline]
    pub fn query(&self, x: &Point) -> Result<Sign> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.dim() });
        }
        match self.budget.cap {
            None => {
                self.budget.used.fetch_add(1, Ordering::Relaxed);
            }
            Some(cap) => {
                self.budget
                    .used
                    .fetch_update(Ordering::Relaxed, Ordering::Relaxed, |u| (u < cap).then_some(u + 1))
                    .map_err(|_| Error::BudgetExhausted { cap })?;
            }
        }
        Ok(self.local.eval(x))
    }

    /// Fails up front when `planned` more queries would not fit in the budget.
    /// Uncapped handles still refuse plans beyond [`Oracle::UNCAPPED_PLAN_LIMIT`].
    pub fn ensure_budget(&self, planned: u64) -> Result<()> {
        match self.budget.cap {
            Some(cap) if self.queries().saturating_add(planned) > cap => Err(Error::BudgetExhausted { cap }),
            None if planned > Self::UNCAPPED_PLAN_LIMIT => {
                Err(Error::BudgetExhausted { cap: Self::UNCAPPED_PLAN_LIMIT })
            }
            _ => Ok(()),
        }
    }

    /// Restriction over all coordinates of the root function that this handle represents.
    pub fn root_restriction(&self) -> Restriction {
        match &self.view {
            None => Restriction::all_stars(self.root.dim()),
            Some(v) => v.rho.clone(),
        }
    }

    /// `f_ρ` for a restriction `ρ` over this handle's own coordinates.
    pub fn restrict(&self, rho: &Restriction) -> Result<Oracle> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: rho.dim() });
        }
        let global = self.root_restriction().refine(rho)?;
        let stars = global.stars();
        let local: Arc<dyn BooleanFunction> = match self.root.as_ltf() {
            Some(spec) if !stars.is_empty() => Arc::new(LtfTarget::new(spec.restrict(&global)?)),
            _ => Arc::new(Pinned { root: Arc::clone(&self.root), base: global.base_point(), stars: stars.clone() }),
        };
        Ok(Oracle {
            root: Arc::clone(&self.root),
            local,
            view: Some(Arc::new(View { rho: global, stars })),
            budget: Arc::clone(&self.budget),
        })
    }

    /// Maps a point of this handle's domain to the root domain.
    pub fn lift_point(&self, y: &Point) -> Result<Point> {
        match &self.view {
            None => Ok(y.clone()),
            Some(v) => v.rho.merge(y),
        }
    }

    pub fn lift_coordinate(&self, j: usize) -> usize {
        match &self.view {
            None => j,
            Some(v) => v.stars[j],
        }
    }

    /// An unrestricted handle on the root function with a fresh counter.
    pub fn fresh_root(&self) -> Oracle {
        Oracle::new(Arc::clone(&self.root))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedKey;
    use proptest::prelude::*;

    fn sum_ltf(n: usize) -> Oracle {
        Oracle::ltf(LtfSpec::majority(n))
    }

    #[test]
    fn counts_every_query() {
        let f = sum_ltf(5);
        let mut rng = SeedKey::new(1).rng();
        for _ in 0..17 {
            f.query(&Point::random(5, &mut rng)).unwrap();
        }
        assert_eq!(f.queries(), 17);
        let g = f.restrict(&Restriction::parse_pattern("+*-**").unwrap()).unwrap();
        g.query(&Point::all_plus(3)).unwrap();
        assert_eq!(f.queries(), 18);
        assert_eq!(g.queries(), 18);
    }

    #[test]
    fn cap_is_hard() {
        let f = Oracle::ltf_with_cap(LtfSpec::majority(3), Some(2));
        f.query(&Point::all_plus(3)).unwrap();
        f.query(&Point::all_plus(3)).unwrap();
        assert!(matches!(f.query(&Point::all_plus(3)), Err(Error::BudgetExhausted { cap: 2 })));
        assert_eq!(f.queries(), 2);
    }

    #[test]
    fn restriction_examples() {
        // sign(x₁ + x₂) with x₂ = +1 is constant +1 (boundary convention).
        let f = Oracle::ltf(LtfSpec::new(vec![1.0, 1.0], 0.0).unwrap());
        let g = f.restrict(&Restriction::parse_pattern("*+").unwrap()).unwrap();
        for y in ["+", "-"] {
            assert_eq!(g.query(&Point::parse_sign_string(y).unwrap()).unwrap(), Sign::Plus);
        }
        // The all-stars restriction is the identity.
        let id = f.restrict(&Restriction::all_stars(2)).unwrap();
        for idx in 0..4 {
            let x = Point::from_index(2, idx);
            assert_eq!(id.query(&x).unwrap(), f.query(&x).unwrap());
        }
    }

    #[test]
    fn nested_restrictions_lift_to_root() {
        let f = sum_ltf(6);
        let g = f.restrict(&Restriction::parse_pattern("+**-**").unwrap()).unwrap();
        let h = g.restrict(&Restriction::parse_pattern("*-**").unwrap()).unwrap();
        assert_eq!(h.dim(), 3);
        assert_eq!(h.root_restriction().to_pattern(), "+*--**");
        assert_eq!(h.lift_coordinate(0), 1);
        assert_eq!(h.lift_coordinate(2), 5);
        let y = Point::parse_sign_string("+-+").unwrap();
        assert_eq!(h.lift_point(&y).unwrap().to_sign_string(), "++---+");
    }

    #[test]
    fn fully_fixed_restriction_is_constant() {
        let f = Oracle::ltf(LtfSpec::new(vec![1.0, 2.0], 0.5).unwrap());
        let g = f.restrict(&Restriction::parse_pattern("-+").unwrap()).unwrap();
        assert_eq!(g.dim(), 0);
        assert_eq!(g.query(&Point::all_minus(0)).unwrap(), Sign::Plus);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn restriction_matches_merge(
            weights in prop::collection::vec(-3i32..=3, 1..=10),
            theta in -4i32..=4,
            pattern in prop::collection::vec(0u8..3, 10),
            generic in any::<bool>(),
        ) {
            let n = weights.len();
            let spec = LtfSpec::new(weights.iter().map(|w| f64::from(*w)).collect(), f64::from(theta)).unwrap();
            let f = if generic {
                let s = spec.clone();
                Oracle::new(Arc::new(FnTarget::new(n, move |x: &Point| s.eval_unchecked(x))))
            } else {
                Oracle::ltf(spec.clone())
            };
            let rho = Restriction::from_slots(pattern[..n].iter().map(|c| match c {
                0 => None, 1 => Some(Sign::Minus), _ => Some(Sign::Plus),
            }).collect());
            let g = f.restrict(&rho).unwrap();
            for idx in 0..(1u64 << g.dim()) {
                let y = Point::from_index(g.dim(), idx);
                let x = rho.merge(&y).unwrap();
                prop_assert_eq!(g.query(&y).unwrap(), spec.eval_unchecked(&x));
            }
        }
    }
}
