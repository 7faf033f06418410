//! Decisions driven by the tail rates: shadowing class, hyperbolicity,
//! uniform expansivity, unilateral positive shadowing, stable-set
//! membership and the frequent hypercyclicity series.

use num_traits::{One, Zero};

use crate::scalar::{powi, ArithmeticMode, Real, Scalar};
use crate::spaces::{norm, Direction, SeqVector, ShiftOperator, SpaceSpec};
use crate::weights::{TailRates, UnilateralWeights, UnitComparison, WeightSequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ShadowingClass {
    /// Both tails contract.
    A,
    /// Both tails expand.
    B,
    /// Left tail contracts, right tail expands.
    C,
    None,
    Boundary,
}

impl ShadowingClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ShadowingClass::A => "A",
            ShadowingClass::B => "B",
            ShadowingClass::C => "C",
            ShadowingClass::None => "NONE",
            ShadowingClass::Boundary => "BOUNDARY",
        }
    }

    pub fn has_shadowing(self) -> bool {
        matches!(self, ShadowingClass::A | ShadowingClass::B | ShadowingClass::C)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExpansivityClass {
    A,
    B,
    /// Right tail contracts, left tail expands.
    C,
    None,
    Boundary,
}

impl ExpansivityClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ExpansivityClass::A => "a",
            ExpansivityClass::B => "b",
            ExpansivityClass::C => "c",
            ExpansivityClass::None => "none",
            ExpansivityClass::Boundary => "boundary",
        }
    }

    pub fn is_uniformly_expansive(self) -> bool {
        matches!(self, ExpansivityClass::A | ExpansivityClass::B | ExpansivityClass::C)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Yes,
    No,
    Boundary,
}

impl Verdict {
    pub fn as_bool(self) -> Option<bool> {
        match self {
            Verdict::Yes => Some(true),
            Verdict::No => Some(false),
            Verdict::Boundary => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnilateralClass {
    HyperbolicA,
    ExpandingB,
    None,
    Boundary,
}

impl UnilateralClass {
    pub fn as_str(self) -> &'static str {
        match self {
            UnilateralClass::HyperbolicA => "hyperbolic_A",
            UnilateralClass::ExpandingB => "expanding_b",
            UnilateralClass::None => "none",
            UnilateralClass::Boundary => "boundary",
        }
    }
}

/// A tail rate that landed within tolerance of one.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryQuantity {
    pub quantity: &'static str,
    pub value: f64,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationReport<R> {
    pub shadowing_class: ShadowingClass,
    pub rates: TailRates<R>,
    pub hyperbolic: Verdict,
    pub uniform_expansivity: ExpansivityClass,
    pub tolerance_used: f64,
    pub arithmetic_mode: ArithmeticMode,
    pub boundary: Vec<BoundaryQuantity>,
}

impl<R: Real> ClassificationReport<R> {
    pub fn boundary_description(&self) -> String {
        self.boundary
            .iter()
            .map(|b| format!("{} = {} is within {:e} of 1", b.quantity, b.value, b.distance))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Kleene truth value for `rate < 1` / `rate > 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tri {
    T,
    F,
    U,
}

impl Tri {
    fn and(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::F, _) | (_, Tri::F) => Tri::F,
            (Tri::T, Tri::T) => Tri::T,
            _ => Tri::U,
        }
    }
}

fn below_above(c: UnitComparison) -> (Tri, Tri) {
    match c {
        UnitComparison::Below => (Tri::T, Tri::F),
        UnitComparison::Above => (Tri::F, Tri::T),
        UnitComparison::Equal => (Tri::F, Tri::F),
        UnitComparison::Near(_) => (Tri::U, Tri::U),
    }
}

/// Picks the case whose condition is true; undecided conditions force
/// the boundary outcome.
fn select<T: Copy>(cases: &[(Tri, T)], none: T, boundary: T) -> T {
    if let Some((_, t)) = cases.iter().find(|(c, _)| *c == Tri::T) {
        return *t;
    }
    if cases.iter().any(|(c, _)| *c == Tri::U) {
        boundary
    } else {
        none
    }
}

fn effective_tol<R: Real>(tol: f64) -> f64 {
    if R::EXACT {
        0.0
    } else {
        tol
    }
}

pub fn classify_shadowing<S: Scalar>(w: &WeightSequence<S>) -> ClassificationReport<S::Real> {
    classify_shadowing_with(w, S::Real::default_tolerance())
}

pub fn classify_shadowing_with<S: Scalar>(w: &WeightSequence<S>, tol: f64) -> ClassificationReport<S::Real> {
    let tol = effective_tol::<S::Real>(tol);
    let rates = w.tail_rates();
    let left = rates.left_vs_one(tol);
    let right = rates.right_vs_one(tol);
    let (l_lt, l_gt) = below_above(left);
    let (r_lt, r_gt) = below_above(right);

    let shadowing_class = select(
        &[
            (l_lt.and(r_lt), ShadowingClass::A),
            (l_gt.and(r_gt), ShadowingClass::B),
            (l_lt.and(r_gt), ShadowingClass::C),
        ],
        ShadowingClass::None,
        ShadowingClass::Boundary,
    );
    let uniform_expansivity = select(
        &[
            (l_lt.and(r_lt), ExpansivityClass::A),
            (l_gt.and(r_gt), ExpansivityClass::B),
            (r_lt.and(l_gt), ExpansivityClass::C),
        ],
        ExpansivityClass::None,
        ExpansivityClass::Boundary,
    );
    let hyperbolic = select(
        &[(l_lt.and(r_lt), Verdict::Yes), (l_gt.and(r_gt), Verdict::Yes)],
        Verdict::No,
        Verdict::Boundary,
    );

    let mut boundary = Vec::new();
    for (name, cmp, g) in [("g_left", left, &rates.g_left), ("g_right", right, &rates.g_right)] {
        if let UnitComparison::Near(distance) = cmp {
            boundary.push(BoundaryQuantity {
                quantity: name,
                value: g.to_f64(),
                distance,
            });
        }
    }

    ClassificationReport {
        shadowing_class,
        rates,
        hyperbolic,
        uniform_expansivity,
        tolerance_used: tol,
        arithmetic_mode: S::mode(),
        boundary,
    }
}

pub fn uniform_expansivity_class<S: Scalar>(w: &WeightSequence<S>, tol: f64) -> ExpansivityClass {
    classify_shadowing_with(w, tol).uniform_expansivity
}

/// Positive shadowing of a unilateral shift. The backward shift shadows
/// when its tail rate is away from one on either side; the forward shift
/// only when it contracts.
pub fn classify_unilateral<S: Scalar>(w: &UnilateralWeights<S>, direction: Direction, tol: f64) -> UnilateralClass {
    let tol = effective_tol::<S::Real>(tol);
    let cmp = UnitComparison::decide(&w.rate(), &w.period_product(), tol);
    match (cmp, direction) {
        (UnitComparison::Near(_), _) => UnilateralClass::Boundary,
        (UnitComparison::Below, _) => UnilateralClass::HyperbolicA,
        (UnitComparison::Above, Direction::Backward) => UnilateralClass::ExpandingB,
        _ => UnilateralClass::None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SetSide {
    /// `||B^n x|| <= c beta^n ||x||` for n >= 1.
    Stable,
    /// `||B^{-n} x|| <= c beta^n ||x||` for n >= 1.
    Unstable,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MembershipReport {
    pub member: bool,
    /// First `n` violating the inequality.
    pub witness: Option<i64>,
    /// Steps computed explicitly.
    pub checked_up_to: i64,
    /// True when the verdict covers every `n >= 1`, not only the steps checked.
    pub certified: bool,
}

/// Upper limit on explicit steps before falling back to the closed form.
const MAX_EXPLICIT_STEPS: i64 = 100_000;

/// Decides the geometric-decay inequality for all n >= 1.
///
/// Once the support of the iterate has moved entirely into the tail it is
/// heading to, each further period multiplies the norm by exactly the
/// period product, so one more period settles the question.
pub fn stable_set_member<S: Scalar>(
    w: &WeightSequence<S>,
    space: SpaceSpec,
    x: &SeqVector<S>,
    c: &S::Real,
    beta: &S::Real,
    horizon: i64,
    side: SetSide,
) -> MembershipReport {
    let x_norm = norm(space, x);
    if x.is_zero() {
        return MembershipReport {
            member: true,
            witness: None,
            checked_up_to: 0,
            certified: true,
        };
    }
    let rates = w.tail_rates();
    let (period, ratio) = match side {
        SetSide::Stable => (rates.left_period as i64, rates.left_product.clone()),
        SetSide::Unstable => (rates.right_period as i64, S::Real::one() / rates.right_product.clone()),
    };
    let in_tail = |y: &SeqVector<S>| match side {
        SetSide::Stable => y.hi() < w.core_start(),
        SetSide::Unstable => y.lo() >= w.core_end(),
    };
    let step = |y: &SeqVector<S>| match side {
        SetSide::Stable => w.apply(y),
        SetSide::Unstable => w.apply_inverse(y).expect("invertible"),
    };

    let mut y = x.clone();
    let mut bound = c.clone() * x_norm.clone();
    let mut tail_entry: Option<i64> = None;
    let mut ratios: Vec<f64> = Vec::new();
    let mut n = 0;
    loop {
        if tail_entry.is_none() && in_tail(&y) {
            tail_entry = Some(n);
        }
        if let Some(n0) = tail_entry {
            let settled = n >= n0 + period && n >= horizon;
            if settled && ratio <= powi(beta, period as u64) {
                return MembershipReport {
                    member: true,
                    witness: None,
                    checked_up_to: n,
                    certified: true,
                };
            }
            if settled || n >= MAX_EXPLICIT_STEPS {
                // Ratios norm / bound over the last period grow by
                // q = ratio / beta^P per period: find the first crossing.
                let q = ratio.to_f64() / beta.to_f64().powi(period as i32);
                let start = n - period + 1;
                let witness = ratios[ratios.len() - period as usize..]
                    .iter()
                    .enumerate()
                    .map(|(i, r)| {
                        let k = ((1.0 / r).ln() / q.ln()).floor().max(0.0) as i64 + 1;
                        start + i as i64 + k * period
                    })
                    .min();
                return MembershipReport {
                    member: false,
                    witness,
                    checked_up_to: n,
                    certified: true,
                };
            }
        }
        n += 1;
        y = step(&y);
        bound = bound * beta.clone();
        let y_norm = norm(space, &y);
        if y_norm > bound {
            return MembershipReport {
                member: false,
                witness: Some(n),
                checked_up_to: n,
                certified: true,
            };
        }
        ratios.push(y_norm.to_f64() / bound.to_f64());
    }
}

fn orbit_sup_bounded<S: Scalar>(
    w: &WeightSequence<S>,
    space: SpaceSpec,
    x: &SeqVector<S>,
    horizon: i64,
    bound: &S::Real,
) -> bool {
    let mut fwd = x.clone();
    let mut bwd = x.clone();
    if norm(space, x) > *bound {
        return false;
    }
    for _ in 0..horizon {
        fwd = w.apply(&fwd);
        bwd = w.apply_inverse(&bwd).expect("invertible");
        if norm(space, &fwd) > *bound || norm(space, &bwd) > *bound {
            return false;
        }
    }
    true
}

/// Searches for a unit vector whose orbit stays within `bound` for
/// `|n| <= horizon`, scanning basis vectors outward from `e_0` and then
/// two-term combinations near the core.
pub fn bounded_orbit_witness<S: Scalar>(
    w: &WeightSequence<S>,
    space: SpaceSpec,
    horizon: i64,
    bound: &S::Real,
) -> Option<SeqVector<S>> {
    let l = w.left_tail().len() as i64;
    let r = w.right_tail().len() as i64;
    let lo = w.core_start() - l - 2;
    let hi = w.core_end() + r + 2;
    let span = lo.abs().max(hi.abs()).max(1);
    let order = std::iter::once(0).chain((1..=span).flat_map(|d| [-d, d]));
    let candidates: Vec<i64> = order.filter(|j| *j == 0 || (lo..=hi).contains(j)).collect();

    for &j in &candidates {
        let mut fwd = S::Real::one();
        let mut bwd = S::Real::one();
        let mut ok = S::Real::one() <= *bound;
        for n in 1..=horizon {
            if !ok {
                break;
            }
            fwd = fwd * w.abs_at(j - n + 1);
            bwd = bwd / w.abs_at(j + n);
            ok = fwd <= *bound && bwd <= *bound;
        }
        if ok {
            return Some(SeqVector::basis(j));
        }
    }

    let coeffs: Vec<S> = [1.0, -1.0, 2.0, -2.0, 0.5, -0.5]
        .iter()
        .map(|&c| S::from_f64_parts(c, 0.0))
        .collect();
    let near: Vec<i64> = candidates.iter().copied().filter(|j| j.abs() <= 8).collect();
    for (a, &i) in near.iter().enumerate() {
        for &j in &near[a + 1..] {
            for c in &coeffs {
                let x = SeqVector::basis(i).add_scaled(c, &SeqVector::basis(j));
                let nx = norm(space, &x);
                let x = x.scale(&S::from_real(S::Real::one() / nx));
                if orbit_sup_bounded(w, space, &x, horizon, bound) {
                    return Some(x);
                }
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesSum<R> {
    /// Σ_{k=1}^{terms} ||T^k y||.
    pub partial_sum: R,
    pub terms: i64,
    /// Exact remainder Σ_{k>terms} ||T^k y||; `None` when divergent.
    pub remainder: Option<R>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FhcReport<R> {
    pub forward_sum: R,
    pub backward_sum: R,
    /// Largest of the two remainders.
    pub tail_bound: Option<R>,
    pub converges: bool,
    pub forward: SeriesSum<R>,
    pub backward: SeriesSum<R>,
}

/// Target for the certified remainder of each series.
pub const FHC_TAIL_TARGET: f64 = 1e-9;

const FHC_MAX_TERMS: i64 = 1_000_000;

fn orbit_norm_series<S: Scalar>(
    w: &WeightSequence<S>,
    space: SpaceSpec,
    y: &SeqVector<S>,
    forward: bool,
) -> SeriesSum<S::Real> {
    let zero = S::Real::zero();
    if y.is_zero() {
        return SeriesSum {
            partial_sum: zero.clone(),
            terms: 0,
            remainder: Some(zero),
        };
    }
    let rates = w.tail_rates();
    let (period, ratio) = if forward {
        (rates.left_period as i64, rates.left_product.clone())
    } else {
        (rates.right_period as i64, S::Real::one() / rates.right_product.clone())
    };
    let one = S::Real::one();
    let target = S::Real::from_f64(FHC_TAIL_TARGET);
    let mut v = y.clone();
    let mut sum = zero.clone();
    let mut recent: Vec<S::Real> = Vec::new();
    let mut entry: Option<i64> = None;
    for k in 1..=FHC_MAX_TERMS {
        v = if forward {
            w.apply(&v)
        } else {
            w.apply_inverse(&v).expect("invertible")
        };
        let in_tail = if forward {
            v.hi() < w.core_start()
        } else {
            v.lo() >= w.core_end()
        };
        if entry.is_none() && in_tail {
            entry = Some(k);
            if ratio >= one {
                let term = norm(space, &v);
                return SeriesSum {
                    partial_sum: sum + term,
                    terms: k,
                    remainder: None,
                };
            }
        }
        let term = norm(space, &v);
        sum = sum + term.clone();
        recent.push(term);
        if recent.len() > period as usize {
            recent.remove(0);
        }
        if let Some(k0) = entry {
            if k >= k0 + period - 1 {
                let last: S::Real = recent.iter().cloned().fold(zero.clone(), |a, b| a + b);
                let remainder = last * ratio.clone() / (one.clone() - ratio.clone());
                if remainder < target {
                    return SeriesSum {
                        partial_sum: sum,
                        terms: k,
                        remainder: Some(remainder),
                    };
                }
            }
        }
    }
    SeriesSum {
        partial_sum: sum,
        terms: FHC_MAX_TERMS,
        remainder: None,
    }
}

/// Sums `Σ_{k>=1} ||B^k y||` and `Σ_{k>=1} ||B^{-k} y||` up to the first
/// horizon whose exact remainder is below [`FHC_TAIL_TARGET`].
pub fn fhc_check<S: Scalar>(w: &WeightSequence<S>, space: SpaceSpec, y: &SeqVector<S>) -> FhcReport<S::Real> {
    let forward = orbit_norm_series(w, space, y, true);
    let backward = orbit_norm_series(w, space, y, false);
    let target = S::Real::from_f64(FHC_TAIL_TARGET);
    let tail_bound = match (&forward.remainder, &backward.remainder) {
        (Some(a), Some(b)) => Some(Real::max_of(a.clone(), b.clone())),
        _ => None,
    };
    let converges = tail_bound.as_ref().is_some_and(|t| *t < target);
    FhcReport {
        forward_sum: forward.partial_sum.clone(),
        backward_sum: backward.partial_sum.clone(),
        tail_bound,
        converges,
        forward,
        backward,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    fn step(l: BigRational, r: BigRational) -> WeightSequence<BigRational> {
        WeightSequence::step(l, r).unwrap()
    }

    #[test]
    fn classification_examples() {
        let c = |w: &WeightSequence<BigRational>| classify_shadowing(w).shadowing_class;
        assert_eq!(c(&step(q(1, 2), q(2, 1))), ShadowingClass::C);
        assert_eq!(c(&WeightSequence::constant(q(1, 2)).unwrap()), ShadowingClass::A);
        assert_eq!(c(&WeightSequence::constant(q(2, 1)).unwrap()), ShadowingClass::B);
        assert_eq!(c(&WeightSequence::constant(q(1, 1)).unwrap()), ShadowingClass::None);
        assert_eq!(c(&step(q(2, 1), q(1, 1))), ShadowingClass::None);
        let rev = step(q(2, 1), q(1, 2));
        assert_eq!(c(&rev), ShadowingClass::None);
        assert_eq!(uniform_expansivity_class(&rev, 0.0), ExpansivityClass::C);
        let a2 = classify_shadowing(&step(q(1, 2), q(2, 1)));
        assert_eq!(a2.hyperbolic, Verdict::No);
        assert_eq!(a2.uniform_expansivity, ExpansivityClass::None);
        assert_eq!(a2.arithmetic_mode, ArithmeticMode::Exact);
    }

    #[test]
    fn float_boundary() {
        let w = WeightSequence::step(0.5, 1.0 + 1e-14).unwrap();
        let report = classify_shadowing(&w);
        assert_eq!(report.shadowing_class, ShadowingClass::Boundary);
        assert_eq!(report.boundary.len(), 1);
        assert_eq!(report.boundary[0].quantity, "g_right");
        // A decisive side settles the class even if the other is near one.
        let w = WeightSequence::step(1.0 + 1e-14, 1.0 + 1e-14).unwrap();
        assert_eq!(classify_shadowing(&w).shadowing_class, ShadowingClass::Boundary);
        let exact = WeightSequence::step(q(1, 2), q(1, 1)).unwrap();
        assert_eq!(classify_shadowing(&exact).shadowing_class, ShadowingClass::None);
    }

    #[test]
    fn unilateral_examples() {
        let halves = UnilateralWeights::constant(0.5).unwrap();
        let twos = UnilateralWeights::constant(2.0).unwrap();
        assert_eq!(classify_unilateral(&halves, Direction::Forward, 1e-12), UnilateralClass::HyperbolicA);
        assert_eq!(classify_unilateral(&twos, Direction::Forward, 1e-12), UnilateralClass::None);
        assert_eq!(classify_unilateral(&twos, Direction::Backward, 1e-12), UnilateralClass::ExpandingB);
    }

    #[test]
    fn membership_examples() {
        let halves = WeightSequence::constant(0.5).unwrap();
        let e0 = SeqVector::basis(0);
        let r = stable_set_member(&halves, SpaceSpec::C0, &e0, &1.0, &0.5, 10, SetSide::Stable);
        assert!(r.member && r.certified);
        let a2 = WeightSequence::step(0.5, 2.0).unwrap();
        let r = stable_set_member(&a2, SpaceSpec::C0, &SeqVector::basis(1), &1.0, &0.5, 10, SetSide::Unstable);
        assert!(r.member);
        let ones = WeightSequence::constant(1.0).unwrap();
        let r = stable_set_member(&ones, SpaceSpec::C0, &e0, &1.0, &0.9, 10, SetSide::Stable);
        assert_eq!((r.member, r.witness), (false, Some(1)));
    }

    #[test]
    fn membership_failure_past_horizon() {
        // ||B^n e_0|| = 0.5^n against 2 * 0.45^n fails first at
        // n = ceil(ln 2 / ln(10/9)) = 7.
        let halves = WeightSequence::constant(0.5).unwrap();
        let r = stable_set_member(&halves, SpaceSpec::C0, &SeqVector::basis(0), &2.0, &0.45, 1, SetSide::Stable);
        assert_eq!((r.member, r.witness), (false, Some(7)));
        let exact = WeightSequence::constant(q(1, 2)).unwrap();
        let r = stable_set_member(&exact, SpaceSpec::C0, &SeqVector::basis(0), &q(2, 1), &q(9, 20), 1, SetSide::Stable);
        assert_eq!((r.member, r.witness), (false, Some(7)));
    }

    #[test]
    fn witness_examples() {
        let a2 = WeightSequence::step(0.5, 2.0).unwrap();
        assert_eq!(bounded_orbit_witness(&a2, SpaceSpec::C0, 60, &4.0), Some(SeqVector::basis(0)));
        let twos = WeightSequence::constant(2.0).unwrap();
        assert_eq!(bounded_orbit_witness(&twos, SpaceSpec::C0, 60, &4.0), None);
        let ones = WeightSequence::constant(1.0).unwrap();
        assert_eq!(bounded_orbit_witness(&ones, SpaceSpec::C0, 60, &1.0), Some(SeqVector::basis(0)));
    }

    #[test]
    fn fhc_examples() {
        let a2 = step(q(1, 2), q(2, 1));
        let r = fhc_check(&a2, SpaceSpec::C0, &SeqVector::basis(0));
        assert!(r.converges);
        // Forward: 2, 1, 1/2, … sums to 4; backward: 1/2, 1/4, … sums to 1.
        let fwd = r.forward_sum.clone() + r.forward.remainder.clone().unwrap();
        let bwd = r.backward_sum.clone() + r.backward.remainder.clone().unwrap();
        assert_eq!((fwd, bwd), (q(4, 1), q(1, 1)));
        assert!(r.tail_bound.unwrap() < BigRational::from_f64_parts(1e-9, 0.0));

        let ones = WeightSequence::constant(1.0).unwrap();
        let r = fhc_check(&ones, SpaceSpec::C0, &SeqVector::basis(0));
        assert!(!r.converges && r.tail_bound.is_none());

        let halves = WeightSequence::constant(0.5).unwrap();
        let r = fhc_check(&halves, SpaceSpec::C0, &SeqVector::basis(0));
        assert!(r.forward.remainder.is_some() && r.backward.remainder.is_none() && !r.converges);
    }
}
