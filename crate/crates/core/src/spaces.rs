//! Finitely supported vectors of ℓ_p(Z) and c_0(Z) and shift actions on them.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{powi, Real, Scalar};
use crate::weights::{UnilateralWeights, WeightSequence};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpaceSpec {
    /// ℓ_p(Z) with `p >= 1`.
    Lp(f64),
    /// c_0(Z) with the sup norm.
    C0,
}

impl SpaceSpec {
    pub fn lp(p: f64) -> Result<Self> {
        if p.is_finite() && p >= 1.0 {
            Ok(SpaceSpec::Lp(p))
        } else {
            Err(Error::InvalidParams(format!("ℓ_p needs finite p >= 1, got {p}")))
        }
    }
}

impl FromStr for SpaceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("c0") {
            return Ok(SpaceSpec::C0);
        }
        let p = s
            .strip_prefix("lp:")
            .or_else(|| s.strip_prefix("l"))
            .ok_or_else(|| Error::Parse(format!("unknown space {s:?}; expected lp:P or c0")))?;
        let p: f64 = p
            .parse()
            .map_err(|_| Error::Parse(format!("bad exponent in space {s:?}")))?;
        SpaceSpec::lp(p)
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Lp(p) => write!(f, "lp:{p}"),
            SpaceSpec::C0 => write!(f, "c0"),
        }
    }
}

/// Finitely supported sequence; `coeffs[k]` is the coordinate at `lo + k`.
///
/// The representation is kept trimmed: the first and last stored
/// coefficients are nonzero, and the zero vector has no coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct SeqVector<S: Scalar> {
    lo: i64,
    coeffs: Vec<S>,
}

impl<S: Scalar> SeqVector<S> {
    pub fn new(lo: i64, coeffs: Vec<S>) -> Self {
        let mut v = SeqVector { lo, coeffs };
        v.trim();
        v
    }

    pub fn zero() -> Self {
        SeqVector {
            lo: 0,
            coeffs: Vec::new(),
        }
    }

    /// The unit vector `e_j`.
    pub fn basis(j: i64) -> Self {
        SeqVector {
            lo: j,
            coeffs: vec![S::one()],
        }
    }

    pub fn scaled_basis(j: i64, c: S) -> Self {
        Self::new(j, vec![c])
    }

    fn trim(&mut self) {
        let end = self.coeffs.iter().rposition(|c| !c.is_zero()).map_or(0, |i| i + 1);
        self.coeffs.truncate(end);
        let start = self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0);
        if start > 0 {
            self.coeffs.drain(..start);
            self.lo += start as i64;
        }
        if self.coeffs.is_empty() {
            self.lo = 0;
        }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Last stored index; `lo - 1` for the zero vector.
    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `(first, last)` nonzero index.
    pub fn support(&self) -> Option<(i64, i64)> {
        (!self.is_zero()).then(|| (self.lo, self.hi()))
    }

    pub fn get(&self, j: i64) -> S {
        if j < self.lo || j > self.hi() {
            S::zero()
        } else {
            self.coeffs[(j - self.lo) as usize].clone()
        }
    }

    /// Nonzero `(index, coefficient)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &S)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (self.lo + k as i64, c))
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::new(self.lo, self.coeffs.iter().map(|x| x.clone() * c.clone()).collect())
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        Self::new(self.lo, self.coeffs.iter().map(f).collect())
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: &S, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.scale(c);
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let coeffs = (lo..=hi)
            .map(|j| self.get(j) + c.clone() * other.get(j))
            .collect();
        Self::new(lo, coeffs)
    }

    /// Coordinates in `[lo, hi]` kept, everything else zeroed.
    pub fn restrict(&self, lo: i64, hi: i64) -> Self {
        if self.is_zero() || hi < lo {
            return Self::zero();
        }
        let a = lo.max(self.lo);
        let b = hi.min(self.hi());
        if a > b {
            return Self::zero();
        }
        Self::new(a, (a..=b).map(|j| self.get(j)).collect())
    }

    /// `(P_{<= j-1} x, P_{>= j} x)`.
    pub fn split_at(&self, j: i64) -> (Self, Self) {
        (self.restrict(i64::MIN, j - 1), self.restrict(j, i64::MAX))
    }

    /// `(x_M, x_N)` with `x_M` supported in indices <= 0 and `x_N` in > 0.
    pub fn split_mn(&self) -> (Self, Self) {
        self.split_at(1)
    }

    /// Largest coordinate modulus.
    pub fn sup_abs(&self) -> S::Real {
        self.coeffs
            .iter()
            .map(|c| c.modulus())
            .fold(S::Real::zero(), Real::max_of)
    }
}

impl<S: Scalar> Add for &SeqVector<S> {
    type Output = SeqVector<S>;

    fn add(self, rhs: Self) -> SeqVector<S> {
        self.add_scaled(&S::one(), rhs)
    }
}

impl<S: Scalar> Sub for &SeqVector<S> {
    type Output = SeqVector<S>;

    fn sub(self, rhs: Self) -> SeqVector<S> {
        self.add_scaled(&-S::one(), rhs)
    }
}

impl<S: Scalar> Add for SeqVector<S> {
    type Output = SeqVector<S>;

    fn add(self, rhs: Self) -> SeqVector<S> {
        &self + &rhs
    }
}

impl<S: Scalar> Sub for SeqVector<S> {
    type Output = SeqVector<S>;

    fn sub(self, rhs: Self) -> SeqVector<S> {
        &self - &rhs
    }
}

impl<S: Scalar> Neg for SeqVector<S> {
    type Output = SeqVector<S>;

    fn neg(self) -> SeqVector<S> {
        self.map(|c| -c.clone())
    }
}

/// Norm of `x` in `space`.
///
/// Exact for c_0 and for integer `p` whenever the p-th root of the exact
/// power sum is exact; otherwise the root goes through `f64`.
pub fn norm<S: Scalar>(space: SpaceSpec, x: &SeqVector<S>) -> S::Real {
    match space {
        SpaceSpec::C0 => x.sup_abs(),
        SpaceSpec::Lp(p) if p == 1.0 => x
            .coeffs()
            .iter()
            .fold(S::Real::zero(), |acc, c| acc + c.modulus()),
        SpaceSpec::Lp(p) if p.fract() == 0.0 && p <= 64.0 => {
            let k = p as u32;
            let sum = x
                .coeffs()
                .iter()
                .fold(S::Real::zero(), |acc, c| acc + powi(&c.modulus(), k as u64));
            sum.nth_root(k)
        }
        SpaceSpec::Lp(p) => {
            let scale = x.sup_abs().to_f64();
            if scale == 0.0 {
                return S::Real::zero();
            }
            let sum: f64 = x
                .coeffs()
                .iter()
                .map(|c| (c.modulus().to_f64() / scale).powf(p))
                .sum();
            S::Real::from_f64(scale * sum.powf(1.0 / p))
        }
    }
}

/// `(x_M, x_N)`; see [`SeqVector::split_mn`].
pub fn split_mn<S: Scalar>(x: &SeqVector<S>) -> (SeqVector<S>, SeqVector<S>) {
    x.split_mn()
}

/// A weighted shift acting on finitely supported vectors.
pub trait ShiftOperator<S: Scalar>: Send + Sync {
    /// `T^n e_j` as `(index, coefficient)`, or `None` when it vanishes.
    /// Negative `n` is only meaningful for invertible operators.
    fn basis_image(&self, j: i64, n: i64) -> Option<(i64, S)>;

    fn apply(&self, x: &SeqVector<S>) -> SeqVector<S>;

    /// `T^{-1} x`, when `T` is invertible.
    fn apply_inverse(&self, x: &SeqVector<S>) -> Option<SeqVector<S>>;

    /// Lowest coordinate index of the underlying space (`None` for Z).
    fn domain_start(&self) -> Option<i64>;

    fn power(&self, x: &SeqVector<S>, n: i64) -> Option<SeqVector<S>> {
        let mut y = x.clone();
        if n >= 0 {
            for _ in 0..n {
                y = self.apply(&y);
            }
        } else {
            for _ in 0..-n {
                y = self.apply_inverse(&y)?;
            }
        }
        Some(y)
    }
}

/// The bilateral backward shift `B_w e_k = w_k e_{k-1}`.
impl<S: Scalar> ShiftOperator<S> for WeightSequence<S> {
    fn basis_image(&self, j: i64, n: i64) -> Option<(i64, S)> {
        if n >= 0 {
            let c = if n == 0 {
                S::one()
            } else {
                self.partial_product(j - n + 1, j).expect("ordered range")
            };
            Some((j - n, c))
        } else {
            let m = -n;
            let p = self.partial_product(j + 1, j + m).expect("ordered range");
            Some((j + m, S::one() / p))
        }
    }

    fn apply(&self, x: &SeqVector<S>) -> SeqVector<S> {
        let lo = x.lo();
        SeqVector::new(
            lo - 1,
            x.coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| c.clone() * self.weight_at(lo + k as i64))
                .collect(),
        )
    }

    fn apply_inverse(&self, x: &SeqVector<S>) -> Option<SeqVector<S>> {
        let lo = x.lo();
        Some(SeqVector::new(
            lo + 1,
            x.coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| c.clone() / self.weight_at(lo + k as i64 + 1))
                .collect(),
        ))
    }

    fn domain_start(&self) -> Option<i64> {
        None
    }
}

/// `B_w^n x` for any integer `n`; negative powers use
/// `B_w^{-1} e_j = e_{j+1} / w_{j+1}`.
pub fn iterate<S: Scalar>(w: &WeightSequence<S>, _space: SpaceSpec, x: &SeqVector<S>, n: i64) -> SeqVector<S> {
    w.power(x, n).expect("bilateral shifts are invertible")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    /// `e_k -> w_k e_{k-1}`, with `e_1 -> 0`.
    Backward,
    /// `e_k -> w_k e_{k+1}`.
    Forward,
}

/// A weighted shift on sequences indexed by N = {1, 2, …}.
#[derive(Clone, Debug, PartialEq)]
pub struct UnilateralShift<S: Scalar> {
    pub weights: UnilateralWeights<S>,
    pub direction: Direction,
}

impl<S: Scalar> UnilateralShift<S> {
    pub fn new(weights: UnilateralWeights<S>, direction: Direction) -> Self {
        UnilateralShift { weights, direction }
    }

    fn product(&self, from: i64, to: i64) -> S {
        (from..=to).fold(S::one(), |acc, k| acc * self.weights.weight_at(k))
    }
}

impl<S: Scalar> ShiftOperator<S> for UnilateralShift<S> {
    fn basis_image(&self, j: i64, n: i64) -> Option<(i64, S)> {
        if j < 1 || n < 0 {
            return None;
        }
        match self.direction {
            Direction::Backward => (j - n >= 1).then(|| (j - n, self.product(j - n + 1, j))),
            Direction::Forward => Some((j + n, self.product(j, j + n - 1))),
        }
    }

    fn apply(&self, x: &SeqVector<S>) -> SeqVector<S> {
        let x = x.restrict(1, i64::MAX);
        let lo = x.lo();
        let scaled: Vec<S> = x
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| c.clone() * self.weights.weight_at(lo + k as i64))
            .collect();
        match self.direction {
            Direction::Backward => SeqVector::new(lo - 1, scaled).restrict(1, i64::MAX),
            Direction::Forward => SeqVector::new(lo + 1, scaled),
        }
    }

    fn apply_inverse(&self, _x: &SeqVector<S>) -> Option<SeqVector<S>> {
        None
    }

    fn domain_start(&self) -> Option<i64> {
        Some(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn a2() -> WeightSequence<f64> {
        WeightSequence::step(0.5, 2.0).unwrap()
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norm(SpaceSpec::C0, &SeqVector::<f64>::basis(5)), 1.0);
        let v = SeqVector::new(0, vec![1.0, 1.0]);
        assert!((norm::<f64>(SpaceSpec::Lp(2.0), &v) - 2f64.sqrt()).abs() < 1e-15);
        let v = &SeqVector::scaled_basis(-2, 3.0) - &SeqVector::scaled_basis(7, 4.0);
        assert_eq!(norm(SpaceSpec::Lp(1.0), &v), 7.0);
        let q = |p: i64, d: i64| BigRational::new(p.into(), d.into());
        let v = SeqVector::new(0, vec![q(3, 5), q(4, 5)]);
        assert_eq!(norm(SpaceSpec::Lp(2.0), &v), q(1, 1));
        let v = SeqVector::new(0, vec![1.0f64, 1.0]);
        assert!((norm(SpaceSpec::Lp(1.5), &v) - 2f64.powf(1.0 / 1.5)).abs() < 1e-15);
    }

    #[test]
    fn vectors_stay_trimmed() {
        let v = SeqVector::new(-3, vec![0.0, 0.0, 1.0, 0.0, 2.0, 0.0]);
        assert_eq!((v.lo(), v.hi()), (-1, 1));
        let z = &v - &v;
        assert!(z.is_zero());
        assert_eq!(z, SeqVector::zero());
    }

    #[test]
    fn iterate_examples() {
        let w = a2();
        let e0 = SeqVector::basis(0);
        assert_eq!(iterate(&w, SpaceSpec::C0, &e0, 1), SeqVector::scaled_basis(-1, 2.0));
        assert_eq!(iterate(&w, SpaceSpec::C0, &e0, 2), SeqVector::basis(-2));
        let x = SeqVector::new(-2, vec![1.0, -3.0, 0.25, 5.0]);
        for n in 0..12 {
            let y = iterate(&w, SpaceSpec::C0, &x, n);
            assert_eq!(iterate(&w, SpaceSpec::C0, &y, -n), x);
        }
    }

    #[test]
    fn basis_image_agrees_with_apply() {
        let w = WeightSequence::new(vec![3.0, 0.5], -1, vec![2.0, 7.0], vec![0.25]).unwrap();
        for j in -6..6 {
            for n in -5..6 {
                let (i, c): (i64, f64) = w.basis_image(j, n).unwrap();
                let direct = w.power(&SeqVector::basis(j), n).unwrap();
                assert_eq!(direct.support(), Some((i, i)));
                assert!((direct.get(i) - c).abs() < 1e-12 * c.abs());
            }
        }
    }

    #[test]
    fn unilateral_shifts() {
        let u = UnilateralWeights::constant(2.0).unwrap();
        let fwd = UnilateralShift::new(u.clone(), Direction::Forward);
        assert_eq!(fwd.apply(&SeqVector::basis(1)), SeqVector::scaled_basis(2, 2.0));
        let bwd = UnilateralShift::new(u, Direction::Backward);
        assert!(bwd.apply(&SeqVector::basis(1)).is_zero());
        assert_eq!(bwd.apply(&SeqVector::basis(3)), SeqVector::scaled_basis(2, 2.0));
        assert_eq!(bwd.basis_image(3, 3), None);
        assert_eq!(fwd.basis_image(2, 3), Some((5, 8.0)));
    }

    #[test]
    fn split_examples() {
        let e0 = SeqVector::<f64>::basis(0);
        assert_eq!(split_mn(&e0), (e0.clone(), SeqVector::zero()));
        let v = &SeqVector::<f64>::basis(1) + &SeqVector::basis(-1);
        assert_eq!(split_mn(&v), (SeqVector::basis(-1), SeqVector::basis(1)));
    }

    #[test]
    fn parse_space() {
        assert_eq!("c0".parse::<SpaceSpec>().unwrap(), SpaceSpec::C0);
        assert_eq!("lp:2".parse::<SpaceSpec>().unwrap(), SpaceSpec::Lp(2.0));
        assert!("lp:0.5".parse::<SpaceSpec>().is_err());
        assert!("hilbert".parse::<SpaceSpec>().is_err());
    }
}
