//! Eventually periodic weight sequences and their product asymptotics.
//!
//! A bi-infinite sequence is stored as a finite core plus one period of
//! each tail. Every asymptotic quantity of the shift (limits of n-step
//! geometric means, dichotomy constants, the unilateral series) reduces
//! to a finite scan over a window of a few periods around the core.

use num_traits::{One, Zero};

use crate::classify::{classify_shadowing_with, ShadowingClass};
use crate::error::{Error, Result};
use crate::scalar::{powi, Real, Scalar};

/// `w_n` for all `n` in Z, described by a core and two periodic tails.
///
/// For `n < core_start` the left tail is repeated leftward so that
/// `w_{core_start - 1}` is the last element of `left_tail`. For
/// `n >= core_start + core.len()` the right tail is repeated rightward
/// starting with its first element.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSequence<S: Scalar> {
    left_tail: Vec<S>,
    core_start: i64,
    core: Vec<S>,
    right_tail: Vec<S>,
}

/// Period geometric means of the two tails, together with the exact
/// period products they come from.
#[derive(Clone, Debug, PartialEq)]
pub struct TailRates<R> {
    pub g_left: R,
    pub g_right: R,
    pub left_product: R,
    pub right_product: R,
    pub left_period: usize,
    pub right_period: usize,
}

/// Outcome of comparing a tail rate against one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum UnitComparison {
    Below,
    Equal,
    Above,
    /// Float mode only: within tolerance of one; carries `|g - 1|`.
    Near(f64),
}

impl UnitComparison {
    pub fn decide<R: Real>(rate: &R, product: &R, tol: f64) -> Self {
        let one = R::one();
        if R::EXACT {
            return match product.partial_cmp(&one) {
                Some(std::cmp::Ordering::Less) => UnitComparison::Below,
                Some(std::cmp::Ordering::Greater) => UnitComparison::Above,
                _ => UnitComparison::Equal,
            };
        }
        let g = rate.to_f64();
        let dist = (g - 1.0).abs();
        if dist <= tol {
            UnitComparison::Near(dist)
        } else if g < 1.0 {
            UnitComparison::Below
        } else {
            UnitComparison::Above
        }
    }
}

impl<R: Real> TailRates<R> {
    pub fn left_vs_one(&self, tol: f64) -> UnitComparison {
        UnitComparison::decide(&self.g_left, &self.left_product, tol)
    }

    pub fn right_vs_one(&self, tol: f64) -> UnitComparison {
        UnitComparison::decide(&self.g_right, &self.right_product, tol)
    }
}

/// Range of starting points for [`WeightSequence::finite_sup_geomean`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeomeanDomain {
    /// sup over k in Z of |w_k ⋯ w_{k+n-1}|^{1/n}
    AllZSup,
    /// inf over k in Z
    AllZInf,
    /// sup over j >= 1 of |w_{-j} ⋯ w_{-j-n+1}|^{1/n}
    LeftNSup,
    /// inf over j >= 1 of |w_j ⋯ w_{j+n-1}|^{1/n}
    RightNInf,
}

/// Constants bounding the tail products of a class C sequence.
///
/// `|w_{-j} ⋯ w_{-j-k+1}| <= beta * s^k` and
/// `1 / |w_j ⋯ w_{j+k-1}| <= beta * s^k` for all j, k >= 1, while `(c, t)`
/// bound `B^n` on vectors supported in indices <= 0 and `B^{-n}` on
/// vectors supported in indices > 0.
#[derive(Clone, Debug, PartialEq)]
pub struct DichotomyConstants<R> {
    pub beta: R,
    pub s: R,
    pub c: R,
    pub t: R,
}

/// `(C, t)` with `||B^n x_M|| <= C t^n ||x_M||` and
/// `||B^{-n} x_N|| <= C t^n ||x_N||` for the splitting of the class.
#[derive(Clone, Debug, PartialEq)]
pub struct ShadowingConstants<R> {
    pub c: R,
    pub t: R,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum WindowFamily {
    AllZ,
    EndAtMost(i64),
    StartAtLeast(i64),
}

/// Slack added to a sharp `beta` that came out equal to one.
pub fn beta_slack<R: Real>() -> R {
    R::one() + R::from_f64(2f64.powi(-20))
}

impl<S: Scalar> WeightSequence<S> {
    pub fn new(left_tail: Vec<S>, core_start: i64, core: Vec<S>, right_tail: Vec<S>) -> Result<Self> {
        if left_tail.is_empty() {
            return Err(Error::EmptyTail("left"));
        }
        if right_tail.is_empty() {
            return Err(Error::EmptyTail("right"));
        }
        let w = WeightSequence {
            left_tail,
            core_start,
            core,
            right_tail,
        };
        let l = w.left_tail.len() as i64;
        for (i, x) in w.left_tail.iter().enumerate() {
            if x.is_zero() {
                return Err(Error::ZeroWeight(core_start - l + i as i64));
            }
        }
        for (i, x) in w.core.iter().enumerate() {
            if x.is_zero() {
                return Err(Error::ZeroWeight(core_start + i as i64));
            }
        }
        for (i, x) in w.right_tail.iter().enumerate() {
            if x.is_zero() {
                return Err(Error::ZeroWeight(w.core_end() + i as i64));
            }
        }
        Ok(w)
    }

    pub fn constant(c: S) -> Result<Self> {
        Self::new(vec![c.clone()], 0, Vec::new(), vec![c])
    }

    /// `left` for n < 0 and `right` for n >= 0.
    pub fn step(left: S, right: S) -> Result<Self> {
        Self::new(vec![left], 0, Vec::new(), vec![right])
    }

    pub fn left_tail(&self) -> &[S] {
        &self.left_tail
    }

    pub fn core_start(&self) -> i64 {
        self.core_start
    }

    pub fn core(&self) -> &[S] {
        &self.core
    }

    pub fn right_tail(&self) -> &[S] {
        &self.right_tail
    }

    /// First index of the right tail.
    pub fn core_end(&self) -> i64 {
        self.core_start + self.core.len() as i64
    }

    pub fn weight_at(&self, n: i64) -> S {
        let ce = self.core_end();
        if n < self.core_start {
            let l = self.left_tail.len() as i64;
            let d = self.core_start - n;
            self.left_tail[((l - d % l) % l) as usize].clone()
        } else if n >= ce {
            let r = self.right_tail.len() as i64;
            self.right_tail[((n - ce) % r) as usize].clone()
        } else {
            self.core[(n - self.core_start) as usize].clone()
        }
    }

    pub fn abs_at(&self, n: i64) -> S::Real {
        self.weight_at(n).modulus()
    }

    /// `w_i w_{i+1} ⋯ w_j`.
    pub fn partial_product(&self, i: i64, j: i64) -> Result<S> {
        if i > j {
            return Err(Error::InvalidRange(format!("product over [{i}, {j}]")));
        }
        Ok((i..=j).fold(S::one(), |acc, n| acc * self.weight_at(n)))
    }

    /// `|w_i ⋯ w_j|`, or one for an empty range.
    pub fn abs_product(&self, i: i64, j: i64) -> S::Real {
        (i..=j).fold(S::Real::one(), |acc, n| acc * self.abs_at(n))
    }

    fn stored(&self) -> impl Iterator<Item = &S> {
        self.left_tail
            .iter()
            .chain(self.core.iter())
            .chain(self.right_tail.iter())
    }

    /// `(m_w, M_w)`: the infimum and supremum of `|w_n|`.
    pub fn bounds(&self) -> (S::Real, S::Real) {
        let mut it = self.stored().map(|x| x.modulus());
        let first = it.next().expect("tails are nonempty");
        it.fold((first.clone(), first), |(lo, hi), x| {
            (Real::min_of(lo, x.clone()), Real::max_of(hi, x))
        })
    }

    pub fn tail_rates(&self) -> TailRates<S::Real> {
        let period_product = |tail: &[S]| {
            tail.iter()
                .fold(S::Real::one(), |acc, x| acc * x.modulus())
        };
        let left_product = period_product(&self.left_tail);
        let right_product = period_product(&self.right_tail);
        TailRates {
            g_left: left_product.nth_root(self.left_tail.len() as u32),
            g_right: right_product.nth_root(self.right_tail.len() as u32),
            left_product,
            right_product,
            left_period: self.left_tail.len(),
            right_period: self.right_tail.len(),
        }
    }

    /// `w'_n = w_{n - offset}`.
    pub fn shifted(&self, offset: i64) -> Self {
        WeightSequence {
            core_start: self.core_start + offset,
            ..self.clone()
        }
    }

    /// `w'_n = w_{1-n}`.
    pub fn reversed(&self) -> Self {
        let rev = |v: &[S]| v.iter().rev().cloned().collect::<Vec<_>>();
        WeightSequence {
            left_tail: rev(&self.right_tail),
            core_start: 2 - self.core_end(),
            core: rev(&self.core),
            right_tail: rev(&self.left_tail),
        }
    }

    /// `w'_n = 1 / w_n`.
    pub fn inverted(&self) -> Self {
        let inv = |v: &[S]| v.iter().map(|x| S::one() / x.clone()).collect::<Vec<_>>();
        WeightSequence {
            left_tail: inv(&self.left_tail),
            core_start: self.core_start,
            core: inv(&self.core),
            right_tail: inv(&self.right_tail),
        }
    }

    /// `w''_n = 1 / w_{1-n}`, the weights of the inverse operator read
    /// through the reflection `e_n -> e_{-n}`.
    pub fn reversed_inverted(&self) -> Self {
        self.reversed().inverted()
    }

    pub fn scaled(&self, lambda: &S) -> Result<Self> {
        let sc = |v: &[S]| v.iter().map(|x| x.clone() * lambda.clone()).collect::<Vec<_>>();
        Self::new(
            sc(&self.left_tail),
            self.core_start,
            sc(&self.core),
            sc(&self.right_tail),
        )
    }

    /// The weights `w_1, w_2, …` as a sequence on N.
    pub fn restrict_positive(&self) -> UnilateralWeights<S> {
        let ce = self.core_end();
        if ce >= 1 {
            let core = (1..ce).map(|n| self.weight_at(n)).collect();
            UnilateralWeights::new(core, self.right_tail.clone()).expect("nonzero weights")
        } else {
            let r = self.right_tail.len() as i64;
            let tail = (1..=r).map(|n| self.weight_at(n)).collect();
            UnilateralWeights::new(Vec::new(), tail).expect("nonzero weights")
        }
    }

    /// Exact sup/inf of n-step geometric means over the starting points of
    /// `domain`. Windows lying entirely inside a tail repeat with the tail
    /// period, so a scan of one period past the core on each side is
    /// exhaustive.
    pub fn finite_sup_geomean(&self, n: usize, domain: GeomeanDomain) -> Result<S::Real> {
        if n == 0 {
            return Err(Error::InvalidParams("window length must be positive".into()));
        }
        let len = n as i64;
        let l = self.left_tail.len() as i64;
        let r = self.right_tail.len() as i64;
        let (cs, ce) = (self.core_start, self.core_end());
        let (starts, want_max): (Vec<i64>, bool) = match domain {
            GeomeanDomain::AllZSup | GeomeanDomain::AllZInf => (
                (cs - len - l + 1..=ce + r - 1).collect(),
                domain == GeomeanDomain::AllZSup,
            ),
            GeomeanDomain::LeftNSup => {
                let ends = (-1i64).min(cs - 1) - l + 1..=-1;
                (ends.map(|e| e - len + 1).collect(), true)
            }
            GeomeanDomain::RightNInf => ((1..=1i64.max(ce) + r - 1).collect(), false),
        };
        let mut best: Option<S::Real> = None;
        for k in starts {
            let p = self.abs_product(k, k + len - 1);
            best = Some(match best {
                None => p,
                Some(b) if want_max => Real::max_of(b, p),
                Some(b) => Real::min_of(b, p),
            });
        }
        Ok(best.expect("nonempty scan").nth_root(n as u32))
    }

    /// sup over windows `[a, b]` of `family` of `|w_a ⋯ w_b|^{±1} / s^{b-a+1}`.
    ///
    /// Valid when every tail the family can run into has rate (or inverse
    /// rate) at most `s`: trimming a full period off such a tail then never
    /// decreases the value, so a window of a few periods around the core
    /// contains a maximizer.
    pub(crate) fn envelope(&self, family: WindowFamily, inverse: bool, s: &S::Real) -> S::Real {
        let l = self.left_tail.len() as i64;
        let r = self.right_tail.len() as i64;
        let (cs, ce) = (self.core_start, self.core_end());
        let (end_max, start_min) = match family {
            WindowFamily::AllZ => (i64::MAX, i64::MIN),
            WindowFamily::EndAtMost(e) => (e, i64::MIN),
            WindowFamily::StartAtLeast(a) => (i64::MAX, a),
        };
        let lo_anchor = if end_max == i64::MAX { cs } else { cs.min(end_max + 1) };
        let hi_anchor = if start_min == i64::MIN { ce } else { ce.max(start_min - 1) };
        let lo = (lo_anchor - 2 * l - 2).max(start_min);
        let hi = (hi_anchor + 2 * r + 2).min(end_max);
        let mut best = S::Real::zero();
        for a in lo..=hi {
            let mut prod = S::Real::one();
            let mut scale = S::Real::one();
            for b in a..=hi {
                prod = prod * self.abs_at(b);
                scale = scale * s.clone();
                let value = if inverse {
                    S::Real::one() / (prod.clone() * scale.clone())
                } else {
                    prod.clone() / scale.clone()
                };
                if value > best {
                    best = value;
                }
            }
        }
        best
    }

    /// Constants for the class of `w` (A, B or C).
    pub fn shadowing_constants(&self) -> Result<ShadowingConstants<S::Real>> {
        self.shadowing_constants_with(S::Real::default_tolerance())
    }

    pub fn shadowing_constants_with(&self, tol: f64) -> Result<ShadowingConstants<S::Real>> {
        let report = classify_shadowing_with(self, tol);
        let rates = &report.rates;
        let (lp, rp) = (rates.left_period, rates.right_period);
        match report.shadowing_class {
            ShadowingClass::A => {
                let t = dominating_rate(&[
                    (rates.left_product.clone(), lp),
                    (rates.right_product.clone(), rp),
                ]);
                let c = Real::max_of(S::Real::one(), self.envelope(WindowFamily::AllZ, false, &t));
                Ok(ShadowingConstants { c, t })
            }
            ShadowingClass::B => {
                let t = dominating_rate(&[
                    (S::Real::one() / rates.left_product.clone(), lp),
                    (S::Real::one() / rates.right_product.clone(), rp),
                ]);
                let c = Real::max_of(S::Real::one(), self.envelope(WindowFamily::AllZ, true, &t));
                Ok(ShadowingConstants { c, t })
            }
            ShadowingClass::C => {
                let d = self.dichotomy_constants_with(tol)?;
                Ok(ShadowingConstants { c: d.c, t: d.t })
            }
            ShadowingClass::Boundary => Err(Error::Boundary(report.boundary_description())),
            ShadowingClass::None => Err(Error::NoSplitting("NONE".into())),
        }
    }

    pub fn dichotomy_constants(&self) -> Result<DichotomyConstants<S::Real>> {
        self.dichotomy_constants_with(S::Real::default_tolerance())
    }

    pub fn dichotomy_constants_with(&self, tol: f64) -> Result<DichotomyConstants<S::Real>> {
        self.normalized_constants(0, tol)
    }

    /// Dichotomy constants relative to the splitting at index `j`: left
    /// windows end at or before `j - 1`, right windows start at or after
    /// `j + 1`. `j = 0` gives [`dichotomy_constants`](Self::dichotomy_constants).
    pub fn normalized_constants(&self, j: i64, tol: f64) -> Result<DichotomyConstants<S::Real>> {
        let report = classify_shadowing_with(self, tol);
        match report.shadowing_class {
            ShadowingClass::C => {}
            ShadowingClass::Boundary => return Err(Error::Boundary(report.boundary_description())),
            other => return Err(Error::NotClassC(other.as_str().into())),
        }
        let rates = report.rates;
        let s = dominating_rate(&[
            (rates.left_product.clone(), rates.left_period),
            (S::Real::one() / rates.right_product.clone(), rates.right_period),
        ]);
        let left = self.envelope(WindowFamily::EndAtMost(j - 1), false, &s);
        let right = self.envelope(WindowFamily::StartAtLeast(j + 1), true, &s);
        let sharp = Real::max_of(left, right);
        let beta = if sharp > S::Real::one() { sharp } else { beta_slack() };
        let split_m = self.envelope(WindowFamily::EndAtMost(j), false, &s);
        let split_n = self.envelope(WindowFamily::StartAtLeast(j + 2), true, &s);
        let c = Real::max_of(S::Real::one(), Real::max_of(split_m, split_n));
        Ok(DichotomyConstants {
            beta,
            t: s.clone(),
            s,
            c,
        })
    }
}

/// Smallest convenient `s` with `s^P >= product` for every `(product, P)`.
///
/// Starts from the root approximations and nudges upward until the exact
/// comparison holds, so the result dominates every rate even when the
/// roots are irrational.
pub(crate) fn dominating_rate<R: Real>(sides: &[(R, usize)]) -> R {
    let mut s = sides
        .iter()
        .map(|(p, n)| p.nth_root(*n as u32))
        .fold(R::zero(), Real::max_of);
    let bump = R::one() + R::from_f64(2f64.powi(-40));
    while sides.iter().any(|(p, n)| powi(&s, *n as u64) < *p) {
        s = s * bump.clone();
    }
    s
}

/// Eventually periodic weights `w_1, w_2, …` on N: `core` first, then
/// `tail` repeated.
#[derive(Clone, Debug, PartialEq)]
pub struct UnilateralWeights<S: Scalar> {
    core: Vec<S>,
    tail: Vec<S>,
}

/// Quantities testing the equivalent conditions for unilateral shifts.
#[derive(Clone, Debug, PartialEq)]
pub struct UnilateralSums<R> {
    /// min over n <= horizon of sup_k |w_k ⋯ w_{k+n-1}|.
    pub q2: R,
    /// The length n attaining `q2`.
    pub q2_length: usize,
    /// sup_k Σ_{n>=0} |w_k ⋯ w_{k+n}|; `None` when divergent.
    pub q3: Option<R>,
    /// sup_k Σ_{n=0}^{horizon} |w_k ⋯ w_{k+n}|.
    pub q3_partial: R,
    /// `beta s^{horizon+1} / (1 - s)`, dominating the remainder of `q3_partial`.
    pub q3_tail_bound: Option<R>,
    /// sup_k Σ_{n=0}^{k-1} |w_k w_{k-1} ⋯ w_{k-n}|; `None` when divergent.
    pub q4: Option<R>,
    /// Period geometric mean of the tail.
    pub rate: R,
    pub period_product: R,
}

impl<S: Scalar> UnilateralWeights<S> {
    pub fn new(core: Vec<S>, tail: Vec<S>) -> Result<Self> {
        if tail.is_empty() {
            return Err(Error::EmptyTail("unilateral"));
        }
        let c = core.len() as i64;
        for (i, x) in core.iter().enumerate() {
            if x.is_zero() {
                return Err(Error::ZeroWeight(i as i64 + 1));
            }
        }
        for (i, x) in tail.iter().enumerate() {
            if x.is_zero() {
                return Err(Error::ZeroWeight(c + i as i64 + 1));
            }
        }
        Ok(UnilateralWeights { core, tail })
    }

    pub fn constant(c: S) -> Result<Self> {
        Self::new(Vec::new(), vec![c])
    }

    pub fn core(&self) -> &[S] {
        &self.core
    }

    pub fn tail(&self) -> &[S] {
        &self.tail
    }

    /// `w_k` for `k >= 1`.
    pub fn weight_at(&self, k: i64) -> S {
        assert!(k >= 1, "unilateral weights are indexed from 1");
        let c = self.core.len() as i64;
        if k <= c {
            self.core[(k - 1) as usize].clone()
        } else {
            self.tail[((k - c - 1) % self.tail.len() as i64) as usize].clone()
        }
    }

    pub fn abs_at(&self, k: i64) -> S::Real {
        self.weight_at(k).modulus()
    }

    pub fn period_product(&self) -> S::Real {
        self.tail.iter().fold(S::Real::one(), |acc, x| acc * x.modulus())
    }

    pub fn rate(&self) -> S::Real {
        self.period_product().nth_root(self.tail.len() as u32)
    }

    /// The same weights placed on indices >= 1 of a bilateral sequence
    /// whose negative side is identically one.
    pub fn as_bilateral(&self) -> WeightSequence<S> {
        WeightSequence::new(vec![S::one()], 1, self.core.clone(), self.tail.clone())
            .expect("nonzero weights")
    }

    pub fn unilateral_sums(&self, horizon: usize) -> Result<UnilateralSums<S::Real>> {
        if horizon == 0 {
            return Err(Error::InvalidParams("horizon must be positive".into()));
        }
        let c = self.core.len() as i64;
        let p = self.tail.len() as i64;
        let pi = self.period_product();
        let one = S::Real::one();
        let converges = pi < one;
        let starts = 1..=c + p;

        let mut q2: Option<(S::Real, usize)> = None;
        let mut running: Vec<S::Real> = starts.clone().map(|_| one.clone()).collect();
        let mut partial_sums: Vec<S::Real> = starts.clone().map(|_| S::Real::zero()).collect();
        for n in 1..=horizon as i64 {
            let mut sup = S::Real::zero();
            for (idx, k) in starts.clone().enumerate() {
                running[idx] = running[idx].clone() * self.abs_at(k + n - 1);
                partial_sums[idx] = partial_sums[idx].clone() + running[idx].clone();
                sup = Real::max_of(sup, running[idx].clone());
            }
            if q2.as_ref().is_none_or(|(best, _)| sup < *best) {
                q2 = Some((sup, n as usize));
            }
        }
        // One more term so the partial sum runs over n = 0..=horizon.
        for (idx, k) in starts.clone().enumerate() {
            running[idx] = running[idx].clone() * self.abs_at(k + horizon as i64);
            partial_sums[idx] = partial_sums[idx].clone() + running[idx].clone();
        }
        let q3_partial = partial_sums.into_iter().fold(S::Real::zero(), Real::max_of);
        let (q2, q2_length) = q2.expect("horizon >= 1");

        let q3 = converges.then(|| {
            // Tail starts: R_k = (first P terms) / (1 - pi).
            let tail_value = |k: i64| {
                let mut prod = one.clone();
                let mut sum = S::Real::zero();
                for n in 0..p {
                    prod = prod * self.abs_at(k + n);
                    sum = sum + prod.clone();
                }
                sum / (one.clone() - pi.clone())
            };
            let r_after_core = tail_value(c + 1);
            let mut sup = S::Real::zero();
            for k in 1..=c {
                let mut prod = one.clone();
                let mut sum = S::Real::zero();
                for m in k..=c {
                    prod = prod * self.abs_at(m);
                    sum = sum + prod.clone();
                }
                sup = Real::max_of(sup, sum + prod * r_after_core.clone());
            }
            for k in c + 1..=c + p {
                sup = Real::max_of(sup, tail_value(k));
            }
            sup
        });

        let q3_tail_bound = converges.then(|| {
            let s = dominating_rate(&[(pi.clone(), p as usize)]);
            let env = self
                .as_bilateral()
                .envelope(WindowFamily::StartAtLeast(1), false, &s);
            let beta = if env > one { env } else { beta_slack() };
            beta * powi(&s, horizon as u64 + 1) / (one.clone() - s)
        });

        let q4 = converges.then(|| {
            // T_k = |w_k| (1 + T_{k-1}); per residue class past the core,
            // T_{k+P} = pi T_k + c_k moves monotonically to c_k / (1 - pi).
            let last = c + 2 * p;
            let mut t = vec![S::Real::zero(); (last + 1) as usize];
            for k in 1..=last {
                t[k as usize] = self.abs_at(k) * (one.clone() + t[(k - 1) as usize].clone());
            }
            let mut sup = t[1..=(c + p) as usize]
                .iter()
                .cloned()
                .fold(S::Real::zero(), Real::max_of);
            for k in c..c + p {
                let ck = t[(k + p) as usize].clone() - pi.clone() * t[k as usize].clone();
                sup = Real::max_of(sup, ck / (one.clone() - pi.clone()));
            }
            sup
        });

        Ok(UnilateralSums {
            q2,
            q2_length,
            q3,
            q3_partial,
            q3_tail_bound,
            q4,
            rate: self.rate(),
            period_product: pi,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    fn a2() -> WeightSequence<f64> {
        WeightSequence::new(vec![0.5], 0, vec![], vec![2.0]).unwrap()
    }

    /// Direct reading of the periodic-tail semantics, kept deliberately
    /// naive: walk outward from the core one index at a time.
    fn walk_weight<S: Scalar>(w: &WeightSequence<S>, n: i64) -> S {
        let (cs, ce) = (w.core_start(), w.core_end());
        if (cs..ce).contains(&n) {
            return w.core()[(n - cs) as usize].clone();
        }
        if n >= ce {
            let mut idx = 0usize;
            let mut m = ce;
            while m < n {
                idx = (idx + 1) % w.right_tail().len();
                m += 1;
            }
            return w.right_tail()[idx].clone();
        }
        let mut idx = w.left_tail().len() - 1;
        let mut m = cs - 1;
        while m > n {
            idx = (idx + w.left_tail().len() - 1) % w.left_tail().len();
            m -= 1;
        }
        w.left_tail()[idx].clone()
    }

    #[test]
    fn readback_examples() {
        let w = a2();
        assert_eq!(w.weight_at(-5), 0.5);
        assert_eq!(w.weight_at(0), 2.0);
        assert_eq!(w.weight_at(-1), 0.5);
        let w = WeightSequence::new(vec![2.0, 3.0], 0, vec![], vec![1.0]).unwrap();
        assert_eq!(w.weight_at(-1), 3.0);
        assert_eq!(w.weight_at(-2), 2.0);
        let w = WeightSequence::new(vec![2.0], 0, vec![3.0], vec![0.5]).unwrap();
        assert_eq!((w.weight_at(-1), w.weight_at(0), w.weight_at(1)), (2.0, 3.0, 0.5));
        let w = WeightSequence::new(vec![1, 2, 3].into_iter().map(f64::from).collect(), -3, vec![7.0, 8.0], vec![4.0, 5.0])
            .unwrap();
        for n in -20..20 {
            assert_eq!(w.weight_at(n), walk_weight(&w, n), "n = {n}");
        }
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            WeightSequence::new(vec![1.0], 0, vec![0.0], vec![1.0]),
            Err(Error::ZeroWeight(0))
        );
        assert_eq!(
            WeightSequence::<f64>::new(vec![], 0, vec![], vec![1.0]),
            Err(Error::EmptyTail("left"))
        );
    }

    #[test]
    fn products() {
        let twos = WeightSequence::constant(2.0).unwrap();
        assert_eq!(twos.partial_product(1, 3).unwrap(), 8.0);
        assert_eq!(a2().partial_product(-2, 1).unwrap(), 1.0);
        assert!(a2().partial_product(2, 1).is_err());
        let exact = WeightSequence::new(vec![q(1, 3)], 0, vec![q(5, 7)], vec![q(3, 2)]).unwrap();
        assert_eq!(exact.partial_product(-1, 2).unwrap(), q(1, 3) * q(5, 7) * q(9, 4));
    }

    #[test]
    fn rates_and_bounds() {
        let r = a2().tail_rates();
        assert_eq!((r.g_left, r.g_right), (0.5, 2.0));
        let w = WeightSequence::new(vec![q(2, 1), q(8, 1)], 0, vec![], vec![q(1, 1)]).unwrap();
        let r = w.tail_rates();
        assert_eq!((r.g_left, r.g_right), (q(4, 1), q(1, 1)));
        let w = WeightSequence::new(vec![2.0], 0, vec![0.1, 9.0], vec![0.5]).unwrap();
        assert_eq!(w.bounds(), (0.1, 9.0));
    }

    #[test]
    fn reversal_matches_pointwise_definition() {
        let w = WeightSequence::new(vec![q(2, 1), q(3, 1)], -2, vec![q(5, 1), q(7, 1), q(11, 1)], vec![q(13, 1), q(17, 1), q(19, 1)])
            .unwrap();
        let rev = w.reversed_inverted();
        for n in -30..30 {
            assert_eq!(rev.weight_at(n), q(1, 1) / w.weight_at(1 - n), "n = {n}");
        }
        let shifted = w.shifted(4);
        for n in -30..30 {
            assert_eq!(shifted.weight_at(n), w.weight_at(n - 4));
        }
    }

    #[test]
    fn geomean_examples() {
        let halves = WeightSequence::constant(0.5).unwrap();
        assert_eq!(halves.finite_sup_geomean(10, GeomeanDomain::AllZSup).unwrap(), 0.5);
        assert_eq!(a2().finite_sup_geomean(4, GeomeanDomain::AllZSup).unwrap(), 2.0);
        assert_eq!(a2().finite_sup_geomean(4, GeomeanDomain::AllZInf).unwrap(), 0.5);
        assert_eq!(a2().finite_sup_geomean(3, GeomeanDomain::LeftNSup).unwrap(), 0.5);
        assert_eq!(a2().finite_sup_geomean(3, GeomeanDomain::RightNInf).unwrap(), 2.0);
    }

    /// Brute-force scan over a range much wider than the provable window.
    fn brute_geomean(w: &WeightSequence<BigRational>, n: i64, domain: GeomeanDomain) -> BigRational {
        let candidates: Vec<i64> = match domain {
            GeomeanDomain::AllZSup | GeomeanDomain::AllZInf => (-60..60).collect(),
            GeomeanDomain::LeftNSup => (1..60).map(|j| -j - n + 1).collect(),
            GeomeanDomain::RightNInf => (1..60).collect(),
        };
        let prods = candidates.iter().map(|&k| w.abs_product(k, k + n - 1));
        let pick = match domain {
            GeomeanDomain::AllZSup | GeomeanDomain::LeftNSup => prods.max(),
            _ => prods.min(),
        };
        pick.unwrap().nth_root(n as u32)
    }

    #[test]
    fn geomean_window_is_exhaustive() {
        let w = WeightSequence::new(
            vec![q(1, 2), q(3, 1), q(1, 4)],
            -2,
            vec![q(5, 1), q(1, 7), q(2, 1)],
            vec![q(2, 3), q(9, 4)],
        )
        .unwrap();
        for n in 1..8 {
            for d in [
                GeomeanDomain::AllZSup,
                GeomeanDomain::AllZInf,
                GeomeanDomain::LeftNSup,
                GeomeanDomain::RightNInf,
            ] {
                assert_eq!(w.finite_sup_geomean(n as usize, d).unwrap(), brute_geomean(&w, n, d), "{d:?} n={n}");
            }
        }
    }

    #[test]
    fn a2_dichotomy_constants() {
        let d = a2().dichotomy_constants().unwrap();
        assert_eq!(d.s, 0.5);
        assert_eq!(d.beta, 1.0 + 2f64.powi(-20));
        assert_eq!(d.t, 0.5);
        // Largest transient: B^1 e_0 = 2 e_{-1} against t = 1/2.
        assert_eq!(d.c, 4.0);
        for k in 1..40 {
            for j in 1..20 {
                let left = a2().abs_product(-j - k + 1, -j);
                let right = 1.0 / a2().abs_product(j, j + k - 1);
                let bound = d.beta * d.s.powi(k as i32);
                assert!(left <= bound && right <= bound);
            }
        }
    }

    #[test]
    fn dichotomy_constants_dominate_windows() {
        let w = WeightSequence::new(vec![q(1, 2), q(4, 5)], 0, vec![], vec![q(2, 1), q(3, 1)]).unwrap();
        let d = w.dichotomy_constants().unwrap();
        assert!(d.s > q(0, 1) && d.s < q(1, 1) && d.beta > q(1, 1));
        // s dominates both rates: s^2 >= 0.4 and s^2 >= 1/6.
        assert!(d.s.clone() * d.s.clone() >= q(2, 5));
        for j in 1..15i64 {
            for k in 1..30i64 {
                let bound = d.beta.clone() * powi(&d.s, k as u64);
                assert!(w.abs_product(-j - k + 1, -j) <= bound);
                assert!(q(1, 1) / w.abs_product(j, j + k - 1) <= bound);
                let m_side = w.abs_product(-j - k + 2, 1 - j);
                let n_side = q(1, 1) / w.abs_product(j + 1, j + k);
                let split = d.c.clone() * powi(&d.t, k as u64);
                assert!(m_side <= split && n_side <= split);
            }
        }
        assert!(matches!(
            WeightSequence::constant(2.0).unwrap().dichotomy_constants(),
            Err(Error::NotClassC(_))
        ));
    }

    #[test]
    fn unilateral_examples() {
        let halves = UnilateralWeights::constant(q(1, 2)).unwrap();
        let sums = halves.unilateral_sums(16).unwrap();
        assert_eq!(sums.q3, Some(q(1, 1)));
        assert_eq!(sums.q4, Some(q(1, 1)));
        assert_eq!(sums.q2, q(1, 65536));
        let ones = UnilateralWeights::constant(1.0).unwrap();
        let sums = ones.unilateral_sums(16).unwrap();
        assert_eq!((sums.q3, sums.q4), (None, None));
        assert_eq!(sums.q2, 1.0);
    }

    /// Direct partial sums far past the period give lower bounds that
    /// approach the closed forms.
    #[test]
    fn unilateral_closed_forms_match_long_sums() {
        let w = UnilateralWeights::new(vec![3.0, 0.25, 2.0], vec![0.5, 1.5, 0.75]).unwrap();
        let sums = w.unilateral_sums(400).unwrap();
        let q3 = sums.q3.unwrap();
        assert!(f64::abs(sums.q3_partial - q3) < 1e-12);
        let mut q4: f64 = 0.0;
        let mut t = 0.0;
        for k in 1..2000 {
            t = w.abs_at(k) * (1.0 + t);
            q4 = q4.max(t);
        }
        assert!(f64::abs(sums.q4.unwrap() - q4) < 1e-9);
        assert!(sums.q3_tail_bound.unwrap() >= 0.0);
    }

    #[test]
    fn restriction_keeps_positive_weights() {
        let w = WeightSequence::new(vec![2.0], -5, vec![3.0], vec![0.5, 7.0, 11.0]).unwrap();
        let u = w.restrict_positive();
        for k in 1..30 {
            assert_eq!(u.weight_at(k), w.weight_at(k));
        }
        let w = WeightSequence::new(vec![2.0], 0, vec![3.0, 4.0, 5.0], vec![0.5]).unwrap();
        let u = w.restrict_positive();
        for k in 1..30 {
            assert_eq!(u.weight_at(k), w.weight_at(k));
        }
    }
}
