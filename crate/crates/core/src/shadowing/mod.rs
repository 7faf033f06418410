//! Pseudotrajectories, the splitting series that shadows them, and an
//! independent minimax oracle.

mod oracle;

pub use oracle::{oracle_best_shadow, OracleResult};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::{classify_shadowing_with, ShadowingClass};
use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};
use crate::spaces::{norm, Direction, SeqVector, ShiftOperator, SpaceSpec, UnilateralShift};
use crate::weights::{ShadowingConstants, UnilateralWeights, WeightSequence};

/// Points `x_{n0}, …, x_{n1}` with declared one-step defect `delta`.
#[derive(Clone, Debug, PartialEq)]
pub struct PseudoTrajectory<S: Scalar> {
    pub n0: i64,
    pub points: Vec<SeqVector<S>>,
    pub delta: S::Real,
}

impl<S: Scalar> PseudoTrajectory<S> {
    pub fn new(n0: i64, points: Vec<SeqVector<S>>, delta: S::Real) -> Self {
        PseudoTrajectory { n0, points, delta }
    }

    /// Last time index.
    pub fn n1(&self) -> i64 {
        self.n0 + self.points.len() as i64 - 1
    }

    pub fn point(&self, n: i64) -> &SeqVector<S> {
        &self.points[(n - self.n0) as usize]
    }

    pub fn contains_time(&self, n: i64) -> bool {
        n >= self.n0 && n <= self.n1()
    }

    /// The orbit of `x` over `[n0, n1]`, with zero defect.
    pub fn orbit<T: ShiftOperator<S>>(op: &T, x: &SeqVector<S>, n0: i64, n1: i64) -> Result<Self> {
        let start = op
            .power(x, n0)
            .ok_or_else(|| Error::Unsupported("negative powers of a non-invertible shift".into()))?;
        let mut points = vec![start];
        for _ in n0..n1 {
            let next = op.apply(points.last().expect("nonempty"));
            points.push(next);
        }
        Ok(PseudoTrajectory::new(n0, points, S::Real::zero()))
    }
}

/// `max_n ||T x_n - x_{n+1}||`.
pub fn defect<S: Scalar, T: ShiftOperator<S>>(op: &T, space: SpaceSpec, traj: &PseudoTrajectory<S>) -> Result<S::Real> {
    if traj.points.len() < 2 {
        return Err(Error::TooShort(traj.points.len()));
    }
    Ok(traj
        .points
        .windows(2)
        .map(|pair| norm(space, &(&op.apply(&pair[0]) - &pair[1])))
        .fold(S::Real::zero(), Real::max_of))
}

fn random_scalar<S: Scalar>(rng: &mut ChaCha8Rng) -> S {
    let re = rng.gen_range(-1.0..1.0);
    let im = rng.gen_range(-1.0..1.0);
    S::from_f64_parts(re, im)
}

/// Random vector supported in `[lo, hi]` with norm strictly below `radius`.
fn random_in_ball<S: Scalar>(rng: &mut ChaCha8Rng, space: SpaceSpec, lo: i64, hi: i64, radius: &S::Real) -> SeqVector<S> {
    if hi < lo || radius.is_zero() {
        return SeqVector::zero();
    }
    let v = SeqVector::new(lo, (lo..=hi).map(|_| random_scalar::<S>(rng)).collect());
    let n = norm(space, &v);
    if n.is_zero() {
        return SeqVector::zero();
    }
    // Stay a hair inside the ball so that rounding in irrational norms
    // cannot push the result past the radius.
    let u = rng.gen_range(0.0..1.0) * (1.0 - 1e-9);
    let factor = radius.clone() * S::Real::from_f64(u) / n;
    v.scale(&S::from_real(factor))
}

/// `x_{n0}` uniform-ish in the unit ball, then `x_{n+1} = T x_n + kick_n`
/// with kicks in the `delta`-ball supported in `[-r, r]`.
pub fn random_pseudotrajectory<S: Scalar, T: ShiftOperator<S>>(
    op: &T,
    space: SpaceSpec,
    delta: &S::Real,
    window: (i64, i64),
    seed: u64,
    support_radius: i64,
) -> Result<PseudoTrajectory<S>> {
    let (n0, n1) = window;
    if n0 >= n1 {
        return Err(Error::InvalidRange(format!("window [{n0}, {n1}] needs n0 < n1")));
    }
    if *delta < S::Real::zero() {
        return Err(Error::InvalidParams("delta must be nonnegative".into()));
    }
    if support_radius < 0 {
        return Err(Error::InvalidParams("support radius must be nonnegative".into()));
    }
    let lo = op.domain_start().map_or(-support_radius, |d| d.max(-support_radius));
    let hi = support_radius.max(op.domain_start().unwrap_or(i64::MIN));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = vec![random_in_ball(&mut rng, space, lo, hi, &S::Real::one())];
    for _ in n0..n1 {
        let kick = random_in_ball(&mut rng, space, lo, hi, delta);
        let next = &op.apply(points.last().expect("nonempty")) + &kick;
        points.push(next);
    }
    Ok(PseudoTrajectory::new(n0, points, delta.clone()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AdversarialKind {
    /// Kicks aligned so that one coordinate accumulates the whole defect.
    BackwardNecessity,
    /// Repeated kicks at `e_0` in both time directions.
    BilateralE0,
    /// Forward unilateral shift, kicks aligned along the forward products.
    ForwardUnilateral,
}

impl AdversarialKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AdversarialKind::BackwardNecessity => "backward_necessity",
            AdversarialKind::BilateralE0 => "bilateral_e0",
            AdversarialKind::ForwardUnilateral => "forward_unilateral",
        }
    }
}

impl std::str::FromStr for AdversarialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "backward_necessity" => Ok(AdversarialKind::BackwardNecessity),
            "bilateral_e0" => Ok(AdversarialKind::BilateralE0),
            "forward_unilateral" => Ok(AdversarialKind::ForwardUnilateral),
            other => Err(Error::Parse(format!("unknown adversarial kind {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct AdversarialParams {
    pub t: Option<i64>,
    pub m: Option<i64>,
}

fn required(value: Option<i64>, name: &str) -> Result<i64> {
    match value {
        Some(v) if v >= 1 => Ok(v),
        Some(v) => Err(Error::InvalidParams(format!("{name} must be positive, got {v}"))),
        None => Err(Error::InvalidParams(format!("{name} is required"))),
    }
}

/// The adversarial constructions. For `ForwardUnilateral` the weights
/// `w_1, w_2, …` of `w` define a forward shift on N and the result is a
/// pseudotrajectory of that shift (see [`forward_unilateral_pseudotrajectory`]).
pub fn adversarial_pseudotrajectory<S: Scalar>(
    w: &WeightSequence<S>,
    _space: SpaceSpec,
    kind: AdversarialKind,
    delta: &S::Real,
    params: AdversarialParams,
) -> Result<PseudoTrajectory<S>> {
    if *delta <= S::Real::zero() {
        return Err(Error::InvalidParams("delta must be positive".into()));
    }
    let d = S::from_real(delta.clone());
    match kind {
        AdversarialKind::BackwardNecessity => {
            let t = required(params.t, "t")?;
            let m = required(params.m, "m")?;
            let aligned = |last: i64| w.partial_product(t, last).expect("ordered").phase_align();
            let mut points = vec![SeqVector::scaled_basis(t + m, aligned(t + m))];
            for k in 1..=m {
                let kick = SeqVector::scaled_basis(t + m - k, d.clone() * aligned(t + m - k));
                points.push(&w.apply(points.last().expect("nonempty")) + &kick);
            }
            points.push(w.apply(points.last().expect("nonempty")));
            Ok(PseudoTrajectory::new(0, points, delta.clone()))
        }
        AdversarialKind::BilateralE0 => {
            let m = required(params.m, "m")?;
            let kick = SeqVector::scaled_basis(0, d);
            let mut forward = vec![SeqVector::basis(0)];
            for _ in 1..=m {
                forward.push(&w.apply(forward.last().expect("nonempty")) + &kick);
            }
            let mut backward = Vec::new();
            let mut y = SeqVector::basis(0);
            for _ in 1..=m {
                y = w.apply_inverse(&(&y + &kick)).expect("invertible");
                backward.push(y.clone());
            }
            backward.reverse();
            backward.extend(forward);
            Ok(PseudoTrajectory::new(-m, backward, delta.clone()))
        }
        AdversarialKind::ForwardUnilateral => {
            let t = required(params.t, "t")?;
            forward_unilateral_pseudotrajectory(&w.restrict_positive(), delta, t)
        }
    }
}

/// `x_0 = 0`, `x_k = F x_{k-1} + delta θ_k e_k` for `k = 1..t`, then one
/// unkicked step, where `F e_k = w_k e_{k+1}` and `θ_k` aligns the phase
/// of `w_k ⋯ w_t`.
pub fn forward_unilateral_pseudotrajectory<S: Scalar>(
    w: &UnilateralWeights<S>,
    delta: &S::Real,
    t: i64,
) -> Result<PseudoTrajectory<S>> {
    if t < 1 {
        return Err(Error::InvalidParams(format!("t must be positive, got {t}")));
    }
    let op = UnilateralShift::new(w.clone(), Direction::Forward);
    let d = S::from_real(delta.clone());
    let mut points = vec![SeqVector::zero()];
    for k in 1..=t {
        let prod = (k..=t).fold(S::one(), |acc, i| acc * w.weight_at(i));
        let kick = SeqVector::scaled_basis(k, d.clone() * prod.phase_align());
        points.push(&op.apply(points.last().expect("nonempty")) + &kick);
    }
    points.push(op.apply(points.last().expect("nonempty")));
    Ok(PseudoTrajectory::new(0, points, delta.clone()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShadowResult<S: Scalar> {
    pub shadow_point: SeqVector<S>,
    /// `max_n ||x_n - B^n p||`, taken from the corrections `y_n`, which
    /// equal `x_n - B^n p` exactly when the recurrence holds. Iterating `p`
    /// in floating point loses the difference to cancellation once the
    /// trajectory grows; see `orbit_consistency`.
    pub max_error: S::Real,
    /// `2 C delta / (1 - t)`.
    pub error_bound: S::Real,
    pub per_step_errors: Vec<S::Real>,
    pub n0: i64,
    /// The correction sequence `y_n`, so that `x_n - y_n` is the orbit.
    pub corrections: Vec<SeqVector<S>>,
    /// `max_n ||B y_n + z_n - y_{n+1}||`.
    pub recurrence_defect: S::Real,
    /// Scale for relative comparisons of `recurrence_defect`.
    pub recurrence_scale: S::Real,
    /// `max_n ||(x_n - B^n p) - y_n||` with `B^n p` iterated directly; zero
    /// in exact arithmetic.
    pub orbit_consistency: S::Real,
    /// `max_n max(||x_n||, ||B^n p||)`, the scale of rounding in
    /// `orbit_consistency`.
    pub orbit_scale: S::Real,
    pub constants: ShadowingConstants<S::Real>,
    pub delta_used: S::Real,
}

/// Where the defects are split between the contracting and expanding parts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Splitting {
    /// Everything contracts under forward iteration.
    AllStable,
    /// Everything contracts under backward iteration.
    AllUnstable,
    /// Indices <= 0 contract forward, indices > 0 backward.
    Index,
}

impl Splitting {
    fn split<S: Scalar>(self, z: &SeqVector<S>) -> (SeqVector<S>, SeqVector<S>) {
        match self {
            Splitting::AllStable => (z.clone(), SeqVector::zero()),
            Splitting::AllUnstable => (SeqVector::zero(), z.clone()),
            Splitting::Index => z.split_mn(),
        }
    }
}

fn splitting_for<S: Scalar>(w: &WeightSequence<S>) -> Result<(Splitting, ShadowingConstants<S::Real>)> {
    let tol = S::Real::default_tolerance();
    let report = classify_shadowing_with(w, tol);
    let splitting = match report.shadowing_class {
        ShadowingClass::A => Splitting::AllStable,
        ShadowingClass::B => Splitting::AllUnstable,
        ShadowingClass::C => Splitting::Index,
        ShadowingClass::Boundary => return Err(Error::Boundary(report.boundary_description())),
        ShadowingClass::None => return Err(Error::NoSplitting("NONE".into())),
    };
    Ok((splitting, w.shadowing_constants_with(tol)?))
}

/// `y_n = Σ_{k>=0} B^k z^M_{n-k-1} - Σ_{k>=1} B^{-k} z^N_{n+k-1}` over the
/// window, with `z_s = x_{s+1} - B x_s` inside the window and zero outside.
/// Each defect is pushed forward (stable part) or backward (unstable part)
/// from its own time, so every term is computed directly.
fn correction_series<S: Scalar>(
    w: &WeightSequence<S>,
    traj: &PseudoTrajectory<S>,
    splitting: Splitting,
) -> (Vec<SeqVector<S>>, Vec<SeqVector<S>>) {
    let (n0, n1) = (traj.n0, traj.n1());
    let defects: Vec<SeqVector<S>> = (n0..n1)
        .map(|s| traj.point(s + 1) - &w.apply(traj.point(s)))
        .collect();
    let mut y = vec![SeqVector::zero(); traj.points.len()];
    for s in n0..n1 {
        let (stable, unstable) = splitting.split(&defects[(s - n0) as usize]);
        let mut v = stable;
        for n in s + 1..=n1 {
            if v.is_zero() {
                break;
            }
            let slot = &mut y[(n - n0) as usize];
            *slot = &*slot + &v;
            v = w.apply(&v);
        }
        let mut v = w.apply_inverse(&unstable).expect("invertible");
        for n in (n0..=s).rev() {
            if v.is_zero() {
                break;
            }
            let slot = &mut y[(n - n0) as usize];
            *slot = &*slot - &v;
            v = w.apply_inverse(&v).expect("invertible");
        }
    }
    (y, defects)
}

fn assemble<S: Scalar>(
    w: &WeightSequence<S>,
    space: SpaceSpec,
    traj: &PseudoTrajectory<S>,
    reference: i64,
    splitting: Splitting,
    constants: ShadowingConstants<S::Real>,
) -> Result<ShadowResult<S>> {
    let (n0, n1) = (traj.n0, traj.n1());
    let (y, z) = correction_series(w, traj, splitting);
    // `x_n - y_n` is the same orbit for every anchor time; anchoring where
    // the orbit is largest keeps cancellation out of the shadow point.
    let anchor_time = match splitting {
        Splitting::AllStable => n0,
        Splitting::AllUnstable => n1,
        Splitting::Index => reference,
    };
    let a = (anchor_time - n0) as usize;
    let mut orbit = vec![SeqVector::zero(); traj.points.len()];
    orbit[a] = traj.point(anchor_time) - &y[a];
    for k in a + 1..orbit.len() {
        orbit[k] = w.apply(&orbit[k - 1]);
    }
    for k in (0..a).rev() {
        orbit[k] = w.apply_inverse(&orbit[k + 1]).expect("invertible");
    }
    let shadow_point = w.power(&orbit[a], -anchor_time).expect("invertible");
    let per_step_errors: Vec<S::Real> = y.iter().map(|v| norm(space, v)).collect();
    let orbit_consistency = traj
        .points
        .iter()
        .zip(&orbit)
        .zip(&y)
        .map(|((x, o), c)| norm(space, &(&(x - o) - c)))
        .fold(S::Real::zero(), Real::max_of);
    let orbit_scale = traj
        .points
        .iter()
        .chain(&orbit)
        .map(|x| norm(space, x))
        .fold(S::Real::zero(), Real::max_of);
    let max_error = per_step_errors.iter().cloned().fold(S::Real::zero(), Real::max_of);

    let mut recurrence_defect = S::Real::zero();
    let mut recurrence_scale = S::Real::zero();
    for s in n0..n1 {
        let k = (s - n0) as usize;
        let lhs = &w.apply(&y[k]) + &z[k];
        recurrence_defect = Real::max_of(recurrence_defect, norm(space, &(&lhs - &y[k + 1])));
        recurrence_scale = Real::max_of(recurrence_scale, norm(space, &y[k + 1]));
        recurrence_scale = Real::max_of(recurrence_scale, norm(space, &z[k]));
    }

    let measured = if traj.points.len() >= 2 {
        defect(w, space, traj)?
    } else {
        S::Real::zero()
    };
    let delta_used = Real::max_of(traj.delta.clone(), measured);
    let two = S::Real::one() + S::Real::one();
    let error_bound =
        two * constants.c.clone() * delta_used.clone() / (S::Real::one() - constants.t.clone());

    Ok(ShadowResult {
        shadow_point,
        max_error,
        error_bound,
        per_step_errors,
        n0: traj.n0,
        corrections: y,
        recurrence_defect,
        recurrence_scale,
        orbit_consistency,
        orbit_scale,
        constants,
        delta_used,
    })
}

/// Shadows a trajectory indexed over nonnegative times; the orbit passes
/// through `x_{n0} - y_{n0}` at time `n0`.
pub fn shadow_positive<S: Scalar>(
    w: &WeightSequence<S>,
    space: SpaceSpec,
    traj: &PseudoTrajectory<S>,
) -> Result<ShadowResult<S>> {
    if traj.n0 < 0 {
        return Err(Error::BadWindow(format!("start at a nonnegative time, not {}", traj.n0)));
    }
    let (splitting, constants) = splitting_for(w)?;
    assemble(w, space, traj, traj.n0, splitting, constants)
}

/// Two-sided version of [`shadow_positive`]: the window must contain
/// time zero, and the shadow point is `x_0 - y_0`.
pub fn shadow_bilateral<S: Scalar>(
    w: &WeightSequence<S>,
    space: SpaceSpec,
    traj: &PseudoTrajectory<S>,
) -> Result<ShadowResult<S>> {
    if !traj.contains_time(0) {
        return Err(Error::BadWindow(format!(
            "contain time 0, not [{}, {}]",
            traj.n0,
            traj.n1()
        )));
    }
    let (splitting, constants) = splitting_for(w)?;
    assemble(w, space, traj, 0, splitting, constants)
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport<R> {
    pub ok: bool,
    pub max_error: R,
    pub per_step: Vec<R>,
}

/// True iff `max_n ||x_n - T^n candidate|| < eps` over the window.
pub fn verify_shadow<S: Scalar, T: ShiftOperator<S>>(
    op: &T,
    space: SpaceSpec,
    traj: &PseudoTrajectory<S>,
    candidate: &SeqVector<S>,
    eps: &S::Real,
) -> Result<VerifyReport<S::Real>> {
    let orbit = PseudoTrajectory::orbit(op, candidate, traj.n0, traj.n1())?;
    let per_step: Vec<S::Real> = traj
        .points
        .iter()
        .zip(&orbit.points)
        .map(|(x, o)| norm(space, &(x - o)))
        .collect();
    let max_error = per_step.iter().cloned().fold(S::Real::zero(), Real::max_of);
    Ok(VerifyReport {
        ok: max_error < *eps,
        max_error,
        per_step,
    })
}
