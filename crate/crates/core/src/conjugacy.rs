//! Conjugacy between a class C shift `B` and a Lipschitz perturbation
//! `S = B + α`.
//!
//! Everything is evaluated pointwise. The linear operator
//! `F(φ) = φ ∘ B - B ∘ φ` is inverted coordinate-free by
//!
//! ```text
//! F⁻¹(η)(x) = Σ_{m>=0} B^m P_- η(B^{-m-1} x) - Σ_{d>=1} B^{-d} P_+ η(B^{d-1} x)
//! ```
//!
//! where `P_-` keeps indices `< j`, `P_+` keeps indices `>= j`, and `j` is the
//! normalization index (coordinate `j` of every correction is zero). Terms
//! decay like `β s^m`, so truncation errors are certified by the dichotomy
//! constants.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{powi, Real, Scalar};
use crate::spaces::{norm, SeqVector, ShiftOperator, SpaceSpec};
use crate::weights::{DichotomyConstants, WeightSequence};

pub type MapFn<S> = Arc<dyn Fn(&SeqVector<S>) -> SeqVector<S> + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PerturbationKind {
    Constant,
    CoordinateRankOne,
    /// Plain affine map; only bounded on balls.
    Affine,
    CutoffAffine,
    Custom,
}

impl PerturbationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PerturbationKind::Constant => "constant",
            PerturbationKind::CoordinateRankOne => "coordinate_rank_one",
            PerturbationKind::Affine => "affine",
            PerturbationKind::CutoffAffine => "cutoff_affine",
            PerturbationKind::Custom => "custom",
        }
    }
}

/// A Lipschitz map whose outputs are supported in `output_window`.
#[derive(Clone)]
pub struct PerturbationMap<S: Scalar> {
    eval: MapFn<S>,
    pub output_window: (i64, i64),
    /// Bound on `sup_x ||α(x)||`; `None` when the map is unbounded.
    pub sup_bound: Option<S::Real>,
    pub lip_bound: S::Real,
    pub kind: PerturbationKind,
}

impl<S: Scalar> fmt::Debug for PerturbationMap<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PerturbationMap")
            .field("kind", &self.kind)
            .field("output_window", &self.output_window)
            .field("sup_bound", &self.sup_bound)
            .field("lip_bound", &self.lip_bound)
            .finish()
    }
}

/// `t / (1 + |t|)`, bounded by one and 1-Lipschitz.
fn clamp<S: Scalar>(t: &S) -> S {
    t.clone() / S::from_real(S::Real::one() + t.modulus())
}

impl<S: Scalar> PerturbationMap<S> {
    pub fn custom(
        eval: MapFn<S>,
        output_window: (i64, i64),
        sup_bound: Option<S::Real>,
        lip_bound: S::Real,
    ) -> Self {
        PerturbationMap {
            eval,
            output_window,
            sup_bound,
            lip_bound,
            kind: PerturbationKind::Custom,
        }
    }

    pub fn zero() -> Self {
        PerturbationMap {
            eval: Arc::new(|_| SeqVector::zero()),
            output_window: (0, -1),
            sup_bound: Some(S::Real::zero()),
            lip_bound: S::Real::zero(),
            kind: PerturbationKind::Constant,
        }
    }

    pub fn constant(space: SpaceSpec, value: SeqVector<S>) -> Self {
        let sup = norm(space, &value);
        let window = (value.lo(), value.hi());
        PerturbationMap {
            eval: Arc::new(move |_| value.clone()),
            output_window: window,
            sup_bound: Some(sup),
            lip_bound: S::Real::zero(),
            kind: PerturbationKind::Constant,
        }
    }

    /// `x -> gain · clamp(x_index) · direction`.
    pub fn coordinate_rank_one(space: SpaceSpec, index: i64, direction: SeqVector<S>, gain: S) -> Self {
        let bound = gain.modulus() * norm(space, &direction);
        let window = (direction.lo(), direction.hi());
        PerturbationMap {
            eval: Arc::new(move |x| direction.scale(&(gain.clone() * clamp(&x.get(index))))),
            output_window: window,
            sup_bound: Some(bound.clone()),
            lip_bound: bound,
            kind: PerturbationKind::CoordinateRankOne,
        }
    }

    /// `x -> offset + A x` where `rows[r][c]` maps coordinate `in_lo + c` to
    /// coordinate `out_lo + r`. The Lipschitz bound is the Schur bound
    /// `max(max row sum, max column sum)`, valid in every ℓ_p and c_0.
    pub fn affine(in_lo: i64, out_lo: i64, rows: Vec<Vec<S>>, offset: Vec<S>) -> Result<Self> {
        let ncols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::InvalidParams("matrix rows have different lengths".into()));
        }
        if !offset.is_empty() && offset.len() != rows.len() {
            return Err(Error::InvalidParams("offset length must match the number of rows".into()));
        }
        let row_max = rows
            .iter()
            .map(|r| r.iter().fold(S::Real::zero(), |a, x| a + x.modulus()))
            .fold(S::Real::zero(), Real::max_of);
        let col_max = (0..ncols)
            .map(|c| rows.iter().fold(S::Real::zero(), |a, r| a + r[c].modulus()))
            .fold(S::Real::zero(), Real::max_of);
        let lip = Real::max_of(row_max, col_max);
        let nrows = rows.len() as i64;
        let offset = if offset.is_empty() {
            vec![S::zero(); rows.len()]
        } else {
            offset
        };
        Ok(PerturbationMap {
            eval: Arc::new(move |x| {
                let out = rows
                    .iter()
                    .zip(&offset)
                    .map(|(row, b)| {
                        row.iter()
                            .enumerate()
                            .fold(b.clone(), |acc, (c, a)| acc + a.clone() * x.get(in_lo + c as i64))
                    })
                    .collect();
                SeqVector::new(out_lo, out)
            }),
            output_window: (out_lo, out_lo + nrows - 1),
            sup_bound: None,
            lip_bound: lip,
            kind: PerturbationKind::Affine,
        })
    }

    /// The affine map cut off outside the ball of radius two.
    pub fn cutoff_affine(space: SpaceSpec, in_lo: i64, out_lo: i64, rows: Vec<Vec<S>>, offset: Vec<S>) -> Result<Self> {
        Ok(extend_lipschitz(&Self::affine(in_lo, out_lo, rows, offset)?, space))
    }

    pub fn eval(&self, x: &SeqVector<S>) -> SeqVector<S> {
        (self.eval)(x)
    }

    /// `max(sup_bound, lip_bound)`, or `None` if unbounded.
    pub fn size(&self) -> Option<S::Real> {
        self.sup_bound
            .clone()
            .map(|s| Real::max_of(s, self.lip_bound.clone()))
    }
}

/// `ρ = 1` on `(-∞, 1]`, `2 - t` on `[1, 2]`, `0` beyond.
fn cutoff<R: Real>(t: &R) -> R {
    let one = R::one();
    let two = one.clone() + one.clone();
    if *t <= one {
        one
    } else if *t <= two {
        two - t.clone()
    } else {
        R::zero()
    }
}

/// `φ(x) = α(0) + ρ(||x||)(α(x) - α(0))`: agrees with `α` on the unit
/// ball, is constant outside the ball of radius two, and has
/// `Lip(φ) <= 3 Lip(α)`.
pub fn extend_lipschitz<S: Scalar>(alpha: &PerturbationMap<S>, space: SpaceSpec) -> PerturbationMap<S> {
    let at_zero = alpha.eval(&SeqVector::zero());
    let two = S::Real::one() + S::Real::one();
    let local = norm(space, &at_zero) + two * alpha.lip_bound.clone();
    let sup_bound = Some(match &alpha.sup_bound {
        Some(s) => Real::min_of(s.clone(), local),
        None => local,
    });
    let three = S::Real::one() + S::Real::one() + S::Real::one();
    let inner = alpha.eval.clone();
    let kind = match alpha.kind {
        PerturbationKind::Affine => PerturbationKind::CutoffAffine,
        k => k,
    };
    PerturbationMap {
        eval: Arc::new(move |x| {
            let rho = cutoff(&norm(space, x));
            if rho.is_zero() {
                return at_zero.clone();
            }
            at_zero.add_scaled(&S::from_real(rho), &(&inner(x) - &at_zero))
        }),
        output_window: alpha.output_window,
        sup_bound,
        lip_bound: three * alpha.lip_bound.clone(),
        kind,
    }
}

/// Tunables shared by the conjugacy evaluators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConjugacyOptions {
    /// Index `j` whose coordinate is pinned to zero.
    pub normalization: i64,
    /// Cap on fixed-point sweeps.
    pub max_iterations: usize,
}

impl Default for ConjugacyOptions {
    fn default() -> Self {
        ConjugacyOptions {
            normalization: 0,
            max_iterations: 500,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FInverseValue<S: Scalar> {
    pub value: SeqVector<S>,
    /// Bound on the dropped terms of both series.
    pub tail_bound: S::Real,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConjugacyResult<S: Scalar> {
    pub point: SeqVector<S>,
    /// `h(x) = x + u(x)` (or `h'(x) = x + v(x)` for the inverse).
    pub image: SeqVector<S>,
    pub correction: SeqVector<S>,
    pub series_tail_bound: S::Real,
    pub fixed_point_iterations: usize,
    /// Conjugacy equation at the point, from the same solve.
    pub residual: S::Real,
    /// Successive differences of the fixed-point iterates.
    pub increments: Vec<S::Real>,
    pub constants: DichotomyConstants<S::Real>,
}

impl<S: Scalar> ConjugacyResult<S> {
    /// Largest ratio of consecutive nonzero increments.
    pub fn contraction_rate(&self) -> Option<f64> {
        self.increments
            .windows(2)
            .filter(|w| !w[0].is_zero())
            .map(|w| w[1].to_f64() / w[0].to_f64())
            .reduce(f64::max)
    }
}

fn constants_for<S: Scalar>(w: &WeightSequence<S>, j: i64) -> Result<DichotomyConstants<S::Real>> {
    w.normalized_constants(j, S::Real::default_tolerance())
}

/// `ε_max = (1 - s) / (2β) · 1/2`.
pub fn epsilon_budget<S: Scalar>(w: &WeightSequence<S>, _space: SpaceSpec) -> Result<S::Real> {
    let d = constants_for(w, 0)?;
    Ok(budget_from(&d))
}

fn budget_from<R: Real>(d: &DichotomyConstants<R>) -> R {
    let two = R::one() + R::one();
    (R::one() - d.s.clone()) / (two.clone() * d.beta.clone()) / two
}

fn check_budget<S: Scalar>(alpha: &PerturbationMap<S>, d: &DichotomyConstants<S::Real>) -> Result<()> {
    let budget = budget_from(d);
    let size = alpha
        .size()
        .ok_or_else(|| Error::Unsupported("perturbation has no finite sup bound".into()))?;
    if size > budget {
        return Err(Error::BudgetExceeded {
            bound: size.to_f64(),
            budget: budget.to_f64(),
        });
    }
    Ok(())
}

/// Smallest depth `D` with `2 β s^{D+1} / (1 - s) · sup <= target`, and that bound.
fn series_depth<R: Real>(d: &DichotomyConstants<R>, sup: &R, target: f64) -> (usize, R) {
    let two = R::one() + R::one();
    let bound = |depth: usize| {
        two.clone() * d.beta.clone() * powi(&d.s, depth as u64 + 1) * sup.clone() / (R::one() - d.s.clone())
    };
    if sup.is_zero() {
        return (1, R::zero());
    }
    let target_r = R::from_f64(target);
    let guess = ((target * (1.0 - d.s.to_f64()) / (2.0 * d.beta.to_f64() * sup.to_f64())).ln() / d.s.to_f64().ln())
        .ceil()
        .clamp(1.0, 100_000.0) as usize;
    let mut depth = guess.saturating_sub(2).max(1);
    while bound(depth) > target_r && depth < 100_000 {
        depth += 1;
    }
    (depth, bound(depth))
}

/// `Σ_{m=0}^{D} B^m a_m` by Horner's rule.
fn horner_forward<S: Scalar>(w: &WeightSequence<S>, terms: &[SeqVector<S>]) -> SeqVector<S> {
    let mut acc = SeqVector::zero();
    for a in terms.iter().rev() {
        acc = a + &w.apply(&acc);
    }
    acc
}

/// `Σ_{d=1}^{D} B^{-d} b_d` by Horner's rule; `terms[0]` is `b_1`.
fn horner_backward<S: Scalar>(w: &WeightSequence<S>, terms: &[SeqVector<S>]) -> SeqVector<S> {
    let mut acc = SeqVector::zero();
    for b in terms.iter().rev() {
        acc = w.apply_inverse(&(b + &acc)).expect("invertible");
    }
    acc
}

fn project_low<S: Scalar>(x: &SeqVector<S>, j: i64) -> SeqVector<S> {
    x.restrict(i64::MIN, j - 1)
}

fn project_high<S: Scalar>(x: &SeqVector<S>, j: i64) -> SeqVector<S> {
    x.restrict(j, i64::MAX)
}

/// Evaluates `F⁻¹(η)` at `x`, dropping terms once their certified total
/// is below `tol / 1024`.
pub fn f_inverse_eval<S: Scalar>(
    w: &WeightSequence<S>,
    space: SpaceSpec,
    eta: &PerturbationMap<S>,
    x: &SeqVector<S>,
    tol: &S::Real,
) -> Result<FInverseValue<S>> {
    f_inverse_eval_with(w, space, eta, x, tol, &ConjugacyOptions::default())
}

pub fn f_inverse_eval_with<S: Scalar>(
    w: &WeightSequence<S>,
    _space: SpaceSpec,
    eta: &PerturbationMap<S>,
    x: &SeqVector<S>,
    tol: &S::Real,
    options: &ConjugacyOptions,
) -> Result<FInverseValue<S>> {
    if *tol <= S::Real::zero() {
        return Err(Error::InvalidParams("tolerance must be positive".into()));
    }
    let j = options.normalization;
    let d = constants_for(w, j)?;
    let sup = eta
        .sup_bound
        .clone()
        .ok_or_else(|| Error::Unsupported("perturbation has no finite sup bound".into()))?;
    let (depth, tail_bound) = series_depth(&d, &sup, tol.to_f64() / 1024.0);

    let mut past = Vec::with_capacity(depth + 1);
    let mut y = x.clone();
    for _ in 0..=depth {
        y = w.apply_inverse(&y).expect("invertible");
        past.push(project_low(&eta.eval(&y), j));
    }
    let mut future = Vec::with_capacity(depth);
    let mut y = x.clone();
    for _ in 0..depth {
        future.push(project_high(&eta.eval(&y), j));
        y = w.apply(&y);
    }
    let value = &horner_forward(w, &past) - &horner_backward(w, &future);
    Ok(FInverseValue {
        value,
        tail_bound,
        depth,
    })
}

/// `||φ(Bx) - Bφ(x) - η(x)||` with `φ = F⁻¹(η)`, together with the bound
/// `2 · tail` it should respect.
pub fn f_identity_defect<S: Scalar>(
    w: &WeightSequence<S>,
    space: SpaceSpec,
    eta: &PerturbationMap<S>,
    x: &SeqVector<S>,
    tol: &S::Real,
) -> Result<(S::Real, S::Real)> {
    let at_x = f_inverse_eval(w, space, eta, x, tol)?;
    let at_bx = f_inverse_eval(w, space, eta, &w.apply(x), tol)?;
    let lhs = &(&at_bx.value - &w.apply(&at_x.value)) - &eta.eval(x);
    let two = S::Real::one() + S::Real::one();
    Ok((norm(space, &lhs), two * Real::max_of(at_x.tail_bound, at_bx.tail_bound)))
}

/// `F⁻¹` applied to the constant map with value `c`, evaluated anywhere.
fn f_inverse_constant<S: Scalar>(w: &WeightSequence<S>, c: &SeqVector<S>, depth: usize, j: i64) -> SeqVector<S> {
    let low = project_low(c, j);
    let high = project_high(c, j);
    let past = vec![low; depth + 1];
    let future = vec![high; depth];
    &horner_forward(w, &past) - &horner_backward(w, &future)
}

/// Solves `u = F⁻¹(α ∘ (I + u))` along the orbit of `x` and returns
/// `h(x) = x + u(x)`.
///
/// The unknowns are the orbit values `U_n = u(B^n x)` for `|n| <= W`. Given
/// `η_n = α(B^n x + U_n)`, the two series satisfy
/// `M_n = B M_{n-1} + P_- η_{n-1}` and `N_n = B^{-1}(N_{n+1} - P_+ η_n)`, so
/// one sweep in each direction applies the fixed-point map to every
/// orbit value at once. Beyond the window the orbit is close to zero and
/// the values of `u(0)` stand in for the boundary terms.
pub fn conjugate_forward<S: Scalar>(
    w: &WeightSequence<S>,
    space: SpaceSpec,
    alpha: &PerturbationMap<S>,
    x: &SeqVector<S>,
    tol: &S::Real,
) -> Result<ConjugacyResult<S>> {
    conjugate_forward_with(w, space, alpha, x, tol, &ConjugacyOptions::default())
}

pub fn conjugate_forward_with<S: Scalar>(
    w: &WeightSequence<S>,
    space: SpaceSpec,
    alpha: &PerturbationMap<S>,
    x: &SeqVector<S>,
    tol: &S::Real,
    options: &ConjugacyOptions,
) -> Result<ConjugacyResult<S>> {
    if *tol <= S::Real::zero() {
        return Err(Error::InvalidParams("tolerance must be positive".into()));
    }
    let j = options.normalization;
    let d = constants_for(w, j)?;
    check_budget(alpha, &d)?;
    let sup = alpha.sup_bound.clone().expect("checked by budget");
    let (depth, tail_bound) = series_depth(&d, &sup, tol.to_f64() / 1024.0);

    // Fixed point on the zero orbit: u(0) = F⁻¹(const α(u(0))).
    let mut at_zero = SeqVector::zero();
    let mut settled = false;
    for _ in 0..options.max_iterations {
        let next = f_inverse_constant(w, &alpha.eval(&at_zero), depth, j);
        let change = norm(space, &(&next - &at_zero));
        at_zero = next;
        if change < tol.clone() * S::Real::from_f64(1e-3) {
            settled = true;
            break;
        }
    }
    if !settled {
        return Err(Error::NonConvergence("fixed point on the zero orbit".into()));
    }
    let boundary_low = project_low(&at_zero, j);
    let boundary_high = project_high(&at_zero, j);

    let extent = x
        .support()
        .map_or(0, |(lo, hi)| lo.abs().max(hi.abs()) + (hi - lo))
        + (w.core_end() - w.core_start()).abs()
        + w.core_start().abs()
        + (w.left_tail().len() + w.right_tail().len()) as i64;
    let half = depth as i64 + extent + 8;
    let len = (2 * half + 1) as usize;
    let mut orbit = vec![SeqVector::zero(); len];
    orbit[half as usize] = x.clone();
    for k in half as usize + 1..len {
        orbit[k] = w.apply(&orbit[k - 1]);
    }
    for k in (0..half as usize).rev() {
        orbit[k] = w.apply_inverse(&orbit[k + 1]).expect("invertible");
    }

    let mut values = vec![SeqVector::zero(); len];
    let mut increments = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    let mut etas = Vec::new();
    while iterations < options.max_iterations {
        iterations += 1;
        etas = orbit
            .iter()
            .zip(&values)
            .map(|(p, u)| alpha.eval(&(p + u)))
            .collect::<Vec<_>>();
        let mut low = vec![SeqVector::zero(); len];
        low[0] = boundary_low.clone();
        for k in 1..len {
            low[k] = &w.apply(&low[k - 1]) + &project_low(&etas[k - 1], j);
        }
        let mut high = vec![SeqVector::zero(); len];
        high[len - 1] = boundary_high.clone();
        for k in (0..len - 1).rev() {
            high[k] = w
                .apply_inverse(&(&high[k + 1] - &project_high(&etas[k], j)))
                .expect("invertible");
        }
        let next: Vec<SeqVector<S>> = low.iter().zip(&high).map(|(a, b)| a + b).collect();
        let change = next
            .iter()
            .zip(&values)
            .map(|(a, b)| norm(space, &(a - b)))
            .fold(S::Real::zero(), Real::max_of);
        values = next;
        increments.push(change.clone());
        if change < *tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence(format!(
            "fixed point did not settle in {iterations} sweeps"
        )));
    }
    let _ = etas;
    let center = half as usize;
    let correction = values[center].clone();
    let image = x + &correction;
    let next_image = &orbit[center + 1] + &values[center + 1];
    let pushed = &w.apply(&image) + &alpha.eval(&image);
    let residual = norm(space, &(&next_image - &pushed));

    Ok(ConjugacyResult {
        point: x.clone(),
        image,
        correction,
        series_tail_bound: tail_bound,
        fixed_point_iterations: iterations,
        residual,
        increments,
        constants: d,
    })
}

/// `||h(Bx) - (B + α)(h(x))||` with both values from independent solves.
pub fn conjugacy_residual<S: Scalar>(
    w: &WeightSequence<S>,
    space: SpaceSpec,
    alpha: &PerturbationMap<S>,
    x: &SeqVector<S>,
    tol: &S::Real,
) -> Result<S::Real> {
    let hx = conjugate_forward(w, space, alpha, x, tol)?;
    let hbx = conjugate_forward(w, space, alpha, &w.apply(x), tol)?;
    let pushed = &w.apply(&hx.image) + &alpha.eval(&hx.image);
    Ok(norm(space, &(&hbx.image - &pushed)))
}

/// Solves `B z + α(z) = y` by `z <- B^{-1}(y - α(z))`.
fn perturbed_inverse<S: Scalar>(
    w: &WeightSequence<S>,
    space: SpaceSpec,
    alpha: &PerturbationMap<S>,
    y: &SeqVector<S>,
    tol: &S::Real,
    max_iterations: usize,
) -> Result<(SeqVector<S>, usize)> {
    let mut z = w.apply_inverse(y).expect("invertible");
    for k in 1..=max_iterations {
        let next = w.apply_inverse(&(y - &alpha.eval(&z))).expect("invertible");
        let change = norm(space, &(&next - &z));
        z = next;
        if change < *tol {
            return Ok((z, k));
        }
    }
    Err(Error::NonConvergence("inverse of the perturbed shift".into()))
}

/// `h'(x) = x + v(x)` with
/// `v(x) = Σ_{d>=1} B^{-d} P_+ α(S^{d-1}x) - Σ_{m>=0} B^m P_- α(S^{-m-1}x)`.
pub fn conjugate_inverse<S: Scalar>(
    w: &WeightSequence<S>,
    space: SpaceSpec,
    alpha: &PerturbationMap<S>,
    x: &SeqVector<S>,
    tol: &S::Real,
) -> Result<ConjugacyResult<S>> {
    conjugate_inverse_with(w, space, alpha, x, tol, &ConjugacyOptions::default())
}

pub fn conjugate_inverse_with<S: Scalar>(
    w: &WeightSequence<S>,
    space: SpaceSpec,
    alpha: &PerturbationMap<S>,
    x: &SeqVector<S>,
    tol: &S::Real,
    options: &ConjugacyOptions,
) -> Result<ConjugacyResult<S>> {
    if *tol <= S::Real::zero() {
        return Err(Error::InvalidParams("tolerance must be positive".into()));
    }
    let j = options.normalization;
    let d = constants_for(w, j)?;
    check_budget(alpha, &d)?;
    let sup = alpha.sup_bound.clone().expect("checked by budget");
    let (depth, tail_bound) = series_depth(&d, &sup, tol.to_f64() / 1024.0);
    let step = |y: &SeqVector<S>| &w.apply(y) + &alpha.eval(y);
    let inner_tol = tol.clone() * S::Real::from_f64(1e-3);

    // S-orbit from S^{-depth-2} x to S^{depth+1} x.
    let mut forward = vec![x.clone()];
    for _ in 0..=depth {
        let next = step(forward.last().expect("nonempty"));
        forward.push(next);
    }
    let mut backward = Vec::with_capacity(depth + 2);
    let mut y = x.clone();
    let mut solves = 0;
    for _ in 0..depth + 2 {
        let (z, k) = perturbed_inverse(w, space, alpha, &y, &inner_tol, options.max_iterations)?;
        solves = solves.max(k);
        backward.push(z.clone());
        y = z;
    }
    // orbit(k) = S^k x for k in [-(depth+2), depth+1].
    let orbit = |k: i64| -> &SeqVector<S> {
        if k >= 0 {
            &forward[k as usize]
        } else {
            &backward[(-k - 1) as usize]
        }
    };
    let correction_at = |base: i64| {
        let future: Vec<_> = (0..depth as i64)
            .map(|d| project_high(&alpha.eval(orbit(base + d)), j))
            .collect();
        let past: Vec<_> = (0..=depth as i64)
            .map(|m| project_low(&alpha.eval(orbit(base - m - 1)), j))
            .collect();
        &horner_backward(w, &future) - &horner_forward(w, &past)
    };
    let correction = correction_at(0);
    let image = x + &correction;
    let next_image = &forward[1] + &correction_at(1);
    let residual = norm(space, &(&next_image - &w.apply(&image)));

    Ok(ConjugacyResult {
        point: x.clone(),
        image,
        correction,
        series_tail_bound: tail_bound,
        fixed_point_iterations: solves,
        residual,
        increments: Vec::new(),
        constants: d,
    })
}
