//! Best shadowing point over a finite support window.
//!
//! `(T^n v)_i` depends on a single coordinate of `v`, so the sup-norm
//! problem `min_v max_n ||x_n - T^n v||_∞` splits into one weighted
//! Chebyshev problem per coordinate of `v`:
//! `min_c max_n |a_n - p_n c|`, solved exactly below.

use std::collections::HashSet;


use super::PseudoTrajectory;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spaces::{norm, SeqVector, ShiftOperator, SpaceSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult<R: Real> {
    pub best_point: SeqVector<R>,
    /// Exact optimum in c_0; in ℓ_p the error of `best_point`, an upper bound.
    pub best_error: R,
    /// Sup-norm optimum; a lower bound on the optimum in every space.
    pub lower_bound: R,
    /// True when `best_error` is the exact optimum.
    pub exact: bool,
    /// Error from coordinates that no candidate in the window can reach.
    pub unreachable: R,
}

/// `min_c max_n |p_n| |r_n - c|` for real data, with `r_n = a_n / p_n`.
///
/// With `u_n = 1 / |p_n|` the constraint `|r_n - c| <= e u_n` is an
/// interval per `n`; the intervals meet iff `e >= (r_m - r_n) / (u_m + u_n)`
/// for every pair, and the smallest such `e` is attained at the left end
/// of the intersection.
pub(crate) fn weighted_chebyshev<R: Real>(entries: &[(R, R)]) -> (R, R) {
    let pts: Vec<(R, R)> = entries
        .iter()
        .filter(|(_, p)| !p.is_zero())
        .map(|(a, p)| (a.clone() / p.clone(), R::one() / p.abs()))
        .collect();
    if pts.iter().all(|(r, _)| r.is_zero()) {
        return (R::zero(), R::zero());
    }
    let mut e = R::zero();
    for (rm, um) in &pts {
        for (rn, un) in &pts {
            if rm > rn {
                let cand = (rm.clone() - rn.clone()) / (um.clone() + un.clone());
                if cand > e {
                    e = cand;
                }
            }
        }
    }
    let c = pts
        .iter()
        .map(|(r, u)| r.clone() - e.clone() * u.clone())
        .reduce(Real::max_of)
        .expect("nonempty");
    (c, e)
}

/// Minimizes `max_n ||x_n - T^n v||` over `v` supported in `support`.
pub fn oracle_best_shadow<R: Real, T: ShiftOperator<R>>(
    op: &T,
    space: SpaceSpec,
    traj: &PseudoTrajectory<R>,
    support: (i64, i64),
) -> Result<OracleResult<R>> {
    let (lo, hi) = support;
    if lo > hi {
        return Err(Error::InvalidRange(format!("support window [{lo}, {hi}]")));
    }
    let (n0, n1) = (traj.n0, traj.n1());
    if n0 < 0 && op.domain_start().is_some() {
        return Err(Error::Unsupported("negative times for a unilateral shift".into()));
    }
    let lo = op.domain_start().map_or(lo, |d| lo.max(d));

    let mut covered: HashSet<(i64, i64)> = HashSet::new();
    let mut coeffs = Vec::new();
    let mut worst_line = R::zero();
    for j in lo..=hi {
        let mut entries = Vec::new();
        for n in n0..=n1 {
            if let Some((i, p)) = op.basis_image(j, n) {
                covered.insert((n, i));
                entries.push((traj.point(n).get(i), p));
            }
        }
        let (c, e) = weighted_chebyshev(&entries);
        worst_line = Real::max_of(worst_line, e);
        coeffs.push(c);
    }
    let mut unreachable = R::zero();
    for n in n0..=n1 {
        for (i, a) in traj.point(n).iter() {
            if !covered.contains(&(n, i)) {
                unreachable = Real::max_of(unreachable, a.abs());
            }
        }
    }
    let best_point = if lo <= hi {
        SeqVector::new(lo, coeffs)
    } else {
        SeqVector::zero()
    };
    let sup_optimum = Real::max_of(unreachable.clone(), worst_line);

    let (best_error, exact) = match space {
        SpaceSpec::C0 => (sup_optimum.clone(), true),
        SpaceSpec::Lp(_) => {
            let mut orbit = op
                .power(&best_point, n0)
                .ok_or_else(|| Error::Unsupported("negative powers of a non-invertible shift".into()))?;
            let mut worst = R::zero();
            for n in n0..=n1 {
                worst = Real::max_of(worst, norm(space, &(traj.point(n) - &orbit)));
                orbit = op.apply(&orbit);
            }
            (worst, false)
        }
    };

    Ok(OracleResult {
        best_point,
        best_error,
        lower_bound: sup_optimum,
        exact,
        unreachable,
    })
}
