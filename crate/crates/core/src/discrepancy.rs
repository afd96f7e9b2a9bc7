//! Equidistribution diagnostics for exceptional sets: exponential sums over
//! the set, star discrepancy of {n/N}, the weighted exponential-sum bound
//! that dominates it, and friable averaging checks.

use num_complex::Complex64;

use crate::arith::FriableSet;
use crate::dilation::DilationContext;
use crate::error::{Error, Result};
use crate::patterns::ExceptionalSet;
use crate::report::{inputs, VerificationReport};

/// Explicit constant for the discrepancy-dominating weighted sum. The
/// inequality is cited in the literature without a constant; 3 is frozen
/// here as calibration and has dominated every tested set.
pub const ET_CONSTANT: f64 = 3.0;

/// Floating-point slack for comparisons between unit-modulus sums and
/// integer cardinalities, per set element.
pub const FP_SLACK_PER_CARD: f64 = 1e-9;

#[inline]
fn e_frac(t: u64, modulus: u64) -> Complex64 {
    let angle = 2.0 * std::f64::consts::PI * (t % modulus) as f64 / modulus as f64;
    Complex64::new(angle.cos(), angle.sin())
}

/// sum over n in the set of e(k n / N); k is reduced mod N.
pub fn exp_sum_over_set(set: &ExceptionalSet, k: u64) -> Complex64 {
    let n_mod = set.modulus;
    set.bits
        .iter()
        .map(|n| e_frac(k % n_mod * n as u64 % n_mod, n_mod))
        .sum()
}

/// Anchored star discrepancy of {n/N : n in set}, by the sorted closed
/// form: the larger one-sided gap max(i/c - x_i, x_i - (i-1)/c) over all
/// sample positions.
pub fn star_discrepancy(set: &ExceptionalSet) -> Result<f64> {
    if set.card == 0 {
        return Err(Error::EmptySet("star discrepancy"));
    }
    let card = set.card as f64;
    let mut best = 0.0f64;
    for (i, n) in set.bits.iter().enumerate() {
        let x = n as f64 / set.modulus as f64;
        let up = (i + 1) as f64 / card - x;
        let down = x - i as f64 / card;
        best = best.max(up).max(down);
    }
    Ok(best)
}

/// Brute-force oracle: walk every critical anchored interval, counting
/// members one by one, and take both one-sided limits at each endpoint.
/// O(card^2), kept independent of the sorted-position formula.
pub fn star_discrepancy_oracle(set: &ExceptionalSet) -> Result<f64> {
    if set.card == 0 {
        return Err(Error::EmptySet("star discrepancy"));
    }
    let members = set.members();
    let card = set.card as f64;
    let mut best = 0.0f64;
    for &t in &members {
        let x = t as f64 / set.modulus as f64;
        let below = members.iter().filter(|&&m| m < t).count() as f64;
        let at_or_below = members.iter().filter(|&&m| m <= t).count() as f64;
        best = best.max((below / card - x).abs());
        best = best.max((at_or_below / card - x).abs());
    }
    Ok(best)
}

/// ET_CONSTANT * (card/K + sum_{k<=K} |S_k|/k) / card, the weighted
/// exponential-sum bound on the same normalized scale as the discrepancy.
pub fn erdos_turan_bound(set: &ExceptionalSet, cutoff: u64) -> Result<f64> {
    if set.card == 0 {
        return Err(Error::EmptySet("weighted exponential-sum bound"));
    }
    if cutoff == 0 {
        return Err(Error::InvalidArgument("cutoff K must be >= 1".into()));
    }
    let mut weighted = 0.0;
    for k in 1..=cutoff {
        weighted += exp_sum_over_set(set, k).norm() / k as f64;
    }
    Ok(ET_CONSTANT * (set.card as f64 / cutoff as f64 + weighted) / set.card as f64)
}

pub fn verify_et_domination(set: &ExceptionalSet, cutoff: u64) -> Result<VerificationReport> {
    let star = star_discrepancy(set)?;
    let bound = erdos_turan_bound(set, cutoff)?;
    Ok(VerificationReport::bound(
        "discrepancy/et-domination",
        inputs([
            ("N", set.modulus.to_string()),
            ("b", set.d.to_string()),
            ("card", set.card.to_string()),
            ("K", cutoff.to_string()),
        ]),
        star,
        bound,
        0.0,
    ))
}

/// Per-dilation invariance of exponential sums over E_b: for every a in
/// S(T, q), |sum_{n in E_b} e(kn/N) - sum_{n in E_b} e(kan/N)| is at most
/// 2|E_a(N)| (an integer count of unit-modulus terms). Reports the worst a
/// and the distance between the plain sum and the friable average.
pub fn friable_average_check(
    ctx: &DilationContext,
    b: u64,
    bound: u64,
    q: u64,
    k: u64,
) -> Result<VerificationReport> {
    let table = ctx.table();
    let friable = table.friable_set(bound, q)?;
    let n_mod = ctx.modulus();
    let e_b = ctx.exceptional_set(b)?;
    let base_sum = exp_sum_over_set(&e_b, k);

    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_a = 1u64;
    let mut worst_ratio = 0.0f64;
    let mut average = Complex64::new(0.0, 0.0);
    for &a in &friable.members {
        let dilated: Complex64 = e_b
            .bits
            .iter()
            .map(|n| e_frac(k % n_mod * (a % n_mod) % n_mod * n as u64 % n_mod, n_mod))
            .sum();
        average += dilated;
        let diff = (base_sum - dilated).norm();
        let cap = 2.0 * ctx.exceptional_set(a)?.card as f64;
        if diff - cap > worst_excess {
            worst_excess = diff - cap;
            worst_a = a;
        }
        if cap > 0.0 {
            worst_ratio = worst_ratio.max(diff / cap);
        }
    }
    average /= friable.psi() as f64;

    let slack = FP_SLACK_PER_CARD * e_b.card.max(1) as f64;
    Ok(VerificationReport::bound(
        "discrepancy/friable-average",
        inputs([
            ("N", n_mod.to_string()),
            ("b", b.to_string()),
            ("T", bound.to_string()),
            ("q", q.to_string()),
            ("k", k.to_string()),
            ("psi", friable.psi().to_string()),
            ("worst_a", worst_a.to_string()),
            ("worst_ratio", format!("{worst_ratio:.6}")),
            ("avg_distance", format!("{:.6}", (base_sum - average).norm())),
        ]),
        worst_excess,
        0.0,
        slack,
    ))
}

/// One sampled magnitude of the friable-averaged exponential sum.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FriableProfileRow {
    pub k: u64,
    pub n: u64,
    /// |(1/Psi) sum_{a in S(T,q)} e(k a n / N)|.
    pub magnitude: f64,
}

/// Empirical magnitudes of the averaged friable exponential sum at sampled
/// frequencies. Report only: the decay statements behind it are
/// asymptotic, not finite identities.
pub fn friable_exp_sum_profile(
    friable: &FriableSet,
    modulus: u64,
    samples: &[(u64, u64)],
) -> Vec<FriableProfileRow> {
    samples
        .iter()
        .map(|&(k, n)| {
            let sum: Complex64 = friable
                .members
                .iter()
                .map(|&a| e_frac(k % modulus * (a % modulus) % modulus * (n % modulus) % modulus, modulus))
                .sum();
            FriableProfileRow {
                k,
                n,
                magnitude: sum.norm() / friable.psi() as f64,
            }
        })
        .collect()
}
