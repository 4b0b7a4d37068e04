//! The non-q analogue of the Bailey transform and its multiple-zeta-value
//! consequences.
//!
//! With the trivial kernel `u_n = v_n = 1`, the pair
//!
//! ```text
//! gamma_n = (1/m) n! m!/(n+m)!,   delta_n = (1/n) n! m!/(n+m)!
//! ```
//!
//! satisfies `gamma_n = sum_{k>n} delta_k` by telescoping, exactly. Feeding
//! the unit sequence through the resulting transform `p` times yields the
//! harmonic nested-sum identity
//!
//! ```text
//! 1/m^p = sum_{s_p > ... > s_1 > 0} (1/(s_p ... s_1)) s_p! m!/(s_p+m)!,
//! ```
//!
//! and summing it over `m` gives the sum-formula instance
//! `zeta(p+1) = zeta(2, 1, ..., 1)`. Everything exact stays exact rational;
//! only the comparison of the two infinite series uses floating point, with
//! the zeta value supplied by a documented Euler–Maclaurin evaluator.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// `n! m!/(n+m)!` as an exact rational (the reciprocal binomial
/// `1/binom(n+m, m)`).
fn factorial_ratio(n: u64, m: u64) -> BigRational {
    let mut v = BigRational::one();
    for i in 0..m {
        v *= BigRational::new(BigInt::from(i + 1), BigInt::from(n + i + 1));
    }
    v
}

/// The telescoping conjugate pair: returns `gamma_n = (1/m) n! m!/(n+m)!`
/// and the partial sum `sum_{k=n+1}^{n+tail} delta_k` with
/// `delta_k = (1/k) k! m!/(k+m)!`. The partial sum closes exactly:
/// `gamma_n - (1/m)(n+tail)! m!/(n+tail+m)!`.
pub fn telescoping_pair_check(m: u64, n: u64, tail: u64) -> (BigRational, BigRational) {
    assert!(m >= 1 && tail >= 1);
    let gamma = factorial_ratio(n, m) / BigRational::from(BigInt::from(m));
    let mut partial = BigRational::zero();
    for k in n + 1..=n + tail {
        partial += factorial_ratio(k, m) / BigRational::from(BigInt::from(k));
    }
    (gamma, partial)
}

/// Closed form of the tail left after [`telescoping_pair_check`]:
/// `(1/m)(n+tail)! m!/(n+tail+m)!`. `gamma - partial - tail_term == 0`
/// exactly.
pub fn telescoping_tail_term(m: u64, n: u64, tail: u64) -> BigRational {
    factorial_ratio(n + tail, m) / BigRational::from(BigInt::from(m))
}

/// Outcome of the truncated harmonic nested-sum identity: the exact defect
/// `|1/m^p - partial sum|` and the crude explicit tail bound
/// `H(cutoff)^{p-1} * (cutoff! m!/(cutoff+m)!) * cutoff` it must not
/// exceed. (The bound is generous: each of the `p-1` inner strictly
/// decreasing indices contributes at most a harmonic sum `H(cutoff)`, the
/// outer terms decay like `m!/s^m`, and the final factor `cutoff`
/// dominates the remaining outer sum for every `m >= 1`.)
#[derive(Debug, Clone)]
pub struct HarmonicDefect {
    pub defect: BigRational,
    pub tail_bound: BigRational,
}

/// Truncate `sum_{s_p > ... > s_1 > 0, s_p <= cutoff} (1/(s_p...s_1))
/// s_p! m!/(s_p+m)!` and report the exact defect against `1/m^p`.
pub fn harmonic_identity_check(p: u32, m: u64, cutoff: u64) -> HarmonicDefect {
    assert!(p >= 1 && m >= 1 && cutoff >= 1);
    // depth-(p-1) strictly-decreasing inner sums by prefix accumulation:
    // T_1(s) = 1/s, T_{i+1}(s) = (1/s) sum_{s' < s} T_i(s')
    let mut level: Vec<BigRational> = (0..=cutoff)
        .map(|s| {
            if s == 0 {
                BigRational::zero()
            } else {
                BigRational::new(BigInt::one(), BigInt::from(s))
            }
        })
        .collect();
    for _ in 1..p {
        let mut next = vec![BigRational::zero(); cutoff as usize + 1];
        let mut prefix = BigRational::zero();
        for s in 1..=cutoff {
            prefix += &level[s as usize - 1];
            next[s as usize] = &prefix * BigRational::new(BigInt::one(), BigInt::from(s));
        }
        level = next;
    }
    // level[s] now carries 1/s * sum over chains below s of depth p-1;
    // multiply by the outer weight s! m!/(s+m)! (the chain weight uses
    // s_p itself once, already included as the leading 1/s ... so the
    // outer term is level[s] * s * (1/s) ... keep as is: level[s] equals
    // sum over s > s_{p-1} > ... of 1/(s s_{p-1} ... s_1)
    let mut total = BigRational::zero();
    for s in 1..=cutoff {
        total += &level[s as usize] * factorial_ratio(s, m);
    }
    let target = BigRational::new(BigInt::one(), BigInt::from(m).pow(p));
    let defect = (target - total).abs();
    let mut harmonic = BigRational::zero();
    for s in 1..=cutoff {
        harmonic += BigRational::new(BigInt::one(), BigInt::from(s));
    }
    let mut tail_bound = factorial_ratio(cutoff, m) * BigRational::from(BigInt::from(cutoff));
    for _ in 1..p {
        tail_bound *= &harmonic;
    }
    HarmonicDefect { defect, tail_bound }
}

/// `zeta(s)` for integer `s >= 2` by Euler–Maclaurin with `K = 40` initial
/// terms and Bernoulli corrections through `B_8`; the first dropped
/// correction is below `1e-19` for every `s >= 2`, far under the f64
/// comparisons made with it.
pub fn zeta_euler_maclaurin(s: u32) -> f64 {
    assert!(s >= 2);
    let s = s as f64;
    let k = 40.0f64;
    let mut sum = 0.0;
    for n in 1..40u32 {
        sum += (n as f64).powf(-s);
    }
    sum += k.powf(1.0 - s) / (s - 1.0) + 0.5 * k.powf(-s);
    // Bernoulli corrections: B_2/2! s K^{-s-1}, B_4/4! s(s+1)(s+2) K^{-s-3}, ...
    let b = [
        (1.0 / 6.0, 2.0),
        (-1.0 / 30.0, 4.0),
        (1.0 / 42.0, 6.0),
        (-1.0 / 30.0, 8.0),
    ];
    for (b2j, two_j) in b {
        let mut rising = 1.0;
        for i in 0..(two_j as i32 - 1) {
            rising *= s + i as f64;
        }
        let mut fact = 1.0;
        for i in 1..=(two_j as i32) {
            fact *= i as f64;
        }
        sum += b2j / fact * rising * k.powf(-s - two_j + 1.0);
    }
    sum
}

/// `|zeta(p+1) - sum_{s_p > ... > s_1 > 0, s_p <= cutoff}
/// 1/(s_p^2 s_{p-1} ... s_1)|` in floating point. The truncated
/// `zeta(2, 1, ..., 1)` side is a plain nested prefix sum.
#[allow(clippy::needless_range_loop)]
pub fn sum_formula_check(p: u32, cutoff: u64) -> f64 {
    assert!(p >= 1 && cutoff >= 1);
    let mut level: Vec<f64> = (0..=cutoff)
        .map(|s| if s == 0 { 0.0 } else { 1.0 / s as f64 })
        .collect();
    for _ in 1..p {
        let mut next = vec![0.0f64; cutoff as usize + 1];
        let mut prefix = 0.0;
        for s in 1..=cutoff as usize {
            prefix += level[s - 1];
            next[s] = prefix / s as f64;
        }
        level = next;
    }
    // outer index weighted 1/s_p^2: level[s] already carries one 1/s
    let mut total = 0.0;
    for s in 1..=cutoff as usize {
        total += level[s] / s as f64;
    }
    (zeta_euler_maclaurin(p + 1) - total).abs()
}
