//! Bailey pairs and the two Bailey chains behind the five Habiro-type
//! series.
//!
//! A pair of sequences `(alpha, beta)` is a *Bailey pair relative to `a`*
//! when
//!
//! ```text
//! beta_n = sum_{k=0}^n alpha_k / ((q)_{n-k} (aq)_{n+k}).
//! ```
//!
//! Only the two bases `a = 1` and `a = q` occur here, named [`Base::One`]
//! and [`Base::Q`]. Iterating the `rho -> infinity` special case of
//! Bailey's lemma ([`bailey_step`]) on the unit pair produces, after `p`
//! steps, the closed forms implemented by [`chain_alpha`] / [`chain_beta`]:
//! for `a = 1`,
//!
//! ```text
//! alpha_n = (-1)^n q^{(p+1/2)n^2 - n/2} (1 + q^n) - delta_{n,0},
//! beta_n  = (1/(q)_n) sum_{n = s_p >= ... >= s_1 >= 0}
//!               prod_i q^{s_i^2} [s_{i+1} choose s_i]_q,
//! ```
//!
//! and for `a = q` the variant with exponents `s_i(s_i + 1)` and
//! `alpha_n = (-1)^n q^{(p+1/2)n^2 + (p-1/2)n} (1-q^{2n+1})/(1-q)`.
//! [`verify_chain_identity`] checks the equivalent signed-sum forms of
//! `beta_n`, [`verify_auxiliary`] the three re-indexing lemmas used to
//! bring all five Habiro-type series into Bailey form, [`fine_sum_check`]
//! the Fine-type summation that produces the Hecke-type expansions, and
//! [`verify_rogers_ramanujan`] the two Rogers–Ramanujan identities in
//! multiplicative form.

use crate::qseries::{
    inv_pochhammer, pochhammer, pochhammer_step, Count, ExactRational, Order, QBinomialTable,
    QExpansion,
};
use num_traits::One;

/// The base `a` of a Bailey pair: `a = 1` or `a = q`. The first Bailey
/// chain (squares `s_i^2`) lives over `One`; the second (`s_i(s_i+1)`)
/// over `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Base {
    One,
    Q,
}

impl Base {
    /// Exponent attached to an inner chain index: `s^2` over base 1,
    /// `s(s+1)` over base q.
    pub fn inner_exponent(self, s: i64) -> i64 {
        match self {
            Base::One => s * s,
            Base::Q => s * (s + 1),
        }
    }

    /// Exponent of the multiplier `a^n q^{n^2}` in one Bailey-lemma step.
    fn step_exponent(self, n: i64) -> i64 {
        match self {
            Base::One => n * n,
            Base::Q => n * n + n,
        }
    }
}

fn sign(k: i64) -> ExactRational {
    if k.rem_euclid(2) == 0 {
        ExactRational::one()
    } else {
        -ExactRational::one()
    }
}

fn monomial(e: i64, order: Order) -> QExpansion {
    QExpansion::monomial(ExactRational::one(), e, 1, order)
}

fn signed_monomial(k: i64, e: i64, order: Order) -> QExpansion {
    QExpansion::monomial(sign(k), e, 1, order)
}

/// A Bailey pair materialized up to index `max_n`, stored as truncated
/// series.
#[derive(Debug, Clone)]
pub struct BaileyPairFn {
    pub base: Base,
    pub alpha: Vec<QExpansion>,
    pub beta: Vec<QExpansion>,
}

impl BaileyPairFn {
    pub fn max_n(&self) -> usize {
        self.alpha.len() - 1
    }

    /// The defining relation `beta_n = sum_k alpha_k / ((q)_{n-k} (aq)_{n+k})`,
    /// checked coefficient-wise below the working order for all `n <= max_n`.
    pub fn verify(&self, order: Order) -> bool {
        let aq_offset = match self.base {
            Base::One => 1, // (q; q)_{n+k}
            Base::Q => 2,   // (q^2; q)_{n+k}
        };
        for n in 0..=self.max_n() {
            let mut rhs = QExpansion::zero(1, order);
            for k in 0..=n {
                let t = self.alpha[k]
                    .mul(&inv_pochhammer(1, (n - k) as u32, order))
                    .mul(&inv_pochhammer(aq_offset, (n + k) as u32, order));
                rhs = rhs.add(&t);
            }
            if !rhs.agree_below(&self.beta[n].truncated(order)) {
                return false;
            }
        }
        true
    }
}

/// The unit Bailey pair `(alpha_n, beta_n)` with `beta_n = delta_{n,0}`.
///
/// The closed form `alpha_n = (1-aq^{2n})(a)_n (-1)^n q^{n(n-1)/2} /
/// ((1-a)(q)_n)` is resolved separately per base before substituting, since
/// `(a)_n/(1-a)` has a removable singularity at `a = 1`:
///
/// * base 1: `alpha_0 = 1`, `alpha_n = (-1)^n q^{n(n-1)/2} (1 + q^n)`;
/// * base q: `alpha_n = (-1)^n q^{n(n-1)/2} (1 - q^{2n+1})/(1 - q)`, the
///   polynomial `1 + q + ... + q^{2n}` times the sign and power.
pub fn unit_bailey_pair(base: Base, n: u32, order: Order) -> (QExpansion, QExpansion) {
    let beta = if n == 0 {
        QExpansion::one(order)
    } else {
        QExpansion::zero(1, order)
    };
    (unit_alpha(base, n as i64, order), beta)
}

fn unit_alpha(base: Base, n: i64, order: Order) -> QExpansion {
    match base {
        Base::One => {
            if n == 0 {
                QExpansion::one(order)
            } else {
                let e = n * (n - 1) / 2;
                signed_monomial(n, e, order).add(&signed_monomial(n, e + n, order))
            }
        }
        Base::Q => {
            // (1 - q^{2n+1})/(1 - q) = sum_{j=0}^{2n} q^j
            let e = n * (n - 1) / 2;
            let mut acc = QExpansion::zero(1, order);
            for j in 0..=2 * n {
                acc = acc.add(&signed_monomial(n, e + j, order));
            }
            acc
        }
    }
}

/// The unit pair materialized for indices `0..=max_n`.
pub fn unit_pair(base: Base, max_n: usize, order: Order) -> BaileyPairFn {
    let mut alpha = Vec::with_capacity(max_n + 1);
    let mut beta = Vec::with_capacity(max_n + 1);
    for n in 0..=max_n as u32 {
        let (a, b) = unit_bailey_pair(base, n, order);
        alpha.push(a);
        beta.push(b);
    }
    BaileyPairFn { base, alpha, beta }
}

/// One application of the `rho -> infinity` Bailey lemma:
/// `alpha'_n = a^n q^{n^2} alpha_n`,
/// `beta'_n = sum_{j<=n} a^j q^{j^2} beta_j / (q)_{n-j}`.
pub fn bailey_step(pair: &BaileyPairFn, order: Order) -> BaileyPairFn {
    let base = pair.base;
    let mut alpha = Vec::with_capacity(pair.alpha.len());
    let mut beta = Vec::with_capacity(pair.beta.len());
    for (n, a) in pair.alpha.iter().enumerate() {
        alpha.push(a.mul(&monomial(base.step_exponent(n as i64), order)));
    }
    for n in 0..pair.beta.len() {
        let mut acc = QExpansion::zero(1, order);
        for (j, b) in pair.beta.iter().enumerate().take(n + 1) {
            let t = b
                .mul(&monomial(base.step_exponent(j as i64), order))
                .mul(&inv_pochhammer(1, (n - j) as u32, order));
            acc = acc.add(&t);
        }
        beta.push(acc);
    }
    BaileyPairFn { base, alpha, beta }
}

/// Closed-form `alpha_n` of the chain pair reached after `p` steps from the
/// unit pair over the given base.
pub fn chain_alpha(base: Base, p: u32, n: u32, order: Order) -> QExpansion {
    assert!(p >= 1);
    unit_alpha(base, n as i64, order).mul(&monomial(p as i64 * base.step_exponent(n as i64), order))
}

/// Nested-sum `beta_n` of the chain pair after `p` steps:
/// `(1/(q)_n) * sum_{n = s_p >= ... >= s_1 >= 0} prod_i q^{f(s_i)}
/// [s_{i+1} choose s_i]_q` with `f` the base's inner exponent. The
/// `1/(q)_n` prefactor is expanded from geometric series, never by series
/// division.
pub fn chain_beta(base: Base, p: u32, n: u32, order: Order) -> QExpansion {
    assert!(p >= 1);
    let table = QBinomialTable::new(n, order);
    let stack = chain_level_stack(base, p, n, &table);
    stack[n as usize].mul(&inv_pochhammer(1, n, order))
}

/// The nested sums `S_p(t) = sum_{t = s_{p} >= s_{p-1} >= ... >= s_1 >= 0}
/// prod_{i=1}^{p-1} q^{f(s_i)} [s_{i+1} choose s_i]_q` for `t <= t_max`,
/// computed level by level: `S_1 = 1` and
/// `S_{i+1}(t) = sum_{s <= t} q^{f(s)} [t choose s]_q S_i(s)`.
///
/// These are exactly `(q)_t beta_t^{(p)}` for the chain over `base`, and
/// the same stacks drive the Habiro-type series.
pub(crate) fn chain_level_stack(
    base: Base,
    p: u32,
    t_max: u32,
    table: &QBinomialTable,
) -> Vec<QExpansion> {
    let order = table.order();
    let mut level: Vec<QExpansion> = (0..=t_max).map(|_| QExpansion::one(order)).collect();
    for _ in 1..p {
        let mut next = Vec::with_capacity(level.len());
        for t in 0..=t_max {
            let mut acc = QExpansion::zero(1, order);
            for s in 0..=t {
                let e = base.inner_exponent(s as i64);
                // every term of q^{f(s)} [t s] S_i(s) is >= q^{f(s)}
                if e >= 0 && !crate::qseries::ord(e).lt(&order) {
                    continue;
                }
                let t1 = level[s as usize]
                    .mul(table.get(t, s))
                    .mul(&monomial(e, order));
                acc = acc.add(&t1);
            }
            next.push(acc);
        }
        level = next;
    }
    level
}

/// Signed-sum form of the chain `beta_n`:
///
/// ```text
/// beta_n^{(1,p)} = sum_{k=-n}^{n}   (-1)^k q^{(p+1/2)k^2 - k/2} / ((q)_{n-k} (q)_{n+k}),
/// beta_n^{(2,p)} = sum_{k=-n-1}^{n} (-1)^k q^{(p+1/2)k^2 + (p-1/2)k} / ((q)_{n-k} (q)_{n+k+1}).
/// ```
fn chain_beta_signed_sum(base: Base, p: u32, n: u32, order: Order) -> QExpansion {
    let p = p as i64;
    let n = n as i64;
    let mut acc = QExpansion::zero(1, order);
    let (k_lo, k_hi) = match base {
        Base::One => (-n, n),
        Base::Q => (-n - 1, n),
    };
    for k in k_lo..=k_hi {
        let e = match base {
            Base::One => p * k * k + (k * k - k) / 2,
            Base::Q => p * k * k + p * k + (k * k - k) / 2,
        };
        let inv2 = match base {
            Base::One => inv_pochhammer(1, (n + k) as u32, order),
            Base::Q => inv_pochhammer(1, (n + k + 1) as u32, order),
        };
        let t = signed_monomial(k, e, order)
            .mul(&inv_pochhammer(1, (n - k) as u32, order))
            .mul(&inv2);
        acc = acc.add(&t);
    }
    acc
}

/// Nested-sum `beta_n` against its signed-sum form, for all `n <= n_max`.
pub fn verify_chain_identity(base: Base, p: u32, n_max: u32, order: Order) -> bool {
    (0..=n_max).all(|n| {
        chain_beta(base, p, n, order).agree_below(&chain_beta_signed_sum(base, p, n, order))
    })
}

/// The three auxiliary re-indexing identities:
///
/// 1. `(1 - q^n) beta_n^{(1,p)} = sum_{k=-n+1}^{n} (-1)^k
///    q^{(p+1/2)k^2 - k/2} / ((q)_{n-k} (q)_{n+k-1})` for `n >= 1`;
/// 2. `q^n beta_n^{(2,p)} = sum_{k=-n}^{n} (-1)^k
///    q^{(p+1/2)k^2 + (p+1/2)k} / ((q)_{n-k} (q)_{n+k})` for `n >= 0`;
/// 3. `(1 - q^{2n}) beta_n^{(2,p)} = sum_{k=-n+1}^{n} (-1)^k
///    q^{(p+1/2)k^2 + (p-1/2)k} / ((q)_{n-k} (q)_{n+k-1})` for `n >= 1`.
pub fn verify_auxiliary(which: u8, p: u32, n_max: u32, order: Order) -> bool {
    assert!((1..=3).contains(&which));
    let n_start = if which == 2 { 0 } else { 1 };
    for n in n_start..=n_max {
        let ni = n as i64;
        let pi = p as i64;
        let (lhs, k_lo, k_hi) = match which {
            1 => {
                let b = chain_beta(Base::One, p, n, order);
                let factor = QExpansion::one(order).sub(&monomial(ni, order));
                (b.mul(&factor), -ni + 1, ni)
            }
            2 => {
                let b = chain_beta(Base::Q, p, n, order);
                (b.mul(&monomial(ni, order)), -ni, ni)
            }
            _ => {
                let b = chain_beta(Base::Q, p, n, order);
                let factor = QExpansion::one(order).sub(&monomial(2 * ni, order));
                (b.mul(&factor), -ni + 1, ni)
            }
        };
        let mut rhs = QExpansion::zero(1, order);
        for k in k_lo..=k_hi {
            let e = match which {
                1 => pi * k * k + (k * k - k) / 2,
                2 => pi * k * k + pi * k + (k * k + k) / 2,
                _ => pi * k * k + pi * k + (k * k - k) / 2,
            };
            let second_count = match which {
                2 => (ni + k) as u32,
                _ => (ni + k - 1) as u32,
            };
            let t = signed_monomial(k, e, order)
                .mul(&inv_pochhammer(1, (ni - k) as u32, order))
                .mul(&inv_pochhammer(1, second_count, order));
            rhs = rhs.add(&t);
        }
        if !lhs.agree_below(&rhs) {
            return false;
        }
    }
    true
}

/// Fine-type summation: for `c >= 0`,
///
/// ```text
/// (q)_inf * sum_{m>=0} q^m (q)_{2m+c} / ((q)_{m+c} (q)_m)
///     = sum_{k>=0} (-1)^k q^{(3/2)k^2 + (c + 3/2)k},
/// ```
///
/// checked below `order`. The summand on the left is `q^m` times the
/// q-binomial `[2m+c choose m]_q`, so the left side is an exact polynomial
/// sum times the Euler product.
pub fn fine_sum_check(c: u32, order: Order) -> bool {
    let m_max = {
        let mut m = 0u32;
        while crate::qseries::ord(m as i64).lt(&order) {
            m += 1;
        }
        m
    };
    let table = QBinomialTable::new(2 * m_max + c, order);
    let mut lhs = QExpansion::zero(1, order);
    // the m-th summand has minimal exponent m
    for m in 0..m_max {
        let t = table.get(2 * m + c, m).mul(&monomial(m as i64, order));
        lhs = lhs.add(&t);
    }
    lhs = lhs.mul(&pochhammer(1, Count::Infinite, order).expect("offset 1"));
    let mut rhs = QExpansion::zero(1, order);
    let mut k = 0i64;
    loop {
        let e = (3 * k * k + 3 * k) / 2 + c as i64 * k;
        if !crate::qseries::ord(e).lt(&order) {
            break;
        }
        rhs = rhs.add(&signed_monomial(k, e, order));
        k += 1;
    }
    lhs.agree_below(&rhs)
}

/// Both Rogers–Ramanujan identities in multiplicative form:
///
/// ```text
/// (sum_j q^{j^2}    / (q)_j) * (q; q^5)_inf (q^4; q^5)_inf = 1,
/// (sum_j q^{j(j+1)} / (q)_j) * (q^2; q^5)_inf (q^3; q^5)_inf = 1.
/// ```
pub fn verify_rogers_ramanujan(order: Order) -> bool {
    let one = QExpansion::one(order);
    for (second, offsets) in [(false, (1i64, 4i64)), (true, (2, 3))] {
        let mut sum = QExpansion::zero(1, order);
        let mut j = 0i64;
        loop {
            let e = if second { j * (j + 1) } else { j * j };
            if !crate::qseries::ord(e).lt(&order) {
                break;
            }
            sum = sum.add(&monomial(e, order).mul(&inv_pochhammer(1, j as u32, order)));
            j += 1;
        }
        let prod = sum
            .mul(&pochhammer_step(offsets.0, 5, Count::Infinite, order).expect("step 5"))
            .mul(&pochhammer_step(offsets.1, 5, Count::Infinite, order).expect("step 5"));
        if !prod.agree_below(&one) {
            return false;
        }
    }
    true
}
