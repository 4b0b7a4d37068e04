//! The five Habiro-type series and their Hecke-type double-sum expansions.
//!
//! For `p >= 1` the five families are nested q-hypergeometric sums over
//! weakly decreasing tuples `s_p >= ... >= s_1 >= 0`, e.g.
//!
//! ```text
//! H_p^(1) = sum q^{s_p} (q^{s_p+1})_{s_p+1} prod_{i<p} q^{s_i(s_i+1)} [s_{i+1} choose s_i]_q,
//! H_p^(2) = sum q^{s_p} (q^{s_p})_{s_p}     prod_{i<p} q^{s_i^2}       [s_{i+1} choose s_i]_q,
//! ```
//!
//! and similarly `H^(3)` (leading `q^{2 s_p} (q^{s_p+1})_{s_p}`, triangular
//! inner exponents), `H^(4)` (leading `q^{s_p} (q^{s_p+1})_{s_p}`,
//! triangular), `H^(5)` (same leading factor, square exponents). All five
//! live in `Z[[q]]`. Each family `k` equals the Hecke-type double sum
//!
//! ```text
//! (1/(q)_inf) (sum_{a,b >= 0} - sum_{a,b < 0}) (-1)^{a+b}
//!     q^{(p+1/2)a^2 + 2ab + (3/2)b^2 + (m1/2)a + (m2/2)b}
//! ```
//!
//! with linear coefficients `(m1, m2)` from [`HabiroFamily::linear_coeffs`].
//! [`verify_hecke_expansion`] checks the two sides coefficient-for-
//! coefficient; they are produced by unrelated code paths (nested-sum
//! recursion vs. lattice-point enumeration), so agreement is a genuine
//! cross-check.

use crate::bailey::{chain_level_stack, Base};
use crate::qseries::{
    inv_euler, pochhammer, Count, ExactRational, Order, QBinomialTable, QExpansion,
};
use num_traits::One;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HeckeError {
    #[error("family index k must lie in 1..=5, got {0}")]
    InvalidFamily(u8),
    #[error("p must be >= 1")]
    InvalidP,
    #[error("linear coefficient m{0} must be odd, got {1}")]
    EvenLinearCoefficient(u8, i64),
}

/// One of the five Habiro-type families at a fixed `p >= 1`.
///
/// Derived data: the linear-coefficient pair `(m1, m2)` of its Hecke
/// exponent, the numerator `e_k` of the fractional power `q^{-e_k/(24(6p-1))}`
/// appearing in its false-theta expression, the Bailey-chain base of its
/// inner exponents, and the third component `l_k` of the periodic-function
/// triple `(1, 1, l_k)` entering its limit formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HabiroFamily {
    pub p: u32,
    pub k: u8,
}

impl HabiroFamily {
    pub fn new(p: u32, k: u8) -> Result<Self, HeckeError> {
        if p < 1 {
            return Err(HeckeError::InvalidP);
        }
        if !(1..=5).contains(&k) {
            return Err(HeckeError::InvalidFamily(k));
        }
        Ok(HabiroFamily { p, k })
    }

    /// `(m1, m2)`: both odd.
    pub fn linear_coeffs(&self) -> (i64, i64) {
        let p = self.p as i64;
        match self.k {
            1 => (2 * p + 1, 5),
            2 => (1, 1),
            3 => (2 * p + 3, 3),
            4 => (2 * p + 1, 1),
            _ => (1, 3),
        }
    }

    /// `e_k`: `(6p+5)^2, 1, 36p^2+84p+1, (6p+1)^2, 48p+1`.
    pub fn e_num(&self) -> i64 {
        let p = self.p as i64;
        match self.k {
            1 => (6 * p + 5) * (6 * p + 5),
            2 => 1,
            3 => 36 * p * p + 84 * p + 1,
            4 => (6 * p + 1) * (6 * p + 1),
            _ => 48 * p + 1,
        }
    }

    /// Bailey-chain base of the inner exponents: squares (`One`) for
    /// `k = 2, 5`, triangular (`Q`) for `k = 1, 3, 4`.
    pub fn base(&self) -> Base {
        match self.k {
            2 | 5 => Base::One,
            _ => Base::Q,
        }
    }

    /// `l_k` with `(l_1, ..., l_5) = (1, p, 2p-1, 2p, 3p-1)`.
    pub fn ell(&self) -> i64 {
        let p = self.p as i64;
        match self.k {
            1 => 1,
            2 => p,
            3 => 2 * p - 1,
            4 => 2 * p,
            _ => 3 * p - 1,
        }
    }
}

/// Minimal exponent contributed by the outer index `t` of family `k` (the
/// leading Pochhammer has constant term 1, inner sums only raise
/// exponents).
fn outer_min_exponent(k: u8, t: i64) -> i64 {
    if k == 3 {
        2 * t
    } else {
        t
    }
}

/// Leading factor of the `t`-th outer term.
fn leading_factor(k: u8, t: u32, order: Order) -> QExpansion {
    let power = if k == 3 { 2 * t as i64 } else { t as i64 };
    let poch = match k {
        1 => pochhammer(t + 1, Count::Finite(t + 1), order),
        2 => pochhammer(t, Count::Finite(t), order),
        _ => pochhammer(t + 1, Count::Finite(t), order),
    }
    .expect("finite Pochhammer");
    poch.mul_monomial(&ExactRational::one(), power, 1)
        .truncated(order)
}

/// The Habiro-type series `H_p^{(k)}`, truncated at `order`.
///
/// The nested sum is evaluated level by level: the inner tuples
/// `(s_1, ..., s_{p-1})` below a fixed outer index `t` are accumulated by
/// the same recursion that drives the Bailey chains, and the outer sum is
/// truncated once `t` (or `2t` for `k = 3`) reaches `order`. The result is
/// asserted to be integer-graded with integer coefficients.
pub fn habiro_series(p: u32, k: u8, order: Order) -> Result<QExpansion, HeckeError> {
    let fam = HabiroFamily::new(p, k)?;
    let t_max = outer_bound(k, order);
    let table = QBinomialTable::new(t_max, order);
    let stack = chain_level_stack(fam.base(), p, t_max, &table);
    Ok(habiro_from_stack(&fam, &stack, order))
}

/// All five families at one `p`, sharing the two nested-sum stacks.
pub fn habiro_series_all(p: u32, order: Order) -> Result<[QExpansion; 5], HeckeError> {
    if p < 1 {
        return Err(HeckeError::InvalidP);
    }
    let t_max = outer_bound(1, order);
    let table = QBinomialTable::new(t_max, order);
    let squares = chain_level_stack(Base::One, p, t_max, &table);
    let triangles = chain_level_stack(Base::Q, p, t_max, &table);
    let mut out: Vec<QExpansion> = Vec::with_capacity(5);
    for k in 1..=5u8 {
        let fam = HabiroFamily { p, k };
        let stack = match fam.base() {
            Base::One => &squares,
            Base::Q => &triangles,
        };
        out.push(habiro_from_stack(&fam, stack, order));
    }
    Ok(out.try_into().expect("five families"))
}

fn outer_bound(k: u8, order: Order) -> u32 {
    let mut t = 0u32;
    while crate::qseries::ord(outer_min_exponent(k, t as i64 + 1)).lt(&order) {
        t += 1;
    }
    t + 1
}

fn habiro_from_stack(fam: &HabiroFamily, stack: &[QExpansion], order: Order) -> QExpansion {
    let mut acc = QExpansion::zero(1, order);
    for (t, inner) in stack.iter().enumerate() {
        if !crate::qseries::ord(outer_min_exponent(fam.k, t as i64)).lt(&order) {
            break;
        }
        acc = acc.add(&leading_factor(fam.k, t as u32, order).mul(inner));
    }
    assert_eq!(acc.denom(), 1, "Habiro-type series must be integer-graded");
    for (_, c) in acc.terms() {
        assert!(c.denom().is_one(), "Habiro-type series must lie in Z[[q]]");
    }
    acc
}

/// The Hecke-type double sum
///
/// ```text
/// (1/(q)_inf) (sum_{a,b >= 0} - sum_{a,b < 0}) (-1)^{a+b}
///     q^{(p+1/2)a^2 + 2ab + (3/2)b^2 + (m1/2)a + (m2/2)b}
/// ```
///
/// for odd `m1, m2`, truncated at `order`. Exponents are integers exactly
/// when `m1, m2` are both odd, which is asserted per emitted term.
pub fn hecke_double_sum(p: u32, m1: i64, m2: i64, order: Order) -> Result<QExpansion, HeckeError> {
    hecke_double_sum_margin(p, m1, m2, order, 2)
}

/// Same as [`hecke_double_sum`] with an explicit enlargement of the
/// enumeration radius, used to property-test that the default bound already
/// collects every contributing lattice point.
pub fn hecke_double_sum_margin(
    p: u32,
    m1: i64,
    m2: i64,
    order: Order,
    margin: i64,
) -> Result<QExpansion, HeckeError> {
    if p < 1 {
        return Err(HeckeError::InvalidP);
    }
    if m1.rem_euclid(2) == 0 {
        return Err(HeckeError::EvenLinearCoefficient(1, m1));
    }
    if m2.rem_euclid(2) == 0 {
        return Err(HeckeError::EvenLinearCoefficient(2, m2));
    }
    let pi = p as i64;
    // A = [[2p+1, 2], [2, 3]] is positive definite; Q(v) >= (lambda_min/2)|v|^2
    // and the linear part is bounded below by -(|m|/2)|v|, so every point
    // with S(a,b) < order lies inside |v| <= r where (lambda_min/2)r^2
    // - (|m|/2)r = order. Radius plus margin is provably complete.
    let tr = (2 * pi + 4) as f64;
    let disc = (((2 * pi - 2) * (2 * pi - 2) + 16) as f64).sqrt();
    let lambda_min = (tr - disc) / 2.0;
    let l = ((m1 * m1 + m2 * m2) as f64).sqrt() / 2.0;
    let order_f = *order.numer() as f64 / *order.denom() as f64;
    let r = (l + (l * l + 2.0 * lambda_min * order_f.max(0.0)).sqrt()) / lambda_min;
    let bound = r.ceil() as i64 + margin;

    let mut cone = QExpansion::zero(1, order);
    for a in -bound..=bound {
        for b in -bound..=bound {
            let positive = a >= 0 && b >= 0;
            let negative = a < 0 && b < 0;
            if !positive && !negative {
                continue;
            }
            let two_s = (2 * pi + 1) * a * a + 4 * a * b + 3 * b * b + m1 * a + m2 * b;
            assert_eq!(two_s.rem_euclid(2), 0, "odd m1, m2 give integer exponents");
            let e = two_s / 2;
            if !crate::qseries::ord(e).lt(&order) {
                continue;
            }
            let mut c = if (a + b).rem_euclid(2) == 0 {
                ExactRational::one()
            } else {
                -ExactRational::one()
            };
            if negative {
                c = -c;
            }
            cone = cone.add(&QExpansion::monomial(c, e, 1, order));
        }
    }
    Ok(cone.mul(&inv_euler(order)))
}

/// Outcome of comparing a Habiro-type series with its Hecke-type expansion.
#[derive(Debug, Clone)]
pub enum HeckeVerdict {
    Equal,
    /// The difference `habiro - hecke`, for diagnostics.
    Diff(QExpansion),
}

impl HeckeVerdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, HeckeVerdict::Equal)
    }
}

/// Compare `H_p^{(k)}` with its Hecke-type double sum below `order`.
pub fn verify_hecke_expansion(p: u32, k: u8, order: Order) -> Result<HeckeVerdict, HeckeError> {
    let fam = HabiroFamily::new(p, k)?;
    let lhs = habiro_series(p, k, order)?;
    let (m1, m2) = fam.linear_coeffs();
    let rhs = hecke_double_sum(p, m1, m2, order)?;
    if lhs.agree_below(&rhs) {
        Ok(HeckeVerdict::Equal)
    } else {
        Ok(HeckeVerdict::Diff(lhs.sub(&rhs)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bailey::chain_beta;
    use crate::qseries::{ord, qbinomial};

    /// Brute-force oracle: literally enumerate the weakly decreasing tuples
    /// `s_p >= ... >= s_1 >= 0` and accumulate each term, independent of the
    /// level-stack recursion used by `habiro_series`.
    fn habiro_brute_force(p: u32, k: u8, order: Order) -> QExpansion {
        let fam = HabiroFamily::new(p, k).unwrap();
        let t_max = outer_bound(k, order);
        let mut acc = QExpansion::zero(1, order);
        let mut tuple = vec![0u32; p as usize];
        fn rec(
            fam: &HabiroFamily,
            tuple: &mut Vec<u32>,
            level: usize,
            order: Order,
            acc: &mut QExpansion,
        ) {
            if level == 0 {
                // tuple holds s_p, s_{p-1}, ..., s_1
                let t = tuple[0];
                let mut term = leading_factor(fam.k, t, order);
                for i in 0..tuple.len() - 1 {
                    let hi = tuple[i];
                    let lo = tuple[i + 1];
                    let e = fam.base().inner_exponent(lo as i64);
                    term = term
                        .mul(&qbinomial(hi, lo as i64, order))
                        .mul_monomial(&ExactRational::one(), e, 1)
                        .truncated(order);
                }
                *acc = acc.add(&term);
                return;
            }
            let cap = tuple[tuple.len() - level - 1];
            for s in 0..=cap {
                let idx = tuple.len() - level;
                tuple[idx] = s;
                rec(fam, tuple, level - 1, order, acc);
            }
        }
        for t in 0..t_max {
            tuple[0] = t;
            rec(&fam, &mut tuple, p as usize - 1, order, &mut acc);
        }
        acc
    }

    #[test]
    fn constant_term_is_one() {
        for p in 1..=3 {
            for k in 1..=5 {
                let h = habiro_series(p, k, ord(12)).unwrap();
                assert!(h.coeff_int(0).is_one(), "p={p} k={k}");
            }
        }
    }

    #[test]
    fn poincare_sphere_series_coefficients() {
        // H(q) = sum_n q^n (q^n)_n = 1 + q + q^3 + q^7 - q^8 + O(q^11),
        // frozen from the brute-force expansion below.
        let h = habiro_series(1, 2, ord(11)).unwrap();
        let expect = [1i64, 1, 0, 1, 0, 0, 0, 1, -1, 0, 0];
        for (n, &c) in expect.iter().enumerate() {
            assert_eq!(
                h.coeff_int(n as i64),
                ExactRational::from(num_bigint::BigInt::from(c)),
                "coefficient of q^{n}"
            );
        }
        assert!(h.agree_below(&habiro_brute_force(1, 2, ord(11))));
    }

    #[test]
    fn nested_sum_matches_brute_force() {
        for (p, k, o) in [(2, 1, 30), (2, 4, 25), (3, 2, 20), (3, 5, 20), (2, 3, 25)] {
            let fast = habiro_series(p, k, ord(o)).unwrap();
            let slow = habiro_brute_force(p, k, ord(o));
            assert!(fast.agree_below(&slow), "p={p} k={k}");
        }
    }

    #[test]
    fn habiro_all_matches_individual() {
        let all = habiro_series_all(2, ord(25)).unwrap();
        for k in 1..=5u8 {
            let single = habiro_series(2, k, ord(25)).unwrap();
            assert!(all[k as usize - 1].agree_below(&single), "k={k}");
        }
    }

    #[test]
    fn chain_route_cross_check() {
        // H_p^(1) = sum_b q^b (q)_{2b+1} beta_b^{(2,p)}: the outer-sum shape
        // used to derive the Hecke expansion, via the Bailey-chain beta.
        let order = ord(20);
        for p in [1u32, 2] {
            let mut acc = QExpansion::zero(1, order);
            for b in 0..20u32 {
                let t = crate::qseries::pochhammer(1, Count::Finite(2 * b + 1), order)
                    .unwrap()
                    .mul(&chain_beta(Base::Q, p, b, order))
                    .mul_monomial(&ExactRational::one(), b as i64, 1)
                    .truncated(order);
                acc = acc.add(&t);
            }
            assert!(
                acc.agree_below(&habiro_series(p, 1, order).unwrap()),
                "p={p}"
            );
        }
    }

    #[test]
    fn double_sum_constant_term() {
        // only (a, b) = (0, 0) reaches exponent 0 when the linear part is
        // positive; confirmed against the enumeration itself
        for (p, m1, m2) in [(1, 1, 1), (2, 5, 3), (3, 7, 5)] {
            let s = hecke_double_sum(p, m1, m2, ord(20)).unwrap();
            assert!(s.coeff_int(0).is_one(), "p={p} m=({m1},{m2})");
        }
    }

    #[test]
    fn double_sum_rejects_even_linear_part() {
        assert_eq!(
            hecke_double_sum(1, 2, 1, ord(10)).unwrap_err(),
            HeckeError::EvenLinearCoefficient(1, 2)
        );
        assert_eq!(
            hecke_double_sum(1, 1, 0, ord(10)).unwrap_err(),
            HeckeError::EvenLinearCoefficient(2, 0)
        );
    }

    #[test]
    fn hecke_expansion_examples() {
        // (p, m1, m2) = (1, 1, 1) is the Poincaré-sphere series
        let lhs = hecke_double_sum(1, 1, 1, ord(30)).unwrap();
        assert!(lhs.agree_below(&habiro_series(1, 2, ord(30)).unwrap()));
        // (p, m1, m2) = (2, 1, 3) is family 5
        let lhs = hecke_double_sum(2, 1, 3, ord(30)).unwrap();
        assert!(lhs.agree_below(&habiro_series(2, 5, ord(30)).unwrap()));
        for (p, k) in [(2, 3), (1, 4), (3, 1)] {
            assert!(
                verify_hecke_expansion(p, k, ord(30)).unwrap().is_equal(),
                "p={p} k={k}"
            );
        }
    }

    #[test]
    fn family_data() {
        let f = HabiroFamily::new(2, 1).unwrap();
        assert_eq!(f.linear_coeffs(), (5, 5));
        assert_eq!(f.e_num(), 17 * 17);
        assert_eq!(f.ell(), 1);
        let f = HabiroFamily::new(3, 5).unwrap();
        assert_eq!(f.linear_coeffs(), (1, 3));
        assert_eq!(f.e_num(), 145);
        assert_eq!(f.ell(), 8);
        assert!(HabiroFamily::new(1, 6).is_err());
        assert!(HabiroFamily::new(0, 1).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(12))]
            #[test]
            fn enumeration_bound_is_sound(p in 1u32..4, m1i in 0i64..4, m2i in 0i64..4, o in 5i64..26) {
                let (m1, m2) = (2 * m1i + 1, 2 * m2i + 1);
                let tight = hecke_double_sum_margin(p, m1, m2, ord(o), 2).unwrap();
                let wide = hecke_double_sum_margin(p, m1, m2, ord(o), 7).unwrap();
                prop_assert!(tight.agree_below(&wide));
            }
        }
    }
}
