//! Exact truncated formal power series in `q^{1/D}` over the rationals.
//!
//! [`QExpansion`] is the medium every identity in this crate is checked in:
//! a sparse map from exponent numerators to exact rational coefficients,
//! together with a rational truncation order. Everything below the order is
//! exact; everything at or above it is unknown and silently dropped.
//!
//! On top of the series type this module provides the classical building
//! blocks: q-Pochhammer symbols `(q^a; q^b)_n` (finite and infinite),
//! reciprocal Pochhammer expansions built from geometric series, q-binomial
//! coefficients via the q-Pascal recurrence, the Dedekind eta series
//! `q^{1/24} (q)_inf`, and a single-variable specialization of Jacobi's
//! triple product whose `m = 1` instance is Euler's pentagonal number
//! theorem.
//!
//! Series division is deliberately not implemented; identities are stated
//! multiplicatively and reciprocals of Pochhammer symbols come from finite
//! products of geometric series.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};
use thiserror::Error;

/// Exact rational coefficient: arbitrary-precision, always reduced,
/// positive denominator.
pub type ExactRational = BigRational;

/// Truncation order: a (small) exact rational threshold.
pub type Order = Rational64;

/// Convenience constructor for integer truncation orders.
pub fn ord(n: i64) -> Order {
    Order::from_integer(n)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QSeriesError {
    /// `(q^0; q)_inf` contains the factor `1 - q^0 = 0` and vanishes
    /// identically, so it is rejected rather than returned as the zero
    /// series.
    #[error("infinite Pochhammer product with offset 0 vanishes identically")]
    ZeroBaseInfiniteProduct,
    #[error("truncation order must be positive, got {0}")]
    NonPositiveOrder(Order),
    #[error("step of a Pochhammer product must be positive, got {0}")]
    NonPositiveStep(i64),
}

/// A truncated formal series `sum_e c_e q^{e/D}` with exact rational
/// coefficients.
///
/// Invariants: every stored numerator `e` satisfies `e/D < order`, no stored
/// coefficient is zero, and `D >= 1`. Negative exponents are permitted (they
/// enter only through explicit monomial shifts). Values are immutable after
/// construction; all arithmetic returns new series truncated to the minimum
/// of the operand orders, over the lcm of the operand denominators.
#[derive(Debug, Clone)]
pub struct QExpansion {
    denom: i64,
    order: Order,
    coeffs: BTreeMap<i64, ExactRational>,
}

fn lcm64(a: i64, b: i64) -> i64 {
    num_integer::lcm(a, b)
}

/// `e/D < order`, computed without overflow.
fn below_order(e: i64, denom: i64, order: Order) -> bool {
    (e as i128) * (*order.denom() as i128) < (*order.numer() as i128) * (denom as i128)
}

impl QExpansion {
    /// The zero series on the `q^{1/denom}` grid.
    pub fn zero(denom: i64, order: Order) -> Self {
        assert!(denom >= 1, "denominator must be >= 1");
        QExpansion {
            denom,
            order,
            coeffs: BTreeMap::new(),
        }
    }

    /// The constant series 1.
    pub fn one(order: Order) -> Self {
        Self::monomial(ExactRational::one(), 0, 1, order)
    }

    /// The single term `coeff * q^{e/denom}`.
    pub fn monomial(coeff: ExactRational, e: i64, denom: i64, order: Order) -> Self {
        let mut s = Self::zero(denom, order);
        if !coeff.is_zero() && below_order(e, denom, order) {
            s.coeffs.insert(e, coeff);
        }
        s
    }

    /// Build from integer-graded coefficients `(exponent, coefficient)`.
    pub fn from_integer_terms<I>(terms: I, order: Order) -> Self
    where
        I: IntoIterator<Item = (i64, ExactRational)>,
    {
        let mut s = Self::zero(1, order);
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    pub fn denom(&self) -> i64 {
        self.denom
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Iterate `(exponent_numerator, coefficient)` in ascending exponent
    /// order. Exponents are numerators over `self.denom()`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &ExactRational)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    /// Coefficient of `q^{e/d}`; zero if the exponent is absent or does not
    /// lie on this series' grid.
    pub fn coeff(&self, e: i64, d: i64) -> ExactRational {
        assert!(d >= 1);
        let num = (e as i128) * (self.denom as i128);
        if num % (d as i128) != 0 {
            return ExactRational::zero();
        }
        let key = num / (d as i128);
        if key < i64::MIN as i128 || key > i64::MAX as i128 {
            return ExactRational::zero();
        }
        self.coeffs
            .get(&(key as i64))
            .cloned()
            .unwrap_or_else(ExactRational::zero)
    }

    /// Coefficient of the integer power `q^e`.
    pub fn coeff_int(&self, e: i64) -> ExactRational {
        self.coeff(e, 1)
    }

    /// The least exponent with nonzero coefficient, as `(numerator, denom)`.
    pub fn min_exponent(&self) -> Option<(i64, i64)> {
        self.coeffs.keys().next().map(|e| (*e, self.denom))
    }

    fn add_term(&mut self, e: i64, c: ExactRational) {
        if c.is_zero() || !below_order(e, self.denom, self.order) {
            return;
        }
        match self.coeffs.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Rescale onto a finer grid; `new_denom` must be a multiple of the
    /// current denominator.
    pub fn rescaled(&self, new_denom: i64) -> Self {
        assert!(
            new_denom >= self.denom && new_denom % self.denom == 0,
            "new denominator {new_denom} must be a multiple of {}",
            self.denom
        );
        let f = new_denom / self.denom;
        QExpansion {
            denom: new_denom,
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (e * f, c.clone()))
                .collect(),
        }
    }

    /// Drop terms at or above `order` and lower the recorded order to
    /// `min(self.order, order)`.
    pub fn truncated(&self, order: Order) -> Self {
        let order = self.order.min(order);
        QExpansion {
            denom: self.denom,
            order,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(e, _)| below_order(**e, self.denom, order))
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        QExpansion {
            denom: self.denom,
            order: self.order,
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }

    pub fn scale(&self, f: &ExactRational) -> Self {
        if f.is_zero() {
            return Self::zero(self.denom, self.order);
        }
        QExpansion {
            denom: self.denom,
            order: self.order,
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, c * f)).collect(),
        }
    }

    /// Multiply by the monomial `coeff * q^{e/d}`. This is the only way a
    /// negative exponent enters a series.
    pub fn mul_monomial(&self, coeff: &ExactRational, e: i64, d: i64) -> Self {
        assert!(d >= 1);
        let denom = lcm64(self.denom, d);
        let fs = denom / self.denom;
        let fe = denom / d;
        let shift = e * fe;
        // Exponents shift by e/d, so the reliable truncation threshold
        // shifts with them.
        let order = self.order + Order::new(e, d);
        let mut out = QExpansion {
            denom,
            order,
            coeffs: BTreeMap::new(),
        };
        if coeff.is_zero() {
            return out;
        }
        for (exp, c) in &self.coeffs {
            out.coeffs.insert(exp * fs + shift, c * coeff);
        }
        out
    }

    fn common_grid(a: &Self, b: &Self) -> (Self, Self) {
        let denom = lcm64(a.denom, b.denom);
        (a.rescaled(denom), b.rescaled(denom))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = Self::common_grid(self, other);
        let order = a.order.min(b.order);
        let mut out = QExpansion {
            denom: a.denom,
            order,
            coeffs: BTreeMap::new(),
        };
        for (e, c) in a.coeffs.into_iter().chain(b.coeffs) {
            out.add_term(e, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = Self::common_grid(self, other);
        let order = a.order.min(b.order);
        let denom = a.denom;
        let mut out = QExpansion {
            denom,
            order,
            coeffs: BTreeMap::new(),
        };
        if a.coeffs.is_empty() || b.coeffs.is_empty() {
            return out;
        }
        // Strict upper bound on representable exponent numerators.
        let bound = {
            let n = *order.numer() as i128 * denom as i128;
            let d = *order.denom() as i128;
            n.div_euclid(d) + 1
        };
        let bt: Vec<(i64, &ExactRational)> = b.coeffs.iter().map(|(e, c)| (*e, c)).collect();
        let b_min = bt[0].0 as i128;
        // Accumulate densely when the exponent span is modest, which it is
        // for every series this crate constructs.
        let a_min = *a.coeffs.keys().next().unwrap() as i128;
        let lo = a_min + b_min;
        let span = bound - lo;
        if span > 0 && span <= (1 << 22) {
            let mut acc: Vec<ExactRational> = vec![ExactRational::zero(); span as usize];
            for (ea, ca) in &a.coeffs {
                let ea = *ea as i128;
                if ea + b_min >= bound {
                    continue;
                }
                for &(eb, cb) in &bt {
                    let e = ea + eb as i128;
                    if e >= bound {
                        break;
                    }
                    acc[(e - lo) as usize] += ca * cb;
                }
            }
            for (i, c) in acc.into_iter().enumerate() {
                if !c.is_zero() {
                    out.coeffs.insert((lo + i as i128) as i64, c);
                }
            }
        } else {
            for (ea, ca) in &a.coeffs {
                let ea = *ea as i128;
                for &(eb, cb) in &bt {
                    let e = ea + eb as i128;
                    if e >= bound {
                        break;
                    }
                    out.add_term(e as i64, ca * cb);
                }
            }
        }
        out
    }

    /// Coefficient-wise equality below `min(self.order, other.order)`.
    pub fn agree_below(&self, other: &Self) -> bool {
        self.first_difference(other).is_none()
    }

    /// The least exponent below the common order where the two series
    /// differ, reported as `(exponent, lhs coefficient, rhs coefficient)`.
    pub fn first_difference(
        &self,
        other: &Self,
    ) -> Option<(Rational64, ExactRational, ExactRational)> {
        let (a, b) = Self::common_grid(self, other);
        let order = a.order.min(b.order);
        let mut keys: Vec<i64> = a.coeffs.keys().chain(b.coeffs.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        for e in keys {
            if !below_order(e, a.denom, order) {
                continue;
            }
            let ca = a
                .coeffs
                .get(&e)
                .cloned()
                .unwrap_or_else(ExactRational::zero);
            let cb = b
                .coeffs
                .get(&e)
                .cloned()
                .unwrap_or_else(ExactRational::zero);
            if ca != cb {
                return Some((Rational64::new(e, a.denom), ca, cb));
            }
        }
        None
    }

    /// Golden-file dump: header `order=<O> denom=<D>`, then one term per
    /// line, `e/D<TAB>num/den`, ascending in `e/D`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let o = self.order;
        if *o.denom() == 1 {
            let _ = writeln!(out, "order={} denom={}", o.numer(), self.denom);
        } else {
            let _ = writeln!(
                out,
                "order={}/{} denom={}",
                o.numer(),
                o.denom(),
                self.denom
            );
        }
        for (e, c) in &self.coeffs {
            let _ = writeln!(out, "{}/{}\t{}/{}", e, self.denom, c.numer(), c.denom());
        }
        out
    }
}

/// The three exact ring operations on truncated series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Exact arithmetic; the result is truncated to `min(order(a), order(b))`
/// over the lcm of the denominators.
pub fn series_arith(a: &QExpansion, b: &QExpansion, op: ArithOp) -> QExpansion {
    match op {
        ArithOp::Add => a.add(b),
        ArithOp::Sub => a.sub(b),
        ArithOp::Mul => a.mul(b),
    }
}

/// Number of factors in a Pochhammer product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Count {
    Finite(u32),
    Infinite,
}

/// `(q^a; q)_n = prod_{k=0}^{n-1} (1 - q^{a+k})`, truncated at `order`.
///
/// For `Count::Infinite` the product is truncated once `a + k >= order`,
/// beyond which factors no longer move coefficients below the order. The
/// degenerate `(q^0; q)_n` with `n >= 1` is the zero series (its first
/// factor is `1 - q^0 = 0`); the infinite product with offset 0 is rejected.
pub fn pochhammer(a: u32, count: Count, order: Order) -> Result<QExpansion, QSeriesError> {
    pochhammer_step(a as i64, 1, count, order)
}

/// `(q^a; q^b)_n = prod_{k=0}^{n-1} (1 - q^{a+kb})` with step `b >= 1`.
pub fn pochhammer_step(
    a: i64,
    b: i64,
    count: Count,
    order: Order,
) -> Result<QExpansion, QSeriesError> {
    if b < 1 {
        return Err(QSeriesError::NonPositiveStep(b));
    }
    assert!(a >= 0, "Pochhammer offset must be non-negative");
    let mut acc = QExpansion::one(order);
    match count {
        Count::Finite(n) => {
            for k in 0..n as i64 {
                let e = a + k * b;
                if e == 0 {
                    return Ok(QExpansion::zero(1, order));
                }
                if below_order(e, 1, order) {
                    acc = acc.mul(&factor_one_minus(e, order));
                } // else: the factor is 1 + O(q^order)
            }
        }
        Count::Infinite => {
            if a == 0 {
                return Err(QSeriesError::ZeroBaseInfiniteProduct);
            }
            let mut k = 0i64;
            while below_order(a + k * b, 1, order) {
                acc = acc.mul(&factor_one_minus(a + k * b, order));
                k += 1;
            }
        }
    }
    Ok(acc)
}

fn factor_one_minus(e: i64, order: Order) -> QExpansion {
    let mut f = QExpansion::one(order);
    f.add_term(e, -ExactRational::one());
    f
}

/// `1 / (q^a; q)_n` for `a >= 1`, as the exact product of the truncated
/// geometric series `1/(1 - q^{a+k})`.
pub fn inv_pochhammer(a: i64, n: u32, order: Order) -> QExpansion {
    assert!(a >= 1, "reciprocal Pochhammer needs offset >= 1");
    inv_geometric_product((0..n as i64).map(|k| a + k), order)
}

/// `1 / (q; q)_inf`, the partition generating function, truncated at `order`.
pub fn inv_euler(order: Order) -> QExpansion {
    let max = integer_exponent_bound(order);
    inv_geometric_product(1..max, order)
}

/// Strict upper bound for integer exponents below `order`.
fn integer_exponent_bound(order: Order) -> i64 {
    let n = *order.numer() as i128;
    let d = *order.denom() as i128;
    (n.div_euclid(d) + 1) as i64
}

/// Multiply the geometric series `1/(1-q^j)` over the given exponents, on
/// the integer grid. Each factor is the running-sum recurrence
/// `c_i += c_{i-j}`, which is exactly multiplication by `1/(1-q^j)`
/// truncated to the working order.
fn inv_geometric_product<I: IntoIterator<Item = i64>>(exps: I, order: Order) -> QExpansion {
    let len = integer_exponent_bound(order).max(0) as usize;
    if len == 0 {
        return QExpansion::zero(1, order);
    }
    let mut c = vec![ExactRational::zero(); len];
    c[0] = ExactRational::one();
    for j in exps {
        assert!(j >= 1);
        let j = j as usize;
        for i in j..len {
            let prev = c[i - j].clone();
            c[i] += prev;
        }
    }
    QExpansion::from_integer_terms(c.into_iter().enumerate().map(|(i, v)| (i as i64, v)), order)
}

/// q-binomial (Gaussian) coefficient `[n choose k]_q`, truncated at `order`.
///
/// Zero when `k < 0` or `k > n`; otherwise the exact polynomial
/// `(q)_n / ((q)_k (q)_{n-k})`, computed cancellation-free with the
/// q-Pascal recurrence `[n k] = [n-1 k-1] + q^k [n-1 k]`.
pub fn qbinomial(n: u32, k: i64, order: Order) -> QExpansion {
    if k < 0 || k > n as i64 {
        return QExpansion::zero(1, order);
    }
    QBinomialTable::new(n, order).get(n, k as u32).clone()
}

/// Precomputed triangle of q-binomial coefficients, shared by the nested-sum
/// evaluators.
pub struct QBinomialTable {
    order: Order,
    rows: Vec<Vec<QExpansion>>,
}

impl QBinomialTable {
    pub fn new(n_max: u32, order: Order) -> Self {
        let mut rows: Vec<Vec<QExpansion>> = Vec::with_capacity(n_max as usize + 1);
        rows.push(vec![QExpansion::one(order)]);
        for n in 1..=n_max as usize {
            let prev = &rows[n - 1];
            let mut row = Vec::with_capacity(n + 1);
            row.push(QExpansion::one(order));
            for k in 1..n {
                let shifted = prev[k].mul_monomial(&ExactRational::one(), k as i64, 1);
                row.push(prev[k - 1].add(&shifted.truncated(order)));
            }
            row.push(QExpansion::one(order));
            rows.push(row);
        }
        QBinomialTable { order, rows }
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn get(&self, n: u32, k: u32) -> &QExpansion {
        &self.rows[n as usize][k as usize]
    }
}

/// Dedekind eta as a series: `q^{1/24} (q; q)_inf`, on the `q^{1/24}` grid.
pub fn eta_series(order: Order) -> Result<QExpansion, QSeriesError> {
    if order <= Order::zero() {
        return Err(QSeriesError::NonPositiveOrder(order));
    }
    let euler = pochhammer(1, Count::Infinite, order)?;
    Ok(euler
        .mul_monomial(&ExactRational::one(), 1, 24)
        .truncated(order))
}

/// Jacobi's triple product specialized to one variable: with base `q^{2m+1}`
/// and `zeta = q^m`,
///
/// ```text
/// sum_{n in Z} (-1)^n q^{(2m+1) n(n-1)/2 + m n}
///     = (q^{2m+1}; q^{2m+1})_inf (q^m; q^{2m+1})_inf (q^{m+1}; q^{2m+1})_inf.
/// ```
///
/// `m = 1` is Euler's pentagonal number theorem for `(q)_inf`; `m = 2, 3`
/// are the products appearing in the Rogers–Ramanujan identities. Returns
/// whether both sides agree coefficient-wise below `order`, each side
/// expanded independently.
pub fn jacobi_triple_check(order: Order, m: i64) -> Result<bool, QSeriesError> {
    assert!(m >= 1, "specialization requires m >= 1");
    let base = 2 * m + 1;
    let mut lhs = QExpansion::zero(1, order);
    // n(n-1)/2 grows in both directions; walk outward until the exponent
    // clears the order.
    for dir in [1i64, -1] {
        let mut n = if dir == 1 { 0 } else { -1 };
        loop {
            let e = base * (n * (n - 1) / 2) + m * n;
            if !below_order(e, 1, order) {
                break;
            }
            let sign = if n.rem_euclid(2) == 0 {
                ExactRational::one()
            } else {
                -ExactRational::one()
            };
            lhs = lhs.add(&QExpansion::monomial(sign, e, 1, order));
            n += dir;
        }
    }
    let rhs = pochhammer_step(base, base, Count::Infinite, order)?
        .mul(&pochhammer_step(m, base, Count::Infinite, order)?)
        .mul(&pochhammer_step(m + 1, base, Count::Infinite, order)?);
    Ok(lhs.agree_below(&rhs))
}

/// Euler's pentagonal number theorem, `(q)_inf = sum_k (-1)^k q^{k(3k-1)/2}`,
/// checked below `order` with both sides produced independently.
pub fn pentagonal_check(order: Order) -> Result<bool, QSeriesError> {
    let mut rhs = QExpansion::zero(1, order);
    for dir in [1i64, -1] {
        let mut k = if dir == 1 { 0 } else { -1 };
        loop {
            let e = k * (3 * k - 1) / 2;
            if !below_order(e, 1, order) {
                break;
            }
            let sign = if k.rem_euclid(2) == 0 {
                ExactRational::one()
            } else {
                -ExactRational::one()
            };
            rhs = rhs.add(&QExpansion::monomial(sign, e, 1, order));
            k += dir;
        }
    }
    Ok(pochhammer(1, Count::Infinite, order)?.agree_below(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn rat(n: i64) -> ExactRational {
        ExactRational::from_i64(n).unwrap()
    }

    fn poly(terms: &[(i64, i64)], order: Order) -> QExpansion {
        QExpansion::from_integer_terms(terms.iter().map(|&(e, c)| (e, rat(c))), order)
    }

    #[test]
    fn product_of_conjugates() {
        // (1 + q)(1 - q) = 1 - q^2
        let a = poly(&[(0, 1), (1, 1)], ord(10));
        let b = poly(&[(0, 1), (1, -1)], ord(10));
        let expect = poly(&[(0, 1), (2, -1)], ord(10));
        assert!(a.mul(&b).agree_below(&expect));
    }

    #[test]
    fn mul_merges_denominators() {
        let a = QExpansion::monomial(rat(1), 1, 24, ord(10));
        let b = QExpansion::monomial(rat(1), 1, 120, ord(10));
        let p = a.mul(&b);
        assert_eq!(p.denom(), 120);
        // q^{1/24} q^{1/120} = q^{6/120}
        assert_eq!(p.coeff(6, 120), rat(1));
    }

    #[test]
    fn half_powers_multiply_to_q() {
        let h = QExpansion::monomial(rat(1), 1, 2, ord(5));
        let p = h.mul(&h);
        assert_eq!(p.coeff_int(1), rat(1));
        assert_eq!(p.num_terms(), 1);
    }

    #[test]
    fn mul_truncates_to_min_order() {
        let a = poly(&[(0, 1), (5, 3)], ord(9));
        let b = poly(&[(0, 1), (4, 1)], ord(6));
        let p = a.mul(&b);
        assert_eq!(p.order(), ord(6));
        assert_eq!(p.coeff_int(5), rat(3));
        assert!(p.coeff_int(9).is_zero());
    }

    #[test]
    fn pochhammer_two_factors() {
        // (q; q)_2 = (1-q)(1-q^2) = 1 - q - q^2 + q^3
        let p = pochhammer(1, Count::Finite(2), ord(20)).unwrap();
        let expect = poly(&[(0, 1), (1, -1), (2, -1), (3, 1)], ord(20));
        assert!(p.agree_below(&expect));
    }

    #[test]
    fn euler_product_matches_pentagonal_pattern() {
        // (q; q)_inf = 1 - q - q^2 + q^5 + q^7 - q^12 - ... below order 15,
        // frozen from a brute-force factor-by-factor expansion.
        let p = pochhammer(1, Count::Infinite, ord(15)).unwrap();
        let expect = poly(
            &[(0, 1), (1, -1), (2, -1), (5, 1), (7, 1), (12, -1)],
            ord(15),
        );
        assert!(p.agree_below(&expect));
    }

    #[test]
    fn pochhammer_offset_zero() {
        // (q^0; q)_3 has the vanishing factor 1 - q^0.
        let p = pochhammer(0, Count::Finite(3), ord(10)).unwrap();
        assert!(p.is_zero());
        // (x; q)_0 = 1 even at x = q^0.
        let one = pochhammer(0, Count::Finite(0), ord(10)).unwrap();
        assert!(one.agree_below(&QExpansion::one(ord(10))));
        assert_eq!(
            pochhammer(0, Count::Infinite, ord(10)).unwrap_err(),
            QSeriesError::ZeroBaseInfiniteProduct
        );
    }

    #[test]
    fn qbinomial_small_cases() {
        // [2 1]_q = 1 + q
        assert!(qbinomial(2, 1, ord(20)).agree_below(&poly(&[(0, 1), (1, 1)], ord(20))));
        // [3 5]_q = 0 (out of range), [3 -1]_q = 0
        assert!(qbinomial(3, 5, ord(20)).is_zero());
        assert!(qbinomial(3, -1, ord(20)).is_zero());
    }

    /// Long-division oracle: exact quotient of (q)_n by (q)_k (q)_{n-k},
    /// entirely independent of the q-Pascal recurrence.
    fn qbinomial_by_division(n: u32, k: u32, order: Order) -> QExpansion {
        let num = pochhammer(1, Count::Finite(n), order).unwrap();
        let den = pochhammer(1, Count::Finite(k), order)
            .unwrap()
            .mul(&pochhammer(1, Count::Finite(n - k), order).unwrap());
        // Polynomial long division in ascending powers; the division is
        // exact, so the remainder empties out.
        let mut rem: BTreeMap<i64, ExactRational> = rem_map(&num);
        let den_map = rem_map(&den);
        let (&d0, c0) = den_map.iter().next().unwrap();
        let c0 = c0.clone();
        let mut quot = QExpansion::zero(1, order);
        while let Some((&e, _)) = rem.iter().next() {
            let c = rem.get(&e).unwrap().clone();
            let qe = e - d0;
            let qc = c / &c0;
            for (de, dc) in &den_map {
                let key = qe + de;
                let v = rem.remove(&key).unwrap_or_else(ExactRational::zero) - &qc * dc;
                if !v.is_zero() {
                    rem.insert(key, v);
                }
            }
            quot = quot.add(&QExpansion::monomial(qc, qe, 1, order));
        }
        quot
    }

    fn rem_map(s: &QExpansion) -> BTreeMap<i64, ExactRational> {
        s.terms().map(|(e, c)| (e, c.clone())).collect()
    }

    #[test]
    fn qbinomial_matches_division_oracle() {
        // [4 2]_q = 1 + q + 2q^2 + q^3 + q^4, and a spread of larger cases.
        let expect = poly(&[(0, 1), (1, 1), (2, 2), (3, 1), (4, 1)], ord(40));
        assert!(qbinomial(4, 2, ord(40)).agree_below(&expect));
        for (n, k) in [(5, 2), (7, 3), (9, 4), (10, 5)] {
            let fast = qbinomial(n, k as i64, ord(60));
            let slow = qbinomial_by_division(n, k, ord(60));
            assert!(fast.agree_below(&slow), "[{n} {k}]_q mismatch");
        }
    }

    #[test]
    fn inv_pochhammer_times_pochhammer_is_one() {
        for n in 0..6u32 {
            let inv = inv_pochhammer(1, n, ord(30));
            let p = pochhammer(1, Count::Finite(n), ord(30)).unwrap();
            assert!(p.mul(&inv).agree_below(&QExpansion::one(ord(30))));
        }
        let e = inv_euler(ord(25)).mul(&pochhammer(1, Count::Infinite, ord(25)).unwrap());
        assert!(e.agree_below(&QExpansion::one(ord(25))));
    }

    #[test]
    fn partition_coefficients() {
        // p(0..10) = 1,1,2,3,5,7,11,15,22,30,42
        let gf = inv_euler(ord(12));
        let expect = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42];
        for (n, &p) in expect.iter().enumerate() {
            assert_eq!(gf.coeff_int(n as i64), rat(p), "p({n})");
        }
    }

    #[test]
    fn eta_leading_terms() {
        let eta = eta_series(ord(5)).unwrap();
        assert_eq!(eta.denom(), 24);
        // leading term q^{1/24}, next term -q^{1/24 + 1}
        assert_eq!(eta.coeff(1, 24), rat(1));
        assert_eq!(eta.coeff(25, 24), rat(-1));
        // grading: every exponent is 1/24 mod 1
        for (e, _) in eta.terms() {
            assert_eq!(e.rem_euclid(24), 1);
        }
        assert_eq!(
            eta_series(ord(0)).unwrap_err(),
            QSeriesError::NonPositiveOrder(ord(0))
        );
    }

    #[test]
    fn jacobi_triple_specializations() {
        for m in 1..=3 {
            assert!(jacobi_triple_check(ord(30), m).unwrap(), "m = {m}");
        }
        // constant terms match trivially at order 1
        assert!(jacobi_triple_check(ord(1), 1).unwrap());
        assert!(pentagonal_check(ord(60)).unwrap());
    }

    #[test]
    fn pochhammer_complement_property() {
        // (q;q)_n (q^{n+1};q)_inf = (q;q)_inf for 0 <= n <= 10.
        let full = pochhammer(1, Count::Infinite, ord(40)).unwrap();
        for n in 0..=10u32 {
            let head = pochhammer(1, Count::Finite(n), ord(40)).unwrap();
            let tail = pochhammer(n + 1, Count::Infinite, ord(40)).unwrap();
            assert!(head.mul(&tail).agree_below(&full), "n = {n}");
        }
    }

    #[test]
    fn dump_format_is_stable() {
        let s = poly(&[(0, 1), (2, -3)], ord(4)).mul_monomial(&rat(1), 1, 24);
        let dump = s.dump();
        let expect = "order=97/24 denom=24\n1/24\t1/1\n49/24\t-3/1\n";
        assert_eq!(dump, expect);
    }

    #[test]
    fn negative_exponents_via_monomial_shift() {
        let s = poly(&[(0, 1), (1, 1)], ord(5)).mul_monomial(&rat(1), -2, 1);
        assert_eq!(s.coeff_int(-2), rat(1));
        assert_eq!(s.coeff_int(-1), rat(1));
        assert_eq!(s.min_exponent(), Some((-2, 1)));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_series() -> impl Strategy<Value = QExpansion> {
            let term = (0i64..60, -6i64..7);
            (proptest::collection::vec(term, 0..8), 1i64..4).prop_map(|(ts, d)| {
                let denom = [1, 2, 24][d as usize - 1];
                let mut s = QExpansion::zero(denom, ord(20));
                for (e, c) in ts {
                    s = s.add(&QExpansion::monomial(rat(c), e, denom, ord(20)));
                }
                s
            })
        }

        proptest! {
            #[test]
            fn ring_laws_below_order(a in arb_series(), b in arb_series(), c in arb_series()) {
                let assoc_l = a.mul(&b).mul(&c);
                let assoc_r = a.mul(&b.mul(&c));
                prop_assert!(assoc_l.agree_below(&assoc_r));
                let dist_l = a.mul(&b.add(&c));
                let dist_r = a.mul(&b).add(&a.mul(&c));
                prop_assert!(dist_l.agree_below(&dist_r));
                let comm = a.mul(&b);
                prop_assert!(comm.agree_below(&b.mul(&a)));
            }

            #[test]
            fn add_sub_roundtrip(a in arb_series(), b in arb_series()) {
                prop_assert!(a.add(&b).sub(&b).agree_below(&a));
            }
        }
    }
}
