//! Configurable-precision real and complex arithmetic for the limit
//! formulas.
//!
//! Everything evaluated at a root of unity in this crate is a *finite* sum
//! of unit-modulus terms, so no error tracking is needed; a working
//! precision comfortably above the requested digits is enough. [`Ctx`]
//! owns the precision (in bits) and the cached transcendental constants and
//! is passed explicitly — there is no global precision state.

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

const RM: RoundingMode = RoundingMode::ToEven;

/// Precision context: working precision plus cached constants.
pub struct Ctx {
    digits: usize,
    bits: usize,
    cc: Consts,
}

impl Ctx {
    /// A context carrying `digits` significant decimal digits (at least 15),
    /// with guard bits on top.
    pub fn new(digits: usize) -> Self {
        let digits = digits.max(15);
        let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 32;
        Ctx {
            digits,
            bits,
            cc: Consts::new().expect("constants cache"),
        }
    }

    pub fn digits(&self) -> usize {
        self.digits
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn pi(&mut self) -> BigFloat {
        self.cc.pi(self.bits, RM)
    }

    pub fn zero(&self) -> BigFloat {
        BigFloat::from_i64(0, self.bits)
    }

    pub fn from_i64(&self, n: i64) -> BigFloat {
        BigFloat::from_i64(n, self.bits)
    }

    pub fn from_f64(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.bits)
    }

    pub fn from_rational(&mut self, r: &BigRational) -> BigFloat {
        let n = self.from_bigint(r.numer());
        let d = self.from_bigint(r.denom());
        n.div(&d, self.bits, RM)
    }

    pub fn from_bigint(&mut self, n: &BigInt) -> BigFloat {
        if let Some(v) = n.to_i64() {
            return self.from_i64(v);
        }
        BigFloat::parse(&n.to_string(), Radix::Dec, self.bits, RM, &mut self.cc)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.bits, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.bits, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.bits, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.bits, RM)
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.bits, RM)
    }

    pub fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.bits, RM, &mut self.cc)
    }

    pub fn sin(&mut self, a: &BigFloat) -> BigFloat {
        a.sin(self.bits, RM, &mut self.cc)
    }

    pub fn cos(&mut self, a: &BigFloat) -> BigFloat {
        a.cos(self.bits, RM, &mut self.cc)
    }

    /// Lossy conversion for reports and tolerance summaries.
    pub fn to_f64(x: &BigFloat) -> f64 {
        if x.is_inf_pos() {
            return f64::INFINITY;
        }
        if x.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        if x.is_nan() {
            return f64::NAN;
        }
        format!("{x}").parse::<f64>().unwrap_or(f64::NAN)
    }
}

/// A complex number at the context's working precision.
#[derive(Clone, Debug)]
pub struct Cx {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl Cx {
    pub fn new(re: BigFloat, im: BigFloat) -> Self {
        Cx { re, im }
    }

    pub fn zero(ctx: &Ctx) -> Self {
        Cx::new(ctx.zero(), ctx.zero())
    }

    pub fn real(x: BigFloat, ctx: &Ctx) -> Self {
        Cx::new(x, ctx.zero())
    }

    pub fn from_i64(n: i64, ctx: &Ctx) -> Self {
        Cx::real(ctx.from_i64(n), ctx)
    }

    pub fn from_f64s(re: f64, im: f64, ctx: &Ctx) -> Self {
        Cx::new(ctx.from_f64(re), ctx.from_f64(im))
    }

    pub fn add(&self, o: &Cx, ctx: &Ctx) -> Cx {
        Cx::new(ctx.add(&self.re, &o.re), ctx.add(&self.im, &o.im))
    }

    pub fn sub(&self, o: &Cx, ctx: &Ctx) -> Cx {
        Cx::new(ctx.sub(&self.re, &o.re), ctx.sub(&self.im, &o.im))
    }

    pub fn neg(&self) -> Cx {
        Cx::new(self.re.neg(), self.im.neg())
    }

    pub fn conj(&self) -> Cx {
        Cx::new(self.re.clone(), self.im.neg())
    }

    pub fn mul(&self, o: &Cx, ctx: &Ctx) -> Cx {
        let re = ctx.sub(&ctx.mul(&self.re, &o.re), &ctx.mul(&self.im, &o.im));
        let im = ctx.add(&ctx.mul(&self.re, &o.im), &ctx.mul(&self.im, &o.re));
        Cx::new(re, im)
    }

    pub fn scale(&self, f: &BigFloat, ctx: &Ctx) -> Cx {
        Cx::new(ctx.mul(&self.re, f), ctx.mul(&self.im, f))
    }

    pub fn div(&self, o: &Cx, ctx: &Ctx) -> Cx {
        let n2 = ctx.add(&ctx.mul(&o.re, &o.re), &ctx.mul(&o.im, &o.im));
        let num = self.mul(&o.conj(), ctx);
        Cx::new(ctx.div(&num.re, &n2), ctx.div(&num.im, &n2))
    }

    pub fn norm_sqr(&self, ctx: &Ctx) -> BigFloat {
        ctx.add(&ctx.mul(&self.re, &self.re), &ctx.mul(&self.im, &self.im))
    }

    pub fn abs(&self, ctx: &Ctx) -> BigFloat {
        ctx.sqrt(&self.norm_sqr(ctx))
    }

    /// `e^{i pi r}` for an exact rational `r`, reduced mod 2 before any
    /// floating-point work so huge numerators cost nothing in accuracy.
    pub fn unit_pi(r: &BigRational, ctx: &mut Ctx) -> Cx {
        let two = BigRational::from(BigInt::from(2));
        let mut r = r - (r / &two).floor() * &two;
        if r.is_negative() {
            r += &two;
        }
        let pi = ctx.pi();
        let rf = ctx.from_rational(&r);
        let theta = ctx.mul(&pi, &rf);
        Cx::new(ctx.cos(&theta), ctx.sin(&theta))
    }

    /// `e^{i pi n/d}` for an exact rational given as a ratio of machine
    /// integers.
    pub fn unit_pi_frac(n: i64, d: i64, ctx: &mut Ctx) -> Cx {
        Cx::unit_pi(&BigRational::new(BigInt::from(n), BigInt::from(d)), ctx)
    }

    /// Complex exponential `e^{x + iy} = e^x (cos y + i sin y)`.
    pub fn exp(&self, ctx: &mut Ctx) -> Cx {
        let m = ctx.exp(&self.re);
        let c = ctx.cos(&self.im);
        let s = ctx.sin(&self.im);
        Cx::new(ctx.mul(&m, &c), ctx.mul(&m, &s))
    }

    pub fn to_f64s(&self) -> (f64, f64) {
        (Ctx::to_f64(&self.re), Ctx::to_f64(&self.im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourth_roots_of_unity() {
        let mut ctx = Ctx::new(50);
        let i = Cx::unit_pi_frac(1, 2, &mut ctx);
        let (re, im) = i.to_f64s();
        assert!(re.abs() < 1e-45 && (im - 1.0).abs() < 1e-45);
        let m1 = i.mul(&i, &ctx);
        assert!((m1.to_f64s().0 + 1.0).abs() < 1e-45);
    }

    #[test]
    fn angle_reduction_mod_two() {
        let mut ctx = Ctx::new(40);
        // e^{i pi (r + 2k)} = e^{i pi r} for huge k
        let small = BigRational::new(BigInt::from(1), BigInt::from(3));
        let big = &small + BigRational::from(BigInt::from(2) * BigInt::from(10).pow(12));
        let a = Cx::unit_pi(&big, &mut ctx);
        let b = Cx::unit_pi(&small, &mut ctx);
        let d = a.sub(&b, &ctx).abs(&ctx);
        assert!(Ctx::to_f64(&d) < 1e-38);
    }

    #[test]
    fn division_roundtrip() {
        let mut ctx = Ctx::new(50);
        let a = Cx::from_f64s(1.25, -2.5, &ctx);
        let b = Cx::unit_pi_frac(2, 7, &mut ctx);
        let r = a.div(&b, &ctx).mul(&b, &ctx).sub(&a, &ctx).abs(&ctx);
        assert!(Ctx::to_f64(&r) < 1e-45);
    }

    #[test]
    fn exp_matches_f64() {
        let mut ctx = Ctx::new(30);
        let z = Cx::from_f64s(0.5, 1.25, &ctx);
        let e = z.exp(&mut ctx);
        let want = num_complex::Complex64::new(0.5, 1.25).exp();
        let (re, im) = e.to_f64s();
        assert!((re - want.re).abs() < 1e-14 && (im - want.im).abs() < 1e-14);
    }

    #[test]
    fn rational_conversion_handles_big_integers() {
        let mut ctx = Ctx::new(50);
        let r = BigRational::new(BigInt::from(10).pow(40) + 1, BigInt::from(3));
        let x = ctx.from_rational(&r);
        // x * 3 - 10^40 = 1
        let three = ctx.from_i64(3);
        let y = ctx.mul(&x, &three);
        let p40 = ctx.from_bigint(&BigInt::from(10).pow(40));
        let one = ctx.sub(&y, &p40);
        assert!((Ctx::to_f64(&one) - 1.0).abs() < 1e-8);
    }
}
