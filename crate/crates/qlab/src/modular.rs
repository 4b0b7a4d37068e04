//! Numerical verification of the S-transformation formulas: the
//! one-dimensional false theta transformation with its weight-3/2 Eichler
//! integral, the bivariate theta `g_{mu,c}(tau, z)` with its modular
//! property, and the rank-two S-transformation.
//!
//! All evaluation here is IEEE double precision; the residual tolerances of
//! these identities (1e-5, 1e-6) sit far above the attainable 1e-9.
//! One-dimensional theta sums switch automatically between the defining
//! series and its Poisson dual, so integrands stay cheap and accurate down
//! to the `Im z -> 0` endpoints of the integration paths. Square roots and
//! half-integral powers use the principal branch throughout, `arg` in
//! `(-pi/2, pi/2]` for `(-i tau)^{1/2}`; both sides of every identity go
//! through the same helpers, so the branch choice is applied consistently.
//!
//! Integral paths substitute `z = tau + i s^2` (for the `tau -> i inf` leg)
//! and `z = tau (1 - s^2)` (for the `0 -> tau` leg), which removes the
//! `1/sqrt(z - tau)` singularity exactly; the integrands then decay fast
//! and tanh-sinh quadrature converges in a handful of refinements. No
//! randomness enters anywhere: identical inputs produce identical output
//! bits.

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use thiserror::Error;

use crate::falsetheta::{CVector, LatticeData, MuVector};
use crate::qseries::QExpansion;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
const PI: f64 = std::f64::consts::PI;

/// sgn with sgn(0) = 0 (f64::signum maps +-0.0 to +-1.0).
fn sgn0(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ModularError {
    #[error("evaluation point needs Im(tau) > 0, got {0}")]
    NotInUpperHalfPlane(f64),
    #[error("this transformation requires Re(tau) != 0")]
    PureImaginaryTau,
    #[error("quadrature did not stabilize: last refinement moved {0:e}")]
    QuadratureStalled(f64),
}

/// An evaluation point in the upper half plane; `digits` caps the tail
/// thresholds used by the series evaluators (values beyond ~15 saturate
/// IEEE doubles).
#[derive(Debug, Clone, Copy)]
pub struct EvalPoint {
    pub tau: Complex64,
    pub digits: u32,
}

impl EvalPoint {
    pub fn new(tau: Complex64) -> Result<Self, ModularError> {
        if tau.im <= 0.0 {
            return Err(ModularError::NotInUpperHalfPlane(tau.im));
        }
        Ok(EvalPoint { tau, digits: 15 })
    }

    pub fn with_digits(mut self, digits: u32) -> Self {
        self.digits = digits.max(1);
        self
    }
}

/// Value of a truncated series at a point, along with a crude geometric
/// bound on the dropped tail (assuming coefficients of the order of the
/// largest retained one).
#[derive(Debug, Clone, Copy)]
pub struct EvalOutcome {
    pub value: Complex64,
    pub tail_bound: f64,
}

/// `sum_e c_e e^{2 pi i (e/D) tau}` over the retained terms.
pub fn eval_qexpansion(s: &QExpansion, point: &EvalPoint) -> EvalOutcome {
    let tau = point.tau;
    let d = s.denom() as f64;
    let mut value = Complex64::new(0.0, 0.0);
    let mut cmax = 0.0f64;
    for (e, c) in s.terms() {
        let cf = rational_to_f64(c);
        cmax = cmax.max(cf.abs());
        let x = e as f64 / d;
        value += cf * (Complex64::new(0.0, TWO_PI * x) * tau).exp();
    }
    let o = s.order();
    let of = *o.numer() as f64 / *o.denom() as f64;
    let decay = (-TWO_PI * tau.im).exp();
    let tail_bound = if decay < 1.0 {
        cmax.max(1.0) * decay.powf(of) / (1.0 - decay.powf(1.0 / d))
    } else {
        f64::INFINITY
    };
    EvalOutcome { value, tail_bound }
}

fn rational_to_f64(c: &crate::qseries::ExactRational) -> f64 {
    use num_traits::ToPrimitive;
    c.to_f64().unwrap_or(f64::NAN)
}

/// `sum_{l in Z} (beta + a l)^w e^{pi i z c (beta + a l)^2}` for `w in
/// {0, 1}`, `a, c > 0`, `z` in the upper half plane.
///
/// Switches between the defining sum and its Poisson dual
///
/// ```text
/// w = 0:  (-izc)^{-1/2} (1/a)   sum_j e^{2 pi i j beta/a} e^{pi i (-1/z) j^2/(a^2 c)}
/// w = 1:  -i (-izc)^{-3/2} (1/a^2) sum_j j e^{2 pi i j beta/a} e^{pi i (-1/z) j^2/(a^2 c)}
/// ```
///
/// choosing whichever side needs fewer terms; the dual makes the `Im z -> 0`
/// regime exact. (For `w = 1` the dual has no `j = 0` term, which is why
/// these sums vanish toward real `z`.)
fn theta_sum(z: Complex64, c: f64, a: f64, beta: f64, w: u8, digits: u32) -> Complex64 {
    debug_assert!(z.im > 0.0 && c > 0.0 && a > 0.0);
    let threshold = (digits as f64 + 3.0) * std::f64::consts::LN_10;
    // decay exponents per unit index step, both sides
    let direct_rate = PI * c * a * a * z.im;
    let dual_im = z.im / z.norm_sqr(); // Im(-1/z)
    let dual_rate = PI * dual_im / (a * a * c);
    if direct_rate >= dual_rate {
        let mut acc = Complex64::new(0.0, 0.0);
        for dir in [1.0f64, -1.0] {
            let mut l = if dir > 0.0 { 0.0f64 } else { -1.0 };
            loop {
                let v = beta + a * l;
                if PI * c * v * v * z.im > threshold && v * dir > 0.0 {
                    break;
                }
                let weight = if w == 0 { 1.0 } else { v };
                acc += weight * (Complex64::new(0.0, PI * c * v * v) * z).exp();
                l += dir;
            }
        }
        acc
    } else {
        let minus_iz_c = Complex64::new(0.0, -1.0) * z * c;
        let root = minus_iz_c.sqrt();
        let dual_z = -z.inv(); // -1/z
        let mut acc = Complex64::new(0.0, 0.0);
        let mut j = if w == 0 { 0.0f64 } else { 1.0 };
        loop {
            if PI * j * j / (a * a * c) * dual_im > threshold && j > 0.0 {
                break;
            }
            let gauss = (Complex64::new(0.0, PI * j * j / (a * a * c)) * dual_z).exp();
            if w == 0 {
                let cosine = 2.0 * (TWO_PI * j * beta / a).cos();
                let coeff = if j == 0.0 { 1.0 } else { cosine };
                acc += coeff * gauss;
            } else {
                // j and -j combine to 2 i j sin(2 pi j beta / a)
                acc += Complex64::new(0.0, 2.0 * j * (TWO_PI * j * beta / a).sin()) * gauss;
            }
            j += 1.0;
        }
        if w == 0 {
            acc / (root * a)
        } else {
            acc * Complex64::new(0.0, -1.0) / (root * minus_iz_c * a * a)
        }
    }
}

/// Ordinary theta `theta_{M,mu}(z)` (`w = 0`) or its weight-3/2 companion
/// `vartheta_{M,mu}(z)` (`w = 1`): `sum_{n = mu (M)} n^w e^{pi i n^2 z/M}`.
pub fn theta_1d_num(m: i64, mu: i64, w: u8, z: Complex64, digits: u32) -> Complex64 {
    theta_sum(
        z,
        1.0 / m as f64,
        m as f64,
        mu.rem_euclid(m) as f64,
        w,
        digits,
    )
}

/// False theta `theta~_{M,mu}(tau)`, direct sum (no modular shortcut
/// exists for it; callers keep `Im tau` away from 0).
pub fn false_theta_1d_num(m: i64, mu: i64, tau: Complex64, digits: u32) -> Complex64 {
    let threshold = (digits as f64 + 3.0) * std::f64::consts::LN_10;
    let mf = m as f64;
    let mu = mu.rem_euclid(m) as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for dir in [1.0f64, -1.0] {
        let mut l = if dir > 0.0 { 0.0f64 } else { -1.0 };
        loop {
            let v = mu + mf * l;
            if PI * v * v / mf * tau.im > threshold && v * dir > 0.0 {
                break;
            }
            acc += sgn0(v) * (Complex64::new(0.0, PI * v * v / mf) * tau).exp();
            l += dir;
        }
    }
    acc
}

/// Deterministic tanh-sinh quadrature of a smooth complex integrand over
/// `[a, b]`, refined until two successive levels agree within `tol`
/// (relative to the magnitude of the result).
fn tanh_sinh<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: f64) -> (Complex64, f64) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |t: f64| -> Complex64 {
        let u = 0.5 * PI * t.sinh();
        let x = mid + half * u.tanh();
        let w = 0.5 * PI * t.cosh() / u.cosh().powi(2);
        if !w.is_finite() || w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        f(x) * w
    };
    let t_max = 4.5f64;
    let mut h = 1.0f64;
    let mut sum = eval(0.0);
    let mut k = 1.0;
    while k * h <= t_max {
        sum += eval(k * h) + eval(-k * h);
        k += 1.0;
    }
    let mut best = sum * half * h;
    let mut last_move = f64::INFINITY;
    for _ in 0..10 {
        h *= 0.5;
        let mut extra = Complex64::new(0.0, 0.0);
        let mut t = h;
        while t <= t_max {
            extra += eval(t) + eval(-t);
            t += 2.0 * h;
        }
        sum += extra;
        let next = sum * half * h;
        last_move = (next - best).norm();
        best = next;
        if last_move < tol * best.norm().max(1.0) {
            break;
        }
    }
    (best, last_move)
}

/// The Eichler integral of the weight-3/2 theta against the transformation
/// kernel:
///
/// ```text
/// (-i/sqrt(M)) int_0^{i inf} vartheta_{M,mu}(z) / sqrt(-i (z + 1/tau)) dz,
/// ```
///
/// the error term of the 1D false theta S-transformation. Parametrizing
/// `z = i y` turns this into an integral of `vartheta(iy)/sqrt(-i(iy +
/// 1/tau))` over `y > 0`, divided by `sqrt(M)`; the integrand vanishes to
/// all orders at `y = 0` (the dual sum has no constant term) and decays
/// like `e^{-pi mu^2 y/M}` at infinity.
pub fn eichler_integral_1d(
    m: i64,
    mu: i64,
    tau: Complex64,
    digits: u32,
) -> Result<Complex64, ModularError> {
    if tau.re == 0.0 {
        return Err(ModularError::PureImaginaryTau);
    }
    let inv_tau = tau.inv();
    let f = |y: f64| -> Complex64 {
        if y <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let th = theta_1d_num(m, mu, 1, Complex64::new(0.0, y), digits);
        if th.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let kernel = (Complex64::new(0.0, -1.0) * (Complex64::new(0.0, y) + inv_tau)).sqrt();
        th / kernel
    };
    let tol = 1e-9;
    let (low, move_low) = tanh_sinh(f, 0.0, 1.0, tol);
    // map [1, inf) to [0, 1): y = 1 + u/(1-u), dy = du/(1-u)^2
    let (high, move_high) = tanh_sinh(
        |u: f64| {
            let om = 1.0 - u;
            if om <= 1e-14 {
                return Complex64::new(0.0, 0.0);
            }
            let y = 1.0 + u / om;
            f(y) / (om * om)
        },
        0.0,
        1.0,
        tol,
    );
    let worst = move_low.max(move_high);
    if !worst.is_finite() || worst > 1e-6 {
        return Err(ModularError::QuadratureStalled(worst));
    }
    Ok((low + high) / (m as f64).sqrt())
}

/// Residual of the 1D S-transformation at `tau` (`Re tau != 0`):
///
/// ```text
/// | theta~_{M,mu}(-1/tau)
///   + sgn(Re tau) ((-i tau)^{1/2}/sqrt(M)) sum_nu e^{2 pi i mu nu/M} theta~_{M,nu}(tau)
///   - eichler_integral_1d(M, mu, tau) |.
/// ```
pub fn s_transform_1d_residual(
    m: i64,
    mu: i64,
    tau: Complex64,
    digits: u32,
) -> Result<f64, ModularError> {
    if tau.re == 0.0 {
        return Err(ModularError::PureImaginaryTau);
    }
    let lhs1 = false_theta_1d_num(m, mu, -tau.inv(), digits);
    let root = (Complex64::new(0.0, -1.0) * tau).sqrt();
    let mut transform = Complex64::new(0.0, 0.0);
    for nu in 0..m {
        let phase = Complex64::from_polar(1.0, TWO_PI * (mu * nu).rem_euclid(m) as f64 / m as f64);
        transform += phase * false_theta_1d_num(m, nu, tau, digits);
    }
    let lhs = lhs1 + tau.re.signum() * root / (m as f64).sqrt() * transform;
    let rhs = eichler_integral_1d(m, mu, tau, digits)?;
    Ok((lhs - rhs).norm())
}

/// Rational coordinate data of a dual vector `nu = 1/2 A^{-1} v`, as used
/// by the bivariate theta evaluators: the coordinate offsets and the
/// residues driving the two quadratic progressions.
#[derive(Debug, Clone, Copy)]
struct DualCoords {
    /// first and second coordinates of nu (exact numerators over 2 det A)
    a1: f64,
    a2: f64,
    /// B(e2, nu) = v2/2 and B(e1, nu) = v1/2
    delta1: f64,
    delta2: f64,
}

impl DualCoords {
    fn of(lat: &LatticeData, v: (i64, i64)) -> Self {
        let p = lat.p as i64;
        let d = (2 * lat.det()) as f64;
        DualCoords {
            a1: (3 * v.0 - 2 * v.1) as f64 / d,
            a2: (-2 * v.0 + (2 * p + 1) * v.1) as f64 / d,
            delta1: v.1 as f64 / 2.0,
            delta2: v.0 as f64 / 2.0,
        }
    }
}

/// `g_{mu,c}(tau, z) = sum_{n in L + mu} B(n, c) e^{pi i z B(n,c)^2}
/// e^{2 pi i tau Q_c(n)}`, evaluated through its split into at most
/// `2p + 1` products of one-dimensional theta sums. Fixing the residue `r`
/// of the lattice coordinate that `B(., c)` reads, the `B`-values run over
/// an arithmetic progression (weight-3/2 sum in `z`) and the complementary
/// `Q_c`-values over another (weight-1/2 sum in `2 tau`); the two are
/// independent, so `g` factors class by class.
pub fn g_bivariate_vm(
    lat: &LatticeData,
    v: (i64, i64),
    c: CVector,
    tau: Complex64,
    z: Complex64,
    digits: u32,
) -> Complex64 {
    let p = lat.p as i64;
    let det = lat.det() as f64;
    let co = DualCoords::of(lat, v);
    let (classes, kappa_sq, step_v, offset_v, q_den, delta) = match c {
        CVector::C1 => (3i64, det / 3.0, 6.0, co.a1, 6.0, co.delta1),
        CVector::C2 => (
            2 * p + 1,
            det / (2 * p + 1) as f64,
            2.0 * (2 * p + 1) as f64,
            co.a2,
            2.0 * (2 * p + 1) as f64,
            co.delta2,
        ),
    };
    let kappa = kappa_sq.sqrt();
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 0..classes {
        let weighted = theta_sum(z, kappa_sq, step_v, offset_v + 2.0 * r as f64, 1, digits);
        let gaussian = theta_sum(
            2.0 * tau,
            1.0 / q_den,
            q_den,
            (delta + 4.0 * r as f64).rem_euclid(q_den),
            0,
            digits,
        );
        acc += weighted * gaussian;
    }
    kappa * acc
}

/// [`g_bivariate_vm`] addressed by a [`MuVector`].
pub fn g_bivariate(
    lat: &LatticeData,
    mu: &MuVector,
    c: CVector,
    tau: Complex64,
    z: Complex64,
    digits: u32,
) -> Complex64 {
    g_bivariate_vm(lat, (mu.m1, mu.m2), c, tau, z, digits)
}

/// Direct double lattice sum for `g`, truncated when both exponential
/// factors drop below the digit threshold; the cross-check oracle for the
/// factored evaluator.
pub fn g_bivariate_direct(
    lat: &LatticeData,
    mu: &MuVector,
    c: CVector,
    tau: Complex64,
    z: Complex64,
    digits: u32,
) -> Complex64 {
    let p = lat.p as i64;
    let det = lat.det() as f64;
    let co = DualCoords::of(lat, (mu.m1, mu.m2));
    let threshold = (digits as f64 + 3.0) * std::f64::consts::LN_10;
    let (kappa_sq, q_den) = match c {
        CVector::C1 => (det / 3.0, 6.0),
        CVector::C2 => (det / (2 * p + 1) as f64, 2.0 * (2 * p + 1) as f64),
    };
    let kappa = kappa_sq.sqrt();
    let v_cap = (threshold / (PI * kappa_sq * z.im)).sqrt() + 3.0;
    let u_cap = (threshold * q_den / (TWO_PI * tau.im)).sqrt() + 3.0;
    let k1_cap = (v_cap / 2.0).ceil() as i64 + 2;
    let mut acc = Complex64::new(0.0, 0.0);
    // enumerate k so that both 2k + mu coordinates stay within caps
    let k2_cap = match c {
        CVector::C1 => ((u_cap + v_cap * 2.0) / 2.0).ceil() as i64 + 2,
        CVector::C2 => ((u_cap + v_cap * (2 * p + 1) as f64) / 2.0).ceil() as i64 + 2,
    };
    let (outer_cap, inner_cap) = (k1_cap.max(k2_cap), k1_cap.max(k2_cap));
    for k1 in -outer_cap..=outer_cap {
        for k2 in -inner_cap..=inner_cap {
            let x1 = 2.0 * k1 as f64 + co.a1;
            let x2 = 2.0 * k2 as f64 + co.a2;
            let (b, qc) = match c {
                CVector::C1 => (kappa * x1, (2.0 * x1 + 3.0 * x2).powi(2) / 6.0),
                CVector::C2 => (
                    kappa * x2,
                    ((2 * p + 1) as f64 * x1 + 2.0 * x2).powi(2) / (2.0 * (2 * p + 1) as f64),
                ),
            };
            if PI * b * b * z.im > threshold || TWO_PI * qc * tau.im > threshold {
                continue;
            }
            acc += b
                * (Complex64::new(0.0, PI * b * b) * z).exp()
                * (Complex64::new(0.0, TWO_PI * qc) * tau).exp();
        }
    }
    acc
}

/// Direct numeric rank-two false theta `theta~^{(2)}_{mu,c}(tau)`.
pub fn false_theta_2d_num(
    lat: &LatticeData,
    mu: &MuVector,
    c: CVector,
    tau: Complex64,
    digits: u32,
) -> Complex64 {
    let p = lat.p as f64;
    let co = DualCoords::of(lat, (mu.m1, mu.m2));
    let threshold = (digits as f64 + 3.0) * std::f64::consts::LN_10;
    // Q(x) >= lambda_min |x|^2 / 2
    let lambda_min = (2.0 * p + 4.0 - ((2.0 * p - 2.0).powi(2) + 16.0).sqrt()) / 2.0;
    let r_cap = (threshold / (PI * lambda_min * tau.im)).sqrt() + 3.0;
    let cap = (r_cap / 2.0).ceil() as i64 + 2;
    let mut acc = Complex64::new(0.0, 0.0);
    for k1 in -cap..=cap {
        for k2 in -cap..=cap {
            let x1 = 2.0 * k1 as f64 + co.a1;
            let x2 = 2.0 * k2 as f64 + co.a2;
            let q = (p + 0.5) * x1 * x1 + 2.0 * x1 * x2 + 1.5 * x2 * x2;
            if TWO_PI * q * tau.im > threshold {
                continue;
            }
            let sign = match c {
                CVector::C1 => sgn0(x1),
                CVector::C2 => sgn0(x2),
            };
            acc += sign * (Complex64::new(0.0, TWO_PI * q) * tau).exp();
        }
    }
    acc
}

/// Representatives of `L*/L` in integer `(m1, m2)` coordinates, i.e. of
/// `Z^2 / 4A Z^2`, enumerated from the column Hermite form of `4A`. The
/// group order, asserted against the Smith form, is `det(4A) = 16(6p-1)`.
pub fn dual_coset_reps(lat: &LatticeData) -> Vec<(i64, i64)> {
    let p = lat.p as i64;
    // columns of 4A
    let (c1, c2) = ((4 * (2 * p + 1), 8), (8, 12));
    let (h11, h21, h22) = column_hermite(c1, c2);
    let (d1, d2) = smith_diagonal(c1, c2);
    assert_eq!(
        d1 * d2,
        16 * lat.det(),
        "Smith form must give |L*/L| = 16(6p-1)"
    );
    assert_eq!(h11 * h22, 16 * lat.det());
    let _ = h21;
    let mut reps = Vec::with_capacity((h11 * h22) as usize);
    for i in 0..h11 {
        for j in 0..h22 {
            reps.push((i, j));
        }
    }
    reps
}

/// Column Hermite normal form of the 2x2 integer matrix with the given
/// columns: returns `(h11, h21, h22)` with the lattice equal to
/// `span{(h11, h21), (0, h22)}`.
fn column_hermite(mut c1: (i64, i64), mut c2: (i64, i64)) -> (i64, i64, i64) {
    // euclidean column reduction on the top row
    while c2.0 != 0 {
        let q = c1.0.div_euclid(c2.0);
        c1 = (c1.0 - q * c2.0, c1.1 - q * c2.1);
        std::mem::swap(&mut c1, &mut c2);
    }
    // now c2.0 == 0; normalize signs
    if c1.0 < 0 {
        c1 = (-c1.0, -c1.1);
    }
    if c2.1 < 0 {
        c2 = (0, -c2.1);
    }
    let h22 = c2.1;
    let h21 = if h22 != 0 { c1.1.rem_euclid(h22) } else { c1.1 };
    (c1.0, h21, h22)
}

/// Smith normal form diagonal `(d1, d2)` of the matrix with the given
/// columns; `d1 | d2`.
fn smith_diagonal(c1: (i64, i64), c2: (i64, i64)) -> (i64, i64) {
    let g = c1.0.gcd(&c1.1).gcd(&c2.0.gcd(&c2.1));
    let det = (c1.0 * c2.1 - c1.1 * c2.0).abs();
    (g, det / g)
}

/// `B(mu, nu) mod 1` for dual vectors given by integer coordinate pairs:
/// `B = (m1 (3 v1 - 2 v2) + m2 (-2 v1 + (2p+1) v2)) / (4(6p-1))`.
fn dual_pairing_fraction(lat: &LatticeData, m: (i64, i64), v: (i64, i64)) -> Rational64 {
    let p = lat.p as i64;
    let num = m.0 * (3 * v.0 - 2 * v.1) + m.1 * (-2 * v.0 + (2 * p + 1) * v.1);
    let den = 4 * lat.det();

    Rational64::new(num.rem_euclid(den), den)
}

/// Residual of the modular property of `g` at `(tau, z)`:
///
/// ```text
/// | g_{mu,c}(-1/tau, -1/z)
///   - (-i (-i tau)^{1/2} (-i z)^{3/2} / (vol(R^2/L) sqrt(det A)))
///     sum_{nu in L*/L} e^{2 pi i B(nu, mu)} g_{nu,c}(tau, z) |,
/// ```
///
/// with `vol(R^2/L) = 4`.
pub fn modular_g_residual(
    lat: &LatticeData,
    mu: &MuVector,
    c: CVector,
    tau: Complex64,
    z: Complex64,
    digits: u32,
) -> f64 {
    let lhs = g_bivariate(lat, mu, c, -tau.inv(), -z.inv(), digits);
    let mut sum = Complex64::new(0.0, 0.0);
    for v in dual_coset_reps(lat) {
        let frac = dual_pairing_fraction(lat, (mu.m1, mu.m2), v);
        let phase =
            Complex64::from_polar(1.0, TWO_PI * *frac.numer() as f64 / *frac.denom() as f64);
        sum += phase * g_bivariate_vm(lat, v, c, tau, z, digits);
    }
    let mi = Complex64::new(0.0, -1.0);
    let factor =
        mi * (mi * tau).sqrt() * (mi * z).sqrt().powi(3) / (4.0 * (lat.det() as f64).sqrt());
    (lhs - factor * sum).norm()
}

/// Residual of the Eichler-integral representation
/// `theta~^{(2)}_{mu,c}(tau) = -i int_tau^{i inf} g_{mu,c}(tau, z)
/// / sqrt(-i(z - tau)) dz`; the substitution `z = tau + i s^2` reduces the
/// right side to `2 int_0^inf g(tau, tau + i s^2) ds`.
pub fn eichler_representation_2d_residual(
    lat: &LatticeData,
    mu: &MuVector,
    c: CVector,
    tau: Complex64,
    digits: u32,
) -> Result<f64, ModularError> {
    let series = false_theta_2d_num(lat, mu, c, tau, digits);
    let integral = eichler_leg_up(lat, (mu.m1, mu.m2), c, tau, digits)?;
    Ok((series - integral).norm())
}

/// `2 int_0^inf g(tau, tau + i s^2) ds = -i int_tau^{i inf} g / sqrt(-i(z-tau)) dz`.
fn eichler_leg_up(
    lat: &LatticeData,
    v: (i64, i64),
    c: CVector,
    tau: Complex64,
    digits: u32,
) -> Result<Complex64, ModularError> {
    let f = |s: f64| -> Complex64 {
        if s <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        g_bivariate_vm(lat, v, c, tau, tau + Complex64::new(0.0, s * s), digits)
    };
    let tol = 1e-9;
    let (low, m_low) = tanh_sinh(f, 0.0, 1.0, tol);
    let (high, m_high) = tanh_sinh(
        |u: f64| {
            let om = 1.0 - u;
            if om <= 1e-14 {
                return Complex64::new(0.0, 0.0);
            }
            f(1.0 + u / om) / (om * om)
        },
        0.0,
        1.0,
        tol,
    );
    let worst = m_low.max(m_high);
    if !worst.is_finite() || worst > 1e-6 {
        return Err(ModularError::QuadratureStalled(worst));
    }
    Ok(2.0 * (low + high))
}

/// `int_0^tau g_nu(tau, z)/sqrt(-i(z - tau)) dz` along the straight
/// segment, via `z = tau (1 - s^2)`:
/// `(2 tau / sqrt(i tau)) int_0^1 g(tau, tau(1 - s^2)) ds`.
fn transform_leg_to_zero(
    lat: &LatticeData,
    v: (i64, i64),
    c: CVector,
    tau: Complex64,
    digits: u32,
) -> Result<Complex64, ModularError> {
    let f = |s: f64| -> Complex64 {
        let scale = 1.0 - s * s;
        if scale <= 1e-14 {
            return Complex64::new(0.0, 0.0);
        }
        g_bivariate_vm(lat, v, c, tau, tau * scale, digits)
    };
    let (val, moved) = tanh_sinh(f, 0.0, 1.0, 1e-9);
    if !moved.is_finite() || moved > 1e-6 {
        return Err(ModularError::QuadratureStalled(moved));
    }
    Ok(2.0 * tau / (Complex64::new(0.0, 1.0) * tau).sqrt() * val)
}

/// Residual of the rank-two S-transformation at `tau` (`Re tau != 0`):
///
/// ```text
/// | (-i tau)^{-1} theta~^{(2)}_{mu,c}(-1/tau)
///   + (i sgn(Re tau)/(4 sqrt(det A))) sum_{nu in L*/L} e^{2 pi i B(mu,nu)}
///     int_0^tau g_nu(tau, z)/sqrt(-i(z - tau)) dz |.
/// ```
pub fn verify_s_transform_2d(
    lat: &LatticeData,
    mu: &MuVector,
    c: CVector,
    tau: Complex64,
    digits: u32,
) -> Result<f64, ModularError> {
    if tau.re == 0.0 {
        return Err(ModularError::PureImaginaryTau);
    }
    let mi = Complex64::new(0.0, -1.0);
    let lhs = false_theta_2d_num(lat, mu, c, -tau.inv(), digits) / (mi * tau);
    let mut sum = Complex64::new(0.0, 0.0);
    for v in dual_coset_reps(lat) {
        let frac = dual_pairing_fraction(lat, (mu.m1, mu.m2), v);
        let phase =
            Complex64::from_polar(1.0, TWO_PI * *frac.numer() as f64 / *frac.denom() as f64);
        sum += phase * transform_leg_to_zero(lat, v, c, tau, digits)?;
    }
    let rhs = -Complex64::new(0.0, tau.re.signum()) / (4.0 * (lat.det() as f64).sqrt()) * sum;
    Ok((lhs - rhs).norm())
}

/// Residual of the companion identity with the full `0 -> i inf` path
/// routed through `tau` (left of the branch cut `{tau - iu : u > 0}`):
///
/// ```text
/// | (-i tau)^{-1} theta~^{(2)}_{mu,c}(-1/tau)
///   + (sgn(Re tau)/(4 sqrt(det A))) sum_nu e^{2 pi i B(mu,nu)} theta~^{(2)}_{nu,c}(tau)
///   + (i sgn(Re tau)/(4 sqrt(det A))) sum_nu e^{2 pi i B(mu,nu)}
///     int_{0 -> tau -> i inf} g_nu(tau, z)/sqrt(-i(z - tau)) dz |.
/// ```
pub fn verify_s_transform_2d_full_path(
    lat: &LatticeData,
    mu: &MuVector,
    c: CVector,
    tau: Complex64,
    digits: u32,
) -> Result<f64, ModularError> {
    if tau.re == 0.0 {
        return Err(ModularError::PureImaginaryTau);
    }
    let mi = Complex64::new(0.0, -1.0);
    let mut lhs = false_theta_2d_num(lat, mu, c, -tau.inv(), digits) / (mi * tau);
    let norm = 1.0 / (4.0 * (lat.det() as f64).sqrt());
    let mut integrals = Complex64::new(0.0, 0.0);
    for v in dual_coset_reps(lat) {
        let frac = dual_pairing_fraction(lat, (mu.m1, mu.m2), v);
        let phase =
            Complex64::from_polar(1.0, TWO_PI * *frac.numer() as f64 / *frac.denom() as f64);
        // theta~^{(2)}_{nu,c}(tau) summand on the left
        let mv = MuVector::new(v.0, v.1);
        lhs += tau.re.signum() * norm * phase * false_theta_2d_num(lat, &mv, c, tau, digits);
        // both legs of the deformed path on the right; the upward leg is
        // i times the Eichler representation integral
        let to_zero = transform_leg_to_zero(lat, v, c, tau, digits)?;
        let upward = Complex64::new(0.0, 1.0) * eichler_leg_up(lat, v, c, tau, digits)?;
        integrals += phase * (to_zero + upward);
    }
    let rhs = -Complex64::new(0.0, tau.re.signum()) * norm * integrals;
    Ok((lhs - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::{eta_series, ord};

    const D: u32 = 15;

    #[test]
    fn eval_constant_series() {
        let one = QExpansion::one(ord(10));
        let pt = EvalPoint::new(Complex64::new(0.3, 0.8)).unwrap();
        let out = eval_qexpansion(&one, &pt);
        assert!((out.value - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(EvalPoint::new(Complex64::new(0.3, -1.0)).is_err());
    }

    #[test]
    fn eval_eta_at_i_matches_product() {
        let eta = eta_series(ord(40)).unwrap();
        let pt = EvalPoint::new(Complex64::new(0.0, 1.0)).unwrap();
        let out = eval_qexpansion(&eta, &pt);
        // direct: e^{-pi/12} prod (1 - e^{-2 pi n})
        let mut direct = (-std::f64::consts::PI / 12.0).exp();
        for n in 1..40 {
            direct *= 1.0 - (-TWO_PI * n as f64).exp();
        }
        assert!(
            (out.value.re - direct).abs() < 1e-12,
            "{} vs {direct}",
            out.value.re
        );
        assert!(out.value.im.abs() < 1e-14);
        assert!(out.tail_bound < 1e-12);
    }

    #[test]
    fn eval_theta_series_matches_lattice_sum() {
        let s = crate::falsetheta::theta_1d(2, 0, crate::falsetheta::ThetaWeight::Half, ord(30));
        let tau = Complex64::new(0.0, 2.0);
        let pt = EvalPoint::new(tau).unwrap();
        let out = eval_qexpansion(&s, &pt);
        let direct = theta_1d_num(2, 0, 0, tau, D);
        assert!((out.value - direct).norm() < 1e-12);
    }

    #[test]
    fn theta_sum_direct_and_dual_agree() {
        // pick z where both sides converge quickly and compare
        for w in [0u8, 1] {
            for (c, a, beta) in [
                (1.0 / 12.0, 12.0, 1.0),
                (5.0 / 3.0, 6.0, 0.3),
                (0.1, 2.0, 0.7),
            ] {
                let z = Complex64::new(0.21, 0.9);
                let direct = {
                    // force the direct branch by inflating Im z in the rate
                    // comparison: evaluate via the formula by hand
                    let threshold = (D as f64 + 3.0) * std::f64::consts::LN_10;
                    let mut acc = Complex64::new(0.0, 0.0);
                    for dir in [1.0f64, -1.0] {
                        let mut l = if dir > 0.0 { 0.0f64 } else { -1.0 };
                        loop {
                            let v = beta + a * l;
                            if PI * c * v * v * z.im > threshold && v * dir > 0.0 {
                                break;
                            }
                            let wgt = if w == 0 { 1.0 } else { v };
                            acc += wgt * (Complex64::new(0.0, PI * c * v * v) * z).exp();
                            l += dir;
                        }
                    }
                    acc
                };
                // dual branch triggers at small Im z; same value must come out
                // at the same z through the public entry regardless of branch
                let auto = theta_sum(z, c, a, beta, w, D);
                assert!(
                    (direct - auto).norm() < 1e-12,
                    "w={w} c={c}: {direct} vs {auto}"
                );
                // and a genuinely small-Im point evaluated both ways
                let z_small = Complex64::new(0.17, 0.004);
                let dual = theta_sum(z_small, c, a, beta, w, D);
                let brute = {
                    let mut acc = Complex64::new(0.0, 0.0);
                    let bound =
                        ((D as f64 + 3.0) * std::f64::consts::LN_10 / (PI * c * z_small.im)).sqrt();
                    let mut l = -((bound + beta.abs()) / a).ceil();
                    while beta + a * l <= bound + a {
                        let v = beta + a * l;
                        let wgt = if w == 0 { 1.0 } else { v };
                        acc += wgt * (Complex64::new(0.0, PI * c * v * v) * z_small).exp();
                        l += 1.0;
                    }
                    acc
                };
                assert!(
                    (dual - brute).norm() < 1e-9 * (1.0 + brute.norm()),
                    "w={w} c={c} small-Im: {dual} vs {brute}"
                );
            }
        }
    }

    #[test]
    fn theta2d_series_eval_matches_direct_sum() {
        // the exact truncated series, evaluated as a q-expansion, agrees
        // with the direct numeric lattice sum at five points with
        // Im tau >= 1/2
        let lat = LatticeData::new(1);
        let mu = MuVector::new(1, 1);
        let taus = [
            Complex64::new(0.13, 0.52),
            Complex64::new(-0.41, 0.73),
            Complex64::new(0.29, 0.95),
            Complex64::new(0.61, 0.58),
            Complex64::new(-0.07, 1.31),
        ];
        for c in [CVector::C1, CVector::C2] {
            let series = crate::falsetheta::false_theta_2d(&lat, &mu, c, crate::qseries::ord(40));
            for tau in taus {
                let pt = EvalPoint::new(tau).unwrap();
                let via_series = eval_qexpansion(&series, &pt);
                let direct = false_theta_2d_num(&lat, &mu, c, tau, D);
                assert!(via_series.tail_bound < 1e-10);
                assert!(
                    (via_series.value - direct).norm() < 1e-9,
                    "{c:?} at {tau}: {} vs {direct}",
                    via_series.value
                );
            }
        }
    }

    #[test]
    fn s_transform_1d_residuals() {
        let tau = Complex64::new(1.0 / 3.0, 0.2);
        let r = s_transform_1d_residual(12, 1, tau, D).unwrap();
        assert!(r < 1e-6, "residual {r:e}");
        // sign flip across Re(tau) = 0
        let r = s_transform_1d_residual(12, 1, Complex64::new(-1.0 / 3.0, 0.2), D).unwrap();
        assert!(r < 1e-6, "residual {r:e}");
        assert!(matches!(
            s_transform_1d_residual(12, 1, Complex64::new(0.0, 0.2), D),
            Err(ModularError::PureImaginaryTau)
        ));
    }

    #[test]
    fn g_factored_matches_direct() {
        let lat = LatticeData::new(1);
        let mu = MuVector::new(1, 1);
        for c in [CVector::C1, CVector::C2] {
            for (tau, z) in [
                (Complex64::new(0.2, 0.6), Complex64::new(-0.1, 0.8)),
                (Complex64::new(0.0, 0.5), Complex64::new(0.0, 0.5)),
            ] {
                let a = g_bivariate(&lat, &mu, c, tau, z, D);
                let b = g_bivariate_direct(&lat, &mu, c, tau, z, D);
                assert!(
                    (a - b).norm() < 1e-9 * (1.0 + b.norm()),
                    "{c:?}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn g_antisymmetry_in_mu() {
        let lat = LatticeData::new(1);
        let tau = Complex64::new(0.1, 0.7);
        let z = Complex64::new(-0.2, 0.5);
        for c in [CVector::C1, CVector::C2] {
            let plus = g_bivariate(&lat, &MuVector::new(1, 1), c, tau, z, D);
            let minus = g_bivariate(&lat, &MuVector::new(-1, -1), c, tau, z, D);
            assert!((plus + minus).norm() < 1e-12, "{c:?}");
        }
    }

    #[test]
    fn coset_representatives() {
        for p in 1..=3u32 {
            let lat = LatticeData::new(p);
            let reps = dual_coset_reps(&lat);
            assert_eq!(reps.len() as i64, 16 * lat.det());
        }
    }

    #[test]
    fn modular_g_identity() {
        let lat = LatticeData::new(1);
        let mu = MuVector::new(1, 1);
        let tau = Complex64::new(0.0, 0.5);
        let z = Complex64::new(0.0, 0.5);
        for c in [CVector::C1, CVector::C2] {
            let r = modular_g_residual(&lat, &mu, c, tau, z, D);
            assert!(r < 1e-6, "{c:?}: residual {r:e}");
        }
        // off-axis points
        let r = modular_g_residual(
            &lat,
            &mu,
            CVector::C1,
            Complex64::new(0.15, 0.65),
            Complex64::new(-0.1, 0.75),
            D,
        );
        assert!(r < 1e-6, "residual {r:e}");
    }

    #[test]
    fn eichler_representation_of_theta2d() {
        let lat = LatticeData::new(1);
        let mu = MuVector::new(1, 1);
        let tau = Complex64::new(0.2, 0.8);
        for c in [CVector::C1, CVector::C2] {
            let r = eichler_representation_2d_residual(&lat, &mu, c, tau, D).unwrap();
            assert!(r < 1e-6, "{c:?}: residual {r:e}");
        }
    }

    #[test]
    fn s_transform_2d_residuals() {
        let lat = LatticeData::new(1);
        let mu = MuVector::new(1, 1);
        let tau = Complex64::new(1.0 / 3.0, 0.25);
        for c in [CVector::C1, CVector::C2] {
            let r = verify_s_transform_2d(&lat, &mu, c, tau, D).unwrap();
            assert!(r < 1e-5, "{c:?}: residual {r:e}");
        }
        // sign term flips consistently across Re(tau) = 0
        let r = verify_s_transform_2d(&lat, &mu, CVector::C1, Complex64::new(-1.0 / 3.0, 0.25), D)
            .unwrap();
        assert!(r < 1e-5, "residual {r:e}");
        // far in the upper half plane: faster convergence, tighter residual
        let r = verify_s_transform_2d(&lat, &mu, CVector::C1, Complex64::new(1.0 / 3.0, 2.0), D)
            .unwrap();
        assert!(r < 1e-8, "residual {r:e}");
        assert!(matches!(
            verify_s_transform_2d(&lat, &mu, CVector::C1, Complex64::new(0.0, 0.5), D),
            Err(ModularError::PureImaginaryTau)
        ));
    }

    #[test]
    fn s_transform_2d_full_path() {
        let lat = LatticeData::new(1);
        let mu = MuVector::new(1, 1);
        let tau = Complex64::new(1.0 / 3.0, 0.5);
        let r = verify_s_transform_2d_full_path(&lat, &mu, CVector::C1, tau, D).unwrap();
        assert!(r < 1e-5, "residual {r:e}");
    }

    #[test]
    fn quadrature_is_deterministic() {
        let lat = LatticeData::new(1);
        let mu = MuVector::new(1, 1);
        let tau = Complex64::new(1.0 / 3.0, 0.25);
        let a = verify_s_transform_2d(&lat, &mu, CVector::C1, tau, D).unwrap();
        let b = verify_s_transform_2d(&lat, &mu, CVector::C1, tau, D).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
