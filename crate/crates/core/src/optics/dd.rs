//! Double-double helpers for the cavity kernel.
//!
//! Addition, subtraction and multiplication come from `twofloat`. Division,
//! square root and the elementary functions are done here: twofloat's
//! `TwoFloat / TwoFloat` forms its residual without a fused multiply-add and
//! its `exp` is only accurate to a few parts in 1e18, which is not enough to
//! resolve absorption losses of order 1e-12 inside O(1) amplitudes.

use num_complex::Complex;
use twofloat::TwoFloat;

pub(crate) type Dd = TwoFloat;
pub(crate) type Cdd = Complex<TwoFloat>;

const HALF_PI: Dd = TwoFloat::from_f64(std::f64::consts::FRAC_PI_2);
const HALF_PI_LO: f64 = 6.123_233_995_736_766e-17;
const LN2_HI: f64 = std::f64::consts::LN_2;
const LN2_LO: f64 = 2.319_046_813_846_299_6e-17;

pub(crate) fn dd(x: f64) -> Dd {
    TwoFloat::from(x)
}

pub(crate) fn half_pi() -> Dd {
    HALF_PI + HALF_PI_LO
}

pub(crate) fn pi() -> Dd {
    half_pi() * 2.0
}

/// `a / b` to about 1e-32 relative.
pub(crate) fn div(a: Dd, b: Dd) -> Dd {
    let q0 = a.hi() / b.hi();
    let r = a - b * q0;
    let q1 = r.hi() / b.hi();
    let r = r - b * q1;
    let q2 = r.hi() / b.hi();
    TwoFloat::new_add(q0, q1) + q2
}

pub(crate) fn recip(b: Dd) -> Dd {
    div(dd(1.0), b)
}

pub(crate) fn sqrt(a: Dd) -> Dd {
    let y = a.hi().sqrt();
    if y == 0.0 {
        return dd(0.0);
    }
    let r = a - TwoFloat::new_mul(y, y);
    TwoFloat::new_add(y, r.hi() / (2.0 * y))
}

/// Sums `first + next(first, 1) + next(next(first, 1), 2) + ...` until a
/// term drops below 1e-34 of the running sum.
fn series(first: Dd, mut next: impl FnMut(Dd, u32) -> Dd) -> Dd {
    let mut term = first;
    let mut sum = first;
    let mut k = 1;
    loop {
        term = next(term, k);
        sum += term;
        if term.hi().abs() <= 1e-34 * sum.hi().abs() || k > 60 {
            return sum;
        }
        k += 1;
    }
}

/// `(sin x, cos x)` after reduction modulo pi/2.
pub(crate) fn sin_cos(x: Dd) -> (Dd, Dd) {
    let n = (x.hi() / std::f64::consts::FRAC_PI_2).round();
    let r = x - half_pi() * n;
    let r2 = r * r;
    let s = series(r, |t, k| -(t * r2) / ((2 * k) as f64 * (2 * k + 1) as f64));
    let c = series(dd(1.0), |t, k| {
        -(t * r2) / ((2 * k - 1) as f64 * (2 * k) as f64)
    });
    match (n as i64).rem_euclid(4) {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}

/// `exp x`, reduced by multiples of ln 2 and then by 2^-8. The squarings
/// act on `exp(r) - 1` so that arguments near zero keep full precision.
pub(crate) fn exp(x: Dd) -> Dd {
    let n = (x.hi() / LN2_HI).round();
    let r = x - TwoFloat::new_mul(n, LN2_HI) - n * LN2_LO;
    let r = r * (1.0 / 256.0);
    let mut m = series(r, |t, k| (t * r) / (k + 1) as f64);
    for _ in 0..8 {
        m = m * 2.0 + m * m;
    }
    (m + 1.0) * 2f64.powi(n as i32)
}

/// `(sinh y, cosh y)`; small arguments use the series to avoid cancellation.
pub(crate) fn sinh_cosh(y: Dd) -> (Dd, Dd) {
    if y.hi().abs() < 0.5 {
        let y2 = y * y;
        let s = series(y, |t, k| (t * y2) / ((2 * k) as f64 * (2 * k + 1) as f64));
        let c = series(dd(1.0), |t, k| {
            (t * y2) / ((2 * k - 1) as f64 * (2 * k) as f64)
        });
        (s, c)
    } else {
        let e = exp(y);
        let ei = recip(e);
        ((e - ei) * 0.5, (e + ei) * 0.5)
    }
}

pub(crate) fn cplx(re: Dd, im: Dd) -> Cdd {
    Complex::new(re, im)
}

pub(crate) fn creal(x: f64) -> Cdd {
    cplx(dd(x), dd(0.0))
}

pub(crate) fn norm_sqr(z: Cdd) -> Dd {
    z.re * z.re + z.im * z.im
}

pub(crate) fn cdiv(a: Cdd, b: Cdd) -> Cdd {
    let inv = recip(norm_sqr(b));
    let num = a * b.conj();
    cplx(num.re * inv, num.im * inv)
}

/// `(sin z, cos z)` for complex `z`.
pub(crate) fn csin_ccos(z: Cdd) -> (Cdd, Cdd) {
    let (s, c) = sin_cos(z.re);
    let (sh, ch) = sinh_cosh(z.im);
    (cplx(s * ch, c * sh), cplx(c * ch, -(s * sh)))
}

/// `exp(i phi)`.
pub(crate) fn cis(phi: Dd) -> Cdd {
    let (s, c) = sin_cos(phi);
    cplx(c, s)
}

pub(crate) fn to_c64(z: Cdd) -> Complex<f64> {
    Complex::new(z.re.hi() + z.re.lo(), z.im.hi() + z.im.lo())
}
