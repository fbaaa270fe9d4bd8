//! Positive zeros `alpha_mn` of `J_m`.
//!
//! Consecutive zeros of `J_m` are never closer than 3.11 (the first gap of
//! `J_0`) and approach a spacing of pi from either side, so stepping by pi/4
//! from the previous zero brackets exactly one sign change at a time. Each
//! bracket is then bisected down to adjacent floating-point numbers.

use super::bessel::{j, BesselOrder};
use crate::error::{Error, Result};

/// Index `n >= 1` of the n-th positive zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RootIndex(u32);

impl RootIndex {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("root index must be >= 1"));
        }
        Ok(RootIndex(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl TryFrom<u32> for RootIndex {
    type Error = Error;

    fn try_from(n: u32) -> Result<Self> {
        RootIndex::new(n)
    }
}

const SCAN_STEP: f64 = std::f64::consts::FRAC_PI_4;

/// Returns the n-th positive zero of `J_m`.
pub fn bessel_root(order: BesselOrder, index: RootIndex) -> f64 {
    bessel_roots(order, index.get() as usize)
        .pop()
        .expect("index >= 1 yields at least one root")
}

/// Returns the first `count` positive zeros of `J_m` in increasing order.
pub fn bessel_roots(order: BesselOrder, count: usize) -> Vec<f64> {
    let m = order.get();
    let mut roots = Vec::with_capacity(count);
    // j_{m,1} > m, and J_m(m) > 0 for m >= 1; J_0(0) = 1.
    let mut lo = m as f64;
    let mut f_lo = j(m, lo);
    while roots.len() < count {
        let hi = lo + SCAN_STEP;
        let f_hi = j(m, hi);
        if f_hi == 0.0 {
            roots.push(hi);
            lo = hi + 1e-9;
            f_lo = j(m, lo);
            continue;
        }
        if f_lo.signum() != f_hi.signum() {
            let r = bisect(m, lo, hi, f_lo);
            roots.push(r);
            lo = r + 1e-9 * r.max(1.0);
            f_lo = j(m, lo);
            // the next zero is at least ~3 away; skip ahead a little
            if f_lo == 0.0 {
                lo += SCAN_STEP;
                f_lo = j(m, lo);
            }
        } else {
            lo = hi;
            f_lo = f_hi;
        }
    }
    roots
}

fn bisect(m: u32, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    loop {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = j(m, mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    // pick whichever endpoint is closer to the zero
    if j(m, a).abs() <= j(m, b).abs() {
        a
    } else {
        b
    }
}
