//! Double-double evaluation of the slab coefficients and cavity transmission.

use super::dd::{self, cdiv, cis, cplx, creal, csin_ccos, norm_sqr, Cdd, Dd};
use super::{CavityConfig, OpticalSlab};

pub(crate) struct SlabCoefficientsDd {
    pub r_d: Cdd,
    pub t_d: Cdd,
    pub beta: Cdd,
}

/// The slab coefficients share the denominator
/// `den = 2 i n cos(beta) + (n^2 + 1) sin(beta)`, which [`SlabTerms`] keeps
/// separate so the cavity kernel can clear it without a complex division.
pub(crate) struct SlabTerms {
    pub beta: Cdd,
    pub den: Cdd,
    /// `(n^2 - 1) sin(beta)` times the roughness factor.
    pub r_num: Cdd,
}

pub(crate) struct SlabKernel {
    n: Cdd,
    n2_minus_1: Cdd,
    n2_plus_1: Cdd,
    two_i_n: Cdd,
    thickness: f64,
    roughness: f64,
}

impl SlabKernel {
    pub fn new(slab: &OpticalSlab) -> Self {
        let n = cplx(dd::dd(slab.n_real), dd::dd(slab.n_imag));
        let n2 = n * n;
        SlabKernel {
            n,
            n2_minus_1: n2 - creal(1.0),
            n2_plus_1: n2 + creal(1.0),
            two_i_n: cplx(-(n.im * 2.0), n.re * 2.0),
            thickness: slab.thickness,
            roughness: slab.roughness,
        }
    }

    pub fn terms(&self, k: Dd) -> SlabTerms {
        let kd = k * self.thickness;
        let beta = cplx(self.n.re * kd, self.n.im * kd);
        let (s, c) = csin_ccos(beta);
        let den = self.two_i_n * c + self.n2_plus_1 * s;
        let ks = k * self.roughness;
        // exp(-(2 k sigma)^2 / 2)
        let g = dd::exp(-(ks * ks) * 2.0);
        let r = self.n2_minus_1 * s;
        SlabTerms {
            beta,
            den,
            r_num: cplx(r.re * g, r.im * g),
        }
    }

    pub fn two_n(&self) -> Cdd {
        cplx(self.n.re * 2.0, self.n.im * 2.0)
    }

    pub fn coefficients(&self, k: Dd) -> SlabCoefficientsDd {
        let t = self.terms(k);
        SlabCoefficientsDd {
            r_d: cdiv(t.r_num, t.den),
            t_d: cdiv(self.two_n(), t.den),
            beta: t.beta,
        }
    }
}

pub(crate) struct Kernel {
    slab: SlabKernel,
    reflectivity: Dd,
    sqrt_r: Dd,
    transmission: Dd,
    length: f64,
    z: f64,
}

impl Kernel {
    pub fn new(cav: &CavityConfig, slab: &OpticalSlab, z: f64) -> Self {
        let reflectivity = dd::dd(cav.mirror_reflectivity);
        Kernel {
            slab: SlabKernel::new(slab),
            reflectivity,
            sqrt_r: dd::sqrt(reflectivity),
            transmission: dd::dd(1.0) - reflectivity,
            length: cav.length,
            z,
        }
    }

    pub fn slab(&self) -> &SlabKernel {
        &self.slab
    }

    /// Round-trip phase factor `e^{ikL}` and `cos(2kz)`.
    pub fn phases(&self, k: Dd) -> (Cdd, Dd) {
        let x = cis(k * self.length);
        let (_, cz) = dd::sin_cos(k * (2.0 * self.z));
        (x, cz)
    }

    /// Denominator of the transmission multiplied through by `den^2`:
    /// `den^2 + 2 sqrt(R) cos(2kz) r_num den x + R (4 n^2 + r_num^2) x^2`.
    fn scaled_denominator(&self, t: &SlabTerms, k: Dd) -> Cdd {
        let (x, cz) = self.phases(k);
        let two_n = self.slab.two_n();
        let a = t.r_num * t.den * x;
        let a = cplx(
            a.re * (self.sqrt_r * cz * 2.0),
            a.im * (self.sqrt_r * cz * 2.0),
        );
        let b = (two_n * two_n + t.r_num * t.r_num) * x * x;
        let b = cplx(b.re * self.reflectivity, b.im * self.reflectivity);
        t.den * t.den + a + b
    }

    pub fn transmission(&self, k: Dd) -> Dd {
        let t = self.slab.terms(k);
        let d = self.scaled_denominator(&t, k);
        let num =
            self.transmission * self.transmission * norm_sqr(self.slab.two_n()) * norm_sqr(t.den);
        dd::div(num, norm_sqr(d))
    }
}
