//! 256-bit complex arithmetic for reference values, plus shared fixtures.
#![allow(dead_code)]

use astro_float::{BigFloat, Consts, RoundingMode};
use beamtf::beam_model::DerivedParams;
use beamtf::numeric::{Cdd, Scalar};
use num_complex::Complex64;

pub const P: usize = 256;
const RM: RoundingMode = RoundingMode::ToEven;

#[derive(Debug, Clone)]
pub struct Big {
    pub re: BigFloat,
    pub im: BigFloat,
}

fn bf(x: f64) -> BigFloat {
    BigFloat::from_f64(x, P)
}

fn to_f64(x: &BigFloat) -> f64 {
    x.to_string().parse().unwrap()
}

impl Big {
    pub fn new(re: f64, im: f64) -> Self {
        Self { re: bf(re), im: bf(im) }
    }

    pub fn c64(z: Complex64) -> Self {
        Self::new(z.re, z.im)
    }

    pub fn cdd(z: Cdd) -> Self {
        Self {
            re: bf(z.re.hi()).add(&bf(z.re.lo()), P, RM),
            im: bf(z.im.hi()).add(&bf(z.im.lo()), P, RM),
        }
    }

    pub fn real(x: f64) -> Self {
        Self::new(x, 0.0)
    }

    pub fn add(&self, o: &Big) -> Big {
        Big { re: self.re.add(&o.re, P, RM), im: self.im.add(&o.im, P, RM) }
    }

    pub fn sub(&self, o: &Big) -> Big {
        Big { re: self.re.sub(&o.re, P, RM), im: self.im.sub(&o.im, P, RM) }
    }

    pub fn mul(&self, o: &Big) -> Big {
        let re = self.re.mul(&o.re, P, RM).sub(&self.im.mul(&o.im, P, RM), P, RM);
        let im = self.re.mul(&o.im, P, RM).add(&self.im.mul(&o.re, P, RM), P, RM);
        Big { re, im }
    }

    pub fn div(&self, o: &Big) -> Big {
        let den = o.re.mul(&o.re, P, RM).add(&o.im.mul(&o.im, P, RM), P, RM);
        let re = self.re.mul(&o.re, P, RM).add(&self.im.mul(&o.im, P, RM), P, RM);
        let im = self.im.mul(&o.re, P, RM).sub(&self.re.mul(&o.im, P, RM), P, RM);
        Big { re: re.div(&den, P, RM), im: im.div(&den, P, RM) }
    }

    pub fn norm(&self) -> BigFloat {
        self.re.mul(&self.re, P, RM).add(&self.im.mul(&self.im, P, RM), P, RM).sqrt(P, RM)
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Big {
        let r = self.norm();
        let two = bf(2.0);
        let re = r.add(&self.re, P, RM).div(&two, P, RM).sqrt(P, RM);
        let mut im = r.sub(&self.re, P, RM).div(&two, P, RM).sqrt(P, RM);
        if self.im.is_negative() {
            im = im.neg();
        }
        Big { re, im }
    }

    pub fn exp(&self, cc: &mut Consts) -> Big {
        let m = self.re.exp(P, RM, cc);
        Big { re: m.mul(&self.im.cos(P, RM, cc), P, RM), im: m.mul(&self.im.sin(P, RM, cc), P, RM) }
    }

    pub fn neg(&self) -> Big {
        Big { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn cosh_sinh(&self, cc: &mut Consts) -> (Big, Big) {
        let e = self.exp(cc);
        let f = self.neg().exp(cc);
        let half = Big::real(0.5);
        (e.add(&f).mul(&half), e.sub(&f).mul(&half))
    }

    /// cos z and sin z through cosh(iz), −i sinh(iz).
    pub fn cos_sin(&self, cc: &mut Consts) -> (Big, Big) {
        let iz = Big { re: self.im.neg(), im: self.re.clone() };
        let (c, s) = iz.cosh_sinh(cc);
        (c, Big { re: s.im.clone(), im: s.re.neg() })
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(to_f64(&self.re), to_f64(&self.im))
    }

    /// |self − want| / |want|, or the absolute difference when want = 0.
    pub fn rel_err(&self, want: &Big) -> f64 {
        let d = self.sub(want).norm();
        let w = want.norm();
        if w.is_zero() {
            to_f64(&d)
        } else {
            to_f64(&d.div(&w, P, RM))
        }
    }
}

pub fn consts() -> Consts {
    Consts::new().unwrap()
}

/// λ1², λ2² from the defining formulas, ordered to match `lambda1_sq`.
pub fn tb_roots(dp: &DerivedParams, s: Complex64, lambda1_sq: Complex64) -> (Big, Big) {
    let s = Big::c64(s);
    let s2 = s.mul(&s);
    let (rho, irho, k, ei) = (Big::real(dp.rho), Big::real(dp.i_rho), Big::real(dp.k_shear_rigidity), Big::real(dp.ei));
    let a = s2.mul(&rho.div(&k).add(&irho.div(&ei))).mul(&Big::real(0.5));
    let b = k.add(&irho.mul(&s2)).mul(&rho).mul(&s2).div(&k.mul(&ei));
    let r = a.mul(&a).sub(&b).sqrt();
    let (p, q) = (a.add(&r), a.sub(&r));
    if (p.to_c64() - lambda1_sq).norm() <= (q.to_c64() - lambda1_sq).norm() {
        (p, q)
    } else {
        (q, p)
    }
}

/// The seven Timoshenko kernels at x, directly from cosh and sinh.
pub fn tb_kernels(p: &Big, q: &Big, x: f64, cc: &mut Consts) -> [Big; 7] {
    let (l1, l2) = (p.sqrt(), q.sqrt());
    let xb = Big::real(x);
    let (c1, sh1) = l1.mul(&xb).cosh_sinh(cc);
    let (c2, sh2) = l2.mul(&xb).cosh_sinh(cc);
    let s1 = sh1.div(&l1);
    let s2 = sh2.div(&l2);
    [
        p.mul(&c2).sub(&q.mul(&c1)),
        p.mul(&s2).sub(&q.mul(&s1)),
        c1.sub(&c2),
        s1.sub(&s2),
        p.mul(&s1).sub(&q.mul(&s2)),
        p.mul(&c1).sub(&q.mul(&c2)),
        p.mul(p).mul(&s1).sub(&q.mul(q).mul(&s2)),
    ]
}

/// γ as the principal fourth root of −ρs²/EI.
pub fn eb_gamma(dp: &DerivedParams, s: Complex64) -> Big {
    let s = Big::c64(s);
    let g4 = s.mul(&s).mul(&Big::real(-dp.rho)).div(&Big::real(dp.ei));
    g4.sqrt().sqrt()
}

/// The four Euler–Bernoulli kernels at x.
pub fn eb_kernels(g: &Big, x: f64, cc: &mut Consts) -> [Big; 4] {
    let gx = g.mul(&Big::real(x));
    let (ch, sh) = gx.cosh_sinh(cc);
    let (co, si) = gx.cos_sin(cc);
    let g2 = g.mul(g);
    [ch.add(&co), sh.add(&si).div(g), ch.sub(&co).div(&g2), sh.sub(&si).div(&g2.mul(g))]
}

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

pub fn s_hz(nu: f64) -> Complex64 {
    Complex64::new(0.0, 2.0 * std::f64::consts::PI * nu)
}

pub fn to_c64<S: Scalar>(z: S) -> Complex64 {
    z.to_c64()
}
