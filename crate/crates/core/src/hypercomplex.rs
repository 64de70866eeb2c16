//! Real and complex quaternions, structural sets and ψ-coordinates.
//!
//! A complex quaternion is stored as a pair `(re, im)` of real quaternions
//! meaning `re + 𝗂·im`, where 𝗂 is the commuting imaginary unit.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when validating orthonormality of a structural set.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Quaternion { x0, x1, x2, x3 }
    }

    pub fn from_array(c: [f64; 4]) -> Self {
        Quaternion::new(c[0], c[1], c[2], c[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x0, self.x1, self.x2, self.x3]
    }

    pub fn conj(self) -> Self {
        Quaternion::new(self.x0, -self.x1, -self.x2, -self.x3)
    }

    pub fn norm_sqr(self) -> f64 {
        self.x0 * self.x0 + self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Euclidean inner product of the coefficient vectors, equal to ½(p̄q + q̄p).
    pub fn dot(self, o: Quaternion) -> f64 {
        self.x0 * o.x0 + self.x1 * o.x1 + self.x2 * o.x2 + self.x3 * o.x3
    }

    pub fn scale(self, s: f64) -> Self {
        Quaternion::new(self.x0 * s, self.x1 * s, self.x2 * s, self.x3 * s)
    }

    pub fn is_zero(self) -> bool {
        self.x0 == 0.0 && self.x1 == 0.0 && self.x2 == 0.0 && self.x3 == 0.0
    }

    pub fn inverse(self) -> Result<Self> {
        let n = self.norm_sqr();
        if n == 0.0 {
            return Err(Error::ZeroDivisor);
        }
        Ok(self.conj().scale(1.0 / n))
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.x0 + o.x0, self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.x0 - o.x0, self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.x0, -self.x1, -self.x2, -self.x3)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, b: Quaternion) -> Quaternion {
        let a = self;
        Quaternion::new(
            a.x0 * b.x0 - a.x1 * b.x1 - a.x2 * b.x2 - a.x3 * b.x3,
            a.x0 * b.x1 + a.x1 * b.x0 + a.x2 * b.x3 - a.x3 * b.x2,
            a.x0 * b.x2 - a.x1 * b.x3 + a.x2 * b.x0 + a.x3 * b.x1,
            a.x0 * b.x3 + a.x1 * b.x2 - a.x2 * b.x1 + a.x3 * b.x0,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, s: f64) -> Quaternion {
        self.scale(s)
    }
}

/// Complex quaternion `re + 𝗂·im`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ComplexQuaternion {
    pub re: Quaternion,
    pub im: Quaternion,
}

pub type CQ = ComplexQuaternion;

impl ComplexQuaternion {
    pub const ZERO: CQ = CQ { re: Quaternion::ZERO, im: Quaternion::ZERO };
    pub const ONE: CQ = CQ { re: Quaternion::ONE, im: Quaternion::ZERO };

    pub const fn new(re: Quaternion, im: Quaternion) -> Self {
        CQ { re, im }
    }

    pub fn real(q: Quaternion) -> Self {
        CQ { re: q, im: Quaternion::ZERO }
    }

    pub fn scalar(c: Complex64) -> Self {
        CQ {
            re: Quaternion::new(c.re, 0.0, 0.0, 0.0),
            im: Quaternion::new(c.im, 0.0, 0.0, 0.0),
        }
    }

    /// Builds `Σ c_k e_k` from four complex coefficients on the standard basis.
    pub fn from_components(c: [Complex64; 4]) -> Self {
        CQ {
            re: Quaternion::new(c[0].re, c[1].re, c[2].re, c[3].re),
            im: Quaternion::new(c[0].im, c[1].im, c[2].im, c[3].im),
        }
    }

    pub fn components(self) -> [Complex64; 4] {
        [
            Complex64::new(self.re.x0, self.im.x0),
            Complex64::new(self.re.x1, self.im.x1),
            Complex64::new(self.re.x2, self.im.x2),
            Complex64::new(self.re.x3, self.im.x3),
        ]
    }

    /// Quaternionic conjugation, applied to both parts. 𝗂 is left alone.
    pub fn conj(self) -> Self {
        CQ { re: self.re.conj(), im: self.im.conj() }
    }

    /// Scalar product ½(p̄q + q̄p), bilinear over ℂ.
    pub fn scalar_product(self, o: CQ) -> Complex64 {
        Complex64::new(
            self.re.dot(o.re) - self.im.dot(o.im),
            self.re.dot(o.im) + self.im.dot(o.re),
        )
    }

    /// `q·q̄`, a complex scalar. It vanishes on zero divisors.
    pub fn quadratic_norm(self) -> Complex64 {
        self.scalar_product(self)
    }

    /// Euclidean norm of the eight real coefficients.
    pub fn abs(self) -> f64 {
        (self.re.norm_sqr() + self.im.norm_sqr()).sqrt()
    }

    pub fn is_zero(self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(self) -> bool {
        self.re.to_array().iter().chain(self.im.to_array().iter()).all(|v| v.is_finite())
    }

    pub fn scale(self, s: f64) -> Self {
        CQ { re: self.re.scale(s), im: self.im.scale(s) }
    }

    pub fn mul_complex(self, c: Complex64) -> Self {
        CQ {
            re: self.re.scale(c.re) - self.im.scale(c.im),
            im: self.re.scale(c.im) + self.im.scale(c.re),
        }
    }

    /// Two-sided inverse. Fails with `ZeroDivisor` when `q·q̄` vanishes.
    pub fn inverse(self) -> Result<Self> {
        let n = self.quadratic_norm();
        let mag = self.re.norm_sqr() + self.im.norm_sqr();
        if mag == 0.0 || n.norm() <= 1e-14 * mag {
            return Err(Error::ZeroDivisor);
        }
        Ok(self.conj().mul_complex(n.inv()))
    }

    pub fn max_abs_diff(self, o: CQ) -> f64 {
        let d = self - o;
        d.re.to_array()
            .iter()
            .chain(d.im.to_array().iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

impl From<Quaternion> for CQ {
    fn from(q: Quaternion) -> CQ {
        CQ::real(q)
    }
}

impl fmt::Display for CQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.components();
        write!(f, "({})+({})i+({})j+({})k", c[0], c[1], c[2], c[3])
    }
}

impl Add for CQ {
    type Output = CQ;
    fn add(self, o: CQ) -> CQ {
        CQ { re: self.re + o.re, im: self.im + o.im }
    }
}

impl AddAssign for CQ {
    fn add_assign(&mut self, o: CQ) {
        *self = *self + o;
    }
}

impl Sub for CQ {
    type Output = CQ;
    fn sub(self, o: CQ) -> CQ {
        CQ { re: self.re - o.re, im: self.im - o.im }
    }
}

impl SubAssign for CQ {
    fn sub_assign(&mut self, o: CQ) {
        *self = *self - o;
    }
}

impl Neg for CQ {
    type Output = CQ;
    fn neg(self) -> CQ {
        CQ { re: -self.re, im: -self.im }
    }
}

impl Mul for CQ {
    type Output = CQ;
    fn mul(self, o: CQ) -> CQ {
        CQ {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

impl Mul<f64> for CQ {
    type Output = CQ;
    fn mul(self, s: f64) -> CQ {
        self.scale(s)
    }
}

impl Mul<Complex64> for CQ {
    type Output = CQ;
    fn mul(self, c: Complex64) -> CQ {
        self.mul_complex(c)
    }
}

/// An orthonormal frame ψ = {ψ₀, ψ₁, ψ₂, ψ₃} of ℍ together with its orientation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructuralSet {
    psi: [Quaternion; 4],
    sgn: i8,
}

impl StructuralSet {
    pub fn new(psi: [Quaternion; 4]) -> Result<Self> {
        for k in 0..4 {
            for s in k..4 {
                let target = if k == s { 1.0 } else { 0.0 };
                let dev = (psi[k].dot(psi[s]) - target).abs();
                if !(dev <= ORTHONORMAL_TOL) {
                    return Err(Error::NotOrthonormal { k, s, deviation: dev });
                }
            }
        }
        let m: [[f64; 4]; 4] = [psi[0].to_array(), psi[1].to_array(), psi[2].to_array(), psi[3].to_array()];
        let sgn = if det4(&m) > 0.0 { 1 } else { -1 };
        Ok(StructuralSet { psi, sgn })
    }

    pub fn standard() -> Self {
        StructuralSet {
            psi: [Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::K],
            sgn: 1,
        }
    }

    /// Standard frame left-multiplied by a unit quaternion built from `axis` and `angle`.
    pub fn rotated(axis: [f64; 3], angle: f64) -> Result<Self> {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if n == 0.0 {
            return Err(Error::Domain("rotation axis must be nonzero".into()));
        }
        let (s, c) = (angle / 2.0).sin_cos();
        let r = Quaternion::new(c, s * axis[0] / n, s * axis[1] / n, s * axis[2] / n);
        let e = StructuralSet::standard().psi;
        StructuralSet::new([r * e[0], r * e[1], r * e[2], r * e[3]])
    }

    /// `{1, i, j, -k}`, an orientation-reversing frame.
    pub fn flipped() -> Self {
        StructuralSet::new([Quaternion::ONE, Quaternion::I, Quaternion::J, -Quaternion::K])
            .expect("flipped frame is orthonormal")
    }

    pub fn psi(&self) -> &[Quaternion; 4] {
        &self.psi
    }

    pub fn get(&self, k: usize) -> Quaternion {
        self.psi[k]
    }

    pub fn sgn(&self) -> i8 {
        self.sgn
    }

    /// The conjugate frame ψ̄.
    pub fn conjugate(&self) -> Self {
        let p = self.psi;
        StructuralSet::new([p[0].conj(), p[1].conj(), p[2].conj(), p[3].conj()])
            .expect("conjugation preserves orthonormality")
    }

    /// ψ-coordinates `x_k = ⟨ψ_k, x⟩`.
    pub fn coords(&self, x: CQ) -> [Complex64; 4] {
        std::array::from_fn(|k| CQ::real(self.psi[k]).scalar_product(x))
    }

    pub fn coords_real(&self, x: Quaternion) -> [f64; 4] {
        std::array::from_fn(|k| self.psi[k].dot(x))
    }

    /// `Σ x_k ψ_k`.
    pub fn synth(&self, c: [Complex64; 4]) -> CQ {
        let mut out = CQ::ZERO;
        for k in 0..4 {
            out += CQ::real(self.psi[k]).mul_complex(c[k]);
        }
        out
    }

    pub fn synth_real(&self, c: [f64; 4]) -> Quaternion {
        let mut out = Quaternion::ZERO;
        for k in 0..4 {
            out = out + self.psi[k].scale(c[k]);
        }
        out
    }

    /// ψ-hyperholomorphic scalar product `⟨u, x⟩_ψ = Σ u_k x_k` on coordinates.
    pub fn scalar_product_psi(&self, u: CQ, x: &[f64; 4]) -> Complex64 {
        let uc = self.coords(u);
        uc.iter().zip(x.iter()).map(|(a, b)| a * b).sum()
    }
}

fn det4(m: &[[f64; 4]; 4]) -> f64 {
    let mut a = *m;
    let mut det = 1.0;
    for c in 0..4 {
        let p = (c..4).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..4 {
            let f = a[r][c] / a[c][c];
            for k in c..4 {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> impl Strategy<Value = Quaternion> {
        prop::array::uniform4(-3.0f64..3.0).prop_map(Quaternion::from_array)
    }

    fn cq() -> impl Strategy<Value = CQ> {
        (q(), q()).prop_map(|(a, b)| CQ::new(a, b))
    }

    #[test]
    fn hamilton_table() {
        let (i, j, k) = (Quaternion::I, Quaternion::J, Quaternion::K);
        assert_eq!(i * j, k);
        assert_eq!(j * k, i);
        assert_eq!(k * i, j);
        assert_eq!(j * i, -k);
        assert_eq!(i * i, -Quaternion::ONE);
    }

    #[test]
    fn complexified_product_example() {
        let a = CQ::new(Quaternion::ONE, Quaternion::I);
        let b = CQ::new(Quaternion::J, Quaternion::ZERO);
        let p = a * b;
        assert_eq!(p, CQ::new(Quaternion::J, Quaternion::K));
    }

    #[test]
    fn zero_divisor_detected() {
        let a = CQ::new(Quaternion::ONE, Quaternion::I);
        assert_eq!(a.quadratic_norm(), Complex64::new(0.0, 0.0));
        assert!(matches!(a.inverse(), Err(Error::ZeroDivisor)));
    }

    #[test]
    fn standard_coordinates_are_components() {
        let psi = StructuralSet::standard();
        let x = CQ::new(Quaternion::new(1.0, 2.0, 3.0, 4.0), Quaternion::new(-1.0, 0.5, 0.0, 2.0));
        assert_eq!(psi.coords(x), x.components());
        assert_eq!(psi.synth(psi.coords(x)), x);
    }

    #[test]
    fn non_orthonormal_rejected() {
        let bad = [Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::new(0.0, 0.0, 0.1, 1.0)];
        match StructuralSet::new(bad) {
            Err(Error::NotOrthonormal { k, s, .. }) => assert_eq!((k, s), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn orientation() {
        assert_eq!(StructuralSet::standard().sgn(), 1);
        assert_eq!(StructuralSet::flipped().sgn(), -1);
        assert_eq!(StructuralSet::rotated([1.0, 2.0, -0.5], 0.7).unwrap().sgn(), 1);
    }

    proptest! {
        #[test]
        fn product_associative(a in cq(), b in cq(), c in cq()) {
            let l = (a * b) * c;
            let r = a * (b * c);
            let scale = 1.0 + a.abs() * b.abs() * c.abs();
            prop_assert!(l.max_abs_diff(r) <= 1e-12 * scale);
        }

        #[test]
        fn conjugation_reverses_products(a in cq(), b in cq()) {
            let l = (a * b).conj();
            let r = b.conj() * a.conj();
            prop_assert!(l.max_abs_diff(r) <= 1e-12 * (1.0 + a.abs() * b.abs()));
        }

        #[test]
        fn coordinate_round_trip(x in cq(), axis in prop::array::uniform3(-1.0f64..1.0), ang in 0.0f64..6.0) {
            prop_assume!(axis.iter().map(|v| v * v).sum::<f64>() > 1e-3);
            for psi in [StructuralSet::standard(), StructuralSet::flipped(), StructuralSet::rotated(axis, ang).unwrap()] {
                let back = psi.synth(psi.coords(x));
                prop_assert!(back.max_abs_diff(x) <= 1e-12 * (1.0 + x.abs()));
            }
        }

        #[test]
        fn inverse_is_two_sided(a in cq()) {
            prop_assume!(a.quadratic_norm().norm() > 1e-3);
            let inv = a.inverse().unwrap();
            let s = 1.0 + a.abs() * inv.abs();
            prop_assert!((a * inv).max_abs_diff(CQ::ONE) <= 1e-10 * s);
            prop_assert!((inv * a).max_abs_diff(CQ::ONE) <= 1e-10 * s);
        }

        #[test]
        fn scalar_product_symmetric(a in cq(), b in cq()) {
            let l = a.scalar_product(b);
            let r = (a.conj() * b + b.conj() * a).scale(0.5);
            prop_assert!((l - r.components()[0]).norm() <= 1e-12 * (1.0 + a.abs() * b.abs()));
            prop_assert!(r.components()[1..].iter().all(|c| c.norm() <= 1e-12 * (1.0 + a.abs() * b.abs())));
        }
    }
}
