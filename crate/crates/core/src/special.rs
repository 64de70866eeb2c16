//! Complex Γ via the Lanczos approximation (g = 7, nine coefficients).

use num_complex::Complex64;
use std::f64::consts::PI;

const G: f64 = 7.0;
const P: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

pub fn gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return Complex64::new(PI, 0.0) / (s * gamma(Complex64::new(1.0, 0.0) - z));
    }
    let z = z - 1.0;
    let mut t = Complex64::new(P[0], 0.0);
    for (i, p) in P.iter().enumerate().skip(1) {
        t += *p / (z + i as f64);
    }
    let w = z + G + 0.5;
    (2.0 * PI).sqrt() * w.powc(z + 0.5) * (-w).exp() * t
}

/// 1/Γ(z), returning zero at the poles.
pub fn rgamma(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Complex64::new(0.0, 0.0);
    }
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return s * gamma(Complex64::new(1.0, 0.0) - z) / PI;
    }
    gamma(z).inv()
}

pub fn gamma_real(x: f64) -> f64 {
    gamma(Complex64::new(x, 0.0)).re
}

/// `s^β` for `s ≥ 0`, with `0^β = 0` when `Re β > 0`.
#[inline]
pub fn powc_pos(s: f64, beta: Complex64) -> Complex64 {
    if s == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if beta.im == 0.0 {
        return Complex64::new(s.powf(beta.re), 0.0);
    }
    (beta * s.ln()).exp()
}
