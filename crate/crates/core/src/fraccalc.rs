//! Riemann-Liouville fractional integrals and derivatives of complex order on a segment.
//!
//! Two rules are available. `GaussLegendre` splits `[a, x]` at its midpoint and
//! applies Gauss-Legendre after the substitutions `t = a + L u⁴` and
//! `t = x − L v⁴`; the value `f(x)` is subtracted near `x` and integrated exactly,
//! so profiles may carry algebraic singularities at `a`. `GradedTrapezoid` is
//! product integration, exact for piecewise-linear `f` against the weight, on a
//! mesh graded toward both ends.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypercomplex::CQ;
use crate::quadrature::{gauss_unit, QuadratureSpec, Rule};
use crate::special::{powc_pos, rgamma};

/// A fractional order. Derivative orders satisfy `0 < Re α < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FracOrder(pub Complex64);

impl FracOrder {
    pub fn derivative(alpha: Complex64) -> Result<Self> {
        if !(alpha.re > 0.0 && alpha.re < 1.0) || !alpha.im.is_finite() {
            return Err(Error::OrderOutOfRange(format!("derivative order {alpha} needs 0 < Re < 1")));
        }
        Ok(FracOrder(alpha))
    }

    pub fn integral(beta: Complex64) -> Result<Self> {
        if !(beta.re > 0.0) || !beta.im.is_finite() {
            return Err(Error::OrderOutOfRange(format!("integral order {beta} needs Re > 0")));
        }
        Ok(FracOrder(beta))
    }

    pub fn real(a: f64) -> Result<Self> {
        FracOrder::derivative(Complex64::new(a, 0.0))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: f64,
    pub b: f64,
}

impl Segment {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Domain(format!("segment [{a}, {b}] is empty")));
        }
        Ok(Segment { a, b })
    }

    fn check(&self, x: f64) -> Result<()> {
        if !(x >= self.a && x <= self.b) {
            return Err(Error::Domain(format!("x = {x} outside [{}, {}]", self.a, self.b)));
        }
        Ok(())
    }
}

/// A scalar-variable profile with optional analytic derivative.
#[derive(Clone, Copy)]
pub struct Profile1D<'a> {
    pub value: &'a (dyn Fn(f64) -> CQ + Sync),
    pub derivative: Option<&'a (dyn Fn(f64) -> CQ + Sync)>,
}

impl<'a> Profile1D<'a> {
    pub fn new(value: &'a (dyn Fn(f64) -> CQ + Sync)) -> Self {
        Profile1D { value, derivative: None }
    }

    pub fn with_derivative(value: &'a (dyn Fn(f64) -> CQ + Sync), d: &'a (dyn Fn(f64) -> CQ + Sync)) -> Self {
        Profile1D { value, derivative: Some(d) }
    }
}

/// Left integral `I_{a+}^β f(x)`.
pub fn rl_integral_left(
    f: &(dyn Fn(f64) -> CQ + Sync),
    beta: FracOrder,
    seg: &Segment,
    x: f64,
    grid: &QuadratureSpec,
) -> Result<CQ> {
    seg.check(x)?;
    let beta = beta.value();
    if !(beta.re > 0.0) {
        return Err(Error::OrderOutOfRange(format!("integral order {beta}")));
    }
    if x == seg.a {
        return Ok(CQ::ZERO);
    }
    Ok(match grid.rule {
        Rule::GaussLegendre => gauss_split_left(f, beta, seg.a, x, grid.segment_nodes),
        Rule::GradedTrapezoid => {
            let mesh = graded_mesh(seg.a, x, 2 * grid.segment_nodes, grid.grading_exponent);
            product_integral_left(f, beta, &mesh)
        }
    })
}

/// Right integral `I_{b−}^β f(x)`, by reflection `t ↦ −t`.
pub fn rl_integral_right(
    f: &(dyn Fn(f64) -> CQ + Sync),
    beta: FracOrder,
    seg: &Segment,
    x: f64,
    grid: &QuadratureSpec,
) -> Result<CQ> {
    seg.check(x)?;
    let g = |t: f64| f(-t);
    rl_integral_left(&g, beta, &Segment { a: -seg.b, b: -seg.a }, -x, grid)
}

/// Left derivative `D_{a+}^α f(x)` for `0 < Re α < 1`.
///
/// With an analytic derivative and finite `f(a)` this uses
/// `f(a)(x−a)^{−α}/Γ(1−α) + I^{1−α}[f'](x)`. Otherwise it differentiates
/// `I^{1−α} f` with a five-point stencil of step `(x−a)/(8n)`, `n` the nodes per axis.
pub fn rl_derivative_left(
    f: &Profile1D<'_>,
    alpha: FracOrder,
    seg: &Segment,
    x: f64,
    grid: &QuadratureSpec,
) -> Result<CQ> {
    seg.check(x)?;
    let alpha = alpha.value();
    if !(alpha.re > 0.0 && alpha.re < 1.0) {
        return Err(Error::OrderOutOfRange(format!("derivative order {alpha}")));
    }
    if x == seg.a {
        return Err(Error::UndefinedOnBoundary);
    }
    let beta = FracOrder(Complex64::new(1.0, 0.0) - alpha);
    if let Some(df) = f.derivative {
        let fa = (f.value)(seg.a);
        if fa.is_finite() {
            let head = if fa.is_zero() {
                CQ::ZERO
            } else {
                fa.mul_complex(powc_pos(x - seg.a, -alpha) * rgamma(beta.value()))
            };
            let tail = rl_integral_left(df, beta, &Segment { a: seg.a, b: x.max(seg.b) }, x, grid)?;
            return Ok(head + tail);
        }
    }
    let d = x - seg.a;
    let g = |t: f64| rl_integral_left(f.value, beta, &Segment { a: seg.a, b: seg.b.max(t) }, t, grid);
    let m = 8.0 * grid.nodes_per_axis.max(8) as f64;
    let h = d / m;
    if x + 2.0 * h <= seg.b {
        let val = (-g(x + 2.0 * h)? + g(x + h)?.scale(8.0) - g(x - h)?.scale(8.0) + g(x - 2.0 * h)?).scale(1.0 / (12.0 * h));
        return Ok(val);
    }
    // one-sided fourth-order stencil
    let h = d / (2.0 * m);
    let val = (g(x)?.scale(25.0) - g(x - h)?.scale(48.0) + g(x - 2.0 * h)?.scale(36.0) - g(x - 3.0 * h)?.scale(16.0)
        + g(x - 4.0 * h)?.scale(3.0))
    .scale(1.0 / (12.0 * h));
    Ok(val)
}

/// Right derivative `D_{b−}^α f(x)`, by reflection.
pub fn rl_derivative_right(
    f: &Profile1D<'_>,
    alpha: FracOrder,
    seg: &Segment,
    x: f64,
    grid: &QuadratureSpec,
) -> Result<CQ> {
    seg.check(x)?;
    let g = |t: f64| (f.value)(-t);
    let seg_r = Segment { a: -seg.b, b: -seg.a };
    match f.derivative {
        Some(df) => {
            let dg = |t: f64| -df(-t);
            rl_derivative_left(&Profile1D::with_derivative(&g, &dg), alpha, &seg_r, -x, grid)
        }
        None => rl_derivative_left(&Profile1D::new(&g), alpha, &seg_r, -x, grid),
    }
}

/// Closed form `D_{a+}^α 1 (x) = (x−a)^{−α}/Γ(1−α)`.
pub fn rl_const_derivative(alpha: FracOrder, seg: &Segment, x: f64) -> Result<Complex64> {
    seg.check(x)?;
    if x == seg.a {
        return Err(Error::UndefinedOnBoundary);
    }
    let a = alpha.value();
    Ok(powc_pos(x - seg.a, -a) * rgamma(Complex64::new(1.0, 0.0) - a))
}

fn gauss_split_left(f: &(dyn Fn(f64) -> CQ + Sync), beta: Complex64, a: f64, x: f64, m: usize) -> CQ {
    let (u, w) = gauss_unit(m);
    let mid = 0.5 * (a + x);
    let half = mid - a;
    let bm1 = beta - 1.0;
    let mut acc = CQ::ZERO;
    // [a, mid]: t = a + half·u⁴
    for (&ui, &wi) in u.iter().zip(&w) {
        let u3 = ui * ui * ui;
        let t = a + half * u3 * ui;
        let jac = wi * half * 4.0 * u3;
        acc += f(t).mul_complex(powc_pos(x - t, bm1) * jac);
    }
    // [mid, x]: t = x − half·v⁴, with f(x) integrated exactly
    let fx = f(x);
    for (&vi, &wi) in u.iter().zip(&w) {
        let v3 = vi * vi * vi;
        let s = half * v3 * vi;
        let jac = wi * half * 4.0 * v3;
        acc += (f(x - s) - fx).mul_complex(powc_pos(s, bm1) * jac);
    }
    acc += fx.mul_complex(powc_pos(half, beta) / beta);
    acc.mul_complex(rgamma(beta))
}

/// Mesh on `[a, x]` with `n` intervals clustered toward both ends with exponent `g`.
pub fn graded_mesh(a: f64, x: f64, n: usize, g: f64) -> Vec<f64> {
    let n = n.max(2);
    let l = x - a;
    let mut t: Vec<f64> = (0..=n)
        .map(|k| {
            let u = k as f64 / n as f64;
            let gu = if u <= 0.5 { 0.5 * (2.0 * u).powf(g) } else { 1.0 - 0.5 * (2.0 * (1.0 - u)).powf(g) };
            a + l * gu
        })
        .collect();
    t[0] = a;
    t[n] = x;
    t
}

/// `(A0, A1) = (∫_0^h (s−τ)^{β−1} dτ, ∫_0^h τ (s−τ)^{β−1} dτ)` for `s ≥ h > 0`.
fn interval_moments(s: f64, h: f64, beta: Complex64) -> (Complex64, Complex64) {
    let r = h / s;
    if r < 0.25 {
        // series in r: (1−ρ)^{β−1} = Σ c_n ρ^n
        let sb = powc_pos(s, beta);
        let mut c = Complex64::new(1.0, 0.0);
        let mut rp = r;
        let mut a0 = Complex64::new(0.0, 0.0);
        let mut a1 = Complex64::new(0.0, 0.0);
        for n in 0..60 {
            let nf = n as f64;
            a0 += c * rp / (nf + 1.0);
            a1 += c * rp * r / (nf + 2.0);
            c *= (nf + 1.0 - beta) / (nf + 1.0);
            rp *= r;
            if rp < 1e-18 {
                break;
            }
        }
        return (sb * a0, sb * s * a1);
    }
    let e = s - h;
    let a0 = (powc_pos(s, beta) - powc_pos(e, beta)) / beta;
    let b = (powc_pos(s, beta + 1.0) - powc_pos(e, beta + 1.0)) / (beta + 1.0);
    (a0, a0 * s - b)
}

/// Product-integration weights `w_k` with `Σ w_k f(t_k) ≈ ∫_a^x f(t)(x−t)^{β−1} dt`
/// on a mesh ending at `x`.
pub fn product_weights_left(mesh: &[f64], beta: Complex64) -> Vec<Complex64> {
    let n = mesh.len() - 1;
    let x = mesh[n];
    let mut w = vec![Complex64::new(0.0, 0.0); n + 1];
    for k in 0..n {
        let h = mesh[k + 1] - mesh[k];
        if h <= 0.0 {
            continue;
        }
        let (a0, a1) = interval_moments(x - mesh[k], h, beta);
        w[k] += a0 - a1 / h;
        w[k + 1] += a1 / h;
    }
    w
}

/// Product integration of `I_{a+}^β f(mesh.last())`. A non-finite `f(a)` is
/// replaced by a midpoint value on the first interval.
pub fn product_integral_left(f: &(dyn Fn(f64) -> CQ + Sync), beta: Complex64, mesh: &[f64]) -> CQ {
    let w = product_weights_left(mesh, beta);
    let mut acc = CQ::ZERO;
    let f0 = f(mesh[0]);
    if f0.is_finite() {
        acc += f0.mul_complex(w[0]);
        for k in 1..mesh.len() {
            acc += f(mesh[k]).mul_complex(w[k]);
        }
    } else {
        let x = *mesh.last().unwrap();
        let (a0, a1) = interval_moments(x - mesh[0], mesh[1] - mesh[0], beta);
        let h = mesh[1] - mesh[0];
        acc += f(0.5 * (mesh[0] + mesh[1])).mul_complex(a0);
        // remove the node-1 share of the first interval that the weights hold
        acc += f(mesh[1]).mul_complex(w[1] - a1 / h);
        for k in 2..mesh.len() {
            acc += f(mesh[k]).mul_complex(w[k]);
        }
    }
    acc.mul_complex(rgamma(beta))
}

/// `D_{a+}^α p(x)` for a profile whose derivative `dp` has a sharp peak of
/// half-width `width` centred near `t_star`. Uses `m` Gauss points per piece
/// after a sinh map around the peak.
pub fn rl_derivative_left_peaked(
    p: &dyn Fn(f64) -> CQ,
    dp: &dyn Fn(f64) -> CQ,
    alpha: Complex64,
    a: f64,
    x: f64,
    t_star: f64,
    width: f64,
    m: usize,
) -> CQ {
    let beta = Complex64::new(1.0, 0.0) - alpha;
    let head = p(a).mul_complex(powc_pos(x - a, -alpha));
    let mut ts = t_star.clamp(a, x);
    if x - ts < width {
        ts = x;
    }
    let gx = dp(x);
    let (u, w) = gauss_unit(m);
    let bm1 = beta - 1.0;
    let mut acc = gx.mul_complex(powc_pos(x - a, beta) / beta);
    // piece [a, ts]: t = ts − width·sinh ξ
    if ts > a {
        let xi_max = ((ts - a) / width).asinh();
        let toward_zero = ts == x;
        for (&ui, &wi) in u.iter().zip(&w) {
            let (xi, jx) = if toward_zero { (xi_max * ui * ui, wi * xi_max * 2.0 * ui) } else { (xi_max * ui, wi * xi_max) };
            let t = ts - width * xi.sinh();
            let jac = jx * width * xi.cosh();
            let s = x - t;
            if s <= 0.0 {
                continue;
            }
            acc += (dp(t) - gx).mul_complex(powc_pos(s, bm1) * jac);
        }
    }
    // piece [ts, x]: t = ts + width·sinh ξ, graded toward x
    if x > ts {
        let xi_max = ((x - ts) / width).asinh();
        for (&ui, &wi) in u.iter().zip(&w) {
            let om = 1.0 - ui;
            let xi = xi_max * (1.0 - om * om);
            let jx = wi * xi_max * 2.0 * om;
            let t = ts + width * xi.sinh();
            let jac = jx * width * xi.cosh();
            let s = x - t;
            if s <= 0.0 {
                continue;
            }
            acc += (dp(t) - gx).mul_complex(powc_pos(s, bm1) * jac);
        }
    }
    (head + acc).mul_complex(rgamma(beta))
}

/// Interpolant `φ(t) ≈ (t−a)^γ·P(t)` on `[a, b]` with `P` a Chebyshev series. Suited to
/// one-dimensional fractional images of analytic data, whose only non-smooth
/// behaviour is the algebraic factor at `a`.
#[derive(Clone, Debug)]
pub struct SingularCheb {
    a: f64,
    b: f64,
    gamma: Complex64,
    coeffs: Vec<CQ>,
}

impl SingularCheb {
    pub fn new(f: &dyn Fn(f64) -> CQ, a: f64, b: f64, gamma: Complex64, n: usize) -> Result<Self> {
        if !(a < b) {
            return Err(Error::Domain(format!("interpolation interval [{a}, {b}]")));
        }
        let n = n.max(2);
        let half = 0.5 * (b - a);
        let vals: Vec<CQ> = (0..n)
            .map(|j| {
                let th = std::f64::consts::PI * (j as f64 + 0.5) / n as f64;
                let t = a + half * (1.0 + th.cos());
                let w = powc_pos(t - a, gamma);
                f(t).mul_complex(w.inv())
            })
            .collect();
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite sample while tabulating a profile".into()));
        }
        let coeffs = (0..n)
            .map(|k| {
                let mut c = CQ::ZERO;
                for (j, v) in vals.iter().enumerate() {
                    let th = std::f64::consts::PI * (j as f64 + 0.5) / n as f64;
                    c += v.scale((k as f64 * th).cos());
                }
                c.scale(if k == 0 { 1.0 / n as f64 } else { 2.0 / n as f64 })
            })
            .collect();
        Ok(SingularCheb { a, b, gamma, coeffs })
    }

    pub fn eval(&self, t: f64) -> CQ {
        let z = (2.0 * t - self.a - self.b) / (self.b - self.a);
        let (mut b1, mut b2) = (CQ::ZERO, CQ::ZERO);
        for c in self.coeffs.iter().skip(1).rev() {
            let b0 = *c + b1.scale(2.0 * z) - b2;
            b2 = b1;
            b1 = b0;
        }
        let p = self.coeffs[0] + b1.scale(z) - b2;
        p.mul_complex(powc_pos(t - self.a, self.gamma))
    }

    /// Magnitude of the trailing coefficients relative to the leading one.
    pub fn tail(&self) -> f64 {
        let n = self.coeffs.len();
        let head = self.coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max).max(1e-300);
        self.coeffs[n.saturating_sub(3)..].iter().map(|c| c.abs()).fold(0.0, f64::max) / head
    }
}
