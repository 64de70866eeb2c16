//! Classical ψ-Fueter operators, the Cauchy kernel, Teodorescu transforms and
//! residual checks for the Stokes and Borel-Pompeiu formulas.
//!
//! Fields are functions of the ψ-coordinates `(x_0, …, x_3)`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hypercomplex::{StructuralSet, CQ};
use crate::quadrature::{boundary_integral, volume_integral, Box4, Point4, QuadratureSpec};
use crate::report::IdentityReport;

pub type ValueFn = Arc<dyn Fn(&Point4) -> CQ + Send + Sync>;
pub type GradFn = Arc<dyn Fn(&Point4) -> [CQ; 4] + Send + Sync>;

/// A complex-quaternion valued function of four real coordinates, with
/// optional analytic first partials.
#[derive(Clone)]
pub struct Field {
    pub name: String,
    value: ValueFn,
    grad: Option<GradFn>,
}

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Field({}, partials: {})", self.name, self.grad.is_some())
    }
}

impl Field {
    pub fn new(name: &str, value: impl Fn(&Point4) -> CQ + Send + Sync + 'static) -> Self {
        Field { name: name.to_string(), value: Arc::new(value), grad: None }
    }

    pub fn with_grad(mut self, grad: impl Fn(&Point4) -> [CQ; 4] + Send + Sync + 'static) -> Self {
        self.grad = Some(Arc::new(grad));
        self
    }

    pub fn constant(name: &str, c: CQ) -> Self {
        Field::new(name, move |_| c).with_grad(|_| [CQ::ZERO; 4])
    }

    pub fn zero() -> Self {
        Field::constant("zero", CQ::ZERO)
    }

    #[inline]
    pub fn eval(&self, x: &Point4) -> CQ {
        (self.value)(x)
    }

    pub fn has_partials(&self) -> bool {
        self.grad.is_some()
    }

    pub fn analytic_grad(&self, x: &Point4) -> Option<[CQ; 4]> {
        self.grad.as_ref().map(|g| g(x))
    }

    /// `c·f` for a constant on the left.
    pub fn mul_left(&self, c: CQ) -> Field {
        let v = self.value.clone();
        let mut out = Field::new(&format!("{}*{}", "c", self.name), move |x| c * v(x));
        if let Some(g) = self.grad.clone() {
            out = out.with_grad(move |x| g(x).map(|d| c * d));
        }
        out
    }

    /// `f·c` for a constant on the right.
    pub fn mul_right(&self, c: CQ) -> Field {
        let v = self.value.clone();
        let mut out = Field::new(&format!("{}*c", self.name), move |x| v(x) * c);
        if let Some(g) = self.grad.clone() {
            out = out.with_grad(move |x| g(x).map(|d| d * c));
        }
        out
    }

    pub fn add(&self, o: &Field) -> Field {
        let (a, b) = (self.value.clone(), o.value.clone());
        let mut out = Field::new(&format!("{}+{}", self.name, o.name), move |x| a(x) + b(x));
        if let (Some(ga), Some(gb)) = (self.grad.clone(), o.grad.clone()) {
            out = out.with_grad(move |x| {
                let (p, q) = (ga(x), gb(x));
                std::array::from_fn(|k| p[k] + q[k])
            });
        }
        out
    }

    /// `e^{⟨u, x⟩_ψ}·f`.
    pub fn exp_weighted(&self, psi: &StructuralSet, u: CQ) -> Field {
        let uc = psi.coords(u);
        let v = self.value.clone();
        let e = move |x: &Point4| -> Complex64 { (uc[0] * x[0] + uc[1] * x[1] + uc[2] * x[2] + uc[3] * x[3]).exp() };
        let mut out = Field::new(&format!("exp*{}", self.name), move |x| v(x).mul_complex(e(x)));
        if let Some(g) = self.grad.clone() {
            let v = self.value.clone();
            out = out.with_grad(move |x| {
                let ex = e(x);
                let d = g(x);
                let fx = v(x);
                std::array::from_fn(|k| (d[k] + fx.mul_complex(uc[k])).mul_complex(ex))
            });
        }
        out
    }

    /// Compares analytic partials with central differences at `probes`; returns the
    /// largest relative mismatch.
    pub fn partials_mismatch(&self, probes: &[Point4], h: f64) -> Option<f64> {
        let g = self.grad.as_ref()?;
        let fd = FdStep::new(h);
        let stripped = Field { name: self.name.clone(), value: self.value.clone(), grad: None };
        let mut worst: f64 = 0.0;
        for x in probes {
            let a = g(x);
            for k in 0..4 {
                let n = partial(&stripped, x, k, &fd).ok()?;
                worst = worst.max(a[k].max_abs_diff(n) / (1.0 + a[k].abs()));
            }
        }
        Some(worst)
    }
}

/// Finite-difference step with an optional domain that stencils must stay inside.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdStep {
    pub h: f64,
    pub domain: Option<Box4>,
}

impl FdStep {
    pub fn new(h: f64) -> Self {
        FdStep { h, domain: None }
    }

    pub fn within(h: f64, b: Box4) -> Self {
        FdStep { h, domain: Some(b) }
    }

    fn check(&self, x: &Point4, k: usize) -> Result<()> {
        if let Some(b) = &self.domain {
            if x[k] - 2.0 * self.h < b.lo[k] || x[k] + 2.0 * self.h > b.hi[k] {
                return Err(Error::BoundaryTooClose);
            }
        }
        Ok(())
    }
}

fn shifted(x: &Point4, k: usize, d: f64) -> Point4 {
    let mut y = *x;
    y[k] += d;
    y
}

/// Fourth-order central first derivative of a fallible function along axis `k`.
pub fn fd_partial(f: &dyn Fn(&Point4) -> Result<CQ>, x: &Point4, k: usize, fd: &FdStep) -> Result<CQ> {
    fd.check(x, k)?;
    let h = fd.h;
    Ok((-f(&shifted(x, k, 2.0 * h))? + f(&shifted(x, k, h))?.scale(8.0) - f(&shifted(x, k, -h))?.scale(8.0)
        + f(&shifted(x, k, -2.0 * h))?)
    .scale(1.0 / (12.0 * h)))
}

/// Fourth-order central second derivative along axis `k`.
pub fn fd_second(f: &dyn Fn(&Point4) -> Result<CQ>, x: &Point4, k: usize, fd: &FdStep) -> Result<CQ> {
    fd.check(x, k)?;
    let h = fd.h;
    Ok((-f(&shifted(x, k, 2.0 * h))? + f(&shifted(x, k, h))?.scale(16.0) - f(x)?.scale(30.0)
        + f(&shifted(x, k, -h))?.scale(16.0)
        - f(&shifted(x, k, -2.0 * h))?)
    .scale(1.0 / (12.0 * h * h)))
}

pub fn partial(f: &Field, x: &Point4, k: usize, fd: &FdStep) -> Result<CQ> {
    if let Some(g) = &f.grad {
        return Ok(g(x)[k]);
    }
    fd_partial(&|y| Ok(f.eval(y)), x, k, fd)
}

/// `ψ𝒟[f](x) = Σ ψ_k ∂_k f(x)`.
pub fn fueter_left(psi: &StructuralSet, f: &Field, x: &Point4, fd: &FdStep) -> Result<CQ> {
    let mut out = CQ::ZERO;
    for k in 0..4 {
        out += CQ::real(psi.get(k)) * partial(f, x, k, fd)?;
    }
    Ok(out)
}

/// `ψ𝒟_r[f](x) = Σ ∂_k f(x) ψ_k`.
pub fn fueter_right(psi: &StructuralSet, f: &Field, x: &Point4, fd: &FdStep) -> Result<CQ> {
    let mut out = CQ::ZERO;
    for k in 0..4 {
        out += partial(f, x, k, fd)? * CQ::real(psi.get(k));
    }
    Ok(out)
}

/// Left Fueter operator of a fallible function, always by differences.
pub fn fueter_left_fd(psi: &StructuralSet, f: &dyn Fn(&Point4) -> Result<CQ>, x: &Point4, fd: &FdStep) -> Result<CQ> {
    let mut out = CQ::ZERO;
    for k in 0..4 {
        out += CQ::real(psi.get(k)) * fd_partial(f, x, k, fd)?;
    }
    Ok(out)
}

pub fn fueter_right_fd(psi: &StructuralSet, f: &dyn Fn(&Point4) -> Result<CQ>, x: &Point4, fd: &FdStep) -> Result<CQ> {
    let mut out = CQ::ZERO;
    for k in 0..4 {
        out += fd_partial(f, x, k, fd)? * CQ::real(psi.get(k));
    }
    Ok(out)
}

/// `Δf(x)` by fourth-order differences.
pub fn laplacian_fd(f: &dyn Fn(&Point4) -> Result<CQ>, x: &Point4, fd: &FdStep) -> Result<CQ> {
    let mut out = CQ::ZERO;
    for k in 0..4 {
        out += fd_second(f, x, k, fd)?;
    }
    Ok(out)
}

/// `K_ψ(w) = conj(w_ψ) / (2π²|w|⁴)`, with `w` given in ψ-coordinates.
pub fn cauchy_kernel(psi: &StructuralSet, w: &Point4) -> Result<CQ> {
    let r2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2] + w[3] * w[3];
    if r2.sqrt() < 1e-14 {
        return Err(Error::SingularPoint);
    }
    Ok(CQ::real(psi.synth_real(*w).conj()).scale(1.0 / (2.0 * PI * PI * r2 * r2)))
}

/// `∂K_ψ/∂w_i`.
pub fn cauchy_kernel_partial(psi: &StructuralSet, w: &Point4, i: usize) -> Result<CQ> {
    let r2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2] + w[3] * w[3];
    if r2.sqrt() < 1e-14 {
        return Err(Error::SingularPoint);
    }
    let c = 1.0 / (2.0 * PI * PI * r2 * r2);
    let wb = psi.synth_real(*w).conj();
    let q = psi.get(i).conj().scale(c) - wb.scale(4.0 * w[i] * c / r2);
    Ok(CQ::real(q))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Teodorescu transform `∫ K_ψ(x−y) f(y) dy` (left) or `∫ f(y) K_ψ(x−y) dy` (right)
/// over the box, with the exclusion ball of `spec` when `x` lies in the box.
///
/// The kernel is evaluated at `x − y`, so that `ψ𝒟 ∘ 𝒯 = I`.
pub fn teodorescu(
    psi: &StructuralSet,
    f: &(dyn Fn(&Point4) -> Result<CQ> + Sync),
    b: &Box4,
    x: &Point4,
    spec: &QuadratureSpec,
    side: Side,
) -> Result<CQ> {
    volume_integral(b, spec, Some(x), |y| {
        let w = [x[0] - y[0], x[1] - y[1], x[2] - y[2], x[3] - y[3]];
        let k = cauchy_kernel(psi, &w)?;
        Ok(match side {
            Side::Left => k * f(y)?,
            Side::Right => f(y)? * k,
        })
    })
}

pub fn teodorescu_left(psi: &StructuralSet, f: &Field, b: &Box4, x: &Point4, spec: &QuadratureSpec) -> Result<CQ> {
    teodorescu(psi, &|y| Ok(f.eval(y)), b, x, spec, Side::Left)
}

pub fn teodorescu_right(psi: &StructuralSet, f: &Field, b: &Box4, x: &Point4, spec: &QuadratureSpec) -> Result<CQ> {
    teodorescu(psi, &|y| Ok(f.eval(y)), b, x, spec, Side::Right)
}

/// Largest `|f| + |g|` over a 5⁴ lattice of the box.
pub fn sup_norm(fields: &[&Field], b: &Box4) -> f64 {
    let mut m: f64 = 0.0;
    for idx in 0..625usize {
        let mut y = [0.0; 4];
        let mut r = idx;
        for k in 0..4 {
            y[k] = b.lo[k] + b.edge(k) * (r % 5) as f64 / 4.0;
            r /= 5;
        }
        m = m.max(fields.iter().map(|f| f.eval(&y).abs()).sum());
    }
    m
}

/// Residual of the Stokes formula `∫_∂ gσf = ∫ (g·ψ𝒟f + ψ𝒟_r g·f)`.
pub fn stokes_classical_residual(
    psi: &StructuralSet,
    f: &Field,
    g: &Field,
    b: &Box4,
    spec: &QuadratureSpec,
    tol: f64,
) -> Result<IdentityReport> {
    let fd = FdStep::new(b.max_edge() * 1e-3);
    let lhs = boundary_integral(b, psi, spec, |y| Ok(g.eval(y)), |y| Ok(f.eval(y)))?;
    let rhs = volume_integral(b, spec, None, |y| {
        Ok(g.eval(y) * fueter_left(psi, f, y, &fd)? + fueter_right(psi, g, y, &fd)? * f.eval(y))
    })?;
    let scale = lhs.abs().max(rhs.abs()).max(1e-300);
    Ok(IdentityReport::new("stokes", &format!("{}|{}", f.name, g.name), spec.nodes_per_axis).judge(
        (lhs - rhs).abs(),
        scale,
        tol,
    ))
}

/// Boundary term minus volume term of the Borel-Pompeiu formula, without the right-hand side.
pub fn borel_pompeiu_classical_value(
    psi: &StructuralSet,
    f: &Field,
    g: &Field,
    b: &Box4,
    x: &Point4,
    spec: &QuadratureSpec,
) -> Result<CQ> {
    let fd = FdStep::new(b.max_edge() * 1e-3);
    let kern = |y: &Point4| cauchy_kernel(psi, &[y[0] - x[0], y[1] - x[1], y[2] - x[2], y[3] - x[3]]);
    let bnd = crate::quadrature::face_integral(b, spec, |_| None, |face, y| {
        let n = CQ::real(psi.get(face.axis)).scale(face.normal_sign());
        let k = kern(y)?;
        Ok(k * n * f.eval(y) + g.eval(y) * n * k)
    })?;
    let vol = volume_integral(b, spec, Some(x), |y| {
        let k = kern(y)?;
        Ok(k * fueter_left(psi, f, y, &fd)? + fueter_right(psi, g, y, &fd)? * k)
    })?;
    Ok(bnd - vol)
}

/// Residual of the classical Borel-Pompeiu formula at `x`.
pub fn borel_pompeiu_classical_residual(
    psi: &StructuralSet,
    f: &Field,
    g: &Field,
    b: &Box4,
    x: &Point4,
    spec: &QuadratureSpec,
    tol: f64,
) -> Result<IdentityReport> {
    let interior = b.contains_strict(x);
    if !interior && b.contains(x) {
        return Err(Error::UndefinedOnBoundary);
    }
    let value = borel_pompeiu_classical_value(psi, f, g, b, x, spec)?;
    let eps = if interior { spec.epsilon(b) } else { 0.0 };
    let name = if interior { "borel-pompeiu-interior" } else { "borel-pompeiu-exterior" };
    let rep = IdentityReport::new(name, &format!("{}|{}", f.name, g.name), spec.nodes_per_axis).epsilon(eps).probe(*x);
    Ok(if interior {
        let want = f.eval(x) + g.eval(x);
        rep.judge((value - want).abs(), sup_norm(&[f, g], b), tol)
    } else {
        rep.judge(value.abs(), 1.0, tol)
    })
}

/// Residual of `ψ𝒟 ∘ 𝒯[f] = f` (left) or `ψ𝒟_r ∘ 𝒯_r[f] = f` (right) at `x`.
pub fn fueter_inverse_residual(
    psi: &StructuralSet,
    f: &Field,
    b: &Box4,
    x: &Point4,
    spec: &QuadratureSpec,
    side: Side,
    tol: f64,
) -> Result<IdentityReport> {
    let h = b.max_edge() / (4.0 * spec.nodes_per_axis as f64);
    let fd = FdStep::within(h, *b);
    let t = |y: &Point4| teodorescu(psi, &|z| Ok(f.eval(z)), b, y, spec, side);
    let got = match side {
        Side::Left => fueter_left_fd(psi, &t, x, &fd)?,
        Side::Right => fueter_right_fd(psi, &t, x, &fd)?,
    };
    let name = match side {
        Side::Left => "fueter-inverse-left",
        Side::Right => "fueter-inverse-right",
    };
    Ok(IdentityReport::new(name, &f.name, spec.nodes_per_axis)
        .epsilon(spec.epsilon(b))
        .fd_step(h)
        .probe(*x)
        .judge((got - f.eval(x)).abs(), sup_norm(&[f], b), tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercomplex::Quaternion;
    use crate::quadrature::Exclusion;

    fn q(x0: f64, x1: f64, x2: f64, x3: f64) -> CQ {
        CQ::real(Quaternion::new(x0, x1, x2, x3))
    }

    #[test]
    fn fueter_examples() {
        let psi = StructuralSet::standard();
        let fd = FdStep::new(1e-3);
        let c = Field::constant("c", q(1.0, 2.0, 3.0, 4.0));
        assert!(fueter_left(&psi, &c, &[0.3; 4], &fd).unwrap().abs() == 0.0);
        let sq = Field::new("x0^2", |x| q(x[0] * x[0], 0.0, 0.0, 0.0));
        let v = fueter_left(&psi, &sq, &[3.0, 0.0, 0.0, 0.0], &fd).unwrap();
        assert!(v.max_abs_diff(q(6.0, 0.0, 0.0, 0.0)) < 1e-9);
        let hol = Field::new("x1 - i x0", |x| q(x[1], -x[0], 0.0, 0.0));
        assert!(fueter_left(&psi, &hol, &[0.2, 0.7, -1.0, 3.0], &fd).unwrap().abs() < 1e-10);
    }

    #[test]
    fn kernel_examples() {
        let psi = StructuralSet::standard();
        let k = cauchy_kernel(&psi, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((k.re.x0 - 1.0 / (2.0 * PI * PI)).abs() < 1e-15);
        assert!((k.re.x0 - 0.050_660_6).abs() < 1e-7);
        assert_eq!(cauchy_kernel(&psi, &[0.0; 4]), Err(Error::SingularPoint));
        let d = [0.3, -0.2, 0.5, 0.1];
        let k1 = cauchy_kernel(&psi, &d).unwrap();
        let k2 = cauchy_kernel(&psi, &d.map(|v| 2.0 * v)).unwrap();
        assert!(k2.scale(8.0).max_abs_diff(k1) < 1e-12 * k1.abs());
    }

    #[test]
    fn kernel_is_two_sided_hyperholomorphic_away_from_origin() {
        for psi in [StructuralSet::standard(), StructuralSet::flipped(), StructuralSet::rotated([0.3, -1.0, 0.2], 1.1).unwrap()] {
            let w = [0.4, -0.3, 0.2, 0.7];
            let mut left = CQ::ZERO;
            let mut right = CQ::ZERO;
            for i in 0..4 {
                let d = cauchy_kernel_partial(&psi, &w, i).unwrap();
                left += CQ::real(psi.get(i)) * d;
                right += d * CQ::real(psi.get(i));
            }
            assert!(left.abs() < 1e-13 && right.abs() < 1e-13);
        }
    }

    #[test]
    fn kernel_partial_matches_differences() {
        let psi = StructuralSet::rotated([1.0, 1.0, 0.0], 0.4).unwrap();
        let w = [0.4, -0.3, 0.2, 0.7];
        let fd = FdStep::new(1e-4);
        for i in 0..4 {
            let n = fd_partial(&|y| cauchy_kernel(&psi, y), &w, i, &fd).unwrap();
            assert!(n.max_abs_diff(cauchy_kernel_partial(&psi, &w, i).unwrap()) < 1e-9);
        }
    }

    #[test]
    fn teodorescu_zero_and_scaling() {
        let psi = StructuralSet::standard();
        let b = Box4::unit();
        let spec = QuadratureSpec::gauss(4).with_exclusion(Exclusion::Auto);
        let x = [0.5; 4];
        assert_eq!(teodorescu_left(&psi, &Field::zero(), &b, &x, &spec).unwrap(), CQ::ZERO);
        let f = Field::new("f", |y| q(1.0 + y[2], y[0], 0.0, -y[3]));
        let t1 = teodorescu_left(&psi, &f, &b, &x, &spec).unwrap();
        for c in [2.0, 0.5, -4.0] {
            let t2 = teodorescu_left(&psi, &f.mul_left(q(c, 0.0, 0.0, 0.0)), &b, &x, &spec).unwrap();
            assert_eq!(t2, t1.scale(c));
        }
    }

    #[test]
    fn stokes_on_polynomials() {
        let b = Box4::new([0.0, -0.5, 0.0, 0.2], [1.0, 0.5, 2.0, 1.0]).unwrap();
        let f = Field::new("f", |x| q(x[0] * x[1], x[2] * x[2], 1.0, x[3]));
        let g = Field::new("g", |x| CQ::new(Quaternion::new(x[3], 0.0, x[0], 0.0), Quaternion::new(0.0, x[1] * x[2], 0.0, 1.0)));
        for psi in [StructuralSet::standard(), StructuralSet::flipped(), StructuralSet::rotated([0.0, 1.0, 1.0], 0.9).unwrap()] {
            let r = stokes_classical_residual(&psi, &f, &g, &b, &QuadratureSpec::gauss(4), 1e-8).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn borel_pompeiu_exterior_and_zero() {
        let psi = StructuralSet::standard();
        let b = Box4::unit();
        let spec = QuadratureSpec::gauss(6).with_exclusion(Exclusion::Auto);
        let z = Field::zero();
        let r = borel_pompeiu_classical_residual(&psi, &z, &z, &b, &[0.5; 4], &spec, 1e-12).unwrap();
        assert_eq!(r.residual_abs, 0.0);
        let one = Field::constant("1", CQ::ONE);
        let r = borel_pompeiu_classical_residual(&psi, &one, &z, &b, &[2.5, 0.5, 0.5, 0.5], &spec, 1e-3).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(
            borel_pompeiu_classical_residual(&psi, &one, &z, &b, &[0.0, 0.5, 0.5, 0.5], &spec, 1e-3).unwrap_err(),
            Error::UndefinedOnBoundary
        );
    }

    #[test]
    fn borel_pompeiu_interior_reproduces_harmonic_field() {
        let psi = StructuralSet::rotated([0.2, 0.4, -1.0], 0.6).unwrap();
        let b = Box4::unit();
        let spec = QuadratureSpec::gauss(8).with_exclusion(Exclusion::Auto);
        let f = Field::new("1+x0", |x| q(1.0 + x[0], 0.0, 0.0, 0.0));
        let r = borel_pompeiu_classical_residual(&psi, &f, &Field::zero(), &b, &[0.5; 4], &spec, 1e-4).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn teodorescu_is_a_right_inverse() {
        let psi = StructuralSet::standard();
        let b = Box4::unit();
        let spec = QuadratureSpec::gauss(6).with_exclusion(Exclusion::Auto);
        let f = Field::new("1+x2", |x| q(1.0 + x[2], 0.0, 0.0, 0.0));
        let r = fueter_inverse_residual(&psi, &f, &b, &[0.5; 4], &spec, Side::Left, 1e-4).unwrap();
        assert!(r.passed(), "{r:?}");
        let r = fueter_inverse_residual(&psi, &f, &b, &[0.5; 4], &spec, Side::Right, 1e-4).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn exp_weight_partials() {
        let psi = StructuralSet::standard();
        let f = Field::new("f", |x| q(x[0], x[1] * x[1], 0.0, 1.0)).with_grad(|x| {
            [q(1.0, 0.0, 0.0, 0.0), q(0.0, 2.0 * x[1], 0.0, 0.0), CQ::ZERO, CQ::ZERO]
        });
        let u = CQ::new(Quaternion::new(0.3, 0.0, -0.2, 0.1), Quaternion::new(0.0, 0.5, 0.0, 0.0));
        let e = f.exp_weighted(&psi, u);
        let m = e.partials_mismatch(&[[0.1, 0.2, 0.3, 0.4], [0.5, -0.5, 0.0, 1.0]], 1e-3).unwrap();
        assert!(m < 1e-9, "{m}");
    }
}
