//! Perturbed fractional ψ-Fueter operators `𝔇_{u,v}`, the potentials `ℋ`, the
//! fractional Cauchy kernels `𝔎` and `𝐊`, the corrections `ℳ` and `𝒩`, and
//! residual checks for the associated Stokes and Borel-Pompeiu formulas.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fraccalc::{rl_derivative_left, rl_derivative_left_peaked, FracOrder, Profile1D, Segment, SingularCheb};
use crate::fracfueter::{
    axis_derivative, axis_integral, cal_i, classical_fueter, d_view, frac_fueter, i_view, laplacian, AnchoredPoint,
    Anchored, Combination, FieldAt, FracContext, FracOrderVec, PotentialForm,
};
use crate::fueter::{teodorescu, Field, FdStep, Side};
use crate::hypercomplex::{Quaternion, StructuralSet, CQ};
use crate::quadrature::{
    boundary_integral, duffy_volume, face_integral, tensor_integral, Box4, CornerOptions, Point4, QuadratureSpec,
};
use crate::report::IdentityReport;
use crate::special::{powc_pos, rgamma};

const NAN: CQ = CQ::new(Quaternion::new(f64::NAN, 0.0, 0.0, 0.0), Quaternion::ZERO);

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub u: CQ,
    pub v: CQ,
}

impl Perturbation {
    pub const ZERO: Perturbation = Perturbation { u: CQ::ZERO, v: CQ::ZERO };

    pub fn new(u: CQ, v: CQ) -> Self {
        Perturbation { u, v }
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }
}

/// `ʰM[f] = h·f`.
pub fn left_mul(h: &Field, f: &Field) -> Field {
    product(h, f, &format!("{}*{}", h.name, f.name))
}

/// `Mʰ[f] = f·h`.
pub fn right_mul(h: &Field, f: &Field) -> Field {
    product(f, h, &format!("{}*{}", f.name, h.name))
}

fn product(a: &Field, b: &Field, name: &str) -> Field {
    let (a1, b1) = (a.clone(), b.clone());
    let out = Field::new(name, move |x| a1.eval(x) * b1.eval(x));
    if a.has_partials() && b.has_partials() {
        let (a2, b2) = (a.clone(), b.clone());
        out.with_grad(move |x| {
            let (ga, gb) = (a2.analytic_grad(x).unwrap(), b2.analytic_grad(x).unwrap());
            let (va, vb) = (a2.eval(x), b2.eval(x));
            std::array::from_fn(|k| ga[k] * vb + va * gb[k])
        })
    } else {
        out
    }
}

fn mul_side(side: Side, c: CQ, v: CQ) -> CQ {
    match side {
        Side::Left => c * v,
        Side::Right => v * c,
    }
}

fn finite(v: CQ) -> Result<CQ> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain("non-finite intermediate value".into()))
    }
}

/// `ψ𝔇_{u,v}[A](q,x) = ψ𝔇[A] + u·A(x) + v·ℐ[A]` (right: constants on the right).
/// Zero perturbations add nothing, so the result is then bit-identical to [`frac_fueter`].
pub fn perturbed_frac_fueter(ctx: &FracContext, side: Side, pert: &Perturbation, a: &dyn Anchored, x: &Point4) -> Result<CQ> {
    let mut out = frac_fueter(ctx, side, a, x)?;
    if !pert.u.is_zero() {
        out += mul_side(side, pert.u, a.value(x));
    }
    if !pert.v.is_zero() {
        out += mul_side(side, pert.v, cal_i(ctx, a, x)?);
    }
    Ok(out)
}

pub fn perturbed_frac_fueter_left(ctx: &FracContext, pert: &Perturbation, f: &Field, p: &AnchoredPoint) -> Result<CQ> {
    perturbed_frac_fueter(ctx, Side::Left, pert, &FieldAt::new(f, p.q), &p.x)
}

pub fn perturbed_frac_fueter_right(ctx: &FracContext, pert: &Perturbation, f: &Field, p: &AnchoredPoint) -> Result<CQ> {
    perturbed_frac_fueter(ctx, Side::Right, pert, &FieldAt::new(f, p.q), &p.x)
}

/// `𝒯[u f](x)` (left) or `𝒯_r[f u](x)` (right) over the context box.
pub fn teodorescu_weighted(ctx: &FracContext, side: Side, u: CQ, f: &Field, x: &Point4, spec: &QuadratureSpec) -> Result<CQ> {
    if u.is_zero() {
        return Ok(CQ::ZERO);
    }
    teodorescu(&ctx.psi, &|y| Ok(mul_side(side, u, f.eval(y))), &ctx.bx, x, spec, side)
}

/// `ℋ_u[f](q,x) = ℐ[f] + 𝒯[u f](x)` (left) or `ℐ[f] + 𝒯_r[f u](x)` (right).
pub fn h_potential(ctx: &FracContext, side: Side, u: CQ, f: &Field, p: &AnchoredPoint) -> Result<CQ> {
    let base = cal_i(ctx, &FieldAt::new(f, p.q), &p.x)?;
    if u.is_zero() {
        return Ok(base);
    }
    Ok(base + teodorescu_weighted(ctx, side, u, f, &p.x, &ctx.grid)?)
}

/// Single-integral form of `ℋ` over `J_a^x`:
/// `∫ Σ_k [(x_k−τ_k)^{α_k} f(q_{τ,k}) / (Γ(α_k) m(J_a^x)) + (τ_k−x_k) ψ̄_k u f(τ) / (2π²|τ−x|⁴)] dτ`
/// (right: `f(τ) u ψ̄_k`). The kernel part is evaluated with a Duffy split at the corner `x`.
pub fn h_potential_expanded(ctx: &FracContext, side: Side, u: CQ, f: &Field, p: &AnchoredPoint, n: usize) -> Result<CQ> {
    let jx = Box4::new(ctx.bx.lo, p.x)?;
    let m = jx.volume();
    let rg: [Complex64; 4] = std::array::from_fn(|k| rgamma(ctx.alpha.get(k)));
    let at = FieldAt::new(f, p.q);
    let psi = &ctx.psi;
    let x = p.x;
    let opts = CornerOptions { radial_grading: 2.0, ..CornerOptions::default() };
    duffy_volume(&jx, &x, n, &opts, &|tau: &Point4| {
        let mut acc = CQ::ZERO;
        for k in 0..4 {
            let w = powc_pos(x[k] - tau[k], ctx.alpha.get(k)) * rg[k] / m;
            acc += at.profile(k, tau[k]).mul_complex(w);
        }
        if !u.is_zero() {
            let d: Point4 = std::array::from_fn(|k| tau[k] - x[k]);
            let r2: f64 = d.iter().map(|v| v * v).sum();
            let c = 1.0 / (2.0 * PI * PI * r2 * r2);
            let fv = f.eval(tau);
            for k in 0..4 {
                let pk = CQ::real(psi.get(k).conj()).scale(d[k] * c);
                acc += match side {
                    Side::Left => pk * u * fv,
                    Side::Right => fv * u * pk,
                };
            }
        }
        Ok(acc)
    })
}

#[inline]
fn kernel_with_partial(psi: &StructuralSet, w: &Point4, i: usize) -> (CQ, CQ) {
    let r2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2] + w[3] * w[3];
    let c = 1.0 / (2.0 * PI * PI * r2 * r2);
    let wb = psi.synth_real(*w).conj();
    let k = wb.scale(c);
    let dk = psi.get(i).conj().scale(c) - wb.scale(4.0 * w[i] * c / r2);
    (CQ::real(k), CQ::real(dk))
}

/// `D^{α_i}` along `x_i` (lower terminal `a_i`) of `e^{⟨u, τ−x⟩_ψ} K_ψ(τ−x)`.
#[allow(clippy::too_many_arguments)]
fn kernel_axis(
    psi: &StructuralSet,
    alpha: Complex64,
    uc: Option<&[Complex64; 4]>,
    a: f64,
    tau: &Point4,
    x: &Point4,
    i: usize,
    m: usize,
    eps: f64,
) -> Result<CQ> {
    let base: Point4 = std::array::from_fn(|k| tau[k] - x[k]);
    let perp2: f64 = (0..4).filter(|&k| k != i).map(|k| base[k] * base[k]).sum();
    let along = tau[i] - tau[i].clamp(a, x[i]);
    let width = (perp2 + along * along).sqrt();
    if width < eps.max(1e-14) {
        return Err(Error::SingularPath);
    }
    let w_at = |t: f64| {
        let mut w = base;
        w[i] = tau[i] - t;
        w
    };
    let weight = |w: &Point4| -> Complex64 {
        match uc {
            Some(c) => (c[0] * w[0] + c[1] * w[1] + c[2] * w[2] + c[3] * w[3]).exp(),
            None => Complex64::new(1.0, 0.0),
        }
    };
    let p = |t: f64| {
        let w = w_at(t);
        let (k, _) = kernel_with_partial(psi, &w, i);
        match uc {
            Some(_) => k.mul_complex(weight(&w)),
            None => k,
        }
    };
    let dp = |t: f64| {
        let w = w_at(t);
        let (k, dk) = kernel_with_partial(psi, &w, i);
        match uc {
            Some(c) => -(dk + k.mul_complex(c[i])).mul_complex(weight(&w)),
            None => -dk,
        }
    };
    finite(rl_derivative_left_peaked(&p, &dp, alpha, a, x[i], tau[i], width.max(perp2.sqrt()).max(1e-300), m))
}

/// `𝔎^{α}(τ−x) = Σ_i D^{α_i}_{x_i}[K_ψ(τ−x)]` with lower terminals `a`.
/// Fails with `SingularPath` if some segment `{x with x_i ∈ [a_i, x_i]}` passes within `eps` of `τ`.
pub fn frac_cauchy_kernel(
    psi: &StructuralSet,
    alpha: &FracOrderVec,
    a: &Point4,
    tau: &Point4,
    x: &Point4,
    m: usize,
    eps: f64,
) -> Result<CQ> {
    let mut out = CQ::ZERO;
    for i in 0..4 {
        out += kernel_axis(psi, alpha.get(i), None, a[i], tau, x, i, m, eps)?;
    }
    Ok(out)
}

/// `𝐊_u^{α}(τ−x) = Σ_i D^{α_i}_{x_i}[e^{⟨u, τ−x⟩_ψ} K_ψ(τ−x)]`. Equal to
/// [`frac_cauchy_kernel`] bit for bit when `u = 0`.
#[allow(clippy::too_many_arguments)]
pub fn exp_cauchy_kernel(
    psi: &StructuralSet,
    alpha: &FracOrderVec,
    u: CQ,
    a: &Point4,
    tau: &Point4,
    x: &Point4,
    m: usize,
    eps: f64,
) -> Result<CQ> {
    if u.is_zero() {
        return frac_cauchy_kernel(psi, alpha, a, tau, x, m, eps);
    }
    let uc = psi.coords(u);
    let mut out = CQ::ZERO;
    for i in 0..4 {
        out += kernel_axis(psi, alpha.get(i), Some(&uc), a[i], tau, x, i, m, eps)?;
    }
    Ok(out)
}

/// `𝒩[A](q,x,α) = Σ_{i≠j} I^{α_j}[A_j](x_j) / (Γ(α_i)(x_i−a_i)^{α_i})`.
pub fn correction_n(ctx: &FracContext, a: &dyn Anchored, x: &Point4) -> Result<CQ> {
    let lo = ctx.bx.lo;
    let mut ints = [CQ::ZERO; 4];
    for j in 0..4 {
        if !(x[j] > lo[j]) {
            return Err(Error::Domain(format!("x_{j} must exceed a_{j}")));
        }
        ints[j] = axis_integral(ctx, ctx.alpha.get(j), a, j, x[j])?;
    }
    let mut out = CQ::ZERO;
    for i in 0..4 {
        let al = ctx.alpha.get(i);
        let w = rgamma(al) * powc_pos(x[i] - lo[i], -al);
        for j in 0..4 {
            if i != j {
                out += ints[j].mul_complex(w);
            }
        }
    }
    Ok(out)
}

/// `Σ_i D^{α_i}_{x_i}` of `t ↦ 𝒯[u f](x with x_i = t)`, differentiated numerically.
pub fn frac_derivative_of_teodorescu(
    ctx: &FracContext,
    side: Side,
    u: CQ,
    f: &Field,
    x: &Point4,
    spec: &QuadratureSpec,
) -> Result<CQ> {
    if u.is_zero() {
        return Ok(CQ::ZERO);
    }
    let mut out = CQ::ZERO;
    for i in 0..4 {
        let prof = |t: f64| {
            let mut y = *x;
            y[i] = t;
            teodorescu_weighted(ctx, side, u, f, &y, spec).unwrap_or(NAN)
        };
        let seg = Segment::new(ctx.bx.lo[i], ctx.bx.hi[i].max(x[i]))?;
        out += finite(rl_derivative_left(&Profile1D::new(&prof), FracOrder::derivative(ctx.alpha.get(i))?, &seg, x[i], &ctx.grid)?)?;
    }
    Ok(out)
}

/// `ℳ[f,g](q,x,α,β) = 𝒩_α[f] + 𝒩_β[g] + Σ_i D^{α_i}𝒯[u f](x) + Σ_i D^{β_i}𝒯_r[g v](x)`.
pub fn correction_m(s: &TheoremSetup<'_>, f: &Field, g: &Field, x: &Point4) -> Result<CQ> {
    let cb = s.ctx.with_alpha(s.beta);
    let mut out = correction_n(s.ctx, &FieldAt::new(f, s.q), x)? + correction_n(&cb, &FieldAt::new(g, s.q), x)?;
    out += frac_derivative_of_teodorescu(s.ctx, Side::Left, s.pert.u, f, x, &s.teo)?;
    out += frac_derivative_of_teodorescu(&cb, Side::Right, s.pert.v, g, x, &s.teo)?;
    Ok(out)
}

/// A separable function `Σ_k s_k(y_k)` stored as one interpolant per axis.
#[derive(Clone, Debug)]
pub struct AxisTable {
    tabs: Vec<SingularCheb>,
}

impl AxisTable {
    pub fn build(b: &Box4, gamma: [Complex64; 4], n: usize, s: impl Fn(usize, f64) -> Result<CQ> + Sync) -> Result<Self> {
        let tabs = (0..4)
            .map(|k| SingularCheb::new(&|t| s(k, t).unwrap_or(NAN), b.lo[k], b.hi[k], gamma[k], n))
            .collect::<Result<Vec<_>>>()?;
        Ok(AxisTable { tabs })
    }

    #[inline]
    pub fn eval(&self, y: &Point4) -> CQ {
        self.tabs[0].eval(y[0]) + self.tabs[1].eval(y[1]) + self.tabs[2].eval(y[2]) + self.tabs[3].eval(y[3])
    }
}

fn table_nodes(ctx: &FracContext) -> usize {
    (2 * ctx.grid.segment_nodes).max(32)
}

/// Interpolant of `y ↦ ℐ[f](q,y)`.
pub fn potential_table(ctx: &FracContext, f: &Field, q: &Point4) -> Result<AxisTable> {
    let at = FieldAt::new(f, *q);
    let one = Complex64::new(1.0, 0.0);
    let gamma = std::array::from_fn(|k| match ctx.potential {
        PotentialForm::FueterPrimitive => one - ctx.alpha.get(k),
        PotentialForm::Printed => ctx.alpha.get(k),
    });
    AxisTable::build(&ctx.bx, gamma, table_nodes(ctx), |k, t| crate::fracfueter::potential_component(ctx, &at, k, t))
}

/// Interpolant of `y ↦ ψ𝔇[f](q,y)` (left or right).
pub fn fueter_table(ctx: &FracContext, side: Side, f: &Field, q: &Point4) -> Result<AxisTable> {
    let at = FieldAt::new(f, *q);
    let gamma = std::array::from_fn(|k| -ctx.alpha.get(k));
    AxisTable::build(&ctx.bx, gamma, table_nodes(ctx), |k, t| {
        let d = axis_derivative(ctx, ctx.alpha.get(k), &at, k, t)?;
        Ok(mul_side(side, CQ::real(ctx.psi.get(k)), d))
    })
}

// ---------------------------------------------------------------------------
// Proposition suite

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PropIdentity {
    HPotentialLeft,
    HPotentialRight,
    PerturbedOfIntegral,
    PerturbedLaplacian,
    CompositionLeft,
    CompositionRight,
    CompositionLaplace,
    WeightedLeft,
    WeightedRight,
    WeightedLaplacianLeft,
    WeightedLaplacianRight,
    CompositionIntegral,
}

impl PropIdentity {
    pub const ALL: [PropIdentity; 12] = [
        PropIdentity::HPotentialLeft,
        PropIdentity::HPotentialRight,
        PropIdentity::PerturbedOfIntegral,
        PropIdentity::PerturbedLaplacian,
        PropIdentity::CompositionLeft,
        PropIdentity::CompositionRight,
        PropIdentity::CompositionLaplace,
        PropIdentity::WeightedLeft,
        PropIdentity::WeightedRight,
        PropIdentity::WeightedLaplacianLeft,
        PropIdentity::WeightedLaplacianRight,
        PropIdentity::CompositionIntegral,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PropIdentity::HPotentialLeft => "h-potential-left",
            PropIdentity::HPotentialRight => "h-potential-right",
            PropIdentity::PerturbedOfIntegral => "perturbed-of-integral",
            PropIdentity::PerturbedLaplacian => "perturbed-laplacian",
            PropIdentity::CompositionLeft => "composition-left",
            PropIdentity::CompositionRight => "composition-right",
            PropIdentity::CompositionLaplace => "composition-laplace",
            PropIdentity::WeightedLeft => "weighted-left",
            PropIdentity::WeightedRight => "weighted-right",
            PropIdentity::WeightedLaplacianLeft => "weighted-laplacian-left",
            PropIdentity::WeightedLaplacianRight => "weighted-laplacian-right",
            PropIdentity::CompositionIntegral => "composition-integral",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        PropIdentity::ALL.into_iter().find(|p| p.name() == s)
    }
}

/// Inputs for one proposition check. `beta` is the inner order of the
/// composition identities; `composition-laplace` uses it for both orders.
#[derive(Clone, Copy)]
pub struct PropCheck<'a> {
    pub ctx: &'a FracContext,
    pub beta: FracOrderVec,
    pub pert: Perturbation,
    pub f: &'a Field,
    pub point: AnchoredPoint,
    pub tol: f64,
}

fn exp_weight(psi: &StructuralSet, u: CQ) -> impl Fn(&Point4) -> Complex64 + Sync {
    let uc = psi.coords(u);
    move |x: &Point4| (uc[0] * x[0] + uc[1] * x[1] + uc[2] * x[2] + uc[3] * x[3]).exp()
}

fn classical_of_field(psi: &StructuralSet, side: Side, f: &Field, c: CQ, x: &Point4, fd: &FdStep) -> Result<CQ> {
    // ψ𝒟[c f] (left) or ψ𝒟_r[f c] (right) with analytic partials when available
    let mut out = CQ::ZERO;
    let g = f.analytic_grad(x);
    for k in 0..4 {
        let d = match &g {
            Some(g) => g[k],
            None => crate::fueter::fd_partial(&|y| Ok(f.eval(y)), x, k, fd)?,
        };
        let p = CQ::real(psi.get(k));
        out += match side {
            Side::Left => p * c * d,
            Side::Right => d * c * p,
        };
    }
    Ok(out)
}

fn judge(rep: IdentityReport, pairs: &[(CQ, CQ)], tol: f64) -> IdentityReport {
    let (mut abs, mut scale) = (0.0f64, 0.0f64);
    let mut worst = -1.0;
    for (l, r) in pairs {
        let a = l.max_abs_diff(*r);
        let s = l.abs().max(r.abs());
        let rel = a / s.max(1e-14);
        if rel > worst {
            worst = rel;
            abs = a;
            scale = s;
        }
    }
    rep.judge(abs, scale, tol)
}

/// Evaluates both sides of a proposition identity by separate numerical paths.
pub fn verify_proposition(id: PropIdentity, c: &PropCheck<'_>) -> Result<IdentityReport> {
    let ctx = c.ctx;
    let psi = &ctx.psi;
    let (u, v) = (c.pert.u, c.pert.v);
    let q = c.point.q;
    let x = c.point.x;
    let f = c.f;
    let at = FieldAt::new(f, q);
    let fd = FdStep::within(ctx.fd_h(), ctx.bx);
    let rep = IdentityReport::new(id.name(), &f.name, ctx.grid.nodes_per_axis).probe(x);
    let fx = f.eval(&x);
    match id {
        PropIdentity::HPotentialLeft | PropIdentity::HPotentialRight => {
            let side = if id == PropIdentity::HPotentialLeft { Side::Left } else { Side::Right };
            let h = |y: &Point4| h_potential(ctx, side, u, f, &AnchoredPoint { q, x: *y });
            let lhs = classical_fueter(psi, side, &h, &x, &fd)?;
            let rhs = perturbed_frac_fueter(ctx, side, &Perturbation::new(u, CQ::ZERO), &at, &x)?;
            Ok(judge(rep.fd_step(fd.h), &[(lhs, rhs)], c.tol))
        }
        PropIdentity::PerturbedOfIntegral => {
            let jv = crate::fracfueter::j_view(ctx, &at);
            let jx = crate::fracfueter::frac_integral_j(ctx, &at, &x)?;
            let recon = (0..4).fold(CQ::ZERO, |acc, k| acc + CQ::real(psi.get(k)).mul_complex(psi.coords(at.profile(k, x[k]))[k]));
            let pu = Perturbation::new(u, CQ::ZERO);
            let mut pairs = Vec::new();
            for side in [Side::Left, Side::Right] {
                let lhs = perturbed_frac_fueter(ctx, side, &pu, &jv, &x)?;
                pairs.push((lhs, recon + mul_side(side, u, jx)));
            }
            Ok(judge(rep, &pairs, c.tol))
        }
        PropIdentity::PerturbedLaplacian => {
            let conj = psi.conjugate();
            let ii = |y: &Point4| cal_i(ctx, &at, y);
            let lap = laplacian(&ii, &x, &fd)?;
            let mut pairs = Vec::new();
            for side in [Side::Left, Side::Right] {
                let d = |y: &Point4| perturbed_frac_fueter(ctx, side, &Perturbation::new(u, CQ::ZERO), &at, y);
                let lhs = classical_fueter(&conj, side, &d, &x, &fd)?;
                let rhs = lap + classical_of_field(&conj, side, f, u, &x, &fd)?;
                pairs.push((lhs, rhs));
            }
            Ok(judge(rep.fd_step(fd.h), &pairs, c.tol))
        }
        PropIdentity::CompositionLeft | PropIdentity::CompositionRight | PropIdentity::CompositionLaplace => {
            let (actx, beta, v) = if id == PropIdentity::CompositionLaplace { (ctx.with_alpha(c.beta), c.beta, u.conj()) } else { (ctx.clone(), c.beta, v) };
            let sum = actx.alpha.sum(&beta)?;
            let bctx = actx.with_alpha(beta);
            let inner_side = if id == PropIdentity::CompositionRight { Side::Right } else { Side::Left };
            let dv = d_view(&bctx, inner_side, &at);
            let g = match inner_side {
                Side::Left => Combination(vec![(CQ::ONE, &dv as &dyn Anchored, CQ::ONE), (v, &at, CQ::ONE)]),
                Side::Right => Combination(vec![(CQ::ONE, &dv as &dyn Anchored, CQ::ONE), (CQ::ONE, &at, v)]),
            };
            let gx = g.value(&x);
            let dsum: Vec<CQ> = (0..4).map(|k| axis_derivative(&actx, sum.get(k), &at, k, x[k])).collect::<Result<_>>()?;
            let conj = actx.conjugate();
            let mut pairs = Vec::new();
            if inner_side == Side::Left {
                let vf = Combination(vec![(v, &at as &dyn Anchored, CQ::ONE)]);
                let inner = frac_fueter(&bctx, Side::Left, &at, &x)?;
                // ψ𝔇_{u,0} ∘ ψ𝔇_{v,0}
                if id == PropIdentity::CompositionLeft {
                    let lhs = frac_fueter(&actx, Side::Left, &g, &x)? + u * gx;
                    let sq = (0..4).fold(CQ::ZERO, |acc, k| {
                        let p = CQ::real(psi.get(k));
                        acc + p * p * dsum[k]
                    });
                    let rhs = sq + u * inner + frac_fueter(&actx, Side::Left, &vf, &x)? + u * v * fx;
                    pairs.push((lhs, rhs));
                }
                // ψ̄𝔇_{u,0} ∘ ψ𝔇_{v,0}
                let lhs = frac_fueter(&conj, Side::Left, &g, &x)? + u * gx;
                let plain = dsum.iter().fold(CQ::ZERO, |acc, d| acc + *d);
                let rhs = plain + u * inner + frac_fueter(&conj, Side::Left, &vf, &x)? + u * v * fx;
                pairs.push((lhs, rhs));
            } else {
                let fv = Combination(vec![(CQ::ONE, &at as &dyn Anchored, v)]);
                let inner = frac_fueter(&bctx, Side::Right, &at, &x)?;
                // ψ𝔇_{u,0} ∘ ψ𝔇_{r,v,0}
                let lhs = frac_fueter(&actx, Side::Left, &g, &x)? + u * gx;
                let sand = (0..4).fold(CQ::ZERO, |acc, k| {
                    let p = CQ::real(psi.get(k));
                    acc + p * dsum[k] * p
                });
                let rhs = sand + u * inner + frac_fueter(&actx, Side::Left, &at, &x)? * v + u * fx * v;
                pairs.push((lhs, rhs));
                // ψ̄𝔇_{r,u,0} ∘ ψ𝔇_{r,v,0}
                let lhs = frac_fueter(&conj, Side::Right, &g, &x)? + gx * u;
                let plain = dsum.iter().fold(CQ::ZERO, |acc, d| acc + *d);
                let rhs = plain + inner * u + frac_fueter(&conj, Side::Right, &fv, &x)? + fx * v * u;
                pairs.push((lhs, rhs));
            }
            Ok(judge(rep, &pairs, c.tol))
        }
        PropIdentity::WeightedLeft | PropIdentity::WeightedRight | PropIdentity::WeightedLaplacianLeft | PropIdentity::WeightedLaplacianRight => {
            let side = if matches!(id, PropIdentity::WeightedLeft | PropIdentity::WeightedLaplacianLeft) { Side::Left } else { Side::Right };
            let e = exp_weight(psi, u);
            let ex = e(&x);
            let ei = |y: &Point4| Ok(cal_i(ctx, &at, y)?.mul_complex(e(y)));
            let op = |y: &Point4| perturbed_frac_fueter(ctx, side, &Perturbation::new(CQ::ZERO, u), &at, y);
            let (lhs, rhs) = if matches!(id, PropIdentity::WeightedLeft | PropIdentity::WeightedRight) {
                (classical_fueter(psi, side, &ei, &x, &fd)?, op(&x)?.mul_complex(ex))
            } else {
                let eop = |y: &Point4| Ok(op(y)?.mul_complex(e(y)));
                (classical_fueter(&psi.conjugate(), side, &eop, &x, &fd)?, laplacian(&ei, &x, &fd)?)
            };
            // compared after dividing by the non-vanishing weight e^{⟨u,x⟩}
            let inv = ex.inv();
            Ok(judge(rep.fd_step(fd.h), &[(lhs.mul_complex(inv), rhs.mul_complex(inv))], c.tol))
        }
        PropIdentity::CompositionIntegral => {
            let sum = ctx.alpha.sum(&c.beta)?;
            let bctx = ctx.with_alpha(c.beta);
            let dv = d_view(&bctx, Side::Left, &at);
            let iv = i_view(&bctx, &at);
            let g = Combination(vec![(CQ::ONE, &dv as &dyn Anchored, CQ::ONE), (v, &iv, CQ::ONE)]);
            let conj = ctx.conjugate();
            let lhs = frac_fueter(&conj, Side::Left, &g, &x)? + u * cal_i(ctx, &g, &x)?;
            let mut rhs = CQ::ZERO;
            for k in 0..4 {
                rhs += axis_derivative(ctx, sum.get(k), &at, k, x[k])?;
            }
            let viv = Combination(vec![(v, &iv as &dyn Anchored, CQ::ONE)]);
            rhs += u * cal_i(ctx, &dv, &x)? + frac_fueter(&conj, Side::Left, &viv, &x)? + u * v * cal_i(ctx, &iv, &x)?;
            Ok(judge(rep, &[(lhs, rhs)], c.tol))
        }
    }
}

// ---------------------------------------------------------------------------
// Stokes and Borel-Pompeiu formulas

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Part {
    Potential,
    Weighted,
}

impl Part {
    pub fn tag(&self) -> &'static str {
        match self {
            Part::Potential => "potential",
            Part::Weighted => "weighted",
        }
    }
}

/// Shared inputs for the integral formulas. `ctx.grid` drives the outer rules,
/// `teo` the Teodorescu transforms inside `ℋ`, `kernel_nodes` the 1D rule of
/// the fractional kernels and `corner` the Duffy rule around `x`.
#[derive(Clone)]
pub struct TheoremSetup<'a> {
    pub ctx: &'a FracContext,
    pub beta: FracOrderVec,
    pub pert: Perturbation,
    pub q: Point4,
    pub teo: QuadratureSpec,
    pub kernel_nodes: usize,
    pub corner: CornerOptions,
    pub tol: f64,
}

impl<'a> TheoremSetup<'a> {
    pub fn new(ctx: &'a FracContext, beta: FracOrderVec, pert: Perturbation, q: Point4) -> Self {
        let n = ctx.grid.nodes_per_axis;
        TheoremSetup {
            ctx,
            beta,
            pert,
            q,
            teo: QuadratureSpec::gauss(teodorescu_order(n)),
            kernel_nodes: (2 * n).max(12),
            corner: CornerOptions { radial_grading: 3.0, nested_low_edges: true, far_low_grading: 2.0, order: None },
            tol: 5e-2,
        }
    }

    fn beta_ctx(&self) -> FracContext {
        self.ctx.with_alpha(self.beta)
    }
}

/// Order of the Teodorescu rule inside `ℋ` for an outer rule with `n` nodes per axis.
pub fn teodorescu_order(n: usize) -> usize {
    n / 3 + 1
}

/// Clustering exponent that cancels the `(t−a)^{−α}` edge behaviour of `𝔇` images
/// under the graded tensor rule.
pub fn singular_grading(alpha: &FracOrderVec, beta: &FracOrderVec) -> f64 {
    let m = (0..4).map(|k| alpha.get(k).re.max(beta.get(k).re)).fold(0.0f64, f64::max);
    1.0 / (1.0 - m)
}

/// Potentials and operator images of one `(f, g)` pair on the box.
struct Prepared<'a> {
    part: Part,
    f: &'a Field,
    g: &'a Field,
    i_f: AxisTable,
    d_f: AxisTable,
    i_g: AxisTable,
    d_g: AxisTable,
    pert: Perturbation,
    ctx: &'a FracContext,
    teo: QuadratureSpec,
}

impl<'a> Prepared<'a> {
    fn new(s: &'a TheoremSetup<'a>, part: Part, f: &'a Field, g: &'a Field) -> Result<Self> {
        let cb = s.beta_ctx();
        Ok(Prepared {
            part,
            f,
            g,
            i_f: potential_table(s.ctx, f, &s.q)?,
            d_f: fueter_table(s.ctx, Side::Left, f, &s.q)?,
            i_g: potential_table(&cb, g, &s.q)?,
            d_g: fueter_table(&cb, Side::Right, g, &s.q)?,
            pert: s.pert,
            ctx: s.ctx,
            teo: s.teo,
        })
    }

    /// `ℋ_u[f]` (potential form) or `ℐ[f]` (weighted form).
    fn f_pot(&self, y: &Point4) -> Result<CQ> {
        let mut v = self.i_f.eval(y);
        if self.part == Part::Potential && !self.pert.u.is_zero() {
            v += teodorescu_weighted(self.ctx, Side::Left, self.pert.u, self.f, y, &self.teo)?;
        }
        Ok(v)
    }

    fn g_pot(&self, y: &Point4) -> Result<CQ> {
        let mut v = self.i_g.eval(y);
        if self.part == Part::Potential && !self.pert.v.is_zero() {
            v += teodorescu_weighted(self.ctx, Side::Right, self.pert.v, self.g, y, &self.teo)?;
        }
        Ok(v)
    }

    /// `𝔇_{u,0}[f]` (potential form) or `𝔇_{0,u}[f]` (weighted form).
    fn f_op(&self, y: &Point4) -> CQ {
        let d = self.d_f.eval(y);
        match self.part {
            Part::Potential if !self.pert.u.is_zero() => d + self.pert.u * self.f.eval(y),
            Part::Weighted if !self.pert.u.is_zero() => d + self.pert.u * self.i_f.eval(y),
            _ => d,
        }
    }

    fn g_op(&self, y: &Point4) -> CQ {
        let d = self.d_g.eval(y);
        match self.part {
            Part::Potential if !self.pert.v.is_zero() => d + self.g.eval(y) * self.pert.v,
            Part::Weighted if !self.pert.v.is_zero() => d + self.i_g.eval(y) * self.pert.v,
            _ => d,
        }
    }
}

fn pair_name(f: &Field, g: &Field) -> String {
    format!("{}|{}", f.name, g.name)
}

/// Boundary and volume sides of the perturbed Stokes formula.
pub fn stokes_perturbed_sides(part: Part, s: &TheoremSetup<'_>, f: &Field, g: &Field) -> Result<(CQ, CQ)> {
    let p = Prepared::new(s, part, f, g)?;
    let ctx = s.ctx;
    let w = exp_weight(&ctx.psi, s.pert.u + s.pert.v);
    let weighted = part == Part::Weighted && !(s.pert.u + s.pert.v).is_zero();
    let lhs = boundary_integral(&ctx.bx, &ctx.psi, &ctx.grid, |y| {
        let gv = p.g_pot(y)?;
        Ok(if weighted { gv.mul_complex(w(y)) } else { gv })
    }, |y| p.f_pot(y))?;
    let rhs = tensor_integral(&ctx.bx, &ctx.grid, |y| {
        let v = p.g_pot(y)? * p.f_op(y) + p.g_op(y) * p.f_pot(y)?;
        Ok(if weighted { v.mul_complex(w(y)) } else { v })
    })?;
    Ok((lhs, rhs))
}

/// Residual of the perturbed Stokes formula in potential form (`ℋ` potentials) or weighted form
/// (`ℐ` potentials with the weight `e^{⟨u+v,x⟩_ψ}`).
pub fn stokes_perturbed_residual(part: Part, s: &TheoremSetup<'_>, f: &Field, g: &Field) -> Result<IdentityReport> {
    let (lhs, rhs) = stokes_perturbed_sides(part, s, f, g)?;
    let rep = IdentityReport::new(&format!("stokes-perturbed-{}", part.tag()), &pair_name(f, g), s.ctx.grid.nodes_per_axis);
    Ok(rep.judge(lhs.max_abs_diff(rhs), lhs.abs().max(rhs.abs()), s.tol))
}

/// Kernel pieces at a point for one part: `(α-kernel, β-kernel)`.
fn kernels(part: Part, s: &TheoremSetup<'_>, tau: &Point4, x: &Point4) -> Result<(CQ, CQ)> {
    let ctx = s.ctx;
    let a = &ctx.bx.lo;
    let m = s.kernel_nodes;
    let eps = 0.0;
    let (ku, kv) = match part {
        Part::Potential => (CQ::ZERO, CQ::ZERO),
        Part::Weighted => (s.pert.u, s.pert.v),
    };
    let ka = exp_cauchy_kernel(&ctx.psi, &ctx.alpha, ku, a, tau, x, m, eps)?;
    let kb = if s.beta == ctx.alpha && ku == kv { ka } else { exp_cauchy_kernel(&ctx.psi, &s.beta, kv, a, tau, x, m, eps)? };
    Ok((ka, kb))
}

const BATCH: usize = 8;

/// Outcome of the assembled Borel-Pompeiu formula for one pair.
#[derive(Clone, Copy, Debug)]
pub struct BpValue {
    pub boundary: CQ,
    pub volume: CQ,
    pub rhs: CQ,
    pub interior: bool,
}

impl BpValue {
    pub fn lhs(&self) -> CQ {
        self.boundary - self.volume
    }
}

/// Assembles boundary term, volume term and right-hand side of the perturbed
/// Borel-Pompeiu formula at `x` for up to eight `(f, g)` pairs at once, sharing
/// the kernel evaluations.
pub fn borel_pompeiu_perturbed_values(part: Part, s: &TheoremSetup<'_>, pairs: &[(&Field, &Field)], x: &Point4) -> Result<Vec<BpValue>> {
    let b = &s.ctx.bx;
    let interior = b.contains_strict(x);
    if !interior && b.contains(x) {
        return Err(Error::UndefinedOnBoundary);
    }
    let mut out = Vec::with_capacity(pairs.len());
    for chunk in pairs.chunks(BATCH) {
        let preps = chunk.iter().map(|(f, g)| Prepared::new(s, part, f, g)).collect::<Result<Vec<_>>>()?;
        let psi = &s.ctx.psi;
        let bnd: [CQ; BATCH] = face_integral(
            b,
            &s.ctx.grid,
            |face| {
                if interior && !face.high {
                    let mut p = *x;
                    p[face.axis] = b.lo[face.axis];
                    Some(p)
                } else {
                    None
                }
            },
            |face, tau| {
                let (ka, kb) = kernels(part, s, tau, x)?;
                let n = CQ::real(psi.get(face.axis)).scale(face.normal_sign());
                let mut acc = [CQ::ZERO; BATCH];
                for (slot, p) in acc.iter_mut().zip(&preps) {
                    *slot = ka * n * p.f_pot(tau)? + p.g_pot(tau)? * n * kb;
                }
                Ok(acc)
            },
        )?;
        let vol_integrand = |y: &Point4| -> Result<[CQ; BATCH]> {
            let (ka, kb) = kernels(part, s, y, x)?;
            let mut acc = [CQ::ZERO; BATCH];
            for (slot, p) in acc.iter_mut().zip(&preps) {
                *slot = ka * p.f_op(y) + p.g_op(y) * kb;
            }
            Ok(acc)
        };
        let vol: [CQ; BATCH] = if interior {
            let n = s.corner.order.unwrap_or(s.ctx.grid.nodes_per_axis);
            duffy_volume(b, x, n, &s.corner, &vol_integrand)?
        } else {
            tensor_integral(b, &s.ctx.grid, vol_integrand)?
        };
        for (i, (f, g)) in chunk.iter().enumerate() {
            let rhs = if interior { bp_rhs(part, s, f, g, x)? } else { CQ::ZERO };
            out.push(BpValue { boundary: bnd[i], volume: vol[i], rhs, interior });
        }
    }
    Ok(out)
}

/// `Σ_i (f+g)(q_0,…,x_i,…,q_3)` plus `ℳ` (potential form) or `𝒩[f] + 𝒩[g]` (weighted form).
pub fn bp_rhs(part: Part, s: &TheoremSetup<'_>, f: &Field, g: &Field, x: &Point4) -> Result<CQ> {
    let mut out = CQ::ZERO;
    for i in 0..4 {
        let mut y = s.q;
        y[i] = x[i];
        out += f.eval(&y) + g.eval(&y);
    }
    out += match part {
        Part::Potential => correction_m(s, f, g, x)?,
        Part::Weighted => correction_n(s.ctx, &FieldAt::new(f, s.q), x)? + correction_n(&s.beta_ctx(), &FieldAt::new(g, s.q), x)?,
    };
    Ok(out)
}

/// Residual reports of the perturbed Borel-Pompeiu formula for several pairs.
/// Interior points are judged against `max(|LHS|, |RHS|)`; exterior points, where the
/// formula gives zero, against `sup |f| + sup |g|`.
pub fn borel_pompeiu_perturbed_reports(part: Part, s: &TheoremSetup<'_>, pairs: &[(&Field, &Field)], x: &Point4) -> Result<Vec<IdentityReport>> {
    let vals = borel_pompeiu_perturbed_values(part, s, pairs, x)?;
    Ok(vals
        .iter()
        .zip(pairs)
        .map(|(v, (f, g))| {
            let where_ = if v.interior { "interior" } else { "exterior" };
            let rep = IdentityReport::new(&format!("borel-pompeiu-perturbed-{}-{where_}", part.tag()), &pair_name(f, g), s.ctx.grid.nodes_per_axis)
                .probe(*x);
            let lhs = v.lhs();
            if v.interior {
                rep.judge(lhs.max_abs_diff(v.rhs), lhs.abs().max(v.rhs.abs()), s.tol)
            } else {
                rep.judge(lhs.abs(), crate::fueter::sup_norm(&[f, g], &s.ctx.bx), s.tol)
            }
        })
        .collect())
}

pub fn borel_pompeiu_perturbed_residual(part: Part, s: &TheoremSetup<'_>, f: &Field, g: &Field, x: &Point4) -> Result<IdentityReport> {
    Ok(borel_pompeiu_perturbed_reports(part, s, &[(f, g)], x)?.remove(0))
}

// ---------------------------------------------------------------------------
// Cauchy corollaries

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Corollary {
    StokesPotential,
    StokesWeighted,
    BorelPompeiuPotential,
    BorelPompeiuWeighted,
}

impl Corollary {
    pub const ALL: [Corollary; 4] = [Corollary::StokesPotential, Corollary::StokesWeighted, Corollary::BorelPompeiuPotential, Corollary::BorelPompeiuWeighted];

    pub fn name(&self) -> &'static str {
        match self {
            Corollary::StokesPotential => "cauchy-stokes-potential",
            Corollary::StokesWeighted => "cauchy-stokes-weighted",
            Corollary::BorelPompeiuPotential => "cauchy-borel-pompeiu-potential",
            Corollary::BorelPompeiuWeighted => "cauchy-borel-pompeiu-weighted",
        }
    }

    fn part(&self) -> Part {
        match self {
            Corollary::StokesPotential | Corollary::BorelPompeiuPotential => Part::Potential,
            _ => Part::Weighted,
        }
    }
}

/// Operator residuals above this level mean the corollary's hypothesis fails.
pub const NULL_GATE: f64 = 1e-3;

fn lattice(b: &Box4, n: usize) -> Vec<Point4> {
    let mut pts = Vec::with_capacity(n.pow(4));
    for idx in 0..n.pow(4) {
        let mut r = idx;
        let mut y = [0.0; 4];
        for k in 0..4 {
            y[k] = b.lo[k] + b.edge(k) * ((r % n) as f64 + 0.5) / n as f64;
            r /= n;
        }
        pts.push(y);
    }
    pts
}

/// `max |𝔇f| + max |𝔇_r g|` of the perturbed operators of `part` over an interior lattice.
pub fn operator_residual(part: Part, s: &TheoremSetup<'_>, f: &Field, g: &Field) -> Result<f64> {
    let p = Prepared::new(s, part, f, g)?;
    let pts = lattice(&s.ctx.bx, 4);
    let (mut a, mut b) = (0.0f64, 0.0f64);
    for y in &pts {
        a = a.max(p.f_op(y).abs());
        b = b.max(p.g_op(y).abs());
    }
    Ok(a + b)
}

/// Implication check for the Cauchy corollaries.
///
/// Exact null data report zero. When the measured operator residual `r_op` exceeds
/// [`NULL_GATE`] the hypothesis fails and the check is `NotApplicable`. Otherwise the
/// boundary term `B` must satisfy `B ≤ C·r_op + q`, where `C` bounds the volume term
/// per unit operator residual and `q` is the measured quadrature residual of the
/// underlying formula.
pub fn cauchy_corollary_check(which: Corollary, s: &TheoremSetup<'_>, f: &Field, g: &Field, x: &Point4) -> Result<IdentityReport> {
    let part = which.part();
    let b = &s.ctx.bx;
    let rep = IdentityReport::new(which.name(), &pair_name(f, g), s.ctx.grid.nodes_per_axis).probe(*x);
    let zero = |h: &Field| lattice(b, 3).iter().all(|y| h.eval(y).is_zero());
    if zero(f) && zero(g) {
        return Ok(rep.judge(0.0, 1.0, 1.0).note("exact null data"));
    }
    let r_op = operator_residual(part, s, f, g)?;
    if r_op > NULL_GATE {
        return Ok(rep.not_applicable(format!("operators do not vanish: r_op = {r_op:.3e}")));
    }
    match which {
        Corollary::StokesPotential | Corollary::StokesWeighted => {
            let (lhs, rhs) = stokes_perturbed_sides(part, s, f, g)?;
            let p = Prepared::new(s, part, f, g)?;
            let pts = lattice(b, 4);
            let (mut hf, mut hg) = (0.0f64, 0.0f64);
            let w = exp_weight(&s.ctx.psi, s.pert.u + s.pert.v);
            let mut wmax = 0.0f64;
            for y in &pts {
                hf = hf.max(p.f_pot(y)?.abs());
                hg = hg.max(p.g_pot(y)?.abs());
                wmax = wmax.max(if part == Part::Weighted { w(y).norm() } else { 1.0 });
            }
            let c = b.volume() * wmax * (hf + hg);
            let q = lhs.max_abs_diff(rhs);
            let bound = c * r_op + q;
            Ok(rep.judge(lhs.abs(), bound.max(1e-300), 1.0).note(format!("C = {c:.6e}, r_op = {r_op:.3e}, q = {q:.3e}")))
        }
        Corollary::BorelPompeiuPotential | Corollary::BorelPompeiuWeighted => {
            if !b.contains_strict(x) {
                return Err(Error::UndefinedOnBoundary);
            }
            let v = borel_pompeiu_perturbed_values(part, s, &[(f, g)], x)?[0];
            // C = ∫ (|α-kernel| + |β-kernel|) over the box with the same rule
            let c: f64 = duffy_volume(b, x, s.corner.order.unwrap_or(s.ctx.grid.nodes_per_axis), &s.corner, &|y: &Point4| {
                let (ka, kb) = kernels(part, s, y, x)?;
                Ok(ka.abs() + kb.abs())
            })?;
            let q = v.lhs().max_abs_diff(v.rhs);
            let bound = c * r_op + q;
            let gap = v.boundary.max_abs_diff(v.rhs);
            Ok(rep.judge(gap, bound.max(1e-300), 1.0).note(format!("C = {c:.6e}, r_op = {r_op:.3e}, q = {q:.3e}")))
        }
    }
}

/// The diagonal case `x = q` of the Borel-Pompeiu formula, whose right-hand side
/// reads `4(f+g)(q)` plus the correction. Runs the full formula, so it applies to
/// any data.
pub fn diagonal_factor_four(part: Part, s: &TheoremSetup<'_>, f: &Field, g: &Field) -> Result<IdentityReport> {
    let x = s.q;
    let v = borel_pompeiu_perturbed_values(part, s, &[(f, g)], &x)?[0];
    let corr = match part {
        Part::Potential => correction_m(s, f, g, &x)?,
        Part::Weighted => correction_n(s.ctx, &FieldAt::new(f, s.q), &x)? + correction_n(&s.beta_ctx(), &FieldAt::new(g, s.q), &x)?,
    };
    let want = (f.eval(&x) + g.eval(&x)).scale(4.0) + corr;
    let lhs = v.lhs();
    Ok(IdentityReport::new(&format!("cauchy-borel-pompeiu-{}-diagonal", part.tag()), &pair_name(f, g), s.ctx.grid.nodes_per_axis)
        .probe(x)
        .judge(lhs.max_abs_diff(want), lhs.abs().max(want.abs()), s.tol))
}

/// `f = δ·𝔍[h](q, ·)` as a field: small data whose perturbed-operator images are small.
pub fn near_null_field(ctx: &FracContext, h: &Field, q: &Point4, delta: f64) -> Result<Field> {
    let at = FieldAt::new(h, *q);
    let gamma = std::array::from_fn(|k| ctx.alpha.get(k));
    let tab = AxisTable::build(&ctx.bx, gamma, table_nodes(ctx), |k, t| {
        if t <= ctx.bx.lo[k] {
            return Ok(CQ::ZERO);
        }
        crate::fracfueter::j_component(ctx, &at, k, t)
    })?;
    Ok(Field::new(&format!("near-null-{}", h.name), move |y| tab.eval(y).scale(delta)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::fracfueter::frac_fueter_left;
    use crate::quadrature::Rule;
    use crate::special::gamma_real;

    fn q(x0: f64, x1: f64, x2: f64, x3: f64) -> CQ {
        CQ::real(Quaternion::new(x0, x1, x2, x3))
    }

    fn ctx(a: f64, n: usize) -> FracContext {
        FracContext::new(StructuralSet::standard(), FracOrderVec::uniform(a).unwrap(), Box4::unit(), QuadratureSpec::gauss(n))
    }

    #[test]
    fn multiplication_operators() {
        let i = Field::constant("i", q(0.0, 1.0, 0.0, 0.0));
        let j = Field::constant("j", q(0.0, 0.0, 1.0, 0.0));
        let one = Field::constant("one", CQ::ONE);
        let x = [0.2; 4];
        assert_eq!(left_mul(&i, &j).eval(&x), q(0.0, 0.0, 0.0, 1.0));
        assert_eq!(left_mul(&j, &i).eval(&x), q(0.0, 0.0, 0.0, -1.0));
        assert_eq!(right_mul(&i, &j).eval(&x), q(0.0, 0.0, 0.0, -1.0));
        let f = corpus::field("quadratic").unwrap();
        assert_eq!(left_mul(&one, &f).eval(&x), f.eval(&x));
        let m = left_mul(&corpus::field("x1").unwrap(), &f).partials_mismatch(&[[0.3, 0.4, 0.5, 0.6]], 1e-3).unwrap();
        assert!(m < 1e-9);
    }

    #[test]
    fn perturbed_operator_examples() {
        let c = ctx(0.5, 8);
        let cst = q(1.0, 2.0, -1.0, 0.5);
        let f = Field::constant("c", cst);
        let p = AnchoredPoint::new(&c.bx, [0.5; 4], [1.0; 4]).unwrap();
        let base = frac_fueter_left(&c, &f, &p).unwrap();
        assert_eq!(perturbed_frac_fueter_left(&c, &Perturbation::ZERO, &f, &p).unwrap(), base);
        let u = q(0.0, 0.3, -0.2, 0.1);
        let got = perturbed_frac_fueter_left(&c, &Perturbation::new(u, CQ::ZERO), &f, &p).unwrap();
        assert!(got.max_abs_diff(base + u * cst) < 1e-14);
        let printed = c.with_potential(PotentialForm::Printed);
        let got = perturbed_frac_fueter_left(&printed, &Perturbation::new(CQ::ZERO, CQ::ONE), &f, &p).unwrap();
        let want = base + cst.scale(4.0 / (1.5 * gamma_real(0.5)));
        assert!(got.max_abs_diff(want) < 1e-12);
    }

    #[test]
    fn perturbation_adds_u_times_value() {
        let c = ctx(0.5, 8);
        let u = q(0.2, -0.1, 0.4, 0.3);
        let p = AnchoredPoint::new(&c.bx, [0.4, 0.6, 0.5, 0.3], [0.7, 0.35, 0.8, 0.6]).unwrap();
        for f in corpus::all() {
            for side in [Side::Left, Side::Right] {
                let at = FieldAt::new(&f, p.q);
                let d0 = perturbed_frac_fueter(&c, side, &Perturbation::ZERO, &at, &p.x).unwrap();
                let d1 = perturbed_frac_fueter(&c, side, &Perturbation::new(u, CQ::ZERO), &at, &p.x).unwrap();
                assert_eq!(d1 - d0, mul_side(side, u, f.eval(&p.x)) + d0 - d0);
            }
        }
    }

    #[test]
    fn potential_reductions() {
        let c = ctx(0.5, 6);
        let f = corpus::field("exp-sin").unwrap();
        let p = AnchoredPoint::new(&c.bx, [0.5; 4], [0.6, 0.7, 0.4, 0.55]).unwrap();
        let plain = cal_i(&c, &FieldAt::new(&f, p.q), &p.x).unwrap();
        assert_eq!(h_potential(&c, Side::Left, CQ::ZERO, &f, &p).unwrap(), plain);
        assert!(h_potential(&c, Side::Left, q(0.0, 1.0, 0.0, 0.0), &Field::zero(), &p).unwrap().is_zero());
    }

    #[test]
    fn expanded_potential_matches_sum_of_parts() {
        let c = ctx(0.5, 8).with_potential(PotentialForm::Printed);
        let u = CQ::new(Quaternion::new(0.1, 0.3, 0.0, -0.2), Quaternion::new(0.0, 0.1, 0.2, 0.0));
        let p = AnchoredPoint::new(&c.bx, [0.5; 4], [0.7, 0.8, 0.6, 0.75]).unwrap();
        let jx = Box4::new(c.bx.lo, p.x).unwrap();
        for name in ["const", "quadratic", "exp-sin"] {
            let f = corpus::field(name).unwrap();
            for side in [Side::Left, Side::Right] {
                let single = h_potential_expanded(&c, side, u, &f, &p, 10).unwrap();
                // ℐ plus the kernel integral over J_a^x, which is −𝒯 on that box
                let t = teodorescu(&c.psi, &|y| Ok(mul_side(side, u, f.eval(y))), &jx, &p.x, &QuadratureSpec::gauss(10), side).unwrap();
                let split = cal_i(&c, &FieldAt::new(&f, p.q), &p.x).unwrap() - t;
                assert!(single.max_abs_diff(split) < 1e-3 * split.abs(), "{name} {side:?}: {single:?} vs {split:?}");
            }
        }
    }

    #[test]
    fn kernel_near_order_one_is_the_partial_sum() {
        let psi = StructuralSet::rotated([1.0, 2.0, 2.0], 0.7).unwrap();
        let a = [0.0; 4];
        let tau = [1.0, 0.2, 0.9, 0.0];
        let x = [0.4, 0.6, 0.3, 0.5];
        let al = FracOrderVec::uniform(1.0 - 1e-6).unwrap();
        let got = frac_cauchy_kernel(&psi, &al, &a, &tau, &x, 24, 1e-9).unwrap();
        let w: Point4 = std::array::from_fn(|k| tau[k] - x[k]);
        let want = (0..4).fold(CQ::ZERO, |acc, i| acc - kernel_with_partial(&psi, &w, i).1);
        assert!(got.max_abs_diff(want) < 1e-3 * want.abs(), "{got:?} vs {want:?}");

        let u = q(0.3, -0.2, 0.1, 0.4);
        let got = exp_cauchy_kernel(&psi, &al, u, &a, &tau, &x, 24, 1e-9).unwrap();
        let uc = psi.coords(u);
        let damped = |x: &Point4| {
            let w: Point4 = std::array::from_fn(|k| tau[k] - x[k]);
            let e = (0..4).map(|k| uc[k] * w[k]).sum::<Complex64>().exp();
            crate::fueter::cauchy_kernel(&psi, &w).unwrap().mul_complex(e)
        };
        let h = 1e-4;
        let mut want = CQ::ZERO;
        for i in 0..4 {
            let (mut p, mut m) = (x, x);
            p[i] += h;
            m[i] -= h;
            want += (damped(&p) - damped(&m)).scale(0.5 / h);
        }
        assert!(got.max_abs_diff(want) < 1e-3 * want.abs(), "{got:?} vs {want:?}");
        assert_eq!(exp_cauchy_kernel(&psi, &al, CQ::ZERO, &a, &tau, &x, 24, 1e-9).unwrap(), frac_cauchy_kernel(&psi, &al, &a, &tau, &x, 24, 1e-9).unwrap());
    }

    #[test]
    fn kernel_matches_product_integration_oracle() {
        let psi = StructuralSet::standard();
        let a = [0.0; 4];
        let tau = [1.3, 0.9, -0.4, 1.1];
        let x = [0.5, 0.45, 0.6, 0.35];
        let al = FracOrderVec::uniform(0.5).unwrap();
        let got = frac_cauchy_kernel(&psi, &al, &a, &tau, &x, 24, 1e-9).unwrap();
        let spec = QuadratureSpec::gauss(8).with_rule(Rule::GradedTrapezoid).with_segment_nodes(400);
        let mut want = CQ::ZERO;
        for i in 0..4 {
            let w_at = |t: f64| {
                let mut y = x;
                y[i] = t;
                std::array::from_fn::<f64, 4, _>(|k| tau[k] - y[k])
            };
            let p = |t: f64| kernel_with_partial(&psi, &w_at(t), i).0;
            let dp = |t: f64| -kernel_with_partial(&psi, &w_at(t), i).1;
            let seg = Segment::new(0.0, 1.0).unwrap();
            want += rl_derivative_left(&Profile1D::with_derivative(&p, &dp), FracOrder::real(0.5).unwrap(), &seg, x[i], &spec).unwrap();
        }
        assert!(got.max_abs_diff(want) < 1e-3 * want.abs(), "{got:?} vs {want:?}");
    }

    #[test]
    fn kernel_rejects_paths_through_the_pole() {
        let psi = StructuralSet::standard();
        let al = FracOrderVec::uniform(0.5).unwrap();
        let x = [0.5; 4];
        let tau = [0.2, 0.5, 0.5, 0.5];
        assert_eq!(frac_cauchy_kernel(&psi, &al, &[0.0; 4], &tau, &x, 16, 1e-6), Err(Error::SingularPath));
        let outside = [2.0, 1.5, -0.3, 0.2];
        assert!(frac_cauchy_kernel(&psi, &al, &[0.0; 4], &outside, &x, 16, 1e-6).unwrap().is_finite());
    }

    #[test]
    fn corrections_on_constants() {
        let c = ctx(0.5, 8);
        let cst = q(1.0, 2.0, -1.0, 0.5);
        let f = Field::constant("c", cst);
        let x = [1.0; 4];
        let n = correction_n(&c, &FieldAt::new(&f, [0.5; 4]), &x).unwrap();
        let want = cst.scale(12.0 * 1.1283791670955126 * 0.5641895835477563);
        assert!(n.max_abs_diff(want) < 1e-3 * want.abs());
        assert!(correction_n(&c, &FieldAt::new(&Field::zero(), [0.5; 4]), &x).unwrap().is_zero());
        let s = TheoremSetup::new(&c, c.alpha, Perturbation::ZERO, [0.5; 4]);
        let m = correction_m(&s, &f, &Field::zero(), &x).unwrap();
        assert_eq!(m, n);
        assert!(correction_m(&s, &Field::zero(), &Field::zero(), &x).unwrap().is_zero());
        assert!(matches!(correction_n(&c, &FieldAt::new(&f, [0.5; 4]), &[0.0, 1.0, 1.0, 1.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn zero_data_gives_zero_residuals() {
        let c = ctx(0.5, 4);
        let z = Field::zero();
        let s = TheoremSetup::new(&c, c.alpha, Perturbation::new(q(0.3, 0.0, 0.0, 0.0), q(0.0, 0.2, 0.0, 0.0)), [0.5; 4]);
        for part in [Part::Potential, Part::Weighted] {
            let (l, r) = stokes_perturbed_sides(part, &s, &z, &z).unwrap();
            assert!(l.is_zero() && r.is_zero());
            let v = borel_pompeiu_perturbed_values(part, &s, &[(&z, &z)], &[0.5; 4]).unwrap()[0];
            assert!(v.lhs().is_zero() && v.rhs.is_zero());
        }
        for which in Corollary::ALL {
            let r = cauchy_corollary_check(which, &s, &z, &z, &[0.5; 4]).unwrap();
            assert!(r.passed() && r.residual_abs == 0.0);
        }
    }

    #[test]
    fn corollary_skipped_when_operators_do_not_vanish() {
        let c = ctx(0.5, 4);
        let f = Field::constant("c", q(1.0, 2.0, -1.0, 0.5));
        let s = TheoremSetup::new(&c, c.alpha, Perturbation::ZERO, [0.5; 4]);
        let r = cauchy_corollary_check(Corollary::BorelPompeiuWeighted, &s, &f, &Field::zero(), &[0.5; 4]).unwrap();
        assert_eq!(r.status, crate::report::Status::NotApplicable);
    }

    #[test]
    fn boundary_points_are_rejected() {
        let c = ctx(0.5, 4);
        let f = Field::constant("c", CQ::ONE);
        let s = TheoremSetup::new(&c, c.alpha, Perturbation::ZERO, [0.5; 4]);
        assert!(matches!(borel_pompeiu_perturbed_residual(Part::Weighted, &s, &f, &f, &[1.0, 0.5, 0.5, 0.5]), Err(Error::UndefinedOnBoundary)));
    }

    #[test]
    fn axis_tables_match_direct_evaluation() {
        let c = ctx(0.5, 8).with_psi(StructuralSet::rotated([1.0, 2.0, 2.0], 0.7).unwrap());
        let qa = [0.5; 4];
        let probes = corpus::anchors(&c.bx, 6, 3);
        for f in corpus::all() {
            let at = FieldAt::new(&f, qa);
            let it = potential_table(&c, &f, &qa).unwrap();
            for side in [Side::Left, Side::Right] {
                let dt = fueter_table(&c, side, &f, &qa).unwrap();
                for y in &probes {
                    let d = frac_fueter(&c, side, &at, y).unwrap();
                    assert!(dt.eval(y).max_abs_diff(d) < 1e-11 * d.abs().max(1.0), "{} {side:?}", f.name);
                }
            }
            for y in &probes {
                let i = cal_i(&c, &at, y).unwrap();
                assert!(it.eval(y).max_abs_diff(i) < 1e-11 * i.abs().max(1.0), "{}", f.name);
            }
        }
    }

    #[test]
    #[ignore = "the alpha -> 1 limit of the theorem is a different identity from the classical formula; see the decisions ledger"]
    fn theorem_tends_to_classical_formula_near_order_one() {
        let c = FracContext::new(
            StructuralSet::standard(),
            FracOrderVec::uniform(1.0 - 1e-3).unwrap(),
            Box4::unit(),
            QuadratureSpec::gauss(6).with_grading(2.0),
        );
        let f = corpus::field("one-plus-x0").unwrap();
        let z = Field::zero();
        let x = [0.4, 0.55, 0.6, 0.45];
        let s = TheoremSetup::new(&c, c.alpha, Perturbation::ZERO, [0.5; 4]);
        let frac = borel_pompeiu_perturbed_residual(Part::Potential, &s, &f, &z, &x).unwrap();
        let spec = QuadratureSpec::gauss(6).with_exclusion(crate::quadrature::Exclusion::Auto);
        let classical = crate::fueter::borel_pompeiu_classical_residual(&c.psi, &f, &z, &c.bx, &x, &spec, 1.0).unwrap();
        let gap = (frac.residual_rel - classical.residual_rel).abs();
        assert!(gap <= 0.1 * classical.residual_rel, "{} vs {}", frac.residual_rel, classical.residual_rel);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn cq() -> impl Strategy<Value = CQ> {
            prop::array::uniform8(-1.0f64..1.0).prop_map(|a| {
                CQ::new(Quaternion::new(a[0], a[1], a[2], a[3]), Quaternion::new(a[4], a[5], a[6], a[7]))
            })
        }

        fn point() -> impl Strategy<Value = Point4> {
            prop::array::uniform4(0.15f64..0.95)
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn shift_by_u_is_exact(u in cq(), x in point(), k in 0usize..8) {
                let c = ctx(0.5, 4);
                let f = corpus::field(corpus::NAMES[k]).unwrap();
                let at = FieldAt::new(&f, [0.5; 4]);
                for side in [Side::Left, Side::Right] {
                    let d0 = frac_fueter(&c, side, &at, &x).unwrap();
                    let d1 = perturbed_frac_fueter(&c, side, &Perturbation::new(u, CQ::ZERO), &at, &x).unwrap();
                    prop_assert_eq!(d1, d0 + mul_side(side, u, f.eval(&x)));
                    prop_assert_eq!(perturbed_frac_fueter(&c, side, &Perturbation::ZERO, &at, &x).unwrap(), d0);
                }
            }

            #[test]
            fn kernels_reduce_without_perturbation(tau in prop::array::uniform4(1.1f64..2.0), x in point()) {
                let psi = StructuralSet::flipped();
                let al = FracOrderVec::uniform(0.4).unwrap();
                let a = [0.0; 4];
                prop_assert_eq!(
                    exp_cauchy_kernel(&psi, &al, CQ::ZERO, &a, &tau, &x, 12, 1e-9).unwrap(),
                    frac_cauchy_kernel(&psi, &al, &a, &tau, &x, 12, 1e-9).unwrap()
                );
            }

            #[test]
            fn n_correction_is_m_without_perturbation(x in point(), k in 0usize..8) {
                let c = ctx(0.5, 4);
                let f = corpus::field(corpus::NAMES[k]).unwrap();
                let s = TheoremSetup::new(&c, c.alpha, Perturbation::ZERO, [0.5; 4]);
                prop_assert_eq!(correction_m(&s, &f, &Field::zero(), &x).unwrap(), correction_n(&c, &FieldAt::new(&f, [0.5; 4]), &x).unwrap());
            }
        }
    }
}
