//! Fractional ψ-Fueter operators anchored at a frozen point `q`, the associated
//! potentials and the operator identities between them.
//!
//! An anchored operator sees a function only through its four axis profiles
//! `t ↦ f(q_0, …, t, …, q_3)`. Results of these operators are sums `Σ_k s_k(x_k)`
//! of one-variable functions; composing a second anchored operator with such a
//! result acts on the summands `s_k` axis by axis (see [`Anchored`]).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fraccalc::{rl_derivative_left, rl_integral_left, FracOrder, Profile1D, Segment};
use crate::fueter::{fd_partial, fd_second, Field, FdStep, Side};
use crate::hypercomplex::{StructuralSet, CQ};
use crate::quadrature::{tensor_integral, Box4, Point4, QuadratureSpec};
use crate::report::IdentityReport;
use crate::special::rgamma;

const NAN: CQ = CQ::new(
    crate::hypercomplex::Quaternion::new(f64::NAN, 0.0, 0.0, 0.0),
    crate::hypercomplex::Quaternion::ZERO,
);

/// Four derivative orders, each with `0 < Re < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FracOrderVec(pub [Complex64; 4]);

impl FracOrderVec {
    pub fn new(a: [Complex64; 4]) -> Result<Self> {
        for v in a {
            FracOrder::derivative(v)?;
        }
        Ok(FracOrderVec(a))
    }

    pub fn uniform(a: f64) -> Result<Self> {
        FracOrderVec::new([Complex64::new(a, 0.0); 4])
    }

    pub fn from_reals(a: [f64; 4]) -> Result<Self> {
        FracOrderVec::new(a.map(|v| Complex64::new(v, 0.0)))
    }

    pub fn get(&self, k: usize) -> Complex64 {
        self.0[k]
    }

    /// `α + β`, required to stay in the derivative strip.
    pub fn sum(&self, o: &FracOrderVec) -> Result<FracOrderVec> {
        let s: [Complex64; 4] = std::array::from_fn(|k| self.0[k] + o.0[k]);
        if s.iter().any(|v| v.re >= 1.0) {
            return Err(Error::OrderOutOfRange(format!("composite orders need Re(α+β) < 1, got {s:?}")));
        }
        FracOrderVec::new(s)
    }
}

/// Anchor `q` and active point `x`, both in the closed box, with `x_k > a_k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnchoredPoint {
    pub q: Point4,
    pub x: Point4,
}

impl AnchoredPoint {
    pub fn new(b: &Box4, q: Point4, x: Point4) -> Result<Self> {
        if !b.contains(&q) || !b.contains(&x) {
            return Err(Error::Domain("anchor and point must lie in the box".into()));
        }
        check_above_corner(b, &x)?;
        Ok(AnchoredPoint { q, x })
    }

    pub fn diagonal(b: &Box4, q: Point4) -> Result<Self> {
        AnchoredPoint::new(b, q, q)
    }
}

fn check_above_corner(b: &Box4, x: &Point4) -> Result<()> {
    for k in 0..4 {
        if !(x[k] > b.lo[k]) {
            return Err(Error::Domain(format!("x_{k} = {} must exceed a_{k} = {}", x[k], b.lo[k])));
        }
    }
    Ok(())
}

/// Which closed form backs `ℐ`.
///
/// `FueterPrimitive` uses `Σ_k I^{1−α_k}[f_k](x_k)`, whose classical Fueter
/// derivative is the fractional one. `Printed` is
/// `(1/m(J_a^x)) ∫_{J_a^x} Σ_k f(q_{τ,k}) (x_k−τ_k)^{α_k}/Γ(α_k) dτ`, reduced to
/// `Σ_k α_k I^{1+α_k}[f_k](x_k)/(x_k−a_k)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum PotentialForm {
    #[default]
    FueterPrimitive,
    Printed,
}

#[derive(Clone, Debug)]
pub struct FracContext {
    pub psi: StructuralSet,
    pub alpha: FracOrderVec,
    pub bx: Box4,
    pub grid: QuadratureSpec,
    pub potential: PotentialForm,
}

impl FracContext {
    pub fn new(psi: StructuralSet, alpha: FracOrderVec, bx: Box4, grid: QuadratureSpec) -> Self {
        FracContext { psi, alpha, bx, grid, potential: PotentialForm::default() }
    }

    pub fn with_alpha(&self, alpha: FracOrderVec) -> Self {
        FracContext { alpha, ..self.clone() }
    }

    pub fn with_psi(&self, psi: StructuralSet) -> Self {
        FracContext { psi, ..self.clone() }
    }

    pub fn with_potential(&self, potential: PotentialForm) -> Self {
        FracContext { potential, ..self.clone() }
    }

    /// The conjugate-frame context used for `ψ̄𝔇`.
    pub fn conjugate(&self) -> Self {
        self.with_psi(self.psi.conjugate())
    }

    fn seg(&self, k: usize, t: f64) -> Segment {
        Segment { a: self.bx.lo[k], b: self.bx.hi[k].max(t) }
    }

    /// Difference step tied to the grid: `max edge / (4·nodes)`.
    pub fn fd_h(&self) -> f64 {
        self.bx.max_edge() / (4.0 * self.grid.nodes_per_axis as f64)
    }

    fn psi_q(&self, k: usize) -> CQ {
        CQ::real(self.psi.get(k))
    }
}

/// A function seen through an anchor.
///
/// `profile(k, t)` is what an axis-`k` operator differentiates or integrates.
/// For a plain field this is `f(q_0, …, t, …, q_3)`; for an operator result
/// `Σ_j s_j(x_j)` it is the summand `s_k`. `value` is the function at a point.
pub trait Anchored: Sync {
    fn profile(&self, k: usize, t: f64) -> CQ;
    fn profile_derivative(&self, _k: usize, _t: f64) -> Option<CQ> {
        None
    }
    fn has_profile_derivative(&self) -> bool {
        false
    }
    fn value(&self, x: &Point4) -> CQ;
}

/// A field frozen at the anchor `q`.
pub struct FieldAt<'a> {
    pub f: &'a Field,
    pub q: Point4,
}

impl<'a> FieldAt<'a> {
    pub fn new(f: &'a Field, q: Point4) -> Self {
        FieldAt { f, q }
    }

    fn at(&self, k: usize, t: f64) -> Point4 {
        let mut y = self.q;
        y[k] = t;
        y
    }
}

impl Anchored for FieldAt<'_> {
    fn profile(&self, k: usize, t: f64) -> CQ {
        self.f.eval(&self.at(k, t))
    }
    fn profile_derivative(&self, k: usize, t: f64) -> Option<CQ> {
        self.f.analytic_grad(&self.at(k, t)).map(|g| g[k])
    }
    fn has_profile_derivative(&self) -> bool {
        self.f.has_partials()
    }
    fn value(&self, x: &Point4) -> CQ {
        self.f.eval(x)
    }
}

/// `Σ_k s_k(x_k)` given by `s(k, t)`.
pub struct Separable<S: Fn(usize, f64) -> CQ + Sync>(pub S);

impl<S: Fn(usize, f64) -> CQ + Sync> Anchored for Separable<S> {
    fn profile(&self, k: usize, t: f64) -> CQ {
        (self.0)(k, t)
    }
    fn value(&self, x: &Point4) -> CQ {
        (0..4).fold(CQ::ZERO, |acc, k| acc + (self.0)(k, x[k]))
    }
}

/// `Σ l_i·A_i·r_i` for constants `l_i, r_i`.
pub struct Combination<'a>(pub Vec<(CQ, &'a dyn Anchored, CQ)>);

impl Anchored for Combination<'_> {
    fn profile(&self, k: usize, t: f64) -> CQ {
        self.0.iter().fold(CQ::ZERO, |acc, (l, a, r)| acc + *l * a.profile(k, t) * *r)
    }
    fn profile_derivative(&self, k: usize, t: f64) -> Option<CQ> {
        let mut acc = CQ::ZERO;
        for (l, a, r) in &self.0 {
            acc += *l * a.profile_derivative(k, t)? * *r;
        }
        Some(acc)
    }
    fn has_profile_derivative(&self) -> bool {
        self.0.iter().all(|(_, a, _)| a.has_profile_derivative())
    }
    fn value(&self, x: &Point4) -> CQ {
        self.0.iter().fold(CQ::ZERO, |acc, (l, a, r)| acc + *l * a.value(x) * *r)
    }
}

/// `D^{α}` of the axis-`k` profile at `t`.
pub fn axis_derivative(ctx: &FracContext, alpha: Complex64, a: &dyn Anchored, k: usize, t: f64) -> Result<CQ> {
    let order = FracOrder::derivative(alpha)?;
    let p = |s: f64| a.profile(k, s);
    let dp = |s: f64| a.profile_derivative(k, s).unwrap_or(NAN);
    let prof = if a.has_profile_derivative() { Profile1D::with_derivative(&p, &dp) } else { Profile1D::new(&p) };
    let out = rl_derivative_left(&prof, order, &ctx.seg(k, t), t, &ctx.grid)?;
    finite(out)
}

/// `I^{β}` of the axis-`k` profile at `t`.
pub fn axis_integral(ctx: &FracContext, beta: Complex64, a: &dyn Anchored, k: usize, t: f64) -> Result<CQ> {
    let p = |s: f64| a.profile(k, s);
    finite(rl_integral_left(&p, FracOrder::integral(beta)?, &ctx.seg(k, t), t, &ctx.grid)?)
}

fn finite(v: CQ) -> Result<CQ> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain("non-finite value in a fractional profile".into()))
    }
}

fn frame_mul(ctx: &FracContext, side: Side, k: usize, v: CQ) -> CQ {
    match side {
        Side::Left => ctx.psi_q(k) * v,
        Side::Right => v * ctx.psi_q(k),
    }
}

/// `ψ𝔇^{α}[A](q, x) = Σ_k ψ_k D^{α_k}[A_k](x_k)` (right: `ψ_k` on the right).
pub fn frac_fueter(ctx: &FracContext, side: Side, a: &dyn Anchored, x: &Point4) -> Result<CQ> {
    check_above_corner(&ctx.bx, x)?;
    let mut out = CQ::ZERO;
    for k in 0..4 {
        out += frame_mul(ctx, side, k, axis_derivative(ctx, ctx.alpha.get(k), a, k, x[k])?);
    }
    Ok(out)
}

pub fn frac_fueter_left(ctx: &FracContext, f: &Field, p: &AnchoredPoint) -> Result<CQ> {
    frac_fueter(ctx, Side::Left, &FieldAt::new(f, p.q), &p.x)
}

pub fn frac_fueter_right(ctx: &FracContext, f: &Field, p: &AnchoredPoint) -> Result<CQ> {
    frac_fueter(ctx, Side::Right, &FieldAt::new(f, p.q), &p.x)
}

/// Axis-`k` summand of `𝔍`: `I^{α_k}[⟨ψ_k, A_k⟩](t)`, a complex scalar.
pub fn j_component(ctx: &FracContext, a: &dyn Anchored, k: usize, t: f64) -> Result<CQ> {
    let psi = &ctx.psi;
    let p = |s: f64| CQ::scalar(psi.coords(a.profile(k, s))[k]);
    finite(rl_integral_left(&p, FracOrder::integral(ctx.alpha.get(k))?, &ctx.seg(k, t), t, &ctx.grid)?)
}

/// `ψ𝔍^{α}[A](q, x) = Σ_j I^{α_j}[f_j](x_j)` with `f_j = ⟨ψ_j, f⟩`.
pub fn frac_integral_j(ctx: &FracContext, a: &dyn Anchored, x: &Point4) -> Result<CQ> {
    check_above_corner(&ctx.bx, x)?;
    let mut out = CQ::ZERO;
    for k in 0..4 {
        out += j_component(ctx, a, k, x[k])?;
    }
    Ok(out)
}

/// Axis-`k` summand of `ℐ` at `t`, following `ctx.potential`.
pub fn potential_component(ctx: &FracContext, a: &dyn Anchored, k: usize, t: f64) -> Result<CQ> {
    let al = ctx.alpha.get(k);
    let one = Complex64::new(1.0, 0.0);
    match ctx.potential {
        PotentialForm::FueterPrimitive => axis_integral(ctx, one - al, a, k, t),
        PotentialForm::Printed => {
            let d = t - ctx.bx.lo[k];
            if d <= 0.0 {
                return Ok(CQ::ZERO);
            }
            Ok(axis_integral(ctx, one + al, a, k, t)?.mul_complex(al / d))
        }
    }
}

/// `ψℐ_a^x[A](q, x, α)`.
pub fn cal_i(ctx: &FracContext, a: &dyn Anchored, x: &Point4) -> Result<CQ> {
    check_above_corner(&ctx.bx, x)?;
    let mut out = CQ::ZERO;
    for k in 0..4 {
        out += potential_component(ctx, a, k, x[k])?;
    }
    Ok(out)
}

/// The printed `ℐ` integrand averaged over `J_a^x` by a tensor rule.
pub fn cal_i_volume_oracle(ctx: &FracContext, f: &Field, p: &AnchoredPoint, spec: &QuadratureSpec) -> Result<CQ> {
    let jx = Box4::new(ctx.bx.lo, p.x)?;
    let g: [Complex64; 4] = std::array::from_fn(|k| rgamma(ctx.alpha.get(k)));
    let at = FieldAt::new(f, p.q);
    let s = tensor_integral(&jx, spec, |tau| {
        let mut acc = CQ::ZERO;
        for k in 0..4 {
            let w = crate::special::powc_pos(p.x[k] - tau[k], ctx.alpha.get(k)) * g[k];
            acc += at.profile(k, tau[k]).mul_complex(w);
        }
        Ok(acc)
    })?;
    Ok(s.scale(1.0 / jx.volume()))
}

/// `𝔇^{α}[A]` as a separable function for further composition.
pub fn d_view<'a>(ctx: &'a FracContext, side: Side, a: &'a dyn Anchored) -> Separable<impl Fn(usize, f64) -> CQ + Sync + 'a> {
    Separable(move |k, t| {
        axis_derivative(ctx, ctx.alpha.get(k), a, k, t).map(|v| frame_mul(ctx, side, k, v)).unwrap_or(NAN)
    })
}

/// `𝔍^{α}[A]` as a separable function.
pub fn j_view<'a>(ctx: &'a FracContext, a: &'a dyn Anchored) -> Separable<impl Fn(usize, f64) -> CQ + Sync + 'a> {
    Separable(move |k, t| j_component(ctx, a, k, t).unwrap_or(NAN))
}

/// `ℐ[A]` as a separable function.
pub fn i_view<'a>(ctx: &'a FracContext, a: &'a dyn Anchored) -> Separable<impl Fn(usize, f64) -> CQ + Sync + 'a> {
    Separable(move |k, t| potential_component(ctx, a, k, t).unwrap_or(NAN))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FracIdentity {
    FueterOfPotential,
    FueterOfIntegral,
    Recovery,
    Laplacian,
    Composition,
    ConjugateComposition,
}

impl FracIdentity {
    pub const ALL: [FracIdentity; 6] =
        [FracIdentity::FueterOfPotential, FracIdentity::FueterOfIntegral, FracIdentity::Recovery, FracIdentity::Laplacian, FracIdentity::Composition, FracIdentity::ConjugateComposition];

    pub fn name(&self) -> &'static str {
        match self {
            FracIdentity::FueterOfPotential => "fueter-of-potential",
            FracIdentity::FueterOfIntegral => "fueter-of-integral",
            FracIdentity::Recovery => "recovery",
            FracIdentity::Laplacian => "laplacian",
            FracIdentity::Composition => "composition",
            FracIdentity::ConjugateComposition => "conjugate-composition",
        }
    }

    pub fn needs_beta(&self) -> bool {
        matches!(self, FracIdentity::Composition | FracIdentity::ConjugateComposition)
    }
}

/// Inputs for one identity check.
#[derive(Clone, Copy)]
pub struct FracCheck<'a> {
    pub ctx: &'a FracContext,
    pub beta: Option<FracOrderVec>,
    pub f: &'a Field,
    pub point: AnchoredPoint,
    pub side: Side,
    pub tol: f64,
}

pub(crate) fn classical_fueter(psi: &StructuralSet, side: Side, g: &dyn Fn(&Point4) -> Result<CQ>, x: &Point4, fd: &FdStep) -> Result<CQ> {
    let mut out = CQ::ZERO;
    for k in 0..4 {
        let d = fd_partial(g, x, k, fd)?;
        let p = CQ::real(psi.get(k));
        out += match side {
            Side::Left => p * d,
            Side::Right => d * p,
        };
    }
    Ok(out)
}

pub(crate) fn laplacian(g: &dyn Fn(&Point4) -> Result<CQ>, x: &Point4, fd: &FdStep) -> Result<CQ> {
    let mut out = CQ::ZERO;
    for k in 0..4 {
        out += fd_second(g, x, k, fd)?;
    }
    Ok(out)
}

pub(crate) fn side_name(id: &str, side: Side) -> String {
    match side {
        Side::Left => id.to_string(),
        Side::Right => format!("{id}-right"),
    }
}

/// Evaluates both sides of a fractional identity and reports the residual.
pub fn verify_frac_identity(id: FracIdentity, c: &FracCheck<'_>) -> Result<IdentityReport> {
    let ctx = c.ctx;
    let side = c.side;
    let q = c.point.q;
    let x = if id == FracIdentity::Recovery { q } else { c.point.x };
    let at = FieldAt::new(c.f, q);
    let fd = FdStep::within(ctx.fd_h(), ctx.bx);
    let mut rep = IdentityReport::new(&side_name(id.name(), side), &c.f.name, ctx.grid.nodes_per_axis).probe(x);
    let (lhs, rhs) = match id {
        FracIdentity::FueterOfPotential => {
            rep = rep.fd_step(fd.h);
            let ii = |y: &Point4| cal_i(ctx, &at, y);
            (classical_fueter(&ctx.psi, side, &ii, &x, &fd)?, frac_fueter(ctx, side, &at, &x)?)
        }
        FracIdentity::FueterOfIntegral | FracIdentity::Recovery => {
            let jv = j_view(ctx, &at);
            let lhs = frac_fueter(ctx, side, &jv, &x)?;
            let rhs = if id == FracIdentity::Recovery {
                c.f.eval(&q)
            } else {
                (0..4).fold(CQ::ZERO, |acc, k| acc + ctx.psi_q(k).mul_complex(ctx.psi.coords(at.profile(k, x[k]))[k]))
            };
            (lhs, rhs)
        }
        FracIdentity::Laplacian => {
            rep = rep.fd_step(fd.h);
            let dd = |y: &Point4| frac_fueter(ctx, side, &at, y);
            let lhs = classical_fueter(&ctx.psi.conjugate(), side, &dd, &x, &fd)?;
            let ii = |y: &Point4| cal_i(ctx, &at, y);
            (lhs, laplacian(&ii, &x, &fd)?)
        }
        FracIdentity::Composition | FracIdentity::ConjugateComposition => {
            let beta = c.beta.ok_or_else(|| Error::OrderOutOfRange("composition identities need a second order vector".into()))?;
            let sum = ctx.alpha.sum(&beta)?;
            let inner_ctx = ctx.with_alpha(beta);
            let inner = d_view(&inner_ctx, side, &at);
            let outer = if id == FracIdentity::ConjugateComposition { ctx.conjugate() } else { ctx.clone() };
            let lhs = frac_fueter(&outer, side, &inner, &x)?;
            let mut rhs = CQ::ZERO;
            for k in 0..4 {
                let d = axis_derivative(ctx, sum.get(k), &at, k, x[k])?;
                let p = ctx.psi_q(k);
                rhs += match (id, side) {
                    (FracIdentity::ConjugateComposition, _) => d,
                    (_, Side::Left) => p * p * d,
                    (_, Side::Right) => d * p * p,
                };
            }
            (lhs, rhs)
        }
    };
    let scale = lhs.abs().max(rhs.abs());
    Ok(rep.judge(lhs.max_abs_diff(rhs), scale, c.tol))
}

/// A point for identity probes paired with anchor `q`: each coordinate moves
/// a tenth of the edge toward the box center.
pub fn probe_point(b: &Box4, q: &Point4) -> Point4 {
    let c = b.center();
    std::array::from_fn(|k| {
        let s = if q[k] <= c[k] { 1.0 } else { -1.0 };
        q[k] + 0.1 * b.edge(k) * s
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::hypercomplex::Quaternion;
    use crate::special::gamma_real;

    const INV_SQRT_PI: f64 = 0.5641895835477563;

    fn ctx(a: f64) -> FracContext {
        FracContext::new(StructuralSet::standard(), FracOrderVec::uniform(a).unwrap(), Box4::unit(), QuadratureSpec::gauss(8))
    }

    fn c0() -> CQ {
        CQ::real(Quaternion::new(1.0, 2.0, -1.0, 0.5))
    }

    #[test]
    fn constant_field_derivative() {
        let f = Field::constant("c", c0());
        let p = AnchoredPoint::new(&Box4::unit(), [0.5; 4], [1.0; 4]).unwrap();
        let got = frac_fueter_left(&ctx(0.5), &f, &p).unwrap();
        let want = CQ::real(Quaternion::new(1.0, 1.0, 1.0, 1.0)).scale(INV_SQRT_PI) * c0();
        assert!(got.max_abs_diff(want) < 1e-12, "{got:?}");
        assert!(frac_fueter_left(&ctx(0.5), &Field::zero(), &p).unwrap().is_zero());
    }

    #[test]
    fn coordinate_field_derivative() {
        let f = corpus::field("x1").unwrap();
        let q = [0.3, 0.4, 0.6, 0.2];
        let p = AnchoredPoint::new(&Box4::unit(), q, [1.0; 4]).unwrap();
        let got = frac_fueter_left(&ctx(0.5), &f, &p).unwrap();
        let want = CQ::real(Quaternion::new(q[1], 0.0, q[1], q[1]).scale(INV_SQRT_PI) + Quaternion::I.scale(2.0 * INV_SQRT_PI));
        assert!(got.max_abs_diff(want) < 1e-12, "{got:?}");
    }

    #[test]
    fn outside_corner_is_rejected() {
        let b = Box4::unit();
        assert!(matches!(AnchoredPoint::new(&b, [0.5; 4], [0.0, 0.5, 0.5, 0.5]), Err(Error::Domain(_))));
        let f = Field::constant("c", c0());
        let at = FieldAt::new(&f, [0.5; 4]);
        assert!(matches!(cal_i(&ctx(0.5), &at, &[0.5, 0.5, 0.0, 0.5]), Err(Error::Domain(_))));
    }

    #[test]
    fn integral_j_near_order_one() {
        let c = FracContext::new(StructuralSet::standard(), FracOrderVec::uniform(1.0 - 1e-6).unwrap(), Box4::unit(), QuadratureSpec::gauss(8));
        let f = Field::constant("one", CQ::ONE);
        let x = [0.7, 0.3, 0.4, 0.9];
        let got = frac_integral_j(&c, &FieldAt::new(&f, [0.5; 4]), &x).unwrap();
        assert!(got.max_abs_diff(CQ::scalar(Complex64::new(0.7, 0.0))) < 1e-5, "{got:?}");
        assert!(frac_integral_j(&c, &FieldAt::new(&Field::zero(), [0.5; 4]), &x).unwrap().is_zero());
    }

    #[test]
    fn printed_potential_constants() {
        let c = ctx(0.5).with_potential(PotentialForm::Printed);
        let f = Field::constant("c", c0());
        let p = AnchoredPoint::new(&Box4::unit(), [0.5; 4], [1.0; 4]).unwrap();
        let got = cal_i(&c, &FieldAt::new(&f, p.q), &p.x).unwrap();
        let want = c0().scale(4.0 / (1.5 * gamma_real(0.5)));
        assert!((want.abs() / c0().abs() - 1.5045056).abs() < 1e-7);
        assert!(got.max_abs_diff(want) < 1e-12);
        let oracle = cal_i_volume_oracle(&c, &f, &p, &QuadratureSpec::gauss(16)).unwrap();
        assert!(oracle.max_abs_diff(want) < 1e-3 * want.abs(), "{oracle:?}");

        let c1 = FracContext::new(StructuralSet::standard(), FracOrderVec::uniform(1.0 - 1e-6).unwrap(), Box4::unit(), QuadratureSpec::gauss(8))
            .with_potential(PotentialForm::Printed);
        let one = Field::constant("one", CQ::ONE);
        let v = cal_i(&c1, &FieldAt::new(&one, [0.5; 4]), &[1.0; 4]).unwrap();
        assert!((v.re.x0 - 2.0).abs() < 1e-4);
        assert!(cal_i(&c, &FieldAt::new(&Field::zero(), [0.5; 4]), &[1.0; 4]).unwrap().is_zero());
    }

    #[test]
    fn printed_potential_misses_the_fueter_relation() {
        let f = corpus::field("one-plus-x0").unwrap();
        let q = [0.5; 4];
        let point = AnchoredPoint::new(&Box4::unit(), q, probe_point(&Box4::unit(), &q)).unwrap();
        let check = |c: &FracContext| {
            verify_frac_identity(FracIdentity::FueterOfPotential, &FracCheck { ctx: c, beta: None, f: &f, point, side: Side::Left, tol: 1e-3 }).unwrap()
        };
        assert!(check(&ctx(0.5)).passed());
        assert!(check(&ctx(0.5).with_potential(PotentialForm::Printed)).residual_rel > 0.1);
    }

    #[test]
    fn diagonal_restriction_on_constants() {
        let f = Field::constant("c", c0());
        let point = AnchoredPoint::diagonal(&Box4::unit(), [0.4, 0.55, 0.6, 0.35]).unwrap();
        let r = verify_frac_identity(FracIdentity::Recovery, &FracCheck { ctx: &ctx(0.5), beta: None, f: &f, point, side: Side::Left, tol: 1e-6 }).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn semigroup_against_monomial_oracle() {
        let c = ctx(0.25);
        let beta = FracOrderVec::uniform(0.25).unwrap();
        let q = [0.35, 0.6, 0.45, 0.55];
        let x = probe_point(&c.bx, &q);
        let rt = |t: f64| t.sqrt() / gamma_real(1.5);
        let inv = 1.0 / gamma_real(0.5);
        for (k, name) in [(1usize, "x1"), (0, "one-plus-x0")] {
            let f = corpus::field(name).unwrap();
            let point = AnchoredPoint::new(&c.bx, q, x).unwrap();
            let chk = FracCheck { ctx: &c, beta: Some(beta), f: &f, point, side: Side::Left, tol: 1e-3 };
            let r = verify_frac_identity(FracIdentity::Composition, &chk).unwrap();
            assert!(r.passed(), "{r:?}");
            // Σ_j ψ_j² D^{1/2} f_j by closed forms
            let mut want = CQ::ZERO;
            for j in 0..4 {
                let t = x[j];
                let mut y = q;
                y[j] = t;
                let val = f.eval(&y).re.x0;
                let d = if j == k {
                    if name == "x1" { rt(t) } else { inv / t.sqrt() + rt(t) }
                } else {
                    val * inv / t.sqrt()
                };
                let p = CQ::real(c.psi.get(j));
                want += (p * p).scale(d);
            }
            let at = FieldAt::new(&f, q);
            let inner_ctx = c.with_alpha(beta);
            let lhs = frac_fueter(&c, Side::Left, &d_view(&inner_ctx, Side::Left, &at), &x).unwrap();
            assert!(lhs.max_abs_diff(want) < 1e-3 * want.abs(), "{name}: {lhs:?} vs {want:?}");
        }
    }

    #[test]
    fn composite_order_outside_strip() {
        let f = corpus::field("x1").unwrap();
        let point = AnchoredPoint::new(&Box4::unit(), [0.5; 4], [0.6; 4]).unwrap();
        let chk = FracCheck { ctx: &ctx(0.5), beta: Some(FracOrderVec::uniform(0.6).unwrap()), f: &f, point, side: Side::Left, tol: 1e-3 };
        assert!(matches!(verify_frac_identity(FracIdentity::Composition, &chk), Err(Error::OrderOutOfRange(_))));
    }

    #[test]
    fn identities_on_both_sides() {
        let c = ctx(0.25).with_psi(StructuralSet::rotated([1.0, 2.0, 2.0], 0.7).unwrap());
        let beta = FracOrderVec::uniform(0.25).unwrap();
        let q = [0.35, 0.6, 0.45, 0.55];
        let point = AnchoredPoint::new(&c.bx, q, probe_point(&c.bx, &q)).unwrap();
        for name in ["quadratic", "exp-sin", "complex-linear"] {
            let f = corpus::field(name).unwrap();
            for side in [Side::Left, Side::Right] {
                for id in FracIdentity::ALL {
                    let chk = FracCheck { ctx: &c, beta: Some(beta), f: &f, point, side, tol: 1e-3 };
                    let r = verify_frac_identity(id, &chk).unwrap();
                    assert!(r.passed(), "{name} {:?}", r);
                }
            }
        }
    }

    #[test]
    fn anchor_locality() {
        let f = corpus::field("exp-sin").unwrap();
        let q = [0.3, 0.45, 0.6, 0.5];
        let inner = f.clone();
        let mutated = Field::new("mutated", move |y| {
            let off = (0..4).filter(|&k| y[k] != q[k]).count();
            let v = inner.eval(y);
            if off >= 2 { v + CQ::ONE.scale(1e3) } else { v }
        });
        let point = AnchoredPoint::new(&Box4::unit(), q, [0.8, 0.7, 0.9, 0.65]).unwrap();
        let plain = Field::new("plain", move |y| f.eval(y));
        let a = frac_fueter_left(&ctx(0.5), &plain, &point).unwrap();
        let b = frac_fueter_left(&ctx(0.5), &mutated, &point).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn frame_equivariance_for_scalar_fields() {
        let f = corpus::field("one-plus-x0").unwrap();
        let q = [0.3, 0.45, 0.6, 0.5];
        let point = AnchoredPoint::new(&Box4::unit(), q, [0.8, 0.7, 0.9, 0.65]).unwrap();
        let rot = StructuralSet::rotated([0.0, 1.0, 1.0], 1.1).unwrap();
        let got = frac_fueter_left(&ctx(0.5).with_psi(rot), &f, &point).unwrap();
        let at = FieldAt::new(&f, q);
        let mut want = CQ::ZERO;
        for k in 0..4 {
            let d = axis_derivative(&ctx(0.5), Complex64::new(0.5, 0.0), &at, k, point.x[k]).unwrap();
            want += CQ::real(rot.get(k)) * d;
        }
        assert_eq!(got, want);
    }
}
