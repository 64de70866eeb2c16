//! Fixed test fields, frames, anchors and perturbations.
//!
//! The corpus is versioned: changing any field changes [`CORPUS_VERSION`].

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fueter::Field;
use crate::hypercomplex::{Quaternion, StructuralSet, CQ};
use crate::quadrature::{Box4, Point4};

pub const CORPUS_VERSION: u32 = 1;

/// Default seed for anchors and perturbations.
pub const DEFAULT_SEED: u64 = 20_211_188;

fn q(x0: f64, x1: f64, x2: f64, x3: f64) -> CQ {
    CQ::real(Quaternion::new(x0, x1, x2, x3))
}

fn cplx_i() -> CQ {
    CQ::scalar(Complex64::new(0.0, 1.0))
}

pub const NAMES: [&str; 8] = [
    "const",
    "x1",
    "one-plus-x0",
    "one-plus-x2",
    "quadratic",
    "exp-sin",
    "hyperholomorphic",
    "complex-linear",
];

/// A corpus field by name.
pub fn field(name: &str) -> Option<Field> {
    let f = match name {
        "const" => Field::constant("const", q(1.0, 2.0, -1.0, 0.5)),
        "x1" => Field::new("x1", |x| q(x[1], 0.0, 0.0, 0.0)).with_grad(|_| [CQ::ZERO, CQ::ONE, CQ::ZERO, CQ::ZERO]),
        "one-plus-x0" => {
            Field::new("one-plus-x0", |x| q(1.0 + x[0], 0.0, 0.0, 0.0)).with_grad(|_| [CQ::ONE, CQ::ZERO, CQ::ZERO, CQ::ZERO])
        }
        "one-plus-x2" => {
            Field::new("one-plus-x2", |x| q(1.0 + x[2], 0.0, 0.0, 0.0)).with_grad(|_| [CQ::ZERO, CQ::ZERO, CQ::ONE, CQ::ZERO])
        }
        "quadratic" => Field::new("quadratic", |x| q(x[0] * x[0], x[1] * x[2], 0.0, 0.0))
            .with_grad(|x| [q(2.0 * x[0], 0.0, 0.0, 0.0), q(0.0, x[2], 0.0, 0.0), q(0.0, x[1], 0.0, 0.0), CQ::ZERO]),
        "exp-sin" => {
            let s = q(1.0, 0.0, 0.0, 1.0);
            Field::new("exp-sin", move |x| s.scale(x[0].exp() * x[1].sin())).with_grad(move |x| {
                let e = x[0].exp();
                [s.scale(e * x[1].sin()), s.scale(e * x[1].cos()), CQ::ZERO, CQ::ZERO]
            })
        }
        "hyperholomorphic" => Field::new("hyperholomorphic", |x| q(x[1], -x[0], 0.0, 0.0))
            .with_grad(|_| [q(0.0, -1.0, 0.0, 0.0), CQ::ONE, CQ::ZERO, CQ::ZERO]),
        "complex-linear" => {
            let i = cplx_i();
            let j = q(0.0, 0.0, 1.0, 0.0);
            Field::new("complex-linear", move |x| i.scale(x[0]) + j.scale(x[3])).with_grad(move |_| [i, CQ::ZERO, CQ::ZERO, j])
        }
        _ => return None,
    };
    Some(f)
}

/// Fields whose components are polynomials of degree at most two.
pub fn is_polynomial(name: &str) -> bool {
    NAMES.contains(&name) && name != "exp-sin"
}

/// Named groups accepted by [`select`].
pub fn group(name: &str) -> Option<Vec<&'static str>> {
    let v = match name {
        "all" | "smooth" => NAMES.to_vec(),
        "polynomial" => NAMES.iter().copied().filter(|n| is_polynomial(n)).collect(),
        "constants" => vec!["const"],
        "linear" => vec!["const", "x1", "one-plus-x0", "one-plus-x2", "hyperholomorphic", "complex-linear"],
        _ => return None,
    };
    Some(v)
}

/// Resolves a list of field or group names, keeping first-seen order.
pub fn select<S: AsRef<str>>(names: &[S]) -> Result<Vec<Field>> {
    if names.is_empty() {
        return Err(Error::Domain("empty corpus selection".into()));
    }
    let mut out: Vec<&str> = Vec::new();
    for n in names {
        let n = n.as_ref().trim();
        let items = match group(n) {
            Some(g) => g,
            None if NAMES.contains(&n) => vec![NAMES[NAMES.iter().position(|m| *m == n).unwrap()]],
            None => return Err(Error::Domain(format!("unknown corpus entry `{n}`"))),
        };
        for it in items {
            if !out.contains(&it) {
                out.push(it);
            }
        }
    }
    Ok(out.into_iter().filter_map(field).collect())
}

pub fn all() -> Vec<Field> {
    NAMES.iter().filter_map(|n| field(n)).collect()
}

/// Standard, rotated and orientation-reversing frames.
pub fn frames() -> Vec<(&'static str, StructuralSet)> {
    vec![
        ("standard", StructuralSet::standard()),
        ("rotated", StructuralSet::rotated([1.0, 2.0, 2.0], 0.7).expect("fixed rotation")),
        ("flipped", StructuralSet::flipped()),
    ]
}

/// Box center followed by `extra` seeded points in the middle 60% of the box.
pub fn anchors(b: &Box4, extra: usize, seed: u64) -> Vec<Point4> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![b.center()];
    for _ in 0..extra {
        out.push(std::array::from_fn(|k| b.lo[k] + b.edge(k) * rng.gen_range(0.2..0.8)));
    }
    out
}

/// One real-scalar, one pure-quaternion and one complex-quaternion perturbation.
pub fn perturbations(seed: u64) -> Vec<(&'static str, CQ)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut r = |s: f64| rng.gen_range(-s..s);
    let real = q(0.3 + r(0.2).abs(), 0.0, 0.0, 0.0);
    let pure = q(0.0, r(0.5), r(0.5), r(0.5));
    let cplx = CQ::new(Quaternion::new(r(0.4), r(0.4), r(0.4), r(0.4)), Quaternion::new(r(0.4), r(0.4), r(0.4), r(0.4)));
    vec![("real-scalar", real), ("pure-quaternion", pure), ("complex-quaternion", cplx)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_partials_match_differences() {
        let probes = anchors(&Box4::unit(), 4, 7);
        for f in all() {
            let m = f.partials_mismatch(&probes, 1e-3).unwrap();
            assert!(m < 1e-9, "{}: {m}", f.name);
        }
    }

    #[test]
    fn selection_rules() {
        assert!(select::<&str>(&[]).is_err());
        assert!(select(&["nope"]).is_err());
        assert_eq!(select(&["polynomial"]).unwrap().len(), 7);
        assert_eq!(select(&["const", "constants", "x1"]).unwrap().len(), 2);
    }

    #[test]
    fn seeded_data_is_reproducible() {
        assert_eq!(perturbations(3), perturbations(3));
        assert_ne!(perturbations(3), perturbations(4));
        let a = anchors(&Box4::unit(), 4, 1);
        assert_eq!(a, anchors(&Box4::unit(), 4, 1));
        assert!(a.iter().all(|x| Box4::unit().contains_strict(x)));
        let p = perturbations(1);
        assert!(p[0].1.re.x0 > 0.0 && p[0].1.im.is_zero());
        assert!(!p[2].1.im.is_zero());
    }

    #[test]
    fn hyperholomorphic_in_the_standard_frame() {
        let f = field("hyperholomorphic").unwrap();
        let psi = StructuralSet::standard();
        let g = f.analytic_grad(&[0.3; 4]).unwrap();
        let d = (0..4).fold(CQ::ZERO, |acc, k| acc + CQ::real(psi.get(k)) * g[k]);
        assert!(d.is_zero());
    }
}
