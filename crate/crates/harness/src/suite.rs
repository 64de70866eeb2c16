//! Suite runner: expands a config into independent tasks, runs them on a
//! bounded pool and assembles an ordered report.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use fueterlab_core::corpus;
use fueterlab_core::fracfueter::{probe_point, verify_frac_identity, AnchoredPoint, FracCheck, FracContext, FracIdentity, FracOrderVec};
use fueterlab_core::fueter::{borel_pompeiu_classical_residual, fueter_inverse_residual, stokes_classical_residual, Field, Side};
use fueterlab_core::perturbed::{
    borel_pompeiu_perturbed_reports, cauchy_corollary_check, diagonal_factor_four, near_null_field, singular_grading,
    stokes_perturbed_residual, verify_proposition, Corollary, Part, Perturbation, PropCheck, PropIdentity, TheoremSetup,
};
use fueterlab_core::quadrature::{Box4, Exclusion, Point4, QuadratureSpec};
use fueterlab_core::report::{ConvergenceStudy, IdentityReport, Status, TrendStatus};
use fueterlab_core::{StructuralSet, CQ};

use crate::config::{SuiteConfig, SuiteName};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub suite: String,
    /// Frame and, where it matters, the perturbation or probe kind.
    pub case: String,
    /// Part of a refinement ladder.
    pub laddered: bool,
    pub report: IdentityReport,
    pub seconds: Option<f64>,
}

impl CheckRecord {
    pub fn skipped(&self) -> bool {
        self.report.status == Status::NotApplicable
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendRecord {
    pub suite: String,
    pub case: String,
    pub study: ConvergenceStudy,
    /// Counts toward the overall verdict. Ladders with one level are flagged, not judged.
    pub required: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: SuiteConfig,
    pub corpus_version: u32,
    pub checks: Vec<CheckRecord>,
    pub convergence: Vec<TrendRecord>,
    pub overall_pass: bool,
}

type TaskFn<'a> = Box<dyn Fn() -> Vec<IdentityReport> + Send + Sync + 'a>;

struct Task<'a> {
    suite: &'static str,
    case: String,
    laddered: bool,
    run: TaskFn<'a>,
}

fn failed(identity: &str, corpus: &str, nodes: usize, e: impl std::fmt::Display) -> IdentityReport {
    let mut r = IdentityReport::new(identity, corpus, nodes).judge(f64::MAX, 1.0, 0.0);
    r.residual_rel = f64::MAX;
    r.note(format!("error: {e}"))
}

fn or_failed(r: fueterlab_core::Result<IdentityReport>, identity: &str, corpus: &str, nodes: usize) -> IdentityReport {
    r.unwrap_or_else(|e| failed(identity, corpus, nodes, e))
}

fn frac_of_box(b: &Box4, f: [f64; 4]) -> Point4 {
    std::array::from_fn(|k| b.lo[k] + f[k] * b.edge(k))
}

fn exterior(b: &Box4) -> Point4 {
    std::array::from_fn(|k| b.hi[k] + b.edge(k))
}

fn pairs(fields: &[Field]) -> Vec<(Field, Field)> {
    let n = fields.len();
    (0..n).map(|i| (fields[i].clone(), fields[(i + 1) % n].clone())).collect()
}

struct Env {
    cfg: SuiteConfig,
    bx: Box4,
    alpha: FracOrderVec,
    beta: FracOrderVec,
    pert: Perturbation,
    fields: Vec<Field>,
    frames: Vec<(String, StructuralSet)>,
    anchors: Vec<Point4>,
}

impl Env {
    fn new(cfg: &SuiteConfig) -> Result<Self, crate::config::ConfigError> {
        cfg.validate()?;
        let bx = cfg.bx();
        let frames = corpus::frames()
            .into_iter()
            .filter(|(n, _)| cfg.frames.iter().any(|f| f == n))
            .map(|(n, p)| (n.to_string(), p))
            .collect();
        Ok(Env {
            cfg: cfg.clone(),
            bx,
            alpha: cfg.alpha_vec()?,
            beta: cfg.beta_vec()?,
            pert: Perturbation::new(cfg.u, cfg.v),
            fields: corpus::select(&cfg.corpus).expect("validated corpus"),
            frames,
            anchors: corpus::anchors(&bx, cfg.anchors, cfg.seed),
        })
    }

    fn frac_ctx(&self, psi: &StructuralSet, n: usize) -> FracContext {
        FracContext::new(psi.clone(), self.alpha, self.bx, QuadratureSpec::gauss(n))
    }

    /// The integral formulas run with `α` for both orders.
    fn theorem_ctx(&self, psi: &StructuralSet, n: usize) -> FracContext {
        let g = singular_grading(&self.alpha, &self.alpha);
        FracContext::new(psi.clone(), self.alpha, self.bx, QuadratureSpec::gauss(n).with_grading(g))
    }
}

fn classical_tasks<'a>(env: &'a Env, out: &mut Vec<Task<'a>>) {
    let b = env.bx;
    let interior = frac_of_box(&b, [0.45, 0.55, 0.4, 0.6]);
    let ext = exterior(&b);
    for (name, psi) in &env.frames {
        for &n in &env.cfg.nodes {
            let psi = psi.clone();
            out.push(Task {
                suite: "classical",
                case: name.clone(),
                laddered: true,
                run: Box::new(move || {
                    let spec = QuadratureSpec::gauss(n).with_exclusion(Exclusion::Auto);
                    let mut reps = Vec::new();
                    for (f, g) in pairs(&env.fields) {
                        let pn = format!("{}|{}", f.name, g.name);
                        reps.push(or_failed(stokes_classical_residual(&psi, &f, &g, &b, &QuadratureSpec::gauss(n), env.cfg.tol("stokes")), "stokes", &pn, n));
                    }
                    let z = Field::zero();
                    let tol = env.cfg.tol("borel-pompeiu");
                    for f in &env.fields {
                        reps.push(or_failed(borel_pompeiu_classical_residual(&psi, f, &z, &b, &interior, &spec, tol), "borel-pompeiu-interior", &f.name, n));
                        reps.push(or_failed(borel_pompeiu_classical_residual(&psi, f, &z, &b, &ext, &spec, tol), "borel-pompeiu-exterior", &f.name, n));
                        for side in [Side::Left, Side::Right] {
                            let r = fueter_inverse_residual(&psi, f, &b, &interior, &spec, side, env.cfg.tol("fueter-inverse"));
                            reps.push(or_failed(r, "fueter-inverse", &f.name, n));
                        }
                    }
                    reps
                }),
            });
        }
    }
}

fn fractional_tasks<'a>(env: &'a Env, out: &mut Vec<Task<'a>>) {
    for (name, psi) in &env.frames {
        for &n in &env.cfg.nodes {
            for f in &env.fields {
                let psi = psi.clone();
                out.push(Task {
                    suite: "fractional",
                    case: name.clone(),
                    laddered: true,
                    run: Box::new(move || {
                        let ctx = env.frac_ctx(&psi, n);
                        let mut reps = Vec::new();
                        for id in FracIdentity::ALL {
                            for side in [Side::Left, Side::Right] {
                                let parts: Vec<IdentityReport> = env
                                    .anchors
                                    .iter()
                                    .map(|q| {
                                        let x = probe_point(&env.bx, q);
                                        let point = AnchoredPoint::new(&env.bx, *q, x);
                                        let r = point.and_then(|point| {
                                            let beta = id.needs_beta().then_some(env.beta);
                                            verify_frac_identity(id, &FracCheck { ctx: &ctx, beta, f, point, side, tol: env.cfg.tol("fractional") })
                                        });
                                        or_failed(r, id.name(), &f.name, n)
                                    })
                                    .collect();
                                let label = match side {
                                    Side::Left => id.name().to_string(),
                                    Side::Right => format!("{}-right", id.name()),
                                };
                                reps.push(IdentityReport::worst(&label, &f.name, &parts));
                            }
                        }
                        reps
                    }),
                });
            }
        }
    }
}

fn potential_ladder<'a>(env: &'a Env, levels: &'a [usize]) -> &'a [usize] {
    if env.pert.is_zero() {
        levels
    } else {
        &levels[..levels.len().min(2)]
    }
}

fn perturbed_tasks<'a>(env: &'a Env, out: &mut Vec<Task<'a>>) {
    let pert_label = if env.pert.is_zero() { "unperturbed".to_string() } else { "perturbed".to_string() };
    let q = env.bx.center();
    let interior = [q, frac_of_box(&env.bx, [0.4, 0.55, 0.6, 0.45])];
    let ext = exterior(&env.bx);
    for (name, psi) in &env.frames {
        let case = format!("{name}/{pert_label}");
        // operator identities at the first level
        for f in &env.fields {
            let psi = psi.clone();
            let n = env.cfg.nodes[0];
            out.push(Task {
                suite: "perturbed",
                case: case.clone(),
                laddered: false,
                run: Box::new(move || {
                    let ctx = env.frac_ctx(&psi, n);
                    PropIdentity::ALL
                        .iter()
                        .map(|id| {
                            let parts: Vec<IdentityReport> = env
                                .anchors
                                .iter()
                                .map(|qa| {
                                    let r = AnchoredPoint::new(&env.bx, *qa, probe_point(&env.bx, qa)).and_then(|point| {
                                        let chk = PropCheck { ctx: &ctx, beta: env.beta, pert: env.pert, f, point, tol: env.cfg.tol("proposition") };
                                        verify_proposition(*id, &chk)
                                    });
                                    or_failed(r, id.name(), &f.name, n)
                                })
                                .collect();
                            IdentityReport::worst(id.name(), &f.name, &parts)
                        })
                        .collect()
                }),
            });
        }
        // Stokes formulas
        let all_pairs = pairs(&env.fields);
        for part in [Part::Potential, Part::Weighted] {
            let (levels, npairs): (&[usize], usize) = if part == Part::Potential && !env.pert.is_zero() {
                (&env.cfg.potential_nodes, 1)
            } else {
                (&env.cfg.nodes, all_pairs.len())
            };
            for &n in levels {
                let psi = psi.clone();
                let ps: Vec<(Field, Field)> = all_pairs[..npairs].to_vec();
                out.push(Task {
                    suite: "perturbed",
                    case: case.clone(),
                    laddered: true,
                    run: Box::new(move || {
                        let ctx = env.theorem_ctx(&psi, n);
                        let mut s = TheoremSetup::new(&ctx, env.alpha, env.pert, q);
                        s.tol = env.cfg.tol("stokes-perturbed");
                        let id = format!("stokes-perturbed-{}", part.tag());
                        ps.iter().map(|(f, g)| or_failed(stokes_perturbed_residual(part, &s, f, g), &id, &format!("{}|{}", f.name, g.name), n)).collect()
                    }),
                });
            }
        }
        // Borel-Pompeiu formulas
        for part in [Part::Potential, Part::Weighted] {
            let (levels, npairs) = if part == Part::Potential && !env.pert.is_zero() {
                (potential_ladder(env, &env.cfg.theorem_nodes), 1)
            } else {
                (&env.cfg.theorem_nodes[..], all_pairs.len())
            };
            for &n in levels {
                for x in interior.iter().copied().chain(std::iter::once(ext)) {
                    let psi = psi.clone();
                    let ps: Vec<(Field, Field)> = all_pairs[..npairs].to_vec();
                    out.push(Task {
                        suite: "perturbed",
                        case: case.clone(),
                        laddered: true,
                        run: Box::new(move || {
                            let ctx = env.theorem_ctx(&psi, n);
                            let mut s = TheoremSetup::new(&ctx, env.alpha, env.pert, q);
                            s.tol = env.cfg.tol("borel-pompeiu-perturbed");
                            let mut reps = Vec::new();
                            for chunk in ps.chunks(8) {
                                let refs: Vec<(&Field, &Field)> = chunk.iter().map(|(f, g)| (f, g)).collect();
                                match borel_pompeiu_perturbed_reports(part, &s, &refs, &x) {
                                    Ok(r) => reps.extend(r),
                                    Err(e) => reps.extend(chunk.iter().map(|(f, g)| {
                                        failed(&format!("borel-pompeiu-perturbed-{}", part.tag()), &format!("{}|{}", f.name, g.name), n, &e)
                                    })),
                                }
                            }
                            reps
                        }),
                    });
                }
            }
        }
        // Cauchy corollaries
        let psi_c = psi.clone();
        let n0 = env.cfg.theorem_nodes[0];
        out.push(Task {
            suite: "perturbed",
            case: case.clone(),
            laddered: false,
            run: Box::new(move || {
                let ctx = env.theorem_ctx(&psi_c, n0);
                let mut s = TheoremSetup::new(&ctx, env.alpha, env.pert, q);
                s.tol = env.cfg.tol("cauchy");
                let z = Field::zero();
                let x = interior[1];
                let mut reps = Vec::new();
                for w in Corollary::ALL {
                    reps.push(or_failed(cauchy_corollary_check(w, &s, &z, &z, &x), w.name(), "zero|zero", n0));
                }
                let near = env.fields.iter().take(2).map(|h| near_null_field(&ctx, h, &q, 1e-4)).collect::<fueterlab_core::Result<Vec<_>>>();
                match near {
                    Ok(nf) => {
                        let g = nf.get(1).unwrap_or(&nf[0]);
                        for w in Corollary::ALL {
                            let name = format!("{}|{}", nf[0].name, g.name);
                            reps.push(or_failed(cauchy_corollary_check(w, &s, &nf[0], g, &x), w.name(), &name, n0));
                        }
                    }
                    Err(e) => reps.push(failed("cauchy-near-null", "near-null", n0, e)),
                }
                reps
            }),
        });
        let constant = Field::constant("const", CQ::ONE);
        for part in [Part::Potential, Part::Weighted] {
            let levels = if part == Part::Potential { potential_ladder(env, &env.cfg.theorem_nodes) } else { &env.cfg.theorem_nodes[..] };
            for &n in levels {
                let psi = psi.clone();
                let c = constant.clone();
                out.push(Task {
                    suite: "perturbed",
                    case: case.clone(),
                    laddered: true,
                    run: Box::new(move || {
                        let ctx = env.theorem_ctx(&psi, n);
                        let mut s = TheoremSetup::new(&ctx, env.alpha, env.pert, q);
                        s.tol = env.cfg.tol("borel-pompeiu-perturbed");
                        let id = format!("cauchy-borel-pompeiu-{}-diagonal", part.tag());
                        vec![or_failed(diagonal_factor_four(part, &s, &c, &Field::zero()), &id, "const|zero", n)]
                    }),
                });
            }
        }
    }
}

fn probe_set(r: &IdentityReport) -> Vec<[u64; 4]> {
    let mut p: Vec<[u64; 4]> = r.probes.iter().map(|x| x.map(f64::to_bits)).collect();
    p.sort_unstable();
    p
}

/// Groups laddered records by (suite, case, identity, corpus, probe set) in first-seen order.
pub fn convergence(checks: &[CheckRecord]) -> Vec<TrendRecord> {
    let mut groups: Vec<(String, String, Vec<IdentityReport>)> = Vec::new();
    for c in checks.iter().filter(|c| c.laddered) {
        let r = &c.report;
        match groups.iter_mut().find(|(s, k, g)| {
            *s == c.suite && *k == c.case && g[0].identity == r.identity && g[0].corpus == r.corpus && probe_set(&g[0]) == probe_set(r)
        }) {
            Some(g) => g.2.push(r.clone()),
            None => groups.push((c.suite.clone(), c.case.clone(), vec![r.clone()])),
        }
    }
    groups
        .into_iter()
        .map(|(suite, case, g)| {
            let study = ConvergenceStudy::from_reports(&g);
            let required = study.status != TrendStatus::InsufficientLadder;
            TrendRecord { suite, case, study, required }
        })
        .collect()
}

/// Every non-skipped check passes and every required trend decreases or sits at the floor.
pub fn verdict(checks: &[CheckRecord], convergence: &[TrendRecord]) -> bool {
    checks.iter().all(|c| c.report.passed()) && convergence.iter().filter(|t| t.required).all(|t| t.study.passed())
}

/// Runs the configured suite on at most `jobs` threads. The report does not depend on `jobs`.
pub fn run_suite(cfg: &SuiteConfig, jobs: usize) -> Result<RunReport, crate::config::ConfigError> {
    let env = Env::new(cfg)?;
    let mut tasks = Vec::new();
    if cfg.suite.includes(SuiteName::Classical) {
        classical_tasks(&env, &mut tasks);
    }
    if cfg.suite.includes(SuiteName::Fractional) {
        fractional_tasks(&env, &mut tasks);
    }
    if cfg.suite.includes(SuiteName::Perturbed) {
        perturbed_tasks(&env, &mut tasks);
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool");
    let results: Vec<Vec<CheckRecord>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|t| {
                let start = Instant::now();
                let reps = (t.run)();
                let secs = start.elapsed().as_secs_f64() / reps.len().max(1) as f64;
                reps.into_iter()
                    .map(|report| CheckRecord {
                        suite: t.suite.to_string(),
                        case: t.case.clone(),
                        laddered: t.laddered,
                        report,
                        seconds: cfg.timings.then_some(secs),
                    })
                    .collect()
            })
            .collect()
    });
    let checks: Vec<CheckRecord> = results.into_iter().flatten().collect();
    let convergence = convergence(&checks);
    let overall_pass = verdict(&checks, &convergence);
    Ok(RunReport { config: cfg.clone(), corpus_version: corpus::CORPUS_VERSION, checks, convergence, overall_pass })
}
