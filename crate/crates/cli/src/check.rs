//! Seeded identity-check suite.
//!
//! Every trial draws from its own generator seeded by
//! `SHA-256(master seed, family id, trial index)`, so results do not depend
//! on scheduling and any failure can be replayed in isolation.

use std::collections::BTreeMap;

use log::{debug, info};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use zastava::poisson::{
    all_triples, g2_regularity_chain, jacobi_check, verify_log_canonical, BracketTable, CorruptedTable,
    IdentityReport, Session, StandardTable,
};
use zastava::polyalg::RatPoly;
use zastava::rootdata::RootSystem;
use zastava::sample::{self, RationalBounds};
use zastava::scalar::{fmt_rational, int, Rational};
use zastava::superpotential::{reduce_mod_2pi_i, NewtonOptions, SuperParams, Variant};
use zastava::whittaker::{chi_pairing, ext_class, kronecker_check, ExtRoute, Side};
use zastava::zastava::{map_resultant, verify_b2_plucker, Coord, ZastavaPoint};

use crate::newton_starts;

type TrialFn = fn(&mut ChaCha8Rng, usize) -> Result<(), String>;

/// A family of trials checking one identity.
pub struct Family {
    pub id: &'static str,
    pub default_trials: usize,
    pub run: TrialFn,
}

const B: RationalBounds = RationalBounds { num: 20, den: 6 };
const BUILTIN: [&str; 4] = ["A1", "A2", "B2", "G2"];

fn rs(name: &str) -> RootSystem {
    RootSystem::named(name).expect("built-in type")
}

fn ensure(cond: bool, detail: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(detail())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn fmt_point(p: &ZastavaPoint<Rational>) -> String {
    let nodes: Vec<String> = p
        .nodes()
        .iter()
        .map(|n| {
            let cs: Vec<String> = n
                .iter()
                .map(|c| format!("({},{})", fmt_rational(&c.w), fmt_rational(&c.y)))
                .collect();
            format!("[{}]", cs.join(","))
        })
        .collect();
    nodes.join(" ")
}

fn roundtrip(rng: &mut ChaCha8Rng, trial: usize) -> Result<(), String> {
    let a = trial % 8 + 1;
    let p = sample::regular_point(rng, &rs("A1"), &[a], &[], B);
    let back = ZastavaPoint::from_map(&p.to_map().map_err(err)?).map_err(err)?;
    ensure(back == p, || format!("round trip changed {}", fmt_point(&p)))
}

/// A random built-in type and a splittable degree with `|α| ≤ 6`.
fn glue_instance(
    rng: &mut ChaCha8Rng,
    trial: usize,
) -> (RootSystem, ZastavaPoint<Rational>, ZastavaPoint<Rational>) {
    let r = rs(BUILTIN[trial % 4]);
    let mut a = sample::alpha(rng, r.rank(), 6);
    if a.iter().sum::<usize>() < 2 {
        a[0] += 1;
    }
    let (left, right) = sample::split_alpha(rng, &a);
    let (p, q) = sample::disjoint_pair(rng, &r, &left, &right, B);
    (r, p, q)
}

fn eta_by_w(p: &ZastavaPoint<Rational>) -> Vec<Vec<(Rational, Rational)>> {
    p.nodes()
        .iter()
        .zip(p.eta())
        .map(|(n, e)| {
            let mut v: Vec<_> = n.iter().map(|c| c.w.clone()).zip(e).collect();
            v.sort_by(|x, y| x.0.cmp(&y.0));
            v
        })
        .collect()
}

fn glue(rng: &mut ChaCha8Rng, trial: usize) -> Result<(), String> {
    let (_, p, q) = glue_instance(rng, trial);
    let g = p.glue(&q).map_err(err)?;
    let mut expect = eta_by_w(&p);
    for (node, extra) in expect.iter_mut().zip(eta_by_w(&q)) {
        node.extend(extra);
        node.sort_by(|x, y| x.0.cmp(&y.0));
    }
    ensure(eta_by_w(&g) == expect, || {
        format!("eta of glue differs for {} | {}", fmt_point(&p), fmt_point(&q))
    })
}

fn glue_laws(rng: &mut ChaCha8Rng, trial: usize) -> Result<(), String> {
    let r = rs(BUILTIN[trial % 4]);
    let degs: Vec<Vec<usize>> = (0..3).map(|_| sample::alpha(rng, r.rank(), 2)).collect();
    let total: Vec<usize> = (0..r.rank()).map(|i| degs.iter().map(|d| d[i]).sum()).collect();
    let all = sample::regular_point(rng, &r, &total, &[], B);
    // Deal the coordinates of one point into three disjoint points.
    let mut parts: Vec<Vec<Vec<Coord<Rational>>>> = vec![vec![Vec::new(); r.rank()]; 3];
    for (i, node) in all.nodes().iter().enumerate() {
        let mut it = node.iter().cloned();
        for (k, d) in degs.iter().enumerate() {
            parts[k][i].extend(it.by_ref().take(d[i]));
        }
    }
    let pts: Vec<ZastavaPoint<Rational>> = parts
        .into_iter()
        .map(|n| ZastavaPoint::new(r.clone(), n).map_err(err))
        .collect::<Result<_, _>>()?;
    let (p, q, s) = (&pts[0], &pts[1], &pts[2]);
    let pq = p.glue(q).map_err(err)?;
    let qp = q.glue(p).map_err(err)?;
    ensure(pq == qp, || "glue is not commutative".into())?;
    let left = pq.glue(s).map_err(err)?;
    let right = p.glue(&q.glue(s).map_err(err)?).map_err(err)?;
    ensure(left == right, || "glue is not associative".into())
}

fn glue_a1_map(rng: &mut ChaCha8Rng, trial: usize) -> Result<(), String> {
    let total = trial % 6 + 2;
    let left = rng.gen_range(1..total);
    let (p, q) = sample::disjoint_pair(rng, &rs("A1"), &[left], &[total - left], B);
    let g = p.glue(&q).map_err(err)?.to_map().map_err(err)?;
    let sum = p.to_map().map_err(err)?.add(&q.to_map().map_err(err)?);
    ensure(g == sum, || format!("R/Q of glue is not the sum for {} | {}", fmt_point(&p), fmt_point(&q)))
}

fn random_regular(rng: &mut ChaCha8Rng, trial: usize, max_total: usize) -> ZastavaPoint<Rational> {
    let r = rs(BUILTIN[trial % 4]);
    let a = sample::alpha(rng, r.rank(), max_total);
    sample::regular_point(rng, &r, &a, &[], B)
}

fn involution(rng: &mut ChaCha8Rng, trial: usize) -> Result<(), String> {
    let p = random_regular(rng, trial, 6);
    let ip = p.involution().map_err(err)?;
    ensure(ip.involution().map_err(err)? == p, || format!("ι² ≠ id at {}", fmt_point(&p)))?;
    let (a, b) = (p.derived_coords().map_err(err)?, ip.derived_coords().map_err(err)?);
    for (x, y) in a.ybar_sq.iter().flatten().zip(b.ybar_sq.iter().flatten()) {
        ensure(x.clone() * y.clone() == int(1), || format!("ȳ²(ιp)·ȳ²(p) ≠ 1 at {}", fmt_point(&p)))?;
    }
    let f = p.boundary_sq().map_err(err)? * ip.boundary_sq().map_err(err)?;
    ensure(f == int(1), || format!("F²(ιp)·F²(p) = {} at {}", fmt_rational(&f), fmt_point(&p)))
}

fn boundary_a1(rng: &mut ChaCha8Rng, trial: usize) -> Result<(), String> {
    let p = sample::regular_point(rng, &rs("A1"), &[trial % 8 + 1], &[], B);
    let res = map_resultant(&p.to_map().map_err(err)?);
    let f2 = p.boundary_sq().map_err(err)?;
    ensure(f2 == res.clone() * res, || format!("F² ≠ Res² at {}", fmt_point(&p)))
}

fn boundary_a2(rng: &mut ChaCha8Rng, _trial: usize) -> Result<(), String> {
    let p = sample::regular_point(rng, &rs("A2"), &[1, 1], &[], B);
    let (ci, cj) = (&p.node(0)[0], &p.node(1)[0]);
    let diff = ci.w.clone() - cj.w.clone();
    let u = -(ci.y.clone() * cj.y.clone()) / diff.clone();
    ensure(ci.y.clone() * cj.y.clone() + diff * u.clone() == int(0), || "u relation fails".into())?;
    let f2 = p.boundary_sq().map_err(err)?;
    ensure(f2 == -(u.clone() * u), || format!("F² ≠ −u² at {}", fmt_point(&p)))
}

fn boundary_b2(rng: &mut ChaCha8Rng, trial: usize) -> Result<(), String> {
    let mut p = sample::regular_point(rng, &rs("B2"), &[1, 1], &[], B);
    if trial % 5 == 4 {
        // Boundary point: y_i = 0.
        let mut n = p.nodes().to_vec();
        n[0][0].y = int(0);
        p = ZastavaPoint::new(rs("B2"), n).map_err(err)?;
    }
    let (ci, cj) = (&p.node(0)[0], &p.node(1)[0]);
    let rep = verify_b2_plucker(&ci.w, &cj.w, &ci.y, &cj.y).map_err(err)?;
    ensure(rep.all_hold(), || format!("quadrics fail at {}", fmt_point(&p)))?;
    let f2 = p.boundary_sq().map_err(err)?;
    ensure(f2 == rep.b03.clone() * rep.b03, || format!("F² ≠ b03² at {}", fmt_point(&p)))
}

fn boundary_zero(rng: &mut ChaCha8Rng, trial: usize) -> Result<(), String> {
    let p = random_regular(rng, trial, 5);
    let mut nodes = p.nodes().to_vec();
    let (i, _) = nodes.iter().enumerate().find(|(_, n)| !n.is_empty()).expect("nonzero degree");
    let r = rng.gen_range(0..nodes[i].len());
    nodes[i][r].y = int(0);
    let q = ZastavaPoint::new(p.root_system().clone(), nodes).map_err(err)?;
    ensure(p.boundary_sq().map_err(err)? != int(0), || "F² vanishes on the regular locus".into())?;
    ensure(q.boundary_sq().map_err(err)? == int(0), || "F² nonzero with y = 0".into())
}

const JACOBI_CASES: [(&str, &[usize]); 10] = [
    ("A1", &[1]),
    ("A1", &[2]),
    ("A1", &[3]),
    ("A2", &[1, 1]),
    ("A2", &[2, 1]),
    ("B2", &[1, 1]),
    ("B2", &[2, 1]),
    ("B2", &[1, 2]),
    ("G2", &[1, 1]),
    ("G2", &[1, 2]),
];

fn report_result(r: &IdentityReport) -> Result<(), String> {
    match r.failures().next() {
        None => Ok(()),
        Some(f) => Err(format!("{} has residue {}", f.identity, f.residue)),
    }
}

fn jacobi_with(table: &dyn BracketTable, trial: usize) -> Result<(), String> {
    let (name, alpha) = JACOBI_CASES[trial % JACOBI_CASES.len()];
    let s = Session::new(rs(name), alpha.to_vec()).map_err(err)?;
    report_result(&jacobi_check(&s, table, &all_triples(s.nvars())))
        .map_err(|e| format!("{name} {alpha:?}: {e}"))
}

fn jacobi(_: &mut ChaCha8Rng, trial: usize) -> Result<(), String> {
    jacobi_with(&StandardTable, trial)
}

fn jacobi_negative_control(_: &mut ChaCha8Rng, _trial: usize) -> Result<(), String> {
    jacobi_with(&CorruptedTable { c: int(1) }, 3)
}

const LOG_CANONICAL_CASES: [(&str, &[usize]); 7] = [
    ("A1", &[2]),
    ("A2", &[1, 1]),
    ("A2", &[2, 1]),
    ("B2", &[1, 1]),
    ("B2", &[1, 2]),
    ("G2", &[1, 1]),
    ("G2", &[2, 1]),
];

fn log_canonical(_: &mut ChaCha8Rng, trial: usize) -> Result<(), String> {
    let (name, alpha) = LOG_CANONICAL_CASES[trial % LOG_CANONICAL_CASES.len()];
    report_result(&verify_log_canonical(&rs(name), alpha).map_err(err)?)
        .map_err(|e| format!("{name} {alpha:?}: {e}"))
}

fn g2_chain(_: &mut ChaCha8Rng, _trial: usize) -> Result<(), String> {
    report_result(&g2_regularity_chain())
}

fn ext_routes(rng: &mut ChaCha8Rng, trial: usize) -> Result<(), String> {
    let p = sample::regular_point(rng, &rs("A1"), &[trial % 8 + 1], &[], B);
    let closed = ext_class(&p, ExtRoute::ClosedForm).map_err(err)?;
    let oracle = ext_class(&p, ExtRoute::BezoutOracle).map_err(err)?;
    ensure(closed == oracle, || format!("routes differ at {}", fmt_point(&p)))
}

fn chi_moments(rng: &mut ChaCha8Rng, trial: usize) -> Result<(), String> {
    let p = sample::regular_point(rng, &rs("A1"), &[trial % 8 + 1], &[], B);
    let c = ext_class(&p, ExtRoute::BezoutOracle).map_err(err)?.c;
    for (k, ck) in c.iter().enumerate() {
        let zk = RatPoly::monomial(int(1), k);
        let chi = chi_pairing(&p, &[zk], Side::Plus).map_err(err)?;
        ensure(chi == *ck, || format!("χ(z^{k}) ≠ c_{k} at {}", fmt_point(&p)))?;
    }
    Ok(())
}

fn chi_involution(rng: &mut ChaCha8Rng, trial: usize) -> Result<(), String> {
    let p = random_regular(rng, trial, 5);
    let k: Vec<RatPoly<Rational>> = (0..p.root_system().rank())
        .map(|_| {
            let deg = rng.gen_range(0..=3);
            RatPoly::new((0..=deg).map(|d| if d == deg { int(1) } else { sample::rational(rng, B) }).collect())
        })
        .collect();
    let minus = chi_pairing(&p, &k, Side::Minus).map_err(err)?;
    let plus = chi_pairing(&p.involution().map_err(err)?, &k, Side::Plus).map_err(err)?;
    ensure(minus == plus, || format!("χ₋ ≠ χ₊∘ι at {}", fmt_point(&p)))
}

fn kronecker(rng: &mut ChaCha8Rng, trial: usize) -> Result<(), String> {
    let p = sample::regular_point(rng, &rs("A1"), &[trial % 6 + 1], &[], B);
    let rep = kronecker_check(&p).map_err(err)?;
    ensure(rep.identities_hold(), || format!("identities fail at {}", fmt_point(&p)))?;
    ensure(rep.sigma == rep.conjectured_sigma(), || {
        format!("a = {}: σ = {} at {}", rep.a, fmt_rational(&rep.sigma), fmt_point(&p))
    })
}

/// Random numeric instance over a built-in type, `|α| ≤ 4`, `N ≤ 3`.
fn super_instance(rng: &mut ChaCha8Rng, trial: usize, variant: Variant) -> (SuperParams<Complex64>, Vec<Vec<Complex64>>) {
    let r = rs(BUILTIN[trial % 4]);
    let a = sample::alpha(rng, r.rank(), 4);
    let n = rng.gen_range(0..=3);
    sample::super_instance(rng, &r, &a, n, variant)
}

fn describe(p: &SuperParams<Complex64>, w: &[Vec<Complex64>]) -> String {
    format!(
        "{} α={:?} λ={:?} z={:?} w={:?}",
        p.rs.name().unwrap_or("?"),
        p.alpha,
        p.lambdas.iter().map(|l| &l.pairings).collect::<Vec<_>>(),
        p.z,
        w
    )
}

fn stationarity(rng: &mut ChaCha8Rng, trial: usize) -> Result<(), String> {
    let (p, w) = super_instance(rng, trial, Variant::default());
    for v in Variant::ALL {
        let crit = p.with_variant(v).critical_section(&w).map_err(err)?;
        ensure(crit.stationarity <= 1e-12, || {
            format!("{v}: |∇_s W| = {:e} at {}", crit.stationarity, describe(&p, &w))
        })?;
        ensure(crit.hessian_diag.iter().all(|h| h.norm() > 0.0), || "singular s-Hessian".into())?;
    }
    Ok(())
}

fn newton(rng: &mut ChaCha8Rng, trial: usize) -> Result<(), String> {
    let variant = Variant::ALL[trial % 4];
    let (p, w) = super_instance(rng, trial / 4, variant);
    let dim = w.iter().map(Vec::len).sum();
    let seed: u64 = rng.gen();
    for (k, x0) in newton_starts(seed, 20, dim).iter().enumerate() {
        let rep = p.newton_section(&w, x0, &NewtonOptions::default(), k).map_err(err)?;
        ensure(rep.converged && rep.distance <= 1e-10, || {
            format!(
                "{variant} start {k}: converged={} distance={:e} at {}",
                rep.converged,
                rep.distance,
                describe(&p, &w)
            )
        })?;
    }
    Ok(())
}

fn h_gradient(rng: &mut ChaCha8Rng, trial: usize) -> Result<(), String> {
    let (p, w) = super_instance(rng, trial, Variant::default());
    for v in Variant::ALL {
        let rep = p.with_variant(v).restricted_gradient(&w).map_err(err)?;
        ensure(rep.h_mismatch <= 1e-12, || format!("{v}: h* mismatch {:e}", rep.h_mismatch))?;
    }
    Ok(())
}

fn phi_match(rng: &mut ChaCha8Rng, trial: usize) -> Result<(), String> {
    let (p, w) = super_instance(rng, trial, Variant::PLUS_PLUS);
    for v in [Variant::PLUS_PLUS, Variant::MINUS_MINUS] {
        let rep = p.with_variant(v).restricted_gradient(&w).map_err(err)?;
        ensure(rep.wz_mismatch <= 1e-9, || {
            format!("{v}: mismatch {:e} at {}", rep.wz_mismatch, describe(&p, &w))
        })?;
    }
    Ok(())
}

fn max_entry_diff(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn defect(rng: &mut ChaCha8Rng, trial: usize) -> Result<(), String> {
    let (p, w) = super_instance(rng, trial, Variant::ALL[trial % 4]);
    let rep = p.lagrangian_defect(&w, 1e-5).map_err(err)?;
    ensure(rep.fd_error <= 1e-7, || format!("fd error {:e} at {}", rep.fd_error, describe(&p, &w)))?;
    ensure(rep.closed_form_error <= 1e-9, || format!("closed form error {:e}", rep.closed_form_error))?;
    // Invariance under changing h* and under translating every point.
    let shift = sample::complex_unit_box(rng);
    let moved = SuperParams::new(
        p.rs.clone(),
        p.alpha.clone(),
        p.lambdas.clone(),
        p.z.iter().map(|z| z + shift).collect(),
        p.h_alpha.iter().map(|h| h + sample::complex_unit_box(rng)).collect(),
        None,
        p.kappa,
        p.variant,
    )
    .map_err(err)?;
    let moved_w: Vec<Vec<Complex64>> = w.iter().map(|n| n.iter().map(|x| x + shift).collect()).collect();
    let other = moved.lagrangian_defect(&moved_w, 1e-5).map_err(err)?;
    let d = max_entry_diff(&rep.defect, &other.defect);
    ensure(d <= 1e-9, || format!("defect not invariant: {d:e} at {}", describe(&p, &w)))
}

fn exponents(rng: &mut ChaCha8Rng, trial: usize) -> Result<(), String> {
    let r = rs(BUILTIN[trial % 4]);
    let a = sample::alpha(rng, r.rank(), 4);
    let n = rng.gen_range(0..=3);
    let (p, w) = sample::rational_super_instance(rng, &r, &a, n, B);
    let lhs = p.exponent_log_derivative(&p.exponent_table(), &w).map_err(err)?;
    let rhs = p.phi_gradient(&w).map_err(err)?.scale(&p.kappa);
    ensure(lhs == rhs, || format!("log-derivative ≠ κ∇Φ for {} α={a:?}", r.name().unwrap_or("?")))
}

/// Finite-difference agreement to `1e−7`, relative once `|g| > 1`.
fn fd_close(fd: Complex64, g: Complex64) -> bool {
    (fd - g).norm() <= 1e-7 * g.norm().max(1.0)
}

fn central_difference(f: impl Fn(f64) -> Result<Complex64, String>, h: f64) -> Result<Complex64, String> {
    Ok(reduce_mod_2pi_i(f(h)? - f(-h)?) / (2.0 * h))
}

fn gradients_fd(rng: &mut ChaCha8Rng, trial: usize) -> Result<(), String> {
    let (p, w) = super_instance(rng, trial, Variant::ALL[trial % 4]);
    let phi = p.phi_gradient(&w).map_err(err)?;
    let s: Vec<Vec<Complex64>> = w.iter().map(|n| n.iter().map(|_| sample::complex_unit_box(rng)).collect()).collect();
    let gw = p.w_gradient(&w, &s).map_err(err)?;
    let gs = p.w_gradient_s(&w, &s).map_err(err)?;
    let h = 1e-5;
    for (i, r) in p.labels() {
        let moved = |d: f64| {
            let mut x = w.clone();
            x[i][r] += d;
            x
        };
        let fd = central_difference(|d| p.phi_value(&moved(d)).map_err(err), h)?;
        ensure(fd_close(fd, phi.w[i][r]), || format!("Φ: ∂w[{i},{r}] off by {:e}", (fd - phi.w[i][r]).norm()))?;
        let fd = central_difference(|d| p.w_value(&moved(d), &s).map_err(err), h)?;
        ensure(fd_close(fd, gw.w[i][r]), || format!("W: ∂w[{i},{r}] off by {:e}", (fd - gw.w[i][r]).norm()))?;
        let fd = central_difference(
            |d| {
                let mut t = s.clone();
                t[i][r] += d;
                p.w_value(&w, &t).map_err(err)
            },
            h,
        )?;
        ensure(fd_close(fd, gs[i][r]), || format!("W: ∂s[{i},{r}] off by {:e}", (fd - gs[i][r]).norm()))?;
    }
    for n in 0..p.z.len() {
        let fd = central_difference(
            |d| {
                let mut q = p.clone();
                q.z[n] += d;
                q.phi_value(&w).map_err(err)
            },
            h,
        )?;
        ensure(fd_close(fd, phi.z[n]), || format!("Φ: ∂z[{n}] off by {:e}", (fd - phi.z[n]).norm()))?;
    }
    Ok(())
}

pub fn families() -> Vec<Family> {
    let f = |id, default_trials, run| Family { id, default_trials, run };
    vec![
        f("boundary_a1", 100, boundary_a1 as TrialFn),
        f("boundary_a2", 100, boundary_a2),
        f("boundary_b2", 100, boundary_b2),
        f("boundary_zero", 40, boundary_zero),
        f("chi_involution", 100, chi_involution),
        f("chi_moments", 100, chi_moments),
        f("defect", 40, defect),
        f("exponents", 40, exponents),
        f("ext_routes", 200, ext_routes),
        f("g2_chain", 1, g2_chain),
        f("glue", 200, glue),
        f("glue_a1_map", 100, glue_a1_map),
        f("glue_laws", 40, glue_laws),
        f("gradients_fd", 40, gradients_fd),
        f("h_gradient", 40, h_gradient),
        f("involution", 200, involution),
        f("jacobi", JACOBI_CASES.len(), jacobi),
        f("kronecker", 120, kronecker),
        f("log_canonical", LOG_CANONICAL_CASES.len(), log_canonical),
        f("newton", 20, newton),
        f("phi_match", 40, phi_match),
        f("roundtrip", 200, roundtrip),
        f("stationarity", 40, stationarity),
    ]
}

pub fn negative_control_family() -> Family {
    Family {
        id: "jacobi_negative_control",
        default_trials: 1,
        run: jacobi_negative_control,
    }
}

/// Per-trial seed from the first eight bytes of
/// `SHA-256("{master}:{family}:{trial}")`.
pub fn trial_seed(master: u64, family: &str, trial: usize) -> u64 {
    let digest = Sha256::digest(format!("{master}:{family}:{trial}").as_bytes());
    u64::from_le_bytes(digest[..8].try_into().expect("32-byte digest"))
}

#[derive(Debug, Clone, Default)]
pub struct CheckConfig {
    pub seed: u64,
    /// Overrides every family's default trial count.
    pub trials: Option<usize>,
    pub only: Option<Vec<String>>,
    /// Runs only this trial index of each selected family.
    pub trial: Option<usize>,
    pub negative_control: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialFailure {
    pub trial: usize,
    pub detail: String,
    pub reproduce: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyResult {
    pub id: String,
    pub trials: usize,
    pub passed: usize,
    pub failures: Vec<TrialFailure>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub seed: u64,
    pub families: Vec<FamilyResult>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.families.iter().all(|f| f.failures.is_empty())
    }

    pub fn family(&self, id: &str) -> Option<&FamilyResult> {
        self.families.iter().find(|f| f.id == id)
    }

    pub fn to_json(&self) -> Value {
        let fams: Vec<Value> = self
            .families
            .iter()
            .map(|f| {
                json!({
                    "id": f.id,
                    "trials": f.trials,
                    "passed": f.passed,
                    "failed": f.failures.len(),
                    "failures": f.failures.iter().map(|x| json!({
                        "trial": x.trial,
                        "detail": x.detail,
                        "reproduce": x.reproduce,
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        let trials: usize = self.families.iter().map(|f| f.trials).sum();
        let passed: usize = self.families.iter().map(|f| f.passed).sum();
        json!({
            "seed": self.seed,
            "families": fams,
            "summary": { "trials": trials, "passed": passed, "failed": trials - passed },
        })
    }
}

/// Runs the trials `range` of one family with the given master seed.
pub fn run_family(family: &Family, seed: u64, trials: impl IntoIterator<Item = usize>) -> FamilyResult {
    let indices: Vec<usize> = trials.into_iter().collect();
    let outcomes: BTreeMap<usize, Result<(), String>> = indices
        .par_iter()
        .map(|&k| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, family.id, k));
            let out = (family.run)(&mut rng, k);
            debug!("{} trial {k}: {}", family.id, if out.is_ok() { "pass" } else { "fail" });
            (k, out)
        })
        .collect();
    let failures: Vec<TrialFailure> = outcomes
        .iter()
        .filter_map(|(&k, o)| o.as_ref().err().map(|d| (k, d)))
        .map(|(k, d)| TrialFailure {
            trial: k,
            detail: d.clone(),
            reproduce: format!("zastava check --seed {seed} --only {} --trial {k}", family.id),
        })
        .collect();
    info!("{}: {} trials, {} failed", family.id, indices.len(), failures.len());
    FamilyResult {
        id: family.id.to_string(),
        trials: indices.len(),
        passed: indices.len() - failures.len(),
        failures,
    }
}

pub fn run_suite(cfg: &CheckConfig) -> Result<SuiteReport, String> {
    let mut fams = families();
    if cfg.negative_control {
        fams.push(negative_control_family());
    }
    if let Some(only) = &cfg.only {
        if let Some(bad) = only.iter().find(|id| !fams.iter().any(|f| f.id == id.as_str())) {
            return Err(format!("unknown check family {bad:?}"));
        }
        fams.retain(|f| only.iter().any(|id| id == f.id));
    }
    let mut results: Vec<FamilyResult> = fams
        .par_iter()
        .map(|f| match cfg.trial {
            Some(k) => run_family(f, cfg.seed, [k]),
            None => run_family(f, cfg.seed, 0..cfg.trials.unwrap_or(f.default_trials)),
        })
        .collect();
    results.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(SuiteReport {
        seed: cfg.seed,
        families: results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_depend_on_every_component() {
        let s = trial_seed(42, "glue", 3);
        assert_eq!(s, trial_seed(42, "glue", 3));
        assert_ne!(s, trial_seed(43, "glue", 3));
        assert_ne!(s, trial_seed(42, "glues", 3));
        assert_ne!(s, trial_seed(42, "glue", 4));
    }

    #[test]
    fn family_ids_are_sorted_and_unique() {
        let ids: Vec<&str> = families().iter().map(|f| f.id).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn negative_control_fails_with_residue() {
        let r = run_family(&negative_control_family(), 0, [0]);
        assert_eq!(r.failures.len(), 1);
        assert!(r.failures[0].detail.contains("residue"));
    }
}
