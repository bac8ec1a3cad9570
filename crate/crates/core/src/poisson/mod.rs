//! Symbolic Poisson brackets on the coordinate chart.
//!
//! The bracket is defined on generators by
//!
//! * `{w_{i,r}, w_{j,s}} = 0`,
//! * `{w_{i,r}, y_{j,s}} = ď_i δ_{ij} δ_{rs} y_{j,s}`,
//! * `{y_{i,r}, y_{j,s}} = d·(α̌_i·α̌_j)·y_{i,r} y_{j,s}/(w_{i,r} − w_{j,s})` for `i ≠ j`,
//!   and `0` within a node,
//!
//! and extended to rational functions by the Leibniz rule.

mod expr;
mod mpoly;
mod parse;

use std::sync::Arc;

use thiserror::Error;

use crate::rootdata::RootSystem;
use crate::scalar::{Rational, Scalar};

pub use expr::{ChartExpr, Session, Var, VarKind};
pub use mpoly::MPoly;
pub use parse::parse_expr;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PoissonError {
    #[error("expressions belong to different chart sessions")]
    SessionMismatch,
    #[error("expected {expected} nodes, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("division by the zero expression")]
    DivisionByZero,
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
}

impl PoissonError {
    pub fn name(&self) -> &'static str {
        match self {
            PoissonError::SessionMismatch => "SessionMismatch",
            PoissonError::RankMismatch { .. } => "RankMismatch",
            PoissonError::DivisionByZero => "DivisionByZero",
            PoissonError::Parse { .. } => "ParseError",
        }
    }
}

/// Brackets of pairs of session generators.
pub trait BracketTable: Sync {
    fn generator(&self, session: &Arc<Session>, a: usize, b: usize) -> ChartExpr;
}

/// The bracket table of the chart.
#[derive(Debug, Clone, Copy, Default)]
pub struct StandardTable;

fn w_minus_w(session: &Arc<Session>, a: usize, b: usize) -> ChartExpr {
    ChartExpr::var(session, a).sub(&ChartExpr::var(session, b))
}

impl BracketTable for StandardTable {
    fn generator(&self, session: &Arc<Session>, a: usize, b: usize) -> ChartExpr {
        let rs = session.root_system();
        let (va, vb) = (session.vars()[a], session.vars()[b]);
        match (va.kind, vb.kind) {
            (VarKind::W, VarKind::W) => ChartExpr::zero(session),
            (VarKind::W, VarKind::Y) | (VarKind::Y, VarKind::W) => {
                let (wv, yv, sign) = if va.kind == VarKind::W {
                    (va, b, 1)
                } else {
                    (vb, a, -1)
                };
                let yvar = session.vars()[yv];
                if wv.node == yvar.node && wv.r == yvar.r {
                    ChartExpr::var(session, yv)
                        .scale(&(rs.dcheck(wv.node) * Rational::from_i64(sign)))
                } else {
                    ChartExpr::zero(session)
                }
            }
            (VarKind::Y, VarKind::Y) => {
                if va.node == vb.node {
                    return ChartExpr::zero(session);
                }
                let c = rs.dual_dot(va.node, vb.node) * Rational::from_i64(rs.d());
                let wa = session.w_index(va.node, va.r);
                let wb = session.w_index(vb.node, vb.r);
                ChartExpr::var(session, a)
                    .mul(&ChartExpr::var(session, b))
                    .scale(&c)
                    .div(&w_minus_w(session, wa, wb))
                    .expect("distinct generators")
            }
        }
    }
}

/// The chart table with `{w_{i,r}, y_{i,r}}` replaced by `c·y_{i,r}²`.
/// Antisymmetric but not a Poisson bracket; used as a negative control.
/// Needs two linked nodes to be detected: on one node every bivector is Poisson.
#[derive(Debug, Clone)]
pub struct CorruptedTable {
    pub c: Rational,
}

impl BracketTable for CorruptedTable {
    fn generator(&self, session: &Arc<Session>, a: usize, b: usize) -> ChartExpr {
        let (va, vb) = (session.vars()[a], session.vars()[b]);
        if va.node == vb.node && va.r == vb.r && va.kind != vb.kind {
            let (yv, sign) = if va.kind == VarKind::Y { (a, -1) } else { (b, 1) };
            let y = ChartExpr::var(session, yv);
            return y.mul(&y).scale(&(self.c.clone() * Rational::from_i64(sign)));
        }
        StandardTable.generator(session, a, b)
    }
}

/// `{f, g}` via the Leibniz rule over the generator table.
pub fn bracket_with(
    table: &dyn BracketTable,
    f: &ChartExpr,
    g: &ChartExpr,
) -> Result<ChartExpr, PoissonError> {
    if !f.same_session(g) {
        return Err(PoissonError::SessionMismatch);
    }
    let session = f.session();
    let n = session.nvars();
    let df: Vec<ChartExpr> = (0..n).map(|k| f.derivative(k)).collect();
    let dg: Vec<ChartExpr> = (0..n).map(|k| g.derivative(k)).collect();
    let mut acc = ChartExpr::zero(session);
    for a in 0..n {
        if df[a].is_zero() {
            continue;
        }
        for b in 0..n {
            if a == b || dg[b].is_zero() {
                continue;
            }
            let p = table.generator(session, a, b);
            if p.is_zero() {
                continue;
            }
            acc = acc.add(&df[a].mul(&dg[b]).mul(&p));
        }
    }
    Ok(acc)
}

pub fn bracket(f: &ChartExpr, g: &ChartExpr) -> Result<ChartExpr, PoissonError> {
    bracket_with(&StandardTable, f, g)
}

/// Outcome of one exact identity.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub identity: String,
    pub passed: bool,
    /// `lhs − rhs`, printed; `"0"` on success.
    pub residue: String,
}

impl IdentityCheck {
    fn from_residue(identity: String, residue: &ChartExpr) -> Self {
        IdentityCheck {
            identity,
            passed: residue.is_zero(),
            residue: residue.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// All triples `a < b < c` of generator indices.
pub fn all_triples(n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// Jacobiator `{f,{g,h}} + {g,{h,f}} + {h,{f,g}}` of each generator triple.
pub fn jacobi_check(
    session: &Arc<Session>,
    table: &dyn BracketTable,
    triples: &[[usize; 3]],
) -> IdentityReport {
    let vars = session.vars();
    let gen = |k: usize| ChartExpr::var(session, k);
    let br = |x: &ChartExpr, y: &ChartExpr| bracket_with(table, x, y).expect("same session");
    let checks = triples
        .iter()
        .map(|&[a, b, c]| {
            let (f, g, h) = (gen(a), gen(b), gen(c));
            let res = br(&f, &br(&g, &h))
                .add(&br(&g, &br(&h, &f)))
                .add(&br(&h, &br(&f, &g)));
            IdentityCheck::from_residue(
                format!("jacobi({}, {}, {})", vars[a], vars[b], vars[c]),
                &res,
            )
        })
        .collect();
    IdentityReport { checks }
}

/// `ȳ²_{i,r} = y²_{i,r}·∏_{j≠i,s} (w_{i,r} − w_{j,s})^{A[i][j]}`.
pub fn ybar_sq_expr(session: &Arc<Session>, i: usize, r: usize) -> ChartExpr {
    let rs = session.root_system();
    let y = ChartExpr::y(session, i, r);
    let mut acc = y.mul(&y);
    for (j, &aj) in session.alpha().iter().enumerate() {
        if j == i || rs.a(i, j) == 0 {
            continue;
        }
        for s in 0..aj {
            let diff = w_minus_w(session, session.w_index(i, r), session.w_index(j, s));
            acc = acc.mul(&diff.pow(rs.a(i, j)).expect("nonzero generator difference"));
        }
    }
    acc
}

/// `F² = ∏_{i,r} y_{i,r}^{2d_i}·∏_{j≠i,s} (w_{i,r} − w_{j,s})^{α_i·α_j}`.
pub fn boundary_sq_expr(session: &Arc<Session>) -> ChartExpr {
    let rs = session.root_system();
    let mut acc = ChartExpr::one(session);
    for (i, &ai) in session.alpha().iter().enumerate() {
        for r in 0..ai {
            let y = ChartExpr::y(session, i, r);
            acc = acc.mul(&y.pow(2 * rs.d_i(i)).expect("positive power"));
            for (j, &aj) in session.alpha().iter().enumerate() {
                if j == i || rs.dot(i, j) == 0 {
                    continue;
                }
                for s in 0..aj {
                    let diff = w_minus_w(session, session.w_index(i, r), session.w_index(j, s));
                    acc = acc.mul(&diff.pow(rs.dot(i, j)).expect("nonzero generator difference"));
                }
            }
        }
    }
    acc
}

fn coords(session: &Arc<Session>) -> Vec<(usize, usize)> {
    session
        .alpha()
        .iter()
        .enumerate()
        .flat_map(|(i, &a)| (0..a).map(move |r| (i, r)))
        .collect()
}

/// `{w_{i,r}, ȳ²_{j,s}} = 2ď_i δ ȳ²_{j,s}` and `{ȳ²_{i,r}, ȳ²_{j,s}} = 0`.
pub fn verify_log_canonical(rs: &RootSystem, alpha: &[usize]) -> Result<IdentityReport, PoissonError> {
    let session = Session::new(rs.clone(), alpha.to_vec())?;
    let cs = coords(&session);
    let ybars: Vec<ChartExpr> = cs.iter().map(|&(i, r)| ybar_sq_expr(&session, i, r)).collect();
    let mut checks = Vec::new();
    for &(i, r) in &cs {
        let w = ChartExpr::w(&session, i, r);
        for (k, &(j, s)) in cs.iter().enumerate() {
            let lhs = bracket(&w, &ybars[k])?;
            let rhs = if (i, r) == (j, s) {
                ybars[k].scale(&(rs.dcheck(i) * Rational::from_i64(2)))
            } else {
                ChartExpr::zero(&session)
            };
            checks.push(IdentityCheck::from_residue(
                format!("{{w[{},{}], ybar2[{},{}]}}", i + 1, r + 1, j + 1, s + 1),
                &lhs.sub(&rhs),
            ));
        }
    }
    for a in 0..cs.len() {
        for b in a + 1..cs.len() {
            let lhs = bracket(&ybars[a], &ybars[b])?;
            checks.push(IdentityCheck::from_residue(
                format!(
                    "{{ybar2[{},{}], ybar2[{},{}]}}",
                    cs[a].0 + 1,
                    cs[a].1 + 1,
                    cs[b].0 + 1,
                    cs[b].1 + 1
                ),
                &lhs,
            ));
        }
    }
    Ok(IdentityReport { checks })
}

/// The three regularity identities for G₂ with `α = α_i + α_j`, where `i`
/// is the node with `d_i = 3`.
pub fn g2_regularity_chain() -> IdentityReport {
    let rs = RootSystem::named("G2").expect("G2 is built in");
    let session = Session::new(rs, vec![1, 1]).expect("rank 2");
    let yi = ChartExpr::y(&session, 0, 0);
    let yj = ChartExpr::y(&session, 1, 0);
    let diff = ChartExpr::w(&session, 0, 0).sub(&ChartExpr::w(&session, 1, 0));
    let dpow = |k: i64| diff.pow(-k).expect("nonzero");
    let c = |k: i64| Rational::from_i64(k);

    let f1 = yj.clone();
    let r1 = yi.mul(&yj).mul(&dpow(1)).scale(&c(-3));
    let f2 = yi.mul(&yj).mul(&dpow(1));
    let r2 = yi.mul(&yi).mul(&yj).mul(&dpow(2)).scale(&c(-2));
    let f3 = yi.mul(&yi).mul(&yj).mul(&dpow(2));
    let r3 = yi.mul(&yi).mul(&yi).mul(&yj).mul(&dpow(3)).scale(&c(-1));

    let cases = [
        ("{y_i, y_j} = -3 y_i y_j/(w_i-w_j)", f1, r1),
        ("{y_i, y_i y_j/(w_i-w_j)} = -2 y_i^2 y_j/(w_i-w_j)^2", f2, r2),
        ("{y_i, y_i^2 y_j/(w_i-w_j)^2} = -y_i^3 y_j/(w_i-w_j)^3", f3, r3),
    ];
    IdentityReport {
        checks: cases
            .into_iter()
            .map(|(name, f, rhs)| {
                let lhs = bracket(&yi, &f).expect("same session");
                IdentityCheck::from_residue(name.to_string(), &lhs.sub(&rhs))
            })
            .collect(),
    }
}

/// Evaluates `{w_{i,r}, F²}` and `2d·F²` at a point given by session values.
pub fn boundary_homogeneity_at<S: Scalar>(
    session: &Arc<Session>,
    i: usize,
    r: usize,
    vals: &[S],
) -> Option<(S, S)> {
    let f2 = boundary_sq_expr(session);
    let lhs = bracket(&ChartExpr::w(session, i, r), &f2).expect("same session");
    let rhs = f2.scale(&Rational::from_i64(2 * session.root_system().d()));
    Some((lhs.eval(vals)?, rhs.eval(vals)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn session(name: &str, alpha: &[usize]) -> Arc<Session> {
        Session::new(RootSystem::named(name).unwrap(), alpha.to_vec()).unwrap()
    }

    #[test]
    fn generator_examples() {
        let s = session("A1", &[1]);
        let w = ChartExpr::w(&s, 0, 0);
        let y = ChartExpr::y(&s, 0, 0);
        assert_eq!(bracket(&w, &y).unwrap(), y);
        let w2 = w.mul(&w);
        assert_eq!(bracket(&w2, &y).unwrap(), w.mul(&y).scale(&int(2)));

        let s = session("A2", &[1, 1]);
        let y1 = ChartExpr::y(&s, 0, 0);
        let y2 = ChartExpr::y(&s, 1, 0);
        let expect = parse_expr(&s, "-y[1,1]*y[2,1]/(w[1,1]-w[2,1])").unwrap();
        assert_eq!(bracket(&y1, &y2).unwrap(), expect);
        assert_eq!(bracket(&y2, &y1).unwrap(), expect.neg());

        let b2 = session("B2", &[1, 1]);
        let w0 = ChartExpr::w(&b2, 0, 0);
        let w1 = ChartExpr::w(&b2, 1, 0);
        assert_eq!(bracket(&w0, &ChartExpr::y(&b2, 0, 0)).unwrap(), ChartExpr::y(&b2, 0, 0));
        assert_eq!(
            bracket(&w1, &ChartExpr::y(&b2, 1, 0)).unwrap(),
            ChartExpr::y(&b2, 1, 0).scale(&int(2))
        );
    }

    #[test]
    fn session_mismatch_rejected() {
        let a = session("A1", &[1]);
        let b = session("A1", &[1]);
        assert_eq!(
            bracket(&ChartExpr::w(&a, 0, 0), &ChartExpr::y(&b, 0, 0)).unwrap_err(),
            PoissonError::SessionMismatch
        );
    }

    #[test]
    fn parse_and_display_round_trip() {
        let s = session("A2", &[1, 1]);
        let e = parse_expr(&s, "y[1,1]^2 * (w[1,1]-w[2,1])^-1 + 3/4*w[2,1]").unwrap();
        let again = parse_expr(&s, &e.to_string()).unwrap();
        assert_eq!(e, again);
        assert!(parse_expr(&s, "y[3,1]").is_err());
        assert!(parse_expr(&s, "y[0,1]").is_err());
        assert!(parse_expr(&s, "1/(w[1,1]-w[1,1])").is_err());
        assert!(parse_expr(&s, "w[1,1] +").is_err());
    }

    #[test]
    fn jacobi_small_cases() {
        for (name, alpha) in [("A1", vec![2]), ("A2", vec![1, 1]), ("G2", vec![1, 1])] {
            let s = session(name, &alpha);
            let rep = jacobi_check(&s, &StandardTable, &all_triples(s.nvars()));
            assert!(rep.all_passed(), "{name}: {:?}", rep.failures().next());
        }
    }

    #[test]
    fn corrupted_table_breaks_jacobi() {
        let s = session("A2", &[1, 1]);
        let rep = jacobi_check(&s, &CorruptedTable { c: int(1) }, &all_triples(s.nvars()));
        assert!(!rep.all_passed());
    }

    #[test]
    fn log_canonical_and_g2_chain() {
        assert!(verify_log_canonical(&RootSystem::named("A1").unwrap(), &[2]).unwrap().all_passed());
        assert!(verify_log_canonical(&RootSystem::named("A2").unwrap(), &[1, 1]).unwrap().all_passed());
        assert!(verify_log_canonical(&RootSystem::named("B2").unwrap(), &[1, 1]).unwrap().all_passed());
        let rep = g2_regularity_chain();
        assert_eq!(rep.checks.len(), 3);
        assert!(rep.all_passed(), "{rep:?}");
    }

    #[test]
    fn boundary_homogeneity() {
        let s = session("B2", &[1, 1]);
        let vals = [int(3), int(2), int(-1), int(5)];
        let (lhs, rhs) = boundary_homogeneity_at(&s, 0, 0, &vals).unwrap();
        assert_eq!(lhs, rhs);
    }
}
