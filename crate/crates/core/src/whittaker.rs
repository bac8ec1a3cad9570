//! Extension classes and Whittaker pairings on the chart, with the
//! Kronecker–Hankel resultant identities.

use thiserror::Error;

use crate::polyalg::{bezout_pair, hankel_det, resultant, series_at_infinity, LaurentTail, PolyError, RatPoly};
use crate::zastava::{ZastavaError, ZastavaPoint};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WhittakerError {
    #[error("expected a rank-one point, got rank {0}")]
    NotRankOne(usize),
    #[error("expected {expected} polynomials K_i, got {got}")]
    KCountMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Zastava(#[from] ZastavaError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

impl WhittakerError {
    pub fn name(&self) -> &'static str {
        match self {
            WhittakerError::NotRankOne(_) => "RankMismatch",
            WhittakerError::KCountMismatch { .. } => "RankMismatch",
            WhittakerError::Zastava(e) => e.name(),
            WhittakerError::Poly(e) => e.name(),
        }
    }
}

/// Coefficients `c_0..c_{2a−2}` of the extension class.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtClass<S> {
    pub a: usize,
    pub c: Vec<S>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtRoute {
    /// `c_k = Σ_r w_r^k / (y_r Q′(w_r))`.
    ClosedForm,
    /// Expansion of `D/Q` at infinity, where `RD − QF = 1`.
    BezoutOracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

fn rank_one<S: Scalar>(p: &ZastavaPoint<S>) -> Result<(), WhittakerError> {
    match p.root_system().rank() {
        1 => Ok(()),
        r => Err(WhittakerError::NotRankOne(r)),
    }
}

/// Requires `gcd(Q, R) = 1`.
fn coprime_map<S: Scalar>(
    p: &ZastavaPoint<S>,
) -> Result<(RatPoly<S>, RatPoly<S>), WhittakerError> {
    let m = p.to_map()?;
    let g = m.q.gcd(&m.r);
    if !g.is_constant() {
        return Err(PolyError::NonCoprime {
            gcd_degree: g.degree().unwrap_or(0),
        }
        .into());
    }
    Ok((m.q, m.r))
}

pub fn ext_class<S: Scalar>(p: &ZastavaPoint<S>, via: ExtRoute) -> Result<ExtClass<S>, WhittakerError> {
    let a = p.total_degree();
    if a == 0 {
        rank_one(p)?;
        return Ok(ExtClass { a, c: Vec::new() });
    }
    ext_moments(p, via, 2 * a - 2)
}

/// Coefficients `c_0..c_order`, extending the class to any order.
pub fn ext_moments<S: Scalar>(
    p: &ZastavaPoint<S>,
    via: ExtRoute,
    order: usize,
) -> Result<ExtClass<S>, WhittakerError> {
    rank_one(p)?;
    let a = p.total_degree();
    let (q, r) = coprime_map(p)?;
    p.check_regular()?;
    if a == 0 {
        return Ok(ExtClass { a, c: vec![S::zero(); order + 1] });
    }
    let c = match via {
        ExtRoute::ClosedForm => {
            let dq = q.derivative();
            let weights: Vec<(S, S)> = p
                .node(0)
                .iter()
                .map(|c| (c.w.clone(), (c.y.clone() * dq.eval(&c.w)).inv()))
                .collect();
            let mut out = Vec::with_capacity(order + 1);
            let mut powers: Vec<S> = vec![S::one(); weights.len()];
            for _ in 0..=order {
                let ck = weights
                    .iter()
                    .zip(&powers)
                    .fold(S::zero(), |acc, ((_, wt), pw)| acc + wt.clone() * pw.clone());
                out.push(ck);
                for (pw, (w, _)) in powers.iter_mut().zip(&weights) {
                    *pw = pw.clone() * w.clone();
                }
            }
            out
        }
        ExtRoute::BezoutOracle => {
            let (d, _f) = bezout_pair(&r, &q)?;
            series_at_infinity(&d, &q, order)?.coeffs
        }
    };
    Ok(ExtClass { a, c })
}

/// `χ_+ = Σ_{i,r} y⁻¹·∏_{j≠i} Q_j(w)^{−A[i][j]}·K_i(w)/Q′_i(w)` and
/// `χ_− = Σ_{i,r} y·K_i(w)/Q′_i(w)`, so that `χ_−(p) = χ_+(ι p)`.
pub fn chi_pairing<S: Scalar>(
    p: &ZastavaPoint<S>,
    k: &[RatPoly<S>],
    side: Side,
) -> Result<S, WhittakerError> {
    let rs = p.root_system();
    if k.len() != rs.rank() {
        return Err(WhittakerError::KCountMismatch {
            expected: rs.rank(),
            got: k.len(),
        });
    }
    p.check_regular()?;
    let qs = p.q_polys();
    let mut acc = S::zero();
    for (i, node) in p.nodes().iter().enumerate() {
        let dq = qs[i].derivative();
        for c in node {
            let base = k[i].eval(&c.w) / dq.eval(&c.w);
            let weight = match side {
                Side::Plus => (0..rs.rank())
                    .filter(|&j| j != i && rs.a(i, j) != 0)
                    .fold(c.y.inv(), |acc, j| acc * qs[j].eval(&c.w).powi(-rs.a(i, j))),
                Side::Minus => c.y.clone(),
            };
            acc = acc + weight * base;
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KroneckerReport<S> {
    pub a: usize,
    /// Expansion of `R/Q`.
    pub c_tilde: Vec<S>,
    /// Expansion of `D/Q`.
    pub c: Vec<S>,
    pub det_l_tilde: S,
    pub det_l: S,
    /// `∏_r R(w_r)`.
    pub resultant: S,
    /// `det L̃ / resultant`.
    pub sigma: S,
    /// `det L̃ · det L`.
    pub product: S,
}

impl<S: Scalar> KroneckerReport<S> {
    /// `(−1)^{a(a−1)/2}`.
    pub fn conjectured_sigma(&self) -> S {
        if (self.a * self.a.saturating_sub(1) / 2) % 2 == 0 {
            S::one()
        } else {
            -S::one()
        }
    }

    /// `|det L̃| = |∏ R(w_r)|` and `|det L̃ · det L| = 1`, exactly.
    pub fn identities_hold(&self) -> bool {
        let unit = |x: &S| *x == S::one() || *x == -S::one();
        unit(&self.sigma) && unit(&self.product)
    }
}

pub fn kronecker_check<S: Scalar>(p: &ZastavaPoint<S>) -> Result<KroneckerReport<S>, WhittakerError> {
    rank_one(p)?;
    let a = p.total_degree();
    let (q, r) = coprime_map(p)?;
    if a == 0 {
        return Err(PolyError::DegreeViolation("kronecker check needs a ≥ 1".into()).into());
    }
    let c_tilde = series_at_infinity(&r, &q, 2 * a - 2)?;
    let ext = ext_class(p, ExtRoute::BezoutOracle)?;
    let c = LaurentTail { coeffs: ext.c };
    let det_l_tilde = hankel_det(&c_tilde, a)?;
    let det_l = hankel_det(&c, a)?;
    let res = resultant(&q, &r);
    Ok(KroneckerReport {
        a,
        sigma: det_l_tilde.clone() / res.clone(),
        product: det_l_tilde.clone() * det_l.clone(),
        c_tilde: c_tilde.coeffs,
        c: c.coeffs,
        det_l_tilde,
        det_l,
        resultant: res,
    })
}

/// `det L`; its vanishing is where the middle term of the extension splits
/// nontrivially.
pub fn hankel_split_locus<S: Scalar>(p: &ZastavaPoint<S>) -> Result<S, WhittakerError> {
    rank_one(p)?;
    let ext = ext_class(p, ExtRoute::BezoutOracle)?;
    Ok(hankel_det(&LaurentTail { coeffs: ext.c }, ext.a)?)
}
