//! Points of the open zastava chart in coordinates `(w_{i,r}, y_{i,r})`.
//!
//! `w_{i,1..a_i}` are the roots of the monic `Q_i` and `y_{i,r} = R_i(w_{i,r})`.
//! Within a node the coordinates are kept sorted by `w` so that two points
//! describing the same configuration compare equal.

use num_complex::Complex64;
use thiserror::Error;

use crate::polyalg::{interpolate, rational_roots, resultant, PolyError, RatPoly, RootFinder};
use crate::rootdata::{ColoredDivisor, RootSystem};
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZastavaError {
    #[error("node {node}: coordinates {r} and {s} share the same w")]
    RepeatedRoot { node: usize, r: usize, s: usize },
    #[error("regular locus violation: {0}")]
    RegularLocusViolation(String),
    #[error("supports are not disjoint: w = {0} occurs in both points")]
    DisjointnessViolation(String),
    #[error("pole: w_({i},{r}) = w_({j},{s}) with α_{i}·α_{j} < 0")]
    PoleAtCoincidence { i: usize, r: usize, j: usize, s: usize },
    #[error("expected {expected} nodes, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("the leading coefficient of Q is not 1")]
    NonMonic,
    #[error("deg R = {r} must be below deg Q = {q}")]
    DegreeViolation { r: isize, q: isize },
    #[error("points live on different root systems")]
    RootSystemMismatch,
    #[error("w_i and w_j coincide")]
    CoincidentPoints,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

impl ZastavaError {
    pub fn name(&self) -> &'static str {
        match self {
            ZastavaError::RepeatedRoot { .. } => "RepeatedRoot",
            ZastavaError::RegularLocusViolation(_) => "RegularLocusViolation",
            ZastavaError::DisjointnessViolation(_) => "DisjointnessViolation",
            ZastavaError::PoleAtCoincidence { .. } => "PoleAtCoincidence",
            ZastavaError::RankMismatch { .. } => "RankMismatch",
            ZastavaError::NonMonic => "NonMonic",
            ZastavaError::DegreeViolation { .. } => "DegreeViolation",
            ZastavaError::RootSystemMismatch => "RootSystemMismatch",
            ZastavaError::CoincidentPoints => "CoincidentPoints",
            ZastavaError::Poly(e) => e.name(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coord<S> {
    pub w: S,
    pub y: S,
}

impl<S> Coord<S> {
    pub fn new(w: S, y: S) -> Self {
        Coord { w, y }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZastavaPoint<S> {
    rs: RootSystem,
    nodes: Vec<Vec<Coord<S>>>,
}

/// Based map `R/Q` for SL₂.
#[derive(Debug, Clone, PartialEq)]
pub struct SL2Map<S> {
    pub q: RatPoly<S>,
    pub r: RatPoly<S>,
}

impl<S: Scalar> SL2Map<S> {
    pub fn new(q: RatPoly<S>, r: RatPoly<S>) -> Result<Self, ZastavaError> {
        if !q.is_monic() {
            return Err(ZastavaError::NonMonic);
        }
        if r.degree_or_neg() >= q.degree_or_neg() {
            return Err(ZastavaError::DegreeViolation {
                r: r.degree_or_neg(),
                q: q.degree_or_neg(),
            });
        }
        Ok(SL2Map { q, r })
    }

    /// `gcd(Q, R) = 1`; false on the boundary.
    pub fn is_coprime(&self) -> bool {
        self.q.gcd(&self.r).is_constant()
    }

    /// `R₁/Q₁ + R₂/Q₂` over the common denominator `Q₁Q₂`.
    pub fn add(&self, other: &Self) -> Self {
        SL2Map {
            q: &self.q * &other.q,
            r: &(&self.r * &other.q) + &(&other.r * &self.q),
        }
    }
}

/// Single-valued derived coordinates of a point on the regular locus.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedCoords<S> {
    /// `𝔶_{i,r} = y_{i,r}/Q′_i(w_{i,r})`.
    pub eta: Vec<Vec<S>>,
    /// `ȳ²_{i,r} = y²_{i,r}·∏_{j≠i} Q_j(w_{i,r})^{A[i][j]}`.
    pub ybar_sq: Vec<Vec<S>>,
}

/// Report of the B₂ Plücker fixture.
#[derive(Debug, Clone, PartialEq)]
pub struct B2PluckerReport<S> {
    pub a1: S,
    pub a2: S,
    pub b01: S,
    pub b12: S,
    pub b02: S,
    pub b03: S,
    /// The three quadrics, in the order `b02`, `b03`, `b02²`.
    pub quadrics: [bool; 3],
    /// `−b03`.
    pub boundary: S,
}

impl<S: Scalar> B2PluckerReport<S> {
    pub fn all_hold(&self) -> bool {
        self.quadrics.iter().all(|&q| q)
    }
}

/// `x^{e/2}` on the principal branch.
pub fn half_power(x: Complex64, e: i64) -> Complex64 {
    if e % 2 == 0 {
        return x.powi((e / 2) as i32);
    }
    (x.ln() * (e as f64 / 2.0)).exp()
}

impl<S: Scalar> ZastavaPoint<S> {
    /// Builds a point, sorting each node by `w` and rejecting repeated `w`
    /// within a node.
    pub fn new(rs: RootSystem, mut nodes: Vec<Vec<Coord<S>>>) -> Result<Self, ZastavaError> {
        if nodes.len() != rs.rank() {
            return Err(ZastavaError::RankMismatch {
                expected: rs.rank(),
                got: nodes.len(),
            });
        }
        for (i, node) in nodes.iter_mut().enumerate() {
            for r in 0..node.len() {
                for s in r + 1..node.len() {
                    if node[r].w == node[s].w {
                        return Err(ZastavaError::RepeatedRoot { node: i, r, s });
                    }
                }
            }
            node.sort_by(|a, b| a.w.canonical_cmp(&b.w));
        }
        Ok(ZastavaPoint { rs, nodes })
    }

    pub fn empty(rs: RootSystem) -> Self {
        let nodes = vec![Vec::new(); rs.rank()];
        ZastavaPoint { rs, nodes }
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn nodes(&self) -> &[Vec<Coord<S>>] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &[Coord<S>] {
        &self.nodes[i]
    }

    /// `a_i` per node.
    pub fn alpha(&self) -> Vec<usize> {
        self.nodes.iter().map(Vec::len).collect()
    }

    pub fn total_degree(&self) -> usize {
        self.nodes.iter().map(Vec::len).sum()
    }

    pub fn map_scalars<T: Scalar>(&self, f: impl Fn(&S) -> T) -> ZastavaPoint<T> {
        ZastavaPoint {
            rs: self.rs.clone(),
            nodes: self
                .nodes
                .iter()
                .map(|n| n.iter().map(|c| Coord::new(f(&c.w), f(&c.y))).collect())
                .collect(),
        }
    }

    /// `Q_i(z) = ∏_r (z − w_{i,r})`.
    pub fn q_polys(&self) -> Vec<RatPoly<S>> {
        self.nodes
            .iter()
            .map(|n| RatPoly::from_roots(&n.iter().map(|c| c.w.clone()).collect::<Vec<_>>()))
            .collect()
    }

    /// `(Q_i, R_i)` for one node, with `R_i` interpolating the `y`'s.
    pub fn node_map(&self, i: usize) -> Result<SL2Map<S>, ZastavaError> {
        let node = &self.nodes[i];
        let q = RatPoly::from_roots(&node.iter().map(|c| c.w.clone()).collect::<Vec<_>>());
        let pairs: Vec<(S, S)> = node.iter().map(|c| (c.w.clone(), c.y.clone())).collect();
        let r = interpolate(&pairs)?;
        Ok(SL2Map { q, r })
    }

    /// The SL₂ map of a rank-one point.
    pub fn to_map(&self) -> Result<SL2Map<S>, ZastavaError> {
        if self.rs.rank() != 1 {
            return Err(ZastavaError::RankMismatch {
                expected: 1,
                got: self.rs.rank(),
            });
        }
        self.node_map(0)
    }

    /// Checks `y ≠ 0` everywhere and `Q_j(w_{i,r}) ≠ 0` for `j ≠ i`.
    pub fn check_regular(&self) -> Result<(), ZastavaError> {
        for (i, node) in self.nodes.iter().enumerate() {
            for (r, c) in node.iter().enumerate() {
                if c.y.is_zero() {
                    return Err(ZastavaError::RegularLocusViolation(format!(
                        "y_({i},{r}) = 0"
                    )));
                }
                for (j, other) in self.nodes.iter().enumerate() {
                    if j == i {
                        continue;
                    }
                    if let Some(s) = other.iter().position(|d| d.w == c.w) {
                        return Err(ZastavaError::RegularLocusViolation(format!(
                            "w_({i},{r}) = w_({j},{s})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_regular(&self) -> bool {
        self.check_regular().is_ok()
    }

    /// `∏_{j≠i} Q_j(w)^{e·A[i][j]}` for a `w` of node `i`.
    fn cross_product(&self, qs: &[RatPoly<S>], i: usize, w: &S, e: i64) -> S {
        (0..self.rs.rank())
            .filter(|&j| j != i && self.rs.a(i, j) != 0)
            .fold(S::one(), |acc, j| acc * qs[j].eval(w).powi(e * self.rs.a(i, j)))
    }

    pub fn derived_coords(&self) -> Result<DerivedCoords<S>, ZastavaError> {
        self.check_regular()?;
        let qs = self.q_polys();
        let mut eta = Vec::with_capacity(self.nodes.len());
        let mut ybar_sq = Vec::with_capacity(self.nodes.len());
        for (i, node) in self.nodes.iter().enumerate() {
            let dq = qs[i].derivative();
            eta.push(node.iter().map(|c| c.y.clone() / dq.eval(&c.w)).collect());
            ybar_sq.push(
                node.iter()
                    .map(|c| c.y.clone() * c.y.clone() * self.cross_product(&qs, i, &c.w, 1))
                    .collect(),
            );
        }
        Ok(DerivedCoords { eta, ybar_sq })
    }

    /// `𝔶` coordinates; defined wherever `Q′_i(w) ≠ 0`, which holds on every chart.
    pub fn eta(&self) -> Vec<Vec<S>> {
        let qs = self.q_polys();
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, node)| {
                let dq = qs[i].derivative();
                node.iter().map(|c| c.y.clone() / dq.eval(&c.w)).collect()
            })
            .collect()
    }

    /// `ȳ_{i,r} = y·∏_{j≠i} Q_j(w)^{A[i][j]/2}` with principal half powers.
    pub fn ybar_numeric(&self) -> Result<Vec<Vec<Complex64>>, ZastavaError> {
        self.check_regular()?;
        let qs = self.q_polys();
        Ok(self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, node)| {
                node.iter()
                    .map(|c| {
                        (0..self.rs.rank())
                            .filter(|&j| j != i && self.rs.a(i, j) != 0)
                            .fold(c.y.to_complex(), |acc, j| {
                                acc * half_power(qs[j].eval(&c.w).to_complex(), self.rs.a(i, j))
                            })
                    })
                    .collect()
            })
            .collect())
    }

    /// `s_{i,r} = Log ȳ_{i,r}` (principal branch).
    pub fn log_coords(&self) -> Result<Vec<Vec<Complex64>>, ZastavaError> {
        Ok(self
            .ybar_numeric()?
            .into_iter()
            .map(|n| n.into_iter().map(|v| v.ln()).collect())
            .collect())
    }

    /// Concatenation of two points with disjoint supports: `y` is rescaled by
    /// the other point's `Q_i` so that every `𝔶` is preserved.
    pub fn glue(&self, other: &Self) -> Result<Self, ZastavaError> {
        if self.rs != other.rs {
            return Err(ZastavaError::RootSystemMismatch);
        }
        for c in self.nodes.iter().flatten() {
            if other.nodes.iter().flatten().any(|d| d.w == c.w) {
                return Err(ZastavaError::DisjointnessViolation(format!("{:?}", c.w)));
            }
        }
        let qp = self.q_polys();
        let qq = other.q_polys();
        let nodes = (0..self.rs.rank())
            .map(|i| {
                let mut node: Vec<Coord<S>> = self.nodes[i]
                    .iter()
                    .map(|c| Coord::new(c.w.clone(), c.y.clone() * qq[i].eval(&c.w)))
                    .collect();
                node.extend(
                    other.nodes[i]
                        .iter()
                        .map(|c| Coord::new(c.w.clone(), c.y.clone() * qp[i].eval(&c.w))),
                );
                node
            })
            .collect();
        Self::new(self.rs.clone(), nodes)
    }

    /// Cartan involution: `y ↦ y⁻¹·∏_{j≠i} Q_j(w)^{−A[i][j]}`, `w` fixed.
    pub fn involution(&self) -> Result<Self, ZastavaError> {
        self.check_regular()?;
        let qs = self.q_polys();
        let nodes = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, node)| {
                node.iter()
                    .map(|c| Coord::new(c.w.clone(), c.y.inv() * self.cross_product(&qs, i, &c.w, -1)))
                    .collect()
            })
            .collect();
        Ok(ZastavaPoint {
            rs: self.rs.clone(),
            nodes,
        })
    }

    /// `F² = ∏_{i,r} y^{2d_i}·∏_{j≠i} Q_j(w_{i,r})^{α_i·α_j}`.
    pub fn boundary_sq(&self) -> Result<S, ZastavaError> {
        let mut acc = S::one();
        for (i, node) in self.nodes.iter().enumerate() {
            for (r, c) in node.iter().enumerate() {
                acc = acc * c.y.powi(2 * self.rs.d_i(i));
                for (j, other) in self.nodes.iter().enumerate() {
                    let e = self.rs.dot(i, j);
                    if j == i || e == 0 {
                        continue;
                    }
                    for (s, d) in other.iter().enumerate() {
                        let diff = c.w.clone() - d.w.clone();
                        if diff.is_zero() {
                            return Err(ZastavaError::PoleAtCoincidence { i, r, j, s });
                        }
                        acc = acc * diff.powi(e);
                    }
                }
            }
        }
        Ok(acc)
    }

    /// `F = ∏ ȳ_{i,r}^{d_i}` with `ȳ` on the principal branch.
    pub fn boundary_numeric(&self) -> Result<Complex64, ZastavaError> {
        let ybar = self.ybar_numeric()?;
        Ok(ybar
            .iter()
            .enumerate()
            .flat_map(|(i, n)| n.iter().map(move |v| v.powi(self.rs.d_i(i) as i32)))
            .product())
    }

    /// `π_α`: the colored divisor `Σ α_i·w_{i,r}`.
    pub fn pi_alpha(&self) -> ColoredDivisor<S> {
        ColoredDivisor::new(
            self.rs.rank(),
            self.nodes
                .iter()
                .enumerate()
                .flat_map(|(i, n)| n.iter().map(move |c| (c.w.clone(), i)))
                .collect(),
        )
    }

    /// The A₁ point carried by node `i`.
    pub fn sl2_projection(&self, i: usize) -> Result<ZastavaPoint<S>, ZastavaError> {
        if i >= self.rs.rank() {
            return Err(ZastavaError::RankMismatch {
                expected: self.rs.rank(),
                got: i + 1,
            });
        }
        Ok(ZastavaPoint {
            rs: RootSystem::named("A1").expect("A1 is built in"),
            nodes: vec![self.nodes[i].clone()],
        })
    }
}

impl ZastavaPoint<Rational> {
    /// Exact inverse of [`ZastavaPoint::to_map`]; needs `Q` to split over Q.
    pub fn from_map(m: &SL2Map<Rational>) -> Result<Self, ZastavaError> {
        let m = SL2Map::new(m.q.clone(), m.r.clone())?;
        let roots = rational_roots(&m.q)?;
        if let Some(k) = (1..roots.len()).find(|&k| roots[k] == roots[k - 1]) {
            return Err(ZastavaError::RepeatedRoot {
                node: 0,
                r: k - 1,
                s: k,
            });
        }
        let nodes = vec![roots
            .into_iter()
            .map(|w| {
                let y = m.r.eval(&w);
                Coord::new(w, y)
            })
            .collect()];
        Self::new(RootSystem::named("A1").expect("A1 is built in"), nodes)
    }
}

/// Numeric inverse of [`ZastavaPoint::to_map`]. Roots closer than
/// `sqrt(eps)` (relative) are reported as repeated.
pub fn from_map_numeric<S: Scalar>(
    m: &SL2Map<S>,
    finder: &RootFinder,
) -> Result<ZastavaPoint<Complex64>, ZastavaError> {
    let m = SL2Map::new(m.q.clone(), m.r.clone())?;
    let roots = finder.roots(&m.q)?;
    let tol = finder.eps.sqrt();
    for r in 0..roots.len() {
        for s in r + 1..roots.len() {
            let scale = roots[r].norm().max(roots[s].norm()).max(1.0);
            if (roots[r] - roots[s]).norm() <= tol * scale {
                return Err(ZastavaError::RepeatedRoot { node: 0, r, s });
            }
        }
    }
    let rc = m.r.map(|c| c.to_complex());
    let nodes = vec![roots.into_iter().map(|w| Coord::new(w, rc.eval(&w))).collect()];
    ZastavaPoint::new(RootSystem::named("A1").expect("A1 is built in"), nodes)
}

/// `∏_r R(w_r)`, the resultant of a rank-one point's map.
pub fn map_resultant<S: Scalar>(m: &SL2Map<S>) -> S {
    resultant(&m.q, &m.r)
}

/// Builds the B₂ Plücker data from the two chart coordinates and checks the
/// three quadrics exactly.
pub fn verify_b2_plucker<S: Scalar>(
    w_i: &S,
    w_j: &S,
    y_i: &S,
    y_j: &S,
) -> Result<B2PluckerReport<S>, ZastavaError> {
    if w_i == w_j {
        return Err(ZastavaError::CoincidentPoints);
    }
    let a1 = -w_i.clone();
    let a2 = -w_j.clone();
    let diff = a1.clone() - a2.clone();
    let b01 = y_i.clone();
    let b12 = y_j.clone();
    let b02 = b01.clone() * b12.clone() / diff.clone();
    let b03 = b01.clone() * b02.clone() / diff.clone();
    let quadrics = [
        b02.clone() * diff.clone() == b01.clone() * b12.clone(),
        b03.clone() * diff.clone() == b01.clone() * b02.clone(),
        b02.clone() * b02.clone() == b12.clone() * b03.clone(),
    ];
    Ok(B2PluckerReport {
        boundary: -b03.clone(),
        a1,
        a2,
        b01,
        b12,
        b02,
        b03,
        quadrics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn a1(coords: &[(Rational, Rational)]) -> ZastavaPoint<Rational> {
        ZastavaPoint::new(
            RootSystem::named("A1").unwrap(),
            vec![coords.iter().map(|(w, y)| Coord::new(w.clone(), y.clone())).collect()],
        )
        .unwrap()
    }

    fn two_node(name: &str, wi: i64, yi: i64, wj: i64, yj: i64) -> ZastavaPoint<Rational> {
        ZastavaPoint::new(
            RootSystem::named(name).unwrap(),
            vec![
                vec![Coord::new(int(wi), int(yi))],
                vec![Coord::new(int(wj), int(yj))],
            ],
        )
        .unwrap()
    }

    #[test]
    fn q_polys_and_maps() {
        let p = a1(&[(int(0), int(1)), (int(1), int(2))]);
        let m = p.to_map().unwrap();
        assert_eq!(m.q, RatPoly::new(vec![int(0), int(-1), int(1)]));
        assert_eq!(m.r, RatPoly::new(vec![int(1), int(1)]));
        assert!(m.is_coprime());
        assert_eq!(ZastavaPoint::from_map(&m).unwrap(), p);
        let e = ZastavaPoint::<Rational>::empty(RootSystem::named("A1").unwrap());
        assert_eq!(e.q_polys()[0], RatPoly::one());

        let boundary = a1(&[(int(0), int(0)), (int(1), int(2))]).to_map().unwrap();
        assert_eq!(boundary.r, RatPoly::new(vec![int(0), int(2)]));
        assert!(!boundary.is_coprime());

        let single = a1(&[(rat(1, 3), rat(-5, 2))]).to_map().unwrap();
        assert_eq!(single.q, RatPoly::new(vec![rat(-1, 3), int(1)]));
        assert_eq!(single.r, RatPoly::constant(rat(-5, 2)));

        let dbl = SL2Map::new(RatPoly::new(vec![int(1), int(-2), int(1)]), RatPoly::one()).unwrap();
        assert!(matches!(
            ZastavaPoint::from_map(&dbl),
            Err(ZastavaError::RepeatedRoot { .. })
        ));
        assert_eq!(
            SL2Map::new(RatPoly::new(vec![int(0), int(2)]), RatPoly::one()).unwrap_err(),
            ZastavaError::NonMonic
        );
        assert!(matches!(
            from_map_numeric(&dbl, &RootFinder::default()),
            Err(ZastavaError::RepeatedRoot { .. })
        ));
    }

    #[test]
    fn numeric_from_map() {
        let m = SL2Map::new(
            RatPoly::new(vec![int(1), int(0), int(1)]),
            RatPoly::new(vec![int(2), int(1)]),
        )
        .unwrap();
        let p = from_map_numeric(&m, &RootFinder::default()).unwrap();
        let back = p.to_map().unwrap();
        for k in 0..3 {
            assert!((back.q.coeff(k) - m.q.coeff(k).to_complex()).norm() < 1e-12);
        }
        for k in 0..2 {
            assert!((back.r.coeff(k) - m.r.coeff(k).to_complex()).norm() < 1e-12);
        }
    }

    #[test]
    fn derived_examples() {
        let p = a1(&[(int(0), int(1)), (int(1), int(2))]);
        let d = p.derived_coords().unwrap();
        assert_eq!(d.eta, vec![vec![int(-1), int(2)]]);
        assert_eq!(d.ybar_sq, vec![vec![int(1), int(4)]]);

        let q = two_node("A2", 3, 2, 1, 5);
        let d = q.derived_coords().unwrap();
        assert_eq!(d.ybar_sq[0][0], int(4) / int(2));
        assert_eq!(d.ybar_sq[1][0], int(25) / int(-2));

        assert!(matches!(
            a1(&[(int(0), int(0))]).derived_coords(),
            Err(ZastavaError::RegularLocusViolation(_))
        ));
        let ybar = q.ybar_numeric().unwrap();
        for (row, sq) in ybar.iter().zip(&d.ybar_sq) {
            assert!((row[0] * row[0] - sq[0].to_complex()).norm() < 1e-12);
        }
    }

    #[test]
    fn glue_example() {
        let p = a1(&[(int(0), int(1))]);
        let q = a1(&[(int(1), int(2))]);
        let g = p.glue(&q).unwrap();
        assert_eq!(g, a1(&[(int(0), int(-1)), (int(1), int(2))]));
        assert_eq!(g.eta(), vec![vec![int(1), int(2)]]);
        let m = g.to_map().unwrap();
        assert_eq!(m.r, RatPoly::new(vec![int(-1), int(3)]));
        assert_eq!(p.to_map().unwrap().add(&q.to_map().unwrap()), m);
        let e = ZastavaPoint::empty(RootSystem::named("A1").unwrap());
        assert_eq!(p.glue(&e).unwrap(), p);
        assert!(matches!(
            p.glue(&a1(&[(int(0), int(3))])),
            Err(ZastavaError::DisjointnessViolation(_))
        ));
        let div = g.pi_alpha();
        assert_eq!(div.entries(), &[(int(0), 0), (int(1), 0)]);
    }

    #[test]
    fn involution_examples() {
        let p = a1(&[(rat(2, 3), rat(-4, 5))]);
        assert_eq!(p.involution().unwrap(), a1(&[(rat(2, 3), rat(-5, 4))]));
        let q = two_node("A2", 3, 2, 1, 5);
        let iq = q.involution().unwrap();
        // y_1 ↦ (w_1 − w_2)/y_1
        assert_eq!(iq.node(0)[0].y, rat(2, 2));
        assert_eq!(iq.involution().unwrap(), q);
        let prod = iq.boundary_sq().unwrap() * q.boundary_sq().unwrap();
        assert_eq!(prod, int(1));
    }

    #[test]
    fn boundary_examples() {
        let p = a1(&[(int(0), int(3)), (int(1), int(-2))]);
        let m = p.to_map().unwrap();
        let res = map_resultant(&m);
        assert_eq!(p.boundary_sq().unwrap(), res.clone() * res);

        let q = two_node("A2", 3, 2, 1, 5);
        let u = -(int(2) * int(5)) / (int(3) - int(1));
        assert_eq!(q.boundary_sq().unwrap(), -(u.clone() * u));

        let coincide = two_node("A2", 1, 2, 1, 5);
        assert!(matches!(
            coincide.boundary_sq(),
            Err(ZastavaError::PoleAtCoincidence { .. })
        ));
        assert_eq!(two_node("A2", 3, 0, 1, 5).boundary_sq().unwrap(), int(0));

        let b = two_node("B2", 3, 2, 1, 5);
        let rep = verify_b2_plucker(&int(3), &int(1), &int(2), &int(5)).unwrap();
        assert!(rep.all_hold());
        assert_eq!(b.boundary_sq().unwrap(), rep.b03.clone() * rep.b03.clone());
        assert_eq!(rep.boundary, -(int(4) * int(5)) / int(4));
        let f = b.boundary_numeric().unwrap();
        assert!((f * f - b.boundary_sq().unwrap().to_complex()).norm() < 1e-9);
    }

    #[test]
    fn plucker_fixture() {
        let rep = verify_b2_plucker(&int(0), &int(1), &int(1), &int(1)).unwrap();
        assert!(rep.all_hold());
        assert_eq!(rep.b03, int(1));
        let rep = verify_b2_plucker(&int(0), &int(1), &int(0), &rat(7, 2)).unwrap();
        assert!(rep.all_hold());
        assert_eq!((rep.b02, rep.b03), (int(0), int(0)));
        assert_eq!(
            verify_b2_plucker(&int(2), &int(2), &int(1), &int(1)).unwrap_err(),
            ZastavaError::CoincidentPoints
        );
    }

    #[test]
    fn projection_and_pi() {
        let q = two_node("A2", 0, 2, 1, 5);
        let pr = q.sl2_projection(0).unwrap();
        assert_eq!(pr.node(0), q.node(0));
        assert_eq!(pr.pi_alpha().color_part(0), q.pi_alpha().color_part(0));
        assert_eq!(q.pi_alpha().entries(), &[(int(0), 0), (int(1), 1)]);
        assert_eq!(q.pi_alpha().degree(), vec![1, 1]);
        let e = ZastavaPoint::<Rational>::empty(RootSystem::named("A2").unwrap());
        assert!(e.pi_alpha().entries().is_empty());
    }
}
