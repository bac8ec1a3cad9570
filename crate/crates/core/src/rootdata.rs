//! Finite root data: Cartan matrices, symmetrizers, the invariant form on
//! coroots and coweights, and colored divisors on the line.
//!
//! Convention: `A[i][j] = ⟨α_j, α̌_i⟩`, where `α_i` are the simple coroots
//! indexing the chart and `α̌_i` the simple roots. The invariant form is
//! `α_i·α_j = d_i·A[i][j]`, with `d_i` normalized so that the shortest
//! `α_i` in each component has `d_i = 1`.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootDataError {
    #[error("invalid Cartan matrix: {0}")]
    InvalidCartan(String),
    #[error("unknown root system type {0:?}")]
    UnknownType(String),
    #[error("index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("coweight has {got} pairings, root system has rank {rank}")]
    RankMismatch { got: usize, rank: usize },
    #[error("singular Cartan matrix")]
    SingularCartan,
}

impl RootDataError {
    pub fn name(&self) -> &'static str {
        match self {
            RootDataError::InvalidCartan(_) => "InvalidCartan",
            RootDataError::UnknownType(_) => "UnknownType",
            RootDataError::IndexOutOfRange { .. } => "IndexOutOfRange",
            RootDataError::RankMismatch { .. } => "RankMismatch",
            RootDataError::SingularCartan => "SingularCartan",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSystem {
    name: Option<String>,
    cartan: Vec<Vec<i64>>,
    sym: Vec<i64>,
    d: i64,
    cartan_inv: Vec<Vec<Rational>>,
}

/// How to build a [`RootSystem`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootSystemSpec {
    Named(String),
    Cartan(Vec<Vec<i64>>),
}

fn chain(n: usize) -> Vec<Vec<i64>> {
    let mut a = vec![vec![0; n]; n];
    for i in 0..n {
        a[i][i] = 2;
        if i + 1 < n {
            a[i][i + 1] = -1;
            a[i + 1][i] = -1;
        }
    }
    a
}

/// Cartan matrix of a named type. Nodes follow Bourbaki numbering, except
/// that rank-two types list the node with the longer coroot first.
pub fn named_cartan(name: &str) -> Result<Vec<Vec<i64>>, RootDataError> {
    let unknown = || RootDataError::UnknownType(name.to_string());
    let upper = name.trim().to_ascii_uppercase();
    let mut chars = upper.chars();
    let family = chars.next().ok_or_else(unknown)?;
    let n: usize = chars.as_str().parse().map_err(|_| unknown())?;
    let a = match (family, n) {
        ('A', n) if n >= 1 => chain(n),
        ('B', 2) | ('C', 2) => vec![vec![2, -1], vec![-2, 2]],
        ('B', n) if n >= 3 => {
            let mut a = chain(n);
            a[n - 2][n - 1] = -2;
            a
        }
        ('C', n) if n >= 3 => {
            let mut a = chain(n);
            a[n - 1][n - 2] = -2;
            a
        }
        ('D', n) if n >= 4 => {
            let mut a = chain(n);
            a[n - 2][n - 1] = 0;
            a[n - 1][n - 2] = 0;
            a[n - 3][n - 1] = -1;
            a[n - 1][n - 3] = -1;
            a
        }
        ('E', n @ 6..=8) => {
            let mut a = vec![vec![0; n]; n];
            let mut edge = |i: usize, j: usize| {
                a[i][j] = -1;
                a[j][i] = -1;
            };
            edge(0, 2);
            edge(1, 3);
            for k in 2..n - 1 {
                edge(k, k + 1);
            }
            for (i, row) in a.iter_mut().enumerate() {
                row[i] = 2;
            }
            a
        }
        ('F', 4) => vec![
            vec![2, -1, 0, 0],
            vec![-1, 2, -2, 0],
            vec![0, -1, 2, -1],
            vec![0, 0, -1, 2],
        ],
        ('G', 2) => vec![vec![2, -1], vec![-3, 2]],
        _ => return Err(unknown()),
    };
    Ok(a)
}

fn symmetrizer(a: &[Vec<i64>]) -> Result<Vec<i64>, RootDataError> {
    let n = a.len();
    let mut d: Vec<Option<Rational>> = vec![None; n];
    for start in 0..n {
        if d[start].is_some() {
            continue;
        }
        d[start] = Some(Rational::one());
        let mut component = vec![start];
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            let di = d[i].clone().expect("visited");
            for j in 0..n {
                if i == j || a[i][j] == 0 {
                    continue;
                }
                // d_i A[i][j] = d_j A[j][i]
                let dj = di.clone() * Rational::from_integer(a[i][j].into())
                    / Rational::from_integer(a[j][i].into());
                match &d[j] {
                    Some(existing) if *existing != dj => {
                        return Err(RootDataError::InvalidCartan(
                            "matrix is not symmetrizable".into(),
                        ))
                    }
                    Some(_) => {}
                    None => {
                        d[j] = Some(dj);
                        component.push(j);
                        stack.push(j);
                    }
                }
            }
        }
        let min = component
            .iter()
            .map(|&k| d[k].clone().expect("visited"))
            .min()
            .expect("nonempty component");
        for &k in &component {
            let v = d[k].clone().expect("visited") / min.clone();
            d[k] = Some(v);
        }
    }
    d.into_iter()
        .map(|v| {
            let v = v.expect("all nodes visited");
            match (v.is_integer(), v.to_integer().to_i64()) {
                (true, Some(k @ 1..=3)) => Ok(k),
                _ => Err(RootDataError::InvalidCartan(format!(
                    "symmetrizer value {v} is outside {{1,2,3}}"
                ))),
            }
        })
        .collect()
}

fn invert(a: &[Vec<i64>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Rational> = row.iter().map(|&x| Rational::from_i64(x)).collect();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&r| !m[r][k].is_zero())?;
        m.swap(p, k);
        let inv = m[k][k].inv();
        for v in m[k].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        for i in 0..n {
            if i != k && !m[i][k].is_zero() {
                let f = m[i][k].clone();
                for j in 0..2 * n {
                    let v = m[i][j].clone() - f.clone() * m[k][j].clone();
                    m[i][j] = v;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

impl RootSystem {
    pub fn build(spec: &RootSystemSpec) -> Result<Self, RootDataError> {
        match spec {
            RootSystemSpec::Named(name) => {
                let mut rs = Self::from_cartan(named_cartan(name)?)?;
                rs.name = Some(name.trim().to_ascii_uppercase());
                Ok(rs)
            }
            RootSystemSpec::Cartan(a) => Self::from_cartan(a.clone()),
        }
    }

    pub fn named(name: &str) -> Result<Self, RootDataError> {
        Self::build(&RootSystemSpec::Named(name.to_string()))
    }

    /// Validates a symmetrizable finite-type Cartan matrix. Disconnected
    /// diagrams are accepted; `d` is then the maximum over all nodes.
    pub fn from_cartan(a: Vec<Vec<i64>>) -> Result<Self, RootDataError> {
        let n = a.len();
        if n == 0 {
            return Err(RootDataError::InvalidCartan("empty matrix".into()));
        }
        for (i, row) in a.iter().enumerate() {
            if row.len() != n {
                return Err(RootDataError::InvalidCartan(format!(
                    "row {i} has length {}, expected {n}",
                    row.len()
                )));
            }
            if row[i] != 2 {
                return Err(RootDataError::InvalidCartan(format!(
                    "diagonal entry ({i},{i}) is {}, expected 2",
                    row[i]
                )));
            }
            for j in 0..n {
                if i != j && (row[j] > 0 || (row[j] == 0) != (a[j][i] == 0)) {
                    return Err(RootDataError::InvalidCartan(format!(
                        "off-diagonal entries ({i},{j}) and ({j},{i}) are inconsistent"
                    )));
                }
            }
        }
        let sym = symmetrizer(&a)?;
        // Positive definiteness of d_i A[i][j] via leading principal minors.
        for k in 1..=n {
            let minor: Vec<Vec<Rational>> = (0..k)
                .map(|i| (0..k).map(|j| Rational::from_i64(sym[i] * a[i][j])).collect())
                .collect();
            if !crate::polyalg::determinant(minor).is_positive() {
                return Err(RootDataError::InvalidCartan(
                    "symmetrized matrix is not positive definite (not of finite type)".into(),
                ));
            }
        }
        let cartan_inv = invert(&a).ok_or(RootDataError::SingularCartan)?;
        let d = *sym.iter().max().expect("nonempty");
        Ok(RootSystem {
            name: None,
            cartan: a,
            sym,
            d,
            cartan_inv,
        })
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    /// `A[i][j] = ⟨α_j, α̌_i⟩`.
    pub fn a(&self, i: usize, j: usize) -> i64 {
        self.cartan[i][j]
    }

    /// `d_i = α_i·α_i/2`.
    pub fn d_i(&self, i: usize) -> i64 {
        self.sym[i]
    }

    pub fn symmetrizers(&self) -> &[i64] {
        &self.sym
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    /// `ď_i = d/d_i`.
    pub fn dcheck(&self, i: usize) -> Rational {
        Rational::new(BigInt::from(self.d), BigInt::from(self.sym[i]))
    }

    /// `α_i·α_j = d_i·A[i][j]`, an integer.
    pub fn dot(&self, i: usize, j: usize) -> i64 {
        self.sym[i] * self.cartan[i][j]
    }

    /// `α̌_i·α̌_j = α_i·α_j/(d_i d_j)` for the dual form.
    pub fn dual_dot(&self, i: usize, j: usize) -> Rational {
        Rational::new(
            BigInt::from(self.dot(i, j)),
            BigInt::from(self.sym[i] * self.sym[j]),
        )
    }

    fn check_index(&self, i: usize) -> Result<(), RootDataError> {
        if i < self.rank() {
            Ok(())
        } else {
            Err(RootDataError::IndexOutOfRange {
                index: i,
                rank: self.rank(),
            })
        }
    }

    fn check_coweight(&self, c: &Coweight) -> Result<(), RootDataError> {
        if c.pairings.len() == self.rank() {
            Ok(())
        } else {
            Err(RootDataError::RankMismatch {
                got: c.pairings.len(),
                rank: self.rank(),
            })
        }
    }

    /// Coordinates of a coweight in the basis of simple coroots.
    pub fn coroot_coords(&self, c: &Coweight) -> Result<Vec<Rational>, RootDataError> {
        self.check_coweight(c)?;
        Ok(self
            .cartan_inv
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&c.pairings)
                    .fold(Rational::zero(), |acc, (x, &p)| acc + x.clone() * Rational::from_i64(p))
            })
            .collect())
    }

    pub fn pairing(&self, kind: &PairingKind) -> Result<Rational, RootDataError> {
        match kind {
            PairingKind::RootRoot(i, j) => {
                self.check_index(*i)?;
                self.check_index(*j)?;
                Ok(Rational::from_i64(self.dot(*i, *j)))
            }
            PairingKind::RootCoweight(i, lam) => {
                self.check_index(*i)?;
                self.check_coweight(lam)?;
                Ok(Rational::from_i64(self.sym[*i] * lam.pairings[*i]))
            }
            PairingKind::CoweightCoweight(lam, mu) => {
                self.check_coweight(mu)?;
                let c = self.coroot_coords(lam)?;
                Ok(c.iter().enumerate().fold(Rational::zero(), |acc, (j, cj)| {
                    acc + cj.clone() * Rational::from_i64(self.sym[j] * mu.pairings[j])
                }))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coweight {
    /// `p_i = ⟨λ, α̌_i⟩`.
    pub pairings: Vec<i64>,
}

impl Coweight {
    pub fn new(pairings: Vec<i64>) -> Self {
        Coweight { pairings }
    }

    pub fn is_dominant(&self) -> bool {
        self.pairings.iter().all(|&p| p >= 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairingKind {
    RootRoot(usize, usize),
    RootCoweight(usize, Coweight),
    CoweightCoweight(Coweight, Coweight),
}

/// A finite multiset of points on the line, each colored by a node.
#[derive(Debug, Clone, PartialEq)]
pub struct ColoredDivisor<S> {
    rank: usize,
    entries: Vec<(S, usize)>,
}

impl<S: Scalar> ColoredDivisor<S> {
    /// Entries are kept sorted by point, then color.
    pub fn new(rank: usize, mut entries: Vec<(S, usize)>) -> Self {
        entries.sort_by(|a, b| a.0.canonical_cmp(&b.0).then(a.1.cmp(&b.1)));
        ColoredDivisor { rank, entries }
    }

    pub fn empty(rank: usize) -> Self {
        ColoredDivisor {
            rank,
            entries: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn entries(&self) -> &[(S, usize)] {
        &self.entries
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Self::new(self.rank.max(other.rank), entries)
    }

    /// True when no point occurs in both supports, whatever its color.
    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.entries
            .iter()
            .all(|(p, _)| other.entries.iter().all(|(q, _)| p != q))
    }

    /// Coefficients `a_i` of `Σ a_i α_i`.
    pub fn degree(&self) -> Vec<usize> {
        let mut a = vec![0; self.rank];
        for (_, c) in &self.entries {
            a[*c] += 1;
        }
        a
    }

    /// Part of the divisor carrying the given color.
    pub fn color_part(&self, color: usize) -> Vec<S> {
        self.entries
            .iter()
            .filter(|(_, c)| *c == color)
            .map(|(p, _)| p.clone())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DivisorResult<S> {
    Divisor(ColoredDivisor<S>),
    Bool(bool),
    Degree(Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivisorOp {
    Union,
    IsDisjoint,
    Degree,
}

/// Dispatches one of the divisor operations; `Degree` reads only `a`.
pub fn divisor_ops<S: Scalar>(
    a: &ColoredDivisor<S>,
    b: &ColoredDivisor<S>,
    kind: DivisorOp,
) -> DivisorResult<S> {
    match kind {
        DivisorOp::Union => DivisorResult::Divisor(a.union(b)),
        DivisorOp::IsDisjoint => DivisorResult::Bool(a.is_disjoint(b)),
        DivisorOp::Degree => DivisorResult::Degree(a.degree()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    const ALL: &[&str] = &[
        "A1", "A2", "A3", "A5", "B2", "B3", "B4", "C3", "C4", "D4", "D5", "E6", "E7", "E8",
        "F4", "G2",
    ];

    #[test]
    fn named_examples() {
        let a2 = RootSystem::named("A2").unwrap();
        assert_eq!(a2.cartan(), &[vec![2, -1], vec![-1, 2]]);
        assert_eq!(a2.symmetrizers(), &[1, 1]);
        assert_eq!(a2.d(), 1);
        let b2 = RootSystem::named("B2").unwrap();
        assert_eq!(b2.symmetrizers(), &[2, 1]);
        assert_eq!(b2.d(), 2);
        let g2 = RootSystem::named("G2").unwrap();
        assert_eq!(g2.symmetrizers(), &[3, 1]);
        assert_eq!(g2.d(), 3);
        assert_eq!(g2.dcheck(0), int(1));
        assert_eq!(g2.dcheck(1), int(3));
        assert!(RootSystem::named("Q7").is_err());
        assert!(RootSystem::named("E9").is_err());
    }

    #[test]
    fn rejects_bad_matrices() {
        for bad in [
            vec![vec![2, -1], vec![-4, 2]],          // affine A2 twisted
            vec![vec![2, -2], vec![-2, 2]],          // affine A1
            vec![vec![2, -1, -1], vec![-1, 2, -1], vec![-1, -1, 2]], // affine A2
            vec![vec![2, 1], vec![1, 2]],
            vec![vec![2, -1], vec![0, 2]],
            vec![vec![3]],
        ] {
            assert!(
                matches!(RootSystem::from_cartan(bad.clone()), Err(RootDataError::InvalidCartan(_))),
                "{bad:?}"
            );
        }
        let non_sym = vec![
            vec![2, -1, 0],
            vec![-2, 2, -1],
            vec![0, -2, 2],
        ];
        assert!(RootSystem::from_cartan(non_sym).is_err());
    }

    #[test]
    fn form_is_symmetric_and_consistent() {
        for name in ALL {
            let rs = RootSystem::named(name).unwrap();
            for i in 0..rs.rank() {
                assert_eq!(rs.dot(i, i), 2 * rs.d_i(i));
                for j in 0..rs.rank() {
                    assert_eq!(rs.dot(i, j), rs.dot(j, i), "{name} ({i},{j})");
                    // d_i A[i][j] = d·A[i][j]/ď_i
                    let via_d = Rational::from_i64(rs.d() * rs.a(i, j)) / rs.dcheck(i);
                    assert_eq!(Rational::from_i64(rs.dot(i, j)), via_d);
                }
            }
            if rs.symmetrizers().iter().all(|&d| d == 1) {
                assert_eq!(rs.d(), 1);
                assert!((0..rs.rank()).all(|i| rs.dcheck(i) == int(1)));
            }
        }
    }

    #[test]
    fn coweight_pairings() {
        let a1 = RootSystem::named("A1").unwrap();
        let lam = Coweight::new(vec![2]);
        assert_eq!(
            a1.pairing(&PairingKind::CoweightCoweight(lam.clone(), lam.clone())).unwrap(),
            int(2)
        );
        let a2 = RootSystem::named("A2").unwrap();
        assert_eq!(a2.pairing(&PairingKind::RootRoot(0, 1)).unwrap(), int(-1));
        let w1 = Coweight::new(vec![1, 0]);
        // ω_1 = (2α_1 + α_2)/3, ω_1·ω_1 = 2/3
        assert_eq!(
            a2.coroot_coords(&w1).unwrap(),
            vec![rat(2, 3), rat(1, 3)]
        );
        assert_eq!(
            a2.pairing(&PairingKind::CoweightCoweight(w1.clone(), w1.clone())).unwrap(),
            rat(2, 3)
        );
        // A coroot viewed as a coweight pairs like a coroot.
        for name in ALL {
            let rs = RootSystem::named(name).unwrap();
            for i in 0..rs.rank() {
                let as_cw = Coweight::new((0..rs.rank()).map(|k| rs.a(k, i)).collect());
                for j in 0..rs.rank() {
                    assert_eq!(
                        rs.pairing(&PairingKind::RootCoweight(j, as_cw.clone())).unwrap(),
                        Rational::from_i64(rs.dot(j, i))
                    );
                }
                assert_eq!(
                    rs.pairing(&PairingKind::CoweightCoweight(as_cw.clone(), as_cw)).unwrap(),
                    Rational::from_i64(rs.dot(i, i))
                );
            }
        }
        assert!(matches!(
            a2.pairing(&PairingKind::RootRoot(0, 2)),
            Err(RootDataError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn divisors() {
        let a = ColoredDivisor::new(2, vec![(int(0), 0)]);
        let b = ColoredDivisor::new(2, vec![(int(1), 1)]);
        let c = ColoredDivisor::new(2, vec![(int(0), 1)]);
        let u = a.union(&b);
        assert_eq!(u.entries(), &[(int(0), 0), (int(1), 1)]);
        assert_eq!(u.degree(), vec![1, 1]);
        assert!(!a.is_disjoint(&c));
        assert!(a.is_disjoint(&b));
        assert_eq!(divisor_ops(&a, &c, DivisorOp::IsDisjoint), DivisorResult::Bool(false));
    }

    #[test]
    fn dual_form_signs() {
        assert_eq!(RootSystem::named("A2").unwrap().dual_dot(0, 1), int(-1));
        let b2 = RootSystem::named("B2").unwrap();
        assert_eq!(b2.dual_dot(0, 1) * int(b2.d()), int(-2));
        let g2 = RootSystem::named("G2").unwrap();
        assert_eq!(g2.dual_dot(0, 1) * int(g2.d()), int(-3));
    }
}
