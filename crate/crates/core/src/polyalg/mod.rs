//! Dense univariate polynomials over a [`Scalar`] domain.
//!
//! Coefficients are stored in ascending order and the highest stored
//! coefficient is nonzero unless the polynomial is zero. Besides ring
//! arithmetic this module provides interpolation, Sylvester resultants,
//! Bezout solutions, expansions at infinity, Hankel determinants and a
//! numeric root finder.

mod det;
mod roots;

use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::scalar::Scalar;

pub use det::determinant;
pub use roots::{rational_roots, roots_numeric, RootFinder};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("duplicate interpolation node at index {0}")]
    DuplicateNode(usize),
    #[error("polynomials are not coprime (gcd has degree {gcd_degree})")]
    NonCoprime { gcd_degree: usize },
    #[error("improper fraction: numerator degree {num} is not below denominator degree {den}")]
    ImproperFraction { num: isize, den: isize },
    #[error("root iteration did not converge after {iterations} sweeps (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("hankel matrix of size {size} needs {needed} coefficients, got {got}")]
    InsufficientCoefficients { size: usize, needed: usize, got: usize },
    #[error("degree precondition violated: {0}")]
    DegreeViolation(String),
    #[error("polynomial does not split into rational linear factors")]
    NotSplit,
    #[error("the zero polynomial has no roots")]
    ZeroPolynomial,
}

impl PolyError {
    pub fn name(&self) -> &'static str {
        match self {
            PolyError::DivisionByZero => "DivisionByZero",
            PolyError::DuplicateNode(_) => "DuplicateNode",
            PolyError::NonCoprime { .. } => "NonCoprime",
            PolyError::ImproperFraction { .. } => "ImproperFraction",
            PolyError::NonConvergence { .. } => "NonConvergence",
            PolyError::InsufficientCoefficients { .. } => "InsufficientCoefficients",
            PolyError::DegreeViolation(_) => "DegreeViolation",
            PolyError::NotSplit => "NotSplit",
            PolyError::ZeroPolynomial => "ZeroPolynomial",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatPoly<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> RatPoly<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(S::one())
    }

    pub fn constant(c: S) -> Self {
        Self::new(vec![c])
    }

    /// The identity polynomial `z`.
    pub fn z() -> Self {
        Self::monomial(S::one(), 1)
    }

    pub fn monomial(c: S, k: usize) -> Self {
        let mut coeffs = vec![S::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// `∏ (z − r)` over the given roots.
    pub fn from_roots(roots: &[S]) -> Self {
        roots.iter().fold(Self::one(), |acc, r| {
            &acc * &Self::new(vec![-r.clone(), S::one()])
        })
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to −1.
    pub fn degree_or_neg(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn leading(&self) -> Option<&S> {
        self.coeffs.last()
    }

    pub fn coeff(&self, k: usize) -> S {
        self.coeffs.get(k).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, x: &S) -> S {
        self.coeffs
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * S::from_i64(k as i64))
                .collect(),
        )
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    /// Multiplies by `z^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![S::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(coeffs)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    pub fn make_monic(&self) -> Self {
        match self.leading() {
            Some(l) => self.scale(&l.inv()),
            None => Self::zero(),
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> RatPoly<T> {
        RatPoly::new(self.coeffs.iter().map(f).collect())
    }

    /// Quotient and remainder with `deg(rem) < deg(divisor)`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self), PolyError> {
        let lead = divisor.leading().ok_or(PolyError::DivisionByZero)?;
        let dd = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let inv = lead.inv();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![S::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone() * inv.clone();
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j].clone() - c.clone() * dc.clone();
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Monic greatest common divisor; zero only if both inputs are zero.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.make_monic()
    }

    /// Extended Euclid: returns `(g, s, t)` with `s·self + t·other = g`, `g` monic.
    pub fn ext_gcd(&self, other: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1).expect("nonzero divisor");
            let s2 = &s0 - &(&q * &s1);
            let t2 = &t0 - &(&q * &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        match r0.leading().cloned() {
            Some(l) => {
                let inv = l.inv();
                (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
            }
            None => (r0, s0, t0),
        }
    }
}

macro_rules! impl_ring_op {
    ($trait:ident, $method:ident, $body:expr) => {
        impl<S: Scalar> $trait<&RatPoly<S>> for &RatPoly<S> {
            type Output = RatPoly<S>;
            fn $method(self, rhs: &RatPoly<S>) -> RatPoly<S> {
                let f: fn(&RatPoly<S>, &RatPoly<S>) -> RatPoly<S> = $body;
                f(self, rhs)
            }
        }
        impl<S: Scalar> $trait<RatPoly<S>> for RatPoly<S> {
            type Output = RatPoly<S>;
            fn $method(self, rhs: RatPoly<S>) -> RatPoly<S> {
                (&self).$method(&rhs)
            }
        }
    };
}

impl_ring_op!(Add, add, |a, b| {
    let n = a.coeffs.len().max(b.coeffs.len());
    RatPoly::new((0..n).map(|k| a.coeff(k) + b.coeff(k)).collect())
});

impl_ring_op!(Sub, sub, |a, b| {
    let n = a.coeffs.len().max(b.coeffs.len());
    RatPoly::new((0..n).map(|k| a.coeff(k) - b.coeff(k)).collect())
});

impl_ring_op!(Mul, mul, |a, b| {
    if a.is_zero() || b.is_zero() {
        return RatPoly::zero();
    }
    let mut out = vec![S::zero(); a.coeffs.len() + b.coeffs.len() - 1];
    for (i, x) in a.coeffs.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.coeffs.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    RatPoly::new(out)
});

impl<S: Scalar> Neg for &RatPoly<S> {
    type Output = RatPoly<S>;
    fn neg(self) -> RatPoly<S> {
        RatPoly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

/// Selector for [`arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithKind {
    Add,
    Sub,
    Mul,
    DivMod,
    Gcd,
    Derivative,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ArithResult<S> {
    Poly(RatPoly<S>),
    Pair(RatPoly<S>, RatPoly<S>),
}

/// Dispatches one of the basic operations; `Derivative` ignores `b`.
pub fn arith<S: Scalar>(
    a: &RatPoly<S>,
    b: &RatPoly<S>,
    kind: ArithKind,
) -> Result<ArithResult<S>, PolyError> {
    Ok(match kind {
        ArithKind::Add => ArithResult::Poly(a + b),
        ArithKind::Sub => ArithResult::Poly(a - b),
        ArithKind::Mul => ArithResult::Poly(a * b),
        ArithKind::DivMod => {
            let (q, r) = a.div_rem(b)?;
            ArithResult::Pair(q, r)
        }
        ArithKind::Gcd => ArithResult::Poly(a.gcd(b)),
        ArithKind::Derivative => ArithResult::Poly(a.derivative()),
    })
}

/// The unique polynomial of degree below `nodes.len()` through the given
/// `(w, y)` pairs, via Newton divided differences.
pub fn interpolate<S: Scalar>(nodes: &[(S, S)]) -> Result<RatPoly<S>, PolyError> {
    for (k, (w, _)) in nodes.iter().enumerate() {
        if nodes[..k].iter().any(|(v, _)| v == w) {
            return Err(PolyError::DuplicateNode(k));
        }
    }
    let n = nodes.len();
    let mut dd: Vec<S> = nodes.iter().map(|(_, y)| y.clone()).collect();
    for level in 1..n {
        for k in (level..n).rev() {
            let num = dd[k].clone() - dd[k - 1].clone();
            let den = nodes[k].0.clone() - nodes[k - level].0.clone();
            dd[k] = num / den;
        }
    }
    // Horner in the Newton basis.
    let mut acc = RatPoly::zero();
    for k in (0..n).rev() {
        let factor = RatPoly::new(vec![-nodes[k].0.clone(), S::one()]);
        acc = &(&acc * &factor) + &RatPoly::constant(dd[k].clone());
    }
    Ok(acc)
}

/// Sylvester matrix of `(q, r)`: `deg r` shifted rows of `q` followed by
/// `deg q` shifted rows of `r`, coefficients in descending order.
pub fn sylvester_matrix<S: Scalar>(q: &RatPoly<S>, r: &RatPoly<S>) -> Vec<Vec<S>> {
    let m = q.degree().unwrap_or(0);
    let n = r.degree().unwrap_or(0);
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    let desc = |p: &RatPoly<S>| -> Vec<S> { p.coeffs().iter().rev().cloned().collect() };
    let (qd, rd) = (desc(q), desc(r));
    for k in 0..n {
        let mut row = vec![S::zero(); size];
        for (j, c) in qd.iter().enumerate() {
            row[k + j] = c.clone();
        }
        rows.push(row);
    }
    for k in 0..m {
        let mut row = vec![S::zero(); size];
        for (j, c) in rd.iter().enumerate() {
            row[k + j] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Determinant of the Sylvester matrix. For monic `q` this equals
/// `∏ r(w)` over the roots `w` of `q`.
pub fn resultant<S: Scalar>(q: &RatPoly<S>, r: &RatPoly<S>) -> S {
    if r.is_zero() {
        return if q.is_constant() { S::one() } else { S::zero() };
    }
    if q.is_zero() {
        return if r.is_constant() { S::one() } else { S::zero() };
    }
    determinant(sylvester_matrix(q, r))
}

/// Solves `r·d − q·f = 1` with `deg d ≤ deg q − 1` and `deg f ≤ deg q − 2`.
pub fn bezout_pair<S: Scalar>(
    r: &RatPoly<S>,
    q: &RatPoly<S>,
) -> Result<(RatPoly<S>, RatPoly<S>), PolyError> {
    let a = match q.degree() {
        Some(a) if a >= 1 => a,
        _ => {
            return Err(PolyError::DegreeViolation(
                "second argument must have degree at least 1".into(),
            ))
        }
    };
    if r.degree_or_neg() >= a as isize {
        return Err(PolyError::DegreeViolation(format!(
            "deg R = {} must be below deg Q = {a}",
            r.degree_or_neg()
        )));
    }
    let (g, s, _) = r.ext_gcd(q);
    match g.degree() {
        Some(0) => {}
        Some(k) => return Err(PolyError::NonCoprime { gcd_degree: k }),
        None => unreachable!("q is nonzero"),
    }
    // g is monic of degree 0, so s·r ≡ 1 (mod q).
    let (_, d) = s.div_rem(q)?;
    let (f, rem) = (&(r * &d) - &RatPoly::one()).div_rem(q)?;
    debug_assert!(rem.is_zero());
    Ok((d, f))
}

/// Coefficients `c_0..c_N` of a proper fraction expanded at infinity as
/// `Σ c_k z^{−k−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentTail<S> {
    pub coeffs: Vec<S>,
}

impl<S: Scalar> LaurentTail<S> {
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}

/// Expansion of `num/den` at `z = ∞` up to and including `c_order`.
pub fn series_at_infinity<S: Scalar>(
    num: &RatPoly<S>,
    den: &RatPoly<S>,
    order: usize,
) -> Result<LaurentTail<S>, PolyError> {
    let n = den.degree().ok_or(PolyError::DivisionByZero)?;
    if num.degree_or_neg() >= n as isize {
        return Err(PolyError::ImproperFraction {
            num: num.degree_or_neg(),
            den: n as isize,
        });
    }
    // In u = 1/z: num/den = u · N(u)/D(u), with D(u) = Σ den_{n−j} u^j and
    // N(u) = Σ num_{n−1−j} u^j.
    let lead_inv = den.coeff(n).inv();
    let d_rev = |j: usize| if j <= n { den.coeff(n - j) } else { S::zero() };
    let n_rev = |j: usize| {
        if j < n {
            num.coeff(n - 1 - j)
        } else {
            S::zero()
        }
    };
    let mut c: Vec<S> = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let mut acc = n_rev(k);
        for j in 1..=k.min(n) {
            acc = acc - d_rev(j) * c[k - j].clone();
        }
        c.push(acc * lead_inv.clone());
    }
    Ok(LaurentTail { coeffs: c })
}

/// Determinant of the `size × size` Hankel matrix `H[p][q] = c_{p+q}`.
pub fn hankel_det<S: Scalar>(c: &LaurentTail<S>, size: usize) -> Result<S, PolyError> {
    let needed = (2 * size).saturating_sub(1);
    if c.coeffs.len() < needed {
        return Err(PolyError::InsufficientCoefficients {
            size,
            needed,
            got: c.coeffs.len(),
        });
    }
    let m = (0..size)
        .map(|p| (0..size).map(|q| c.coeffs[p + q].clone()).collect())
        .collect();
    Ok(determinant(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::scalar::{int, rat, Rational};

    fn p(c: &[i64]) -> RatPoly<Rational> {
        RatPoly::new(c.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn derivative_of_running_example() {
        assert_eq!(p(&[0, -1, 1]).derivative(), p(&[-1, 2]));
    }

    #[test]
    fn divmod_and_gcd() {
        let (q, r) = p(&[0, -1, 1]).div_rem(&p(&[1, 1])).unwrap();
        assert_eq!(q, p(&[-2, 1]));
        assert_eq!(r, p(&[2]));
        // b·q + r = a
        assert_eq!(&(&p(&[1, 1]) * &q) + &r, p(&[0, -1, 1]));
        assert_eq!(p(&[0, -1, 1]).gcd(&p(&[1, 1])), p(&[1]));
        assert_eq!(p(&[0, -1, 1]).gcd(&p(&[-1, 1])), p(&[-1, 1]));
        assert_eq!(
            p(&[1]).div_rem(&RatPoly::zero()).unwrap_err(),
            PolyError::DivisionByZero
        );
        match arith(&p(&[0, -1, 1]), &p(&[1, 1]), ArithKind::DivMod).unwrap() {
            ArithResult::Pair(q2, r2) => assert_eq!((q2, r2), (q, r)),
            _ => panic!("expected a pair"),
        }
    }

    #[test]
    fn interpolation_examples() {
        let two = interpolate(&[(int(0), int(1)), (int(1), int(2))]).unwrap();
        assert_eq!(two, p(&[1, 1]));
        let one = interpolate(&[(rat(3, 7), rat(-2, 5))]).unwrap();
        assert_eq!(one, RatPoly::constant(rat(-2, 5)));
        assert_eq!(
            interpolate(&[(int(0), int(1)), (int(0), int(2))]).unwrap_err(),
            PolyError::DuplicateNode(1)
        );
        assert!(interpolate::<Rational>(&[]).unwrap().is_zero());
    }

    #[test]
    fn resultant_examples() {
        // R(0)·R(1) for R = z + 1 over the roots of z² − z.
        assert_eq!(resultant(&p(&[0, -1, 1]), &p(&[1, 1])), int(2));
        assert_eq!(resultant(&p(&[5, 0, 3, 1]), &p(&[1])), int(1));
        let w = rat(-4, 3);
        let r = p(&[2, -1, 0, 5]);
        let q = RatPoly::new(vec![-w.clone(), int(1)]);
        assert_eq!(resultant(&q, &r), r.eval(&w));
        assert_eq!(resultant(&p(&[0, 1]), &RatPoly::zero()), int(0));
    }

    #[test]
    fn bezout_examples() {
        let (d, f) = bezout_pair(&p(&[1, 1]), &p(&[0, -1, 1])).unwrap();
        assert_eq!(d, RatPoly::new(vec![int(1), rat(-1, 2)]));
        assert_eq!(f, RatPoly::constant(rat(-1, 2)));
        let y = rat(3, 4);
        let (d, f) = bezout_pair(&RatPoly::constant(y.clone()), &p(&[-5, 1])).unwrap();
        assert_eq!(d, RatPoly::constant(y.inv()));
        assert!(f.is_zero());
        assert_eq!(
            bezout_pair(&p(&[0, 1]), &p(&[0, 0, 1])).unwrap_err(),
            PolyError::NonCoprime { gcd_degree: 1 }
        );
        assert!(matches!(
            bezout_pair(&p(&[0, 0, 1]), &p(&[0, 1])),
            Err(PolyError::DegreeViolation(_))
        ));
    }

    #[test]
    fn series_examples() {
        let t = series_at_infinity(&p(&[1, 1]), &p(&[0, -1, 1]), 2).unwrap();
        assert_eq!(t.coeffs, vec![int(1), int(2), int(2)]);
        let w = rat(2, 3);
        let t = series_at_infinity(&p(&[1]), &RatPoly::new(vec![-w.clone(), int(1)]), 3).unwrap();
        assert_eq!(
            t.coeffs,
            vec![int(1), w.clone(), w.clone() * w.clone(), w.powi(3)]
        );
        assert_eq!(
            series_at_infinity(&p(&[0, 0, 1]), &p(&[1, 1]), 2).unwrap_err(),
            PolyError::ImproperFraction { num: 2, den: 1 }
        );
    }

    #[test]
    fn hankel_examples() {
        let t = LaurentTail { coeffs: vec![int(1), int(2), int(2)] };
        assert_eq!(hankel_det(&t, 2).unwrap(), int(-2));
        let t = LaurentTail { coeffs: vec![rat(-1, 2), rat(1, 2), rat(1, 2)] };
        assert_eq!(hankel_det(&t, 2).unwrap(), rat(-1, 2));
        assert_eq!(hankel_det(&t, 1).unwrap(), rat(-1, 2));
        assert!(matches!(
            hankel_det(&t, 3),
            Err(PolyError::InsufficientCoefficients { needed: 5, got: 3, .. })
        ));
    }

    #[test]
    fn gaussian_rational_domain() {
        use crate::scalar::{qc, QComplex};
        let i = qc(int(0), int(1));
        // (z − i)(z + i) = z² + 1
        let q = RatPoly::<QComplex>::from_roots(&[i.clone(), -i.clone()]);
        assert_eq!(q, RatPoly::new(vec![qc(int(1), int(0)), QComplex::zero(), qc(int(1), int(0))]));
        let r = RatPoly::new(vec![qc(int(2), int(0)), qc(int(1), int(0))]);
        // (2 + i)(2 − i) = 5
        assert_eq!(resultant(&q, &r), qc(int(5), int(0)));
    }
}
