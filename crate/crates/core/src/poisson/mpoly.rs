use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::scalar::{Rational, Scalar};

/// Sparse multivariate polynomial with rational coefficients, keyed by
/// exponent vectors of a fixed length. The largest key in lexicographic
/// order is the leading monomial.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, k: usize) -> Self {
        let mut e = vec![0; nvars];
        e[k] = 1;
        let mut p = Self::zero(nvars);
        p.terms.insert(e, Rational::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn leading(&self) -> Option<(&Vec<u32>, &Rational)> {
        self.terms.last_key_value()
    }

    fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = o.get().clone() + c;
                if v.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (e.clone(), v.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(self.nvars, Rational::one()), |acc, _| acc.mul(self))
    }

    pub fn derivative(&self, k: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[k] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[k] -= 1;
            out.add_term(e2, c.clone() * Rational::from_i64(e[k] as i64));
        }
        out
    }

    /// Splits off the leading coefficient: `self = c · monic`.
    pub fn normalize(&self) -> (Rational, MPoly) {
        match self.leading() {
            Some((_, lc)) => {
                let lc = lc.clone();
                (lc.clone(), self.scale(&lc.inv()))
            }
            None => (Rational::zero(), self.clone()),
        }
    }

    /// `Some(q)` with `self = q·d` when the division is exact.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (dm, dc) = d.leading()?;
        let mut rem = self.clone();
        let mut quot = Self::zero(self.nvars);
        while let Some((m, c)) = rem.leading() {
            if m.iter().zip(dm).any(|(a, b)| a < b) {
                return None;
            }
            let e: Vec<u32> = m.iter().zip(dm).map(|(a, b)| a - b).collect();
            let coeff = c.clone() / dc.clone();
            let mut mono = Self::zero(self.nvars);
            mono.terms.insert(e.clone(), coeff.clone());
            rem = rem.sub(&mono.mul(d));
            quot.add_term(e, coeff);
        }
        Some(quot)
    }

    pub fn eval<S: Scalar>(&self, vals: &[S]) -> S {
        self.terms.iter().fold(S::zero(), |acc, (e, c)| {
            let mono = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .fold(S::from_rational(c), |m, (v, &k)| m * vals[v].powi(k as i64));
            acc + mono
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn exact_division() {
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        let f = x.sub(&y);
        let g = f.mul(&f).mul(&x.add(&MPoly::constant(2, int(3))));
        let q = g.div_exact(&f).unwrap();
        assert_eq!(q.mul(&f), g);
        assert!(x.add(&y).div_exact(&f).is_none());
        assert_eq!(f.normalize().1, f);
        assert_eq!(y.sub(&x).normalize(), (int(-1), f.clone()));
        assert_eq!(g.derivative(1).eval(&[int(1), int(2)]), int(-2) * int(-1) * int(4));
    }
}
