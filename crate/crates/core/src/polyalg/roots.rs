use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};

use super::{PolyError, RatPoly};
use crate::scalar::{Rational, Scalar};

/// Simultaneous (Aberth) root iteration.
#[derive(Debug, Clone, Copy)]
pub struct RootFinder {
    /// Relative residual tolerance.
    pub eps: f64,
    pub max_iter: usize,
}

impl Default for RootFinder {
    fn default() -> Self {
        RootFinder {
            eps: 1e-12,
            max_iter: 500,
        }
    }
}

fn horner_with_derivative(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

impl RootFinder {
    /// All `deg q` roots as a multiset sorted by `(re, im)`.
    pub fn roots<S: Scalar>(&self, q: &RatPoly<S>) -> Result<Vec<Complex64>, PolyError> {
        let n = q.degree().ok_or(PolyError::ZeroPolynomial)?;
        if n == 0 {
            return Ok(Vec::new());
        }
        let raw: Vec<Complex64> = q.coeffs().iter().map(|c| c.to_complex()).collect();
        let lead = raw[n];
        let c: Vec<Complex64> = raw.iter().map(|a| a / lead).collect();
        let scale = c.iter().map(|a| a.norm()).fold(0.0, f64::max);
        let radius = 1.0 + c[..n].iter().map(|a| a.norm()).fold(0.0, f64::max);

        let mut z: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(radius, TAU * k as f64 / n as f64 + 0.4))
            .collect();

        let residual_ok = |z: &[Complex64]| -> (bool, f64) {
            let mut worst: f64 = 0.0;
            let mut ok = true;
            for r in z {
                let (p, _) = horner_with_derivative(&c, *r);
                let bound = self.eps * scale * r.norm().max(1.0).powi(n as i32);
                worst = worst.max(p.norm() / (scale * r.norm().max(1.0).powi(n as i32)));
                ok &= p.norm() <= bound;
            }
            (ok, worst)
        };

        let mut stalled = 0usize;
        for _ in 0..self.max_iter {
            let mut max_step: f64 = 0.0;
            for k in 0..n {
                let (p, dp) = horner_with_derivative(&c, z[k]);
                if p.is_zero() {
                    continue;
                }
                let ratio = p / dp;
                let repulsion: Complex64 = (0..n)
                    .filter(|&j| j != k)
                    .map(|j| {
                        let d = z[k] - z[j];
                        if d.is_zero() {
                            Complex64::zero()
                        } else {
                            d.inv()
                        }
                    })
                    .sum();
                let denom = Complex64::one() - ratio * repulsion;
                let step = if denom.is_zero() || !denom.is_finite() {
                    ratio
                } else {
                    ratio / denom
                };
                if step.is_finite() {
                    z[k] -= step;
                    max_step = max_step.max(step.norm() / z[k].norm().max(1.0));
                }
            }
            if max_step < 1e-15 {
                stalled += 1;
                if stalled >= 2 {
                    break;
                }
            } else {
                stalled = 0;
            }
        }

        let (ok, worst) = residual_ok(&z);
        if !ok {
            return Err(PolyError::NonConvergence {
                iterations: self.max_iter,
                residual: worst,
            });
        }
        z.sort_by(|a, b| a.canonical_cmp(b));
        Ok(z)
    }
}

/// [`RootFinder::roots`] with default settings.
pub fn roots_numeric<S: Scalar>(q: &RatPoly<S>) -> Result<Vec<Complex64>, PolyError> {
    RootFinder::default().roots(q)
}

/// Continued-fraction convergents of `x` with denominators up to `max_den`.
fn convergents(x: f64, max_den: i64) -> Vec<Rational> {
    let mut out = Vec::new();
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut t = x;
    for _ in 0..64 {
        if !t.is_finite() || t.abs() > 1e18 {
            break;
        }
        let a = t.floor();
        let ai = BigInt::from(a as i64);
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        if k2 > BigInt::from(max_den) {
            break;
        }
        out.push(Rational::new(h2.clone(), k2.clone()));
        (h0, h1) = (h1, h2);
        (k0, k1) = (k1, k2);
        let frac = t - a;
        if frac.abs() < 1e-300 {
            break;
        }
        t = 1.0 / frac;
    }
    out
}

/// Rational roots of a polynomial that splits into linear factors over Q,
/// sorted ascending. Fails with [`PolyError::NotSplit`] otherwise.
pub fn rational_roots(q: &RatPoly<Rational>) -> Result<Vec<Rational>, PolyError> {
    if q.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let mut rest = q.make_monic();
    let mut found = Vec::new();
    while rest.degree().unwrap_or(0) > 0 {
        let approx = roots_numeric(&rest).map_err(|_| PolyError::NotSplit)?;
        let mut progressed = false;
        for r in approx {
            if r.im.abs() > 1e-6 * r.norm().max(1.0) {
                continue;
            }
            let hit = convergents(r.re, 1_000_000_000_000)
                .into_iter()
                .rev()
                .find(|c| rest.eval(c).is_zero());
            if let Some(root) = hit {
                let lin = RatPoly::new(vec![-root.clone(), Rational::one()]);
                let (quot, rem) = rest.div_rem(&lin)?;
                debug_assert!(rem.is_zero());
                rest = quot;
                found.push(root);
                progressed = true;
                break;
            }
        }
        if !progressed {
            return Err(PolyError::NotSplit);
        }
    }
    found.sort();
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn p(c: &[i64]) -> RatPoly<Rational> {
        RatPoly::new(c.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn simple_roots() {
        let r = roots_numeric(&p(&[0, -1, 1])).unwrap();
        assert!((r[0] - Complex64::new(0.0, 0.0)).norm() < 1e-12);
        assert!((r[1] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let r = roots_numeric(&p(&[1, 0, 1])).unwrap();
        assert!((r[0] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((r[1] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn double_root_cluster() {
        let r = roots_numeric(&p(&[1, -2, 1])).unwrap();
        for z in r {
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-6);
        }
    }

    #[test]
    fn exact_roots() {
        let roots = vec![rat(-3, 2), int(0), rat(5, 7), int(4)];
        let q = RatPoly::from_roots(&roots);
        assert_eq!(rational_roots(&q).unwrap(), roots);
        assert_eq!(rational_roots(&p(&[1, 0, 1])).unwrap_err(), PolyError::NotSplit);
        assert_eq!(rational_roots(&p(&[-2, 0, 1])).unwrap_err(), PolyError::NotSplit);
    }
}
