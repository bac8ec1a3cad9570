//! Seeded random instances for property checks.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::rootdata::{Coweight, RootSystem};
use crate::scalar::{rat, Rational};
use crate::superpotential::{SuperParams, Variant};
use crate::zastava::{Coord, ZastavaPoint};

/// Bounds for random rationals `p/q` with `|p| ≤ num`, `1 ≤ q ≤ den`.
#[derive(Debug, Clone, Copy)]
pub struct RationalBounds {
    pub num: i64,
    pub den: i64,
}

impl Default for RationalBounds {
    fn default() -> Self {
        RationalBounds { num: 20, den: 6 }
    }
}

pub fn rational<R: Rng>(rng: &mut R, b: RationalBounds) -> Rational {
    rat(rng.gen_range(-b.num..=b.num), rng.gen_range(1..=b.den))
}

pub fn nonzero_rational<R: Rng>(rng: &mut R, b: RationalBounds) -> Rational {
    loop {
        let q = rational(rng, b);
        if q != rat(0, 1) {
            return q;
        }
    }
}

/// `count` rationals distinct from each other and from `avoid`.
pub fn distinct_rationals<R: Rng>(
    rng: &mut R,
    count: usize,
    avoid: &[Rational],
    b: RationalBounds,
) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::with_capacity(count);
    while out.len() < count {
        let q = rational(rng, b);
        if !out.contains(&q) && !avoid.contains(&q) {
            out.push(q);
        }
    }
    out
}

/// A regular point: all `w` distinct across nodes and all `y` nonzero.
pub fn regular_point<R: Rng>(
    rng: &mut R,
    rs: &RootSystem,
    alpha: &[usize],
    avoid: &[Rational],
    b: RationalBounds,
) -> ZastavaPoint<Rational> {
    let total: usize = alpha.iter().sum();
    let mut ws = distinct_rationals(rng, total, avoid, b).into_iter();
    let nodes = alpha
        .iter()
        .map(|&a| {
            (0..a)
                .map(|_| Coord::new(ws.next().expect("enough points"), nonzero_rational(rng, b)))
                .collect()
        })
        .collect();
    ZastavaPoint::new(rs.clone(), nodes).expect("distinct w")
}

/// Two regular points with disjoint supports.
pub fn disjoint_pair<R: Rng>(
    rng: &mut R,
    rs: &RootSystem,
    alpha: &[usize],
    beta: &[usize],
    b: RationalBounds,
) -> (ZastavaPoint<Rational>, ZastavaPoint<Rational>) {
    let p = regular_point(rng, rs, alpha, &[], b);
    let used: Vec<Rational> = p.nodes().iter().flatten().map(|c| c.w.clone()).collect();
    let q = regular_point(rng, rs, beta, &used, b);
    (p, q)
}

/// A nonzero degree vector with `1 ≤ Σ a_i ≤ max_total`.
pub fn alpha<R: Rng>(rng: &mut R, rank: usize, max_total: usize) -> Vec<usize> {
    let total = rng.gen_range(1..=max_total);
    let mut a = vec![0; rank];
    for _ in 0..total {
        a[rng.gen_range(0..rank)] += 1;
    }
    a
}

/// Splits `a` into two degree vectors, each nonzero when `Σ a ≥ 2`.
pub fn split_alpha<R: Rng>(rng: &mut R, a: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut slots: Vec<usize> = a.iter().enumerate().flat_map(|(i, &n)| vec![i; n]).collect();
    slots.shuffle(rng);
    let cut = if slots.len() >= 2 { rng.gen_range(1..slots.len()) } else { slots.len() };
    let mut left = vec![0; a.len()];
    let mut right = vec![0; a.len()];
    for (k, &i) in slots.iter().enumerate() {
        if k < cut {
            left[i] += 1;
        } else {
            right[i] += 1;
        }
    }
    (left, right)
}

/// Complex points in the box `[−3, 3]²` at mutual distance at least `sep`.
pub fn separated_complex<R: Rng>(rng: &mut R, count: usize, avoid: &[Complex64], sep: f64) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::with_capacity(count);
    while out.len() < count {
        let c = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        if out.iter().chain(avoid).all(|o| (o - c).norm() >= sep) {
            out.push(c);
        }
    }
    out
}

pub fn complex_unit_box<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Random dominant coweights with pairings in `0..=2`.
pub fn dominant_coweights<R: Rng>(rng: &mut R, rank: usize, count: usize) -> Vec<Coweight> {
    (0..count)
        .map(|_| Coweight::new((0..rank).map(|_| rng.gen_range(0..=2)).collect()))
        .collect()
}

/// A numeric superpotential instance and a well-separated configuration.
pub fn super_instance<R: Rng>(
    rng: &mut R,
    rs: &RootSystem,
    alpha: &[usize],
    n_marked: usize,
    variant: Variant,
) -> (SuperParams<Complex64>, Vec<Vec<Complex64>>) {
    let rank = rs.rank();
    let lambdas = dominant_coweights(rng, rank, n_marked);
    let z = separated_complex(rng, n_marked, &[], 0.5);
    let total: usize = alpha.iter().sum();
    let mut ws = separated_complex(rng, total, &z, 0.5).into_iter();
    let w = alpha.iter().map(|&a| ws.by_ref().take(a).collect()).collect();
    let h_alpha = (0..rank).map(|_| complex_unit_box(rng)).collect();
    let kappa = complex_unit_box(rng);
    let params = SuperParams::new(rs.clone(), alpha.to_vec(), lambdas, z, h_alpha, None, kappa, variant)
        .expect("consistent shapes");
    (params, w)
}

/// An exact instance for rational-function identities.
pub fn rational_super_instance<R: Rng>(
    rng: &mut R,
    rs: &RootSystem,
    alpha: &[usize],
    n_marked: usize,
    b: RationalBounds,
) -> (SuperParams<Rational>, Vec<Vec<Rational>>) {
    let rank = rs.rank();
    let lambdas = dominant_coweights(rng, rank, n_marked);
    let z = distinct_rationals(rng, n_marked, &[], b);
    let total: usize = alpha.iter().sum();
    let mut ws = distinct_rationals(rng, total, &z, b).into_iter();
    let w = alpha.iter().map(|&a| ws.by_ref().take(a).collect()).collect();
    let h_alpha = (0..rank).map(|_| rational(rng, b)).collect();
    let h_lambda = Some((0..n_marked).map(|_| rational(rng, b)).collect());
    let kappa = rational(rng, b);
    let params = SuperParams::new(
        rs.clone(),
        alpha.to_vec(),
        lambdas,
        z,
        h_alpha,
        h_lambda,
        kappa,
        Variant::default(),
    )
    .expect("consistent shapes");
    (params, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn regular_points_are_regular() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rs = RootSystem::named("G2").unwrap();
        for _ in 0..50 {
            let a = alpha(&mut rng, 2, 6);
            let p = regular_point(&mut rng, &rs, &a, &[], RationalBounds::default());
            assert!(p.is_regular());
            assert_eq!(p.alpha(), a);
        }
    }

    #[test]
    fn split_alpha_partitions() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = alpha(&mut rng, 3, 6);
            let (l, r) = split_alpha(&mut rng, &a);
            let sum: Vec<usize> = l.iter().zip(&r).map(|(x, y)| x + y).collect();
            assert_eq!(sum, a);
            if a.iter().sum::<usize>() >= 2 {
                assert!(l.iter().sum::<usize>() > 0 && r.iter().sum::<usize>() > 0);
            }
        }
    }

    #[test]
    fn disjoint_pairs_glue() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rs = RootSystem::named("B2").unwrap();
        let (p, q) = disjoint_pair(&mut rng, &rs, &[2, 1], &[1, 2], RationalBounds::default());
        assert!(p.glue(&q).is_ok());
    }
}
