use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use zastava::poisson::{bracket, ChartExpr, Session};
use zastava::polyalg::{interpolate, resultant, RatPoly};
use zastava::rootdata::RootSystem;
use zastava::sample::{self, RationalBounds};
use zastava::scalar::{int, rat, Rational};
use zastava::superpotential::Variant;
use zastava::whittaker::{ext_class, kronecker_check, ExtRoute};
use zastava::zastava::ZastavaPoint;

const B: RationalBounds = RationalBounds { num: 20, den: 6 };
const NAMES: [&str; 4] = ["A1", "A2", "B2", "G2"];

fn rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(p, q)| rat(p, q))
}

fn poly(max_len: usize) -> impl Strategy<Value = RatPoly<Rational>> {
    prop::collection::vec(rational(), 0..=max_len).prop_map(RatPoly::new)
}

fn nonzero_poly(max_len: usize) -> impl Strategy<Value = RatPoly<Rational>> {
    poly(max_len).prop_filter("nonzero", |p| !p.is_zero())
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn point(seed: u64, name: &str, max_total: usize) -> ZastavaPoint<Rational> {
    let mut r = rng(seed);
    let rs = RootSystem::named(name).unwrap();
    let a = sample::alpha(&mut r, rs.rank(), max_total);
    sample::regular_point(&mut r, &rs, &a, &[], B)
}

fn a1_point(seed: u64, a: usize) -> ZastavaPoint<Rational> {
    let mut r = rng(seed);
    sample::regular_point(&mut r, &RootSystem::named("A1").unwrap(), &[a], &[], B)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn poly_ring_laws(p in poly(5), q in poly(5), r in poly(5)) {
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert!((&p - &p).is_zero());
    }

    #[test]
    fn poly_eval_is_homomorphism(p in poly(5), q in poly(5), x in rational()) {
        prop_assert_eq!((&p * &q).eval(&x), p.eval(&x) * q.eval(&x));
        prop_assert_eq!((&p + &q).eval(&x), p.eval(&x) + q.eval(&x));
    }

    #[test]
    fn div_rem_reconstructs(p in poly(7), d in nonzero_poly(4)) {
        let (q, r) = p.div_rem(&d).unwrap();
        prop_assert_eq!(&(&q * &d) + &r, p);
        prop_assert!(r.degree_or_neg() < d.degree_or_neg());
    }

    #[test]
    fn ext_gcd_bezout(p in nonzero_poly(5), q in nonzero_poly(5)) {
        let (g, s, t) = p.ext_gcd(&q);
        prop_assert_eq!(&(&s * &p) + &(&t * &q), g.clone());
        prop_assert!(g.is_monic());
        prop_assert!(p.div_rem(&g).unwrap().1.is_zero());
        prop_assert!(q.div_rem(&g).unwrap().1.is_zero());
    }

    #[test]
    fn interpolation_hits_nodes(seed in any::<u64>(), n in 1usize..7) {
        let mut r = rng(seed);
        let xs = sample::distinct_rationals(&mut r, n, &[], B);
        let nodes: Vec<(Rational, Rational)> =
            xs.into_iter().map(|x| (x, sample::rational(&mut r, B))).collect();
        let p = interpolate(&nodes).unwrap();
        prop_assert!(p.degree_or_neg() < n as isize);
        for (x, y) in &nodes {
            prop_assert_eq!(&p.eval(x), y);
        }
    }

    #[test]
    fn resultant_is_product_over_roots(seed in any::<u64>(), n in 1usize..6, r in poly(4)) {
        let mut g = rng(seed);
        let roots = sample::distinct_rationals(&mut g, n, &[], B);
        let q = RatPoly::from_roots(&roots);
        let prod = roots.iter().fold(int(1), |acc, w| acc * r.eval(w));
        let r = r.div_rem(&q).unwrap().1;
        let prod_reduced = roots.iter().fold(int(1), |acc, w| acc * r.eval(w));
        prop_assert_eq!(&prod, &prod_reduced);
        prop_assert_eq!(resultant(&q, &r), prod);
    }

    #[test]
    fn symmetrized_form_is_symmetric(k in 0usize..4) {
        let rs = RootSystem::named(NAMES[k]).unwrap();
        for i in 0..rs.rank() {
            prop_assert_eq!(rs.a(i, i), 2);
            for j in 0..rs.rank() {
                prop_assert_eq!(rs.dot(i, j), rs.dot(j, i));
                prop_assert_eq!(rs.dot(i, j), rs.d_i(i) * rs.a(i, j));
                prop_assert_eq!(rs.dual_dot(i, j), rs.dual_dot(j, i));
            }
        }
        prop_assert_eq!(rs.symmetrizers().iter().min().copied(), Some(1));
    }

    #[test]
    fn a1_map_roundtrip(seed in any::<u64>(), a in 1usize..8) {
        let p = a1_point(seed, a);
        let m = p.to_map().unwrap();
        prop_assert!(m.q.is_monic());
        prop_assert!(m.r.degree_or_neg() < a as isize);
        prop_assert!(m.is_coprime());
        prop_assert_eq!(ZastavaPoint::from_map(&m).unwrap(), p);
    }

    #[test]
    fn glue_commutes_and_adds_degrees(seed in any::<u64>(), k in 0usize..4) {
        let mut r = rng(seed);
        let rs = RootSystem::named(NAMES[k]).unwrap();
        let a = sample::alpha(&mut r, rs.rank(), 3);
        let b = sample::alpha(&mut r, rs.rank(), 3);
        let (p, q) = sample::disjoint_pair(&mut r, &rs, &a, &b, B);
        let pq = p.glue(&q).unwrap();
        prop_assert_eq!(&pq, &q.glue(&p).unwrap());
        let sum: Vec<usize> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        prop_assert_eq!(pq.alpha(), sum);
        prop_assert_eq!(p.glue(&ZastavaPoint::empty(rs.clone())).unwrap(), p);
    }

    #[test]
    fn glue_on_a1_adds_maps(seed in any::<u64>(), a in 1usize..4, b in 1usize..4) {
        let mut r = rng(seed);
        let rs = RootSystem::named("A1").unwrap();
        let (p, q) = sample::disjoint_pair(&mut r, &rs, &[a], &[b], B);
        let glued = p.glue(&q).unwrap().to_map().unwrap();
        prop_assert_eq!(glued, p.to_map().unwrap().add(&q.to_map().unwrap()));
    }

    #[test]
    fn involution_is_involutive(seed in any::<u64>(), k in 0usize..4) {
        let p = point(seed, NAMES[k], 4);
        let i = p.involution().unwrap();
        prop_assert_eq!(i.alpha(), p.alpha());
        prop_assert_eq!(i.involution().unwrap(), p);
    }

    #[test]
    fn boundary_is_squared_resultant(seed in any::<u64>(), a in 1usize..7) {
        let p = a1_point(seed, a);
        let m = p.to_map().unwrap();
        let res = resultant(&m.q, &m.r);
        prop_assert_eq!(p.boundary_sq().unwrap(), res.clone() * res);
    }

    #[test]
    fn ext_routes_agree(seed in any::<u64>(), a in 1usize..6) {
        let p = a1_point(seed, a);
        let closed = ext_class(&p, ExtRoute::ClosedForm).unwrap();
        prop_assert_eq!(closed.c.len(), 2 * a - 1);
        prop_assert_eq!(closed, ext_class(&p, ExtRoute::BezoutOracle).unwrap());
    }

    #[test]
    fn kronecker_sign(seed in any::<u64>(), a in 1usize..6) {
        let rep = kronecker_check(&a1_point(seed, a)).unwrap();
        prop_assert!(rep.identities_hold());
        let expected = if (a * (a - 1) / 2) % 2 == 0 { int(1) } else { int(-1) };
        prop_assert_eq!(rep.sigma, expected);
    }

    #[test]
    fn bracket_is_antisymmetric(i in 0usize..4, j in 0usize..4) {
        let s = Session::new(RootSystem::named("A1").unwrap(), vec![2]).unwrap();
        let (f, g) = (ChartExpr::var(&s, i), ChartExpr::var(&s, j));
        let fg = bracket(&f, &g).unwrap();
        prop_assert!(fg.add(&bracket(&g, &f).unwrap()).is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn exponent_table_matches_phi_gradient(seed in any::<u64>(), k in 0usize..4, n in 0usize..3) {
        let mut r = rng(seed);
        let rs = RootSystem::named(NAMES[k]).unwrap();
        let a = sample::alpha(&mut r, rs.rank(), 3);
        let (params, w) = sample::rational_super_instance(&mut r, &rs, &a, n, B);
        let table = params.exponent_table();
        let lhs = params.exponent_log_derivative(&table, &w).unwrap();
        let rhs = params.phi_gradient(&w).unwrap().scale(&params.kappa);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn critical_section_is_stationary(seed in any::<u64>(), k in 0usize..4, v in 0usize..4) {
        let mut r = rng(seed);
        let rs = RootSystem::named(NAMES[k]).unwrap();
        let a = sample::alpha(&mut r, rs.rank(), 3);
        let (params, w) = sample::super_instance(&mut r, &rs, &a, 2, Variant::ALL[v]);
        let crit = params.critical_section(&w).unwrap();
        prop_assert!(crit.stationarity < 1e-9, "stationarity {}", crit.stationarity);
    }

    #[test]
    fn restriction_is_phi_for_matching_signs(seed in any::<u64>(), k in 0usize..4, v in 0usize..4) {
        let variant = Variant::ALL[v];
        prop_assume!(variant.restricts_to_phi());
        let mut r = rng(seed);
        let rs = RootSystem::named(NAMES[k]).unwrap();
        let a = sample::alpha(&mut r, rs.rank(), 3);
        let (params, w) = sample::super_instance(&mut r, &rs, &a, 2, variant);
        let g = params.restricted_gradient(&w).unwrap();
        prop_assert!(g.wz_mismatch < 1e-8, "w/z mismatch {}", g.wz_mismatch);
        prop_assert!(g.h_mismatch < 1e-8, "h mismatch {}", g.h_mismatch);
    }
}
