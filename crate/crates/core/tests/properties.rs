//! Randomized invariants of the exact backend.

use num_traits::{One, Zero};
use proptest::prelude::*;
use yb_core::adlerchain::{
    adler_lax, chain_vector_field, dressing_chain_residuals, f_bracket, gauge_action,
    hamiltonian_gradient, AdlerMap, ChainState, LeafCoords,
};
use yb_core::matkit::{char_poly, poly_eval, Matrix};
use yb_core::solitonmap::{ProjectorState, Rank1Map, Rank1State, RankKMap, SubspaceState};
use yb_core::ybcore::{transfer_map, transfer_product, SiteTuple, TwoSiteMap};
use yb_core::{Rational, Scalar};

type Q = Rational;

fn rational() -> impl Strategy<Value = Q> {
    (-9i64..=9, 1i64..=9).prop_map(|(n, d)| Q::from_ratio(n, d))
}

fn nonzero_rational() -> impl Strategy<Value = Q> {
    rational().prop_filter("nonzero", |q| !q.is_zero())
}

fn matrix(n: usize) -> impl Strategy<Value = Matrix<Q>> {
    prop::collection::vec(rational(), n * n).prop_map(move |v| Matrix::from_vec(n, n, v).unwrap())
}

fn vector(n: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(rational(), n)
}

/// Odd period with values and pairwise-distinct parameters.
fn chain_state() -> impl Strategy<Value = ChainState<Q>> {
    prop_oneof![Just(3usize), Just(5usize)].prop_flat_map(|n| {
        (vector(n), prop::collection::vec(rational(), n))
            .prop_map(|(f, l)| ChainState::new(f, l).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adler_map_preserves_sum(x in rational(), y in rational(), l in rational(), m in rational()) {
        prop_assume!(!(x.clone() + y.clone()).is_zero());
        let (u, v) = AdlerMap.interact(&x, &l, &y, &m).unwrap();
        prop_assert_eq!(u + v, x + y);
    }

    #[test]
    fn adler_map_is_reversible(x in rational(), y in rational(), l in rational(), m in rational()) {
        prop_assume!(!(x.clone() + y.clone()).is_zero());
        let (u, v) = AdlerMap.apply(&x, &l, &y, &m).unwrap();
        // R_21 exchanges the roles of the two sites.
        let (y2, x2) = AdlerMap.apply(&v, &m, &u, &l).unwrap();
        prop_assert_eq!((x2, y2), (x, y));
    }

    #[test]
    fn adler_lax_determinant(x in rational(), l in rational(), z in rational()) {
        let d = adler_lax(&x, &l, &z).determinant().unwrap();
        prop_assert_eq!(d, z - l);
    }

    #[test]
    fn inverse_is_exact(a in matrix(3)) {
        prop_assume!(!a.determinant().unwrap().is_zero());
        let inv = a.inverse().unwrap();
        prop_assert_eq!(a.mul(&inv).unwrap(), Matrix::identity(3));
        prop_assert_eq!(inv.mul(&a).unwrap(), Matrix::identity(3));
    }

    #[test]
    fn determinant_is_multiplicative(a in matrix(3), b in matrix(3)) {
        let ab = a.mul(&b).unwrap().determinant().unwrap();
        prop_assert_eq!(ab, a.determinant().unwrap() * b.determinant().unwrap());
    }

    #[test]
    fn char_poly_annihilates_its_matrix(a in matrix(3)) {
        // Cayley-Hamilton, with Horner on matrices.
        let c = char_poly(&a).unwrap();
        let id = Matrix::<Q>::identity(3);
        let mut acc = Matrix::<Q>::zeros(3, 3);
        for coeff in c.iter().rev() {
            acc = acc.mul(&a).unwrap().add(&id.scale(coeff)).unwrap();
        }
        prop_assert!(acc.is_zero());
        // Constant term is det(a), leading coefficient (-1)^n.
        prop_assert_eq!(&c[0], &a.determinant().unwrap());
        prop_assert_eq!(&c[3], &-Q::one());
    }

    #[test]
    fn char_poly_vanishes_at_eigenvalue(d in vector(2), s in rational()) {
        // Upper-triangular: eigenvalues are the diagonal.
        let a = Matrix::from_vec(2, 2, vec![d[0].clone(), s, Q::zero(), d[1].clone()]).unwrap();
        let c = char_poly(&a).unwrap();
        prop_assert!(poly_eval(&c, &d[0]).is_zero());
        prop_assert!(poly_eval(&c, &d[1]).is_zero());
    }

    #[test]
    fn canonical_strings_round_trip(q in rational(), x in -1e6f64..1e6) {
        prop_assert_eq!(Q::parse_canonical(&q.to_canonical_string()), Some(q));
        prop_assert_eq!(f64::parse_canonical(&x.to_canonical_string()), Some(x));
    }

    #[test]
    fn rank1_outputs_are_projectors(
        p1 in vector(3), q1 in vector(3), p2 in vector(3), q2 in vector(3),
        l in nonzero_rational(), m in nonzero_rational(),
    ) {
        prop_assume!(l != m);
        let (Ok(s1), Ok(s2)) = (
            Rank1State::new(yb_core::matkit::Vector(p1), yb_core::matkit::Vector(q1)),
            Rank1State::new(yb_core::matkit::Vector(p2), yb_core::matkit::Vector(q2)),
        ) else {
            return Ok(());
        };
        let Ok((t1, t2)) = Rank1Map.interact(&s1, &l, &s2, &m) else { return Ok(()) };
        for s in [t1, t2] {
            let p = s.projector().unwrap();
            prop_assert_eq!(p.mul(&p).unwrap(), p.clone());
            prop_assert_eq!(p.trace().unwrap(), Q::one());
            prop_assert!(s.involution().unwrap().square_residual().unwrap().is_zero());
        }
    }

    #[test]
    fn rankk_outputs_keep_rank(seed in any::<u64>(), l in nonzero_rational(), m in nonzero_rational()) {
        prop_assume!(l != m && l != -m.clone());
        let mut rng = yb_core::sampling::trial_rng(seed, 0);
        let s1 = SubspaceState::<Q>::random(&mut rng, 4, 2);
        let s2 = SubspaceState::<Q>::random(&mut rng, 4, 2);
        let Ok((t1, t2)) = RankKMap.interact(&s1, &l, &s2, &m) else { return Ok(()) };
        for s in [t1, t2] {
            let p = s.projector().unwrap();
            prop_assert_eq!(p.mul(&p).unwrap(), p.clone());
            prop_assert_eq!(p.trace().unwrap(), Q::from_i64(2));
        }
    }

    #[test]
    fn adler_transfer_product_is_identity(s in chain_state()) {
        let t = s.to_tuple();
        let order: Vec<usize> = (1..=t.len()).collect();
        let Ok(prod) = transfer_product(&AdlerMap, &order, &t) else { return Ok(()) };
        prop_assert_eq!(prod, t);
    }

    #[test]
    fn adler_transfer_maps_commute(s in chain_state()) {
        let t = s.to_tuple();
        let n = t.len();
        for i in 1..=n {
            for j in i + 1..=n {
                let a = transfer_map(&AdlerMap, i, &t).and_then(|u| transfer_map(&AdlerMap, j, &u));
                let b = transfer_map(&AdlerMap, j, &t).and_then(|u| transfer_map(&AdlerMap, i, &u));
                if let (Ok(a), Ok(b)) = (a, b) {
                    prop_assert_eq!(a, b);
                }
            }
        }
    }

    #[test]
    fn chain_field_satisfies_pairwise_identity(s in chain_state()) {
        let fdot = chain_vector_field(&s).unwrap();
        prop_assert!(dressing_chain_residuals(&s, &fdot).iter().all(Zero::is_zero));
        // H is conserved infinitesimally.
        let dh = hamiltonian_gradient(&s).0.iter().zip(&fdot).fold(Q::zero(), |acc, (g, v)| acc + g * v);
        prop_assert!(dh.is_zero());
    }

    #[test]
    fn gauge_keeps_g_invariants(
        a in vector(5), d in vector(5), l in vector(5), t in vector(5),
    ) {
        let c = LeafCoords::new(a, d, l).unwrap();
        let g = gauge_action(&c, &t).unwrap();
        prop_assert_eq!(g.g_invariants(), c.g_invariants());
    }
}

#[test]
fn f_bracket_is_cyclic_and_has_kernel() {
    for n in [3usize, 5, 7] {
        let fb = f_bracket::<Q>(n).unwrap();
        assert!(fb.transformed_residual().unwrap().is_zero());
        let ones = yb_core::matkit::Vector(vec![Q::one(); n]);
        assert!(fb.j_f.mul_vec(&ones).unwrap().0.iter().all(Zero::is_zero));
        // Conjugation by the cyclic shift leaves J_f fixed.
        let shift = Matrix::<Q>::from_fn(n, n, |i, j| {
            if j == (i + 1) % n {
                Q::one()
            } else {
                Q::zero()
            }
        });
        let conj = shift.mul(&fb.j_f).unwrap().mul(&shift.transpose()).unwrap();
        assert_eq!(conj, fb.j_f);
    }
}

#[test]
fn rank1_and_rankk_agree_on_projectors() {
    let mut rng = yb_core::sampling::trial_rng(11, 0);
    let (l, m) = (Q::from_i64(3), Q::from_ratio(1, 2));
    for _ in 0..20 {
        let s1 = Rank1State::<Q>::random(&mut rng, 3);
        let s2 = Rank1State::<Q>::random(&mut rng, 3);
        let Ok((a1, a2)) = Rank1Map.interact(&s1, &l, &s2, &m) else { continue };
        let k1 = SubspaceState::from_rank1(&s1).unwrap();
        let k2 = SubspaceState::from_rank1(&s2).unwrap();
        let (b1, b2) = RankKMap.interact(&k1, &l, &k2, &m).unwrap();
        assert_eq!(a1.projector().unwrap(), b1.projector().unwrap());
        assert_eq!(a2.projector().unwrap(), b2.projector().unwrap());
    }
}

#[test]
fn site_tuples_reject_empty() {
    assert!(SiteTuple::<Q, Q>::from_parts(vec![], vec![]).is_err());
}
