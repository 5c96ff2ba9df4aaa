use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use orbifrob::cocycles::{normalize_nonabelian_sn, schur_cocycle_sn, FiniteGroupTable, NonabelianCocycle, TwoCocycle};
use orbifrob::exact::{Scalar, SparseVec};
use orbifrob::frobenius::FrobeniusAlgebra;
use orbifrob::symgroup::{
    graph_defect_twice, graph_defect_twice_orbit_form, joint_orbits, minimal_factorization, Permutation,
};
use orbifrob::sympow::{product_formula, SymmetricPowerAlgebra};

fn scalar() -> impl Strategy<Value = Scalar> {
    (-20i64..=20, 1i64..=9).prop_map(|(p, q)| Scalar::frac(p, q))
}

fn unit_scalar() -> impl Strategy<Value = Scalar> {
    (1i64..=9, 1i64..=9, any::<bool>()).prop_map(|(p, q, s)| Scalar::frac(if s { p } else { -p }, q))
}

fn permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle().prop_map(|v| Permutation::from_images(v).unwrap())
}

fn schur4() -> &'static TwoCocycle {
    static CELL: OnceLock<TwoCocycle> = OnceLock::new();
    CELL.get_or_init(|| schur_cocycle_sn(4).unwrap())
}

fn sym(n: usize, p: u8) -> &'static SymmetricPowerAlgebra {
    static CELLS: [[OnceLock<SymmetricPowerAlgebra>; 2]; 5] = [const { [const { OnceLock::new() }; 2] }; 5];
    CELLS[n][p as usize].get_or_init(|| SymmetricPowerAlgebra::build(&FrobeniusAlgebra::truncated(2), n, p, None).unwrap())
}

fn element(dim: usize) -> impl Strategy<Value = SparseVec> {
    prop::collection::vec(scalar(), dim).prop_map(|v| SparseVec::from_dense(&v))
}

proptest! {
    #[test]
    fn scalars_form_a_field(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        if let Some(inv) = a.inv() {
            prop_assert!((&a * &inv).is_one());
        }
    }

    #[test]
    fn scalar_text_round_trip(a in scalar()) {
        prop_assert_eq!(a.to_string().parse::<Scalar>().unwrap(), a);
    }

    #[test]
    fn composition_is_associative(a in permutation(6), b in permutation(6), c in permutation(6)) {
        prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
        prop_assert!(a.compose(&a.inverse()).is_identity());
    }

    #[test]
    fn minimal_factorization_recovers_sigma(s in permutation(7)) {
        let ts = minimal_factorization(&s);
        prop_assert_eq!(ts.len(), s.length());
        let product = ts.iter().fold(Permutation::identity(7), |acc, t| acc.compose(t));
        prop_assert_eq!(product, s);
    }

    #[test]
    fn graph_defect_forms_agree(a in permutation(7), b in permutation(7)) {
        let joint = joint_orbits(7, &[&a, &b]).unwrap();
        for bl in joint.blocks() {
            let c = graph_defect_twice(&a, &b, bl).unwrap();
            prop_assert_eq!(c, graph_defect_twice_orbit_form(&a, &b, bl).unwrap());
            prop_assert!(c >= 0 && c % 2 == 0);
        }
    }

    #[test]
    fn truncated_algebra_is_associative(m in 1usize..5, x in element(4), y in element(4), z in element(4)) {
        let a = FrobeniusAlgebra::truncated(m);
        let trim = |v: &SparseVec| SparseVec::from_pairs(v.iter().filter(|(i, _)| *i < m).map(|(i, c)| (i, c.clone())).collect());
        let (x, y, z) = (trim(&x), trim(&y), trim(&z));
        prop_assert_eq!(a.multiply(&a.multiply(&x, &y), &z), a.multiply(&x, &a.multiply(&y, &z)));
        prop_assert_eq!(a.counit(&a.multiply(&x, &y)), a.pairing(&x, &y));
    }

}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn schur_class_survives_rescaling(lambda in prop::collection::vec(unit_scalar(), 24)) {
        let alpha = schur4();
        let mut lambda = lambda;
        lambda[alpha.group().identity()] = Scalar::one();
        let beta = alpha.rescaled(&lambda).unwrap();
        prop_assert!(beta.violation().is_none());
        let g = alpha.group();
        for x in 0..g.order() {
            for y in (0..g.order()).filter(|&y| g.commute(x, y)) {
                prop_assert_eq!(beta.epsilon(x, y), alpha.epsilon(x, y));
            }
        }
    }

    #[test]
    fn nonabelian_normalization_round_trip(p in 0u8..2, lambda in prop::collection::vec(unit_scalar(), 6)) {
        let g = Arc::new(FiniteGroupTable::symmetric(3));
        let k = g.order();
        let values = (0..k * k)
            .map(|i| Scalar::sign_pow(p as usize * g.length(i / k) * g.length(i % k)))
            .collect();
        let phi = NonabelianCocycle::new(g.clone(), values).unwrap();
        let mut lambda = lambda;
        lambda[g.identity()] = Scalar::one();
        let back = normalize_nonabelian_sn(&phi.rescaled(&lambda).unwrap()).unwrap();
        prop_assert_eq!(back.p, p);
        prop_assert_eq!(back.phi, phi);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sympow_products_respect_shifted_degrees(
        p in 0u8..2,
        x in 0usize..6,
        y in 0usize..6,
        i in 0usize..8,
        j in 0usize..8,
    ) {
        let s = sym(3, p);
        let a = s.algebra();
        let (i, j) = (i % a.dim(x), j % a.dim(y));
        let xy = s.group().mul(x, y);
        let want = a.sector(x).shifted_degree(i).unwrap() + a.sector(y).shifted_degree(j).unwrap();
        for (k, _) in a.mult_basis(x, y, i, j).iter() {
            prop_assert_eq!(a.sector(xy).shifted_degree(k).unwrap(), want.clone());
        }
    }

    #[test]
    fn restriction_inverts_section(x in 0usize..24, v in element(16)) {
        let s = sym(4, 0);
        let dim = s.algebra().dim(x);
        let v = SparseVec::from_pairs(v.iter().filter(|(i, _)| *i < dim).map(|(i, c)| (i, c.clone())).collect());
        prop_assert_eq!(s.restriction(x, &s.section(x, &v)), v);
    }

    #[test]
    fn product_formula_is_multiplicative(d1 in 1usize..4, d2 in 1usize..4) {
        let (a, b, c) = (product_formula(d1, 6), product_formula(d2, 6), product_formula(d1 + d2, 6));
        for n in 0..=6 {
            prop_assert_eq!((0..=n).map(|k| a[k] * b[n - k]).sum::<u128>(), c[n]);
        }
    }
}
