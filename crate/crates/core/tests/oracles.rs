mod common;

use proptest::prelude::*;
use terwilliger_wreath::terwilliger::{check_triply_regular, t0_span, terwilliger_dimension, triple_intersection};
use terwilliger_wreath::wreath::{check_ball_structure, predict_vanishing};
use terwilliger_wreath::{cyclic_scheme, make_context, wreath_of_cyclics, wreath_product, Rational, Scheme};

use common::{moduli, shrikhande};

#[test]
fn shrikhande_is_a_commutative_scheme() {
    let s = shrikhande();
    assert!(s.verify_axioms().all_hold());
    assert!(s.is_commutative());
    assert_eq!(s.valencies().unwrap(), vec![1, 6, 9]);
    // strongly regular with (v, k, λ, μ) = (16, 6, 2, 2)
    assert_eq!(s.intersection_number(1, 1, 1).unwrap(), 2);
    assert_eq!(s.intersection_number(1, 1, 2).unwrap(), 2);
}

#[test]
fn shrikhande_terwilliger_dimensions() {
    let r = check_triply_regular(&shrikhande(), Some(&[0, 5])).unwrap();
    assert!(!r.triply_regular);
    assert!(r.witness.is_some());
    for d in &r.dimensions {
        assert_eq!((d.dim_t0, d.dim_t), (15, 20));
    }
    assert!(r.consistent());
    assert!(!r.to_check("triply-regular").passed());
}

#[test]
fn generic_wreath_matches_cyclic_fold() {
    let c2 = cyclic_scheme(2).unwrap();
    let c3 = cyclic_scheme(3).unwrap();
    let direct = wreath_product(&c2, &c3).unwrap();
    assert_eq!(direct, wreath_of_cyclics(&moduli(&[2, 3])));
    let nested = wreath_product(&direct, &cyclic_scheme(2).unwrap()).unwrap();
    assert_eq!(nested, wreath_of_cyclics(&moduli(&[2, 3, 2])));
}

#[test]
fn wreath_of_generic_factors() {
    // not a cyclic wreath, but still a commutative scheme
    let s = wreath_product(&cyclic_scheme(2).unwrap(), &cyclic_scheme(2).unwrap()).unwrap();
    let t = wreath_product(&s, &cyclic_scheme(3).unwrap()).unwrap();
    assert!(t.verify_axioms().all_hold());
    let bad = Scheme::from_fn(3, 2, |x, y| usize::from(x != y && x + y != 3)).unwrap();
    assert!(wreath_product(&bad, &s).is_err());
}

#[test]
fn ball_structure_holds() {
    for v in [&[2, 3][..], &[3, 2], &[2, 2, 2], &[2, 3, 4]] {
        let r = check_ball_structure(&moduli(v)).unwrap();
        assert!(r.passed(), "{r}");
    }
}

#[test]
fn vanishing_prediction_against_enumeration() {
    let m = moduli(&[3, 2, 2]);
    let s = wreath_of_cyclics(&m);
    for a in m.indices() {
        for b in m.indices() {
            for c in m.indices() {
                let (fa, fb, fc) = (m.flat(a), m.flat(b), m.flat(c));
                let (x, y) = (0, s.neighbourhood(0, fc)[0]);
                let count = (0..s.order()).filter(|&z| s.classify(x, z) == fa && s.classify(z, y) == fb).count();
                assert_eq!(predict_vanishing(&m, a, b, c), count == 0, "{a} {b} {c}");
            }
        }
    }
}

#[test]
fn triple_intersections_of_cyclic_scheme() {
    // in C_n every triple intersection is 0 or 1
    let s = cyclic_scheme(5).unwrap();
    for (x, y, z) in [(0, 1, 3), (2, 2, 4)] {
        let total: u64 = (0..5)
            .flat_map(|i| (0..5).flat_map(move |j| (0..5).map(move |h| (i, j, h))))
            .map(|(i, j, h)| triple_intersection(&s, x, y, z, i, j, h).unwrap())
            .inspect(|&c| assert!(c <= 1))
            .sum();
        assert_eq!(total, 5);
    }
}

#[test]
fn float_and_exact_dimensions_agree() {
    let s = wreath_of_cyclics(&moduli(&[2, 3]));
    let exact = make_context::<Rational>(&s, 4).unwrap();
    let float = make_context::<f64>(&s, 4).unwrap();
    assert_eq!(terwilliger_dimension(&exact).unwrap(), terwilliger_dimension(&float).unwrap());
    assert_eq!(t0_span(&exact).unwrap().dimension(), t0_span(&float).unwrap().dimension());
}

#[test]
fn table_round_trip() {
    let s = wreath_of_cyclics(&moduli(&[2, 2]));
    let text = s.to_table_string();
    assert_eq!(Scheme::parse(&text).unwrap(), s);
}

fn small_moduli() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(2usize..=4, 1..=3).prop_filter("order at most 24", |v| v.iter().product::<usize>() <= 24)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wreath_products_are_schemes(v in small_moduli()) {
        let m = moduli(&v);
        let s = wreath_of_cyclics(&m);
        prop_assert!(s.verify_axioms().all_hold());
        prop_assert!(s.is_commutative());
        prop_assert_eq!(s.num_classes(), m.num_classes());
        for idx in m.indices() {
            prop_assert_eq!(s.valency(m.flat(idx)).unwrap(), m.valency(idx));
        }
    }

    #[test]
    fn intersection_number_identities(v in small_moduli()) {
        let s = wreath_of_cyclics(&moduli(&v));
        let k = s.num_classes();
        let n = s.valencies().unwrap();
        prop_assert_eq!(n.iter().sum::<u64>(), s.order() as u64);
        for i in 0..k {
            for h in 0..k {
                let row: u64 = (0..k).map(|j| s.intersection_number(i, j, h).unwrap()).sum();
                prop_assert_eq!(row, n[i]);
            }
            for j in 0..k {
                let weighted: u64 = (0..k).map(|h| s.intersection_number(i, j, h).unwrap() * n[h]).sum();
                prop_assert_eq!(weighted, n[i] * n[j]);
            }
        }
    }

    #[test]
    fn relabelling_preserves_invariants((v, perm) in small_moduli().prop_flat_map(|v| {
        let n = v.iter().product::<usize>();
        (Just(v), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })) {
        let s = wreath_of_cyclics(&moduli(&v));
        let t = s.relabel(&perm).unwrap();
        prop_assert!(t.verify_axioms().all_hold());
        prop_assert_eq!(&*t.intersection_numbers().unwrap(), &*s.intersection_numbers().unwrap());
    }

    #[test]
    fn breaking_symmetry_is_detected(v in small_moduli(), pick in any::<prop::sample::Index>()) {
        let s = wreath_of_cyclics(&moduli(&v));
        let n = s.order();
        let (x, y) = {
            let at = pick.index(n * (n - 1));
            let x = at / (n - 1);
            let y = at % (n - 1);
            (x, if y >= x { y + 1 } else { y })
        };
        let mut table = s.table().to_vec();
        table[x * n + y] = 0;
        let broken = Scheme::from_table(n, s.num_classes(), table).unwrap();
        prop_assert!(!broken.verify_axioms().all_hold());
    }
}
