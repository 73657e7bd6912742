use fkdet_core::catalog;
use fkdet_core::{BigRational, Complex64, ExactElement, FloatElement, GroupSpec, Word, DEFAULT_TERM_BUDGET};
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use std::collections::HashMap;
use std::sync::Arc;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn small_terms(rank: i32) -> impl Strategy<Value = Vec<(Vec<i32>, i64)>> {
    let letter = (1..=rank, any::<bool>()).prop_map(|(g, inv)| if inv { -g } else { g });
    prop::collection::vec((prop::collection::vec(letter, 0..4), -3i64..=3), 1..5)
}

fn exact(spec: &Arc<GroupSpec>, terms: &[(Vec<i32>, i64)]) -> ExactElement {
    ExactElement::from_terms(
        spec.clone(),
        terms.iter().map(|(w, c)| (Word::from_signed(w).unwrap(), q(*c))),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trace_is_cyclic(a in small_terms(2), b in small_terms(2)) {
        let spec = Arc::new(GroupSpec::free(2));
        let (x, y) = (exact(&spec, &a), exact(&spec, &b));
        prop_assert_eq!(x.multiply(&y).unwrap().trace(), y.multiply(&x).unwrap().trace());
    }

    #[test]
    fn adjoint_is_antimultiplicative(a in small_terms(2), b in small_terms(2)) {
        let spec = catalog::wirtinger_group().unwrap();
        let (x, y) = (exact(&spec, &a), exact(&spec, &b));
        let lhs = x.multiply(&y).unwrap().adjoint();
        let rhs = y.adjoint().multiply(&x.adjoint()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(x.adjoint().adjoint(), x);
    }

    #[test]
    fn gram_trace_is_sum_of_squares(a in small_terms(3)) {
        let spec = Arc::new(GroupSpec::free(3));
        let x = exact(&spec, &a);
        let squares = x.terms().fold(q(0), |acc, (_, _, c)| acc + c * c);
        prop_assert_eq!(x.gram().unwrap().trace(), squares);
    }

    #[test]
    fn multiplication_is_associative(a in small_terms(2), b in small_terms(2), c in small_terms(2)) {
        let spec = catalog::twist_group().unwrap();
        let (x, y, z) = (exact(&spec, &a), exact(&spec, &b), exact(&spec, &c));
        let l = x.multiply(&y).unwrap().multiply(&z).unwrap();
        let r = x.multiply(&y.multiply(&z).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn unit_modulus_twists_keep_traces(phases in prop::collection::vec(0.0f64..std::f64::consts::TAU, 2)) {
        let zeta: Vec<Complex64> = phases.iter().map(|p| Complex64::from_polar(1.0, *p)).collect();
        let twisted = catalog::free_operator(3, &zeta).unwrap();
        let plain = catalog::free_operator_exact(3).unwrap();
        let tw = twisted.element.power_traces(5, DEFAULT_TERM_BUDGET).unwrap();
        let pl = plain.element.power_traces(5, DEFAULT_TERM_BUDGET).unwrap();
        for (x, y) in tw.values.iter().zip(&pl.values) {
            prop_assert!((x - y.to_f64().unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn torus_traces_match_laurent_convolution(a in prop::collection::vec((prop::collection::vec(-2i64..=2, 2), -3i64..=3), 1..5)) {
        let spec = Arc::new(GroupSpec::free_abelian(2));
        let x = ExactElement::from_terms(
            spec,
            a.iter().map(|(e, c)| (Word::from_exponents(e), q(*c))),
        ).unwrap();
        prop_assume!(!x.is_zero());
        let traces = x.power_traces(4, DEFAULT_TERM_BUDGET).unwrap();
        // oracle: constant term of (P̄P)^k by direct convolution of exponent maps
        let mut p: HashMap<Vec<i64>, i64> = HashMap::new();
        for (e, c) in &a {
            *p.entry(e.clone()).or_default() += c;
        }
        p.retain(|_, c| *c != 0);
        let conj: HashMap<Vec<i64>, i64> = p.iter().map(|(e, c)| (e.iter().map(|v| -v).collect(), *c)).collect();
        let mul = |f: &HashMap<Vec<i64>, i64>, g: &HashMap<Vec<i64>, i64>| {
            let mut out: HashMap<Vec<i64>, i64> = HashMap::new();
            for (e1, c1) in f {
                for (e2, c2) in g {
                    let e: Vec<i64> = e1.iter().zip(e2).map(|(u, v)| u + v).collect();
                    *out.entry(e).or_default() += c1 * c2;
                }
            }
            out
        };
        let gram = mul(&conj, &p);
        let mut power: HashMap<Vec<i64>, i64> = HashMap::from([(vec![0, 0], 1)]);
        for k in 0..=4 {
            let ct = power.get(&vec![0, 0]).copied().unwrap_or(0);
            prop_assert_eq!(&traces.values[k], &q(ct));
            power = mul(&power, &gram);
        }
    }
}

#[test]
fn float_and_exact_products_agree() {
    let spec = catalog::wirtinger_group().unwrap();
    let t = BigRational::new(3.into(), 7.into());
    let op = catalog::fig8_wirtinger::<BigRational>(&t, spec).unwrap();
    let g = op.element.gram().unwrap();
    let gf = FloatElement::from_exact(&g);
    let sq = g.multiply(&g).unwrap();
    let sqf = gf.multiply(&gf).unwrap();
    assert_eq!(sq.len(), sqf.len());
    for (key, _, c) in sq.terms() {
        let f = sqf.coefficient(key).copied().unwrap_or(Complex64::zero());
        assert!((f.re - c.to_f64().unwrap()).abs() < 1e-12 && f.im.abs() < 1e-12);
    }
}
