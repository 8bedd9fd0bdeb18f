use std::collections::BTreeSet;

use eqcad::formula::ConstraintId;
use eqcad::projection::{
    project_collins, project_mccallum, project_reduced, EcDesignation, ProjectionLevel, Provenance,
};
use eqcad::{Polynomial, Rational, Variable};
use proptest::prelude::*;

const X: Variable = Variable(0);
const Y: Variable = Variable(1);

fn build(terms: &[(usize, usize, i64)]) -> Polynomial {
    terms.iter().fold(Polynomial::zero(), |acc, &(i, j, c)| {
        &acc + &Polynomial::monomial(Rational::from_integer(c.into()), &[(X, i), (Y, j)])
    })
}

/// Polynomial with main variable y: random terms of total degree <= 3 plus
/// a y^k term so the degree in y is positive.
fn poly_y() -> impl Strategy<Value = Polynomial> {
    (prop::collection::vec((0usize..=2, 0usize..=2, -3i64..=3), 0..5), 1usize..=2, prop_oneof![Just(1i64), Just(-2)])
        .prop_map(|(terms, k, c)| {
            let mut t: Vec<_> = terms.into_iter().filter(|(i, j, _)| i + j <= 3).collect();
            t.push((0, k, c));
            build(&t)
        })
        .prop_filter("main variable y", |p| p.main_var() == Some(Y))
}

fn level(ps: &[Polynomial]) -> ProjectionLevel {
    ProjectionLevel::from_polys(Y, ps, ConstraintId(0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn outputs_are_free_of_the_projected_variable(ps in prop::collection::vec(poly_y(), 1..4)) {
        let s = level(&ps);
        for out in [project_mccallum(&s), project_collins(&s)] {
            for p in &out.polys {
                prop_assert_eq!(p.poly.degree(Y).unwrap_or(0), 0);
                prop_assert!(!p.poly.is_constant());
                prop_assert_eq!(p.poly.normalize(), p.poly.clone());
            }
            prop_assert!(out.normalized <= out.raw.total());
        }
    }

    #[test]
    fn reduced_is_a_subset_of_mccallum(ps in prop::collection::vec(poly_y(), 1..4)) {
        let s = level(&ps);
        let Ok(ec) = EcDesignation::new(&ps[0], BTreeSet::new(), Provenance::Input) else {
            return Ok(());
        };
        let red = project_reduced(&ec, &s).unwrap();
        let mc = project_mccallum(&s);
        prop_assert!(red.poly_set().is_subset(&mc.poly_set()));
        prop_assert!(red.raw.total() <= mc.raw.total());
    }

    #[test]
    fn level_sets_are_coprime_squarefree(ps in prop::collection::vec(poly_y(), 1..4)) {
        let s = level(&ps);
        let members = s.polys();
        for (i, a) in members.iter().enumerate() {
            prop_assert!(eqcad::poly::gcd(a, &a.derivative(Y)).is_constant());
            for b in &members[i + 1..] {
                prop_assert!(eqcad::poly::gcd(a, b).is_constant());
            }
        }
        // every input piece is a product of members
        for p in &ps {
            let mut rest = eqcad::poly::squarefree_part(&eqcad::poly::content_primitive(p, Y).1, Y);
            for m in &members {
                if let Some(q) = rest.div_exact(m) {
                    rest = q;
                }
            }
            prop_assert_eq!(rest.degree(Y).unwrap_or(0), 0);
        }
    }

    #[test]
    fn projection_ignores_input_order(ps in prop::collection::vec(poly_y(), 2..4)) {
        let mut rev = ps.clone();
        rev.reverse();
        let (a, b) = (level(&ps), level(&rev));
        prop_assert_eq!(a.polys(), b.polys());
        prop_assert_eq!(project_mccallum(&a).poly_set(), project_mccallum(&b).poly_set());
        prop_assert_eq!(project_collins(&a).poly_set(), project_collins(&b).poly_set());
    }

    #[test]
    fn raw_counts_follow_the_pair_formula(ps in prop::collection::vec(poly_y(), 1..5)) {
        let s = level(&ps);
        let n = s.len();
        let quad = s.polys().iter().filter(|p| p.degree(Y).unwrap() >= 2).count();
        let mc = project_mccallum(&s);
        prop_assert_eq!(mc.raw.disc_res(), quad + n * (n - 1) / 2);
        let coeffs: usize = s.polys().iter().map(|p| p.coeffs_in(Y).iter().filter(|c| !c.is_zero()).count()).sum();
        prop_assert_eq!(mc.raw.coefficients, coeffs);
        let f = s.polys()[0].clone();
        let ec = EcDesignation::new(&f, BTreeSet::new(), Provenance::Input).unwrap();
        let red = project_reduced(&ec, &s).unwrap();
        let fquad = usize::from(f.degree(Y).unwrap() >= 2);
        prop_assert_eq!(red.raw.disc_res(), fquad + (n - 1));
    }
}
