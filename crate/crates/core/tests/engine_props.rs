use std::collections::BTreeSet;

use eqcad::engine::{EngineConfig, SolverState};
use eqcad::formula::{ConstraintId, Formula, Relation};
use eqcad::projection::Operator;
use eqcad::realalg::{sign_at, SamplePoint};
use eqcad::{Polynomial, Rational, Variable};
use proptest::prelude::*;

fn r(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn poly(nvars: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((prop::collection::vec(0usize..=2, nvars), -3i64..=3), 1..4).prop_map(move |terms| {
        terms.into_iter().fold(Polynomial::zero(), |acc, (exps, c)| {
            let vars: Vec<(Variable, usize)> = exps.iter().enumerate().map(|(i, &e)| (Variable(i), e)).collect();
            &acc + &Polynomial::monomial(r(c), &vars)
        })
    })
}

fn relation() -> impl Strategy<Value = Relation> {
    prop_oneof![Just(Relation::Gt), Just(Relation::Ge), Just(Relation::Lt), Just(Relation::Le), Just(Relation::Ne)]
}

/// One equation followed by up to two other atoms, in two variables.
fn instance() -> impl Strategy<Value = Vec<Formula>> {
    (poly(2), prop::collection::vec((poly(2), relation()), 0..3)).prop_map(|(eq, rest)| {
        let mut v = vec![Formula::atom(eq, Relation::Eq)];
        v.extend(rest.into_iter().map(|(p, rel)| Formula::atom(p, rel)));
        v
    })
}

fn names() -> Vec<String> {
    vec!["x".into(), "y".into()]
}

fn build(cs: &[Formula], policy: Operator) -> SolverState {
    SolverState::build(names(), vec![None, None], cs.to_vec(), EngineConfig { policy, ..Default::default() }).unwrap()
}

/// Grid search oracle: a rational point satisfying everything proves sat.
fn grid_sat(cs: &[Formula]) -> bool {
    let f = Formula::and(cs.to_vec());
    (-8..=8).any(|i| {
        (-8..=8).any(|j| {
            let pt = SamplePoint::from_rationals(&[Rational::new(i.into(), 2.into()), Rational::new(j.into(), 2.into())]);
            f.eval(&mut |p| sign_at(p, &pt))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn policies_agree(cs in instance()) {
        let verdicts: Vec<bool> = [Operator::Reduced, Operator::McCallum, Operator::Collins]
            .into_iter()
            .map(|op| {
                let v = build(&cs, op).check_sat().unwrap();
                if let Some(w) = v.witness() {
                    let f = Formula::and(cs.clone());
                    assert!(f.eval(&mut |p| sign_at(p, w)));
                }
                v.is_sat()
            })
            .collect();
        prop_assert_eq!(verdicts[0], verdicts[1]);
        prop_assert_eq!(verdicts[1], verdicts[2]);
        if grid_sat(&cs) {
            prop_assert!(verdicts[0]);
        }
    }

    #[test]
    fn edits_match_a_fresh_build(
        pool in prop::collection::vec((poly(2), prop_oneof![Just(Relation::Eq), relation()]), 2..5),
        script in prop::collection::vec((any::<bool>(), 0usize..8), 1..7),
    ) {
        let mut state = SolverState::new(names(), vec![None, None], EngineConfig::default());
        state.refresh().unwrap();
        let mut live: Vec<(ConstraintId, usize)> = Vec::new();
        for (add, k) in script {
            if add || live.is_empty() {
                let (p, rel) = &pool[k % pool.len()];
                let id = state.add_constraint(Formula::atom(p.clone(), *rel)).unwrap();
                live.push((id, k % pool.len()));
            } else {
                let (id, _) = live.remove(k % live.len());
                state.remove_constraint(id).unwrap();
            }
        }
        let finals: Vec<Formula> = live.iter().map(|&(_, i)| Formula::atom(pool[i].0.clone(), pool[i].1)).collect();
        let mut fresh = build(&finals, Operator::Reduced);
        prop_assert_eq!(state.level_sets(), fresh.level_sets());
        prop_assert_eq!(state.check_sat().unwrap().is_sat(), fresh.check_sat().unwrap().is_sat());
    }
}

#[test]
fn adding_a_duplicate_changes_nothing() {
    let p = Polynomial::parse("x^2+y^2-1", &["x", "y"]).unwrap();
    let mut s = build(&[Formula::atom(p.clone(), Relation::Eq)], Operator::Reduced);
    let before = s.level_sets();
    let cells = s.stats().cells;
    s.add_constraint(Formula::atom(p.scale(&r(3)), Relation::Eq)).unwrap();
    assert_eq!(s.level_sets(), before);
    assert_eq!(s.stats().cells, cells);
    assert_eq!(s.stats().created_cells, 0);
}

#[test]
fn adding_an_inequality_adds_its_resultant() {
    let vars = ["x", "y"];
    let p = |t: &str| Polynomial::parse(t, &vars).unwrap();
    let mut s = build(&[Formula::atom(p("x^2+y^2-1"), Relation::Eq)], Operator::Reduced);
    let before: BTreeSet<Polynomial> = s.level_sets()[0].clone();
    s.add_constraint(Formula::atom(p("x+y"), Relation::Gt)).unwrap();
    let after = s.level_sets()[0].clone();
    let delta: BTreeSet<Polynomial> = after.difference(&before).cloned().collect();
    assert_eq!(delta, BTreeSet::from([p("2*x^2-1")]));
    assert!(s.stats().preserved_cells > 0);
}

#[test]
fn add_then_remove_round_trips() {
    let vars = ["x", "y"];
    let p = |t: &str| Polynomial::parse(t, &vars).unwrap();
    let mut s = build(&[Formula::atom(p("x^2+y^2-1"), Relation::Eq)], Operator::Reduced);
    let before = s.level_sets();
    let id = s.add_constraint(Formula::atom(p("x*y-1"), Relation::Lt)).unwrap();
    s.remove_constraint(id).unwrap();
    assert_eq!(s.level_sets(), before);
}

#[test]
fn removing_the_inequality_shrinks_to_the_constraint_alone() {
    let vars = ["x", "y"];
    let p = |t: &str| Polynomial::parse(t, &vars).unwrap();
    let mut s = build(
        &[Formula::atom(p("x^2+y^2-1"), Relation::Eq), Formula::atom(p("x+y"), Relation::Gt)],
        Operator::Reduced,
    );
    let cells = s.stats().cells;
    s.remove_constraint(ConstraintId(1)).unwrap();
    let alone = build(&[Formula::atom(p("x^2+y^2-1"), Relation::Eq)], Operator::Reduced);
    assert_eq!(s.level_sets(), alone.level_sets());
    assert!(s.stats().cells <= cells);
}
