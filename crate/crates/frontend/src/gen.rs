//! Seeded random instance generators.

use eqcad::formula::{ConstraintId, Formula, Relation};
use eqcad::projection::ProjectionLevel;
use eqcad::{Polynomial, Rational, Variable};
use rand::Rng;

fn exponent_vectors(vars: usize, degree: usize) -> Vec<Vec<usize>> {
    if vars == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for e in 0..=degree {
        for mut rest in exponent_vectors(vars - 1, degree - e) {
            rest.push(e);
            out.push(rest);
        }
    }
    out
}

fn nonzero<R: Rng>(rng: &mut R, bound: i64) -> i64 {
    loop {
        let c = rng.gen_range(-bound..=bound);
        if c != 0 {
            return c;
        }
    }
}

fn monomial(c: i64, exps: &[usize]) -> Polynomial {
    let vars: Vec<(Variable, usize)> = exps.iter().enumerate().map(|(i, &e)| (Variable(i), e)).collect();
    Polynomial::monomial(Rational::from_integer(c.into()), &vars)
}

/// Every monomial of total degree at most `degree` with a random
/// coefficient in `[-bound, bound]`; the pure power of the last variable
/// always gets a nonzero one.
pub fn dense_poly<R: Rng>(rng: &mut R, vars: usize, degree: usize, bound: i64) -> Polynomial {
    let mut p = Polynomial::zero();
    for exps in exponent_vectors(vars, degree) {
        let top = exps[vars - 1] == degree;
        let c = if top { nonzero(rng, bound) } else { rng.gen_range(-bound..=bound) };
        p = &p + &monomial(c, &exps);
    }
    p
}

/// `n` dense constraints of the given degree, the first `ecs` of them
/// equations. Instances whose top-level basis is not `n` coprime members
/// of full degree are redrawn.
pub fn generic_instance<R: Rng>(rng: &mut R, vars: usize, degree: usize, n: usize, ecs: usize, bound: i64) -> Vec<Formula> {
    assert!(vars >= 1 && degree >= 1);
    let top = Variable(vars - 1);
    loop {
        let polys: Vec<Polynomial> = (0..n).map(|_| dense_poly(rng, vars, degree, bound)).collect();
        let level = ProjectionLevel::from_polys(top, &polys, ConstraintId(0));
        let generic = level.len() == n && level.polys().iter().all(|p| p.degree(top) == Some(degree));
        if !generic {
            continue;
        }
        return polys
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                let rel = if i < ecs {
                    Relation::Eq
                } else if rng.gen_bool(0.5) {
                    Relation::Gt
                } else {
                    Relation::Lt
                };
                Formula::atom(p, rel)
            })
            .collect();
    }
}

/// A sparse polynomial with one to three terms.
pub fn sparse_poly<R: Rng>(rng: &mut R, vars: usize, max_degree: usize, bound: i64) -> Polynomial {
    loop {
        let terms = rng.gen_range(1..=3);
        let mut p = Polynomial::zero();
        for _ in 0..terms {
            let mut exps = vec![0; vars];
            let total = rng.gen_range(0..=max_degree);
            for _ in 0..total {
                exps[rng.gen_range(0..vars)] += 1;
            }
            p = &p + &monomial(nonzero(rng, bound), &exps);
        }
        if !p.is_constant() {
            return p;
        }
    }
}

pub fn random_relation<R: Rng>(rng: &mut R) -> Relation {
    [Relation::Eq, Relation::Ne, Relation::Gt, Relation::Ge, Relation::Lt, Relation::Le][rng.gen_range(0..6)]
}

/// Up to `max_constraints` sparse constraints, the first one an equation.
pub fn small_instance<R: Rng>(rng: &mut R, vars: usize, max_constraints: usize, max_degree: usize, bound: i64) -> Vec<Formula> {
    let k = rng.gen_range(1..=max_constraints);
    (0..k)
        .map(|i| {
            let p = sparse_poly(rng, vars, max_degree, bound);
            let rel = if i == 0 { Relation::Eq } else { random_relation(rng) };
            Formula::atom(p, rel)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dense_poly_has_full_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let p = dense_poly(&mut rng, 2, 2, 9);
            assert_eq!(p.degree(Variable(1)), Some(2));
            assert!(p.total_degree().unwrap() <= 2);
        }
        assert_eq!(exponent_vectors(2, 2).len(), 6);
    }

    #[test]
    fn generic_instances_are_deterministic() {
        let a = generic_instance(&mut ChaCha8Rng::seed_from_u64(11), 2, 2, 4, 1, 9);
        let b = generic_instance(&mut ChaCha8Rng::seed_from_u64(11), 2, 2, 4, 1, 9);
        assert_eq!(a, b);
        assert_eq!(a.len(), 4);
        assert_eq!(a.iter().filter(|f| !f.top_level_equations().is_empty()).count(), 1);
    }
}
