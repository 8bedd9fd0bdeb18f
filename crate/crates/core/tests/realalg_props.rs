use std::cmp::Ordering;

use eqcad::realalg::{compare, isolate_roots, sign_at, substitute_partial, AlgebraicNumber, SamplePoint, Sign};
use eqcad::{Polynomial, Rational, Variable};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

const X: Variable = Variable(0);
const Y: Variable = Variable(1);

fn r(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn univariate(coeffs: &[i64]) -> Polynomial {
    Polynomial::from_coeffs(X, coeffs.iter().map(|&c| Polynomial::from_int(c)).collect())
}

// --- Sturm oracle on plain coefficient vectors (lowest degree first) ---

fn trim(v: &mut Vec<Rational>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut a = a.to_vec();
    let db = b.len() - 1;
    while a.len() > db {
        let k = a.len() - 1;
        let f = &a[k] / &b[db];
        for i in 0..=db {
            let t = &f * &b[i];
            a[k - db + i] -= t;
        }
        a.pop();
        trim(&mut a);
    }
    a
}

fn sturm_count(p: &[Rational]) -> usize {
    let mut seq = vec![p.to_vec()];
    let mut d: Vec<Rational> = p.iter().enumerate().skip(1).map(|(i, c)| c * r(i as i64)).collect();
    trim(&mut d);
    if d.is_empty() {
        return 0;
    }
    seq.push(d);
    loop {
        let n = seq.len();
        let mut next: Vec<Rational> = rem(&seq[n - 2], &seq[n - 1]).into_iter().map(|c| -c).collect();
        trim(&mut next);
        if next.is_empty() {
            break;
        }
        seq.push(next);
    }
    let changes = |signs: Vec<i32>| {
        let s: Vec<i32> = signs.into_iter().filter(|&x| x != 0).collect();
        s.windows(2).filter(|w| w[0] != w[1]).count()
    };
    let at_pos: Vec<i32> = seq.iter().map(|q| if q.last().unwrap().is_positive() { 1 } else { -1 }).collect();
    let at_neg: Vec<i32> = seq
        .iter()
        .map(|q| {
            let s = if q.last().unwrap().is_positive() { 1 } else { -1 };
            if (q.len() - 1) % 2 == 0 {
                s
            } else {
                -s
            }
        })
        .collect();
    changes(at_neg) - changes(at_pos)
}

fn eval_rat(coeffs: &[i64], x: &Rational) -> Rational {
    coeffs.iter().rev().fold(Rational::zero(), |acc, &c| acc * x + r(c))
}

/// Naive interval evaluation of a polynomial term by term at boxes.
fn interval_terms(p: &Polynomial, boxes: &[(Rational, Rational)]) -> (Rational, Rational) {
    let mut lo = Rational::zero();
    let mut hi = Rational::zero();
    for (exps, c) in p.terms() {
        let mut t = (c.clone(), c.clone());
        for (i, &e) in exps.iter().enumerate() {
            for _ in 0..e {
                let (a, b) = &boxes[i];
                let cands = [&t.0 * a, &t.0 * b, &t.1 * a, &t.1 * b];
                t = (cands.iter().min().unwrap().clone(), cands.iter().max().unwrap().clone());
            }
        }
        lo += t.0;
        hi += t.1;
    }
    (lo, hi)
}

fn coeff_vec() -> impl Strategy<Value = Vec<i64>> {
    (1usize..=8).prop_flat_map(|d| {
        (prop::collection::vec(-6i64..=6, d), prop_oneof![1i64..=4, -4i64..=-1]).prop_map(|(mut v, lc)| {
            v.push(lc);
            v
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn root_count_matches_sturm(coeffs in coeff_vec()) {
        let p = univariate(&coeffs);
        let sf = eqcad::poly::squarefree_part(&p, X);
        let sf_coeffs: Vec<Rational> = sf.coeffs_in(X).iter().map(|c| c.as_constant().unwrap().clone()).collect();
        let roots = isolate_roots(&p).unwrap();
        prop_assert_eq!(roots.len(), sturm_count(&sf_coeffs));
    }

    #[test]
    fn isolating_intervals_are_disjoint_and_certified(coeffs in coeff_vec()) {
        let p = univariate(&coeffs);
        let roots = isolate_roots(&p).unwrap();
        for w in roots.windows(2) {
            prop_assert!(w[0].interval().hi <= w[1].interval().lo);
            prop_assert_eq!(compare(&w[0], &w[1]), Ordering::Less);
        }
        let sf = eqcad::poly::squarefree_part(&p, X);
        let sf_i: Vec<i64> = sf.coeffs_in(X).iter().map(|c| {
            let c = c.as_constant().unwrap();
            i64::try_from(c.to_integer()).unwrap()
        }).collect();
        for root in &roots {
            match root.exact_rational() {
                Some(x) => prop_assert!(eval_rat(&coeffs, &x).is_zero()),
                None => {
                    let iv = root.interval();
                    let a = eval_rat(&sf_i, &iv.lo);
                    let b = eval_rat(&sf_i, &iv.hi);
                    prop_assert!((a.is_positive() && b.is_negative()) || (a.is_negative() && b.is_positive()));
                }
            }
        }
    }

    #[test]
    fn compare_is_a_total_order(a in coeff_vec(), b in coeff_vec(), c in coeff_vec(), ia in 0usize..8, ib in 0usize..8, ic in 0usize..8) {
        let pick = |coeffs: &Vec<i64>, i: usize| -> Option<AlgebraicNumber> {
            let roots = isolate_roots(&univariate(coeffs)).unwrap();
            if roots.is_empty() { None } else { Some(roots[i % roots.len()].clone()) }
        };
        let (Some(x), Some(y), Some(z)) = (pick(&a, ia), pick(&b, ib), pick(&c, ic)) else {
            return Ok(());
        };
        prop_assert_eq!(compare(&x, &y), compare(&y, &x).reverse());
        prop_assert_eq!(compare(&x, &x), Ordering::Equal);
        let xy = compare(&x, &y);
        let yz = compare(&y, &z);
        if xy != Ordering::Greater && yz != Ordering::Greater {
            prop_assert_ne!(compare(&x, &z), Ordering::Greater);
        }
        if xy == Ordering::Equal && yz == Ordering::Equal {
            prop_assert_eq!(compare(&x, &z), Ordering::Equal);
        }
    }

    #[test]
    fn sign_at_agrees_with_refined_intervals(
        base in coeff_vec(),
        fiber in prop::collection::vec((0usize..=2, 0usize..=2, -3i64..=3), 1..5),
        test in prop::collection::vec((0usize..=2, 0usize..=2, -3i64..=3), 1..5),
        pick in 0usize..8,
        fpick in 0usize..8,
    ) {
        let roots = isolate_roots(&univariate(&base)).unwrap();
        prop_assume!(!roots.is_empty());
        let x = roots[pick % roots.len()].clone();
        let point = SamplePoint::new().extended(x.clone());
        let build = |terms: &Vec<(usize, usize, i64)>| terms.iter().fold(Polynomial::zero(), |acc, &(i, j, c)| {
            &acc + &Polynomial::monomial(r(c), &[(X, i), (Y, j)])
        });
        // fiber polynomial plus y^3 so it has a real root over any x
        let f = &build(&fiber) + &Polynomial::var_pow(Y, 3);
        let sub = substitute_partial(&f, &point);
        prop_assume!(!sub.is_nullified());
        let ys = sub.isolate_roots();
        prop_assume!(!ys.is_empty());
        let y = ys[fpick % ys.len()].clone();
        let full = point.extended(y.clone());
        let g = &build(&test) + &f;
        for poly in [&g, &f, &build(&test)] {
            let s = sign_at(poly, &full);
            let tiny = Rational::new(1.into(), num_bigint::BigInt::from(10).pow(30));
            x.refine_to(&tiny);
            y.refine_to(&tiny);
            let boxes = vec![(x.interval().lo, x.interval().hi), (y.interval().lo, y.interval().hi)];
            let (lo, hi) = interval_terms(poly, &boxes);
            match s {
                Sign::Positive => prop_assert!(hi.is_positive()),
                Sign::Negative => prop_assert!(lo.is_negative()),
                Sign::Zero => prop_assert!(!lo.is_positive() && !hi.is_negative()),
            }
            if lo.is_positive() { prop_assert_eq!(s, Sign::Positive); }
            if hi.is_negative() { prop_assert_eq!(s, Sign::Negative); }
        }
        prop_assert_eq!(sign_at(&f, &full), Sign::Zero);
        let _ = Rational::one();
    }
}
