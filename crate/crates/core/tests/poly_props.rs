use eqcad::poly::{content_primitive, discriminant, gcd, resultant, squarefree_part, subresultant_psc};
use eqcad::{Polynomial, Rational, Variable};
use num_traits::Zero;
use proptest::prelude::*;

const X: Variable = Variable(0);
const Y: Variable = Variable(1);

fn r(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Random polynomial in x, y with given degree bounds; coefficients in [-4, 4].
fn poly_xy(max_dx: usize, max_dy: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(((0..=max_dx), (0..=max_dy), -4i64..=4), 1..6).prop_map(|terms| {
        terms.into_iter().fold(Polynomial::zero(), |acc, (i, j, c)| {
            &acc + &Polynomial::monomial(r(c), &[(X, i), (Y, j)])
        })
    })
}

/// Same but with exact degree `dy` in y (leading coefficient forced nonzero).
fn poly_y_deg(dy: usize) -> impl Strategy<Value = Polynomial> {
    (poly_xy(2, dy.saturating_sub(1)), poly_xy(2, 0), 1i64..=3).prop_map(move |(low, lc, k)| {
        let lc = &lc + &Polynomial::from_int(k);
        let lc = if lc.is_zero() { Polynomial::one() } else { lc };
        let low = if dy == 0 { Polynomial::zero() } else { low };
        &low + &(&lc * &Polynomial::var_pow(Y, dy))
    })
}

fn point() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(-5i64..=5, 2).prop_map(|v| v.into_iter().map(r).collect())
}

/// Laplace expansion; fine for the small matrices used here.
fn det(m: &[Vec<Polynomial>]) -> Polynomial {
    let n = m.len();
    if n == 0 {
        return Polynomial::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = Polynomial::zero();
    for col in 0..n {
        if m[0][col].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Polynomial>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(c, _)| *c != col).map(|(_, e)| e.clone()).collect())
            .collect();
        let term = &m[0][col] * &det(&minor);
        acc = if col % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// Determinant-defined principal subresultant coefficient of index `j`,
/// rows of `f` first, columns in descending powers.
fn psc_by_determinant(f: &Polynomial, g: &Polynomial, v: Variable, j: usize) -> Polynomial {
    let fc = f.coeffs_in(v);
    let gc = g.coeffs_in(v);
    let m = fc.len() - 1;
    let n = gc.len() - 1;
    let size = m + n - 2 * j;
    let width = m + n - j;
    let mut rows = Vec::new();
    for i in 0..(n - j) {
        let mut row = vec![Polynomial::zero(); width];
        for (k, c) in fc.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..(m - j) {
        let mut row = vec![Polynomial::zero(); width];
        for (k, c) in gc.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    let square: Vec<Vec<Polynomial>> = rows.into_iter().map(|row| row[..size].to_vec()).collect();
    det(&square)
}

fn sign(e: usize) -> Rational {
    if e.is_multiple_of(2) {
        r(1)
    } else {
        r(-1)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_ops_agree_with_evaluation(a in poly_xy(3, 3), b in poly_xy(3, 3), pt in point()) {
        prop_assert_eq!((&a + &b).eval(&pt), a.eval(&pt) + b.eval(&pt));
        prop_assert_eq!((&a - &b).eval(&pt), a.eval(&pt) - b.eval(&pt));
        prop_assert_eq!((&a * &b).eval(&pt), a.eval(&pt) * b.eval(&pt));
    }

    #[test]
    fn div_exact_inverts_mul(a in poly_xy(2, 2), b in poly_xy(2, 2)) {
        prop_assume!(!b.is_zero());
        prop_assert_eq!((&a * &b).div_exact(&b), Some(a));
    }

    #[test]
    fn psc_matches_determinants((dp, dq, f, g) in (1usize..=3, 1usize..=3).prop_flat_map(|(a, b)| {
        let (dp, dq) = (a.max(b), a.min(b));
        (Just(dp), Just(dq), poly_y_deg(dp), poly_y_deg(dq))
    })) {
        let chain = subresultant_psc(&f, &g, Y);
        prop_assert_eq!(chain.len(), dq + 1);
        for (j, c) in chain.iter().enumerate() {
            let expected = psc_by_determinant(&f, &g, Y, j).scale(&sign((dp - j) * (dq - j)));
            prop_assert_eq!(c, &expected, "j = {}", j);
        }
        // psc_0 is the resultant, whose standard determinant picks up (-1)^(pq).
        let res = resultant(&f, &g, Y).unwrap();
        prop_assert_eq!(&res, &chain[0]);
        prop_assert_eq!(res.clone(), psc_by_determinant(&f, &g, Y, 0).scale(&sign(dp * dq)));
        // Swapping the arguments agrees with the (-1)^(pq) antisymmetry.
        prop_assert_eq!(resultant(&g, &f, Y).unwrap(), res.scale(&sign(dp * dq)));
    }

    #[test]
    fn resultant_vanishes_on_common_root(a in -3i64..=3, f in poly_y_deg(1), g in poly_y_deg(1)) {
        // multiply both by (y - a) to force a common factor
        let lin = &Polynomial::var(Y) - &Polynomial::from_int(a);
        let res = resultant(&(&f * &lin), &(&g * &lin), Y).unwrap();
        prop_assert!(res.is_zero());
    }

    #[test]
    fn discriminant_of_square_is_zero(f in poly_y_deg(1)) {
        prop_assert!(discriminant(&(&f * &f), Y).unwrap().is_zero());
    }

    #[test]
    fn content_primitive_reconstructs(p in poly_xy(3, 3)) {
        prop_assume!(!p.is_zero());
        let (c, pp) = content_primitive(&p, Y);
        prop_assert_eq!(&c * &pp, p);
        prop_assert!(pp.has_integer_coeffs());
        prop_assert!(pp.leading_base_coeff() > Rational::zero());
    }

    #[test]
    fn gcd_divides_both(a in poly_xy(2, 2), b in poly_xy(2, 2), c in poly_xy(1, 1)) {
        prop_assume!(!c.is_zero());
        let (fa, fb) = (&a * &c, &b * &c);
        prop_assume!(!fa.is_zero() && !fb.is_zero());
        let g = gcd(&fa, &fb);
        prop_assert!(fa.div_exact(&g).is_some());
        prop_assert!(fb.div_exact(&g).is_some());
        prop_assert!(g.div_exact(&c.normalize()).is_some());
    }

    #[test]
    fn squarefree_part_has_no_repeated_factor(f in poly_y_deg(1), g in poly_y_deg(2)) {
        let p = &(&f * &f) * &g;
        let s = squarefree_part(&p, Y);
        prop_assert!(p.div_exact(&s).is_some());
        let d = gcd(&s, &s.derivative(Y));
        prop_assert_eq!(d.degree(Y), Some(0));
    }
}
