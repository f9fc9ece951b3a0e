//! Factorization checked against reconstruction at scale and against an
//! exhaustive divisor search in low degree.
//!
//! The low-degree oracle never trusts the library's notion of primality: a
//! reported factor of degree up to 4 is confirmed irreducible by enumerating
//! every possible divisor shape directly (rational roots for linear factors,
//! value-divisor triples at t = 0, 1, -1 for quadratic ones).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use eqdd_core::factorint::factor;
use eqdd_core::polycore::IntPoly;

fn random_poly(rng: &mut ChaCha8Rng, max_deg: usize, max_coeff: i64) -> IntPoly {
    loop {
        let deg = rng.random_range(0..=max_deg);
        let p = IntPoly::new(
            (0..=deg)
                .map(|_| BigInt::from(rng.random_range(-max_coeff..=max_coeff)))
                .collect(),
        );
        if !p.is_zero() {
            return p;
        }
    }
}

#[test]
fn reconstruction_identity_on_random_polynomials() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xFAC7);
    for _ in 0..10_000 {
        let p = random_poly(&mut rng, 6, 9);
        let f = factor(&p).unwrap();
        assert_eq!(f.reconstruct(), p, "reconstruction failed for {p}");
        assert!(f.content.is_positive());
        for fac in &f.factors {
            assert!(fac.poly.lead().unwrap().is_positive());
            assert!(fac.poly.content().is_one(), "imprimitive factor for {p}");
            assert!(fac.mult >= 1);
        }
    }
}

/// Signed divisors of a nonzero integer, both orientations.
fn signed_divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            let q = &n / &d;
            out.push(d.clone());
            out.push(-&d);
            if q != d {
                out.push(q.clone());
                out.push(-q);
            }
        }
        d += 1;
    }
    out
}

/// Does any primitive linear polynomial divide `f`? Any such divisor
/// `q t - r` has `q` dividing the leading and `r` the constant coefficient.
fn has_linear_factor(f: &IntPoly) -> bool {
    if f.coeff(0).is_zero() {
        return true; // t divides
    }
    for q in signed_divisors(f.lead().unwrap()) {
        if q.is_negative() {
            continue;
        }
        for r in signed_divisors(&f.coeff(0)) {
            if q.gcd(&r.abs()).is_one()
                && f.div_exact(&IntPoly::new(vec![-r.clone(), q.clone()]))
                    .is_some()
            {
                return true;
            }
        }
    }
    false
}

/// Does any quadratic polynomial divide the quartic `f`? A divisor `g` is
/// pinned by its values at 0, 1 and -1, each of which divides the value of
/// `f` there; those values are nonzero once linear factors are excluded.
fn has_quadratic_factor(f: &IntPoly) -> bool {
    let at = |x: i64| -> BigInt {
        let mut acc = BigInt::zero();
        for c in f.coeffs().iter().rev() {
            acc = acc * x + c;
        }
        acc
    };
    let (f0, f1, fm1) = (at(0), at(1), at(-1));
    assert!(!f0.is_zero() && !f1.is_zero() && !fm1.is_zero());
    for d0 in signed_divisors(&f0) {
        for d1 in signed_divisors(&f1) {
            for dm1 in signed_divisors(&fm1) {
                // g = b0 + b1 t + b2 t^2 with g(0) = d0, g(1) = d1, g(-1) = dm1.
                let two = BigInt::from(2);
                let b1_num = &d1 - &dm1;
                let b2_num = &d1 + &dm1 - &two * &d0;
                if !(&b1_num % &two).is_zero() || !(&b2_num % &two).is_zero() {
                    continue;
                }
                let g = IntPoly::new(vec![d0.clone(), b1_num / &two, b2_num / &two]);
                if g.degree() == Some(2) && f.div_exact(&g).is_some() {
                    return true;
                }
            }
        }
    }
    false
}

/// Exhaustive irreducibility for primitive polynomials of degree 1 to 4: a
/// composite admits a factor of degree at most half its own.
fn irreducible_by_search(f: &IntPoly) -> bool {
    match f.degree() {
        Some(1) => true,
        Some(2) | Some(3) => !has_linear_factor(f),
        Some(4) => !has_linear_factor(f) && !has_quadratic_factor(f),
        _ => panic!("oracle only covers degrees 1 to 4"),
    }
}

#[test]
fn low_degree_factors_match_the_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xFAC8);
    let mut primes_checked = 0usize;
    for _ in 0..400 {
        let p = random_poly(&mut rng, 4, 5);
        if p.degree() == Some(0) {
            continue;
        }
        let f = factor(&p).unwrap();
        let mut degree_sum = 0u32;
        for fac in &f.factors {
            // Exact multiplicity: divides that often and no more.
            let mut rest = p.clone();
            for _ in 0..fac.mult {
                rest = rest.div_exact(&fac.poly).expect("claimed factor divides");
            }
            assert!(
                rest.div_exact(&fac.poly).is_none(),
                "multiplicity undercounted"
            );
            if fac.poly != IntPoly::from_i64s(&[0, 1]) {
                assert!(
                    irreducible_by_search(&fac.poly),
                    "{} is not irreducible (divides {p})",
                    fac.poly
                );
                primes_checked += 1;
            }
            degree_sum += fac.poly.degree().unwrap() as u32 * fac.mult;
        }
        // Completeness: the primitive part is exactly exhausted.
        assert_eq!(
            degree_sum as usize,
            p.degree().unwrap(),
            "factors of {p} incomplete"
        );
        assert_eq!(f.content, p.content());
    }
    assert!(primes_checked > 200, "sampling too thin: {primes_checked}");
}

#[test]
fn pinned_factorizations() {
    let check = |text: &str, expected: &str| {
        let p = eqdd_core::polycore::parse_poly(text).unwrap();
        assert!(p.offset() >= 0, "pinned inputs are plain polynomials");
        let plain = p.base().mul_t_pow(p.offset() as usize);
        let f = factor(&plain).unwrap();
        assert_eq!(f.to_string(), expected, "for {text}");
    };
    check("1+t^3", "(1+t) * (1-t+t^2)");
    check("2+4t+2t^2", "2 * (1+t)^2");
    check("t^2+t^3", "(t)^2 * (1+t)");
    check("-1+t^4", "(-1+t) * (1+t) * (1+t^2)");
    check("1+t+t^2+t^3+t^4", "(1+t+t^2+t^3+t^4)");
    check("6", "6");
}
