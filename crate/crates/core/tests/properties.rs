//! Randomized invariants: ring laws, valuation bookkeeping, certificate
//! soundness, and serialization round trips.

use std::sync::OnceLock;

use proptest::prelude::*;

use eqdd_core::bddring::{
    in_rbdd, in_rbdd0, in_rbdd0_inf, in_rbdd_inf, verify_membership_certificate,
    verify_membership_witness, Membership, Subring,
};
use eqdd_core::cohomology::{torus, CWDescription};
use eqdd_core::locring::{
    from_exponents, verify_negativity_certificate, LocElem, LocElemData, Positivity, Ring,
    UnitExponents,
};
use eqdd_core::polycore::{CharacterPolynomial, IntPoly};

fn rings() -> &'static Vec<Ring> {
    static RINGS: OnceLock<Vec<Ring>> = OnceLock::new();
    RINGS.get_or_init(|| {
        ["1+t", "2+t", "1+t^3", "2", "1+t+t^2"]
            .iter()
            .map(|s| Ring::new(CharacterPolynomial::parse(s).unwrap()).unwrap())
            .collect()
    })
}

fn poly(max_deg: usize, bound: i64) -> impl Strategy<Value = IntPoly> {
    prop::collection::vec(-bound..=bound, 0..=max_deg + 1).prop_map(|v| IntPoly::from_i64s(&v))
}

fn element() -> impl Strategy<Value = LocElem> {
    (0..rings().len(), poly(6, 5), 0u32..=3, 0u32..=3)
        .prop_map(|(i, num, l, k)| rings()[i].element(num, l, k))
}

fn element_pair() -> impl Strategy<Value = (LocElem, LocElem)> {
    (
        0..rings().len(),
        poly(6, 5),
        poly(6, 5),
        0u32..=3,
        0u32..=3,
        0u32..=3,
        0u32..=3,
    )
        .prop_map(|(i, n1, n2, l1, k1, l2, k2)| {
            (
                rings()[i].element(n1, l1, k1),
                rings()[i].element(n2, l2, k2),
            )
        })
}

proptest! {
    #[test]
    fn ring_laws(((x, y), z_num) in (element_pair(), poly(6, 5))) {
        let z = x.ring().element(z_num, 1, 1);
        let lhs = x.add(&y).unwrap().add(&z).unwrap();
        let rhs = x.add(&z.add(&y).unwrap()).unwrap();
        prop_assert!(lhs.eq_elem(&rhs).unwrap());

        let dist_l = x.mul(&y.add(&z).unwrap()).unwrap();
        let dist_r = x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap();
        prop_assert!(dist_l.eq_elem(&dist_r).unwrap());

        prop_assert!(x.sub(&x).unwrap().is_zero());
        prop_assert!(x.mul(&x.ring().one()).unwrap().eq_elem(&x).unwrap());
    }

    #[test]
    fn valuation_and_weight_add_under_multiplication((x, y) in element_pair()) {
        let xy = x.mul(&y).unwrap();
        if let (Some(vx), Some(vy)) = (x.v(), y.v()) {
            prop_assert_eq!(xy.v().unwrap(), vx + vy);
            prop_assert_eq!(xy.w().unwrap(), x.w().unwrap() + y.w().unwrap());
        } else {
            prop_assert!(xy.is_zero());
        }
    }

    #[test]
    fn nonnegative_numerators_multiply_positively(
        (i, n1, n2, l, k) in (0..rings().len(), poly(5, 4), poly(5, 4), 0u32..=2, 0u32..=2)
    ) {
        let make_nonneg = |p: &IntPoly| IntPoly::new(
            p.coeffs().iter().map(|c| c.magnitude().clone().into()).collect()
        );
        let x = rings()[i].element(make_nonneg(&n1), l, k);
        let y = rings()[i].element(make_nonneg(&n2), k, l);
        let xy = x.mul(&y).unwrap();
        let verdict = xy.is_positive();
        let immediate = matches!(verdict, Positivity::Positive { witness_j: 0 });
        prop_assert!(immediate, "expected an immediate witness, got {:?}", verdict);
    }

    #[test]
    fn negativity_certificates_verify(x in element()) {
        if let Positivity::NotPositive { certificate } = x.is_positive() {
            prop_assert!(verify_negativity_certificate(&x, &certificate));
        }
    }

    #[test]
    fn membership_witnesses_are_minimal_and_monotone(x in element()) {
        if let Membership::In { witness_j: j } = in_rbdd(&x) {
            prop_assert!(verify_membership_witness(&x, j));
            prop_assert!(verify_membership_witness(&x, j + 1));
            prop_assert!(verify_membership_witness(&x, j + 3));
            if j >= 1 && !x.is_zero() {
                prop_assert!(!verify_membership_witness(&x, j - 1));
            }
        }
    }

    #[test]
    fn membership_certificates_verify(x in element()) {
        for sub in [Subring::RBdd, Subring::RBdd0, Subring::RBddInf, Subring::RBdd0Inf] {
            if let Membership::NotIn { certificate } = eqdd_core::bddring::membership(sub, &x) {
                prop_assert!(
                    verify_membership_certificate(sub, &x, &certificate),
                    "cert {certificate:?} failed for {x:?} in {sub}"
                );
            }
        }
    }

    #[test]
    fn subgroup_membership_respects_containment(x in element()) {
        let full = in_rbdd(&x);
        for verdict in [in_rbdd0(&x), in_rbdd_inf(&x), in_rbdd0_inf(&x)] {
            if let Membership::In { witness_j } = verdict {
                prop_assert_eq!(full.clone(), Membership::In { witness_j });
            }
        }
        if matches!(full, Membership::NotIn { .. }) {
            prop_assert!(!in_rbdd0(&x).is_in());
            prop_assert!(!in_rbdd_inf(&x).is_in());
            prop_assert!(!in_rbdd0_inf(&x).is_in());
        }
    }

    #[test]
    fn units_round_trip_through_exponents(
        (i, sign, t_exp, e1, e2) in (0..rings().len(), prop::bool::ANY, -3i64..=3, -2i64..=2, -2i64..=2)
    ) {
        let ring = &rings()[i];
        let n_primes = ring.factorization().factors.len();
        let ux = UnitExponents {
            sign: if sign { 1 } else { -1 },
            t_exp,
            prime_exps: [e1, e2][..n_primes.min(2)].to_vec(),
            content_num: 1.into(),
            content_den: 1.into(),
        };
        let x = from_exponents(ring, &ux).unwrap();
        let back = x.is_unit().expect("built from unit exponents");
        prop_assert_eq!(&back, &ux);
        prop_assert!(from_exponents(ring, &back).unwrap().eq_elem(&x).unwrap());
    }

    #[test]
    fn intpoly_serde_round_trip(p in poly(8, 20)) {
        let json = serde_json::to_string(&p).unwrap();
        let back: IntPoly = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn intpoly_display_reparses(p in poly(8, 20)) {
        let text = p.to_string();
        let parsed = eqdd_core::polycore::parse_poly(&text).unwrap();
        let rebuilt = if parsed.offset() >= 0 {
            parsed.base().mul_t_pow(parsed.offset() as usize)
        } else {
            unreachable!("plain polynomials have nonnegative valuation")
        };
        prop_assert_eq!(rebuilt, p);
    }

    #[test]
    fn element_data_serde_round_trip(x in element()) {
        let json = serde_json::to_string(&x.data()).unwrap();
        let data: LocElemData = serde_json::from_str(&json).unwrap();
        let back = x.ring().attach(data);
        prop_assert!(back.eq_elem(&x).unwrap());
        prop_assert_eq!(back.num(), x.num());
    }

    #[test]
    fn character_serde_round_trip(
        (coeffs, off) in (prop::collection::vec(0i64..=9, 1..=6), -4i64..=4)
    ) {
        prop_assume!(coeffs[0] > 0 && *coeffs.last().unwrap() > 0);
        let term = |c: i64, e: i64| match e {
            0 => format!("{c}"),
            1 => format!("{c}t"),
            _ => format!("{c}t^{e}"),
        };
        let text = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(e, c)| term(*c, e as i64 + off))
            .collect::<Vec<_>>()
            .join("+");
        let cp = CharacterPolynomial::parse(&text).unwrap();
        prop_assert_eq!(cp.original_offset(), off);
        prop_assert_eq!(cp.poly(), &IntPoly::from_i64s(&coeffs));
        let back: CharacterPolynomial =
            serde_json::from_str(&serde_json::to_string(&cp).unwrap()).unwrap();
        prop_assert_eq!(back, cp);
    }

    #[test]
    fn space_serde_round_trip(n in 0u32..=6) {
        let x = torus(n);
        let back: CWDescription =
            serde_json::from_str(&serde_json::to_string(&x).unwrap()).unwrap();
        prop_assert_eq!(back, x);
    }
}
