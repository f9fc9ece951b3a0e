//! Membership in the bounded subring and its three distinguished subgroups.
//!
//! `x = num/(t^l * p^k)` lies in the bounded subring RBDD when some
//! `num * p^j` has support inside `l + supp(p^{k+j})`. The subgroup RBDD0
//! additionally requires vanishing at zero (`v(x) >= 1`), RBDDINF a strictly
//! negative top weight (`w(x) <= -1`), and RBDD0INF both.
//!
//! The decision procedure layers exact filters in front of the search:
//!
//! * the invariants `v(x) >= 0` and `w(x) <= 0` are necessary because
//!   `supp(p^m)` sits inside `[0, m*deg(p)]`;
//! * every numerator exponent must be `≡ l` modulo the support gcd `g`,
//!   because the class-`c` part of `num * p^j` equals (class-`c` part of
//!   `num`) `* p^j` and never cancels away;
//! * once those pass, exponents compress by `g` and the question reduces to
//!   a support-gcd-1 polynomial. If powers of that polynomial are known to
//!   fill the whole interval `[0, m*deg]` from some level `m0` on (the
//!   coefficients of `p` are nonnegative, so supports grow as exact sumsets
//!   and fullness persists), membership follows from the invariants alone
//!   and the search is complete, even past the configured bound. Otherwise
//!   an exhausted search reports `Unknown`.
//!
//! The support produced by the search criterion is monotone: once the
//! inclusion holds at `j` it holds at `j + 1`, again because supports of
//! powers of `p` are exact sumsets. The first success is therefore the
//! minimal witness.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::descriptor::Symbol;
use crate::locring::LocElem;
use crate::polycore::{CharacterPolynomial, IntPoly};

/// Verdict of a membership test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Membership {
    In { witness_j: u32 },
    NotIn { certificate: ExclusionCertificate },
    Unknown,
}

impl Membership {
    pub fn is_in(&self) -> bool {
        matches!(self, Membership::In { .. })
    }
}

/// Machine-checkable reasons for exclusion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExclusionCertificate {
    /// `v < 0` or `w > 0`; no power of `p` can repair either side.
    Invariant { v: i64, w: i64 },
    /// RBDD0 needs `v >= 1`.
    ConstantTerm { v: i64 },
    /// RBDDINF needs `w <= -1`.
    Degree { w: i64 },
    /// A numerator exponent off the lattice `l + (support gcd) * Z`.
    Residue { exponent: u64, modulus: u64 },
    /// Bounded claim by the brute-force oracle: no witness up to `j_max`.
    SearchExhausted { j_max: u32 },
}

/// The four bounded subrings, keyed the same way as the formal descriptor
/// symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Subring {
    RBdd,
    RBdd0,
    RBddInf,
    RBdd0Inf,
}

impl Subring {
    pub fn symbol(self) -> Symbol {
        match self {
            Subring::RBdd => Symbol::RBdd,
            Subring::RBdd0 => Symbol::RBdd0,
            Subring::RBddInf => Symbol::RBddInf,
            Subring::RBdd0Inf => Symbol::RBdd0Inf,
        }
    }
}

impl std::fmt::Display for Subring {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl std::str::FromStr for Subring {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "RBDD" => Ok(Subring::RBdd),
            "RBDD0" => Ok(Subring::RBdd0),
            "RBDDINF" => Ok(Subring::RBddInf),
            "RBDD0INF" => Ok(Subring::RBdd0Inf),
            other => Err(format!(
                "unknown subring {other:?}; expected RBDD, RBDD0, RBDDINF or RBDD0INF"
            )),
        }
    }
}

/// Dispatches to the membership test for the chosen subring.
pub fn membership(sub: Subring, x: &LocElem) -> Membership {
    match sub {
        Subring::RBdd => in_rbdd(x),
        Subring::RBdd0 => in_rbdd0(x),
        Subring::RBddInf => in_rbdd_inf(x),
        Subring::RBdd0Inf => in_rbdd0_inf(x),
    }
}

pub fn in_rbdd(x: &LocElem) -> Membership {
    if x.is_zero() {
        return Membership::In { witness_j: 0 };
    }
    let v = x.v().unwrap();
    let w = x.w().unwrap();
    if v < 0 || w > 0 {
        return Membership::NotIn {
            certificate: ExclusionCertificate::Invariant { v, w },
        };
    }
    let ring = x.ring();
    let g = ring.support_gcd();
    if g >= 2 {
        for &e in &x.num().support() {
            let diff = e as i64 - x.l() as i64;
            if diff.rem_euclid(g as i64) != 0 {
                return Membership::NotIn {
                    certificate: ExclusionCertificate::Residue {
                        exponent: e as u64,
                        modulus: g,
                    },
                };
            }
        }
        let red = ring.reduced().expect("support gcd >= 2 has a reduction");
        let num = compress_exponents(x.num(), x.l() as usize, g as usize);
        return search(&num, 0, x.k(), &red.p, red.full_from, ring.search_bound());
    }
    search(
        x.num(),
        x.l(),
        x.k(),
        ring.p().poly(),
        ring.full_interval_from(),
        ring.search_bound(),
    )
}

pub fn in_rbdd0(x: &LocElem) -> Membership {
    if x.is_zero() {
        return Membership::In { witness_j: 0 };
    }
    let v = x.v().unwrap();
    if v <= 0 {
        return Membership::NotIn {
            certificate: ExclusionCertificate::ConstantTerm { v },
        };
    }
    in_rbdd(x)
}

pub fn in_rbdd_inf(x: &LocElem) -> Membership {
    if x.is_zero() {
        return Membership::In { witness_j: 0 };
    }
    let w = x.w().unwrap();
    if w >= 0 {
        return Membership::NotIn {
            certificate: ExclusionCertificate::Degree { w },
        };
    }
    in_rbdd(x)
}

pub fn in_rbdd0_inf(x: &LocElem) -> Membership {
    if x.is_zero() {
        return Membership::In { witness_j: 0 };
    }
    if x.v().unwrap() <= 0 {
        return in_rbdd0(x);
    }
    if x.w().unwrap() >= 0 {
        return in_rbdd_inf(x);
    }
    in_rbdd(x)
}

/// Shifts exponents down by `l` and divides them by `g`; the caller has
/// checked that every exponent is `≡ l (mod g)` and `>= l`.
fn compress_exponents(num: &IntPoly, l: usize, g: usize) -> IntPoly {
    let deg = num.degree().expect("nonzero by construction");
    let mut coeffs = vec![BigInt::zero(); (deg - l) / g + 1];
    for e in num.support() {
        coeffs[(e - l) / g] = num.coeff(e);
    }
    IntPoly::new(coeffs)
}

/// The bounded (or, with a full-interval guarantee, complete) witness search
/// for `supp(num * p^j) ⊆ l + supp(p^{k+j})`. Invariant and residue filters
/// have already passed.
fn search(
    num: &IntPoly,
    l: u32,
    k: u32,
    p: &IntPoly,
    full_from: Option<u32>,
    bound: u32,
) -> Membership {
    let limit = match full_from {
        // success is guaranteed once k + j reaches the full-interval onset
        Some(m0) => m0.saturating_sub(k),
        None => bound,
    };
    let psupp = p.support();
    let mut acc = num.clone();
    let mut power_bits = support_bits_of_power(&psupp, k);
    for j in 0..=limit {
        if support_within(&acc, l as usize, &power_bits) {
            return Membership::In { witness_j: j };
        }
        if j < limit {
            acc = &acc * p;
            power_bits = sumset_step(&power_bits, &psupp);
        }
    }
    debug_assert!(full_from.is_none(), "full-interval search cannot exhaust");
    Membership::Unknown
}

/// Is `supp(q) ⊆ l + bits`?
fn support_within(q: &IntPoly, l: usize, bits: &[bool]) -> bool {
    q.support()
        .iter()
        .all(|&e| e >= l && bits.get(e - l).copied().unwrap_or(false))
}

/// Support of `p^m` as a bitset. Exact because `p` has nonnegative
/// coefficients, so no product term ever cancels.
fn support_bits_of_power(psupp: &[usize], m: u32) -> Vec<bool> {
    let mut bits = vec![true];
    for _ in 0..m {
        bits = sumset_step(&bits, psupp);
    }
    bits
}

fn sumset_step(bits: &[bool], psupp: &[usize]) -> Vec<bool> {
    let d = psupp.last().copied().unwrap_or(0);
    let mut next = vec![false; bits.len() + d];
    for &s in psupp {
        for (i, &b) in bits.iter().enumerate() {
            if b {
                next[i + s] = true;
            }
        }
    }
    next
}

/// Support of `p^m` as sorted exponents (exact sumset, see above).
pub fn power_support(p: &CharacterPolynomial, m: u32) -> Vec<usize> {
    support_bits_of_power(&p.support(), m)
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i))
        .collect()
}

/// Exponents appearing at one level of the stationary system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelSupport {
    pub level: u32,
    pub exponents: Vec<usize>,
}

/// Supports of `p^0, ..., p^levels`.
pub fn level_supports(p: &CharacterPolynomial, levels: u32) -> Vec<LevelSupport> {
    let psupp = p.support();
    let mut bits = vec![true];
    let mut out = Vec::with_capacity(levels as usize + 1);
    for level in 0..=levels {
        out.push(LevelSupport {
            level,
            exponents: bits
                .iter()
                .enumerate()
                .filter_map(|(i, &b)| b.then_some(i))
                .collect(),
        });
        if level < levels {
            bits = sumset_step(&bits, &psupp);
        }
    }
    out
}

/// Brute-force reference: expands `num * p^j` and `p^{k+j}` coefficient by
/// coefficient for each `j` up to `j_max`, with none of the filters or
/// incremental shortcuts of [`in_rbdd`]. Exhaustion is reported as a bounded
/// `NotIn(SearchExhausted)` claim, not a proof of exclusion.
pub fn rbdd_oracle(x: &LocElem, j_max: u32) -> Membership {
    if x.is_zero() {
        return Membership::In { witness_j: 0 };
    }
    let p = x.ring().p().poly();
    for j in 0..=j_max {
        let lhs = x.num() * &p.pow(j);
        let rhs = p.pow(x.k() + j);
        let allowed: std::collections::BTreeSet<usize> =
            rhs.support().iter().map(|s| s + x.l() as usize).collect();
        if lhs.support().iter().all(|e| allowed.contains(e)) {
            return Membership::In { witness_j: j };
        }
    }
    Membership::NotIn {
        certificate: ExclusionCertificate::SearchExhausted { j_max },
    }
}

/// Recomputes the inclusion a positive witness claims.
pub fn verify_membership_witness(x: &LocElem, witness_j: u32) -> bool {
    if x.is_zero() {
        return true;
    }
    let p = x.ring().p().poly();
    let lhs = x.num() * &p.pow(witness_j);
    let rhs = p.pow(x.k() + witness_j);
    let allowed: std::collections::BTreeSet<usize> =
        rhs.support().iter().map(|s| s + x.l() as usize).collect();
    lhs.support().iter().all(|e| allowed.contains(e))
}

/// Recomputes the fact an exclusion certificate claims about `x` relative to
/// the subring it was issued for.
pub fn verify_membership_certificate(
    sub: Subring,
    x: &LocElem,
    cert: &ExclusionCertificate,
) -> bool {
    let (Some(v), Some(w)) = (x.v(), x.w()) else {
        return false; // zero is in everything
    };
    match cert {
        ExclusionCertificate::Invariant { v: cv, w: cw } => {
            *cv == v && *cw == w && (v < 0 || w > 0)
        }
        ExclusionCertificate::ConstantTerm { v: cv } => {
            matches!(sub, Subring::RBdd0 | Subring::RBdd0Inf) && *cv == v && v <= 0
        }
        ExclusionCertificate::Degree { w: cw } => {
            matches!(sub, Subring::RBddInf | Subring::RBdd0Inf) && *cw == w && w >= 0
        }
        ExclusionCertificate::Residue { exponent, modulus } => {
            let g = x.ring().support_gcd();
            let e = *exponent as usize;
            *modulus == g
                && g >= 2
                && !x.num().coeff(e).is_zero()
                && (e as i64 - x.l() as i64).rem_euclid(g as i64) != 0
        }
        ExclusionCertificate::SearchExhausted { j_max } => matches!(
            rbdd_oracle(x, *j_max),
            Membership::NotIn {
                certificate: ExclusionCertificate::SearchExhausted { .. }
            }
        ),
    }
}

/// The four endpoint cases of a character polynomial, classified by whether
/// the constant and leading coefficients exceed 1. For constants the two
/// coefficients coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EndpointCase {
    A,
    B,
    C,
    D,
}

pub fn endpoint_case(p: &CharacterPolynomial) -> EndpointCase {
    let a0_big = !p.a0().is_one();
    let ad_big = if p.d() == 0 {
        a0_big
    } else {
        !p.a_d().is_one()
    };
    match (a0_big, ad_big) {
        (true, true) => EndpointCase::A,
        (false, true) => EndpointCase::B,
        (true, false) => EndpointCase::C,
        (false, false) => EndpointCase::D,
    }
}

impl EndpointCase {
    /// The odd-degree coefficient group attached to this case.
    pub fn symbol(self) -> Symbol {
        match self {
            EndpointCase::A => Symbol::RBdd,
            EndpointCase::B => Symbol::RBdd0,
            EndpointCase::C => Symbol::RBddInf,
            EndpointCase::D => Symbol::RBdd0Inf,
        }
    }

    pub fn subring(self) -> Subring {
        match self {
            EndpointCase::A => Subring::RBdd,
            EndpointCase::B => Subring::RBdd0,
            EndpointCase::C => Subring::RBddInf,
            EndpointCase::D => Subring::RBdd0Inf,
        }
    }
}

impl std::fmt::Display for EndpointCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}
