//! Homotopy groups of the unitary groups in the tower, their direct limit,
//! and the automorphism-group table built from them.
//!
//! The level-`k` fixed-point algebra is a direct sum of matrix blocks, so its
//! unitary group is a product of `U(b)` factors, one per block size `b` from
//! the coefficients of `p^k`. In the stable range `m <= 2b - 1` the groups
//! `pi_m(U(b))` are Bott-periodic: `Z` for odd `m`, `0` for even `m`. A size-1
//! block is a circle and is exact at every `m` (only `pi_1` survives).
//! Summands that are neither circles nor stable are reported and excluded,
//! never approximated.
//!
//! In the limit the answer depends only on the endpoint coefficients of `p`,
//! through the case table of [`EndpointCase`]. Degree-0 characters collapse
//! the table to the localization `Z[1/a0]` and its trivial subgroups.

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::bddring::{endpoint_case, power_support, EndpointCase, Subring};
use crate::descriptor::{GroupDescriptor, Symbol, WARN_UNSTABLE_RANGE};
use crate::locring::Ring;
use crate::polycore::{bigint_string, CharacterPolynomial};

/// How one `U(b)` factor relates to the requested degree `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SummandStatus {
    /// `m <= 2b - 1`, Bott periodicity applies.
    Stable,
    /// `b = 1`: a circle, exact in every degree.
    U1,
    /// Outside the stable range; excluded from the descriptor.
    Unstable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Summand {
    pub label: usize,
    #[serde(with = "bigint_string")]
    pub size: BigInt,
    pub status: SummandStatus,
}

/// Per-summand stability report accompanying a finite-level computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StableRangeVerdict {
    pub summands: Vec<Summand>,
}

impl StableRangeVerdict {
    pub fn unstable_labels(&self) -> Vec<usize> {
        self.summands
            .iter()
            .filter(|s| s.status == SummandStatus::Unstable)
            .map(|s| s.label)
            .collect()
    }

    pub fn all_settled(&self) -> bool {
        self.summands
            .iter()
            .all(|s| s.status != SummandStatus::Unstable)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PiUFinite {
    pub level: u32,
    pub m: u32,
    pub group: GroupDescriptor,
    pub verdict: StableRangeVerdict,
}

/// `pi_m` of the unitary group at level `k`: a product over the blocks of
/// `p^k`. Unstable blocks make the descriptor partial and are listed in the
/// warning rather than guessed at.
pub fn pi_u_finite(p: &CharacterPolynomial, k: u32, m: u32) -> PiUFinite {
    let pk = p.poly().pow(k);
    let mut rank = 0u64;
    let mut summands = Vec::new();
    for label in pk.support() {
        let size = pk.coeff(label);
        let status = if size.is_one() {
            SummandStatus::U1
        } else if BigInt::from(m) < (&size << 1) {
            SummandStatus::Stable
        } else {
            SummandStatus::Unstable
        };
        match status {
            SummandStatus::U1 if m == 1 => rank += 1,
            SummandStatus::Stable if m % 2 == 1 => rank += 1,
            _ => {}
        }
        summands.push(Summand {
            label,
            size,
            status,
        });
    }
    let verdict = StableRangeVerdict { summands };
    let mut group = GroupDescriptor::free(rank);
    let unstable = verdict.unstable_labels();
    if !unstable.is_empty() {
        group.partial = true;
        group.push_warning(
            WARN_UNSTABLE_RANGE,
            format!(
                "pi_{m} of blocks at exponents {unstable:?} lies outside the stable range \
                 and is omitted"
            ),
        );
    }
    PiUFinite {
        level: k,
        m,
        group,
        verdict,
    }
}

/// `pi_m` of the unitary group of the limit algebra. Even degrees vanish,
/// `pi_1` is the full bounded subring, and odd degrees from 3 on see only the
/// endpoint behaviour of `p`.
pub fn pi_u_limit(p: &CharacterPolynomial, m: u32) -> GroupDescriptor {
    if m.is_multiple_of(2) {
        return GroupDescriptor::zero();
    }
    if p.d() == 0 {
        // one block per level: the bounded subring is Z[1/a0] and both
        // vanishing conditions kill it outright
        return match (m, endpoint_case(p)) {
            (1, _) | (_, EndpointCase::A) => GroupDescriptor::formal(Symbol::ZLoc(p.a0().clone())),
            _ => GroupDescriptor::zero(),
        };
    }
    if m == 1 {
        return GroupDescriptor::formal(Symbol::RBdd);
    }
    GroupDescriptor::formal(endpoint_case(p).symbol())
}

/// Homotopy of the equivariant automorphism group: positive units in degree
/// 0, nothing in odd degrees, and the unitary limit one degree down in even
/// degrees.
pub fn pi_aut(ring: &Ring, m: u32) -> GroupDescriptor {
    if m == 0 {
        return ring.positive_unit_monoid().descriptor;
    }
    if m % 2 == 1 {
        return GroupDescriptor::zero();
    }
    pi_u_limit(ring.p(), m - 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoefficientRow {
    pub k: i64,
    pub group: GroupDescriptor,
}

/// Coefficients of the classifying cohomology theory: positive degrees
/// vanish, degree 0 carries the positive units, and negative degrees shift
/// into the unitary limit.
pub fn coefficients_table(ring: &Ring, k_min: i64, k_max: i64) -> Vec<CoefficientRow> {
    assert!(k_min <= k_max, "empty degree range");
    (k_min..=k_max)
        .map(|k| {
            let group = match k {
                _ if k > 0 => GroupDescriptor::zero(),
                0 => ring.positive_unit_monoid().descriptor,
                _ => pi_u_limit(ring.p(), (-k - 1) as u32),
            };
            CoefficientRow { k, group }
        })
        .collect()
}

/// Rank of the level-`k` part of one of the four bounded subgroups: the
/// support monomials of `p^k`, minus the constant generator when vanishing
/// at zero is imposed, minus the top generator when decay is imposed (for
/// positive degree; a constant character has only the one generator).
pub fn level_truncation_rank(p: &CharacterPolynomial, sub: Subring, k: u32) -> u64 {
    let base = power_support(p, k).len() as u64;
    let kills_const = matches!(sub, Subring::RBdd0 | Subring::RBdd0Inf) as u64;
    let kills_top = (p.d() >= 1 && matches!(sub, Subring::RBddInf | Subring::RBdd0Inf)) as u64;
    base - kills_const - kills_top
}
