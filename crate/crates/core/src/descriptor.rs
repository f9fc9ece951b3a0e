//! Symbolic descriptions of the abelian groups (and, in degenerate cases,
//! monoids) produced by the calculator.
//!
//! A [`GroupDescriptor`] is a canonical direct-sum form: a free rank, a sorted
//! multiset of finite cyclic orders, and a sorted multiset of formal symbols
//! for the infinite-rank coefficient groups that have no finite presentation
//! ([`Symbol`]). Structural equality of descriptors is equality of the
//! described groups. Descriptors optionally carry a named generator list, a
//! list of warnings, and a `partial` flag meaning the description is a
//! reported generating set or a truncation rather than an asserted group.

use std::collections::BTreeMap;
use std::fmt::{self, Display};

use num_bigint::BigInt;
use num_traits::One;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// Formal summand symbols for the coefficient groups of infinite rank.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    /// The bounded subring, as an abelian group.
    RBdd,
    /// The kernel of evaluation at zero inside the bounded subring.
    RBdd0,
    /// The part of the bounded subring with strictly negative top weight.
    RBddInf,
    /// The intersection of the previous two.
    RBdd0Inf,
    /// `Z[1/a]`; occurs only for constant character polynomials, and `a = 1`
    /// is collapsed into the free part instead.
    ZLoc(BigInt),
    /// `(Z/n) (x) S`: a formal symbol tensored with a finite cyclic group.
    TorsionTensor(u64, Box<Symbol>),
}

impl Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::RBdd => write!(f, "RBDD"),
            Symbol::RBdd0 => write!(f, "RBDD0"),
            Symbol::RBddInf => write!(f, "RBDDINF"),
            Symbol::RBdd0Inf => write!(f, "RBDD0INF"),
            Symbol::ZLoc(a) => write!(f, "Z_LOC({a})"),
            Symbol::TorsionTensor(n, s) => write!(f, "Z/{n}⊗{s}"),
        }
    }
}

/// Warning codes attached to descriptors; the detail string names the
/// offending object.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Warning {
    pub code: String,
    pub detail: String,
}

/// A positivity hypothesis needed for the free-abelian unit description
/// failed; the detail names the non-positive prime factor.
pub const WARN_HYPOTHESIS_VIOLATED: &str = "PAPER_HYPOTHESIS_VIOLATED";
/// A positivity test came back unknown, so no structure is asserted.
pub const WARN_POSITIVITY_UNKNOWN: &str = "POSITIVITY_UNKNOWN";
/// The character polynomial has integer content > 1; the content is itself a
/// positive invertible element but is not part of the reported generator set.
pub const WARN_CONTENT_UNITS_OMITTED: &str = "CONTENT_UNITS_OMITTED";
/// Summands outside the unitary stable range were left out.
pub const WARN_UNSTABLE_RANGE: &str = "UNSTABLE_RANGE";
/// The reported direct sum is the associated graded of a filtration; the
/// extension problems were not resolved for this space.
pub const WARN_ASSOCIATED_GRADED: &str = "ASSOCIATED_GRADED";

impl Warning {
    pub fn new(code: &str, detail: impl Into<String>) -> Self {
        Warning {
            code: code.to_string(),
            detail: detail.into(),
        }
    }
}

impl Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.detail)
    }
}

/// Canonical direct-sum description of a group, see the module docs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroupDescriptor {
    /// Free rank.
    pub z_rank: u64,
    /// Orders of finite cyclic summands, ascending.
    pub torsion: Vec<u64>,
    /// Multiplicities of formal symbols.
    pub formal: BTreeMap<Symbol, u64>,
    /// Optional generator names (free part resp. reported monoid generators).
    pub generators: Option<Vec<String>>,
    pub warnings: Vec<Warning>,
    /// When set, the descriptor is a truncation or an unasserted generating
    /// set rather than a complete group description.
    pub partial: bool,
}

impl GroupDescriptor {
    /// The zero group.
    pub fn zero() -> Self {
        GroupDescriptor::default()
    }

    /// Free abelian group of the given rank, unnamed generators.
    pub fn free(z_rank: u64) -> Self {
        GroupDescriptor {
            z_rank,
            ..Default::default()
        }
    }

    /// Free abelian group on named generators.
    pub fn named_free(generators: Vec<String>) -> Self {
        GroupDescriptor {
            z_rank: generators.len() as u64,
            generators: Some(generators),
            ..Default::default()
        }
    }

    /// A single formal symbol. `ZLoc(1)` collapses to `Z`.
    pub fn formal(symbol: Symbol) -> Self {
        GroupDescriptor::formal_multi(symbol, 1)
    }

    pub fn formal_multi(symbol: Symbol, mult: u64) -> Self {
        let mut d = GroupDescriptor::zero();
        if mult > 0 {
            if let Symbol::ZLoc(a) = &symbol {
                if a.is_one() {
                    d.z_rank = mult;
                    return d;
                }
            }
            d.formal.insert(symbol, mult);
        }
        d
    }

    pub fn is_zero(&self) -> bool {
        self.z_rank == 0 && self.torsion.is_empty() && self.formal.is_empty()
    }

    /// Direct sum in place. Generator names survive only if both sides have
    /// them; warnings and partiality accumulate.
    pub fn absorb(&mut self, other: GroupDescriptor) {
        self.z_rank += other.z_rank;
        self.torsion.extend(other.torsion);
        self.torsion.sort_unstable();
        for (sym, mult) in other.formal {
            *self.formal.entry(sym).or_insert(0) += mult;
        }
        self.generators = match (self.generators.take(), other.generators) {
            (Some(mut a), Some(b)) => {
                a.extend(b);
                Some(a)
            }
            _ => None,
        };
        self.warnings.extend(other.warnings);
        self.partial |= other.partial;
    }

    pub fn direct_sum(mut self, other: GroupDescriptor) -> GroupDescriptor {
        self.absorb(other);
        self
    }

    /// `self^mult` as a direct sum; drops generator names unless `mult == 1`.
    pub fn times(&self, mult: u64) -> GroupDescriptor {
        if mult == 1 {
            return self.clone();
        }
        let mut d = GroupDescriptor::zero();
        d.z_rank = self.z_rank * mult;
        for _ in 0..mult {
            d.torsion.extend(self.torsion.iter().copied());
        }
        d.torsion.sort_unstable();
        for (sym, m) in &self.formal {
            if mult > 0 {
                d.formal.insert(sym.clone(), m * mult);
            }
        }
        d.warnings = self.warnings.clone();
        d.partial = self.partial;
        d
    }

    /// `(Z/order) (x) self` for torsion-free `self` (which every descriptor
    /// built here is): free rank becomes torsion, symbols become torsion
    /// tensors.
    pub fn torsion_tensor(&self, order: u64) -> GroupDescriptor {
        let mut d = GroupDescriptor::zero();
        d.torsion = vec![order; self.z_rank as usize];
        for (sym, m) in &self.formal {
            d.formal
                .insert(Symbol::TorsionTensor(order, Box::new(sym.clone())), *m);
        }
        d.warnings = self.warnings.clone();
        d.partial = self.partial;
        d
    }

    pub fn push_warning(&mut self, code: &str, detail: impl Into<String>) {
        self.warnings.push(Warning::new(code, detail));
    }

    /// Equality of the described group, ignoring names, warnings and flags.
    pub fn same_group(&self, other: &GroupDescriptor) -> bool {
        self.z_rank == other.z_rank && self.torsion == other.torsion && self.formal == other.formal
    }
}

impl Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.z_rank == 1 {
            parts.push("Z".to_string());
        } else if self.z_rank > 1 {
            parts.push(format!("Z^{}", self.z_rank));
        }
        for n in &self.torsion {
            parts.push(format!("Z/{n}"));
        }
        for (sym, mult) in &self.formal {
            if *mult == 1 {
                parts.push(sym.to_string());
            } else {
                parts.push(format!("{sym}^{mult}"));
            }
        }
        if parts.is_empty() {
            if let Some(gens) = &self.generators {
                write!(f, "generated by ({})", gens.join(", "))?;
                if self.partial {
                    write!(f, " [structure not asserted]")?;
                }
                return Ok(());
            }
            write!(f, "0")?;
            return Ok(());
        }
        write!(f, "{}", parts.join(" ⊕ "))?;
        if let Some(gens) = &self.generators {
            write!(f, " on ({})", gens.join(", "))?;
        }
        if self.partial {
            write!(f, " [partial]")?;
        }
        Ok(())
    }
}

impl Serialize for GroupDescriptor {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("GroupDescriptor", 6)?;
        st.serialize_field("z_rank", &self.z_rank)?;
        st.serialize_field("torsion", &self.torsion)?;
        let formal: BTreeMap<String, u64> = self
            .formal
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect();
        st.serialize_field("formal", &formal)?;
        st.serialize_field("generators", &self.generators)?;
        st.serialize_field("warnings", &self.warnings)?;
        st.serialize_field("partial", &self.partial)?;
        st.end()
    }
}
