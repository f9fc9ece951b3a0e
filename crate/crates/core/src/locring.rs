//! The localized representation ring `Z[t, 1/t, 1/p]` for a character
//! polynomial `p`, its positive cone, and its unit group.
//!
//! Elements are stored as fractions `num / (t^l * p^k)` in a canonical form:
//! zero is `0/1`, the numerator shares no factor `t` with the denominator
//! unless `l = 0`, and no factor `p` unless `k = 0`. Canonicalization first
//! cancels powers of `t` and then powers of `p`; because `p(0) != 0`, the
//! first step can never re-enable the second, so one pass over each suffices
//! and the representative is unique. Consequently the valuation
//! `v(x) = val(num) - l` and the top weight `w(x) = deg(num) - l - k*deg(p)`
//! do not depend on the representative.
//!
//! An element is *positive* when some `num * p^j` has only nonnegative
//! coefficients. Failure is certified in one of two machine-checkable ways:
//! a residue class of exponents modulo the gcd of the support of `p` whose
//! numerator coefficients are all `<= 0` (multiplication by `p` never mixes
//! classes, so the defect persists for every `j`), or a positive dyadic point
//! where the numerator is negative (powers of `p` are nonnegative on the
//! positive axis, so no power clears the sign). When neither the bounded
//! search nor a certificate settles the question the verdict is `Unknown`.

use std::cmp::Ordering;
use std::fmt::{self, Display};
use std::ops::Deref;
use std::sync::{Arc, OnceLock};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::descriptor::{
    GroupDescriptor, WARN_CONTENT_UNITS_OMITTED, WARN_HYPOTHESIS_VIOLATED, WARN_POSITIVITY_UNKNOWN,
};
use crate::factorint::{factor_with_cap, FactorError, Factorization, DEFAULT_DEGREE_CAP};
use crate::polycore::{bigint_string, parse_poly, CharacterPolynomial, IntPoly, PolyError};

/// Default number of powers of `p` tried before positivity and membership
/// searches give up.
pub const DEFAULT_SEARCH_BOUND: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocringError {
    #[error("elements belong to rings with different character polynomials")]
    ContextMismatch,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("invalid element: {msg} (at byte {pos})")]
    Element { pos: usize, msg: String },
    #[error("invalid unit exponents: {0}")]
    InvalidUnit(String),
}

fn element_err(pos: usize, msg: impl Into<String>) -> LocringError {
    LocringError::Element {
        pos,
        msg: msg.into(),
    }
}

/// Tunable limits for a ring context.
#[derive(Debug, Clone, Copy)]
pub struct RingOptions {
    pub search_bound: u32,
    pub degree_cap: usize,
}

impl Default for RingOptions {
    fn default() -> Self {
        RingOptions {
            search_bound: DEFAULT_SEARCH_BOUND,
            degree_cap: DEFAULT_DEGREE_CAP,
        }
    }
}

/// Shared immutable data of one localized ring: the character polynomial,
/// its factorization, and precomputed support facts.
#[derive(Debug)]
pub struct RingContext {
    p: CharacterPolynomial,
    factorization: Factorization,
    search_bound: u32,
    /// gcd of the support of `p`; `0` exactly when `p` is constant.
    support_gcd: u64,
    /// Least `m >= 1` with `supp(p^m) = [0, m*deg(p)]`, when that ever
    /// happens (`Some(0)` for constant `p`, where the interval is trivial).
    full_interval_from: Option<u32>,
    /// Exponent compression by the support gcd, built on first use.
    reduced: OnceLock<Option<ReducedData>>,
}

/// `p` with exponents divided by the support gcd `g >= 2`, plus its own
/// full-interval onset. Membership questions whose numerator support lies in
/// `l + gZ` reduce to this polynomial exactly.
#[derive(Debug)]
pub(crate) struct ReducedData {
    pub(crate) p: IntPoly,
    pub(crate) full_from: Option<u32>,
}

/// Cheaply clonable handle to a [`RingContext`].
#[derive(Clone)]
pub struct Ring(Arc<RingContext>);

impl Deref for Ring {
    type Target = RingContext;
    fn deref(&self) -> &RingContext {
        &self.0
    }
}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring(p = {})", self.0.p)
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.p == other.0.p
    }
}
impl Eq for Ring {}

impl Ring {
    pub fn new(p: CharacterPolynomial) -> Result<Ring, FactorError> {
        Ring::with_options(p, RingOptions::default())
    }

    pub fn with_options(p: CharacterPolynomial, opts: RingOptions) -> Result<Ring, FactorError> {
        let factorization = factor_with_cap(p.poly(), opts.degree_cap)?;
        let support_gcd = p.support().iter().fold(0u64, |g, &e| g.gcd(&(e as u64)));
        let full_interval_from = full_interval_from(p.poly());
        Ok(Ring(Arc::new(RingContext {
            p,
            factorization,
            search_bound: opts.search_bound,
            support_gcd,
            full_interval_from,
            reduced: OnceLock::new(),
        })))
    }

    /// Builds the canonical element `num / (t^l * p^k)`.
    pub fn element(&self, mut num: IntPoly, mut l: u32, mut k: u32) -> LocElem {
        if num.is_zero() {
            return LocElem {
                ring: self.clone(),
                num,
                l: 0,
                k: 0,
            };
        }
        let cancel = (num.val().unwrap() as u64).min(l as u64) as u32;
        if cancel > 0 {
            num = num.div_t_pow(cancel as usize).unwrap();
            l -= cancel;
        }
        while k > 0 {
            match num.div_exact(self.p.poly()) {
                Some(q) => {
                    num = q;
                    k -= 1;
                }
                None => break,
            }
        }
        LocElem {
            ring: self.clone(),
            num,
            l,
            k,
        }
    }

    pub fn zero(&self) -> LocElem {
        self.element(IntPoly::zero(), 0, 0)
    }

    pub fn one(&self) -> LocElem {
        self.element(IntPoly::one(), 0, 0)
    }

    /// Rebuilds an element from its serialized parts.
    pub fn attach(&self, data: LocElemData) -> LocElem {
        self.element(data.num, data.l, data.k)
    }

    /// Parses `num[/denominator]` where the denominator is a product of
    /// factors `t[^e]` and `(q)[^e]` with `q` equal to the character
    /// polynomial; the numerator may be a Laurent polynomial.
    pub fn parse_element(&self, text: &str) -> Result<LocElem, LocringError> {
        let (num_part, den_part) = split_fraction(text)?;
        let (stripped, off) = strip_outer_parens(num_part);
        let lp = parse_poly(stripped).map_err(|e| shift_poly_err(e, off))?;
        let (mut l, mut k) = (0u32, 0u32);
        if let Some((den, den_off)) = den_part {
            let (dl, dk) = self.parse_denominator(den, den_off)?;
            l = dl;
            k = dk;
        }
        let (num, extra_l) = if lp.is_zero() {
            (IntPoly::zero(), 0u32)
        } else if lp.offset() >= 0 {
            (lp.base().mul_t_pow(lp.offset() as usize), 0)
        } else {
            let shift = u32::try_from(-lp.offset())
                .map_err(|_| element_err(0, "numerator exponent out of range"))?;
            (lp.base().clone(), shift)
        };
        let l = l
            .checked_add(extra_l)
            .ok_or_else(|| element_err(0, "denominator exponent too large"))?;
        Ok(self.element(num, l, k))
    }

    fn parse_denominator(&self, den: &str, base: usize) -> Result<(u32, u32), LocringError> {
        let bytes = den.as_bytes();
        let mut i = 0usize;
        let (mut l, mut k) = (0u64, 0u64);
        let mut any = false;
        while i < bytes.len() {
            while i < bytes.len() && (bytes[i].is_ascii_whitespace() || bytes[i] == b'*') {
                i += 1;
            }
            if i >= bytes.len() {
                break;
            }
            let at = base + i;
            if bytes[i] == b't' {
                i += 1;
                l += parse_exponent(den, &mut i, base)? as u64;
            } else if bytes[i] == b'(' {
                let close = matching_paren(bytes, i)
                    .ok_or_else(|| element_err(at, "unbalanced parentheses"))?;
                let inner = &den[i + 1..close];
                let q = parse_poly(inner).map_err(|e| shift_poly_err(e, base + i + 1))?;
                if q.offset() != 0 || q.base() != self.p.poly() {
                    return Err(element_err(
                        at,
                        format!(
                            "denominator polynomial must equal the character polynomial {}",
                            self.p
                        ),
                    ));
                }
                i = close + 1;
                k += parse_exponent(den, &mut i, base)? as u64;
            } else if bytes[i].is_ascii_digit() {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let value: BigInt = den[start..i].parse().unwrap();
                if self.p.d() != 0 || value != *self.p.a0() {
                    return Err(element_err(
                        at,
                        format!(
                            "denominator factor must be t or the character polynomial {}",
                            self.p
                        ),
                    ));
                }
                k += parse_exponent(den, &mut i, base)? as u64;
            } else {
                return Err(element_err(at, "expected denominator factor t or (...)"));
            }
            any = true;
        }
        if !any {
            return Err(element_err(base, "empty denominator"));
        }
        let l =
            u32::try_from(l).map_err(|_| element_err(base, "denominator exponent too large"))?;
        let k =
            u32::try_from(k).map_err(|_| element_err(base, "denominator exponent too large"))?;
        Ok((l, k))
    }

    pub fn p(&self) -> &CharacterPolynomial {
        &self.p
    }

    pub fn factorization(&self) -> &Factorization {
        &self.factorization
    }

    /// The distinct primitive irreducible factors of `p`.
    pub fn primes(&self) -> Vec<&IntPoly> {
        self.factorization.distinct_primes()
    }

    pub fn content(&self) -> &BigInt {
        &self.factorization.content
    }

    pub fn search_bound(&self) -> u32 {
        self.search_bound
    }

    pub fn support_gcd(&self) -> u64 {
        self.support_gcd
    }

    pub fn full_interval_from(&self) -> Option<u32> {
        self.full_interval_from
    }

    pub(crate) fn reduced(&self) -> Option<&ReducedData> {
        self.reduced
            .get_or_init(|| {
                if self.support_gcd < 2 {
                    return None;
                }
                let g = self.support_gcd as usize;
                let d = self.p.d();
                let p = IntPoly::new((0..=d / g).map(|i| self.p.poly().coeff(i * g)).collect());
                let full_from = full_interval_from(&p);
                Some(ReducedData { p, full_from })
            })
            .as_ref()
    }

    /// `p / primes[i]`, the numerator of the inverse of the i-th prime.
    pub fn prime_complement(&self, i: usize) -> IntPoly {
        self.p
            .poly()
            .div_exact(&self.factorization.factors[i].poly)
            .expect("factor divides the character polynomial")
    }

    /// Certifies non-positivity of a numerator through one residue class of
    /// exponents, if such a class exists. Sound for every power of `p`: with
    /// `g = gcd(supp p)`, `supp(p^j)` stays inside `gZ`, so the class-`c`
    /// part of `num * p^j` is `(class-c part of num) * p^j`.
    fn residue_certificate(&self, num: &IntPoly) -> Option<NegativityCertificate> {
        let g = self.support_gcd;
        if g == 0 {
            for (e, c) in num.coeffs().iter().enumerate() {
                if c.sign() == Sign::Minus {
                    return Some(NegativityCertificate::ResidueClass {
                        modulus: 0,
                        class: e as u64,
                        exponents: vec![e as u64],
                    });
                }
            }
            return None;
        }
        for class in 0..g {
            let mut any_neg = false;
            let mut any_pos = false;
            let mut exponents = Vec::new();
            for (e, c) in num.coeffs().iter().enumerate() {
                if c.is_zero() || (e as u64) % g != class {
                    continue;
                }
                exponents.push(e as u64);
                match c.sign() {
                    Sign::Minus => any_neg = true,
                    _ => any_pos = true,
                }
            }
            if any_neg && !any_pos {
                return Some(NegativityCertificate::ResidueClass {
                    modulus: g,
                    class,
                    exponents,
                });
            }
        }
        None
    }

    /// The full unit group `{±1} x t^Z x prod primes^Z` of the localized
    /// ring, reported on the prime generators. When `p` has integer content
    /// `> 1` the content primes are invertible too but stay out of the
    /// reported lattice; a warning records the omission.
    pub fn unit_group(&self) -> GroupDescriptor {
        let mut gens = vec!["-1".to_string(), "t".to_string()];
        for q in self.primes() {
            gens.push(q.to_string());
        }
        let mut d = GroupDescriptor {
            z_rank: 1 + self.primes().len() as u64,
            torsion: vec![2],
            generators: Some(gens),
            ..Default::default()
        };
        self.warn_content(&mut d);
        d
    }

    /// The group (or, on failure, a reported generating monoid) of positive
    /// units, together with the positivity checks performed on each prime
    /// factor of `p` and on its inverse.
    pub fn positive_unit_monoid(&self) -> PositiveUnitMonoid {
        let mut checks = Vec::new();
        for i in 0..self.factorization.factors.len() {
            let q = self.factorization.factors[i].poly.clone();
            let positivity = self.element(q.clone(), 0, 0).is_positive();
            let inverse_positivity = self.element(self.prime_complement(i), 0, 1).is_positive();
            checks.push(PrimePositivity {
                prime: q,
                positivity,
                inverse_positivity,
            });
        }
        let all_two_sided = checks.iter().all(|c| {
            matches!(c.positivity, Positivity::Positive { .. })
                && matches!(c.inverse_positivity, Positivity::Positive { .. })
        });
        let mut descriptor = if all_two_sided {
            let mut gens = vec!["t".to_string()];
            gens.extend(checks.iter().map(|c| c.prime.to_string()));
            GroupDescriptor::named_free(gens)
        } else {
            let mut gens = vec!["t^±1".to_string()];
            let mut d = GroupDescriptor {
                partial: true,
                ..Default::default()
            };
            for c in &checks {
                match (&c.positivity, &c.inverse_positivity) {
                    (Positivity::Positive { .. }, Positivity::Positive { .. }) => {
                        gens.push(format!("({})^±1", c.prime));
                    }
                    (Positivity::Positive { .. }, _) => {
                        gens.push(format!("({})", c.prime));
                    }
                    _ => {}
                }
                match &c.positivity {
                    Positivity::NotPositive { certificate } => d.push_warning(
                        WARN_HYPOTHESIS_VIOLATED,
                        format!(
                            "prime factor {} of the character polynomial is not positive ({certificate})",
                            c.prime
                        ),
                    ),
                    Positivity::Unknown => d.push_warning(
                        WARN_POSITIVITY_UNKNOWN,
                        format!(
                            "positivity of prime factor {} is undecided within search bound {}",
                            c.prime, self.search_bound
                        ),
                    ),
                    Positivity::Positive { .. } => match &c.inverse_positivity {
                        Positivity::NotPositive { certificate } => d.push_warning(
                            WARN_HYPOTHESIS_VIOLATED,
                            format!(
                                "inverse of prime factor {} is not positive: its numerator {} admits no nonnegative expansion ({certificate})",
                                c.prime,
                                self.p
                                    .poly()
                                    .div_exact(&c.prime)
                                    .expect("factor divides the character polynomial"),
                            ),
                        ),
                        Positivity::Unknown => d.push_warning(
                            WARN_POSITIVITY_UNKNOWN,
                            format!(
                                "positivity of the inverse of prime factor {} is undecided within search bound {}",
                                c.prime, self.search_bound
                            ),
                        ),
                        Positivity::Positive { .. } => {}
                    },
                }
            }
            gens.push(format!("({})^±1", self.p));
            d.generators = Some(gens);
            d
        };
        self.warn_content(&mut descriptor);
        PositiveUnitMonoid { descriptor, checks }
    }

    fn warn_content(&self, d: &mut GroupDescriptor) {
        if !self.content().is_one() {
            d.push_warning(
                WARN_CONTENT_UNITS_OMITTED,
                format!(
                    "the integer content {} of the character polynomial is an invertible positive element not included in the generator list",
                    self.content()
                ),
            );
        }
    }
}

fn shift_poly_err(e: PolyError, off: usize) -> LocringError {
    match e {
        PolyError::Parse { pos, msg } => LocringError::Poly(PolyError::Parse {
            pos: pos + off,
            msg,
        }),
        other => LocringError::Poly(other),
    }
}

fn matching_paren(bytes: &[u8], open: usize) -> Option<usize> {
    let mut depth = 0i64;
    for (i, &c) in bytes.iter().enumerate().skip(open) {
        match c {
            b'(' => depth += 1,
            b')' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

fn parse_exponent(s: &str, i: &mut usize, base: usize) -> Result<u32, LocringError> {
    let bytes = s.as_bytes();
    if *i >= bytes.len() || bytes[*i] != b'^' {
        return Ok(1);
    }
    *i += 1;
    if *i < bytes.len() && bytes[*i] == b'-' {
        return Err(element_err(
            base + *i,
            "negative exponents are not allowed in the denominator",
        ));
    }
    let start = *i;
    while *i < bytes.len() && bytes[*i].is_ascii_digit() {
        *i += 1;
    }
    if start == *i {
        return Err(element_err(base + start, "expected exponent digits"));
    }
    s[start..*i]
        .parse::<u32>()
        .map_err(|_| element_err(base + start, "exponent too large"))
}

/// Numerator text plus the optional denominator text with its byte offset.
type FractionParts<'a> = (&'a str, Option<(&'a str, usize)>);

fn split_fraction(text: &str) -> Result<FractionParts<'_>, LocringError> {
    let bytes = text.as_bytes();
    let mut depth = 0i64;
    let mut slash = None;
    for (i, &c) in bytes.iter().enumerate() {
        match c {
            b'(' => depth += 1,
            b')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(element_err(i, "unbalanced parentheses"));
                }
            }
            b'/' if depth == 0 => {
                if slash.is_some() {
                    return Err(element_err(i, "more than one top-level '/'"));
                }
                slash = Some(i);
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(element_err(text.len(), "unbalanced parentheses"));
    }
    match slash {
        None => Ok((text, None)),
        Some(i) => Ok((&text[..i], Some((&text[i + 1..], i + 1)))),
    }
}

/// Strips matched whole-string parentheses, returning the inner slice and
/// its byte offset within the input.
fn strip_outer_parens(s: &str) -> (&str, usize) {
    let mut out = s;
    let mut off = 0usize;
    loop {
        let trimmed = out.trim_start();
        off += out.len() - trimmed.len();
        out = trimmed.trim_end();
        let bytes = out.as_bytes();
        if bytes.len() >= 2 && bytes[0] == b'(' && matching_paren(bytes, 0) == Some(bytes.len() - 1)
        {
            out = &out[1..bytes.len() - 1];
            off += 1;
            continue;
        }
        return (out, off);
    }
}

/// Detects the least `m >= 1` with `supp(p^m) = [0, m*deg(p)]`. Once true
/// the property persists: `[0, md] + supp(p)` has no gaps because `0` and
/// `d` are in the support and `md >= d - 1`. A bottom gap requires
/// `1 in supp(p)` (sums of larger exponents never produce 1) and a top gap
/// symmetrically requires `d - 1`, so anything failing those simple tests is
/// rejected outright; polynomials passing them fill up after a small number
/// of steps, well inside the work budget.
pub(crate) fn full_interval_from(p: &IntPoly) -> Option<u32> {
    let d = p.degree().expect("character polynomial is nonzero");
    if d == 0 {
        return Some(0);
    }
    let supp = p.support();
    if d >= 2 && (!supp.contains(&1) || !supp.contains(&(d - 1))) {
        return None;
    }
    let mut budget: u64 = 50_000_000;
    let mut cur = vec![true];
    for m in 1..=1024u32 {
        let md = m as usize * d;
        let work = (md as u64 + 1) * supp.len() as u64;
        if work > budget {
            return None;
        }
        budget -= work;
        let mut next = vec![false; md + 1];
        for &s in &supp {
            for (i, &b) in cur.iter().enumerate() {
                if b {
                    next[i + s] = true;
                }
            }
        }
        if next.iter().all(|&b| b) {
            return Some(m);
        }
        cur = next;
    }
    None
}

// ---------------------------------------------------------------------------
// Elements
// ---------------------------------------------------------------------------

/// Canonical fraction `num / (t^l * p^k)`; see the module docs.
#[derive(Clone)]
pub struct LocElem {
    ring: Ring,
    num: IntPoly,
    l: u32,
    k: u32,
}

/// Serialized form of an element, without its ring.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocElemData {
    pub num: IntPoly,
    pub l: u32,
    pub k: u32,
}

impl LocElem {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn num(&self) -> &IntPoly {
        &self.num
    }

    /// Exponent of `t` in the denominator.
    pub fn l(&self) -> u32 {
        self.l
    }

    /// Exponent of `p` in the denominator.
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn data(&self) -> LocElemData {
        LocElemData {
            num: self.num.clone(),
            l: self.l,
            k: self.k,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.l == 0 && self.k == 0 && self.num == IntPoly::one()
    }

    /// `val(num) - l`; `None` for zero.
    pub fn v(&self) -> Option<i64> {
        self.num.val().map(|v| v as i64 - self.l as i64)
    }

    /// `deg(num) - l - k * deg(p)`; `None` for zero.
    pub fn w(&self) -> Option<i64> {
        self.num
            .degree()
            .map(|d| d as i64 - self.l as i64 - self.k as i64 * self.ring.p.d() as i64)
    }

    fn check_ring(&self, other: &LocElem) -> Result<(), LocringError> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(LocringError::ContextMismatch)
        }
    }

    pub fn add(&self, other: &LocElem) -> Result<LocElem, LocringError> {
        self.check_ring(other)?;
        let l = self.l.max(other.l);
        let k = self.k.max(other.k);
        let p = self.ring.p.poly();
        let a = &self.num.mul_t_pow((l - self.l) as usize) * &p.pow(k - self.k);
        let b = &other.num.mul_t_pow((l - other.l) as usize) * &p.pow(k - other.k);
        Ok(self.ring.element(&a + &b, l, k))
    }

    pub fn sub(&self, other: &LocElem) -> Result<LocElem, LocringError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LocElem {
        LocElem {
            ring: self.ring.clone(),
            num: -&self.num,
            l: self.l,
            k: self.k,
        }
    }

    pub fn mul(&self, other: &LocElem) -> Result<LocElem, LocringError> {
        self.check_ring(other)?;
        Ok(self.ring.element(
            &self.num * &other.num,
            self.l
                .checked_add(other.l)
                .expect("denominator exponent overflow"),
            self.k
                .checked_add(other.k)
                .expect("denominator exponent overflow"),
        ))
    }

    pub fn pow(&self, exp: u32) -> LocElem {
        let mut acc = self.ring.one();
        for _ in 0..exp {
            acc = acc.mul(self).unwrap();
        }
        acc
    }

    /// Equality by cross-multiplication, independent of canonical forms.
    pub fn eq_elem(&self, other: &LocElem) -> Result<bool, LocringError> {
        self.check_ring(other)?;
        let p = self.ring.p.poly();
        let lhs = &self.num.mul_t_pow(other.l as usize) * &p.pow(other.k);
        let rhs = &other.num.mul_t_pow(self.l as usize) * &p.pow(self.k);
        Ok(lhs == rhs)
    }

    /// Decides membership in the positive cone: is some `num * p^j`
    /// coefficientwise nonnegative? See the module docs for the certificate
    /// semantics of the negative answer.
    pub fn is_positive(&self) -> Positivity {
        self.is_positive_with_bound(self.ring.search_bound)
    }

    pub fn is_positive_with_bound(&self, bound: u32) -> Positivity {
        if self.num.is_zero() {
            return Positivity::Positive { witness_j: 0 };
        }
        let p = self.ring.p.poly();
        let mut acc = self.num.clone();
        for j in 0..=bound {
            if acc.is_nonnegative() {
                return Positivity::Positive { witness_j: j };
            }
            if j < bound {
                acc = &acc * p;
            }
        }
        if let Some(certificate) = self.ring.residue_certificate(&self.num) {
            return Positivity::NotPositive { certificate };
        }
        if let Some((a, s)) = realroots::find_negative_point(&self.num) {
            return Positivity::NotPositive {
                certificate: NegativityCertificate::RealPoint {
                    point_num: a,
                    point_log2_den: s,
                },
            };
        }
        Positivity::Unknown
    }

    /// Decomposes a unit as `sign * (content_num/content_den) * t^t_exp *
    /// prod primes[i]^prime_exps[i]`, or `None` when the element is not
    /// invertible. The content fraction is `1` unless the character
    /// polynomial has integer content `> 1`.
    pub fn is_unit(&self) -> Option<UnitExponents> {
        if self.num.is_zero() {
            return None;
        }
        let sign: i8 = if self.num.lead().unwrap().sign() == Sign::Minus {
            -1
        } else {
            1
        };
        let mut rest = if sign < 0 {
            -&self.num
        } else {
            self.num.clone()
        };
        let t_val = rest.val().unwrap();
        if t_val > 0 {
            rest = rest.div_t_pow(t_val).unwrap();
        }
        let mut exps = Vec::with_capacity(self.ring.factorization.factors.len());
        for f in &self.ring.factorization.factors {
            let mut e = 0i64;
            while let Some(q) = rest.div_exact(&f.poly) {
                rest = q;
                e += 1;
            }
            exps.push(e);
        }
        if rest.degree() != Some(0) {
            return None;
        }
        let residual = rest.coeff(0);
        let denom = self.ring.content().pow(self.k);
        let g = residual.gcd(&denom);
        let content_num = &residual / &g;
        let content_den = denom / g;
        if !is_smooth_wrt(&content_num, self.ring.content()) {
            return None;
        }
        for (e, f) in exps.iter_mut().zip(&self.ring.factorization.factors) {
            *e -= self.k as i64 * f.mult as i64;
        }
        Some(UnitExponents {
            sign,
            t_exp: t_val as i64 - self.l as i64,
            prime_exps: exps,
            content_num,
            content_den,
        })
    }
}

/// Is every prime factor of `x` a factor of `c`?
fn is_smooth_wrt(x: &BigInt, c: &BigInt) -> bool {
    let mut x = x.clone();
    loop {
        if x.is_one() {
            return true;
        }
        let g = x.gcd(c);
        if g.is_one() {
            return false;
        }
        while (&x % &g).is_zero() {
            x = &x / &g;
        }
    }
}

impl PartialEq for LocElem {
    fn eq(&self, other: &Self) -> bool {
        self.eq_elem(other).unwrap_or(false)
    }
}
impl Eq for LocElem {}

impl Display for LocElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.l == 0 && self.k == 0 {
            return write!(f, "{}", self.num);
        }
        if self.num.support().len() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        write!(f, "/")?;
        if self.l > 0 {
            write!(f, "t")?;
            if self.l > 1 {
                write!(f, "^{}", self.l)?;
            }
        }
        if self.k > 0 {
            write!(f, "({})", self.ring.p)?;
            if self.k > 1 {
                write!(f, "^{}", self.k)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LocElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LocElem({} over p = {})", self, self.ring.p)
    }
}

impl Serialize for LocElem {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("LocElem", 3)?;
        st.serialize_field("num", &self.num)?;
        st.serialize_field("l", &self.l)?;
        st.serialize_field("k", &self.k)?;
        st.end()
    }
}

// ---------------------------------------------------------------------------
// Positivity
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Positivity {
    Positive { witness_j: u32 },
    NotPositive { certificate: NegativityCertificate },
    Unknown,
}

impl Display for Positivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Positivity::Positive { witness_j } => write!(f, "positive (witness j = {witness_j})"),
            Positivity::NotPositive { certificate } => write!(f, "not positive ({certificate})"),
            Positivity::Unknown => write!(f, "unknown"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NegativityCertificate {
    /// The numerator is negative at the positive point `point_num /
    /// 2^point_log2_den`, where every power of `p` is nonnegative.
    RealPoint {
        #[serde(with = "bigint_string")]
        point_num: BigInt,
        point_log2_den: u32,
    },
    /// Numerator coefficients at exponents `≡ class (mod modulus)` are all
    /// `<= 0` with at least one `< 0`; multiplication by `p` maps the class
    /// into itself. `modulus = 0` (constant `p`) pins a single exponent.
    ResidueClass {
        modulus: u64,
        class: u64,
        exponents: Vec<u64>,
    },
}

impl Display for NegativityCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NegativityCertificate::RealPoint {
                point_num,
                point_log2_den,
            } => {
                if *point_log2_den == 0 {
                    write!(f, "negative value at t = {point_num}")
                } else {
                    write!(f, "negative value at t = {point_num}/2^{point_log2_den}")
                }
            }
            NegativityCertificate::ResidueClass {
                modulus,
                class,
                exponents,
            } => write!(
                f,
                "exponents ≡ {class} (mod {modulus}) carry only non-positive coefficients (at {exponents:?})"
            ),
        }
    }
}

/// Recomputes the fact a certificate claims about the element's numerator.
pub fn verify_negativity_certificate(x: &LocElem, cert: &NegativityCertificate) -> bool {
    let num = x.num();
    match cert {
        NegativityCertificate::RealPoint {
            point_num,
            point_log2_den,
        } => {
            point_num.sign() == Sign::Plus
                && num.sign_at_dyadic(point_num, *point_log2_den) == Ordering::Less
        }
        NegativityCertificate::ResidueClass {
            modulus,
            class,
            exponents,
        } => {
            if *modulus != x.ring().support_gcd() {
                return false;
            }
            let mut any_neg = false;
            for (e, c) in num.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let in_class = if *modulus == 0 {
                    e as u64 == *class
                } else {
                    (e as u64) % modulus == *class
                };
                if in_class {
                    if c.sign() == Sign::Plus {
                        return false;
                    }
                    any_neg = true;
                    if !exponents.contains(&(e as u64)) {
                        return false;
                    }
                }
            }
            any_neg
        }
    }
}

// ---------------------------------------------------------------------------
// Units
// ---------------------------------------------------------------------------

/// `sign * (content_num/content_den) * t^t_exp * prod primes[i]^prime_exps[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitExponents {
    pub sign: i8,
    pub t_exp: i64,
    pub prime_exps: Vec<i64>,
    #[serde(with = "bigint_string")]
    pub content_num: BigInt,
    #[serde(with = "bigint_string")]
    pub content_den: BigInt,
}

impl Display for UnitExponents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.content_num.is_one() || !self.content_den.is_one() {
            if self.content_den.is_one() {
                parts.push(format!("{}", self.content_num));
            } else {
                parts.push(format!("{}/{}", self.content_num, self.content_den));
            }
        }
        if self.t_exp != 0 {
            parts.push(if self.t_exp == 1 {
                "t".to_string()
            } else {
                format!("t^{}", self.t_exp)
            });
        }
        for (i, e) in self.prime_exps.iter().enumerate() {
            if *e != 0 {
                parts.push(format!("p{i}^{e}"));
            }
        }
        let body = if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(" * ")
        };
        write!(f, "{}{}", if self.sign < 0 { "-" } else { "" }, body)
    }
}

/// Rebuilds the unit described by `ux` in the given ring; inverse to
/// [`LocElem::is_unit`].
pub fn from_exponents(ring: &Ring, ux: &UnitExponents) -> Result<LocElem, LocringError> {
    if ux.sign != 1 && ux.sign != -1 {
        return Err(LocringError::InvalidUnit("sign must be ±1".into()));
    }
    if ux.prime_exps.len() != ring.factorization().factors.len() {
        return Err(LocringError::InvalidUnit(format!(
            "expected {} prime exponents, got {}",
            ring.factorization().factors.len(),
            ux.prime_exps.len()
        )));
    }
    if ux.content_num.sign() != Sign::Plus || ux.content_den.sign() != Sign::Plus {
        return Err(LocringError::InvalidUnit(
            "content fraction must be positive".into(),
        ));
    }
    let mut acc = ring.element(
        IntPoly::constant(BigInt::from(ux.sign) * &ux.content_num),
        0,
        0,
    );
    if ux.t_exp >= 0 {
        acc = acc.mul(&ring.element(IntPoly::monomial(BigInt::one(), ux.t_exp as usize), 0, 0))?;
    } else {
        acc = acc.mul(&ring.element(IntPoly::one(), (-ux.t_exp) as u32, 0))?;
    }
    for (i, &e) in ux.prime_exps.iter().enumerate() {
        let q = &ring.factorization().factors[i].poly;
        if e >= 0 {
            acc = acc.mul(&ring.element(q.pow(e as u32), 0, 0))?;
        } else {
            acc =
                acc.mul(&ring.element(ring.prime_complement(i).pow((-e) as u32), 0, (-e) as u32))?;
        }
    }
    if !ux.content_den.is_one() {
        let c = ring.content();
        let mut j = None;
        let mut ck = BigInt::one();
        for jj in 1..=256u32 {
            ck *= c;
            if (&ck % &ux.content_den).is_zero() {
                j = Some((jj, ck.clone()));
                break;
            }
        }
        let (j, ck) = j.ok_or_else(|| {
            LocringError::InvalidUnit(format!(
                "{} does not divide a power of the content {}",
                ux.content_den, c
            ))
        })?;
        let prim = ring.p().poly().primitive_part();
        let num = &IntPoly::constant(ck / &ux.content_den) * &prim.pow(j);
        acc = acc.mul(&ring.element(num, 0, j))?;
    }
    Ok(acc)
}

/// One prime factor of `p` with the positivity verdicts for it and for the
/// numerator of its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimePositivity {
    pub prime: IntPoly,
    pub positivity: Positivity,
    pub inverse_positivity: Positivity,
}

/// Result of [`RingContext::positive_unit_monoid`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PositiveUnitMonoid {
    pub descriptor: GroupDescriptor,
    pub checks: Vec<PrimePositivity>,
}

// ---------------------------------------------------------------------------
// Exact search for negative values on the positive axis
// ---------------------------------------------------------------------------

mod realroots {
    //! Finds a positive dyadic point where an integer polynomial is negative,
    //! or reports that none was found. All arithmetic is exact: root
    //! isolation by coefficient sign variations on dyadic subdivisions, with
    //! exact midpoint-root extraction, then sign evaluation in the root-free
    //! gaps. `None` is always inconclusive for the caller (the polynomial may
    //! be nonnegative on the axis, or the search may have hit its budget).

    use super::*;

    const MAX_DEPTH: u32 = 96;
    const MAX_NODES: u32 = 4096;

    /// A dyadic number `a / 2^s`.
    type Dyadic = (BigInt, u32);

    fn dyadic_cmp(a: &Dyadic, b: &Dyadic) -> Ordering {
        (&a.0 << b.1).cmp(&(&b.0 << a.1))
    }

    fn dyadic_mid(a: &Dyadic, b: &Dyadic) -> Dyadic {
        ((&a.0 << b.1) + (&b.0 << a.1), a.1 + b.1 + 1)
    }

    /// One root of the squarefree input: either isolated in the open
    /// interval `(a, a+1)/2^s` (with the polynomial transplanted onto that
    /// interval, nonzero at its endpoints), or exactly at `a/2^s`.
    enum Site {
        Interval { a: BigInt, s: u32, q: IntPoly },
        Root { a: BigInt, s: u32 },
    }

    impl Site {
        fn lo(&self) -> Dyadic {
            match self {
                Site::Interval { a, s, .. } | Site::Root { a, s } => (a.clone(), *s),
            }
        }

        fn hi(&self) -> Dyadic {
            match self {
                Site::Interval { a, s, .. } => (a + 1u32, *s),
                Site::Root { a, s } => (a.clone(), *s),
            }
        }
    }

    pub(super) fn find_negative_point(p: &IntPoly) -> Option<(BigInt, u32)> {
        let (val, deg) = p.val_and_deg().ok()?;
        let m = p.div_t_pow(val).unwrap();
        let bits = m.max_abs_coeff().bits() as u32;
        // enough room for the number of terms on top of the coefficient size
        let margin = bits + 34 - (deg as u32 + 1).leading_zeros();
        if m.lead().unwrap().sign() == Sign::Minus {
            // dominant term wins far out
            for e in 0..=margin {
                let x = BigInt::one() << e;
                if p.eval(&x).sign() == Sign::Minus {
                    return Some((x, 0));
                }
            }
            return None;
        }
        if m.coeff(0).sign() == Sign::Minus {
            // constant term wins near zero
            for s in 1..=margin {
                if p.sign_at_dyadic(&BigInt::one(), s) == Ordering::Less {
                    return Some((BigInt::one(), s));
                }
            }
            return None;
        }
        if m.is_nonnegative() || deg == val {
            return None;
        }
        // both ends positive: a negative value must sit between two roots
        let sf = m
            .div_exact(&m.gcd_poly(&m.derivative()))
            .expect("gcd divides");
        if sf.is_nonnegative() {
            return None;
        }
        // all roots lie below 2^e by the Cauchy bound
        let e = bits + 1;
        let q = sf.scale_arg_pow2(e).primitive_part();
        let mut sites = Vec::new();
        let mut nodes = 0u32;
        if !isolate(q, BigInt::zero(), 0, &mut sites, &mut nodes) {
            return None;
        }
        sites.sort_by(|x, y| dyadic_cmp(&x.lo(), &y.lo()).then(dyadic_cmp(&x.hi(), &y.hi())));
        // Sample a point on each side of every root: flank points inside
        // each isolating interval, plus midpoints of the gaps between
        // consecutive sites. Every maximal sign region of the input between
        // two roots then contains at least one sample.
        let mut samples = Vec::new();
        let mut prev: Dyadic = (BigInt::zero(), 0);
        for site in &sites {
            let lo = site.lo();
            if dyadic_cmp(&prev, &lo) == Ordering::Less {
                samples.push(dyadic_mid(&prev, &lo));
            }
            if let Site::Interval { a, s, q } = site {
                samples.extend(flank_points(q, a, *s));
            }
            prev = site.hi();
        }
        let one: Dyadic = (BigInt::one(), 0);
        if dyadic_cmp(&prev, &one) == Ordering::Less {
            samples.push(dyadic_mid(&prev, &one));
        }
        for (a, s) in samples {
            // map back from (0,1) to (0, 2^e)
            let (a, s) = if s >= e {
                (a, s - e)
            } else {
                (a << (e - s), 0)
            };
            if p.sign_at_dyadic(&a, s) == Ordering::Less {
                return Some((a, s));
            }
        }
        None
    }

    /// Bisects toward the single simple root of `q` in local `(0,1)` until a
    /// point strictly on each side of it is known, mapping the points back
    /// to the global frame of the interval `(a, a+1)/2^s`.
    fn flank_points(q: &IntPoly, a: &BigInt, s: u32) -> Vec<Dyadic> {
        let sign_lo = q.sign_at_dyadic(&BigInt::zero(), 0);
        let mut left: Option<Dyadic> = None;
        let mut right: Option<Dyadic> = None;
        let mut lo: Dyadic = (BigInt::zero(), 0);
        let mut hi: Dyadic = (BigInt::one(), 0);
        for _ in 0..192 {
            if left.is_some() && right.is_some() {
                break;
            }
            let mid = dyadic_mid(&lo, &hi);
            match q.sign_at_dyadic(&mid.0, mid.1) {
                Ordering::Equal => {
                    // landed exactly on the root: both gaps are root-free
                    left.get_or_insert_with(|| dyadic_mid(&lo, &mid));
                    right.get_or_insert_with(|| dyadic_mid(&mid, &hi));
                    break;
                }
                o if o == sign_lo => {
                    left.get_or_insert_with(|| mid.clone());
                    lo = mid;
                }
                _ => {
                    right.get_or_insert_with(|| mid.clone());
                    hi = mid;
                }
            }
        }
        left.into_iter()
            .chain(right)
            .map(|(u, v)| ((a << v) + u, s + v))
            .collect()
    }

    /// Counts sign variations of `(1+t)^n q(1/(1+t))`; bounds the number of
    /// roots of `q` in the open unit interval and matches it modulo 2.
    fn descartes_01(q: &IntPoly) -> u32 {
        let tr = q.reversed().translate_by_one();
        let mut var = 0;
        let mut last = Sign::NoSign;
        for c in tr.coeffs() {
            let s = c.sign();
            if s == Sign::NoSign {
                continue;
            }
            if last != Sign::NoSign && s != last {
                var += 1;
            }
            last = s;
        }
        var
    }

    /// Splits `(a/2^s, (a+1)/2^s)` until each part holds at most one root of
    /// the (squarefree) input. `q` is the input transplanted to `(0,1)` over
    /// the current interval; it never vanishes at the endpoints. Returns
    /// `false` when the budget runs out.
    fn isolate(q: IntPoly, a: BigInt, s: u32, sites: &mut Vec<Site>, nodes: &mut u32) -> bool {
        *nodes += 1;
        if *nodes > MAX_NODES || s > MAX_DEPTH {
            return false;
        }
        match descartes_01(&q) {
            0 => return true,
            1 => {
                sites.push(Site::Interval { a, s, q });
                return true;
            }
            _ => {}
        }
        let mut q = q;
        let mid: BigInt = (&a << 1) + 1u32;
        if q.sign_at_dyadic(&BigInt::one(), 1) == Ordering::Equal {
            // exact root at the midpoint: record it and divide (2t - 1) out
            q = q
                .div_exact(&IntPoly::from_i64s(&[-1, 2]))
                .expect("midpoint root gives an exact factor");
            sites.push(Site::Root {
                a: mid.clone(),
                s: s + 1,
            });
        }
        let n = q.degree().unwrap_or(0);
        let left = IntPoly::new(
            q.coeffs()
                .iter()
                .enumerate()
                .map(|(i, c)| c << (n - i))
                .collect(),
        )
        .primitive_part();
        let right = left.translate_by_one().primitive_part();
        // recurse left to right so sites come out ordered
        isolate(left, &a << 1, s + 1, sites, nodes) && isolate(right, mid, s + 1, sites, nodes)
    }
}
