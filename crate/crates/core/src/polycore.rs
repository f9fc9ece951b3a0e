//! Dense polynomials and Laurent polynomials over arbitrary-precision integers.
//!
//! Three views of the same coefficient data are used throughout the crate:
//!
//! * [`IntPoly`]: a polynomial in `Z[t]`, stored densely from the constant
//!   term up, with no trailing zero coefficients.
//! * [`LaurentPoly`]: `t^offset * base` with `base` an [`IntPoly`] whose
//!   constant term is nonzero (unless the whole polynomial is zero), so the
//!   representation is unique.
//! * [`CharacterPolynomial`]: a normalized character `a_0 + ... + a_d t^d`
//!   with all `a_i >= 0` and `a_0 >= 1`. Normalization shifts any power of
//!   `t` out of the input and records it as `original_offset`.
//!
//! Text syntax accepted by [`parse_poly`]: either a sum of signed integer
//! monomials in `t` (`"1+2t+t^2"`, `"t^-1 + 1"`, `"-3t^4"`) or a bare
//! comma-separated coefficient list (`"1,2,1"`). Rendering via [`Display`]
//! produces the compact monomial form, and parsing a rendered polynomial
//! returns the original.

use std::cmp::Ordering;
use std::fmt::{self, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Errors produced by parsing, normalization and the few partial operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    /// Text input that does not match the polynomial grammar. `pos` is the
    /// byte offset of the offending character.
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    /// An operation that needs a nonzero polynomial received zero.
    #[error("zero polynomial has no valuation or degree")]
    ZeroPolynomial,
    /// Character normalization rejected a negative coefficient.
    #[error("negative coefficient at exponent {exponent}; a character polynomial needs all coefficients >= 0")]
    NegativeCoefficient { exponent: i64 },
}

fn parse_err(pos: usize, msg: impl Into<String>) -> PolyError {
    PolyError::Parse {
        pos,
        msg: msg.into(),
    }
}

// ---------------------------------------------------------------------------
// IntPoly
// ---------------------------------------------------------------------------

/// A polynomial in `Z[t]`, coefficients stored from the constant term up.
///
/// Invariant: the coefficient vector never ends in a zero, so the zero
/// polynomial is the empty vector and `degree` is `None` for it rather than
/// a number.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    /// Builds a polynomial from dense coefficients `c_0, c_1, ...`, trimming
    /// trailing zeros.
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        IntPoly::new(vec![c])
    }

    /// `c * t^exp`.
    pub fn monomial(c: BigInt, exp: usize) -> Self {
        if c.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); exp + 1];
        coeffs[exp] = c;
        IntPoly { coeffs }
    }

    /// Convenience constructor from machine integers, `[1, 0, 2]` is `1 + 2t^2`.
    pub fn from_i64s(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// `t`-adic valuation (index of the lowest nonzero coefficient), or
    /// `None` for the zero polynomial.
    pub fn val(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Valuation and degree in one call; errors on the zero polynomial.
    pub fn val_and_deg(&self) -> Result<(usize, usize), PolyError> {
        match (self.val(), self.degree()) {
            (Some(v), Some(d)) => Ok((v, d)),
            _ => Err(PolyError::ZeroPolynomial),
        }
    }

    /// Coefficient of `t^i` (zero beyond the stored range).
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn lead(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    /// Ascending list of exponents with nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.coeffs
            .iter()
            .map(Signed::abs)
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn pow(&self, exp: u32) -> IntPoly {
        let mut acc = IntPoly::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative(&self) -> IntPoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect();
        IntPoly::new(coeffs)
    }

    /// Multiplies by `t^j`.
    pub fn mul_t_pow(&self, j: usize) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); j];
        coeffs.extend(self.coeffs.iter().cloned());
        IntPoly { coeffs }
    }

    /// Divides by `t^j`; `None` if the valuation is smaller than `j`.
    pub fn div_t_pow(&self, j: usize) -> Option<IntPoly> {
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        if self.val()? < j {
            return None;
        }
        Some(IntPoly {
            coeffs: self.coeffs[j..].to_vec(),
        })
    }

    /// Gcd of the coefficients, nonnegative; zero only for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// `self / content`, sign untouched; zero stays zero.
    pub fn primitive_part(&self) -> IntPoly {
        let c = self.content();
        if c.is_zero() || c.is_one() {
            return self.clone();
        }
        IntPoly {
            coeffs: self.coeffs.iter().map(|x| x / &c).collect(),
        }
    }

    /// Exact division in `Z[t]`: `Some(q)` with `self = q * g`, coefficients
    /// staying integral, else `None`. Division by zero is `None`.
    pub fn div_exact(&self, g: &IntPoly) -> Option<IntPoly> {
        if g.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        let (dn, dg) = (self.degree()?, g.degree()?);
        if dn < dg {
            return None;
        }
        let lead_g = g.lead()?.clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); dn - dg + 1];
        for i in (0..=dn - dg).rev() {
            let top = std::mem::take(&mut rem[i + dg]);
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(&lead_g);
            if !r.is_zero() {
                return None;
            }
            for (j, gj) in g.coeffs.iter().enumerate().take(dg) {
                rem[i + j] -= &q * gj;
            }
            quot[i] = q;
        }
        if rem.iter().all(Zero::is_zero) {
            Some(IntPoly::new(quot))
        } else {
            None
        }
    }

    /// Pseudo-remainder of `self` by `g`: `lc(g)^(da-db+1) * self mod g`.
    fn pseudo_rem(&self, g: &IntPoly) -> IntPoly {
        let da = self.degree().expect("pseudo_rem of zero");
        let db = g.degree().expect("pseudo_rem by zero");
        debug_assert!(da >= db);
        let lead_g = g.lead().unwrap().clone();
        let mut rem = self.clone();
        while let Some(dr) = rem.degree() {
            if dr < db {
                break;
            }
            let top = rem.lead().unwrap().clone();
            // rem := lc(g)*rem - top * t^(dr-db) * g
            let mut next: Vec<BigInt> = rem.coeffs.iter().map(|c| c * &lead_g).collect();
            for (j, gj) in g.coeffs.iter().enumerate() {
                next[dr - db + j] -= &top * gj;
            }
            rem = IntPoly::new(next);
        }
        rem
    }

    /// Polynomial gcd over `Z[t]` via the primitive Euclidean sequence.
    /// The result has positive leading coefficient and content equal to the
    /// gcd of the two contents.
    pub fn gcd_poly(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() {
            return other.positive_lead();
        }
        if other.is_zero() {
            return self.positive_lead();
        }
        let content = self.content().gcd(&other.content());
        let mut a = self.primitive_part().positive_lead();
        let mut b = other.primitive_part().positive_lead();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive_part().positive_lead();
            a = b;
            b = r;
        }
        &a * &IntPoly::constant(content)
    }

    /// Flips the sign when the leading coefficient is negative.
    pub fn positive_lead(&self) -> IntPoly {
        match self.lead() {
            Some(l) if l.is_negative() => -self,
            _ => self.clone(),
        }
    }

    /// Exact evaluation at an integer point (Horner).
    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Sign of `p(a / 2^s)` for `s >= 0`, computed exactly as the sign of
    /// `sum c_i a^i 2^(s(d-i))`.
    pub fn sign_at_dyadic(&self, a: &BigInt, s: u32) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        let d = self.degree().unwrap();
        let mut acc = BigInt::zero();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            acc = acc * a + (c << (s as usize * (d - i)));
        }
        acc.cmp(&BigInt::zero())
    }

    /// `p(2^s * t)`: used when rescaling an interval to `(0, 1)`.
    pub fn scale_arg_pow2(&self, s: u32) -> IntPoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c << (s as usize * i))
            .collect();
        IntPoly::new(coeffs)
    }

    /// `p(t + 1)` by in-place Pascal accumulation.
    pub fn translate_by_one(&self) -> IntPoly {
        let mut c = self.coeffs.clone();
        let n = c.len();
        if n == 0 {
            return IntPoly::zero();
        }
        for i in 0..n - 1 {
            for j in (i..n - 1).rev() {
                let (lo, hi) = c.split_at_mut(j + 1);
                lo[j] += &hi[0];
            }
        }
        IntPoly::new(c)
    }

    /// `t^deg * p(1/t)`: the coefficient vector reversed.
    pub fn reversed(&self) -> IntPoly {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        IntPoly::new(coeffs)
    }

    /// Deterministic ordering used for output: degree first, then the
    /// coefficient vectors compared from the constant term up.
    pub fn cmp_deg_lex(&self, other: &IntPoly) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl std::ops::Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl std::ops::Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            let mut c = self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero);
            if let Some(r) = rhs.coeffs.get(i) {
                c += r;
            }
            coeffs.push(c);
        }
        IntPoly::new(coeffs)
    }
}

impl std::ops::Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        self + &(-rhs)
    }
}

impl std::ops::Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        IntPoly::new(coeffs)
    }
}

impl Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(
            f,
            self.coeffs.iter().enumerate().map(|(i, c)| (i as i64, c)),
        )
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({self})")
    }
}

/// Renders terms in ascending exponent order, compactly: `1-t+2t^3`.
fn write_terms<'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (i64, &'a BigInt)>,
) -> fmt::Result {
    let mut wrote = false;
    for (exp, c) in terms {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if wrote {
            write!(f, "{}", if c.is_negative() { "-" } else { "+" })?;
        } else if c.is_negative() {
            write!(f, "-")?;
        }
        if exp == 0 {
            write!(f, "{mag}")?;
        } else {
            if !mag.is_one() {
                write!(f, "{mag}")?;
            }
            write!(f, "t")?;
            if exp != 1 {
                write!(f, "^{exp}")?;
            }
        }
        wrote = true;
    }
    if !wrote {
        write!(f, "0")?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// LaurentPoly
// ---------------------------------------------------------------------------

/// `t^offset * base` with `base(0) != 0` unless the polynomial is zero
/// (then `offset = 0`), making the pair unique.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    base: IntPoly,
    offset: i64,
}

impl LaurentPoly {
    /// Canonicalizes `t^offset * p`: the valuation of `p` moves into the offset.
    pub fn new(p: IntPoly, offset: i64) -> Self {
        match p.val() {
            None => LaurentPoly {
                base: IntPoly::zero(),
                offset: 0,
            },
            Some(v) => LaurentPoly {
                offset: offset + v as i64,
                base: p.div_t_pow(v).unwrap(),
            },
        }
    }

    pub fn zero() -> Self {
        LaurentPoly::new(IntPoly::zero(), 0)
    }

    pub fn one() -> Self {
        LaurentPoly::new(IntPoly::one(), 0)
    }

    pub fn from_int_poly(p: IntPoly) -> Self {
        LaurentPoly::new(p, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.base.is_zero()
    }

    /// The underlying polynomial with valuation zero.
    pub fn base(&self) -> &IntPoly {
        &self.base
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// Lowest exponent, `None` for zero.
    pub fn val(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.offset)
    }

    /// Highest exponent, `None` for zero.
    pub fn degree(&self) -> Option<i64> {
        self.base.degree().map(|d| d as i64 + self.offset)
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        let i = exp - self.offset;
        if i < 0 {
            BigInt::zero()
        } else {
            self.base.coeff(i as usize)
        }
    }

    pub fn support(&self) -> Vec<i64> {
        self.base
            .support()
            .into_iter()
            .map(|i| i as i64 + self.offset)
            .collect()
    }

    pub fn pow(&self, exp: u32) -> LaurentPoly {
        LaurentPoly::new(self.base.pow(exp), self.offset * exp as i64)
    }
}

impl std::ops::Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            base: -&self.base,
            offset: self.offset,
        }
    }
}

impl std::ops::Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let off = self.offset.min(rhs.offset);
        let a = self.base.mul_t_pow((self.offset - off) as usize);
        let b = rhs.base.mul_t_pow((rhs.offset - off) as usize);
        LaurentPoly::new(&a + &b, off)
    }
}

impl std::ops::Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &(-rhs)
    }
}

impl std::ops::Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::new(&self.base * &rhs.base, self.offset + rhs.offset)
    }
}

impl Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(
            f,
            self.base
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (i as i64 + self.offset, c)),
        )
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

// ---------------------------------------------------------------------------
// CharacterPolynomial
// ---------------------------------------------------------------------------

/// A normalized character polynomial: nonzero, all coefficients nonnegative,
/// nonzero constant term. The power of `t` removed during normalization is
/// kept as `original_offset` for reporting; it never changes any invariant
/// downstream.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CharacterPolynomial {
    poly: IntPoly,
    original_offset: i64,
}

impl CharacterPolynomial {
    /// Normalizes a Laurent polynomial into character form.
    pub fn normalize(input: &LaurentPoly) -> Result<Self, PolyError> {
        if input.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        for (i, c) in input.base.coeffs.iter().enumerate() {
            if c.is_negative() {
                return Err(PolyError::NegativeCoefficient {
                    exponent: i as i64 + input.offset,
                });
            }
        }
        Ok(CharacterPolynomial {
            poly: input.base.clone(),
            original_offset: input.offset,
        })
    }

    /// Parses and normalizes in one step.
    pub fn parse(text: &str) -> Result<Self, PolyError> {
        CharacterPolynomial::normalize(&parse_poly(text)?)
    }

    pub fn poly(&self) -> &IntPoly {
        &self.poly
    }

    pub fn original_offset(&self) -> i64 {
        self.original_offset
    }

    /// Degree `d` of the normalized polynomial; `0` for a constant character.
    pub fn d(&self) -> usize {
        self.poly.degree().expect("character polynomial is nonzero")
    }

    /// Constant coefficient `a_0 >= 1`.
    pub fn a0(&self) -> &BigInt {
        &self.poly.coeffs[0]
    }

    /// Leading coefficient `a_d >= 1`.
    pub fn a_d(&self) -> &BigInt {
        self.poly.lead().expect("character polynomial is nonzero")
    }

    pub fn support(&self) -> Vec<usize> {
        self.poly.support()
    }
}

impl Display for CharacterPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.poly.fmt(f)
    }
}

impl fmt::Debug for CharacterPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CharacterPolynomial({}, original_offset {})",
            self.poly, self.original_offset
        )
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// Parses either a monomial sum (`"1+2t+t^2"`, `"t^-1+1"`) or a bare
/// comma-separated coefficient list (`"1,2,1"`, constant term first).
pub fn parse_poly(text: &str) -> Result<LaurentPoly, PolyError> {
    if text.contains(',') {
        parse_coeff_list(text)
    } else {
        parse_monomial_sum(text)
    }
}

fn parse_coeff_list(text: &str) -> Result<LaurentPoly, PolyError> {
    let mut coeffs = Vec::new();
    let mut pos = 0usize;
    for piece in text.split(',') {
        let trimmed = piece.trim();
        if trimmed.is_empty() {
            return Err(parse_err(pos, "empty coefficient entry"));
        }
        let value: BigInt = trimmed.parse().map_err(|_| {
            parse_err(
                pos + leading_ws(piece),
                format!("invalid integer `{trimmed}`"),
            )
        })?;
        coeffs.push(value);
        pos += piece.len() + 1;
    }
    Ok(LaurentPoly::from_int_poly(IntPoly::new(coeffs)))
}

fn leading_ws(s: &str) -> usize {
    s.len() - s.trim_start().len()
}

struct Scanner<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Result<BigInt, PolyError> {
        let start = self.pos;
        let _ = self.eat(b'-') || self.eat(b'+');
        let digits_start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return Err(parse_err(self.pos, "expected an integer"));
        }
        let s = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        s.parse().map_err(|_| parse_err(start, "invalid integer"))
    }
}

fn parse_monomial_sum(text: &str) -> Result<LaurentPoly, PolyError> {
    let mut sc = Scanner {
        bytes: text.as_bytes(),
        pos: 0,
    };
    let mut acc = LaurentPoly::zero();
    let mut first = true;
    loop {
        sc.skip_ws();
        if sc.peek().is_none() {
            if first {
                return Err(parse_err(sc.pos, "empty polynomial"));
            }
            return Ok(acc);
        }
        // Sign; mandatory between terms, optional before the first.
        let mut negative = false;
        match sc.peek() {
            Some(b'+') => {
                sc.pos += 1;
            }
            Some(b'-') => {
                negative = true;
                sc.pos += 1;
            }
            _ if first => {}
            _ => {
                return Err(parse_err(sc.pos, "expected `+` or `-` between terms"));
            }
        }
        sc.skip_ws();
        // Coefficient and/or `t`.
        let mut coeff = BigInt::one();
        let mut has_coeff = false;
        if sc.peek().is_some_and(|b| b.is_ascii_digit()) {
            coeff = sc.integer()?;
            has_coeff = true;
            sc.skip_ws();
            if sc.eat(b'*') {
                sc.skip_ws();
            }
        }
        let mut exp: i64 = 0;
        if sc.eat(b't') {
            exp = 1;
            sc.skip_ws();
            if sc.eat(b'^') {
                sc.skip_ws();
                let start = sc.pos;
                let e = sc.integer()?;
                exp = i64::try_from(e).map_err(|_| parse_err(start, "exponent out of range"))?;
            }
        } else if !has_coeff {
            return Err(parse_err(sc.pos, "expected a coefficient or `t`"));
        }
        if negative {
            coeff = -coeff;
        }
        let term = LaurentPoly::new(IntPoly::constant(coeff), exp);
        acc = &acc + &term;
        first = false;
    }
}

// ---------------------------------------------------------------------------
// Serialization: coefficients as decimal strings, so no precision is lost.
// ---------------------------------------------------------------------------

fn coeff_strings(coeffs: &[BigInt]) -> Vec<String> {
    coeffs.iter().map(BigInt::to_string).collect()
}

/// Serde adapter for a single [`BigInt`] field: decimal string on output,
/// string or number accepted on input. Use with `#[serde(with = ...)]`.
pub mod bigint_string {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        CoeffRepr::deserialize(d)?.into_bigint()
    }
}

/// JSON coefficient entries are accepted both as numbers and decimal strings.
#[derive(Deserialize)]
#[serde(untagged)]
enum CoeffRepr {
    Int(i64),
    Str(String),
}

impl CoeffRepr {
    fn into_bigint<E: serde::de::Error>(self) -> Result<BigInt, E> {
        match self {
            CoeffRepr::Int(v) => Ok(BigInt::from(v)),
            CoeffRepr::Str(s) => s
                .trim()
                .parse()
                .map_err(|_| E::custom(format!("invalid integer `{s}`"))),
        }
    }
}

fn coeffs_from_repr<E: serde::de::Error>(raw: Vec<CoeffRepr>) -> Result<Vec<BigInt>, E> {
    raw.into_iter().map(CoeffRepr::into_bigint).collect()
}

impl Serialize for IntPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("IntPoly", 1)?;
        st.serialize_field("coeffs", &coeff_strings(&self.coeffs))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for IntPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            coeffs: Vec<CoeffRepr>,
        }
        let repr = Repr::deserialize(d)?;
        Ok(IntPoly::new(coeffs_from_repr(repr.coeffs)?))
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("LaurentPoly", 2)?;
        st.serialize_field("coeffs", &coeff_strings(&self.base.coeffs))?;
        st.serialize_field("offset", &self.offset)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            coeffs: Vec<CoeffRepr>,
            #[serde(default)]
            offset: i64,
        }
        let repr = Repr::deserialize(d)?;
        Ok(LaurentPoly::new(
            IntPoly::new(coeffs_from_repr(repr.coeffs)?),
            repr.offset,
        ))
    }
}

impl Serialize for CharacterPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CharacterPolynomial", 2)?;
        st.serialize_field("coeffs", &coeff_strings(&self.poly.coeffs))?;
        st.serialize_field("original_offset", &self.original_offset)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for CharacterPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            coeffs: Vec<CoeffRepr>,
            #[serde(default)]
            original_offset: i64,
        }
        let repr = Repr::deserialize(d)?;
        let poly = IntPoly::new(coeffs_from_repr(repr.coeffs)?);
        let laurent = LaurentPoly::new(poly, repr.original_offset);
        CharacterPolynomial::normalize(&laurent).map_err(D::Error::custom)
    }
}
