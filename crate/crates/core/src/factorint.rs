//! Factorization in `Z[t]`: sign, integer content and primitive irreducible
//! factors with multiplicities.
//!
//! The factor search is fully exact. After pulling out the sign, the content
//! and the power of `t`, the squarefree radical `p / gcd(p, p')` is factored
//! by Kronecker interpolation: a degree-`k` factor is determined by its values
//! at `k + 1` integer points, and each such value divides the value of `p`
//! there, so enumerating divisor tuples and interpolating finds every factor.
//! Divisor tuples are pruned with the congruence `(x - y) | (g(x) - g(y))`
//! and points are picked where `p` takes values with few divisors.
//! Multiplicities are recovered afterwards by repeated exact division.

use std::fmt::{self, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polycore::{bigint_string, IntPoly};

/// Degree cap applied by [`factor`]; the interpolation search is exponential
/// in the factor degree, so inputs past this need [`factor_with_cap`] and
/// patience.
pub const DEFAULT_DEGREE_CAP: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorError {
    #[error("cannot factor the zero polynomial")]
    ZeroPolynomial,
    #[error("degree {degree} exceeds the factorization cap {cap}")]
    DegreeLimitExceeded { degree: usize, cap: usize },
}

/// One primitive irreducible factor with its multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorPower {
    pub poly: IntPoly,
    pub mult: u32,
}

/// `sign * content * prod factors[i].poly ^ factors[i].mult`, with `content`
/// positive, every factor primitive irreducible with positive leading
/// coefficient, and factors sorted by degree then coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub sign: i8,
    #[serde(with = "bigint_string")]
    pub content: BigInt,
    pub factors: Vec<FactorPower>,
}

impl Factorization {
    /// Multiplies the factorization back out.
    pub fn reconstruct(&self) -> IntPoly {
        let mut acc = IntPoly::constant(BigInt::from(self.sign) * &self.content);
        for f in &self.factors {
            acc = &acc * &f.poly.pow(f.mult);
        }
        acc
    }

    /// The distinct primitive irreducible factors, in stored order.
    pub fn distinct_primes(&self) -> Vec<&IntPoly> {
        self.factors.iter().map(|f| &f.poly).collect()
    }
}

impl Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign < 0 {
            write!(f, "-")?;
        }
        let mut wrote = false;
        if !self.content.is_one() || self.factors.is_empty() {
            write!(f, "{}", self.content)?;
            wrote = true;
        }
        for fac in &self.factors {
            if wrote {
                write!(f, " * ")?;
            }
            write!(f, "({})", fac.poly)?;
            if fac.mult > 1 {
                write!(f, "^{}", fac.mult)?;
            }
            wrote = true;
        }
        Ok(())
    }
}

/// Factors `p` with the default degree cap.
pub fn factor(p: &IntPoly) -> Result<Factorization, FactorError> {
    factor_with_cap(p, DEFAULT_DEGREE_CAP)
}

/// `true` iff `p` is a primitive irreducible polynomial of degree >= 1
/// (so neither a unit, a constant, nor a product).
pub fn is_irreducible(p: &IntPoly) -> Result<bool, FactorError> {
    let f = factor(p)?;
    Ok(f.content.is_one()
        && f.factors.len() == 1
        && f.factors[0].mult == 1
        && f.factors[0].poly.degree() == p.degree())
}

/// Factors `p` into `sign * content * prod q_i^{m_i}`.
pub fn factor_with_cap(p: &IntPoly, cap: usize) -> Result<Factorization, FactorError> {
    let Some(degree) = p.degree() else {
        return Err(FactorError::ZeroPolynomial);
    };
    if degree > cap {
        return Err(FactorError::DegreeLimitExceeded { degree, cap });
    }

    let sign: i8 = if p.lead().unwrap().is_negative() {
        -1
    } else {
        1
    };
    let content = p.content();
    let primitive = if sign < 0 {
        (-p).primitive_part()
    } else {
        p.primitive_part()
    };

    let mut factors: Vec<FactorPower> = Vec::new();
    let t_power = primitive.val().unwrap();
    if t_power > 0 {
        factors.push(FactorPower {
            poly: IntPoly::monomial(BigInt::one(), 1),
            mult: t_power as u32,
        });
    }
    let rest = primitive.div_t_pow(t_power).unwrap();

    if rest.degree() != Some(0) {
        // Squarefree radical via the derivative gcd, then the interpolation
        // search, then multiplicities by repeated division.
        let radical = rest.div_exact(&rest.gcd_poly(&rest.derivative())).unwrap();
        for prime in kronecker_factor(radical) {
            let mut mult = 0u32;
            let mut running = rest.clone();
            while let Some(q) = running.div_exact(&prime) {
                mult += 1;
                running = q;
            }
            debug_assert!(mult >= 1);
            factors.push(FactorPower { poly: prime, mult });
        }
    }

    factors.sort_by(|a, b| a.poly.cmp_deg_lex(&b.poly));
    let result = Factorization {
        sign,
        content,
        factors,
    };
    debug_assert_eq!(&result.reconstruct(), p, "factorization must reconstruct");
    Ok(result)
}

/// Factors a primitive, squarefree polynomial with nonzero constant term and
/// positive leading coefficient into primitive irreducibles.
fn kronecker_factor(mut f: IntPoly) -> Vec<IntPoly> {
    let mut out = Vec::new();
    strip_linear_factors(&mut f, &mut out);
    let mut k = 2usize;
    while f.degree().is_some_and(|d| 2 * k <= d) {
        match search_degree_k(&f, k) {
            Some(g) => {
                f = f.div_exact(&g).expect("verified divisor");
                out.push(g);
                // The quotient may contain another factor of the same degree.
            }
            None => k += 1,
        }
    }
    if f.degree().is_some_and(|d| d >= 1) {
        out.push(f);
    }
    out
}

/// Removes all linear factors `q t - r` (rational roots `r / q`).
fn strip_linear_factors(f: &mut IntPoly, out: &mut Vec<IntPoly>) {
    loop {
        if f.degree().is_none_or(|d| d < 1) {
            return;
        }
        let lead_divs = positive_divisors(f.lead().unwrap());
        let const_divs = signed_divisors(&f.coeff(0));
        let mut found = false;
        'search: for q in &lead_divs {
            for r in &const_divs {
                // A primitive linear factor q t - r needs gcd(q, r) = 1.
                if !q.gcd(&r.abs()).is_one() {
                    continue;
                }
                let cand = IntPoly::new(vec![-r.clone(), q.clone()]);
                if let Some(quot) = f.div_exact(&cand) {
                    *f = quot;
                    out.push(cand);
                    found = true;
                    break 'search;
                }
            }
        }
        if !found {
            return;
        }
    }
}

/// Searches for one irreducible factor of exact degree `k >= 2` of `f`
/// (squarefree, no rational roots, so `f(x) != 0` at every integer).
fn search_degree_k(f: &IntPoly, k: usize) -> Option<IntPoly> {
    // Sample pool around zero; keep the k+1 points whose values have the
    // fewest divisors, which shrinks the tuple space sharply.
    let radius = (k + 4) as i64;
    let mut pool: Vec<(usize, i64, Vec<BigInt>)> = Vec::new();
    let mut xs: Vec<i64> = vec![0];
    for r in 1..=radius {
        xs.push(r);
        xs.push(-r);
    }
    for x in xs {
        let value = f.eval(&BigInt::from(x));
        debug_assert!(!value.is_zero(), "rational roots were stripped");
        let divs = signed_divisors(&value);
        pool.push((divs.len(), x, divs));
    }
    pool.sort_by_key(|(n, x, _)| (*n, x.abs(), *x < 0));
    pool.truncate(k + 1);

    let points: Vec<i64> = pool.iter().map(|(_, x, _)| *x).collect();
    let mut lists: Vec<Vec<BigInt>> = pool.into_iter().map(|(_, _, d)| d).collect();
    // Either g or -g is a factor, so the first coordinate may be fixed positive.
    lists[0].retain(|d| d.is_positive());

    let mut chosen: Vec<BigInt> = Vec::with_capacity(k + 1);
    dfs_tuples(f, k, &points, &lists, &mut chosen)
}

fn dfs_tuples(
    f: &IntPoly,
    k: usize,
    points: &[i64],
    lists: &[Vec<BigInt>],
    chosen: &mut Vec<BigInt>,
) -> Option<IntPoly> {
    let depth = chosen.len();
    if depth == points.len() {
        return try_candidate(f, k, points, chosen);
    }
    'next: for d in &lists[depth] {
        for (i, prev) in chosen.iter().enumerate() {
            // g integral forces (x_depth - x_i) | (g(x_depth) - g(x_i)).
            let step = BigInt::from(points[depth] - points[i]);
            if !((d - prev) % &step).is_zero() {
                continue 'next;
            }
        }
        chosen.push(d.clone());
        if let Some(g) = dfs_tuples(f, k, points, lists, chosen) {
            return Some(g);
        }
        chosen.pop();
    }
    None
}

/// Interpolates the candidate through `(points[i], values[i])`, then checks
/// integrality, exact degree, and actual divisibility.
fn try_candidate(f: &IntPoly, k: usize, points: &[i64], values: &[BigInt]) -> Option<IntPoly> {
    let coeffs = interpolate_integer(points, values)?;
    let g = IntPoly::new(coeffs);
    if g.degree() != Some(k) {
        return None;
    }
    // A factor's leading coefficient divides the leading coefficient of f.
    if !f.lead().unwrap().is_multiple_of(g.lead().unwrap()) {
        return None;
    }
    let g = g.primitive_part().positive_lead();
    f.div_exact(&g)?;
    Some(g)
}

/// Newton interpolation over exact rationals; `None` unless every monomial
/// coefficient is an integer.
fn interpolate_integer(points: &[i64], values: &[BigInt]) -> Option<Vec<BigInt>> {
    let n = points.len();
    let xs: Vec<BigInt> = points.iter().map(|&x| BigInt::from(x)).collect();
    // Divided differences.
    let mut table: Vec<Rat> = values.iter().map(|v| Rat::integer(v.clone())).collect();
    let mut newton: Vec<Rat> = vec![table[0].clone()];
    for level in 1..n {
        for i in 0..n - level {
            let dx = &xs[i + level] - &xs[i];
            table[i] = table[i + 1].sub(&table[i]).div_int(&dx);
        }
        table.truncate(n - level);
        newton.push(table[0].clone());
    }
    // Expand sum c_i * prod_{j<i} (t - x_j) into monomial coefficients.
    let mut acc: Vec<Rat> = vec![Rat::zero(); n];
    let mut basis: Vec<Rat> = vec![Rat::zero(); n];
    basis[0] = Rat::integer(BigInt::one());
    let mut basis_len = 1usize;
    for (i, c) in newton.iter().enumerate() {
        for j in 0..basis_len {
            acc[j] = acc[j].add(&basis[j].mul(c));
        }
        if i + 1 < n {
            // basis *= (t - x_i)
            for j in (0..basis_len).rev() {
                let shifted = basis[j].clone();
                basis[j] = basis[j].mul_int(&-&xs[i]);
                basis[j + 1] = basis[j + 1].add(&shifted);
            }
            basis_len += 1;
        }
    }
    acc.into_iter().map(|r| r.into_integer()).collect()
}

/// Minimal exact rational used only by the interpolation step.
#[derive(Clone)]
struct Rat {
    num: BigInt,
    den: BigInt, // > 0, gcd(num, den) = 1
}

impl Rat {
    fn zero() -> Self {
        Rat {
            num: BigInt::zero(),
            den: BigInt::one(),
        }
    }

    fn integer(num: BigInt) -> Self {
        Rat {
            num,
            den: BigInt::one(),
        }
    }

    fn reduced(num: BigInt, den: BigInt) -> Self {
        debug_assert!(!den.is_zero());
        let mut g = num.gcd(&den);
        if g.is_zero() {
            g = BigInt::one();
        }
        let (mut num, mut den) = (num / &g, den / g);
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        Rat { num, den }
    }

    fn add(&self, o: &Rat) -> Rat {
        Rat::reduced(&self.num * &o.den + &o.num * &self.den, &self.den * &o.den)
    }

    fn sub(&self, o: &Rat) -> Rat {
        Rat::reduced(&self.num * &o.den - &o.num * &self.den, &self.den * &o.den)
    }

    fn mul(&self, o: &Rat) -> Rat {
        Rat::reduced(&self.num * &o.num, &self.den * &o.den)
    }

    fn mul_int(&self, k: &BigInt) -> Rat {
        Rat::reduced(&self.num * k, self.den.clone())
    }

    fn div_int(&self, k: &BigInt) -> Rat {
        Rat::reduced(self.num.clone(), &self.den * k)
    }

    fn into_integer(self) -> Option<BigInt> {
        self.den.is_one().then_some(self.num)
    }
}

// ---------------------------------------------------------------------------
// Integer divisor enumeration (exact): trial division, Miller-Rabin, Pollard
// rho. Deterministic for everything a desk-scale session produces.
// ---------------------------------------------------------------------------

/// All divisors of `n != 0`, both signs, ascending.
pub fn signed_divisors(n: &BigInt) -> Vec<BigInt> {
    let pos = positive_divisors(n);
    let mut out: Vec<BigInt> = pos.iter().map(|d| -d).collect();
    out.reverse();
    out.extend(pos);
    out.sort();
    out
}

/// The positive divisors of `n != 0`, ascending.
pub fn positive_divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    assert!(!n.is_zero(), "divisors of zero are not enumerable");
    let mut divs = vec![BigInt::one()];
    for (p, e) in factorize_integer(&n) {
        let mut extended = Vec::with_capacity(divs.len() * (e as usize + 1));
        let mut pk = BigInt::one();
        for _ in 0..=e {
            for d in &divs {
                extended.push(d * &pk);
            }
            pk *= &p;
        }
        divs = extended;
    }
    divs.sort();
    divs
}

/// Prime factorization of `n >= 1`, primes ascending.
pub fn factorize_integer(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    let mut rest = n.clone();
    let mut small = 2u64;
    while small <= 4096 {
        let p = BigInt::from(small);
        if (&p * &p) > rest {
            break;
        }
        let mut e = 0u32;
        while rest.is_multiple_of(&p) {
            rest /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        small = if small == 2 { 3 } else { small + 2 };
    }
    if rest > BigInt::one() {
        let mut stack = vec![rest];
        let mut large: Vec<BigInt> = Vec::new();
        while let Some(m) = stack.pop() {
            if is_probable_prime(&m) {
                large.push(m);
            } else {
                let d = pollard_rho(&m);
                stack.push(&m / &d);
                stack.push(d);
            }
        }
        large.sort();
        let mut i = 0;
        while i < large.len() {
            let mut j = i;
            while j < large.len() && large[j] == large[i] {
                j += 1;
            }
            out.push((large[i].clone(), (j - i) as u32));
            i = j;
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Miller-Rabin with the fixed witness set `{2, 3, 5, ..., 41}`, which is a
/// deterministic primality test below 3.3e24 and overwhelming evidence above.
fn is_probable_prime(n: &BigInt) -> bool {
    let two = BigInt::from(2);
    if n < &two {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let p = BigInt::from(p);
        if n == &p {
            return true;
        }
        if n.is_multiple_of(&p) {
            return false;
        }
    }
    let n_minus_1: BigInt = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Floyd-cycle Pollard rho; `n` must be odd, composite, and coprime to the
/// small primes already removed.
fn pollard_rho(n: &BigInt) -> BigInt {
    let one = BigInt::one();
    for c in 1u64.. {
        let c = BigInt::from(c);
        let f = |x: &BigInt| (x * x + &c) % n;
        let mut x = BigInt::from(2);
        let mut y = x.clone();
        loop {
            x = f(&x);
            y = f(&f(&y));
            if x == y {
                break; // cycle without factor; retry with the next c
            }
            let d = (&x - &y).abs().gcd(n);
            if d > one && &d < n {
                return d;
            }
        }
    }
    unreachable!("every composite eventually yields a factor")
}
