//! Exact real numbers of the form `Σ q_i log p_i` with rational `q_i` and
//! prime `p_i`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest integer accepted by [`factorize`]; trial division stays cheap below it.
pub const FACTOR_LIMIT: u64 = 1 << 48;

/// Prime factorization by trial division, ascending primes.
pub fn factorize(n: u64) -> Result<Vec<(u64, u32)>> {
    if n == 0 {
        return Err(Error::InvalidMeasure("cannot take the logarithm of 0".into()));
    }
    if n > FACTOR_LIMIT {
        return Err(Error::FactorizationTooLarge(n.to_string()));
    }
    let mut out = Vec::new();
    let mut m = n;
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            let mut e = 0;
            while m % d == 0 {
                m /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push((m, 1));
    }
    Ok(out)
}

fn factorize_big(n: &BigUint) -> Result<Vec<(u64, u32)>> {
    match n.to_u64() {
        Some(v) => factorize(v),
        None => Err(Error::FactorizationTooLarge(n.to_string())),
    }
}

/// An exact value `Σ q_p log p`. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct EntropyValue {
    terms: BTreeMap<u64, BigRational>,
}

impl EntropyValue {
    pub fn zero() -> Self {
        EntropyValue::default()
    }

    /// `log n` for a positive integer `n`.
    pub fn log_int(n: u64) -> Result<Self> {
        let mut v = EntropyValue::zero();
        for (p, e) in factorize(n)? {
            v.add_term(p, BigRational::from_integer(BigInt::from(e)));
        }
        Ok(v)
    }

    /// `log q` for a positive rational `q`.
    pub fn log_rational(q: &BigRational) -> Result<Self> {
        if !q.is_positive() {
            return Err(Error::InvalidMeasure(format!("log of nonpositive {q}")));
        }
        let mut v = EntropyValue::zero();
        for (p, e) in factorize_big(q.numer().magnitude())? {
            v.add_term(p, BigRational::from_integer(BigInt::from(e)));
        }
        for (p, e) in factorize_big(q.denom().magnitude())? {
            v.add_term(p, -BigRational::from_integer(BigInt::from(e)));
        }
        Ok(v)
    }

    /// `coeff * log p` for a prime `p`. Primality is the caller's promise.
    pub fn log_prime_times(p: u64, coeff: BigRational) -> Self {
        let mut v = EntropyValue::zero();
        v.add_term(p, coeff);
        v
    }

    /// `k log p` with small integer `k`, the common shape of window entropies.
    pub fn int_log_prime(k: i64, p: u64) -> Self {
        Self::log_prime_times(p, BigRational::from_integer(BigInt::from(k)))
    }

    fn add_term(&mut self, p: u64, q: BigRational) {
        if q.is_zero() {
            return;
        }
        let slot = self.terms.entry(p).or_insert_with(BigRational::zero);
        *slot += q;
        if slot.is_zero() {
            self.terms.remove(&p);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<u64, BigRational> {
        &self.terms
    }

    /// Coefficient of `log p` (zero when absent).
    pub fn coefficient(&self, p: u64) -> BigRational {
        self.terms.get(&p).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return EntropyValue::zero();
        }
        EntropyValue {
            terms: self.terms.iter().map(|(&p, c)| (p, c * q)).collect(),
        }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(k)))
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(&p, c)| rational_to_f64(c) * (p as f64).ln())
            .fold(0.0, |a, b| a + b)
    }

    /// Sign of the value, decided exactly.
    pub fn signum(&self) -> Ordering {
        if self.terms.is_empty() {
            return Ordering::Equal;
        }
        let approx = self.to_f64();
        let scale: f64 = self
            .terms
            .iter()
            .map(|(&p, c)| (rational_to_f64(c) * (p as f64).ln()).abs())
            .sum();
        if approx.abs() > 1e-9 * scale.max(1.0) {
            return if approx > 0.0 {
                Ordering::Greater
            } else {
                Ordering::Less
            };
        }
        self.exact_signum()
    }

    /// Compares `Π p^{n_p}` against `Π p^{-n_p}` after clearing denominators.
    fn exact_signum(&self) -> Ordering {
        let lcm = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut pos = BigUint::one();
        let mut neg = BigUint::one();
        for (&p, c) in &self.terms {
            let n = (c * BigRational::from_integer(lcm.clone())).to_integer();
            let e = n
                .magnitude()
                .to_u32()
                .expect("exponent too large for exact comparison");
            let pow = BigUint::from(p).pow(e);
            match n.sign() {
                Sign::Plus => pos *= pow,
                Sign::Minus => neg *= pow,
                Sign::NoSign => {}
            }
        }
        pos.cmp(&neg)
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }
}

fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl Ord for EntropyValue {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        (self - other).signum()
    }
}

impl PartialOrd for EntropyValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &EntropyValue {
    type Output = EntropyValue;
    fn add(self, rhs: &EntropyValue) -> EntropyValue {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for EntropyValue {
    type Output = EntropyValue;
    fn add(mut self, rhs: EntropyValue) -> EntropyValue {
        self += &rhs;
        self
    }
}

impl AddAssign<&EntropyValue> for EntropyValue {
    fn add_assign(&mut self, rhs: &EntropyValue) {
        for (&p, c) in &rhs.terms {
            self.add_term(p, c.clone());
        }
    }
}

impl Sub for &EntropyValue {
    type Output = EntropyValue;
    fn sub(self, rhs: &EntropyValue) -> EntropyValue {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for EntropyValue {
    type Output = EntropyValue;
    fn sub(mut self, rhs: EntropyValue) -> EntropyValue {
        self -= &rhs;
        self
    }
}

impl SubAssign<&EntropyValue> for EntropyValue {
    fn sub_assign(&mut self, rhs: &EntropyValue) {
        for (&p, c) in &rhs.terms {
            self.add_term(p, -c.clone());
        }
    }
}

impl Neg for EntropyValue {
    type Output = EntropyValue;
    fn neg(self) -> EntropyValue {
        EntropyValue {
            terms: self.terms.into_iter().map(|(p, c)| (p, -c)).collect(),
        }
    }
}

impl Mul<&BigRational> for &EntropyValue {
    type Output = EntropyValue;
    fn mul(self, rhs: &BigRational) -> EntropyValue {
        self.scale(rhs)
    }
}

impl std::iter::Sum for EntropyValue {
    fn sum<I: Iterator<Item = EntropyValue>>(iter: I) -> Self {
        iter.fold(EntropyValue::zero(), |acc, v| acc + v)
    }
}

impl fmt::Display for EntropyValue {
    /// Renders as `log(2)`, `-3/4*log(3)`, `2*log(2) - 3/4*log(3)`, or `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (p, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if !mag.is_one() {
                write!(f, "{mag}*")?;
            }
            write!(f, "log({p})")?;
        }
        Ok(())
    }
}

impl fmt::Debug for EntropyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EntropyValue({self} ~ {:.6})", self.to_f64())
    }
}

struct Terms<'a>(&'a BTreeMap<u64, BigRational>);

impl Serialize for Terms<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (p, c) in self.0 {
            m.serialize_entry(&p.to_string(), &c.to_string())?;
        }
        m.end()
    }
}

impl Serialize for EntropyValue {
    /// `{"terms": {"2": "3/2"}, "float": 1.0397}`
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("EntropyValue", 2)?;
        st.serialize_field("terms", &Terms(&self.terms))?;
        st.serialize_field("float", &self.to_f64())?;
        st.end()
    }
}
