//! Truncated p-adic numbers with explicit precision tracking.
//!
//! A nonzero value is `p^v * u` with `u` a unit known modulo `p^(A - v)`;
//! `A` is the absolute precision. Zero carries only its precision, which may
//! be exact (zero entries of constant matrices stay exact under arithmetic).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::Error;

/// Default relative precision of freshly built constants.
pub const DEFAULT_PRECISION: i32 = 12;

const ZERO_V: i32 = i32::MAX;
/// Absolute precision marker for an exactly known zero.
pub const EXACT: i32 = i32::MAX;

const MAX_P: usize = 13;
const POW_LEN: usize = 41;

const fn pow_table() -> [[u64; POW_LEN]; MAX_P + 1] {
    let mut t = [[0u64; POW_LEN]; MAX_P + 1];
    let mut p = 2;
    while p <= MAX_P {
        let mut r = 0;
        let mut acc: u64 = 1;
        while r < POW_LEN {
            t[p][r] = acc;
            // stop growing once the next power would not fit below 2^63
            if acc > (1u64 << 63) / (p as u64) {
                acc = 0;
            } else if acc != 0 {
                acc *= p as u64;
            }
            r += 1;
        }
        p += 1;
    }
    t
}

static POW: [[u64; POW_LEN]; MAX_P + 1] = pow_table();

/// `p^r` for the supported primes, panicking past the relative cap.
#[inline]
pub fn ppow(p: u32, r: i32) -> u64 {
    let v = POW[p as usize][r as usize];
    debug_assert!(v != 0, "power {p}^{r} exceeds the unit capacity");
    v
}

/// Largest relative precision whose modulus fits the unit storage.
pub fn rel_cap(p: u32) -> i32 {
    let mut r = 0;
    while (r as usize + 1) < POW_LEN && POW[p as usize][r as usize + 1] != 0 {
        r += 1;
    }
    r
}

pub fn is_supported_prime(p: u32) -> bool {
    matches!(p, 3 | 5 | 7 | 11 | 13)
}

#[inline]
fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Inverse of a unit modulo `m` by extended Euclid.
fn invmod(a: u64, m: u64) -> u64 {
    let (mut r0, mut r1) = (m as i128, a as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1);
    s0.rem_euclid(m as i128) as u64
}

fn vp_u64(p: u32, mut n: u64) -> (i32, u64) {
    let mut k = 0;
    while n.is_multiple_of(p as u64) {
        n /= p as u64;
        k += 1;
    }
    (k, n)
}

fn vp_i128(p: u32, mut n: i128) -> (i32, i128) {
    let mut k = 0;
    while n % p as i128 == 0 {
        n /= p as i128;
        k += 1;
    }
    (k, n)
}

#[inline]
fn prec_shift(a: i32, d: i32) -> i32 {
    if a == EXACT {
        EXACT
    } else {
        a + d
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PAdic {
    p: u32,
    v: i32,
    a: i32,
    u: u64,
}

impl PAdic {
    /// Zero known modulo `p^a` (`EXACT` for an exact zero).
    pub fn zero_mod(p: u32, a: i32) -> Self {
        PAdic { p, v: ZERO_V, a, u: 0 }
    }

    pub fn zero(p: u32) -> Self {
        Self::zero_mod(p, EXACT)
    }

    /// Builds `p^v * u` with `u` reduced modulo `p^rel`; `u` must be a unit.
    fn from_parts(p: u32, v: i32, u: u64, rel: i32) -> Self {
        let rel = rel.min(rel_cap(p));
        let m = ppow(p, rel);
        PAdic { p, v, a: v + rel, u: u % m }
    }

    pub fn from_i128(p: u32, n: i128, rel: i32) -> Self {
        if n == 0 {
            return Self::zero(p);
        }
        let (k, rest) = vp_i128(p, n);
        let m = ppow(p, rel.min(rel_cap(p))) as i128;
        Self::from_parts(p, k, rest.rem_euclid(m) as u64, rel)
    }

    pub fn from_int(p: u32, n: i64, rel: i32) -> Self {
        Self::from_i128(p, n as i128, rel)
    }

    /// The rational `num/den`; `den` may contain powers of `p`.
    pub fn from_ratio(p: u32, num: i64, den: i64, rel: i32) -> Result<Self, Error> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        let n = Self::from_int(p, num, rel);
        let d = Self::from_int(p, den, rel);
        Ok(n * d.inv()?)
    }

    /// `p^k` at relative precision `rel`.
    pub fn pi_pow(p: u32, k: i32, rel: i32) -> Self {
        Self::from_parts(p, k, 1, rel)
    }

    pub fn one(p: u32, rel: i32) -> Self {
        Self::pi_pow(p, 0, rel)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.v == ZERO_V
    }

    /// Valuation, `None` for zero.
    pub fn valuation(&self) -> Option<i32> {
        (!self.is_zero()).then_some(self.v)
    }

    /// Absolute precision, `None` for an exact zero.
    pub fn precision(&self) -> Option<i32> {
        (self.a != EXACT).then_some(self.a)
    }

    /// Unit digits as an integer in `[0, p^(A-v))`.
    pub fn unit(&self) -> u64 {
        self.u
    }

    fn rel(&self) -> i32 {
        self.a - self.v
    }

    /// Treats the stored digits as an exact representative and pads the
    /// relative precision to `rel`.
    pub fn lifted(&self, rel: i32) -> Self {
        if self.is_zero() {
            return Self::zero(self.p);
        }
        let rel = rel.min(rel_cap(self.p));
        PAdic { p: self.p, v: self.v, a: self.v + rel, u: self.u }
    }

    /// Reduces the precision to at most `a`.
    pub fn truncated(&self, a: i32) -> Self {
        if a >= self.a {
            return *self;
        }
        if self.is_zero() || self.v >= a {
            return Self::zero_mod(self.p, a);
        }
        let m = ppow(self.p, a - self.v);
        PAdic { p: self.p, v: self.v, a, u: self.u % m }
    }

    pub fn inv(&self) -> Result<Self, Error> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let r = self.rel();
        let m = ppow(self.p, r);
        Ok(PAdic { p: self.p, v: -self.v, a: -self.v + r, u: invmod(self.u, m) })
    }

    pub fn div(&self, rhs: &Self) -> Result<Self, Error> {
        Ok(*self * rhs.inv()?)
    }

    /// Multiplies by `p^k`.
    pub fn shift(&self, k: i32) -> Self {
        if self.is_zero() {
            return Self::zero_mod(self.p, prec_shift(self.a, k));
        }
        PAdic { p: self.p, v: self.v + k, a: self.a + k, u: self.u }
    }

    /// `x` is in `p^k o`.
    pub fn in_ideal(&self, k: i32) -> Result<bool, Error> {
        if self.is_zero() {
            return if self.a >= k { Ok(true) } else { Err(Error::PrecisionExhausted) };
        }
        Ok(self.v >= k)
    }

    pub fn is_unit(&self) -> Result<bool, Error> {
        if self.is_zero() {
            return if self.a >= 1 { Ok(false) } else { Err(Error::PrecisionExhausted) };
        }
        Ok(self.v == 0)
    }

    /// `x` lies in `1 + p`.
    pub fn in_one_plus_p(&self) -> Result<bool, Error> {
        (*self - PAdic::one(self.p, DEFAULT_PRECISION)).in_ideal(1)
    }

    /// Residue of a unit modulo `p^k` (the value must lie in `o`).
    pub fn residue(&self, k: i32) -> Result<u64, Error> {
        if self.is_zero() {
            return if self.a >= k { Ok(0) } else { Err(Error::PrecisionExhausted) };
        }
        if self.v < 0 {
            return Err(Error::BadParameter("residue of a non-integral value".into()));
        }
        if self.v >= k {
            return Ok(0);
        }
        if self.a < k {
            return Err(Error::PrecisionExhausted);
        }
        let m = ppow(self.p, k - self.v);
        Ok((self.u % m) * ppow(self.p, self.v))
    }

    /// The rational `a / p^m` in `[0,1)` with `x - a/p^m` integral.
    pub fn fractional_part(&self) -> Result<(u64, u32), Error> {
        if self.a < 0 {
            return Err(Error::PrecisionExhausted);
        }
        if self.is_zero() || self.v >= 0 {
            return Ok((0, 0));
        }
        let m = -self.v;
        Ok((self.u % ppow(self.p, m), m as u32))
    }

    /// `|x| = q^{-v(x)}` as a rational (numerator, denominator).
    pub fn abs(&self) -> Option<(u64, u64)> {
        let v = self.valuation()?;
        Some(if v >= 0 { (1, ppow(self.p, v)) } else { (ppow(self.p, -v), 1) })
    }

    /// Exact value of the stored representative as a rational (num, den).
    pub fn to_rational(&self) -> (i128, i128) {
        if self.is_zero() {
            return (0, 1);
        }
        if self.v >= 0 {
            (self.u as i128 * ppow(self.p, self.v) as i128, 1)
        } else {
            (self.u as i128, ppow(self.p, -self.v) as i128)
        }
    }

    /// The same representative read as a balanced integer combination, used
    /// for compact human-readable output.
    fn balanced_unit(&self) -> i128 {
        let m = ppow(self.p, self.rel()) as i128;
        let u = self.u as i128;
        if 2 * u > m {
            u - m
        } else {
            u
        }
    }
}

/// Representatives of `p^k_low o / p^k_high o`, each with precision `k_high`.
pub fn enumerate_residues(p: u32, k_low: i32, k_high: i32) -> Vec<PAdic> {
    assert!(k_low <= k_high);
    let count = ppow(p, k_high - k_low);
    (0..count)
        .map(|a| {
            if a == 0 {
                PAdic::zero_mod(p, k_high)
            } else {
                let (k, rest) = vp_u64(p, a);
                let v = k_low + k;
                PAdic { p, v, a: k_high, u: rest % ppow(p, k_high - v) }
            }
        })
        .collect()
}

impl Add for PAdic {
    type Output = PAdic;
    fn add(self, y: PAdic) -> PAdic {
        assert_eq!(self.p, y.p, "mixed primes");
        let p = self.p;
        let a = self.a.min(y.a);
        match (self.is_zero(), y.is_zero()) {
            (true, true) => PAdic::zero_mod(p, a),
            (true, false) => y.truncated(a),
            (false, true) => self.truncated(a),
            (false, false) => {
                let v = self.v.min(y.v);
                let r = a - v;
                let m = ppow(p, r);
                let lift = |x: &PAdic| {
                    let s = x.v - v;
                    if s >= r {
                        0
                    } else {
                        mulmod(x.u % m, ppow(p, s), m)
                    }
                };
                let s = (lift(&self) + lift(&y)) % m;
                if s == 0 {
                    return PAdic::zero_mod(p, a);
                }
                let (k, rest) = vp_u64(p, s);
                PAdic { p, v: v + k, a, u: rest }
            }
        }
    }
}

impl Neg for PAdic {
    type Output = PAdic;
    fn neg(self) -> PAdic {
        if self.is_zero() {
            return self;
        }
        let m = ppow(self.p, self.rel());
        PAdic { u: (m - self.u) % m, ..self }
    }
}

impl Sub for PAdic {
    type Output = PAdic;
    fn sub(self, y: PAdic) -> PAdic {
        self + (-y)
    }
}

impl Mul for PAdic {
    type Output = PAdic;
    fn mul(self, y: PAdic) -> PAdic {
        assert_eq!(self.p, y.p, "mixed primes");
        let p = self.p;
        match (self.is_zero(), y.is_zero()) {
            (true, true) => {
                let a = if self.a == EXACT || y.a == EXACT { EXACT } else { self.a + y.a };
                PAdic::zero_mod(p, a)
            }
            (true, false) => PAdic::zero_mod(p, prec_shift(self.a, y.v)),
            (false, true) => PAdic::zero_mod(p, prec_shift(y.a, self.v)),
            (false, false) => {
                let r = self.rel().min(y.rel());
                let m = ppow(p, r);
                let v = self.v + y.v;
                PAdic { p, v, a: v + r, u: mulmod(self.u % m, y.u % m, m) }
            }
        }
    }
}

impl fmt::Debug for PAdic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for PAdic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.p;
        if self.is_zero() {
            return match self.precision() {
                None => write!(f, "0"),
                Some(a) => write!(f, "O({p}^{a})"),
            };
        }
        let u = self.balanced_unit();
        match self.v {
            0 => write!(f, "{u}"),
            v => write!(f, "{u}*{p}^{v}"),
        }?;
        write!(f, " + O({p}^{})", self.a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const N: i32 = DEFAULT_PRECISION;

    fn q(n: i64) -> PAdic {
        PAdic::from_int(3, n, N)
    }

    #[test]
    fn additive_inverse_gives_zero() {
        let s = q(1) + q(-1);
        assert!(s.is_zero());
        assert_eq!(s.precision(), Some(N));
    }

    #[test]
    fn carries_into_unit() {
        let s = PAdic::pi_pow(3, 1, N) + q(1);
        assert_eq!(s.valuation(), Some(0));
        assert_eq!(s.unit(), 4);
    }

    #[test]
    fn thirds_sum_to_one() {
        let a = PAdic::from_ratio(3, 1, 3, N).unwrap();
        let b = PAdic::from_ratio(3, 2, 3, N).unwrap();
        let s = a + b;
        assert_eq!(s.valuation(), Some(0));
        assert!((s - q(1)).is_zero());
    }

    #[test]
    fn inverse_of_two() {
        let i = q(2).inv().unwrap();
        assert_eq!(i.unit() % 3, 2);
        // independent check: 2 * u == 1 mod 3^N using plain integers
        let m = 3u64.pow(N as u32);
        assert_eq!((2 * i.unit()) % m, 1);
    }

    #[test]
    fn uniformizer_times_inverse() {
        let x = PAdic::pi_pow(3, 1, N) * PAdic::pi_pow(3, -1, N);
        assert!((x - q(1)).is_zero());
    }

    #[test]
    fn fractional_parts() {
        assert_eq!(q(7).fractional_part().unwrap(), (0, 0));
        assert_eq!(PAdic::pi_pow(3, -1, N).fractional_part().unwrap(), (1, 1));
        let x = PAdic::from_ratio(3, 5, 9, N).unwrap();
        assert_eq!(x.fractional_part().unwrap(), (5, 2));
        let lost = PAdic::zero_mod(3, -1);
        assert!(matches!(lost.fractional_part(), Err(Error::PrecisionExhausted)));
    }

    #[test]
    fn residues_enumerate() {
        let r = enumerate_residues(3, 0, 1);
        assert_eq!(r.len(), 3);
        let r = enumerate_residues(3, -1, 1);
        assert_eq!(r.len(), 9);
        for (i, x) in r.iter().enumerate() {
            let (n, d) = x.to_rational();
            assert_eq!(n * 3, i as i128 * d);
        }
    }

    #[test]
    fn membership_predicates() {
        assert!(PAdic::pi_pow(3, 2, N).in_ideal(1).unwrap());
        assert!((q(1) + PAdic::pi_pow(3, 1, N)).in_one_plus_p().unwrap());
        assert!(!PAdic::pi_pow(3, -1, N).in_ideal(0).unwrap());
        assert!(PAdic::zero_mod(3, 2).in_ideal(3).is_err());
    }

    #[test]
    fn precision_tracks_negative_valuations() {
        let x = PAdic::pi_pow(3, -5, N);
        let y = x * x;
        assert_eq!(y.valuation(), Some(-10));
        assert_eq!(y.precision(), Some(-10 + N));
    }

    #[test]
    fn cap_fits_storage() {
        for p in [3u32, 5, 7, 11, 13] {
            let c = rel_cap(p);
            assert!(c >= 16);
            assert!((ppow(p, c) as u128) * (p as u128) > (1u128 << 63) || c == POW_LEN as i32 - 1);
        }
    }
}
