//! Exact values in the cyclotomic fields Q(zeta_{p^M}).
//!
//! Values are stored in the power basis `zeta^j, 0 <= j < phi(p^M)` at the
//! smallest level containing them, so equality is coefficient equality.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::padic::{ppow, PAdic};
use crate::Error;

/// Highest supported level.
pub const MAX_LEVEL: u32 = 6;

fn phi(p: u32, m: u32) -> usize {
    if m == 0 {
        1
    } else {
        (ppow(p, m as i32) - ppow(p, m as i32 - 1)) as usize
    }
}

fn full_len(p: u32, m: u32) -> usize {
    ppow(p, m as i32) as usize
}

/// Reduces a group-ring vector of length `p^m` to the power basis.
fn reduce_full(p: u32, m: u32, mut full: Vec<BigRational>) -> Vec<BigRational> {
    if m == 0 {
        return full;
    }
    let h = full_len(p, m - 1);
    let ph = phi(p, m);
    for j in ph..full.len() {
        if full[j].is_zero() {
            continue;
        }
        let c = std::mem::replace(&mut full[j], BigRational::zero());
        let i = j - ph;
        for k in 0..(p as usize - 1) {
            full[i + k * h] -= &c;
        }
    }
    full.truncate(ph);
    full
}

#[derive(Clone, PartialEq, Eq)]
pub struct Cyclotomic {
    p: u32,
    level: u32,
    coeffs: Vec<BigRational>,
}

impl Cyclotomic {
    fn from_full(p: u32, level: u32, full: Vec<BigRational>) -> Self {
        let coeffs = reduce_full(p, level, full);
        let mut c = Cyclotomic { p, level, coeffs };
        c.normalize();
        c
    }

    fn normalize(&mut self) {
        while self.level > 0 {
            let p = self.p as usize;
            let movable = self
                .coeffs
                .iter()
                .enumerate()
                .all(|(j, c)| c.is_zero() || j % p == 0);
            if !movable {
                break;
            }
            let new_len = phi(self.p, self.level - 1);
            let mut out = vec![BigRational::zero(); new_len];
            for (j, c) in self.coeffs.iter().enumerate() {
                if !c.is_zero() {
                    out[j / p] = c.clone();
                }
            }
            self.coeffs = out;
            self.level -= 1;
        }
    }

    fn embedded(&self, level: u32) -> Vec<BigRational> {
        debug_assert!(level >= self.level);
        let step = ppow(self.p, (level - self.level) as i32) as usize;
        let mut out = vec![BigRational::zero(); phi(self.p, level)];
        for (j, c) in self.coeffs.iter().enumerate() {
            out[j * step] = c.clone();
        }
        out
    }

    fn to_full(&self, level: u32) -> Vec<BigRational> {
        let mut v = self.embedded(level);
        v.resize(full_len(self.p, level), BigRational::zero());
        v
    }

    pub fn zero(p: u32) -> Self {
        Cyclotomic { p, level: 0, coeffs: vec![BigRational::zero()] }
    }

    pub fn one(p: u32) -> Self {
        Self::from_rational(p, BigRational::one())
    }

    pub fn from_rational(p: u32, r: BigRational) -> Self {
        Cyclotomic { p, level: 0, coeffs: vec![r] }
    }

    pub fn from_int(p: u32, n: i64) -> Self {
        Self::from_rational(p, BigRational::from_integer(BigInt::from(n)))
    }

    /// `exp(2 pi i a / p^m)`.
    pub fn root_of_unity(p: u32, a: u64, m: u32) -> Result<Self, Error> {
        if m > MAX_LEVEL {
            return Err(Error::LevelTooHigh(m));
        }
        let n = full_len(p, m);
        let mut full = vec![BigRational::zero(); n];
        full[(a % n as u64) as usize] = BigRational::one();
        Ok(Self::from_full(p, m, full))
    }

    /// Root of unity for a rational `num/den` whose denominator is a power of p.
    pub fn root_of_unity_rational(p: u32, num: i64, den: i64) -> Result<Self, Error> {
        let mut d = den.unsigned_abs();
        let mut m = 0;
        while d > 1 {
            if !d.is_multiple_of(p as u64) {
                return Err(Error::BadParameter("denominator is not a power of p".into()));
            }
            d /= p as u64;
            m += 1;
        }
        let n = ppow(p, m as i32) as i64;
        let a = (num * den.signum()).rem_euclid(n);
        Self::root_of_unity(p, a as u64, m)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.level == 0 && self.coeffs[0].is_zero()
    }

    pub fn to_rational(&self) -> Result<BigRational, Error> {
        if self.level == 0 {
            Ok(self.coeffs[0].clone())
        } else {
            Err(Error::NotRational)
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.p, o.p);
        let level = self.level.max(o.level);
        let mut a = self.embedded(level);
        for (x, y) in a.iter_mut().zip(o.embedded(level)) {
            *x += y;
        }
        let mut c = Cyclotomic { p: self.p, level, coeffs: a };
        c.normalize();
        c
    }

    pub fn neg(&self) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(-1)))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.p, o.p);
        let level = self.level.max(o.level);
        let n = full_len(self.p, level);
        let a = self.embedded(level);
        let b = o.embedded(level);
        let mut full = vec![BigRational::zero(); n];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    full[(i + j) % n] += x * y;
                }
            }
        }
        Self::from_full(self.p, level, full)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let mut c = self.clone();
        for x in c.coeffs.iter_mut() {
            *x *= r;
        }
        if r.is_zero() {
            return Self::zero(self.p);
        }
        c
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(n)))
    }

    /// Complex conjugation `zeta -> zeta^{-1}`.
    pub fn conjugate(&self) -> Self {
        let n = full_len(self.p, self.level);
        let full = self.to_full(self.level);
        let mut out = vec![BigRational::zero(); n];
        for (j, c) in full.into_iter().enumerate() {
            out[(n - j) % n] = c;
        }
        Self::from_full(self.p, self.level, out)
    }

    /// Exact rendering: a rational, or `[c_0, c_1, ...]` at level M.
    pub fn render(&self) -> String {
        if self.level == 0 {
            return render_rational(&self.coeffs[0]);
        }
        let parts: Vec<String> = self.coeffs.iter().map(render_rational).collect();
        format!("[{}]@{}^{}", parts.join(", "), self.p, self.level)
    }
}

pub fn render_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// `psi(x) = exp(2 pi i frac(x))`.
pub fn psi(x: &PAdic) -> Result<Cyclotomic, Error> {
    let (a, m) = x.fractional_part()?;
    Cyclotomic::root_of_unity(x.prime(), a, m)
}

/// `psi0(x) = psi(x / varpi)`.
pub fn psi0(x: &PAdic) -> Result<Cyclotomic, Error> {
    psi(&x.shift(-1))
}

/// Integer-weighted sum of roots of unity, accumulated in the group ring and
/// reduced once at the end.
#[derive(Clone, Debug)]
pub struct CycloSum {
    p: u32,
    level: u32,
    counts: Vec<i128>,
}

impl CycloSum {
    pub fn new(p: u32) -> Self {
        CycloSum { p, level: 0, counts: vec![0] }
    }

    pub fn with_level(p: u32, level: u32) -> Self {
        CycloSum { p, level, counts: vec![0; full_len(p, level)] }
    }

    fn raise(&mut self, m: u32) {
        let step = ppow(self.p, (m - self.level) as i32) as usize;
        let mut out = vec![0i128; full_len(self.p, m)];
        for (j, c) in self.counts.iter().enumerate() {
            out[j * step] = *c;
        }
        self.counts = out;
        self.level = m;
    }

    /// Adds `w * exp(2 pi i a / p^m)`.
    pub fn add_root(&mut self, a: u64, m: u32, w: i128) -> Result<(), Error> {
        if m > MAX_LEVEL {
            return Err(Error::LevelTooHigh(m));
        }
        if m > self.level {
            self.raise(m);
        }
        let n = self.counts.len() as u64;
        let idx = (a * ppow(self.p, (self.level - m) as i32)) % n;
        self.counts[idx as usize] += w;
        Ok(())
    }

    pub fn add_psi(&mut self, x: &PAdic, w: i128) -> Result<(), Error> {
        let (a, m) = x.fractional_part()?;
        self.add_root(a, m, w)
    }

    pub fn merge(&mut self, o: &CycloSum) {
        if o.level > self.level {
            self.raise(o.level);
        }
        let step = ppow(self.p, (self.level - o.level) as i32) as usize;
        for (j, c) in o.counts.iter().enumerate() {
            self.counts[j * step] += *c;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(|c| *c == 0)
    }

    pub fn value(&self) -> Cyclotomic {
        let full = self
            .counts
            .iter()
            .map(|c| BigRational::from_integer(BigInt::from(*c)))
            .collect();
        Cyclotomic::from_full(self.p, self.level, full)
    }
}

/// `q^k` as an exact rational.
pub fn q_pow(p: u32, k: i32) -> BigRational {
    let base = BigInt::from(p);
    let mag = num_traits::pow(base, k.unsigned_abs() as usize);
    if k >= 0 {
        BigRational::from_integer(mag)
    } else {
        BigRational::new(BigInt::one(), mag)
    }
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn is_negative(r: &BigRational) -> bool {
    r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::DEFAULT_PRECISION as N;

    #[test]
    fn trivial_root_is_one() {
        assert_eq!(Cyclotomic::root_of_unity(3, 0, 2).unwrap(), Cyclotomic::one(3));
    }

    #[test]
    fn cube_roots_sum_to_zero() {
        let z = Cyclotomic::root_of_unity(3, 1, 1).unwrap();
        let s = Cyclotomic::one(3).add(&z).add(&z.mul(&z));
        assert!(s.is_zero());
        assert_eq!(s.to_rational().unwrap(), BigRational::zero());
        assert_eq!(z.to_rational(), Err(Error::NotRational));
    }

    #[test]
    fn non_p_power_denominator_rejected() {
        assert!(Cyclotomic::root_of_unity_rational(3, 1, 2).is_err());
    }

    #[test]
    fn roots_multiply_additively() {
        for (a, b) in [(1u64, 5u64), (4, 8), (7, 20)] {
            let x = Cyclotomic::root_of_unity(3, a, 3).unwrap();
            let y = Cyclotomic::root_of_unity(3, b, 3).unwrap();
            assert_eq!(x.mul(&y), Cyclotomic::root_of_unity(3, a + b, 3).unwrap());
            assert!(x.mul(&x.conjugate()) == Cyclotomic::one(3));
        }
    }

    #[test]
    fn psi_trivial_on_integers() {
        let x = PAdic::from_int(3, 17, N);
        assert_eq!(psi(&x).unwrap(), Cyclotomic::one(3));
        let y = PAdic::pi_pow(3, 1, N);
        assert_eq!(psi0(&y).unwrap(), Cyclotomic::one(3));
        let mut s = CycloSum::new(3);
        for a in 0..3 {
            s.add_psi(&PAdic::from_int(3, a, N).shift(-1), 1).unwrap();
        }
        assert!(s.value().is_zero());
    }

    #[test]
    fn level_lowering_is_canonical() {
        // zeta_9^3 is zeta_3
        let a = Cyclotomic::root_of_unity(3, 3, 2).unwrap();
        let b = Cyclotomic::root_of_unity(3, 1, 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.level(), 1);
    }

    #[test]
    fn kloosterman_two_term() {
        // psi0(v + 1/v) for v in {1,2} at p = 3: arguments 2 and 2 + 1/2
        let mut s = CycloSum::new(3);
        for v in 1..3i64 {
            let x = PAdic::from_int(3, v, N);
            let arg = x + x.inv().unwrap();
            s.add_psi(&arg.shift(-1), 1).unwrap();
        }
        // independent: v + v^{-1} mod 3 is 2 for v=1 and 2+2=4=1 for v=2
        let direct = Cyclotomic::root_of_unity(3, 2, 1)
            .unwrap()
            .add(&Cyclotomic::root_of_unity(3, 1, 1).unwrap());
        assert_eq!(s.value(), direct);
        assert_eq!(direct.to_rational().unwrap(), ratio(-1, 1));
    }

    #[test]
    fn level_cap_enforced() {
        assert!(Cyclotomic::root_of_unity(3, 1, 7).is_err());
    }
}
