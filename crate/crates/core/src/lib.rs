//! Exact arithmetic and verification routines for the simple supercuspidal
//! representations of GSp(4) over Q_p: p-adic numbers, cyclotomic values,
//! group elements and subgroups, model vectors, and the local integrals.

pub mod cli;
pub mod cyclo;
pub mod gsp4;
pub mod integrals;
pub mod padic;
pub mod reps;

pub use cyclo::{CycloSum, Cyclotomic};
pub use gsp4::{GSp4, SubgroupTag};
pub use padic::PAdic;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("precision exhausted")]
    PrecisionExhausted,
    #[error("division by zero")]
    DivisionByZero,
    #[error("value is not rational")]
    NotRational,
    #[error("matrix is not in GSp(4)")]
    NotInGroup,
    #[error("element is not in ZK'")]
    NotInH,
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("enumeration budget exceeded")]
    BudgetExceeded,
    #[error("support not located within the shell budget")]
    SupportNotLocated,
    #[error("unsupported vector for this operation")]
    UnsupportedVector,
    #[error("unknown check: {0}")]
    UnknownCheck(String),
    #[error("bad configuration: {0}")]
    BadConfig(String),
    #[error("cyclotomic level {0} above the cap")]
    LevelTooHigh(u32),
}

/// Prime and working precision; builds constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Field {
    pub p: u32,
    pub prec: i32,
}

impl Field {
    pub fn new(p: u32, prec: i32) -> Result<Self, Error> {
        if !padic::is_supported_prime(p) {
            return Err(Error::BadParameter(format!("unsupported prime {p}")));
        }
        if prec < 1 || prec > padic::rel_cap(p) {
            return Err(Error::BadParameter(format!("precision {prec} out of range for p={p}")));
        }
        Ok(Field { p, prec })
    }

    pub fn q(&self) -> i64 {
        self.p as i64
    }

    pub fn int(&self, n: i64) -> PAdic {
        PAdic::from_int(self.p, n, self.prec)
    }

    pub fn rat(&self, num: i64, den: i64) -> PAdic {
        PAdic::from_ratio(self.p, num, den, self.prec).expect("nonzero denominator")
    }

    /// `varpi^k`.
    pub fn pi(&self, k: i32) -> PAdic {
        PAdic::pi_pow(self.p, k, self.prec)
    }

    pub fn zero(&self) -> PAdic {
        PAdic::zero(self.p)
    }

    pub fn one(&self) -> PAdic {
        self.int(1)
    }

    /// Representatives of `p^lo o / p^hi o` lifted to working precision.
    pub fn residues(&self, lo: i32, hi: i32) -> Vec<PAdic> {
        padic::enumerate_residues(self.p, lo, hi)
            .into_iter()
            .map(|x| x.lifted(self.prec))
            .collect()
    }

    /// Unit representatives `1..p-1`.
    pub fn units(&self) -> Vec<PAdic> {
        (1..self.p as i64).map(|n| self.int(n)).collect()
    }
}
