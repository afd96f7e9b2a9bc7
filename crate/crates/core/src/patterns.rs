//! Additive sign-pattern statistics for a fixed N: the correlation sum
//! over lambda(n)lambda(N-n), the four sign-pattern counts, the base
//! exceptional set E(N), and witness pairs a + b = N with
//! lambda(a) = lambda(b) = -1.

use serde::{Deserialize, Serialize};

use crate::arith::ArithTable;
use crate::bitset::BitSet;
use crate::error::{Error, Result};

/// A sign in {-1, +1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    #[inline]
    pub fn from_i8(v: i8) -> Sign {
        if v >= 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    #[inline]
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.as_i8())
    }
}

/// Counts of the four patterns (lambda(n), lambda(N-n)) over 1 <= n < N.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignPatternCounts {
    pub pp: u64,
    pub pm: u64,
    pub mp: u64,
    pub mm: u64,
}

impl SignPatternCounts {
    pub fn get(&self, first: Sign, second: Sign) -> u64 {
        match (first, second) {
            (Sign::Plus, Sign::Plus) => self.pp,
            (Sign::Plus, Sign::Minus) => self.pm,
            (Sign::Minus, Sign::Plus) => self.mp,
            (Sign::Minus, Sign::Minus) => self.mm,
        }
    }

    pub fn total(&self) -> u64 {
        self.pp + self.pm + self.mp + self.mm
    }

    /// Agreement count for a sign eta: #{n : lambda(n)lambda(N-n) = eta}.
    pub fn agreement(&self, eta: Sign) -> u64 {
        match eta {
            Sign::Plus => self.pp + self.mm,
            Sign::Minus => self.pm + self.mp,
        }
    }
}

/// Full pattern statistics for one modulus.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PatternReport {
    pub modulus: u64,
    /// Correlation sum over 1 <= n < N of lambda(n)lambda(N-n).
    pub corr: i64,
    pub counts: SignPatternCounts,
    /// Sign minimizing the agreement count (ties broken to +1).
    pub eta_min: Sign,
    /// |E(N)|, the smaller agreement count.
    pub e_size: u64,
}

/// The set E_d(N) as a bit set over {1, .., N-1}; d = 1 denotes the base
/// set E(N) itself (which is not the d = 1 dilation set, always empty).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExceptionalSet {
    pub modulus: u64,
    pub d: u64,
    pub bits: BitSet,
    pub card: u64,
}

impl ExceptionalSet {
    pub fn from_bits(modulus: u64, d: u64, bits: BitSet) -> Self {
        let card = bits.count();
        ExceptionalSet {
            modulus,
            d,
            bits,
            card,
        }
    }

    pub fn members(&self) -> Vec<u64> {
        self.bits.iter().map(|i| i as u64).collect()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.bits.contains(n as usize)
    }
}

fn check_modulus(table: &ArithTable, modulus: u64) -> Result<()> {
    if modulus < 3 || modulus > table.n_max() {
        return Err(Error::InvalidArgument(format!(
            "modulus {modulus} outside 3..={}",
            table.n_max()
        )));
    }
    Ok(())
}

/// Correlation, the four pattern counts, the minimizing sign and |E(N)|.
pub fn pattern_report(table: &ArithTable, modulus: u64) -> Result<PatternReport> {
    check_modulus(table, modulus)?;
    let mut counts = SignPatternCounts::default();
    for n in 1..modulus {
        match (table.lambda(n), table.lambda(modulus - n)) {
            (1, 1) => counts.pp += 1,
            (1, _) => counts.pm += 1,
            (_, 1) => counts.mp += 1,
            _ => counts.mm += 1,
        }
    }
    let agree = counts.agreement(Sign::Plus);
    let disagree = counts.agreement(Sign::Minus);
    let corr = agree as i64 - disagree as i64;
    let eta_min = if agree <= disagree {
        Sign::Plus
    } else {
        Sign::Minus
    };
    Ok(PatternReport {
        modulus,
        corr,
        counts,
        eta_min,
        e_size: agree.min(disagree),
    })
}

/// E(N) = {n < N : lambda(n)lambda(N-n) = eta} for the minimizing eta,
/// ties broken to +1.
pub fn exceptional_set_base(table: &ArithTable, modulus: u64) -> Result<(Sign, ExceptionalSet)> {
    check_modulus(table, modulus)?;
    let report = pattern_report(table, modulus)?;
    let eta = report.eta_min;
    let mut bits = BitSet::new(modulus as usize);
    for n in 1..modulus {
        if table.lambda(n) * table.lambda(modulus - n) == eta.as_i8() {
            bits.insert(n as usize);
        }
    }
    Ok((eta, ExceptionalSet::from_bits(modulus, 1, bits)))
}

/// Which mechanism produced a witness pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    /// N divisible by 8: lift of 8 = 4 + 4 = 3 + 5.
    EightLift,
    /// lambda(N) = +1: the center pair a = b = N/2.
    CenterPair,
    /// N = 2^k M^2 N' with M >= 11 odd: pair from a sign-agreement split of M.
    OddSquare,
    /// Ascending brute-force scan.
    Scan,
}

impl std::fmt::Display for CaseTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CaseTag::EightLift => "eight-lift",
            CaseTag::CenterPair => "center-pair",
            CaseTag::OddSquare => "odd-square",
            CaseTag::Scan => "scan",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShustermanWitness {
    pub a: u64,
    pub b: u64,
    pub tag: CaseTag,
}

/// Outcome of the witness search; a missing witness is a reportable result,
/// never a silent absence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShustermanOutcome {
    Witness(ShustermanWitness),
    NoWitness { modulus: u64 },
}

/// For even N, find a, b with a + b = N and lambda(a) = lambda(b) = -1.
///
/// The mechanisms are tried in a fixed order: the 8-divisibility lift, the
/// center pair when lambda(N) = +1, the odd-square decomposition, then an
/// ascending brute-force scan that guarantees completeness.
pub fn shusterman_witness(table: &ArithTable, modulus: u64) -> Result<ShustermanOutcome> {
    if modulus % 2 != 0 || modulus < 4 || modulus > table.n_max() {
        return Err(Error::InvalidArgument(format!(
            "witness search needs even 4 <= N <= {}, got {modulus}",
            table.n_max()
        )));
    }
    if modulus % 8 == 0 {
        let rest = modulus / 8;
        let (a, b) = if table.lambda(rest) == -1 {
            (4 * rest, 4 * rest)
        } else {
            (3 * rest, 5 * rest)
        };
        debug_assert!(table.lambda(a) == -1 && table.lambda(b) == -1);
        return Ok(ShustermanOutcome::Witness(ShustermanWitness {
            a,
            b,
            tag: CaseTag::EightLift,
        }));
    }
    if table.lambda(modulus) == 1 {
        let half = modulus / 2;
        debug_assert_eq!(table.lambda(half), -1);
        return Ok(ShustermanOutcome::Witness(ShustermanWitness {
            a: half,
            b: half,
            tag: CaseTag::CenterPair,
        }));
    }
    // lambda(N) = -1 and 8 does not divide N: N = 2^k M^2 N' with M the
    // largest odd square divisor's root. For M >= 11 a sign-agreement split
    // of M yields the pair (2^k N' (M^2 - d^2), 2^k N' d^2).
    let two_part = if modulus % 4 == 0 { 4 } else { 2 };
    let odd = modulus / two_part;
    let m_root = largest_square_root_divisor(table, odd);
    if m_root >= 11 {
        let cofactor = two_part * (odd / (m_root * m_root));
        let d = square_pattern_witness(table, m_root)?;
        let a = cofactor * (m_root * m_root - d * d);
        let b = cofactor * d * d;
        debug_assert_eq!(a + b, modulus);
        debug_assert!(table.lambda(a) == -1 && table.lambda(b) == -1);
        return Ok(ShustermanOutcome::Witness(ShustermanWitness {
            a,
            b,
            tag: CaseTag::OddSquare,
        }));
    }
    for a in 1..=modulus / 2 {
        if table.lambda(a) == -1 && table.lambda(modulus - a) == -1 {
            return Ok(ShustermanOutcome::Witness(ShustermanWitness {
                a,
                b: modulus - a,
                tag: CaseTag::Scan,
            }));
        }
    }
    Ok(ShustermanOutcome::NoWitness { modulus })
}

/// Largest m with m^2 dividing n (n odd here, so m is odd).
fn largest_square_root_divisor(table: &ArithTable, mut n: u64) -> u64 {
    let mut root = 1u64;
    while n > 1 {
        let p = table.pplus(n);
        let mut e = 0u32;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        root *= p.pow(e / 2);
    }
    root
}

/// For odd M >= 11, return odd d = M - 2n >= 1 from the first 1 <= n < M/2
/// with lambda(n) = lambda(M - n); then lambda(M^2 - d^2) = lambda(d^2) = +1.
///
/// Absence of such an n for M >= 11 contradicts a proven guarantee and is
/// surfaced as a loud error.
pub fn square_pattern_witness(table: &ArithTable, m: u64) -> Result<u64> {
    if m % 2 == 0 || m < 11 {
        return Err(Error::InvalidArgument(format!(
            "square split needs odd M >= 11, got {m}"
        )));
    }
    let msq = m.checked_mul(m).ok_or(Error::Overflow)?;
    if msq > table.n_max() {
        return Err(Error::TableTooSmall {
            required: msq,
            available: table.n_max(),
        });
    }
    for n in 1..m.div_ceil(2) {
        if table.lambda(n) == table.lambda(m - n) {
            return Ok(m - 2 * n);
        }
    }
    Err(Error::MissingSquareSplit { m })
}
