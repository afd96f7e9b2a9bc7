//! Sieve-backed arithmetic backbone: Liouville values lambda(n), prime-factor
//! counts Omega(n), largest prime factors P+(n), friable enumeration and
//! primes in dyadic ranges.
//!
//! The table is built once by a smallest-prime-factor linear sieve and is
//! immutable afterwards, so it can be shared freely across threads.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Hard cap on table size; beyond this the flat arrays stop being a
/// reasonable in-memory representation.
pub const N_MAX_LIMIT: u64 = 1 << 31;

const CACHE_MAGIC: &[u8; 8] = b"LLABTABL";
const CACHE_VERSION: u32 = 1;

/// Arithmetic table for `1..=n_max`.
///
/// Invariants (checked in tests):
/// - `lambda(n) = (-1)^omega(n)` and lambda is completely multiplicative,
/// - `pplus(n)` is prime and divides `n` for `n >= 2`, with `pplus(1) = 1`.
pub struct ArithTable {
    n_max: u64,
    // Indexed by n; slot 0 is unused padding.
    lambda: Vec<i8>,
    omega: Vec<u8>,
    pplus: Vec<u32>,
}

impl ArithTable {
    /// Build the table with a linear (smallest-prime-factor) sieve:
    /// O(n_max) time, one pass over SPF chains for lambda, Omega and P+.
    pub fn build(n_max: u64) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::InvalidArgument("n_max must be >= 1".into()));
        }
        if n_max > N_MAX_LIMIT {
            return Err(Error::InvalidArgument(format!(
                "n_max = {n_max} exceeds the table limit {N_MAX_LIMIT}"
            )));
        }
        let n = n_max as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            for &p in &primes {
                let p = p as usize;
                if p > spf[i] as usize || i * p > n {
                    break;
                }
                spf[i * p] = p as u32;
            }
        }

        let mut lambda = vec![0i8; n + 1];
        let mut omega = vec![0u8; n + 1];
        let mut pplus = vec![0u32; n + 1];
        lambda[1] = 1;
        pplus[1] = 1;
        for i in 2..=n {
            let rest = i / spf[i] as usize;
            lambda[i] = -lambda[rest];
            omega[i] = omega[rest] + 1;
            pplus[i] = if rest == 1 { spf[i] } else { pplus[rest] };
        }

        Ok(ArithTable {
            n_max,
            lambda,
            omega,
            pplus,
        })
    }

    #[inline]
    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    #[inline]
    fn check_range(&self, n: u64) -> Result<()> {
        if n == 0 || n > self.n_max {
            return Err(Error::InvalidArgument(format!(
                "n = {n} outside table range 1..={}",
                self.n_max
            )));
        }
        Ok(())
    }

    /// lambda(n) in {-1, +1}. Panics on out-of-range index; use
    /// [`ArithTable::query`] for checked access.
    #[inline]
    pub fn lambda(&self, n: u64) -> i8 {
        self.lambda[n as usize]
    }

    /// Omega(n): prime factors counted with multiplicity.
    #[inline]
    pub fn omega(&self, n: u64) -> u32 {
        self.omega[n as usize] as u32
    }

    /// P+(n): largest prime factor, with P+(1) = 1.
    #[inline]
    pub fn pplus(&self, n: u64) -> u64 {
        self.pplus[n as usize] as u64
    }

    /// The triple (lambda(n), Omega(n), P+(n)), range-checked.
    pub fn query(&self, n: u64) -> Result<(i8, u32, u64)> {
        self.check_range(n)?;
        Ok((self.lambda(n), self.omega(n), self.pplus(n)))
    }

    #[inline]
    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && n <= self.n_max && self.pplus[n as usize] as u64 == n
    }

    /// Exactly the q-friable integers in `[1, T]`, ascending; 1 is always
    /// included (P+(1) = 1).
    pub fn friable_set(&self, bound: u64, q: u64) -> Result<FriableSet> {
        if bound == 0 || q == 0 {
            return Err(Error::InvalidArgument(
                "friable enumeration needs T >= 1 and q >= 1".into(),
            ));
        }
        self.check_range(bound)?;
        let members: Vec<u64> = (1..=bound).filter(|&m| self.pplus(m) <= q).collect();
        Ok(FriableSet { bound, q, members })
    }

    /// Primes p with `P < p <= 2P`, ascending.
    pub fn primes_between(&self, p: u64) -> Result<Vec<u64>> {
        let hi = 2u64.checked_mul(p).ok_or(Error::Overflow)?;
        if hi > self.n_max {
            return Err(Error::TableTooSmall {
                required: hi,
                available: self.n_max,
            });
        }
        Ok((p + 1..=hi).filter(|&m| self.is_prime(m)).collect())
    }

    /// Primes in `lo..=hi` (inclusive), ascending.
    pub fn primes_in(&self, lo: u64, hi: u64) -> Vec<u64> {
        let hi = hi.min(self.n_max);
        (lo.max(2)..=hi).filter(|&m| self.is_prime(m)).collect()
    }

    /// Serialize to the binary cache format: header (magic, version, n_max),
    /// packed lambda bits (bit n-1 set iff lambda(n) = +1), Omega bytes,
    /// P+ as little-endian u32.
    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&CACHE_VERSION.to_le_bytes())?;
        w.write_all(&self.n_max.to_le_bytes())?;
        let n = self.n_max as usize;
        let mut bits = vec![0u8; n.div_ceil(8)];
        for i in 1..=n {
            if self.lambda[i] > 0 {
                bits[(i - 1) / 8] |= 1 << ((i - 1) % 8);
            }
        }
        w.write_all(&bits)?;
        w.write_all(&self.omega[1..=n])?;
        for i in 1..=n {
            w.write_all(&self.pplus[i].to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    /// Load a table previously written by [`ArithTable::write_cache`].
    pub fn read_cache(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(Error::Cache("bad magic".into()));
        }
        let mut buf4 = [0u8; 4];
        r.read_exact(&mut buf4)?;
        if u32::from_le_bytes(buf4) != CACHE_VERSION {
            return Err(Error::Cache("unsupported version".into()));
        }
        let mut buf8 = [0u8; 8];
        r.read_exact(&mut buf8)?;
        let n_max = u64::from_le_bytes(buf8);
        if n_max == 0 || n_max > N_MAX_LIMIT {
            return Err(Error::Cache(format!("implausible n_max {n_max}")));
        }
        let n = n_max as usize;
        let mut bits = vec![0u8; n.div_ceil(8)];
        r.read_exact(&mut bits)?;
        let mut lambda = vec![0i8; n + 1];
        for i in 1..=n {
            lambda[i] = if bits[(i - 1) / 8] & (1 << ((i - 1) % 8)) != 0 {
                1
            } else {
                -1
            };
        }
        let mut omega = vec![0u8; n + 1];
        r.read_exact(&mut omega[1..=n])?;
        let mut pplus = vec![0u32; n + 1];
        let mut le = [0u8; 4];
        for slot in pplus.iter_mut().skip(1) {
            r.read_exact(&mut le)?;
            *slot = u32::from_le_bytes(le);
        }
        let mut trailing = [0u8; 1];
        if r.read(&mut trailing)? != 0 {
            return Err(Error::Cache("trailing bytes after table payload".into()));
        }
        Ok(ArithTable {
            n_max,
            lambda,
            omega,
            pplus,
        })
    }
}

/// The q-friable integers up to a bound, with Psi(T, q) = members.len().
#[derive(Debug, Clone)]
pub struct FriableSet {
    pub bound: u64,
    pub q: u64,
    pub members: Vec<u64>,
}

impl FriableSet {
    /// Psi(T, q), the friable count.
    pub fn psi(&self) -> u64 {
        self.members.len() as u64
    }
}

/// Deterministic Miller-Rabin for u64 (fixed witness set).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Modular inverse of `a` modulo `m` (requires gcd(a, m) = 1).
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}
