//! Dilation maps on residues: phi_d(n) = the representative of d*n mod N in
//! (0, N), the paired sign Lambda_d(n) = lambda(dn)lambda(phi_d(n)), the
//! exceptional sets E_d(N) where that sign is -1, the normalized ratio
//! g(d) = |E_d(N)|/|E(N)|, and exact set-algebra identities relating them.

use std::collections::BTreeMap;

use crate::arith::{gcd, inv_mod, ArithTable};
use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::patterns::{exceptional_set_base, ExceptionalSet, Sign};
use crate::report::VerificationReport;

/// Shared state for dilation computations at one modulus.
///
/// The base set E(N) and its sign are computed once at construction; the
/// table-size contract (lambda available up to d*(N-1)) is validated up
/// front by each operation rather than on every access.
pub struct DilationContext<'a> {
    table: &'a ArithTable,
    modulus: u64,
    base: ExceptionalSet,
    eta: Sign,
}

impl<'a> DilationContext<'a> {
    pub fn new(table: &'a ArithTable, modulus: u64) -> Result<Self> {
        let (eta, base) = exceptional_set_base(table, modulus)?;
        Ok(DilationContext {
            table,
            modulus,
            base,
            eta,
        })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    #[inline]
    pub fn table(&self) -> &ArithTable {
        self.table
    }

    /// The base exceptional set E(N).
    pub fn base_set(&self) -> &ExceptionalSet {
        &self.base
    }

    pub fn base_sign(&self) -> Sign {
        self.eta
    }

    fn require_coprime(&self, d: u64) -> Result<()> {
        if d == 0 || gcd(d, self.modulus) != 1 {
            return Err(Error::InvalidArgument(format!(
                "d = {d} not coprime to N = {}",
                self.modulus
            )));
        }
        Ok(())
    }

    fn require_reach(&self, d: u64) -> Result<()> {
        let required = d
            .checked_mul(self.modulus - 1)
            .ok_or(Error::Overflow)?;
        if required > self.table.n_max() {
            return Err(Error::TableTooSmall {
                required,
                available: self.table.n_max(),
            });
        }
        Ok(())
    }

    /// Lambda_d(n) = lambda(dn) * lambda(phi_d(n)).
    pub fn lambda_pair(&self, d: u64, n: u64) -> Result<i8> {
        self.require_coprime(d)?;
        let dn = d.checked_mul(n).ok_or(Error::Overflow)?;
        if dn > self.table.n_max() {
            return Err(Error::TableTooSmall {
                required: dn,
                available: self.table.n_max(),
            });
        }
        let image = phi(d, n, self.modulus)?;
        Ok(self.table.lambda(dn) * self.table.lambda(image))
    }

    /// E_d(N) = {n < N : Lambda_d(n) = -1} as an exact bit set.
    pub fn exceptional_set(&self, d: u64) -> Result<ExceptionalSet> {
        self.require_coprime(d)?;
        self.require_reach(d)?;
        let n_mod = self.modulus;
        let mut bits = BitSet::new(n_mod as usize);
        // phi_d(n) walks the residues d*n mod N incrementally.
        let step = d % n_mod;
        let mut image = 0u64;
        for n in 1..n_mod {
            image += step;
            if image >= n_mod {
                image -= n_mod;
            }
            if self.table.lambda(d * n) * self.table.lambda(image) == -1 {
                bits.insert(n as usize);
            }
        }
        let set = ExceptionalSet::from_bits(n_mod, d, bits);
        debug_assert!(set
            .bits
            .range_is_clear(0, (n_mod as usize).div_ceil(d as usize)));
        Ok(set)
    }

    /// g(d) = |E_d(N)|/|E(N)| as the exact integer pair plus a float.
    pub fn g_ratio(&self, d: u64) -> Result<GRatio> {
        if self.base.card == 0 {
            return Err(Error::UndefinedRatio {
                modulus: self.modulus,
            });
        }
        let set = self.exceptional_set(d)?;
        Ok(GRatio {
            d,
            e_d: set.card,
            e_base: self.base.card,
        })
    }

    /// Preimage phi_d^{-1}(S) = {n : phi_d(n) in S}, via the inverse residue.
    pub fn preimage(&self, d: u64, set: &ExceptionalSet) -> Result<ExceptionalSet> {
        self.require_coprime(d)?;
        let n_mod = self.modulus;
        let inv = inv_mod(d, n_mod).expect("coprimality checked above");
        let mut bits = BitSet::new(n_mod as usize);
        for m in set.bits.iter() {
            let pre = (inv as u128 * m as u128 % n_mod as u128) as usize;
            bits.insert(pre);
        }
        Ok(ExceptionalSet::from_bits(n_mod, set.d, bits))
    }

    /// Check the three exact set relations tying E_a, E_b and E_{ab}:
    /// the product decomposition E_{ab} = E_b xor phi_b^{-1}(E_a), the
    /// reciprocity E_a xor phi_a^{-1}(E_b) = E_b xor phi_b^{-1}(E_a), and
    /// the shift bound |E_b xor phi_a^{-1}(E_b)| <= 2|E_a|.
    pub fn verify_symmetric_difference(&self, a: u64, b: u64) -> Result<VerificationReport> {
        if a < 2 || b < 2 {
            return Err(Error::InvalidArgument("need a, b >= 2".into()));
        }
        let ab = a.checked_mul(b).ok_or(Error::Overflow)?;
        self.require_coprime(ab)?;
        self.require_reach(ab)?;

        let e_a = self.exceptional_set(a)?;
        let e_b = self.exceptional_set(b)?;
        let e_ab = self.exceptional_set(ab)?;
        let pre_a_of_b = self.preimage(a, &e_b)?;
        let pre_b_of_a = self.preimage(b, &e_a)?;

        let left = e_a.bits.symmetric_difference(&pre_a_of_b.bits);
        let right = e_b.bits.symmetric_difference(&pre_b_of_a.bits);
        let product_ok = e_ab.bits == right;
        let reciprocity_ok = left == right;

        let shift = e_b.bits.symmetric_difference(&self.preimage(a, &e_b)?.bits);
        let shift_card = shift.count();

        let mut inputs = BTreeMap::new();
        inputs.insert("N".into(), self.modulus.to_string());
        inputs.insert("a".into(), a.to_string());
        inputs.insert("b".into(), b.to_string());
        inputs.insert("card_E_a".into(), e_a.card.to_string());
        inputs.insert("card_E_b".into(), e_b.card.to_string());
        inputs.insert("card_E_ab".into(), e_ab.card.to_string());
        inputs.insert("card_shift".into(), shift_card.to_string());
        inputs.insert("product_identity".into(), product_ok.to_string());
        inputs.insert("reciprocity".into(), reciprocity_ok.to_string());
        Ok(VerificationReport::bound(
            "dilation/symmetric-difference",
            inputs,
            if product_ok && reciprocity_ok {
                shift_card as f64
            } else {
                f64::INFINITY
            },
            2.0 * e_a.card as f64,
            0.0,
        ))
    }

    /// Check |E_{m1 ... mk}| <= k * (|E_{m1}| + ... + |E_{mk}|), the
    /// subadditivity of g scaled by |E(N)| so both sides stay integral.
    pub fn verify_subadditivity(&self, factors: &[u64]) -> Result<VerificationReport> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument("empty factor list".into()));
        }
        let mut product = 1u64;
        for &m in factors {
            if m < 2 {
                return Err(Error::InvalidArgument("factors must be >= 2".into()));
            }
            product = product.checked_mul(m).ok_or(Error::Overflow)?;
        }
        self.require_coprime(product)?;
        self.require_reach(product)?;

        let lhs = self.exceptional_set(product)?.card;
        let mut sum = 0u64;
        for &m in factors {
            sum += self.exceptional_set(m)?.card;
        }
        let rhs = factors.len() as u64 * sum;

        let mut inputs = BTreeMap::new();
        inputs.insert("N".into(), self.modulus.to_string());
        inputs.insert(
            "factors".into(),
            factors
                .iter()
                .map(|m| m.to_string())
                .collect::<Vec<_>>()
                .join("*"),
        );
        inputs.insert("product".into(), product.to_string());
        Ok(VerificationReport::bound(
            "dilation/subadditivity",
            inputs,
            lhs as f64,
            rhs as f64,
            0.0,
        ))
    }

    /// Check |E_R| <= Omega(R) * sum over prime powers q^k || R of k|E_q|,
    /// the composite reduction of the ratio bound.
    pub fn verify_composite_bound(&self, r: u64) -> Result<VerificationReport> {
        if r < 2 {
            return Err(Error::InvalidArgument("need composite argument >= 2".into()));
        }
        self.require_coprime(r)?;
        self.require_reach(r)?;
        let lhs = self.exceptional_set(r)?.card;
        let omega = self.table.omega(r) as u64;
        let mut rest = r;
        let mut sum = 0u64;
        while rest > 1 {
            let q = self.table.pplus(rest);
            let mut k = 0u64;
            while rest % q == 0 {
                rest /= q;
                k += 1;
            }
            sum += k * self.exceptional_set(q)?.card;
        }
        let mut inputs = BTreeMap::new();
        inputs.insert("N".into(), self.modulus.to_string());
        inputs.insert("R".into(), r.to_string());
        inputs.insert("Omega".into(), omega.to_string());
        Ok(VerificationReport::bound(
            "dilation/composite-bound",
            inputs,
            lhs as f64,
            (omega * sum) as f64,
            0.0,
        ))
    }
}

/// Exact ratio |E_d(N)| / |E(N)|.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GRatio {
    pub d: u64,
    pub e_d: u64,
    pub e_base: u64,
}

impl GRatio {
    pub fn as_f64(&self) -> f64 {
        self.e_d as f64 / self.e_base as f64
    }

    /// Whether g(d) <= 2^(d^2); vacuous once the exponent leaves u128 range.
    pub fn within_square_exponent_bound(&self) -> bool {
        let exp = self.d * self.d;
        if exp >= 127 {
            return true;
        }
        match (1u128 << exp).checked_mul(self.e_base as u128) {
            Some(rhs) => (self.e_d as u128) <= rhs,
            None => true,
        }
    }
}

/// phi_d(n): the representative of d*n mod N inside (0, N).
///
/// Equals d*n exactly when n < N/d. Errs when d*n = 0 mod N (possible only
/// for gcd(d, N) > 1), where the image would leave (0, N).
pub fn phi(d: u64, n: u64, modulus: u64) -> Result<u64> {
    if n == 0 || n >= modulus {
        return Err(Error::InvalidArgument(format!(
            "n = {n} outside (0, {modulus})"
        )));
    }
    if d == 0 {
        return Err(Error::InvalidArgument("d must be >= 1".into()));
    }
    let r = (d as u128 * n as u128 % modulus as u128) as u64;
    if r == 0 {
        return Err(Error::InvalidArgument(format!(
            "phi_{d}({n}) = 0 mod {modulus}: image leaves (0, N)"
        )));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(table: &ArithTable, n: u64) -> DilationContext<'_> {
        DilationContext::new(table, n).unwrap()
    }

    #[test]
    fn phi_basics() {
        for n in 1..11 {
            assert_eq!(phi(1, n, 11).unwrap(), n);
        }
        // d*n below N stays un-wrapped.
        for d in 1..6u64 {
            for n in 1..11u64 {
                if d * n < 11 {
                    assert_eq!(phi(d, n, 11).unwrap(), d * n);
                }
            }
        }
        assert_eq!(phi(2, 6, 11).unwrap(), 1);
        assert!(phi(2, 0, 11).is_err());
        assert!(phi(3, 4, 12).is_err()); // 12 | 3*4
    }

    #[test]
    fn phi_bijective_by_image_count() {
        for modulus in [7u64, 11, 12, 35, 101] {
            for d in 1..modulus.min(20) {
                if gcd(d, modulus) != 1 {
                    continue;
                }
                let mut seen = vec![false; modulus as usize];
                for n in 1..modulus {
                    let m = phi(d, n, modulus).unwrap();
                    assert!(!seen[m as usize]);
                    seen[m as usize] = true;
                }
                assert_eq!(seen.iter().filter(|&&s| s).count() as u64, modulus - 1);
            }
        }
    }

    #[test]
    fn phi_composes() {
        for modulus in [11u64, 13, 35] {
            for a in 2..8u64 {
                for b in 2..8u64 {
                    if gcd(a * b, modulus) != 1 {
                        continue;
                    }
                    for n in 1..modulus {
                        let inner = phi(b, n, modulus).unwrap();
                        assert_eq!(
                            phi(a * b, n, modulus).unwrap(),
                            phi(a, inner, modulus).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn lambda_pair_basics() {
        let t = ArithTable::build(200).unwrap();
        let c = ctx(&t, 11);
        for n in 1..11 {
            assert_eq!(c.lambda_pair(1, n).unwrap(), 1);
        }
        assert_eq!(c.lambda_pair(2, 6).unwrap(), -1);
        // Below N/d the pair sign is +1.
        for d in 2..6u64 {
            for n in 1..11u64 {
                if n * d < 11 {
                    assert_eq!(c.lambda_pair(d, n).unwrap(), 1);
                }
            }
        }
    }

    #[test]
    fn exceptional_sets_eleven() {
        let t = ArithTable::build(200).unwrap();
        let c = ctx(&t, 11);
        assert_eq!(c.exceptional_set(1).unwrap().card, 0);
        let e2 = c.exceptional_set(2).unwrap();
        assert_eq!(e2.members(), vec![6, 7, 8, 10]);
        let e4 = c.exceptional_set(4).unwrap();
        assert_eq!(e4.card, 8);
        let e5 = c.exceptional_set(5).unwrap();
        assert_eq!(e5.members(), vec![4, 5, 7, 8, 9, 10]);
    }

    #[test]
    fn initial_gap_always_clear() {
        let t = ArithTable::build(4000).unwrap();
        for modulus in [11u64, 13, 97, 101, 199] {
            let c = ctx(&t, modulus);
            for d in 1..=20u64 {
                if gcd(d, modulus) != 1 {
                    continue;
                }
                let set = c.exceptional_set(d).unwrap();
                for m in set.members() {
                    assert!(m * d >= modulus, "gap violated: N={modulus} d={d} n={m}");
                }
            }
        }
    }

    #[test]
    fn g_ratio_eleven() {
        let t = ArithTable::build(200).unwrap();
        let c = ctx(&t, 11);
        let g2 = c.g_ratio(2).unwrap();
        assert_eq!((g2.e_d, g2.e_base), (4, 4));
        assert_eq!(g2.as_f64(), 1.0);
        assert!(g2.within_square_exponent_bound());
    }

    #[test]
    fn g_ratio_undefined_below_eleven() {
        let t = ArithTable::build(200).unwrap();
        // E(5) = min agreement count; check emptiness explicitly first.
        let c = ctx(&t, 5);
        if c.base_set().card == 0 {
            assert!(matches!(c.g_ratio(2), Err(Error::UndefinedRatio { .. })));
        }
    }

    #[test]
    fn g23_bounds_sample() {
        let t = ArithTable::build(4000).unwrap();
        for modulus in [11u64, 13, 17, 101, 499, 997] {
            let c = ctx(&t, modulus);
            assert!(c.g_ratio(2).unwrap().as_f64() <= 2.0, "N = {modulus}");
            assert!(c.g_ratio(3).unwrap().as_f64() <= 6.0, "N = {modulus}");
        }
    }

    #[test]
    fn symmetric_difference_examples() {
        let t = ArithTable::build(500).unwrap();
        let c11 = ctx(&t, 11);
        assert!(c11.verify_symmetric_difference(2, 3).unwrap().pass);
        assert!(c11.verify_symmetric_difference(2, 2).unwrap().pass);
        let c13 = ctx(&t, 13);
        assert!(c13.verify_symmetric_difference(2, 5).unwrap().pass);
    }

    #[test]
    fn subadditivity_examples() {
        let t = ArithTable::build(500).unwrap();
        let c = ctx(&t, 11);
        // k = 1 is equality.
        let r = c.verify_subadditivity(&[2]).unwrap();
        assert!(r.pass);
        assert_eq!(r.lhs, r.rhs);
        // (2,2): |E_4| = 8 <= 2(4 + 4) = 16.
        let r = c.verify_subadditivity(&[2, 2]).unwrap();
        assert!(r.pass);
        assert_eq!(r.lhs, 8.0);
        assert_eq!(r.rhs, 16.0);
    }

    #[test]
    fn composite_bound_sample() {
        let t = ArithTable::build(40_000).unwrap();
        for modulus in [101u64, 997] {
            let c = ctx(&t, modulus);
            for r in [4u64, 6, 12, 30] {
                assert!(c.verify_composite_bound(r).unwrap().pass, "R = {r}");
            }
        }
    }

    #[test]
    fn reach_validated_up_front() {
        let t = ArithTable::build(30).unwrap();
        let c = ctx(&t, 11);
        assert!(matches!(
            c.exceptional_set(5),
            Err(Error::TableTooSmall { .. })
        ));
    }
}
