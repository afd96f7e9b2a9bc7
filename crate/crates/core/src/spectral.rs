//! Fourier coefficients S(a/N) = sum over n < N of lambda(n) e(na/N) and
//! the exact L2 identity tying the dilation defect to 4|E_d(N)|.
//!
//! Coefficients are computed directly for small N and through a chirp-z
//! (Bluestein) transform for larger N, since the moduli of interest are
//! usually prime and defeat plain radix transforms. Twiddles come from
//! integer angle reduction, not repeated multiplication: phase drift breaks
//! the defect identity near N ~ 1e5.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::arith::{gcd, ArithTable};
use crate::error::{Error, Result};

/// Direct evaluation below this length, chirp-z at or above it.
pub const DIRECT_LIMIT: u64 = 1 << 14;

/// Absolute tolerance, per unit of N, for the defect and Plancherel
/// identities: N rounding errors of unit-magnitude terms in f64.
pub const TOL_PER_N: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformMethod {
    Direct,
    ChirpZ,
}

impl std::fmt::Display for TransformMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TransformMethod::Direct => write!(f, "direct"),
            TransformMethod::ChirpZ => write!(f, "chirp-z"),
        }
    }
}

/// All N Fourier coefficients of n -> lambda(n) on Z/NZ.
pub struct Spectrum {
    pub modulus: u64,
    pub coeffs: Vec<Complex64>,
    pub method: TransformMethod,
}

/// e(t/m) for integer t reduced mod m.
#[inline]
fn unit_root(t: u64, m: u64) -> Complex64 {
    let angle = 2.0 * std::f64::consts::PI * (t % m) as f64 / m as f64;
    Complex64::new(angle.cos(), angle.sin())
}

pub fn spectrum(table: &ArithTable, modulus: u64) -> Result<Spectrum> {
    if modulus < 2 || modulus > table.n_max() {
        return Err(Error::InvalidArgument(format!(
            "modulus {modulus} outside 2..={}",
            table.n_max()
        )));
    }
    let method = if modulus <= DIRECT_LIMIT {
        TransformMethod::Direct
    } else {
        TransformMethod::ChirpZ
    };
    let coeffs = match method {
        TransformMethod::Direct => direct(table, modulus),
        TransformMethod::ChirpZ => chirp_z(table, modulus),
    };
    Ok(Spectrum {
        modulus,
        coeffs,
        method,
    })
}

fn direct(table: &ArithTable, modulus: u64) -> Vec<Complex64> {
    let roots: Vec<Complex64> = (0..modulus).map(|t| unit_root(t, modulus)).collect();
    (0..modulus)
        .map(|a| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut t = 0u64;
            for n in 1..modulus {
                t += a;
                if t >= modulus {
                    t -= modulus;
                }
                let root = roots[t as usize];
                if table.lambda(n) == 1 {
                    acc += root;
                } else {
                    acc -= root;
                }
            }
            acc
        })
        .collect()
}

/// Bluestein: X_a = w^{a^2} * sum_n (x_n w^{n^2}) w^{-(a-n)^2} with
/// w = e(1/2N), a convolution evaluated by power-of-two FFTs.
fn chirp_z(table: &ArithTable, modulus: u64) -> Vec<Complex64> {
    let n = modulus as usize;
    // Exponents of w live mod 2N; square them in u128 before reducing.
    let two_n = 2 * modulus;
    let w = |k: u64, conj: bool| -> Complex64 {
        let t = ((k as u128 * k as u128) % two_n as u128) as u64;
        let angle = std::f64::consts::PI * t as f64 / modulus as f64;
        Complex64::new(angle.cos(), if conj { -angle.sin() } else { angle.sin() })
    };

    let m = (2 * n - 1).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(m);
    let inverse = planner.plan_fft_inverse(m);

    let mut a = vec![Complex64::new(0.0, 0.0); m];
    for k in 1..n {
        let x = table.lambda(k as u64) as f64;
        a[k] = w(k as u64, false) * x;
    }
    let mut b = vec![Complex64::new(0.0, 0.0); m];
    b[0] = w(0, true);
    for k in 1..n {
        let v = w(k as u64, true);
        b[k] = v;
        b[m - k] = v;
    }

    forward.process(&mut a);
    forward.process(&mut b);
    for (av, bv) in a.iter_mut().zip(&b) {
        *av *= bv;
    }
    inverse.process(&mut a);

    let scale = 1.0 / m as f64;
    (0..n)
        .map(|k| w(k as u64, false) * a[k] * scale)
        .collect()
}

/// (1/N) sum over a of |S(da/N) - lambda(d) S(a/N)|^2; equals 4|E_d(N)|.
pub fn dilation_defect(spec: &Spectrum, table: &ArithTable, d: u64) -> Result<f64> {
    let n = spec.modulus;
    if d == 0 || gcd(d, n) != 1 {
        return Err(Error::InvalidArgument(format!(
            "d = {d} not coprime to N = {n}: index dilation is not bijective"
        )));
    }
    if d > table.n_max() {
        return Err(Error::TableTooSmall {
            required: d,
            available: table.n_max(),
        });
    }
    let sign = table.lambda(d) as f64;
    let step = d % n;
    let mut da = 0u64;
    let mut total = 0.0;
    for a in 0..n {
        let diff = spec.coeffs[da as usize] - sign * spec.coeffs[a as usize];
        total += diff.norm_sqr();
        da += step;
        if da >= n {
            da -= n;
        }
    }
    Ok(total / n as f64)
}

/// (1/N) sum over a of |S(a/N)|^2; equals N - 1.
pub fn plancherel_sum(spec: &Spectrum) -> f64 {
    spec.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() / spec.modulus as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilation::DilationContext;

    fn spec_for(n: u64) -> (ArithTable, Spectrum) {
        let table = ArithTable::build(n * 21).unwrap();
        let spec = spectrum(&table, n).unwrap();
        (table, spec)
    }

    #[test]
    fn zeroth_coefficient_is_lambda_sum() {
        let (_, spec) = spec_for(11);
        assert!(spec.coeffs[0].im.abs() < 1e-12);
        assert!(spec.coeffs[0].re.abs() < 1e-12); // sum of lambda over 1..10 is 0
        let table = ArithTable::build(1000).unwrap();
        let direct_sum: f64 = (1..997).map(|n| table.lambda(n) as f64).sum();
        let spec997 = spectrum(&table, 997).unwrap();
        assert!((spec997.coeffs[0].re - direct_sum).abs() < 1e-9 * 997.0);
    }

    #[test]
    fn conjugate_symmetry() {
        let (_, spec) = spec_for(101);
        for a in 1..101usize {
            let c = spec.coeffs[101 - a];
            let d = spec.coeffs[a].conj();
            assert!((c - d).norm() < 1e-9);
        }
    }

    #[test]
    fn plancherel_small() {
        for n in [11u64, 13, 101, 499] {
            let (_, spec) = spec_for(n);
            assert!((plancherel_sum(&spec) - (n - 1) as f64).abs() <= TOL_PER_N * n as f64);
        }
    }

    #[test]
    fn defect_identity_examples() {
        let (table, spec) = spec_for(11);
        assert!(dilation_defect(&spec, &table, 1).unwrap().abs() < 1e-9);
        let d2 = dilation_defect(&spec, &table, 2).unwrap();
        assert!((d2 - 16.0).abs() <= TOL_PER_N * 11.0);
        let d4 = dilation_defect(&spec, &table, 4).unwrap();
        assert!((d4 - 32.0).abs() <= TOL_PER_N * 11.0);
    }

    #[test]
    fn defect_matches_exceptional_cardinality() {
        let table = ArithTable::build(25_000).unwrap();
        for n in [11u64, 101, 499, 997] {
            let spec = spectrum(&table, n).unwrap();
            let ctx = DilationContext::new(&table, n).unwrap();
            for d in 2..=20u64 {
                if gcd(d, n) != 1 {
                    continue;
                }
                let defect = dilation_defect(&spec, &table, d).unwrap();
                let card = ctx.exceptional_set(d).unwrap().card;
                assert!(
                    (defect - 4.0 * card as f64).abs() <= TOL_PER_N * n as f64,
                    "N={n} d={d}: defect {defect} vs 4|E_d| = {}",
                    4 * card
                );
            }
        }
    }

    #[test]
    fn index_dilation_permutes_magnitudes() {
        let (_, spec) = spec_for(101);
        let mut base: Vec<u64> = spec
            .coeffs
            .iter()
            .map(|c| (c.norm() * 1e9).round() as u64)
            .collect();
        base.sort_unstable();
        for d in [2u64, 3, 7, 50] {
            let mut dilated: Vec<u64> = (0..101u64)
                .map(|a| (spec.coeffs[(d * a % 101) as usize].norm() * 1e9).round() as u64)
                .collect();
            dilated.sort_unstable();
            assert_eq!(base, dilated);
        }
    }

    #[test]
    fn chirp_z_agrees_with_direct() {
        let table = ArithTable::build(40_000).unwrap();
        for n in [11u64, 64, 101, 997, 4099] {
            let d = direct(&table, n);
            let c = chirp_z(&table, n);
            for a in 0..n as usize {
                assert!(
                    (d[a] - c[a]).norm() < 1e-7 * (n as f64).sqrt().max(1.0),
                    "N={n} a={a}: {} vs {}",
                    d[a],
                    c[a]
                );
            }
        }
    }

    #[test]
    fn method_selection() {
        let table = ArithTable::build(40_000).unwrap();
        assert_eq!(
            spectrum(&table, 101).unwrap().method,
            TransformMethod::Direct
        );
        assert_eq!(
            spectrum(&table, 32771).unwrap().method,
            TransformMethod::ChirpZ
        );
    }

    #[test]
    fn large_prime_defect_via_chirp_z() {
        // 32771 is prime and above the direct-evaluation cutoff.
        let n = 32771u64;
        let table = ArithTable::build(3 * n).unwrap();
        let spec = spectrum(&table, n).unwrap();
        assert_eq!(spec.method, TransformMethod::ChirpZ);
        assert!((plancherel_sum(&spec) - (n - 1) as f64).abs() <= TOL_PER_N * n as f64);
        let ctx = DilationContext::new(&table, n).unwrap();
        for d in [2u64, 3] {
            let defect = dilation_defect(&spec, &table, d).unwrap();
            let card = ctx.exceptional_set(d).unwrap().card;
            assert!(
                (defect - 4.0 * card as f64).abs() <= TOL_PER_N * n as f64,
                "d = {d}"
            );
        }
    }

    #[test]
    fn rejects_non_coprime_dilation() {
        let (table, spec) = spec_for(12);
        assert!(dilation_defect(&spec, &table, 2).is_err());
    }

    #[test]
    fn defect_identity_at_hundred_thousand_scale() {
        // 99991 is the largest prime below 1e5; phase accuracy of the
        // chirp-z twiddles is what keeps this within tolerance.
        let n = 99_991u64;
        let table = ArithTable::build(2 * n).unwrap();
        let spec = spectrum(&table, n).unwrap();
        assert_eq!(spec.method, TransformMethod::ChirpZ);
        let ctx = DilationContext::new(&table, n).unwrap();
        let defect = dilation_defect(&spec, &table, 2).unwrap();
        let card = ctx.exceptional_set(2).unwrap().card;
        assert!(
            (defect - 4.0 * card as f64).abs() <= TOL_PER_N * n as f64,
            "defect {defect} vs 4|E_2| = {}",
            4 * card
        );
    }
}
