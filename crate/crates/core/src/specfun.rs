//! Special functions and number-theory primitives.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{ensure, Error, Result};

/// Largest sieve limit accepted by [`primes_up_to`].
pub const SIEVE_LIMIT_MAX: u64 = 1 << 31;

/// Default sieve segment length (number of odd and even integers per block).
pub const DEFAULT_SEGMENT_LEN: usize = 1 << 16;

// Stirling shifts the argument until Re(z) reaches this value.
const STIRLING_SHIFT: f64 = 15.0;

// B_{2k} / (2k (2k - 1)) for k = 1..=10.
const STIRLING_COEFFS: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

/// Principal-branch log Γ(z), continuous off the non-positive real axis.
///
/// The argument is lifted by the recurrence Γ(z + 1) = z Γ(z) until
/// Re(z) ≥ 15, where a 10-term Stirling series is accurate to well below
/// 1e-14. The imaginary part is the continuous arg Γ, not a value reduced
/// modulo 2π.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Argument(format!("log_gamma argument {z} is not finite")));
    }
    if z.re <= 0.0 {
        let nearest = z.re.round();
        let tol = 8.0 * f64::EPSILON * nearest.abs().max(1.0);
        if (z.re - nearest).abs() <= tol && z.im.abs() <= tol {
            return Err(Error::Pole { re: z.re, im: z.im });
        }
    }

    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < STIRLING_SHIFT {
        shift += w.ln();
        w += 1.0;
    }

    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING_COEFFS {
        series += pow * c;
        pow *= inv2;
    }
    let out = (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series - shift;
    if out.re.is_finite() && out.im.is_finite() {
        Ok(out)
    } else {
        Err(Error::NonFinite("log_gamma"))
    }
}

/// Γ(1/4 + ix/2) / Γ(1/4 − ix/2) with `x = E/ħ`.
///
/// The ratio of conjugate values is exp(2i arg Γ(1/4 + ix/2)), so the result
/// is unimodular by construction.
pub fn gamma_ratio_phase(e_over_hbar: f64) -> Result<Complex64> {
    ensure(e_over_hbar.is_finite(), || {
        format!("gamma_ratio_phase needs a finite energy, got {e_over_hbar}")
    })?;
    let lg = log_gamma(Complex64::new(0.25, 0.5 * e_over_hbar))?;
    Ok(Complex64::from_polar(1.0, 2.0 * lg.im))
}

/// Riemann–Siegel theta θ(t) = arg Γ(1/4 + it/2) − (t/2) ln π.
pub fn riemann_siegel_theta(t: f64) -> Result<f64> {
    ensure(t > 0.0 && t.is_finite(), || {
        format!("riemann_siegel_theta needs t > 0, got {t}")
    })?;
    let lg = log_gamma(Complex64::new(0.25, 0.5 * t))?;
    Ok(lg.im - 0.5 * t * PI.ln())
}

/// Ascending list of every prime up to `limit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeList {
    pub limit: u64,
    pub primes: Vec<u64>,
}

impl PrimeList {
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().copied()
    }
}

/// All primes `≤ n` via a segmented sieve with the default segment length.
pub fn primes_up_to(n: u64) -> Result<PrimeList> {
    primes_up_to_segmented(n, DEFAULT_SEGMENT_LEN)
}

/// Segmented sieve of Eratosthenes. Memory is `O(√n + segment_len)`.
pub fn primes_up_to_segmented(n: u64, segment_len: usize) -> Result<PrimeList> {
    ensure(n >= 2, || format!("primes_up_to needs n >= 2, got {n}"))?;
    ensure(n <= SIEVE_LIMIT_MAX, || {
        format!("primes_up_to limit {n} exceeds 2^31")
    })?;
    ensure(segment_len >= 1, || "segment length must be positive".into())?;

    let root = integer_sqrt(n);
    let base = simple_sieve(root);

    let mut primes = Vec::new();
    let seg = segment_len as u64;
    let mut mark = vec![true; segment_len];
    let mut lo = 2u64;
    while lo <= n {
        let hi = (lo + seg - 1).min(n);
        let len = (hi - lo + 1) as usize;
        mark[..len].fill(true);
        for &p in &base {
            if p * p > hi {
                break;
            }
            let mut m = (p * p).max(lo.div_ceil(p) * p);
            while m <= hi {
                mark[(m - lo) as usize] = false;
                m += p;
            }
        }
        primes.extend(
            mark[..len]
                .iter()
                .enumerate()
                .filter(|(_, &is_p)| is_p)
                .map(|(i, _)| lo + i as u64),
        );
        lo = hi + 1;
    }
    Ok(PrimeList { limit: n, primes })
}

fn simple_sieve(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut is_prime = vec![true; n + 1];
    is_prime[0] = false;
    is_prime[1] = false;
    let mut i = 2;
    while i * i <= n {
        if is_prime[i] {
            for j in (i * i..=n).step_by(i) {
                is_prime[j] = false;
            }
        }
        i += 1;
    }
    (0..=n).filter(|&i| is_prime[i]).map(|i| i as u64).collect()
}

fn integer_sqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}
