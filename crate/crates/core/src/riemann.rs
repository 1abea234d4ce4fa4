//! Riemann zeros, the zero staircase and the smooth and prime-sum parts of
//! the zero-counting function.
//!
//! The Z function is available through two independent routes: an
//! Euler–Maclaurin evaluation of ζ(1/2 + it) rotated by e^{iθ(t)}, and the
//! Riemann–Siegel main sum with remainder terms C₀…C₄. [`z_function`] uses the
//! former below t = 30 and the latter above.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{ensure, Error, Result};
use crate::exec::Exec;
use crate::specfun::{primes_up_to, riemann_siegel_theta, PrimeList};

/// Below this height [`z_function`] uses the Euler–Maclaurin route.
pub const RS_CROSSOVER: f64 = 30.0;
/// Riemann–Siegel remainder terms used by default (C₀ … C₈).
pub const RS_DEFAULT_TERMS: usize = 9;
pub const RS_MAX_TERMS: usize = 9;
/// Zero scan step; well below the minimal zero gap for t ≤ 10³.
pub const SCAN_STEP: f64 = 0.05;
/// Zero scans start here; ζ has no critical-line zeros below t ≈ 14.13.
pub const SCAN_START: f64 = 2.0;
/// Upper limit of supported zero heights.
pub const T_MAX_SUPPORTED: f64 = 1000.0;
/// Absolute accuracy of each refined zero.
pub const ZERO_TOL: f64 = 1e-10;
/// Allowed |count − smooth estimate| at a scan checkpoint. |S(t)| stays
/// well below this for t ≤ 10³.
pub const FLUCTUATION_BOUND: f64 = 2.0;
const CHECKPOINT_SPACING: f64 = 10.0;

/// Default truncations for the prime-sum fluctuation term.
pub const DEFAULT_PRIME_LIMIT: u64 = 10_000;
pub const DEFAULT_N_MAX: u32 = 10;

// B_{2k} for k = 1..=15.
const BERNOULLI_EVEN: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

/// Which evaluation route to use for Z(t).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZRoute {
    /// Euler–Maclaurin below [`RS_CROSSOVER`], Riemann–Siegel above.
    Auto,
    EulerMaclaurin,
    RiemannSiegel,
}

/// ζ(1/2 + it) by Euler–Maclaurin summation.
pub fn zeta_critical_line(t: f64) -> Result<Complex64> {
    ensure(t.is_finite(), || format!("zeta needs finite t, got {t}"))?;
    let s = Complex64::new(0.5, t);
    let n_terms = (2.0 * s.norm() / PI).ceil().max(10.0) as usize + 10;
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 1..n_terms {
        sum += (-s * (n as f64).ln()).exp();
    }
    let big_n = n_terms as f64;
    let n_pow = (-s * big_n.ln()).exp(); // N^{-s}
    sum += n_pow * big_n / (s - 1.0);
    sum += 0.5 * n_pow;

    // Σ B_{2k}/(2k)! · s(s+1)…(s+2k−2) · N^{−s−2k+1}
    let mut rising = s;
    let mut fact = 2.0; // (2k)!
    let mut n_scale = n_pow / big_n; // N^{−s−1}
    for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
        let k = k + 1;
        sum += rising * n_scale * (*b / fact);
        let a = 2.0 * k as f64;
        rising *= (s + (a - 1.0)) * (s + a);
        fact *= (a + 1.0) * (a + 2.0);
        n_scale /= big_n * big_n;
    }
    if sum.re.is_finite() && sum.im.is_finite() {
        Ok(sum)
    } else {
        Err(Error::NonFinite("zeta_critical_line"))
    }
}

/// Z(t) = Re(e^{iθ(t)} ζ(1/2 + it)) by Euler–Maclaurin.
pub fn z_euler_maclaurin(t: f64) -> Result<f64> {
    ensure(t > 0.0, || format!("Z needs t > 0, got {t}"))?;
    let theta = riemann_siegel_theta(t)?;
    let z = Complex64::from_polar(1.0, theta) * zeta_critical_line(t)?;
    Ok(z.re)
}

/// Z(t) by the Riemann–Siegel formula with [`RS_DEFAULT_TERMS`] remainder terms.
pub fn z_riemann_siegel(t: f64) -> Result<f64> {
    z_riemann_siegel_terms(t, RS_DEFAULT_TERMS)
}

/// Z(t) by the Riemann–Siegel formula keeping `terms` remainder
/// coefficients (1 ≤ terms ≤ [`RS_MAX_TERMS`], i.e. C₀ up to C₈).
pub fn z_riemann_siegel_terms(t: f64, terms: usize) -> Result<f64> {
    ensure(t > 0.0, || format!("Z needs t > 0, got {t}"))?;
    ensure((1..=RS_MAX_TERMS).contains(&terms), || {
        format!("Riemann–Siegel supports 1..={RS_MAX_TERMS} remainder terms, got {terms}")
    })?;
    let a = (t / (2.0 * PI)).sqrt();
    let n = a.floor();
    let p = a - n;
    let theta = riemann_siegel_theta(t)?;

    let mut main = 0.0;
    for k in 1..=(n as u64) {
        let kf = k as f64;
        main += (theta - t * kf.ln()).cos() / kf.sqrt();
    }
    main *= 2.0;

    let c = rs_coefficients(p, terms);
    let mut rem = 0.0;
    let mut scale = 1.0;
    for ck in c.iter().take(terms) {
        rem += ck * scale;
        scale /= a;
    }
    let sign = if (n as u64) % 2 == 1 { 1.0 } else { -1.0 };
    let z = main + sign * rem / a.sqrt();
    if z.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite("z_riemann_siegel"))
    }
}

/// Z(t) with the default route split at [`RS_CROSSOVER`].
pub fn z_function(t: f64) -> Result<f64> {
    z_with(t, ZRoute::Auto)
}

pub fn z_with(t: f64, route: ZRoute) -> Result<f64> {
    match route {
        ZRoute::Auto if t < RS_CROSSOVER => z_euler_maclaurin(t),
        ZRoute::Auto => z_riemann_siegel(t),
        ZRoute::EulerMaclaurin => z_euler_maclaurin(t),
        ZRoute::RiemannSiegel => z_riemann_siegel(t),
    }
}

fn psi(z: Complex64) -> Complex64 {
    let num = (2.0 * PI * (z * z - z - 1.0 / 16.0)).cos();
    let den = (2.0 * PI * z).cos();
    num / den
}

const PSI_ORDERS: usize = 25;

// Ψ^{(k)}(p), k < PSI_ORDERS, from the Cauchy integral on a circle of radius
// 1/2. Ψ is entire, so the trapezoidal rule converges geometrically; nodes
// are offset by half a step to stay off the real axis where numerator and
// denominator vanish together.
fn psi_derivatives(p: f64) -> [f64; PSI_ORDERS] {
    const M: usize = 64;
    const R: f64 = 0.5;
    let mut coeff = [Complex64::new(0.0, 0.0); PSI_ORDERS];
    for j in 0..M {
        let ang = 2.0 * PI * (j as f64 + 0.5) / M as f64;
        let w = Complex64::from_polar(1.0, ang);
        let f = psi(Complex64::new(p, 0.0) + w * R);
        let mut wk = Complex64::new(1.0, 0.0);
        let winv = w.conj();
        for c in coeff.iter_mut() {
            *c += f * wk;
            wk *= winv;
        }
    }
    let mut out = [0.0; PSI_ORDERS];
    let mut fact = 1.0;
    let mut rk = 1.0;
    for (k, c) in coeff.iter().enumerate() {
        if k > 0 {
            fact *= k as f64;
            rk *= R;
        }
        out[k] = c.re / M as f64 / rk * fact;
    }
    out
}

/// Remainder coefficients `C_n = Σ c Ψ^{(k)} / π^m`, entries `(k, num, den, m)`
/// with `c = num/den`. They come from the saddle-point expansion of the
/// remainder integral, with the higher Stirling terms of θ folded in.
const RS_TERMS: [&[(usize, f64, f64, i32)]; RS_MAX_TERMS] = [
    &[(0, 1.0, 1.0, 0)],
    &[(3, -1.0, 96.0, 2)],
    &[(2, 1.0, 64.0, 2), (6, 1.0, 18432.0, 4)],
    &[(1, -1.0, 64.0, 2), (5, -1.0, 3840.0, 4), (9, -1.0, 5308416.0, 6)],
    &[(0, 1.0, 128.0, 2), (4, 19.0, 24576.0, 4), (8, 11.0, 5898240.0, 6), (12, 1.0, 2038431744.0, 8)],
    &[(3, -5.0, 3072.0, 4), (7, -901.0, 82575360.0, 6), (11, -7.0, 849346560.0, 8), (15, -1.0, 978447237120.0, 10)],
    &[
        (2, 5.0, 2048.0, 4),
        (6, 367.0, 7864320.0, 6),
        (10, 18889.0, 237817036800.0, 8),
        (14, 17.0, 652298158080.0, 10),
        (18, 1.0, 563585608581120.0, 12),
    ],
    &[
        (1, -5.0, 2048.0, 4),
        (5, -407.0, 2621440.0, 6),
        (9, -6649.0, 11890851840.0, 8),
        (13, -2131.0, 5707608883200.0, 10),
        (17, -1.0, 15655155793920.0, 12),
        (21, -1.0, 378729528966512640.0, 14),
    ],
    &[
        (0, 41.0, 32768.0, 4),
        (4, 427.0, 1048576.0, 6),
        (8, 26405.0, 8455716864.0, 8),
        (12, 88651.0, 22830435532800.0, 10),
        (16, 11153.0, 8766887244595200.0, 12),
        (20, 23.0, 180347394745958400.0, 14),
        (24, 1.0, 290864278246281707520.0, 16),
    ],
];

fn rs_coefficients(p: f64, terms: usize) -> [f64; RS_MAX_TERMS] {
    let d = psi_derivatives(p);
    let mut out = [0.0; RS_MAX_TERMS];
    for (c, row) in out.iter_mut().zip(RS_TERMS.iter()).take(terms) {
        *c = row
            .iter()
            .map(|&(k, num, den, m)| num / den * d[k] / PI.powi(m))
            .sum();
    }
    out
}

/// Smooth zero count (E/2π)(ln(E/2π) − 1) + 7/8.
pub fn smooth_count(e: f64) -> Result<f64> {
    ensure(e > 0.0, || format!("smooth_count needs E > 0, got {e}"))?;
    let x = e / (2.0 * PI);
    Ok(x * (x.ln() - 1.0) + 7.0 / 8.0)
}

/// Truncated prime-sum fluctuation term
/// −(1/π) Σ_{p ≤ prime_limit} Σ_{n ≤ n_max} sin(nE ln p) / (n p^{n/2}).
pub fn fluctuation_sum(e: f64, prime_limit: u64, n_max: u32) -> Result<f64> {
    ensure(prime_limit >= 2, || {
        format!("fluctuation_sum needs prime_limit >= 2, got {prime_limit}")
    })?;
    let primes = primes_up_to(prime_limit)?;
    fluctuation_sum_with(e, &primes, n_max)
}

/// As [`fluctuation_sum`] with a precomputed prime list.
pub fn fluctuation_sum_with(e: f64, primes: &PrimeList, n_max: u32) -> Result<f64> {
    ensure(e >= 0.0 && e.is_finite(), || {
        format!("fluctuation_sum needs finite E >= 0, got {e}")
    })?;
    ensure(n_max >= 1, || "fluctuation_sum needs n_max >= 1".into())?;
    let mut total = 0.0;
    for p in primes.iter() {
        let lp = (p as f64).ln();
        for n in 1..=n_max {
            let nf = n as f64;
            total += (nf * e * lp).sin() / (nf * (0.5 * nf * lp).exp());
        }
    }
    Ok(-total / PI)
}

/// Refined critical-line zeros below some height.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroList {
    pub zeros: Vec<f64>,
    pub tol: f64,
}

impl ZeroList {
    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    /// Number of zeros with ordinate below `e`.
    ///
    /// Fails with [`Error::Ambiguous`] when `e` is within `tol` of a zero.
    /// Only meaningful for `e` below the height the list was built for.
    pub fn count_below(&self, e: f64) -> Result<usize> {
        if let Some(&z) = self.zeros.iter().find(|&&z| (z - e).abs() <= self.tol) {
            return Err(Error::Ambiguous { energy: e, zero: z });
        }
        Ok(self.zeros.partition_point(|&z| z < e))
    }
}

/// All zeros with ordinate below `t_max`, using [`z_function`].
pub fn find_zeros(t_max: f64) -> Result<ZeroList> {
    find_zeros_with(t_max, ZRoute::Auto, Exec::default())
}

/// Zero scan with an explicit Z route and execution strategy.
///
/// Z is sampled on the fixed grid `SCAN_START + i·SCAN_STEP` (plus `t_max`
/// itself), every sign change is refined by bisection, and the running
/// count is checked against [`smooth_count`] every 10 units of height.
pub fn find_zeros_with(t_max: f64, route: ZRoute, exec: Exec) -> Result<ZeroList> {
    ensure(t_max > 0.0 && t_max <= T_MAX_SUPPORTED, || {
        format!("find_zeros needs 0 < t_max <= {T_MAX_SUPPORTED}, got {t_max}")
    })?;
    if t_max <= SCAN_START {
        return Ok(ZeroList { zeros: Vec::new(), tol: ZERO_TOL });
    }
    let n_steps = ((t_max - SCAN_START) / SCAN_STEP).floor() as usize;
    let mut grid: Vec<f64> = (0..=n_steps)
        .map(|i| SCAN_START + i as f64 * SCAN_STEP)
        .collect();
    if *grid.last().unwrap() < t_max {
        grid.push(t_max);
    }
    let values: Vec<Result<f64>> = exec.map_slice(&grid, |&t| z_with(t, route));
    let values: Vec<f64> = values.into_iter().collect::<Result<_>>()?;

    let brackets: Vec<(f64, f64, f64, f64)> = grid
        .windows(2)
        .zip(values.windows(2))
        .filter(|(_, v)| v[0] != 0.0 && (v[0] < 0.0) != (v[1] < 0.0))
        .map(|(t, v)| (t[0], t[1], v[0], v[1]))
        .collect();
    let refined: Vec<Result<f64>> =
        exec.map_slice(&brackets, |&(a, b, za, _)| bisect_zero(a, b, za, route));
    let zeros: Vec<f64> = refined
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        // a sign change landing exactly on t_max is not below t_max
        .filter(|&z| z < t_max)
        .collect();

    let mut checkpoint = 2.0 * CHECKPOINT_SPACING;
    while checkpoint <= t_max {
        check_count(&zeros, checkpoint)?;
        checkpoint += CHECKPOINT_SPACING;
    }
    if t_max >= 2.0 * CHECKPOINT_SPACING {
        check_count(&zeros, t_max)?;
    }
    Ok(ZeroList { zeros, tol: ZERO_TOL })
}

fn check_count(zeros: &[f64], at: f64) -> Result<()> {
    let found = zeros.partition_point(|&z| z < at);
    let estimate = smooth_count(at)?;
    if (found as f64 - estimate).abs() > FLUCTUATION_BOUND {
        return Err(Error::MissedZero { checkpoint: at, found, estimate });
    }
    Ok(())
}

fn bisect_zero(mut a: f64, mut b: f64, mut za: f64, route: ZRoute) -> Result<f64> {
    for _ in 0..80 {
        if b - a <= 0.01 * ZERO_TOL {
            break;
        }
        let m = 0.5 * (a + b);
        let zm = z_with(m, route)?;
        if zm == 0.0 {
            return Ok(m);
        }
        if (zm < 0.0) == (za < 0.0) {
            a = m;
            za = zm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Number of zeros with ordinate below `e`, counted from sign changes of
/// [`z_function`].
pub fn exact_count(e: f64) -> Result<usize> {
    ensure(e > 0.0, || format!("exact_count needs E > 0, got {e}"))?;
    let list = find_zeros((e + 2.0 * ZERO_TOL).min(T_MAX_SUPPORTED))?;
    list.count_below(e)
}

/// How the values of a [`CountingCurve`] were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMethod {
    ExactStaircase,
    Smooth,
    SmoothPlusFluctuation,
    ClosedForm,
    QuadratureOracle,
    Asymptotic,
}

impl CountMethod {
    pub fn label(self) -> &'static str {
        match self {
            CountMethod::ExactStaircase => "exact-staircase",
            CountMethod::Smooth => "smooth",
            CountMethod::SmoothPlusFluctuation => "smooth-plus-fluctuation",
            CountMethod::ClosedForm => "closed-form",
            CountMethod::QuadratureOracle => "quadrature-oracle",
            CountMethod::Asymptotic => "asymptotic",
        }
    }
}

/// A counting function sampled on an ascending energy grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CountingCurve {
    pub energies: Vec<f64>,
    pub values: Vec<f64>,
    pub method: CountMethod,
}

impl CountingCurve {
    pub fn new(energies: Vec<f64>, values: Vec<f64>, method: CountMethod) -> Result<Self> {
        ensure(energies.len() == values.len(), || {
            format!("{} energies but {} values", energies.len(), values.len())
        })?;
        ensure(energies.windows(2).all(|w| w[0] < w[1]), || {
            "counting-curve energies must be strictly ascending".into()
        })?;
        if method == CountMethod::ExactStaircase {
            ensure(
                values.iter().all(|v| v.fract() == 0.0) && values.windows(2).all(|w| w[0] <= w[1]),
                || "staircase values must be nondecreasing integers".into(),
            )?;
        }
        Ok(Self { energies, values, method })
    }

    /// Zero staircase sampled at `energies` from a precomputed zero list.
    pub fn staircase(energies: &[f64], zeros: &ZeroList) -> Result<Self> {
        let values = energies
            .iter()
            .map(|&e| zeros.count_below(e).map(|n| n as f64))
            .collect::<Result<Vec<_>>>()?;
        Self::new(energies.to_vec(), values, CountMethod::ExactStaircase)
    }

    pub fn smooth(energies: &[f64]) -> Result<Self> {
        let values = energies.iter().map(|&e| smooth_count(e)).collect::<Result<_>>()?;
        Self::new(energies.to_vec(), values, CountMethod::Smooth)
    }

    /// Smooth count plus the truncated fluctuation term.
    pub fn smooth_plus_fluctuation(
        energies: &[f64],
        primes: &PrimeList,
        n_max: u32,
        exec: Exec,
    ) -> Result<Self> {
        let values = exec
            .map_slice(energies, |&e| {
                Ok(smooth_count(e)? + fluctuation_sum_with(e, primes, n_max)?)
            })
            .into_iter()
            .collect::<Result<_>>()?;
        Self::new(energies.to_vec(), values, CountMethod::SmoothPlusFluctuation)
    }
}
