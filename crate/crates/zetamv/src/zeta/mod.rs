//! Complex Riemann zeta engine.
//!
//! Provides `zeta`, `zeta_prime`, the functional-equation factor `chi` and
//! its logarithmic derivative, the Riemann-Siegel theta function, and the
//! Hardy Z function, all in native f64 precision with explicit error
//! estimates. Heights are expected to stay below ~10^4, where
//! Euler-Maclaurin with a Bernoulli tail reaches close to machine precision.
//!
//! Two independent evaluation routes exist on purpose: the raw
//! Euler-Maclaurin sum (valid for Re s > -1) and the functional-equation
//! route through `chi`. Their agreement on overlapping domains is a real
//! cross-check, not a tautology.

pub mod zeros;

pub use zeros::{find_zeros, snap_endpoint, ZeroList};

use num_complex::Complex64;
use thiserror::Error;

/// `B_{2j}` for `j = 1..=16` (numerators/denominators exact in f64).
const B2J: [f64; 16] = [
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
    -7709321041217.0 / 510.0,
];

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
const PI: f64 = std::f64::consts::PI;

#[derive(Debug, Error)]
pub enum ZetaError {
    #[error("zeta has a pole at s = 1 (|s - 1| = {0:.3e})")]
    PoleAtOne(f64),
    #[error("configured Euler-Maclaurin budget cannot reach {target:.3e} at this height (needs ~{needed} terms, cap {cap})")]
    PrecisionUnreachable {
        target: f64,
        needed: usize,
        cap: usize,
    },
    #[error("gamma factor pole at {0}")]
    GammaPole(Complex64),
    #[error("theta asymptotic series is out of range below t = 10 (t = {0})")]
    BelowRange(f64),
    #[error("zero count certificate failed in Gram block [{block_lo}, {block_hi}]: found {found}, expected {expected}")]
    CertificationFailure {
        block_lo: f64,
        block_hi: f64,
        found: usize,
        expected: usize,
    },
    #[error("uncertified zero list used where a certified one is required")]
    Uncertified,
    #[error("zero cache line {line}: {message}")]
    CacheFormat { line: usize, message: String },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Precision knobs for Euler-Maclaurin evaluation.
#[derive(Debug, Clone, Copy)]
pub struct PrecisionConfig {
    /// Requested absolute error of zeta/zeta_prime values.
    pub target_abs_error: f64,
    /// Hard cap on main-sum length N.
    pub euler_maclaurin_terms: usize,
    /// Highest Bernoulli index 2j used in the tail (even, >= 2, <= 32).
    pub bernoulli_order: usize,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        PrecisionConfig {
            target_abs_error: 1e-12,
            euler_maclaurin_terms: 400_000,
            bernoulli_order: 28,
        }
    }
}

impl PrecisionConfig {
    pub fn validate(&self) {
        assert!(self.target_abs_error > 0.0);
        assert!(
            self.bernoulli_order >= 2
                && self.bernoulli_order % 2 == 0
                && self.bernoulli_order <= 32,
            "bernoulli_order must be even in 2..=32"
        );
    }
}

/// Raw joint Euler-Maclaurin evaluation of `(zeta(s), zeta'(s))`.
///
/// Valid for `Re s > -1` away from `s = 1`:
///
/// `zeta(s) = sum_{n<=N} n^-s + N^(1-s)/(s-1) - N^-s/2
///            + sum_j B_2j/(2j)! * (s)_{2j-1} * N^(-s-2j+1)`
///
/// and its term-wise s-derivative. The tail is truncated at the configured
/// Bernoulli order; the returned values are accurate to roughly the
/// geometric tail estimate, which is checked against the target.
pub fn zeta_em_raw(s: Complex64, cfg: &PrecisionConfig) -> Result<(Complex64, Complex64), ZetaError> {
    cfg.validate();
    let dist = (s - Complex64::new(1.0, 0.0)).norm();
    if dist < 1e-8 {
        return Err(ZetaError::PoleAtOne(dist));
    }
    let t_abs = s.im.abs();
    // N chosen so the Bernoulli tail ratio (|s|/2 pi N)^2 is ~0.08, which
    // with 14 terms puts the truncation near machine epsilon.
    let n_main = ((0.55 * (t_abs + 30.0)).ceil() as usize + 10).max(16);
    if n_main > cfg.euler_maclaurin_terms {
        return Err(ZetaError::PrecisionUnreachable {
            target: cfg.target_abs_error,
            needed: n_main,
            cap: cfg.euler_maclaurin_terms,
        });
    }
    let n = n_main as f64;
    let ln_n = n.ln();

    // main sums
    let mut z = Complex64::new(0.0, 0.0);
    let mut zp = Complex64::new(0.0, 0.0);
    for k in 1..=n_main {
        let lk = (k as f64).ln();
        let term = (-s * lk).exp();
        z += term;
        zp -= lk * term;
    }

    // integral + half-term corrections
    let n_pow_ms = (-s * ln_n).exp(); // N^{-s}
    let s1 = s - 1.0;
    let integral = n_pow_ms * n / s1; // N^{1-s}/(s-1)
    z += integral - 0.5 * n_pow_ms;
    zp += integral * (-ln_n - 1.0 / s1) + 0.5 * ln_n * n_pow_ms;

    // Bernoulli tail: q_j = (s)_{2j-1} N^{-(2j-1)} and its s-derivative dq_j
    // built incrementally by the product rule (no 1/s factors, so s at or
    // near nonpositive integers stays finite).
    let j_max = cfg.bernoulli_order / 2;
    let mut q = s / n;
    let mut dq = Complex64::new(1.0 / n, 0.0);
    let mut fact = 2.0f64; // (2j)!
    let mut last_mag = 0.0f64;
    for j in 1..=j_max {
        if j > 1 {
            let a = s + (2 * j - 3) as f64;
            let b = s + (2 * j - 2) as f64;
            let ab = a * b / (n * n);
            dq = dq * ab + q * (a + b) / (n * n);
            q *= ab;
            fact *= (2 * j - 1) as f64 * (2 * j) as f64;
        }
        let coeff = B2J[j - 1] / fact;
        let term = coeff * q * n_pow_ms;
        z += term;
        zp += coeff * n_pow_ms * (dq - q * ln_n);
        last_mag = term.norm();
    }
    // geometric tail estimate
    let ratio = ((s + cfg.bernoulli_order as f64).norm() / (TWO_PI * n)).powi(2);
    let tail = if ratio < 0.9 {
        last_mag * ratio / (1.0 - ratio)
    } else {
        f64::INFINITY
    };
    if tail > cfg.target_abs_error {
        return Err(ZetaError::PrecisionUnreachable {
            target: cfg.target_abs_error,
            needed: n_main * 2,
            cap: cfg.euler_maclaurin_terms,
        });
    }
    Ok((z, zp))
}

/// `(zeta(s), zeta'(s))` anywhere away from the pole: Euler-Maclaurin for
/// `Re s >= 1/2`, functional equation otherwise.
pub fn zeta_and_prime(s: Complex64, cfg: &PrecisionConfig) -> Result<(Complex64, Complex64), ZetaError> {
    let dist = (s - Complex64::new(1.0, 0.0)).norm();
    if dist < 1e-8 {
        return Err(ZetaError::PoleAtOne(dist));
    }
    // The raw sum stays valid and accurate down past Re s = -0.25, and
    // using it there keeps s = 0 away from the zeta(1 - s) pole that the
    // functional-equation route would hit.
    if s.re >= -0.25 {
        return zeta_em_raw(s, cfg);
    }
    // zeta(s) = chi(s) zeta(1-s);  zeta'(s) = chi(s) [ (chi'/chi)(s) zeta(1-s) - zeta'(1-s) ]
    let (z1, zp1) = zeta_em_raw(Complex64::new(1.0, 0.0) - s, cfg)?;
    let chi_s = chi(s)?;
    let chi_ld = chi_log_deriv(s)?;
    Ok((chi_s * z1, chi_s * (chi_ld * z1 - zp1)))
}

/// Riemann zeta.
pub fn zeta(s: Complex64, cfg: &PrecisionConfig) -> Result<Complex64, ZetaError> {
    Ok(zeta_and_prime(s, cfg)?.0)
}

/// Derivative of Riemann zeta.
pub fn zeta_prime(s: Complex64, cfg: &PrecisionConfig) -> Result<Complex64, ZetaError> {
    Ok(zeta_and_prime(s, cfg)?.1)
}

/// log Gamma by Stirling with argument shift; continuous on Re z > 0 and on
/// large-|z| regions with |arg z| < pi. Callers that exponentiate are
/// insensitive to 2 pi i branch offsets elsewhere.
pub fn ln_gamma(mut z: Complex64) -> Result<Complex64, ZetaError> {
    if z.im == 0.0 && z.re <= 0.0 && (z.re - z.re.round()).abs() < 1e-12 {
        return Err(ZetaError::GammaPole(z));
    }
    let mut shift = Complex64::new(0.0, 0.0);
    while z.norm() < 12.0 {
        shift -= z.ln();
        z += 1.0;
    }
    let mut acc = (z - 0.5) * z.ln() - z + 0.5 * (TWO_PI).ln();
    let z2 = z * z;
    let mut zp = z;
    for j in 1..=8usize {
        acc += B2J[j - 1] / ((2 * j) as f64 * (2 * j - 1) as f64) / zp;
        zp *= z2;
    }
    Ok(acc + shift)
}

/// Digamma by Stirling with argument shift.
pub fn digamma(mut z: Complex64) -> Result<Complex64, ZetaError> {
    if z.im == 0.0 && z.re <= 0.0 && (z.re - z.re.round()).abs() < 1e-12 {
        return Err(ZetaError::GammaPole(z));
    }
    let mut shift = Complex64::new(0.0, 0.0);
    while z.norm() < 12.0 {
        shift -= 1.0 / z;
        z += 1.0;
    }
    let mut acc = z.ln() - 0.5 / z;
    let z2 = z * z;
    let mut zp = z2;
    for j in 1..=8usize {
        acc -= B2J[j - 1] / (2 * j) as f64 / zp;
        zp *= z2;
    }
    Ok(acc + shift)
}

/// `log sin(w)` up to an integer multiple of 2 pi i, numerically stable for
/// large |Im w|; safe to exponentiate.
fn ln_sin_branchless(w: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    if w.im > 20.0 {
        // sin w = -e^{-iw}(1 - e^{2iw})/(2i)
        -i * w + ((1.0 - (2.0 * i * w).exp()).ln()) + Complex64::new(0.5f64.ln(), PI / 2.0)
    } else if w.im < -20.0 {
        // sin w = e^{iw}(1 - e^{-2iw})/(2i)
        i * w + ((1.0 - (-2.0 * i * w).exp()).ln()) - Complex64::new(2.0f64.ln(), PI / 2.0)
    } else {
        w.sin().ln()
    }
}

/// Functional-equation factor `chi(s) = 2^s pi^(s-1) sin(pi s/2) Gamma(1-s)`,
/// satisfying `zeta(s) = chi(s) zeta(1-s)` and `|chi(1/2+it)| = 1`.
pub fn chi(s: Complex64) -> Result<Complex64, ZetaError> {
    // sin(pi s/2) zeros at even integers cancel Gamma(1-s) poles at positive
    // integers except for actual trouble at odd positive integers? No:
    // Gamma(1-s) poles are at s = 1, 2, 3, ...; sin(pi s/2) vanishes at
    // s = 0, ±2, ±4, ...; net poles of chi at odd s >= 1 and zeros at even
    // s <= 0 mirror zeta's trivial zeros. Evaluation by logs is accurate away
    // from those points; exact integer hits raise GammaPole.
    let one_minus_s = Complex64::new(1.0, 0.0) - s;
    if s.im == 0.0 && s.re > 0.0 && (s.re - s.re.round()).abs() < 1e-12 {
        let k = s.re.round() as i64;
        if k % 2 == 1 {
            return Err(ZetaError::GammaPole(one_minus_s));
        }
    }
    let lg = ln_gamma(one_minus_s)?;
    let log_chi = s * 2.0f64.ln() + (s - 1.0) * PI.ln() + ln_sin_branchless(PI * s / 2.0) + lg;
    Ok(log_chi.exp())
}

/// Logarithmic derivative `chi'(s)/chi(s) = log 2 + log pi
/// + (pi/2) cot(pi s/2) - psi(1-s)`; asymptotically `-log(|t|/2 pi)`.
pub fn chi_log_deriv(s: Complex64) -> Result<Complex64, ZetaError> {
    let w = PI * s / 2.0;
    let i = Complex64::new(0.0, 1.0);
    let cot = if w.im > 20.0 {
        -i * (1.0 + 2.0 * (2.0 * i * w).exp())
    } else if w.im < -20.0 {
        i * (1.0 + 2.0 * (-2.0 * i * w).exp())
    } else {
        w.cos() / w.sin()
    };
    let psi = digamma(Complex64::new(1.0, 0.0) - s)?;
    Ok(Complex64::new((2.0 * PI).ln(), 0.0) + PI / 2.0 * cot - psi)
}

/// Riemann-Siegel theta by its asymptotic expansion; absolute error below
/// 1e-8 for t >= 10.
pub fn theta_rs(t: f64) -> Result<f64, ZetaError> {
    if t < 10.0 {
        return Err(ZetaError::BelowRange(t));
    }
    Ok(theta_asymptotic(t))
}

fn theta_asymptotic(t: f64) -> f64 {
    let u = t / TWO_PI;
    t / 2.0 * u.ln() - t / 2.0 - PI / 8.0
        + 1.0 / (48.0 * t)
        + 7.0 / (5760.0 * t.powi(3))
        + 31.0 / (80640.0 * t.powi(5))
        + 127.0 / (430080.0 * t.powi(7))
}

/// theta for any t > 0 via log Gamma:
/// `theta(t) = Im ln Gamma(1/4 + it/2) - (t/2) log pi`.
pub fn theta_exact(t: f64) -> Result<f64, ZetaError> {
    assert!(t > 0.0);
    let lg = ln_gamma(Complex64::new(0.25, t / 2.0))?;
    Ok(lg.im - t / 2.0 * PI.ln())
}

/// Derivative of theta, adequate for Newton steps on Gram points.
pub fn theta_derivative(t: f64) -> f64 {
    0.5 * (t / TWO_PI).ln() - 1.0 / (48.0 * t * t)
}

/// Hardy's function `Z(t) = e^{i theta(t)} zeta(1/2 + it)`, real for real t.
/// Uses the asymptotic theta for t >= 10 and the log-Gamma form below.
pub fn hardy_z(t: f64, cfg: &PrecisionConfig) -> Result<f64, ZetaError> {
    assert!(t > 0.0, "hardy_z needs t > 0");
    let theta = if t >= 10.0 {
        theta_asymptotic(t)
    } else {
        theta_exact(t)?
    };
    let z = zeta_em_raw(Complex64::new(0.5, t), cfg)?.0;
    let rot = Complex64::new(0.0, theta).exp() * z;
    debug_assert!(
        rot.im.abs() < 1e-6 * (1.0 + rot.re.abs()),
        "Z({t}) lost reality: {rot}"
    );
    Ok(rot.re)
}

/// Fast Riemann-Siegel approximation to Z(t) (main sum plus the first
/// correction term), for scanning. Absolute error is bounded by
/// [`rs_error_bound`]; use [`hardy_z`] for final decisions.
pub fn hardy_z_rs(t: f64) -> f64 {
    debug_assert!(t >= 10.0);
    let theta = theta_asymptotic(t);
    let u = (t / TWO_PI).sqrt();
    let nu = u.floor() as usize;
    let p = u - nu as f64;
    let mut z = 0.0f64;
    for n in 1..=nu {
        let nf = n as f64;
        z += (theta - t * nf.ln()).cos() / nf.sqrt();
    }
    z *= 2.0;
    // first Riemann-Siegel correction: psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p),
    // with the removable singularities at p = 1/4, 3/4 expanded to first order.
    let psi = {
        let d14 = p - 0.25;
        let d34 = p - 0.75;
        if d14.abs() < 1e-3 {
            0.5 - d14
        } else if d34.abs() < 1e-3 {
            0.5 + d34
        } else {
            (TWO_PI * (p * p - p - 0.0625)).cos() / (TWO_PI * p).cos()
        }
    };
    let sign = if nu % 2 == 1 { 1.0 } else { -1.0 };
    z + sign * (t / TWO_PI).powf(-0.25) * psi
}

/// Safe absolute-error envelope for [`hardy_z_rs`]; measured errors at
/// desk-scale heights sit a factor 4-30 below it.
pub fn rs_error_bound(t: f64) -> f64 {
    0.08 * (t / TWO_PI).powf(-0.75)
}
