//! Critical-line zero location with count certification.
//!
//! Zeros of Hardy's Z are bracketed by sign changes on a Gram-point
//! partition, with block-wise densification where Gram's law fails, refined
//! by bisection on the fast Riemann-Siegel evaluation and polished by secant
//! iteration on the Euler-Maclaurin evaluation. Completeness is certified by
//! the classical count identity at good Gram points: exactly n+1 zeros lie
//! below the n-th Gram point when the endpoints test good, block by block.

use std::io::{BufRead, Write};

use super::{
    hardy_z, hardy_z_rs, rs_error_bound, theta_derivative, PrecisionConfig, ZetaError,
};

const PI: f64 = std::f64::consts::PI;

/// Certified list of zero ordinates `0 < gamma < T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroList {
    /// Exclusive upper bound of the search range.
    pub t: f64,
    /// Strictly increasing ordinates.
    pub gammas: Vec<f64>,
    /// True when the block-wise count certificate passed.
    pub certified: bool,
    /// Absolute error bound on each ordinate.
    pub abs_error: f64,
}

impl ZeroList {
    pub fn validate(&self) -> Result<(), ZetaError> {
        for (i, w) in self.gammas.windows(2).enumerate() {
            if w[0] >= w[1] {
                // the offending entry is the second of the pair; entry j
                // lives on file line j + 2 (header is line 1)
                return Err(ZetaError::CacheFormat {
                    line: i + 3,
                    message: format!("ordinates not strictly increasing: {} then {}", w[0], w[1]),
                });
            }
        }
        if let Some(&first) = self.gammas.first() {
            if first <= 0.0 {
                return Err(ZetaError::CacheFormat {
                    line: 2,
                    message: format!("nonpositive ordinate {first}"),
                });
            }
        }
        if let Some(&last) = self.gammas.last() {
            if last >= self.t {
                return Err(ZetaError::CacheFormat {
                    line: self.gammas.len() + 1,
                    message: format!("ordinate {last} not below T = {}", self.t),
                });
            }
        }
        Ok(())
    }

    /// Number of ordinates strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        self.gammas.partition_point(|&g| g < x)
    }

    /// Ordinates strictly below `x`.
    pub fn below(&self, x: f64) -> &[f64] {
        &self.gammas[..self.count_below(x)]
    }

    /// Serialize as `# zeros T=<T> abs_error=<e> certified=<bool>` plus one
    /// fixed-point 12-decimal ordinate per line. Deterministic, so repeated
    /// writes are byte-identical.
    pub fn write_cache(&self, w: &mut impl Write) -> Result<(), ZetaError> {
        writeln!(
            w,
            "# zeros T={} abs_error={} certified={}",
            self.t, self.abs_error, self.certified
        )?;
        for g in &self.gammas {
            writeln!(w, "{g:.12}")?;
        }
        Ok(())
    }

    /// Parse the [`write_cache`](Self::write_cache) format, validating
    /// header shape and monotonicity.
    pub fn read_cache(r: &mut impl BufRead) -> Result<Self, ZetaError> {
        let mut header = String::new();
        r.read_line(&mut header)?;
        let header = header.trim_end();
        let rest = header
            .strip_prefix("# zeros T=")
            .ok_or_else(|| ZetaError::CacheFormat {
                line: 1,
                message: format!("bad header {header:?}"),
            })?;
        let mut fields = rest.split(' ');
        let parse_err = |line: usize, message: String| ZetaError::CacheFormat { line, message };
        let t: f64 = fields
            .next()
            .ok_or_else(|| parse_err(1, "missing T".into()))?
            .parse()
            .map_err(|e| parse_err(1, format!("bad T: {e}")))?;
        let abs_error: f64 = fields
            .next()
            .and_then(|f| f.strip_prefix("abs_error="))
            .ok_or_else(|| parse_err(1, "missing abs_error=".into()))?
            .parse()
            .map_err(|e| parse_err(1, format!("bad abs_error: {e}")))?;
        let certified: bool = fields
            .next()
            .and_then(|f| f.strip_prefix("certified="))
            .ok_or_else(|| parse_err(1, "missing certified=".into()))?
            .parse()
            .map_err(|e| parse_err(1, format!("bad certified: {e}")))?;
        let mut gammas = Vec::new();
        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let g: f64 = trimmed
                .parse()
                .map_err(|e| parse_err(idx + 2, format!("bad ordinate {trimmed:?}: {e}")))?;
            gammas.push(g);
        }
        let list = ZeroList {
            t,
            gammas,
            certified,
            abs_error,
        };
        list.validate()?;
        Ok(list)
    }
}

/// The n-th Gram point: the unique `g >= 9.6` with `theta(g) = n pi`,
/// defined for `n >= -1`.
pub fn gram_point(n: i64) -> f64 {
    assert!(n >= -1, "Gram points start at index -1");
    let target = n as f64 * PI;
    // bracket then safeguarded Newton; theta is increasing beyond 2 pi
    let mut lo = 7.0f64;
    let mut hi = 20.0f64;
    while theta_unchecked(hi) < target {
        lo = hi;
        hi *= 1.5;
    }
    // theta is convex, so an unguarded Newton step can overshoot past `hi`
    // when the root sits near it; shrink the bracket every iteration so the
    // midpoint fallback is genuine bisection and cannot stall
    let mut g = 0.5 * (lo + hi);
    for _ in 0..80 {
        let f = theta_unchecked(g) - target;
        if f > 0.0 {
            hi = g;
        } else {
            lo = g;
        }
        let step = f / theta_derivative(g);
        let next = g - step;
        g = if (lo..=hi).contains(&next) {
            next
        } else {
            0.5 * (lo + hi)
        };
        if step.abs() < 1e-12 || hi - lo < 1e-12 {
            break;
        }
    }
    g
}

fn theta_unchecked(t: f64) -> f64 {
    // the asymptotic series is adequate for bracketing below its formal
    // range; Gram machinery never needs t < 7
    let two_pi = 2.0 * PI;
    let u = t / two_pi;
    t / 2.0 * u.ln() - t / 2.0 - PI / 8.0 + 1.0 / (48.0 * t) + 7.0 / (5760.0 * t.powi(3))
}

/// Sign of Z(t) that is safe against Riemann-Siegel truncation error:
/// the fast value decides only when it clears its error envelope, otherwise
/// the Euler-Maclaurin value decides. Returns 0.0 when even that is
/// ambiguous (|Z| < 1e-9, i.e. t is essentially a zero).
fn safe_z(t: f64, cfg: &PrecisionConfig) -> Result<f64, ZetaError> {
    if t >= 10.0 {
        let fast = hardy_z_rs(t);
        if fast.abs() > 4.0 * rs_error_bound(t) {
            return Ok(fast);
        }
    }
    let slow = hardy_z(t, cfg)?;
    Ok(if slow.abs() < 1e-9 { 0.0 } else { slow })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum GramStatus {
    Good,
    Bad,
}

/// Locate all zeros `0 < gamma < t_max`, certify the count block-wise, and
/// refine each ordinate to `abs_error <= 1e-8`.
pub fn find_zeros(t_max: f64, cfg: &PrecisionConfig) -> Result<ZeroList, ZetaError> {
    assert!(t_max >= 15.0, "zero search needs T >= 15");

    // Gram points g_{-1}, g_0, ... up to the first *good* one at or past t_max.
    let mut grams: Vec<f64> = Vec::new();
    let mut statuses: Vec<GramStatus> = Vec::new();
    let mut n: i64 = -1;
    loop {
        let g = gram_point(n);
        let z = safe_z(g, cfg)?;
        let parity = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let good = parity * z > 0.0;
        grams.push(g);
        statuses.push(if good { GramStatus::Good } else { GramStatus::Bad });
        if g >= t_max && good {
            break;
        }
        n += 1;
        assert!(
            g < t_max + 100.0,
            "no good Gram point found near T = {t_max}"
        );
    }
    if statuses[0] != GramStatus::Good {
        // g_{-1} is comfortably good in reality; a failure here means the
        // evaluator is broken, not the partition.
        return Err(ZetaError::CertificationFailure {
            block_lo: grams[0],
            block_hi: grams[0],
            found: 0,
            expected: 0,
        });
    }

    // blocks between consecutive good Gram points
    let mut zeros: Vec<f64> = Vec::new();
    let mut block_start = 0usize; // index into grams
    for idx in 1..grams.len() {
        if statuses[idx] != GramStatus::Good {
            continue;
        }
        let expected = idx - block_start;
        let (lo, hi) = (grams[block_start], grams[idx]);
        let found = scan_block(lo, hi, expected, cfg)?;
        if found.len() != expected {
            return Err(ZetaError::CertificationFailure {
                block_lo: lo,
                block_hi: hi,
                found: found.len(),
                expected,
            });
        }
        zeros.extend(found);
        block_start = idx;
    }

    // By construction the certificate holds: zeros below g_m (the last good
    // Gram point, index m in Gram numbering) number exactly m + 1.
    let list = ZeroList {
        t: t_max,
        gammas: zeros.into_iter().filter(|&g| g < t_max).collect(),
        certified: true,
        abs_error: 1e-8,
    };
    list.validate().expect("freshly computed list must be valid");
    Ok(list)
}

/// Find exactly `expected` zeros of Z in (lo, hi), densifying the scan grid
/// up to 64x if needed. Returns fewer only if densification is exhausted.
fn scan_block(
    lo: f64,
    hi: f64,
    expected: usize,
    cfg: &PrecisionConfig,
) -> Result<Vec<f64>, ZetaError> {
    let gram_intervals = ((hi - lo) / (2.0 * PI / (lo / (2.0 * PI)).ln())).max(1.0);
    for density in [1usize, 4, 16, 64] {
        let points = ((8 * density) as f64 * gram_intervals).ceil() as usize + 1;
        let step = (hi - lo) / points as f64;
        let mut brackets: Vec<(f64, f64)> = Vec::new();
        let mut prev_t = lo;
        let mut prev_z = safe_z(lo, cfg)?;
        for k in 1..=points {
            let t = if k == points { hi } else { lo + step * k as f64 };
            let z = safe_z(t, cfg)?;
            if prev_z * z < 0.0 {
                brackets.push((prev_t, t));
            } else if z == 0.0 && k != points {
                // grid point landed on a zero: perturb bracket around it
                brackets.push((t - 0.25 * step, t + 0.25 * step));
            }
            prev_t = t;
            prev_z = z;
        }
        if brackets.len() == expected {
            let mut out = Vec::with_capacity(expected);
            for (a, b) in brackets {
                out.push(refine_zero(a, b, cfg)?);
            }
            return Ok(out);
        }
        if brackets.len() > expected {
            // more sign changes than the certificate allows cannot happen if
            // the endpoints are genuinely good; treat as failure immediately
            return Ok(brackets
                .into_iter()
                .map(|(a, b)| refine_zero(a, b, cfg))
                .collect::<Result<Vec<_>, _>>()?);
        }
    }
    Ok(Vec::new())
}

/// Refine a sign-change bracket to an ordinate with absolute error <= 1e-8:
/// bisection on the safe-sign evaluation down to 1e-3, then secant iteration
/// on the Euler-Maclaurin Z.
fn refine_zero(mut a: f64, mut b: f64, cfg: &PrecisionConfig) -> Result<f64, ZetaError> {
    let mut za = safe_z(a, cfg)?;
    let zb = safe_z(b, cfg)?;
    debug_assert!(za * zb <= 0.0, "refine_zero needs a sign change");
    if za == 0.0 {
        return Ok(a);
    }
    while b - a > 1e-3 {
        let m = 0.5 * (a + b);
        let zm = safe_z(m, cfg)?;
        if zm == 0.0 {
            return Ok(m);
        }
        if za * zm < 0.0 {
            b = m;
        } else {
            a = m;
            za = zm;
        }
    }
    // secant polish on the accurate evaluation
    let mut x0 = a;
    let mut x1 = b;
    let mut f0 = hardy_z(x0, cfg)?;
    let mut f1 = hardy_z(x1, cfg)?;
    for _ in 0..12 {
        if (f1 - f0).abs() < 1e-300 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        let x2 = if (a - 1e-3..=b + 1e-3).contains(&x2) {
            x2
        } else {
            0.5 * (x0 + x1)
        };
        let f2 = hardy_z(x2, cfg)?;
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        if (x1 - x0).abs() < 1e-10 {
            break;
        }
    }
    Ok(x1)
}

/// Move a raw endpoint to the midpoint of the straddling zero pair when it
/// sits within `1/log T` of a zero; otherwise keep it. Requires a certified
/// list covering `t_raw`.
pub fn snap_endpoint(t_raw: f64, zeros: &ZeroList) -> Result<f64, ZetaError> {
    if !zeros.certified || zeros.t < t_raw {
        return Err(ZetaError::Uncertified);
    }
    let margin = 1.0 / t_raw.ln();
    let idx = zeros.count_below(t_raw);
    let below = if idx > 0 { Some(zeros.gammas[idx - 1]) } else { None };
    let above = zeros.gammas.get(idx).copied();
    let d_below = below.map_or(f64::INFINITY, |g| t_raw - g);
    let d_above = above.map_or(f64::INFINITY, |g| g - t_raw);
    if d_below > margin && d_above > margin {
        return Ok(t_raw);
    }
    let lo = below.unwrap_or(0.0);
    match above {
        Some(hi) => Ok(0.5 * (lo + hi)),
        // nothing above within the certified range: leave alone
        None => Ok(t_raw),
    }
}
