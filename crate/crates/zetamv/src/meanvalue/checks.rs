//! Brute-force and quadrature cross-checks of the supporting estimates:
//! the restricted prime sum with its residue main term, the oscillatory
//! integral of the functional-equation factor, and the log-moment contour
//! integrals against their diagonal main terms.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::terms::contour_quadrature;
use super::{ComparisonReport, MainTermConstants, MeanValueError, MeanValueParams};
use crate::arith::{self, gcd, ArithFn, FactorSieve, FactoredInteger};
use crate::poly::Polynomial;
use crate::quad::integrate_real;
use crate::zeta::{chi, chi_log_deriv, PrecisionConfig};

/// Caps for the brute-force restricted prime sum.
pub const SHU_HK_CAP: u64 = 100;
pub const SHU_X_CAP: f64 = 1e7;

/// `(Lambda * log)(h u)` from the two factorizations without factoring the
/// product: `log^2(hu) - sum_{p^e || hu} e(e+1)/2 log^2 p`.
fn lambda_log_conv_of_product(u_f: &FactoredInteger, h_f: &FactoredInteger) -> f64 {
    let hu = u_f.value() as f64 * h_f.value() as f64;
    let mut correction = 0.0;
    let (ua, ha) = (u_f.factors(), h_f.factors());
    let (mut i, mut j) = (0, 0);
    while i < ua.len() || j < ha.len() {
        let (p, e) = if j >= ha.len() || (i < ua.len() && ua[i].0 < ha[j].0) {
            let out = ua[i];
            i += 1;
            out
        } else if i >= ua.len() || ha[j].0 < ua[i].0 {
            let out = ha[j];
            j += 1;
            out
        } else {
            let out = (ua[i].0, ua[i].1 + ha[j].1);
            i += 1;
            j += 1;
            out
        };
        let lp = (p as f64).ln();
        correction += (e * (e + 1)) as f64 / 2.0 * lp * lp;
    }
    hu.ln().powi(2) - correction
}

/// Brute-force values of `sum_{u <= x, (u,k)=1} (Lambda*log)(hu)` at each
/// point of the ascending sweep `xs_sorted`, via one incremental pass.
pub(crate) fn shu_brute_sweep(
    h: u64,
    k: u64,
    xs_sorted: &[f64],
) -> Result<Vec<f64>, MeanValueError> {
    if h == 0 || k == 0 || h > SHU_HK_CAP || k > SHU_HK_CAP {
        return Err(MeanValueError::Precondition(format!(
            "h and k must lie in 1..={SHU_HK_CAP}, got ({h}, {k})"
        )));
    }
    if xs_sorted.iter().any(|&x| !(x >= 2.0 && x <= SHU_X_CAP)) {
        return Err(MeanValueError::Precondition(format!(
            "sweep points must lie in [2, {SHU_X_CAP:e}]"
        )));
    }
    let h_f = FactoredInteger::of(h);
    let u_max = xs_sorted.last().copied().unwrap_or(2.0).floor() as u64;
    let sieve = FactorSieve::new(u_max)?;

    let mut sums = Vec::with_capacity(xs_sorted.len());
    let mut running = 0.0f64;
    let mut next = 0usize;
    for u in 1..=u_max {
        if gcd(u, k) == 1 {
            running += lambda_log_conv_of_product(&sieve.factor(u), &h_f);
        }
        while next < xs_sorted.len() && (u == u_max || (u + 1) as f64 > xs_sorted[next]) {
            sums.push(running);
            next += 1;
        }
    }
    debug_assert_eq!(sums.len(), xs_sorted.len());
    Ok(sums)
}

/// Brute-force `sum_{u <= x, (u,k)=1} (Lambda*log)(hu)` against the residue
/// main term `(x phi(k)/k)(1/2 log^2 x + 2 log(x/e) log h + (Lambda*log)(h)
/// + (C0 - eta1(k)) log(x/e) + C1 eta1(k) + eta_second_order(k) - g(h,k)
/// + a2)`, reported across the ascending sweep `x_values`.
pub fn shu_sum_check(
    h: u64,
    k: u64,
    x_values: &[f64],
    constants: &MainTermConstants,
) -> Result<ComparisonReport, MeanValueError> {
    constants.validate()?;
    let mut xs: Vec<f64> = x_values.to_vec();
    xs.sort_by(f64::total_cmp);
    let sums = shu_brute_sweep(h, k, &xs)?;

    let h_f = FactoredInteger::of(h);
    let k_f = FactoredInteger::of(k);
    let phi_over_k = arith::euler_phi(&k_f) as f64 / k as f64;
    let eta1 = arith::eta1(&k_f);
    let eta_so = arith::eta_second_order(&k_f);
    let g_hk = arith::g_hk(&h_f, &k_f);
    let lamlog_h = arith::von_mangoldt_log_conv(&h_f);

    let mut report = ComparisonReport::default();
    for (&x, &brute) in xs.iter().zip(&sums) {
        let lx = x.ln();
        let lxe = lx - 1.0;
        let bracket = 0.5 * lx * lx
            + 2.0 * lxe * (h as f64).ln()
            + lamlog_h
            + (constants.c0 - eta1) * lxe
            + constants.c1 * eta1
            + eta_so
            - g_hk
            + constants.a2;
        let main = x * phi_over_k * bracket;
        report.push_row(
            format!("h={h} k={k} x={x:e}"),
            Complex64::new(brute, 0.0),
            main,
        );
    }
    report.set_meta("check", "restricted prime sum vs residue main term");
    Ok(report)
}

/// Result of one oscillatory-integral check of the functional-equation
/// factor.
#[derive(Debug, Clone, Copy)]
pub struct GonekCheck {
    pub r: f64,
    pub t: f64,
    pub kappa: f64,
    pub quadrature: Complex64,
    pub predicted: Complex64,
    pub residual: f64,
    pub envelope: f64,
    pub within_envelope: bool,
}

/// `(1/2pi i) int_{kappa+i}^{kappa+iT} chi(1-s) r^{-s} ds` against the
/// prediction `[r <= T/2pi] e(-r)`, with the residual measured against the
/// envelope `(T^{kappa-1/2} + T^{kappa+1/2} / (|T - 2 pi r| + sqrt(T)))
/// r^{-kappa}`.
pub fn gonek_integral_check(
    r: f64,
    t: f64,
    kappa: f64,
    cfg: &PrecisionConfig,
) -> Result<GonekCheck, MeanValueError> {
    if !(1.0..=2.0).contains(&kappa) {
        return Err(MeanValueError::Precondition(format!(
            "kappa must lie in [1, 2], got {kappa}"
        )));
    }
    if r <= 0.0 {
        return Err(MeanValueError::Precondition("r must be positive".into()));
    }
    let t_2pi = t / TAU;
    if (r - t_2pi).abs() < 0.05 * t_2pi {
        return Err(MeanValueError::Precondition(format!(
            "r = {r} lies within 5% of the discontinuity at T/2pi = {t_2pi:.3}"
        )));
    }
    let ln_r = r.ln();
    let max_freq = (t / TAU).ln().max(0.0) + ln_r.abs();
    let abs_tol = (1e-6 * t).max(cfg.target_abs_error);
    let quadrature = contour_quadrature(t, abs_tol, max_freq, |tt| {
        let s = Complex64::new(kappa, tt);
        let chi_v = chi(Complex64::new(1.0, 0.0) - s)?;
        Ok(chi_v * (-s * ln_r).exp())
    })?;
    let predicted = if r <= t_2pi {
        Complex64::new(0.0, -TAU * r).exp()
    } else {
        Complex64::new(0.0, 0.0)
    };
    let envelope = (t.powf(kappa - 0.5)
        + t.powf(kappa + 0.5) / ((t - TAU * r).abs() + t.sqrt()))
        * r.powf(-kappa);
    let residual = (quadrature - predicted).norm();
    Ok(GonekCheck {
        r,
        t,
        kappa,
        quadrature,
        predicted,
        residual,
        envelope,
        within_envelope: residual <= envelope,
    })
}

/// Ten (r, T, kappa) triples spanning both branches of the indicator
/// `[r <= T/2pi]`.
pub fn gonek_check_battery(cfg: &PrecisionConfig) -> Result<Vec<GonekCheck>, MeanValueError> {
    const TRIPLES: [(f64, f64, f64); 10] = [
        // r below T/2pi: prediction e(-r)
        (1.5, 200.0, 1.1),
        (2.25, 500.0, 1.5),
        (0.5, 300.0, 1.0),
        (3.75, 1000.0, 1.3),
        (10.0, 2000.0, 2.0),
        // r above T/2pi: prediction 0
        (40.0, 200.0, 1.1),
        (200.0, 200.0, 1.5),
        (100.0, 500.0, 1.25),
        (200.0, 1000.0, 1.5),
        (300.0, 300.0, 2.0),
    ];
    TRIPLES
        .iter()
        .map(|&(r, t, kappa)| gonek_integral_check(r, t, kappa, cfg))
        .collect()
}

/// Result of one log-moment contour check.
#[derive(Debug, Clone, Copy)]
pub struct JkCheck {
    /// `(1/2pi i) int (chi'/chi)^k D(s) X(s) Y(1-s) ds` with `D` truncated.
    pub quadrature: Complex64,
    /// `(-1)^k T P_k(log(T/2pi)) / 2pi * sum_{nu<=M} alpha_n x_u y_{nu}/(nu)`.
    pub diagonal_formula: f64,
    pub rel_error: f64,
    /// `|int_1^T log^k(t/2pi) dt - T P_k(log(T/2pi))|` (bounded by a
    /// constant, asserted <= 10 in the acceptance gate).
    pub integral_gap: f64,
    /// Crude bound on the discarded Dirichlet tail of `D`.
    pub series_tail_estimate: f64,
}

/// Verifies both displays behind the log-moment lemma: the antiderivative
/// identity for `int_1^T log^k(t/2pi) dt`, and the contour integral against
/// its diagonal main term.
pub fn jk_check(
    k: u8,
    alpha: &ArithFn,
    params: &MeanValueParams,
    kappa: f64,
    series_bound: u64,
    cfg: &PrecisionConfig,
) -> Result<JkCheck, MeanValueError> {
    if k > 2 {
        return Err(MeanValueError::Precondition(format!(
            "k must lie in 0..=2, got {k}"
        )));
    }
    if !(kappa > 1.0 && kappa <= 2.0) {
        return Err(MeanValueError::Precondition(format!(
            "kappa must lie in (1, 2], got {kappa}"
        )));
    }
    let t_hi = params.t;
    let ell = params.log_t_2pi();
    let p_k = Polynomial::log_moment(k as u32);
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };

    // antiderivative identity
    let integral = integrate_real(
        |t| (t / TAU).ln().powi(k as i32),
        1.0,
        t_hi,
        1e-9 * t_hi,
        t_hi / 32.0,
    )?;
    let integral_gap = (integral.value.re - t_hi * p_k.eval(ell)).abs();

    // diagonal main term
    let mut diag_sum = 0.0;
    for (w, yv) in params.y.iter_nonzero() {
        for (u, xv) in params.x.iter_nonzero() {
            if w % u == 0 {
                diag_sum += alpha.eval(&FactoredInteger::of(w / u)) * xv * yv / w as f64;
            }
        }
    }
    let diagonal_formula = sign * t_hi * p_k.eval(ell) / TAU * diag_sum;

    // truncated Dirichlet series of alpha
    let sieve = FactorSieve::new(series_bound)?;
    let mut series: Vec<(f64, f64)> = Vec::new(); // (ln n, alpha_n)
    let mut recent_max = 0.0f64;
    for n in 1..=series_bound {
        let v = alpha.eval(&sieve.factor(n));
        if v != 0.0 {
            series.push(((n as f64).ln(), v));
        }
        if 2 * n >= series_bound {
            recent_max = recent_max.max(v.abs());
        }
    }
    let series_tail_estimate =
        recent_max * (series_bound as f64).powf(1.0 - kappa) / (kappa - 1.0);

    let max_freq = ((series_bound * params.m.max(1)) as f64).ln();
    let abs_tol = (1e-6 * t_hi).max(cfg.target_abs_error);
    let quadrature = contour_quadrature(t_hi, abs_tol, max_freq, |t| {
        let s = Complex64::new(kappa, t);
        let mut d = Complex64::new(0.0, 0.0);
        for &(ln_n, a_n) in &series {
            d += a_n * (-s * ln_n).exp();
        }
        let cl = chi_log_deriv(s)?;
        let xv = params.x.dirichlet_eval(s);
        let yv = params.y.dirichlet_eval(Complex64::new(1.0 - kappa, -t));
        Ok(cl.powu(k as u32) * d * xv * yv)
    })?;

    let rel_error =
        (quadrature.re - diagonal_formula).abs() / diagonal_formula.abs().max(super::REL_ERROR_FLOOR);
    Ok(JkCheck {
        quadrature,
        diagonal_formula,
        rel_error,
        integral_gap,
        series_tail_estimate,
    })
}
