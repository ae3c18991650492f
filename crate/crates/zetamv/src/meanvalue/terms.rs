//! Assembly of the main-term formulas and the direct evaluation routes
//! (discrete sum over zeros, brute-force double sum, contour quadrature).

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;

use num_complex::Complex64;

use super::{ComparisonReport, MainTermConstants, MeanValueError, MeanValueParams};
use crate::arith::{
    self, dirichlet_convolve, gcd, ArithFn, FactorSieve, FactoredInteger, TABLE_CAP,
};
use crate::coeffs::{dense_table, CoefficientVector};
use crate::quad::integrate_complex;
use crate::zeta::{chi_log_deriv, zeta_and_prime, PrecisionConfig, ZeroList};

/// Cap on the largest inner summation length of [`m0_direct`].
pub const M0_DIRECT_TERM_CAP: f64 = 1e8;

/// Compensated complex accumulator (Kahan).
#[derive(Default)]
struct KahanSum {
    sum: Complex64,
    comp: Complex64,
}

impl KahanSum {
    fn add(&mut self, v: Complex64) {
        let y = v - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }
}

/// `H(M; u, v) = sum_{g <= min(M/u, M/v)} y_{ug} x_{vg} / g`.
pub fn h_factor(x: &CoefficientVector, y: &CoefficientVector, u: u64, v: u64) -> f64 {
    let m = x.support_bound().min(y.support_bound());
    let mut acc = 0.0;
    for (n, yv) in y.iter_nonzero() {
        if n % u != 0 {
            continue;
        }
        let g = n / u;
        if g == 0 || v.saturating_mul(g) > m {
            continue;
        }
        acc += yv * x.get(v * g) / g as f64;
    }
    acc
}

/// `r0(n) = P2(l) - 2 P1(l) log n + (Lambda*log)(n)` with `l = log(T/2pi)`.
fn r0(n: &FactoredInteger, ell: f64, c: &MainTermConstants) -> f64 {
    c.p2.eval(ell) - 2.0 * c.p1.eval(ell) * (n.value() as f64).ln()
        + arith::von_mangoldt_log_conv(n)
}

/// `c'(u, v) = -1/2 Lambda_2(u) + R1(A_v) Lambda(u) + R~1(A_v) alpha1(u)
///  + alpha2(u)` with `A_v = log(T / 2 pi v)`. The coefficient of the third
/// main-term sum is `r1(u, v) = -c'(u, v)`.
fn c_prime(u: &FactoredInteger, a_v: f64, c: &MainTermConstants) -> f64 {
    -0.5 * arith::lambda_k(u, 2)
        + c.r1_poly.eval(a_v) * arith::von_mangoldt(u)
        + c.r1_tilde.eval(a_v) * arith::alpha1(u)
        + arith::alpha2(u, c.d)
}

/// All divisors of the support elements of `c` (candidate outer indices for
/// the coprime double sums; any other index makes `H` vanish identically).
fn support_divisors(c: &CoefficientVector) -> Vec<u64> {
    let mut set = BTreeSet::new();
    for (n, _) in c.iter_nonzero() {
        for d in FactoredInteger::of(n).divisors() {
            set.insert(d);
        }
    }
    set.into_iter().collect()
}

/// The explicit main term for the discrete mean value:
/// `(T/2pi) sum_{nu<=M} x_u y_{nu} r0(n)/(nu)`
/// `- (T/4pi) sum_{gv<=M} y_g x_{gv} R2(log(T/2pi v))/(gv)`
/// `+ (T/2pi) sum_{(a,b)=1} r1(a,b) H(M;a,b)/(ab)`.
pub fn theorem1_main_term(
    params: &MeanValueParams,
    constants: &MainTermConstants,
) -> Result<f64, MeanValueError> {
    constants.validate()?;
    let t = params.t;
    let ell = params.log_t_2pi();
    let (x, y) = (&params.x, &params.y);

    // first sum: x_u y_{nu} r0(n) / (nu), iterated over the y-support
    let mut sum1 = 0.0;
    for (w, yv) in y.iter_nonzero() {
        for (u, xv) in x.iter_nonzero() {
            if w % u == 0 {
                let n = FactoredInteger::of(w / u);
                sum1 += xv * yv * r0(&n, ell, constants) / w as f64;
            }
        }
    }

    // second sum: y_g x_{gv} R2(log(T/2pi v)) / (gv)
    let mut sum2 = 0.0;
    for (w, xv) in x.iter_nonzero() {
        for (g, yv) in y.iter_nonzero() {
            if w % g == 0 {
                let v = w / g;
                sum2 += yv * xv * constants.r2.eval((t / (TAU * v as f64)).ln()) / w as f64;
            }
        }
    }

    // third sum: r1(a, b) H(M; a, b) / (ab) over coprime (a, b)
    let mut sum3 = 0.0;
    for &a in &support_divisors(y) {
        if a == 1 {
            continue; // r1(1, b) = 0: every component vanishes at 1
        }
        let a_f = FactoredInteger::of(a);
        for &b in &support_divisors(x) {
            if gcd(a, b) != 1 {
                continue;
            }
            let h = h_factor(x, y, a, b);
            if h == 0.0 {
                continue;
            }
            let a_v = (t / (TAU * b as f64)).ln();
            sum3 += -c_prime(&a_f, a_v, constants) * h / (a * b) as f64;
        }
    }

    Ok(t / TAU * sum1 - t / (2.0 * TAU) * sum2 + t / TAU * sum3)
}

/// Main term of the arithmetic-part object:
/// `(T/2pi) sum_{(u,v)=1} c'(u,v) H(M;u,v)/(uv)
///  + (T/4pi) sum_{gv<=M} y_g x_{gv} R2(log(T/2pi v))/(gv)`.
pub fn m0_main_term(
    params: &MeanValueParams,
    constants: &MainTermConstants,
) -> Result<f64, MeanValueError> {
    constants.validate()?;
    let t = params.t;
    let (x, y) = (&params.x, &params.y);

    let mut sum1 = 0.0;
    for &u in &support_divisors(y) {
        if u == 1 {
            continue; // c'(1, v) = 0
        }
        let u_f = FactoredInteger::of(u);
        for &v in &support_divisors(x) {
            if gcd(u, v) != 1 {
                continue;
            }
            let h = h_factor(x, y, u, v);
            if h == 0.0 {
                continue;
            }
            let a_v = (t / (TAU * v as f64)).ln();
            sum1 += c_prime(&u_f, a_v, constants) * h / (u * v) as f64;
        }
    }

    let mut sum2 = 0.0;
    for (w, xv) in x.iter_nonzero() {
        for (g, yv) in y.iter_nonzero() {
            if w % g == 0 {
                let v = w / g;
                sum2 += yv * xv * constants.r2.eval((t / (TAU * v as f64)).ln()) / w as f64;
            }
        }
    }

    Ok(t / TAU * sum1 + t / (2.0 * TAU) * sum2)
}

/// Table of `a(m d)` for `m <= n`, 1-indexed (index 0 unused), where
/// `a = Lambda * log * x` (Dirichlet convolution), built from two
/// convolution passes.
pub fn a_coefficients(
    d: u64,
    n: u64,
    x: &CoefficientVector,
    sieve: &FactorSieve,
) -> Result<Vec<f64>, MeanValueError> {
    let full = n
        .checked_mul(d)
        .filter(|&v| v <= TABLE_CAP)
        .ok_or(MeanValueError::BudgetExceeded {
            terms: n as f64 * d as f64,
            cap: TABLE_CAP as f64,
        })?;
    let lam_log = dirichlet_convolve(&ArithFn::von_mangoldt(), &ArithFn::log(), full, sieve)?;
    let x_tab = dense_table(x, full);
    let a_full = arith::convolve_tables(&lam_log, &x_tab);
    let mut out = vec![0.0f64; n as usize + 1];
    for m in 1..=n as usize {
        out[m] = a_full[m * d as usize];
    }
    Ok(out)
}

/// Brute-force double sum
/// `sum_{k<=M} (y_k/k) sum_{m <= kT/2pi} a(m) mu(k/(m,k)) / phi(k/(m,k))`.
pub fn m0_direct(params: &MeanValueParams) -> Result<Complex64, MeanValueError> {
    let t = params.t;
    let m_len = params.m as f64 * t / TAU;
    if m_len > M0_DIRECT_TERM_CAP {
        return Err(MeanValueError::BudgetExceeded {
            terms: m_len,
            cap: M0_DIRECT_TERM_CAP,
        });
    }
    let n_max = m_len.floor() as u64;
    if n_max == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let sieve = FactorSieve::new(n_max)?;
    let a_tab = a_coefficients(1, n_max, &params.x, &sieve)?;
    let mut acc = KahanSum::default();
    for (k, yk) in params.y.iter_nonzero() {
        // mu(w)/phi(w) for the divisors w of k, keyed by w
        let mut weight: BTreeMap<u64, f64> = BTreeMap::new();
        for w in FactoredInteger::of(k).divisors() {
            let wf = FactoredInteger::of(w);
            weight.insert(
                w,
                f64::from(arith::mobius(&wf)) / arith::euler_phi(&wf) as f64,
            );
        }
        let m_hi = (k as f64 * t / TAU).floor() as u64;
        for m in 1..=m_hi {
            let a_m = a_tab[m as usize];
            if a_m == 0.0 {
                continue;
            }
            let w = k / gcd(m, k);
            acc.add(Complex64::new(yk / k as f64 * a_m * weight[&w], 0.0));
        }
    }
    Ok(acc.sum)
}

/// `S = sum_{0 < gamma < T} zeta'(rho) X(rho) Y(1 - rho)` over the listed
/// ordinates, `rho = 1/2 + i gamma`, with compensated accumulation.
pub fn discrete_sum(
    params: &MeanValueParams,
    zeros: &ZeroList,
    cfg: &PrecisionConfig,
) -> Result<Complex64, MeanValueError> {
    if !zeros.certified || zeros.t < params.t {
        return Err(MeanValueError::UncertifiedZeros { t: params.t });
    }
    let mut acc = KahanSum::default();
    for &gamma in zeros.below(params.t) {
        let rho = Complex64::new(0.5, gamma);
        let (_, zp) = zeta_and_prime(rho, cfg)?;
        let xv = params.x.dirichlet_eval(rho);
        let yv = params.y.dirichlet_eval(Complex64::new(0.5, -gamma));
        acc.add(zp * xv * yv);
    }
    Ok(acc.sum)
}

/// Shared quadrature driver for integrals `(1/2pi) int_1^T f(kappa + it) dt`
/// of oscillation frequency at most `max_freq`; errors observed inside the
/// integrand surface after integration.
pub(crate) fn contour_quadrature<F>(
    t_hi: f64,
    abs_tol: f64,
    max_freq: f64,
    f: F,
) -> Result<Complex64, MeanValueError>
where
    F: Fn(f64) -> Result<Complex64, MeanValueError>,
{
    let first_error: RefCell<Option<MeanValueError>> = RefCell::new(None);
    let integrand = |t: f64| match f(t) {
        Ok(v) => v,
        Err(e) => {
            let mut slot = first_error.borrow_mut();
            if slot.is_none() {
                *slot = Some(e);
            }
            Complex64::new(0.0, 0.0)
        }
    };
    let width = std::f64::consts::PI / (2.0 * max_freq.max(1.0));
    let result = integrate_complex(integrand, 1.0, t_hi, abs_tol, width);
    if let Some(e) = first_error.into_inner() {
        return Err(e);
    }
    Ok(result?.value / TAU)
}

/// Contour route: `(1/2pi i) int_{kappa+i}^{kappa+iT} ((chi'/chi)^2 zeta
///  - 2 (chi'/chi) zeta' + (zeta'/zeta) zeta') X(s) Y(1-s) ds` on
/// `kappa = 1 + 1/log T`.
pub fn sr_quadrature(
    params: &MeanValueParams,
    cfg: &PrecisionConfig,
) -> Result<Complex64, MeanValueError> {
    let t_hi = params.t;
    let kappa = 1.0 + 1.0 / t_hi.ln();
    let max_freq = (params.m as f64 * t_hi / TAU).ln();
    contour_quadrature(t_hi, 1e-6 * t_hi, max_freq, |t| {
        let s = Complex64::new(kappa, t);
        let (z, zp) = zeta_and_prime(s, cfg)?;
        let cl = chi_log_deriv(s)?;
        let core = cl * cl * z - 2.0 * cl * zp + zp / z * zp;
        let xv = params.x.dirichlet_eval(s);
        let yv = params.y.dirichlet_eval(Complex64::new(1.0 - kappa, -t));
        Ok(core * xv * yv)
    })
}

/// Sweep driver: for each parameter point emits the discrete sum against the
/// explicit main term, and optionally the contour-route mid-level identity
/// (contour integral minus the conjugated brute-force double sum, compared
/// against the real part of the discrete sum).
pub fn end_to_end_report(
    sweep: &[MeanValueParams],
    constants: &MainTermConstants,
    zeros: &ZeroList,
    cfg: &PrecisionConfig,
    with_contour: bool,
) -> Result<ComparisonReport, MeanValueError> {
    let mut report = ComparisonReport::default();
    for params in sweep {
        let discrete = discrete_sum(params, zeros, cfg)?;
        let main = theorem1_main_term(params, constants)?;
        let label = format!(
            "T={} theta={:.3} M={} case={}",
            params.t, params.theta, params.m, params.case_label
        );
        report.push_row(label.clone(), discrete, main);
        if with_contour {
            let sr = sr_quadrature(params, cfg)?;
            let m0 = m0_direct(params)?;
            report.push_row(format!("{label} midlevel"), sr - m0.conj(), discrete.re);
        }
    }
    report.set_meta(
        "constants",
        serde_json::to_string(constants).expect("constants serialize"),
    );
    report.set_meta(
        "zero_cache",
        format!(
            "T={} count={} certified={} abs_error={:e}",
            zeros.t,
            zeros.gammas.len(),
            zeros.certified,
            zeros.abs_error
        ),
    );
    report.set_meta(
        "indexing_note",
        "first main-term sum pairs x_u with y_{nu}; the variant pairing x_u with x_{nu} is not used",
    );
    report.set_meta(
        "timestamp_unix_s",
        format!(
            "{}",
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        ),
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{divisor_coefficients, CoefficientVector};
    use crate::poly::Polynomial;
    use crate::zeta::find_zeros;

    const LN2: f64 = std::f64::consts::LN_2;

    fn unit_params(t: f64) -> MeanValueParams {
        let one = CoefficientVector::unit("one");
        MeanValueParams::with_explicit_m(t, 0.1, 1, one.clone(), one, "m1").unwrap()
    }

    fn divisor_params(t: f64, m: u64) -> MeanValueParams {
        let c = divisor_coefficients(m, &Polynomial::constant(1.0)).unwrap();
        MeanValueParams::with_explicit_m(t, 0.2, m, c.clone(), c, "divisor").unwrap()
    }

    #[test]
    fn h_factor_matches_brute_double_loop() {
        let c = divisor_coefficients(8, &Polynomial::constant(1.0)).unwrap();
        for u in 1..=4u64 {
            for v in 1..=4u64 {
                let mut brute = 0.0;
                for g in 1..=8u64 {
                    if u * g <= 8 && v * g <= 8 {
                        brute += c.get(u * g) * c.get(v * g) / g as f64;
                    }
                }
                let got = h_factor(&c, &c, u, v);
                assert!((got - brute).abs() < 1e-14, "H(8;{u},{v})");
            }
        }
    }

    #[test]
    fn unit_case_reduces_to_closed_form() {
        let constants = MainTermConstants::laurent();
        let params = unit_params(800.0);
        let ell = params.log_t_2pi();
        let want_theorem1 =
            800.0 / TAU * constants.p2.eval(ell) - 800.0 / (2.0 * TAU) * constants.r2.eval(ell);
        let got = theorem1_main_term(&params, &constants).unwrap();
        assert!((got - want_theorem1).abs() < 1e-10, "{got} vs {want_theorem1}");
        let want_m0 = 800.0 / (2.0 * TAU) * constants.r2.eval(ell);
        let got = m0_main_term(&params, &constants).unwrap();
        assert!((got - want_m0).abs() < 1e-10);
    }

    #[test]
    fn zero_coefficients_give_zero_main_terms() {
        let constants = MainTermConstants::laurent();
        let zero = CoefficientVector::from_entries(4, "zero", []);
        let c = divisor_coefficients(4, &Polynomial::constant(1.0)).unwrap();
        let params =
            MeanValueParams::with_explicit_m(400.0, 0.2, 4, c, zero, "divisor").unwrap();
        assert_eq!(theorem1_main_term(&params, &constants).unwrap(), 0.0);
        assert_eq!(m0_main_term(&params, &constants).unwrap(), 0.0);
        assert_eq!(m0_direct(&params).unwrap().norm(), 0.0);
    }

    #[test]
    fn a_coefficient_values_from_divisor_sums() {
        let sieve = FactorSieve::new(64).unwrap();
        let unit = CoefficientVector::unit("one");
        let a = a_coefficients(1, 64, &unit, &sieve).unwrap();
        assert_eq!(a[1], 0.0);
        assert!((a[4] - LN2 * LN2).abs() < 1e-12, "a(4) = (log 2)^2");
        assert!((a[8] - 3.0 * LN2 * LN2).abs() < 1e-12, "a(8) = 3 (log 2)^2");
        assert!((a[6] - 2.0 * LN2 * 3f64.ln()).abs() < 1e-12);
        // x supported on 2 only: a(m) = (Lambda*log)(m/2) when 2 | m
        let e2 = CoefficientVector::indicator(2, 2, "e2");
        let a2 = a_coefficients(1, 64, &e2, &sieve).unwrap();
        assert_eq!(a2[6], 0.0, "(Lambda*log)(3) = 0");
        assert!((a2[12] - 2.0 * LN2 * 3f64.ln()).abs() < 1e-12, "(Lambda*log)(6)");
        // stride table: a(3 m) for m <= 4 matches the stride of the full table
        let a3 = a_coefficients(3, 4, &unit, &sieve).unwrap();
        for m in 1..=4usize {
            assert_eq!(a3[m], a[3 * m]);
        }
    }

    #[test]
    fn m0_direct_reduces_to_a_sum_at_unit_m() {
        let params = unit_params(600.0);
        let sieve = FactorSieve::new(96).unwrap();
        let n_max = (600.0 / TAU).floor() as u64;
        let a = a_coefficients(1, n_max, &params.x, &sieve).unwrap();
        let want: f64 = a[1..].iter().sum();
        let got = m0_direct(&params).unwrap();
        assert!((got.re - want).abs() < 1e-10 && got.im == 0.0);
    }

    #[test]
    fn m0_direct_approaches_main_term() {
        let constants = MainTermConstants::laurent();
        let params = divisor_params(2000.0, 6);
        let direct = m0_direct(&params).unwrap().re;
        let main = m0_main_term(&params, &constants).unwrap();
        let rel = (direct - main).abs() / main.abs();
        assert!(rel < 0.02, "rel = {rel:.3e} (direct {direct}, main {main})");
    }

    /// The full `c'` assembly must agree with the independent reduction of
    /// `sum_{m <= N} (Lambda*log)(m) mu(u/(m,u))/phi(u/(m,u))` to
    /// coprimality-restricted sums, whose main term is, with `w = log p`:
    ///
    /// * `u = p^k`: `(p/(p-1)) w (A - 1 + gamma0)`
    ///   `- w^2 (k - 1/2 + (k + 1/2)/(p-1) + 1/(p-1)^2)`;
    /// * `u = p^a q^b`: `-(p/(p-1)) (q/(q-1)) w_p w_q` (independent of `A`);
    /// * zero for units and three or more distinct primes.
    #[test]
    fn c_prime_matches_restricted_sum_closed_forms() {
        let c = MainTermConstants::laurent();
        let g0 = 0.577_215_664_901_532_9;
        for a in [3.0, 7.5] {
            for (p, k) in [(2u64, 1u32), (2, 3), (3, 1), (5, 2), (13, 1)] {
                let u = FactoredInteger::of(p.pow(k));
                let (pf, kf) = (p as f64, k as f64);
                let w = pf.ln();
                let want = (pf / (pf - 1.0)) * w * (a - 1.0 + g0)
                    - w * w
                        * (kf - 0.5
                            + (kf + 0.5) / (pf - 1.0)
                            + 1.0 / ((pf - 1.0) * (pf - 1.0)));
                let got = c_prime(&u, a, &c);
                assert!((got - want).abs() < 1e-12, "c'({u:?}, {a}) = {got} vs {want}");
            }
            for (n, p, q) in [(6u64, 2u64, 3u64), (12, 2, 3), (45, 3, 5)] {
                let (pf, qf) = (p as f64, q as f64);
                let want = -(pf / (pf - 1.0)) * (qf / (qf - 1.0)) * pf.ln() * qf.ln();
                let got = c_prime(&FactoredInteger::of(n), a, &c);
                assert!((got - want).abs() < 1e-12, "c'({n}, {a}) = {got} vs {want}");
            }
            assert_eq!(c_prime(&FactoredInteger::of(1), a, &c), 0.0);
            assert_eq!(c_prime(&FactoredInteger::of(30), a, &c), 0.0);
        }
    }

    #[test]
    fn m0_budget_is_enforced() {
        let c = divisor_coefficients(1000, &Polynomial::constant(1.0)).unwrap();
        let params = MeanValueParams::with_explicit_m(
            1_100_000.0,
            0.45,
            1000,
            c.clone(),
            c,
            "divisor",
        )
        .unwrap();
        assert!(matches!(
            m0_direct(&params),
            Err(MeanValueError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn discrete_sum_matches_derivative_oracle_over_first_five_zeros() {
        // zeta'(1/2 + i gamma_n) for n = 1..5 from an independent
        // high-precision oracle
        let oracle: [(f64, f64); 5] = [
            (0.783_296_511_867_031, 0.124_699_829_748_171_09),
            (1.109_295_563_462_671_6, -0.248_729_788_516_497_46),
            (1.295_795_605_008_835_2, 0.450_036_709_437_867_14),
            (1.120_130_845_244_493_4, -0.667_509_469_349_492_28),
            (1.160_570_067_493_562_6, 0.750_554_150_342_263_82),
        ];
        let want: Complex64 = oracle
            .iter()
            .map(|&(re, im)| Complex64::new(re, im))
            .sum();
        let cfg = PrecisionConfig::default();
        let zeros = find_zeros(34.0, &cfg).unwrap();
        assert_eq!(zeros.gammas.len(), 5);
        let got = discrete_sum(&unit_params(34.0), &zeros, &cfg).unwrap();
        assert!((got - want).norm() < 1e-6, "{got} vs {want}");
        // below the first ordinate the sum is empty
        let empty = discrete_sum(&unit_params(14.0), &zeros, &cfg).unwrap();
        assert_eq!(empty.norm(), 0.0);
        // scaling x scales the sum
        let scaled = MeanValueParams::with_explicit_m(
            34.0,
            0.1,
            1,
            CoefficientVector::unit("one").scaled(3.0),
            CoefficientVector::unit("one"),
            "m1",
        )
        .unwrap();
        let got3 = discrete_sum(&scaled, &zeros, &cfg).unwrap();
        assert!((got3 - 3.0 * got).norm() < 1e-9);
    }

    #[test]
    fn discrete_sum_requires_certification() {
        let cfg = PrecisionConfig::default();
        let mut zeros = find_zeros(34.0, &cfg).unwrap();
        assert!(discrete_sum(&unit_params(50.0), &zeros, &cfg).is_err());
        zeros.certified = false;
        assert!(discrete_sum(&unit_params(20.0), &zeros, &cfg).is_err());
    }

    #[test]
    fn contour_route_tracks_diagonal_main_term() {
        let cfg = PrecisionConfig::default();
        let constants = MainTermConstants::laurent();
        let params = unit_params(300.0);
        let sr = sr_quadrature(&params, &cfg).unwrap();
        let diag = 300.0 / TAU * constants.p2.eval(params.log_t_2pi());
        let rel = (sr.re - diag).abs() / diag.abs();
        assert!(rel < 0.1, "sr = {sr}, diagonal = {diag}, rel = {rel:.3e}");
    }

    #[test]
    fn end_to_end_report_shapes_and_metadata() {
        let cfg = PrecisionConfig::default();
        let constants = MainTermConstants::laurent();
        let zeros = find_zeros(60.0, &cfg).unwrap();
        let report =
            end_to_end_report(&[unit_params(50.0)], &constants, &zeros, &cfg, false).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert!(report.metadata.contains_key("constants"));
        assert!(report.metadata.contains_key("zero_cache"));
        assert!(report.metadata.contains_key("indexing_note"));
        let empty = end_to_end_report(&[], &constants, &zeros, &cfg, false).unwrap();
        assert!(empty.rows.is_empty());
    }
}
