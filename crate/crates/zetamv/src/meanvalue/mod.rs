//! Discrete mean values of zeta' over nontrivial zeros and their explicit
//! main-term formulas.
//!
//! The core objects are a direct sum over zero ordinates, a contour-integral
//! route, and a residue-derived main term depending on a small ledger of
//! constants and monic polynomials. The module evaluates all routes
//! independently so their agreement is evidence rather than tautology.

mod calibrate;
mod checks;
mod terms;

pub use calibrate::{
    derive_constants_calibrated, synthetic_round_trip, CalibrationBudget, CalibrationOutcome,
    FitStage,
};
pub use checks::{gonek_check_battery, gonek_integral_check, jk_check, shu_sum_check, GonekCheck, JkCheck};
pub use terms::{
    a_coefficients, discrete_sum, end_to_end_report, m0_direct, m0_main_term, sr_quadrature,
    theorem1_main_term,
};

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::ArithError;
use crate::coeffs::{CoeffsError, CoefficientVector};
use crate::poly::Polynomial;
use crate::quad::QuadError;
use crate::zeta::ZetaError;

/// Euler–Mascheroni constant, from an independent high-precision evaluation.
pub const GAMMA0: f64 = 0.577_215_664_901_532_9;
/// Second constant of the Laurent expansion of zeta at 1 (coefficient of
/// -(z-1)), from an independent high-precision evaluation.
pub const GAMMA1: f64 = -0.072_815_845_483_676_72;

/// Floor used in relative-error denominators.
pub const REL_ERROR_FLOOR: f64 = 1e-30;

#[derive(Debug, Error)]
pub enum MeanValueError {
    #[error("theta must lie in (0, 1/2), got {0}")]
    InvalidTheta(f64),
    #[error("coefficient vector length {got} does not match M = {expected}")]
    CoefficientLengthMismatch { expected: u64, got: u64 },
    #[error("brute-force budget exceeded: {terms:.3e} terms > cap {cap:.3e}")]
    BudgetExceeded { terms: f64, cap: f64 },
    #[error("zero list is not certified up to T = {t}")]
    UncertifiedZeros { t: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("least-squares fit is ill-conditioned (condition number {condition_number:.3e})")]
    IllConditionedFit { condition_number: f64 },
    #[error("constants file does not parse: {0}")]
    ConstantsFormat(String),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Coeffs(#[from] CoeffsError),
}

/// The constants and monic polynomials entering every main-term formula.
///
/// `a1`, `a2` are the first two non-leading Laurent coefficients of
/// `zeta'(z)^2 / zeta(z)` at `z = 1`; `c0`, `c1` enter the restricted
/// prime-sum main term; `d` is the constant inside the two-variable
/// coefficient `alpha2`. The polynomials are monic of degrees 1, 2, 1, 1, 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MainTermConstants {
    pub a1: f64,
    pub a2: f64,
    pub c0: f64,
    pub c1: f64,
    pub d: f64,
    pub p1: Polynomial,
    pub p2: Polynomial,
    pub r1_poly: Polynomial,
    pub r1_tilde: Polynomial,
    pub r2: Polynomial,
}

impl MainTermConstants {
    /// Closed-form derivation: `P_k` by repeated integration by parts of
    /// `log^k`, `a1`/`a2` from the Stieltjes constants via the Laurent
    /// expansion `zeta(z) = 1/(z-1) + gamma0 - gamma1 (z-1) + ...`,
    /// and the residue bookkeeping
    /// `C0 = a1 - 1`, `C1 = a1`, `D = -C1 = gamma0`,
    /// `R1(x) = x - (2 + C0)`, `R~1(x) = x - 1`,
    /// `R2(x) = x^2 + 2 C0 x + 2(a2 - C0)`.
    ///
    /// `D = -C1` is pinned by the exact coprimality-restricted-sum route
    /// described at [`crate::arith::alpha2`]: the `alpha_1(u)` coefficient in
    /// the single-pair constant `c'(u, A_v)` works out to `A_v - 1 - C1`.
    pub fn laurent() -> Self {
        let a1 = -GAMMA0;
        let a2 = GAMMA0 * GAMMA0 + 3.0 * GAMMA1;
        let c0 = a1 - 1.0;
        let c1 = a1;
        let d = -c1;
        MainTermConstants {
            a1,
            a2,
            c0,
            c1,
            d,
            p1: Polynomial::log_moment(1),
            p2: Polynomial::log_moment(2),
            r1_poly: Polynomial::new(vec![-(2.0 + c0), 1.0]),
            r1_tilde: Polynomial::new(vec![-1.0, 1.0]),
            r2: Polynomial::new(vec![2.0 * (a2 - c0), 2.0 * c0, 1.0]),
        }
    }

    /// Checks the monic-degree contract: degrees (1, 2, 1, 1, 2), leading
    /// coefficients exactly 1.
    pub fn validate(&self) -> Result<(), MeanValueError> {
        let spec: [(&str, &Polynomial, usize); 5] = [
            ("p1", &self.p1, 1),
            ("p2", &self.p2, 2),
            ("r1_poly", &self.r1_poly, 1),
            ("r1_tilde", &self.r1_tilde, 1),
            ("r2", &self.r2, 2),
        ];
        for (name, poly, deg) in spec {
            if poly.degree() != Some(deg) {
                return Err(MeanValueError::ConstantsFormat(format!(
                    "{name} must have degree {deg}"
                )));
            }
            if poly.coeffs()[deg] != 1.0 {
                return Err(MeanValueError::ConstantsFormat(format!(
                    "{name} must be monic"
                )));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("constants serialize");
        s.push('\n');
        s
    }

    pub fn from_text(text: &str) -> Result<Self, MeanValueError> {
        let parsed: MainTermConstants = serde_json::from_str(text)
            .map_err(|e| MeanValueError::ConstantsFormat(e.to_string()))?;
        parsed.validate()?;
        Ok(parsed)
    }
}

/// One experiment point: endpoint, polynomial length, and the two
/// coefficient vectors.
#[derive(Debug, Clone)]
pub struct MeanValueParams {
    pub t: f64,
    pub theta: f64,
    pub m: u64,
    pub x: CoefficientVector,
    pub y: CoefficientVector,
    pub case_label: String,
}

impl MeanValueParams {
    /// Standard construction with `M = floor(T^theta)`, `theta` in (0, 1/2).
    pub fn new(
        t: f64,
        theta: f64,
        x: CoefficientVector,
        y: CoefficientVector,
        case_label: &str,
    ) -> Result<Self, MeanValueError> {
        if !(theta > 0.0 && theta < 0.5) {
            return Err(MeanValueError::InvalidTheta(theta));
        }
        let m = t.powf(theta).floor() as u64;
        Self::with_explicit_m(t, theta, m, x, y, case_label)
    }

    /// Construction with an explicit `M <= sqrt(T)` (used by fixed-M sweeps
    /// and the M = 1 special case).
    pub fn with_explicit_m(
        t: f64,
        theta: f64,
        m: u64,
        x: CoefficientVector,
        y: CoefficientVector,
        case_label: &str,
    ) -> Result<Self, MeanValueError> {
        assert!(t > 1.0, "endpoint must exceed 1");
        if (m as f64) > t.sqrt() {
            return Err(MeanValueError::Precondition(format!(
                "M = {m} exceeds sqrt(T) = {:.3}",
                t.sqrt()
            )));
        }
        for (name, c) in [("x", &x), ("y", &y)] {
            if c.support_bound() != m {
                let _ = name;
                return Err(MeanValueError::CoefficientLengthMismatch {
                    expected: m,
                    got: c.support_bound(),
                });
            }
        }
        Ok(MeanValueParams {
            t,
            theta,
            m,
            x,
            y,
            case_label: case_label.to_string(),
        })
    }

    /// `log(T / 2 pi)`, the argument every main-term polynomial is
    /// evaluated at.
    pub fn log_t_2pi(&self) -> f64 {
        (self.t / std::f64::consts::TAU).ln()
    }
}

/// One comparison row: a (generally complex) directly computed value against
/// a real main-term value. The error convention targets the real part:
/// `abs_error = |Re(direct) - main|`, `rel_error = abs_error / max(|main|,
/// 1e-30)`; the imaginary part stays visible in `direct_im` as a diagnostic.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub label: String,
    pub direct_re: f64,
    pub direct_im: f64,
    pub main_term: f64,
    pub abs_error: f64,
    pub rel_error: f64,
}

/// Sweep results plus run metadata, serializable as lossless JSON text and
/// as an aligned human-readable table.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub rows: Vec<SweepRow>,
    pub metadata: BTreeMap<String, String>,
}

impl ComparisonReport {
    pub fn push_row(&mut self, label: String, direct: Complex64, main_term: f64) {
        let abs_error = (direct.re - main_term).abs();
        self.rows.push(SweepRow {
            label,
            direct_re: direct.re,
            direct_im: direct.im,
            main_term,
            abs_error,
            rel_error: abs_error / main_term.abs().max(REL_ERROR_FLOOR),
        });
    }

    pub fn set_meta(&mut self, key: &str, value: impl Into<String>) {
        self.metadata.insert(key.to_string(), value.into());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, MeanValueError> {
        serde_json::from_str(text).map_err(|e| MeanValueError::ConstantsFormat(e.to_string()))
    }

    /// Aligned-column text table with metadata footer.
    pub fn to_table(&self) -> String {
        let label_w = self
            .rows
            .iter()
            .map(|r| r.label.len())
            .chain(std::iter::once("label".len()))
            .max()
            .unwrap_or(5);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<label_w$}  {:>23}  {:>23}  {:>23}  {:>12}  {:>12}",
            "label", "direct_re", "direct_im", "main_term", "abs_error", "rel_error"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<label_w$}  {:>23.16e}  {:>23.16e}  {:>23.16e}  {:>12.5e}  {:>12.5e}",
                r.label, r.direct_re, r.direct_im, r.main_term, r.abs_error, r.rel_error
            );
        }
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}: {v}");
        }
        out
    }
}
