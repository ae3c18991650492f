//! Dirichlet-polynomial coefficient families and their norms.
//!
//! Two families are provided: Moebius-smoothed divisor-case coefficients
//! `x_n = mu(n) P(log(M/n)/log M)` and multiplicative resonator coefficients
//! supported on squarefree products of primes from a window. Vectors are
//! semantically dense on `1..=M` (every entry defined, zeros allowed) but
//! stored sparsely, which is what lets a resonator with `M = 10^9` and a
//! four-point support exist without a four-gigabyte table.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use thiserror::Error;

use crate::arith::{self, ArithFn, FactoredInteger};
use crate::poly::Polynomial;

/// Cap on the support bound for densely constructed vectors.
pub const DENSE_M_CAP: u64 = 10_000_000;

#[derive(Debug, Error)]
pub enum CoeffsError {
    #[error("dense construction bound {requested} exceeds the cap of {cap}")]
    BudgetExceeded { requested: u64, cap: u64 },
    #[error("resonator requires M >= 3, got {0}")]
    ResonatorTooSmall(u64),
    #[error("coefficient file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Real coefficient vector `(c_n)` for `1 <= n <= M`. Entries absent from
/// the map are zero; entries above `M` are undefined and never exposed.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    m: u64,
    label: String,
    values: BTreeMap<u64, f64>,
}

impl CoefficientVector {
    /// Build from explicit nonzero entries. Entries above `M` or at `n = 0`
    /// are rejected by panic (caller bug); exact zeros are dropped.
    pub fn from_entries(
        m: u64,
        label: impl Into<String>,
        entries: impl IntoIterator<Item = (u64, f64)>,
    ) -> Self {
        assert!(m >= 1, "support bound must be at least 1");
        let mut values = BTreeMap::new();
        for (n, v) in entries {
            assert!(n >= 1 && n <= m, "entry index {n} outside 1..={m}");
            if v != 0.0 {
                values.insert(n, v);
            }
        }
        CoefficientVector {
            m,
            label: label.into(),
            values,
        }
    }

    /// Dense construction: `c_n = f(n)` for every `n <= M`.
    pub fn from_fn(
        m: u64,
        label: impl Into<String>,
        mut f: impl FnMut(u64) -> f64,
    ) -> Result<Self, CoeffsError> {
        if m > DENSE_M_CAP {
            return Err(CoeffsError::BudgetExceeded {
                requested: m,
                cap: DENSE_M_CAP,
            });
        }
        Ok(CoefficientVector::from_entries(
            m,
            label,
            (1..=m).map(|n| (n, f(n))),
        ))
    }

    /// Indicator of a single index `u0 <= M`.
    pub fn indicator(u0: u64, m: u64, label: impl Into<String>) -> Self {
        CoefficientVector::from_entries(m, label, [(u0, 1.0)])
    }

    /// Indicator of `n = 1` (the length-1 Dirichlet polynomial `X(s) = 1`).
    pub fn unit(label: impl Into<String>) -> Self {
        CoefficientVector::indicator(1, 1, label)
    }

    pub fn support_bound(&self) -> u64 {
        self.m
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `c_n`, zero when the entry is not stored. Panics above the support
    /// bound: those entries are undefined, and reading one is a caller bug.
    pub fn get(&self, n: u64) -> f64 {
        assert!(
            n >= 1 && n <= self.m,
            "coefficient index {n} outside 1..={}",
            self.m
        );
        self.values.get(&n).copied().unwrap_or(0.0)
    }

    /// Nonzero entries in increasing index order.
    pub fn iter_nonzero(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.values.iter().map(|(&n, &v)| (n, v))
    }

    pub fn nonzero_count(&self) -> usize {
        self.values.len()
    }

    /// Pointwise scaling, keeping the support bound and noting the factor in
    /// the label.
    pub fn scaled(&self, s: f64) -> CoefficientVector {
        CoefficientVector::from_entries(
            self.m,
            format!("{}*{s}", self.label),
            self.values.iter().map(|(&n, &v)| (n, v * s)),
        )
    }

    /// Entry-wise linear combination `a*self + b*other`; support bound is the
    /// larger of the two (absent entries read as zero).
    pub fn linear_combination(&self, a: f64, other: &CoefficientVector, b: f64) -> CoefficientVector {
        let m = self.m.max(other.m);
        let mut values: BTreeMap<u64, f64> = BTreeMap::new();
        for (&n, &v) in &self.values {
            *values.entry(n).or_insert(0.0) += a * v;
        }
        for (&n, &v) in &other.values {
            *values.entry(n).or_insert(0.0) += b * v;
        }
        CoefficientVector::from_entries(
            m,
            format!("{}+{}", self.label, other.label),
            values,
        )
    }

    /// Evaluate the Dirichlet polynomial `sum_n c_n n^{-s}` at `s`.
    pub fn dirichlet_eval(&self, s: num_complex::Complex64) -> num_complex::Complex64 {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for (&n, &v) in &self.values {
            // n^{-s} = exp(-s log n)
            acc += v * (-s * (n as f64).ln()).exp();
        }
        acc
    }

    /// Serialize as `# coeffs label=<label> M=<M>` followed by one
    /// `n value` line per stored nonzero entry, ascending in `n`. Values use
    /// the shortest decimal form that round-trips exactly.
    pub fn write_text(&self, w: &mut impl Write) -> Result<(), CoeffsError> {
        writeln!(w, "# coeffs label={} M={}", self.label, self.m)?;
        for (&n, &v) in &self.values {
            writeln!(w, "{n} {v}")?;
        }
        Ok(())
    }

    /// Parse the [`write_text`](Self::write_text) format.
    pub fn read_text(r: &mut impl BufRead) -> Result<Self, CoeffsError> {
        let mut header = String::new();
        r.read_line(&mut header)?;
        let header = header.trim_end();
        let rest = header.strip_prefix("# coeffs label=").ok_or(CoeffsError::Parse {
            line: 1,
            message: format!("bad header: {header:?}"),
        })?;
        let (label, m_part) = rest.rsplit_once(" M=").ok_or(CoeffsError::Parse {
            line: 1,
            message: "header missing M=".into(),
        })?;
        let m: u64 = m_part.parse().map_err(|e| CoeffsError::Parse {
            line: 1,
            message: format!("bad M: {e}"),
        })?;
        let mut entries = Vec::new();
        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (n_str, v_str) = line.split_once(' ').ok_or(CoeffsError::Parse {
                line: idx + 2,
                message: format!("expected 'n value', got {line:?}"),
            })?;
            let n: u64 = n_str.parse().map_err(|e| CoeffsError::Parse {
                line: idx + 2,
                message: format!("bad index: {e}"),
            })?;
            let v: f64 = v_str.parse().map_err(|e| CoeffsError::Parse {
                line: idx + 2,
                message: format!("bad value: {e}"),
            })?;
            entries.push((n, v));
        }
        Ok(CoefficientVector::from_entries(m, label, entries))
    }
}

/// Parameters of the multiplicative resonator family.
#[derive(Debug, Clone)]
pub struct ResonatorParams {
    pub m: u64,
    pub l: f64,
    pub support_lo: f64,
    pub support_hi: f64,
    /// Replaces the computed `[support_lo, support_hi]` prime window when
    /// present; reports must say which window was used.
    pub override_interval: Option<(f64, f64)>,
}

impl ResonatorParams {
    /// `L = sqrt(log M * log log M)`; requires `M >= 3` so `log log M > 0`.
    pub fn new(m: u64) -> Result<Self, CoeffsError> {
        if m < 3 {
            return Err(CoeffsError::ResonatorTooSmall(m));
        }
        let log_m = (m as f64).ln();
        let l = (log_m * log_m.ln()).sqrt();
        Ok(ResonatorParams {
            m,
            l,
            support_lo: l * l,
            support_hi: l.ln().powi(2).exp(),
            override_interval: None,
        })
    }

    pub fn with_override(mut self, lo: f64, hi: f64) -> Self {
        self.override_interval = Some((lo, hi));
        self
    }

    /// The prime window actually in force.
    pub fn window(&self) -> (f64, f64) {
        self.override_interval
            .unwrap_or((self.support_lo, self.support_hi))
    }
}

/// Build the resonator vector: multiplicative, squarefree-supported, with
/// `f(p) = L / log p` on window primes and `f(1) = 1`. An empty window (the
/// generic desk-scale situation without an override) gives the indicator of 1.
pub fn resonator(params: &ResonatorParams) -> CoefficientVector {
    let (lo, hi) = params.window();
    let label = match params.override_interval {
        Some((a, b)) => format!("resonator M={} window=[{a},{b}] (override)", params.m),
        None => format!("resonator M={}", params.m),
    };
    let mut primes = Vec::new();
    if hi >= lo && hi >= 2.0 {
        let lo_n = (lo.ceil().max(2.0)) as u64;
        let hi_n = hi.floor() as u64;
        for p in lo_n..=hi_n {
            if FactoredInteger::of(p).prime_power() == Some((p, 1)) {
                primes.push(p);
            }
        }
    }
    // all squarefree products of window primes that stay <= M
    let mut entries: Vec<(u64, f64)> = vec![(1, 1.0)];
    for &p in &primes {
        let fp = params.l / (p as f64).ln();
        let current = entries.clone();
        for (n, v) in current {
            if let Some(np) = n.checked_mul(p) {
                if np <= params.m {
                    entries.push((np, v * fp));
                }
            }
        }
    }
    CoefficientVector::from_entries(params.m, label, entries)
}

/// Moebius-smoothed divisor-case coefficients
/// `x_n = mu(n) * P(log(M/n) / log M)` for `n <= M`.
pub fn divisor_coefficients(m: u64, p: &Polynomial) -> Result<CoefficientVector, CoeffsError> {
    if m > DENSE_M_CAP {
        return Err(CoeffsError::BudgetExceeded {
            requested: m,
            cap: DENSE_M_CAP,
        });
    }
    assert!(m >= 2, "divisor coefficients need M >= 2");
    let log_m = (m as f64).ln();
    let label = format!("divisor M={m} P={:?}", p.coeffs());
    let entries = (1..=m).filter_map(|n| {
        let mu = arith::mobius(&FactoredInteger::of(n));
        if mu == 0 {
            return None;
        }
        let u = ((m as f64 / n as f64).ln() / log_m).max(0.0);
        Some((n, f64::from(mu) * p.eval(u)))
    });
    Ok(CoefficientVector::from_entries(m, label, entries))
}

/// The norm bundle used by the error-term bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    /// `max_n |c_n|`
    pub sup: f64,
    /// `sum_n |c_n|`
    pub l1: f64,
    /// `sum_n |c_n| / n`
    pub l1_over_n: f64,
    /// `sum_n c_n^2 / n`
    pub l2_over_n: f64,
}

pub fn norms(c: &CoefficientVector) -> Norms {
    let mut sup = 0.0f64;
    let mut l1 = 0.0f64;
    let mut l1_over_n = 0.0f64;
    let mut l2_over_n = 0.0f64;
    for (n, v) in c.iter_nonzero() {
        let a = v.abs();
        sup = sup.max(a);
        l1 += a;
        l1_over_n += a / n as f64;
        l2_over_n += v * v / n as f64;
    }
    Norms {
        sup,
        l1,
        l1_over_n,
        l2_over_n,
    }
}

/// `sum_{n <= M} weight(n) * (tau_r * c)(n) * c_n / n`.
///
/// Only support points of `c` contribute (the outer factor `c_n` vanishes
/// elsewhere), so the convolution is evaluated by divisor enumeration at each
/// stored entry; this works unchanged for sparse resonators with huge `M`.
pub fn convolved_norm(c: &CoefficientVector, r: u32, weight: &ArithFn) -> f64 {
    let mut acc = 0.0f64;
    for (n, cn) in c.iter_nonzero() {
        let fct = FactoredInteger::of(n);
        let mut conv = 0.0f64;
        for d in fct.divisors() {
            let q = n / d;
            let cq = c.get(q);
            if cq != 0.0 {
                conv += arith::tau_r(&FactoredInteger::of(d), r) as f64 * cq;
            }
        }
        acc += weight.eval(&fct) * conv * cn / n as f64;
    }
    acc
}

/// Dense 1-indexed table of the first `n_max` coefficients (zeros included),
/// for convolution-table pipelines. `n_max` may exceed the support bound; the
/// excess is zero-filled so callers can convolve past M safely.
pub fn dense_table(c: &CoefficientVector, n_max: u64) -> Vec<f64> {
    let mut tab = vec![0.0f64; n_max as usize + 1];
    for (n, v) in c.iter_nonzero() {
        if n <= n_max {
            tab[n as usize] = v;
        }
    }
    tab
}
