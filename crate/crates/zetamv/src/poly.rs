//! Dense real polynomials in one variable.
//!
//! The main-term formulas are built out of low-degree polynomials in
//! `log(T/2pi)` whose coefficients come either from fixed integer patterns
//! ([`Polynomial::log_moment`]) or from fitted constants, so the type keeps
//! coefficients explicit and serializable rather than hiding them behind
//! closures.

use serde::{Deserialize, Serialize};

/// Polynomial with coefficients in ascending degree order:
/// `coeffs[k]` multiplies `x^k`. The zero polynomial is an empty vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Polynomial { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Polynomial::new(vec![c])
    }

    /// Coefficients in ascending degree order (empty for the zero polynomial).
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0f64;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// The degree-k polynomial `P_k(x) = sum_{i=0}^{k} (-1)^{k-i} k!/i! x^i`,
    /// which satisfies `integral_0^x e^{-u} u^k du`-style recurrences:
    /// `P_0 = 1`, `P_{k+1}(x) = x^{k+1} - (k+1) P_k(x)`. These are the exact
    /// weights of truncated log-moment sums `sum_{n <= N} log^k(N/n)` in the
    /// large-N limit.
    pub fn log_moment(k: u32) -> Polynomial {
        let mut coeffs = vec![0.0f64; k as usize + 1];
        // (-1)^{k-i} k!/i!
        let mut fact = 1.0f64; // k!/i! accumulated downward from i = k
        for i in (0..=k as usize).rev() {
            let sign = if (k as usize - i) % 2 == 0 { 1.0 } else { -1.0 };
            coeffs[i] = sign * fact;
            fact *= i as f64; // moving from i to i-1 multiplies by i
        }
        Polynomial::new(coeffs)
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(&c) if c == 0.0) {
            self.coeffs.pop();
        }
    }
}

impl std::ops::Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![0.0f64; n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, &c) in rhs.coeffs.iter().enumerate() {
            out[i] += c;
        }
        Polynomial::new(out)
    }
}

impl std::ops::Mul<f64> for &Polynomial {
    type Output = Polynomial;
    fn mul(self, s: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| c * s).collect())
    }
}
