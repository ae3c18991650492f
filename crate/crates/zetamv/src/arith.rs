//! Multiplicative number theory primitives.
//!
//! Everything downstream (coefficient vectors, the direct double sums, the
//! main-term formulas) consumes the functions in this module, so the contract
//! is strict: closed forms are exact in the factorization, support claims are
//! enforced before a closure ever runs, and the divisor-sum identities can be
//! re-verified wholesale with [`conv_decompose_check`].

use std::sync::Arc;

use thiserror::Error;

/// Hard cap on dense table sizes (convolution tables, sieve bounds).
pub const TABLE_CAP: u64 = 100_000_000;

#[derive(Debug, Error)]
pub enum ArithError {
    #[error("table bound {requested} exceeds the cap of {cap}")]
    BudgetExceeded { requested: u64, cap: u64 },
}

/// A positive integer together with its prime factorization, sorted by prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInteger {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    /// Factor `n` by trial division. Fine for isolated values; use
    /// [`FactorSieve::factor`] when factoring a whole range.
    ///
    /// Panics if `n == 0`.
    pub fn of(n: u64) -> Self {
        assert!(n >= 1, "FactoredInteger requires n >= 1");
        let mut m = n;
        let mut factors = Vec::new();
        let mut d: u64 = 2;
        while d * d <= m {
            if m % d == 0 {
                let mut e = 0;
                while m % d == 0 {
                    m /= d;
                    e += 1;
                }
                factors.push((d, e));
            }
            d += if d == 2 { 1 } else { 2 };
        }
        if m > 1 {
            factors.push((m, 1));
        }
        FactoredInteger { value: n, factors }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// Prime factorization as `(p, e)` pairs in increasing `p`.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// `Some((p, e))` when the value is a prime power `p^e` with `e >= 1`.
    pub fn prime_power(&self) -> Option<(u64, u32)> {
        if self.factors.len() == 1 {
            Some(self.factors[0])
        } else {
            None
        }
    }

    /// All divisors, sorted ascending. Intended for small values; the output
    /// length is the divisor count.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let prev = divs.clone();
            let mut pe = 1u64;
            for _ in 0..e {
                pe *= p;
                divs.extend(prev.iter().map(|d| d * pe));
            }
        }
        divs.sort_unstable();
        divs
    }

    /// Squarefree divisors with their Moebius values, ascending.
    pub fn squarefree_divisors(&self) -> Vec<(u64, i32)> {
        let mut divs = vec![(1u64, 1i32)];
        for &(p, _) in &self.factors {
            let prev = divs.clone();
            divs.extend(prev.iter().map(|&(d, m)| (d * p, -m)));
        }
        divs.sort_unstable();
        divs
    }
}

/// Smallest-prime-factor sieve for bulk factorization.
pub struct FactorSieve {
    spf: Vec<u32>,
}

impl FactorSieve {
    /// Build the sieve up to `bound` (inclusive). Memory is 4 bytes per
    /// integer, so the [`TABLE_CAP`] guard keeps this under ~400 MB.
    pub fn new(bound: u64) -> Result<Self, ArithError> {
        if bound > TABLE_CAP {
            return Err(ArithError::BudgetExceeded {
                requested: bound,
                cap: TABLE_CAP,
            });
        }
        let n = bound.max(1) as usize;
        let mut spf = vec![0u32; n + 1];
        let mut i = 2usize;
        while i * i <= n {
            if spf[i] == 0 {
                let mut j = i * i;
                while j <= n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
            i += 1;
        }
        Ok(FactorSieve { spf })
    }

    pub fn bound(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    /// Factor `n`, using the sieve when `n` is within bounds and falling back
    /// to trial division otherwise. Panics if `n == 0`.
    pub fn factor(&self, n: u64) -> FactoredInteger {
        assert!(n >= 1, "FactorSieve::factor requires n >= 1");
        if n > self.bound() {
            return FactoredInteger::of(n);
        }
        let mut m = n as usize;
        let mut factors = Vec::new();
        while m > 1 {
            let p = if self.spf[m] == 0 { m } else { self.spf[m] as usize };
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p as u64, e));
        }
        factors.sort_unstable_by_key(|&(p, _)| p);
        FactoredInteger { value: n, factors }
    }
}

/// Moebius function: `(-1)^omega(n)` on squarefree `n`, zero otherwise.
pub fn mobius(n: &FactoredInteger) -> i32 {
    let mut m = 1i32;
    for &(_, e) in n.factors() {
        if e > 1 {
            return 0;
        }
        m = -m;
    }
    m
}

/// Von Mangoldt function: `log p` on prime powers `p^e`, zero otherwise.
pub fn von_mangoldt(n: &FactoredInteger) -> f64 {
    match n.prime_power() {
        Some((p, _)) => (p as f64).ln(),
        None => 0.0,
    }
}

/// Euler totient.
pub fn euler_phi(n: &FactoredInteger) -> u64 {
    let mut phi = 1u64;
    for &(p, e) in n.factors() {
        phi *= (p - 1) * p.pow(e - 1);
    }
    phi
}

/// Generalized von Mangoldt function `Lambda_k = mu * log^k` (Dirichlet
/// convolution). Vanishes whenever `n` has more than `k` distinct prime
/// factors; the sum below only visits squarefree divisors, so the evaluation
/// is exact and O(2^omega).
pub fn lambda_k(n: &FactoredInteger, k: u32) -> f64 {
    if n.omega() > k as usize {
        return 0.0;
    }
    if n.value() == 1 {
        // mu * log^k at 1 is log^k(1) = 0 for k >= 1, and 1 for k = 0.
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let ln_n = (n.value() as f64).ln();
    let mut acc = 0.0f64;
    for (d, mu) in n.squarefree_divisors() {
        let ln_q = ln_n - (d as f64).ln();
        acc += f64::from(mu) * ln_q.powi(k as i32);
    }
    acc
}

/// `(Lambda * log)(n)`, the convolution of the von Mangoldt function with the
/// natural logarithm. Expanding the divisor sum over prime powers gives the
/// closed form `log^2 n - sum_p e_p (e_p + 1)/2 * log^2 p`.
pub fn von_mangoldt_log_conv(n: &FactoredInteger) -> f64 {
    if n.value() == 1 {
        return 0.0;
    }
    let ln_n = (n.value() as f64).ln();
    let mut acc = ln_n * ln_n;
    for &(p, e) in n.factors() {
        let lp = (p as f64).ln();
        acc -= (e as f64) * (e as f64 + 1.0) / 2.0 * lp * lp;
    }
    acc
}

/// r-fold divisor function `tau_r`, multiplicative with
/// `tau_r(p^e) = C(e + r - 1, r - 1)`; `tau_2` is the divisor count.
pub fn tau_r(n: &FactoredInteger, r: u32) -> u64 {
    assert!(r >= 1, "tau_r requires r >= 1");
    let mut acc: u64 = 1;
    for &(_, e) in n.factors() {
        // C(e + r - 1, e) built by exact integer steps: the running product
        // after i steps is C(r - 1 + i, i), always divisible by i.
        let mut c: u128 = 1;
        for i in 1..=e as u128 {
            c = c * (r as u128 - 1 + i) / i;
        }
        acc *= u64::try_from(c).expect("tau_r overflow");
    }
    acc
}

/// `eta1(k) = sum_{p | k} log p / (p - 1)`.
pub fn eta1(k: &FactoredInteger) -> f64 {
    k.factors()
        .iter()
        .map(|&(p, _)| (p as f64).ln() / (p as f64 - 1.0))
        .sum()
}

/// `eta2(k) = -sum_{p | k} p log p / (p - 1)^2`.
pub fn eta2(k: &FactoredInteger) -> f64 {
    -k.factors()
        .iter()
        .map(|&(p, _)| {
            let pf = p as f64;
            pf * pf.ln() / ((pf - 1.0) * (pf - 1.0))
        })
        .sum::<f64>()
}

/// Second-order constant produced by the coprimality restriction `(u,k)=1`
/// in residue main terms:
/// `-eta1(k)^2/2 + (3/2) sum_{p|k} p log^2 p / (p-1)^2`.
///
/// Writing `F(z) = prod_{p|k}(1 - p^{-z})`, one has
/// `F'/F(1) = eta1(k)` and `(F'/F)'(1) = -sum_{p|k} p log^2 p/(p-1)^2`;
/// this function is the combination of those two Taylor coefficients that
/// enters the constant term when the triple pole of `zeta'^2/zeta * F` at 1
/// is expanded against `x^z/z`. Brute-force partial sums of restricted
/// `Lambda*log` confirm it to the accuracy of the sums themselves, whereas
/// `eta2` in place of this combination leaves k-dependent constant offsets.
pub fn eta_second_order(k: &FactoredInteger) -> f64 {
    let e1 = eta1(k);
    let tail: f64 = k
        .factors()
        .iter()
        .map(|&(p, _)| {
            let pf = p as f64;
            let lp = pf.ln();
            pf * lp * lp / ((pf - 1.0) * (pf - 1.0))
        })
        .sum();
    -0.5 * e1 * e1 + 1.5 * tail
}

/// `g(h, k) = sum over prime-power divisors p^t of h with p coprime to k of
/// Lambda(p^t) * log p / (p - 1)`. Each prime `p | h` with `p` not dividing
/// `k` contributes `e_p * log^2 p / (p - 1)`.
pub fn g_hk(h: &FactoredInteger, k: &FactoredInteger) -> f64 {
    let mut acc = 0.0f64;
    for &(p, e) in h.factors() {
        if k.value() % p == 0 {
            continue;
        }
        let lp = (p as f64).ln();
        acc += (e as f64) * lp * lp / (p as f64 - 1.0);
    }
    acc
}

/// Closed-form evaluation of the four Moebius-weighted divisor sums
/// `phi_1..phi_4` built from `eta1`, `eta2` and `g`:
///
/// * `phi_1(n) = sum_{k|n} mu(k) eta1(k)`, equal to `-log p/(p-1)` on prime
///   powers and zero elsewhere;
/// * `phi_2(n) = sum_{k|n} mu(k) eta2(k)`, equal to `p log p/(p-1)^2` on
///   prime powers;
/// * `phi_3(n) = sum_{hk=n} mu(k) g(h,k)`, equal to `log(p^a) log p/(p-1)` on
///   prime powers;
/// * `phi_4(n) = sum_{k|n} mu(k) eta1(k) log k`, equal to `-log^2 p/(p-1)` on
///   prime powers and `log p log q (1/(p-1) + 1/(q-1))` on `p^a q^b`.
///
/// All four vanish on inputs with more distinct prime factors than listed.
/// Panics unless `1 <= j <= 4`.
pub fn phi_j(n: &FactoredInteger, j: u8) -> f64 {
    match (j, n.factors()) {
        (1, [(p, _)]) => {
            let pf = *p as f64;
            -pf.ln() / (pf - 1.0)
        }
        (2, [(p, _)]) => {
            let pf = *p as f64;
            pf * pf.ln() / ((pf - 1.0) * (pf - 1.0))
        }
        (3, [(p, e)]) => {
            let pf = *p as f64;
            (*e as f64) * pf.ln() * pf.ln() / (pf - 1.0)
        }
        (4, [(p, _)]) => {
            let pf = *p as f64;
            -pf.ln() * pf.ln() / (pf - 1.0)
        }
        (4, [(p, _), (q, _)]) => {
            let (pf, qf) = (*p as f64, *q as f64);
            pf.ln() * qf.ln() * (1.0 / (pf - 1.0) + 1.0 / (qf - 1.0))
        }
        (1..=4, _) => 0.0,
        _ => panic!("phi_j index must be 1..=4, got {j}"),
    }
}

/// Definitional evaluation of `phi_j` as literal divisor sums (see
/// [`phi_j`] for the sums). Quadratic in the divisor count; used to
/// cross-check the closed forms.
pub fn phi_j_definitional(n: &FactoredInteger, j: u8) -> f64 {
    assert!((1..=4).contains(&j), "phi_j index must be 1..=4, got {j}");
    let mut acc = 0.0f64;
    if j == 3 {
        for (k, mu) in n.squarefree_divisors() {
            let h = FactoredInteger::of(n.value() / k);
            let kf = FactoredInteger::of(k);
            acc += f64::from(mu) * g_hk(&h, &kf);
        }
        return acc;
    }
    for (k, mu) in n.squarefree_divisors() {
        let kf = FactoredInteger::of(k);
        let w = match j {
            1 => eta1(&kf),
            2 => eta2(&kf),
            4 => eta1(&kf) * (k as f64).ln(),
            _ => unreachable!(),
        };
        acc += f64::from(mu) * w;
    }
    acc
}

/// `alpha_1`: `log p / (p - 1)` on prime powers (independent of the
/// exponent), zero elsewhere. Equal to `-phi_1`.
pub fn alpha1(n: &FactoredInteger) -> f64 {
    match n.prime_power() {
        Some((p, _)) => {
            let pf = p as f64;
            pf.ln() / (pf - 1.0)
        }
        None => 0.0,
    }
}

/// `alpha_2` with free additive constant `d` on the prime-power part:
///
/// * `alpha_2(p^a) = -(a + 1/2) log^2 p/(p-1) + d log p/(p-1) - log^2 p/(p-1)^2`;
/// * `alpha_2(p^a q^b) = -log p log q (1/(p-1) + 1/(q-1) + 1/((p-1)(q-1)))`;
/// * zero on 1 and on inputs with three or more distinct primes.
///
/// These constants are pinned by an exact reduction of the weighted sums
/// `sum_{m <= N} (Lambda * log)(m) mu(u/(m,u))/phi(u/(m,u))` to
/// coprimality-restricted sums with known expansions: every piece of
/// `-1/2 Lambda_2(u) + R_1(A) Lambda(u) + ~R_1(A) alpha_1(u) + alpha_2(u; d)`
/// then matches term by term with `d = gamma_0`. Brute-force sums up to
/// `N = 4e6` confirm each branch (prime powers, two-prime composites, and
/// the vanishing three-prime case) to a few parts in 1e4.
pub fn alpha2(n: &FactoredInteger, d: f64) -> f64 {
    match n.factors() {
        [(p, a)] => {
            let pf = *p as f64;
            let lp = pf.ln();
            -((*a as f64) + 0.5) * lp * lp / (pf - 1.0) + d * lp / (pf - 1.0)
                - lp * lp / ((pf - 1.0) * (pf - 1.0))
        }
        [(p, _), (q, _)] => {
            let (pf, qf) = (*p as f64, *q as f64);
            -pf.ln() * qf.ln()
                * (1.0 / (pf - 1.0) + 1.0 / (qf - 1.0) + 1.0 / ((pf - 1.0) * (qf - 1.0)))
        }
        _ => 0.0,
    }
}

/// Multiplicative majorant weight `prod_{p | n} (1 + 10 p^{-1/2})`.
pub fn j_weight(n: &FactoredInteger) -> f64 {
    n.factors()
        .iter()
        .map(|&(p, _)| 1.0 + 10.0 / (p as f64).sqrt())
        .product()
}

/// Where an arithmetic function may be nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    All,
    /// Only n = 1.
    One,
    /// Prime powers p^e, e >= 1.
    PrimePowers,
    Squarefree,
    /// At most this many distinct prime factors (1 included).
    OmegaAtMost(u8),
}

impl Support {
    pub fn contains(&self, n: &FactoredInteger) -> bool {
        match *self {
            Support::All => true,
            Support::One => n.value() == 1,
            Support::PrimePowers => n.prime_power().is_some(),
            Support::Squarefree => n.is_squarefree(),
            Support::OmegaAtMost(k) => n.omega() <= k as usize,
        }
    }
}

/// A named arithmetic function with a declared support. Evaluation outside
/// the support returns exactly 0.0 without running the closure, so support
/// declarations are load-bearing, not advisory.
#[derive(Clone)]
pub struct ArithFn {
    name: String,
    support: Support,
    f: Arc<dyn Fn(&FactoredInteger) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for ArithFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ArithFn({}, {:?})", self.name, self.support)
    }
}

impl ArithFn {
    pub fn new(
        name: impl Into<String>,
        support: Support,
        f: impl Fn(&FactoredInteger) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ArithFn {
            name: name.into(),
            support,
            f: Arc::new(f),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn eval(&self, n: &FactoredInteger) -> f64 {
        if !self.support.contains(n) {
            return 0.0;
        }
        (self.f)(n)
    }

    /// Constant 1.
    pub fn one() -> Self {
        ArithFn::new("one", Support::All, |_| 1.0)
    }

    /// Indicator of n = 1 (the convolution identity).
    pub fn unit() -> Self {
        ArithFn::new("unit", Support::One, |_| 1.0)
    }

    pub fn mobius() -> Self {
        ArithFn::new("mobius", Support::Squarefree, |n| f64::from(mobius(n)))
    }

    pub fn von_mangoldt() -> Self {
        ArithFn::new("von_mangoldt", Support::PrimePowers, von_mangoldt)
    }

    /// Natural log of n.
    pub fn log() -> Self {
        ArithFn::new("log", Support::All, |n| (n.value() as f64).ln())
    }

    /// log^k n (pointwise power, not convolution).
    pub fn log_pow(k: u32) -> Self {
        ArithFn::new(format!("log^{k}"), Support::All, move |n| {
            (n.value() as f64).ln().powi(k as i32)
        })
    }

    /// mu(n) log^k n, the kernel of the generalized von Mangoldt sums.
    pub fn mobius_log_pow(k: u32) -> Self {
        ArithFn::new(format!("mobius*log^{k}"), Support::Squarefree, move |n| {
            f64::from(mobius(n)) * (n.value() as f64).ln().powi(k as i32)
        })
    }

    pub fn lambda_k(k: u32) -> Self {
        ArithFn::new(
            format!("lambda_{k}"),
            Support::OmegaAtMost(k.min(255) as u8),
            move |n| lambda_k(n, k),
        )
    }

    pub fn tau(r: u32) -> Self {
        ArithFn::new(format!("tau_{r}"), Support::All, move |n| tau_r(n, r) as f64)
    }

    pub fn j_weight() -> Self {
        ArithFn::new("j_weight", Support::All, j_weight)
    }
}

/// Dirichlet convolution table: returns `t` with `t[n] = (f * g)(n)` for
/// `1 <= n <= n_max` (index 0 unused). Tables of both factors are built by
/// sieve factorization, then combined by the divisor sweep, so the total cost
/// is O(n_max log n_max).
pub fn dirichlet_convolve(
    f: &ArithFn,
    g: &ArithFn,
    n_max: u64,
    sieve: &FactorSieve,
) -> Result<Vec<f64>, ArithError> {
    if n_max > TABLE_CAP {
        return Err(ArithError::BudgetExceeded {
            requested: n_max,
            cap: TABLE_CAP,
        });
    }
    let n = n_max as usize;
    let f_tab = eval_table(f, n, sieve);
    let g_tab = eval_table(g, n, sieve);
    let mut out = vec![0.0f64; n + 1];
    for d in 1..=n {
        let fd = f_tab[d];
        if fd == 0.0 {
            continue;
        }
        let mut m = d;
        let mut q = 1;
        while m <= n {
            out[m] += fd * g_tab[q];
            m += d;
            q += 1;
        }
    }
    Ok(out)
}

/// Pointwise evaluation table `t[n] = f(n)`, `1 <= n <= n_max`.
pub fn eval_table(f: &ArithFn, n_max: usize, sieve: &FactorSieve) -> Vec<f64> {
    let mut tab = vec![0.0f64; n_max + 1];
    for n in 1..=n_max {
        tab[n] = f.eval(&sieve.factor(n as u64));
    }
    tab
}

/// Dirichlet convolution of two precomputed 1-indexed value tables
/// (index 0 unused); output has the length of the shorter input.
pub fn convolve_tables(f_tab: &[f64], g_tab: &[f64]) -> Vec<f64> {
    let n = f_tab.len().min(g_tab.len()).saturating_sub(1);
    let mut out = vec![0.0f64; n + 1];
    for d in 1..=n {
        let fd = f_tab[d];
        if fd == 0.0 {
            continue;
        }
        let mut m = d;
        let mut q = 1;
        while m <= n {
            out[m] += fd * g_tab[q];
            m += d;
            q += 1;
        }
    }
    out
}

/// Maximum absolute residuals of the five Moebius/von Mangoldt divisor-sum
/// identities over `1 <= n <= n_max`:
///
/// 1. `sum_{d|n} mu(d) = [n = 1]`
/// 2. `sum_{d|n} mu(d) log d = -Lambda(n)`
/// 3. `sum_{d|n} mu(d) log^2 d = -2 log n Lambda(n) + Lambda_2(n)`
/// 4. `sum_{de=n} mu(d) log d log e = log n Lambda(n) - Lambda_2(n)`
/// 5. `Lambda_2(n) = Lambda(n) log n + (Lambda * Lambda)(n)`
///
/// Left sides are computed through [`dirichlet_convolve`] tables, right sides
/// through the closed forms, so the two code paths are independent.
pub fn mobius_identity_residuals(
    n_max: u64,
    sieve: &FactorSieve,
) -> Result<[f64; 5], ArithError> {
    let n = n_max as usize;
    let one = ArithFn::one();
    let lhs1 = dirichlet_convolve(&ArithFn::mobius(), &one, n_max, sieve)?;
    let lhs2 = dirichlet_convolve(&ArithFn::mobius_log_pow(1), &one, n_max, sieve)?;
    let lhs3 = dirichlet_convolve(&ArithFn::mobius_log_pow(2), &one, n_max, sieve)?;
    let lhs4 = dirichlet_convolve(&ArithFn::mobius_log_pow(1), &ArithFn::log(), n_max, sieve)?;
    let lhs5 = dirichlet_convolve(&ArithFn::von_mangoldt(), &ArithFn::von_mangoldt(), n_max, sieve)?;

    let mut worst = [0.0f64; 5];
    for v in 1..=n {
        let fct = sieve.factor(v as u64);
        let ln_v = (v as f64).ln();
        let lam = von_mangoldt(&fct);
        let lam2 = lambda_k(&fct, 2);
        let rhs = [
            if v == 1 { 1.0 } else { 0.0 },
            -lam,
            -2.0 * ln_v * lam + lam2,
            ln_v * lam - lam2,
            lam2 - lam * ln_v,
        ];
        let lhs = [lhs1[v], lhs2[v], lhs3[v], lhs4[v], lhs5[v]];
        for i in 0..5 {
            worst[i] = worst[i].max((lhs[i] - rhs[i]).abs());
        }
    }
    Ok(worst)
}

/// Greatest common divisor.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Outcome of [`conv_decompose_check`].
#[derive(Debug, Clone, Copy)]
pub struct ConvDecomposition {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub pass: bool,
}

/// Oracle-scale bound on `X` in [`conv_decompose_check`].
pub const CONV_CHECK_X_CAP: u64 = 100_000;
/// Residual below which [`conv_decompose_check`] reports a pass.
pub const CONV_CHECK_TOL: f64 = 1e-9;

/// Verifies the restricted-convolution decomposition identity
///
/// `sum_{m <= X, (m,k)=1} (f_1 * ... * f_j)(mD)
///   = sum_{d_1...d_j = D} sum_{m_1...m_j <= X, (m_i, k*D_i)=1}
///       f_1(m_1 d_j) f_2(m_2 d_{j-1}) ... f_j(m_j d_1)`
///
/// where `D_i = d_1 d_2 ... d_{j-i}` for `i < j` and `D_j = 1`. The left side
/// is evaluated through convolution tables, the right side by direct
/// enumeration of ordered factorizations of `D` and of the constrained
/// multi-index sum, so the two sides share no summation code.
pub fn conv_decompose_check(
    f_list: &[ArithFn],
    d_value: u64,
    k: u64,
    x_bound: u64,
    sieve: &FactorSieve,
) -> Result<ConvDecomposition, ArithError> {
    assert!(f_list.len() >= 2, "need at least two factors to decompose");
    assert!(d_value >= 1 && k >= 1 && x_bound >= 1);
    if x_bound > CONV_CHECK_X_CAP {
        return Err(ArithError::BudgetExceeded {
            requested: x_bound,
            cap: CONV_CHECK_X_CAP,
        });
    }
    let table_bound = x_bound
        .checked_mul(d_value)
        .filter(|&b| b <= TABLE_CAP)
        .ok_or(ArithError::BudgetExceeded {
            requested: u64::MAX,
            cap: TABLE_CAP,
        })?;

    // Left side: iterated convolution table up to X*D.
    let n = table_bound as usize;
    let mut conv = eval_table(&f_list[0], n, sieve);
    for f in &f_list[1..] {
        conv = convolve_tables(&conv, &eval_table(f, n, sieve));
    }
    let mut lhs = 0.0f64;
    for m in 1..=x_bound {
        if gcd(m, k) == 1 {
            lhs += conv[(m * d_value) as usize];
        }
    }

    // Right side: ordered factorizations d_1 ... d_j = D, then the nested
    // constrained sum over m_1 ... m_j <= X.
    let j = f_list.len();
    let mut rhs = 0.0f64;
    let mut parts = vec![1u64; j];
    let divisors_of = |v: u64| sieve.factor(v).divisors();
    // enumerate (d_1, ..., d_j) with product D
    fn assign(
        idx: usize,
        remaining: u64,
        parts: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
        divisors_of: &dyn Fn(u64) -> Vec<u64>,
    ) {
        if idx + 1 == parts.len() {
            parts[idx] = remaining;
            out.push(parts.clone());
            return;
        }
        for d in divisors_of(remaining) {
            parts[idx] = d;
            assign(idx + 1, remaining / d, parts, out, divisors_of);
        }
    }
    let mut decompositions = Vec::new();
    assign(0, d_value, &mut parts, &mut decompositions, &divisors_of);

    for d in &decompositions {
        // D_i = prod_{u=1}^{j-i} d_u, with D_j = 1.
        let mut prefix = vec![1u64; j + 1]; // prefix[t] = d_1 * ... * d_t
        for t in 1..=j {
            prefix[t] = prefix[t - 1] * d[t - 1];
        }
        // nested sum over m_1 ... m_j <= X with (m_i, k*D_i) = 1 of
        // prod_i f_i(m_i * d_{j+1-i})
        fn nest(
            i: usize,
            budget: u64,
            acc: f64,
            j: usize,
            d: &[u64],
            prefix: &[u64],
            k: u64,
            f_list: &[ArithFn],
            sieve: &FactorSieve,
            total: &mut f64,
        ) {
            if i == j {
                *total += acc;
                return;
            }
            let cap_i = k * prefix[j - (i + 1)]; // k * D_{i+1} (1-based i+1)
            let d_factor = d[j - i - 1]; // d_{j - i} in 1-based terms = d_{j+1-(i+1)}
            for m in 1..=budget {
                if gcd(m, cap_i) != 1 {
                    continue;
                }
                let val = f_list[i].eval(&sieve.factor(m * d_factor));
                if val == 0.0 {
                    // zero factor kills the whole product; skip the subtree
                    continue;
                }
                nest(
                    i + 1,
                    budget / m,
                    acc * val,
                    j,
                    d,
                    prefix,
                    k,
                    f_list,
                    sieve,
                    total,
                );
            }
        }
        nest(0, x_bound, 1.0, j, d, &prefix, k, f_list, sieve, &mut rhs);
    }

    let residual = (lhs - rhs).abs();
    Ok(ConvDecomposition {
        lhs,
        rhs,
        residual,
        pass: residual < CONV_CHECK_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = std::f64::consts::LN_2;

    fn ln(x: u64) -> f64 {
        (x as f64).ln()
    }

    #[test]
    fn factorization_agrees_between_trial_division_and_sieve() {
        let sieve = FactorSieve::new(10_000).unwrap();
        for n in 1..=10_000u64 {
            assert_eq!(FactoredInteger::of(n), sieve.factor(n), "n = {n}");
        }
        // beyond the sieve bound the fallback path must kick in
        let big = 10_000_019u64; // prime
        assert_eq!(sieve.factor(big).factors(), &[(big, 1)]);
    }

    #[test]
    fn mobius_and_von_mangoldt_small_values() {
        let mu: Vec<i32> = (1..=12u64)
            .map(|n| mobius(&FactoredInteger::of(n)))
            .collect();
        assert_eq!(mu, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]);
        assert_eq!(von_mangoldt(&FactoredInteger::of(8)), LN2);
        assert_eq!(von_mangoldt(&FactoredInteger::of(6)), 0.0);
        assert_eq!(von_mangoldt(&FactoredInteger::of(1)), 0.0);
    }

    #[test]
    fn lambda_2_closed_values() {
        // Lambda_2(12) = 2 log 2 log 3: two distinct primes, exponents (2,1).
        let v = lambda_k(&FactoredInteger::of(12), 2);
        assert!((v - 2.0 * LN2 * ln(3)).abs() < 1e-12, "got {v}");
        // Lambda_2(p^e) = (2e - 1) log^2 p.
        let v4 = lambda_k(&FactoredInteger::of(4), 2);
        assert!((v4 - 3.0 * LN2 * LN2).abs() < 1e-12);
        // three distinct primes kill Lambda_2
        assert_eq!(lambda_k(&FactoredInteger::of(30), 2), 0.0);
        // Lambda_1 = Lambda
        for n in 1..=60u64 {
            let f = FactoredInteger::of(n);
            assert!((lambda_k(&f, 1) - von_mangoldt(&f)).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn tau_r_prime_power_binomials() {
        assert_eq!(tau_r(&FactoredInteger::of(4), 3), 6); // C(4,2)
        assert_eq!(tau_r(&FactoredInteger::of(12), 2), 6); // d(12)
        assert_eq!(tau_r(&FactoredInteger::of(1), 7), 1);
        assert_eq!(tau_r(&FactoredInteger::of(8), 2), 4);
        // multiplicativity on coprime pairs
        for (m, n) in [(4u64, 9u64), (8, 27), (5, 12)] {
            for r in 1..=4u32 {
                assert_eq!(
                    tau_r(&FactoredInteger::of(m * n), r),
                    tau_r(&FactoredInteger::of(m), r) * tau_r(&FactoredInteger::of(n), r)
                );
            }
        }
    }

    #[test]
    fn eta_and_g_closed_values() {
        let six = FactoredInteger::of(6);
        assert!((eta1(&six) - (LN2 + ln(3) / 2.0)).abs() < 1e-14);
        let expected_eta2 = -(2.0 * LN2 + 3.0 * ln(3) / 4.0);
        assert!((eta2(&six) - expected_eta2).abs() < 1e-14);
        // g(4,3): p = 2 coprime to 3, two prime-power divisors 2 and 4.
        let g = g_hk(&FactoredInteger::of(4), &FactoredInteger::of(3));
        assert!((g - 2.0 * LN2 * LN2).abs() < 1e-14);
        // shared prime contributes nothing
        assert_eq!(g_hk(&FactoredInteger::of(8), &FactoredInteger::of(2)), 0.0);
    }

    #[test]
    fn phi_closed_matches_definitional_sums() {
        for n in 1..=2_000u64 {
            let f = FactoredInteger::of(n);
            for j in 1..=4u8 {
                let a = phi_j(&f, j);
                let b = phi_j_definitional(&f, j);
                assert!(
                    (a - b).abs() < 1e-10,
                    "phi_{j}({n}): closed {a} vs definitional {b}"
                );
            }
        }
    }

    #[test]
    fn alpha2_branch_values() {
        // Two distinct primes: -log p log q (1/(p-1) + 1/(q-1) + 1/((p-1)(q-1))),
        // independent of d and of the exponents.
        let expected6 = -LN2 * ln(3) * (1.0 + 0.5 + 0.5);
        for n in [6u64, 12, 18, 36] {
            let v = alpha2(&FactoredInteger::of(n), 0.3);
            assert!((v - expected6).abs() < 1e-14, "alpha2({n}) = {v}");
        }
        // Prime power: -(a + 1/2) log^2 p/(p-1) + d log p/(p-1) - log^2 p/(p-1)^2.
        let d = 0.7;
        for (n, a) in [(2u64, 1.0), (4, 2.0), (8, 3.0), (9, 2.0), (25, 2.0)] {
            let f = FactoredInteger::of(n);
            let p = f.factors()[0].0 as f64;
            let lp = p.ln();
            let expected = -(a + 0.5) * lp * lp / (p - 1.0) + d * lp / (p - 1.0)
                - lp * lp / ((p - 1.0) * (p - 1.0));
            let v = alpha2(&f, d);
            assert!((v - expected).abs() < 1e-14, "alpha2({n}) = {v}");
        }
        // Unit and three or more distinct primes vanish.
        for n in [1u64, 30, 60, 210] {
            assert_eq!(alpha2(&FactoredInteger::of(n), 0.9), 0.0, "alpha2({n})");
        }
    }

    #[test]
    fn von_mangoldt_log_conv_matches_divisor_sum() {
        for n in 1..=500u64 {
            let f = FactoredInteger::of(n);
            let closed = von_mangoldt_log_conv(&f);
            let brute: f64 = f
                .divisors()
                .iter()
                .map(|&d| von_mangoldt(&FactoredInteger::of(d)) * ((n / d) as f64).ln())
                .sum();
            assert!(
                (closed - brute).abs() < 1e-11,
                "n = {n}: closed {closed} vs brute {brute}"
            );
        }
    }

    #[test]
    fn j_weight_is_the_prime_product() {
        let v = j_weight(&FactoredInteger::of(6));
        let expected = (1.0 + 10.0 / 2f64.sqrt()) * (1.0 + 10.0 / 3f64.sqrt());
        assert!((v - expected).abs() < 1e-12);
        assert_eq!(j_weight(&FactoredInteger::of(1)), 1.0);
        // exponent-independence
        assert_eq!(
            j_weight(&FactoredInteger::of(12)),
            j_weight(&FactoredInteger::of(6))
        );
    }

    #[test]
    fn support_gates_evaluation() {
        let bogus = ArithFn::new("poison", Support::PrimePowers, |_| f64::NAN);
        assert_eq!(bogus.eval(&FactoredInteger::of(6)), 0.0);
        assert!(bogus.eval(&FactoredInteger::of(8)).is_nan());
        assert_eq!(ArithFn::unit().eval(&FactoredInteger::of(2)), 0.0);
        assert_eq!(ArithFn::unit().eval(&FactoredInteger::of(1)), 1.0);
    }

    #[test]
    fn convolution_against_brute_force() {
        let sieve = FactorSieve::new(400).unwrap();
        let f = ArithFn::von_mangoldt();
        let g = ArithFn::log();
        let table = dirichlet_convolve(&f, &g, 400, &sieve).unwrap();
        for n in 1..=400u64 {
            let fct = FactoredInteger::of(n);
            let mut brute = 0.0;
            for d in fct.divisors() {
                brute += f.eval(&FactoredInteger::of(d)) * g.eval(&FactoredInteger::of(n / d));
            }
            assert!(
                (table[n as usize] - brute).abs() < 1e-11,
                "n = {n}: table {} vs brute {brute}",
                table[n as usize]
            );
            // and the closed form agrees
            assert!((table[n as usize] - von_mangoldt_log_conv(&fct)).abs() < 1e-11);
        }
    }

    #[test]
    fn identity_suite_is_tight_on_a_small_range() {
        let sieve = FactorSieve::new(2_000).unwrap();
        let worst = mobius_identity_residuals(2_000, &sieve).unwrap();
        for (i, w) in worst.iter().enumerate() {
            assert!(*w < 1e-10, "identity {} residual {w}", i + 1);
        }
    }

    #[test]
    fn restricted_convolution_decomposition_holds() {
        let sieve = FactorSieve::new(8_000).unwrap();
        // two-factor case with a nontrivial D and coprimality modulus
        let r = conv_decompose_check(
            &[ArithFn::von_mangoldt(), ArithFn::log()],
            4,
            3,
            1_000,
            &sieve,
        )
        .unwrap();
        assert!(r.pass, "lhs {} rhs {} residual {}", r.lhs, r.rhs, r.residual);
        // D = 1: both sides are the plain restricted sum
        let r1 = conv_decompose_check(&[ArithFn::mobius(), ArithFn::log()], 1, 2, 800, &sieve)
            .unwrap();
        assert!(r1.pass, "residual {}", r1.residual);
        // three-factor case
        let ones = [ArithFn::one(), ArithFn::one(), ArithFn::one()];
        let r3 = conv_decompose_check(&ones, 6, 1, 500, &sieve).unwrap();
        assert!(r3.pass, "lhs {} rhs {} residual {}", r3.lhs, r3.rhs, r3.residual);
        // oracle-scale guard
        assert!(conv_decompose_check(&ones, 2, 1, CONV_CHECK_X_CAP + 1, &sieve).is_err());
    }

    #[test]
    fn budget_guard_rejects_oversized_tables() {
        assert!(FactorSieve::new(TABLE_CAP + 1).is_err());
        let sieve = FactorSieve::new(10).unwrap();
        assert!(dirichlet_convolve(&ArithFn::one(), &ArithFn::one(), TABLE_CAP + 1, &sieve).is_err());
    }
}
