//! Dirichlet characters, Gauss sums, and the additive-to-multiplicative
//! decomposition identities they satisfy.
//!
//! Characters are represented by exponent vectors over a fixed generator
//! basis of the unit group: evaluation reduces to exact integer arithmetic
//! on rational angles plus a single complex exponential, so identity checks
//! test genuine roots of unity rather than accumulated floating error.

use num_complex::Complex64;
use thiserror::Error;

use crate::arith::{euler_phi, gcd, mobius, FactoredInteger};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Cap on table moduli.
pub const MODULUS_CAP: u64 = 100_000;

#[derive(Debug, Error)]
pub enum CharError {
    #[error("modulus {0} exceeds the table cap {MODULUS_CAP}")]
    ModulusTooLarge(u64),
    #[error("character {chi} mod {k} is not induced by the given character mod {q}")]
    NotInducing { chi: usize, k: u64, q: u64 },
}

/// `e(x) = exp(2 pi i x)`.
pub fn e_of(x: f64) -> Complex64 {
    Complex64::new(0.0, TWO_PI * x).exp()
}

struct Generator {
    /// Residue mod q generating one cyclic factor (lifted so it is 1 in the
    /// other factors).
    residue: u64,
    order: u64,
}

/// All phi(q) Dirichlet characters mod q with conductors and flags.
pub struct CharacterTable {
    q: u64,
    generators: Vec<Generator>,
    /// For each residue class, the exponent vector of its decomposition over
    /// the generators, or None when not coprime to q.
    dlog: Vec<Option<Vec<u64>>>,
    /// Exponent vector of each character (index i pairs with generator i).
    chars: Vec<Vec<u64>>,
    conductors: Vec<u64>,
    /// lcm of generator orders (the common angle denominator).
    angle_den: u64,
}

fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc: u128 = 1;
    let mm = m as u128;
    let mut bb = (b % m) as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * bb % mm;
        }
        bb = bb * bb % mm;
        e >>= 1;
    }
    acc as u64
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Modular inverse via extended Euclid; requires gcd(a, m) = 1.
fn inv_mod(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let qt = old_r / r;
        (old_r, r) = (r, old_r - qt * r);
        (old_s, s) = (s, old_s - qt * s);
    }
    debug_assert_eq!(old_r, 1, "inverse requires coprime arguments");
    (old_s.rem_euclid(m as i128)) as u64
}

/// Primitive root mod odd prime p.
fn primitive_root_mod_p(p: u64) -> u64 {
    let phi = p - 1;
    let prime_factors: Vec<u64> = FactoredInteger::of(phi)
        .factors()
        .iter()
        .map(|&(r, _)| r)
        .collect();
    'outer: for g in 2..p {
        for &r in &prime_factors {
            if pow_mod(g, phi / r, p) == 1 {
                continue 'outer;
            }
        }
        return g;
    }
    unreachable!("every odd prime has a primitive root");
}

/// Generators of the cyclic decomposition of (Z/p^e)^*.
fn local_generators(p: u64, e: u32) -> Vec<(u64, u64)> {
    let m = p.pow(e);
    if p == 2 {
        match e {
            1 => vec![],
            2 => vec![(3, 2)],
            _ => vec![(m - 1, 2), (3, m / 4)],
        }
    } else {
        let g0 = primitive_root_mod_p(p);
        let g = if e >= 2 && pow_mod(g0, p - 1, p * p) == 1 {
            g0 + p
        } else {
            g0
        };
        vec![(g % m, euler_phi(&FactoredInteger::of(m)))]
    }
}

impl CharacterTable {
    pub fn build(q: u64) -> Result<Self, CharError> {
        assert!(q >= 1);
        if q > MODULUS_CAP {
            return Err(CharError::ModulusTooLarge(q));
        }
        let fct = FactoredInteger::of(q);
        // CRT-lift local generators to mod q
        let mut generators = Vec::new();
        for &(p, e) in fct.factors() {
            let pe = p.pow(e);
            let rest = q / pe;
            for (g_loc, ord) in local_generators(p, e) {
                let residue = if rest == 1 {
                    g_loc
                } else {
                    // x = g_loc (mod pe), x = 1 (mod rest)
                    let x = (g_loc as u128 * rest as u128 % q as u128
                        * inv_mod(rest % pe, pe) as u128
                        + pe as u128 * inv_mod(pe % rest, rest) as u128 % q as u128)
                        % q as u128;
                    x as u64
                };
                generators.push(Generator { residue, order: ord });
            }
        }

        // discrete-log table by odometer enumeration of generator powers
        let mut dlog: Vec<Option<Vec<u64>>> = vec![None; q as usize];
        let g_count = generators.len();
        let mut frontier: Vec<(u64, Vec<u64>)> = vec![(1 % q, vec![0; g_count])];
        for (i, gen) in generators.iter().enumerate() {
            let mut next = Vec::with_capacity(frontier.len() * gen.order as usize);
            for (r, v) in &frontier {
                let mut acc = *r;
                for k in 0..gen.order {
                    let mut vv = v.clone();
                    vv[i] = k;
                    next.push((acc, vv));
                    acc = (acc as u128 * gen.residue as u128 % q as u128) as u64;
                }
            }
            frontier = next;
        }
        let phi = euler_phi(&fct);
        debug_assert_eq!(frontier.len() as u64, phi.max(1));
        for (r, v) in frontier {
            let idx = (r % q) as usize;
            debug_assert!(dlog[idx].is_none(), "duplicate residue {r} mod {q}");
            dlog[idx] = Some(v);
        }
        if q == 1 {
            dlog = vec![Some(vec![])];
        }

        // all characters = all exponent tuples
        let mut chars: Vec<Vec<u64>> = vec![vec![]];
        for gen in &generators {
            let mut next = Vec::with_capacity(chars.len() * gen.order as usize);
            for c in &chars {
                for k in 0..gen.order {
                    let mut cc = c.clone();
                    cc.push(k);
                    next.push(cc);
                }
            }
            chars = next;
        }

        let angle_den = generators.iter().fold(1u64, |l, g| lcm(l, g.order));
        let mut table = CharacterTable {
            q,
            generators,
            dlog,
            chars,
            conductors: Vec::new(),
            angle_den,
        };
        table.conductors = (0..table.chars.len())
            .map(|i| table.compute_conductor(i))
            .collect();
        Ok(table)
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// Number of characters, phi(q).
    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Exact angle numerator of chi_idx(a) over denominator
    /// [`angle_den`](Self::angle_denominator): `chi(a) = e(num/den)`.
    /// None encodes chi(a) = 0 (a not coprime to q).
    pub fn angle_num(&self, idx: usize, a: u64) -> Option<u64> {
        let v = self.dlog[(a % self.q) as usize].as_ref()?;
        let mut num: u64 = 0;
        for ((c, k), gen) in self.chars[idx].iter().zip(v).zip(&self.generators) {
            num = (num + c * k % self.angle_den * (self.angle_den / gen.order)) % self.angle_den;
        }
        Some(num)
    }

    pub fn angle_denominator(&self) -> u64 {
        self.angle_den
    }

    /// chi_idx(a) as a complex number (0 off the unit group).
    pub fn eval(&self, idx: usize, a: u64) -> Complex64 {
        match self.angle_num(idx, a) {
            None => Complex64::new(0.0, 0.0),
            Some(num) => e_of(num as f64 / self.angle_den as f64),
        }
    }

    pub fn is_principal(&self, idx: usize) -> bool {
        self.chars[idx].iter().all(|&c| c == 0)
    }

    pub fn principal_index(&self) -> usize {
        (0..self.len())
            .find(|&i| self.is_principal(i))
            .expect("principal character always exists")
    }

    /// Index of the complex-conjugate character.
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let conj: Vec<u64> = self.chars[idx]
            .iter()
            .zip(&self.generators)
            .map(|(&c, g)| (g.order - c) % g.order)
            .collect();
        self.chars
            .iter()
            .position(|c| *c == conj)
            .expect("conjugate exponent vector exists by construction")
    }

    fn compute_conductor(&self, idx: usize) -> u64 {
        // smallest f | q with chi(a) = 1 for all a = 1 (mod f), (a, q) = 1
        for f in FactoredInteger::of(self.q).divisors() {
            let mut ok = true;
            let mut a = 1u64;
            while a <= self.q {
                if gcd(a, self.q) == 1 {
                    match self.angle_num(idx, a) {
                        Some(0) => {}
                        _ => {
                            ok = false;
                            break;
                        }
                    }
                }
                a += f;
            }
            if ok {
                return f;
            }
        }
        self.q
    }

    pub fn conductor(&self, idx: usize) -> u64 {
        self.conductors[idx]
    }

    pub fn is_primitive(&self, idx: usize) -> bool {
        self.conductors[idx] == self.q
    }

    /// Gauss sum `tau(chi) = sum_a chi(a) e(a/q)`.
    pub fn gauss_sum(&self, idx: usize) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 1..=self.q {
            if let Some(num) = self.angle_num(idx, a) {
                acc += e_of(num as f64 / self.angle_den as f64 + a as f64 / self.q as f64);
            }
        }
        if self.q == 1 {
            acc = Complex64::new(1.0, 0.0);
        }
        acc
    }

    /// The primitive character mod `conductor(idx)` inducing `idx`, as an
    /// index into the conductor's table.
    pub fn inducing_character(&self, idx: usize, sub: &CharacterTable) -> Result<usize, CharError> {
        'cand: for j in 0..sub.len() {
            if !sub.is_primitive(j) {
                continue;
            }
            for a in 1..=self.q {
                if gcd(a, self.q) != 1 {
                    continue;
                }
                // compare exact angles num/den across the two tables
                let na = self.angle_num(idx, a).expect("coprime residue");
                let nb = match sub.angle_num(j, a) {
                    Some(n) => n,
                    None => continue 'cand,
                };
                if na as u128 * sub.angle_den as u128 != nb as u128 * self.angle_den as u128 {
                    continue 'cand;
                }
            }
            return Ok(j);
        }
        Err(CharError::NotInducing {
            chi: idx,
            k: self.q,
            q: sub.q,
        })
    }
}

/// `|tau(chi) - mu(k'/q) psi(k'/q) tau(psi)|` for the primitive `psi` mod
/// `q = conductor(chi)` inducing `chi` mod `k'`.
pub fn induced_gauss_sum_check(table: &CharacterTable, idx: usize) -> Result<f64, CharError> {
    let f = table.conductor(idx);
    let sub = CharacterTable::build(f)?;
    let j = table.inducing_character(idx, &sub)?;
    let ratio = table.modulus() / f;
    let predicted = f64::from(mobius(&FactoredInteger::of(ratio)))
        * sub.eval(j, ratio % f.max(1))
        * sub.gauss_sum(j);
    let predicted = if f == 1 {
        // chi principal mod k': tau(chi_0) = mu(k')
        Complex64::new(f64::from(mobius(&FactoredInteger::of(table.modulus()))), 0.0)
    } else {
        predicted
    };
    Ok((table.gauss_sum(idx) - predicted).norm())
}

/// Residual of the additive-to-multiplicative decomposition
/// `e(-m/k) = mu(k')/phi(k') + (1/phi(k')) sum_{chi != chi_0 mod k'}
/// tau(conj chi) chi(-m')`, where `m' = m/(m,k)` and `k' = k/(m,k)`.
pub fn additive_decomposition_check(m: u64, k: u64) -> Result<f64, CharError> {
    assert!(k >= 1 && m >= 1);
    let d = gcd(m, k);
    let (m1, k1) = (m / d, k / d);
    let table = CharacterTable::build(k1)?;
    let phi = euler_phi(&FactoredInteger::of(k1)) as f64;
    let mut rhs = Complex64::new(
        f64::from(mobius(&FactoredInteger::of(k1))) / phi,
        0.0,
    );
    let neg_m1 = (k1 - m1 % k1) % k1;
    for idx in 0..table.len() {
        if table.is_principal(idx) {
            continue;
        }
        let conj = table.conjugate_index(idx);
        rhs += table.gauss_sum(conj) * table.eval(idx, neg_m1) / phi;
    }
    let lhs = e_of(-(m1 as f64) / k1 as f64);
    Ok((lhs - rhs).norm())
}

/// `delta(q, k, d, psi) = sum_{e | d, e | k/q} mu(d/e)/phi(k/e)
///  * conj(psi)(-k/(eq)) * psi(d/e) * mu(k/(eq))` for `psi` mod `q`, `q | k`.
pub fn delta_factor(
    q: u64,
    k: u64,
    d: u64,
    psi_table: &CharacterTable,
    psi: usize,
) -> Complex64 {
    assert_eq!(psi_table.modulus(), q);
    assert!(q > 1 && k % q == 0 && d >= 1);
    let mut acc = Complex64::new(0.0, 0.0);
    let kq = k / q;
    let psi_bar = psi_table.conjugate_index(psi);
    for e in FactoredInteger::of(d).divisors() {
        if kq % e != 0 {
            continue;
        }
        let mu_de = mobius(&FactoredInteger::of(d / e));
        if mu_de == 0 {
            continue;
        }
        let mu_keq = mobius(&FactoredInteger::of(kq / e));
        if mu_keq == 0 {
            continue;
        }
        let phi_ke = euler_phi(&FactoredInteger::of(k / e)) as f64;
        let neg_keq = (q - (kq / e) % q) % q;
        acc += f64::from(mu_de) / phi_ke
            * psi_table.eval(psi_bar, neg_keq)
            * psi_table.eval(psi, (d / e) % q)
            * f64::from(mu_keq);
    }
    acc
}

/// Residual of the primitive-character decomposition: the non-principal part
/// of the additive identity,
/// `(1/phi(k')) sum_{chi != chi_0 mod k'} tau(conj chi) chi(-m')`,
/// against
/// `sum_{q | k, q > 1} sum*_{psi mod q} tau(conj psi)
///  sum_{d | (m,k)} psi(m/d) delta(q, k, d, psi)`
/// with the original (unreduced) m and k on the right.
pub fn primitive_decomposition_check(m: u64, k: u64) -> Result<f64, CharError> {
    assert!(k >= 2 && m >= 1);
    let g = gcd(m, k);
    let (m1, k1) = (m / g, k / g);

    // left side
    let t1 = CharacterTable::build(k1)?;
    let phi1 = euler_phi(&FactoredInteger::of(k1)) as f64;
    let neg_m1 = (k1 - m1 % k1) % k1;
    let mut lhs = Complex64::new(0.0, 0.0);
    for idx in 0..t1.len() {
        if t1.is_principal(idx) {
            continue;
        }
        lhs += t1.gauss_sum(t1.conjugate_index(idx)) * t1.eval(idx, neg_m1);
    }
    lhs /= phi1;

    // right side
    let mut rhs = Complex64::new(0.0, 0.0);
    for q in FactoredInteger::of(k).divisors() {
        if q == 1 {
            continue;
        }
        let tq = CharacterTable::build(q)?;
        for psi in 0..tq.len() {
            if !tq.is_primitive(psi) {
                continue;
            }
            let tau_bar = tq.gauss_sum(tq.conjugate_index(psi));
            let mut inner = Complex64::new(0.0, 0.0);
            for d in FactoredInteger::of(g).divisors() {
                inner += tq.eval(psi, (m / d) % q) * delta_factor(q, k, d, &tq, psi);
            }
            rhs += tau_bar * inner;
        }
    }
    Ok((lhs - rhs).norm())
}

/// Measured ratios `|delta(q, kq, d, psi)| * phi(k) phi(q) / ((d,k) log log T)`
/// over a sweep of admissible (q, k, d, psi); reported, never asserted —
/// the bound's absolute constant is not pinned by theory here.
pub fn delta_envelope_report(kq_max: u64, t: f64) -> Result<Vec<(u64, u64, u64, f64)>, CharError> {
    let lllt = t.ln().ln();
    let mut rows = Vec::new();
    for q in 2..=kq_max {
        let tq = CharacterTable::build(q)?;
        for k in 1..=kq_max / q {
            let kq = k * q;
            for d in FactoredInteger::of(kq).divisors() {
                for psi in 0..tq.len() {
                    if !tq.is_primitive(psi) {
                        continue;
                    }
                    let v = delta_factor(q, kq, d, &tq, psi).norm();
                    let envelope = gcd(d, k) as f64 * lllt
                        / (euler_phi(&FactoredInteger::of(k)) as f64
                            * euler_phi(&FactoredInteger::of(q)) as f64);
                    rows.push((q, k, d, v / envelope));
                }
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_sizes_and_principal_uniqueness() {
        for q in 1..=36u64 {
            let t = CharacterTable::build(q).unwrap();
            let phi = euler_phi(&FactoredInteger::of(q)).max(1);
            assert_eq!(t.len() as u64, phi, "q = {q}");
            let principals = (0..t.len()).filter(|&i| t.is_principal(i)).count();
            assert_eq!(principals, 1, "q = {q}");
        }
    }

    #[test]
    fn characters_are_completely_multiplicative() {
        for q in [5u64, 8, 12, 15, 16, 24, 36, 40] {
            let t = CharacterTable::build(q).unwrap();
            for idx in 0..t.len() {
                for a in 1..q {
                    for b in 1..q {
                        let lhs = t.eval(idx, a * b % q);
                        let rhs = t.eval(idx, a) * t.eval(idx, b);
                        assert!(
                            (lhs - rhs).norm() < 1e-12,
                            "q={q} chi_{idx}({a}*{b})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn orthogonality_of_characters() {
        for q in [3u64, 8, 12, 21, 30] {
            let t = CharacterTable::build(q).unwrap();
            let phi = t.len() as f64;
            for i in 0..t.len() {
                for j in 0..t.len() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for a in 0..q {
                        acc += t.eval(i, a) * t.eval(j, a).conj();
                    }
                    let want = if i == j { phi } else { 0.0 };
                    assert!(
                        (acc - Complex64::new(want, 0.0)).norm() < 1e-12,
                        "q={q} ({i},{j}): {acc}"
                    );
                }
            }
        }
    }

    #[test]
    fn gauss_sums_match_classical_values() {
        // nontrivial character mod 3: tau = i sqrt(3)
        let t3 = CharacterTable::build(3).unwrap();
        let idx = (0..t3.len()).find(|&i| !t3.is_principal(i)).unwrap();
        let tau = t3.gauss_sum(idx);
        assert!((tau - Complex64::new(0.0, 3f64.sqrt())).norm() < 1e-12, "{tau}");
        // principal mod 4: tau = mu(4) = 0
        let t4 = CharacterTable::build(4).unwrap();
        let tau0 = t4.gauss_sum(t4.principal_index());
        assert!(tau0.norm() < 1e-12);
        // principal mod k': tau = mu(k') for a few k'
        for k in [2u64, 6, 10, 12, 30] {
            let t = CharacterTable::build(k).unwrap();
            let tau = t.gauss_sum(t.principal_index());
            let want = f64::from(mobius(&FactoredInteger::of(k)));
            assert!((tau - Complex64::new(want, 0.0)).norm() < 1e-10, "k = {k}");
        }
        // primitive characters have |tau|^2 = q
        for q in [5u64, 7, 8, 9, 11, 13, 15, 16, 21] {
            let t = CharacterTable::build(q).unwrap();
            for i in 0..t.len() {
                if t.is_primitive(i) {
                    let m2 = t.gauss_sum(i).norm_sqr();
                    assert!((m2 - q as f64).abs() < 1e-10, "q={q} chi_{i}: {m2}");
                }
            }
        }
    }

    #[test]
    fn conductors_mod_eight() {
        let t = CharacterTable::build(8).unwrap();
        let mut conductors: Vec<u64> = (0..t.len()).map(|i| t.conductor(i)).collect();
        conductors.sort_unstable();
        assert_eq!(conductors, vec![1, 4, 8, 8]);
        assert_eq!((0..t.len()).filter(|&i| t.is_primitive(i)).count(), 2);
    }

    #[test]
    fn induced_gauss_sum_factorization() {
        // spec'd spots: k' = 6 (psi mod 3), self-induced, k' = 12 with q = 3
        for k in [6u64, 12, 15, 20, 21, 24] {
            let t = CharacterTable::build(k).unwrap();
            for idx in 0..t.len() {
                let r = induced_gauss_sum_check(&t, idx).unwrap();
                assert!(r < 1e-10, "k'={k} chi_{idx}: residual {r}");
            }
        }
    }

    #[test]
    fn additive_decomposition_small_cases() {
        assert!(additive_decomposition_check(2, 6).unwrap() < 1e-12);
        assert!(additive_decomposition_check(1, 5).unwrap() < 1e-12);
        // k | m reduces to k' = 1: e(-m/k) = 1 exactly
        assert!(additive_decomposition_check(12, 6).unwrap() < 1e-15);
        for k in 2..=24u64 {
            for m in 1..=k {
                let r = additive_decomposition_check(m, k).unwrap();
                assert!(r < 1e-11, "(m,k) = ({m},{k}): {r}");
            }
        }
    }

    #[test]
    fn delta_factor_single_term_case() {
        // q = k, d = 1: only e = 1 contributes: conj(psi)(-1)/phi(k)
        for q in [3u64, 5, 7, 8] {
            let t = CharacterTable::build(q).unwrap();
            for psi in 0..t.len() {
                if !t.is_primitive(psi) {
                    continue;
                }
                let got = delta_factor(q, q, 1, &t, psi);
                let want =
                    t.eval(t.conjugate_index(psi), q - 1) / euler_phi(&FactoredInteger::of(q)) as f64;
                assert!((got - want).norm() < 1e-14, "q={q} psi={psi}");
            }
        }
    }

    #[test]
    fn primitive_decomposition_matches_frozen_left_sides() {
        // non-principal sums frozen from an independent evaluation
        let fixtures: [(u64, u64, f64, f64); 5] = [
            (4, 12, 0.0, -0.8660254037844386),
            (3, 10, -0.55901699437494742, -0.95105651629515357),
            (6, 18, 0.0, -0.8660254037844386),
            (5, 24, 0.25881904510252076, -0.96592582628906829),
            (9, 40, 0.15643446504023087, -0.98768834059513777),
        ];
        for &(m, k, re, im) in &fixtures {
            let g = gcd(m, k);
            let (m1, k1) = (m / g, k / g);
            let t1 = CharacterTable::build(k1).unwrap();
            let phi1 = euler_phi(&FactoredInteger::of(k1)) as f64;
            let neg = (k1 - m1 % k1) % k1;
            let mut lhs = Complex64::new(0.0, 0.0);
            for idx in 0..t1.len() {
                if !t1.is_principal(idx) {
                    lhs += t1.gauss_sum(t1.conjugate_index(idx)) * t1.eval(idx, neg);
                }
            }
            lhs /= phi1;
            assert!(
                (lhs - Complex64::new(re, im)).norm() < 1e-10,
                "(m,k)=({m},{k}): lhs {lhs}"
            );
            let r = primitive_decomposition_check(m, k).unwrap();
            assert!(r < 1e-10, "(m,k)=({m},{k}): residual {r}");
        }
    }

    #[test]
    fn primitive_decomposition_sweep_small_moduli() {
        for k in 2..=20u64 {
            for m in 1..=k {
                let r = primitive_decomposition_check(m, k).unwrap();
                assert!(r < 1e-10, "(m,k) = ({m},{k}): {r}");
            }
        }
    }

    #[test]
    fn modulus_cap_is_enforced() {
        assert!(CharacterTable::build(MODULUS_CAP + 1).is_err());
    }
}
