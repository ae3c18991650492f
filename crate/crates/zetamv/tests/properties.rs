//! Randomized algebraic properties: linearity of the discrete sum and of
//! Dirichlet evaluation, norm scaling and monotonicity, resonator
//! multiplicativity, the restricted-convolution decomposition against its
//! direct oracle, and stability of the synthetic calibration round-trip
//! across seeds.

use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;
use zetamv::arith::{self, ArithFn, FactorSieve, FactoredInteger};
use zetamv::coeffs::{norms, resonator, ResonatorParams};
use zetamv::meanvalue::{discrete_sum, synthetic_round_trip, MeanValueParams};
use zetamv::zeta::{find_zeros, PrecisionConfig, ZeroList};
use zetamv::CoefficientVector;

/// Relative tolerance for linearity of the discrete sum in either argument.
const LINEARITY_REL_TOL: f64 = 1e-9;
/// Relative tolerance for norm-scaling identities.
const SCALING_REL_TOL: f64 = 1e-12;
/// Coprime resonator splits may differ from the stored product only by
/// floating-point association order.
const MULTIPLICATIVITY_REL_TOL: f64 = 1e-13;
/// Largest allowed deviation when refitting synthetic constants.
const ROUND_TRIP_TOL: f64 = 1e-3;

const SUPPORT: u64 = 8;
const ZERO_RANGE: f64 = 100.0;

static ZEROS: OnceLock<ZeroList> = OnceLock::new();

fn zeros_to_100() -> &'static ZeroList {
    ZEROS.get_or_init(|| {
        find_zeros(ZERO_RANGE, &PrecisionConfig::default()).expect("zero search up to T = 100")
    })
}

/// Sparse vectors on `1..=SUPPORT` with a handful of bounded entries.
fn sparse_vector() -> impl Strategy<Value = CoefficientVector> {
    prop::collection::vec((1..=SUPPORT, -10.0..10.0f64), 1..6)
        .prop_map(|entries| CoefficientVector::from_entries(SUPPORT, "random", entries))
}

fn discrete(x: &CoefficientVector, y: &CoefficientVector) -> Complex64 {
    let params = MeanValueParams::with_explicit_m(
        ZERO_RANGE,
        0.25,
        SUPPORT,
        x.clone(),
        y.clone(),
        "property",
    )
    .expect("params");
    discrete_sum(&params, zeros_to_100(), &PrecisionConfig::default()).expect("discrete sum")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// The zero sum is linear in each coefficient argument separately.
    #[test]
    fn discrete_sum_is_bilinear(
        x1 in sparse_vector(),
        x2 in sparse_vector(),
        y in sparse_vector(),
        a in -3.0..3.0f64,
        b in -3.0..3.0f64,
    ) {
        let combined = discrete(&x1.linear_combination(a, &x2, b), &y);
        let split = a * discrete(&x1, &y) + b * discrete(&x2, &y);
        let scale = combined.norm().max(split.norm()).max(1e-12);
        prop_assert!(
            (combined - split).norm() / scale < LINEARITY_REL_TOL,
            "first argument: {combined} vs {split}"
        );

        let combined = discrete(&y, &x1.linear_combination(a, &x2, b));
        let split = a * discrete(&y, &x1) + b * discrete(&y, &x2);
        let scale = combined.norm().max(split.norm()).max(1e-12);
        prop_assert!(
            (combined - split).norm() / scale < LINEARITY_REL_TOL,
            "second argument: {combined} vs {split}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Dirichlet evaluation is linear in the coefficients at any point.
    #[test]
    fn dirichlet_eval_is_linear(
        x1 in sparse_vector(),
        x2 in sparse_vector(),
        a in -3.0..3.0f64,
        b in -3.0..3.0f64,
        sigma in -1.0..2.0f64,
        t in -50.0..50.0f64,
    ) {
        let s = Complex64::new(sigma, t);
        let lhs = x1.linear_combination(a, &x2, b).dirichlet_eval(s);
        let rhs = a * x1.dirichlet_eval(s) + b * x2.dirichlet_eval(s);
        let scale = lhs.norm().max(rhs.norm()).max(1e-12);
        prop_assert!((lhs - rhs).norm() / scale < 1e-12, "{lhs} vs {rhs} at {s}");
    }

    /// Scaling the vector scales `sup`, `l1`, `l1_over_n` linearly and
    /// `l2_over_n` quadratically; dropping entries never increases a norm.
    #[test]
    fn norms_scale_and_shrink_with_support(
        x in sparse_vector(),
        s in prop::sample::select(vec![-2.5f64, -0.5, 0.25, 3.0]),
        keep in prop::collection::vec(any::<bool>(), 16),
    ) {
        let base = norms(&x);
        let scaled = norms(&x.scaled(s));
        let close = |got: f64, want: f64| (got - want).abs() <= SCALING_REL_TOL * want.abs().max(1e-300);
        prop_assert!(close(scaled.sup, s.abs() * base.sup));
        prop_assert!(close(scaled.l1, s.abs() * base.l1));
        prop_assert!(close(scaled.l1_over_n, s.abs() * base.l1_over_n));
        prop_assert!(close(scaled.l2_over_n, s * s * base.l2_over_n));

        let subset = CoefficientVector::from_entries(
            SUPPORT,
            "subset",
            x.iter_nonzero()
                .enumerate()
                .filter(|(i, _)| keep[i % keep.len()])
                .map(|(_, e)| e),
        );
        let sub = norms(&subset);
        prop_assert!(sub.sup <= base.sup && sub.l1 <= base.l1);
        prop_assert!(sub.l1_over_n <= base.l1_over_n && sub.l2_over_n <= base.l2_over_n);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Resonator coefficients are multiplicative on coprime support splits;
    /// extending by a prime above every existing factor reproduces the
    /// stored entry exactly, because that is how the vector is built.
    #[test]
    fn resonator_is_multiplicative_on_coprime_splits(
        lo in 2u64..20,
        width in 2u64..30,
        m in 100u64..2000,
    ) {
        let params = ResonatorParams::new(m)
            .expect("resonator params")
            .with_override(lo as f64, (lo + width) as f64);
        let f = resonator(&params);
        let entries: Vec<(u64, f64)> = f.iter_nonzero().collect();
        for &(n1, v1) in &entries {
            for &(n2, v2) in &entries {
                if n1 > 1 && n2 > 1 && arith::gcd(n1, n2) == 1 {
                    if let Some(prod) = n1.checked_mul(n2) {
                        if prod <= m {
                            let direct = f.get(prod);
                            prop_assert!(
                                (direct - v1 * v2).abs()
                                    <= MULTIPLICATIVITY_REL_TOL * direct.abs(),
                                "f({n1})f({n2}) vs f({prod})"
                            );
                        }
                    }
                }
            }
        }
        // exact reconstruction along the construction order
        for &(n, v) in &entries {
            let largest = FactoredInteger::of(n).factors().last().map_or(0, |&(p, _)| p);
            for &(p, vp) in &entries {
                if FactoredInteger::of(p).prime_power() == Some((p, 1))
                    && p > largest
                    && n * p <= m
                {
                    prop_assert_eq!(f.get(n * p), v * vp, "entry {} * prime {}", n, p);
                }
            }
        }
    }

    /// Refitting synthetic observations recovers the perturbed constants for
    /// any seed, not just the pinned one.
    #[test]
    fn synthetic_calibration_round_trip_is_seed_stable(seed in any::<u64>()) {
        let (_, _, max_dev) = synthetic_round_trip(seed).expect("synthetic round trip");
        prop_assert!(max_dev < ROUND_TRIP_TOL, "max deviation {max_dev:.3e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// The restricted-convolution decomposition matches the direct
    /// convolution oracle for random factor lists, shift values, and
    /// coprimality moduli.
    #[test]
    fn convolution_decomposition_matches_oracle(
        pick in prop::collection::vec(0usize..4, 2..4),
        d in 1u64..8,
        k in 1u64..12,
        x_bound in 200u64..800,
    ) {
        let pool = [
            ArithFn::von_mangoldt(),
            ArithFn::log_pow(1),
            ArithFn::mobius(),
            ArithFn::one(),
        ];
        let fs: Vec<ArithFn> = pick.iter().map(|&i| pool[i].clone()).collect();
        let sieve = FactorSieve::new(x_bound * d).expect("sieve");
        let check = arith::conv_decompose_check(&fs, d, k, x_bound, &sieve)
            .expect("decomposition check");
        prop_assert!(
            check.pass,
            "lhs {} vs rhs {} (residual {:.3e})",
            check.lhs,
            check.rhs,
            check.residual
        );
    }
}
