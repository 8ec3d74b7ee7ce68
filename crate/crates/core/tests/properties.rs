//! Property tests: structural invariants that must hold for arbitrary
//! admissible inputs, not just the fixtures the unit tests pin down.

use gausslab_core::cm::{self, CMElement, CMModel};
use gausslab_core::haar::{basis_eval, BasisFamily, HaarIndex};
use gausslab_core::kernels::{kernel_eval, KernelSpec, PathSample};
use gausslab_core::stats::pow2_half;
use gausslab_core::{ChaosExpansion, MultiIndex, RandomStream, TimeGrid};
use proptest::prelude::*;

fn grid(levels: u32) -> TimeGrid {
    TimeGrid::new(levels).unwrap()
}

fn scalar_kernel() -> impl Strategy<Value = KernelSpec> {
    prop_oneof![
        Just(KernelSpec::BrownianMotion),
        (0.1f64..3.0).prop_map(|sigma| KernelSpec::OrnsteinUhlenbeck { sigma }),
        (0.05f64..=0.95).prop_map(|hurst| KernelSpec::FractionalBrownianMotion { hurst }),
        Just(KernelSpec::BrownianBridge),
    ]
}

fn dyadic_time(levels: u32) -> impl Strategy<Value = f64> {
    (0..=(1usize << levels)).prop_map(move |j| j as f64 / (1u64 << levels) as f64)
}

fn hdot_vec(cells: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, cells)
}

fn cm_model() -> impl Strategy<Value = CMModel> {
    prop_oneof![
        Just(CMModel::Classical),
        (0.2f64..2.0).prop_map(|sigma| CMModel::OrnsteinUhlenbeck { sigma }),
        Just(CMModel::Bridge),
    ]
}

proptest! {
    /// a(s,t) = a(t,s) bit for bit: both orders run the same min/max
    /// reductions, so no rounding asymmetry is tolerated.
    #[test]
    fn kernels_are_symmetric(kernel in scalar_kernel(), s in dyadic_time(8), t in dyadic_time(8)) {
        prop_assert_eq!(
            kernel_eval(kernel, s, t).unwrap().to_bits(),
            kernel_eval(kernel, t, s).unwrap().to_bits()
        );
    }

    /// a(t,t) >= 0 and the 2x2 minor a(s,s)a(t,t) - a(s,t)^2 is nonnegative
    /// up to roundoff: pointwise positive semidefiniteness.
    #[test]
    fn kernels_are_positive_semidefinite_pointwise(
        kernel in scalar_kernel(),
        s in dyadic_time(8),
        t in dyadic_time(8),
    ) {
        let ass = kernel_eval(kernel, s, s).unwrap();
        let att = kernel_eval(kernel, t, t).unwrap();
        let ast = kernel_eval(kernel, s, t).unwrap();
        prop_assert!(ass >= 0.0 && att >= 0.0);
        prop_assert!(ast * ast <= ass * att + 1e-12);
    }

    /// The Cameron-Martin inner product is symmetric bit for bit: each cell
    /// contributes a product of the same two factors in either order.
    #[test]
    fn cm_inner_is_symmetric(
        model in cm_model(),
        a in hdot_vec(16),
        b in hdot_vec(16),
    ) {
        let g = grid(4);
        let h1 = CMElement::new(g, a, model).unwrap();
        let h2 = CMElement::new(g, b, model).unwrap();
        prop_assert_eq!(
            cm::cm_inner(&h1, &h2).unwrap().to_bits(),
            cm::cm_inner(&h2, &h1).unwrap().to_bits()
        );
    }

    /// Bilinearity: <a h1 + h2, h3> = a <h1,h3> + <h2,h3> to roundoff.
    #[test]
    fn cm_inner_is_bilinear(
        model in cm_model(),
        a in -2.0f64..2.0,
        x in hdot_vec(16),
        y in hdot_vec(16),
        z in hdot_vec(16),
    ) {
        let g = grid(4);
        let combo: Vec<f64> = x.iter().zip(y.iter()).map(|(u, v)| a * u + v).collect();
        let h1 = CMElement::new(g, x, model).unwrap();
        let h2 = CMElement::new(g, y, model).unwrap();
        let h3 = CMElement::new(g, z, model).unwrap();
        let hc = CMElement::new(g, combo, model).unwrap();
        let lhs = cm::cm_inner(&hc, &h3).unwrap();
        let rhs = a * cm::cm_inner(&h1, &h3).unwrap() + cm::cm_inner(&h2, &h3).unwrap();
        let scale = 1.0 + lhs.abs().max(rhs.abs());
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
    }

    /// Cauchy-Schwarz with a roundoff allowance.
    #[test]
    fn cm_inner_satisfies_cauchy_schwarz(
        model in cm_model(),
        x in hdot_vec(16),
        y in hdot_vec(16),
    ) {
        let g = grid(4);
        let h1 = CMElement::new(g, x, model).unwrap();
        let h2 = CMElement::new(g, y, model).unwrap();
        let inner = cm::cm_inner(&h1, &h2).unwrap();
        let n1 = cm::cm_inner(&h1, &h1).unwrap();
        let n2 = cm::cm_inner(&h2, &h2).unwrap();
        prop_assert!(inner * inner <= n1 * n2 * (1.0 + 1e-12) + 1e-15);
    }

    /// The Wiener integral evaluated by summation by parts agrees with the
    /// naive increment sum for arbitrary derivative samples, and telescopes
    /// exactly when the derivative is constant.
    #[test]
    fn wiener_integral_matches_the_increment_sum(
        hdot in hdot_vec(32),
        seed in 0u64..1000,
    ) {
        let g = grid(5);
        let paths = gausslab_core::kernels::sample_paths(
            KernelSpec::BrownianMotion, g, 1, RandomStream::new(seed, 9),
        ).unwrap();
        let w = paths[0].values();
        let h = CMElement::new(g, hdot.clone(), CMModel::Classical).unwrap();
        let fast = cm::wiener_integral(&h, &paths[0]).unwrap();
        let naive: f64 = hdot.iter().enumerate().map(|(j, d)| d * (w[j + 1] - w[j])).sum();
        let scale = 1.0 + naive.abs();
        prop_assert!((fast - naive).abs() <= 1e-12 * scale);

        let c = hdot[0];
        let constant = CMElement::new(g, vec![c; g.cells()], CMModel::Classical).unwrap();
        let telescoped = cm::wiener_integral(&constant, &paths[0]).unwrap();
        prop_assert_eq!(telescoped.to_bits(), (c * (w[w.len() - 1] - w[0])).to_bits());
    }

    /// Translating by h and then by its negation restores the path to
    /// floating-point accuracy.
    #[test]
    fn translation_by_h_then_minus_h_is_the_identity(
        hdot in hdot_vec(32),
        seed in 0u64..1000,
    ) {
        let g = grid(5);
        let path = gausslab_core::kernels::sample_paths(
            KernelSpec::BrownianMotion, g, 1, RandomStream::new(seed, 10),
        ).unwrap().remove(0);
        let h = CMElement::new(g, hdot.clone(), CMModel::Classical).unwrap();
        let neg = CMElement::new(g, hdot.iter().map(|d| -d).collect(), CMModel::Classical).unwrap();
        let round_trip = neg.translate(&h.translate(&path).unwrap()).unwrap();
        for (a, b) in round_trip.values().iter().zip(path.values().iter()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    /// Schauder tents at one level have disjoint interiors: at the apex of
    /// tent k every other tent of that level vanishes exactly, so the value
    /// of a level combination there is just that tent's own contribution.
    #[test]
    fn schauder_tents_at_a_level_have_disjoint_supports(
        level in 1u32..6,
        coeffs in prop::collection::vec(-3.0f64..3.0, 1..16),
    ) {
        let positions: Vec<u32> = (0..1u32 << level).filter(|p| p % 2 == 1).collect();
        let used = positions.len().min(coeffs.len());
        for (i, &k) in positions[..used].iter().enumerate() {
            let apex = k as f64 / (1u64 << level) as f64;
            let mut combined = 0.0;
            for (j, &pos) in positions[..used].iter().enumerate() {
                let idx = HaarIndex::Tent { level, position: pos };
                combined += coeffs[j] * basis_eval(idx, BasisFamily::Schauder, apex).unwrap();
                if j != i {
                    prop_assert_eq!(
                        basis_eval(idx, BasisFamily::Schauder, apex).unwrap(),
                        0.0
                    );
                }
            }
            let own = coeffs[i]
                * basis_eval(
                    HaarIndex::Tent { level, position: k },
                    BasisFamily::Schauder,
                    apex,
                )
                .unwrap();
            prop_assert_eq!(combined.to_bits(), own.to_bits());
            prop_assert_eq!(own.abs().to_bits(), (coeffs[i].abs() * pow2_half(-(level as i32 + 1))).to_bits());
        }
    }

    /// Haar step functions at one level are L2-orthonormal against each
    /// other by direct dyadic integration.
    #[test]
    fn haar_functions_are_orthonormal_within_a_level(level in 1u32..5) {
        let m = 10u32;
        let n = 1usize << m;
        let positions: Vec<u32> = (0..1u32 << level).filter(|p| p % 2 == 1).collect();
        for &k1 in &positions {
            for &k2 in &positions {
                let f1 = HaarIndex::Tent { level, position: k1 };
                let f2 = HaarIndex::Tent { level, position: k2 };
                let mut acc = 0.0;
                for j in 0..n {
                    let t = (j as f64 + 0.5) / n as f64;
                    acc += basis_eval(f1, BasisFamily::Haar, t).unwrap()
                        * basis_eval(f2, BasisFamily::Haar, t).unwrap();
                }
                acc /= n as f64;
                let want = if k1 == k2 { 1.0 } else { 0.0 };
                prop_assert!((acc - want).abs() <= 1e-9, "<f_{k1}, f_{k2}> = {acc}");
            }
        }
    }

    /// Serialization round-trip: Display then FromStr reproduces every term
    /// of a random expansion bit for bit.
    #[test]
    fn chaos_expansions_round_trip_through_text(
        seed in 0u64..2000,
        terms in 1usize..8,
    ) {
        let f = gausslab_core::ou::random_expansion(4, 6, terms, &RandomStream::new(seed, 11))
            .unwrap();
        let text = f.to_string();
        let parsed: ChaosExpansion = text.parse().unwrap();
        prop_assert_eq!(parsed.len(), f.len());
        for (index, coeff) in f.terms() {
            let got = parsed.coefficient(index);
            prop_assert_eq!(got.to_bits(), coeff.to_bits());
        }
    }

    /// Multi-index display parses back inside an expansion even for the
    /// empty index and repeated factors.
    #[test]
    fn multi_indices_round_trip_inside_expansions(
        n1 in 0u32..5,
        i2 in 2u32..6,
        n2 in 1u32..4,
        coeff in -4.0f64..4.0,
    ) {
        prop_assume!(coeff != 0.0);
        let pairs: Vec<(u32, u32)> = [(1u32, n1), (i2, n2)]
            .into_iter()
            .filter(|&(_, n)| n > 0)
            .collect();
        let index = if pairs.is_empty() {
            MultiIndex::empty()
        } else {
            MultiIndex::new(&pairs).unwrap()
        };
        let mut f = ChaosExpansion::new(12);
        f.add_term(index.clone(), coeff).unwrap();
        let parsed: ChaosExpansion = f.to_string().parse().unwrap();
        prop_assert_eq!(parsed.coefficient(&index).to_bits(), coeff.to_bits());
    }

    /// Grid nodes and node lookup are inverse to one another, and nodes are
    /// exact dyadics.
    #[test]
    fn grid_node_lookup_round_trips(levels in 0u32..11, frac in 0.0f64..=1.0) {
        let g = grid(levels);
        let j = ((g.len() - 1) as f64 * frac).round() as usize;
        let t = g.node(j);
        prop_assert_eq!(g.node_index(t), Some(j));
        prop_assert_eq!((t * g.cells() as f64).to_bits(), (j as f64).to_bits());
    }

    /// Cylinder measures multiply over product regions, are monotone in the
    /// region, and complementary intervals sum to one.
    #[test]
    fn cylinder_measure_is_a_product_of_interval_masses(
        a in -3.0f64..3.0,
        width in 0.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        use gausslab_core::cylinder::{cylinder_measure, CylinderSetSpec};
        let g = grid(4);
        let unit = CMElement::new(g, vec![1.0; g.cells()], CMModel::Classical).unwrap();
        let one = |lo: f64, hi: f64| {
            CylinderSetSpec::new(vec![unit.clone()], vec![(lo, hi)]).map(|s| cylinder_measure(&s))
        };
        let m_left = one(f64::NEG_INFINITY.max(-30.0), b).unwrap();
        let m_right = one(b, 30.0).unwrap();
        prop_assert!((m_left + m_right - 1.0).abs() <= 1e-12);

        let m1 = one(a, a + width).unwrap();
        let m2 = one(a, a + width + 0.5).unwrap();
        prop_assert!(m1 <= m2 + 1e-15);
        prop_assert!((0.0..=1.0).contains(&m1));
    }

    /// pow2_half(2k) is exactly 2^k; pow2_half is multiplicative on even
    /// splits up to one ulp.
    #[test]
    fn pow2_half_is_exact_on_even_arguments(k in -30i32..30) {
        prop_assert_eq!(pow2_half(2 * k).to_bits(), (2.0f64).powi(k).to_bits());
        let odd = pow2_half(2 * k + 1);
        let expected = std::f64::consts::SQRT_2 * (2.0f64).powi(k);
        prop_assert!((odd - expected).abs() <= expected.abs() * 1e-15);
    }

    /// Raising and then lowering a coordinate of a multi-index restores it.
    #[test]
    fn multi_index_raise_lower_round_trips(
        i in 1u32..6,
        n in 0u32..4,
        j in 1u32..6,
    ) {
        let base = if n == 0 {
            MultiIndex::empty()
        } else {
            MultiIndex::new(&[(i, n)]).unwrap()
        };
        let raised = base.raised(j).unwrap();
        prop_assert_eq!(raised.degree(), base.degree() + 1);
        let lowered = raised.lowered(j).expect("coordinate j was just raised");
        prop_assert_eq!(lowered, base);
    }

    /// Paths produced by the sampler always start at zero for kernels with
    /// a(0,0) = 0, and the bridge also ends at zero, exactly.
    #[test]
    fn degenerate_nodes_are_exact_zeros(seed in 0u64..500) {
        let g = grid(5);
        for kernel in [
            KernelSpec::BrownianMotion,
            KernelSpec::OrnsteinUhlenbeck { sigma: 1.0 },
            KernelSpec::FractionalBrownianMotion { hurst: 0.3 },
            KernelSpec::BrownianBridge,
        ] {
            let p: PathSample = gausslab_core::kernels::sample_paths(
                kernel, g, 1, RandomStream::new(seed, 12),
            ).unwrap().remove(0);
            prop_assert_eq!(p.values()[0].to_bits(), 0.0f64.to_bits());
            if kernel == KernelSpec::BrownianBridge {
                prop_assert_eq!(p.terminal().to_bits(), 0.0f64.to_bits());
            }
        }
    }

    /// Payoffs are nonnegative whenever their definitions promise it, and
    /// the lookback payoff is bounded by the sup-norm spread.
    #[test]
    fn payoff_evaluations_respect_their_bounds(
        seed in 0u64..500,
        strike in -2.0f64..2.0,
    ) {
        use gausslab_core::clark_ocone::PayoffSpec;
        let g = grid(5);
        let p = gausslab_core::kernels::sample_paths(
            KernelSpec::BrownianMotion, g, 1, RandomStream::new(seed, 13),
        ).unwrap().remove(0);
        let call = PayoffSpec::CallOnBM { strike }.evaluate(&p);
        prop_assert!(call >= 0.0);
        prop_assert!(call >= p.terminal() - strike);
        let lb = PayoffSpec::LookbackFloating.evaluate(&p);
        prop_assert!(lb >= 0.0 && lb <= 2.0 * p.sup_norm());
        let gbm = PayoffSpec::CallOnGBM { strike: strike.abs() }.evaluate(&p);
        prop_assert!(gbm >= 0.0);
    }
}
