//! Property tests for the module invariants.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use radialfs_core::bump::bump;
use radialfs_core::bv::{bv_decay_check, bv_equivalence_check, bv_weighted_norm, BvProfile};
use radialfs_core::covering::{AnnularCovering, PartitionOfUnity};
use radialfs_core::decay::fit_decay_exponent;
use radialfs_core::atoms::AtomSpec;
use radialfs_core::decomposition::tb_tf_norms;
use radialfs_core::families::{make_f_j_lambda, make_phi_alpha, TestFamily};
use radialfs_core::seq::{
    quasi_triangle_constant, seq_norm_bpqd, seq_norm_bspqd, seq_norm_fpqd, seq_norm_fspqd, CoefficientGrid,
};
use radialfs_core::spaces::{in_u, in_u_t, sigma_p, sigma_pq, trace_lands_in_sprime};
use radialfs_core::trace::{extend, trace};
use radialfs_core::{weighted_lp_norm, Grid1D, RadialField, RadialProfile, SpaceParams};

fn bump_profile(c: f64, w: f64, h: f64) -> RadialProfile {
    let grid = Grid1D::uniform(h, c + w + 1.0).unwrap();
    RadialProfile::from_fn(&grid, |t| bump((t.abs() - c) / w)).unwrap()
}

fn p_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.5), Just(1.0), Just(1.5), Just(2.0), Just(4.0)]
}

fn q_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.5), Just(1.0), Just(2.0), Just(4.0), Just(f64::INFINITY)]
}

fn grid_strategy() -> impl Strategy<Value = CoefficientGrid> {
    any::<u64>().prop_map(|seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        radialfs_core::experiments::random_coefficient_grid(&mut rng)
    })
}

fn rotation(d: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    // Gram-Schmidt on a random matrix
    let mut q: Vec<Vec<f64>> = Vec::new();
    while q.len() < d {
        let mut v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for u in &q {
            let dot: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(u).for_each(|(a, b)| *a -= dot * b);
        }
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-3 {
            q.push(v.iter().map(|a| a / n).collect());
        }
    }
    q
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weighted_lp_norm_is_homogeneous(c in 0.5f64..3.0, w in 0.3f64..1.5, k in -50.0f64..50.0, p in p_strategy(), d in 2usize..=3) {
        let g = bump_profile(c, w, 1.0 / 64.0);
        let n = weighted_lp_norm(&g, p, d).unwrap();
        let nk = weighted_lp_norm(&g.scaled(k).unwrap(), p, d).unwrap();
        prop_assert!((nk - k.abs() * n).abs() <= 1e-13 * k.abs().max(1.0) * n);
    }

    #[test]
    fn radial_field_is_rotation_invariant(seed in any::<u64>(), d in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = RadialField::new(bump_profile(1.0, 1.0, 1.0 / 128.0), d).unwrap();
        let q = rotation(d, &mut rng);
        let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let qx: Vec<f64> = q.iter().map(|row| row.iter().zip(&x).map(|(a, b)| a * b).sum()).collect();
        prop_assert!((f.eval(&qx) - f.eval(&x)).abs() <= 1e-12);
    }

    #[test]
    fn sigma_p_below_sigma_pq(p in 0.1f64..10.0, q in 0.1f64..10.0, d in 1usize..=3) {
        prop_assert!(sigma_p(p, d).unwrap() <= sigma_pq(p, q, d).unwrap());
    }

    #[test]
    fn in_u_is_monotone_in_s(s in -1.0f64..3.0, ds in 0.0f64..2.0, p in p_strategy(), q in q_strategy(), f_scale in any::<bool>()) {
        let mk = |s| if f_scale { SpaceParams::f(s, p, q, 2) } else { SpaceParams::b(s, p, q, 2) };
        if in_u(&mk(s).unwrap()) {
            prop_assert!(in_u(&mk(s + ds).unwrap()));
        }
    }

    #[test]
    fn trace_predicate_monotone(s in -1.0f64..3.0, ds in 0.0f64..2.0, inv_p in 0.1f64..3.0, dinv in 0.0f64..1.0, q in q_strategy(), d in 2usize..=3) {
        // Err marks points outside the hypothesis region
        let at = |s: f64, ip: f64| trace_lands_in_sprime(&SpaceParams::b(s, 1.0 / ip, q, d).unwrap()).ok();
        if at(s, inv_p + dinv) == Some(true) {
            for other in [at(s + ds, inv_p + dinv), at(s, inv_p)].into_iter().flatten() {
                prop_assert!(other);
            }
        }
    }

    #[test]
    fn in_u_t_infinity_is_the_limit(alpha in -2.0f64..0.99, sigma in -2.0f64..3.0) {
        let big = 1e6;
        prop_assert_eq!(in_u_t(alpha, sigma, big).unwrap(), in_u_t(alpha, sigma, f64::INFINITY).unwrap());
    }

    #[test]
    fn seq_norms_are_homogeneous(c in grid_strategy(), lam in -10.0f64..10.0, s in -1.0f64..2.0, p in p_strategy(), q in q_strategy(), d in 2usize..=3) {
        let cs = c.scaled(lam);
        let pairs = [
            (seq_norm_bspqd(&c, &SpaceParams::b(s, p, q, d).unwrap()).unwrap(), seq_norm_bspqd(&cs, &SpaceParams::b(s, p, q, d).unwrap()).unwrap()),
            (seq_norm_fspqd(&c, &SpaceParams::f(s, p, q, d).unwrap()).unwrap(), seq_norm_fspqd(&cs, &SpaceParams::f(s, p, q, d).unwrap()).unwrap()),
            (seq_norm_bpqd(&c, p, q, d).unwrap(), seq_norm_bpqd(&cs, p, q, d).unwrap()),
            (seq_norm_fpqd(&c, p, q, d).unwrap(), seq_norm_fpqd(&cs, p, q, d).unwrap()),
        ];
        for (n, ns) in pairs {
            prop_assert!((ns - lam.abs() * n).abs() <= 1e-12 * lam.abs().max(1.0) * n.max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn seq_norms_quasi_triangle(a in grid_strategy(), b in grid_strategy(), s in -1.0f64..2.0, p in p_strategy(), q in q_strategy(), d in 2usize..=3) {
        let k = quasi_triangle_constant(p, q) * (1.0 + 1e-12);
        let sum = a.add(&b);
        let bs = SpaceParams::b(s, p, q, d).unwrap();
        let fs = SpaceParams::f(s, p, q, d).unwrap();
        prop_assert!(seq_norm_bspqd(&sum, &bs).unwrap() <= k * (seq_norm_bspqd(&a, &bs).unwrap() + seq_norm_bspqd(&b, &bs).unwrap()));
        prop_assert!(seq_norm_fspqd(&sum, &fs).unwrap() <= k * (seq_norm_fspqd(&a, &fs).unwrap() + seq_norm_fspqd(&b, &fs).unwrap()));
        prop_assert!(seq_norm_bpqd(&sum, p, q, d).unwrap() <= k * (seq_norm_bpqd(&a, p, q, d).unwrap() + seq_norm_bpqd(&b, p, q, d).unwrap()));
        prop_assert!(seq_norm_fpqd(&sum, p, q, d).unwrap() <= k * (seq_norm_fpqd(&a, p, q, d).unwrap() + seq_norm_fpqd(&b, p, q, d).unwrap()));
    }

    #[test]
    fn seq_norms_non_increasing_in_q(c in grid_strategy(), s in -1.0f64..2.0, p in p_strategy(), d in 2usize..=3) {
        let qs = [0.5, 1.0, 2.0, 4.0, f64::INFINITY];
        let tol = 1.0 + 1e-12;
        for w in qs.windows(2) {
            let (q0, q1) = (w[0], w[1]);
            prop_assert!(seq_norm_bspqd(&c, &SpaceParams::b(s, p, q1, d).unwrap()).unwrap() <= tol * seq_norm_bspqd(&c, &SpaceParams::b(s, p, q0, d).unwrap()).unwrap());
            prop_assert!(seq_norm_fspqd(&c, &SpaceParams::f(s, p, q1, d).unwrap()).unwrap() <= tol * seq_norm_fspqd(&c, &SpaceParams::f(s, p, q0, d).unwrap()).unwrap());
            prop_assert!(seq_norm_bpqd(&c, p, q1, d).unwrap() <= tol * seq_norm_bpqd(&c, p, q0, d).unwrap());
            prop_assert!(seq_norm_fpqd(&c, p, q1, d).unwrap() <= tol * seq_norm_fpqd(&c, p, q0, d).unwrap());
        }
    }

    #[test]
    fn truncation_never_increases(c in grid_strategy(), j0 in 0usize..5, s in -1.0f64..2.0, p in p_strategy(), q in q_strategy(), d in 2usize..=3) {
        let t = c.truncated(j0);
        let tol = 1.0 + 1e-12;
        let bs = SpaceParams::b(s, p, q, d).unwrap();
        let fs = SpaceParams::f(s, p, q, d).unwrap();
        prop_assert!(seq_norm_bspqd(&t, &bs).unwrap() <= tol * seq_norm_bspqd(&c, &bs).unwrap());
        prop_assert!(seq_norm_fspqd(&t, &fs).unwrap() <= tol * seq_norm_fspqd(&c, &fs).unwrap());
        prop_assert!(seq_norm_bpqd(&t, p, q, d).unwrap() <= tol * seq_norm_bpqd(&c, p, q, d).unwrap());
        prop_assert!(seq_norm_fpqd(&t, p, q, d).unwrap() <= tol * seq_norm_fpqd(&c, p, q, d).unwrap());
    }

    #[test]
    fn b_equals_f_at_p_equals_q(c in grid_strategy(), s in -1.0f64..2.0, p in p_strategy(), d in 2usize..=3) {
        let b = seq_norm_bspqd(&c, &SpaceParams::b(s, p, p, d).unwrap()).unwrap();
        let f = seq_norm_fspqd(&c, &SpaceParams::f(s, p, p, d).unwrap()).unwrap();
        prop_assert!((b - f).abs() <= 1e-10 * b, "b = {b}, f = {f}");
        let bp = seq_norm_bpqd(&c, p, p, d).unwrap();
        let fp = seq_norm_fpqd(&c, p, p, d).unwrap();
        prop_assert!((bp - fp).abs() <= 1e-10 * bp, "plain b = {bp}, f = {fp}");
    }

    #[test]
    fn trace_extend_round_trip(c in 0.0f64..2.0, w in 0.3f64..1.5, amp in -3.0f64..3.0, d in 2usize..=3) {
        let g = bump_profile(c, w, 1.0 / 32.0).scaled(amp).unwrap();
        let f = extend(&g, d).unwrap();
        let t = trace(&f).unwrap();
        prop_assert_eq!(t.values(), g.values());
        let f2 = extend(&t, d).unwrap();
        prop_assert_eq!(f2.profile().unwrap().values(), f.profile().unwrap().values());
    }

    #[test]
    fn families_are_even_and_self_similar(j in 1u32..8, lambda in 2.5f64..40.0, t in -50.0f64..50.0) {
        let f = make_f_j_lambda(j, lambda).unwrap();
        let f1 = make_f_j_lambda(j + 1, lambda).unwrap();
        prop_assert_eq!(f.eval(t), f.eval(-t));
        prop_assert_eq!(f1.eval(t), f.eval(2.0 * t));
        let (lo, hi) = f.support();
        if t.abs() < lo || t.abs() > hi {
            prop_assert_eq!(f.eval(t), 0.0);
        }
    }

    #[test]
    fn phi_alpha_monotone_and_supported(alpha in 0.05f64..4.0, a in 0.0f64..1.0, b in 0.0f64..1.0, out in 1.0f64..10.0) {
        let phi = make_phi_alpha(alpha).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(phi.eval(hi) <= phi.eval(lo));
        prop_assert_eq!(phi.eval(out), 0.0);
        prop_assert_eq!(phi.eval(-out), 0.0);
    }

    #[test]
    fn fit_recovers_power_laws(e in -3.0f64..0.5) {
        let grid = Grid1D::uniform(1.0 / 8.0, 80.0).unwrap();
        let g = RadialProfile::from_fn(&grid, |t| t.abs().max(1.0).powf(e)).unwrap();
        let fit = fit_decay_exponent(&g, &[8.0, 12.0, 16.0, 24.0, 32.0, 40.0]).unwrap();
        prop_assert!((fit.exponent - e).abs() < 1e-6, "{} vs {}", fit.exponent, e);
    }

    #[test]
    fn bv_norm_is_a_norm(seed in any::<u64>(), lam in -5.0f64..5.0, d in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = BvProfile::random_staircase(&mut rng, 6, 4.0, d).unwrap();
        let b = BvProfile::random_staircase(&mut rng, 6, 4.0, d).unwrap();
        let na = bv_weighted_norm(&a);
        let scaled = BvProfile::staircase(a.steps().iter().map(|&(r, v)| (r, lam * v)).collect(), d).unwrap();
        prop_assert!((bv_weighted_norm(&scaled) - lam.abs() * na).abs() <= 1e-12 * na.max(1.0) * lam.abs().max(1.0));
        let mut steps = a.steps().to_vec();
        steps.extend_from_slice(b.steps());
        let sum = BvProfile::staircase(steps, d).unwrap();
        prop_assert!(bv_weighted_norm(&sum) <= (na + bv_weighted_norm(&b)) * (1.0 + 1e-12));
    }

    #[test]
    fn bv_decay_holds_at_steps(seed in any::<u64>(), n in 1usize..12, d in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = BvProfile::random_staircase(&mut rng, n, 5.0, d).unwrap();
        let radii: Vec<f64> = g.steps().iter().map(|s| s.0).collect();
        let rep = bv_decay_check(&g, &radii).unwrap();
        prop_assert!(rep.rows.iter().all(|r| r.holds_tail && r.holds_norm));
    }

    #[test]
    fn bv_ratio_is_dilation_invariant(seed in any::<u64>(), d in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = BvProfile::random_staircase(&mut rng, 4, 3.0, d).unwrap();
        let base = bv_equivalence_check(&g).unwrap();
        for lam in [0.25, 4.0] {
            let r = bv_equivalence_check(&g.dilated(lam).unwrap()).unwrap();
            prop_assert!((r.ratio_isotropic / base.ratio_isotropic - 1.0).abs() <= 1e-6);
            prop_assert!((r.ratio / base.ratio - 1.0).abs() <= 1e-6, "λ = {lam}: {} vs {}", r.ratio, base.ratio);
        }
    }
}

#[test]
fn covering_centers_are_self_similar() {
    for d in [2, 3] {
        let c = AnnularCovering::build(d, 4, 6).unwrap();
        for j in 0..=4 {
            let s = 2f64.powi(-(j as i32));
            for k in 0..=6 {
                let scaled: Vec<Vec<f64>> = c.centers(0, k).iter().map(|x| x.iter().map(|v| v * s).collect()).collect();
                assert_eq!(c.centers(j, k), scaled);
            }
        }
    }
}

#[test]
fn partition_sums_to_one_on_random_points() {
    let c = AnnularCovering::build(2, 3, 10).unwrap();
    let pu = PartitionOfUnity::new(&c, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for j in [0usize, 3] {
        let s = 2f64.powi(-(j as i32));
        let pts: Vec<Vec<f64>> = (0..50_000)
            .map(|_| {
                let r = rng.gen_range(0.0..7.0) * s;
                let a = rng.gen_range(0.0..std::f64::consts::TAU);
                vec![r * a.cos(), r * a.sin()]
            })
            .collect();
        for (x, v) in pts.iter().zip(pu.sums(&pts, j).unwrap()) {
            assert!((v - 1.0).abs() < 1e-10, "x = {x:?}, sum = {v}");
        }
    }
}

#[test]
fn tb_equals_tf_at_p_equals_q() {
    let g = bump_profile(1.0, 1.0, 1.0 / 64.0);
    for (s, p) in [(1.0, 2.0), (0.5, 1.0)] {
        let params = SpaceParams::b(s, p, p, 2).unwrap();
        let spec = AtomSpec::minimal_even(s, p, 2).unwrap();
        let (tb, tf) = tb_tf_norms(&g, &params, &spec).unwrap();
        assert!((tb - tf).abs() <= 1e-10 * tb, "s = {s}, p = {p}: tb = {tb}, tf = {tf}");
    }
}

#[test]
fn family_descriptors_round_trip() {
    for desc in ["f_j_lambda(j=3,lambda=16)", "phi_alpha(alpha=0.5)"] {
        let f: TestFamily = desc.parse().unwrap();
        assert_eq!(f.to_string().parse::<TestFamily>().unwrap(), f);
    }
}
