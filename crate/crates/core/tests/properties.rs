use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use waterwave::dynamics::{compute_a1, reverse, WaveState};
use waterwave::harness::SimConfig;
use waterwave::initial::{make_smooth_wave, mollify};
use waterwave::random::BandLimited;
use waterwave::singular::commutator_h;
use waterwave::spectral::{derivative, hilbert, poisson_extend, proj_anti, proj_holo, GridFunction};

fn sample(n: usize, kmax: usize, seed: u64, gen: impl Fn(BandLimited) -> BandLimited) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gen(BandLimited::new(n, kmax)).sample(&mut rng)
}

fn grid() -> impl Strategy<Value = (usize, usize)> {
    (4u32..=9).prop_flat_map(|p| {
        let n = 1usize << p;
        (Just(n), 1..n / 2)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hilbert_is_an_involution_on_mean_zero((n, kmax) in grid(), seed in any::<u64>()) {
        let f = sample(n, kmax, seed, |b| b.mean_zero());
        let back = hilbert(&hilbert(&f));
        prop_assert!(back.dist_linf(&f) <= 1e-12 * (1.0 + f.norm_linf()));
    }

    #[test]
    fn hilbert_annihilates_constants(p in 4u32..=10, re in -1e3..1e3f64, im in -1e3..1e3f64) {
        let c = GridFunction::constant(1 << p, Complex64::new(re, im));
        prop_assert_eq!(hilbert(&c).norm_linf(), 0.0);
    }

    #[test]
    fn projections_are_complementary_and_idempotent((n, kmax) in grid(), seed in any::<u64>()) {
        let f = sample(n, kmax, seed, |b| b.mean_zero());
        let (h, a) = (proj_holo(&f), proj_anti(&f));
        let tol = 1e-13 * (1.0 + f.norm_linf());
        prop_assert!((&h + &a).dist_linf(&f) <= tol);
        prop_assert!(proj_holo(&h).dist_linf(&h) <= tol);
        prop_assert!(proj_anti(&a).dist_linf(&a) <= tol);
        prop_assert!(proj_holo(&a).norm_linf() <= tol);
    }

    #[test]
    fn commutator_is_bilinear(
        (n, kmax) in grid(),
        seed in any::<u64>(),
        s in -3.0..3.0f64,
        t in -3.0..3.0f64,
    ) {
        let f = sample(n, kmax, seed, |b| b);
        let g = sample(n, kmax, seed ^ 1, |b| b);
        let h = sample(n, kmax, seed ^ 2, |b| b);
        let combo = &g.scale(s) + &h.scale(t);
        let lhs = commutator_h(&f, &combo);
        let rhs = &commutator_h(&f, &g).scale(s) + &commutator_h(&f, &h).scale(t);
        let tol = 1e-11 * (1.0 + f.norm_linf() * combo.norm_linf());
        prop_assert!(lhs.dist_linf(&rhs) <= tol);
        let lhs = commutator_h(&combo, &f);
        let rhs = &commutator_h(&g, &f).scale(s) + &commutator_h(&h, &f).scale(t);
        prop_assert!(lhs.dist_linf(&rhs) <= tol);
    }

    #[test]
    fn a1_is_at_least_one_for_holomorphic_velocity(
        (n, kmax) in grid(),
        seed in any::<u64>(),
        amp in 0.0..5.0f64,
    ) {
        let zt_bar = sample(n, kmax, seed, |b| b.holomorphic().mean_zero().amplitude(amp));
        let a1 = compute_a1(&zt_bar.conj(), &derivative(&zt_bar));
        prop_assert!(a1.min_re() >= 1.0 - 1e-12 * (1.0 + a1.norm_linf()));
        prop_assert!(a1.max_imag_abs() == 0.0);
    }

    #[test]
    fn mollification_is_a_semigroup(a in 0.0..0.1f64, m in 1i64..4, e1 in 0.001..0.2f64, e2 in 0.001..0.2f64) {
        let d = make_smooth_wave(128, a, m, 1.0).unwrap();
        let twice = mollify(&mollify(&d, e1).unwrap(), e2).unwrap();
        let once = mollify(&d, e1 + e2).unwrap();
        prop_assert!(twice.p0.dist_linf(&once.p0) <= 1e-14);
        prop_assert!(twice.zt0.dist_linf(&once.zt0) <= 1e-14);
        prop_assert!((twice.epsilon - once.epsilon).abs() <= 1e-15);
    }

    #[test]
    fn poisson_extension_composes((n, kmax) in grid(), seed in any::<u64>(), y1 in -0.5..0.0f64, y2 in -0.5..0.0f64) {
        let f = sample(n, kmax.min(12), seed, |b| b.holomorphic().decay(2.0));
        let twice = poisson_extend(&poisson_extend(&f, y1).unwrap(), y2).unwrap();
        let once = poisson_extend(&f, y1 + y2).unwrap();
        prop_assert!(twice.dist_linf(&once) <= 1e-12 * (1.0 + once.norm_linf()));
    }

    #[test]
    fn time_reversal_is_an_involution((n, kmax) in grid(), seed in any::<u64>()) {
        let p = sample(n, kmax, seed, |b| b.holomorphic().amplitude(0.1));
        let zt = sample(n, kmax, seed ^ 3, |b| b.holomorphic().amplitude(0.1)).conj();
        let s = WaveState::new(0.3, p, zt);
        let back = reverse(&reverse(&s));
        prop_assert_eq!(back.p().values(), s.p().values());
        prop_assert_eq!(back.zt().values(), s.zt().values());
    }

    #[test]
    fn config_snapshot_round_trips(p in 4u32..=12, cfl in 0.05..1.0f64, a in 0.0..0.1f64, m in 1i64..5, seed in any::<u64>()) {
        let text = format!(
            "[grid]\nn = {}\n[time]\nT = 0.5\ncfl = {cfl}\n[data]\nfamily = smooth_wave\na = {a}\nm = {m}\n[run]\nseed = {seed}\n",
            1usize << p
        );
        let c = SimConfig::from_text(&text, &[]).unwrap();
        let again = SimConfig::from_text(&c.to_ini(), &[]).unwrap();
        prop_assert_eq!(&again, &c);
        prop_assert_eq!(again.hash(), c.hash());
    }
}
