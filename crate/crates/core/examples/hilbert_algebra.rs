//! Hilbert transform on the periodic grid: symbol, involution, projections,
//! and agreement with the principal-value quadrature.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use waterwave::random::BandLimited;
use waterwave::singular::{commutator_h, quadrature};
use waterwave::spectral::{hilbert, proj_anti, proj_holo, GridFunction};

fn main() {
    let n = 512;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let f = BandLimited::new(n, 40).mean_zero().decay(1.5).sample(&mut rng);
    let g = BandLimited::new(n, 40).decay(1.5).sample(&mut rng);

    let one = GridFunction::constant(n, Complex64::new(1.0, 0.0));
    println!("|H 1|_inf            {:.3e}", hilbert(&one).norm_linf());
    println!("|H H f - f|_inf      {:.3e}", hilbert(&hilbert(&f)).dist_linf(&f));
    println!("|P_H f + P_A f - f|  {:.3e}", (&proj_holo(&f) + &proj_anti(&f)).dist_linf(&f));
    println!("spectral vs pv sum   {:.3e}", hilbert(&f).dist_linf(&quadrature::hilbert(&f)));
    println!(
        "[f,H]g vs pv sum     {:.3e}",
        commutator_h(&f, &g).dist_linf(&quadrature::commutator_h(&f, &g))
    );
    for k in [-3i64, 0, 2] {
        let e = GridFunction::mode(n, k, Complex64::new(1.0, 0.0));
        println!("H e^(i{k:+} a) = {:+} e^(i{k:+} a)", hilbert(&e).spectrum().get(k).re);
    }
}
