//! Temporary diagnostics: drift scaling, invariance deviations, timing.
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slipgait_core::dataset::{sample_params, SamplingRanges};
use slipgait_core::identifiability::scale_invariance_check;
use slipgait_core::sim::{simulate, SimSettings};
use std::time::Instant;

fn main() {
    let ranges = SamplingRanges::default();
    let mut rng = ChaCha8Rng::seed_from_u64(123);
    let mut draws = vec![];
    while draws.len() < 6 {
        let (p, ic) = sample_params(&mut rng, &ranges);
        if simulate(&p, &ic, &SimSettings::default()).is_ok() {
            draws.push((p, ic));
        }
    }
    println!("energy drift vs internal step:");
    for (i, (p, ic)) in draws.iter().enumerate() {
        print!("draw {i}: ");
        for h in [4e-3, 2e-3, 1e-3, 5e-4, 2.5e-4] {
            let s = SimSettings { internal_h: h, ..SimSettings::default() };
            match simulate(p, ic, &s) {
                Ok(t) => print!("h={h:.0e}:{:.2e} ", t.energy_drift),
                Err(e) => print!("h={h:.0e}:FAIL({e:?}) "),
            }
        }
        println!();
    }
    println!("scale-invariance deviation (c in 0.5,1.25,2,10):");
    for (i, (p, ic)) in draws.iter().enumerate() {
        print!("draw {i}: ");
        for c in [0.5, 1.25, 2.0, 10.0] {
            match scale_invariance_check(p, ic, &SimSettings::default(), c) {
                Ok(d) => print!("c={c}:{d:.2e} "),
                Err(e) => print!("c={c}:FAIL({e:?}) "),
            }
        }
        println!();
    }
    let t0 = Instant::now();
    let mut count = 0;
    for (p, ic) in &draws {
        simulate(p, ic, &SimSettings::default()).unwrap();
        count += 1;
    }
    let per = t0.elapsed().as_secs_f64() / count as f64;
    println!("walltime per accepted 15s sim: {:.1} ms", per * 1e3);
}
