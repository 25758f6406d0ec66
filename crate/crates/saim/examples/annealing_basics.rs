//! Annealed minimization: ramp the inverse temperature linearly from 0 to
//! beta_max over the sweeps of one run and read the last sample. Higher
//! ceilings freeze the state closer to the ground state; beta_max = 0
//! never leaves the uniform distribution.
//!
//! ```bash
//! cargo run --release --example annealing_basics
//! ```

use ndarray::{Array1, Array2};
use rand::Rng;
use saim::model::{bits_to_spins, index_bits};
use saim::sampler::{anneal_run, AnnealSchedule, RngStream};

fn main() {
    // a random frustrated 10-spin system and its exhaustive ground state
    let n = 10;
    let mut seed_rng = RngStream::new(7, 0).rng();
    let mut j = Array2::zeros((n, n));
    for i in 0..n {
        for k in (i + 1)..n {
            let v = seed_rng.random_range(-1.0..1.0);
            j[[i, k]] = v;
            j[[k, i]] = v;
        }
    }
    let h = Array1::from_shape_fn(n, |_| seed_rng.random_range(-1.0..1.0));
    let coeffs = saim::model::IsingCoefficients::new(j, h, 0.0).unwrap();

    let mut ground_energy = f64::INFINITY;
    let mut ground_index = 0usize;
    for idx in 0..1usize << n {
        let e = coeffs.energy(&bits_to_spins(&index_bits(idx, n)));
        if e < ground_energy {
            ground_energy = e;
            ground_index = idx;
        }
    }
    println!("ground state energy {ground_energy:.4} (state {ground_index:#012b})");
    println!();
    println!("{:>8} {:>12} {:>14}", "beta_max", "hit rate", "mean energy");

    let runs = 2000;
    for beta_max in [0.0, 1.0, 3.0, 10.0] {
        let schedule = AnnealSchedule::new(beta_max, 300).unwrap();
        let mut rng = RngStream::new(8, 0).rng();
        let mut hits = 0u32;
        let mut energy_sum = 0.0;
        for _ in 0..runs {
            let state = anneal_run(&coeffs, &schedule, &mut rng);
            if state.index() == ground_index {
                hits += 1;
            }
            energy_sum += coeffs.energy(state.spins());
        }
        println!(
            "{beta_max:>8.1} {:>11.1}% {:>14.4}",
            100.0 * f64::from(hits) / f64::from(runs),
            energy_sum / f64::from(runs)
        );
    }
    println!();
    println!(
        "uniform baseline would hit the ground state {:.2}% of the time",
        100.0 / (1u32 << n) as f64
    );
}
