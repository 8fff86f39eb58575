//! Scratch diagnostic: full acceptance-style batch dry run.

use bodyfit::anthropometry::KEY_SUBSET;
use bodyfit::experiment::{run_batch, BatchConfig};
use bodyfit::synthetic::build_synthetic_model;
use std::time::Instant;

fn main() {
    let model = build_synthetic_model(7, 1200).unwrap();
    let cfg = BatchConfig {
        eval_width: 640,
        eval_height: 480,
        ..BatchConfig::default()
    };
    let t0 = Instant::now();
    let out = run_batch(&model, &cfg).unwrap();
    println!("batch took {:.1}s", t0.elapsed().as_secs_f64());
    let mut pass = 0;
    for (i, s) in out.subjects.iter().enumerate() {
        let worst = KEY_SUBSET
            .iter()
            .map(|&k| (s.truth_measurements[k] - s.fit_measurements[k]).abs())
            .fold(0.0f64, f64::max);
        let ok = s.key_error <= 10.0;
        pass += ok as usize;
        println!(
            "subject {i}: key err {:7.2} mm  worst {:7.2}  cost {:.4}  {}",
            s.key_error,
            worst,
            s.result.cost,
            if ok { "PASS" } else { "fail" }
        );
    }
    println!("mean key error {:.2} mm,  {}/10 subjects pass", out.stats.key_mean, pass);
    let first = out.convergence[0];
    let last = *out.convergence.last().unwrap();
    println!(
        "convergence: {:.2} -> {:.2} mm (ratio {:.3})",
        first,
        last,
        last / first
    );
}
