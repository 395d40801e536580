use std::hint::black_box;
use std::time::Instant;

/// Median wall time of `repeats` runs of `f`, after `warmup` discarded runs,
/// in nanoseconds.
pub fn median_ns<T>(warmup: usize, repeats: usize, mut f: impl FnMut() -> T) -> f64 {
    for _ in 0..warmup {
        black_box(f());
    }
    let mut samples: Vec<f64> = (0..repeats.max(1))
        .map(|_| {
            let start = Instant::now();
            black_box(f());
            start.elapsed().as_nanos() as f64
        })
        .collect();
    samples.sort_by(f64::total_cmp);
    samples[samples.len() / 2]
}
