#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A random bounded-variation state: rough noise, a staircase, or a smooth wave with jumps.
pub fn random_bv(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = rng.gen_range(16..=64);
    match rng.gen_range(0..3) {
        0 => (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        1 => {
            let jumps = rng.gen_range(1..=6);
            let mut cuts: Vec<usize> = (0..jumps).map(|_| rng.gen_range(0..n)).collect();
            cuts.sort_unstable();
            let mut level = rng.gen_range(-1.0..1.0);
            let mut u = Vec::with_capacity(n);
            for i in 0..n {
                if cuts.contains(&i) {
                    level = rng.gen_range(-1.0..1.0);
                }
                u.push(level);
            }
            u
        }
        _ => {
            let (a, f, c) = (
                rng.gen_range(0.2..1.0),
                rng.gen_range(1..4) as f64,
                rng.gen_range(-0.5..0.5),
            );
            let cut = rng.gen_range(0.2..0.8);
            (0..n)
                .map(|i| {
                    let x = i as f64 / n as f64;
                    c + a * (std::f64::consts::TAU * f * x).sin() + if x > cut { 0.4 } else { 0.0 }
                })
                .collect()
        }
    }
}

/// Classical Lax-Wendroff for unit-speed advection.
pub fn lax_wendroff_oracle(u: &[f64], s: f64) -> Vec<f64> {
    let n = u.len();
    (0..n)
        .map(|j| {
            let (um, up) = (u[(j + n - 1) % n], u[(j + 1) % n]);
            u[j] - 0.5 * s * (up - um) + 0.5 * s * s * (up - 2.0 * u[j] + um)
        })
        .collect()
}

/// Godunov flux by exhaustive search over a fine grid of the interval.
pub fn godunov_brute(f: impl Fn(f64) -> f64, u: f64, v: f64, samples: usize) -> f64 {
    let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
    let vals = (0..=samples).map(|i| f(lo + (hi - lo) * i as f64 / samples as f64));
    if u <= v {
        vals.fold(f64::INFINITY, f64::min)
    } else {
        vals.fold(f64::NEG_INFINITY, f64::max)
    }
}

/// The staircase (-3, ..., -3, 0, 1, 4, ..., 4)·h with `pad` flat cells on each side.
pub fn staircase(h: f64, pad: usize) -> Vec<f64> {
    let mut u = vec![-3.0 * h; pad];
    u.push(0.0);
    u.push(h);
    u.extend(std::iter::repeat(4.0 * h).take(pad));
    u
}
