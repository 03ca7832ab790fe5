#![allow(dead_code)]

use gaoi_core::markov::{validate_model, ChangeKernel, DwellKernel, DwellLaw, JointModel};
use rand::Rng;

pub fn swap(q: f64) -> JointModel {
    validate_model(
        ChangeKernel::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]),
        DwellKernel::homogeneous(DwellLaw::geometric(q), 2),
    )
    .unwrap()
}

fn random_row<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut row: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random_bool(0.2) {
                0.0
            } else {
                rng.random_range(0.05..1.0)
            }
        })
        .collect();
    if row.iter().all(|&v| v == 0.0) {
        row[rng.random_range(0..n)] = 1.0;
    }
    let sum: f64 = row.iter().sum();
    row.iter_mut().for_each(|v| *v /= sum);
    row
}

fn random_law<R: Rng>(max_prefix: usize, rng: &mut R) -> DwellLaw {
    let m = rng.random_range(0..=max_prefix);
    let prefix = (0..m)
        .map(|_| match rng.random_range(0..6) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.random_range(0.0..1.0),
        })
        .collect();
    DwellLaw::new(prefix, rng.random_range(0.2..=1.0))
}

/// Random irreducible model with alphabet `1..=4`. Every status can change
/// to its successor, so the change chain is irreducible.
pub fn random_model<R: Rng>(homogeneous: bool, max_prefix: usize, rng: &mut R) -> JointModel {
    let n = rng.random_range(1..=4);
    let rows = (0..n)
        .map(|x| {
            let mut row = random_row(n, rng);
            let succ = (x + 1) % n;
            if row[succ] == 0.0 {
                row[succ] = 0.5;
                let sum: f64 = row.iter().sum();
                row.iter_mut().for_each(|v| *v /= sum);
            }
            row
        })
        .collect();
    let dwell = if homogeneous {
        DwellKernel::homogeneous(random_law(max_prefix, rng), n)
    } else {
        DwellKernel::new((0..n).map(|_| random_law(max_prefix, rng)).collect())
    };
    validate_model(ChangeKernel::new(rows), dwell).unwrap()
}
