#![allow(dead_code)]

use indiqp::instance::{Entry, Instance};
use indiqp::rng::CounterRng;

/// Four variables, star on variable 2 (1-based) with weights 1.5, 1, 0.8.
pub fn star4() -> Instance {
    let e = |i, j, v| Entry { i, j, v };
    Instance::new(
        vec![2.0; 4],
        vec![-1.3, -2.5, 4.6, -7.8],
        vec![
            e(0, 0, 3.0),
            e(1, 1, 6.0),
            e(2, 2, 3.0),
            e(3, 3, 2.0),
            e(0, 1, -1.5),
            e(1, 2, -1.0),
            e(1, 3, -0.8),
        ],
    )
    .unwrap()
}

/// Random diagonally dominant instance on an Erdos-Renyi support graph,
/// with the value distributions of the tridiagonal generator.
pub fn gen_sparse_dd(n: usize, edge_prob: f64, seed: u64) -> Instance {
    let mut rng = CounterRng::new(seed);
    let c: Vec<f64> = (0..n).map(|_| rng.uniform(-10.0, 3.0)).collect();
    let a: Vec<f64> = (0..n).map(|_| rng.uniform(0.0, 1.0)).collect();
    let mut diag = vec![0.0; n];
    let mut q = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.next_f64() < edge_prob {
                let v = rng.uniform(-2.0, 2.0);
                diag[i] += v.abs();
                diag[j] += v.abs();
                q.push(Entry { i, j, v });
            }
        }
    }
    for (i, d) in diag.iter().enumerate() {
        q.push(Entry { i, j: i, v: d + rng.uniform(0.0, 4.0) });
    }
    Instance::new(a, c, q).unwrap()
}
