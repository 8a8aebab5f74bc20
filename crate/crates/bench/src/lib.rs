//! Model builders shared by the benchmarks.

use lfbgw_core::{Matrix, ModelTriplet};

pub fn critical_1type() -> ModelTriplet {
    ModelTriplet::new(Matrix::from_rows(&[vec![0.5]]).unwrap(), vec![1.0], 1.0).unwrap()
}

pub fn rowsum_2type(m: f64) -> ModelTriplet {
    ModelTriplet::new(
        Matrix::from_rows(&[vec![0.1, 0.2], vec![0.3, 0.0]]).unwrap(),
        vec![0.5, 0.5],
        m,
    )
    .unwrap()
}

/// Dense random-ish substochastic model of dimension `a` (deterministic
/// entries so benchmarks are stable).
pub fn dense_model(a: usize) -> ModelTriplet {
    let rows: Vec<Vec<f64>> = (0..a)
        .map(|i| {
            let raw: Vec<f64> = (0..a)
                .map(|j| 1.0 + ((i * 31 + j * 17) % 13) as f64)
                .collect();
            let total: f64 = raw.iter().sum();
            let target = 0.55 + 0.4 * (i as f64 / a as f64);
            raw.into_iter().map(|x| x / total * target).collect()
        })
        .collect();
    let g = vec![1.0 / a as f64; a];
    ModelTriplet::new(Matrix::from_rows(&rows).unwrap(), g, 0.8).unwrap()
}
