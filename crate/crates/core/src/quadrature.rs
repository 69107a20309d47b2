//! Composite trapezoid rules on uniform grids.

use nalgebra::DMatrix;

/// Trapezoid weights (without the spacing factor) for `n` samples.
pub fn trapezoid_weights(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n)
            .map(|i| if i == 0 || i + 1 == n { 0.5 } else { 1.0 })
            .collect(),
    }
}

/// ∫ f dx for samples spaced `h` apart.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    let w = trapezoid_weights(values.len());
    values.iter().zip(&w).map(|(v, w)| v * w).sum::<f64>() * h
}

/// ∬ f over a rectangular grid with row spacing `h_row` and column spacing `h_col`.
pub fn trapezoid_2d(values: &DMatrix<f64>, h_row: f64, h_col: f64) -> f64 {
    let wr = trapezoid_weights(values.nrows());
    let wc = trapezoid_weights(values.ncols());
    let mut acc = 0.0;
    for (j, wj) in wc.iter().enumerate() {
        let mut col = 0.0;
        for (i, wi) in wr.iter().enumerate() {
            col += wi * values[(i, j)];
        }
        acc += wj * col;
    }
    acc * h_row * h_col
}
