//! Entropy and mutual information of finite distributions (nats, 0 ln 0 = 0).

/// Shannon entropy of a probability vector.
pub fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&v| v > 0.0).map(|&v| v * v.ln()).sum::<f64>()
}

/// Binary entropy H_b(p).
pub fn binary_entropy(p: f64) -> f64 {
    entropy(&[p, 1.0 - p])
}

/// Row sums of a row-major `rows x cols` matrix.
pub fn row_marginal(q: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    debug_assert_eq!(q.len(), rows * cols);
    q.chunks(cols).map(|r| r.iter().sum()).collect()
}

/// Column sums of a row-major `rows x cols` matrix.
pub fn col_marginal(q: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    debug_assert_eq!(q.len(), rows * cols);
    let mut out = vec![0.0; cols];
    for r in q.chunks(cols) {
        for (o, v) in out.iter_mut().zip(r) {
            *o += v;
        }
    }
    out
}

/// I(A;B) of a row-major joint, computed as sum q ln(q / (p_a p_b)).
///
/// Summing the information density term by term keeps the result non-negative
/// up to rounding, unlike H(A) + H(B) - H(A,B) for nearly independent joints.
pub fn mutual_information(q: &[f64], rows: usize, cols: usize) -> f64 {
    let pa = row_marginal(q, rows, cols);
    let pb = col_marginal(q, rows, cols);
    let mut acc = 0.0;
    for (i, r) in q.chunks(cols).enumerate() {
        for (j, &v) in r.iter().enumerate() {
            if v > 0.0 {
                acc += v * (v / (pa[i] * pb[j])).ln();
            }
        }
    }
    acc.max(0.0)
}
