/// Backward difference `d[t] = (x[t] - x[t-1]) / dt`, with `d[0] = 0`.
pub fn derivative_scalar(xs: &[f64], dt: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len());
    if !xs.is_empty() {
        out.push(0.0);
        out.extend(xs.windows(2).map(|w| (w[1] - w[0]) / dt));
    }
    out
}

/// Per-axis backward difference of a 3-axis stream; same length as the input.
pub fn compute_derivative(stream: &[[f64; 3]], dt: f64) -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(stream.len());
    if !stream.is_empty() {
        out.push([0.0; 3]);
        out.extend(stream.windows(2).map(|w| {
            [
                (w[1][0] - w[0][0]) / dt,
                (w[1][1] - w[0][1]) / dt,
                (w[1][2] - w[0][2]) / dt,
            ]
        }));
    }
    out
}
