//! Difference stencils and quadrature shared by the curve geometry and the
//! energy functionals.

/// Second-order derivative samples on a uniform grid: central differences in
/// the interior, second-order one-sided stencils at the endpoints.
pub fn derivative_second_order(values: &[f64], h: f64) -> Vec<f64> {
    let m = values.len();
    assert!(m >= 3, "stencil needs at least 3 samples");
    let mut d = Vec::with_capacity(m);
    let inv2h = 1.0 / (2.0 * h);
    d.push((-3.0 * values[0] + 4.0 * values[1] - values[2]) * inv2h);
    for j in 1..m - 1 {
        d.push((values[j + 1] - values[j - 1]) * inv2h);
    }
    d.push((3.0 * values[m - 1] - 4.0 * values[m - 2] + values[m - 3]) * inv2h);
    d
}

/// Trapezoid-rule weights on a uniform grid of `m` points with spacing `h`.
pub fn trapezoid_weights(m: usize, h: f64) -> Vec<f64> {
    assert!(m >= 2);
    let mut w = vec![h; m];
    w[0] = 0.5 * h;
    w[m - 1] = 0.5 * h;
    w
}

/// Trapezoid-rule integral of uniformly spaced samples.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    let m = values.len();
    assert!(m >= 2);
    let interior: f64 = values[1..m - 1].iter().sum();
    h * (0.5 * (values[0] + values[m - 1]) + interior)
}
