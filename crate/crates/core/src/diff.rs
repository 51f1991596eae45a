//! Finite-difference stencils shared by the observables and drift builders.

/// First derivative: central differences inside, first-order one-sided at both ends.
pub fn gradient(values: &[f64], dx: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    out[0] = (values[1] - values[0]) / dx;
    out[n - 1] = (values[n - 1] - values[n - 2]) / dx;
    for i in 1..n - 1 {
        out[i] = (values[i + 1] - values[i - 1]) / (2.0 * dx);
    }
    out
}

/// Three-point Laplacian with zero Dirichlet values beyond both ends.
pub fn laplacian(values: &[f64], dx: f64) -> Vec<f64> {
    let n = values.len();
    let inv = 1.0 / (dx * dx);
    (0..n)
        .map(|i| {
            let left = if i > 0 { values[i - 1] } else { 0.0 };
            let right = if i + 1 < n { values[i + 1] } else { 0.0 };
            (left - 2.0 * values[i] + right) * inv
        })
        .collect()
}

/// Antisymmetric bilinear form a ∇b − b ∇a with the central stencil.
///
/// At the end nodes the one-sided stencil is used; this is the numerator of
/// the flux and of the real drift.
pub fn cross_gradient(a: &[f64], b: &[f64], dx: f64) -> Vec<f64> {
    let ga = gradient(a, dx);
    let gb = gradient(b, dx);
    a.iter()
        .zip(b)
        .zip(ga.iter().zip(&gb))
        .map(|((&ai, &bi), (&gai, &gbi))| ai * gbi - bi * gai)
        .collect()
}
