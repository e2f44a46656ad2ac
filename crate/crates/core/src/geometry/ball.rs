//! Constant-curvature baseline spaces: Euclidean space and the Poincare
//! ball, with distances and squared-distance gradients.

/// Euclidean distance.
pub fn euclidean_dist(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Squared Euclidean distance and its gradient with respect to `q`.
pub fn euclidean_dist_sq_grad_second(p: &[f64], q: &[f64]) -> (f64, Vec<f64>) {
    let f: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
    let grad = q.iter().zip(p).map(|(b, a)| 2.0 * (b - a)).collect();
    (f, grad)
}

/// Poincare ball distance
/// `arccosh(1 + 2 ||p - q||^2 / ((1 - ||p||^2)(1 - ||q||^2)))`.
pub fn poincare_dist(p: &[f64], q: &[f64]) -> f64 {
    let s: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
    let a = 1.0 - p.iter().map(|x| x * x).sum::<f64>();
    let b = 1.0 - q.iter().map(|x| x * x).sum::<f64>();
    let arg = 1.0 + 2.0 * s / (a * b);
    arg.max(1.0).acosh()
}

/// Squared Poincare distance and its gradient with respect to `q`.
///
/// With `u = 1 + 2s/(ab)` the gradient is
/// `2 d / sqrt(u^2 - 1) * du/dq`; the prefactor tends to 2 as the points
/// coincide, which keeps the squared distance smooth at `u = 1`.
pub fn poincare_dist_sq_grad_second(p: &[f64], q: &[f64]) -> (f64, Vec<f64>) {
    let s: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
    let a = 1.0 - p.iter().map(|x| x * x).sum::<f64>();
    let b = 1.0 - q.iter().map(|x| x * x).sum::<f64>();
    let u = 1.0 + 2.0 * s / (a * b);
    let d = u.max(1.0).acosh();
    let prefactor = if u - 1.0 < 1e-12 {
        2.0
    } else {
        2.0 * d / (u * u - 1.0).sqrt()
    };
    // du/dq = (4 / (a b^2)) ((q - p) b + s q)
    let scale = 4.0 / (a * b * b);
    let grad = q
        .iter()
        .zip(p)
        .map(|(qi, pi)| prefactor * scale * ((qi - pi) * b + s * qi))
        .collect();
    (d * d, grad)
}
