//! Gauss-Legendre quadrature nodes and weights.

use crate::real::Real;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
/// Nodes are computed in f64 by Newton iteration on P_n and lifted to `R`.
pub fn gauss_legendre<R: Real>(n: usize) -> (Vec<R>, Vec<R>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-style initial guess for the i-th positive root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P_n'(x).
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (
        nodes.into_iter().map(R::of).collect(),
        weights.into_iter().map(R::of).collect(),
    )
}

/// Integrate `f` over [a, b] with the n-point Gauss-Legendre rule.
pub fn gauss_legendre_integrate<R: Real>(f: impl Fn(R) -> R, a: R, b: R, n: usize) -> R {
    let (nodes, weights) = gauss_legendre::<R>(n);
    let mid = (a + b) * R::half();
    let halfspan = (b - a) * R::half();
    nodes
        .iter()
        .zip(weights.iter())
        .map(|(&x, &w)| w * f(mid + halfspan * x))
        .sum::<R>()
        * halfspan
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 16, 64] {
            let (_, w) = gauss_legendre::<f64>(n);
            let sum: f64 = w.iter().sum();
            assert!((sum - 2.0).abs() < 1e-13, "n = {}", n);
        }
    }

    #[test]
    fn exact_on_high_degree_polynomial() {
        // 64-node rule is exact up to degree 127; check x^10 on [0, 2].
        let val = gauss_legendre_integrate(|x: f64| x.powi(10), 0.0, 2.0, 64);
        let expect = 2048.0 / 11.0;
        assert!((val - expect).abs() < 1e-10, "val = {val}, expect = {expect}");
    }

    #[test]
    fn transcendental_integrand() {
        let val = gauss_legendre_integrate(|x: f64| x.exp(), 0.0, 1.0, 64);
        assert!((val - (std::f64::consts::E - 1.0)).abs() < 1e-13);
    }
}
