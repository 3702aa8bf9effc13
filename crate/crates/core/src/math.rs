/// Numerically stable logistic function.
pub fn logistic(x: f64) -> f64 {
    logistic_pair(x).0
}

/// Returns `(σ(x), σ(-x))` with the two components summing to exactly 1.
///
/// The larger component is computed directly and the smaller one as its
/// complement, which is exact in binary floating point for values in [0.5, 1].
pub fn logistic_pair(x: f64) -> (f64, f64) {
    if x >= 0.0 {
        let p = 1.0 / (1.0 + (-x).exp());
        (p, 1.0 - p)
    } else {
        let q = 1.0 / (1.0 + x.exp());
        (1.0 - q, q)
    }
}

/// Derivative of the logistic, σ(x)(1 − σ(x)).
pub fn logistic_grad(x: f64) -> f64 {
    let (p, q) = logistic_pair(x);
    p * q
}
