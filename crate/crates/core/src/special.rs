//! Log-space factorials and Poisson tails.

/// `ln(n!)`
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        0.0
    } else {
        libm::lgamma(n as f64 + 1.0)
    }
}

/// `ln C(n, k)`
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Poisson probability mass `e^{-mean} mean^n / n!`.
pub fn poisson_pmf(mean: f64, n: u64) -> f64 {
    if mean == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    libm::exp(-mean + n as f64 * libm::log(mean) - ln_factorial(n))
}

/// Upper tail `P(X >= from)` of a Poisson variable, summed directly so that
/// tiny tails keep full relative precision.
pub fn poisson_upper_tail(mean: f64, from: u64) -> f64 {
    if mean == 0.0 {
        return if from == 0 { 1.0 } else { 0.0 };
    }
    // terms decrease geometrically once n > mean; stop when they no longer
    // change the running sum
    let mut sum = 0.0;
    let mut n = from;
    loop {
        let term = poisson_pmf(mean, n);
        sum += term;
        if n as f64 > mean && term <= sum * 1e-18 {
            break;
        }
        if term == 0.0 && n as f64 > mean {
            break;
        }
        n += 1;
    }
    sum
}
