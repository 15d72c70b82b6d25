use serde::Serialize;

/// Raw values of the lower-bound formulas, constants dropped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundEstimate {
    /// Communication lower bound `n^(1-1/k) log2(k) / 2^k`.
    pub t_lb: f64,
    /// Refutation size exponent `t_lb / (k log2(k) log2(n))`.
    pub size_exponent: f64,
    /// `1 - 2/sqrt(log2 n) - 1.5 log2(log2 n) / log2 n`, the exponent of `n`
    /// in the size bound at `k = sqrt(log2 n)`.
    pub corollary_exponent: f64,
}

/// Requires `n >= 4` and `k >= 2`.
pub fn lower_bound_estimate(n: f64, k: u32) -> BoundEstimate {
    let log_n = n.log2();
    let kf = k as f64;
    let log_k = kf.log2();
    // powers of two stay exact through exp2
    let t_lb = (log_n * (1.0 - 1.0 / kf)).exp2() * log_k / (k as f64).exp2();
    BoundEstimate {
        t_lb,
        size_exponent: t_lb / (kf * log_k * log_n),
        corollary_exponent: 1.0 - 2.0 / log_n.sqrt() - 1.5 * log_n.log2() / log_n,
    }
}
