/// `gu(j) = max(1, |j|)`.
#[inline]
pub fn gu(j: i64) -> f64 {
    (j.unsigned_abs().max(1)) as f64
}

/// Clamped logarithmic decay weight `max(1, log gu(j)) / gu(j)`.
#[inline]
pub fn zeta(j: i64) -> f64 {
    let g = gu(j);
    g.ln().max(1.0) / g
}

/// Returns `(gu(j), zeta(j))`.
pub fn decay_weights(j: i64) -> (f64, f64) {
    (gu(j), zeta(j))
}
