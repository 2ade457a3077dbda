//! Flat space `R^n`: exp is addition, log is subtraction, transport is the identity.

pub(super) fn exp(p: &[f64], v: &[f64]) -> Vec<f64> {
    p.iter().zip(v).map(|(a, b)| a + b).collect()
}

pub(super) fn log(p: &[f64], q: &[f64]) -> Vec<f64> {
    q.iter().zip(p).map(|(a, b)| a - b).collect()
}

pub(super) fn dist(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

pub(super) fn inner(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}
