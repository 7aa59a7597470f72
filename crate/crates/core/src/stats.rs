//! Small numeric kernels shared across analyses.
//!
//! Generic over the scalar type so the same code serves `f32` and `f64`;
//! the rest of the crate instantiates them with [`crate::Scalar`].

use num_traits::Float;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("population values must be strictly positive")]
    NonPositiveValue,
    #[error("need at least {minimum} data points, got {actual}")]
    TooFewPoints { minimum: usize, actual: usize },
    #[error("correlation undefined: zero variance on one axis")]
    ZeroVariance,
    #[error("series length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}

/// Rank (1-indexed) of the item at fraction `p` of a collection of `n`,
/// i.e. ceil(p * n) clamped to `[1, n]`.
///
/// The product is computed with a small downward guard so that values like
/// `0.1 * 1000`, which lands at `100.00000000000001` in binary floating
/// point, round to the exact rank instead of the next one. `p = 0` maps to
/// rank 1.
pub fn nearest_rank(p: f64, n: usize) -> usize {
    assert!(n > 0, "nearest_rank over an empty collection");
    assert!((0.0..=1.0).contains(&p), "fraction out of range: {p}");
    let k = (p * n as f64 - 1e-9).ceil() as i64;
    k.clamp(1, n as i64) as usize
}

/// Arithmetic mean and population standard deviation.
///
/// Two-pass: mean first, then the mean of squared deviations.
pub fn mean_std<F: Float>(values: &[F]) -> (F, F) {
    if values.is_empty() {
        return (F::zero(), F::zero());
    }
    let n = F::from(values.len()).unwrap();
    let mean = values.iter().fold(F::zero(), |acc, &v| acc + v) / n;
    let var = values
        .iter()
        .fold(F::zero(), |acc, &v| acc + (v - mean) * (v - mean))
        / n;
    (mean, var.sqrt())
}

/// Pearson product-moment correlation of the natural logarithms of the
/// paired values.
///
/// Both coordinates must be strictly positive; at least two pairs are
/// required and neither log-axis may be constant.
pub fn pearson_log_correlation<F: Float>(pairs: &[(F, F)]) -> Result<F, StatsError> {
    if pairs.len() < 2 {
        return Err(StatsError::TooFewPoints {
            minimum: 2,
            actual: pairs.len(),
        });
    }
    if pairs.iter().any(|&(x, y)| x <= F::zero() || y <= F::zero()) {
        return Err(StatsError::NonPositiveValue);
    }
    let logs: Vec<(F, F)> = pairs.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = F::from(logs.len()).unwrap();
    let mean_x = logs.iter().fold(F::zero(), |a, &(x, _)| a + x) / n;
    let mean_y = logs.iter().fold(F::zero(), |a, &(_, y)| a + y) / n;
    let mut sxx = F::zero();
    let mut syy = F::zero();
    let mut sxy = F::zero();
    for &(x, y) in &logs {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
        sxy = sxy + dx * dy;
    }
    if sxx == F::zero() || syy == F::zero() {
        return Err(StatsError::ZeroVariance);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_rank_basics() {
        assert_eq!(nearest_rank(0.0, 10), 1);
        assert_eq!(nearest_rank(1.0, 10), 10);
        assert_eq!(nearest_rank(0.5, 10), 5);
        assert_eq!(nearest_rank(0.001, 5), 1);
        assert_eq!(nearest_rank(0.001, 10_000), 10);
    }

    #[test]
    fn nearest_rank_survives_binary_rounding() {
        // 0.1 * 1000 and 0.3 * 10 are not exact in f64.
        assert_eq!(nearest_rank(0.1, 1000), 100);
        assert_eq!(nearest_rank(0.3, 10), 3);
        assert_eq!(nearest_rank(0.7, 10), 7);
    }

    #[test]
    fn mean_std_hand_values() {
        let (m, s) = mean_std(&[1.0f64, 0.0]);
        assert_eq!(m, 0.5);
        assert_eq!(s, 0.5);
        let (m, s) = mean_std(&[2.0f64, 2.0, 2.0]);
        assert_eq!(m, 2.0);
        assert_eq!(s, 0.0);
    }

    #[test]
    fn pearson_exact_log_linear() {
        let pairs: Vec<(f64, f64)> = [2.0f64, 4.0, 8.0, 16.0].iter().map(|&a| (a, a * a)).collect();
        let r = pearson_log_correlation(&pairs).unwrap();
        assert!((r - 1.0).abs() < 1e-12, "r = {r}");

        let inv: Vec<(f64, f64)> = [2.0f64, 4.0, 8.0, 16.0].iter().map(|&a| (a, 1.0 / a)).collect();
        let r = pearson_log_correlation(&inv).unwrap();
        assert!((r + 1.0).abs() < 1e-12, "r = {r}");
    }

    #[test]
    fn pearson_rejects_bad_input() {
        assert_eq!(
            pearson_log_correlation(&[(1.0f64, 1.0)]),
            Err(StatsError::TooFewPoints { minimum: 2, actual: 1 })
        );
        assert_eq!(
            pearson_log_correlation(&[(1.0f64, 1.0), (-2.0, 3.0)]),
            Err(StatsError::NonPositiveValue)
        );
        assert_eq!(
            pearson_log_correlation(&[(5.0f64, 1.0), (5.0, 3.0)]),
            Err(StatsError::ZeroVariance)
        );
    }

    #[test]
    fn pearson_works_in_f32_too() {
        let pairs: Vec<(f32, f32)> = vec![(2.0, 4.0), (4.0, 16.0), (8.0, 64.0)];
        let r = pearson_log_correlation(&pairs).unwrap();
        assert!((r - 1.0).abs() < 1e-5, "r = {r}");
    }
}
