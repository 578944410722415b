//! Standard evaluation report: RMSE, R^2, MAPE, MBE, and shade accuracy.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Evaluation metrics over a prediction set.
///
/// Sign convention for the bias: MBE averages (actual - predicted), so a
/// positive value means systematic underprediction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsReport {
    pub rmse: f64,
    /// None when var(actuals) is zero (undefined).
    pub r2: Option<f64>,
    pub mape: f64,
    pub mbe: f64,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shade_accuracy: Option<f64>,
    /// Rows excluded from MAPE by the near-zero actual guard.
    pub mape_excluded: usize,
}

/// Actual values below this magnitude (degrees C) are excluded from MAPE.
pub const MAPE_GUARD: f64 = 0.1;

/// Computes RMSE, R^2, MAPE and MBE over paired actuals/predictions.
pub fn compute_metrics(actual: &[f64], predicted: &[f64]) -> Result<MetricsReport> {
    if actual.len() != predicted.len() {
        return Err(CoreError::LengthMismatch {
            left: actual.len(),
            right: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(CoreError::InvalidInput("empty metric input".into()));
    }
    let n = actual.len();
    let nf = n as f64;

    let mut sq_err = 0.0;
    let mut bias = 0.0;
    let mut mape_sum = 0.0;
    let mut mape_n = 0usize;
    for (&y, &yhat) in actual.iter().zip(predicted) {
        let e = y - yhat;
        sq_err += e * e;
        bias += e;
        if y.abs() >= MAPE_GUARD {
            mape_sum += (e / y).abs();
            mape_n += 1;
        }
    }
    let rmse = (sq_err / nf).sqrt();
    let mbe = bias / nf;
    let mape = if mape_n > 0 {
        100.0 / mape_n as f64 * mape_sum
    } else {
        0.0
    };

    let mean = actual.iter().sum::<f64>() / nf;
    let ss_tot: f64 = actual.iter().map(|&y| (y - mean) * (y - mean)).sum();
    let r2 = if n >= 2 && ss_tot > 0.0 {
        Some(1.0 - sq_err / ss_tot)
    } else {
        None
    };

    Ok(MetricsReport {
        rmse,
        r2,
        mape,
        mbe,
        n,
        shade_accuracy: None,
        mape_excluded: n - mape_n,
    })
}

/// Percentage of positions where predicted shade equals observed shade.
pub fn shade_accuracy(predicted: &[bool], truth: &[bool]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(CoreError::LengthMismatch {
            left: predicted.len(),
            right: truth.len(),
        });
    }
    if predicted.is_empty() {
        return Err(CoreError::InvalidInput("empty shade input".into()));
    }
    let hits = predicted
        .iter()
        .zip(truth)
        .filter(|(p, t)| p == t)
        .count();
    Ok(hits as f64 / predicted.len() as f64 * 100.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn perfect_predictor() {
        let y = [20.0, 30.0, 40.0];
        let m = compute_metrics(&y, &y).unwrap();
        assert_eq!(m.rmse, 0.0);
        assert_eq!(m.r2, Some(1.0));
        assert_eq!(m.mape, 0.0);
        assert_eq!(m.mbe, 0.0);
        assert_eq!(m.n, 3);
        assert_eq!(m.mape_excluded, 0);
    }

    #[test]
    fn hand_computed_fixture() {
        let m = compute_metrics(&[30.0, 30.0], &[27.0, 33.0]).unwrap();
        assert_relative_eq!(m.rmse, 3.0, epsilon = 1e-12);
        assert_relative_eq!(m.mbe, 0.0, epsilon = 1e-12);
        assert_relative_eq!(m.mape, 10.0, epsilon = 1e-12);
        assert!(m.r2.is_none(), "zero-variance actuals leave R^2 undefined");
    }

    #[test]
    fn constant_mean_predictor_has_zero_r2() {
        let y = [10.0, 20.0, 30.0, 40.0];
        let mean = 25.0;
        let m = compute_metrics(&y, &[mean; 4]).unwrap();
        assert_relative_eq!(m.r2.unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn mape_guard_excludes_near_zero_actuals() {
        let m = compute_metrics(&[0.01, 50.0], &[5.0, 45.0]).unwrap();
        assert_eq!(m.mape_excluded, 1);
        assert_relative_eq!(m.mape, 10.0, epsilon = 1e-12);
    }

    #[test]
    fn shift_invariance_of_rmse_and_mbe() {
        let y = [12.0, 19.0, 33.0];
        let yhat = [10.0, 22.0, 30.0];
        let a = compute_metrics(&y, &yhat).unwrap();
        let yc: Vec<f64> = y.iter().map(|v| v + 7.0).collect();
        let yhatc: Vec<f64> = yhat.iter().map(|v| v + 7.0).collect();
        let b = compute_metrics(&yc, &yhatc).unwrap();
        assert_relative_eq!(a.rmse, b.rmse, epsilon = 1e-12);
        assert_relative_eq!(a.mbe, b.mbe, epsilon = 1e-12);
    }

    #[test]
    fn length_mismatch_rejected() {
        assert!(compute_metrics(&[1.0], &[1.0, 2.0]).is_err());
        assert!(shade_accuracy(&[true], &[true, false]).is_err());
    }

    #[test]
    fn shade_accuracy_basics() {
        assert_eq!(shade_accuracy(&[true, false], &[true, false]).unwrap(), 100.0);
        assert_eq!(shade_accuracy(&[true, false], &[false, true]).unwrap(), 0.0);
        let mut pred = vec![true; 100];
        let truth = vec![true; 100];
        for p in pred.iter_mut().take(6) {
            *p = false;
        }
        assert_eq!(shade_accuracy(&pred, &truth).unwrap(), 94.0);
    }

    #[test]
    fn rmse_bounds_absolute_bias() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let n = rng.random_range(1..30);
            let y: Vec<f64> = (0..n).map(|_| rng.random_range(-50.0..90.0)).collect();
            let yhat: Vec<f64> = (0..n).map(|_| rng.random_range(-50.0..90.0)).collect();
            let m = compute_metrics(&y, &yhat).unwrap();
            assert!(
                m.rmse >= m.mbe.abs() - 1e-12,
                "rmse {} < |mbe| {}",
                m.rmse,
                m.mbe
            );
        }
    }
}
