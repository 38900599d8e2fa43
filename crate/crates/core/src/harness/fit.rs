use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::GroupSummary;

/// Least-squares power law `T ≈ exp(log_c) * n^alpha` fitted in natural-log space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub alpha: f64,
    pub log_c: f64,
    pub r2: f64,
    pub n_min: f64,
    pub n_max: f64,
    pub points: usize,
}

/// Fits `ln(mean) = log_c + alpha * ln(n)`. Needs at least 3 distinct `n` and positive means.
pub fn fit_exponent(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::param(format!(
            "need at least 3 points to fit, got {}",
            points.len()
        )));
    }
    if let Some(&(n, m)) = points
        .iter()
        .find(|&&(n, m)| !(n > 0.0 && m > 0.0 && n.is_finite() && m.is_finite()))
    {
        return Err(Error::param(format!(
            "point (n={n}, mean={m}) is not strictly positive and finite"
        )));
    }
    let mut ns: Vec<f64> = points.iter().map(|p| p.0).collect();
    ns.sort_by(f64::total_cmp);
    if ns.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::param("sizes must be distinct"));
    }

    let k = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let alpha = sxy / sxx;
    let log_c = my - alpha * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (log_c + alpha * x)).powi(2))
        .sum();
    let r2 = if syy == 0.0 {
        1.0
    } else {
        (1.0 - sse / syy).clamp(0.0, 1.0)
    };
    Ok(FitResult {
        alpha,
        log_c,
        r2,
        n_min: ns[0],
        n_max: ns[ns.len() - 1],
        points: points.len(),
    })
}

/// Fits one variant's summary rows, skipping groups without a successful run.
pub fn fit_summaries(rows: &[GroupSummary], variant: &str) -> Result<FitResult> {
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.variant == variant && r.mean.is_finite() && r.success_rate > 0.0)
        .map(|r| (r.n as f64, r.mean))
        .collect();
    if !rows.iter().any(|r| r.variant == variant) {
        return Err(Error::param(format!(
            "no summary rows for variant {variant:?}"
        )));
    }
    fit_exponent(&points)
}

/// Fit record as written to fit JSON files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantFit {
    pub variant: String,
    #[serde(flatten)]
    pub fit: FitResult,
}

/// Bound shapes `c * n^a * (ln n)^b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    /// `n^4`
    N4,
    /// `n^3.5 * sqrt(ln n)`
    N35SqrtLog,
    /// `n^3.25 * (ln n)^0.25`
    N325QuartLog,
    Custom {
        alpha: f64,
        beta: f64,
    },
}

impl ModelFamily {
    pub fn exponents(self) -> (f64, f64) {
        match self {
            ModelFamily::N4 => (4.0, 0.0),
            ModelFamily::N35SqrtLog => (3.5, 0.5),
            ModelFamily::N325QuartLog => (3.25, 0.25),
            ModelFamily::Custom { alpha, beta } => (alpha, beta),
        }
    }
}

pub fn model_curve(ns: &[f64], family: ModelFamily, c: f64) -> Result<Vec<f64>> {
    if c.is_nan() || c <= 0.0 {
        return Err(Error::param(format!("model constant {c} must be positive")));
    }
    let (a, b) = family.exponents();
    ns.iter()
        .map(|&n| {
            if n.is_nan() || n < 2.0 {
                return Err(Error::param(format!("model size {n} must be at least 2")));
            }
            let log_term = if b == 0.0 { 1.0 } else { n.ln().powf(b) };
            Ok(c * n.powf(a) * log_term)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn power_law(c: f64, a: f64, ns: &[f64]) -> Vec<(f64, f64)> {
        ns.iter().map(|&n| (n, c * n.powf(a))).collect()
    }

    const LADDER: [f64; 6] = [8.0, 12.0, 16.0, 24.0, 32.0, 40.0];

    #[test]
    fn exact_power_laws() {
        let f = fit_exponent(&power_law(7.0, 3.0, &LADDER)).unwrap();
        assert!((f.alpha - 3.0).abs() < 1e-9);
        assert!((f.log_c - 7f64.ln()).abs() < 1e-9);
        assert!((f.r2 - 1.0).abs() < 1e-12);
        let f = fit_exponent(&power_law(2.0, 4.0, &LADDER)).unwrap();
        assert!((f.alpha - 4.0).abs() < 1e-9);
        assert_eq!((f.n_min, f.n_max, f.points), (8.0, 40.0, 6));
    }

    #[test]
    fn noisy_power_law() {
        let mut rng = RngStream::new(12, 0);
        for trial in 0..50 {
            let a = 2.0 + trial as f64 * 0.05;
            let pts: Vec<(f64, f64)> = power_law(3.0, a, &LADDER)
                .into_iter()
                .map(|(n, t)| (n, t * (1.0 + 0.02 * (rng.next_f64() - 0.5))))
                .collect();
            let f = fit_exponent(&pts).unwrap();
            assert!((f.alpha - a).abs() <= 0.02, "{a} -> {}", f.alpha);
            assert!(f.r2 > 0.99);
        }
    }

    #[test]
    fn fit_rejects_bad_input() {
        assert!(fit_exponent(&[(2.0, 1.0), (3.0, 2.0)]).is_err());
        assert!(fit_exponent(&[(2.0, 1.0), (3.0, 0.0), (4.0, 2.0)]).is_err());
        assert!(fit_exponent(&[(2.0, 1.0), (2.0, 3.0), (4.0, 2.0)]).is_err());
        assert!(fit_exponent(&[(2.0, 1.0), (3.0, f64::NAN), (4.0, 2.0)]).is_err());
    }

    #[test]
    fn flat_data_has_zero_slope() {
        let f = fit_exponent(&[(2.0, 5.0), (4.0, 5.0), (8.0, 5.0)]).unwrap();
        assert_eq!(f.alpha, 0.0);
        assert_eq!(f.r2, 1.0);
    }

    #[test]
    fn model_curves() {
        assert_eq!(
            model_curve(&[2.0], ModelFamily::N4, 1.0).unwrap(),
            vec![16.0]
        );
        let v = model_curve(
            &[10.0],
            ModelFamily::Custom {
                alpha: 1.0,
                beta: 0.0,
            },
            3.0,
        )
        .unwrap();
        assert!((v[0] - 30.0).abs() < 1e-12);
        let e = std::f64::consts::E;
        let v = model_curve(&[e], ModelFamily::N35SqrtLog, 2.0).unwrap();
        assert!((v[0] - 2.0 * e.powf(3.5)).abs() < 1e-9);
        let v = model_curve(&[16.0], ModelFamily::N325QuartLog, 1.0).unwrap();
        assert!((v[0] - 16f64.powf(3.25) * 16f64.ln().powf(0.25)).abs() < 1e-6);
        assert!(model_curve(&[1.0], ModelFamily::N4, 1.0).is_err());
        assert!(model_curve(&[4.0], ModelFamily::N4, 0.0).is_err());
    }
}
