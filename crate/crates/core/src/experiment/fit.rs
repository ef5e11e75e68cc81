use crate::error::{Error, Result};

/// Least-squares line through `(x, ln y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Fits `ln y = intercept + slope * x` over the points with `y > 0`.
pub fn decay_fit(xs: &[f64], ys: &[f64]) -> Result<DecayFit> {
    assert_eq!(xs.len(), ys.len(), "decay_fit: x and y lengths differ");
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|&(_, &y)| y > 0.0 && y.is_finite())
        .map(|(&x, &y)| (x, y.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let r_squared = if syy > 0.0 && sxx > 0.0 {
        (sxy * sxy) / (sxx * syy)
    } else {
        0.0
    };
    Ok(DecayFit {
        slope,
        intercept,
        r_squared,
        points: pts.len(),
    })
}

/// Fit against the 1-based position in `values`.
pub fn decay_fit_series(values: &[f64]) -> Result<DecayFit> {
    let xs: Vec<f64> = (1..=values.len()).map(|i| i as f64).collect();
    decay_fit(&xs, values)
}
