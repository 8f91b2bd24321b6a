//! Forecast-error and correlation metrics.

use crate::error::{Error, Result};

/// Weighted absolute percentage error: `sum |a - f| / sum |a|`.
pub fn wape(actuals: &[f64], forecasts: &[f64]) -> Result<f64> {
    if actuals.is_empty() || actuals.len() != forecasts.len() {
        return Err(Error::DegenerateInput(format!(
            "wape needs equal non-empty lengths, got {} and {}",
            actuals.len(),
            forecasts.len()
        )));
    }
    let denom: f64 = actuals.iter().map(|a| a.abs()).sum();
    if denom <= 0.0 {
        return Err(Error::UndefinedDenominator);
    }
    let num: f64 = actuals
        .iter()
        .zip(forecasts)
        .map(|(a, f)| (a - f).abs())
        .sum();
    Ok(num / denom)
}

/// Sample Pearson correlation coefficient. The formula is symmetric in
/// its arguments down to the bit level.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::DegenerateInput(format!(
            "correlation needs equal lengths of at least 2, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        cov += dx * dy;
        vx += dx * dx;
        vy += dy * dy;
    }
    if vx <= 0.0 {
        return Err(Error::UndefinedCorrelation(
            "first input has zero variance".into(),
        ));
    }
    if vy <= 0.0 {
        return Err(Error::UndefinedCorrelation(
            "second input has zero variance".into(),
        ));
    }
    Ok(cov / (vx.sqrt() * vy.sqrt()))
}
