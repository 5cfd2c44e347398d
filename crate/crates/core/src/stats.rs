use statrs::distribution::{ContinuousCDF, StudentsT};

/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.576;

/// Ordinary least squares `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regression {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub slope_std_error: f64,
    /// Two-sided p-value of `slope != 0` (t test, n - 2 dof).
    pub p_value: f64,
    pub n: usize,
}

/// `None` with fewer than three points or zero variance in `x`.
pub fn linear_regression(x: &[f64], y: &[f64]) -> Option<Regression> {
    let n = x.len();
    if n != y.len() || n < 3 {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse = (syy - slope * sxy).max(0.0);
    let dof = nf - 2.0;
    let se = (sse / dof / sxx).sqrt();
    let p_value = if se == 0.0 {
        if slope == 0.0 { 1.0 } else { 0.0 }
    } else {
        let t = slope / se;
        let dist = StudentsT::new(0.0, 1.0, dof).ok()?;
        2.0 * (1.0 - dist.cdf(t.abs()))
    };
    Some(Regression {
        slope,
        intercept,
        r_squared: if syy > 0.0 { slope * sxy / syy } else { 1.0 },
        slope_std_error: se,
        p_value,
        n,
    })
}

/// Proportion estimate and its binomial standard error.
pub fn proportion(hits: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 0.0);
    }
    let p = hits as f64 / n as f64;
    (p, (p * (1.0 - p) / n as f64).sqrt())
}
