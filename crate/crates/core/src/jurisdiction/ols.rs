//! Simple linear regression with intercept: coefficients, t statistics,
//! two-sided p-values from Student's t, and adjusted R².

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub n: usize,
    pub intercept: f64,
    pub slope: f64,
    pub t_intercept: f64,
    pub t_slope: f64,
    pub p_intercept: f64,
    pub p_slope: f64,
    pub r2: f64,
    pub adj_r2: f64,
}

fn two_sided_p(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    if t.is_nan() {
        return f64::NAN;
    }
    let dist = StudentsT::new(0.0, 1.0, df).expect("df ≥ 1");
    2.0 * dist.sf(t.abs())
}

/// OLS of `y` on `x` with an intercept.
pub fn ols_regression(x: &[f64], y: &[f64]) -> Result<RegressionResult> {
    if x.len() != y.len() {
        return Err(Error::InvalidParameter(format!("{} x values for {} y values", x.len(), y.len())));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::InvalidParameter(format!("regression needs at least 3 points, got {n}")));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::SingularDesign("x is constant".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let df = nf - 2.0;
    let s2 = sse / df;
    let se_slope = (s2 / sxx).sqrt();
    let se_intercept = (s2 * (1.0 / nf + mx * mx / sxx)).sqrt();
    let t_slope = slope / se_slope;
    let t_intercept = intercept / se_intercept;
    // no variation in y: nothing to explain
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 0.0 };
    let adj_r2 = 1.0 - (1.0 - r2) * (nf - 1.0) / df;
    Ok(RegressionResult {
        n,
        intercept,
        slope,
        t_intercept,
        t_slope,
        p_intercept: two_sided_p(t_intercept, df),
        p_slope: two_sided_p(t_slope, df),
        r2,
        adj_r2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    #[test]
    fn exact_line() {
        let x: Vec<f64> = (0..10).map(|i| i as f64 * 0.7 - 1.0).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 + 3.0 * v).collect();
        let r = ols_regression(&x, &y).unwrap();
        assert!((r.intercept - 2.0).abs() < 1e-12 && (r.slope - 3.0).abs() < 1e-12);
        assert!((r.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_response() {
        let r = ols_regression(&[1.0, 2.0, 3.0, 4.0], &[5.0; 4]).unwrap();
        assert_eq!(r.slope, 0.0);
        assert!(r.adj_r2 <= 0.0);
    }

    #[test]
    fn rejects_bad_designs() {
        assert!(matches!(ols_regression(&[1.0; 5], &[1.0, 2.0, 3.0, 4.0, 5.0]), Err(Error::SingularDesign(_))));
        assert!(ols_regression(&[1.0, 2.0], &[1.0, 2.0]).is_err());
    }

    const X: [f64; 8] = [0.0012, 0.0031, 0.0005, 0.0078, 0.0044, 0.0019, 0.0102, 0.0027];
    const Y: [f64; 8] = [12.0, 25.0, 4.0, 31.0, 20.0, 18.0, 47.0, 9.0];

    /// β = (XᵀX)⁻¹Xᵀy with the covariance s²(XᵀX)⁻¹, solved densely.
    fn normal_equations(x: &[f64], y: &[f64]) -> (f64, f64, f64, f64, f64) {
        let n = x.len();
        let design = DMatrix::from_fn(n, 2, |i, j| if j == 0 { 1.0 } else { x[i] });
        let yv = DVector::from_column_slice(y);
        let xtx_inv = (design.transpose() * &design).try_inverse().unwrap();
        let beta = &xtx_inv * design.transpose() * &yv;
        let resid = &yv - &design * &beta;
        let s2 = resid.norm_squared() / (n as f64 - 2.0);
        let t0 = beta[0] / (s2 * xtx_inv[(0, 0)]).sqrt();
        let t1 = beta[1] / (s2 * xtx_inv[(1, 1)]).sqrt();
        let mean = yv.mean();
        let sst: f64 = yv.iter().map(|v| (v - mean).powi(2)).sum();
        let r2 = 1.0 - resid.norm_squared() / sst;
        let adj = 1.0 - (1.0 - r2) * (n as f64 - 1.0) / (n as f64 - 2.0);
        (beta[0], beta[1], t0, t1, adj)
    }

    #[test]
    fn matches_normal_equations() {
        let r = ols_regression(&X, &Y).unwrap();
        let (b0, b1, t0, t1, adj) = normal_equations(&X, &Y);
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-10 * b.abs().max(1.0);
        assert!(close(r.intercept, b0), "{} {}", r.intercept, b0);
        assert!(close(r.slope, b1), "{} {}", r.slope, b1);
        assert!(close(r.t_intercept, t0));
        assert!(close(r.t_slope, t1));
        assert!(close(r.adj_r2, adj));
        assert!(r.p_slope > 0.0 && r.p_slope < 0.01);
    }

    #[test]
    fn residuals_orthogonal_to_design() {
        let r = ols_regression(&X, &Y).unwrap();
        let resid: Vec<f64> = X.iter().zip(&Y).map(|(x, y)| y - r.intercept - r.slope * x).collect();
        assert!(resid.iter().sum::<f64>().abs() < 1e-8);
        assert!(resid.iter().zip(&X).map(|(e, x)| e * x * 1e3).sum::<f64>().abs() < 1e-8);
    }

    #[test]
    fn p_value_of_known_t() {
        // t = 2.306 at 8 df is the two-sided 5% critical value
        assert!((two_sided_p(2.306004135, 8.0) - 0.05).abs() < 1e-6);
    }
}
