use serde::Serialize;
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairedTTest {
    /// `mean(d) / (sd(d) / sqrt(n))`, infinite when the differences are a nonzero constant.
    pub t: f64,
    /// One-sided upper-tail probability `P(T >= t)` under `n - 1` degrees of freedom.
    pub p: f64,
    pub df: usize,
    pub mean_diff: f64,
}

impl PairedTTest {
    pub fn significant(&self, alpha: f64) -> bool {
        self.p < alpha
    }
}

/// Upper tail of Student's t distribution.
pub fn student_t_upper_tail(t: f64, df: f64) -> f64 {
    let x = df / (df + t * t);
    let half_tail = 0.5 * beta_reg(df / 2.0, 0.5, x);
    if t >= 0.0 {
        half_tail
    } else {
        1.0 - half_tail
    }
}

/// One-sided paired t-test of `a > b`.
///
/// With zero spread in the differences the test degenerates: `p = 0` for a
/// positive mean difference, `1` for a negative one, `0.5` when it is zero.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<PairedTTest> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "paired samples differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::insufficient("paired t-test needs at least two pairs"));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = d.iter().sum::<f64>() / n as f64;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let sd = var.sqrt();
    let df = n - 1;
    // Differences that agree to rounding error count as constant.
    let degenerate = sd <= 1e-12 * mean.abs().max(1e-300) || sd == 0.0;
    let (t, p) = if degenerate {
        if mean > 0.0 {
            (f64::INFINITY, 0.0)
        } else if mean < 0.0 {
            (f64::NEG_INFINITY, 1.0)
        } else {
            (0.0, 0.5)
        }
    } else {
        let t = mean / (sd / (n as f64).sqrt());
        (t, student_t_upper_tail(t, df as f64))
    };
    Ok(PairedTTest {
        t,
        p,
        df,
        mean_diff: mean,
    })
}
