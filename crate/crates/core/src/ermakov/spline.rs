use alloc::vec;
use alloc::vec::Vec;

/// Natural cubic spline through uniformly spaced samples on `[0, span]`.
///
/// Evaluation outside the sampled interval is clamped to the end values.
#[derive(Clone, Debug, PartialEq)]
pub struct UniformSpline {
    span: f64,
    values: Vec<f64>,
    // second derivatives at the knots
    curvature: Vec<f64>,
}

impl UniformSpline {
    /// Requires at least two samples; with two samples the spline is linear.
    pub fn new(span: f64, values: Vec<f64>) -> Self {
        let n = values.len();
        debug_assert!(n >= 2);
        let h = span / (n - 1) as f64;
        let mut curvature = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior knots: M[i-1] + 4 M[i] + M[i+1] = rhs
            let m = n - 2;
            let mut diag = vec![4.0; m];
            let mut rhs: Vec<f64> = (1..n - 1)
                .map(|i| 6.0 * (values[i - 1] - 2.0 * values[i] + values[i + 1]) / (h * h))
                .collect();
            for i in 1..m {
                let w = 1.0 / diag[i - 1];
                diag[i] -= w;
                rhs[i] -= w * rhs[i - 1];
            }
            curvature[m] = rhs[m - 1] / diag[m - 1];
            for i in (0..m - 1).rev() {
                curvature[i + 1] = (rhs[i] - curvature[i + 2]) / diag[i];
            }
        }
        Self {
            span,
            values,
            curvature,
        }
    }

    pub fn span(&self) -> f64 {
        self.span
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn step(&self) -> f64 {
        self.span / (self.values.len() - 1) as f64
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.values.len();
        let h = self.step();
        let t = t.clamp(0.0, self.span);
        let i = ((t / h) as usize).min(n - 2);
        let a = (t - i as f64 * h) / h;
        let b = 1.0 - a;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.curvature[i], self.curvature[i + 1]);
        b * y0 + a * y1 + ((b * b * b - b) * m0 + (a * a * a - a) * m1) * h * h / 6.0
    }
}
