//! Uniformly sampled curves read from three-column CSV files.
//!
//! A file holds `(x, v, v′)` on a uniform grid. Second derivatives at the
//! nodes are recovered from `v′` by fourth-order differences, and the curve is
//! evaluated with piecewise quintic Hermite interpolation, which matches
//! `v, v′, v″` at every node and is C² overall.

use std::path::Path;

use crate::error::{Error, Result};
use crate::quadrature::Interval;

/// Relative tolerance on grid spacing when checking uniformity.
const UNIFORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    interval: Interval,
    h: f64,
    v: Vec<f64>,
    dv: Vec<f64>,
    d2v: Vec<f64>,
}

impl SampledCurve {
    /// Builds a curve from nodes `xs` with values and first derivatives.
    /// Needs at least five uniformly spaced nodes.
    pub fn new(xs: &[f64], v: Vec<f64>, dv: Vec<f64>) -> Result<Self> {
        let n = xs.len();
        if n < 5 || v.len() != n || dv.len() != n {
            return Err(Error::Config(format!(
                "sampled curve needs ≥ 5 nodes and equal column lengths (got {n}, {}, {})",
                v.len(),
                dv.len()
            )));
        }
        if xs.iter().chain(&v).chain(&dv).any(|x| !x.is_finite()) {
            return Err(Error::Config(
                "sampled curve contains non-finite values".into(),
            ));
        }
        let interval = Interval::new(xs[0], xs[n - 1])?;
        let h = interval.width() / (n - 1) as f64;
        for (i, x) in xs.iter().enumerate() {
            let expect = interval.node(i, n - 1);
            if (x - expect).abs() > UNIFORM_TOL * h {
                return Err(Error::Config(format!(
                    "sampled grid is not uniform at row {i}: x={x}, expected {expect}"
                )));
            }
        }
        let d2v = differentiate(&dv, h);
        Self::with_second(xs, v, dv, d2v)
    }

    /// Like [`SampledCurve::new`] but with known second derivatives at the nodes.
    pub fn with_second(xs: &[f64], v: Vec<f64>, dv: Vec<f64>, d2v: Vec<f64>) -> Result<Self> {
        let n = xs.len();
        if n < 2 || v.len() != n || dv.len() != n || d2v.len() != n {
            return Err(Error::Config(
                "sampled curve columns must have equal length ≥ 2".into(),
            ));
        }
        let interval = Interval::new(xs[0], xs[n - 1])?;
        let h = interval.width() / (n - 1) as f64;
        Ok(Self {
            interval,
            h,
            v,
            dv,
            d2v,
        })
    }

    /// Reads `x, v, v′` columns (with a header row) from a CSV file.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let shown = path.display().to_string();
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::Io {
                path: shown.clone(),
                msg: e.to_string(),
            })?;
        let (mut xs, mut v, mut dv) = (Vec::new(), Vec::new(), Vec::new());
        for (i, rec) in reader.records().enumerate() {
            // header is line 1
            let line = i + 2;
            let rec = rec.map_err(|e| Error::Parse {
                path: shown.clone(),
                line,
                msg: e.to_string(),
            })?;
            if rec.len() != 3 {
                return Err(Error::Parse {
                    path: shown.clone(),
                    line,
                    msg: format!("expected 3 columns, found {}", rec.len()),
                });
            }
            let mut cols = [0.0; 3];
            for (c, field) in cols.iter_mut().zip(rec.iter()) {
                *c = field.parse().map_err(|_| Error::Parse {
                    path: shown.clone(),
                    line,
                    msg: format!("'{field}' is not a number"),
                })?;
            }
            xs.push(cols[0]);
            v.push(cols[1]);
            dv.push(cols[2]);
        }
        Self::new(&xs, v, dv)
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// True when every stored value and slope is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.v.iter().chain(&self.dv).all(|&x| x == 0.0)
    }

    /// `(v, v′, v″)` at `x`.
    pub fn eval(&self, x: f64) -> Result<[f64; 3]> {
        if !self.interval.contains(x) {
            return Err(Error::Domain(format!(
                "x={x} outside sampled range [{}, {}]",
                self.interval.alpha, self.interval.beta
            )));
        }
        let last = self.v.len() - 1;
        let t = (x - self.interval.alpha) / self.h;
        let i = (t.floor() as usize).min(last - 1);
        let s = (t - i as f64).clamp(0.0, 1.0);
        let h = self.h;
        let (p0, m0, c0) = (self.v[i], self.dv[i] * h, self.d2v[i] * h * h);
        let (p1, m1, c1) = (self.v[i + 1], self.dv[i + 1] * h, self.d2v[i + 1] * h * h);
        let [b, db, d2b] = quintic_basis(s);
        let coeffs = [p0, m0, c0, c1, m1, p1];
        let dot = |w: &[f64; 6]| coeffs.iter().zip(w).map(|(c, w)| c * w).sum::<f64>();
        Ok([dot(&b), dot(&db) / h, dot(&d2b) / (h * h)])
    }
}

/// Values, first and second derivatives of the six quintic Hermite basis
/// functions on `[0, 1]`, ordered `(p0, m0, c0, c1, m1, p1)`.
fn quintic_basis(s: f64) -> [[f64; 6]; 3] {
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let s5 = s4 * s;
    let value = [
        1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5,
        s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5,
        0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5,
        0.5 * s3 - s4 + 0.5 * s5,
        -4.0 * s3 + 7.0 * s4 - 3.0 * s5,
        10.0 * s3 - 15.0 * s4 + 6.0 * s5,
    ];
    let first = [
        -30.0 * s2 + 60.0 * s3 - 30.0 * s4,
        1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4,
        s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4,
        1.5 * s2 - 4.0 * s3 + 2.5 * s4,
        -12.0 * s2 + 28.0 * s3 - 15.0 * s4,
        30.0 * s2 - 60.0 * s3 + 30.0 * s4,
    ];
    let second = [
        -60.0 * s + 180.0 * s2 - 120.0 * s3,
        -36.0 * s + 96.0 * s2 - 60.0 * s3,
        1.0 - 9.0 * s + 18.0 * s2 - 10.0 * s3,
        3.0 * s - 12.0 * s2 + 10.0 * s3,
        -24.0 * s + 84.0 * s2 - 60.0 * s3,
        60.0 * s - 180.0 * s2 + 120.0 * s3,
    ];
    [value, first, second]
}

/// Fourth-order finite-difference derivative of uniformly spaced samples.
fn differentiate(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let d = 12.0 * h;
    (0..n)
        .map(|i| match i {
            0 => (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / d,
            1 => (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / d,
            _ if i == n - 2 => {
                (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) / d
            }
            _ if i == n - 1 => {
                (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4]
                    + 3.0 * f[n - 5])
                    / d
            }
            _ => (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / d,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_interpolates_endpoint_data() {
        let [v0, d0, s0] = quintic_basis(0.0);
        let [v1, d1, s1] = quintic_basis(1.0);
        assert_eq!(v0, [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(d0, [0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(s0, [0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(v1, [0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(d1, [0.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        assert_eq!(s1, [0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn reproduces_quartic_exactly() {
        // fourth-order differences are exact for v′ of degree ≤ 4
        let f = |x: f64| (x.powi(4) - 2.0 * x.powi(3), 4.0 * x.powi(3) - 6.0 * x * x);
        let xs: Vec<f64> = (0..=20).map(|i| -1.0 + i as f64 * 0.1).collect();
        let (v, dv): (Vec<_>, Vec<_>) = xs.iter().map(|&x| f(x)).unzip();
        let c = SampledCurve::new(&xs, v, dv).unwrap();
        for x in [-0.93, -0.1, 0.37, 0.99] {
            let [p, dp, d2p] = c.eval(x).unwrap();
            assert!((p - f(x).0).abs() < 1e-12);
            assert!((dp - f(x).1).abs() < 1e-11);
            assert!((d2p - (12.0 * x * x - 12.0 * x)).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_non_uniform_and_short_grids() {
        let xs = [0.0, 0.1, 0.25, 0.3, 0.4];
        assert!(SampledCurve::new(&xs, vec![0.0; 5], vec![0.0; 5]).is_err());
        let xs = [0.0, 0.1, 0.2, 0.3];
        assert!(SampledCurve::new(&xs, vec![0.0; 4], vec![0.0; 4]).is_err());
    }

    #[test]
    fn out_of_range_is_domain_error() {
        let xs: Vec<f64> = (0..5).map(|i| i as f64).collect();
        let c = SampledCurve::new(&xs, vec![1.0; 5], vec![0.0; 5]).unwrap();
        assert!(matches!(c.eval(4.5), Err(Error::Domain(_))));
        assert_eq!(c.eval(4.0).unwrap(), [1.0, 0.0, 0.0]);
    }

    #[test]
    fn csv_parse_error_has_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "x,phi,phi_prime\n0,0,0\n0.1,oops,0\n").unwrap();
        match SampledCurve::from_csv(&path).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }
}
