//! Validated series container, min-max normalization, differencing, and
//! the error metrics shared by every other module.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by series construction and the operations in this module.
#[derive(Debug, Error, PartialEq)]
pub enum SeriesError {
    #[error("series needs at least {min} samples, got {len}")]
    TooShort { len: usize, min: usize },
    #[error("xs and ys must have equal nonzero length ({xs} vs {ys})")]
    LengthMismatch { xs: usize, ys: usize },
    #[error("series contains a non-finite value at index {0}")]
    NonFinite(usize),
    #[error("xs must be strictly increasing (violated at index {0})")]
    NotIncreasing(usize),
    #[error("cannot normalize a series with zero value range")]
    DegenerateRange,
}

/// An ordered sequence of real samples over a strictly increasing index grid.
///
/// Construction validates every invariant the rest of the crate relies on:
/// equal nonzero lengths, finite values, strictly increasing `xs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Series {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, SeriesError> {
        if xs.len() != ys.len() || xs.is_empty() {
            return Err(SeriesError::LengthMismatch {
                xs: xs.len(),
                ys: ys.len(),
            });
        }
        for (i, v) in xs.iter().chain(ys.iter()).enumerate() {
            if !v.is_finite() {
                return Err(SeriesError::NonFinite(i % xs.len()));
            }
        }
        for i in 1..xs.len() {
            if xs[i] <= xs[i - 1] {
                return Err(SeriesError::NotIncreasing(i));
            }
        }
        Ok(Self { xs, ys })
    }

    /// Series over the default grid 1..=n when no index values are given.
    pub fn from_values(ys: Vec<f64>) -> Result<Self, SeriesError> {
        let xs = (1..=ys.len()).map(|i| i as f64).collect();
        Self::new(xs, ys)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn len(&self) -> usize {
        self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ys.is_empty()
    }

    /// Grid step between the last two samples; forecasts continue on it.
    pub fn tail_step(&self) -> f64 {
        if self.xs.len() < 2 {
            1.0
        } else {
            self.xs[self.xs.len() - 1] - self.xs[self.xs.len() - 2]
        }
    }

    /// The last `n` samples as a new series.
    pub fn tail(&self, n: usize) -> Self {
        let start = self.len().saturating_sub(n);
        Self {
            xs: self.xs[start..].to_vec(),
            ys: self.ys[start..].to_vec(),
        }
    }
}

/// Min-max parameters recorded by [`normalize_01`], sufficient to invert it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormParams {
    pub y_min: f64,
    pub y_max: f64,
}

/// Min-max scale `ys` onto [0, 1] over this window; `xs` are unchanged.
///
/// Fails with [`SeriesError::DegenerateRange`] on a constant series; the
/// pipeline bypasses normalization entirely in that case.
pub fn normalize_01(s: &Series) -> Result<(Series, NormParams), SeriesError> {
    let (lo, hi) = min_max(s.ys());
    if hi <= lo {
        return Err(SeriesError::DegenerateRange);
    }
    let ys = s.ys().iter().map(|y| (y - lo) / (hi - lo)).collect();
    Ok((
        Series {
            xs: s.xs.clone(),
            ys,
        },
        NormParams { y_min: lo, y_max: hi },
    ))
}

/// Invert [`normalize_01`]: `y = y' * (y_max - y_min) + y_min`.
pub fn denormalize_01(s: &Series, p: &NormParams) -> Series {
    let ys = s
        .ys()
        .iter()
        .map(|y| y * (p.y_max - p.y_min) + p.y_min)
        .collect();
    Series {
        xs: s.xs.clone(),
        ys,
    }
}

/// First difference: element `j` is `ys[j+1] - ys[j]`, over `xs[1..]`.
pub fn diff(s: &Series) -> Result<Series, SeriesError> {
    if s.len() < 2 {
        return Err(SeriesError::TooShort {
            len: s.len(),
            min: 2,
        });
    }
    let ys = s.ys().windows(2).map(|w| w[1] - w[0]).collect();
    Ok(Series {
        xs: s.xs[1..].to_vec(),
        ys,
    })
}

/// Running cumulative sum over the same grid.
pub fn cumsum(s: &Series) -> Series {
    let mut acc = 0.0;
    let ys = s
        .ys()
        .iter()
        .map(|y| {
            acc += y;
            acc
        })
        .collect();
    Series {
        xs: s.xs.clone(),
        ys,
    }
}

/// Mean absolute error between two equal-length series.
pub fn mae(pred: &Series, actual: &Series) -> Result<f64, SeriesError> {
    mae_slice(pred.ys(), actual.ys())
}

/// Mean squared error between two equal-length series.
pub fn mse(pred: &Series, actual: &Series) -> Result<f64, SeriesError> {
    mse_slice(pred.ys(), actual.ys())
}

pub fn mae_slice(pred: &[f64], actual: &[f64]) -> Result<f64, SeriesError> {
    check_lengths(pred, actual)?;
    let sum: f64 = pred
        .iter()
        .zip(actual)
        .map(|(p, a)| (p - a).abs())
        .sum();
    Ok(sum / pred.len() as f64)
}

pub fn mse_slice(pred: &[f64], actual: &[f64]) -> Result<f64, SeriesError> {
    check_lengths(pred, actual)?;
    let sum: f64 = pred
        .iter()
        .zip(actual)
        .map(|(p, a)| (p - a) * (p - a))
        .sum();
    Ok(sum / pred.len() as f64)
}

fn check_lengths(pred: &[f64], actual: &[f64]) -> Result<(), SeriesError> {
    if pred.len() != actual.len() || pred.is_empty() {
        return Err(SeriesError::LengthMismatch {
            xs: pred.len(),
            ys: actual.len(),
        });
    }
    Ok(())
}

pub(crate) fn min_max(ys: &[f64]) -> (f64, f64) {
    let lo = ys.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(ys: &[f64]) -> Series {
        Series::from_values(ys.to_vec()).unwrap()
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(
            Series::new(vec![1.0], vec![]),
            Err(SeriesError::LengthMismatch { .. })
        ));
        assert!(matches!(
            Series::new(vec![], vec![]),
            Err(SeriesError::LengthMismatch { .. })
        ));
        assert!(matches!(
            Series::new(vec![1.0, 2.0], vec![0.0, f64::NAN]),
            Err(SeriesError::NonFinite(_))
        ));
        assert!(matches!(
            Series::new(vec![1.0, 1.0], vec![0.0, 0.0]),
            Err(SeriesError::NotIncreasing(1))
        ));
    }

    #[test]
    fn default_grid_is_naturals() {
        let series = s(&[5.0, 6.0, 7.0]);
        assert_eq!(series.xs(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn normalize_endpoints() {
        let (n, p) = normalize_01(&s(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(n.ys(), &[0.0, 0.5, 1.0]);
        assert_eq!(p, NormParams { y_min: 1.0, y_max: 3.0 });
    }

    #[test]
    fn normalize_constant_is_degenerate() {
        assert_eq!(
            normalize_01(&s(&[5.0, 5.0, 5.0])).unwrap_err(),
            SeriesError::DegenerateRange
        );
    }

    #[test]
    fn denormalize_maps_endpoints_back() {
        let p = NormParams { y_min: 10.0, y_max: 20.0 };
        let out = denormalize_01(&Series::from_values(vec![0.0, 1.0]).unwrap(), &p);
        assert_eq!(out.ys(), &[10.0, 20.0]);
        let mid = denormalize_01(&Series::from_values(vec![0.5]).unwrap(), &NormParams { y_min: 0.0, y_max: 4.0 });
        assert_eq!(mid.ys(), &[2.0]);
    }

    #[test]
    fn normalize_round_trip() {
        let orig = s(&[3.0, -1.5, 8.0, 0.25]);
        let (n, p) = normalize_01(&orig).unwrap();
        let back = denormalize_01(&n, &p);
        for (a, b) in back.ys().iter().zip(orig.ys()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn diff_basics() {
        let d = diff(&s(&[1.0, 4.0, 9.0, 16.0])).unwrap();
        assert_eq!(d.ys(), &[3.0, 5.0, 7.0]);
        assert_eq!(d.xs(), &[2.0, 3.0, 4.0]);
        let z = diff(&s(&[2.0, 2.0, 2.0])).unwrap();
        assert_eq!(z.ys(), &[0.0, 0.0]);
        assert!(matches!(
            diff(&s(&[1.0])),
            Err(SeriesError::TooShort { len: 1, min: 2 })
        ));
    }

    #[test]
    fn cumsum_basics() {
        assert_eq!(cumsum(&s(&[1.0, 1.0, 1.0])).ys(), &[1.0, 2.0, 3.0]);
        assert_eq!(cumsum(&s(&[0.0])).ys(), &[0.0]);
    }

    #[test]
    fn cumsum_inverts_diff_with_anchor() {
        let orig = s(&[1.0, 4.0, 9.0, 16.0]);
        let d = diff(&orig).unwrap();
        let c = cumsum(&d);
        let rebuilt: Vec<f64> = std::iter::once(orig.ys()[0])
            .chain(c.ys().iter().map(|v| orig.ys()[0] + v))
            .collect();
        assert_eq!(rebuilt, orig.ys());
    }

    #[test]
    fn metrics_basics() {
        let a = s(&[1.0, 2.0]);
        assert_eq!(mae(&a, &a).unwrap(), 0.0);
        assert_eq!(mse(&a, &a).unwrap(), 0.0);
        let zeros = s(&[0.0, 0.0]);
        let ones = s(&[1.0, 1.0]);
        assert_eq!(mse(&zeros, &ones).unwrap(), 1.0);
        assert_eq!(mae(&s(&[0.0]), &s(&[3.0])).unwrap(), 3.0);
        assert_eq!(mse(&s(&[0.0]), &s(&[3.0])).unwrap(), 9.0);
        assert!(mae(&zeros, &s(&[1.0])).is_err());
    }
}
