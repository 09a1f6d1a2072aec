use serde::{Deserialize, Serialize};

use super::sweep::Spectrum;
use crate::error::{Error, Result};

/// Extremum heights within this fraction of the dominant one count as
/// competing peaks.
pub const AMBIGUITY_RATIO: f64 = 0.8;

/// Minimum height in units of the noise floor.
pub const MIN_SNR: f64 = 3.0;

/// Scalar description of a single resonance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineshapeMetrics {
    /// Axis units.
    pub center: f64,
    /// Observable at the interpolated vertex.
    pub peak: f64,
    pub baseline: f64,
    /// `|peak − baseline| / |baseline|`, or `|peak − baseline|` on a zero baseline.
    pub contrast: f64,
    /// Axis units.
    pub fwhm: f64,
    /// `+1` for a maximum above baseline, `−1` for a dip.
    pub polarity: f64,
    /// Estimated point-to-point noise, observable units.
    pub noise: f64,
    /// Index of the extremal sample.
    pub index: usize,
}

impl LineshapeMetrics {
    /// `peak − baseline`.
    pub fn height(&self) -> f64 {
        self.peak - self.baseline
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Number of samples per side used for the baseline.
pub fn baseline_window(n: usize) -> usize {
    (n / 10).max(1)
}

/// Robust noise estimate from the median absolute second difference,
/// scaled to the standard deviation of white noise.
pub fn noise_floor(y: &[f64]) -> f64 {
    if y.len() < 3 {
        return 0.0;
    }
    let mut d2: Vec<f64> = y.windows(3).map(|w| (w[0] - 2.0 * w[1] + w[2]).abs()).collect();
    median(&mut d2) / (0.674_489_750_196_081_7 * 6f64.sqrt())
}

impl Spectrum {
    /// Linear interpolation of the observable; `None` outside the axis.
    pub fn interpolate(&self, x: f64) -> Option<f64> {
        let a = &self.axis;
        if a.is_empty() || !(x >= a[0] && x <= a[a.len() - 1]) {
            return None;
        }
        let j = a.partition_point(|&t| t <= x);
        if j == 0 {
            return Some(self.values[0]);
        }
        if j == a.len() {
            return Some(self.values[a.len() - 1]);
        }
        let t = (x - a[j - 1]) / (a[j] - a[j - 1]);
        Some(self.values[j - 1] + t * (self.values[j] - self.values[j - 1]))
    }
}

fn crossing(x0: f64, y0: f64, x1: f64, y1: f64, level: f64) -> f64 {
    if y1 == y0 {
        return 0.5 * (x0 + x1);
    }
    x0 + (level - y0) * (x1 - x0) / (y1 - y0)
}

/// Baseline, centre, width and contrast of the dominant extremum.
pub fn lineshape_metrics(s: &Spectrum) -> Result<LineshapeMetrics> {
    s.validate()?;
    let (x, y) = (&s.axis, &s.values);
    let n = y.len();
    if n < 5 {
        return Err(Error::Data(format!("need at least 5 points, got {n}")));
    }
    let k = baseline_window(n);
    let mut outer: Vec<f64> = y[..k].iter().chain(&y[n - k..]).copied().collect();
    let baseline = median(&mut outer);
    let noise = noise_floor(y);

    let (index, dev) = y
        .iter()
        .map(|v| v - baseline)
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .expect("non-empty");
    let scale = y.iter().fold(baseline.abs(), |m, v| m.max(v.abs()));
    if dev.abs() <= MIN_SNR * noise || dev.abs() <= 1e-12 * scale || dev == 0.0 {
        return Err(Error::NoPeak(format!("largest excursion {:e} against noise {:e}", dev.abs(), noise)));
    }
    if index == 0 || index == n - 1 {
        return Err(Error::NoPeak(format!("extremum at sweep edge {}", x[index])));
    }
    let polarity = dev.signum();
    let d: Vec<f64> = y.iter().map(|v| polarity * (v - baseline)).collect();
    let height = d[index];

    // competing extrema separated from the main one by a dip below half height
    let mut candidates = vec![x[index]];
    for j in 1..n - 1 {
        if j == index || !(d[j] >= d[j - 1] && d[j] >= d[j + 1]) || d[j] < AMBIGUITY_RATIO * height {
            continue;
        }
        let (lo, hi) = if j < index { (j, index) } else { (index, j) };
        if d[lo..=hi].iter().any(|&v| v < 0.5 * height) {
            candidates.push(x[j]);
        }
    }
    if candidates.len() > 1 {
        candidates.sort_by(f64::total_cmp);
        return Err(Error::AmbiguousPeak { candidates });
    }

    // vertex of the parabola through the three extremal samples
    let (xa, xb, xc) = (x[index - 1], x[index], x[index + 1]);
    let (ya, yb, yc) = (d[index - 1], d[index], d[index + 1]);
    let denom = (xa - xb) * (xa - xc) * (xb - xc);
    let (center, vertex) = if denom != 0.0 {
        let a = (xc * (yb - ya) + xb * (ya - yc) + xa * (yc - yb)) / denom;
        let b = (xc * xc * (ya - yb) + xb * xb * (yc - ya) + xa * xa * (yb - yc)) / denom;
        let c0 = (xb * xc * (xb - xc) * ya + xc * xa * (xc - xa) * yb + xa * xb * (xa - xb) * yc) / denom;
        if a < 0.0 {
            let xv = (-b / (2.0 * a)).clamp(xa, xc);
            (xv, (a * xv * xv + b * xv + c0).max(yb))
        } else {
            (xb, yb)
        }
    } else {
        (xb, yb)
    };

    let half = 0.5 * height;
    let left = (0..index)
        .rev()
        .find(|&j| d[j] < half)
        .map(|j| crossing(x[j], d[j], x[j + 1], d[j + 1], half))
        .ok_or_else(|| Error::NoPeak("left half-maximum crossing outside the sweep".into()))?;
    let right = (index + 1..n)
        .find(|&j| d[j] < half)
        .map(|j| crossing(x[j - 1], d[j - 1], x[j], d[j], half))
        .ok_or_else(|| Error::NoPeak("right half-maximum crossing outside the sweep".into()))?;

    let peak = baseline + polarity * vertex;
    let excursion = (peak - baseline).abs();
    let contrast = if baseline != 0.0 { excursion / baseline.abs() } else { excursion };
    Ok(LineshapeMetrics { center, peak, baseline, contrast, fwhm: right - left, polarity, noise, index })
}
