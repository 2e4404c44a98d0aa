use crate::{Error, Result};

/// Smallest admissible number of grid intervals.
pub const MIN_INTERVALS: usize = 8;
pub const DEFAULT_INTERVALS: usize = 200;

/// Values on the uniform grid `t_i = i/N`, `i = 0..=N`, over `[0, 1]`,
/// interpolated by a monotone (Fritsch–Carlson) cubic.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
    slopes: Vec<f64>,
}

/// Checks that `intervals` gives an odd node count of at least 9.
pub fn check_intervals(intervals: usize) -> Result<()> {
    if intervals < MIN_INTERVALS || !intervals.is_multiple_of(2) {
        return Err(Error::input(format!(
            "grid_n must be even and at least {MIN_INTERVALS}, got {intervals}"
        )));
    }
    Ok(())
}

pub fn node(i: usize, intervals: usize) -> f64 {
    if i == intervals {
        1.0
    } else {
        i as f64 / intervals as f64
    }
}

pub fn nodes(intervals: usize) -> Vec<f64> {
    (0..=intervals).map(|i| node(i, intervals)).collect()
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::input("a grid function needs at least two nodes"));
        }
        check_intervals(values.len() - 1)?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::input(format!("grid value {i} is not finite")));
        }
        let slopes = monotone_slopes(&values);
        Ok(GridFunction { values, slopes })
    }

    pub fn zeros(intervals: usize) -> Result<Self> {
        Self::new(vec![0.0; intervals + 1])
    }

    /// Samples `f` at the grid nodes.
    pub fn from_fn(intervals: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(nodes(intervals).into_iter().map(f).collect())
    }

    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn nodes(&self) -> Vec<f64> {
        nodes(self.intervals())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Discrete sup-norm of the difference; the grids must match.
    pub fn sup_distance(&self, other: &GridFunction) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    pub fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.values.len() == other.values.len() {
            Ok(())
        } else {
            Err(Error::input(format!(
                "grid mismatch: {} vs {} intervals",
                self.intervals(),
                other.intervals()
            )))
        }
    }

    /// Interpolated value; exact at nodes.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::input(format!("t = {t} outside [0, 1]")));
        }
        let n = self.intervals();
        let nearest = (t * n as f64).round() as usize;
        if node(nearest, n) == t {
            return Ok(self.values[nearest]);
        }
        let (k, basis) = HermiteBasis::locate(t, n);
        Ok(basis.combine(&self.values, &self.slopes, k))
    }
}

/// Cubic Hermite basis at a fixed point of interval `k`, with the slope
/// terms already scaled by the interval width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct HermiteBasis {
    pub h00: f64,
    pub h10: f64,
    pub h01: f64,
    pub h11: f64,
}

impl HermiteBasis {
    pub(crate) fn locate(t: f64, intervals: usize) -> (usize, HermiteBasis) {
        let n = intervals as f64;
        let k = ((t * n).floor() as usize).min(intervals - 1);
        let h = 1.0 / n;
        let s = ((t - k as f64 * h) / h).clamp(0.0, 1.0);
        let s2 = s * s;
        let s3 = s2 * s;
        let basis = HermiteBasis {
            h00: 2.0 * s3 - 3.0 * s2 + 1.0,
            h10: (s3 - 2.0 * s2 + s) * h,
            h01: -2.0 * s3 + 3.0 * s2,
            h11: (s3 - s2) * h,
        };
        (k, basis)
    }

    #[inline]
    pub(crate) fn combine(&self, values: &[f64], slopes: &[f64], k: usize) -> f64 {
        self.h00 * values[k]
            + self.h10 * slopes[k]
            + self.h01 * values[k + 1]
            + self.h11 * slopes[k + 1]
    }
}

/// Fritsch–Carlson slopes on a uniform grid over `[0, 1]`.
pub(crate) fn monotone_slopes(values: &[f64]) -> Vec<f64> {
    let n = values.len() - 1;
    let h = 1.0 / n as f64;
    let delta: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]) / h).collect();
    let mut m = vec![0.0; n + 1];
    for k in 1..n {
        m[k] = interior_slope(delta[k - 1], delta[k]);
    }
    m[0] = end_slope(delta[0], delta[1]);
    m[n] = end_slope(delta[n - 1], delta[n - 2]);
    m
}

/// Recomputes the slopes that depend on `values[j]`: nodes `j-1..=j+1`,
/// plus an end node whose one-sided stencil reaches `j`.
pub(crate) fn update_slopes_near(values: &[f64], slopes: &mut [f64], j: usize) {
    let n = values.len() - 1;
    let h = 1.0 / n as f64;
    let delta = |k: usize| (values[k + 1] - values[k]) / h;
    let lo = j.saturating_sub(1);
    let hi = (j + 1).min(n);
    let ends = [(j <= 2).then_some(0), (j + 2 >= n).then_some(n)];
    for k in (lo..=hi).chain(ends.into_iter().flatten()) {
        slopes[k] = if k == 0 {
            end_slope(delta(0), delta(1))
        } else if k == n {
            end_slope(delta(n - 1), delta(n - 2))
        } else {
            interior_slope(delta(k - 1), delta(k))
        };
    }
}

fn interior_slope(left: f64, right: f64) -> f64 {
    if left == 0.0 || right == 0.0 || left.signum() != right.signum() {
        0.0
    } else {
        // Harmonic mean; equal spacing makes the Fritsch–Butland weights equal.
        2.0 / (1.0 / left + 1.0 / right)
    }
}

/// Shape-preserving three-point end slope.
fn end_slope(first: f64, second: f64) -> f64 {
    let d = 1.5 * first - 0.5 * second;
    if d.signum() != first.signum() {
        0.0
    } else if first.signum() != second.signum() && d.abs() > 3.0 * first.abs() {
        3.0 * first
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_count_rules() {
        assert!(GridFunction::zeros(8).is_ok());
        assert!(GridFunction::zeros(7).is_err());
        assert!(GridFunction::zeros(6).is_err());
        assert!(GridFunction::new(vec![0.0, f64::NAN, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn exact_at_nodes() {
        let g = GridFunction::from_fn(200, |t| (7.0 * t).sin() + t * t).unwrap();
        for (i, t) in g.nodes().into_iter().enumerate() {
            assert_eq!(g.eval(t).unwrap(), g.values()[i]);
        }
    }

    #[test]
    fn reproduces_linear_data_and_converges() {
        let g = GridFunction::from_fn(8, |t| 2.0 * t - 1.0).unwrap();
        for &t in &[0.01, 0.33, 0.9999] {
            assert!((g.eval(t).unwrap() - (2.0 * t - 1.0)).abs() < 1e-14);
        }
        let err = |n: usize| {
            let g = GridFunction::from_fn(n, |t| (3.0 * t).sin()).unwrap();
            (0..1000)
                .map(|i| {
                    let t = (i as f64 + 0.5) / 1000.0;
                    (g.eval(t).unwrap() - (3.0 * t).sin()).abs()
                })
                .fold(0.0, f64::max)
        };
        let (coarse, fine) = (err(50), err(200));
        assert!(fine < 1e-4 && fine < coarse / 8.0, "{coarse:e} {fine:e}");
    }

    #[test]
    fn no_overshoot_on_step_data() {
        let g = GridFunction::from_fn(20, |t| if t < 0.5 { 0.0 } else { 1.0 }).unwrap();
        for i in 0..=1000 {
            let v = g.eval(i as f64 / 1000.0).unwrap();
            assert!((0.0..=1.0).contains(&v), "{v}");
        }
    }

    #[test]
    fn local_slope_update_matches_full_recompute() {
        let mut values: Vec<f64> = nodes(16).iter().map(|t| (5.0 * t).cos()).collect();
        let mut slopes = monotone_slopes(&values);
        for j in [0, 1, 2, 3, 7, 13, 14, 15, 16] {
            values[j] += 0.3;
            update_slopes_near(&values, &mut slopes, j);
            assert_eq!(slopes, monotone_slopes(&values));
        }
    }
}
