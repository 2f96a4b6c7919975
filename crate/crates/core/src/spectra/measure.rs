use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Finite measure on the line: strictly increasing points, positive weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Measure1D {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Kolmogorov,
    Wasserstein1,
}

impl std::str::FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kolmogorov" | "ks" => Ok(Metric::Kolmogorov),
            "wasserstein1" | "w1" => Ok(Metric::Wasserstein1),
            o => Err(Error::UnknownName(o.to_string())),
        }
    }
}

impl Measure1D {
    /// Equal weights `1/len` on the samples; exact duplicates merge.
    pub fn uniform(samples: &[f64]) -> Self {
        let w = 1.0 / samples.len().max(1) as f64;
        Self::from_weighted(samples.iter().map(|&x| (x, w)))
    }

    pub fn from_weighted(pairs: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut v: Vec<(f64, f64)> = pairs.into_iter().filter(|p| p.1 > 0.0).collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut m = Measure1D::default();
        for (x, w) in v {
            if m.points.last() == Some(&x) {
                *m.weights.last_mut().expect("nonempty") += w;
            } else {
                m.points.push(x);
                m.weights.push(w);
            }
        }
        m
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// `m((-∞, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.points.partition_point(|&p| p <= x);
        self.weights[..k].iter().sum()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Measure1D {
        Measure1D::from_weighted(self.points.iter().zip(&self.weights).map(|(&x, &w)| (f(x), w)))
    }

    /// Merge chains of points with consecutive gaps `<= tol`; centers are
    /// mass-weighted means.
    pub fn atoms(&self, tol: f64) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64, f64)> = Vec::new(); // (weighted sum, mass, last point)
        for (&x, &w) in self.points.iter().zip(&self.weights) {
            match out.last_mut() {
                Some(c) if x - c.2 <= tol => {
                    c.0 += x * w;
                    c.1 += w;
                    c.2 = x;
                }
                _ => out.push((x * w, w, x)),
            }
        }
        out.into_iter().map(|(s, m, _)| (s / m, m)).collect()
    }

    /// Distance between two measures of equal mass.
    pub fn distance(&self, other: &Measure1D, metric: Metric) -> Result<f64> {
        let (a, b) = (self.mass(), other.mass());
        if (a - b).abs() > 1e-9 * a.max(b).max(1.0) {
            return Err(Error::MassMismatch(a, b));
        }
        let mut xs: Vec<f64> = self.points.iter().chain(&other.points).copied().collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let (mut i, mut j) = (0, 0);
        let (mut fa, mut fb) = (0.0, 0.0);
        let mut sup = 0.0f64;
        let mut w1 = 0.0;
        for (k, &x) in xs.iter().enumerate() {
            while i < self.points.len() && self.points[i] <= x {
                fa += self.weights[i];
                i += 1;
            }
            while j < other.points.len() && other.points[j] <= x {
                fb += other.weights[j];
                j += 1;
            }
            sup = sup.max((fa - fb).abs());
            if let Some(&nx) = xs.get(k + 1) {
                w1 += (fa - fb).abs() * (nx - x);
            }
        }
        Ok(match metric {
            Metric::Kolmogorov => sup,
            Metric::Wasserstein1 => w1,
        })
    }

    /// Sup distance to a continuous CDF, checked on both sides of each atom.
    pub fn kolmogorov_to(&self, cdf: impl Fn(f64) -> f64) -> f64 {
        let mut acc = 0.0;
        let mut best = 0.0f64;
        for (&x, &w) in self.points.iter().zip(&self.weights) {
            let f = cdf(x);
            best = best.max((acc - f).abs());
            acc += w;
            best = best.max((acc - f).abs());
        }
        best
    }

    /// W₁ to a probability law given by its quantile function, integrating
    /// `|Q_m(u) − Q(u)|` with the midpoint rule on `steps` cells.
    pub fn w1_to_quantile(&self, quantile: impl Fn(f64) -> f64, steps: usize) -> f64 {
        let total = self.mass();
        let mut cum = Vec::with_capacity(self.len());
        let mut acc = 0.0;
        for w in &self.weights {
            acc += w / total;
            cum.push(acc);
        }
        let mut s = 0.0;
        let h = 1.0 / steps as f64;
        for k in 0..steps {
            let u = (k as f64 + 0.5) * h;
            let idx = cum.partition_point(|&c| c < u).min(self.len() - 1);
            s += (self.points[idx] - quantile(u)).abs();
        }
        s * h
    }

    /// W₁ to a continuous CDF on `[lo, hi]` by trapezoidal integration of
    /// `|F_m − F|` on a uniform grid refined with the atom positions.
    pub fn w1_to_cdf(&self, cdf: impl Fn(f64) -> f64, lo: f64, hi: f64, steps: usize) -> f64 {
        let mut xs: Vec<f64> = (0..=steps).map(|k| lo + (hi - lo) * k as f64 / steps as f64).collect();
        xs.extend(self.points.iter().copied().filter(|x| *x > lo && *x < hi));
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let mut s = 0.0;
        for win in xs.windows(2) {
            let (a, b) = (win[0], win[1]);
            let fm = self.cdf(a);
            let mid = 0.5 * (a + b);
            let d = |x: f64| (fm - cdf(x)).abs();
            s += (b - a) * (d(a) + 4.0 * d(mid) + d(b)) / 6.0;
        }
        s
    }
}
