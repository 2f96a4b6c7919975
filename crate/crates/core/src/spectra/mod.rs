//! Densities of states of the level operators and their convergence.

mod eigen;
mod limits;
mod measure;

pub use eigen::{log_abs_det, sym_eigenvalues, tridiagonal_eigenvalues, EigenResult};
pub use limits::{
    arcsine_cdf, julia_backward, julia_backward_from, BernoulliCantor, GrigLimit, JuliaMode, JuliaPoints, Quadratic,
};
pub use measure::{Measure1D, Metric};

use crate::error::{Error, Result};
use crate::groups::Builtin;
use crate::pencils::PencilScheme;
use rayon::prelude::*;
use serde::Serialize;

/// Residual tolerance for every eigen-decomposition, relative to `‖M‖_F`.
pub const EIGEN_TOL: f64 = 1e-10;

/// Which line of the spectral plane a density of states is read on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "line", rename_all = "snake_case")]
pub enum Slice {
    /// `λ = λ₀`, eigenvalues in `μ` (Grigorchuk).
    Lambda { value: f64 },
    /// `μ = μ₀`, eigenvalues in `λ`.
    Mu { value: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct DosResult {
    pub group: Builtin,
    pub level: usize,
    pub slice: Slice,
    /// Eigenvalues after the group's normalization, each of weight `d^{-n}`.
    pub measure: Measure1D,
    pub residual: f64,
}

impl DosResult {
    pub fn count(&self) -> usize {
        self.measure.len()
    }

    /// Clusters at the default tolerance `1e-8 × spectral radius`.
    pub fn atoms(&self) -> Vec<(f64, f64)> {
        let r = self.measure.points.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1.0);
        self.measure.atoms(1e-8 * r)
    }

    /// `level,eigenvalue,multiplicity` rows, 17 significant digits.
    pub fn to_csv_rows(&self) -> Vec<String> {
        let scale = self.dimension() as f64;
        self.atoms()
            .into_iter()
            .map(|(x, m)| format!("{},{:.16e},{}", self.level, x, (m * scale).round() as u64))
            .collect()
    }

    pub fn dimension(&self) -> usize {
        let d = match self.group {
            Builtin::Hanoi => 3usize,
            _ => 2,
        };
        d.pow(self.level as u32)
    }
}

pub fn dos_budget(group: Builtin) -> usize {
    match group {
        Builtin::Hanoi => 7,
        _ => 12,
    }
}

/// Density of states at level `n` on the group's default line.
pub fn dos(group: Builtin, n: usize) -> Result<DosResult> {
    let slice = match group {
        Builtin::Grigorchuk => Slice::Lambda { value: -1.0 },
        Builtin::Lamplighter => Slice::Mu { value: 0.0 },
        Builtin::Hanoi => Slice::Mu { value: 1.0 },
        Builtin::Custom => return Err(Error::UnknownName("custom groups have no default slice".into())),
    };
    dos_on(group, n, slice)
}

/// Density of states on an explicit line. For `Slice::Lambda` the returned
/// points are `x = (μ + 1)/4`.
pub fn dos_on(group: Builtin, n: usize, slice: Slice) -> Result<DosResult> {
    if n > dos_budget(group) {
        return Err(Error::Budget(format!("level {n} exceeds the float budget {} for {}", dos_budget(group), group.name())));
    }
    let scheme = PencilScheme::builtin(group)?;
    if n < scheme.min_level {
        return Err(Error::Level { level: n, reason: "below the first defined level".into() });
    }
    // On each line the remaining parameter enters as minus the identity, so
    // the spectrum is that of the pencil with it set to zero.
    let mat = match slice {
        Slice::Lambda { value } => scheme.assemble_f64(n, value, 0.0)?,
        Slice::Mu { value } => scheme.assemble_f64(n, 0.0, value)?,
    };
    let size = (mat.len() as f64).sqrt().round() as usize;
    let eig = sym_eigenvalues(&mat, size, EIGEN_TOL, 8)?;
    let w = 1.0 / size as f64;
    let measure = match slice {
        Slice::Lambda { .. } => Measure1D::from_weighted(eig.values.iter().map(|&m| ((m + 1.0) / 4.0, w))),
        Slice::Mu { .. } => Measure1D::from_weighted(eig.values.iter().map(|&l| (l, w))),
    };
    Ok(DosResult { group, level: n, slice, measure, residual: eig.residual })
}

/// Densities of states for several levels, computed in parallel.
pub fn dos_levels(group: Builtin, levels: &[usize]) -> Result<Vec<DosResult>> {
    levels.par_iter().map(|&n| dos(group, n)).collect()
}

/// Total variation between the cluster decompositions of two atomic
/// measures; clusters closer than `tol` are identified.
pub fn atomic_tv(a: &Measure1D, b: &Measure1D, tol: f64) -> f64 {
    let mut pts: Vec<(f64, f64)> = a.atoms(tol);
    pts.extend(b.atoms(tol).into_iter().map(|(x, m)| (x, -m)));
    pts.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut s = 0.0;
    let mut i = 0;
    while i < pts.len() {
        let mut acc = pts[i].1;
        let mut j = i + 1;
        while j < pts.len() && pts[j].0 - pts[j - 1].0 <= tol {
            acc += pts[j].1;
            j += 1;
        }
        s += acc.abs();
        i = j;
    }
    0.5 * s
}

/// Eigenvalue clusters present in `cur` but absent from `prev` within `tol`.
pub fn new_eigenvalues(prev: &Measure1D, cur: &Measure1D, tol: f64) -> Vec<f64> {
    let old = &prev.points;
    cur.atoms(1e-9)
        .into_iter()
        .map(|(x, _)| x)
        .filter(|x| {
            let k = old.partition_point(|p| p < x);
            let near = |i: usize| old.get(i).is_some_and(|p| (p - x).abs() <= tol);
            !(near(k) || (k > 0 && near(k - 1)))
        })
        .collect()
}

/// Hanoi eigenvalues that stay isolated from the Cantor Julia set of
/// `z² − z − 3`: zero and its first two backward images under the
/// renormalization, which sit in the gaps of the Cantor set.
pub fn hanoi_exceptional_atoms() -> Vec<f64> {
    let s13 = 13f64.sqrt();
    let r = (15.0 - 2.0 * s13).sqrt();
    vec![0.0, (1.0 - s13) / 2.0, (1.0 + s13) / 2.0, (1.0 - r) / 2.0, (1.0 + r) / 2.0]
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub level: usize,
    /// Distance to the reference (closed form, or the finest level).
    pub distance: f64,
    /// Distance between this level and the next one.
    pub successive: Option<f64>,
    /// `successive(n+1) / successive(n)`.
    pub ratio: Option<f64>,
    /// Total variation of atoms between this level and the next.
    pub tv_successive: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub group: Builtin,
    pub metric: Metric,
    pub reference: String,
    pub rows: Vec<ConvergenceRow>,
    /// Slope of `log distance` against `n` by least squares.
    pub fitted_log_rate: f64,
    /// Slope of the log of the predicted decay over the same range.
    pub predicted_log_rate: f64,
}

impl ConvergenceReport {
    pub fn distances(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.distance).collect()
    }
    pub fn ratios(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.ratio).collect()
    }
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Predicted log-decay of `ω_n − ω` for each group.
fn predicted_log(group: Builtin, n: f64) -> f64 {
    match group {
        Builtin::Grigorchuk => -n * 2f64.ln(),
        Builtin::Lamplighter => n.ln() - (n - 1.0) * 2f64.ln(),
        Builtin::Hanoi => n * (2f64 / 3.0).ln(),
        Builtin::Custom => f64::NAN,
    }
}

/// Distances of `ω_n` to the limit over `levels`. Grigorchuk is compared in
/// Kolmogorov distance with the closed form at `λ₀ = −1`; the atomic limits
/// are replaced by the finest level in W₁.
pub fn convergence_report(group: Builtin, levels: std::ops::RangeInclusive<usize>) -> Result<ConvergenceReport> {
    let levels: Vec<usize> = levels.collect();
    if levels.len() < 3 {
        return Err(Error::Insufficient(format!("{} levels given, at least 3 needed for a fit", levels.len())));
    }
    let all = dos_levels(group, &levels)?;
    let (metric, reference, dist): (Metric, String, Vec<f64>) = match group {
        Builtin::Grigorchuk => {
            let lim = GrigLimit::new(-1.0)?;
            let d = all.iter().map(|r| r.measure.kolmogorov_to(|x| lim.cdf_x(x))).collect();
            (Metric::Kolmogorov, "closed form at lambda=-1".into(), d)
        }
        _ => {
            let fin = &all.last().expect("nonempty").measure;
            let d = all.iter().map(|r| r.measure.distance(fin, Metric::Wasserstein1)).collect::<Result<Vec<_>>>()?;
            let n = *levels.last().expect("nonempty");
            (Metric::Wasserstein1, format!("level {n}"), d)
        }
    };
    let mut succ = Vec::new();
    let mut tv = Vec::new();
    for w in all.windows(2) {
        succ.push(w[0].measure.distance(&w[1].measure, metric)?);
        tv.push(atomic_tv(&w[0].measure, &w[1].measure, 1e-8 * 5.0));
    }
    let rows: Vec<ConvergenceRow> = levels
        .iter()
        .enumerate()
        .map(|(i, &n)| ConvergenceRow {
            level: n,
            distance: dist[i],
            successive: succ.get(i).copied(),
            ratio: match (succ.get(i), succ.get(i + 1)) {
                (Some(a), Some(b)) if *a > 0.0 => Some(b / a),
                _ => None,
            },
            tv_successive: tv.get(i).copied(),
        })
        .collect();
    // Fit on successive distances for atomic limits: the distance to the
    // finest level is zero at the last row.
    let (xs, ys): (Vec<f64>, Vec<f64>) = match group {
        Builtin::Grigorchuk => {
            levels.iter().zip(&dist).filter(|(_, d)| **d > 0.0).map(|(n, d)| (*n as f64, d.ln())).unzip()
        }
        _ => levels.iter().zip(&succ).filter(|(_, d)| **d > 0.0).map(|(n, d)| (*n as f64, d.ln())).unzip(),
    };
    if xs.len() < 2 {
        return Err(Error::Insufficient("fewer than two positive distances".into()));
    }
    let pred: Vec<f64> = xs.iter().map(|&n| predicted_log(group, n)).collect();
    Ok(ConvergenceReport {
        group,
        metric,
        reference,
        rows,
        fitted_log_rate: slope(&xs, &ys),
        predicted_log_rate: slope(&xs, &pred),
    })
}
