use crate::error::{Error, Result};
use crate::pencils::PencilScheme;
use rayon::prelude::*;
use serde::Serialize;

/// Potential `u_n = d^{-n} log|P_n|` evaluated through the recursion:
///
/// `u_n = Σ_{j<n-s} Σ_i m_i d^{-(j+p_i)} log|Q_i(R^j)| + d^{-n} log|P_s(R^{n-s})|`
///
/// where `s` is the seed level.
#[derive(Debug, Clone)]
pub struct RecursionPotential {
    pub scheme: PencilScheme,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum PotentialValue {
    Finite(f64),
    NegInfinity,
}

impl PotentialValue {
    pub fn as_f64(self) -> f64 {
        match self {
            PotentialValue::Finite(v) => v,
            PotentialValue::NegInfinity => f64::NEG_INFINITY,
        }
    }
}

/// `log|f(x, y)|` for a polynomial in the affine chart, given the point as a
/// unit-norm homogeneous triple.
fn log_abs_affine(f: &crate::ratmaps::MultiPoly, v: &[f64; 3]) -> Option<f64> {
    let deg = f.total_degree()?;
    let h = f.homogenize(deg);
    let val = h.eval_f64(v);
    if val == 0.0 {
        return None;
    }
    Some(val.abs().ln() - deg as f64 * v[2].abs().ln())
}

pub fn potential(s: &RecursionPotential, l: f64, mu: f64, n: usize) -> Result<PotentialValue> {
    let sch = &s.scheme;
    let seed = sch.seed_level;
    let n = n.max(seed);
    let d = sch.d as f64;
    if sch.factors.is_empty() && sch.seed.total_degree() == Some(0) {
        let c = sch.seed.eval_f64(&[l, mu]);
        return Ok(PotentialValue::Finite(c.abs().ln() / d.powi(n as i32)));
    }
    let norm = (l * l + mu * mu + 1.0).sqrt();
    let mut v = [l / norm, mu / norm, 1.0 / norm];
    let mut acc = 0.0;
    for j in 0..n - seed {
        if v[2] == 0.0 {
            return Err(Error::OrbitIndeterminate(j));
        }
        for f in &sch.factors {
            match log_abs_affine(&f.q, &v) {
                Some(x) => acc += f.multiplier as f64 * d.powi(-((j as i32) + f.offset as i32)) * x,
                None => return Ok(PotentialValue::NegInfinity),
            }
        }
        v = sch.map.eval_f64(&v).map_err(|_| Error::OrbitIndeterminate(j + 1))?;
    }
    if v[2] == 0.0 {
        return Err(Error::OrbitIndeterminate(n - seed));
    }
    match log_abs_affine(&sch.seed, &v) {
        Some(x) => Ok(PotentialValue::Finite(acc + d.powi(-(n as i32)) * x)),
        None => Ok(PotentialValue::NegInfinity),
    }
}

/// Potential sampled on a real window; cells whose orbit fails are NaN.
#[derive(Debug, Clone, Serialize)]
pub struct GridField {
    pub window: [f64; 4],
    pub resolution: usize,
    pub values: Vec<f64>,
}

impl GridField {
    pub fn coords(&self, i: usize, j: usize) -> (f64, f64) {
        let [x0, x1, y0, y1] = self.window;
        let r = (self.resolution.max(2) - 1) as f64;
        (x0 + (x1 - x0) * i as f64 / r, y0 + (y1 - y0) * j as f64 / r)
    }
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.resolution + i]
    }
    pub fn flagged(&self) -> usize {
        self.values.iter().filter(|v| !v.is_finite()).count()
    }
}

pub fn potential_grid(s: &RecursionPotential, window: [f64; 4], resolution: usize, n: usize) -> Result<GridField> {
    if resolution > 2048 {
        return Err(Error::Budget("grid resolution is capped at 2048".into()));
    }
    let mut field = GridField { window, resolution, values: vec![] };
    let vals: Vec<f64> = (0..resolution * resolution)
        .into_par_iter()
        .map(|k| {
            let (x, y) = field.coords(k % resolution, k / resolution);
            match potential(s, x, y, n) {
                Ok(v) => v.as_f64(),
                Err(_) => f64::NAN,
            }
        })
        .collect();
    field.values = vals;
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::Builtin;
    use crate::ratmaps::{MapName, MultiPoly, RationalMapP2};

    fn pot(kind: Builtin) -> RecursionPotential {
        RecursionPotential { scheme: PencilScheme::builtin(kind).unwrap() }
    }

    #[test]
    fn factor_zero_gives_sentinel() {
        assert_eq!(potential(&pot(Builtin::Grigorchuk), 0.3, 2.0, 8).unwrap(), PotentialValue::NegInfinity);
    }

    #[test]
    fn matches_direct_determinant() {
        for kind in [Builtin::Grigorchuk, Builtin::Lamplighter, Builtin::Hanoi] {
            let p = pot(kind);
            let (l, m) = (0.37, -0.81);
            for n in (p.scheme.seed_level + 1)..=4 {
                let mat = p.scheme.assemble_f64(n, l, m).unwrap();
                let size = (mat.len() as f64).sqrt() as usize;
                let direct = crate::spectra::log_abs_det(&mat, size) / (p.scheme.d as f64).powi(n as i32);
                let via = potential(&p, l, m, n).unwrap().as_f64();
                assert!((direct - via).abs() < 1e-9, "{kind:?} n={n}: {direct} vs {via}");
            }
        }
    }

    #[test]
    fn trivial_scheme_is_zero() {
        let s = PencilScheme::custom(2, RationalMapP2::builtin(MapName::RL), vec![], 0, MultiPoly::from_int(2, 1));
        let g = potential_grid(&RecursionPotential { scheme: s }, [-4.0, 4.0, -4.0, 4.0], 16, 5).unwrap();
        assert!(g.values.iter().all(|v| *v == 0.0));
    }
}
