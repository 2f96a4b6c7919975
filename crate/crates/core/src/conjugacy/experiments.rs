use crate::error::{Error, Result};
use crate::ratmaps::{MapName, RationalMapP2};
use crate::spectra::{arcsine_cdf, julia_backward_from, BernoulliCantor, JuliaMode, Measure1D, Quadratic};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

/// Quadrature resolution for W₁ against continuous laws.
const W1_STEPS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// `(η, z) ↦ (η, z²)`
    ProductSquare,
    /// `(η, z) ↦ (η, (ηz − 4)/z)`
    Twist,
    /// `(η, θ) ↦ (η² − η − 3, (η−1)(η+2)θ/(η+3))`
    SkewCantor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelSystem {
    pub kind: ModelKind,
    /// Base parameter window.
    pub window: [f64; 2],
}

impl ModelSystem {
    pub fn new(kind: ModelKind) -> Self {
        let window = match kind {
            ModelKind::ProductSquare => [-1.0, 1.0],
            ModelKind::Twist => [-4.0, 4.0],
            ModelKind::SkewCantor => [-2.0, 3.0],
        };
        ModelSystem { kind, window }
    }

    pub fn map(&self) -> RationalMapP2 {
        RationalMapP2::builtin(match self.kind {
            ModelKind::ProductSquare => MapName::ModelSquare,
            ModelKind::Twist => MapName::ModelTwist,
            ModelKind::SkewCantor => MapName::ModelSkew,
        })
    }

    pub fn apply(&self, eta: f64, z: f64) -> (f64, f64) {
        match self.kind {
            ModelKind::ProductSquare => (eta, z * z),
            ModelKind::Twist => (eta, (eta * z - 4.0) / z),
            ModelKind::SkewCantor => (eta * eta - eta - 3.0, (eta - 1.0) * (eta + 2.0) / (eta + 3.0) * z),
        }
    }

    /// Rotation angle `2 arccos(η/4)` of the twist fiber map on the elliptic
    /// locus `|η| < 4`, from the normalized trace of `[[η, −4], [1, 0]]`.
    pub fn rotation_number(&self, eta: f64) -> Option<f64> {
        (self.kind == ModelKind::Twist && eta.abs() < 4.0).then(|| 2.0 * (eta / 4.0).acos())
    }

    /// Checks strict monotonicity of the rotation number on a grid of the
    /// elliptic locus.
    pub fn certify_rotation_monotone(&self, grid: usize) -> bool {
        let vals: Vec<f64> = (1..grid)
            .filter_map(|k| self.rotation_number(-4.0 + 8.0 * k as f64 / grid as f64))
            .collect();
        vals.len() == grid - 1 && vals.windows(2).all(|w| w[1] < w[0])
    }
}

/// Graph `β = Σ c_k α^k` of a polynomial over the base.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Graph {
    pub coeffs: Vec<f64>,
}

impl Graph {
    pub fn line(slope: f64, intercept: f64) -> Self {
        Graph { coeffs: vec![intercept, slope] }
    }
    pub fn eval(&self, a: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * a + c)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TwistReport {
    pub n: usize,
    pub count: usize,
    /// Relative winding of the two graphs around the fixed-point circle.
    pub winding: i64,
    /// Base coordinates of the intersection points.
    pub roots: Vec<f64>,
    pub measure: Measure1D,
    /// W₁ to the law of `4 cos(ω/2)`, ω uniform: arcsine on `[−4, 4]`.
    pub w1_rotation_law: f64,
    /// W₁ to the arcsine law on `[−2, 2]`.
    pub w1_narrow_arcsine: f64,
}

/// Twisted phase: `θ_L − θ_C − nω`, with `θ_h = arg((h − z₊)/(h − z₋))`
/// and `z± = 2e^{±iω/2}` the fixed points of the fiber map.
fn twist_phase(n: usize, curve: &Graph, line: &Graph, omega: f64) -> (f64, f64) {
    let a = 4.0 * (omega / 2.0).cos();
    let zp = Complex64::from_polar(2.0, omega / 2.0);
    let zm = zp.conj();
    let theta = |h: f64| ((h - zp) / (h - zm)).arg();
    let rel = theta(line.eval(a)) - theta(curve.eval(a));
    (rel - n as f64 * omega, rel)
}

fn unwrap_near(x: f64, reference: f64) -> f64 {
    x - TAU * ((x - reference) / TAU).round()
}

/// Intersections of `F̃^{−n}(curve)` with `line` over the elliptic locus.
pub fn twist_experiment(n: usize, curve: &Graph, line: &Graph) -> Result<TwistReport> {
    if n == 0 || n > 200 {
        return Err(Error::Budget("twist iterate must lie in 1..=200".into()));
    }
    let grid = 64 * (n + 8);
    let (lo, hi) = (1e-9, TAU - 1e-9);
    let omega_at = |k: usize| lo + (hi - lo) * k as f64 / grid as f64;
    let mut prev_w = omega_at(0);
    let (mut prev_phi, first_rel) = twist_phase(n, curve, line, prev_w);
    let (mut prev_rel, mut rel_total) = (first_rel, 0.0);
    let mut roots = Vec::new();
    for k in 1..=grid {
        let w = omega_at(k);
        let (raw, rel) = twist_phase(n, curve, line, w);
        let rel_u = unwrap_near(rel, prev_rel);
        rel_total += rel_u - prev_rel;
        prev_rel = rel_u;
        let phi = unwrap_near(raw, prev_phi);
        if (phi - prev_phi).abs() > PI / 2.0 {
            return Err(Error::Bracketing(format!("phase jump {:.3} near ω = {w}", phi - prev_phi)));
        }
        let (ka, kb) = ((prev_phi / TAU).floor(), (phi / TAU).floor());
        if ka != kb {
            let target = TAU * ka.max(kb);
            let (mut a, mut b) = (prev_w, w);
            let mut fa = prev_phi - target;
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let fm = unwrap_near(twist_phase(n, curve, line, m).0, prev_phi) - target;
                if (fm < 0.0) == (fa < 0.0) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
                if b - a < 1e-15 {
                    break;
                }
            }
            roots.push(4.0 * (0.25 * (a + b)).cos());
        }
        prev_w = w;
        prev_phi = phi;
    }
    roots.sort_by(f64::total_cmp);
    let measure = Measure1D::uniform(&roots);
    let (w1a, w1b) = if roots.is_empty() {
        (f64::NAN, f64::NAN)
    } else {
        (
            measure.w1_to_quantile(|u| -4.0 * (PI * u).cos(), W1_STEPS),
            measure.w1_to_quantile(|u| -2.0 * (PI * u).cos(), W1_STEPS),
        )
    };
    Ok(TwistReport {
        n,
        count: roots.len(),
        winding: (rel_total / TAU).round() as i64,
        roots,
        measure,
        w1_rotation_law: w1a,
        w1_narrow_arcsine: w1b,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SkewReport {
    pub eta0: f64,
    pub n: usize,
    /// Base points of the preimage fibers.
    pub fibers: Vec<f64>,
    /// Points where the fibers cross the line.
    pub slice: Vec<(f64, f64)>,
    pub measure: Measure1D,
    /// W₁ to the Bernoulli measure on the Cantor Julia set.
    pub w1_to_mp: f64,
    /// W₁ to the depth-12 backward orbit of the repelling fixed point.
    pub w1_to_julia12: f64,
}

/// Preimages of the fiber `{η₀} × C` under `n` iterates of the skew product,
/// sliced by a non-horizontal line.
pub fn skew_cantor_experiment(eta0: f64, n: usize, line: &Graph) -> Result<SkewReport> {
    if n > 14 {
        return Err(Error::Budget("skew experiment depth is capped at 14".into()));
    }
    if line.coeffs.iter().skip(1).all(|c| *c == 0.0) {
        return Err(Error::Degenerate("slicing line is horizontal".into()));
    }
    let pts = julia_backward_from(Quadratic::HANOI, Complex64::new(eta0, 0.0), n, JuliaMode::FullTree, true, 0)?;
    let fibers: Vec<f64> = pts.points.iter().map(|z| z.re).collect();
    let slice = fibers.iter().map(|&e| (e, line.eval(e))).collect();
    let measure = Measure1D::uniform(&fibers);
    let cantor = BernoulliCantor::new(Quadratic::HANOI)?;
    let w1_to_mp = measure.w1_to_cdf(|x| cantor.cdf(x), cantor.lo, cantor.hi, W1_STEPS);
    let jb = julia_backward_from(
        Quadratic::HANOI,
        Quadratic::HANOI.repelling_fixed_point(),
        12,
        JuliaMode::FullTree,
        true,
        0,
    )?;
    let w1_to_julia12 = measure.distance(jb.measure.as_ref().expect("real points"), crate::spectra::Metric::Wasserstein1)?;
    Ok(SkewReport { eta0, n, fibers, slice, measure, w1_to_mp, w1_to_julia12 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BackwardModel {
    Square,
    Cheb,
    Cantor,
}

impl std::str::FromStr for BackwardModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "square" => Ok(BackwardModel::Square),
            "cheb" => Ok(BackwardModel::Cheb),
            "cantor" => Ok(BackwardModel::Cantor),
            o => Err(Error::UnknownName(o.to_string())),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BackwardSeries {
    pub model: BackwardModel,
    pub seed: f64,
    pub levels: Vec<usize>,
    /// W₁ to the limit law; angular (in turns) for the square map.
    pub w1: Vec<f64>,
    pub kolmogorov: Vec<f64>,
    /// For the square map, `| |z|^{2^{-n}} − 1 |` at the last level.
    pub radius_deviation: Option<f64>,
}

/// Uniform measure on `f^{-k}(seed)` for `k = 1..=n`, compared to the
/// limit law of each model.
pub fn backward_equidistribution(model: BackwardModel, seed: f64, n: usize) -> Result<BackwardSeries> {
    if !seed.is_finite() || (model == BackwardModel::Square && seed == 0.0) {
        return Err(Error::ExceptionalSeed(format!("{seed} is exceptional")));
    }
    if n > 22 {
        return Err(Error::Budget("backward depth is capped at 22".into()));
    }
    let levels: Vec<usize> = (1..=n).collect();
    let mut w1 = Vec::with_capacity(n);
    let mut ks = Vec::with_capacity(n);
    let mut radius_deviation = None;
    match model {
        BackwardModel::Square => {
            let z0 = Complex64::new(seed, 0.0);
            for &k in &levels {
                let m = 1usize << k;
                let turns: Vec<f64> =
                    (0..m).map(|j| ((z0.arg() + TAU * j as f64) / m as f64 / TAU).rem_euclid(1.0)).collect();
                let meas = Measure1D::uniform(&turns);
                w1.push(meas.w1_to_quantile(|u| u, W1_STEPS));
                ks.push(meas.kolmogorov_to(|x| x.clamp(0.0, 1.0)));
                radius_deviation = Some((z0.norm().powf(1.0 / m as f64) - 1.0).abs());
            }
        }
        BackwardModel::Cheb | BackwardModel::Cantor => {
            let p = if model == BackwardModel::Cheb { Quadratic::CHEB } else { Quadratic::HANOI };
            let cantor = BernoulliCantor::new(Quadratic::HANOI)?;
            let mut cur = vec![Complex64::new(seed, 0.0)];
            for _ in &levels {
                let mut next = Vec::with_capacity(cur.len() * 2);
                for z in &cur {
                    let pre = julia_backward_from(p, *z, 1, JuliaMode::FullTree, true, 0)?;
                    next.extend(pre.points);
                }
                cur = next;
                let meas = Measure1D::uniform(&cur.iter().map(|z| z.re).collect::<Vec<_>>());
                if model == BackwardModel::Cheb {
                    w1.push(meas.w1_to_quantile(|u| -(PI * u).cos(), W1_STEPS));
                    ks.push(meas.kolmogorov_to(arcsine_cdf));
                } else {
                    w1.push(meas.w1_to_cdf(|x| cantor.cdf(x), cantor.lo, cantor.hi, W1_STEPS));
                    ks.push(meas.kolmogorov_to(|x| cantor.cdf(x)));
                }
            }
        }
    }
    Ok(BackwardSeries { model, seed, levels, w1, kolmogorov: ks, radius_deviation })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lines() -> (Graph, Graph) {
        (Graph::line(1.0 / 3.0, 5.0), Graph::line(1.0, 0.5))
    }

    #[test]
    fn twist_small_counts() {
        let (c, l) = lines();
        for n in [3, 4, 10] {
            assert_eq!(twist_experiment(n, &c, &l).unwrap().count, n);
        }
    }

    #[test]
    fn twist_roots_solve_the_equation() {
        let (c, l) = lines();
        let r = twist_experiment(7, &c, &l).unwrap();
        for &a in &r.roots {
            let mut b = l.eval(a);
            for _ in 0..7 {
                b = (a * b - 4.0) / b;
            }
            let target = c.eval(a);
            assert!((b - target).abs() < 1e-6 * (1.0 + target.abs()), "α={a}: {b} vs {target}");
        }
    }

    #[test]
    fn rotation_monotone() {
        assert!(ModelSystem::new(ModelKind::Twist).certify_rotation_monotone(1000));
        assert_eq!(ModelSystem::new(ModelKind::Twist).rotation_number(4.5), None);
    }

    #[test]
    fn skew_first_level() {
        let r = skew_cantor_experiment(3.0, 1, &Graph::line(1.0, 0.0)).unwrap();
        let mut f = r.fibers.clone();
        f.sort_by(f64::total_cmp);
        assert_eq!(f, vec![-2.0, 3.0]);
        assert!(skew_cantor_experiment(3.0, 1, &Graph::line(0.0, 1.0)).is_err());
    }

    #[test]
    fn square_seed_checks() {
        assert!(matches!(backward_equidistribution(BackwardModel::Square, 0.0, 3), Err(Error::ExceptionalSeed(_))));
        let s = backward_equidistribution(BackwardModel::Square, 1.0, 5).unwrap();
        assert_eq!(s.radius_deviation, Some(0.0));
    }

    #[test]
    fn cheb_outside_interval_is_complex() {
        assert!(matches!(backward_equidistribution(BackwardModel::Cheb, -1.5, 2), Err(Error::ComplexBranch(_))));
    }
}
