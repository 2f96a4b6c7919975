//! Closed-form and recursive limit laws used as convergence targets.

use super::measure::Measure1D;
use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

/// CDF of the arcsine law `dθ/(π√(1−θ²))` on `[-1, 1]`.
pub fn arcsine_cdf(t: f64) -> f64 {
    0.5 + t.clamp(-1.0, 1.0).asin() / PI
}

/// Pushforward of the arcsine law in θ under `μ = ±√(4 + λ₀² − 4θλ₀)`,
/// half the mass on each branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrigLimit {
    pub lambda0: f64,
}

impl GrigLimit {
    pub fn new(lambda0: f64) -> Result<Self> {
        if !lambda0.is_finite() || lambda0 == 0.0 {
            return Err(Error::Degenerate(format!("unsupported λ₀ = {lambda0}: both branches collapse")));
        }
        Ok(GrigLimit { lambda0 })
    }

    /// Probability that the upper branch value is `<= r` (r ≥ 0).
    fn upper(&self, r: f64) -> f64 {
        if r < 0.0 {
            return 0.0;
        }
        let l = self.lambda0;
        let t = (4.0 + l * l - r * r) / (4.0 * l);
        if l > 0.0 {
            1.0 - arcsine_cdf(t)
        } else {
            arcsine_cdf(t)
        }
    }

    pub fn cdf_mu(&self, m: f64) -> f64 {
        let up = self.upper(m);
        let low = if m >= 0.0 { 1.0 } else { 1.0 - self.upper(-m) };
        0.5 * (up + low)
    }

    /// CDF in the Markov normalization `x = (μ + 1)/4`.
    pub fn cdf_x(&self, x: f64) -> f64 {
        self.cdf_mu(4.0 * x - 1.0)
    }

    /// Support intervals in μ: `±[|2 − |λ₀||, 2 + |λ₀|]`.
    pub fn support_mu(&self) -> [(f64, f64); 2] {
        let a = (2.0 - self.lambda0.abs()).abs();
        let b = 2.0 + self.lambda0.abs();
        [(-b, -a), (a, b)]
    }

    pub fn sample_mu(&self, rng: &mut impl Rng) -> f64 {
        let theta = (PI * rng.gen::<f64>()).cos();
        let l = self.lambda0;
        let r = (4.0 + l * l - 4.0 * theta * l).max(0.0).sqrt();
        if rng.gen::<bool>() {
            r
        } else {
            -r
        }
    }
}

/// Real quadratic `a z² + b z + c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quadratic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Quadratic {
    pub const HANOI: Quadratic = Quadratic { a: 1.0, b: -1.0, c: -3.0 };
    pub const SQUARE: Quadratic = Quadratic { a: 1.0, b: 0.0, c: 0.0 };
    pub const CHEB: Quadratic = Quadratic { a: 2.0, b: 0.0, c: -1.0 };

    pub fn eval(&self, z: f64) -> f64 {
        (self.a * z + self.b) * z + self.c
    }
    pub fn deriv(&self, z: f64) -> f64 {
        2.0 * self.a * z + self.b
    }

    /// Both preimages of `y` over C.
    pub fn preimages(&self, y: Complex64) -> [Complex64; 2] {
        let disc = Complex64::new(self.b * self.b - 4.0 * self.a * self.c, 0.0) + 4.0 * self.a * y;
        let s = disc.sqrt();
        [(-self.b - s) / (2.0 * self.a), (-self.b + s) / (2.0 * self.a)]
    }

    /// Fixed point with the largest multiplier modulus.
    pub fn repelling_fixed_point(&self) -> Complex64 {
        let q = Quadratic { a: self.a, b: self.b - 1.0, c: self.c };
        let [z1, z2] = q.preimages(Complex64::new(0.0, 0.0));
        let m = |z: Complex64| (2.0 * self.a * z + self.b).norm();
        if m(z1) >= m(z2) {
            z1
        } else {
            z2
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JuliaMode {
    FullTree,
    RandomWalk,
}

#[derive(Debug, Clone, Serialize)]
pub struct JuliaPoints {
    pub points: Vec<Complex64>,
    /// Present when every point is real.
    pub measure: Option<Measure1D>,
}

/// Backward orbit of the repelling fixed point. `FullTree` returns the whole
/// level set `p^{-depth}(z*)`; `RandomWalk` returns `2^depth` points of one
/// random backward orbit after a burn-in.
pub fn julia_backward(p: Quadratic, depth: usize, mode: JuliaMode, real_only: bool, seed: u64) -> Result<JuliaPoints> {
    let z0 = p.repelling_fixed_point();
    julia_backward_from(p, z0, depth, mode, real_only, seed)
}

pub fn julia_backward_from(
    p: Quadratic,
    z0: Complex64,
    depth: usize,
    mode: JuliaMode,
    real_only: bool,
    seed: u64,
) -> Result<JuliaPoints> {
    let check = |z: Complex64| -> Result<Complex64> {
        if real_only && z.im.abs() > 1e-12 * (1.0 + z.re.abs()) {
            Err(Error::ComplexBranch(format!("preimage {z} is not real")))
        } else if real_only {
            Ok(Complex64::new(z.re, 0.0))
        } else {
            Ok(z)
        }
    };
    let points = match mode {
        JuliaMode::FullTree => {
            if depth > 22 {
                return Err(Error::Budget("full tree depth is capped at 22".into()));
            }
            let mut cur = vec![z0];
            for _ in 0..depth {
                let mut next = Vec::with_capacity(cur.len() * 2);
                for z in &cur {
                    for w in p.preimages(*z) {
                        next.push(check(w)?);
                    }
                }
                cur = next;
            }
            cur
        }
        JuliaMode::RandomWalk => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut z = z0;
            let total = 1usize << depth.min(24);
            let mut out = Vec::with_capacity(total);
            for k in 0..total + 32 {
                z = check(p.preimages(z)[rng.gen_range(0..2)])?;
                if k >= 32 {
                    out.push(z);
                }
            }
            out
        }
    };
    let measure = if points.iter().all(|z| z.im == 0.0) {
        Some(Measure1D::uniform(&points.iter().map(|z| z.re).collect::<Vec<_>>()))
    } else {
        None
    };
    Ok(JuliaPoints { points, measure })
}

/// Equal-weight Bernoulli measure on the real Cantor Julia set of a real
/// quadratic with positive leading coefficient, evaluated through the two
/// inverse branches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BernoulliCantor {
    pub p: Quadratic,
    pub lo: f64,
    pub hi: f64,
}

impl BernoulliCantor {
    pub fn new(p: Quadratic) -> Result<Self> {
        if p.a <= 0.0 {
            return Err(Error::Degenerate("leading coefficient must be positive".into()));
        }
        let beta = p.repelling_fixed_point();
        if beta.im != 0.0 {
            return Err(Error::ComplexBranch("fixed point is not real".into()));
        }
        let hi = beta.re;
        let lo = -p.b / p.a - hi;
        let crit = -p.b / (2.0 * p.a);
        if p.eval(crit) >= lo {
            return Err(Error::Degenerate("Julia set is not a real Cantor set".into()));
        }
        Ok(BernoulliCantor { p, lo: lo.min(hi), hi: hi.max(lo) })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.cdf_depth(x, 64)
    }

    fn cdf_depth(&self, x: f64, depth: usize) -> f64 {
        if x < self.lo {
            return 0.0;
        }
        if x >= self.hi {
            return 1.0;
        }
        if depth == 0 {
            return (x - self.lo) / (self.hi - self.lo);
        }
        let crit = -self.p.b / (2.0 * self.p.a);
        let y = self.p.eval(x);
        if x <= crit {
            0.5 * (1.0 - self.cdf_depth(y, depth - 1))
        } else {
            0.5 + 0.5 * self.cdf_depth(y, depth - 1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grig_limit_support_and_mass() {
        let g = GrigLimit::new(-1.0).unwrap();
        assert!((g.cdf_x(1.0) - 1.0).abs() < 1e-15);
        assert!(g.cdf_x(-0.5).abs() < 1e-15);
        assert!((g.cdf_x(0.0) - 0.5).abs() < 1e-15);
        assert!((g.cdf_x(0.5) - 0.5).abs() < 1e-15);
        assert_eq!(g.support_mu(), [(-3.0, -1.0), (1.0, 3.0)]);
        assert!(GrigLimit::new(0.0).is_err());
    }

    #[test]
    fn hanoi_backward_orbit() {
        let j0 = julia_backward(Quadratic::HANOI, 0, JuliaMode::FullTree, true, 0).unwrap();
        assert_eq!(j0.points, vec![Complex64::new(3.0, 0.0)]);
        let j1 = julia_backward(Quadratic::HANOI, 1, JuliaMode::FullTree, true, 0).unwrap();
        let mut v: Vec<f64> = j1.points.iter().map(|z| z.re).collect();
        v.sort_by(f64::total_cmp);
        assert!((v[0] + 2.0).abs() < 1e-15 && (v[1] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn square_roots_of_unity() {
        let j = julia_backward(Quadratic::SQUARE, 3, JuliaMode::FullTree, false, 0).unwrap();
        assert_eq!(j.points.len(), 8);
        assert!(j.points.iter().all(|z| (z.powu(8) - 1.0).norm() < 1e-12));
        assert!(julia_backward(Quadratic::SQUARE, 3, JuliaMode::FullTree, true, 0).is_err());
    }

    #[test]
    fn cantor_cdf_properties() {
        let c = BernoulliCantor::new(Quadratic::HANOI).unwrap();
        assert_eq!((c.lo, c.hi), (-2.0, 3.0));
        assert!((c.cdf(0.5) - 0.5).abs() < 1e-12);
        let mut prev = 0.0;
        for k in 0..=500 {
            let x = -2.0 + 5.0 * k as f64 / 500.0;
            let f = c.cdf(x);
            assert!(f + 1e-12 >= prev);
            prev = f;
        }
    }
}
