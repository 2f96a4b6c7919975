//! Exact (semi-)conjugacy identities for the renormalization maps and the
//! equidistribution experiments on the model systems.

mod experiments;
mod quadext;
mod rational;

pub use experiments::{
    backward_equidistribution, skew_cantor_experiment, twist_experiment, BackwardModel, BackwardSeries, Graph,
    ModelKind, ModelSystem, SkewReport, TwistReport,
};
pub use quadext::{QuadExtElement, QuadPoly};
pub use rational::{affine_components, compose_maps, verify_identity, RationalFunction2};

use crate::error::{Error, Result};
use crate::ratmaps::{MapName, MultiPoly, RationalMapP2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

const LM: [&str; 2] = ["l", "m"];
const EZ: [&str; 2] = ["e", "z"];

fn rf(num: &str, den: &str, vars: &[&str]) -> RationalFunction2 {
    RationalFunction2::parse(num, den, vars).expect("builtin rational function")
}

/// Invariant fibration of the Grigorchuk map, `(4 − λ² + μ²)/(4μ)`.
pub fn grigorchuk_phi() -> RationalFunction2 {
    rf("4 - l^2 + m^2", "4*m", &LM)
}

/// Semi-conjugating coordinate `(4 − μ² + λ²)/(4λ)`.
pub fn grigorchuk_psi() -> RationalFunction2 {
    rf("4 - m^2 + l^2", "4*l", &LM)
}

fn affine(name: MapName) -> Vec<RationalFunction2> {
    affine_components(&RationalMapP2::builtin(name)).to_vec()
}

#[derive(Debug, Clone, Serialize)]
pub struct ChebyshevReport {
    pub phi_invariant: bool,
    /// Candidate normalization and whether `ψ∘R = t∘ψ` holds exactly.
    pub candidates: Vec<(String, bool)>,
    pub pinned: Option<String>,
}

/// Decides by exact identity testing which quadratic `t` satisfies
/// `ψ∘R_G = t∘ψ`.
pub fn chebyshev_semiconj_check() -> Result<ChebyshevReport> {
    let r = affine(MapName::RG);
    let phi = grigorchuk_phi();
    let psi = grigorchuk_psi();
    let phi_invariant = phi.compose(&r)?.equals(&phi);
    let lhs = psi.compose(&r)?;
    let mut candidates = Vec::new();
    for t in ["2*z^2 - 1", "z^2", "z^2 - 2", "2*z^2"] {
        let tz = RationalFunction2::parse(t, "1", &["z"])?;
        let rhs = tz.compose(std::slice::from_ref(&psi))?;
        candidates.push((t.to_string(), lhs.equals(&rhs)));
    }
    let pinned = candidates.iter().find(|c| c.1).map(|c| c.0.clone());
    Ok(ChebyshevReport { phi_invariant, candidates, pinned })
}

/// `(λ+μ, λ−μ)∘R_L = S∘(λ+μ, λ−μ)` with `S(α, β) = (α, (αβ − 4)/β)`.
pub fn lamplighter_conjugacy_check() -> Result<bool> {
    let ab = vec![rf("l + m", "1", &LM), rf("l - m", "1", &LM)];
    let skew = vec![rf("a", "1", &["a", "b"]), rf("a*b - 4", "b", &["a", "b"])];
    let lhs = compose_maps(&ab, &affine(MapName::RL))?;
    let rhs = compose_maps(&skew, &ab)?;
    Ok(verify_identity(&lhs, &rhs))
}

/// The birational change of coordinates conjugating the Hanoi map to a skew
/// product over `x² − x − 3`.
pub fn hanoi_varpi() -> Vec<RationalFunction2> {
    vec![rf("x^2 - 1 - x*y - 2*y^2", "y", &["x", "y"]), rf("(1 + x - 2*y)*(1 + x + y)", "2*y", &["x", "y"])]
}

/// `ϖ∘R_H = G∘ϖ` with `G(x, y) = (x² − x − 3, (x−1)(x+2)y/(x+3))`.
pub fn hanoi_conjugacy_check() -> Result<bool> {
    let g = vec![rf("x^2 - x - 3", "1", &["x", "y"]), rf("(x - 1)*(x + 2)*y", "x + 3", &["x", "y"])];
    let v = hanoi_varpi();
    let lhs = compose_maps(&v, &affine(MapName::RH))?;
    let rhs = compose_maps(&g, &v)?;
    Ok(verify_identity(&lhs, &rhs))
}

/// Outcome of the exact fiber checks over `Q(η, z)[s]/(s² − η² + 1)`.
#[derive(Debug, Clone, Serialize)]
pub struct FiberSymbolic {
    /// `φ∘φ_η⁻¹ = η`.
    pub on_fiber: bool,
    /// `φ_η∘φ_η⁻¹ = id`.
    pub inverse: bool,
    /// `φ_η∘R_G∘φ_η⁻¹(z) = z²`.
    pub squares: bool,
    /// `ψ∘φ_η⁻¹(z) = ½(z + 1/z)`.
    pub zhukovsky: bool,
}

impl FiberSymbolic {
    pub fn all(&self) -> bool {
        self.on_fiber && self.inverse && self.squares && self.zhukovsky
    }
}

struct FiberFormulas {
    disc: MultiPoly,
    s: QuadExtElement,
}

impl FiberFormulas {
    fn new() -> Self {
        let disc = MultiPoly::parse("e^2 - 1", &EZ).expect("builtin polynomial");
        let s = QuadExtElement::sqrt_disc(&disc);
        FiberFormulas { disc, s }
    }
    fn lift(&self, src: &str) -> QuadExtElement {
        QuadExtElement::from_poly(MultiPoly::parse(src, &EZ).expect("builtin polynomial"), &self.disc)
    }
    /// `φ_η⁻¹(z)`.
    fn inverse(&self) -> Result<[QuadExtElement; 2]> {
        let es = self.lift("e*(z^2 - 1)").mul(&self.s);
        let den = self.lift("1 + z^2 - e^2*(1 + z^2)").add(&es);
        let l = self.lift("-4*(e^2 - 1)*z").div(&den)?;
        let m = self.lift("2*(z - 1)*(z + 1)").mul(&self.s).div(&den)?;
        Ok([l, m])
    }
    /// `φ_η(λ, μ)` for arguments sharing a denominator.
    fn chart(&self, l: &QuadExtElement, m: &QuadExtElement) -> Result<QuadExtElement> {
        debug_assert_eq!(l.den, m.den);
        let d = &l.den;
        let two_d = QuadPoly::base(MultiPoly::from_int(2, 2), &self.disc).mul(d);
        let e = QuadPoly::base(MultiPoly::var(2, 0), &self.disc);
        let em = e.mul(&m.num);
        let ms = m.num.mul(&self.s.num);
        let num = two_d.sub(&l.num).sub(&em).sub(&ms);
        let den = l.num.sub(&two_d).add(&em).sub(&ms);
        QuadExtElement::new(num, den)
    }
    fn apply(&self, f: &RationalFunction2, args: &[QuadExtElement]) -> Result<QuadExtElement> {
        QuadExtElement::eval_rational(f, args)
    }
}

/// Exact verification of the fiber parametrization of the Grigorchuk map.
pub fn fiber_symbolic_check() -> Result<FiberSymbolic> {
    let ff = FiberFormulas::new();
    let [l, m] = ff.inverse()?;
    let on_fiber = ff.apply(&grigorchuk_phi(), &[l.clone(), m.clone()])?.equals(&ff.lift("e"));
    let inverse = ff.chart(&l, &m)?.equals(&ff.lift("z"));
    let [fl, fm] = QuadExtElement::apply_map(&RationalMapP2::builtin(MapName::RG), &l, &m)?;
    let squares = ff.chart(&fl, &fm)?.equals(&ff.lift("z^2"));
    let zh = ff.lift("z^2 + 1").div(&ff.lift("2*z"))?;
    let zhukovsky = ff.apply(&grigorchuk_psi(), &[l, m])?.equals(&zh);
    Ok(FiberSymbolic { on_fiber, inverse, squares, zhukovsky })
}

#[derive(Debug, Clone, Serialize)]
pub struct FiberReport {
    pub samples: usize,
    pub max_err_on_fiber: f64,
    pub max_err_inverse: f64,
    pub max_err_squares: f64,
    pub max_err_zhukovsky: f64,
    pub tol: f64,
}

impl FiberReport {
    pub fn max_error(&self) -> f64 {
        self.max_err_on_fiber.max(self.max_err_inverse).max(self.max_err_squares).max(self.max_err_zhukovsky)
    }
    pub fn passed(&self) -> bool {
        self.max_error() <= self.tol
    }
}

fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}

/// Floating check of the fiber lemma at seeded samples. The square root of
/// `η² − 1` is the principal branch, fixed per sample; η is drawn from the
/// upper half plane, away from `±1`, and `z` from an annulus around the
/// unit circle.
pub fn fiber_conjugation_check(samples: usize, tol: f64, seed: u64) -> Result<FiberReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = affine(MapName::RG);
    let (phi, psi) = (grigorchuk_phi(), grigorchuk_psi());
    let mut rep = FiberReport {
        samples,
        max_err_on_fiber: 0.0,
        max_err_inverse: 0.0,
        max_err_squares: 0.0,
        max_err_zhukovsky: 0.0,
        tol,
    };
    for _ in 0..samples {
        let eta = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.1..2.0));
        let z = Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..std::f64::consts::TAU));
        let s = (eta * eta - 1.0).sqrt();
        let den = 1.0 + z * z + eta * s * (z * z - 1.0) - eta * eta * (1.0 + z * z);
        if den.norm() < 1e-8 {
            return Err(Error::Degenerate(format!("sample η={eta}, z={z} hits a pole")));
        }
        let l = -4.0 * (eta * eta - 1.0) * z / den;
        let m = 2.0 * s * (z - 1.0) * (z + 1.0) / den;
        let chart = |l: Complex64, m: Complex64| (2.0 - l - eta * m - m * s) / (-2.0 + l + eta * m - m * s);
        rep.max_err_on_fiber = rep.max_err_on_fiber.max(rel_err(phi.eval_complex(&[l, m]), eta));
        rep.max_err_inverse = rep.max_err_inverse.max(rel_err(chart(l, m), z));
        let (fl, fm) = (r[0].eval_complex(&[l, m]), r[1].eval_complex(&[l, m]));
        rep.max_err_squares = rep.max_err_squares.max(rel_err(chart(fl, fm), z * z));
        rep.max_err_zhukovsky = rep.max_err_zhukovsky.max(rel_err(psi.eval_complex(&[l, m]), 0.5 * (z + 1.0 / z)));
    }
    Ok(rep)
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub holds: bool,
}

/// Every exact identity, in a fixed order.
pub fn verify_all() -> Result<Vec<IdentityCheck>> {
    let cheb = chebyshev_semiconj_check()?;
    let fiber = fiber_symbolic_check()?;
    let mk = |n: &str, h: bool| IdentityCheck { name: n.to_string(), holds: h };
    Ok(vec![
        mk("grigorchuk phi invariance", cheb.phi_invariant),
        mk("grigorchuk psi semiconjugacy to 2z^2-1", cheb.pinned.as_deref() == Some("2*z^2 - 1")),
        mk("grigorchuk fiber on-fiber", fiber.on_fiber),
        mk("grigorchuk fiber inverse", fiber.inverse),
        mk("grigorchuk fiber squaring", fiber.squares),
        mk("grigorchuk fiber zhukovsky", fiber.zhukovsky),
        mk("lamplighter skew conjugacy", lamplighter_conjugacy_check()?),
        mk("hanoi varpi conjugacy", hanoi_conjugacy_check()?),
    ])
}

/// A polynomial in the named variables, for callers building custom checks.
pub fn parse_poly(src: &str, vars: &[&str]) -> Result<MultiPoly> {
    MultiPoly::parse(src, vars)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chebyshev_normalization_is_pinned() {
        let r = chebyshev_semiconj_check().unwrap();
        assert!(r.phi_invariant);
        assert_eq!(r.pinned.as_deref(), Some("2*z^2 - 1"));
        assert!(!r.candidates.iter().find(|c| c.0 == "z^2").unwrap().1);
    }

    #[test]
    fn lamplighter_and_hanoi() {
        assert!(lamplighter_conjugacy_check().unwrap());
        assert!(hanoi_conjugacy_check().unwrap());
    }

    #[test]
    fn fiber_exact() {
        assert!(fiber_symbolic_check().unwrap().all());
        let ff = FiberFormulas::new();
        let [l, m] = ff.inverse().unwrap();
        let [fl, fm] = QuadExtElement::apply_map(&RationalMapP2::builtin(MapName::RG), &l, &m).unwrap();
        assert!(!ff.chart(&fl, &fm).unwrap().equals(&ff.lift("z^3")));
        assert!(!ff.chart(&l, &m).unwrap().equals(&ff.lift("-z")));
    }

    #[test]
    fn fiber_float() {
        let r = fiber_conjugation_check(100, 1e-9, 7).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn broken_candidate_fails() {
        // A perturbed change of coordinates must not conjugate.
        let ab = vec![rf("l + m", "1", &LM), rf("l - m + 1", "1", &LM)];
        let skew = vec![rf("a", "1", &["a", "b"]), rf("a*b - 4", "b", &["a", "b"])];
        let lhs = compose_maps(&ab, &affine(MapName::RL)).unwrap();
        let rhs = compose_maps(&skew, &ab).unwrap();
        assert!(!verify_identity(&lhs, &rhs));
    }
}
