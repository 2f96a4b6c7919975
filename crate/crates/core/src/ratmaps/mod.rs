//! Projective rational maps of the plane: the renormalization maps, their
//! iterates along lines, degree growth, contracted curves and potentials.

pub(crate) mod binary;
mod catalog;
mod modgcd;
mod poly;
mod potential;

pub use binary::{gcd_forms, BinaryForm};
pub use catalog::{contracted_catalog, restrict_to_divisor, CatalogCheck};
pub use poly::{poly, MultiPoly};
pub use potential::{potential, potential_grid, GridField, PotentialValue, RecursionPotential};

use crate::error::{Error, Result};
use crate::Q;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Homogeneous coordinate names used by every builtin map.
pub const XYW: [&str; 3] = ["x", "y", "w"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MapName {
    RG,
    GG,
    HInv,
    RL,
    RH,
    ModelSquare,
    ModelTwist,
    ModelSkew,
    Cheb,
}

impl std::str::FromStr for MapName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "r_g" | "rg" | "grigorchuk" => MapName::RG,
            "g_g" | "gg" => MapName::GG,
            "h_inv" | "hinv" => MapName::HInv,
            "r_l" | "rl" | "lamplighter" => MapName::RL,
            "r_h" | "rh" | "hanoi" => MapName::RH,
            "model_square" | "square" => MapName::ModelSquare,
            "model_twist" | "twist" => MapName::ModelTwist,
            "model_skew" | "skew" => MapName::ModelSkew,
            "cheb" => MapName::Cheb,
            other => return Err(Error::UnknownName(other.to_string())),
        })
    }
}

/// A rational self-map of the projective plane given by three homogeneous
/// forms of equal degree in `(x, y, w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMapP2 {
    pub comps: [MultiPoly; 3],
    pub degree: u32,
    pub topological_degree: Option<u32>,
}

impl RationalMapP2 {
    pub fn new(comps: [MultiPoly; 3]) -> Result<Self> {
        let mut deg = None;
        for c in &comps {
            if c.nvars() != 3 || !c.is_homogeneous() {
                return Err(Error::Degenerate("components must be homogeneous in three variables".into()));
            }
            if let Some(d) = c.total_degree() {
                if deg.is_some_and(|e| e != d) {
                    return Err(Error::Degenerate("components have different degrees".into()));
                }
                deg = Some(d);
            }
        }
        let degree = deg.ok_or_else(|| Error::Degenerate("all components vanish".into()))?;
        Ok(RationalMapP2 { comps, degree, topological_degree: None })
    }

    pub fn from_strs(parts: [&str; 3]) -> Result<Self> {
        let c = [
            MultiPoly::parse(parts[0], &XYW)?,
            MultiPoly::parse(parts[1], &XYW)?,
            MultiPoly::parse(parts[2], &XYW)?,
        ];
        Self::new(c)
    }

    pub fn builtin(name: MapName) -> Self {
        let (parts, top): ([&str; 3], u32) = match name {
            MapName::RG => (["2*x^2*w", "y*(4*w^2 - y^2) + y*x^2", "w*(4*w^2 - y^2)"], 2),
            MapName::GG => (["2*(4*w^2 - y^2)*w", "-y*(x^2 + 4*w^2 - y^2)", "x^2*w"], 2),
            MapName::HInv => (["4*w", "-2*y", "x"], 1),
            MapName::RL => (["-x^2 + y^2 + 2*w^2", "-2*w^2", "(y - x)*w"], 1),
            MapName::RH => (
                [
                    "x*(x - w - y)*(x^2 - w^2 + y*w - y^2) + 2*y^2*(-x^2 + x*w + y^2)",
                    "y^2*w*(x - w + y)",
                    "(x - w - y)*(x^2 - w^2 + y*w - y^2)*w",
                ],
                2,
            ),
            MapName::ModelSquare => (["x*w", "y^2", "w^2"], 2),
            MapName::ModelTwist => (["x*y", "x*y - 4*w^2", "y*w"], 1),
            MapName::ModelSkew => (
                ["(x^2 - x*w - 3*w^2)*(x + 3*w)", "(x - w)*(x + 2*w)*y", "w^2*(x + 3*w)"],
                2,
            ),
            MapName::Cheb => (["x*w", "2*y^2 - w^2", "w^2"], 2),
        };
        let mut m = Self::from_strs(parts).expect("builtin maps are well formed");
        m.topological_degree = Some(top);
        m
    }

    /// Exact image, normalized to a primitive integer triple whose last
    /// nonzero coordinate is positive.
    pub fn eval_exact(&self, p: &[Q; 3]) -> Result<[BigInt; 3]> {
        let v: Vec<Q> = self.comps.iter().map(|c| c.eval(p)).collect();
        if v.iter().all(Zero::is_zero) {
            return Err(Error::Indeterminate);
        }
        Ok(normalize_projective(&[v[0].clone(), v[1].clone(), v[2].clone()]))
    }

    /// Float image scaled to unit Euclidean norm.
    pub fn eval_f64(&self, p: &[f64; 3]) -> Result<[f64; 3]> {
        let s = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        let q = [p[0] / s, p[1] / s, p[2] / s];
        let v = [self.comps[0].eval_f64(&q), self.comps[1].eval_f64(&q), self.comps[2].eval_f64(&q)];
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Indeterminate);
        }
        Ok([v[0] / n, v[1] / n, v[2] / n])
    }

    /// Affine convenience: `(x, y) ↦ F[x : y : 1]`, dehomogenized.
    pub fn eval_affine(&self, x: &Q, y: &Q) -> Result<(Q, Q)> {
        let p = [x.clone(), y.clone(), Q::one()];
        let v: Vec<Q> = self.comps.iter().map(|c| c.eval(&p)).collect();
        if v.iter().all(Zero::is_zero) {
            return Err(Error::Indeterminate);
        }
        if v[2].is_zero() {
            return Err(Error::Degenerate("image lies on the line at infinity".into()));
        }
        Ok((&v[0] / &v[2], &v[1] / &v[2]))
    }

    /// Polynomial composition `self ∘ other` without cancellation.
    pub fn compose(&self, other: &RationalMapP2) -> RationalMapP2 {
        let c = other.comps.clone();
        let comps = [self.comps[0].substitute(&c), self.comps[1].substitute(&c), self.comps[2].substitute(&c)];
        RationalMapP2 { degree: self.degree * other.degree, comps, topological_degree: None }
    }

    /// True when the components are proportional to `(x, y, w)`.
    pub fn is_projective_identity(&self) -> bool {
        let v: Vec<MultiPoly> = (0..3).map(|i| MultiPoly::var(3, i)).collect();
        (0..3).all(|i| (0..3).all(|j| (&self.comps[i] * &v[j]) == (&self.comps[j] * &v[i])))
    }

    /// Jacobian determinant of the lift to C³.
    pub fn jacobian(&self) -> MultiPoly {
        let d: Vec<Vec<MultiPoly>> =
            self.comps.iter().map(|c| (0..3).map(|j| c.derivative(j)).collect()).collect();
        let m = |a: usize, b: usize| &d[a][b];
        let t0 = m(0, 0) * &(m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1));
        let t1 = m(0, 1) * &(m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0));
        let t2 = m(0, 2) * &(m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
        &(&t0 - &t1) + &t2
    }

    /// The three components with denominators cleared by one common factor.
    fn integer_components(&self) -> Vec<Vec<(Vec<u32>, BigInt)>> {
        let mut l = BigInt::one();
        for c in &self.comps {
            for (_, v) in c.terms() {
                l = l.lcm(v.denom());
            }
        }
        self.comps
            .iter()
            .map(|c| c.terms().map(|(e, v)| (e.clone(), (v * Q::from_integer(l.clone())).to_integer())).collect())
            .collect()
    }

    /// Apply the map to a triple of binary forms of equal degree.
    pub fn apply_to_forms(&self, b: &[BinaryForm; 3]) -> [BinaryForm; 3] {
        let ints = self.integer_components();
        let d = self.degree as usize;
        let pows: Vec<Vec<BinaryForm>> = b
            .iter()
            .map(|f| {
                let mut v = vec![BinaryForm::constant(BigInt::one())];
                for k in 1..=d {
                    v.push(v[k - 1].mul(f));
                }
                v
            })
            .collect();
        let out_deg = d * b[0].degree();
        let build = |terms: &Vec<(Vec<u32>, BigInt)>| {
            let mut acc = BinaryForm::zero(out_deg);
            for (e, c) in terms {
                let t = pows[0][e[0] as usize].mul(&pows[1][e[1] as usize]).mul(&pows[2][e[2] as usize]).scale(c);
                acc = acc.add(&t);
            }
            acc
        };
        [build(&ints[0]), build(&ints[1]), build(&ints[2])]
    }

    /// Degrees of `F^k` restricted to the line through `p` and `q`, for
    /// k = 1..=n, cancelling the common factor of the three forms each step.
    pub fn compose_along_line(&self, p: &[BigInt; 3], q: &[BigInt; 3], n: usize) -> Result<Vec<usize>> {
        let mut b: [BinaryForm; 3] = std::array::from_fn(|i| BinaryForm::linear(p[i].clone(), q[i].clone()));
        if b.iter().all(BinaryForm::is_zero) {
            return Err(Error::Degenerate("line is degenerate".into()));
        }
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            b = reduce_triple(self.apply_to_forms(&b))?;
            out.push(b[0].degree());
        }
        Ok(out)
    }

    /// Iterate along a line and return the reduced forms (for testing).
    pub fn iterate_forms(&self, p: &[BigInt; 3], q: &[BigInt; 3], n: usize) -> Result<[BinaryForm; 3]> {
        let mut b: [BinaryForm; 3] = std::array::from_fn(|i| BinaryForm::linear(p[i].clone(), q[i].clone()));
        for _ in 0..n {
            b = reduce_triple(self.apply_to_forms(&b))?;
        }
        Ok(b)
    }

    /// Degree growth classification over random lines.
    pub fn dynamical_degree(&self, n: usize, trials: usize, seed: u64) -> Result<DynDegree> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best: Vec<usize> = vec![0; n];
        for _ in 0..trials.max(1) {
            let p = random_triple(&mut rng);
            let q = random_triple(&mut rng);
            let seq = self.compose_along_line(&p, &q, n)?;
            for (b, s) in best.iter_mut().zip(seq) {
                *b = (*b).max(s);
            }
        }
        Ok(DynDegree::classify(best))
    }

    /// Check that the composite with a parametrized curve is the constant
    /// point `expected`.
    pub fn verify_contracted(&self, param: &[MultiPoly; 3], expected: &[Q; 3]) -> Result<bool> {
        let g: Vec<MultiPoly> = self.comps.iter().map(|c| c.substitute(param)).collect();
        if g.iter().all(MultiPoly::is_zero) {
            return Err(Error::Degenerate("curve lies in the indeterminacy closure".into()));
        }
        let nv = param[0].nvars();
        let e: Vec<MultiPoly> = expected.iter().map(|c| MultiPoly::constant(nv, c.clone())).collect();
        Ok(proportional(&g, &e))
    }

    /// Check that `F ∘ subst` is proportional to `expected` as polynomial
    /// triples (chart computations on blow-ups).
    pub fn verify_chart(&self, subst: &[MultiPoly; 3], expected: &[MultiPoly; 3]) -> bool {
        let g: Vec<MultiPoly> = self.comps.iter().map(|c| c.substitute(subst)).collect();
        proportional(&g, expected)
    }

    /// Check each candidate is an indeterminacy point and that the
    /// components share no curve (coprime restrictions to three lines).
    pub fn verify_indeterminacy(&self, candidates: &[[Q; 3]], seed: u64) -> IndeterminacyReport {
        let confirmed = candidates.iter().map(|c| self.comps.iter().all(|f| f.eval(c).is_zero())).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coprime = (0..3).all(|_| {
            let p = random_triple(&mut rng);
            let q = random_triple(&mut rng);
            let b: [BinaryForm; 3] = std::array::from_fn(|i| BinaryForm::linear(p[i].clone(), q[i].clone()));
            let img = self.apply_to_forms(&b);
            gcd_forms(&[&img[0], &img[1], &img[2]]).degree() == 0
        });
        IndeterminacyReport { confirmed, coprime_components: coprime }
    }
}

/// Divide a triple of forms by their gcd and joint content.
pub fn reduce_triple(f: [BinaryForm; 3]) -> Result<[BinaryForm; 3]> {
    if f.iter().all(BinaryForm::is_zero) {
        return Err(Error::Degenerate("line maps into the indeterminacy set".into()));
    }
    let g = gcd_forms(&[&f[0], &f[1], &f[2]]);
    let mut out: [BinaryForm; 3] =
        if g.degree() > 0 { std::array::from_fn(|i| f[i].div_exact(&g)) } else { f };
    let mut c = BigInt::zero();
    for b in &out {
        c = c.gcd(&b.content());
    }
    if !c.is_zero() && !c.is_one() {
        out = std::array::from_fn(|i| BinaryForm { coeffs: out[i].coeffs.iter().map(|x| x / &c).collect() });
    }
    Ok(out)
}

fn proportional(g: &[MultiPoly], e: &[MultiPoly]) -> bool {
    (0..3).all(|i| (i + 1..3).all(|j| (&g[i] * &e[j]) == (&g[j] * &e[i])))
}

fn random_triple(rng: &mut ChaCha8Rng) -> [BigInt; 3] {
    std::array::from_fn(|_| BigInt::from(rng.gen_range(-50i64..=50)))
}

/// Primitive integer representative with last nonzero coordinate positive.
pub fn normalize_projective(v: &[Q; 3]) -> [BigInt; 3] {
    let mut l = BigInt::one();
    for c in v {
        l = l.lcm(c.denom());
    }
    let mut ints: Vec<BigInt> = v.iter().map(|c| (c * Q::from_integer(l.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for c in &ints {
        g = g.gcd(c);
    }
    if ints.iter().rev().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative()) {
        g = -g;
    }
    for c in ints.iter_mut() {
        *c = &*c / &g;
    }
    [ints[0].clone(), ints[1].clone(), ints[2].clone()]
}

/// Projective point from small integers.
pub fn pt(x: i64, y: i64, w: i64) -> [Q; 3] {
    [Q::from_integer(x.into()), Q::from_integer(y.into()), Q::from_integer(w.into())]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndeterminacyReport {
    pub confirmed: Vec<bool>,
    pub coprime_components: bool,
}

impl IndeterminacyReport {
    pub fn all_ok(&self) -> bool {
        self.coprime_components && self.confirmed.iter().all(|&b| b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum GrowthClass {
    Bounded,
    Linear,
    Exponential { base: f64 },
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DynDegree {
    pub degrees: Vec<usize>,
    pub estimate: f64,
    pub class: GrowthClass,
}

impl DynDegree {
    /// Bounded if the tail is constant, linear if the tail increments are
    /// constant and positive, exponential if the last ratio exceeds 1.3.
    pub fn classify(degrees: Vec<usize>) -> Self {
        let n = degrees.len();
        if n < 3 {
            let estimate = degrees.last().map(|&d| d as f64).unwrap_or(0.0);
            return DynDegree { degrees, estimate, class: GrowthClass::Inconclusive };
        }
        let last_ratio = degrees[n - 1] as f64 / degrees[n - 2] as f64;
        let tail = &degrees[n - 3..];
        let class = if tail[0] == tail[1] && tail[1] == tail[2] {
            GrowthClass::Bounded
        } else if last_ratio > 1.3 {
            GrowthClass::Exponential { base: last_ratio }
        } else {
            let d1 = tail[1] as i64 - tail[0] as i64;
            let d2 = tail[2] as i64 - tail[1] as i64;
            if d1 > 0 && d2 > 0 && (d2 - d1).abs() <= 1 {
                GrowthClass::Linear
            } else {
                GrowthClass::Inconclusive
            }
        };
        let estimate = match class {
            GrowthClass::Exponential { base } => base,
            GrowthClass::Inconclusive => (degrees[n - 1] as f64).powf(1.0 / n as f64),
            _ => 1.0,
        };
        DynDegree { degrees, estimate, class }
    }
}
