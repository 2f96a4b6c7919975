//! Operator pencils `M_n(λ, μ)` on level n and their Schur determinant
//! recursions.
//!
//! Every pencil is an affine combination of permutation matrices, so one
//! assembly routine serves exact, symbolic and floating-point use.
//!
//! Sign normalization: `P_n = ε_n det M_n`. For the Grigorchuk pencil the
//! first recursive step flips sign (the level-1 operator `(b+c+d-1)/2` is the
//! identity), so `ε_n = -1` for `n ≥ 2` and `+1` below. The other builtins
//! use `ε_n = +1`.

use crate::error::{Error, Result};
use crate::groups::{Builtin, GroupSpec};
use crate::ratmaps::{poly, MapName, MultiPoly, RationalMapP2};
use crate::Q;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Pencil variables for symbolic work.
pub const LM: [&str; 2] = ["l", "m"];

pub type RatMatrix = Vec<Vec<Q>>;

/// Where a term's permutation comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum PermSource {
    /// A group word, e.g. `"b^-1 a"`.
    Word(String),
    /// Cyclic shift of the first letter by k, identity on the rest.
    FirstLetterShift(usize),
}

/// `(c0 + cλ λ + cμ μ) · P` for a permutation matrix `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct PencilTerm {
    pub coeff: [Q; 3],
    pub source: PermSource,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub q: MultiPoly,
    pub multiplier: u32,
    pub offset: u32,
}

#[derive(Debug, Clone)]
pub struct PencilScheme {
    pub kind: Builtin,
    pub group: Option<GroupSpec>,
    pub d: usize,
    pub terms: Vec<PencilTerm>,
    pub map: RationalMapP2,
    pub factors: Vec<Factor>,
    /// Level of the seed polynomial; the recursion holds for `n > seed_level`.
    pub seed_level: usize,
    pub seed: MultiPoly,
    /// Smallest level at which the pencil is defined.
    pub min_level: usize,
}

fn qi(v: i64) -> Q {
    Q::from_integer(v.into())
}

fn term(c0: i64, cl: i64, cm: i64, src: PermSource) -> PencilTerm {
    PencilTerm { coeff: [qi(c0), qi(cl), qi(cm)], source: src }
}

fn word(w: &str) -> PermSource {
    PermSource::Word(w.to_string())
}

impl PencilScheme {
    pub fn builtin(kind: Builtin) -> Result<Self> {
        let group = GroupSpec::builtin(kind)?;
        let id = || word("1");
        let s = match kind {
            Builtin::Grigorchuk => PencilScheme {
                kind,
                d: 2,
                terms: vec![
                    term(0, -1, 0, word("a")),
                    term(1, 0, 0, word("b")),
                    term(1, 0, 0, word("c")),
                    term(1, 0, 0, word("d")),
                    term(-1, 0, -1, id()),
                ],
                map: RationalMapP2::builtin(MapName::RG),
                factors: vec![Factor { q: poly("4 - m^2", &LM), multiplier: 1, offset: 2 }],
                seed_level: 1,
                seed: poly("(2 - m - l)*(2 - m + l)", &LM),
                min_level: 0,
                group: Some(group),
            },
            Builtin::Lamplighter => PencilScheme {
                kind,
                d: 2,
                terms: vec![
                    term(1, 0, 0, word("a")),
                    term(1, 0, 0, word("a^-1")),
                    term(1, 0, 0, word("b")),
                    term(1, 0, 0, word("b^-1")),
                    term(0, -1, 0, id()),
                    term(0, 0, -1, word("b^-1 a")),
                ],
                map: RationalMapP2::builtin(MapName::RL),
                factors: vec![Factor { q: poly("m - l", &LM), multiplier: 1, offset: 1 }],
                seed_level: 0,
                seed: poly("4 - l - m", &LM),
                min_level: 0,
                group: Some(group),
            },
            Builtin::Hanoi => PencilScheme {
                kind,
                d: 3,
                terms: vec![
                    term(1, 0, 0, word("a")),
                    term(1, 0, 0, word("b")),
                    term(1, 0, 0, word("c")),
                    term(0, -1, 0, id()),
                    term(-1, 0, 1, PermSource::FirstLetterShift(1)),
                    term(-1, 0, 1, PermSource::FirstLetterShift(2)),
                ],
                map: RationalMapP2::builtin(MapName::RH),
                factors: vec![
                    Factor { q: poly("l^2 - (1 + m)^2", &LM), multiplier: 1, offset: 2 },
                    Factor { q: poly("l^2 - 1 + m - m^2", &LM), multiplier: 2, offset: 2 },
                ],
                seed_level: 1,
                seed: poly("-(l - 1 - 2*m)*(l - 1 + m)^2", &LM),
                min_level: 1,
                group: Some(group),
            },
            Builtin::Custom => return Err(Error::Degenerate("custom pencils use PencilScheme::custom".into())),
        };
        Ok(s)
    }

    /// A scheme carrying only recursion data (no operator), for potentials.
    pub fn custom(d: usize, map: RationalMapP2, factors: Vec<Factor>, seed_level: usize, seed: MultiPoly) -> Self {
        PencilScheme {
            kind: Builtin::Custom,
            group: None,
            d,
            terms: vec![],
            map,
            factors,
            seed_level,
            seed,
            min_level: 0,
        }
    }

    /// The `ε_n` with `P_n = ε_n det M_n`.
    pub fn normalization_sign(&self, n: usize) -> i32 {
        match self.kind {
            Builtin::Grigorchuk if n >= 2 => -1,
            _ => 1,
        }
    }

    fn check_level(&self, n: usize) -> Result<&GroupSpec> {
        let g = self.group.as_ref().ok_or_else(|| Error::Degenerate("scheme has no operator".into()))?;
        if n < self.min_level {
            return Err(Error::Level { level: n, reason: format!("pencil needs n >= {}", self.min_level) });
        }
        Ok(g)
    }

    /// Permutations of every term at level n.
    pub fn term_perms(&self, n: usize) -> Result<Vec<Vec<usize>>> {
        let g = self.check_level(n)?;
        let size = self.d.pow(n as u32);
        self.terms
            .iter()
            .map(|t| match &t.source {
                PermSource::Word(w) => Ok(g.level_action(w, n)?.perm),
                PermSource::FirstLetterShift(k) => {
                    let m = size / self.d;
                    Ok((0..size).map(|v| ((v / m + k) % self.d) * m + v % m).collect())
                }
            })
            .collect()
    }

    /// Generic assembly: entry `M[perm[v]][v] += coeff(λ, μ)`.
    fn assemble_with<T: Clone>(
        &self,
        n: usize,
        zero: T,
        coeff: impl Fn(&[Q; 3]) -> T,
        add: impl Fn(&mut T, &T),
    ) -> Result<Vec<Vec<T>>> {
        let perms = self.term_perms(n)?;
        let size = self.d.pow(n as u32);
        let mut m = vec![vec![zero; size]; size];
        for (t, p) in self.terms.iter().zip(&perms) {
            let c = coeff(&t.coeff);
            for (v, &w) in p.iter().enumerate() {
                add(&mut m[w][v], &c);
            }
        }
        Ok(m)
    }

    pub fn assemble(&self, n: usize, l: &Q, mu: &Q) -> Result<RatMatrix> {
        self.assemble_with(n, Q::zero(), |c| &c[0] + &c[1] * l + &c[2] * mu, |a, b| *a += b)
    }

    pub fn assemble_poly(&self, n: usize) -> Result<Vec<Vec<MultiPoly>>> {
        let lv = MultiPoly::var(2, 0);
        let mv = MultiPoly::var(2, 1);
        self.assemble_with(
            n,
            MultiPoly::zero(2),
            |c| &(&MultiPoly::constant(2, c[0].clone()) + &lv.scale(&c[1])) + &mv.scale(&c[2]),
            |a, b| *a = &*a + b,
        )
    }

    /// Dense row-major float matrix.
    pub fn assemble_f64(&self, n: usize, l: f64, mu: f64) -> Result<Vec<f64>> {
        let perms = self.term_perms(n)?;
        let size = self.d.pow(n as u32);
        let mut m = vec![0.0; size * size];
        for (t, p) in self.terms.iter().zip(&perms) {
            let c = t.coeff[0].to_f64().unwrap_or(0.0)
                + t.coeff[1].to_f64().unwrap_or(0.0) * l
                + t.coeff[2].to_f64().unwrap_or(0.0) * mu;
            for (v, &w) in p.iter().enumerate() {
                m[w * size + v] += c;
            }
        }
        Ok(m)
    }

    /// `P_n(λ, μ) = ε_n det M_n(λ, μ)`.
    pub fn p_exact(&self, n: usize, l: &Q, mu: &Q) -> Result<Q> {
        let d = det_exact(&self.assemble(n, l, mu)?);
        Ok(if self.normalization_sign(n) < 0 { -d } else { d })
    }

    /// Product `Π Q_i^{m_i d^{n - p_i}}` at a point.
    pub fn factor_product(&self, n: usize, l: &Q, mu: &Q) -> Q {
        let mut acc = Q::one();
        for f in &self.factors {
            let e = f.multiplier as usize * self.d.pow(n as u32 - f.offset);
            acc *= num_traits::pow(f.q.eval(&[l.clone(), mu.clone()]), e);
        }
        acc
    }

    /// Affine image `R(λ, μ)`; `None` on poles or indeterminacy.
    pub fn map_point(&self, l: &Q, mu: &Q) -> Option<(Q, Q)> {
        self.map.eval_affine(l, mu).ok()
    }

    fn admissible(&self, l: &Q, mu: &Q) -> bool {
        self.factors.iter().all(|f| !f.q.eval(&[l.clone(), mu.clone()]).is_zero()) && self.map_point(l, mu).is_some()
    }

    /// Check `P_n = Π Q_i^{m_i d^{n-p_i}} · P_{n-1}∘R` exactly at `k` seeded
    /// random rational points.
    pub fn verify_recursion(&self, n: usize, k: usize, seed: u64) -> Result<RecursionReport> {
        if n <= self.seed_level {
            return Err(Error::Level { level: n, reason: format!("recursion starts at n = {}", self.seed_level + 1) });
        }
        let budget = if self.d == 2 { 6 } else { 4 };
        if n > budget {
            return Err(Error::Budget(format!("exact determinant budget is n <= {budget}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pts = Vec::with_capacity(k);
        let mut attempts = 0;
        while pts.len() < k {
            attempts += 1;
            if attempts > 1000 * (k + 1) {
                return Err(Error::SamplingExhausted(attempts));
            }
            let l = random_rational(&mut rng);
            let mu = random_rational(&mut rng);
            if self.admissible(&l, &mu) {
                pts.push((l, mu));
            }
        }
        let failures: Vec<RecursionFailure> = pts
            .par_iter()
            .filter_map(|(l, mu)| {
                let lhs = self.p_exact(n, l, mu).ok()?;
                let (rl, rm) = self.map_point(l, mu)?;
                let rhs = self.factor_product(n, l, mu) * self.p_exact(n - 1, &rl, &rm).ok()?;
                (lhs != rhs).then(|| RecursionFailure {
                    lambda: l.to_string(),
                    mu: mu.to_string(),
                    lhs: lhs.to_string(),
                    rhs: rhs.to_string(),
                })
            })
            .collect();
        Ok(RecursionReport { group: self.kind.name().to_string(), level: n, samples: k, failures })
    }
}

fn random_rational(rng: &mut ChaCha8Rng) -> Q {
    Q::new(rng.gen_range(-100i64..=100).into(), rng.gen_range(1i64..=100).into())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecursionFailure {
    #[serde(rename = "λ")]
    pub lambda: String,
    #[serde(rename = "μ")]
    pub mu: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecursionReport {
    pub group: String,
    pub level: usize,
    pub samples: usize,
    pub failures: Vec<RecursionFailure>,
}

impl RecursionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Exact determinant: rows are scaled to integers, then fraction-free
/// Bareiss elimination with row pivoting.
pub fn det_exact(m: &RatMatrix) -> Q {
    let n = m.len();
    if n == 0 {
        return Q::one();
    }
    let mut scale = Q::one();
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            scale *= Q::from_integer(l.clone());
            row.iter().map(|c| (c * Q::from_integer(l.clone())).to_integer()).collect()
        })
        .collect();
    let d = bareiss(&mut a);
    Q::from_integer(d) / scale
}

/// In-place Bareiss; returns the determinant.
pub fn bareiss(a: &mut [Vec<BigInt>]) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Symbolic determinant by Laplace expansion over column subsets.
pub fn det_poly(m: &[Vec<MultiPoly>]) -> MultiPoly {
    let n = m.len();
    assert!(n <= 16, "symbolic determinant limited to size 16");
    let nv = m.first().and_then(|r| r.first()).map(|p| p.nvars()).unwrap_or(2);
    if n == 0 {
        return MultiPoly::one(nv);
    }
    // minors[mask] = det of the rows n-|mask|.. with columns in mask
    let mut minors: std::collections::HashMap<u32, MultiPoly> = std::collections::HashMap::new();
    minors.insert(0, MultiPoly::one(nv));
    for size in 1..=n {
        let row = n - size;
        let mut next = std::collections::HashMap::new();
        for (mask, sub) in &minors {
            for c in 0..n {
                if mask & (1 << c) != 0 || m[row][c].is_zero() || sub.is_zero() {
                    continue;
                }
                let before = (mask & ((1u32 << c) - 1)).count_ones();
                let t = &m[row][c] * sub;
                let t = if before % 2 == 1 { -&t } else { t };
                let e = next.entry(mask | (1 << c)).or_insert_with(|| MultiPoly::zero(nv));
                *e = &*e + &t;
            }
        }
        minors = next;
    }
    minors.remove(&((1u32 << n) - 1)).unwrap_or_else(|| MultiPoly::zero(nv))
}

/// Gauss-Jordan inverse over the rationals.
pub fn inverse_exact(m: &RatMatrix) -> Result<RatMatrix> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            row
        })
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&r| !a[r][k].is_zero()).ok_or(Error::SingularBlock)?;
        a.swap(k, p);
        let piv = a[k][k].clone();
        for c in a[k].iter_mut() {
            *c /= &piv;
        }
        for r in 0..n {
            if r != k && !a[r][k].is_zero() {
                let f = a[r][k].clone();
                for c in 0..2 * n {
                    let v = &a[k][c] * &f;
                    a[r][c] -= v;
                }
            }
        }
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn matmul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let (n, k, m) = (a.len(), b.len(), b.first().map(Vec::len).unwrap_or(0));
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).fold(Q::zero(), |acc, t| acc + &a[i][t] * &b[t][j]))
                .collect()
        })
        .collect()
}

fn block(m: &RatMatrix, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> RatMatrix {
    m[rows].iter().map(|r| r[cols.clone()].to_vec()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchurSide {
    /// `S₁ = A − B D⁻¹ C`
    One,
    /// `S₂ = D − C A⁻¹ B`
    Two,
}

/// Schur complement of `M = [[A, B], [C, D]]` with `A` of size `split`.
pub fn schur_complement(m: &RatMatrix, split: usize, which: SchurSide) -> Result<RatMatrix> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::NotSquare);
    }
    if split == 0 || split >= n {
        return Err(Error::Degenerate("split must leave two nonempty blocks".into()));
    }
    let a = block(m, 0..split, 0..split);
    let b = block(m, 0..split, split..n);
    let c = block(m, split..n, 0..split);
    let d = block(m, split..n, split..n);
    let (keep, left, inv, right) = match which {
        SchurSide::One => (a, b, inverse_exact(&d)?, c),
        SchurSide::Two => (d, c, inverse_exact(&a)?, b),
    };
    let prod = matmul(&matmul(&left, &inv), &right);
    Ok(keep.iter().zip(prod).map(|(r, p)| r.iter().zip(p).map(|(x, y)| x - y).collect()).collect())
}

pub fn is_symmetric(m: &RatMatrix) -> bool {
    (0..m.len()).all(|i| (0..i).all(|j| m[i][j] == m[j][i]))
}

/// Sign of a rational, for reporting.
pub fn sign_of(q: &Q) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Q {
        Q::new(a.into(), b.into())
    }

    #[test]
    fn grigorchuk_level_matrices() {
        let s = PencilScheme::builtin(Builtin::Grigorchuk).unwrap();
        let m0 = s.assemble_poly(0).unwrap();
        assert_eq!(m0[0][0], poly("2 - l - m", &LM));
        let m1 = s.assemble_poly(1).unwrap();
        assert_eq!(m1[0][0], poly("2 - m", &LM));
        assert_eq!(m1[0][1], poly("-l", &LM));
        assert_eq!(det_exact(&s.assemble(1, &qi(1), &qi(1)).unwrap()), Q::zero());
    }

    #[test]
    fn hanoi_level_one() {
        let s = PencilScheme::builtin(Builtin::Hanoi).unwrap();
        let m1 = s.assemble_poly(1).unwrap();
        let expect = |i: usize, j: usize| if i == j { poly("1 - l", &LM) } else { poly("m", &LM) };
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m1[i][j], expect(i, j));
            }
        }
        assert!(matches!(s.assemble(0, &qi(0), &qi(0)), Err(Error::Level { .. })));
    }

    #[test]
    fn bareiss_small() {
        let id: RatMatrix = (0..8).map(|i| (0..8).map(|j| if i == j { qi(1) } else { qi(0) }).collect()).collect();
        assert_eq!(det_exact(&id), qi(1));
        let m = vec![vec![q(1, 2), qi(3)], vec![qi(2), q(-1, 3)]];
        assert_eq!(det_exact(&m), q(-1, 6) - qi(6));
        let swap = vec![vec![qi(0), qi(1)], vec![qi(1), qi(0)]];
        assert_eq!(det_exact(&swap), qi(-1));
    }

    #[test]
    fn schur_small() {
        let m = vec![vec![qi(2), qi(1)], vec![qi(1), qi(2)]];
        let s = schur_complement(&m, 1, SchurSide::One).unwrap();
        assert_eq!(s, vec![vec![q(3, 2)]]);
        let diag = vec![vec![qi(2), qi(0)], vec![qi(0), qi(5)]];
        assert_eq!(schur_complement(&diag, 1, SchurSide::One).unwrap(), vec![vec![qi(2)]]);
        let sing = vec![vec![qi(2), qi(1)], vec![qi(1), qi(0)]];
        assert_eq!(schur_complement(&sing, 1, SchurSide::One), Err(Error::SingularBlock));
    }

    #[test]
    fn recursion_spot_checks() {
        let g = PencilScheme::builtin(Builtin::Grigorchuk).unwrap();
        let (l, m) = (q(1, 3), q(1, 5));
        let (rl, rm) = g.map_point(&l, &m).unwrap();
        assert_eq!(g.p_exact(3, &l, &m).unwrap(), g.factor_product(3, &l, &m) * g.p_exact(2, &rl, &rm).unwrap());
        let h = PencilScheme::builtin(Builtin::Hanoi).unwrap();
        let (l, m) = (q(2, 7), q(1, 3));
        let (rl, rm) = h.map_point(&l, &m).unwrap();
        assert_eq!(h.p_exact(3, &l, &m).unwrap(), h.factor_product(3, &l, &m) * h.p_exact(2, &rl, &rm).unwrap());
    }

    #[test]
    fn grigorchuk_sign_flip_is_real() {
        let g = PencilScheme::builtin(Builtin::Grigorchuk).unwrap();
        let (l, m) = (q(1, 3), q(1, 5));
        let (rl, rm) = g.map_point(&l, &m).unwrap();
        let raw2 = det_exact(&g.assemble(2, &l, &m).unwrap());
        let raw1 = det_exact(&g.assemble(1, &rl, &rm).unwrap());
        assert_eq!(raw2, -(g.factor_product(2, &l, &m) * raw1));
    }
}
