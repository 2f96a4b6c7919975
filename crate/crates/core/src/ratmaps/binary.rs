use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Homogeneous form `Σ c_i s^i t^(D-i)` of declared degree `D = coeffs.len() - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryForm {
    pub coeffs: Vec<BigInt>,
}

impl BinaryForm {
    pub fn zero(degree: usize) -> Self {
        BinaryForm { coeffs: vec![BigInt::zero(); degree + 1] }
    }
    pub fn constant(c: BigInt) -> Self {
        BinaryForm { coeffs: vec![c] }
    }
    /// `a s + b t`
    pub fn linear(a: BigInt, b: BigInt) -> Self {
        BinaryForm { coeffs: vec![b, a] }
    }
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn add(&self, o: &BinaryForm) -> BinaryForm {
        assert_eq!(self.degree(), o.degree(), "adding forms of different degree");
        BinaryForm { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, c: &BigInt) -> BinaryForm {
        BinaryForm { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn mul(&self, o: &BinaryForm) -> BinaryForm {
        BinaryForm { coeffs: upoly_mul(&self.coeffs, &o.coeffs) }
    }

    pub fn pow(&self, k: u32) -> BinaryForm {
        let mut acc = BinaryForm::constant(BigInt::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn content(&self) -> BigInt {
        content(&self.coeffs)
    }

    /// Multiplicity of the factor `t` (leading coefficients in `s` vanishing).
    fn t_multiplicity(&self) -> usize {
        self.coeffs.iter().rev().take_while(|c| c.is_zero()).count()
    }

    /// Dehomogenization `f(s, 1)` with trailing zeros removed.
    fn affine(&self) -> Vec<BigInt> {
        let mut v = self.coeffs.clone();
        trim(&mut v);
        v
    }

    pub fn eval(&self, s: &BigInt, t: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        let mut tp = BigInt::one();
        let d = self.degree();
        let mut spows = vec![BigInt::one(); d + 1];
        for i in 1..=d {
            spows[i] = &spows[i - 1] * s;
        }
        for i in (0..=d).rev() {
            acc += &self.coeffs[i] * &spows[i] * &tp;
            tp *= t;
        }
        acc
    }

    /// Exact division by a form known to divide this one.
    pub fn div_exact(&self, g: &BinaryForm) -> BinaryForm {
        let ga = g.affine();
        let fa = self.affine();
        let mut q = if fa.is_empty() { vec![] } else { upoly_div_exact(&fa, &ga) };
        let deg = self.degree() - g.degree();
        q.resize(deg + 1, BigInt::zero());
        BinaryForm { coeffs: q }
    }
}

/// Homogeneous gcd of binary forms, primitive with positive leading coefficient.
pub fn gcd_forms(forms: &[&BinaryForm]) -> BinaryForm {
    let nonzero: Vec<&&BinaryForm> = forms.iter().filter(|f| !f.is_zero()).collect();
    if nonzero.is_empty() {
        return BinaryForm::constant(BigInt::zero());
    }
    let tk = nonzero.iter().map(|f| f.t_multiplicity()).min().unwrap_or(0);
    let mut g: Vec<BigInt> = nonzero[0].affine();
    for f in &nonzero[1..] {
        if g.len() <= 1 {
            break;
        }
        g = upoly_gcd(&g, &f.affine());
    }
    g = primitive(&g);
    let gdeg = g.len().saturating_sub(1);
    let mut coeffs = g;
    coeffs.resize(gdeg + tk + 1, BigInt::zero());
    BinaryForm { coeffs }
}

pub(crate) fn trim(v: &mut Vec<BigInt>) {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

pub(crate) fn content(v: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for c in v {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Divide out the content; leading coefficient made positive.
pub(crate) fn primitive(v: &[BigInt]) -> Vec<BigInt> {
    let mut g = content(v);
    if g.is_zero() {
        return v.to_vec();
    }
    if v.iter().rev().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative()) {
        g = -g;
    }
    v.iter().map(|c| c / &g).collect()
}

pub(crate) fn upoly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Pseudo-remainder of `a` by `b` (both trimmed, `b` nonzero).
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (j, bj) in b.iter().enumerate() {
            r[dr - db + j] -= &lr * bj;
        }
        trim(&mut r);
        if !r.is_empty() {
            let g = content(&r);
            if !g.is_one() && !g.is_zero() {
                for c in r.iter_mut() {
                    *c /= &g;
                }
            }
        }
    }
    r
}

/// Gcd over the integers: modular first, primitive PRS if the prime
/// budget runs out.
pub(crate) fn upoly_gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    if x.len() > 1 && y.len() > 1 {
        if let Some(g) = super::modgcd::upoly_gcd_modular(&x, &y) {
            return g;
        }
    }
    upoly_gcd_prs(&x, &y)
}

/// Primitive PRS gcd over the integers.
pub(crate) fn upoly_gcd_prs(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    if x.is_empty() {
        return primitive(&y);
    }
    if y.is_empty() {
        return primitive(&x);
    }
    let cont = content(&x).gcd(&content(&y));
    x = primitive(&x);
    y = primitive(&y);
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        if y.len() == 1 {
            return vec![cont];
        }
        let r = pseudo_rem(&x, &y);
        x = y;
        y = primitive(&r);
    }
    x.iter().map(|c| c * &cont).collect()
}

/// Exact division of trimmed integer polynomials.
pub(crate) fn upoly_div_exact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    if r.len() < b.len() {
        assert!(r.is_empty(), "non-exact division");
        return vec![];
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let (qc, rem) = r[dr].div_rem(&b[db]);
        assert!(rem.is_zero(), "non-exact division");
        for (j, bj) in b.iter().enumerate() {
            r[dr - db + j] -= &qc * bj;
        }
        q[dr - db] = qc;
        trim(&mut r);
    }
    assert!(r.is_empty(), "non-exact division");
    q
}
