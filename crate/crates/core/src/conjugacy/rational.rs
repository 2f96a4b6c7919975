use crate::error::{Error, Result};
use crate::ratmaps::{MultiPoly, RationalMapP2};
use crate::Q;
use num_complex::Complex64;
use num_traits::Zero;

/// Quotient of two polynomials over Q in the same variables.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction2 {
    pub num: MultiPoly,
    pub den: MultiPoly,
}

impl RationalFunction2 {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        assert_eq!(num.nvars(), den.nvars(), "numerator and denominator live in different rings");
        Ok(RationalFunction2 { num, den })
    }

    pub fn poly(p: MultiPoly) -> Self {
        let n = p.nvars();
        RationalFunction2 { num: p, den: MultiPoly::one(n) }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        Self::poly(MultiPoly::constant(nvars, c))
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::poly(MultiPoly::var(nvars, i))
    }

    pub fn parse(num: &str, den: &str, vars: &[&str]) -> Result<Self> {
        Self::new(MultiPoly::parse(num, vars)?, MultiPoly::parse(den, vars)?)
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return RationalFunction2 { num: &self.num + &o.num, den: self.den.clone() };
        }
        RationalFunction2 { num: &(&self.num * &o.den) + &(&o.num * &self.den), den: &self.den * &o.den }
    }

    pub fn neg(&self) -> Self {
        RationalFunction2 { num: -&self.num, den: self.den.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        RationalFunction2 { num: &self.num * &o.num, den: &self.den * &o.den }
    }

    pub fn scale(&self, c: &Q) -> Self {
        RationalFunction2 { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn inv(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    /// `f(g_1, …, g_k)`. All arguments are brought to one denominator `D`
    /// and the homogenized numerator and denominator are evaluated there.
    pub fn compose(&self, args: &[RationalFunction2]) -> Result<Self> {
        assert_eq!(args.len(), self.nvars(), "wrong number of arguments");
        let nv = args.first().map(|a| a.nvars()).unwrap_or(0);
        let mut dens: Vec<&MultiPoly> = Vec::new();
        for a in args {
            if !dens.contains(&&a.den) {
                dens.push(&a.den);
            }
        }
        let big_d = dens.iter().fold(MultiPoly::one(nv), |acc, d| &acc * d);
        let mut lifted: Vec<MultiPoly> = args
            .iter()
            .map(|a| {
                let rest = dens.iter().filter(|d| ***d != a.den).fold(MultiPoly::one(nv), |acc, d| &acc * d);
                &a.num * &rest
            })
            .collect();
        lifted.push(big_d.clone());
        let dn = self.num.total_degree().unwrap_or(0);
        let dd = self.den.total_degree().unwrap_or(0);
        let mut num = self.num.homogenize(dn).substitute(&lifted);
        let mut den = self.den.homogenize(dd).substitute(&lifted);
        if dd > dn {
            num = &num * &big_d.pow(dd - dn);
        } else if dn > dd {
            den = &den * &big_d.pow(dn - dd);
        }
        Self::new(num, den)
    }

    /// Exact equality by cross-multiplication.
    pub fn equals(&self, o: &Self) -> bool {
        (&self.num * &o.den) == (&o.num * &self.den)
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.num.eval_f64(x) / self.den.eval_f64(x)
    }

    pub fn eval_complex(&self, x: &[Complex64]) -> Complex64 {
        self.num.eval_complex(x) / self.den.eval_complex(x)
    }

    pub fn eval(&self, x: &[Q]) -> Result<Q> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(self.num.eval(x) / d)
    }
}

/// Affine chart `(X/W, Y/W)` of a plane map.
pub fn affine_components(f: &RationalMapP2) -> [RationalFunction2; 2] {
    let den = f.comps[2].dehomogenize();
    [
        RationalFunction2 { num: f.comps[0].dehomogenize(), den: den.clone() },
        RationalFunction2 { num: f.comps[1].dehomogenize(), den },
    ]
}

/// Componentwise exact equality of two maps given as rational functions.
pub fn verify_identity(lhs: &[RationalFunction2], rhs: &[RationalFunction2]) -> bool {
    lhs.len() == rhs.len() && lhs.iter().zip(rhs).all(|(a, b)| a.equals(b))
}

/// `f ∘ g` componentwise.
pub fn compose_maps(f: &[RationalFunction2], g: &[RationalFunction2]) -> Result<Vec<RationalFunction2>> {
    f.iter().map(|c| c.compose(g)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const XY: [&str; 2] = ["x", "y"];

    fn rf(n: &str, d: &str) -> RationalFunction2 {
        RationalFunction2::parse(n, d, &XY).unwrap()
    }

    #[test]
    fn arithmetic() {
        let a = rf("x", "y");
        let b = rf("1", "x");
        assert!(a.add(&b).equals(&rf("x^2 + y", "x*y")));
        assert!(a.mul(&b).equals(&rf("1", "y")));
        assert!(a.sub(&a).is_zero());
        assert_eq!(rf("0", "x").inv(), Err(Error::ZeroDenominator));
    }

    #[test]
    fn composition() {
        // f(x, y) = x/y at (x + 1, x*y) is (x+1)/(x*y)
        let f = rf("x", "y");
        let g = [rf("x + 1", "1"), rf("x*y", "1")];
        assert!(f.compose(&g).unwrap().equals(&rf("x + 1", "x*y")));
        // f(x, y) = x^2 + y at (1/x, 1/y)
        let f = rf("x^2 + y", "1");
        let g = [rf("1", "x"), rf("1", "y")];
        assert!(f.compose(&g).unwrap().equals(&rf("y + x^2", "x^2*y")));
        let g0 = [rf("x", "1"), rf("0", "1")];
        assert_eq!(rf("1", "y").compose(&g0), Err(Error::ZeroDenominator));
    }
}
