use super::rational::RationalFunction2;
use crate::error::{Error, Result};
use crate::ratmaps::{MultiPoly, RationalMapP2};

/// Ring element `p + q·s` with polynomial coefficients and `s² = disc`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadPoly {
    pub p: MultiPoly,
    pub q: MultiPoly,
    pub disc: MultiPoly,
}

impl QuadPoly {
    pub fn base(p: MultiPoly, disc: &MultiPoly) -> Self {
        let n = p.nvars();
        QuadPoly { p, q: MultiPoly::zero(n), disc: disc.clone() }
    }

    pub fn sqrt_disc(disc: &MultiPoly) -> Self {
        let n = disc.nvars();
        QuadPoly { p: MultiPoly::zero(n), q: MultiPoly::one(n), disc: disc.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        QuadPoly { p: &self.p + &o.p, q: &self.q + &o.q, disc: self.disc.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        QuadPoly { p: &self.p - &o.p, q: &self.q - &o.q, disc: self.disc.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = &(&self.p * &o.p) + &(&(&self.q * &o.q) * &self.disc);
        let q = &(&self.p * &o.q) + &(&self.q * &o.p);
        QuadPoly { p, q, disc: self.disc.clone() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = QuadPoly::base(MultiPoly::one(self.disc.nvars()), &self.disc);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn conj(&self) -> Self {
        QuadPoly { p: self.p.clone(), q: -&self.q, disc: self.disc.clone() }
    }

    /// `p² − q²·disc`.
    pub fn norm(&self) -> MultiPoly {
        &(&self.p * &self.p) - &(&(&self.q * &self.q) * &self.disc)
    }

    /// Evaluate a polynomial at ring-valued arguments.
    pub fn eval_poly(f: &MultiPoly, args: &[QuadPoly], disc: &MultiPoly) -> QuadPoly {
        let nv = disc.nvars();
        let one = QuadPoly::base(MultiPoly::one(nv), disc);
        let mut powers: Vec<Vec<QuadPoly>> = args.iter().map(|a| vec![one.clone(), a.clone()]).collect();
        let mut acc = QuadPoly::base(MultiPoly::zero(nv), disc);
        for (e, c) in f.terms() {
            let mut t = QuadPoly::base(MultiPoly::constant(nv, c.clone()), disc);
            for (i, &k) in e.iter().enumerate() {
                let k = k as usize;
                while powers[i].len() <= k {
                    let next = powers[i].last().expect("seeded").mul(&args[i]);
                    powers[i].push(next);
                }
                if k > 0 {
                    t = t.mul(&powers[i][k]);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }
}

/// Element `num/den` of the fraction field of `Q[vars][s]/(s² − disc)`,
/// i.e. `p + q·s` with `p`, `q` rational functions. Division never expands
/// norms; equality is tested by cross-multiplication in the ring, which is
/// a domain whenever `disc` is not a square.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadExtElement {
    pub num: QuadPoly,
    pub den: QuadPoly,
}

impl QuadExtElement {
    pub fn from_ring(num: QuadPoly) -> Self {
        let den = QuadPoly::base(MultiPoly::one(num.disc.nvars()), &num.disc);
        QuadExtElement { num, den }
    }

    pub fn from_poly(p: MultiPoly, disc: &MultiPoly) -> Self {
        Self::from_ring(QuadPoly::base(p, disc))
    }

    pub fn sqrt_disc(disc: &MultiPoly) -> Self {
        Self::from_ring(QuadPoly::sqrt_disc(disc))
    }

    pub fn new(num: QuadPoly, den: QuadPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(QuadExtElement { num, den })
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return QuadExtElement { num: self.num.add(&o.num), den: self.den.clone() };
        }
        QuadExtElement { num: self.num.mul(&o.den).add(&o.num.mul(&self.den)), den: self.den.mul(&o.den) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let neg = QuadExtElement { num: QuadPoly::base(MultiPoly::zero(o.num.disc.nvars()), &o.num.disc).sub(&o.num), den: o.den.clone() };
        self.add(&neg)
    }

    pub fn mul(&self, o: &Self) -> Self {
        QuadExtElement { num: self.num.mul(&o.num), den: self.den.mul(&o.den) }
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Self::new(self.num.mul(&o.den), self.den.mul(&o.num))
    }

    pub fn equals(&self, o: &Self) -> bool {
        self.num.mul(&o.den).sub(&o.num.mul(&self.den)).is_zero()
    }

    /// `(p, q)` with `self = p + q·s`, obtained by rationalizing the
    /// denominator.
    pub fn rational_parts(&self) -> Result<(RationalFunction2, RationalFunction2)> {
        let nrm = self.den.norm();
        let top = self.num.mul(&self.den.conj());
        Ok((RationalFunction2::new(top.p, nrm.clone())?, RationalFunction2::new(top.q, nrm)?))
    }

    /// Arguments over one common denominator.
    fn common(args: &[QuadExtElement]) -> (Vec<QuadPoly>, QuadPoly) {
        let mut dens: Vec<&QuadPoly> = Vec::new();
        for a in args {
            if !dens.contains(&&a.den) {
                dens.push(&a.den);
            }
        }
        let disc = &args[0].num.disc;
        let one = QuadPoly::base(MultiPoly::one(disc.nvars()), disc);
        let big = dens.iter().fold(one.clone(), |acc, d| acc.mul(d));
        let nums = args
            .iter()
            .map(|a| dens.iter().filter(|d| ***d != a.den).fold(a.num.clone(), |acc, d| acc.mul(d)))
            .collect();
        (nums, big)
    }

    /// `f(args)` through the homogenized numerator and denominator.
    pub fn eval_rational(f: &RationalFunction2, args: &[QuadExtElement]) -> Result<Self> {
        let (mut lifted, d) = Self::common(args);
        let disc = d.disc.clone();
        lifted.push(d.clone());
        let dn = f.num.total_degree().unwrap_or(0);
        let dd = f.den.total_degree().unwrap_or(0);
        let mut num = QuadPoly::eval_poly(&f.num.homogenize(dn), &lifted, &disc);
        let mut den = QuadPoly::eval_poly(&f.den.homogenize(dd), &lifted, &disc);
        if dd > dn {
            num = num.mul(&d.pow(dd - dn));
        } else if dn > dd {
            den = den.mul(&d.pow(dn - dd));
        }
        Self::new(num, den)
    }

    /// Affine image `(X/W, Y/W)` of a plane map at `(λ, μ)`.
    pub fn apply_map(f: &RationalMapP2, l: &QuadExtElement, m: &QuadExtElement) -> Result<[Self; 2]> {
        let (mut lifted, d) = Self::common(&[l.clone(), m.clone()]);
        let disc = d.disc.clone();
        lifted.push(d);
        let [x, y, w] = [0, 1, 2].map(|i| QuadPoly::eval_poly(&f.comps[i], &lifted, &disc));
        Ok([Self::new(x, w.clone())?, Self::new(y, w)?])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc() -> MultiPoly {
        MultiPoly::parse("e^2 - 1", &["e", "z"]).unwrap()
    }

    #[test]
    fn square_of_root_is_disc() {
        let d = disc();
        let s = QuadExtElement::sqrt_disc(&d);
        assert!(s.mul(&s).equals(&QuadExtElement::from_poly(d.clone(), &d)));
    }

    #[test]
    fn inverse_round_trip() {
        let d = disc();
        let s = QuadExtElement::sqrt_disc(&d);
        let a = s.add(&QuadExtElement::from_poly(MultiPoly::var(2, 1), &d));
        let one = QuadExtElement::from_poly(MultiPoly::one(2), &d);
        assert!(one.div(&a).unwrap().mul(&a).equals(&one));
        let (p, q) = one.div(&a).unwrap().rational_parts().unwrap();
        // 1/(z + s) = (z − s)/(z² − e² + 1)
        assert!(p.equals(&RationalFunction2::parse("z", "z^2 - e^2 + 1", &["e", "z"]).unwrap()));
        assert!(q.equals(&RationalFunction2::parse("-1", "z^2 - e^2 + 1", &["e", "z"]).unwrap()));
    }
}
