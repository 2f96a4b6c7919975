//! Fixed inputs shared by the benchmarks, kept here so the bench harness
//! and a smoke test build them the same way.

use num_bigint::BigInt;
use renorm_core::groups::Builtin;
use renorm_core::pencils::{PencilScheme, RatMatrix};
use renorm_core::{Result, Q};

/// Exact pencil of `group` at level `n` at the point (3/7, −5/11).
pub fn exact_pencil(group: Builtin, n: usize) -> Result<RatMatrix> {
    let s = PencilScheme::builtin(group)?;
    s.assemble(n, &Q::new(3.into(), 7.into()), &Q::new((-5).into(), 11.into()))
}

/// Dense float pencil on the group's default line, with its size.
pub fn float_pencil(group: Builtin, n: usize) -> Result<(Vec<f64>, usize)> {
    let s = PencilScheme::builtin(group)?;
    let m = match group {
        Builtin::Grigorchuk => s.assemble_f64(n, -1.0, 0.0)?,
        Builtin::Hanoi => s.assemble_f64(n, 0.0, 1.0)?,
        _ => s.assemble_f64(n, 0.0, 0.0)?,
    };
    let size = (m.len() as f64).sqrt().round() as usize;
    Ok((m, size))
}

/// Two base points of a fixed generic line.
pub fn generic_line() -> ([BigInt; 3], [BigInt; 3]) {
    ([BigInt::from(3), BigInt::from(-7), BigInt::from(2)], [BigInt::from(-5), BigInt::from(4), BigInt::from(9)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use renorm_core::pencils::det_exact;
    use renorm_core::ratmaps::{MapName, RationalMapP2};
    use renorm_core::spectra::sym_eigenvalues;

    #[test]
    fn inputs_are_usable() {
        let m = exact_pencil(Builtin::Hanoi, 2).unwrap();
        assert_eq!(m.len(), 9);
        let _ = det_exact(&m);
        let (f, n) = float_pencil(Builtin::Grigorchuk, 5).unwrap();
        assert_eq!(sym_eigenvalues(&f, n, 1e-10, 4).unwrap().values.len(), 32);
        let (p, q) = generic_line();
        let degs = RationalMapP2::builtin(MapName::RL).compose_along_line(&p, &q, 4).unwrap();
        assert_eq!(degs, vec![2, 3, 4, 5]);
    }
}
