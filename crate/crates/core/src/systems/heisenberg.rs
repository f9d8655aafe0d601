//! The Heisenberg nilmanifold `G/Γ`, `G` the upper unitriangular real
//! 3×3 matrices and `Γ` its integer points.
//!
//! Elements are written `(x, y, z)` with product
//! `(x,y,z)·(x',y',z') = (x+x', y+y', z+z'+x·y')`. Points of `G/Γ` are
//! represented in the fundamental domain `[0,1)^3`.

use crate::error::{Error, Result};
use crate::phase::{frac, frac_mul, frac_mul_prod, frac_prod};

/// Point of `G/Γ` in fundamental-domain coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeisenbergPoint(pub(crate) [f64; 3]);

impl HeisenbergPoint {
    /// Reduces an arbitrary group element; see [`reduce_mod_lattice`].
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        reduce_mod_lattice([x, y, z])
    }

    pub fn identity() -> Self {
        Self([0.0; 3])
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }

    pub fn z(&self) -> f64 {
        self.0[2]
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub(crate) fn from_reduced(c: [f64; 3]) -> Self {
        Self(c)
    }
}

/// Group law before reduction.
pub fn group_mul(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2] + a[0] * b[1]]
}

/// Lattice element `γ = (a, b, c)` with `g·γ ∈ [0,1)^3`.
///
/// `a = -floor(x)`, `b = -floor(y)`, then `c = -floor(z + x·b)`, using
/// right multiplication `(x,y,z)(a,b,c) = (x+a, y+b, z+c+x·b)`.
pub fn lattice_correction(g: [f64; 3]) -> Result<[i64; 3]> {
    if let Some(bad) = g.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(*bad));
    }
    let [x, y, z] = g;
    let a = -x.floor();
    let b = -y.floor();
    let c = -(z + x * b).floor();
    Ok([a as i64, b as i64, c as i64])
}

/// Reduces a raw group element to the fundamental domain.
pub fn reduce_mod_lattice(g: [f64; 3]) -> Result<HeisenbergPoint> {
    let [a, b, _] = lattice_correction(g)?;
    let [x, y, z] = g;
    let (a, b) = (a as f64, b as f64);
    Ok(HeisenbergPoint([frac(x + a), frac(y + b), frac(z + x * b)]))
}

/// Left translation by `t = (α, β, 0)`.
#[inline]
pub(crate) fn translate(alpha: f64, beta: f64, p: &mut [f64]) {
    let raw = group_mul([alpha, beta, 0.0], [p[0], p[1], p[2]]);
    let b = -raw[1].floor();
    p[0] = frac(raw[0]);
    p[1] = frac(raw[1] + b);
    p[2] = frac(raw[2] + raw[0] * b);
}

/// `t^n · p` from the closed form `t^n = (nα, nβ, n(n-1)/2 · αβ)`.
///
/// Every product of a large integer with a real is reduced mod 1 before it
/// is summed, so accuracy does not degrade with `|n|`.
pub(crate) fn translate_pow(alpha: f64, beta: f64, p: &mut [f64], n: i64) -> Result<()> {
    if n == 0 {
        return Ok(());
    }
    let [x, y, z] = [p[0], p[1], p[2]];
    let binom = (n as i128 * (n as i128 - 1)) / 2;
    let binom = i64::try_from(binom)
        .map_err(|_| Error::InvalidArgument(format!("exponent {n} too large")))?;

    let x_new = frac(x + frac_mul(n, alpha));
    let y_frac = frac(y + frac_mul(n, beta));
    // floor(y + nβ), recovered from the accurately reduced fractional part
    let y_floor = (y + n as f64 * beta - y_frac).round();
    let b = -y_floor;
    let b_int = b as i64;
    let nb = n
        .checked_mul(b_int)
        .ok_or_else(|| Error::InvalidArgument(format!("exponent {n} too large")))?;

    // z-coordinate of t^n·p, then the correction x_raw·b with x_raw = x + nα
    let z_raw = z + frac_mul_prod(n, alpha, y) + frac_mul_prod(binom, alpha, beta);
    let corr = frac_prod(x, b) + frac_mul(nb, alpha);
    p[0] = x_new;
    p[1] = y_frac;
    p[2] = frac(frac(z_raw) + frac(corr));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: HeisenbergPoint, b: [f64; 3]) -> bool {
        a.coords()
            .iter()
            .zip(b)
            .all(|(u, v)| crate::phase::circle_distance(*u, v) < 1e-12)
    }

    #[test]
    fn reduction_examples() {
        assert!(close(
            reduce_mod_lattice([0.3, 0.4, 0.5]).unwrap(),
            [0.3, 0.4, 0.5]
        ));
        assert!(close(
            reduce_mod_lattice([1.3, 0.4, 0.5]).unwrap(),
            [0.3, 0.4, 0.5]
        ));
        // b = -1: z' = 0.1 - 0.5 = -0.4, then c = 1 gives 0.6
        assert!(close(
            reduce_mod_lattice([0.5, 1.2, 0.1]).unwrap(),
            [0.5, 0.2, 0.6]
        ));
    }

    #[test]
    fn reduction_is_a_lattice_translate() {
        let g = [3.7, -2.2, 5.9];
        let gamma = lattice_correction(g).unwrap();
        let red = reduce_mod_lattice(g).unwrap();
        let prod = group_mul(g, [gamma[0] as f64, gamma[1] as f64, gamma[2] as f64]);
        for (p, r) in prod.iter().zip(red.coords()) {
            assert!((p - r).abs() < 1e-12);
        }
    }

    #[test]
    fn non_finite_rejected() {
        assert!(matches!(
            reduce_mod_lattice([f64::NAN, 0.0, 0.0]),
            Err(Error::NonFinite(_))
        ));
    }
}
