//! Affine maps `z ↦ A z + b` on the torus `R^m / Z^m`.
//!
//! Rotations, toral automorphisms and cocycle extensions with
//! integer-linear cocycles are all of this form, so one engine serves the
//! three kinds. Powers are taken in integer arithmetic and applied to
//! coordinates with [`frac_mul`], which keeps `T^n z` accurate to roughly
//! machine epsilon for every `n` whose matrices fit in 64 bits.

use crate::error::{Error, Result};
use crate::intmat::IntMatrix;
use crate::phase::{frac, frac_mul};

pub(crate) const MAX_TORUS_DIM: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    matrix: IntMatrix,
    inverse: IntMatrix,
    translation: Vec<f64>,
    is_translation: bool,
}

/// `T^n z = matrix·z + sign·shift·b (mod 1)`.
#[derive(Clone, Debug)]
pub struct AffinePower {
    pub matrix: IntMatrix,
    pub shift: IntMatrix,
    pub sign: i8,
}

impl AffineMap {
    pub fn new(matrix: IntMatrix, translation: Vec<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != translation.len() {
            return Err(Error::InvalidSystem(format!(
                "affine map needs a square matrix matching translation length {}",
                translation.len()
            )));
        }
        if matrix.rows() == 0 || matrix.rows() > MAX_TORUS_DIM {
            return Err(Error::InvalidSystem(format!(
                "torus dimension {} outside 1..={MAX_TORUS_DIM}",
                matrix.rows()
            )));
        }
        if let Some(bad) = translation.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(*bad));
        }
        let inverse = matrix.unimodular_inverse()?;
        let is_translation = matrix.is_identity();
        Ok(Self {
            matrix,
            inverse,
            translation,
            is_translation,
        })
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn translation(&self) -> &[f64] {
        &self.translation
    }

    pub fn is_translation(&self) -> bool {
        self.is_translation
    }

    /// One forward step in place.
    #[inline]
    pub fn advance(&self, z: &mut [f64]) {
        if self.is_translation {
            for (c, a) in z.iter_mut().zip(&self.translation) {
                *c = frac(*c + a);
            }
            return;
        }
        let m = self.dim();
        let mut out = [0.0f64; MAX_TORUS_DIM];
        for (i, o) in out.iter_mut().enumerate().take(m) {
            let mut acc = self.translation[i];
            for (l, &zl) in z.iter().enumerate() {
                acc += match self.matrix.get(i, l) {
                    0 => 0.0,
                    1 => zl,
                    a => frac_mul(a, zl),
                };
            }
            *o = frac(acc);
        }
        z.copy_from_slice(&out[..m]);
    }

    pub fn power(&self, n: i64) -> Result<AffinePower> {
        if n >= 0 {
            let (matrix, shift) = self.matrix.pow_and_geometric_sum(n as u64)?;
            Ok(AffinePower {
                matrix,
                shift,
                sign: 1,
            })
        } else {
            // T^{-m} z = A^{-m} z - Σ_{j=1}^{m} A^{-j} b
            let m = n.unsigned_abs();
            let (matrix, partial) = self.inverse.pow_and_geometric_sum(m)?;
            let shift = self.inverse.checked_mul(&partial)?;
            Ok(AffinePower {
                matrix,
                shift,
                sign: -1,
            })
        }
    }

    /// `T^n z` via the closed form.
    pub fn apply_power(&self, z: &mut [f64], n: i64) -> Result<()> {
        if n == 0 {
            return Ok(());
        }
        if self.is_translation {
            for (c, a) in z.iter_mut().zip(&self.translation) {
                *c = frac(*c + frac_mul(n, *a));
            }
            return Ok(());
        }
        let p = self.power(n)?;
        let m = self.dim();
        let mut out = [0.0f64; MAX_TORUS_DIM];
        for (i, o) in out.iter_mut().enumerate().take(m) {
            let mut lin = 0.0;
            let mut off = 0.0;
            for (l, (zl, tl)) in z.iter().zip(&self.translation).enumerate() {
                lin += frac_mul(p.matrix.get(i, l), *zl);
                off += frac_mul(p.shift.get(i, l), *tl);
            }
            *o = frac(frac(lin) + f64::from(p.sign) * frac(off));
        }
        z.copy_from_slice(&out[..m]);
        Ok(())
    }

    /// Frequency and phase of `e(k·T^n z)`: `e(phase)·e(k'·z)`.
    pub fn compose_character(&self, k: &[i64], n: i64) -> Result<(Vec<i64>, f64)> {
        if self.is_translation {
            let mut phase = 0.0;
            for (kl, al) in k.iter().zip(&self.translation) {
                let m = kl.checked_mul(n).ok_or(Error::FrequencyOverflow { n })?;
                phase += frac_mul(m, *al);
            }
            return Ok((k.to_vec(), frac(phase)));
        }
        let p = self.power(n).map_err(|_| Error::FrequencyOverflow { n })?;
        let new_k = p
            .matrix
            .transpose()
            .checked_mul_vec(k)
            .map_err(|_| Error::FrequencyOverflow { n })?;
        let weights = p
            .shift
            .transpose()
            .checked_mul_vec(k)
            .map_err(|_| Error::FrequencyOverflow { n })?;
        let mut phase = 0.0;
        for (w, b) in weights.iter().zip(&self.translation) {
            phase += frac_mul(*w, *b);
        }
        Ok((new_k, frac(f64::from(p.sign) * frac(phase))))
    }
}
