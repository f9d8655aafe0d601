//! Trigonometric polynomials `f(z) = Σ c_k e(k·z)` on a system's state space.
//!
//! Observables are finite character sums kept in canonical form (sorted,
//! merged, exact zeros dropped). Composition with `T^n` is exact for every
//! supported system, which makes them the oracle side of every numerical
//! check in the crate. On the Heisenberg manifold only base characters
//! `e(px + qy)` are admitted; the `z` frequency must be zero.
//!
//! Literal syntax: `re,im:k1,k2,...` terms joined by `;`, e.g.
//! `1,0:1;0.5,0:-2` is `e(x) + e(-2x)/2`.

use crate::error::{Error, Result};
use crate::phase::{e, frac, frac_mul};
use crate::systems::{DynamicalSystem, Point, SystemKind};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;

/// Default cap on the number of terms produced by a product.
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub freq: Vec<i64>,
    pub coeff: Complex64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    dim: usize,
    terms: Vec<Term>,
}

impl Observable {
    pub fn new(dim: usize, terms: impl IntoIterator<Item = (Vec<i64>, Complex64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidObservable(
                "dimension must be positive".into(),
            ));
        }
        let mut merged: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
        for (k, c) in terms {
            if k.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: k.len(),
                });
            }
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::InvalidObservable(format!(
                    "non-finite coefficient {c}"
                )));
            }
            *merged.entry(k).or_default() += c;
        }
        Ok(Self::from_merged(dim, merged))
    }

    fn from_merged(dim: usize, merged: BTreeMap<Vec<i64>, Complex64>) -> Self {
        let terms = merged
            .into_iter()
            .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
            .map(|(freq, coeff)| Term { freq, coeff })
            .collect();
        Self { dim, terms }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        Self::new(dim, [(vec![0; dim], c)]).expect("valid constant")
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Complex64::new(1.0, 0.0))
    }

    /// `e(k·z)`.
    pub fn character(freq: Vec<i64>) -> Self {
        let dim = freq.len();
        Self::new(dim, [(freq, Complex64::new(1.0, 0.0))]).expect("valid character")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Σ |c_k|`, an upper bound for `‖f‖∞`.
    pub fn sup_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).sum()
    }

    /// Checks that the observable lives on the system's state space.
    pub fn check_for(&self, system: &DynamicalSystem) -> Result<()> {
        if self.dim != system.dimension() {
            return Err(Error::DimensionMismatch {
                expected: system.dimension(),
                got: self.dim,
            });
        }
        if system.is_heisenberg() && self.terms.iter().any(|t| t.freq[2] != 0) {
            return Err(Error::InvalidObservable(
                "Heisenberg observables must not depend on z".into(),
            ));
        }
        Ok(())
    }

    pub fn eval(&self, p: &Point) -> Result<Complex64> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: p.dim(),
            });
        }
        Ok(self.eval_coords(p.coords()))
    }

    /// Evaluation on raw coordinates; the caller guarantees the length.
    #[inline]
    pub fn eval_coords(&self, z: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let mut phase = 0.0;
            for (k, x) in t.freq.iter().zip(z) {
                match *k {
                    0 => {}
                    1 => phase += *x,
                    -1 => phase -= *x,
                    k => phase += frac_mul(k, *x),
                }
            }
            acc += t.coeff * e(phase);
        }
        acc
    }

    /// Haar integral: the zero-frequency coefficient.
    pub fn integral_haar(&self) -> Complex64 {
        self.terms
            .iter()
            .find(|t| t.freq.iter().all(|k| *k == 0))
            .map_or(Complex64::new(0.0, 0.0), |t| t.coeff)
    }

    pub fn conjugate(&self) -> Self {
        let merged = self
            .terms
            .iter()
            .map(|t| (t.freq.iter().map(|k| -k).collect(), t.coeff.conj()))
            .collect();
        Self::from_merged(self.dim, merged)
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.multiply_capped(other, DEFAULT_TERM_CAP)
    }

    /// Convolution of the two frequency lists; fails when the number of
    /// pairwise products exceeds `cap`.
    pub fn multiply_capped(&self, other: &Self, cap: usize) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let pairs = self.terms.len().saturating_mul(other.terms.len());
        if pairs > cap {
            return Err(Error::TermCap { terms: pairs, cap });
        }
        let mut merged: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
        for a in &self.terms {
            for b in &other.terms {
                let k = a
                    .freq
                    .iter()
                    .zip(&b.freq)
                    .map(|(x, y)| x.checked_add(*y).ok_or(Error::FrequencySumOverflow))
                    .collect::<Result<Vec<_>>>()?;
                *merged.entry(k).or_default() += a.coeff * b.coeff;
            }
        }
        Ok(Self::from_merged(self.dim, merged))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::new(
            self.dim,
            self.terms
                .iter()
                .chain(&other.terms)
                .map(|t| (t.freq.clone(), t.coeff)),
        )
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let merged = self
            .terms
            .iter()
            .map(|t| (t.freq.clone(), t.coeff * c))
            .collect();
        Self::from_merged(self.dim, merged)
    }

    /// `f ∘ T^n`, exactly.
    pub fn compose_with_power(&self, system: &DynamicalSystem, n: i64) -> Result<Self> {
        self.check_for(system)?;
        let law = CompositionLaw::new(system);
        let mut merged: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
        for t in &self.terms {
            let (k, phase) = law.apply(&t.freq, n)?;
            *merged.entry(k).or_default() += t.coeff * phase;
        }
        Ok(Self::from_merged(self.dim, merged))
    }

    /// Conditional expectation onto the first `base_dim` coordinates of a
    /// cocycle extension: fiber frequencies are dropped.
    pub fn base_expectation(&self, base_dim: usize) -> Self {
        let merged = self
            .terms
            .iter()
            .filter(|t| t.freq[base_dim..].iter().all(|k| *k == 0))
            .map(|t| (t.freq.clone(), t.coeff))
            .collect();
        Self::from_merged(self.dim, merged)
    }

    /// `Σ |c_k|²`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm_sqr()).sum()
    }
}

/// Per-system rule `(k, n) ↦ (k', e(θ))` with `e(k·T^n z) = e(θ)·e(k'·z)`.
#[derive(Clone, Copy, Debug)]
pub struct CompositionLaw<'a> {
    system: &'a DynamicalSystem,
}

impl<'a> CompositionLaw<'a> {
    pub fn new(system: &'a DynamicalSystem) -> Self {
        Self { system }
    }

    /// New frequency and the phase as a point of `[0, 1)`.
    pub fn apply_phase(&self, k: &[i64], n: i64) -> Result<(Vec<i64>, f64)> {
        match self.system.kind() {
            SystemKind::HeisenbergTranslation { alpha, beta } => {
                let p = k[0].checked_mul(n).ok_or(Error::FrequencyOverflow { n })?;
                let q = k[1].checked_mul(n).ok_or(Error::FrequencyOverflow { n })?;
                Ok((k.to_vec(), frac(frac_mul(p, *alpha) + frac_mul(q, *beta))))
            }
            _ => self
                .system
                .affine()
                .expect("torus system")
                .compose_character(k, n),
        }
    }

    pub fn apply(&self, k: &[i64], n: i64) -> Result<(Vec<i64>, Complex64)> {
        let (k2, phase) = self.apply_phase(k, n)?;
        Ok((k2, e(phase)))
    }
}

fn format_coeff(x: f64) -> String {
    // shortest representation that round-trips
    let s = format!("{x:?}");
    s.strip_suffix(".0").map(str::to_string).unwrap_or(s)
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            let zeros = vec!["0"; self.dim].join(",");
            return write!(f, "0,0:{zeros}");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let k: Vec<String> = t.freq.iter().map(i64::to_string).collect();
                format!(
                    "{},{}:{}",
                    format_coeff(t.coeff.re),
                    format_coeff(t.coeff.im),
                    k.join(",")
                )
            })
            .collect();
        f.write_str(&parts.join(";"))
    }
}

impl std::str::FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut dim = None;
        let mut terms = Vec::new();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (coeff, freq) = part
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("term {part:?}: expected re,im:k1,...")))?;
            let (re, im) = coeff
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("coefficient {coeff:?}: expected re,im")))?;
            let num = |v: &str| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("coefficient {v:?}: {e}")))
            };
            let k = freq
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<i64>()
                        .map_err(|e| Error::Parse(format!("frequency {v:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            match dim {
                None => dim = Some(k.len()),
                Some(d) if d != k.len() => {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        got: k.len(),
                    })
                }
                _ => {}
            }
            terms.push((k, Complex64::new(num(re)?, num(im)?)));
        }
        let dim = dim.ok_or_else(|| Error::Parse("empty observable literal".into()))?;
        Self::new(dim, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::golden;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_examples() {
        let p = Point::torus(vec![0.25]).unwrap();
        assert_eq!(Observable::one(1).eval(&p).unwrap(), c(1.0, 0.0));
        let v = Observable::character(vec![1]).eval(&p).unwrap();
        assert!((v - c(0.0, 1.0)).norm() < 1e-15);
        let f: Observable = "1,0:1;1,0:-1".parse().unwrap();
        let v = f.eval(&Point::torus(vec![1.0 / 3.0]).unwrap()).unwrap();
        assert!((v - c(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn integral_examples() {
        let f: Observable = "3,0:0;1,0:2".parse().unwrap();
        assert_eq!(f.integral_haar(), c(3.0, 0.0));
        assert_eq!(Observable::character(vec![5]).integral_haar(), c(0.0, 0.0));
        let g: Observable = "1,0:1;1,0:-1".parse().unwrap();
        assert_eq!(g.multiply(&g).unwrap().integral_haar(), c(2.0, 0.0));
    }

    #[test]
    fn algebra_examples() {
        let f: Observable = "0.5,-2:3;1,0:-1".parse().unwrap();
        assert_eq!(f.multiply(&Observable::one(1)).unwrap(), f);
        assert_eq!(
            Observable::character(vec![4]).conjugate(),
            Observable::character(vec![-4])
        );
        let prod = Observable::character(vec![1])
            .multiply(&Observable::character(vec![-1]))
            .unwrap();
        assert_eq!(prod, Observable::one(1));
    }

    #[test]
    fn composition_examples() {
        let alpha = golden();
        let rot = DynamicalSystem::golden_rotation();
        let g = Observable::character(vec![3])
            .compose_with_power(&rot, 5)
            .unwrap();
        assert_eq!(g.terms()[0].freq, vec![3]);
        assert!((g.terms()[0].coeff - e(15.0 * alpha)).norm() < 1e-13);

        let skew = DynamicalSystem::skew_product(alpha);
        let g = Observable::character(vec![2, 5])
            .compose_with_power(&skew, 1)
            .unwrap();
        assert_eq!(g.terms()[0].freq, vec![7, 5]);
        assert!((g.terms()[0].coeff - e(2.0 * alpha)).norm() < 1e-14);

        let cat = DynamicalSystem::cat_map();
        let g = Observable::character(vec![1, 0])
            .compose_with_power(&cat, 1)
            .unwrap();
        assert_eq!(g, Observable::character(vec![2, 1]));
    }

    #[test]
    fn cat_map_overflow_is_reported() {
        let cat = DynamicalSystem::cat_map();
        let err = Observable::character(vec![1, 0])
            .compose_with_power(&cat, 200)
            .unwrap_err();
        assert_eq!(err, Error::FrequencyOverflow { n: 200 });
    }

    #[test]
    fn term_cap() {
        let f = Observable::new(1, (0..10).map(|k| (vec![k], c(1.0, 0.0)))).unwrap();
        assert!(matches!(
            f.multiply_capped(&f, 50),
            Err(Error::TermCap {
                terms: 100,
                cap: 50
            })
        ));
        assert_eq!(f.multiply_capped(&f, 100).unwrap().len(), 19);
    }

    #[test]
    fn heisenberg_z_frequency_rejected() {
        let h = DynamicalSystem::default_heisenberg();
        assert!(Observable::character(vec![1, 0, 1]).check_for(&h).is_err());
        assert!(Observable::character(vec![1, 2, 0]).check_for(&h).is_ok());
    }

    #[test]
    fn literal_round_trip() {
        let f: Observable = "0.1,-0.25:1,-2;3,0:0,0".parse().unwrap();
        assert_eq!(f.to_string().parse::<Observable>().unwrap(), f);
        assert!("1,0:1;1,0:1,2".parse::<Observable>().is_err());
        assert!("".parse::<Observable>().is_err());
    }
}
