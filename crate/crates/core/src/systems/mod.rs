//! Concrete invertible measure-preserving systems.
//!
//! Four kinds are supported: torus rotations, toral automorphisms, cocycle
//! extensions `T'(y, g) = (Sy, g + ρ(y))` with `ρ` affine and integer-linear,
//! and translations on the Heisenberg nilmanifold. The first three are
//! affine maps of a torus and share [`affine::AffineMap`].

pub mod affine;
mod certificate;
pub mod heisenberg;
pub mod text;

pub use certificate::{ergodicity_certificate, ErgodicityCertificate, Verdict};
pub use heisenberg::{reduce_mod_lattice, HeisenbergPoint};
pub use text::SystemSpec;

use crate::error::{Error, Result};
use crate::intmat::IntMatrix;
use crate::phase::frac;
use crate::rng::RngState;
use affine::AffineMap;

/// Golden rotation number `(√5 − 1)/2`.
pub fn golden() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

/// Default Heisenberg translation `(√2 − 1, √3 − 1)`.
pub fn default_heisenberg_params() -> (f64, f64) {
    (2f64.sqrt() - 1.0, 3f64.sqrt() - 1.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TorusPoint {
    coords: Vec<f64>,
}

impl TorusPoint {
    /// Coordinates are reduced mod 1.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument(
                "torus point needs at least one coordinate".into(),
            ));
        }
        if let Some(bad) = coords.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(*bad));
        }
        Ok(Self {
            coords: coords.into_iter().map(frac).collect(),
        })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// A point of a system's state space.
#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    Torus(TorusPoint),
    Heisenberg(HeisenbergPoint),
}

impl Point {
    pub fn torus(coords: Vec<f64>) -> Result<Self> {
        TorusPoint::new(coords).map(Point::Torus)
    }

    pub fn heisenberg(x: f64, y: f64, z: f64) -> Result<Self> {
        HeisenbergPoint::new(x, y, z).map(Point::Heisenberg)
    }

    pub fn coords(&self) -> &[f64] {
        match self {
            Point::Torus(t) => t.coords(),
            Point::Heisenberg(h) => h.coords(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords().len()
    }

    pub(crate) fn coords_mut(&mut self) -> &mut [f64] {
        match self {
            Point::Torus(t) => &mut t.coords,
            Point::Heisenberg(h) => &mut h.0,
        }
    }
}

/// Integer-affine cocycle `ρ(y) = L·y + c` into a fiber torus.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineCocycle {
    /// `fiber_dim × base_dim` integer matrix.
    pub linear: IntMatrix,
    pub offset: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SystemKind {
    Rotation {
        alpha: Vec<f64>,
    },
    CocycleExtension {
        base: Box<DynamicalSystem>,
        cocycle: AffineCocycle,
    },
    ToralAutomorphism {
        matrix: IntMatrix,
    },
    HeisenbergTranslation {
        alpha: f64,
        beta: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvariantMeasure {
    HaarTorus,
    HaarFundamentalDomain,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicalSystem {
    kind: SystemKind,
    affine: Option<AffineMap>,
}

impl DynamicalSystem {
    pub fn rotation(alpha: Vec<f64>) -> Result<Self> {
        let dim = alpha.len();
        let affine = AffineMap::new(IntMatrix::identity(dim), alpha.clone())?;
        Ok(Self {
            kind: SystemKind::Rotation { alpha },
            affine: Some(affine),
        })
    }

    /// Circle rotation by the golden mean.
    pub fn golden_rotation() -> Self {
        Self::rotation(vec![golden()]).expect("valid rotation")
    }

    pub fn automorphism(matrix: IntMatrix) -> Result<Self> {
        let dim = matrix.rows();
        let affine = AffineMap::new(matrix.clone(), vec![0.0; dim])?;
        Ok(Self {
            kind: SystemKind::ToralAutomorphism { matrix },
            affine: Some(affine),
        })
    }

    /// Arnold's cat map `[[2,1],[1,1]]`.
    pub fn cat_map() -> Self {
        Self::automorphism(IntMatrix::from_rows(&[vec![2, 1], vec![1, 1]]).expect("2x2"))
            .expect("unimodular")
    }

    /// `T'(y, g) = (Sy, g + L·y + c)` over a torus system `S`.
    pub fn cocycle_extension(base: DynamicalSystem, cocycle: AffineCocycle) -> Result<Self> {
        let base_affine = base
            .affine
            .as_ref()
            .ok_or_else(|| Error::InvalidSystem("cocycle extensions need a torus base".into()))?;
        let p = base_affine.dim();
        let q = cocycle.offset.len();
        if q == 0 || cocycle.linear.rows() != q || cocycle.linear.cols() != p {
            return Err(Error::InvalidSystem(format!(
                "cocycle matrix must be {q}x{p}, got {}x{}",
                cocycle.linear.rows(),
                cocycle.linear.cols()
            )));
        }
        let dim = p + q;
        let mut matrix = IntMatrix::zeros(dim, dim);
        for i in 0..p {
            for j in 0..p {
                matrix.set(i, j, base_affine.matrix().get(i, j));
            }
        }
        for i in 0..q {
            for j in 0..p {
                matrix.set(p + i, j, cocycle.linear.get(i, j));
            }
            matrix.set(p + i, p + i, 1);
        }
        let mut translation = base_affine.translation().to_vec();
        translation.extend_from_slice(&cocycle.offset);
        let affine = AffineMap::new(matrix, translation)?;
        Ok(Self {
            kind: SystemKind::CocycleExtension {
                base: Box::new(base),
                cocycle,
            },
            affine: Some(affine),
        })
    }

    /// The skew product `(x, y) ↦ (x + α, y + x)`.
    pub fn skew_product(alpha: f64) -> Self {
        let cocycle = AffineCocycle {
            linear: IntMatrix::from_rows(&[vec![1]]).expect("1x1"),
            offset: vec![0.0],
        };
        Self::cocycle_extension(Self::rotation(vec![alpha]).expect("rotation"), cocycle)
            .expect("valid skew product")
    }

    pub fn heisenberg(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::NonFinite(alpha));
        }
        if !beta.is_finite() {
            return Err(Error::NonFinite(beta));
        }
        Ok(Self {
            kind: SystemKind::HeisenbergTranslation { alpha, beta },
            affine: None,
        })
    }

    pub fn default_heisenberg() -> Self {
        let (a, b) = default_heisenberg_params();
        Self::heisenberg(a, b).expect("finite parameters")
    }

    pub fn kind(&self) -> &SystemKind {
        &self.kind
    }

    /// Torus systems expose their affine normal form.
    pub fn affine(&self) -> Option<&AffineMap> {
        self.affine.as_ref()
    }

    pub fn is_heisenberg(&self) -> bool {
        matches!(self.kind, SystemKind::HeisenbergTranslation { .. })
    }

    /// Number of coordinates of a state-space point.
    pub fn dimension(&self) -> usize {
        match &self.affine {
            Some(a) => a.dim(),
            None => 3,
        }
    }

    pub fn invariant_measure(&self) -> InvariantMeasure {
        if self.is_heisenberg() {
            InvariantMeasure::HaarFundamentalDomain
        } else {
            InvariantMeasure::HaarTorus
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            SystemKind::Rotation { .. } => "rotation",
            SystemKind::CocycleExtension { .. } => "cocycle",
            SystemKind::ToralAutomorphism { .. } => "automorphism",
            SystemKind::HeisenbergTranslation { .. } => "heisenberg",
        }
    }

    pub fn origin(&self) -> Point {
        if self.is_heisenberg() {
            Point::Heisenberg(HeisenbergPoint::identity())
        } else {
            Point::Torus(TorusPoint {
                coords: vec![0.0; self.dimension()],
            })
        }
    }

    /// Builds a state-space point from raw coordinates (reduced).
    pub fn point(&self, coords: &[f64]) -> Result<Point> {
        self.check_dim(coords.len())?;
        if self.is_heisenberg() {
            Point::heisenberg(coords[0], coords[1], coords[2])
        } else {
            Point::torus(coords.to_vec())
        }
    }

    pub(crate) fn check_point(&self, p: &Point) -> Result<()> {
        let ok = matches!(
            (p, self.is_heisenberg()),
            (Point::Heisenberg(_), true) | (Point::Torus(_), false)
        );
        if !ok {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got: p.dim(),
            });
        }
        self.check_dim(p.dim())
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got,
            });
        }
        Ok(())
    }

    /// One step of the map on raw coordinates, in place. No validation.
    #[inline]
    pub(crate) fn advance(&self, z: &mut [f64]) {
        match (&self.affine, &self.kind) {
            (Some(a), _) => a.advance(z),
            (None, SystemKind::HeisenbergTranslation { alpha, beta }) => {
                heisenberg::translate(*alpha, *beta, z)
            }
            _ => unreachable!("torus systems carry an affine form"),
        }
    }

    /// Closed-form `T^n` on raw coordinates, in place.
    pub(crate) fn advance_by(&self, z: &mut [f64], n: i64) -> Result<()> {
        match (&self.affine, &self.kind) {
            (Some(a), _) => a.apply_power(z, n),
            (None, SystemKind::HeisenbergTranslation { alpha, beta }) => {
                heisenberg::translate_pow(*alpha, *beta, z, n)
            }
            _ => unreachable!("torus systems carry an affine form"),
        }
    }

    /// `T(p)`.
    pub fn step(&self, p: &Point) -> Result<Point> {
        self.check_point(p)?;
        let mut q = p.clone();
        self.advance(q.coords_mut());
        Ok(q)
    }

    /// `T^n(p)` for any signed `n`, via closed forms.
    pub fn step_pow(&self, p: &Point, n: i64) -> Result<Point> {
        self.check_point(p)?;
        let mut q = p.clone();
        self.advance_by(q.coords_mut(), n)?;
        Ok(q)
    }

    /// Uniform sample from the invariant (Haar) measure on the fundamental domain.
    pub fn haar_sample(&self, rng: &mut RngState) -> Point {
        let coords: Vec<f64> = (0..self.dimension()).map(|_| rng.next_unit()).collect();
        if self.is_heisenberg() {
            Point::Heisenberg(HeisenbergPoint::from_reduced([
                coords[0], coords[1], coords[2],
            ]))
        } else {
            Point::Torus(TorusPoint { coords })
        }
    }

    /// Smallest `q ≤ bound` with `T^q = id`, for pure rotations.
    pub fn rotation_period(&self, bound: u64) -> Option<u64> {
        let SystemKind::Rotation { alpha } = &self.kind else {
            return None;
        };
        (1..=bound).find(|&q| {
            alpha.iter().all(|a| {
                crate::phase::circle_distance(crate::phase::frac_mul(q as i64, *a), 0.0) < 1e-12
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::circle_distance;

    fn near(a: &Point, b: &[f64], tol: f64) -> bool {
        a.coords()
            .iter()
            .zip(b)
            .all(|(u, v)| circle_distance(*u, *v) < tol)
    }

    #[test]
    fn rotation_steps() {
        let r = DynamicalSystem::rotation(vec![0.25]).unwrap();
        let p = Point::torus(vec![0.5]).unwrap();
        assert_eq!(r.step(&p).unwrap().coords(), &[0.75]);
        let r = DynamicalSystem::rotation(vec![0.75]).unwrap();
        assert_eq!(r.step(&p).unwrap().coords(), &[0.25]);
        let r = DynamicalSystem::rotation(vec![0.1]).unwrap();
        let o = Point::torus(vec![0.0]).unwrap();
        assert!(near(&r.step_pow(&o, 7).unwrap(), &[0.7], 1e-15));
    }

    #[test]
    fn heisenberg_step_from_identity() {
        let (a, b) = default_heisenberg_params();
        let h = DynamicalSystem::default_heisenberg();
        let q = h.step(&h.origin()).unwrap();
        assert!(near(&q, &[a, b, 0.0], 1e-15));
        // t^3 = (3α, 3β, 3αβ)
        let q3 = h.step_pow(&h.origin(), 3).unwrap();
        let expect = reduce_mod_lattice([3.0 * a, 3.0 * b, 3.0 * a * b]).unwrap();
        assert!(near(&q3, expect.coords(), 1e-12));
    }

    #[test]
    fn zero_power_is_identity() {
        let mut rng = RngState::from_seed(3);
        for s in [
            DynamicalSystem::golden_rotation(),
            DynamicalSystem::cat_map(),
            DynamicalSystem::skew_product(golden()),
            DynamicalSystem::default_heisenberg(),
        ] {
            let p = s.haar_sample(&mut rng);
            assert_eq!(s.step_pow(&p, 0).unwrap(), p);
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let r = DynamicalSystem::golden_rotation();
        let p = Point::torus(vec![0.1, 0.2]).unwrap();
        assert!(matches!(r.step(&p), Err(Error::DimensionMismatch { .. })));
        let h = DynamicalSystem::default_heisenberg();
        let q = Point::torus(vec![0.1, 0.2, 0.3]).unwrap();
        assert!(h.step(&q).is_err());
    }

    #[test]
    fn non_unimodular_rejected() {
        let m = IntMatrix::from_rows(&[vec![2, 0], vec![0, 1]]).unwrap();
        assert!(DynamicalSystem::automorphism(m).is_err());
    }

    #[test]
    fn haar_sample_is_reproducible() {
        let s = DynamicalSystem::default_heisenberg();
        let a = s.haar_sample(&mut RngState::from_seed(99));
        let b = s.haar_sample(&mut RngState::from_seed(99));
        assert_eq!(a, b);
    }

    #[test]
    fn rational_rotation_period() {
        let r = DynamicalSystem::rotation(vec![0.5, 0.25]).unwrap();
        assert_eq!(r.rotation_period(100), Some(4));
        assert_eq!(
            DynamicalSystem::golden_rotation().rotation_period(1000),
            None
        );
    }
}
