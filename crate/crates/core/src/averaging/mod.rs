//! Ergodic averages along orbits.
//!
//! Every scheme is evaluated by walking actual orbits with [`DynamicalSystem::step`]
//! and compensated summation. The [`closed_form`] submodule evaluates the same
//! quantities from the composition law of character observables and serves as
//! the independent check.

pub mod closed_form;
mod diagnostic;
mod folner;

pub use diagnostic::{convergence_diagnostic, Diagnostic};
pub use folner::{folner_average, is_tempered, tempered_ratios, CommutingPair, FolnerBox};

use crate::error::{Error, Result};
use crate::observables::Observable;
use crate::summation::ComplexSum;
use crate::systems::{DynamicalSystem, Point};
use num_complex::Complex64;
use serde::Serialize;
use std::fmt;

/// Largest number of summands a single square or cube average may take.
pub const MAX_SUMMANDS: u128 = 10_000_000_000;

/// Largest cube dimension accepted by [`cube_average`].
pub const MAX_CUBE_DIM: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Birkhoff,
    Linear,
    Square,
    Cube,
    Folner,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Birkhoff => "birkhoff",
            Scheme::Linear => "linear",
            Scheme::Square => "square",
            Scheme::Cube => "cube",
            Scheme::Folner => "folner",
        })
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "birkhoff" => Ok(Scheme::Birkhoff),
            "linear" => Ok(Scheme::Linear),
            "square" => Ok(Scheme::Square),
            "cube" => Ok(Scheme::Cube),
            "folner" => Ok(Scheme::Folner),
            other => Err(Error::Parse(format!("unknown scheme {other:?}"))),
        }
    }
}

/// Partial averages at increasing `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct AverageTrajectory {
    pub scheme: Scheme,
    checkpoints: Vec<(u64, Complex64)>,
    /// Exact orbit period when the system is a rational rotation.
    pub period: Option<u64>,
}

impl AverageTrajectory {
    pub fn new(scheme: Scheme, checkpoints: Vec<(u64, Complex64)>) -> Result<Self> {
        if checkpoints.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidArgument(
                "checkpoints must be strictly increasing in N".into(),
            ));
        }
        Ok(Self {
            scheme,
            checkpoints,
            period: None,
        })
    }

    pub fn checkpoints(&self) -> &[(u64, Complex64)] {
        &self.checkpoints
    }

    pub fn last(&self) -> Option<Complex64> {
        self.checkpoints.last().map(|c| c.1)
    }
}

/// `first, first·factor, …` up to and including `max` (which is always present).
pub fn geometric_schedule(first: u64, factor: u64, max: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut n = first.max(1);
    while n < max {
        out.push(n);
        n = n.saturating_mul(factor.max(2));
    }
    out.push(max);
    out
}

/// `step, 2·step, …, max`.
pub fn linear_schedule(step: u64, max: u64) -> Vec<u64> {
    let step = step.max(1);
    let mut out: Vec<u64> = (1..).map(|i| i * step).take_while(|n| *n < max).collect();
    out.push(max);
    out
}

fn validate_checkpoints(checkpoints: &[u64]) -> Result<u64> {
    if checkpoints.is_empty() || checkpoints[0] == 0 {
        return Err(Error::InvalidArgument(
            "checkpoints must be nonempty and ≥ 1".into(),
        ));
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "checkpoints must be strictly increasing".into(),
        ));
    }
    Ok(*checkpoints.last().unwrap())
}

fn check_all(system: &DynamicalSystem, fs: &[Observable], x: &Point) -> Result<()> {
    system.check_point(x)?;
    fs.iter().try_for_each(|f| f.check_for(system))
}

fn rational_period(system: &DynamicalSystem) -> Option<u64> {
    system.rotation_period(1_000_000)
}

/// `(1/N) Σ_{n<N} f(T^n x)`, one step per `n`.
pub fn birkhoff_average(
    system: &DynamicalSystem,
    f: &Observable,
    x: &Point,
    n: u64,
) -> Result<Complex64> {
    Ok(birkhoff_trajectory(system, f, x, &[n])?.checkpoints[0].1)
}

pub fn birkhoff_trajectory(
    system: &DynamicalSystem,
    f: &Observable,
    x: &Point,
    checkpoints: &[u64],
) -> Result<AverageTrajectory> {
    let max = validate_checkpoints(checkpoints)?;
    check_all(system, std::slice::from_ref(f), x)?;
    let mut z = x.coords().to_vec();
    let mut acc = ComplexSum::new();
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().peekable();
    for n in 1..=max {
        acc.add(f.eval_coords(&z));
        system.advance(&mut z);
        if next.peek() == Some(&&n) {
            out.push((n, acc.value() / n as f64));
            next.next();
        }
    }
    let mut traj = AverageTrajectory::new(Scheme::Birkhoff, out)?;
    traj.period = rational_period(system);
    Ok(traj)
}

/// `(1/N) Σ_{n<N} Π_j f_j(T^{jn} x)`.
pub fn multilinear_average_linear(
    system: &DynamicalSystem,
    fs: &[Observable],
    x: &Point,
    n: u64,
) -> Result<Complex64> {
    Ok(linear_trajectory(system, fs, x, &[n])?.checkpoints[0].1)
}

/// Streams `d` orbit cursors; cursor `j` sits at `T^{jn} x` and advances `j`
/// steps per `n`.
pub fn linear_trajectory(
    system: &DynamicalSystem,
    fs: &[Observable],
    x: &Point,
    checkpoints: &[u64],
) -> Result<AverageTrajectory> {
    if fs.is_empty() {
        return Err(Error::InvalidArgument(
            "need at least one observable".into(),
        ));
    }
    let max = validate_checkpoints(checkpoints)?;
    check_all(system, fs, x)?;
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().peekable();
    let mut acc = ComplexSum::new();
    let mut cursors = LinearCursors::new(system, x.coords(), fs.len());
    for n in 1..=max {
        acc.add(cursors.product(fs));
        cursors.advance(system);
        if next.peek() == Some(&&n) {
            out.push((n, acc.value() / n as f64));
            next.next();
        }
    }
    let mut traj = AverageTrajectory::new(Scheme::Linear, out)?;
    traj.period = rational_period(system);
    Ok(traj)
}

/// Cursors `(T^{n}x, T^{2n}x, …, T^{dn}x)` shared with the joinings module.
pub(crate) struct LinearCursors {
    points: Vec<Vec<f64>>,
}

impl LinearCursors {
    pub(crate) fn new(_system: &DynamicalSystem, start: &[f64], d: usize) -> Self {
        Self {
            points: vec![start.to_vec(); d],
        }
    }

    pub(crate) fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    #[inline]
    pub(crate) fn product(&self, fs: &[Observable]) -> Complex64 {
        let mut prod = fs[0].eval_coords(&self.points[0]);
        for (f, p) in fs.iter().zip(&self.points).skip(1) {
            prod *= f.eval_coords(p);
        }
        prod
    }

    #[inline]
    pub(crate) fn advance(&mut self, system: &DynamicalSystem) {
        for (j, p) in self.points.iter_mut().enumerate() {
            for _ in 0..=j {
                system.advance(p);
            }
        }
    }
}

/// Orbit segment `x, Tx, …, T^{len-1}x`, each point obtained by one step.
fn orbit_segment(system: &DynamicalSystem, x: &Point, len: usize) -> Vec<Vec<f64>> {
    let mut z = x.coords().to_vec();
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(z.clone());
        system.advance(&mut z);
    }
    out
}

fn summand_guard(n: u64, dims: u32) -> Result<()> {
    let count = (n as u128).checked_pow(dims).unwrap_or(u128::MAX);
    if count > MAX_SUMMANDS {
        return Err(Error::CostGuard(format!(
            "{count} summands exceeds the cap {MAX_SUMMANDS}"
        )));
    }
    Ok(())
}

/// `(1/N²) Σ_{n,m<N} Π_j f_j(T^{n+(j-1)m} x)`.
pub fn multilinear_average_square(
    system: &DynamicalSystem,
    fs: &[Observable],
    x: &Point,
    n: u64,
) -> Result<Complex64> {
    if fs.is_empty() {
        return Err(Error::InvalidArgument(
            "need at least one observable".into(),
        ));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("N must be ≥ 1".into()));
    }
    check_all(system, fs, x)?;
    summand_guard(n, 2)?;
    let d = fs.len();
    let n_us = n as usize;
    let orbit = orbit_segment(system, x, d * (n_us - 1) + 1);
    // values[j][s] = f_j(T^s x)
    let values: Vec<Vec<Complex64>> = fs
        .iter()
        .map(|f| orbit.iter().map(|z| f.eval_coords(z)).collect())
        .collect();
    let mut acc = ComplexSum::new();
    for m in 0..n_us {
        for i in 0..n_us {
            let mut prod = values[0][i];
            for (j, vals) in values.iter().enumerate().skip(1) {
                prod *= vals[i + j * m];
            }
            acc.add(prod);
        }
    }
    Ok(acc.value() / (n as f64 * n as f64))
}

/// Observables `f_ε` for `ε ∈ {0,1}^k \ {0}`; index `i` holds `ε` with bits of `i + 1`
/// (bit `l` is `ε_{l+1}`).
#[derive(Clone, Debug, PartialEq)]
pub struct CubeObservables {
    k: usize,
    fs: Vec<Observable>,
}

impl CubeObservables {
    pub fn new(k: usize, fs: Vec<Observable>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("cube dimension must be ≥ 1".into()));
        }
        if k > MAX_CUBE_DIM {
            return Err(Error::CostGuard(format!(
                "cube dimension {k} exceeds {MAX_CUBE_DIM}"
            )));
        }
        if fs.len() != (1 << k) - 1 {
            return Err(Error::ArityMismatch {
                expected: (1 << k) - 1,
                got: fs.len(),
            });
        }
        Ok(Self { k, fs })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `(ε, f_ε)` pairs, `ε` as a bit mask.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &Observable)> {
        self.fs.iter().enumerate().map(|(i, f)| (i + 1, f))
    }

    pub fn observables(&self) -> &[Observable] {
        &self.fs
    }
}

/// `(1/N^k) Σ_{n ∈ [0,N)^k} Π_ε f_ε(T^{n·ε} x)`.
pub fn cube_average(
    system: &DynamicalSystem,
    fs: &CubeObservables,
    x: &Point,
    n: u64,
) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be ≥ 1".into()));
    }
    check_all(system, &fs.fs, x)?;
    let k = fs.k;
    summand_guard(n, k as u32)?;
    let n_us = n as usize;
    let orbit = orbit_segment(system, x, k * (n_us - 1) + 1);
    let values: Vec<Vec<Complex64>> = fs
        .fs
        .iter()
        .map(|f| orbit.iter().map(|z| f.eval_coords(z)).collect())
        .collect();
    let masks: Vec<usize> = (1..(1usize << k)).collect();
    let mut idx = vec![0usize; k];
    let mut acc = ComplexSum::new();
    loop {
        let mut prod = Complex64::new(1.0, 0.0);
        for (vals, mask) in values.iter().zip(&masks) {
            let s: usize = (0..k).filter(|l| mask >> l & 1 == 1).map(|l| idx[l]).sum();
            prod *= vals[s];
        }
        acc.add(prod);
        // odometer over [0,N)^k
        let mut l = 0;
        loop {
            if l == k {
                return Ok(acc.value() / (n as f64).powi(k as i32));
            }
            idx[l] += 1;
            if idx[l] < n_us {
                break;
            }
            idx[l] = 0;
            l += 1;
        }
    }
}

/// `(Πa − Πb, Σ_i a_1…a_{i-1}(a_i − b_i)b_{i+1}…b_k)`; the two agree up to rounding.
pub fn product_difference_bound(
    a: &[Complex64],
    b: &[Complex64],
) -> Result<(Complex64, Complex64)> {
    if a.len() != b.len() {
        return Err(Error::ArityMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::InvalidArgument("need k ≥ 1 factors".into()));
    }
    let one = Complex64::new(1.0, 0.0);
    let pa = a.iter().fold(one, |p, v| p * v);
    let pb = b.iter().fold(one, |p, v| p * v);
    let mut telescoped = Complex64::new(0.0, 0.0);
    for i in 0..a.len() {
        let prefix = a[..i].iter().fold(one, |p, v| p * v);
        let suffix = b[i + 1..].iter().fold(one, |p, v| p * v);
        telescoped += prefix * (a[i] - b[i]) * suffix;
    }
    Ok((pa - pb, telescoped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::{e, geometric_mean};
    use crate::systems::golden;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // Hand-rolled geometric sum, independent of the crate's closed forms.
    fn geo(theta: f64, n: u64) -> Complex64 {
        let mut s = c(0.0, 0.0);
        for k in 0..n {
            s += Complex64::from_polar(1.0, std::f64::consts::TAU * (k as f64 * theta));
        }
        s / n as f64
    }

    #[test]
    fn birkhoff_of_constant_and_character() {
        let rot = DynamicalSystem::golden_rotation();
        let x = rot.origin();
        let k = Observable::constant(1, c(2.5, -1.0));
        for n in [1, 7, 100] {
            assert!((birkhoff_average(&rot, &k, &x, n).unwrap() - c(2.5, -1.0)).norm() < 1e-14);
        }
        let f = Observable::character(vec![1]);
        let v = birkhoff_average(&rot, &f, &x, 1000).unwrap();
        assert!((v - geo(golden(), 1000)).norm() < 1e-12);
        assert!((v - geometric_mean(golden(), 1000)).norm() < 1e-12);
    }

    #[test]
    fn linear_examples() {
        let rot = DynamicalSystem::golden_rotation();
        let x = Point::torus(vec![0.3]).unwrap();
        // Σ j·k_j = 0: every term is e(x)
        let fs = [
            Observable::character(vec![2]),
            Observable::character(vec![-1]),
        ];
        for n in [1, 10, 1000] {
            let v = multilinear_average_linear(&rot, &fs, &x, n).unwrap();
            assert!((v - e(0.3)).norm() < 1e-12);
        }
        let fs = [
            Observable::character(vec![1]),
            Observable::character(vec![-1]),
        ];
        let v = multilinear_average_linear(&rot, &fs, &x, 500).unwrap();
        assert!((v - geo(-golden(), 500)).norm() < 1e-12);
    }

    #[test]
    fn linear_with_one_observable_is_birkhoff_bit_for_bit() {
        let skew = DynamicalSystem::skew_product(golden());
        let x = Point::torus(vec![0.12, 0.77]).unwrap();
        let f: Observable = "0.5,0.5:1,2;1,0:0,-1".parse().unwrap();
        let a = birkhoff_average(&skew, &f, &x, 5000).unwrap();
        let b = multilinear_average_linear(&skew, std::slice::from_ref(&f), &x, 5000).unwrap();
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }

    #[test]
    fn square_examples() {
        let rot = DynamicalSystem::golden_rotation();
        let x = Point::torus(vec![0.4]).unwrap();
        let fs = [
            Observable::character(vec![1]),
            Observable::character(vec![-2]),
            Observable::character(vec![1]),
        ];
        for n in [1, 5, 40] {
            let v = multilinear_average_square(&rot, &fs, &x, n).unwrap();
            assert!((v - c(1.0, 0.0)).norm() < 1e-12);
        }
        let fs = [
            Observable::character(vec![1]),
            Observable::character(vec![-1]),
        ];
        let v = multilinear_average_square(&rot, &fs, &x, 60).unwrap();
        assert!((v - geo(-golden(), 60)).norm() < 1e-12);
        let ones = vec![Observable::one(1); 4];
        assert!(
            (multilinear_average_square(&rot, &ones, &x, 9).unwrap() - c(1.0, 0.0)).norm() < 1e-14
        );
    }

    #[test]
    fn cube_examples() {
        let rot = DynamicalSystem::golden_rotation();
        let x = Point::torus(vec![0.15]).unwrap();
        let f = Observable::character(vec![1]);
        let cube1 = CubeObservables::new(1, vec![f.clone()]).unwrap();
        let a = cube_average(&rot, &cube1, &x, 300).unwrap();
        let b = birkhoff_average(&rot, &f, &x, 300).unwrap();
        assert!((a - b).norm() < 1e-13);
        // f_(1,0) = e(x), f_(0,1) = e(x), f_(1,1) = e(-x): total e(x)
        let cube2 = CubeObservables::new(
            2,
            vec![
                Observable::character(vec![1]),
                Observable::character(vec![1]),
                Observable::character(vec![-1]),
            ],
        )
        .unwrap();
        let v = cube_average(&rot, &cube2, &x, 50).unwrap();
        assert!((v - e(0.15)).norm() < 1e-12);
        let ones = CubeObservables::new(3, vec![Observable::one(1); 7]).unwrap();
        assert!((cube_average(&rot, &ones, &x, 6).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn cube_dimension_guard() {
        let err = CubeObservables::new(5, vec![Observable::one(1); 31]).unwrap_err();
        assert!(err.is_resource());
    }

    #[test]
    fn product_difference_examples() {
        let a = [c(2.0, 0.0), c(3.0, 0.0)];
        let b = [c(1.0, 0.0), c(1.0, 0.0)];
        assert_eq!(
            product_difference_bound(&a, &b).unwrap(),
            (c(5.0, 0.0), c(5.0, 0.0))
        );
        assert_eq!(
            product_difference_bound(&a, &a).unwrap(),
            (c(0.0, 0.0), c(0.0, 0.0))
        );
        let (d, t) = product_difference_bound(&[c(0.5, 1.0)], &[c(-1.0, 2.0)]).unwrap();
        assert_eq!(d, c(1.5, -1.0));
        assert_eq!(t, c(1.5, -1.0));
        assert!(product_difference_bound(&a, &b[..1]).is_err());
    }

    #[test]
    fn schedules() {
        assert_eq!(
            geometric_schedule(1000, 10, 100_000),
            vec![1000, 10_000, 100_000]
        );
        assert_eq!(linear_schedule(3, 10), vec![3, 6, 9, 10]);
    }

    #[test]
    fn checkpoints_must_increase() {
        let rot = DynamicalSystem::golden_rotation();
        let f = Observable::one(1);
        assert!(birkhoff_trajectory(&rot, &f, &rot.origin(), &[10, 10]).is_err());
        assert!(birkhoff_trajectory(&rot, &f, &rot.origin(), &[0]).is_err());
    }

    #[test]
    fn rational_rotation_reports_period() {
        let rot = DynamicalSystem::rotation(vec![0.2]).unwrap();
        let t = birkhoff_trajectory(
            &rot,
            &Observable::character(vec![1]),
            &rot.origin(),
            &[5, 10, 20],
        )
        .unwrap();
        assert_eq!(t.period, Some(5));
        for (_, v) in t.checkpoints() {
            assert!(v.norm() < 1e-14);
        }
    }
}
