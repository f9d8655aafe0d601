//! Empirical Furstenberg self-joinings and their fiber measures.
//!
//! A measure is a cloud of `d`-tuples `(T^n x, T^{2n} x, …, T^{dn} x)`
//! grouped in blocks, one block of `N` consecutive `n` per start `x`.
//! Integration is a mean of block means, so the self-joining integral is
//! literally the average of its fiber integrals and a single fiber
//! reproduces [`multilinear_average_linear`](crate::averaging::multilinear_average_linear)
//! bit for bit.

use crate::averaging::LinearCursors;
use crate::error::{Error, Result};
use crate::observables::Observable;
use crate::phase::{circle_distance, e, frac_mul};
use crate::rng::RngState;
use crate::summation::ComplexSum;
use crate::systems::{DynamicalSystem, Point};
use num_complex::Complex64;
use rayon::prelude::*;
use std::io::{Read, Write};

/// Largest tuple cloud that is materialized.
pub const MAX_TUPLES: u64 = 10_000_000;
const DUMP_MAGIC: &[u8; 8] = b"EMPJOIN1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JoiningScheme {
    /// Cesàro pushforwards of the diagonal measure under `σ_d`.
    DiagonalPushforward,
    /// The `σ_d` orbit of a single diagonal point.
    FiberOrbit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub scheme: JoiningScheme,
    pub system: String,
    pub d: usize,
    pub n: u64,
    pub seed: Option<u64>,
}

/// Uniformly weighted tuple cloud on `X^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalMeasure {
    dim: usize,
    heisenberg: bool,
    d: usize,
    block_len: usize,
    /// Flat `count × d × dim` coordinates.
    coords: Vec<f64>,
    provenance: Provenance,
}

impl EmpiricalMeasure {
    pub fn arity(&self) -> usize {
        self.d
    }

    /// Coordinates per factor.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / (self.d * self.dim)
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn block_count(&self) -> usize {
        self.len() / self.block_len
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Coordinates of factor `j` (0-based) of tuple `i`.
    pub fn factor(&self, i: usize, j: usize) -> &[f64] {
        let start = (i * self.d + j) * self.dim;
        &self.coords[start..start + self.dim]
    }

    /// Tuple `i` as points.
    pub fn tuple(&self, i: usize) -> Result<Vec<Point>> {
        (0..self.d)
            .map(|j| {
                let c = self.factor(i, j);
                if self.heisenberg {
                    Point::heisenberg(c[0], c[1], c[2])
                } else {
                    Point::torus(c.to_vec())
                }
            })
            .collect()
    }

    fn block(&self, b: usize) -> &[f64] {
        let width = self.block_len * self.d * self.dim;
        &self.coords[b * width..(b + 1) * width]
    }

    /// Writes the cloud as `EMPJOIN1`, then little-endian `u64` fields
    /// `d, N, count, seed, dim, flags`, then `count·d·dim` little-endian `f64`.
    ///
    /// `flags` bit 0 marks Heisenberg points, bit 1 a fiber measure, bit 2 a
    /// present seed.
    pub fn write_binary(&self, mut w: impl Write) -> std::io::Result<()> {
        let flags = u64::from(self.heisenberg)
            | u64::from(self.provenance.scheme == JoiningScheme::FiberOrbit) << 1
            | u64::from(self.provenance.seed.is_some()) << 2;
        w.write_all(DUMP_MAGIC)?;
        for v in [
            self.d as u64,
            self.block_len as u64,
            self.len() as u64,
            self.provenance.seed.unwrap_or(0),
            self.dim as u64,
            flags,
        ] {
            w.write_all(&v.to_le_bytes())?;
        }
        for c in &self.coords {
            w.write_all(&c.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads a dump; the system name in the provenance is not stored and
    /// comes back empty.
    pub fn read_binary(mut r: impl Read) -> Result<Self> {
        let io = |e: std::io::Error| Error::Parse(format!("joining dump: {e}"));
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(io)?;
        if &magic != DUMP_MAGIC {
            return Err(Error::Parse("joining dump: bad magic".into()));
        }
        let mut header = [0u64; 6];
        for h in header.iter_mut() {
            let mut b = [0u8; 8];
            r.read_exact(&mut b).map_err(io)?;
            *h = u64::from_le_bytes(b);
        }
        let [d, block_len, count, seed, dim, flags] = header;
        if d == 0 || dim == 0 || block_len == 0 || count % block_len != 0 || count > MAX_TUPLES {
            return Err(Error::Parse("joining dump: inconsistent header".into()));
        }
        let total = (count * d * dim) as usize;
        let mut coords = Vec::with_capacity(total);
        let mut b = [0u8; 8];
        for _ in 0..total {
            r.read_exact(&mut b).map_err(io)?;
            coords.push(f64::from_le_bytes(b));
        }
        Ok(Self {
            dim: dim as usize,
            heisenberg: flags & 1 == 1,
            d: d as usize,
            block_len: block_len as usize,
            coords,
            provenance: Provenance {
                scheme: if flags & 2 == 2 {
                    JoiningScheme::FiberOrbit
                } else {
                    JoiningScheme::DiagonalPushforward
                },
                system: String::new(),
                d: d as usize,
                n: block_len,
                seed: (flags & 4 == 4).then_some(seed),
            },
        })
    }
}

fn check_sizes(d: usize, starts: usize, n: u64) -> Result<()> {
    if d == 0 || starts == 0 || n == 0 {
        return Err(Error::InvalidArgument(
            "d, start count and N must be ≥ 1".into(),
        ));
    }
    Ok(())
}

fn draw_starts(system: &DynamicalSystem, count: usize, rng: &mut RngState) -> Vec<Point> {
    (0..count).map(|_| system.haar_sample(rng)).collect()
}

/// Appends the `n` tuples of the `σ_d` orbit of `(x, …, x)`.
fn emit_block(system: &DynamicalSystem, x: &[f64], d: usize, n: u64, out: &mut Vec<f64>) {
    let mut cursors = LinearCursors::new(system, x, d);
    for _ in 0..n {
        for p in cursors.points() {
            out.extend_from_slice(p);
        }
        cursors.advance(system);
    }
}

fn build(
    system: &DynamicalSystem,
    starts: &[Point],
    d: usize,
    n: u64,
    provenance: Provenance,
) -> Result<EmpiricalMeasure> {
    let count = starts.len() as u128 * n as u128;
    if count > MAX_TUPLES as u128 {
        return Err(Error::CostGuard(format!(
            "{count} tuples exceeds {MAX_TUPLES}; use the streaming integral"
        )));
    }
    let dim = system.dimension();
    let blocks: Vec<Vec<f64>> = starts
        .par_iter()
        .map(|x| {
            let mut out = Vec::with_capacity(n as usize * d * dim);
            emit_block(system, x.coords(), d, n, &mut out);
            out
        })
        .collect();
    Ok(EmpiricalMeasure {
        dim,
        heisenberg: system.is_heisenberg(),
        d,
        block_len: n as usize,
        coords: blocks.concat(),
        provenance,
    })
}

/// `(1/S) Σ_x (1/N) Σ_{n<N} δ_{(T^n x, …, T^{dn} x)}` over `S` Haar starts
/// drawn from `rng`.
pub fn empirical_self_joining(
    system: &DynamicalSystem,
    d: usize,
    start_count: usize,
    n: u64,
    rng: &mut RngState,
) -> Result<EmpiricalMeasure> {
    check_sizes(d, start_count, n)?;
    let seed = rng.seed();
    let starts = draw_starts(system, start_count, rng);
    build(
        system,
        &starts,
        d,
        n,
        Provenance {
            scheme: JoiningScheme::DiagonalPushforward,
            system: system.kind_name().into(),
            d,
            n,
            seed: Some(seed),
        },
    )
}

/// The empirical fiber measure over `x`.
pub fn fiber_measure(
    system: &DynamicalSystem,
    x: &Point,
    d: usize,
    n: u64,
) -> Result<EmpiricalMeasure> {
    check_sizes(d, 1, n)?;
    system.check_point(x)?;
    build(
        system,
        std::slice::from_ref(x),
        d,
        n,
        Provenance {
            scheme: JoiningScheme::FiberOrbit,
            system: system.kind_name().into(),
            d,
            n,
            seed: None,
        },
    )
}

fn check_tensor(dim: usize, d: usize, fs: &[Observable]) -> Result<()> {
    if fs.len() != d {
        return Err(Error::ArityMismatch {
            expected: d,
            got: fs.len(),
        });
    }
    if let Some(f) = fs.iter().find(|f| f.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: f.dim(),
        });
    }
    Ok(())
}

#[inline]
fn tuple_product(fs: &[Observable], tuple: &[f64], dim: usize) -> Complex64 {
    let mut prod = fs[0].eval_coords(&tuple[..dim]);
    for (j, f) in fs.iter().enumerate().skip(1) {
        prod *= f.eval_coords(&tuple[j * dim..(j + 1) * dim]);
    }
    prod
}

fn mean_of(values: impl IntoIterator<Item = Complex64>, count: usize) -> Complex64 {
    let mut acc = ComplexSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value() / count as f64
}

/// Integral of each block, in block order.
pub fn block_integrals(m: &EmpiricalMeasure, fs: &[Observable]) -> Result<Vec<Complex64>> {
    check_tensor(m.dim, m.d, fs)?;
    let width = m.d * m.dim;
    Ok((0..m.block_count())
        .into_par_iter()
        .map(|b| {
            let block = m.block(b);
            mean_of(
                block
                    .chunks_exact(width)
                    .map(|t| tuple_product(fs, t, m.dim)),
                m.block_len,
            )
        })
        .collect())
}

/// `∫ f_1 ⊗ … ⊗ f_d dm`.
pub fn integrate_tensor(m: &EmpiricalMeasure, fs: &[Observable]) -> Result<Complex64> {
    let blocks = block_integrals(m, fs)?;
    Ok(mean_of(blocks.iter().copied(), blocks.len()))
}

/// Same value as integrating [`empirical_self_joining`] with the same
/// seed, without storing the tuples.
pub fn self_joining_integral_streaming(
    system: &DynamicalSystem,
    fs: &[Observable],
    start_count: usize,
    n: u64,
    rng: &mut RngState,
) -> Result<Complex64> {
    let d = fs.len();
    check_sizes(d, start_count, n)?;
    check_tensor(system.dimension(), d, fs)?;
    let starts = draw_starts(system, start_count, rng);
    let blocks: Vec<Complex64> = starts
        .par_iter()
        .map(|x| {
            let mut cursors = LinearCursors::new(system, x.coords(), d);
            let mut acc = ComplexSum::new();
            for _ in 0..n {
                acc.add(cursors.product(fs));
                cursors.advance(system);
            }
            acc.value() / n as f64
        })
        .collect();
    Ok(mean_of(blocks.iter().copied(), blocks.len()))
}

/// Integrals of `e(k_1 x_1 + … + k_d x_d)` for every `k ∈ [-r, r]^d` on a
/// one-dimensional torus, in lexicographic order of `k`.
///
/// Characters are built from powers of `e(x_j)`, so one pass serves the
/// whole box.
pub fn character_box_profile(
    m: &EmpiricalMeasure,
    radius: u32,
) -> Result<Vec<(Vec<i64>, Complex64)>> {
    if m.dim != 1 {
        return Err(Error::InvalidArgument(
            "character profiles are defined on one-dimensional tori".into(),
        ));
    }
    let r = radius as i64;
    let side = 2 * radius as usize + 1;
    let count = side
        .checked_pow(m.d as u32)
        .filter(|c| *c <= 1 << 20)
        .ok_or_else(|| {
            Error::CostGuard(format!("character box of radius {radius} in arity {}", m.d))
        })?;
    let ks: Vec<Vec<i64>> = (0..count)
        .map(|mut i| {
            let mut k = vec![0i64; m.d];
            for kj in k.iter_mut().rev() {
                *kj = (i % side) as i64 - r;
                i /= side;
            }
            k
        })
        .collect();
    let block_means: Vec<Vec<Complex64>> = (0..m.block_count())
        .into_par_iter()
        .map(|b| {
            let block = m.block(b);
            let mut sums = vec![ComplexSum::new(); count];
            let mut powers = vec![Complex64::new(1.0, 0.0); m.d * side];
            let mut prods = vec![Complex64::new(1.0, 0.0); count];
            for t in block.chunks_exact(m.d) {
                for (j, x) in t.iter().enumerate() {
                    let row = &mut powers[j * side..(j + 1) * side];
                    for (slot, k) in row.iter_mut().zip(-r..=r) {
                        *slot = e(frac_mul(k, *x));
                    }
                }
                // prods[i] = Π_j powers[j][digit_j(i)], built digit by digit
                prods[0] = Complex64::new(1.0, 0.0);
                let mut filled = 1;
                for j in (0..m.d).rev() {
                    let row = &powers[j * side..(j + 1) * side];
                    for digit in (0..side).rev() {
                        for i in 0..filled {
                            prods[digit * filled + i] = prods[i] * row[digit];
                        }
                    }
                    filled *= side;
                }
                for (s, p) in sums.iter_mut().zip(&prods) {
                    s.add(*p);
                }
            }
            sums.iter()
                .map(|s| s.value() / m.block_len as f64)
                .collect()
        })
        .collect();
    Ok(ks
        .into_iter()
        .enumerate()
        .map(|(i, k)| {
            let v = mean_of(block_means.iter().map(|b| b[i]), block_means.len());
            (k, v)
        })
        .collect())
}

/// Limit of `∫ Π_j e(k_j x_j) dμ^(d)` for an ergodic rotation of the
/// circle: the Haar integral over `{(y, y+b, …, y+(d−1)b)}`.
pub fn ap_subtorus_integral(ks: &[i64]) -> f64 {
    let total: i128 = ks.iter().map(|k| *k as i128).sum();
    let moment: i128 = ks
        .iter()
        .enumerate()
        .map(|(j, k)| j as i128 * *k as i128)
        .sum();
    if total == 0 && moment == 0 {
        1.0
    } else {
        0.0
    }
}

/// Limit of the fiber integral over `x`: the orbit closure of `(x, …, x)`
/// under `σ_d` is `{(x+y, x+2y, …, x+dy)}`, giving
/// `e((Σk_j)·x)·1[Σ j·k_j = 0]`.
pub fn ap_fiber_integral(ks: &[i64], x: f64) -> Complex64 {
    let moment: i128 = ks
        .iter()
        .enumerate()
        .map(|(j, k)| (j as i128 + 1) * *k as i128)
        .sum();
    if moment != 0 {
        return Complex64::new(0.0, 0.0);
    }
    let phase: f64 = ks.iter().map(|k| frac_mul(*k, x)).sum();
    e(phase)
}

/// Projection onto factor `j` (1-based), as an arity-1 measure with the
/// same blocks.
pub fn marginal(m: &EmpiricalMeasure, j: usize) -> Result<EmpiricalMeasure> {
    if j == 0 || j > m.d {
        return Err(Error::InvalidArgument(format!(
            "coordinate {j} outside 1..={}",
            m.d
        )));
    }
    let coords = (0..m.len())
        .flat_map(|i| m.factor(i, j - 1).iter().copied())
        .collect();
    Ok(EmpiricalMeasure {
        d: 1,
        coords,
        provenance: Provenance {
            d: 1,
            ..m.provenance.clone()
        },
        ..*m
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionReport {
    /// Integral against the self-joining.
    pub barycenter: Complex64,
    /// Mean of the separately built fiber integrals.
    pub fiber_mean: Complex64,
    /// `|barycenter − fiber_mean|`; zero when the identity holds exactly.
    pub gap: f64,
    /// Largest `|fiber − barycenter|`.
    pub dispersion: f64,
    pub fibers: Vec<Complex64>,
}

/// Compares `∫ ⊗f dμ^(d)` with the average of `∫ ⊗f dν_x` over the same starts.
pub fn decomposition_consistency(
    system: &DynamicalSystem,
    start_count: usize,
    n: u64,
    fs: &[Observable],
    seed: u64,
) -> Result<DecompositionReport> {
    let d = fs.len();
    let joining =
        empirical_self_joining(system, d, start_count, n, &mut RngState::from_seed(seed))?;
    let barycenter = integrate_tensor(&joining, fs)?;
    let starts = draw_starts(system, start_count, &mut RngState::from_seed(seed));
    let fibers = starts
        .iter()
        .map(|x| integrate_tensor(&fiber_measure(system, x, d, n)?, fs))
        .collect::<Result<Vec<_>>>()?;
    let fiber_mean = mean_of(fibers.iter().copied(), fibers.len());
    let dispersion = fibers
        .iter()
        .map(|v| (v - barycenter).norm())
        .fold(0.0, f64::max);
    Ok(DecompositionReport {
        barycenter,
        fiber_mean,
        gap: (barycenter - fiber_mean).norm(),
        dispersion,
        fibers,
    })
}

/// The `Z²` action on `X^d` generated by `τ_d = T × … × T` and
/// `σ_d = T × T² × … × T^d`.
#[derive(Clone, Debug)]
pub struct DiagonalAction {
    system: DynamicalSystem,
    d: usize,
}

impl DiagonalAction {
    pub fn new(system: DynamicalSystem, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("d must be ≥ 1".into()));
        }
        Ok(Self { system, d })
    }

    fn check(&self, tuple: &[Point]) -> Result<()> {
        if tuple.len() != self.d {
            return Err(Error::ArityMismatch {
                expected: self.d,
                got: tuple.len(),
            });
        }
        Ok(())
    }

    pub fn tau(&self, tuple: &[Point]) -> Result<Vec<Point>> {
        self.check(tuple)?;
        tuple.iter().map(|p| self.system.step(p)).collect()
    }

    pub fn sigma(&self, tuple: &[Point]) -> Result<Vec<Point>> {
        self.check(tuple)?;
        tuple
            .iter()
            .enumerate()
            .map(|(j, p)| self.system.step_pow(p, j as i64 + 1))
            .collect()
    }

    /// Largest coordinate discrepancy of `στ` and `τσ` over seeded samples.
    pub fn commutation_defect(&self, samples: usize, seed: u64) -> Result<f64> {
        let mut rng = RngState::from_seed(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let tuple: Vec<Point> = (0..self.d)
                .map(|_| self.system.haar_sample(&mut rng))
                .collect();
            let a = self.sigma(&self.tau(&tuple)?)?;
            let b = self.tau(&self.sigma(&tuple)?)?;
            for (p, q) in a.iter().zip(&b) {
                for (u, v) in p.coords().iter().zip(q.coords()) {
                    worst = worst.max(circle_distance(*u, *v));
                }
            }
        }
        Ok(worst)
    }

    /// Pushforward of `m` under `σ_d`, stepping factor `j` by `T` `j` times.
    pub fn push_sigma(&self, m: &EmpiricalMeasure) -> Result<EmpiricalMeasure> {
        if m.d != self.d
            || m.dim != self.system.dimension()
            || m.heisenberg != self.system.is_heisenberg()
        {
            return Err(Error::ArityMismatch {
                expected: self.d,
                got: m.d,
            });
        }
        let mut out = m.clone();
        let width = m.d * m.dim;
        out.coords.par_chunks_mut(width).for_each(|t| {
            for (j, z) in t.chunks_exact_mut(m.dim).enumerate() {
                for _ in 0..=j {
                    self.system.advance(z);
                }
            }
        });
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::averaging::multilinear_average_linear;
    use crate::phase::{frac, geometric_mean};
    use crate::systems::golden;

    fn chars(ks: &[i64]) -> Vec<Observable> {
        ks.iter().map(|k| Observable::character(vec![*k])).collect()
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(ap_subtorus_integral(&[0, 0, 0]), 1.0);
        assert_eq!(ap_subtorus_integral(&[1, -1]), 0.0);
        assert_eq!(ap_subtorus_integral(&[1, -2, 1]), 1.0);
        let v = ap_fiber_integral(&[-2, 1], 0.3);
        assert!((v - e(-0.3)).norm() < 1e-15);
        assert_eq!(ap_fiber_integral(&[1, 1], 0.3), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn fiber_reproduces_linear_average_bitwise() {
        let x = Point::torus(vec![0.3, 0.8]).unwrap();
        let sys = DynamicalSystem::skew_product(golden());
        let fs: Vec<Observable> = vec![
            "1,0:1,1;0.5,0:0,-2".parse().unwrap(),
            "0,1:2,-1".parse().unwrap(),
        ];
        for n in [1, 7, 500] {
            let m = fiber_measure(&sys, &x, 2, n).unwrap();
            assert_eq!(
                integrate_tensor(&m, &fs).unwrap(),
                multilinear_average_linear(&sys, &fs, &x, n).unwrap()
            );
        }
    }

    #[test]
    fn fiber_phase_rule_on_rotation() {
        let rot = DynamicalSystem::golden_rotation();
        for x0 in [0.0, 0.3] {
            let x = Point::torus(vec![x0]).unwrap();
            let m = fiber_measure(&rot, &x, 2, 1000).unwrap();
            let v = integrate_tensor(&m, &chars(&[-2, 1])).unwrap();
            assert!((v - ap_fiber_integral(&[-2, 1], x0)).norm() < 1e-9);
        }
    }

    #[test]
    fn barycenter_identity_is_exact() {
        let rot = DynamicalSystem::golden_rotation();
        let r = decomposition_consistency(&rot, 50, 200, &chars(&[-2, 1]), 11).unwrap();
        assert_eq!(r.gap, 0.0);
        assert!(r.dispersion > 0.5);
        let ones = vec![Observable::one(1); 2];
        let r = decomposition_consistency(&rot, 20, 30, &ones, 11).unwrap();
        assert_eq!(r.dispersion, 0.0);
        assert_eq!(r.barycenter, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn self_joining_two_fold_example() {
        let rot = DynamicalSystem::golden_rotation();
        let m = empirical_self_joining(&rot, 2, 100, 1000, &mut RngState::from_seed(5)).unwrap();
        assert_eq!(m.len(), 100_000);
        let v = integrate_tensor(&m, &chars(&[1, -1])).unwrap();
        assert!(v.norm() < 0.05);
        // each block mean is exactly G_N(-α) here
        assert!((v - geometric_mean(frac(-golden()), 1000)).norm() < 1e-12);
    }

    #[test]
    fn streaming_matches_materialized() {
        let sys = DynamicalSystem::default_heisenberg();
        let fs: Vec<Observable> = vec!["1,0:1,0,0".parse().unwrap(), "1,0:0,-1,0".parse().unwrap()];
        let m = empirical_self_joining(&sys, 2, 30, 40, &mut RngState::from_seed(9)).unwrap();
        let a = integrate_tensor(&m, &fs).unwrap();
        let b = self_joining_integral_streaming(&sys, &fs, 30, 40, &mut RngState::from_seed(9))
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn character_profile_matches_direct_integration() {
        let rot = DynamicalSystem::golden_rotation();
        let m = empirical_self_joining(&rot, 3, 8, 25, &mut RngState::from_seed(2)).unwrap();
        let profile = character_box_profile(&m, 2).unwrap();
        assert_eq!(profile.len(), 125);
        for (k, v) in profile.iter().step_by(7) {
            let direct = integrate_tensor(&m, &chars(k)).unwrap();
            assert!((v - direct).norm() < 1e-12, "{k:?}");
        }
    }

    #[test]
    fn marginals_and_edge_cases() {
        let rot = DynamicalSystem::golden_rotation();
        let m = empirical_self_joining(&rot, 3, 40, 500, &mut RngState::from_seed(3)).unwrap();
        for j in 1..=3 {
            let mj = marginal(&m, j).unwrap();
            assert_eq!(mj.arity(), 1);
            let v = integrate_tensor(&mj, &chars(&[1])).unwrap();
            assert!(v.norm() <= crate::phase::geometric_bound(frac_mul(j as i64, golden()), 500));
        }
        assert!(marginal(&m, 0).is_err() && marginal(&m, 4).is_err());
        assert!(matches!(
            integrate_tensor(&m, &chars(&[1, 1])),
            Err(Error::ArityMismatch {
                expected: 3,
                got: 2
            })
        ));
        let diag = empirical_self_joining(&rot, 2, 5, 1, &mut RngState::from_seed(3)).unwrap();
        for i in 0..diag.len() {
            assert_eq!(diag.factor(i, 0), diag.factor(i, 1));
        }
    }

    #[test]
    fn sigma_invariance_up_to_boundary() {
        let sys = DynamicalSystem::skew_product(golden());
        let fs: Vec<Observable> = vec!["1,0:1,1".parse().unwrap(), "2,0:-1,2".parse().unwrap()];
        let n = 100;
        let m = empirical_self_joining(&sys, 2, 20, n, &mut RngState::from_seed(4)).unwrap();
        let action = DiagonalAction::new(sys, 2).unwrap();
        let pushed = action.push_sigma(&m).unwrap();
        let diff =
            (integrate_tensor(&pushed, &fs).unwrap() - integrate_tensor(&m, &fs).unwrap()).norm();
        let sup: f64 = fs.iter().map(Observable::sup_bound).product();
        assert!(diff <= 2.0 * sup / n as f64 + 1e-12);
        assert!(action.commutation_defect(8, 1).unwrap() < 1e-12);
    }

    #[test]
    fn binary_round_trip() {
        let rot = DynamicalSystem::rotation(vec![0.1, golden()]).unwrap();
        let m = empirical_self_joining(&rot, 2, 3, 4, &mut RngState::from_seed(8)).unwrap();
        let mut buf = Vec::new();
        m.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 6 * 8 + 12 * 2 * 2 * 8);
        let back = EmpiricalMeasure::read_binary(buf.as_slice()).unwrap();
        assert_eq!(back.coords, m.coords);
        assert_eq!(back.provenance.seed, Some(8));
        buf[0] = b'X';
        assert!(EmpiricalMeasure::read_binary(buf.as_slice()).is_err());
    }
}
