//! Averages over boxes of a `Z²` action and the temperedness condition
//! `|∪_{k<n} F_k⁻¹ F_n| < C |F_n|`.

use crate::error::{Error, Result};
use crate::observables::Observable;
use crate::phase::circle_distance;
use crate::rng::RngState;
use crate::summation::ComplexSum;
use crate::systems::{DynamicalSystem, Point};
use num_complex::Complex64;

/// Seed for the sample points of the commutation check.
pub const COMMUTATION_SEED: u64 = 0x00C0_FFEE;
const COMMUTATION_TOL: f64 = 1e-10;
const COMMUTATION_SAMPLES: usize = 16;

/// The rectangle `[0, N₁) × [0, N₂)` of `Z²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FolnerBox {
    pub n1: u64,
    pub n2: u64,
}

impl FolnerBox {
    pub fn new(n1: u64, n2: u64) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::InvalidArgument("box sides must be ≥ 1".into()));
        }
        Ok(Self { n1, n2 })
    }

    pub fn square(n: u64) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn area(&self) -> u128 {
        self.n1 as u128 * self.n2 as u128
    }
}

/// Two commuting maps on the same space, generating a `Z²` action.
#[derive(Clone, Debug)]
pub struct CommutingPair {
    first: DynamicalSystem,
    second: DynamicalSystem,
}

impl CommutingPair {
    /// Checks `S₁S₂x = S₂S₁x` on seeded Haar samples.
    pub fn new(first: DynamicalSystem, second: DynamicalSystem) -> Result<Self> {
        if first.dimension() != second.dimension()
            || first.is_heisenberg() != second.is_heisenberg()
        {
            return Err(Error::InvalidSystem("maps act on different spaces".into()));
        }
        let mut rng = RngState::from_seed(COMMUTATION_SEED);
        let mut worst: f64 = 0.0;
        for _ in 0..COMMUTATION_SAMPLES {
            let x = first.haar_sample(&mut rng);
            let a = first.step(&second.step(&x)?)?;
            let b = second.step(&first.step(&x)?)?;
            for (u, v) in a.coords().iter().zip(b.coords()) {
                worst = worst.max(circle_distance(*u, *v));
            }
        }
        if worst > COMMUTATION_TOL {
            return Err(Error::NotCommuting(worst));
        }
        Ok(Self { first, second })
    }

    /// `(T^a, T^b)`.
    pub fn powers_of(system: &DynamicalSystem, a: u32, b: u32) -> Result<Self> {
        Self::new(power_system(system, a)?, power_system(system, b)?)
    }

    pub fn first(&self) -> &DynamicalSystem {
        &self.first
    }

    pub fn second(&self) -> &DynamicalSystem {
        &self.second
    }
}

/// A system whose single step is `T^a`; supported for rotations only.
fn power_system(system: &DynamicalSystem, a: u32) -> Result<DynamicalSystem> {
    match system.kind() {
        crate::systems::SystemKind::Rotation { alpha } => DynamicalSystem::rotation(
            alpha
                .iter()
                .map(|x| crate::phase::frac_mul(a as i64, *x))
                .collect(),
        ),
        _ => Err(Error::InvalidSystem(
            "power systems are only built for rotations".into(),
        )),
    }
}

/// `(1/|F|) Σ_{(n,m) ∈ F} f(S₁^n S₂^m x)`, streaming both orbits.
pub fn folner_average(
    pair: &CommutingPair,
    f: &Observable,
    x: &Point,
    fbox: FolnerBox,
) -> Result<Complex64> {
    pair.first.check_point(x)?;
    f.check_for(&pair.first)?;
    let mut row = x.coords().to_vec();
    let mut acc = ComplexSum::new();
    for _ in 0..fbox.n2 {
        let mut z = row.clone();
        for _ in 0..fbox.n1 {
            acc.add(f.eval_coords(&z));
            pair.first.advance(&mut z);
        }
        pair.second.advance(&mut row);
    }
    Ok(acc.value() / fbox.area() as f64)
}

/// Exact size of `∪_{k<n} (−F_k + F_n)` for anchored boxes.
///
/// Each set `−F_k + F_n` is the box `[−(a_k−1), a_n−1] × [−(b_k−1), b_n−1]`;
/// all share the upper corner, so the union is a staircase counted column
/// by column.
pub fn union_size(boxes: &[FolnerBox], n: usize) -> u128 {
    if n == 0 {
        return 0;
    }
    let top_x = boxes[n].n1 as i128 - 1;
    let top_y = boxes[n].n2 as i128 - 1;
    let mut lows: Vec<(i128, i128)> = boxes[..n]
        .iter()
        .map(|b| (b.n1 as i128 - 1, b.n2 as i128 - 1))
        .collect();
    lows.sort_by_key(|b| std::cmp::Reverse(b.0));
    let mut total: i128 = 0;
    let mut max_v: i128 = -1;
    for (i, (u, v)) in lows.iter().enumerate() {
        max_v = max_v.max(*v);
        let x_lo = -u;
        let x_hi = match lows.get(i + 1) {
            Some((u_next, _)) => -u_next - 1,
            None => top_x,
        };
        if x_hi >= x_lo {
            total += (x_hi - x_lo + 1) * (top_y + max_v + 1);
        }
    }
    total as u128
}

/// `|∪_{k<n} F_k⁻¹F_n| / |F_n|` for each `n`.
pub fn tempered_ratios(boxes: &[FolnerBox]) -> Vec<f64> {
    (0..boxes.len())
        .map(|n| union_size(boxes, n) as f64 / boxes[n].area() as f64)
        .collect()
}

/// Shulman's condition with constant `c`, checked in exact integers.
pub fn is_tempered(boxes: &[FolnerBox], c: f64) -> Result<bool> {
    if boxes.is_empty() {
        return Err(Error::InvalidArgument("need at least one box".into()));
    }
    Ok((0..boxes.len()).all(|n| (union_size(boxes, n) as f64) < c * boxes[n].area() as f64))
}
