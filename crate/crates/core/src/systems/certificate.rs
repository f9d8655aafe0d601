//! Ergodicity verdicts from finite searches for invariant characters.
//!
//! An affine map `z ↦ Az + b` has a nonconstant invariant L² function iff
//! some nonzero frequency `k` has a finite orbit under `Aᵀ`, of length `m`,
//! whose accumulated phase `k·(Σ_{j<m} A^j b)` is rational. Rotations are
//! the case `A = I`: every `k` has period one and the test reduces to
//! `k·α ∈ Z`. A Heisenberg translation is ergodic iff the rotation it
//! induces on the base torus `G/G₂Γ` is.

use super::{affine::AffineMap, DynamicalSystem, SystemKind};
use crate::intmat::IntMatrix;
use crate::phase::{circle_distance, frac, frac_mul};
use std::fmt;

const RELATION_TOL: f64 = 1e-12;
const MAX_SCAN: u64 = 4_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Ergodic,
    NonErgodic,
    Undetermined,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Ergodic => "ergodic",
            Verdict::NonErgodic => "non-ergodic",
            Verdict::Undetermined => "undetermined",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErgodicityCertificate {
    pub system: DynamicalSystem,
    pub verdict: Verdict,
    pub witness: String,
    /// Frequency box radius actually scanned.
    pub search_bound: u64,
    /// Nonzero frequency spanning an invariant function, when one was found.
    pub relation: Option<Vec<i64>>,
}

/// Scans for integer relations up to `search_bound` (clamped to keep the
/// frequency box below a few million vectors).
pub fn ergodicity_certificate(
    system: &DynamicalSystem,
    search_bound: u64,
) -> ErgodicityCertificate {
    let search_bound = search_bound.max(1);
    match system.kind() {
        SystemKind::HeisenbergTranslation { alpha, beta } => {
            let base = DynamicalSystem::rotation(vec![*alpha, *beta]).expect("finite parameters");
            let mut cert = ergodicity_certificate(&base, search_bound);
            cert.witness = format!("base rotation (α, β): {}", cert.witness);
            cert.system = system.clone();
            cert
        }
        _ => {
            let affine = system.affine().expect("torus system");
            let (verdict, witness, relation, bound) = if affine.is_translation() {
                rotation_verdict(affine.translation(), search_bound)
            } else if affine.translation().iter().all(|b| *b == 0.0) {
                automorphism_verdict(affine.matrix(), search_bound)
            } else {
                affine_verdict(affine, search_bound)
            };
            ErgodicityCertificate {
                system: system.clone(),
                verdict,
                witness,
                search_bound: bound,
                relation,
            }
        }
    }
}

fn clamp_bound(dim: usize, bound: u64) -> u64 {
    let mut b = bound;
    while b > 1
        && (2 * b + 1)
            .checked_pow(dim as u32)
            .is_none_or(|n| n > MAX_SCAN)
    {
        b -= (b / 8).max(1);
    }
    b
}

/// Nonzero vectors of the box `‖k‖∞ ≤ bound` up to sign (first nonzero entry positive).
fn half_box(dim: usize, bound: u64) -> impl Iterator<Item = Vec<i64>> {
    let b = bound as i64;
    let side = (2 * b + 1) as u64;
    let total = side.pow(dim as u32);
    (0..total).filter_map(move |mut idx| {
        let mut k = vec![0i64; dim];
        for c in k.iter_mut() {
            *c = (idx % side) as i64 - b;
            idx /= side;
        }
        match k.iter().find(|c| **c != 0) {
            Some(first) if *first > 0 => Some(k),
            _ => None,
        }
    })
}

fn dot_phase(k: &[i64], alpha: &[f64]) -> f64 {
    frac(k.iter().zip(alpha).map(|(ki, ai)| frac_mul(*ki, *ai)).sum())
}

fn rotation_verdict(alpha: &[f64], bound: u64) -> (Verdict, String, Option<Vec<i64>>, u64) {
    let bound = clamp_bound(alpha.len(), bound);
    // smallest relation first: scan by increasing sup-norm
    let mut best: Option<Vec<i64>> = None;
    for k in half_box(alpha.len(), bound) {
        if circle_distance(dot_phase(&k, alpha), 0.0) < RELATION_TOL {
            let norm = |v: &Vec<i64>| v.iter().map(|c| c.abs()).max().unwrap_or(0);
            if best.as_ref().is_none_or(|b| norm(&k) < norm(b)) {
                best = Some(k);
            }
        }
    }
    match best {
        Some(k) => (
            Verdict::NonErgodic,
            format!("k = {k:?} satisfies k·α ∈ Z"),
            Some(k),
            bound,
        ),
        None => (
            Verdict::Ergodic,
            format!("no k with 0 < ‖k‖∞ ≤ {bound} satisfies k·α ∈ Z"),
            None,
            bound,
        ),
    }
}

fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Largest order of a root of unity that can be an eigenvalue of an
/// integer `dim × dim` matrix (`φ(m) ≤ dim`).
fn max_root_order(dim: usize) -> u64 {
    (1..=4 * (dim as u64 + 1).pow(2))
        .filter(|&m| euler_phi(m) <= dim as u64)
        .max()
        .unwrap_or(1)
}

fn automorphism_verdict(
    matrix: &IntMatrix,
    bound: u64,
) -> (Verdict, String, Option<Vec<i64>>, u64) {
    let dim = matrix.rows();
    let max_order = max_root_order(dim).min(bound);
    let id = IntMatrix::identity(dim);
    let mut power = id.clone();
    for m in 1..=max_order {
        power = match power.checked_mul(matrix) {
            Ok(p) => p,
            Err(_) => {
                return (
                    Verdict::Undetermined,
                    format!("matrix power overflow at order {m}"),
                    None,
                    bound,
                )
            }
        };
        match power.checked_sub(&id).and_then(|d| d.determinant()) {
            Ok(0) => {
                return (
                    Verdict::NonErgodic,
                    format!("A^{m} - I is singular: eigenvalue is an {m}-th root of unity"),
                    None,
                    bound,
                )
            }
            Ok(_) => {}
            Err(_) => {
                return (
                    Verdict::Undetermined,
                    format!("determinant overflow at order {m}"),
                    None,
                    bound,
                )
            }
        }
    }
    let complete = max_order == max_root_order(dim);
    if complete {
        (
            Verdict::Ergodic,
            format!("no eigenvalue is a root of unity (orders ≤ {max_order} checked)"),
            None,
            bound,
        )
    } else {
        (
            Verdict::Undetermined,
            format!("root-of-unity orders checked only up to {max_order}"),
            None,
            bound,
        )
    }
}

fn affine_verdict(affine: &AffineMap, bound: u64) -> (Verdict, String, Option<Vec<i64>>, u64) {
    let dim = affine.dim();
    let bound = clamp_bound(dim, bound);
    let max_period = max_root_order(dim);
    let at = affine.matrix().transpose();
    for k in half_box(dim, bound) {
        let mut cur = k.clone();
        let mut period = None;
        for m in 1..=max_period {
            match at.checked_mul_vec(&cur) {
                Ok(next) => cur = next,
                Err(_) => break,
            }
            if cur == k {
                period = Some(m);
                break;
            }
        }
        let Some(m) = period else { continue };
        let Ok((_, theta)) = affine.compose_character(&k, m as i64) else {
            continue;
        };
        if let Some(q) =
            (1..=bound).find(|&q| circle_distance(frac_mul(q as i64, theta), 0.0) < RELATION_TOL)
        {
            return (
                Verdict::NonErgodic,
                format!(
                    "k = {k:?} has period {m} with phase {theta}, rational with denominator {q}"
                ),
                Some(k),
                bound,
            );
        }
    }
    (
        Verdict::Ergodic,
        format!("no periodic frequency with rational phase for ‖k‖∞ ≤ {bound}"),
        None,
        bound,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{default_heisenberg_params, golden};

    #[test]
    fn half_rotation_is_resonant() {
        let c = ergodicity_certificate(&DynamicalSystem::rotation(vec![0.5]).unwrap(), 10);
        assert_eq!(c.verdict, Verdict::NonErgodic);
        assert_eq!(c.relation, Some(vec![2]));
    }

    #[test]
    fn golden_rotation_is_ergodic() {
        let c = ergodicity_certificate(&DynamicalSystem::golden_rotation(), 100_000);
        assert_eq!(c.verdict, Verdict::Ergodic);
    }

    #[test]
    fn heisenberg_delegates_to_base() {
        let c = ergodicity_certificate(&DynamicalSystem::default_heisenberg(), 200);
        assert_eq!(c.verdict, Verdict::Ergodic);
        let (a, _) = default_heisenberg_params();
        let resonant = DynamicalSystem::heisenberg(a, 1.0 - a).unwrap();
        let c = ergodicity_certificate(&resonant, 20);
        assert_eq!(c.verdict, Verdict::NonErgodic);
        assert_eq!(c.relation, Some(vec![1, 1]));
    }

    #[test]
    fn automorphisms() {
        assert_eq!(
            ergodicity_certificate(&DynamicalSystem::cat_map(), 50).verdict,
            Verdict::Ergodic
        );
        let quarter_turn = IntMatrix::from_rows(&[vec![0, -1], vec![1, 0]]).unwrap();
        let c = ergodicity_certificate(&DynamicalSystem::automorphism(quarter_turn).unwrap(), 50);
        assert_eq!(c.verdict, Verdict::NonErgodic);
    }

    #[test]
    fn skew_products_follow_the_base_rotation() {
        let c = ergodicity_certificate(&DynamicalSystem::skew_product(golden()), 60);
        assert_eq!(c.verdict, Verdict::Ergodic);
        let c = ergodicity_certificate(&DynamicalSystem::skew_product(0.25), 60);
        assert_eq!(c.verdict, Verdict::NonErgodic);
    }

    #[test]
    fn phi_orders() {
        assert_eq!(max_root_order(1), 2);
        assert_eq!(max_root_order(2), 6);
        assert_eq!(max_root_order(4), 12);
    }
}
