use super::AverageTrajectory;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Spread of a trajectory over its tail window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostic {
    /// Largest pairwise distance between tail checkpoint values.
    pub oscillation: f64,
    pub last: Complex64,
    /// Number of checkpoints inside the tail window.
    pub tail_len: usize,
    /// Orbit period, when the system is a rational rotation.
    pub period: Option<u64>,
}

impl Diagnostic {
    pub fn converged(&self, tolerance: f64) -> bool {
        self.oscillation <= tolerance
    }
}

/// Oscillation of the checkpoints with `N ≥ (1 − tail_fraction)·N_max`.
pub fn convergence_diagnostic(traj: &AverageTrajectory, tail_fraction: f64) -> Result<Diagnostic> {
    if !(0.0..=1.0).contains(&tail_fraction) {
        return Err(Error::InvalidArgument(format!(
            "tail fraction {tail_fraction} outside [0, 1]"
        )));
    }
    let cps = traj.checkpoints();
    let n_max = cps.last().map_or(0, |c| c.0);
    let threshold = (1.0 - tail_fraction) * n_max as f64;
    let tail: Vec<Complex64> = cps
        .iter()
        .filter(|(n, _)| *n as f64 >= threshold)
        .map(|(_, v)| *v)
        .collect();
    if tail.len() < 3 {
        return Err(Error::InsufficientCheckpoints { found: tail.len() });
    }
    let mut oscillation: f64 = 0.0;
    for (i, a) in tail.iter().enumerate() {
        for b in &tail[i + 1..] {
            oscillation = oscillation.max((a - b).norm());
        }
    }
    Ok(Diagnostic {
        oscillation,
        last: *tail.last().unwrap(),
        tail_len: tail.len(),
        period: traj.period,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::averaging::{linear_schedule, Scheme};
    use crate::phase::geometric_mean;
    use crate::systems::golden;

    #[test]
    fn constant_trajectory() {
        let t = AverageTrajectory::new(
            Scheme::Birkhoff,
            (1..=10).map(|n| (n, Complex64::new(0.5, 0.0))).collect(),
        )
        .unwrap();
        let d = convergence_diagnostic(&t, 0.5).unwrap();
        assert_eq!(d.oscillation, 0.0);
        assert!(d.converged(0.0));
    }

    #[test]
    fn golden_geometric_tail() {
        let n = 100_000u64;
        let alpha = golden();
        let cps = linear_schedule(n / 20, n)
            .into_iter()
            .map(|m| (m, geometric_mean(alpha, m)))
            .collect();
        let t = AverageTrajectory::new(Scheme::Birkhoff, cps).unwrap();
        let d = convergence_diagnostic(&t, 0.5).unwrap();
        let bound = 4.0 / (n as f64 * crate::phase::one_minus_e_abs(alpha)) * 2.0;
        assert!(d.oscillation <= bound, "{} > {bound}", d.oscillation);
    }

    #[test]
    fn alternating_partial_averages_are_detected() {
        // x_n = (-1)^n: partial averages 1/N for odd N and 0 for even N
        let n_max = 1000u64;
        let cps = (990..=n_max)
            .map(|m| {
                (
                    m,
                    Complex64::new(if m % 2 == 1 { 1.0 / m as f64 } else { 0.0 }, 0.0),
                )
            })
            .collect();
        let t = AverageTrajectory::new(Scheme::Birkhoff, cps).unwrap();
        let d = convergence_diagnostic(&t, 0.5).unwrap();
        assert!((d.oscillation - 1.0 / 991.0).abs() < 1e-15);
        assert!(!d.converged(1e-6));
    }

    #[test]
    fn too_few_tail_points() {
        let t = AverageTrajectory::new(
            Scheme::Birkhoff,
            vec![(1, Complex64::default()), (100, Complex64::default())],
        )
        .unwrap();
        assert_eq!(
            convergence_diagnostic(&t, 0.5),
            Err(Error::InsufficientCheckpoints { found: 1 })
        );
    }
}
