//! Host–Kra seminorms through the recursion
//! `⦀f⦀₁ = |∫f|`, `⦀f⦀_{k+1}^{2^{k+1}} = lim_H (1/H) Σ_{h=1}^{H} ⦀f·T^h f̄⦀_k^{2^k}`,
//! truncated at a declared `H`, and the van der Corput inequality as a
//! finite-size diagnostic.
//!
//! Unrolled, the recursion averages `|∫ Π_{ε ∈ {0,1}^{k-1}} C^{|ε|} f∘T^{ε·h}|²`
//! over `h ∈ [1, H]^{k-1}`. The exact path forms each product in the
//! character algebra; the Monte Carlo path estimates the inner integrals
//! from `N` seeded Haar samples shared by every `h`.

use crate::error::{Error, Result};
use crate::observables::{Observable, DEFAULT_TERM_CAP};
use crate::phase::{e, frac_mul};
use crate::rng::RngState;
use crate::summation::{ComplexSum, NeumaierSum};
use crate::systems::DynamicalSystem;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

/// Largest order accepted; the work grows like `H^{k-1}`.
pub const MAX_ORDER: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeminormMethod {
    /// Exact path only; overflow and term-cap errors are returned.
    Exact,
    MonteCarlo {
        seed: u64,
    },
    /// Exact path, falling back to Monte Carlo on resource errors.
    Auto {
        seed: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeminormEstimate {
    pub order: u32,
    pub value: f64,
    #[serde(rename = "H")]
    pub h: u64,
    /// Haar samples per inner integral; 0 on the exact path.
    #[serde(rename = "N")]
    pub n: u64,
    pub exact: bool,
}

/// Estimates `⦀f⦀_k` at outer truncation `h_len` and `n` Monte Carlo samples.
pub fn hk_seminorm(
    system: &DynamicalSystem,
    f: &Observable,
    k: u32,
    h_len: u64,
    n: u64,
    method: SeminormMethod,
) -> Result<SeminormEstimate> {
    f.check_for(system)?;
    if k == 0 || k > MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "order {k} outside 1..={MAX_ORDER}"
        )));
    }
    if h_len == 0 {
        return Err(Error::InvalidArgument("H must be ≥ 1".into()));
    }
    let exact = |f: &Observable| -> Result<SeminormEstimate> {
        Ok(SeminormEstimate {
            order: k,
            value: exact_seminorm(system, f, k, h_len)?,
            h: h_len,
            n: 0,
            exact: true,
        })
    };
    let monte_carlo = |seed: u64| -> Result<SeminormEstimate> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "N must be ≥ 1 for Monte Carlo".into(),
            ));
        }
        Ok(SeminormEstimate {
            order: k,
            value: monte_carlo_seminorm(system, f, k, h_len, n, seed)?,
            h: h_len,
            n,
            exact: false,
        })
    };
    if k == 1 {
        return exact(f);
    }
    match method {
        SeminormMethod::Exact => exact(f),
        SeminormMethod::MonteCarlo { seed } => monte_carlo(seed),
        SeminormMethod::Auto { seed } => match exact(f) {
            Err(e) if e.is_resource() => monte_carlo(seed),
            other => other,
        },
    }
}

fn exact_seminorm(system: &DynamicalSystem, f: &Observable, k: u32, h_len: u64) -> Result<f64> {
    if k == 1 {
        return Ok(f.integral_haar().norm());
    }
    let inner_power = 1i32 << (k - 1);
    let terms: Vec<Result<f64>> = (1..=h_len as i64)
        .into_par_iter()
        .map(|h| {
            let shifted = f.compose_with_power(system, h)?.conjugate();
            let g = f.multiply_capped(&shifted, DEFAULT_TERM_CAP)?;
            Ok(exact_seminorm(system, &g, k - 1, h_len)?.powi(inner_power))
        })
        .collect();
    let mut acc = NeumaierSum::new();
    for t in terms {
        acc.add(t?);
    }
    Ok((acc.value() / h_len as f64).powf(1.0 / f64::from(1u32 << k)))
}

fn monte_carlo_seminorm(
    system: &DynamicalSystem,
    f: &Observable,
    k: u32,
    h_len: u64,
    n: u64,
    seed: u64,
) -> Result<f64> {
    let depth = (k - 1) as usize;
    let span = depth * h_len as usize + 1;
    let cells = (n as u128) * span as u128;
    if cells > 50_000_000 {
        return Err(Error::CostGuard(format!(
            "{cells} orbit values exceeds 5e7"
        )));
    }
    let mut rng = RngState::from_seed(seed);
    // values[i][s] = f(T^s x_i)
    let starts: Vec<Vec<f64>> = (0..n)
        .map(|_| system.haar_sample(&mut rng).coords().to_vec())
        .collect();
    let values: Vec<Vec<Complex64>> = starts
        .into_par_iter()
        .map(|mut z| {
            let mut row = Vec::with_capacity(span);
            for _ in 0..span {
                row.push(f.eval_coords(&z));
                system.advance(&mut z);
            }
            row
        })
        .collect();
    let leaves = (h_len as u128).pow(depth as u32);
    let leaf_values: Vec<f64> = (0..leaves as u64)
        .into_par_iter()
        .map(|index| {
            let mut hs = vec![0usize; depth];
            let mut rest = index;
            for h in hs.iter_mut() {
                *h = (rest % h_len) as usize + 1;
                rest /= h_len;
            }
            let mut acc = ComplexSum::new();
            for row in &values {
                let mut prod = Complex64::new(1.0, 0.0);
                for eps in 0..1usize << depth {
                    let shift: usize = (0..depth)
                        .filter(|i| eps >> i & 1 == 1)
                        .map(|i| hs[i])
                        .sum();
                    let v = row[shift];
                    prod *= if eps.count_ones() % 2 == 1 {
                        v.conj()
                    } else {
                        v
                    };
                }
                acc.add(prod);
            }
            (acc.value() / n as f64).norm_sqr()
        })
        .collect();
    let mut acc = NeumaierSum::new();
    for v in leaf_values {
        acc.add(v);
    }
    Ok((acc.value() / leaves as f64).powf(1.0 / f64::from(1u32 << k)))
}

/// Largest violation of `⦀f⦀_k ≤ ⦀f⦀_{k+1}` across consecutive estimates.
pub fn monotonicity_slack(estimates: &[SeminormEstimate]) -> f64 {
    estimates
        .windows(2)
        .map(|w| (w[0].value - w[1].value).max(0.0))
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VdcReport {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

/// Both sides of `‖(1/N)Σ x_n‖² ≤ (1/H) Σ_{h=1}^{H} |(1/N) Σ ⟨x_n, x_{n+h}⟩|`
/// with `N = len − H`, so every inner product uses observed terms.
pub fn van_der_corput_check(seq: &[Vec<Complex64>], h_len: usize) -> Result<VdcReport> {
    if h_len == 0 || h_len >= seq.len() {
        return Err(Error::InvalidArgument(format!(
            "H = {h_len} must satisfy 1 ≤ H < sequence length {}",
            seq.len()
        )));
    }
    let dim = seq[0].len();
    if let Some(bad) = seq.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: bad.len(),
        });
    }
    let n = seq.len() - h_len;
    let mut lhs = 0.0;
    for i in 0..dim {
        let mut acc = ComplexSum::new();
        for x in &seq[..n] {
            acc.add(x[i]);
        }
        lhs += (acc.value() / n as f64).norm_sqr();
    }
    let corr: Vec<f64> = (1..=h_len)
        .into_par_iter()
        .map(|h| {
            let mut acc = ComplexSum::new();
            for t in 0..n {
                let mut ip = Complex64::new(0.0, 0.0);
                for (a, b) in seq[t].iter().zip(&seq[t + h]) {
                    ip += a * b.conj();
                }
                acc.add(ip);
            }
            (acc.value() / n as f64).norm()
        })
        .collect();
    let mut acc = NeumaierSum::new();
    for c in corr {
        acc.add(c);
    }
    let rhs = acc.value() / h_len as f64;
    Ok(VdcReport {
        lhs,
        rhs,
        margin: rhs - lhs,
    })
}

/// Test sequences for the van der Corput check: `x_n = e(φ(n))·v` with
/// `v = (0.6, 0.8i)` and `φ` zero, `nα` or `n²α`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VdcFamily {
    Constant,
    Linear,
    Quadratic,
}

impl std::str::FromStr for VdcFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "constant" => Ok(Self::Constant),
            "linear" => Ok(Self::Linear),
            "quadratic" => Ok(Self::Quadratic),
            other => Err(Error::Parse(format!("unknown sequence family {other:?}"))),
        }
    }
}

impl std::fmt::Display for VdcFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Constant => "constant",
            Self::Linear => "linear",
            Self::Quadratic => "quadratic",
        })
    }
}

pub fn vdc_sequence(family: VdcFamily, alpha: f64, len: usize) -> Result<Vec<Vec<Complex64>>> {
    if len as u128 * len as u128 >= 1 << 62 {
        return Err(Error::CostGuard(format!("sequence length {len} too large")));
    }
    let v = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
    Ok((0..len as i64)
        .map(|n| {
            let z = e(match family {
                VdcFamily::Constant => 0.0,
                VdcFamily::Linear => frac_mul(n, alpha),
                VdcFamily::Quadratic => frac_mul(n * n, alpha),
            });
            v.iter().map(|c| c * z).collect()
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormBoundReport {
    /// `(E|(1/N) Σ_n Π_j f_j(T^{jn} x_j)|²)^{1/2}` over independent Haar tuples.
    pub lhs: f64,
    /// `min_l l·⦀f_l⦀_d`.
    pub rhs: f64,
    pub seminorms: Vec<SeminormEstimate>,
}

/// The multilinear bound under the product self-joining.
#[allow(clippy::too_many_arguments)]
pub fn multilinear_norm_bound_check(
    system: &DynamicalSystem,
    fs: &[Observable],
    sample_count: usize,
    n: u64,
    h_len: u64,
    seed: u64,
    method: SeminormMethod,
) -> Result<NormBoundReport> {
    if fs.is_empty() || sample_count == 0 || n == 0 {
        return Err(Error::InvalidArgument(
            "need observables, samples and N ≥ 1".into(),
        ));
    }
    for f in fs {
        f.check_for(system)?;
    }
    let d = fs.len();
    let mut rng = RngState::from_seed(seed);
    let tuples: Vec<Vec<Vec<f64>>> = (0..sample_count)
        .map(|_| {
            (0..d)
                .map(|_| system.haar_sample(&mut rng).coords().to_vec())
                .collect()
        })
        .collect();
    let squares: Vec<f64> = tuples
        .into_par_iter()
        .map(|mut points| {
            let mut acc = ComplexSum::new();
            for _ in 0..n {
                let mut prod = Complex64::new(1.0, 0.0);
                for (f, p) in fs.iter().zip(&points) {
                    prod *= f.eval_coords(p);
                }
                acc.add(prod);
                for (j, p) in points.iter_mut().enumerate() {
                    for _ in 0..=j {
                        system.advance(p);
                    }
                }
            }
            (acc.value() / n as f64).norm_sqr()
        })
        .collect();
    let mut acc = NeumaierSum::new();
    for s in squares {
        acc.add(s);
    }
    let lhs = (acc.value() / sample_count as f64).sqrt();
    let seminorms = fs
        .iter()
        .map(|f| hk_seminorm(system, f, d as u32, h_len, n, method))
        .collect::<Result<Vec<_>>>()?;
    let rhs = seminorms
        .iter()
        .enumerate()
        .map(|(l, s)| (l + 1) as f64 * s.value)
        .fold(f64::INFINITY, f64::min);
    Ok(NormBoundReport {
        lhs,
        rhs,
        seminorms,
    })
}
