//! Adapters from a parsed configuration to library calls and output files.
//! Each task returns its artifacts in memory; the caller writes them.

use crate::config::{EvalMethod, ExperimentConfig, SeminormMode, Task};
use multierg::averaging::closed_form::{
    birkhoff_closed, cube_closed, folner_closed, linear_closed, square_closed,
};
use multierg::averaging::{
    birkhoff_trajectory, convergence_diagnostic, cube_average, folner_average, linear_trajectory,
    multilinear_average_square, AverageTrajectory, CommutingPair, CubeObservables, FolnerBox,
    Scheme,
};
use multierg::joinings::{
    ap_subtorus_integral, character_box_profile, decomposition_consistency, empirical_self_joining,
};
use multierg::seminorms::{hk_seminorm, van_der_corput_check, vdc_sequence, SeminormMethod};
use multierg::systems::ergodicity_certificate;
use multierg::systems::text::format_real;
use multierg::{Complex64, DynamicalSystem, Error, Observable, Point, Result, RngState};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

/// A named output file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    fn json(name: &str, value: &impl Serialize) -> Result<Self> {
        let mut bytes =
            serde_json::to_vec_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
        bytes.push(b'\n');
        Ok(Self {
            name: name.into(),
            bytes,
        })
    }
}

fn missing(section: &str) -> Error {
    Error::InvalidArgument(format!("the configuration has no [{section}] section"))
}

fn start_point(cfg: &ExperimentConfig) -> Result<Point> {
    match &cfg.start {
        Some(x) => cfg.system.point(x),
        None => Ok(cfg.system.origin()),
    }
}

fn system_pairs(system: &DynamicalSystem) -> BTreeMap<String, String> {
    system.to_pairs("").into_iter().collect()
}

fn complex_pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn execute(task: Task, cfg: &ExperimentConfig) -> Result<Vec<Artifact>> {
    match task {
        Task::Orbit => orbit(cfg),
        Task::Average => average(cfg),
        Task::Seminorm => seminorm(cfg),
        Task::Vdc => vdc(cfg),
        Task::Joining => joining(cfg),
        Task::Certify => certify(cfg),
    }
}

/// Runs the configured tasks concurrently; artifacts come back in task order.
pub fn run_all(cfg: &ExperimentConfig) -> Result<Vec<Artifact>> {
    if cfg.tasks.is_empty() {
        return Err(Error::InvalidArgument("[run] tasks is empty".into()));
    }
    let results: Vec<Result<Vec<Artifact>>> =
        cfg.tasks.par_iter().map(|t| execute(*t, cfg)).collect();
    let mut artifacts = Vec::new();
    for r in results {
        artifacts.extend(r?);
    }
    let mut summary = String::new();
    for a in &artifacts {
        summary.push_str(&format!("{}\t{} bytes\n", a.name, a.bytes.len()));
    }
    artifacts.push(Artifact {
        name: "summary.txt".into(),
        bytes: summary.into_bytes(),
    });
    Ok(artifacts)
}

fn orbit(cfg: &ExperimentConfig) -> Result<Vec<Artifact>> {
    let steps = cfg.orbit_steps.ok_or_else(|| missing("orbit"))?;
    let mut p = start_point(cfg)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["n".to_string()];
    header.extend((1..=p.dim()).map(|i| format!("x{i}")));
    let csv_err = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(&header).map_err(csv_err)?;
    for n in 0..=steps {
        let mut row = vec![n.to_string()];
        row.extend(p.coords().iter().map(|c| format_real(*c)));
        w.write_record(&row).map_err(csv_err)?;
        if n < steps {
            p = cfg.system.step(&p)?;
        }
    }
    Ok(vec![Artifact {
        name: "orbit.csv".into(),
        bytes: w.into_inner().map_err(|e| Error::Parse(e.to_string()))?,
    }])
}

fn single(fs: &[Observable], scheme: Scheme) -> Result<&Observable> {
    match fs {
        [f] => Ok(f),
        _ => Err(Error::InvalidArgument(format!(
            "{scheme} averages take exactly one observable, got {}",
            fs.len()
        ))),
    }
}

/// Checkpoint values of the configured average.
pub fn average_trajectory(cfg: &ExperimentConfig) -> Result<AverageTrajectory> {
    let a = cfg.average.as_ref().ok_or_else(|| missing("average"))?;
    let sys = &cfg.system;
    let fs = &cfg.observables;
    let x = start_point(cfg)?;
    let closed = a.method == EvalMethod::Closed;
    let each = |eval: &dyn Fn(u64) -> Result<Complex64>| -> Result<AverageTrajectory> {
        let cps = a
            .checkpoints
            .iter()
            .map(|n| Ok((*n, eval(*n)?)))
            .collect::<Result<Vec<_>>>()?;
        AverageTrajectory::new(a.scheme, cps)
    };
    match a.scheme {
        Scheme::Birkhoff => {
            let f = single(fs, a.scheme)?;
            if closed {
                each(&|n| birkhoff_closed(sys, f, &x, n))
            } else {
                birkhoff_trajectory(sys, f, &x, &a.checkpoints)
            }
        }
        Scheme::Linear => {
            if closed {
                each(&|n| linear_closed(sys, fs, &x, n))
            } else {
                linear_trajectory(sys, fs, &x, &a.checkpoints)
            }
        }
        Scheme::Square => each(&|n| {
            if closed {
                square_closed(sys, fs, &x, n)
            } else {
                multilinear_average_square(sys, fs, &x, n)
            }
        }),
        Scheme::Cube => {
            let k = a
                .cube_dim
                .ok_or_else(|| Error::InvalidArgument("[average] cube needs cube_dim".into()))?;
            let cube = CubeObservables::new(k, fs.clone())?;
            each(&|n| {
                if closed {
                    cube_closed(sys, &cube, &x, n)
                } else {
                    cube_average(sys, &cube, &x, n)
                }
            })
        }
        Scheme::Folner => {
            let f = single(fs, a.scheme)?;
            let (p, q) = a.folner_powers.ok_or_else(|| {
                Error::InvalidArgument("[average] folner needs folner_powers".into())
            })?;
            let pair = CommutingPair::powers_of(sys, p, q)?;
            each(&|n| {
                let b = FolnerBox::square(n)?;
                if closed {
                    folner_closed(&pair, f, &x, b)
                } else {
                    folner_average(&pair, f, &x, b)
                }
            })
        }
    }
}

#[derive(Serialize)]
struct AverageSummary {
    scheme: Scheme,
    last: [f64; 2],
    oscillation: Option<f64>,
    tail_len: Option<usize>,
    period: Option<u64>,
    tolerance: f64,
    converged: Option<bool>,
}

fn average(cfg: &ExperimentConfig) -> Result<Vec<Artifact>> {
    let a = cfg.average.as_ref().ok_or_else(|| missing("average"))?;
    let traj = average_trajectory(cfg)?;
    let cps = traj.checkpoints();
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(["scheme", "N", "value_re", "value_im", "oscillation"])
        .map_err(csv_err)?;
    for i in 0..cps.len() {
        let prefix = AverageTrajectory::new(traj.scheme, cps[..=i].to_vec())?;
        let osc = match convergence_diagnostic(&prefix, a.tail_fraction) {
            Ok(d) => format_real(d.oscillation),
            Err(Error::InsufficientCheckpoints { .. }) => String::new(),
            Err(e) => return Err(e),
        };
        let (n, v) = cps[i];
        w.write_record([
            traj.scheme.to_string(),
            n.to_string(),
            format_real(v.re),
            format_real(v.im),
            osc,
        ])
        .map_err(csv_err)?;
    }
    let diag = match convergence_diagnostic(&traj, a.tail_fraction) {
        Ok(d) => Some(d),
        Err(Error::InsufficientCheckpoints { .. }) => None,
        Err(e) => return Err(e),
    };
    let summary = AverageSummary {
        scheme: traj.scheme,
        last: complex_pair(traj.last().expect("nonempty trajectory")),
        oscillation: diag.map(|d| d.oscillation),
        tail_len: diag.map(|d| d.tail_len),
        period: traj.period,
        tolerance: a.tolerance,
        converged: diag.map(|d| d.converged(a.tolerance)),
    };
    Ok(vec![
        Artifact {
            name: "average.csv".into(),
            bytes: w.into_inner().map_err(|e| Error::Parse(e.to_string()))?,
        },
        Artifact::json("average_summary.json", &summary)?,
    ])
}

#[derive(Serialize)]
struct SeminormReport {
    order: u32,
    value: f64,
    #[serde(rename = "H")]
    h: u64,
    #[serde(rename = "N")]
    n: u64,
    exact: bool,
    system: BTreeMap<String, String>,
    observable: String,
}

fn seminorm(cfg: &ExperimentConfig) -> Result<Vec<Artifact>> {
    let s = cfg.seminorm.as_ref().ok_or_else(|| missing("seminorm"))?;
    if cfg.observables.is_empty() {
        return Err(Error::InvalidArgument("[observables] is empty".into()));
    }
    let method = match s.method {
        SeminormMode::Exact => SeminormMethod::Exact,
        SeminormMode::MonteCarlo => SeminormMethod::MonteCarlo {
            seed: cfg.require_seed("Monte Carlo seminorm")?,
        },
        SeminormMode::Auto => SeminormMethod::Auto {
            seed: cfg.require_seed("seminorm with Monte Carlo fallback")?,
        },
    };
    let reports = cfg
        .observables
        .iter()
        .map(|f| {
            let est = hk_seminorm(&cfg.system, f, s.order, s.h, s.n, method)?;
            Ok(SeminormReport {
                order: est.order,
                value: est.value,
                h: est.h,
                n: est.n,
                exact: est.exact,
                system: system_pairs(&cfg.system),
                observable: crate::config::observable_literal(f),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(vec![Artifact::json("seminorm.json", &reports)?])
}

#[derive(Serialize)]
struct VdcOutput {
    family: String,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "H")]
    h: usize,
    alpha: f64,
    lhs: f64,
    rhs: f64,
    margin: f64,
    finite_size_violation: bool,
}

fn vdc(cfg: &ExperimentConfig) -> Result<Vec<Artifact>> {
    let v = cfg.vdc.as_ref().ok_or_else(|| missing("vdc"))?;
    let seq = vdc_sequence(v.family, v.alpha, v.n + v.h)?;
    let r = van_der_corput_check(&seq, v.h)?;
    Ok(vec![Artifact::json(
        "vdc.json",
        &VdcOutput {
            family: v.family.to_string(),
            n: v.n,
            h: v.h,
            alpha: v.alpha,
            lhs: r.lhs,
            rhs: r.rhs,
            margin: r.margin,
            finite_size_violation: r.margin < -v.epsilon,
        },
    )?])
}

#[derive(Serialize)]
struct OracleSummary {
    radius: u32,
    characters: usize,
    max_error: f64,
}

#[derive(Serialize)]
struct JoiningOutput {
    d: usize,
    starts: usize,
    #[serde(rename = "N")]
    n: u64,
    seed: u64,
    barycenter: [f64; 2],
    fiber_mean: [f64; 2],
    gap: f64,
    dispersion: f64,
    oracle: Option<OracleSummary>,
}

fn joining(cfg: &ExperimentConfig) -> Result<Vec<Artifact>> {
    let j = cfg.joining.as_ref().ok_or_else(|| missing("joining"))?;
    let seed = cfg.require_seed("joining")?;
    if cfg.observables.len() < j.d {
        return Err(Error::ArityMismatch {
            expected: j.d,
            got: cfg.observables.len(),
        });
    }
    let fs = &cfg.observables[..j.d];
    let report = decomposition_consistency(&cfg.system, j.starts, j.n, fs, seed)?;
    let is_circle_rotation = cfg.system.kind_name() == "rotation" && cfg.system.dimension() == 1;
    let needs_cloud = is_circle_rotation || j.dump;
    let cloud = if needs_cloud {
        Some(empirical_self_joining(
            &cfg.system,
            j.d,
            j.starts,
            j.n,
            &mut RngState::from_seed(seed),
        )?)
    } else {
        None
    };
    let oracle = match (&cloud, is_circle_rotation) {
        (Some(m), true) => {
            let profile = character_box_profile(m, j.radius)?;
            let max_error = profile
                .iter()
                .map(|(k, v)| (v - ap_subtorus_integral(k)).norm())
                .fold(0.0, f64::max);
            Some(OracleSummary {
                radius: j.radius,
                characters: profile.len(),
                max_error,
            })
        }
        _ => None,
    };
    let mut out = vec![Artifact::json(
        "joining.json",
        &JoiningOutput {
            d: j.d,
            starts: j.starts,
            n: j.n,
            seed,
            barycenter: complex_pair(report.barycenter),
            fiber_mean: complex_pair(report.fiber_mean),
            gap: report.gap,
            dispersion: report.dispersion,
            oracle,
        },
    )?];
    if let (true, Some(m)) = (j.dump, &cloud) {
        let mut bytes = Vec::new();
        m.write_binary(&mut bytes)
            .map_err(|e| Error::Parse(e.to_string()))?;
        out.push(Artifact {
            name: "joining.bin".into(),
            bytes,
        });
    }
    Ok(out)
}

#[derive(Serialize)]
struct CertificateOutput {
    system: BTreeMap<String, String>,
    verdict: String,
    witness: String,
    search_bound: u64,
    relation: Option<Vec<i64>>,
}

fn certify(cfg: &ExperimentConfig) -> Result<Vec<Artifact>> {
    let bound = cfg.certify_bound.ok_or_else(|| missing("certify"))?;
    let c = ergodicity_certificate(&cfg.system, bound);
    Ok(vec![Artifact::json(
        "certificate.json",
        &CertificateOutput {
            system: system_pairs(&c.system),
            verdict: c.verdict.to_string(),
            witness: c.witness,
            search_bound: c.search_bound,
            relation: c.relation,
        },
    )?])
}
