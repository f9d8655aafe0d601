//! Experiment configuration: `[section]` headers followed by `key = value`
//! lines, `#` comments. Reals are written with 17 significant digits, so
//! `parse(serialize(c)) == c` holds bit for bit.
//!
//! ```text
//! [system]
//! kind = rotation
//! alpha = 6.1803398874989490e-1
//!
//! [observables]
//! f1 = 1,0:2
//! f2 = 1,0:-1
//!
//! [run]
//! seed = 42
//! x = 2.5e-1
//! tasks = average
//!
//! [average]
//! scheme = linear
//! checkpoints = 1000, 10000, 100000
//! ```

use multierg::averaging::Scheme;
use multierg::seminorms::VdcFamily;
use multierg::systems::text::{
    format_real, format_reals, parse_key_values, parse_real, parse_reals,
};
use multierg::{DynamicalSystem, Error, Observable, Result};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    Orbit,
    Average,
    Seminorm,
    Vdc,
    Joining,
    Certify,
}

impl Task {
    pub const ALL: [Task; 6] = [
        Task::Orbit,
        Task::Average,
        Task::Seminorm,
        Task::Vdc,
        Task::Joining,
        Task::Certify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::Orbit => "orbit",
            Task::Average => "average",
            Task::Seminorm => "seminorm",
            Task::Vdc => "vdc",
            Task::Joining => "joining",
            Task::Certify => "certify",
        }
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown task {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMethod {
    /// Stream orbits.
    Stream,
    /// Closed forms; translations only.
    Closed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AverageConfig {
    pub scheme: Scheme,
    pub checkpoints: Vec<u64>,
    pub tail_fraction: f64,
    pub tolerance: f64,
    pub method: EvalMethod,
    /// Dimension of the cube; only for `scheme = cube`.
    pub cube_dim: Option<usize>,
    /// `(a, b)` for the pair `(T^a, T^b)`; only for `scheme = folner`.
    pub folner_powers: Option<(u32, u32)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeminormMode {
    Exact,
    MonteCarlo,
    Auto,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeminormConfig {
    pub order: u32,
    pub h: u64,
    pub n: u64,
    pub method: SeminormMode,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VdcConfig {
    pub family: VdcFamily,
    pub n: usize,
    pub h: usize,
    pub alpha: f64,
    /// Margins below `-epsilon` are flagged as finite-size violations.
    pub epsilon: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JoiningConfig {
    pub d: usize,
    pub starts: usize,
    pub n: u64,
    pub radius: u32,
    pub dump: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub system: DynamicalSystem,
    pub observables: Vec<Observable>,
    pub seed: Option<u64>,
    pub start: Option<Vec<f64>>,
    pub tasks: Vec<Task>,
    pub average: Option<AverageConfig>,
    pub seminorm: Option<SeminormConfig>,
    pub vdc: Option<VdcConfig>,
    pub joining: Option<JoiningConfig>,
    pub orbit_steps: Option<u64>,
    pub certify_bound: Option<u64>,
    pub output_dir: Option<PathBuf>,
}

/// Keys of one section, consumed as they are read.
struct Section {
    name: String,
    map: BTreeMap<String, String>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<String> {
        self.map.remove(key)
    }

    fn require(&mut self, key: &str) -> Result<String> {
        self.take(key)
            .ok_or_else(|| Error::Parse(format!("[{}] missing key {key}", self.name)))
    }

    fn parsed<T: FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.take(key)
            .map(|v| {
                v.trim()
                    .parse()
                    .map_err(|e| Error::Parse(format!("[{}] {key} = {v:?}: {e}", self.name)))
            })
            .transpose()
    }

    fn required<T: FromStr>(&mut self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let name = self.name.clone();
        self.parsed(key)?
            .ok_or_else(|| Error::Parse(format!("[{name}] missing key {key}")))
    }

    fn real(&mut self, key: &str, default: f64) -> Result<f64> {
        self.take(key).map_or(Ok(default), |v| parse_real(&v))
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().next() {
            Some(k) => Err(Error::Parse(format!("[{}] unknown key {k}", self.name))),
            None => Ok(()),
        }
    }
}

fn split_sections(text: &str) -> Result<BTreeMap<String, Section>> {
    let mut bodies: Vec<(String, String)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            bodies.push((name.trim().to_string(), String::new()));
        } else if !line.is_empty() {
            let (_, body) = bodies.last_mut().ok_or_else(|| {
                Error::Parse(format!("line {}: key outside a section", lineno + 1))
            })?;
            body.push_str(line);
            body.push('\n');
        }
    }
    let mut out = BTreeMap::new();
    for (name, body) in bodies {
        let map = parse_key_values(&body).map_err(|e| Error::Parse(format!("[{name}] {e}")))?;
        let section = Section {
            name: name.clone(),
            map,
        };
        if out.insert(name.clone(), section).is_some() {
            return Err(Error::Parse(format!("duplicate section [{name}]")));
        }
    }
    Ok(out)
}

fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|e| Error::Parse(format!("list item {v:?}: {e}")))
        })
        .collect()
}

fn parse_bool(s: &str) -> Result<bool> {
    match s.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(Error::Parse(format!(
            "expected true or false, got {other:?}"
        ))),
    }
}

/// Observable literal with every coefficient at 17 significant digits.
pub fn observable_literal(f: &Observable) -> String {
    if f.is_empty() {
        let zeros = vec!["0"; f.dim()].join(",");
        return format!("0,0:{zeros}");
    }
    f.terms()
        .iter()
        .map(|t| {
            let k: Vec<String> = t.freq.iter().map(i64::to_string).collect();
            format!(
                "{},{}:{}",
                format_real(t.coeff.re),
                format_real(t.coeff.im),
                k.join(",")
            )
        })
        .collect::<Vec<_>>()
        .join(";")
}

impl ExperimentConfig {
    /// A configuration with only a system; every section optional.
    pub fn new(system: DynamicalSystem) -> Self {
        Self {
            system,
            observables: Vec::new(),
            seed: None,
            start: None,
            tasks: Vec::new(),
            average: None,
            seminorm: None,
            vdc: None,
            joining: None,
            orbit_steps: None,
            certify_bound: None,
            output_dir: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut sections = split_sections(text)?;
        let mut take = |name: &str| sections.remove(name);

        let mut sys =
            take("system").ok_or_else(|| Error::Parse("missing [system] section".into()))?;
        let system = DynamicalSystem::from_pairs(&sys.map, "")?;
        sys.map.clear();
        let mut cfg = Self::new(system);

        if let Some(mut obs) = take("observables") {
            let mut i = 1;
            while let Some(lit) = obs.take(&format!("f{i}")) {
                let f: Observable = lit.parse()?;
                f.check_for(&cfg.system)?;
                cfg.observables.push(f);
                i += 1;
            }
            obs.finish()?;
        }

        if let Some(mut run) = take("run") {
            cfg.seed = run.parsed("seed")?;
            cfg.start = run.take("x").map(|v| parse_reals(&v)).transpose()?;
            cfg.tasks = run
                .take("tasks")
                .map(|v| parse_list(&v))
                .transpose()?
                .unwrap_or_default();
            run.finish()?;
        }

        if let Some(mut s) = take("average") {
            let method = match s.take("method").as_deref().map(str::trim) {
                None | Some("stream") => EvalMethod::Stream,
                Some("closed") => EvalMethod::Closed,
                Some(other) => {
                    return Err(Error::Parse(format!("[average] unknown method {other:?}")))
                }
            };
            let powers: Option<Vec<u32>> = s
                .take("folner_powers")
                .map(|v| parse_list(&v))
                .transpose()?;
            let folner_powers = match powers.as_deref() {
                None => None,
                Some([a, b]) => Some((*a, *b)),
                Some(_) => {
                    return Err(Error::Parse(
                        "[average] folner_powers needs two integers".into(),
                    ))
                }
            };
            cfg.average = Some(AverageConfig {
                scheme: s.required("scheme")?,
                checkpoints: parse_list(&s.require("checkpoints")?)?,
                tail_fraction: s.real("tail_fraction", 0.5)?,
                tolerance: s.real("tolerance", 1e-2)?,
                method,
                cube_dim: s.parsed("cube_dim")?,
                folner_powers,
            });
            s.finish()?;
        }

        if let Some(mut s) = take("seminorm") {
            let method = match s.require("method")?.trim() {
                "exact" => SeminormMode::Exact,
                "monte-carlo" => SeminormMode::MonteCarlo,
                "auto" => SeminormMode::Auto,
                other => return Err(Error::Parse(format!("[seminorm] unknown method {other:?}"))),
            };
            cfg.seminorm = Some(SeminormConfig {
                order: s.required("order")?,
                h: s.required("H")?,
                n: s.parsed("N")?.unwrap_or(0),
                method,
            });
            s.finish()?;
        }

        if let Some(mut s) = take("vdc") {
            cfg.vdc = Some(VdcConfig {
                family: s.required("family")?,
                n: s.required("N")?,
                h: s.required("H")?,
                alpha: s.real("alpha", multierg::systems::golden())?,
                epsilon: s.real("epsilon", 1e-3)?,
            });
            s.finish()?;
        }

        if let Some(mut s) = take("joining") {
            cfg.joining = Some(JoiningConfig {
                d: s.required("d")?,
                starts: s.required("starts")?,
                n: s.required("N")?,
                radius: s.parsed("radius")?.unwrap_or(3),
                dump: s.take("dump").map_or(Ok(false), |v| parse_bool(&v))?,
            });
            s.finish()?;
        }

        if let Some(mut s) = take("orbit") {
            cfg.orbit_steps = Some(s.required("steps")?);
            s.finish()?;
        }

        if let Some(mut s) = take("certify") {
            cfg.certify_bound = Some(s.required("bound")?);
            s.finish()?;
        }

        if let Some(mut s) = take("output") {
            cfg.output_dir = s.take("dir").map(PathBuf::from);
            s.finish()?;
        }

        if let Some(name) = sections.keys().next() {
            return Err(Error::Parse(format!("unknown section [{name}]")));
        }
        Ok(cfg)
    }

    /// Canonical text; defaults are written out explicitly.
    pub fn serialize(&self) -> String {
        let mut out = String::from("[system]\n");
        for (k, v) in self.system.to_pairs("") {
            writeln!(out, "{k} = {v}").unwrap();
        }
        if !self.observables.is_empty() {
            out.push_str("\n[observables]\n");
            for (i, f) in self.observables.iter().enumerate() {
                writeln!(out, "f{} = {}", i + 1, observable_literal(f)).unwrap();
            }
        }
        if self.seed.is_some() || self.start.is_some() || !self.tasks.is_empty() {
            out.push_str("\n[run]\n");
            if let Some(seed) = self.seed {
                writeln!(out, "seed = {seed}").unwrap();
            }
            if let Some(x) = &self.start {
                writeln!(out, "x = {}", format_reals(x)).unwrap();
            }
            if !self.tasks.is_empty() {
                let names: Vec<_> = self.tasks.iter().map(|t| t.name()).collect();
                writeln!(out, "tasks = {}", names.join(", ")).unwrap();
            }
        }
        if let Some(a) = &self.average {
            let cps: Vec<String> = a.checkpoints.iter().map(u64::to_string).collect();
            write!(
                out,
                "\n[average]\nscheme = {}\ncheckpoints = {}\ntail_fraction = {}\ntolerance = {}\nmethod = {}\n",
                a.scheme,
                cps.join(", "),
                format_real(a.tail_fraction),
                format_real(a.tolerance),
                match a.method {
                    EvalMethod::Stream => "stream",
                    EvalMethod::Closed => "closed",
                }
            )
            .unwrap();
            if let Some(k) = a.cube_dim {
                writeln!(out, "cube_dim = {k}").unwrap();
            }
            if let Some((p, q)) = a.folner_powers {
                writeln!(out, "folner_powers = {p}, {q}").unwrap();
            }
        }
        if let Some(s) = &self.seminorm {
            let method = match s.method {
                SeminormMode::Exact => "exact",
                SeminormMode::MonteCarlo => "monte-carlo",
                SeminormMode::Auto => "auto",
            };
            write!(
                out,
                "\n[seminorm]\norder = {}\nH = {}\nN = {}\nmethod = {method}\n",
                s.order, s.h, s.n
            )
            .unwrap();
        }
        if let Some(v) = &self.vdc {
            write!(
                out,
                "\n[vdc]\nfamily = {}\nN = {}\nH = {}\nalpha = {}\nepsilon = {}\n",
                v.family,
                v.n,
                v.h,
                format_real(v.alpha),
                format_real(v.epsilon)
            )
            .unwrap();
        }
        if let Some(j) = &self.joining {
            write!(
                out,
                "\n[joining]\nd = {}\nstarts = {}\nN = {}\nradius = {}\ndump = {}\n",
                j.d, j.starts, j.n, j.radius, j.dump
            )
            .unwrap();
        }
        if let Some(steps) = self.orbit_steps {
            write!(out, "\n[orbit]\nsteps = {steps}\n").unwrap();
        }
        if let Some(bound) = self.certify_bound {
            write!(out, "\n[certify]\nbound = {bound}\n").unwrap();
        }
        if let Some(dir) = &self.output_dir {
            write!(out, "\n[output]\ndir = {}\n", dir.display()).unwrap();
        }
        out
    }

    /// The seed, or a validation error naming the experiment that needs it.
    pub fn require_seed(&self, what: &str) -> Result<u64> {
        self.seed.ok_or_else(|| {
            Error::InvalidArgument(format!("{what} is randomized and needs an explicit seed"))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = "
# every section
[system]
kind = cocycle
base.kind = rotation
base.alpha = 0.6180339887498949
cocycle.linear = 1
cocycle.offset = 0

[observables]
f1 = 1,0:1,1;0.1,0.2:0,-1
f2 = 0.5,0:2,0

[run]
seed = 7
x = 0.1, 0.2
tasks = average, seminorm, vdc, joining, orbit, certify

[average]
scheme = linear
checkpoints = 10, 100
method = stream

[seminorm]
order = 2
H = 10
method = auto
N = 100

[vdc]
family = quadratic
N = 1000
H = 10

[joining]
d = 2
starts = 4
N = 10
dump = true

[orbit]
steps = 5

[certify]
bound = 20

[output]
dir = results
";

    #[test]
    fn round_trip_is_identity() {
        let a = ExperimentConfig::parse(FULL).unwrap();
        let text = a.serialize();
        let b = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(a, b);
        assert_eq!(text, b.serialize());
        assert_eq!(a.tasks.len(), 6);
        assert_eq!(a.joining.as_ref().unwrap().radius, 3);
    }

    #[test]
    fn reals_keep_seventeen_digits() {
        let text = ExperimentConfig::parse(FULL).unwrap().serialize();
        assert!(text.contains("6.1803398874989490e-1"), "{text}");
        assert!(
            text.contains("1.0000000000000001e-1,2.0000000000000001e-1:0,-1"),
            "{text}"
        );
    }

    #[test]
    fn rejects_unknown_keys_and_sections() {
        let bad_key = FULL.replace("steps = 5", "steps = 5\nstep = 6");
        assert!(ExperimentConfig::parse(&bad_key).is_err());
        let bad_section = format!("{FULL}\n[plot]\nx = 1\n");
        assert!(ExperimentConfig::parse(&bad_section).is_err());
        assert!(ExperimentConfig::parse("kind = rotation").is_err());
    }

    #[test]
    fn observables_must_fit_the_system() {
        let text = "[system]\nkind = rotation\nalpha = 0.1\n[observables]\nf1 = 1,0:1,1\n";
        assert!(matches!(
            ExperimentConfig::parse(text),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn missing_seed_is_reported() {
        let cfg = ExperimentConfig::new(DynamicalSystem::golden_rotation());
        assert!(cfg.require_seed("joining").is_err());
    }
}
