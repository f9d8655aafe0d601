use multierg::averaging::linear_trajectory;
use multierg::systems::text::parse_real;
use multierg_cli::config::ExperimentConfig;
use std::path::Path;
use std::process::{Command, Output};

const BASE: &str = "
[system]
kind = rotation
alpha = 6.1803398874989490e-1

[observables]
f1 = 1,0:2
f2 = 1,0:-1

[run]
x = 2.5e-1
";

fn multierg(dir: &Path, config: &str, args: &[&str]) -> Output {
    let path = dir.join("experiment.cfg");
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_multierg"))
        .args(args)
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join("out").join(name)).unwrap()
}

#[test]
fn square_schedule_gives_one_row_per_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{BASE}\n[average]\nscheme = square\ncheckpoints = 1000, 10000, 100000\nmethod = closed\ntail_fraction = 1\n");
    let out = multierg(dir.path(), &cfg, &["average"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = read(dir.path(), "average.csv");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "scheme,N,value_re,value_im,oscillation");
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("square,100000,"));
    // the whole trajectory is the tail; three points are needed
    assert!(lines[1].ends_with(','));
    assert!(!lines[3].ends_with(','));
}

#[test]
fn average_output_is_the_library_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{BASE}\n[average]\nscheme = linear\ncheckpoints = 10, 1000, 5000\n");
    let out = multierg(dir.path(), &cfg, &["average"]);
    assert!(out.status.success());
    let parsed = ExperimentConfig::parse(&cfg).unwrap();
    let x = parsed.system.point(parsed.start.as_ref().unwrap()).unwrap();
    let traj =
        linear_trajectory(&parsed.system, &parsed.observables, &x, &[10, 1000, 5000]).unwrap();
    let csv = read(dir.path(), "average.csv");
    for (line, (n, v)) in csv.lines().skip(1).zip(traj.checkpoints()) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[1], n.to_string());
        assert_eq!(parse_real(cols[2]).unwrap(), v.re);
        assert_eq!(parse_real(cols[3]).unwrap(), v.im);
    }
}

#[test]
fn identical_configs_give_identical_bytes() {
    let cfg = format!(
        "{BASE}
[run]
seed = 99
x = 2.5e-1
tasks = orbit, average, seminorm, vdc, joining, certify

[average]
scheme = linear
checkpoints = 100, 200, 400, 800

[seminorm]
order = 2
H = 20
N = 50
method = monte-carlo

[vdc]
family = quadratic
N = 2000
H = 20

[joining]
d = 2
starts = 20
N = 50
dump = true

[orbit]
steps = 10

[certify]
bound = 30
"
    )
    .replacen("[run]\nx = 2.5e-1\n", "", 1);
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = multierg(dir.path(), &cfg, &["run", "--threads", "2"]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let names = [
        "orbit.csv",
        "average.csv",
        "average_summary.json",
        "seminorm.json",
        "vdc.json",
        "joining.json",
        "joining.bin",
        "certificate.json",
        "summary.txt",
    ];
    for name in names {
        let x = std::fs::read(a.path().join("out").join(name)).unwrap();
        let y = std::fs::read(b.path().join("out").join(name)).unwrap();
        assert!(!x.is_empty() && x == y, "{name}");
    }
    let seminorm: serde_json::Value =
        serde_json::from_str(&read(a.path(), "seminorm.json")).unwrap();
    assert_eq!(seminorm[0]["order"], 2);
    assert_eq!(seminorm[0]["exact"], false);
    assert_eq!(seminorm[0]["system"]["kind"], "rotation");
}

#[test]
fn cube_dimension_five_is_a_resource_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{BASE}\n[average]\nscheme = cube\ncube_dim = 5\ncheckpoints = 10\n");
    let out = multierg(dir.path(), &cfg, &["average"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn validation_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let no_seed = format!("{BASE}\n[joining]\nd = 2\nstarts = 3\nN = 10\n");
    let out = multierg(dir.path(), &no_seed, &["joining"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));

    let out = multierg(
        dir.path(),
        &format!("{BASE}\n[orbit]\nsteps = 3\nspeed = 1\n"),
        &["orbit"],
    );
    assert_eq!(out.status.code(), Some(2));

    let out = multierg(dir.path(), BASE, &["vdc"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_flag_supplies_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{BASE}\n[joining]\nd = 2\nstarts = 10\nN = 100\n");
    let out = multierg(dir.path(), &cfg, &["joining", "--seed", "5"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "joining.json")).unwrap();
    assert_eq!(report["seed"], 5);
    assert_eq!(report["gap"], 0.0);
    assert_eq!(report["oracle"]["characters"], 49);
}

#[test]
fn certify_reports_a_relation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[system]\nkind = rotation\nalpha = 0.5\n[certify]\nbound = 10\n";
    let out = multierg(dir.path(), cfg, &["certify"]);
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "certificate.json")).unwrap();
    assert_eq!(report["verdict"], "non-ergodic");
    assert_eq!(report["relation"][0], 2);
}

#[test]
fn orbit_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = multierg(
        dir.path(),
        &format!("{BASE}\n[orbit]\nsteps = 3\n"),
        &["orbit"],
    );
    assert!(out.status.success());
    let csv = read(dir.path(), "orbit.csv");
    assert_eq!(csv.lines().count(), 5);
    assert!(csv
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("0,2.5000000000000000e-1"));
}

#[test]
fn folner_suite_passes() {
    let out = Command::new(env!("CARGO_BIN_EXE_multierg"))
        .args(["suite", "folner"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("criterion 9 [PASS]"), "{text}");
    let out = Command::new(env!("CARGO_BIN_EXE_multierg"))
        .args(["suite", "nonsense"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
