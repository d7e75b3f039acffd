use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ept_core::channels::depolarizing;
use ept_core::clifford::GateSpec;
use ept_core::oracle::{propagate, Instruction};

fn ept(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ept"));
    cmd.args(args).env_remove("EPT_DENSE_CAP");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn write(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path.to_str().unwrap().to_owned()
}

fn records(csv_text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let header = r.headers().unwrap().iter().map(str::to_owned).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(str::to_owned).collect())
        .collect();
    (header, rows)
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn run_trivial_circuits() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "empty.circ", "DIM 2\nQUDITS 1\n");
    assert_eq!(
        stdout(&ept(&["run", &empty], &[])),
        "r_1,s_1,probability\n0,0,1.0\n"
    );

    let dep = write(
        dir.path(),
        "dep.circ",
        "# full depolarizing\nDIM 2\nQUDITS 1\nDEP 1.0 q0\n",
    );
    let (_, rows) = records(&stdout(&ept(&["run", &dep], &[])));
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r[2].parse::<f64>().unwrap() == 0.25));
}

const DEMO: &str = "\
# three qutrits: gates, each followed by noise
DIM 3
QUDITS 3
F q0
DEP 0.02 q0
CX q0 q1
DEP 0.01 q0 q1
CZ^2 q1 q2
DEPX 0.05 q2
M 2 q2
DEPZ 0.03 q1
PAULI x1 z2 q0
";

#[test]
fn demo_circuit_matches_the_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "demo.circ", DEMO);
    let (header, rows) = records(&stdout(&ept(&["run", &path], &[])));
    assert_eq!(header.len(), 7);

    let m = 3;
    let ch = |f: f64, k: usize| depolarizing(f, m, k).unwrap();
    let axis = |f: f64, a| ept_core::axis_depolarizing(f, a, m).unwrap();
    let circuit = vec![
        Instruction::Gate(GateSpec::Fourier { qudit: 0 }),
        Instruction::Channel {
            table: ch(0.02, 1),
            qudits: vec![0],
        },
        Instruction::Gate(GateSpec::cx(0, 1, 1, m).unwrap()),
        Instruction::Channel {
            table: ch(0.01, 2),
            qudits: vec![0, 1],
        },
        Instruction::Gate(GateSpec::cz(1, 2, 2, m).unwrap()),
        Instruction::Channel {
            table: axis(0.05, ept_core::Axis::XOnly),
            qudits: vec![2],
        },
        Instruction::Gate(GateSpec::MultiplyBy {
            multiplier: 2,
            qudit: 2,
        }),
        Instruction::Channel {
            table: axis(0.03, ept_core::Axis::ZOnly),
            qudits: vec![1],
        },
        Instruction::Gate(GateSpec::Pauli {
            label: ept_core::PauliLabel::single(0, 1, 2, 3, m).unwrap(),
        }),
    ];
    let expected = propagate(m, 3, &circuit).unwrap();
    let mut total = 0.0;
    for row in &rows {
        let digits: Vec<u32> = row[..6].iter().map(|d| d.parse().unwrap()).collect();
        let p: f64 = row[6].parse().unwrap();
        assert!((p - expected.get(&digits).unwrap()).abs() < 1e-15);
        total += p;
    }
    assert!((total - 1.0).abs() < 1e-12);
    assert_eq!(rows.len(), expected.support_len());
}

#[test]
fn coset_reduction_from_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "bell.circ",
        "DIM 3\nQUDITS 2\nDEP 0.3 q1\nCOSET_REDUCE X1Z0@q0*X0Z1@q1 X0Z1@q0*X1Z0@q1\n",
    );
    let (header, rows) = records(&stdout(&ept(&["run", &path], &[])));
    assert_eq!(header.last().unwrap(), "probability");
    assert_eq!(rows.len(), 9);
    let total: f64 = rows
        .iter()
        .map(|r| r.last().unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn dense_cap_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "demo.circ", DEMO);
    let dense = stdout(&ept(&["run", &path], &[]));
    let sparse = stdout(&ept(&["run", &path], &[("EPT_DENSE_CAP", "16")]));
    let (_, dense) = records(&dense);
    let (_, sparse) = records(&sparse);
    assert_eq!(dense.len(), sparse.len());
    for (a, b) in dense.iter().zip(&sparse) {
        assert_eq!(a[..6], b[..6]);
        let (pa, pb): (f64, f64) = (a[6].parse().unwrap(), b[6].parse().unwrap());
        assert!((pa - pb).abs() < 1e-15);
    }
    let bad = ept(&["run", &path], &[("EPT_DENSE_CAP", "lots")]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(dir.path(), "broken.circ", "DIM 2\nQUDITS 1\nCX q0 q7\n");
    let out = ept(&["run", &broken], &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3, column 7"), "{err}");

    let qs: Vec<String> = (0..13).map(|q| format!("q{q}")).collect();
    let big = write(
        dir.path(),
        "big.circ",
        &format!("DIM 2\nQUDITS 13\nDEP 1.0 {}\n", qs.join(" ")),
    );
    assert_eq!(ept(&["run", &big], &[]).status.code(), Some(2));

    assert_eq!(
        ept(&["run", "/nonexistent/file"], &[]).status.code(),
        Some(1)
    );
}

#[test]
fn repeater_summary() {
    let dir = tempfile::tempdir().unwrap();
    let zero = write(
        dir.path(),
        "zero.toml",
        "modulus = 5\nstations = 4\ntransmission = 0\ngate = 0\nmeasurement = 0\nstorage = 0\n",
    );
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&ept(&["repeater", &zero], &[]))).unwrap();
    assert_eq!(json["fidelity"], 1.0);
    assert!((json["log_negativity"].as_f64().unwrap() - 5f64.log2()).abs() < 1e-12);
    assert!(json["P_distr"].is_null());

    let fig4 = write(
        dir.path(),
        "fig4.toml",
        "modulus = 5\nstations = 50\ntransmission = 0.05\ngate = 0.001\nmeasurement = 0.01\n\
         storage = 0.0001\ndistance = 3\n",
    );
    let csv_path = dir.path().join("fig4.csv");
    let out = ept(
        &["repeater", &fig4, "--csv", csv_path.to_str().unwrap()],
        &[],
    );
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let (header, rows) = records(&fs::read_to_string(&csv_path).unwrap());
    assert_eq!(header, ["r", "s", "probability"]);
    assert_eq!(rows.len(), 25);
    let total: f64 = rows.iter().map(|r| r[2].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9);
    assert_eq!(
        json["p00"].as_f64().unwrap(),
        rows[0][2].parse::<f64>().unwrap()
    );

    let fig5 = write(
        dir.path(),
        "fig5.toml",
        "modulus = 13\nstations = 2\ntransmission = 0\ngate = 0.001\nmeasurement = 0.01\n\
         storage = 0.0001\ndistance = 7\nk_max = 3\n",
    );
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&ept(&["repeater", &fig5], &[]))).unwrap();
    assert!((json["fidelity"].as_f64().unwrap() - (1.0 - 1e-5)).abs() < 1e-6);
    assert_eq!(json["P_distr"], 1.0);

    let bad = write(dir.path(), "bad.toml", "modulus = 5\nstations = 3\n");
    assert_eq!(ept(&["repeater", &bad], &[]).status.code(), Some(1));
}

#[test]
fn reproduce_tables() {
    let t2 = stdout(&ept(&["reproduce", "table2"], &[]));
    let (header, rows) = records(&t2);
    assert_eq!(header, ["k_max", "m", "alpha"]);
    assert_eq!(rows.len(), 50);
    let alpha: HashMap<(usize, usize), u64> = rows
        .iter()
        .map(|r| {
            (
                (r[0].parse().unwrap(), r[1].parse().unwrap()),
                r[2].parse().unwrap(),
            )
        })
        .collect();
    assert_eq!(alpha[&(2, 2)], 325);
    assert_eq!(alpha[&(4, 8)], 715);
    assert_eq!(alpha[&(3, 6)], 286);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table1.csv");
    stdout(&ept(
        &["reproduce", "table1", "--out", path.to_str().unwrap()],
        &[],
    ));
    let (_, rows) = records(&fs::read_to_string(&path).unwrap());
    let row: Vec<(u32, usize)> = rows
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap()))
        .collect();
    assert_eq!(row, ept_core::figures::TABLE1_PUBLISHED.to_vec());
}

#[test]
fn reproduce_figures() {
    let fig4 = stdout(&ept(&["reproduce", "fig4"], &[]));
    let (header, rows) = records(&fig4);
    assert_eq!(header, ["stations", "r", "s", "class", "probability"]);
    assert_eq!(rows.len(), 200 * 25);
    let mut sums: HashMap<String, f64> = HashMap::new();
    for r in &rows {
        *sums.entry(r[0].clone()).or_default() += r[4].parse::<f64>().unwrap();
        if r[0] == "200" {
            assert!((r[4].parse::<f64>().unwrap() - 0.04).abs() < 1e-3);
        }
    }
    assert!(sums.values().all(|s| (s - 1.0).abs() < 1e-9));

    let fig5 = stdout(&ept(&["reproduce", "fig5"], &[]));
    let (header, rows) = records(&fig5);
    assert_eq!(header, ["f", "scheme", "k_max", "fidelity", "p_distr"]);
    assert_eq!(rows.len(), 100 * 6);
    assert_eq!(rows[0][1], "unencoded");
    assert!(rows[1][2] == "0" && rows[1][4] == "1.0");
    assert_eq!(stdout(&ept(&["reproduce", "fig5"], &[])), fig5);
}

#[test]
fn reproduce_fig6() {
    let fig6 = stdout(&ept(&["reproduce", "fig6"], &[]));
    let (header, rows) = records(&fig6);
    assert_eq!(
        header,
        [
            "modulus",
            "distance",
            "physical",
            "log10_dim",
            "log_negativity",
            "prime"
        ]
    );
    assert_eq!(rows.len(), ept_core::figures::fig6_grid().len());
    for r in &rows {
        let m: u32 = r[0].parse().unwrap();
        let d: usize = r[1].parse().unwrap();
        let e: f64 = r[4].parse().unwrap();
        assert!(r[3].parse::<f64>().unwrap() <= 70.0 + 1e-9);
        assert!(e >= 0.0 && e <= (m as f64).log2() + 1e-9);
        assert_eq!(r[5] == "true", ept_core::modarith::is_prime(m));
        if [5, 13, 31].contains(&m) && [1, 2, 3, 4, 6].contains(&d) {
            assert!(e < 1e-12);
        }
    }
}

#[test]
fn verify_suites() {
    let out = stdout(&ept(&["verify", "--suite", "table2"], &[]));
    assert!(out.starts_with("PASS accepted configurations"));
    let out = stdout(&ept(&["verify", "--suite", "appendixB"], &[]));
    assert_eq!(out.lines().count(), 5);
    assert!(out.lines().all(|l| l.starts_with("PASS")));
    assert_eq!(
        ept(&["verify", "--suite", "nope"], &[]).status.code(),
        Some(2)
    );
}
