#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hanflab::invariance::{MIN_ADJACENT_MAX, SIGMA_CONN};
use hanflab::Structure;
use tempfile::TempDir;

pub const TRIANGLE: &str = "exists x. exists y. exists z. (E(x,y) & E(y,z) & E(z,x))";

/// Structure and formula files in a scratch directory.
pub struct Fixtures {
    dir: TempDir,
}

impl Fixtures {
    pub fn new() -> Self {
        let dir = tempfile::tempdir().expect("scratch directory");
        let c44 = Structure::cycle(4).disjoint_union(&Structure::cycle(4)).unwrap();
        let structures = [
            ("c3.json", Structure::cycle(3)),
            ("c7.json", Structure::cycle(7)),
            ("c10.json", Structure::cycle(10)),
            ("c44.json", c44),
            ("p3.json", Structure::path(3)),
            ("k4.json", Structure::complete(4)),
        ];
        for (name, s) in structures {
            std::fs::write(dir.path().join(name), s.to_json()).unwrap();
        }
        let formulas = [
            ("tri.fo", TRIANGLE.to_string()),
            (
                "mm.fo",
                format!("# least element adjacent to greatest\n{MIN_ADJACENT_MAX}\n"),
            ),
            ("conn.fo", SIGMA_CONN.to_string()),
            ("deg.fo", "exists y. E(x,y)".to_string()),
        ];
        for (name, f) in formulas {
            std::fs::write(dir.path().join(name), f).unwrap();
        }
        std::fs::write(
            dir.path().join("conn.json"),
            format!(r#"{{"scheme":"traversal","sentence":"{SIGMA_CONN}","class":"graphs"}}"#),
        )
        .unwrap();
        std::fs::write(
            dir.path().join("broken.json"),
            r#"{"universe":2,"relations":{"E":[[0,5]]}}"#,
        )
        .unwrap();
        Fixtures { dir }
    }

    pub fn dir(&self) -> &Path {
        self.dir.path()
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

/// Runs the binary inside the fixture directory.
pub fn hanflab(fx: &Fixtures, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hanflab"))
        .args(args)
        .current_dir(fx.dir())
        .output()
        .expect("binary runs")
}

pub fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

/// Every JSON-mode invocation of the suite, with its expected exit code.
pub const JSON_INVOCATIONS: &[(&[&str], i32)] = &[
    (&["structure", "validate", "c44.json"], 0),
    (&["structure", "validate", "broken.json"], 1),
    (&["structure", "gaifman", "c7.json"], 0),
    (&["structure", "census", "c44.json", "--r", "1"], 0),
    (&["fo", "parse", "--formula-file", "mm.fo"], 0),
    (&["fo", "eval", "c3.json", "--formula-file", "tri.fo"], 0),
    (&["fo", "eval", "p3.json", "--formula-file", "tri.fo"], 1),
    (
        &["fo", "eval", "p3.json", "--formula-file", "deg.fo", "--assign", "x=1"],
        0,
    ),
    (&["fo", "rank", "--formula-file", "mm.fo"], 0),
    (&["fo", "localize", "--formula-file", "deg.fo", "--r", "1"], 0),
    (&["ef", "compare", "c7.json", "c44.json", "--q", "2"], 0),
    (&["ef", "demo", "--q", "2", "--m-min", "3", "--m-max", "6"], 0),
    (&["hanf", "compare", "c7.json", "c44.json", "--r", "1", "--t", "7"], 0),
    (&["hanf", "compare", "c7.json", "c44.json", "--r", "1", "--t", "8"], 1),
    (&["hanf", "compare", "c7.json", "c44.json", "--full"], 1),
    (&["present", "enumerate", "p3.json", "--scheme", "traversal"], 0),
    (
        &[
            "present",
            "check",
            "localization",
            "--scheme",
            "circular-successor",
            "--corpus",
            "upto:4",
        ],
        1,
    ),
    (
        &[
            "present",
            "check",
            "amalgamation",
            "--scheme",
            "local-order",
            "--corpus",
            "upto:4",
        ],
        0,
    ),
    (
        &[
            "present", "check", "nbbound", "--scheme", "linear", "--corpus", "upto:4", "--nu", "2",
        ],
        1,
    ),
    (
        &[
            "invariance",
            "check",
            "--scheme",
            "linear",
            "--formula-file",
            "mm.fo",
            "--corpus",
            "all:3",
        ],
        1,
    ),
    (
        &[
            "invariance",
            "check",
            "--scheme",
            "traversal",
            "--formula-file",
            "conn.fo",
            "--corpus",
            "upto:4",
        ],
        0,
    ),
    (&["invariance", "eval", "c44.json", "--query-file", "conn.json"], 1),
    (
        &[
            "invariance",
            "eval",
            "k4.json",
            "--scheme",
            "linear",
            "--formula-file",
            "mm.fo",
        ],
        0,
    ),
    (
        &[
            "lab",
            "locality",
            "--formula-file",
            "tri.fo",
            "--corpus",
            "upto:5",
            "--r",
            "1",
            "--t",
            "1",
        ],
        0,
    ),
    (
        &[
            "lab",
            "locality",
            "--formula-file",
            "conn.fo",
            "--scheme",
            "traversal",
            "--corpus",
            "random:d=2,n=8,count=12,seed=3",
            "--r",
            "1",
            "--t",
            "2",
        ],
        1,
    ),
    (&["lab", "minimal", "--formula-file", "tri.fo", "--corpus", "upto:5"], 0),
    (&["lab", "scatter", "c10.json", "--r", "1"], 0),
    (
        &[
            "lab",
            "wideness",
            "--corpus",
            "cycles-paths:8",
            "--r",
            "1",
            "--p",
            "4",
            "--q",
            "1",
        ],
        0,
    ),
    (&["lab", "gen", "--corpus", "random:d=3,n=9,count=4,seed=7"], 0),
    (&["fo", "eval", "missing.json", "--formula", "true"], 2),
    (&["fo", "eval", "c3.json", "--formula", "exists x. R(x)"], 2),
    (&["lab", "gen", "--corpus", "nonsense:3"], 2),
    (&["present", "enumerate", "p3.json", "--scheme", "nope"], 2),
    (&["hanf", "compare", "c7.json"], 2),
];

/// Runs one invocation in JSON mode with the given worker count.
pub fn json_run(fx: &Fixtures, args: &[&str], workers: usize) -> Output {
    let workers = workers.to_string();
    let mut full = vec!["--json", "--workers", workers.as_str()];
    full.extend_from_slice(args);
    hanflab(fx, &full)
}
