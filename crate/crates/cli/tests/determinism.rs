//! Criterion 9: two runs of the full CLI suite with the same seed produce
//! byte-identical artifacts.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_pharmonic")
}

/// Run one command with `--out .` inside `dir`; inputs are referenced with
/// relative paths so the artifacts cannot depend on the directory name.
fn run_in(dir: &Path, args: &[&str]) {
    let status = Command::new(bin())
        .current_dir(dir)
        .args(args)
        .args(["--out", ".", "--seed", "7"])
        .status()
        .expect("spawn CLI");
    assert!(status.success(), "command {:?} failed in {:?}", args, dir);
}

fn full_suite(dir: &Path) {
    run_in(dir, &["beta", "--p", "3", "--k", "1..3"]);
    run_in(dir, &["omega", "--p", "3", "--k", "2", "--m", "256"]);
    run_in(
        dir,
        &["assemble", "--field", r#"{"kind":"chi","axis":1,"n":2}"#, "--samples", "50"],
    );
    run_in(
        dir,
        &[
            "residual",
            "--field",
            r#"{"kind":"separable-2d","p":3.0,"k":2,"m":1024}"#,
            "--p",
            "3",
            "--samples",
            "25",
        ],
    );
    run_in(dir, &["spherical", "--p", "2", "--k", "1", "--samples", "10"]);
    run_in(
        dir,
        &["limits", "--field", r#"{"kind":"ball-interior","n":2,"a":[1.0,0.0]}"#],
    );
    run_in(
        dir,
        &["reflectcheck", "--geometry", r#"{"kind":"unit-disk"}"#, "--p", "2", "--samples", "30"],
    );
    run_in(
        dir,
        &[
            "solve",
            "--geometry",
            r#"{"kind":"sector","angle":1.5707963267948966}"#,
            "--p",
            "4",
            "--h",
            "0.15",
            "--bc",
            "separable:4:2",
        ],
    );
    run_in(
        dir,
        &["fundamental", "--a", "1,0", "--epsilons", "0.3,0.15", "--h", "0.1"],
    );
    run_in(
        dir,
        &[
            "render",
            "--field",
            r#"{"kind":"ball-interior","n":2,"a":[1.0,0.0]}"#,
            "--window",
            "-1.05,-1.05,1.05,1.05",
            "--grid",
            "48",
            "--name",
            "kernel.svg",
        ],
    );
    run_in(
        dir,
        &["render", "--mesh", "mesh.json", "--solution", "solution.csv", "--name", "sector.svg"],
    );
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let entry = entry.unwrap();
        if entry.file_type().unwrap().is_file() {
            out.insert(
                entry.file_name().to_string_lossy().into_owned(),
                std::fs::read(entry.path()).unwrap(),
            );
        }
    }
    out
}

#[test]
fn criterion_9_determinism() {
    let base = std::env::temp_dir().join(format!("pharmonic-det-{}", std::process::id()));
    let dir_a = base.join("a");
    let dir_b = base.join("b");
    std::fs::create_dir_all(&dir_a).unwrap();
    std::fs::create_dir_all(&dir_b).unwrap();

    full_suite(&dir_a);
    full_suite(&dir_b);

    let snap_a = snapshot(&dir_a);
    let snap_b = snapshot(&dir_b);
    assert_eq!(
        snap_a.keys().collect::<Vec<_>>(),
        snap_b.keys().collect::<Vec<_>>(),
        "artifact sets differ"
    );
    let mut identical = 0;
    for (name, bytes) in &snap_a {
        assert_eq!(bytes, &snap_b[name], "artifact {name} differs between runs");
        identical += 1;
    }
    assert!(identical >= 20, "expected a full artifact set, got {identical}");
    println!("[criterion 9] determinism: PASS ({identical} artifacts byte-identical across two seeded runs)");

    std::fs::remove_dir_all(&base).ok();
}
