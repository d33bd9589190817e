use std::process::Command;

fn nangle() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_nangle"));
    c.env_remove("NANGLE_PRIME");
    c
}

#[test]
fn gen_complete_cone_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let pair = dir.path().join("pair.txt");
    let comp = dir.path().join("comp.txt");
    assert!(nangle()
        .args(["gen", "--kind", "pair", "--n", "5", "--seed", "8", "--out"])
        .arg(&pair)
        .status()
        .unwrap()
        .success());
    assert!(nangle()
        .args(["complete", "--in"])
        .arg(&pair)
        .arg("--out")
        .arg(&comp)
        .status()
        .unwrap()
        .success());
    let out = nangle().args(["cone", "--in"]).arg(&comp).output().unwrap();
    assert!(out.status.success());
    let doc = nangle_core::text::parse(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(doc.seqs().count(), 1);
    assert!(doc.seqs().all(|(_, s)| s.is_exact()));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(nangle().args(["cone"]).status().unwrap().code(), Some(2));
    assert_eq!(
        nangle().args(["gen", "--n", "2"]).status().unwrap().code(),
        Some(2)
    );
    assert_eq!(
        nangle()
            .args(["gen", "--format", "jsonl"])
            .status()
            .unwrap()
            .code(),
        Some(2)
    );
    assert_eq!(
        nangle()
            .args(["gen", "--prime", "6"])
            .status()
            .unwrap()
            .code(),
        Some(2)
    );
    assert_eq!(
        nangle().args(["frobnicate"]).status().unwrap().code(),
        Some(2)
    );
}

#[test]
fn env_prime_is_overridden_by_flag() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut c = nangle();
        c.args(["gen", "--pieces", "0"]);
        if let Some(p) = env {
            c.env("NANGLE_PRIME", p);
        }
        if let Some(p) = flag {
            c.args(["--prime", p]);
        }
        String::from_utf8(c.output().unwrap().stdout).unwrap()
    };
    assert!(run(Some("7"), None).contains("prime 7"));
    assert!(run(Some("7"), Some("3")).contains("prime 3"));
    assert!(run(None, None).contains("prime 5"));
}

#[test]
fn octa_and_cluster_commands() {
    let dir = tempfile::tempdir().unwrap();
    for (kind, n, cmd) in [
        ("octa", "3", "octa"),
        ("octa", "6", "octa"),
        ("splice", "4", "cluster4"),
    ] {
        let input = dir.path().join(format!("{kind}{n}.txt"));
        assert!(nangle()
            .args(["gen", "--kind", kind, "--n", n, "--out"])
            .arg(&input)
            .status()
            .unwrap()
            .success());
        let out = nangle().arg(cmd).arg("--in").arg(&input).output().unwrap();
        assert!(
            out.status.success(),
            "{cmd} n={n}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}
