use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_c0ip"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("c0ip-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn list_names_registered_strategies() {
    let out = bin().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["regular", "chevron", "crisscross", "unionjack", "equilateral", "delaunay", "direct", "iterative"] {
        assert!(text.contains(name), "{name} missing from {text}");
    }
}

#[test]
fn study_writes_table_and_dumps() {
    let dir = scratch("study");
    let out = bin()
        .args(["study", "--pattern", "crisscross", "--degree", "2", "--n", "4,8", "--solver", "iterative"])
        .arg("--out")
        .arg(dir.join("t.csv"))
        .arg("--dump-solution")
        .arg(dir.join("u.txt"))
        .arg("--dump-matrix")
        .arg(dir.join("a.txt"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(dir.join("t.csv")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "inv_h,He0,He0_order,Hre0,Hre0_order,HreInf,HreInf_order");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("4,") && lines[2].starts_with("8,"));
    assert!(std::fs::read_to_string(dir.join("u.txt")).unwrap().starts_with("dofs "));
    assert!(std::fs::metadata(dir.join("a.txt")).unwrap().len() > 0);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn study_rejects_bad_input() {
    for args in [
        vec!["study", "--n", "16,24"],
        vec!["study", "--pattern", "hexagonal", "--n", "4"],
        vec!["study", "--degree", "5"],
        vec!["study", "--solver", "gmres", "--n", "4"],
    ] {
        let out = bin().args(&args).output().unwrap();
        assert!(!out.status.success(), "{args:?} should fail");
    }
}

#[test]
fn adaptive_writes_records_and_meshes() {
    let dir = scratch("adaptive");
    let out = bin()
        .args(["adaptive", "--theta", "0.5", "--max-dofs", "600", "--dump-mesh-every", "2"])
        .arg("--out")
        .arg(dir.join("ad.csv"))
        .arg("--mesh-dir")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("h_eff = dofs^(-1/2)"));
    let csv = std::fs::read_to_string(dir.join("ad.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("iter,dofs,eta_total,h2_error,kappa"));
    assert!(csv.lines().count() >= 3);
    for f in ["mesh_initial.txt", "mesh_final.txt", "mesh_000.txt"] {
        assert!(dir.join(f).exists(), "{f}");
    }
    let initial = std::fs::read_to_string(dir.join("mesh_initial.txt")).unwrap();
    assert!(initial.starts_with("vertices 65 triangles 96"));
    std::fs::remove_dir_all(dir).ok();
}
