use std::path::Path;
use std::process::{Command, Output};

use esmin::io::parse_es;
use esmin::models::Kind;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_esmin")).args(args).current_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(dir: &tempfile::TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

#[test]
fn folding_verdicts_and_witnesses() {
    let yes = run(&["check-folding", "p0.es", "p2.es", "f02.map"]);
    assert_eq!(yes.status.code(), Some(0));
    assert!(stdout(&yes).starts_with("folding: yes"));
    let no = run(&["check-folding", "p0.es", "p1.es", "f01.map"]);
    assert_eq!(no.status.code(), Some(1));
    assert!(stdout(&no).contains("cannot match {a12} --b2-->"), "{}", stdout(&no));
}

#[test]
fn bisim_defaults_to_hhp() {
    let o = run(&["bisim", "p0.es", "p1.es"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("hhp-bisimilar: yes"));
    assert_eq!(run(&["bisim", "p0.es", "p1.es", "--hp"]).status.code(), Some(0));
    assert_eq!(run(&["bisim", "p0.es", "p7.es"]).status.code(), Some(1));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["validate", "missing.es"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = path(&dir, "bad.es");
    std::fs::write(&bad, "kind pes\nevent a a\nle a x\n").unwrap();
    let o = run(&["validate", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3: undeclared event x"));
}

#[test]
fn validate_and_configs() {
    assert_eq!(run(&["validate", "p0.es"]).status.code(), Some(0));
    let o = run(&["configs", "p2.es"]);
    assert!(stdout(&o).starts_with("8 configurations\n"));
    let dot = stdout(&run(&["configs", "p2.es", "--dot"]));
    assert_eq!(dot.matches("->").count(), 10);
    let h = stdout(&run(&["histories", "fig1_es.es"]));
    assert_eq!(h.lines().count(), 5);
}

#[test]
fn unfold_writes_the_canonical_pes() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "u.es");
    let o = run(&["unfold", "fig1_es.es", "-o", &out]);
    assert_eq!(o.status.code(), Some(0));
    let m = parse_es(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(m.kind(), Kind::Pes);
    assert_eq!(m.ids().len(), 5);
    assert_eq!(stdout(&o).lines().count(), 5);
}

#[test]
fn quotient_and_join() {
    let dir = tempfile::tempdir().unwrap();
    let eq = path(&dir, "p0.eq");
    std::fs::write(&eq, "class a1 a2\nclass b1 b2\n").unwrap();
    let out = path(&dir, "q.es");
    let o = run(&["quotient", "p0.es", &eq, "-o", &out]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("folding: yes"));
    assert_eq!(parse_es(&std::fs::read_to_string(&out).unwrap()).unwrap().kind(), Kind::Pes);

    let out = path(&dir, "j.es");
    let o = run(&["join", "p3.es", "f30.map", "p0.es", "f31.map", "p1.es", "-o", &out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(parse_es(&std::fs::read_to_string(&out).unwrap()).unwrap().ids().len(), 4);
    let o = run(&["join", "p0.es", "f01.map", "p1.es", "f02.map", "p2.es", "-o", &out]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn minimize_writes_every_solution() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "min");
    let o = run(&["minimize", "fig7_a0.es", "--class", "aes", "-o", &out]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("2 maximal"));
    for i in 0..2 {
        for ext in ["es", "eq", "map"] {
            assert!(Path::new(&out).join(format!("fig7_a0.min{i}.{ext}")).exists());
        }
    }
    let o = run(&["minimize", "p0.es", "--class", "pes"]);
    assert!(stdout(&o).contains("a1+a2"));
    assert_eq!(run(&["minimize", "p0.es", "--class", "bogus"]).status.code(), Some(2));
}

#[test]
fn abstraction_homomorphism() {
    let o = run(&["check-abstraction", "p7.es", "p8.es", "f78.map"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("folding: no"));
    assert_eq!(run(&["check-abstraction", "a1.es", "a2.es", "g12.map"]).status.code(), Some(2));
}
