use std::process::{Command, Output};

fn truncup(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_truncup")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn certify_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    for n in ["-1", "0", "1"] {
        let path = dir.path().join(format!("cert{n}.txt"));
        let p = path.to_str().unwrap();
        let o = truncup(&["certify", "--n", n, "--out", p]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let o = truncup(&["verify", "--chain", p]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains("end telescope matches"));
    }
    let p = dir.path().join("cert-1.txt");
    let o = truncup(&["verify", "--chain", p.to_str().unwrap(), "--models"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn broken_certificates_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let good = stdout(&truncup(&["certify", "--n", "0"]));
    for (i, bad) in [good.replacen("add true", "add false", 1), good.replacen("step ", "stop ", 1)].iter().enumerate() {
        let path = dir.path().join(format!("bad{i}.txt"));
        std::fs::write(&path, bad).unwrap();
        let o = truncup(&["verify", "--chain", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(1), "case {i}");
    }
    let o = truncup(&["verify", "--chain", dir.path().join("absent.txt").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

const FIXTURE: &str = "\
groupoid Z2
  objects x
  hom x x e g
  comp g g = e
end
groupoid P = discrete 1

env set_B
  base A = P
  base B = P
  const a0 : A = x0
  level B = 0
end
env group_B
  base A = P
  base B = Z2
  const a0 : A = x0
  level B = 1
end
";

#[test]
fn oracle_over_a_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("envs.txt");
    std::fs::write(&path, FIXTURE).unwrap();
    let p = path.to_str().unwrap();
    for check in ["horn", "pair", "tower-stab"] {
        let o = truncup(&["oracle", "--check", check, "--env", p]);
        assert_eq!(o.status.code(), Some(0), "{check}: {}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
        let out = stdout(&o);
        assert!(out.contains("set_B") && out.contains("group_B"), "{check}");
        assert!(!out.contains("false"), "{check}");
    }
    std::fs::write(&path, "env broken\n  base B = nowhere\nend\n").unwrap();
    assert_eq!(truncup(&["oracle", "--check", "horn", "--env", p]).status.code(), Some(2));
}

#[test]
fn emit_matches_golden() {
    let o = truncup(&["emit", "--n", "1", "--format", "coq", "--nice"]);
    assert_eq!(o.status.code(), Some(0));
    let want = include_str!("golden/emit_n1.v");
    assert_eq!(stdout(&o), want);
}
