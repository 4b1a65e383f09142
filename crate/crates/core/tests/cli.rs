use std::path::Path;
use std::process::{Command, Output};

fn hamlift(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hamlift")).args(args).current_dir(dir).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn catalog_list_and_show() {
    let dir = tempfile::tempdir().unwrap();
    let list = hamlift(&["catalog", "list"], dir.path());
    assert_eq!(code(&list), 0);
    assert!(stdout(&list).lines().count() >= 25);
    let show = stdout(&hamlift(&["catalog", "show", "petersen-f20"], dir.path()));
    assert!(show.contains("vertices 10\n"));
    assert!(show.contains("group order 20\n"));
    assert!(show.contains("commutator order 5\n"));
    let missing = hamlift(&["catalog", "show", "nosuch"], dir.path());
    assert_eq!(code(&missing), 1);
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nosuch"));
}

#[test]
fn hamilton_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let z9 = hamlift(&["hamilton", "--catalog", "z9-cycle", "--out", "c.txt", "--trace", "t.txt"], dir.path());
    assert_eq!(code(&z9), 0);
    let cert = std::fs::read_to_string(dir.path().join("c.txt")).unwrap();
    assert_eq!(cert, "cycle\n0 1 2 3 4 5 6 7 8\n");
    let trace = std::fs::read_to_string(dir.path().join("t.txt")).unwrap();
    assert!(trace.lines().any(|l| l.contains("single-orbit-cayley")));
    assert_eq!(code(&hamlift(&["hamilton", "--catalog", "petersen-f20"], dir.path())), 2);
    let s4 = hamlift(&["hamilton", "--catalog", "s4-regular"], dir.path());
    assert_eq!(code(&s4), 1);
    assert!(String::from_utf8_lossy(&s4.stderr).contains("commutator-cyclic-prime-power"));
}

#[test]
fn hamilton_from_files_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let show = ["catalog", "show", "d18xz3-twisted", "--write-graph", "x.txt", "--write-group", "g.txt"];
    assert_eq!(code(&hamlift(&show, d)), 0);
    let args = ["hamilton", "--graph", "x.txt", "--group", "g.txt", "--trace", "t.txt"];
    let first = hamlift(&args, d);
    let first_trace = std::fs::read(d.join("t.txt")).unwrap();
    let second = hamlift(&args, d);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first_trace, std::fs::read(d.join("t.txt")).unwrap());
    std::fs::write(d.join("c.txt"), &first.stdout).unwrap();
    assert_eq!(code(&hamlift(&["verify", "--graph", "x.txt", "--cert", "c.txt"], d)), 0);
}

#[test]
fn parse_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("x.txt"), "vertices 3\n0 1\n1 2\n0 2\n").unwrap();
    std::fs::write(d.join("g.txt"), "degree 3\n# rotation\n1 2 x\n").unwrap();
    let out = hamlift(&["hamilton", "--graph", "x.txt", "--group", "g.txt"], d);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn verify_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("c5.txt"), "vertices 5\n0 1\n1 2\n2 3\n3 4\n0 4\n").unwrap();
    let check = |cert: &str| {
        std::fs::write(d.join("cert.txt"), cert).unwrap();
        hamlift(&["verify", "--graph", "c5.txt", "--cert", "cert.txt"], d)
    };
    assert_eq!(code(&check("cycle\n0 1 2 3 4\n")), 0);
    let out_of_range = check("cycle\n0 1 2 3 7\n");
    assert_eq!(code(&out_of_range), 1);
    assert!(stdout(&out_of_range).contains("out of range"));
    let repeated = check("cycle\n0 1 2 3 3\n");
    assert_eq!(code(&repeated), 1);
    assert!(stdout(&repeated).contains("repeated"));
}

#[test]
fn oracle_and_edge_cycles() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&hamlift(&["oracle", "--catalog", "petersen-f20"], d)), 1);
    let path = hamlift(&["oracle", "--catalog", "petersen-f20", "--path"], d);
    assert_eq!(code(&path), 0);
    assert!(stdout(&path).starts_with("path\n"));
    let tiny = hamlift(&["oracle", "--catalog", "petersen-f20", "--budget", "1"], d);
    assert_eq!(code(&tiny), 3);
    let cq = hamlift(&["cq-edge", "--catalog", "z6-chord", "--edge", "0", "3"], d);
    assert_eq!(code(&cq), 0);
    let cycle: Vec<usize> =
        stdout(&cq).lines().nth(1).unwrap().split(' ').map(|t| t.parse().unwrap()).collect();
    assert_eq!(&cycle[..2], &[0, 3]);
    assert_eq!(code(&hamlift(&["cq-edge", "--catalog", "z6-chord", "--edge", "0", "2"], d)), 1);
}

#[test]
fn cq_edge_from_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("z5.txt"), "degree 5\n1 2 3 4 0\n").unwrap();
    std::fs::write(d.join("spec.txt"), "group z5.txt\nS: 1 2 3 4\n").unwrap();
    let out = hamlift(&["cq-edge", "--spec", "spec.txt", "--edge", "0", "2"], d);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("cycle\n0 2 "));
}

#[test]
fn quotient_reduce_and_dot() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let q = stdout(&hamlift(&["quotient", "--catalog", "petersen-f20"], d));
    assert!(q.contains("vertices 2\n0 1\n"));
    assert_eq!(q.matches(" loop").count(), 2);
    let r = stdout(&hamlift(&["reduce", "--catalog", "z5-complete"], d));
    assert_eq!(r.lines().filter(|l| !l.starts_with('#')).count(), 6);
    let dot = stdout(&hamlift(&["export-dot", "--catalog", "z9-cycle"], d));
    assert!(dot.starts_with("graph {"));
    assert_eq!(dot.matches(" -- ").count(), 9);
}

#[test]
fn sweep_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = hamlift(&["sweep", "--max-order", "10", "--report", "r.tsv"], d);
    assert_eq!(code(&out), 0);
    let report = std::fs::read_to_string(d.join("r.tsv")).unwrap();
    let instances: Vec<&str> = report.lines().map(|l| l.split('\t').next().unwrap()).collect();
    assert!(instances.windows(2).all(|w| w[0] <= w[1]));
    assert!(instances.contains(&"z9-cycle"));
    assert!(!instances.contains(&"petersen-f20"));
    let again = hamlift(&["sweep", "--max-order", "10", "--report", "r2.tsv"], d);
    assert_eq!(code(&again), 0);
    assert_eq!(report, std::fs::read_to_string(d.join("r2.tsv")).unwrap());
}
