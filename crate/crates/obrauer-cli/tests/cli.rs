use std::process::{Command, Output};

fn obrauer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_obrauer"))
        .args(args)
        .env_remove("OBRAUER_SERVER")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn dims_of_a_level_two_quotient() {
    let o = obrauer(&["dims", "--mode", "obf", "--f", "u^2-1", "^v", "^v"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "8");
}

#[test]
fn walled_brauer_table() {
    let o = obrauer(&["structconst", "--mode", "ob", "--delta", "5", "1", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("b0 = [b1-b2 t2-t1: ^v -> ^v]"), "{out}");
    assert!(out.contains("b0 . b0 = (5) b0"), "{out}");
}

#[test]
fn json_output_is_stable_and_normal() {
    let args = ["--json", "normalize", "--mode", "aob", "(1[^] * x) . s . (x * x)"];
    let first = stdout(&obrauer(&args));
    assert_eq!(first, stdout(&obrauer(&args)));
    let again = obrauer(&["--json", "normalize", "--mode", "aob", first.trim()]);
    assert_eq!(stdout(&again), first);
}

#[test]
fn compose_in_a_cyclotomic_quotient() {
    let o = obrauer(&["compose", "--mode", "obf", "--f", "u-2", "x", "1[^]"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "(2) [b1-t1: ^ -> ^]");
    let o = obrauer(&["compose", "--mode", "aob", "t", "t"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn structure_constants_are_byte_stable() {
    let args = ["--json", "structconst", "--mode", "obf", "--f", "u^2-3*u+1", "1", "1"];
    let a = obrauer(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&obrauer(&args)));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["normalize", "--mode", "ob", "--f", "u-1", "s"][..],
        &["normalize", "s . c"],
        &["dims", "--mode", "obf", "^", "^"],
        &["rank", "--lambda", "1,1", "^v", "^v"],
        &["verify", "--suite", "nonsense"],
        &["frobnicate"],
    ] {
        let o = obrauer(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn verify_reports_per_check() {
    let o = obrauer(&["verify", "--suite", "relations,walled-brauer", "--lambda", "2,2", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().all(|l| l.starts_with("PASS ")), "{out}");
    assert!(out.contains("relation: affine dot relation"));
}

#[test]
fn rank_matches_count() {
    let o = obrauer(&["rank", "--lambda", "2,2", "--m", "1/2,-3", "^^", "^^"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "count 8 rank 8");
}

#[test]
fn remote_server_flag() {
    let o = obrauer(&["--server", "http://127.0.0.1:9", "dims", "^", "^"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot reach"));
}
