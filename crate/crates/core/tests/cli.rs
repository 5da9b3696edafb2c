use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_agl-count"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn table_q2() {
    let o = run(&["table", "--p", "2", "--alpha", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(s.lines().next(), Some("k,d,odp,i,j,beta,N"));
    assert!(s.lines().any(|l| l == "1,1,1,1,0,0,2"), "{s}");
}

#[test]
fn table_q5_has_pair_row() {
    let o = run(&["table", "--p", "5", "--alpha", "1", "--format", "csv"]);
    assert!(stdout(&o).lines().any(|l| l == "2,2,1,1,0,0,2"));
}

#[test]
fn table_rejects_non_prime() {
    let o = run(&["table", "--p", "4", "--alpha", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("4 is not prime"));
}

#[test]
fn table_by_q_matches_by_p_alpha() {
    assert_eq!(stdout(&run(&["table", "--q", "27"])), stdout(&run(&["table", "--p", "3", "--alpha", "3"])));
}

#[test]
fn table_is_deterministic_and_extends_to_q() {
    let a = run(&["table", "--q", "64", "--max-k", "64", "--workers", "3"]);
    let b = run(&["table", "--q", "64", "--max-k", "64", "--workers", "1"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).lines().any(|l| l.starts_with("64,")));
}

#[test]
fn table_json() {
    let o = run(&["table", "--q", "7", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v.as_array().unwrap();
    assert!(rows.iter().any(|r| r["k"] == 3 && r["d"] == 3 && r["beta"] == 0 && r["N"] == "2"));
}

#[test]
fn count_examples() {
    let o = run(&["count", "--p", "7", "--alpha", "1", "--k", "3", "--d", "3", "--i", "1", "--j", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().nth(1), Some("3,3,1,1,0,0,2"));
    let o = run(&["count", "--p", "7", "--alpha", "1", "--k", "3", "--d", "1", "--i", "1", "--j", "0"]);
    assert_eq!(stdout(&o).lines().nth(1), Some("3,1,1,1,0,0,0"));
    let o = run(&["count", "--p", "7", "--k", "3", "--d", "3", "--i", "1", "--j", "0", "--format", "text"]);
    assert_eq!(stdout(&o).trim(), "k= 3, d= 3, o_d(p)= 1, i= 1, j= 0, beta= 0,  N= 2");
}

#[test]
fn count_congruence_violation() {
    let o = run(&["count", "--p", "7", "--alpha", "1", "--k", "4", "--d", "3", "--i", "1", "--j", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("k = 0 or p^beta (mod d*p^beta)"));
    let o = run(&["count", "--p", "7", "--alpha", "1", "--k", "3", "--d", "4", "--i", "1", "--j", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("d | q-1"));
}

#[test]
fn verify_examples() {
    let o = run(&["verify", "--q", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS: 64 checks, 0 mismatches"));
    let o = run(&["verify", "--q", "8", "--max-k", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["verify", "--q", "1024"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["verify", "--q", "13", "--oracle-budget", "10"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn design_examples() {
    let o = run(&["design", "--q", "7", "--k", "3", "--d", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("design (v,b,r,k,lambda) = (7,14,6,3,2)"));
    assert!(s.contains("code (n,d,w) = (14,8,6), 7 codewords"));
    assert!(s.contains("= 56/8 = 7"));
    assert!(s.contains("A2(14, 8, 6) = 7"));

    let by_subset = run(&["design", "--q", "7", "--subset", "1,2,4"]);
    let strip = |t: &str| t.lines().skip(1).map(str::to_owned).collect::<Vec<_>>();
    assert_eq!(strip(&stdout(&by_subset)), strip(&s));

    let o = run(&["design", "--q", "7", "--k", "3", "--d", "6"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("N = 0"));
}

#[test]
fn design_rejects_degenerate_block() {
    let o = run(&["design", "--q", "5", "--subset", "0,1,2,3,4"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["design", "--q", "5", "--subset", "9"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_flags_are_input_errors() {
    assert_eq!(run(&["table"]).status.code(), Some(1));
    assert_eq!(run(&["table", "--q", "12"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
