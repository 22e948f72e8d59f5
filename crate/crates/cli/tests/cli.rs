use std::process::{Command, Output};

fn riffle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riffle"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn riffle_cut_on_two_cards() {
    let o = riffle(&["measure", "--law", "riffle-cut", "--n", "2", "--k", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, ["1 2\t1/2", "2 1\t1/2"]);
}

#[test]
fn riffle_rows_are_lexicographic_and_reduced() {
    let o = riffle(&["measure", "--law", "riffle", "--n", "3", "--k", "2"]);
    let text = stdout(&o);
    let perms: Vec<&str> = text.lines().map(|l| l.split('\t').next().unwrap()).collect();
    let mut sorted = perms.clone();
    sorted.sort();
    assert_eq!(perms, sorted);
    assert!(text.starts_with("1 2 3\t1/2\n"));
}

#[test]
fn class_lumping_and_affine_crosscheck() {
    let o = riffle(&["measure", "--law", "affine", "--n", "3", "--k", "3", "--by-class"]);
    assert!(o.status.success());
    let total: usize = stdout(&o).lines().count();
    assert!(total >= 2);
    let o = riffle(&["measure", "--law", "affine", "--n", "4", "--k", "2", "--method", "qbinom", "--no-crosscheck"]);
    assert!(o.status.success());
}

#[test]
fn cut_then_riffle_differs_from_riffle_then_cut() {
    let a = stdout(&riffle(&["measure", "--law", "cut-riffle", "--n", "4", "--k", "2"]));
    let b = stdout(&riffle(&["measure", "--law", "riffle-cut", "--n", "4", "--k", "2"]));
    assert_ne!(a, b);
}

#[test]
fn tv_table() {
    let o = riffle(&["tv", "--n", "2", "--k", "2", "--max-shuffles", "2"]);
    assert_eq!(stdout(&o), "1\t1/4\n2\t1/8\n");
    let with_cut = stdout(&riffle(&["tv", "--n", "5", "--k", "2", "--max-shuffles", "3", "--with-cut"]));
    let lower = stdout(&riffle(&["tv", "--n", "4", "--k", "2", "--max-shuffles", "3"]));
    assert_eq!(with_cut, lower);
}

#[test]
fn patience_deal() {
    let o = riffle(&["patience", "--word", "7 5 1 3 6 2 4", "--ties", "forbidden"]);
    assert_eq!(stdout(&o), "3 2 2\n");
    let o = riffle(&["patience", "--word", "d d b c d b b c a b a c d b d", "--ties", "allowed", "--cycles"]);
    assert!(stdout(&o).contains("phi\t(d d b c d b b c a) T (b a) T (c d b) T (d)"));
    let o = riffle(&["patience", "--involutions", "2"]);
    assert_eq!(stdout(&o), "1*x^4 + 2*x^2\n");
}

#[test]
fn samples_are_deterministic() {
    let args = ["sample", "--law", "gsr", "--n", "6", "--k", "2", "--count", "5", "--seed", "9"];
    let a = stdout(&riffle(&args));
    assert_eq!(a, stdout(&riffle(&args)));
    assert_eq!(a.lines().count(), 5);
    let b = stdout(&riffle(&["sample", "--law", "affine2", "--n", "6", "--count", "3", "--seed", "1"]));
    assert_eq!(b.lines().count(), 3);
}

#[test]
fn reciprocity() {
    let o = riffle(&["reciprocity", "--m", "3", "--x", "4", "--y", "6"]);
    let text = stdout(&o);
    let (a, b) = text.trim().split_once('\t').unwrap();
    assert_eq!(a, b);
}

#[test]
fn verify_all_passes() {
    let o = riffle(&["verify", "--suite", "all", "--max-n", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = riffle(&["verify", "--suite", "perm", "--max-n", "3", "--tsv"]);
    assert!(stdout(&o).lines().all(|l| l.contains('\t')));
}

#[test]
fn exit_codes() {
    assert_eq!(riffle(&["measure", "--bogus"]).status.code(), Some(2));
    assert_eq!(riffle(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(riffle(&["measure", "--law", "riffle", "--n", "0"]).status.code(), Some(2));
    let o = riffle(&["measure", "--law", "riffle", "--n", "11", "--k", "2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!o.stderr.is_empty());
    let o = riffle(&["patience", "--involutions", "7"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn in_process_run() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = riffle_cli::run(["riffle", "--threads", "2", "tv", "--n", "3", "--k", "2", "--max-shuffles", "1"], &mut out, &mut err);
    assert_eq!(code, 0);
    assert_eq!(String::from_utf8(out).unwrap().lines().count(), 1);
}
