use std::io::Write;
use std::process::{Command, Output, Stdio};

fn lmu(args: &[&str]) -> Output {
    lmu_with_input(args, "")
}

fn lmu_with_input(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_lmu"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn check_identity() {
    let o = lmu(&["check", "\\x:bot. x"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "bot -> bot\n");
}

#[test]
fn eta_with_context() {
    let o = lmu(&["eta", "(\\x:bot.x) ((\\x:bot.x) y)", "--context", "y:bot"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "2\n");
}

#[test]
fn omega_is_not_sn() {
    let o = lmu(&["sn", "(\\x. x x) (\\x. x x)", "--fuel", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "NotSN cycle_length=1\n");
}

#[test]
fn type_error_exits_one() {
    let o = lmu(&["check", "x y", "--context", "x:bot, y:bot"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("NotAnArrow"));
    assert!(o.stdout.is_empty());
}

#[test]
fn usage_and_parse_errors_exit_two() {
    assert_eq!(lmu(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(lmu(&["check"]).status.code(), Some(2));
    assert_eq!(lmu(&["check", "(\\x. x"]).status.code(), Some(2));
    assert_eq!(lmu(&["sn", "x", "--fule", "3"]).status.code(), Some(2));
    assert_eq!(lmu(&["reduce", "x", "--strategy", "sideways"]).status.code(), Some(2));
    assert_eq!(lmu(&["check", "x", "--context", "x:"]).status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    let o = lmu(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("lemmas"));
}

#[test]
fn explain_prints_derivation() {
    let o = lmu(&["check", "--explain", "\\x:bot. x"]);
    assert_eq!(stdout(&o), "->i  \\x:bot. x : bot -> bot\n  ax  x : bot\n");
}

#[test]
fn reduce_strategies() {
    let o = lmu(&["reduce", "(\\x. x) ((\\y. y) z)", "--trace"]);
    assert_eq!(stdout(&o), "1 root (\\y. y) z\n2 root z\nz\n");
    let o = lmu(&["reduce", "(\\x. x) ((\\y. y) z)", "--strategy", "head", "--max-steps", "1"]);
    assert_eq!(stdout(&o), "(\\y. y) z\n");
    let a = lmu(&["reduce", "(\\x. x x) ((\\y. y) z)", "--strategy", "random", "--seed", "3"]);
    assert_eq!(stdout(&a), "z z\n");
}

#[test]
fn graph_dot() {
    let o = lmu(&["graph", "(\\x. x) z"]);
    assert_eq!(
        stdout(&o),
        "digraph reductions {\n  \"(\\\\x0. x0) z\" [root=true];\n  \"z\";\n  \"(\\\\x0. x0) z\" -> \"z\";\n}\n"
    );
}

#[test]
fn reads_files() {
    let dir = std::env::temp_dir().join(format!("lmu-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("id.lm");
    std::fs::write(&path, "-- identity\n\\x:bot. x\n").unwrap();
    let o = lmu(&["check", "--file", path.to_str().unwrap()]);
    assert_eq!(stdout(&o), "bot -> bot\n");
    assert_eq!(lmu(&["check", "--file", "/nonexistent/x.lm"]).status.code(), Some(2));
}

#[test]
fn step_loop() {
    let o = lmu_with_input(&["step", "(\\x. x) ((\\y. y) z)"], "2\nnine\n1\n");
    let out = stdout(&o);
    assert!(out.contains("  1: root\n  2: arg\n"));
    assert!(out.contains("choose a number from 1 to 1"));
    assert!(out.ends_with("z\nnormal form\n"), "{out}");
    let o = lmu_with_input(&["step", "(\\x. x) y"], "");
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn lemmas_json() {
    let o = lmu(&["lemmas", "--suite", "l4", "--max-size", "5", "--lgt-bound", "1", "--json", "-"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for key in ["\"suite\": \"l4\"", "\"max_cxty\": 5", "\"failures\": []", "\"wall_ms\""] {
        assert!(text.contains(key), "{key} in {text}");
    }
}

#[test]
fn every_suite_runs() {
    for suite in ["thm8", "sr", "l3", "l4", "l5", "l7"] {
        let o = lmu(&["lemmas", "--suite", suite, "--max-size", "5", "--lgt-bound", "1", "--samples", "30"]);
        assert_eq!(o.status.code(), Some(0), "{suite}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).starts_with(&format!("{suite}: ")));
    }
}

#[test]
fn outputs_are_deterministic() {
    let args = ["lemmas", "--suite", "l7", "--max-size", "6", "--samples", "20", "--seed", "9"];
    let a = stdout(&lmu(&args));
    let b = stdout(&lmu(&args));
    assert_eq!(a, b);
    let args = ["sample", "--type", "bot -> bot", "--size", "10", "--seed", "4", "--context", "v:bot"];
    assert_eq!(stdout(&lmu(&args)), stdout(&lmu(&args)));
}

#[test]
fn every_command_is_reachable() {
    let cases: &[(&[&str], &str)] = &[
        (
            &["check", "x", "--context", "x:bot", "--subject-reduction", "3"],
            "bot\nsubject reduction: 1 nodes, 0 edges, 0 violations\n",
        ),
        (&["enumerate", "--type", "bot", "--max-size", "2", "--context", "v:bot"], "v\nmu x0:bot. v\n"),
        (&["types", "--max-lgt", "1"], "0 bot\n1 bot -> bot\n"),
        (&["sample", "--type", "bot", "--size", "1", "--context", "x:bot"], "x\n"),
        (&["subst", "\\y. x y", "--with", "x := y"], "\\y'. y y'\n"),
        (&["subst", "x y", "--with", "x := y", "--with", "y := x"], "y x\n"),
        (&["subst", "x", "--mu", "x", "--target", "y"], "\\u. x (u y)\n"),
        (&["subst", "x y x", "--with", "x := \\u:bot. u", "--measure", "x:bot -> bot, y:bot"], "(1, 0, 5, 0)\n"),
        (&["alpha", "\\a. a", "\\b. b"], "true\n"),
        (&["eta", "(\\x. x x) (\\x. x x)", "--fuel", "10"], "NotSN cycle_length=1\n"),
    ];
    for (args, expected) in cases {
        let o = lmu(args);
        assert_eq!(stdout(&o), *expected, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = lmu(&["inspect", "\\a. (\\x. x) w v"]);
    let out = stdout(&o);
    for line in
        ["cxty: 7", "free: v w", "prefix: \\a", "head: redex (\\x. x) w", "hred: \\a. w v", "arg: x", "redex: lam.fun"]
    {
        assert!(out.contains(line), "{line} in {out}");
    }
    assert_eq!(lmu(&["alpha", "\\a. a", "\\b. c"]).status.code(), Some(1));
}
