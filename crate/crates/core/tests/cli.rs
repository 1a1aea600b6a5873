mod support;

use std::fs;

use support::{run_cli, sketch_path};

const STAGES: [&str; 9] = [
    "rewriting syntax sugar",
    "specializing class-level generator",
    "building class hierarchy",
    "encoding",
    "solving",
    "replacing holes",
    "replacing generators",
    "decoding",
    "synthesis done",
];

fn out_arg(dir: &tempfile::TempDir) -> String {
    dir.path().join("result").to_string_lossy().into_owned()
}

#[test]
fn mult2_writes_the_output_tree() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(&dir);
    let (code, _) = run_cli(&[&sketch_path("mult2/SimpleMath.java"), &sketch_path("mult2/Test.java"), "--out", &out]);
    assert_eq!(code, 0);
    let root = dir.path().join("result");
    assert!(fs::read_to_string(root.join("java/SimpleMath.java")).unwrap().contains("return 2 * x;"));
    assert!(root.join("java/Test.java").exists());
    let sol = fs::read_to_string(root.join("solution.txt")).unwrap();
    assert!(sol.contains("hole e_h1 = 2\n") && sol.contains("choice e_c1 = 0\n"), "{sol}");

    let log = fs::read_to_string(root.join("log/log.txt")).unwrap();
    let mut at = 0;
    for stage in STAGES {
        let pos = log[at..].find(stage).unwrap_or_else(|| panic!("missing or out of order: {stage}\n{log}"));
        at += pos + stage.len();
    }
    let first = log.lines().next().unwrap();
    assert!(first.as_bytes()[2] == b':' && first.as_bytes()[5] == b':' && first.as_bytes()[8] == b' ', "{first}");
    assert!(log.contains("replaced: SimpleMath.e_h1 = 2"));
    assert!(log.contains("replaced: SimpleMath.e_c1 = x"));
}

#[test]
fn syntax_error_exits_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("Bad.java");
    fs::write(&bad, "class Bad {\n    int f( { }\n}\n").unwrap();
    let (code, err) = run_cli(&[bad.to_str().unwrap(), "--out", &out_arg(&dir)]);
    assert_eq!(code, 2);
    assert!(err.contains("Bad.java:2:"), "{err}");
    assert!(!dir.path().join("result/java").exists());
}

#[test]
fn missing_file_and_no_args_exit_2() {
    assert_eq!(run_cli(&["/nonexistent/X.java", "--out", "/tmp/oosketch-none"]).0, 2);
    assert_eq!(run_cli(&[]).0, 2);
}

#[test]
fn unsat_exits_1_and_clears_java() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("U.java");
    fs::write(&src, "class U { harness static void h() { int x = ??; assert x * 2 == 7; } }\n").unwrap();
    let stale = dir.path().join("result/java/Old.java");
    fs::create_dir_all(stale.parent().unwrap()).unwrap();
    fs::write(&stale, "class Old { }\n").unwrap();
    let (code, _) = run_cli(&[src.to_str().unwrap(), "--out", &out_arg(&dir)]);
    assert_eq!(code, 1);
    assert!(!dir.path().join("result/java").exists());
    assert!(dir.path().join("result/log/log.txt").exists());
}

#[test]
fn zero_timeout_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) =
        run_cli(&[&sketch_path("mult2/SimpleMath.java"), &sketch_path("mult2/Test.java"), "--timeout", "0", "--out", &out_arg(&dir)]);
    assert_eq!(code, 3);
}

#[test]
fn emit_flags_write_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(&dir);
    let files = ["automata/Automaton.java", "automata/DBConnection.java", "automata/TestDBConnection.java"].map(sketch_path);
    let mut args: Vec<&str> = files.iter().map(String::as_str).collect();
    args.extend(["--out", &out, "--emit-ir", "--emit-tables", "--emit-desugared", "--seed", "0"]);
    assert_eq!(run_cli(&args).0, 0);
    let root = dir.path().join("result");
    let ir = fs::read_to_string(root.join("ir/Automaton.ir")).unwrap();
    assert!(ir.contains("fn dyn_dispatch_getId"));
    let tables = fs::read_to_string(root.join("tables.txt")).unwrap();
    assert!(tables.contains("Monitor_DBConnection") && tables.contains("subcls"));
    let desugared = fs::read_to_string(root.join("desugared/Automaton.java")).unwrap();
    assert!(desugared.contains("class Automaton1") && desugared.contains("minrepeat"));
    assert!(fs::read_to_string(root.join("solution.txt")).unwrap().ends_with("ms=0\n"));
}
