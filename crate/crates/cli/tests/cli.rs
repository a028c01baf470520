use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn consfree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_consfree"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Writes a corpus entry to `dir` through `corpus show`.
fn corpus_file(dir: &Path, name: &str, ext: &str) -> PathBuf {
    let o = consfree(&["corpus", "show", name]);
    assert_eq!(code(&o), 0);
    let p = dir.join(format!("{name}.{ext}"));
    fs::write(&p, o.stdout).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_exit_codes() {
    let dir = TempDir::new().unwrap();
    let sat = corpus_file(dir.path(), "sat", "afs");
    let o = consfree(&["validate", s(&sat)]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "constructor_system: pass\nleft_linear: pass\ncons_free: pass\n"
    );

    let count = corpus_file(dir.path(), "count", "afs");
    let o = consfree(&["validate", s(&count), "--records"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o)
        .lines()
        .any(|l| l.contains("\"check\":\"cons_free\"") && l.contains("\"fail\"")));

    let broken = dir.path().join("broken.afs");
    fs::write(&broken, "sort a;\ncons x : a\n").unwrap();
    assert_eq!(code(&consfree(&["validate", s(&broken)])), 3);
    assert_eq!(
        code(&consfree(&["validate", s(&dir.path().join("missing.afs"))])),
        3
    );
}

#[test]
fn accept_and_replay() {
    let dir = TempDir::new().unwrap();
    let sat = corpus_file(dir.path(), "sat", "afs");
    let o = consfree(&["accept", s(&sat), "11?#000#?11#", "--trace"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("accepted\n-- trace to true\n"));
    let trace = dir.path().join("trace.txt");
    fs::write(&trace, &o.stdout).unwrap();
    let o = consfree(&["replay", s(&sat), s(&trace)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    // Dropping a middle step breaks the chain.
    let text = fs::read_to_string(&trace).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines.remove(5);
    fs::write(&trace, lines.join("\n")).unwrap();
    assert_eq!(code(&consfree(&["replay", s(&sat), s(&trace)])), 3);

    assert_eq!(code(&consfree(&["accept", s(&sat), "1#0#"])), 1);
    assert_eq!(
        code(&consfree(&[
            "accept",
            s(&sat),
            "1#0#",
            "--budget-visited",
            "3"
        ])),
        2
    );
}

#[test]
fn rewrite_lists_normal_forms() {
    let dir = TempDir::new().unwrap();
    let sat = corpus_file(dir.path(), "sat", "afs");
    let o = consfree(&["rewrite", s(&sat), "decide(1('#'(|>)))"]);
    assert_eq!(code(&o), 0);
    let mut nfs: Vec<String> = stdout(&o).lines().map(String::from).collect();
    nfs.sort();
    assert_eq!(nfs, ["false", "true"]);
    assert_eq!(code(&consfree(&["rewrite", s(&sat), "decide(nope)"])), 3);
}

#[test]
fn saturation_and_resources() {
    let dir = TempDir::new().unwrap();
    let pal = corpus_file(dir.path(), "palindrome", "afs");
    let o = consfree(&["decide", s(&pal), "0110"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "accepted\n"));
    assert_eq!(code(&consfree(&["decide", s(&pal), "011"])), 1);
    let o = consfree(&[
        "saturate",
        s(&pal),
        "decide(1(0(|>)))",
        "--stats",
        "--engine",
        "demand",
    ]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "false\n"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("|B| = 5"));
    assert_eq!(
        code(&consfree(&[
            "decide",
            s(&pal),
            "0110",
            "--cap",
            "4",
            "--engine",
            "dense"
        ])),
        4
    );

    let count = corpus_file(dir.path(), "count", "afs");
    assert_eq!(code(&consfree(&["saturate", s(&count), "succ(1(|>))"])), 3);
}

#[test]
fn machines_compile_and_agree() {
    let dir = TempDir::new().unwrap();
    let tm = corpus_file(dir.path(), "parity", "tm");
    let out = dir.path().join("parity.afs");
    let o = consfree(&[
        "compile-tm",
        "--tm",
        s(&tm),
        "--order",
        "1",
        "--factor",
        "1",
        "--out",
        s(&out),
        "--report",
    ]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("bound: P(n) = 2^(n+1)"));
    assert_eq!(code(&consfree(&["validate", s(&out)])), 0);
    for w in ["0", "1", "11", "101"] {
        let run = code(&consfree(&["tm", "run", s(&tm), w]));
        let decided = code(&consfree(&["decide", s(&out), w]));
        assert_eq!(run, decided, "{w}");
    }
    assert_eq!(
        code(&consfree(&["tm", "run", s(&tm), "1111", "--fuel", "2"])),
        2
    );
}

#[test]
fn corpus_run_passes() {
    let o = consfree(&["corpus", "run"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).trim_end().ends_with("entries pass"));
}
