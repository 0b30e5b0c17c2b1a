use std::io::Write;
use std::process::{Command, Output, Stdio};

fn pdakit(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_pdakit"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn pipe(stages: &[&[&str]]) -> Output {
    let mut input = String::new();
    let mut last = None;
    for args in stages {
        let out = pdakit(args, &input);
        assert!(
            out.status.success(),
            "{args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        input = stdout(&out);
        last = Some(out);
    }
    last.unwrap()
}

#[test]
fn construct_mn_then_verify() {
    let built = pdakit(&["construct", "mn", "5", "3"], "");
    assert_eq!(built.status.code(), Some(0));
    let out = pdakit(&["verify", "-"], &stdout(&built));
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("4-(5,10,6,5)"), "{text}");
    assert!(text.trim_end().ends_with("ok"));
}

#[test]
fn near_square_power_pipeline() {
    let built = pipe(&[
        &["construct", "near-square", "2"],
        &["power", "-", "--m", "2"],
    ]);
    let out = pdakit(&["verify", "-"], &stdout(&built));
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("4-(8,16,8,16)"));
}

#[test]
fn near_square_text_matches_reference() {
    let out = pdakit(&["construct", "near-square", "2"], "");
    assert_eq!(
        stdout(&out),
        "4 4 2 4\n* * 3 1\n2 * * 4\n1 3 * *\n* 2 4 *\n"
    );
}

#[test]
fn power_with_certificate_file() {
    let dir = std::env::temp_dir().join(format!("pdakit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let base = dir.join("base.pda");
    let cert = dir.join("base.json");
    let out = pdakit(
        &[
            "construct",
            "near-square",
            "2",
            "-o",
            base.to_str().unwrap(),
            "--certificate-out",
            cert.to_str().unwrap(),
        ],
        "",
    );
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let out = pdakit(
        &[
            "power",
            base.to_str().unwrap(),
            "--m",
            "2",
            "--certificate",
            cert.to_str().unwrap(),
            "--vectors",
        ],
        "",
    );
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("* * (3,2) (1,2) * * (2,3) (2,1)\n"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn downgrade_then_verify_with_lambda() {
    let built = pipe(&[&["construct", "mn", "5", "3"], &["downgrade", "-"]]);
    let out = pdakit(&["verify", "-", "--lambda", "3"], &stdout(&built));
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("3-(5,30,18,20)"));
    let out = pdakit(&["verify", "-", "--lambda", "2"], &stdout(&built));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_json_report() {
    let built = pdakit(&["construct", "cwzw", "3", "2", "2"], "");
    let out = pdakit(&["verify", "-", "--json", "--lambda", "1"], &stdout(&built));
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report"]["ok"], true);
    assert_eq!(v["params"]["users"], 12);
    assert_eq!(v["certificate"]["lambda"], 1);
}

#[test]
fn invalid_array_exits_one() {
    let out = pdakit(&["verify", "-"], "2 2 1 2\n* 1\n1 *\n");
    assert_eq!(out.status.code(), Some(1));
    let out = pdakit(&["verify", "-"], "2 2 1 2\n* 1\n");
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        pdakit(&["construct", "nope", "1"], "").status.code(),
        Some(2)
    );
    assert_eq!(pdakit(&["construct", "mn", "5"], "").status.code(), Some(2));
    assert_eq!(
        pdakit(&["construct", "mn", "3", "3"], "").status.code(),
        Some(2)
    );
    assert_eq!(pdakit(&["verify"], "").status.code(), Some(2));
    assert_eq!(
        pdakit(&["verify", "/nonexistent/file"], "").status.code(),
        Some(2)
    );
    assert_eq!(
        pdakit(&["compare", "--table", "5"], "").status.code(),
        Some(2)
    );
    assert_eq!(
        pdakit(&["tradeoff", "--users", "4", "--ratios", "x"], "")
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn simulate_reports_roundtrip() {
    let built = pdakit(&["construct", "ytcc", "4", "3", "2", "1"], "");
    let out = pdakit(
        &[
            "simulate", "-", "--files", "4", "--seed", "9", "--demand", "1,2,3,4",
        ],
        &stdout(&built),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["decode_ok"], true);
    assert_eq!(v["K"], 4);
    let bad = pdakit(
        &[
            "simulate", "-", "--files", "2", "--seed", "1", "--demand", "1,2,3,4",
        ],
        &stdout(&built),
    );
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn group_family_replicates_users() {
    let built = pdakit(&["construct", "group", "4", "2", "3"], "");
    let out = pdakit(&["verify", "-"], &stdout(&built));
    assert!(stdout(&out).contains("3-(12,6,3,12)"), "{}", stdout(&out));
}

#[test]
fn compare_table_four() {
    let a = pdakit(&["compare", "--table", "4"], "");
    assert!(a.status.success());
    let text = stdout(&a);
    assert!(text.starts_with("block,m,family,params,K,ratio,gain,load,F,log2F,kind\n"));
    for (m, k, f) in [(1, 24, "24"), (2, 48, "576"), (3, 72, "13824")] {
        let row = format!("SchemeB,\"g=6,m={m}\",{k},3/4,{},1,{f},", 6 * m);
        assert!(text.contains(&row), "missing {row}");
    }
    assert!(text.contains("SchemeB,\"g=7,m=2\",64,25/32,14,1,1024,"));
    assert_eq!(text, stdout(&pdakit(&["compare", "--table", "4"], "")));
    let three = stdout(&pdakit(&["compare", "--table", "3", "--m", "1"], ""));
    assert!(three.contains("SchemeA,\"H=8,b=3,r=2,m=1\",56,13/28,6,5,56,"));
}

#[test]
fn tradeoff_csv() {
    let out = pdakit(&["tradeoff", "--users", "4", "--ratios", "1/2,0"], "");
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "scheme,ratio_num,ratio_den,load_num,load_den,log2F\n\
         MN,1,2,2,3,2.584963\n\
         C,1,2,1,1,2.000000\n\
         MN,0,1,4,1,0.000000\n"
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("skipped C at 0"));
}
