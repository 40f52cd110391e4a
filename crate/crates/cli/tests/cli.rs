use std::process::{Command, Output};

fn conwork(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conwork"))
        .args(args)
        .output()
        .expect("run conwork")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn decide_second_incompleteness() {
    let o = conwork(&["decide", "(Con(T) -> Con(~Con(T)))"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "RESULT: VALID\n");
}

#[test]
fn decide_prints_a_countermodel() {
    let o = conwork(&["decide", "Con(T)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "RESULT: INVALID\nWORLDS 1\nROOT 0\n");
}

#[test]
fn unknown_and_caps_have_their_own_exit_codes() {
    let o = conwork(&["decide", "1Con(T)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("RESULT: UNKNOWN"));

    let o = conwork(&["decide", "~Con[3](T)", "--model-cap", "2"]);
    assert_eq!(o.status.code(), Some(3));

    let o = conwork(&[
        "decide",
        "((Con(p) & Con(~p)) -> Con[2](T))",
        "--budget",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(3));

    let o = conwork(&["construct", "ttt", "--n", "9"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(conwork(&["decide", "(p"]).status.code(), Some(1));
    assert_eq!(conwork(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(conwork(&["op", "check-monotone"]).status.code(), Some(1));
    assert_eq!(conwork(&["nf", "p"]).status.code(), Some(1));
    assert_eq!(conwork(&["ord", "pred", "w"]).status.code(), Some(1));
    assert_eq!(
        conwork(&["construct", "star", "p", "--bound", "0"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        conwork(&["construct", "inversion", "p"]).status.code(),
        Some(1)
    );
}

#[test]
fn help_exits_zero_and_lists_flags() {
    for args in [
        vec!["--help"],
        vec!["decide", "--help"],
        vec!["enum", "--help"],
        vec!["construct", "theta", "--help"],
    ] {
        let o = conwork(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
    }
    let text = stdout(&conwork(&["enum", "--help"]));
    for flag in [
        "--stages",
        "--closure-depth",
        "--budget",
        "--model-cap",
        "default",
    ] {
        assert!(text.contains(flag), "{flag}");
    }
}

#[test]
fn ordinal_commands() {
    assert_eq!(stdout(&conwork(&["ord", "cmp", "w*2", "w^2"])), "LT\n");
    assert_eq!(stdout(&conwork(&["ord", "cmp", "w^2", "w*2"])), "GT\n");
    assert_eq!(
        stdout(&conwork(&["ord", "cmp", "w^(w+1)", "w^(w+1)"])),
        "EQ\n"
    );
    assert_eq!(conwork(&["ord", "cmp", "w+0", "w"]).status.code(), Some(1));
    assert_eq!(stdout(&conwork(&["ord", "classify", "w^w"])), "LIMIT\n");
    assert_eq!(stdout(&conwork(&["ord", "pred", "w*2+1"])), "w*2\n");
    assert_eq!(stdout(&conwork(&["ord", "fund", "w^w", "3"])), "w^3\n");
}

#[test]
fn letterless_commands() {
    assert_eq!(stdout(&conwork(&["nf", "(~Con(T) | Con(T))"])), "T\n");
    assert_eq!(
        stdout(&conwork(&["nf", "Con((T & Con(T)))"])),
        "Con[2](T)\n"
    );
    assert_eq!(stdout(&conwork(&["truth", "Con(~Con(T))"])), "TRUE\n");
    assert_eq!(stdout(&conwork(&["truth", "~Con(T)"])), "FALSE\n");
    assert_eq!(
        stdout(&conwork(&["strict", "Con[2](T)", "Con(T)"])),
        "RESULT: YES\n"
    );
    assert_eq!(
        stdout(&conwork(&["strict", "Con(T)", "Con[2](T)"])),
        "RESULT: NO\n"
    );
}

#[test]
fn constructions_report_claims() {
    let o = conwork(&["construct", "bbb", "T", "--op", "conj_con"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("THETA "));
    assert!(text.contains("CLAIM bbb VERDICT Yes"));
    assert!(text.contains("CLAIM bbb/conclusion VERDICT Yes"));

    let text = stdout(&conwork(&["construct", "ttt", "--n", "2"]));
    assert!(text.contains("PHI 3 "));
    assert!(text.contains("CLAIM ttt/equivalence VERDICT Yes"));

    let text = stdout(&conwork(&["construct", "theta", "2"]));
    assert_eq!(
        text,
        "INDEX 1 @theta1_conj_con\nINDEX 2 (@theta1_conj_con & @theta_body_conj_con_2)\n"
    );

    let text = stdout(&conwork(&["construct", "onecon-check", "p", "--k", "3"]));
    assert!(text.starts_with("CLAIM onecon/successor_k3 VERDICT Yes\nHYP "));

    let text = stdout(&conwork(&["construct", "slowcon", "T", "--bound", "2"]));
    assert!(text.contains("@F_eps0_total_at_1"));
}

#[test]
fn monotone_check_reports_witnesses() {
    let o = conwork(&[
        "op",
        "check-monotone",
        "--op",
        "negate",
        "--corpus",
        "20",
        "--seed",
        "7",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("OPERATOR negate SEED 7\n"));
    assert!(text.contains("WITNESS "));
    let summary = text.lines().last().unwrap();
    assert!(summary.starts_with("SUMMARY VALID "));
    assert!(!summary.contains("INVALID 0 "));

    let text = stdout(&conwork(&[
        "op",
        "check-monotone",
        "--corpus",
        "20",
        "--seed",
        "7",
    ]));
    assert!(text.ends_with("SUMMARY VALID 20 INVALID 0 UNKNOWN 0\n"));
}

#[test]
fn enumerator_dumps_each_stage() {
    let o = conwork(&["enum", "--stages", "2", "--closure-depth", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for stage in ["STAGE 0\n", "STAGE 1\n", "STAGE 2\n"] {
        assert!(text.contains(stage), "{stage}");
    }
    assert!(text.contains("TRUE "));
    assert_eq!(conwork(&["enum", "--stages", "9"]).status.code(), Some(3));
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["decide", "((Con(p) & Con(~p)) -> Con[2](T))"],
        vec!["enum", "--stages", "2", "--closure-depth", "1"],
        vec![
            "op",
            "check-monotone",
            "--op",
            "negate",
            "--corpus",
            "10",
            "--seed",
            "3",
        ],
    ] {
        assert_eq!(conwork(&args).stdout, conwork(&args).stdout, "{args:?}");
    }
}
