mod common;

use std::fs;

use common::{golden, model, run, run_with_input, value_of};
use plmu::formula::Formula;
use plmu::plts::Plts;
use plmu_cli::{EXIT_FAIL, EXIT_INPUT, EXIT_OK};

#[test]
fn eval_examples() {
    let coin = model("coin.plts");
    let intro = model("intro.plts");
    let o = run(&["eval", &coin, "<a><a>tt"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert!((value_of(&o.stdout, "p") - 0.5).abs() <= 1e-9);
    assert_eq!(value_of(&o.stdout, "z"), 0.0);

    let o = run(&["eval", &coin, "mu X. (<a><a>tt (+) X)"]);
    assert_eq!(value_of(&o.stdout, "p"), 1.0);
    let o = run(&["eval", &coin, "mu X. (<a><a>tt (+) X)", "--no-exact-thresholds"]);
    assert_eq!(o.code, EXIT_OK);
    assert!(value_of(&o.stdout, "p") >= 1.0 - 1e-6);

    let o = run(&["eval", &intro, "[a]<a>tt"]);
    assert_eq!(value_of(&o.stdout, "p"), 0.0);
    let o = run(&["eval", &intro, "<a><a>tt"]);
    assert!((value_of(&o.stdout, "p") - 1.0 / 3.0).abs() <= 1e-9);
}

#[test]
fn eval_reads_flags_files_and_environments() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.txt");
    let e = dir.path().join("env.txt");
    fs::write(&f, "<a>Z\n").unwrap();
    fs::write(&e, "env Z p 0.3\nenv Z z 1\n").unwrap();
    let o = run(&[
        "eval",
        "--model",
        &model("coin.plts"),
        "--formula-file",
        f.to_str().unwrap(),
        "--env",
        e.to_str().unwrap(),
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert!((value_of(&o.stdout, "p") - 0.65).abs() <= 1e-12);
}

#[test]
fn kv_report_lists_binders() {
    let o = run(&["eval", &model("coin.plts"), "nu X. <a>X", "--format", "kv"]);
    assert_eq!(o.code, EXIT_OK);
    for key in ["binder.X.method=iterate", "binder.X.converged=true", "converged=true"] {
        assert!(o.stdout.lines().any(|l| l == key), "{key} missing in\n{}", o.stdout);
    }
}

#[test]
fn input_errors_exit_one() {
    let coin = model("coin.plts");
    let dir = tempfile::tempdir().unwrap();
    let bad_model = dir.path().join("bad.plts");
    fs::write(&bad_model, "states: p\ntrans p a { q: 1 }\n").unwrap();
    let bad_env = dir.path().join("bad.env");
    fs::write(&bad_env, "env Z nowhere 0.5\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["eval", "/nonexistent/model.plts", "tt"],
        vec!["eval", &coin, "<a"],
        vec!["eval", bad_model.to_str().unwrap(), "tt"],
        vec!["eval", &coin, "Z", "--env", bad_env.to_str().unwrap()],
        vec!["eval", &coin, "tt", "--tol", "0"],
        vec!["simulate", &coin, "tt", "--samples", "0"],
        vec!["equiv", &coin, "tt", "--slack", "-1"],
        vec!["simulate", &coin, "tt", "--state", "nowhere"],
        vec!["eval"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let o = run(&args);
        assert_eq!(o.code, EXIT_INPUT, "{args:?}: {}", o.stdout);
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn nonconvergence_exits_two() {
    let o = run(&["eval", &model("coin.plts"), "nu X. <a>X", "--max-iters", "5"]);
    assert_eq!(o.code, EXIT_FAIL);
    assert!(o.stdout.contains("NONCONVERGED"));
    assert!(o.stdout.lines().any(|l| l == "converged=false"));
}

#[test]
fn arena_dump_is_stable_and_assigns_priorities() {
    let args = ["arena", &model("coin.plts"), "mu X. nu Y. <a>X && <a>Y"];
    let a = run(&args);
    assert_eq!(a.code, EXIT_OK);
    assert_eq!(a.stdout, run(&args).stdout);
    assert!(a.stdout.contains("\n  X mu 3\n  Y nu 2\n"), "{}", a.stdout);
    assert!(a.stdout.contains("0 P2 1 Top ->"));
    assert!(a.stdout.contains("1 P1 0 Bot ->"));
    assert!(a.stdout.contains("-> 14:0.5 15:0.5"));
}

#[test]
fn simulate_is_deterministic() {
    let args = ["simulate", &model("coin.plts"), "<a><a>tt", "--samples", "500", "--seed", "9"];
    let a = run(&args);
    assert_eq!(a.code, EXIT_OK, "{}", a.stderr);
    assert_eq!(a.stdout, run(&args).stdout);
    let c = run(&["simulate", &model("coin.plts"), "<a><a>tt", "--samples", "500", "--seed", "10"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn equiv_passes_on_coin_and_fails_on_injected_mismatch() {
    let coin = model("coin.plts");
    for f in ["<a><a>tt", "mu X. (<a><a>tt (+) X)"] {
        let o = run(&["equiv", &coin, f, "--samples", "2000"]);
        assert_eq!(o.code, EXIT_OK, "{f}\n{}", o.stdout);
        assert!(o.stdout.ends_with("result=PASS\n"));
    }
    let o = run(&["equiv", &coin, "<a><a>tt", "--samples", "2000", "--inject-mismatch", "0.3"]);
    assert_eq!(o.code, EXIT_FAIL);
    assert!(o.stdout.ends_with("result=FAIL\n"));
}

#[test]
fn equiv_batch_matches_golden_baseline() {
    let o = run(&["equiv", "--random", "30", "--seed", "0"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stdout);
    let want = fs::read_to_string(golden("equiv_random30.txt")).unwrap();
    assert_eq!(o.stdout, want);
}

#[test]
fn play_reaches_a_verdict_from_scripted_moves() {
    let intro = model("intro.plts");
    let o = run_with_input(&["play", &intro, "<a><a>tt", "--seed", "3"], "1\n");
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stdout.contains("focused branch"));
    assert!(o.stdout.contains("terminal state reached: Player 2 wins"), "{}", o.stdout);

    let coin = model("coin.plts");
    let o = run_with_input(&["play", &coin, "<a>tt"], "0\n");
    assert!(o.stdout.contains("forced loop forever: Player 1 wins"), "{}", o.stdout);
}

#[test]
fn play_reprompts_on_illegal_choices() {
    let o = run_with_input(&["play", &model("coin.plts"), "<a>tt"], "x\n9\n0\n");
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(o.stdout.matches("invalid choice").count(), 2);
    assert!(o.stdout.contains("Player 1 wins"));
}

#[test]
fn play_replays_identically_and_stops_at_end_of_input() {
    let args = ["play", &model("intro.plts"), "mu X. <a>X || [a]ff", "--as", "p2", "--seed", "4"];
    let a = run_with_input(&args, "0\n0\n1\n");
    assert_eq!(a.stdout, run_with_input(&args, "0\n0\n1\n").stdout);

    let o = run_with_input(&["play", &model("coin.plts"), "<a>tt"], "");
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stdout.ends_with("input ended; session aborted\n"));
}

#[test]
fn gen_is_deterministic_and_loadable() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for k in 0..2 {
        let m = dir.path().join(format!("m{k}.plts"));
        let f = dir.path().join(format!("f{k}.txt"));
        let o = run(&[
            "gen",
            "--seed",
            "7",
            "--states",
            "4",
            "--model-out",
            m.to_str().unwrap(),
            "--formula-out",
            f.to_str().unwrap(),
        ]);
        assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
        texts.push((fs::read_to_string(m).unwrap(), fs::read_to_string(f).unwrap()));
    }
    assert_eq!(texts[0], texts[1]);
    let (m, f) = &texts[0];
    let model = Plts::parse(m).unwrap();
    assert_eq!(model.num_states(), 4);
    let formula: Formula = f.trim().parse().unwrap();
    assert!(formula.is_product_normal_form());

    let o = run(&["gen", "--seed", "7", "--model-out", "/nonexistent/dir/m.plts"]);
    assert_eq!(o.code, EXIT_INPUT);
}
