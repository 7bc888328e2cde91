#![allow(dead_code)]

use std::path::PathBuf;

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn model(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "models", name].iter().collect();
    p.to_string_lossy().into_owned()
}

pub fn golden(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "tests", "golden", name].iter().collect()
}

/// Run the command line in-process with the given stdin text.
pub fn run_with_input(args: &[&str], input: &str) -> Output {
    let mut argv = vec!["plmu"];
    argv.extend_from_slice(args);
    let mut stdin = input.as_bytes();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = plmu_cli::run(argv, &mut stdin, &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

pub fn run(args: &[&str]) -> Output {
    run_with_input(args, "")
}

/// The value printed for `state` by `eval`.
pub fn value_of(stdout: &str, state: &str) -> f64 {
    let prefix = format!("{state}=");
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no value for {state} in\n{stdout}"))
        .parse()
        .unwrap()
}
