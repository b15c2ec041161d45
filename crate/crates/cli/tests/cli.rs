use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn granlower(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_granlower"))
        .args(args)
        .env_remove("GRANLOWER_MAX_PERIOD")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(name: &str) -> String {
    fixture(name).to_str().unwrap().to_string()
}

#[test]
fn gregorian_year_period() {
    let o = granlower(&["convert", &path("gregorian.cal"), "--target", "year", "--minimize"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["P"], 146097);
    assert_eq!(v["N"], 400);
    assert_eq!(v["labels"].as_array().unwrap().len(), 400);
}

#[test]
fn week_json() {
    let o = granlower(&["convert", &path("weeks.cal"), "--target", "week"]);
    assert_eq!(
        stdout(&o),
        "{\"P\":7,\"N\":1,\"labels\":[{\"label\":1,\"bottoms\":[1,2,3,4,5,6,7]}],\"bounds\":null}\n"
    );
}

#[test]
fn all_definitions_in_file_order() {
    let o = granlower(&["convert", &path("weeks.cal")]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|d| d["name"].as_str().unwrap()).collect();
    assert_eq!(&names[..4], ["day", "week", "weekparts", "weekpair"]);
    assert_eq!(names.last(), Some(&"thirdweek"));
    assert_eq!(v[0]["rep"]["P"], 1);
}

#[test]
fn bottom_only_calendar() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bare.cal");
    std::fs::write(&file, "calendar bare bottom tick;\n").unwrap();
    let o = granlower(&["convert", file.to_str().unwrap(), "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "# tick\n1: 1 | P=1 N=1 bounds=none\n");
}

#[test]
fn text_format_and_bounds() {
    let o = granlower(&["convert", &path("weeks.cal"), "--target", "thirdweek", "--format", "text"]);
    assert_eq!(stdout(&o), "1: 1 2 3 4 5 6 7 | P=7 N=1 bounds=[3,10]\n");
    let o = granlower(&["convert", &path("weeks.cal"), "--target", "weekend", "--format", "text"]);
    assert_eq!(stdout(&o), "6: 6 | P=7 N=7 bounds=none\n7: 7 | P=7 N=7 bounds=none\n");
}

#[test]
fn minimize_flag() {
    let args = |flag| granlower(&["convert", &path("weeks.cal"), "--target", "g2", flag, "--format", "text"]);
    assert_eq!(stdout(&args("--minimize")), "1: 1 2 3 4 5 6 7 | P=7 N=1 bounds=none\n");
    assert_eq!(
        stdout(&args("--no-minimize")),
        "1: 1 2 3 4 5 6 7 | P=14 N=2 bounds=none\n2: 8 9 10 11 12 13 14 | P=14 N=2 bounds=none\n"
    );
}

#[test]
fn gstp_labels() {
    let o = granlower(&["convert", &path("weeks.cal"), "--target", "usweek", "--gstp", "--format", "text"]);
    assert_eq!(stdout(&o), "0: 0 1 2 3 4 5 6 | P=7 N=1 bounds=none\n");
}

#[test]
fn expand_labels() {
    let o = granlower(&["expand", &path("weeks.cal"), "weekparts", "--labels", "5..6"]);
    assert_eq!(stdout(&o), "5: 15 16 17 18 19\n6: 20 21\n");
    let o = granlower(&["expand", &path("weeks.cal"), "day", "--labels", "-2..0"]);
    assert_eq!(stdout(&o), "-2: -2\n-1: -1\n0: 0\n");
    let o = granlower(&["expand", &path("weeks.cal"), "thirdweek", "--labels", "2..3"]);
    assert_eq!(stdout(&o), "2: empty\n3: 15 16 17 18 19 20 21\n");
}

#[test]
fn up_instant() {
    let run = |t: &str| stdout(&granlower(&["up", &path("weeks.cal"), "sunday", "--instant", t]));
    assert_eq!(run("7"), "7\n");
    assert_eq!(run("6"), "none\n");
    assert_eq!(run("-7"), "-7\n");
    let o = granlower(&["up", &path("weeks.cal"), "week", "--instant", "-1"]);
    assert_eq!(stdout(&o), "0\n");
}

#[test]
fn verify_fixtures() {
    let o = granlower(&["verify", &path("weeks.cal")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("17 of 17 definitions pass"));
    let o = granlower(&["verify", &path("weeks.cal"), "--seed", "11", "--no-minimize"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn verify_gregorian() {
    let o = granlower(&["verify", &path("gregorian.cal")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("month: PASS (4800 granules)"));
}

#[test]
fn injected_fault_fails() {
    let o = granlower(&["verify", &path("weeks.cal"), "--inject-fault"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("FAIL"));
    assert_eq!(stdout(&o).matches("FAIL").count(), 1);
}

#[test]
fn small_window_grows() {
    let o = granlower(&["verify", &path("weeks.cal"), "--window", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning: window 5"));
}

#[test]
fn exit_codes() {
    assert_eq!(granlower(&[]).status.code(), Some(1));
    assert_eq!(granlower(&["convert", "/nonexistent.cal"]).status.code(), Some(1));
    assert_eq!(granlower(&["up", &path("weeks.cal"), "fortnight", "--instant", "1"]).status.code(), Some(1));
    let o = granlower(&["convert", &path("faulty.cal")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Subset must be outermost"));
    let o = Command::new(env!("CARGO_BIN_EXE_granlower"))
        .args(["convert", &path("gregorian.cal")])
        .env("GRANLOWER_MAX_PERIOD", "1000")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("leap4") && stderr(&o).contains("exceeds the limit 1000"));
}

#[test]
fn output_is_deterministic() {
    let a = granlower(&["convert", &path("gregorian.cal")]);
    let b = granlower(&["convert", &path("gregorian.cal")]);
    assert_eq!(a.stdout, b.stdout);
    let a = granlower(&["verify", &path("weeks.cal"), "--seed", "5"]);
    let b = granlower(&["verify", &path("weeks.cal"), "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
}
