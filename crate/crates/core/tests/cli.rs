mod common;

use std::process::{Command, Output};

use common::fixture;
use maturity_core::bundled;
use maturity_core::model::save_model;

fn maturity(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maturity"))
        .args(args)
        .env_remove("MATURITY_MODEL")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_bundled() {
    let o = maturity(&["validate"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());
}

#[test]
fn validate_reports_a_missing_question() {
    let dir = tempfile::tempdir().unwrap();
    let mut m = bundled().clone();
    let removed = m.levels[2].questions.remove(2);
    assert_eq!(removed.id.to_string(), "Q.1.3.1.3");
    let file = dir.path().join("broken.json");
    std::fs::write(&file, save_model(&m)).unwrap();
    let o = maturity(&["validate", "--model", path(&file)]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).lines().count(), 1, "{}", stdout(&o));
}

#[test]
fn unreadable_model_is_an_io_failure() {
    let o = maturity(&["validate", "--model", "/nonexistent/model.json"]);
    assert_eq!(o.status.code(), Some(2));
    let o = maturity(&["score", path(&fixture("missing.json"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn score_org_a() {
    let o = maturity(&["score", path(&fixture("org_a.json"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stdout(&o).contains("BML: 3 (extrapolate)"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn score_markdown_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.md");
    let o = maturity(&[
        "score",
        "--format",
        "markdown",
        "--output",
        path(&out),
        path(&fixture("org_a.json")),
        path(&fixture("org_b.json")),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.contains(&common::golden("table_ix.md")));
}

#[test]
fn two_respondents_aggregate_to_lower_median() {
    let dir = tempfile::tempdir().unwrap();
    for (name, v) in [("x1", 3), ("x2", 1)] {
        std::fs::write(
            dir.path().join(format!("{name}.json")),
            format!(
                r#"{{"organization":"X","respondent":"{name}","encoding":"value","answers":{{"Q.1.1.1.1":{v}}}}}"#
            ),
        )
        .unwrap();
    }
    let o = maturity(&[
        "score",
        "--format",
        "json",
        path(&dir.path().join("x1.json")),
        path(&dir.path().join("x2.json")),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["assessments"][0]["per_question_ratings"]["Q.1.1.1.1"], 1);
}

#[test]
fn unknown_question_is_a_domain_failure() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.csv");
    std::fs::write(&file, "question_id,answer\nQ.9.9.9.9,3\n").unwrap();
    let o = maturity(&["score", path(&file)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Q.9.9.9.9"));
}

#[test]
fn psych_needs_two_respondents() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("pilot_synthetic.csv")).unwrap();
    let one: String = text.lines().take(2).map(|l| format!("{l}\n")).collect();
    let file = dir.path().join("one.csv");
    std::fs::write(&file, one).unwrap();
    let o = maturity(&["psych", path(&file)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn psych_writes_scree_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("psych.md");
    let o = maturity(&[
        "psych",
        "--format",
        "markdown",
        "--output",
        path(&out),
        path(&fixture("pilot_synthetic.csv")),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let report = std::fs::read_to_string(&out).unwrap();
    assert!(report.contains("Convergent and Discriminant Validity"));
    let scree = std::fs::read_to_string(dir.path().join("psych.scree.csv")).unwrap();
    assert!(scree.starts_with("construct,component,eigenvalue\n"));
    assert!(scree.lines().count() > 30);
}

#[test]
fn gap_for_org_a() {
    let o = maturity(&["gap", "--target", "4", path(&fixture("org_a.json"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("deficit: 8"), "{}", stdout(&o));
    let o = maturity(&["gap", "--target", "9", path(&fixture("org_a.json"))]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn full_report() {
    let o = maturity(&[
        "report",
        "--pilot",
        path(&fixture("pilot_synthetic.csv")),
        path(&fixture("org_a.json")),
        path(&fixture("org_b.json")),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("BML: 3 (extrapolate)"));
    assert!(text.contains("BML: 4 (proactive)"));
    assert!(text.contains("Gap Analysis"));
}

#[test]
fn csv_response_with_org_flag() {
    let o = maturity(&["score", "--org", "A", path(&fixture("org_a.csv"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("BML: 3 (extrapolate)"));
}
