mod common;

use common::*;
use maturity_core::gap::analyze_gap;
use maturity_core::report::{render_detail, render_summary, Format, ReportBundle};
use maturity_core::responses::{load_response_file, parse_response_csv, write_response_csv};
use maturity_core::scoring::{BlankPolicy, Encoding};
use maturity_core::{bundled, score_assessment, Target};

#[test]
fn org_a_counts_and_level() {
    let r = score(&org_a());
    assert_eq!(agreed_counts(&r), vec![0, 16, 19, 10, 4]);
    let thresholds: Vec<u32> = r.per_level.iter().map(|s| s.pass_threshold).collect();
    assert_eq!(thresholds, vec![10, 14, 18, 18, 14]);
    assert_eq!(r.bml, 3);
}

#[test]
fn org_b_counts_and_level() {
    let r = score(&org_b());
    assert_eq!(agreed_counts(&r), vec![0, 0, 22, 21, 9]);
    assert_eq!(r.bml, 4);
}

#[test]
fn summary_matches_golden() {
    let results = [score(&org_a()), score(&org_b())];
    let out = render_summary(&results, bundled(), Format::Markdown);
    assert_eq!(out, golden("table_ix.md"));
}

#[test]
fn detail_matches_golden() {
    let out = render_detail(&score(&org_a()), bundled(), Format::Markdown);
    assert_eq!(out, golden("table_viii.md"));
}

#[test]
fn rendering_is_repeatable() {
    let results = [score(&org_a()), score(&org_b())];
    for format in [Format::Text, Format::Markdown, Format::Csv, Format::Json] {
        let bundle = ReportBundle {
            assessments: results.to_vec(),
            gaps: results
                .iter()
                .map(|r| analyze_gap(r, bundled(), Target::Auto).unwrap())
                .collect(),
            format,
            ..Default::default()
        };
        assert_eq!(
            bundle.render(bundled()).unwrap(),
            bundle.render(bundled()).unwrap()
        );
    }
}

fn markdown_cells(md: &str) -> Vec<String> {
    md.lines()
        .filter(|l| l.starts_with('|') && !l.contains("---"))
        .flat_map(|l| {
            l.trim_matches('|')
                .split('|')
                .map(|c| c.trim().to_owned())
                .collect::<Vec<_>>()
        })
        .collect()
}

fn csv_cells(text: &str) -> Vec<String> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes())
        .records()
        .flat_map(|r| r.unwrap().iter().map(str::to_owned).collect::<Vec<_>>())
        .collect()
}

#[test]
fn csv_and_markdown_carry_the_same_cells() {
    let results = [score(&org_a()), score(&org_b())];
    for (md, csv) in [
        (
            render_summary(&results, bundled(), Format::Markdown),
            render_summary(&results, bundled(), Format::Csv),
        ),
        (
            render_detail(&results[0], bundled(), Format::Markdown),
            render_detail(&results[0], bundled(), Format::Csv),
        ),
    ] {
        let mut a = markdown_cells(&md);
        let mut b = csv_cells(&csv);
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }
}

#[test]
fn csv_and_json_fixtures_agree() {
    let from_csv = load_response_file(&fixture("org_a.csv"), Some("A"), Encoding::Value).unwrap();
    let from_json = org_a();
    assert_eq!(from_csv.answers, from_json.answers);
    assert_eq!(score(&from_csv), score(&from_json));

    let again =
        parse_response_csv(&write_response_csv(&from_json), "A", "x", Encoding::Value).unwrap();
    assert_eq!(again.answers, from_json.answers);
}

#[test]
fn excluding_blanks_lowers_thresholds() {
    let mut rs = org_a();
    rs.answers.clear();
    let r = score_assessment(bundled(), &rs, BlankPolicy::Exclude).unwrap();
    assert!(r
        .per_level
        .iter()
        .all(|s| s.n_questions == 0 && s.pass_threshold == 0));
    let r = score_assessment(bundled(), &rs, BlankPolicy::RateAsOne).unwrap();
    assert_eq!(r.bml, 0);
}
