//! Text, markdown, CSV and JSON renderings of assessment, psychometric and gap results.
//!
//! Output is byte-stable: ordering follows the model, counts are integers, statistics
//! use two decimals with a `.` separator.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gap::GapReport;
use crate::model::MaturityModel;
use crate::psychometrics::{ConstructStats, MtmmMatrix};
use crate::scoring::AssessmentResult;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Markdown,
    Csv,
    Json,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("report bundle has no sections")]
    Empty,
}

/// Two decimals, never `-0.00`.
pub fn fmt2(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".to_owned()
    } else {
        s
    }
}

/// A rectangular table plus an optional title and footer lines.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub title: Option<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub footer: Vec<String>,
}

impl Table {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.render_text(),
            Format::Markdown => self.render_markdown(),
            Format::Csv => self.render_csv(),
            Format::Json => unreachable!("json output serializes domain types"),
        }
    }

    fn widths(&self) -> Vec<usize> {
        let mut w: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                w[i] = w[i].max(cell.chars().count());
            }
        }
        w
    }

    fn render_text(&self) -> String {
        let widths = self.widths();
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c:<w$}"))
                .collect();
            padded.join("  ").trim_end().to_owned()
        };
        let mut out = String::new();
        if let Some(t) = &self.title {
            writeln!(out, "{t}").unwrap();
            writeln!(out).unwrap();
        }
        writeln!(out, "{}", line(&self.header)).unwrap();
        let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
        writeln!(out, "{}", rule.join("  ")).unwrap();
        for row in &self.rows {
            writeln!(out, "{}", line(row)).unwrap();
        }
        if !self.footer.is_empty() {
            writeln!(out).unwrap();
            for f in &self.footer {
                writeln!(out, "{f}").unwrap();
            }
        }
        out
    }

    fn render_markdown(&self) -> String {
        let row = |cells: &[String]| {
            let escaped: Vec<String> = cells.iter().map(|c| c.replace('|', "\\|")).collect();
            format!("| {} |", escaped.join(" | "))
        };
        let mut out = String::new();
        if let Some(t) = &self.title {
            writeln!(out, "### {t}").unwrap();
            writeln!(out).unwrap();
        }
        writeln!(out, "{}", row(&self.header)).unwrap();
        writeln!(out, "|{}", " --- |".repeat(self.header.len())).unwrap();
        for r in &self.rows {
            writeln!(out, "{}", row(r)).unwrap();
        }
        if !self.footer.is_empty() {
            writeln!(out).unwrap();
            for f in &self.footer {
                writeln!(out, "{f}").unwrap();
            }
        }
        out
    }

    fn render_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn percent_label(model: &MaturityModel) -> String {
    let f = model.pass_fraction;
    let scaled = f.numerator() as u64 * 100;
    if scaled.is_multiple_of(f.denominator() as u64) {
        format!("{}%", scaled / f.denominator() as u64)
    } else {
        format!("{}%", fmt2(f.as_f64() * 100.0))
    }
}

/// `level-3 "Extrapolate"`, or `level-0` when nothing passed.
pub fn level_phrase(model: &MaturityModel, level: u32) -> String {
    match model.level(level) {
        Some(l) => format!("level-{} \"{}\"", l.index, l.title()),
        None => format!("level-{level}"),
    }
}

/// `3 (extrapolate)`, or `0 (none)`.
pub fn bml_label(model: &MaturityModel, bml: u32) -> String {
    match model.level(bml) {
        Some(l) => format!("{bml} ({})", l.name),
        None => format!("{bml} (none)"),
    }
}

pub fn verdict_line(model: &MaturityModel, result: &AssessmentResult) -> String {
    if result.bml == 0 {
        let first = model.levels.first().map(|l| l.index).unwrap_or(1);
        format!(
            "Organization \"{}\" has not reached {}.",
            result.organization,
            level_phrase(model, first)
        )
    } else {
        format!(
            "Organization \"{}\" is at {}.",
            result.organization,
            level_phrase(model, result.bml)
        )
    }
}

pub fn summary_table(results: &[AssessmentResult], model: &MaturityModel) -> Table {
    let mut header = vec![
        "Maturity Level".to_owned(),
        "Total Questions".to_owned(),
        format!("Pass Threshold {}", percent_label(model)),
    ];
    header.extend(
        results
            .iter()
            .map(|r| format!("Organization \"{}\" NA", r.organization)),
    );
    let rows = model
        .levels
        .iter()
        .map(|level| {
            let n = level.questions.len() as u32;
            let mut row = vec![
                level.title(),
                n.to_string(),
                crate::scoring::pass_threshold(n, model.pass_fraction).to_string(),
            ];
            row.extend(results.iter().map(|r| {
                r.level(level.index)
                    .map(|s| s.n_agreed.to_string())
                    .unwrap_or_default()
            }));
            row
        })
        .collect();
    Table {
        title: Some("Summary of Assessment Results".into()),
        header,
        rows,
        footer: results.iter().map(|r| verdict_line(model, r)).collect(),
    }
}

/// Per-level agreement counts for each organization, one row per level.
pub fn render_summary(
    results: &[AssessmentResult],
    model: &MaturityModel,
    format: Format,
) -> String {
    match format {
        Format::Json => json(results),
        f => summary_table(results, model).render(f),
    }
}

pub fn detail_table(result: &AssessmentResult, model: &MaturityModel) -> Table {
    let mut header = Vec::new();
    let mut sub = Vec::new();
    for level in &model.levels {
        header.push(format!("{} Level-{}", level.title(), level.index));
        header.push(String::new());
        sub.push("Question #".to_owned());
        sub.push("Value".to_owned());
    }
    let depth = model
        .levels
        .iter()
        .map(|l| l.questions.len())
        .max()
        .unwrap_or(0);
    let mut rows = vec![sub];
    for i in 0..depth {
        let mut row = Vec::with_capacity(header.len());
        for level in &model.levels {
            match level.questions.get(i) {
                Some(q) => {
                    row.push(q.id.table_label());
                    row.push(
                        result
                            .per_question_ratings
                            .get(&q.id)
                            .map(|r| r.to_string())
                            .unwrap_or_default(),
                    );
                }
                None => {
                    row.push(String::new());
                    row.push(String::new());
                }
            }
        }
        rows.push(row);
    }
    Table {
        title: Some(format!(
            "Details of Assessment Result of Organization \"{}\"",
            result.organization
        )),
        header,
        rows,
        footer: Vec::new(),
    }
}

/// One (question, value) column pair per level, in model order.
pub fn render_detail(result: &AssessmentResult, model: &MaturityModel, format: Format) -> String {
    match format {
        Format::Json => json(result),
        f => detail_table(result, model).render(f),
    }
}

fn construct_grid(
    title: &str,
    stats: &[ConstructStats],
    model: &MaturityModel,
    value: impl Fn(&ConstructStats) -> Option<String>,
    star_note: &str,
) -> Table {
    let mut practices: Vec<_> = model.practices.iter().collect();
    practices.sort_by_key(|p| p.id);
    let mut header = vec!["Maturity Level".to_owned()];
    header.extend(practices.iter().map(|p| model.practice_label(p.id)));
    let mut not_computable = Vec::new();
    let rows = model
        .levels
        .iter()
        .map(|level| {
            let mut row = vec![level.title()];
            for p in &practices {
                let cell = match stats
                    .iter()
                    .find(|s| s.level == level.index && s.practice == p.id)
                {
                    None => String::new(),
                    Some(s) if s.is_single_item() => "*".to_owned(),
                    Some(s) => value(s).unwrap_or_else(|| {
                        if let Some(d) = &s.diagnostic {
                            not_computable.push(format!("{}: {d}", s.construct));
                        }
                        "n/c".to_owned()
                    }),
                };
                row.push(cell);
            }
            row
        })
        .collect();
    let mut footer = vec![format!("* {star_note}")];
    if !not_computable.is_empty() {
        footer.push(format!("n/c not computable: {}", not_computable.join("; ")));
    }
    Table {
        title: Some(title.to_owned()),
        header,
        rows,
        footer,
    }
}

pub fn alpha_table(stats: &[ConstructStats], model: &MaturityModel) -> Table {
    construct_grid(
        "Reliability Analysis of Business Practices (coefficient alpha)",
        stats,
        model,
        |s| s.alpha.map(fmt2),
        "Construct has only one item; coefficient alpha cannot be evaluated",
    )
}

pub fn eigenvalue_table(stats: &[ConstructStats], model: &MaturityModel) -> Table {
    construct_grid(
        "Construct Validity of Business Practices (first eigenvalue)",
        stats,
        model,
        |s| s.first_eigenvalue.map(fmt2),
        "Construct has only one item; PCA is not possible",
    )
}

pub fn retained_table(stats: &[ConstructStats], model: &MaturityModel) -> Table {
    construct_grid(
        "Retained Components (eigenvalue > 1)",
        stats,
        model,
        |s| s.retained_components.map(|n| n.to_string()),
        "Construct has only one item; PCA is not possible",
    )
}

pub fn mtmm_table(mtmm: &MtmmMatrix, model: &MaturityModel) -> Table {
    let title_of = |l: u32| {
        model
            .level(l)
            .map(|s| s.title())
            .unwrap_or_else(|| l.to_string())
    };
    let mut header = vec![String::new()];
    header.extend(mtmm.levels.iter().map(|&l| title_of(l)));
    let rows = mtmm
        .levels
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let mut row = vec![title_of(l)];
            for j in 0..mtmm.levels.len() {
                row.push(if j <= i {
                    mtmm.cells[i][j].map(fmt2).unwrap_or_else(|| "-".into())
                } else {
                    String::new()
                });
            }
            row
        })
        .collect();
    Table {
        title: Some("Convergent and Discriminant Validity Analysis".into()),
        header,
        rows,
        footer: vec![
            "Diagonal: mean inter-item correlation within each practice at the level.".into(),
            "Off-diagonal: mean correlation over all item pairs crossing the two levels.".into(),
        ],
    }
}

#[derive(Serialize)]
struct PsychJson<'a> {
    constructs: &'a [ConstructStats],
    mtmm: Option<&'a MtmmMatrix>,
}

/// Alpha grid, first-eigenvalue grid, retained-component grid and the MTMM triangle.
pub fn render_psych(
    constructs: &[ConstructStats],
    mtmm: Option<&MtmmMatrix>,
    model: &MaturityModel,
    format: Format,
) -> String {
    if format == Format::Json {
        return json(&PsychJson { constructs, mtmm });
    }
    let mut tables = vec![
        alpha_table(constructs, model),
        eigenvalue_table(constructs, model),
        retained_table(constructs, model),
    ];
    if let Some(m) = mtmm {
        tables.push(mtmm_table(m, model));
    }
    join_tables(&tables, format)
}

fn join_tables(tables: &[Table], format: Format) -> String {
    tables
        .iter()
        .map(|t| t.render(format))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn gap_tables(gap: &GapReport, model: &MaturityModel) -> Vec<Table> {
    let weakest = Table {
        title: Some(format!(
            "Practices at level {} (weakest first)",
            gap.target_level
        )),
        header: vec![
            "Practice".into(),
            "Name".into(),
            "Agreed".into(),
            "Total".into(),
        ],
        rows: gap
            .weakest_practices
            .iter()
            .map(|p| {
                vec![
                    p.practice.to_string(),
                    model
                        .practice(p.practice.practice)
                        .map(|x| x.name.clone())
                        .unwrap_or_default(),
                    p.agreed.to_string(),
                    p.total.to_string(),
                ]
            })
            .collect(),
        footer: Vec::new(),
    };
    let candidates = Table {
        title: Some("Flip candidates (closest to agreement first)".into()),
        header: vec!["Rank".into(), "Question".into(), "Text".into()],
        rows: gap
            .flip_candidates
            .iter()
            .enumerate()
            .map(|(i, id)| {
                let text = model
                    .level(id.level)
                    .and_then(|l| l.questions.iter().find(|q| &q.id == id))
                    .map(|q| q.text.clone())
                    .unwrap_or_default();
                vec![(i + 1).to_string(), id.to_string(), text]
            })
            .collect(),
        footer: Vec::new(),
    };
    vec![weakest, candidates]
}

pub fn render_gap(gap: &GapReport, model: &MaturityModel, format: Format) -> String {
    let tables = gap_tables(gap, model);
    match format {
        Format::Json => json(gap),
        Format::Csv => join_tables(&tables, format),
        f => {
            let mut out = String::new();
            if f == Format::Markdown {
                writeln!(
                    out,
                    "### Gap Analysis for Organization \"{}\"",
                    gap.organization
                )
                .unwrap();
            } else {
                writeln!(
                    out,
                    "Gap Analysis for Organization \"{}\"",
                    gap.organization
                )
                .unwrap();
            }
            writeln!(out).unwrap();
            let bullet = if f == Format::Markdown { "- " } else { "" };
            writeln!(
                out,
                "{bullet}current BML: {}",
                bml_label(model, gap.current_bml)
            )
            .unwrap();
            writeln!(
                out,
                "{bullet}target level: {}",
                bml_label(model, gap.target_level)
            )
            .unwrap();
            writeln!(
                out,
                "{bullet}agreed: {} (pass threshold {})",
                gap.n_agreed, gap.pass_threshold
            )
            .unwrap();
            writeln!(out, "{bullet}deficit: {}", gap.deficit).unwrap();
            for t in &tables {
                writeln!(out).unwrap();
                out.push_str(&t.render(f));
            }
            out
        }
    }
}

/// Everything one report run produced. At least one section must be present.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ReportBundle {
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub assessments: Vec<AssessmentResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constructs: Option<Vec<ConstructStats>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mtmm: Option<MtmmMatrix>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub gaps: Vec<GapReport>,
    #[serde(skip)]
    pub format: Format,
}

impl ReportBundle {
    pub fn is_empty(&self) -> bool {
        self.assessments.is_empty()
            && self.constructs.is_none()
            && self.mtmm.is_none()
            && self.gaps.is_empty()
    }

    pub fn render(&self, model: &MaturityModel) -> Result<String, ReportError> {
        if self.is_empty() {
            return Err(ReportError::Empty);
        }
        if self.format == Format::Json {
            return Ok(json(self));
        }
        let mut parts = Vec::new();
        for r in &self.assessments {
            parts.push(render_detail(r, model, self.format));
        }
        if !self.assessments.is_empty() {
            parts.push(render_summary(&self.assessments, model, self.format));
            if self.format != Format::Csv {
                let verdicts: Vec<String> = self
                    .assessments
                    .iter()
                    .map(|r| format!("{}: BML: {}", r.organization, bml_label(model, r.bml)))
                    .collect();
                parts.push(verdicts.join("\n") + "\n");
            }
        }
        if self.constructs.is_some() || self.mtmm.is_some() {
            parts.push(render_psych(
                self.constructs.as_deref().unwrap_or(&[]),
                self.mtmm.as_ref(),
                model,
                self.format,
            ));
        }
        for g in &self.gaps {
            parts.push(render_gap(g, model, self.format));
        }
        Ok(parts.join("\n"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::bundled;

    #[test]
    fn fmt2_has_no_negative_zero() {
        assert_eq!(fmt2(-0.001), "0.00");
        assert_eq!(fmt2(0.875), "0.88");
        assert_eq!(fmt2(1.0), "1.00");
    }

    #[test]
    fn empty_summary_is_header_only() {
        let out = render_summary(&[], bundled(), Format::Csv);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(
            lines[0],
            "Maturity Level,Total Questions,Pass Threshold 80%"
        );
        assert_eq!(lines[1], "Reactive,12,10");
        assert_eq!(lines.len(), 6);
    }

    #[test]
    fn markdown_escapes_pipes() {
        let t = Table {
            title: None,
            header: vec!["a|b".into()],
            rows: vec![vec!["c".into()]],
            footer: vec![],
        };
        assert_eq!(t.render(Format::Markdown), "| a\\|b |\n| --- |\n| c |\n");
    }

    #[test]
    fn text_table_aligns_columns() {
        let t = Table {
            title: None,
            header: vec!["x".into(), "long".into()],
            rows: vec![vec!["abc".into(), "1".into()]],
            footer: vec![],
        };
        assert_eq!(t.render(Format::Text), "x    long\n---  ----\nabc  1\n");
    }

    #[test]
    fn empty_bundle_is_an_error() {
        assert!(matches!(
            ReportBundle::default().render(bundled()),
            Err(ReportError::Empty)
        ));
    }
}
