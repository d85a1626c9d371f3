//! `maturity` command line: validate, score, psych, gap, report.
//!
//! Exit codes: 0 success, 1 domain or validation failure, 2 I/O or schema failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use maturity_core::gap::{analyze_gap, GapError, Target};
use maturity_core::model::{self, MaturityModel, ModelError};
use maturity_core::psychometrics::{self, construct_validity, mtmm, PsychError};
use maturity_core::report::{self, Format, ReportBundle};
use maturity_core::responses::{load_response_file, ResponseError};
use maturity_core::scoring::{
    aggregate_respondents, score_assessment, AssessmentResult, BlankPolicy, Encoding, ResponseSet,
    ScoreError,
};

pub const MODEL_ENV: &str = "MATURITY_MODEL";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Domain(_) => ExitCode::from(1),
            CliError::Io(_) => ExitCode::from(2),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<ResponseError> for CliError {
    fn from(e: ResponseError) -> Self {
        match e {
            ResponseError::Invalid(inner) => CliError::Domain(inner.to_string()),
            other => CliError::Io(other.to_string()),
        }
    }
}

impl From<ScoreError> for CliError {
    fn from(e: ScoreError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<GapError> for CliError {
    fn from(e: GapError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<PsychError> for CliError {
    fn from(e: PsychError) -> Self {
        match e {
            PsychError::Io { .. } | PsychError::Csv { .. } => CliError::Io(e.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "maturity",
    version,
    about = "Staged questionnaire maturity assessment"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a model's structure; prints one violation per line.
    Validate(ModelArgs),
    /// Score response files and print detail, summary and verdicts.
    Score(ScoreArgs),
    /// Reliability and validity analysis of a pilot data CSV.
    Psych(PsychArgs),
    /// What blocks the next (or a given) level.
    Gap(GapArgs),
    /// Combined report: scoring, optional psychometrics, gap analysis.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Model JSON path, or `bundled`.
    #[arg(long, env = MODEL_ENV, default_value = "bundled")]
    pub model: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BlankPolicyArg {
    #[value(name = "rate-as-1")]
    RateAsOne,
    Exclude,
}

impl From<BlankPolicyArg> for BlankPolicy {
    fn from(a: BlankPolicyArg) -> Self {
        match a {
            BlankPolicyArg::RateAsOne => BlankPolicy::RateAsOne,
            BlankPolicyArg::Exclude => BlankPolicy::Exclude,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EncodingArg {
    Scale,
    Value,
    Percent,
}

impl From<EncodingArg> for Encoding {
    fn from(a: EncodingArg) -> Self {
        match a {
            EncodingArg::Scale => Encoding::Scale,
            EncodingArg::Value => Encoding::Value,
            EncodingArg::Percent => Encoding::Percent,
        }
    }
}

#[derive(Debug, Args)]
pub struct ResponseArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Only use responses of this organization (also names CSV inputs).
    #[arg(long)]
    pub org: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[arg(long = "blank-policy", value_enum, default_value = "rate-as-1")]
    pub blank_policy: BlankPolicyArg,
    /// Encoding of CSV response files (JSON files declare their own).
    #[arg(long, value_enum, default_value = "value")]
    pub encoding: EncodingArg,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Response files (.json or .csv).
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub responses: ResponseArgs,
}

#[derive(Debug, Args)]
pub struct PsychArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Write the report here; scree data goes to `<stem>.scree.csv` beside it.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Pilot data CSV (`respondent,Q.…,…`).
    pub pilot: PathBuf,
}

#[derive(Debug, Args)]
pub struct GapArgs {
    #[command(flatten)]
    pub responses: ResponseArgs,
    /// Target level; defaults to one above the current level.
    #[arg(long)]
    pub target: Option<u32>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub responses: ResponseArgs,
    /// Pilot data CSV to include psychometric tables.
    #[arg(long)]
    pub pilot: Option<PathBuf>,
    #[arg(long)]
    pub target: Option<u32>,
}

pub fn load_model_arg(arg: &str) -> Result<MaturityModel, CliError> {
    if arg == "bundled" {
        Ok(model::bundled().clone())
    } else {
        Ok(model::load_model_file(Path::new(arg))?)
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Io(format!("failed to write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Loads every response file, keeps those of `--org` if given, aggregates multiple
/// respondents per organization and scores each organization.
fn score_all(
    model: &MaturityModel,
    args: &ResponseArgs,
) -> Result<Vec<AssessmentResult>, CliError> {
    let mut groups: Vec<(String, Vec<ResponseSet>)> = Vec::new();
    for path in &args.files {
        let set = load_response_file(path, args.org.as_deref(), args.encoding.into())?;
        set.check_against(model)?;
        if args.org.as_ref().is_some_and(|o| o != &set.organization) {
            continue;
        }
        match groups.iter_mut().find(|(org, _)| org == &set.organization) {
            Some((_, sets)) => sets.push(set),
            None => groups.push((set.organization.clone(), vec![set])),
        }
    }
    if groups.is_empty() {
        return Err(CliError::Domain(format!(
            "no responses for organization {:?}",
            args.org.as_deref().unwrap_or_default()
        )));
    }
    groups
        .into_iter()
        .map(|(_, sets)| {
            let combined = if sets.len() == 1 {
                sets.into_iter().next().unwrap()
            } else {
                aggregate_respondents(model, &sets)?
            };
            Ok(score_assessment(
                model,
                &combined,
                args.blank_policy.into(),
            )?)
        })
        .collect()
}

fn target_of(t: Option<u32>) -> Target {
    t.map_or(Target::Auto, Target::Level)
}

fn load_pilot(path: &Path) -> Result<psychometrics::PilotDataset, CliError> {
    let text = fs::read_to_string(path).map_err(|source| PsychError::Io {
        path: path.to_owned(),
        source,
    })?;
    Ok(psychometrics::parse_pilot_csv(&text)?)
}

pub fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Validate(args) => {
            let m = load_model_arg(&args.model)?;
            let report = model::validate_model(&m);
            for v in &report.violations {
                println!("{v}");
            }
            Ok(if report.is_valid() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Score(ScoreArgs { responses }) => {
            let m = load_model_arg(&responses.model.model)?;
            let results = score_all(&m, &responses)?;
            let bundle = ReportBundle {
                assessments: results,
                format: responses.format,
                ..Default::default()
            };
            emit(responses.output.as_deref(), &render(&bundle, &m)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Psych(args) => {
            let m = load_model_arg(&args.model.model)?;
            let pilot = load_pilot(&args.pilot)?;
            let stats = construct_validity(&pilot, &m)?;
            let matrix = mtmm(&pilot, &m)?;
            let text = report::render_psych(&stats, Some(&matrix), &m, args.format);
            if let Some(out) = &args.output {
                let stem = out
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "report".into());
                let scree = out.with_file_name(format!("{stem}.scree.csv"));
                emit(Some(&scree), &psychometrics::scree_csv(&stats))?;
            }
            emit(args.output.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Gap(args) => {
            let r = &args.responses;
            let m = load_model_arg(&r.model.model)?;
            let gaps = score_all(&m, r)?
                .iter()
                .map(|res| analyze_gap(res, &m, target_of(args.target)))
                .collect::<Result<Vec<_>, _>>()?;
            let bundle = ReportBundle {
                gaps,
                format: r.format,
                ..Default::default()
            };
            emit(r.output.as_deref(), &render(&bundle, &m)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Report(args) => {
            let r = &args.responses;
            let m = load_model_arg(&r.model.model)?;
            let results = score_all(&m, r)?;
            let gaps = results
                .iter()
                .map(|res| analyze_gap(res, &m, target_of(args.target)))
                .collect::<Result<Vec<_>, _>>()?;
            let (constructs, matrix) = match &args.pilot {
                Some(p) => {
                    let pilot = load_pilot(p)?;
                    (
                        Some(construct_validity(&pilot, &m)?),
                        Some(mtmm(&pilot, &m)?),
                    )
                }
                None => (None, None),
            };
            let bundle = ReportBundle {
                assessments: results,
                constructs,
                mtmm: matrix,
                gaps,
                format: r.format,
            };
            emit(r.output.as_deref(), &render(&bundle, &m)?)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn render(bundle: &ReportBundle, m: &MaturityModel) -> Result<String, CliError> {
    bundle
        .render(m)
        .map_err(|e| CliError::Domain(e.to_string()))
}
