//! Staged, questionnaire-based maturity assessment.
//!
//! A [`model::MaturityModel`] describes levels, practices and their statements. Responses
//! are rated on a four-value performance scale; a level passes when enough statements are
//! agreed, and the maturity level is the highest passing level. The crate also validates
//! instruments psychometrically and renders reports.

pub mod eigen;
pub mod gap;
pub mod ids;
pub mod model;
pub mod psychometrics;
pub mod report;
pub mod responses;
pub mod scoring;
pub mod stats;

pub use gap::{analyze_gap, GapReport, Target};
pub use ids::{parse_practice_id, parse_question_id, PracticeId, QuestionId};
pub use model::{bundled, load_model, save_model, validate_model, MaturityModel};
pub use psychometrics::{construct_validity, mtmm, ConstructStats, MtmmMatrix, PilotDataset};
pub use report::{Format, ReportBundle};
pub use scoring::{
    aggregate_respondents, pass_threshold, rate_answer, rate_percent, rate_scale_point,
    score_assessment, AssessmentResult, BlankPolicy, Encoding, PerformanceRating, ResponseSet,
    ScalePoint,
};
