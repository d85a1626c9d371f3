//! Rating method: performance-scale mapping, agreement counts, pass thresholds and the
//! business maturity level (BML).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::{PracticeId, QuestionId};
use crate::model::{MaturityModel, PassFraction};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoreError {
    #[error("unknown question id {0}")]
    UnknownQuestion(QuestionId),
    #[error("{question}: answer is {found} but the response set is {expected}-encoded")]
    EncodingMismatch {
        question: QuestionId,
        expected: Encoding,
        found: Encoding,
    },
    #[error("percent {0} outside [0, 100]")]
    OutOfRangePercent(f64),
    #[error("{question}: {value} is not a valid {encoding} answer")]
    InvalidAnswer {
        question: QuestionId,
        encoding: Encoding,
        value: f64,
    },
    #[error("duplicate answer for {0}")]
    DuplicateQuestion(QuestionId),
    #[error("response sets mix organizations {expected:?} and {found:?}")]
    MixedOrganization { expected: String, found: String },
    #[error("no response sets to aggregate")]
    EmptyInput,
}

/// A point on the five-point agreement scale (5 = complete agree … 2 = not agree, 1 = doesn't apply).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct ScalePoint(u8);

impl ScalePoint {
    pub const DOESNT_APPLY: ScalePoint = ScalePoint(1);

    pub fn new(point: u8) -> Option<Self> {
        (1..=5).contains(&point).then_some(Self(point))
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn label(self) -> &'static str {
        match self.0 {
            5 => "Complete Agree",
            4 => "Largely Agree",
            3 => "Partially Agree",
            2 => "Not Agree",
            _ => "Doesn't Apply",
        }
    }
}

impl TryFrom<u8> for ScalePoint {
    type Error = String;
    fn try_from(v: u8) -> Result<Self, Self::Error> {
        Self::new(v).ok_or_else(|| format!("scale point {v} outside 1..=5"))
    }
}

impl From<ScalePoint> for u8 {
    fn from(p: ScalePoint) -> u8 {
        p.0
    }
}

/// Performance rating value 1..=4; a statement is agreed when its rating is at least 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct PerformanceRating(u8);

impl PerformanceRating {
    pub const NOT_AGREE: PerformanceRating = PerformanceRating(1);
    pub const PARTIALLY: PerformanceRating = PerformanceRating(2);
    pub const LARGELY: PerformanceRating = PerformanceRating(3);
    pub const COMPLETE: PerformanceRating = PerformanceRating(4);

    pub fn new(value: u8) -> Option<Self> {
        (1..=4).contains(&value).then_some(Self(value))
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn agreed(self) -> bool {
        self.0 >= 3
    }
}

impl TryFrom<u8> for PerformanceRating {
    type Error = String;
    fn try_from(v: u8) -> Result<Self, Self::Error> {
        Self::new(v).ok_or_else(|| format!("rating {v} outside 1..=4"))
    }
}

impl From<PerformanceRating> for u8 {
    fn from(r: PerformanceRating) -> u8 {
        r.0
    }
}

impl fmt::Display for PerformanceRating {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Doesn't Apply counts as full agreement.
pub fn rate_scale_point(p: ScalePoint) -> PerformanceRating {
    match p.0 {
        5 | 1 => PerformanceRating::COMPLETE,
        4 => PerformanceRating::LARGELY,
        3 => PerformanceRating::PARTIALLY,
        _ => PerformanceRating::NOT_AGREE,
    }
}

/// Maps an extent of agreement to a rating using half-open bands
/// `[0, 33.3) → 1`, `[33.3, 66.7) → 2`, `[66.7, 80) → 3`, `[80, 100] → 4`.
pub fn rate_percent(pct: f64) -> Result<PerformanceRating, ScoreError> {
    if !pct.is_finite() || !(0.0..=100.0).contains(&pct) {
        return Err(ScoreError::OutOfRangePercent(pct));
    }
    Ok(if pct >= 80.0 {
        PerformanceRating::COMPLETE
    } else if pct >= 66.7 {
        PerformanceRating::LARGELY
    } else if pct >= 33.3 {
        PerformanceRating::PARTIALLY
    } else {
        PerformanceRating::NOT_AGREE
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Scale,
    Value,
    Percent,
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Encoding::Scale => "scale",
            Encoding::Value => "value",
            Encoding::Percent => "percent",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Answer {
    Scale(ScalePoint),
    Value(PerformanceRating),
    Percent(f64),
    Blank,
}

impl Answer {
    /// Interprets a raw number under `encoding`.
    pub fn from_number(
        question: QuestionId,
        encoding: Encoding,
        value: f64,
    ) -> Result<Answer, ScoreError> {
        let invalid = || ScoreError::InvalidAnswer {
            question,
            encoding,
            value,
        };
        let small_int = || {
            (value.fract() == 0.0 && (0.0..=255.0).contains(&value))
                .then_some(value as u8)
                .ok_or_else(invalid)
        };
        match encoding {
            Encoding::Scale => ScalePoint::new(small_int()?)
                .map(Answer::Scale)
                .ok_or_else(invalid),
            Encoding::Value => PerformanceRating::new(small_int()?)
                .map(Answer::Value)
                .ok_or_else(invalid),
            Encoding::Percent => {
                if value.is_finite() && (0.0..=100.0).contains(&value) {
                    Ok(Answer::Percent(value))
                } else {
                    Err(invalid())
                }
            }
        }
    }

    pub fn encoding(&self) -> Option<Encoding> {
        match self {
            Answer::Scale(_) => Some(Encoding::Scale),
            Answer::Value(_) => Some(Encoding::Value),
            Answer::Percent(_) => Some(Encoding::Percent),
            Answer::Blank => None,
        }
    }

    pub fn as_number(&self) -> Option<f64> {
        match *self {
            Answer::Scale(p) => Some(p.get() as f64),
            Answer::Value(v) => Some(v.get() as f64),
            Answer::Percent(x) => Some(x),
            Answer::Blank => None,
        }
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Answer::Blank)
    }
}

/// How unanswered statements enter the rating.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlankPolicy {
    /// Rate as 1 (not agree) and keep in the level's statement count.
    #[default]
    #[serde(rename = "rate-as-1")]
    RateAsOne,
    /// Drop from the level's statement count; the pass threshold is recomputed.
    #[serde(rename = "exclude")]
    Exclude,
}

/// One respondent's answers. Questions without an entry are blanks.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseSet {
    pub respondent: String,
    pub organization: String,
    pub encoding: Encoding,
    pub note: Option<String>,
    pub answers: BTreeMap<QuestionId, Answer>,
}

impl ResponseSet {
    pub fn new(
        organization: impl Into<String>,
        respondent: impl Into<String>,
        encoding: Encoding,
    ) -> Self {
        Self {
            respondent: respondent.into(),
            organization: organization.into(),
            encoding,
            note: None,
            answers: BTreeMap::new(),
        }
    }

    pub fn answer(&self, id: &QuestionId) -> Answer {
        self.answers.get(id).copied().unwrap_or(Answer::Blank)
    }

    /// Unknown ids and answers whose kind disagrees with the set's encoding.
    pub fn check_against(&self, model: &MaturityModel) -> Result<(), ScoreError> {
        for (id, answer) in &self.answers {
            if !model.contains_question(id) {
                return Err(ScoreError::UnknownQuestion(*id));
            }
            if let Some(found) = answer.encoding() {
                if found != self.encoding {
                    return Err(ScoreError::EncodingMismatch {
                        question: *id,
                        expected: self.encoding,
                        found,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Rates one answer. `Ok(None)` means the answer is blank and excluded by `policy`.
pub fn rate_answer(
    question: QuestionId,
    answer: &Answer,
    encoding: Encoding,
    policy: BlankPolicy,
) -> Result<Option<PerformanceRating>, ScoreError> {
    if let Some(found) = answer.encoding() {
        if found != encoding {
            return Err(ScoreError::EncodingMismatch {
                question,
                expected: encoding,
                found,
            });
        }
    }
    Ok(match *answer {
        Answer::Scale(p) => Some(rate_scale_point(p)),
        Answer::Value(v) => Some(v),
        Answer::Percent(x) => Some(rate_percent(x)?),
        Answer::Blank => match policy {
            BlankPolicy::RateAsOne => Some(PerformanceRating::NOT_AGREE),
            BlankPolicy::Exclude => None,
        },
    })
}

/// `n_questions × pass_fraction`, rounded half-up to an integer.
pub fn pass_threshold(n_questions: u32, pass_fraction: PassFraction) -> u32 {
    let num = pass_fraction.numerator() as u64;
    let den = pass_fraction.denominator() as u64;
    ((2 * n_questions as u64 * num + den) / (2 * den)) as u32
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelScore {
    pub level: u32,
    pub n_questions: u32,
    pub n_agreed: u32,
    pub pass_threshold: u32,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PracticeTally {
    pub practice: PracticeId,
    pub agreed: u32,
    pub total: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssessmentResult {
    pub organization: String,
    pub blank_policy: BlankPolicy,
    pub per_level: Vec<LevelScore>,
    /// Highest passed level; 0 when no level passes.
    pub bml: u32,
    pub per_question_ratings: BTreeMap<QuestionId, PerformanceRating>,
    pub per_practice_profile: Vec<PracticeTally>,
}

impl AssessmentResult {
    pub fn level(&self, index: u32) -> Option<&LevelScore> {
        self.per_level.iter().find(|s| s.level == index)
    }
}

pub fn score_assessment(
    model: &MaturityModel,
    responses: &ResponseSet,
    policy: BlankPolicy,
) -> Result<AssessmentResult, ScoreError> {
    responses.check_against(model)?;

    let mut per_level = Vec::with_capacity(model.levels.len());
    let mut ratings = BTreeMap::new();
    let mut profile: BTreeMap<PracticeId, (u32, u32)> = BTreeMap::new();
    for level in &model.levels {
        let (mut n_questions, mut n_agreed) = (0u32, 0u32);
        for q in &level.questions {
            let answer = responses.answer(&q.id);
            let Some(rating) = rate_answer(q.id, &answer, responses.encoding, policy)? else {
                continue;
            };
            n_questions += 1;
            let tally = profile.entry(q.id.practice_id()).or_default();
            tally.1 += 1;
            if rating.agreed() {
                n_agreed += 1;
                tally.0 += 1;
            }
            ratings.insert(q.id, rating);
        }
        let threshold = pass_threshold(n_questions, model.pass_fraction);
        per_level.push(LevelScore {
            level: level.index,
            n_questions,
            n_agreed,
            pass_threshold: threshold,
            passed: n_agreed >= threshold,
        });
    }
    let bml = per_level
        .iter()
        .filter(|s| s.passed)
        .map(|s| s.level)
        .max()
        .unwrap_or(0);
    let mut per_practice_profile: Vec<PracticeTally> = profile
        .into_iter()
        .map(|(practice, (agreed, total))| PracticeTally {
            practice,
            agreed,
            total,
        })
        .collect();
    per_practice_profile.sort_by_key(|t| (t.practice.level, t.practice.practice));

    Ok(AssessmentResult {
        organization: responses.organization.clone(),
        blank_policy: policy,
        per_level,
        bml,
        per_question_ratings: ratings,
        per_practice_profile,
    })
}

/// Combines several respondents of one organization into a value-encoded set by taking
/// the lower median of each question's rated (non-blank) answers.
pub fn aggregate_respondents(
    model: &MaturityModel,
    sets: &[ResponseSet],
) -> Result<ResponseSet, ScoreError> {
    let first = sets.first().ok_or(ScoreError::EmptyInput)?;
    for s in sets {
        if s.organization != first.organization {
            return Err(ScoreError::MixedOrganization {
                expected: first.organization.clone(),
                found: s.organization.clone(),
            });
        }
        s.check_against(model)?;
    }

    let respondents: Vec<&str> = sets.iter().map(|s| s.respondent.as_str()).collect();
    let mut out = ResponseSet::new(
        first.organization.clone(),
        format!("median({})", respondents.join(",")),
        Encoding::Value,
    );
    for q in model.questions() {
        let mut values = Vec::with_capacity(sets.len());
        for s in sets {
            if let Some(r) = rate_answer(q.id, &s.answer(&q.id), s.encoding, BlankPolicy::Exclude)?
            {
                values.push(r);
            }
        }
        if let Some(m) = lower_median(&mut values) {
            out.answers.insert(q.id, Answer::Value(m));
        }
    }
    Ok(out)
}

fn lower_median<T: Ord + Copy>(values: &mut [T]) -> Option<T> {
    if values.is_empty() {
        return None;
    }
    values.sort_unstable();
    Some(values[(values.len() - 1) / 2])
}
