//! Staged maturity models: dimensions, practices, levels and their questionnaire items.
//!
//! The engine is generic over the number of levels, practices and dimensions. The
//! five-level business model for software product lines ships as [`bundled`].

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::ids::QuestionId;

/// Path of the bundled model inside the source tree.
pub const BUNDLED_MODEL_PATH: &str = "assets/bmm-spl.json";

/// The bundled model document, byte-for-byte as shipped.
pub const BUNDLED_MODEL_JSON: &str = include_str!("../assets/bmm-spl.json");

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("schema error at line {line}, column {column}: {message}")]
    Schema {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl From<serde_json::Error> for ModelError {
    fn from(e: serde_json::Error) -> Self {
        ModelError::Schema {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

/// Exact rational in (0, 1] used for the per-level pass fraction.
///
/// Serialized as a JSON number (`0.8`); a `"num/den"` string is also accepted on input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PassFraction {
    num: u32,
    den: u32,
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl PassFraction {
    pub fn new(num: u32, den: u32) -> Option<Self> {
        if den == 0 {
            return None;
        }
        let g = gcd(num, den).max(1);
        Some(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn numerator(&self) -> u32 {
        self.num
    }

    pub fn denominator(&self) -> u32 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Smallest-denominator rational within 1e-9 of `x`, searching denominators up to 10^6.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() || x < 0.0 {
            return None;
        }
        (1u32..=1_000_000).find_map(|den| {
            let num = (x * den as f64).round();
            ((x * den as f64 - num).abs() < 1e-9 * den as f64 && num <= u32::MAX as f64)
                .then(|| Self::new(num as u32, den))
                .flatten()
        })
    }

    pub fn is_valid(&self) -> bool {
        self.num > 0 && self.num <= self.den
    }
}

impl fmt::Display for PassFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl Serialize for PassFraction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.as_f64())
    }
}

impl<'de> Deserialize<'de> for PassFraction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(x) => PassFraction::from_f64(x)
                .ok_or_else(|| de::Error::custom(format!("pass_fraction {x} is not a rational"))),
            Raw::Text(s) => {
                let (n, m) = s
                    .split_once('/')
                    .ok_or_else(|| de::Error::custom("pass_fraction string must be num/den"))?;
                let n: u32 = n.trim().parse().map_err(de::Error::custom)?;
                let m: u32 = m.trim().parse().map_err(de::Error::custom)?;
                PassFraction::new(n, m).ok_or_else(|| de::Error::custom("zero denominator"))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dimension {
    pub index: u32,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Practice {
    pub id: u32,
    pub name: String,
    pub abbrev: String,
    pub dimension: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Question {
    pub id: QuestionId,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelSpec {
    pub index: u32,
    pub name: String,
    pub description: String,
    /// Expected number of items per practice, in practice order. Checked by
    /// [`validate_model`] when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub item_counts: Option<Vec<u32>>,
    pub questions: Vec<Question>,
}

impl LevelSpec {
    /// Level name with the first letter upper-cased, e.g. `Extrapolate`.
    pub fn title(&self) -> String {
        let mut chars = self.name.chars();
        match chars.next() {
            Some(c) => c.to_uppercase().chain(chars).collect(),
            None => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaturityModel {
    pub name: String,
    pub pass_fraction: PassFraction,
    pub dimensions: Vec<Dimension>,
    pub practices: Vec<Practice>,
    pub levels: Vec<LevelSpec>,
}

impl MaturityModel {
    pub fn level(&self, index: u32) -> Option<&LevelSpec> {
        self.levels.iter().find(|l| l.index == index)
    }

    pub fn practice(&self, id: u32) -> Option<&Practice> {
        self.practices.iter().find(|p| p.id == id)
    }

    pub fn max_level(&self) -> u32 {
        self.levels.iter().map(|l| l.index).max().unwrap_or(0)
    }

    /// All questions in presentation order (level by level).
    pub fn questions(&self) -> impl Iterator<Item = &Question> {
        self.levels.iter().flat_map(|l| l.questions.iter())
    }

    pub fn question_count(&self) -> usize {
        self.levels.iter().map(|l| l.questions.len()).sum()
    }

    pub fn contains_question(&self, id: &QuestionId) -> bool {
        self.level(id.level)
            .is_some_and(|l| l.questions.iter().any(|q| &q.id == id))
    }

    /// Short label for a practice: its abbreviation, or its number if it has none.
    pub fn practice_label(&self, id: u32) -> String {
        match self.practice(id) {
            Some(p) if !p.abbrev.is_empty() => p.abbrev.clone(),
            _ => id.to_string(),
        }
    }

    /// Copy with every list in canonical order.
    pub fn canonicalized(&self) -> MaturityModel {
        let mut m = self.clone();
        m.dimensions.sort_by_key(|d| d.index);
        m.practices.sort_by_key(|p| p.id);
        m.levels.sort_by_key(|l| l.index);
        for level in &mut m.levels {
            level.questions.sort_by_key(|q| q.id.canonical_key());
        }
        m
    }
}

/// The five-level business maturity model shipped with the crate.
pub fn bundled() -> &'static MaturityModel {
    static MODEL: OnceLock<MaturityModel> = OnceLock::new();
    MODEL.get_or_init(|| load_model(BUNDLED_MODEL_JSON).expect("bundled model is well-formed"))
}

pub fn load_model(source: &str) -> Result<MaturityModel, ModelError> {
    Ok(serde_json::from_str(source)?)
}

pub fn load_model_file(path: &Path) -> Result<MaturityModel, ModelError> {
    let text = std::fs::read_to_string(path).map_err(|source| ModelError::Io {
        path: path.to_owned(),
        source,
    })?;
    load_model(&text)
}

/// Canonical JSON document: sorted lists, fixed field order, two-space indent, trailing newline.
pub fn save_model(model: &MaturityModel) -> String {
    let mut out =
        serde_json::to_string_pretty(&model.canonicalized()).expect("model serializes to JSON");
    out.push('\n');
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Level the violation belongs to; `None` for model-wide problems.
    pub level: Option<u32>,
    pub question: Option<QuestionId>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.question {
            Some(q) => write!(f, "{q}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_contiguous(indices: impl Iterator<Item = u32>) -> bool {
    let mut v: Vec<u32> = indices.collect();
    v.sort_unstable();
    v.iter().enumerate().all(|(i, &x)| x == i as u32 + 1)
}

/// Every structural violation in `model`, ordered by level then question.
pub fn validate_model(model: &MaturityModel) -> ValidationReport {
    let mut out: Vec<Violation> = Vec::new();
    let global = |message: String| Violation {
        level: None,
        question: None,
        message,
    };

    if model.name.trim().is_empty() {
        out.push(global("model name is empty".into()));
    }
    if !model.pass_fraction.is_valid() {
        out.push(global(format!(
            "pass_fraction {} outside (0, 1]",
            model.pass_fraction
        )));
    }
    if !check_contiguous(model.dimensions.iter().map(|d| d.index)) {
        out.push(global("dimension indices are not 1..D contiguous".into()));
    }
    if !check_contiguous(model.practices.iter().map(|p| p.id)) {
        out.push(global("practice ids are not 1..P contiguous".into()));
    }
    let dims: HashSet<u32> = model.dimensions.iter().map(|d| d.index).collect();
    let mut abbrevs = HashSet::new();
    for p in &model.practices {
        if !dims.contains(&p.dimension) {
            out.push(global(format!(
                "practice {} references undeclared dimension {}",
                p.id, p.dimension
            )));
        }
        if p.name.trim().is_empty() {
            out.push(global(format!("practice {} has an empty name", p.id)));
        }
        if !p.abbrev.is_empty() && !abbrevs.insert(p.abbrev.as_str()) {
            out.push(global(format!(
                "duplicate practice abbreviation {}",
                p.abbrev
            )));
        }
    }
    if model.levels.is_empty() {
        out.push(global("model has no levels".into()));
    }
    if !model
        .levels
        .iter()
        .enumerate()
        .all(|(i, l)| l.index == i as u32 + 1)
    {
        out.push(global(
            "level indices are not 1..L contiguous and ascending".into(),
        ));
    }

    let mut seen: HashSet<QuestionId> = HashSet::new();
    let mut per_level: Vec<Violation> = Vec::new();
    for level in &model.levels {
        let at = |question: Option<QuestionId>, message: String| Violation {
            level: Some(level.index),
            question,
            message,
        };
        let mut numbers: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for q in &level.questions {
            let id = q.id;
            if !seen.insert(id) {
                per_level.push(at(Some(id), "duplicate question id".into()));
            }
            if q.text.trim().is_empty() {
                per_level.push(at(Some(id), "question text is empty".into()));
            }
            if id.level != level.index {
                per_level.push(at(
                    Some(id),
                    format!("question filed under level {}", level.index),
                ));
            }
            match model.practice(id.practice) {
                None => {
                    per_level.push(at(Some(id), format!("undeclared practice {}", id.practice)))
                }
                Some(p) if p.dimension != id.dimension => per_level.push(at(
                    Some(id),
                    format!(
                        "dimension {} does not match practice {} dimension {}",
                        id.dimension,
                        model.practice_label(p.id),
                        p.dimension
                    ),
                )),
                Some(_) => {}
            }
            numbers.entry(id.practice).or_default().push(id.question);
        }
        for (practice, nums) in &numbers {
            if !check_contiguous(nums.iter().copied()) {
                per_level.push(at(
                    None,
                    format!(
                        "level {} practice {} question numbers are not 1..n contiguous",
                        level.index,
                        model.practice_label(*practice)
                    ),
                ));
            }
        }
        if let Some(expected) = &level.item_counts {
            if expected.len() != model.practices.len() {
                per_level.push(at(
                    None,
                    format!(
                        "level {} item_counts has {} entries for {} practices",
                        level.index,
                        expected.len(),
                        model.practices.len()
                    ),
                ));
            } else {
                let mut practices: Vec<&Practice> = model.practices.iter().collect();
                practices.sort_by_key(|p| p.id);
                for (p, &want) in practices.iter().zip(expected) {
                    let got = numbers.get(&p.id).map_or(0, |v| v.len()) as u32;
                    if got != want {
                        per_level.push(at(
                            None,
                            format!(
                                "level {} practice {} count {} ≠ {}",
                                level.index,
                                model.practice_label(p.id),
                                got,
                                want
                            ),
                        ));
                    }
                }
            }
        }
    }
    // stable: keeps question order inside each level
    per_level.sort_by_key(|v| v.level);
    out.extend(per_level);
    ValidationReport { violations: out }
}
