//! Response file ingestion (JSON and two-column CSV) and serialization.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::ids::QuestionId;
use crate::scoring::{Answer, Encoding, ResponseSet, ScoreError};

#[derive(Debug, Error)]
pub enum ResponseError {
    #[error("schema error at line {line}, column {column}: {message}")]
    Schema {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("csv error at record {record}: {message}")]
    Csv { record: usize, message: String },
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Invalid(#[from] ScoreError),
}

impl From<serde_json::Error> for ResponseError {
    fn from(e: serde_json::Error) -> Self {
        ResponseError::Schema {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

/// Answers as they appear on disk: question id → number, `null` for an explicit blank.
#[derive(Debug, Default)]
struct RawAnswers {
    entries: Vec<(QuestionId, Option<f64>)>,
}

impl<'de> Deserialize<'de> for RawAnswers {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = RawAnswers;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map of question ids to numbers")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<RawAnswers, A::Error> {
                let mut entries = Vec::new();
                while let Some((k, v)) = map.next_entry::<QuestionId, Option<f64>>()? {
                    entries.push((k, v));
                }
                Ok(RawAnswers { entries })
            }
        }
        d.deserialize_map(V)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ResponseDocument {
    organization: String,
    respondent: String,
    #[serde(default)]
    note: Option<String>,
    encoding: Encoding,
    answers: RawAnswers,
}

fn build_answers(
    encoding: Encoding,
    entries: impl IntoIterator<Item = (QuestionId, Option<f64>)>,
) -> Result<BTreeMap<QuestionId, Answer>, ScoreError> {
    let mut answers = BTreeMap::new();
    for (id, value) in entries {
        let answer = match value {
            Some(v) => Answer::from_number(id, encoding, v)?,
            None => Answer::Blank,
        };
        if answers.insert(id, answer).is_some() {
            return Err(ScoreError::DuplicateQuestion(id));
        }
    }
    Ok(answers)
}

pub fn parse_response_json(text: &str) -> Result<ResponseSet, ResponseError> {
    let doc: ResponseDocument = serde_json::from_str(text)?;
    Ok(ResponseSet {
        respondent: doc.respondent,
        organization: doc.organization,
        encoding: doc.encoding,
        note: doc.note,
        answers: build_answers(doc.encoding, doc.answers.entries)?,
    })
}

/// Reads a `question_id,answer` CSV. Organization, respondent and encoding are not part
/// of the file and must be supplied.
pub fn parse_response_csv(
    text: &str,
    organization: &str,
    respondent: &str,
    encoding: Encoding,
) -> Result<ResponseSet, ResponseError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| ResponseError::Csv {
        record: 0,
        message: e.to_string(),
    })?;
    if headers.len() != 2 || &headers[0] != "question_id" || &headers[1] != "answer" {
        return Err(ResponseError::Csv {
            record: 0,
            message: "header must be `question_id,answer`".into(),
        });
    }
    let mut entries = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let csv_err = |message: String| ResponseError::Csv {
            record: i + 1,
            message,
        };
        let record = record.map_err(|e| csv_err(e.to_string()))?;
        let id: QuestionId = record[0].parse().map_err(|e| csv_err(format!("{e}")))?;
        let value = match &record[1] {
            "" => None,
            s => Some(
                s.parse::<f64>()
                    .map_err(|_| csv_err(format!("answer {s:?} is not a number")))?,
            ),
        };
        entries.push((id, value));
    }
    Ok(ResponseSet {
        respondent: respondent.to_owned(),
        organization: organization.to_owned(),
        encoding,
        note: None,
        answers: build_answers(encoding, entries)?,
    })
}

struct AnswersOut<'a>(&'a BTreeMap<QuestionId, Answer>);

impl Serialize for AnswersOut<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (id, answer) in self.0 {
            match *answer {
                Answer::Scale(p) => map.serialize_entry(id, &p.get())?,
                Answer::Value(v) => map.serialize_entry(id, &v.get())?,
                Answer::Percent(x) => map.serialize_entry(id, &x)?,
                Answer::Blank => map.serialize_entry(id, &())?,
            }
        }
        map.end()
    }
}

#[derive(Serialize)]
struct ResponseDocumentOut<'a> {
    organization: &'a str,
    respondent: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'a str>,
    encoding: Encoding,
    answers: AnswersOut<'a>,
}

pub fn write_response_json(set: &ResponseSet) -> String {
    let doc = ResponseDocumentOut {
        organization: &set.organization,
        respondent: &set.respondent,
        note: set.note.as_deref(),
        encoding: set.encoding,
        answers: AnswersOut(&set.answers),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("response set serializes");
    out.push('\n');
    out
}

pub fn write_response_csv(set: &ResponseSet) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["question_id", "answer"])
        .expect("in-memory write");
    for (id, answer) in &set.answers {
        let cell = match answer {
            Answer::Percent(x) => x.to_string(),
            other => other.as_number().map(|n| n.to_string()).unwrap_or_default(),
        };
        w.write_record([id.to_string(), cell])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

/// Loads a response file, choosing the format by extension (`.csv` or JSON otherwise).
/// For CSV the organization defaults to the file stem.
pub fn load_response_file(
    path: &Path,
    organization: Option<&str>,
    encoding: Encoding,
) -> Result<ResponseSet, ResponseError> {
    let text = std::fs::read_to_string(path).map_err(|source| ResponseError::Io {
        path: path.to_owned(),
        source,
    })?;
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        parse_response_csv(&text, organization.unwrap_or(&stem), &stem, encoding)
    } else {
        parse_response_json(&text)
    }
}
