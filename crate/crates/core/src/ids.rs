//! Canonical practice and question identifiers (`BP.d.l.p`, `Q.d.l.p.n`).

use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed id {input:?}: {reason}")]
pub struct MalformedId {
    pub input: String,
    pub reason: &'static str,
}

/// Splits `PREFIX.a.b.c...` into exactly `N` positive integers.
fn parse_fields<const N: usize>(s: &str, prefix: &str) -> Result<[u32; N], MalformedId> {
    let err = |reason| MalformedId {
        input: s.to_owned(),
        reason,
    };
    let rest = s
        .strip_prefix(prefix)
        .and_then(|r| r.strip_prefix('.'))
        .ok_or_else(|| err("wrong prefix"))?;
    let mut out = [0u32; N];
    let mut parts = rest.split('.');
    for slot in out.iter_mut() {
        let part = parts.next().ok_or_else(|| err("wrong arity"))?;
        if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err("non-integer field"));
        }
        let v: u32 = part.parse().map_err(|_| err("non-integer field"))?;
        if v < 1 {
            return Err(err("fields must be >= 1"));
        }
        *slot = v;
    }
    if parts.next().is_some() {
        return Err(err("wrong arity"));
    }
    Ok(out)
}

/// A business practice as it appears at one level, rendered `BP.{dimension}.{level}.{practice}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PracticeId {
    pub dimension: u32,
    pub level: u32,
    pub practice: u32,
}

impl PracticeId {
    pub fn new(dimension: u32, level: u32, practice: u32) -> Self {
        Self {
            dimension,
            level,
            practice,
        }
    }
}

pub fn parse_practice_id(s: &str) -> Result<PracticeId, MalformedId> {
    let [dimension, level, practice] = parse_fields::<3>(s, "BP")?;
    Ok(PracticeId {
        dimension,
        level,
        practice,
    })
}

impl fmt::Display for PracticeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BP.{}.{}.{}", self.dimension, self.level, self.practice)
    }
}

impl FromStr for PracticeId {
    type Err = MalformedId;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_practice_id(s)
    }
}

/// A questionnaire statement id, rendered `Q.{dimension}.{level}.{practice}.{question}`.
///
/// Ordering is by (dimension, level, practice, question), which is lexicographic on the
/// fields and not the order questions are presented in. Use the model's level lists for
/// presentation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuestionId {
    pub dimension: u32,
    pub level: u32,
    pub practice: u32,
    pub question: u32,
}

impl QuestionId {
    pub fn new(dimension: u32, level: u32, practice: u32, question: u32) -> Self {
        Self {
            dimension,
            level,
            practice,
            question,
        }
    }

    pub fn practice_id(&self) -> PracticeId {
        PracticeId::new(self.dimension, self.level, self.practice)
    }

    /// Key used for canonical ordering within a model: (level, dimension, practice, question).
    pub fn canonical_key(&self) -> (u32, u32, u32, u32) {
        (self.level, self.dimension, self.practice, self.question)
    }

    /// The spaced form used in published detail tables, e.g. `Q 1.2.1.1`.
    pub fn table_label(&self) -> String {
        format!(
            "Q {}.{}.{}.{}",
            self.dimension, self.level, self.practice, self.question
        )
    }
}

pub fn parse_question_id(s: &str) -> Result<QuestionId, MalformedId> {
    let [dimension, level, practice, question] = parse_fields::<4>(s, "Q")?;
    Ok(QuestionId {
        dimension,
        level,
        practice,
        question,
    })
}

impl fmt::Display for QuestionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Q.{}.{}.{}.{}",
            self.dimension, self.level, self.practice, self.question
        )
    }
}

impl FromStr for QuestionId {
    type Err = MalformedId;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_question_id(s)
    }
}

macro_rules! string_serde {
    ($ty:ty) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(de::Error::custom)
            }
        }
    };
}

string_serde!(PracticeId);
string_serde!(QuestionId);
