//! Instrument validation: per-construct internal consistency, principal-component
//! eigenvalues with the Kaiser criterion, scree data, and an MTMM-style summary of
//! within- and cross-level item correlations.
//!
//! A construct is the set of items for one practice at one level. Missing pilot answers
//! are handled by complete cases: listwise over a construct's items for alpha and PCA,
//! pairwise for the MTMM averages.

use std::collections::HashMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eigen::symmetric_eigenvalues;
use crate::ids::{PracticeId, QuestionId};
use crate::model::MaturityModel;
use crate::stats::{cronbach_alpha, pearson, pearson_correlation_matrix};

#[derive(Debug, Error)]
pub enum PsychError {
    #[error("construct has only one item")]
    SingleItemConstruct,
    #[error("insufficient respondents: {n} (need at least 2)")]
    InsufficientRespondents { n: usize },
    #[error("column {column} has zero variance")]
    ZeroVariance { column: usize },
    #[error("total score has zero variance")]
    ZeroTotalVariance,
    #[error("input columns or rows have unequal lengths")]
    Ragged,
    #[error("matrix is not symmetric or has non-finite entries")]
    NotSymmetric,
    #[error("eigenvalues did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("pilot data has no column for {0}")]
    MissingColumn(QuestionId),
    #[error("pilot data line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Respondents × questions grid of ratings 1..=4; `None` is a blank.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PilotDataset {
    pub respondents: Vec<String>,
    pub questions: Vec<QuestionId>,
    pub matrix: Vec<Vec<Option<u8>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub organizations: Option<Vec<String>>,
}

impl PilotDataset {
    pub fn new(
        respondents: Vec<String>,
        questions: Vec<QuestionId>,
        matrix: Vec<Vec<Option<u8>>>,
    ) -> Result<Self, PsychError> {
        let ds = Self {
            respondents,
            questions,
            matrix,
            organizations: None,
        };
        ds.check()?;
        Ok(ds)
    }

    fn check(&self) -> Result<(), PsychError> {
        if self.matrix.len() != self.respondents.len()
            || self.matrix.iter().any(|r| r.len() != self.questions.len())
            || self
                .organizations
                .as_ref()
                .is_some_and(|o| o.len() != self.respondents.len())
        {
            return Err(PsychError::Ragged);
        }
        for (i, row) in self.matrix.iter().enumerate() {
            if let Some(v) = row.iter().flatten().find(|v| !(1..=4).contains(*v)) {
                return Err(PsychError::Csv {
                    line: i + 2,
                    message: format!("value {v} outside 1..=4"),
                });
            }
        }
        Ok(())
    }

    fn column_index(&self) -> HashMap<QuestionId, usize> {
        self.questions
            .iter()
            .enumerate()
            .map(|(i, q)| (*q, i))
            .collect()
    }

    fn column(&self, idx: usize) -> Vec<Option<f64>> {
        self.matrix.iter().map(|r| r[idx].map(f64::from)).collect()
    }
}

/// Reads `respondent[,organization],Q.…,Q.…` CSV. Blank cells are missing answers.
pub fn parse_pilot_csv(text: &str) -> Result<PilotDataset, PsychError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| PsychError::Csv {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    if headers.get(0) != Some("respondent") {
        return Err(PsychError::Csv {
            line: 1,
            message: "first column must be `respondent`".into(),
        });
    }
    let has_org = headers.get(1) == Some("organization");
    let first_q = if has_org { 2 } else { 1 };
    let questions = headers
        .iter()
        .skip(first_q)
        .map(|h| {
            h.parse::<QuestionId>().map_err(|e| PsychError::Csv {
                line: 1,
                message: e.to_string(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut seen = std::collections::HashSet::new();
    if let Some(dup) = questions.iter().find(|q| !seen.insert(**q)) {
        return Err(PsychError::Csv {
            line: 1,
            message: format!("duplicate column {dup}"),
        });
    }

    let mut respondents = Vec::new();
    let mut organizations = Vec::new();
    let mut matrix = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| PsychError::Csv {
            line,
            message: e.to_string(),
        })?;
        respondents.push(record[0].to_owned());
        if has_org {
            organizations.push(record[1].to_owned());
        }
        let row = record
            .iter()
            .skip(first_q)
            .map(|cell| match cell {
                "" => Ok(None),
                s => s.parse::<u8>().map(Some).map_err(|_| PsychError::Csv {
                    line,
                    message: format!("value {s:?} is not an integer rating"),
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        matrix.push(row);
    }
    let ds = PilotDataset {
        respondents,
        questions,
        matrix,
        organizations: has_org.then_some(organizations),
    };
    ds.check()?;
    Ok(ds)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScreePoint {
    pub component: usize,
    pub eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructStats {
    pub construct: PracticeId,
    pub level: u32,
    pub practice: u32,
    pub k_items: usize,
    pub alpha: Option<f64>,
    pub first_eigenvalue: Option<f64>,
    pub retained_components: Option<usize>,
    pub scree: Vec<ScreePoint>,
    /// Why a multi-item construct could not be analysed.
    pub diagnostic: Option<String>,
}

impl ConstructStats {
    pub fn is_single_item(&self) -> bool {
        self.k_items == 1
    }

    fn not_computable(construct: PracticeId, k_items: usize, diagnostic: Option<String>) -> Self {
        Self {
            construct,
            level: construct.level,
            practice: construct.practice,
            k_items,
            alpha: None,
            first_eigenvalue: None,
            retained_components: None,
            scree: Vec::new(),
            diagnostic,
        }
    }
}

/// Question ids of each (level, practice) construct, in model order.
fn constructs(model: &MaturityModel) -> Vec<(PracticeId, Vec<QuestionId>)> {
    let mut practices: Vec<_> = model.practices.iter().collect();
    practices.sort_by_key(|p| p.id);
    let mut out = Vec::new();
    for level in &model.levels {
        for p in &practices {
            let items: Vec<QuestionId> = level
                .questions
                .iter()
                .filter(|q| q.id.practice == p.id)
                .map(|q| q.id)
                .collect();
            if !items.is_empty() {
                out.push((PracticeId::new(p.dimension, level.index, p.id), items));
            }
        }
    }
    out
}

fn require_respondents(dataset: &PilotDataset) -> Result<(), PsychError> {
    let n = dataset.respondents.len();
    if n < 2 {
        return Err(PsychError::InsufficientRespondents { n });
    }
    Ok(())
}

fn analyse_construct(
    construct: PracticeId,
    items: &[QuestionId],
    columns: Vec<Vec<Option<f64>>>,
) -> Result<ConstructStats, PsychError> {
    let k = items.len();
    if k == 1 {
        return Ok(ConstructStats::not_computable(construct, 1, None));
    }
    let n = columns[0].len();
    let complete: Vec<usize> = (0..n)
        .filter(|&r| columns.iter().all(|c| c[r].is_some()))
        .collect();
    if complete.len() < 2 {
        return Ok(ConstructStats::not_computable(
            construct,
            k,
            Some(format!("{} complete responses", complete.len())),
        ));
    }
    let data: Vec<Vec<f64>> = columns
        .iter()
        .map(|c| complete.iter().map(|&r| c[r].unwrap()).collect())
        .collect();

    let corr = match pearson_correlation_matrix(&data) {
        Ok(c) => c,
        Err(PsychError::ZeroVariance { column }) => {
            return Ok(ConstructStats::not_computable(
                construct,
                k,
                Some(format!("{} has zero variance", items[column])),
            ))
        }
        Err(e) => return Err(e),
    };
    let (alpha, diagnostic) = match cronbach_alpha(&data) {
        Ok(a) => (Some(a), None),
        Err(PsychError::ZeroTotalVariance) => (None, Some("total score has zero variance".into())),
        Err(e) => return Err(e),
    };
    let eig = symmetric_eigenvalues(&corr)?;
    Ok(ConstructStats {
        construct,
        level: construct.level,
        practice: construct.practice,
        k_items: k,
        alpha,
        first_eigenvalue: eig.first().copied(),
        retained_components: Some(eig.iter().filter(|&&l| l > 1.0).count()),
        scree: eig
            .iter()
            .enumerate()
            .map(|(i, &eigenvalue)| ScreePoint {
                component: i + 1,
                eigenvalue,
            })
            .collect(),
        diagnostic,
    })
}

/// Alpha, correlation-matrix eigenvalues and Kaiser retention for every construct.
pub fn construct_validity(
    dataset: &PilotDataset,
    model: &MaturityModel,
) -> Result<Vec<ConstructStats>, PsychError> {
    require_respondents(dataset)?;
    let index = dataset.column_index();
    constructs(model)
        .into_iter()
        .map(|(construct, items)| {
            let columns = items
                .iter()
                .map(|q| {
                    index
                        .get(q)
                        .map(|&i| dataset.column(i))
                        .ok_or(PsychError::MissingColumn(*q))
                })
                .collect::<Result<Vec<_>, _>>()?;
            analyse_construct(construct, &items, columns)
        })
        .collect()
}

/// Level × level grid of average inter-item correlations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MtmmMatrix {
    pub levels: Vec<u32>,
    /// `None` where no item pair contributes (e.g. a level made only of single-item constructs).
    pub cells: Vec<Vec<Option<f64>>>,
}

impl MtmmMatrix {
    pub fn get(&self, a: u32, b: u32) -> Option<f64> {
        let i = self.levels.iter().position(|&l| l == a)?;
        let j = self.levels.iter().position(|&l| l == b)?;
        self.cells[i][j]
    }
}

fn pairwise_r(x: &[Option<f64>], y: &[Option<f64>]) -> Option<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(y)
        .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
        .unzip();
    pearson(&xs, &ys)
}

fn average(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Diagonal: mean correlation over item pairs inside the same practice at that level.
/// Off-diagonal: mean correlation over every item pair crossing the two levels.
/// Pairs whose correlation is undefined are skipped.
pub fn mtmm(dataset: &PilotDataset, model: &MaturityModel) -> Result<MtmmMatrix, PsychError> {
    require_respondents(dataset)?;
    let index = dataset.column_index();
    let column_of = |q: &QuestionId| {
        index
            .get(q)
            .map(|&i| dataset.column(i))
            .ok_or(PsychError::MissingColumn(*q))
    };

    let levels: Vec<u32> = model.levels.iter().map(|l| l.index).collect();
    let mut items: Vec<Vec<(u32, Vec<Option<f64>>)>> = Vec::with_capacity(levels.len());
    for level in &model.levels {
        items.push(
            level
                .questions
                .iter()
                .map(|q| Ok((q.id.practice, column_of(&q.id)?)))
                .collect::<Result<_, PsychError>>()?,
        );
    }

    let l = levels.len();
    let mut cells = vec![vec![None; l]; l];
    for a in 0..l {
        let mut within = Vec::new();
        for (i, (pi, xi)) in items[a].iter().enumerate() {
            for (pj, xj) in &items[a][i + 1..] {
                if pi == pj {
                    within.extend(pairwise_r(xi, xj));
                }
            }
        }
        cells[a][a] = average(&within);
        for b in (a + 1)..l {
            let mut cross = Vec::new();
            for (_, xi) in &items[a] {
                for (_, xj) in &items[b] {
                    cross.extend(pairwise_r(xi, xj));
                }
            }
            let v = average(&cross);
            cells[a][b] = v;
            cells[b][a] = v;
        }
    }
    Ok(MtmmMatrix { levels, cells })
}

/// `construct,component,eigenvalue` rows for every analysed construct.
pub fn scree_csv(stats: &[ConstructStats]) -> String {
    let mut out = String::from("construct,component,eigenvalue\n");
    for s in stats {
        for p in &s.scree {
            out.push_str(&format!(
                "{},{},{:.6}\n",
                s.construct, p.component, p.eigenvalue
            ));
        }
    }
    out
}
