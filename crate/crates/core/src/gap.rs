//! What blocks a target level: agreement deficit, weakest practices, and the
//! non-agreed statements closest to agreement.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::{PracticeId, QuestionId};
use crate::model::MaturityModel;
use crate::scoring::AssessmentResult;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GapError {
    #[error("target level {target} outside 1..={max}")]
    TargetOutOfRange { target: u32, max: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// One level above the current BML, capped at the top level.
    Auto,
    Level(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PracticeStanding {
    pub practice: PracticeId,
    pub agreed: u32,
    pub total: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapReport {
    pub organization: String,
    pub current_bml: u32,
    pub target_level: u32,
    pub n_agreed: u32,
    pub pass_threshold: u32,
    pub deficit: u32,
    pub weakest_practices: Vec<PracticeStanding>,
    /// Non-agreed statements at the target, closest to agreement first. Empty when the
    /// target already passes.
    pub flip_candidates: Vec<QuestionId>,
}

pub fn analyze_gap(
    result: &AssessmentResult,
    model: &MaturityModel,
    target: Target,
) -> Result<GapReport, GapError> {
    let max = model.max_level();
    let target_level = match target {
        Target::Auto => (result.bml + 1).min(max),
        Target::Level(t) => t,
    };
    if target_level < 1 || target_level > max {
        return Err(GapError::TargetOutOfRange {
            target: target_level,
            max,
        });
    }
    let score = result
        .level(target_level)
        .expect("result was scored against this model");
    let deficit = score.pass_threshold.saturating_sub(score.n_agreed);

    let mut weakest: Vec<PracticeStanding> = result
        .per_practice_profile
        .iter()
        .filter(|t| t.practice.level == target_level)
        .map(|t| PracticeStanding {
            practice: t.practice,
            agreed: t.agreed,
            total: t.total,
        })
        .collect();
    // agreed/total ascending, compared exactly by cross-multiplication
    weakest.sort_by(|a, b| {
        let lhs = a.agreed as u64 * b.total as u64;
        let rhs = b.agreed as u64 * a.total as u64;
        lhs.cmp(&rhs)
            .then_with(|| a.practice.practice.cmp(&b.practice.practice))
    });

    let mut flip_candidates = Vec::new();
    if deficit > 0 {
        let level = model.level(target_level).expect("target in range");
        let mut rated: Vec<(QuestionId, u8)> = level
            .questions
            .iter()
            .filter_map(|q| {
                let r = result.per_question_ratings.get(&q.id)?;
                (!r.agreed()).then_some((q.id, r.get()))
            })
            .collect();
        rated.sort_by(|a, b| match b.1.cmp(&a.1) {
            Ordering::Equal => a.0.cmp(&b.0),
            other => other,
        });
        flip_candidates = rated.into_iter().map(|(id, _)| id).collect();
    }

    Ok(GapReport {
        organization: result.organization.clone(),
        current_bml: result.bml,
        target_level,
        n_agreed: score.n_agreed,
        pass_threshold: score.pass_threshold,
        deficit,
        weakest_practices: weakest,
        flip_candidates,
    })
}
