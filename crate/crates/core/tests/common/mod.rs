//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use maturity_core::model::{Dimension, LevelSpec, PassFraction, Practice, Question};
use maturity_core::psychometrics::{parse_pilot_csv, PilotDataset};
use maturity_core::responses::parse_response_json;
use maturity_core::scoring::{Answer, BlankPolicy, Encoding, PerformanceRating, ScalePoint};
use maturity_core::{
    bundled, score_assessment, AssessmentResult, MaturityModel, QuestionId, ResponseSet,
};
use rand::Rng;

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture(name: &str) -> PathBuf {
    crate_dir().join("fixtures").join(name)
}

pub fn golden(name: &str) -> String {
    std::fs::read_to_string(crate_dir().join("tests/golden").join(name)).unwrap()
}

pub fn responses(name: &str) -> ResponseSet {
    parse_response_json(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

pub fn org_a() -> ResponseSet {
    responses("org_a.json")
}

pub fn org_b() -> ResponseSet {
    responses("org_b.json")
}

pub fn score(rs: &ResponseSet) -> AssessmentResult {
    score_assessment(bundled(), rs, BlankPolicy::RateAsOne).unwrap()
}

pub fn agreed_counts(r: &AssessmentResult) -> Vec<u32> {
    r.per_level.iter().map(|s| s.n_agreed).collect()
}

pub fn pilot() -> PilotDataset {
    parse_pilot_csv(&std::fs::read_to_string(fixture("pilot_synthetic.csv")).unwrap()).unwrap()
}

pub fn value(v: u8) -> Answer {
    Answer::Value(PerformanceRating::new(v).unwrap())
}

// ---- eigenvalues from the characteristic polynomial ----

/// Roots of λ² − (a+d)λ + (ad − b²).
pub fn eig2(m: &[Vec<f64>]) -> Vec<f64> {
    let (a, b, d) = (m[0][0], m[0][1], m[1][1]);
    let disc = ((a - d) * (a - d) + 4.0 * b * b).sqrt();
    vec![(a + d + disc) / 2.0, (a + d - disc) / 2.0]
}

fn det3(m: &[Vec<f64>]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Roots of λ³ − tr·λ² + c·λ − det, c the sum of principal 2×2 minors. Trigonometric
/// solution followed by a few Newton steps on the cubic.
pub fn eig3(m: &[Vec<f64>]) -> Vec<f64> {
    let tr = m[0][0] + m[1][1] + m[2][2];
    let c = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0]
        + m[1][1] * m[2][2]
        - m[1][2] * m[2][1];
    let det = det3(m);
    // λ³ + aλ² + bλ + c0
    let (a, b, c0) = (-tr, c, -det);
    let q = (3.0 * b - a * a) / 9.0;
    let r = (9.0 * a * b - 27.0 * c0 - 2.0 * a * a * a) / 54.0;
    let mut roots = if q.abs() < 1e-300 {
        vec![-a / 3.0; 3]
    } else {
        let s = (-q).max(0.0).sqrt();
        let ratio = if s == 0.0 {
            0.0
        } else {
            (r / (s * s * s)).clamp(-1.0, 1.0)
        };
        let theta = ratio.acos();
        (0..3)
            .map(|k| {
                2.0 * s * ((theta + 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos() - a / 3.0
            })
            .collect()
    };
    let p = |x: f64| ((x + a) * x + b) * x + c0;
    let dp = |x: f64| (3.0 * x + 2.0 * a) * x + b;
    for x in &mut roots {
        for _ in 0..4 {
            let d = dp(*x);
            if d.abs() < 1e-8 {
                break;
            }
            let step = p(*x) / d;
            if step.abs() > 1e-6 {
                break;
            }
            *x -= step;
        }
    }
    roots.sort_by(|x, y| y.partial_cmp(x).unwrap());
    roots
}

pub fn random_symmetric(rng: &mut impl Rng, n: usize) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(-5.0..5.0);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    m
}

// ---- correlation by raw sums, for cross-checking ----

pub fn r_by_sums(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let (sx, sy): (f64, f64) = (x.iter().sum(), y.iter().sum());
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let syy: f64 = y.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let den = ((n * sxx - sx * sx) * (n * syy - sy * sy)).sqrt();
    (x.len() >= 2 && den > 0.0).then(|| (n * sxy - sx * sy) / den)
}

fn pair_r(ds: &PilotDataset, qa: &QuestionId, qb: &QuestionId) -> Option<f64> {
    let ia = ds.questions.iter().position(|q| q == qa).unwrap();
    let ib = ds.questions.iter().position(|q| q == qb).unwrap();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for row in &ds.matrix {
        if let (Some(a), Some(b)) = (row[ia], row[ib]) {
            xs.push(a as f64);
            ys.push(b as f64);
        }
    }
    r_by_sums(&xs, &ys)
}

fn mean_of(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// MTMM by brute force over every question pair of the model.
pub fn mtmm_oracle(ds: &PilotDataset, model: &MaturityModel) -> Vec<Vec<Option<f64>>> {
    let qs: Vec<QuestionId> = model.questions().map(|q| q.id).collect();
    let levels: Vec<u32> = model.levels.iter().map(|l| l.index).collect();
    let mut out = vec![vec![None; levels.len()]; levels.len()];
    for (i, &la) in levels.iter().enumerate() {
        for (j, &lb) in levels.iter().enumerate() {
            let mut rs = Vec::new();
            for (x, qa) in qs.iter().enumerate() {
                for (y, qb) in qs.iter().enumerate() {
                    let keep = if la == lb {
                        x < y && qa.level == la && qb.level == la && qa.practice == qb.practice
                    } else {
                        qa.level == la && qb.level == lb
                    };
                    if keep {
                        rs.extend(pair_r(ds, qa, qb));
                    }
                }
            }
            out[i][j] = mean_of(&rs);
        }
    }
    out
}

// ---- scoring by brute force ----

fn oracle_rating(answer: &Answer, policy: BlankPolicy) -> Option<u8> {
    match answer {
        Answer::Blank => match policy {
            BlankPolicy::RateAsOne => Some(1),
            BlankPolicy::Exclude => None,
        },
        Answer::Value(v) => Some(v.get()),
        Answer::Scale(p) => Some(match p.get() {
            5 => 4,
            4 => 3,
            3 => 2,
            2 => 1,
            1 => 4,
            _ => unreachable!(),
        }),
        Answer::Percent(x) => Some(if *x >= 80.0 {
            4
        } else if *x >= 66.7 {
            3
        } else if *x >= 33.3 {
            2
        } else {
            1
        }),
    }
}

/// Integer t in 0..=n nearest to n·num/den, ties going up.
pub fn oracle_threshold(n: u32, num: u32, den: u32) -> u32 {
    let target = 2 * n as i64 * num as i64;
    (0..=n)
        .min_by_key(|&t| {
            (
                (2 * t as i64 * den as i64 - target).abs(),
                std::cmp::Reverse(t),
            )
        })
        .unwrap()
}

/// (n, agreed, threshold) per level and the BML, recomputed from scratch.
pub fn brute_force(
    model: &MaturityModel,
    rs: &ResponseSet,
    policy: BlankPolicy,
) -> (Vec<(u32, u32, u32)>, u32) {
    let frac = model.pass_fraction;
    let mut rows = Vec::new();
    let mut bml = 0;
    for level in &model.levels {
        let ratings: Vec<u8> = level
            .questions
            .iter()
            .filter_map(|q| oracle_rating(rs.answers.get(&q.id).unwrap_or(&Answer::Blank), policy))
            .collect();
        let n = ratings.len() as u32;
        let agreed = ratings.iter().filter(|&&r| r >= 3).count() as u32;
        let t = oracle_threshold(n, frac.numerator(), frac.denominator());
        if agreed >= t {
            bml = bml.max(level.index);
        }
        rows.push((n, agreed, t));
    }
    (rows, bml)
}

/// A structurally valid model with up to three levels and up to six questions per level.
pub fn random_small_model(rng: &mut impl Rng) -> MaturityModel {
    let n_practices = rng.gen_range(1..=3u32);
    let n_dims = rng.gen_range(1..=n_practices);
    let dim_of = |p: u32| (p - 1) * n_dims / n_practices + 1;
    let n_levels = rng.gen_range(1..=3u32);
    let den = rng.gen_range(1..=10u32);
    let num = rng.gen_range(1..=den);
    let levels = (1..=n_levels)
        .map(|level| {
            let n_q = rng.gen_range(1..=6);
            let mut per_practice: BTreeMap<u32, u32> = BTreeMap::new();
            for _ in 0..n_q {
                *per_practice
                    .entry(rng.gen_range(1..=n_practices))
                    .or_default() += 1;
            }
            let mut questions = Vec::new();
            for (&p, &k) in &per_practice {
                for q in 1..=k {
                    let id = QuestionId::new(dim_of(p), level, p, q);
                    questions.push(Question {
                        id,
                        text: format!("statement {id}"),
                    });
                }
            }
            LevelSpec {
                index: level,
                name: format!("level{level}"),
                description: String::new(),
                item_counts: None,
                questions,
            }
        })
        .collect();
    MaturityModel {
        name: "random".into(),
        pass_fraction: PassFraction::new(num, den).unwrap(),
        dimensions: (1..=n_dims)
            .map(|i| Dimension {
                index: i,
                name: format!("d{i}"),
            })
            .collect(),
        practices: (1..=n_practices)
            .map(|p| Practice {
                id: p,
                name: format!("practice {p}"),
                abbrev: format!("P{p}"),
                dimension: dim_of(p),
            })
            .collect(),
        levels,
    }
}

/// Random answers in one encoding, with blanks and omitted questions mixed in.
pub fn random_responses(rng: &mut impl Rng, model: &MaturityModel) -> ResponseSet {
    let encoding = [Encoding::Scale, Encoding::Value, Encoding::Percent][rng.gen_range(0..3)];
    let mut rs = ResponseSet::new("R", "r", encoding);
    for q in model.questions() {
        let roll: f64 = rng.gen();
        let answer = if roll < 0.1 {
            continue;
        } else if roll < 0.25 {
            Answer::Blank
        } else {
            match encoding {
                Encoding::Scale => Answer::Scale(ScalePoint::new(rng.gen_range(1..=5)).unwrap()),
                Encoding::Value => value(rng.gen_range(1..=4)),
                Encoding::Percent => Answer::Percent(rng.gen_range(0..=1000) as f64 / 10.0),
            }
        };
        rs.answers.insert(q.id, answer);
    }
    rs
}
