//! JSON experiment configs. Every struct rejects unknown keys.

use std::path::PathBuf;

use serde::Deserialize;

use crate::constructions::{
    binomial_measure, cube_measure, dirac, lebesgue, rotating_ball_tree, strip_block_tree,
    x_axis_segment, BinomialSpec, QSchedule, RotatingBallSpec, Schedule, StripBlockSpec,
};
use crate::geometry::Point;
use crate::measure::MeasureTree;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    /// Names the output files; defaults to the subcommand.
    #[serde(default)]
    pub id: Option<String>,
    pub measure: MeasureSpec,
    #[serde(default)]
    pub points: PointSpec,
    pub operation: Operation,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Relative depth budget for region queries.
    #[serde(default)]
    pub depth: Option<usize>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    Lebesgue {
        n: usize,
        k: usize,
    },
    Cube {
        n: usize,
        k: usize,
        weights: Vec<f64>,
    },
    /// `q` gives a constant schedule, `q_schedule` an explicit one; neither
    /// means `q_i = 1/(i+2)`.
    Binomial {
        #[serde(default)]
        q: Option<f64>,
        #[serde(default)]
        q_schedule: Option<Vec<f64>>,
    },
    Segment,
    Dirac {
        point: Vec<f64>,
    },
    RotatingBalls {
        depth: usize,
    },
    StripBlock {
        schedule: ScheduleSpec,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ScheduleSpec {
    Named(String),
    Custom(Vec<usize>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PointSpec {
    /// `count` μ-distributed points: centers of nodes sampled down to `depth`.
    Sample {
        count: usize,
        depth: usize,
    },
    Explicit(Vec<Vec<f64>>),
}

impl Default for PointSpec {
    fn default() -> Self {
        PointSpec::Sample {
            count: 10,
            depth: 30,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Operation {
    Measure(MeasureOp),
    Density(DensityOp),
    Hom(HomOp),
    Doubling(DoublingOp),
}

impl Operation {
    pub fn name(&self) -> &'static str {
        match self {
            Operation::Measure(_) => "measure",
            Operation::Density(_) => "density",
            Operation::Hom(_) => "hom",
            Operation::Doubling(_) => "doubling",
        }
    }
}

/// Ball measures `μ(B(x, r))` at every point and radius.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureOp {
    pub radii: Vec<f64>,
}

/// Worst-cone profiles at `r_j = r0 2^{-j}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityOp {
    pub alpha: f64,
    /// Codimension of the cone planes.
    pub m: usize,
    pub r0: f64,
    pub levels: usize,
    /// Exceedance threshold; defaults to 0.
    #[serde(default)]
    pub c: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomOp {
    pub i: usize,
    pub l_max: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoublingOp {
    pub gamma: f64,
    pub k: usize,
    /// Target frequency; the threshold is `c = k^{-2n/(1-p)}`.
    pub p: f64,
    pub l: usize,
}

/// A config problem, with the offending field in dotted form.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{field}: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

fn bad(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.into(),
        message: message.into(),
    }
}

fn check_alpha(field: &str, alpha: f64) -> Result<(), ConfigError> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(bad(field, format!("alpha = {alpha} must lie in (0, 1]")))
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| bad("config", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(bad(
                "schema_version",
                format!(
                    "unsupported version {}, expected {SCHEMA_VERSION}",
                    self.schema_version
                ),
            ));
        }
        match &self.points {
            PointSpec::Sample { count, .. } if *count == 0 => {
                return Err(bad("points.sample.count", "must be positive"))
            }
            PointSpec::Explicit(v) if v.is_empty() => {
                return Err(bad("points.explicit", "no points given"))
            }
            _ => {}
        }
        match &self.operation {
            Operation::Measure(op) => {
                if op.radii.is_empty() || op.radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
                    return Err(bad(
                        "operation.measure.radii",
                        "need at least one positive radius",
                    ));
                }
            }
            Operation::Density(op) => {
                check_alpha("operation.density.alpha", op.alpha)?;
                if !(op.r0 > 0.0) {
                    return Err(bad("operation.density.r0", "must be positive"));
                }
                if op.levels == 0 {
                    return Err(bad("operation.density.levels", "must be positive"));
                }
            }
            Operation::Hom(op) => {
                if op.i == 0 || op.l_max == 0 {
                    return Err(bad("operation.hom", "i and l_max must be positive"));
                }
            }
            Operation::Doubling(op) => {
                if !(op.p > 0.0 && op.p < 1.0) {
                    return Err(bad(
                        "operation.doubling.p",
                        format!("p = {} must lie in (0, 1)", op.p),
                    ));
                }
                if !(op.gamma > 0.0) || op.k < 2 || op.l == 0 {
                    return Err(bad(
                        "operation.doubling",
                        "need gamma > 0, k >= 2 and l >= 1",
                    ));
                }
            }
        }
        Ok(())
    }
}

impl MeasureSpec {
    pub fn build(&self) -> Result<MeasureTree, ConfigError> {
        let wrap = |e: crate::Error| bad("measure", e.to_string());
        match self {
            MeasureSpec::Lebesgue { n, k } => lebesgue(*n, *k).map_err(wrap),
            MeasureSpec::Cube { n, k, weights } => {
                cube_measure(*n, *k, weights.clone()).map_err(wrap)
            }
            MeasureSpec::Binomial { q, q_schedule } => {
                let q = match (q, q_schedule) {
                    (Some(_), Some(_)) => {
                        return Err(bad("measure", "give either q or q_schedule, not both"))
                    }
                    (Some(q), None) => QSchedule::Constant(*q),
                    (None, Some(v)) => QSchedule::Custom(v.clone()),
                    (None, None) => QSchedule::Default,
                };
                binomial_measure(BinomialSpec { q }).map_err(wrap)
            }
            MeasureSpec::Segment => Ok(x_axis_segment()),
            MeasureSpec::Dirac { point } => Ok(dirac(&Point::new(point.clone()).map_err(wrap)?)),
            MeasureSpec::RotatingBalls { depth } => {
                rotating_ball_tree(RotatingBallSpec { depth: *depth }).map_err(wrap)
            }
            MeasureSpec::StripBlock { schedule } => {
                let schedule = match schedule {
                    ScheduleSpec::Named(s) if s == "staged" => Schedule::Staged,
                    ScheduleSpec::Named(s) if s == "increasing" => Schedule::Increasing,
                    ScheduleSpec::Named(s) => {
                        return Err(bad(
                            "measure.schedule",
                            format!("unknown schedule {s:?} (staged, increasing or a list)"),
                        ))
                    }
                    ScheduleSpec::Custom(v) => Schedule::Custom(v.clone()),
                };
                strip_block_tree(StripBlockSpec { schedule }).map_err(wrap)
            }
        }
    }
}

impl PointSpec {
    pub fn realize(&self, tree: &MeasureTree, seed: u64) -> Result<Vec<Point>, ConfigError> {
        match self {
            PointSpec::Sample { count, depth } => Ok(tree.sample_points(*count, *depth, seed)),
            PointSpec::Explicit(v) => v
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    if c.len() != tree.dim() {
                        return Err(bad(
                            &format!("points.explicit[{i}]"),
                            format!(
                                "has dimension {}, the measure lives in dimension {}",
                                c.len(),
                                tree.dim()
                            ),
                        ));
                    }
                    Point::new(c.clone())
                        .map_err(|e| bad(&format!("points.explicit[{i}]"), e.to_string()))
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DENSITY: &str = r#"{
        "schema_version": 1,
        "measure": {"kind": "lebesgue", "n": 2, "k": 2},
        "points": {"sample": {"count": 3, "depth": 20}},
        "operation": {"density": {"alpha": 0.5, "m": 1, "r0": 0.25, "levels": 3}}
    }"#;

    #[test]
    fn parses_and_builds() {
        let cfg = ExperimentConfig::from_json(DENSITY).unwrap();
        assert_eq!(cfg.operation.name(), "density");
        let t = cfg.measure.build().unwrap();
        assert_eq!(cfg.points.realize(&t, 1).unwrap().len(), 3);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_alpha() {
        let extra = DENSITY.replace("\"levels\": 3", "\"levels\": 3, \"bogus\": 1");
        assert!(ExperimentConfig::from_json(&extra).is_err());
        let extra = DENSITY.replace("\"k\": 2}", "\"k\": 2, \"q\": 1}");
        assert!(ExperimentConfig::from_json(&extra).is_err());
        let e = ExperimentConfig::from_json(&DENSITY.replace("0.5", "1.5")).unwrap_err();
        assert_eq!(e.field, "operation.density.alpha");
        let e = ExperimentConfig::from_json(
            &DENSITY.replace("\"schema_version\": 1", "\"schema_version\": 2"),
        )
        .unwrap_err();
        assert_eq!(e.field, "schema_version");
    }

    #[test]
    fn explicit_points_need_the_right_dimension() {
        let cfg = ExperimentConfig::from_json(&DENSITY.replace(
            r#"{"sample": {"count": 3, "depth": 20}}"#,
            r#"{"explicit": [[0.5, 0.5], [0.5]]}"#,
        ))
        .unwrap();
        let t = cfg.measure.build().unwrap();
        assert_eq!(
            cfg.points.realize(&t, 0).unwrap_err().field,
            "points.explicit[1]"
        );
    }
}
