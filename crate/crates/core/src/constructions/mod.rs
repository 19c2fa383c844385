//! Concrete measure trees: Lebesgue and other k-adic cube measures, point
//! masses, a segment measure in the plane, the binomial cascade, the
//! rotating-ball set and the strip/block measure.

mod binomial;
mod rotating;
mod strip_block;

pub use binomial::{binomial_measure, six_interval_constant, BinomialSpec, QSchedule};
pub use rotating::{
    angle_partial_sum, perpendicular_cone_profile, random_branch, rotating_ball_subtree,
    rotating_ball_tree, rotating_count, rotating_map, rotating_radius, sibling_separation_check,
    ConeHitRecord, RotatingBallSpec, SeparationRecord,
};
pub use strip_block::{
    block_weight, horizontal_cone_experiment, schedule_constants, strip_block_subtree,
    strip_block_tree, strip_map, verify_curve_exclusion, CurveExclusionReport,
    HorizontalConeRecord, Schedule, ScheduleConstants, StripBlockSpec, STRIP_HALF_WIDTH,
};

use crate::geometry::{Coords, Point};
use crate::measure::{Generator, MeasureTree, Node, Region, TreeKind};
use crate::{Error, Result};

/// Conditional child weights of a k-adic cube tree.
#[derive(Debug, Clone, PartialEq)]
pub enum CubeWeights {
    Uniform,
    /// The same `kⁿ` weights at every node, in lexicographic cube order.
    Fixed(Vec<f64>),
    /// Weights per level (the first entry is used at the root); the last entry
    /// repeats for deeper levels.
    Levels(Vec<Vec<f64>>),
}

/// A measure on `[0,1)ⁿ` whose nodes are the half-open k-adic cubes.
#[derive(Debug, Clone)]
pub struct CubeGenerator {
    n: usize,
    k: usize,
    weights: CubeWeights,
    max_depth: Option<usize>,
    label: String,
}

fn check_weight_vector(w: &[f64], fan: usize) -> Result<()> {
    if w.len() != fan {
        return Err(Error::Construction(format!(
            "expected {fan} child weights, got {}",
            w.len()
        )));
    }
    if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::Construction(
            "child weights must be finite and non-negative".into(),
        ));
    }
    let s: f64 = w.iter().sum();
    if (s - 1.0).abs() > 1e-12 {
        return Err(Error::Construction(format!(
            "child weights sum to {s}, not 1"
        )));
    }
    Ok(())
}

impl CubeGenerator {
    pub fn new(n: usize, k: usize, weights: CubeWeights) -> Result<Self> {
        if n == 0 || k < 2 {
            return Err(Error::Construction(format!(
                "need n >= 1 and k >= 2, got n = {n}, k = {k}"
            )));
        }
        let fan = k
            .checked_pow(n as u32)
            .filter(|f| *f <= 1 << 20)
            .ok_or_else(|| Error::Construction("fan size k^n is too large".into()))?;
        match &weights {
            CubeWeights::Uniform => {}
            CubeWeights::Fixed(w) => check_weight_vector(w, fan)?,
            CubeWeights::Levels(ws) => {
                if ws.is_empty() {
                    return Err(Error::Construction("no level weights given".into()));
                }
                for w in ws {
                    check_weight_vector(w, fan)?;
                }
            }
        }
        let label = match &weights {
            CubeWeights::Uniform => format!("lebesgue(n={n}, k={k})"),
            CubeWeights::Fixed(_) => format!("cube(n={n}, k={k}, fixed weights)"),
            CubeWeights::Levels(w) => format!("cube(n={n}, k={k}, {} weight levels)", w.len()),
        };
        Ok(CubeGenerator {
            n,
            k,
            weights,
            max_depth: None,
            label,
        })
    }

    /// Nodes at `depth` become leaves: their mass is spread over the cube in
    /// an unspecified way.
    pub fn with_max_depth(mut self, depth: usize) -> Self {
        self.max_depth = Some(depth);
        self.label = format!("{} truncated at {depth}", self.label);
        self
    }

    fn fan(&self) -> usize {
        self.k.pow(self.n as u32)
    }

    fn weight(&self, level: usize, child: usize) -> f64 {
        match &self.weights {
            CubeWeights::Uniform => 1.0 / self.fan() as f64,
            CubeWeights::Fixed(w) => w[child],
            CubeWeights::Levels(ws) => ws[level.min(ws.len() - 1)][child],
        }
    }
}

impl Generator for CubeGenerator {
    fn dim(&self) -> usize {
        self.n
    }

    fn kind(&self) -> TreeKind {
        TreeKind::Cube { k: self.k }
    }

    fn root(&self) -> Node {
        Node::root(Region::Cube {
            corner: smallvec::smallvec![0.0; self.n],
            side: 1.0,
        })
    }

    fn children(&self, node: &Node) -> Vec<Node> {
        if self.max_depth.is_some_and(|d| node.level >= d) {
            return Vec::new();
        }
        let Region::Cube { corner, side } = &node.region else {
            unreachable!("cube trees only hold cubes")
        };
        let s = side / self.k as f64;
        (0..self.fan())
            .map(|c| {
                let mut rest = c;
                let mut z: Coords = smallvec::smallvec![0.0; self.n];
                for d in (0..self.n).rev() {
                    z[d] = corner[d] + (rest % self.k) as f64 * s;
                    rest /= self.k;
                }
                node.child(
                    Region::Cube { corner: z, side: s },
                    self.weight(node.level, c),
                    None,
                )
            })
            .collect()
    }

    fn diameter_at(&self, level: usize) -> f64 {
        (self.n as f64).sqrt() * (self.k as f64).powi(-(level as i32))
    }

    fn max_depth(&self) -> Option<usize> {
        self.max_depth
    }

    fn name(&self) -> String {
        self.label.clone()
    }
}

/// Lebesgue measure on `[0,1)ⁿ` with k-adic subdivision.
pub fn lebesgue(n: usize, k: usize) -> Result<MeasureTree> {
    Ok(MeasureTree::new(CubeGenerator::new(
        n,
        k,
        CubeWeights::Uniform,
    )?))
}

/// Cube measure with the same child weights at every node.
pub fn cube_measure(n: usize, k: usize, weights: Vec<f64>) -> Result<MeasureTree> {
    Ok(MeasureTree::new(CubeGenerator::new(
        n,
        k,
        CubeWeights::Fixed(weights),
    )?))
}

/// Puts all mass on child `child` at every level: the limit is the point mass
/// at the corresponding corner.
pub fn single_branch(n: usize, k: usize, child: usize) -> Result<MeasureTree> {
    let fan = k.pow(n as u32);
    if child >= fan {
        return Err(Error::Construction(format!(
            "child {child} out of range (fan {fan})"
        )));
    }
    let mut w = vec![0.0; fan];
    w[child] = 1.0;
    cube_measure(n, k, w)
}

#[derive(Debug, Clone)]
struct DiracGenerator {
    point: Coords,
}

impl Generator for DiracGenerator {
    fn dim(&self) -> usize {
        self.point.len()
    }

    fn kind(&self) -> TreeKind {
        TreeKind::Contraction
    }

    fn root(&self) -> Node {
        Node::root(Region::Ball {
            center: self.point.clone(),
            radius: 0.0,
        })
    }

    fn children(&self, _node: &Node) -> Vec<Node> {
        Vec::new()
    }

    fn diameter_at(&self, _level: usize) -> f64 {
        0.0
    }

    fn max_depth(&self) -> Option<usize> {
        Some(0)
    }

    fn name(&self) -> String {
        format!("dirac({:?})", self.point.as_slice())
    }
}

/// Unit point mass.
pub fn dirac(point: &Point) -> MeasureTree {
    MeasureTree::new(DiracGenerator {
        point: point.coords.clone(),
    })
}

#[derive(Debug, Clone)]
struct SegmentGenerator;

impl Generator for SegmentGenerator {
    fn dim(&self) -> usize {
        2
    }

    fn kind(&self) -> TreeKind {
        TreeKind::Contraction
    }

    fn root(&self) -> Node {
        Node::root(Region::Rect {
            lo: smallvec::smallvec![0.0, 0.0],
            hi: smallvec::smallvec![1.0, 0.0],
        })
    }

    fn children(&self, node: &Node) -> Vec<Node> {
        let Region::Rect { lo, hi } = &node.region else {
            unreachable!("segment trees only hold rectangles")
        };
        let mid = (lo[0] + hi[0]) / 2.0;
        vec![
            node.child(
                Region::Rect {
                    lo: lo.clone(),
                    hi: smallvec::smallvec![mid, 0.0],
                },
                0.5,
                None,
            ),
            node.child(
                Region::Rect {
                    lo: smallvec::smallvec![mid, 0.0],
                    hi: hi.clone(),
                },
                0.5,
                None,
            ),
        ]
    }

    fn diameter_at(&self, level: usize) -> f64 {
        0.5f64.powi(level as i32)
    }

    fn name(&self) -> String {
        "segment([0,1] x {0})".into()
    }
}

/// Length measure on the segment `[0,1] × {0}` of the plane.
pub fn x_axis_segment() -> MeasureTree {
    MeasureTree::new(SegmentGenerator)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::NodeAddress;

    #[test]
    fn cube_children_are_lexicographic_partition() {
        let g = CubeGenerator::new(2, 3, CubeWeights::Uniform).unwrap();
        let kids = g.children(&g.root());
        assert_eq!(kids.len(), 9);
        let corners: Vec<Vec<f64>> = kids
            .iter()
            .map(|k| match &k.region {
                Region::Cube { corner, .. } => corner.to_vec(),
                _ => unreachable!(),
            })
            .collect();
        let mut sorted = corners.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(corners, sorted);
        assert!(kids.iter().all(|k| k.region.within(&g.root().region)));
    }

    #[test]
    fn weights_must_normalize() {
        assert!(cube_measure(1, 2, vec![0.3, 0.3]).is_err());
        assert!(cube_measure(1, 2, vec![0.3, 0.7, 0.0]).is_err());
        assert!(cube_measure(1, 2, vec![-0.3, 1.3]).is_err());
    }

    #[test]
    fn truncated_tree_has_leaves() {
        let t = MeasureTree::new(
            CubeGenerator::new(1, 2, CubeWeights::Uniform)
                .unwrap()
                .with_max_depth(2),
        );
        assert!(t.children_at(&vec![0, 1].into()).unwrap().is_empty());
        assert_eq!(t.node_measure(&vec![0, 1].into()).unwrap(), 0.25);
        assert!(t.node_measure(&vec![0, 1, 0].into()).is_err());
        let _ = NodeAddress::root();
    }

    #[test]
    fn segment_tree_halves() {
        let t = x_axis_segment();
        let fan = t.branch_fan(&vec![1, 0].into()).unwrap();
        assert_eq!(fan.len(), 2);
        assert_eq!(fan[0].1 + fan[1].1, 0.5);
    }
}
