//! A purely unrectifiable planar measure whose cones around the horizontal
//! line have vanishing density.
//!
//! At a level with parameter `I`, a node is replaced by `I` vertical strips
//! stacked on top of each other and alternately shifted left and right; each
//! strip holds `2I²` blocks, and the block weights decay geometrically away
//! from the middle of the strip:
//!
//! ```text
//! f_{k,h}(x, y) = (((-1)^k I + x) / (2I³), (2kI² + h + y) / (2I³)),
//! weight(k, h) = C_I (2I)^{-|h - I² + 1/2|}.
//! ```

use std::f64::consts::LN_2;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::geometry::{Point, Subspace, UnitVector};
use crate::measure::{
    Generator, MeasureTree, Node, NodeAddress, Region, RegionQuery, Similarity2, TreeKind,
};
use crate::{Error, Result};

/// Half width `a` of the root rectangle `[-a, a] × [0, 1]`; the smallest value
/// with `(I + a)/(2I³) ≤ a` for every `I ≥ 2`, so children stay inside.
pub const STRIP_HALF_WIDTH: f64 = 2.0 / 15.0;

/// Normalization constant and repetition count for parameter `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleConstants {
    pub i: usize,
    /// `C_i`, making the `2i³` weights sum to 1.
    pub c_i: f64,
    /// `N_i`, the smallest integer with `(1 - C_i/(8(2i)^{i²-3/2}))^{N_i} < 1/2`.
    /// Exact whenever it is below `2^53`.
    pub n_i: f64,
    /// Natural logarithm of `N_i`, finite even when `N_i` overflows.
    pub ln_n_i: f64,
}

/// `C_i` in closed form: the weights sum to `C_i · 2i · (2i)^{-1/2} (1 - (2i)^{-i²}) / (1 - 1/(2i))`.
fn c_closed(i: usize) -> f64 {
    let b = 2.0 * i as f64;
    let geo = (1.0 - b.powf(-((i * i) as f64))) / (1.0 - 1.0 / b);
    1.0 / (b * b.powf(-0.5) * geo)
}

pub fn schedule_constants(i: usize) -> Result<ScheduleConstants> {
    if i < 2 {
        return Err(Error::domain(format!(
            "schedule constants need i >= 2, got {i}"
        )));
    }
    let c_i = c_closed(i);
    let b = 2.0 * i as f64;
    // ln x with x = C_i / (8 (2i)^{i² - 3/2})
    let ln_x = c_i.ln() - 8f64.ln() - ((i * i) as f64 - 1.5) * b.ln();
    let x = ln_x.exp();
    let (n_i, ln_n_i) = if x > 1e-300 {
        let l = (-x).ln_1p();
        let mut n = (-LN_2 / l).floor() + 1.0;
        if n < 2f64.powi(53) {
            // guard against rounding right at the threshold
            while n > 1.0 && (n - 1.0) * l < -LN_2 {
                n -= 1.0;
            }
            while n * l >= -LN_2 {
                n += 1.0;
            }
        }
        (n, n.ln())
    } else {
        // -ln(1 - x) = x to full precision here
        let ln_n = LN_2.ln() - ln_x;
        (f64::INFINITY, ln_n)
    };
    Ok(ScheduleConstants {
        i,
        c_i,
        n_i,
        ln_n_i,
    })
}

/// Which parameter `I_j` the `j`-th subdivision uses (`j ≥ 1`).
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    /// `N_2` levels with `I = 2`, then `N_3` with `I = 3`, and so on.
    Staged,
    /// `I_j = j + 1`, one level each.
    Increasing,
    /// Explicit `I_1, I_2, …`; the last value repeats.
    Custom(Vec<usize>),
}

fn staged_thresholds() -> &'static [f64] {
    static T: OnceLock<Vec<f64>> = OnceLock::new();
    T.get_or_init(|| {
        let mut acc = 0.0;
        (2..=12)
            .map(|i| {
                acc += schedule_constants(i).expect("i >= 2").n_i;
                acc
            })
            .collect()
    })
}

impl Schedule {
    pub fn i_at(&self, j: usize) -> usize {
        assert!(j >= 1, "schedule positions start at 1");
        match self {
            Schedule::Staged => {
                let t = staged_thresholds();
                2 + t.iter().position(|&c| (j as f64) <= c).unwrap_or(t.len())
            }
            Schedule::Increasing => j + 1,
            Schedule::Custom(v) => v[(j - 1).min(v.len() - 1)],
        }
    }

    /// `M_j = ∏_{t≤j} 2I_t³`.
    pub fn m(&self, j: usize) -> f64 {
        (1..=j)
            .map(|t| 2.0 * (self.i_at(t) as f64).powi(3))
            .product()
    }

    fn validate(&self) -> Result<()> {
        if let Schedule::Custom(v) = self {
            if v.is_empty() || v.iter().any(|&i| i < 2) {
                return Err(Error::Construction(
                    "custom schedule entries must be >= 2".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StripBlockSpec {
    pub schedule: Schedule,
}

/// Weight of block `h` for parameter `i` (independent of the strip).
pub fn block_weight(i: usize, h: usize) -> f64 {
    let b = 2.0 * i as f64;
    c_closed(i) * b.powf(-(h as f64 - (i * i) as f64 + 0.5).abs())
}

/// The map `f^i_{k,h}`.
pub fn strip_map(i: usize, k: usize, h: usize) -> Similarity2 {
    let s = 1.0 / (2.0 * (i as f64).powi(3));
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    Similarity2 {
        scale: s,
        angle: 0.0,
        shift: [sign * i as f64 * s, (2 * k * i * i + h) as f64 * s],
    }
}

fn frame_rect(f: &Similarity2) -> Region {
    let a = STRIP_HALF_WIDTH * f.scale;
    Region::Rect {
        lo: smallvec::smallvec![f.shift[0] - a, f.shift[1]],
        hi: smallvec::smallvec![f.shift[0] + a, f.shift[1] + f.scale],
    }
}

#[derive(Debug, Clone)]
struct StripBlockGenerator {
    schedule: Schedule,
    start: usize,
}

impl Generator for StripBlockGenerator {
    fn dim(&self) -> usize {
        2
    }

    fn kind(&self) -> TreeKind {
        TreeKind::Contraction
    }

    fn root(&self) -> Node {
        let mut n = Node::root(frame_rect(&Similarity2::IDENTITY));
        n.frame = Some(Similarity2::IDENTITY);
        n
    }

    fn children(&self, node: &Node) -> Vec<Node> {
        let frame = node.frame.expect("strip/block nodes carry frames");
        let i = self.schedule.i_at(self.start + node.level + 1);
        let weights: Vec<f64> = (0..2 * i * i).map(|h| block_weight(i, h)).collect();
        let mut out = Vec::with_capacity(2 * i * i * i);
        for k in 0..i {
            for (h, &w) in weights.iter().enumerate() {
                let g = frame.compose(&strip_map(i, k, h));
                out.push(node.child(frame_rect(&g), w, Some(g)));
            }
        }
        out
    }

    fn diameter_at(&self, level: usize) -> f64 {
        let root = (1.0 + 4.0 * STRIP_HALF_WIDTH * STRIP_HALF_WIDTH).sqrt();
        (1..=level).fold(root, |d, l| {
            d / (2.0 * (self.schedule.i_at(self.start + l) as f64).powi(3))
        })
    }

    fn name(&self) -> String {
        format!(
            "strip-block({:?}, from level {})",
            self.schedule, self.start
        )
    }
}

pub fn strip_block_tree(spec: StripBlockSpec) -> Result<MeasureTree> {
    strip_block_subtree(spec, 0)
}

/// The normalized measure inside one level-`start` node, in that node's frame.
/// All level-`start` nodes are translated and scaled copies of each other.
pub fn strip_block_subtree(spec: StripBlockSpec, start: usize) -> Result<MeasureTree> {
    spec.schedule.validate()?;
    Ok(MeasureTree::new(StripBlockGenerator {
        schedule: spec.schedule,
        start,
    }))
}

/// Outcome of the straight-line exclusion checks at one level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CurveExclusionReport {
    pub level: usize,
    /// `I_{level+1}`, the parameter of the subdivision being checked.
    pub i_next: usize,
    pub vertical_lines: usize,
    /// Steep lines meeting both the top block of a strip and the bottom block
    /// of the next strip of the same node.
    pub vertical_violations: usize,
    pub horizontal_lines: usize,
    /// Flat lines meeting more than two strips of one node.
    pub horizontal_violations: usize,
    pub max_strips_hit: usize,
}

impl CurveExclusionReport {
    pub fn violations(&self) -> usize {
        self.vertical_violations + self.horizontal_violations
    }
}

/// Line through `p` with direction `d` meets the closed rectangle.
fn line_meets(p: [f64; 2], d: [f64; 2], r: &Region) -> bool {
    let Region::Rect { lo, hi } = r else {
        unreachable!("strip/block regions are rectangles")
    };
    let nrm = [-d[1], d[0]];
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for (x, y) in [
        (lo[0], lo[1]),
        (lo[0], hi[1]),
        (hi[0], lo[1]),
        (hi[0], hi[1]),
    ] {
        let v = nrm[0] * (x - p[0]) + nrm[1] * (y - p[1]);
        min = min.min(v);
        max = max.max(v);
    }
    min <= 0.0 && max >= 0.0
}

fn uniform_in<R: Rng>(r: &Region, rng: &mut R) -> [f64; 2] {
    let Region::Rect { lo, hi } = r else {
        unreachable!()
    };
    [
        rng.random_range(lo[0]..=hi[0]),
        rng.random_range(lo[1]..=hi[1]),
    ]
}

/// Random unit direction within angle `arccos(1/3)` of `axis` (0 = x, 1 = y),
/// i.e. `|d_axis| ≥ 1/3`.
fn steep_direction<R: Rng>(axis: usize, rng: &mut R) -> [f64; 2] {
    let psi = rng.random_range(-(1.0f64 / 3.0).acos()..=(1.0f64 / 3.0).acos());
    let (s, c) = psi.sin_cos();
    if axis == 1 {
        [s, c]
    } else {
        [c, s]
    }
}

/// Random straight-line check of the two combinatorial facts behind the
/// unrectifiability of the strip/block measure, at the subdivision of level-`level`
/// nodes:
///
/// - a line with `|Δy| ≥ |Δ|/3` never meets both the top block of strip `k`
///   and the bottom block of strip `k + 1` of the same node;
/// - a line with `|Δx| ≥ |Δ|/3` meets at most two strips of a node.
///
/// Each trial draws a random level-`level` node, then one steep and one flat
/// line. Half of the steep lines are aimed through a random top block, which is
/// where a violation would have to start. Block and strip rectangles contain the
/// support, so every reported miss is certain.
pub fn verify_curve_exclusion(
    spec: &StripBlockSpec,
    level: usize,
    trials: usize,
    seed: u64,
) -> Result<CurveExclusionReport> {
    let tree = strip_block_tree(spec.clone())?;
    let i = spec.schedule.i_at(level + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = CurveExclusionReport {
        level,
        i_next: i,
        ..Default::default()
    };
    let blocks = 2 * i * i;
    for trial in 0..trials {
        let addr: Vec<u32> = (1..=level)
            .map(|j| {
                let ij = spec.schedule.i_at(j);
                rng.random_range(0..(2 * ij * ij * ij) as u32)
            })
            .collect();
        let node = tree.node(&NodeAddress(addr))?;
        let frame = node.frame.expect("frames present");
        let block = |k: usize, h: usize| frame_rect(&frame.compose(&strip_map(i, k, h)));
        let strip = |k: usize| {
            let (Region::Rect { lo, .. }, Region::Rect { hi, .. }) =
                (block(k, 0), block(k, blocks - 1))
            else {
                unreachable!()
            };
            Region::Rect { lo, hi }
        };

        let p = if trial % 2 == 0 && i >= 2 {
            uniform_in(&block(rng.random_range(0..i - 1), blocks - 1), &mut rng)
        } else {
            uniform_in(&node.region, &mut rng)
        };
        let d = steep_direction(1, &mut rng);
        rep.vertical_lines += 1;
        for k in 0..i.saturating_sub(1) {
            if line_meets(p, d, &block(k, blocks - 1)) && line_meets(p, d, &block(k + 1, 0)) {
                rep.vertical_violations += 1;
            }
        }

        let p = uniform_in(&strip(rng.random_range(0..i)), &mut rng);
        let d = steep_direction(0, &mut rng);
        rep.horizontal_lines += 1;
        let hit = (0..i).filter(|&k| line_meets(p, d, &strip(k))).count();
        rep.max_strips_hit = rep.max_strips_hit.max(hit);
        if hit > 2 {
            rep.horizontal_violations += 1;
        }
    }
    Ok(rep)
}

/// Horizontal-cone density statistics at one level.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct HorizontalConeRecord {
    pub level: usize,
    pub i_level: usize,
    pub i_next: usize,
    pub samples: usize,
    /// Largest certified upper bound of `μ(X(x, r, ℓ, α)) / μ(B(x, r))`.
    pub max_hi: f64,
    pub mean_mid: f64,
    /// `2 / I_level`, the bound holding at every scale of this level.
    pub bound: f64,
    /// `2 / I_{level+1}`, the bound when the cone meets at most two substrips.
    pub bound_next: f64,
}

/// Samples `μ`-typical points `x` and radii `r ∈ [1/M_level, 1/M_{level-1}]`
/// and bounds the density of the cone `X(x, r, ℓ, α)` around the horizontal
/// line `ℓ`. Each computation runs inside one level-`(level-2)` node, in its
/// own frame, keeping only balls that stay inside that node, so the numbers do
/// not depend on absolute coordinates.
pub fn horizontal_cone_experiment(
    spec: &StripBlockSpec,
    level: usize,
    alpha: f64,
    samples: usize,
    rel_depth: usize,
    seed: u64,
) -> Result<HorizontalConeRecord> {
    crate::geometry::check_alpha(alpha)?;
    if level < 2 {
        return Err(Error::arg(
            "the horizontal-cone experiment starts at level 2",
        ));
    }
    let start = level - 2;
    let tree = strip_block_subtree(spec.clone(), start)?;
    let i_prev = spec.schedule.i_at(level - 1) as f64;
    let i_lvl = spec.schedule.i_at(level) as f64;
    let r_max = 1.0 / (2.0 * i_prev.powi(3));
    let r_min = r_max / (2.0 * i_lvl.powi(3));
    let line = Subspace::line(&UnitVector::axis(2, 0));

    let results: Vec<Result<(f64, f64)>> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed ^ (s as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let (x, r) = loop {
                let (_, node) = tree.sample_node(5, &mut rng);
                let c = node.region.center();
                let r = r_min * (r_max / r_min).powf(rng.random::<f64>());
                if c[1] - r > 0.0 && c[1] + r < 1.0 {
                    break (Point::new(vec![c[0], c[1]])?, r);
                }
            };
            let budget = tree.level_for_radius(r) + rel_depth;
            let den = tree.region_measure(&RegionQuery::ball(x.clone(), r), budget)?;
            let num = tree.region_measure(
                &RegionQuery::ball(x, r).with_plane_cone(line.clone(), alpha),
                budget,
            )?;
            let q = num.ratio(&den)?;
            Ok((q.hi, q.mid()))
        })
        .collect();
    let mut max_hi = 0.0f64;
    let mut sum = 0.0;
    for r in results {
        let (hi, mid) = r?;
        max_hi = max_hi.max(hi);
        sum += mid;
    }
    let i_next = spec.schedule.i_at(level + 1);
    Ok(HorizontalConeRecord {
        level,
        i_level: i_lvl as usize,
        i_next,
        samples,
        max_hi,
        mean_mid: sum / samples as f64,
        bound: 2.0 / i_lvl,
        bound_next: 2.0 / i_next as f64,
    })
}
