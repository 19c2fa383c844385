//! A compact purely unrectifiable set built from rows of slightly rotated
//! balls. At level `i` each ball contains `2i²` tangent balls on its own
//! horizontal axis, each rotated by `±1/√i`; the accumulated rotation along a
//! branch diverges, so no line is an approximate tangent, while the plane cone
//! around the row normal carries vanishing relative mass.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;

use crate::geometry::dist;
use crate::measure::{Generator, MeasureTree, Node, Region, Similarity2, TreeKind};
use crate::{Error, Result};

/// `R_n = R_{n-1} / (2n²)` with `R_0 = 1`.
pub fn rotating_radius(n: usize) -> f64 {
    (1..=n).fold(1.0, |r, i| r / (2.0 * (i * i) as f64))
}

/// Number of level-`n` balls, `∏_{i≤n} 2i²`.
pub fn rotating_count(n: usize) -> f64 {
    (1..=n).fold(1.0, |c, i| c * 2.0 * (i * i) as f64)
}

/// The map `f_{i,j}(p) = (1/(2i²)) (R_{σα_i} p + (2j - 2i² - 1, 0))` with
/// `σ = (-1)^j` and `α_i = 1/√i`, for `j ∈ {1, …, 2i²}`.
pub fn rotating_map(i: usize, j: usize) -> Similarity2 {
    let fan = 2 * i * i;
    debug_assert!(i >= 1 && (1..=fan).contains(&j));
    let s = 1.0 / fan as f64;
    let sigma = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
    Similarity2 {
        scale: s,
        angle: sigma / (i as f64).sqrt(),
        shift: [s * (2.0 * j as f64 - fan as f64 - 1.0), 0.0],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RotatingBallSpec {
    pub depth: usize,
}

#[derive(Debug, Clone)]
struct RotatingGenerator {
    start: usize,
    depth: usize,
}

impl Generator for RotatingGenerator {
    fn dim(&self) -> usize {
        2
    }

    fn kind(&self) -> TreeKind {
        TreeKind::Contraction
    }

    fn root(&self) -> Node {
        let mut n = Node::root(Region::Ball {
            center: smallvec::smallvec![0.0, 0.0],
            radius: 1.0,
        });
        n.frame = Some(Similarity2::IDENTITY);
        n
    }

    fn children(&self, node: &Node) -> Vec<Node> {
        if node.level >= self.depth {
            return Vec::new();
        }
        let frame = node.frame.expect("rotating-ball nodes carry frames");
        let i = self.start + node.level + 1;
        let fan = 2 * i * i;
        let w = 1.0 / fan as f64;
        (1..=fan)
            .map(|j| {
                let g = frame.compose(&rotating_map(i, j));
                let region = Region::Ball {
                    center: smallvec::smallvec![g.shift[0], g.shift[1]],
                    radius: g.scale,
                };
                debug_assert!(region.within(&node.region));
                node.child(region, w, Some(g))
            })
            .collect()
    }

    fn diameter_at(&self, level: usize) -> f64 {
        2.0 * rotating_radius(self.start + level) / rotating_radius(self.start)
    }

    fn max_depth(&self) -> Option<usize> {
        Some(self.depth)
    }

    fn name(&self) -> String {
        if self.start == 0 {
            format!("rotating-balls(depth {})", self.depth)
        } else {
            format!(
                "rotating-balls(levels {}..{})",
                self.start,
                self.start + self.depth
            )
        }
    }
}

/// The rotating-ball measure: uniform weights `1/(2i²)`, so every level-`n`
/// ball has mass `R_n`.
pub fn rotating_ball_tree(spec: RotatingBallSpec) -> Result<MeasureTree> {
    if spec.depth == 0 {
        return Err(Error::Construction(
            "rotating-ball depth must be at least 1".into(),
        ));
    }
    Ok(MeasureTree::new(RotatingGenerator {
        start: 0,
        depth: spec.depth,
    }))
}

/// The normalized subtree below a level-`start` ball, written in that ball's
/// own frame (root `B(0,1)`, first fan of size `2(start+1)²`).
pub fn rotating_ball_subtree(start: usize, depth: usize) -> Result<MeasureTree> {
    if depth == 0 {
        return Err(Error::Construction(
            "rotating-ball depth must be at least 1".into(),
        ));
    }
    Ok(MeasureTree::new(RotatingGenerator { start, depth }))
}

/// Partial sums `S_n = Σ_{i≤n} (-1)^{a_i} α_i` along a branch, where the
/// branch lists 0-based child indices (`a_i = path[i-1] + 1`). `S_n` is the
/// rotation angle of the level-`n` ball on that branch.
pub fn angle_partial_sum(path: &[u32]) -> Vec<f64> {
    let mut s = 0.0;
    path.iter()
        .enumerate()
        .map(|(k, &c)| {
            let i = k + 1;
            s += if (c + 1) % 2 == 0 { 1.0 } else { -1.0 } / (i as f64).sqrt();
            s
        })
        .collect()
}

/// Uniformly random branch of length `len`.
pub fn random_branch<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<u32> {
    (1..=len)
        .map(|i| rng.random_range(0..(2 * i * i) as u32))
        .collect()
}

/// Per-level result of counting level-`n` balls that meet the cone around the
/// row normal.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ConeHitRecord {
    pub n: usize,
    /// Level-`n` balls inside the branch's level-`(n-1)` ball that may meet
    /// `X(x, r, ℓ, α)` (an upper count: only provably disjoint balls are excluded).
    pub hits: usize,
    pub fan: usize,
    /// `hits / n`: bound for `μ(X(x, r, ℓ, α)) / (2r)` in units of the total mass.
    pub ratio_bound: f64,
}

/// Counts, for `n = 2 … path.len() - tail`, the level-`n` balls in the
/// branch's level-`(n-1)` ball that meet the plane cone `X(x, r, ℓ, α)`, where
/// `x` is the branch point, `r = n R_n / 2` and `ℓ` is perpendicular to the
/// level-`(n-1)` row. The count is done in the frame of the level-`(n-1)` ball,
/// where the row is the horizontal axis, so it is exact up to rounding at any
/// depth.
pub fn perpendicular_cone_profile(
    path: &[u32],
    alpha: f64,
    tail: usize,
) -> Result<Vec<ConeHitRecord>> {
    crate::geometry::check_alpha(alpha)?;
    let depth = path.len();
    if depth < tail + 2 {
        return Err(Error::arg("branch too short for the requested tail"));
    }
    for (k, &c) in path.iter().enumerate() {
        let i = k + 1;
        if c as usize >= 2 * i * i {
            return Err(Error::arg(format!(
                "branch index {c} out of range at level {i}"
            )));
        }
    }
    let phi = alpha.asin();
    let mut out = Vec::new();
    for n in 2..=depth - tail {
        // branch point in the frame of its level-(n-1) ball
        let mut x = [0.0, 0.0];
        for i in (n..=depth).rev() {
            x = rotating_map(i, path[i - 1] as usize + 1).apply(x);
        }
        let fan = 2 * n * n;
        let rho = 1.0 / fan as f64;
        let r = 1.0 / (4.0 * n as f64);
        let hits = (1..=fan)
            .filter(|&m| {
                let c = [rho * (2.0 * m as f64 - fan as f64 - 1.0), 0.0];
                !ball_misses_vertical_cone(x, r, phi, c, rho)
            })
            .count();
        out.push(ConeHitRecord {
            n,
            hits,
            fan,
            ratio_bound: hits as f64 / n as f64,
        });
    }
    Ok(out)
}

/// True only if `B(c, ρ)` provably misses `B(x, r) ∩ {y : angle(y - x, vertical) < φ}`.
fn ball_misses_vertical_cone(x: [f64; 2], r: f64, phi: f64, c: [f64; 2], rho: f64) -> bool {
    let d = dist(&x, &c);
    if d - rho > r * (1.0 + 1e-12) {
        return true;
    }
    if d <= rho {
        return false;
    }
    let psi = (c[0] - x[0]).abs().atan2((c[1] - x[1]).abs());
    debug_assert!(psi <= FRAC_PI_2 + 1e-15);
    psi - (rho / d).asin() >= phi + 1e-12
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationRecord {
    pub n: usize,
    /// Smallest distance from the branch point to a level-`n + 1` ball outside
    /// the branch's level-`(n-1)` ball (infinite if none comes close).
    pub min_dist: f64,
    /// `n R_n / 2`.
    pub bound: f64,
    pub holds: bool,
}

/// Checks in global coordinates that every point of the set outside the
/// branch's level-`(n-1)` ball is at distance at least `n R_n / 2` from the
/// branch point, for `n = 1 … n_max`. Level-`n + 1` balls stand in for the set;
/// the traversal prunes every ball already farther than the bound.
pub fn sibling_separation_check(path: &[u32], n_max: usize) -> Result<Vec<SeparationRecord>> {
    if n_max + 1 > path.len() {
        return Err(Error::arg("branch shorter than n_max + 1"));
    }
    if n_max > 8 {
        return Err(Error::arg("global coordinates lose precision beyond n = 8"));
    }
    let mut frame = Similarity2::IDENTITY;
    for (k, &c) in path.iter().enumerate() {
        frame = frame.compose(&rotating_map(k + 1, c as usize + 1));
    }
    let x = frame.shift;
    let tree = rotating_ball_tree(RotatingBallSpec { depth: n_max + 1 })?;
    let mut out = Vec::new();
    for n in 1..=n_max {
        let bound = n as f64 * rotating_radius(n) / 2.0;
        let ancestor = &path[..n - 1];
        let mut min_dist = f64::INFINITY;
        // (node, its path agrees with the branch so far)
        let mut stack = vec![(tree.root(), true)];
        while let Some((node, on_branch)) = stack.pop() {
            if on_branch && node.level == n - 1 {
                continue;
            }
            let d = node.region.nearest_sq(&x).sqrt();
            if d >= bound {
                continue;
            }
            if node.level == n + 1 {
                min_dist = min_dist.min(d);
                continue;
            }
            for (c, kid) in tree.expand(&node).into_iter().enumerate() {
                let still = on_branch && node.level < n - 1 && ancestor[node.level] as usize == c;
                stack.push((kid, still));
            }
        }
        out.push(SeparationRecord {
            n,
            min_dist,
            bound,
            holds: min_dist >= bound,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::NodeAddress;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn radii_and_counts() {
        assert_eq!(rotating_radius(2), 1.0 / 16.0);
        assert_eq!(rotating_radius(3), 1.0 / 288.0);
        for n in 1..12 {
            assert!((rotating_radius(n) * rotating_count(n) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn fans_are_contained_and_uniform() {
        let t = rotating_ball_tree(RotatingBallSpec { depth: 4 }).unwrap();
        let fan = t.branch_fan(&vec![1, 5, 3].into()).unwrap();
        assert_eq!(fan.len(), 18);
        for (region, w) in &fan {
            assert!((w - rotating_radius(3)).abs() < 1e-15);
            match region {
                Region::Ball { radius, .. } => assert!((radius - rotating_radius(3)).abs() < 1e-15),
                _ => panic!("expected balls"),
            }
        }
        let parent = t.node(&vec![1, 5].into()).unwrap();
        assert!(fan.iter().all(|(r, _)| r.within(&parent.region)));
        let s: f64 = fan.iter().map(|f| f.1).sum();
        assert!((s - parent.mass).abs() < 1e-12);
        assert_eq!(t.node_measure(&NodeAddress::root()).unwrap(), 1.0);
    }

    #[test]
    fn frame_angle_is_partial_sum() {
        let t = rotating_ball_tree(RotatingBallSpec { depth: 5 }).unwrap();
        let path = vec![1u32, 4, 9, 0, 30];
        let node = t.node(&path.clone().into()).unwrap();
        let sums = angle_partial_sum(&path);
        assert!((node.frame.unwrap().angle - sums[4]).abs() < 1e-14);
    }

    #[test]
    fn rows_are_tangent() {
        // consecutive level-1 centers are 2·R_1 apart
        let a = rotating_map(1, 1).shift;
        let b = rotating_map(1, 2).shift;
        assert!((dist(&a, &b) - 2.0 * rotating_radius(1)).abs() < 1e-15);
    }

    #[test]
    fn cone_hits_stay_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let path = random_branch(70, &mut rng);
        let prof = perpendicular_cone_profile(&path, 0.9, 6).unwrap();
        assert_eq!(prof.len(), 63);
        let m = (10.0f64 / 0.9).ceil() as usize + 1;
        assert!(prof.iter().filter(|r| r.n >= 8).all(|r| r.hits <= m));
    }

    #[test]
    fn separation_holds_on_a_branch() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let path = random_branch(12, &mut rng);
        for rec in sibling_separation_check(&path, 5).unwrap() {
            assert!(rec.holds, "{rec:?}");
        }
    }
}
