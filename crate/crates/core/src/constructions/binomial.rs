use crate::geometry::Point;
use crate::measure::{Generator, MeasureTree, Node, Region, RegionQuery, TreeKind};
use crate::{Error, Result};

/// Right-child weights `q_i` of the binomial cascade, `i = 1, 2, …`.
#[derive(Debug, Clone, PartialEq)]
pub enum QSchedule {
    /// `q_i = 1/(i+2)`: non-increasing, tends to 0, divergent sum.
    Default,
    Constant(f64),
    /// Explicit `q_1, q_2, …`; the tree ends (leaves) after the last entry.
    Custom(Vec<f64>),
}

impl QSchedule {
    pub fn q(&self, i: usize) -> f64 {
        match self {
            QSchedule::Default => 1.0 / (i as f64 + 2.0),
            QSchedule::Constant(q) => *q,
            QSchedule::Custom(v) => v[i - 1],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinomialSpec {
    pub q: QSchedule,
}

impl Default for BinomialSpec {
    fn default() -> Self {
        BinomialSpec {
            q: QSchedule::Default,
        }
    }
}

#[derive(Debug, Clone)]
struct BinomialGenerator {
    spec: BinomialSpec,
}

impl Generator for BinomialGenerator {
    fn dim(&self) -> usize {
        1
    }

    fn kind(&self) -> TreeKind {
        TreeKind::Cube { k: 2 }
    }

    fn root(&self) -> Node {
        Node::root(Region::Cube {
            corner: smallvec::smallvec![0.0],
            side: 1.0,
        })
    }

    fn children(&self, node: &Node) -> Vec<Node> {
        if self.max_depth().is_some_and(|d| node.level >= d) {
            return Vec::new();
        }
        let Region::Cube { corner, side } = &node.region else {
            unreachable!("binomial trees only hold intervals")
        };
        let q = self.spec.q.q(node.level + 1);
        let s = side / 2.0;
        vec![
            node.child(
                Region::Cube {
                    corner: corner.clone(),
                    side: s,
                },
                1.0 - q,
                None,
            ),
            node.child(
                Region::Cube {
                    corner: smallvec::smallvec![corner[0] + s],
                    side: s,
                },
                q,
                None,
            ),
        ]
    }

    fn diameter_at(&self, level: usize) -> f64 {
        0.5f64.powi(level as i32)
    }

    fn max_depth(&self) -> Option<usize> {
        match &self.spec.q {
            QSchedule::Custom(v) => Some(v.len()),
            _ => None,
        }
    }

    fn name(&self) -> String {
        match &self.spec.q {
            QSchedule::Default => "binomial(q_i = 1/(i+2))".into(),
            QSchedule::Constant(q) => format!("binomial(q = {q})"),
            QSchedule::Custom(v) => format!("binomial({} custom levels)", v.len()),
        }
    }
}

/// Binomial cascade on `[0,1)`: at level `i` the left half gets `1 - q_i`,
/// the right half `q_i`.
pub fn binomial_measure(spec: BinomialSpec) -> Result<MeasureTree> {
    let bad = |q: f64| !(q > 0.0 && q < 0.5);
    match &spec.q {
        QSchedule::Default => {}
        QSchedule::Constant(q) if bad(*q) => {
            return Err(Error::Construction(format!("q = {q} must lie in (0, 1/2)")))
        }
        QSchedule::Constant(_) => {}
        QSchedule::Custom(v) => {
            if v.is_empty() {
                return Err(Error::Construction("empty q schedule".into()));
            }
            if let Some((i, q)) = v.iter().enumerate().find(|(_, q)| bad(**q)) {
                return Err(Error::Construction(format!(
                    "q_{} = {q} must lie in (0, 1/2)",
                    i + 1
                )));
            }
        }
    }
    Ok(MeasureTree::new(BinomialGenerator { spec }))
}

/// Best constant `c` such that `(x - r, x + r)` contains `count` k-adic
/// intervals whose `separation`-fold dilates are pairwise disjoint and which
/// all have mass at least `c · μ(B(x, 3r))`.
///
/// Candidate intervals come from the levels `ℓ(r) … ℓ(r) + depth`, where `ℓ(r)`
/// is the first level with interval length at most `r`. The search is exact
/// over that candidate family: a binary search over mass thresholds, each
/// decided by earliest-end-first interval scheduling of the dilates.
pub fn six_interval_constant(
    tree: &MeasureTree,
    x: &Point,
    r: f64,
    count: usize,
    separation: f64,
    depth: usize,
) -> Result<f64> {
    let TreeKind::Cube { .. } = tree.kind() else {
        return Err(Error::Unsupported(
            "six-interval search needs a k-adic interval tree".into(),
        ));
    };
    if tree.dim() != 1 || x.dim() != 1 {
        return Err(Error::arg("six-interval search works on the line only"));
    }
    if count < 2 || separation < 1.0 || !(r > 0.0) {
        return Err(Error::arg("need count >= 2, separation >= 1 and r > 0"));
    }
    let x0 = x.coords[0];
    let (lo, hi) = (x0 - r, x0 + r);
    let first = tree.level_for_radius(r);
    let last = first + depth;

    // (start, end, mass) of every candidate interval
    let mut cands: Vec<(f64, f64, f64)> = Vec::new();
    let mut stack = vec![tree.root()];
    while let Some(node) = stack.pop() {
        let Region::Cube { corner, side } = &node.region else {
            unreachable!()
        };
        let (a, b) = (corner[0], corner[0] + side);
        if b <= lo || a >= hi || node.mass <= 0.0 {
            continue;
        }
        if node.level >= first && a > lo && b <= hi {
            let c = (a + b) / 2.0;
            let half = separation * side / 2.0;
            cands.push((c - half, c + half, node.mass));
        }
        if node.level < last {
            stack.extend(tree.expand(&node));
        }
    }
    let den = tree.region_measure(
        &RegionQuery::ball(x.clone(), 3.0 * r),
        tree.level_for_radius(3.0 * r) + depth,
    )?;
    if cands.len() < count || den.hi <= 0.0 {
        return Ok(0.0);
    }

    let feasible = |tau: f64| -> bool {
        let mut chosen: Vec<(f64, f64)> = cands
            .iter()
            .filter(|c| c.2 >= tau)
            .map(|c| (c.0, c.1))
            .collect();
        chosen.sort_by(|p, q| p.1.total_cmp(&q.1).then(p.0.total_cmp(&q.0)));
        let mut end = f64::NEG_INFINITY;
        let mut taken = 0;
        for (s, e) in chosen {
            if s >= end {
                taken += 1;
                end = e;
                if taken == count {
                    return true;
                }
            }
        }
        false
    };

    let mut masses: Vec<f64> = cands.iter().map(|c| c.2).collect();
    masses.sort_by(f64::total_cmp);
    masses.dedup();
    if !feasible(masses[0]) {
        return Ok(0.0);
    }
    let (mut ok, mut bad) = (0usize, masses.len());
    while bad - ok > 1 {
        let mid = (ok + bad) / 2;
        if feasible(masses[mid]) {
            ok = mid;
        } else {
            bad = mid;
        }
    }
    Ok(masses[ok] / den.hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::lebesgue;
    use crate::measure::NodeAddress;

    #[test]
    fn binomial_first_split() {
        let t = binomial_measure(BinomialSpec::default()).unwrap();
        assert!((t.node_measure(&vec![0].into()).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let q = 0.25;
        let t = binomial_measure(BinomialSpec {
            q: QSchedule::Constant(q),
        })
        .unwrap();
        assert_eq!(t.node_measure(&vec![1].into()).unwrap(), q);
        assert_eq!(t.node_measure(&vec![1, 1].into()).unwrap(), q * q);
        assert_eq!(t.node_measure(&NodeAddress::root()).unwrap(), 1.0);
    }

    #[test]
    fn binomial_rejects_half() {
        for q in [0.5, 0.0, -0.1, 0.7] {
            assert!(binomial_measure(BinomialSpec {
                q: QSchedule::Constant(q)
            })
            .is_err());
        }
        assert!(binomial_measure(BinomialSpec {
            q: QSchedule::Constant(0.5 - 1e-9)
        })
        .is_ok());
        assert!(binomial_measure(BinomialSpec {
            q: QSchedule::Custom(vec![0.2, 0.6])
        })
        .is_err());
    }

    /// Brute force over all `count`-subsets of the candidates at levels `levels`.
    fn brute(
        tree: &MeasureTree,
        x: f64,
        r: f64,
        levels: std::ops::RangeInclusive<usize>,
        count: usize,
    ) -> f64 {
        let mut cands: Vec<(f64, f64, f64)> = Vec::new();
        for level in levels {
            let n = 1usize << level;
            for j in 0..n {
                let a = j as f64 / n as f64;
                let b = a + 1.0 / n as f64;
                if a > x - r && b <= x + r {
                    let path: Vec<u32> = (0..level).rev().map(|d| ((j >> d) & 1) as u32).collect();
                    let m = tree.node_measure(&path.into()).unwrap();
                    let c = (a + b) / 2.0;
                    cands.push((c - 1.5 / n as f64, c + 1.5 / n as f64, m));
                }
            }
        }
        let mut best = 0.0f64;
        let k = cands.len();
        for mask in 0u32..(1 << k) {
            if mask.count_ones() as usize != count {
                continue;
            }
            let chosen: Vec<_> = (0..k)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| cands[i])
                .collect();
            let ok = chosen
                .iter()
                .enumerate()
                .all(|(i, p)| chosen[i + 1..].iter().all(|q| p.1 <= q.0 || q.1 <= p.0));
            if ok {
                best = best.max(chosen.iter().map(|c| c.2).fold(f64::INFINITY, f64::min));
            }
        }
        best
    }

    #[test]
    fn interval_search_matches_brute_force() {
        let t = binomial_measure(BinomialSpec {
            q: QSchedule::Constant(0.3),
        })
        .unwrap();
        for (x, count) in [(0.4, 3), (0.45, 2), (0.52, 3)] {
            let p = Point::new(vec![x]).unwrap();
            let r = 0.25;
            let got = six_interval_constant(&t, &p, r, count, 3.0, 2).unwrap();
            let den = t
                .region_measure(
                    &RegionQuery::ball(p.clone(), 0.75),
                    t.level_for_radius(0.75) + 2,
                )
                .unwrap();
            let first = t.level_for_radius(r);
            let exp = brute(&t, x, r, first..=first + 2, count);
            assert!(
                (got * den.hi - exp).abs() < 1e-15,
                "x = {x}: {} vs {exp}",
                got * den.hi
            );
        }
    }

    #[test]
    fn lebesgue_constant_is_scale_free() {
        let t = lebesgue(1, 2).unwrap();
        // same dyadic alignment of x relative to r at three scales
        let vals: Vec<f64> = [(0.5, 0.125), (0.5, 0.0625), (0.25, 0.03125)]
            .iter()
            .map(|&(x, r)| {
                six_interval_constant(&t, &Point::new(vec![x]).unwrap(), r, 6, 3.0, 6).unwrap()
            })
            .collect();
        assert!(vals[0] > 0.0);
        assert!(vals.iter().all(|v| (v - vals[0]).abs() < 1e-12), "{vals:?}");
        let off_grid =
            six_interval_constant(&t, &Point::new(vec![0.3]).unwrap(), 0.1, 6, 3.0, 6).unwrap();
        assert!(off_grid > 0.0);
    }

    #[test]
    fn depth_limited_point_cannot_host_six_intervals() {
        let t = crate::constructions::single_branch(1, 2, 0).unwrap();
        let v =
            six_interval_constant(&t, &Point::new(vec![0.3]).unwrap(), 0.25, 6, 3.0, 6).unwrap();
        assert_eq!(v, 0.0);
    }
}
