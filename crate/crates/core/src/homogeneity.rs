//! Mass-ordered enumeration of k-adic children, average homogeneity, the
//! dimension bound it implies, doubling-scale counts and large-child
//! frequencies.

use crate::geometry::Point;
use crate::measure::{AxisBox, MeasureTree, Node, NodeAddress, RegionQuery, TreeKind};
use crate::{Error, Result};

/// Largest number of nodes a full-level traversal may touch.
pub const HOM_NODE_LIMIT: f64 = (1u64 << 24) as f64;

/// The children of a node sorted by mass, ties broken lexicographically.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedFan {
    pub addr: NodeAddress,
    /// `order[i]` is the lexicographic child index of the `(i+1)`-th smallest child.
    pub order: Vec<usize>,
    /// Masses in sorted order.
    pub masses: Vec<f64>,
    /// Adjacent pairs whose masses differ by less than `1e-12` relative
    /// without being equal: their order is below floating-point resolution.
    pub near_ties: usize,
}

fn sorted_fan(kids: &[Node]) -> (Vec<usize>, Vec<f64>, usize) {
    let mut order: Vec<usize> = (0..kids.len()).collect();
    // stable: equal masses keep lexicographic order
    order.sort_by(|&a, &b| kids[a].mass.total_cmp(&kids[b].mass));
    let masses: Vec<f64> = order.iter().map(|&i| kids[i].mass).collect();
    let near_ties = masses
        .windows(2)
        .filter(|w| w[0] != w[1] && (w[1] - w[0]) <= 1e-12 * w[1].abs())
        .count();
    (order, masses, near_ties)
}

fn cube_base(tree: &MeasureTree) -> Result<usize> {
    match tree.kind() {
        TreeKind::Cube { k } => Ok(k),
        TreeKind::Contraction => Err(Error::Unsupported(format!(
            "{} is not a k-adic cube tree",
            tree.name()
        ))),
    }
}

pub fn order_children(tree: &MeasureTree, addr: &NodeAddress) -> Result<OrderedFan> {
    cube_base(tree)?;
    let kids = tree.children_at(addr)?;
    if kids.is_empty() {
        return Err(Error::arg("the addressed node is a leaf"));
    }
    let (order, masses, near_ties) = sorted_fan(&kids);
    Ok(OrderedFan {
        addr: addr.clone(),
        order,
        masses,
        near_ties,
    })
}

/// Partial averages `A_l = (kⁿ/l) Σ_{j=1}^{l} Σ_{level-j cubes Q} μ(Q_i)`,
/// where `Q_i` is the `i`-th smallest child of `Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomEstimate {
    pub k: usize,
    pub n: usize,
    pub i: usize,
    /// Inner sums `Σ_Q μ(Q_i)` for `j = 1 … l_max`.
    pub level_sums: Vec<f64>,
    /// `A_1 … A_{l_max}`.
    pub partial: Vec<f64>,
    /// Maximum of `A_l` over the trailing half of the computed levels.
    pub limsup_proxy: f64,
    pub max_all: f64,
    pub near_ties: usize,
}

pub fn hom_estimate(tree: &MeasureTree, i: usize, l_max: usize) -> Result<HomEstimate> {
    let k = cube_base(tree)?;
    let n = tree.dim();
    let fan = k.pow(n as u32);
    if i == 0 || i > fan {
        return Err(Error::domain(format!(
            "order index {i} must lie in 1..={fan}"
        )));
    }
    if l_max == 0 {
        return Err(Error::arg("need at least one level"));
    }
    let worst: f64 = (1..=l_max).map(|j| (fan as f64).powi(j as i32)).sum();
    if worst > HOM_NODE_LIMIT {
        return Err(Error::DepthGuard {
            what: format!("average homogeneity to level {l_max} with fan {fan}"),
            needed: worst,
            limit: HOM_NODE_LIMIT,
            hint: "lower l_max".into(),
        });
    }
    let mut level_sums = vec![0.0; l_max];
    let mut near_ties = 0;
    let mut stack: Vec<Node> = tree.expand(&tree.root());
    while let Some(node) = stack.pop() {
        if node.mass <= 0.0 {
            continue;
        }
        let kids = tree.expand(&node);
        if kids.is_empty() {
            return Err(Error::arg(format!(
                "tree ends at level {} before level {}",
                node.level,
                l_max + 1
            )));
        }
        let (_, masses, ties) = sorted_fan(&kids);
        near_ties += ties;
        level_sums[node.level - 1] += masses[i - 1];
        if node.level < l_max {
            stack.extend(kids);
        }
    }
    let mut partial = Vec::with_capacity(l_max);
    let mut acc = 0.0;
    for (j, s) in level_sums.iter().enumerate() {
        acc += s;
        partial.push(fan as f64 * acc / (j + 1) as f64);
    }
    let tail = &partial[l_max / 2..];
    Ok(HomEstimate {
        k,
        n,
        i,
        limsup_proxy: tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        max_all: partial.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        level_sums,
        partial,
        near_ties,
    })
}

/// Upper bound for the dimension of a measure with `hom_k^i(μ) ≤ kⁿ η`:
/// `-(1/log k) (iη log η + (1 - iη) log((1 - iη)/(kⁿ - i)))`.
pub fn dimension_bound(k: usize, n: usize, i: usize, eta: f64) -> Result<f64> {
    if k < 2 || n == 0 {
        return Err(Error::domain("need k >= 2 and n >= 1"));
    }
    let fan = (k as f64).powi(n as i32);
    if i == 0 || i as f64 >= fan {
        return Err(Error::domain(format!(
            "order index {i} must lie in 1..k^n-1"
        )));
    }
    let ie = i as f64 * eta;
    if !(eta >= 0.0) || eta > 1.0 / fan || ie > 1.0 {
        return Err(Error::domain(format!(
            "eta = {eta} must satisfy 0 <= eta <= k^-n and i*eta <= 1"
        )));
    }
    let lk = (k as f64).ln();
    if eta == 0.0 {
        return Ok((fan - i as f64).ln() / lk);
    }
    let rest = if ie < 1.0 {
        (1.0 - ie) * ((1.0 - ie) / (fan - i as f64)).ln()
    } else {
        0.0
    };
    Ok(-(ie * eta.ln() + rest) / lk)
}

/// `c = k^{-2n/(1-p)}`.
pub fn doubling_constant(n: usize, k: usize, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("p = {p} must lie in (0, 1)")));
    }
    Ok((k as f64).powf(-2.0 * n as f64 / (1.0 - p)))
}

/// Same quantity in natural-log form, for exponents too large for `f64`.
pub fn ln_doubling_constant(n: usize, k: f64, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("p = {p} must lie in (0, 1)")));
    }
    Ok(-2.0 * n as f64 / (1.0 - p) * k.ln())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoublingStats {
    pub x: Point,
    pub gamma: f64,
    pub k: usize,
    pub c: f64,
    pub l: usize,
    /// Scales `j ≤ l` certified as doubling: `lo μ(B(x, γk^{-j})) ≥ c · hi μ(B(x, γk^{-j+1}))`.
    pub count: usize,
    /// Scales that could not be decided at the traversal budget.
    pub undecided: usize,
    pub frequency: f64,
}

pub fn doubling_frequency(
    tree: &MeasureTree,
    x: &Point,
    gamma: f64,
    k: usize,
    c: f64,
    l: usize,
    depth: usize,
) -> Result<DoublingStats> {
    if !(gamma > 0.0) || l == 0 || k < 2 {
        return Err(Error::arg("need gamma > 0, l >= 1 and k >= 2"));
    }
    let ball = |r: f64| {
        tree.region_measure(
            &RegionQuery::ball(x.clone(), r),
            tree.level_for_radius(r) + depth,
        )
    };
    let mut count = 0;
    let mut undecided = 0;
    let mut big = ball(gamma)?;
    for j in 1..=l {
        let small = ball(gamma * (k as f64).powi(-(j as i32)))?;
        if small.lo >= c * big.hi {
            count += 1;
        } else if small.hi >= c * big.lo {
            undecided += 1;
        }
        big = small;
    }
    Ok(DoublingStats {
        x: x.clone(),
        gamma,
        k,
        c,
        l,
        count,
        undecided,
        frequency: count as f64 / l as f64,
    })
}

/// Fraction of levels `j = 1 … l` at which the `(kⁿ - M k^m)`-th smallest
/// child of the level-`j` cube containing `x` has mass above `c · μ(τQ)`
/// (upper bound), `τQ` being the cube dilated by `τ` about its center.
#[allow(clippy::too_many_arguments)]
pub fn large_child_frequency(
    tree: &MeasureTree,
    x: &Point,
    m: usize,
    big_m: usize,
    c: f64,
    tau: f64,
    l: usize,
    depth: usize,
) -> Result<f64> {
    let k = cube_base(tree)?;
    let n = tree.dim();
    let fan = k.pow(n as u32) as i64;
    let idx = fan - big_m as i64 * (k as i64).pow(m as u32);
    if idx < 1 {
        return Err(Error::domain(format!(
            "child index k^n - M k^m = {idx} must be at least 1"
        )));
    }
    if tau < 1.0 || l == 0 {
        return Err(Error::arg("need tau >= 1 and l >= 1"));
    }
    let (path, _) = tree.locate(x, l)?;
    let mut hits = 0;
    let mut node = tree.root();
    for j in 1..=l {
        node = tree
            .expand(&node)
            .into_iter()
            .nth(path.0[j - 1] as usize)
            .expect("located path is valid");
        let kids = tree.expand(&node);
        if kids.is_empty() {
            break;
        }
        let (_, masses, _) = sorted_fan(&kids);
        let center = node.region.center();
        let half = tau * node.region.bounding_radius() / (n as f64).sqrt();
        let lo: Vec<f64> = center.iter().map(|c| c - half).collect();
        let hi: Vec<f64> = center.iter().map(|c| c + half).collect();
        let dil = tree.box_measure(&AxisBox::new(&lo, &hi)?, j + depth)?;
        if masses[idx as usize - 1] > c * dil.hi {
            hits += 1;
        }
    }
    Ok(hits as f64 / l as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{
        binomial_measure, lebesgue, rotating_ball_tree, single_branch, BinomialSpec, QSchedule,
        RotatingBallSpec,
    };

    fn binom(q: f64) -> MeasureTree {
        binomial_measure(BinomialSpec {
            q: QSchedule::Constant(q),
        })
        .unwrap()
    }

    #[test]
    fn ordering() {
        let t = lebesgue(2, 2).unwrap();
        let f = order_children(&t, &vec![1].into()).unwrap();
        assert_eq!(f.order, vec![0, 1, 2, 3]);
        let b = binom(0.25);
        let f = order_children(&b, &NodeAddress::root()).unwrap();
        assert_eq!(f.order, vec![1, 0]);
        let r = rotating_ball_tree(RotatingBallSpec { depth: 2 }).unwrap();
        assert!(matches!(
            order_children(&r, &NodeAddress::root()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn hom_closed_forms() {
        let h = hom_estimate(&lebesgue(1, 2).unwrap(), 1, 16).unwrap();
        assert!(h.partial.iter().all(|a| (a - 1.0).abs() < 1e-12));
        let h = hom_estimate(&lebesgue(1, 2).unwrap(), 2, 10).unwrap();
        assert!(h.partial.iter().all(|a| (a - 1.0).abs() < 1e-12));
        let h = hom_estimate(&binom(0.25), 1, 16).unwrap();
        assert!(h.partial.iter().all(|a| (a - 0.5).abs() < 1e-12));
        assert!(hom_estimate(&lebesgue(2, 4).unwrap(), 1, 12).is_err());
    }

    #[test]
    fn dimension_bound_values() {
        assert!((dimension_bound(2, 1, 1, 0.25).unwrap() - 0.811_278_124_459_132_8).abs() < 1e-12);
        assert!((dimension_bound(2, 1, 1, 0.5).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(dimension_bound(2, 1, 1, 0.0).unwrap(), 0.0);
        assert!(dimension_bound(2, 1, 1, 0.6).is_err());
        assert!(dimension_bound(2, 1, 2, 0.1).is_err());
        // approaching the eta = 0 limit continuously
        let lim = dimension_bound(3, 2, 4, 0.0).unwrap();
        let near = dimension_bound(3, 2, 4, 1e-12).unwrap();
        assert!((lim - near).abs() < 1e-9);
    }

    #[test]
    fn doubling_constants() {
        assert_eq!(doubling_constant(1, 2, 0.5).unwrap(), 1.0 / 16.0);
        assert_eq!(doubling_constant(2, 3, 0.5).unwrap(), 3f64.powi(-8));
        assert!(doubling_constant(1, 2, 1.0).is_err());
        assert!(doubling_constant(1, 2, 0.9).unwrap() < doubling_constant(1, 2, 0.8).unwrap());
    }

    #[test]
    fn doubling_for_lebesgue_and_binomial() {
        let x = Point::new(vec![0.4]).unwrap();
        let s =
            doubling_frequency(&lebesgue(1, 2).unwrap(), &x, 0.25, 2, 1.0 / 16.0, 30, 8).unwrap();
        assert_eq!(s.frequency, 1.0);
        let s = doubling_frequency(&binom(0.25), &x, 0.25, 2, 1.0 / 16.0, 20, 8).unwrap();
        assert_eq!(s.count, 20);
    }

    #[test]
    fn large_children() {
        let t = lebesgue(1, 2).unwrap();
        let x = Point::new(vec![0.3]).unwrap();
        // k^n - M k^m = 2 - 1 = 1
        let f = large_child_frequency(&t, &x, 0, 1, 0.5 / 5.0 * 0.99, 3.0, 12, 6).unwrap();
        assert_eq!(f, 1.0);
        let s = single_branch(1, 2, 1).unwrap();
        let x = Point::new(vec![0.999_999]).unwrap();
        assert_eq!(
            large_child_frequency(&s, &x, 0, 1, 1e-9, 3.0, 10, 4).unwrap(),
            0.0
        );
        let f_small = large_child_frequency(
            &binom(0.3),
            &Point::new(vec![0.2]).unwrap(),
            0,
            1,
            0.01,
            3.0,
            10,
            4,
        )
        .unwrap();
        let f_big = large_child_frequency(
            &binom(0.3),
            &Point::new(vec![0.2]).unwrap(),
            0,
            1,
            0.2,
            3.0,
            10,
            4,
        )
        .unwrap();
        assert!(f_small >= f_big);
        assert!(large_child_frequency(&t, &x, 0, 2, 0.1, 3.0, 4, 4).is_err());
    }
}
