//! Lazy weight trees representing probability measures, with certified
//! interval-valued region queries and μ-distributed sampling.
//!
//! A tree node carries a region (half-open k-adic cube, closed rectangle or
//! closed ball), its absolute mass and the conditional weight it received from
//! its parent. The measure of a node is spread over its region in an unknown
//! way below the traversal budget, so a node cut by a query boundary only
//! contributes to the upper bound.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{
    dist, halfspace_margin, norm, one_sided_level, plane_cone_margin, Coords, Point, Subspace,
    UnitVector,
};
use crate::{Error, Result};

/// Sequence of child indices from the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct NodeAddress(pub Vec<u32>);

impl NodeAddress {
    pub fn root() -> Self {
        NodeAddress(Vec::new())
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn child(&self, i: u32) -> Self {
        let mut p = self.0.clone();
        p.push(i);
        NodeAddress(p)
    }

    pub fn parent(&self) -> Option<Self> {
        let (_, rest) = self.0.split_last()?;
        Some(NodeAddress(rest.to_vec()))
    }
}

impl From<Vec<u32>> for NodeAddress {
    fn from(v: Vec<u32>) -> Self {
        NodeAddress(v)
    }
}

/// Planar similarity `p ↦ scale · R(angle) p + shift`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similarity2 {
    pub scale: f64,
    pub angle: f64,
    pub shift: [f64; 2],
}

impl Similarity2 {
    pub const IDENTITY: Similarity2 = Similarity2 {
        scale: 1.0,
        angle: 0.0,
        shift: [0.0, 0.0],
    };

    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        let (s, c) = self.angle.sin_cos();
        [
            self.scale * (c * p[0] - s * p[1]) + self.shift[0],
            self.scale * (s * p[0] + c * p[1]) + self.shift[1],
        ]
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Similarity2) -> Similarity2 {
        Similarity2 {
            scale: self.scale * inner.scale,
            angle: self.angle + inner.angle,
            shift: self.apply(inner.shift),
        }
    }

    pub fn inverse_apply(&self, q: [f64; 2]) -> [f64; 2] {
        let d = [
            (q[0] - self.shift[0]) / self.scale,
            (q[1] - self.shift[1]) / self.scale,
        ];
        let (s, c) = self.angle.sin_cos();
        [c * d[0] + s * d[1], -s * d[0] + c * d[1]]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    /// Half-open cube `corner + [0, side)ⁿ`.
    Cube { corner: Coords, side: f64 },
    /// Closed axis-parallel box; degenerate sides are allowed.
    Rect { lo: Coords, hi: Coords },
    /// Closed ball; radius 0 is a single point.
    Ball { center: Coords, radius: f64 },
}

impl Region {
    pub fn dim(&self) -> usize {
        match self {
            Region::Cube { corner, .. } => corner.len(),
            Region::Rect { lo, .. } => lo.len(),
            Region::Ball { center, .. } => center.len(),
        }
    }

    pub fn center(&self) -> Coords {
        match self {
            Region::Cube { corner, side } => corner.iter().map(|c| c + side / 2.0).collect(),
            Region::Rect { lo, hi } => lo.iter().zip(hi).map(|(a, b)| (a + b) / 2.0).collect(),
            Region::Ball { center, .. } => center.clone(),
        }
    }

    /// Radius of a closed ball about [`Region::center`] containing the region.
    pub fn bounding_radius(&self) -> f64 {
        match self {
            Region::Cube { corner, side } => side * (corner.len() as f64).sqrt() / 2.0,
            Region::Rect { lo, hi } => {
                let d: Coords = lo.iter().zip(hi).map(|(a, b)| b - a).collect();
                norm(&d) / 2.0
            }
            Region::Ball { radius, .. } => *radius,
        }
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.bounding_radius()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        match self {
            Region::Cube { corner, side } => {
                corner.iter().zip(p).all(|(c, x)| *x >= *c && *x < c + side)
            }
            Region::Rect { lo, hi } => lo
                .iter()
                .zip(hi)
                .zip(p)
                .all(|((a, b), x)| *x >= *a && *x <= *b),
            Region::Ball { center, radius } => dist(center, p) <= *radius,
        }
    }

    /// Squared distance from `p` to the closure of the region.
    pub fn nearest_sq(&self, p: &[f64]) -> f64 {
        match self {
            Region::Cube { corner, side } => corner
                .iter()
                .zip(p)
                .map(|(c, x)| {
                    let d = (c - x).max(x - (c + side)).max(0.0);
                    d * d
                })
                .sum(),
            Region::Rect { lo, hi } => lo
                .iter()
                .zip(hi)
                .zip(p)
                .map(|((a, b), x)| {
                    let d = (a - x).max(x - b).max(0.0);
                    d * d
                })
                .sum(),
            Region::Ball { center, radius } => {
                let d = (dist(center, p) - radius).max(0.0);
                d * d
            }
        }
    }

    /// Squared distance from `p` to the farthest point of the closure.
    pub fn farthest_sq(&self, p: &[f64]) -> f64 {
        match self {
            Region::Cube { corner, side } => corner
                .iter()
                .zip(p)
                .map(|(c, x)| {
                    let d = (x - c).abs().max((c + side - x).abs());
                    d * d
                })
                .sum(),
            Region::Rect { lo, hi } => lo
                .iter()
                .zip(hi)
                .zip(p)
                .map(|((a, b), x)| {
                    let d = (x - a).abs().max((b - x).abs());
                    d * d
                })
                .sum(),
            Region::Ball { center, radius } => {
                let d = dist(center, p) + radius;
                d * d
            }
        }
    }

    /// Whether the region lies in `region` (closure-based, conservative).
    pub fn within(&self, outer: &Region) -> bool {
        const TOL: f64 = 1e-12;
        match (self, outer) {
            (
                Region::Ball { center, radius },
                Region::Ball {
                    center: c2,
                    radius: r2,
                },
            ) => dist(center, c2) + radius <= r2 + TOL,
            (_, Region::Ball { center, radius }) => self.farthest_sq(center).sqrt() <= radius + TOL,
            (inner, Region::Cube { corner, side }) => {
                let (lo, hi) = inner.bbox();
                corner
                    .iter()
                    .zip(lo.iter().zip(&hi))
                    .all(|(c, (a, b))| *a >= c - TOL && *b <= c + side + TOL)
            }
            (inner, Region::Rect { lo: ol, hi: oh }) => {
                let (lo, hi) = inner.bbox();
                (0..lo.len()).all(|i| lo[i] >= ol[i] - TOL && hi[i] <= oh[i] + TOL)
            }
        }
    }

    /// Closed axis-parallel bounding box.
    pub fn bbox(&self) -> (Coords, Coords) {
        match self {
            Region::Cube { corner, side } => {
                (corner.clone(), corner.iter().map(|c| c + side).collect())
            }
            Region::Rect { lo, hi } => (lo.clone(), hi.clone()),
            Region::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub region: Region,
    /// Absolute mass `μ(node)`.
    pub mass: f64,
    /// Conditional weight relative to the parent (1 at the root).
    pub weight: f64,
    pub level: usize,
    /// Map from the generator's reference frame to this node, for
    /// similarity-generated trees.
    pub frame: Option<Similarity2>,
}

impl Node {
    pub fn root(region: Region) -> Self {
        Node {
            region,
            mass: 1.0,
            weight: 1.0,
            level: 0,
            frame: None,
        }
    }

    pub fn child(&self, region: Region, weight: f64, frame: Option<Similarity2>) -> Self {
        Node {
            region,
            mass: self.mass * weight,
            weight,
            level: self.level + 1,
            frame,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeKind {
    /// Children of every node are its `kⁿ` k-adic subcubes in lexicographic order.
    Cube { k: usize },
    /// Balls or rectangles produced by contractions.
    Contraction,
}

/// Rule producing the children of any node.
///
/// Implementations must be pure: the children of a node depend only on the
/// node itself, so memoization can never change results.
pub trait Generator: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn kind(&self) -> TreeKind;
    fn root(&self) -> Node;
    /// Children with conditional weights summing to 1; empty for leaves.
    fn children(&self, node: &Node) -> Vec<Node>;
    /// Upper bound for the diameter of every node at `level`.
    fn diameter_at(&self, level: usize) -> f64;
    /// Depth at which nodes become leaves, if finite.
    fn max_depth(&self) -> Option<usize> {
        None
    }
    fn name(&self) -> String;
}

const MEMO_MAX_ENTRIES: usize = 1 << 16;
const MEMO_MAX_DEPTH: usize = 24;

#[derive(Debug, Default)]
struct Memo {
    children: RwLock<HashMap<Vec<u32>, Arc<Vec<Node>>>>,
}

/// A probability measure given by a lazily expanded weight tree.
///
/// Cloning is cheap and shares the generator and the child memo.
#[derive(Debug, Clone)]
pub struct MeasureTree {
    gen: Arc<dyn Generator>,
    memo: Arc<Memo>,
}

/// Certified enclosure `lo ≤ μ(region) ≤ hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureInterval {
    pub lo: f64,
    pub hi: f64,
    pub depth_used: usize,
}

impl MeasureInterval {
    pub fn exact(v: f64) -> Self {
        MeasureInterval {
            lo: v,
            hi: v,
            depth_used: 0,
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn mid(&self) -> f64 {
        (self.lo + self.hi) / 2.0
    }

    /// Interval quotient `[lo/den.hi, hi/den.lo]`, capped at 1. Valid when the
    /// numerator region is contained in the denominator region.
    pub fn ratio(&self, den: &MeasureInterval) -> Result<MeasureInterval> {
        if den.hi <= 0.0 {
            return Err(Error::UndefinedRatio);
        }
        let lo = (self.lo / den.hi).min(1.0);
        let hi = if den.lo > 0.0 {
            (self.hi / den.lo).min(1.0)
        } else {
            1.0
        };
        Ok(MeasureInterval {
            lo: lo.min(hi),
            hi,
            depth_used: self.depth_used.max(den.depth_used),
        })
    }
}

/// Classification of a node region against a query set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    Inside,
    Outside,
    Undecided,
}

/// A set whose measure can be bounded by tree traversal.
///
/// `classify` must be sound: `Inside` only if the whole region lies in the
/// set, `Outside` only if the region misses it (up to a μ-null boundary).
pub trait Shape: Sync {
    fn classify(&self, region: &Region) -> Class;
}

/// `B(x, r) ∩ X(x, V, α) ∩ X⁺(x, ζ, α') ∖ H(x, θ, a)`, where omitted parts are
/// the whole space. The ball is closed, the cones are open.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionQuery {
    pub center: Point,
    pub radius: f64,
    pub plane_cone: Option<(Subspace, f64)>,
    /// `(θ, a)` removes the almost-half-space `H(x, θ, a)`.
    pub half_cone_excluded: Option<(UnitVector, f64)>,
    /// `(ζ, α)` intersects with the one-sided cone `X⁺(x, ζ, α)`.
    pub one_sided_cone: Option<(UnitVector, f64)>,
}

impl RegionQuery {
    pub fn ball(center: Point, radius: f64) -> Self {
        RegionQuery {
            center,
            radius,
            plane_cone: None,
            half_cone_excluded: None,
            one_sided_cone: None,
        }
    }

    pub fn with_plane_cone(mut self, v: Subspace, alpha: f64) -> Self {
        self.plane_cone = Some((v, alpha));
        self
    }

    pub fn without_half_cone(mut self, theta: UnitVector, a: f64) -> Self {
        self.half_cone_excluded = Some((theta, a));
        self
    }

    pub fn with_one_sided_cone(mut self, zeta: UnitVector, alpha: f64) -> Self {
        self.one_sided_cone = Some((zeta, alpha));
        self
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.center.dim() != dim {
            return Err(Error::arg(format!(
                "query center has dimension {}, tree has {dim}",
                self.center.dim()
            )));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::arg(format!(
                "query radius {} must be positive",
                self.radius
            )));
        }
        if let Some((v, a)) = &self.plane_cone {
            crate::geometry::check_alpha(*a)?;
            if v.ambient() != dim {
                return Err(Error::arg("plane cone subspace has the wrong dimension"));
            }
        }
        for (u, a) in self.half_cone_excluded.iter().chain(&self.one_sided_cone) {
            if u.dim() != dim {
                return Err(Error::arg("cone direction has the wrong dimension"));
            }
            if !(0.0..=1.0).contains(a) {
                return Err(Error::domain(format!(
                    "cone parameter {a} must lie in [0, 1]"
                )));
            }
        }
        Ok(())
    }

    /// Exact membership of a point.
    pub fn contains_point(&self, y: &[f64]) -> bool {
        let x = self.center.as_slice();
        if dist(x, y) > self.radius {
            return false;
        }
        if let Some((v, a)) = &self.plane_cone {
            if plane_cone_margin(x, v, *a, y) <= 0.0 {
                return false;
            }
        }
        if let Some((t, a)) = &self.half_cone_excluded {
            if halfspace_margin(x, t.as_slice(), *a, y) > 0.0 {
                return false;
            }
        }
        if let Some((z, a)) = &self.one_sided_cone {
            if halfspace_margin(x, z.as_slice(), one_sided_level(*a), y) <= 0.0 {
                return false;
            }
        }
        true
    }
}

/// Classifies `{g > 0}` against a ball `B(c, ρ)` given `g(c)` and a Lipschitz
/// constant `lip` of `g`.
#[inline]
fn classify_open(g: f64, lip: f64, rho: f64, scale: f64) -> Class {
    if rho == 0.0 {
        return if g > 0.0 {
            Class::Inside
        } else {
            Class::Outside
        };
    }
    let tol = 1e-12 * scale;
    if g - lip * rho > tol {
        Class::Inside
    } else if g + lip * rho < -tol {
        Class::Outside
    } else {
        Class::Undecided
    }
}

#[inline]
fn combine(acc: Class, part: Class) -> Class {
    match (acc, part) {
        (Class::Outside, _) | (_, Class::Outside) => Class::Outside,
        (Class::Inside, Class::Inside) => Class::Inside,
        _ => Class::Undecided,
    }
}

impl Shape for RegionQuery {
    fn classify(&self, region: &Region) -> Class {
        let x = self.center.as_slice();
        let r2 = self.radius * self.radius;
        if region.nearest_sq(x) > r2 {
            return Class::Outside;
        }
        let mut class = if region.farthest_sq(x) <= r2 {
            Class::Inside
        } else {
            Class::Undecided
        };
        if self.plane_cone.is_none()
            && self.half_cone_excluded.is_none()
            && self.one_sided_cone.is_none()
        {
            return class;
        }
        let c = region.center();
        let rho = region.bounding_radius();
        let scale = dist(x, &c) + rho;
        if let Some((v, a)) = &self.plane_cone {
            let g = plane_cone_margin(x, v, *a, &c);
            class = combine(class, classify_open(g, 1.0 + a, rho, scale));
        }
        if let Some((t, a)) = &self.half_cone_excluded {
            let g = halfspace_margin(x, t.as_slice(), *a, &c);
            let in_h = classify_open(g, 1.0 + a, rho, scale);
            let part = match in_h {
                Class::Inside => Class::Outside,
                Class::Outside => Class::Inside,
                Class::Undecided => Class::Undecided,
            };
            class = combine(class, part);
        }
        if let Some((z, a)) = &self.one_sided_cone {
            let level = one_sided_level(*a);
            let g = halfspace_margin(x, z.as_slice(), level, &c);
            class = combine(class, classify_open(g, 1.0 + level, rho, scale));
        }
        class
    }
}

/// Half-open axis box `[lo, hi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisBox {
    pub lo: Coords,
    pub hi: Coords,
}

impl AxisBox {
    pub fn new(lo: &[f64], hi: &[f64]) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::arg(
                "box corners must have equal, positive dimension",
            ));
        }
        if lo.iter().zip(hi).any(|(a, b)| !(a <= b)) {
            return Err(Error::arg("box needs lo <= hi in every coordinate"));
        }
        Ok(AxisBox {
            lo: Coords::from_slice(lo),
            hi: Coords::from_slice(hi),
        })
    }
}

impl Shape for AxisBox {
    fn classify(&self, region: &Region) -> Class {
        let half_open = matches!(region, Region::Cube { .. });
        let (a, b) = region.bbox();
        let mut inside = true;
        for i in 0..a.len() {
            // a node whose closure ends exactly at a box face may still put
            // mass on that face unless the node itself is half-open
            let misses = if half_open {
                b[i] <= self.lo[i] || a[i] >= self.hi[i]
            } else {
                b[i] < self.lo[i] || a[i] >= self.hi[i]
            };
            if misses {
                return Class::Outside;
            }
            let fits = a[i] >= self.lo[i]
                && if half_open {
                    b[i] <= self.hi[i]
                } else {
                    b[i] < self.hi[i]
                };
            inside &= fits;
        }
        if inside {
            Class::Inside
        } else {
            Class::Undecided
        }
    }
}

impl MeasureTree {
    pub fn new(gen: impl Generator + 'static) -> Self {
        MeasureTree {
            gen: Arc::new(gen),
            memo: Arc::new(Memo::default()),
        }
    }

    pub fn generator(&self) -> &dyn Generator {
        self.gen.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.gen.dim()
    }

    pub fn kind(&self) -> TreeKind {
        self.gen.kind()
    }

    pub fn name(&self) -> String {
        self.gen.name()
    }

    pub fn root(&self) -> Node {
        self.gen.root()
    }

    pub fn diameter_at(&self, level: usize) -> f64 {
        self.gen.diameter_at(level)
    }

    pub fn max_depth(&self) -> Option<usize> {
        self.gen.max_depth()
    }

    /// Smallest level whose nodes have diameter at most `r`.
    pub fn level_for_radius(&self, r: f64) -> usize {
        let cap = self.gen.max_depth().unwrap_or(2000);
        (0..=cap)
            .find(|&l| self.gen.diameter_at(l) <= r)
            .unwrap_or(cap)
    }

    /// Children of a node, without memoization.
    pub fn expand(&self, node: &Node) -> Vec<Node> {
        self.gen.children(node)
    }

    /// Children of the addressed node, memoized for shallow addresses.
    pub fn children_at(&self, addr: &NodeAddress) -> Result<Arc<Vec<Node>>> {
        if let Some(c) = self.memo.children.read().expect("memo lock").get(&addr.0) {
            return Ok(c.clone());
        }
        let node = self.node(addr)?;
        let kids = Arc::new(self.gen.children(&node));
        if addr.depth() <= MEMO_MAX_DEPTH {
            let mut memo = self.memo.children.write().expect("memo lock");
            if memo.len() < MEMO_MAX_ENTRIES {
                memo.insert(addr.0.clone(), kids.clone());
            }
        }
        Ok(kids)
    }

    /// The node at `addr`.
    pub fn node(&self, addr: &NodeAddress) -> Result<Node> {
        let mut node = self.gen.root();
        for (depth, &i) in addr.0.iter().enumerate() {
            let prefix = NodeAddress(addr.0[..depth].to_vec());
            let kids = if depth <= MEMO_MAX_DEPTH {
                self.children_at_known(&prefix, &node)
            } else {
                Arc::new(self.gen.children(&node))
            };
            node = kids.get(i as usize).cloned().ok_or_else(|| {
                Error::arg(format!(
                    "child index {i} at depth {depth} out of range (fan size {})",
                    kids.len()
                ))
            })?;
        }
        Ok(node)
    }

    fn children_at_known(&self, addr: &NodeAddress, node: &Node) -> Arc<Vec<Node>> {
        if let Some(c) = self.memo.children.read().expect("memo lock").get(&addr.0) {
            return c.clone();
        }
        let kids = Arc::new(self.gen.children(node));
        let mut memo = self.memo.children.write().expect("memo lock");
        if memo.len() < MEMO_MAX_ENTRIES {
            memo.insert(addr.0.clone(), kids.clone());
        }
        kids
    }

    /// `μ(node)`: the product of conditional weights along the path.
    pub fn node_measure(&self, addr: &NodeAddress) -> Result<f64> {
        Ok(self.node(addr)?.mass)
    }

    /// Siblings of the addressed node (the children of its parent) with absolute masses.
    pub fn branch_fan(&self, addr: &NodeAddress) -> Result<Vec<(Region, f64)>> {
        let parent = addr
            .parent()
            .ok_or_else(|| Error::arg("the root has no sibling fan"))?;
        let kids = self.children_at(&parent)?;
        let last = *addr.0.last().expect("non-root") as usize;
        if last >= kids.len() {
            return Err(Error::arg(format!(
                "child index {last} out of range (fan size {})",
                kids.len()
            )));
        }
        Ok(kids.iter().map(|n| (n.region.clone(), n.mass)).collect())
    }

    /// Certified bounds for `μ(query)`, expanding nodes down to absolute level
    /// `depth_budget`.
    pub fn region_measure(
        &self,
        query: &RegionQuery,
        depth_budget: usize,
    ) -> Result<MeasureInterval> {
        query.validate(self.dim())?;
        Ok(self.shape_measure(query, depth_budget))
    }

    /// Certified bounds for `μ([lo, hi))`.
    pub fn box_measure(&self, b: &AxisBox, depth_budget: usize) -> Result<MeasureInterval> {
        if b.lo.len() != self.dim() {
            return Err(Error::arg("box dimension does not match the tree"));
        }
        Ok(self.shape_measure(b, depth_budget))
    }

    /// Certified bounds for the measure of an arbitrary [`Shape`].
    pub fn shape_measure<S: Shape + ?Sized>(
        &self,
        shape: &S,
        depth_budget: usize,
    ) -> MeasureInterval {
        let mut acc = Acc::default();
        let root = self.gen.root();
        self.visit(shape, &root, depth_budget, &mut acc);
        let hi = (acc.lo + acc.undecided).min(1.0);
        MeasureInterval {
            lo: acc.lo.min(hi),
            hi,
            depth_used: acc.depth,
        }
    }

    fn visit<S: Shape + ?Sized>(&self, shape: &S, node: &Node, budget: usize, acc: &mut Acc) {
        if node.mass <= 0.0 {
            return;
        }
        acc.depth = acc.depth.max(node.level);
        match shape.classify(&node.region) {
            Class::Inside => acc.lo += node.mass,
            Class::Outside => {}
            Class::Undecided => {
                if node.level >= budget {
                    acc.undecided += node.mass;
                    return;
                }
                let kids = self.gen.children(node);
                if kids.is_empty() {
                    acc.undecided += node.mass;
                    return;
                }
                for k in &kids {
                    self.visit(shape, k, budget, acc);
                }
            }
        }
    }

    /// Descends `depth` levels choosing children by their weights.
    pub fn sample_node<R: Rng + ?Sized>(&self, depth: usize, rng: &mut R) -> (NodeAddress, Node) {
        let mut node = self.gen.root();
        let mut path = Vec::with_capacity(depth);
        for _ in 0..depth {
            let kids = self.gen.children(&node);
            if kids.is_empty() {
                break;
            }
            let u: f64 = rng.random();
            let mut cum = 0.0;
            let mut pick = kids.len() - 1;
            for (i, k) in kids.iter().enumerate() {
                cum += k.weight;
                if u < cum {
                    pick = i;
                    break;
                }
            }
            // never step into a zero-weight child because of rounding in `cum`
            while kids[pick].weight <= 0.0 && pick > 0 {
                pick -= 1;
            }
            path.push(pick as u32);
            node = kids.into_iter().nth(pick).expect("index in range");
        }
        (NodeAddress(path), node)
    }

    /// `count` μ-distributed points (centers of sampled depth-`depth` nodes).
    pub fn sample_points(&self, count: usize, depth: usize, seed: u64) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| Point::from_coords(self.sample_node(depth, &mut rng).1.region.center()))
            .collect()
    }

    /// Address of the level-`level` node whose region contains `p` (first match).
    pub fn locate(&self, p: &Point, level: usize) -> Result<(NodeAddress, Node)> {
        let mut node = self.gen.root();
        if !node.region.contains(p.as_slice()) {
            return Err(Error::arg("point lies outside the root region"));
        }
        let mut path = Vec::with_capacity(level);
        for _ in 0..level {
            let kids = self.gen.children(&node);
            let (i, k) = kids
                .into_iter()
                .enumerate()
                .find(|(_, k)| k.region.contains(p.as_slice()))
                .ok_or_else(|| Error::arg("point is not covered by any child region"))?;
            path.push(i as u32);
            node = k;
        }
        Ok((NodeAddress(path), node))
    }
}

#[derive(Default)]
struct Acc {
    lo: f64,
    undecided: f64,
    depth: usize,
}
