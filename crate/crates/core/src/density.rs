//! Conical density ratios with certified bounds, scale profiles, the
//! two-sided one-sided-cone explorer, the ball-collection checker and the
//! chain of constants that makes the lower density bounds explicit.
//!
//! Infima over all directions and planes are replaced by minima over nets
//! built with the half-opening trick: every `H(x, θ, α)` sits inside a net
//! cone `H(x, θ_i, α/2)` and every `X(x, V, α)` contains a net cone
//! `X(x, V_j, α/2)`, so net minima at `α/2` bound the true infima from below.

use std::collections::HashSet;
use std::f64::consts::PI;

use rayon::prelude::*;

use crate::configurations::compute_t;
use crate::geometry::{
    build_direction_net, build_subspace_net, check_alpha, dist, dot, DirectionNet, Point, Subspace,
    SubspaceNet, UnitVector,
};
use crate::measure::{MeasureInterval, MeasureTree, RegionQuery};
use crate::{Error, Result};

fn ball_measure(tree: &MeasureTree, x: &Point, r: f64, depth: usize) -> Result<MeasureInterval> {
    tree.region_measure(
        &RegionQuery::ball(x.clone(), r),
        tree.level_for_radius(r) + depth,
    )
}

/// Interval-wise minimum.
fn imin(a: MeasureInterval, b: MeasureInterval) -> MeasureInterval {
    MeasureInterval {
        lo: a.lo.min(b.lo),
        hi: a.hi.min(b.hi),
        depth_used: a.depth_used.max(b.depth_used),
    }
}

fn min_over(items: impl Iterator<Item = MeasureInterval>) -> MeasureInterval {
    items.reduce(imin).expect("nets are never empty")
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::arg(format!("radius {r} must be positive")))
    }
}

/// `μ(X(x, r, V, α) ∖ H(x, θ, α)) / μ(B(x, r))` with certified bounds.
///
/// `depth` is relative: nodes are refined down to `depth` levels below the
/// first level whose diameter is at most `r`.
pub fn conical_ratio(
    tree: &MeasureTree,
    x: &Point,
    r: f64,
    v: &Subspace,
    theta: &UnitVector,
    alpha: f64,
    depth: usize,
) -> Result<MeasureInterval> {
    cone_pair_ratio(tree, x, r, (v, alpha), (theta, alpha), depth)
}

fn cone_pair_ratio(
    tree: &MeasureTree,
    x: &Point,
    r: f64,
    (v, a_plane): (&Subspace, f64),
    (theta, a_half): (&UnitVector, f64),
    depth: usize,
) -> Result<MeasureInterval> {
    check_radius(r)?;
    check_alpha(a_plane)?;
    check_alpha(a_half)?;
    let q = RegionQuery::ball(x.clone(), r)
        .with_plane_cone(v.clone(), a_plane)
        .without_half_cone(theta.clone(), a_half);
    let budget = tree.level_for_radius(r) + depth;
    let num = tree.region_measure(&q, budget)?;
    let den = ball_measure(tree, x, r, depth)?;
    num.ratio(&den)
}

fn halfspace_ratio(
    tree: &MeasureTree,
    x: &Point,
    r: f64,
    theta: &UnitVector,
    a: f64,
    den: &MeasureInterval,
    depth: usize,
) -> Result<MeasureInterval> {
    let q = RegionQuery::ball(x.clone(), r).without_half_cone(theta.clone(), a);
    tree.region_measure(&q, tree.level_for_radius(r) + depth)?
        .ratio(den)
}

/// Both sides of the net reduction for `inf_θ μ(B(x, r) ∖ H(x, θ, α)) / μ(B(x, r))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfspaceDeficiency {
    /// Net minimum at opening `α/2`; its `lo` bounds the true infimum from below.
    pub certified: MeasureInterval,
    /// Net minimum at opening `α`; its `hi` bounds the true infimum from above.
    pub estimate: MeasureInterval,
}

impl HalfspaceDeficiency {
    /// `[certified.lo, estimate.hi]`, which contains the true infimum.
    pub fn bracket(&self) -> (f64, f64) {
        (self.certified.lo, self.estimate.hi)
    }
}

pub fn halfspace_deficiency(
    tree: &MeasureTree,
    x: &Point,
    r: f64,
    alpha: f64,
    dir_net: &DirectionNet,
    depth: usize,
) -> Result<HalfspaceDeficiency> {
    check_radius(r)?;
    check_alpha(alpha)?;
    check_net_alpha(dir_net.alpha, alpha)?;
    if dir_net.dim() != tree.dim() {
        return Err(Error::arg(
            "direction net dimension does not match the tree",
        ));
    }
    let den = ball_measure(tree, x, r, depth)?;
    if den.hi <= 0.0 {
        return Err(Error::UndefinedRatio);
    }
    let eval = |a: f64| -> Result<MeasureInterval> {
        let all = dir_net
            .directions
            .par_iter()
            .map(|th| halfspace_ratio(tree, x, r, th, a, &den, depth))
            .collect::<Result<Vec<_>>>()?;
        Ok(min_over(all.into_iter()))
    };
    Ok(HalfspaceDeficiency {
        certified: eval(alpha / 2.0)?,
        estimate: eval(alpha)?,
    })
}

fn check_net_alpha(net_alpha: f64, alpha: f64) -> Result<()> {
    if (net_alpha - alpha).abs() > 1e-12 {
        return Err(Error::arg(format!(
            "net built for alpha = {net_alpha}, queried at {alpha}"
        )));
    }
    Ok(())
}

/// Minimum over net pairs `(V_j, θ_i)` of the ratio of
/// `X(x, r, V_j, α/2) ∖ H(x, θ_i, α/2)`; `lo` bounds the infimum over all
/// `(V, θ)` of the `α`-ratio from below.
pub fn worst_cone_ratio(
    tree: &MeasureTree,
    x: &Point,
    r: f64,
    alpha: f64,
    dir_net: &DirectionNet,
    sub_net: &SubspaceNet,
    depth: usize,
) -> Result<MeasureInterval> {
    check_radius(r)?;
    check_alpha(alpha)?;
    check_net_alpha(dir_net.alpha, alpha)?;
    check_net_alpha(sub_net.alpha, alpha)?;
    if dir_net.dim() != tree.dim() || sub_net.n != tree.dim() {
        return Err(Error::arg("net dimension does not match the tree"));
    }
    let den = ball_measure(tree, x, r, depth)?;
    if den.hi <= 0.0 {
        return Err(Error::UndefinedRatio);
    }
    let budget = tree.level_for_radius(r) + depth;
    let pairs: Vec<(&Subspace, &UnitVector)> = sub_net
        .planes
        .iter()
        .flat_map(|v| dir_net.directions.iter().map(move |th| (v, th)))
        .collect();
    let all = pairs
        .par_iter()
        .map(|(v, th)| {
            let q = RegionQuery::ball(x.clone(), r)
                .with_plane_cone((*v).clone(), alpha / 2.0)
                .without_half_cone((*th).clone(), alpha / 2.0);
            tree.region_measure(&q, budget)?.ratio(&den)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(min_over(all.into_iter()))
}

/// Worst-cone ratios along the radii `r_j = r₀ 2^{-j}`, `j = 1 … levels`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    pub x: Point,
    pub alpha: f64,
    pub radii: Vec<f64>,
    pub ratios: Vec<MeasureInterval>,
    /// `running_sup[l-1] = max_{j ≤ l} ratios[j-1].lo`.
    pub running_sup: Vec<f64>,
    pub c: f64,
    /// `freq[l-1] = #{j ≤ l : ratios[j-1].lo > c} / l`.
    pub freq: Vec<f64>,
}

impl DensityProfile {
    /// `#{j ≤ l : lo_j > c} / l` for any threshold.
    pub fn frequency(&self, c: f64, l: usize) -> f64 {
        let l = l.min(self.ratios.len());
        if l == 0 {
            return 0.0;
        }
        self.ratios[..l].iter().filter(|m| m.lo > c).count() as f64 / l as f64
    }
}

#[allow(clippy::too_many_arguments)]
pub fn density_profile(
    tree: &MeasureTree,
    x: &Point,
    alpha: f64,
    r0: f64,
    levels: usize,
    dir_net: &DirectionNet,
    sub_net: &SubspaceNet,
    c: f64,
    depth: usize,
) -> Result<DensityProfile> {
    if levels == 0 {
        return Err(Error::arg("need at least one level"));
    }
    check_radius(r0)?;
    let radii: Vec<f64> = (1..=levels).map(|j| r0 * 0.5f64.powi(j as i32)).collect();
    let ratios = radii
        .par_iter()
        .map(|&r| worst_cone_ratio(tree, x, r, alpha, dir_net, sub_net, depth))
        .collect::<Result<Vec<_>>>()?;
    let mut running_sup = Vec::with_capacity(levels);
    let mut freq = Vec::with_capacity(levels);
    let (mut sup, mut hits) = (f64::NEG_INFINITY, 0usize);
    for (l, m) in ratios.iter().enumerate() {
        sup = sup.max(m.lo);
        hits += (m.lo > c) as usize;
        running_sup.push(sup);
        freq.push(hits as f64 / (l + 1) as f64);
    }
    Ok(DensityProfile {
        x: x.clone(),
        alpha,
        radii,
        ratios,
        running_sup,
        c,
        freq,
    })
}

/// Over the given directions `ζ` in `V`, maximizes
/// `min(μ(X⁺(x, r, ζ, α)), μ(X⁺(x, r, -ζ, α))) / μ(B(x, r))`.
///
/// Returns the best direction (largest lower bound, ties by upper bound, then
/// by list order) with its interval.
pub fn two_sided_min_ratio(
    tree: &MeasureTree,
    x: &Point,
    r: f64,
    v: &Subspace,
    alpha: f64,
    dirs_in_v: &[UnitVector],
    depth: usize,
) -> Result<(UnitVector, MeasureInterval)> {
    check_radius(r)?;
    check_alpha(alpha)?;
    if dirs_in_v.is_empty() {
        return Err(Error::arg("empty direction list"));
    }
    if let Some(z) = dirs_in_v
        .iter()
        .find(|z| z.dim() != v.ambient() || !v.contains_vector(z.as_slice(), 1e-10))
    {
        return Err(Error::arg(format!(
            "direction {:?} does not lie in V",
            z.as_slice()
        )));
    }
    let den = ball_measure(tree, x, r, depth)?;
    if den.hi <= 0.0 {
        return Err(Error::UndefinedRatio);
    }
    let budget = tree.level_for_radius(r) + depth;
    let side = |z: UnitVector| -> Result<MeasureInterval> {
        let q = RegionQuery::ball(x.clone(), r).with_one_sided_cone(z, alpha);
        tree.region_measure(&q, budget)?.ratio(&den)
    };
    let vals = dirs_in_v
        .par_iter()
        .map(|z| Ok(imin(side(z.clone())?, side(z.neg())?)))
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, m) in vals.iter().enumerate() {
        let b = &vals[best];
        if m.lo > b.lo || (m.lo == b.lo && m.hi > b.hi) {
            best = i;
        }
    }
    Ok((dirs_in_v[best].clone(), vals[best]))
}

/// Volume of the unit ball in `ℝⁿ`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// The explicit constants behind the lower conical density bounds, with every
/// defining inequality re-checked.
///
/// `c₂` and `c = c₁c₂` underflow `f64` for all but trivial inputs, so they are
/// carried as natural logarithms (`c` itself is `exp(ln_c)`, often 0).
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ConstantsReport {
    pub n: usize,
    pub m: usize,
    pub s: f64,
    pub alpha: f64,
    /// Separation constant at `α/2`.
    pub t: f64,
    /// Cone-triple count for `n - m` points at opening `α/(2t)`.
    pub q: u64,
    /// False when `q` was supplied rather than established.
    pub q_verified: bool,
    pub k_dir: usize,
    pub k_sub: usize,
    pub big_m: f64,
    pub tau: f64,
    pub k: f64,
    pub eta: f64,
    pub c1: f64,
    pub p: f64,
    pub ln_c2: f64,
    pub ln_c: f64,
    pub c: f64,
    /// `(9 · 3^{2n} · K_dir)^{-1}`.
    pub c_thm3: f64,
    pub checks: Vec<(String, bool)>,
}

impl ConstantsReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.1)
    }

    /// `v > c`, decided in log space.
    pub fn exceeds_c(&self, v: f64) -> bool {
        v > 0.0 && v.ln() > self.ln_c
    }
}

/// `A η ln(1/(ηB)) - (1 - Aη) ln(1 - Aη)`: the entropy expression of the
/// large-child lemma, shifted by `ln B` so that the constraint reads
/// `< s ln k - ln B`. Here `A = kⁿ - M k^m` and `B = M k^m`.
fn entropy_excess(ln_a: f64, ln_b: f64, ln_eta: f64) -> f64 {
    let a_eta = (ln_a + ln_eta).exp();
    a_eta * (-ln_eta - ln_b) - (1.0 - a_eta) * (-a_eta).ln_1p()
}

/// The constants for the lower bound on `X(x, r, V, α) ∖ H(x, θ, α)` for
/// measures of dimension at least `s > m` in `ℝⁿ`.
///
/// `q` is only known for `n - m = 1` (any three points on a line contain a cone
/// triple). Otherwise pass it through [`constants_chain_with_q`].
pub fn constants_chain(n: usize, m: usize, s: f64, alpha: f64) -> Result<ConstantsReport> {
    constants_chain_with_q(n, m, s, alpha, None)
}

pub fn constants_chain_with_q(
    n: usize,
    m: usize,
    s: f64,
    alpha: f64,
    q: Option<u64>,
) -> Result<ConstantsReport> {
    check_alpha(alpha)?;
    if n == 0 || m >= n {
        return Err(Error::domain(format!(
            "need 0 <= m < n, got n = {n}, m = {m}"
        )));
    }
    if !(s > m as f64 && s <= n as f64) {
        return Err(Error::domain(format!(
            "need m < s <= n, got s = {s}, m = {m}"
        )));
    }
    let (q, q_verified) = match (q, n - m) {
        (Some(q), d) => (q, d == 1 && q >= 3),
        (None, 1) => (3, true),
        (None, d) => {
            return Err(Error::arg(format!(
                "no established cone-triple count for dimension {d}; supply q"
            )))
        }
    };
    if q < 3 {
        return Err(Error::arg("q must be at least 3"));
    }
    let (nf, mf) = (n as f64, m as f64);
    let sep = compute_t(alpha / 2.0)?;
    let t = sep.t;
    let k_dir = build_direction_net(n, alpha)?.len();
    let k_sub = build_subspace_net(n, m, alpha)?.len();
    let m_lower = unit_ball_volume(n)
        * (4.0 * t + 2.0).powi(n as i32)
        * nf.powf(nf / 2.0)
        * 8f64.powi(m as i32)
        * k_sub as f64
        * q as f64;
    let big_m = m_lower.ceil();
    let tau = 6.0 * nf.sqrt();
    // k must exceed x = M^{1/(s-m)}; the 1e-15 pad covers the rounding of powf.
    // Beyond 2^52 every f64 is an integer and the next float up is used.
    let x = big_m.powf(1.0 / (s - mf)).max(3.0);
    let x_pad = x * (1.0 + 1e-15);
    let k = if x_pad < 2f64.powi(52) {
        x_pad.floor() + 1.0
    } else {
        x_pad.next_up()
    };
    if !(k.powf(nf) < 1e300) {
        return Err(Error::Domain("k^n overflows f64".into()));
    }
    let ln_k = k.ln();
    let ln_b = big_m.ln() + mf * ln_k;
    let ln_a = (k.powf(nf) - big_m * k.powf(mf)).ln();
    // s ln k - ln B = (s - m) ln(k / M^{1/(s-m)}), kept accurate when k ≈ x
    let gap = (s - mf) * ((k - x) / x).ln_1p();
    let dil = (3.0 * nf.sqrt() * tau + 2.0).powf(nf);

    // largest ln η with η < k^{-n} and entropy_excess < gap, by bisection
    let ok = |ln_eta: f64| ln_eta < -nf * ln_k && entropy_excess(ln_a, ln_b, ln_eta) < gap;
    let mut hi = -nf * ln_k;
    let mut lo = hi - 1.0;
    while !ok(lo) {
        lo = hi - 2.0 * (hi - lo);
        if lo < -700.0 {
            return Err(Error::Domain(
                "no representable eta satisfies the entropy constraint".into(),
            ));
        }
    }
    for _ in 0..200 {
        let mid = (lo + hi) / 2.0;
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let eta = 0.99 * lo.exp();
    let c1 = eta / (3.0 * dil);
    let p = c1 * dil;
    // k^{-2n/(1-(1-p/2))} = k^{-4n/p}
    let ln_c2 = -4.0 * nf * ln_k / p;
    let ln_c = c1.ln() + ln_c2;
    let c_thm3 = 1.0 / (9.0 * 3f64.powi(2 * n as i32) * k_dir as f64);

    let checks = vec![
        (
            "t: sqrt(1-(a/t)^2) >= 1-eps".to_string(),
            sep.inequalities()[0],
        ),
        ("t: (1-eps)t - 1 > 0".to_string(), sep.inequalities()[1]),
        (
            "t: (1-eps)/(1+1/t) - 1/(t+1) > sqrt(1-a^2)".to_string(),
            sep.inequalities()[2],
        ),
        ("t >= 1".to_string(), t >= 1.0),
        (
            "M >= vol(n)(4t+2)^n n^(n/2) 8^m K q".to_string(),
            big_m >= m_lower,
        ),
        (
            "k > max(M^(1/(s-m)), 3)".to_string(),
            k > x && k > 3.0 && k.fract() == 0.0,
        ),
        ("0 < eta = 3 c1 (3 sqrt(n) tau + 2)^n < k^-n".to_string(), {
            let e = 3.0 * c1 * dil;
            e > 0.0 && e.ln() < -nf * ln_k
        }),
        (
            "entropy bound < s (as excess over ln B / ln k)".to_string(),
            entropy_excess(ln_a, ln_b, eta.ln()) < gap,
        ),
        (
            "0 < p = c1 (3 sqrt(n) tau + 2)^n < 1".to_string(),
            p > 0.0 && p < 1.0,
        ),
        (
            "ln c2 = -2n ln k / (1 - (1 - p/2))".to_string(),
            ln_c2 < 0.0 && ln_c2.is_finite(),
        ),
        ("c = c1 c2 > 0 (log form)".to_string(), ln_c.is_finite()),
        (
            "c_thm3 = 1/(9 3^(2n) K_dir)".to_string(),
            (c_thm3 * 9.0 * 3f64.powi(2 * n as i32) * k_dir as f64 - 1.0).abs() < 1e-12,
        ),
    ];
    Ok(ConstantsReport {
        n,
        m,
        s,
        alpha,
        t,
        q,
        q_verified,
        k_dir,
        k_sub,
        big_m,
        tau,
        k,
        eta,
        c1,
        p,
        ln_c2,
        ln_c,
        c: ln_c.exp(),
        c_thm3,
        checks,
    })
}

/// Projection-pigeonhole evidence for one net plane.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PlaneEvidence {
    pub plane: usize,
    /// Occupied cells of side `2ρ/√m` in `V^⊥` after projecting the centers.
    pub cells: usize,
    /// `⌈#B / K⌉`; the plane passes when this exceeds `(q - 1) · cells`.
    pub subcollection: usize,
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BallCollectionReport {
    pub balls: Vec<(Point, f64)>,
    /// Every ball lies in `B(x, r)`.
    pub inside: bool,
    /// The dilates `2tB` are pairwise disjoint.
    pub disjoint: bool,
    pub first_overlap: Option<(usize, usize)>,
    /// `μ(B).lo > c · μ(B(x, 3r)).hi` for every ball.
    pub heavy: bool,
    pub light_balls: Vec<usize>,
    /// The pigeonhole count forces `q` hits by a translate of every net plane
    /// for every sub-collection of size at least `#B / K`.
    pub transversal: bool,
    pub evidence: Vec<PlaneEvidence>,
}

impl BallCollectionReport {
    pub fn all_pass(&self) -> bool {
        self.inside && self.disjoint && self.heavy && self.transversal
    }
}

/// Checks a candidate ball collection in `B(x, r)` against the three
/// conditions that force a large conical density at `x`.
///
/// Disjointness is exact (closed dilates, center distances). Masses use
/// certified bounds at `depth` levels below each ball's scale and compare in
/// log space against `c`. Transversality is verified only through the
/// projection-pigeonhole sufficient condition, and only for the planes of
/// `sub_net`.
pub fn check_ball_collection(
    tree: &MeasureTree,
    x: &Point,
    r: f64,
    report: &ConstantsReport,
    balls: &[(Point, f64)],
    sub_net: &SubspaceNet,
    depth: usize,
) -> Result<BallCollectionReport> {
    check_radius(r)?;
    if balls.is_empty() {
        return Err(Error::arg("empty ball collection"));
    }
    if balls
        .iter()
        .any(|(c, rho)| c.dim() != tree.dim() || !(*rho > 0.0))
    {
        return Err(Error::arg(
            "balls need the tree's dimension and positive radii",
        ));
    }
    if sub_net.n != tree.dim() || sub_net.m != report.m {
        return Err(Error::arg("subspace net does not match the report"));
    }
    let inside = balls
        .iter()
        .all(|(c, rho)| dist(c.as_slice(), x.as_slice()) + rho <= r);

    let t2 = 2.0 * report.t;
    let first_overlap = (0..balls.len()).into_par_iter().find_map_first(|i| {
        (i + 1..balls.len())
            .find(|&j| {
                dist(balls[i].0.as_slice(), balls[j].0.as_slice()) <= t2 * (balls[i].1 + balls[j].1)
            })
            .map(|j| (i, j))
    });

    let big = ball_measure(tree, x, 3.0 * r, depth)?;
    let threshold_ln = report.ln_c + big.hi.ln();
    let light_balls = balls
        .par_iter()
        .enumerate()
        .map(|(i, (c, rho))| {
            let m = ball_measure(tree, c, *rho, depth)?;
            Ok((m.lo <= 0.0 || m.lo.ln() <= threshold_ln).then_some(i))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect::<Vec<_>>();

    let rho_min = balls.iter().map(|b| b.1).fold(f64::INFINITY, f64::min);
    let subcollection = balls.len().div_ceil(report.k_sub);
    let evidence: Vec<PlaneEvidence> = sub_net
        .planes
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let basis = v.complement_basis();
            let cells = if basis.is_empty() {
                1
            } else {
                let side = 2.0 * rho_min / (basis.len() as f64).sqrt();
                balls
                    .iter()
                    .map(|(c, _)| {
                        basis
                            .iter()
                            .map(|e| (dot(c.as_slice(), e) / side).floor() as i64)
                            .collect::<Vec<_>>()
                    })
                    .collect::<HashSet<_>>()
                    .len()
            };
            PlaneEvidence {
                plane: j,
                cells,
                subcollection,
                passes: subcollection as u64 > (report.q - 1) * cells as u64,
            }
        })
        .collect();

    Ok(BallCollectionReport {
        balls: balls.to_vec(),
        inside,
        disjoint: first_overlap.is_none(),
        first_overlap,
        heavy: light_balls.is_empty(),
        light_balls,
        transversal: evidence.iter().all(|e| e.passes),
        evidence,
    })
}
