//! Point configurations behind the ball-collection argument: cone triples in
//! finite point sets and the separation constant that upgrades them from
//! points to balls.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::geometry::{
    build_direction_net_with, check_alpha, dist, halfspace_margin, norm, one_sided_level, Coords,
    NetOptions, Point, UnitVector,
};
use crate::{Error, Result};

/// Three points with `x₁ ∈ X⁺(x₀, θ, α)` and `x₂ ∈ X⁺(x₀, -θ, α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeTriple {
    /// Indices of `x₀, x₁, x₂` in the searched set.
    pub indices: [usize; 3],
    pub theta: UnitVector,
    /// The witness came from the fallback direction net rather than the
    /// bisector of the two unit vectors.
    pub from_net: bool,
}

impl ConeTriple {
    /// Re-checks the cone memberships with the strict predicates.
    pub fn verify(&self, points: &[Point], alpha: f64) -> bool {
        let [i0, i1, i2] = self.indices;
        let level = one_sided_level(alpha);
        let x0 = &points[i0].coords;
        halfspace_margin(x0, &self.theta.coords, level, &points[i1].coords) > 0.0
            && halfspace_margin(x0, &self.theta.neg().coords, level, &points[i2].coords) > 0.0
    }
}

fn unit_from(x0: &[f64], x: &[f64]) -> Option<Coords> {
    let d: Coords = x.iter().zip(x0).map(|(a, b)| a - b).collect();
    let n = norm(&d);
    (n > 0.0).then(|| d.iter().map(|c| c / n).collect())
}

/// Searches every vertex `x₀` and unordered pair `{x₁, x₂}` for a cone
/// triple.
///
/// For fixed `x₀` the best direction is the bisector `θ ∝ u₁ - u₂` of the
/// unit vectors `u_i = (x_i - x₀)/|x_i - x₀|`: it attains
/// `max_θ min(u₁·θ, -u₂·θ) = |u₁ - u₂|/2`. A direction net is tried as well,
/// so that a rounding miss of the bisector near the boundary can still be
/// caught.
pub fn find_cone_triple(points: &[Point], alpha: f64) -> Result<Option<ConeTriple>> {
    if points.len() < 3 {
        return Err(Error::arg("need at least three points"));
    }
    check_alpha(alpha)?;
    let n = points[0].dim();
    if points.iter().any(|p| p.dim() != n) {
        return Err(Error::arg("points of mixed dimension"));
    }
    let level = one_sided_level(alpha);
    let mut net: Option<Vec<UnitVector>> = None;
    for i0 in 0..points.len() {
        let x0 = &points[i0].coords;
        let units: Vec<Option<Coords>> = points.iter().map(|p| unit_from(x0, &p.coords)).collect();
        for (i1, u1) in units.iter().enumerate() {
            let Some(u1) = u1 else { continue };
            for (i2, u2) in units.iter().enumerate() {
                if i2 == i1 {
                    continue;
                }
                let Some(u2) = u2 else { continue };
                let d: Vec<f64> = u1.iter().zip(u2.iter()).map(|(a, b)| a - b).collect();
                // half the chord is the best achievable cosine; skip hopeless pairs early
                if norm(&d) / 2.0 <= level - 1e-9 {
                    continue;
                }
                let triple = |theta: UnitVector, from_net| ConeTriple {
                    indices: [i0, i1, i2],
                    theta,
                    from_net,
                };
                if let Ok(theta) = UnitVector::normalize(d) {
                    let t = triple(theta, false);
                    if t.verify(points, alpha) {
                        return Ok(Some(t));
                    }
                }
                let dirs = net.get_or_insert_with(|| fallback_net(n));
                for theta in dirs.iter() {
                    let t = triple(theta.clone(), true);
                    if t.verify(points, alpha) {
                        return Ok(Some(t));
                    }
                }
            }
        }
    }
    Ok(None)
}

fn fallback_net(n: usize) -> Vec<UnitVector> {
    let opts = NetOptions {
        streak: 2_000,
        ..NetOptions::default()
    };
    build_direction_net_with(n, 0.05, &opts)
        .expect("valid net parameters")
        .directions
}

/// Looks for `size` points in `ℝⁿ` without a cone triple at opening `α`.
/// A hit certifies `q(n, α) > size`.
///
/// Odd trials draw uniform points in the unit cube; even trials draw points
/// on a circle in the first two coordinates (with a small random tilt into the
/// others), where all vertex angles stay away from `π`.
pub fn search_counterexample_set(
    n: usize,
    alpha: f64,
    size: usize,
    trials: usize,
    seed: u64,
) -> Result<Option<Vec<Point>>> {
    if size < 3 || n == 0 {
        return Err(Error::arg("need size >= 3 and n >= 1"));
    }
    check_alpha(alpha)?;
    let hit = (0..trials as u64).into_par_iter().find_map_first(|trial| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let pts: Vec<Point> = (0..size)
            .map(|_| {
                let coords: Vec<f64> = if trial % 2 == 0 && n >= 2 {
                    let phi = rng.random_range(0.0..std::f64::consts::TAU);
                    let mut c = vec![phi.cos(), phi.sin()];
                    c.extend((2..n).map(|_| rng.random_range(-0.01..0.01)));
                    c
                } else {
                    (0..n).map(|_| rng.random::<f64>()).collect()
                };
                Point::new(coords).expect("finite coordinates")
            })
            .collect();
        match find_cone_triple(&pts, alpha) {
            Ok(None) => Some(pts),
            _ => None,
        }
    });
    Ok(hit)
}

/// The constant `t(α)` for which `t`-separated balls inherit cone membership
/// from their centers, with `ε = (1 - sqrt(1 - α²))/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationConstant {
    pub alpha: f64,
    pub epsilon: f64,
    pub t: f64,
}

impl SeparationConstant {
    /// The three defining inequalities evaluated at `t`:
    /// `sqrt(1 - (α/t)²) ≥ 1 - ε`, `(1 - ε)t - 1 > 0` and
    /// `(1 - ε)/(1 + 1/t) - 1/(t + 1) > sqrt(1 - α²)`.
    pub fn inequalities(&self) -> [bool; 3] {
        let (a, e, t) = (self.alpha, self.epsilon, self.t);
        [
            (1.0 - (a / t).powi(2)).sqrt() >= 1.0 - e,
            (1.0 - e) * t - 1.0 > 0.0,
            (1.0 - e) / (1.0 + 1.0 / t) - 1.0 / (t + 1.0) > one_sided_level(a),
        ]
    }

    pub fn holds(&self) -> bool {
        self.t >= 1.0 && self.inequalities().iter().all(|b| *b)
    }
}

/// Smallest `t` (plus `10⁻⁶`) meeting the three inequalities. Each one is a
/// lower bound on `t`: `t ≥ α / sqrt(1 - (1 - ε)²)`, `t > 1/(1 - ε)` and,
/// after clearing denominators, `t > 2(1 + β₀)/(1 - β₀)` with `β₀ = sqrt(1 - α²)`.
pub fn compute_t(alpha: f64) -> Result<SeparationConstant> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain(format!(
            "alpha = {alpha} must lie in (0, 1]; at alpha = 0 no finite t exists"
        )));
    }
    let b0 = one_sided_level(alpha);
    let epsilon = (1.0 - b0) / 2.0;
    let bounds = [
        2.0 * (1.0 + b0) / (1.0 - b0),
        1.0 / (1.0 - epsilon),
        alpha / (1.0 - (1.0 - epsilon).powi(2)).sqrt(),
        1.0,
    ];
    let t = bounds.iter().cloned().fold(0.0, f64::max) + 1e-6;
    let sc = SeparationConstant { alpha, epsilon, t };
    if !sc.holds() {
        return Err(Error::Domain(format!(
            "alpha = {alpha} is too small for a stable t"
        )));
    }
    Ok(sc)
}

/// Monte Carlo check that `B(y₀, r_y) ⊂ X⁺(x, θ, α)` for every `x ∈ B(x₀, r_x)`:
/// draws `samples` pairs `(x, y)` uniformly from the two balls and returns true
/// iff none violates the inclusion.
///
/// The hypotheses are checked first: the closed balls `B(x₀, t r_x)` and
/// `B(y₀, t r_y)` must be disjoint and `y₀ ∈ X⁺(x₀, θ, α/t)`.
#[allow(clippy::too_many_arguments)]
pub fn check_separated_inclusion(
    x0: &Point,
    r_x: f64,
    y0: &Point,
    r_y: f64,
    theta: &UnitVector,
    alpha: f64,
    t: f64,
    samples: usize,
    seed: u64,
) -> Result<bool> {
    check_alpha(alpha)?;
    let n = x0.dim();
    if y0.dim() != n || theta.dim() != n {
        return Err(Error::arg("dimension mismatch"));
    }
    if !(r_x > 0.0 && r_y > 0.0 && t >= 1.0) {
        return Err(Error::arg("need positive radii and t >= 1"));
    }
    let d0 = dist(&x0.coords, &y0.coords);
    if d0 <= t * (r_x + r_y) {
        return Err(Error::Precondition(format!(
            "dilated balls B(x0, t r_x) and B(y0, t r_y) intersect: |x0 - y0| = {d0} <= t (r_x + r_y) = {}",
            t * (r_x + r_y)
        )));
    }
    if halfspace_margin(
        &x0.coords,
        &theta.coords,
        one_sided_level(alpha / t),
        &y0.coords,
    ) <= 0.0
    {
        return Err(Error::Precondition(
            "y0 is not in the narrow cone X+(x0, theta, alpha/t)".into(),
        ));
    }
    let level = one_sided_level(alpha);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let x = x0.random_in_ball(r_x, &mut rng);
        let y = y0.random_in_ball(r_y, &mut rng);
        if halfspace_margin(&x.coords, &theta.coords, level, &y.coords) <= 0.0 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::dot;

    fn vertex_cosine(x: &[f64], a: &[f64], b: &[f64]) -> f64 {
        let u: Vec<f64> = a.iter().zip(x).map(|(p, q)| p - q).collect();
        let v: Vec<f64> = b.iter().zip(x).map(|(p, q)| p - q).collect();
        dot(&u, &v) / (norm(&u) * norm(&v))
    }

    fn pts(v: &[&[f64]]) -> Vec<Point> {
        v.iter().map(|c| Point::new(c.to_vec()).unwrap()).collect()
    }

    #[test]
    fn line_always_has_a_triple() {
        let p = pts(&[&[0.0], &[5.0], &[1.0]]);
        let t = find_cone_triple(&p, 0.01).unwrap().unwrap();
        assert_eq!(t.indices[0], 2);
        assert!(t.verify(&p, 0.01));
    }

    #[test]
    fn obtuse_vertex_decides() {
        // angle at the origin is 150 degrees
        let a = 150f64.to_radians();
        let p = pts(&[&[0.0, 0.0], &[1.0, 0.0], &[a.cos(), a.sin()]]);
        // triple iff the largest vertex angle exceeds π - 2 asin α
        for alpha in [0.1, 0.2, 0.25, 0.3, 0.5] {
            let expect = a > std::f64::consts::PI - 2.0 * f64::asin(alpha);
            assert_eq!(
                find_cone_triple(&p, alpha).unwrap().is_some(),
                expect,
                "alpha {alpha}"
            );
        }
        assert!(vertex_cosine(&[0.0, 0.0], &[1.0, 0.0], &[a.cos(), a.sin()]) < -0.86);
    }

    #[test]
    fn equilateral_triangle_is_triple_free_for_small_alpha() {
        let p = pts(&[&[0.0, 0.0], &[1.0, 0.0], &[0.5, 3f64.sqrt() / 2.0]]);
        assert!(find_cone_triple(&p, 0.1).unwrap().is_none());
        assert!(find_cone_triple(&p, 1.0).unwrap().is_some());
    }

    #[test]
    fn separation_constant_closed_form() {
        let t1 = compute_t(1.0).unwrap();
        assert!((t1.t - 2.0).abs() < 2e-6 && t1.t > 2.0);
        assert_eq!(t1.epsilon, 0.5);
        let t6 = compute_t(0.6).unwrap();
        assert!(t6.t > 18.0 && t6.t < 18.001);
        assert!(compute_t(0.0).is_err());
        let mut prev = f64::INFINITY;
        for k in 2..=10 {
            let t = compute_t(k as f64 / 10.0).unwrap();
            assert!(t.holds() && t.t <= prev);
            prev = t.t;
        }
    }

    #[test]
    fn collinear_balls_pass_and_close_balls_are_rejected() {
        let x0 = Point::new(vec![0.0, 0.0]).unwrap();
        let y0 = Point::new(vec![100.0, 0.0]).unwrap();
        let th = UnitVector::axis(2, 0);
        let t = compute_t(0.6).unwrap().t;
        assert!(check_separated_inclusion(&x0, 1.0, &y0, 1.0, &th, 0.6, t, 2000, 1).unwrap());
        let near = Point::new(vec![10.0, 0.0]).unwrap();
        assert!(matches!(
            check_separated_inclusion(&x0, 1.0, &near, 1.0, &th, 0.6, t, 10, 1),
            Err(Error::Precondition(_))
        ));
    }
}
