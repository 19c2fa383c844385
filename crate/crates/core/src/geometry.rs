//! Points, cone predicates, linear subspaces and finite covering nets.
//!
//! Three cone families appear everywhere in the crate, all with apex `x`:
//!
//! - the almost-half-space `H(x, θ, a) = { y : (y - x)·θ > a |y - x| }`,
//! - the one-sided cone `X⁺(x, θ, α) = H(x, θ, sqrt(1 - α²))`,
//! - the plane cone `X(x, V, α) = { y : dist(y - x, V) < α |y - x| }`.
//!
//! All inequalities are strict, so the apex itself never belongs to a cone.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use smallvec::SmallVec;

use crate::{Error, Result};

/// Inline storage for coordinates; ambient dimensions up to 4 never allocate.
pub type Coords = SmallVec<[f64; 4]>;

pub(crate) const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub coords: Coords,
}

impl Point {
    pub fn new(coords: impl Into<Vec<f64>>) -> Result<Self> {
        let coords: Vec<f64> = coords.into();
        if coords.is_empty() {
            return Err(Error::arg("a point needs at least one coordinate"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::arg("point coordinates must be finite"));
        }
        Ok(Point {
            coords: Coords::from_vec(coords),
        })
    }

    pub(crate) fn from_coords(coords: Coords) -> Self {
        Point { coords }
    }

    pub fn origin(n: usize) -> Self {
        Point {
            coords: smallvec::smallvec![0.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    pub fn distance(&self, other: &Point) -> f64 {
        dist(&self.coords, &other.coords)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector {
    pub(crate) coords: Coords,
}

impl UnitVector {
    /// Accepts `coords` only if its Euclidean norm is 1 within `1e-12`.
    pub fn new(coords: impl Into<Vec<f64>>) -> Result<Self> {
        let coords = Coords::from_vec(coords.into());
        let nrm = norm(&coords);
        if coords.is_empty() || !nrm.is_finite() || (nrm - 1.0).abs() > UNIT_TOL {
            return Err(Error::arg(format!("not a unit vector (norm {nrm})")));
        }
        Ok(UnitVector { coords })
    }

    /// Normalizes a non-zero vector.
    pub fn normalize(coords: impl Into<Vec<f64>>) -> Result<Self> {
        let mut coords = Coords::from_vec(coords.into());
        let nrm = norm(&coords);
        if coords.is_empty() || !nrm.is_finite() || nrm == 0.0 {
            return Err(Error::arg("cannot normalize a zero or non-finite vector"));
        }
        coords.iter_mut().for_each(|c| *c /= nrm);
        Ok(UnitVector { coords })
    }

    /// Unit vector at angle `phi` in the plane.
    pub fn planar(phi: f64) -> Self {
        UnitVector {
            coords: smallvec::smallvec![phi.cos(), phi.sin()],
        }
    }

    pub fn axis(n: usize, i: usize) -> Self {
        let mut coords: Coords = smallvec::smallvec![0.0; n];
        coords[i] = 1.0;
        UnitVector { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    pub fn neg(&self) -> Self {
        UnitVector {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        loop {
            let v: Coords = (0..n)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect();
            let nrm = norm(&v);
            if nrm > 1e-12 {
                return UnitVector {
                    coords: v.iter().map(|c| c / nrm).collect(),
                };
            }
        }
    }
}

impl Point {
    /// Uniform sample from the closed ball `B(self, r)`.
    pub fn random_in_ball<R: Rng + ?Sized>(&self, r: f64, rng: &mut R) -> Point {
        let n = self.dim();
        let u = UnitVector::random(n, rng);
        let rho = r * rng.random::<f64>().powf(1.0 / n as f64);
        Point::from_coords(
            self.coords
                .iter()
                .zip(&u.coords)
                .map(|(c, d)| c + rho * d)
                .collect(),
        )
    }
}

/// Opening parameter of a cone, `0 < α ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ConeParams {
    alpha: f64,
}

impl ConeParams {
    pub fn new(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(ConeParams { alpha })
    }

    pub fn alpha(self) -> f64 {
        self.alpha
    }

    pub fn half(self) -> Self {
        ConeParams {
            alpha: self.alpha / 2.0,
        }
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("alpha = {alpha} must lie in (0, 1]")))
    }
}

/// An `(n - m)`-dimensional linear subspace of `ℝⁿ`, stored by an orthonormal frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient: usize,
    frame: Vec<Coords>,
}

impl Subspace {
    /// Orthonormalizes the given spanning vectors (modified Gram-Schmidt).
    /// The vectors must be linearly independent.
    pub fn from_spanning(ambient: usize, vectors: &[Vec<f64>]) -> Result<Self> {
        if ambient == 0 {
            return Err(Error::arg("ambient dimension must be positive"));
        }
        if vectors.is_empty() || vectors.len() > ambient {
            return Err(Error::arg(format!(
                "need between 1 and {ambient} spanning vectors, got {}",
                vectors.len()
            )));
        }
        let mut frame: Vec<Coords> = Vec::with_capacity(vectors.len());
        for v in vectors {
            if v.len() != ambient {
                return Err(Error::arg("spanning vector has the wrong dimension"));
            }
            let mut w = Coords::from_slice(v);
            let scale = norm(&w);
            for _ in 0..2 {
                for e in &frame {
                    let d = dot(&w, e);
                    w.iter_mut().zip(e).for_each(|(wi, ei)| *wi -= d * ei);
                }
            }
            let nrm = norm(&w);
            if !(nrm > 1e-10 * scale.max(1e-300)) {
                return Err(Error::arg("spanning vectors are linearly dependent"));
            }
            w.iter_mut().for_each(|c| *c /= nrm);
            frame.push(w);
        }
        Ok(Subspace { ambient, frame })
    }

    /// Builds a subspace from a frame that is already orthonormal (checked to `1e-12`).
    pub fn from_orthonormal(ambient: usize, frame: Vec<Vec<f64>>) -> Result<Self> {
        if frame.is_empty() || frame.len() > ambient {
            return Err(Error::arg(
                "frame size must be between 1 and the ambient dimension",
            ));
        }
        let frame: Vec<Coords> = frame.into_iter().map(Coords::from_vec).collect();
        for (i, a) in frame.iter().enumerate() {
            if a.len() != ambient {
                return Err(Error::arg("frame vector has the wrong dimension"));
            }
            if (norm(a) - 1.0).abs() > UNIT_TOL {
                return Err(Error::arg("frame vector is not a unit vector"));
            }
            for b in &frame[..i] {
                if dot(a, b).abs() > UNIT_TOL {
                    return Err(Error::arg("frame vectors are not orthogonal"));
                }
            }
        }
        Ok(Subspace { ambient, frame })
    }

    /// The whole space `ℝⁿ` (codimension 0).
    pub fn whole(n: usize) -> Self {
        Subspace {
            ambient: n,
            frame: (0..n).map(|i| UnitVector::axis(n, i).coords).collect(),
        }
    }

    pub fn line(direction: &UnitVector) -> Self {
        Subspace {
            ambient: direction.dim(),
            frame: vec![direction.coords.clone()],
        }
    }

    /// Uniformly oriented random subspace of codimension `m` (Gaussian frame, orthonormalized).
    pub fn random<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Self {
        assert!(m < n, "codimension must be below the ambient dimension");
        loop {
            let vectors: Vec<Vec<f64>> = (0..n - m)
                .map(|_| {
                    (0..n)
                        .map(|_| rng.sample::<f64, _>(StandardNormal))
                        .collect()
                })
                .collect();
            if let Ok(s) = Subspace::from_spanning(n, &vectors) {
                return s;
            }
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.frame.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient - self.frame.len()
    }

    pub fn frame(&self) -> &[Coords] {
        &self.frame
    }

    /// Orthonormal basis of the orthogonal complement `V^⊥` (empty for `V = ℝⁿ`).
    pub fn complement_basis(&self) -> Vec<Coords> {
        let mut basis: Vec<Coords> = self.frame.clone();
        let mut out = Vec::with_capacity(self.codim());
        for i in 0..self.ambient {
            if out.len() == self.codim() {
                break;
            }
            let mut w = UnitVector::axis(self.ambient, i).coords;
            for _ in 0..2 {
                for e in &basis {
                    let d = dot(&w, e);
                    w.iter_mut().zip(e).for_each(|(wi, ei)| *wi -= d * ei);
                }
            }
            let nrm = norm(&w);
            if nrm > 1e-6 {
                w.iter_mut().for_each(|c| *c /= nrm);
                basis.push(w.clone());
                out.push(w);
            }
        }
        out
    }

    /// Splits `v` into its component in the subspace and the orthogonal residual.
    pub(crate) fn split(&self, v: &[f64]) -> (Coords, Coords) {
        let mut proj: Coords = smallvec::smallvec![0.0; v.len()];
        for e in &self.frame {
            let d = dot(v, e);
            proj.iter_mut().zip(e).for_each(|(p, ei)| *p += d * ei);
        }
        let resid = v.iter().zip(&proj).map(|(a, b)| a - b).collect();
        (proj, resid)
    }

    /// `dist(v, V)` for a vector `v`.
    pub(crate) fn dist_to(&self, v: &[f64]) -> f64 {
        if self.frame.len() == self.ambient {
            return 0.0;
        }
        norm(&self.split(v).1)
    }

    pub(crate) fn contains_vector(&self, v: &[f64], tol: f64) -> bool {
        self.dist_to(v) <= tol
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn same_dim(a: usize, b: usize, what: &str) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::arg(format!(
            "dimension mismatch in {what}: {a} vs {b}"
        )))
    }
}

/// `(y - x)·θ - a |y - x|`; positive exactly on `H(x, θ, a)`.
#[inline]
pub(crate) fn halfspace_margin(x: &[f64], theta: &[f64], a: f64, y: &[f64]) -> f64 {
    let mut ip = 0.0;
    let mut sq = 0.0;
    for i in 0..x.len() {
        let d = y[i] - x[i];
        ip += d * theta[i];
        sq += d * d;
    }
    ip - a * sq.sqrt()
}

/// `α |y - x| - dist(y - x, V)`; positive exactly on `X(x, V, α)`.
#[inline]
pub(crate) fn plane_cone_margin(x: &[f64], v: &Subspace, alpha: f64, y: &[f64]) -> f64 {
    let d: Coords = y.iter().zip(x).map(|(a, b)| a - b).collect();
    alpha * norm(&d) - v.dist_to(&d)
}

/// `y ∈ H(x, θ, α)`.
pub fn in_almost_halfspace(x: &Point, theta: &UnitVector, alpha: f64, y: &Point) -> Result<bool> {
    same_dim(x.dim(), theta.dim(), "almost half-space")?;
    same_dim(x.dim(), y.dim(), "almost half-space")?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::domain(format!("alpha = {alpha} must lie in [0, 1]")));
    }
    Ok(halfspace_margin(&x.coords, &theta.coords, alpha, &y.coords) > 0.0)
}

/// `y ∈ X⁺(x, θ, α)`, the one-sided cone of opening `α`.
pub fn in_one_sided_cone(x: &Point, theta: &UnitVector, alpha: f64, y: &Point) -> Result<bool> {
    check_alpha(alpha)?;
    in_almost_halfspace(x, theta, one_sided_level(alpha), y)
}

/// The half-space level `sqrt(1 - α²)` of the one-sided cone `X⁺(·, ·, α)`.
#[inline]
pub fn one_sided_level(alpha: f64) -> f64 {
    (1.0 - alpha * alpha).max(0.0).sqrt()
}

/// `y ∈ X(x, V, α)`.
pub fn in_plane_cone(x: &Point, v: &Subspace, alpha: f64, y: &Point) -> Result<bool> {
    check_alpha(alpha)?;
    same_dim(x.dim(), v.ambient(), "plane cone")?;
    same_dim(x.dim(), y.dim(), "plane cone")?;
    Ok(plane_cone_margin(&x.coords, v, alpha, &y.coords) > 0.0)
}

/// Returns `(proj_V y, y - proj_V y)`.
pub fn orthogonal_project(v: &Subspace, y: &Point) -> Result<(Point, Point)> {
    same_dim(v.ambient(), y.dim(), "projection")?;
    let (p, r) = v.split(&y.coords);
    Ok((Point::from_coords(p), Point::from_coords(r)))
}

/// `d(V, W) = sup { dist(x, W) : x ∈ V, |x| = 1 }`.
///
/// Computed as the largest singular value of `(I - P_W) A` where the columns
/// of `A` are the frame of `V`; this equals the sine of the largest principal
/// angle and stays accurate for nearly equal subspaces.
pub fn subspace_distance(v: &Subspace, w: &Subspace) -> Result<f64> {
    same_dim(v.ambient(), w.ambient(), "subspace distance")?;
    if v.codim() != w.codim() {
        return Err(Error::arg(format!(
            "codimension mismatch: {} vs {}",
            v.codim(),
            w.codim()
        )));
    }
    if v.codim() == 0 {
        return Ok(0.0);
    }
    let n = v.ambient();
    let p = v.dim();
    let residuals: Vec<Coords> = v.frame.iter().map(|a| w.split(a).1).collect();
    if p == 1 {
        return Ok(norm(&residuals[0]).min(1.0));
    }
    let mat = DMatrix::from_fn(n, p, |i, j| residuals[j][i]);
    let sv = mat.singular_values();
    Ok(sv.iter().cloned().fold(0.0, f64::max).min(1.0))
}

/// Options for the randomized greedy net builders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetOptions {
    pub seed: u64,
    /// Stop after this many consecutive rejected samples.
    pub streak: usize,
    /// A sample is kept when it is farther than `keep_factor × radius` from
    /// every kept element. Values below 1 leave slack so that the covering at
    /// the full radius survives the random stopping rule.
    pub keep_factor: f64,
}

impl Default for NetOptions {
    fn default() -> Self {
        NetOptions {
            seed: 0x5eed,
            streak: 10_000,
            keep_factor: 0.9,
        }
    }
}

fn greedy_cover<T, R: Rng>(
    rng: &mut R,
    mut sample: impl FnMut(&mut R) -> T,
    distance: impl Fn(&T, &T) -> f64,
    keep_radius: f64,
    streak: usize,
) -> Vec<T> {
    let mut kept: Vec<T> = Vec::new();
    let mut rejected = 0usize;
    while rejected < streak {
        let cand = sample(rng);
        if kept.iter().all(|k| distance(k, &cand) > keep_radius) {
            kept.push(cand);
            rejected = 0;
        } else {
            rejected += 1;
        }
    }
    kept
}

/// Directions `θ₁ … θ_K` whose cones `H(0, θ_i, β)` cover the sphere, with
/// `β = cos(arccos(α/2) - arccos α)`. Then every `H(x, θ, α)` sits inside
/// some `H(x, θ_i, α/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionNet {
    pub directions: Vec<UnitVector>,
    pub beta: f64,
    pub alpha: f64,
}

impl DirectionNet {
    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.directions.first().map_or(0, UnitVector::dim)
    }

    /// Index of a net direction whose cone `H(0, θ_i, β)` contains `theta`.
    pub fn covering_index(&self, theta: &UnitVector) -> Option<usize> {
        self.directions
            .iter()
            .position(|d| dot(&d.coords, &theta.coords) > self.beta)
    }
}

pub fn direction_net_beta(alpha: f64) -> f64 {
    ((alpha / 2.0).acos() - alpha.acos()).cos()
}

pub fn build_direction_net(n: usize, alpha: f64) -> Result<DirectionNet> {
    build_direction_net_with(n, alpha, &NetOptions::default())
}

/// Deterministic for `n ≤ 2` (the two points of `S⁰`, or equally spaced
/// directions on the circle); randomized greedy on `S^{n-1}` otherwise.
pub fn build_direction_net_with(n: usize, alpha: f64, opts: &NetOptions) -> Result<DirectionNet> {
    if n == 0 {
        return Err(Error::arg("ambient dimension must be positive"));
    }
    check_alpha(alpha)?;
    let beta = direction_net_beta(alpha);
    let half_angle = beta.acos();
    let directions = match n {
        1 => vec![UnitVector::axis(1, 0), UnitVector::axis(1, 0).neg()],
        2 => {
            // smallest K with π/K < arccos β
            let k = (PI / half_angle).floor() as usize + 1;
            (0..k)
                .map(|i| UnitVector::planar(2.0 * PI * i as f64 / k as f64))
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            greedy_cover(
                &mut rng,
                |r| UnitVector::random(n, r),
                |a, b| dot(&a.coords, &b.coords).clamp(-1.0, 1.0).acos(),
                opts.keep_factor * half_angle,
                opts.streak,
            )
        }
    };
    Ok(DirectionNet {
        directions,
        beta,
        alpha,
    })
}

/// Planes `V₁ … V_K` of codimension `m` such that every `V` has some `V_j`
/// with `d(V, V_j) < α/2`, hence `X(x, V, α) ⊃ X(x, V_j, α/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceNet {
    pub planes: Vec<Subspace>,
    pub alpha: f64,
    pub n: usize,
    pub m: usize,
}

impl SubspaceNet {
    pub fn len(&self) -> usize {
        self.planes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.planes.is_empty()
    }

    /// Nearest net plane and its distance.
    pub fn nearest(&self, v: &Subspace) -> Result<(usize, f64)> {
        let mut best = (0, f64::INFINITY);
        for (j, p) in self.planes.iter().enumerate() {
            let d = subspace_distance(p, v)?;
            if d < best.1 {
                best = (j, d);
            }
        }
        Ok(best)
    }
}

pub fn build_subspace_net(n: usize, m: usize, alpha: f64) -> Result<SubspaceNet> {
    build_subspace_net_with(n, m, alpha, &NetOptions::default())
}

pub fn build_subspace_net_with(
    n: usize,
    m: usize,
    alpha: f64,
    opts: &NetOptions,
) -> Result<SubspaceNet> {
    if n == 0 || m >= n {
        return Err(Error::arg(format!("need 0 <= m < n, got n = {n}, m = {m}")));
    }
    check_alpha(alpha)?;
    let planes = if m == 0 {
        vec![Subspace::whole(n)]
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        greedy_cover(
            &mut rng,
            |r| Subspace::random(n, m, r),
            |a, b| subspace_distance(a, b).expect("same shape"),
            opts.keep_factor * alpha / 2.0,
            opts.streak,
        )
    };
    Ok(SubspaceNet {
        planes,
        alpha,
        n,
        m,
    })
}
