//! Point samples, normals and normal frames, plus deterministic test
//! surfaces with analytic reference integrals.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};

/// Tolerance on `||N|| - 1` accepted for oriented samples.
pub const NORMAL_TOLERANCE: f64 = 1e-12;
/// Tolerance on `|N_a . N_b - delta_ab|` accepted for normal frames.
pub const FRAME_TOLERANCE: f64 = 1e-10;

/// Ordered set of distinct points in `R^dim`, stored contiguously.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    /// Validates finiteness, layout and distinctness of the points.
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("point dimension must be positive"));
        }
        if coords.len() % dim != 0 {
            return Err(Error::LengthMismatch {
                expected: (coords.len() / dim + 1) * dim,
                found: coords.len(),
            });
        }
        let cloud = Self { dim, coords };
        if let Some(i) = cloud.iter().position(|p| p.iter().any(|v| !v.is_finite())) {
            return Err(Error::NonFinite(i));
        }
        if let Some((i, j)) = cloud.find_duplicate() {
            return Err(Error::DuplicatePoint(i, j));
        }
        Ok(cloud)
    }

    pub fn from_points<'a>(dim: usize, points: impl IntoIterator<Item = &'a [f64]>) -> Result<Self> {
        let mut coords = Vec::new();
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::new(dim, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> core::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Concatenation; fails if the union contains a repeated point.
    pub fn concat(&self, other: &PointCloud) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        Self::new(self.dim, coords)
    }

    /// Median over points of the distance to the nearest other point.
    ///
    /// Brute force, `O(N^2)`. Returns 0 for fewer than two points.
    pub fn median_spacing(&self) -> f64 {
        let n = self.len();
        if n < 2 {
            return 0.0;
        }
        let mut nearest = vec![f64::INFINITY; n];
        for i in 0..n {
            let pi = self.point(i);
            for j in i + 1..n {
                let d2 = dist2(pi, self.point(j));
                if d2 < nearest[i] {
                    nearest[i] = d2;
                }
                if d2 < nearest[j] {
                    nearest[j] = d2;
                }
            }
        }
        let mut nearest: Vec<f64> = nearest.into_iter().map(libm::sqrt).collect();
        nearest.sort_by(f64::total_cmp);
        if n % 2 == 1 {
            nearest[n / 2]
        } else {
            0.5 * (nearest[n / 2 - 1] + nearest[n / 2])
        }
    }

    fn find_duplicate(&self) -> Option<(usize, usize)> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            self.point(a)
                .iter()
                .zip(self.point(b))
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(core::cmp::Ordering::Equal)
        });
        order
            .windows(2)
            .find(|w| self.point(w[0]) == self.point(w[1]))
            .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
    }
}

/// Points with unit normals `N(y_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientedSample {
    cloud: PointCloud,
    normals: Vec<f64>,
}

impl OrientedSample {
    pub fn new(cloud: PointCloud, normals: Vec<f64>) -> Result<Self> {
        if normals.len() != cloud.coords.len() {
            return Err(Error::LengthMismatch {
                expected: cloud.coords.len(),
                found: normals.len(),
            });
        }
        for (index, n) in normals.chunks_exact(cloud.dim).enumerate() {
            let norm = norm(n);
            if !((norm - 1.0).abs() <= NORMAL_TOLERANCE) {
                return Err(Error::NonUnitNormal { index, norm });
            }
        }
        Ok(Self { cloud, normals })
    }

    pub fn cloud(&self) -> &PointCloud {
        &self.cloud
    }

    pub fn dim(&self) -> usize {
        self.cloud.dim
    }

    pub fn len(&self) -> usize {
        self.cloud.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cloud.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        self.cloud.point(i)
    }

    pub fn normal(&self, i: usize) -> &[f64] {
        &self.normals[i * self.cloud.dim..(i + 1) * self.cloud.dim]
    }

    pub fn normals(&self) -> &[f64] {
        &self.normals
    }

    /// Same points with every normal negated.
    pub fn flipped(&self) -> Self {
        Self {
            cloud: self.cloud.clone(),
            normals: self.normals.iter().map(|v| -v).collect(),
        }
    }

    pub fn concat(&self, other: &OrientedSample) -> Result<Self> {
        let cloud = self.cloud.concat(&other.cloud)?;
        let mut normals = self.normals.clone();
        normals.extend_from_slice(&other.normals);
        Ok(Self { cloud, normals })
    }
}

/// Points of a codimension-`r` submanifold with orthonormal normal frames.
#[derive(Debug, Clone, PartialEq)]
pub struct FramedSample {
    cloud: PointCloud,
    codim: usize,
    /// Point-major: frame vectors `N_1 .. N_r` of point 0, then point 1, ...
    frames: Vec<f64>,
    closed: bool,
}

impl FramedSample {
    pub fn new(cloud: PointCloud, codim: usize, frames: Vec<f64>) -> Result<Self> {
        let n = cloud.dim;
        if codim == 0 || codim >= n {
            return Err(invalid("codimension must satisfy 1 <= r < n"));
        }
        let expected = cloud.len() * codim * n;
        if frames.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: frames.len(),
            });
        }
        for (j, frame) in frames.chunks_exact(codim * n).enumerate() {
            for a in 0..codim {
                for b in a..codim {
                    let d = dot(&frame[a * n..(a + 1) * n], &frame[b * n..(b + 1) * n]);
                    let target = if a == b { 1.0 } else { 0.0 };
                    if !((d - target).abs() <= FRAME_TOLERANCE) {
                        return Err(Error::FrameNotOrthonormal(j));
                    }
                }
            }
        }
        Ok(Self {
            cloud,
            codim,
            frames,
            closed: true,
        })
    }

    /// Marks the sampled submanifold as having a boundary.
    pub fn with_boundary(mut self) -> Self {
        self.closed = false;
        self
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn cloud(&self) -> &PointCloud {
        &self.cloud
    }

    pub fn dim(&self) -> usize {
        self.cloud.dim
    }

    pub fn codim(&self) -> usize {
        self.codim
    }

    pub fn len(&self) -> usize {
        self.cloud.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cloud.is_empty()
    }

    pub fn point(&self, j: usize) -> &[f64] {
        self.cloud.point(j)
    }

    /// Frame vector `N_k(y_j)`, `k` zero-based.
    pub fn frame_vector(&self, j: usize, k: usize) -> &[f64] {
        let n = self.cloud.dim;
        let start = (j * self.codim + k) * n;
        &self.frames[start..start + n]
    }

    pub fn frames(&self) -> &[f64] {
        &self.frames
    }
}

/// Fixture families with analytic references.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceKind {
    Sphere,
    Ellipsoid { a: f64, b: f64, c: f64 },
    Hemisphere,
    CircleR3,
    /// Boundary circle `theta = alpha` of a polar cap on the unit `S^2`.
    S2Cap { alpha: f64 },
}

/// Named integrands: polynomials of degree at most two in the ambient coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrand {
    Const1,
    Coord(usize),
    Product(usize, usize),
}

impl Integrand {
    /// Parses `const1`, `x`, `y`, `z`, `x2`, `y2`, `z2`, `xy`, `xz`, `yz`,
    /// and the generic forms `c<i>` and `c<i>c<j>` (zero-based coordinates).
    pub fn parse(name: &str) -> Option<Self> {
        let axis = |c: char| match c {
            'x' => Some(0),
            'y' => Some(1),
            'z' => Some(2),
            _ => None,
        };
        match name {
            "const1" | "1" => return Some(Self::Const1),
            _ => {}
        }
        let chars: Vec<char> = name.chars().collect();
        match chars.as_slice() {
            [a] => return axis(*a).map(Self::Coord),
            [a, '2'] => return axis(*a).map(|i| Self::Product(i, i)),
            [a, b] if axis(*a).is_some() && axis(*b).is_some() => {
                return Some(Self::Product(axis(*a)?, axis(*b)?))
            }
            _ => {}
        }
        let rest = name.strip_prefix('c')?;
        match rest.split_once('c') {
            Some((i, j)) => Some(Self::Product(i.parse().ok()?, j.parse().ok()?)),
            None => Some(Self::Coord(rest.parse().ok()?)),
        }
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        match *self {
            Self::Const1 => 1.0,
            Self::Coord(i) => p.get(i).copied().unwrap_or(0.0),
            Self::Product(i, j) => p.get(i).copied().unwrap_or(0.0) * p.get(j).copied().unwrap_or(0.0),
        }
    }

    pub fn eval_all(&self, cloud: &PointCloud) -> Vec<f64> {
        cloud.iter().map(|p| self.eval(p)).collect()
    }

    fn max_coord(&self) -> Option<usize> {
        match *self {
            Self::Const1 => None,
            Self::Coord(i) => Some(i),
            Self::Product(i, j) => Some(i.max(j)),
        }
    }
}

/// A fixture surface: shape, area and exact integrals of named integrands.
///
/// `thickness` turns a hypersurface with boundary (hemisphere) into its solid
/// collar, or a curve (circle) into its solid tube, which is what gives the
/// fixture an interior.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSpec {
    pub kind: SurfaceKind,
    pub analytic_area: f64,
    pub integrals: Vec<(Integrand, f64)>,
    pub thickness: Option<f64>,
}

impl SurfaceSpec {
    /// Unit sphere `S^2` in `R^3`.
    pub fn sphere() -> Self {
        let area = 4.0 * PI;
        Self::with_quadratics(SurfaceKind::Sphere, area, [0.0; 3], [area / 3.0; 3])
    }

    pub fn ellipsoid(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && c > 0.0) || !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(invalid("ellipsoid semi-axes must be positive"));
        }
        let [area, xx, yy, zz] = ellipsoid_moments(a, b, c, 1200, 512);
        Ok(Self::with_quadratics(
            SurfaceKind::Ellipsoid { a, b, c },
            area,
            [0.0; 3],
            [xx, yy, zz],
        ))
    }

    /// Closed upper unit hemisphere `z >= 0`.
    pub fn hemisphere() -> Self {
        let area = 2.0 * PI;
        Self::with_quadratics(
            SurfaceKind::Hemisphere,
            area,
            [0.0, 0.0, PI],
            [area / 3.0; 3],
        )
    }

    /// Unit circle in the `xy` plane of `R^3`.
    pub fn circle_r3() -> Self {
        Self::with_quadratics(SurfaceKind::CircleR3, 2.0 * PI, [0.0; 3], [PI, PI, 0.0])
    }

    pub fn s2_cap(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < PI) {
            return Err(invalid("cap angle must lie in (0, pi)"));
        }
        let (s, c) = (libm::sin(alpha), libm::cos(alpha));
        let length = 2.0 * PI * s;
        Ok(Self::with_quadratics(
            SurfaceKind::S2Cap { alpha },
            length,
            [0.0, 0.0, length * c],
            [PI * s * s * s, PI * s * s * s, length * c * c],
        ))
    }

    pub fn with_thickness(mut self, eps: f64) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(invalid("thickness must be positive"));
        }
        self.thickness = Some(eps);
        Ok(self)
    }

    fn with_quadratics(kind: SurfaceKind, area: f64, linear: [f64; 3], squares: [f64; 3]) -> Self {
        let mut integrals = vec![(Integrand::Const1, area)];
        for i in 0..3 {
            integrals.push((Integrand::Coord(i), linear[i]));
        }
        for i in 0..3 {
            integrals.push((Integrand::Product(i, i), squares[i]));
        }
        // Every fixture is symmetric under x -> -x and y -> -y.
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            integrals.push((Integrand::Product(i, j), 0.0));
        }
        Self {
            kind,
            analytic_area: area,
            integrals,
            thickness: None,
        }
    }

    pub fn dim(&self) -> usize {
        3
    }

    /// Exact value of `integrand` over the fixture, if known.
    pub fn reference(&self, integrand: Integrand) -> Option<f64> {
        if integrand.max_coord().is_some_and(|i| i >= self.dim()) {
            return None;
        }
        let canonical = match integrand {
            Integrand::Product(i, j) if i > j => Integrand::Product(j, i),
            other => other,
        };
        self.integrals
            .iter()
            .find(|(k, _)| *k == canonical)
            .map(|(_, v)| *v)
    }

    /// Analytic membership in the fixture's solid interior, `None` without one.
    pub fn contains(&self, p: &[f64]) -> Option<bool> {
        let r = norm(p);
        match (self.kind, self.thickness) {
            (SurfaceKind::Sphere, _) => Some(r < 1.0),
            (SurfaceKind::Ellipsoid { a, b, c }, _) => {
                Some(sq(p[0] / a) + sq(p[1] / b) + sq(p[2] / c) < 1.0)
            }
            (SurfaceKind::Hemisphere, Some(eps)) => Some(p[2] > 0.0 && r > 1.0 && r < 1.0 + eps),
            (SurfaceKind::CircleR3, Some(eps)) => {
                let rho = libm::hypot(p[0], p[1]);
                Some(libm::hypot(rho - 1.0, p[2]) < eps)
            }
            (SurfaceKind::S2Cap { alpha }, _) => {
                Some((r - 1.0).abs() < 1e-9 && polar_angle(p) < alpha)
            }
            _ => None,
        }
    }

    /// Radius of a ball about the origin containing the whole fixture.
    fn circumradius(&self) -> f64 {
        let base = match self.kind {
            SurfaceKind::Ellipsoid { a, b, c } => a.max(b).max(c),
            _ => 1.0,
        };
        base + self.thickness.unwrap_or(0.0)
    }
}

/// Area and `x^2, y^2, z^2` moments of an ellipsoid by a midpoint rule in
/// `(cos theta, phi)`.
fn ellipsoid_moments(a: f64, b: f64, c: f64, nt: usize, np: usize) -> [f64; 4] {
    let mut out = [0.0; 4];
    let (du, dphi) = (2.0 / nt as f64, 2.0 * PI / np as f64);
    for i in 0..nt {
        let u = -1.0 + (i as f64 + 0.5) * du;
        let s = libm::sqrt(1.0 - u * u);
        for k in 0..np {
            let phi = (k as f64 + 0.5) * dphi;
            let (sp, cp) = (libm::sin(phi), libm::cos(phi));
            // |r_u x r_phi| for r = (a s cos phi, b s sin phi, c u)
            let jac = libm::sqrt(sq(b * c * s * cp) + sq(a * c * s * sp) + sq(a * b * u));
            let w = jac * du * dphi;
            out[0] += w;
            out[1] += w * sq(a * s * cp);
            out[2] += w * sq(b * s * sp);
            out[3] += w * sq(c * u);
        }
    }
    out
}

/// Fibonacci lattice on the unit sphere `S^2`, normals equal to the points.
pub fn gen_fibonacci_sphere(count: usize) -> Result<OrientedSample> {
    if count == 0 {
        return Err(invalid("count must be positive"));
    }
    fibonacci_band(count, -1.0, 1.0)
}

/// Fibonacci spiral restricted to the band `z_lo < z < z_hi` of the unit sphere,
/// with equal area per point.
fn fibonacci_band(count: usize, z_lo: f64, z_hi: f64) -> Result<OrientedSample> {
    let golden_angle = PI * (3.0 - libm::sqrt(5.0));
    let mut coords = Vec::with_capacity(3 * count);
    for j in 0..count {
        let z = z_hi - (z_hi - z_lo) * (j as f64 + 0.5) / count as f64;
        let r = libm::sqrt((1.0 - z * z).max(0.0));
        let phi = golden_angle * j as f64;
        let p = normalized(&[r * libm::cos(phi), r * libm::sin(phi), z]);
        coords.extend_from_slice(&p);
    }
    let normals = coords.clone();
    OrientedSample::new(PointCloud::new(3, coords)?, normals)
}

/// Seeded uniform sample of `S^{n-1}` in `R^n` by normalized Gaussian draws.
pub fn gen_sphere_nd(count: usize, n: usize, seed: u64) -> Result<OrientedSample> {
    if n < 3 {
        return Err(invalid("ambient dimension must be at least 3"));
    }
    if count == 0 {
        return Err(invalid("count must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords: Vec<f64> = (0..count).flat_map(|_| random_direction(&mut rng, n)).collect();
    let normals = coords.clone();
    OrientedSample::new(PointCloud::new(n, coords)?, normals)
}

/// Ellipsoid `x^2/a^2 + y^2/b^2 + z^2/c^2 = 1` with outward unit normals.
pub fn gen_ellipsoid(a: f64, b: f64, c: f64, count: usize, seed: u64) -> Result<OrientedSample> {
    if !(a > 0.0 && b > 0.0 && c > 0.0) || !(a.is_finite() && b.is_finite() && c.is_finite()) {
        return Err(invalid("ellipsoid semi-axes must be positive"));
    }
    let sphere = gen_sphere_nd(count, 3, seed)?;
    let mut coords = Vec::with_capacity(3 * count);
    let mut normals = Vec::with_capacity(3 * count);
    for u in sphere.cloud().iter() {
        let mut p = [a * u[0], b * u[1], c * u[2]];
        // Reproject onto the level set to remove rounding drift.
        let level = libm::sqrt(sq(p[0] / a) + sq(p[1] / b) + sq(p[2] / c));
        for v in &mut p {
            *v /= level;
        }
        normals.extend_from_slice(&normalized(&[p[0] / (a * a), p[1] / (b * b), p[2] / (c * c)]));
        coords.extend_from_slice(&p);
    }
    OrientedSample::new(PointCloud::new(3, coords)?, normals)
}

/// Fibonacci-style sample of the closed upper unit hemisphere, normals equal to the points.
pub fn gen_hemisphere(count: usize) -> Result<OrientedSample> {
    if count == 0 {
        return Err(invalid("count must be positive"));
    }
    fibonacci_band(count, 0.0, 1.0)
}

/// Unit circle in the `xy` plane with frames `N_1 = radial`, `N_2 = e_z`.
pub fn gen_circle_r3(count: usize) -> Result<FramedSample> {
    if count < 3 {
        return Err(invalid("circle needs at least 3 points"));
    }
    let mut coords = Vec::with_capacity(3 * count);
    let mut frames = Vec::with_capacity(6 * count);
    for j in 0..count {
        let theta = 2.0 * PI * j as f64 / count as f64;
        let (s, c) = (libm::sin(theta), libm::cos(theta));
        coords.extend_from_slice(&[c, s, 0.0]);
        frames.extend_from_slice(&[c, s, 0.0, 0.0, 0.0, 1.0]);
    }
    FramedSample::new(PointCloud::new(3, coords)?, 2, frames)
}

/// Seeded query points strictly inside the fixture's solid, at distance at
/// least half its inradius from the boundary.
///
/// For `S2Cap` the points lie on the sphere inside the cap, at polar angle
/// at most `0.8 alpha`.
pub fn interior_queries(spec: &SurfaceSpec, count: usize, seed: u64) -> Result<PointCloud> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(3 * count);
    match (spec.kind, spec.thickness) {
        (SurfaceKind::Sphere, _) => {
            for _ in 0..count {
                coords.extend(uniform_in_ball(&mut rng, 3, 0.5));
            }
        }
        (SurfaceKind::Ellipsoid { a, b, c }, _) => {
            let r = 0.5 * a.min(b).min(c);
            for _ in 0..count {
                coords.extend(uniform_in_ball(&mut rng, 3, r));
            }
        }
        (SurfaceKind::Hemisphere, Some(eps)) => {
            let margin = 0.25 * eps;
            for _ in 0..count {
                // Uniform in z keeps the base point uniform in area.
                let z = margin + (1.0 - margin) * rng.random::<f64>();
                let phi = 2.0 * PI * rng.random::<f64>();
                let rho = libm::sqrt(1.0 - z * z);
                let t = margin + (eps - 2.0 * margin) * rng.random::<f64>();
                let s = 1.0 + t;
                coords.extend_from_slice(&[s * rho * libm::cos(phi), s * rho * libm::sin(phi), s * z]);
            }
        }
        (SurfaceKind::CircleR3, Some(eps)) => {
            for _ in 0..count {
                let theta = 2.0 * PI * rng.random::<f64>();
                let beta = 2.0 * PI * rng.random::<f64>();
                let s = 0.5 * eps * libm::sqrt(rng.random::<f64>());
                let radial = 1.0 + s * libm::cos(beta);
                coords.extend_from_slice(&[
                    radial * libm::cos(theta),
                    radial * libm::sin(theta),
                    s * libm::sin(beta),
                ]);
            }
        }
        (SurfaceKind::S2Cap { alpha }, _) => {
            for _ in 0..count {
                coords.extend(uniform_on_cap_band(&mut rng, 0.0, 0.8 * alpha));
            }
        }
        (kind, None) => {
            return Err(Error::NoInterior(format!("{kind:?} without thickness")));
        }
    }
    PointCloud::new(3, coords)
}

/// Seeded query points well outside the fixture: a shell between two and
/// three circumradii, or the region `theta >= 1.2 alpha` for caps.
pub fn exterior_queries(spec: &SurfaceSpec, count: usize, seed: u64) -> Result<PointCloud> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(3 * count);
    if let SurfaceKind::S2Cap { alpha } = spec.kind {
        for _ in 0..count {
            coords.extend(uniform_on_cap_band(&mut rng, 1.2 * alpha, PI));
        }
        return PointCloud::new(3, coords);
    }
    let r = spec.circumradius();
    for _ in 0..count {
        let dir = random_direction(&mut rng, 3);
        let radius = r * (2.0 + rng.random::<f64>());
        coords.extend(dir.iter().map(|v| v * radius));
    }
    PointCloud::new(3, coords)
}

fn random_direction(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = norm(&g);
        if norm > 1e-12 {
            return g.iter().map(|v| v / norm).collect();
        }
    }
}

fn uniform_in_ball(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<f64> {
    let dir = random_direction(rng, n);
    let r = radius * libm::pow(rng.random::<f64>(), 1.0 / n as f64);
    dir.iter().map(|v| v * r).collect()
}

/// Area-uniform point on `S^2` with polar angle in `[theta_lo, theta_hi]`.
fn uniform_on_cap_band(rng: &mut ChaCha8Rng, theta_lo: f64, theta_hi: f64) -> [f64; 3] {
    let (z_hi, z_lo) = (libm::cos(theta_lo), libm::cos(theta_hi));
    let z = z_lo + (z_hi - z_lo) * rng.random::<f64>();
    let phi = 2.0 * PI * rng.random::<f64>();
    let rho = libm::sqrt((1.0 - z * z).max(0.0));
    normalized(&[rho * libm::cos(phi), rho * libm::sin(phi), z])
}

/// Polar angle from the north pole `e_z`.
pub fn polar_angle(p: &[f64]) -> f64 {
    libm::atan2(libm::hypot(p[0], p[1]), p[2])
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| sq(x - y)).sum()
}

pub fn normalized(a: &[f64; 3]) -> [f64; 3] {
    let n = norm(a);
    [a[0] / n, a[1] / n, a[2] / n]
}

#[inline]
fn sq(x: f64) -> f64 {
    x * x
}
