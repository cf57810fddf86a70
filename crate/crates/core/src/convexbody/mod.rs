//! Exact rational convex polytopes: construction, volume, barycenter, half-space
//! clipping, sub-barycenters and volume quantiles.
//!
//! Every [`ConvexBody`] carries both representations. The vertex list holds only
//! extreme points; each facet stores its outward inequality `normal · x <= offset`
//! together with the indices of the vertices lying on it. Volume and barycenter
//! are computed once, at construction, from a star triangulation rooted at the
//! vertex centroid in which every facet is fanned from its lexicographically
//! smallest vertex.

mod clip;
mod hammer;
mod hull;
mod montecarlo;
mod quantile;
mod triangulate;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::number::{dot, factorial, int, Point, Rational};

pub use hammer::{hammer_rhs, HammerCheck};
pub use montecarlo::VolumeEstimate;
pub use quantile::VolumeProfile;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("no input points")]
    EmptyInput,
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("point {index} has {found} coordinates, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("convex hull is {affine_dim}-dimensional, not full-dimensional in R^{dim}")]
    DegenerateBody { dim: usize, affine_dim: usize },
    #[error("direction is the zero vector")]
    ZeroDirection,
    #[error("direction {found} does not match body dimension {expected}")]
    DirectionMismatch { expected: usize, found: usize },
    #[error("slice has zero volume")]
    EmptySlice,
    #[error("quantile level {0} is outside [0, 1]")]
    TauOutOfRange(f64),
}

/// Linear functional used to slice a body.
///
/// Vectors are used as given: `p(x) = d · x` with no normalization, so thresholds
/// are measured in units of `d`. Every ratio the crate reports is invariant under
/// rescaling `d` by a positive factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Direction {
    /// Coordinate projection `x ↦ x[i]` (zero-based).
    Axis(usize),
    Vector(Point),
}

impl Direction {
    pub fn vector(v: Point) -> Result<Self, GeometryError> {
        if v.iter().all(Zero::is_zero) {
            return Err(GeometryError::ZeroDirection);
        }
        Ok(Direction::Vector(v))
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        match self {
            Direction::Axis(i) => x[*i].clone(),
            Direction::Vector(v) => dot(v, x),
        }
    }

    /// Dense coefficient vector in `R^dim`.
    pub fn to_vector(&self, dim: usize) -> Point {
        match self {
            Direction::Axis(i) => {
                let mut v = vec![Rational::zero(); dim];
                v[*i] = Rational::one();
                v
            }
            Direction::Vector(v) => v.clone(),
        }
    }

    pub fn check(&self, dim: usize) -> Result<(), GeometryError> {
        match self {
            Direction::Axis(i) if *i >= dim => Err(GeometryError::DirectionMismatch {
                expected: dim,
                found: i + 1,
            }),
            Direction::Vector(v) if v.len() != dim => Err(GeometryError::DirectionMismatch {
                expected: dim,
                found: v.len(),
            }),
            Direction::Vector(v) if v.iter().all(Zero::is_zero) => Err(GeometryError::ZeroDirection),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Axis(i) => write!(f, "x{}", i + 1),
            Direction::Vector(v) => {
                f.write_str("(")?;
                for (k, c) in v.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Keep `p(x) >= t`.
    Ge,
    /// Keep `p(x) <= t`.
    Le,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SliceSpec {
    pub direction: Direction,
    pub t: Rational,
    pub side: Side,
}

impl SliceSpec {
    pub fn new(direction: Direction, t: Rational, side: Side) -> Self {
        SliceSpec { direction, t, side }
    }

    pub fn ge(direction: Direction, t: Rational) -> Self {
        Self::new(direction, t, Side::Ge)
    }

    pub fn le(direction: Direction, t: Rational) -> Self {
        Self::new(direction, t, Side::Le)
    }
}

/// Supporting inequality `normal · x <= offset` and the vertices on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub normal: Point,
    pub offset: Rational,
    /// Sorted indices into the body's vertex list.
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexBody {
    dim: usize,
    vertices: Vec<Point>,
    facets: Vec<Facet>,
    vertex_facets: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    volume: Rational,
    barycenter: Point,
}

impl ConvexBody {
    /// Convex hull of `points`, reduced to its extreme vertices.
    pub fn build(points: Vec<Point>, dim: usize) -> Result<Self, GeometryError> {
        if dim == 0 {
            return Err(GeometryError::ZeroDimension);
        }
        if points.is_empty() {
            return Err(GeometryError::EmptyInput);
        }
        for (index, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(GeometryError::DimensionMismatch {
                    index,
                    expected: dim,
                    found: p.len(),
                });
            }
        }
        let (vertices, facets) = hull::convex_hull(points, dim)?;
        Self::from_parts(dim, vertices, facets)
    }

    /// Assembles a body from an already consistent V/H description: every vertex
    /// extreme, every facet listing exactly the vertices on its hyperplane.
    pub(crate) fn from_parts(dim: usize, vertices: Vec<Point>, facets: Vec<Facet>) -> Result<Self, GeometryError> {
        let mut vertex_facets = vec![Vec::new(); vertices.len()];
        for (f, facet) in facets.iter().enumerate() {
            for &v in &facet.vertices {
                vertex_facets[v].push(f);
            }
        }
        let edges = compute_edges(dim, &vertex_facets);
        let mut body = ConvexBody {
            dim,
            vertices,
            facets,
            vertex_facets,
            edges,
            volume: Rational::zero(),
            barycenter: Vec::new(),
        };
        let (volume, barycenter) = triangulate::volume_and_barycenter(&body);
        if !volume.is_positive() {
            return Err(GeometryError::DegenerateBody {
                dim,
                affine_dim: dim.saturating_sub(1),
            });
        }
        body.volume = volume;
        body.barycenter = barycenter;
        Ok(body)
    }

    /// The standard simplex `conv{0, e_1, …, e_n}`.
    pub fn standard_simplex(dim: usize) -> Result<Self, GeometryError> {
        let mut pts = vec![vec![Rational::zero(); dim]];
        for i in 0..dim {
            let mut e = vec![Rational::zero(); dim];
            e[i] = Rational::one();
            pts.push(e);
        }
        Self::build(pts, dim)
    }

    /// The unit cube `[0,1]^n`, assembled from its known facet structure.
    pub fn unit_cube(dim: usize) -> Result<Self, GeometryError> {
        if dim == 0 {
            return Err(GeometryError::ZeroDimension);
        }
        let count = 1usize << dim;
        let vertices: Vec<Point> = (0..count)
            .map(|mask| (0..dim).map(|i| int(((mask >> (dim - 1 - i)) & 1) as i64)).collect())
            .collect();
        let mut facets = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            let bit = dim - 1 - i;
            for upper in [false, true] {
                let mut normal = vec![Rational::zero(); dim];
                normal[i] = if upper { int(1) } else { int(-1) };
                let offset = if upper { int(1) } else { int(0) };
                let members = (0..count).filter(|m| ((m >> bit) & 1 == 1) == upper).collect();
                facets.push(Facet {
                    normal,
                    offset,
                    vertices: members,
                });
            }
        }
        Self::from_parts(dim, vertices, facets)
    }

    /// Cross-polytope inscribed in `[0,1]^n`: centre `(1/2,…,1/2)`, radius `1/2`.
    pub fn cross_polytope(dim: usize) -> Result<Self, GeometryError> {
        if dim == 0 {
            return Err(GeometryError::ZeroDimension);
        }
        let half = Rational::new(1.into(), 2.into());
        let mut vertices = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            for sign in [-1i64, 1] {
                let mut v = vec![half.clone(); dim];
                v[i] = &half + &half * int(sign);
                vertices.push(v);
            }
        }
        if dim == 1 {
            return Self::build(vertices, 1);
        }
        let mut facets = Vec::with_capacity(1 << dim);
        for mask in 0..(1usize << dim) {
            let signs: Vec<i64> = (0..dim).map(|i| if (mask >> i) & 1 == 1 { 1 } else { -1 }).collect();
            let normal: Point = signs.iter().map(|&s| int(s)).collect();
            // sum_i s_i (x_i - 1/2) <= 1/2
            let shift: Rational = signs.iter().map(|&s| int(s) * &half).sum();
            let offset = &half + shift;
            let members = (0..dim).map(|i| 2 * i + usize::from(signs[i] == 1)).collect::<Vec<_>>();
            let mut members = members;
            members.sort_unstable();
            facets.push(Facet {
                normal,
                offset,
                vertices: members,
            });
        }
        Self::from_parts(dim, vertices, facets)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Exact Lebesgue volume.
    pub fn volume(&self) -> &Rational {
        &self.volume
    }

    /// Exact barycenter `∫_K x dx / |K|`.
    pub fn barycenter(&self) -> &Point {
        &self.barycenter
    }

    /// Exact `(min_K p, max_K p)`.
    pub fn support(&self, direction: &Direction) -> Result<(Rational, Rational), GeometryError> {
        direction.check(self.dim)?;
        let mut values = self.vertices.iter().map(|v| direction.eval(v));
        let first = values.next().expect("bodies have vertices");
        Ok(values.fold((first.clone(), first), |(lo, hi), x| {
            let lo = if x < lo { x.clone() } else { lo };
            let hi = if x > hi { x } else { hi };
            (lo, hi)
        }))
    }

    /// Whether `x` satisfies every facet inequality.
    pub fn contains(&self, x: &[Rational]) -> bool {
        self.facets.iter().all(|f| dot(&f.normal, x) <= f.offset)
    }

    /// Barycenter of `clip(self, spec)`.
    pub fn sub_barycenter(&self, spec: &SliceSpec) -> Result<Point, GeometryError> {
        match self.clip(spec)? {
            Some(part) => Ok(part.barycenter),
            None => Err(GeometryError::EmptySlice),
        }
    }

    /// Unique `t` with `|K_{>=t}| = τ|K|`, rounded to the nearest double.
    pub fn quantile_threshold(&self, direction: &Direction, tau: f64) -> Result<f64, GeometryError> {
        let profile = VolumeProfile::new(self, direction)?;
        Ok(crate::number::to_f64(&profile.quantile(tau)?))
    }

    /// Image under `x ↦ x + offset`.
    pub fn translated(&self, offset: &[Rational]) -> ConvexBody {
        let shift = |p: &Point| -> Point { p.iter().zip(offset).map(|(a, b)| a + b).collect() };
        ConvexBody {
            dim: self.dim,
            vertices: self.vertices.iter().map(shift).collect(),
            facets: self
                .facets
                .iter()
                .map(|f| Facet {
                    normal: f.normal.clone(),
                    offset: &f.offset + dot(&f.normal, offset),
                    vertices: f.vertices.clone(),
                })
                .collect(),
            vertex_facets: self.vertex_facets.clone(),
            edges: self.edges.clone(),
            volume: self.volume.clone(),
            barycenter: shift(&self.barycenter),
        }
    }

    /// Volume of the star triangulation rooted at `apex` over the same facet fans.
    /// Agrees with [`volume`](Self::volume) for every apex in the body.
    pub fn star_volume(&self, apex: &[Rational]) -> Rational {
        let nf = Rational::from_integer(factorial(self.dim));
        triangulate::facet_simplices(self)
            .iter()
            .map(|s| triangulate::simplex_det(self, apex, s).abs())
            .fold(Rational::zero(), |a, b| a + b)
            / nf
    }

    /// The (n−1)-simplices of the facet fans, as vertex index lists.
    pub fn facet_simplices(&self) -> Vec<Vec<usize>> {
        triangulate::facet_simplices(self)
    }

    pub(crate) fn vertex_facets(&self) -> &[Vec<usize>] {
        &self.vertex_facets
    }
}

/// `u`, `w` span an edge iff the facets containing both are contained by no third
/// vertex's facet set.
fn compute_edges(dim: usize, vertex_facets: &[Vec<usize>]) -> Vec<(usize, usize)> {
    let m = vertex_facets.len();
    let mut edges = Vec::new();
    for u in 0..m {
        for w in u + 1..m {
            let common = intersect_sorted(&vertex_facets[u], &vertex_facets[w]);
            if common.len() + 1 < dim {
                continue;
            }
            let blocked = (0..m)
                .filter(|&x| x != u && x != w)
                .any(|x| is_subset_sorted(&common, &vertex_facets[x]));
            if !blocked {
                edges.push((u, w));
            }
        }
    }
    edges
}

pub(crate) fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

pub(crate) fn is_subset_sorted(small: &[usize], big: &[usize]) -> bool {
    let mut j = 0;
    for x in small {
        while j < big.len() && big[j] < *x {
            j += 1;
        }
        if j == big.len() || big[j] != *x {
            return false;
        }
        j += 1;
    }
    true
}
