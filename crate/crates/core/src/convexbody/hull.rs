//! Exact beneath-beyond convex hull.
//!
//! Points are inserted one at a time into the hull of an initial simplex. Facets
//! visible from the new point are dropped, coplanar facets absorb it, and every
//! horizon ridge (visible facet meets strictly-beneath facet) is coned to the new
//! point. Non-extreme boundary points are filtered at the end.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use super::{intersect_sorted, is_subset_sorted, Facet, GeometryError};
use crate::linalg::{affine_dimension, independent_subset, normal_of};
use crate::number::{dot, Point, Rational};

struct RawFacet {
    normal: Point,
    offset: Rational,
    members: Vec<usize>,
}

pub(super) fn convex_hull(mut points: Vec<Point>, dim: usize) -> Result<(Vec<Point>, Vec<Facet>), GeometryError> {
    points.sort();
    points.dedup();
    if dim == 1 {
        return segment(points);
    }

    let refs: Vec<&Point> = points.iter().collect();
    let init = independent_subset(&refs, dim + 1);
    if init.len() < dim + 1 {
        return Err(GeometryError::DegenerateBody {
            dim,
            affine_dim: init.len().saturating_sub(1),
        });
    }
    let interior: Point = (0..dim)
        .map(|k| {
            init.iter().map(|&i| &points[i][k]).sum::<Rational>() / Rational::from_integer((dim as i64 + 1).into())
        })
        .collect();

    let mut active: Vec<usize> = init.clone();
    active.sort_unstable();
    let mut facets: Vec<RawFacet> = Vec::new();
    for skip in 0..init.len() {
        let spanning: Vec<usize> = init
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != skip)
            .map(|(_, &i)| i)
            .collect();
        facets.push(make_facet(&points, &spanning, &active, &interior, dim));
    }

    let mut in_init = vec![false; points.len()];
    for &i in &init {
        in_init[i] = true;
    }
    for q in 0..points.len() {
        if in_init[q] {
            continue;
        }
        let sides: Vec<Rational> = facets.iter().map(|f| dot(&f.normal, &points[q]) - &f.offset).collect();
        if !sides.iter().any(Signed::is_positive) {
            continue;
        }

        let pos = active.binary_search(&q).unwrap_err();
        active.insert(pos, q);

        let mut fresh: Vec<RawFacet> = Vec::new();
        for (fi, f) in facets.iter().enumerate() {
            if !sides[fi].is_positive() {
                continue;
            }
            for (gi, g) in facets.iter().enumerate() {
                if !sides[gi].is_negative() {
                    continue;
                }
                let common = intersect_sorted(&f.members, &g.members);
                if common.len() + 1 < dim {
                    continue;
                }
                if affine_dimension(common.iter().map(|&i| &points[i])) != Some(dim - 2) {
                    continue;
                }
                let ridge_pts: Vec<&Point> = common.iter().map(|&i| &points[i]).collect();
                let mut spanning: Vec<usize> = independent_subset(&ridge_pts, dim - 1)
                    .into_iter()
                    .map(|k| common[k])
                    .collect();
                spanning.push(q);
                let candidate = make_facet(&points, &spanning, &active, &interior, dim);
                if !fresh
                    .iter()
                    .any(|h| h.normal == candidate.normal && h.offset == candidate.offset)
                {
                    fresh.push(candidate);
                }
            }
        }

        let mut kept: Vec<RawFacet> = Vec::with_capacity(facets.len() + fresh.len());
        for (f, side) in facets.into_iter().zip(&sides) {
            if side.is_positive() {
                continue;
            }
            let mut f = f;
            if side.is_zero() {
                let pos = f.members.binary_search(&q).unwrap_err();
                f.members.insert(pos, q);
            }
            kept.push(f);
        }
        kept.extend(fresh);
        facets = kept;
    }

    // A boundary point is extreme iff no other point lies on every facet through it.
    let mut point_facets: Vec<Vec<usize>> = vec![Vec::new(); points.len()];
    for (fi, f) in facets.iter().enumerate() {
        for &i in &f.members {
            point_facets[i].push(fi);
        }
    }
    let mut remap = vec![usize::MAX; points.len()];
    let mut vertices = Vec::new();
    for &x in &active {
        let fx = &point_facets[x];
        if fx.is_empty() {
            continue;
        }
        let dominated = active.iter().any(|&y| y != x && is_subset_sorted(fx, &point_facets[y]));
        if !dominated {
            remap[x] = vertices.len();
            vertices.push(points[x].clone());
        }
    }
    let facets = facets
        .into_iter()
        .map(|f| Facet {
            normal: f.normal,
            offset: f.offset,
            vertices: f
                .members
                .iter()
                .filter(|&&i| remap[i] != usize::MAX)
                .map(|&i| remap[i])
                .collect(),
        })
        .collect();
    Ok((vertices, facets))
}

fn make_facet(points: &[Point], spanning: &[usize], active: &[usize], interior: &Point, dim: usize) -> RawFacet {
    let base = &points[spanning[0]];
    let diffs: Vec<Point> = spanning[1..]
        .iter()
        .map(|&i| points[i].iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let ints = normal_of(&diffs, dim).expect("spanning points are affinely independent");
    let mut normal: Point = ints.into_iter().map(Rational::from_integer).collect();
    let mut offset = dot(&normal, base);
    if dot(&normal, interior) > offset {
        for c in normal.iter_mut() {
            *c = -c.clone();
        }
        offset = -offset;
    }
    let members = active
        .iter()
        .copied()
        .filter(|&i| dot(&normal, &points[i]) == offset)
        .collect();
    RawFacet {
        normal,
        offset,
        members,
    }
}

fn segment(points: Vec<Point>) -> Result<(Vec<Point>, Vec<Facet>), GeometryError> {
    if points.len() < 2 {
        return Err(GeometryError::DegenerateBody { dim: 1, affine_dim: 0 });
    }
    let lo = points[0].clone();
    let hi = points[points.len() - 1].clone();
    let one = Rational::from_integer(1.into());
    let facets = vec![
        Facet {
            normal: vec![-one.clone()],
            offset: -lo[0].clone(),
            vertices: vec![0],
        },
        Facet {
            normal: vec![one],
            offset: hi[0].clone(),
            vertices: vec![1],
        },
    ];
    Ok((vec![lo, hi], facets))
}
