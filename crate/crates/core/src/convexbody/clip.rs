use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use super::{ConvexBody, Facet, GeometryError, Side, SliceSpec};
use crate::number::{Point, Rational};

impl ConvexBody {
    /// Exact intersection with the half-space described by `spec`.
    ///
    /// Returns `None` when the intersection has zero volume, i.e. when `t` sits at or
    /// beyond the far end of the support. Surviving facets are the old facets that
    /// keep a vertex strictly inside the half-space; new vertices are the crossings
    /// of edges that straddle the cutting hyperplane.
    pub fn clip(&self, spec: &SliceSpec) -> Result<Option<ConvexBody>, GeometryError> {
        spec.direction.check(self.dim)?;
        let heights: Vec<Rational> = self
            .vertices
            .iter()
            .map(|v| {
                let h = spec.direction.eval(v) - &spec.t;
                match spec.side {
                    Side::Ge => h,
                    Side::Le => -h,
                }
            })
            .collect();
        if !heights.iter().any(Signed::is_positive) {
            return Ok(None);
        }
        if !heights.iter().any(Signed::is_negative) {
            return Ok(Some(self.clone()));
        }

        let mut remap = Vec::with_capacity(self.vertices.len());
        let mut vertices: Vec<Point> = Vec::new();
        for (v, h) in self.vertices.iter().zip(&heights) {
            if h.is_negative() {
                remap.push(usize::MAX);
            } else {
                remap.push(vertices.len());
                vertices.push(v.clone());
            }
        }
        let on_plane: Vec<usize> = heights
            .iter()
            .enumerate()
            .filter(|(_, h)| h.is_zero())
            .map(|(i, _)| remap[i])
            .collect();

        // (new vertex index, endpoint a, endpoint b)
        let mut crossings: Vec<(usize, usize, usize)> = Vec::new();
        for &(a, b) in &self.edges {
            let (ha, hb) = (&heights[a], &heights[b]);
            let straddles = (ha.is_positive() && hb.is_negative()) || (ha.is_negative() && hb.is_positive());
            if !straddles {
                continue;
            }
            let lambda = ha / (ha - hb);
            let point: Point = self.vertices[a]
                .iter()
                .zip(&self.vertices[b])
                .map(|(x, y)| x + (y - x) * &lambda)
                .collect();
            crossings.push((vertices.len(), a, b));
            vertices.push(point);
        }

        let mut facets = Vec::with_capacity(self.facets.len() + 1);
        for (fi, facet) in self.facets.iter().enumerate() {
            if !facet.vertices.iter().any(|&v| heights[v].is_positive()) {
                continue;
            }
            let mut members: Vec<usize> = facet
                .vertices
                .iter()
                .filter(|&&v| !heights[v].is_negative())
                .map(|&v| remap[v])
                .collect();
            for &(idx, a, b) in &crossings {
                let vf = self.vertex_facets();
                if vf[a].binary_search(&fi).is_ok() && vf[b].binary_search(&fi).is_ok() {
                    members.push(idx);
                }
            }
            members.sort_unstable();
            facets.push(Facet {
                normal: facet.normal.clone(),
                offset: facet.offset.clone(),
                vertices: members,
            });
        }

        let d = spec.direction.to_vector(self.dim);
        let (normal, offset) = match spec.side {
            Side::Ge => (d.into_iter().map(|c| -c).collect(), -spec.t.clone()),
            Side::Le => (d, spec.t.clone()),
        };
        let mut cut: Vec<usize> = on_plane;
        cut.extend(crossings.iter().map(|&(idx, _, _)| idx));
        cut.sort_unstable();
        facets.push(Facet {
            normal,
            offset,
            vertices: cut,
        });

        ConvexBody::from_parts(self.dim, vertices, facets).map(Some)
    }

    /// `|K_side|` and the barycenter of the slice, or `None` when it is empty.
    pub fn slice_measure(&self, spec: &SliceSpec) -> Result<Option<(Rational, Point)>, GeometryError> {
        Ok(self.clip(spec)?.map(|b| (b.volume, b.barycenter)))
    }
}
