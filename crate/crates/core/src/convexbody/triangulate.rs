use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{intersect_sorted, is_subset_sorted, ConvexBody};
use crate::linalg::{bareiss_det, det};
use crate::number::{common_denominator, factorial, Point, Rational};

/// Pulling triangulation of the boundary: each face is fanned from its
/// lexicographically smallest vertex over those of its own facets that avoid it.
pub(super) fn facet_simplices(body: &ConvexBody) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..body.vertices.len()).collect();
    order.sort_by(|&a, &b| body.vertices[a].cmp(&body.vertices[b]));
    let mut lex_rank = vec![0; order.len()];
    for (rank, &v) in order.iter().enumerate() {
        lex_rank[v] = rank;
    }

    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(body.dim);
    for facet in &body.facets {
        fan(body, &facet.vertices, body.dim - 1, &lex_rank, &mut prefix, &mut out);
    }
    out
}

fn fan(
    body: &ConvexBody,
    face: &[usize],
    face_dim: usize,
    lex_rank: &[usize],
    prefix: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if face.len() == face_dim + 1 {
        let mut s = prefix.clone();
        s.extend_from_slice(face);
        out.push(s);
        return;
    }
    let apex = *face.iter().min_by_key(|&&v| lex_rank[v]).expect("faces are nonempty");

    let mut candidates: Vec<Vec<usize>> = body
        .facets
        .iter()
        .map(|g| intersect_sorted(face, &g.vertices))
        .filter(|x| !x.is_empty() && x.len() < face.len())
        .collect();
    candidates.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    let mut maximal: Vec<Vec<usize>> = Vec::new();
    for c in candidates {
        if !maximal.iter().any(|m| is_subset_sorted(&c, m)) {
            maximal.push(c);
        }
    }

    for sub in maximal {
        if sub.binary_search(&apex).is_ok() {
            continue;
        }
        prefix.push(apex);
        fan(body, &sub, face_dim - 1, lex_rank, prefix, out);
        prefix.pop();
    }
}

pub(super) fn simplex_det(body: &ConvexBody, apex: &[Rational], simplex: &[usize]) -> Rational {
    let rows: Vec<Point> = simplex
        .iter()
        .map(|&v| body.vertices[v].iter().zip(apex).map(|(a, b)| a - b).collect())
        .collect();
    det(&rows)
}

/// Vertex as `(d, N)` with `v = N / d` and `d > 0`.
fn homogeneous(v: &[Rational]) -> (BigInt, Vec<BigInt>) {
    let d = common_denominator(v);
    let n = v.iter().map(|q| q.numer() * (&d / q.denom())).collect();
    (d, n)
}

/// Cones the boundary simplices from the vertex centroid. A simplex with homogeneous rows
/// `(d_i, N_i)` has `n!·volume = |det| / Π d_i`, so each cone costs one integer
/// determinant and one gcd to merge into the running common denominator.
pub(super) fn volume_and_barycenter(body: &ConvexBody) -> (Rational, Point) {
    let n = body.dim;
    let m = Rational::from_integer((body.vertices.len() as i64).into());
    let centroid: Point = (0..n)
        .map(|k| body.vertices.iter().map(|v| &v[k]).sum::<Rational>() / &m)
        .collect();
    let mut hom: Vec<(BigInt, Vec<BigInt>)> = body.vertices.iter().map(|v| homogeneous(v)).collect();
    let apex = hom.len();
    hom.push(homogeneous(&centroid));

    // weight and moments as integer numerators over the common denominator `acc`
    let mut acc = BigInt::one();
    let mut weight = BigInt::zero();
    let mut moment = vec![BigInt::zero(); n];
    for s in facet_simplices(body) {
        let members: Vec<usize> = core::iter::once(apex).chain(s).collect();
        let rows: Vec<Vec<BigInt>> = members
            .iter()
            .map(|&i| {
                core::iter::once(hom[i].0.clone())
                    .chain(hom[i].1.iter().cloned())
                    .collect()
            })
            .collect();
        let w = bareiss_det(rows).abs();
        if w.is_zero() {
            continue;
        }
        // this cone contributes w·den / den² to the weight and w·Σ_i N_ik·(den/d_i) / den² to moment k
        let den: BigInt = members.iter().map(|&i| &hom[i].0).product();
        let q = &den * &den;
        let g = acc.gcd(&q);
        let (old_scale, new_scale) = (&q / &g, &acc / &g);
        acc = &acc * &old_scale;
        let w = &w * &new_scale;
        for (k, m) in moment.iter_mut().enumerate() {
            let coord_sum: BigInt = members.iter().map(|&i| &hom[i].1[k] * (&den / &hom[i].0)).sum();
            *m = &*m * &old_scale + &w * coord_sum;
        }
        weight = &weight * &old_scale + w * den;
    }
    if weight.is_zero() {
        return (Rational::zero(), centroid);
    }
    let weight = Rational::new(weight, acc.clone());
    let moment: Vec<Rational> = moment.into_iter().map(|m| Rational::new(m, acc.clone())).collect();
    let volume = &weight / Rational::from_integer(factorial(n));
    let scale = &weight * Rational::from_integer(((n + 1) as i64).into());
    let barycenter = moment.into_iter().map(|x| x / &scale).collect();
    (volume, barycenter)
}
