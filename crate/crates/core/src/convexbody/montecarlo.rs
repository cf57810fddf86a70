use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ConvexBody;
use crate::number::{sqrt, to_f64};

/// Hit-or-miss estimate of a volume with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
    pub hits: usize,
}

impl ConvexBody {
    /// Monte Carlo volume over the bounding box, testing membership against the facet
    /// inequalities only. Independent of the triangulation used by [`volume`](Self::volume).
    pub fn mc_volume_oracle(&self, samples: usize, seed: u64) -> VolumeEstimate {
        let n = self.dim();
        let mut lo = alloc::vec![f64::INFINITY; n];
        let mut hi = alloc::vec![f64::NEG_INFINITY; n];
        for v in self.vertices() {
            for k in 0..n {
                let x = to_f64(&v[k]);
                lo[k] = lo[k].min(x);
                hi[k] = hi[k].max(x);
            }
        }
        let box_volume: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
        let facets: Vec<(Vec<f64>, f64)> = self
            .facets()
            .iter()
            .map(|f| (f.normal.iter().map(to_f64).collect(), to_f64(&f.offset)))
            .collect();

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = alloc::vec![0.0; n];
        let mut hits = 0usize;
        for _ in 0..samples {
            for k in 0..n {
                x[k] = lo[k] + (hi[k] - lo[k]) * rng.gen::<f64>();
            }
            let inside = facets
                .iter()
                .all(|(a, b)| a.iter().zip(&x).map(|(ai, xi)| ai * xi).sum::<f64>() <= *b);
            if inside {
                hits += 1;
            }
        }
        let frac = hits as f64 / samples.max(1) as f64;
        VolumeEstimate {
            estimate: box_volume * frac,
            std_error: box_volume * sqrt(frac * (1.0 - frac) / samples.max(1) as f64),
            samples,
            hits,
        }
    }
}
