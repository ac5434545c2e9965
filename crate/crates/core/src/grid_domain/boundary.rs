use serde::{Deserialize, Serialize};

use super::GridDomain;
use crate::P3;

/// One boundary sample, attached to an interface face.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundarySample {
    /// Position on Γ: the face midpoint, projected onto the analytic
    /// boundary when one is known.
    pub position: P3,
    /// Outward unit normal.
    pub normal: P3,
    /// Surface weight `h^(n-1) |n . e_axis|`.
    pub weight: f64,
    pub face: usize,
    pub component: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundaryMesh {
    pub samples: Vec<BoundarySample>,
}

impl BoundaryMesh {
    pub(crate) fn build(dom: &GridDomain) -> BoundaryMesh {
        let h = dom.grid.h;
        let hn1 = h.powi(dom.dim() as i32 - 1);
        let samples = dom
            .faces
            .iter()
            .enumerate()
            .map(|(fi, f)| {
                let mid = dom.face_point(f);
                let (position, normal) = match &dom.shape {
                    Some(s) => {
                        let p = s.project(&mid);
                        (p, s.outward_normal(&p))
                    }
                    None => {
                        let g = dom.dist.gradient[f.cell];
                        let n = if g == [0.0; 3] {
                            let mut e = [0.0; 3];
                            e[f.axis as usize] = f.side as f64;
                            e
                        } else {
                            [-g[0], -g[1], -g[2]]
                        };
                        (mid, n)
                    }
                };
                let weight = hn1 * normal[f.axis as usize].abs();
                BoundarySample { position, normal, weight, face: fi, component: dom.face_component[fi] }
            })
            .collect();
        BoundaryMesh { samples }
    }

    pub fn total_weight(&self) -> f64 {
        self.samples.iter().map(|s| s.weight).sum()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}
