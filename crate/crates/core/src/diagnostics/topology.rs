//! Connected components, holes and phase masks on the node lattice.

use serde::Serialize;

use crate::grid::{Grid2D, ScalarField};
use crate::model::PhaseState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sign {
    Above,
    Below,
}

pub fn threshold_mask(field: &ScalarField, threshold: f64, sign: Sign) -> Vec<bool> {
    field
        .values
        .iter()
        .map(|&v| match sign {
            Sign::Above => v > threshold,
            Sign::Below => v < threshold,
        })
        .collect()
}

/// Nodes where `phase` (1-based) dominates: the nested signs
/// `phi_1 .. phi_{k-1} > 0, phi_k < 0`, and all positive for the last phase.
pub fn phase_mask(state: &PhaseState, phase: usize) -> Vec<bool> {
    let nf = state.n_fields();
    let len = state.grid().len();
    (0..len)
        .map(|k| {
            let pos = |f: usize| state.fields[f].values[k] > 0.0;
            (0..(phase - 1).min(nf)).all(pos) && (phase > nf || !pos(phase - 1))
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Component {
    pub nodes: usize,
    pub centroid: [f64; 2],
    /// touches x = 0, x = lx, y = 0, y = ly
    pub touches: [bool; 4],
}

/// 4-connected components of `mask`, largest first.
pub fn components(grid: &Grid2D, mask: &[bool]) -> Vec<Component> {
    let mut label = vec![usize::MAX; mask.len()];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for start in 0..mask.len() {
        if !mask[start] || label[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let (mut n, mut sx, mut sy) = (0usize, 0.0, 0.0);
        let mut touches = [false; 4];
        label[start] = id;
        stack.push(start);
        while let Some(k) = stack.pop() {
            let (i, j) = (k % grid.nx, k / grid.nx);
            n += 1;
            sx += grid.x(i);
            sy += grid.y(j);
            touches[0] |= i == 0;
            touches[1] |= i == grid.nx - 1;
            touches[2] |= j == 0;
            touches[3] |= j == grid.ny - 1;
            let mut visit = |q: usize| {
                if mask[q] && label[q] == usize::MAX {
                    label[q] = id;
                    stack.push(q);
                }
            };
            if i > 0 {
                visit(k - 1);
            }
            if i + 1 < grid.nx {
                visit(k + 1);
            }
            if j > 0 {
                visit(k - grid.nx);
            }
            if j + 1 < grid.ny {
                visit(k + grid.nx);
            }
        }
        out.push(Component {
            nodes: n,
            centroid: [sx / n as f64, sy / n as f64],
            touches,
        });
    }
    out.sort_by_key(|c| std::cmp::Reverse(c.nodes));
    out
}

pub fn count_components(field: &ScalarField, threshold: f64, sign: Sign) -> usize {
    components(&field.grid, &threshold_mask(field, threshold, sign)).len()
}

/// Euler characteristic of the cubical complex spanned by the mask
/// (nodes, lattice edges and unit cells with all corners in the mask).
pub fn euler_characteristic(grid: &Grid2D, mask: &[bool]) -> i64 {
    let at = |i: usize, j: usize| mask[grid.idx(i, j)];
    let (mut v, mut e, mut f) = (0i64, 0i64, 0i64);
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            if !at(i, j) {
                continue;
            }
            v += 1;
            if i + 1 < grid.nx && at(i + 1, j) {
                e += 1;
            }
            if j + 1 < grid.ny && at(i, j + 1) {
                e += 1;
                if i + 1 < grid.nx && at(i + 1, j) && at(i + 1, j + 1) {
                    f += 1;
                }
            }
        }
    }
    v - e + f
}

/// Number of holes: components minus Euler characteristic.
pub fn hole_count(grid: &Grid2D, mask: &[bool]) -> i64 {
    components(grid, mask).len() as i64 - euler_characteristic(grid, mask)
}

/// Number of lattice edges joining a node of `a` to a node of `b`.
pub fn contact_edges(grid: &Grid2D, a: &[bool], b: &[bool]) -> usize {
    let mut n = 0;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let k = grid.idx(i, j);
            if i + 1 < grid.nx && ((a[k] && b[k + 1]) || (b[k] && a[k + 1])) {
                n += 1;
            }
            if j + 1 < grid.ny && ((a[k] && b[k + grid.nx]) || (b[k] && a[k + grid.nx])) {
                n += 1;
            }
        }
    }
    n
}
