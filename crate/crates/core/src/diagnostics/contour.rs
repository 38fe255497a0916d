//! Zero contours by marching squares, the three ternary interfaces, and a
//! few geometric measures on polylines.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::grid::{Grid2D, ScalarField};
use crate::model::PhaseState;

pub type Point = [f64; 2];

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Polyline {
    pub points: Vec<Point>,
    pub closed: bool,
}

impl Polyline {
    pub fn length(&self) -> f64 {
        let mut l: f64 = self.points.windows(2).map(|w| dist(w[0], w[1])).sum();
        if self.closed && self.points.len() > 2 {
            l += dist(self.points[0], *self.points.last().unwrap());
        }
        l
    }

    /// Shoelace area, meaningful for closed polylines.
    pub fn signed_area(&self) -> f64 {
        let n = self.points.len();
        if n < 3 {
            return 0.0;
        }
        let mut a = 0.0;
        for k in 0..n {
            let p = self.points[k];
            let q = self.points[(k + 1) % n];
            a += p[0] * q[1] - q[0] * p[1];
        }
        0.5 * a
    }
}

pub fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// `4 pi A / P^2` of a closed polyline; 1 for a circle.
pub fn isoperimetric_ratio(line: &Polyline) -> Result<f64> {
    if !line.closed {
        return Err(invalid("line", "isoperimetric ratio needs a closed contour"));
    }
    let p = line.length();
    if p == 0.0 {
        return Err(invalid("line", "degenerate contour"));
    }
    Ok(4.0 * std::f64::consts::PI * line.signed_area().abs() / (p * p))
}

/// Smallest distance between vertices of two polyline sets.
pub fn min_distance(a: &[Polyline], b: &[Polyline]) -> f64 {
    let mut best = f64::INFINITY;
    for p in a.iter().flat_map(|l| &l.points) {
        for q in b.iter().flat_map(|l| &l.points) {
            best = best.min(dist(*p, *q));
        }
    }
    best
}

/// Bilinear interpolation of `f` at `(x, y)`, clamped to the domain.
pub fn sample(f: &ScalarField, x: f64, y: f64) -> f64 {
    let g = f.grid;
    let fx = (x / g.hx()).clamp(0.0, (g.nx - 1) as f64);
    let fy = (y / g.hy()).clamp(0.0, (g.ny - 1) as f64);
    let i = (fx.floor() as usize).min(g.nx - 2);
    let j = (fy.floor() as usize).min(g.ny - 2);
    let (tx, ty) = (fx - i as f64, fy - j as f64);
    let v = |a, b| f.values[g.idx(a, b)];
    (1.0 - ty) * ((1.0 - tx) * v(i, j) + tx * v(i + 1, j)) + ty * ((1.0 - tx) * v(i, j + 1) + tx * v(i + 1, j + 1))
}

#[derive(Clone, Copy)]
struct Segment {
    ends: [usize; 2],
    pts: [Point; 2],
}

fn h_edge(g: &Grid2D, i: usize, j: usize) -> usize {
    j * (g.nx - 1) + i
}

fn v_edge(g: &Grid2D, i: usize, j: usize) -> usize {
    (g.nx - 1) * g.ny + j * g.nx + i
}

fn segments(f: &ScalarField) -> Vec<Segment> {
    let g = f.grid;
    let (hx, hy) = (g.hx(), g.hy());
    let v = |i, j| f.values[g.idx(i, j)];
    let cross = |a: f64, b: f64| a / (a - b);
    let mut out = Vec::new();
    for j in 0..g.ny - 1 {
        for i in 0..g.nx - 1 {
            let c = [v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)];
            let pos = c.map(|x| x >= 0.0);
            if pos.iter().all(|&p| p) || pos.iter().all(|&p| !p) {
                continue;
            }
            let (x0, y0) = (i as f64 * hx, j as f64 * hy);
            // edges: 0 bottom, 1 right, 2 top, 3 left, each between corners k and k+1
            let edge = |e: usize| -> (usize, Point) {
                let (a, b) = (c[e], c[(e + 1) % 4]);
                let t = cross(a, b);
                match e {
                    0 => (h_edge(&g, i, j), [x0 + t * hx, y0]),
                    1 => (v_edge(&g, i + 1, j), [x0 + hx, y0 + t * hy]),
                    2 => (h_edge(&g, i, j + 1), [x0 + (1.0 - t) * hx, y0 + hy]),
                    _ => (v_edge(&g, i, j), [x0, y0 + (1.0 - t) * hy]),
                }
            };
            let mut push = |e1: usize, e2: usize| {
                let (k1, p1) = edge(e1);
                let (k2, p2) = edge(e2);
                out.push(Segment {
                    ends: [k1, k2],
                    pts: [p1, p2],
                });
            };
            let crossing: Vec<usize> = (0..4).filter(|&e| pos[e] != pos[(e + 1) % 4]).collect();
            if crossing.len() == 2 {
                push(crossing[0], crossing[1]);
            } else {
                // saddle: cut off the corners whose sign differs from the centre
                let centre = c.iter().sum::<f64>() >= 0.0;
                for k in 0..4 {
                    if pos[k] != centre {
                        push((k + 3) % 4, k);
                    }
                }
            }
        }
    }
    out
}

fn chain(segs: &[Segment]) -> Vec<Polyline> {
    let mut at: HashMap<usize, Vec<usize>> = HashMap::new();
    for (k, s) in segs.iter().enumerate() {
        for e in s.ends {
            at.entry(e).or_default().push(k);
        }
    }
    let mut used = vec![false; segs.len()];
    let mut lines = Vec::new();
    // walk from `edge` away from segment `from`; returns points and whether it looped
    let walk = |start: usize, mut edge: usize, used: &mut Vec<bool>, pts: &mut Vec<Point>| -> bool {
        let mut from = start;
        loop {
            let next = at[&edge].iter().copied().find(|&k| k != from && (!used[k] || k == start));
            let Some(k) = next else { return false };
            if k == start {
                return true;
            }
            used[k] = true;
            let s = &segs[k];
            let far = if s.ends[0] == edge { 1 } else { 0 };
            pts.push(s.pts[far]);
            edge = s.ends[far];
            from = k;
        }
    };
    for start in 0..segs.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let s = segs[start];
        let mut fwd = vec![s.pts[0], s.pts[1]];
        let closed = walk(start, s.ends[1], &mut used, &mut fwd);
        if closed {
            lines.push(Polyline { points: fwd, closed: true });
            continue;
        }
        let mut back = Vec::new();
        walk(start, s.ends[0], &mut used, &mut back);
        back.reverse();
        back.extend(fwd);
        lines.push(Polyline {
            points: back,
            closed: false,
        });
    }
    lines
}

/// Zero level set of `f` as polylines.
pub fn zero_contour(f: &ScalarField) -> Vec<Polyline> {
    chain(&segments(f))
}

/// Zero level set of `f` restricted to segments whose midpoint satisfies `keep`.
pub fn masked_contour(f: &ScalarField, keep: impl Fn(Point) -> bool) -> Vec<Polyline> {
    let segs: Vec<Segment> = segments(f)
        .into_iter()
        .filter(|s| keep([0.5 * (s.pts[0][0] + s.pts[1][0]), 0.5 * (s.pts[0][1] + s.pts[1][1])]))
        .collect();
    chain(&segs)
}

/// The three interfaces of a ternary state:
/// `gamma1 = {phi = 0, psi > 0}`, `gamma2 = {psi = 0, phi > 0}`,
/// `gamma3 = {psi = 0, phi < 0}`.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Contours {
    pub gamma1: Vec<Polyline>,
    pub gamma2: Vec<Polyline>,
    pub gamma3: Vec<Polyline>,
}

impl Contours {
    pub fn get(&self, k: usize) -> &[Polyline] {
        match k {
            1 => &self.gamma1,
            2 => &self.gamma2,
            _ => &self.gamma3,
        }
    }

    pub fn points(&self, k: usize) -> impl Iterator<Item = Point> + '_ {
        self.get(k).iter().flat_map(|l| l.points.iter().copied())
    }
}

pub fn extract_contours(state: &PhaseState) -> Result<Contours> {
    if state.n_fields() != 2 {
        return Err(invalid("state", "contours are defined for three-phase states"));
    }
    let psi = &state.fields[0];
    let phi = &state.fields[1];
    Ok(Contours {
        gamma1: masked_contour(phi, |p| sample(psi, p[0], p[1]) > 0.0),
        gamma2: masked_contour(psi, |p| sample(phi, p[0], p[1]) > 0.0),
        gamma3: masked_contour(psi, |p| sample(phi, p[0], p[1]) < 0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertical_line_contour() {
        let g = Grid2D::unit(41).unwrap();
        let eps = 0.03;
        let phi = ScalarField::from_fn(g, |x, _| ((x - 0.5) / eps).tanh());
        let s = PhaseState::ternary(ScalarField::constant(g, 1.0), phi).unwrap();
        let c = extract_contours(&s).unwrap();
        assert_eq!(c.gamma1.len(), 1);
        assert!(c.gamma2.is_empty() && c.gamma3.is_empty());
        let l = &c.gamma1[0];
        assert!(!l.closed);
        assert_eq!(l.points.len(), 41);
        assert!(l.points.iter().all(|p| (p[0] - 0.5).abs() < 1e-12));
        assert!((l.length() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn psi_one_masks_out_gamma2_gamma3() {
        let g = Grid2D::unit(21).unwrap();
        let phi = ScalarField::from_fn(g, |x, y| (7.0 * x).sin() * (5.0 * y).cos());
        let s = PhaseState::ternary(ScalarField::constant(g, 1.0), phi).unwrap();
        let c = extract_contours(&s).unwrap();
        assert!(c.gamma2.is_empty() && c.gamma3.is_empty());
        assert!(!c.gamma1.is_empty());
    }

    #[test]
    fn circle_is_closed_with_ratio_near_one() {
        let g = Grid2D::unit(129).unwrap();
        let f = ScalarField::from_fn(g, |x, y| ((x - 0.5).powi(2) + (y - 0.45).powi(2)).sqrt() - 0.2);
        let lines = zero_contour(&f);
        assert_eq!(lines.len(), 1);
        assert!(lines[0].closed);
        let r = isoperimetric_ratio(&lines[0]).unwrap();
        assert!((r - 1.0).abs() < 1e-3, "{r}");
        assert!((lines[0].signed_area().abs() - std::f64::consts::PI * 0.04).abs() < 1e-3);
        for p in &lines[0].points {
            assert!((dist(*p, [0.5, 0.45]) - 0.2).abs() < 1e-3);
        }
        // a square has ratio pi/4
        let sq = Polyline {
            points: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            closed: true,
        };
        assert!((isoperimetric_ratio(&sq).unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn saddle_cells_stay_consistent() {
        let g = Grid2D::unit(33).unwrap();
        let f = ScalarField::from_fn(g, |x, y| (x - 0.5) * (y - 0.5) + 1e-3);
        let lines = zero_contour(&f);
        assert_eq!(lines.len(), 2);
        assert!(lines.iter().all(|l| !l.closed));
    }

    #[test]
    fn masks_respected_at_midpoints() {
        let g = Grid2D::unit(65).unwrap();
        let psi = ScalarField::from_fn(g, |x, y| ((x - 0.5).powi(2) + (y - 0.5).powi(2)).sqrt() - 0.25);
        let phi = ScalarField::from_fn(g, |_, y| y - 0.5);
        let s = PhaseState::ternary(psi.clone(), phi.clone()).unwrap();
        let c = extract_contours(&s).unwrap();
        for l in &c.gamma2 {
            for w in l.points.windows(2) {
                let m = [0.5 * (w[0][0] + w[1][0]), 0.5 * (w[0][1] + w[1][1])];
                assert!(sample(&phi, m[0], m[1]) > 0.0);
            }
            for p in &l.points {
                assert!(sample(&psi, p[0], p[1]).abs() < 2e-3);
            }
        }
        assert_eq!(c.gamma1.len(), 2);
        assert_eq!(c.gamma2.len(), 1);
        assert_eq!(c.gamma3.len(), 1);
    }
}
