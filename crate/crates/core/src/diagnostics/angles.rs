//! Triple junctions and apparent contact angles.
//!
//! Near a junction each interface is fitted by a circle (a straight line
//! when the circle degenerates) through the contour points in an annulus
//! around the junction; the interface direction is the fit's tangent at the
//! junction, pointing away from it.  The three rays split the full turn into
//! three openings, each named after the interface pair bounding it.
//!
//! ```text
//!            gamma1
//!              |
//!     phase 2  |  phase 3        theta13: between gamma1 and gamma3 (phase 2)
//!              +                 theta12: between gamma1 and gamma2 (phase 3)
//!    gamma3  /   \  gamma2       theta23: between gamma2 and gamma3 (phase 1)
//!          phase 1
//! ```

use serde::Serialize;

use super::contour::{dist, Contours, Point};
use crate::error::{Error, Result};
use crate::tension::SurfaceTensions;

#[derive(Clone, Debug, Serialize)]
pub struct AngleReport {
    pub theta23: f64,
    pub theta12: f64,
    pub theta13: f64,
    pub junction: Point,
    /// RMS fit residual of gamma1, gamma2, gamma3
    pub residuals: [f64; 3],
}

impl AngleReport {
    pub fn angles(&self) -> [f64; 3] {
        [self.theta23, self.theta12, self.theta13]
    }

    pub fn max_deviation(&self, expected: [f64; 3]) -> f64 {
        self.angles().iter().zip(expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Equilibrium angles `(theta23, theta12, theta13)` in degrees from the
/// force triangle with sides `(sigma23, sigma12, sigma13)`: each angle is the
/// supplement of the interior angle opposite its tension.
pub fn theoretical_angles(s: &SurfaceTensions) -> Result<[f64; 3]> {
    let [a, b, c] = s
        .as_ternary()
        .ok_or_else(|| Error::NoJunction("angles are defined for three phases".into()))?;
    if a >= b + c || b >= a + c || c >= a + b {
        return Err(Error::NoJunction(format!(
            "tensions ({a}, {b}, {c}) violate the triangle inequality"
        )));
    }
    let interior = |opp: f64, x: f64, y: f64| ((x * x + y * y - opp * opp) / (2.0 * x * y)).clamp(-1.0, 1.0).acos();
    let t23 = (std::f64::consts::PI - interior(a, b, c)).to_degrees();
    let t12 = (std::f64::consts::PI - interior(b, a, c)).to_degrees();
    // the supplements sum to a full turn; t23 + t12 > 180, so the
    // subtraction and the closing sum are exact
    let t13 = 360.0 - (t23 + t12);
    Ok([t23, t12, t13])
}

#[derive(Clone, Copy, Debug)]
pub struct LineFit {
    pub point: Point,
    pub dir: Point,
    pub residual: f64,
}

/// Total least squares line through `pts`.
pub fn fit_line(pts: &[Point]) -> Result<LineFit> {
    if pts.len() < 2 {
        return Err(Error::Fit("need at least two points for a line".into()));
    }
    let n = pts.len() as f64;
    let cx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = pts.iter().map(|p| p[1]).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in pts {
        let (dx, dy) = (p[0] - cx, p[1] - cy);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx + syy == 0.0 {
        return Err(Error::Fit("coincident points".into()));
    }
    // principal axis of the scatter matrix
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let dir = [theta.cos(), theta.sin()];
    let residual = (pts
        .iter()
        .map(|p| ((p[0] - cx) * dir[1] - (p[1] - cy) * dir[0]).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(LineFit {
        point: [cx, cy],
        dir,
        residual,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct CircleFit {
    pub center: Point,
    pub radius: f64,
    pub residual: f64,
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(a);
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if d.abs() <= 1e-14 * scale.powi(3) {
        return None;
    }
    let mut x = [0.0; 3];
    for (k, xk) in x.iter_mut().enumerate() {
        let mut m = a;
        for r in 0..3 {
            m[r][k] = b[r];
        }
        *xk = det(m) / d;
    }
    Some(x)
}

/// Algebraic circle fit refined by Gauss-Newton on geometric distances.
pub fn fit_circle(pts: &[Point]) -> Result<CircleFit> {
    if pts.len() < 3 {
        return Err(Error::Fit("need at least three points for a circle".into()));
    }
    let n = pts.len() as f64;
    let cx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = pts.iter().map(|p| p[1]).sum::<f64>() / n;
    // x^2 + y^2 + D x + E y + F = 0 in centred coordinates
    let mut a = [[0.0; 3]; 3];
    let mut b = [0.0; 3];
    for p in pts {
        let (x, y) = (p[0] - cx, p[1] - cy);
        let row = [x, y, 1.0];
        let z = -(x * x + y * y);
        for r in 0..3 {
            for c in 0..3 {
                a[r][c] += row[r] * row[c];
            }
            b[r] += row[r] * z;
        }
    }
    let [d, e, f] = solve3(a, b).ok_or_else(|| Error::Fit("collinear points".into()))?;
    let (mut ux, mut uy) = (-0.5 * d, -0.5 * e);
    let r2 = ux * ux + uy * uy - f;
    if !(r2 > 0.0) {
        return Err(Error::Fit("imaginary circle".into()));
    }
    let mut r = r2.sqrt();
    for _ in 0..20 {
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for p in pts {
            let (dx, dy) = (p[0] - cx - ux, p[1] - cy - uy);
            let di = (dx * dx + dy * dy).sqrt().max(1e-300);
            let res = di - r;
            let jrow = [-dx / di, -dy / di, -1.0];
            for i in 0..3 {
                for k in 0..3 {
                    jtj[i][k] += jrow[i] * jrow[k];
                }
                jtr[i] -= jrow[i] * res;
            }
        }
        let Some(step) = solve3(jtj, jtr) else { break };
        ux += step[0];
        uy += step[1];
        r += step[2];
        if step.iter().map(|s| s.abs()).fold(0.0, f64::max) < 1e-14 * (1.0 + r) {
            break;
        }
    }
    let residual = (pts
        .iter()
        .map(|p| (((p[0] - cx - ux).powi(2) + (p[1] - cy - uy).powi(2)).sqrt() - r).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(CircleFit {
        center: [cx + ux, cy + uy],
        radius: r.abs(),
        residual,
    })
}

/// Fitted interface near `j`: a point on the fit closest to `j`, the unit
/// tangent there pointing away from `j`, and the RMS residual.
#[derive(Clone, Copy, Debug)]
struct Ray {
    foot: Point,
    dir: Point,
    residual: f64,
}

/// Circles with radius beyond this multiple of the window are treated as lines.
const MAX_RADIUS_FACTOR: f64 = 50.0;

fn fit_ray(pts: &[Point], j: Point, window: f64) -> Result<Ray> {
    let line = fit_line(pts)?;
    let n = pts.len() as f64;
    let mean = [
        pts.iter().map(|p| p[0]).sum::<f64>() / n,
        pts.iter().map(|p| p[1]).sum::<f64>() / n,
    ];
    let (foot, mut dir, residual) = match fit_circle(pts) {
        Ok(c) if c.radius < MAX_RADIUS_FACTOR * window && c.residual <= line.residual => {
            let (dx, dy) = (j[0] - c.center[0], j[1] - c.center[1]);
            let d = (dx * dx + dy * dy).sqrt();
            if d == 0.0 {
                return Err(Error::Fit("junction at circle centre".into()));
            }
            let foot = [c.center[0] + c.radius * dx / d, c.center[1] + c.radius * dy / d];
            (foot, [-dy / d, dx / d], c.residual)
        }
        _ => {
            let t = (j[0] - line.point[0]) * line.dir[0] + (j[1] - line.point[1]) * line.dir[1];
            let foot = [line.point[0] + t * line.dir[0], line.point[1] + t * line.dir[1]];
            (foot, line.dir, line.residual)
        }
    };
    if (mean[0] - foot[0]) * dir[0] + (mean[1] - foot[1]) * dir[1] < 0.0 {
        dir = [-dir[0], -dir[1]];
    }
    Ok(Ray { foot, dir, residual })
}

fn annulus(c: &Contours, k: usize, j: Point, r_in: f64, r_out: f64) -> Vec<Point> {
    c.points(k)
        .filter(|&p| {
            let d = dist(p, j);
            d >= r_in && d <= r_out
        })
        .collect()
}

/// Least-squares intersection of lines through `foot` along `dir`.
fn intersect(rays: &[Ray]) -> Result<Point> {
    let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for r in rays {
        let [dx, dy] = r.dir;
        let (p11, p12, p22) = (1.0 - dx * dx, -dx * dy, 1.0 - dy * dy);
        a11 += p11;
        a12 += p12;
        a22 += p22;
        b1 += p11 * r.foot[0] + p12 * r.foot[1];
        b2 += p12 * r.foot[0] + p22 * r.foot[1];
    }
    let det = a11 * a22 - a12 * a12;
    if det.abs() < 1e-8 * (a11 + a22).powi(2) {
        return Err(Error::Fit("interfaces are parallel".into()));
    }
    Ok([(a22 * b1 - a12 * b2) / det, (a11 * b2 - a12 * b1) / det])
}

fn endpoints(c: &Contours, k: usize) -> Vec<Point> {
    let mut out = Vec::new();
    for l in c.get(k) {
        if l.closed || l.points.is_empty() {
            continue;
        }
        out.push(l.points[0]);
        out.push(*l.points.last().unwrap());
    }
    out
}

/// Junction of the three interfaces: the closest triple of open contour
/// ends, refined by intersecting the fitted interface tangents.
pub fn locate_junction(c: &Contours) -> Result<Point> {
    for k in 1..=3 {
        if c.get(k).iter().all(|l| l.points.is_empty()) {
            return Err(Error::NoJunction(format!("interface gamma{k} is empty")));
        }
    }
    let ends: Vec<Vec<Point>> = (1..=3).map(|k| endpoints(c, k)).collect();
    if ends.iter().any(|e| e.is_empty()) {
        return Err(Error::NoJunction("an interface has no open end".into()));
    }
    let mut best = (f64::INFINITY, [0.0, 0.0]);
    for a in &ends[0] {
        for b in &ends[1] {
            for e in &ends[2] {
                let spread = dist(*a, *b).max(dist(*a, *e)).max(dist(*b, *e));
                if spread < best.0 {
                    best = (spread, [(a[0] + b[0] + e[0]) / 3.0, (a[1] + b[1] + e[1]) / 3.0]);
                }
            }
        }
    }
    let mut j = best.1;
    // fit window: a fraction of the shortest interface branch reaching out from j
    let reach = (1..=3)
        .map(|k| c.points(k).map(|p| dist(p, j)).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min);
    let r_out = 0.5 * reach;
    let r_in = (best.0).max(0.1 * r_out);
    if r_out <= r_in {
        return Ok(j);
    }
    let mut last = None;
    for _ in 0..4 {
        let mut rays = Vec::with_capacity(3);
        for k in 1..=3 {
            let pts = annulus(c, k, j, r_in, r_out);
            if pts.len() < 2 {
                return Ok(last.unwrap_or(j));
            }
            rays.push(fit_ray(&pts, j, r_out)?);
        }
        j = intersect(&rays)?;
        last = Some(j);
    }
    Ok(j)
}

/// Apparent angles at `junction` from contour points at distance
/// `[r_in, r_out]` from it.
pub fn measure_angles(c: &Contours, junction: Point, r_in: f64, r_out: f64) -> Result<AngleReport> {
    if !(r_out > r_in && r_in > 0.0) {
        return Err(Error::Fit(format!("bad annulus [{r_in}, {r_out}]")));
    }
    let mut rays = Vec::with_capacity(3);
    for k in 1..=3 {
        let pts = annulus(c, k, junction, r_in, r_out);
        if pts.len() < 4 {
            return Err(Error::Fit(format!("gamma{k} has {} points in the annulus", pts.len())));
        }
        rays.push(fit_ray(&pts, junction, r_out)?);
    }
    let polar: Vec<f64> = rays.iter().map(|r| r.dir[1].atan2(r.dir[0]).to_degrees()).collect();
    // counterclockwise opening from ray a to ray b
    let ccw = |a: usize, b: usize| (polar[b] - polar[a]).rem_euclid(360.0);
    // opening between gamma_a and gamma_b that does not contain the third ray
    let opening = |a: usize, b: usize, other: usize| {
        let ab = ccw(a, b);
        if ccw(a, other) < ab {
            360.0 - ab
        } else {
            ab
        }
    };
    let theta23 = opening(1, 2, 0);
    let theta12 = opening(0, 1, 2);
    let theta13 = opening(0, 2, 1);
    Ok(AngleReport {
        theta23,
        theta12,
        theta13,
        junction,
        residuals: [rays[0].residual, rays[1].residual, rays[2].residual],
    })
}
