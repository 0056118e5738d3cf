//! Sampled region of absolute stability and the Szegő curve, as plain
//! numeric tables for plotting.

use std::fmt::Write as _;

use num_complex::Complex64;

use super::AnalysisError;

/// A rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

/// |R| on a grid plus the |R| = 1 contour as line segments.
#[derive(Debug, Clone)]
pub struct RegionData {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// values[iy][ix] = |R(xs[ix] + i·ys[iy])|.
    pub values: Vec<Vec<f64>>,
    pub boundary: Vec<[(f64, f64); 2]>,
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &k| acc * z + k)
}

/// Samples |R| on a `resolution`×`resolution` grid over `window` (in f64)
/// and traces the |R| = 1 contour by marching squares.
pub fn region_samples(coeffs: &[f64], window: Window, resolution: usize) -> Result<RegionData, AnalysisError> {
    if resolution == 0 {
        return Err(AnalysisError::InvalidArgument("resolution must be positive".into()));
    }
    let xs = axis(window.xmin, window.xmax, resolution);
    let ys = axis(window.ymin, window.ymax, resolution);
    let values: Vec<Vec<f64>> =
        ys.iter().map(|&y| xs.iter().map(|&x| horner(coeffs, Complex64::new(x, y)).norm()).collect()).collect();
    let mut boundary = Vec::new();
    for iy in 0..ys.len().saturating_sub(1) {
        for ix in 0..xs.len().saturating_sub(1) {
            let corners = [(ix, iy), (ix + 1, iy), (ix + 1, iy + 1), (ix, iy + 1)];
            let f = |k: usize| values[corners[k].1][corners[k].0] - 1.0;
            let p = |k: usize| (xs[corners[k].0], ys[corners[k].1]);
            let mut pts = Vec::new();
            for e in 0..4 {
                let (a, b) = (e, (e + 1) % 4);
                let (fa, fb) = (f(a), f(b));
                if (fa <= 0.0) != (fb <= 0.0) {
                    let t = fa / (fa - fb);
                    let (pa, pb) = (p(a), p(b));
                    pts.push((pa.0 + t * (pb.0 - pa.0), pa.1 + t * (pb.1 - pa.1)));
                }
            }
            match pts.len() {
                2 => boundary.push([pts[0], pts[1]]),
                4 => {
                    // Saddle: pair edges according to the sign at the centre.
                    let centre = (0..4).map(f).sum::<f64>() / 4.0;
                    if (centre <= 0.0) == (f(0) <= 0.0) {
                        boundary.push([pts[0], pts[3]]);
                        boundary.push([pts[1], pts[2]]);
                    } else {
                        boundary.push([pts[0], pts[1]]);
                        boundary.push([pts[2], pts[3]]);
                    }
                }
                _ => {}
            }
        }
    }
    Ok(RegionData { xs, ys, values, boundary })
}

/// Text form: one `x y |R|` line per grid point, a blank line, then one
/// `x1 y1 x2 y2` line per boundary segment.
pub fn write_region(r: &RegionData) -> String {
    let mut s = String::from("# x y |R(x+iy)|\n");
    for (iy, y) in r.ys.iter().enumerate() {
        for (ix, x) in r.xs.iter().enumerate() {
            let _ = writeln!(s, "{x:.10e} {y:.10e} {:.10e}", r.values[iy][ix]);
        }
    }
    s.push_str("\n# boundary |R| = 1: x1 y1 x2 y2\n");
    for [a, b] in &r.boundary {
        let _ = writeln!(s, "{:.10e} {:.10e} {:.10e} {:.10e}", a.0, a.1, b.0, b.1);
    }
    s
}

/// Radius r ∈ (0, 1] with ln r + 1 − r cos θ = 0, i.e. |z e^{1−z}| = 1 at
/// z = r e^{iθ}. The left side increases in r on (0, 1].
fn szego_radius(theta: f64) -> f64 {
    let g = |r: f64| r.ln() + 1.0 - r * theta.cos();
    if g(1.0) <= 0.0 {
        return 1.0;
    }
    let (mut lo, mut hi) = (1e-300_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Closed polyline of the Szegő curve |z e^{1−z}| = 1 inside the unit disk,
/// scaled by `factor`, with `resolution` segments.
pub fn szego_curve(resolution: usize, factor: f64) -> Result<Vec<(f64, f64)>, AnalysisError> {
    if resolution == 0 {
        return Err(AnalysisError::InvalidArgument("resolution must be positive".into()));
    }
    Ok((0..=resolution)
        .map(|k| {
            let theta = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * k as f64 / resolution as f64;
            let r = szego_radius(theta) * factor;
            (r * theta.cos(), r * theta.sin())
        })
        .collect())
}

/// The negative real point of the curve: −r with ln r + 1 + r = 0.
pub fn szego_leftmost() -> f64 {
    -szego_radius(std::f64::consts::PI)
}

/// Euclidean distance from `p` to the polyline.
pub fn distance_to_polyline(p: (f64, f64), line: &[(f64, f64)]) -> f64 {
    line.windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let (dx, dy) = (b.0 - a.0, b.1 - a.1);
            let len2 = dx * dx + dy * dy;
            let t = if len2 == 0.0 { 0.0 } else { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0) };
            let (qx, qy) = (a.0 + t * dx, a.1 + t * dy);
            ((p.0 - qx).powi(2) + (p.1 - qy).powi(2)).sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}
