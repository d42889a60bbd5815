//! SVG drawing of rank-2 (`n = 3`) MV-polytopes in the plane of the root
//! system, with the simple roots at 120 degrees.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::kostant::Coweight;
use crate::polytope::MvPolytope;

#[derive(Clone, Debug)]
pub struct SvgOptions {
    /// Pixels per unit of coweight.
    pub scale: f64,
    pub labels: bool,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            scale: 40.0,
            labels: true,
        }
    }
}

/// Plane coordinates of `(x_1, x_2, x_3)`: `sum x_k u_k` with unit vectors
/// `u_k` at 90, 210 and 330 degrees. Adding a multiple of `(1,1,1)` does not
/// move the point.
pub fn project(x: &Coweight) -> (f64, f64) {
    let s = 3f64.sqrt() / 2.0;
    let u = [(0.0, 1.0), (-s, -0.5), (s, -0.5)];
    x.0.iter()
        .zip(u)
        .fold((0.0, 0.0), |(a, b), (&c, (ux, uy))| {
            (a + c as f64 * ux, b + c as f64 * uy)
        })
}

/// Vertices in counterclockwise order around their centroid.
fn hull_order(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let k = points.len() as f64;
    let cx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let cy = points.iter().map(|p| p.1).sum::<f64>() / k;
    let mut out = points.to_vec();
    out.sort_by(|a, b| {
        let ta = (a.1 - cy).atan2(a.0 - cx);
        let tb = (b.1 - cy).atan2(b.0 - cx);
        ta.total_cmp(&tb)
    });
    out
}

pub fn render(poly: &MvPolytope, opts: &SvgOptions) -> Result<String> {
    if poly.n != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: poly.n,
        });
    }
    let pts: Vec<(f64, f64)> = poly.vertices.iter().map(project).collect();
    let ordered = hull_order(&pts);
    let margin = 2.0 * opts.scale;
    let xs = pts.iter().map(|p| p.0 * opts.scale);
    let ys = pts.iter().map(|p| -p.1 * opts.scale);
    let (minx, maxx) = xs.fold((f64::MAX, f64::MIN), |(a, b), x| (a.min(x), b.max(x)));
    let (miny, maxy) = ys.fold((f64::MAX, f64::MIN), |(a, b), y| (a.min(y), b.max(y)));
    let (w, h) = (maxx - minx + 2.0 * margin, maxy - miny + 2.0 * margin);
    let to_screen =
        |p: &(f64, f64)| (p.0 * opts.scale - minx + margin, -p.1 * opts.scale - miny + margin);

    let mut s = String::new();
    writeln!(
        s,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.3} {h:.3}">"##
    )
    .unwrap();
    let path: Vec<String> = ordered
        .iter()
        .map(|p| {
            let (x, y) = to_screen(p);
            format!("{x:.3},{y:.3}")
        })
        .collect();
    writeln!(
        s,
        r##"  <polygon points="{}" fill="#dde6f5" stroke="#1d3557" stroke-width="2"/>"##,
        path.join(" ")
    )
    .unwrap();
    for (v, p) in poly.vertices.iter().zip(&pts) {
        let (x, y) = to_screen(p);
        writeln!(s, r##"  <circle cx="{x:.3}" cy="{y:.3}" r="4" fill="#1d3557"/>"##).unwrap();
        if opts.labels {
            writeln!(
                s,
                r##"  <text x="{:.3}" y="{:.3}" font-family="monospace" font-size="12">{v}</text>"##,
                x + 6.0,
                y - 6.0
            )
            .unwrap();
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kostant::KostantPicture;
    use crate::polytope::mv_polytope;

    #[test]
    fn hexagon() {
        let p = KostantPicture::new(3, [(1, 2), (1, 2), (1, 2), (2, 3), (2, 3), (1, 3)]).unwrap();
        let poly = mv_polytope(&p, &Coweight(vec![2, 0, -2])).unwrap();
        assert_eq!(poly.vertices.len(), 6);
        let svg = render(&poly, &SvgOptions::default()).unwrap();
        assert_eq!(svg.matches("<circle").count(), 6);
        assert!(svg.contains("<polygon"));
        assert_eq!(svg, render(&poly, &SvgOptions::default()).unwrap());
    }

    #[test]
    fn projection_ignores_the_diagonal() {
        let a = project(&Coweight(vec![1, 0, -1]));
        let b = project(&Coweight(vec![3, 2, 1]));
        assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
    }

    #[test]
    fn only_rank_two() {
        let poly = mv_polytope(&KostantPicture::empty(4), &Coweight(vec![0; 4])).unwrap();
        assert!(render(&poly, &SvgOptions::default()).is_err());
    }
}
