//! Deterministic SVG scatter overlay: eigenvalue cloud, traced boundary
//! witnesses, and the exact curve's zero set as marching-squares segments.

use brownq_core::{curve_eval, CurveResult, OmegaWitness};
use num_complex::Complex64;
use std::fmt::Write as _;

const W: f64 = 720.0;
const H: f64 = 720.0;
const PAD: f64 = 40.0;

pub struct Overlay<'a> {
    pub eigenvalues: &'a [Complex64],
    pub witnesses: &'a [OmegaWitness],
    pub curve: Option<&'a CurveResult>,
}

fn fmt(v: f64) -> String {
    // fixed formatting keeps re-runs byte-identical
    format!("{v:.3}")
}

impl<'a> Overlay<'a> {
    pub fn render(&self) -> String {
        let mut min = Complex64::new(f64::INFINITY, f64::INFINITY);
        let mut max = Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut grow = |z: &Complex64| {
            min.re = min.re.min(z.re);
            min.im = min.im.min(z.im);
            max.re = max.re.max(z.re);
            max.im = max.im.max(z.im);
        };
        for z in self.eigenvalues {
            grow(z);
        }
        for w in self.witnesses {
            grow(&w.z);
        }
        if !min.re.is_finite() {
            min = Complex64::new(-1.0, -1.0);
            max = Complex64::new(1.0, 1.0);
        }
        let span = ((max.re - min.re).max(max.im - min.im)).max(1e-6) * 1.1;
        let cx = 0.5 * (min.re + max.re);
        let cy = 0.5 * (min.im + max.im);
        let sx = |x: f64| PAD + (x - (cx - span / 2.0)) / span * (W - 2.0 * PAD);
        let sy = |y: f64| H - PAD - (y - (cy - span / 2.0)) / span * (H - 2.0 * PAD);

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
        );
        let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);

        if let Some(curve) = self.curve {
            for seg in curve_segments(curve, cx, cy, span) {
                let _ = writeln!(
                    out,
                    r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#808080" stroke-width="1.0"/>"##,
                    fmt(sx(seg.0.re)),
                    fmt(sy(seg.0.im)),
                    fmt(sx(seg.1.re)),
                    fmt(sy(seg.1.im)),
                );
            }
        }
        for z in self.eigenvalues {
            let _ = writeln!(
                out,
                r##"<circle cx="{}" cy="{}" r="1.6" fill="#1f5fbf" fill-opacity="0.55"/>"##,
                fmt(sx(z.re)),
                fmt(sy(z.im)),
            );
        }
        for w in self.witnesses {
            let _ = writeln!(
                out,
                r##"<circle cx="{}" cy="{}" r="0.9" fill="#c03020"/>"##,
                fmt(sx(w.z.re)),
                fmt(sy(w.z.im)),
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Marching-squares segments of the curve zero set inside the plot window.
fn curve_segments(
    curve: &CurveResult,
    cx: f64,
    cy: f64,
    span: f64,
) -> Vec<(Complex64, Complex64)> {
    let n = 160usize;
    let lo_x = cx - span / 2.0;
    let lo_y = cy - span / 2.0;
    let step = span / (n - 1) as f64;
    let mut vals = vec![vec![0.0f64; n]; n];
    for (j, row) in vals.iter_mut().enumerate() {
        for (i, v) in row.iter_mut().enumerate() {
            let z = Complex64::new(lo_x + i as f64 * step, lo_y + j as f64 * step);
            *v = curve_eval(curve, z).unwrap_or(f64::NAN);
        }
    }
    let mut segs = Vec::new();
    let interp = |a: f64, fa: f64, b: f64, fb: f64| a + (0.0 - fa) / (fb - fa) * (b - a);
    for j in 0..n - 1 {
        for i in 0..n - 1 {
            let x0 = lo_x + i as f64 * step;
            let y0 = lo_y + j as f64 * step;
            let (x1, y1) = (x0 + step, y0 + step);
            let f00 = vals[j][i];
            let f10 = vals[j][i + 1];
            let f01 = vals[j + 1][i];
            let f11 = vals[j + 1][i + 1];
            if !(f00.is_finite() && f10.is_finite() && f01.is_finite() && f11.is_finite()) {
                continue;
            }
            let mut pts: Vec<Complex64> = Vec::with_capacity(4);
            if (f00 > 0.0) != (f10 > 0.0) {
                pts.push(Complex64::new(interp(x0, f00, x1, f10), y0));
            }
            if (f01 > 0.0) != (f11 > 0.0) {
                pts.push(Complex64::new(interp(x0, f01, x1, f11), y1));
            }
            if (f00 > 0.0) != (f01 > 0.0) {
                pts.push(Complex64::new(x0, interp(y0, f00, y1, f01)));
            }
            if (f10 > 0.0) != (f11 > 0.0) {
                pts.push(Complex64::new(x1, interp(y0, f10, y1, f11)));
            }
            if pts.len() >= 2 {
                segs.push((pts[0], pts[1]));
                if pts.len() == 4 {
                    segs.push((pts[2], pts[3]));
                }
            }
        }
    }
    segs
}
