//! Phase-portrait rendering: the foliation of the reduced quarter-sphere in
//! the `(r, z)` chart (mirrored through `r -> -r` per the covering picture),
//! leaf curves of the family `e^-2 z^2 = (C r^2 - 1)(r^2 - 1) + e`, the
//! highlighted separatrix, the five singular markers, the dashed boundary
//! locus `z = r - 1`, and an inset with the `(r, rho)` trace at `z = 0`
//! where the hyperbolic point lives.

use std::fmt::Write as _;

use serde::Serialize;

/// Pixel mapping data, also emitted in the JSON document so consumers can
/// invert the drawing transform exactly.
#[derive(Clone, Debug, Serialize)]
pub struct Transform {
    pub margin: f64,
    pub plot_w: f64,
    pub plot_h: f64,
    pub rmax: f64,
    pub zmax: f64,
}

impl Transform {
    pub fn x(&self, r: f64) -> f64 {
        self.margin + (r + self.rmax) / (2.0 * self.rmax) * self.plot_w
    }

    pub fn y(&self, z: f64) -> f64 {
        self.margin + (self.zmax - z) / (2.0 * self.zmax) * self.plot_h
    }

    pub fn r_of_x(&self, x: f64) -> f64 {
        (x - self.margin) / self.plot_w * 2.0 * self.rmax - self.rmax
    }

    pub fn z_of_y(&self, y: f64) -> f64 {
        self.zmax - (y - self.margin) / self.plot_h * 2.0 * self.zmax
    }
}

pub struct Portrait {
    pub svg: String,
    pub transform: Transform,
    pub leaf_values: Vec<f64>,
    pub separatrix_samples: Vec<(f64, f64)>,
    /// worst |e^-2 z^2 - (C r^2 - 1)(r^2 - 1) - e| over emitted vertices
    pub max_leaf_residual: f64,
}

pub struct PortraitSpec {
    pub eps: f64,
    pub c_sep: f64,
    pub leaves: usize,
    pub size: u32,
    /// `(z, r, rho)` triples of the singular points (five for the model)
    pub markers: Vec<[f64; 3]>,
}

const SAMPLES: usize = 800;

fn leaf_value(eps: f64, c: f64, r: f64) -> f64 {
    (c * r * r - 1.0) * (r * r - 1.0) + eps
}

/// Admissible radial positions of the leaf with parameter `c`: the leaf
/// height must be a real `z` on the sphere (`rho^2 >= 0`).
fn leaf_z(eps: f64, c: f64, r: f64) -> Option<f64> {
    let v = leaf_value(eps, c, r);
    if v < 0.0 {
        return None;
    }
    if v > 1.0 + eps - r * r {
        return None;
    }
    Some(eps * v.sqrt())
}

pub fn render(spec: &PortraitSpec) -> Portrait {
    let eps = spec.eps;
    let rmax = (1.0 + eps).sqrt() * 1.04;
    let zmax = eps * (1.0 + eps).sqrt() * 1.18;
    let margin = 42.0;
    let w = spec.size as f64;
    let plot_w = w - 2.0 * margin;
    let plot_h = 0.52 * plot_w;
    let inset_h = 0.22 * plot_w;
    let inset_gap = 46.0;
    let height = 2.0 * margin + plot_h + inset_gap + inset_h;
    let t = Transform {
        margin,
        plot_w,
        plot_h,
        rmax,
        zmax,
    };

    let mut body = String::new();
    let mut max_res: f64 = 0.0;

    // outline of the mirrored quarter-sphere: the ellipse r^2 + e^-2 z^2 = 1+e
    {
        let mut d = String::new();
        for k in 0..=256 {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / 256.0;
            let r = (1.0 + eps).sqrt() * phi.cos();
            let z = eps * (1.0 + eps).sqrt() * phi.sin();
            let _ = write!(
                d,
                "{}{:.6},{:.6} ",
                if k == 0 { "M" } else { "L" },
                t.x(r),
                t.y(z)
            );
        }
        let _ = writeln!(
            body,
            "  <path class=\"outline\" d=\"{}Z\" fill=\"none\" stroke=\"#444\" stroke-width=\"1.2\"/>",
            d
        );
    }

    // leaf family: half below, half above the separatrix parameter
    let count = spec.leaves.max(12);
    let below = count / 2;
    let above = count - below;
    let mut leaf_values = Vec::new();
    for i in 0..below {
        let f = 0.22 + 0.75 * i as f64 / (below.max(2) - 1) as f64;
        leaf_values.push(spec.c_sep * f);
    }
    for i in 0..above {
        let f = 1.035 + 1.9 * i as f64 / (above.max(2) - 1) as f64;
        leaf_values.push(spec.c_sep * f);
    }
    for &c in &leaf_values {
        let (d, res) = leaf_path(eps, c, &t, None);
        max_res = max_res.max(res);
        let _ = writeln!(
            body,
            "  <path class=\"leaf\" d=\"{}\" fill=\"none\" stroke=\"#7a9acc\" stroke-width=\"0.9\"/>",
            d
        );
    }

    // the separatrix, highlighted
    let mut separatrix_samples = Vec::new();
    let (d, res) = leaf_path(eps, spec.c_sep, &t, Some(&mut separatrix_samples));
    max_res = max_res.max(res);
    let _ = writeln!(
        body,
        "  <path class=\"separatrix\" d=\"{}\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2.2\"/>",
        d
    );

    // boundary locus z = r - 1 (dashed), where it meets the sphere
    {
        let mut d = String::new();
        let mut pen = false;
        for k in 0..=SAMPLES {
            let r = rmax * k as f64 / SAMPLES as f64;
            let z = r - 1.0;
            let inside = z.abs() <= zmax && z * z <= eps * eps * (1.0 + eps - r * r);
            if inside {
                let _ = write!(
                    d,
                    "{}{:.6},{:.6} ",
                    if pen { "L" } else { "M" },
                    t.x(r),
                    t.y(z)
                );
                pen = true;
            } else {
                pen = false;
            }
        }
        if !d.is_empty() {
            let _ = writeln!(
                body,
                "  <path class=\"boundary\" d=\"{}\" fill=\"none\" stroke=\"#2c7a43\" stroke-width=\"1.4\" stroke-dasharray=\"6 4\"/>",
                d
            );
        }
    }

    // singular markers in the (r, z) chart
    for m in &spec.markers {
        let _ = writeln!(
            body,
            "  <circle class=\"singular\" cx=\"{:.6}\" cy=\"{:.6}\" r=\"4\" fill=\"#1a1a1a\"/>",
            t.x(m[1]),
            t.y(m[0])
        );
    }

    // axis labels
    let _ = writeln!(
        body,
        "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"14\" fill=\"#333\">r</text>",
        margin + plot_w + 6.0,
        t.y(0.0) + 4.0
    );
    let _ = writeln!(
        body,
        "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"14\" fill=\"#333\">z</text>",
        t.x(0.0) - 16.0,
        margin - 8.0
    );

    // inset: the (r, rho) trace at z = 0 with the hyperbolic point
    {
        let iy = margin + plot_h + inset_gap;
        let ix = margin;
        let iw = plot_w;
        let ih = inset_h;
        let rho_max = eps * (1.0 + eps).sqrt() * 1.1;
        let px = |r: f64| ix + r / rmax * iw;
        let py = |rho: f64| iy + ih - rho / rho_max * ih;
        let mut d = String::new();
        for k in 0..=SAMPLES {
            let r = (1.0 + eps).sqrt() * k as f64 / SAMPLES as f64;
            let rho = (eps * eps * (1.0 + eps - r * r)).sqrt();
            let _ = write!(
                d,
                "{}{:.6},{:.6} ",
                if k == 0 { "M" } else { "L" },
                px(r),
                py(rho)
            );
        }
        let _ = writeln!(
            body,
            "  <g class=\"inset\">\n    <rect x=\"{:.1}\" y=\"{:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"#999\" stroke-width=\"0.8\"/>\n    <path d=\"{}\" fill=\"none\" stroke=\"#444\" stroke-width=\"1.0\"/>",
            ix,
            iy,
            iw,
            ih,
            d
        );
        // the hyperbolic point at (r0, n0): a cross, not a singular marker
        if let Some(h) = spec
            .markers
            .iter()
            .find(|m| m[2] > 1e-6 && m[0].abs() < 1e-6)
        {
            let (cx, cy) = (px(h[1]), py(h[2]));
            let _ = writeln!(
                body,
                "    <path class=\"inset-hyperbolic\" d=\"M{:.2},{:.2} L{:.2},{:.2} M{:.2},{:.2} L{:.2},{:.2}\" stroke=\"#c0392b\" stroke-width=\"1.6\"/>",
                cx - 5.0, cy - 5.0, cx + 5.0, cy + 5.0, cx - 5.0, cy + 5.0, cx + 5.0, cy - 5.0
            );
        }
        let _ = writeln!(
            body,
            "    <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" fill=\"#333\">rho trace at z = 0</text>\n  </g>",
            ix + 8.0,
            iy + 16.0
        );
    }

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{:.0}\" viewBox=\"0 0 {} {:.0}\">",
        spec.size, height, spec.size, height
    );
    let _ = writeln!(
        svg,
        "  <title>characteristic foliation of the reduced quarter-sphere (eps = {})</title>",
        eps
    );
    svg.push_str(&body);
    svg.push_str("</svg>\n");

    Portrait {
        svg,
        transform: t,
        leaf_values,
        separatrix_samples,
        max_leaf_residual: max_res,
    }
}

/// Four mirrored branches of one leaf as subpaths of one SVG path; returns
/// the path data and the worst leaf-equation residual over its vertices.
fn leaf_path(
    eps: f64,
    c: f64,
    t: &Transform,
    mut samples: Option<&mut Vec<(f64, f64)>>,
) -> (String, f64) {
    let mut d = String::new();
    let mut max_res: f64 = 0.0;
    for (sr, sz) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
        let mut pen = false;
        for k in 0..=SAMPLES {
            let r = t.rmax * k as f64 / SAMPLES as f64;
            match leaf_z(eps, c, r) {
                Some(z) => {
                    let (rr, zz) = (sr * r, sz * z);
                    let res = ((z * z) / (eps * eps) - (c * r * r - 1.0) * (r * r - 1.0) - eps)
                        .abs();
                    max_res = max_res.max(res);
                    if let Some(samples) = samples.as_deref_mut() {
                        if sr > 0.0 && sz > 0.0 {
                            samples.push((rr, zz));
                        }
                    }
                    let _ = write!(
                        d,
                        "{}{:.6},{:.6} ",
                        if pen { "L" } else { "M" },
                        t.x(rr),
                        t.y(zz)
                    );
                    pen = true;
                }
                None => pen = false,
            }
        }
    }
    (d, max_res)
}
