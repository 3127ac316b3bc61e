//! SVG pictures of the disk: chambers shaded by sign vector, walls, boundary arcs in bold
//! and dashed horocycles.

use std::fmt::Write;

use crate::disk::{sign_vector_at, Chamber, Wall};

/// Side length of the image in pixels.
pub const SIZE: f64 = 600.0;
/// Shading raster, cells per side.
const RASTER: usize = 120;

fn px(x: f64) -> f64 {
    SIZE / 2.0 * (1.0 + 0.95 * x)
}

fn py(y: f64) -> f64 {
    SIZE / 2.0 * (1.0 - 0.95 * y)
}

fn colour(k: usize) -> String {
    // golden-angle hues keep neighbouring indices apart
    let hue = (k as f64 * 137.507_764) % 360.0;
    format!("hsl({hue:.1},65%,72%)")
}

fn boundary_point(theta: f64) -> (f64, f64) {
    (px(theta.cos()), py(theta.sin()))
}

/// Renders the decomposition. `horocycles` are polylines in disk coordinates.
pub fn render(walls: &[Wall], chambers: &[Chamber], horocycles: &[Vec<(f64, f64)>]) -> String {
    let mut s = String::new();
    let r = SIZE / 2.0 * 0.95;
    let c = SIZE / 2.0;
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#).unwrap();
    writeln!(s, r#"<defs><clipPath id="disk"><circle cx="{c}" cy="{c}" r="{r}"/></clipPath></defs>"#).unwrap();
    writeln!(s, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#).unwrap();

    writeln!(s, r#"<g clip-path="url(#disk)" shape-rendering="crispEdges">"#).unwrap();
    let cell = 2.0 / RASTER as f64;
    for i in 0..RASTER {
        for j in 0..RASTER {
            let x = -1.0 + (i as f64 + 0.5) * cell;
            let y = -1.0 + (j as f64 + 0.5) * cell;
            if x * x + y * y >= 1.0 + 2.0 * cell {
                continue;
            }
            let signs = sign_vector_at(walls, x, y);
            let Some(k) = chambers.iter().position(|ch| ch.signs == signs) else {
                continue;
            };
            let (x0, y0) = (px(x - cell / 2.0), py(y + cell / 2.0));
            let w = px(x + cell / 2.0) - x0;
            writeln!(s, r#"<rect x="{x0:.3}" y="{y0:.3}" width="{:.3}" height="{:.3}" fill="{}"/>"#, w + 0.3, w + 0.3, colour(k)).unwrap();
        }
    }
    writeln!(s, "</g>").unwrap();

    writeln!(s, r#"<circle cx="{c}" cy="{c}" r="{r}" fill="none" stroke="black" stroke-width="1"/>"#).unwrap();
    for w in walls {
        if let Some([a, b]) = w.endpoints {
            writeln!(s, r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black" stroke-width="1.5"/>"#, px(a.0), py(a.1), px(b.0), py(b.1)).unwrap();
        }
    }
    for (k, ch) in chambers.iter().enumerate() {
        for &(t0, t1) in &ch.arcs {
            let (x0, y0) = boundary_point(t0);
            let (x1, y1) = boundary_point(t1);
            let large = if t1 - t0 > std::f64::consts::PI { 1 } else { 0 };
            if t1 - t0 >= std::f64::consts::TAU - 1e-12 {
                writeln!(s, r#"<circle cx="{c}" cy="{c}" r="{r}" fill="none" stroke="{}" stroke-width="6"/>"#, colour(k)).unwrap();
            } else {
                // y is flipped, so counterclockwise in the disk is sweep-flag 0
                writeln!(s, r#"<path d="M {x0:.3} {y0:.3} A {r} {r} 0 {large} 0 {x1:.3} {y1:.3}" fill="none" stroke="{}" stroke-width="6"/>"#, colour(k)).unwrap();
            }
        }
    }
    for h in horocycles {
        let pts: Vec<String> = h.iter().map(|&(x, y)| format!("{:.3},{:.3}", px(x), py(y))).collect();
        writeln!(s, r#"<polyline points="{}" fill="none" stroke="black" stroke-width="1.2" stroke-dasharray="5,4"/>"#, pts.join(" ")).unwrap();
    }
    s.push_str("</svg>\n");
    s
}
