//! Static SVG plots: eigenvalues on the complex plane with the unit circle
//! dashed, and phase-map heat maps.

use std::fmt::Write;

use qwalk_core::C64;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 40.0;

fn header(out: &mut String, width: f64, height: f64, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="20" text-anchor="middle">{}</text>"#, width / 2.0, escape(title));
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Scatter of `points` in the complex plane. The view always contains the
/// unit circle, drawn dashed.
pub fn eigenvalue_plot(points: &[C64], title: &str) -> String {
    let extent = points.iter().map(|z| z.re.abs().max(z.im.abs())).filter(|v| v.is_finite()).fold(1.0, f64::max) * 1.15;
    let plot = SIZE - 2.0 * MARGIN;
    let scale = plot / (2.0 * extent);
    let cx = MARGIN + plot / 2.0;
    let cy = MARGIN + plot / 2.0;
    let mut out = String::new();
    header(&mut out, SIZE, SIZE, title);
    let _ = writeln!(out, r##"<g stroke="#999" stroke-width="0.5">"##);
    let _ = writeln!(out, r#"<line x1="{MARGIN}" y1="{cy:.2}" x2="{:.2}" y2="{cy:.2}"/>"#, SIZE - MARGIN);
    let _ = writeln!(out, r#"<line x1="{cx:.2}" y1="{MARGIN}" x2="{cx:.2}" y2="{:.2}"/>"#, SIZE - MARGIN);
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r##"<circle class="unit-circle" cx="{cx:.2}" cy="{cy:.2}" r="{:.2}" fill="none" stroke="black" stroke-dasharray="6,4"/>"##,
        scale
    );
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}">Re λ</text>"#, SIZE - MARGIN + 4.0, cy + 4.0);
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}">Im λ</text>"#, cx + 4.0, MARGIN - 6.0);
    let _ = writeln!(out, r##"<g fill="#c0392b">"##);
    for z in points.iter().filter(|z| z.re.is_finite() && z.im.is_finite()) {
        let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="2"/>"#, cx + z.re * scale, cy - z.im * scale);
    }
    let _ = writeln!(out, "</g>\n</svg>");
    out
}

/// Heat map of `ratio[i][j]` with rows along x (`axis1`) and columns along y.
pub fn heat_map(axis1: &[f64], axis2: &[f64], ratio: &[Vec<f64>], title: &str) -> String {
    let plot = SIZE - 2.0 * MARGIN;
    let (w, h) = (plot / axis1.len().max(1) as f64, plot / axis2.len().max(1) as f64);
    let mut out = String::new();
    header(&mut out, SIZE, SIZE + 20.0, title);
    for (i, row) in ratio.iter().enumerate() {
        for (j, &r) in row.iter().enumerate() {
            let shade = (255.0 * (1.0 - r.clamp(0.0, 1.0))).round() as u8;
            let _ = writeln!(
                out,
                r##"<rect x="{:.2}" y="{:.2}" width="{w:.2}" height="{h:.2}" fill="rgb(255,{shade},{shade})" stroke="#ccc"><title>θ1={:.4} θ2={:.4} ratio={r:.4}</title></rect>"##,
                MARGIN + i as f64 * w,
                SIZE - MARGIN - (j + 1) as f64 * h,
                axis1[i],
                axis2[j],
            );
        }
    }
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">mean θ1</text>"#, SIZE / 2.0, SIZE - 12.0);
    let _ = writeln!(out, r#"<text x="12" y="{:.2}" transform="rotate(-90 12 {:.2})" text-anchor="middle">θ2</text>"#, SIZE / 2.0, SIZE / 2.0);
    let _ = writeln!(out, "</svg>");
    out
}
