//! SVG scatter plot of a persistence diagram with the diagonal and the band
//! of lifetimes at or below a cutoff shaded.

use std::fmt::Write;

use crate::persistence::PersistenceDiagram;

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOptions {
    pub size: f64,
    pub title: Option<String>,
    pub point_radius: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self { size: 480.0, title: None, point_radius: 3.0 }
    }
}

/// SVG document of `dgm`. Points above the band `death <= birth + cutoff`
/// are drawn dark, those inside it grey.
pub fn diagram_svg(dgm: &PersistenceDiagram, cutoff: Option<f64>, opts: &RenderOptions) -> String {
    let pts = dgm.sorted_points();
    let (mut lo, mut hi) = pts
        .iter()
        .flat_map(|&(b, d)| [b, d])
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !(lo.is_finite() && hi.is_finite()) {
        (lo, hi) = (0.0, 1.0);
    }
    if let Some(c) = cutoff.filter(|c| c.is_finite()) {
        hi = hi.max(lo + c);
    }
    if hi - lo < 1e-12 {
        hi = lo + 1.0;
    }
    let pad = 0.05 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);
    let margin = 48.0;
    let plot = opts.size - 2.0 * margin;
    let sx = |v: f64| margin + (v - lo) / (hi - lo) * plot;
    let sy = |v: f64| opts.size - margin - (v - lo) / (hi - lo) * plot;

    let mut svg = String::new();
    let s = opts.size;
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{s}" height="{s}" fill="white"/>"#);
    if let Some(c) = cutoff.filter(|c| c.is_finite() && *c > 0.0) {
        // band between the diagonal and death = birth + cutoff, clipped to the frame
        let poly = [(lo, lo), (hi, hi), (hi - c, hi), (lo, lo + c)]
            .iter()
            .map(|&(b, d)| format!("{:.2},{:.2}", sx(b), sy(d.min(hi))))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(svg, r##"<polygon class="cutoff-band" points="{poly}" fill="#f4b6b6" fill-opacity="0.6"/>"##);
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{margin}" y="{margin}" width="{plot}" height="{plot}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<line class="diagonal" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-dasharray="4 3"/>"#,
        sx(lo),
        sy(lo),
        sx(hi),
        sy(hi)
    );
    for &(b, d) in &pts {
        let above = cutoff.map_or(true, |c| d - b > c);
        let fill = if above { "#1f3b73" } else { "#8c8c8c" };
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{}" fill="{fill}"/>"#,
            sx(b),
            sy(d),
            opts.point_radius
        );
    }
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">birth</text>"#, s / 2.0, s - 12.0);
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">death</text>"#,
        s / 2.0,
        s / 2.0
    );
    for (v, anchor) in [(lo, "start"), (hi, "end")] {
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{}" text-anchor="{anchor}">{v:.3}</text>"#, sx(v), s - margin + 16.0);
    }
    if let Some(title) = &opts.title {
        let escaped = title.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;");
        let _ = writeln!(svg, r#"<text x="{}" y="28" text-anchor="middle" font-size="14">{escaped}</text>"#, s / 2.0);
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persistence::sublevel_persistence;
    use crate::series::TimeSeries;

    #[test]
    fn draws_points_band_and_diagonal() {
        let s = TimeSeries::from_values(vec![2.0, 0.0, 3.0, 1.0, 4.0, 0.5, 0.7, -1.0]).unwrap();
        let dgm = sublevel_persistence(&s).unwrap();
        let svg = diagram_svg(&dgm, Some(1.0), &RenderOptions { title: Some("a < b".into()), ..Default::default() });
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<circle").count(), dgm.len());
        assert!(svg.contains("cutoff-band"));
        assert!(svg.contains("class=\"diagonal\""));
        assert!(svg.contains("a &lt; b"));
        assert!(!diagram_svg(&dgm, None, &RenderOptions::default()).contains("cutoff-band"));
    }

    #[test]
    fn empty_diagram_still_renders() {
        let s = TimeSeries::from_values(vec![1.0, 2.0, 3.0]).unwrap();
        let svg = diagram_svg(&sublevel_persistence(&s).unwrap(), Some(0.5), &RenderOptions::default());
        assert!(svg.contains("</svg>"));
        assert!(!svg.contains("NaN"));
    }
}
