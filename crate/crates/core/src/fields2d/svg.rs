//! Minimal standalone SVG writer for contour sets.

use super::contour::Contour;

/// Render contours as an SVG document. Levels are colored on a simple
/// blue–red ramp; the viewBox is the data bounding box.
pub fn contours_to_svg(contours: &[Contour], width_px: u32) -> String {
    if contours.is_empty() {
        return "<svg xmlns=\"http://www.w3.org/2000/svg\"/>".to_string();
    }
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    let (mut lv0, mut lv1) = (f64::MAX, f64::MIN);
    for c in contours {
        lv0 = lv0.min(c.level);
        lv1 = lv1.max(c.level);
        for p in &c.points {
            x0 = x0.min(p.0);
            y0 = y0.min(p.1);
            x1 = x1.max(p.0);
            y1 = y1.max(p.1);
        }
    }
    let w = (x1 - x0).max(1e-12);
    let h = (y1 - y0).max(1e-12);
    let stroke = w.min(h) / 400.0;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width_px}\" height=\"{}\" viewBox=\"{x0} {} {w} {h}\">\n",
        (width_px as f64 * h / w).round() as u32,
        -y1,
    ));
    out.push_str("<g fill=\"none\">\n");
    for c in contours {
        let t = if lv1 > lv0 {
            (c.level - lv0) / (lv1 - lv0)
        } else {
            0.5
        };
        let r = (255.0 * t) as u8;
        let b = (255.0 * (1.0 - t)) as u8;
        let mut d = String::new();
        for (k, p) in c.points.iter().enumerate() {
            // SVG's y axis points down; flip it
            d.push_str(&format!("{}{:.5},{:.5} ", if k == 0 { "M" } else { "L" }, p.0, -p.1));
        }
        if c.closed {
            d.push('Z');
        }
        out.push_str(&format!(
            "<path d=\"{d}\" stroke=\"rgb({r},64,{b})\" stroke-width=\"{stroke:.5}\"/>\n"
        ));
    }
    out.push_str("</g>\n</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_a_polyline() {
        let c = Contour {
            level: 1.0,
            points: vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)],
            closed: false,
        };
        let svg = contours_to_svg(&[c], 400);
        assert!(svg.contains("<path"));
        assert!(svg.starts_with("<svg"));
    }
}
