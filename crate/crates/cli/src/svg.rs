//! Filled contour plots of piecewise-linear fields on triangulations,
//! written as standalone SVG with a fixed 12-level scale.

/// Fixed 12-color scale (dark blue to dark red).
const PALETTE: [&str; 12] = [
    "#30123b", "#4458cb", "#3e9bfe", "#18d6cb", "#46f884", "#a2fc3c", "#e1dd37", "#fea130",
    "#ef5a11", "#c42503", "#900c00", "#5a0000",
];

type WeightedPoint = ([f64; 2], f64);

/// Clip a polygon (vertices carrying field values) against the half-space
/// `value >= c` (or `<= c`), interpolating crossing points linearly.
fn clip(poly: &[WeightedPoint], c: f64, keep_ge: bool) -> Vec<WeightedPoint> {
    let inside = |v: f64| if keep_ge { v >= c } else { v <= c };
    let mut out = Vec::with_capacity(poly.len() + 2);
    for i in 0..poly.len() {
        let (p0, v0) = poly[i];
        let (p1, v1) = poly[(i + 1) % poly.len()];
        let in0 = inside(v0);
        let in1 = inside(v1);
        if in0 {
            out.push((p0, v0));
        }
        if in0 != in1 {
            let t = (c - v0) / (v1 - v0);
            let q = [p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1])];
            out.push((q, c));
        }
    }
    out
}

/// Render nodal values on a triangulation as filled contour bands.
///
/// `metadata` is embedded verbatim in an XML comment so artifacts carry
/// their configuration hash.
pub fn render_contours(
    vertices: &[[f64; 2]],
    triangles: &[[usize; 3]],
    values: &[f64],
    metadata: &str,
) -> String {
    assert_eq!(vertices.len(), values.len());
    let (mut vmin, mut vmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in values {
        vmin = vmin.min(v);
        vmax = vmax.max(v);
    }
    let flat = vmax - vmin < 1e-300;
    let (mut xmin, mut xmax, mut ymin, mut ymax) =
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for v in vertices {
        xmin = xmin.min(v[0]);
        xmax = xmax.max(v[0]);
        ymin = ymin.min(v[1]);
        ymax = ymax.max(v[1]);
    }
    let width = 640.0;
    let scale = width / (xmax - xmin).max(1e-12);
    let height = ((ymax - ymin) * scale).max(1.0);
    let map = |p: [f64; 2]| {
        [(p[0] - xmin) * scale, height - (p[1] - ymin) * scale]
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">\n"
    ));
    svg.push_str(&format!("<!-- {metadata} levels={} min={:.6e} max={:.6e} -->\n", PALETTE.len(), vmin, vmax));

    if flat {
        // single-color fill of the whole triangulation
        let mut d = String::new();
        for t in triangles {
            let p: Vec<[f64; 2]> = t.iter().map(|&i| map(vertices[i])).collect();
            d.push_str(&format!(
                "M{:.4},{:.4}L{:.4},{:.4}L{:.4},{:.4}Z",
                p[0][0], p[0][1], p[1][0], p[1][1], p[2][0], p[2][1]
            ));
        }
        svg.push_str(&format!("<path fill=\"{}\" stroke=\"none\" d=\"{}\"/>\n", PALETTE[5], d));
        svg.push_str("</svg>\n");
        return svg;
    }

    let n_bands = PALETTE.len();
    let band_edge =
        |i: usize| vmin + (vmax - vmin) * i as f64 / n_bands as f64;
    for band in 0..n_bands {
        let lo = band_edge(band);
        let hi = band_edge(band + 1);
        let mut d = String::new();
        for t in triangles {
            let poly: Vec<WeightedPoint> =
                t.iter().map(|&i| (vertices[i], values[i])).collect();
            // widen the outer band edges a hair so extreme vertices are kept
            let lo_c = if band == 0 { lo - 1.0 } else { lo };
            let hi_c = if band + 1 == n_bands { hi + 1.0 } else { hi };
            let clipped = clip(&clip(&poly, lo_c, true), hi_c, false);
            if clipped.len() < 3 {
                continue;
            }
            let mut first = true;
            for (pt, _) in &clipped {
                let m = map(*pt);
                d.push_str(&format!("{}{:.4},{:.4}", if first { "M" } else { "L" }, m[0], m[1]));
                first = false;
            }
            d.push('Z');
        }
        if !d.is_empty() {
            svg.push_str(&format!(
                "<path fill=\"{}\" stroke=\"none\" d=\"{}\"/>\n",
                PALETTE[band], d
            ));
        }
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_field_renders_single_path() {
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let triangles = vec![[0usize, 1, 2]];
        let values = vec![1.0, 1.0, 1.0];
        let svg = render_contours(&vertices, &triangles, &values, "meta");
        assert_eq!(svg.matches("<path").count(), 1);
        assert!(svg.contains("meta"));
    }

    #[test]
    fn gradient_field_renders_bands() {
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let triangles = vec![[0usize, 1, 2], [0, 2, 3]];
        let values = vec![0.0, 1.0, 2.0, 1.0];
        let svg = render_contours(&vertices, &triangles, &values, "meta");
        assert!(svg.matches("<path").count() >= 6, "{svg}");
    }
}
