//! Artifact encoding: CSV tables and the layered operating-diagram SVG.
//! Numeric CSV fields carry 17 significant digits so artifacts round-trip
//! bit-faithfully.

use crate::diagrams::{
    BifurcationDiagram1D, DiagramCurve, OperatingDiagram, SpecialPoint,
};
use crate::svg::SvgCanvas;

/// Full-precision float formatting (17 significant digits).
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Grid cells as `S_in,D,region` rows; boundary and unresolved cells are
/// labeled as such.
pub fn grid_csv(diag: &OperatingDiagram) -> String {
    let mut out = String::from("S_in,D,region\n");
    for cell in &diag.cells {
        let label = match cell.tag {
            Some(tag) => tag.to_string(),
            None if cell.boundary => "boundary".to_string(),
            None => "unresolved".to_string(),
        };
        out.push_str(&format!(
            "{},{},{label}\n",
            fmt_float(cell.s_in),
            fmt_float(cell.d)
        ));
    }
    out
}

/// Curve polylines as `curve,S_in,D` rows.
pub fn curves_csv(curves: &[DiagramCurve]) -> String {
    let mut out = String::from("curve,S_in,D\n");
    for c in curves {
        for (s_in, d) in &c.points {
            out.push_str(&format!(
                "{},{},{}\n",
                c.id.label(),
                fmt_float(*s_in),
                fmt_float(*d)
            ));
        }
    }
    out
}

/// Special points as `kind,S_in,D,flag` rows.
pub fn special_points_csv(points: &[SpecialPoint]) -> String {
    let mut out = String::from("kind,S_in,D,flag\n");
    for pt in points {
        let flag = if pt.uncertain { "uncertain" } else { "ok" };
        out.push_str(&format!(
            "{},{},{},{flag}\n",
            pt.kind,
            fmt_float(pt.s_in),
            fmt_float(pt.d)
        ));
    }
    out
}

/// Branch samples as `branch,kind,S_in,S,u,v,stable` rows.
pub fn branches_csv(bd: &BifurcationDiagram1D) -> String {
    let mut out = String::from("branch,kind,S_in,S,u,v,stable\n");
    for (idx, branch) in bd.branches.iter().enumerate() {
        for sample in branch {
            let stable = match sample.stable {
                Some(true) => "S",
                Some(false) => "U",
                None => "marginal",
            };
            out.push_str(&format!(
                "{idx},{},{},{},{},{},{stable}\n",
                sample.kind.name(),
                fmt_float(sample.s_in),
                fmt_float(sample.s_star),
                fmt_float(sample.state.u),
                fmt_float(sample.state.v)
            ));
        }
    }
    out
}

/// Layered SVG: region fill, curve strokes, special-point markers, axes.
/// `meta`, when given, is embedded as a leading comment.
pub fn diagram_svg(diag: &OperatingDiagram, meta: Option<&str>) -> String {
    let (width, height) = (860.0, 640.0);
    let (ml, mr, mt, mb) = (75.0, 25.0, 25.0, 60.0);
    let plot_w = width - ml - mr;
    let plot_h = height - mt - mb;
    let (x0, x1) = diag.s_in_range;
    let (y0, y1) = diag.d_range;
    let px = |s: f64| ml + (s - x0) / (x1 - x0) * plot_w;
    let py = |d: f64| mt + plot_h - (d - y0) / (y1 - y0) * plot_h;

    let mut svg = SvgCanvas::new(width, height);
    svg.comment("build: flocstat operating diagram");
    if let Some(meta) = meta {
        svg.comment(meta);
    }
    svg.rect(0.0, 0.0, width, height, "white");

    // region fill
    let cw = plot_w / diag.nx as f64;
    let ch = plot_h / diag.ny as f64;
    for cell in &diag.cells {
        let fill = match cell.tag {
            Some(tag) => tag.color(),
            None => "lightgray",
        };
        svg.rect(
            px(cell.s_in) - cw / 2.0,
            py(cell.d) - ch / 2.0,
            cw + 0.5,
            ch + 0.5,
            fill,
        );
    }

    // curve overlay
    for c in &diag.curves {
        let pts: Vec<(f64, f64)> = c
            .points
            .iter()
            .filter(|(s, d)| *s >= x0 && *s <= x1 && *d >= y0 && *d <= y1)
            .map(|(s, d)| (px(*s), py(*d)))
            .collect();
        svg.polyline(&pts, c.id.color(), 1.6);
        if let Some((s, d)) = c
            .points
            .iter()
            .copied()
            .find(|(s, d)| *s >= x0 && *s <= x1 && *d >= y0 && *d <= y1)
        {
            svg.text(px(s) + 4.0, py(d) - 4.0, 11.0, "start", c.id.label());
        }
    }

    // special points
    for pt in &diag.special_points {
        if pt.s_in < x0 || pt.s_in > x1 || pt.d < y0 || pt.d > y1 {
            continue;
        }
        let fill = if pt.uncertain { "orange" } else { "black" };
        svg.circle(px(pt.s_in), py(pt.d).min(mt + plot_h - 2.0), 4.0, fill);
        svg.text(
            px(pt.s_in) + 6.0,
            py(pt.d).min(mt + plot_h - 2.0) - 5.0,
            11.0,
            "start",
            &pt.kind.to_string(),
        );
    }

    // axes
    svg.frame(ml, mt, plot_w, plot_h);
    let ticks = 6;
    for i in 0..=ticks {
        let fx = x0 + (x1 - x0) * i as f64 / ticks as f64;
        let fy = y0 + (y1 - y0) * i as f64 / ticks as f64;
        svg.line(px(fx), mt + plot_h, px(fx), mt + plot_h + 5.0, "black");
        svg.text(px(fx), mt + plot_h + 18.0, 11.0, "middle", &format!("{fx:.3}"));
        svg.line(ml - 5.0, py(fy), ml, py(fy), "black");
        svg.text(ml - 8.0, py(fy) + 4.0, 11.0, "end", &format!("{fy:.3}"));
    }
    svg.text(ml + plot_w / 2.0, height - 18.0, 13.0, "middle", "S_in (g/l)");
    svg.text(16.0, mt + plot_h / 2.0, 13.0, "middle", "D (1/h)");
    svg.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::operating_diagram;
    use crate::model::BioParams;

    #[test]
    fn artifacts_have_expected_shape() {
        let p = BioParams::line1();
        let diag = operating_diagram((0.0, 8.0), (0.0, 5.0), (8, 8), &p).unwrap();
        let grid = grid_csv(&diag);
        assert!(grid.starts_with("S_in,D,region\n"));
        assert_eq!(grid.lines().count(), 65);
        let curves = curves_csv(&diag.curves);
        assert!(curves.starts_with("curve,S_in,D\n"));
        let svg = diagram_svg(&diag, Some("test"));
        assert!(svg.starts_with("<?xml"));
        assert!(svg.contains("</svg>"));
        assert!(svg.contains("Gamma_u"));
    }

    #[test]
    fn float_formatting_is_full_precision() {
        let x = 0.123_456_789_012_345_67;
        let s = fmt_float(x);
        assert_eq!(s.parse::<f64>().unwrap(), x);
    }
}
