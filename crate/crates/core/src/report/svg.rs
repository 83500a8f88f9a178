//! Planar figures: `Ω` split into its `k` parts next to the fundamental cell
//! colored by translate profile.

use std::fmt::Write;

use crate::geometry::Region;
use crate::scalar::ExactScalar;
use crate::Rational;

use super::{Pipeline, PipelineError, Stage};

const PANEL: f64 = 360.0;
const MARGIN: f64 = 24.0;
const LEGEND_ROW: f64 = 18.0;

struct Frame {
    min: [f64; 2],
    max: [f64; 2],
    scale: f64,
    origin: [f64; 2],
}

impl Frame {
    fn fit(points: &[[f64; 2]], origin: [f64; 2]) -> Self {
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        for p in points {
            for a in 0..2 {
                min[a] = min[a].min(p[a]);
                max[a] = max[a].max(p[a]);
            }
        }
        let extent = (max[0] - min[0]).max(max[1] - min[1]).max(1e-9);
        Self { min, max, scale: PANEL / extent, origin }
    }

    fn px(&self, p: [f64; 2]) -> (f64, f64) {
        (self.origin[0] + (p[0] - self.min[0]) * self.scale, self.origin[1] + (self.max[1] - p[1]) * self.scale)
    }

    fn points_attr(&self, outline: &[[f64; 2]]) -> String {
        outline
            .iter()
            .map(|&p| {
                let (x, y) = self.px(p);
                format!("{x:.3},{y:.3}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn subpath(&self, outline: &[[f64; 2]]) -> String {
        let mut d = String::new();
        for (i, &p) in outline.iter().enumerate() {
            let (x, y) = self.px(p);
            let _ = write!(d, "{}{x:.3},{y:.3} ", if i == 0 { "M" } else { "L" });
        }
        d.push('Z');
        d
    }
}

fn color(index: usize, count: usize, lightness: u32) -> String {
    let hue = (index * 360) / count.max(1);
    format!("hsl({hue},65%,{lightness}%)")
}

fn region_outlines(region: &Region<Rational>) -> Vec<Vec<[Rational; 2]>> {
    match region {
        Region::Boxes(b) => b
            .boxes()
            .iter()
            .map(|bx| {
                let (lo, hi) = (bx.lo(), bx.hi());
                vec![
                    [lo[0].clone(), lo[1].clone()],
                    [hi[0].clone(), lo[1].clone()],
                    [hi[0].clone(), hi[1].clone()],
                    [lo[0].clone(), hi[1].clone()],
                ]
            })
            .collect(),
        Region::Polygon(p) => vec![p.vertices().to_vec()],
    }
}

/// SVG of a planar instance: parts of `Ω` with the lattice points on the
/// left, the cells of the fundamental cell colored by profile on the right.
///
/// Runs the pipeline through the profiles stage if needed.
pub fn render_svg(p: &mut Pipeline) -> Result<String, PipelineError> {
    if p.instance.dimension != 2 {
        return Err(PipelineError::Dimension(p.instance.dimension));
    }
    p.run_until(Stage::Profiles)?;
    let splitting = p.splitting.as_ref().expect("split stage ran");
    let set = p.profile_set.as_ref().expect("profiles stage ran");
    let to_original = |v: &[Rational; 2]| -> [f64; 2] {
        let y = p.map.denormalize_point(&[v[0].clone(), v[1].clone()]);
        [y[0].to_f64_lossy(), y[1].to_f64_lossy()]
    };

    let outlines: Vec<Vec<[f64; 2]>> =
        region_outlines(&p.instance.region).iter().map(|o| o.iter().map(|v| [v[0].to_f64_lossy(), v[1].to_f64_lossy()]).collect()).collect();
    let left = Frame::fit(&outlines.concat(), [MARGIN, MARGIN]);
    let unit: Vec<[f64; 2]> = [[0, 0], [1, 0], [1, 1], [0, 1]]
        .iter()
        .map(|&[x, y]| to_original(&[Rational::from_i64(x), Rational::from_i64(y)]))
        .collect();
    let right = Frame::fit(&unit, [2.0 * MARGIN + PANEL, MARGIN]);

    let k = splitting.k();
    let legend_rows = k + 1;
    let width = 3.0 * MARGIN + 2.0 * PANEL;
    let height = 2.0 * MARGIN + PANEL + LEGEND_ROW * legend_rows as f64 + MARGIN;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{width:.0}" height="{height:.0}" fill="white"/>"#);

    let _ = writeln!(s, r#"<g class="parts">"#);
    for j in 0..k {
        let d: Vec<String> = splitting
            .part_shapes(&p.complex, j)
            .iter()
            .filter_map(|shape| shape.outline_2d())
            .map(|o| left.subpath(&o.iter().map(&to_original).collect::<Vec<_>>()))
            .collect();
        let _ = writeln!(
            s,
            r#"<path class="part" data-part="{j}" fill="{}" fill-opacity="0.8" stroke="none" d="{}"/>"#,
            color(j, k, 60),
            d.join(" ")
        );
    }
    let _ = writeln!(s, "</g>");
    let outline_d: Vec<String> = outlines.iter().map(|o| left.subpath(o)).collect();
    let _ = writeln!(
        s,
        r#"<path class="outline" fill="none" stroke="black" stroke-width="1.5" d="{}"/>"#,
        outline_d.join(" ")
    );

    let _ = writeln!(s, r#"<g class="lattice">"#);
    let (lo, hi) = p.normalized.bounding_box();
    for n0 in lo[0].floor_i64()..=hi[0].ceil_i64() {
        for n1 in lo[1].floor_i64()..=hi[1].ceil_i64() {
            let pt = to_original(&[Rational::from_i64(n0), Rational::from_i64(n1)]);
            if pt[0] < left.min[0] - 1e-12 || pt[0] > left.max[0] + 1e-12 || pt[1] < left.min[1] - 1e-12 || pt[1] > left.max[1] + 1e-12 {
                continue;
            }
            let (x, y) = left.px(pt);
            let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="2.5" fill="black"/>"#);
        }
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r#"<g class="cells">"#);
    let profiles = set.profiles.len();
    for (i, cell) in p.complex.cells().iter().enumerate() {
        let outline: Vec<[f64; 2]> =
            cell.shape.outline_2d().expect("planar cell").iter().map(&to_original).collect();
        let prof = set.cell_profile[i];
        let _ = writeln!(
            s,
            r#"<polygon class="cell" data-cell="{i}" data-profile="{prof}" fill="{}" stroke="white" stroke-width="0.5" points="{}"/>"#,
            color(prof, profiles, 75),
            right.points_attr(&outline)
        );
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r#"<g class="legend" font-family="sans-serif" font-size="12">"#);
    let top = 2.0 * MARGIN + PANEL;
    for j in 0..k {
        let y = top + LEGEND_ROW * j as f64;
        let measure = splitting.part_measure(&p.complex, j);
        let _ = writeln!(
            s,
            r#"<rect x="{MARGIN:.0}" y="{y:.1}" width="12" height="12" fill="{}"/><text x="{:.0}" y="{:.1}">part {} (measure {measure})</text>"#,
            color(j, k, 60),
            MARGIN + 18.0,
            y + 10.0,
            j + 1
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{MARGIN:.0}" y="{:.1}">{} cells, {profiles} translate profiles, level {k}</text>"#,
        top + LEGEND_ROW * k as f64 + 10.0,
        p.complex.len()
    );
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    Ok(s)
}
