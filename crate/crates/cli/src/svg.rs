//! Deterministic SVG rendering of plane staircase polyhedra.

use std::fmt::Write as _;

use charpoly::polyhedron::Q;
use num_traits::ToPrimitive;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 56.0;

/// A region conv(vertices) + R²₊ to draw, with an optional highlighted sub-staircase.
pub struct Figure {
    pub title: String,
    pub axes: [String; 2],
    /// Staircase vertices sorted by first coordinate.
    pub vertices: Vec<(Q, Q)>,
    /// Vertices of the shaded region (a suffix of the staircase).
    pub shaded: Vec<(Q, Q)>,
    /// Labeled points drawn as dots.
    pub points: Vec<((Q, Q), String)>,
    /// Extra point marked with a cross.
    pub marker: Option<((Q, Q), String)>,
}

fn f(x: &Q) -> f64 {
    x.to_f64().unwrap_or(0.0)
}

struct Frame {
    x0: f64,
    y0: f64,
    scale: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) * self.scale
    }

    fn py(&self, y: f64) -> f64 {
        SIZE - MARGIN - (y - self.y0) * self.scale
    }
}

fn region_path(fr: &Frame, pts: &[(Q, Q)], xmax: f64, ymax: f64) -> String {
    let mut d = String::new();
    let first = &pts[0];
    write!(d, "M {:.2} {:.2}", fr.px(f(&first.0)), fr.py(ymax)).unwrap();
    for (x, y) in pts {
        write!(d, " L {:.2} {:.2}", fr.px(f(x)), fr.py(f(y))).unwrap();
    }
    let last = &pts[pts.len() - 1];
    write!(d, " L {:.2} {:.2} L {:.2} {:.2} Z", fr.px(xmax), fr.py(f(&last.1)), fr.px(xmax), fr.py(ymax)).unwrap();
    d
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders the figure; identical input gives identical bytes.
pub fn render(fig: &Figure) -> Result<String, String> {
    if fig.vertices.is_empty() {
        return Err("nothing to plot".into());
    }
    let all = fig.vertices.iter().chain(fig.points.iter().map(|(y, _)| y));
    let mut xs: Vec<f64> = all.clone().map(|v| f(&v.0)).collect();
    let mut ys: Vec<f64> = all.map(|v| f(&v.1)).collect();
    if let Some(((mx, my), _)) = &fig.marker {
        xs.push(f(mx));
        ys.push(f(my));
    }
    let x0 = xs.iter().cloned().fold(0.0, f64::min);
    let y0 = ys.iter().cloned().fold(0.0, f64::min);
    let span = xs.iter().map(|x| x - x0).chain(ys.iter().map(|y| y - y0)).fold(1.0, f64::max) * 1.25;
    let fr = Frame { x0, y0, scale: (SIZE - 2.0 * MARGIN) / span };
    let (xmax, ymax) = (x0 + span, y0 + span);

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#).unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(s, r#"<text x="{MARGIN}" y="24" font-family="monospace" font-size="13">{}</text>"#, escape(&fig.title)).unwrap();
    // axes through the origin of the data
    let (ox, oy) = (fr.px(0.0), fr.py(0.0));
    writeln!(s, r#"<line x1="{:.2}" y1="{oy:.2}" x2="{:.2}" y2="{oy:.2}" stroke="black"/>"#, fr.px(x0), fr.px(xmax)).unwrap();
    writeln!(s, r#"<line x1="{ox:.2}" y1="{:.2}" x2="{ox:.2}" y2="{:.2}" stroke="black"/>"#, fr.py(y0), fr.py(ymax)).unwrap();
    writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="12">{}</text>"#, fr.px(xmax) - 24.0, oy + 16.0, escape(&fig.axes[0])).unwrap();
    writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="12">{}</text>"#, ox + 6.0, fr.py(ymax) + 12.0, escape(&fig.axes[1])).unwrap();

    writeln!(s, r##"<path d="{}" fill="#dde8f5" stroke="#1f4e8c" stroke-width="1.5"/>"##, region_path(&fr, &fig.vertices, xmax, ymax)).unwrap();
    if !fig.shaded.is_empty() {
        writeln!(s, r##"<path d="{}" fill="#8fb3e0" fill-opacity="0.6" stroke="none"/>"##, region_path(&fr, &fig.shaded, xmax, ymax)).unwrap();
    }
    for ((x, y), label) in &fig.points {
        let (cx, cy) = (fr.px(f(x)), fr.py(f(y)));
        writeln!(s, r##"<circle cx="{cx:.2}" cy="{cy:.2}" r="3.5" fill="#1f4e8c"/>"##).unwrap();
        writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="11">{}</text>"#, cx + 6.0, cy - 6.0, escape(label)).unwrap();
    }
    if let Some(((mx, my), label)) = &fig.marker {
        let (cx, cy) = (fr.px(f(mx)), fr.py(f(my)));
        writeln!(
            s,
            r##"<path d="M {:.2} {:.2} L {:.2} {:.2} M {:.2} {:.2} L {:.2} {:.2}" stroke="#b22222" stroke-width="2"/>"##,
            cx - 5.0,
            cy - 5.0,
            cx + 5.0,
            cy + 5.0,
            cx - 5.0,
            cy + 5.0,
            cx + 5.0,
            cy - 5.0
        )
        .unwrap();
        writeln!(s, r##"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="11" fill="#b22222">{}</text>"##, cx + 7.0, cy + 14.0, escape(label)).unwrap();
    }
    s.push_str("</svg>\n");
    Ok(s)
}
