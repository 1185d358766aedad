//! SVG 1.1 output. Documents keep the usual orientation; the y axis is
//! flipped here only.

use std::fmt::Write as _;

use crate::document::TilingDocument;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn is_empty(&self) -> bool {
        !(self.x1 > self.x0 && self.y1 > self.y0)
    }
}

impl std::str::FromStr for Rect {
    type Err = String;

    /// `x0,y0,x1,y1` in document coordinates.
    fn from_str(s: &str) -> Result<Self, String> {
        let v: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
            .collect::<Result<_, _>>()?;
        let [x0, y0, x1, y1] = v[..] else {
            return Err("expected x0,y0,x1,y1".into());
        };
        let r = Rect { x0, y0, x1, y1 };
        if r.is_empty() {
            return Err("empty rectangle".into());
        }
        Ok(r)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOptions {
    /// In document units.
    pub stroke_width: f64,
    /// Visible region; the bounding box of all tiles when absent.
    pub viewbox: Option<Rect>,
    pub label_tiles: bool,
    /// Pixels per document unit.
    pub scale: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            stroke_width: 0.02,
            viewbox: None,
            label_tiles: false,
            scale: 40.0,
        }
    }
}

const FILLS: [&str; 4] = ["#e8eef7", "#f7ece0", "#e6f2e6", "#f2e6ef"];

fn num(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    match s {
        "-0" | "" => "0".into(),
        s => s.into(),
    }
}

fn bounds(doc: &TilingDocument) -> Rect {
    let mut r = Rect {
        x0: f64::INFINITY,
        y0: f64::INFINITY,
        x1: f64::NEG_INFINITY,
        y1: f64::NEG_INFINITY,
    };
    for p in doc.tiles.iter().flat_map(|t| &t.vertices) {
        r.x0 = r.x0.min(p.x);
        r.y0 = r.y0.min(p.y);
        r.x1 = r.x1.max(p.x);
        r.y1 = r.y1.max(p.y);
    }
    if r.is_empty() {
        Rect { x0: 0.0, y0: 0.0, x1: 1.0, y1: 1.0 }
    } else {
        r
    }
}

pub fn render_svg(doc: &TilingDocument, opts: &RenderOptions) -> String {
    let r = opts.viewbox.unwrap_or_else(|| {
        let b = bounds(doc);
        let m = opts.stroke_width.max(0.0);
        Rect {
            x0: b.x0 - m,
            y0: b.y0 - m,
            x1: b.x1 + m,
            y1: b.y1 + m,
        }
    });
    let (w, h) = (r.x1 - r.x0, r.y1 - r.y0);
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"{} {} {} {}\">",
        num(w * opts.scale),
        num(h * opts.scale),
        num(r.x0),
        num(-r.y1),
        num(w),
        num(h)
    );
    let _ = writeln!(
        out,
        "<g stroke=\"#202020\" stroke-width=\"{}\" stroke-linejoin=\"round\">",
        num(opts.stroke_width)
    );
    for t in &doc.tiles {
        if t.vertices.is_empty() {
            continue;
        }
        let mut d = String::new();
        for (k, p) in t.vertices.iter().enumerate() {
            let _ = write!(d, "{}{} {} ", if k == 0 { "M" } else { "L" }, num(p.x), num(-p.y));
        }
        d.push('Z');
        let shade = match t.key.corner {
            Some(c) => c as usize,
            None => (t.key.id.slot as usize + 3) % 4,
        };
        let _ = writeln!(out, "<path id=\"{}\" fill=\"{}\" d=\"{}\"/>", t.key, FILLS[shade], d);
    }
    out.push_str("</g>\n");
    if opts.label_tiles {
        let size = 0.12;
        let _ = writeln!(
            out,
            "<g font-family=\"sans-serif\" font-size=\"{}\" text-anchor=\"middle\" fill=\"#000000\">",
            num(size)
        );
        for t in doc.tiles.iter().filter(|t| !t.vertices.is_empty()) {
            let n = t.vertices.len() as f64;
            let cx = t.vertices.iter().map(|p| p.x).sum::<f64>() / n;
            let cy = t.vertices.iter().map(|p| p.y).sum::<f64>() / n;
            let _ = writeln!(out, "<text x=\"{}\" y=\"{}\">{}</text>", num(cx), num(-cy + size / 3.0), t.key);
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::Kind;
    use fairtile::strip::strip_tiling;

    #[test]
    fn one_path_per_tile_and_flipped() {
        let t = strip_tiling(0.2, 2).unwrap().tiles(2).unwrap();
        let doc = TilingDocument::with_tiles(Kind::Strip, &t);
        let svg = render_svg(&doc, &RenderOptions::default());
        assert_eq!(svg.matches("<path ").count(), t.len());
        // the apex (0, 0.2) appears as (0, -0.2)
        assert!(svg.contains("M0 -0.2 ") || svg.contains("L0 -0.2 "));
        assert_eq!(svg, render_svg(&doc, &RenderOptions::default()));
    }

    #[test]
    fn empty_document() {
        let svg = render_svg(&TilingDocument::new(Kind::Plane), &RenderOptions::default());
        assert!(svg.starts_with("<?xml"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(!svg.contains("<path"));
    }

    #[test]
    fn labels_and_viewbox() {
        let t = strip_tiling(0.2, 1).unwrap().tiles(1).unwrap();
        let doc = TilingDocument::with_tiles(Kind::Strip, &t);
        let opts = RenderOptions {
            label_tiles: true,
            viewbox: Some("-1,-1,1,1".parse().unwrap()),
            ..RenderOptions::default()
        };
        let svg = render_svg(&doc, &opts);
        assert!(svg.contains(">r0:c0:s1</text>"));
        assert!(svg.contains("viewBox=\"-1 -1 2 2\""));
        assert!("1,1,0,0".parse::<Rect>().is_err());
        assert!("1,2".parse::<Rect>().is_err());
    }

    #[test]
    fn number_format() {
        assert_eq!(num(1.0), "1");
        assert_eq!(num(-0.0000001), "0");
        assert_eq!(num(2.5), "2.5");
    }
}
