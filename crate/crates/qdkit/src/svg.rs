//! Minimal SVG writer for curve plots.

use crate::C64;
use std::fmt::Write;

/// An SVG document in world coordinates (y up), with a manifest comment.
#[derive(Clone, Debug, Default)]
pub struct SvgDoc {
    elements: Vec<String>,
    lo: Option<C64>,
    hi: Option<C64>,
    manifest: Option<String>,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

impl SvgDoc {
    pub fn new() -> Self {
        Self::default()
    }

    /// Stores `text` (e.g. a JSON manifest) as a comment in the output.
    pub fn set_manifest(&mut self, text: &str) {
        self.manifest = Some(text.replace("--", "- -"));
    }

    fn extend(&mut self, p: C64) {
        if !p.re.is_finite() || !p.im.is_finite() {
            return;
        }
        self.lo = Some(match self.lo {
            None => p,
            Some(l) => C64::new(l.re.min(p.re), l.im.min(p.im)),
        });
        self.hi = Some(match self.hi {
            None => p,
            Some(h) => C64::new(h.re.max(p.re), h.im.max(p.im)),
        });
    }

    /// Polyline (closed when `closed`).
    pub fn path(&mut self, pts: &[C64], closed: bool, stroke: &str, fill: &str, class: &str) {
        if pts.is_empty() {
            return;
        }
        let mut d = String::new();
        for (i, p) in pts.iter().enumerate() {
            self.extend(*p);
            let _ = write!(d, "{}{:.6},{:.6} ", if i == 0 { "M" } else { "L" }, p.re, -p.im);
        }
        if closed {
            d.push('Z');
        }
        self.elements.push(format!(
            "<path class=\"{}\" d=\"{}\" stroke=\"{}\" fill=\"{}\" fill-rule=\"evenodd\" stroke-width=\"0.004\" vector-effect=\"non-scaling-stroke\"/>",
            esc(class), d.trim_end(), esc(stroke), esc(fill)
        ));
    }

    /// Opens a `<g>` layer; close it with `end_group`.
    pub fn begin_group(&mut self, id: &str) {
        self.elements.push(format!("<g id=\"{}\">", esc(id)));
    }

    pub fn end_group(&mut self) {
        self.elements.push("</g>".into());
    }

    pub fn marker(&mut self, p: C64, r: f64, color: &str, title: &str) {
        self.extend(p);
        self.elements.push(format!(
            "<circle cx=\"{:.6}\" cy=\"{:.6}\" r=\"{:.6}\" fill=\"{}\"><title>{}</title></circle>",
            p.re, -p.im, r, esc(color), esc(title)
        ));
    }

    /// Renders with a margin of 5% of the larger extent.
    pub fn render(&self) -> String {
        let lo = self.lo.unwrap_or(C64::new(-1.0, -1.0));
        let hi = self.hi.unwrap_or(C64::new(1.0, 1.0));
        let w = (hi.re - lo.re).max(1e-9);
        let h = (hi.im - lo.im).max(1e-9);
        let m = 0.05 * w.max(h);
        let mut s = String::new();
        let _ = writeln!(s, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
        if let Some(man) = &self.manifest {
            let _ = writeln!(s, "<!-- manifest\n{man}\n-->");
        }
        let _ = writeln!(
            s,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{:.6} {:.6} {:.6} {:.6}\" width=\"800\" height=\"{:.0}\">",
            lo.re - m, -hi.im - m, w + 2.0 * m, h + 2.0 * m, 800.0 * (h + 2.0 * m) / (w + 2.0 * m)
        );
        for e in &self.elements {
            let _ = writeln!(s, "  {e}");
        }
        s.push_str("</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_manifest_and_paths() {
        let mut d = SvgDoc::new();
        d.set_manifest("{\"schema\":1}");
        d.path(&[C64::new(0.0, 0.0), C64::new(1.0, 1.0)], false, "black", "none", "curve");
        d.marker(C64::new(0.5, 0.5), 0.01, "red", "cusp");
        let s = d.render();
        assert!(s.contains("<!-- manifest\n{\"schema\":1}"));
        assert!(s.contains("<path") && s.contains("<circle"));
        assert!(s.contains("M0.000000,-0.000000"));
    }
}
