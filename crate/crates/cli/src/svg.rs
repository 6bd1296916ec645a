//! Deterministic SVG charts of a page: one cell per even column s and
//! degree t, labelled with its dimension.

use std::collections::BTreeSet;
use std::fmt::Write;

use ssdl_core::ss::{Page, SummandKind, Variant};

const CELL: i64 = 22;
const MARGIN: i64 = 40;

#[derive(Clone, Debug, Default)]
pub struct Chart {
    pub title: String,
    pub columns: Vec<i64>,
    pub t_max: i64,
    /// (s, t, dim), nonzero entries only.
    pub dims: Vec<(i64, i64, u64)>,
    /// Pending differentials: source and target cells.
    pub arrows: Vec<((i64, i64), (i64, i64))>,
    pub torsion: BTreeSet<(i64, i64)>,
    pub certified: BTreeSet<(i64, i64)>,
}

impl Chart {
    /// `page` with arrows for the round `r` read off the cotorsion that
    /// round left behind on `after`.
    pub fn of(page: &Page, variant: Variant, after: Option<&Page>, title: &str) -> Chart {
        let columns = variant.columns(&page.window);
        let t_max = page.reported_tmax();
        let stable = page.stable_dims();
        let mut dims = Vec::new();
        let mut torsion = BTreeSet::new();
        for t in 0..=t_max {
            for &s in &columns {
                let d = page.dim_with(&stable, variant, s, t);
                if d > 0 {
                    dims.push((s, t, d));
                    if page.torsion_at(s, t) > 0 && variant != Variant::Orbit {
                        torsion.insert((s, t));
                    }
                }
            }
        }
        let mut arrows = Vec::new();
        if let Some(next) = after {
            let r = page.r as i64;
            let ranks = next.cotorsion.iter().find(|c| c.kind == SummandKind::Cotorsion && c.round == page.r);
            if let Some(ranks) = ranks {
                for (t, &k) in ranks.dims.iter().enumerate() {
                    let t = t as i64;
                    if k == 0 || t + r - 1 > t_max {
                        continue;
                    }
                    for &s in &columns {
                        if columns.contains(&(s - r)) && dims.iter().any(|&(a, b, _)| (a, b) == (s, t)) {
                            arrows.push(((s, t), (s - r, t + r - 1)));
                        }
                    }
                }
            }
        }
        Chart { title: title.into(), columns, t_max, dims, arrows, torsion, certified: BTreeSet::new() }
    }

    fn x(&self, s: i64) -> i64 {
        let lo = self.columns.first().copied().unwrap_or(0);
        MARGIN + (s - lo) / 2 * CELL + CELL / 2
    }

    fn y(&self, t: i64) -> i64 {
        MARGIN + (self.t_max - t) * CELL + CELL / 2
    }

    pub fn render(&self) -> Result<String, String> {
        if self.columns.is_empty() || self.t_max < 0 {
            return Err("window is empty".into());
        }
        let w = 2 * MARGIN + self.columns.len() as i64 * CELL;
        let h = 2 * MARGIN + (self.t_max + 1) * CELL;
        let mut o = String::new();
        let _ = writeln!(o, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            o,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="9">"#
        );
        let _ = writeln!(o, "<title>{}</title>", escape(&self.title));
        let _ = writeln!(
            o,
            r##"<defs><marker id="head" markerWidth="6" markerHeight="6" refX="5" refY="3" orient="auto"><path d="M0,0 L6,3 L0,6 z" fill="#b22"/></marker></defs>"##
        );
        let _ = writeln!(o, r#"<text x="{}" y="16" font-size="12">{}</text>"#, MARGIN, escape(&self.title));
        // grid and axes
        let _ = writeln!(o, r##"<g stroke="#ddd" stroke-width="0.5">"##);
        for (k, _) in self.columns.iter().enumerate() {
            let x = MARGIN + k as i64 * CELL;
            let _ = writeln!(o, r#"<line x1="{x}" y1="{MARGIN}" x2="{x}" y2="{}"/>"#, h - MARGIN);
        }
        for t in 0..=self.t_max + 1 {
            let y = MARGIN + t * CELL;
            let _ = writeln!(o, r#"<line x1="{MARGIN}" y1="{y}" x2="{}" y2="{y}"/>"#, w - MARGIN);
        }
        let _ = writeln!(o, "</g>");
        for &s in &self.columns {
            if s % 10 == 0 {
                let _ = writeln!(o, r#"<text x="{}" y="{}" text-anchor="middle">{s}</text>"#, self.x(s), h - MARGIN + 12);
            }
        }
        for t in (0..=self.t_max).step_by(4) {
            let _ = writeln!(o, r#"<text x="{}" y="{}" text-anchor="end">{t}</text>"#, MARGIN - 4, self.y(t) + 3);
        }
        let _ = writeln!(o, r##"<g stroke="#b22" stroke-width="0.8" marker-end="url(#head)">"##);
        for &((s, t), (s2, t2)) in &self.arrows {
            let _ = writeln!(o, r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#, self.x(s), self.y(t), self.x(s2) + 4, self.y(t2) + 4);
        }
        let _ = writeln!(o, "</g>");
        for &(s, t, d) in &self.dims {
            let (x, y) = (self.x(s), self.y(t));
            let class = if self.torsion.contains(&(s, t)) {
                r##"fill="#fff" stroke="#333""##
            } else if self.certified.contains(&(s, t)) {
                r##"fill="#26a" stroke="#26a""##
            } else {
                r##"fill="#333" stroke="#333""##
            };
            let _ = writeln!(o, r#"<circle cx="{x}" cy="{y}" r="3" {class}/>"#);
            if d > 1 {
                let _ = writeln!(o, r#"<text x="{}" y="{}">{d}</text>"#, x + 4, y - 3);
            }
        }
        o.push_str("</svg>\n");
        Ok(o)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
