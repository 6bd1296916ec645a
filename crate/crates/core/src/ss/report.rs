//! E^∞ reports: dimension tables, torsion, certificates, cross-checks.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::*;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub t: i64,
    pub dims: Vec<u64>,
}

/// `dim E_{s,t}` over the window; rows by t, columns by s.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimTable {
    pub variant: Variant,
    pub page: String,
    pub columns: Vec<i64>,
    pub rows: Vec<TableRow>,
}

impl DimTable {
    pub fn of(page: &Page, variant: Variant, label: &str) -> Self {
        let stable = page.stable_dims();
        let columns = variant.columns(&page.window);
        let rows = (0..=page.reported_tmax())
            .map(|t| TableRow { t, dims: columns.iter().map(|&s| page.dim_with(&stable, variant, s, t)).collect() })
            .collect();
        DimTable { variant, page: label.into(), columns, rows }
    }

    pub fn get(&self, s: i64, t: i64) -> Option<u64> {
        let c = self.columns.iter().position(|&x| x == s)?;
        self.rows.iter().find(|r| r.t == t).map(|r| r.dims[c])
    }

    pub fn render(&self) -> String {
        let width = self
            .rows
            .iter()
            .flat_map(|r| r.dims.iter().map(|d| d.to_string().len()))
            .chain(self.columns.iter().map(|s| s.to_string().len()))
            .max()
            .unwrap_or(1);
        let mut out = format!("{} dimensions ({}), rows t, columns s\n", self.page, self.variant.name());
        let _ = write!(out, "{:>4} |", "t\\s");
        for s in &self.columns {
            let _ = write!(out, " {s:>width$}");
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(out, "{:>4} |", r.t);
            for d in &r.dims {
                let _ = write!(out, " {d:>width$}");
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SummandReport {
    pub kind: SummandKind,
    pub round: u32,
    pub columns: Vec<i64>,
    pub heights: Vec<u32>,
    pub dims: Vec<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormCheck {
    pub consistent: bool,
    pub mismatches: Vec<String>,
}

/// Norm sequence cross-check on the shared window: column s of the Tate
/// page is the stable part of the fixed point page (s <= 0) or of the
/// orbit page shifted by 2 (s >= 2); each round's orbit cotorsion in
/// degree t matches its fixed point torsion in degree t + r − 1.
pub fn norm_check(page: &Page) -> NormCheck {
    let stable = page.stable_dims();
    let mut mismatches = Vec::new();
    let tmax = page.reported_tmax();
    for t in 0..=tmax {
        for s in Variant::Tate.columns(&page.window) {
            let tate = page.dim_with(&stable, Variant::Tate, s, t);
            let other = if s <= 0 {
                page.dim_with(&stable, Variant::Hfp, s, t) - page.torsion_at(s, t)
            } else {
                page.dim_with(&stable, Variant::Orbit, s - 2, t) - page.cotorsion_at(s - 2, t)
            };
            if tate != other {
                mismatches.push(format!("(s, t) = ({s}, {t}): tate {tate}, other side {other}"));
            }
        }
    }
    for (tor, cot) in page.torsion.iter().zip(&page.cotorsion) {
        let shift = tor.round as i64 - 1;
        for t in 0..=tmax - shift {
            let (a, b) = (cot.dims[t as usize], tor.dims[(t + shift) as usize]);
            if a != b {
                mismatches.push(format!("d^{}: orbit cotorsion {a} in degree {t}, fixed point torsion {b}", tor.round));
            }
        }
    }
    NormCheck { consistent: mismatches.is_empty(), mismatches }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub name: String,
    pub p: u32,
    pub variant: Variant,
    pub window: Window,
    pub verdict: Verdict,
    pub vertical: String,
    pub table: DimTable,
    pub extras: Vec<SummandReport>,
    pub certificates: Vec<CycleCertificate>,
    pub withheld: Vec<String>,
    pub convergence: String,
    pub norm_check: NormCheck,
    pub notes: Vec<String>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(o: &Outcome, variant: Variant) -> Self {
        let page = &o.page;
        let label = if o.verdict.is_collapsed() { "E^∞".to_string() } else { format!("E^{}", page.r) };
        let tmax = page.reported_tmax();
        let cut = |d: &[u64]| d.iter().take(tmax as usize + 1).copied().collect::<Vec<_>>();
        let none = Vec::new();
        let extras = match variant {
            Variant::Hfp => &page.torsion,
            Variant::Orbit => &page.cotorsion,
            Variant::Tate => &none,
        }
        .iter()
        .filter(|s| s.dims.iter().any(|&d| d > 0))
        .map(|s| SummandReport {
            kind: s.kind,
            round: s.round,
            columns: s.columns(),
            heights: s.columns().iter().map(|&c| s.height(c)).collect(),
            dims: cut(&s.dims),
        })
        .collect();
        let mut convergence = String::from("converges conditionally to the continuous homology");
        if page.strongly_convergent {
            convergence.push_str("; strongly convergent, the input being finite in each degree");
        }
        if o.verdict.is_collapsed() {
            convergence.push_str(&format!("; collapses at E^{}", page.r));
        }
        let mut notes = o.notes.clone();
        if variant == Variant::Orbit {
            notes.push("orbit columns are normalized to start at s = 0 (the Σ² of the norm sequence is not shown)".into());
        }
        notes.push("the same differentials govern the C_{p^n} fixed point, Tate and orbit spectral sequences, restricted from the circle".into());
        if o.window_note().is_some() {
            notes.extend(o.window_note());
        }
        Report {
            name: o.vertical.name.clone(),
            p: page.p.value(),
            variant,
            window: page.window,
            verdict: o.verdict.clone(),
            vertical: o.vertical.presentation.to_string(),
            table: DimTable::of(page, variant, &label),
            extras,
            certificates: o.certificates.clone(),
            withheld: o.withheld.clone(),
            convergence,
            norm_check: norm_check(page),
            notes,
            warnings: o.warnings.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn status(&self) -> &'static str {
        match self.verdict {
            Verdict::Collapsed => "COLLAPSED",
            Verdict::Open { .. } => "OPEN",
            Verdict::Truncated { .. } => "TRUNCATED",
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} at p = {} ({} spectral sequence)", self.name, self.p, self.variant.name());
        let _ = writeln!(out, "window: t <= {}, s >= {}", self.window.t_max, self.window.s_min);
        let _ = writeln!(out, "verdict: {}", self.status());
        match &self.verdict {
            Verdict::Open { uncertified, window_too_small } => {
                for u in uncertified {
                    let _ = writeln!(out, "  uncertified: {u}");
                }
                if *window_too_small {
                    let _ = writeln!(out, "  window too small for degree reasons; enlarge --tmax or --smin");
                }
            }
            Verdict::Truncated { page } => {
                let _ = writeln!(out, "  reported at E^{page} on request");
            }
            Verdict::Collapsed => {}
        }
        let _ = writeln!(out, "\nE^2 vertical: {}", self.vertical);
        let _ = writeln!(out, "\n{}", self.table.render());
        if !self.extras.is_empty() {
            let _ = writeln!(out, "torsion:");
            for e in &self.extras {
                let _ = writeln!(
                    out,
                    "  {:?} from d^{} in columns {:?} (heights {:?}): {:?}",
                    e.kind, e.round, e.columns, e.heights, e.dims
                );
            }
            out.push('\n');
        }
        if !self.certificates.is_empty() {
            let _ = writeln!(out, "infinite cycles:");
            for c in &self.certificates {
                let via = c.via.as_deref().map(|v| format!(" [{v}]")).unwrap_or_default();
                let _ = writeln!(out, "  {} = {}  ({:?}, from {} on d^{}){via}", c.label, c.value, c.reason, c.source, c.round);
            }
            out.push('\n');
        }
        if !self.withheld.is_empty() {
            let _ = writeln!(out, "not certified (operation unknown): {}\n", self.withheld.join(", "));
        }
        let _ = writeln!(out, "convergence: {}", self.convergence);
        let _ = writeln!(
            out,
            "norm sequence check: {}",
            if self.norm_check.consistent { "consistent".to_string() } else { self.norm_check.mismatches.join("; ") }
        );
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}

impl Outcome {
    fn window_note(&self) -> Option<String> {
        (self.page.valid_tmax < self.page.window.t_max)
            .then(|| format!("dimensions are exact only through t = {}", self.page.valid_tmax))
    }
}
