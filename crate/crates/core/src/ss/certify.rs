//! Infinite-cycle certificates and the collapse verdict.

use serde::Serialize;

use super::{Ambient, Page};
use crate::algebra::{Element, Presentation};

use crate::dl::DlOps;
use crate::error::{Error, Result};
use crate::linalg::{FpVector, Subspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    /// p = 2: `x² = Q^t(x)`.
    ASquare,
    /// p = 2: `Q^i(x)`, `t < i < t + 2r − 1`.
    AQRange,
    /// p = 2: `Q^{t+2r−1}(x) + x·δx`.
    ACompanion,
    /// p odd, |x| = 2m: `x^p = Q^m(x)`.
    BPthPower,
    /// p odd, |x| = 2m: `β^εQ^i(x)`, `m < i < m + r`.
    BBetaQRange,
    /// p odd, |x| = 2m: `x^{p−1}·δx`.
    BCompanion,
    /// p odd, |x| = 2m − 1: `β^εQ^i(x)`, `m <= i < m + r − 1`, and `βQ^{m+r−1}(x)`.
    CBetaQRange,
    /// p odd, |x| = 2m − 1: `Q^{m+r−1}(x) − x·(δx)^{p−1}`.
    CCompanion,
    YTorsion,
    DegreeReasons,
    User,
}

#[derive(Clone, Debug, Serialize)]
pub struct CycleCertificate {
    pub label: String,
    #[serde(skip)]
    pub class: Element,
    pub value: String,
    pub reason: Reason,
    /// The class x the certificate comes from, and its round `d^{2r}`.
    pub source: String,
    pub round: u32,
    pub delta: String,
    /// Set when the certificate is the image of one on another input.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub via: Option<String>,
}

/// Output of [`certify_cycles`]: nonzero certified classes, classes that
/// vanish identically, and classes whose operations are not known.
#[derive(Clone, Debug, Default)]
pub struct CycleFamily {
    pub certificates: Vec<CycleCertificate>,
    pub vanishing: Vec<String>,
    pub withheld: Vec<String>,
}

impl CycleFamily {
    /// All 2r classes of the family, whatever their fate.
    pub fn count(&self) -> usize {
        self.certificates.len() + self.vanishing.len() + self.withheld.len()
    }
}

fn op_label(eps: u8, i: i64, x: &str) -> String {
    let b = if eps == 1 { "βQ" } else { "Q" };
    format!("{b}^{i}({x})")
}

/// The 2r infinite cycles produced by a class `x` with `d^{2r}(x) = y^r·δx`
/// (r = `rho`, so the differential is `d^{2 rho}`).
pub fn certify_cycles(pres: &Presentation, x: &Element, delta: &Element, rho: u32) -> Result<CycleFamily> {
    let p = pres.p;
    let t = x.degree();
    if t <= 0 || x.is_zero() {
        return Err(Error::NotOnPage(format!("{} (needs a class of positive degree)", pres.format_element(x))));
    }
    if delta.degree() != t + 2 * rho as i64 - 1 && !delta.is_zero() {
        return Err(Error::DegreeMismatch(format!("δx has degree {}, expected {}", delta.degree(), t + 2 * rho as i64 - 1)));
    }
    let r = rho as i64;
    let name = pres.format_element(x);
    let paren = if x.len() > 1 { format!("({name})") } else { name.clone() };
    let dname = match delta.len() {
        0 => "0".to_string(),
        1 => pres.format_element(delta),
        _ => format!("({})", pres.format_element(delta)),
    };
    let mut ops = DlOps::new(pres);
    let mut out = CycleFamily::default();
    let push = |out: &mut CycleFamily, label: String, value: Option<Element>, reason: Reason| match value {
        None => out.withheld.push(label),
        Some(v) if v.is_zero() => out.vanishing.push(label),
        Some(v) => out.certificates.push(CycleCertificate {
            label,
            value: pres.format_element(&v),
            class: v,
            reason,
            source: name.clone(),
            round: 2 * rho,
            delta: pres.format_element(delta),
            via: None,
        }),
    };
    let mut q = |eps: u8, i: i64| -> Result<Option<Element>> { Ok(ops.apply(eps, i, x)?.known()) };
    if p.is_two() {
        push(&mut out, format!("{paren}^2"), q(0, t)?, Reason::ASquare);
        for i in t + 1..t + 2 * r - 1 {
            push(&mut out, op_label(0, i, &name), q(0, i)?, Reason::AQRange);
        }
        let i = t + 2 * r - 1;
        let comp = match q(0, i)? {
            Some(v) => Some(v.add(&pres.multiply(x, delta)?, p)?),
            None => None,
        };
        push(&mut out, format!("{} + {paren}*{dname}", op_label(0, i, &name)), comp, Reason::ACompanion);
    } else if t % 2 == 0 {
        let m = t / 2;
        push(&mut out, format!("{paren}^{}", p.value()), Some(pres.power(x, p.value())?), Reason::BPthPower);
        for i in m + 1..m + r {
            for eps in [0u8, 1] {
                push(&mut out, op_label(eps, i, &name), q(eps, i)?, Reason::BBetaQRange);
            }
        }
        let comp = pres.multiply(&pres.power(x, p.value() - 1)?, delta)?;
        push(&mut out, format!("{paren}^{}*{dname}", p.value() - 1), Some(comp), Reason::BCompanion);
    } else {
        let m = (t + 1) / 2;
        for i in m..m + r - 1 {
            for eps in [0u8, 1] {
                push(&mut out, op_label(eps, i, &name), q(eps, i)?, Reason::CBetaQRange);
            }
        }
        let top = m + r - 1;
        push(&mut out, op_label(1, top, &name), q(1, top)?, Reason::CBetaQRange);
        let comp = match q(0, top)? {
            Some(v) => {
                let tail = pres.multiply(x, &pres.power(delta, p.value() - 1)?)?;
                Some(v.sub(&tail, p)?)
            }
            None => None,
        };
        push(&mut out, format!("{} - {paren}*{dname}^{}", op_label(0, top, &name), p.value() - 1), comp, Reason::CCompanion);
    }
    Ok(out)
}

/// Certificates from every generator of the E² vertical, with δ = σ.
pub fn certify_generators(pres: &Presentation) -> Result<CycleFamily> {
    let d = crate::algebra::Derivation::sigma(pres);
    let mut all = CycleFamily::default();
    for g in 0..pres.len() {
        let x = pres.gen(g);
        let dx = d.apply(&x)?.expect("σ is determined everywhere");
        let dx = if dx.is_zero() { Element::zero(x.degree() + 1) } else { dx };
        let part = certify_cycles(pres, &x, &dx, 1)?;
        all.certificates.extend(part.certificates);
        all.vanishing.extend(part.vanishing);
        all.withheld.extend(part.withheld);
    }
    Ok(all)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Collapsed,
    Open { uncertified: Vec<String>, window_too_small: bool },
    /// Reported at a fixed page on request, without a verdict.
    Truncated { page: u32 },
}

impl Verdict {
    pub fn is_collapsed(&self) -> bool {
        matches!(self, Verdict::Collapsed)
    }
}

#[derive(Clone, Debug)]
pub struct Collapse {
    pub verdict: Verdict,
    /// Classes certified by degree reasons while checking.
    pub added: Vec<CycleCertificate>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum DegreeCheck {
    Certified,
    Target,
    WindowTooSmall,
}

/// Vanishing-region test for a class of degree t: every later `d^{r'}`
/// that stays inside the column window lands in a zero group.
fn degree_reasons(page: &Page, stable: &[u64], t: i64, acyclic_above: Option<i64>) -> DegreeCheck {
    let reach = -page.window.s_min;
    let mut r = page.r as i64;
    while r <= reach.max(page.r as i64) {
        let target = t + r - 1;
        if acyclic_above.is_some_and(|a| target > a) {
            r += 2;
            continue;
        }
        if target > page.valid_tmax {
            return DegreeCheck::WindowTooSmall;
        }
        if stable[target as usize] != 0 {
            return DegreeCheck::Target;
        }
        r += 2;
    }
    DegreeCheck::Certified
}

/// COLLAPSED when, in every block and degree of the window, the cycles are
/// spanned by boundaries and products of certified classes. Classes that
/// cannot support a differential for degree reasons are certified on the
/// way. Certificate classes are elements of the full vertical the algebra
/// blocks were cut from; one whose support straddles blocks is not used.
pub fn collapse_check(page: &Page, certs: &[CycleCertificate]) -> Result<Collapse> {
    let stable = page.stable_dims();
    let mut added = Vec::new();
    let mut warnings = Vec::new();
    let mut uncertified = Vec::new();
    let mut too_small = false;
    let mut placed = vec![false; certs.len()];
    for f in &page.factors {
        let top = page.valid_tmax.min(f.top());
        // Spanning classes of the certified subalgebra, by degree.
        let mut gens: Vec<Vec<FpVector>> = vec![Vec::new(); top.max(0) as usize + 1];
        let mut local: Vec<(i64, FpVector)> = Vec::new();
        let acyclic_above = match &f.ambient {
            Ambient::Algebra { gens: fg, basis, pres: fp } => {
                let map = fg.iter().enumerate().map(|(l, &g)| (g, l)).collect();
                for (ci, c) in certs.iter().enumerate() {
                    let support = c.class.support();
                    if support.is_empty() || !support.iter().any(|g| fg.contains(g)) {
                        continue;
                    }
                    let Some(e) = c.class.reindex(&map, fg.len()) else {
                        continue;
                    };
                    placed[ci] = true;
                    let t = e.degree();
                    if t > f.top() {
                        continue;
                    }
                    let v = basis.to_vector(fp, &e)?;
                    if !f.sub[t as usize].is_cycle(&v) {
                        return Err(Error::Inconsistent(format!(
                            "certified class {} = {} is not a cycle on E^{}",
                            c.label, c.value, page.r
                        )));
                    }
                    local.push((t, v));
                }
                None
            }
            Ambient::Plain { acyclic_above, .. } => *acyclic_above,
        };
        let mut span: Vec<Subspace> = Vec::with_capacity(gens.len());
        for t in 0..=top {
            let sq = &f.sub[t as usize];
            let mut s = sq.boundaries().clone();
            if t == 0 {
                // The unit.
                for z in sq.cycles().basis() {
                    s.insert(z.clone());
                    gens[0].push(z.clone());
                }
            }
            for (d, c) in &local {
                if *d == t && s.insert(c.clone()) {
                    gens[t as usize].push(c.clone());
                }
            }
            for (d, c) in &local {
                if *d <= 0 || *d >= t {
                    continue;
                }
                let lower = gens[(t - d) as usize].clone();
                for g in lower {
                    let prod = multiply_vectors(f, (t - d, &g), (*d, c))?;
                    if s.insert(prod.clone()) {
                        gens[t as usize].push(prod);
                    }
                }
            }
            if s.dim() < sq.cycles().dim() {
                let missing: Vec<FpVector> = sq.cycles().basis().iter().filter(|z| !s.contains(z)).cloned().collect();
                match degree_reasons(page, &stable, t, acyclic_above) {
                    DegreeCheck::Certified => {
                        for z in missing {
                            if s.insert(z.clone()) {
                                added.push(degree_certificate(f, t, &z, page.r));
                                gens[t as usize].push(z);
                            }
                        }
                    }
                    check => {
                        too_small |= check == DegreeCheck::WindowTooSmall;
                        let mut rest = s.clone();
                        for z in missing {
                            if rest.insert(z.clone()) {
                                uncertified.push(format!("{} (degree {t})", f.describe(t, &z)));
                            }
                        }
                    }
                }
            }
            span.push(s);
        }
    }
    for (ci, c) in certs.iter().enumerate() {
        if !placed[ci] && c.class.support().len() > 1 {
            warnings.push(format!("certificate {} spans several blocks; not used", c.label));
        }
    }
    let verdict = if uncertified.is_empty() {
        Verdict::Collapsed
    } else {
        Verdict::Open { uncertified, window_too_small: too_small }
    };
    Ok(Collapse { verdict, added, warnings })
}

fn degree_certificate(f: &super::Factor, t: i64, z: &FpVector, r: u32) -> CycleCertificate {
    let value = f.describe(t, z);
    let class = match &f.ambient {
        Ambient::Algebra { pres, basis, .. } => basis.to_element(pres, t, z),
        Ambient::Plain { .. } => Element::zero(t),
    };
    CycleCertificate {
        label: value.clone(),
        class,
        value,
        reason: Reason::DegreeReasons,
        source: "vanishing region".into(),
        round: r,
        delta: "0".into(),
        via: None,
    }
}

fn multiply_vectors(f: &super::Factor, a: (i64, &FpVector), b: (i64, &FpVector)) -> Result<FpVector> {
    match &f.ambient {
        Ambient::Algebra { pres, basis, .. } => {
            let x = basis.to_element(pres, a.0, a.1);
            let y = basis.to_element(pres, b.0, b.1);
            let xy = pres.multiply(&x, &y)?;
            if xy.is_zero() {
                return Ok(FpVector::zero(pres.p, basis.dim(a.0 + b.0)));
            }
            basis.to_vector(pres, &xy)
        }
        Ambient::Plain { .. } => Err(Error::Unsupported("products on a plain block".into())),
    }
}
