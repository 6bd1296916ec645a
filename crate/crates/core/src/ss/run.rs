//! From an input presentation to a finished page: E², d² = y·σ, E⁴,
//! certificates, verdict.

use super::*;
use crate::algebra::Element;
use crate::bokstedt::{base_window, thh, ThhInput};
use crate::expr::parse_element;
use crate::specfile::{SpecFile, SpecKind};

#[derive(Clone, Debug)]
pub struct VerticalWitness {
    pub source: Presentation,
    /// Images of the source generators in the vertical.
    pub images: Vec<Element>,
}

/// The E² vertical `H_*(R)` and how it was obtained.
#[derive(Clone, Debug)]
pub struct Vertical {
    pub name: String,
    pub presentation: Presentation,
    pub commutative: bool,
    pub witness: Option<VerticalWitness>,
    pub notes: Vec<String>,
    pub warnings: Vec<String>,
}

/// Moves an element between presentations sharing generator names.
fn transport(from: &Presentation, to: &Presentation, e: &Element) -> Result<Element> {
    let mut map = std::collections::BTreeMap::new();
    for g in e.support() {
        map.insert(g, to.index_of(&from.generators[g].name)?);
    }
    Ok(e.reindex(&map, to.len()).expect("every support index is mapped"))
}

/// Builds the vertical through degree `top`: a ring spec is used as is, a
/// base spec goes through THH.
pub fn vertical(spec: &SpecFile, top: i64) -> Result<Vertical> {
    let name = spec.name.clone().unwrap_or_else(|| "input".into());
    if spec.kind == SpecKind::Ring {
        let l = spec.load(top)?;
        return Ok(Vertical {
            name,
            commutative: l.presentation.commutative,
            presentation: l.presentation,
            witness: None,
            notes: Vec::new(),
            warnings: Vec::new(),
        });
    }
    let p = Prime::new(spec.p)?;
    let l = spec.load(base_window(p, top))?;
    let commutative = l.commutative();
    let out = thh(&ThhInput { base: l.presentation.clone(), commutative, witness: l.witness.clone() }, top)?;
    let pres = out.presentation;
    let witness = match &l.witness {
        None => None,
        Some(w) => {
            let src = thh(&ThhInput { base: w.source.clone(), commutative: true, witness: None }, top)?.presentation;
            let sigma = Derivation::sigma(&pres);
            let mut images = Vec::with_capacity(src.len());
            for g in &src.generators {
                let image = if let Ok(j) = w.source.index_of(&g.name) {
                    transport(&l.presentation, &pres, &w.images[j])?
                } else if let Some(j) =
                    (0..w.source.len()).find(|&j| crate::bokstedt::sigma_name(&w.source.generators[j].name) == g.name)
                {
                    let x = transport(&l.presentation, &pres, &w.images[j])?;
                    sigma.apply(&x)?.expect("σ is determined everywhere")
                } else {
                    return Err(Error::Inconsistent(format!("witness source generator {} has no image", g.name)));
                };
                images.push(image);
            }
            Some(VerticalWitness { source: src, images })
        }
    };
    Ok(Vertical { name, presentation: pres, commutative, witness, notes: out.notes, warnings: out.warnings })
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub assume_zero: Vec<String>,
    pub stop_at_r: Option<u32>,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub vertical: Vertical,
    pub e2: Page,
    pub round: Round,
    pub page: Page,
    pub certificates: Vec<CycleCertificate>,
    pub withheld: Vec<String>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
    pub warnings: Vec<String>,
}

/// Certificates for the E² generators, directly or through the witness.
pub fn certificates(v: &Vertical) -> Result<(CycleFamily, Vec<String>)> {
    let mut warnings = Vec::new();
    let pres = &v.presentation;
    if v.commutative {
        return Ok((certify_generators(pres)?, warnings));
    }
    let Some(w) = &v.witness else {
        warnings.push("input is not declared commutative and has no witness; no infinite cycles certified".into());
        return Ok((CycleFamily::default(), warnings));
    };
    let src = certify_generators(&w.source)?;
    let mut out = CycleFamily { vanishing: src.vanishing, withheld: src.withheld, ..CycleFamily::default() };
    for c in src.certificates {
        let image = pres.hom_image(&w.source, &w.images, &c.class)?;
        if image.is_zero() {
            out.vanishing.push(format!("image of {}", c.label));
            continue;
        }
        out.certificates.push(CycleCertificate {
            value: pres.format_element(&image),
            class: image,
            via: Some(format!("image of {} = {}", c.label, c.value)),
            ..c
        });
    }
    Ok((out, warnings))
}

pub fn run(vertical: Vertical, window: Window, opts: &RunOptions) -> Result<Outcome> {
    let pres = &vertical.presentation;
    let e2 = init_page2(pres, window)?;
    let mut notes = vertical.notes.clone();
    let mut warnings = vertical.warnings.clone();
    let mut round = d2_from_sigma(&e2, pres)?;
    let checked = propagate_dl(&mut round, pres)?;
    if checked > 0 {
        notes.push(format!("{checked} operation table entries agree with d² = y·σ"));
    }
    if opts.stop_at_r == Some(2) {
        return Ok(Outcome {
            page: e2.clone(),
            e2,
            round,
            vertical,
            certificates: Vec::new(),
            withheld: Vec::new(),
            verdict: Verdict::Truncated { page: 2 },
            notes,
            warnings,
        });
    }
    let page = turn_page(&e2, &round)?;
    let (family, w) = certificates(&vertical)?;
    warnings.extend(w);
    let mut certs = family.certificates;
    for src in &opts.assume_zero {
        let class = parse_element(pres, src)?;
        certs.push(CycleCertificate {
            label: src.clone(),
            value: pres.format_element(&class),
            class,
            reason: Reason::User,
            source: "--assume-zero".into(),
            round: page.r,
            delta: "0".into(),
            via: None,
        });
    }
    if page.torsion.iter().any(|s| s.dims.iter().any(|&d| d > 0)) {
        certs.push(CycleCertificate {
            label: "y-torsion".into(),
            class: Element::zero(0),
            value: "im σ in filtration 0".into(),
            reason: Reason::YTorsion,
            source: "torsion strip".into(),
            round: page.r,
            delta: "0".into(),
            via: None,
        });
    }
    let c = collapse_check(&page, &certs)?;
    warnings.extend(c.warnings);
    certs.extend(c.added);
    let mut verdict = c.verdict;
    if let (Some(r), false) = (opts.stop_at_r, verdict.is_collapsed()) {
        if r > page.r {
            notes.push(format!("requested E^{r}; the last page computed is E^{}", page.r));
        }
        verdict = Verdict::Truncated { page: page.r };
    }
    Ok(Outcome { vertical, e2, round, page, certificates: certs, withheld: family.withheld, verdict, notes, warnings })
}
