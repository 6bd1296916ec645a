//! H_*(THH(B); F_p) from H_*(B; F_p): Hochschild homology of the free
//! algebra, the d^{p-1} differential on divided powers, and multiplicative
//! extensions.

use crate::algebra::{Derivation, DlKey, Element, GenKind, Generator, GradedBasis, Monomial, Presentation};
use crate::dl::{DlOps, DlValue};
use crate::error::{Error, Result};
use crate::linalg::{kernel_image_quotient, Matrix};
use crate::fp::Prime;

/// An algebra map from a commutative source onto the base, used in place
/// of a commutativity assumption (e.g. MU → BP).
#[derive(Clone, Debug)]
pub struct Witness {
    pub source: Presentation,
    /// Image of each source generator, as elements of the base.
    pub images: Vec<Element>,
}

#[derive(Clone, Debug)]
pub struct ThhInput {
    pub base: Presentation,
    pub commutative: bool,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug)]
pub struct ThhOutput {
    pub presentation: Presentation,
    /// Human-readable record of what each stage did.
    pub notes: Vec<String>,
    pub warnings: Vec<String>,
}

pub fn sigma_name(name: &str) -> String {
    format!("s{name}")
}

fn widen(e: &Element, width: usize) -> Element {
    let map = (0..width).map(|i| (i, i)).collect();
    e.reindex(&map, width).expect("identity map covers the support")
}

/// Adjoins `σx` for every generator: exterior for polynomial `x`, divided
/// powers for exterior `x`.
pub fn hh_of_free(base: &Presentation) -> Result<Presentation> {
    let n = base.len();
    let mut gens: Vec<Generator> = base
        .generators
        .iter()
        .map(|g| Generator { even_closed: g.even_closed || base.evenly_graded, ..g.clone() })
        .collect();
    for g in &base.generators {
        let kind = match g.kind {
            GenKind::Polynomial => GenKind::Exterior,
            GenKind::Exterior => GenKind::DividedPower,
            _ => {
                return Err(Error::Unsupported(format!(
                    "Hochschild homology needs a free algebra; `{}` is truncated or divided-power",
                    g.name
                )))
            }
        };
        gens.push(Generator::new(sigma_name(&g.name), g.degree + 1, kind));
    }
    let mut out = Presentation::new(base.p, gens)?;
    out.commutative = base.commutative;
    let width = out.len();
    for i in 0..n {
        out.sigma[i] = Some(out.gen(n + i));
        out.bockstein[i] = base.bockstein[i].as_ref().map(|e| widen(e, width));
    }
    for (k, v) in &base.dl {
        out.dl.insert(*k, widen(v, width));
    }
    // σ commutes with the operations; bottom operations on σx are the
    // multiplicative extensions and are left to `resolve_extensions`.
    let derived: Vec<(DlKey, Element)> = base
        .dl
        .iter()
        .filter(|(k, _)| k.epsilon == 0)
        .filter_map(|(k, v)| {
            let sx = (base.generators[k.generator].degree + 1) as i64;
            let bottom = if base.p.is_two() { k.i == sx } else { 2 * k.i == sx };
            if bottom {
                return None;
            }
            let v = widen(v, width);
            let s = Derivation::sigma(&out).apply(&v).ok()??;
            Some((DlKey { generator: n + k.generator, ..*k }, s))
        })
        .collect();
    out.dl.extend(derived);
    out.validate()?;
    Ok(out)
}

/// Index of `x` with `σx` equal to the generator `g`.
fn sigma_source(pres: &Presentation, g: usize) -> Option<usize> {
    let target = pres.gen(g);
    (0..pres.len()).find(|&x| pres.sigma[x].as_ref() == Some(&target))
}

/// A Γ family `σx` whose `γ_j` support `d^{p-1}(γ_j) = σz · γ_{j-p}`.
#[derive(Clone, Debug)]
struct Family {
    gamma: usize,
    partner: usize,
}

fn families(e2: &Presentation) -> Result<Vec<Family>> {
    let mut out = Vec::new();
    if e2.p.is_two() {
        return Ok(out);
    }
    let mut ops = DlOps::new(e2);
    for (g, gen) in e2.generators.iter().enumerate() {
        if gen.kind != GenKind::DividedPower {
            continue;
        }
        let Some(x) = sigma_source(e2, g) else { continue };
        let m = (e2.generators[x].degree as i64 + 1) / 2;
        let z = match ops.apply(1, m, &e2.gen(x))? {
            DlValue::Known(z) if !z.is_zero() => z,
            _ => continue,
        };
        let Some(sz) = Derivation::sigma(e2).apply(&z)? else { continue };
        let partner = match sz.as_monomial().map(|m| m.support().collect::<Vec<_>>()) {
            Some(s) if s.len() == 1 && s[0].1 == 1 => s[0].0,
            _ if sz.is_zero() => continue,
            _ => {
                return Err(Error::Unsupported(format!(
                    "σ of the d^(p-1) partner of {} is not a generator",
                    gen.name
                )))
            }
        };
        out.push(Family { gamma: g, partner });
    }
    Ok(out)
}

/// The d^{p-1} rule on a monomial, as a degree −1 operator.
fn bokstedt_d(pres: &Presentation, fams: &[Family], m: &Monomial) -> Result<Element> {
    let p = pres.p;
    let degree = pres.monomial_degree(m) - 1;
    let mut out = Element::zero(degree);
    for f in fams {
        let j = m.0[f.gamma];
        if j < p.value() {
            continue;
        }
        let mut prefix = m.clone();
        let mut rest = m.clone();
        for i in 0..pres.len() {
            if i < f.gamma {
                rest.0[i] = 0;
            } else {
                prefix.0[i] = 0;
            }
        }
        rest.0[f.gamma] = j - p.value();
        let sign = p.sign(pres.monomial_degree(&prefix) % 2 != 0);
        let lhs = pres.multiply(&pres.monomial_element(prefix), &pres.gen(f.partner))?;
        let term = pres.multiply(&lhs, &pres.monomial_element(rest))?;
        out = out.add_scaled(&term, sign, p)?;
    }
    Ok(out.with_degree(degree))
}

/// Matrices of the d^{p-1} rule on the whole of `e2`, from degree t to
/// t − 1 for t = 1..=t_max (index t − 1). Empty at p = 2.
pub fn bokstedt_differential(e2: &Presentation, t_max: i64) -> Result<Vec<Matrix>> {
    let fams = families(e2)?;
    let basis = GradedBasis::new(e2, t_max)?;
    (1..=t_max)
        .map(|t| {
            if fams.is_empty() {
                return Ok(Matrix::zero(e2.p, basis.dim(t), basis.dim(t - 1)));
            }
            basis
                .operator_matrix(e2, t, -1, |m| bokstedt_d(e2, &fams, m).map(Some))
                .map(|m| m.expect("rule is always determined"))
        })
        .collect()
}

/// Runs the Bökstedt spectral sequence to E^p = E^∞: each Γ(σx) with a
/// partner becomes P_p(σx) and the partner σz disappears. The homology is
/// checked against the claimed answer degreewise up to `t_max`.
pub fn bokstedt_run(e2: &Presentation, t_max: i64) -> Result<Presentation> {
    let fams = families(e2)?;
    if fams.is_empty() {
        return Ok(e2.clone());
    }
    for f in &fams {
        let local = e2.restrict(&[f.gamma, f.partner]);
        let lf = [Family { gamma: 0, partner: 1 }];
        let basis = GradedBasis::new(&local, t_max + 1)?;
        let d_at = |t: i64| -> Result<Matrix> {
            basis
                .operator_matrix(&local, t, -1, |m| bokstedt_d(&local, &lf, m).map(Some))
                .map(|m| m.expect("rule is always determined"))
        };
        let mut single = local.restrict(&[0]);
        single.generators[0].kind = GenKind::Truncated(e2.p.value());
        let expect = single.poincare_series(t_max)?;
        for t in 0..=t_max {
            let d_in = d_at(t + 1)?;
            let d_out = if t == 0 { Matrix::zero(e2.p, basis.dim(0), 0) } else { d_at(t)? };
            let h = kernel_image_quotient(&d_in, &d_out)?;
            if h.dimension as u64 != expect[t as usize] {
                return Err(Error::Inconsistent(format!(
                    "d^(p-1) homology of Γ({}) in degree {t} is {}, expected {}",
                    e2.generators[f.gamma].name, h.dimension, expect[t as usize]
                )));
            }
        }
    }
    let dropped: Vec<usize> = fams.iter().map(|f| f.partner).collect();
    let keep: Vec<usize> = (0..e2.len()).filter(|g| !dropped.contains(g)).collect();
    let mut out = quotient_by(e2, &keep)?;
    for f in &fams {
        let g = keep.iter().position(|&k| k == f.gamma).expect("Γ generators are kept");
        out.generators[g].kind = GenKind::Truncated(e2.p.value());
    }
    Ok(out)
}

/// Sub-presentation on `keep`, with table values projected to zero on
/// monomials that involve a dropped generator.
fn quotient_by(pres: &Presentation, keep: &[usize]) -> Result<Presentation> {
    let mut out = pres.restrict(keep);
    let project = |e: &Element| -> Element {
        let mut v = Element::zero(e.degree());
        for (m, &c) in e.terms() {
            if m.support().all(|(i, _)| keep.contains(&i)) {
                let mono = Monomial(keep.iter().map(|&i| m.0[i]).collect());
                v.add_term(mono, c, pres.p);
            }
        }
        v
    };
    for (l, &g) in keep.iter().enumerate() {
        out.sigma[l] = pres.sigma[g].as_ref().map(project);
        out.bockstein[l] = pres.bockstein[g].as_ref().map(project);
    }
    out.dl = pres
        .dl
        .iter()
        .filter_map(|(k, v)| {
            let generator = keep.iter().position(|&g| g == k.generator)?;
            Some((DlKey { generator, ..*k }, project(v)))
        })
        .collect();
    Ok(out)
}

/// The generators `c = σx` that can carry a multiplicative extension
/// `c^p = σ Q(x)`: exterior at p = 2, truncated of height p at odd p.
fn extension_candidates(pres: &Presentation) -> Vec<(usize, usize)> {
    (0..pres.len())
        .filter(|&c| match pres.generators[c].kind {
            GenKind::Exterior => pres.p.is_two(),
            GenKind::Truncated(h) => !pres.p.is_two() && h == pres.p.value(),
            _ => false,
        })
        .filter_map(|c| sigma_source(pres, c).map(|x| (c, x)))
        .collect()
}

/// Resolves `c^p = σ Q^{bottom}(x)` relations into polynomial generators.
pub fn resolve_extensions(einf: &Presentation, input: &ThhInput) -> Result<ThhOutput> {
    let mut notes = Vec::new();
    let mut warnings = Vec::new();
    if !input.commutative {
        if let Some(w) = &input.witness {
            check_witness(&input.base, w)?;
            let source = ThhInput { base: w.source.clone(), commutative: true, witness: None };
            let source_einf = bokstedt_run(&hh_of_free(&w.source)?, 0)?;
            let resolved = resolve_extensions(&source_einf, &source)?;
            if resolved.presentation.len() != source_einf.len() || !resolved.warnings.is_empty() {
                return Err(Error::Unsupported(
                    "the witness source carries extensions that cannot be transferred".into(),
                ));
            }
            notes.push(
                "no multiplicative extensions: the witness source has none, and the witness \
                 is a split surjection commuting with σ"
                    .into(),
            );
            return Ok(ThhOutput { presentation: einf.clone(), notes, warnings });
        }
        if !extension_candidates(einf).is_empty() {
            warnings.push(
                "input is not declared commutative and has no surjection witness; \
                 multiplicative extensions left unresolved"
                    .into(),
            );
        }
        return Ok(ThhOutput { presentation: einf.clone(), notes, warnings });
    }
    let p = einf.p;
    let mut ops = DlOps::new(einf);
    // next[c] = (c', λ) with c^p = λ c'.
    let mut next: Vec<Option<(usize, u32)>> = vec![None; einf.len()];
    for (c, x) in extension_candidates(einf) {
        let dc = einf.generators[c].degree as i64;
        let i = if p.is_two() { dc } else { dc / 2 };
        let q = match ops.apply(0, i, &einf.gen(x))? {
            DlValue::Known(q) => q,
            DlValue::Unknown => {
                warnings.push(format!(
                    "extension on {} undetermined: Q^{i}({}) is unknown",
                    einf.generators[c].name, einf.generators[x].name
                ));
                continue;
            }
        };
        let Some(v) = Derivation::sigma(einf).apply(&q)? else { continue };
        if v.is_zero() {
            continue;
        }
        let target = v.terms().iter().next().map(|(m, &l)| (m.support().collect::<Vec<_>>(), l));
        match target {
            Some((s, l)) if v.len() == 1 && s.len() == 1 && s[0].1 == 1 => {
                next[c] = Some((s[0].0, l));
            }
            _ => warnings.push(format!(
                "extension {}^{p} = {} is not a single generator; left unresolved",
                einf.generators[c].name,
                einf.format_element(&v)
            )),
        }
    }
    let targets: Vec<usize> = next.iter().flatten().map(|&(t, _)| t).collect();
    let heads: Vec<usize> = (0..einf.len()).filter(|&c| next[c].is_some() && !targets.contains(&c)).collect();
    if heads.is_empty() {
        return Ok(ThhOutput { presentation: einf.clone(), notes, warnings });
    }
    // Express every chain member as a power of its head.
    let keep: Vec<usize> = (0..einf.len()).filter(|g| !targets.contains(g)).collect();
    let mut gens: Vec<Generator> = keep.iter().map(|&g| einf.generators[g].clone()).collect();
    for &h in &heads {
        let l = keep.iter().position(|&g| g == h).unwrap();
        gens[l].kind = GenKind::Polynomial;
    }
    let mut out = Presentation::new(p, gens)?;
    out.commutative = einf.commutative;
    out.evenly_graded = einf.evenly_graded;
    let mut images: Vec<Element> = Vec::with_capacity(einf.len());
    for g in 0..einf.len() {
        images.push(match keep.iter().position(|&k| k == g) {
            Some(l) => out.gen(l),
            None => Element::zero(einf.generators[g].degree as i64),
        });
    }
    for &h in &heads {
        let mut c = h;
        let mut power = images[h].clone();
        let mut chain = vec![einf.generators[h].name.clone()];
        while let Some((t, l)) = next[c] {
            power = out.power(&power, p.value())?.scaled(p.inv(l), p);
            images[t] = power.clone();
            chain.push(einf.generators[t].name.clone());
            c = t;
        }
        notes.push(format!(
            "multiplicative extensions {}: replaced by P({})",
            chain.join(" -> "),
            einf.generators[h].name
        ));
    }
    let shape = out.clone();
    let map = |e: &Element| shape.hom_image(einf, &images, e);
    for (l, &g) in keep.iter().enumerate() {
        out.sigma[l] = einf.sigma[g].as_ref().map(map).transpose()?;
        out.bockstein[l] = einf.bockstein[g].as_ref().map(map).transpose()?;
    }
    for (k, v) in &einf.dl {
        if let Some(generator) = keep.iter().position(|&g| g == k.generator) {
            out.dl.insert(DlKey { generator, ..*k }, map(v)?);
        }
    }
    out.validate()?;
    Ok(ThhOutput { presentation: out, notes, warnings })
}

/// Checks the witness is an algebra surjection with a generator-level
/// section.
fn check_witness(base: &Presentation, w: &Witness) -> Result<()> {
    if w.images.len() != w.source.len() {
        return Err(Error::Inconsistent("witness must give an image for every source generator".into()));
    }
    for (g, img) in w.source.generators.iter().zip(&w.images) {
        base.check_element(img)?;
        if !img.is_zero() && img.degree() != g.degree as i64 {
            return Err(Error::DegreeMismatch(format!("witness image of {} has the wrong degree", g.name)));
        }
    }
    for b in 0..base.len() {
        let target = base.gen(b);
        if !w.images.contains(&target) {
            return Err(Error::Inconsistent(format!(
                "witness is not split: no source generator maps to {}",
                base.generators[b].name
            )));
        }
    }
    Ok(())
}

/// Degree up to which the base should be instantiated so that every
/// differential and extension touching degrees `<= t_max` is visible.
pub fn base_window(p: Prime, t_max: i64) -> i64 {
    p.value() as i64 * (t_max + 1)
}

/// The full pipeline: HH, Bökstedt differential, extensions, then
/// truncation to generators of degree `<= t_max`. Load the base up to
/// [`base_window`] or relations just past the window go unseen.
pub fn thh(input: &ThhInput, t_max: i64) -> Result<ThhOutput> {
    let e2 = hh_of_free(&input.base)?;
    let einf = bokstedt_run(&e2, t_max)?;
    let mut out = resolve_extensions(&einf, input)?;
    if einf.len() != e2.len() {
        out.notes.insert(0, "Bökstedt d^(p-1) turned divided powers into truncated algebras".into());
    }
    let pres = &out.presentation;
    let keep: Vec<usize> = (0..pres.len()).filter(|&g| pres.generators[g].degree as i64 <= t_max).collect();
    if keep.len() != pres.len() {
        // Entries reaching past the window become unknown, not zero.
        out.presentation = pres.restrict(&keep);
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
