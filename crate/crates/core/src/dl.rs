//! Dyer–Lashof operations `β^ε Q^i` evaluated from instability, the bottom
//! operation, declared tables, the Cartan formula and parity vanishing.

use std::collections::HashMap;

use crate::algebra::{Derivation, DlKey, Element, Missing, Monomial, Presentation};
use crate::error::{Error, Result};

/// Value of an operation, or `Unknown` when no rule decides it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DlValue {
    Known(Element),
    Unknown,
}

impl DlValue {
    pub fn known(self) -> Option<Element> {
        match self {
            DlValue::Known(e) => Some(e),
            DlValue::Unknown => None,
        }
    }
}

/// Evaluator with a per-query cache; create one per presentation.
pub struct DlOps<'a> {
    pres: &'a Presentation,
    cache: HashMap<(u8, i64, Monomial), Option<Element>>,
}

impl<'a> DlOps<'a> {
    pub fn new(pres: &'a Presentation) -> Self {
        DlOps { pres, cache: HashMap::new() }
    }

    /// `β^ε Q^i(x)`; linear in `x`.
    pub fn apply(&mut self, epsilon: u8, i: i64, x: &Element) -> Result<DlValue> {
        let pres = self.pres;
        pres.check_element(x)?;
        if epsilon > 1 || (pres.p.is_two() && epsilon == 1) {
            return Err(Error::Unsupported(
                "at p = 2 only the single-index operations Q^i are used".into(),
            ));
        }
        let degree = if x.is_zero() { x.degree() } else { pres.dl_degree(epsilon, i, x.degree()) };
        let mut out = Element::zero(degree);
        for (m, &c) in x.terms() {
            match self.on_monomial(epsilon, i, m)? {
                Some(v) => out = out.add_scaled(&v, c, pres.p)?,
                None => return Ok(DlValue::Unknown),
            }
        }
        Ok(DlValue::Known(out.with_degree(degree)))
    }

    fn on_monomial(&mut self, epsilon: u8, i: i64, m: &Monomial) -> Result<Option<Element>> {
        let key = (epsilon, i, m.clone());
        if let Some(v) = self.cache.get(&key) {
            return Ok(v.clone());
        }
        let v = self.resolve(epsilon, i, m)?;
        self.cache.insert(key, v.clone());
        Ok(v)
    }

    fn resolve(&mut self, epsilon: u8, i: i64, m: &Monomial) -> Result<Option<Element>> {
        let pres = self.pres;
        let p = pres.p;
        let d = pres.monomial_degree(m);
        let out_degree = pres.dl_degree(epsilon, i, d);
        let zero = Some(Element::zero(out_degree));
        if m.is_one() {
            return Ok(if i == 0 && epsilon == 0 { Some(pres.one()) } else { zero });
        }
        // Instability.
        let below = if p.is_two() { i < d } else { 2 * i - (epsilon as i64) < d };
        if below {
            return Ok(zero);
        }
        // Bottom operation.
        let monomial = pres.monomial_element(m.clone());
        if p.is_two() && i == d {
            return Ok(Some(pres.multiply(&monomial, &monomial)?));
        }
        if !p.is_two() && d % 2 == 0 && epsilon == 0 && 2 * i == d {
            return Ok(Some(pres.power(&monomial, p.value())?));
        }
        let single = m.support().collect::<Vec<_>>();
        if let [(g, 1)] = single[..] {
            if let Some(v) = pres.dl.get(&DlKey { epsilon, i, generator: g }) {
                return Ok(Some(v.clone().with_degree(out_degree)));
            }
            if epsilon == 1 {
                if let Some(q) = pres.dl.get(&DlKey { epsilon: 0, i, generator: g }) {
                    if let Some(b) = self.bockstein(q)? {
                        return Ok(Some(b.with_degree(out_degree)));
                    }
                }
            }
        } else if let Some(v) = self.cartan(epsilon, i, m)? {
            return Ok(Some(v.with_degree(out_degree)));
        }
        if out_degree % 2 != 0 && self.even_closed(m) {
            return Ok(zero);
        }
        Ok(None)
    }

    fn even_closed(&self, m: &Monomial) -> bool {
        self.pres.evenly_graded || m.support().all(|(g, _)| self.pres.generators[g].even_closed)
    }

    /// Splits `m = a * rest` at its first generator and expands by Cartan.
    fn cartan(&mut self, epsilon: u8, i: i64, m: &Monomial) -> Result<Option<Element>> {
        let pres = self.pres;
        let p = pres.p;
        let (g, _) = m.support().next().expect("non-unit monomial");
        let a = Monomial::generator(pres.len(), g, 1);
        let mut rest = m.clone();
        rest.0[g] -= 1;
        let (prod, c) = match pres.mul_monomials(&a, &rest) {
            Some(x) => x,
            None => return Ok(None),
        };
        debug_assert_eq!(&prod, m);
        let da = pres.monomial_degree(&a);
        let mut total = Element::zero(pres.dl_degree(epsilon, i, pres.monomial_degree(m)));
        // Each summand is a product of an operation on `a` and one on `rest`.
        let mut parts: Vec<(u8, u8, u32)> = vec![(0, 0, 1)];
        if epsilon == 1 {
            parts = vec![(1, 0, 1), (0, 1, p.sign(da % 2 != 0))];
        }
        for j in 0..=i {
            for &(ea, eb, sign) in &parts {
                let qa = match self.on_monomial(ea, j, &a)? {
                    Some(v) if v.is_zero() => continue,
                    Some(v) => Some(v),
                    None => None,
                };
                let qb = match self.on_monomial(eb, i - j, &rest)? {
                    Some(v) if v.is_zero() => continue,
                    Some(v) => Some(v),
                    None => None,
                };
                match (qa, qb) {
                    (Some(x), Some(y)) => {
                        let term = pres.multiply(&x, &y)?;
                        total = total.add_scaled(&term, sign, p)?;
                    }
                    _ => return Ok(None),
                }
            }
        }
        Ok(Some(total.scaled(p.inv(c), p)))
    }

    /// Bockstein of an element. Generators without a declared value are
    /// treated as unknown unless parity forces zero.
    pub fn bockstein(&self, x: &Element) -> Result<Option<Element>> {
        let pres = self.pres;
        let images: Vec<Option<Element>> = pres
            .bockstein
            .iter()
            .zip(&pres.generators)
            .map(|(b, g)| match b {
                Some(v) => Some(v.clone()),
                None if (pres.evenly_graded || g.even_closed) && g.degree % 2 == 0 => {
                    Some(Element::zero(g.degree as i64 - 1))
                }
                None => None,
            })
            .collect();
        Derivation { pres, images: &images, shift: -1, missing: Missing::Unknown }.apply(x)
    }
}

/// Convenience wrapper around a fresh evaluator.
pub fn apply_q(pres: &Presentation, epsilon: u8, i: i64, x: &Element) -> Result<DlValue> {
    DlOps::new(pres).apply(epsilon, i, x)
}

/// Table entries that violate degree arithmetic, instability or the bottom
/// operation. An empty list means the table passed.
pub fn validate_table(pres: &Presentation) -> Vec<String> {
    let p = pres.p;
    let mut out = Vec::new();
    for (key, v) in &pres.dl {
        let name = pres.dl_name(key);
        let g = &pres.generators[key.generator];
        let d = g.degree as i64;
        if p.is_two() && key.epsilon == 1 {
            out.push(format!("{name}: p = 2 uses single-index operations only"));
            continue;
        }
        let want = pres.dl_degree(key.epsilon, key.i, d);
        if !v.is_zero() && v.degree() != want {
            out.push(format!("{name}: value has degree {}, expected {want}", v.degree()));
        }
        if let Some(bad) = v.terms().keys().find(|m| m.width() != pres.len()) {
            out.push(format!("{name}: value uses an undeclared generator ({} slots)", bad.width()));
            continue;
        }
        let below = if p.is_two() { key.i < d } else { 2 * key.i - (key.epsilon as i64) < d };
        if below && !v.is_zero() {
            out.push(format!("{name}: nonzero below the instability range"));
        }
        let x = pres.gen(key.generator);
        let bottom = if p.is_two() && key.i == d {
            pres.multiply(&x, &x).ok()
        } else if !p.is_two() && d % 2 == 0 && key.epsilon == 0 && 2 * key.i == d {
            pres.power(&x, p.value()).ok()
        } else {
            None
        };
        if let Some(b) = bottom {
            if b != v.clone().with_degree(b.degree()) {
                out.push(format!("{name}: bottom operation must equal the p-th power"));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests;
