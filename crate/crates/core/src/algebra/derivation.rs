use super::{Element, GenKind, Monomial, Presentation};
use crate::error::{Error, Result};

/// How a derivation treats generators without a declared image.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Missing {
    Zero,
    Unknown,
}

/// An odd-degree derivation given on generators and extended by the
/// Leibniz rule `D(xy) = D(x)y + (-1)^{|x|} x D(y)`.
#[derive(Clone, Copy, Debug)]
pub struct Derivation<'a> {
    pub pres: &'a Presentation,
    pub images: &'a [Option<Element>],
    pub shift: i64,
    pub missing: Missing,
}

impl<'a> Derivation<'a> {
    pub fn sigma(pres: &'a Presentation) -> Self {
        Derivation { pres, images: &pres.sigma, shift: 1, missing: Missing::Zero }
    }

    pub fn bockstein(pres: &'a Presentation) -> Self {
        Derivation { pres, images: &pres.bockstein, shift: -1, missing: Missing::Unknown }
    }

    fn image(&self, g: usize) -> Result<Option<Element>> {
        let want = self.pres.generators[g].degree as i64 + self.shift;
        match self.images.get(g).and_then(|v| v.as_ref()) {
            Some(v) if !v.is_zero() && v.degree() != want => Err(Error::DegreeMismatch(format!(
                "derivation value on {} has degree {}, expected {want}",
                self.pres.generators[g].name,
                v.degree()
            ))),
            Some(v) => Ok(Some(v.clone().with_degree(want))),
            None => Ok(match self.missing {
                Missing::Zero => Some(Element::zero(want)),
                Missing::Unknown => None,
            }),
        }
    }

    /// `D(m)`, or `None` when an undetermined generator value is needed.
    pub fn apply_monomial(&self, m: &Monomial) -> Result<Option<Element>> {
        let pres = self.pres;
        let p = pres.p;
        let degree = pres.monomial_degree(m) + self.shift;
        let mut out = Element::zero(degree);
        let mut prefix = Monomial::one(pres.len());
        let mut prefix_degree = 0i64;
        for (i, g) in pres.generators.iter().enumerate() {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            // D(g^e) = c * g^(e-1) * D(g); for divided powers c = 1.
            let c = match g.kind {
                GenKind::DividedPower => 1,
                _ => e % p.value(),
            };
            if c != 0 {
                let dg = match self.image(i)? {
                    Some(v) => v,
                    None => return Ok(None),
                };
                if !dg.is_zero() {
                    let mut rest = m.clone();
                    for (j, x) in rest.0.iter_mut().enumerate() {
                        if j < i {
                            *x = 0;
                        }
                    }
                    rest.0[i] = e - 1;
                    let sign = p.sign(prefix_degree % 2 != 0);
                    let head = pres.monomial_element(prefix.clone());
                    let lhs = pres.multiply(&head, &dg)?;
                    let tail = pres.monomial_element(rest);
                    let term = pres.multiply(&lhs, &tail)?;
                    out = out.add_scaled(&term, p.mul(sign, c), p)?;
                }
            }
            prefix.0[i] = e;
            prefix_degree += e as i64 * g.degree as i64;
        }
        Ok(Some(out.with_degree(degree)))
    }

    pub fn apply(&self, x: &Element) -> Result<Option<Element>> {
        self.pres.check_element(x)?;
        let degree = x.degree() + self.shift;
        let mut out = Element::zero(degree);
        for (m, &c) in x.terms() {
            match self.apply_monomial(m)? {
                Some(v) => out = out.add_scaled(&v, c, self.pres.p)?,
                None => return Ok(None),
            }
        }
        Ok(Some(out.with_degree(degree)))
    }
}
