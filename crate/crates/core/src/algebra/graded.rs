use std::collections::HashMap;

use super::{Element, Monomial, Presentation};
use crate::error::{Error, Result};
use crate::linalg::{FpVector, Matrix};

/// Monomial bases of a presentation in degrees `0..=t_max`, with lookup
/// tables for converting between elements and coordinate vectors.
#[derive(Clone, Debug)]
pub struct GradedBasis {
    pub t_max: i64,
    bases: Vec<Vec<Monomial>>,
    index: Vec<HashMap<Monomial, usize>>,
}

impl GradedBasis {
    pub fn new(pres: &Presentation, t_max: i64) -> Result<Self> {
        let bases = pres.bases_up_to(t_max)?;
        let index = bases
            .iter()
            .map(|b| b.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect())
            .collect();
        Ok(GradedBasis { t_max, bases, index })
    }

    pub fn dim(&self, t: i64) -> usize {
        self.basis(t).len()
    }

    pub fn basis(&self, t: i64) -> &[Monomial] {
        if t < 0 || t > self.t_max {
            return &[];
        }
        &self.bases[t as usize]
    }

    pub fn position(&self, t: i64, m: &Monomial) -> Option<usize> {
        if t < 0 || t > self.t_max {
            return None;
        }
        self.index[t as usize].get(m).copied()
    }

    pub fn to_vector(&self, pres: &Presentation, e: &Element) -> Result<FpVector> {
        let t = e.degree();
        if t > self.t_max {
            return Err(Error::OutsideWindow { t, t_max: self.t_max });
        }
        let mut v = FpVector::zero(pres.p, self.dim(t));
        for (m, &c) in e.terms() {
            let i = self.position(t, m).ok_or_else(|| {
                Error::Inconsistent(format!("{} is not a basis monomial", pres.format_monomial(m)))
            })?;
            v.set(i, c);
        }
        Ok(v)
    }

    pub fn to_element(&self, pres: &Presentation, t: i64, v: &FpVector) -> Element {
        let mut e = Element::zero(t);
        for (i, c) in v.iter_nonzero() {
            e.add_term(self.bases[t as usize][i].clone(), c, pres.p);
        }
        e
    }

    /// Matrix of a linear operator of degree `shift` from degree `t`, given
    /// on monomials. `None` from the operator aborts with `None`.
    pub fn operator_matrix(
        &self,
        pres: &Presentation,
        t: i64,
        shift: i64,
        mut f: impl FnMut(&Monomial) -> Result<Option<Element>>,
    ) -> Result<Option<Matrix>> {
        let target = t + shift;
        let cols = self.dim(target);
        let mut rows = Vec::with_capacity(self.dim(t));
        for m in self.basis(t) {
            let img = match f(m)? {
                Some(e) => e,
                None => return Ok(None),
            };
            if img.is_zero() {
                rows.push(FpVector::zero(pres.p, cols));
            } else {
                rows.push(self.to_vector(pres, &img)?);
            }
        }
        Ok(Some(Matrix::from_rows(pres.p, cols, rows)))
    }
}
