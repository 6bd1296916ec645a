use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Monomial;
use crate::error::{Error, Result};
use crate::fp::Prime;

/// A homogeneous F_p-linear combination of monomials. Zero coefficients are
/// never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Element {
    degree: i64,
    terms: BTreeMap<Monomial, u32>,
}

impl Element {
    pub fn zero(degree: i64) -> Self {
        Element { degree, terms: BTreeMap::new() }
    }

    pub fn monomial(m: Monomial, coeff: u32, degree: i64, p: Prime) -> Self {
        let mut e = Element::zero(degree);
        e.add_term(m, coeff, p);
        e
    }

    /// Builds an element from terms whose degrees are given by `degree_of`;
    /// fails on inhomogeneous input.
    pub fn from_terms(
        terms: impl IntoIterator<Item = (Monomial, u32)>,
        p: Prime,
        degree_of: impl Fn(&Monomial) -> i64,
        default_degree: i64,
    ) -> Result<Self> {
        let mut degree = None;
        let mut out = Element::zero(default_degree);
        for (m, c) in terms {
            if c % p.value() == 0 {
                continue;
            }
            let d = degree_of(&m);
            match degree {
                None => degree = Some(d),
                Some(d0) if d0 != d => return Err(Error::Inhomogeneous),
                _ => {}
            }
            out.add_term(m, c, p);
        }
        if let Some(d) = degree {
            out.degree = d;
        }
        Ok(out)
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, u32> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> u32 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// The single monomial of a one-term element with coefficient 1.
    pub fn as_monomial(&self) -> Option<&Monomial> {
        match self.terms.iter().next() {
            Some((m, 1)) if self.terms.len() == 1 => Some(m),
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: u32, p: Prime) {
        let c = c % p.value();
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = p.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// `self + c * other`. Zero elements are compatible with any degree.
    pub fn add_scaled(&self, other: &Element, c: u32, p: Prime) -> Result<Element> {
        if !self.is_zero() && !other.is_zero() && self.degree != other.degree {
            return Err(Error::Inhomogeneous);
        }
        let mut out = self.clone();
        if self.is_zero() {
            out.degree = other.degree;
        }
        for (m, &v) in &other.terms {
            out.add_term(m.clone(), p.mul(v, c), p);
        }
        Ok(out)
    }

    pub fn add(&self, other: &Element, p: Prime) -> Result<Element> {
        self.add_scaled(other, 1, p)
    }

    pub fn sub(&self, other: &Element, p: Prime) -> Result<Element> {
        self.add_scaled(other, p.value() - 1, p)
    }

    pub fn scaled(&self, c: u32, p: Prime) -> Element {
        let mut out = Element::zero(self.degree);
        for (m, &v) in &self.terms {
            out.add_term(m.clone(), p.mul(v, c), p);
        }
        out
    }

    pub fn with_degree(mut self, degree: i64) -> Element {
        if self.is_zero() {
            self.degree = degree;
        }
        self
    }

    /// Moves the element into another presentation whose generator `j` is
    /// generator `i` here when `map[i] = j`. Returns `None` if the support
    /// leaves the map.
    pub fn reindex(&self, map: &BTreeMap<usize, usize>, width: usize) -> Option<Element> {
        let mut out = Element::zero(self.degree);
        for (m, &c) in &self.terms {
            let mut e = vec![0; width];
            for (i, x) in m.support() {
                e[*map.get(&i)?] = x;
            }
            out.terms.insert(Monomial(e), c);
        }
        Some(out)
    }

    /// Generator indices occurring in the element.
    pub fn support(&self) -> std::collections::BTreeSet<usize> {
        self.terms.keys().flat_map(|m| m.support().map(|(i, _)| i).collect::<Vec<_>>()).collect()
    }
}
