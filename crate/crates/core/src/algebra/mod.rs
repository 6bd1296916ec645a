//! Free graded-commutative algebras over F_p: generators, monomials, elements
//! and the presentation that ties them together with σ, Bockstein and
//! Dyer–Lashof tables.

mod basis;
mod derivation;
mod element;
mod graded;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use derivation::{Derivation, Missing};
pub use element::Element;
pub use basis::convolve;
pub use graded::GradedBasis;

use crate::error::{Error, Result};
use crate::fp::Prime;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "height")]
pub enum GenKind {
    Polynomial,
    Exterior,
    /// `x^h = 0`.
    Truncated(u32),
    DividedPower,
}

impl GenKind {
    /// Largest exponent a monomial may carry, if bounded.
    pub fn max_exponent(self) -> Option<u32> {
        match self {
            GenKind::Exterior => Some(1),
            GenKind::Truncated(h) => Some(h - 1),
            GenKind::Polynomial | GenKind::DividedPower => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
    pub kind: GenKind,
    /// Filtration of the generator; only 0 is used by the page engine.
    #[serde(default)]
    pub filtration: i32,
    /// Member of an evenly graded sub-algebra that is closed under the
    /// Dyer–Lashof operations, so odd-degree operations on it vanish.
    #[serde(default)]
    pub even_closed: bool,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: u32, kind: GenKind) -> Self {
        Generator { name: name.into(), degree, kind, filtration: 0, even_closed: false }
    }

    pub fn is_odd(&self) -> bool {
        self.degree % 2 == 1
    }
}

/// Exponent vector indexed by generator position. For divided-power
/// generators the exponent `j` stands for `γ_j`.
///
/// The ordering is the canonical basis order: lexicographic by generator
/// declaration order with larger exponents first.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn generator(n: usize, i: usize, e: u32) -> Self {
        let mut m = Monomial::one(n);
        m.0[i] = e;
        m
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i, e))
    }

    /// Number of generator factors counted with multiplicity.
    pub fn length(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.cmp(&self.0)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Key of a Dyer–Lashof table entry: `β^ε Q^i` applied to a generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DlKey {
    pub epsilon: u8,
    pub i: i64,
    pub generator: usize,
}

/// A free graded-commutative F_p-algebra with σ, Bockstein and Dyer–Lashof
/// action tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub p: Prime,
    pub generators: Vec<Generator>,
    /// σ on generators; absent entries are zero.
    pub sigma: Vec<Option<Element>>,
    /// Bockstein on generators; absent entries are undetermined.
    pub bockstein: Vec<Option<Element>>,
    pub dl: BTreeMap<DlKey, Element>,
    pub commutative: bool,
    pub evenly_graded: bool,
}

impl Presentation {
    pub fn new(p: Prime, generators: Vec<Generator>) -> Result<Self> {
        let n = generators.len();
        let pres = Presentation {
            p,
            generators,
            sigma: vec![None; n],
            bockstein: vec![None; n],
            dl: BTreeMap::new(),
            commutative: true,
            evenly_graded: false,
        };
        pres.validate_generators()?;
        Ok(pres)
    }

    /// The ground field, presented with no generators.
    pub fn trivial(p: Prime) -> Self {
        Presentation::new(p, Vec::new()).expect("no generators to validate")
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn validate_generators(&self) -> Result<()> {
        let odd_p = !self.p.is_two();
        let mut seen = std::collections::HashSet::new();
        for g in &self.generators {
            let bad = |reason: &str| {
                Err(Error::InvalidGenerator { name: g.name.clone(), reason: reason.into() })
            };
            if !seen.insert(g.name.as_str()) {
                return bad("duplicate name");
            }
            if g.degree == 0 {
                return bad("degree-0 generators are not supported");
            }
            if g.filtration > 0 || g.filtration % 2 != 0 {
                return bad("filtration must be even and non-positive");
            }
            match g.kind {
                GenKind::Exterior if odd_p && !g.is_odd() => {
                    return bad("exterior generators must have odd degree when p is odd")
                }
                GenKind::DividedPower if odd_p && g.is_odd() => {
                    return bad("divided-power generators must have even degree when p is odd")
                }
                GenKind::Polynomial | GenKind::Truncated(_) if odd_p && g.is_odd() => {
                    return bad("odd-degree generators must be exterior when p is odd")
                }
                GenKind::Truncated(h) if h < 2 => return bad("truncation height must be at least 2"),
                _ => {}
            }
            if self.evenly_graded && g.is_odd() {
                return bad("presentation is declared evenly graded");
            }
        }
        Ok(())
    }

    /// Full validation: generators plus degree bookkeeping of all tables.
    pub fn validate(&self) -> Result<()> {
        self.validate_generators()?;
        for (i, v) in self.sigma.iter().enumerate() {
            if let Some(v) = v {
                self.check_element(v)?;
                let want = self.generators[i].degree as i64 + 1;
                if !v.is_zero() && v.degree() != want {
                    return Err(Error::DegreeMismatch(format!(
                        "σ({}) has degree {}, expected {want}",
                        self.generators[i].name,
                        v.degree()
                    )));
                }
            }
        }
        for (i, v) in self.bockstein.iter().enumerate() {
            if let Some(v) = v {
                self.check_element(v)?;
                let want = self.generators[i].degree as i64 - 1;
                if !v.is_zero() && v.degree() != want {
                    return Err(Error::DegreeMismatch(format!(
                        "β({}) has degree {}, expected {want}",
                        self.generators[i].name,
                        v.degree()
                    )));
                }
            }
        }
        for (key, v) in &self.dl {
            self.check_element(v)?;
            let want = self.dl_degree(key.epsilon, key.i, self.generators[key.generator].degree as i64);
            if !v.is_zero() && v.degree() != want {
                return Err(Error::DegreeMismatch(format!(
                    "{} has degree {}, expected {want}",
                    self.dl_name(key),
                    v.degree()
                )));
            }
        }
        Ok(())
    }

    /// Degree of `β^ε Q^i(x)` for `|x| = d`.
    pub fn dl_degree(&self, epsilon: u8, i: i64, d: i64) -> i64 {
        if self.p.is_two() {
            d + i
        } else {
            d + 2 * i * (self.p.value() as i64 - 1) - epsilon as i64
        }
    }

    pub fn dl_name(&self, key: &DlKey) -> String {
        let b = if key.epsilon == 1 { "βQ" } else { "Q" };
        format!("{b}^{}({})", key.i, self.generators[key.generator].name)
    }

    pub fn check_element(&self, e: &Element) -> Result<()> {
        if e.terms().keys().any(|m| m.width() != self.len()) {
            return Err(Error::MixedPresentations);
        }
        Ok(())
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.generators
            .iter()
            .position(|g| g.name == name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn monomial_degree(&self, m: &Monomial) -> i64 {
        m.support().map(|(i, e)| e as i64 * self.generators[i].degree as i64).sum()
    }

    pub fn one(&self) -> Element {
        Element::monomial(Monomial::one(self.len()), 1, 0, self.p)
    }

    pub fn zero(&self, degree: i64) -> Element {
        Element::zero(degree)
    }

    pub fn gen(&self, i: usize) -> Element {
        Element::monomial(
            Monomial::generator(self.len(), i, 1),
            1,
            self.generators[i].degree as i64,
            self.p,
        )
    }

    pub fn gen_named(&self, name: &str) -> Result<Element> {
        Ok(self.gen(self.index_of(name)?))
    }

    pub fn monomial_element(&self, m: Monomial) -> Element {
        let d = self.monomial_degree(&m);
        Element::monomial(m, 1, d, self.p)
    }

    /// Product of two monomials as `(monomial, coefficient)`; `None` if zero.
    pub fn mul_monomials(&self, a: &Monomial, b: &Monomial) -> Option<(Monomial, u32)> {
        let p = self.p;
        let mut coeff = 1u32;
        let mut out = Vec::with_capacity(a.width());
        for (i, g) in self.generators.iter().enumerate() {
            let (x, y) = (a.0[i], b.0[i]);
            let e = x + y;
            if x > 0 && y > 0 {
                match g.kind {
                    GenKind::Exterior => return None,
                    GenKind::Truncated(h) if e >= h => return None,
                    GenKind::DividedPower => {
                        coeff = p.mul(coeff, p.binomial(e as u64, x as u64));
                        if coeff == 0 {
                            return None;
                        }
                    }
                    _ => {}
                }
            }
            out.push(e);
        }
        if !p.is_two() {
            // Move each odd factor of `b` left past the odd factors of `a`
            // that come later in the order.
            let mut swaps = 0u64;
            let mut later_odd_in_a = 0u64;
            for i in (0..self.len()).rev() {
                if self.generators[i].is_odd() {
                    swaps += b.0[i] as u64 * later_odd_in_a;
                    later_odd_in_a += a.0[i] as u64;
                }
            }
            if swaps % 2 == 1 {
                coeff = p.neg(coeff);
            }
        }
        Some((Monomial(out), coeff))
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check_element(a)?;
        self.check_element(b)?;
        let degree = a.degree() + b.degree();
        let mut out = Element::zero(degree);
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                if let Some((m, c)) = self.mul_monomials(ma, mb) {
                    out.add_term(m, self.p.mul(self.p.mul(*ca, *cb), c), self.p);
                }
            }
        }
        Ok(out)
    }

    pub fn multiply_all<'a>(&self, factors: impl IntoIterator<Item = &'a Element>) -> Result<Element> {
        let mut acc = self.one();
        for f in factors {
            acc = self.multiply(&acc, f)?;
        }
        Ok(acc)
    }

    pub fn power(&self, a: &Element, n: u32) -> Result<Element> {
        let mut acc = self.one();
        for _ in 0..n {
            acc = self.multiply(&acc, a)?;
        }
        Ok(acc)
    }

    /// `a + c * b`.
    pub fn add_scaled(&self, a: &Element, b: &Element, c: u32) -> Result<Element> {
        a.add_scaled(b, c, self.p)
    }

    /// Sub-presentation on the listed generators (in the given order), with
    /// tables restricted to entries that stay inside it.
    pub fn restrict(&self, gens: &[usize]) -> Presentation {
        let local: BTreeMap<usize, usize> = gens.iter().enumerate().map(|(l, &g)| (g, l)).collect();
        let project = |e: &Element| -> Option<Element> { e.reindex(&local, gens.len()) };
        let generators = gens.iter().map(|&g| self.generators[g].clone()).collect();
        let sigma = gens.iter().map(|&g| self.sigma[g].as_ref().and_then(project)).collect();
        let bockstein = gens.iter().map(|&g| self.bockstein[g].as_ref().and_then(project)).collect();
        let dl = self
            .dl
            .iter()
            .filter_map(|(k, v)| {
                let &generator = local.get(&k.generator)?;
                Some((DlKey { generator, ..*k }, project(v)?))
            })
            .collect();
        Presentation {
            p: self.p,
            generators,
            sigma,
            bockstein,
            dl,
            commutative: self.commutative,
            evenly_graded: self.evenly_graded,
        }
    }

    /// Image of `e` under the algebra map sending source generator `i` to
    /// `images[i]` (elements of `self`). Divided powers `γ_j` map to
    /// `x^j / j!`, which needs `j < p`.
    pub fn hom_image(&self, source: &Presentation, images: &[Element], e: &Element) -> Result<Element> {
        let p = self.p;
        let mut out: Option<Element> = None;
        for (m, &c) in e.terms() {
            let mut term = self.one().scaled(c, p);
            for (i, j) in m.support() {
                let mut factor = self.power(&images[i], j)?;
                if source.generators[i].kind == GenKind::DividedPower {
                    if j >= p.value() {
                        return Err(Error::Unsupported(format!(
                            "divided power γ_{j}({}) has no polynomial image",
                            source.generators[i].name
                        )));
                    }
                    let fact = (1..=j).fold(1, |acc, n| p.mul(acc, n));
                    factor = factor.scaled(p.inv(fact), p);
                }
                term = self.multiply(&term, &factor)?;
            }
            out = Some(match out {
                None => term,
                Some(acc) => acc.add(&term, p)?,
            });
        }
        Ok(out.unwrap_or_else(|| Element::zero(e.degree())))
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        if m.is_one() {
            return "1".into();
        }
        let parts: Vec<String> = m
            .support()
            .map(|(i, e)| {
                let g = &self.generators[i];
                match (g.kind, e) {
                    (GenKind::DividedPower, e) => format!("{}[{e}]", g.name),
                    (_, 1) => g.name.clone(),
                    (_, e) => format!("{}^{e}", g.name),
                }
            })
            .collect();
        parts.join("*")
    }

    /// Renders an element in the input expression grammar.
    pub fn format_element(&self, e: &Element) -> String {
        if e.is_zero() {
            return "0".into();
        }
        let pv = self.p.value();
        let mut out = String::new();
        for (k, (m, &c)) in e.terms().iter().enumerate() {
            let (neg, mag) = if pv > 2 && c == pv - 1 { (true, 1) } else { (false, c) };
            let body = if m.is_one() {
                mag.to_string()
            } else if mag == 1 {
                self.format_monomial(m)
            } else {
                format!("{mag}*{}", self.format_monomial(m))
            };
            match (k, neg) {
                (0, false) => out.push_str(&body),
                (0, true) => out.push_str(&format!("-{body}")),
                (_, false) => out.push_str(&format!(" + {body}")),
                (_, true) => out.push_str(&format!(" - {body}")),
            }
        }
        out
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let describe = |k: GenKind| match k {
            GenKind::Polynomial => "P".to_string(),
            GenKind::Exterior => "E".to_string(),
            GenKind::Truncated(h) => format!("P_{h}"),
            GenKind::DividedPower => "Γ".to_string(),
        };
        let parts: Vec<String> = self
            .generators
            .iter()
            .map(|g| format!("{}({}; |{}|={})", describe(g.kind), g.name, g.name, g.degree))
            .collect();
        if parts.is_empty() {
            write!(f, "F_{}", self.p)
        } else {
            write!(f, "{}", parts.join(" ⊗ "))
        }
    }
}

#[cfg(test)]
mod tests;
