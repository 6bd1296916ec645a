//! JSON input format. Generator families use name templates such as
//! `xi{k}` or `b{p^k-1}` and a `degree_formula` in `k` and `p`.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::algebra::{DlKey, Element, GenKind, Generator, Presentation};
use crate::bokstedt::Witness;
use crate::error::{Error, Result};
use crate::expr::parse_element;
use crate::fp::Prime;

/// Largest family index considered when instantiating templates.
const MIN_FAMILY_SPAN: i64 = 64;

/// Family indices tried when instantiating a template on a window. Degree
/// formulas grow at least linearly in k, so members past `t_top` lie
/// outside the window.
fn family_span(t_top: i64) -> i64 {
    t_top.max(MIN_FAMILY_SPAN)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecKind {
    /// H_*(B); the THH pipeline produces the ring the spectral sequence runs on.
    #[default]
    Ring,
    Base,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindName {
    Polynomial,
    Exterior,
    Truncated,
    DividedPower,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntOrFormula {
    Int(i64),
    Formula(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_formula: Option<String>,
    pub kind: KindName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family_start: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family_end: Option<i64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub even_closed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteSpec {
    pub generator: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DlSpec {
    #[serde(default)]
    pub epsilon: u8,
    pub i: IntOrFormula,
    pub generator: String,
    pub value: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    #[serde(default)]
    pub commutative: bool,
    #[serde(default)]
    pub evenly_graded: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_min: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSpec {
    pub source: Box<SpecFile>,
    /// Images of source generators; unlisted generators map to zero.
    pub map: Vec<RewriteSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub p: u32,
    #[serde(default)]
    pub kind: SpecKind,
    pub generators: Vec<GeneratorSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sigma: Vec<RewriteSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bockstein: Vec<RewriteSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dyer_lashof: Vec<DlSpec>,
    #[serde(default)]
    pub flags: Flags,
    #[serde(default)]
    pub options: Options,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessSpec>,
}

/// A spec file instantiated on a window.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub name: Option<String>,
    pub kind: SpecKind,
    pub presentation: Presentation,
    pub witness: Option<Witness>,
    pub options: Options,
}

impl Loaded {
    pub fn commutative(&self) -> bool {
        self.presentation.commutative
    }
}

impl SpecFile {
    pub fn from_json(text: &str) -> Result<SpecFile> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec files always serialize")
    }

    /// Instantiates generators of degree at most `t_top` and the table
    /// entries among them.
    pub fn load(&self, t_top: i64) -> Result<Loaded> {
        let p = Prime::new(self.p)?;
        let pv = self.p as i64;
        let mut gens = Vec::new();
        let mut declared = HashSet::new();
        for g in &self.generators {
            let kind = match (g.kind, g.height) {
                (KindName::Polynomial, _) => GenKind::Polynomial,
                (KindName::Exterior, _) => GenKind::Exterior,
                (KindName::DividedPower, _) => GenKind::DividedPower,
                (KindName::Truncated, Some(h)) => GenKind::Truncated(h),
                (KindName::Truncated, None) => {
                    return Err(Error::InvalidGenerator {
                        name: g.name.clone(),
                        reason: "truncated generators need a height".into(),
                    })
                }
            };
            let ks: Vec<Option<i64>> = if is_template(&g.name) {
                let start = g.family_start.unwrap_or(1);
                let end = g.family_end.unwrap_or(start + family_span(t_top));
                (start..=end).map(Some).collect()
            } else {
                vec![None]
            };
            for k in ks {
                let vars = Vars { k, p: pv };
                let name = match instantiate(&g.name, vars) {
                    Ok(n) => n,
                    Err(_) if k.is_some() => break,
                    Err(e) => return Err(e),
                };
                let degree = match (&g.degree, &g.degree_formula) {
                    (Some(d), None) => *d as i64,
                    (None, Some(f)) => match eval_formula(f, vars) {
                        Ok(d) => d,
                        Err(_) if k.is_some() => break,
                        Err(e) => return Err(e),
                    },
                    _ => {
                        return Err(Error::InvalidGenerator {
                            name,
                            reason: "give exactly one of degree and degree_formula".into(),
                        })
                    }
                };
                declared.insert(name.clone());
                if degree > t_top {
                    continue;
                }
                if degree < 0 || degree > u32::MAX as i64 {
                    return Err(Error::InvalidGenerator { name, reason: "degree out of range".into() });
                }
                gens.push(Generator { even_closed: g.even_closed, ..Generator::new(name, degree as u32, kind) });
            }
        }
        let mut pres = Presentation::new(p, gens)?;
        pres.commutative = self.flags.commutative;
        pres.evenly_graded = self.flags.evenly_graded;
        pres.validate_generators()?;
        for (entries, is_sigma) in [(&self.sigma, true), (&self.bockstein, false)] {
            for e in entries {
                for (g, value) in expand_rewrite(&pres, &declared, &e.generator, &e.value, pv, t_top)? {
                    let want = pres.generators[g].degree as i64 + if is_sigma { 1 } else { -1 };
                    let value = value.with_degree(want);
                    if is_sigma {
                        pres.sigma[g] = Some(value);
                    } else {
                        pres.bockstein[g] = Some(value);
                    }
                }
            }
        }
        for e in &self.dyer_lashof {
            for k in family_range(&e.generator, &e.value, t_top) {
                let vars = Vars { k, p: pv };
                let Some((g, value)) = resolve_one(&pres, &declared, &e.generator, &e.value, vars)? else {
                    continue;
                };
                let i = match &e.i {
                    IntOrFormula::Int(i) => *i,
                    IntOrFormula::Formula(f) => eval_formula(f, vars)?,
                };
                let key = DlKey { epsilon: e.epsilon, i, generator: g };
                let want = pres.dl_degree(e.epsilon, i, pres.generators[g].degree as i64);
                pres.dl.insert(key, value.with_degree(want));
            }
        }
        pres.validate()?;
        let witness = match &self.witness {
            None => None,
            Some(w) => {
                let source = w.source.load(t_top)?.presentation;
                let mut images: Vec<Element> =
                    source.generators.iter().map(|g| Element::zero(g.degree as i64)).collect();
                let src_declared = w.source.declared_names(t_top)?;
                for entry in &w.map {
                    for k in family_range(&entry.generator, &entry.value, t_top) {
                        let vars = Vars { k, p: pv };
                        let name = match instantiate(&entry.generator, vars) {
                            Ok(n) => n,
                            Err(_) if k.is_some() => continue,
                            Err(e) => return Err(e),
                        };
                        let Ok(g) = source.index_of(&name) else {
                            if src_declared.contains(&name) || k.is_some() {
                                continue;
                            }
                            return Err(Error::UnknownGenerator(name));
                        };
                        if let Some(v) = parse_value(&pres, &declared, &entry.value, vars)? {
                            images[g] = v.with_degree(source.generators[g].degree as i64);
                        }
                    }
                }
                Some(Witness { source, images })
            }
        };
        Ok(Loaded { name: self.name.clone(), kind: self.kind, presentation: pres, witness, options: self.options.clone() })
    }

    fn declared_names(&self, t_top: i64) -> Result<HashSet<String>> {
        let mut out = HashSet::new();
        for g in &self.generators {
            if is_template(&g.name) {
                let start = g.family_start.unwrap_or(1);
                for k in start..=g.family_end.unwrap_or(start + family_span(t_top)) {
                    if let Ok(name) = instantiate(&g.name, Vars { k: Some(k), p: self.p as i64 }) {
                        out.insert(name);
                    }
                }
            } else {
                out.insert(g.name.clone());
            }
        }
        Ok(out)
    }

    /// Explicit (template-free) spec for a presentation.
    pub fn from_presentation(pres: &Presentation, kind: SpecKind) -> SpecFile {
        let generators = pres
            .generators
            .iter()
            .map(|g| {
                let (kind, height) = match g.kind {
                    GenKind::Polynomial => (KindName::Polynomial, None),
                    GenKind::Exterior => (KindName::Exterior, None),
                    GenKind::Truncated(h) => (KindName::Truncated, Some(h)),
                    GenKind::DividedPower => (KindName::DividedPower, None),
                };
                GeneratorSpec {
                    name: g.name.clone(),
                    degree: Some(g.degree),
                    degree_formula: None,
                    kind,
                    height,
                    family_start: None,
                    family_end: None,
                    even_closed: g.even_closed,
                }
            })
            .collect();
        let rewrites = |table: &[Option<Element>]| {
            table
                .iter()
                .enumerate()
                .filter_map(|(i, v)| {
                    v.as_ref().map(|v| RewriteSpec {
                        generator: pres.generators[i].name.clone(),
                        value: pres.format_element(v),
                    })
                })
                .collect()
        };
        let dyer_lashof = pres
            .dl
            .iter()
            .map(|(k, v)| DlSpec {
                epsilon: k.epsilon,
                i: IntOrFormula::Int(k.i),
                generator: pres.generators[k.generator].name.clone(),
                value: pres.format_element(v),
            })
            .collect();
        SpecFile {
            name: None,
            p: pres.p.value(),
            kind,
            generators,
            sigma: rewrites(&pres.sigma),
            bockstein: rewrites(&pres.bockstein),
            dyer_lashof,
            flags: Flags { commutative: pres.commutative, evenly_graded: pres.evenly_graded },
            options: Options::default(),
            witness: None,
        }
    }
}

fn is_template(s: &str) -> bool {
    s.contains('{')
}

fn family_range(generator: &str, value: &str, t_top: i64) -> Vec<Option<i64>> {
    if is_template(generator) || is_template(value) {
        (0..=family_span(t_top)).map(Some).collect()
    } else {
        vec![None]
    }
}

fn expand_rewrite(
    pres: &Presentation,
    declared: &HashSet<String>,
    generator: &str,
    value: &str,
    p: i64,
    t_top: i64,
) -> Result<Vec<(usize, Element)>> {
    let mut out = Vec::new();
    for k in family_range(generator, value, t_top) {
        if let Some(x) = resolve_one(pres, declared, generator, value, Vars { k, p })? {
            out.push(x);
        }
    }
    Ok(out)
}

/// Resolves one instantiated entry; `None` when it falls outside the
/// window (or outside the family).
fn resolve_one(
    pres: &Presentation,
    declared: &HashSet<String>,
    generator: &str,
    value: &str,
    vars: Vars,
) -> Result<Option<(usize, Element)>> {
    let name = match instantiate(generator, vars) {
        Ok(n) => n,
        Err(_) if vars.k.is_some() => return Ok(None),
        Err(e) => return Err(e),
    };
    let g = match pres.index_of(&name) {
        Ok(g) => g,
        Err(_) if declared.contains(&name) || vars.k.is_some() => return Ok(None),
        Err(e) => return Err(e),
    };
    Ok(parse_value(pres, declared, value, vars)?.map(|v| (g, v)))
}

fn parse_value(pres: &Presentation, declared: &HashSet<String>, value: &str, vars: Vars) -> Result<Option<Element>> {
    let text = instantiate(value, vars)?;
    match parse_element(pres, &text) {
        Ok(v) => Ok(Some(v)),
        Err(Error::Parse { message, .. })
            if mentions_declared(&message, declared) || (vars.k.is_some() && message.starts_with("unknown generator")) =>
        {
            Ok(None)
        }
        Err(Error::Parse { line, column, message }) => {
            Err(Error::Parse { line, column, message: format!("in `{text}`: {message}") })
        }
        Err(e) => Err(e),
    }
}

fn mentions_declared(message: &str, declared: &HashSet<String>) -> bool {
    message
        .strip_prefix("unknown generator `")
        .and_then(|rest| rest.strip_suffix('`'))
        .is_some_and(|name| declared.contains(name))
}

#[derive(Clone, Copy, Debug)]
struct Vars {
    k: Option<i64>,
    p: i64,
}

/// Replaces every `{formula}` in a template.
fn instantiate(template: &str, vars: Vars) -> Result<String> {
    let mut out = String::new();
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let close = rest[open..].find('}').ok_or_else(|| Error::Parse {
            line: 1,
            column: open + 1,
            message: format!("unclosed `{{` in `{template}`"),
        })? + open;
        out.push_str(&eval_formula(&rest[open + 1..close], vars)?.to_string());
        rest = &rest[close + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

/// Integer formulas: `+ - * ^`, parentheses, literals and the variables
/// `k` and `p`.
fn eval_formula(src: &str, vars: Vars) -> Result<i64> {
    let tokens: Vec<char> = src.chars().filter(|c| !c.is_whitespace()).collect();
    let mut pos = 0;
    let v = formula_sum(&tokens, &mut pos, vars, src)?;
    if pos != tokens.len() {
        return Err(formula_error(src, "trailing input"));
    }
    Ok(v)
}

fn formula_error(src: &str, msg: &str) -> Error {
    Error::Parse { line: 1, column: 1, message: format!("bad formula `{src}`: {msg}") }
}

fn formula_sum(t: &[char], pos: &mut usize, vars: Vars, src: &str) -> Result<i64> {
    let mut acc = formula_product(t, pos, vars, src)?;
    while let Some(&c) = t.get(*pos) {
        if c != '+' && c != '-' {
            break;
        }
        *pos += 1;
        let rhs = formula_product(t, pos, vars, src)?;
        acc = if c == '+' { acc.checked_add(rhs) } else { acc.checked_sub(rhs) }
            .ok_or_else(|| formula_error(src, "overflow"))?;
    }
    Ok(acc)
}

fn formula_product(t: &[char], pos: &mut usize, vars: Vars, src: &str) -> Result<i64> {
    let mut acc = formula_power(t, pos, vars, src)?;
    while t.get(*pos) == Some(&'*') {
        *pos += 1;
        let rhs = formula_power(t, pos, vars, src)?;
        acc = acc.checked_mul(rhs).ok_or_else(|| formula_error(src, "overflow"))?;
    }
    Ok(acc)
}

fn formula_power(t: &[char], pos: &mut usize, vars: Vars, src: &str) -> Result<i64> {
    let base = formula_atom(t, pos, vars, src)?;
    if t.get(*pos) == Some(&'^') {
        *pos += 1;
        let e = formula_power(t, pos, vars, src)?;
        let e = u32::try_from(e).map_err(|_| formula_error(src, "negative exponent"))?;
        return base.checked_pow(e).ok_or_else(|| formula_error(src, "overflow"));
    }
    Ok(base)
}

fn formula_atom(t: &[char], pos: &mut usize, vars: Vars, src: &str) -> Result<i64> {
    match t.get(*pos) {
        Some('(') => {
            *pos += 1;
            let v = formula_sum(t, pos, vars, src)?;
            if t.get(*pos) != Some(&')') {
                return Err(formula_error(src, "expected `)`"));
            }
            *pos += 1;
            Ok(v)
        }
        Some('-') => {
            *pos += 1;
            Ok(-formula_atom(t, pos, vars, src)?)
        }
        Some('k') => {
            *pos += 1;
            vars.k.ok_or_else(|| formula_error(src, "`k` used outside a family"))
        }
        Some('p') => {
            *pos += 1;
            Ok(vars.p)
        }
        Some(c) if c.is_ascii_digit() => {
            let start = *pos;
            while t.get(*pos).is_some_and(|c| c.is_ascii_digit()) {
                *pos += 1;
            }
            let s: String = t[start..*pos].iter().collect();
            s.parse().map_err(|_| formula_error(src, "number too large"))
        }
        _ => Err(formula_error(src, "expected a number, `k`, `p` or `(`")),
    }
}

/// Serializes the tables of a presentation as a map for reports.
pub fn table_listing(pres: &Presentation) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for (i, v) in pres.sigma.iter().enumerate() {
        if let Some(v) = v {
            out.insert(format!("σ({})", pres.generators[i].name), pres.format_element(v));
        }
    }
    for (i, v) in pres.bockstein.iter().enumerate() {
        if let Some(v) = v {
            out.insert(format!("β({})", pres.generators[i].name), pres.format_element(v));
        }
    }
    for (k, v) in &pres.dl {
        out.insert(pres.dl_name(k), pres.format_element(v));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(k: i64, p: i64) -> Vars {
        Vars { k: Some(k), p }
    }

    #[test]
    fn formulas() {
        assert_eq!(eval_formula("2*(p^k-1)", vars(2, 3)).unwrap(), 16);
        assert_eq!(eval_formula("2^k-1", vars(3, 2)).unwrap(), 7);
        assert_eq!(eval_formula("2 ^ 3 ^ 2", vars(0, 2)).unwrap(), 512);
        assert!(eval_formula("k+", vars(1, 2)).is_err());
        assert!(eval_formula("k", Vars { k: None, p: 2 }).is_err());
        assert_eq!(instantiate("b{p^k-1}", vars(2, 3)).unwrap(), "b8");
    }

    #[test]
    fn loads_families_within_window() {
        let text = r#"{
            "p": 3,
            "kind": "base",
            "generators": [
                {"name": "xi{k}", "degree_formula": "2*(p^k-1)", "kind": "polynomial"},
                {"name": "tau{k}", "degree_formula": "2*p^k-1", "kind": "exterior", "family_start": 0}
            ],
            "bockstein": [{"generator": "tau{k}", "value": "xi{k}"}],
            "dyer_lashof": [{"i": "p^k", "generator": "tau{k}", "value": "tau{k+1}"}],
            "flags": {"commutative": true}
        }"#;
        let spec = SpecFile::from_json(text).unwrap();
        let l = spec.load(20).unwrap();
        let names: Vec<&str> = l.presentation.generators.iter().map(|g| g.name.as_str()).collect();
        assert_eq!(names, vec!["xi1", "xi2", "tau0", "tau1", "tau2"]);
        let pres = &l.presentation;
        // τ̄_2 (degree 17) has β = ξ̄_2; τ̄_0 has no ξ̄_0.
        assert_eq!(pres.bockstein[4], Some(pres.gen(1)));
        assert_eq!(pres.bockstein[2], None);
        // Q^9(τ̄_2) = τ̄_3 falls outside the window.
        assert_eq!(pres.dl.len(), 2);
    }

    #[test]
    fn parse_errors_carry_positions() {
        match SpecFile::from_json("{\n  \"p\": 2,\n  \"generators\": [}\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let spec = SpecFile::from_json(
            r#"{"p": 2, "generators": [{"name": "x", "degree": 2, "kind": "polynomial"}],
                "sigma": [{"generator": "x", "value": "x + zz"}]}"#,
        )
        .unwrap();
        assert!(matches!(spec.load(10), Err(Error::Parse { column: 5, .. })));
    }
}
