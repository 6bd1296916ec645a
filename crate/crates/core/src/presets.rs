//! Built-in inputs: H_*(B; F_p) for the standard ring spectra, as spec
//! files with degree formulas.

use crate::error::{Error, Result};
use crate::fp::Prime;
use crate::specfile::{
    DlSpec, Flags, GeneratorSpec, IntOrFormula, KindName, Options, RewriteSpec, SpecFile, SpecKind, WitnessSpec,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresetInfo {
    pub name: &'static str,
    pub primes: &'static str,
    pub description: &'static str,
}

pub fn presets() -> Vec<PresetInfo> {
    let p = |name, primes, description| PresetInfo { name, primes, description };
    vec![
        p("sphere", "any", "the sphere spectrum; H_* = F_p"),
        p("HFp", "any", "Eilenberg-MacLane spectrum of F_p (BP<-1>); H_* = dual Steenrod algebra"),
        p("HZp", "any", "p-local integers (BP<0>)"),
        p("ell", "any", "Adams summand (BP<1>); at p = 2 this is ku"),
        p("ku", "2", "connective complex K-theory at p = 2"),
        p("ko", "2", "connective real K-theory; H_* = (A//A(1))_*"),
        p("tmf", "2", "topological modular forms; H_* = (A//A(2))_*"),
        p("MU", "any", "complex cobordism; H_* = P(b_k), |b_k| = 2k"),
        p("BP", "any", "Brown-Peterson spectrum, via the surjection from MU"),
        p("BPm", "any", "truncated Brown-Peterson BP<m-1>, parametric in (p, m)"),
    ]
}

fn gen(name: &str, formula: &str, kind: KindName, start: i64, end: Option<i64>) -> GeneratorSpec {
    GeneratorSpec {
        name: name.into(),
        degree: None,
        degree_formula: Some(formula.into()),
        kind,
        height: None,
        family_start: Some(start),
        family_end: end,
        even_closed: false,
    }
}

fn fixed(name: &str, degree: u32) -> GeneratorSpec {
    GeneratorSpec {
        name: name.into(),
        degree: Some(degree),
        degree_formula: None,
        kind: KindName::Polynomial,
        height: None,
        family_start: None,
        family_end: None,
        even_closed: false,
    }
}

fn dl(i: &str, generator: &str, value: &str) -> DlSpec {
    DlSpec { epsilon: 0, i: IntOrFormula::Formula(i.into()), generator: generator.into(), value: value.into() }
}

fn rewrite(generator: &str, value: &str) -> RewriteSpec {
    RewriteSpec { generator: generator.into(), value: value.into() }
}

fn base(name: &str, p: u32, generators: Vec<GeneratorSpec>, commutative: bool, evenly_graded: bool) -> SpecFile {
    SpecFile {
        name: Some(name.into()),
        p,
        kind: SpecKind::Base,
        generators,
        sigma: Vec::new(),
        bockstein: Vec::new(),
        dyer_lashof: Vec::new(),
        flags: Flags { commutative, evenly_graded },
        options: Options::default(),
        witness: None,
    }
}

/// H_*(BP<m-1>): P(ξ̄_k) ⊗ E(τ̄_k | k ≥ m) at odd p; at p = 2
/// P(ξ̄_1², …, ξ̄_m², ξ̄_{m+1}, …).
pub fn bp_m(p: u32, m: u32) -> SpecFile {
    let name = format!("BP<{}>", m as i64 - 1);
    let mi = m as i64;
    if p == 2 {
        let mut s = base(
            &name,
            2,
            vec![
                gen("xi{k}_2", "2*(2^k-1)", KindName::Polynomial, 1, Some(mi)),
                gen("xi{k}", "2^k-1", KindName::Polynomial, mi + 1, None),
            ],
            true,
            false,
        );
        s.dyer_lashof = vec![
            dl("2^k", "xi{k}", "xi{k+1}"),
            // Q^{odd}(a²) = 0.
            dl("2^(k+1)-1", "xi{k}_2", "0"),
        ];
        return s;
    }
    let mut s = base(
        &name,
        p,
        vec![
            gen("xi{k}", "2*(p^k-1)", KindName::Polynomial, 1, None),
            gen("tau{k}", "2*p^k-1", KindName::Exterior, mi, None),
        ],
        true,
        false,
    );
    s.bockstein = vec![rewrite("tau{k}", "xi{k}")];
    if m == 0 {
        s.bockstein.push(rewrite("tau0", "1"));
    }
    s.dyer_lashof = vec![dl("p^k", "tau{k}", "tau{k+1}")];
    s
}

fn mu(p: u32) -> SpecFile {
    base("MU", p, vec![gen("b{k}", "2*k", KindName::Polynomial, 1, None)], true, true)
}

fn bp(p: u32) -> SpecFile {
    let (g, formula) = if p == 2 { ("xi{k}_2", "2*(2^k-1)") } else { ("xi{k}", "2*(p^k-1)") };
    let mut s = base("BP", p, vec![gen(g, formula, KindName::Polynomial, 1, None)], false, true);
    s.witness = Some(WitnessSpec { source: Box::new(mu(p)), map: vec![rewrite("b{p^k-1}", g)] });
    s
}

/// (A//A(n))_* at p = 2 for n = 1 (ko) and n = 2 (tmf): the first few ξ̄_k
/// appear as powers, the rest as themselves.
fn quotient_of_steenrod(name: &str, powers: &[(u32, u32)]) -> SpecFile {
    let mut gens = Vec::new();
    let mut table = Vec::new();
    for &(k, e) in powers {
        let gname = format!("xi{k}_{e}");
        let degree = e * ((1 << k) - 1);
        gens.push(fixed(&gname, degree));
        table.push(dl(&(degree + 1).to_string(), &gname, "0"));
    }
    let first = powers.len() as i64 + 1;
    gens.push(gen("xi{k}", "2^k-1", KindName::Polynomial, first, None));
    table.push(dl("2^k", "xi{k}", "xi{k+1}"));
    let mut s = base(name, 2, gens, true, false);
    s.dyer_lashof = table;
    s
}

/// Looks up a preset. `p` and `m` default to 2 and 2; presets defined only
/// at p = 2 reject other primes. Returns warnings alongside the spec.
pub fn preset(name: &str, p: Option<u32>, m: Option<u32>) -> Result<(SpecFile, Vec<String>)> {
    let pv = p.unwrap_or(2);
    Prime::new(pv)?;
    let two_only = |s: SpecFile| {
        if pv != 2 {
            return Err(Error::Unsupported(format!("preset `{name}` is only defined at p = 2")));
        }
        Ok(s)
    };
    let mut warnings = Vec::new();
    let spec = match name.to_ascii_lowercase().as_str() {
        "sphere" | "s" => base("S", pv, Vec::new(), true, true),
        "hfp" => named(bp_m(pv, 0), "HF_p"),
        "hzp" => named(bp_m(pv, 1), "HZ_(p)"),
        "ell" => named(bp_m(pv, 2), "ell"),
        "ku" => two_only(named(bp_m(2, 2), "ku"))?,
        "ko" => two_only(quotient_of_steenrod("ko", &[(1, 4), (2, 2)]))?,
        "tmf" => two_only(quotient_of_steenrod("tmf", &[(1, 8), (2, 4), (3, 2)]))?,
        "mu" => mu(pv),
        "bp" => bp(pv),
        "bpm" => {
            let m = m.unwrap_or(2);
            if m >= 3 {
                warnings.push(format!(
                    "BP<{}> at p = {pv} is not known to be a commutative ring spectrum; the results \
                     assume that it is",
                    m - 1
                ));
            }
            bp_m(pv, m)
        }
        _ => return Err(Error::UnknownPreset(name.to_string())),
    };
    Ok((spec, warnings))
}

fn named(mut s: SpecFile, name: &str) -> SpecFile {
    s.name = Some(name.into());
    s
}
