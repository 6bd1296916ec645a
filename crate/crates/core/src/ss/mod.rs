//! Homological homotopy fixed point, Tate and homotopy orbit spectral
//! sequences of a circle action, page by page.
//!
//! A page is stored as its stable vertical `V` (the s = 0 column, with
//! every other column `y^n·V`) plus the y-torsion / cotorsion left behind by
//! earlier rounds. `V` is kept as a tensor product of σ-linked blocks of
//! generators, each with a degreewise subquotient of its own basis.

mod certify;
mod report;
mod run;

pub use certify::*;
pub use report::*;
pub use run::*;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{convolve, Derivation, GradedBasis, Presentation};
use crate::dl::{DlOps, DlValue};
use crate::error::{Error, Result};
use crate::fp::Prime;
use crate::linalg::{FpVector, Matrix, Subquotient, Subspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Hfp,
    Tate,
    Orbit,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Hfp, Variant::Tate, Variant::Orbit];

    /// Even columns of the window, left to right.
    pub fn columns(self, w: &Window) -> Vec<i64> {
        let (lo, hi) = match self {
            Variant::Hfp => (w.s_min, 0),
            Variant::Tate => (w.s_min, -w.s_min),
            Variant::Orbit => (0, -w.s_min),
        };
        (lo..=hi).filter(|s| s % 2 == 0).collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Hfp => "hfp",
            Variant::Tate => "tate",
            Variant::Orbit => "orbit",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub t_max: i64,
    pub s_min: i64,
}

impl Window {
    pub fn new(t_max: i64, s_min: i64) -> Result<Self> {
        if t_max < 0 {
            return Err(Error::WindowTooSmall(format!("t_max = {t_max} is negative")));
        }
        if s_min > 0 {
            return Err(Error::WindowTooSmall(format!("s_min = {s_min} is positive")));
        }
        if s_min % 2 != 0 {
            return Err(Error::Unsupported(format!("odd filtration s_min = {s_min}; pages live in even columns")));
        }
        Ok(Window { t_max, s_min })
    }
}

/// What a block's basis vectors are.
#[derive(Clone, Debug)]
pub enum Ambient {
    /// Monomials of the sub-presentation on `gens` (indices into the full
    /// vertical presentation).
    Algebra { pres: Presentation, gens: Vec<usize>, basis: GradedBasis },
    /// A bare graded vector space with labelled basis vectors. With
    /// `acyclic_above`, nothing survives beyond that degree on any page.
    Plain { labels: Vec<Vec<String>>, acyclic_above: Option<i64> },
}

#[derive(Clone, Debug)]
pub struct Factor {
    pub ambient: Ambient,
    /// `Z_t / B_t` inside the ambient degree-t space, for t = 0..=top.
    pub sub: Vec<Subquotient>,
}

impl Factor {
    pub fn algebra(full: &Presentation, gens: Vec<usize>, top: i64) -> Result<Self> {
        let pres = full.restrict(&gens);
        let basis = GradedBasis::new(&pres, top)?;
        let sub = (0..=top).map(|t| Subquotient::full(full.p, basis.dim(t))).collect();
        Ok(Factor { ambient: Ambient::Algebra { pres, gens, basis }, sub })
    }

    pub fn plain(p: Prime, labels: Vec<Vec<String>>, acyclic_above: Option<i64>) -> Self {
        let sub = labels.iter().map(|l| Subquotient::full(p, l.len())).collect();
        Factor { ambient: Ambient::Plain { labels, acyclic_above }, sub }
    }

    pub fn top(&self) -> i64 {
        self.sub.len() as i64 - 1
    }

    pub fn ambient_dim(&self, t: i64) -> usize {
        self.sub_at(t).map_or(0, |s| s.ambient())
    }

    pub fn dim(&self, t: i64) -> usize {
        self.sub_at(t).map_or(0, |s| s.dim())
    }

    pub fn sub_at(&self, t: i64) -> Option<&Subquotient> {
        if t < 0 {
            return None;
        }
        self.sub.get(t as usize)
    }

    pub fn series(&self) -> Vec<u64> {
        self.sub.iter().map(|s| s.dim() as u64).collect()
    }

    pub fn label(&self) -> String {
        match &self.ambient {
            Ambient::Algebra { pres, .. } => {
                pres.generators.iter().map(|g| g.name.as_str()).collect::<Vec<_>>().join(", ")
            }
            Ambient::Plain { labels, .. } => format!("{} basis classes", labels.iter().map(Vec::len).sum::<usize>()),
        }
    }

    /// Human-readable form of an ambient vector.
    pub fn describe(&self, t: i64, v: &FpVector) -> String {
        match &self.ambient {
            Ambient::Algebra { pres, basis, .. } => pres.format_element(&basis.to_element(pres, t, v)),
            Ambient::Plain { labels, .. } => {
                let terms: Vec<String> = v
                    .iter_nonzero()
                    .map(|(i, c)| {
                        let l = &labels[t as usize][i];
                        if c == 1 { l.clone() } else { format!("{c}*{l}") }
                    })
                    .collect();
                if terms.is_empty() { "0".into() } else { terms.join(" + ") }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SummandKind {
    /// `y^m · im δ` in columns `−2m`, `0 <= m < r/2` (fixed points).
    Torsion,
    /// `V / ker δ` in columns `2n`, `0 <= n < r/2` (orbits).
    Cotorsion,
}

/// Classes left behind by the round `d^r`, indexed by internal degree.
#[derive(Clone, Debug, Serialize)]
pub struct Summand {
    pub kind: SummandKind,
    pub round: u32,
    pub dims: Vec<u64>,
}

impl Summand {
    pub fn columns(&self) -> Vec<i64> {
        let sign = match self.kind {
            SummandKind::Torsion => -1,
            SummandKind::Cotorsion => 1,
        };
        (0..self.round as i64 / 2).map(|m| sign * 2 * m).collect()
    }

    /// Power of y annihilating the part in column `s`.
    pub fn height(&self, s: i64) -> u32 {
        self.round / 2 - (s.unsigned_abs() / 2) as u32
    }

    pub fn at(&self, s: i64, t: i64) -> u64 {
        if t < 0 || !self.columns().contains(&s) {
            return 0;
        }
        self.dims.get(t as usize).copied().unwrap_or(0)
    }
}

/// The page `E^r` (r even) with everything needed to read off all three
/// variants.
#[derive(Clone, Debug)]
pub struct Page {
    pub r: u32,
    pub p: Prime,
    pub window: Window,
    /// Degree through which blocks are built; one past the window so a
    /// single d² round still leaves `t_max` exact.
    pub top: i64,
    /// Dimensions are exact through this degree.
    pub valid_tmax: i64,
    pub factors: Vec<Factor>,
    pub torsion: Vec<Summand>,
    pub cotorsion: Vec<Summand>,
    pub strongly_convergent: bool,
}

impl Page {
    /// Dimensions of the stable vertical, degrees 0..=top.
    pub fn stable_dims(&self) -> Vec<u64> {
        let mut acc = vec![0u64; self.top as usize + 1];
        acc[0] = 1;
        for f in &self.factors {
            acc = convolve(&acc, &f.series());
            acc.truncate(self.top as usize + 1);
            acc.resize(self.top as usize + 1, 0);
        }
        acc
    }

    pub fn torsion_at(&self, s: i64, t: i64) -> u64 {
        self.torsion.iter().map(|x| x.at(s, t)).sum()
    }

    pub fn cotorsion_at(&self, s: i64, t: i64) -> u64 {
        self.cotorsion.iter().map(|x| x.at(s, t)).sum()
    }

    /// `dim E^r_{s,t}` for the given variant, from precomputed stable dims.
    pub fn dim_with(&self, stable: &[u64], variant: Variant, s: i64, t: i64) -> u64 {
        if s % 2 != 0 || t < 0 || t as usize >= stable.len() {
            return 0;
        }
        let v = stable[t as usize];
        match variant {
            Variant::Hfp if s <= 0 => v + self.torsion_at(s, t),
            Variant::Tate => v,
            Variant::Orbit if s >= 0 => v + self.cotorsion_at(s, t),
            _ => 0,
        }
    }

    pub fn dim(&self, variant: Variant, s: i64, t: i64) -> u64 {
        self.dim_with(&self.stable_dims(), variant, s, t)
    }

    /// Highest degree reported: the window, capped by what is exact.
    pub fn reported_tmax(&self) -> i64 {
        self.window.t_max.min(self.valid_tmax)
    }
}

/// Splits the generators into blocks closed under σ-linkage.
pub fn sigma_blocks(pres: &Presentation) -> Vec<Vec<usize>> {
    let n = pres.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for g in 0..n {
        if let Some(v) = &pres.sigma[g] {
            for h in v.support() {
                let (a, b) = (find(&mut parent, g), find(&mut parent, h));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut root_of = vec![usize::MAX; n];
    for g in 0..n {
        let r = find(&mut parent, g);
        if root_of[r] == usize::MAX {
            root_of[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[root_of[r]].push(g);
    }
    blocks
}

/// `E² = P(y) ⊗ V` with no torsion.
pub fn init_page2(pres: &Presentation, window: Window) -> Result<Page> {
    pres.validate()?;
    if let Some(g) = pres.generators.iter().find(|g| g.filtration != 0) {
        return Err(Error::Unsupported(format!(
            "generator `{}` sits in filtration {}; only s = 0 generators are supported",
            g.name, g.filtration
        )));
    }
    let top = window.t_max + 1;
    let factors = sigma_blocks(pres)
        .into_par_iter()
        .map(|gens| Factor::algebra(pres, gens, top))
        .collect::<Result<Vec<_>>>()?;
    Ok(Page {
        r: 2,
        p: pres.p,
        window,
        top,
        valid_tmax: top,
        factors,
        torsion: Vec::new(),
        cotorsion: Vec::new(),
        strongly_convergent: true,
    })
}

/// A page built directly from blocks, for hand-made examples.
pub fn page_from_factors(p: Prime, r: u32, window: Window, top: i64, factors: Vec<Factor>) -> Result<Page> {
    if r < 2 || !r.is_multiple_of(2) {
        return Err(Error::Unsupported(format!("page E^{r}: pages are even and start at 2")));
    }
    if factors.iter().any(|f| f.top() != top) {
        return Err(Error::Inconsistent("blocks built to different degrees".into()));
    }
    Ok(Page {
        r,
        p,
        window,
        top,
        valid_tmax: top,
        factors,
        torsion: Vec::new(),
        cotorsion: Vec::new(),
        strongly_convergent: true,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    SigmaRule,
    DlPropagated,
    UserSupplied,
    ZeroCertified,
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundEntry {
    pub class: String,
    pub delta: String,
    pub provenance: Provenance,
}

/// The round on one block: `δ` as ambient matrices from degree t to
/// t + r − 1 (defined where the target is within `top`).
#[derive(Clone, Debug)]
pub enum FactorMap {
    Zero,
    Matrices(Vec<Matrix>),
    Undetermined(Vec<String>),
}

/// `d^r(y^n x) = y^{n + r/2} δx`, with `δ` given blockwise.
#[derive(Clone, Debug)]
pub struct Round {
    pub r: u32,
    pub maps: Vec<FactorMap>,
    pub entries: Vec<RoundEntry>,
}

impl Round {
    pub fn zero(page: &Page) -> Self {
        Round { r: page.r, maps: vec![FactorMap::Zero; page.factors.len()], entries: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.maps.iter().all(|m| matches!(m, FactorMap::Zero))
    }
}

/// `d² = y·σ`, with σ extended as a derivation.
pub fn d2_from_sigma(page: &Page, pres: &Presentation) -> Result<Round> {
    if page.r != 2 {
        return Err(Error::Unsupported(format!("d² is read off σ on E², not on E^{}", page.r)));
    }
    let maps = page
        .factors
        .par_iter()
        .map(|f| -> Result<FactorMap> {
            let Ambient::Algebra { pres: fp, basis, .. } = &f.ambient else {
                return Err(Error::Unsupported("σ needs an algebra block".into()));
            };
            if fp.sigma.iter().all(Option::is_none) {
                return Ok(FactorMap::Zero);
            }
            let d = Derivation::sigma(fp);
            let mut ms = Vec::new();
            for t in 0..page.top {
                let m = basis
                    .operator_matrix(fp, t, 1, |m| d.apply_monomial(m))?
                    .expect("σ is determined everywhere");
                ms.push(m);
            }
            for t in 0..ms.len().saturating_sub(1) {
                if !ms[t].compose(&ms[t + 1]).is_zero() {
                    return Err(Error::Inconsistent(format!("σ² ≠ 0 out of degree {t} on the block {}", f.label())));
                }
            }
            Ok(FactorMap::Matrices(ms))
        })
        .collect::<Result<Vec<_>>>()?;
    let d = Derivation::sigma(pres);
    let mut entries = Vec::new();
    for g in 0..pres.len() {
        let v = d.apply(&pres.gen(g))?.expect("σ is determined everywhere");
        entries.push(RoundEntry {
            class: pres.generators[g].name.clone(),
            delta: pres.format_element(&v),
            provenance: Provenance::SigmaRule,
        });
    }
    Ok(Round { r: 2, maps, entries })
}

/// Checks the declared operation table against d² = y·σ:
/// `σ(β^εQ^i x) = β^εQ^i(σx)` wherever both sides are known. Bockstein
/// entries are compared up to sign (βσ = −σβ). Returns the checked entries.
pub fn propagate_dl(round: &mut Round, pres: &Presentation) -> Result<usize> {
    if round.r != 2 {
        return Ok(0);
    }
    let d = Derivation::sigma(pres);
    let mut ops = DlOps::new(pres);
    let mut checked = 0;
    for (k, v) in &pres.dl {
        let x = pres.gen(k.generator);
        let sx = d.apply(&x)?.expect("σ is determined everywhere");
        let DlValue::Known(rhs) = ops.apply(k.epsilon, k.i, &sx)? else { continue };
        let lhs = d.apply(v)?.expect("σ is determined everywhere");
        let agrees = lhs == rhs || (k.epsilon == 1 && lhs == rhs.scaled(pres.p.neg(1), pres.p));
        if !agrees {
            return Err(Error::Conflict {
                class: pres.dl_name(k),
                existing: pres.format_element(&lhs),
                proposed: pres.format_element(&rhs),
            });
        }
        checked += 1;
        round.entries.push(RoundEntry {
            class: pres.dl_name(k),
            delta: pres.format_element(&rhs),
            provenance: Provenance::DlPropagated,
        });
    }
    Ok(checked)
}

fn turn_factor(p: Prime, f: &Factor, map: &FactorMap, r: u32) -> Result<Factor> {
    let ms = match map {
        FactorMap::Zero => return Ok(f.clone()),
        FactorMap::Matrices(ms) => ms,
        FactorMap::Undetermined(c) => return Err(Error::Undetermined(c.join(", "))),
    };
    let shift = r as i64 - 1;
    let top = f.top();
    let mat = |t: i64| ms.get(t as usize).filter(|_| t + shift <= top);
    let mut cycles = Vec::with_capacity(f.sub.len());
    let mut images: Vec<Vec<FpVector>> = vec![Vec::new(); f.sub.len()];
    for t in 0..=top {
        let here = &f.sub[t as usize];
        let Some(m) = mat(t) else {
            cycles.push(here.cycles().clone());
            continue;
        };
        let there = &f.sub[(t + shift) as usize];
        if m.rows() != here.ambient() || m.cols() != there.ambient() {
            return Err(Error::Inconsistent(format!("round matrix out of degree {t} has the wrong shape")));
        }
        for b in here.boundaries().basis() {
            if !there.is_boundary(&m.apply(b)) {
                return Err(Error::Inconsistent(format!("δ of a boundary in degree {t} is not a boundary")));
            }
        }
        let mut rows = Vec::new();
        for z in here.cycles().basis() {
            let w = m.apply(z);
            if !there.is_cycle(&w) {
                return Err(Error::Inconsistent(format!(
                    "δ({}) = {} is not a cycle of the previous page",
                    f.describe(t, z),
                    f.describe(t + shift, &w)
                )));
            }
            if let Some(m2) = mat(t + shift) {
                if !f.sub[(t + 2 * shift) as usize].is_boundary(&m2.apply(&w)) {
                    return Err(Error::Inconsistent(format!("d∘d ≠ 0 on {}", f.describe(t, z))));
                }
            }
            let mut red = w.clone();
            there.boundaries().reduce(&mut red);
            rows.push(red);
            images[(t + shift) as usize].push(w);
        }
        let (kernel, _) = Matrix::from_rows(p, there.ambient(), rows).kernel_and_image();
        let basis = here.cycles().basis();
        let new_z: Vec<FpVector> = kernel
            .iter()
            .map(|c| {
                let mut z = FpVector::zero(p, here.ambient());
                for (i, a) in c.iter_nonzero() {
                    z.add_scaled(&basis[i], a);
                }
                z
            })
            .collect();
        cycles.push(Subspace::spanned_by(p, here.ambient(), &new_z));
    }
    let sub = (0..=top as usize)
        .map(|t| {
            let mut b = f.sub[t].boundaries().clone();
            for w in &images[t] {
                b.insert(w.clone());
            }
            Subquotient::new(cycles[t].clone(), b)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Factor { ambient: f.ambient.clone(), sub })
}

/// `E^{r+2} = H(E^r, d^r)`: blockwise homology of δ, with the torsion and
/// cotorsion of the round recorded by degree.
pub fn turn_page(page: &Page, round: &Round) -> Result<Page> {
    if round.r != page.r || round.maps.len() != page.factors.len() {
        return Err(Error::Inconsistent(format!("round d^{} does not belong to page E^{}", round.r, page.r)));
    }
    let undetermined: Vec<String> = round
        .maps
        .iter()
        .filter_map(|m| match m {
            FactorMap::Undetermined(c) => Some(c.join(", ")),
            _ => None,
        })
        .collect();
    if !undetermined.is_empty() {
        return Err(Error::Undetermined(undetermined.join("; ")));
    }
    let factors = page
        .factors
        .par_iter()
        .zip(round.maps.par_iter())
        .map(|(f, m)| turn_factor(page.p, f, m, page.r))
        .collect::<Result<Vec<_>>>()?;
    let mut next = Page { r: page.r + 2, factors, ..page.clone() };
    if round.is_zero() {
        return Ok(next);
    }
    let shift = page.r as i64 - 1;
    next.valid_tmax = page.valid_tmax.min(page.top - shift);
    // dim V = dim H + rank out + rank in, solved upwards in t.
    let before = page.stable_dims();
    let after = next.stable_dims();
    let n = before.len();
    let mut rank_out = vec![0u64; n];
    let mut rank_in = vec![0u64; n];
    for t in 0..n {
        if t as i64 >= shift {
            rank_in[t] = rank_out[t - shift as usize];
        }
        rank_out[t] = before[t].saturating_sub(after[t] + rank_in[t]);
    }
    next.torsion.push(Summand { kind: SummandKind::Torsion, round: page.r, dims: rank_in });
    next.cotorsion.push(Summand { kind: SummandKind::Cotorsion, round: page.r, dims: rank_out });
    Ok(next)
}

/// Violations of the strip condition: torsion on `E^r` must sit in
/// `−r + 4 <= s <= 0` with annihilation height below r/2.
pub fn torsion_audit(page: &Page) -> Vec<String> {
    let mut out = Vec::new();
    let floor = -(page.r as i64) + 4;
    for t in &page.torsion {
        if t.kind != SummandKind::Torsion {
            out.push(format!("summand from d^{} is not y-torsion", t.round));
        }
        for s in t.columns() {
            if t.dims.iter().all(|&d| d == 0) {
                continue;
            }
            if s < floor || s > 0 {
                out.push(format!("torsion from d^{} in column {s}, outside {floor} <= s <= 0", t.round));
            }
            if t.height(s) == 0 || t.height(s) >= page.r / 2 {
                out.push(format!("torsion from d^{} in column {s} has height {}", t.round, t.height(s)));
            }
        }
    }
    out
}
