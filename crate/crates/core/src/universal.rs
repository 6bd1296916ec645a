//! The universal examples: the homology of the p-th extended power of a
//! two-cell complex `{x, δx}` with `|δx| = |x| + 2r − 1`, and a replay of
//! the page computation showing that all 2r classes of the infinite-cycle
//! family survive.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fp::Prime;
use crate::linalg::{FpVector, Matrix};
use crate::ss::{page_from_factors, torsion_audit, turn_page, Factor, FactorMap, Page, Round, Window};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct UniversalInput {
    pub p: Prime,
    /// Degree of x.
    pub t: i64,
    /// The differential is `d^{2r}`.
    pub r: u32,
    pub t_max: i64,
}

/// A basis class of the extended power.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UClass {
    /// `xδx`, `x^{p−1}δx` or `x(δx)^{p−1}` according to the case.
    Product,
    /// `β^εQ^i(x)`.
    Qx { eps: u8, i: i64 },
    /// `β^εQ^i(δx)`.
    Qd { eps: u8, i: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Case {
    Two,
    Even { m: i64 },
    Odd { m: i64 },
}

impl UniversalInput {
    pub fn new(p: u32, t: i64, r: u32, t_max: i64) -> Result<Self> {
        if r == 0 || t < 0 {
            return Err(Error::Unsupported(format!("universal example needs r >= 1 and t >= 0 (got r = {r}, t = {t})")));
        }
        Ok(UniversalInput { p: Prime::new(p)?, t, r, t_max })
    }

    fn case(&self) -> Case {
        if self.p.is_two() {
            Case::Two
        } else if self.t % 2 == 0 {
            Case::Even { m: self.t / 2 }
        } else {
            Case::Odd { m: (self.t + 1) / 2 }
        }
    }

    fn r(&self) -> i64 {
        self.r as i64
    }

    pub fn delta_degree(&self) -> i64 {
        self.t + 2 * self.r() - 1
    }

    fn op_degree(&self, eps: u8, i: i64, d: i64) -> i64 {
        if self.p.is_two() {
            d + i
        } else {
            d + 2 * i * (self.p.value() as i64 - 1) - eps as i64
        }
    }

    /// Instability: `β^εQ^i` is nonzero on a class of degree d.
    fn unstable_ok(&self, eps: u8, i: i64, d: i64) -> bool {
        if self.p.is_two() {
            eps == 0 && i >= d
        } else {
            2 * i - eps as i64 >= d
        }
    }

    pub fn degree(&self, c: UClass) -> i64 {
        let p = self.p.value() as i64;
        let (t, dt) = (self.t, self.delta_degree());
        match c {
            UClass::Product => match self.case() {
                Case::Two => t + dt,
                Case::Even { .. } => (p - 1) * t + dt,
                Case::Odd { .. } => t + (p - 1) * dt,
            },
            UClass::Qx { eps, i } => self.op_degree(eps, i, t),
            UClass::Qd { eps, i } => self.op_degree(eps, i, dt),
        }
    }

    pub fn label(&self, c: UClass) -> String {
        let p = self.p.value();
        let op = |eps: u8, i: i64, of: &str| format!("{}Q^{i}({of})", if eps == 1 { "β" } else { "" });
        match c {
            UClass::Product => match self.case() {
                Case::Two => "xδx".into(),
                Case::Even { .. } => format!("x^{}δx", p - 1),
                Case::Odd { .. } => format!("x(δx)^{}", p - 1),
            },
            UClass::Qx { eps, i } => op(eps, i, "x"),
            UClass::Qd { eps, i } => op(eps, i, "δx"),
        }
    }

    pub fn contains(&self, c: UClass) -> bool {
        match c {
            UClass::Product => true,
            UClass::Qx { eps, i } => (eps == 0 || !self.p.is_two()) && self.unstable_ok(eps, i, self.t),
            UClass::Qd { eps, i } => (eps == 0 || !self.p.is_two()) && self.unstable_ok(eps, i, self.delta_degree()),
        }
    }

    /// `d^{2r}` on a basis class, as a basis class (coefficient 1) or 0:
    /// operations commute with the differential, `δ(δx) = 0`, and the
    /// product follows from the Leibniz rule.
    pub fn differential(&self, c: UClass) -> Option<UClass> {
        let target = match c {
            UClass::Qx { eps, i } => UClass::Qd { eps, i },
            UClass::Qd { .. } => return None,
            UClass::Product => match self.case() {
                // (δx)² and (δx)^p are the bottom operations on δx.
                Case::Two => UClass::Qd { eps: 0, i: self.delta_degree() },
                Case::Even { .. } => return None,
                Case::Odd { m } => UClass::Qd { eps: 0, i: m + self.r() - 1 },
            },
        };
        self.contains(target).then_some(target)
    }

    /// The displayed `E^{2r+2}` survivors, each a combination of basis
    /// classes; these are exactly the 2r certified infinite cycles.
    pub fn survivors(&self) -> Vec<(String, Vec<(UClass, u32)>)> {
        let r = self.r();
        let p = self.p;
        let single = |c: UClass| (self.label(c), vec![(c, 1)]);
        let mut out = Vec::new();
        match self.case() {
            Case::Two => {
                let t = self.t;
                out.extend((t..t + 2 * r - 1).map(|i| single(UClass::Qx { eps: 0, i })));
                let q = UClass::Qx { eps: 0, i: t + 2 * r - 1 };
                out.push((format!("{} + xδx", self.label(q)), vec![(q, 1), (UClass::Product, 1)]));
            }
            Case::Even { m } => {
                for eps in [0u8, 1] {
                    out.extend((m + eps as i64..m + r).map(|i| single(UClass::Qx { eps, i })));
                }
                out.push(single(UClass::Product));
            }
            Case::Odd { m } => {
                for eps in [0u8, 1] {
                    out.extend((m..m + r - 1 + eps as i64).map(|i| single(UClass::Qx { eps, i })));
                }
                let q = UClass::Qx { eps: 0, i: m + r - 1 };
                out.push((
                    format!("{} - x(δx)^{}", self.label(q), p.value() - 1),
                    vec![(q, 1), (UClass::Product, p.neg(1))],
                ));
            }
        }
        out
    }
}

/// The extended-power basis through degree `top`.
#[derive(Clone, Debug)]
pub struct ExtendedPowerBasis {
    pub input: UniversalInput,
    pub top: i64,
    pub classes: Vec<Vec<UClass>>,
    index: BTreeMap<UClass, (i64, usize)>,
}

impl ExtendedPowerBasis {
    pub fn position(&self, c: UClass) -> Option<(i64, usize)> {
        self.index.get(&c).copied()
    }

    pub fn dim(&self, t: i64) -> usize {
        if t < 0 || t > self.top {
            0
        } else {
            self.classes[t as usize].len()
        }
    }

    pub fn labels(&self) -> Vec<Vec<String>> {
        self.classes.iter().map(|cs| cs.iter().map(|&c| self.input.label(c)).collect()).collect()
    }

    /// A combination of classes as a vector, if it is homogeneous and
    /// within the basis window.
    pub fn vector(&self, combo: &[(UClass, u32)]) -> Option<(i64, FpVector)> {
        let t = self.input.degree(combo.first()?.0);
        if t < 0 || t > self.top {
            return None;
        }
        let mut v = FpVector::zero(self.input.p, self.dim(t));
        for &(c, a) in combo {
            let (d, i) = self.position(c)?;
            if d != t {
                return None;
            }
            v.add_to_entry(i, a);
        }
        Some((t, v))
    }
}

/// All basis classes of degree at most `top`.
pub fn extended_power_basis(u: &UniversalInput, top: i64) -> ExtendedPowerBasis {
    let mut classes: Vec<Vec<UClass>> = vec![Vec::new(); top.max(-1) as usize + 1];
    let mut add = |c: UClass| {
        let d = u.degree(c);
        if (0..=top).contains(&d) && u.contains(c) {
            classes[d as usize].push(c);
        }
    };
    add(UClass::Product);
    let eps_range: &[u8] = if u.p.is_two() { &[0] } else { &[0, 1] };
    for &eps in eps_range {
        // Operations raise degree, so i is bounded by the window.
        for i in 0..=top.max(0) {
            add(UClass::Qx { eps, i });
            add(UClass::Qd { eps, i });
        }
    }
    for cs in &mut classes {
        cs.sort();
    }
    let index = classes
        .iter()
        .enumerate()
        .flat_map(|(t, cs)| cs.iter().enumerate().map(move |(i, &c)| (c, (t as i64, i))))
        .collect();
    ExtendedPowerBasis { input: *u, top, classes, index }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SurvivalReason {
    /// Every later differential lands above the last surviving class.
    VanishingRegion,
    /// Every possible target has a nonzero Bockstein; the class does not.
    BocksteinExclusion,
    /// Already an infinite cycle in the example for r − 1 (where δ' = 0).
    Induction,
}

#[derive(Clone, Debug, Serialize)]
pub struct Survivor {
    pub class: String,
    pub degree: i64,
    pub in_window: bool,
    pub reason: Option<SurvivalReason>,
}

#[derive(Clone, Debug, Serialize)]
pub struct UniversalReport {
    pub input: UniversalInput,
    pub pass: bool,
    pub survivors: Vec<Survivor>,
    pub failures: Vec<String>,
    /// `dim E^{2r+2}_{0,t}` through the exact range.
    pub stable_dims: Vec<u64>,
    #[serde(skip)]
    pub e2r: Option<Page>,
    #[serde(skip)]
    pub next: Option<Page>,
}

/// `E^{2r}` on the extended-power basis (top of the basis is
/// `t_max + 2r − 1`, so that `E^{2r+2}` is exact through `t_max`) together
/// with the round `d^{2r}`.
pub fn universal_page(u: &UniversalInput) -> Result<(ExtendedPowerBasis, Page, Round)> {
    let shift = 2 * u.r() - 1;
    let top = u.t_max + shift;
    let basis = extended_power_basis(u, top);
    let factor = Factor::plain(u.p, basis.labels(), None);
    let window = Window::new(u.t_max, -2 * (u.r() + 2))?;
    let page = page_from_factors(u.p, 2 * u.r, window, top, vec![factor])?;
    let mut mats = Vec::new();
    for t in 0..=top - shift {
        let rows = basis.classes[t as usize]
            .iter()
            .map(|&c| {
                let mut v = FpVector::zero(u.p, basis.dim(t + shift));
                if let Some(target) = u.differential(c) {
                    let (d, i) = basis.position(target).expect("targets lie in the basis window");
                    debug_assert_eq!(d, t + shift);
                    v.set(i, 1);
                }
                v
            })
            .collect();
        mats.push(Matrix::from_rows(u.p, basis.dim(t + shift), rows));
    }
    let round = Round { r: 2 * u.r, maps: vec![FactorMap::Matrices(mats)], entries: Vec::new() };
    Ok((basis, page, round))
}

/// Replays the page computation for the universal example and checks the
/// displayed `E^{2r+2}` and the survival of all 2r classes.
pub fn replay_universal(u: &UniversalInput) -> Result<UniversalReport> {
    let (basis, page, round) = universal_page(u)?;
    let next = turn_page(&page, &round)?;
    let mut failures = Vec::new();
    let stable = next.stable_dims();
    let exact = next.valid_tmax.min(u.t_max);
    let survivors = u.survivors();
    // Degrees of the display.
    let mut expected = vec![0u64; exact.max(-1) as usize + 1];
    for (_, combo) in &survivors {
        let d = u.degree(combo[0].0);
        if (0..=exact).contains(&d) {
            expected[d as usize] += 1;
        }
    }
    for t in 0..=exact {
        if stable[t as usize] != expected[t as usize] {
            failures.push(format!(
                "degree {t}: E^{} has {} classes, the display {}",
                2 * u.r + 2,
                stable[t as usize],
                expected[t as usize]
            ));
        }
    }
    // The displayed classes themselves are cycles, independent mod boundaries.
    let f = &next.factors[0];
    let mut spans: BTreeMap<i64, crate::linalg::Subspace> = BTreeMap::new();
    for (label, combo) in &survivors {
        let Some((t, v)) = basis.vector(combo) else { continue };
        if t > exact {
            continue;
        }
        let sq = &f.sub[t as usize];
        if !sq.is_cycle(&v) {
            failures.push(format!("{label} is not a cycle"));
            continue;
        }
        let s = spans.entry(t).or_insert_with(|| sq.boundaries().clone());
        if !s.insert(v) {
            failures.push(format!("{label} is zero or dependent on E^{}", 2 * u.r + 2));
        }
    }
    for v in torsion_audit(&next) {
        failures.push(v);
    }
    if next.torsion.iter().any(|s| s.columns().iter().any(|&c| c <= -2 * u.r())) {
        failures.push("torsion outside −2r < s <= 0".into());
    }
    let survivors = certify_survivors(u, &survivors, exact, &mut failures)?;
    Ok(UniversalReport {
        input: *u,
        pass: failures.is_empty(),
        survivors,
        failures,
        stable_dims: stable[..=exact.max(0) as usize].to_vec(),
        e2r: Some(page),
        next: Some(next),
    })
}

fn certify_survivors(
    u: &UniversalInput,
    display: &[(String, Vec<(UClass, u32)>)],
    exact: i64,
    failures: &mut Vec<String>,
) -> Result<Vec<Survivor>> {
    let degrees: Vec<i64> = display.iter().map(|(_, c)| u.degree(c[0].0)).collect();
    let top = degrees.iter().copied().max().unwrap_or(0);
    let earlier: Vec<Vec<(UClass, u32)>> = if u.r > 1 {
        // With δ' = 0 the product terms vanish.
        UniversalInput { r: u.r - 1, ..*u }
            .survivors()
            .into_iter()
            .map(|(_, c)| c.into_iter().filter(|(c, _)| *c != UClass::Product).collect::<Vec<_>>())
            .filter(|c| !c.is_empty())
            .collect()
    } else {
        Vec::new()
    };
    let degs = &degrees;
    let mut out = Vec::new();
    for ((label, combo), &d) in display.iter().zip(degs) {
        // Later differentials d^{2r'}, r' > r, from (0, d) to (−2r', d + 2r' − 1).
        let targets: Vec<usize> = (u.r() + 1..)
            .map(|rr| d + 2 * rr - 1)
            .take_while(|&e| e <= top)
            .flat_map(|e| (0..display.len()).filter(move |&j| degs[j] == e))
            .collect();
        let reason = if targets.is_empty() {
            Some(SurvivalReason::VanishingRegion)
        } else if combo == &[(UClass::Product, 1)] && matches!(u.case(), Case::Even { .. }) && bockstein_excludes(display, &targets) {
            Some(SurvivalReason::BocksteinExclusion)
        } else if earlier.contains(combo) {
            Some(SurvivalReason::Induction)
        } else {
            None
        };
        if reason.is_none() {
            failures.push(format!("{label} is not certified as an infinite cycle"));
        }
        out.push(Survivor { class: label.clone(), degree: d, in_window: d <= exact, reason });
    }
    Ok(out)
}

/// β(x^{p−1}δx) = 0, while each candidate target `Q^i(x)` has `βQ^i(x)`
/// among the survivors.
fn bockstein_excludes(display: &[(String, Vec<(UClass, u32)>)], targets: &[usize]) -> bool {
    targets.iter().all(|&j| match display[j].1.as_slice() {
        [(UClass::Qx { eps: 0, i }, _)] => {
            let b = UClass::Qx { eps: 1, i: *i };
            display.iter().any(|(_, c)| c.as_slice() == [(b, 1)])
        }
        _ => false,
    })
}

/// The sampled grid: p in {2, 3, 5}, 0 <= t <= 12, 1 <= r <= 4.
pub fn grid(t_max: i64) -> Vec<UniversalInput> {
    let mut out = Vec::new();
    for p in [2u32, 3, 5] {
        for t in 0..=12 {
            for r in 1..=4 {
                out.push(UniversalInput::new(p, t, r, t_max).expect("grid inputs are valid"));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests;
