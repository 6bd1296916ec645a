//! Oracles shared by the integration tests. Nothing here calls into the
//! engine's linear algebra or monomial bases.
#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::Rng;

/// Poincaré series of ⊗P(poly) ⊗ E(ext) ⊗ P_h(trunc) through degree t,
/// read off generator degrees only.
pub fn series(poly: &[i64], ext: &[i64], t: i64) -> Vec<u64> {
    let mut s = vec![0u64; t as usize + 1];
    s[0] = 1;
    for &d in poly.iter().filter(|&&d| d <= t) {
        for n in d as usize..s.len() {
            s[n] += s[n - d as usize];
        }
    }
    for &d in ext.iter().filter(|&&d| d <= t) {
        for n in (d as usize..s.len()).rev() {
            s[n] += s[n - d as usize];
        }
    }
    s
}

/// `rank_in(t)`, the dimension of the image of a degree-raising
/// differential into degree t, from the Poincaré series of the complex
/// and of its homology.
pub fn image_ranks(total: &[u64], homology: &[u64]) -> Vec<u64> {
    let mut rin = vec![0u64; total.len()];
    for t in 0..total.len() - 1 {
        rin[t + 1] = total[t] - homology[t] - rin[t];
    }
    rin
}

/// Rank over F_p by dense row reduction.
pub fn rank_mod_p(p: u64, mut rows: Vec<Vec<u64>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&i| !rows[i][c].is_multiple_of(p)) else { continue };
        rows.swap(rank, piv);
        let inv = pow_mod(rows[rank][c], p - 2, p);
        for x in rows[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..rows.len() {
            if i != rank && !rows[i][c].is_multiple_of(p) {
                let f = rows[i][c];
                for j in 0..cols {
                    rows[i][j] = (rows[i][j] + p * p - f * rows[rank][j] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// A small free graded-commutative algebra with a differential σ of
/// degree +1, described independently of the engine's types.
#[derive(Clone, Debug)]
pub struct Toy {
    pub p: u64,
    /// (degree, max exponent or None).
    pub gens: Vec<(i64, Option<u32>)>,
    /// σ(g) as a list of (exponents, coefficient).
    pub sigma: Vec<Vec<(Vec<u32>, u64)>>,
}

impl Toy {
    /// Up to four generators of degree at most 6. σ vanishes on a random
    /// subset Z, and sends the others to combinations of monomials in Z,
    /// so σ² = 0 by the Leibniz rule.
    pub fn random(rng: &mut StdRng, p: u64) -> Toy {
        let n = rng.gen_range(1..=4);
        let zero: Vec<bool> = (0..n).map(|i| i == 0 || rng.gen_bool(0.35)).collect();
        let mut degrees: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=6i64)).collect();
        // Mostly give σ somewhere to land: one below a σ-closed generator.
        for g in 0..n {
            if !zero[g] && rng.gen_bool(0.9) {
                let targets: Vec<i64> = (0..n).filter(|&z| zero[z] && degrees[z] >= 2).map(|z| degrees[z]).collect();
                if !targets.is_empty() {
                    degrees[g] = targets[rng.gen_range(0..targets.len())] - 1;
                }
            }
        }
        let mut gens = Vec::new();
        for &d in &degrees {
            let kind = if p == 2 {
                match rng.gen_range(0..3) {
                    0 => Some(1),
                    1 => Some(3),
                    _ => None,
                }
            } else if d % 2 == 1 {
                Some(1)
            } else if rng.gen_bool(0.3) {
                Some(p as u32 - 1)
            } else {
                None
            };
            gens.push((d, kind));
        }
        let mut toy = Toy { p, gens, sigma: vec![Vec::new(); n] };
        for g in 0..n {
            if zero[g] {
                continue;
            }
            let target = toy.gens[g].0 + 1;
            let cands: Vec<Vec<u32>> = toy
                .monomials(target)
                .into_iter()
                .filter(|m| m.iter().enumerate().all(|(i, &e)| e == 0 || zero[i]))
                .collect();
            for (j, m) in cands.iter().enumerate() {
                // At least one term whenever there is room for one.
                if rng.gen_bool(0.7) || (j + 1 == cands.len() && toy.sigma[g].is_empty()) {
                    toy.sigma[g].push((m.clone(), rng.gen_range(1..p)));
                }
            }
        }
        toy
    }

    pub fn degree(&self, m: &[u32]) -> i64 {
        m.iter().zip(&self.gens).map(|(&e, g)| e as i64 * g.0).sum()
    }

    /// Exponent vectors of degree d, in a fixed order.
    pub fn monomials(&self, d: i64) -> Vec<Vec<u32>> {
        fn go(toy: &Toy, i: usize, left: i64, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if i == toy.gens.len() {
                if left == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            let (deg, max) = toy.gens[i];
            let mut e = 0;
            while e as i64 * deg <= left && max.is_none_or(|m| e <= m) {
                cur.push(e);
                go(toy, i + 1, left - e as i64 * deg, cur, out);
                cur.pop();
                e += 1;
            }
        }
        let mut out = Vec::new();
        go(self, 0, d, &mut Vec::new(), &mut out);
        out
    }

    /// Product of monomials with the Koszul sign, or None if it vanishes.
    pub fn mul(&self, a: &[u32], b: &[u32]) -> Option<(Vec<u32>, u64)> {
        let mut out = Vec::with_capacity(a.len());
        for i in 0..a.len() {
            let e = a[i] + b[i];
            if self.gens[i].1.is_some_and(|m| e > m) {
                return None;
            }
            out.push(e);
        }
        // b_j moves past a_i for i > j.
        let mut odd = 0u64;
        for j in 0..b.len() {
            for i in j + 1..a.len() {
                odd += (a[i] as u64 * self.gens[i].0 as u64 % 2) * (b[j] as u64 * self.gens[j].0 as u64 % 2);
            }
        }
        let sign = if odd % 2 == 1 { self.p - 1 } else { 1 };
        Some((out, sign))
    }

    /// σ on a monomial by the Leibniz rule, as (exponents, coefficient).
    pub fn d(&self, m: &[u32]) -> Vec<(Vec<u32>, u64)> {
        let p = self.p;
        let n = m.len();
        let mut out: Vec<(Vec<u32>, u64)> = Vec::new();
        for i in 0..n {
            if m[i] == 0 || self.sigma[i].is_empty() {
                continue;
            }
            let prefix: Vec<u32> = (0..n).map(|j| if j < i { m[j] } else { 0 }).collect();
            let suffix: Vec<u32> = (0..n).map(|j| if j > i { m[j] } else { 0 }).collect();
            let mut rest = vec![0; n];
            rest[i] = m[i] - 1;
            // g^e ↦ e·g^{e−1}σg (g even, or e = 1).
            let coef = m[i] as u64 % p;
            if coef == 0 {
                continue;
            }
            let sign = if self.degree(&prefix) % 2 == 1 { p - 1 } else { 1 };
            for (s, c) in &self.sigma[i] {
                let Some((a, s1)) = self.mul(&prefix, &rest) else { continue };
                let Some((b, s2)) = self.mul(&a, s) else { continue };
                let Some((e, s3)) = self.mul(&b, &suffix) else { continue };
                let k = coef * sign % p * c % p * s1 % p * s2 % p * s3 % p;
                match out.iter_mut().find(|(x, _)| *x == e) {
                    Some((_, v)) => *v = (*v + k) % p,
                    None => out.push((e, k)),
                }
            }
        }
        out.retain(|(_, c)| *c != 0);
        out
    }

    /// dim V_t and rank of σ: V_t → V_{t+1} for t = 0..=t_max.
    pub fn ranks(&self, t_max: i64) -> (Vec<u64>, Vec<u64>) {
        let mut dims = Vec::new();
        let mut rout = Vec::new();
        for t in 0..=t_max {
            let src = self.monomials(t);
            let tgt = self.monomials(t + 1);
            let rows = src
                .iter()
                .map(|m| {
                    let mut row = vec![0u64; tgt.len()];
                    for (e, c) in self.d(m) {
                        let j = tgt.iter().position(|x| *x == e).expect("image lies in the basis");
                        row[j] = (row[j] + c) % self.p;
                    }
                    row
                })
                .collect();
            dims.push(src.len() as u64);
            rout.push(rank_mod_p(self.p, rows) as u64);
        }
        (dims, rout)
    }

    /// Homology dimensions and image dimensions of (V, σ) through t_max.
    pub fn homology(&self, t_max: i64) -> (Vec<u64>, Vec<u64>) {
        let (dims, rout) = self.ranks(t_max);
        let rin: Vec<u64> = (0..=t_max as usize).map(|t| if t == 0 { 0 } else { rout[t - 1] }).collect();
        let h = (0..=t_max as usize).map(|t| dims[t] - rout[t] - rin[t]).collect();
        (h, rin)
    }
}
