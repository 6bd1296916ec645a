use super::{GenKind, Monomial, Presentation};
use crate::error::{Error, Result};

impl Presentation {
    fn check_degree_zero(&self) -> Result<()> {
        if let Some(g) = self.generators.iter().find(|g| g.degree == 0) {
            return Err(Error::InvalidGenerator {
                name: g.name.clone(),
                reason: "degree-0 generators are not supported".into(),
            });
        }
        Ok(())
    }

    /// All monomials of degree `t`, in canonical order.
    pub fn basis_in_degree(&self, t: i64, t_max: i64) -> Result<Vec<Monomial>> {
        if t > t_max {
            return Err(Error::OutsideWindow { t, t_max });
        }
        self.check_degree_zero()?;
        let mut out = Vec::new();
        if t < 0 {
            return Ok(out);
        }
        let mut exps = vec![0u32; self.len()];
        self.enumerate(0, t as u64, &mut exps, &mut out);
        Ok(out)
    }

    fn enumerate(&self, i: usize, remaining: u64, exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == self.len() {
            if remaining == 0 {
                out.push(Monomial(exps.clone()));
            }
            return;
        }
        let g = &self.generators[i];
        let d = g.degree as u64;
        let mut top = remaining / d;
        if let Some(cap) = g.kind.max_exponent() {
            top = top.min(cap as u64);
        }
        for e in (0..=top).rev() {
            exps[i] = e as u32;
            self.enumerate(i + 1, remaining - e * d, exps, out);
        }
        exps[i] = 0;
    }

    /// Bases of every degree `0..=t_max`.
    pub fn bases_up_to(&self, t_max: i64) -> Result<Vec<Vec<Monomial>>> {
        (0..=t_max).map(|t| self.basis_in_degree(t, t_max)).collect()
    }

    /// Degreewise dimensions for `0 <= t <= t_max`, as the truncated product
    /// of the single-generator series.
    pub fn poincare_series(&self, t_max: i64) -> Result<Vec<u64>> {
        self.check_degree_zero()?;
        let n = (t_max.max(-1) + 1) as usize;
        let mut series = vec![0u64; n];
        if n == 0 {
            return Ok(series);
        }
        series[0] = 1;
        for g in &self.generators {
            series = convolve(&series, &generator_series(g.kind, g.degree as usize, n));
        }
        Ok(series)
    }
}

fn generator_series(kind: GenKind, degree: usize, n: usize) -> Vec<u64> {
    let mut s = vec![0u64; n];
    let cap = kind.max_exponent().map(|c| c as usize).unwrap_or(usize::MAX);
    let mut e = 0;
    while e <= cap && e * degree < n {
        s[e * degree] = 1;
        e += 1;
    }
    s
}

/// Truncated product of two series of equal length.
pub fn convolve(a: &[u64], b: &[u64]) -> Vec<u64> {
    let n = a.len();
    let mut out = vec![0u64; n];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}
