//! Dense linear algebra over F_p: vectors, row reduction, kernels, and
//! subquotients. Vectors over F_2 are bit packed.

use std::fmt;

use crate::error::{Error, Result};
use crate::fp::Prime;

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Bits(Vec<u64>),
    Words(Vec<u8>),
}

/// A vector in F_p^n.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpVector {
    p: Prime,
    len: usize,
    repr: Repr,
}

impl FpVector {
    pub fn zero(p: Prime, len: usize) -> Self {
        let repr = if p.is_two() {
            Repr::Bits(vec![0; len.div_ceil(64)])
        } else {
            Repr::Words(vec![0; len])
        };
        FpVector { p, len, repr }
    }

    pub fn basis(p: Prime, len: usize, i: usize) -> Self {
        let mut v = Self::zero(p, len);
        v.set(i, 1);
        v
    }

    pub fn from_entries(p: Prime, entries: &[u32]) -> Self {
        let mut v = Self::zero(p, entries.len());
        for (i, &e) in entries.iter().enumerate() {
            v.set(i, e % p.value());
        }
        v
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.p
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn entry(&self, i: usize) -> u32 {
        debug_assert!(i < self.len);
        match &self.repr {
            Repr::Bits(b) => ((b[i / 64] >> (i % 64)) & 1) as u32,
            Repr::Words(w) => w[i] as u32,
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: u32) {
        debug_assert!(i < self.len);
        let value = value % self.p.value();
        match &mut self.repr {
            Repr::Bits(b) => {
                if value == 1 {
                    b[i / 64] |= 1 << (i % 64);
                } else {
                    b[i / 64] &= !(1 << (i % 64));
                }
            }
            Repr::Words(w) => w[i] = value as u8,
        }
    }

    pub fn add_to_entry(&mut self, i: usize, value: u32) {
        let cur = self.entry(i);
        self.set(i, self.p.add(cur, value % self.p.value()));
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Bits(b) => b.iter().all(|&x| x == 0),
            Repr::Words(w) => w.iter().all(|&x| x == 0),
        }
    }

    pub fn first_nonzero(&self) -> Option<usize> {
        match &self.repr {
            Repr::Bits(b) => b
                .iter()
                .enumerate()
                .find(|(_, &x)| x != 0)
                .map(|(i, x)| i * 64 + x.trailing_zeros() as usize),
            Repr::Words(w) => w.iter().position(|&x| x != 0),
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &FpVector, c: u32) {
        debug_assert_eq!(self.len, other.len);
        let c = c % self.p.value();
        if c == 0 {
            return;
        }
        match (&mut self.repr, &other.repr) {
            (Repr::Bits(a), Repr::Bits(b)) => {
                for (x, y) in a.iter_mut().zip(b) {
                    *x ^= *y;
                }
            }
            (Repr::Words(a), Repr::Words(b)) => {
                let p = self.p.value() as u16;
                let c = c as u16;
                for (x, &y) in a.iter_mut().zip(b) {
                    *x = ((*x as u16 + c * y as u16) % p) as u8;
                }
            }
            _ => unreachable!("mixed vector representations"),
        }
    }

    pub fn scale(&mut self, c: u32) {
        let c = c % self.p.value();
        match &mut self.repr {
            Repr::Bits(b) => {
                if c == 0 {
                    b.iter_mut().for_each(|x| *x = 0);
                }
            }
            Repr::Words(w) => {
                let p = self.p.value() as u16;
                for x in w.iter_mut() {
                    *x = ((*x as u16 * c as u16) % p) as u8;
                }
            }
        }
    }

    pub fn iter_nonzero(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        (0..self.len).filter_map(move |i| {
            let e = self.entry(i);
            (e != 0).then_some((i, e))
        })
    }

    pub fn entries(&self) -> Vec<u32> {
        (0..self.len).map(|i| self.entry(i)).collect()
    }

    /// Extends the vector with zeros to length `len`.
    pub fn extended(&self, len: usize) -> FpVector {
        let mut out = FpVector::zero(self.p, len);
        for (i, e) in self.iter_nonzero() {
            out.set(i, e);
        }
        out
    }
}

impl fmt::Debug for FpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.entries())
    }
}

/// A matrix stored as a list of rows. Maps act on row vectors: the rows are
/// the images of the source basis vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    p: Prime,
    cols: usize,
    rows: Vec<FpVector>,
}

impl Matrix {
    pub fn zero(p: Prime, rows: usize, cols: usize) -> Self {
        Matrix { p, cols, rows: vec![FpVector::zero(p, cols); rows] }
    }

    pub fn identity(p: Prime, n: usize) -> Self {
        Matrix { p, cols: n, rows: (0..n).map(|i| FpVector::basis(p, n, i)).collect() }
    }

    pub fn from_rows(p: Prime, cols: usize, rows: Vec<FpVector>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == cols));
        Matrix { p, cols, rows }
    }

    pub fn from_entries(p: Prime, cols: usize, entries: &[Vec<u32>]) -> Self {
        let rows = entries.iter().map(|r| FpVector::from_entries(p, r)).collect();
        Matrix::from_rows(p, cols, rows)
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &FpVector {
        &self.rows[i]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut FpVector {
        &mut self.rows[i]
    }

    pub fn apply(&self, v: &FpVector) -> FpVector {
        let mut out = FpVector::zero(self.p, self.cols);
        for (i, c) in v.iter_nonzero() {
            out.add_scaled(&self.rows[i], c);
        }
        out
    }

    /// The product `self * other` (first `self`, then `other`).
    pub fn compose(&self, other: &Matrix) -> Matrix {
        let rows = self.rows.iter().map(|r| other.apply(r)).collect();
        Matrix::from_rows(self.p, other.cols, rows)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(FpVector::is_zero)
    }

    pub fn rank(&self) -> usize {
        let mut space = Subspace::new(self.p, self.cols);
        for r in &self.rows {
            space.insert(r.clone());
        }
        space.dim()
    }

    /// Returns `(kernel basis, image basis)` of the map.
    pub fn kernel_and_image(&self) -> (Vec<FpVector>, Subspace) {
        let n = self.rows.len();
        let mut tracked = TrackedSpace::new(self.p, self.cols, n);
        let mut kernel = Vec::new();
        for (i, r) in self.rows.iter().enumerate() {
            let tag = FpVector::basis(self.p, n, i);
            if let Some(k) = tracked.insert(r.clone(), tag) {
                kernel.push(k);
            }
        }
        (kernel, tracked.into_subspace())
    }
}

/// A subspace of F_p^n kept in fully reduced row echelon form.
#[derive(Clone, Debug)]
pub struct Subspace {
    p: Prime,
    ambient: usize,
    rows: Vec<FpVector>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn new(p: Prime, ambient: usize) -> Self {
        Subspace { p, ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(p: Prime, ambient: usize) -> Self {
        Subspace {
            p,
            ambient,
            rows: (0..ambient).map(|i| FpVector::basis(p, ambient, i)).collect(),
            pivots: (0..ambient).collect(),
        }
    }

    pub fn spanned_by<'a>(p: Prime, ambient: usize, vs: impl IntoIterator<Item = &'a FpVector>) -> Self {
        let mut s = Subspace::new(p, ambient);
        for v in vs {
            s.insert(v.clone());
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[FpVector] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `v` in place modulo the subspace.
    pub fn reduce(&self, v: &mut FpVector) {
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let c = v.entry(piv);
            if c != 0 {
                v.add_scaled(row, self.p.neg(c));
            }
        }
    }

    pub fn contains(&self, v: &FpVector) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w);
        w.is_zero()
    }

    /// Inserts `v`; returns whether the dimension grew.
    pub fn insert(&mut self, mut v: FpVector) -> bool {
        debug_assert_eq!(v.len(), self.ambient);
        self.reduce(&mut v);
        let Some(piv) = v.first_nonzero() else {
            return false;
        };
        let inv = self.p.inv(v.entry(piv));
        v.scale(inv);
        for row in &mut self.rows {
            let c = row.entry(piv);
            if c != 0 {
                row.add_scaled(&v, self.p.neg(c));
            }
        }
        self.rows.push(v);
        self.pivots.push(piv);
        true
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }
}

/// Row echelon space whose rows remember which combination of the inserted
/// generators they are. Used for kernels and for solving linear systems.
#[derive(Clone, Debug)]
pub struct TrackedSpace {
    p: Prime,
    ambient: usize,
    tags: usize,
    rows: Vec<(FpVector, FpVector)>,
    pivots: Vec<usize>,
}

impl TrackedSpace {
    pub fn new(p: Prime, ambient: usize, tags: usize) -> Self {
        TrackedSpace { p, ambient, tags, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    fn reduce_tracked(&self, v: &mut FpVector, tag: &mut FpVector) {
        for ((row, rtag), &piv) in self.rows.iter().zip(&self.pivots) {
            let c = v.entry(piv);
            if c != 0 {
                let nc = self.p.neg(c);
                v.add_scaled(row, nc);
                tag.add_scaled(rtag, nc);
            }
        }
    }

    /// Inserts a vector carrying `tag`. If the vector is dependent, returns
    /// the tag combination that vanishes (a relation among generators).
    pub fn insert(&mut self, mut v: FpVector, mut tag: FpVector) -> Option<FpVector> {
        debug_assert_eq!(tag.len(), self.tags);
        self.reduce_tracked(&mut v, &mut tag);
        let Some(piv) = v.first_nonzero() else {
            return Some(tag);
        };
        let inv = self.p.inv(v.entry(piv));
        v.scale(inv);
        tag.scale(inv);
        for (row, rtag) in &mut self.rows {
            let c = row.entry(piv);
            if c != 0 {
                let nc = self.p.neg(c);
                row.add_scaled(&v, nc);
                rtag.add_scaled(&tag, nc);
            }
        }
        self.rows.push((v, tag));
        self.pivots.push(piv);
        None
    }

    /// Writes `v` as a combination of the inserted generators, if possible.
    pub fn express(&self, v: &FpVector) -> Option<FpVector> {
        let mut w = v.clone();
        let mut acc = FpVector::zero(self.p, self.tags);
        for ((row, rtag), &piv) in self.rows.iter().zip(&self.pivots) {
            let c = w.entry(piv);
            if c != 0 {
                w.add_scaled(row, self.p.neg(c));
                acc.add_scaled(rtag, c);
            }
        }
        w.is_zero().then_some(acc)
    }

    pub fn into_subspace(self) -> Subspace {
        let (rows, _): (Vec<_>, Vec<_>) = self.rows.into_iter().unzip();
        Subspace { p: self.p, ambient: self.ambient, rows, pivots: self.pivots }
    }
}

/// A subquotient `Z / B` of F_p^n with `B ⊆ Z`, together with a chosen basis
/// of representatives for the quotient.
#[derive(Clone, Debug)]
pub struct Subquotient {
    p: Prime,
    ambient: usize,
    cycles: Subspace,
    boundaries: Subspace,
    reps: Vec<FpVector>,
    solver: TrackedSpace,
}

impl Subquotient {
    /// The whole space with no boundaries.
    pub fn full(p: Prime, ambient: usize) -> Self {
        let cycles = Subspace::full(p, ambient);
        Self::new(cycles, Subspace::new(p, ambient)).expect("0 is contained in everything")
    }

    pub fn new(cycles: Subspace, boundaries: Subspace) -> Result<Self> {
        let p = cycles.p;
        let ambient = cycles.ambient;
        if !cycles.contains_subspace(&boundaries) {
            return Err(Error::Inconsistent("boundaries are not contained in cycles".into()));
        }
        let tags = boundaries.dim() + cycles.dim();
        let mut solver = TrackedSpace::new(p, ambient, tags);
        for (i, b) in boundaries.basis().iter().enumerate() {
            solver.insert(b.clone(), FpVector::basis(p, tags, i));
        }
        let mut reps = Vec::new();
        for z in cycles.basis() {
            let mut w = z.clone();
            boundaries.reduce(&mut w);
            let idx = boundaries.dim() + reps.len();
            if solver.insert(w.clone(), FpVector::basis(p, tags, idx)).is_none() {
                reps.push(w);
            }
        }
        Ok(Subquotient { p, ambient, cycles, boundaries, reps, solver })
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn cycles(&self) -> &Subspace {
        &self.cycles
    }

    pub fn boundaries(&self) -> &Subspace {
        &self.boundaries
    }

    /// Representatives of a basis of the quotient.
    pub fn reps(&self) -> &[FpVector] {
        &self.reps
    }

    /// Coordinates of a cycle in the quotient basis; `None` if `v` is not a
    /// cycle.
    pub fn coordinates(&self, v: &FpVector) -> Option<FpVector> {
        let tag = self.solver.express(v)?;
        let nb = self.boundaries.dim();
        let mut out = FpVector::zero(self.p, self.reps.len());
        for i in 0..self.reps.len() {
            out.set(i, tag.entry(nb + i));
        }
        Some(out)
    }

    /// Lifts quotient coordinates to an ambient representative.
    pub fn lift(&self, coords: &FpVector) -> FpVector {
        let mut out = FpVector::zero(self.p, self.ambient);
        for (i, c) in coords.iter_nonzero() {
            out.add_scaled(&self.reps[i], c);
        }
        out
    }

    pub fn is_cycle(&self, v: &FpVector) -> bool {
        self.cycles.contains(v)
    }

    pub fn is_boundary(&self, v: &FpVector) -> bool {
        self.boundaries.contains(v)
    }
}

/// Result of [`kernel_image_quotient`].
#[derive(Clone, Debug)]
pub struct Homology {
    pub dimension: usize,
    /// Representatives of a basis of `ker(d_out) / im(d_in)`.
    pub representatives: Vec<FpVector>,
    pub kernel: Subspace,
    pub image: Subspace,
}

/// Computes `ker(d_out) / im(d_in)` for composable maps `d_in: A -> C` and
/// `d_out: C -> D` (rows are images of basis vectors).
pub fn kernel_image_quotient(d_in: &Matrix, d_out: &Matrix) -> Result<Homology> {
    if d_in.cols() != d_out.rows() {
        return Err(Error::Inconsistent(format!(
            "matrix shapes do not compose: {} columns vs {} rows",
            d_in.cols(),
            d_out.rows()
        )));
    }
    if !d_in.compose(d_out).is_zero() {
        return Err(Error::Inconsistent("composite of differentials is nonzero".into()));
    }
    let p = d_out.prime();
    let n = d_out.rows();
    let (kernel_vecs, _) = d_out.kernel_and_image();
    let kernel = Subspace::spanned_by(p, n, &kernel_vecs);
    let image = Subspace::spanned_by(p, n, d_in.rows.iter());
    let sq = Subquotient::new(kernel.clone(), image.clone())?;
    Ok(Homology { dimension: sq.dim(), representatives: sq.reps, kernel, image })
}
