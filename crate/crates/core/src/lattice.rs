//! Exact integer lattice arithmetic.
//!
//! Everything here works over `i64` with `i128` accumulation in dot
//! products. Smith normal form is the workhorse: lattice membership,
//! coordinates, sublattice indices and linear congruences all go through it.
//!
//! Semilattices are stored by their coset representatives modulo `2Λ`; a
//! coset of `2Λ` is identified by the parity pattern of the coordinates of any
//! of its elements in the basis of `Λ`, packed into a `u64` bit mask.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::{Deref, Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A vector of integer lattice coordinates.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntVector(pub Vec<i64>);

impl IntVector {
    pub fn zeros(n: usize) -> Self {
        IntVector(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        IntVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &IntVector) -> IntVector {
        debug_assert_eq!(self.dim(), other.dim());
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &IntVector) -> IntVector {
        debug_assert_eq!(self.dim(), other.dim());
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> IntVector {
        IntVector(self.0.iter().map(|a| a * k).collect())
    }

    pub fn neg(&self) -> IntVector {
        self.scale(-1)
    }

    /// `self + k * other`
    pub fn add_scaled(&self, k: i64, other: &IntVector) -> IntVector {
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a + k * b).collect())
    }

    pub fn sup_norm(&self) -> i64 {
        self.0.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    pub fn dot(&self, other: &IntVector) -> i128 {
        dot(&self.0, &other.0)
    }
}

impl Deref for IntVector {
    type Target = [i64];
    fn deref(&self) -> &[i64] {
        &self.0
    }
}

impl From<Vec<i64>> for IntVector {
    fn from(v: Vec<i64>) -> Self {
        IntVector(v)
    }
}

impl fmt::Debug for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

fn dot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

fn narrow(x: i128) -> i64 {
    i64::try_from(x).expect("integer overflow in exact lattice arithmetic")
}

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    /// Builds a matrix from its rows. All rows must have length `cols`.
    pub fn from_rows(cols: usize, rows: &[Vec<i64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Dimension(format!(
                    "row {i} has length {}, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(IntMatrix { rows: rows.len(), cols, data })
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, cols: &[IntVector]) -> Result<Self> {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            if c.dim() != rows {
                return Err(Error::Dimension(format!(
                    "column {j} has length {}, expected {rows}",
                    c.dim()
                )));
            }
            for i in 0..rows {
                m[(i, j)] = c[i];
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> IntVector {
        IntVector(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn col(&self, j: usize) -> IntVector {
        IntVector((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).0).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let s: i128 = (0..self.cols)
                    .map(|k| self[(i, k)] as i128 * other[(k, j)] as i128)
                    .sum();
                out[(i, j)] = narrow(s);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[i64]) -> Result<IntVector> {
        if self.cols != v.len() {
            return Err(Error::Dimension(format!(
                "cannot apply {}x{} matrix to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok(IntVector(
            (0..self.rows)
                .map(|i| narrow(dot(&self.data[i * self.cols..(i + 1) * self.cols], v)))
                .collect(),
        ))
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<i64> {
        if self.rows != self.cols {
            return Err(Error::Dimension("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(1);
        }
        let mut a: Vec<Vec<i128>> =
            (0..n).map(|i| (0..n).map(|j| self[(i, j)] as i128).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(0),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        i64::try_from(sign * a[n - 1][n - 1]).map_err(|_| Error::Overflow)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, k: i64) {
        for j in 0..self.cols {
            let v = self[(dst, j)] as i128 + k as i128 * self[(src, j)] as i128;
            self[(dst, j)] = narrow(v);
        }
    }

    /// col[dst] += k * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, k: i64) {
        for i in 0..self.rows {
            let v = self[(i, dst)] as i128 + k as i128 * self[(i, src)] as i128;
            self[(i, dst)] = narrow(v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self[(i, j)] = -self[(i, j)];
        }
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries((0..self.rows).map(|i| self.row(i))).finish()
    }
}

/// `u * m * v == d`, with `u`, `v` unimodular and `d` diagonal with
/// `d[0] | d[1] | ...` (zeros last).
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d[(i, i)]).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|&&x| x != 0).count()
    }
}

pub fn snf(m: &IntMatrix) -> Snf {
    let (r, c) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);

    for t in 0..r.min(c) {
        // smallest non-zero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..r {
            for j in t..c {
                let x = a[(i, j)];
                if x != 0 && best.is_none_or(|(bi, bj)| x.abs() < a[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap_rows(t, pi);
        u.swap_rows(t, pi);
        a.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let mut clean = true;
            for i in t + 1..r {
                if a[(i, t)] != 0 {
                    let q = a[(i, t)] / a[(t, t)];
                    a.add_row_multiple(i, t, -q);
                    u.add_row_multiple(i, t, -q);
                    if a[(i, t)] != 0 {
                        a.swap_rows(t, i);
                        u.swap_rows(t, i);
                        clean = false;
                    }
                }
            }
            for j in t + 1..c {
                if a[(t, j)] != 0 {
                    let q = a[(t, j)] / a[(t, t)];
                    a.add_col_multiple(j, t, -q);
                    v.add_col_multiple(j, t, -q);
                    if a[(t, j)] != 0 {
                        a.swap_cols(t, j);
                        v.swap_cols(t, j);
                        clean = false;
                    }
                }
            }
            if !clean
                || (t + 1..r).any(|i| a[(i, t)] != 0)
                || (t + 1..c).any(|j| a[(t, j)] != 0)
            {
                continue;
            }
            let p = a[(t, t)];
            let bad_row = (t + 1..r).find(|&i| (t + 1..c).any(|j| a[(i, j)] % p != 0));
            match bad_row {
                Some(i) => {
                    a.add_row_multiple(t, i, 1);
                    u.add_row_multiple(t, i, 1);
                }
                None => break,
            }
        }
        if a[(t, t)] < 0 {
            a.negate_row(t);
            u.negate_row(t);
        }
    }
    Snf { u, d: a, v }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of `a` modulo `m` for `gcd(a, m) = 1`, in `[0, m)`.
fn mod_inverse(a: i64, m: i64) -> i64 {
    let (mut old_r, mut r) = (a.rem_euclid(m) as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(m as i128) as i64
}

/// Outcome of a linear congruence `A x ≡ b (mod m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModSolution {
    /// A solution with entries in `[0, m)`.
    Sat(IntVector),
    /// A row combination `r` with `r·A ≡ 0` and `r·b ≢ 0 (mod m)`.
    Unsat(IntVector),
}

pub fn solve_mod(a: &IntMatrix, b: &[i64], m: i64) -> Result<ModSolution> {
    if m < 1 {
        return Err(Error::ZeroModulus);
    }
    if b.len() != a.rows {
        return Err(Error::Dimension(format!(
            "system has {} rows but right-hand side has length {}",
            a.rows,
            b.len()
        )));
    }
    let f = snf(a);
    let c = f.u.mul_vec(b)?;
    let n = a.cols;
    let mut y = vec![0i64; n];
    for i in 0..a.rows {
        let di = if i < n { f.d[(i, i)] } else { 0 };
        let g = gcd(di, m);
        let ci = c[i].rem_euclid(m);
        if ci % g != 0 {
            let k = m / g;
            let cert = f.u.row(i).0.iter().map(|&x| (k as i128 * x as i128).rem_euclid(m as i128) as i64).collect();
            return Ok(ModSolution::Unsat(IntVector(cert)));
        }
        if i < n {
            let mg = m / g;
            if mg > 1 {
                let inv = mod_inverse(di / g, mg) as i128;
                y[i] = ((ci / g) as i128 * inv).rem_euclid(mg as i128) as i64;
            }
        }
    }
    let x = f.v.mul_vec(&y)?;
    Ok(ModSolution::Sat(IntVector(x.0.iter().map(|v| v.rem_euclid(m)).collect())))
}

/// An exact integer solution of `A x = b`, if one exists.
pub fn solve_integer(a: &IntMatrix, b: &[i64]) -> Result<Option<IntVector>> {
    if b.len() != a.rows {
        return Err(Error::Dimension(format!(
            "system has {} rows but right-hand side has length {}",
            a.rows,
            b.len()
        )));
    }
    let f = snf(a);
    Ok(solve_with_snf(&f, b))
}

fn solve_with_snf(f: &Snf, b: &[i64]) -> Option<IntVector> {
    let c = f.u.mul_vec(b).ok()?;
    let n = f.d.cols;
    let mut y = vec![0i64; n];
    for i in 0..f.d.rows {
        let di = if i < n { f.d[(i, i)] } else { 0 };
        if di == 0 {
            if c[i] != 0 {
                return None;
            }
        } else {
            if c[i] % di != 0 {
                return None;
            }
            y[i] = c[i] / di;
        }
    }
    f.v.mul_vec(&y).ok()
}

/// A full-rank lattice in `Z^ν`, generated by the columns of `basis`.
#[derive(Clone, Debug)]
pub struct IntLattice {
    basis: IntMatrix,
    snf: Snf,
}

impl PartialEq for IntLattice {
    fn eq(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.contains_lattice(other) && other.contains_lattice(self)
    }
}

impl Eq for IntLattice {}

impl IntLattice {
    pub fn new(basis: IntMatrix) -> Result<Self> {
        if basis.rows != basis.cols {
            return Err(Error::InvalidLattice(format!(
                "basis must be square, got {}x{}",
                basis.rows, basis.cols
            )));
        }
        if basis.determinant()? == 0 {
            return Err(Error::InvalidLattice("basis determinant is zero".into()));
        }
        let snf = snf(&basis);
        Ok(IntLattice { basis, snf })
    }

    pub fn standard(dim: usize) -> Self {
        Self::new(IntMatrix::identity(dim)).expect("identity is a lattice basis")
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn basis_vector(&self, i: usize) -> IntVector {
        self.basis.col(i)
    }

    pub fn scaled(&self, k: i64) -> Result<Self> {
        let mut b = self.basis.clone();
        b.data.iter_mut().for_each(|x| *x *= k);
        Self::new(b)
    }

    /// Coordinates of `v` in the basis, or `None` when `v` is not in the lattice.
    pub fn coords(&self, v: &[i64]) -> Option<IntVector> {
        if v.len() != self.dim() {
            return None;
        }
        solve_with_snf(&self.snf, v)
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.coords(v).is_some()
    }

    pub fn from_coords(&self, c: &[i64]) -> IntVector {
        self.basis.mul_vec(c).expect("coordinate length matches lattice dimension")
    }

    pub fn contains_lattice(&self, other: &IntLattice) -> bool {
        (0..other.dim()).all(|j| self.contains(&other.basis.col(j)))
    }

    /// `[self : sub]`, or `None` if `sub` is not contained in `self`.
    pub fn sublattice_index(&self, sub: &IntLattice) -> Option<u64> {
        let cols: Option<Vec<IntVector>> =
            (0..sub.dim()).map(|j| self.coords(&sub.basis.col(j))).collect();
        let m = IntMatrix::from_columns(self.dim(), &cols?).ok()?;
        let d = m.determinant().ok()?;
        Some(d.unsigned_abs())
    }

    /// Lattice direct sum, block-diagonal in the concatenated coordinates.
    pub fn direct_sum(&self, other: &IntLattice) -> IntLattice {
        let (n1, n2) = (self.dim(), other.dim());
        let mut b = IntMatrix::zeros(n1 + n2, n1 + n2);
        for i in 0..n1 {
            for j in 0..n1 {
                b[(i, j)] = self.basis[(i, j)];
            }
        }
        for i in 0..n2 {
            for j in 0..n2 {
                b[(n1 + i, n1 + j)] = other.basis[(i, j)];
            }
        }
        IntLattice::new(b).expect("direct sum of lattices is a lattice")
    }
}

/// Parity mask of a coordinate vector: bit `i` set iff `c[i]` is odd.
pub fn parity_mask(c: &[i64]) -> u64 {
    c.iter()
        .enumerate()
        .fold(0u64, |acc, (i, &x)| if x.rem_euclid(2) == 1 { acc | (1 << i) } else { acc })
}

fn mask_vector(mask: u64, dim: usize) -> Vec<i64> {
    (0..dim).map(|i| ((mask >> i) & 1) as i64).collect()
}

/// Serialized form of a semilattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemilatticeData {
    pub dim: usize,
    /// Matrix rows; the columns of this matrix generate the lattice.
    pub lattice_basis: Vec<Vec<i64>>,
    pub reps: Vec<Vec<i64>>,
}

/// Serialized form of a lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeData {
    pub dim: usize,
    /// Matrix rows; the columns of this matrix generate the lattice.
    pub basis: Vec<Vec<i64>>,
}

impl LatticeData {
    pub fn to_lattice(&self) -> Result<IntLattice> {
        if self.basis.len() != self.dim {
            return Err(Error::InvalidLattice(format!(
                "basis has {} rows, expected {}",
                self.basis.len(),
                self.dim
            )));
        }
        IntLattice::new(IntMatrix::from_rows(self.dim, &self.basis)?)
    }
}

/// `S = ⊎ (τ_i + 2Λ)`: a semilattice given by coset representatives.
#[derive(Clone, Debug)]
pub struct Semilattice {
    lattice: IntLattice,
    reps: Vec<IntVector>,
    masks: Vec<u64>,
    lookup: HashMap<u64, usize>,
}

impl PartialEq for Semilattice {
    fn eq(&self, other: &Self) -> bool {
        self.lattice == other.lattice && {
            let a: BTreeSet<u64> = self.masks.iter().copied().collect();
            let b: BTreeSet<u64> = other
                .reps
                .iter()
                .map(|r| parity_mask(&self.lattice.coords(r).expect("same lattice")))
                .collect();
            a == b
        }
    }
}

impl Semilattice {
    pub fn new(lattice: IntLattice, reps: Vec<IntVector>) -> Result<Self> {
        let dim = lattice.dim();
        if dim > 63 {
            return Err(Error::InvalidSemilattice(format!("rank {dim} exceeds 63")));
        }
        let Some(first) = reps.first() else {
            return Err(Error::InvalidSemilattice("no representatives".into()));
        };
        if !first.is_zero() || first.dim() != dim {
            return Err(Error::InvalidSemilattice("first representative must be 0".into()));
        }
        let mut masks = Vec::with_capacity(reps.len());
        let mut lookup = HashMap::new();
        let mut coords = Vec::with_capacity(reps.len());
        for (i, r) in reps.iter().enumerate() {
            if r.dim() != dim {
                return Err(Error::Dimension(format!(
                    "representative {i} has length {}, expected {dim}",
                    r.dim()
                )));
            }
            let c = lattice.coords(r).ok_or_else(|| Error::NotInLattice(r.0.clone()))?;
            let mask = parity_mask(&c);
            if let Some(j) = lookup.insert(mask, i) {
                return Err(Error::InvalidSemilattice(format!(
                    "representatives {j} and {i} agree modulo 2Λ"
                )));
            }
            masks.push(mask);
            coords.push(c);
        }
        // the representatives must generate Λ
        let span = IntMatrix::from_columns(dim, &coords)?;
        let f = snf(&span);
        if f.rank() != dim || f.diagonal().iter().take(dim).any(|&d| d != 1) {
            return Err(Error::InvalidSemilattice(
                "representatives do not generate the lattice".into(),
            ));
        }
        Ok(Semilattice { lattice, reps, masks, lookup })
    }

    /// The lattice itself, viewed as a semilattice with all `2^ν` cosets.
    pub fn full(lattice: IntLattice) -> Self {
        let dim = lattice.dim();
        let reps = (0..1u64 << dim)
            .map(|mask| lattice.from_coords(&mask_vector(mask, dim)))
            .collect();
        Self::new(lattice, reps).expect("all cosets of 2Λ form a semilattice")
    }

    /// The rank-0 semilattice `{0}`.
    pub fn trivial() -> Self {
        Self::full(IntLattice::standard(0))
    }

    pub fn from_data(data: &SemilatticeData) -> Result<Self> {
        let lattice = LatticeData { dim: data.dim, basis: data.lattice_basis.clone() }.to_lattice()?;
        Self::new(lattice, data.reps.iter().cloned().map(IntVector).collect())
    }

    pub fn to_data(&self) -> SemilatticeData {
        SemilatticeData {
            dim: self.dim(),
            lattice_basis: self.lattice.basis.to_rows(),
            reps: self.reps.iter().map(|r| r.0.clone()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn lattice(&self) -> &IntLattice {
        &self.lattice
    }

    pub fn reps(&self) -> &[IntVector] {
        &self.reps
    }

    /// Parity masks of the representatives, in rep order.
    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    /// Number of non-trivial cosets of `2Λ` in `S`.
    pub fn index(&self) -> usize {
        self.reps.len() - 1
    }

    pub fn coset_count(&self) -> usize {
        self.reps.len()
    }

    pub fn is_lattice(&self) -> bool {
        self.coset_count() as u128 == 1u128 << self.dim()
    }

    /// Index of the representative congruent to `v` modulo `2Λ`.
    pub fn coset_class(&self, v: &[i64]) -> Result<Option<usize>> {
        let c = self.lattice.coords(v).ok_or_else(|| Error::NotInLattice(v.to_vec()))?;
        Ok(self.class_of_mask(parity_mask(&c)))
    }

    pub fn class_of_mask(&self, mask: u64) -> Option<usize> {
        self.lookup.get(&mask).copied()
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        matches!(self.coset_class(v), Ok(Some(_)))
    }

    /// Rep-level check of `S ± 2S ⊆ S`.
    pub fn closure_holds(&self) -> bool {
        self.reps.iter().all(|a| {
            self.reps
                .iter()
                .all(|b| self.contains(&a.add_scaled(2, b)) && self.contains(&a.add_scaled(-2, b)))
        })
    }

    /// `S1 ⊕ S2` in the concatenated coordinates.
    pub fn direct_sum(&self, other: &Semilattice) -> Semilattice {
        let lattice = self.lattice.direct_sum(&other.lattice);
        let mut reps = Vec::with_capacity(self.reps.len() * other.reps.len());
        for a in &self.reps {
            for b in &other.reps {
                let mut v = a.0.clone();
                v.extend_from_slice(b);
                reps.push(IntVector(v));
            }
        }
        Semilattice::new(lattice, reps).expect("direct sum of semilattices is a semilattice")
    }
}

/// A union of cosets of `2Λ`, identified by parity masks in the basis of `Λ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetSet {
    lattice: IntLattice,
    classes: BTreeSet<u64>,
}

impl CosetSet {
    pub fn lattice(&self) -> &IntLattice {
        &self.lattice
    }

    pub fn classes(&self) -> &BTreeSet<u64> {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn contains_mask(&self, mask: u64) -> bool {
        self.classes.contains(&mask)
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.lattice.coords(v).is_some_and(|c| self.contains_mask(parity_mask(&c)))
    }
}

/// Coset classes of `S + S'` for two semilattices over the same lattice.
pub fn sum_semilattices(a: &Semilattice, b: &Semilattice) -> Result<CosetSet> {
    if a.lattice != b.lattice {
        return Err(Error::AmbientMismatch);
    }
    let b_masks: Vec<u64> = b
        .reps
        .iter()
        .map(|r| parity_mask(&a.lattice.coords(r).expect("equal lattices")))
        .collect();
    let classes = a.masks.iter().flat_map(|x| b_masks.iter().map(move |y| x ^ y)).collect();
    Ok(CosetSet { lattice: a.lattice.clone(), classes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        IntMatrix::from_rows(cols, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn check_snf(a: &IntMatrix) -> Snf {
        let f = snf(a);
        assert_eq!(f.u.mul(a).unwrap().mul(&f.v).unwrap(), f.d);
        assert_eq!(f.u.determinant().unwrap().abs(), 1);
        assert_eq!(f.v.determinant().unwrap().abs(), 1);
        let d = f.diagonal();
        for w in d.windows(2) {
            if w[1] != 0 {
                assert_eq!(w[1] % w[0], 0, "divisibility chain broken in {d:?}");
            }
        }
        for i in 0..f.d.rows() {
            for j in 0..f.d.cols() {
                if i != j {
                    assert_eq!(f.d[(i, j)], 0);
                }
            }
        }
        f
    }

    #[test]
    fn snf_examples() {
        assert_eq!(check_snf(&m(&[&[2, 0], &[0, 2]])).diagonal(), vec![2, 2]);
        // hand elimination: gcd of entries is 1, determinant 4
        assert_eq!(check_snf(&m(&[&[2, 1], &[0, 2]])).diagonal(), vec![1, 4]);
        assert_eq!(check_snf(&m(&[&[0]])).diagonal(), vec![0]);
        // minors gcd 4, entries gcd 2
        assert_eq!(check_snf(&m(&[&[6, 4], &[4, 6], &[2, 2]])).diagonal(), vec![2, 2]);
        check_snf(&IntMatrix::zeros(0, 3));
    }

    #[test]
    fn solve_mod_examples() {
        let id = IntMatrix::identity(3);
        assert_eq!(
            solve_mod(&id, &[4, -1, 2], 5).unwrap(),
            ModSolution::Sat(IntVector(vec![4, 4, 2]))
        );
        assert_eq!(
            solve_mod(&m(&[&[2]]), &[1], 2).unwrap(),
            ModSolution::Unsat(IntVector(vec![1]))
        );
        assert!(matches!(solve_mod(&id, &[1, 2], 5), Err(Error::Dimension(_))));
        assert_eq!(solve_mod(&id, &[1, 2, 3], 0), Err(Error::ZeroModulus));
        // everything is solvable modulo 1
        assert!(matches!(solve_mod(&m(&[&[2]]), &[1], 1).unwrap(), ModSolution::Sat(_)));
    }

    #[test]
    fn solve_mod_certificate_is_valid() {
        // x + y ≡ 1, x - y ≡ 0, 2x ≡ 0 (mod 4): adding the first two gives 2x ≡ 1
        let a = m(&[&[1, 1], &[1, -1], &[2, 0]]);
        let b = [1, 0, 0];
        match solve_mod(&a, &b, 4).unwrap() {
            ModSolution::Unsat(r) => {
                for j in 0..2 {
                    let s: i64 = (0..3).map(|i| r[i] * a[(i, j)]).sum();
                    assert_eq!(s.rem_euclid(4), 0);
                }
                let rb: i64 = (0..3).map(|i| r[i] * b[i]).sum();
                assert_ne!(rb.rem_euclid(4), 0);
            }
            other => panic!("expected UNSAT, got {other:?}"),
        }
    }

    #[test]
    fn solve_integer_handles_non_square() {
        let a = m(&[&[1, 0], &[0, 2], &[1, 2]]);
        assert_eq!(solve_integer(&a, &[3, 4, 7]).unwrap(), Some(IntVector(vec![3, 2])));
        assert_eq!(solve_integer(&a, &[3, 3, 6]).unwrap(), None);
    }

    #[test]
    fn determinant_matches_hand_values() {
        assert_eq!(m(&[&[2, 1], &[0, 2]]).determinant().unwrap(), 4);
        assert_eq!(m(&[&[0, 1], &[1, 0]]).determinant().unwrap(), -1);
        assert_eq!(m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]).determinant().unwrap(), -3);
    }

    fn z2_reps(reps: &[[i64; 2]]) -> Semilattice {
        Semilattice::new(
            IntLattice::standard(2),
            reps.iter().map(|r| IntVector(r.to_vec())).collect(),
        )
        .unwrap()
    }

    #[test]
    fn index_counts() {
        let z = Semilattice::full(IntLattice::standard(1));
        assert_eq!((z.index(), z.coset_count()), (1, 2));
        let full = Semilattice::full(IntLattice::standard(2));
        assert_eq!(full.index(), 3);
        let three = z2_reps(&[[0, 0], [1, 0], [0, 1]]);
        assert_eq!(three.index(), 2);
        assert!(!three.is_lattice());
        assert!(full.is_lattice());
    }

    #[test]
    fn coset_class_examples() {
        let s = z2_reps(&[[0, 0], [1, 0], [0, 1]]);
        assert_eq!(s.coset_class(&[0, 0]).unwrap(), Some(0));
        // τ1 + 2τ2
        assert_eq!(s.coset_class(&[1, 2]).unwrap(), Some(1));
        // τ1 + τ2 is not in S
        assert_eq!(s.coset_class(&[1, 1]).unwrap(), None);
        assert!(s.contains(&[3, -4]));
        assert!(!s.contains(&[3, -3]));
    }

    #[test]
    fn outside_lattice() {
        let lat = IntLattice::new(m(&[&[2, 0], &[0, 1]])).unwrap();
        let s = Semilattice::full(lat);
        assert!(matches!(s.coset_class(&[1, 0]), Err(Error::NotInLattice(_))));
        assert!(!s.contains(&[1, 0]));
        assert!(s.contains(&[2, 0]));
        // (2,0) is a basis vector of Λ, so it is odd in Λ-coordinates
        assert_eq!(s.coset_class(&[2, 0]).unwrap(), Some(1));
    }

    #[test]
    fn invalid_semilattices_rejected() {
        let lat = IntLattice::standard(2);
        let bad_zero = Semilattice::new(lat.clone(), vec![IntVector(vec![1, 0])]);
        assert!(matches!(bad_zero, Err(Error::InvalidSemilattice(_))));
        let dup = Semilattice::new(
            lat.clone(),
            vec![IntVector(vec![0, 0]), IntVector(vec![1, 0]), IntVector(vec![3, 2]), IntVector(vec![0, 1])],
        );
        assert!(matches!(dup, Err(Error::InvalidSemilattice(_))));
        let not_spanning = Semilattice::new(lat, vec![IntVector(vec![0, 0]), IntVector(vec![1, 0])]);
        assert!(matches!(not_spanning, Err(Error::InvalidSemilattice(_))));
    }

    #[test]
    fn sums_of_semilattices() {
        let z = Semilattice::full(IntLattice::standard(1));
        assert_eq!(sum_semilattices(&z, &z).unwrap().len(), 2);
        let s = z2_reps(&[[0, 0], [1, 0], [0, 1]]);
        let ss = sum_semilattices(&s, &s).unwrap();
        assert_eq!(ss.len(), 4);
        assert!(ss.contains(&[1, 1]));
        let z2 = Semilattice::full(IntLattice::standard(2));
        let sub = Semilattice::full(IntLattice::new(m(&[&[2, 0], &[0, 1]])).unwrap());
        assert_eq!(sum_semilattices(&z2, &sub), Err(Error::AmbientMismatch));
    }

    #[test]
    fn sublattice_index_counts_quotient() {
        let lat = IntLattice::standard(2);
        let sub = IntLattice::new(m(&[&[2, 0], &[0, 1]])).unwrap();
        assert_eq!(lat.sublattice_index(&sub), Some(2));
        assert_eq!(sub.sublattice_index(&lat), None);
    }
}
