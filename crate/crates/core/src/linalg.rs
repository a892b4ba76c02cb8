//! Dense linear algebra over small fields of characteristic 2.
//!
//! [`Matrix`] is generic over a [`Field`], which owns the storage format of
//! a row. [`Gf2`] packs 64 entries per word so a row operation is a word-wise
//! XOR; [`FieldSpec`] stores one `u16` per entry and multiplies through its
//! log tables. Vectors are rows and matrices act on the right, v ↦ v·A.

use std::fmt;
use std::hash::Hash;

use crate::field::FieldSpec;

/// A finite field of characteristic 2 together with a row representation.
pub trait Field: Clone + fmt::Debug + PartialEq + Send + Sync {
    type Elem: Copy + Eq + Ord + Hash + fmt::Debug + Send + Sync;
    type Row: Clone + Eq + Hash + fmt::Debug + Send + Sync;

    /// Number of elements.
    fn size(&self) -> u32;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    /// # Panics
    /// On zero.
    fn inv(&self, a: Self::Elem) -> Self::Elem;
    /// Canonical serialization, a bijection onto `0..size()`.
    fn to_u32(&self, a: Self::Elem) -> u32;
    #[allow(clippy::wrong_self_convention)]
    fn from_u32(&self, v: u32) -> Self::Elem;

    fn is_zero(&self, a: Self::Elem) -> bool {
        a == self.zero()
    }

    fn zero_row(&self, len: usize) -> Self::Row;
    fn get(&self, row: &Self::Row, i: usize) -> Self::Elem;
    fn set(&self, row: &mut Self::Row, i: usize, a: Self::Elem);
    /// dst += c·src
    fn axpy(&self, dst: &mut Self::Row, c: Self::Elem, src: &Self::Row);
    fn scale(&self, row: &mut Self::Row, c: Self::Elem);
    /// Index of the first nonzero entry at or after `from`.
    fn first_nonzero(&self, row: &Self::Row, from: usize, len: usize) -> Option<usize>;
    fn row_is_zero(&self, row: &Self::Row) -> bool;
}

/// The prime field GF(2), rows bit-packed 64 entries per word.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Gf2;

impl Field for Gf2 {
    type Elem = u8;
    type Row = Vec<u64>;

    fn size(&self) -> u32 {
        2
    }
    fn zero(&self) -> u8 {
        0
    }
    fn one(&self) -> u8 {
        1
    }
    fn add(&self, a: u8, b: u8) -> u8 {
        a ^ b
    }
    fn mul(&self, a: u8, b: u8) -> u8 {
        a & b
    }
    fn inv(&self, a: u8) -> u8 {
        assert!(a == 1, "zero has no inverse");
        1
    }
    fn to_u32(&self, a: u8) -> u32 {
        u32::from(a)
    }
    fn from_u32(&self, v: u32) -> u8 {
        assert!(v < 2);
        v as u8
    }

    fn zero_row(&self, len: usize) -> Vec<u64> {
        vec![0; len.div_ceil(64)]
    }
    #[inline]
    fn get(&self, row: &Vec<u64>, i: usize) -> u8 {
        (row[i / 64] >> (i % 64) & 1) as u8
    }
    #[inline]
    fn set(&self, row: &mut Vec<u64>, i: usize, a: u8) {
        let bit = 1u64 << (i % 64);
        if a & 1 == 1 {
            row[i / 64] |= bit;
        } else {
            row[i / 64] &= !bit;
        }
    }
    #[inline]
    fn axpy(&self, dst: &mut Vec<u64>, c: u8, src: &Vec<u64>) {
        if c & 1 == 1 {
            for (d, s) in dst.iter_mut().zip(src) {
                *d ^= s;
            }
        }
    }
    fn scale(&self, row: &mut Vec<u64>, c: u8) {
        if c & 1 == 0 {
            row.iter_mut().for_each(|w| *w = 0);
        }
    }
    fn first_nonzero(&self, row: &Vec<u64>, from: usize, len: usize) -> Option<usize> {
        if from >= len {
            return None;
        }
        let mut w = from / 64;
        let mut word = row[w] & (!0u64 << (from % 64));
        loop {
            if word != 0 {
                let i = w * 64 + word.trailing_zeros() as usize;
                return (i < len).then_some(i);
            }
            w += 1;
            if w >= row.len() {
                return None;
            }
            word = row[w];
        }
    }
    fn row_is_zero(&self, row: &Vec<u64>) -> bool {
        row.iter().all(|&w| w == 0)
    }
}

impl Field for FieldSpec {
    type Elem = u16;
    type Row = Vec<u16>;

    fn size(&self) -> u32 {
        self.order()
    }
    fn zero(&self) -> u16 {
        0
    }
    fn one(&self) -> u16 {
        1
    }
    fn add(&self, a: u16, b: u16) -> u16 {
        a ^ b
    }
    fn mul(&self, a: u16, b: u16) -> u16 {
        FieldSpec::mul(self, a, b)
    }
    fn inv(&self, a: u16) -> u16 {
        FieldSpec::inv(self, a)
    }
    fn to_u32(&self, a: u16) -> u32 {
        u32::from(a)
    }
    fn from_u32(&self, v: u32) -> u16 {
        assert!(v < self.order());
        v as u16
    }

    fn zero_row(&self, len: usize) -> Vec<u16> {
        vec![0; len]
    }
    #[inline]
    fn get(&self, row: &Vec<u16>, i: usize) -> u16 {
        row[i]
    }
    #[inline]
    fn set(&self, row: &mut Vec<u16>, i: usize, a: u16) {
        row[i] = a;
    }
    fn axpy(&self, dst: &mut Vec<u16>, c: u16, src: &Vec<u16>) {
        match c {
            0 => {}
            1 => dst.iter_mut().zip(src).for_each(|(d, s)| *d ^= s),
            _ => dst
                .iter_mut()
                .zip(src)
                .for_each(|(d, &s)| *d ^= FieldSpec::mul(self, c, s)),
        }
    }
    fn scale(&self, row: &mut Vec<u16>, c: u16) {
        row.iter_mut()
            .for_each(|x| *x = FieldSpec::mul(self, c, *x));
    }
    fn first_nonzero(&self, row: &Vec<u16>, from: usize, len: usize) -> Option<usize> {
        (from..len).find(|&i| row[i] != 0)
    }
    fn row_is_zero(&self, row: &Vec<u16>) -> bool {
        row.iter().all(|&x| x == 0)
    }
}

/// Row vector of length `len` from canonical serializations.
pub fn row_from_u32<F: Field>(field: &F, values: &[u32]) -> F::Row {
    let mut row = field.zero_row(values.len());
    for (i, &v) in values.iter().enumerate() {
        field.set(&mut row, i, field.from_u32(v));
    }
    row
}

pub fn row_to_u32<F: Field>(field: &F, row: &F::Row, len: usize) -> Vec<u32> {
    (0..len).map(|i| field.to_u32(field.get(row, i))).collect()
}

#[derive(Clone)]
pub struct Matrix<F: Field> {
    field: F,
    nrows: usize,
    ncols: usize,
    rows: Vec<F::Row>,
}

impl<F: Field> PartialEq for Matrix<F> {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.nrows == other.nrows
            && self.ncols == other.ncols
            && self.rows == other.rows
    }
}

impl<F: Field> Eq for Matrix<F> {}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{} over {:?}", self.nrows, self.ncols, self.field)?;
        for r in 0..self.nrows {
            let entries: Vec<String> = (0..self.ncols)
                .map(|c| self.field.to_u32(self.get(r, c)).to_string())
                .collect();
            writeln!(f, "  [{}]", entries.join(" "))?;
        }
        Ok(())
    }
}

impl<F: Field> Matrix<F> {
    pub fn zeros(field: &F, nrows: usize, ncols: usize) -> Self {
        Self {
            rows: vec![field.zero_row(ncols); nrows],
            field: field.clone(),
            nrows,
            ncols,
        }
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_fn(
        field: &F,
        nrows: usize,
        ncols: usize,
        mut f: impl FnMut(usize, usize) -> F::Elem,
    ) -> Self {
        let mut m = Self::zeros(field, nrows, ncols);
        for r in 0..nrows {
            for c in 0..ncols {
                let v = f(r, c);
                m.set(r, c, v);
            }
        }
        m
    }

    pub fn from_rows(field: &F, ncols: usize, rows: Vec<F::Row>) -> Self {
        Self {
            field: field.clone(),
            nrows: rows.len(),
            ncols,
            rows,
        }
    }

    /// Matrix with entries given by canonical serializations.
    pub fn from_u32(field: &F, entries: &[Vec<u32>]) -> Self {
        let ncols = entries.first().map_or(0, Vec::len);
        let rows = entries
            .iter()
            .map(|r| {
                assert_eq!(r.len(), ncols, "ragged matrix");
                row_from_u32(field, r)
            })
            .collect();
        Self::from_rows(field, ncols, rows)
    }

    pub fn to_u32(&self) -> Vec<Vec<u32>> {
        self.rows
            .iter()
            .map(|r| row_to_u32(&self.field, r, self.ncols))
            .collect()
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> F::Elem {
        self.field.get(&self.rows[r], c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, a: F::Elem) {
        self.field.set(&mut self.rows[r], c, a);
    }

    pub fn row(&self, r: usize) -> &F::Row {
        &self.rows[r]
    }

    pub fn rows(&self) -> &[F::Row] {
        &self.rows
    }

    /// v·A for a row vector v of length `nrows`.
    pub fn vec_mul(&self, v: &F::Row) -> F::Row {
        let f = &self.field;
        let mut out = f.zero_row(self.ncols);
        let mut k = f.first_nonzero(v, 0, self.nrows);
        while let Some(i) = k {
            f.axpy(&mut out, f.get(v, i), &self.rows[i]);
            k = f.first_nonzero(v, i + 1, self.nrows);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows, "dimension mismatch in product");
        let rows = self.rows.iter().map(|r| other.vec_mul(r)).collect();
        Self::from_rows(&self.field, other.ncols, rows)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(self.field.one(), other);
        out
    }

    /// self += c·other
    pub fn add_scaled(&mut self, c: F::Elem, other: &Self) {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        for (d, s) in self.rows.iter_mut().zip(&other.rows) {
            self.field.axpy(d, c, s);
        }
    }

    pub fn scaled(&self, c: F::Elem) -> Self {
        let mut out = self.clone();
        for r in &mut out.rows {
            self.field.scale(r, c);
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.field, self.ncols, self.nrows, |r, c| self.get(c, r))
    }

    pub fn trace(&self) -> F::Elem {
        assert!(self.is_square());
        (0..self.nrows).fold(self.field.zero(), |acc, i| {
            self.field.add(acc, self.get(i, i))
        })
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| self.field.row_is_zero(r))
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(&self.field, self.nrows)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Self::identity(&self.field, self.nrows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Applies `f` to every entry.
    pub fn map(&self, mut f: impl FnMut(F::Elem) -> F::Elem) -> Self {
        Self::from_fn(
            &self.field,
            self.nrows,
            self.ncols,
            |r, c| f(self.get(r, c)),
        )
    }

    pub fn kronecker(&self, other: &Self) -> Self {
        let f = &self.field;
        Self::from_fn(
            f,
            self.nrows * other.nrows,
            self.ncols * other.ncols,
            |r, c| {
                f.mul(
                    self.get(r / other.nrows, c / other.ncols),
                    other.get(r % other.nrows, c % other.ncols),
                )
            },
        )
    }

    pub fn rank(&self) -> usize {
        let mut s = Subspace::new(&self.field, self.ncols);
        for r in &self.rows {
            s.insert(r.clone());
        }
        s.dim()
    }

    /// Gauss–Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square());
        let f = &self.field;
        let n = self.nrows;
        let mut a = self.rows.clone();
        let mut b = Self::identity(f, n).rows;
        for col in 0..n {
            let p = (col..n).find(|&r| !f.is_zero(f.get(&a[r], col)))?;
            a.swap(col, p);
            b.swap(col, p);
            let inv = f.inv(f.get(&a[col], col));
            f.scale(&mut a[col], inv);
            f.scale(&mut b[col], inv);
            let (pa, pb) = (a[col].clone(), b[col].clone());
            for r in 0..n {
                if r != col {
                    let c = f.get(&a[r], col);
                    if !f.is_zero(c) {
                        f.axpy(&mut a[r], c, &pa);
                        f.axpy(&mut b[r], c, &pb);
                    }
                }
            }
        }
        Some(Self::from_rows(f, n, b))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.nrows
    }

    /// Basis of {v : v·A = 0}.
    pub fn left_nullspace(&self) -> Vec<F::Row> {
        let f = &self.field;
        let mut pivots: Vec<(usize, F::Row, F::Row)> = Vec::new();
        let mut null = Vec::new();
        for (i, r) in self.rows.iter().enumerate() {
            let mut a = r.clone();
            let mut tag = f.zero_row(self.nrows);
            f.set(&mut tag, i, f.one());
            for (p, pa, pt) in &pivots {
                let c = f.get(&a, *p);
                if !f.is_zero(c) {
                    f.axpy(&mut a, c, pa);
                    f.axpy(&mut tag, c, pt);
                }
            }
            match f.first_nonzero(&a, 0, self.ncols) {
                None => null.push(tag),
                Some(p) => {
                    let inv = f.inv(f.get(&a, p));
                    f.scale(&mut a, inv);
                    f.scale(&mut tag, inv);
                    pivots.push((p, a, tag));
                }
            }
        }
        null
    }

    pub fn nullity(&self) -> usize {
        self.nrows - self.rank()
    }
}

/// A subspace kept as a semi-echelon basis: each basis row has a pivot
/// column, its entry there is one, and later rows vanish at earlier pivots.
#[derive(Clone, Debug)]
pub struct Subspace<F: Field> {
    field: F,
    len: usize,
    basis: Vec<(usize, F::Row)>,
}

impl<F: Field> Subspace<F> {
    pub fn new(field: &F, len: usize) -> Self {
        Self {
            field: field.clone(),
            len,
            basis: Vec::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.len
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.len
    }

    pub fn basis(&self) -> impl Iterator<Item = &F::Row> {
        self.basis.iter().map(|(_, r)| r)
    }

    pub fn reduce(&self, v: &F::Row) -> F::Row {
        let f = &self.field;
        let mut v = v.clone();
        for (p, row) in &self.basis {
            let c = f.get(&v, *p);
            if !f.is_zero(c) {
                f.axpy(&mut v, c, row);
            }
        }
        v
    }

    pub fn contains(&self, v: &F::Row) -> bool {
        self.field.row_is_zero(&self.reduce(v))
    }

    /// Adds `v`; returns whether the dimension grew.
    pub fn insert(&mut self, v: F::Row) -> bool {
        let f = &self.field;
        let mut v = self.reduce(&v);
        match f.first_nonzero(&v, 0, self.len) {
            None => false,
            Some(p) => {
                let inv = f.inv(f.get(&v, p));
                f.scale(&mut v, inv);
                self.basis.push((p, v));
                true
            }
        }
    }

    /// Closure under right multiplication by every generator.
    pub fn spin(&mut self, gens: &[Matrix<F>]) {
        let mut t = 0;
        while t < self.basis.len() && !self.is_full() {
            let v = self.basis[t].1.clone();
            for g in gens {
                self.insert(g.vec_mul(&v));
                if self.is_full() {
                    break;
                }
            }
            t += 1;
        }
    }
}

/// The submodule generated by `seed` under `gens`.
pub fn spin<F: Field>(field: &F, seed: &F::Row, len: usize, gens: &[Matrix<F>]) -> Subspace<F> {
    let mut s = Subspace::new(field, len);
    s.insert(seed.clone());
    s.spin(gens);
    s
}
