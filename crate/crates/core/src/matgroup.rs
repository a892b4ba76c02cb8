//! 3×3 matrices over GF(q²), generators of SU₃(q), and the adjoint module.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldSpec, Tower};
use crate::hermitian::{HermitianForm, Vec3, SUPPORTED_Q};
use crate::linalg::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Mat3(pub [[u16; 3]; 3]);

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3([[1, 0, 0], [0, 1, 0], [0, 0, 1]]);

    /// The antidiagonal permutation matrix swapping e₁ and e₃.
    pub const W: Mat3 = Mat3([[0, 0, 1], [0, 1, 0], [1, 0, 0]]);

    pub fn diag(a: u16, b: u16, c: u16) -> Self {
        Mat3([[a, 0, 0], [0, b, 0], [0, 0, c]])
    }

    pub fn scalar(lambda: u16) -> Self {
        Self::diag(lambda, lambda, lambda)
    }

    pub fn unipotent(a: u16, b: u16, c: u16) -> Self {
        Mat3([[1, a, b], [0, 1, c], [0, 0, 1]])
    }

    pub fn mul(&self, other: &Mat3, f: &FieldSpec) -> Mat3 {
        let mut out = [[0u16; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = (0..3).fold(0, |acc, k| acc ^ f.mul(self.0[i][k], other.0[k][j]));
            }
        }
        Mat3(out)
    }

    /// A·v for a column vector v.
    #[inline]
    pub fn apply(&self, v: &Vec3, f: &FieldSpec) -> Vec3 {
        let r = |i: usize| {
            f.mul(self.0[i][0], v[0]) ^ f.mul(self.0[i][1], v[1]) ^ f.mul(self.0[i][2], v[2])
        };
        [r(0), r(1), r(2)]
    }

    pub fn column(&self, j: usize) -> Vec3 {
        [self.0[0][j], self.0[1][j], self.0[2][j]]
    }

    pub fn trace(&self, f: &FieldSpec) -> u16 {
        f.add(f.add(self.0[0][0], self.0[1][1]), self.0[2][2])
    }

    fn minor(&self, i: usize, j: usize, f: &FieldSpec) -> u16 {
        let rows: Vec<usize> = (0..3).filter(|&r| r != i).collect();
        let cols: Vec<usize> = (0..3).filter(|&c| c != j).collect();
        let a = &self.0;
        f.mul(a[rows[0]][cols[0]], a[rows[1]][cols[1]])
            ^ f.mul(a[rows[0]][cols[1]], a[rows[1]][cols[0]])
    }

    pub fn det(&self, f: &FieldSpec) -> u16 {
        (0..3).fold(0, |acc, j| acc ^ f.mul(self.0[0][j], self.minor(0, j, f)))
    }

    /// Inverse via the adjugate; signs vanish in characteristic 2.
    pub fn inverse(&self, f: &FieldSpec) -> Option<Mat3> {
        let d = self.det(f);
        if d == 0 {
            return None;
        }
        let dinv = f.inv(d);
        let mut out = [[0u16; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = f.mul(self.minor(j, i, f), dinv);
            }
        }
        Some(Mat3(out))
    }

    pub fn map(&self, g: impl Fn(u16) -> u16) -> Mat3 {
        Mat3(self.0.map(|row| row.map(&g)))
    }
}

/// Whether A preserves the Hermitian form on basis pairs and has determinant 1.
pub fn is_special_unitary(form: &HermitianForm, a: &Mat3) -> bool {
    let f = form.tower().ext();
    let gram = form.gram();
    let preserved = gram.iter().enumerate().all(|(i, row)| {
        row.iter()
            .enumerate()
            .all(|(j, &g)| form.eval_raw(&a.column(i), &a.column(j)) == g)
    });
    preserved && a.det(f) == 1
}

/// diag(β, 1, β⁻¹) for β ∈ GF(q)*.
pub fn torus_element(tower: &Tower, beta: FieldElem) -> Result<Mat3> {
    let b = tower.sub().check(beta)?;
    if b == 0 {
        return Err(Error::Domain("torus parameter must be nonzero".into()));
    }
    let e = tower.embed_raw(b);
    Ok(Mat3::diag(e, 1, tower.ext().inv(e)))
}

pub fn claimed_su3_order(q: u32) -> u128 {
    let q = u128::from(q);
    (q.pow(3) + 1) * q.pow(3) * (q * q - 1)
}

#[derive(Clone, Debug)]
pub struct GeneratorSet {
    form: HermitianForm,
    gens: Vec<Mat3>,
    claimed_order: u128,
}

impl GeneratorSet {
    /// Wraps arbitrary matrices; each must be special unitary.
    pub fn new(form: HermitianForm, gens: Vec<Mat3>) -> Result<Self> {
        if let Some(bad) = gens.iter().find(|g| !is_special_unitary(&form, g)) {
            return Err(Error::Construction(format!(
                "generator {:?} is not special unitary",
                bad.0
            )));
        }
        let claimed_order = claimed_su3_order(form.tower().q());
        Ok(Self {
            form,
            gens,
            claimed_order,
        })
    }

    pub fn q(&self) -> u32 {
        self.form.tower().q()
    }

    pub fn form(&self) -> &HermitianForm {
        &self.form
    }

    pub fn tower(&self) -> &Tower {
        self.form.tower()
    }

    pub fn matrices(&self) -> &[Mat3] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// (q³+1)·q³·(q²−1).
    pub fn claimed_order(&self) -> u128 {
        self.claimed_order
    }

    /// Keeps only the generators at the given positions.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            form: self.form.clone(),
            gens: indices.iter().map(|&i| self.gens[i]).collect(),
            claimed_order: self.claimed_order,
        }
    }
}

/// w, the torus element of the smallest primitive β, and every unitary
/// upper unipotent matrix.
///
/// The unipotents are found by brute force over (a, b, c): a pair (a, c) is
/// kept only if the second and third columns are orthogonal, then b is
/// scanned with the full predicate.
pub fn su3_generators(q: u32) -> Result<GeneratorSet> {
    if !SUPPORTED_Q.contains(&q) {
        return Err(Error::UnsupportedQ(u64::from(q)));
    }
    let tower = Tower::new(q)?;
    let form = HermitianForm::new(tower.clone());
    let sub = tower.sub();
    let ext = tower.ext();

    let beta = sub
        .nonzero()
        .find(|&b| sub.is_primitive(b))
        .expect("GF(q)* is cyclic");
    let mut gens = vec![Mat3::W, torus_element(&tower, sub.elem(beta)?)?];

    for a in ext.elements() {
        for c in ext.elements() {
            let col2 = [a, 1, 0];
            let col3 = [0, c, 1];
            if form.eval_raw(&col2, &col3) != 0 {
                continue;
            }
            for b in ext.elements() {
                let u = Mat3::unipotent(a, b, c);
                if is_special_unitary(&form, &u) {
                    gens.push(u);
                }
            }
        }
    }
    let unipotents = gens.len() - 2;
    if unipotents != (q as usize).pow(3) {
        return Err(Error::Construction(format!(
            "found {unipotents} unitary unipotents, expected q^3"
        )));
    }
    GeneratorSet::new(form, gens)
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Scalars λ ∈ GF(q²) with λI ∈ SU₃(q), i.e. λ³ = 1 = λ^(q+1).
pub fn central_scalars(tower: &Tower) -> Vec<u16> {
    let e = tower.ext();
    e.nonzero()
        .filter(|&l| e.pow(l, 3) == 1 && tower.norm_raw(l) == 1)
        .collect()
}

/// gcd(3, q+1), confirmed by counting the central scalars.
pub fn center_order(q: u32) -> Result<u32> {
    if q < 2 || !q.is_power_of_two() {
        return Err(Error::UnsupportedQ(u64::from(q)));
    }
    let expected = gcd(3, q + 1);
    if let Ok(tower) = Tower::new(q) {
        let counted = central_scalars(&tower).len() as u32;
        if counted != expected {
            return Err(Error::Internal(format!(
                "counted {counted} central scalars, gcd(3, q+1) = {expected}"
            )));
        }
    }
    Ok(expected)
}

/// Basis of the traceless 3×3 matrices, as (row, col) supports:
/// E12, E13, E21, E23, E31, E32, E11+E22, E22+E33 (1-based names).
pub const ADJOINT_BASIS: [&[(usize, usize)]; 8] = [
    &[(0, 1)],
    &[(0, 2)],
    &[(1, 0)],
    &[(1, 2)],
    &[(2, 0)],
    &[(2, 1)],
    &[(0, 0), (1, 1)],
    &[(1, 1), (2, 2)],
];

fn adjoint_basis_matrix(k: usize) -> Mat3 {
    let mut m = [[0u16; 3]; 3];
    for &(i, j) in ADJOINT_BASIS[k] {
        m[i][j] = 1;
    }
    Mat3(m)
}

/// Coordinates of a traceless matrix in [`ADJOINT_BASIS`].
fn adjoint_coords(y: &Mat3) -> Result<[u16; 8]> {
    let a = &y.0;
    if a[1][1] != a[0][0] ^ a[2][2] {
        return Err(Error::Internal("matrix is not traceless".into()));
    }
    Ok([
        a[0][1], a[0][2], a[1][0], a[1][2], a[2][0], a[2][1], a[0][0], a[2][2],
    ])
}

/// Matrix of X ↦ AXA⁻¹ on the traceless matrices; column j holds the
/// coordinates of the image of the j-th basis element, so that
/// adj(AB) = adj(A)·adj(B).
pub fn adjoint_matrix(ext: &FieldSpec, a: &Mat3) -> Result<Matrix<FieldSpec>> {
    let inv = a
        .inverse(ext)
        .ok_or_else(|| Error::Domain("singular matrix has no adjoint action".into()))?;
    let mut out = Matrix::zeros(ext, 8, 8);
    for j in 0..8 {
        let image = a.mul(&adjoint_basis_matrix(j), ext).mul(&inv, ext);
        for (i, c) in adjoint_coords(&image)?.into_iter().enumerate() {
            out.set(i, j, c);
        }
    }
    Ok(out)
}

pub fn adjoint_module_matrices(gens: &GeneratorSet) -> Result<Vec<Matrix<FieldSpec>>> {
    let ext = gens.tower().ext();
    gens.matrices()
        .iter()
        .map(|a| adjoint_matrix(ext, a))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceCensus {
    pub q: u32,
    /// Distinct values (β + β⁻¹)², β ∈ GF(q) \ GF(2), as GF(q) serializations.
    pub values: Vec<u16>,
    pub r: usize,
    /// Whether r > (q − 1)/3.
    pub threshold_holds: bool,
}

pub fn trace_census(q: u32) -> Result<TraceCensus> {
    if q < 4 {
        return Err(Error::Precondition(format!("census needs q >= 4, got {q}")));
    }
    let tower = Tower::new(q)?;
    let f = tower.sub();
    let values: BTreeSet<u16> = f
        .elements()
        .filter(|&b| b > 1)
        .map(|b| {
            let s = b ^ f.inv(b);
            f.mul(s, s)
        })
        .collect();
    let r = values.len();
    if r != (q as usize - 2) / 2 {
        return Err(Error::Internal(format!(
            "census has {r} values, expected (q-2)/2"
        )));
    }
    if values.contains(&0) {
        return Err(Error::Internal("census contains zero".into()));
    }
    Ok(TraceCensus {
        q,
        values: values.into_iter().collect(),
        r,
        threshold_holds: 3 * r > q as usize - 1,
    })
}
