//! The Hermitian form x₁ȳ₃ + x₂ȳ₂ + x₃ȳ₁ on GF(q²)³ and its unital.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldElem, Tower};

/// A vector of GF(q²)³ as raw element values.
pub type Vec3 = [u16; 3];

pub const SUPPORTED_Q: [u32; 3] = [4, 8, 16];

#[derive(Clone, Debug)]
pub struct HermitianForm {
    tower: Tower,
}

impl HermitianForm {
    pub fn new(tower: Tower) -> Self {
        Self { tower }
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    #[inline]
    pub fn eval_raw(&self, x: &Vec3, y: &Vec3) -> u16 {
        let e = self.tower.ext();
        let c = |a| self.tower.conjugate_raw(a);
        e.mul(x[0], c(y[2])) ^ e.mul(x[1], c(y[1])) ^ e.mul(x[2], c(y[0]))
    }

    pub fn herm(&self, x: &[FieldElem; 3], y: &[FieldElem; 3]) -> Result<FieldElem> {
        let ext = self.tower.ext();
        let mut xr = [0u16; 3];
        let mut yr = [0u16; 3];
        for i in 0..3 {
            xr[i] = ext.check(x[i])?;
            yr[i] = ext.check(y[i])?;
        }
        ext.elem(self.eval_raw(&xr, &yr))
    }

    /// Gram matrix of the standard basis.
    pub fn gram(&self) -> [[u16; 3]; 3] {
        let e = |i: usize| {
            let mut v = [0u16; 3];
            v[i] = 1;
            v
        };
        let mut g = [[0u16; 3]; 3];
        for (i, row) in g.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = self.eval_raw(&e(i), &e(j));
            }
        }
        g
    }
}

/// A point of P²(GF(q²)), stored by its representative scaled so that the
/// first nonzero coordinate is one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjLine {
    rep: Vec3,
}

impl ProjLine {
    pub fn new(tower: &Tower, v: Vec3) -> Result<Self> {
        normalize(tower, v)
            .map(|rep| Self { rep })
            .ok_or_else(|| Error::Domain("the zero vector spans no line".into()))
    }

    pub fn rep(&self) -> &Vec3 {
        &self.rep
    }
}

/// Scales a nonzero vector so its first nonzero coordinate is one.
#[inline]
pub fn normalize(tower: &Tower, v: Vec3) -> Option<Vec3> {
    let e = tower.ext();
    let lead = *v.iter().find(|&&x| x != 0)?;
    if lead == 1 {
        return Some(v);
    }
    let inv = e.inv(lead);
    Some([e.mul(v[0], inv), e.mul(v[1], inv), e.mul(v[2], inv)])
}

pub fn is_isotropic(form: &HermitianForm, line: &ProjLine) -> bool {
    form.eval_raw(&line.rep, &line.rep) == 0
}

/// Every point of P²(GF(q²)) in normalized form: (1,a,b), (0,1,a), (0,0,1).
pub fn projective_points(tower: &Tower) -> impl Iterator<Item = ProjLine> + '_ {
    let e = tower.ext();
    let all = move || e.elements();
    let first = all().flat_map(move |a| all().map(move |b| [1, a, b]));
    let second = all().map(|a| [0, 1, a]);
    first
        .chain(second)
        .chain(std::iter::once([0, 0, 1]))
        .map(|rep| ProjLine { rep })
}

/// The isotropic points of P²(GF(q²)), ordered by their normalized
/// representatives.
#[derive(Clone, Debug)]
pub struct Unital {
    form: HermitianForm,
    points: Vec<ProjLine>,
    index: HashMap<Vec3, usize>,
}

#[derive(Debug, Serialize)]
pub struct UnitalJson {
    pub q: u32,
    pub n: usize,
    pub points: Vec<Vec3>,
}

impl Unital {
    pub fn q(&self) -> u32 {
        self.form.tower().q()
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn tower(&self) -> &Tower {
        self.form.tower()
    }

    pub fn form(&self) -> &HermitianForm {
        &self.form
    }

    pub fn points(&self) -> &[ProjLine] {
        &self.points
    }

    /// Index of the point spanned by a nonzero vector, if isotropic.
    pub fn index_of(&self, v: Vec3) -> Option<usize> {
        let rep = normalize(self.tower(), v)?;
        self.index.get(&rep).copied()
    }

    pub fn to_json(&self) -> UnitalJson {
        UnitalJson {
            q: self.q(),
            n: self.n(),
            points: self.points.iter().map(|p| p.rep).collect(),
        }
    }
}

pub fn enumerate_unital(q: u32) -> Result<Unital> {
    if !SUPPORTED_Q.contains(&q) {
        return Err(Error::UnsupportedQ(u64::from(q)));
    }
    let tower = Tower::new(q)?;
    let form = HermitianForm::new(tower.clone());
    let mut points: Vec<ProjLine> = projective_points(&tower)
        .filter(|l| is_isotropic(&form, l))
        .collect();
    points.sort_unstable();
    let expected = (q as usize).pow(3) + 1;
    if points.len() != expected {
        return Err(Error::Internal(format!(
            "found {} isotropic points, expected q^3 + 1 = {expected}",
            points.len()
        )));
    }
    let index = points.iter().enumerate().map(|(i, p)| (p.rep, i)).collect();
    Ok(Unital {
        form,
        points,
        index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn form(q: u32) -> HermitianForm {
        HermitianForm::new(Tower::new(q).unwrap())
    }

    #[test]
    fn basis_values() {
        let h = form(4);
        assert_eq!(h.eval_raw(&[1, 0, 0], &[1, 0, 0]), 0);
        assert_eq!(h.eval_raw(&[0, 1, 0], &[0, 1, 0]), 1);
        assert_eq!(h.eval_raw(&[1, 0, 0], &[0, 0, 1]), 1);
    }

    #[test]
    fn typed_herm_rejects_subfield_elements() {
        let h = form(8);
        let t = h.tower().clone();
        let one = t.ext().elem(1).unwrap();
        let zero = t.ext().elem(0).unwrap();
        let sub_one = t.sub().elem(1).unwrap();
        assert_eq!(h.herm(&[one, zero, zero], &[zero, zero, one]).unwrap(), one);
        assert!(matches!(
            h.herm(&[sub_one, zero, zero], &[zero, zero, one]),
            Err(Error::LevelMismatch { .. })
        ));
    }

    #[test]
    fn gram_matrix_is_antidiagonal_and_invertible() {
        let g = form(8).gram();
        assert_eq!(g, [[0, 0, 1], [0, 1, 0], [1, 0, 0]]);
    }

    #[test]
    fn isotropy_of_basis_lines() {
        let h = form(4);
        let t = h.tower().clone();
        assert!(is_isotropic(&h, &ProjLine::new(&t, [1, 0, 0]).unwrap()));
        assert!(!is_isotropic(&h, &ProjLine::new(&t, [0, 1, 0]).unwrap()));
        assert!(ProjLine::new(&t, [0, 0, 0]).is_err());
    }

    #[test]
    fn q4_counts() {
        let t = Tower::new(4).unwrap();
        let h = HermitianForm::new(t.clone());
        let all: Vec<_> = projective_points(&t).collect();
        assert_eq!(all.len(), 16 * 16 + 16 + 1);
        assert_eq!(all.iter().filter(|l| is_isotropic(&h, l)).count(), 65);
    }

    #[test]
    fn unital_sizes_and_order() {
        for (q, n) in [(4, 65), (8, 513), (16, 4097)] {
            let u = enumerate_unital(q).unwrap();
            assert_eq!(u.n(), n);
            assert!(u.points().windows(2).all(|w| w[0] < w[1]));
            for (i, p) in u.points().iter().enumerate() {
                assert_eq!(u.index_of(*p.rep()), Some(i));
            }
        }
        assert!(matches!(enumerate_unital(32), Err(Error::UnsupportedQ(32))));
        assert!(enumerate_unital(2).is_err());
    }

    #[test]
    fn isotropy_is_scale_invariant() {
        let u = enumerate_unital(4).unwrap();
        let e = u.tower().ext().clone();
        for p in u.points() {
            for lambda in e.nonzero() {
                let v = p.rep().map(|x| e.mul(x, lambda));
                assert_eq!(u.form().eval_raw(&v, &v), 0);
                assert_eq!(u.index_of(v), u.index_of(*p.rep()));
            }
        }
    }

    #[test]
    fn conjugate_symmetry_on_unital_pairs() {
        let u = enumerate_unital(4).unwrap();
        let t = u.tower();
        for a in u.points() {
            for b in u.points() {
                let x = u.form().eval_raw(a.rep(), b.rep());
                let y = u.form().eval_raw(b.rep(), a.rep());
                assert_eq!(x, t.conjugate_raw(y));
            }
        }
    }

    #[test]
    fn sesquilinearity_random() {
        for q in [4, 8, 16] {
            let h = form(q);
            let t = h.tower().clone();
            let e = t.ext();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(u64::from(q));
            let top = e.order();
            let mut rv = || -> Vec3 { [0; 3].map(|_| rng.gen_range(0..top) as u16) };
            for _ in 0..500 {
                let (x, y, z) = (rv(), rv(), rv());
                let [a, b, _] = rv();
                let lin: Vec3 = std::array::from_fn(|i| e.mul(a, x[i]) ^ e.mul(b, z[i]));
                assert_eq!(
                    h.eval_raw(&lin, &y),
                    e.mul(a, h.eval_raw(&x, &y)) ^ e.mul(b, h.eval_raw(&z, &y))
                );
                let lin_y: Vec3 = std::array::from_fn(|i| e.mul(a, y[i]));
                assert_eq!(
                    h.eval_raw(&x, &lin_y),
                    e.mul(t.conjugate_raw(a), h.eval_raw(&x, &y))
                );
            }
        }
    }
}
