//! Arithmetic in the tower GF(2) ⊂ GF(q) ⊂ GF(q²), q = 2^m.
//!
//! Elements are stored as little-endian coefficient bitstrings in the
//! polynomial basis of the Conway polynomial of the field's degree. The
//! integer value of that bitstring is the canonical serialization used in
//! every JSON output.
//!
//! Arithmetic goes through a [`FieldSpec`], a cheap-to-clone handle on the
//! modulus and its log/antilog tables. Raw `u16` values are used on the hot
//! paths; [`FieldElem`] tags a value with its degree for the tower-level
//! operations that must reject elements from the wrong level.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Conway polynomials over GF(2), as coefficient bitstrings (bit i = x^i).
pub const CONWAY_POLYNOMIALS: [(u32, u32); 6] = [
    (2, 0b111),
    (3, 0b1011),
    (4, 0b1_0011),
    (6, 0b101_1011),
    (8, 0b1_0001_1101),
    (16, 0b1_0000_0000_0010_1101),
];

pub fn conway_polynomial(degree: u32) -> Option<u32> {
    CONWAY_POLYNOMIALS
        .iter()
        .find(|(d, _)| *d == degree)
        .map(|&(_, p)| p)
}

/// Degree of a GF(2) polynomial given as a bitstring; `None` for zero.
pub(crate) fn poly_degree(p: u64) -> Option<u32> {
    (p != 0).then(|| 63 - p.leading_zeros())
}

/// Remainder of `a` modulo `b` over GF(2).
pub(crate) fn poly_rem(mut a: u64, b: u64) -> u64 {
    let db = poly_degree(b).expect("division by the zero polynomial");
    while let Some(da) = poly_degree(a) {
        if da < db {
            break;
        }
        a ^= b << (da - db);
    }
    a
}

/// Irreducibility over GF(2) by trial division against every polynomial of
/// degree at most half the input's.
pub fn is_irreducible_gf2(p: u64) -> bool {
    let Some(d) = poly_degree(p) else {
        return false;
    };
    if d == 0 {
        return false;
    }
    for k in 1..=d / 2 {
        for low in 0..(1u64 << k) {
            if poly_rem(p, (1u64 << k) | low) == 0 {
                return false;
            }
        }
    }
    true
}

/// An element tagged with the degree of the field it lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElem {
    pub value: u16,
    pub degree: u8,
}

impl FieldElem {
    pub fn degree(self) -> u32 {
        u32::from(self.degree)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

struct Tables {
    degree: u32,
    modulus: u32,
    /// exp[i] = x^i for 0 <= i < 2(order - 1), doubled to skip a reduction.
    exp: Vec<u16>,
    /// log[a] for a != 0; log[0] is unused.
    log: Vec<u32>,
}

/// GF(2^degree) presented by an irreducible, primitive modulus.
#[derive(Clone)]
pub struct FieldSpec {
    tables: Arc<Tables>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}) mod {:#x}", self.degree(), self.modulus())
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.degree() == other.degree() && self.modulus() == other.modulus()
    }
}

impl Eq for FieldSpec {}

impl FieldSpec {
    /// The Conway field of the given degree.
    pub fn conway(degree: u32) -> Result<Self> {
        let modulus = conway_polynomial(degree).ok_or(Error::InvalidModulus {
            degree,
            modulus: 0,
            reason: "no Conway polynomial shipped for this degree",
        })?;
        Self::new(degree, modulus)
    }

    pub fn new(degree: u32, modulus: u32) -> Result<Self> {
        let bad = |reason| Error::InvalidModulus {
            degree,
            modulus: u64::from(modulus),
            reason,
        };
        if degree == 0 || degree > 16 {
            return Err(bad("degree must lie in 1..=16"));
        }
        if poly_degree(u64::from(modulus)) != Some(degree) {
            return Err(bad("modulus has the wrong degree"));
        }
        if !is_irreducible_gf2(u64::from(modulus)) {
            return Err(bad("modulus is reducible"));
        }
        let order = 1usize << degree;
        let cyclic = order - 1;
        let mut exp = vec![0u16; 2 * cyclic];
        let mut log = vec![0u32; order];
        let mut seen = vec![false; order];
        let mut acc: u32 = 1;
        for (i, slot) in exp.iter_mut().enumerate().take(cyclic) {
            if seen[acc as usize] {
                return Err(bad("x is not a primitive element modulo the modulus"));
            }
            seen[acc as usize] = true;
            *slot = acc as u16;
            log[acc as usize] = i as u32;
            acc <<= 1;
            if acc & (1 << degree) != 0 {
                acc ^= modulus;
            }
        }
        if acc != 1 {
            return Err(bad("x is not a primitive element modulo the modulus"));
        }
        for i in cyclic..2 * cyclic {
            exp[i] = exp[i - cyclic];
        }
        Ok(Self {
            tables: Arc::new(Tables {
                degree,
                modulus,
                exp,
                log,
            }),
        })
    }

    pub fn degree(&self) -> u32 {
        self.tables.degree
    }

    pub fn modulus(&self) -> u32 {
        self.tables.modulus
    }

    /// Number of elements, 2^degree.
    pub fn order(&self) -> u32 {
        1 << self.tables.degree
    }

    pub fn elem(&self, value: u16) -> Result<FieldElem> {
        if u32::from(value) >= self.order() {
            return Err(Error::Domain(format!(
                "{value} is not an element of GF(2^{})",
                self.degree()
            )));
        }
        Ok(FieldElem {
            value,
            degree: self.degree() as u8,
        })
    }

    /// Validates that `x` belongs to this field and returns its raw value.
    pub fn check(&self, x: FieldElem) -> Result<u16> {
        if x.degree() != self.degree() {
            return Err(Error::LevelMismatch {
                expected: self.degree(),
                found: x.degree(),
            });
        }
        Ok(x.value)
    }

    pub fn elements(&self) -> impl Iterator<Item = u16> {
        (0..self.order()).map(|v| v as u16)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = u16> {
        (1..self.order()).map(|v| v as u16)
    }

    /// The class of x, which generates the multiplicative group.
    pub fn generator(&self) -> u16 {
        if self.degree() == 1 {
            1
        } else {
            2
        }
    }

    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        let t = &self.tables;
        t.exp[(t.log[a as usize] + t.log[b as usize]) as usize]
    }

    pub fn pow(&self, a: u16, mut e: u64) -> u16 {
        let mut base = a;
        let mut acc = 1u16;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse as a^(2^degree - 2).
    ///
    /// # Panics
    /// On zero.
    pub fn inv(&self, a: u16) -> u16 {
        assert!(a != 0, "zero has no inverse");
        self.pow(a, u64::from(self.order()) - 2)
    }

    /// x^(2^i).
    pub fn frobenius_power(&self, x: u16, i: u32) -> u16 {
        let mut y = x;
        for _ in 0..i % self.degree() {
            y = self.mul(y, y);
        }
        y
    }

    /// Least k >= 1 with x^k = 1.
    pub fn mult_order(&self, x: u16) -> Result<u64> {
        if x == 0 {
            return Err(Error::Domain("zero has no multiplicative order".into()));
        }
        let n = u64::from(self.order()) - 1;
        let mut divisors: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
        divisors.sort_unstable();
        Ok(divisors
            .into_iter()
            .find(|&d| self.pow(x, d) == 1)
            .expect("x^(order-1) = 1"))
    }

    pub fn is_primitive(&self, x: u16) -> bool {
        x != 0 && self.mult_order(x).ok() == Some(u64::from(self.order()) - 1)
    }

    /// Evaluates a GF(2) polynomial (bitstring) at x.
    pub fn eval_gf2_poly(&self, poly: u64, x: u16) -> u16 {
        let Some(d) = poly_degree(poly) else {
            return 0;
        };
        (0..=d).rev().fold(0u16, |acc, i| {
            let acc = self.mul(acc, x);
            if poly >> i & 1 == 1 {
                acc ^ 1
            } else {
                acc
            }
        })
    }
}

/// The pair GF(q) ⊂ GF(q²) with a fixed embedding of the smaller field.
#[derive(Clone, Debug)]
pub struct Tower {
    q: u32,
    m: u32,
    sub: FieldSpec,
    ext: FieldSpec,
    root: u16,
    embed: Arc<Vec<u16>>,
    restrict: Arc<Vec<Option<u16>>>,
}

impl Tower {
    /// Builds the tower for q = 2^m, locating the image of x ∈ GF(q) as the
    /// smallest root in GF(q²) of the degree-m Conway polynomial.
    pub fn new(q: u32) -> Result<Self> {
        if q < 4 || !q.is_power_of_two() {
            return Err(Error::UnsupportedQ(u64::from(q)));
        }
        let m = q.trailing_zeros();
        let sub = FieldSpec::conway(m).map_err(|_| Error::UnsupportedQ(u64::from(q)))?;
        let ext = FieldSpec::conway(2 * m).map_err(|_| Error::UnsupportedQ(u64::from(q)))?;
        let sub_mod = u64::from(sub.modulus());
        let root = ext
            .nonzero()
            .find(|&x| ext.eval_gf2_poly(sub_mod, x) == 0)
            .ok_or_else(|| Error::Construction("subfield modulus has no root".into()))?;

        let powers: Vec<u16> = (0..m).map(|i| ext.pow(root, u64::from(i))).collect();
        let embed: Vec<u16> = sub
            .elements()
            .map(|a| {
                (0..m)
                    .filter(|&i| a >> i & 1 == 1)
                    .fold(0u16, |acc, i| acc ^ powers[i as usize])
            })
            .collect();
        let mut restrict = vec![None; ext.order() as usize];
        for (a, &img) in embed.iter().enumerate() {
            if restrict[img as usize].is_some() {
                return Err(Error::Construction(
                    "subfield embedding is not injective".into(),
                ));
            }
            restrict[img as usize] = Some(a as u16);
        }
        Ok(Self {
            q,
            m,
            sub,
            ext,
            root,
            embed: Arc::new(embed),
            restrict: Arc::new(restrict),
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// GF(q).
    pub fn sub(&self) -> &FieldSpec {
        &self.sub
    }

    /// GF(q²).
    pub fn ext(&self) -> &FieldSpec {
        &self.ext
    }

    /// Image of x ∈ GF(q) inside GF(q²).
    pub fn root(&self) -> u16 {
        self.root
    }

    #[inline]
    pub fn embed_raw(&self, a: u16) -> u16 {
        self.embed[a as usize]
    }

    pub fn embed(&self, x: FieldElem) -> Result<FieldElem> {
        let a = self.sub.check(x)?;
        self.ext.elem(self.embed_raw(a))
    }

    /// Preimage in GF(q) of an element of GF(q²), if it lies in the subfield.
    #[inline]
    pub fn restrict_raw(&self, x: u16) -> Option<u16> {
        self.restrict[x as usize]
    }

    pub fn restrict(&self, x: FieldElem) -> Result<Option<FieldElem>> {
        let a = self.ext.check(x)?;
        Ok(self.restrict_raw(a).map(|v| FieldElem {
            value: v,
            degree: self.m as u8,
        }))
    }

    #[inline]
    pub fn conjugate_raw(&self, x: u16) -> u16 {
        self.ext.frobenius_power(x, self.m)
    }

    /// x ↦ x^q on GF(q²).
    pub fn conjugate(&self, x: FieldElem) -> Result<FieldElem> {
        let a = self.ext.check(x)?;
        self.ext.elem(self.conjugate_raw(a))
    }

    /// Norm x·x̄ = x^(q+1), which lies in the subfield.
    #[inline]
    pub fn norm_raw(&self, x: u16) -> u16 {
        self.ext.mul(x, self.conjugate_raw(x))
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// #{α ∈ GF(q) : α^M = 1}, counted by exhaustion and checked against
/// gcd(M, q-1) and the bound (q-1)/3.
pub fn mu_order(m_exp: u64, q: u32) -> Result<u64> {
    if q < 4 || !q.is_power_of_two() {
        return Err(Error::UnsupportedQ(u64::from(q)));
    }
    let q1 = u64::from(q) - 1;
    if m_exp == 0 || m_exp >= q1 {
        return Err(Error::Precondition(format!(
            "M = {m_exp} must satisfy 1 <= M < q - 1 = {q1}"
        )));
    }
    let field = FieldSpec::conway(q.trailing_zeros())?;
    let count = field
        .nonzero()
        .filter(|&a| field.pow(a, m_exp) == 1)
        .count() as u64;
    if count != gcd(m_exp, q1) {
        return Err(Error::Internal(format!(
            "#mu_{m_exp}(F_{q}) = {count} but gcd = {}",
            gcd(m_exp, q1)
        )));
    }
    if 3 * count > q1 {
        return Err(Error::Internal(format!(
            "#mu_{m_exp}(F_{q}) = {count} exceeds (q-1)/3"
        )));
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conway_moduli_are_irreducible_and_primitive() {
        for &(d, p) in &CONWAY_POLYNOMIALS {
            let f = FieldSpec::new(d, p).unwrap();
            assert_eq!(f.order(), 1 << d);
            assert!(f.is_primitive(f.generator()));
        }
    }

    #[test]
    fn reducible_modulus_is_rejected() {
        // x^4 + x^2 + 1 = (x^2 + x + 1)^2
        assert!(matches!(
            FieldSpec::new(4, 0b10101),
            Err(Error::InvalidModulus { .. })
        ));
        // irreducible but not primitive: x^4 + x^3 + x^2 + x + 1
        assert!(FieldSpec::new(4, 0b11111).is_err());
        assert!(FieldSpec::conway(5).is_err());
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for d in [2, 3, 4, 6, 8] {
            let f = FieldSpec::conway(d).unwrap();
            let c = f.generator();
            for a in f.elements() {
                assert_eq!(f.add(a, a), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1);
                }
                for b in f.elements() {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(f.mul(c, a ^ b), f.mul(c, a) ^ f.mul(c, b));
                }
            }
        }
    }

    #[test]
    fn field_axioms_sampled_gf65536() {
        use rand::{Rng, SeedableRng};
        let f = FieldSpec::conway(16).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20_000 {
            let (a, b, c): (u16, u16, u16) = (rng.gen(), rng.gen(), rng.gen());
            assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            assert_eq!(f.mul(a, b ^ c), f.mul(a, b) ^ f.mul(a, c));
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a)), 1);
            }
        }
    }

    /// Schoolbook carry-less multiplication and reduction, independent of
    /// the log tables.
    fn clmul_mod(a: u16, b: u16, modulus: u32) -> u16 {
        let mut acc: u64 = 0;
        for i in 0..16 {
            if b >> i & 1 == 1 {
                acc ^= u64::from(a) << i;
            }
        }
        poly_rem(acc, u64::from(modulus)) as u16
    }

    #[test]
    fn table_multiplication_matches_schoolbook() {
        for d in [2, 3, 4, 6, 8] {
            let f = FieldSpec::conway(d).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.mul(a, b), clmul_mod(a, b, f.modulus()));
                }
            }
        }
    }

    #[test]
    fn conjugate_on_gf16() {
        let t = Tower::new(4).unwrap();
        let ext = t.ext();
        let g = ext.generator();
        assert!(ext.is_primitive(g));
        // direct exponentiation by repeated multiplication
        let g4 = (0..4).fold(1u16, |acc, _| ext.mul(acc, g));
        assert_eq!(t.conjugate_raw(g), g4);
        assert_eq!(t.conjugate_raw(t.conjugate_raw(g)), g);
        assert_eq!(t.conjugate_raw(0), 0);
        assert_eq!(t.conjugate_raw(1), 1);
    }

    #[test]
    fn conjugate_rejects_subfield_level() {
        let t = Tower::new(8).unwrap();
        let x = t.sub().elem(3).unwrap();
        assert!(matches!(t.conjugate(x), Err(Error::LevelMismatch { .. })));
        let y = t.embed(x).unwrap();
        assert_eq!(t.conjugate(y).unwrap(), y);
    }

    #[test]
    fn conjugation_fixed_field_is_the_embedded_subfield() {
        for q in [4u32, 8, 16] {
            let t = Tower::new(q).unwrap();
            let fixed: Vec<u16> = t
                .ext()
                .elements()
                .filter(|&x| t.conjugate_raw(x) == x)
                .collect();
            assert_eq!(fixed.len(), q as usize);
            for x in fixed {
                assert!(t.restrict_raw(x).is_some());
            }
        }
    }

    #[test]
    fn conjugation_is_an_automorphism() {
        for q in [4u32, 8, 16] {
            let t = Tower::new(q).unwrap();
            let e = t.ext();
            if e.order() <= 256 {
                for a in e.elements() {
                    for b in e.elements() {
                        let (ca, cb) = (t.conjugate_raw(a), t.conjugate_raw(b));
                        assert_eq!(t.conjugate_raw(a ^ b), ca ^ cb);
                        assert_eq!(t.conjugate_raw(e.mul(a, b)), e.mul(ca, cb));
                    }
                }
            }
        }
        use rand::{Rng, SeedableRng};
        let t = Tower::new(256).unwrap();
        let e = t.ext();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100_000 {
            let (a, b): (u16, u16) = (rng.gen(), rng.gen());
            let (ca, cb) = (t.conjugate_raw(a), t.conjugate_raw(b));
            assert_eq!(t.conjugate_raw(a ^ b), ca ^ cb);
            assert_eq!(t.conjugate_raw(e.mul(a, b)), e.mul(ca, cb));
        }
    }

    #[test]
    fn embedding_is_a_ring_homomorphism() {
        for q in [4u32, 8, 16] {
            let t = Tower::new(q).unwrap();
            let (s, e) = (t.sub(), t.ext());
            assert_eq!(t.embed_raw(1), 1);
            for a in s.elements() {
                for b in s.elements() {
                    assert_eq!(t.embed_raw(a ^ b), t.embed_raw(a) ^ t.embed_raw(b));
                    assert_eq!(
                        t.embed_raw(s.mul(a, b)),
                        e.mul(t.embed_raw(a), t.embed_raw(b))
                    );
                }
            }
        }
    }

    #[test]
    fn embedding_root_is_smallest() {
        let t = Tower::new(8).unwrap();
        let p = u64::from(t.sub().modulus());
        let roots: Vec<u16> = t
            .ext()
            .elements()
            .filter(|&x| t.ext().eval_gf2_poly(p, x) == 0)
            .collect();
        assert_eq!(roots.len(), 3);
        assert_eq!(t.root(), roots[0]);
    }

    #[test]
    fn frobenius_examples() {
        let t = Tower::new(8).unwrap();
        let s = t.sub();
        for x in s.nonzero() {
            assert_eq!(s.frobenius_power(x, 0), x);
            assert_eq!(s.frobenius_power(x, 3), x);
        }
        let e = t.ext();
        for x in e.nonzero() {
            for y in e.nonzero() {
                assert_eq!(
                    e.mul(e.frobenius_power(x, 1), e.frobenius_power(y, 1)),
                    e.frobenius_power(e.mul(x, y), 1)
                );
                assert_eq!(
                    e.frobenius_power(x ^ y, 2),
                    e.frobenius_power(x, 2) ^ e.frobenius_power(y, 2)
                );
            }
        }
        // frobenius of degree m fixes the embedded subfield
        for a in s.elements() {
            let x = t.embed_raw(a);
            assert_eq!(e.frobenius_power(x, 3), x);
        }
    }

    #[test]
    fn multiplicative_orders() {
        let f8 = FieldSpec::conway(3).unwrap();
        assert_eq!(f8.mult_order(1).unwrap(), 1);
        assert!(f8.mult_order(0).is_err());
        for x in 2..8u16 {
            assert_eq!(f8.mult_order(x).unwrap(), 7);
            assert!(f8.is_primitive(x));
        }
        let f16 = FieldSpec::conway(4).unwrap();
        // brute-force order by repeated multiplication
        let brute = |x: u16| {
            let mut k = 1;
            let mut y = x;
            while y != 1 {
                y = f16.mul(y, x);
                k += 1;
            }
            k
        };
        let mut primitive = 0;
        for x in f16.nonzero() {
            assert_eq!(f16.mult_order(x).unwrap(), brute(x));
            if brute(x) == 15 {
                primitive += 1;
            }
        }
        assert_eq!(primitive, 8);
        assert_eq!(f16.nonzero().filter(|&x| f16.is_primitive(x)).count(), 8);
    }

    #[test]
    fn mu_order_examples() {
        assert_eq!(mu_order(1, 8).unwrap(), 1);
        assert_eq!(mu_order(3, 8).unwrap(), 1);
        let f16 = FieldSpec::conway(4).unwrap();
        let mu5 = f16.nonzero().filter(|&a| f16.pow(a, 5) == 1).count();
        assert_eq!(mu5, 5);
        assert_eq!(mu_order(5, 16).unwrap(), 5);
        assert!(matches!(mu_order(7, 8), Err(Error::Precondition(_))));
        assert!(mu_order(0, 8).is_err());
    }

    #[test]
    fn mu_order_divides_m_and_q_minus_one() {
        for q in [4u32, 8, 16, 256] {
            for m in 1..u64::from(q) - 1 {
                let k = mu_order(m, q).unwrap();
                assert_eq!(m % k, 0);
                assert_eq!((u64::from(q) - 1) % k, 0);
            }
        }
    }

    #[test]
    fn unsupported_towers() {
        assert!(Tower::new(2).is_err());
        assert!(Tower::new(6).is_err());
        assert!(Tower::new(32).is_err());
    }
}
