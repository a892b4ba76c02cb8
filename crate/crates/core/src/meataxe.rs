//! Modules over small fields of characteristic 2 and MeatAxe tests.
//!
//! A module is a list of action matrices, one per group generator, acting
//! on row vectors from the right. Irreducibility uses Norton's criterion:
//! for a singular algebra element A, every proper submodule meets the null
//! space of A or its annihilator meets the null space of Aᵀ. Candidates are
//! A = p(θ) with θ a random linear combination of generator words and p a
//! small monic irreducible polynomial. When dim null(A) = deg p the null
//! space is a simple F[θ]-module and one vector per side suffices;
//! otherwise every projective point of the null space is spun, provided
//! there are few of them.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64(seed)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::linalg::{row_to_u32, Field, Gf2, Matrix, Subspace};
use crate::matgroup::{adjoint_module_matrices, su3_generators};
use crate::perm::Perm;

/// θ-attempts before giving up.
pub const ATTEMPT_BUDGET: usize = 64;
/// Longest generator word in a random algebra element.
pub const MAX_WORD_LEN: usize = 6;
/// Most summands in a random algebra element.
pub const MAX_SUMMANDS: usize = 6;
/// Largest number of projective points spun exhaustively in a null space.
pub const EXHAUSTIVE_POINT_LIMIT: usize = 255;
/// Cap on the number of small irreducible polynomials tried per θ.
const POLY_LIMIT: usize = 128;

#[derive(Clone, Debug)]
pub struct FpModule<F: Field> {
    field: F,
    dim: usize,
    actions: Vec<Matrix<F>>,
}

impl<F: Field> FpModule<F> {
    pub fn new(field: &F, dim: usize, actions: Vec<Matrix<F>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Precondition(
                "module dimension must be positive".into(),
            ));
        }
        for (i, a) in actions.iter().enumerate() {
            if a.nrows() != dim || a.ncols() != dim {
                return Err(Error::Precondition(format!(
                    "action {i} is {}x{}, expected {dim}x{dim}",
                    a.nrows(),
                    a.ncols()
                )));
            }
            if !a.is_invertible() {
                return Err(Error::Precondition(format!("action {i} is singular")));
            }
        }
        Ok(Self {
            field: field.clone(),
            dim,
            actions,
        })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn actions(&self) -> &[Matrix<F>] {
        &self.actions
    }

    /// The module with transposed action matrices, whose submodules are
    /// the annihilators of submodules of `self`.
    pub fn transposed(&self) -> Self {
        Self {
            field: self.field.clone(),
            dim: self.dim,
            actions: self.actions.iter().map(Matrix::transpose).collect(),
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.actions.len() != other.actions.len() {
            return Err(Error::Precondition(
                "direct summands need the same number of generators".into(),
            ));
        }
        let d = self.dim + other.dim;
        let actions = self
            .actions
            .iter()
            .zip(&other.actions)
            .map(|(a, b)| {
                Matrix::from_fn(&self.field, d, d, |r, c| {
                    match (r < self.dim, c < self.dim) {
                        (true, true) => a.get(r, c),
                        (false, false) => b.get(r - self.dim, c - self.dim),
                        _ => self.field.zero(),
                    }
                })
            })
            .collect();
        Self::new(&self.field, d, actions)
    }

    /// Matrix of a word in the generators (identity for the empty word).
    pub fn word(&self, word: &[usize]) -> Matrix<F> {
        word.iter()
            .fold(Matrix::identity(&self.field, self.dim), |acc, &g| {
                acc.mul(&self.actions[g])
            })
    }

    /// The submodule generated by `v`.
    pub fn spin(&self, v: &F::Row) -> Subspace<F> {
        crate::linalg::spin(&self.field, v, self.dim, &self.actions)
    }
}

/// GF(2)^n with 0/1 permutation matrices: e_b·P = e_{p(b)}.
pub fn perm_module(perms: &[Perm]) -> Result<FpModule<Gf2>> {
    let n = degree_of(perms)?;
    let actions = perms
        .iter()
        .map(|p| {
            let mut m = Matrix::zeros(&Gf2, n, n);
            for b in 0..n {
                m.set(b, p.apply(b), 1);
            }
            m
        })
        .collect();
    FpModule::new(&Gf2, n, actions)
}

fn degree_of(perms: &[Perm]) -> Result<usize> {
    let n = perms
        .first()
        .map(Perm::degree)
        .ok_or_else(|| Error::Precondition("need at least one permutation".into()))?;
    if perms.iter().any(|p| p.degree() != n) {
        return Err(Error::Precondition("permutations of mixed degree".into()));
    }
    if n < 2 {
        return Err(Error::Precondition("degree must be at least 2".into()));
    }
    Ok(n)
}

/// The zero-sum hyperplane of GF(2)^n.
#[derive(Clone, Debug)]
pub struct QbModule {
    pub module: FpModule<Gf2>,
    /// Whether the constant vector spans a complement (n odd).
    pub splits: bool,
}

/// The zero-sum hyperplane in the basis v_b = e_b + e_0, b = 1..n−1, so
/// s·v_b = v_{s(b)} + v_{s(0)} with v_0 = 0.
pub fn qb_module(perms: &[Perm]) -> Result<QbModule> {
    let n = degree_of(perms)?;
    let actions = perms
        .iter()
        .map(|p| {
            let mut m = Matrix::zeros(&Gf2, n - 1, n - 1);
            let s0 = p.apply(0);
            for b in 1..n {
                let mut flip = |x: usize| {
                    if x != 0 {
                        let cur = m.get(b - 1, x - 1);
                        m.set(b - 1, x - 1, cur ^ 1);
                    }
                };
                flip(p.apply(b));
                flip(s0);
            }
            m
        })
        .collect();
    Ok(QbModule {
        module: FpModule::new(&Gf2, n - 1, actions)?,
        splits: n % 2 == 1,
    })
}

/// The 8-dimensional adjoint module of SU₃(q) on traceless matrices, over
/// GF(q²).
pub fn st2_module(q: u32) -> Result<FpModule<FieldSpec>> {
    if !matches!(q, 4 | 8) {
        return Err(Error::UnsupportedQ(u64::from(q)));
    }
    let gens = su3_generators(q)?;
    let actions = adjoint_module_matrices(&gens)?;
    FpModule::new(gens.tower().ext(), 8, actions)
}

/// Σ cᵢ·wordᵢ with coefficients stored by canonical serialization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlgebraElement {
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Term {
    pub coeff: u32,
    pub word: Vec<usize>,
}

impl AlgebraElement {
    pub fn random<F: Field>(field: &F, ngens: usize, rng: &mut impl Rng) -> Self {
        let summands = rng.gen_range(1..=MAX_SUMMANDS as u32);
        let terms = (0..summands)
            .map(|_| {
                let len = if ngens == 0 {
                    0
                } else {
                    rng.gen_range(1..=MAX_WORD_LEN as u32)
                };
                let word = (0..len)
                    .map(|_| rng.gen_range(0..ngens as u32) as usize)
                    .collect();
                let coeff = rng.gen_range(1..field.size());
                Term { coeff, word }
            })
            .collect();
        Self { terms }
    }

    pub fn evaluate<F: Field>(&self, module: &FpModule<F>) -> Matrix<F> {
        let f = module.field();
        let mut acc = Matrix::zeros(f, module.dim(), module.dim());
        for t in &self.terms {
            acc.add_scaled(f.from_u32(t.coeff), &module.word(&t.word));
        }
        acc
    }
}

/// Monic polynomials, coefficients from the constant term up.
type Poly<E> = Vec<E>;

fn poly_rem<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    let mut r: Vec<F::Elem> = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = f.inv(b[db]);
    while r.len() > db {
        let top = *r.last().expect("nonempty");
        if !f.is_zero(top) {
            let c = f.mul(top, lead_inv);
            let shift = r.len() - 1 - db;
            for (i, &bi) in b.iter().enumerate() {
                r[shift + i] = f.add(r[shift + i], f.mul(c, bi));
            }
        }
        r.pop();
    }
    while r.last().is_some_and(|&x| f.is_zero(x)) {
        r.pop();
    }
    r
}

/// Monic irreducible polynomials over `f` in order of degree, then of
/// coefficient serialization; found by trial division. Stops before a
/// degree whose inclusion would exceed `limit` polynomials (degree one is
/// always included).
pub fn small_irreducibles<F: Field>(f: &F, limit: usize) -> Vec<Poly<F::Elem>> {
    let q = f.size() as usize;
    let mut out: Vec<Poly<F::Elem>> = Vec::new();
    let mut degree = 1;
    loop {
        let count = q.checked_pow(degree as u32).unwrap_or(usize::MAX);
        if degree > 1 && (count > 1 << 16 || out.len() >= limit) {
            break;
        }
        let mut found = Vec::new();
        for idx in 0..count {
            let mut p: Poly<F::Elem> = (0..degree)
                .map(|i| f.from_u32(((idx / q.pow(i as u32)) % q) as u32))
                .collect();
            p.push(f.one());
            let reducible = out
                .iter()
                .filter(|d| 2 * (d.len() - 1) <= degree)
                .any(|d| poly_rem(f, &p, d).is_empty());
            if !reducible {
                found.push(p);
            }
        }
        if degree > 1 && out.len() + found.len() > limit {
            break;
        }
        out.extend(found);
        degree += 1;
    }
    out
}

fn eval_poly<F: Field>(f: &F, p: &[F::Elem], powers: &[Matrix<F>]) -> Matrix<F> {
    let dim = powers[0].nrows();
    let mut acc = Matrix::zeros(f, dim, dim);
    for (i, &c) in p.iter().enumerate() {
        acc.add_scaled(c, &powers[i]);
    }
    acc
}

fn poly_to_u32<F: Field>(f: &F, p: &[F::Elem]) -> Vec<u32> {
    p.iter().map(|&c| f.to_u32(c)).collect()
}

fn poly_from_u32<F: Field>(f: &F, p: &[u32]) -> Vec<F::Elem> {
    p.iter().map(|&c| f.from_u32(c)).collect()
}

/// Representatives of the projective points of span(basis): combinations
/// whose first nonzero coefficient is one. `None` if there are more than
/// `limit` of them.
fn projective_points<F: Field>(
    f: &F,
    basis: &[F::Row],
    len: usize,
    limit: usize,
) -> Option<Vec<F::Row>> {
    let q = f.size() as usize;
    let k = basis.len();
    let count = (0..k).try_fold(0usize, |acc, i| acc.checked_add(q.checked_pow(i as u32)?))?;
    if count > limit {
        return None;
    }
    let mut out = Vec::with_capacity(count);
    for lead in 0..k {
        let tail = k - lead - 1;
        for idx in 0..q.pow(tail as u32) {
            let mut v = basis[lead].clone();
            for j in 0..tail {
                let c = f.from_u32(((idx / q.pow(j as u32)) % q) as u32);
                f.axpy(&mut v, c, &basis[lead + 1 + j]);
            }
            out.push(v);
        }
    }
    debug_assert!(out.iter().all(|v| f.first_nonzero(v, 0, len).is_some()));
    Some(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Irreducible,
    Reducible,
    BudgetExhausted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Module,
    Dual,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// `vector` spins to a proper subspace of dimension `spin_dim` on
    /// `side`; the submodule of the module itself has `submodule_dim`.
    Submodule {
        theta: AlgebraElement,
        poly: Vec<u32>,
        side: Side,
        vector: Vec<u32>,
        spin_dim: usize,
        submodule_dim: usize,
    },
    /// Every projective point tested in null(p(θ)) and null(p(θ)ᵀ) spins
    /// to the whole space.
    Norton {
        theta: AlgebraElement,
        poly: Vec<u32>,
        nullity: usize,
        points_checked: usize,
        null_vector: Vec<u32>,
        dual_null_vector: Vec<u32>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IrreducibilityCertificate {
    pub verdict: Verdict,
    pub dim: usize,
    pub seed: u64,
    pub attempts: usize,
    pub witness: Option<Witness>,
}

/// A singular p(θ) with its two null spaces.
struct Candidate<F: Field> {
    theta: AlgebraElement,
    poly: Poly<F::Elem>,
    null: Vec<F::Row>,
    dual_null: Vec<F::Row>,
}

/// Draws θs from the seeded stream and hands every singular p(θ) to
/// `visit` until it returns `Some`. Returns the result and the number of
/// θs drawn.
fn search_candidates<F: Field, T>(
    module: &FpModule<F>,
    seed: u64,
    mut visit: impl FnMut(Candidate<F>) -> Option<T>,
) -> (Option<T>, usize) {
    let f = module.field();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let polys = small_irreducibles(f, POLY_LIMIT);
    let max_degree = polys.last().map_or(1, |p| p.len() - 1);
    for attempt in 1..=ATTEMPT_BUDGET {
        let theta = AlgebraElement::random(f, module.actions().len(), &mut rng);
        let base = theta.evaluate(module);
        let mut powers = vec![Matrix::identity(f, module.dim()), base.clone()];
        for p in &polys {
            let deg = p.len() - 1;
            while powers.len() <= deg.min(max_degree) {
                let next = powers.last().expect("nonempty").mul(&base);
                powers.push(next);
            }
            let a = eval_poly(f, p, &powers);
            let null = a.left_nullspace();
            if null.is_empty() {
                continue;
            }
            let dual_null = a.transpose().left_nullspace();
            let cand = Candidate {
                theta: theta.clone(),
                poly: p.clone(),
                null,
                dual_null,
            };
            if let Some(out) = visit(cand) {
                return (Some(out), attempt);
            }
        }
    }
    (None, ATTEMPT_BUDGET)
}

/// Vectors of a null space that Norton's criterion requires spinning.
fn norton_vectors<F: Field>(f: &F, null: &[F::Row], deg: usize, len: usize) -> Option<Vec<F::Row>> {
    if null.len() == deg {
        Some(vec![null[0].clone()])
    } else {
        projective_points(f, null, len, EXHAUSTIVE_POINT_LIMIT)
    }
}

enum NortonOutcome<F: Field> {
    Proper(Side, F::Row, usize),
    Full { checked: usize },
}

fn norton_test<F: Field>(
    module: &FpModule<F>,
    dual: &FpModule<F>,
    cand: &Candidate<F>,
) -> Option<NortonOutcome<F>> {
    let f = module.field();
    let n = module.dim();
    let deg = cand.poly.len() - 1;
    let vs = norton_vectors(f, &cand.null, deg, n)?;
    let ws = norton_vectors(f, &cand.dual_null, deg, n)?;
    for v in &vs {
        let s = module.spin(v);
        if !s.is_full() {
            return Some(NortonOutcome::Proper(Side::Module, v.clone(), s.dim()));
        }
    }
    for w in &ws {
        let s = dual.spin(w);
        if !s.is_full() {
            return Some(NortonOutcome::Proper(Side::Dual, w.clone(), s.dim()));
        }
    }
    Some(NortonOutcome::Full {
        checked: vs.len() + ws.len(),
    })
}

pub fn is_irreducible<F: Field>(module: &FpModule<F>, seed: u64) -> IrreducibilityCertificate {
    let f = module.field();
    let n = module.dim();
    let dual = module.transposed();
    let (witness, attempts) = search_candidates(module, seed, |cand| {
        let outcome = norton_test(module, &dual, &cand)?;
        let poly = poly_to_u32(f, &cand.poly);
        Some(match outcome {
            NortonOutcome::Proper(side, v, spin_dim) => Witness::Submodule {
                theta: cand.theta,
                poly,
                side,
                vector: row_to_u32(f, &v, n),
                spin_dim,
                submodule_dim: match side {
                    Side::Module => spin_dim,
                    Side::Dual => n - spin_dim,
                },
            },
            NortonOutcome::Full { checked } => Witness::Norton {
                theta: cand.theta,
                poly,
                nullity: cand.null.len(),
                points_checked: checked,
                null_vector: row_to_u32(f, &cand.null[0], n),
                dual_null_vector: row_to_u32(f, &cand.dual_null[0], n),
            },
        })
    });
    let verdict = match &witness {
        Some(Witness::Submodule { .. }) => Verdict::Reducible,
        Some(Witness::Norton { .. }) => Verdict::Irreducible,
        None => Verdict::BudgetExhausted,
    };
    IrreducibilityCertificate {
        verdict,
        dim: n,
        seed,
        attempts,
        witness,
    }
}

/// Re-checks a certificate by recomputing p(θ) and spinning the recorded
/// vectors.
pub fn verify_certificate<F: Field>(
    module: &FpModule<F>,
    cert: &IrreducibilityCertificate,
) -> bool {
    let f = module.field();
    let n = module.dim();
    if cert.dim != n {
        return false;
    }
    let singular = |theta: &AlgebraElement, poly: &[u32]| {
        let base = theta.evaluate(module);
        let mut powers = vec![Matrix::identity(f, n)];
        for _ in 1..poly.len() {
            let next = powers.last().expect("nonempty").mul(&base);
            powers.push(next);
        }
        eval_poly(f, &poly_from_u32(f, poly), &powers)
    };
    match (&cert.verdict, &cert.witness) {
        (
            Verdict::Reducible,
            Some(Witness::Submodule {
                side,
                vector,
                spin_dim,
                submodule_dim,
                ..
            }),
        ) => {
            let v = crate::linalg::row_from_u32(f, vector);
            let target = match side {
                Side::Module => module.clone(),
                Side::Dual => module.transposed(),
            };
            let s = target.spin(&v);
            let sub = match side {
                Side::Module => s.dim(),
                Side::Dual => n - s.dim(),
            };
            !f.row_is_zero(&v) && s.dim() == *spin_dim && s.dim() < n && sub == *submodule_dim
        }
        (
            Verdict::Irreducible,
            Some(Witness::Norton {
                theta,
                poly,
                nullity,
                ..
            }),
        ) => {
            let a = singular(theta, poly);
            let null = a.left_nullspace();
            if null.len() != *nullity || null.is_empty() {
                return false;
            }
            let cand = Candidate {
                theta: theta.clone(),
                poly: poly_from_u32(f, poly),
                null,
                dual_null: a.transpose().left_nullspace(),
            };
            matches!(
                norton_test(module, &module.transposed(), &cand),
                Some(NortonOutcome::Full { .. })
            )
        }
        (Verdict::BudgetExhausted, None) => true,
        _ => false,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EndomorphismMethod {
    /// The chosen null space is one-dimensional, so End(M) = F.
    NullityOne,
    /// End(M) computed exactly as the maps determined by images of one
    /// spinning vector inside the null space.
    RestrictedSpin,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EndomorphismReport {
    /// Degree of End(M) over the base field.
    pub degree: usize,
    pub absolutely_irreducible: bool,
    pub method: EndomorphismMethod,
    pub theta: AlgebraElement,
    pub poly: Vec<u32>,
    pub nullity: usize,
    pub seed: u64,
    pub attempts: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum AbsoluteOutcome {
    Determined(EndomorphismReport),
    Inconclusive { seed: u64, attempts: usize },
}

impl AbsoluteOutcome {
    pub fn is_absolutely_irreducible(&self) -> Option<bool> {
        match self {
            Self::Determined(r) => Some(r.absolutely_irreducible),
            Self::Inconclusive { .. } => None,
        }
    }

    pub fn degree(&self) -> Option<usize> {
        match self {
            Self::Determined(r) => Some(r.degree),
            Self::Inconclusive { .. } => None,
        }
    }
}

/// Degree of the endomorphism field of an irreducible module.
///
/// Searches for p(θ) of minimal nullity, stopping early at nullity equal to
/// deg p. Any endomorphism commutes with p(θ), so End(M) is an
/// (End(M)-stable) subspace of null(p(θ)) once a spinning vector is fixed;
/// nullity one forces End(M) = F and larger nullities are resolved exactly.
pub fn is_absolutely_irreducible<F: Field>(
    module: &FpModule<F>,
    seed: u64,
) -> Result<AbsoluteOutcome> {
    let cert = is_irreducible(module, seed);
    match cert.verdict {
        Verdict::Irreducible => {}
        Verdict::Reducible => {
            return Err(Error::Precondition("module is reducible".into()));
        }
        Verdict::BudgetExhausted => {
            return Ok(AbsoluteOutcome::Inconclusive {
                seed,
                attempts: cert.attempts,
            })
        }
    }
    let mut best: Option<Candidate<F>> = None;
    let (early, attempts) = search_candidates(module, seed, |cand| {
        let deg = cand.poly.len() - 1;
        if cand.null.len() == deg {
            return Some(cand);
        }
        if best.as_ref().is_none_or(|b| cand.null.len() < b.null.len()) {
            best = Some(cand);
        }
        None
    });
    let Some(cand) = early.or(best) else {
        return Ok(AbsoluteOutcome::Inconclusive { seed, attempts });
    };
    let f = module.field();
    let (degree, method) = if cand.null.len() == 1 {
        (1, EndomorphismMethod::NullityOne)
    } else {
        (
            restricted_endomorphism_degree(module, &cand.null)?,
            EndomorphismMethod::RestrictedSpin,
        )
    };
    Ok(AbsoluteOutcome::Determined(EndomorphismReport {
        degree,
        absolutely_irreducible: degree == 1,
        method,
        poly: poly_to_u32(f, &cand.poly),
        nullity: cand.null.len(),
        theta: cand.theta,
        seed,
        attempts,
    }))
}

/// dim End(M) for irreducible M, given a null space `null` of some
/// algebra element. Spins null[0] to a basis while recording how each
/// basis vector arose, replays the same words on every null vector, and
/// keeps the combinations whose induced map commutes with all generators.
pub fn restricted_endomorphism_degree<F: Field>(
    module: &FpModule<F>,
    null: &[F::Row],
) -> Result<usize> {
    let f = module.field();
    let n = module.dim();
    let gens = module.actions();

    let mut echelon = Subspace::new(f, n);
    echelon.insert(null[0].clone());
    let mut raw = vec![null[0].clone()];
    let mut steps: Vec<(usize, usize)> = Vec::new();
    let mut t = 0;
    while t < raw.len() && raw.len() < n {
        for (gi, g) in gens.iter().enumerate() {
            let w = g.vec_mul(&raw[t]);
            if echelon.insert(w.clone()) {
                raw.push(w);
                steps.push((t, gi));
                if raw.len() == n {
                    break;
                }
            }
        }
        t += 1;
    }
    if raw.len() != n {
        return Err(Error::Precondition(
            "null vector does not generate the module".into(),
        ));
    }
    let basis = Matrix::from_rows(f, n, raw);
    let basis_inv = basis.inverse().expect("spun vectors are independent");

    let mut commutators: Vec<F::Row> = Vec::with_capacity(null.len());
    let width = gens.len() * n * n;
    for w in null {
        let mut images = vec![w.clone()];
        for &(parent, gi) in &steps {
            let next = gens[gi].vec_mul(&images[parent]);
            images.push(next);
        }
        let phi = basis_inv.mul(&Matrix::from_rows(f, n, images));
        let mut row = f.zero_row(width);
        for (gi, g) in gens.iter().enumerate() {
            let lhs = g.mul(&phi);
            let rhs = phi.mul(g);
            for r in 0..n {
                for c in 0..n {
                    let x = f.add(lhs.get(r, c), rhs.get(r, c));
                    if !f.is_zero(x) {
                        f.set(&mut row, gi * n * n + r * n + c, x);
                    }
                }
            }
        }
        commutators.push(row);
    }
    let system = Matrix::from_rows(f, width, commutators);
    Ok(system.left_nullspace().len())
}

/// dim {X : gX = Xg for every generator g}, by Gaussian elimination on
/// the n² unknowns. Stops once the rank reaches n² − 1, since the
/// identity always commutes.
pub fn commutant_dimension<F: Field>(module: &FpModule<F>) -> usize {
    let f = module.field();
    let n = module.dim();
    let unknowns = n * n;
    let mut eqs = Subspace::new(f, unknowns);
    for g in module.actions() {
        for r in 0..n {
            for c in 0..n {
                let mut row = f.zero_row(unknowns);
                for k in 0..n {
                    // (gX)[r][c] = Σ g[r][k] X[k][c]
                    let a = g.get(r, k);
                    if !f.is_zero(a) {
                        let cur = f.get(&row, k * n + c);
                        f.set(&mut row, k * n + c, f.add(cur, a));
                    }
                    // (Xg)[r][c] = Σ X[r][k] g[k][c]
                    let b = g.get(k, c);
                    if !f.is_zero(b) {
                        let cur = f.get(&row, r * n + k);
                        f.set(&mut row, r * n + k, f.add(cur, b));
                    }
                }
                eqs.insert(row);
                if eqs.dim() + 1 == unknowns {
                    return 1;
                }
            }
        }
    }
    unknowns - eqs.dim()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c7_regular() -> Vec<Perm> {
        vec![Perm::cycle(7)]
    }

    fn order3_module() -> FpModule<Gf2> {
        let a = Matrix::from_u32(&Gf2, &[vec![0, 1], vec![1, 1]]);
        FpModule::new(&Gf2, 2, vec![a]).unwrap()
    }

    #[test]
    fn module_validation() {
        let a = Matrix::from_u32(&Gf2, &[vec![1, 1], vec![1, 1]]);
        assert!(FpModule::new(&Gf2, 2, vec![a]).is_err());
        assert!(FpModule::new(&Gf2, 3, vec![Matrix::identity(&Gf2, 2)]).is_err());
        assert!(FpModule::<Gf2>::new(&Gf2, 0, vec![]).is_err());
        assert!(perm_module(&[]).is_err());
    }

    #[test]
    fn perm_module_is_a_homomorphism() {
        let p = Perm::from_images(vec![1, 2, 0, 4, 3]).unwrap();
        let q = Perm::from_images(vec![4, 3, 2, 1, 0]).unwrap();
        let m = perm_module(&[p.clone(), q.clone(), p.then(&q)]).unwrap();
        assert_eq!(m.actions()[0].mul(&m.actions()[1]), m.actions()[2]);
        let qb = qb_module(&[p.clone(), q.clone(), p.then(&q)]).unwrap();
        assert!(qb.splits);
        assert_eq!(qb.module.dim(), 4);
        assert_eq!(
            qb.module.actions()[0].mul(&qb.module.actions()[1]),
            qb.module.actions()[2]
        );
    }

    #[test]
    fn qb_embeds_as_zero_sum_hyperplane() {
        // v_b = e_b + e_0 maps into F2^n compatibly with the actions
        let p = Perm::from_images(vec![3, 0, 4, 1, 2, 6, 5]).unwrap();
        let full = perm_module(std::slice::from_ref(&p)).unwrap();
        let qb = qb_module(std::slice::from_ref(&p)).unwrap().module;
        let n = 7;
        let embed = Matrix::from_fn(&Gf2, n - 1, n, |r, c| u8::from(c == 0 || c == r + 1));
        assert_eq!(qb.actions()[0].mul(&embed), embed.mul(&full.actions()[0]));
    }

    #[test]
    fn even_degree_has_no_splitting() {
        let qb = qb_module(&[Perm::cycle(6)]).unwrap();
        assert!(!qb.splits);
        assert_eq!(qb.module.dim(), 5);
    }

    #[test]
    fn c7_zero_sum_module_is_reducible() {
        let qb = qb_module(&c7_regular()).unwrap().module;
        assert_eq!(qb.dim(), 6);
        let cert = is_irreducible(&qb, 0);
        assert_eq!(cert.verdict, Verdict::Reducible);
        match &cert.witness {
            Some(Witness::Submodule { submodule_dim, .. }) => assert_eq!(*submodule_dim, 3),
            other => panic!("unexpected witness {other:?}"),
        }
        assert!(verify_certificate(&qb, &cert));
    }

    #[test]
    fn direct_sum_is_reducible() {
        let m = order3_module();
        let mm = m.direct_sum(&m).unwrap();
        for seed in 0..5 {
            let cert = is_irreducible(&mm, seed);
            assert_eq!(cert.verdict, Verdict::Reducible);
            assert!(verify_certificate(&mm, &cert));
        }
    }

    #[test]
    fn order_three_matrix_is_irreducible_not_absolutely() {
        let m = order3_module();
        let cert = is_irreducible(&m, 0);
        assert_eq!(cert.verdict, Verdict::Irreducible);
        assert!(verify_certificate(&m, &cert));
        let abs = is_absolutely_irreducible(&m, 0).unwrap();
        assert_eq!(abs.degree(), Some(2));
        assert_eq!(abs.is_absolutely_irreducible(), Some(false));
        assert_eq!(commutant_dimension(&m), 2);
    }

    #[test]
    fn trivial_module() {
        let m = FpModule::new(&Gf2, 1, vec![Matrix::identity(&Gf2, 1)]).unwrap();
        assert_eq!(is_irreducible(&m, 0).verdict, Verdict::Irreducible);
        assert_eq!(
            is_absolutely_irreducible(&m, 0)
                .unwrap()
                .is_absolutely_irreducible(),
            Some(true)
        );
        let none = FpModule::new(&Gf2, 1, vec![]).unwrap();
        assert_eq!(is_irreducible(&none, 3).verdict, Verdict::Irreducible);
    }

    #[test]
    fn reducible_module_has_no_absolute_test() {
        let qb = qb_module(&c7_regular()).unwrap().module;
        assert!(matches!(
            is_absolutely_irreducible(&qb, 0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn small_irreducible_lists() {
        let polys = small_irreducibles(&Gf2, 128);
        let count = |d: usize| polys.iter().filter(|p| p.len() == d + 1).count();
        // necklace counts of irreducible binary polynomials
        assert_eq!(
            (1..=9).map(count).collect::<Vec<_>>(),
            vec![2, 1, 2, 3, 6, 9, 18, 30, 56]
        );
        let f4 = FieldSpec::conway(2).unwrap();
        let polys = small_irreducibles(&f4, 128);
        assert_eq!(polys.iter().filter(|p| p.len() == 3).count(), 6);
        assert_eq!(polys.iter().filter(|p| p.len() == 4).count(), 20);
        let f64 = FieldSpec::conway(6).unwrap();
        assert_eq!(small_irreducibles(&f64, 128).len(), 64);
    }

    #[test]
    fn projective_point_enumeration() {
        let f4 = FieldSpec::conway(2).unwrap();
        let basis = vec![vec![1u16, 0, 0], vec![0, 1, 0]];
        let pts = projective_points(&f4, &basis, 3, 100).unwrap();
        assert_eq!(pts.len(), 5);
        assert!(projective_points(&f4, &basis, 3, 4).is_none());
    }

    #[test]
    fn restricted_spin_matches_commutant_on_st2() {
        let m = st2_module(4).unwrap();
        let abs = is_absolutely_irreducible(&m, 0).unwrap();
        assert_eq!(abs.degree(), Some(1));
        assert_eq!(commutant_dimension(&m), 1);
    }
}
