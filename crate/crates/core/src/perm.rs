//! Permutations of the unital and a deterministic Schreier–Sims.
//!
//! Permutations compose left to right: `p.then(&q)` maps x to q(p(x)).
//! Transversals are stored as Schreier trees, so memory stays linear in
//! the degree times the base length.

use std::collections::VecDeque;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermitian::{enumerate_unital, Unital};
use crate::matgroup::{center_order, su3_generators, GeneratorSet};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Box<[u32]>,
}

impl std::fmt::Debug for Perm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.images.len() <= 32 {
            write!(f, "Perm{:?}", self.images)
        } else {
            write!(
                f,
                "Perm(degree {}, {} moved)",
                self.degree(),
                self.support_size()
            )
        }
    }
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n as u32).collect(),
        }
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            let i = i as usize;
            if i >= n || seen[i] {
                return Err(Error::Domain("images do not form a bijection".into()));
            }
            seen[i] = true;
        }
        Ok(Self {
            images: images.into_boxed_slice(),
        })
    }

    /// The cycle (0 1 … n−1).
    pub fn cycle(n: usize) -> Self {
        Self {
            images: (0..n as u32).map(|i| (i + 1) % n as u32).collect(),
        }
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<u32> = (0..n as u32).collect();
        images.swap(a, b);
        Self {
            images: images.into_boxed_slice(),
        }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    pub fn support_size(&self) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|&(i, &x)| i as u32 != x)
            .count()
    }

    pub fn first_moved(&self) -> Option<usize> {
        self.images
            .iter()
            .enumerate()
            .position(|(i, &x)| i as u32 != x)
    }

    /// x ↦ other(self(x)).
    pub fn then(&self, other: &Perm) -> Perm {
        Perm {
            images: self
                .images
                .iter()
                .map(|&x| other.images[x as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm {
            images: inv.into_boxed_slice(),
        }
    }

    pub fn is_even(&self) -> bool {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut transpositions = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                x = self.apply(x);
                len += 1;
            }
            transpositions += len - 1;
        }
        transpositions % 2 == 0
    }
}

/// The permutation induced by each matrix on the unital.
pub fn action_on_unital(gens: &GeneratorSet, unital: &Unital) -> Result<Vec<Perm>> {
    if gens.q() != unital.q() {
        return Err(Error::Precondition(
            "generators and unital use different q".into(),
        ));
    }
    let ext = unital.tower().ext();
    gens.matrices()
        .iter()
        .map(|a| {
            let images = unital
                .points()
                .iter()
                .map(|p| {
                    let v = a.apply(p.rep(), ext);
                    unital.index_of(v).map(|i| i as u32).ok_or_else(|| {
                        Error::Internal(format!("{:?} maps {:?} off the unital", a.0, p.rep()))
                    })
                })
                .collect::<Result<Vec<u32>>>()?;
            Perm::from_images(images)
        })
        .collect()
}

/// One level of the stabilizer chain.
#[derive(Clone, Debug)]
struct Level {
    base_point: usize,
    /// Indices into the strong generating set.
    gens: Vec<usize>,
    /// Schreier tree: for each orbit point, the generator index that reached
    /// it and the point it came from.
    tree: Vec<Option<(usize, usize)>>,
    orbit: Vec<usize>,
}

/// A permutation group with a base and strong generating set.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    strong: Vec<Perm>,
    strong_inv: Vec<Perm>,
    levels: Vec<Level>,
    /// Positions in `generators` of the inputs that enlarged the group.
    essential: Vec<usize>,
}

const ROOT: usize = usize::MAX;

impl PermGroup {
    /// Deterministic Schreier–Sims over all generators, with base points
    /// chosen as the smallest moved points.
    pub fn schreier_sims(degree: usize, gens: &[Perm]) -> Result<Self> {
        Self::with_base_prefix(degree, gens, &[])
    }

    /// As [`PermGroup::schreier_sims`], but the base starts with `prefix`.
    pub fn with_base_prefix(degree: usize, gens: &[Perm], prefix: &[usize]) -> Result<Self> {
        if let Some(g) = gens.iter().find(|g| g.degree() != degree) {
            return Err(Error::Precondition(format!(
                "generator of degree {} in a group of degree {degree}",
                g.degree()
            )));
        }
        if let Some(&p) = prefix.iter().find(|&&p| p >= degree) {
            return Err(Error::Precondition(format!("base point {p} out of range")));
        }
        let mut group = Self {
            degree,
            generators: gens.to_vec(),
            strong: Vec::new(),
            strong_inv: Vec::new(),
            levels: prefix.iter().map(|&p| Level::new(p, degree)).collect(),
            essential: Vec::new(),
        };
        for (idx, g) in gens.iter().enumerate() {
            if !group.contains(g) {
                group.essential.push(idx);
                group.add_strong_generator(g.clone());
                group.complete();
            }
        }
        group.check_consistency()?;
        Ok(group)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    /// Positions of the generators that were not already in the group
    /// generated by their predecessors; they generate the same group.
    pub fn essential_generators(&self) -> &[usize] {
        &self.essential
    }

    pub fn strong_generators(&self) -> &[Perm] {
        &self.strong
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base_point).collect()
    }

    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .map(|l| BigUint::from(l.orbit.len()))
            .product()
    }

    /// The order when it fits in a `u128`.
    pub fn order_u128(&self) -> Option<u128> {
        self.levels
            .iter()
            .try_fold(1u128, |acc, l| acc.checked_mul(l.orbit.len() as u128))
    }

    /// Whether `g` sifts to the identity.
    pub fn contains(&self, g: &Perm) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let (residue, level) = self.sift(g.clone(), 0);
        level == self.levels.len() && residue.is_identity()
    }

    /// Coset representative u with u(base point) = point, if in the orbit.
    fn transversal(&self, level: usize, point: usize) -> Option<Perm> {
        let l = &self.levels[level];
        l.tree[point]?;
        let mut path = Vec::new();
        let mut x = point;
        while let Some((s, prev)) = l.tree[x] {
            if s == ROOT {
                break;
            }
            path.push(s);
            x = prev;
        }
        let mut u = Perm::identity(self.degree);
        for &s in path.iter().rev() {
            u = u.then(&self.strong[s]);
        }
        Some(u)
    }

    /// g · u_β⁻¹, walking up the Schreier tree from β.
    fn strip(&self, level: usize, mut g: Perm) -> Option<Perm> {
        let l = &self.levels[level];
        let mut x = g.apply(l.base_point);
        l.tree[x]?;
        while let Some((s, prev)) = l.tree[x] {
            if s == ROOT {
                break;
            }
            g = g.then(&self.strong_inv[s]);
            x = prev;
        }
        Some(g)
    }

    /// Sifts from `start`; returns the residue and the level where it stuck
    /// (`levels.len()` if it passed every level).
    fn sift(&self, mut g: Perm, start: usize) -> (Perm, usize) {
        for level in start..self.levels.len() {
            match self.strip(level, g.clone()) {
                Some(h) => g = h,
                None => return (g, level),
            }
        }
        (g, self.levels.len())
    }

    fn add_strong_generator(&mut self, g: Perm) -> usize {
        let idx = self.strong.len();
        self.strong_inv.push(g.inverse());
        self.strong.push(g);
        let g = &self.strong[idx];
        let mut deepest = 0;
        for (i, level) in self.levels.iter_mut().enumerate() {
            level.gens.push(idx);
            deepest = i;
            if g.apply(level.base_point) != level.base_point {
                break;
            }
        }
        let fixes_base = self
            .levels
            .iter()
            .all(|l| g.apply(l.base_point) == l.base_point);
        if fixes_base {
            let p = g.first_moved().expect("identity is never added");
            let mut level = Level::new(p, self.degree);
            level.gens.push(idx);
            self.levels.push(level);
            deepest = self.levels.len() - 1;
        }
        for i in 0..=deepest {
            self.rebuild_orbit(i);
        }
        deepest
    }

    fn rebuild_orbit(&mut self, i: usize) {
        let degree = self.degree;
        let level = &mut self.levels[i];
        level.tree = vec![None; degree];
        level.tree[level.base_point] = Some((ROOT, ROOT));
        level.orbit = vec![level.base_point];
        let mut queue = VecDeque::from([level.base_point]);
        while let Some(x) = queue.pop_front() {
            for &s in &level.gens {
                let y = self.strong[s].apply(x);
                if level.tree[y].is_none() {
                    level.tree[y] = Some((s, x));
                    level.orbit.push(y);
                    queue.push_back(y);
                }
            }
        }
    }

    /// Makes every level a complete transversal for its stabilizer.
    fn complete(&mut self) {
        let mut i = self.levels.len();
        'outer: while i > 0 {
            let lvl = i - 1;
            let orbit = self.levels[lvl].orbit.clone();
            let gens = self.levels[lvl].gens.clone();
            for &beta in &orbit {
                let u_beta = self.transversal(lvl, beta).expect("orbit point");
                for &s in &gens {
                    let image = self.strong[s].apply(beta);
                    let u_image = self.transversal(lvl, image).expect("orbit is closed");
                    let schreier = u_beta.then(&self.strong[s]).then(&u_image.inverse());
                    if schreier.is_identity() {
                        continue;
                    }
                    let (residue, stuck) = self.sift(schreier, lvl + 1);
                    if stuck < self.levels.len() || !residue.is_identity() {
                        let deepest = self.add_strong_generator_from(residue, lvl + 1);
                        i = deepest + 1;
                        continue 'outer;
                    }
                }
            }
            i -= 1;
        }
    }

    /// Adds a residue that fixes the first `from` base points to levels
    /// `from..`, extending the base if needed.
    fn add_strong_generator_from(&mut self, g: Perm, from: usize) -> usize {
        let idx = self.strong.len();
        self.strong_inv.push(g.inverse());
        self.strong.push(g);
        let g = &self.strong[idx];
        let mut deepest = from;
        let mut extended = true;
        for i in from..self.levels.len() {
            self.levels[i].gens.push(idx);
            deepest = i;
            if g.apply(self.levels[i].base_point) != self.levels[i].base_point {
                extended = false;
                break;
            }
        }
        if extended {
            let p = g.first_moved().expect("identity is never added");
            let mut level = Level::new(p, self.degree);
            level.gens.push(idx);
            self.levels.push(level);
            deepest = self.levels.len() - 1;
        }
        for i in from..=deepest {
            self.rebuild_orbit(i);
        }
        deepest
    }

    fn check_consistency(&self) -> Result<()> {
        for (i, level) in self.levels.iter().enumerate() {
            for &s in &level.gens {
                for prev in &self.levels[..i] {
                    if self.strong[s].apply(prev.base_point) != prev.base_point {
                        return Err(Error::Internal(
                            "strong generator does not fix earlier base points".into(),
                        ));
                    }
                }
            }
        }
        if let Some(g) = self.generators.iter().find(|g| !self.contains(g)) {
            return Err(Error::Internal(format!(
                "generator {g:?} failed membership"
            )));
        }
        Ok(())
    }

    /// Generators of the stabilizer of the first base point.
    pub fn first_stabilizer_generators(&self) -> Vec<Perm> {
        match self.levels.get(1) {
            Some(l) => l.gens.iter().map(|&s| self.strong[s].clone()).collect(),
            None => Vec::new(),
        }
    }
}

impl Level {
    fn new(base_point: usize, degree: usize) -> Self {
        let mut tree = vec![None; degree];
        tree[base_point] = Some((ROOT, ROOT));
        Self {
            base_point,
            gens: Vec::new(),
            tree,
            orbit: vec![base_point],
        }
    }
}

/// Orbits of the group generated by `gens`, each sorted, ordered by least
/// element.
pub fn orbits(degree: usize, gens: &[Perm]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; degree];
    let mut out = Vec::new();
    for s in 0..degree {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut orbit = vec![s];
        let mut t = 0;
        while t < orbit.len() {
            let x = orbit[t];
            for g in gens {
                let y = g.apply(x);
                if !seen[y] {
                    seen[y] = true;
                    orbit.push(y);
                }
            }
            t += 1;
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}

pub fn is_transitive(group: &PermGroup) -> bool {
    orbits(group.degree(), group.generators()).len() == 1
}

/// Sorted orbit lengths of the stabilizer of `b`, computed from a fresh
/// stabilizer chain whose base starts at `b`.
pub fn stabilizer_orbit_sizes(group: &PermGroup, b: usize) -> Result<Vec<usize>> {
    if group.degree() < 2 {
        return Err(Error::Precondition("degree must be at least 2".into()));
    }
    let chain = PermGroup::with_base_prefix(group.degree(), group.generators(), &[b])?;
    let stab = chain.first_stabilizer_generators();
    let mut sizes: Vec<usize> = orbits(group.degree(), &stab).iter().map(Vec::len).collect();
    sizes.sort_unstable();
    Ok(sizes)
}

/// |G| / |G_b| through a chain based at `b`.
pub fn stabilizer_index(group: &PermGroup, b: usize) -> Result<u128> {
    if !is_transitive(group) {
        return Err(Error::Precondition("group is not transitive".into()));
    }
    let chain = PermGroup::with_base_prefix(group.degree(), group.generators(), &[b])?;
    let stab = PermGroup::schreier_sims(group.degree(), &chain.first_stabilizer_generators())?;
    let index = chain.order() / stab.order();
    u128::try_from(index).map_err(|_| Error::Internal("index exceeds u128".into()))
}

/// Number of orbits on ordered pairs of distinct points; one exactly when
/// the action is doubly transitive.
pub fn pair_orbit_count(degree: usize, gens: &[Perm]) -> usize {
    let idx = |a: usize, b: usize| a * degree + b;
    let mut seen = vec![false; degree * degree];
    let mut count = 0;
    for a in 0..degree {
        for b in 0..degree {
            if a == b || seen[idx(a, b)] {
                continue;
            }
            count += 1;
            seen[idx(a, b)] = true;
            let mut stack = vec![(a, b)];
            while let Some((x, y)) = stack.pop() {
                for g in gens {
                    let (u, v) = (g.apply(x), g.apply(y));
                    if !seen[idx(u, v)] {
                        seen[idx(u, v)] = true;
                        stack.push((u, v));
                    }
                }
            }
        }
    }
    count
}

/// SU₃(q) acting on its unital, with the generated order checked against
/// (q³+1)q³(q²−1)/gcd(3, q+1).
#[derive(Clone, Debug)]
pub struct UnitalAction {
    pub unital: Unital,
    pub generators: GeneratorSet,
    pub perms: Vec<Perm>,
    pub group: PermGroup,
    pub center_order: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderReport {
    pub su3_order: u128,
    pub center: u32,
    pub expected_psu3_order: u128,
    pub computed_order: u128,
    pub base: Vec<usize>,
    pub orbit_lengths: Vec<usize>,
}

impl UnitalAction {
    pub fn build(q: u32) -> Result<Self> {
        let generators = su3_generators(q)?;
        let unital = enumerate_unital(q)?;
        Self::from_generators(unital, generators)
    }

    /// Builds the action without failing on an order mismatch; the caller
    /// inspects [`UnitalAction::order_report`].
    pub fn from_generators(unital: Unital, generators: GeneratorSet) -> Result<Self> {
        let perms = action_on_unital(&generators, &unital)?;
        let group = PermGroup::schreier_sims(unital.n(), &perms)?;
        let center_order = center_order(unital.q())?;
        Ok(Self {
            unital,
            generators,
            perms,
            group,
            center_order,
        })
    }

    pub fn order_report(&self) -> OrderReport {
        let su3 = self.generators.claimed_order();
        OrderReport {
            su3_order: su3,
            center: self.center_order,
            expected_psu3_order: su3 / u128::from(self.center_order),
            computed_order: self.group.order_u128().unwrap_or(u128::MAX),
            base: self.group.base(),
            orbit_lengths: self.group.orbit_lengths(),
        }
    }

    /// Errors unless the generated order matches the formula.
    pub fn verify_order(&self) -> Result<()> {
        let r = self.order_report();
        if r.computed_order != r.expected_psu3_order {
            return Err(Error::Construction(format!(
                "generated group has order {}, expected {}",
                r.computed_order, r.expected_psu3_order
            )));
        }
        Ok(())
    }

    /// Essential generators as permutations.
    pub fn essential_perms(&self) -> Vec<Perm> {
        self.group
            .essential_generators()
            .iter()
            .map(|&i| self.perms[i].clone())
            .collect()
    }
}
