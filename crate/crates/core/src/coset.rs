//! Canonical one-sided and double cosets of `Γ` and of the finite-index
//! subgroups `Γ_σ = σΓσ⁻¹ ∩ Γ`, double-coset decompositions, and the
//! one-level refinement maps between coset spaces.
//!
//! A level (a subgroup in the lattice generated by the `Γ_σ`) is stored as a
//! set of elements `σ₁, …, σ_m` and stands for `Γ_{σ₁} ∩ … ∩ Γ_{σ_m}`; the
//! empty set is `Γ` itself. Membership is tested directly (`x ∈ Γ` and
//! `σᵢ⁻¹xσᵢ ∈ Γ`), so levels never require listing their elements and work
//! for the infinite modular group as well.
//!
//! Right cosets `Γ₀g` of a level `Γ₀` are canonicalized by writing
//! `g = γh` with `h` the canonical representative of `Γg` and `γ ∈ Γ`, then
//! locating `Γ₀γ` in a Schreier transversal of `Γ₀\Γ`. Left cosets are
//! transported through [`GroupPair::flip`].

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupPair};
use crate::hecke::RelationInstance;
use crate::scalar::Q;

/// Default bound on `[Γ : Γ₀]` for any materialized level.
pub const DEFAULT_INDEX_BOUND: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `Γ₀g`
    Right,
    /// `gΓ₀`
    Left,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Right => "R",
            Side::Left => "L",
        })
    }
}

/// A subgroup `Γ_{σ₁} ∩ … ∩ Γ_{σ_m}`; no `σᵢ` lies in `Γ` and each is the
/// canonical representative of `σᵢΓ` (since `Γ_{σγ} = Γ_σ`).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Level {
    sigmas: Vec<GroupElement>,
}

impl Level {
    pub fn gamma() -> Self {
        Level::default()
    }

    pub fn is_gamma(&self) -> bool {
        self.sigmas.is_empty()
    }

    pub fn sigmas(&self) -> &[GroupElement] {
        &self.sigmas
    }

    pub fn label(&self, pair: &GroupPair) -> String {
        if self.is_gamma() {
            "G0".to_string()
        } else {
            let parts: Vec<_> = self.sigmas.iter().map(|s| pair.format_element(s)).collect();
            format!("G0[{}]", parts.join(";"))
        }
    }
}

/// A canonical coset: equal keys iff equal cosets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CosetKey {
    pub side: Side,
    pub level: Level,
    /// Canonical representative.
    pub rep: GroupElement,
}

impl CosetKey {
    /// Stable text form: side tag, level tag, representative.
    pub fn label(&self, pair: &GroupPair) -> String {
        format!("{}|{}|{}", self.side, self.level.label(pair), pair.format_element(&self.rep))
    }
}

/// A canonical double coset `ΓσΓ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DoubleCosetKey {
    pub rep: GroupElement,
}

impl DoubleCosetKey {
    pub fn label(&self, pair: &GroupPair) -> String {
        format!("D|{}", pair.format_element(&self.rep))
    }
}

/// A finitely supported rational combination of cosets sharing one side and
/// one level. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetVector {
    side: Side,
    level: Level,
    coeffs: BTreeMap<CosetKey, Q>,
}

impl CosetVector {
    pub fn zero(side: Side, level: Level) -> Self {
        CosetVector { side, level, coeffs: BTreeMap::new() }
    }

    pub fn basis(key: CosetKey) -> Self {
        let mut v = CosetVector::zero(key.side, key.level.clone());
        v.coeffs.insert(key, Q::from_integer(1));
        v
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn level(&self) -> &Level {
        &self.level
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, key: &CosetKey) -> Q {
        self.coeffs.get(key).copied().unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CosetKey, &Q)> {
        self.coeffs.iter()
    }

    /// Sum of all coefficients.
    pub fn mass(&self) -> Q {
        self.coeffs.values().copied().sum()
    }

    pub fn add_term(&mut self, key: CosetKey, c: Q) -> Result<()> {
        if key.side != self.side || key.level != self.level {
            return Err(Error::VectorMismatch("key has a different side or level".into()));
        }
        if c.is_zero() {
            return Ok(());
        }
        let slot = self.coeffs.entry(key).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.retain(|_, v| !v.is_zero());
        }
        Ok(())
    }

    pub fn scaled(&self, c: Q) -> Self {
        let mut out = CosetVector::zero(self.side, self.level.clone());
        if !c.is_zero() {
            out.coeffs = self.coeffs.iter().map(|(k, v)| (k.clone(), *v * c)).collect();
        }
        out
    }

    pub fn add(&self, other: &CosetVector) -> Result<Self> {
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            out.add_term(k.clone(), *c)?;
        }
        Ok(out)
    }
}

#[derive(Debug)]
struct LevelData {
    /// Schreier transversal of `Γ₀\Γ`, breadth-first from the identity.
    transversal: Vec<GroupElement>,
    lookup: BTreeMap<Vec<GroupElement>, usize>,
    /// Schreier generators of `Γ₀`.
    generators: Vec<GroupElement>,
}

#[derive(Debug)]
struct DoubleData {
    right: Vec<CosetKey>,
    left: Vec<CosetKey>,
}

/// Coset canonicalization and decomposition for a fixed pair, with memo
/// tables for levels and double cosets. Shareable across threads.
#[derive(Debug)]
pub struct CosetEngine {
    pair: GroupPair,
    index_bound: usize,
    levels: Mutex<HashMap<Level, Arc<LevelData>>>,
    doubles: Mutex<HashMap<GroupElement, Arc<DoubleData>>>,
}

impl CosetEngine {
    pub fn new(pair: GroupPair) -> Self {
        Self::with_index_bound(pair, DEFAULT_INDEX_BOUND)
    }

    pub fn with_index_bound(pair: GroupPair, index_bound: usize) -> Self {
        CosetEngine {
            pair,
            index_bound,
            levels: Mutex::new(HashMap::new()),
            doubles: Mutex::new(HashMap::new()),
        }
    }

    pub fn pair(&self) -> &GroupPair {
        &self.pair
    }

    /// The level `Γ_{σ₁} ∩ … ∩ Γ_{σ_m}`.
    pub fn level(&self, sigmas: &[GroupElement]) -> Level {
        let set: BTreeSet<GroupElement> = sigmas
            .iter()
            .filter(|s| !self.pair.in_gamma(s))
            .map(|s| self.pair.canon_left_gamma(s))
            .collect();
        Level { sigmas: set.into_iter().collect() }
    }

    /// `Γ_σ`.
    pub fn stabilizer_level(&self, sigma: &GroupElement) -> Level {
        self.level(std::slice::from_ref(sigma))
    }

    pub fn intersect(&self, a: &Level, b: &Level) -> Level {
        let all: Vec<_> = a.sigmas.iter().chain(&b.sigmas).copied().collect();
        self.level(&all)
    }

    pub fn level_contains(&self, level: &Level, x: &GroupElement) -> bool {
        let pair = &self.pair;
        pair.in_gamma(x)
            && level.sigmas.iter().all(|s| pair.in_gamma(&pair.mul(&pair.mul(&pair.invert(s), x), s)))
    }

    /// Invariant of `Γ₀γ` for `γ ∈ Γ`: the right `Γ`-cosets of `σᵢ⁻¹γ`.
    fn signature(&self, level: &Level, gamma: &GroupElement) -> Vec<GroupElement> {
        let pair = &self.pair;
        level
            .sigmas
            .iter()
            .map(|s| pair.canon_right_gamma(&pair.mul(&pair.invert(s), gamma)))
            .collect()
    }

    fn level_data(&self, level: &Level) -> Result<Arc<LevelData>> {
        if let Some(d) = self.levels.lock().unwrap().get(level) {
            return Ok(d.clone());
        }
        let pair = &self.pair;
        let gens = pair.gamma_generators();
        let id = pair.identity();
        let mut transversal = vec![id];
        let mut lookup = BTreeMap::from([(self.signature(level, &id), 0usize)]);
        let mut edges = Vec::new();
        let mut i = 0;
        while i < transversal.len() {
            for s in &gens {
                let x = pair.mul(&transversal[i], s);
                let sig = self.signature(level, &x);
                let j = match lookup.get(&sig) {
                    Some(&j) => j,
                    None => {
                        if transversal.len() >= self.index_bound {
                            return Err(Error::IndexBoundExceeded { bound: self.index_bound });
                        }
                        lookup.insert(sig, transversal.len());
                        transversal.push(x);
                        transversal.len() - 1
                    }
                };
                edges.push((x, j));
            }
            i += 1;
        }
        let mut generators = BTreeSet::new();
        for (x, j) in edges {
            let g = pair.mul(&x, &pair.invert(&transversal[j]));
            if g != id {
                generators.insert(g);
            }
        }
        let data = Arc::new(LevelData { transversal, lookup, generators: generators.into_iter().collect() });
        self.levels.lock().unwrap().insert(level.clone(), data.clone());
        Ok(data)
    }

    /// `[Γ : Γ₀]`.
    pub fn level_index(&self, level: &Level) -> Result<usize> {
        Ok(self.level_data(level)?.transversal.len())
    }

    /// Generators of the level as a group (Schreier generators for proper
    /// levels, the configured generators for `Γ`).
    pub fn level_generators(&self, level: &Level) -> Result<Vec<GroupElement>> {
        if level.is_gamma() {
            return Ok(self.pair.gamma_generators());
        }
        Ok(self.level_data(level)?.generators.clone())
    }

    /// Representatives `τ` of the right cosets `Γ₀τ` partitioning `Γ`.
    pub fn level_transversal(&self, level: &Level) -> Result<Vec<GroupElement>> {
        Ok(self.level_data(level)?.transversal.clone())
    }

    fn flip_level(&self, level: &Level) -> Level {
        match self.pair.backend() {
            crate::group::Backend::Finite(_) => level.clone(),
            crate::group::Backend::Modular(_) => {
                // (Γ_σ)ᵀ = Γ_{(σ⁻¹)ᵀ}
                let flipped: Vec<_> =
                    level.sigmas.iter().map(|s| self.pair.flip(&self.pair.invert(s))).collect();
                self.level(&flipped)
            }
        }
    }

    fn canon_right(&self, level: &Level, g: &GroupElement) -> Result<GroupElement> {
        if level.is_gamma() {
            return Ok(self.pair.canon_right_gamma(g));
        }
        Ok(self.canon_right_in(level, &*self.level_data(level)?, g))
    }

    fn canon_right_in(&self, level: &Level, data: &LevelData, g: &GroupElement) -> GroupElement {
        let pair = &self.pair;
        let h = pair.canon_right_gamma(g);
        let gamma = pair.mul(g, &pair.invert(&h));
        debug_assert!(pair.in_gamma(&gamma));
        let idx = data.lookup[&self.signature(level, &gamma)];
        pair.mul(&data.transversal[idx], &h)
    }

    /// Canonical key of the coset of `g` on the given side at the given level.
    pub fn canon_coset(&self, side: Side, level: &Level, g: &GroupElement) -> Result<CosetKey> {
        self.pair.check(g)?;
        let rep = match side {
            Side::Right => self.canon_right(level, g)?,
            Side::Left => {
                let flipped = self.flip_level(level);
                self.pair.flip(&self.canon_right(&flipped, &self.pair.flip(g))?)
            }
        };
        Ok(CosetKey { side, level: level.clone(), rep })
    }

    pub fn double_key(&self, sigma: &GroupElement) -> DoubleCosetKey {
        DoubleCosetKey { rep: self.pair.canon_double(sigma) }
    }

    fn double_data(&self, sigma: &GroupElement) -> Result<Arc<DoubleData>> {
        let d = self.pair.canon_double(sigma);
        if let Some(x) = self.doubles.lock().unwrap().get(&d) {
            return Ok(x.clone());
        }
        let gamma = Level::gamma();
        let right: Vec<CosetKey> = self
            .pair
            .right_cosets_in_double(&d)
            .into_iter()
            .map(|rep| CosetKey { side: Side::Right, level: gamma.clone(), rep })
            .collect();
        let left: BTreeSet<CosetKey> = self
            .pair
            .right_cosets_in_double(&self.pair.flip(&d))
            .iter()
            .map(|r| self.canon_coset(Side::Left, &gamma, &self.pair.flip(r)))
            .collect::<Result<_>>()?;
        let data = Arc::new(DoubleData { right, left: left.into_iter().collect() });
        self.doubles.lock().unwrap().insert(d, data.clone());
        Ok(data)
    }

    /// The right cosets `Γx` whose disjoint union is `ΓσΓ`, sorted.
    pub fn decompose_double_right(&self, sigma: &GroupElement) -> Result<Vec<CosetKey>> {
        self.pair.check(sigma)?;
        Ok(self.double_data(sigma)?.right.clone())
    }

    /// The left cosets `xΓ` whose disjoint union is `ΓσΓ`, sorted.
    pub fn decompose_double_left(&self, sigma: &GroupElement) -> Result<Vec<CosetKey>> {
        self.pair.check(sigma)?;
        Ok(self.double_data(sigma)?.left.clone())
    }

    /// `[Γ : Γ_σ]`, the number of left `Γ`-cosets in `ΓσΓ`.
    pub fn stabilizer_index(&self, sigma: &GroupElement) -> Result<usize> {
        Ok(self.decompose_double_left(sigma)?.len())
    }

    /// Right cosets of `Γ` in `ΓσΓ` found as the orbit of `Γσ` under right
    /// multiplication by the generators of `Γ`. Independent of
    /// [`GroupPair::right_cosets_in_double`].
    pub fn right_cosets_by_orbit(&self, sigma: &GroupElement) -> Result<Vec<CosetKey>> {
        let gamma = Level::gamma();
        let gens = self.pair.gamma_generators();
        let start = self.canon_coset(Side::Right, &gamma, sigma)?;
        let mut seen = BTreeSet::from([start.clone()]);
        let mut queue = VecDeque::from([start]);
        while let Some(k) = queue.pop_front() {
            for s in &gens {
                let next = self.canon_coset(Side::Right, &gamma, &self.pair.mul(&k.rep, s))?;
                if seen.insert(next.clone()) {
                    if seen.len() > self.index_bound {
                        return Err(Error::IndexBoundExceeded { bound: self.index_bound });
                    }
                    queue.push_back(next);
                }
            }
        }
        Ok(seen.into_iter().collect())
    }

    /// Right cosets of `fine` contained in `σΓ₀` where `Γ₀ = coarse`, as the
    /// orbit of `fine·σ` under right multiplication by `Γ₀`. Requires
    /// `σ⁻¹·fine·σ ⊆ Γ₀`.
    pub(crate) fn right_cosets_in_translate(
        &self,
        fine: &Level,
        sigma: &GroupElement,
        coarse: &Level,
    ) -> Result<Vec<CosetKey>> {
        let gens = self.level_generators(coarse)?;
        self.pair.check(sigma)?;
        let data = if fine.is_gamma() { None } else { Some(self.level_data(fine)?) };
        let canon = |g: &GroupElement| match &data {
            None => self.pair.canon_right_gamma(g),
            Some(d) => self.canon_right_in(fine, d, g),
        };
        let start = canon(sigma);
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(k) = queue.pop_front() {
            for s in &gens {
                let next = canon(&self.pair.mul(&k, s));
                if seen.insert(next) {
                    if seen.len() > self.index_bound {
                        return Err(Error::IndexBoundExceeded { bound: self.index_bound });
                    }
                    queue.push_back(next);
                }
            }
        }
        Ok(seen.into_iter().map(|rep| CosetKey { side: Side::Right, level: fine.clone(), rep }).collect())
    }

    /// Verifies `finer ⊆ coarser`.
    pub fn check_inclusion(&self, finer: &Level, coarser: &Level) -> Result<()> {
        if coarser.sigmas.iter().all(|s| finer.sigmas.contains(s)) {
            return Ok(());
        }
        for g in self.level_generators(finer)? {
            if !self.level_contains(coarser, &g) {
                return Err(Error::LevelNotContained {
                    finer: finer.label(&self.pair),
                    coarser: coarser.label(&self.pair),
                });
            }
        }
        Ok(())
    }

    /// Elements `s` with `coarser = ⊔ Γ₁s` (right) for `Γ₁ = finer ⊆ coarser`.
    fn relative_transversal(&self, coarser: &Level, finer: &Level) -> Result<Vec<GroupElement>> {
        self.check_inclusion(finer, coarser)?;
        Ok(self
            .level_data(finer)?
            .transversal
            .iter()
            .filter(|t| self.level_contains(coarser, t))
            .copied()
            .collect())
    }

    /// `[Γ₀ : Γ₁]` for `Γ₁ ⊆ Γ₀`.
    pub fn relative_index(&self, coarser: &Level, finer: &Level) -> Result<usize> {
        Ok(self.relative_transversal(coarser, finer)?.len())
    }

    /// Splits a coset of level `Γ₀` into the `[Γ₀:Γ₁]` cosets of a finer
    /// level `Γ₁` that partition it.
    pub fn split_coset(&self, key: &CosetKey, finer: &Level) -> Result<Vec<CosetKey>> {
        let pair = &self.pair;
        let pieces: BTreeSet<CosetKey> = match key.side {
            Side::Right => self
                .relative_transversal(&key.level, finer)?
                .iter()
                .map(|t| self.canon_coset(Side::Right, finer, &pair.mul(t, &key.rep)))
                .collect::<Result<_>>()?,
            Side::Left => {
                // gΓ₀ = ⊔ g t⁻¹ Γ₁ where Γ₀ = ⊔ Γ₁ t
                self.relative_transversal(&key.level, finer)?
                    .iter()
                    .map(|t| self.canon_coset(Side::Left, finer, &pair.mul(&key.rep, &pair.invert(t))))
                    .collect::<Result<_>>()?
            }
        };
        Ok(pieces.into_iter().collect())
    }

    /// Replaces each basis coset by the sum of its pieces at the finer level.
    pub fn level_embed(&self, v: &CosetVector, finer: &Level) -> Result<CosetVector> {
        self.check_inclusion(finer, v.level())?;
        let mut out = CosetVector::zero(v.side(), finer.clone());
        for (k, c) in v.iter() {
            for piece in self.split_coset(k, finer)? {
                out.add_term(piece, *c)?;
            }
        }
        Ok(out)
    }

    /// Inner product with `⟨[C],[C]⟩ = 1/[Γ:Γ₀]` for a `Γ₀`-coset `C`, which
    /// makes [`CosetEngine::level_embed`] isometric.
    pub fn inner(&self, u: &CosetVector, v: &CosetVector) -> Result<Q> {
        if u.side() != v.side() || u.level() != v.level() {
            return Err(Error::VectorMismatch("inner product across sides or levels".into()));
        }
        let index = self.level_index(u.level())? as i64;
        let dot: Q = u.iter().map(|(k, c)| *c * v.coeff(k)).sum();
        Ok(dot / Q::from_integer(index))
    }

    /// Rewrites an instance stated at level `Γ₀` at a finer level `Γ₁ ⊆ Γ₀`
    /// by splitting every term `σ₁Γ₀σ₂ = ⊔ₖ σ₁sₖΓ₁σ₂` (`Γ₀ = ⊔ sₖΓ₁`). The
    /// two unions are unchanged as sets; the result is re-verified.
    pub fn refine_relation(&self, inst: &RelationInstance, finer: &Level) -> Result<RelationInstance> {
        if !crate::hecke::verify_relation(self, inst)?.is_valid() {
            return Err(Error::InvalidInstance("input instance does not hold".into()));
        }
        if *finer == inst.level {
            return Ok(inst.clone());
        }
        let lefts: Vec<GroupElement> = self
            .relative_transversal(&inst.level, finer)?
            .iter()
            .map(|t| self.pair.invert(t))
            .collect();
        let split = |terms: &[(GroupElement, GroupElement)]| -> Vec<(GroupElement, GroupElement)> {
            terms
                .iter()
                .flat_map(|(a, b)| lefts.iter().map(move |s| (self.pair.mul(a, s), *b)))
                .collect()
        };
        let out = RelationInstance { level: finer.clone(), lhs: split(&inst.lhs), rhs: split(&inst.rhs) };
        if !crate::hecke::verify_relation(self, &out)?.is_valid() {
            return Err(Error::InvalidInstance("refined instance failed re-verification".into()));
        }
        Ok(out)
    }

    /// Elements of a coset (finite backend only), ascending.
    pub fn coset_elements(&self, key: &CosetKey) -> Result<Vec<u32>> {
        let f = self.pair.finite_backend()?;
        let members: Vec<GroupElement> = f
            .gamma_elements()
            .iter()
            .map(|&x| GroupElement::Perm(x))
            .filter(|x| self.level_contains(&key.level, x))
            .collect();
        let set: BTreeSet<u32> = members
            .iter()
            .map(|x| match key.side {
                Side::Right => self.pair.mul(x, &key.rep),
                Side::Left => self.pair.mul(&key.rep, x),
            })
            .map(|g| g.as_index().expect("finite element"))
            .collect();
        Ok(set.into_iter().collect())
    }

    /// All cosets of a level on one side (finite backend only), sorted.
    pub fn all_cosets(&self, side: Side, level: &Level) -> Result<Vec<CosetKey>> {
        let set: BTreeSet<CosetKey> = self
            .pair
            .enumerate()?
            .iter()
            .map(|g| self.canon_coset(side, level, g))
            .collect::<Result<_>>()?;
        Ok(set.into_iter().collect())
    }

    /// Canonical representatives of all double cosets (finite backend only).
    pub fn all_double_cosets(&self) -> Result<Vec<DoubleCosetKey>> {
        let set: BTreeSet<DoubleCosetKey> =
            self.pair.enumerate()?.iter().map(|g| self.double_key(g)).collect();
        Ok(set.into_iter().collect())
    }
}
