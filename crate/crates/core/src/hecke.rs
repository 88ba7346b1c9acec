//! The Hecke algebra `ℂ(Γ\G/Γ)`: product, involution, unit, the module
//! actions on coset vectors, the set-identity verifier for relation
//! instances, and transport along automorphisms preserving `Γ`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};
use serde::Deserialize;

use crate::coset::{CosetEngine, CosetKey, CosetVector, DoubleCosetKey, Level, Side};
use crate::error::{Error, Result};
use crate::group::{Backend, GroupElement, GroupPair, Mat2};
use crate::scalar::{format_q, parse_q, Q};

/// A rational combination of double cosets `ΓσΓ`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HeckeElement {
    coeffs: BTreeMap<DoubleCosetKey, Q>,
}

impl HeckeElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(key: DoubleCosetKey) -> Self {
        HeckeElement { coeffs: BTreeMap::from([(key, Q::one())]) }
    }

    /// `[Γ]`.
    pub fn unit(pair: &GroupPair) -> Self {
        Self::basis(DoubleCosetKey { rep: pair.identity() })
    }

    /// `[ΓσΓ]`.
    pub fn double(engine: &CosetEngine, sigma: &GroupElement) -> Self {
        Self::basis(engine.double_key(sigma))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, key: &DoubleCosetKey) -> Q {
        self.coeffs.get(key).copied().unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&DoubleCosetKey, &Q)> {
        self.coeffs.iter()
    }

    pub fn add_term(&mut self, key: DoubleCosetKey, c: Q) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(key).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    pub fn add(&self, other: &HeckeElement) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            out.add_term(*k, *c);
        }
        out
    }

    pub fn scaled(&self, c: Q) -> Self {
        let mut out = HeckeElement::zero();
        for (k, v) in &self.coeffs {
            out.add_term(*k, *v * c);
        }
        out
    }

    /// Total coefficient mass measured in right cosets, with
    /// `mass [ΓσΓ] = [Γ:Γ_σ]`.
    pub fn mass(&self, engine: &CosetEngine) -> Result<Q> {
        let mut m = Q::zero();
        for (k, c) in &self.coeffs {
            m += *c * Q::from_integer(engine.decompose_double_right(&k.rep)?.len() as i64);
        }
        Ok(m)
    }

    /// Text form `c@σ; c@σ; …`, in key order.
    pub fn format(&self, pair: &GroupPair) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.coeffs
            .iter()
            .map(|(k, c)| format!("{}@{}", format_q(c), pair.format_element(&k.rep)))
            .collect::<Vec<_>>()
            .join("; ")
    }

    /// Parses `c@σ; c@σ; …` (a bare `σ` means coefficient 1).
    pub fn parse(engine: &CosetEngine, text: &str) -> Result<Self> {
        let mut out = HeckeElement::zero();
        for term in text.split(';').map(str::trim).filter(|t| !t.is_empty()) {
            if term == "0" {
                continue;
            }
            let (c, g) = match term.split_once('@') {
                Some((c, g)) => (parse_q(c)?, g),
                None => (Q::one(), term),
            };
            let g = engine.pair().parse_element(g)?;
            out.add_term(engine.double_key(&g), c);
        }
        Ok(out)
    }
}

/// `[ΓσΓ] ↦ [Γσ⁻¹Γ]`; rational coefficients are self-conjugate.
pub fn hecke_star(engine: &CosetEngine, h: &HeckeElement) -> HeckeElement {
    let pair = engine.pair();
    let mut out = HeckeElement::zero();
    for (k, c) in h.iter() {
        out.add_term(engine.double_key(&pair.invert(&k.rep)), *c);
    }
    out
}

fn require(v: &CosetVector, side: Side) -> Result<()> {
    if v.side() != side || !v.level().is_gamma() {
        return Err(Error::VectorMismatch(format!("expected a {side}-side vector at level Γ")));
    }
    Ok(())
}

/// `[ΓσΓ][Γx] = Σ_j [Γ r_j x]` over the right cosets `Γr_j ⊆ ΓσΓ`.
pub fn hecke_act_left(engine: &CosetEngine, h: &HeckeElement, v: &CosetVector) -> Result<CosetVector> {
    require(v, Side::Right)?;
    let pair = engine.pair();
    let gamma = Level::gamma();
    let mut out = CosetVector::zero(Side::Right, gamma.clone());
    for (d, c) in h.iter() {
        let reps = engine.decompose_double_right(&d.rep)?;
        for (key, x) in v.iter() {
            for r in &reps {
                out.add_term(engine.canon_coset(Side::Right, &gamma, &pair.mul(&r.rep, &key.rep))?, *c * *x)?;
            }
        }
    }
    Ok(out)
}

/// `[xΓ][ΓσΓ] = Σ_i [x s_i Γ]` over the left cosets `s_iΓ ⊆ ΓσΓ`.
pub fn hecke_act_right(engine: &CosetEngine, h: &HeckeElement, v: &CosetVector) -> Result<CosetVector> {
    require(v, Side::Left)?;
    let pair = engine.pair();
    let gamma = Level::gamma();
    let mut out = CosetVector::zero(Side::Left, gamma.clone());
    for (d, c) in h.iter() {
        let reps = engine.decompose_double_left(&d.rep)?;
        for (key, x) in v.iter() {
            for s in &reps {
                out.add_term(engine.canon_coset(Side::Left, &gamma, &pair.mul(&key.rep, &s.rep))?, *c * *x)?;
            }
        }
    }
    Ok(out)
}

/// Expands `h·[Γ]` into right cosets.
pub fn expand_right(engine: &CosetEngine, h: &HeckeElement) -> Result<CosetVector> {
    let mut out = CosetVector::zero(Side::Right, Level::gamma());
    for (d, c) in h.iter() {
        for k in engine.decompose_double_right(&d.rep)? {
            out.add_term(k, *c)?;
        }
    }
    Ok(out)
}

/// Inverse of [`expand_right`]: checks that the coefficient is constant on
/// the right cosets of each double coset and reads it off.
pub fn regroup(engine: &CosetEngine, v: &CosetVector) -> Result<HeckeElement> {
    require(v, Side::Right)?;
    let doubles: BTreeSet<DoubleCosetKey> = v.iter().map(|(k, _)| engine.double_key(&k.rep)).collect();
    let mut out = HeckeElement::zero();
    for d in doubles {
        let keys = engine.decompose_double_right(&d.rep)?;
        let c = v.coeff(&keys[0]);
        for k in &keys {
            if v.coeff(k) != c {
                return Err(Error::Regrouping(format!(
                    "coefficients {} and {} differ inside {}",
                    format_q(&c),
                    format_q(&v.coeff(k)),
                    d.label(engine.pair())
                )));
            }
        }
        out.add_term(d, c);
    }
    Ok(out)
}

/// Product through the left action on the coset expansion of `h₂·[Γ]`.
pub fn hecke_mul(engine: &CosetEngine, h1: &HeckeElement, h2: &HeckeElement) -> Result<HeckeElement> {
    let acted = hecke_act_left(engine, h1, &expand_right(engine, h2)?)?;
    let out = regroup(engine, &acted)?;
    debug_assert_eq!(acted.mass(), h1.mass(engine)? * h2.mass(engine)?);
    Ok(out)
}

/// Two finite families of pairs standing for `⋃ σ₁Γ₀σ₂` and `⋃ θ₁Γ₀θ₂`
/// at a level `Γ₀`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationInstance {
    pub level: Level,
    pub lhs: Vec<(GroupElement, GroupElement)>,
    pub rhs: Vec<(GroupElement, GroupElement)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    #[serde(default)]
    level: Vec<String>,
    lhs: Vec<[String; 2]>,
    rhs: Vec<[String; 2]>,
}

impl RelationInstance {
    pub fn new(
        level: Level,
        lhs: Vec<(GroupElement, GroupElement)>,
        rhs: Vec<(GroupElement, GroupElement)>,
    ) -> Self {
        RelationInstance { level, lhs, rhs }
    }

    /// Parses the TOML form
    /// `level = ["σ", …]`, `lhs = [["σ₁","σ₂"], …]`, `rhs = [[…], …]`.
    pub fn from_toml(engine: &CosetEngine, text: &str) -> Result<Self> {
        let file: InstanceFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let pair = engine.pair();
        let level = file.level.iter().map(|s| pair.parse_element(s)).collect::<Result<Vec<_>>>()?;
        let terms = |v: &[[String; 2]]| -> Result<Vec<_>> {
            v.iter().map(|[a, b]| Ok((pair.parse_element(a)?, pair.parse_element(b)?))).collect()
        };
        Ok(RelationInstance { level: engine.level(&level), lhs: terms(&file.lhs)?, rhs: terms(&file.rhs)? })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid { witness: String },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

/// Decides whether `⋃ σ₁ⁱΓ₀σ₂ⁱ` is a disjoint union equal to the disjoint
/// union `⋃ θ₁ʲΓ₀θ₂ʲ`. Finite pairs are checked element by element, the
/// modular pair by comparing canonical cosets at a common finer level.
pub fn verify_relation(engine: &CosetEngine, inst: &RelationInstance) -> Result<Verdict> {
    if engine.pair().is_finite() {
        verify_relation_by_elements(engine, inst)
    } else {
        verify_relation_by_cosets(engine, inst)
    }
}

pub fn verify_relation_by_elements(engine: &CosetEngine, inst: &RelationInstance) -> Result<Verdict> {
    let pair = engine.pair();
    let f = pair.finite_backend()?;
    let members: Vec<GroupElement> = f
        .gamma_elements()
        .iter()
        .map(|&x| GroupElement::Perm(x))
        .filter(|x| engine.level_contains(&inst.level, x))
        .collect();
    let union = |terms: &[(GroupElement, GroupElement)], tag: &str| -> std::result::Result<BTreeSet<GroupElement>, String> {
        let mut owner: HashMap<GroupElement, usize> = HashMap::new();
        for (i, (a, b)) in terms.iter().enumerate() {
            for x in &members {
                let y = pair.mul(&pair.mul(a, x), b);
                if let Some(j) = owner.insert(y, i) {
                    return Err(format!(
                        "{} lies in {tag} terms {j} and {i}",
                        pair.format_element(&y)
                    ));
                }
            }
        }
        Ok(owner.into_keys().collect())
    };
    let left = match union(&inst.lhs, "left") {
        Ok(s) => s,
        Err(w) => return Ok(Verdict::Invalid { witness: w }),
    };
    let right = match union(&inst.rhs, "right") {
        Ok(s) => s,
        Err(w) => return Ok(Verdict::Invalid { witness: w }),
    };
    if let Some(x) = left.symmetric_difference(&right).next() {
        return Ok(Verdict::Invalid {
            witness: format!("{} lies in only one side", pair.format_element(x)),
        });
    }
    Ok(Verdict::Valid)
}

/// Coset-granular check: every term `σ₁Γ₀σ₂` is a union of right cosets of
/// `Γ' = ⋂ (Γ_{σ₁} ∩ ⋂ₛ Γ_{σ₁s})` over all left factors, so both sides are
/// compared as multisets of canonical `Γ'`-cosets.
pub fn verify_relation_by_cosets(engine: &CosetEngine, inst: &RelationInstance) -> Result<Verdict> {
    let pair = engine.pair();
    let mut sigmas = Vec::new();
    for (a, _) in inst.lhs.iter().chain(&inst.rhs) {
        sigmas.push(*a);
        sigmas.extend(inst.level.sigmas().iter().map(|s| pair.mul(a, s)));
    }
    let common = engine.level(&sigmas);
    let count = |terms: &[(GroupElement, GroupElement)]| -> Result<BTreeMap<CosetKey, usize>> {
        let mut m = BTreeMap::new();
        for (a, b) in terms {
            for k in engine.right_cosets_in_translate(&common, a, &inst.level)? {
                let key = engine.canon_coset(Side::Right, &common, &pair.mul(&k.rep, b))?;
                *m.entry(key).or_insert(0) += 1;
            }
        }
        Ok(m)
    };
    let left = count(&inst.lhs)?;
    let right = count(&inst.rhs)?;
    for (tag, m) in [("left", &left), ("right", &right)] {
        if let Some((k, _)) = m.iter().find(|(_, &n)| n > 1) {
            return Ok(Verdict::Invalid { witness: format!("coset {} repeats on the {tag} side", k.label(pair)) });
        }
    }
    let l: BTreeSet<_> = left.keys().collect();
    let r: BTreeSet<_> = right.keys().collect();
    if let Some(k) = l.symmetric_difference(&r).next() {
        return Ok(Verdict::Invalid { witness: format!("coset {} lies in only one side", k.label(pair)) });
    }
    Ok(Verdict::Valid)
}

/// An automorphism of `G` preserving `Γ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Automorphism {
    /// Image of every element index.
    Table(Vec<u32>),
    /// `g ↦ xgx⁻¹` for an integral `x` with `det x = ±1`.
    MatrixConjugation(Mat2),
}

impl Automorphism {
    pub fn identity(pair: &GroupPair) -> Result<Self> {
        match pair.backend() {
            Backend::Finite(f) => Ok(Automorphism::Table((0..f.order() as u32).collect())),
            Backend::Modular(_) => Ok(Automorphism::MatrixConjugation(Mat2::IDENTITY)),
        }
    }

    /// Extends `generator_images[i] = θ(gᵢ)` to a homomorphism of a finite
    /// `G`, checking that it is well defined, bijective and preserves `Γ`.
    pub fn from_generator_images(pair: &GroupPair, images: &[GroupElement]) -> Result<Self> {
        let f = pair.finite_backend()?;
        let g = f.group();
        let gens = g.generators();
        if images.len() != gens.len() {
            return Err(Error::AutomorphismNotPreserving("wrong number of generator images".into()));
        }
        let imgs: Vec<u32> = images
            .iter()
            .map(|x| x.as_index().ok_or(Error::BackendMismatch))
            .collect::<Result<_>>()?;
        let n = g.order();
        let mut table: Vec<Option<u32>> = vec![None; n];
        table[0] = Some(0);
        // elements are numbered breadth-first, so each has a parent already mapped
        for x in 0..n as u32 {
            let tx = table[x as usize].ok_or_else(|| Error::AutomorphismNotPreserving("unreachable element".into()))?;
            for (s, &ts) in gens.iter().zip(&imgs) {
                let y = g.mul(x, *s);
                let ty = g.mul(tx, ts);
                match table[y as usize] {
                    None => table[y as usize] = Some(ty),
                    Some(prev) if prev != ty => {
                        return Err(Error::AutomorphismNotPreserving("generator images do not define a homomorphism".into()))
                    }
                    _ => {}
                }
            }
        }
        let table: Vec<u32> = table.into_iter().map(|t| t.unwrap()).collect();
        Self::checked_table(pair, table)
    }

    /// Conjugation by `x`: a permutation in `G` for finite pairs, an integral
    /// matrix of determinant ±1 for the modular pair.
    pub fn conjugation(pair: &GroupPair, x: &str) -> Result<Self> {
        match pair.backend() {
            Backend::Finite(f) => {
                let x = pair.parse_element(x)?;
                let xi = pair.invert(&x);
                let table = (0..f.order() as u32)
                    .map(|g| pair.mul(&pair.mul(&x, &GroupElement::Perm(g)), &xi).as_index().unwrap())
                    .collect();
                Self::checked_table(pair, table)
            }
            Backend::Modular(_) => {
                let m = crate::group::modular::parse_mat2(x)?;
                if m.det().abs() != 1 {
                    return Err(Error::AutomorphismNotPreserving(format!("{m} is not in GL2(Z)")));
                }
                Ok(Automorphism::MatrixConjugation(m))
            }
        }
    }

    fn checked_table(pair: &GroupPair, table: Vec<u32>) -> Result<Self> {
        let f = pair.finite_backend()?;
        let g = f.group();
        let distinct: BTreeSet<u32> = table.iter().copied().collect();
        if distinct.len() != table.len() {
            return Err(Error::AutomorphismNotPreserving("map is not bijective".into()));
        }
        for a in 0..g.order() as u32 {
            for &s in g.generators() {
                if table[g.mul(a, s) as usize] != g.mul(table[a as usize], table[s as usize]) {
                    return Err(Error::AutomorphismNotPreserving("map is not a homomorphism".into()));
                }
            }
        }
        // θ is injective and Γ is finite, so θ(Γ) ⊆ Γ forces equality
        for &x in f.gamma_elements() {
            if !f.contains(table[x as usize]) {
                return Err(Error::AutomorphismNotPreserving(format!(
                    "{} is mapped outside Γ",
                    pair.format_element(&GroupElement::Perm(x))
                )));
            }
        }
        Ok(Automorphism::Table(table))
    }

    pub fn apply(&self, pair: &GroupPair, g: &GroupElement) -> Result<GroupElement> {
        match (self, g) {
            (Automorphism::Table(t), GroupElement::Perm(x)) => Ok(GroupElement::Perm(t[*x as usize])),
            (Automorphism::MatrixConjugation(m), GroupElement::Matrix(y)) => {
                let mg = pair.modular_group()?;
                // x⁻¹ = ±adj(x) and signs are projective
                let prod = m
                    .checked_mul(y)
                    .and_then(|z| z.checked_mul(&m.adjugate()))
                    .ok_or_else(|| Error::InvalidElement("overflow".into()))?;
                Ok(GroupElement::Matrix(mg.element(prod)?))
            }
            _ => Err(Error::BackendMismatch),
        }
    }

    pub fn apply_hecke(&self, engine: &CosetEngine, h: &HeckeElement) -> Result<HeckeElement> {
        let mut out = HeckeElement::zero();
        for (k, c) in h.iter() {
            out.add_term(engine.double_key(&self.apply(engine.pair(), &k.rep)?), *c);
        }
        Ok(out)
    }

    /// Transports a coset vector; the level `Γ₀` goes to `θ(Γ₀)`.
    pub fn apply_vector(&self, engine: &CosetEngine, v: &CosetVector) -> Result<CosetVector> {
        let pair = engine.pair();
        let sigmas = v.level().sigmas().iter().map(|s| self.apply(pair, s)).collect::<Result<Vec<_>>>()?;
        let level = engine.level(&sigmas);
        let mut out = CosetVector::zero(v.side(), level.clone());
        for (k, c) in v.iter() {
            out.add_term(engine.canon_coset(v.side(), &level, &self.apply(pair, &k.rep)?)?, *c)?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::DEFAULT_ORDER_BOUND;
    use crate::scalar::q;

    fn s4() -> CosetEngine {
        CosetEngine::new(
            GroupPair::finite("S4/S3", 4, &["(1 2)", "(1 2 3 4)"], &["(1 2)", "(1 2 3)"], DEFAULT_ORDER_BOUND)
                .unwrap(),
        )
    }

    fn el(e: &CosetEngine, s: &str) -> GroupElement {
        e.pair().parse_element(s).unwrap()
    }

    fn right(e: &CosetEngine, s: &str) -> CosetVector {
        CosetVector::basis(e.canon_coset(Side::Right, &Level::gamma(), &el(e, s)).unwrap())
    }

    #[test]
    fn star() {
        let e = s4();
        let u = HeckeElement::unit(e.pair());
        assert_eq!(hecke_star(&e, &u), u);
        let d = HeckeElement::double(&e, &el(&e, "(1 4)"));
        assert_eq!(hecke_star(&e, &d), d);
        let m = CosetEngine::new(GroupPair::modular(3).unwrap());
        let tp = HeckeElement::double(&m, &el(&m, "diag(3,1)"));
        assert_eq!(hecke_star(&m, &tp), tp);
    }

    #[test]
    fn left_action_examples() {
        let e = s4();
        let v = right(&e, "(1 4)");
        assert_eq!(hecke_act_left(&e, &HeckeElement::unit(e.pair()), &v).unwrap(), v);
        let out = hecke_act_left(&e, &HeckeElement::double(&e, &el(&e, "(1 4)")), &v).unwrap();
        assert_eq!(out.mass(), q(3, 1));
        assert_eq!(out.coeff(&e.canon_coset(Side::Right, &Level::gamma(), &e.pair().identity()).unwrap()), q(1, 1));
        assert_eq!(out.len(), 3);

        let m = CosetEngine::new(GroupPair::modular(5).unwrap());
        let tp = HeckeElement::double(&m, &el(&m, "diag(5,1)"));
        let out = hecke_act_left(&m, &tp, &right(&m, "e")).unwrap();
        let expected: Vec<_> = m.decompose_double_right(&el(&m, "diag(5,1)")).unwrap();
        assert_eq!(out.iter().map(|(k, _)| k.clone()).collect::<Vec<_>>(), expected);
    }

    #[test]
    fn right_action_mirrors_left() {
        let e = s4();
        let v = CosetVector::basis(e.canon_coset(Side::Left, &Level::gamma(), &el(&e, "(1 4)")).unwrap());
        let out = hecke_act_right(&e, &HeckeElement::double(&e, &el(&e, "(1 4)")), &v).unwrap();
        assert_eq!(out.mass(), q(3, 1));
        assert_eq!(out.coeff(&e.canon_coset(Side::Left, &Level::gamma(), &e.pair().identity()).unwrap()), q(1, 1));
        assert!(hecke_act_right(&e, &HeckeElement::unit(e.pair()), &right(&e, "e")).is_err());
    }

    #[test]
    fn structure_constants() {
        let e = s4();
        let d = HeckeElement::double(&e, &el(&e, "(1 4)"));
        let sq = hecke_mul(&e, &d, &d).unwrap();
        let expected = HeckeElement::unit(e.pair()).scaled(q(3, 1)).add(&d.scaled(q(2, 1)));
        assert_eq!(sq, expected);
        for p in [2i64, 3, 5] {
            let m = CosetEngine::new(GroupPair::modular(p).unwrap());
            let tp = HeckeElement::double(&m, &GroupElement::Matrix(Mat2::diag(p, 1)));
            let tp2 = HeckeElement::double(&m, &GroupElement::Matrix(Mat2::diag(p * p, 1)));
            let expected = tp2.add(&HeckeElement::unit(m.pair()).scaled(q(p + 1, 1)));
            assert_eq!(hecke_mul(&m, &tp, &tp).unwrap(), expected);
        }
    }

    #[test]
    fn parse_and_format() {
        let e = s4();
        let h = HeckeElement::parse(&e, "3@(); 2@(1 4)").unwrap();
        assert_eq!(HeckeElement::parse(&e, &h.format(e.pair())).unwrap(), h);
        assert_eq!(HeckeElement::parse(&e, "1/2@(2 4); 1/2@(1 4)").unwrap(), HeckeElement::double(&e, &el(&e, "(1 4)")));
    }

    #[test]
    fn relation_instances() {
        let e = s4();
        let id = e.pair().identity();
        let s = el(&e, "(1 4)");
        let trivial = RelationInstance::new(Level::gamma(), vec![(s, id)], vec![(s, id)]);
        assert!(verify_relation(&e, &trivial).unwrap().is_valid());
        // Γ(14)Γ = ⊔ Γ r_j
        let rhs: Vec<_> = e.decompose_double_right(&s).unwrap().iter().map(|k| (id, k.rep)).collect();
        let inst = RelationInstance::new(Level::gamma(), vec![(id, s)], vec![]);
        let inst = RelationInstance { rhs: rhs.clone(), ..inst };
        // lhs Γ(14) is not the whole double coset
        assert!(!verify_relation(&e, &inst).unwrap().is_valid());
        let whole: Vec<_> = e.decompose_double_left(&s).unwrap().iter().map(|k| (k.rep, id)).collect();
        let inst = RelationInstance::new(Level::gamma(), whole, rhs);
        assert!(verify_relation(&e, &inst).unwrap().is_valid());
        assert!(verify_relation_by_cosets(&e, &inst).unwrap().is_valid());
        let overlap = RelationInstance::new(Level::gamma(), vec![(id, id), (el(&e, "(1 2)"), id)], vec![(id, id)]);
        match verify_relation(&e, &overlap).unwrap() {
            Verdict::Invalid { witness } => assert!(witness.contains("left terms 0 and 1")),
            Verdict::Valid => panic!("overlap accepted"),
        }
        assert!(!verify_relation_by_cosets(&e, &overlap).unwrap().is_valid());
    }

    #[test]
    fn modular_relation_by_cosets() {
        let m = CosetEngine::new(GroupPair::modular(3).unwrap());
        let id = m.pair().identity();
        let s = el(&m, "diag(3,1)");
        let rhs: Vec<_> = m.decompose_double_right(&s).unwrap().iter().map(|k| (id, k.rep)).collect();
        let lhs: Vec<_> = m.decompose_double_left(&s).unwrap().iter().map(|k| (k.rep, id)).collect();
        let inst = RelationInstance::new(Level::gamma(), lhs.clone(), rhs.clone());
        assert!(verify_relation(&m, &inst).unwrap().is_valid());
        let short = RelationInstance::new(Level::gamma(), lhs[..3].to_vec(), rhs);
        assert!(!verify_relation(&m, &short).unwrap().is_valid());
    }

    #[test]
    fn automorphisms() {
        let e = s4();
        let all = [HeckeElement::unit(e.pair()), HeckeElement::double(&e, &el(&e, "(1 4)"))];
        let id = Automorphism::identity(e.pair()).unwrap();
        let inner = Automorphism::conjugation(e.pair(), "(1 2)").unwrap();
        for h in &all {
            assert_eq!(&id.apply_hecke(&e, h).unwrap(), h);
            assert_eq!(&inner.apply_hecke(&e, h).unwrap(), h);
        }
        assert!(matches!(
            Automorphism::conjugation(e.pair(), "(1 4)"),
            Err(Error::AutomorphismNotPreserving(_))
        ));
        let images = [el(&e, "(1 3)"), el(&e, "(1 3 2 4)")];
        let theta = Automorphism::from_generator_images(e.pair(), &images).unwrap();
        assert_eq!(theta, Automorphism::conjugation(e.pair(), "(2 3)").unwrap());
        let bad = [el(&e, "(1 2)"), el(&e, "(1 2)")];
        assert!(Automorphism::from_generator_images(e.pair(), &bad).is_err());

        let m = CosetEngine::new(GroupPair::modular(3).unwrap());
        let flip = Automorphism::conjugation(m.pair(), "[[1,0],[0,-1]]").unwrap();
        let tp = HeckeElement::double(&m, &el(&m, "diag(3,1)"));
        let a = flip.apply_hecke(&m, &hecke_mul(&m, &tp, &tp).unwrap()).unwrap();
        let b = {
            let t = flip.apply_hecke(&m, &tp).unwrap();
            hecke_mul(&m, &t, &t).unwrap()
        };
        assert_eq!(a, b);
        let v = right(&m, "[[1,1],[0,3]]");
        let w = flip.apply_vector(&m, &v).unwrap();
        assert_eq!(w, right(&m, "[[1,2],[0,3]]"));
    }
}
