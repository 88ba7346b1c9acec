//! Group pairs `Γ ⊂ G` behind a uniform interface.
//!
//! Two backends are supported: finite permutation groups (fully enumerated)
//! and the projective modular group of integral matrices with determinant a
//! power of `p`, with `Γ = PSL₂(ℤ)`.

pub mod modular;
pub mod perm;

use std::collections::BTreeSet;

pub use modular::{Mat2, ModularGroup};
pub use perm::{FiniteGroup, Perm, DEFAULT_ORDER_BOUND};

use crate::error::{Error, Result};

/// A canonical group element: an index into the enumerated element table or a
/// normalized matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Perm(u32),
    Matrix(Mat2),
}

impl GroupElement {
    pub fn as_index(&self) -> Option<u32> {
        match self {
            GroupElement::Perm(i) => Some(*i),
            GroupElement::Matrix(_) => None,
        }
    }

    pub fn as_matrix(&self) -> Option<Mat2> {
        match self {
            GroupElement::Matrix(m) => Some(*m),
            GroupElement::Perm(_) => None,
        }
    }
}

/// A finite group with an enumerated subgroup `Γ` and precomputed coset tables.
#[derive(Debug, Clone)]
pub struct FiniteBackend {
    group: FiniteGroup,
    gamma_generators: Vec<u32>,
    gamma_elements: Vec<u32>,
    in_gamma: Vec<bool>,
    right_canon: Vec<u32>,
    left_canon: Vec<u32>,
    double_canon: Vec<u32>,
}

impl FiniteBackend {
    pub fn new(group: FiniteGroup, gamma_generators: Vec<u32>) -> Result<Self> {
        let n = group.order();
        // closure of the Γ generators inside G
        let mut in_gamma = vec![false; n];
        in_gamma[0] = true;
        let mut gamma_elements = vec![0u32];
        let mut i = 0;
        while i < gamma_elements.len() {
            for &s in &gamma_generators {
                let x = group.mul(gamma_elements[i], s);
                if !in_gamma[x as usize] {
                    in_gamma[x as usize] = true;
                    gamma_elements.push(x);
                }
            }
            i += 1;
        }
        for &a in &gamma_elements {
            if !in_gamma[group.inv(a) as usize] {
                return Err(Error::NotASubgroup("generated set is not closed under inverses".into()));
            }
            for &b in &gamma_elements {
                if !in_gamma[group.mul(a, b) as usize] {
                    return Err(Error::NotASubgroup("generated set is not closed under products".into()));
                }
            }
        }
        gamma_elements.sort_unstable();

        let orbit_min = |act: &dyn Fn(u32, u32) -> u32, gens: &[u32]| -> Vec<u32> {
            let mut canon = vec![u32::MAX; n];
            for start in 0..n as u32 {
                if canon[start as usize] != u32::MAX {
                    continue;
                }
                let mut orbit = vec![start];
                canon[start as usize] = start;
                let mut j = 0;
                while j < orbit.len() {
                    for &s in gens {
                        let y = act(s, orbit[j]);
                        if canon[y as usize] == u32::MAX {
                            canon[y as usize] = start;
                            orbit.push(y);
                        }
                    }
                    j += 1;
                }
                // `start` is the smallest index in its orbit since scanning is ascending
            }
            canon
        };
        let right_canon = orbit_min(&|s, x| group.mul(s, x), &gamma_generators);
        let left_canon = orbit_min(&|s, x| group.mul(x, s), &gamma_generators);
        let both = |s: u32, x: u32| -> u32 {
            // the first k pseudo-generators act on the left, the rest on the right
            let k = gamma_generators.len() as u32;
            if s < k {
                group.mul(gamma_generators[s as usize], x)
            } else {
                group.mul(x, gamma_generators[(s - k) as usize])
            }
        };
        let pseudo: Vec<u32> = (0..2 * gamma_generators.len() as u32).collect();
        let double_canon = orbit_min(&both, &pseudo);

        Ok(FiniteBackend {
            group,
            gamma_generators,
            gamma_elements,
            in_gamma,
            right_canon,
            left_canon,
            double_canon,
        })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn gamma_order(&self) -> usize {
        self.gamma_elements.len()
    }

    /// Elements of `Γ` in ascending index order.
    pub fn gamma_elements(&self) -> &[u32] {
        &self.gamma_elements
    }

    pub fn contains(&self, g: u32) -> bool {
        self.in_gamma[g as usize]
    }

    /// Smallest index in `Γg`.
    pub fn right_canon(&self, g: u32) -> u32 {
        self.right_canon[g as usize]
    }

    /// Smallest index in `gΓ`.
    pub fn left_canon(&self, g: u32) -> u32 {
        self.left_canon[g as usize]
    }

    /// Smallest index in `ΓgΓ`.
    pub fn double_canon(&self, g: u32) -> u32 {
        self.double_canon[g as usize]
    }

    /// Elements of the double coset `ΓgΓ`, ascending.
    pub fn double_coset_elements(&self, g: u32) -> Vec<u32> {
        let c = self.double_canon(g);
        (0..self.order() as u32).filter(|&x| self.double_canon[x as usize] == c).collect()
    }
}

#[derive(Debug, Clone)]
pub enum Backend {
    Finite(Box<FiniteBackend>),
    Modular(ModularGroup),
}

/// A group `G` together with its subgroup `Γ`.
#[derive(Debug, Clone)]
pub struct GroupPair {
    name: String,
    backend: Backend,
}

impl GroupPair {
    /// Builds a finite pair from permutation generators in cycle notation.
    pub fn finite(
        name: impl Into<String>,
        degree: usize,
        generators: &[&str],
        gamma_generators: &[&str],
        order_bound: usize,
    ) -> Result<Self> {
        let gens = generators
            .iter()
            .map(|s| perm::parse_cycles(s, degree))
            .collect::<Result<Vec<_>>>()?;
        let group = FiniteGroup::generate(degree, &gens, order_bound)?;
        let gamma_gens = gamma_generators
            .iter()
            .map(|s| {
                let p = perm::parse_cycles(s, degree)?;
                group
                    .index_of(&p)
                    .ok_or_else(|| Error::NotASubgroup(format!("Γ generator {s} is not in G")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GroupPair {
            name: name.into(),
            backend: Backend::Finite(Box::new(FiniteBackend::new(group, gamma_gens)?)),
        })
    }

    pub fn modular(p: i64) -> Result<Self> {
        Ok(GroupPair {
            name: format!("PSL2(Z) in PGL2(Z[1/{p}])"),
            backend: Backend::Modular(ModularGroup::new(p)?),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn finite_backend(&self) -> Result<&FiniteBackend> {
        match &self.backend {
            Backend::Finite(f) => Ok(f),
            Backend::Modular(_) => Err(Error::UnsupportedBackend("finite")),
        }
    }

    pub fn modular_group(&self) -> Result<&ModularGroup> {
        match &self.backend {
            Backend::Modular(m) => Ok(m),
            Backend::Finite(_) => Err(Error::UnsupportedBackend("modular")),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.backend, Backend::Finite(_))
    }

    pub fn identity(&self) -> GroupElement {
        match &self.backend {
            Backend::Finite(_) => GroupElement::Perm(0),
            Backend::Modular(_) => GroupElement::Matrix(Mat2::IDENTITY),
        }
    }

    /// Checks that `g` is a valid canonical element of this pair's group.
    pub fn check(&self, g: &GroupElement) -> Result<()> {
        match (&self.backend, g) {
            (Backend::Finite(f), GroupElement::Perm(i)) if (*i as usize) < f.order() => Ok(()),
            (Backend::Finite(_), GroupElement::Perm(i)) => {
                Err(Error::InvalidElement(format!("element index {i} out of range")))
            }
            (Backend::Modular(m), GroupElement::Matrix(x)) => {
                if m.element(*x)? == *x {
                    Ok(())
                } else {
                    Err(Error::InvalidElement(format!("{x} is not in canonical form")))
                }
            }
            _ => Err(Error::BackendMismatch),
        }
    }

    /// Checked product.
    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        match (&self.backend, a, b) {
            (Backend::Finite(f), GroupElement::Perm(x), GroupElement::Perm(y)) => {
                Ok(GroupElement::Perm(f.group.mul(*x, *y)))
            }
            (Backend::Modular(m), GroupElement::Matrix(x), GroupElement::Matrix(y)) => {
                Ok(GroupElement::Matrix(m.try_mul(x, y)?))
            }
            _ => Err(Error::BackendMismatch),
        }
    }

    /// Product of elements already known to belong to this pair.
    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.multiply(a, b).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn invert(&self, a: &GroupElement) -> GroupElement {
        match (&self.backend, a) {
            (Backend::Finite(f), GroupElement::Perm(x)) => GroupElement::Perm(f.group.inv(*x)),
            (Backend::Modular(m), GroupElement::Matrix(x)) => GroupElement::Matrix(m.inv(x)),
            _ => panic!("{}", Error::BackendMismatch),
        }
    }

    pub fn in_gamma(&self, g: &GroupElement) -> bool {
        match (&self.backend, g) {
            (Backend::Finite(f), GroupElement::Perm(x)) => f.contains(*x),
            (Backend::Modular(m), GroupElement::Matrix(x)) => m.det_exponent(x) == 0,
            _ => false,
        }
    }

    /// Every element of a finite `G`, each exactly once.
    pub fn enumerate(&self) -> Result<Vec<GroupElement>> {
        let f = self.finite_backend()?;
        Ok((0..f.order() as u32).map(GroupElement::Perm).collect())
    }

    pub fn order(&self) -> Option<usize> {
        self.finite_backend().ok().map(|f| f.order())
    }

    pub fn gamma_order(&self) -> Option<usize> {
        self.finite_backend().ok().map(|f| f.gamma_order())
    }

    /// Generators of `G`: the configured ones for finite pairs, `S`, `T` and
    /// `diag(p,1)` for the modular pair.
    pub fn generators(&self) -> Vec<GroupElement> {
        match &self.backend {
            Backend::Finite(f) => f.group.generators().iter().map(|&g| GroupElement::Perm(g)).collect(),
            Backend::Modular(m) => {
                let mut gens: Vec<_> = m.gamma_generators().into_iter().map(GroupElement::Matrix).collect();
                gens.push(GroupElement::Matrix(Mat2::diag(m.p(), 1)));
                gens
            }
        }
    }

    /// Generators of `Γ`.
    pub fn gamma_generators(&self) -> Vec<GroupElement> {
        match &self.backend {
            Backend::Finite(f) => f.gamma_generators.iter().map(|&g| GroupElement::Perm(g)).collect(),
            Backend::Modular(m) => m.gamma_generators().into_iter().map(GroupElement::Matrix).collect(),
        }
    }

    /// Canonical representative of the right coset `Γg`.
    pub fn canon_right_gamma(&self, g: &GroupElement) -> GroupElement {
        match (&self.backend, g) {
            (Backend::Finite(f), GroupElement::Perm(x)) => GroupElement::Perm(f.right_canon(*x)),
            (Backend::Modular(m), GroupElement::Matrix(x)) => GroupElement::Matrix(m.hnf_right(x)),
            _ => panic!("{}", Error::BackendMismatch),
        }
    }

    /// Canonical representative of the left coset `gΓ`.
    pub fn canon_left_gamma(&self, g: &GroupElement) -> GroupElement {
        match (&self.backend, g) {
            (Backend::Finite(f), GroupElement::Perm(x)) => GroupElement::Perm(f.left_canon(*x)),
            (Backend::Modular(m), GroupElement::Matrix(x)) => GroupElement::Matrix(m.hnf_left(x)),
            _ => panic!("{}", Error::BackendMismatch),
        }
    }

    /// Canonical representative of the double coset `ΓgΓ`.
    pub fn canon_double(&self, g: &GroupElement) -> GroupElement {
        match (&self.backend, g) {
            (Backend::Finite(f), GroupElement::Perm(x)) => GroupElement::Perm(f.double_canon(*x)),
            (Backend::Modular(m), GroupElement::Matrix(x)) => GroupElement::Matrix(m.smith(x)),
            _ => panic!("{}", Error::BackendMismatch),
        }
    }

    /// Canonical representatives of the right cosets `Γx` contained in `ΓσΓ`,
    /// sorted. Finite backend: by enumerating the double coset; modular
    /// backend: by listing the primitive Hermite forms of determinant `det σ`.
    pub fn right_cosets_in_double(&self, sigma: &GroupElement) -> Vec<GroupElement> {
        match (&self.backend, sigma) {
            (Backend::Finite(f), GroupElement::Perm(x)) => {
                let reps: BTreeSet<u32> =
                    f.double_coset_elements(*x).into_iter().map(|y| f.right_canon(y)).collect();
                reps.into_iter().map(GroupElement::Perm).collect()
            }
            (Backend::Modular(m), GroupElement::Matrix(x)) => m
                .hermite_forms(m.det_exponent(x), true)
                .into_iter()
                .map(GroupElement::Matrix)
                .collect(),
            _ => panic!("{}", Error::BackendMismatch),
        }
    }

    /// The anti-automorphism used to transport right cosets to left cosets:
    /// inversion for finite groups, transposition for matrices. Both preserve
    /// `Γ` and are involutions.
    pub fn flip(&self, g: &GroupElement) -> GroupElement {
        match g {
            GroupElement::Perm(_) => self.invert(g),
            GroupElement::Matrix(m) => GroupElement::Matrix(m.transpose().normalized()),
        }
    }

    /// Parses cycle notation or a matrix; `e` denotes the identity.
    pub fn parse_element(&self, text: &str) -> Result<GroupElement> {
        if text.trim() == "e" {
            return Ok(self.identity());
        }
        match &self.backend {
            Backend::Finite(f) => {
                let p = perm::parse_cycles(text, f.group.degree())?;
                f.group
                    .index_of(&p)
                    .map(GroupElement::Perm)
                    .ok_or_else(|| Error::InvalidElement(format!("{text} is not in G")))
            }
            Backend::Modular(m) => Ok(GroupElement::Matrix(m.element(modular::parse_mat2(text)?)?)),
        }
    }

    pub fn format_element(&self, g: &GroupElement) -> String {
        match (&self.backend, g) {
            (Backend::Finite(f), GroupElement::Perm(x)) => perm::format_cycles(f.group.perm(*x)),
            (_, GroupElement::Matrix(m)) => m.to_string(),
            (_, GroupElement::Perm(x)) => format!("#{x}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn s4_s3() -> GroupPair {
        GroupPair::finite("S4/S3", 4, &["(1 2)", "(1 2 3 4)"], &["(1 2)", "(1 2 3)"], DEFAULT_ORDER_BOUND)
            .unwrap()
    }

    #[test]
    fn membership() {
        let pair = s4_s3();
        assert!(pair.in_gamma(&pair.identity()));
        assert!(pair.in_gamma(&pair.parse_element("(1 2)").unwrap()));
        assert!(!pair.in_gamma(&pair.parse_element("(1 4)").unwrap()));
        let m = GroupPair::modular(3).unwrap();
        assert!(m.in_gamma(&m.identity()));
        assert!(!m.in_gamma(&m.parse_element("diag(3,1)").unwrap()));
    }

    #[test]
    fn enumeration() {
        let pair = s4_s3();
        let all = pair.enumerate().unwrap();
        assert_eq!(all.len(), 24);
        assert_eq!(pair.gamma_order(), Some(6));
        let s3 = GroupPair::finite("S3", 3, &["(1 2)", "(1 2 3)"], &["(1 2)"], 100).unwrap();
        assert_eq!(s3.enumerate().unwrap().len(), 6);
        let triv = GroupPair::finite("1", 3, &[], &[], 100).unwrap();
        assert_eq!(triv.enumerate().unwrap().len(), 1);
        assert!(matches!(GroupPair::modular(2).unwrap().enumerate(), Err(Error::UnsupportedBackend(_))));
    }

    #[test]
    fn backend_mismatch_is_an_error() {
        let a = s4_s3();
        let m = GroupPair::modular(2).unwrap();
        assert!(matches!(a.multiply(&a.identity(), &m.identity()), Err(Error::BackendMismatch)));
    }

    #[test]
    fn gamma_generator_outside_g_is_rejected() {
        let r = GroupPair::finite("bad", 4, &["(1 2 3)"], &["(1 2)"], 100);
        assert!(matches!(r, Err(Error::NotASubgroup(_))));
    }

    #[test]
    fn coset_tables_partition_s4() {
        let pair = s4_s3();
        let f = pair.finite_backend().unwrap();
        let right: BTreeSet<u32> = (0..24).map(|g| f.right_canon(g)).collect();
        let left: BTreeSet<u32> = (0..24).map(|g| f.left_canon(g)).collect();
        let double: BTreeSet<u32> = (0..24).map(|g| f.double_canon(g)).collect();
        assert_eq!((right.len(), left.len(), double.len()), (4, 4, 2));
    }

    #[test]
    fn format_round_trip() {
        let pair = s4_s3();
        for g in pair.enumerate().unwrap() {
            assert_eq!(pair.parse_element(&pair.format_element(&g)).unwrap(), g);
        }
    }
}
