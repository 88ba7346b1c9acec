//! The modular pair `PSL₂(ℤ) ⊂ PGL₂(ℤ[1/p])`: the operator `T_p`, the coset
//! graph on `Γ\G` (checked to be the `(p+1)`-regular tree on balls), the
//! free-group word labeling of a ball, and truncated adjacency spectra.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::coset::{CosetEngine, CosetKey, CosetVector, Level, Side};
use crate::error::{Error, Result};
use crate::group::{GroupElement, Mat2};
use crate::hecke::{hecke_act_left, hecke_mul, HeckeElement};
use crate::report::CheckRecord;
use crate::scalar::Q;

/// Default radius bound: keeps balls below 10⁵ vertices.
pub fn default_radius_bound(p: i64) -> usize {
    if p <= 3 {
        8
    } else {
        5
    }
}

fn prime(engine: &CosetEngine) -> Result<i64> {
    Ok(engine.pair().modular_group()?.p())
}

/// `T_{p^k} = [Γ diag(p^k, 1) Γ]`.
pub fn t_pk(engine: &CosetEngine, k: u32) -> Result<HeckeElement> {
    let p = prime(engine)?;
    let pk = p.checked_pow(k).ok_or_else(|| Error::InvalidElement("p^k overflows".into()))?;
    Ok(HeckeElement::double(engine, &GroupElement::Matrix(Mat2::diag(pk, 1))))
}

/// `T_p · v`.
pub fn t_p_action(engine: &CosetEngine, v: &CosetVector) -> Result<CosetVector> {
    hecke_act_left(engine, &t_pk(engine, 1)?, v)
}

/// Number of vertices of the radius-`r` ball in the `(q+1)`-regular tree.
pub fn ball_size(q: u64, r: u32) -> u64 {
    if r == 0 {
        return 1;
    }
    1 + (q + 1) * (0..r).map(|i| q.pow(i)).sum::<u64>()
}

/// A ball in the coset graph of `T_p`, rooted at `Γ`.
#[derive(Clone, Debug)]
pub struct TreeBall {
    pub p: i64,
    pub radius: usize,
    /// Breadth-first order; ties broken by sorted keys.
    pub vertices: Vec<CosetKey>,
    pub depth: Vec<usize>,
    /// Sorted neighbor indices inside the ball.
    pub adjacency: Vec<Vec<usize>>,
    index: HashMap<CosetKey, usize>,
}

impl TreeBall {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn index_of(&self, key: &CosetKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.adjacency[v].iter().copied().find(|&u| self.depth[u] + 1 == self.depth[v])
    }

    /// Neighbors of greater depth, in sorted key order.
    pub fn children(&self, v: usize) -> Vec<usize> {
        let mut c: Vec<usize> = self.adjacency[v].iter().copied().filter(|&u| self.depth[u] == self.depth[v] + 1).collect();
        c.sort_by(|&a, &b| self.vertices[a].cmp(&self.vertices[b]));
        c
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Degrees, parent uniqueness, acyclicity and the vertex count.
    pub fn verify(&self) -> Result<()> {
        let q = (self.p + 1) as usize;
        let err = |m: String| Err(Error::TreeInvariant(m));
        let expected = ball_size(self.p as u64, self.radius as u32) as usize;
        if self.len() != expected {
            return err(format!("{} vertices, expected {expected}", self.len()));
        }
        if self.edge_count() + 1 != self.len() {
            return err(format!("{} edges on {} vertices", self.edge_count(), self.len()));
        }
        for v in 0..self.len() {
            let deg = self.adjacency[v].len();
            let up = self.adjacency[v].iter().filter(|&&u| self.depth[u] < self.depth[v]).count();
            let same = self.adjacency[v].iter().filter(|&&u| self.depth[u] == self.depth[v]).count();
            if same > 0 {
                return err(format!("edge inside depth {}", self.depth[v]));
            }
            if v == 0 {
                if self.radius > 0 && deg != q {
                    return err(format!("root degree {deg}"));
                }
            } else {
                if up != 1 {
                    return err(format!("vertex {v} has {up} parents"));
                }
                if self.depth[v] < self.radius && deg != q {
                    return err(format!("interior vertex {v} has degree {deg}"));
                }
                if self.depth[v] == self.radius && deg != 1 {
                    return err(format!("boundary vertex {v} has degree {deg}"));
                }
            }
        }
        Ok(())
    }

    /// Graphviz rendering; vertices labeled by coset key and, if given, word.
    pub fn to_dot(&self, engine: &CosetEngine, words: Option<&FreeWordLabel>) -> String {
        let mut out = String::from("graph ball {\n");
        for (i, k) in self.vertices.iter().enumerate() {
            let mut label = k.label(engine.pair());
            if let Some(w) = words {
                let _ = write!(label, "\\n{}", format_word(&w.words[i]));
            }
            let _ = writeln!(out, "  v{i} [label=\"{label}\"];");
        }
        for (i, nb) in self.adjacency.iter().enumerate() {
            for &j in nb {
                if i < j {
                    let _ = writeln!(out, "  v{i} -- v{j};");
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Breadth-first closure of `[Γ]` under `T_p` up to radius `r`.
pub fn build_tree_ball(engine: &CosetEngine, radius: usize, bound: usize) -> Result<TreeBall> {
    let p = prime(engine)?;
    if radius > bound {
        return Err(Error::RadiusBoundExceeded { radius, bound });
    }
    let gamma = Level::gamma();
    let root = engine.canon_coset(Side::Right, &gamma, &engine.pair().identity())?;
    let mut vertices = vec![root.clone()];
    let mut depth = vec![0usize];
    let mut index = HashMap::from([(root, 0usize)]);
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        let image = t_p_action(engine, &CosetVector::basis(vertices[v].clone()))?;
        for (k, c) in image.iter() {
            if *c != Q::from_integer(1) {
                return Err(Error::TreeInvariant(format!("multiple edge at {}", k.label(engine.pair()))));
            }
            let u = match index.get(k) {
                Some(&u) => u,
                None => {
                    if depth[v] == radius {
                        continue;
                    }
                    vertices.push(k.clone());
                    depth.push(depth[v] + 1);
                    index.insert(k.clone(), vertices.len() - 1);
                    queue.push_back(vertices.len() - 1);
                    vertices.len() - 1
                }
            };
            edges.insert((v.min(u), v.max(u)));
        }
    }
    let mut adjacency = vec![Vec::new(); vertices.len()];
    for (a, b) in edges {
        adjacency[a].push(b);
        adjacency[b].push(a);
    }
    for a in &mut adjacency {
        a.sort_unstable();
    }
    let ball = TreeBall { p, radius, vertices, depth, adjacency, index };
    ball.verify()?;
    Ok(ball)
}

/// A letter `uᵢ` (`i > 0`) or `uᵢ⁻¹` (`-i`).
pub type Letter = i32;

/// Reduced words over `u₁,…,u_N` and inverses, one per ball vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeWordLabel {
    pub rank: usize,
    pub words: Vec<Vec<Letter>>,
}

/// `u₁,…,u_N,u₁⁻¹,…,u_N⁻¹`.
pub fn letters(rank: usize) -> Vec<Letter> {
    let n = rank as i32;
    (1..=n).chain((1..=n).map(|i| -i)).collect()
}

pub fn format_word(w: &[Letter]) -> String {
    if w.is_empty() {
        return "e".to_string();
    }
    w.iter()
        .map(|&l| if l > 0 { format!("u{l}") } else { format!("u{}^-1", -l) })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn is_reduced(w: &[Letter]) -> bool {
    w.windows(2).all(|p| p[0] != -p[1])
}

/// Left multiplication by a letter, reduced.
pub fn left_multiply(l: Letter, w: &[Letter]) -> Vec<Letter> {
    if w.first() == Some(&-l) {
        w[1..].to_vec()
    } else {
        std::iter::once(l).chain(w.iter().copied()).collect()
    }
}

/// All reduced words of length at most `r`.
pub fn reduced_words(rank: usize, r: usize) -> BTreeSet<Vec<Letter>> {
    let mut all = BTreeSet::from([Vec::new()]);
    let mut layer = vec![Vec::new()];
    for _ in 0..r {
        let mut next = Vec::new();
        for w in &layer {
            for l in letters(rank) {
                if w.first() != Some(&-l) {
                    next.push(left_multiply(l, w));
                }
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

/// Labels the ball by reduced words: the root edges get `u₁…u_N` then
/// `u₁⁻¹…u_N⁻¹` in sorted key order, and below a vertex whose word starts
/// with `x` the children get the letters other than `x⁻¹`, prepended.
pub fn build_psi(ball: &TreeBall) -> Result<FreeWordLabel> {
    if ball.p % 2 == 0 {
        return Err(Error::PsiUndefined(ball.p));
    }
    let rank = ((ball.p + 1) / 2) as usize;
    let mut words: Vec<Option<Vec<Letter>>> = vec![None; ball.len()];
    words[0] = Some(Vec::new());
    for v in 0..ball.len() {
        let w = words[v].clone().ok_or_else(|| Error::TreeInvariant("vertex reached before its parent".into()))?;
        let allowed: Vec<Letter> = letters(rank).into_iter().filter(|&l| w.first() != Some(&-l)).collect();
        let children = ball.children(v);
        if !children.is_empty() && children.len() != allowed.len() {
            return Err(Error::TreeInvariant(format!("vertex {v} has {} children", children.len())));
        }
        for (c, l) in children.into_iter().zip(allowed) {
            words[c] = Some(left_multiply(l, &w));
        }
    }
    let words: Vec<Vec<Letter>> = words.into_iter().map(|w| w.unwrap()).collect();
    Ok(FreeWordLabel { rank, words })
}

impl FreeWordLabel {
    /// Injective, reduced, onto the reduced words of length `≤ r`, and
    /// intertwining adjacency with left multiplication by letters.
    pub fn verify(&self, ball: &TreeBall) -> Vec<CheckRecord> {
        let set: BTreeSet<Vec<Letter>> = self.words.iter().cloned().collect();
        let injective = set.len() == self.words.len();
        let reduced = self.words.iter().all(|w| is_reduced(w));
        let exact = set == reduced_words(self.rank, ball.radius);
        let mut intertwining = true;
        let mut witness = String::new();
        for v in 0..ball.len() {
            if ball.depth[v] == ball.radius {
                continue;
            }
            let mut nb: Vec<Vec<Letter>> = ball.adjacency[v].iter().map(|&u| self.words[u].clone()).collect();
            let mut expected: Vec<Vec<Letter>> = letters(self.rank).into_iter().map(|l| left_multiply(l, &self.words[v])).collect();
            nb.sort();
            expected.sort();
            if nb != expected {
                intertwining = false;
                witness = format!("vertex {}", format_word(&self.words[v]));
                break;
            }
        }
        vec![
            CheckRecord::from_bool("Psi injective", "psi", injective, "two vertices share a word"),
            CheckRecord::from_bool("Psi words reduced", "psi", reduced, "unreduced word"),
            CheckRecord::from_bool("Psi image = reduced words of length <= r", "psi", exact, "image differs"),
            CheckRecord::from_bool("Psi intertwines adjacency", "psi", intertwining, witness),
        ]
    }
}

/// Eigenvalues of the ball adjacency, ascending.
pub fn truncated_spectrum(ball: &TreeBall) -> Vec<f64> {
    let n = ball.len();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (i, nb) in ball.adjacency.iter().enumerate() {
        for &j in nb {
            a[(i, j)] = 1.0;
        }
    }
    let mut ev: Vec<f64> = a.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

pub fn spectral_radius(ball: &TreeBall) -> f64 {
    truncated_spectrum(ball).iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Right cosets `Γg` of integral `g` with `det g = p^k`: one per Hermite
/// form, `1 + p + ⋯ + p^k` in all. Dividing out the content lands exactly on
/// the ball vertices of depth `≤ k` and `≡ k (mod 2)`.
pub fn verify_coset_count(engine: &CosetEngine, ball: &TreeBall, k: u32) -> Result<CheckRecord> {
    let m = engine.pair().modular_group()?;
    let p = m.p();
    let forms = m.hermite_forms(k, false);
    let expected: i64 = (0..=k).map(|i| p.pow(i)).sum();
    let gamma = Level::gamma();
    let mut images = BTreeSet::new();
    for f in &forms {
        let g = m.element(*f)?;
        images.insert(engine.canon_coset(Side::Right, &gamma, &GroupElement::Matrix(g))?);
    }
    let target: BTreeSet<CosetKey> = (0..ball.len())
        .filter(|&v| ball.depth[v] <= k as usize && (k as usize - ball.depth[v]).is_multiple_of(2))
        .map(|v| ball.vertices[v].clone())
        .collect();
    let ok = forms.len() as i64 == expected && images.len() == forms.len() && images == target;
    Ok(CheckRecord::from_bool(
        format!("p={p}: det p^{k} right cosets = 1+...+p^{k} = ball depths <= {k} of parity {k}"),
        "coset-count",
        ok,
        format!("{} forms, {} images, {} ball vertices, expected {expected}", forms.len(), images.len(), target.len()),
    ))
}

/// `T_p·T_p = T_{p²} + (p+1)[Γ]` and `T_p·T_{p^k} = T_{p^{k+1}} + p·T_{p^{k-1}}`.
pub fn verify_hecke_recursion(engine: &CosetEngine, k: u32) -> Result<CheckRecord> {
    let p = prime(engine)?;
    let lhs = hecke_mul(engine, &t_pk(engine, 1)?, &t_pk(engine, k)?)?;
    let lower = if k == 1 {
        HeckeElement::unit(engine.pair()).scaled(Q::from_integer(p + 1))
    } else {
        t_pk(engine, k - 1)?.scaled(Q::from_integer(p))
    };
    let rhs = t_pk(engine, k + 1)?.add(&lower);
    Ok(CheckRecord::from_bool(
        format!("p={p}: T_p T_p^{k} recursion"),
        "hecke-recursion",
        lhs == rhs,
        format!("got {}", lhs.format(engine.pair())),
    ))
}

/// Spectral radii for `r = 0..=max_r`; each below `2√p` and nondecreasing.
pub fn verify_spectrum(engine: &CosetEngine, max_r: usize, bound: usize) -> Result<(Vec<f64>, CheckRecord)> {
    let p = prime(engine)?;
    let limit = 2.0 * (p as f64).sqrt();
    let mut radii = Vec::new();
    for r in 0..=max_r {
        radii.push(spectral_radius(&build_tree_ball(engine, r, bound)?));
    }
    let below = radii.iter().all(|&x| x < limit);
    let monotone = radii.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    let listing = radii.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(", ");
    Ok((
        radii.clone(),
        CheckRecord::from_bool(
            format!("p={p}: spectral radius < 2 sqrt(p), nondecreasing for r <= {max_r}"),
            "spectrum",
            below && monotone,
            format!("radii [{listing}] vs {limit:.6}"),
        ),
    ))
}

/// Depth histogram, for display.
pub fn depth_counts(ball: &TreeBall) -> BTreeMap<usize, usize> {
    let mut m = BTreeMap::new();
    for &d in &ball.depth {
        *m.entry(d).or_insert(0) += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupPair;

    fn engine(p: i64) -> CosetEngine {
        CosetEngine::new(GroupPair::modular(p).unwrap())
    }

    #[test]
    fn t_p_on_the_root() {
        let e = engine(3);
        let root = CosetVector::basis(e.canon_coset(Side::Right, &Level::gamma(), &e.pair().identity()).unwrap());
        let once = t_p_action(&e, &root).unwrap();
        assert_eq!(once.len(), 4);
        let twice = t_p_action(&e, &once).unwrap();
        assert_eq!(twice.coeff(root.iter().next().unwrap().0), Q::from_integer(4));
        let zero = CosetVector::zero(Side::Right, Level::gamma());
        assert!(t_p_action(&e, &zero).unwrap().is_zero());
        assert!(t_p_action(&CosetEngine::new(GroupPair::finite("Z2", 2, &["(1 2)"], &[], 10).unwrap()), &zero).is_err());
    }

    #[test]
    fn ball_sizes() {
        let e = engine(3);
        assert_eq!(build_tree_ball(&e, 0, 8).unwrap().len(), 1);
        assert_eq!(build_tree_ball(&e, 2, 8).unwrap().len(), 17);
        assert_eq!(build_tree_ball(&engine(5), 3, 5).unwrap().len(), 187);
        assert!(matches!(build_tree_ball(&e, 9, 8), Err(Error::RadiusBoundExceeded { .. })));
        assert_eq!(ball_size(3, 4), 161);
    }

    #[test]
    fn depth_is_the_determinant_exponent() {
        let e = engine(2);
        let ball = build_tree_ball(&e, 4, 8).unwrap();
        let m = e.pair().modular_group().unwrap();
        for (k, d) in ball.vertices.iter().zip(&ball.depth) {
            assert_eq!(m.det_exponent(&k.rep.as_matrix().unwrap()) as usize, *d);
        }
    }

    #[test]
    fn psi_labels() {
        let ball = build_tree_ball(&engine(3), 2, 8).unwrap();
        let psi = build_psi(&ball).unwrap();
        assert_eq!(psi.words[0], Vec::<Letter>::new());
        assert_eq!(psi.words.len(), 17);
        for r in psi.verify(&ball) {
            assert!(r.passed(), "{r:?}");
        }
        let root_words: Vec<_> = ball.children(0).iter().map(|&c| psi.words[c].clone()).collect();
        assert_eq!(root_words, vec![vec![1], vec![2], vec![-1], vec![-2]]);
        let zero = build_tree_ball(&engine(3), 0, 8).unwrap();
        assert_eq!(build_psi(&zero).unwrap().words, vec![Vec::<Letter>::new()]);
        assert!(matches!(build_psi(&build_tree_ball(&engine(2), 2, 8).unwrap()), Err(Error::PsiUndefined(2))));
    }

    #[test]
    fn words() {
        assert_eq!(reduced_words(2, 2).len(), 17);
        assert_eq!(left_multiply(-1, &[1, 2]), vec![2]);
        assert!(!is_reduced(&[1, -1]));
        assert_eq!(format_word(&[1, -2]), "u1 u2^-1");
    }

    #[test]
    fn spectrum_small_radii() {
        let e = engine(3);
        assert_eq!(truncated_spectrum(&build_tree_ball(&e, 0, 8).unwrap()), vec![0.0]);
        let star = spectral_radius(&build_tree_ball(&e, 1, 8).unwrap());
        assert!((star - 2.0).abs() < 1e-12);
        let (_, rec) = verify_spectrum(&e, 3, 8).unwrap();
        assert!(rec.passed(), "{rec:?}");
    }

    #[test]
    fn counts_and_recursion() {
        for p in [2i64, 3] {
            let e = engine(p);
            let ball = build_tree_ball(&e, 3, 8).unwrap();
            for k in 0..=3 {
                assert!(verify_coset_count(&e, &ball, k).unwrap().passed());
            }
            for k in 1..=2 {
                assert!(verify_hecke_recursion(&e, k).unwrap().passed());
            }
        }
    }

    #[test]
    fn dot_export() {
        let e = engine(3);
        let ball = build_tree_ball(&e, 1, 8).unwrap();
        let psi = build_psi(&ball).unwrap();
        let dot = ball.to_dot(&e, Some(&psi));
        assert_eq!(dot.matches(" -- ").count(), 4);
        assert!(dot.contains("u2^-1"));
    }
}
