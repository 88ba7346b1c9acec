//! Matrix coefficients of a unitary extension `π` of the left regular
//! representation of a finite `Γ` to `G`, the elements `t^A`, and the
//! operator identities they satisfy on `ℓ²(G)`.
//!
//! Operators on `ℓ²(G)` are dense matrices indexed by element index:
//! `L_a f = a * f`, `R_b f = f * b`, `M_χ` multiplies by an indicator and
//! `P` is `M_{χ_Γ}`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use nalgebra::DMatrix;
use num_traits::One;
use serde::Deserialize;

use crate::coset::{CosetEngine, CosetKey, Level, Side};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupElement, GroupPair};
use crate::hecke::{hecke_mul, HeckeElement, RelationInstance};
use crate::report::CheckRecord;
use crate::scalar::{Scalar, C64, Q, TOL};

pub type CMatrix = DMatrix<C64>;

/// A function on a finite `G`, stored densely by element index.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvElement<S = C64> {
    values: Vec<S>,
}

impl<S: Scalar> ConvElement<S> {
    pub fn zero(n: usize) -> Self {
        ConvElement { values: vec![S::zero(); n] }
    }

    pub fn delta(n: usize, g: u32) -> Self {
        let mut x = Self::zero(n);
        x.values[g as usize] = S::one();
        x
    }

    pub fn from_values(values: Vec<S>) -> Self {
        ConvElement { values }
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn get(&self, g: u32) -> S {
        self.values[g as usize].clone()
    }

    pub fn add_at(&mut self, g: u32, c: S) {
        let slot = &mut self.values[g as usize];
        *slot = slot.clone() + c;
    }

    pub fn support(&self) -> Vec<u32> {
        (0..self.values.len() as u32).filter(|&g| !self.values[g as usize].is_zero()).collect()
    }

    /// `(a * b)(x) = Σ_{yz = x} a(y) b(z)`.
    pub fn conv(&self, group: &FiniteGroup, other: &Self) -> Self {
        let mut out = Self::zero(self.values.len());
        let right = other.support();
        for y in self.support() {
            for &z in &right {
                out.add_at(group.mul(y, z), self.get(y) * other.get(z));
            }
        }
        out
    }

    /// `x* = Σ conj(x(g)) g⁻¹`.
    pub fn adjoint(&self, group: &FiniteGroup) -> Self {
        let mut out = Self::zero(self.values.len());
        for g in self.support() {
            out.values[group.inv(g) as usize] = self.values[g as usize].conj();
        }
        out
    }

    /// `τ(x)`, the coefficient of the identity.
    pub fn trace(&self) -> S {
        self.values[0].clone()
    }

    pub fn add(&self, other: &Self) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a.clone() + b.clone()).collect();
        ConvElement { values }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a.clone() - b.clone()).collect();
        ConvElement { values }
    }

    pub fn scale(&self, c: S) -> Self {
        ConvElement { values: self.values.iter().map(|a| a.clone() * c.clone()).collect() }
    }
}

impl ConvElement<C64> {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn left_matrix(&self, group: &FiniteGroup) -> CMatrix {
        let n = self.values.len();
        let mut m = CMatrix::zeros(n, n);
        for c in self.support() {
            for y in 0..n as u32 {
                m[(group.mul(c, y) as usize, y as usize)] += self.get(c);
            }
        }
        m
    }

    pub fn right_matrix(&self, group: &FiniteGroup) -> CMatrix {
        let n = self.values.len();
        let mut m = CMatrix::zeros(n, n);
        for c in self.support() {
            for y in 0..n as u32 {
                m[(group.mul(y, c) as usize, y as usize)] += self.get(c);
            }
        }
        m
    }
}

impl From<&ConvElement<Q>> for ConvElement<C64> {
    fn from(x: &ConvElement<Q>) -> Self {
        let f = |q: &Q| *q.numer() as f64 / *q.denom() as f64;
        ConvElement { values: x.values.iter().map(|q| C64::new(f(q), 0.0)).collect() }
    }
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Multiplication by the indicator of `set`.
pub fn indicator_matrix(n: usize, set: &[u32]) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for &x in set {
        m[(x as usize, x as usize)] = C64::one();
    }
    m
}

/// `P = M_{χ_Γ}`.
pub fn gamma_projection(pair: &GroupPair) -> Result<CMatrix> {
    let f = pair.finite_backend()?;
    Ok(indicator_matrix(f.order(), f.gamma_elements()))
}

/// Minimum eigenvalue and Hermitian defect of a square matrix.
pub fn psd_profile(m: &CMatrix) -> (f64, f64) {
    let herm = max_abs(&(m - m.adjoint()));
    let sym = (m + m.adjoint()).scale(0.5);
    let min = if sym.nrows() == 0 {
        0.0
    } else {
        sym.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    };
    (min, herm)
}

pub fn operator_norm(m: &CMatrix) -> f64 {
    m.clone().svd(false, false).singular_values.iter().copied().fold(0.0, f64::max)
}

/// A unit-modulus 2-cocycle `ε` on `G`.
#[derive(Clone, Debug, PartialEq)]
pub enum Cocycle {
    Trivial,
    /// `ε(g,h)` at `g·n + h`.
    Table(Vec<C64>),
}

impl Cocycle {
    pub fn value(&self, n: usize, g: u32, h: u32) -> C64 {
        match self {
            Cocycle::Trivial => C64::one(),
            Cocycle::Table(t) => t[g as usize * n + h as usize],
        }
    }

    /// Largest deviation from `ε(g,h)ε(gh,k) = ε(g,hk)ε(h,k)`.
    pub fn identity_defect(&self, group: &FiniteGroup) -> f64 {
        let n = group.order();
        if matches!(self, Cocycle::Trivial) {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for g in 0..n as u32 {
            for h in 0..n as u32 {
                for k in 0..n as u32 {
                    let l = self.value(n, g, h) * self.value(n, group.mul(g, h), k);
                    let r = self.value(n, g, group.mul(h, k)) * self.value(n, h, k);
                    worst = worst.max((l - r).norm());
                }
            }
        }
        worst
    }
}

/// `π` on `ℓ²(Γ)`, given on elements generating `G` and extended along a
/// breadth-first spanning tree.
#[derive(Clone, Debug)]
pub struct UnitaryExtension {
    basis: Vec<u32>,
    position: HashMap<u32, usize>,
    generators: Vec<(u32, CMatrix)>,
    cocycle: Cocycle,
    matrices: Vec<CMatrix>,
}

/// Maximum deviations of the three defining properties.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionReport {
    pub unitarity: f64,
    pub regularity: f64,
    pub multiplicativity: f64,
    pub cocycle: f64,
}

impl ExtensionReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.unitarity < tol && self.regularity < tol && self.multiplicativity < tol && self.cocycle < tol
    }

    pub fn records(&self, tol: f64) -> Vec<CheckRecord> {
        vec![
            CheckRecord::numeric("pi unitary", "extension", self.unitarity, tol, None),
            CheckRecord::numeric("pi restricts to the regular representation", "extension", self.regularity, tol, None),
            CheckRecord::numeric("pi multiplicative up to the cocycle", "extension", self.multiplicativity, tol, None),
            CheckRecord::numeric("cocycle identity", "extension", self.cocycle, tol, None),
        ]
    }
}

impl UnitaryExtension {
    /// `basis` lists every element of `Γ` once and fixes the δ-basis order;
    /// `generators` pairs elements generating `G` with their matrices.
    pub fn new(pair: &GroupPair, basis: Vec<u32>, generators: Vec<(u32, CMatrix)>, cocycle: Cocycle) -> Result<Self> {
        let f = pair.finite_backend()?;
        let g = f.group();
        let d = f.gamma_order();
        let position: HashMap<u32, usize> = basis.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let listed: BTreeSet<u32> = basis.iter().copied().collect();
        let gamma: BTreeSet<u32> = f.gamma_elements().iter().copied().collect();
        if basis.len() != d || listed != gamma {
            return Err(Error::Representation("basis must list every element of Γ exactly once".into()));
        }
        for (_, m) in &generators {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::Representation(format!("matrix is {}x{}, expected {d}x{d}", m.nrows(), m.ncols())));
            }
        }
        if let Cocycle::Table(t) = &cocycle {
            if t.len() != g.order() * g.order() {
                return Err(Error::Representation("cocycle table has the wrong size".into()));
            }
        }
        let n = g.order();
        let mut matrices: Vec<Option<CMatrix>> = vec![None; n];
        matrices[0] = Some(CMatrix::identity(d, d));
        let mut queue = std::collections::VecDeque::from([0u32]);
        while let Some(x) = queue.pop_front() {
            for (s, ms) in &generators {
                let y = g.mul(x, *s);
                if matrices[y as usize].is_none() {
                    let eps = cocycle.value(n, x, *s).conj();
                    matrices[y as usize] = Some(matrices[x as usize].as_ref().unwrap() * ms * eps);
                    queue.push_back(y);
                }
            }
        }
        if matrices.iter().any(Option::is_none) {
            return Err(Error::Representation("the listed elements do not generate G".into()));
        }
        Ok(UnitaryExtension {
            basis,
            position,
            generators,
            cocycle,
            matrices: matrices.into_iter().map(Option::unwrap).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[u32] {
        &self.basis
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    pub fn generators(&self) -> &[(u32, CMatrix)] {
        &self.generators
    }

    /// `π(g)`.
    pub fn matrix(&self, g: u32) -> &CMatrix {
        &self.matrices[g as usize]
    }

    /// `π(σ)δ_e` read as the element `Σ_γ v(γ) γ` of the group algebra.
    pub fn vector_element(&self, n: usize, sigma: u32) -> ConvElement<C64> {
        let col = self.matrices[sigma as usize].column(self.position[&0]);
        let mut x = ConvElement::zero(n);
        for (i, &gamma) in self.basis.iter().enumerate() {
            x.add_at(gamma, col[i]);
        }
        x
    }

    /// Parses the TOML π-file format: `basis` (Γ elements), optional
    /// `sqrt = d`, and `[[generator]]` tables with `element` and `matrix`.
    /// Entries are `"p/q"`, decimals, `"a,b"` for `a + b√d`, or `[re, im]`.
    pub fn from_toml(pair: &GroupPair, text: &str) -> Result<Self> {
        let file: PiFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let idx = |s: &str| -> Result<u32> { pair.parse_element(s)?.as_index().ok_or(Error::BackendMismatch) };
        let basis = file.basis.iter().map(|s| idx(s)).collect::<Result<Vec<_>>>()?;
        let mut gens = Vec::new();
        for g in &file.generator {
            let rows = g.matrix.len();
            let mut m = CMatrix::zeros(rows, rows);
            for (i, row) in g.matrix.iter().enumerate() {
                if row.len() != rows {
                    return Err(Error::Representation(format!("matrix for {} is not square", g.element)));
                }
                for (j, v) in row.iter().enumerate() {
                    m[(i, j)] = parse_entry(v, file.sqrt)?;
                }
            }
            gens.push((idx(&g.element)?, m));
        }
        Self::new(pair, basis, gens, Cocycle::Trivial)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PiFile {
    basis: Vec<String>,
    sqrt: Option<i64>,
    generator: Vec<PiGenerator>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PiGenerator {
    element: String,
    matrix: Vec<Vec<toml::Value>>,
}

fn parse_real(v: &toml::Value) -> Result<f64> {
    match v {
        toml::Value::Integer(i) => Ok(*i as f64),
        toml::Value::Float(x) => Ok(*x),
        toml::Value::String(s) => parse_real_str(s),
        other => Err(Error::Parse(format!("bad matrix entry {other}"))),
    }
}

fn parse_real_str(s: &str) -> Result<f64> {
    let s = s.trim();
    if s.contains('/') {
        let q = crate::scalar::parse_q(s)?;
        return Ok(*q.numer() as f64 / *q.denom() as f64);
    }
    s.parse().map_err(|_| Error::Parse(format!("bad number {s:?}")))
}

fn parse_entry(v: &toml::Value, sqrt: Option<i64>) -> Result<C64> {
    match v {
        toml::Value::Array(parts) if parts.len() == 2 => Ok(C64::new(parse_real(&parts[0])?, parse_real(&parts[1])?)),
        toml::Value::String(s) if s.contains(',') => {
            let d = sqrt.ok_or_else(|| Error::Parse(format!("entry {s:?} needs `sqrt`")))?;
            let (a, b) = s.split_once(',').unwrap();
            Ok(C64::new(parse_real_str(a)? + parse_real_str(b)? * (d as f64).sqrt(), 0.0))
        }
        other => Ok(C64::new(parse_real(other)?, 0.0)),
    }
}

/// Checks unitarity, regularity on `Γ` and multiplicativity (with cocycle).
pub fn check_regular_extension(pair: &GroupPair, pi: &UnitaryExtension) -> Result<ExtensionReport> {
    let f = pair.finite_backend()?;
    let g = f.group();
    let n = g.order();
    let d = pi.dim();
    let id = CMatrix::identity(d, d);
    let mut unitarity: f64 = 0.0;
    for (_, m) in &pi.generators {
        unitarity = unitarity.max(max_abs(&(m.adjoint() * m - &id)));
    }
    let mut regularity: f64 = 0.0;
    for &gamma in f.gamma_elements() {
        let mut perm = CMatrix::zeros(d, d);
        for (j, &x) in pi.basis.iter().enumerate() {
            perm[(pi.position[&g.mul(gamma, x)], j)] = C64::one();
        }
        regularity = regularity.max(max_abs(&(pi.matrix(gamma) - perm)));
    }
    let mut multiplicativity: f64 = 0.0;
    for a in 0..n as u32 {
        for b in 0..n as u32 {
            let lhs = pi.matrix(a) * pi.matrix(b);
            let rhs = pi.matrix(g.mul(a, b)) * pi.cocycle.value(n, a, b);
            multiplicativity = multiplicativity.max(max_abs(&(lhs - rhs)));
        }
    }
    Ok(ExtensionReport { unitarity, regularity, multiplicativity, cocycle: pi.cocycle.identity_defect(g) })
}

/// `t(g) = conj(⟨π(g)δ_e, δ_e⟩)` on all of `G`.
#[derive(Clone, Debug, PartialEq)]
pub struct TCoefficients {
    t: ConvElement<C64>,
}

impl TCoefficients {
    pub fn get(&self, g: u32) -> C64 {
        self.t.get(g)
    }

    /// `Σ_g t(g) g`.
    pub fn as_element(&self) -> &ConvElement<C64> {
        &self.t
    }

    pub fn len(&self) -> usize {
        self.t.values().len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.values().is_empty()
    }
}

pub fn build_t(pair: &GroupPair, pi: &UnitaryExtension, tol: f64) -> Result<TCoefficients> {
    let report = check_regular_extension(pair, pi)?;
    if !report.passed(tol) {
        return Err(Error::Representation(format!("extension check failed: {report:?}")));
    }
    let n = pair.finite_backend()?.order();
    let e = pi.position[&0];
    let values = (0..n as u32).map(|g| pi.matrix(g)[(e, e)].conj()).collect();
    Ok(TCoefficients { t: ConvElement::from_values(values) })
}

/// `t^A = Σ_{θ∈A} t(θ)θ`.
pub fn t_set(t: &TCoefficients, set: &[u32]) -> ConvElement<C64> {
    let mut x = ConvElement::zero(t.len());
    for &g in set {
        x.add_at(g, t.get(g));
    }
    x
}

pub fn t_coset(engine: &CosetEngine, t: &TCoefficients, key: &CosetKey) -> Result<ConvElement<C64>> {
    Ok(t_set(t, &engine.coset_elements(key)?))
}

pub fn t_double(engine: &CosetEngine, t: &TCoefficients, sigma: &GroupElement) -> Result<ConvElement<C64>> {
    let f = engine.pair().finite_backend()?;
    Ok(t_set(t, &f.double_coset_elements(sigma.as_index().ok_or(Error::BackendMismatch)?)))
}

/// `σ₁Γσ₂` as a sorted element list.
pub fn product_set(pair: &GroupPair, a: u32, b: u32) -> Result<Vec<u32>> {
    let f = pair.finite_backend()?;
    let g = f.group();
    let set: BTreeSet<u32> = f.gamma_elements().iter().map(|&x| g.mul(g.mul(a, x), b)).collect();
    Ok(set.into_iter().collect())
}

/// Largest residual of `t(θ₁θ₂) = ε(θ₁,θ₂) Σ_{γ∈Γ} t(θ₁γ⁻¹) t(γθ₂)` over `G×G`.
pub fn verify_conv_identity(pair: &GroupPair, t: &TCoefficients, cocycle: &Cocycle, tol: f64) -> Result<CheckRecord> {
    let f = pair.finite_backend()?;
    let g = f.group();
    let n = g.order();
    let mut worst = (0.0, String::new());
    for a in 0..n as u32 {
        for b in 0..n as u32 {
            let sum: C64 = f
                .gamma_elements()
                .iter()
                .map(|&c| t.get(g.mul(a, g.inv(c))) * t.get(g.mul(c, b)))
                .sum();
            let r = (t.get(g.mul(a, b)) - cocycle.value(n, a, b) * sum).norm();
            if r > worst.0 {
                worst = (r, format!("θ₁={}, θ₂={}", fmt(pair, a), fmt(pair, b)));
            }
        }
    }
    Ok(CheckRecord::numeric("convolution identity over G x G", "conv-identity", worst.0, tol, Some(worst.1)))
}

fn fmt(pair: &GroupPair, g: u32) -> String {
    pair.format_element(&GroupElement::Perm(g))
}

fn reps(keys: &[CosetKey]) -> Vec<u32> {
    keys.iter().map(|k| k.rep.as_index().unwrap()).collect()
}

/// `t^{σ₁Γ} t^{Γσ₂} = t^{σ₁Γσ₂}` over full transversals, `(t^A)* = t^{A⁻¹}`,
/// and `t^{Γσ}σ⁻¹ = (π(σ)δ_e)*`.
pub fn verify_coset_product(
    engine: &CosetEngine,
    pi: &UnitaryExtension,
    t: &TCoefficients,
    tol: f64,
) -> Result<Vec<CheckRecord>> {
    let pair = engine.pair();
    let g = pair.finite_backend()?.group();
    let n = g.order();
    let gamma = Level::gamma();
    let lefts = engine.all_cosets(Side::Left, &gamma)?;
    let rights = engine.all_cosets(Side::Right, &gamma)?;
    let mut prod = (0.0, String::new());
    for l in &lefts {
        let a = t_coset(engine, t, l)?;
        for r in &rights {
            let b = t_coset(engine, t, r)?;
            let (s1, s2) = (l.rep.as_index().unwrap(), r.rep.as_index().unwrap());
            let whole = t_set(t, &product_set(pair, s1, s2)?);
            let res = a.conv(g, &b).sub(&whole).max_abs();
            if res > prod.0 {
                prod = (res, format!("σ₁={}, σ₂={}", fmt(pair, s1), fmt(pair, s2)));
            }
        }
    }
    let mut star = (0.0, String::new());
    for k in lefts.iter().chain(&rights) {
        let set = engine.coset_elements(k)?;
        let inv: Vec<u32> = set.iter().map(|&x| g.inv(x)).collect();
        let res = t_set(t, &set).adjoint(g).sub(&t_set(t, &inv)).max_abs();
        if res > star.0 {
            star = (res, k.label(pair));
        }
    }
    let mut formula = (0.0, String::new());
    for s in reps(&rights) {
        let lhs = t_set(t, &product_set(pair, 0, s)?).conv(g, &ConvElement::delta(n, g.inv(s)));
        let rhs = pi.vector_element(n, s).adjoint(g);
        let res = lhs.sub(&rhs).max_abs();
        if res > formula.0 {
            formula = (res, format!("σ={}", fmt(pair, s)));
        }
    }
    Ok(vec![
        CheckRecord::numeric("t^{s1 G0} t^{G0 s2} = t^{s1 G0 s2}", "coset-product", prod.0, tol, Some(prod.1)),
        CheckRecord::numeric("(t^A)* = t^{A^-1}", "coset-product", star.0, tol, Some(star.1)),
        CheckRecord::numeric("t^{G0 s} s^-1 = (pi(s) delta_e)*", "coset-product", formula.0, tol, Some(formula.1)),
    ])
}

/// Tags of the seven coset-algebra relations checked by
/// [`verify_relations_0_to_6`].
pub const RELATION_TAGS: [&str; 7] = ["rel0", "rel1", "rel2", "rel3", "rel4", "rel5", "rel6"];

struct Ctx<'a> {
    engine: &'a CosetEngine,
    pair: &'a GroupPair,
    g: &'a FiniteGroup,
    n: usize,
    t: &'a TCoefficients,
    p: CMatrix,
    tol: f64,
}

impl Ctx<'_> {
    fn l(&self, x: &ConvElement<C64>) -> CMatrix {
        x.left_matrix(self.g)
    }

    fn f(&self, x: u32) -> String {
        fmt(self.pair, x)
    }
}

/// Runs the selected relation checks (`which ⊆ 0..=6`) as operator
/// identities on `ℓ²(G)`.
pub fn verify_relations_0_to_6(
    engine: &CosetEngine,
    pi: &UnitaryExtension,
    t: &TCoefficients,
    which: &[usize],
    tol: f64,
) -> Result<Vec<CheckRecord>> {
    let pair = engine.pair();
    let g = pair.finite_backend()?.group();
    let ctx = Ctx { engine, pair, g, n: g.order(), t, p: gamma_projection(pair)?, tol };
    let mut out = Vec::new();
    for &r in which {
        match r {
            0 => out.extend(rel0(&ctx)?),
            1 => out.extend(rel1(&ctx)?),
            2 => out.extend(rel2(&ctx)?),
            3 => out.extend(rel3(&ctx)?),
            4 => out.extend(rel4(&ctx)?),
            5 => out.extend(rel5(&ctx)?),
            6 => out.extend(rel6(&ctx, pi)?),
            _ => return Err(Error::Config(format!("no relation {r}"))),
        }
    }
    Ok(out)
}

/// Additivity of `t` over the splits of double cosets into one-sided
/// cosets and of `Γ`-cosets into `Γ_σ`-cosets.
fn rel0(c: &Ctx) -> Result<Vec<CheckRecord>> {
    let e = c.engine;
    let mut worst = (0.0, String::new());
    let mut note = |res: f64, w: String| {
        if res > worst.0 {
            worst = (res, w);
        }
    };
    let doubles = e.all_double_cosets()?;
    for d in &doubles {
        let whole = t_double(e, c.t, &d.rep)?;
        for keys in [e.decompose_double_right(&d.rep)?, e.decompose_double_left(&d.rep)?] {
            let mut sum = ConvElement::zero(c.n);
            for k in &keys {
                sum = sum.add(&t_coset(e, c.t, k)?);
            }
            note(sum.sub(&whole).max_abs(), d.label(c.pair));
        }
    }
    for d in &doubles {
        let fine = e.stabilizer_level(&d.rep);
        for side in [Side::Right, Side::Left] {
            for k in e.all_cosets(side, &Level::gamma())? {
                let mut sum = ConvElement::zero(c.n);
                for piece in e.split_coset(&k, &fine)? {
                    sum = sum.add(&t_coset(e, c.t, &piece)?);
                }
                note(sum.sub(&t_coset(e, c.t, &k)?).max_abs(), format!("{} at {}", k.label(c.pair), fine.label(c.pair)));
            }
        }
    }
    Ok(vec![CheckRecord::numeric("t additive over disjoint coset splits", RELATION_TAGS[0], worst.0, c.tol, Some(worst.1))])
}

/// `L_{t^{C₁}} M_{χ_{C₂}} = Σ_D M_{χ_D} L_{t^{A_D}}` with `A_D = {c ∈ C₁ : cC₂ = D}`.
fn rel1(c: &Ctx) -> Result<Vec<CheckRecord>> {
    let e = c.engine;
    let gamma = Level::gamma();
    let mut cosets = e.all_cosets(Side::Right, &gamma)?;
    cosets.extend(e.all_cosets(Side::Left, &gamma)?);
    let mut worst = (0.0, String::new());
    let mut parts_ok = true;
    for c1 in &cosets {
        let e1 = e.coset_elements(c1)?;
        for c2 in &cosets {
            let e2 = e.coset_elements(c2)?;
            let mut groups: BTreeMap<Vec<u32>, Vec<u32>> = BTreeMap::new();
            for &x in &e1 {
                let mut d: Vec<u32> = e2.iter().map(|&y| c.g.mul(x, y)).collect();
                d.sort_unstable();
                groups.entry(d).or_default().push(x);
            }
            // the translates cC₂ partition C₁C₂
            let mut seen = BTreeSet::new();
            for d in groups.keys() {
                for &x in d {
                    parts_ok &= seen.insert(x);
                }
            }
            let lhs = c.l(&t_set(c.t, &e1)) * indicator_matrix(c.n, &e2);
            let mut rhs = CMatrix::zeros(c.n, c.n);
            for (d, a) in &groups {
                rhs += indicator_matrix(c.n, d) * c.l(&t_set(c.t, a));
            }
            let res = max_abs(&(lhs - rhs));
            if res > worst.0 {
                worst = (res, format!("C1={}, C2={}", c1.label(c.pair), c2.label(c.pair)));
            }
        }
    }
    Ok(vec![
        CheckRecord::numeric("L_{t^C1} M_{C2} = sum M_{cC2} L_{t^A}", RELATION_TAGS[1], worst.0, c.tol, Some(worst.1)),
        CheckRecord::from_bool("translates cC2 are disjoint", RELATION_TAGS[1], parts_ok, "overlapping translates"),
    ])
}

/// Instances `ΓσΓτ = ⊔ sᵢσΓτ = ⊔ Γσrⱼτ`: verified as set identities, then
/// `Σ L_{t^{sᵢΓ'τ}} = Σ L_{t^{Γrⱼτ}}`.
fn rel2(c: &Ctx) -> Result<Vec<CheckRecord>> {
    let e = c.engine;
    let gamma = Level::gamma();
    let id = c.pair.identity();
    let mut worst = (0.0, String::new());
    let mut sets_ok = true;
    let mut witness = String::new();
    for d in e.all_double_cosets()? {
        let lefts = e.decompose_double_left(&d.rep)?;
        let rights = e.decompose_double_right(&d.rep)?;
        for tau in e.all_cosets(Side::Right, &gamma)? {
            let lhs: Vec<_> = lefts.iter().map(|k| (k.rep, tau.rep)).collect();
            let rhs: Vec<_> = rights.iter().map(|k| (id, c.pair.mul(&k.rep, &tau.rep))).collect();
            let inst = RelationInstance::new(gamma.clone(), lhs.clone(), rhs.clone());
            if let crate::hecke::Verdict::Invalid { witness: w } = crate::hecke::verify_relation(e, &inst)? {
                sets_ok = false;
                witness = w;
            }
            let sum = |terms: &[(GroupElement, GroupElement)]| -> Result<CMatrix> {
                let mut m = CMatrix::zeros(c.n, c.n);
                for (a, b) in terms {
                    m += c.l(&t_set(c.t, &product_set(c.pair, a.as_index().unwrap(), b.as_index().unwrap())?));
                }
                Ok(m)
            };
            let res = max_abs(&(sum(&lhs)? - sum(&rhs)?));
            if res > worst.0 {
                worst = (res, format!("{} times {}", d.label(c.pair), c.f(tau.rep.as_index().unwrap())));
            }
        }
    }
    Ok(vec![
        CheckRecord::from_bool("instances are valid set identities", RELATION_TAGS[2], sets_ok, witness),
        CheckRecord::numeric("sum of t over both decompositions agree", RELATION_TAGS[2], worst.0, c.tol, Some(worst.1)),
    ])
}

/// `P L_{(t^{Γσ₁})*} L_{t^{Γσ₂}} P = δ_{Γσ₁,Γσ₂} P`.
fn rel3(c: &Ctx) -> Result<Vec<CheckRecord>> {
    let e = c.engine;
    let rights = e.all_cosets(Side::Right, &Level::gamma())?;
    let mut worst = (0.0, String::new());
    for a in &rights {
        let ta = t_coset(e, c.t, a)?.adjoint(c.g);
        for b in &rights {
            let tb = t_coset(e, c.t, b)?;
            let lhs = &c.p * c.l(&ta) * c.l(&tb) * &c.p;
            let rhs = if a == b { c.p.clone() } else { CMatrix::zeros(c.n, c.n) };
            let res = max_abs(&(lhs - rhs));
            if res > worst.0 {
                worst = (res, format!("{} vs {}", a.label(c.pair), b.label(c.pair)));
            }
        }
    }
    Ok(vec![CheckRecord::numeric("P L_{(t^{G0 s1})*} L_{t^{G0 s2}} P = delta P", RELATION_TAGS[3], worst.0, c.tol, Some(worst.1))])
}

/// `V_i = L_{t^{Γxᵢ}} P` over the right cosets `Γxᵢ ⊆ ΓσΓ`.
fn partial_isometries(c: &Ctx, sigma: &GroupElement) -> Result<Vec<CMatrix>> {
    c.engine
        .decompose_double_right(sigma)?
        .iter()
        .map(|k| Ok(c.l(&t_coset(c.engine, c.t, k)?) * &c.p))
        .collect()
}

/// Range sum: `Σ VᵢVᵢ* = M_{χ_{ΓσΓ}}`, with each `Vᵢ` a partial isometry,
/// mutually orthogonal ranges, and `Σ rank(VᵢVᵢ*) = |ΓσΓ|`.
fn rel4(c: &Ctx) -> Result<Vec<CheckRecord>> {
    let e = c.engine;
    let f = c.pair.finite_backend()?;
    let mut sum_res = (0.0, String::new());
    let mut iso_res = (0.0, String::new());
    let mut orth_res = (0.0, String::new());
    let mut rank_ok = true;
    let mut rank_witness = String::new();
    for d in e.all_double_cosets()? {
        let label = d.label(c.pair);
        let vs = partial_isometries(c, &d.rep)?;
        let set = f.double_coset_elements(d.rep.as_index().unwrap());
        let mut sum = CMatrix::zeros(c.n, c.n);
        let mut rank = 0usize;
        for (i, v) in vs.iter().enumerate() {
            let vvs = v * v.adjoint();
            let r = max_abs(&(v.adjoint() * v - &c.p));
            if r > iso_res.0 {
                iso_res = (r, label.clone());
            }
            for (j, w) in vs.iter().enumerate() {
                if i != j {
                    let r = max_abs(&(v.adjoint() * w));
                    if r > orth_res.0 {
                        orth_res = (r, label.clone());
                    }
                }
            }
            rank += vvs.trace().re.round() as usize;
            sum += vvs;
        }
        let r = max_abs(&(sum - indicator_matrix(c.n, &set)));
        if r > sum_res.0 {
            sum_res = (r, label.clone());
        }
        if rank != set.len() {
            rank_ok = false;
            rank_witness = format!("{label}: rank {rank} vs {}", set.len());
        }
    }
    Ok(vec![
        CheckRecord::numeric("sum V_i V_i* = M_{G0 s G0}", RELATION_TAGS[4], sum_res.0, c.tol, Some(sum_res.1)),
        CheckRecord::numeric("V_i* V_i = P (partial isometries)", RELATION_TAGS[4], iso_res.0, c.tol, Some(iso_res.1)),
        CheckRecord::numeric("V_i* V_j = 0 for i != j (orthogonal ranges)", RELATION_TAGS[4], orth_res.0, c.tol, Some(orth_res.1)),
        CheckRecord::from_bool("sum rank(V_i V_i*) = |G0 s G0|", RELATION_TAGS[4], rank_ok, rank_witness),
    ])
}

/// `Σ Vᵢ*Vᵢ = [Γ:Γ_σ]·P`, and `‖L_{t^{ΓσΓ}}‖ ≤ [Γ:Γ_σ]`.
fn rel5(c: &Ctx) -> Result<Vec<CheckRecord>> {
    let e = c.engine;
    let mut sum_res = (0.0, String::new());
    let mut bound = (f64::NEG_INFINITY, String::new());
    for d in e.all_double_cosets()? {
        let label = d.label(c.pair);
        let index = e.stabilizer_index(&d.rep)? as f64;
        let mut sum = CMatrix::zeros(c.n, c.n);
        for v in partial_isometries(c, &d.rep)? {
            sum += v.adjoint() * v;
        }
        let r = max_abs(&(sum - c.p.scale(index)));
        if r > sum_res.0 {
            sum_res = (r, label.clone());
        }
        let norm = operator_norm(&c.l(&t_double(e, c.t, &d.rep)?));
        if norm - index > bound.0 {
            bound = (norm - index, format!("{label}: norm {norm:.6} vs index {index}"));
        }
    }
    Ok(vec![
        CheckRecord::numeric("sum V_i* V_i = [G0:G0_s] P", RELATION_TAGS[5], sum_res.0, c.tol, Some(sum_res.1)),
        CheckRecord::numeric("||L_{t^{G0 s G0}}|| <= [G0:G0_s]", RELATION_TAGS[5], bound.0.max(0.0), c.tol, Some(bound.1)),
    ])
}

/// `t^{Γσ}σ⁻¹` is supported in `Γ` and equals `(π(σ)δ_e)*`.
fn rel6(c: &Ctx, pi: &UnitaryExtension) -> Result<Vec<CheckRecord>> {
    let f = c.pair.finite_backend()?;
    let mut support_ok = true;
    let mut witness = String::new();
    let mut worst = (0.0, String::new());
    for k in c.engine.all_cosets(Side::Right, &Level::gamma())? {
        let s = k.rep.as_index().unwrap();
        let x = t_coset(c.engine, c.t, &k)?.conv(c.g, &ConvElement::delta(c.n, c.g.inv(s)));
        if let Some(&bad) = x.support().iter().find(|&&y| !f.contains(y)) {
            support_ok = false;
            witness = format!("σ={}: support meets {}", c.f(s), c.f(bad));
        }
        let r = x.sub(&pi.vector_element(c.n, s).adjoint(c.g)).max_abs();
        if r > worst.0 {
            worst = (r, format!("σ={}", c.f(s)));
        }
    }
    Ok(vec![
        CheckRecord::from_bool("support of t^{G0 s} s^-1 lies in G0", RELATION_TAGS[6], support_ok, witness),
        CheckRecord::numeric("t^{G0 s} s^-1 = (pi(s) delta_e)*", RELATION_TAGS[6], worst.0, c.tol, Some(worst.1)),
    ])
}

/// The Gram matrix `[t(g⁻¹h)]_{g,h ∈ G}` is positive semidefinite.
pub fn verify_positive_definite(pair: &GroupPair, t: &TCoefficients, tol: f64) -> Result<CheckRecord> {
    let g = pair.finite_backend()?.group();
    let n = g.order();
    let m = CMatrix::from_fn(n, n, |i, j| t.get(g.mul(g.inv(i as u32), j as u32)));
    let (min, herm) = psd_profile(&m);
    Ok(CheckRecord::numeric(
        "[t(g^-1 h)] is PSD",
        "positive-definite",
        (-min).max(herm).max(0.0),
        tol,
        Some(format!("min eigenvalue {min:.3e}")),
    ))
}

/// The map `[C] ↦ (1/|Γ|)Σ_{x∈C} x` into `ℚ[G]`.
#[derive(Debug)]
pub struct UniformModel<'a> {
    engine: &'a CosetEngine,
    weight: Q,
}

pub fn uniform_indicator_model(engine: &CosetEngine) -> Result<UniformModel<'_>> {
    let d = engine.pair().finite_backend()?.gamma_order() as i64;
    Ok(UniformModel { engine, weight: Q::new(1, d) })
}

impl UniformModel<'_> {
    fn n(&self) -> usize {
        self.engine.pair().order().unwrap()
    }

    pub fn set_image(&self, set: &[u32]) -> ConvElement<Q> {
        let mut x = ConvElement::zero(self.n());
        for &g in set {
            x.add_at(g, self.weight);
        }
        x
    }

    pub fn coset_image(&self, key: &CosetKey) -> Result<ConvElement<Q>> {
        Ok(self.set_image(&self.engine.coset_elements(key)?))
    }

    pub fn hecke_image(&self, h: &HeckeElement) -> Result<ConvElement<Q>> {
        let f = self.engine.pair().finite_backend()?;
        let mut x = ConvElement::zero(self.n());
        for (d, c) in h.iter() {
            x = x.add(&self.set_image(&f.double_coset_elements(d.rep.as_index().unwrap())).scale(*c));
        }
        Ok(x)
    }

    /// The idempotent `e` image of `[Γ]`.
    pub fn unit(&self) -> Result<ConvElement<Q>> {
        self.hecke_image(&HeckeElement::unit(self.engine.pair()))
    }

    /// `e² = e`, and `hecke_mul` agrees with convolution on all basis pairs.
    pub fn verify_oracle(&self) -> Result<Vec<CheckRecord>> {
        let g = self.engine.pair().finite_backend()?.group();
        let e = self.unit()?;
        let mut records = vec![CheckRecord::from_bool("e*e = e", "uniform-model", e.conv(g, &e) == e, "e is not idempotent")];
        let basis: Vec<HeckeElement> =
            self.engine.all_double_cosets()?.into_iter().map(HeckeElement::basis).collect();
        let mut ok = true;
        let mut witness = String::new();
        for a in &basis {
            for b in &basis {
                let lhs = self.hecke_image(&hecke_mul(self.engine, a, b)?)?;
                let rhs = self.hecke_image(a)?.conv(g, &self.hecke_image(b)?);
                if lhs != rhs {
                    ok = false;
                    witness = format!("{} * {}", a.format(self.engine.pair()), b.format(self.engine.pair()));
                }
            }
        }
        records.push(CheckRecord::from_bool("hecke_mul agrees with the corner-algebra oracle", "uniform-model", ok, witness));
        Ok(records)
    }

    /// In this model the union identities hold exactly, while the Kronecker
    /// compression fails: the diagonal compression at `σ₁ = σ₂` is
    /// `P L_{(1/|Γ|)1_{σ⁻¹Γσ∩Γ}} P` with trace `1/|Γ|`, not `P`.
    pub fn negative_control(&self) -> Result<Vec<CheckRecord>> {
        let e = self.engine;
        let pair = e.pair();
        let g = pair.finite_backend()?.group();
        let n = self.n();
        let p = gamma_projection(pair)?;
        let gamma = Level::gamma();
        let mut union_ok = true;
        for d in e.all_double_cosets()? {
            let mut l = ConvElement::<Q>::zero(n);
            for k in e.decompose_double_left(&d.rep)? {
                l = l.add(&self.coset_image(&k)?);
            }
            let mut r = ConvElement::<Q>::zero(n);
            for k in e.decompose_double_right(&d.rep)? {
                r = r.add(&self.set_image(&product_set(pair, 0, k.rep.as_index().unwrap())?));
            }
            union_ok &= l == r && l == self.hecke_image(&HeckeElement::basis(d))?;
        }
        let mut fails = true;
        let mut traces_ok = true;
        for k in e.all_cosets(Side::Right, &gamma)? {
            let u: ConvElement<C64> = (&self.coset_image(&k)?).into();
            let m = &p * u.adjoint(g).left_matrix(g) * u.left_matrix(g) * &p;
            fails &= max_abs(&(&m - &p)) > TOL;
            let expected = 1.0 / pair.gamma_order().unwrap() as f64;
            traces_ok &= (m[(0, 0)].re - expected).abs() < TOL;
        }
        Ok(vec![
            CheckRecord::from_bool("union identities hold exactly in the uniform model", "uniform-model", union_ok, "a union identity fails"),
            CheckRecord::from_bool(
                "Kronecker compression fails in the uniform model (negative control)",
                "uniform-model",
                fails,
                "compression unexpectedly equals P",
            ),
            CheckRecord::from_bool("uniform-model compression has trace 1/|G0|", "uniform-model", traces_ok, "unexpected trace"),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::DEFAULT_ORDER_BOUND;

    const S3_PI: &str = include_str!("../../../configs/s3_z2.pi.toml");
    const S3_PI_ALT: &str = include_str!("../../../configs/s3_z2_alt.pi.toml");
    const S4_PI: &str = include_str!("../../../configs/s4_s3.pi.toml");

    fn s3() -> CosetEngine {
        CosetEngine::new(GroupPair::finite("S3/Z2", 3, &["(1 2)", "(1 2 3)"], &["(1 2)"], DEFAULT_ORDER_BOUND).unwrap())
    }

    fn s4() -> CosetEngine {
        CosetEngine::new(
            GroupPair::finite("S4/S3", 4, &["(1 2)", "(1 2 3 4)"], &["(1 2)", "(1 2 3)"], DEFAULT_ORDER_BOUND)
                .unwrap(),
        )
    }

    fn idx(e: &CosetEngine, s: &str) -> u32 {
        e.pair().parse_element(s).unwrap().as_index().unwrap()
    }

    #[test]
    fn convolution_basics() {
        let e = s3();
        let g = e.pair().finite_backend().unwrap().group();
        let a = idx(&e, "(1 2)");
        let b = idx(&e, "(1 2 3)");
        let x = ConvElement::<Q>::delta(6, a);
        let y = ConvElement::<Q>::delta(6, b);
        assert_eq!(x.conv(g, &y), ConvElement::delta(6, g.mul(a, b)));
        assert_eq!(y.adjoint(g), ConvElement::delta(6, g.inv(b)));
        let z = x.add(&y.scale(Q::new(1, 2)));
        assert_eq!(z.conv(g, &y).trace(), y.conv(g, &z).trace());
        assert_eq!(z.conv(g, &y.adjoint(g)).trace(), y.adjoint(g).conv(g, &z).trace());
    }

    #[test]
    fn parses_entries() {
        let v: toml::Value = toml::from_str::<toml::Table>("x = \"1/2,1/2\"").unwrap()["x"].clone();
        assert!((parse_entry(&v, Some(3)).unwrap().re - (0.5 + 0.5 * 3f64.sqrt())).abs() < 1e-15);
        assert!(parse_entry(&v, None).is_err());
        let v: toml::Value = toml::from_str::<toml::Table>("x = [0, -1.5]").unwrap()["x"].clone();
        assert_eq!(parse_entry(&v, None).unwrap(), C64::new(0.0, -1.5));
        let v: toml::Value = toml::from_str::<toml::Table>("x = \"-0.25\"").unwrap()["x"].clone();
        assert_eq!(parse_entry(&v, None).unwrap(), C64::new(-0.25, 0.0));
    }

    #[test]
    fn extension_checks() {
        for (e, text) in [(s3(), S3_PI), (s3(), S3_PI_ALT), (s4(), S4_PI)] {
            let pi = UnitaryExtension::from_toml(e.pair(), text).unwrap();
            let r = check_regular_extension(e.pair(), &pi).unwrap();
            assert!(r.passed(TOL), "{r:?}");
        }
        // G = Γ with π the regular representation itself
        let z2 = GroupPair::finite("Z2", 2, &["(1 2)"], &["(1 2)"], 10).unwrap();
        let pi = UnitaryExtension::from_toml(
            &z2,
            "basis = [\"()\", \"(1 2)\"]\n[[generator]]\nelement = \"(1 2)\"\nmatrix = [[0, 1], [1, 0]]\n",
        )
        .unwrap();
        let r = check_regular_extension(&z2, &pi).unwrap();
        assert_eq!((r.unitarity, r.regularity, r.multiplicativity), (0.0, 0.0, 0.0));
        // a 1-dim sign character does not restrict to the regular representation of Z2
        let bad = UnitaryExtension::from_toml(
            &s3().pair().clone(),
            "basis = [\"()\"]\n[[generator]]\nelement = \"(1 2)\"\nmatrix = [[-1]]\n",
        );
        assert!(bad.is_err());
        let wrong = "basis = [\"()\", \"(1 2)\"]\n[[generator]]\nelement = \"(1 2)\"\nmatrix = [[1, 0], [0, 1]]\n[[generator]]\nelement = \"(1 2 3)\"\nmatrix = [[1, 0], [0, 1]]\n";
        let pi = UnitaryExtension::from_toml(s3().pair(), wrong).unwrap();
        assert!(!check_regular_extension(s3().pair(), &pi).unwrap().passed(TOL));
        assert!(build_t(s3().pair(), &pi, TOL).is_err());
    }

    #[test]
    fn t_values_match_character_theory() {
        let e = s3();
        let pi = UnitaryExtension::from_toml(e.pair(), S3_PI).unwrap();
        let t = build_t(e.pair(), &pi, TOL).unwrap();
        assert_eq!(t.get(0), C64::one());
        assert_eq!(t.get(idx(&e, "(1 2)")), C64::new(0.0, 0.0));
        // the diagonal entry of a rotation by ±120 degrees is cos 120 = χ_std/2
        assert!((t.get(idx(&e, "(1 2 3)")) - C64::new(-0.5, 0.0)).norm() < 1e-12);
        // Schur orthogonality: Σ_g |π(g)_{ee}|² = |G| / dim π
        let sum: f64 = (0..6).map(|g| t.get(g).norm_sqr()).sum();
        assert!((sum - 3.0).abs() < 1e-12);
        let t13 = t.get(idx(&e, "(1 3)"));
        assert!((t13.norm() - 3f64.sqrt() / 2.0).abs() < 1e-12);
        // the two orientations give different coefficients on (1 3)
        let alt = build_t(e.pair(), &UnitaryExtension::from_toml(e.pair(), S3_PI_ALT).unwrap(), TOL).unwrap();
        assert!((alt.get(idx(&e, "(1 3)")) + t13).norm() < 1e-12);

        let e = s4();
        let pi = UnitaryExtension::from_toml(e.pair(), S4_PI).unwrap();
        let t = build_t(e.pair(), &pi, TOL).unwrap();
        let sum: f64 = (0..24).map(|g| t.get(g).norm_sqr()).sum();
        // each right coset Γσ carries ℓ²-mass ‖π(σ)δ_e‖² = 1
        assert!((sum - 4.0).abs() < 1e-12);
        for &gamma in e.pair().finite_backend().unwrap().gamma_elements() {
            assert_eq!(t.get(gamma), if gamma == 0 { C64::one() } else { C64::new(0.0, 0.0) });
        }
    }

    #[test]
    fn full_suites_pass_on_shipped_extensions() {
        for (e, text) in [(s3(), S3_PI), (s3(), S3_PI_ALT), (s4(), S4_PI)] {
            let pi = UnitaryExtension::from_toml(e.pair(), text).unwrap();
            let t = build_t(e.pair(), &pi, TOL).unwrap();
            let mut records = vec![verify_conv_identity(e.pair(), &t, pi.cocycle(), TOL).unwrap()];
            records.extend(verify_coset_product(&e, &pi, &t, TOL).unwrap());
            records.extend(verify_relations_0_to_6(&e, &pi, &t, &[0, 1, 2, 3, 4, 5, 6], TOL).unwrap());
            records.push(verify_positive_definite(e.pair(), &t, TOL).unwrap());
            for r in &records {
                assert!(r.passed(), "{} {r:?}", e.pair().name());
            }
        }
    }

    #[test]
    fn relation_five_constant_is_the_index() {
        let e = s4();
        let pi = UnitaryExtension::from_toml(e.pair(), S4_PI).unwrap();
        let t = build_t(e.pair(), &pi, TOL).unwrap();
        let g = e.pair().finite_backend().unwrap().group();
        let p = gamma_projection(e.pair()).unwrap();
        let sigma = e.pair().parse_element("(1 4)").unwrap();
        let mut sum = CMatrix::zeros(24, 24);
        for k in e.decompose_double_right(&sigma).unwrap() {
            let v = t_coset(&e, &t, &k).unwrap().left_matrix(g) * &p;
            sum += v.adjoint() * v;
        }
        assert!(max_abs(&(sum - p.scale(3.0))) < TOL);
        let norm = operator_norm(&t_double(&e, &t, &sigma).unwrap().left_matrix(g));
        assert!(norm <= 3.0 + TOL);
    }

    #[test]
    fn uniform_model() {
        for e in [s3(), s4()] {
            let model = uniform_indicator_model(&e).unwrap();
            for r in model.verify_oracle().unwrap().iter().chain(&model.negative_control().unwrap()) {
                assert!(r.passed(), "{r:?}");
            }
        }
        assert!(uniform_indicator_model(&CosetEngine::new(GroupPair::modular(3).unwrap())).is_err());
    }
}
