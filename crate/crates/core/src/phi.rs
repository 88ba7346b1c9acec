//! The diagonal representation `Φ` of the Hecke algebra on `ℓ²(Γ) ⊂ ℓ²(G)`,
//! realized as `f ↦ P (a * f * b) P`, and the trace Gram pairing.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::coset::{CosetEngine, CosetKey, CosetVector, Level, Side};
use crate::error::Result;
use crate::group::{FiniteGroup, GroupElement, GroupPair};
use crate::hecke::{hecke_act_left, hecke_mul, hecke_star, HeckeElement};
use crate::report::CheckRecord;
use crate::rep::{gamma_projection, indicator_matrix, max_abs, product_set, psd_profile, t_set, CMatrix, ConvElement, TCoefficients};
use crate::scalar::{C64, Q};

/// `f ↦ P (a * f * b) P`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorOperator {
    pub a: ConvElement<C64>,
    pub b: ConvElement<C64>,
}

impl TensorOperator {
    pub fn realize(&self, group: &FiniteGroup, p: &CMatrix) -> CMatrix {
        p * self.a.left_matrix(group) * self.b.right_matrix(group) * p
    }

    /// Left and right convolutions commute, so the adjoint swaps in `a*`, `b*`.
    pub fn adjoint(&self, group: &FiniteGroup) -> Self {
        TensorOperator { a: self.a.adjoint(group), b: self.b.adjoint(group) }
    }
}

/// Placement of the adjoint on the right leg of `Φ([σ₁Γσ₂])`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    /// `b = (t^{S⁻¹})*`, equal to `t^S`.
    Inverse,
    /// `b = (t^S)*`.
    Direct,
}

/// `Φ` for a finite pair and fixed coefficients `t`.
pub struct Phi<'a> {
    engine: &'a CosetEngine,
    t: &'a TCoefficients,
    group: &'a FiniteGroup,
    p: CMatrix,
    n: usize,
}

impl<'a> Phi<'a> {
    pub fn new(engine: &'a CosetEngine, t: &'a TCoefficients) -> Result<Self> {
        let pair = engine.pair();
        let f = pair.finite_backend()?;
        Ok(Phi { engine, t, group: f.group(), p: gamma_projection(pair)?, n: f.order() })
    }

    fn pair(&self) -> &GroupPair {
        self.engine.pair()
    }

    pub fn projection(&self) -> &CMatrix {
        &self.p
    }

    fn idx(&self, g: &GroupElement) -> u32 {
        g.as_index().expect("finite element")
    }

    fn t_of(&self, set: &[u32]) -> ConvElement<C64> {
        t_set(self.t, set)
    }

    fn double_set(&self, sigma: &GroupElement) -> Vec<u32> {
        self.pair().finite_backend().unwrap().double_coset_elements(self.idx(sigma))
    }

    /// `Φ([Γσ])`: `a = t^{Γσ}`, `b = (t^{ΓσΓ})*`.
    pub fn phi_coset(&self, sigma: &GroupElement) -> Result<TensorOperator> {
        let a = self.t_of(&product_set(self.pair(), 0, self.idx(sigma))?);
        let b = self.t_of(&self.double_set(sigma)).adjoint(self.group);
        Ok(TensorOperator { a, b })
    }

    /// `Φ([ΓσΓ])`: `a = t^{ΓσΓ}`, `b = (t^{ΓσΓ})*`.
    pub fn phi_double(&self, sigma: &GroupElement) -> Result<TensorOperator> {
        let a = self.t_of(&self.double_set(sigma));
        Ok(TensorOperator { b: a.adjoint(self.group), a })
    }

    /// `S = Γσ₁Γσ₂Γ`, the union of the right cosets it contains.
    pub fn saturation(&self, s1: &GroupElement, s2: &GroupElement) -> Result<Vec<u32>> {
        let mut set = BTreeSet::new();
        for x in product_set(self.pair(), self.idx(s1), self.idx(s2))? {
            set.extend(self.pair().finite_backend()?.double_coset_elements(x));
        }
        Ok(set.into_iter().collect())
    }

    /// `Φ([σ₁Γσ₂])`: `a = t^{σ₁Γσ₂}`, right leg from `S = Γσ₁Γσ₂Γ` under the
    /// given convention. `σ₂ = e` gives `Φ([σ₁Γ])`.
    pub fn phi_general(&self, s1: &GroupElement, s2: &GroupElement, conv: Convention) -> Result<TensorOperator> {
        let a = self.t_of(&product_set(self.pair(), self.idx(s1), self.idx(s2))?);
        let s = self.saturation(s1, s2)?;
        let b = match conv {
            Convention::Inverse => {
                let inv: Vec<u32> = s.iter().map(|&x| self.group.inv(x)).collect();
                self.t_of(&inv).adjoint(self.group)
            }
            Convention::Direct => self.t_of(&s).adjoint(self.group),
        };
        Ok(TensorOperator { a, b })
    }

    pub fn realize(&self, op: &TensorOperator) -> CMatrix {
        op.realize(self.group, &self.p)
    }

    /// Linear extension of `Φ` to a Hecke element.
    pub fn hecke_matrix(&self, h: &HeckeElement) -> Result<CMatrix> {
        let mut m = CMatrix::zeros(self.n, self.n);
        for (d, c) in h.iter() {
            m += self.realize(&self.phi_double(&d.rep)?) * q_to_c(c);
        }
        Ok(m)
    }

    /// Linear extension of `Φ` to right-coset vectors at level `Γ`.
    pub fn vector_matrix(&self, v: &CosetVector) -> Result<CMatrix> {
        let mut m = CMatrix::zeros(self.n, self.n);
        for (k, c) in v.iter() {
            m += self.realize(&self.phi_coset(&k.rep)?) * q_to_c(c);
        }
        Ok(m)
    }

    fn basis(&self) -> Result<Vec<HeckeElement>> {
        Ok(self.engine.all_double_cosets()?.into_iter().map(HeckeElement::basis).collect())
    }

    fn right_cosets(&self) -> Result<Vec<CosetKey>> {
        self.engine.all_cosets(Side::Right, &Level::gamma())
    }

    fn left_cosets(&self) -> Result<Vec<CosetKey>> {
        self.engine.all_cosets(Side::Left, &Level::gamma())
    }

    /// Morphism, involution, unit, Hecke-linearity and the structural
    /// properties of the realization.
    pub fn verify(&self, tol: f64) -> Result<Vec<CheckRecord>> {
        let pair = self.pair();
        let basis = self.basis()?;
        let mut mul = Worst::default();
        let mut star = Worst::default();
        for h1 in &basis {
            let m1 = self.hecke_matrix(h1)?;
            star.note(
                max_abs(&(self.hecke_matrix(&hecke_star(self.engine, h1))? - m1.adjoint())),
                || h1.format(pair),
            );
            for h2 in &basis {
                let lhs = &m1 * self.hecke_matrix(h2)?;
                let rhs = self.hecke_matrix(&hecke_mul(self.engine, h1, h2)?)?;
                mul.note(max_abs(&(lhs - rhs)), || format!("{} * {}", h1.format(pair), h2.format(pair)));
            }
        }
        let unit = max_abs(&(self.hecke_matrix(&HeckeElement::unit(pair))? - &self.p));

        let mut linear = Worst::default();
        let mut compress = Worst::default();
        let mut commute = Worst::default();
        let mut column = Worst::default();
        for h in &basis {
            for k in self.right_cosets()? {
                let v = CosetVector::basis(k.clone());
                let lhs = self.hecke_matrix(h)? * self.vector_matrix(&v)?;
                let rhs = self.vector_matrix(&hecke_act_left(self.engine, h, &v)?)?;
                linear.note(max_abs(&(lhs - rhs)), || format!("{} on {}", h.format(pair), k.label(pair)));
            }
        }
        let mut ops = Vec::new();
        for k in self.right_cosets()? {
            ops.push((k.label(pair), self.phi_coset(&k.rep)?));
        }
        for d in self.engine.all_double_cosets()? {
            ops.push((d.label(pair), self.phi_double(&d.rep)?));
        }
        for (label, op) in &ops {
            let m = self.realize(op);
            compress.note(max_abs(&(&self.p * &m * &self.p - &m)), || label.clone());
            let la = op.a.left_matrix(self.group);
            let rb = op.b.right_matrix(self.group);
            commute.note(max_abs(&(&la * &rb - &rb * &la)), || label.clone());
        }
        // only the component of f * b on the left coset σ⁻¹Γ survives P L_{t^{Γσ}}
        let f = pair.finite_backend()?;
        for k in self.right_cosets()? {
            let op = self.phi_coset(&k.rep)?;
            let m = self.realize(&op);
            let s_inv = pair.invert(&k.rep);
            let window = indicator_matrix(self.n, &product_set(pair, self.idx(&s_inv), 0)?);
            let single = &self.p * op.a.left_matrix(self.group) * window * op.b.right_matrix(self.group);
            for &gamma in f.gamma_elements() {
                let c = gamma as usize;
                let full = m.column(c);
                let part = single.column(c);
                column.note((full - part).iter().map(|z| z.norm()).fold(0.0, f64::max), || {
                    format!("{} at {}", k.label(pair), pair.format_element(&GroupElement::Perm(gamma)))
                });
            }
        }
        Ok(vec![
            CheckRecord::numeric("Phi(h1)Phi(h2) = Phi(h1 h2)", "phi-morphism", mul.value, tol, mul.witness),
            CheckRecord::numeric("Phi(h*) = Phi(h)*", "phi-morphism", star.value, tol, star.witness),
            CheckRecord::numeric("Phi([G0]) = P", "phi-morphism", unit, tol, None),
            CheckRecord::numeric("Phi(h)Phi(v) = Phi(h v)", "phi-linearity", linear.value, tol, linear.witness),
            CheckRecord::numeric("T = P T P", "phi-structure", compress.value, tol, compress.witness),
            CheckRecord::numeric("L_a R_b = R_b L_a", "phi-structure", commute.value, tol, commute.witness),
            CheckRecord::numeric("single surviving term on gamma columns", "phi-structure", column.value, tol, column.witness),
        ])
    }

    /// `Φ([σ₁Γ])Φ([Γσ₂]) = Φ([σ₁Γσ₂])` over all left and right cosets.
    pub fn verify_composition(&self, conv: Convention, tol: f64) -> Result<CheckRecord> {
        let pair = self.pair();
        let id = pair.identity();
        let mut w = Worst::default();
        for l in self.left_cosets()? {
            let left = self.realize(&self.phi_general(&l.rep, &id, conv)?);
            for r in self.right_cosets()? {
                let lhs = &left * self.realize(&self.phi_coset(&r.rep)?);
                let rhs = self.realize(&self.phi_general(&l.rep, &r.rep, conv)?);
                w.note(max_abs(&(lhs - rhs)), || format!("{} then {}", l.label(pair), r.label(pair)));
            }
        }
        let name = match conv {
            Convention::Inverse => "Phi(s1 G0)Phi(G0 s2) = Phi(s1 G0 s2), right leg (t^{S^-1})*",
            Convention::Direct => "Phi(s1 G0)Phi(G0 s2) = Phi(s1 G0 s2), right leg (t^S)*",
        };
        Ok(CheckRecord::numeric(name, "phi-composition", w.value, tol, w.witness))
    }

    /// Gram matrix over all pairs (left coset rep, right coset rep).
    pub fn transversal_gram(&self) -> Result<GramMatrix> {
        let mut pairs = Vec::new();
        for l in self.left_cosets()? {
            for r in self.right_cosets()? {
                pairs.push((l.rep, r.rep));
            }
        }
        gram(self.engine, self.t, &pairs)
    }
}

fn q_to_c(q: &Q) -> C64 {
    C64::new(*q.numer() as f64 / *q.denom() as f64, 0.0)
}

#[derive(Default)]
struct Worst {
    value: f64,
    witness: Option<String>,
}

impl Worst {
    fn note(&mut self, r: f64, w: impl FnOnce() -> String) {
        if r > self.value || self.witness.is_none() {
            self.value = self.value.max(r);
            self.witness = Some(w());
        }
    }
}

/// Hermitian matrix `τ(xᵢ xⱼ*)` with `xᵢ = t^{σᵢΓσ′ᵢ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix {
    pub labels: Vec<String>,
    pub matrix: CMatrix,
}

pub fn gram(engine: &CosetEngine, t: &TCoefficients, pairs: &[(GroupElement, GroupElement)]) -> Result<GramMatrix> {
    let pair = engine.pair();
    let g = pair.finite_backend()?.group();
    let xs = pairs
        .iter()
        .map(|(a, b)| {
            let set = product_set(pair, a.as_index().unwrap(), b.as_index().unwrap())?;
            Ok(t_set(t, &set))
        })
        .collect::<Result<Vec<_>>>()?;
    let adj: Vec<_> = xs.iter().map(|x| x.adjoint(g)).collect();
    let n = xs.len();
    let matrix = CMatrix::from_fn(n, n, |i, j| xs[i].conv(g, &adj[j]).trace());
    let labels = pairs
        .iter()
        .map(|(a, b)| format!("{}*G0*{}", pair.format_element(a), pair.format_element(b)))
        .collect();
    Ok(GramMatrix { labels, matrix })
}

impl GramMatrix {
    /// `(min eigenvalue, Hermitian defect)`.
    pub fn profile(&self) -> (f64, f64) {
        psd_profile(&self.matrix)
    }

    pub fn check(&self, tol: f64) -> Vec<CheckRecord> {
        let (min, herm) = self.profile();
        vec![
            CheckRecord::numeric("Gram matrix Hermitian", "gram", herm, tol, None),
            CheckRecord::numeric(
                "Gram matrix PSD",
                "gram",
                (-min).max(0.0),
                tol,
                Some(format!("min eigenvalue {min:.3e}")),
            ),
        ]
    }

    /// CSV with a header row of pair labels; entries `re` or `re+imi`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("pair");
        for l in &self.labels {
            let _ = write!(out, ",{l}");
        }
        out.push('\n');
        for (i, l) in self.labels.iter().enumerate() {
            out.push_str(l);
            for j in 0..self.labels.len() {
                let z = self.matrix[(i, j)];
                let re = if z.re.abs() < 1e-15 { 0.0 } else { z.re };
                if z.im.abs() < 1e-15 {
                    let _ = write!(out, ",{re:.12}");
                } else {
                    let _ = write!(out, ",{re:.12}{:+.12}i", z.im);
                }
            }
            out.push('\n');
        }
        out
    }
}
