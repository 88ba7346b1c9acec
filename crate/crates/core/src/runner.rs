//! Run configurations and the full verification sweep over one pair.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::coset::{CosetEngine, CosetVector, Level, Side};
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupPair, Mat2, DEFAULT_ORDER_BOUND};
use crate::hecke::{hecke_mul, hecke_star, verify_relation, HeckeElement, RelationInstance};
use crate::modular::{
    ball_size, build_psi, build_tree_ball, default_radius_bound, verify_coset_count, verify_hecke_recursion,
    verify_spectrum,
};
use crate::phi::{Convention, Phi};
use crate::rep::{
    build_t, check_regular_extension, uniform_indicator_model, verify_conv_identity, verify_coset_product,
    verify_positive_definite, verify_relations_0_to_6, UnitaryExtension,
};
use crate::report::{CheckRecord, Format, Status, VerificationReport};
use crate::scalar::TOL;

/// Check groups in execution order.
pub const CHECK_GROUPS: [&str; 6] = ["hecke", "refinement", "rep", "phi", "gram", "tree"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "lowercase", deny_unknown_fields)]
pub enum PairConfig {
    Finite {
        degree: usize,
        generators: Vec<String>,
        gamma_generators: Vec<String>,
        #[serde(default = "default_order_bound")]
        order_bound: usize,
    },
    Modular {
        p: i64,
    },
}

fn default_order_bound() -> usize {
    DEFAULT_ORDER_BOUND
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Text,
    #[default]
    Json,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Text => Format::Text,
            OutputFormat::Json => Format::Json,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeConfig {
    pub radius: Option<usize>,
    pub spectrum_radius: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub name: String,
    /// Path of the π file, relative to the config file.
    #[serde(default)]
    pub pi: Option<String>,
    /// Check groups to run; all of [`CHECK_GROUPS`] when absent.
    #[serde(default)]
    pub checks: Option<Vec<String>>,
    /// Relations `0..=6` for the `rep` group; all when absent.
    #[serde(default)]
    pub relations: Option<Vec<usize>>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub format: OutputFormat,
    pub pair: PairConfig,
    #[serde(default)]
    pub tree: TreeConfig,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_tolerance() -> f64 {
    TOL
}

impl RunConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    fn validate(&self) -> Result<()> {
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::Config("tolerance must be positive".into()));
        }
        if self.pi.is_some() && matches!(self.pair, PairConfig::Modular { .. }) {
            return Err(Error::Config("a pi file requires the finite backend".into()));
        }
        for c in self.checks.iter().flatten() {
            if !CHECK_GROUPS.contains(&c.as_str()) {
                return Err(Error::Config(format!("unknown check group {c:?}")));
            }
        }
        if let Some(r) = self.relations.iter().flatten().find(|&&r| r > 6) {
            return Err(Error::Config(format!("relation {r} out of range 0..=6")));
        }
        Ok(())
    }

    pub fn build_pair(&self) -> Result<GroupPair> {
        match &self.pair {
            PairConfig::Finite { degree, generators, gamma_generators, order_bound } => {
                let g: Vec<&str> = generators.iter().map(String::as_str).collect();
                let h: Vec<&str> = gamma_generators.iter().map(String::as_str).collect();
                GroupPair::finite(self.name.clone(), *degree, &g, &h, *order_bound)
            }
            PairConfig::Modular { p } => GroupPair::modular(*p),
        }
    }

    pub fn pi_path(&self) -> Option<PathBuf> {
        self.pi.as_ref().map(|p| self.base_dir.join(p))
    }

    fn selected(&self, group: &str) -> bool {
        self.checks.as_ref().is_none_or(|c| c.iter().any(|x| x == group))
    }

    fn relation_list(&self) -> Vec<usize> {
        let mut r = self.relations.clone().unwrap_or_else(|| (0..=6).collect());
        r.sort_unstable();
        r.dedup();
        r
    }
}

/// Runs every selected and applicable check group, in a fixed order.
pub fn run_all(config: &RunConfig) -> Result<VerificationReport> {
    let pair = config.build_pair()?;
    let engine = CosetEngine::new(pair);
    let tol = config.tolerance;
    let finite = engine.pair().is_finite();
    let mut records = Vec::new();

    let pi = match (finite, config.pi_path()) {
        (true, Some(path)) if path.is_file() => {
            let text = std::fs::read_to_string(&path)?;
            Some(UnitaryExtension::from_toml(engine.pair(), &text)?)
        }
        _ => None,
    };

    for group in CHECK_GROUPS {
        if !config.selected(group) {
            continue;
        }
        match group {
            "hecke" if finite => records.extend(hecke_checks_finite(&engine)?),
            "hecke" => records.extend(hecke_checks_modular(&engine)?),
            "refinement" => records.extend(refinement_checks(&engine)?),
            "rep" | "phi" | "gram" if !finite => {
                records.push(CheckRecord::with_status(group, group, Status::NotApplicable, "finite pairs only"))
            }
            "rep" | "phi" | "gram" => match &pi {
                None => records.push(CheckRecord::with_status(group, group, Status::Skipped, "no pi file available")),
                Some(pi) => records.extend(rep_group(&engine, pi, group, &config.relation_list(), tol)?),
            },
            "tree" if finite => {
                records.push(CheckRecord::with_status(group, group, Status::NotApplicable, "modular pairs only"))
            }
            "tree" => records.extend(tree_checks(&engine, &config.tree)?),
            _ => unreachable!(),
        }
    }
    Ok(VerificationReport::new(serde_json::to_value(config)?, records))
}

fn rep_group(
    engine: &CosetEngine,
    pi: &UnitaryExtension,
    group: &str,
    relations: &[usize],
    tol: f64,
) -> Result<Vec<CheckRecord>> {
    let pair = engine.pair();
    let ext = check_regular_extension(pair, pi)?;
    if !ext.passed(tol) {
        return Ok(ext.records(tol));
    }
    let t = build_t(pair, pi, tol)?;
    let mut out = Vec::new();
    match group {
        "rep" => {
            out.extend(ext.records(tol));
            out.push(verify_conv_identity(pair, &t, pi.cocycle(), tol)?);
            out.extend(verify_coset_product(engine, pi, &t, tol)?);
            out.extend(verify_relations_0_to_6(engine, pi, &t, relations, tol)?);
            out.push(verify_positive_definite(pair, &t, tol)?);
            out.extend(uniform_indicator_model(engine)?.negative_control()?);
        }
        "phi" => {
            let phi = Phi::new(engine, &t)?;
            out.extend(phi.verify(tol)?);
            out.push(phi.verify_composition(Convention::Inverse, tol)?);
            out.push(phi.verify_composition(Convention::Direct, tol)?);
        }
        "gram" => out.extend(Phi::new(engine, &t)?.transversal_gram()?.check(tol)),
        _ => unreachable!(),
    }
    Ok(out)
}

/// Exact checks on the Hecke algebra of a finite pair.
pub fn hecke_checks_finite(engine: &CosetEngine) -> Result<Vec<CheckRecord>> {
    let pair = engine.pair();
    let f = pair.finite_backend()?;
    let doubles = engine.all_double_cosets()?;
    let basis: Vec<HeckeElement> = doubles.iter().copied().map(HeckeElement::basis).collect();
    let mut out = uniform_indicator_model(engine)?.verify_oracle()?;

    let mut sizes = None;
    for d in &doubles {
        let right = engine.decompose_double_right(&d.rep)?;
        let left = engine.decompose_double_left(&d.rep)?;
        let index = engine.stabilizer_index(&d.rep)?;
        let size = f.double_coset_elements(d.rep.as_index().unwrap()).len();
        if sizes.is_none() && (right.len() != index || left.len() != index || size != index * f.gamma_order()) {
            sizes = Some(format!("{}: {} right, {} left, index {index}, size {size}", d.label(pair), right.len(), left.len()));
        }
    }
    out.push(CheckRecord::from_bool(
        "double cosets split into [G0:G0_s] right and left cosets",
        "decomposition",
        sizes.is_none(),
        sizes.unwrap_or_default(),
    ));

    let unit = HeckeElement::unit(pair);
    let mut unit_bad = None;
    let mut star_bad = None;
    let mut assoc_bad = None;
    for a in &basis {
        if hecke_mul(engine, &unit, a)? != *a || hecke_mul(engine, a, &unit)? != *a {
            unit_bad.get_or_insert_with(|| a.format(pair));
        }
        if hecke_star(engine, &hecke_star(engine, a)) != *a {
            star_bad.get_or_insert_with(|| a.format(pair));
        }
        for b in &basis {
            let ab = hecke_mul(engine, a, b)?;
            if hecke_star(engine, &ab) != hecke_mul(engine, &hecke_star(engine, b), &hecke_star(engine, a))? {
                star_bad.get_or_insert_with(|| format!("{} * {}", a.format(pair), b.format(pair)));
            }
            for c in &basis {
                if hecke_mul(engine, &ab, c)? != hecke_mul(engine, a, &hecke_mul(engine, b, c)?)? {
                    assoc_bad.get_or_insert_with(|| format!("{} {} {}", a.format(pair), b.format(pair), c.format(pair)));
                }
            }
        }
    }
    out.push(CheckRecord::from_bool("[G0] is a two-sided unit", "unit", unit_bad.is_none(), unit_bad.unwrap_or_default()));
    out.push(CheckRecord::from_bool("* is an anti-multiplicative involution", "star", star_bad.is_none(), star_bad.unwrap_or_default()));
    out.push(CheckRecord::from_bool("product is associative on the basis", "associativity", assoc_bad.is_none(), assoc_bad.unwrap_or_default()));
    Ok(out)
}

/// `σ_p` coset count, the `T_{p^k}` recursion for `k ≤ 3` and the
/// determinant coset counts for `k ≤ 4`.
pub fn hecke_checks_modular(engine: &CosetEngine) -> Result<Vec<CheckRecord>> {
    let p = engine.pair().modular_group()?.p();
    let sigma = GroupElement::Matrix(Mat2::diag(p, 1));
    let n = engine.decompose_double_right(&sigma)?.len();
    let mut out = vec![CheckRecord::from_bool(
        format!("p={p}: G0 sigma_p G0 has p+1 right cosets"),
        "coset-count",
        n as i64 == p + 1,
        format!("{n} cosets"),
    )];
    for k in 1..=3 {
        out.push(verify_hecke_recursion(engine, k)?);
    }
    let ball = build_tree_ball(engine, 4, default_radius_bound(p).max(4))?;
    for k in 0..=4 {
        out.push(verify_coset_count(engine, &ball, k)?);
    }
    Ok(out)
}

/// Splits the decomposition identities `⊔ Γx = ΓσΓ = ⊔ yΓ` into each level
/// `Γ_σ` and re-verifies them there, and checks that `level_embed` is an
/// isometry on the full coset basis (finite pairs) or on the `T_p` cosets.
pub fn refinement_checks(engine: &CosetEngine) -> Result<Vec<CheckRecord>> {
    let pair = engine.pair();
    let id = pair.identity();
    let gamma = Level::gamma();
    let (doubles, levels): (Vec<GroupElement>, Vec<Level>) = if pair.is_finite() {
        let d: Vec<_> = engine.all_double_cosets()?.into_iter().map(|d| d.rep).collect();
        let l = d.iter().filter(|s| !pair.in_gamma(s)).map(|s| engine.stabilizer_level(s)).collect();
        (d, l)
    } else {
        let p = pair.modular_group()?.p();
        let s = GroupElement::Matrix(Mat2::diag(p, 1));
        (vec![id, s], vec![engine.stabilizer_level(&s)])
    };
    let mut out = Vec::new();
    for finer in &levels {
        let label = finer.label(pair);
        let mut bad = None;
        let mut count = 0;
        for s in &doubles {
            let lhs = engine.decompose_double_right(s)?.into_iter().map(|k| (id, k.rep)).collect();
            let rhs = engine.decompose_double_left(s)?.into_iter().map(|k| (k.rep, id)).collect();
            let inst = RelationInstance::new(gamma.clone(), lhs, rhs);
            count += 1;
            // refine_relation re-verifies its output
            let ok = verify_relation(engine, &inst)?.is_valid() && engine.refine_relation(&inst, finer).is_ok();
            if !ok {
                bad.get_or_insert_with(|| format!("D|{}", pair.format_element(s)));
            }
        }
        out.push(CheckRecord::from_bool(
            format!("{count} decomposition identities refine to {label} and re-verify"),
            "refinement",
            bad.is_none(),
            bad.unwrap_or_default(),
        ));

        let mut basis = Vec::new();
        for side in [Side::Right, Side::Left] {
            if pair.is_finite() {
                basis.extend(engine.all_cosets(side, &gamma)?);
            } else {
                for s in &doubles {
                    let keys = match side {
                        Side::Right => engine.decompose_double_right(s)?,
                        Side::Left => engine.decompose_double_left(s)?,
                    };
                    basis.extend(keys);
                }
            }
        }
        let mut worst = None;
        for u in &basis {
            for v in &basis {
                if u.side != v.side {
                    continue;
                }
                let (bu, bv) = (CosetVector::basis(u.clone()), CosetVector::basis(v.clone()));
                let before = engine.inner(&bu, &bv)?;
                let after = engine.inner(&engine.level_embed(&bu, finer)?, &engine.level_embed(&bv, finer)?)?;
                if before != after {
                    worst.get_or_insert_with(|| format!("{} vs {}", u.label(pair), v.label(pair)));
                }
            }
        }
        out.push(CheckRecord::from_bool(
            format!("level_embed into {label} is isometric on {} basis cosets", basis.len()),
            "refinement",
            worst.is_none(),
            worst.unwrap_or_default(),
        ));
    }
    Ok(out)
}

/// Ball invariants, the word labeling and the truncated spectra.
pub fn tree_checks(engine: &CosetEngine, cfg: &TreeConfig) -> Result<Vec<CheckRecord>> {
    let p = engine.pair().modular_group()?.p();
    let bound = default_radius_bound(p);
    let radius = cfg.radius.unwrap_or(4.min(bound));
    let ball = build_tree_ball(engine, radius, bound)?;
    let expected = ball_size(p as u64, radius as u32);
    let mut out = vec![
        CheckRecord::from_bool(
            format!("p={p}, r={radius}: ball has {expected} vertices"),
            "tree",
            ball.len() as u64 == expected,
            format!("{} vertices", ball.len()),
        ),
        match ball.verify() {
            Ok(()) => CheckRecord::pass(format!("p={p}, r={radius}: (p+1)-regular tree invariants"), "tree"),
            Err(e) => CheckRecord::fail(format!("p={p}, r={radius}: (p+1)-regular tree invariants"), "tree", e.to_string()),
        },
    ];
    match build_psi(&ball) {
        Ok(psi) => out.extend(psi.verify(&ball)),
        Err(Error::PsiUndefined(_)) => {
            out.push(CheckRecord::with_status("psi", "psi", Status::NotApplicable, "p + 1 is odd"))
        }
        Err(e) => return Err(e),
    }
    let spectrum_radius = cfg.spectrum_radius.unwrap_or(radius);
    out.push(verify_spectrum(engine, spectrum_radius, bound)?.1);
    Ok(out)
}
