//! Acceptance suite: one PASS/FAIL line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use hecke_core::coset::{CosetEngine, CosetVector, Level, Side};
use hecke_core::group::{GroupElement, GroupPair, Mat2};
use hecke_core::hecke::{hecke_mul, verify_relation, HeckeElement, RelationInstance};
use hecke_core::modular::{
    ball_size, build_psi, build_tree_ball, default_radius_bound, verify_coset_count, verify_hecke_recursion,
    verify_spectrum,
};
use hecke_core::phi::{Convention, Phi};
use hecke_core::rep::{
    build_t, check_regular_extension, uniform_indicator_model, verify_conv_identity, verify_coset_product,
    verify_relations_0_to_6, UnitaryExtension, RELATION_TAGS,
};
use hecke_core::report::{CheckRecord, Status, VerificationReport};
use hecke_core::runner::RunConfig;
use hecke_core::scalar::{Q, TOL};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run_configs() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(configs_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            name.ends_with(".toml") && name.matches('.').count() == 1
        })
        .collect();
    v.sort();
    v
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn require(records: &[CheckRecord]) -> Result<usize, String> {
    match records.iter().find(|r| r.status != Status::Pass) {
        Some(r) => Err(format!("{} [{}]: {}", r.id, r.tag, r.witness.clone().unwrap_or_default())),
        None => Ok(records.len()),
    }
}

struct Finite {
    name: &'static str,
    engine: CosetEngine,
    pi: UnitaryExtension,
}

fn finite(name: &'static str) -> Finite {
    let cfg = RunConfig::from_file(&configs_dir().join(format!("{name}.toml"))).unwrap();
    let engine = CosetEngine::new(cfg.build_pair().unwrap());
    let text = std::fs::read_to_string(cfg.pi_path().unwrap()).unwrap();
    let pi = UnitaryExtension::from_toml(engine.pair(), &text).unwrap();
    Finite { name, engine, pi }
}

fn finite_pairs() -> Vec<Finite> {
    vec![finite("s3_z2"), finite("s4_s3")]
}

fn modular(p: i64) -> CosetEngine {
    CosetEngine::new(GroupPair::modular(p).unwrap())
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let pairs: Vec<CosetEngine> = finite_pairs().into_iter().map(|f| f.engine).collect();
    let mut n = 0;
    for e in &pairs {
        n += require(&uniform_indicator_model(e).map_err(err)?.verify_oracle().map_err(err)?)?;
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(1) {
        return Err(format!("runtime {elapsed:.2?} exceeds 1 s"));
    }
    Ok(format!("{n} oracle checks on S3/Z2 and S4/S3 in {elapsed:.2?}"))
}

fn structure_constants() -> Outcome {
    let start = Instant::now();
    let f = finite("s4_s3");
    let e = &f.engine;
    let s = e.pair().parse_element("(1 4)").map_err(err)?;
    let d = HeckeElement::double(e, &s);
    let square = hecke_mul(e, &d, &d).map_err(err)?;
    let expected = HeckeElement::unit(e.pair()).scaled(Q::from_integer(3)).add(&d.scaled(Q::from_integer(2)));
    if square != expected {
        return Err(format!("[G0(14)G0]^2 = {}", square.format(e.pair())));
    }
    let mut n = 1;
    for p in [2, 3, 5] {
        let engine = modular(p);
        for k in 1..=2 {
            n += require(&[verify_hecke_recursion(&engine, k).map_err(err)?])?;
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(5) {
        return Err(format!("runtime {elapsed:.2?} exceeds 5 s"));
    }
    Ok(format!("{n} identities (S4/S3 square, T_p recursion k<=2 for p=2,3,5) in {elapsed:.2?}"))
}

fn coset_counts() -> Outcome {
    let mut n = 0;
    for p in [2, 3, 5] {
        let engine = modular(p);
        let sigma = GroupElement::Matrix(Mat2::diag(p, 1));
        let count = engine.decompose_double_right(&sigma).map_err(err)?.len();
        if count as i64 != p + 1 {
            return Err(format!("p={p}: {count} cosets in G0 sigma_p G0"));
        }
        let ball = build_tree_ball(&engine, 4, default_radius_bound(p).max(4)).map_err(err)?;
        for k in 0..=4 {
            n += require(&[verify_coset_count(&engine, &ball, k).map_err(err)?])?;
        }
    }
    Ok(format!("p+1 cosets for sigma_p and {n} det-p^k counts (k<=4, p=2,3,5)"))
}

fn representation_suite() -> Outcome {
    let mut n = 0;
    for f in finite_pairs() {
        let (e, pair) = (&f.engine, f.engine.pair());
        let ext = check_regular_extension(pair, &f.pi).map_err(err)?;
        n += require(&ext.records(TOL))?;
        let t = build_t(pair, &f.pi, TOL).map_err(err)?;
        n += require(&[verify_conv_identity(pair, &t, f.pi.cocycle(), TOL).map_err(err)?])?;
        n += require(&verify_coset_product(e, &f.pi, &t, TOL).map_err(err)?)?;
        let rel = verify_relations_0_to_6(e, &f.pi, &t, &[0, 1, 2, 3, 4, 5, 6], TOL).map_err(err)?;
        for tag in RELATION_TAGS {
            if !rel.iter().any(|r| r.tag == tag) {
                return Err(format!("{}: no record for {tag}", f.name));
            }
        }
        n += require(&rel)?;
        n += require(&uniform_indicator_model(e).map_err(err)?.negative_control().map_err(err)?)?;
    }
    let f = finite("s4_s3");
    let index = f.engine.stabilizer_index(&f.engine.pair().parse_element("(1 4)").map_err(err)?).map_err(err)?;
    if index != 3 {
        return Err(format!("S4/S3: [G0:G0_(14)] = {index}"));
    }
    Ok(format!("{n} records incl. rel0..rel6 and the uniform-model negative control; [G0:G0_(14)] = 3"))
}

fn phi_suite() -> Outcome {
    let mut n = 0;
    for f in finite_pairs() {
        let t = build_t(f.engine.pair(), &f.pi, TOL).map_err(err)?;
        let phi = Phi::new(&f.engine, &t).map_err(err)?;
        n += require(&phi.verify(TOL).map_err(err)?)?;
        n += require(&[phi.verify_composition(Convention::Inverse, TOL).map_err(err)?])?;
    }
    Ok(format!("{n} records (unital *-morphism, Hecke-linearity, composition sweep)"))
}

fn gram_psd() -> Outcome {
    let mut out = Vec::new();
    for f in finite_pairs() {
        let t = build_t(f.engine.pair(), &f.pi, TOL).map_err(err)?;
        let g = Phi::new(&f.engine, &t).map_err(err)?.transversal_gram().map_err(err)?;
        require(&g.check(TOL))?;
        let (min, _) = g.profile();
        out.push(format!("{}: min eigenvalue {min:.3e}", f.name));
    }
    Ok(out.join(", "))
}

fn tree() -> Outcome {
    let mut out = Vec::new();
    for (p, r, rank) in [(3i64, 4usize, 2usize), (5, 3, 3)] {
        let engine = modular(p);
        let ball = build_tree_ball(&engine, r, default_radius_bound(p)).map_err(err)?;
        let expected = ball_size(p as u64, r as u32);
        if ball.len() as u64 != expected {
            return Err(format!("p={p}, r={r}: {} vertices, expected {expected}", ball.len()));
        }
        ball.verify().map_err(err)?;
        let psi = build_psi(&ball).map_err(err)?;
        if psi.rank != rank {
            return Err(format!("p={p}: free rank {}", psi.rank));
        }
        require(&psi.verify(&ball))?;
        out.push(format!("p={p} r={r}: {expected} vertices, N={rank}"));
    }
    let engine = modular(3);
    let (radii, record) = verify_spectrum(&engine, 6, default_radius_bound(3)).map_err(err)?;
    require(&[record])?;
    out.push(format!("p=3 spectral radius {:.4} at r=6 < {:.4}", radii[6], 2.0 * 3f64.sqrt()));
    Ok(out.join("; "))
}

fn refinement() -> Outcome {
    let f = finite("s4_s3");
    let e = &f.engine;
    let pair = e.pair();
    let id = pair.identity();
    let gamma = Level::gamma();
    let finer = e.stabilizer_level(&pair.parse_element("(1 4)").map_err(err)?);

    let mut instances = Vec::new();
    for d in e.all_double_cosets().map_err(err)? {
        let lhs = e.decompose_double_right(&d.rep).map_err(err)?.into_iter().map(|k| (id, k.rep)).collect();
        let rhs = e.decompose_double_left(&d.rep).map_err(err)?.into_iter().map(|k| (k.rep, id)).collect();
        instances.push(RelationInstance::new(gamma.clone(), lhs, rhs));
    }
    let lefts = e.all_cosets(Side::Left, &gamma).map_err(err)?;
    let rights = e.all_cosets(Side::Right, &gamma).map_err(err)?;
    let terms: Vec<(GroupElement, GroupElement)> =
        lefts.iter().flat_map(|a| rights.iter().map(move |b| (a.rep, b.rep))).collect();
    for x in &terms {
        for y in &terms {
            instances.push(RelationInstance::new(gamma.clone(), vec![*x], vec![*y]));
        }
    }
    let text = std::fs::read_to_string(configs_dir().join("s4_s3.instance.toml")).map_err(err)?;
    instances.push(RelationInstance::from_toml(e, &text).map_err(err)?);

    let mut verified = 0;
    for inst in &instances {
        if !verify_relation(e, inst).map_err(err)?.is_valid() {
            continue;
        }
        verified += 1;
        let refined = e.refine_relation(inst, &finer).map_err(|x| format!("{inst:?}: {x}"))?;
        if !verify_relation(e, &refined).map_err(err)?.is_valid() {
            return Err(format!("refined instance fails: {refined:?}"));
        }
    }

    let mut basis = 0;
    for side in [Side::Right, Side::Left] {
        let keys = e.all_cosets(side, &gamma).map_err(err)?;
        for u in &keys {
            for v in &keys {
                let (bu, bv) = (CosetVector::basis(u.clone()), CosetVector::basis(v.clone()));
                let before = e.inner(&bu, &bv).map_err(err)?;
                let after = e
                    .inner(&e.level_embed(&bu, &finer).map_err(err)?, &e.level_embed(&bv, &finer).map_err(err)?)
                    .map_err(err)?;
                if before != after {
                    return Err(format!("isometry fails on {} / {}", u.label(pair), v.label(pair)));
                }
            }
        }
        basis += keys.len();
    }
    Ok(format!(
        "{verified} verified G0-level instances refine to {} and re-verify; level_embed isometric on {basis} basis cosets",
        finer.label(pair)
    ))
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_hecke-pairs");
    let mut names = Vec::new();
    for cfg in run_configs() {
        let run = || {
            let out = Command::new(bin).args(["run-all", "--config"]).arg(&cfg).output().map_err(err)?;
            if !out.status.success() {
                return Err(format!("{}: exit {:?}", cfg.display(), out.status.code()));
            }
            Ok(out.stdout)
        };
        let (a, b) = (run()?, run()?);
        if a != b {
            return Err(format!("{}: reports differ between runs", cfg.display()));
        }
        let text = String::from_utf8(a).map_err(err)?;
        VerificationReport::parse_json(&text).map_err(err)?;
        names.push(cfg.file_stem().unwrap().to_string_lossy().into_owned());
    }
    if names.is_empty() {
        return Err("no run configs found".into());
    }
    Ok(format!("byte-identical JSON reports for {}", names.join(", ")))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("Hecke oracle equivalence", oracle_equivalence),
        ("structure constants", structure_constants),
        ("coset counts", coset_counts),
        ("representation suite", representation_suite),
        ("Phi suite", phi_suite),
        ("operator system Gram PSD", gram_psd),
        ("tree and Psi", tree),
        ("level refinement", refinement),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
