use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use hecke_core::coset::{CosetEngine, CosetVector, Level, Side};
use hecke_core::group::{Backend, GroupElement, GroupPair};
use hecke_core::hecke::{hecke_act_left, hecke_act_right, hecke_mul, hecke_star, verify_relation, HeckeElement, RelationInstance, Verdict};
use hecke_core::modular::{
    build_psi, build_tree_ball, default_radius_bound, depth_counts, format_word, truncated_spectrum, FreeWordLabel,
};
use hecke_core::phi::{gram, Convention, Phi};
use hecke_core::rep::{build_t, check_regular_extension, verify_conv_identity, verify_relations_0_to_6, UnitaryExtension};
use hecke_core::report::{CheckRecord, Format, VerificationReport};
use hecke_core::runner::{run_all, RunConfig};
use hecke_core::scalar::{format_q, parse_q, TOL};

#[derive(Parser)]
#[command(name = "hecke-pairs", version, about = "Exact Hecke algebra computations and verification reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Group pair summary.
    Pair {
        #[command(subcommand)]
        cmd: PairCmd,
    },
    /// Coset canonicalization, decomposition and refinement.
    Coset {
        #[command(subcommand)]
        cmd: CosetCmd,
    },
    /// Hecke algebra arithmetic.
    Hecke {
        #[command(subcommand)]
        cmd: HeckeCmd,
    },
    /// Representation checks for a unitary extension.
    Rep {
        #[command(subcommand)]
        cmd: RepCmd,
    },
    /// The diagonal representation and Gram matrices.
    Phi {
        #[command(subcommand)]
        cmd: PhiCmd,
    },
    /// Coset tree of the modular pair.
    Tree {
        #[command(subcommand)]
        cmd: TreeCmd,
    },
    /// Every applicable check for a configured pair.
    RunAll {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        /// Write the report here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct PairArg {
    /// Run config describing the pair.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Subcommand)]
enum PairCmd {
    Info(PairArg),
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Right,
    Left,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::Right => Side::Right,
            SideArg::Left => Side::Left,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Subcommand)]
enum CosetCmd {
    /// Canonical key of `g` at a level.
    Canon {
        #[command(flatten)]
        pair: PairArg,
        #[arg(long, value_enum, default_value = "right")]
        side: SideArg,
        /// Elements s whose subgroups G0_s are intersected; none means G0.
        #[arg(long = "level", value_delimiter = '|')]
        level: Vec<String>,
        element: String,
    },
    /// One-sided cosets making up G0 s G0.
    Decompose {
        #[command(flatten)]
        pair: PairArg,
        #[arg(long, value_enum, default_value = "right")]
        side: SideArg,
        sigma: String,
    },
    /// Splits the G0-coset of `g` into cosets of the finer level G0_s.
    Split {
        #[command(flatten)]
        pair: PairArg,
        #[arg(long, value_enum, default_value = "right")]
        side: SideArg,
        /// s with finer level G0_s.
        #[arg(long)]
        finer: String,
        element: String,
    },
}

#[derive(Subcommand)]
enum HeckeCmd {
    /// Product of two elements written `c@s; c@s; ...`.
    Mul {
        #[command(flatten)]
        pair: PairArg,
        a: String,
        b: String,
    },
    /// Action on a coset vector `c@g; ...` at level G0.
    Act {
        #[command(flatten)]
        pair: PairArg,
        /// `right` acts on right cosets from the left, `left` on left cosets from the right.
        #[arg(long, value_enum, default_value = "right")]
        side: SideArg,
        element: String,
        vector: String,
    },
    Star {
        #[command(flatten)]
        pair: PairArg,
        element: String,
    },
    /// Decides a relation instance file.
    VerifyRelation {
        #[command(flatten)]
        pair: PairArg,
        #[arg(long)]
        instance: PathBuf,
    },
}

#[derive(Args)]
struct PiArgs {
    #[command(flatten)]
    pair: PairArg,
    /// Overrides the pi file named in the config.
    #[arg(long)]
    pi: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    #[arg(long, default_value_t = TOL)]
    tolerance: f64,
}

#[derive(Subcommand)]
enum RepCmd {
    Check {
        #[command(flatten)]
        args: PiArgs,
        /// A relation number 0..6, or `all`.
        #[arg(long, default_value = "all")]
        relation: String,
    },
}

#[derive(Subcommand)]
enum PhiCmd {
    Check {
        #[command(flatten)]
        args: PiArgs,
    },
    Gram {
        #[command(flatten)]
        args: PiArgs,
        /// TOML file with `pairs = [["s1", "s2"], ...]`; all coset pairs when absent.
        #[arg(long)]
        pairs: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BallArgs {
    #[arg(short)]
    p: i64,
    #[arg(short, default_value_t = 2)]
    r: usize,
}

#[derive(Subcommand)]
enum TreeCmd {
    Ball {
        #[command(flatten)]
        ball: BallArgs,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    Psi {
        #[command(flatten)]
        ball: BallArgs,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    Spectrum {
        #[command(flatten)]
        ball: BallArgs,
        /// Prints `r,spectral_radius` rows for radii 0..=r instead.
        #[arg(long)]
        csv: bool,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(false)` when a check failed.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Pair { cmd: PairCmd::Info(a) } => pair_info(&a),
        Command::Coset { cmd } => coset(cmd),
        Command::Hecke { cmd } => hecke(cmd),
        Command::Rep { cmd: RepCmd::Check { args, relation } } => {
            let which: Vec<usize> = if relation == "all" {
                (0..=6).collect()
            } else {
                let r: usize = relation.parse().context("relation must be 0..6 or all")?;
                if r > 6 {
                    bail!("relation must be 0..6 or all");
                }
                vec![r]
            };
            with_pi(&args, |engine, pi, t| {
                let pair = engine.pair();
                let mut recs = check_regular_extension(pair, pi)?.records(args.tolerance);
                recs.push(verify_conv_identity(pair, t, pi.cocycle(), args.tolerance)?);
                recs.extend(verify_relations_0_to_6(engine, pi, t, &which, args.tolerance)?);
                Ok(recs)
            })
        }
        Command::Phi { cmd: PhiCmd::Check { args } } => with_pi(&args, |engine, _, t| {
            let phi = Phi::new(engine, t)?;
            let mut recs = phi.verify(args.tolerance)?;
            recs.push(phi.verify_composition(Convention::Inverse, args.tolerance)?);
            recs.push(phi.verify_composition(Convention::Direct, args.tolerance)?);
            Ok(recs)
        }),
        Command::Phi { cmd: PhiCmd::Gram { args, pairs, csv } } => with_pi(&args, |engine, _, t| {
            let g = match &pairs {
                None => Phi::new(engine, t)?.transversal_gram()?,
                Some(path) => gram(engine, t, &read_pairs(engine.pair(), path)?)?,
            };
            if let Some(out) = &csv {
                fs::write(out, g.to_csv()).with_context(|| format!("writing {}", out.display()))?;
            }
            Ok(g.check(args.tolerance))
        }),
        Command::Tree { cmd } => tree(cmd),
        Command::RunAll { config, format, output } => {
            let cfg = RunConfig::from_file(&config).with_context(|| format!("reading {}", config.display()))?;
            let report = run_all(&cfg)?;
            let fmt = format.map(Format::from).unwrap_or(cfg.format.into());
            let doc = report.emit(fmt)?;
            match output {
                Some(path) => fs::write(&path, doc).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{doc}"),
            }
            Ok(!report.has_failures())
        }
    }
}

fn load(a: &PairArg) -> Result<(RunConfig, CosetEngine)> {
    let cfg = RunConfig::from_file(&a.config).with_context(|| format!("reading {}", a.config.display()))?;
    let pair = cfg.build_pair()?;
    Ok((cfg, CosetEngine::new(pair)))
}

fn pair_info(a: &PairArg) -> Result<bool> {
    let (_, engine) = load(a)?;
    let pair = engine.pair();
    println!("name: {}", pair.name());
    match pair.backend() {
        Backend::Finite(f) => {
            println!("|G| = {}, |G0| = {}, [G:G0] = {}", f.order(), f.gamma_order(), f.order() / f.gamma_order());
            let gens: Vec<_> = pair.generators().iter().map(|g| pair.format_element(g)).collect();
            let hgens: Vec<_> = pair.gamma_generators().iter().map(|g| pair.format_element(g)).collect();
            println!("generators of G: {}", gens.join(", "));
            println!("generators of G0: {}", hgens.join(", "));
            let doubles = engine.all_double_cosets()?;
            println!("double cosets: {}", doubles.len());
            for d in doubles {
                println!("  {}  [G0:G0_s] = {}", d.label(pair), engine.stabilizer_index(&d.rep)?);
            }
        }
        Backend::Modular(m) => {
            let p = m.p();
            println!("p = {p}; G0 = determinant-one classes; sigma_p = diag({p},1)");
            println!("default ball radius bound: {}", default_radius_bound(p));
        }
    }
    Ok(true)
}

fn level_of(engine: &CosetEngine, elems: &[String]) -> Result<Level> {
    let pair = engine.pair();
    let sigmas = elems.iter().map(|s| pair.parse_element(s)).collect::<hecke_core::Result<Vec<_>>>()?;
    Ok(engine.level(&sigmas))
}

fn coset(cmd: CosetCmd) -> Result<bool> {
    match cmd {
        CosetCmd::Canon { pair, side, level, element } => {
            let (_, engine) = load(&pair)?;
            let level = level_of(&engine, &level)?;
            let g = engine.pair().parse_element(&element)?;
            println!("{}", engine.canon_coset(side.into(), &level, &g)?.label(engine.pair()));
        }
        CosetCmd::Decompose { pair, side, sigma } => {
            let (_, engine) = load(&pair)?;
            let s = engine.pair().parse_element(&sigma)?;
            let keys = match side {
                SideArg::Right => engine.decompose_double_right(&s)?,
                SideArg::Left => engine.decompose_double_left(&s)?,
            };
            println!("{}: {} cosets", engine.double_key(&s).label(engine.pair()), keys.len());
            for k in keys {
                println!("{}", k.label(engine.pair()));
            }
        }
        CosetCmd::Split { pair, side, finer, element } => {
            let (_, engine) = load(&pair)?;
            let p = engine.pair();
            let finer = engine.stabilizer_level(&p.parse_element(&finer)?);
            let key = engine.canon_coset(side.into(), &Level::gamma(), &p.parse_element(&element)?)?;
            let pieces = engine.split_coset(&key, &finer)?;
            println!("{} splits into {} cosets of {}", key.label(p), pieces.len(), finer.label(p));
            for k in pieces {
                println!("{}", k.label(p));
            }
        }
    }
    Ok(true)
}

fn parse_vector(engine: &CosetEngine, side: Side, text: &str) -> Result<CosetVector> {
    let pair = engine.pair();
    let gamma = Level::gamma();
    let mut v = CosetVector::zero(side, gamma.clone());
    for term in text.split(';').map(str::trim).filter(|t| !t.is_empty() && *t != "0") {
        let (c, g) = match term.split_once('@') {
            Some((c, g)) => (parse_q(c)?, g),
            None => (parse_q("1")?, term),
        };
        v.add_term(engine.canon_coset(side, &gamma, &pair.parse_element(g)?)?, c)?;
    }
    Ok(v)
}

fn format_vector(pair: &GroupPair, v: &CosetVector) -> String {
    if v.is_zero() {
        return "0".into();
    }
    v.iter().map(|(k, c)| format!("{}@{}", format_q(c), k.label(pair))).collect::<Vec<_>>().join("; ")
}

fn hecke(cmd: HeckeCmd) -> Result<bool> {
    match cmd {
        HeckeCmd::Mul { pair, a, b } => {
            let (_, engine) = load(&pair)?;
            let x = HeckeElement::parse(&engine, &a)?;
            let y = HeckeElement::parse(&engine, &b)?;
            println!("{}", hecke_mul(&engine, &x, &y)?.format(engine.pair()));
        }
        HeckeCmd::Act { pair, side, element, vector } => {
            let (_, engine) = load(&pair)?;
            let h = HeckeElement::parse(&engine, &element)?;
            let v = parse_vector(&engine, side.into(), &vector)?;
            let out = match side {
                SideArg::Right => hecke_act_left(&engine, &h, &v)?,
                SideArg::Left => hecke_act_right(&engine, &h, &v)?,
            };
            println!("{}", format_vector(engine.pair(), &out));
        }
        HeckeCmd::Star { pair, element } => {
            let (_, engine) = load(&pair)?;
            let h = HeckeElement::parse(&engine, &element)?;
            println!("{}", hecke_star(&engine, &h).format(engine.pair()));
        }
        HeckeCmd::VerifyRelation { pair, instance } => {
            let (_, engine) = load(&pair)?;
            let text = fs::read_to_string(&instance).with_context(|| format!("reading {}", instance.display()))?;
            let inst = RelationInstance::from_toml(&engine, &text)?;
            return Ok(match verify_relation(&engine, &inst)? {
                Verdict::Valid => {
                    println!("valid");
                    true
                }
                Verdict::Invalid { witness } => {
                    println!("invalid: {witness}");
                    false
                }
            });
        }
    }
    Ok(true)
}

fn with_pi(
    args: &PiArgs,
    body: impl FnOnce(&CosetEngine, &UnitaryExtension, &hecke_core::rep::TCoefficients) -> Result<Vec<CheckRecord>>,
) -> Result<bool> {
    if args.tolerance.is_nan() || args.tolerance <= 0.0 {
        bail!("tolerance must be positive");
    }
    let (cfg, engine) = load(&args.pair)?;
    let path = match (&args.pi, cfg.pi_path()) {
        (Some(p), _) => p.clone(),
        (None, Some(p)) => p,
        (None, None) => bail!("no pi file: pass --pi or set pi in the config"),
    };
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let pi = UnitaryExtension::from_toml(engine.pair(), &text)?;
    let ext = check_regular_extension(engine.pair(), &pi)?;
    let records = if ext.passed(args.tolerance) {
        let t = build_t(engine.pair(), &pi, args.tolerance)?;
        body(&engine, &pi, &t)?
    } else {
        ext.records(args.tolerance)
    };
    let echo = serde_json::json!({ "config": args.pair.config, "pi": path, "tolerance": args.tolerance });
    let report = VerificationReport::new(echo, records);
    print!("{}", report.emit(args.format.into())?);
    Ok(!report.has_failures())
}

#[derive(serde::Deserialize)]
struct PairsFile {
    pairs: Vec<[String; 2]>,
}

fn read_pairs(pair: &GroupPair, path: &Path) -> Result<Vec<(GroupElement, GroupElement)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: PairsFile = toml::from_str(&text)?;
    file.pairs
        .iter()
        .map(|[a, b]| Ok((pair.parse_element(a)?, pair.parse_element(b)?)))
        .collect()
}

fn ball_of(args: &BallArgs) -> Result<(CosetEngine, hecke_core::modular::TreeBall)> {
    let engine = CosetEngine::new(GroupPair::modular(args.p)?);
    let ball = build_tree_ball(&engine, args.r, default_radius_bound(args.p))?;
    Ok((engine, ball))
}

fn write_dot(engine: &CosetEngine, ball: &hecke_core::modular::TreeBall, psi: Option<&FreeWordLabel>, out: &Path) -> Result<()> {
    fs::write(out, ball.to_dot(engine, psi)).with_context(|| format!("writing {}", out.display()))
}

fn tree(cmd: TreeCmd) -> Result<bool> {
    match cmd {
        TreeCmd::Ball { ball, dot } => {
            let (engine, b) = ball_of(&ball)?;
            let ok = b.verify().is_ok();
            println!("p = {}, r = {}: {} vertices, {} edges", ball.p, ball.r, b.len(), b.edge_count());
            for (d, n) in depth_counts(&b) {
                println!("  depth {d}: {n}");
            }
            println!("tree invariants: {}", if ok { "ok" } else { "violated" });
            if let Some(out) = dot {
                write_dot(&engine, &b, None, &out)?;
            }
            Ok(ok)
        }
        TreeCmd::Psi { ball, dot } => {
            let (engine, b) = ball_of(&ball)?;
            let psi = build_psi(&b)?;
            for (v, w) in psi.words.iter().enumerate() {
                println!("{}\t{}", b.vertices[v].label(engine.pair()), format_word(w));
            }
            let recs = psi.verify(&b);
            for r in &recs {
                eprintln!("{}  {}", r.status.tag(), r.id);
            }
            if let Some(out) = dot {
                write_dot(&engine, &b, Some(&psi), &out)?;
            }
            Ok(recs.iter().all(CheckRecord::passed))
        }
        TreeCmd::Spectrum { ball, csv } => {
            if csv {
                let engine = CosetEngine::new(GroupPair::modular(ball.p)?);
                println!("r,vertices,spectral_radius");
                for r in 0..=ball.r {
                    let b = build_tree_ball(&engine, r, default_radius_bound(ball.p))?;
                    let ev = truncated_spectrum(&b);
                    let rho = ev.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                    println!("{r},{},{rho:.12}", b.len());
                }
            } else {
                let (_, b) = ball_of(&ball)?;
                for x in truncated_spectrum(&b) {
                    let x = if x.abs() < 5e-13 { 0.0 } else { x };
                    println!("{x:.12}");
                }
            }
            Ok(true)
        }
    }
}
