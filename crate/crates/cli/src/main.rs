mod records;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use spectra::construct::{
    build_intermediate_spectrum, dense_part, density_for, family_variants, max_dimension,
    IntermediateSpec,
};
use spectra::dimension::{
    beurling_dim_estimate, entropy_dim_closed_form, support_hausdorff_dim, CentersPolicy,
    DimensionEstimate, ScaleGrid,
};
use spectra::treemap::{alpha, enumerate_spectrum, Bound, KickMode, SpectrumPoint, TreeMappingSpec};
use spectra::verify::{
    check_distinct_lines, check_orthogonality, check_projection_orthogonality, gram_unitarity,
    q_sum, SamplingBox,
};
use spectra::{AdicPoint, Digit, MatrixParams};

use records::{read_points, write_points, Format};

/// Spectra of Sierpinski-type self-affine measures: generation, exact
/// verification and dimension analysis.
#[derive(Parser)]
#[command(name = "spectra", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit spectrum points as JSON lines or CSV.
    Gen(GenArgs),
    /// Exact orthogonality, line and projection checks on a point set.
    Verify(VerifyArgs),
    /// Ball-counting dimension estimate with closed-form references.
    Dim(DimArgs),
    /// Build an intermediate-dimension spectrum and report on it.
    Construct(ConstructArgs),
    /// Q-sums over a point set at sampled frequencies.
    Qsum(QsumArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Coherent,
    Literal,
}

impl From<Mode> for KickMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Coherent => KickMode::Coherent,
            Mode::Literal => KickMode::Literal,
        }
    }
}

fn parse_pair(s: &str) -> std::result::Result<(i64, i64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected X,Y, got {s:?}"))?;
    let a = a.trim().parse().map_err(|e| format!("bad X in {s:?}: {e}"))?;
    let b = b.trim().parse().map_err(|e| format!("bad Y in {s:?}: {e}"))?;
    Ok((a, b))
}

fn parse_xi(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected X,Y, got {s:?}"))?;
    let a: f64 = a.trim().parse().map_err(|e| format!("bad X in {s:?}: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("bad Y in {s:?}: {e}"))?;
    if !a.is_finite() || !b.is_finite() {
        return Err(format!("frequency {s:?} is not finite"));
    }
    Ok((a, b))
}

fn parse_scales(s: &str) -> std::result::Result<(u32, u32), String> {
    let (a, b) = s
        .split_once("..")
        .or_else(|| s.split_once(','))
        .ok_or_else(|| format!("expected LO..HI, got {s:?}"))?;
    let a = a.trim().parse().map_err(|e| format!("bad LO in {s:?}: {e}"))?;
    let b = b.trim().trim_start_matches('=').parse().map_err(|e| format!("bad HI in {s:?}: {e}"))?;
    Ok((a, b))
}

#[derive(Args, Debug, Clone, Serialize)]
struct SetArgs {
    #[arg(long, default_value_t = 1)]
    q1: u32,
    #[arg(long, default_value_t = 1)]
    q2: u32,
    /// All words of length at most N.
    #[arg(long, conflicts_with = "range")]
    level: Option<u32>,
    /// All indices |k| <= K.
    #[arg(long)]
    range: Option<i64>,
    /// Target dimension of an intermediate spectrum; canonical set if absent.
    #[arg(long = "t", visible_alias = "construct-t")]
    t: Option<f64>,
    /// Kick digit X,Y (default (q1/4, -q2/4)).
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    kick: Option<(i64, i64)>,
    #[arg(long, value_enum, default_value_t = Mode::Coherent)]
    mode: Mode,
    /// Seed for the offset variant bits of an intermediate spectrum.
    #[arg(long)]
    variant_seed: Option<u64>,
}

impl SetArgs {
    fn params(&self) -> Result<MatrixParams> {
        Ok(MatrixParams::new(self.q1, self.q2)?)
    }

    fn bound(&self) -> Result<Bound> {
        Ok(match (self.level, self.range) {
            (Some(n), _) => Bound::Level(n),
            (None, Some(k)) if k < 0 => bail!("--range must be nonnegative"),
            (None, Some(k)) => Bound::Index(k),
            (None, None) => Bound::Level(3),
        })
    }

    /// Word length covering the bound.
    fn depth(&self) -> Result<u32> {
        Ok(match self.bound()? {
            Bound::Level(n) => n,
            Bound::Index(k) => (0..=39).find(|&n| alpha(n).map_or(true, |a| a >= k)).unwrap_or(39),
        })
    }

    fn intermediate(&self) -> Result<Option<IntermediateSpec>> {
        let Some(t) = self.t else {
            if self.kick.is_some() || self.variant_seed.is_some() {
                bail!("--kick and --variant-seed need --t");
            }
            return Ok(None);
        };
        let p = self.params()?;
        let kick = self.kick.map(|(x, y)| Digit::new(x, y));
        let mut spec = IntermediateSpec::new(t, &p, kick, self.mode.into())?;
        spec.variant_seed = self.variant_seed;
        Ok(Some(spec))
    }

    fn generate(&self) -> Result<Vec<SpectrumPoint>> {
        let p = self.params()?;
        let bound = self.bound()?;
        Ok(match self.intermediate()? {
            Some(spec) => build_intermediate_spectrum(&spec, bound)?.prefix.points,
            None => enumerate_spectrum(&TreeMappingSpec::Canonical, &p, bound)?.points,
        })
    }
}

#[derive(Args, Debug, Serialize)]
struct GenArgs {
    #[command(flatten)]
    set: SetArgs,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    format: Format,
}

#[derive(Args, Debug, Serialize)]
struct SourceArgs {
    #[command(flatten)]
    set: SetArgs,
    /// Read points from a JSON-lines or CSV file ("-" for stdin) instead of
    /// generating them.
    #[arg(long)]
    input: Option<PathBuf>,
}

impl SourceArgs {
    fn points(&self) -> Result<Vec<SpectrumPoint>> {
        match &self.input {
            Some(path) => {
                if self.set.level.is_some() || self.set.range.is_some() || self.set.t.is_some() {
                    bail!("--input cannot be combined with --level, --range or --t");
                }
                let p = self.set.params()?;
                if path.as_os_str() == "-" {
                    read_points(io::stdin().lock(), &p)
                } else {
                    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
                    read_points(io::BufReader::new(f), &p).with_context(|| format!("reading {}", path.display()))
                }
            }
            None => self.set.generate(),
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Also check that the Gram matrix of the set is the identity (needs 3^n points).
    #[arg(long)]
    unitarity: bool,
    /// Also check Q <= 1 at this many sampled frequencies.
    #[arg(long, default_value_t = 0)]
    qsum_samples: usize,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Violations listed per check.
    #[arg(long, default_value_t = 20)]
    max_report: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Part {
    All,
    Dense,
    Lacunary,
}

#[derive(Args, Debug, Serialize)]
struct DimArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Scale exponents LO..HI for radii (3q2)^j.
    #[arg(long, value_parser = parse_scales)]
    scales: Option<(u32, u32)>,
    /// Largest scale exponent when --scales is absent.
    #[arg(long)]
    depth: Option<u32>,
    /// Part of an intermediate spectrum to analyse.
    #[arg(long, value_enum, default_value_t = Part::All)]
    part: Part,
    #[arg(long, default_value_t = 2048)]
    max_centers: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    format: Format,
    /// Print the closed-form references only.
    #[arg(long)]
    closed_forms_only: bool,
}

#[derive(Args, Debug, Serialize)]
struct ConstructArgs {
    #[arg(long, default_value_t = 4)]
    q1: u32,
    #[arg(long, default_value_t = 4)]
    q2: u32,
    #[arg(long = "t", visible_alias = "construct-t")]
    t: f64,
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    kick: Option<(i64, i64)>,
    #[arg(long, value_enum, default_value_t = Mode::Coherent)]
    mode: Mode,
    #[arg(long, default_value_t = 364)]
    range: i64,
    /// Word length of the dense part used for its dimension estimate.
    #[arg(long, default_value_t = 12)]
    depth: u32,
    /// Number of family variants to build and compare.
    #[arg(long, default_value_t = 1)]
    variants: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Serialize)]
struct QsumArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Explicit frequency X,Y (repeatable); replaces sampling.
    #[arg(long, value_parser = parse_xi, allow_hyphen_values = true)]
    xi: Vec<(f64, f64)>,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn emit(out: &mut impl Write, v: serde_json::Value) -> Result<()> {
    serde_json::to_writer(&mut *out, &v)?;
    out.write_all(b"\n")?;
    Ok(())
}

fn cmd_gen(args: &GenArgs, out: &mut impl Write) -> Result<u8> {
    let p = args.set.params()?;
    let points = args.set.generate()?;
    eprintln!("{}", json!({ "config": args }));
    write_points(out, &points, &p, args.format)?;
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs, out: &mut impl Write) -> Result<u8> {
    let p = args.source.set.params()?;
    let points = args.source.points()?;
    emit(out, json!({ "config": args }))?;
    let mut ok = true;

    let orth = check_orthogonality(&points, &p, args.seed);
    ok &= orth.passed();
    emit(out, json!({ "check": "orthogonality", "points": points.len(), "pairs_checked": orth.pairs_checked,
        "exhaustive": orth.exhaustive, "violations": orth.violations.len(), "passed": orth.passed() }))?;
    for v in orth.violations.iter().take(args.max_report) {
        emit(out, json!({ "violation": v }))?;
    }

    let lines = check_distinct_lines(&points);
    ok &= lines.passed();
    emit(out, json!({ "check": "lines", "shared_x": lines.shared_x.len(), "shared_y": lines.shared_y.len(),
        "passed": lines.passed() }))?;
    for pair in lines.shared_x.iter().take(args.max_report) {
        emit(out, json!({ "violation": { "shared_x": pair } }))?;
    }
    for pair in lines.shared_y.iter().take(args.max_report) {
        emit(out, json!({ "violation": { "shared_y": pair } }))?;
    }

    let proj = check_projection_orthogonality(&points, &p, args.seed);
    ok &= proj.passed();
    emit(out, json!({ "check": "projections", "pairs_checked": proj.pairs_checked, "exhaustive": proj.exhaustive,
        "x_violations": proj.x_violations.len(), "y_violations": proj.y_violations.len(), "passed": proj.passed() }))?;

    let adic: Vec<AdicPoint> = points.iter().map(|s| s.point.clone()).collect();
    if args.unitarity {
        let n = (0..=8u32)
            .find(|&n| 3usize.pow(n) == points.len())
            .with_context(|| format!("--unitarity needs 3^n points with n <= 8, got {}", points.len()))?;
        let dev = gram_unitarity(n, &adic, &p)?;
        let pass = dev < args.tolerance;
        ok &= pass;
        emit(out, json!({ "check": "unitarity", "level": n, "deviation": dev, "passed": pass }))?;
    }
    if args.qsum_samples > 0 {
        let xs = SamplingBox::new(&p).samples(args.qsum_samples, args.seed);
        let worst = xs
            .iter()
            .map(|xi| q_sum(*xi, &adic, &p, 1e-12).upper)
            .fold(f64::NEG_INFINITY, f64::max);
        let pass = worst <= 1.0 + args.tolerance;
        ok &= pass;
        emit(out, json!({ "check": "qsum_bound", "samples": xs.len(), "max_upper": worst, "passed": pass }))?;
    }
    emit(out, json!({ "summary": { "passed": ok } }))?;
    Ok(if ok { 0 } else { 1 })
}

fn references(p: &MatrixParams) -> Vec<(&'static str, f64)> {
    vec![
        ("beurling_upper_bound", max_dimension(p)),
        ("entropy_dimension", entropy_dim_closed_form(p).dim_e),
        ("support_hausdorff_dimension", support_hausdorff_dim(p).value),
    ]
}

fn write_dim(out: &mut impl Write, est: &DimensionEstimate, refs: &[(&str, f64)], format: Format) -> Result<()> {
    match format {
        Format::Jsonl => {
            for (h, c) in est.scales.iter().zip(&est.counts) {
                emit(out, json!({ "h": h, "count": c, "log_h": h.ln(), "log_count": (*c as f64).ln() }))?;
            }
            emit(out, json!({ "slope": est.slope, "intercept": est.intercept, "fit_residual": est.fit_residual,
                "window": est.window, "centers_used": est.centers_used }))?;
            for (name, v) in refs {
                emit(out, json!({ "reference": name, "value": v }))?;
            }
        }
        Format::Csv => {
            writeln!(out, "h,count,log_h,log_count")?;
            for (h, c) in est.scales.iter().zip(&est.counts) {
                writeln!(out, "{h},{c},{},{}", h.ln(), (*c as f64).ln())?;
            }
            writeln!(out, "# slope,{}", est.slope)?;
            writeln!(out, "# fit_residual,{}", est.fit_residual)?;
            for (name, v) in refs {
                writeln!(out, "# {name},{v}")?;
            }
        }
    }
    Ok(())
}

fn cmd_dim(args: &DimArgs, out: &mut impl Write) -> Result<u8> {
    let set = &args.source.set;
    let p = set.params()?;
    let mut refs = references(&p);
    if args.closed_forms_only {
        emit(out, json!({ "config": args }))?;
        for (name, v) in &refs {
            emit(out, json!({ "reference": name, "value": v }))?;
        }
        return Ok(0);
    }
    let points: Vec<AdicPoint> = match (args.part, set.intermediate()?) {
        (Part::All, _) => args.source.points()?.into_iter().map(|s| s.point).collect(),
        (part, Some(spec)) => {
            if args.source.input.is_some() {
                bail!("--part needs a generated intermediate spectrum");
            }
            let built = build_intermediate_spectrum(&spec, set.bound()?)?;
            let chosen = if matches!(part, Part::Dense) { built.dense() } else { built.lacunary() };
            chosen.into_iter().map(|s| s.point).collect()
        }
        (_, None) => bail!("--part dense|lacunary needs --t"),
    };
    if points.is_empty() {
        bail!("the selected part is empty");
    }
    let (lo, hi) = match args.scales {
        Some(s) => s,
        None => (0, args.depth.unwrap_or(set.depth()?).max(3)),
    };
    let grid = ScaleGrid::for_params(&p, lo, hi)?;
    let policy = CentersPolicy {
        max_centers: args.max_centers,
        seed: args.seed,
    };
    let est = beurling_dim_estimate(&points, &p, &grid, &policy)?;
    if let Some(t) = set.t {
        refs.push(("target", t));
        if t == 0.0 {
            refs.push(("lacunary", 0.0));
        }
    }
    if matches!(args.part, Part::Lacunary) {
        refs.push(("lacunary", 0.0));
    }
    if matches!(args.format, Format::Jsonl) {
        emit(out, json!({ "config": args }))?;
    } else {
        writeln!(out, "# config,{}", serde_json::to_string(args)?)?;
    }
    write_dim(out, &est, &refs, args.format)?;
    Ok(0)
}

fn cmd_construct(args: &ConstructArgs, out: &mut impl Write) -> Result<u8> {
    let p = MatrixParams::new(args.q1, args.q2)?;
    if args.range < 0 {
        bail!("--range must be nonnegative");
    }
    let kick = args.kick.map(|(x, y)| Digit::new(x, y));
    let spec = IntermediateSpec::new(args.t, &p, kick, args.mode.into())?;
    let bound = Bound::Index(args.range);
    let built = build_intermediate_spectrum(&spec, bound)?;
    let dense_deep = dense_part(&spec, args.depth)?;
    emit(out, json!({ "config": args }))?;
    emit(out, json!({ "construction": {
        "t": args.t, "density": density_for(args.t, &p)?, "max_dimension": max_dimension(&p),
        "kick": spec.kick, "points": built.prefix.len(), "dense": built.dense().len(),
        "lacunary": built.lacunary().len(), "dense_perturbed": built.dense_perturbed } }))?;

    let mut ok = true;
    let orth = check_orthogonality(&built.prefix.points, &p, args.seed);
    let lines = check_distinct_lines(&built.prefix.points);
    let proj = check_projection_orthogonality(&built.prefix.points, &p, args.seed);
    ok &= orth.passed() && lines.passed() && proj.passed();
    emit(out, json!({ "check": "orthogonality", "violations": orth.violations.len(), "passed": orth.passed() }))?;
    for v in orth.violations.iter().take(20) {
        emit(out, json!({ "violation": v }))?;
    }
    emit(out, json!({ "check": "lines", "passed": lines.passed() }))?;
    emit(out, json!({ "check": "projections", "passed": proj.passed() }))?;

    let hi = args.depth.max(3);
    let grid = ScaleGrid::for_params(&p, 0, hi)?;
    let policy = CentersPolicy::default();
    let est = |pts: &[AdicPoint]| -> Result<Option<f64>> {
        if pts.is_empty() {
            return Ok(None);
        }
        Ok(Some(beurling_dim_estimate(pts, &p, &grid, &policy)?.slope))
    };
    let lac: Vec<AdicPoint> = built.lacunary().into_iter().map(|s| s.point).collect();
    let mut union = dense_deep.clone();
    union.extend(lac.iter().cloned());
    emit(out, json!({ "estimate": { "dense": est(&dense_deep)?, "lacunary": est(&lac)?,
        "union": est(&union)?, "target": args.t, "scales": [0, hi] } }))?;

    if args.variants > 1 {
        let variants = family_variants(&spec, args.variants, args.seed)?;
        let mut sets = Vec::new();
        for (i, v) in variants.iter().enumerate() {
            let b = build_intermediate_spectrum(v, bound)?;
            let vo = check_orthogonality(&b.prefix.points, &p, args.seed).passed();
            ok &= vo;
            let mut u = dense_part(v, args.depth)?;
            u.extend(b.lacunary().into_iter().map(|s| s.point));
            emit(out, json!({ "variant": i, "variant_seed": v.variant_seed, "orthogonal": vo, "estimate": est(&u)? }))?;
            sets.push(b.prefix.adic_points());
        }
        let distinct = (0..sets.len()).all(|i| (i + 1..sets.len()).all(|j| sets[i] != sets[j]));
        ok &= distinct;
        emit(out, json!({ "check": "variants_distinct", "passed": distinct }))?;
    }
    emit(out, json!({ "summary": { "passed": ok } }))?;
    Ok(if ok { 0 } else { 1 })
}

fn cmd_qsum(args: &QsumArgs, out: &mut impl Write) -> Result<u8> {
    let p = args.source.set.params()?;
    let points: Vec<AdicPoint> = args.source.points()?.into_iter().map(|s| s.point).collect();
    let xs: Vec<[f64; 2]> = if args.xi.is_empty() {
        SamplingBox::new(&p).samples(args.samples, args.seed)
    } else {
        args.xi.iter().map(|&(a, b)| [a, b]).collect()
    };
    emit(out, json!({ "config": args }))?;
    let mut worst = f64::NEG_INFINITY;
    let mut gap = 0.0;
    for xi in &xs {
        let q = q_sum(*xi, &points, &p, 1e-12);
        worst = worst.max(q.upper);
        gap += 1.0 - q.value;
        emit(out, json!({ "xi": xi, "value": q.value, "lower": q.lower, "upper": q.upper }))?;
    }
    let pass = worst <= 1.0 + args.tolerance;
    emit(out, json!({ "summary": { "points": points.len(), "samples": xs.len(), "max_upper": worst,
        "mean_gap": gap / xs.len().max(1) as f64, "passed": pass } }))?;
    Ok(if pass { 0 } else { 1 })
}

fn run(cli: &Cli) -> Result<u8> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let code = match &cli.command {
        Command::Gen(a) => cmd_gen(a, &mut out)?,
        Command::Verify(a) => cmd_verify(a, &mut out)?,
        Command::Dim(a) => cmd_dim(a, &mut out)?,
        Command::Construct(a) => cmd_construct(a, &mut out)?,
        Command::Qsum(a) => cmd_qsum(a, &mut out)?,
    };
    out.flush()?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if e.chain().any(|c| c.downcast_ref::<io::Error>().is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)) {
                return ExitCode::SUCCESS;
            }
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
