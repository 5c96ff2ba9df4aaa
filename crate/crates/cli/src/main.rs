//! `orbifrob`: build, twist and verify G-twisted Frobenius algebras.
//!
//! Exit codes: 0 when every check passes, 1 on a failed check or an
//! ineligible input, 2 when an input file cannot be parsed.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use orbifrob::cocycles::{
    normalize_nonabelian_sn, schur_cocycle_sn, sign_torsion_sn, CocycleFile, SuperGrading, TwoCocycle,
};
use orbifrob::exact::Scalar;
use orbifrob::frobenius::{read_algebra, verify_frobenius, FrobeniusAlgebra, FrobeniusError};
use orbifrob::gfrob::{
    default_generators, extract_special, normalize_gamma, read_gfrob, super_twist, twist_by_torsion, verify_axioms,
    write_gfrob, GFrobError, GFrobeniusAlgebra, SectionChoice,
};
use orbifrob::report::{Check, Report};
use orbifrob::sympow::{defect_table_csv, second_quantization, total_dimension, SymmetricPowerAlgebra, SympowError};

#[derive(Parser, Debug)]
#[command(name = "orbifrob", version, about = "Exact G-twisted Frobenius algebras and second quantization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for parallel verification.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Output file, or directory for `sympow`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verify a Frobenius algebra or G-Frobenius algebra file.
    Verify {
        file: PathBuf,
        /// Force super mode for G-Frobenius input; by default it is used
        /// when any sector has odd elements.
        #[arg(long)]
        super_mode: bool,
    },
    /// Build the n-th symmetric power and write its artifacts.
    Sympow {
        /// Path to an algebra file, or `pt` or `trunc:M` for k[z]/(z^M).
        base: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
        parity: u8,
        #[arg(long, value_enum, default_value_t = Torsion::None)]
        torsion: Torsion,
        #[arg(long)]
        torsion_file: Option<PathBuf>,
        #[arg(long, env = "ORBIFROB_CAP", default_value_t = 5000)]
        cap: u128,
    },
    /// Invariant dimensions of the symmetric powers up to level n.
    Series {
        base: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
        parity: u8,
        #[arg(long, env = "ORBIFROB_CAP", default_value_t = 5000)]
        cap: u128,
    },
    /// Twist a G-Frobenius algebra over S_n by torsion and/or the sign grading.
    Twist {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Torsion::None)]
        torsion: Torsion,
        #[arg(long)]
        torsion_file: Option<PathBuf>,
        /// Apply the super twist by the sign homomorphism.
        #[arg(long)]
        sign: bool,
    },
    /// Graph defects of all pairs in S_n.
    DefectTable {
        #[arg(long)]
        n: usize,
    },
    /// The Schur cocycle of S_n with its checks.
    SchurCocycle {
        #[arg(long)]
        n: usize,
    },
    /// Normalize the cocycles of a special G-Frobenius algebra over S_n.
    Normalize {
        file: PathBuf,
        /// Rescale the generators by seeded random factors first.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Torsion {
    None,
    Schur,
    K3sign,
    File,
}

/// An input that could not be parsed; maps to exit code 2.
#[derive(Debug)]
struct ParseFailure(String);

impl std::fmt::Display for ParseFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ParseFailure {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build_global();
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ParseFailure>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Verify { file, super_mode } => cmd_verify(cli, file, *super_mode),
        Command::Sympow { base, n, parity, torsion, torsion_file, cap } => {
            cmd_sympow(cli, base, *n, *parity, *torsion, torsion_file.as_deref(), *cap)
        }
        Command::Series { base, n, parity, cap } => cmd_series(cli, base, *n, *parity, *cap),
        Command::Twist { file, torsion, torsion_file, sign } => {
            cmd_twist(cli, file, *torsion, torsion_file.as_deref(), *sign)
        }
        Command::DefectTable { n } => {
            emit(cli, &defect_table_csv(*n))?;
            Ok(true)
        }
        Command::SchurCocycle { n } => cmd_schur(cli, *n),
        Command::Normalize { file, seed } => cmd_normalize(cli, file, *seed),
    }
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
        Format::Csv => {
            let mut out = String::from("axiom,status,instances,witness\n");
            for c in &report.checks {
                let status = if c.passed() { "pass" } else { "fail" };
                let witness = c.witness.clone().unwrap_or_default().replace('"', "\"\"");
                out.push_str(&format!("\"{}\",{status},{},\"{witness}\"\n", c.axiom, c.instances));
            }
            out
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn parse_frobenius(src: &str, path: &str) -> Result<FrobeniusAlgebra> {
    read_algebra(src).map_err(|e| match e {
        FrobeniusError::Parse { .. } | FrobeniusError::Invalid { .. } => ParseFailure(format!("{path}: {e}")).into(),
        other => anyhow!("{path}: {other}"),
    })
}

fn parse_gfrob(src: &str, path: &str) -> Result<GFrobeniusAlgebra> {
    read_gfrob(src).map_err(|e| match e {
        GFrobError::Parse { .. } | GFrobError::Shape(_) => ParseFailure(format!("{path}: {e}")).into(),
        other => anyhow!("{path}: {other}"),
    })
}

fn load_base(arg: &str) -> Result<FrobeniusAlgebra> {
    if arg == "pt" {
        return Ok(FrobeniusAlgebra::point());
    }
    if let Some(m) = arg.strip_prefix("trunc:") {
        let m: usize = m.parse().map_err(|_| ParseFailure(format!("bad truncation order {m:?}")))?;
        if m == 0 {
            return Err(ParseFailure("truncation order must be positive".into()).into());
        }
        return Ok(FrobeniusAlgebra::truncated(m));
    }
    parse_frobenius(&read(Path::new(arg))?, arg)
}

fn is_gfrob(src: &str) -> bool {
    serde_json::from_str::<serde_json::Value>(src)
        .ok()
        .and_then(|v| v.as_object().map(|o| o.contains_key("sectors")))
        .unwrap_or(false)
}

fn cmd_verify(cli: &Cli, file: &Path, force_super: bool) -> Result<bool> {
    let src = read(file)?;
    let path = file.display().to_string();
    let report = if is_gfrob(&src) {
        let a = parse_gfrob(&src, &path)?;
        let super_mode = force_super || a.sectors().iter().any(|s| s.parity.contains(&1));
        verify_axioms(&a, super_mode)
    } else {
        verify_frobenius(&parse_frobenius(&src, &path)?)
    };
    emit(cli, &render(&report, cli.format))?;
    Ok(report.passed())
}

fn load_torsion(n: usize, torsion: Torsion, file: Option<&Path>) -> Result<Option<TwoCocycle>> {
    Ok(match torsion {
        Torsion::None => None,
        Torsion::Schur => Some(schur_cocycle_sn(n)?),
        Torsion::K3sign => Some(sign_torsion_sn(n)?),
        Torsion::File => {
            let path = file.ok_or_else(|| anyhow!("--torsion file requires --torsion-file"))?;
            let src = read(path)?;
            let parsed: CocycleFile = serde_json::from_str(&src)
                .map_err(|e| ParseFailure(format!("{}: line {}: {e}", path.display(), e.line())))?;
            let alpha = parsed.into_cocycle()?;
            if alpha.group().degree() != Some(n) {
                bail!("torsion cocycle is not defined on S_{n}");
            }
            Some(alpha)
        }
    })
}

fn check_cap(d: usize, n: usize, cap: u128) -> Result<()> {
    let size = total_dimension(d, n);
    if size > cap {
        return Err(SympowError::FeasibilityRefused { size, cap }.into());
    }
    Ok(())
}

fn cmd_sympow(
    cli: &Cli,
    base: &str,
    n: usize,
    p: u8,
    torsion: Torsion,
    torsion_file: Option<&Path>,
    cap: u128,
) -> Result<bool> {
    let a = load_base(base)?;
    check_cap(a.dim(), n, cap)?;
    let alpha = load_torsion(n, torsion, torsion_file)?;
    let s = SymmetricPowerAlgebra::build(&a, n, p, alpha)?;
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let ext = match cli.format {
        Format::Json => "json",
        Format::Text => "txt",
        Format::Csv => "csv",
    };
    let verify = s.verify();
    let trace = s.trace_report();
    let ls = s.ls_compare()?;
    fs::write(dir.join("algebra.json"), write_gfrob(s.algebra()))?;
    fs::write(dir.join(format!("verify.{ext}")), render(&verify, cli.format))?;
    fs::write(dir.join("defects.csv"), defect_table_csv(n))?;
    fs::write(dir.join("trace.json"), trace.to_json())?;
    fs::write(dir.join(format!("ls_compare.{ext}")), render(&ls, cli.format))?;
    let passed = verify.passed() && trace.report.passed() && ls.passed();
    println!(
        "{}: total dim {}, verify {}, trace {}, ls-compare {}",
        s.algebra().name(),
        s.algebra().total_dim(),
        verdict(verify.passed()),
        verdict(trace.report.passed()),
        verdict(ls.passed())
    );
    Ok(passed)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cmd_series(cli: &Cli, base: &str, n: usize, p: u8, cap: u128) -> Result<bool> {
    let a = load_base(base)?;
    let series = second_quantization(&a, n, p, Some(cap))?;
    let text = match cli.format {
        Format::Json => series.to_json(),
        Format::Text => series.to_text(),
        Format::Csv => {
            let mut out = String::from("n,total_dim,invariant_dim,product_formula\n");
            for (i, l) in series.levels.iter().enumerate() {
                let expected = series.expected.as_ref().map(|e| e[i].to_string()).unwrap_or_default();
                out.push_str(&format!("{},{},{},{expected}\n", l.n, l.total_dim, l.invariant_dim));
            }
            out
        }
    };
    emit(cli, &text)?;
    Ok(series.matches() != Some(false))
}

fn cmd_twist(cli: &Cli, file: &Path, torsion: Torsion, torsion_file: Option<&Path>, sign: bool) -> Result<bool> {
    let src = read(file)?;
    let mut a = parse_gfrob(&src, &file.display().to_string())?;
    let n = a.group().degree().ok_or_else(|| anyhow!("twists need a symmetric group"))?;
    if let Some(alpha) = load_torsion(n, torsion, torsion_file)? {
        a = twist_by_torsion(&a, &alpha)?;
    }
    if sign {
        a = super_twist(&a, &SuperGrading::sign(a.group().clone(), 1)?)?;
    }
    emit(cli, &write_gfrob(&a))?;
    Ok(true)
}

fn cmd_schur(cli: &Cli, n: usize) -> Result<bool> {
    let alpha = schur_cocycle_sn(n)?;
    let g = alpha.group().clone();
    let mut report = Report::new(format!("Schur cocycle of S_{n}"));
    let k = g.order() as u64;
    report.push(Check::new("cocycle identity", k * k * k, alpha.violation()));
    let mut count = 0;
    let mut w = None;
    let mut disjoint = 0;
    let mut wd = None;
    for t in 0..g.order() {
        if g.length(t) != 1 || g.perm(t).map(|p| p.orbits().len()) != Some(n - 1) {
            continue;
        }
        count += 1;
        if !alpha.get(t, t).is_one() && w.is_none() {
            w = Some(format!("α({0}, {0}) = {1}", g.label(t), alpha.get(t, t)));
        }
        for u in 0..g.order() {
            if u == t || g.length(u) != 1 || g.perm(u).map(|p| p.orbits().len()) != Some(n - 1) || !g.commute(t, u) {
                continue;
            }
            disjoint += 1;
            if alpha.epsilon(t, u) != -Scalar::one() && wd.is_none() {
                wd = Some(format!("ε({}, {}) = {}", g.label(t), g.label(u), alpha.epsilon(t, u)));
            }
        }
    }
    report.push(Check::new("α(τ,τ) = 1", count, w));
    report.push(Check::new("ε = −1 on disjoint transpositions", disjoint, wd));
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&serde_json::json!({
            "cocycle": CocycleFile::from_cocycle(&alpha),
            "report": report,
        }))?,
        _ => render(&report, cli.format),
    };
    emit(cli, &text)?;
    Ok(report.passed())
}

fn random_unit(rng: &mut ChaCha8Rng) -> Scalar {
    let num = rng.gen_range(1..=5i64) * if rng.gen_bool(0.5) { 1 } else { -1 };
    Scalar::frac(num, rng.gen_range(1..=4i64))
}

fn cmd_normalize(cli: &Cli, file: &Path, seed: Option<u64>) -> Result<bool> {
    let src = read(file)?;
    let a = parse_gfrob(&src, &file.display().to_string())?;
    let g = a.group().clone();
    if g.degree().is_none() {
        bail!("normalization needs a symmetric group");
    }
    let mut gens = default_generators(&a);
    let mut report = Report::new(format!("normalization of {}", a.name()));
    if let Some(seed) = seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (x, v) in gens.iter_mut().enumerate() {
            if x != g.identity() {
                *v = v.scaled(&random_unit(&mut rng));
            }
        }
        report.title.push_str(&format!(" (generators rescaled with seed {seed})"));
    }
    let special = extract_special(&a, &gens, SectionChoice::Pivot)?;
    let first = normalize_nonabelian_sn(&special.phi)?;
    let gens: Vec<_> = gens.iter().zip(&first.lambda).map(|(v, l)| v.scaled(l)).collect();
    let special = extract_special(&a, &gens, SectionChoice::Pivot)?;
    let gamma = normalize_gamma(&a, &special)?;
    report.extend(gamma.report.clone());
    let phi = normalize_nonabelian_sn(&gamma.structure.phi)?;
    let lambda: Vec<Scalar> = first.lambda.iter().zip(&gamma.lambda).map(|(a, b)| a * b).collect();
    let k = g.order();
    let w = (0..k).find_map(|x| (!phi.lambda[x].is_one()).then(|| format!("φ still needs λ_{} = {}", g.label(x), phi.lambda[x])));
    report.push(Check::new("γ normalization keeps φ normalized", k as u64, w));
    let w = (0..k * k).find_map(|i| {
        let (x, y) = (i / k, i % k);
        let want = Scalar::sign_pow(phi.p as usize * g.length(x) * g.length(y));
        (*phi.phi.get(x, y) != want).then(|| format!("φ_({}, {}) = {}", g.label(x), g.label(y), phi.phi.get(x, y)))
    });
    report.push(Check::new(format!("φ = (−1)^(p|σ||σ′|) with p = {}", phi.p), (k * k) as u64, w));
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&serde_json::json!({
            "parity": phi.p,
            "lambda": g.labels().iter().zip(&lambda).map(|(l, v)| (l.clone(), v.to_string())).collect::<Vec<_>>(),
            "report": report,
        }))?,
        _ => render(&report, cli.format),
    };
    emit(cli, &text)?;
    Ok(report.passed())
}
