use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use circrev::dynamics::{Limits, DEFAULT_MAX_ITER, DEFAULT_MAX_PERIOD};
use circrev::error::{Error, Result};
use circrev::factorization::{three_involution_witness, witness_for_plan, WitnessArchive};
use circrev::plmap::{MapDescription, PLMap};
use circrev::random::{parse_word, Certificate, Generated, Generator};
use circrev::rational::parse_q;
use circrev::report::{self, FactorResult, Report, Settings};
use circrev::reversibility::{
    decide_strongly_reversible_h, decide_strongly_reversible_hplus, Answer, Verdict,
};
use circrev::sampling::SamplePlan;

/// Exact analysis of piecewise-linear circle homeomorphisms.
#[derive(Parser)]
#[command(name = "circrev", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct LimitArgs {
    /// Largest period tried when certifying a rational rotation number.
    #[arg(long, default_value_t = DEFAULT_MAX_PERIOD)]
    max_period: u64,
    /// Lift iteration budget for rotation numbers.
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: u64,
    /// Emit the JSON report instead of text.
    #[arg(long)]
    json: bool,
}

impl LimitArgs {
    fn limits(&self) -> Limits {
        Limits {
            max_period: self.max_period,
            max_iter: self.max_iter,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GroupArg {
    Hplus,
    H,
}

#[derive(Subcommand)]
enum Command {
    /// Degree, fixed set, rotation number, period and signature of a map.
    Analyze {
        map: PathBuf,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Decide strong reversibility. Exit code 0 yes, 1 no, 2 unknown.
    Decide {
        map: PathBuf,
        #[arg(long, value_enum, default_value = "h")]
        group: GroupArg,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Factor a map into 2 or 3 involutions and write a verified witness archive.
    Factor {
        map: PathBuf,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
        involutions: u8,
        #[arg(long, value_enum, default_value = "h")]
        group: GroupArg,
        /// Verification sample count.
        #[arg(long, default_value_t = 512)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Archive path; defaults to `<map>.witness.json`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Generate a seeded corpus of maps with construction certificates.
    Random {
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        degree: i8,
        /// Rotation number `p/q` realised through the orbit of 0.
        #[arg(long)]
        rho: Option<String>,
        /// Signature word such as `P+P-` or `A+P-`.
        #[arg(long)]
        word: Option<String>,
        /// Breakpoint budget for unconstrained maps.
        #[arg(long, default_value_t = 4)]
        vertices: usize,
        /// Directory for `map-NNN.json`; the corpus goes to stdout when absent.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Re-run the exact verification stored in a witness archive.
    Verify {
        archive: PathBuf,
        /// Check against this map instead of the archived target.
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_map(path: &Path) -> Result<(PLMap, Vec<u8>)> {
    let bytes = read(path)?;
    let text = String::from_utf8_lossy(&bytes);
    let map = PLMap::from_json(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        Error::InvalidMap(m) => Error::InvalidMap(format!("{}: {m}", path.display())),
        other => other,
    })?;
    Ok((map, bytes))
}

fn emit<T: Serialize>(json: bool, report: &Report<T>, text: impl FnOnce() -> String) {
    if json {
        println!("{}", report.to_json());
    } else {
        print!("{}", text());
    }
}

fn decide(f: &PLMap, group: GroupArg, limits: Limits) -> Result<Verdict> {
    match group {
        GroupArg::Hplus => decide_strongly_reversible_hplus(f, limits),
        GroupArg::H => decide_strongly_reversible_h(f, limits),
    }
}

fn analyze(path: &Path, args: LimitArgs) -> Result<u8> {
    let (f, bytes) = load_map(path)?;
    let a = report::analyze(&f, args.limits())?;
    let r = Report::new("analyze", &bytes, Settings::new(args.limits()), a);
    emit(args.json, &r, || {
        let a = &r.result;
        let mut s = format!("degree      {}\nvertices    {}\n", a.degree, a.vertices);
        let fix = if a.fixed_set.full_circle {
            "whole circle".to_string()
        } else if a.fixed_set.components.is_empty() {
            "none".to_string()
        } else {
            a.fixed_set
                .components
                .iter()
                .map(|c| {
                    if c.kind == "point" {
                        format!("{{{}}}", c.start)
                    } else {
                        format!("[{}, {}]", c.start, c.end)
                    }
                })
                .collect::<Vec<_>>()
                .join(" ")
        };
        s += &format!("fixed set   {fix}\n");
        if let Some(rho) = &a.rotation_number {
            s += &match rho {
                report::RotationJson::Rational { value, period, .. } => {
                    format!("rotation    {value} (period {period})\n")
                }
                report::RotationJson::Bracket { lo, hi, iterations } => {
                    format!("rotation    in [{lo}, {hi}] after {iterations} iterations\n")
                }
            };
        }
        if let Some(w) = &a.signature {
            let which = if a.degree == -1 { "signature of f^2" } else { "signature" };
            s += &format!("{which:<11} {}\n", w.text);
        }
        if a.involution {
            s += "involution  yes\n";
        }
        s
    });
    Ok(0)
}

fn decide_cmd(path: &Path, group: GroupArg, args: LimitArgs) -> Result<u8> {
    let (f, bytes) = load_map(path)?;
    let v = decide(&f, group, args.limits())?;
    let r = Report::new(
        "decide",
        &bytes,
        Settings::new(args.limits()),
        report::decision(&v, f.degree()),
    );
    emit(args.json, &r, || {
        let ans = match v.answer {
            Answer::Yes => "yes",
            Answer::No => "no",
            Answer::Unknown => "unknown",
        };
        format!("{ans} ({}): {}\n", v.group, v.reason)
    });
    Ok(v.answer.exit_code() as u8)
}

struct FactorArgs {
    involutions: u8,
    group: GroupArg,
    samples: usize,
    seed: u64,
    out: Option<PathBuf>,
    limits: LimitArgs,
}

fn factor(path: &Path, a: FactorArgs) -> Result<u8> {
    let (f, bytes) = load_map(path)?;
    let plan = SamplePlan::split(a.samples, a.seed);
    let mut settings = Settings::new(a.limits.limits());
    settings.samples = Some(a.samples);
    settings.seed = Some(a.seed);
    let n = a.involutions as usize;
    let out = a
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.witness.json", path.display())));
    let started = Instant::now();
    let (result, code) = if n == 3 {
        if f.degree() != 1 {
            let why = "three involutions need an orientation preserving map".to_string();
            (FactorResult::refused(n, None, why), 1)
        } else {
            let w = three_involution_witness(&f, plan)?;
            fs::write(&out, w.to_archive().to_json())?;
            let res = FactorResult::success(n, None, &w, Some(out.display().to_string()));
            (res, 0)
        }
    } else {
        let v = decide(&f, a.group, a.limits.limits())?;
        let d = report::decision(&v, f.degree());
        match (&v.answer, &v.plan) {
            (Answer::Yes, Some(p)) => {
                let w = witness_for_plan(&f, p, plan)?;
                fs::write(&out, w.to_archive().to_json())?;
                let res = FactorResult::success(n, Some(d), &w, Some(out.display().to_string()));
                (res, 0)
            }
            _ => {
                let code = v.answer.exit_code() as u8;
                (FactorResult::refused(n, Some(d), v.reason.clone()), code)
            }
        }
    };
    let r = Report::new("factor", &bytes, settings, result);
    emit(a.limits.json, &r, || {
        let res = &r.result;
        match (&res.refusal, &res.verification) {
            (Some(why), _) => format!("refused: {why}\n"),
            (None, Some(v)) => format!(
                "route {} verified at {} samples in {:.2?}; archive {}\n",
                res.route.map(|x| x.to_string()).unwrap_or_default(),
                v.samples,
                started.elapsed(),
                res.archive.clone().unwrap_or_default()
            ),
            _ => String::new(),
        }
    });
    Ok(code)
}

#[derive(Serialize)]
struct CorpusEntry {
    #[serde(flatten)]
    map: MapDescription,
    certificate: Certificate,
}

struct RandomArgs {
    count: usize,
    seed: u64,
    degree: i8,
    rho: Option<String>,
    word: Option<String>,
    vertices: usize,
    out_dir: Option<PathBuf>,
}

fn generate(g: &mut Generator, a: &RandomArgs) -> Result<Generated> {
    if a.degree != 1 && a.degree != -1 {
        return Err(Error::Unsatisfiable(format!("degree {} is not 1 or -1", a.degree)));
    }
    if a.degree == -1 && (a.rho.is_some() || a.word.is_some()) {
        return Err(Error::Unsatisfiable(
            "orientation reversing maps have no rotation number or word constraint".into(),
        ));
    }
    let word = a.word.as_deref().map(parse_word).transpose()?;
    let rho = match &a.rho {
        None => None,
        Some(s) => {
            let r = parse_q(s)?;
            if r < num::zero() || r >= num::one() {
                return Err(Error::Unsatisfiable(format!("rho = {s} is outside [0, 1)")));
            }
            Some((
                i64::try_from(r.numer()).map_err(|_| Error::Unsatisfiable("rho too large".into()))?,
                i64::try_from(r.denom()).map_err(|_| Error::Unsatisfiable("rho too large".into()))?,
            ))
        }
    };
    match (rho, word) {
        (Some((0, _)), Some(w)) | (None, Some(w)) => g.with_word(&w),
        (Some((p, q)), Some(w)) => g.periodic_with_word(p, q, &w),
        (Some((p, q)), None) => g.with_rotation(p, q),
        (None, None) => Ok(Generated {
            map: g.homeomorphism(a.degree, a.vertices),
            certificate: Certificate::default(),
        }),
    }
}

fn random(a: RandomArgs) -> Result<u8> {
    let mut g = Generator::new(a.seed);
    if let Some(dir) = &a.out_dir {
        fs::create_dir_all(dir)?;
    }
    for i in 0..a.count {
        let m = generate(&mut g, &a)?;
        let entry = CorpusEntry {
            map: m.map.to_description(),
            certificate: m.certificate,
        };
        match &a.out_dir {
            Some(dir) => {
                let path = dir.join(format!("map-{i:03}.json"));
                fs::write(&path, serde_json::to_string_pretty(&entry)? + "\n")?;
            }
            None => println!("{}", serde_json::to_string(&entry)?),
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct VerifyResult {
    route: String,
    all_pass: bool,
    verification: circrev::factorization::VerificationReport,
}

fn verify(archive: &Path, map: Option<&Path>, json: bool) -> Result<u8> {
    let bytes = read(archive)?;
    let a = WitnessArchive::from_json(&String::from_utf8_lossy(&bytes))?;
    let mut input = bytes.clone();
    let target = match map {
        Some(p) => {
            let (m, b) = load_map(p)?;
            input.extend_from_slice(&b);
            Some(m)
        }
        None => None,
    };
    let v = a.reverify(target.as_ref())?;
    let mut settings = Settings::new(Limits::default());
    settings.samples = Some(v.samples);
    settings.seed = Some(a.samples.seed);
    let res = VerifyResult {
        route: a.route.to_string(),
        all_pass: v.all_pass,
        verification: v,
    };
    let r = Report::new("verify", &input, settings, res);
    emit(json, &r, || match &r.result.verification.failure {
        None => format!(
            "pass: route {} at {} samples\n",
            r.result.route, r.result.verification.samples
        ),
        Some(f) => format!("fail: {f}\n"),
    });
    Ok(if r.result.all_pass { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Analyze { map, limits } => analyze(&map, limits),
        Command::Decide { map, group, limits } => decide_cmd(&map, group, limits),
        Command::Factor {
            map,
            involutions,
            group,
            samples,
            seed,
            out,
            limits,
        } => factor(
            &map,
            FactorArgs {
                involutions,
                group,
                samples,
                seed,
                out,
                limits,
            },
        ),
        Command::Random {
            count,
            seed,
            degree,
            rho,
            word,
            vertices,
            out_dir,
        } => random(RandomArgs {
            count,
            seed,
            degree,
            rho,
            word,
            vertices,
            out_dir,
        }),
        Command::Verify { archive, map, json } => verify(&archive, map.as_deref(), json),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
