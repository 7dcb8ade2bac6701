use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use pencil_core::census::{census, CensusConfig, CSV_HEADER, DEFAULT_CEILING};
use pencil_core::cubic_rings::{two_torsion_ideals, CubicRing};
use pencil_core::densities::measure::MeasureMode;
use pencil_core::densities::{euler_product, verify_change_of_variables, EulerFamily};
use pencil_core::forms::BinaryForm;
use pencil_core::invariants::{hyperdeterminant, inv, is_projective, non_projective_primes, section_inv};
use pencil_core::pencils::{Space, SymPair};
use pencil_core::reduction::{
    canonicalize_padic, canonicalize_padic_w0, enumerate_local_reps, local_orbit_count, reduce_gn_field,
    reduce_ln_field, Elementary,
};
use pencil_core::reduction::local::support_bound;
use pencil_core::verify::{verify_all, Fault, Profile};

const EXIT_MISMATCH: u8 = 2;
const EXIT_PRECISION: u8 = 3;

#[derive(Parser)]
#[command(name = "pencils", version, about = "Orbit counts for pairs of symmetric matrices and binary forms")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "PENCILS_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Group {
    L,
    G,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Full,
    Projective,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Quick,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    MatrixCount,
    ProjectiveMass,
}

#[derive(Subcommand)]
enum Command {
    /// Reducible-orbit counts for every irreducible cubic of height below a bound.
    Census {
        #[arg(long, default_value_t = 3)]
        degree: usize,
        /// Count forms of height strictly below this bound.
        #[arg(long)]
        height: i64,
        /// Number of real roots (1 or 3).
        #[arg(long, default_value_t = 1)]
        signature: u8,
        #[arg(long, value_enum, default_value_t = Output::Json)]
        output: Output,
        /// Also recompute local counts at primes up to this bound dividing the discriminant once.
        #[arg(long)]
        double_check: Option<u64>,
        /// Height bounds at which running averages are reported, comma separated.
        #[arg(long, value_delimiter = ',')]
        checkpoints: Vec<i64>,
        /// Print only the summary.
        #[arg(long)]
        summary_only: bool,
        #[arg(long, default_value_t = DEFAULT_CEILING)]
        ceiling: i64,
    },
    /// Orbits above one form at one prime, by valuation of the leading invariant.
    LocalCount {
        #[arg(long)]
        form: String,
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        emax: Option<u32>,
        /// Extra p-adic digits carried by the generic enumeration.
        #[arg(long)]
        margin: Option<u32>,
    },
    /// Canonical form of a pair over Q, or over Z_p with --prime.
    Reduce {
        /// `A=a,b,c;d,e,f;...;B=...`
        #[arg(long)]
        pair: String,
        #[arg(long, value_enum)]
        group: Option<Group>,
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long, default_value_t = 8)]
        precision: u32,
    },
    /// Invariant form, leading invariant and projectivity of a pair, or the section of a form.
    Invariants {
        #[arg(long, conflicts_with = "form")]
        pair: Option<String>,
        #[arg(long)]
        form: Option<String>,
    },
    /// Local density checks and Euler products.
    Densities {
        #[command(subcommand)]
        action: DensityAction,
    },
    /// Cubic ring computations.
    Ring {
        #[command(subcommand)]
        action: RingAction,
    },
    /// Run the whole oracle battery.
    VerifyAll {
        #[arg(long, value_enum, default_value_t = ProfileArg::Quick)]
        profile: ProfileArg,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultArg>,
    },
}

#[derive(Subcommand)]
enum DensityAction {
    /// Exhaustive measure identity at the given depth plus the closed-form battery.
    Verify {
        #[arg(long, default_value_t = 2)]
        prime: u64,
        #[arg(long, default_value_t = 1)]
        depth: u32,
        /// Sample this many cells instead of scanning all of them.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Interval enclosure of an Euler product of local masses.
    Euler {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, default_value_t = 1_000_000)]
        cutoff: u64,
        /// Half-size n for the full family.
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum RingAction {
    /// Ideals I with I² = R.
    TwoTorsion {
        #[arg(long)]
        form: String,
        #[arg(long, default_value_t = 10_000)]
        bound: i128,
    },
}

enum Failure {
    Usage(String),
    Mismatch(Value),
    Precision(Value),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn parse_form(s: &str) -> Result<BinaryForm, Failure> {
    s.parse::<BinaryForm>().map_err(|e| Failure::Usage(format!("bad form {s:?}: {e}")))
}

fn print_json(v: &Value) {
    let mut out = io::stdout().lock();
    let text = serde_json::to_string_pretty(v).expect("serializable");
    if let Err(e) = writeln!(out, "{text}") {
        if e.kind() == io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        panic!("writing to stdout: {e}");
    }
}

fn rational_str(x: &BigRational) -> String {
    x.to_string()
}

fn step_json(kind: &impl std::fmt::Debug, step: &Elementary) -> Value {
    match step {
        Elementary::Transvection { i, j, t } => json!({"group": format!("{kind:?}"), "transvection": [i, j, t.to_string()]}),
        Elementary::Diagonal(d) => json!({"group": format!("{kind:?}"), "diagonal": d.iter().map(rational_str).collect::<Vec<_>>()}),
        Elementary::General(m) => json!({"group": format!("{kind:?}"), "matrix": m.to_string()}),
    }
}

fn run_census(
    degree: usize,
    height: i64,
    signature: u8,
    output: Output,
    double_check: Option<u64>,
    checkpoints: Vec<i64>,
    summary_only: bool,
    ceiling: i64,
) -> Result<(), Failure> {
    if degree != 3 {
        return Err(Failure::Usage("the census is only available for cubic forms (--degree 3)".into()));
    }
    let config = CensusConfig { height_bound: height, signature, double_check, checkpoints, ceiling };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    if matches!(output, Output::Csv) && !summary_only {
        writeln!(out, "{CSV_HEADER}")?;
    }
    let mut write_err = None;
    let summary = census(&config, |row| {
        if summary_only || write_err.is_some() {
            return;
        }
        let line = match output {
            Output::Csv => row.to_csv(),
            Output::Json => serde_json::to_string(row).expect("serializable"),
        };
        if let Err(e) = writeln!(out, "{line}") {
            write_err = Some(e);
        }
    })?;
    if let Some(e) = write_err {
        // a closed reader (`| head`) is not an error
        return if e.kind() == io::ErrorKind::BrokenPipe { Ok(()) } else { Err(e.into()) };
    }
    let summary_json = serde_json::to_value(&summary).expect("serializable");
    match output {
        Output::Json => writeln!(out, "{}", json!({ "summary": summary_json }))?,
        Output::Csv if summary_only => writeln!(out, "{summary_json}")?,
        Output::Csv => eprintln!("{summary_json}"),
    }
    out.flush()?;
    if summary.final_checkpoint.excluded > 0 {
        return Err(Failure::Precision(json!({"excluded": summary.final_checkpoint.excluded})));
    }
    Ok(())
}

fn run_local_count(form: &str, prime: u64, emax: Option<u32>, margin: Option<u32>) -> Result<(), Failure> {
    let f = parse_form(form)?;
    let bound = support_bound(&f, prime);
    let e_max = emax.unwrap_or(bound);
    match margin {
        None => {
            let count = local_orbit_count(&f, prime, e_max)?;
            let complete = count.complete;
            let v = serde_json::to_value(&count).expect("serializable");
            print_json(&v);
            if !complete {
                return Err(Failure::Precision(json!({"complete": false, "support_bound": bound})));
            }
        }
        Some(margin) => {
            let mut per_e = Vec::new();
            for e in 0..=e_max.min(bound) {
                let precision = (e + margin).max(3 * e + 1);
                let reps = enumerate_local_reps(&f, prime, e, e + margin)?;
                let projective = reps.iter().filter(|r| r.projective == Some(true)).count();
                per_e.push(json!({"e": e, "orbits": reps.len(), "projective": projective, "precision": precision}));
            }
            print_json(&json!({"p": prime, "per_e": per_e, "complete": e_max >= bound}));
            if e_max < bound {
                return Err(Failure::Precision(json!({"complete": false, "support_bound": bound})));
            }
        }
    }
    Ok(())
}

fn run_reduce(pair: &str, group: Option<Group>, prime: Option<u64>, precision: u32) -> Result<(), Failure> {
    let w: SymPair<BigInt> = pair.parse()?;
    if let Some(p) = prime {
        let canon = if w.space() == Space::W0 || w.space() == Space::W00 {
            canonicalize_padic_w0(&w.with_space(Space::W0)?, p, precision)?
        } else {
            canonicalize_padic(&w.with_space(Space::Wtop)?, p, precision)?
        };
        print_json(&json!({
            "p": p,
            "precision": canon.precision,
            "a": canon.avec,
            "b": canon.bvec,
            "lambda_valuation": canon.lambda_val,
            "representative": canon.rep.to_string(),
            "certificate": canon.certificate.matrix().to_string(),
        }));
        return Ok(());
    }
    let rational = w.to_rational();
    let use_l = match group {
        Some(Group::L) => true,
        Some(Group::G) => false,
        None => w.space() == Space::Wtop0,
    };
    let (canonical, trace) = if use_l { reduce_ln_field(&rational)? } else { reduce_gn_field(&rational)? };
    let steps: Vec<Value> = trace.steps.iter().map(|(k, s)| step_json(k, s)).collect();
    print_json(&json!({
        "group": if use_l { "L" } else { "G" },
        "canonical": canonical.to_string(),
        "steps": steps,
        "total": trace.total_matrix().to_string(),
    }));
    Ok(())
}

fn run_invariants(pair: Option<String>, form: Option<String>) -> Result<(), Failure> {
    if let Some(form) = form {
        let f = parse_form(&form)?;
        let s = section_inv(&f)?;
        print_json(&json!({"form": f.to_string(), "section": s.to_string(), "discriminant": f.discriminant().to_string()}));
        return Ok(());
    }
    let pair = pair.ok_or_else(|| Failure::Usage("pass --pair or --form".into()))?;
    let w: SymPair<BigInt> = pair.parse()?;
    let f = inv(&w);
    let lambda = hyperdeterminant(&w).ok().map(|l| l.to_string());
    let projective = is_projective(&w).ok();
    let bad_primes = non_projective_primes(&w).ok().flatten();
    print_json(&json!({
        "space": format!("{:?}", w.space()),
        "inv": f.to_string(),
        "discriminant": f.discriminant().to_string(),
        "lambda": lambda,
        "projective": projective,
        "non_projective_primes": bad_primes,
    }));
    Ok(())
}

fn run_densities(action: DensityAction) -> Result<(), Failure> {
    match action {
        DensityAction::Verify { prime, depth, samples, seed } => {
            let mode = match samples {
                Some(samples) => MeasureMode::Sampling { samples, seed },
                None => {
                    let cells = (prime as f64).powi(10 * depth as i32);
                    if cells > 2e8 {
                        return Err(Failure::Usage(format!("{cells:e} cells is too many to scan; pass --samples")));
                    }
                    MeasureMode::Exhaustive
                }
            };
            let report = verify_change_of_variables(prime, depth, mode);
            let battery = verify_all(Profile::Quick, None);
            let passed = report.passed && battery.passed;
            let v = json!({"measure": report, "battery": battery, "passed": passed});
            print_json(&v);
            if !passed {
                return Err(Failure::Mismatch(json!({"passed": false})));
            }
        }
        DensityAction::Euler { family, cutoff, n } => {
            let family = match family {
                FamilyArg::Full => EulerFamily::Full { n },
                FamilyArg::Projective => EulerFamily::Projective,
            };
            let e = euler_product(family, cutoff)?;
            print_json(&json!({
                "family": family.name(),
                "cutoff": e.cutoff,
                "primes": e.primes,
                "lower": e.value.lo_rational().to_string(),
                "upper": e.value.hi_rational().to_string(),
                "lower_decimal": format!("{:.12}", e.value.lo),
                "upper_decimal": format!("{:.12}", e.value.hi),
                "tail_upper": e.tail.hi,
            }));
        }
    }
    Ok(())
}

fn run_ring(action: RingAction) -> Result<(), Failure> {
    match action {
        RingAction::TwoTorsion { form, bound } => {
            let f = parse_form(&form)?;
            let ring = CubicRing::from_form(&f)?;
            let t = two_torsion_ideals(&ring, bound)?;
            let ideals: Vec<Value> = t.ideals.iter().map(|i| json!({"denominator": i.denom.to_string(), "basis": i.basis.map(|r| r.map(|x| x.to_string()))})).collect();
            print_json(&json!({"count": t.count, "ideals": ideals, "complete": t.complete, "discriminant": ring.discriminant().to_string()}));
            if !t.complete {
                return Err(Failure::Precision(json!({"complete": false})));
            }
        }
    }
    Ok(())
}

fn run_verify_all(profile: ProfileArg, fault: Option<FaultArg>) -> Result<(), Failure> {
    let profile = match profile {
        ProfileArg::Quick => Profile::Quick,
        ProfileArg::Full => Profile::Full,
    };
    let fault = fault.map(|f| match f {
        FaultArg::MatrixCount => Fault::MatrixCount,
        FaultArg::ProjectiveMass => Fault::ProjectiveMass,
    });
    let report = verify_all(profile, fault);
    print_json(&serde_json::to_value(&report).expect("serializable"));
    if !report.passed {
        return Err(Failure::Mismatch(json!({"passed": false})));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    let result = match cli.command {
        Command::Census { degree, height, signature, output, double_check, checkpoints, summary_only, ceiling } => {
            run_census(degree, height, signature, output, double_check, checkpoints, summary_only, ceiling)
        }
        Command::LocalCount { form, prime, emax, margin } => run_local_count(&form, prime, emax, margin),
        Command::Reduce { pair, group, prime, precision } => run_reduce(&pair, group, prime, precision),
        Command::Invariants { pair, form } => run_invariants(pair, form),
        Command::Densities { action } => run_densities(action),
        Command::Ring { action } => run_ring(action),
        Command::VerifyAll { profile, inject_fault } => run_verify_all(profile, inject_fault),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
        Err(Failure::Mismatch(v)) => {
            eprintln!("verification mismatch: {v}");
            ExitCode::from(EXIT_MISMATCH)
        }
        Err(Failure::Precision(v)) => {
            eprintln!("precision failure: {v}");
            ExitCode::from(EXIT_PRECISION)
        }
    }
}
