use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use qwe_core::dense::enumerators_dense_oracle;
use qwe_core::macwilliams::{count_a_from_b, count_b_from_a};
use qwe_core::network::ContractionPlan;
use qwe_core::scalar::{check_pair_invariants, enumerators_by_counting, DistanceBounds, PairJson};
use qwe_core::{
    CodeFile, Convention, Distance, EnumPoly, EnumeratorPair, Error, StabilizerGroup, Strategy, TensorNetwork,
    WeightScheme, DEFAULT_GROUP_CAP, DEFAULT_MEMORY_CAP,
};

/// Largest code accepted by the dense oracle.
const ORACLE_MAX_N: usize = 7;

#[derive(Parser)]
#[command(name = "qwe", version, about = "Quantum weight enumerators of stabilizer codes and lego networks")]
struct Cli {
    /// Worker threads (falls back to QWE_THREADS, then to the number of cores).
    #[arg(long, global = true, env = "QWE_THREADS")]
    threads: Option<usize>,

    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Weight scheme: shor-laflamme, double, refined-double or complete.
    #[arg(long)]
    scheme: Option<String>,

    /// Normalization of the output: count or raw.
    #[arg(long, default_value = "count")]
    convention: String,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerators of a code file by counting its stabilizer group.
    Enumerate {
        code: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Largest stabilizer group that may be enumerated.
        #[arg(long, default_value_t = DEFAULT_GROUP_CAP)]
        group_cap: u128,
    },
    /// Enumerators of a network file by tensor contraction.
    Contract {
        network: PathBuf,
        #[command(flatten)]
        common: Common,
        /// `greedy`, `input`, or a JSON file with a list of plan steps.
        #[arg(long, default_value = "greedy")]
        plan: String,
        /// Abort when the live enumerators exceed this many bytes.
        #[arg(long, default_value_t = DEFAULT_MEMORY_CAP)]
        mem_cap: u128,
        /// Write the coefficient matrix of the stabilizer enumerator as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Exit with status 4 unless the network has this distance.
        #[arg(long)]
        expect_distance: Option<usize>,
    },
    /// Applies the MacWilliams identity to a polynomial.
    Macwilliams {
        /// Polynomial JSON file (omit when using --expr).
        input: Option<PathBuf>,
        /// Polynomial in text form, e.g. `1 + 15z^4`.
        #[arg(long)]
        expr: Option<String>,
        #[arg(long, default_value_t = 2)]
        q: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// The input is the normalizer enumerator B instead of A.
        #[arg(long)]
        from_b: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Distance of a code file or network file.
    Distance {
        input: PathBuf,
        #[arg(long, default_value = "greedy")]
        plan: String,
        #[arg(long, default_value_t = DEFAULT_MEMORY_CAP)]
        mem_cap: u128,
    },
    /// Enumerators from dense projectors (small codes only).
    Oracle {
        code: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

/// A failure with its exit status.
struct Failure {
    status: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::CapExceeded { .. } | Error::MemoryCap { .. } => 3,
            Error::Inconsistent(_) | Error::NonRational(_) => 4,
            _ => 2,
        };
        Failure { status, message: e.to_string() }
    }
}

fn input_error(message: String) -> Failure {
    Failure { status: 2, message }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn parse_code(path: &Path) -> CliResult<StabilizerGroup> {
    let text = read(path)?;
    let doc: CodeFile = serde_json::from_str(&text)
        .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    Ok(StabilizerGroup::from_json(&doc)?.0)
}

fn parse_network(path: &Path) -> CliResult<TensorNetwork> {
    let text = read(path)?;
    TensorNetwork::parse_json(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn scheme_for(common: &Common, q: u32, fallback: WeightScheme) -> CliResult<WeightScheme> {
    match &common.scheme {
        Some(name) => Ok(WeightScheme::parse(name, q)?),
        None => Ok(fallback),
    }
}

fn distance_value(d: Distance) -> Value {
    match d {
        Distance::Exact(d) => json!(d),
        Distance::Undetected => json!("undetected"),
    }
}

/// The distance, or for double enumerators the distance when the bounds meet.
fn distance_of(pair: &EnumeratorPair) -> CliResult<Option<Distance>> {
    match pair.distance() {
        Ok(d) => Ok(Some(d)),
        Err(e) => match pair.double_distance_bounds() {
            Ok(b) if b.lower.is_none() => Ok(Some(Distance::Undetected)),
            Ok(b) if b.lower == b.upper => Ok(b.lower.map(Distance::Exact)),
            Ok(_) => Ok(None),
            Err(_) => Err(e.into()),
        },
    }
}

#[derive(Serialize)]
struct PairReport {
    #[serde(flatten)]
    pair: PairJson,
    distance: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    distance_bounds: Option<BoundsJson>,
}

#[derive(Serialize)]
struct BoundsJson {
    lower: Option<usize>,
    upper: Option<usize>,
    x_type: Option<usize>,
    z_type: Option<usize>,
}

impl From<DistanceBounds> for BoundsJson {
    fn from(b: DistanceBounds) -> Self {
        BoundsJson { lower: b.lower, upper: b.upper, x_type: b.x_type, z_type: b.z_type }
    }
}

fn pair_report(pair: &EnumeratorPair, convention: Convention) -> CliResult<PairReport> {
    let bounds = pair.double_distance_bounds().ok().map(BoundsJson::from);
    let distance = distance_of(pair)?.map_or(Value::Null, distance_value);
    Ok(PairReport { pair: pair.to_convention(convention).to_json(), distance, distance_bounds: bounds })
}

fn choose_plan(net: &TensorNetwork, plan: &str) -> CliResult<ContractionPlan> {
    match plan {
        "greedy" | "input" | "input-order" => Ok(net.plan(Strategy::parse(plan)?)),
        path => {
            let text = read(Path::new(path))?;
            let items: Vec<String> = serde_json::from_str(&text)
                .map_err(|e| input_error(format!("{path}: {e}")))?;
            let steps = net.parse_plan(&items)?;
            Ok(net.validate_plan(&steps)?)
        }
    }
}

/// Writes `text` to `path` through a sibling temporary file.
fn write_atomic(path: &Path, text: &str) -> CliResult<()> {
    let tmp = path.with_extension(format!("{}.tmp", path.extension().and_then(|e| e.to_str()).unwrap_or("out")));
    let io = |e: std::io::Error| input_error(format!("{}: {e}", path.display()));
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(text.as_bytes()).map_err(io)?;
    f.sync_all().map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

fn emit(out: Option<&Path>, value: &impl Serialize) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable output") + "\n";
    match out {
        Some(p) => write_atomic(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| input_error(format!("thread pool: {e}")))?;
    }
    let out = cli.out.as_deref();
    match cli.command {
        Command::Enumerate { code, common, group_cap } => {
            let g = parse_code(&code)?;
            let convention = Convention::parse(&common.convention)?;
            let scheme = scheme_for(&common, g.q(), WeightScheme::shor_laflamme(g.q()))?;
            let pair = enumerators_by_counting(&g, scheme, group_cap)?;
            emit(out, &pair_report(&pair, convention)?)
        }
        Command::Contract { network, common, plan, mem_cap, csv, expect_distance } => {
            let mut net = parse_network(&network)?;
            if common.scheme.is_some() {
                let scheme = scheme_for(&common, net.q(), net.scheme())?;
                net = net.with_scheme(scheme)?;
            }
            let convention = Convention::parse(&common.convention)?;
            let plan = choose_plan(&net, &plan)?;
            let report = net.code_report(&plan, mem_cap)?;
            check_pair_invariants(&report.pair)?;
            let distance = distance_of(&report.pair)?;
            if let Some(csv) = &csv {
                write_atomic(csv, &report.pair.to_count().a.to_csv()?)?;
            }
            let body = json!({
                "enumerators": pair_report(&report.pair, convention)?,
                "plan_width": report.width,
                "plan_steps": plan.steps.len(),
                "peak_bytes": report.peak_bytes.to_string(),
                "seconds": report.seconds,
            });
            emit(out, &body)?;
            if let Some(d) = expect_distance {
                if distance != Some(Distance::Exact(d)) {
                    let found = distance.map_or("unresolved".to_string(), |x| x.to_string());
                    return Err(Failure { status: 4, message: format!("expected distance {d}, network has distance {found}") });
                }
            }
            Ok(())
        }
        Command::Macwilliams { input, expr, q, n, k, from_b, common } => {
            let convention = Convention::parse(&common.convention)?;
            let p = match (&input, &expr) {
                (Some(path), None) => {
                    let text = read(path)?;
                    let doc = serde_json::from_str(&text)
                        .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
                    EnumPoly::from_json(&doc)?
                }
                (None, Some(text)) => {
                    let scheme = scheme_for(&common, q, WeightScheme::shor_laflamme(q))?;
                    EnumPoly::parse(scheme, text)?
                }
                _ => return Err(input_error("give exactly one of a polynomial file or --expr".into())),
            };
            let p = p.homogenize(n)?;
            let q = p.scheme().q();
            // bring the input to the count convention
            let weight = if from_b { k } else { 2 * k };
            let p = match convention {
                Convention::Count => p,
                Convention::Raw => p.scale(&BigRational::new(1.into(), BigInt::from(q).pow(weight as u32))),
            };
            let (a, b) = if from_b { (count_a_from_b(&p, n, k)?, p) } else { (p.clone(), count_b_from_a(&p, n, k)?) };
            let pair = EnumeratorPair { a, b, convention: Convention::Count, n, k, q }.to_convention(convention);
            let result = if from_b { &pair.a } else { &pair.b };
            let body = json!({
                "input": if from_b { "b" } else { "a" },
                "result": result.to_json(),
                "result_text": result.dehomogenize().to_string(),
                "enumerators": pair_report(&pair, convention)?,
            });
            emit(out, &body)
        }
        Command::Distance { input, plan, mem_cap } => {
            let text = read(&input)?;
            let is_network = serde_json::from_str::<Value>(&text)
                .map_err(|e| input_error(format!("{}: {e}", input.display())))?
                .get("legos")
                .is_some();
            let pair = if is_network {
                let net = parse_network(&input)?;
                let net = net.with_scheme(WeightScheme::double(net.q()))?;
                let plan = choose_plan(&net, &plan)?;
                net.code_report(&plan, mem_cap)?.pair
            } else {
                let g = parse_code(&input)?;
                enumerators_by_counting(&g, WeightScheme::double(g.q()), DEFAULT_GROUP_CAP)?
            };
            let bounds = pair.double_distance_bounds()?;
            let body = json!({
                "n": pair.n,
                "k": pair.k,
                "q": pair.q,
                "distance": distance_of(&pair)?.map_or(Value::Null, distance_value),
                "distance_bounds": BoundsJson::from(bounds),
            });
            emit(out, &body)
        }
        Command::Oracle { code, common } => {
            let g = parse_code(&code)?;
            if g.n() > ORACLE_MAX_N {
                return Err(input_error(format!("the dense oracle handles at most {ORACLE_MAX_N} qudits, the code has {}", g.n())));
            }
            let convention = Convention::parse(&common.convention)?;
            let scheme = scheme_for(&common, g.q(), WeightScheme::shor_laflamme(g.q()))?;
            let (pair, residual) = enumerators_dense_oracle(&g, scheme)?;
            let body = json!({
                "enumerators": pair_report(&pair, convention)?,
                "rounding_residual": residual,
            });
            emit(out, &body)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.status)
        }
    }
}
