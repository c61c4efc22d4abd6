use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use uncertain_frechet::oracle::{bound_oracle_full, DEFAULT_CAP};
use uncertain_frechet::precise::{discrete_weak, Adjacency, Metric};
use uncertain_frechet::reductions::{build_ub_sat, build_weak_discrete, lift_curves, verify_reduction, Model};
use uncertain_frechet::weak::{wfr_min_decide_with, wfr_min_value_with, WeakOptions};
use uncertain_frechet::{
    compute_lb_with, decide_lb_with, CnfFormula, EnumerationSpec, Error, LbOptions, PolyCurve, Scalar, Side,
    UncertainCurve,
};

#[derive(Parser, Debug)]
#[command(name = "lbf", version, about = "Fréchet distances between uncertain one-dimensional curves")]
struct Cli {
    /// Output mode.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,
    /// Worker threads for enumeration (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    JsonLines,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether some realisations are within Fréchet distance delta.
    Decide(DecideArgs),
    /// Smallest delta accepted by `decide`, up to a tolerance.
    Value(ValueArgs),
    /// Distance between two precise curves.
    Precise(PreciseArgs),
    /// Weak Fréchet distance minimised over realisations.
    #[command(name = "weak-lb", subcommand)]
    WeakLb(WeakCommand),
    /// Bound over realisations by explicit enumeration.
    Oracle(OracleArgs),
    /// Build hardness instances from a CNF formula.
    #[command(subcommand)]
    Reduce(ReduceCommand),
    /// Build an instance and check it against brute force.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct Pair {
    a: PathBuf,
    b: PathBuf,
}

#[derive(Args, Debug)]
struct DecideArgs {
    #[arg(long)]
    delta: Scalar,
    #[command(flatten)]
    curves: Pair,
    /// Write every propagated region to this directory.
    #[arg(long)]
    dump_regions: Option<PathBuf>,
    /// Print a pair of realisations attaining the bound.
    #[arg(long)]
    witness: bool,
    /// Reject finite-set vertices instead of using their hulls.
    #[arg(long)]
    strict: bool,
}

#[derive(Args, Debug)]
struct ValueArgs {
    #[arg(long, default_value = "1/1024")]
    tol: Scalar,
    #[command(flatten)]
    curves: Pair,
    #[arg(long)]
    strict: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Variant {
    Frechet,
    Discrete,
    Weak,
    DiscreteWeak,
}

#[derive(Args, Debug)]
struct PreciseArgs {
    #[arg(long, value_enum)]
    variant: Variant,
    #[command(flatten)]
    curves: Pair,
    #[arg(long, default_value_t = 8, value_parser = parse_adjacency)]
    adjacency: u32,
}

#[derive(Subcommand, Debug)]
enum WeakCommand {
    Decide {
        #[arg(long)]
        delta: Scalar,
        #[command(flatten)]
        curves: Pair,
        #[arg(long, env = "LBF_CAP", default_value_t = DEFAULT_CAP, value_parser = parse_cap)]
        cap: u128,
    },
    Value {
        #[command(flatten)]
        curves: Pair,
        #[arg(long, env = "LBF_CAP", default_value_t = DEFAULT_CAP, value_parser = parse_cap)]
        cap: u128,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SideArg {
    Lower,
    Upper,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long, value_enum)]
    variant: Variant,
    #[arg(long, value_enum)]
    side: SideArg,
    /// Equally spaced samples per interval, endpoints included.
    #[arg(long, default_value_t = 2)]
    resolution: usize,
    #[arg(long, env = "LBF_CAP", default_value_t = DEFAULT_CAP, value_parser = parse_cap)]
    cap: u128,
    #[arg(long, default_value_t = 8, value_parser = parse_adjacency)]
    adjacency: u32,
    #[command(flatten)]
    curves: Pair,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelArg {
    Indecisive,
    Imprecise,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::Indecisive => Model::Indecisive,
            ModelArg::Imprecise => Model::Imprecise,
        }
    }
}

#[derive(Subcommand, Debug)]
enum ReduceCommand {
    /// Upper-bound instance whose bound is 3/2 exactly when the formula is satisfiable.
    #[command(name = "ub-sat")]
    UbSat {
        cnf: PathBuf,
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(short, num_args = 2, value_names = ["U", "V"])]
        o: Vec<PathBuf>,
    },
    /// Discrete weak instance whose lower bound is 1 exactly when the formula is satisfiable.
    #[command(name = "weak-discrete")]
    WeakDiscrete {
        cnf: PathBuf,
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(short, num_args = 2, value_names = ["U", "V"])]
        o: Vec<PathBuf>,
    },
    /// Lift two one-dimensional curves into the plane with a sentinel height.
    Lift2d {
        #[command(flatten)]
        curves: Pair,
        #[arg(short = 'M', default_value = "1000")]
        sentinel: Scalar,
        #[arg(short, num_args = 2, value_names = ["U", "V"])]
        o: Vec<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Ub,
    Weak,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    cnf: PathBuf,
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, value_enum)]
    model: ModelArg,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long, env = "LBF_CAP", default_value_t = DEFAULT_CAP, value_parser = parse_cap)]
    cap: u128,
}

fn parse_adjacency(s: &str) -> Result<u32, String> {
    match s {
        "4" => Ok(4),
        "8" => Ok(8),
        _ => Err("adjacency must be 4 or 8".into()),
    }
}

fn parse_cap(s: &str) -> Result<u128, String> {
    let n: f64 = s.parse().map_err(|_| format!("bad cap {s:?}"))?;
    if n >= 1.0 && n.fract() == 0.0 && n < 1e38 {
        Ok(n as u128)
    } else {
        Err("cap must be a positive integer".into())
    }
}

enum Failure {
    Usage(String),
    Input(String),
    Cap(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Internal(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Input(_) => 3,
            Failure::Cap(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Input(m) | Failure::Cap(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::CapExceeded { .. } => Failure::Cap(msg),
            Error::NonPositiveDelta(_)
            | Error::NonPositiveTolerance(_)
            | Error::InvalidArgument(_)
            | Error::SentinelTooSmall { .. } => Failure::Usage(msg),
            Error::Parse(_)
            | Error::InvalidFormula(_)
            | Error::EmptyCurve
            | Error::EmptySet
            | Error::InvertedInterval { .. }
            | Error::NotPrecise { .. }
            | Error::SetVertexRejected { .. } => Failure::Input(msg),
            _ => Failure::Internal(msg),
        }
    }
}

type Outcome<T> = Result<T, Failure>;

/// A file read once, with its content hash for json-lines records.
struct Input {
    path: PathBuf,
    text: String,
}

impl Input {
    fn read(path: &Path) -> Outcome<Input> {
        let text =
            fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        Ok(Input {
            path: path.to_path_buf(),
            text,
        })
    }

    fn record(&self) -> Value {
        json!({
            "path": self.path.display().to_string(),
            "sha256": hex::encode(Sha256::digest(self.text.as_bytes())),
        })
    }

    fn curve(&self) -> Outcome<UncertainCurve> {
        UncertainCurve::from_json(&self.text)
            .map_err(|e| Failure::Input(format!("{}: {e}", self.path.display())))
    }

    fn formula(&self) -> Outcome<CnfFormula> {
        CnfFormula::parse_dimacs(&self.text).map_err(|e| Failure::Input(format!("{}: {e}", self.path.display())))
    }
}

fn read_pair(p: &Pair) -> Outcome<(Input, Input, UncertainCurve, UncertainCurve)> {
    let (a, b) = (Input::read(&p.a)?, Input::read(&p.b)?);
    let (u, v) = (a.curve()?, b.curve()?);
    Ok((a, b, u, v))
}

/// Everything a subcommand wants to say: the human text and the result
/// fields of the json-lines record.
struct Report {
    command: &'static str,
    inputs: Vec<Value>,
    human: String,
    fields: Value,
}

fn curve_strings(c: &PolyCurve) -> Vec<String> {
    c.vertices().iter().map(|x| x.to_string()).collect()
}

fn write_file(path: &Path, text: &str) -> Outcome<()> {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn metric(variant: Variant, adjacency: u32) -> Metric {
    match variant {
        Variant::Frechet => Metric::Frechet,
        Variant::Discrete => Metric::DiscreteFrechet,
        Variant::Weak => Metric::Weak,
        Variant::DiscreteWeak => Metric::DiscreteWeak(Adjacency::from_degree(adjacency).unwrap_or_default()),
    }
}

fn decide(args: &DecideArgs) -> Outcome<Report> {
    let (a, b, u, v) = read_pair(&args.curves)?;
    let opts = LbOptions {
        strict: args.strict,
        trace: args.dump_regions.is_some(),
        witness: args.witness,
    };
    let d = decide_lb_with(&u, &v, &args.delta, &opts)?;
    for w in &d.warnings {
        eprintln!("warning: {w}");
    }
    if let (Some(dir), Some(trace)) = (&args.dump_regions, &d.trace) {
        trace
            .dump_to(dir)
            .map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
    }
    let mut human = d.feasible.to_string();
    let mut fields = json!({ "delta": args.delta.to_string(), "result": d.feasible });
    if let Some((p, q)) = &d.witness {
        human.push_str(&format!("\nwitness {p}\nwitness {q}"));
        fields["witness"] = json!([curve_strings(p), curve_strings(q)]);
    }
    Ok(Report {
        command: "decide",
        inputs: vec![a.record(), b.record()],
        human,
        fields,
    })
}

fn value(args: &ValueArgs) -> Outcome<Report> {
    let (a, b, u, v) = read_pair(&args.curves)?;
    let opts = LbOptions {
        strict: args.strict,
        ..LbOptions::default()
    };
    let x = compute_lb_with(&u, &v, &args.tol, &opts)?;
    Ok(Report {
        command: "value",
        inputs: vec![a.record(), b.record()],
        human: x.to_string(),
        fields: json!({ "tol": args.tol.to_string(), "result": x.to_string() }),
    })
}

fn precise(args: &PreciseArgs) -> Outcome<Report> {
    let (a, b, u, v) = read_pair(&args.curves)?;
    let precise = |c: &UncertainCurve, input: &Input| {
        c.to_precise()
            .map_err(|e| Failure::Input(format!("{}: {e}", input.path.display())))
    };
    let (p, q) = (precise(&u, &a)?, precise(&v, &b)?);
    let x = match args.variant {
        Variant::DiscreteWeak => discrete_weak(&p, &q, Adjacency::from_degree(args.adjacency).unwrap_or_default()),
        other => metric(other, args.adjacency).eval(&p, &q),
    };
    Ok(Report {
        command: "precise",
        inputs: vec![a.record(), b.record()],
        human: x.to_string(),
        fields: json!({ "variant": metric(args.variant, args.adjacency).to_string(), "result": x.to_string() }),
    })
}

fn weak_lb(cmd: &WeakCommand) -> Outcome<Report> {
    match cmd {
        WeakCommand::Decide { delta, curves, cap } => {
            let (a, b, u, v) = read_pair(curves)?;
            let ok = wfr_min_decide_with(&u, &v, delta, &WeakOptions { cap: *cap })?;
            Ok(Report {
                command: "weak-lb decide",
                inputs: vec![a.record(), b.record()],
                human: ok.to_string(),
                fields: json!({ "delta": delta.to_string(), "result": ok }),
            })
        }
        WeakCommand::Value { curves, cap } => {
            let (a, b, u, v) = read_pair(curves)?;
            let x = wfr_min_value_with(&u, &v, &WeakOptions { cap: *cap })?;
            Ok(Report {
                command: "weak-lb value",
                inputs: vec![a.record(), b.record()],
                human: x.to_string(),
                fields: json!({ "result": x.to_string() }),
            })
        }
    }
}

fn oracle(args: &OracleArgs) -> Outcome<Report> {
    let (a, b, u, v) = read_pair(&args.curves)?;
    if args.resolution == 0 {
        return Err(Failure::Usage("resolution must be positive".into()));
    }
    let spec = EnumerationSpec::new(args.resolution).with_cap(args.cap);
    let side = match args.side {
        SideArg::Lower => Side::Lower,
        SideArg::Upper => Side::Upper,
    };
    let m = metric(args.variant, args.adjacency);
    let r = bound_oracle_full(&u, &v, m, side, &spec)?;
    let (p, q) = &r.witness;
    Ok(Report {
        command: "oracle",
        inputs: vec![a.record(), b.record()],
        human: format!("{}\nwitness {p}\nwitness {q}\npairs {}", r.value, r.pairs),
        fields: json!({
            "variant": m.to_string(),
            "side": format!("{:?}", args.side).to_lowercase(),
            "resolution": args.resolution,
            "result": r.value.to_string(),
            "witness": [curve_strings(p), curve_strings(q)],
            "pairs": r.pairs.to_string(),
        }),
    })
}

fn reduce(cmd: &ReduceCommand) -> Outcome<Report> {
    match cmd {
        ReduceCommand::UbSat { cnf, model, o } | ReduceCommand::WeakDiscrete { cnf, model, o } => {
            let input = Input::read(cnf)?;
            let f = input.formula()?;
            let (name, inst) = match cmd {
                ReduceCommand::UbSat { .. } => ("reduce ub-sat", build_ub_sat(&f, (*model).into())?),
                _ => ("reduce weak-discrete", build_weak_discrete(&f, (*model).into())?),
            };
            write_file(&o[0], &inst.u.to_json())?;
            write_file(&o[1], &inst.v.to_json())?;
            let mut human = format!(
                "{}: |U| = {}, |V| = {}, delta {}, gap {}",
                inst.kind,
                inst.u.len(),
                inst.v.len(),
                inst.delta,
                inst.gap_value
            );
            for n in &inst.notes {
                human.push_str(&format!("\nnote: {n}"));
            }
            Ok(Report {
                command: name,
                inputs: vec![input.record()],
                human,
                fields: json!({
                    "kind": inst.kind.to_string(),
                    "lengths": [inst.u.len(), inst.v.len()],
                    "delta": inst.delta.to_string(),
                    "gap": inst.gap_value.to_string(),
                    "outputs": [o[0].display().to_string(), o[1].display().to_string()],
                    "notes": inst.notes,
                }),
            })
        }
        ReduceCommand::Lift2d { curves, sentinel, o } => {
            let (a, b, u, v) = read_pair(curves)?;
            let (p, q) = lift_curves(&u, &v, sentinel)?;
            write_file(&o[0], &p.to_json())?;
            write_file(&o[1], &q.to_json())?;
            Ok(Report {
                command: "reduce lift2d",
                inputs: vec![a.record(), b.record()],
                human: format!("lifted {} and {} vertices", p.points.len(), q.points.len()),
                fields: json!({
                    "sentinel": sentinel.to_string(),
                    "lengths": [p.points.len(), q.points.len()],
                    "outputs": [o[0].display().to_string(), o[1].display().to_string()],
                }),
            })
        }
    }
}

fn verify(args: &VerifyArgs) -> Outcome<Report> {
    let input = Input::read(&args.cnf)?;
    let f = input.formula()?;
    let model: Model = args.model.into();
    let inst = match args.kind {
        KindArg::Ub => build_ub_sat(&f, model)?,
        KindArg::Weak => build_weak_discrete(&f, model)?,
    };
    let resolution = args.resolution.unwrap_or(match (args.kind, model) {
        (KindArg::Ub, Model::Imprecise) => 7,
        _ => 2,
    });
    let spec = EnumerationSpec::new(resolution).with_cap(args.cap);
    let report = verify_reduction(&inst, &spec)?;
    Ok(Report {
        command: "verify",
        inputs: vec![input.record()],
        human: report.to_string(),
        fields: json!({
            "result": if report.passed() { "pass" } else { "fail" },
            "report": serde_json::to_value(&report).map_err(|e| Failure::Internal(e.to_string()))?,
        }),
    })
}

fn dispatch(cli: &Cli) -> Outcome<Report> {
    match &cli.command {
        Command::Decide(a) => decide(a),
        Command::Value(a) => value(a),
        Command::Precise(a) => precise(a),
        Command::WeakLb(c) => weak_lb(c),
        Command::Oracle(a) => oracle(a),
        Command::Reduce(c) => reduce(c),
        Command::Verify(a) => verify(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.jobs {
        if n == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match dispatch(&cli) {
        Ok(r) => {
            match cli.format {
                Format::Human => println!("{}", r.human),
                Format::JsonLines => {
                    let mut rec = json!({ "command": r.command, "inputs": r.inputs });
                    if let (Value::Object(rec), Value::Object(fields)) = (&mut rec, r.fields) {
                        rec.extend(fields);
                    }
                    println!("{rec}");
                }
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
