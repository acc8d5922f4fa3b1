use std::fmt::Write as _;
use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use lmlogic::connectives::{count_admissible, enumerate_admissible, ENUMERATION_CAP};
use lmlogic::lefebvre::{
    bipolar_choice, bipolar_uniform_expectation, tripolar_choice, tripolar_via_formula,
    BipolarInputs, ExpectationMode, TripolarInputs,
};
use lmlogic::lindblad::{
    and_or_model, copy_model, marginal, prepare_product, run_gate, stationary, GateSpec,
    PreparationRates, RateModel, Stationary, StationaryOptions, GATE_RATE,
};
use lmlogic::{compile_boolean, evaluate, parse, Environment, Error};

/// Largest number of Boolean arguments accepted by `enumerate`.
const MAX_ENUMERATE_ARGS: u32 = 16;

#[derive(Parser)]
#[command(
    name = "lmlogic",
    version,
    about = "Probabilistic many-valued logic toolkit"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a formula on independent likelihood inputs.
    Eval {
        formula: String,
        /// Bindings as a JSON object: a file path, inline JSON, or "-" for stdin.
        #[arg(long)]
        env: String,
    },
    /// Compile a Boolean formula to a single admissible map.
    Compile {
        formula: String,
        /// Comma-separated atom order; defaults to order of first appearance.
        #[arg(long, value_delimiter = ',')]
        atoms: Option<Vec<String>>,
    },
    /// Count (and list, below the cap) all admissible maps of N arguments.
    Enumerate {
        /// Number of arguments.
        n: u32,
        /// Truth classes per argument.
        #[arg(long, default_value_t = 2)]
        arity: usize,
        /// Truth classes of the result.
        #[arg(long, default_value_t = 2)]
        output_dim: usize,
        #[arg(long)]
        count_only: bool,
    },
    /// Relax a fermionic rate model to its stationary state.
    Simulate {
        #[arg(value_enum)]
        gate: Gate,
        /// Probability that mode 0 is occupied (true).
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        /// Probability that mode 1 is occupied (true).
        #[arg(long, default_value_t = 0.5)]
        q: f64,
        /// Explicit preparation rates a,b,c,d (prepare only).
        #[arg(long, value_delimiter = ',')]
        rates: Option<Vec<f64>>,
        /// Gate spec for `custom`: a file path, inline JSON, or "-".
        #[arg(long)]
        spec: Option<String>,
        /// Initial distribution for `custom`; uniform when omitted.
        #[arg(long)]
        init: Option<String>,
        /// Convergence threshold on the L1 norm of Qp.
        #[arg(long, default_value_t = lmlogic::lindblad::STATIONARY_TOL)]
        tol: f64,
        /// Maximum number of integration chunks.
        #[arg(long, default_value_t = StationaryOptions::default().max_steps)]
        max_steps: usize,
    },
    /// Lefebvre's reflexive-choice model.
    Lefebvre {
        #[command(subcommand)]
        mode: LefebvreMode,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Gate {
    Prepare,
    Andor,
    AndorSwapped,
    Copy,
    Custom,
}

#[derive(Subcommand)]
enum LefebvreMode {
    /// Probability of the positive pole.
    Bipolar {
        /// x1 x2 x3 in [0, 1]; omit to average over uniform inputs.
        #[arg(num_args = 3, value_names = ["X1", "X2", "X3"])]
        values: Option<Vec<f64>>,
        /// Inputs as {"x1":..,"x2":..,"x3":..}: a file path, inline JSON, or "-".
        #[arg(long, conflicts_with = "values")]
        input: Option<String>,
        /// Use a Monte-Carlo estimate of the uniform-input expectation.
        #[arg(long, conflicts_with_all = ["values", "input"])]
        montecarlo: bool,
        #[arg(long, default_value_t = 100_000, requires = "montecarlo")]
        samples: u64,
        #[arg(long, requires = "montecarlo")]
        seed: Option<u64>,
    },
    /// Probabilities of the positive, negative and middle alternatives.
    Tripolar {
        /// Use uniform three-valued inputs.
        #[arg(value_parser = ["uniform"])]
        preset: Option<String>,
        /// Inputs as {"x1":[T,U,F],"x2":[..],"x3":[..]}: a file path, inline JSON, or "-".
        #[arg(long, conflicts_with = "preset")]
        input: Option<String>,
        /// Compute through the compiled double implication instead of the closed form.
        #[arg(long)]
        via_formula: bool,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn parse(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) => 2,
            Error::NonConvergence { .. } => 4,
            _ => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<lmlogic::formula::ParseError> for Failure {
    fn from(e: lmlogic::formula::ParseError) -> Self {
        Failure::parse(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        use serde_json::error::Category;
        let code = match e.classify() {
            Category::Data => 3,
            _ => 2,
        };
        Failure {
            code,
            message: format!("invalid JSON input: {e}"),
        }
    }
}

type Outcome = std::result::Result<Value, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(v) => {
            print!("{}", render(&v, cli.format));
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Eval { formula, env } => cmd_eval(&formula, &env),
        Command::Compile { formula, atoms } => cmd_compile(&formula, atoms),
        Command::Enumerate {
            n,
            arity,
            output_dim,
            count_only,
        } => cmd_enumerate(n, arity, output_dim, count_only),
        Command::Simulate {
            gate,
            p,
            q,
            rates,
            spec,
            init,
            tol,
            max_steps,
        } => {
            let opts = StationaryOptions { tol, max_steps };
            cmd_simulate(gate, p, q, rates, spec, init, &opts)
        }
        Command::Lefebvre { mode } => cmd_lefebvre(mode),
    }
}

/// Reads a JSON argument that is either inline, a path, or "-" for stdin.
fn read_source(arg: &str) -> Result<String, Failure> {
    let trimmed = arg.trim_start();
    if arg == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::parse(format!("cannot read stdin: {e}")))?;
        Ok(s)
    } else if trimmed.starts_with('{') || trimmed.starts_with('[') {
        Ok(arg.to_owned())
    } else {
        std::fs::read_to_string(arg).map_err(|e| Failure::parse(format!("cannot read {arg}: {e}")))
    }
}

fn cmd_eval(formula: &str, env: &str) -> Outcome {
    let f = parse(formula)?;
    let env: Environment = serde_json::from_str(&read_source(env)?)?;
    Ok(json!(evaluate(&f, &env)?))
}

fn cmd_compile(formula: &str, atoms: Option<Vec<String>>) -> Outcome {
    let f = parse(formula)?;
    let order = atoms.unwrap_or_else(|| f.atoms().into_iter().map(str::to_owned).collect());
    let map = compile_boolean(&f, &order)?;
    Ok(json!({ "atoms": order, "map": map }))
}

fn cmd_enumerate(n: u32, arity: usize, output_dim: usize, count_only: bool) -> Outcome {
    if arity < 2 {
        return Err(Error::InvalidArity(arity).into());
    }
    if output_dim < 2 {
        return Err(Error::InvalidArity(output_dim).into());
    }
    if n > MAX_ENUMERATE_ARGS {
        return Err(Failure {
            code: 3,
            message: format!("at most {MAX_ENUMERATE_ARGS} arguments are supported, got {n}"),
        });
    }
    let input_dim = arity
        .checked_pow(n)
        .filter(|&d| d <= 1 << 20)
        .ok_or_else(|| Failure {
            code: 3,
            message: format!("input dimension {arity}^{n} is too large"),
        })?;
    let count = count_admissible(input_dim, output_dim);
    let mut out = json!({
        "arguments": n,
        "inputDim": input_dim,
        "outputDim": output_dim,
        "count": count.to_string(),
    });
    if !count_only {
        out["listing"] = match enumerate_admissible(input_dim, output_dim) {
            Ok(maps) => Value::Array(maps.map(|m| json!(m.columns())).collect()),
            Err(Error::EnumerationTooLarge { .. }) => {
                out["note"] = json!(format!("listing refused above {ENUMERATION_CAP} maps"));
                Value::Null
            }
            Err(e) => return Err(e.into()),
        };
    }
    Ok(out)
}

fn cmd_simulate(
    gate: Gate,
    p: f64,
    q: f64,
    rates: Option<Vec<f64>>,
    spec: Option<String>,
    init: Option<String>,
    opts: &StationaryOptions,
) -> Outcome {
    if gate != Gate::Custom && (spec.is_some() || init.is_some()) {
        return Err(Failure::parse(
            "--spec and --init are only valid with the custom gate",
        ));
    }
    if gate != Gate::Prepare && rates.is_some() {
        return Err(Failure::parse(
            "--rates is only valid with the prepare gate",
        ));
    }
    let (name, input, st) = match gate {
        Gate::Prepare => {
            let r = match rates.as_deref() {
                Some(&[a, b, c, d]) => PreparationRates { a, b, c, d },
                Some(_) => return Err(Failure::parse("--rates needs four values")),
                None => PreparationRates::from_probabilities(p, q)?,
            };
            let uniform = vec![0.25; 4];
            ("prepare", uniform, prepare_product(&r, opts)?)
        }
        Gate::Andor | Gate::AndorSwapped | Gate::Copy => {
            let model = match gate {
                Gate::Copy => copy_model(GATE_RATE, GATE_RATE)?,
                g => and_or_model(GATE_RATE, g == Gate::AndorSwapped)?,
            };
            let name = match gate {
                Gate::Andor => "andor",
                Gate::AndorSwapped => "andor-swapped",
                _ => "copy",
            };
            let out = run_gate(&model, p, q, opts)?;
            (name, out.input, out.stationary)
        }
        Gate::Custom => {
            let spec = spec.ok_or_else(|| Failure::parse("the custom gate needs --spec"))?;
            let spec: GateSpec = serde_json::from_str(&read_source(&spec)?)?;
            let model: RateModel = spec.build()?;
            let p0: Vec<f64> = match init {
                Some(s) => serde_json::from_str(&read_source(&s)?)?,
                None => vec![1.0 / model.dim() as f64; model.dim()],
            };
            let st = stationary(&model, &p0, opts)?;
            ("custom", p0, st)
        }
    };
    simulation_report(name, &input, &st, opts)
}

fn simulation_report(
    gate: &str,
    input: &[f64],
    st: &Stationary,
    opts: &StationaryOptions,
) -> Outcome {
    let modes = st.distribution.len().trailing_zeros() as usize;
    let states: serde_json::Map<String, Value> = st
        .distribution
        .iter()
        .enumerate()
        .map(|(i, v)| (format!("{i:0modes$b}"), json!(v)))
        .collect();
    let marginals = (0..modes)
        .map(|site| marginal(&st.distribution, site).map(|m| json!(m)))
        .collect::<lmlogic::Result<Vec<_>>>()?;
    Ok(json!({
        "gate": gate,
        "modes": modes,
        "initial": input,
        "distribution": st.distribution,
        "states": states,
        "marginals": marginals,
        "diagnostics": {
            "converged": true,
            "residual": st.residual,
            "tol": opts.tol,
            "time": st.time,
            "steps": st.steps,
        },
    }))
}

fn cmd_lefebvre(mode: LefebvreMode) -> Outcome {
    match mode {
        LefebvreMode::Bipolar {
            values,
            input,
            montecarlo,
            samples,
            seed,
        } => {
            if montecarlo {
                let seed = seed.ok_or_else(|| Failure::parse("--montecarlo requires --seed"))?;
                let est =
                    bipolar_uniform_expectation(ExpectationMode::MonteCarlo { samples, seed })?;
                return Ok(json!({
                    "X": est.mean,
                    "stdError": est.std_error,
                    "samples": est.samples,
                    "seed": seed,
                }));
            }
            let inputs = match (values, input) {
                (Some(v), _) => BipolarInputs::new(v[0], v[1], v[2])?,
                (None, Some(src)) => serde_json::from_str(&read_source(&src)?)?,
                (None, None) => {
                    let est = bipolar_uniform_expectation(ExpectationMode::Analytic)?;
                    return Ok(json!({ "X": est.mean, "expectation": "uniform" }));
                }
            };
            Ok(json!({ "X": bipolar_choice(&inputs) }))
        }
        LefebvreMode::Tripolar {
            preset,
            input,
            via_formula,
        } => {
            let inputs = match (preset, input) {
                (_, Some(src)) => serde_json::from_str(&read_source(&src)?)?,
                (Some(_), None) => TripolarInputs::uniform(),
                (None, None) => {
                    return Err(Failure::parse("tripolar needs `uniform` or --input"));
                }
            };
            let choice = if via_formula {
                tripolar_via_formula(&inputs)?
            } else {
                tripolar_choice(&inputs)
            };
            Ok(json!(choice))
        }
    }
}

fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => format!("{v}\n"),
        Format::Table => {
            let mut out = String::new();
            table_rows(&mut out, "", v);
            out
        }
    }
}

fn table_rows(out: &mut String, prefix: &str, v: &Value) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                table_rows(out, &key, child);
            }
        }
        Value::Array(items) if items.iter().any(|i| i.is_object() || i.is_array()) => {
            for (i, child) in items.iter().enumerate() {
                table_rows(out, &format!("{prefix}[{i}]"), child);
            }
        }
        _ => {
            let cell = match v {
                Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join("  "),
                other => scalar(other),
            };
            let label = if prefix.is_empty() { "value" } else { prefix };
            let _ = writeln!(out, "{label:<24}{cell}");
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
