//! Command line grammar and its translation into JSON command options.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use spinbasis::notation::parse_stages;
use spinbasis::Result;

pub const PORT_ENV: &str = "SPINBASIS_PORT";

#[derive(Debug, Parser)]
#[command(
    name = "spinbasis",
    version,
    about = "Spin-1/2 basis deduction, measurement and commutator tools"
)]
pub struct Cli {
    /// Print the JSON envelope instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Numerical tolerance for deduction checks.
    #[arg(long, global = true, value_name = "EPS")]
    pub eps: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the basis deduction and print its report.
    Deduce(DeduceArgs),
    /// Born probabilities of a state along an axis.
    Probabilities(StateAxisArgs),
    /// One seeded measurement of a state along an axis.
    Measure(MeasureArgs),
    /// Simulate a chain of analyzers.
    Chain(ChainArgs),
    /// Check the spin or orbital angular momentum commutator.
    Commutator(CommutatorArgs),
    /// Bloch vector of a state.
    Bloch(StateArgs),
    /// The six canonical basis states.
    Basis,
    /// Library and API version.
    Version,
    /// Serve the JSON API over HTTP.
    Serve(ServeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum HandednessArg {
    Right,
    Left,
}

impl HandednessArg {
    fn as_str(self) -> &'static str {
        match self {
            HandednessArg::Right => "right",
            HandednessArg::Left => "left",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgebraArg {
    Spin,
    Orbital,
}

#[derive(Debug, Args)]
pub struct DeduceArgs {
    /// Phase of the x-up upper amplitude.
    #[arg(long, allow_hyphen_values = true)]
    pub phi1: Option<String>,
    /// Phase of the x-up lower amplitude.
    #[arg(long, allow_hyphen_values = true)]
    pub phi2: Option<String>,
    /// Phase of the x-down upper amplitude.
    #[arg(long, allow_hyphen_values = true)]
    pub phi3: Option<String>,
    /// Phase of the y-up upper amplitude.
    #[arg(long, allow_hyphen_values = true)]
    pub phi5: Option<String>,
    /// Phase of the y-down upper amplitude.
    #[arg(long, allow_hyphen_values = true)]
    pub phi7: Option<String>,
    #[arg(long, value_enum)]
    pub handedness: Option<HandednessArg>,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// State token, `equatorial:<angle>` or `re,im;re,im`.
    #[arg(long, allow_hyphen_values = true)]
    pub state: String,
}

#[derive(Debug, Args)]
pub struct StateAxisArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub state: String,
    /// `x`, `y`, `z` or `n(theta,phi)`.
    #[arg(long, allow_hyphen_values = true)]
    pub axis: String,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub target: StateAxisArgs,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    /// Prepared state.
    #[arg(long, allow_hyphen_values = true)]
    pub prepare: String,
    /// Comma-separated `axis:port` stages, e.g. `x:up,z:down`.
    #[arg(long, allow_hyphen_values = true)]
    pub stages: String,
    #[arg(long)]
    pub shots: u64,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct CommutatorArgs {
    #[arg(long, value_enum)]
    pub algebra: AlgebraArg,
    #[arg(long, value_enum, default_value = "right")]
    pub handedness: HandednessArg,
    /// Left operand of a custom orbital commutator.
    #[arg(long, requires = "b", allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Right operand of a custom orbital commutator.
    #[arg(long, requires = "a", allow_hyphen_values = true)]
    pub b: Option<String>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = PORT_ENV, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub bind: std::net::IpAddr,
}

impl Cli {
    /// Command name and JSON options equivalent to the parsed flags, or
    /// `None` for `serve`.
    pub fn to_request(&self) -> Option<Result<(&'static str, Value)>> {
        let r = match &self.command {
            Command::Deduce(d) => {
                let mut conventions = Map::new();
                for (k, v) in [
                    ("phi1", &d.phi1),
                    ("phi2", &d.phi2),
                    ("phi3", &d.phi3),
                    ("phi5", &d.phi5),
                    ("phi7", &d.phi7),
                ] {
                    if let Some(v) = v {
                        conventions.insert(k.into(), json!(v));
                    }
                }
                let mut o = Map::new();
                o.insert("conventions".into(), Value::Object(conventions));
                if let Some(h) = d.handedness {
                    o.insert("handedness".into(), json!(h.as_str()));
                }
                if let Some(t) = self.eps {
                    o.insert("tolerance".into(), json!(t));
                }
                Ok(("deduce", Value::Object(o)))
            }
            Command::Probabilities(a) => Ok(("probabilities", json!({ "state": a.state, "axis": a.axis }))),
            Command::Measure(m) => Ok((
                "measure",
                json!({ "state": m.target.state, "axis": m.target.axis, "seed": m.seed }),
            )),
            Command::Chain(c) => parse_stages(&c.stages).map(|stages| {
                let stages: Vec<Value> = stages
                    .iter()
                    .map(|s| serde_json::to_value(s).expect("stages serialize"))
                    .collect();
                (
                    "chain",
                    json!({ "preparation": c.prepare, "stages": stages, "shots": c.shots, "seed": c.seed }),
                )
            }),
            Command::Commutator(c) => {
                let mut o = Map::new();
                o.insert(
                    "algebra".into(),
                    json!(match c.algebra {
                        AlgebraArg::Spin => "spin",
                        AlgebraArg::Orbital => "orbital",
                    }),
                );
                o.insert("handedness".into(), json!(c.handedness.as_str()));
                if let (Some(a), Some(b)) = (&c.a, &c.b) {
                    o.insert("a".into(), json!(a));
                    o.insert("b".into(), json!(b));
                }
                Ok(("commutator", Value::Object(o)))
            }
            Command::Bloch(s) => Ok(("bloch", json!({ "state": s.state }))),
            Command::Basis => Ok(("basis", Value::Null)),
            Command::Version => Ok(("version", Value::Null)),
            Command::Serve(_) => return None,
        };
        Some(r)
    }
}
