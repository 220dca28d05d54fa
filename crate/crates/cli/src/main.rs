mod model;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use choice_core::choice::OptionSet;
use choice_core::Vector;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use model::{parse_vector, validate_query, LoadError, Model, Payload, Query, QueryKind, Rule};
use run::{check_object, run_query, Record, RunError, Status};

const EXIT_PRECONDITION: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_PARSE: u8 = 65;
const EXIT_UNREADABLE: u8 = 66;
const EXIT_DIMENSION: u8 = 67;
const EXIT_SCHEMA: u8 = 68;
const EXIT_UNVERIFIED: u8 = 70;

/// Exact inference for coherent and Archimedean choice models.
#[derive(Parser, Debug)]
#[command(name = "choicer", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report consistency, coherence and Archimedean properties of every
    /// named object.
    Check(Common),
    /// Membership in a cone, or of an option set in a choice model.
    Member {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        adhoc: Adhoc,
    },
    /// Archimedean consistency and closure membership.
    Arch {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        adhoc: Adhoc,
    },
    /// Normalise a functional so that it takes the value 1 at u_o.
    Nml {
        #[command(flatten)]
        common: Common,
        /// Functional to normalise instead of the model's nml queries.
        #[arg(long)]
        target: Option<String>,
        /// Reference option, defaulting to the space's u_o.
        #[arg(long, allow_hyphen_values = true)]
        reference: Option<String>,
    },
    /// Apply a decision rule to a menu.
    Choose {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        rule: Rule,
        /// Object to choose with instead of the model's choose queries.
        #[arg(long, requires = "menu")]
        target: Option<String>,
        /// Menu as options separated by ';', entries by ','.
        #[arg(long, requires = "target", allow_hyphen_values = true)]
        menu: Option<String>,
    },
    /// Run every query in the model.
    Report(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Path to the JSON model.
    model: PathBuf,
    /// Emit JSON.
    #[arg(long, conflicts_with = "text")]
    json: bool,
    /// Emit plain text (the default).
    #[arg(long)]
    text: bool,
}

#[derive(Args, Debug)]
struct Adhoc {
    /// Object to query instead of the model's queries.
    #[arg(long, requires = "option")]
    target: Option<String>,
    /// Option with entries separated by ','; repeat for an option set.
    #[arg(long, allow_hyphen_values = true)]
    option: Vec<String>,
}

enum Failure {
    Load(LoadError),
    Run(RunError),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Load(LoadError::Unreadable(_)) => EXIT_UNREADABLE,
            Failure::Load(LoadError::Syntax(_) | LoadError::Rational(_)) => EXIT_PARSE,
            Failure::Load(LoadError::Dimension(_)) | Failure::Run(RunError::Dimension(_)) => {
                EXIT_DIMENSION
            }
            Failure::Load(LoadError::Schema(_)) | Failure::Run(RunError::Invalid(_)) => EXIT_SCHEMA,
            Failure::Run(RunError::Unverified(_)) => EXIT_UNVERIFIED,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Load(e) => e.to_string(),
            Failure::Run(RunError::Unverified(m)) => format!("witness rejected: {m}"),
            Failure::Run(RunError::Dimension(m)) => format!("dimension mismatch: {m}"),
            Failure::Run(RunError::Invalid(m)) => format!("invalid query: {m}"),
        }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        Failure::Load(e)
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        Failure::Run(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(&cli.command) {
        Ok((name, json, records)) => {
            print!("{}", render(name, json, &records));
            if records.iter().any(|r| r.status == Status::Precondition) {
                ExitCode::from(EXIT_PRECONDITION)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(f) => {
            eprintln!("choicer: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn load(path: &Path) -> Result<Model, LoadError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| LoadError::Unreadable(format!("{}: {e}", path.display())))?;
    Model::parse(&text)
}

fn parse_cli_vector(context: &str, s: &str, model: &Model) -> Result<Vector, LoadError> {
    let entries: Vec<String> = s.split(',').map(|t| t.trim().to_string()).collect();
    let v = parse_vector(context, &entries)?;
    if v.dim() != model.space.dim() {
        return Err(LoadError::Dimension(format!(
            "{context}: expected {} entries, found {}",
            model.space.dim(),
            v.dim()
        )));
    }
    Ok(v)
}

/// A query built from command-line flags rather than the model file.
fn adhoc(
    model: &Model,
    target: &str,
    kind: QueryKind,
    payload: Payload,
) -> Result<Query, LoadError> {
    let ctx = format!("--target {target}");
    let obj = model
        .get(target)
        .ok_or_else(|| LoadError::Schema(format!("{ctx}: unknown object")))?;
    validate_query(&ctx, kind, obj, &payload)?;
    Ok(Query {
        name: "cli".into(),
        target: target.to_string(),
        kind,
        payload,
    })
}

fn options_payload(model: &Model, options: &[String]) -> Result<Payload, LoadError> {
    let options = options
        .iter()
        .map(|o| parse_cli_vector("--option", o, model))
        .collect::<Result<_, _>>()?;
    Ok(Payload {
        options,
        ..Payload::default()
    })
}

fn file_queries<'a>(model: &'a Model, kinds: &[QueryKind]) -> Vec<&'a Query> {
    model
        .queries
        .iter()
        .filter(|q| kinds.contains(&q.kind))
        .collect()
}

fn run_all(model: &Model, queries: &[&Query], rule: Option<Rule>) -> Result<Vec<Record>, RunError> {
    queries.iter().map(|q| run_query(model, q, rule)).collect()
}

fn execute(cmd: &Command) -> Result<(&'static str, bool, Vec<Record>), Failure> {
    Ok(match cmd {
        Command::Check(c) => {
            let model = load(&c.model)?;
            let records = model
                .objects
                .iter()
                .map(|(name, obj)| check_object(&model, name, obj))
                .collect::<Result<_, _>>()?;
            ("check", c.json, records)
        }
        Command::Member { common, adhoc: a } => {
            let model = load(&common.model)?;
            let records = match &a.target {
                Some(t) => {
                    let query = adhoc(
                        &model,
                        t,
                        QueryKind::Member,
                        options_payload(&model, &a.option)?,
                    )?;
                    vec![run_query(&model, &query, None)?]
                }
                None => run_all(&model, &file_queries(&model, &[QueryKind::Member]), None)?,
            };
            ("member", common.json, records)
        }
        Command::Arch { common, adhoc: a } => {
            let model = load(&common.model)?;
            let records = match &a.target {
                Some(t) => {
                    let query = adhoc(
                        &model,
                        t,
                        QueryKind::ClosureMember,
                        options_payload(&model, &a.option)?,
                    )?;
                    vec![run_query(&model, &query, None)?]
                }
                None => {
                    let kinds = [
                        QueryKind::ArchConsistent,
                        QueryKind::ClosureMember,
                        QueryKind::Separate,
                        QueryKind::LambdaO,
                    ];
                    run_all(&model, &file_queries(&model, &kinds), None)?
                }
            };
            ("arch", common.json, records)
        }
        Command::Nml {
            common,
            target,
            reference,
        } => {
            let model = load(&common.model)?;
            let reference = reference
                .as_deref()
                .map(|r| parse_cli_vector("--reference", r, &model))
                .transpose()?;
            let records = match target {
                Some(t) => {
                    let payload = Payload {
                        reference,
                        ..Payload::default()
                    };
                    let query = adhoc(&model, t, QueryKind::Nml, payload)?;
                    vec![run_query(&model, &query, None)?]
                }
                None => {
                    let mut queries: Vec<Query> = file_queries(&model, &[QueryKind::Nml])
                        .into_iter()
                        .cloned()
                        .collect();
                    if let Some(r) = &reference {
                        for q in &mut queries {
                            q.payload.reference = Some(r.clone());
                        }
                    }
                    let refs: Vec<&Query> = queries.iter().collect();
                    run_all(&model, &refs, None)?
                }
            };
            ("nml", common.json, records)
        }
        Command::Choose {
            common,
            rule,
            target,
            menu,
        } => {
            let model = load(&common.model)?;
            let records = match (target, menu) {
                (Some(t), Some(m)) => {
                    let opts = m
                        .split(';')
                        .map(|o| parse_cli_vector("--menu", o, &model))
                        .collect::<Result<Vec<_>, _>>()?;
                    let menu = OptionSet::new(opts)
                        .map_err(|e| LoadError::Schema(format!("--menu: {e}")))?;
                    let payload = Payload {
                        menu: Some(menu),
                        rule: Some(*rule),
                        ..Payload::default()
                    };
                    let query = adhoc(&model, t, QueryKind::Choose, payload)?;
                    vec![run_query(&model, &query, Some(*rule))?]
                }
                _ => run_all(
                    &model,
                    &file_queries(&model, &[QueryKind::Choose]),
                    Some(*rule),
                )?,
            };
            ("choose", common.json, records)
        }
        Command::Report(c) => {
            let model = load(&c.model)?;
            let all: Vec<&Query> = model.queries.iter().collect();
            ("report", c.json, run_all(&model, &all, None)?)
        }
    })
}

fn render(command: &str, json: bool, records: &[Record]) -> String {
    if json {
        let doc = json!({
            "command": command,
            "records": Value::Array(records.iter().map(Record::to_json).collect()),
        });
        return format!(
            "{}\n",
            serde_json::to_string_pretty(&doc).expect("serialisable")
        );
    }
    let mut out = String::new();
    for r in records {
        let marker = match r.status {
            Status::Answered => "",
            Status::Precondition => " [precondition]",
        };
        out.push_str(&format!(
            "{} {} {}: {}{marker}\n",
            r.kind,
            r.name,
            r.target,
            compact(&r.answer)
        ));
        if let Some(w) = &r.witness {
            out.push_str(&format!("  witness: {}\n", compact(w)));
        }
    }
    out
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
