//! Model files: the raw JSON schema and the validated in-memory model.
//!
//! Every scalar is a rational written as a string (`"3"`, `"-1/4"`), so
//! loading never goes through floating point. Each object is built through
//! the core constructors, whose invariant checks name the offending object
//! on failure.

use std::collections::BTreeMap;
use std::fmt;

use choice_core::choice::{KModel, OptionSet};
use choice_core::lottery::{embed_pref, HorseLottery, LotteryFrame};
use choice_core::{
    Background, DesirCone, Error as CoreError, Functional, LinearF, OptionSpace, Rational,
    SuperlinF, Vector,
};
use serde::Deserialize;

type Row = Vec<String>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModel {
    space: RawSpace,
    #[serde(default)]
    cones: Vec<RawCone>,
    #[serde(default)]
    functionals: Vec<RawFunctional>,
    #[serde(default)]
    k_models: Vec<RawK>,
    #[serde(default)]
    lotteries: Vec<RawLotteryBlock>,
    #[serde(default)]
    queries: Vec<RawQuery>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpace {
    dim: usize,
    background: BackgroundName,
    u_o: Option<Row>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
enum BackgroundName {
    Pointwise,
    Strict,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawCone {
    Posi { name: String, generators: Vec<Row> },
    OpenDual { name: String, pieces: Vec<Row> },
    Lex { name: String, levels: Vec<Row> },
    Vacuous { name: String },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawFunctional {
    Linear { name: String, coeffs: Row },
    Superlinear { name: String, pieces: Vec<Row> },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawK {
    Assessment { name: String, sets: Vec<Vec<Row>> },
    Credal { name: String, functionals: Vec<Row> },
    Binary { name: String, cone: String },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLotteryBlock {
    name: String,
    states: Vec<String>,
    rewards: Vec<String>,
    reference: String,
    lotteries: Vec<RawLottery>,
    preferences: Vec<RawPreference>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLottery {
    name: String,
    mass: Vec<Row>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPreference {
    better: String,
    worse: String,
    scale: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuery {
    name: String,
    target: String,
    kind: QueryKind,
    #[serde(default)]
    payload: RawPayload,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPayload {
    option: Option<Row>,
    options: Option<Vec<Row>>,
    menu: Option<Vec<Row>>,
    rule: Option<Rule>,
    reference: Option<Row>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryKind {
    Member,
    ClosureMember,
    ArchConsistent,
    Separate,
    LambdaO,
    Nml,
    Choose,
}

impl QueryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            QueryKind::Member => "member",
            QueryKind::ClosureMember => "closure_member",
            QueryKind::ArchConsistent => "arch_consistent",
            QueryKind::Separate => "separate",
            QueryKind::LambdaO => "lambda_o",
            QueryKind::Nml => "nml",
            QueryKind::Choose => "choose",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Eadm,
    Maximality,
    Reject,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::Eadm => "eadm",
            Rule::Maximality => "maximality",
            Rule::Reject => "reject",
        }
    }
}

/// Why a model could not be loaded; each maps to its own exit code.
#[derive(Debug, PartialEq, Eq)]
pub enum LoadError {
    Unreadable(String),
    Syntax(String),
    Rational(String),
    Dimension(String),
    Schema(String),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Unreadable(m) => write!(f, "cannot read model: {m}"),
            LoadError::Syntax(m) => write!(f, "parse error: {m}"),
            LoadError::Rational(m) => write!(f, "parse error: {m}"),
            LoadError::Dimension(m) => write!(f, "dimension mismatch: {m}"),
            LoadError::Schema(m) => write!(f, "invalid model: {m}"),
        }
    }
}

fn core_error(context: &str, e: CoreError) -> LoadError {
    let msg = format!("{context}: {e}");
    match e {
        CoreError::DimensionMismatch { .. } => LoadError::Dimension(msg),
        CoreError::Parse(_) => LoadError::Rational(msg),
        _ => LoadError::Schema(msg),
    }
}

pub fn parse_rational(context: &str, s: &str) -> Result<Rational, LoadError> {
    s.parse::<Rational>()
        .map_err(|e| LoadError::Rational(format!("{context}: {e}")))
}

pub fn parse_vector(context: &str, row: &[String]) -> Result<Vector, LoadError> {
    row.iter()
        .enumerate()
        .map(|(i, s)| parse_rational(&format!("{context}, entry {}", i + 1), s))
        .collect::<Result<Vec<_>, _>>()
        .map(Vector::new)
}

fn parse_rows(context: &str, rows: &[Row], dim: usize) -> Result<Vec<Vector>, LoadError> {
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            let ctx = format!("{context}, row {}", i + 1);
            let v = parse_vector(&ctx, r)?;
            check_dim(&ctx, dim, &v)?;
            Ok(v)
        })
        .collect()
}

fn check_dim(context: &str, dim: usize, v: &Vector) -> Result<(), LoadError> {
    if v.dim() == dim {
        Ok(())
    } else {
        Err(LoadError::Dimension(format!(
            "{context}: expected {dim} entries, found {}",
            v.dim()
        )))
    }
}

#[derive(Clone, Debug)]
pub enum Object {
    Cone(DesirCone),
    Functional(Functional),
    K(KModel),
}

impl Object {
    pub fn kind(&self) -> &'static str {
        match self {
            Object::Cone(_) => "cone",
            Object::Functional(_) => "functional",
            Object::K(_) => "k_model",
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Payload {
    pub options: Vec<Vector>,
    pub menu: Option<OptionSet>,
    pub rule: Option<Rule>,
    pub reference: Option<Vector>,
}

#[derive(Clone, Debug)]
pub struct Query {
    pub name: String,
    pub target: String,
    pub kind: QueryKind,
    pub payload: Payload,
}

#[derive(Debug)]
pub struct Model {
    pub space: OptionSpace,
    pub objects: Vec<(String, Object)>,
    index: BTreeMap<String, usize>,
    pub queries: Vec<Query>,
}

impl Model {
    pub fn get(&self, name: &str) -> Option<&Object> {
        self.index.get(name).map(|&i| &self.objects[i].1)
    }

    fn insert(&mut self, name: &str, obj: Object) -> Result<(), LoadError> {
        if self.index.contains_key(name) {
            return Err(LoadError::Schema(format!("duplicate object name {name:?}")));
        }
        self.index.insert(name.to_string(), self.objects.len());
        self.objects.push((name.to_string(), obj));
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Model, LoadError> {
        let raw: RawModel = serde_json::from_str(text).map_err(|e| {
            use serde_json::error::Category;
            match e.classify() {
                Category::Syntax | Category::Eof | Category::Io => LoadError::Syntax(e.to_string()),
                Category::Data => LoadError::Schema(e.to_string()),
            }
        })?;
        Model::build(raw)
    }

    fn build(raw: RawModel) -> Result<Model, LoadError> {
        let dim = raw.space.dim;
        let background = match raw.space.background {
            BackgroundName::Pointwise => Background::Pointwise,
            BackgroundName::Strict => Background::Strict,
        };
        let reference = match &raw.space.u_o {
            Some(r) => {
                let v = parse_vector("space.u_o", r)?;
                check_dim("space.u_o", dim, &v)?;
                v
            }
            None => Vector::ones(dim),
        };
        let space =
            OptionSpace::new(dim, background, reference).map_err(|e| core_error("space", e))?;
        let mut model = Model {
            space: space.clone(),
            objects: Vec::new(),
            index: BTreeMap::new(),
            queries: Vec::new(),
        };

        for c in &raw.cones {
            let (name, cone) = build_cone(&space, c)?;
            model.insert(name, Object::Cone(cone))?;
        }
        for f in &raw.functionals {
            let (name, func) = build_functional(dim, f)?;
            model.insert(name, Object::Functional(func))?;
        }
        for b in &raw.lotteries {
            let cone = build_lottery_block(&space, b)?;
            model.insert(&b.name, Object::Cone(cone))?;
        }
        for k in &raw.k_models {
            let (name, km) = build_k(&model, &space, k)?;
            model.insert(name, Object::K(km))?;
        }

        let mut seen = BTreeMap::new();
        for q in &raw.queries {
            if seen.insert(q.name.clone(), ()).is_some() {
                return Err(LoadError::Schema(format!(
                    "duplicate query name {:?}",
                    q.name
                )));
            }
            let query = build_query(&model, q)?;
            model.queries.push(query);
        }
        Ok(model)
    }
}

fn build_cone<'a>(space: &OptionSpace, c: &'a RawCone) -> Result<(&'a str, DesirCone), LoadError> {
    let dim = space.dim();
    let (name, built) = match c {
        RawCone::Posi { name, generators } => {
            let ctx = format!("cone {name:?} generators");
            let g = parse_rows(&ctx, generators, dim)?;
            (name, DesirCone::posi(space.clone(), g))
        }
        RawCone::OpenDual { name, pieces } => {
            let ctx = format!("cone {name:?} pieces");
            let p = parse_rows(&ctx, pieces, dim)?;
            (
                name,
                DesirCone::open_dual(space.clone(), p.into_iter().map(LinearF::new).collect()),
            )
        }
        RawCone::Lex { name, levels } => {
            let ctx = format!("cone {name:?} levels");
            let l = parse_rows(&ctx, levels, dim)?;
            (
                name,
                DesirCone::lex(space.clone(), l.into_iter().map(LinearF::new).collect()),
            )
        }
        RawCone::Vacuous { name } => (name, Ok(DesirCone::vacuous(space.clone()))),
    };
    let cone = built.map_err(|e| core_error(&format!("cone {name:?}"), e))?;
    Ok((name, cone))
}

fn build_functional(dim: usize, f: &RawFunctional) -> Result<(&str, Functional), LoadError> {
    match f {
        RawFunctional::Linear { name, coeffs } => {
            let ctx = format!("functional {name:?} coeffs");
            let c = parse_vector(&ctx, coeffs)?;
            check_dim(&ctx, dim, &c)?;
            Ok((name, Functional::Linear(LinearF::new(c))))
        }
        RawFunctional::Superlinear { name, pieces } => {
            let ctx = format!("functional {name:?} pieces");
            let p = parse_rows(&ctx, pieces, dim)?;
            let s = SuperlinF::new(p.into_iter().map(LinearF::new).collect())
                .map_err(|e| core_error(&format!("functional {name:?}"), e))?;
            Ok((name, Functional::Superlinear(s)))
        }
    }
}

fn build_k<'a>(
    model: &Model,
    space: &OptionSpace,
    k: &'a RawK,
) -> Result<(&'a str, KModel), LoadError> {
    let dim = space.dim();
    match k {
        RawK::Assessment { name, sets } => {
            let mut out = Vec::new();
            for (i, s) in sets.iter().enumerate() {
                let ctx = format!("k_model {name:?} set {}", i + 1);
                let opts = parse_rows(&ctx, s, dim)?;
                out.push(OptionSet::new(opts).map_err(|e| core_error(&ctx, e))?);
            }
            let km = KModel::assessment(space.clone(), out)
                .map_err(|e| core_error(&format!("k_model {name:?}"), e))?;
            Ok((name, km))
        }
        RawK::Credal { name, functionals } => {
            let ctx = format!("k_model {name:?} functionals");
            let ls = parse_rows(&ctx, functionals, dim)?;
            let km = KModel::credal(space.clone(), ls.into_iter().map(LinearF::new).collect())
                .map_err(|e| core_error(&format!("k_model {name:?}"), e))?;
            Ok((name, km))
        }
        RawK::Binary { name, cone } => match model.get(cone) {
            Some(Object::Cone(d)) => Ok((name, KModel::binary(d.clone()))),
            Some(other) => Err(LoadError::Schema(format!(
                "k_model {name:?}: {cone:?} is a {}, not a cone",
                other.kind()
            ))),
            None => Err(LoadError::Schema(format!(
                "k_model {name:?}: unknown cone {cone:?}"
            ))),
        },
    }
}

fn build_lottery_block(space: &OptionSpace, b: &RawLotteryBlock) -> Result<DesirCone, LoadError> {
    let ctx = format!("lottery block {:?}", b.name);
    let frame =
        LotteryFrame::new(b.states.clone(), b.rewards.clone()).map_err(|e| core_error(&ctx, e))?;
    frame
        .reward_index(&b.reference)
        .map_err(|e| core_error(&ctx, e))?;
    if frame.option_dim() != space.dim() {
        return Err(LoadError::Dimension(format!(
            "{ctx}: embeds into dimension {}, the space has {}",
            frame.option_dim(),
            space.dim()
        )));
    }
    let mut named: Vec<(&str, HorseLottery)> = Vec::new();
    for l in &b.lotteries {
        let lctx = format!("{ctx}, lottery {:?}", l.name);
        if named.iter().any(|(n, _)| *n == l.name) {
            return Err(LoadError::Schema(format!("{lctx}: duplicate lottery name")));
        }
        if l.mass.len() != frame.states().len() {
            return Err(LoadError::Dimension(format!(
                "{lctx}: expected {} state rows, found {}",
                frame.states().len(),
                l.mass.len()
            )));
        }
        let mass = l
            .mass
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let rctx = format!("{lctx}, state {}", i + 1);
                let v = parse_vector(&rctx, r)?;
                check_dim(&rctx, frame.rewards().len(), &v)?;
                Ok(v.into_entries())
            })
            .collect::<Result<Vec<_>, LoadError>>()?;
        let lottery = frame.lottery(mass).map_err(|e| core_error(&lctx, e))?;
        named.push((&l.name, lottery));
    }
    let find = |n: &str| {
        named
            .iter()
            .find(|(m, _)| *m == n)
            .map(|(_, l)| l)
            .ok_or_else(|| LoadError::Schema(format!("{ctx}: unknown lottery {n:?}")))
    };
    let mut generators = Vec::new();
    for (i, p) in b.preferences.iter().enumerate() {
        let pctx = format!("{ctx}, preference {}", i + 1);
        let scale = match &p.scale {
            Some(s) => parse_rational(&pctx, s)?,
            None => Rational::one(),
        };
        let d = embed_pref(find(&p.better)?, find(&p.worse)?, &scale)
            .map_err(|e| core_error(&pctx, e))?;
        generators.push(
            frame
                .to_vector(&d, &b.reference)
                .map_err(|e| core_error(&pctx, e))?,
        );
    }
    DesirCone::posi(space.clone(), generators).map_err(|e| core_error(&ctx, e))
}

fn build_query(model: &Model, q: &RawQuery) -> Result<Query, LoadError> {
    let ctx = format!("query {:?}", q.name);
    let dim = model.space.dim();
    let Some(target) = model.get(&q.target) else {
        return Err(LoadError::Schema(format!(
            "{ctx}: unknown target {:?}",
            q.target
        )));
    };
    let p = &q.payload;
    let mut payload = Payload {
        rule: p.rule,
        ..Payload::default()
    };
    if let Some(o) = &p.option {
        let v = parse_vector(&format!("{ctx} option"), o)?;
        check_dim(&format!("{ctx} option"), dim, &v)?;
        payload.options.push(v);
    }
    if let Some(os) = &p.options {
        payload
            .options
            .extend(parse_rows(&format!("{ctx} options"), os, dim)?);
    }
    if let Some(m) = &p.menu {
        let opts = parse_rows(&format!("{ctx} menu"), m, dim)?;
        payload.menu = Some(OptionSet::new(opts).map_err(|e| core_error(&ctx, e))?);
    }
    if let Some(r) = &p.reference {
        let v = parse_vector(&format!("{ctx} reference"), r)?;
        check_dim(&format!("{ctx} reference"), dim, &v)?;
        payload.reference = Some(v);
    }
    validate_query(&ctx, q.kind, target, &payload)?;
    Ok(Query {
        name: q.name.clone(),
        target: q.target.clone(),
        kind: q.kind,
        payload,
    })
}

/// Checks that the query kind applies to the target and that the payload
/// carries what the kind needs.
pub fn validate_query(
    ctx: &str,
    kind: QueryKind,
    target: &Object,
    payload: &Payload,
) -> Result<(), LoadError> {
    let schema = |m: String| Err(LoadError::Schema(format!("{ctx}: {m}")));
    let applies = matches!(
        (kind, target),
        (
            QueryKind::Member | QueryKind::ClosureMember | QueryKind::ArchConsistent,
            Object::Cone(_) | Object::K(_)
        ) | (QueryKind::Separate | QueryKind::LambdaO, Object::Cone(_))
            | (QueryKind::Nml, Object::Functional(_))
            | (QueryKind::Choose, _)
    );
    if !applies {
        return schema(format!(
            "{} does not apply to a {}",
            kind.as_str(),
            target.kind()
        ));
    }
    let n = payload.options.len();
    match (kind, target) {
        (QueryKind::Member | QueryKind::ClosureMember, Object::Cone(_))
        | (QueryKind::Separate | QueryKind::LambdaO, _)
            if n != 1 =>
        {
            schema(format!(
                "{} on a cone needs exactly one option",
                kind.as_str()
            ))
        }
        (QueryKind::Member | QueryKind::ClosureMember, Object::K(_)) if n == 0 => schema(format!(
            "{} on a k_model needs at least one option",
            kind.as_str()
        )),
        (QueryKind::Choose, _) if payload.menu.is_none() => schema("choose needs a menu".into()),
        (QueryKind::Choose, obj) => match (payload.rule, obj) {
            (None, _) => Ok(()),
            (Some(rule), obj) => rule_applies(ctx, rule, obj),
        },
        _ => Ok(()),
    }
}

pub fn rule_applies(ctx: &str, rule: Rule, target: &Object) -> Result<(), LoadError> {
    let ok = match rule {
        Rule::Eadm => matches!(target, Object::Functional(_)) || is_credal(target),
        Rule::Maximality => {
            matches!(target, Object::Cone(_)) || is_credal(target) || is_binary(target)
        }
        Rule::Reject => matches!(target, Object::K(_)),
    };
    if ok {
        Ok(())
    } else {
        Err(LoadError::Schema(format!(
            "{ctx}: rule {} does not apply to a {}",
            rule.as_str(),
            target.kind()
        )))
    }
}

fn is_credal(o: &Object) -> bool {
    matches!(o, Object::K(k) if matches!(k.repr(), choice_core::choice::KRepr::Credal(_)))
}

fn is_binary(o: &Object) -> bool {
    matches!(o, Object::K(k) if matches!(k.repr(), choice_core::choice::KRepr::Binary(_)))
}
