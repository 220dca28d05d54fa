//! Query execution. Every witness is checked again against the object it
//! came from before it is put into a record.

use choice_core::archimedean::{
    archimedean_closure_member, archimedean_consistent, is_archimedean, is_essentially_archimedean,
    lambda_o, separate, verify_separation,
};
use choice_core::choice::{e_admissible, maximal, KModel, KRepr, OptionSet};
use choice_core::cone::{
    natural_extension, posi_member, strict_residual, ConeRepr, ConsistencyWitness, Mixing,
};
use choice_core::{
    Background, DesirCone, Error as CoreError, Functional, LinearF, Rational, Vector,
};
use serde_json::{json, Value};

use crate::model::{Model, Object, Query, QueryKind, Rule};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Answered,
    /// The query could not be answered because a precondition of the
    /// operation failed (an inconsistent or non-Archimedean target, or an
    /// unsupported case).
    Precondition,
}

#[derive(Clone, Debug)]
pub struct Record {
    pub name: String,
    pub kind: String,
    pub target: String,
    pub answer: Value,
    pub witness: Option<Value>,
    pub status: Status,
}

impl Record {
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "name": self.name,
            "kind": self.kind,
            "target": self.target,
            "answer": self.answer,
        });
        if let Some(w) = &self.witness {
            v["witness"] = w.clone();
        }
        if self.status == Status::Precondition {
            v["status"] = json!("precondition");
        }
        v
    }
}

/// Failures that abort the whole run.
#[derive(Debug)]
pub enum RunError {
    /// A witness failed its own re-check.
    Unverified(String),
    Dimension(String),
    Invalid(String),
}

type Outcome = Result<(Value, Option<Value>), CoreError>;

pub fn q(x: &Rational) -> Value {
    Value::String(x.to_string())
}

pub fn vj(v: &Vector) -> Value {
    Value::Array(v.iter().map(q).collect())
}

fn vs(vs: &[Vector]) -> Value {
    Value::Array(vs.iter().map(vj).collect())
}

fn qs(xs: &[Rational]) -> Value {
    Value::Array(xs.iter().map(q).collect())
}

fn functional_json(f: &Functional) -> Value {
    match f {
        Functional::Linear(l) => json!({"kind": "linear", "coeffs": vj(l.coeffs())}),
        Functional::Superlinear(s) => json!({
            "kind": "superlinear",
            "pieces": Value::Array(s.pieces().iter().map(|p| vj(p.coeffs())).collect()),
        }),
    }
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), RunError> {
    if ok {
        Ok(())
    } else {
        Err(RunError::Unverified(what()))
    }
}

fn lift(e: CoreError) -> RunError {
    match e {
        CoreError::DimensionMismatch { .. } => RunError::Dimension(e.to_string()),
        _ => RunError::Invalid(e.to_string()),
    }
}

/// Splits a core error into a recorded precondition answer or a fatal
/// error.
fn settle(
    name: &str,
    kind: &str,
    target: &str,
    outcome: Result<Outcome, RunError>,
) -> Result<Record, RunError> {
    let mut rec = Record {
        name: name.to_string(),
        kind: kind.to_string(),
        target: target.to_string(),
        answer: Value::Null,
        witness: None,
        status: Status::Answered,
    };
    match outcome? {
        Ok((answer, witness)) => {
            rec.answer = answer;
            rec.witness = witness;
        }
        Err(
            e @ (CoreError::Precondition(_)
            | CoreError::Unsupported(_)
            | CoreError::SelectionLimit { .. }),
        ) => {
            rec.answer = json!({"error": e.to_string()});
            rec.status = Status::Precondition;
        }
        Err(e) => return Err(lift(e)),
    }
    Ok(rec)
}

pub fn run_query(
    model: &Model,
    query: &Query,
    rule_override: Option<Rule>,
) -> Result<Record, RunError> {
    let target = model
        .get(&query.target)
        .ok_or_else(|| RunError::Invalid(format!("unknown target {:?}", query.target)))?;
    let p = &query.payload;
    let kind = query.kind.as_str();
    let outcome = match (query.kind, target) {
        (QueryKind::Member, Object::Cone(d)) => cone_member(d, &p.options[0]),
        (QueryKind::Member, Object::K(k)) => Ok(k.member(&p.options).map(|b| (json!(b), None))),
        (QueryKind::ClosureMember, Object::Cone(d)) => cone_closure_member(d, &p.options[0]),
        (QueryKind::ClosureMember, Object::K(k)) => k_closure_member(k, &p.options),
        (QueryKind::ArchConsistent, Object::Cone(d)) => cone_arch_consistent(d),
        (QueryKind::ArchConsistent, Object::K(k)) => k_arch_consistent(k),
        (QueryKind::Separate, Object::Cone(d)) => cone_separate(d, &p.options[0]),
        (QueryKind::LambdaO, Object::Cone(d)) => {
            Ok(lambda_o(d, &p.options[0]).map(|x| (q(&x), None)))
        }
        (QueryKind::Nml, Object::Functional(f)) => {
            let r = p.reference.as_ref().unwrap_or(model.space.reference());
            Ok(f.nml(r).map(|g| (functional_json(&g), None)))
        }
        (QueryKind::Choose, obj) => {
            let menu = p.menu.as_ref().expect("validated menu");
            let rule = rule_override.or(p.rule).unwrap_or(Rule::Reject);
            if let Err(e) = crate::model::rule_applies(&query.name, rule, obj) {
                return Err(RunError::Invalid(e.to_string()));
            }
            Ok(choose(obj, rule, menu))
        }
        _ => {
            return Err(RunError::Invalid(format!(
                "{kind} does not apply to a {}",
                target.kind()
            )))
        }
    };
    settle(&query.name, kind, &query.target, outcome)
}

fn cone_member(d: &DesirCone, u: &Vector) -> Result<Outcome, RunError> {
    let member = match d.member(u) {
        Ok(b) => b,
        Err(e) => return Ok(Err(e)),
    };
    let witness = match d.repr() {
        ConeRepr::OpenDual { pieces } => {
            let vals: Vec<Rational> = pieces
                .iter()
                .map(|p| p.eval(u))
                .collect::<Result<_, _>>()
                .map_err(lift)?;
            ensure(vals.iter().all(|x| x.is_positive()) == member, || {
                "piece values disagree with membership".into()
            })?;
            Some(json!({"piece_values": qs(&vals)}))
        }
        ConeRepr::Lex { levels } => {
            let vals = choice_core::cone::lex_values(levels, u).map_err(lift)?;
            ensure(
                (vals.lex_sign() == std::cmp::Ordering::Greater) == member,
                || "level values disagree with membership".into(),
            )?;
            Some(json!({"level_values": vj(&vals)}))
        }
        ConeRepr::Posi { generators } if member => Some(posi_witness(d, generators, u)?),
        ConeRepr::Posi { .. } => None,
    };
    Ok(Ok((json!(member), witness)))
}

/// Weights expressing a posi member: an exact combination of the
/// generators and background units, or under strict dominance a
/// combination of generators leaving a strictly positive residual.
fn posi_witness(d: &DesirCone, generators: &[Vector], u: &Vector) -> Result<Value, RunError> {
    let dim = d.dim();
    let exact = match d.space().background() {
        Background::Pointwise => d.closed_generators().expect("posi cone"),
        Background::Strict => generators.to_vec(),
    };
    if let Some(w) = posi_member(&exact, u).map_err(lift)? {
        let sum = Vector::combination(dim, &w, &exact).map_err(lift)?;
        ensure(sum == *u && w.iter().all(|x| !x.is_negative()), || {
            "posi weights do not reproduce the option".into()
        })?;
        let label = if exact.len() > generators.len() {
            "weights_with_units"
        } else {
            "weights"
        };
        return Ok(json!({ label: qs(&w) }));
    }
    let w = strict_residual(generators, u)
        .map_err(lift)?
        .ok_or_else(|| RunError::Unverified("member without a posi witness".into()))?;
    let residual = u
        .sub(&Vector::combination(dim, &w, generators).map_err(lift)?)
        .map_err(lift)?;
    ensure(
        residual.all_positive() && w.iter().all(|x| !x.is_negative()),
        || "strict residual is not positive".into(),
    )?;
    Ok(json!({"weights": qs(&w), "residual": vj(&residual)}))
}

fn cone_closure_member(d: &DesirCone, u: &Vector) -> Result<Outcome, RunError> {
    let member = match archimedean_closure_member(d, u) {
        Ok(b) => b,
        Err(e) => return Ok(Err(e)),
    };
    if member {
        return Ok(Ok((json!(true), None)));
    }
    let l = separate(d, u)
        .map_err(lift)?
        .ok_or_else(|| RunError::Unverified("non-member without a separator".into()))?;
    ensure(verify_separation(d, u, &l).map_err(lift)?, || {
        "separating functional failed its check".into()
    })?;
    Ok(Ok((
        json!(false),
        Some(json!({"separator": vj(l.coeffs())})),
    )))
}

fn cone_separate(d: &DesirCone, u: &Vector) -> Result<Outcome, RunError> {
    match separate(d, u) {
        Err(CoreError::InsideCone) => Ok(Ok((json!("inside"), None))),
        Err(e) => Ok(Err(e)),
        Ok(None) => Ok(Ok((json!("none"), None))),
        Ok(Some(l)) => {
            ensure(verify_separation(d, u, &l).map_err(lift)?, || {
                "separating functional failed its check".into()
            })?;
            Ok(Ok((
                json!("separated"),
                Some(json!({"separator": vj(l.coeffs())})),
            )))
        }
    }
}

fn cone_arch_consistent(d: &DesirCone) -> Result<Outcome, RunError> {
    let ac = match archimedean_consistent(d) {
        Ok(ac) => ac,
        Err(e) => return Ok(Err(e)),
    };
    ensure(ac.verify(), || {
        "Archimedean consistency evidence failed its check".into()
    })?;
    let witness = match (ac.functional(), ac.result.certificate()) {
        (Some(l), _) => json!({"functional": vj(l.coeffs())}),
        (None, Some(c)) => json!({"certificate": {
            "strict": qs(&c.strict),
            "nonpos": qs(&c.nonpos),
            "nonneg": qs(&c.nonneg),
        }}),
        (None, None) => Value::Null,
    };
    Ok(Ok((json!(ac.consistent()), Some(witness))))
}

fn k_arch_consistent(k: &KModel) -> Result<Outcome, RunError> {
    let l = match k.archimedean_consistent() {
        Ok(l) => l,
        Err(e) => return Ok(Err(e)),
    };
    let Some(l) = l else {
        return Ok(Ok((json!(false), None)));
    };
    ensure(verify_k_functional(k, &l).map_err(lift)?, || {
        "functional does not support the model".into()
    })?;
    Ok(Ok((
        json!(true),
        Some(json!({"functional": vj(l.coeffs())})),
    )))
}

/// The functional must be background-positive and, for every assessed set,
/// positive on at least one of its options.
fn verify_k_functional(k: &KModel, l: &LinearF) -> Result<bool, CoreError> {
    if !l.is_positive(k.space()) {
        return Ok(false);
    }
    match k.repr() {
        KRepr::Assessment(sets) => {
            for s in sets {
                let mut any = false;
                for u in s.options() {
                    any |= l.eval(u)?.is_positive();
                }
                if !any {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        KRepr::Credal(_) => Ok(true),
        KRepr::Binary(d) => match d.repr() {
            ConeRepr::Posi { generators } => {
                for g in generators {
                    if !l.eval(g)?.is_positive() {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => Ok(true),
        },
    }
}

fn k_closure_member(k: &KModel, b: &[Vector]) -> Result<Outcome, RunError> {
    let ans = match k.archimedean_member(b) {
        Ok(a) => a,
        Err(e) => return Ok(Err(e)),
    };
    let Some(w) = &ans.witness else {
        ensure(ans.member, || "non-member without an envelope".into())?;
        return Ok(Ok((json!(true), None)));
    };
    ensure(
        !ans.member && k.verify_envelope(b, w).map_err(lift)?,
        || "envelope failed its check".into(),
    )?;
    let mut witness = json!({
        "separated": vs(&w.separated),
        "envelope": Value::Array(w.envelope.pieces().iter().map(|p| vj(p.coeffs())).collect()),
    });
    if let Some(sel) = &w.selection {
        witness["selection"] = vs(sel);
    }
    Ok(Ok((json!(false), Some(witness))))
}

fn choose(obj: &Object, rule: Rule, menu: &OptionSet) -> Outcome {
    let chosen = match (rule, obj) {
        (Rule::Eadm, Object::Functional(f)) => e_admissible(&f.pieces(), menu)?,
        (Rule::Eadm, Object::K(k)) => match k.repr() {
            KRepr::Credal(ls) => e_admissible(ls, menu)?,
            _ => unreachable!("validated rule"),
        },
        (Rule::Maximality, Object::Cone(d)) => maximal(d, menu)?,
        (Rule::Maximality, Object::K(k)) => match k.repr() {
            KRepr::Binary(d) => maximal(d, menu)?,
            KRepr::Credal(ls) => {
                maximal(&DesirCone::open_dual(k.space().clone(), ls.clone())?, menu)?
            }
            KRepr::Assessment(_) => unreachable!("validated rule"),
        },
        (Rule::Reject, Object::K(k)) => k.choose(menu)?,
        _ => unreachable!("validated rule"),
    };
    let rejected: Vec<Vector> = menu
        .options()
        .iter()
        .filter(|u| !chosen.contains(u))
        .cloned()
        .collect();
    Ok((
        json!({"rule": rule.as_str(), "chosen": vs(&chosen), "rejected": vs(&rejected)}),
        None,
    ))
}

fn flag(r: Result<bool, CoreError>) -> Value {
    match r {
        Ok(b) => json!(b),
        Err(CoreError::Precondition(_)) => json!("n/a"),
        Err(CoreError::Unsupported(_)) => json!("unsupported"),
        Err(e) => json!({"error": e.to_string()}),
    }
}

/// The standing properties of one named object.
pub fn check_object(model: &Model, name: &str, obj: &Object) -> Result<Record, RunError> {
    let (answer, witness) = match obj {
        Object::Cone(d) => check_cone(d)?,
        Object::Functional(f) => {
            let representation = match f {
                Functional::Linear(_) => "linear",
                Functional::Superlinear(_) => "superlinear",
            };
            let answer = json!({
                "representation": representation,
                "positive": f.is_positive(&model.space),
                "operator_norm": q(&f.operator_norm()),
            });
            (answer, None)
        }
        Object::K(k) => check_k(k)?,
    };
    Ok(Record {
        name: format!("check:{name}"),
        kind: "check".into(),
        target: name.to_string(),
        answer,
        witness,
        status: Status::Answered,
    })
}

fn check_cone(d: &DesirCone) -> Result<(Value, Option<Value>), RunError> {
    let representation = match d.repr() {
        ConeRepr::Posi { .. } => "posi",
        ConeRepr::OpenDual { .. } => "open_dual",
        ConeRepr::Lex { .. } => "lex",
    };
    let consistent = d.is_consistent().map_err(lift)?;
    let coherent = d.is_coherent().map_err(lift)?;
    let mut witness = serde_json::Map::new();

    if let ConeRepr::Posi { generators } = d.repr() {
        let (_, report) = natural_extension(generators.clone(), d.space()).map_err(lift)?;
        ensure(report.consistent == consistent, || {
            "natural extension disagrees with membership of zero".into()
        })?;
        ensure(report.verify(generators, d.space()), || {
            "consistency witness failed its check".into()
        })?;
        match &report.witness {
            Some(ConsistencyWitness::Separating(l)) => {
                witness.insert("consistency".into(), json!({"separating": vj(l.coeffs())}));
            }
            Some(ConsistencyWitness::Combination {
                weights,
                background,
                ..
            }) => {
                witness.insert(
                    "consistency".into(),
                    json!({"weights": qs(weights), "background": vj(background)}),
                );
            }
            None => {}
        }
    }

    let mixing = match d.is_mixing() {
        Ok(Mixing::Mixing) => json!(true),
        Ok(Mixing::NotMixing { u, v }) => {
            let sum = u.add(&v).map_err(lift)?;
            ensure(
                !d.member(&u).map_err(lift)?
                    && !d.member(&v).map_err(lift)?
                    && d.member(&sum).map_err(lift)?,
                || "mixing counterexample failed its check".into(),
            )?;
            witness.insert("not_mixing".into(), json!({"u": vj(&u), "v": vj(&v)}));
            json!(false)
        }
        Ok(Mixing::Unknown) => json!("unknown"),
        Err(e) => flag(Err(e)),
    };

    let arch_consistent = match archimedean_consistent(d) {
        Ok(ac) => {
            ensure(ac.verify(), || {
                "Archimedean consistency evidence failed its check".into()
            })?;
            if let Some(l) = ac.functional() {
                witness.insert("archimedean_functional".into(), vj(l.coeffs()));
            }
            json!(ac.consistent())
        }
        Err(e) => flag(Err(e)),
    };

    let answer = json!({
        "representation": representation,
        "consistent": consistent,
        "coherent": coherent,
        "mixing": mixing,
        "archimedean_consistent": arch_consistent,
        "essentially_archimedean": flag(is_essentially_archimedean(d)),
        "archimedean": flag(is_archimedean(d)),
    });
    let witness = (!witness.is_empty()).then_some(Value::Object(witness));
    Ok((answer, witness))
}

fn check_k(k: &KModel) -> Result<(Value, Option<Value>), RunError> {
    let representation = match k.repr() {
        KRepr::Assessment(_) => "assessment",
        KRepr::Credal(_) => "credal",
        KRepr::Binary(_) => "binary",
    };
    let opt = |r: Result<Option<bool>, CoreError>| match r {
        Ok(Some(b)) => json!(b),
        Ok(None) => json!("unknown"),
        Err(e) => flag(Err(e)),
    };
    let mut witness = None;
    let arch = match k.archimedean_consistent() {
        Ok(Some(l)) => {
            ensure(verify_k_functional(k, &l).map_err(lift)?, || {
                "functional does not support the model".into()
            })?;
            witness = Some(json!({"archimedean_functional": vj(l.coeffs())}));
            json!(true)
        }
        Ok(None) => json!(false),
        Err(e) => flag(Err(e)),
    };
    let mut answer = json!({
        "representation": representation,
        "consistent": flag(k.consistent()),
        "coherent": flag(k.is_coherent()),
        "binary": flag(k.is_binary()),
        "archimedean_consistent": arch,
        "archimedean": opt(k.is_archimedean()),
        "mixing": opt(k.is_mixing()),
    });
    if let Some(n) = k.selection_count() {
        answer["selections"] = json!(n.to_string());
    }
    Ok((answer, witness))
}
