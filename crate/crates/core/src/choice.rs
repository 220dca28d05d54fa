//! Sets of desirable option sets, rejection and choice.
//!
//! A set `B` of options is desirable when at least one of its options is.
//! Three finite models are supported:
//!
//! * [`KRepr::Assessment`]: the smallest coherent model containing a finite
//!   list of option sets. Membership goes through selections, which pick one
//!   option from every assessed set. `B` belongs to the closure iff every
//!   selection either generates an inconsistent natural extension or has an
//!   extension that meets `B`.
//! * [`KRepr::Credal`]: `B` is desirable iff every functional of a finite
//!   credal set is positive somewhere on `B`.
//! * [`KRepr::Binary`]: `B` is desirable iff it meets a desirable cone.
//!
//! Options equal to zero never help and are pruned before any test.

use std::sync::{Arc, OnceLock};

use crate::archimedean::{archimedean_consistent, separate, verify_separation};
use crate::cone::{natural_extension, posi_member, DesirCone, OptionSpace};
use crate::error::{check_dim, Error, Result};
use crate::exec::Exec;
use crate::functional::{LinearF, SuperlinF};
use crate::numeric::Vector;

/// Default upper bound on the number of selections an assessment may
/// generate before membership refuses to run.
pub const DEFAULT_SELECTION_CAP: u128 = 1_000_000;

/// A finite, nonempty, duplicate-free set of options, stored sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OptionSet(Vec<Vector>);

impl OptionSet {
    pub fn new(mut options: Vec<Vector>) -> Result<Self> {
        let Some(first) = options.first() else {
            return Err(Error::InvalidInput(
                "an option set must not be empty".into(),
            ));
        };
        let d = first.dim();
        for o in &options {
            check_dim(d, o.dim())?;
        }
        options.sort();
        options.dedup();
        Ok(OptionSet(options))
    }

    pub fn from_ints(options: &[&[i64]]) -> Result<Self> {
        OptionSet::new(options.iter().map(|o| Vector::from_ints(o)).collect())
    }

    pub fn options(&self) -> &[Vector] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.0[0].dim()
    }

    pub fn contains(&self, u: &Vector) -> bool {
        self.0.binary_search(u).is_ok()
    }

    /// `A ⊖ u = {v - u : v in A, v != u}`, possibly empty.
    pub fn minus(&self, u: &Vector) -> Result<Vec<Vector>> {
        self.0
            .iter()
            .filter(|v| *v != u)
            .map(|v| v.sub(u))
            .collect()
    }
}

/// Sorted, deduplicated options with zero removed.
fn prune(options: &[Vector]) -> Vec<Vector> {
    let mut out: Vec<Vector> = options.iter().filter(|u| !u.is_zero()).cloned().collect();
    out.sort();
    out.dedup();
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KRepr {
    Assessment(Vec<OptionSet>),
    Credal(Vec<LinearF>),
    Binary(DesirCone),
}

/// One selection from an assessment, with its natural extension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selection {
    pub options: Vec<Vector>,
    pub cone: DesirCone,
    pub consistent: bool,
    /// A background-positive functional positive on every selected option.
    pub separator: Option<LinearF>,
}

#[derive(Clone, Debug)]
pub struct KModel {
    space: OptionSpace,
    repr: KRepr,
    cap: u128,
    exec: Exec,
    selections: OnceLock<Result<Arc<Vec<Selection>>>>,
}

impl PartialEq for KModel {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.repr == other.repr
    }
}

/// A min-envelope certifying that an option set lies outside the
/// Archimedean closure of a model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvelopeWitness {
    /// The selection the envelope was built from (assessments only).
    pub selection: Option<Vec<Vector>>,
    /// `envelope.pieces()[k]` is `<= 0` at `separated[k]`.
    pub separated: Vec<Vector>,
    pub envelope: SuperlinF,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArchMember {
    pub member: bool,
    pub witness: Option<EnvelopeWitness>,
}

impl KModel {
    fn with_repr(space: OptionSpace, repr: KRepr) -> Self {
        KModel {
            space,
            repr,
            cap: DEFAULT_SELECTION_CAP,
            exec: Exec::default(),
            selections: OnceLock::new(),
        }
    }

    pub fn assessment(space: OptionSpace, sets: Vec<OptionSet>) -> Result<Self> {
        for s in &sets {
            check_dim(space.dim(), s.dim())?;
        }
        Ok(KModel::with_repr(space, KRepr::Assessment(sets)))
    }

    /// Functionals are normalised at the reference option on ingestion.
    pub fn credal(space: OptionSpace, functionals: Vec<LinearF>) -> Result<Self> {
        if functionals.is_empty() {
            return Err(Error::InvalidInput(
                "a credal set needs at least one functional".into(),
            ));
        }
        let mut normalised = Vec::with_capacity(functionals.len());
        for l in &functionals {
            check_dim(space.dim(), l.dim())?;
            if !l.is_positive(&space) {
                return Err(Error::InvalidInput(format!(
                    "credal functional {} is not positive on the background",
                    l.coeffs()
                )));
            }
            let n = l.nml(space.reference())?;
            if !normalised.contains(&n) {
                normalised.push(n);
            }
        }
        Ok(KModel::with_repr(space, KRepr::Credal(normalised)))
    }

    pub fn binary(cone: DesirCone) -> Self {
        let space = cone.space().clone();
        KModel::with_repr(space, KRepr::Binary(cone))
    }

    pub fn with_selection_cap(mut self, cap: u128) -> Self {
        self.cap = cap;
        self.selections = OnceLock::new();
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn space(&self) -> &OptionSpace {
        &self.space
    }

    pub fn repr(&self) -> &KRepr {
        &self.repr
    }

    fn check_options(&self, options: &[Vector]) -> Result<()> {
        for u in options {
            self.space.check(u)?;
        }
        Ok(())
    }

    /// Number of raw selections, before duplicates are merged.
    pub fn selection_count(&self) -> Option<u128> {
        let KRepr::Assessment(sets) = &self.repr else {
            return None;
        };
        let mut n: u128 = 1;
        for s in sets {
            let k = prune(s.options()).len() as u128;
            n = n.saturating_mul(k);
        }
        Some(n)
    }

    /// Distinct selections with their natural extensions, computed once.
    pub fn selections(&self) -> Result<Arc<Vec<Selection>>> {
        self.selections
            .get_or_init(|| self.compute_selections())
            .clone()
    }

    fn compute_selections(&self) -> Result<Arc<Vec<Selection>>> {
        let KRepr::Assessment(sets) = &self.repr else {
            return Err(Error::Unsupported(
                "selections exist only for assessments".into(),
            ));
        };
        let count = self.selection_count().expect("assessment");
        if count > self.cap {
            return Err(Error::SelectionLimit {
                count,
                cap: self.cap,
            });
        }
        let pruned: Vec<Vec<Vector>> = sets.iter().map(|s| prune(s.options())).collect();
        let mut picks: Vec<Vec<Vector>> = (0..count as usize)
            .map(|mut idx| {
                let mut sel = Vec::with_capacity(pruned.len());
                for set in &pruned {
                    sel.push(set[idx % set.len()].clone());
                    idx /= set.len();
                }
                sel.sort();
                sel.dedup();
                sel
            })
            .collect();
        picks.sort();
        picks.dedup();
        let space = &self.space;
        let built: Vec<Result<Selection>> = self.exec.map(&picks, |options| {
            let (cone, report) = natural_extension(options.clone(), space)?;
            let separator = if report.consistent {
                archimedean_consistent(&cone)?.functional()
            } else {
                None
            };
            Ok(Selection {
                options: options.clone(),
                cone,
                consistent: report.consistent,
                separator,
            })
        });
        Ok(Arc::new(built.into_iter().collect::<Result<Vec<_>>>()?))
    }

    /// Is `B` in the model?
    pub fn member(&self, options: &[Vector]) -> Result<bool> {
        self.check_options(options)?;
        let b = prune(options);
        if b.is_empty() {
            return Ok(false);
        }
        match &self.repr {
            KRepr::Binary(d) => {
                for u in &b {
                    if d.member(u)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            KRepr::Credal(ls) => {
                for l in ls {
                    let mut hit = false;
                    for u in &b {
                        if l.eval(u)?.is_positive() {
                            hit = true;
                            break;
                        }
                    }
                    if !hit {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            KRepr::Assessment(_) => {
                let sels = self.selections()?;
                self.exec.try_all_range(sels.len(), |i| {
                    let s = &sels[i];
                    if !s.consistent {
                        return Ok(true);
                    }
                    for u in &b {
                        if s.cone.member(u)? {
                            return Ok(true);
                        }
                    }
                    Ok(false)
                })
            }
        }
    }

    pub fn member_batch(&self, sets: &[Vec<Vector>], exec: Exec) -> Result<Vec<bool>> {
        exec.map(sets, |b| self.member(b)).into_iter().collect()
    }

    /// Does the model avoid containing every option set?
    pub fn consistent(&self) -> Result<bool> {
        match &self.repr {
            KRepr::Binary(d) => d.is_consistent(),
            KRepr::Credal(_) => Ok(true),
            KRepr::Assessment(_) => Ok(self.selections()?.iter().any(|s| s.consistent)),
        }
    }

    /// A background-positive linear functional whose binary model contains
    /// this model, if one exists.
    pub fn archimedean_consistent(&self) -> Result<Option<LinearF>> {
        match &self.repr {
            KRepr::Binary(d) => Ok(archimedean_consistent(d)?.functional()),
            KRepr::Credal(ls) => Ok(Some(ls[0].clone())),
            KRepr::Assessment(_) => Ok(self.selections()?.iter().find_map(|s| s.separator.clone())),
        }
    }

    /// Membership in the Archimedean closure, with a verified envelope
    /// whenever the answer is negative.
    pub fn archimedean_member(&self, options: &[Vector]) -> Result<ArchMember> {
        self.check_options(options)?;
        let Some(fallback) = self.archimedean_consistent()? else {
            return Err(Error::Precondition(
                "the model is not Archimedean-consistent".into(),
            ));
        };
        let b = prune(options);
        let single = |l: LinearF| SuperlinF::new(vec![l]).expect("one piece");
        let answer = match &self.repr {
            KRepr::Credal(ls) => {
                let mut found = None;
                for l in ls {
                    let mut all_nonpos = true;
                    for u in &b {
                        if l.eval(u)?.is_positive() {
                            all_nonpos = false;
                            break;
                        }
                    }
                    if all_nonpos {
                        found = Some(l.clone());
                        break;
                    }
                }
                match found {
                    Some(l) => ArchMember {
                        member: false,
                        witness: Some(EnvelopeWitness {
                            selection: None,
                            separated: b.clone(),
                            envelope: single(l),
                        }),
                    },
                    None => ArchMember {
                        member: true,
                        witness: None,
                    },
                }
            }
            KRepr::Binary(d) => {
                let mut pieces = Vec::with_capacity(b.len());
                let mut member = false;
                for v in &b {
                    if d.member(v)? {
                        member = true;
                        break;
                    }
                    match separate(d, v)? {
                        Some(l) => pieces.push(l),
                        None => {
                            member = true;
                            break;
                        }
                    }
                }
                if member {
                    ArchMember {
                        member: true,
                        witness: None,
                    }
                } else {
                    if pieces.is_empty() {
                        pieces.push(fallback);
                    }
                    ArchMember {
                        member: false,
                        witness: Some(EnvelopeWitness {
                            selection: None,
                            separated: b.clone(),
                            envelope: SuperlinF::new(pieces)?,
                        }),
                    }
                }
            }
            KRepr::Assessment(_) => {
                let sels = self.selections()?;
                let space = &self.space;
                let found = self.exec.try_find_first(sels.len(), |i| {
                    let s = &sels[i];
                    let Some(sep) = &s.separator else {
                        return Ok(None);
                    };
                    let mut pieces = Vec::with_capacity(b.len());
                    for v in &b {
                        let sys = space.positive_separator(&s.options, std::slice::from_ref(v))?;
                        match sys.witness() {
                            Some(l) => pieces.push(LinearF::new(l.clone())),
                            None => return Ok(None),
                        }
                    }
                    if pieces.is_empty() {
                        pieces.push(sep.clone());
                    }
                    Ok(Some(pieces))
                })?;
                match found {
                    None => ArchMember {
                        member: true,
                        witness: None,
                    },
                    Some((i, pieces)) => ArchMember {
                        member: false,
                        witness: Some(EnvelopeWitness {
                            selection: Some(sels[i].options.clone()),
                            separated: b.clone(),
                            envelope: SuperlinF::new(pieces)?,
                        }),
                    },
                }
            }
        };
        if let Some(w) = &answer.witness {
            debug_assert!(self.verify_envelope(options, w)?, "envelope witness");
        }
        Ok(answer)
    }

    /// Checks that the envelope is background-positive, nonpositive on `B`,
    /// and that its binary model contains this model.
    pub fn verify_envelope(&self, options: &[Vector], w: &EnvelopeWitness) -> Result<bool> {
        let env = &w.envelope;
        if env.dim() != self.space.dim() || !env.is_positive(&self.space) {
            return Ok(false);
        }
        for v in prune(options) {
            if env.eval(&v)?.is_positive() {
                return Ok(false);
            }
        }
        Ok(match &self.repr {
            KRepr::Assessment(sets) => {
                let mut ok = true;
                for s in sets {
                    let mut hit = false;
                    for u in s.options() {
                        if env.eval(u)?.is_positive() {
                            hit = true;
                            break;
                        }
                    }
                    ok &= hit;
                }
                ok
            }
            KRepr::Credal(ls) => env.pieces().iter().all(|p| ls.contains(p)),
            KRepr::Binary(d) => {
                if w.separated.len() != env.pieces().len()
                    && !(w.separated.is_empty() && env.pieces().len() == 1)
                {
                    return Ok(false);
                }
                if w.separated.is_empty() {
                    return Ok(true);
                }
                let mut ok = true;
                for (v, l) in w.separated.iter().zip(env.pieces()) {
                    ok &= verify_separation(d, v, l)?;
                }
                ok
            }
        })
    }

    /// Mixing check on one pair `B ⊆ B2 ⊆ posi(B)`: returns false when `B2`
    /// is in the model but `B` is not.
    pub fn km_check(&self, b: &[Vector], b2: &[Vector]) -> Result<bool> {
        self.check_options(b)?;
        self.check_options(b2)?;
        for u in b {
            if !b2.contains(u) {
                return Err(Error::Precondition("B must be a subset of B2".into()));
            }
        }
        for w in b2.iter().filter(|w| !b.contains(w)) {
            if posi_member(b, w)?.is_none() {
                return Err(Error::Precondition(format!(
                    "{w} is not a positive combination of B"
                )));
            }
        }
        Ok(!(self.member(b2)? && !self.member(b)?))
    }

    /// Is the model determined by its singletons?
    pub fn is_binary(&self) -> Result<bool> {
        match &self.repr {
            KRepr::Binary(_) => Ok(true),
            KRepr::Credal(ls) => Ok(ls.len() == 1),
            KRepr::Assessment(sets) => {
                for s in sets {
                    let mut hit = false;
                    for u in s.options() {
                        if self.member(std::slice::from_ref(u))? {
                            hit = true;
                            break;
                        }
                    }
                    if !hit {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// The options whose singletons are desirable.
    pub fn to_binary_d(&self) -> BinaryView<'_> {
        BinaryView { k: self }
    }

    /// Options rejected from `A`: those `u` with `A ⊖ u` in the model.
    pub fn reject(&self, a: &OptionSet) -> Result<Vec<Vector>> {
        self.check_options(a.options())?;
        let flags: Vec<Result<bool>> = self.exec.map(a.options(), |u| self.member(&a.minus(u)?));
        let mut out = Vec::new();
        for (u, f) in a.options().iter().zip(flags) {
            if f? {
                out.push(u.clone());
            }
        }
        Ok(out)
    }

    pub fn choose(&self, a: &OptionSet) -> Result<Vec<Vector>> {
        let rejected = self.reject(a)?;
        Ok(a.options()
            .iter()
            .filter(|u| !rejected.contains(u))
            .cloned()
            .collect())
    }

    pub fn is_coherent(&self) -> Result<bool> {
        match &self.repr {
            KRepr::Binary(d) => d.is_coherent(),
            KRepr::Credal(_) => Ok(true),
            KRepr::Assessment(_) => self.consistent(),
        }
    }

    /// Archimedean flag where it is decidable from the representation.
    pub fn is_archimedean(&self) -> Result<Option<bool>> {
        match &self.repr {
            KRepr::Binary(d) => crate::archimedean::is_archimedean(d).map(Some),
            KRepr::Credal(_) => Ok(Some(true)),
            KRepr::Assessment(_) => Ok(None),
        }
    }

    /// Mixing flag where it is decidable from the representation.
    pub fn is_mixing(&self) -> Result<Option<bool>> {
        match &self.repr {
            KRepr::Binary(d) => {
                if !d.is_coherent()? {
                    return Ok(None);
                }
                Ok(d.is_mixing()?.holds())
            }
            KRepr::Credal(_) => Ok(Some(true)),
            KRepr::Assessment(_) => Ok(None),
        }
    }
}

/// The cone `{u : {u} in K}` of a model, answered through the model.
#[derive(Clone, Copy, Debug)]
pub struct BinaryView<'a> {
    k: &'a KModel,
}

impl BinaryView<'_> {
    pub fn member(&self, u: &Vector) -> Result<bool> {
        self.k.member(std::slice::from_ref(u))
    }
}

/// Options that maximise expected value for at least one functional.
pub fn e_admissible(functionals: &[LinearF], a: &OptionSet) -> Result<Vec<Vector>> {
    let mut out = Vec::new();
    for u in a.options() {
        let mut admissible = false;
        for l in functionals {
            let lu = l.eval(u)?;
            let mut best = true;
            for v in a.options() {
                if l.eval(v)? > lu {
                    best = false;
                    break;
                }
            }
            if best {
                admissible = true;
                break;
            }
        }
        if admissible {
            out.push(u.clone());
        }
    }
    Ok(out)
}

/// Options not strictly dominated within `A`: no `v` with `v - u` in `D`.
pub fn maximal(d: &DesirCone, a: &OptionSet) -> Result<Vec<Vector>> {
    let mut out = Vec::new();
    for u in a.options() {
        let mut dominated = false;
        for v in a.options() {
            if v != u && d.member(&v.sub(u)?)? {
                dominated = true;
                break;
            }
        }
        if !dominated {
            out.push(u.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::Background;

    fn v(xs: &[i64]) -> Vector {
        Vector::from_ints(xs)
    }

    fn pw() -> OptionSpace {
        OptionSpace::with_unit_reference(2, Background::Pointwise).unwrap()
    }

    fn lin(a: &str, b: &str) -> LinearF {
        LinearF::new(Vector::parse(&[a, b]).unwrap())
    }

    #[test]
    fn inconsistent_assessment() {
        let k =
            KModel::assessment(pw(), vec![OptionSet::from_ints(&[&[-1, -1]]).unwrap()]).unwrap();
        assert!(!k.consistent().unwrap());
        assert!(k.archimedean_consistent().unwrap().is_none());
    }

    #[test]
    fn opposite_pair_not_archimedean_consistent() {
        let k = KModel::assessment(
            pw(),
            vec![
                OptionSet::from_ints(&[&[1, -1]]).unwrap(),
                OptionSet::from_ints(&[&[-1, 1]]).unwrap(),
            ],
        )
        .unwrap();
        assert!(k.archimedean_consistent().unwrap().is_none());
        assert!(matches!(
            k.archimedean_member(&[v(&[1, 1])]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn archimedean_member_witness() {
        let k = KModel::assessment(pw(), vec![OptionSet::from_ints(&[&[1, -1]]).unwrap()]).unwrap();
        let b = [v(&[-2, 2])];
        let r = k.archimedean_member(&b).unwrap();
        assert!(!r.member);
        let w = r.witness.unwrap();
        assert!(k.verify_envelope(&b, &w).unwrap());
        let two_one = EnvelopeWitness {
            selection: None,
            separated: b.to_vec(),
            envelope: SuperlinF::from_ints(&[&[2, 1]]).unwrap(),
        };
        assert!(k.verify_envelope(&b, &two_one).unwrap());
        assert!(k.archimedean_member(&[v(&[1, 0])]).unwrap().member);
    }

    #[test]
    fn binary_over_half() {
        let d = DesirCone::open_dual(pw(), vec![lin("1/2", "1/2")]).unwrap();
        let k = KModel::binary(d);
        assert!(!k.member(&[v(&[1, -1]), v(&[-1, 1])]).unwrap());
        assert!(k.member(&[v(&[1, -1]), v(&[1, 1])]).unwrap());
        assert!(!k.member(&[v(&[0, 0])]).unwrap());
    }

    #[test]
    fn credal_rejection_and_e_admissibility() {
        let ls = vec![lin("1/3", "2/3"), lin("2/3", "1/3")];
        let k = KModel::credal(pw(), ls.clone()).unwrap();
        let a = OptionSet::new(vec![
            v(&[1, 0]),
            v(&[0, 1]),
            Vector::parse(&["1/2", "1/2"]).unwrap(),
        ])
        .unwrap();
        assert_eq!(
            k.reject(&a).unwrap(),
            vec![Vector::parse(&["1/2", "1/2"]).unwrap()]
        );
        assert_eq!(k.choose(&a).unwrap(), vec![v(&[0, 1]), v(&[1, 0])]);
        assert_eq!(e_admissible(&ls, &a).unwrap(), vec![v(&[0, 1]), v(&[1, 0])]);
        let d = DesirCone::open_dual(pw(), ls).unwrap();
        assert_eq!(maximal(&d, &a).unwrap().len(), 3);
        assert!(!k.is_binary().unwrap());
    }

    #[test]
    fn km_check_preconditions() {
        let k = KModel::binary(DesirCone::vacuous(pw()));
        let b = [v(&[1, -1]), v(&[-1, 2])];
        let b2 = [v(&[1, -1]), v(&[-1, 2]), v(&[0, 1])];
        assert!(!k.km_check(&b, &b2).unwrap());
        assert!(k.km_check(&b, &[v(&[1, -1])]).is_err());
        assert!(k
            .km_check(&b, &[v(&[1, -1]), v(&[-1, 2]), v(&[-1, 0])])
            .is_err());
        let credal = KModel::credal(pw(), vec![lin("1", "1")]).unwrap();
        assert!(credal.km_check(&b, &b2).unwrap());
    }

    #[test]
    fn selection_cap() {
        let set = OptionSet::from_ints(&[&[1, 0], &[0, 1], &[1, 1]]).unwrap();
        let k = KModel::assessment(pw(), vec![set; 4])
            .unwrap()
            .with_selection_cap(80);
        assert_eq!(k.selection_count(), Some(81));
        assert_eq!(
            k.member(&[v(&[1, 0])]),
            Err(Error::SelectionLimit { count: 81, cap: 80 })
        );
        let ok = k.clone().with_selection_cap(81);
        assert!(ok.member(&[v(&[1, 1])]).unwrap());
    }

    #[test]
    fn minus_and_pruning() {
        let a = OptionSet::from_ints(&[&[1, 0], &[0, 1]]).unwrap();
        assert_eq!(a.minus(&v(&[1, 0])).unwrap(), vec![v(&[-1, 1])]);
        let single = OptionSet::from_ints(&[&[1, 0]]).unwrap();
        assert!(single.minus(&v(&[1, 0])).unwrap().is_empty());
        let k = KModel::binary(DesirCone::vacuous(pw()));
        assert!(!k.member(&[]).unwrap());
        assert_eq!(k.reject(&single).unwrap(), Vec::<Vector>::new());
    }
}
