//! Sets of desirable options and their coherence properties.
//!
//! Three finite representations cover everything the engine needs:
//!
//! * [`ConeRepr::Posi`]: positive combinations of generators together with
//!   the background cone (a natural extension).
//! * [`ConeRepr::OpenDual`]: `{u : L_j(u) > 0 for all j}`, the positive set
//!   of a min-envelope.
//! * [`ConeRepr::Lex`]: `u` is desirable when the first nonzero entry of
//!   `(L_1(u), ..., L_m(u))` is positive.
//!
//! Under strict dominance a posi cone is
//! `posi(G) ∪ {g + o : g in posi(G) or g = 0, o > 0}`, which is decided by
//! a combination LP followed by a residual max-margin LP.

use std::cmp::Ordering;

use crate::error::{check_dim, Error, Result};
use crate::exec::Exec;
use crate::functional::{positively_proportional, LinearF};
use crate::lp::{
    max_margin, strict_homogeneous_feasible, Homogeneous, HomogeneousCertificate, LpProblem,
    LpResult, MarginRow, Relation,
};
use crate::numeric::{nullspace, rank, solve, Rational, Vector};

/// The background dominance order, which fixes the cone every coherent set
/// must contain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Background {
    /// `u > 0` iff `u >= 0` entrywise and `u != 0`.
    Pointwise,
    /// `u > 0` iff every entry is positive.
    Strict,
}

impl Background {
    pub fn contains(&self, u: &Vector) -> bool {
        match self {
            Background::Pointwise => u.all_nonneg() && !u.is_zero(),
            Background::Strict => u.dim() > 0 && u.all_positive(),
        }
    }

    /// Is `x -> coeffs . x` strictly positive on the background cone?
    pub fn is_positive_functional(&self, coeffs: &Vector) -> bool {
        match self {
            Background::Pointwise => coeffs.all_positive(),
            Background::Strict => coeffs.all_nonneg() && !coeffs.is_zero(),
        }
    }

    /// Rows whose strict and nonnegative constraints say "the unknown
    /// functional is strictly positive on the background".
    pub fn positivity_rows(&self, dim: usize) -> (Vec<Vector>, Vec<Vector>) {
        let units: Vec<Vector> = (0..dim).map(|i| Vector::unit(dim, i)).collect();
        match self {
            Background::Pointwise => (units, Vec::new()),
            Background::Strict => (vec![Vector::ones(dim)], units),
        }
    }
}

/// The option space `R^dim` with its background order and a reference
/// option `u_o` in the interior of the background cone.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OptionSpace {
    dim: usize,
    background: Background,
    reference: Vector,
}

impl OptionSpace {
    pub fn new(dim: usize, background: Background, reference: Vector) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput(
                "option space must have dimension at least 1".into(),
            ));
        }
        check_dim(dim, reference.dim())?;
        if !reference.all_positive() {
            return Err(Error::InvalidInput(format!(
                "u_o not interior: {reference}"
            )));
        }
        Ok(OptionSpace {
            dim,
            background,
            reference,
        })
    }

    pub fn with_unit_reference(dim: usize, background: Background) -> Result<Self> {
        OptionSpace::new(dim, background, Vector::ones(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn background(&self) -> Background {
        self.background
    }

    pub fn reference(&self) -> &Vector {
        &self.reference
    }

    pub fn check(&self, u: &Vector) -> Result<()> {
        check_dim(self.dim, u.dim())
    }

    /// Interior of the background cone: all entries positive. This is the
    /// same set for both orders.
    pub fn interior_member(&self, u: &Vector) -> Result<bool> {
        self.check(u)?;
        Ok(u.all_positive())
    }

    pub fn positivity_rows(&self) -> (Vec<Vector>, Vec<Vector>) {
        self.background.positivity_rows(self.dim)
    }

    /// A linear `L` strictly positive on the background and on each of
    /// `members`, if one exists.
    pub fn positive_separator(&self, members: &[Vector], nonpos: &[Vector]) -> Result<Homogeneous> {
        let (mut strict, nonneg) = self.positivity_rows();
        strict.extend(members.iter().cloned());
        strict_homogeneous_feasible(&strict, nonpos, &nonneg, self.dim)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ConeRepr {
    Posi { generators: Vec<Vector> },
    OpenDual { pieces: Vec<LinearF> },
    Lex { levels: Vec<LinearF> },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DesirCone {
    space: OptionSpace,
    repr: ConeRepr,
}

/// Answer of the mixing test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mixing {
    Mixing,
    /// `u` and `v` are both outside the cone while `u + v` is inside, so the
    /// complement is not closed under positive combinations.
    NotMixing {
        u: Vector,
        v: Vector,
    },
    Unknown,
}

impl Mixing {
    pub fn holds(&self) -> Option<bool> {
        match self {
            Mixing::Mixing => Some(true),
            Mixing::NotMixing { .. } => Some(false),
            Mixing::Unknown => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConsistencyWitness {
    /// A functional strictly positive on every assessed option and on the
    /// background, so 0 cannot be a positive combination.
    Separating(LinearF),
    /// `sum_k weights_k g_k + background = 0` with `background` in the
    /// closed background cone (or open, for strict dominance) and not every
    /// term zero.
    Combination {
        weights: Vec<Rational>,
        background: Vector,
        certificate: Option<HomogeneousCertificate>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub consistent: bool,
    pub witness: Option<ConsistencyWitness>,
}

impl ConsistencyReport {
    pub fn verify(&self, assessment: &[Vector], space: &OptionSpace) -> bool {
        match &self.witness {
            None => true,
            Some(ConsistencyWitness::Separating(l)) => {
                self.consistent
                    && l.is_positive(space)
                    && assessment
                        .iter()
                        .all(|g| l.eval(g).is_ok_and(|x| x.is_positive()))
            }
            Some(ConsistencyWitness::Combination {
                weights,
                background,
                ..
            }) => {
                let d = space.dim();
                let Ok(sum) = Vector::combination(d, weights, assessment) else {
                    return false;
                };
                let Ok(total) = sum.add(background) else {
                    return false;
                };
                let bg_ok = match space.background() {
                    Background::Pointwise => background.all_nonneg(),
                    Background::Strict => background.is_zero() || background.all_positive(),
                };
                let nontrivial = weights.iter().any(|w| !w.is_zero()) || !background.is_zero();
                !self.consistent
                    && total.is_zero()
                    && bg_ok
                    && nontrivial
                    && weights.iter().all(|w| !w.is_negative())
            }
        }
    }
}

/// Weights `lambda >= 0` with `sum lambda_k g_k = u`; for `u = 0` the
/// weights must sum to one, so the question is whether 0 is a positive
/// combination.
pub fn posi_member(generators: &[Vector], u: &Vector) -> Result<Option<Vec<Rational>>> {
    let d = u.dim();
    for g in generators {
        check_dim(d, g.dim())?;
    }
    if generators.is_empty() {
        return Ok(None);
    }
    let n = generators.len();
    let mut p = LpProblem::new(n);
    p.set_all_nonneg();
    for i in 0..d {
        let row: Vector = generators.iter().map(|g| g[i].clone()).collect();
        p.push(row, Relation::Eq, u[i].clone())?;
    }
    if u.is_zero() {
        p.push(Vector::ones(n), Relation::Eq, Rational::one())?;
    }
    Ok(match p.solve() {
        LpResult::Feasible { point } => Some(point.into_entries()),
        _ => None,
    })
}

/// Weights `lambda >= 0` with `u - sum lambda_k g_k` strictly positive in
/// every entry.
pub fn strict_residual(generators: &[Vector], u: &Vector) -> Result<Option<Vec<Rational>>> {
    let d = u.dim();
    let n = generators.len();
    let mut base = LpProblem::new(n);
    base.set_all_nonneg();
    let rows: Vec<MarginRow> = (0..d)
        .map(|i| {
            let coeffs: Vector = generators.iter().map(|g| -&g[i]).collect();
            MarginRow {
                coeffs,
                constant: u[i].clone(),
            }
        })
        .collect();
    let m = max_margin(&base, &rows, &Rational::one())?;
    Ok(match m {
        crate::lp::Margin::Optimal { margin, point } if margin.is_positive() => {
            Some(point.into_entries())
        }
        _ => None,
    })
}

impl DesirCone {
    pub fn posi(space: OptionSpace, generators: Vec<Vector>) -> Result<Self> {
        for g in &generators {
            space.check(g)?;
        }
        Ok(DesirCone {
            space,
            repr: ConeRepr::Posi { generators },
        })
    }

    /// The smallest coherent candidate: the background cone itself.
    pub fn vacuous(space: OptionSpace) -> Self {
        DesirCone {
            space,
            repr: ConeRepr::Posi {
                generators: Vec::new(),
            },
        }
    }

    pub fn open_dual(space: OptionSpace, pieces: Vec<LinearF>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidInput(
                "an open dual cone needs at least one piece".into(),
            ));
        }
        for p in &pieces {
            check_dim(space.dim(), p.dim())?;
        }
        Ok(DesirCone {
            space,
            repr: ConeRepr::OpenDual { pieces },
        })
    }

    pub fn lex(space: OptionSpace, levels: Vec<LinearF>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidInput(
                "a lexicographic cone needs at least one level".into(),
            ));
        }
        for l in &levels {
            check_dim(space.dim(), l.dim())?;
        }
        let rows: Vec<Vector> = levels.iter().map(|l| l.coeffs().clone()).collect();
        if rank(&rows) != rows.len() {
            return Err(Error::InvalidInput(
                "lexicographic levels must be linearly independent".into(),
            ));
        }
        Ok(DesirCone {
            space,
            repr: ConeRepr::Lex { levels },
        })
    }

    pub fn space(&self) -> &OptionSpace {
        &self.space
    }

    pub fn repr(&self) -> &ConeRepr {
        &self.repr
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Generators together with the background generators `e_i`. Under strict
    /// dominance this spans the closure of the cone.
    pub fn closed_generators(&self) -> Option<Vec<Vector>> {
        let ConeRepr::Posi { generators } = &self.repr else {
            return None;
        };
        let d = self.dim();
        let mut all = generators.clone();
        all.extend((0..d).map(|i| Vector::unit(d, i)));
        Some(all)
    }

    pub fn member(&self, u: &Vector) -> Result<bool> {
        self.space.check(u)?;
        match &self.repr {
            ConeRepr::Posi { generators } => match self.space.background() {
                Background::Pointwise => {
                    let all = self.closed_generators().expect("posi cone");
                    Ok(posi_member(&all, u)?.is_some())
                }
                Background::Strict => Ok(posi_member(generators, u)?.is_some()
                    || strict_residual(generators, u)?.is_some()),
            },
            ConeRepr::OpenDual { pieces } => {
                for p in pieces {
                    if !p.eval(u)?.is_positive() {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            ConeRepr::Lex { levels } => Ok(lex_values(levels, u)?.lex_sign() == Ordering::Greater),
        }
    }

    pub fn member_batch(&self, options: &[Vector], exec: Exec) -> Result<Vec<bool>> {
        exec.map(options, |u| self.member(u)).into_iter().collect()
    }

    /// D1: the zero option is not desirable. For posi cones this is exactly
    /// consistency of the generating assessment.
    pub fn is_consistent(&self) -> Result<bool> {
        Ok(!self.member(&Vector::zeros(self.dim()))?)
    }

    /// D1, D2 and D3. Posi-closure holds by construction for every
    /// representation, so only D1 and background inclusion are checked.
    pub fn is_coherent(&self) -> Result<bool> {
        let bg = self.space.background();
        Ok(match &self.repr {
            ConeRepr::Posi { .. } => self.is_consistent()?,
            ConeRepr::OpenDual { pieces } => pieces.iter().all(|p| p.is_positive(&self.space)),
            ConeRepr::Lex { levels } => match bg {
                Background::Pointwise => (0..self.dim()).all(|i| {
                    let e = Vector::unit(self.dim(), i);
                    lex_values(levels, &e).is_ok_and(|v| v.lex_sign() == Ordering::Greater)
                }),
                Background::Strict => levels[0].coeffs().all_nonneg(),
            },
        })
    }

    /// Is the complement of the cone closed under positive combinations?
    pub fn is_mixing(&self) -> Result<Mixing> {
        if !self.is_coherent()? {
            return Err(Error::Precondition(
                "mixing is only decided for coherent cones".into(),
            ));
        }
        let u_o = self.space.reference();
        match &self.repr {
            ConeRepr::Lex { .. } => Ok(Mixing::Mixing),
            ConeRepr::OpenDual { pieces } => {
                let first = pieces[0].coeffs();
                let Some(other) = pieces
                    .iter()
                    .find(|p| !positively_proportional(first, p.coeffs()))
                else {
                    return Ok(Mixing::Mixing);
                };
                let (a, b) = (&pieces[0], other);
                // z with a(z) < 0 < b(z) exists because a, b are positive and
                // not proportional; push u_o/2 far along +z and -z.
                let sys = strict_homogeneous_feasible(
                    &[b.coeffs().clone(), a.coeffs().neg()],
                    &[],
                    &[],
                    self.dim(),
                )?;
                let Some(z) = sys.witness() else {
                    return Ok(Mixing::Unknown);
                };
                let two = Rational::from_integer(2);
                let ta = a.eval(u_o)? / (&two * &(-a.eval(z)?));
                let tb = b.eval(u_o)? / (&two * &b.eval(z)?);
                let t = ta.max(tb);
                let half = u_o.scale(&Rational::new(1, 2)?);
                let u = half.add(&z.scale(&t))?;
                let v = half.sub(&z.scale(&t))?;
                self.mixing_witness(u, v)
            }
            ConeRepr::Posi { .. } => {
                let d = self.dim();
                if d == 1 {
                    return Ok(Mixing::Mixing);
                }
                let members = match &self.repr {
                    ConeRepr::Posi { generators } => generators.clone(),
                    _ => unreachable!(),
                };
                let sep = self.space.positive_separator(&members, &[])?;
                let Some(l0) = sep.witness() else {
                    return Ok(Mixing::Unknown);
                };
                // The cone lies in {l0 > 0}, so -t z (l0 = 0) is never inside;
                // u_o + t z leaves the cone for large t unless z points into
                // its closure.
                for z in nullspace(std::slice::from_ref(l0), d) {
                    for z in [z.clone(), z.neg()] {
                        let mut t = Rational::one();
                        for _ in 0..64 {
                            let u = u_o.add(&z.scale(&t))?;
                            if !self.member(&u)? {
                                return self.mixing_witness(u, z.scale(&t).neg());
                            }
                            t = &t * &Rational::from_integer(2);
                        }
                    }
                }
                Ok(Mixing::Unknown)
            }
        }
    }

    fn mixing_witness(&self, u: Vector, v: Vector) -> Result<Mixing> {
        let sum = u.add(&v)?;
        if !self.member(&u)? && !self.member(&v)? && self.member(&sum)? {
            Ok(Mixing::NotMixing { u, v })
        } else {
            Ok(Mixing::Unknown)
        }
    }

    /// For a lexicographic cone with at least two levels: an option with
    /// `L_1 = 0` and `L_2 = 1`, which is desirable but sits on the boundary
    /// of the closed half-space `L_1 >= 0`.
    pub(crate) fn lex_boundary_member(levels: &[LinearF]) -> Result<Option<Vector>> {
        if levels.len() < 2 {
            return Ok(None);
        }
        let d = levels[0].dim();
        let rows = [levels[0].coeffs().clone(), levels[1].coeffs().clone()];
        solve(&rows, &[Rational::zero(), Rational::one()], d)
    }
}

pub fn lex_values(levels: &[LinearF], u: &Vector) -> Result<Vector> {
    levels
        .iter()
        .map(|l| l.eval(u))
        .collect::<Result<Vec<_>>>()
        .map(Vector::new)
}

/// Natural extension of a finite assessment: the posi cone it generates
/// with the background, plus a consistency verdict backed by a checkable
/// witness.
pub fn natural_extension(
    assessment: Vec<Vector>,
    space: &OptionSpace,
) -> Result<(DesirCone, ConsistencyReport)> {
    let cone = DesirCone::posi(space.clone(), assessment.clone())?;
    let d = space.dim();
    let k = assessment.len();
    let report = match space.background() {
        Background::Pointwise => match space.positive_separator(&assessment, &[])? {
            Homogeneous::Solvable(l) => ConsistencyReport {
                consistent: true,
                witness: Some(ConsistencyWitness::Separating(LinearF::new(l))),
            },
            Homogeneous::Unsolvable(cert) => {
                // Strict rows were e_1..e_d followed by the assessment.
                let background = Vector::new(cert.strict[..d].to_vec());
                let weights = cert.strict[d..d + k].to_vec();
                ConsistencyReport {
                    consistent: false,
                    witness: Some(ConsistencyWitness::Combination {
                        weights,
                        background,
                        certificate: Some(cert),
                    }),
                }
            }
        },
        Background::Strict => {
            let zero = Vector::zeros(d);
            if let Some(w) = posi_member(&assessment, &zero)? {
                ConsistencyReport {
                    consistent: false,
                    witness: Some(ConsistencyWitness::Combination {
                        weights: w,
                        background: zero,
                        certificate: None,
                    }),
                }
            } else if let Some(w) = strict_residual(&assessment, &zero)? {
                let background = Vector::combination(d, &w, &assessment)?.neg();
                ConsistencyReport {
                    consistent: false,
                    witness: Some(ConsistencyWitness::Combination {
                        weights: w,
                        background,
                        certificate: None,
                    }),
                }
            } else {
                let witness = space
                    .positive_separator(&assessment, &[])?
                    .witness()
                    .map(|l| ConsistencyWitness::Separating(LinearF::new(l.clone())));
                ConsistencyReport {
                    consistent: true,
                    witness,
                }
            }
        }
    };
    Ok((cone, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vector {
        Vector::from_ints(xs)
    }

    fn pw() -> OptionSpace {
        OptionSpace::with_unit_reference(2, Background::Pointwise).unwrap()
    }

    fn st() -> OptionSpace {
        OptionSpace::with_unit_reference(2, Background::Strict).unwrap()
    }

    fn d_h(space: OptionSpace) -> DesirCone {
        DesirCone::lex(
            space,
            vec![LinearF::from_ints(&[1, 0]), LinearF::from_ints(&[0, 1])],
        )
        .unwrap()
    }

    #[test]
    fn posi_of_opposite_pair_contains_zero() {
        assert!(posi_member(&[v(&[1, -1]), v(&[-1, 1])], &v(&[0, 0]))
            .unwrap()
            .is_some());
        assert!(posi_member(&[v(&[1, -1])], &v(&[0, 0])).unwrap().is_none());
    }

    #[test]
    fn lexicographic_heads_cone() {
        let d = d_h(pw());
        assert!(d.member(&v(&[0, 1])).unwrap());
        assert!(!d.member(&v(&[0, -1])).unwrap());
        assert!(d.member(&v(&[1, -100])).unwrap());
        assert!(!d.member(&v(&[0, 0])).unwrap());
        assert!(d.is_coherent().unwrap());
        assert_eq!(d.is_mixing().unwrap(), Mixing::Mixing);
        assert!(DesirCone::lex(
            pw(),
            vec![LinearF::from_ints(&[1, 1]), LinearF::from_ints(&[2, 2])]
        )
        .is_err());
    }

    #[test]
    fn natural_extension_of_single_gamble() {
        let (d, rep) = natural_extension(vec![v(&[1, -1])], &pw()).unwrap();
        assert!(rep.consistent && rep.verify(&[v(&[1, -1])], &pw()));
        assert!(d.member(&v(&[1, 0])).unwrap());
        assert!(!d.member(&v(&[-1, 3])).unwrap());
        assert!(d.member(&v(&[3, -2])).unwrap());
    }

    #[test]
    fn inconsistent_assessment_witness() {
        let a = vec![v(&[-1, -1])];
        let (d, rep) = natural_extension(a.clone(), &pw()).unwrap();
        assert!(!rep.consistent && rep.verify(&a, &pw()));
        assert!(!d.is_coherent().unwrap());
        let (_, rep) = natural_extension(a.clone(), &st()).unwrap();
        assert!(!rep.consistent && rep.verify(&a, &st()));
        let a = vec![v(&[1, -1]), v(&[-1, 1])];
        let (_, rep) = natural_extension(a.clone(), &st()).unwrap();
        assert!(!rep.consistent && rep.verify(&a, &st()));
    }

    #[test]
    fn strict_consistent_without_linear_separator() {
        // posi{(-1,0)} with the open orthant is coherent but no linear
        // functional is positive on it.
        let a = vec![v(&[-1, 0])];
        let (d, rep) = natural_extension(a.clone(), &st()).unwrap();
        assert!(rep.consistent && rep.witness.is_none());
        assert!(d.is_coherent().unwrap());
        assert!(d.member(&v(&[-5, 0])).unwrap());
        assert!(d.member(&v(&[-5, 1])).unwrap());
        assert!(!d.member(&v(&[5, 0])).unwrap());
    }

    #[test]
    fn open_dual_coherence_depends_on_background() {
        let l = vec![LinearF::from_ints(&[1, 0])];
        assert!(!DesirCone::open_dual(pw(), l.clone())
            .unwrap()
            .is_coherent()
            .unwrap());
        assert!(DesirCone::open_dual(st(), l)
            .unwrap()
            .is_coherent()
            .unwrap());
    }

    #[test]
    fn interior() {
        assert!(pw().interior_member(&v(&[1, 1])).unwrap());
        assert!(!pw().interior_member(&v(&[1, 0])).unwrap());
        assert!(OptionSpace::new(2, Background::Pointwise, v(&[1, 0])).is_err());
    }

    #[test]
    fn vacuous_cones() {
        let d = DesirCone::vacuous(pw());
        assert!(d.member(&v(&[1, 0])).unwrap());
        assert!(!d.member(&v(&[1, -1])).unwrap());
        let d = DesirCone::vacuous(st());
        assert!(!d.member(&v(&[1, 0])).unwrap());
        assert!(d.member(&v(&[1, 2])).unwrap());
        assert!(d.is_coherent().unwrap());
    }

    #[test]
    fn mixing_witnesses_verify() {
        let pieces = vec![
            LinearF::new(Vector::parse(&["1/4", "3/4"]).unwrap()),
            LinearF::new(Vector::parse(&["3/4", "1/4"]).unwrap()),
        ];
        for space in [pw(), st()] {
            let d = DesirCone::open_dual(space, pieces.clone()).unwrap();
            let Mixing::NotMixing { u, v } = d.is_mixing().unwrap() else {
                panic!()
            };
            assert!(!d.member(&u).unwrap() && !d.member(&v).unwrap());
            assert!(d.member(&u.add(&v).unwrap()).unwrap());
            let (x, y) = (Vector::from_ints(&[3, -2]), Vector::from_ints(&[-2, 3]));
            assert!(!d.member(&x).unwrap() && !d.member(&y).unwrap());
            assert!(d.member(&x.add(&y).unwrap()).unwrap());
        }
        let (d, _) = natural_extension(vec![v(&[1, -1])], &pw()).unwrap();
        assert!(matches!(d.is_mixing().unwrap(), Mixing::NotMixing { .. }));
        let line = OptionSpace::with_unit_reference(1, Background::Pointwise).unwrap();
        assert_eq!(
            DesirCone::vacuous(line).is_mixing().unwrap(),
            Mixing::Mixing
        );
    }
}
