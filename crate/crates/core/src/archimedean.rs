//! Archimedean separation, closures and the reference-option functional.
//!
//! Every question here reduces to a homogeneous system: find a linear `L`
//! that is strictly positive on the background and on the cone, and `<= 0`
//! at a rejected option. How "positive on the cone" becomes finitely many
//! rows depends on the representation:
//!
//! * posi cones: positivity on the generators (the background is already in
//!   the rows);
//! * open dual cones: `L` must be a nonzero nonnegative combination of the
//!   pieces, so the unknown becomes the vector of combination weights;
//! * lexicographic cones: `L >= 0` on the closed half-space `L_1 >= 0`,
//!   spanned by `L_1` itself and `± ker L_1`, and `L > 0` at an option on
//!   the boundary of that half-space that the cone still contains. With two
//!   or more levels this always fails, and the LP certificate says so.

use crate::cone::{posi_member, strict_residual, Background, ConeRepr, DesirCone};
use crate::error::{Error, Result};
use crate::functional::{positively_proportional, Functional, LinearF, SuperlinF};
use crate::lp::{Homogeneous, HomogeneousSystem, LpProblem, LpResult, Relation};
use crate::numeric::{nullspace, Rational, Vector};

/// Generator count above which the exact face walk used by
/// [`is_archimedean`] for strict posi cones refuses to run.
pub const FACE_WALK_LIMIT: usize = 16;

/// A homogeneous system whose solutions encode separating functionals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositivitySystem {
    pub system: HomogeneousSystem,
    /// Number of unknowns.
    pub unknowns: usize,
    /// `None`: the unknown is the functional itself. `Some(pieces)`: the
    /// unknown is a weight vector over these pieces.
    pub pieces: Option<Vec<LinearF>>,
}

impl PositivitySystem {
    /// The linear functional encoded by a solution.
    pub fn functional(&self, x: &Vector) -> Result<LinearF> {
        match &self.pieces {
            None => Ok(LinearF::new(x.clone())),
            Some(pieces) => {
                let total: Rational = x.iter().sum();
                let coeffs: Vec<Vector> = pieces.iter().map(|p| p.coeffs().clone()).collect();
                let c = Vector::combination(pieces[0].dim(), x.entries(), &coeffs)?;
                // Scale into the convex hull of the pieces.
                Ok(LinearF::new(c.scale(&total.recip()?)))
            }
        }
    }

    pub fn solve(&self) -> Result<Homogeneous> {
        self.system.solve(self.unknowns)
    }

    pub fn verify(&self, result: &Homogeneous) -> bool {
        self.system.verify(result, self.unknowns)
    }
}

/// Builds the system "L positive on background and cone, `L(v) <= 0` for v in
/// `nonpos`".
pub fn positivity_system(d: &DesirCone, nonpos: &[Vector]) -> Result<PositivitySystem> {
    for v in nonpos {
        d.space().check(v)?;
    }
    let dim = d.dim();
    let (bg_strict, bg_nonneg) = d.space().positivity_rows();
    match d.repr() {
        ConeRepr::Posi { generators } => {
            let mut strict = bg_strict;
            strict.extend(generators.iter().cloned());
            Ok(PositivitySystem {
                system: HomogeneousSystem {
                    strict,
                    nonpos: nonpos.to_vec(),
                    nonneg: bg_nonneg,
                },
                unknowns: dim,
                pieces: None,
            })
        }
        ConeRepr::OpenDual { pieces } => {
            // Row r over the weights mu: (L_j . r)_j, i.e. (sum mu_j L_j) . r.
            let lift = |r: &Vector| -> Result<Vector> {
                pieces
                    .iter()
                    .map(|p| p.eval(r))
                    .collect::<Result<Vec<_>>>()
                    .map(Vector::new)
            };
            let m = pieces.len();
            let strict = bg_strict.iter().map(lift).collect::<Result<Vec<_>>>()?;
            let mut nonneg = bg_nonneg.iter().map(lift).collect::<Result<Vec<_>>>()?;
            nonneg.extend((0..m).map(|j| Vector::unit(m, j)));
            let nonpos = nonpos.iter().map(lift).collect::<Result<Vec<_>>>()?;
            Ok(PositivitySystem {
                system: HomogeneousSystem {
                    strict,
                    nonpos,
                    nonneg,
                },
                unknowns: m,
                pieces: Some(pieces.clone()),
            })
        }
        ConeRepr::Lex { levels } => {
            let l1 = levels[0].coeffs();
            let mut strict = bg_strict;
            strict.push(l1.clone());
            if let Some(z) = DesirCone::lex_boundary_member(levels)? {
                strict.push(z);
            }
            let mut nonneg = bg_nonneg;
            for k in nullspace(std::slice::from_ref(l1), dim) {
                nonneg.push(k.neg());
                nonneg.push(k);
            }
            Ok(PositivitySystem {
                system: HomogeneousSystem {
                    strict,
                    nonpos: nonpos.to_vec(),
                    nonneg,
                },
                unknowns: dim,
                pieces: None,
            })
        }
    }
}

/// Outcome of the Archimedean consistency test, with the system it was read
/// from so the evidence can be re-checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArchConsistency {
    pub system: PositivitySystem,
    pub result: Homogeneous,
}

impl ArchConsistency {
    pub fn consistent(&self) -> bool {
        self.result.witness().is_some()
    }

    pub fn functional(&self) -> Option<LinearF> {
        self.result.witness().map(|x| {
            self.system
                .functional(x)
                .expect("solution has the right width")
        })
    }

    pub fn verify(&self) -> bool {
        self.system.verify(&self.result)
    }
}

/// Is the cone contained in some Archimedean coherent cone, i.e. is there a
/// background-positive linear functional positive on all of it?
pub fn archimedean_consistent(d: &DesirCone) -> Result<ArchConsistency> {
    let system = positivity_system(d, &[])?;
    let result = system.solve()?;
    Ok(ArchConsistency { system, result })
}

/// A background-positive linear `L`, positive on the cone, with `L(v) <= 0`.
pub fn separate(d: &DesirCone, v: &Vector) -> Result<Option<LinearF>> {
    if d.member(v)? {
        return Err(Error::InsideCone);
    }
    let system = positivity_system(d, std::slice::from_ref(v))?;
    match system.solve()? {
        Homogeneous::Solvable(x) => Ok(Some(system.functional(&x)?)),
        Homogeneous::Unsolvable(_) => Ok(None),
    }
}

/// Re-checks a separating functional against the cone's representation.
pub fn verify_separation(d: &DesirCone, v: &Vector, l: &LinearF) -> Result<bool> {
    if !l.is_positive(d.space()) || l.eval(v)?.is_positive() {
        return Ok(false);
    }
    Ok(match d.repr() {
        ConeRepr::Posi { generators } => generators
            .iter()
            .all(|g| l.eval(g).is_ok_and(|x| x.is_positive())),
        ConeRepr::OpenDual { pieces } => {
            let mut p = LpProblem::new(pieces.len());
            p.set_all_nonneg();
            for i in 0..d.dim() {
                let row: Vector = pieces.iter().map(|q| q.coeffs()[i].clone()).collect();
                p.push(row, Relation::Eq, l.coeffs()[i].clone())?;
            }
            !l.coeffs().is_zero() && matches!(p.solve(), LpResult::Feasible { .. })
        }
        ConeRepr::Lex { levels } => {
            levels.len() == 1 && positively_proportional(levels[0].coeffs(), l.coeffs())
        }
    })
}

fn require_arch_consistent(d: &DesirCone) -> Result<()> {
    if !archimedean_consistent(d)?.consistent() {
        return Err(Error::Precondition(
            "the cone is not Archimedean-consistent".into(),
        ));
    }
    Ok(())
}

/// Membership in the intersection of all `{L > 0}` over the
/// background-positive linear `L` that are positive on the cone.
pub fn archimedean_closure_member(d: &DesirCone, v: &Vector) -> Result<bool> {
    require_arch_consistent(d)?;
    if d.member(v)? {
        return Ok(true);
    }
    Ok(separate(d, v)?.is_none())
}

/// Is the cone open, and hence the positive set of a superlinear functional?
pub fn is_essentially_archimedean(d: &DesirCone) -> Result<bool> {
    if !d.is_coherent()? {
        return Ok(false);
    }
    Ok(match d.repr() {
        ConeRepr::OpenDual { .. } => true,
        ConeRepr::Lex { levels } => levels.len() == 1,
        ConeRepr::Posi { generators } => match d.space().background() {
            // A closed cone minus the origin is open only on the line.
            Background::Pointwise => d.dim() == 1,
            // Open iff every generator already sits in posi(G) + open orthant.
            Background::Strict => {
                let mut open = true;
                for g in generators {
                    if strict_residual(generators, g)?.is_none() {
                        open = false;
                        break;
                    }
                }
                open
            }
        },
    })
}

/// Is the cone coherent and equal to its Archimedean closure?
///
/// Posi cones are decided exactly. Under pointwise dominance every coherent
/// posi cone is a pointed closed cone minus the origin, hence Archimedean.
/// Under strict dominance the cone is its closure `C = cone(G, e_i)` minus
/// those boundary faces not generated by `G`; such a face survives in the
/// Archimedean closure unless some functional vanishing on it is still
/// positive on `G`. The faces are walked by subsets of generators.
pub fn is_archimedean(d: &DesirCone) -> Result<bool> {
    if !d.is_coherent()? {
        return Ok(false);
    }
    match d.repr() {
        ConeRepr::OpenDual { .. } => Ok(true),
        ConeRepr::Lex { levels } => Ok(levels.len() == 1),
        ConeRepr::Posi { generators } => {
            if d.space().background() == Background::Pointwise {
                return Ok(true);
            }
            if !archimedean_consistent(d)?.consistent() {
                return Ok(false);
            }
            if is_essentially_archimedean(d)? {
                return Ok(true);
            }
            strict_posi_faces_archimedean(d, generators)
        }
    }
}

fn strict_posi_faces_archimedean(d: &DesirCone, generators: &[Vector]) -> Result<bool> {
    let w = d.closed_generators().expect("posi cone");
    let n = w.len();
    if n > FACE_WALK_LIMIT {
        return Err(Error::Unsupported(format!(
            "face walk over {n} generators exceeds the limit of {FACE_WALK_LIMIT}"
        )));
    }
    let k = generators.len();
    for mask in 1u32..(1u32 << n) - 1 {
        let inside = |i: usize| mask & (1 << i) != 0;
        let on_face: Vec<Vector> = (0..n)
            .filter(|&i| inside(i))
            .map(|i| w[i].clone())
            .collect();
        let off_face: Vec<Vector> = (0..n)
            .filter(|&i| !inside(i))
            .map(|i| w[i].clone())
            .collect();
        let exposing = HomogeneousSystem {
            strict: off_face.clone(),
            nonpos: on_face.clone(),
            nonneg: on_face.clone(),
        };
        if exposing.solve(d.dim())?.witness().is_none() {
            continue;
        }
        let face_gens: Vec<Vector> = (0..k)
            .filter(|&i| inside(i))
            .map(|i| w[i].clone())
            .collect();
        let mut generated = true;
        for i in (k..n).filter(|&i| inside(i)) {
            if posi_member(&face_gens, &w[i])?.is_none() {
                generated = false;
                break;
            }
        }
        if generated {
            continue;
        }
        // The relative interior of this face is outside the cone; it must be
        // cut off by a functional that vanishes on the face.
        let dim = d.dim();
        let mut strict = vec![Vector::ones(dim)];
        strict.extend(generators.iter().cloned());
        let cut = HomogeneousSystem {
            strict,
            nonpos: on_face.clone(),
            nonneg: w.clone(),
        };
        if cut.solve(dim)?.witness().is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `sup{a : u - a u_o in D}` for a coherent cone.
pub fn lambda_o(d: &DesirCone, u: &Vector) -> Result<Rational> {
    d.space().check(u)?;
    if !d.is_coherent()? {
        return Err(Error::Precondition("lambda_o needs a coherent cone".into()));
    }
    let u_o = d.space().reference();
    match d.repr() {
        ConeRepr::OpenDual { pieces } => {
            let mut best: Option<Rational> = None;
            for p in pieces {
                let r = p.eval(u)?.checked_div(&p.eval(u_o)?)?;
                best = Some(match best {
                    Some(b) => b.min(r),
                    None => r,
                });
            }
            Ok(best.expect("nonempty"))
        }
        ConeRepr::Lex { levels } => levels[0].eval(u)?.checked_div(&levels[0].eval(u_o)?),
        ConeRepr::Posi { .. } => {
            // The supremum over the cone equals the maximum over its closure.
            let w = d.closed_generators().expect("posi cone");
            let n = w.len();
            let mut p = LpProblem::new(n + 1);
            for j in 0..n {
                p.set_nonneg(j + 1)?;
            }
            for i in 0..d.dim() {
                let mut row = vec![u_o[i].clone()];
                row.extend(w.iter().map(|g| g[i].clone()));
                p.push(Vector::new(row), Relation::Eq, u[i].clone())?;
            }
            p.maximize(Vector::unit(n + 1, 0))?;
            match p.solve() {
                LpResult::Optimal { value, .. } => Ok(value),
                other => Err(Error::Precondition(format!(
                    "lambda_o LP did not attain an optimum: {other:?}"
                ))),
            }
        }
    }
}

/// `lambda_o` as a functional, when it has a finite closed form.
pub fn lambda_o_functional(d: &DesirCone) -> Result<Functional> {
    if !d.is_coherent()? {
        return Err(Error::Precondition("lambda_o needs a coherent cone".into()));
    }
    let u_o = d.space().reference();
    match d.repr() {
        ConeRepr::OpenDual { pieces } => {
            let env = SuperlinF::new(pieces.clone())?.nml(u_o)?;
            if env.is_linear() {
                Ok(Functional::Linear(env.pieces()[0].clone()))
            } else {
                Ok(Functional::Superlinear(env))
            }
        }
        ConeRepr::Lex { levels } => Ok(Functional::Linear(levels[0].nml(u_o)?)),
        ConeRepr::Posi { .. } => Err(Error::Unsupported(
            "closed form of lambda_o for posi cones (use the pointwise LP)".into(),
        )),
    }
}

/// Positive set of a functional's lambda_o view, `{u : lambda_o(u) > 0}`.
pub fn lambda_o_positive(d: &DesirCone, u: &Vector) -> Result<bool> {
    Ok(lambda_o(d, u)?.is_positive())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{natural_extension, OptionSpace};

    fn v(xs: &[i64]) -> Vector {
        Vector::from_ints(xs)
    }

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn pw() -> OptionSpace {
        OptionSpace::with_unit_reference(2, Background::Pointwise).unwrap()
    }

    fn st() -> OptionSpace {
        OptionSpace::with_unit_reference(2, Background::Strict).unwrap()
    }

    fn lin(a: &str, b: &str) -> LinearF {
        LinearF::new(Vector::parse(&[a, b]).unwrap())
    }

    #[test]
    fn separation_examples() {
        let (d, _) = natural_extension(vec![v(&[1, -1])], &pw()).unwrap();
        let target = v(&[-1, 3]);
        let l = separate(&d, &target).unwrap().unwrap();
        assert!(verify_separation(&d, &target, &l).unwrap());
        let three_one = LinearF::from_ints(&[3, 1]);
        assert!(verify_separation(&d, &target, &three_one).unwrap());
        assert_eq!(separate(&d, &v(&[1, 0])), Err(Error::InsideCone));

        let d_h = DesirCone::lex(
            pw(),
            vec![LinearF::from_ints(&[1, 0]), LinearF::from_ints(&[0, 1])],
        )
        .unwrap();
        assert_eq!(separate(&d_h, &v(&[-1, 0])).unwrap(), None);

        let half = DesirCone::open_dual(pw(), vec![lin("1/2", "1/2")]).unwrap();
        let l = separate(&half, &v(&[1, -1])).unwrap().unwrap();
        assert_eq!(l, lin("1/2", "1/2"));
    }

    #[test]
    fn closure_excludes_far_point() {
        let (d, _) = natural_extension(vec![v(&[1, -1])], &pw()).unwrap();
        let u = Vector::parse(&["2", "-21/10"]).unwrap();
        assert!(!archimedean_closure_member(&d, &u).unwrap());
        assert!(archimedean_closure_member(&d, &v(&[2, -2])).unwrap());
    }

    #[test]
    fn lambda_o_examples() {
        let d_h = DesirCone::lex(
            pw(),
            vec![LinearF::from_ints(&[1, 0]), LinearF::from_ints(&[0, 1])],
        )
        .unwrap();
        assert_eq!(lambda_o(&d_h, &v(&[3, -7])).unwrap(), q("3"));
        let d_i = DesirCone::open_dual(pw(), vec![lin("1/4", "3/4"), lin("3/4", "1/4")]).unwrap();
        assert_eq!(lambda_o(&d_i, &v(&[1, 0])).unwrap(), q("1/4"));
        let (ext, _) = natural_extension(vec![v(&[1, -1])], &pw()).unwrap();
        // (1,0) - a (1,1) in posi{(1,-1), e1, e2}: a <= 1/2.
        assert_eq!(lambda_o(&ext, &v(&[1, 0])).unwrap(), q("1/2"));
        assert!(lambda_o_functional(&ext).is_err());
    }

    #[test]
    fn heads_split_by_background() {
        let strict = DesirCone::open_dual(st(), vec![LinearF::from_ints(&[1, 0])]).unwrap();
        assert!(strict.is_coherent().unwrap());
        assert!(is_essentially_archimedean(&strict).unwrap());
        assert!(archimedean_consistent(&strict).unwrap().consistent());
        let lex = DesirCone::lex(
            pw(),
            vec![LinearF::from_ints(&[1, 0]), LinearF::from_ints(&[0, 1])],
        )
        .unwrap();
        let ac = archimedean_consistent(&lex).unwrap();
        assert!(!ac.consistent() && ac.verify());
        assert!(!is_archimedean(&lex).unwrap());
    }

    #[test]
    fn strict_posi_archimedean_cases() {
        // The open orthant.
        assert!(is_archimedean(&DesirCone::vacuous(st())).unwrap());
        // {x > 0, y >= 0}: the missing ray (0,1) is cut off by (1,0).
        let (d, _) = natural_extension(vec![v(&[1, 0])], &st()).unwrap();
        assert!(!is_essentially_archimedean(&d).unwrap());
        assert!(is_archimedean(&d).unwrap());
        // Closed cone minus origin.
        let (d, _) = natural_extension(vec![v(&[3, -1]), v(&[-1, 3])], &st()).unwrap();
        assert!(is_archimedean(&d).unwrap());
        // Half-plane with part of its boundary: not Archimedean-consistent.
        let (d, _) = natural_extension(vec![v(&[-1, 0])], &st()).unwrap();
        assert!(!is_archimedean(&d).unwrap());
    }

    #[test]
    fn strict_posi_face_not_cut_off() {
        // 3-D: generators (1,0,0) and (0,1,0) with the open orthant. The
        // closure is the closed orthant; the face spanned by e3 is missing,
        // the face spanned by e1, e3 too (its interior is not generated).
        let sp = OptionSpace::with_unit_reference(3, Background::Strict).unwrap();
        let (d, _) = natural_extension(
            vec![Vector::from_ints(&[1, 0, 0]), Vector::from_ints(&[0, 1, 0])],
            &sp,
        )
        .unwrap();
        // e1 + e3 is outside D; every functional positive on e1, e2 and
        // nonnegative on the orthant that vanishes there is forced to be
        // zero on e1, so the face survives in the closure.
        let probe = Vector::from_ints(&[1, 0, 1]);
        assert!(!d.member(&probe).unwrap());
        assert!(archimedean_closure_member(&d, &probe).unwrap());
        assert!(!is_archimedean(&d).unwrap());
    }
}
