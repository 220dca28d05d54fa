//! Linear functionals and finite superlinear min-envelopes.
//!
//! A [`SuperlinF`] is `u -> min_j L_j(u)` over a nonempty list of linear
//! pieces. Its conjugate is the max over the same pieces. Under the
//! sup-norm on options the operator norm of a piece is the l1 norm of its
//! coefficients, and the norm of an envelope is the largest piece norm: at
//! `u = -sign(L_j)` the envelope is at most `-|L_j|_1`, and it never exceeds
//! the first piece's norm from above.

use crate::cone::OptionSpace;
use crate::error::{check_dim, Error, Result};
use crate::lp::{LpProblem, LpResult, Relation};
use crate::numeric::{Rational, Vector};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearF {
    coeffs: Vector,
}

impl LinearF {
    pub fn new(coeffs: Vector) -> Self {
        LinearF { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        LinearF::new(Vector::from_ints(coeffs))
    }

    pub fn coeffs(&self) -> &Vector {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.dim()
    }

    pub fn eval(&self, u: &Vector) -> Result<Rational> {
        self.coeffs.dot(u)
    }

    pub fn operator_norm(&self) -> Rational {
        self.coeffs.l1_norm()
    }

    /// Strictly positive on the background cone: every `e_i` for pointwise
    /// dominance, the open orthant for strict dominance.
    pub fn is_positive(&self, space: &OptionSpace) -> bool {
        self.dim() == space.dim() && space.background().is_positive_functional(&self.coeffs)
    }

    /// Rescales so that the value at `u_o` is 1.
    pub fn nml(&self, u_o: &Vector) -> Result<LinearF> {
        let at = self.eval(u_o)?;
        if !at.is_positive() {
            return Err(Error::Precondition(format!(
                "functional {} is not positive at the reference option",
                self.coeffs
            )));
        }
        Ok(LinearF::new(self.coeffs.scale(&at.recip()?)))
    }

    pub fn scale(&self, c: &Rational) -> LinearF {
        LinearF::new(self.coeffs.scale(c))
    }
}

/// `u -> min_j pieces[j](u)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SuperlinF {
    pieces: Vec<LinearF>,
}

impl SuperlinF {
    pub fn new(pieces: Vec<LinearF>) -> Result<Self> {
        let Some(first) = pieces.first() else {
            return Err(Error::InvalidInput(
                "a min-envelope needs at least one piece".into(),
            ));
        };
        let d = first.dim();
        for p in &pieces {
            check_dim(d, p.dim())?;
        }
        Ok(SuperlinF { pieces })
    }

    pub fn from_ints(pieces: &[&[i64]]) -> Result<Self> {
        SuperlinF::new(pieces.iter().map(|p| LinearF::from_ints(p)).collect())
    }

    pub fn pieces(&self) -> &[LinearF] {
        &self.pieces
    }

    pub fn dim(&self) -> usize {
        self.pieces[0].dim()
    }

    pub fn eval(&self, u: &Vector) -> Result<Rational> {
        Ok(self.values(u)?.into_iter().min().expect("nonempty"))
    }

    /// `max_j L_j(u)`, which equals `-eval(-u)`.
    pub fn conjugate_eval(&self, u: &Vector) -> Result<Rational> {
        Ok(self.values(u)?.into_iter().max().expect("nonempty"))
    }

    fn values(&self, u: &Vector) -> Result<Vec<Rational>> {
        self.pieces.iter().map(|p| p.eval(u)).collect()
    }

    /// Exact operator norm with respect to the sup-norm.
    pub fn operator_norm(&self) -> Rational {
        self.pieces
            .iter()
            .map(LinearF::operator_norm)
            .max()
            .expect("nonempty")
    }

    /// Upper estimate `max_j |L_j|`; it coincides with the exact norm.
    pub fn operator_norm_bound(&self) -> Rational {
        self.operator_norm()
    }

    pub fn is_positive(&self, space: &OptionSpace) -> bool {
        self.pieces.iter().all(|p| p.is_positive(space))
    }

    /// The piece attaining the minimum at `u`, lowest index on ties. It is a
    /// linear functional dominating the envelope and touching it at `u`.
    pub fn hahn_banach_witness(&self, u: &Vector) -> Result<(usize, &LinearF)> {
        let values = self.values(u)?;
        let mut best = 0;
        for (j, v) in values.iter().enumerate() {
            if *v < values[best] {
                best = j;
            }
        }
        Ok((best, &self.pieces[best]))
    }

    /// Vertices of the convex hull of the piece coefficients, in order of
    /// first appearance. These are exactly the linear functionals needed to
    /// span the dominating set `{L : L >= envelope}`.
    pub fn dominating_polytope(&self) -> Vec<Vector> {
        let mut points: Vec<Vector> = Vec::new();
        for p in &self.pieces {
            if !points.contains(p.coeffs()) {
                points.push(p.coeffs().clone());
            }
        }
        (0..points.len())
            .filter(|&k| {
                let others: Vec<Vector> = points
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != k)
                    .map(|(_, p)| p.clone())
                    .collect();
                !in_convex_hull(&others, &points[k])
            })
            .map(|k| points[k].clone())
            .collect()
    }

    /// A linear functional dominates the envelope everywhere iff it lies in
    /// the convex hull of the pieces.
    pub fn is_dominated_by(&self, l: &LinearF) -> bool {
        let pts: Vec<Vector> = self.pieces.iter().map(|p| p.coeffs().clone()).collect();
        in_convex_hull(&pts, l.coeffs())
    }

    /// Normalises each piece at `u_o`; the result is
    /// `u -> sup{a : envelope(u - a u_o) > 0}`.
    pub fn nml(&self, u_o: &Vector) -> Result<SuperlinF> {
        let pieces = self
            .pieces
            .iter()
            .map(|p| p.nml(u_o))
            .collect::<Result<_>>()?;
        SuperlinF::new(pieces)
    }

    pub fn scale(&self, c: &Rational) -> Result<SuperlinF> {
        if c.is_negative() {
            return Err(Error::Precondition(
                "only nonnegative scalings keep an envelope superlinear".into(),
            ));
        }
        Ok(SuperlinF {
            pieces: self.pieces.iter().map(|p| p.scale(c)).collect(),
        })
    }

    /// Pointwise minimum of two envelopes.
    pub fn min_with(&self, other: &SuperlinF) -> Result<SuperlinF> {
        check_dim(self.dim(), other.dim())?;
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        SuperlinF::new(pieces)
    }

    /// True iff all pieces are positive multiples of one another, in which
    /// case the envelope is linear.
    pub fn is_linear(&self) -> bool {
        let first = self.pieces[0].coeffs();
        self.pieces
            .iter()
            .all(|p| positively_proportional(first, p.coeffs()))
    }
}

/// `b = c a` for some `c > 0`.
pub fn positively_proportional(a: &Vector, b: &Vector) -> bool {
    if a.dim() != b.dim() {
        return false;
    }
    let Some(i) = a.iter().position(|x| !x.is_zero()) else {
        return b.is_zero();
    };
    let c = &b[i] / &a[i];
    c.is_positive() && a.scale(&c) == *b
}

/// LP test for `target in conv(points)`.
pub fn in_convex_hull(points: &[Vector], target: &Vector) -> bool {
    if points.is_empty() {
        return false;
    }
    let d = target.dim();
    let n = points.len();
    let mut p = LpProblem::new(n);
    p.set_all_nonneg();
    for i in 0..d {
        let row: Vector = points.iter().map(|pt| pt[i].clone()).collect();
        p.push(row, Relation::Eq, target[i].clone())
            .expect("row width is n");
    }
    p.push(Vector::ones(n), Relation::Eq, Rational::one())
        .expect("row width is n");
    matches!(p.solve(), LpResult::Feasible { .. })
}

/// Either kind of lower functional, as returned by normalisation and by the
/// reference-option functional of a cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Functional {
    Linear(LinearF),
    Superlinear(SuperlinF),
}

impl Functional {
    pub fn eval(&self, u: &Vector) -> Result<Rational> {
        match self {
            Functional::Linear(l) => l.eval(u),
            Functional::Superlinear(s) => s.eval(u),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Functional::Linear(l) => l.dim(),
            Functional::Superlinear(s) => s.dim(),
        }
    }

    pub fn nml(&self, u_o: &Vector) -> Result<Functional> {
        Ok(match self {
            Functional::Linear(l) => Functional::Linear(l.nml(u_o)?),
            Functional::Superlinear(s) => Functional::Superlinear(s.nml(u_o)?),
        })
    }

    pub fn is_positive(&self, space: &OptionSpace) -> bool {
        match self {
            Functional::Linear(l) => l.is_positive(space),
            Functional::Superlinear(s) => s.is_positive(space),
        }
    }

    pub fn operator_norm(&self) -> Rational {
        match self {
            Functional::Linear(l) => l.operator_norm(),
            Functional::Superlinear(s) => s.operator_norm(),
        }
    }

    /// Pieces of the envelope; a linear functional is its own single piece.
    pub fn pieces(&self) -> Vec<LinearF> {
        match self {
            Functional::Linear(l) => vec![l.clone()],
            Functional::Superlinear(s) => s.pieces().to_vec(),
        }
    }

    pub fn as_envelope(&self) -> SuperlinF {
        SuperlinF::new(self.pieces()).expect("at least one piece")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{Background, OptionSpace};

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn v(xs: &[&str]) -> Vector {
        Vector::parse(xs).unwrap()
    }

    #[test]
    fn envelope_examples() {
        let f = SuperlinF::from_ints(&[&[1, 0], &[0, 1]]).unwrap();
        let u = Vector::from_ints(&[2, -1]);
        assert_eq!(f.eval(&u).unwrap(), q("-1"));
        assert_eq!(f.conjugate_eval(&u).unwrap(), q("2"));
        assert_eq!(f.hahn_banach_witness(&u).unwrap().0, 1);
        assert_eq!(
            f.hahn_banach_witness(&Vector::from_ints(&[1, 1]))
                .unwrap()
                .0,
            0
        );
        assert_eq!(LinearF::from_ints(&[2, -3]).operator_norm(), q("5"));
    }

    #[test]
    fn hull_vertices() {
        let f = SuperlinF::new(vec![
            LinearF::from_ints(&[1, 0]),
            LinearF::from_ints(&[0, 1]),
            LinearF::new(v(&["1/2", "1/2"])),
        ])
        .unwrap();
        assert_eq!(
            f.dominating_polytope(),
            vec![v(&["1", "0"]), v(&["0", "1"])]
        );
        assert!(f.is_dominated_by(&LinearF::new(v(&["1/3", "2/3"]))));
        assert!(!f.is_dominated_by(&LinearF::new(v(&["1", "1"]))));
    }

    #[test]
    fn normalisation() {
        let l = LinearF::from_ints(&[2, 4]);
        let n = l.nml(&Vector::ones(2)).unwrap();
        assert_eq!(n.coeffs(), &v(&["1/3", "2/3"]));
        assert!(LinearF::from_ints(&[1, -1]).nml(&Vector::ones(2)).is_err());
    }

    #[test]
    fn positivity_depends_on_background() {
        let pw = OptionSpace::with_unit_reference(2, Background::Pointwise).unwrap();
        let st = OptionSpace::with_unit_reference(2, Background::Strict).unwrap();
        let l = LinearF::from_ints(&[1, 0]);
        assert!(!l.is_positive(&pw));
        assert!(l.is_positive(&st));
        assert!(LinearF::from_ints(&[1, 2]).is_positive(&pw));
        assert!(!LinearF::from_ints(&[0, 0]).is_positive(&st));
        assert!(!LinearF::from_ints(&[1, -1]).is_positive(&st));
    }

    #[test]
    fn proportionality() {
        assert!(positively_proportional(
            &Vector::from_ints(&[1, 2]),
            &Vector::from_ints(&[2, 4])
        ));
        assert!(!positively_proportional(
            &Vector::from_ints(&[1, 2]),
            &Vector::from_ints(&[-1, -2])
        ));
        assert!(!positively_proportional(
            &Vector::from_ints(&[1, 2]),
            &Vector::from_ints(&[1, 3])
        ));
    }
}
