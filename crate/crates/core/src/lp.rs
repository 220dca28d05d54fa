//! Exact linear programming.
//!
//! A dense two-phase simplex over [`Rational`] with Bland's rule, so it
//! cannot cycle. Every answer carries something checkable: a feasible
//! point, an optimal point, a feasible point plus an improving ray, or a
//! Farkas certificate of infeasibility.
//!
//! Variables are free unless bounds are given. Internally each variable is
//! rewritten as `offset + sum of signed nonnegative columns`; rows are
//! normalised to `>=` or `=`, surplus columns are added, and phase one runs
//! with one artificial per row. The phase one simplex multipliers, mapped
//! back through the row flips and variable substitution, are the
//! certificate.
//!
//! Certificates use one orientation for every inequality: a `<=` row
//! `a.x <= b` is read as `-a.x >= -b`, a lower bound as `x_j >= l`, an upper
//! bound as `-x_j >= -u`. Multipliers on inequalities are nonnegative; the
//! combination has zero left-hand side and positive right-hand side, which
//! reads `0 >= positive`.

use crate::error::{check_dim, Error, Result};
use crate::numeric::{Rational, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vector,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vector, relation: Relation, rhs: Rational) -> Self {
        Constraint {
            coeffs,
            relation,
            rhs,
        }
    }

    pub fn ge(coeffs: Vector, rhs: Rational) -> Self {
        Constraint::new(coeffs, Relation::Ge, rhs)
    }

    pub fn le(coeffs: Vector, rhs: Rational) -> Self {
        Constraint::new(coeffs, Relation::Le, rhs)
    }

    pub fn eq(coeffs: Vector, rhs: Rational) -> Self {
        Constraint::new(coeffs, Relation::Eq, rhs)
    }

    fn holds_at(&self, x: &Vector) -> bool {
        let lhs = self.coeffs.dot(x).expect("dimension checked on insertion");
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }

    /// Coefficients and rhs in `>=` (or `=`) orientation.
    fn normalized(&self) -> (Vector, Rational, bool) {
        match self.relation {
            Relation::Le => (self.coeffs.neg(), -&self.rhs, false),
            Relation::Ge => (self.coeffs.clone(), self.rhs.clone(), false),
            Relation::Eq => (self.coeffs.clone(), self.rhs.clone(), true),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Objective {
    pub sense: Sense,
    pub coeffs: Vector,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bound {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpProblem {
    n_vars: usize,
    constraints: Vec<Constraint>,
    bounds: Vec<Bound>,
    objective: Option<Objective>,
}

/// Farkas multipliers, see the module docs for the orientation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub constraints: Vec<Rational>,
    pub lower: Vec<Rational>,
    pub upper: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpResult {
    /// No objective was set and the system has a solution.
    Feasible {
        point: Vector,
    },
    Optimal {
        point: Vector,
        value: Rational,
    },
    Infeasible {
        certificate: Certificate,
    },
    /// `point + s * ray` is feasible for all `s >= 0` and strictly improves
    /// the objective as `s` grows.
    Unbounded {
        point: Vector,
        ray: Vector,
    },
}

impl LpResult {
    pub fn point(&self) -> Option<&Vector> {
        match self {
            LpResult::Feasible { point }
            | LpResult::Optimal { point, .. }
            | LpResult::Unbounded { point, .. } => Some(point),
            LpResult::Infeasible { .. } => None,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, LpResult::Infeasible { .. })
    }
}

impl LpProblem {
    pub fn new(n_vars: usize) -> Self {
        LpProblem {
            n_vars,
            constraints: Vec::new(),
            bounds: vec![Bound::default(); n_vars],
            objective: None,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn bounds(&self) -> &[Bound] {
        &self.bounds
    }

    pub fn objective(&self) -> Option<&Objective> {
        self.objective.as_ref()
    }

    pub fn add(&mut self, c: Constraint) -> Result<()> {
        check_dim(self.n_vars, c.coeffs.dim())?;
        self.constraints.push(c);
        Ok(())
    }

    pub fn push(&mut self, coeffs: Vector, relation: Relation, rhs: Rational) -> Result<()> {
        self.add(Constraint::new(coeffs, relation, rhs))
    }

    pub fn set_bounds(
        &mut self,
        var: usize,
        lower: Option<Rational>,
        upper: Option<Rational>,
    ) -> Result<()> {
        let b = self
            .bounds
            .get_mut(var)
            .ok_or_else(|| Error::InvalidInput(format!("no variable {var}")))?;
        *b = Bound { lower, upper };
        Ok(())
    }

    pub fn set_nonneg(&mut self, var: usize) -> Result<()> {
        self.set_bounds(var, Some(Rational::zero()), None)
    }

    pub fn set_all_nonneg(&mut self) {
        for b in &mut self.bounds {
            *b = Bound {
                lower: Some(Rational::zero()),
                upper: None,
            };
        }
    }

    pub fn maximize(&mut self, coeffs: Vector) -> Result<()> {
        check_dim(self.n_vars, coeffs.dim())?;
        self.objective = Some(Objective {
            sense: Sense::Maximize,
            coeffs,
        });
        Ok(())
    }

    pub fn minimize(&mut self, coeffs: Vector) -> Result<()> {
        check_dim(self.n_vars, coeffs.dim())?;
        self.objective = Some(Objective {
            sense: Sense::Minimize,
            coeffs,
        });
        Ok(())
    }

    pub fn clear_objective(&mut self) {
        self.objective = None;
    }

    pub fn is_feasible_point(&self, x: &Vector) -> bool {
        if x.dim() != self.n_vars {
            return false;
        }
        let bounds_ok = self.bounds.iter().zip(x.iter()).all(|(b, xi)| {
            b.lower.as_ref().is_none_or(|l| xi >= l) && b.upper.as_ref().is_none_or(|u| xi <= u)
        });
        bounds_ok && self.constraints.iter().all(|c| c.holds_at(x))
    }

    /// `d` is a recession direction and strictly improves the objective.
    pub fn is_improving_ray(&self, d: &Vector) -> bool {
        let Some(obj) = &self.objective else {
            return false;
        };
        if d.dim() != self.n_vars {
            return false;
        }
        let gain = obj.coeffs.dot(d).expect("dimension checked");
        let improves = match obj.sense {
            Sense::Maximize => gain.is_positive(),
            Sense::Minimize => gain.is_negative(),
        };
        let rows_ok = self.constraints.iter().all(|c| {
            let s = c.coeffs.dot(d).expect("dimension checked");
            match c.relation {
                Relation::Le => !s.is_positive(),
                Relation::Eq => s.is_zero(),
                Relation::Ge => !s.is_negative(),
            }
        });
        let bounds_ok = self.bounds.iter().zip(d.iter()).all(|(b, dj)| {
            (b.lower.is_none() || !dj.is_negative()) && (b.upper.is_none() || !dj.is_positive())
        });
        improves && rows_ok && bounds_ok
    }

    /// Checks a certificate: signs, a vanishing combination, and a positive
    /// combined right-hand side.
    pub fn verify_certificate(&self, cert: &Certificate) -> bool {
        if cert.constraints.len() != self.constraints.len()
            || cert.lower.len() != self.n_vars
            || cert.upper.len() != self.n_vars
        {
            return false;
        }
        let mut lhs = Vector::zeros(self.n_vars).into_entries();
        let mut rhs = Rational::zero();
        for (c, y) in self.constraints.iter().zip(&cert.constraints) {
            let (a, b, is_eq) = c.normalized();
            if !is_eq && y.is_negative() {
                return false;
            }
            for (l, aj) in lhs.iter_mut().zip(a.iter()) {
                *l += &(y * aj);
            }
            rhs += &(y * &b);
        }
        #[allow(clippy::needless_range_loop)]
        for j in 0..self.n_vars {
            let (lo, up) = (&cert.lower[j], &cert.upper[j]);
            if lo.is_negative() || up.is_negative() {
                return false;
            }
            match &self.bounds[j].lower {
                Some(l) => rhs += &(lo * l),
                None if !lo.is_zero() => return false,
                None => {}
            }
            match &self.bounds[j].upper {
                Some(u) => rhs -= &(up * u),
                None if !up.is_zero() => return false,
                None => {}
            }
            lhs[j] += lo;
            lhs[j] -= up;
        }
        lhs.iter().all(Rational::is_zero) && rhs.is_positive()
    }

    /// Re-checks whatever evidence a result carries against this problem.
    pub fn verify(&self, result: &LpResult) -> bool {
        match result {
            LpResult::Feasible { point } => {
                self.objective.is_none() && self.is_feasible_point(point)
            }
            LpResult::Optimal { point, value } => {
                let Some(obj) = &self.objective else {
                    return false;
                };
                self.is_feasible_point(point) && obj.coeffs.dot(point).ok().as_ref() == Some(value)
            }
            LpResult::Unbounded { point, ray } => {
                self.is_feasible_point(point) && self.is_improving_ray(ray)
            }
            LpResult::Infeasible { certificate } => self.verify_certificate(certificate),
        }
    }

    pub fn solve(&self) -> LpResult {
        Simplex::build(self).run(self)
    }
}

#[derive(Clone, Copy, Debug)]
enum ColKind {
    Structural { var: usize, positive: bool },
    Surplus,
    Artificial,
}

#[derive(Clone, Copy, Debug)]
enum RowOrigin {
    Constraint(usize),
    Upper(usize),
}

struct Row {
    coeffs: Vector,
    rhs: Rational,
    is_eq: bool,
    origin: RowOrigin,
}

struct Simplex {
    n_vars: usize,
    rows: Vec<Row>,
    cols: Vec<ColKind>,
    offset: Vec<Rational>,
    // Tableau rows (last entry is the rhs), the reduced cost row, and basis.
    t: Vec<Vec<Rational>>,
    z: Vec<Rational>,
    basis: Vec<usize>,
    flip: Vec<bool>,
    art_col: Vec<usize>,
    allowed: Vec<bool>,
    early: Option<LpResult>,
}

enum Outcome {
    Optimal,
    Unbounded(usize),
}

impl Simplex {
    fn build(p: &LpProblem) -> Simplex {
        let n = p.n_vars;
        let mut cols = Vec::new();
        let mut offset = vec![Rational::zero(); n];
        let mut rows: Vec<Row> = p
            .constraints
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let (coeffs, rhs, is_eq) = c.normalized();
                Row {
                    coeffs,
                    rhs,
                    is_eq,
                    origin: RowOrigin::Constraint(i),
                }
            })
            .collect();
        let mut early = None;
        for (j, b) in p.bounds.iter().enumerate() {
            match (&b.lower, &b.upper) {
                (Some(l), None) => {
                    cols.push(ColKind::Structural {
                        var: j,
                        positive: true,
                    });
                    offset[j] = l.clone();
                }
                (None, Some(u)) => {
                    cols.push(ColKind::Structural {
                        var: j,
                        positive: false,
                    });
                    offset[j] = u.clone();
                }
                (Some(l), Some(u)) => {
                    if l > u && early.is_none() {
                        let mut cert = Certificate {
                            constraints: vec![Rational::zero(); p.constraints.len()],
                            lower: vec![Rational::zero(); n],
                            upper: vec![Rational::zero(); n],
                        };
                        cert.lower[j] = Rational::one();
                        cert.upper[j] = Rational::one();
                        early = Some(LpResult::Infeasible { certificate: cert });
                    }
                    cols.push(ColKind::Structural {
                        var: j,
                        positive: true,
                    });
                    offset[j] = l.clone();
                    rows.push(Row {
                        coeffs: Vector::unit(n, j).neg(),
                        rhs: -u,
                        is_eq: false,
                        origin: RowOrigin::Upper(j),
                    });
                }
                (None, None) => {
                    cols.push(ColKind::Structural {
                        var: j,
                        positive: true,
                    });
                    cols.push(ColKind::Structural {
                        var: j,
                        positive: false,
                    });
                }
            }
        }
        let n_struct = cols.len();
        let surplus_of: Vec<Option<usize>> = rows
            .iter()
            .map(|r| {
                (!r.is_eq).then(|| {
                    cols.push(ColKind::Surplus);
                    cols.len() - 1
                })
            })
            .collect();
        let art_col: Vec<usize> = rows
            .iter()
            .map(|_| {
                cols.push(ColKind::Artificial);
                cols.len() - 1
            })
            .collect();
        let width = cols.len() + 1;
        let mut t = Vec::with_capacity(rows.len());
        let mut flip = Vec::with_capacity(rows.len());
        for (i, r) in rows.iter().enumerate() {
            let mut e = vec![Rational::zero(); width];
            for (k, col) in cols[..n_struct].iter().enumerate() {
                if let ColKind::Structural { var, positive } = *col {
                    let a = &r.coeffs[var];
                    e[k] = if positive { a.clone() } else { -a };
                }
            }
            if let Some(s) = surplus_of[i] {
                e[s] = -Rational::one();
            }
            let shift: Rational = r.coeffs.iter().zip(&offset).map(|(a, o)| a * o).sum();
            e[width - 1] = &r.rhs - &shift;
            let flipped = e[width - 1].is_negative();
            if flipped {
                for x in e.iter_mut() {
                    *x = -&*x;
                }
            }
            e[art_col[i]] = Rational::one();
            t.push(e);
            flip.push(flipped);
        }
        let mut z = vec![Rational::zero(); width];
        for &a in &art_col {
            z[a] = Rational::one();
        }
        for row in &t {
            for (zk, x) in z.iter_mut().zip(row) {
                *zk -= x;
            }
        }
        let allowed = vec![true; cols.len()];
        Simplex {
            n_vars: n,
            basis: art_col.clone(),
            rows,
            cols,
            offset,
            t,
            z,
            flip,
            art_col,
            allowed,
            early,
        }
    }

    fn rhs(&self) -> usize {
        self.cols.len()
    }

    fn pivot(&mut self, r: usize, k: usize) {
        let inv = self.t[r][k].recip().expect("pivot entry is nonzero");
        for x in self.t[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[k].is_zero() {
                continue;
            }
            let f = row[k].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &(&f * p);
                }
            }
        }
        if !self.z[k].is_zero() {
            let f = self.z[k].clone();
            for (x, p) in self.z.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &(&f * p);
                }
            }
        }
        self.basis[r] = k;
    }

    /// Bland's rule: lowest-index improving column enters, ratio ties leave
    /// by lowest basic index.
    fn iterate(&mut self) -> Outcome {
        let rhs = self.rhs();
        loop {
            let entering =
                (0..self.cols.len()).find(|&k| self.allowed[k] && self.z[k].is_negative());
            let Some(k) = entering else {
                return Outcome::Optimal;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.t.len() {
                let a = &self.t[i][k];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.t[i][rhs] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, k),
                None => return Outcome::Unbounded(k),
            }
        }
    }

    fn column_values(&self) -> Vec<Rational> {
        let rhs = self.rhs();
        let mut v = vec![Rational::zero(); self.cols.len()];
        for (i, &b) in self.basis.iter().enumerate() {
            v[b] = self.t[i][rhs].clone();
        }
        v
    }

    fn to_point(&self, colvals: &[Rational], with_offset: bool) -> Vector {
        let mut x = if with_offset {
            self.offset.clone()
        } else {
            vec![Rational::zero(); self.n_vars]
        };
        for (k, col) in self.cols.iter().enumerate() {
            if let ColKind::Structural { var, positive } = *col {
                if colvals[k].is_zero() {
                    continue;
                }
                if positive {
                    x[var] += &colvals[k];
                } else {
                    x[var] -= &colvals[k];
                }
            }
        }
        Vector::new(x)
    }

    fn certificate(&self, p: &LpProblem) -> Certificate {
        let n = self.n_vars;
        let mut cert = Certificate {
            constraints: vec![Rational::zero(); p.constraints.len()],
            lower: vec![Rational::zero(); n],
            upper: vec![Rational::zero(); n],
        };
        let mut g = vec![Rational::zero(); n];
        for (i, row) in self.rows.iter().enumerate() {
            let y = Rational::one() - &self.z[self.art_col[i]];
            let w = if self.flip[i] { -y } else { y };
            if w.is_zero() {
                continue;
            }
            for (gj, a) in g.iter_mut().zip(row.coeffs.iter()) {
                *gj += &(&w * a);
            }
            match row.origin {
                RowOrigin::Constraint(c) => cert.constraints[c] = w,
                RowOrigin::Upper(j) => cert.upper[j] = w,
            }
        }
        for (j, b) in p.bounds.iter().enumerate() {
            match (&b.lower, &b.upper) {
                (Some(_), _) => cert.lower[j] = -&g[j],
                (None, Some(_)) => cert.upper[j] = g[j].clone(),
                (None, None) => {}
            }
        }
        cert
    }

    fn run(mut self, p: &LpProblem) -> LpResult {
        if let Some(r) = self.early.take() {
            return r;
        }
        let rhs = self.rhs();
        // Phase one always has an optimum: the objective is bounded below by 0.
        self.iterate();
        if self.z[rhs].is_negative() {
            let certificate = self.certificate(p);
            debug_assert!(p.verify_certificate(&certificate), "phase one certificate");
            return LpResult::Infeasible { certificate };
        }
        if p.objective.is_none() {
            let point = self.to_point(&self.column_values(), true);
            return LpResult::Feasible { point };
        }

        let is_art = |k: usize, cols: &[ColKind]| matches!(cols[k], ColKind::Artificial);
        let mut i = 0;
        while i < self.t.len() {
            if is_art(self.basis[i], &self.cols) {
                let k = (0..self.cols.len())
                    .find(|&k| !is_art(k, &self.cols) && !self.t[i][k].is_zero());
                match k {
                    Some(k) => self.pivot(i, k),
                    None => {
                        // Redundant row: it is a combination of the others.
                        self.t.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        for (k, col) in self.cols.iter().enumerate() {
            self.allowed[k] = !matches!(col, ColKind::Artificial);
        }

        let obj = p.objective.as_ref().expect("checked above");
        let sign = match obj.sense {
            Sense::Minimize => Rational::one(),
            Sense::Maximize => -Rational::one(),
        };
        let cost: Vec<Rational> = self
            .cols
            .iter()
            .map(|col| match *col {
                ColKind::Structural { var, positive } => {
                    let c = &obj.coeffs[var] * &sign;
                    if positive {
                        c
                    } else {
                        -c
                    }
                }
                _ => Rational::zero(),
            })
            .collect();
        let mut z = cost.clone();
        z.push(Rational::zero());
        for (i, row) in self.t.iter().enumerate() {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (zk, x) in z.iter_mut().zip(row) {
                *zk -= &(cb * x);
            }
        }
        self.z = z;

        match self.iterate() {
            Outcome::Optimal => {
                let point = self.to_point(&self.column_values(), true);
                let value = obj.coeffs.dot(&point).expect("dimension checked");
                LpResult::Optimal { point, value }
            }
            Outcome::Unbounded(k) => {
                let point = self.to_point(&self.column_values(), true);
                let mut dir = vec![Rational::zero(); self.cols.len()];
                dir[k] = Rational::one();
                for (i, &b) in self.basis.iter().enumerate() {
                    dir[b] = -&self.t[i][k];
                }
                let ray = self.to_point(&dir, false);
                LpResult::Unbounded { point, ray }
            }
        }
    }
}

/// Multipliers proving that a strict homogeneous system has no solution:
/// `sum y_s s - sum y_t t + sum y_w w = 0` with all `y >= 0` and
/// `sum y_s > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneousCertificate {
    pub strict: Vec<Rational>,
    pub nonpos: Vec<Rational>,
    pub nonneg: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Homogeneous {
    Solvable(Vector),
    Unsolvable(HomogeneousCertificate),
}

impl Homogeneous {
    pub fn witness(&self) -> Option<&Vector> {
        match self {
            Homogeneous::Solvable(x) => Some(x),
            Homogeneous::Unsolvable(_) => None,
        }
    }

    pub fn certificate(&self) -> Option<&HomogeneousCertificate> {
        match self {
            Homogeneous::Solvable(_) => None,
            Homogeneous::Unsolvable(c) => Some(c),
        }
    }
}

/// The three row families of a homogeneous system in a fixed dimension.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HomogeneousSystem {
    pub strict: Vec<Vector>,
    pub nonpos: Vec<Vector>,
    pub nonneg: Vec<Vector>,
}

impl HomogeneousSystem {
    pub fn is_solution(&self, x: &Vector) -> bool {
        let dot = |r: &Vector| r.dot(x).ok();
        self.strict
            .iter()
            .all(|r| dot(r).is_some_and(|v| v.is_positive()))
            && self
                .nonpos
                .iter()
                .all(|r| dot(r).is_some_and(|v| !v.is_positive()))
            && self
                .nonneg
                .iter()
                .all(|r| dot(r).is_some_and(|v| !v.is_negative()))
    }

    pub fn verify_certificate(&self, c: &HomogeneousCertificate, dim: usize) -> bool {
        if c.strict.len() != self.strict.len()
            || c.nonpos.len() != self.nonpos.len()
            || c.nonneg.len() != self.nonneg.len()
        {
            return false;
        }
        let all = c.strict.iter().chain(&c.nonpos).chain(&c.nonneg);
        if all.clone().any(Rational::is_negative) {
            return false;
        }
        let total: Rational = c.strict.iter().sum();
        if !total.is_positive() {
            return false;
        }
        let signed: Vec<Rational> = c
            .strict
            .iter()
            .cloned()
            .chain(c.nonpos.iter().map(|y| -y))
            .chain(c.nonneg.iter().cloned())
            .collect();
        let rows: Vec<Vector> = self
            .strict
            .iter()
            .chain(&self.nonpos)
            .chain(&self.nonneg)
            .cloned()
            .collect();
        Vector::combination(dim, &signed, &rows).is_ok_and(|v| v.is_zero())
    }

    pub fn verify(&self, result: &Homogeneous, dim: usize) -> bool {
        match result {
            Homogeneous::Solvable(x) => x.dim() == dim && self.is_solution(x),
            Homogeneous::Unsolvable(c) => self.verify_certificate(c, dim),
        }
    }

    pub fn solve(&self, dim: usize) -> Result<Homogeneous> {
        strict_homogeneous_feasible(&self.strict, &self.nonpos, &self.nonneg, dim)
    }
}

/// Finds `x` with `s.x > 0`, `t.x <= 0`, `w.x >= 0` for the given rows.
///
/// Homogeneity lets every strict row be replaced by `s.x >= 1`, which keeps
/// the problem a plain LP; the phase one multipliers of that LP are the
/// alternative-theorem certificate.
pub fn strict_homogeneous_feasible(
    strict: &[Vector],
    nonpos: &[Vector],
    nonneg: &[Vector],
    dim: usize,
) -> Result<Homogeneous> {
    let mut p = LpProblem::new(dim);
    for s in strict {
        p.add(Constraint::ge(s.clone(), Rational::one()))?;
    }
    for t in nonpos {
        p.add(Constraint::le(t.clone(), Rational::zero()))?;
    }
    for w in nonneg {
        p.add(Constraint::ge(w.clone(), Rational::zero()))?;
    }
    Ok(match p.solve() {
        LpResult::Feasible { point } => Homogeneous::Solvable(point),
        LpResult::Infeasible { certificate } => {
            let (a, rest) = certificate.constraints.split_at(strict.len());
            let (b, c) = rest.split_at(nonpos.len());
            Homogeneous::Unsolvable(HomogeneousCertificate {
                strict: a.to_vec(),
                nonpos: b.to_vec(),
                nonneg: c.to_vec(),
            })
        }
        other => unreachable!("feasibility problem returned {other:?}"),
    })
}

/// An affine margin row `coeffs.x + constant`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarginRow {
    pub coeffs: Vector,
    pub constant: Rational,
}

impl MarginRow {
    pub fn linear(coeffs: Vector) -> Self {
        MarginRow {
            coeffs,
            constant: Rational::zero(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Margin {
    /// `margin` is the largest `t <= cap` such that every row is `>= t`.
    Optimal {
        margin: Rational,
        point: Vector,
    },
    BaseInfeasible(Certificate),
}

impl Margin {
    /// The strict system is solvable iff the optimal margin is positive.
    pub fn strictly_feasible(&self) -> bool {
        matches!(self, Margin::Optimal { margin, .. } if margin.is_positive())
    }
}

/// Maximises the smallest margin row over the feasible set of `base`,
/// capped at `cap`. Used for strict systems that are not homogeneous.
pub fn max_margin(base: &LpProblem, rows: &[MarginRow], cap: &Rational) -> Result<Margin> {
    if base.objective.is_some() {
        return Err(Error::Precondition(
            "base problem must not carry an objective".into(),
        ));
    }
    if !cap.is_positive() {
        return Err(Error::Precondition("margin cap must be positive".into()));
    }
    let n = base.n_vars;
    let widen = |v: &Vector, last: Rational| {
        let mut e = v.entries().to_vec();
        e.push(last);
        Vector::new(e)
    };
    let mut p = LpProblem::new(n + 1);
    for c in &base.constraints {
        p.add(Constraint::new(
            widen(&c.coeffs, Rational::zero()),
            c.relation,
            c.rhs.clone(),
        ))?;
    }
    for (j, b) in base.bounds.iter().enumerate() {
        p.set_bounds(j, b.lower.clone(), b.upper.clone())?;
    }
    for r in rows {
        check_dim(n, r.coeffs.dim())?;
        p.add(Constraint::ge(
            widen(&r.coeffs, -Rational::one()),
            -&r.constant,
        ))?;
    }
    p.set_bounds(n, None, Some(cap.clone()))?;
    p.maximize(Vector::unit(n + 1, n))?;
    Ok(match p.solve() {
        LpResult::Optimal { point, value } => {
            let x = Vector::new(point.entries()[..n].to_vec());
            Margin::Optimal {
                margin: value,
                point: x,
            }
        }
        LpResult::Infeasible { certificate } => {
            // Margin rows can never be to blame (t is free below), so their
            // multipliers vanish and the base part stands on its own.
            let m = base.constraints.len();
            Margin::BaseInfeasible(Certificate {
                constraints: certificate.constraints[..m].to_vec(),
                lower: certificate.lower[..n].to_vec(),
                upper: certificate.upper[..n].to_vec(),
            })
        }
        other => unreachable!("capped margin problem returned {other:?}"),
    })
}
