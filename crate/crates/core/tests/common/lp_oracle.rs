//! Brute-force LP oracle for 1-3 variables: enumerate every vertex and every
//! extreme ray of the recession cone by intersecting constraint hyperplanes.
//! It has its own elimination routine so it shares no code with the solver
//! beyond the rational type.

use choice_core::lp::{LpProblem, Relation, Sense};
use choice_core::{Rational, Vector};
use rand::Rng;

use super::rng::int;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Infeasible,
    Feasible,
    Optimal(Rational),
    Unbounded,
}

struct Row {
    a: Vec<Rational>,
    rel: Relation,
    b: Rational,
}

fn dot(a: &[Rational], x: &[Rational]) -> Rational {
    a.iter().zip(x).map(|(p, q)| p * q).sum()
}

fn holds(rel: Relation, lhs: &Rational, rhs: &Rational) -> bool {
    match rel {
        Relation::Le => lhs <= rhs,
        Relation::Eq => lhs == rhs,
        Relation::Ge => lhs >= rhs,
    }
}

/// Row-reduces `[m | rhs]` and returns (solution if unique, nullspace basis
/// of the homogeneous part, consistent?).
fn eliminate(
    m: &[Vec<Rational>],
    rhs: &[Rational],
    n: usize,
) -> (bool, Vec<Rational>, Vec<Vec<Rational>>) {
    let mut rows: Vec<Vec<Rational>> = m
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut e = r.clone();
            e.push(b.clone());
            e
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip().unwrap();
        rows[r] = rows[r].iter().map(|x| x * &inv).collect();
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                let pr = rows[r].clone();
                rows[i] = rows[i]
                    .iter()
                    .zip(&pr)
                    .map(|(x, y)| x - &(&f * y))
                    .collect();
            }
        }
        pivots.push(c);
        r += 1;
    }
    let consistent = rows[r..].iter().all(|row| row[n].is_zero());
    let mut x = vec![Rational::zero(); n];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = rows[i][n].clone();
    }
    let mut null = Vec::new();
    for f in (0..n).filter(|c| !pivots.contains(c)) {
        let mut z = vec![Rational::zero(); n];
        z[f] = Rational::one();
        for (i, &p) in pivots.iter().enumerate() {
            z[p] = -&rows[i][f];
        }
        null.push(z);
    }
    (consistent, x, null)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub fn solve(p: &LpProblem) -> Status {
    let n = p.n_vars();
    let mut rows: Vec<Row> = p
        .constraints()
        .iter()
        .map(|c| Row {
            a: c.coeffs.entries().to_vec(),
            rel: c.relation,
            b: c.rhs.clone(),
        })
        .collect();
    for (j, b) in p.bounds().iter().enumerate() {
        let e: Vec<Rational> = (0..n)
            .map(|i| {
                if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        if let Some(l) = &b.lower {
            rows.push(Row {
                a: e.clone(),
                rel: Relation::Ge,
                b: l.clone(),
            });
        }
        if let Some(u) = &b.upper {
            rows.push(Row {
                a: e,
                rel: Relation::Le,
                b: u.clone(),
            });
        }
    }
    // Quotient out the lineality space so that the polyhedron is pointed.
    let a: Vec<Vec<Rational>> = rows.iter().map(|r| r.a.clone()).collect();
    let zero_rhs = vec![Rational::zero(); a.len()];
    let (_, _, lineality) = eliminate(&a, &zero_rhs, n);
    let mut all: Vec<Row> = rows;
    for k in &lineality {
        all.push(Row {
            a: k.clone(),
            rel: Relation::Eq,
            b: Rational::zero(),
        });
    }
    let feasible = |x: &[Rational]| all.iter().all(|r| holds(r.rel, &dot(&r.a, x), &r.b));

    let mut vertices = Vec::new();
    for s in subsets(all.len(), n) {
        let m: Vec<Vec<Rational>> = s.iter().map(|&i| all[i].a.clone()).collect();
        let b: Vec<Rational> = s.iter().map(|&i| all[i].b.clone()).collect();
        let (ok, x, null) = eliminate(&m, &b, n);
        if ok && null.is_empty() && feasible(&x) {
            vertices.push(x);
        }
    }
    if n == 0 {
        vertices.push(Vec::new());
    }
    if vertices.is_empty() {
        return Status::Infeasible;
    }
    let Some(obj) = p.objective() else {
        return Status::Feasible;
    };
    let c = obj.coeffs.entries();
    let improving = |d: &[Rational]| {
        let g = dot(c, d);
        match obj.sense {
            Sense::Maximize => g.is_positive(),
            Sense::Minimize => g.is_negative(),
        }
    };
    if lineality.iter().any(|k| !dot(c, k).is_zero()) {
        return Status::Unbounded;
    }
    let recedes = |d: &[Rational]| {
        all.iter()
            .all(|r| holds(r.rel, &dot(&r.a, d), &Rational::zero()))
    };
    for s in subsets(all.len(), n.saturating_sub(1)) {
        let m: Vec<Vec<Rational>> = s.iter().map(|&i| all[i].a.clone()).collect();
        let (_, _, null) = eliminate(&m, &vec![Rational::zero(); m.len()], n);
        if null.len() != 1 {
            continue;
        }
        for d in [null[0].clone(), null[0].iter().map(|x| -x).collect()] {
            if recedes(&d) && improving(&d) {
                return Status::Unbounded;
            }
        }
    }
    let values = vertices.iter().map(|x| dot(c, x));
    let best = match obj.sense {
        Sense::Maximize => values.max(),
        Sense::Minimize => values.min(),
    };
    Status::Optimal(best.unwrap())
}

/// A random problem in 2 or 3 variables with small integer data.
pub fn random_problem(rng: &mut impl Rng) -> LpProblem {
    let n = rng.gen_range(2..=3);
    let mut p = LpProblem::new(n);
    for _ in 0..rng.gen_range(1..=5) {
        let a: Vector = (0..n).map(|_| int(rng, -3, 3)).collect();
        let rel = match rng.gen_range(0..7) {
            0 => Relation::Eq,
            1..=3 => Relation::Le,
            _ => Relation::Ge,
        };
        p.push(a, rel, int(rng, -4, 4)).unwrap();
    }
    for j in 0..n {
        match rng.gen_range(0..6) {
            0 => p.set_bounds(j, Some(int(rng, -3, 1)), None).unwrap(),
            1 => p.set_bounds(j, None, Some(int(rng, -1, 3))).unwrap(),
            2 => p
                .set_bounds(j, Some(int(rng, -3, 1)), Some(int(rng, -1, 3)))
                .unwrap(),
            _ => {}
        }
    }
    if rng.gen_range(0..5) > 0 {
        let c: Vector = (0..n).map(|_| int(rng, -3, 3)).collect();
        if rng.gen_bool(0.5) {
            p.maximize(c).unwrap();
        } else {
            p.minimize(c).unwrap();
        }
    }
    p
}

pub fn status_of(r: &choice_core::lp::LpResult) -> Status {
    use choice_core::lp::LpResult;
    match r {
        LpResult::Feasible { .. } => Status::Feasible,
        LpResult::Optimal { value, .. } => Status::Optimal(value.clone()),
        LpResult::Infeasible { .. } => Status::Infeasible,
        LpResult::Unbounded { .. } => Status::Unbounded,
    }
}
