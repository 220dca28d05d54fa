//! Brute-force oracle for sets of desirable option sets over the coin space
//! with the pointwise background. Everything is integer geometry in the
//! plane: cone membership by Cramer's rule, and Archimedean refutation by
//! trying envelopes built from a grid of positive functionals.

use choice_core::choice::OptionSet;
use choice_core::Vector;
use rand::Rng;

pub type P = (i64, i64);

const E: [P; 2] = [(1, 0), (0, 1)];

fn cross(a: P, b: P) -> i64 {
    a.0 * b.1 - a.1 * b.0
}

fn dot(a: P, b: P) -> i64 {
    a.0 * b.0 + a.1 * b.1
}

/// Is the nonzero `u` a nonnegative combination of `w`?
pub fn in_cone(w: &[P], u: P) -> bool {
    for (i, &a) in w.iter().enumerate() {
        if cross(a, u) == 0 && dot(a, u) > 0 {
            return true;
        }
        for &b in &w[i + 1..] {
            let det = cross(a, b);
            if det != 0 && cross(u, b) * det >= 0 && cross(a, u) * det >= 0 {
                return true;
            }
        }
    }
    false
}

/// Is 0 a nontrivial nonnegative combination of `w`?
pub fn zero_in_posi(w: &[P]) -> bool {
    let n = w.len();
    for i in 0..n {
        if w[i] == (0, 0) {
            return true;
        }
        for j in i + 1..n {
            if cross(w[i], w[j]) == 0 && dot(w[i], w[j]) < 0 {
                return true;
            }
            for k in j + 1..n {
                let s = [cross(w[i], w[j]), cross(w[j], w[k]), cross(w[k], w[i])];
                if s.iter().all(|&x| x > 0) || s.iter().all(|&x| x < 0) {
                    return true;
                }
            }
        }
    }
    false
}

fn selections(sets: &[Vec<P>]) -> Vec<Vec<P>> {
    let mut out = vec![Vec::new()];
    for s in sets {
        out = out
            .into_iter()
            .flat_map(|pre| {
                s.iter().map(move |&u| {
                    let mut next = pre.clone();
                    next.push(u);
                    next
                })
            })
            .collect();
    }
    out
}

fn consistent_cones(sets: &[Vec<P>]) -> Vec<Vec<P>> {
    selections(sets)
        .into_iter()
        .map(|mut s| {
            s.extend(E);
            s
        })
        .filter(|w| !zero_in_posi(w))
        .collect()
}

pub fn consistent(sets: &[Vec<P>]) -> bool {
    !consistent_cones(sets).is_empty()
}

/// Closure membership: every consistent selection cone meets `b`.
pub fn member(sets: &[Vec<P>], b: &[P]) -> bool {
    let b: Vec<P> = b.iter().copied().filter(|&u| u != (0, 0)).collect();
    if b.is_empty() {
        return false;
    }
    consistent_cones(sets)
        .iter()
        .all(|w| b.iter().any(|&u| in_cone(w, u)))
}

/// Searches envelopes `min_v c_v` with one grid functional per option of
/// `b`: each must be nonpositive at its option while every assessed set
/// keeps an option on which all of them are positive.
pub fn refutes(sets: &[Vec<P>], b: &[P], resolution: i64) -> Option<Vec<P>> {
    let grid: Vec<P> = (1..=resolution)
        .flat_map(|a| (1..=resolution).map(move |c| (a, c)))
        .collect();
    let b: Vec<P> = b.iter().copied().filter(|&u| u != (0, 0)).collect();
    let choices: Vec<Vec<P>> = b
        .iter()
        .map(|&v| grid.iter().copied().filter(|&c| dot(c, v) <= 0).collect())
        .collect();
    if choices.iter().any(Vec::is_empty) {
        return None;
    }
    let mut idx = vec![0usize; b.len()];
    loop {
        let pieces: Vec<P> = idx.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
        let ok = sets
            .iter()
            .all(|a| a.iter().any(|&u| pieces.iter().all(|&c| dot(c, u) > 0)));
        if ok {
            return Some(pieces);
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return None;
            }
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

pub fn to_p(v: &Vector) -> P {
    let get = |i: usize| {
        assert!(v[i] == v[i].ceil(), "oracle expects integer options");
        i64::try_from(v[i].numer()).unwrap()
    };
    (get(0), get(1))
}

pub fn to_vector(p: P) -> Vector {
    Vector::from_ints(&[p.0, p.1])
}

pub fn random_point(rng: &mut impl Rng, r: i64) -> P {
    (rng.gen_range(-r..=r), rng.gen_range(-r..=r))
}

/// One to three assessed sets of one to two nonzero options each.
pub fn random_assessment(rng: &mut impl Rng, r: i64) -> Vec<Vec<P>> {
    let n = rng.gen_range(1..=3);
    (0..n)
        .map(|_| {
            let m = rng.gen_range(1..=2);
            let mut s: Vec<P> = Vec::new();
            while s.len() < m {
                let p = random_point(rng, r);
                if p != (0, 0) && !s.contains(&p) {
                    s.push(p);
                }
            }
            s
        })
        .collect()
}

pub fn option_sets(sets: &[Vec<P>]) -> Vec<OptionSet> {
    sets.iter()
        .map(|s| OptionSet::new(s.iter().map(|&p| to_vector(p)).collect()).unwrap())
        .collect()
}
