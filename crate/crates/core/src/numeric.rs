//! Exact rationals, dense option vectors and a little Gaussian elimination.
//!
//! Everything downstream reasons about signs (`> 0`, `= 0`), so nothing here
//! ever rounds. [`Rational`] is a thin newtype over an arbitrary precision
//! `BigRational` that adds the textual `p/q` format used by model files.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Index, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{check_dim, Error, Result};

/// An exact rational number, always stored in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// `num / den`, failing when `den` is zero.
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(BigRational::new(num.into(), den.into())))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(BigRational::new(num, den)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn checked_div(&self, other: &Rational) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(&self.0 / &other.0))
    }

    pub fn recip(&self) -> Result<Self> {
        Rational::one().checked_div(self)
    }

    /// Smallest integer that is `>= self`.
    pub fn ceil(&self) -> Self {
        Rational(self.0.ceil())
    }

    pub fn min(self, other: Rational) -> Rational {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Rational) -> Rational {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational::from_integer(n.into())
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `[-]p` and `[-]p/q` with `q > 0`; `2/4` reduces to `1/2`.
    fn from_str(s: &str) -> Result<Self> {
        let err = || Error::Parse(s.to_string());
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (p, q) = match body.split_once('/') {
            Some((p, q)) => (p, Some(q)),
            None => (body, None),
        };
        if !digits(p) || q.is_some_and(|q| !digits(q)) {
            return Err(err());
        }
        let mut num: BigInt = p.parse().map_err(|_| err())?;
        if neg {
            num = -num;
        }
        let den: BigInt = match q {
            Some(q) => q.parse().map_err(|_| err())?,
            None => BigInt::one(),
        };
        if den.is_zero() {
            return Err(err());
        }
        Ok(Rational(BigRational::new(num, den)))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(&self.0 $op &rhs.0)
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0 $op rhs.0)
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0 $op &rhs.0)
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(&self.0 $op rhs.0)
            }
        }
    };
}

forward_binop!(Add, add, +);
forward_binop!(Sub, sub, -);
forward_binop!(Mul, mul, *);
// Panics on a zero divisor, like integer division; use `checked_div` when the
// divisor is not known to be nonzero.
forward_binop!(Div, div, /);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        self.0 *= &rhs.0;
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

/// A dense vector of rationals: an option, a functional's coefficients or an
/// LP point. Ordering is lexicographic, which gives option sets a canonical
/// order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Vector(Vec<Rational>);

impl Vector {
    pub fn new(entries: Vec<Rational>) -> Self {
        Vector(entries)
    }

    pub fn from_ints(entries: &[i64]) -> Self {
        Vector(entries.iter().map(|&n| Rational::from_integer(n)).collect())
    }

    /// Parses every entry with [`Rational::from_str`].
    pub fn parse<S: AsRef<str>>(entries: &[S]) -> Result<Self> {
        entries
            .iter()
            .map(|s| s.as_ref().parse())
            .collect::<Result<Vec<_>>>()
            .map(Vector)
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(vec![Rational::zero(); dim])
    }

    pub fn ones(dim: usize) -> Self {
        Vector(vec![Rational::one(); dim])
    }

    /// The `i`-th standard basis vector of `R^dim`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Vector::zeros(dim);
        v.0[i] = Rational::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }

    pub fn add(&self, other: &Vector) -> Result<Vector> {
        check_dim(self.dim(), other.dim())?;
        Ok(Vector(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        check_dim(self.dim(), other.dim())?;
        Ok(Vector(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn scale(&self, c: &Rational) -> Vector {
        Vector(self.0.iter().map(|a| a * c).collect())
    }

    pub fn neg(&self) -> Vector {
        Vector(self.0.iter().map(|a| -a).collect())
    }

    pub fn dot(&self, other: &Vector) -> Result<Rational> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    /// `max_i |v_i|`, zero for the empty vector.
    pub fn sup_norm(&self) -> Rational {
        self.0
            .iter()
            .map(Rational::abs)
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// `sum_i |v_i|`, the dual norm of the sup-norm.
    pub fn l1_norm(&self) -> Rational {
        self.0.iter().map(Rational::abs).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Rational::is_zero)
    }

    pub fn all_positive(&self) -> bool {
        self.0.iter().all(Rational::is_positive)
    }

    pub fn all_nonneg(&self) -> bool {
        self.0.iter().all(|x| !x.is_negative())
    }

    /// Sign of the first nonzero entry, `Equal` for the zero vector.
    pub fn lex_sign(&self) -> Ordering {
        for x in &self.0 {
            if x.is_positive() {
                return Ordering::Greater;
            }
            if x.is_negative() {
                return Ordering::Less;
            }
        }
        Ordering::Equal
    }

    /// `sum_k w_k v_k`; all vectors must have dimension `dim`.
    pub fn combination(dim: usize, weights: &[Rational], vectors: &[Vector]) -> Result<Vector> {
        check_dim(weights.len(), vectors.len())?;
        let mut acc = Vector::zeros(dim);
        for (w, v) in weights.iter().zip(vectors) {
            check_dim(dim, v.dim())?;
            if w.is_zero() {
                continue;
            }
            for (a, x) in acc.0.iter_mut().zip(&v.0) {
                *a += &(w * x);
            }
        }
        Ok(acc)
    }
}

impl Index<usize> for Vector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl From<Vec<Rational>> for Vector {
    fn from(entries: Vec<Rational>) -> Self {
        Vector(entries)
    }
}

impl FromIterator<Rational> for Vector {
    fn from_iter<I: IntoIterator<Item = Rational>>(iter: I) -> Self {
        Vector(iter.into_iter().collect())
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Reduced row echelon form of `rows` (each of length `dim`), returning the
/// nonzero rows and their pivot columns.
fn rref(rows: &[Vector], dim: usize) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let mut m: Vec<Vec<Rational>> = rows.iter().map(|r| r.0.clone()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..dim {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip().expect("pivot is nonzero");
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let (src, dst) = if i < r {
                    let (a, b) = m.split_at_mut(r);
                    (&b[0], &mut a[i])
                } else {
                    let (a, b) = m.split_at_mut(i);
                    (&a[r], &mut b[0])
                };
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    *d -= &(&f * s);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

/// Rank of the row set.
pub fn rank(rows: &[Vector]) -> usize {
    match rows.first() {
        Some(first) => rref(rows, first.dim()).1.len(),
        None => 0,
    }
}

/// A basis of `{x in R^dim : r . x = 0 for every row r}`.
pub fn nullspace(rows: &[Vector], dim: usize) -> Vec<Vector> {
    let (m, pivots) = rref(rows, dim);
    let mut basis = Vec::new();
    for free in (0..dim).filter(|c| !pivots.contains(c)) {
        let mut x = Vector::zeros(dim);
        x.0[free] = Rational::one();
        for (row, &p) in m.iter().zip(&pivots) {
            x.0[p] = -&row[free];
        }
        basis.push(x);
    }
    basis
}

/// Some solution of `rows . x = rhs`, or `None` when the system is
/// inconsistent. Free variables are set to zero.
pub fn solve(rows: &[Vector], rhs: &[Rational], dim: usize) -> Result<Option<Vector>> {
    check_dim(rows.len(), rhs.len())?;
    let augmented: Vec<Vector> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            check_dim(dim, r.dim())?;
            let mut e = r.0.clone();
            e.push(b.clone());
            Ok(Vector(e))
        })
        .collect::<Result<_>>()?;
    let (m, pivots) = rref(&augmented, dim + 1);
    if pivots.last() == Some(&dim) {
        return Ok(None);
    }
    let mut x = Vector::zeros(dim);
    for (row, &p) in m.iter().zip(&pivots) {
        x.0[p] = row[dim].clone();
    }
    Ok(Some(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(q("1/3") + q("1/6"), q("1/2"));
        let a = Vector::from_ints(&[1, -1]);
        let b = Vector::parse(&["1/2", "1/2"]).unwrap();
        assert!(a.dot(&b).unwrap().is_zero());
        assert_eq!(Vector::from_ints(&[3, -5]).sup_norm(), q("5"));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(q("2/4").to_string(), "1/2");
        assert_eq!(q("-6/3").to_string(), "-2");
        assert_eq!(q("0").to_string(), "0");
        for bad in [
            "1/0", "", "-", "1/", "/2", "1/-2", "+1", "1.5", " 1", "--1", "0x1",
        ] {
            assert!(bad.parse::<Rational>().is_err(), "{bad:?} should not parse");
        }
        assert_eq!(Rational::new(1, 0), Err(Error::DivisionByZero));
        assert_eq!(
            q("1").checked_div(&Rational::zero()),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn dimension_checks() {
        let a = Vector::from_ints(&[1, 2]);
        let b = Vector::from_ints(&[1, 2, 3]);
        assert_eq!(
            a.dot(&b),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        );
        assert!(a.add(&b).is_err());
        assert!(a.sub(&b).is_err());
    }

    #[test]
    fn nullspace_and_solve() {
        let rows = vec![Vector::from_ints(&[1, 1, 0])];
        let ns = nullspace(&rows, 3);
        assert_eq!(ns.len(), 2);
        for z in &ns {
            assert!(rows[0].dot(z).unwrap().is_zero());
        }
        assert_eq!(rank(&ns), 2);
        let rows = vec![Vector::from_ints(&[1, 1]), Vector::from_ints(&[1, -1])];
        let x = solve(&rows, &[q("3"), q("1")], 2).unwrap().unwrap();
        assert_eq!(x, Vector::from_ints(&[2, 1]));
        let rows = vec![Vector::from_ints(&[1, 1]), Vector::from_ints(&[2, 2])];
        assert_eq!(solve(&rows, &[q("1"), q("3")], 2).unwrap(), None);
    }

    #[test]
    fn lex_sign() {
        assert_eq!(Vector::from_ints(&[0, 2, -1]).lex_sign(), Ordering::Greater);
        assert_eq!(Vector::from_ints(&[0, -2, 1]).lex_sign(), Ordering::Less);
        assert_eq!(Vector::zeros(3).lex_sign(), Ordering::Equal);
    }
}
