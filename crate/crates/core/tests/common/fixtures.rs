//! Running coin fixtures. Each cone comes with a membership formula worked
//! out by hand from its geometric description, plus the flags it is known
//! to have; the formula never touches the solver.

use choice_core::functional::LinearF;
use choice_core::{Background, DesirCone, OptionSpace, Rational, Vector};

pub fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

pub fn vq(xs: &[&str]) -> Vector {
    Vector::parse(xs).unwrap()
}

pub fn vi(xs: &[i64]) -> Vector {
    Vector::from_ints(xs)
}

pub fn coin(bg: Background) -> OptionSpace {
    OptionSpace::with_unit_reference(2, bg).unwrap()
}

/// Expectation under "heads with probability p" on `(d(H), d(T))`.
pub fn expect(p: &Rational) -> LinearF {
    LinearF::new(Vector::new(vec![p.clone(), Rational::one() - p]))
}

pub fn expect_value(p: &Rational, u: &Vector) -> Rational {
    p * &u[0] + &(Rational::one() - p) * &u[1]
}

/// `{u : min(E_lo(u), E_hi(u)) > 0}`.
pub fn d_interval(bg: Background, lo: &Rational, hi: &Rational) -> DesirCone {
    DesirCone::open_dual(coin(bg), vec![expect(lo), expect(hi)]).unwrap()
}

/// The closed sector `{E_lo >= 0, E_hi >= 0}` without the origin, generated
/// by the two rays on which one of the expectations vanishes.
pub fn d_sector(bg: Background, lo: &Rational, hi: &Rational) -> DesirCone {
    let one = Rational::one();
    let g1 = Vector::new(vec![&one - lo, -lo.clone()]);
    let g2 = Vector::new(vec![-(&one - hi), hi.clone()]);
    DesirCone::posi(coin(bg), vec![g1, g2]).unwrap()
}

pub fn d_heads_lex() -> DesirCone {
    DesirCone::lex(
        coin(Background::Pointwise),
        vec![LinearF::from_ints(&[1, 0]), LinearF::from_ints(&[0, 1])],
    )
    .unwrap()
}

pub fn d_tails_lex() -> DesirCone {
    DesirCone::lex(
        coin(Background::Pointwise),
        vec![LinearF::from_ints(&[0, 1]), LinearF::from_ints(&[1, 0])],
    )
    .unwrap()
}

pub fn d_heads_strict() -> DesirCone {
    DesirCone::open_dual(coin(Background::Strict), vec![LinearF::from_ints(&[1, 0])]).unwrap()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Flags {
    pub coherent: bool,
    pub mixing: bool,
    pub arch_consistent: bool,
    pub essentially_archimedean: bool,
    pub archimedean: bool,
}

pub struct ConeFixture {
    pub name: &'static str,
    pub cone: DesirCone,
    pub oracle: fn(&Vector) -> bool,
    pub flags: Flags,
}

fn pos(x: &Rational) -> bool {
    x.is_positive()
}

fn nonneg(x: &Rational) -> bool {
    !x.is_negative()
}

fn interval_oracle(u: &Vector) -> bool {
    pos(&expect_value(&q("1/4"), u)) && pos(&expect_value(&q("3/4"), u))
}

fn sector_oracle(u: &Vector) -> bool {
    !u.is_zero() && nonneg(&expect_value(&q("1/4"), u)) && nonneg(&expect_value(&q("3/4"), u))
}

const ALL: Flags = Flags {
    coherent: true,
    mixing: true,
    arch_consistent: true,
    essentially_archimedean: true,
    archimedean: true,
};

/// Every cone fixture in the coin space.
pub fn cones() -> Vec<ConeFixture> {
    let (lo, hi) = (q("1/4"), q("3/4"));
    let closed = Flags {
        mixing: false,
        essentially_archimedean: false,
        ..ALL
    };
    let lex = Flags {
        arch_consistent: false,
        essentially_archimedean: false,
        archimedean: false,
        ..ALL
    };
    vec![
        ConeFixture {
            name: "interval/pointwise",
            cone: d_interval(Background::Pointwise, &lo, &hi),
            oracle: interval_oracle,
            flags: Flags {
                mixing: false,
                ..ALL
            },
        },
        ConeFixture {
            name: "interval/strict",
            cone: d_interval(Background::Strict, &lo, &hi),
            oracle: interval_oracle,
            flags: Flags {
                mixing: false,
                ..ALL
            },
        },
        ConeFixture {
            name: "fair/pointwise",
            cone: DesirCone::open_dual(coin(Background::Pointwise), vec![expect(&q("1/2"))])
                .unwrap(),
            oracle: |u| pos(&(&u[0] + &u[1])),
            flags: ALL,
        },
        ConeFixture {
            name: "fair/strict",
            cone: DesirCone::open_dual(coin(Background::Strict), vec![expect(&q("1/2"))]).unwrap(),
            oracle: |u| pos(&(&u[0] + &u[1])),
            flags: ALL,
        },
        ConeFixture {
            name: "sector/pointwise",
            cone: d_sector(Background::Pointwise, &lo, &hi),
            oracle: sector_oracle,
            flags: closed,
        },
        ConeFixture {
            name: "sector/strict",
            cone: d_sector(Background::Strict, &lo, &hi),
            oracle: sector_oracle,
            flags: closed,
        },
        ConeFixture {
            name: "heads/lex",
            cone: d_heads_lex(),
            oracle: |u| pos(&u[0]) || (u[0].is_zero() && pos(&u[1])),
            flags: lex,
        },
        ConeFixture {
            name: "tails/lex",
            cone: d_tails_lex(),
            oracle: |u| pos(&u[1]) || (u[1].is_zero() && pos(&u[0])),
            flags: lex,
        },
        ConeFixture {
            name: "heads/strict",
            cone: d_heads_strict(),
            oracle: |u| pos(&u[0]),
            flags: ALL,
        },
        ConeFixture {
            name: "bet/pointwise",
            cone: DesirCone::posi(coin(Background::Pointwise), vec![vi(&[1, -1])]).unwrap(),
            oracle: |u| !u.is_zero() && nonneg(&u[0]) && nonneg(&(&u[0] + &u[1])),
            flags: closed,
        },
        ConeFixture {
            name: "bet/strict",
            cone: DesirCone::posi(coin(Background::Strict), vec![vi(&[1, -1])]).unwrap(),
            oracle: |u| {
                (pos(&u[0]) && pos(&(&u[0] + &u[1]))) || (pos(&u[0]) && (&u[0] + &u[1]).is_zero())
            },
            flags: closed,
        },
        ConeFixture {
            name: "vacuous/pointwise",
            cone: DesirCone::vacuous(coin(Background::Pointwise)),
            oracle: |u| !u.is_zero() && u.all_nonneg(),
            flags: closed,
        },
        ConeFixture {
            name: "vacuous/strict",
            cone: DesirCone::vacuous(coin(Background::Strict)),
            oracle: |u| u.all_positive(),
            flags: Flags {
                mixing: false,
                ..ALL
            },
        },
        ConeFixture {
            name: "heads-edge/strict",
            cone: DesirCone::posi(coin(Background::Strict), vec![vi(&[1, 0])]).unwrap(),
            oracle: |u| pos(&u[0]) && nonneg(&u[1]),
            flags: closed,
        },
    ]
}

/// The 41 x 41 grid `{-2, -19/10, ..., 2}^2`.
pub fn grid() -> Vec<Vector> {
    let ticks: Vec<Rational> = (-20..=20).map(|k| Rational::new(k, 10).unwrap()).collect();
    let mut out = Vec::with_capacity(ticks.len() * ticks.len());
    for a in &ticks {
        for b in &ticks {
            out.push(Vector::new(vec![a.clone(), b.clone()]));
        }
    }
    out
}

/// Small integer options `{-r..r}^2`.
pub fn int_grid(r: i64) -> Vec<Vector> {
    let mut out = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            out.push(vi(&[a, b]));
        }
    }
    out
}
