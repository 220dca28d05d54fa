//! Horse lotteries and their embedding as options.
//!
//! A horse lottery assigns to every state a probability mass function over
//! a finite reward set. Strict preference `h > g` is encoded by the
//! difference `h - g`, whose rows sum to zero; dropping one reference reward
//! makes the encoding injective, so differences live in
//! `R^(|X| (|R| - 1))`.

use crate::cone::{Background, DesirCone, OptionSpace};
use crate::error::{check_dim, Error, Result};
use crate::numeric::{Rational, Vector};

/// State and reward names shared by a family of lotteries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LotteryFrame {
    states: Vec<String>,
    rewards: Vec<String>,
}

fn distinct(names: &[String], what: &str) -> Result<()> {
    for (i, a) in names.iter().enumerate() {
        if names[..i].contains(a) {
            return Err(Error::InvalidInput(format!("duplicate {what} name {a:?}")));
        }
    }
    Ok(())
}

impl LotteryFrame {
    pub fn new(states: Vec<String>, rewards: Vec<String>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidInput(
                "a lottery frame needs at least one state".into(),
            ));
        }
        if rewards.len() < 2 {
            return Err(Error::InvalidInput(
                "a lottery frame needs at least two rewards".into(),
            ));
        }
        distinct(&states, "state")?;
        distinct(&rewards, "reward")?;
        Ok(LotteryFrame { states, rewards })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn rewards(&self) -> &[String] {
        &self.rewards
    }

    /// Dimension of the embedded difference space.
    pub fn option_dim(&self) -> usize {
        self.states.len() * (self.rewards.len() - 1)
    }

    /// The difference space ordered coordinate-wise on the embedded
    /// coordinates. With two rewards this is the usual coin order; with
    /// more it is one of several possible orders, chosen because it keeps
    /// the background a product of half-lines.
    pub fn option_space(&self, background: Background) -> Result<OptionSpace> {
        OptionSpace::with_unit_reference(self.option_dim(), background)
    }

    pub fn reward_index(&self, name: &str) -> Result<usize> {
        self.rewards
            .iter()
            .position(|r| r == name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown reward {name:?}")))
    }

    pub fn state_index(&self, name: &str) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown state {name:?}")))
    }

    fn check_shape(&self, mass: &[Vec<Rational>]) -> Result<()> {
        check_dim(self.states.len(), mass.len())?;
        for row in mass {
            check_dim(self.rewards.len(), row.len())?;
        }
        Ok(())
    }

    /// `mass[x][r]`: every row must be a probability mass function.
    pub fn lottery(&self, mass: Vec<Vec<Rational>>) -> Result<HorseLottery> {
        self.check_shape(&mass)?;
        for (x, row) in mass.iter().enumerate() {
            if row.iter().any(Rational::is_negative) {
                return Err(Error::InvalidInput(format!(
                    "negative mass in state {:?}",
                    self.states[x]
                )));
            }
            let total: Rational = row.iter().sum();
            if total != Rational::one() {
                return Err(Error::InvalidInput(format!(
                    "masses in state {:?} sum to {total}, not 1",
                    self.states[x]
                )));
            }
        }
        Ok(HorseLottery {
            frame: self.clone(),
            mass,
        })
    }

    /// A lottery paying `reward` for sure in every state.
    pub fn constant(&self, reward: &str) -> Result<HorseLottery> {
        let r = self.reward_index(reward)?;
        let row: Vec<Rational> = (0..self.rewards.len())
            .map(|k| {
                if k == r {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        self.lottery(vec![row; self.states.len()])
    }

    /// Rows must sum to zero.
    pub fn diff_option(&self, mass: Vec<Vec<Rational>>) -> Result<DiffOption> {
        self.check_shape(&mass)?;
        for (x, row) in mass.iter().enumerate() {
            let total: Rational = row.iter().sum();
            if !total.is_zero() {
                return Err(Error::InvalidInput(format!(
                    "difference row for state {:?} sums to {total}, not 0",
                    self.states[x]
                )));
            }
        }
        Ok(DiffOption {
            frame: self.clone(),
            mass,
        })
    }

    /// Coordinates `d(x, r)` for every state `x` and every reward `r` other
    /// than the reference, states outermost.
    pub fn to_vector(&self, d: &DiffOption, reference_reward: &str) -> Result<Vector> {
        if d.frame != *self {
            return Err(Error::InvalidInput(
                "difference belongs to another frame".into(),
            ));
        }
        let skip = self.reward_index(reference_reward)?;
        let mut out = Vec::with_capacity(self.option_dim());
        for row in &d.mass {
            for (r, m) in row.iter().enumerate() {
                if r != skip {
                    out.push(m.clone());
                }
            }
        }
        Ok(Vector::new(out))
    }

    /// Inverse of [`to_vector`](LotteryFrame::to_vector): the reference mass
    /// is recovered from the zero row sums.
    pub fn from_vector(&self, v: &Vector, reference_reward: &str) -> Result<DiffOption> {
        check_dim(self.option_dim(), v.dim())?;
        let skip = self.reward_index(reference_reward)?;
        let k = self.rewards.len() - 1;
        let mass = (0..self.states.len())
            .map(|x| {
                let chunk = &v.entries()[x * k..(x + 1) * k];
                let mut row = Vec::with_capacity(k + 1);
                let mut it = chunk.iter();
                for r in 0..=k {
                    if r == skip {
                        row.push(-chunk.iter().sum::<Rational>());
                    } else {
                        row.push(it.next().expect("chunk has k entries").clone());
                    }
                }
                row
            })
            .collect();
        Ok(DiffOption {
            frame: self.clone(),
            mass,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HorseLottery {
    frame: LotteryFrame,
    mass: Vec<Vec<Rational>>,
}

/// A difference of lotteries, scaled; rows sum to zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiffOption {
    frame: LotteryFrame,
    mass: Vec<Vec<Rational>>,
}

impl HorseLottery {
    pub fn frame(&self) -> &LotteryFrame {
        &self.frame
    }

    pub fn mass(&self) -> &[Vec<Rational>] {
        &self.mass
    }

    /// `alpha h + (1 - alpha) other`.
    pub fn mix(&self, alpha: &Rational, other: &HorseLottery) -> Result<HorseLottery> {
        if self.frame != other.frame {
            return Err(Error::InvalidInput(
                "lotteries belong to different frames".into(),
            ));
        }
        if alpha.is_negative() || *alpha > Rational::one() {
            return Err(Error::Precondition(
                "mixing weight must lie in [0, 1]".into(),
            ));
        }
        let beta = Rational::one() - alpha;
        let mass = self
            .mass
            .iter()
            .zip(&other.mass)
            .map(|(a, b)| {
                a.iter()
                    .zip(b)
                    .map(|(p, q)| alpha * p + &beta * q)
                    .collect()
            })
            .collect();
        Ok(HorseLottery {
            frame: self.frame.clone(),
            mass,
        })
    }

    /// `self - other`.
    pub fn diff(&self, other: &HorseLottery) -> Result<DiffOption> {
        embed_pref(self, other, &Rational::one())
    }
}

impl DiffOption {
    pub fn mass(&self) -> &[Vec<Rational>] {
        &self.mass
    }
}

/// The option encoding "h is strictly preferred to g", scaled by `alpha > 0`.
pub fn embed_pref(h: &HorseLottery, g: &HorseLottery, alpha: &Rational) -> Result<DiffOption> {
    if h.frame != g.frame {
        return Err(Error::InvalidInput(
            "lotteries belong to different frames".into(),
        ));
    }
    if !alpha.is_positive() {
        return Err(Error::Precondition(
            "preference scale must be positive".into(),
        ));
    }
    let mass = h
        .mass
        .iter()
        .zip(&g.mass)
        .map(|(a, b)| a.iter().zip(b).map(|(p, q)| alpha * &(p - q)).collect())
        .collect();
    Ok(DiffOption {
        frame: h.frame.clone(),
        mass,
    })
}

/// Checks that `f > g` iff `alpha f + (1-alpha) h > alpha g + (1-alpha) h`
/// under the cone `d`, where "`>`" means the embedded difference is
/// desirable. Returns whether both sides agree.
pub fn mixture_independence_check(
    d: &DesirCone,
    f: &HorseLottery,
    g: &HorseLottery,
    h: &HorseLottery,
    alpha: &Rational,
    reference_reward: &str,
) -> Result<bool> {
    if !alpha.is_positive() || *alpha > Rational::one() {
        return Err(Error::Precondition(
            "mixing weight must lie in (0, 1]".into(),
        ));
    }
    let frame = f.frame();
    let plain = frame.to_vector(&f.diff(g)?, reference_reward)?;
    let mixed = frame.to_vector(&f.mix(alpha, h)?.diff(&g.mix(alpha, h)?)?, reference_reward)?;
    Ok(d.member(&plain)? == d.member(&mixed)?)
}
