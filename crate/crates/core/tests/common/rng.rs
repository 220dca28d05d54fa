use choice_core::{Rational, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn int(rng: &mut impl Rng, lo: i64, hi: i64) -> Rational {
    Rational::from_integer(rng.gen_range(lo..=hi))
}

/// A rational `p/q` with `|p| <= num` and `1 <= q <= den`.
pub fn frac(rng: &mut impl Rng, num: i64, den: i64) -> Rational {
    let p = rng.gen_range(-num..=num);
    let q = rng.gen_range(1..=den);
    Rational::new(p, q).unwrap()
}

pub fn pos_frac(rng: &mut impl Rng, num: i64, den: i64) -> Rational {
    let p = rng.gen_range(1..=num);
    let q = rng.gen_range(1..=den);
    Rational::new(p, q).unwrap()
}

pub fn vector(rng: &mut impl Rng, dim: usize, num: i64, den: i64) -> Vector {
    (0..dim).map(|_| frac(rng, num, den)).collect()
}

pub fn pos_vector(rng: &mut impl Rng, dim: usize, num: i64, den: i64) -> Vector {
    (0..dim).map(|_| pos_frac(rng, num, den)).collect()
}
