use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `H_m = 1 + 1/2 + ... + 1/m`, exactly and as a float.
#[derive(Debug, Clone, PartialEq)]
pub struct Harmonic {
    pub m: u64,
    pub exact: BigRational,
    pub value: f64,
}

/// Computes `H_m` over the common denominator `lcm(1..=m)`, reducing once.
pub fn harmonic(m: u64) -> Result<Harmonic> {
    if m == 0 {
        return Err(Error::param("harmonic number needs m >= 1"));
    }
    let lcm = lcm_upto(m);
    let mut numer = BigInt::zero();
    for i in 1..=m {
        numer += &lcm / BigInt::from(i);
    }
    let exact = BigRational::new(numer, lcm);
    let value = exact
        .to_f64()
        .unwrap_or_else(|| (1..=m).rev().map(|i| 1.0 / i as f64).sum());
    Ok(Harmonic { m, exact, value })
}

/// `lcm(1, ..., m)` as the product of maximal prime powers `<= m`.
fn lcm_upto(m: u64) -> BigInt {
    let m = m as usize;
    let mut composite = vec![false; m + 1];
    let mut acc = BigInt::one();
    for p in 2..=m {
        if composite[p] {
            continue;
        }
        for q in (p * p..=m).step_by(p) {
            composite[q] = true;
        }
        let mut pk = p as u64;
        while pk * p as u64 <= m as u64 {
            pk *= p as u64;
        }
        acc *= pk;
    }
    acc
}

/// Successive `H_1, H_2, ...` by exact incremental addition.
#[derive(Debug, Clone)]
pub struct HarmonicSeries {
    m: u64,
    numer: BigInt,
    denom: BigInt,
}

impl HarmonicSeries {
    pub fn new() -> Self {
        HarmonicSeries {
            m: 0,
            numer: BigInt::zero(),
            denom: BigInt::one(),
        }
    }
}

impl Default for HarmonicSeries {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for HarmonicSeries {
    type Item = (u64, BigRational);

    fn next(&mut self) -> Option<Self::Item> {
        self.m += 1;
        let m = BigInt::from(self.m);
        // a/b + 1/m = (a m + b) / (b m)
        let numer = &self.numer * &m + &self.denom;
        let denom = &self.denom * &m;
        let g = numer.gcd(&denom);
        self.numer = numer / &g;
        self.denom = denom / &g;
        Some((
            self.m,
            BigRational::new_raw(self.numer.clone(), self.denom.clone()),
        ))
    }
}
