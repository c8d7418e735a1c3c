//! Prime-field arithmetic over a single machine word.
//!
//! The modulus is restricted to odd primes in `[3, 2^62]` so that every
//! product fits in a `u128` intermediate and sums of two reduced values fit
//! in a `u64`. Tiny fields (F_3, F_5, ...) drive the exact soundness
//! experiments; a ~61-bit prime such as `2^61 - 1` serves the benchmarks.
//! Elements carry their field, and mixing fields panics.

use crate::error::FieldError;
use crate::prng::ChallengeSampler;
use serde::Serialize;
use std::fmt;

const MAX_MODULUS: u64 = 1 << 62;

/// A prime modulus `p`, checked at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PrimeField {
    modulus: u64,
}

/// An element of `F_p` in canonical reduced form (`0 <= value < p`).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    field: PrimeField,
}

impl PrimeField {
    /// Builds `F_p`. The modulus must be an odd prime with `3 <= p <= 2^62`;
    /// tiny moduli are checked by trial division, larger ones by the
    /// deterministic Miller-Rabin bases valid below 2^64.
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p < 3 || p > MAX_MODULUS || p % 2 == 0 || !is_prime_u64(p) {
            return Err(FieldError::InvalidModulus(p));
        }
        Ok(PrimeField { modulus: p })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// The canonical element for an arbitrary integer.
    pub fn elem(&self, v: u64) -> FieldElement {
        FieldElement {
            value: v % self.modulus,
            field: *self,
        }
    }

    pub fn elem_i64(&self, v: i64) -> FieldElement {
        let p = self.modulus as i128;
        let r = ((v as i128 % p) + p) % p;
        self.elem(r as u64)
    }

    pub fn zero(&self) -> FieldElement {
        self.elem(0)
    }

    pub fn one(&self) -> FieldElement {
        self.elem(1)
    }

    /// Uniform sampling via rejection on the smallest power-of-two range
    /// covering `p`. Deterministic for a given sampler state.
    pub fn sample(&self, rng: &mut dyn ChallengeSampler) -> FieldElement {
        let bits = 64 - (self.modulus - 1).leading_zeros();
        loop {
            let candidate = rng.next_bits(bits);
            if candidate < self.modulus {
                return self.elem(candidate);
            }
        }
    }

    /// All field elements in value order. Only sensible for tiny fields.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.modulus).map(move |v| self.elem(v))
    }
}

impl FieldElement {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn pow(&self, mut e: u64) -> FieldElement {
        let mut base = *self;
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by Fermat's little theorem.
    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        Ok(self.pow(self.field.modulus - 2))
    }

    fn assert_same_field(&self, other: &FieldElement) {
        assert_eq!(
            self.field.modulus, other.field.modulus,
            "operation between elements of different fields"
        );
    }
}

impl std::ops::Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        self.assert_same_field(&rhs);
        // both operands < 2^62, so the sum fits in u64
        let mut v = self.value + rhs.value;
        if v >= self.field.modulus {
            v -= self.field.modulus;
        }
        FieldElement { value: v, field: self.field }
    }
}

impl std::ops::Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        self.assert_same_field(&rhs);
        let v = if self.value >= rhs.value {
            self.value - rhs.value
        } else {
            self.value + self.field.modulus - rhs.value
        };
        FieldElement { value: v, field: self.field }
    }
}

impl std::ops::Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        self.assert_same_field(&rhs);
        let v = (self.value as u128 * rhs.value as u128) % self.field.modulus as u128;
        FieldElement { value: v as u64, field: self.field }
    }
}

impl std::ops::Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        if self.value == 0 {
            self
        } else {
            FieldElement {
                value: self.field.modulus - self.value,
                field: self.field,
            }
        }
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.field.modulus)
    }
}

/// Elements serialize as decimal strings; the owning field is declared once
/// per file or document header as `p=<decimal>`.
impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

fn is_prime_u64(n: u64) -> bool {
    if n < 10_000 {
        return trial_division(n);
    }
    miller_rabin(n)
}

fn trial_division(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Deterministic Miller-Rabin; this base set decides primality for all n < 2^64.
fn miller_rabin(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    let mut d = n - 1;
    let mut r = 0u32;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'base: for &a in &BASES {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prng::SeededPrng;

    fn f3() -> PrimeField {
        PrimeField::new(3).unwrap()
    }

    fn f5() -> PrimeField {
        PrimeField::new(5).unwrap()
    }

    #[test]
    fn modulus_validation() {
        assert!(PrimeField::new(2).is_err());
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(9).is_err());
        assert!(PrimeField::new(91).is_err()); // 7 * 13
        assert!(PrimeField::new((1 << 62) + 1).is_err());
        assert!(PrimeField::new(3).is_ok());
        assert!(PrimeField::new(7919).is_ok());
        assert!(PrimeField::new((1 << 61) - 1).is_ok()); // Mersenne prime
        assert!(PrimeField::new((1 << 62) - 1).is_err()); // 2^62 - 1 = 3 * ...
    }

    #[test]
    fn small_field_tables() {
        let f = f3();
        assert_eq!((f.elem(2) + f.elem(2)).value(), 1);
        for x in f.elements() {
            assert_eq!((f.zero() + x).value(), x.value());
        }
        assert_eq!((f5().elem(4) + f5().elem(4)).value(), 3);
        assert_eq!(f.elem(2).inv().unwrap().value(), 2);
        assert_eq!(f5().elem(2).pow(4).value(), 1);
    }

    #[test]
    fn inverse_of_random_nonzero() {
        let f = PrimeField::new((1 << 61) - 1).unwrap();
        let mut rng = SeededPrng::from_seed([7u8; 32]);
        for _ in 0..50 {
            let a = loop {
                let a = f.sample(&mut rng);
                if !a.is_zero() {
                    break a;
                }
            };
            assert_eq!((a * a.inv().unwrap()).value(), 1);
        }
        assert_eq!(f.zero().inv(), Err(FieldError::ZeroInverse));
    }

    #[test]
    fn field_axioms_on_random_triples() {
        for p in [3u64, 5, 7, 11, (1 << 61) - 1] {
            let f = PrimeField::new(p).unwrap();
            let mut rng = SeededPrng::from_seed([p as u8; 32]);
            for _ in 0..1000 {
                let a = f.sample(&mut rng);
                let b = f.sample(&mut rng);
                let c = f.sample(&mut rng);
                assert_eq!((a + b) + c, a + (b + c));
                assert_eq!((a * b) * c, a * (b * c));
                assert_eq!(a * (b + c), a * b + a * c);
                assert_eq!(a + (-a), f.zero());
                assert!(a.value() < p && b.value() < p && c.value() < p);
                if !a.is_zero() {
                    assert_eq!(a * a.inv().unwrap(), f.one());
                }
            }
        }
    }

    #[test]
    #[should_panic(expected = "different fields")]
    fn cross_field_rejected() {
        let _ = f3().elem(1) + f5().elem(1);
    }

    #[test]
    fn sampling_is_deterministic_and_uniformish() {
        let f = f3();
        let mut a = SeededPrng::from_seed([1u8; 32]);
        let mut b = SeededPrng::from_seed([1u8; 32]);
        let seq_a: Vec<u64> = (0..100).map(|_| f.sample(&mut a).value()).collect();
        let seq_b: Vec<u64> = (0..100).map(|_| f.sample(&mut b).value()).collect();
        assert_eq!(seq_a, seq_b);

        let mut rng = SeededPrng::from_seed([2u8; 32]);
        let mut counts = [0u64; 3];
        let n = 30_000;
        for _ in 0..n {
            counts[f.sample(&mut rng).value() as usize] += 1;
        }
        for c in counts {
            let freq = c as f64 / n as f64;
            assert!((freq - 1.0 / 3.0).abs() < 0.02, "frequency {freq} off");
        }
    }
}
