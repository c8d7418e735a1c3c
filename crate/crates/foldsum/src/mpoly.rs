//! Sparse multivariate polynomials with declared degree bounds.
//!
//! An `MPoly` is a map from exponent vectors to nonzero coefficients,
//! together with a declared arity, partial-degree bound `d` and total-degree
//! bound `D`. Bounds are metadata validated on every mutation rather than
//! inferred, because the protocols' soundness statements are in terms of the
//! declared bounds. Terms are kept in a B-tree keyed by the exponent vector,
//! which makes lexicographic order (and hence serialization and hashing)
//! canonical for free.

use crate::domain::{power_sums, Domain};
use crate::error::PolyError;
use crate::field::{FieldElement, PrimeField};
use crate::ops::OpCounter;
use crate::prng::{ChallengeSampler, SeededPrng};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt;

/// Exponents of one monomial; compares lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExponentVector(pub Vec<u32>);

impl ExponentVector {
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn max_entry(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct MPoly {
    field: PrimeField,
    arity: usize,
    partial_bound: u32,
    total_bound: u32,
    terms: BTreeMap<ExponentVector, FieldElement>,
}

impl MPoly {
    /// The zero polynomial with the given profile. The declared total bound
    /// is clamped to `arity * d`.
    pub fn zero(field: PrimeField, arity: usize, d: u32, big_d: u32) -> Result<Self, PolyError> {
        if arity == 0 || d == 0 || big_d == 0 {
            return Err(PolyError::InvalidBounds { arity, d, big_d });
        }
        let clamped = big_d.min((arity as u32).saturating_mul(d));
        Ok(MPoly {
            field,
            arity,
            partial_bound: d,
            total_bound: clamped,
            terms: BTreeMap::new(),
        })
    }

    pub fn constant(
        field: PrimeField,
        arity: usize,
        d: u32,
        big_d: u32,
        c: FieldElement,
    ) -> Result<Self, PolyError> {
        let mut p = Self::zero(field, arity, d, big_d)?;
        p.add_to_term(&vec![0; arity], c)?;
        Ok(p)
    }

    pub fn from_terms<I>(
        field: PrimeField,
        arity: usize,
        d: u32,
        big_d: u32,
        terms: I,
    ) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Vec<u32>, FieldElement)>,
    {
        let mut p = Self::zero(field, arity, d, big_d)?;
        for (exps, coeff) in terms {
            p.add_to_term(&exps, coeff)?;
        }
        Ok(p)
    }

    /// Adds `coeff` to the monomial `exps`, validating the bounds and pruning
    /// a resulting zero.
    pub fn add_to_term(&mut self, exps: &[u32], coeff: FieldElement) -> Result<(), PolyError> {
        if exps.len() != self.arity {
            return Err(PolyError::ArityMismatch {
                expected: self.arity,
                got: exps.len(),
            });
        }
        if coeff.field() != self.field {
            return Err(PolyError::FieldMismatch);
        }
        let key = ExponentVector(exps.to_vec());
        if key.max_entry() > self.partial_bound || key.total() > self.total_bound {
            return Err(PolyError::DegreeBound {
                exps: exps.to_vec(),
                d: self.partial_bound,
                big_d: self.total_bound,
            });
        }
        if coeff.is_zero() {
            return Ok(());
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = *e.get() + coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
        Ok(())
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn partial_bound(&self) -> u32 {
        self.partial_bound
    }

    pub fn total_bound(&self) -> u32 {
        self.total_bound
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &FieldElement)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> FieldElement {
        self.terms
            .get(&ExponentVector(exps.to_vec()))
            .copied()
            .unwrap_or_else(|| self.field.zero())
    }

    /// Largest exponent of any single variable across the support.
    pub fn actual_partial_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.max_entry()).max().unwrap_or(0)
    }

    /// Largest total degree across the support.
    pub fn actual_total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.total()).max().unwrap_or(0)
    }

    /// Whether the polynomial's shape matches a declared profile; used by
    /// verifiers to auto-reject malformed prover messages.
    pub fn fits_profile(&self, arity: usize, d: u32, big_d: u32) -> bool {
        self.arity == arity
            && self.actual_partial_degree() <= d
            && self.actual_total_degree() <= big_d
    }

    /// Exact evaluation. Counts every multiplication and addition performed:
    /// per-variable power tables, then one product chain and one accumulation
    /// per term.
    pub fn eval(
        &self,
        point: &[FieldElement],
        ops: &mut OpCounter,
    ) -> Result<FieldElement, PolyError> {
        if point.len() != self.arity {
            return Err(PolyError::ArityMismatch {
                expected: self.arity,
                got: point.len(),
            });
        }
        if self.terms.is_empty() {
            return Ok(self.field.zero());
        }
        let tables = self.power_tables(point, ops);
        let mut acc = self.field.zero();
        for (exps, coeff) in &self.terms {
            let mut t = *coeff;
            for (i, &e) in exps.0.iter().enumerate() {
                if e > 0 {
                    t = t * tables[i][e as usize];
                    ops.mul(1);
                }
            }
            acc = acc + t;
            ops.add(1);
        }
        Ok(acc)
    }

    fn power_tables(&self, point: &[FieldElement], ops: &mut OpCounter) -> Vec<Vec<FieldElement>> {
        let mut max_exp = vec![0u32; self.arity];
        for exps in self.terms.keys() {
            for (i, &e) in exps.0.iter().enumerate() {
                max_exp[i] = max_exp[i].max(e);
            }
        }
        point
            .iter()
            .zip(max_exp)
            .map(|(&x, m)| {
                let mut table = Vec::with_capacity(m as usize + 1);
                table.push(self.field.one());
                for j in 1..=m as usize {
                    let next = table[j - 1] * x;
                    ops.mul(1);
                    table.push(next);
                }
                table
            })
            .collect()
    }

    /// `Σ_{a∈H^μ} f(a)` through the power-sum product formula, with a fresh
    /// power-sum table. Engines that share one table use
    /// [`MPoly::sum_over_cube_with`].
    pub fn sum_over_cube(&self, domain: &Domain, ops: &mut OpCounter) -> FieldElement {
        let sigma = power_sums(domain, self.partial_bound, ops);
        self.sum_over_cube_with(&sigma, ops)
    }

    /// Power-sum product formula with a caller-supplied table. Each term
    /// costs exactly `arity` multiplications (one per variable, including
    /// exponent zero) and one accumulation.
    pub fn sum_over_cube_with(
        &self,
        sigma: &[FieldElement],
        ops: &mut OpCounter,
    ) -> FieldElement {
        assert!(
            sigma.len() > self.actual_partial_degree() as usize,
            "power-sum table too short"
        );
        let mut acc = self.field.zero();
        for (exps, coeff) in &self.terms {
            let mut t = *coeff;
            for &e in &exps.0 {
                t = t * sigma[e as usize];
                ops.mul(1);
            }
            acc = acc + t;
            ops.add(1);
        }
        acc
    }

    /// Literal enumeration of `H^μ`; the independent oracle for
    /// [`MPoly::sum_over_cube`]. Guarded to `|H|^μ <= 2^24`.
    pub fn sum_over_cube_bruteforce(&self, domain: &Domain) -> Result<FieldElement, PolyError> {
        const GUARD: u32 = 24;
        let h = domain.size();
        let mut total: u64 = 1;
        for _ in 0..self.arity {
            total = total.saturating_mul(h as u64);
            if total > 1 << GUARD {
                return Err(PolyError::SizeGuard {
                    h,
                    mu: self.arity,
                    guard: GUARD,
                });
            }
        }
        let mut scratch = OpCounter::new();
        let mut acc = self.field.zero();
        let mut idx = vec![0usize; self.arity];
        let mut point: Vec<FieldElement> = vec![domain.points()[0]; self.arity];
        loop {
            acc = acc + self.eval(&point, &mut scratch)?;
            // odometer increment
            let mut pos = 0;
            loop {
                if pos == self.arity {
                    return Ok(acc);
                }
                idx[pos] += 1;
                if idx[pos] < h {
                    point[pos] = domain.points()[idx[pos]];
                    break;
                }
                idx[pos] = 0;
                point[pos] = domain.points()[0];
                pos += 1;
            }
        }
    }

    /// `g(x) = Σ_{a∈H^k} f(x, a)`: collapses the last `k` exponents of each
    /// term through power-sum products (`k` multiplications per term).
    pub fn partial_sum_suffix(
        &self,
        domain: &Domain,
        k: usize,
        ops: &mut OpCounter,
    ) -> Result<MPoly, PolyError> {
        let sigma = power_sums(domain, self.partial_bound, ops);
        self.partial_sum_suffix_with(&sigma, k, ops)
    }

    pub fn partial_sum_suffix_with(
        &self,
        sigma: &[FieldElement],
        k: usize,
        ops: &mut OpCounter,
    ) -> Result<MPoly, PolyError> {
        if k == 0 || k >= self.arity {
            return Err(PolyError::SuffixOutOfRange { k, arity: self.arity });
        }
        assert!(
            sigma.len() > self.actual_partial_degree() as usize,
            "power-sum table too short"
        );
        let keep = self.arity - k;
        let mut out = MPoly::zero(self.field, keep, self.partial_bound, self.total_bound)?;
        for (exps, coeff) in &self.terms {
            let mut t = *coeff;
            for &e in &exps.0[keep..] {
                t = t * sigma[e as usize];
                ops.mul(1);
            }
            if t.is_zero() {
                continue;
            }
            let key = ExponentVector(exps.0[..keep].to_vec());
            match out.terms.entry(key) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(t);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let sum = *e.get() + t;
                    ops.add(1);
                    if sum.is_zero() {
                        e.remove();
                    } else {
                        *e.get_mut() = sum;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `f(alpha, ·)`: substitutes the first `|alpha|` variables.
    pub fn partial_eval_prefix(
        &self,
        alpha: &[FieldElement],
        ops: &mut OpCounter,
    ) -> Result<MPoly, PolyError> {
        let j = alpha.len();
        if j >= self.arity {
            return Err(PolyError::PrefixOutOfRange { len: j, arity: self.arity });
        }
        if j == 0 {
            return Ok(self.clone());
        }
        let keep = self.arity - j;
        // power tables for the substituted prefix only
        let mut max_exp = vec![0u32; j];
        for exps in self.terms.keys() {
            for i in 0..j {
                max_exp[i] = max_exp[i].max(exps.0[i]);
            }
        }
        let tables: Vec<Vec<FieldElement>> = alpha
            .iter()
            .zip(max_exp)
            .map(|(&x, m)| {
                let mut table = Vec::with_capacity(m as usize + 1);
                table.push(self.field.one());
                for e in 1..=m as usize {
                    let next = table[e - 1] * x;
                    ops.mul(1);
                    table.push(next);
                }
                table
            })
            .collect();

        let mut out = MPoly::zero(self.field, keep, self.partial_bound, self.total_bound)?;
        for (exps, coeff) in &self.terms {
            let mut t = *coeff;
            for i in 0..j {
                let e = exps.0[i];
                if e > 0 {
                    t = t * tables[i][e as usize];
                    ops.mul(1);
                }
            }
            if t.is_zero() {
                continue;
            }
            let key = ExponentVector(exps.0[j..].to_vec());
            match out.terms.entry(key) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(t);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let sum = *e.get() + t;
                    ops.add(1);
                    if sum.is_zero() {
                        e.remove();
                    } else {
                        *e.get_mut() = sum;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `z·f0 + f1`. Result bounds are the componentwise max of the operands'.
    pub fn fold(
        z: FieldElement,
        f0: &MPoly,
        f1: &MPoly,
        ops: &mut OpCounter,
    ) -> Result<MPoly, PolyError> {
        if f0.arity != f1.arity {
            return Err(PolyError::ArityMismatch {
                expected: f0.arity,
                got: f1.arity,
            });
        }
        if f0.field != f1.field || z.field() != f0.field {
            return Err(PolyError::FieldMismatch);
        }
        let mut out = f1.clone();
        out.partial_bound = f0.partial_bound.max(f1.partial_bound);
        out.total_bound = f0.total_bound.max(f1.total_bound);
        for (exps, coeff) in &f0.terms {
            let t = z * *coeff;
            ops.mul(1);
            if t.is_zero() {
                continue;
            }
            match out.terms.entry(exps.clone()) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(t);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let sum = *e.get() + t;
                    ops.add(1);
                    if sum.is_zero() {
                        e.remove();
                    } else {
                        *e.get_mut() = sum;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Canonical text form: a header line `mu=.. d=.. D=.. p=..` followed by
    /// one `e1,e2,...,emu : coeff` line per term in lexicographic order.
    pub fn canonical_text(&self) -> String {
        let mut s = format!(
            "mu={} d={} D={} p={}\n",
            self.arity,
            self.partial_bound,
            self.total_bound,
            self.field.modulus()
        );
        for (exps, coeff) in &self.terms {
            let joined: Vec<String> = exps.0.iter().map(|e| e.to_string()).collect();
            s.push_str(&format!("{} : {}\n", joined.join(","), coeff.value()));
        }
        s
    }

    pub fn from_canonical_text(text: &str) -> Result<Self, PolyError> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| PolyError::Parse("empty input".into()))?;
        let mut mu = None;
        let mut d = None;
        let mut big_d = None;
        let mut p = None;
        for piece in header.split_whitespace() {
            let (key, val) = piece
                .split_once('=')
                .ok_or_else(|| PolyError::Parse(format!("bad header field `{piece}`")))?;
            let n: u64 = val
                .parse()
                .map_err(|_| PolyError::Parse(format!("bad number `{val}`")))?;
            match key {
                "mu" => mu = Some(n as usize),
                "d" => d = Some(n as u32),
                "D" => big_d = Some(n as u32),
                "p" => p = Some(n),
                other => return Err(PolyError::Parse(format!("unknown header key `{other}`"))),
            }
        }
        let (mu, d, big_d, p) = match (mu, d, big_d, p) {
            (Some(a), Some(b), Some(c), Some(e)) => (a, b, c, e),
            _ => return Err(PolyError::Parse("incomplete header".into())),
        };
        let field =
            PrimeField::new(p).map_err(|e| PolyError::Parse(format!("bad modulus: {e}")))?;
        let mut poly = MPoly::zero(field, mu, d, big_d)?;
        for line in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (exp_part, coeff_part) = line
                .split_once(':')
                .ok_or_else(|| PolyError::Parse(format!("bad term line `{line}`")))?;
            let exps: Vec<u32> = exp_part
                .trim()
                .split(',')
                .map(|e| {
                    e.trim()
                        .parse()
                        .map_err(|_| PolyError::Parse(format!("bad exponent `{e}`")))
                })
                .collect::<Result<_, _>>()?;
            let coeff: u64 = coeff_part
                .trim()
                .parse()
                .map_err(|_| PolyError::Parse(format!("bad coefficient `{coeff_part}`")))?;
            poly.add_to_term(&exps, field.elem(coeff))?;
        }
        Ok(poly)
    }

    /// SHA-256 of the canonical text, as lowercase hex.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.canonical_text().as_bytes());
        hex::encode(h.finalize())
    }

    /// Dense coefficient vector of a univariate polynomial, lowest degree
    /// first. The zero polynomial yields `[0]`.
    pub fn to_univariate_coeffs(&self) -> Result<Vec<FieldElement>, PolyError> {
        if self.arity != 1 {
            return Err(PolyError::ArityMismatch {
                expected: 1,
                got: self.arity,
            });
        }
        let deg = self.actual_partial_degree() as usize;
        let mut coeffs = vec![self.field.zero(); deg + 1];
        for (exps, coeff) in &self.terms {
            coeffs[exps.0[0] as usize] = *coeff;
        }
        Ok(coeffs)
    }

    pub fn from_univariate_coeffs(
        field: PrimeField,
        coeffs: &[FieldElement],
        d: u32,
        big_d: u32,
    ) -> Result<Self, PolyError> {
        let mut poly = MPoly::zero(field, 1, d, big_d)?;
        for (e, &c) in coeffs.iter().enumerate() {
            poly.add_to_term(&[e as u32], c)?;
        }
        Ok(poly)
    }
}

// Human-readable form for assertion messages: "2*x1^2*x3 + 1".
impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 (mu={}, p={})", self.arity, self.field.modulus());
        }
        let rendered: Vec<String> = self
            .terms
            .iter()
            .map(|(exps, coeff)| {
                let vars: Vec<String> = exps
                    .0
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| {
                        if e == 1 {
                            format!("x{}", i + 1)
                        } else {
                            format!("x{}^{}", i + 1, e)
                        }
                    })
                    .collect();
                if vars.is_empty() {
                    format!("{}", coeff.value())
                } else {
                    format!("{}*{}", coeff.value(), vars.join("*"))
                }
            })
            .collect();
        write!(
            f,
            "{} (mu={}, p={})",
            rendered.join(" + "),
            self.arity,
            self.field.modulus()
        )
    }
}

/// Number of exponent vectors of length `arity` with entries `<= d` and sum
/// `<= big_d`; the cumulative table is also the basis for uniform support
/// sampling without enumeration.
pub(crate) fn admissible_cumulative(
    arity: usize,
    d: u32,
    big_d: u32,
) -> Result<Vec<Vec<u128>>, PolyError> {
    // cum[i][t] = number of length-i vectors with entries <= d and sum <= t
    let big_d = big_d as usize;
    let mut cum = vec![vec![0u128; big_d + 1]; arity + 1];
    for t in 0..=big_d {
        cum[0][t] = 1;
    }
    for i in 1..=arity {
        for t in 0..=big_d {
            let mut total = 0u128;
            for e in 0..=(d as usize).min(t) {
                total = total
                    .checked_add(cum[i - 1][t - e])
                    .ok_or(PolyError::InvalidBounds {
                        arity,
                        d,
                        big_d: big_d as u32,
                    })?;
            }
            cum[i][t] = total;
        }
    }
    Ok(cum)
}

fn unrank(cum: &[Vec<u128>], arity: usize, d: u32, big_d: u32, mut rank: u128) -> Vec<u32> {
    let mut exps = Vec::with_capacity(arity);
    let mut budget = big_d as usize;
    for i in 0..arity {
        let remaining = arity - i - 1;
        for e in 0..=(d as usize).min(budget) {
            let block = cum[remaining][budget - e];
            if rank < block {
                exps.push(e as u32);
                budget -= e;
                break;
            }
            rank -= block;
        }
    }
    debug_assert_eq!(exps.len(), arity);
    exps
}

/// Random polynomial whose support is a uniform sample (without replacement)
/// of the admissible exponent vectors, with uniform nonzero coefficients.
/// `density` is the fraction of the admissible support to fill.
pub fn random_poly(
    field: PrimeField,
    arity: usize,
    d: u32,
    big_d: u32,
    density: f64,
    rng: &mut SeededPrng,
) -> Result<MPoly, PolyError> {
    if !(0.0..=1.0).contains(&density) {
        return Err(PolyError::Invalid(format!("density {density} out of [0,1]")));
    }
    let mut poly = MPoly::zero(field, arity, d, big_d)?;
    let big_d = poly.total_bound;
    let cum = admissible_cumulative(arity, d, big_d)?;
    let total = cum[arity][big_d as usize];
    let target = ((density * total as f64).round() as u128).min(total);
    if target == 0 {
        return Ok(poly);
    }
    const CAP: u128 = 1 << 22;
    if target > CAP {
        return Err(PolyError::Invalid(format!(
            "requested support of {target} terms exceeds the {CAP} cap"
        )));
    }
    let bits = 128 - (total - 1).leading_zeros();
    let mut chosen = std::collections::BTreeSet::new();
    while (chosen.len() as u128) < target {
        let raw = if bits <= 64 {
            rng.next_u64() as u128 & ((1u128 << bits) - 1)
        } else {
            let lo = rng.next_u64() as u128;
            let hi = rng.next_u64() as u128;
            (hi << 64 | lo) & (((1u128 << (bits - 1)) << 1).wrapping_sub(1))
        };
        if raw < total {
            chosen.insert(raw);
        }
    }
    for rank in chosen {
        let exps = unrank(&cum, arity, d, big_d, rank);
        let coeff = loop {
            let c = field.sample(rng);
            if !c.is_zero() {
                break c;
            }
        };
        poly.add_to_term(&exps, coeff)?;
    }
    Ok(poly)
}

/// Random polynomial with (up to) an explicit number of support terms.
pub fn random_poly_with_terms(
    field: PrimeField,
    arity: usize,
    d: u32,
    big_d: u32,
    target_terms: usize,
    rng: &mut SeededPrng,
) -> Result<MPoly, PolyError> {
    let probe = MPoly::zero(field, arity, d, big_d)?;
    let cum = admissible_cumulative(arity, d, probe.total_bound)?;
    let total = cum[arity][probe.total_bound as usize];
    let density = (target_terms as f64 / total as f64).min(1.0);
    random_poly(field, arity, d, big_d, density, rng)
}

/// Uniform point of `F^n`.
pub fn random_point(
    field: PrimeField,
    n: usize,
    rng: &mut dyn ChallengeSampler,
) -> Vec<FieldElement> {
    (0..n).map(|_| field.sample(rng)).collect()
}
