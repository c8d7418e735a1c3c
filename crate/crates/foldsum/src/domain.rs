//! Summation domains `H ⊆ F` and their power sums.

use crate::error::PolyError;
use crate::field::{FieldElement, PrimeField};
use crate::ops::OpCounter;

/// Structure tag for a domain. Multiplicative structure unlocks the one-round
/// univariate sumcheck; everything else is handled generically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DomainStructure {
    Unstructured,
    MultiplicativeSubgroup { generator: FieldElement },
    MultiplicativeCoset { generator: FieldElement, shift: FieldElement },
}

/// An ordered list of distinct points of `F` summed over by the protocols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    points: Vec<FieldElement>,
    structure: DomainStructure,
}

impl Domain {
    /// An explicit, unstructured point list. Points must be distinct and
    /// there must be at least two of them.
    pub fn explicit(points: Vec<FieldElement>) -> Result<Self, PolyError> {
        Self::validate_points(&points)?;
        Ok(Domain {
            points,
            structure: DomainStructure::Unstructured,
        })
    }

    /// The multiplicative subgroup `{g^0, ..., g^(n-1)}`; `g` must have
    /// order exactly `n`.
    pub fn subgroup(generator: FieldElement, order: usize) -> Result<Self, PolyError> {
        let points = Self::coset_points(generator, generator.field().one(), order)?;
        Ok(Domain {
            points,
            structure: DomainStructure::MultiplicativeSubgroup { generator },
        })
    }

    /// The coset `shift * {g^0, ..., g^(n-1)}` with `shift != 0`.
    pub fn coset(
        generator: FieldElement,
        shift: FieldElement,
        order: usize,
    ) -> Result<Self, PolyError> {
        if shift.is_zero() {
            return Err(PolyError::Domain("coset shift must be nonzero".into()));
        }
        let points = Self::coset_points(generator, shift, order)?;
        Ok(Domain {
            points,
            structure: DomainStructure::MultiplicativeCoset { generator, shift },
        })
    }

    fn coset_points(
        generator: FieldElement,
        shift: FieldElement,
        order: usize,
    ) -> Result<Vec<FieldElement>, PolyError> {
        if generator.is_zero() {
            return Err(PolyError::Domain("generator must be nonzero".into()));
        }
        let mut points = Vec::with_capacity(order);
        let mut cur = shift;
        for _ in 0..order {
            points.push(cur);
            cur = cur * generator;
        }
        if cur != shift {
            return Err(PolyError::Domain(format!(
                "generator order does not divide {order}"
            )));
        }
        Self::validate_points(&points)?;
        Ok(points)
    }

    fn validate_points(points: &[FieldElement]) -> Result<(), PolyError> {
        if points.len() < 2 {
            return Err(PolyError::Domain("|H| must be at least 2".into()));
        }
        let field = points[0].field();
        let mut seen = std::collections::HashSet::new();
        for p in points {
            if p.field() != field {
                return Err(PolyError::FieldMismatch);
            }
            if !seen.insert(p.value()) {
                return Err(PolyError::Domain(format!("duplicate point {}", p.value())));
            }
        }
        Ok(())
    }

    pub fn points(&self) -> &[FieldElement] {
        &self.points
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn field(&self) -> PrimeField {
        self.points[0].field()
    }

    pub fn structure(&self) -> &DomainStructure {
        &self.structure
    }

    pub fn is_multiplicative(&self) -> bool {
        !matches!(self.structure, DomainStructure::Unstructured)
    }

    /// `|H|` as a field element.
    pub fn size_elem(&self) -> FieldElement {
        self.field().elem(self.points.len() as u64)
    }
}

/// Power sums `σ_j = Σ_{a∈H} a^j` for `j = 0..=d`, computed with running
/// powers per point: at most `d·|H|` multiplications and `d·|H|` additions.
pub fn power_sums(domain: &Domain, d: u32, ops: &mut OpCounter) -> Vec<FieldElement> {
    let field = domain.field();
    let mut sigma = vec![field.zero(); d as usize + 1];
    sigma[0] = domain.size_elem();
    for &a in domain.points() {
        let mut pow = field.one();
        for s in sigma.iter_mut().skip(1) {
            pow = pow * a;
            ops.mul(1);
            *s = *s + pow;
            ops.add(1);
        }
    }
    sigma
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn explicit_domain_rejects_duplicates_and_singletons() {
        let f = field(5);
        assert!(Domain::explicit(vec![f.elem(1), f.elem(1)]).is_err());
        assert!(Domain::explicit(vec![f.elem(1)]).is_err());
        assert!(Domain::explicit(vec![f.elem(0), f.elem(1)]).is_ok());
    }

    #[test]
    fn subgroup_points_are_generator_powers() {
        let f = field(5);
        // 4 has order 2 in F_5^x
        let h = Domain::subgroup(f.elem(4), 2).unwrap();
        let vals: Vec<u64> = h.points().iter().map(|p| p.value()).collect();
        assert_eq!(vals, vec![1, 4]);
        // order must be exact
        assert!(Domain::subgroup(f.elem(4), 4).is_err());
        assert!(Domain::subgroup(f.elem(2), 4).is_ok()); // 2 has order 4 in F_5^x
    }

    #[test]
    fn coset_shifts_subgroup() {
        let f = field(7);
        // 2 has order 3 in F_7^x; coset 3 * {1,2,4} = {3,6,5}
        let h = Domain::coset(f.elem(2), f.elem(3), 3).unwrap();
        let vals: Vec<u64> = h.points().iter().map(|p| p.value()).collect();
        assert_eq!(vals, vec![3, 6, 5]);
    }

    #[test]
    fn power_sums_tiny_cases() {
        let f3 = field(3);
        let h = Domain::explicit(vec![f3.elem(0), f3.elem(1)]).unwrap();
        let mut ops = OpCounter::new();
        let sigma = power_sums(&h, 1, &mut ops);
        assert_eq!(sigma.iter().map(|s| s.value()).collect::<Vec<_>>(), vec![2, 1]);
        assert!(ops.muls <= 2 && ops.adds <= 2);

        let f5 = field(5);
        let h = Domain::explicit(vec![f5.elem(0), f5.elem(1), f5.elem(2)]).unwrap();
        let mut ops = OpCounter::new();
        let sigma = power_sums(&h, 2, &mut ops);
        // direct enumeration: sigma_0 = 3, sigma_1 = 3, sigma_2 = 0+1+4 = 5 = 0
        assert_eq!(sigma.iter().map(|s| s.value()).collect::<Vec<_>>(), vec![3, 3, 0]);
    }

    #[test]
    fn power_sums_subgroup_vanish_off_order() {
        let f5 = field(5);
        let h = Domain::subgroup(f5.elem(4), 2).unwrap(); // {1, 4}
        let mut ops = OpCounter::new();
        let sigma = power_sums(&h, 5, &mut ops);
        for (j, s) in sigma.iter().enumerate() {
            if j % 2 == 0 {
                assert_eq!(s.value(), 2, "sigma_{j}");
            } else {
                assert_eq!(s.value(), 0, "sigma_{j}");
            }
        }
    }

    #[test]
    fn power_sums_match_per_point_enumeration() {
        let f = field(11);
        let h = Domain::explicit((0..6).map(|v| f.elem(v)).collect()).unwrap();
        let mut ops = OpCounter::new();
        let d = 5;
        let sigma = power_sums(&h, d, &mut ops);
        for j in 0..=d {
            let mut want = f.zero();
            for &a in h.points() {
                want = want + a.pow(j as u64);
            }
            assert_eq!(sigma[j as usize], want);
        }
        assert!(ops.muls <= d as u64 * h.size() as u64);
        assert!(ops.adds <= d as u64 * h.size() as u64);
    }
}
