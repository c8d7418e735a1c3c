//! The classical round-by-round sumcheck protocol.
//!
//! One round per variable: the prover sends the univariate restriction-sum
//! `f_i(x) = Σ_{a∈H^(μ-i)} f(α_1..α_(i-1), x, a)` in full, the verifier
//! checks its sum over `H` against the previous claim, and a final query to
//! the input oracle ties the last message to `f` itself. The intermediate
//! univariate checks are carried out by hand on the coefficient side (the
//! verifier holds the full message), whatever checker the instance is
//! configured with; the checker's soundness parameter only feeds the bound
//! calculator.
//!
//! Metrics convention: rounds = μ and verifier randomness = μ, the final
//! challenge for the evaluation check included.

use crate::domain::{power_sums, Domain};
use crate::error::ProtocolError;
use crate::field::FieldElement;
use crate::mpoly::MPoly;
use crate::ops::OpCounter;
use crate::oracle::{OracleId, OracleRegistry};
use crate::prng::ChallengeSampler;
use crate::transcript::Transcript;
use crate::univariate::UnivariateChecker;

#[derive(Debug, Clone)]
pub struct StdInstance {
    pub f: MPoly,
    pub domain: Domain,
    pub claimed: FieldElement,
    pub checker: UnivariateChecker,
}

impl StdInstance {
    pub fn new(
        f: MPoly,
        domain: Domain,
        claimed: FieldElement,
        checker: UnivariateChecker,
    ) -> Result<Self, ProtocolError> {
        if f.partial_bound() as usize > domain.size() - 1 {
            return Err(ProtocolError::DegreeVsDomain {
                d: f.partial_bound(),
                hmax: domain.size() - 1,
            });
        }
        checker.validate_domain(&domain)?;
        Ok(StdInstance {
            f,
            domain,
            claimed,
            checker,
        })
    }
}

/// What the prover answers in a given round; adversarial strategies override
/// the honest message.
pub trait StdProver {
    /// `honest` is the correct round message, `claim` the value the verifier
    /// will check the message's sum against.
    fn round_message(&mut self, round: usize, honest: &MPoly, claim: FieldElement) -> MPoly;
}

pub struct HonestStdProver;

impl StdProver for HonestStdProver {
    fn round_message(&mut self, _round: usize, honest: &MPoly, _claim: FieldElement) -> MPoly {
        honest.clone()
    }
}

/// `f_i(x) = Σ_{a∈H^(μ-i)} f(alphas, x, a)`: prefix evaluation followed by
/// suffix summation; no summation in the last round.
pub fn std_prove_round(
    f: &MPoly,
    domain: &Domain,
    alphas: &[FieldElement],
    round: usize,
    summation: &mut OpCounter,
    materialization: &mut OpCounter,
) -> Result<MPoly, ProtocolError> {
    let mu = f.arity();
    assert!(round >= 1 && round <= mu, "round out of range");
    assert_eq!(alphas.len(), round - 1, "need round-1 prefix challenges");
    let restricted = f.partial_eval_prefix(alphas, materialization)?;
    if round < mu {
        Ok(restricted.partial_sum_suffix(domain, mu - round, summation)?)
    } else {
        Ok(restricted)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StdReject {
    /// The message violated the declared arity/degree bounds.
    MalformedMessage { round: usize },
    /// `Σ_{a∈H} f_i(a)` disagreed with the previous claim.
    RoundSumMismatch { round: usize },
    /// `f_μ(α_μ) != f(α_1..α_μ)`.
    FinalEvalMismatch,
}

#[derive(Debug)]
pub struct StdRunResult {
    pub accepted: bool,
    pub reject: Option<StdReject>,
    pub transcript: Transcript,
    pub challenges: Vec<FieldElement>,
    pub messages: Vec<MPoly>,
    pub input_oracle: OracleId,
}

/// Runs the protocol with the given prover. Honest runs accept with
/// probability 1; `reject` is a verdict, not an error.
pub fn run_standard(
    inst: &StdInstance,
    prover: &mut dyn StdProver,
    sampler: &mut dyn ChallengeSampler,
    seed_label: &str,
) -> Result<StdRunResult, ProtocolError> {
    let field = inst.f.field();
    let mu = inst.f.arity();
    let d = inst.f.partial_bound();
    let mut tr = Transcript::new("std", seed_label, &inst.f.digest());
    let mut reg = OracleRegistry::new(field);
    let input = reg.register(inst.f.clone(), "f");

    // verifier-side power sums for the by-hand coefficient checks
    let mut vops = OpCounter::new();
    let sigma = power_sums(&inst.domain, d, &mut vops);
    tr.metrics.verifier.other.merge(&vops);

    let mut claim = inst.claimed;
    let mut alphas: Vec<FieldElement> = Vec::new();
    let mut messages: Vec<MPoly> = Vec::new();
    let mut reject: Option<StdReject> = None;

    for round in 1..=mu {
        let honest = std_prove_round(
            &inst.f,
            &inst.domain,
            &alphas,
            round,
            &mut tr.metrics.prover.summation,
            &mut tr.metrics.prover.materialization,
        )?;
        let msg = prover.round_message(round, &honest, claim);
        let coeffs = msg.to_univariate_coeffs()?;
        tr.message_sent(&format!("f_{round}"), &coeffs);
        messages.push(msg.clone());

        if !msg.fits_profile(1, d, inst.f.total_bound()) {
            reject = Some(StdReject::MalformedMessage { round });
            break;
        }
        // by-hand univariate check Σ_H f_round = claim
        let mut check_ops = OpCounter::new();
        let sum = msg.sum_over_cube_with(&sigma, &mut check_ops);
        tr.metrics.verifier.other.merge(&check_ops);
        if sum != claim {
            reject = Some(StdReject::RoundSumMismatch { round });
            break;
        }

        let alpha = field.sample(sampler);
        tr.challenge_sent(&format!("alpha_{round}"), &[alpha]);
        let mut eval_ops = OpCounter::new();
        let at_alpha = msg.eval(&[alpha], &mut eval_ops)?;
        tr.metrics.verifier.other.merge(&eval_ops);

        if round < mu {
            alphas.push(alpha);
            claim = at_alpha;
        } else {
            // final check: f_mu(alpha_mu) = f(alpha_1..alpha_mu)
            alphas.push(alpha);
            let direct = reg.query(input, &alphas, &mut tr)?;
            if at_alpha != direct {
                reject = Some(StdReject::FinalEvalMismatch);
            }
        }
    }

    tr.finish(0);
    Ok(StdRunResult {
        accepted: reject.is_none(),
        reject,
        transcript: tr,
        challenges: alphas,
        messages,
        input_oracle: input,
    })
}

/// Refined soundness bound of the standard protocol:
/// `1 - (1 - d/q)^(μ-1) * (1 - max(p, d/q))`, where `p` is the soundness
/// error of the univariate check used in each round.
pub fn std_soundness_bound(mu: usize, d: u32, q: u64, p: f64) -> Result<f64, ProtocolError> {
    if mu == 0 {
        return Err(ProtocolError::InvalidParameter("mu must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(ProtocolError::InvalidParameter(format!(
            "p = {p} out of [0, 1]"
        )));
    }
    if d as u64 >= q {
        return Err(ProtocolError::InvalidParameter(format!(
            "d = {d} must be below the field size {q}"
        )));
    }
    let dq = d as f64 / q as f64;
    Ok(1.0 - (1.0 - dq).powi(mu as i32 - 1) * (1.0 - p.max(dq)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::mpoly::random_poly;
    use crate::prng::SeededPrng;
    use crate::univariate::UniMode;

    fn f3() -> PrimeField {
        PrimeField::new(3).unwrap()
    }

    fn xy_instance(claimed: u64) -> StdInstance {
        let f = f3();
        let poly = MPoly::from_terms(
            f,
            2,
            1,
            2,
            vec![(vec![1, 0], f.elem(1)), (vec![0, 1], f.elem(1))],
        )
        .unwrap();
        let h = Domain::explicit(vec![f.elem(0), f.elem(1)]).unwrap();
        StdInstance::new(
            poly,
            h,
            f.elem(claimed),
            UnivariateChecker::new(UniMode::CoefficientSide),
        )
        .unwrap()
    }

    #[test]
    fn prove_round_examples() {
        let inst = xy_instance(1);
        let mut s = OpCounter::new();
        let mut m = OpCounter::new();
        // round 1: sum over y leaves 2x + 1
        let g1 = std_prove_round(&inst.f, &inst.domain, &[], 1, &mut s, &mut m).unwrap();
        assert_eq!(g1.coeff(&[1]).value(), 2);
        assert_eq!(g1.coeff(&[0]).value(), 1);
        // last round: no summation, pure restriction
        let f = f3();
        let g2 =
            std_prove_round(&inst.f, &inst.domain, &[f.elem(2)], 2, &mut s, &mut m).unwrap();
        assert_eq!(g2.coeff(&[0]).value(), 2);
        assert_eq!(g2.coeff(&[1]).value(), 1);
    }

    #[test]
    fn prove_round_constant_scales_by_domain_power() {
        let f = PrimeField::new(7).unwrap();
        let c = MPoly::constant(f, 3, 1, 3, f.elem(4)).unwrap();
        let h = Domain::explicit(vec![f.elem(0), f.elem(1), f.elem(2)]).unwrap();
        let mut s = OpCounter::new();
        let mut m = OpCounter::new();
        let g = std_prove_round(&c, &h, &[], 1, &mut s, &mut m).unwrap();
        // c * |H|^(mu-1) = 4 * 9 = 36 = 1 mod 7
        assert_eq!(g.coeff(&[0]).value(), 1);
    }

    #[test]
    fn honest_run_accepts_for_all_seeds() {
        let inst = xy_instance(1);
        for seed in 0..20u64 {
            let mut sampler = SeededPrng::from_u64_seed(seed);
            let res =
                run_standard(&inst, &mut HonestStdProver, &mut sampler, "test").unwrap();
            assert!(res.accepted, "seed {seed}");
            assert_eq!(res.transcript.metrics.rounds, 2);
            assert_eq!(res.transcript.metrics.verifier_random_elements, 2);
        }
    }

    #[test]
    fn honest_random_instances_metric_exactness() {
        let field = PrimeField::new((1 << 61) - 1).unwrap();
        let h = Domain::explicit((0..4).map(|v| field.elem(v)).collect()).unwrap();
        let mut rng = SeededPrng::from_seed([3u8; 32]);
        for mu in [2usize, 3, 6] {
            let f = random_poly(field, mu, 3, 3 * mu as u32, 0.3, &mut rng).unwrap();
            let truth = f.sum_over_cube_bruteforce(&h).unwrap();
            let inst = StdInstance::new(
                f,
                h.clone(),
                truth,
                UnivariateChecker::new(UniMode::CoefficientSide),
            )
            .unwrap();
            let mut sampler = SeededPrng::from_seed([mu as u8; 32]);
            let res = run_standard(&inst, &mut HonestStdProver, &mut sampler, "test").unwrap();
            assert!(res.accepted);
            assert_eq!(res.transcript.metrics.rounds, mu as u64);
            assert_eq!(res.transcript.metrics.verifier_random_elements, mu as u64);
            assert_eq!(res.transcript.metrics.oracle_queries, 1);
            for msg in &res.messages {
                assert!(msg.actual_partial_degree() <= 3);
            }
        }
    }

    #[test]
    fn false_claim_rejects_at_first_round_with_honest_prover() {
        let inst = xy_instance(0); // true sum is 1
        let mut sampler = SeededPrng::from_u64_seed(1);
        let res = run_standard(&inst, &mut HonestStdProver, &mut sampler, "test").unwrap();
        assert!(!res.accepted);
        assert_eq!(res.reject, Some(StdReject::RoundSumMismatch { round: 1 }));
    }

    #[test]
    fn degree_violating_message_auto_rejects() {
        struct Overshoot;
        impl StdProver for Overshoot {
            fn round_message(&mut self, _r: usize, honest: &MPoly, _c: FieldElement) -> MPoly {
                let f = honest.field();
                let mut bad = MPoly::zero(f, 1, 5, 5).unwrap();
                bad.add_to_term(&[5], f.one()).unwrap();
                bad
            }
        }
        let inst = xy_instance(1);
        let mut sampler = SeededPrng::from_u64_seed(2);
        let res = run_standard(&inst, &mut Overshoot, &mut sampler, "test").unwrap();
        assert_eq!(res.reject, Some(StdReject::MalformedMessage { round: 1 }));
    }

    #[test]
    fn soundness_bound_closed_form() {
        // mu = 1 reduces to max(p, d/q)
        assert_eq!(std_soundness_bound(1, 2, 7, 0.1).unwrap(), (2.0f64 / 7.0).max(0.1));
        assert_eq!(std_soundness_bound(1, 0, 7, 0.0).unwrap(), 0.0);
        // p <= d/q <= 1 implies bound <= mu * d / q
        let mut rng = SeededPrng::from_seed([9u8; 32]);
        for _ in 0..100 {
            let mu = 1 + (rng.next_u64() % 8) as usize;
            let q = 5 + rng.next_u64() % 1000;
            let d = (rng.next_u64() % (q - 1).min(6)) as u32;
            let p = if d == 0 {
                0.0
            } else {
                (rng.next_u64() % 1000) as f64 / 1000.0 * (d as f64 / q as f64)
            };
            let bound = std_soundness_bound(mu, d, q, p).unwrap();
            assert!(
                bound <= mu as f64 * d as f64 / q as f64 + 1e-12,
                "mu={mu} d={d} q={q} p={p}: {bound}"
            );
        }
        assert!(std_soundness_bound(0, 1, 7, 0.0).is_err());
        assert!(std_soundness_bound(2, 7, 7, 0.0).is_err());
        assert!(std_soundness_bound(2, 1, 7, 1.5).is_err());
    }
}
