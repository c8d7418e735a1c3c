//! Divide-and-conquer sumcheck protocols.
//!
//! Two variants over an arity `μ = 2^m` polynomial:
//!
//! * [`dcs_run`] — the unfolded reference protocol: each round splits one
//!   instance into two of half the arity (the suffix sum, sent by the
//!   prover, and the prefix restriction, a virtual oracle), doubling the
//!   instance count; the `μ` leaves are settled by querying all of `H`.
//! * [`fold_run`] — the folded single-track protocol: the two half-arity
//!   instances are merged by a random linear combination each round, so one
//!   working polynomial survives. `log μ + 1` rounds, and a query phase that
//!   recomputes the running claim from `m` queries, spot-checks the final
//!   oracle's consistency at one point, and settles the last univariate sum
//!   with the configured checker.
//!
//! Randomness accounting: the commit phase draws `2^(m-i) + 1` elements per
//! round, `μ - 1 + log μ` in total, plus the consistency point. The
//! published totals count the commit-phase challenge block as `μ + log μ`;
//! transcripts report both the drawn count and the published convention
//! (drawn + 1) side by side.

use crate::domain::{power_sums, Domain};
use crate::error::ProtocolError;
use crate::field::FieldElement;
use crate::mpoly::MPoly;
use crate::ops::OpCounter;
use crate::oracle::{OracleId, OracleRegistry, VirtualExpr};
use crate::prng::ChallengeSampler;
use crate::transcript::Transcript;
use crate::univariate::{
    coefficient_side_check, coset_check_oracle, naive_check, UniMode, UnivariateChecker,
};
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct FoldInstance {
    pub f: MPoly,
    pub domain: Domain,
    pub claimed: FieldElement,
    pub checker: UnivariateChecker,
}

impl FoldInstance {
    pub fn new(
        f: MPoly,
        domain: Domain,
        claimed: FieldElement,
        checker: UnivariateChecker,
    ) -> Result<Self, ProtocolError> {
        let mu = f.arity();
        if mu < 2 || !mu.is_power_of_two() {
            return Err(ProtocolError::ArityNotPowerOfTwo(mu));
        }
        if f.partial_bound() as usize > domain.size() - 1 {
            return Err(ProtocolError::DegreeVsDomain {
                d: f.partial_bound(),
                hmax: domain.size() - 1,
            });
        }
        checker.validate_domain(&domain)?;
        Ok(FoldInstance {
            f,
            domain,
            claimed,
            checker,
        })
    }

    pub fn log_mu(&self) -> usize {
        self.f.arity().trailing_zeros() as usize
    }
}

/// Instance data adversarial strategies may consult when shaping a message.
pub struct FoldCtx<'a> {
    pub domain: &'a Domain,
    pub d: u32,
    pub big_d: u32,
}

/// The prover side of the folded protocol. The engine hands over the honest
/// message; strategies may substitute anything within the declared bounds.
pub trait FoldProver {
    /// Commit-phase message for loop `i` (1-based): the claimed suffix sum of
    /// the working polynomial. `running_claim` is `S^(i-1)`.
    fn round_message(
        &mut self,
        i: usize,
        honest: &MPoly,
        running_claim: FieldElement,
        ctx: &FoldCtx,
    ) -> MPoly;

    /// The final univariate polynomial. `final_claim` is `S^(m)` as
    /// determined by the interaction so far.
    fn final_message(
        &mut self,
        honest: &MPoly,
        final_claim: FieldElement,
        ctx: &FoldCtx,
    ) -> MPoly;
}

pub struct HonestFoldProver;

impl FoldProver for HonestFoldProver {
    fn round_message(
        &mut self,
        _i: usize,
        honest: &MPoly,
        _claim: FieldElement,
        _ctx: &FoldCtx,
    ) -> MPoly {
        honest.clone()
    }

    fn final_message(
        &mut self,
        honest: &MPoly,
        _claim: FieldElement,
        _ctx: &FoldCtx,
    ) -> MPoly {
        honest.clone()
    }
}

/// Per-round record of the commit phase.
pub struct CommitRound {
    pub f0_id: OracleId,
    pub f0_sent: MPoly,
    pub alpha: Vec<FieldElement>,
    pub z: FieldElement,
    /// Virtual oracle for the folded working polynomial `f^(i)`.
    pub virt_id: OracleId,
    /// Materialized working polynomial after this round (prover side).
    pub working: MPoly,
    /// `S^(i)` from the recurrence (prover-side bookkeeping).
    pub running_claim: FieldElement,
}

pub struct CommitPhaseState {
    pub input_id: OracleId,
    pub rounds: Vec<CommitRound>,
    pub final_id: OracleId,
    pub final_sent: MPoly,
    /// `S^(m)` per the prover's bookkeeping.
    pub final_claim: FieldElement,
    /// Set if a commit-phase message violated its declared bounds.
    pub malformed_round: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FoldReject {
    /// A prover message violated the declared arity/degree bounds and was
    /// auto-rejected before the query phase.
    MalformedMessage,
    /// The deterministic final sum check failed.
    SumMismatch,
    /// The consistency spot check of the final oracle failed.
    ConsistencyFail,
    /// The univariate sub-protocol rejected.
    UnivariateFail,
}

pub struct FoldRunResult {
    pub accepted: bool,
    pub reject: Option<FoldReject>,
    pub transcript: Transcript,
    /// `S^(m)` as the verifier computed it in the query phase.
    pub s_final: Option<FieldElement>,
    pub state: CommitPhaseState,
}

/// Commit phase: `m` folding loops plus the final univariate message.
///
/// The honest prover materializes the working polynomial explicitly to
/// compute the next suffix sum; its folding cost is tracked as
/// materialization, separate from the power-sum collapse the complexity
/// accounting bounds. The verifier-side working polynomial exists only as a
/// chain of virtual oracles.
pub fn fold_commit_phase(
    inst: &FoldInstance,
    prover: &mut dyn FoldProver,
    reg: &mut OracleRegistry,
    tr: &mut Transcript,
    sampler: &mut dyn ChallengeSampler,
) -> Result<CommitPhaseState, ProtocolError> {
    let field = inst.f.field();
    let m = inst.log_mu();
    let d = inst.f.partial_bound();
    let big_d = inst.f.total_bound();
    let ctx = FoldCtx {
        domain: &inst.domain,
        d,
        big_d,
    };

    let mut powersum_ops = OpCounter::new();
    let sigma = power_sums(&inst.domain, d, &mut powersum_ops);
    tr.metrics.prover.powersum.merge(&powersum_ops);

    let input_id = reg.register(inst.f.clone(), "f");
    let mut working = inst.f.clone();
    let mut running_claim = inst.claimed;
    let mut virt_prev = input_id;
    let mut rounds: Vec<CommitRound> = Vec::with_capacity(m);
    let mut malformed_round = None;

    for i in 1..=m {
        let half = working.arity() / 2;
        let honest_f0 = working.partial_sum_suffix_with(
            &sigma,
            half,
            &mut tr.metrics.prover.summation,
        )?;
        let sent = prover.round_message(i, &honest_f0, running_claim, &ctx);
        if !sent.fits_profile(half, d, big_d) && malformed_round.is_none() {
            malformed_round = Some(i);
        }
        let label = format!("f0^{i}");
        let f0_id = reg.register(sent.clone(), &label);
        tr.oracle_sent(&label, f0_id.0, half);

        let alpha: Vec<FieldElement> = (0..half).map(|_| field.sample(sampler)).collect();
        let z = field.sample(sampler);
        let mut challenge = alpha.clone();
        challenge.push(z);
        tr.challenge_sent(&format!("alpha^{i}||z^{i}"), &challenge);

        // S^(i) = z * S^(i-1) + f0^(i)(alpha): prover-side bookkeeping
        let mut book = OpCounter::new();
        let f0_at_alpha = sent.eval(&alpha, &mut book)?;
        running_claim = z * running_claim + f0_at_alpha;
        book.mul(1);
        book.add(1);

        // f^(i) = z * f0^(i) + f^(i-1)(alpha, .), materialized by the prover
        let f1 = working.partial_eval_prefix(&alpha, &mut book)?;
        working = MPoly::fold(z, &sent, &f1, &mut book)?;
        tr.metrics.prover.materialization.merge(&book);

        // the verifier's view of the same polynomial, as a virtual oracle
        let v1 = reg.register_virtual(
            VirtualExpr::PrefixEval {
                base: virt_prev,
                alpha: alpha.clone(),
            },
            &format!("f1^{i}"),
        )?;
        let virt_id = reg.register_virtual(
            VirtualExpr::Fold {
                z,
                left: f0_id,
                right: v1,
            },
            &format!("f^{i}"),
        )?;
        virt_prev = virt_id;

        rounds.push(CommitRound {
            f0_id,
            f0_sent: sent,
            alpha,
            z,
            virt_id,
            working: working.clone(),
            running_claim,
        });
    }

    let final_sent = prover.final_message(&working, running_claim, &ctx);
    if !final_sent.fits_profile(1, d, big_d) && malformed_round.is_none() {
        malformed_round = Some(m + 1);
    }
    let final_id = reg.register(final_sent.clone(), "f^m");
    if inst.checker.mode == UniMode::CoefficientSide {
        // sent in full: the verifier holds the coefficients
        let coeffs = final_sent.to_univariate_coeffs()?;
        tr.message_sent("f^m", &coeffs);
    } else {
        tr.oracle_sent("f^m", final_id.0, 1);
    }

    Ok(CommitPhaseState {
        input_id,
        rounds,
        final_id,
        final_sent,
        final_claim: running_claim,
        malformed_round,
    })
}

/// Query phase: recompute `S^(m)` from `m` queries, spot-check the final
/// oracle, and settle the univariate sum with the configured checker.
///
/// Steps 1-2 cost the verifier exactly `2m` additions and `3m + 1`
/// multiplications: `m` for the suffix products of the fold challenges,
/// `m + 1` products and `m` sums for the claim combination, and `m` products
/// and `m` sums for the consistency combination.
pub fn fold_query_phase(
    inst: &FoldInstance,
    state: &CommitPhaseState,
    reg: &mut OracleRegistry,
    tr: &mut Transcript,
    sampler: &mut dyn ChallengeSampler,
) -> Result<(Option<FoldReject>, FieldElement), ProtocolError> {
    let field = inst.f.field();
    let m = state.rounds.len();

    // Step 1: query f0^(j)(alpha^(j)) and combine
    let q_vals: Vec<FieldElement> = state
        .rounds
        .iter()
        .map(|r| reg.query(r.f0_id, &r.alpha, tr))
        .collect::<Result<_, _>>()?;

    let one = field.one();
    let mut suffix = vec![one; m + 1];
    {
        let vops = &mut tr.metrics.verifier.lincomb;
        for j in (0..m).rev() {
            suffix[j] = state.rounds[j].z * suffix[j + 1];
            vops.mul(1);
        }
        let mut s_final = suffix[0] * inst.claimed;
        vops.mul(1);
        for j in 0..m {
            let term = suffix[j + 1] * q_vals[j];
            vops.mul(1);
            s_final = s_final + term;
            vops.add(1);
        }
        suffix[0] = s_final; // reuse slot 0 to carry the combined claim
    }
    let s_final = suffix[0];

    // Step 2: consistency of the final oracle at a fresh point
    let beta = field.sample(sampler);
    tr.challenge_sent("beta", &[beta]);

    let lhs = reg.query(state.final_id, &[beta], tr)?;
    let mut full_point: Vec<FieldElement> = Vec::with_capacity(inst.f.arity());
    for r in &state.rounds {
        full_point.extend_from_slice(&r.alpha);
    }
    full_point.push(beta);
    let f_full = reg.query(state.input_id, &full_point, tr)?;

    let mut rhs = f_full;
    for j in 0..m {
        // f0^(j) evaluated in the last mu/2^j variables: (alpha^(j+1..m), beta)
        let mut tail: Vec<FieldElement> = Vec::new();
        for r in &state.rounds[j + 1..] {
            tail.extend_from_slice(&r.alpha);
        }
        tail.push(beta);
        let r_val = reg.query(state.rounds[j].f0_id, &tail, tr)?;
        let vops = &mut tr.metrics.verifier.lincomb;
        let term = state.rounds[j].z * r_val;
        vops.mul(1);
        rhs = rhs + term;
        vops.add(1);
    }
    let consistency_ok = lhs == rhs;

    // Step 3: univariate sumcheck on (f^(m), S^(m))
    let (sum_ok, identity_ok) = match inst.checker.mode {
        UniMode::Naive => {
            let ok = naive_check(reg, state.final_id, &inst.domain, s_final, tr)?;
            (Some(ok), None)
        }
        UniMode::CoefficientSide => {
            let held = reg
                .poly(state.final_id)
                .expect("final oracle is concrete")
                .clone();
            let ok = coefficient_side_check(&held, &inst.domain, s_final, tr)?;
            (Some(ok), None)
        }
        UniMode::CosetIop => {
            let f_poly = reg
                .poly(state.final_id)
                .expect("final oracle is concrete")
                .clone();
            let out = coset_check_oracle(
                reg,
                tr,
                sampler,
                state.final_id,
                &f_poly,
                &inst.domain,
                s_final,
            )?;
            (None, Some(out.identity_ok))
        }
    };

    let reject = if state.malformed_round.is_some() {
        Some(FoldReject::MalformedMessage)
    } else if sum_ok == Some(false) {
        Some(FoldReject::SumMismatch)
    } else if !consistency_ok {
        Some(FoldReject::ConsistencyFail)
    } else if identity_ok == Some(false) {
        Some(FoldReject::UnivariateFail)
    } else {
        None
    };
    Ok((reject, s_final))
}

/// Full folded run against the given prover.
pub fn fold_run(
    inst: &FoldInstance,
    prover: &mut dyn FoldProver,
    sampler: &mut dyn ChallengeSampler,
    seed_label: &str,
) -> Result<FoldRunResult, ProtocolError> {
    let mut tr = Transcript::new("fold", seed_label, &inst.f.digest());
    let mut reg = OracleRegistry::new(inst.f.field());
    let state = fold_commit_phase(inst, prover, &mut reg, &mut tr, sampler)?;
    let (reject, s_final) = fold_query_phase(inst, &state, &mut reg, &mut tr, sampler)?;
    tr.metrics.concrete_oracle_touches = reg.concrete_query_total();
    tr.finish(1);
    Ok(FoldRunResult {
        accepted: reject.is_none(),
        reject,
        transcript: tr,
        s_final: Some(s_final),
        state,
    })
}

/// Closed-form soundness bound of the folded protocol, together with the
/// simplified cap `(m+1)(D+1)/q` valid when `p <= (D+1)/q <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FoldBound {
    pub exact: f64,
    pub simple_cap: Option<f64>,
}

pub fn fold_soundness_bound(m: usize, big_d: u32, q: u64, p: f64) -> Result<FoldBound, ProtocolError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ProtocolError::InvalidParameter(format!(
            "p = {p} out of [0, 1]"
        )));
    }
    if big_d as u64 >= q {
        return Err(ProtocolError::InvalidParameter(format!(
            "D = {big_d} must be below the field size {q}"
        )));
    }
    let qf = q as f64;
    let dq = big_d as f64 / qf;
    let a = (big_d as f64 + 1.0) / qf - big_d as f64 / (qf * qf);
    let exact = 1.0 - (1.0 - a).powi(m as i32) * (1.0 - p.max(dq));
    let ratio = (big_d as f64 + 1.0) / qf;
    let simple_cap = if p <= ratio && ratio <= 1.0 {
        Some((m as f64 + 1.0) * ratio)
    } else {
        None
    };
    Ok(FoldBound { exact, simple_cap })
}

/// Expected transcript metrics per configuration; the oracle for metric
/// assertions. `randomness_published` follows the published convention
/// (commit-phase block counted as `μ + log μ`), `randomness_drawn` counts
/// the coins actually consumed; they differ by exactly one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExpectedFoldMetrics {
    pub rounds: u64,
    pub randomness_published: u64,
    pub randomness_drawn: u64,
    pub queries: u64,
    pub commitments: u64,
    pub verifier_steps12_adds: u64,
    pub verifier_steps12_muls: u64,
    /// Cap on the prover's summation-step operations: the per-term power-sum
    /// collapse products plus the shared power-sum table,
    /// `Σ_i μ_i d^(μ_i) + 2d|H|`.
    pub prover_summation_cap: u128,
}

pub fn fold_metrics_expected(
    mu: usize,
    d: u32,
    h_size: usize,
    mode: UniMode,
) -> ExpectedFoldMetrics {
    assert!(mu >= 2 && mu.is_power_of_two());
    let m = mu.trailing_zeros() as u64;
    let mut e = ExpectedFoldMetrics {
        rounds: m + 1,
        randomness_published: mu as u64 + m + 1,
        randomness_drawn: mu as u64 + m,
        queries: 2 * (m + 1),
        commitments: m + 1,
        verifier_steps12_adds: 2 * m,
        verifier_steps12_muls: 3 * m + 1,
        prover_summation_cap: summation_cap(mu, d, h_size),
    };
    match mode {
        UniMode::CoefficientSide => {}
        UniMode::Naive => {
            e.queries += h_size as u64;
        }
        UniMode::CosetIop => {
            e.rounds += 1;
            e.randomness_published += 1;
            e.randomness_drawn += 1;
            e.queries += 2;
            e.commitments += 2;
        }
    }
    e
}

/// `Σ_{i=1..m} μ_i d^(μ_i) + 2d|H|` with `μ_i = 2^(m-i)`.
pub fn summation_cap(mu: usize, d: u32, h_size: usize) -> u128 {
    let m = mu.trailing_zeros() as usize;
    let mut total: u128 = 0;
    for i in 1..=m {
        let mu_i = (mu >> i) as u128;
        total += mu_i * (d as u128).pow(mu_i as u32);
    }
    total + 2 * d as u128 * h_size as u128
}

// ---------------------------------------------------------------------------
// The unfolded reference protocol
// ---------------------------------------------------------------------------

/// The prover side of the unfolded protocol: one message per solid tree node.
pub trait DcsProver {
    fn node_message(
        &mut self,
        depth: usize,
        node: usize,
        honest: &MPoly,
        claim: FieldElement,
        ctx: &FoldCtx,
    ) -> MPoly;
}

pub struct HonestDcsProver;

impl DcsProver for HonestDcsProver {
    fn node_message(
        &mut self,
        _depth: usize,
        _node: usize,
        honest: &MPoly,
        _claim: FieldElement,
        _ctx: &FoldCtx,
    ) -> MPoly {
        honest.clone()
    }
}

pub struct DcsRunResult {
    pub accepted: bool,
    pub transcript: Transcript,
    /// Prover-sent oracles per depth (1, 2, 4, ... with shared randomness
    /// the same as without).
    pub sent_per_depth: Vec<usize>,
    pub leaf_checks: usize,
    pub failed_leaves: usize,
}

/// Runs the unfolded protocol. Each depth splits every live instance into
/// the suffix-sum child (sent by the prover) and the prefix-restriction
/// child (virtual, out of the prover's hands). Leaves are settled by
/// querying all of `H`, the base case carried out by the verifier herself.
/// With `shared_randomness` all instances at a depth reuse one challenge
/// vector.
pub fn dcs_run(
    f: &MPoly,
    domain: &Domain,
    claimed: FieldElement,
    prover: &mut dyn DcsProver,
    sampler: &mut dyn ChallengeSampler,
    shared_randomness: bool,
    seed_label: &str,
) -> Result<DcsRunResult, ProtocolError> {
    let mu = f.arity();
    if mu < 2 || !mu.is_power_of_two() {
        return Err(ProtocolError::ArityNotPowerOfTwo(mu));
    }
    if f.partial_bound() as usize > domain.size() - 1 {
        return Err(ProtocolError::DegreeVsDomain {
            d: f.partial_bound(),
            hmax: domain.size() - 1,
        });
    }
    let field = f.field();
    let m = mu.trailing_zeros() as usize;
    let d = f.partial_bound();
    let big_d = f.total_bound();
    let ctx = FoldCtx {
        domain,
        d,
        big_d,
    };

    let mut tr = Transcript::new("dcs", seed_label, &f.digest());
    let mut reg = OracleRegistry::new(field);
    let input_id = reg.register(f.clone(), "f");

    let mut powersum_ops = OpCounter::new();
    let sigma = power_sums(domain, d, &mut powersum_ops);
    tr.metrics.prover.powersum.merge(&powersum_ops);

    struct Node {
        oracle: OracleId,
        poly: MPoly,
        claim: FieldElement,
        malformed: bool,
    }
    let mut nodes = vec![Node {
        oracle: input_id,
        poly: f.clone(),
        claim: claimed,
        malformed: false,
    }];
    let mut sent_per_depth = Vec::with_capacity(m);

    for depth in 0..m {
        let half = (mu >> depth) / 2;
        // prover messages for the whole depth form one block
        let mut sent_polys = Vec::with_capacity(nodes.len());
        for (idx, node) in nodes.iter().enumerate() {
            let honest = node.poly.partial_sum_suffix_with(
                &sigma,
                half,
                &mut tr.metrics.prover.summation,
            )?;
            let sent = prover.node_message(depth, idx, &honest, node.claim, &ctx);
            let malformed = !sent.fits_profile(half, d, big_d);
            let label = format!("f{}_{}", depth, idx);
            let id = reg.register(sent.clone(), &label);
            tr.oracle_sent(&label, id.0, half);
            sent_polys.push((id, sent, malformed));
        }
        sent_per_depth.push(sent_polys.len());

        // challenges: one shared vector, or one per live instance
        let shared_alpha: Option<Vec<FieldElement>> = if shared_randomness {
            let alpha: Vec<FieldElement> = (0..half).map(|_| field.sample(sampler)).collect();
            tr.challenge_sent(&format!("alpha_depth{depth}"), &alpha);
            Some(alpha)
        } else {
            None
        };

        let mut next = Vec::with_capacity(nodes.len() * 2);
        for (node, (id0, sent, malformed)) in nodes.iter().zip(sent_polys) {
            let alpha = match &shared_alpha {
                Some(a) => a.clone(),
                None => {
                    let a: Vec<FieldElement> =
                        (0..half).map(|_| field.sample(sampler)).collect();
                    tr.challenge_sent(&format!("alpha_depth{depth}"), &a);
                    a
                }
            };
            // S_1 = f0(alpha), requested when needed
            let s1 = reg.query(id0, &alpha, &mut tr)?;
            let v1 = reg.register_virtual(
                VirtualExpr::PrefixEval {
                    base: node.oracle,
                    alpha: alpha.clone(),
                },
                "f1",
            )?;
            let mut mat = OpCounter::new();
            let f1_poly = node.poly.partial_eval_prefix(&alpha, &mut mat)?;
            tr.metrics.prover.materialization.merge(&mat);
            next.push(Node {
                oracle: id0,
                poly: sent.clone(),
                claim: node.claim,
                malformed: node.malformed || malformed,
            });
            next.push(Node {
                oracle: v1,
                poly: f1_poly,
                claim: s1,
                malformed: node.malformed,
            });
        }
        nodes = next;
    }

    // base case: mu univariate sums checked by hand
    let mut failed = 0usize;
    for node in &nodes {
        let ok =
            !node.malformed && naive_check(&reg, node.oracle, domain, node.claim, &mut tr)?;
        if !ok {
            failed += 1;
        }
    }

    tr.metrics.concrete_oracle_touches = reg.concrete_query_total();
    tr.finish(0);
    Ok(DcsRunResult {
        accepted: failed == 0,
        transcript: tr,
        sent_per_depth,
        leaf_checks: nodes.len(),
        failed_leaves: failed,
    })
}
