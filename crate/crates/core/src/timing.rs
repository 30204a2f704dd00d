//! Distribution-time models: link success probability, waiting times for a
//! chain of heralded links, the direct-transmission baseline, and the
//! budget-constrained maximum-distance search.
//!
//! Waiting times follow the standard heralded-link model: every attempt
//! cycle lasts `L0/c` (photon flight to the midpoint station plus the
//! heralding signal back), each link succeeds per cycle with probability
//! `P_link`, and the chain completes when all links have succeeded. The
//! expected completion time telescopes over stage minima,
//!
//! `T = (L0/c) · Σ_{n=1..N} 1 / (1 - (1 - P_link)^n)`,
//!
//! and the Monte Carlo sampler draws exactly that stage decomposition (one
//! geometric variable per stage), so its mean matches the closed form for
//! every `P_link` — including the `P_link → 1` regime where stage counts and
//! the naive max-of-geometrics picture differ.

use alloc::collections::BTreeMap;
use rand_core::SeedableRng;

use crate::channels::NoiseModel;
use crate::error::{validation, Result};
use crate::protocol::chain::{
    simulate_chain, ChainConfig, Encoding, SwapVersion,
};
use crate::random::uniform;

/// Photon and channel parameters.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HardwareParams {
    /// Probability that an ion emits a photon into the collection mode,
    /// including frequency conversion.
    pub p: f64,
    /// Photon detector efficiency.
    pub eta_d: f64,
    /// Fiber attenuation length in km.
    pub l_att_km: f64,
    /// Speed of light in fiber, km/s.
    pub c_fiber_km_s: f64,
    /// Photon-pair creation rate of the direct-transmission source, Hz.
    pub pair_rate_hz: f64,
    /// Fidelity of a heralded ion-ion elementary link.
    pub link_fidelity: f64,
    /// Keep the 1/2 success cap of the linear-optics Bell measurement in
    /// the link success probability. On by default; exposed because the
    /// uncapped variant shifts headline distances by about one attenuation
    /// length.
    #[cfg_attr(feature = "serde", serde(default = "default_true"))]
    pub half_bsm_prefactor: bool,
}

#[cfg(feature = "serde")]
fn default_true() -> bool {
    true
}

impl HardwareParams {
    /// Demonstrated parameters: p = 0.35, η_d = 0.9, L_att = 22 km,
    /// c = 2·10⁵ km/s, 10 GHz pair source, 99% link fidelity.
    pub fn baseline() -> Self {
        HardwareParams {
            p: 0.35,
            eta_d: 0.9,
            l_att_km: 22.0,
            c_fiber_km_s: 2.0e5,
            pair_rate_hz: 1.0e10,
            link_fidelity: 0.99,
            half_bsm_prefactor: true,
        }
    }

    /// Projected parameters: p = 0.75 and 99.9% link fidelity.
    pub fn improved() -> Self {
        HardwareParams { p: 0.75, link_fidelity: 0.999, ..HardwareParams::baseline() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) || !(0.0..=1.0).contains(&self.eta_d) {
            return Err(validation("p and eta_d must lie in [0, 1]"));
        }
        if !(self.l_att_km > 0.0) || !(self.c_fiber_km_s > 0.0) || !(self.pair_rate_hz > 0.0) {
            return Err(validation("lengths, speeds and rates must be positive"));
        }
        if !(0.25..=1.0).contains(&self.link_fidelity) {
            return Err(validation("link fidelity must lie in [1/4, 1]"));
        }
        Ok(())
    }
}

/// Breakdown of a distribution-time estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TimingEstimate {
    pub expected_time_s: f64,
    pub classical_comm_bound_s: f64,
    /// Average number of end-to-end repetitions (1/acceptance for
    /// version-1 swapping, 1 otherwise).
    pub repetition_factor: f64,
    pub total_time_s: f64,
}

/// Success probability of one elementary-link attempt:
/// `P_link = (1/2)·p²·η_t²·η_d²` with per-photon transmission
/// `η_t = exp(-L0/(2·L_att))` — each photon crosses half the link to the
/// midpoint station. The 1/2 is the linear-optics Bell-measurement bound
/// (dropped when `half_bsm_prefactor` is off).
pub fn link_success_probability(hw: &HardwareParams, link_length_km: f64) -> Result<f64> {
    hw.validate()?;
    if !(link_length_km > 0.0) {
        return Err(validation("link length must be positive"));
    }
    let eta_t_sq = libm::exp(-link_length_km / hw.l_att_km);
    let p = hw.p * hw.p * eta_t_sq * hw.eta_d * hw.eta_d;
    Ok(if hw.half_bsm_prefactor { 0.5 * p } else { p })
}

/// Expected time until every link of the chain has been heralded.
pub fn expected_chain_time(p_link: f64, num_links: u32, link_length_km: f64, c_km_s: f64) -> Result<f64> {
    if !(p_link > 0.0 && p_link <= 1.0) {
        return Err(validation("P_link must lie in (0, 1]"));
    }
    if num_links < 1 || !(link_length_km > 0.0) || !(c_km_s > 0.0) {
        return Err(validation("invalid chain geometry"));
    }
    let cycle = link_length_km / c_km_s;
    let mut sum = 0.0f64;
    for n in 1..=num_links {
        sum += 1.0 / stage_success(p_link, n);
    }
    Ok(cycle * sum)
}

/// `1 - (1 - p)^n`, evaluated stably for small `p`.
fn stage_success(p_link: f64, n: u32) -> f64 {
    if p_link >= 1.0 {
        return 1.0;
    }
    -libm::expm1(n as f64 * libm::log1p(-p_link))
}

/// The coarse closed-form estimate `(3/2)^n · (L0/c) / (p²·η_t²·η_d²)` for a
/// chain of `2^n` links, kept as printed in the standard treatment (no 1/2
/// Bell-measurement factor).
pub fn approx_chain_time(hw: &HardwareParams, n_doublings: u32, link_length_km: f64) -> Result<f64> {
    hw.validate()?;
    if !(link_length_km > 0.0) {
        return Err(validation("link length must be positive"));
    }
    let eta_t_sq = libm::exp(-link_length_km / hw.l_att_km);
    let per_link = hw.p * hw.p * eta_t_sq * hw.eta_d * hw.eta_d;
    let cycle = link_length_km / hw.c_fiber_km_s;
    Ok(libm::pow(1.5, n_doublings as f64) * cycle / per_link)
}

/// One geometric draw (attempt count, support {1, 2, ...}) by inversion.
fn geometric(success: f64, u: f64) -> u64 {
    if success >= 1.0 {
        return 1;
    }
    let g = libm::floor(libm::log1p(-u) / libm::log1p(-success)) + 1.0;
    g as u64
}

/// Draws one chain completion time: a sum of stage-wise geometric waiting
/// times (stage `n` succeeds with probability `1-(1-P_link)^n`), times the
/// attempt cycle `L0/c`. Deterministic for a fixed seed.
pub fn sample_chain_time(
    p_link: f64,
    num_links: u32,
    link_length_km: f64,
    c_km_s: f64,
    rng_seed: u64,
) -> Result<f64> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(rng_seed);
    sample_with(&mut rng, p_link, num_links, link_length_km, c_km_s)
}

fn sample_with(
    rng: &mut rand_chacha::ChaCha8Rng,
    p_link: f64,
    num_links: u32,
    link_length_km: f64,
    c_km_s: f64,
) -> Result<f64> {
    if !(p_link > 0.0 && p_link <= 1.0) {
        return Err(validation("P_link must lie in (0, 1]"));
    }
    if num_links < 1 || !(link_length_km > 0.0) || !(c_km_s > 0.0) {
        return Err(validation("invalid chain geometry"));
    }
    let cycle = link_length_km / c_km_s;
    let mut attempts = 0u64;
    for n in (1..=num_links).rev() {
        attempts += geometric(stage_success(p_link, n), uniform(rng));
    }
    Ok(attempts as f64 * cycle)
}

/// Trials per deterministic chunk of the Monte Carlo mean; chunk `k` uses
/// ChaCha stream `k + 1` of the seed, so the mean is independent of how
/// chunks are scheduled across workers.
pub const TRIAL_CHUNK: u64 = 1024;

/// Sum of `count` sampled completion times from chunk `chunk_index`.
pub fn sample_chain_time_chunk(
    p_link: f64,
    num_links: u32,
    link_length_km: f64,
    c_km_s: f64,
    seed: u64,
    chunk_index: u64,
    count: u64,
) -> Result<f64> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk_index + 1);
    let mut sum = 0.0;
    for _ in 0..count {
        sum += sample_with(&mut rng, p_link, num_links, link_length_km, c_km_s)?;
    }
    Ok(sum)
}

/// Monte Carlo mean completion time over `trials` draws.
pub fn sampled_mean_chain_time(
    p_link: f64,
    num_links: u32,
    link_length_km: f64,
    c_km_s: f64,
    seed: u64,
    trials: u64,
) -> Result<f64> {
    if trials == 0 {
        return Err(validation("trials must be positive"));
    }
    let mut total = 0.0;
    let mut chunk = 0u64;
    let mut remaining = trials;
    while remaining > 0 {
        let count = remaining.min(TRIAL_CHUNK);
        total += sample_chain_time_chunk(p_link, num_links, link_length_km, c_km_s, seed, chunk, count)?;
        chunk += 1;
        remaining -= count;
    }
    Ok(total / trials as f64)
}

/// Full distribution-time estimate for a configured chain.
///
/// `total = expected · repetition + N·L0/c`, where the repetition factor is
/// `1/acceptance` for version-1 (error-detecting) swapping and 1 otherwise,
/// and the classical-communication time enters as its upper bound `N·L0/c`.
pub fn total_time(config: &ChainConfig, hw: &HardwareParams, acceptance_probability: f64) -> Result<TimingEstimate> {
    config.validate()?;
    if !(acceptance_probability > 0.0 && acceptance_probability <= 1.0) {
        return Err(validation("acceptance probability must lie in (0, 1]"));
    }
    let p_link = link_success_probability(hw, config.link_length_km)?;
    let expected = expected_chain_time(p_link, config.num_links, config.link_length_km, hw.c_fiber_km_s)?;
    let classical = config.num_links as f64 * config.link_length_km / hw.c_fiber_km_s;
    let repetition = match (config.encoding, config.swap_version) {
        (Encoding::Dfs, Some(SwapVersion::V1)) => 1.0 / acceptance_probability,
        _ => 1.0,
    };
    Ok(TimingEstimate {
        expected_time_s: expected,
        classical_comm_bound_s: classical,
        repetition_factor: repetition,
        total_time_s: expected * repetition + classical,
    })
}

/// Expected time to distribute a photon pair directly through fiber:
/// `1/(rate · exp(-d/L_att) · η_d²) + d/c`.
pub fn direct_transmission_time(total_distance_km: f64, hw: &HardwareParams) -> Result<f64> {
    hw.validate()?;
    if !(total_distance_km > 0.0) {
        return Err(validation("distance must be positive"));
    }
    let transmission = libm::exp(-total_distance_km / hw.l_att_km);
    let waiting = 1.0 / (hw.pair_rate_hz * transmission * hw.eta_d * hw.eta_d);
    Ok(waiting + total_distance_km / hw.c_fiber_km_s)
}

/// Best point found by [`max_distance`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MaxDistanceResult {
    pub distance_km: f64,
    pub num_links: u32,
    pub link_length_km: f64,
    pub fidelity: f64,
    pub acceptance_probability: f64,
    pub total_time_s: f64,
}

/// Search outcome; `best` is `None` when no grid point meets both the time
/// budget and the fidelity floor.
#[derive(Debug, Clone)]
pub struct MaxDistanceOutcome {
    pub best: Option<MaxDistanceResult>,
    /// Largest link count whose fidelity clears the floor at short distance.
    pub links_cap: u32,
}

const SEARCH_MAX_LINKS: u32 = 128;
const SEARCH_MAX_LINK_KM: u32 = 2000;

/// Deterministic grid search (1 km link-length resolution, integer link
/// counts) for the largest total distance whose end-to-end fidelity stays at
/// or above `fidelity_floor` and whose distribution-time estimate fits in
/// `time_budget_s`.
///
/// `template` fixes the protocol (encoding, swap version, storage policy);
/// its link count and length are overridden during the search.
pub fn max_distance(
    template: &ChainConfig,
    hw: &HardwareParams,
    noise: &NoiseModel,
    time_budget_s: f64,
    fidelity_floor: f64,
) -> Result<MaxDistanceOutcome> {
    if !(time_budget_s > 0.0) {
        return Err(validation("time budget must be positive"));
    }
    if !(0.0 < fidelity_floor && fidelity_floor < 1.0) {
        return Err(validation("fidelity floor must lie in (0, 1)"));
    }
    let mut cache: BTreeMap<(u32, u32), (f64, f64)> = BTreeMap::new();
    let mut evaluate = |links: u32, l0_km: u32| -> Result<(f64, f64)> {
        if let Some(&hit) = cache.get(&(links, l0_km)) {
            return Ok(hit);
        }
        let config = ChainConfig {
            num_links: links,
            link_length_km: l0_km as f64,
            ..template.clone()
        };
        let result = simulate_chain(&config, hw, noise)?;
        let value = (result.fidelity, result.acceptance_probability);
        cache.insert((links, l0_km), value);
        Ok(value)
    };

    // Fidelity is non-increasing in the link count; find the cap at the
    // shortest grid distance, where fidelity is best.
    let clears_floor = |links: u32, evaluate: &mut dyn FnMut(u32, u32) -> Result<(f64, f64)>| -> Result<bool> {
        Ok(evaluate(links, 1)?.0 >= fidelity_floor)
    };
    if !clears_floor(1, &mut |l, d| evaluate(l, d))? {
        return Ok(MaxDistanceOutcome { best: None, links_cap: 0 });
    }
    let mut lo = 1u32; // clears the floor
    let mut hi = SEARCH_MAX_LINKS + 1; // first count known (or assumed) to fail
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if clears_floor(mid, &mut |l, d| evaluate(l, d))? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let links_cap = lo;

    let mut best: Option<MaxDistanceResult> = None;
    for links in (1..=links_cap).rev() {
        // Upper bound on the feasible link length, assuming perfect
        // acceptance; the true feasible length can only be shorter.
        let Some(l0_upper) = feasible_l0(template, hw, links, time_budget_s, 1.0)? else {
            continue;
        };
        let bound_km = links as f64 * l0_upper as f64;
        if let Some(b) = &best {
            if bound_km <= b.distance_km {
                continue;
            }
        }
        // Feasibility in l0 is monotone: fidelity decreases and total time
        // increases with distance, so binary-search the boundary.
        let mut feasible_at = |l0: u32| -> Result<Option<(f64, f64, f64)>> {
            let (fid, acc) = evaluate(links, l0)?;
            if fid < fidelity_floor {
                return Ok(None);
            }
            let config = ChainConfig { num_links: links, link_length_km: l0 as f64, ..template.clone() };
            let estimate = total_time(&config, hw, acc)?;
            if estimate.total_time_s > time_budget_s {
                return Ok(None);
            }
            Ok(Some((fid, acc, estimate.total_time_s)))
        };
        let Some(first) = feasible_at(1)? else { continue };
        let mut lo_km = 1u32;
        let mut lo_data = first;
        let mut hi_km = l0_upper + 1;
        while hi_km - lo_km > 1 {
            let mid = lo_km + (hi_km - lo_km) / 2;
            match feasible_at(mid)? {
                Some(data) => {
                    lo_km = mid;
                    lo_data = data;
                }
                None => hi_km = mid,
            }
        }
        let distance = links as f64 * lo_km as f64;
        let better = best.as_ref().is_none_or(|b| distance > b.distance_km);
        if better {
            let (fidelity, acceptance, total) = lo_data;
            best = Some(MaxDistanceResult {
                distance_km: distance,
                num_links: links,
                link_length_km: lo_km as f64,
                fidelity,
                acceptance_probability: acceptance,
                total_time_s: total,
            });
        }
    }
    Ok(MaxDistanceOutcome { best, links_cap })
}

/// Largest integer link length whose timing estimate fits the budget at the
/// given acceptance, or `None` when even 1 km does not fit.
fn feasible_l0(
    template: &ChainConfig,
    hw: &HardwareParams,
    links: u32,
    budget_s: f64,
    acceptance: f64,
) -> Result<Option<u32>> {
    let fits = |l0: u32| -> Result<bool> {
        let config = ChainConfig { num_links: links, link_length_km: l0 as f64, ..template.clone() };
        Ok(total_time(&config, hw, acceptance)?.total_time_s <= budget_s)
    };
    if !fits(1)? {
        return Ok(None);
    }
    let mut lo = 1u32;
    let mut hi = SEARCH_MAX_LINK_KM + 1;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(lo))
}

/// Chain lengths covered by the search grid.
pub fn search_limits() -> (u32, u32) {
    (SEARCH_MAX_LINKS, SEARCH_MAX_LINK_KM)
}
