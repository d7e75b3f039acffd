use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{FromPrimitive, Num};
use rayon::prelude::*;

use super::{correctable_probability, station_measurement_stats, RepeaterScenario};
use crate::error::{Error, Result};
use crate::scalar::{binomial, powi, Real};

/// Largest `N n` enumerated mask by mask.
pub const BRUTE_FORCE_CAP_BITS: usize = 28;

/// Largest row width handled by the row-by-row recursion.
pub const DP_MAX_WIDTH: usize = 12;

/// `P?_first(k)`, `P?(k)` and `p_cor,?(k)` for one value of `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbortionTerms<T> {
    pub first: T,
    pub later: T,
    pub p_cor: T,
}

/// `P?_first(k) = C(n,k) f^k (1-f)^{n-k}`,
/// `P?(k) = C(n,k) (1-(1-f)^2)^k ((1-f)^2)^{n-k}` and the correction
/// probability of the reduced `[n-k, 1, d-k]` code, evaluated with the
/// physical statistics of station 1 or of a later station.
pub fn abortion_station_probabilities<T: Real>(
    scenario: &RepeaterScenario<T>,
    k: usize,
    first_station: bool,
) -> Result<AbortionTerms<T>> {
    let enc = scenario.require_encoding()?;
    let (n, d) = (enc.code.n, enc.code.d);
    if k >= d {
        return Err(Error::ThresholdExceedsDistance { k, d });
    }
    let f = enc.abortion.map(|a| a.f_abs).unwrap_or_else(T::zero);
    let keep = T::one() - f;
    let keep2 = keep * keep;
    let phys = station_measurement_stats(scenario, first_station);
    Ok(AbortionTerms {
        first: binomial::<T>(n, k) * powi(f, k) * powi(keep, n - k),
        later: binomial::<T>(n, k) * powi(T::one() - keep2, k) * powi(keep2, n - k),
        p_cor: correctable_probability(
            scenario.modulus(),
            n - k,
            (d - k - 1) / 2,
            phys.p0,
            phys.p_err,
        ),
    })
}

/// `p_cor,kmax = sum_k P?(k) p_cor,?(k) / sum_k P?(k)`, with `P?_first` in
/// place of `P?` for station 1.
pub fn conditional_station_correction<T: Real>(
    scenario: &RepeaterScenario<T>,
    first_station: bool,
) -> Result<T> {
    let enc = scenario.require_encoding()?;
    let k_max = enc.abortion.map(|a| a.k_max).unwrap_or(0);
    let mut weight = T::zero();
    let mut acc = T::zero();
    for k in 0..=k_max {
        let terms = abortion_station_probabilities(scenario, k, first_station)?;
        let w = if first_station {
            terms.first
        } else {
            terms.later
        };
        weight = weight + w;
        acc = acc + w * terms.p_cor;
    }
    if weight <= T::zero() {
        return Err(Error::InvalidScenario(
            "every configuration aborts; conditional statistics undefined".into(),
        ));
    }
    Ok(acc / weight)
}

fn row_mask(n: usize) -> u64 {
    (1u64 << n) - 1
}

/// Counts of `N x n` loss matrices by `(q, m)`: `q` is the largest number
/// of flagged outcomes at any station, `m` the number of lost photons.
/// Entry `[q][m]`. Results are cached for the lifetime of the process.
pub fn accepted_configuration_histogram(stations: usize, n: usize) -> Result<Vec<Vec<u128>>> {
    type Cache = Mutex<HashMap<(usize, usize), Arc<Vec<Vec<u128>>>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().unwrap().get(&(stations, n)) {
        return Ok(hit.as_ref().clone());
    }
    let hist = enumerate_histogram(stations, n)?;
    cache
        .lock()
        .unwrap()
        .insert((stations, n), Arc::new(hist.clone()));
    Ok(hist)
}

fn enumerate_histogram(stations: usize, n: usize) -> Result<Vec<Vec<u128>>> {
    let bits = stations * n;
    if bits > BRUTE_FORCE_CAP_BITS || n == 0 {
        return Err(Error::BruteForceCapExceeded {
            size: 1u128.checked_shl(bits as u32).unwrap_or(u128::MAX),
        });
    }
    let mask = row_mask(n);
    let chunk_bits = bits.min(16);
    let chunks = 1u64 << (bits - chunk_bits);
    let empty = || vec![vec![0u128; bits + 1]; n + 1];
    let hist = (0..chunks)
        .into_par_iter()
        .fold(empty, |mut h, hi| {
            let base = hi << chunk_bits;
            for lo in 0..(1u64 << chunk_bits) {
                // A set bit marks an absorbed photon.
                let lost = base | lo;
                let mut prev_lost = 0u64;
                let mut worst = 0u32;
                for i in 0..stations {
                    let row = (lost >> (i * n)) & mask;
                    worst = worst.max((row | prev_lost).count_ones());
                    prev_lost = row;
                }
                h[worst as usize][lost.count_ones() as usize] += 1;
            }
            h
        })
        .reduce(empty, |mut a, b| {
            for (ra, rb) in a.iter_mut().zip(b) {
                for (x, y) in ra.iter_mut().zip(rb) {
                    *x += y;
                }
            }
            a
        });
    Ok(hist)
}

/// `alpha(N, n, k_max; m)` for `m = 0..=N n` by enumerating every matrix.
pub fn count_accepted_configurations_brute_force(
    stations: usize,
    n: usize,
    k_max: usize,
) -> Result<Vec<u128>> {
    let hist = accepted_configuration_histogram(stations, n)?;
    let mut out = vec![0u128; stations * n + 1];
    for row in hist.iter().take(k_max.min(n) + 1) {
        for (o, c) in out.iter_mut().zip(row) {
            *o += c;
        }
    }
    Ok(out)
}

/// `alpha(N, n, k_max; m)` by a recursion over rows, keyed by the loss
/// pattern of the previous row.
pub fn count_accepted_configurations_dp(
    stations: usize,
    n: usize,
    k_max: usize,
) -> Result<Vec<u128>> {
    if n > DP_MAX_WIDTH || n == 0 {
        return Err(Error::BruteForceCapExceeded {
            size: 1u128 << (2 * n.min(63)),
        });
    }
    let width = 1usize << n;
    let total = stations * n;
    // dp[pattern][m]
    let mut dp = vec![vec![0u128; total + 1]; width];
    dp[0][0] = 1;
    for _ in 0..stations {
        let next: Vec<Vec<u128>> = (0..width)
            .into_par_iter()
            .map(|row| {
                let zeros = row.count_ones() as usize;
                let mut acc = vec![0u128; total + 1];
                for (prev, counts) in dp.iter().enumerate() {
                    if (row | prev).count_ones() as usize > k_max {
                        continue;
                    }
                    for m in 0..=total - zeros {
                        acc[m + zeros] += counts[m];
                    }
                }
                acc
            })
            .collect();
        dp = next;
    }
    let mut out = vec![0u128; total + 1];
    for counts in &dp {
        for (o, c) in out.iter_mut().zip(counts) {
            *o += c;
        }
    }
    Ok(out)
}

/// `alpha(N, n, k_max; m)`: enumeration when `N n` is within
/// [`BRUTE_FORCE_CAP_BITS`], the row recursion otherwise.
pub fn count_accepted_configurations(stations: usize, n: usize, k_max: usize) -> Result<Vec<u128>> {
    if stations * n <= BRUTE_FORCE_CAP_BITS {
        count_accepted_configurations_brute_force(stations, n, k_max)
    } else {
        count_accepted_configurations_dp(stations, n, k_max)
    }
}

/// `P_distr = sum_m alpha_m f^m (1-f)^{L-m}` with `L = alpha.len() - 1`.
/// Works for any numeric type, including exact rationals.
pub fn distribution_probability<T>(alpha: &[u128], f_abs: T) -> T
where
    T: Num + Clone + FromPrimitive,
{
    let total = alpha.len().saturating_sub(1);
    let keep = T::one() - f_abs.clone();
    alpha
        .iter()
        .enumerate()
        .filter(|(_, &a)| a != 0)
        .fold(T::zero(), |acc, (m, &a)| {
            let coeff = T::from_u128(a).expect("count representable");
            acc + coeff
                * num_traits::pow(f_abs.clone(), m)
                * num_traits::pow(keep.clone(), total - m)
        })
}

/// `P_distr` for the scenario's code, threshold and absorption
/// probability.
pub fn scenario_distribution_probability<T: Real>(scenario: &RepeaterScenario<T>) -> Result<T> {
    let enc = scenario.require_encoding()?;
    let abortion = enc.abortion.ok_or_else(|| {
        Error::InvalidScenario("distribution probability needs an abortion threshold".into())
    })?;
    let alpha = count_accepted_configurations(scenario.stations(), enc.code.n, abortion.k_max)?;
    Ok(distribution_probability(&alpha, abortion.f_abs))
}
