//! Analytic error statistics of a one-way qudit repeater line, with and
//! without an `[[n, 1, d]]_D` code and a photon-loss abortion strategy.
//!
//! Stations are numbered `1..=N`; Bob counts as station `N`. All
//! distributions over `Z/DZ` are plain vectors of length `D` indexed by the
//! error value.

mod abortion;
mod stepwise;

pub use abortion::{
    abortion_station_probabilities, accepted_configuration_histogram,
    conditional_station_correction, count_accepted_configurations,
    count_accepted_configurations_brute_force, count_accepted_configurations_dp,
    distribution_probability, scenario_distribution_probability, AbortionTerms,
    BRUTE_FORCE_CAP_BITS, DP_MAX_WIDTH,
};
pub use stepwise::{stepwise_oracle_statistics, stepwise_oracle_statistics_with, OracleNoise};

use crate::channels::check_probability;
use crate::ept::CosetStatistics;
use crate::error::{Error, Result};
use crate::modarith::check_modulus;
use crate::qpcode::CodeParams;
use crate::scalar::{binomial, powi, Real};

/// Per-instance error probabilities of the four error sources.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRates<T> {
    pub transmission: T,
    pub gate: T,
    pub measurement: T,
    pub storage: T,
}

impl<T: Real> ErrorRates<T> {
    pub fn new(transmission: T, gate: T, measurement: T, storage: T) -> Result<Self> {
        let rates = ErrorRates {
            transmission,
            gate,
            measurement,
            storage,
        };
        rates.validate()?;
        Ok(rates)
    }

    pub fn zero() -> Self {
        ErrorRates {
            transmission: T::zero(),
            gate: T::zero(),
            measurement: T::zero(),
            storage: T::zero(),
        }
    }

    /// `f_T = 0.05`, `f_G = 0.001`, `f_M = 0.01`, `f_S = 0.0001`.
    pub fn reference() -> Self {
        ErrorRates {
            transmission: T::from_f64_lossy(0.05),
            gate: T::from_f64_lossy(0.001),
            measurement: T::from_f64_lossy(0.01),
            storage: T::from_f64_lossy(0.0001),
        }
    }

    fn validate(&self) -> Result<()> {
        check_probability(self.transmission)?;
        check_probability(self.gate)?;
        check_probability(self.measurement)?;
        check_probability(self.storage)
    }
}

/// Photon-loss abortion: a station aborts when more than `k_max` of its
/// outcomes are flagged as lost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abortion<T> {
    pub k_max: usize,
    pub f_abs: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Encoding<T> {
    pub code: CodeParams,
    pub abortion: Option<Abortion<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepeaterScenario<T> {
    modulus: u32,
    stations: usize,
    rates: ErrorRates<T>,
    encoding: Option<Encoding<T>>,
}

impl<T: Real> RepeaterScenario<T> {
    /// An unencoded line with `stations` stations (Bob included). Zero
    /// stations is accepted as the direct-link edge case.
    pub fn new(modulus: u32, stations: usize, rates: ErrorRates<T>) -> Result<Self> {
        check_modulus(modulus)?;
        if stations % 2 == 1 {
            return Err(Error::OddN(stations));
        }
        rates.validate()?;
        Ok(RepeaterScenario {
            modulus,
            stations,
            rates,
            encoding: None,
        })
    }

    pub fn with_code(mut self, code: CodeParams) -> Result<Self> {
        if code.modulus != self.modulus {
            return Err(Error::ModulusMismatch(code.modulus, self.modulus));
        }
        self.encoding = Some(Encoding {
            code,
            abortion: None,
        });
        Ok(self)
    }

    /// Requires an encoding and `k_max < d`.
    pub fn with_abortion(mut self, k_max: usize, f_abs: T) -> Result<Self> {
        check_probability(f_abs)?;
        let enc = self.encoding.as_mut().ok_or(Error::NoEncoding)?;
        if k_max >= enc.code.d {
            return Err(Error::ThresholdExceedsDistance {
                k: k_max,
                d: enc.code.d,
            });
        }
        enc.abortion = Some(Abortion { k_max, f_abs });
        Ok(self)
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn stations(&self) -> usize {
        self.stations
    }

    pub fn rates(&self) -> &ErrorRates<T> {
        &self.rates
    }

    pub fn encoding(&self) -> Option<&Encoding<T>> {
        self.encoding.as_ref()
    }

    pub(crate) fn require_encoding(&self) -> Result<&Encoding<T>> {
        self.encoding.as_ref().ok_or(Error::NoEncoding)
    }
}

/// `f_abs = 1 - (1 - f_C) e^{-gamma}`.
pub fn absorption_probability<T: Real>(f_c: T, gamma: T) -> Result<T> {
    check_probability(f_c)?;
    if gamma.is_nan() || gamma < T::zero() {
        return Err(Error::OutOfRange(gamma.to_f64_lossy()));
    }
    Ok(T::one() - (T::one() - f_c) * (-gamma).exp())
}

/// Post-processed frame digits `(c_A, c_B)` from the outcomes `c_1..c_N`:
/// `c_A = sum_i (-1)^i c_{2i}` and `c_B = sum_i (-1)^i c_{N+1-2i}`.
pub fn pauli_frame_targets(outcomes: &[u32], modulus: u32) -> Result<(u32, u32)> {
    check_modulus(modulus)?;
    let n = outcomes.len();
    if n % 2 == 1 {
        return Err(Error::OddN(n));
    }
    let m = modulus as i64;
    let (mut a, mut b) = (0i64, 0i64);
    for i in 1..=n / 2 {
        let sign = if i % 2 == 0 { 1 } else { -1 };
        a += sign * outcomes[2 * i - 1] as i64;
        b += sign * outcomes[n - 2 * i] as i64;
    }
    Ok((a.rem_euclid(m) as u32, b.rem_euclid(m) as u32))
}

/// Sign of station `i`'s outcome in the frame digit it contributes to.
pub(crate) fn frame_sign(stations: usize, i: usize) -> i64 {
    let j = if i.is_multiple_of(2) {
        i / 2
    } else {
        (stations + 1 - i) / 2
    };
    if j % 2 == 0 {
        1
    } else {
        -1
    }
}

/// A distribution over `Z/DZ` with `p_0` at zero and `p_err` at every
/// other value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationStats<T> {
    pub p0: T,
    pub p_err: T,
}

impl<T: Real> StationStats<T> {
    /// `p_0 = (1 + (D-1) B)/D`, `p_err = (1 - B)/D`.
    pub fn from_survival(modulus: u32, survival: T) -> Self {
        let d = T::from_count(modulus as usize);
        StationStats {
            p0: (T::one() + (d - T::one()) * survival) / d,
            p_err: (T::one() - survival) / d,
        }
    }

    /// `B = p_0 - p_err`.
    pub fn survival(&self) -> T {
        self.p0 - self.p_err
    }

    pub fn distribution(&self, modulus: u32) -> Vec<T> {
        (0..modulus)
            .map(|k| if k == 0 { self.p0 } else { self.p_err })
            .collect()
    }
}

/// `c[x] = sum_y a[y] b[x - y]` over `Z/DZ`.
pub fn convolve<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    let m = a.len();
    assert_eq!(m, b.len(), "distributions over different groups");
    (0..m)
        .map(|x| (0..m).map(|y| a[y] * b[(x + m - y) % m]).sum())
        .collect()
}

/// Distribution of `-e` given that of `e`.
pub fn negate<T: Real>(a: &[T]) -> Vec<T> {
    let m = a.len();
    (0..m).map(|x| a[(m - x) % m]).collect()
}

/// Distribution of `sign * e`.
fn signed<T: Real>(a: &[T], sign: i64) -> Vec<T> {
    if sign < 0 {
        negate(a)
    } else {
        a.to_vec()
    }
}

pub(crate) fn delta<T: Real>(modulus: u32) -> Vec<T> {
    let mut v = vec![T::zero(); modulus as usize];
    v[0] = T::one();
    v
}

/// Flip statistics of one physical X-measurement outcome. Intermediate
/// stations (and Bob) see `B = (1-f_T)^2 (1-f_G)^3 (1-f_M)`; station 1 sees
/// `B = (1-f_T)(1-f_G)^2(1-f_M)`.
pub fn station_measurement_stats<T: Real>(
    scenario: &RepeaterScenario<T>,
    first_station: bool,
) -> StationStats<T> {
    let r = &scenario.rates;
    let (t, g) = if first_station { (1, 2) } else { (2, 3) };
    let b = powi(T::one() - r.transmission, t)
        * powi(T::one() - r.gate, g)
        * (T::one() - r.measurement);
    StationStats::from_survival(scenario.modulus, b)
}

/// Distributions of the frame errors `delta_A` (even stations) and
/// `delta_B` (odd stations), given the outcome statistics of station 1
/// and of every later station.
pub fn frame_error_channels<T: Real>(
    scenario: &RepeaterScenario<T>,
    first: StationStats<T>,
    later: StationStats<T>,
) -> Result<(Vec<T>, Vec<T>)> {
    let n = scenario.stations;
    if n % 2 == 1 {
        return Err(Error::OddN(n));
    }
    let m = scenario.modulus;
    let mut even = delta(m);
    let mut odd = delta(m);
    for i in 1..=n {
        let stats = if i == 1 { first } else { later };
        let contribution = signed(&stats.distribution(m), frame_sign(n, i));
        if i % 2 == 0 {
            even = convolve(&even, &contribution);
        } else {
            odd = convolve(&odd, &contribution);
        }
    }
    Ok((even, odd))
}

/// Survival parameters `(B_even, B_odd)` of the closed forms
/// `(1-f_G)^{3N/2}(1-f_T)^N(1-f_M)^{N/2}` and
/// `(1-f_G)^{3N/2-1}(1-f_T)^{N-1}(1-f_M)^{N/2}`, for `N >= 2`.
pub fn frame_error_closed_form<T: Real>(scenario: &RepeaterScenario<T>) -> Result<(T, T)> {
    let n = scenario.stations;
    if n % 2 == 1 {
        return Err(Error::OddN(n));
    }
    if n == 0 {
        return Err(Error::InvalidScenario(
            "closed form needs at least two stations".into(),
        ));
    }
    let r = &scenario.rates;
    let g = T::one() - r.gate;
    let t = T::one() - r.transmission;
    let mm = powi(T::one() - r.measurement, n / 2);
    Ok((
        powi(g, 3 * n / 2) * powi(t, n) * mm,
        powi(g, 3 * n / 2 - 1) * powi(t, n - 1) * mm,
    ))
}

/// `B_local = (1-f_G)^2 (1-f_S)^N`.
fn local_survival<T: Real>(scenario: &RepeaterScenario<T>) -> T {
    let r = &scenario.rates;
    powi(T::one() - r.gate, 2) * powi(T::one() - r.storage, scenario.stations)
}

/// `p(r, s) = f00 fX_r fZ_s + ferr (1 - fX_r fZ_s)` for a two-qudit
/// depolarizing local channel with survival `b_local`.
fn assemble_with_local<T: Real>(
    modulus: u32,
    b_local: T,
    fx: &[T],
    fz: &[T],
) -> Result<CosetStatistics<T>> {
    let d2 = T::from_count((modulus as usize).pow(2));
    let f00 = (T::one() + (d2 - T::one()) * b_local) / d2;
    let ferr = (T::one() - b_local) / d2;
    CosetStatistics::from_fn(modulus, |r, s| {
        let q = fx[r as usize] * fz[s as usize];
        f00 * q + ferr * (T::one() - q)
    })
}

/// Frame-error distributions `(f^X, f^Z)` on Bob's qudit for the unencoded
/// line. `f^Z` includes the propagated X error of qudit `N` across Bob's
/// gate.
pub fn unencoded_frame_distributions<T: Real>(
    scenario: &RepeaterScenario<T>,
) -> Result<(Vec<T>, Vec<T>)> {
    let m = scenario.modulus;
    if scenario.stations == 0 {
        return Ok((delta(m), delta(m)));
    }
    let first = station_measurement_stats(scenario, true);
    let later = station_measurement_stats(scenario, false);
    let (even, odd) = frame_error_channels(scenario, first, later)?;
    let r = &scenario.rates;
    let prop = StationStats::from_survival(m, (T::one() - r.gate) * (T::one() - r.transmission));
    let fz = convolve(&prop.distribution(m), &negate(&odd));
    Ok((even, fz))
}

/// Coset statistics of the state distributed by an unencoded line.
pub fn unencoded_final_statistics<T: Real>(
    scenario: &RepeaterScenario<T>,
) -> Result<CosetStatistics<T>> {
    let (fx, fz) = unencoded_frame_distributions(scenario)?;
    assemble_with_local(scenario.modulus, local_survival(scenario), &fx, &fz)
}

/// `p_cor = sum_{j <= t} (D-1)^j C(n, j) p_0^{n-j} p_1^j`: probability
/// that at most `t` of `n` digits are wrong.
pub fn correctable_probability<T: Real>(modulus: u32, n: usize, t: usize, p0: T, p1: T) -> T {
    let dm1 = T::from_count(modulus as usize - 1);
    (0..=t.min(n))
        .map(|j| powi(dm1, j) * binomial::<T>(n, j) * powi(p0, n - j) * powi(p1, j))
        .sum()
}

/// `(p_succ, p_guess) = ((1 + (D-1) p_cor)/D, (1 - p_cor)/D)`.
pub fn logical_stats_from_correction<T: Real>(modulus: u32, p_cor: T) -> StationStats<T> {
    StationStats::from_survival(modulus, p_cor)
}

/// Logical outcome statistics of station 1 (`first_station`) or of a later
/// station: `p0` is `p_succ`, `p_err` is `p_guess`.
pub fn encoded_station_success<T: Real>(
    scenario: &RepeaterScenario<T>,
    first_station: bool,
) -> Result<StationStats<T>> {
    let enc = scenario.require_encoding()?;
    let p_cor = match enc.abortion {
        Some(_) => conditional_station_correction(scenario, first_station)?,
        None => {
            let phys = station_measurement_stats(scenario, first_station);
            correctable_probability(
                scenario.modulus,
                enc.code.n,
                enc.code.correctable(),
                phys.p0,
                phys.p_err,
            )
        }
    };
    Ok(logical_stats_from_correction(scenario.modulus, p_cor))
}

/// Per-qudit survival of Bob's local X and Z errors before the stabilizer
/// round: `(1-f_G)^2 (1-f_S)^N` and the same times `(1-f_T)`.
pub fn encoded_local_survival<T: Real>(scenario: &RepeaterScenario<T>) -> (T, T) {
    let bx = local_survival(scenario);
    (bx, bx * (T::one() - scenario.rates.transmission))
}

/// Logical statistics `(p^X, p^Z)` of Bob's block after a perfect
/// stabilizer round, each as `(p_succ, p_err)`.
pub fn encoded_local_logical_stats<T: Real>(
    scenario: &RepeaterScenario<T>,
) -> Result<(StationStats<T>, StationStats<T>)> {
    let enc = scenario.require_encoding()?;
    let m = scenario.modulus;
    let (bx, bz) = encoded_local_survival(scenario);
    let logical = |b: T| {
        let phys = StationStats::from_survival(m, b);
        let p_cor =
            correctable_probability(m, enc.code.n, enc.code.correctable(), phys.p0, phys.p_err);
        logical_stats_from_correction(m, p_cor)
    };
    Ok((logical(bx), logical(bz)))
}

/// Coset statistics of the logical state distributed by an encoded line.
pub fn encoded_final_statistics<T: Real>(
    scenario: &RepeaterScenario<T>,
) -> Result<CosetStatistics<T>> {
    let (px, pz) = encoded_local_logical_stats(scenario)?;
    let m = scenario.modulus;
    let (fx, fz) = if scenario.stations == 0 {
        (delta(m), delta(m))
    } else {
        let first = encoded_station_success(scenario, true)?;
        let later = encoded_station_success(scenario, false)?;
        let (even, odd) = frame_error_channels(scenario, first, later)?;
        (even, negate(&odd))
    };
    let x = convolve(&fx, &px.distribution(m));
    let z = convolve(&fz, &pz.distribution(m));
    CosetStatistics::from_fn(m, |r, s| x[r as usize] * z[s as usize])
}

/// Encoded statistics when the scenario has a code, unencoded otherwise.
pub fn final_statistics<T: Real>(scenario: &RepeaterScenario<T>) -> Result<CosetStatistics<T>> {
    if scenario.encoding.is_some() {
        encoded_final_statistics(scenario)
    } else {
        unencoded_final_statistics(scenario)
    }
}
