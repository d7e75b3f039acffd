//! Parameter sets and sweeps behind the published repeater figures and
//! tables.

use rayon::prelude::*;

use crate::entanglement::{fidelity, log_negativity, BellDiagonalState};
use crate::ept::CosetStatistics;
use crate::error::Result;
use crate::modarith::is_prime;
use crate::qpcode::CodeParams;
use crate::repeater::{
    count_accepted_configurations, encoded_final_statistics, scenario_distribution_probability,
    unencoded_final_statistics, ErrorRates, RepeaterScenario,
};

/// Stations in the negativity sweep.
pub const FIG6_STATIONS: usize = 50;
/// `log10` of the largest physical Hilbert space per logical qudit.
pub const FIG6_MAX_LOG10_DIM: f64 = 70.0;
/// Largest `D` in the negativity sweep.
pub const FIG6_MAX_MODULUS: u32 = 100;
/// Fraction of `log2 D` that counts as "almost pure".
pub const TABLE1_THRESHOLD: f64 = 0.99;
/// Published `d_min` for `D = 2..=23`.
pub const TABLE1_PUBLISHED: [(u32, usize); 22] = [
    (2, 15),
    (3, 19),
    (4, 21),
    (5, 23),
    (6, 25),
    (7, 25),
    (8, 27),
    (9, 27),
    (10, 27),
    (11, 27),
    (12, 29),
    (13, 29),
    (14, 29),
    (15, 29),
    (16, 29),
    (17, 29),
    (18, 29),
    (19, 29),
    (20, 29),
    (21, 29),
    (22, 29),
    (23, 29),
];
/// Stations and code size behind the accepted-configuration counts.
pub const TABLE2_SHAPE: (usize, usize) = (2, 13);
/// `k_max` values tabulated.
pub const TABLE2_THRESHOLDS: usize = 5;
/// Columns `m = 0..10` tabulated.
pub const TABLE2_COLUMNS: usize = 10;

/// `[[5,1,3]]_5` line with the reference rates.
pub fn fig4_scenario(stations: usize) -> Result<RepeaterScenario<f64>> {
    RepeaterScenario::new(5, stations, ErrorRates::reference())?
        .with_code(CodeParams::polynomial_shape(5, 3)?)
}

/// Coset table of the `[[5,1,3]]_5` line.
pub fn fig4_point(stations: usize) -> Result<CosetStatistics<f64>> {
    encoded_final_statistics(&fig4_scenario(stations)?)
}

/// Two-station `[[13,1,7]]_13` line with `f_T = f_abs = f` and abortion
/// threshold `k_max`.
pub fn fig5_scenario(k_max: usize, f: f64) -> Result<RepeaterScenario<f64>> {
    let rates = ErrorRates::new(f, 0.001, 0.01, 0.0001)?;
    RepeaterScenario::new(13, 2, rates)?
        .with_code(CodeParams::polynomial_shape(13, 7)?)?
        .with_abortion(k_max, f)
}

/// `(fidelity, P_distr)` of [`fig5_scenario`].
pub fn fig5_point(k_max: usize, f: f64) -> Result<(f64, f64)> {
    let sc = fig5_scenario(k_max, f)?;
    let stats = encoded_final_statistics(&sc)?;
    Ok((
        fidelity(&BellDiagonalState::new(&stats)),
        scenario_distribution_probability(&sc)?,
    ))
}

/// Fidelity of the unencoded two-station `D = 13` line with `f_T = f`.
pub fn fig5_unencoded_fidelity(f: f64) -> Result<f64> {
    let rates = ErrorRates::new(f, 0.001, 0.01, 0.0001)?;
    let stats = unencoded_final_statistics(&RepeaterScenario::new(13, 2, rates)?)?;
    Ok(fidelity(&BellDiagonalState::new(&stats)))
}

/// 50-station line with a `[[2d-1,1,d]]_D` code and the reference rates.
/// Non-prime `D` is allowed; the code is then an abstract code of that
/// shape.
pub fn fig6_scenario(modulus: u32, d: usize) -> Result<RepeaterScenario<f64>> {
    RepeaterScenario::new(modulus, FIG6_STATIONS, ErrorRates::reference())?
        .with_code(CodeParams::polynomial_shape(modulus, d)?)
}

/// Logarithmic negativity of [`fig6_scenario`].
pub fn fig6_log_negativity(modulus: u32, d: usize) -> Result<f64> {
    let stats = encoded_final_statistics(&fig6_scenario(modulus, d)?)?;
    Ok(log_negativity(&BellDiagonalState::new(&stats)))
}

/// Largest `d` with `D^{2d-1} <= 10^70`.
pub fn fig6_max_distance(modulus: u32) -> usize {
    let per_qudit = (modulus as f64).log10();
    let n = (FIG6_MAX_LOG10_DIM / per_qudit + 1e-9).floor() as usize;
    n.div_ceil(2).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig6Point {
    pub modulus: u32,
    pub distance: usize,
    pub physical: usize,
    pub log10_dim: f64,
    pub log_negativity: f64,
    pub prime: bool,
}

/// Every `(D, d)` with `2 <= D <= 100` and `D^{2d-1} <= 10^70`, ordered by
/// `D` then `d`.
pub fn fig6_grid() -> Vec<(u32, usize)> {
    (2..=FIG6_MAX_MODULUS)
        .flat_map(|m| (1..=fig6_max_distance(m)).map(move |d| (m, d)))
        .collect()
}

/// The negativity sweep over [`fig6_grid`].
pub fn fig6_sweep() -> Result<Vec<Fig6Point>> {
    fig6_grid()
        .into_par_iter()
        .map(|(m, d)| {
            let n = 2 * d - 1;
            Ok(Fig6Point {
                modulus: m,
                distance: d,
                physical: n,
                log10_dim: n as f64 * (m as f64).log10(),
                log_negativity: fig6_log_negativity(m, d)?,
                prime: is_prime(m),
            })
        })
        .collect()
}

/// Smallest `d` with `E_N > 0.99 log2 D` in the negativity sweep, if any
/// `d <= max_distance` reaches it.
pub fn minimal_distance(modulus: u32, max_distance: usize) -> Result<Option<usize>> {
    let target = TABLE1_THRESHOLD * (modulus as f64).log2();
    for d in 1..=max_distance {
        if fig6_log_negativity(modulus, d)? > target {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

/// `d_min` for each `D` in `moduli`, searching `d <= 60`.
pub fn table1_row(moduli: &[u32]) -> Result<Vec<(u32, Option<usize>)>> {
    moduli
        .par_iter()
        .map(|&m| Ok((m, minimal_distance(m, 60)?)))
        .collect()
}

/// `alpha(2, 13, k; m)` for `k = 0..5`, `m = 0..10`.
pub fn table2() -> Result<Vec<Vec<u128>>> {
    let (stations, n) = TABLE2_SHAPE;
    (0..TABLE2_THRESHOLDS)
        .map(|k| {
            let mut row = count_accepted_configurations(stations, n, k)?;
            row.truncate(TABLE2_COLUMNS);
            Ok(row)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_bounds() {
        assert_eq!(fig6_max_distance(10), 35);
        assert_eq!(fig6_max_distance(100), 18);
        assert_eq!(fig6_max_distance(2), 116);
        for (m, d) in fig6_grid() {
            assert!((2 * d - 1) as f64 * (m as f64).log10() <= FIG6_MAX_LOG10_DIM + 1e-9);
        }
    }

    #[test]
    fn small_distances_carry_no_entanglement() {
        for &m in &[5u32, 13] {
            for d in [1, 2, 3] {
                assert!(fig6_log_negativity(m, d).unwrap() < 1e-12);
            }
        }
    }
}
