use super::{frame_sign, RepeaterScenario};
use crate::channels::{axis_depolarizing, depolarizing, Axis};
use crate::clifford::{automorphism_of, CliffordAutomorphism, GateSpec};
use crate::ept::{CosetStatistics, ErrorProbabilityTensor};
use crate::error::{Error, Result};
use crate::scalar::{powi, Real};

/// How each single-qudit error source on a relay qudit (qudits `1..N`) is
/// modelled. Alice's and Bob's own qudits always see full depolarizing
/// noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum OracleNoise {
    /// Depolarizing with the given strength.
    #[default]
    Depolarizing,
    /// X-axis and Z-axis depolarizing of the same strength, applied
    /// independently.
    SplitRelay,
}

// Register layout during the sweep: qudit 0 is Alice's, qudit 1 the relay
// qudit in flight, qudit 2 the freshly prepared one. Classical digits 0 and
// 1 accumulate the frame errors of c_A and c_B.
const ALICE: usize = 0;
const CURRENT: usize = 1;
const FRESH: usize = 2;
const ACC_A: usize = 0;
const ACC_B: usize = 1;

struct Sweep<T> {
    modulus: u32,
    noise: OracleNoise,
    p: ErrorProbabilityTensor<T>,
}

impl<T: Real> Sweep<T> {
    fn noise(&mut self, f: T, qudit: usize, relay: bool) -> Result<()> {
        let m = self.modulus;
        self.p = if relay && self.noise == OracleNoise::SplitRelay {
            self.p
                .apply_channel_on(&axis_depolarizing(f, Axis::XOnly, m)?, &[qudit])?
                .apply_channel_on(&axis_depolarizing(f, Axis::ZOnly, m)?, &[qudit])?
        } else {
            self.p.apply_channel_on(&depolarizing(f, m, 1)?, &[qudit])?
        };
        Ok(())
    }

    fn cz(&mut self, a: usize, b: usize) -> Result<()> {
        let n = self.p.num_qudits();
        let auto: CliffordAutomorphism =
            automorphism_of(&GateSpec::cz(a, b, 1, self.modulus)?, n, self.modulus)?;
        self.p = self.p.apply_clifford(&auto)?;
        Ok(())
    }
}

/// Bell-coset statistics from propagating the repeater circuit gate by
/// gate through an error probability tensor, with depolarizing noise.
pub fn stepwise_oracle_statistics<T: Real>(
    scenario: &RepeaterScenario<T>,
) -> Result<CosetStatistics<T>> {
    stepwise_oracle_statistics_with(scenario, OracleNoise::Depolarizing)
}

/// As [`stepwise_oracle_statistics`], with a choice of relay noise model.
///
/// Each relay qudit is measured as soon as its station is done; the flip
/// digit is folded into the matching frame accumulator with its sign, so
/// correlations between outcomes and the qudits still in flight are kept.
/// At the end Bob's frame correction `X^{c_A} Z^{-c_B}` turns the
/// accumulated errors into a Pauli error on his qudit.
pub fn stepwise_oracle_statistics_with<T: Real>(
    scenario: &RepeaterScenario<T>,
    noise: OracleNoise,
) -> Result<CosetStatistics<T>> {
    if scenario.encoding().is_some() {
        return Err(Error::InvalidScenario(
            "the stepwise oracle models unencoded lines only".into(),
        ));
    }
    let m = scenario.modulus();
    let stations = scenario.stations();
    let r = *scenario.rates();
    let mut sw = Sweep {
        modulus: m,
        noise,
        p: ErrorProbabilityTensor::identity(m, 2)?
            .add_classical()?
            .add_classical()?,
    };

    // Alice: CZ between A and qudit 1, gate noise on both, storage on A.
    sw.cz(ALICE, CURRENT)?;
    sw.noise(r.gate, ALICE, false)?;
    sw.noise(r.gate, CURRENT, stations > 0)?;
    let storage = T::one() - powi(T::one() - r.storage, stations);
    sw.noise(storage, ALICE, false)?;

    for i in 1..=stations {
        let bob = i == stations;
        sw.noise(r.transmission, CURRENT, true)?;
        sw.p = sw.p.add_qudit()?;
        sw.cz(CURRENT, FRESH)?;
        sw.noise(r.gate, CURRENT, true)?;
        sw.noise(r.gate, FRESH, !bob)?;
        sw.noise(r.measurement, CURRENT, true)?;
        sw.p = sw.p.measure_x(CURRENT)?;
        let outcome = sw.p.num_classical() - 1;
        let acc = if i % 2 == 0 { ACC_A } else { ACC_B };
        sw.p = sw.p.fold_classical(outcome, acc, frame_sign(stations, i))?;
    }

    if stations == 0 {
        // Without stations qudit 1 is Bob's; no frame correction.
        return sw
            .p
            .marginalize_classical(ACC_B)?
            .marginalize_classical(ACC_A)?
            .bell_coset_statistics();
    }
    sw.p =
        sw.p.add_classical_to_label(ACC_A, CURRENT, Axis::XOnly, 1)?
            .add_classical_to_label(ACC_B, CURRENT, Axis::ZOnly, -1)?
            .marginalize_classical(ACC_B)?
            .marginalize_classical(ACC_A)?;
    sw.p.bell_coset_statistics()
}
