//! Projective spin measurement and Stern-Gerlach analyzer chains.
//!
//! Chains are simulated particle by particle: each analyzer measures along its
//! axis, the particle collapses onto the matching eigenstate, and only
//! particles leaving the selected port reach the next analyzer. The random
//! source is ChaCha8 seeded with the 64-bit chain seed, so a given seed always
//! reproduces the same counts with this implementation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::notation;
use crate::spin::{bloch_vector, inner_product, Axis, SpinState};

/// Output port of an analyzer; also the measured value (`+1/2` or `-1/2`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Port {
    Up,
    Down,
}

impl Port {
    pub fn as_str(self) -> &'static str {
        match self {
            Port::Up => "up",
            Port::Down => "down",
        }
    }

    /// Spin component in units of ħ.
    pub fn value(self) -> f64 {
        match self {
            Port::Up => 0.5,
            Port::Down => -0.5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeasurementOutcome {
    pub port: Port,
    /// `+0.5` or `-0.5`.
    pub value: f64,
    /// Born probability of this outcome.
    pub probability: f64,
    /// The eigenstate the particle collapsed onto.
    pub post_state: SpinState,
}

/// Born probabilities `(|<up|psi>|^2, |<down|psi>|^2)` along `axis`.
pub fn probabilities(psi: &SpinState, axis: &Axis) -> Result<(f64, f64)> {
    psi.require_normalized()?;
    let (up, down) = axis.eigenstates();
    Ok(born_pair(psi, &up, &down))
}

fn born_pair(psi: &SpinState, up: &SpinState, down: &SpinState) -> (f64, f64) {
    (inner_product(up, psi).norm_sqr(), inner_product(down, psi).norm_sqr())
}

/// Measures the spin component along `axis`, drawing one uniform number from `rng`.
pub fn measure_once<R: Rng + ?Sized>(psi: &SpinState, axis: &Axis, rng: &mut R) -> Result<MeasurementOutcome> {
    psi.require_normalized()?;
    let (up, down) = axis.eigenstates();
    Ok(measure_in(psi, &up, &down, rng))
}

fn measure_in<R: Rng + ?Sized>(psi: &SpinState, up: &SpinState, down: &SpinState, rng: &mut R) -> MeasurementOutcome {
    let (p_up, p_down) = born_pair(psi, up, down);
    let u: f64 = rng.random();
    let (port, probability, post_state) = if u < p_up {
        (Port::Up, p_up, *up)
    } else {
        (Port::Down, p_down, *down)
    };
    MeasurementOutcome {
        port,
        value: port.value(),
        probability,
        post_state,
    }
}

/// The seeded generator used for every simulation.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One analyzer: measure along `axis`, pass particles leaving `port`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub axis: Axis,
    pub port: Port,
}

/// Oven preparation: a named token / state string, or explicit amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub enum Preparation {
    Token(String),
    State(SpinState),
}

impl Preparation {
    pub fn resolve(&self) -> Result<SpinState> {
        let s = match self {
            Preparation::Token(t) => notation::parse_state(t)?,
            Preparation::State(s) => *s,
        };
        s.require_normalized()?;
        Ok(s)
    }
}

impl Serialize for Preparation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Preparation::Token(t) => s.serialize_str(t),
            Preparation::State(st) => st.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Preparation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Token(String),
            State(SpinState),
        }
        Ok(match Repr::deserialize(d)? {
            Repr::Token(t) => {
                notation::parse_state(&t).map_err(serde::de::Error::custom)?;
                Preparation::Token(t)
            }
            Repr::State(s) => Preparation::State(s),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    pub preparation: Preparation,
    pub stages: Vec<Stage>,
    pub shots: u64,
    pub seed: u64,
}

impl ChainSpec {
    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::Usage("shots must be at least 1".into()));
        }
        if self.stages.is_empty() {
            return Err(Error::EmptyChain);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageStatistics {
    pub axis: Axis,
    pub port: Port,
    /// Particles reaching this analyzer that left through the up port.
    pub up_count: u64,
    pub down_count: u64,
    /// Particles passed on (the count at the selected port).
    pub transmitted_count: u64,
    /// Conditional Born probabilities for a particle entering this analyzer.
    pub p_up_exact: f64,
    pub p_down_exact: f64,
    pub entering_state: SpinState,
    pub entering_bloch: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainStatistics {
    pub per_stage: Vec<StageStatistics>,
    /// Product of the selected-port Born probabilities.
    pub final_probability_exact: f64,
    /// Fraction of shots leaving the last selected port.
    pub final_frequency: f64,
    pub shots: u64,
    pub seed_used: u64,
}

/// Sends `spec.shots` particles through the analyzer chain.
pub fn run_chain(spec: &ChainSpec) -> Result<ChainStatistics> {
    spec.validate()?;
    let prepared = spec.preparation.resolve()?;
    let eigen: Vec<(SpinState, SpinState)> = spec.stages.iter().map(|s| s.axis.eigenstates()).collect();

    // Exact per-stage probabilities along the collapse path.
    let mut per_stage = Vec::with_capacity(spec.stages.len());
    let mut entering = prepared;
    let mut exact = 1.0;
    for (stage, (up, down)) in spec.stages.iter().zip(&eigen) {
        let (p_up, p_down) = born_pair(&entering, up, down);
        exact *= match stage.port {
            Port::Up => p_up,
            Port::Down => p_down,
        };
        per_stage.push(StageStatistics {
            axis: stage.axis,
            port: stage.port,
            up_count: 0,
            down_count: 0,
            transmitted_count: 0,
            p_up_exact: p_up,
            p_down_exact: p_down,
            entering_state: entering,
            entering_bloch: bloch_vector(&entering)?,
        });
        entering = match stage.port {
            Port::Up => *up,
            Port::Down => *down,
        };
    }

    let mut rng = seeded_rng(spec.seed);
    for _ in 0..spec.shots {
        let mut psi = prepared;
        for ((stage, (up, down)), stats) in spec.stages.iter().zip(&eigen).zip(per_stage.iter_mut()) {
            let out = measure_in(&psi, up, down, &mut rng);
            match out.port {
                Port::Up => stats.up_count += 1,
                Port::Down => stats.down_count += 1,
            }
            if out.port != stage.port {
                break;
            }
            stats.transmitted_count += 1;
            psi = out.post_state;
        }
    }

    let last = per_stage.last().map(|s| s.transmitted_count).unwrap_or(0);
    Ok(ChainStatistics {
        final_probability_exact: exact,
        final_frequency: last as f64 / spec.shots as f64,
        per_stage,
        shots: spec.shots,
        seed_used: spec.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{same_ray, AxisLabel, EPS};
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2 as H;

    const X: Axis = Axis::Label(AxisLabel::X);
    const Y: Axis = Axis::Label(AxisLabel::Y);
    const Z: Axis = Axis::Label(AxisLabel::Z);

    fn chain(prep: &str, stages: &str, shots: u64, seed: u64) -> ChainSpec {
        ChainSpec {
            preparation: Preparation::Token(prep.into()),
            stages: notation::parse_stages(stages).unwrap(),
            shots,
            seed,
        }
    }

    #[test]
    fn probability_examples() {
        assert_eq!(probabilities(&SpinState::up_z(), &Z).unwrap(), (1.0, 0.0));
        let (u, d) = probabilities(&SpinState::up_z(), &X).unwrap();
        assert!((u - 0.5).abs() < EPS && (d - 0.5).abs() < EPS);
        let (u, d) = probabilities(&SpinState::from_real(H, H), &Y).unwrap();
        assert!((u - 0.5).abs() < EPS && (d - 0.5).abs() < EPS);
        assert!(probabilities(&SpinState::from_real(1.0, 1.0), &Z).is_err());
    }

    #[test]
    fn deterministic_branches() {
        for seed in [0, 1, 42, u64::MAX] {
            let mut rng = seeded_rng(seed);
            let o = measure_once(&SpinState::up_z(), &Z, &mut rng).unwrap();
            assert_eq!(o.value, 0.5);
            assert!(same_ray(&o.post_state, &SpinState::up_z()).unwrap());
            let o = measure_once(&SpinState::down_z(), &Z, &mut rng).unwrap();
            assert_eq!(o.value, -0.5);
            assert_eq!(o.probability, 1.0);
        }
    }

    #[test]
    fn collapse_is_idempotent() {
        let mut rng = seeded_rng(7);
        let psi = SpinState::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
        for axis in [X, Y, Z, Axis::direction(1.1, 2.3).unwrap()] {
            let first = measure_once(&psi, &axis, &mut rng).unwrap();
            let (u, d) = probabilities(&first.post_state, &axis).unwrap();
            let p_same = if first.port == Port::Up { u } else { d };
            assert!((p_same - 1.0).abs() < EPS);
            for _ in 0..20 {
                let again = measure_once(&first.post_state, &axis, &mut rng).unwrap();
                assert_eq!(again.port, first.port);
            }
        }
    }

    #[test]
    fn unbiased_frequency() {
        let mut rng = seeded_rng(42);
        let psi = SpinState::from_real(H, H);
        let n = 100_000;
        let ups = (0..n)
            .filter(|_| measure_once(&psi, &Z, &mut rng).unwrap().port == Port::Up)
            .count();
        let f = ups as f64 / n as f64;
        assert!((f - 0.5).abs() <= 0.0063, "{f}");
    }

    #[test]
    fn chain_exact_probabilities() {
        let s = run_chain(&chain("z+", "x:up", 1000, 1)).unwrap();
        assert!((s.final_probability_exact - 0.5).abs() < EPS);
        let s = run_chain(&chain("z+", "x:up,z:up", 1000, 1)).unwrap();
        assert!((s.final_probability_exact - 0.25).abs() < EPS);
        let s = run_chain(&chain("z+", "z:up,z:up,z:up", 1000, 1)).unwrap();
        assert_eq!(s.final_probability_exact, 1.0);
        assert_eq!(s.final_frequency, 1.0);
    }

    #[test]
    fn chain_counts_are_consistent() {
        let s = run_chain(&chain("x+", "z:up,y:down,n(pi/3,pi/5):up", 5000, 9)).unwrap();
        let mut arriving = s.shots;
        for st in &s.per_stage {
            assert_eq!(st.up_count + st.down_count, arriving);
            let selected = if st.port == Port::Up {
                st.up_count
            } else {
                st.down_count
            };
            assert_eq!(st.transmitted_count, selected);
            arriving = st.transmitted_count;
        }
        assert!((0.0..=1.0).contains(&s.final_frequency));
    }

    #[test]
    fn chain_is_reproducible() {
        let spec = chain("y+", "x:up,z:down", 20_000, 123);
        assert_eq!(run_chain(&spec).unwrap(), run_chain(&spec).unwrap());
        let other = ChainSpec {
            seed: 124,
            ..spec.clone()
        };
        assert_ne!(run_chain(&spec).unwrap(), run_chain(&other).unwrap());
    }

    #[test]
    fn chain_errors() {
        assert_eq!(run_chain(&chain("z+", "", 10, 0)), Err(Error::EmptyChain));
        assert!(matches!(run_chain(&chain("z+", "x:up", 0, 0)), Err(Error::Usage(_))));
        let bad = ChainSpec {
            preparation: Preparation::Token("1,0;1,0".into()),
            ..chain("z+", "x:up", 1, 0)
        };
        assert!(matches!(run_chain(&bad), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn chain_spec_json() {
        let json = r#"{"preparation":"z+","stages":[{"axis":"x","port":"up"},{"axis":{"theta":1.0,"phi":0.5},"port":"down"}],"shots":10,"seed":3}"#;
        let spec: ChainSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.stages.len(), 2);
        assert_eq!(serde_json::to_string(&spec).unwrap(), json);
        assert!(serde_json::from_str::<ChainSpec>(r#"{"preparation":"q","stages":[],"shots":1,"seed":0}"#).is_err());
    }
}
