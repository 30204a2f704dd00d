//! Named hardware/noise parameter sets.

use ionrep_core::channels::NoiseModel;
use ionrep_core::timing::HardwareParams;

/// A named, fully resolved parameter set.
pub struct ParamSet {
    pub name: &'static str,
    pub description: &'static str,
    pub hardware: HardwareParams,
    pub noise: NoiseModel,
}

/// Demonstrated trapped-ion parameters: 99% link fidelity, 0.1%/0.5% gate
/// noise, 10 ms coherence, p = 0.35, η_d = 0.9, L_att = 22 km, 10 GHz
/// direct-transmission source.
pub fn baseline() -> ParamSet {
    ParamSet {
        name: "baseline",
        description: "demonstrated setup: link fidelity 0.99, gate noise 0.1%/0.5%, \
                      coherence 10 ms, photon probability 0.35, detector 0.9, \
                      attenuation length 22 km, 10 GHz pair source",
        hardware: HardwareParams::baseline(),
        noise: NoiseModel::baseline(),
    }
}

/// Projected parameters: 99.9% link fidelity, 0.01%/0.1% gate noise,
/// p = 0.75.
pub fn improved() -> ParamSet {
    ParamSet {
        name: "improved",
        description: "projected setup: link fidelity 0.999, gate noise 0.01%/0.1%, \
                      photon probability 0.75 (other parameters as baseline)",
        hardware: HardwareParams::improved(),
        noise: NoiseModel::improved(),
    }
}

pub fn all() -> Vec<ParamSet> {
    vec![baseline(), improved()]
}
