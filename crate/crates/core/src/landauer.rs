//! Distance of measured (or modelled) energy from the Landauer bound.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::work::WorkReport;

/// Boltzmann constant, J/K (exact since the 2019 SI redefinition).
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// `k_B · T · ln 2`: minimum energy to erase one bit at `temperature_kelvin`.
pub fn landauer_limit_per_bit(temperature_kelvin: f64) -> f64 {
    BOLTZMANN * temperature_kelvin * std::f64::consts::LN_2
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandauerGap {
    pub temperature_kelvin: f64,
    pub bits_processed: u64,
    pub measured_joules: f64,
    /// `bits_processed · k_B·T·ln2`.
    pub landauer_joules: f64,
    /// `measured_joules / landauer_joules`.
    pub gap_ratio: f64,
}

impl LandauerGap {
    pub fn from_joules(measured_joules: f64, bits: u64, temperature_kelvin: f64) -> Result<Self> {
        if bits == 0 {
            return Err(Error::invalid("bit count must be positive"));
        }
        if !(temperature_kelvin > 0.0 && temperature_kelvin.is_finite()) {
            return Err(Error::invalid(format!(
                "temperature {temperature_kelvin} K must be positive"
            )));
        }
        let landauer_joules = bits as f64 * landauer_limit_per_bit(temperature_kelvin);
        Ok(LandauerGap {
            temperature_kelvin,
            bits_processed: bits,
            measured_joules,
            landauer_joules,
            gap_ratio: measured_joules / landauer_joules,
        })
    }

    pub fn gap_log10(&self) -> f64 {
        self.gap_ratio.log10()
    }
}

/// Gap between a work report's energy proxy and the bound for `bits` bits.
pub fn landauer_gap(report: &WorkReport, bits: u64, temperature_kelvin: f64) -> Result<LandauerGap> {
    LandauerGap::from_joules(report.energy_proxy_joules(), bits, temperature_kelvin)
}
