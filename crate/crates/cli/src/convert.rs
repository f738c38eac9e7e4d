//! Physical and dimensionless quantities for a trapped particle.

use std::f64::consts::PI;

use coherent_transport::frame::{Frame, AMU_KG};
use coherent_transport::protocols::{bbb_time, forward_speed_limit};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MassUnit {
    Amu,
    Kg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FreqUnit {
    Hz,
    Khz,
    Mhz,
    RadPerS,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceUnit {
    M,
    Um,
    Nm,
}

fn parse_unit<T: for<'de> Deserialize<'de>>(what: &str, s: &str) -> Result<T, CliError> {
    serde_json::from_value(serde_json::Value::String(s.to_ascii_lowercase()))
        .map_err(|_| CliError::Invalid(format!("unknown {what} unit '{s}'")))
}

impl MassUnit {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        parse_unit("mass", s)
    }
}

impl FreqUnit {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        parse_unit("frequency", s)
    }
}

impl DistanceUnit {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        parse_unit("distance", s)
    }

    fn to_m(self) -> f64 {
        match self {
            DistanceUnit::M => 1.0,
            DistanceUnit::Um => 1e-6,
            DistanceUnit::Nm => 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvertInput {
    pub mass: f64,
    pub mass_unit: MassUnit,
    pub freq: f64,
    pub freq_unit: FreqUnit,
    /// Read an Hz-family value as angular frequency instead of `omega / 2 pi`.
    pub angular: bool,
    pub distance: Option<(f64, DistanceUnit)>,
    pub target_d: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvertReport {
    pub mass_kg: f64,
    pub omega_rad_s: f64,
    pub frequency_hz: f64,
    pub frequency_convention: String,
    /// Physical length of one dimensionless position unit, `sqrt(2 hbar / m w)`.
    pub length_unit_m: f64,
    pub distance_m: Option<f64>,
    #[serde(rename = "D")]
    pub d: Option<f64>,
    /// `|alpha|` with `alpha = X + i P`, so the displaced ground state has `|alpha| = D`.
    pub alpha_xp: Option<f64>,
    /// `|alpha|` in ground-state-width units, `D / 2`.
    pub alpha_width: Option<f64>,
    pub tau_bb_s: f64,
    pub tau_bbb_r_eq_d_s: f64,
    pub target_d: Option<f64>,
    pub target_distance_m: Option<f64>,
}

pub fn convert(input: &ConvertInput) -> Result<ConvertReport, CliError> {
    let mass_kg = match input.mass_unit {
        MassUnit::Amu => input.mass * AMU_KG,
        MassUnit::Kg => input.mass,
    };
    let scale = match input.freq_unit {
        FreqUnit::Hz | FreqUnit::RadPerS => 1.0,
        FreqUnit::Khz => 1e3,
        FreqUnit::Mhz => 1e6,
    };
    let angular = input.angular || input.freq_unit == FreqUnit::RadPerS;
    let omega = if angular {
        input.freq * scale
    } else {
        2.0 * PI * input.freq * scale
    };
    let frame = Frame::physical(omega, mass_kg)?;
    let convention = if angular {
        "frequency read as angular omega (rad/s)"
    } else {
        "frequency read as cyclic f = omega / 2 pi; omega = 2 pi f"
    };

    let distance_m = match input.distance {
        Some((x, unit)) => {
            if !(x.is_finite() && x >= 0.0) {
                return Err(CliError::Invalid(format!("distance must be nonnegative, got {x}")));
            }
            Some(x * unit.to_m())
        }
        None => None,
    };
    let d = distance_m.map(|x| x * frame.position_scale());
    if let Some(t) = input.target_d {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::Invalid(format!("target D must be nonnegative, got {t}")));
        }
    }

    Ok(ConvertReport {
        mass_kg,
        omega_rad_s: omega,
        frequency_hz: omega / (2.0 * PI),
        frequency_convention: convention.into(),
        length_unit_m: 1.0 / frame.position_scale(),
        distance_m,
        d,
        alpha_xp: d,
        alpha_width: d.map(|d| d / 2.0),
        tau_bb_s: forward_speed_limit(omega)?,
        tau_bbb_r_eq_d_s: bbb_time(omega, 1.0, 1.0)?,
        target_d: input.target_d,
        target_distance_m: input.target_d.map(|t| t / frame.position_scale()),
    })
}
