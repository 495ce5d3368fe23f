// SPDX-License-Identifier: Apache-2.0

//! RC delay of a square broadcast routing layer.
//!
//! A copper layer of side `L` and thickness `T` over oxide of thickness `D`
//! has capacitance `4 eps0 L^2 / D` and resistance `rho / T`, with the
//! oxide permittivity taken as `4 eps0`. The product reduces to
//! `0.6e-18 L^2 / D / T` seconds in SI units.

use crate::CliError;

const EPS0: f64 = 8.8e-12;
const RHO_CU: f64 = 17e-9;

/// The rounded constant of the closed form.
pub const DELAY_COEFFICIENT: f64 = 0.6e-18;

fn check(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "{name}: must be a positive length in meters"
        )))
    }
}

/// Delay in seconds for layer size `l`, oxide `d` and copper `t`, all in
/// meters.
pub fn delay(l: f64, d: f64, t: f64) -> Result<f64, CliError> {
    check("L", l)?;
    check("D", d)?;
    check("T", t)?;
    Ok(DELAY_COEFFICIENT * l * l / d / t)
}

/// The same delay from the unrounded physical constants.
pub fn delay_from_constants(l: f64, d: f64, t: f64) -> Result<f64, CliError> {
    delay(l, d, t)?;
    Ok((4.0 * EPS0 * l * l / d) * (RHO_CU / t))
}

/// Largest layer size meeting a delay budget in seconds.
pub fn max_size(budget: f64, d: f64, t: f64) -> Result<f64, CliError> {
    check("budget", budget)?;
    check("D", d)?;
    check("T", t)?;
    Ok((budget * d * t / DELAY_COEFFICIENT).sqrt())
}
