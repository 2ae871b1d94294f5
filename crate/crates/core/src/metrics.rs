//! Closed-form Gaussian discord, mutual information and classical correlations.
//!
//! All entropies are in bits. The measurement that defines the classical
//! correlations acts on mode B and conditions mode A, so `discord_ab` is
//! `h(√I₂) − h(d₋) − h(d₊) + h(√E^min)` with `E^min` the optimal conditional
//! determinant of A. The opposite direction reuses the same formulas with
//! the modes exchanged.

use serde::{Deserialize, Serialize};

use crate::covariance::StandardForm;
use crate::error::Result;
use crate::symplectic::{entropy_h, symplectic_data, SymplecticData};

/// Discord below this many bits is reported as classical.
pub const CLASSICAL_TOL: f64 = 1e-6;
/// `I₃` magnitudes below this are treated as exactly zero for branch routing.
const ZERO_I3: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// Measure mode B, condition mode A.
    AGivenB,
    /// Measure mode A, condition mode B.
    BGivenA,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EminBranch {
    First,
    Second,
}

/// Left-hand side of the branch test; the first branch applies when it is `<= 1`.
pub fn branch_condition(sd: &SymplecticData) -> f64 {
    let (i1, i2, i3, i4) = (sd.i1, sd.i2, sd.i3, sd.i4);
    let num = (i1 * i2 - i4).powi(2);
    let den = (i1 + 4.0 * i4) * (i2 + 0.25) * i3 * i3;
    num / den
}

/// Minimal determinant of mode A's conditional covariance over Gaussian
/// measurements on mode B, together with the branch of the piecewise formula
/// that produced it.
pub fn e_min(sd: &SymplecticData) -> Result<(f64, EminBranch)> {
    sd.require_physical()?;
    let (i1, i2, i3, i4) = (sd.i1, sd.i2, sd.i3, sd.i4);
    let b = i2 - 0.25;
    let first = i3.abs() > ZERO_I3 && b > 0.0 && branch_condition(sd) <= 1.0;
    if first {
        let q = (i1 - 4.0 * i4) * b;
        let root = sd.first_branch_radicand().max(0.0).sqrt();
        let value = (2.0 * i3 * i3 - q + 2.0 * i3.abs() * root) / (4.0 * b * b);
        Ok((value, EminBranch::First))
    } else {
        let root = sd.second_branch_radicand().max(0.0).sqrt();
        let value = (i1 * i2 - i3 * i3 + i4 - root) / (2.0 * i2);
        Ok((value, EminBranch::Second))
    }
}

fn oriented(sd: &SymplecticData, direction: Direction) -> SymplecticData {
    match direction {
        Direction::AGivenB => *sd,
        Direction::BGivenA => sd.swapped(),
    }
}

/// `h(√I₁) + h(√I₂) − h(d₊) − h(d₋)`.
pub fn mutual_information(sd: &SymplecticData) -> Result<f64> {
    sd.require_physical()?;
    Ok(entropy_h(sd.i1.sqrt())? + entropy_h(sd.i2.sqrt())?
        - entropy_h(sd.d_plus)?
        - entropy_h(sd.d_minus)?)
}

/// `h(√I₁) − h(√E^min)` for the given direction.
pub fn classical_correlations(sd: &SymplecticData, direction: Direction) -> Result<f64> {
    let sd = oriented(sd, direction);
    let (e, _) = e_min(&sd)?;
    Ok(entropy_h(sd.i1.sqrt())? - entropy_h(e.sqrt())?)
}

/// `h(√I₂) − h(d₋) − h(d₊) + h(√E^min)` for the given direction.
pub fn discord(sd: &SymplecticData, direction: Direction) -> Result<f64> {
    let sd = oriented(sd, direction);
    let (e, _) = e_min(&sd)?;
    Ok(entropy_h(sd.i2.sqrt())? - entropy_h(sd.d_minus)? - entropy_h(sd.d_plus)?
        + entropy_h(e.sqrt())?)
}

/// `Δ²X₋ + Δ²Y₊` in SNL units; values below 2 certify inseparability.
pub fn inseparability(sf: &StandardForm) -> f64 {
    sf.var_xminus_snl() + sf.var_yplus_snl()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationFlags {
    /// Discord above one bit, a sufficient (not necessary) entanglement witness.
    pub entangled_sufficient: bool,
    pub classical: bool,
    pub inseparable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub mutual_information: f64,
    pub classical_correlations: f64,
    pub discord_ab: f64,
    pub discord_ba: f64,
    pub e_min: f64,
    pub e_min_branch: EminBranch,
    pub inseparability: f64,
    pub inseparability_units: String,
    pub d_plus: f64,
    pub d_minus: f64,
    pub flags: CorrelationFlags,
}

impl CorrelationReport {
    pub fn compute(sf: &StandardForm) -> Result<Self> {
        let sd = symplectic_data(sf)?;
        sd.require_physical()?;
        let mutual_information = mutual_information(&sd)?;
        let (e_min, e_min_branch) = e_min(&sd)?;
        let classical_correlations = entropy_h(sd.i1.sqrt())? - entropy_h(e_min.sqrt())?;
        let discord_ab = discord(&sd, Direction::AGivenB)?;
        let discord_ba = discord(&sd, Direction::BGivenA)?;
        let inseparability = inseparability(sf);
        Ok(CorrelationReport {
            mutual_information,
            classical_correlations,
            discord_ab,
            discord_ba,
            e_min,
            e_min_branch,
            inseparability,
            inseparability_units: "snl".to_string(),
            d_plus: sd.d_plus,
            d_minus: sd.d_minus,
            flags: CorrelationFlags {
                entangled_sufficient: discord_ab > 1.0,
                classical: discord_ab < CLASSICAL_TOL,
                inseparable: inseparability < 2.0,
            },
        })
    }

    /// Joint-quadrature squeezing `min(Δ²X₋, Δ²Y₊)` in SNL units.
    pub fn squeezing_of(sf: &StandardForm) -> f64 {
        sf.var_xminus_snl().min(sf.var_yplus_snl())
    }
}
