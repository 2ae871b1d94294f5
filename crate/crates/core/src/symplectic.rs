//! Symplectic invariants, symplectic eigenvalues and the entropy kernel.

use serde::{Deserialize, Serialize};

use crate::covariance::{StandardForm, TwoModeCovariance, CLAMP_TOL};
use crate::error::{Error, Result};

/// Slack on the discriminant `Δ² − 4 I₄` before it counts as negative.
const DISCRIMINANT_TOL: f64 = 1e-12;

/// Local and global symplectic invariants of a two-mode state in `Half` units.
///
/// `i3` is `det C`, so for the standard form it equals `-c1 * c2`. With this
/// sign a pure two-mode squeezed vacuum has `d_plus = d_minus = 1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymplecticData {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i4: f64,
    pub delta: f64,
    pub d_plus: f64,
    pub d_minus: f64,
    pub physical: bool,
    /// Standard form the invariants came from, when known. Lets the
    /// conditional-entropy radicands be evaluated in factored form.
    #[serde(skip)]
    source: Option<StandardForm>,
}

impl SymplecticData {
    pub fn from_invariants(i1: f64, i2: f64, i3: f64, i4: f64) -> Result<Self> {
        let delta = i1 + i2 + 2.0 * i3;
        Self::with_discriminant(i1, i2, i3, i4, delta * delta - 4.0 * i4)
    }

    fn with_discriminant(i1: f64, i2: f64, i3: f64, i4: f64, disc: f64) -> Result<Self> {
        if !(i4 > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        let delta = i1 + i2 + 2.0 * i3;
        if disc < -DISCRIMINANT_TOL * delta.abs().max(1.0).powi(2) {
            return Err(Error::ComplexEigenvalue(disc));
        }
        let root = disc.max(0.0).sqrt();
        let d_plus = ((delta + root) / 2.0).sqrt();
        // d+ d- = sqrt(I4) avoids cancellation in (Δ - root) for nearly pure states.
        let d_minus = i4.sqrt() / d_plus;
        if !d_minus.is_finite() || d_minus <= 0.0 {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(SymplecticData {
            i1,
            i2,
            i3,
            i4,
            delta,
            d_plus,
            d_minus,
            physical: d_minus >= 0.5 - CLAMP_TOL,
            source: None,
        })
    }

    pub fn from_standard_form(sf: &StandardForm) -> Result<Self> {
        let StandardForm { n, m, c1, c2 } = *sf;
        let nm = n * m;
        // Δ² − 4 I₄ factored so that it vanishes exactly for symmetric pure
        // states instead of leaving a rounding residue that the square root
        // amplifies to ~1e-8.
        let disc = (n * n - m * m).powi(2) + 4.0 * (c1 * m - c2 * n) * (c1 * n - c2 * m);
        let mut sd = Self::with_discriminant(
            n * n,
            m * m,
            -c1 * c2,
            (nm - c1 * c1) * (nm - c2 * c2),
            disc,
        )?;
        sd.source = Some(*sf);
        Ok(sd)
    }

    /// Invariants of an arbitrary two-mode covariance matrix.
    pub fn from_covariance(cov: &TwoModeCovariance) -> Result<Self> {
        let cov = cov.to_half();
        Self::from_invariants(
            cov.block_a().determinant(),
            cov.block_b().determinant(),
            cov.block_c().determinant(),
            cov.entries().determinant(),
        )
    }

    /// Same state with the two modes exchanged.
    pub fn swapped(&self) -> SymplecticData {
        SymplecticData {
            i1: self.i2,
            i2: self.i1,
            source: self.source.map(|sf| sf.swapped()),
            ..*self
        }
    }

    /// `I₃² − (I₁ − 4I₄)(I₂ − 1/4)`, the radicand of the first `E^min` branch.
    pub(crate) fn first_branch_radicand(&self) -> f64 {
        match self.source {
            Some(StandardForm { n, m, c1, c2 }) => {
                let nm = n * m;
                (n - 4.0 * m * (nm - c1 * c1)) * (n - 4.0 * m * (nm - c2 * c2)) / 4.0
            }
            None => {
                self.i3 * self.i3 - (self.i1 - 4.0 * self.i4) * (self.i2 - 0.25)
            }
        }
    }

    /// `I₃⁴ + (I₁I₂ − I₄)² − 2I₃²(I₁I₂ + I₄)`, the radicand of the second branch.
    pub(crate) fn second_branch_radicand(&self) -> f64 {
        match self.source {
            Some(StandardForm { n, m, c1, c2 }) => (n * m * (c1 * c1 - c2 * c2)).powi(2),
            None => {
                let (i1, i2, i3, i4) = (self.i1, self.i2, self.i3, self.i4);
                let p = i1 * i2 - i4;
                i3.powi(4) + p * p - 2.0 * i3 * i3 * (i1 * i2 + i4)
            }
        }
    }

    pub fn require_physical(&self) -> Result<&Self> {
        if self.physical {
            Ok(self)
        } else {
            Err(Error::UnphysicalState { d_minus: self.d_minus })
        }
    }
}

pub fn symplectic_data(sf: &StandardForm) -> Result<SymplecticData> {
    SymplecticData::from_standard_form(sf)
}

/// Von Neumann entropy (bits) of a single-mode thermal state whose symplectic
/// eigenvalue is `x` (vacuum at 1/2):
/// `h(x) = (x + 1/2) log2(x + 1/2) - (x - 1/2) log2(x - 1/2)`.
pub fn entropy_h(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.5 - CLAMP_TOL {
        return Err(Error::Domain(x));
    }
    if x <= 0.5 {
        return Ok(0.0);
    }
    let up = x + 0.5;
    let down = x - 0.5;
    Ok(up * up.log2() - xlog2x(down))
}

fn xlog2x(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}
