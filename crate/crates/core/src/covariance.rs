//! Two-mode covariance matrices and their standard form.
//!
//! Quadratures are ordered `(X_A, Y_A, X_B, Y_B)`. The standard form is
//!
//! ```text
//! | n   0   c1   0  |
//! | 0   n   0   -c2 |
//! | c1  0   m    0  |
//! | 0  -c2  0    m  |
//! ```
//!
//! with `c1, c2 >= 0`; the minus sign on `c2` is part of the layout, not of
//! the stored value. This is the sign structure of a two-mode squeezed
//! vacuum (correlated amplitudes, anticorrelated phases).

use nalgebra::{Matrix2, Matrix4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::Units;

pub const SYMMETRY_TOL: f64 = 1e-12;
/// Slack allowed below an analytic bound before a value counts as a violation.
pub const CLAMP_TOL: f64 = 1e-9;
const REDUCTION_TOL: f64 = 1e-9;

/// A 4x4 real symmetric covariance matrix tagged with its unit convention.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CovarianceJson", into = "CovarianceJson")]
pub struct TwoModeCovariance {
    entries: Matrix4<f64>,
    units: Units,
}

#[derive(Serialize, Deserialize)]
struct CovarianceJson {
    entries: Vec<f64>,
    units: Units,
}

impl TryFrom<CovarianceJson> for TwoModeCovariance {
    type Error = Error;

    fn try_from(raw: CovarianceJson) -> Result<Self> {
        if raw.entries.len() != 16 {
            return Err(Error::InvalidInput(format!(
                "covariance needs 16 row-major entries, got {}",
                raw.entries.len()
            )));
        }
        TwoModeCovariance::new(Matrix4::from_row_slice(&raw.entries), raw.units)
    }
}

impl From<TwoModeCovariance> for CovarianceJson {
    fn from(cov: TwoModeCovariance) -> Self {
        let mut entries = Vec::with_capacity(16);
        for i in 0..4 {
            for j in 0..4 {
                entries.push(cov.entries[(i, j)]);
            }
        }
        CovarianceJson { entries, units: cov.units }
    }
}

impl TwoModeCovariance {
    /// Validates symmetry and a positive diagonal. Physicality is a separate
    /// check, see [`crate::symplectic::SymplecticData::from_covariance`].
    pub fn new(entries: Matrix4<f64>, units: Units) -> Result<Self> {
        let asym = (entries - entries.transpose()).amax();
        if !asym.is_finite() || asym > SYMMETRY_TOL * entries.amax().max(1.0) {
            return Err(Error::NonSymmetric(asym));
        }
        for i in 0..4 {
            if !(entries[(i, i)] > 0.0) {
                return Err(Error::NonPositiveDiagonal(i));
            }
        }
        // Symmetrize exactly so downstream determinants see a symmetric matrix.
        let entries = (entries + entries.transpose()) * 0.5;
        Ok(TwoModeCovariance { entries, units })
    }

    pub fn vacuum(units: Units) -> Self {
        let v = Units::Half.convert(0.5, units);
        TwoModeCovariance { entries: Matrix4::identity() * v, units }
    }

    pub fn entries(&self) -> &Matrix4<f64> {
        &self.entries
    }

    pub fn units(&self) -> Units {
        self.units
    }

    /// Returns the same state expressed in `to` units.
    pub fn convert_units(&self, to: Units) -> TwoModeCovariance {
        let scale = self.units.convert(1.0, to);
        TwoModeCovariance { entries: self.entries * scale, units: to }
    }

    pub fn to_half(&self) -> TwoModeCovariance {
        self.convert_units(Units::Half)
    }

    pub fn block_a(&self) -> Matrix2<f64> {
        self.entries.fixed_view::<2, 2>(0, 0).into_owned()
    }

    pub fn block_b(&self) -> Matrix2<f64> {
        self.entries.fixed_view::<2, 2>(2, 2).into_owned()
    }

    /// Off-diagonal block, rows indexed by mode A and columns by mode B.
    pub fn block_c(&self) -> Matrix2<f64> {
        self.entries.fixed_view::<2, 2>(0, 2).into_owned()
    }

    /// Applies independent phase-space rotations to each mode.
    pub fn rotate_local(&self, theta_a: f64, theta_b: f64) -> TwoModeCovariance {
        let mut s = Matrix4::zeros();
        s.fixed_view_mut::<2, 2>(0, 0).copy_from(&rotation(theta_a));
        s.fixed_view_mut::<2, 2>(2, 2).copy_from(&rotation(theta_b));
        let rotated = s * self.entries * s.transpose();
        TwoModeCovariance { entries: (rotated + rotated.transpose()) * 0.5, units: self.units }
    }
}

pub fn convert_units(cov: &TwoModeCovariance, from: Units, to: Units) -> TwoModeCovariance {
    let tagged = TwoModeCovariance { entries: cov.entries, units: from };
    tagged.convert_units(to)
}

pub(crate) fn rotation(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// The `(n, m, c1, c2)` parametrization, always in `Half` units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StandardForm {
    pub n: f64,
    pub m: f64,
    pub c1: f64,
    pub c2: f64,
}

impl StandardForm {
    /// Builds a standard form from `Half`-unit values. Entries within
    /// [`CLAMP_TOL`] of a bound are clamped onto it.
    pub fn new(n: f64, m: f64, c1: f64, c2: f64) -> Result<Self> {
        let values = [n, m, c1, c2];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidStandardForm(format!("non-finite entry in {values:?}")));
        }
        let n = clamp_lower(n, 0.5, "n")?;
        let m = clamp_lower(m, 0.5, "m")?;
        let c1 = clamp_lower(c1, 0.0, "c1")?;
        let c2 = clamp_lower(c2, 0.0, "c2")?;
        Ok(StandardForm { n, m, c1, c2 })
    }

    /// Builds a standard form from values given in `units`.
    pub fn with_units(n: f64, m: f64, c1: f64, c2: f64, units: Units) -> Result<Self> {
        let k = units.to_half_factor();
        StandardForm::new(n * k, m * k, c1 * k, c2 * k)
    }

    pub fn vacuum() -> Self {
        StandardForm { n: 0.5, m: 0.5, c1: 0.0, c2: 0.0 }
    }

    /// Pure two-mode squeezed vacuum with squeezing parameter `r`.
    pub fn tmsv(r: f64) -> Self {
        let v = (2.0 * r).cosh() / 2.0;
        let c = (2.0 * r).sinh() / 2.0;
        StandardForm { n: v, m: v, c1: c, c2: c }
    }

    /// Product of two thermal states with the given variances.
    pub fn product_thermal(n: f64, m: f64) -> Result<Self> {
        StandardForm::new(n, m, 0.0, 0.0)
    }

    /// Exchanges the roles of the two modes.
    pub fn swapped(&self) -> StandardForm {
        StandardForm { n: self.m, m: self.n, c1: self.c1, c2: self.c2 }
    }

    /// Values in the requested units, as `[n, m, c1, c2]`.
    pub fn values_in(&self, units: Units) -> [f64; 4] {
        [self.n, self.m, self.c1, self.c2].map(|v| Units::Half.convert(v, units))
    }

    pub fn embed(&self) -> TwoModeCovariance {
        #[rustfmt::skip]
        let entries = Matrix4::new(
            self.n,  0.0,      self.c1,  0.0,
            0.0,     self.n,   0.0,      -self.c2,
            self.c1, 0.0,      self.m,   0.0,
            0.0,     -self.c2, 0.0,      self.m,
        );
        TwoModeCovariance { entries, units: Units::Half }
    }

    /// Joint amplitude-difference variance `Δ²X₋` in SNL units.
    pub fn var_xminus_snl(&self) -> f64 {
        self.n + self.m - 2.0 * self.c1
    }

    /// Joint phase-sum variance `Δ²Y₊` in SNL units.
    pub fn var_yplus_snl(&self) -> f64 {
        self.n + self.m - 2.0 * self.c2
    }
}

fn clamp_lower(value: f64, bound: f64, name: &str) -> Result<f64> {
    if value >= bound {
        Ok(value)
    } else if value >= bound - CLAMP_TOL {
        Ok(bound)
    } else {
        Err(Error::InvalidStandardForm(format!("{name} = {value} is below {bound}")))
    }
}

/// Reduces a covariance matrix to standard form using local rotations only.
///
/// Both local blocks must already be proportional to the identity (no local
/// squeezing is undone here), and the correlation block must have
/// `det C <= 0`, the two-mode-squeezed sign structure. When `C` is already
/// diagonal the entries are read off in place; otherwise the two singular
/// values are ordered as `c1 >= c2`.
pub fn standard_form(cov: &TwoModeCovariance) -> Result<StandardForm> {
    let cov = cov.to_half();
    let a = cov.block_a();
    let b = cov.block_b();
    let c = cov.block_c();
    let scale = cov.entries.amax().max(1.0);
    let tol = REDUCTION_TOL * scale;

    for block in [&a, &b] {
        if (block[(0, 0)] - block[(1, 1)]).abs() > tol || block[(0, 1)].abs() > tol {
            return Err(Error::NotLocallyReducible(
                "local block is not proportional to the identity",
            ));
        }
    }
    let n = 0.5 * (a[(0, 0)] + a[(1, 1)]);
    let m = 0.5 * (b[(0, 0)] + b[(1, 1)]);

    let det_c = c.determinant();
    if det_c > tol * scale {
        return Err(Error::NotLocallyReducible(
            "correlation block has det C > 0 (phase quadratures positively correlated)",
        ));
    }

    let (c1, c2) = if c[(0, 1)].abs() <= tol && c[(1, 0)].abs() <= tol {
        let (x, y) = (c[(0, 0)], c[(1, 1)]);
        // diag(x, y) with x*y <= 0; a pi rotation of one mode flips both signs.
        if x >= 0.0 && y <= 0.0 {
            (x, -y)
        } else {
            (-x, y)
        }
    } else {
        let svd = c.svd(false, false);
        let s = svd.singular_values;
        (s[0].max(s[1]), s[0].min(s[1]))
    };

    StandardForm::new(n, m, c1.max(0.0), c2.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn vacuum_reduces_to_vacuum() {
        let sf = standard_form(&TwoModeCovariance::vacuum(Units::Half)).unwrap();
        assert_eq!(sf, StandardForm::vacuum());
        let sf = standard_form(&TwoModeCovariance::vacuum(Units::Snl)).unwrap();
        assert_eq!(sf, StandardForm::vacuum());
    }

    #[test]
    fn tmsv_reduces() {
        let h = 3f64.sqrt() / 2.0;
        #[rustfmt::skip]
        let m = Matrix4::new(
            1.0, 0.0, h, 0.0,
            0.0, 1.0, 0.0, -h,
            h, 0.0, 1.0, 0.0,
            0.0, -h, 0.0, 1.0,
        );
        let sf = standard_form(&TwoModeCovariance::new(m, Units::Half).unwrap()).unwrap();
        assert!(close(sf.n, 1.0, 1e-15) && close(sf.m, 1.0, 1e-15));
        assert!(close(sf.c1, 0.866_025_4, 1e-7) && close(sf.c2, 0.866_025_4, 1e-7));
        // cosh(2r) = 2
        let r = 2f64.acosh() / 2.0;
        let t = StandardForm::tmsv(r);
        assert!(close(t.n, 1.0, 1e-14) && close(t.c1, h, 1e-14));
    }

    #[test]
    fn quarter_turn_on_mode_a_is_undone() {
        let sf = StandardForm::new(1.3, 0.9, 0.6, 0.6).unwrap();
        let rotated = sf.embed().rotate_local(FRAC_PI_2, 0.0);
        let back = standard_form(&rotated).unwrap();
        for (x, y) in [(back.n, sf.n), (back.m, sf.m), (back.c1, sf.c1), (back.c2, sf.c2)] {
            assert!(close(x, y, 1e-12), "{back:?} vs {sf:?}");
        }
    }

    #[test]
    fn diagonal_with_flipped_signs() {
        // A pi rotation of mode B turns diag(c1, -c2) into diag(-c1, c2).
        let sf = StandardForm::new(1.1, 1.2, 0.4, 0.7).unwrap();
        let flipped = sf.embed().rotate_local(0.0, std::f64::consts::PI);
        let back = standard_form(&flipped).unwrap();
        assert!(close(back.c1, 0.4, 1e-12) && close(back.c2, 0.7, 1e-12));
    }

    #[test]
    fn rejects_local_squeezing_and_positive_det_c() {
        let mut m = Matrix4::identity() * 0.5;
        m[(0, 0)] = 2.0;
        m[(1, 1)] = 0.125;
        let squeezed = TwoModeCovariance::new(m, Units::Half).unwrap();
        assert!(matches!(standard_form(&squeezed), Err(Error::NotLocallyReducible(_))));

        let mut m = Matrix4::identity();
        for (i, j) in [(0, 2), (2, 0), (1, 3), (3, 1)] {
            m[(i, j)] = 0.3;
        }
        let cov = TwoModeCovariance::new(m, Units::Half).unwrap();
        assert!(matches!(standard_form(&cov), Err(Error::NotLocallyReducible(_))));
    }

    #[test]
    fn validation_errors() {
        let mut m = Matrix4::identity();
        m[(0, 1)] = 0.1;
        assert!(matches!(TwoModeCovariance::new(m, Units::Half), Err(Error::NonSymmetric(_))));
        let mut m = Matrix4::identity();
        m[(2, 2)] = 0.0;
        assert!(matches!(
            TwoModeCovariance::new(m, Units::Half),
            Err(Error::NonPositiveDiagonal(2))
        ));
        assert!(StandardForm::new(0.4, 0.5, 0.0, 0.0).is_err());
        assert!(StandardForm::new(0.5, 0.5, -0.1, 0.0).is_err());
        assert_eq!(StandardForm::new(0.5 - 1e-12, 0.5, -1e-12, 0.0).unwrap(), StandardForm::vacuum());
    }

    #[test]
    fn unit_conversion() {
        let snl = TwoModeCovariance::vacuum(Units::Snl);
        assert_eq!(snl.entries()[(0, 0)], 1.0);
        let half = convert_units(&snl, Units::Snl, Units::Half);
        assert_eq!(*half.entries(), Matrix4::identity() * 0.5);
        let back = half.convert_units(Units::Snl);
        assert_eq!(back, snl);
        let sf = StandardForm::new(1.0, 0.5, 0.0, 0.0).unwrap();
        let snl = sf.embed().convert_units(Units::Snl);
        assert_eq!(snl.entries()[(0, 0)], 2.0);
        assert_eq!(snl.units(), Units::Snl);
    }

    #[test]
    fn json_shape() {
        let cov = StandardForm::tmsv(0.3).embed().convert_units(Units::Snl);
        let text = serde_json::to_string(&cov).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["units"], "snl");
        assert_eq!(value["entries"].as_array().unwrap().len(), 16);
        let back: TwoModeCovariance = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cov);
        assert!(serde_json::from_str::<TwoModeCovariance>(r#"{"entries":[1,0,0],"units":"half"}"#).is_err());
    }
}
