//! Brute-force minimization of the conditional determinant over Gaussian
//! measurements, used to check the closed-form `E^min`.
//!
//! A pure Gaussian measurement on mode B is a rotated squeezed vacuum with
//! covariance `σ_M = R(θ) diag(s/2, 1/(2s)) R(θ)ᵀ`, `s = e^{2·squeeze}`.
//! Measuring it leaves mode A with covariance
//! `ε = α − C (β + σ_M)⁻¹ Cᵀ`, and the oracle minimizes `det ε` on a grid in
//! `(squeeze, θ)` followed by golden-section coordinate descent. The
//! infinite-squeezing (homodyne) limit is evaluated separately since it lies
//! outside every finite grid.

use nalgebra::{Matrix2, Vector2};
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::covariance::{rotation, StandardForm, TwoModeCovariance};
use crate::error::{Error, Result};
use crate::symplectic::symplectic_data;

const MIN_GRID: usize = 64;
const GOLDEN_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianMeasurement {
    pub squeeze: f64,
    pub angle: f64,
}

impl GaussianMeasurement {
    pub fn covariance(&self) -> Matrix2<f64> {
        let s = (2.0 * self.squeeze).exp();
        let r = rotation(self.angle);
        r * Matrix2::new(s / 2.0, 0.0, 0.0, 0.5 / s) * r.transpose()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleGrid {
    pub squeeze_max: f64,
    pub n_squeeze: usize,
    pub n_angle: usize,
}

impl Default for OracleGrid {
    fn default() -> Self {
        OracleGrid { squeeze_max: 8.0, n_squeeze: 64, n_angle: 64 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleOutcome {
    pub e_min: f64,
    /// Best finite measurement, or the homodyne angle when `homodyne` is set.
    pub measurement: GaussianMeasurement,
    pub homodyne: bool,
}

/// Conditional covariance blocks of the state in `Half` units.
struct Blocks {
    a: Matrix2<f64>,
    b: Matrix2<f64>,
    c: Matrix2<f64>,
}

impl Blocks {
    fn new(cov: &TwoModeCovariance) -> Self {
        let cov = cov.to_half();
        Blocks { a: cov.block_a(), b: cov.block_b(), c: cov.block_c() }
    }

    fn conditional(&self, sigma_m: &Matrix2<f64>) -> f64 {
        match (self.b + sigma_m).try_inverse() {
            Some(inv) => (self.a - self.c * inv * self.c.transpose()).determinant(),
            None => f64::INFINITY,
        }
    }

    /// Limit of infinite squeezing: the quadrature along `(-sin θ, cos θ)` is
    /// measured exactly.
    fn homodyne(&self, angle: f64) -> f64 {
        let v = Vector2::new(-angle.sin(), angle.cos());
        let var = (v.transpose() * self.b * v)[(0, 0)];
        let cv = self.c * v;
        (self.a - cv * cv.transpose() / var).determinant()
    }

    fn finite(&self, squeeze: f64, angle: f64) -> f64 {
        self.conditional(&GaussianMeasurement { squeeze, angle }.covariance())
    }
}

/// Determinant of mode A's covariance after measuring mode B with an
/// arbitrary (possibly mixed) Gaussian measurement covariance `sigma_m`.
pub fn conditional_determinant(cov: &TwoModeCovariance, sigma_m: &Matrix2<f64>) -> f64 {
    Blocks::new(cov).conditional(sigma_m)
}

fn golden<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > GOLDEN_TOL {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

fn grid_argmin<F>(n_rows: usize, n_cols: usize, f: F) -> (usize, usize, f64)
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    (0..n_rows)
        .into_par_iter()
        .map(|i| {
            (0..n_cols)
                .map(|j| (i, j, f(i, j)))
                .fold((i, 0, f64::INFINITY), |best, cur| if cur.2 < best.2 { cur } else { best })
        })
        .reduce(
            || (usize::MAX, usize::MAX, f64::INFINITY),
            |x, y| match x.2.partial_cmp(&y.2) {
                Some(std::cmp::Ordering::Less) => x,
                Some(std::cmp::Ordering::Greater) => y,
                _ => {
                    if (x.0, x.1) <= (y.0, y.1) {
                        x
                    } else {
                        y
                    }
                }
            },
        )
}

/// Full oracle search. See the module docs for the parametrization.
pub fn search(sf: &StandardForm, grid: &OracleGrid) -> Result<OracleOutcome> {
    if grid.n_squeeze < MIN_GRID || grid.n_angle < MIN_GRID {
        return Err(Error::InvalidInput(format!(
            "oracle grid needs at least {MIN_GRID} points per axis, got {}x{}",
            grid.n_squeeze, grid.n_angle
        )));
    }
    if !(grid.squeeze_max > 0.0) {
        return Err(Error::InvalidInput("squeeze_max must be positive".into()));
    }
    symplectic_data(sf)?.require_physical()?;
    let blocks = Blocks::new(&sf.embed());

    let dr = grid.squeeze_max / (grid.n_squeeze - 1) as f64;
    let dtheta = PI / grid.n_angle as f64;
    let (i, j, _) = grid_argmin(grid.n_squeeze, grid.n_angle, |i, j| {
        blocks.finite(i as f64 * dr, j as f64 * dtheta)
    });
    let (mut r, mut theta) = (i as f64 * dr, j as f64 * dtheta);
    let mut value = blocks.finite(r, theta);
    for _ in 0..MAX_SWEEPS {
        let (r_new, _) = golden(
            |x| blocks.finite(x, theta),
            (r - dr).max(-grid.squeeze_max),
            (r + dr).min(grid.squeeze_max),
        );
        let (t_new, v_new) = golden(|t| blocks.finite(r_new, t), theta - dtheta, theta + dtheta);
        let improved = value - v_new;
        if v_new <= value {
            r = r_new;
            theta = t_new;
            value = v_new;
        }
        if !(improved > 1e-15) {
            break;
        }
    }

    // The descent runs in signed squeeze so it can leave r = 0, where every
    // angle gives the same value. (-r, θ) is the same measurement as (r, θ + π/2).
    if r < 0.0 {
        r = -r;
        theta += PI / 2.0;
    }

    let (k, _, _) = grid_argmin(grid.n_angle, 1, |k, _| blocks.homodyne(k as f64 * dtheta));
    let (h_angle, h_value) = golden(
        |t| blocks.homodyne(t),
        k as f64 * dtheta - dtheta,
        k as f64 * dtheta + dtheta,
    );

    if r >= grid.squeeze_max - 1e-9 && value < h_value - 1e-9 {
        return Err(Error::GridTooCoarse(format!(
            "minimum sits on squeeze_max = {} and beats the homodyne limit",
            grid.squeeze_max
        )));
    }
    let outcome = if h_value < value {
        OracleOutcome {
            e_min: h_value,
            measurement: GaussianMeasurement { squeeze: f64::INFINITY, angle: h_angle.rem_euclid(PI) },
            homodyne: true,
        }
    } else {
        OracleOutcome {
            e_min: value,
            measurement: GaussianMeasurement { squeeze: r, angle: theta.rem_euclid(PI) },
            homodyne: false,
        }
    };
    Ok(outcome)
}

/// Brute-force estimate of `E^min` (measurement on B, conditional state of A).
pub fn brute_force_e_min(sf: &StandardForm, grid: &OracleGrid) -> Result<f64> {
    search(sf, grid).map(|o| o.e_min)
}

/// Draws a random physical standard form: local variances `1/2 + Exp(1)` and
/// correlations uniform below `sqrt(n m)`, rejected until `d₋ >= 1/2`.
pub fn random_physical_state<R: Rng + ?Sized>(rng: &mut R) -> StandardForm {
    loop {
        let n = 0.5 + <Exp1 as Distribution<f64>>::sample(&Exp1, rng);
        let m = 0.5 + <Exp1 as Distribution<f64>>::sample(&Exp1, rng);
        let cmax = (n * m).sqrt();
        let c1 = rng.gen_range(0.0..cmax);
        let c2 = rng.gen_range(0.0..cmax);
        let Ok(sf) = StandardForm::new(n, m, c1, c2) else { continue };
        if symplectic_data(&sf).map(|s| s.physical).unwrap_or(false) {
            return sf;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{e_min, EminBranch};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn weak_squeezing_optimum_near_origin() {
        // Best measurement has squeeze ~0.056 at θ = π/2, inside the first grid cell.
        let sf = StandardForm::new(1.16149799, 2.8633548, 1.21109792, 1.15804527).unwrap();
        let out = search(&sf, &OracleGrid::default()).unwrap();
        assert!((out.e_min - 0.552946860192278).abs() < 1e-9, "{}", out.e_min);
        assert!(!out.homodyne);
        assert!((out.measurement.squeeze - 0.0564780).abs() < 1e-5);
        assert!((out.measurement.angle - PI / 2.0).abs() < 1e-5);
    }

    #[test]
    fn product_thermal_cannot_be_improved() {
        let sf = StandardForm::product_thermal(1.0, 1.0).unwrap();
        let e = brute_force_e_min(&sf, &OracleGrid::default()).unwrap();
        assert!((e - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_tmsv_reaches_vacuum() {
        let c = 3f64.sqrt() / 2.0;
        let sf = StandardForm::new(1.0, 1.0, c, c).unwrap();
        let e = brute_force_e_min(&sf, &OracleGrid::default()).unwrap();
        assert!((e - 0.25).abs() < 1e-4, "{e}");
    }

    #[test]
    fn coarse_grid_rejected() {
        let grid = OracleGrid { n_squeeze: 10, ..OracleGrid::default() };
        assert!(matches!(
            brute_force_e_min(&StandardForm::vacuum(), &grid),
            Err(Error::InvalidInput(_))
        ));
        let bad = StandardForm::new(1.0, 1.0, 0.9, 0.9).unwrap();
        assert!(brute_force_e_min(&bad, &OracleGrid::default()).unwrap_err().is_unphysical());
    }

    #[test]
    fn small_squeeze_range_flags_interior_optimum() {
        // This state has its optimum at a finite squeeze well above 0.02.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let grid = OracleGrid { squeeze_max: 0.02, ..OracleGrid::default() };
        let mut flagged = 0;
        for _ in 0..50 {
            let sf = random_physical_state(&mut rng);
            if let Err(Error::GridTooCoarse(_)) = brute_force_e_min(&sf, &grid) {
                flagged += 1;
            }
        }
        assert!(flagged > 0);
    }

    #[test]
    fn matches_closed_form_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let grid = OracleGrid::default();
        let mut per_branch = [0usize; 2];
        for _ in 0..60 {
            let sf = random_physical_state(&mut rng);
            let sd = symplectic_data(&sf).unwrap();
            let (closed, branch) = e_min(&sd).unwrap();
            per_branch[(branch == EminBranch::Second) as usize] += 1;
            let brute = brute_force_e_min(&sf, &grid).unwrap();
            assert!((closed - brute).abs() <= 1e-4, "{sf:?}: closed {closed} brute {brute}");
        }
        assert!(per_branch[0] > 5 && per_branch[1] > 5, "{per_branch:?}");
    }

    #[test]
    fn noisy_measurements_never_win() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..10 {
            let sf = random_physical_state(&mut rng);
            let best = brute_force_e_min(&sf, &OracleGrid::default()).unwrap();
            let cov = sf.embed();
            for _ in 0..200 {
                let m = GaussianMeasurement {
                    squeeze: rng.gen_range(0.0..4.0),
                    angle: rng.gen_range(0.0..PI),
                };
                let noise = rng.gen_range(0.0..2.0);
                let sigma = m.covariance() + Matrix2::identity() * noise;
                assert!(conditional_determinant(&cov, &sigma) >= best - 1e-9);
            }
        }
    }

    #[test]
    fn measurement_is_pure() {
        let m = GaussianMeasurement { squeeze: 0.7, angle: 1.1 };
        assert!((m.covariance().determinant() - 0.25).abs() < 1e-12);
    }
}
