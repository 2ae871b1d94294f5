//! Covariance reconstruction from homodyne and joint-homodyne variances, and
//! a Monte Carlo dual-homodyne simulator that produces such data.

use log::warn;
use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::covariance::{StandardForm, CLAMP_TOL};
use crate::error::{Error, Result};
use crate::symplectic::symplectic_data;

/// Largest tolerated `|Δ²X − Δ²Y|` on a single mode, in SNL units.
pub const SINGLE_MODE_ASYMMETRY: f64 = 0.2;
pub const MIN_SIMULATION_SAMPLES: usize = 10_000;
const MIN_TRACE_LEN: usize = 16;
/// A fit whose RMS residual exceeds this fraction of the mean is not trusted.
const FIT_RESIDUAL_FRACTION: f64 = 0.1;

/// One set of homodyne variances at a single RF frequency.
///
/// Variances are stored as measured; dividing by `snl_reference` puts them in
/// SNL units. Records already in SNL units carry `snl_reference = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceRecord {
    pub rf_hz: f64,
    pub var_xa: f64,
    pub var_ya: f64,
    pub var_xb: f64,
    pub var_yb: f64,
    pub var_xminus: f64,
    pub var_yplus: f64,
    #[serde(rename = "snl_ref")]
    pub snl_reference: f64,
    pub n_samples: u64,
}

impl VarianceRecord {
    /// The record every vacuum measurement should produce (SNL units).
    pub fn vacuum(rf_hz: f64, n_samples: u64) -> Self {
        VarianceRecord {
            rf_hz,
            var_xa: 1.0,
            var_ya: 1.0,
            var_xb: 1.0,
            var_yb: 1.0,
            var_xminus: 1.0,
            var_yplus: 1.0,
            snl_reference: 1.0,
            n_samples,
        }
    }

    /// Exact (noise-free) record of a state, in SNL units.
    pub fn ideal(sf: &StandardForm, rf_hz: f64, n_samples: u64) -> Self {
        VarianceRecord {
            rf_hz,
            var_xa: 2.0 * sf.n,
            var_ya: 2.0 * sf.n,
            var_xb: 2.0 * sf.m,
            var_yb: 2.0 * sf.m,
            var_xminus: sf.var_xminus_snl(),
            var_yplus: sf.var_yplus_snl(),
            snl_reference: 1.0,
            n_samples,
        }
    }

    fn variances(&self) -> [f64; 6] {
        [self.var_xa, self.var_ya, self.var_xb, self.var_yb, self.var_xminus, self.var_yplus]
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.snl_reference > 0.0) || !self.snl_reference.is_finite() {
            return Err(Error::InvalidInput(format!(
                "snl_ref must be positive, got {}",
                self.snl_reference
            )));
        }
        let names = ["var_xa", "var_ya", "var_xb", "var_yb", "var_xminus", "var_yplus"];
        for (name, v) in names.iter().zip(self.variances()) {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Divides every variance by the shot-noise reference.
    pub fn normalized(&self) -> Result<VarianceRecord> {
        self.validate()?;
        let k = 1.0 / self.snl_reference;
        Ok(VarianceRecord {
            var_xa: self.var_xa * k,
            var_ya: self.var_ya * k,
            var_xb: self.var_xb * k,
            var_yb: self.var_yb * k,
            var_xminus: self.var_xminus * k,
            var_yplus: self.var_yplus * k,
            snl_reference: 1.0,
            ..*self
        })
    }

    /// Joint-quadrature squeezing, `min(Δ²X₋, Δ²Y₊)` in SNL units.
    pub fn squeezing(&self) -> Result<f64> {
        let r = self.normalized()?;
        Ok(r.var_xminus.min(r.var_yplus))
    }

    /// One-sigma statistical uncertainty of a `Half`-unit variance of size `v`
    /// estimated from this record's sample count.
    fn sigma_half(&self, v: f64) -> f64 {
        if self.n_samples > 1 {
            v * (2.0 / (self.n_samples - 1) as f64).sqrt()
        } else {
            0.0
        }
    }
}

/// Reconstructs `(n, m, c1, c2)` from a record, assuming a symmetric
/// phase-insensitive state:
/// `n = Δ²X_A/2`, `m = Δ²X_B/2`, `c1 = (Δ²X_A − Δ²X₋)/2`, `c2 = (Δ²Y_B − Δ²Y₊)/2`.
///
/// Noise can push a reconstruction slightly outside the physical region.
/// Values up to five statistical sigmas out are pulled back onto the boundary
/// (local variances to 1/2, correlations scaled down until `d₋ = 1/2`).
pub fn extract_standard_form(rec: &VarianceRecord) -> Result<StandardForm> {
    let r = rec.normalized()?;
    for (mode, x, y) in [('A', r.var_xa, r.var_ya), ('B', r.var_xb, r.var_yb)] {
        let diff = (x - y).abs();
        if diff >= SINGLE_MODE_ASYMMETRY {
            return Err(Error::AsymmetricSingleModeNoise { mode, diff });
        }
    }

    let mut n = r.var_xa / 2.0;
    let mut m = r.var_xb / 2.0;
    let mut c1 = (r.var_xa - r.var_xminus) / 2.0;
    let mut c2 = (r.var_yb - r.var_yplus) / 2.0;
    let sigma = r.sigma_half(n.max(m)).max(CLAMP_TOL);

    for (name, v) in [("n", &mut n), ("m", &mut m)] {
        if *v < 0.5 {
            if *v < 0.5 - 5.0 * sigma {
                return Err(Error::InvalidInput(format!(
                    "{name} = {v} is below the vacuum level by more than 5 sigma"
                )));
            }
            *v = 0.5;
        }
    }
    for (name, v) in [("c1", &mut c1), ("c2", &mut c2)] {
        if *v < 0.0 {
            warn!("negative {name} = {v:.3e} clamped to 0 (rf {} Hz)", r.rf_hz);
            *v = 0.0;
        }
    }

    let sf = StandardForm::new(n, m, c1, c2)?;
    let d_minus = match symplectic_data(&sf) {
        Ok(sd) if sd.physical => return Ok(sf),
        Ok(sd) => sd.d_minus,
        Err(_) => 0.0,
    };
    let sigma_d = d_minus_sigma(&sf, &r).unwrap_or(sigma);
    if d_minus < 0.5 - 5.0 * sigma_d {
        return Err(Error::UnphysicalReconstruction { d_minus, sigma: sigma_d });
    }
    Ok(project_to_physical(sf))
}

/// Statistical one-sigma uncertainty of `d₋` for a state extracted from the
/// (normalized) record `r`, propagated linearly from the sample variances of
/// the five record entries that enter the extraction.
fn d_minus_sigma(sf: &StandardForm, r: &VarianceRecord) -> Option<f64> {
    if r.n_samples < 2 {
        return Some(0.0);
    }
    let d_at = |p: [f64; 4]| {
        let s = StandardForm { n: p[0], m: p[1], c1: p[2], c2: p[3] };
        symplectic_data(&s).ok().map(|sd| sd.d_minus)
    };
    let base = [sf.n, sf.m, sf.c1, sf.c2];
    let mut grad = [0.0; 4];
    for (k, g) in grad.iter_mut().enumerate() {
        let h = 1e-7 * base[k].abs().max(1e-3);
        let (mut up, mut down) = (base, base);
        up[k] += h;
        down[k] -= h;
        *g = (d_at(up)? - d_at(down)?) / (2.0 * h);
    }
    let [dn, dm, dc1, dc2] = grad;
    let rel = (2.0 / (r.n_samples - 1) as f64).sqrt();
    // n = xa/2, m = xb/2, c1 = (xa − x₋)/2, c2 = (yb − y₊)/2.
    let terms = [
        (dn + dc1) / 2.0 * r.var_xa,
        -dc1 / 2.0 * r.var_xminus,
        dm / 2.0 * r.var_xb,
        dc2 / 2.0 * r.var_yb,
        -dc2 / 2.0 * r.var_yplus,
    ];
    Some(rel * terms.iter().map(|t| t * t).sum::<f64>().sqrt())
}

/// Scales both correlations by the largest factor that keeps `d₋ >= 1/2`.
fn project_to_physical(sf: StandardForm) -> StandardForm {
    let physical = |k: f64| {
        let s = StandardForm { c1: sf.c1 * k, c2: sf.c2 * k, ..sf };
        symplectic_data(&s).map(|d| d.d_minus >= 0.5).unwrap_or(false)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if physical(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    warn!("reconstructed state scaled by {lo:.9} onto the physical boundary");
    StandardForm { c1: sf.c1 * lo, c2: sf.c2 * lo, ..sf }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JointSignal {
    /// `(Y_A + Y_B(φ))/√2`
    Sum,
    /// `(X_A − X_B(φ))/√2`
    Difference,
}

/// Joint-signal variance (SNL units) as the local-oscillator phase is scanned.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanTrace {
    pub phase: Vec<f64>,
    pub variance: Vec<f64>,
    pub which: JointSignal,
}

impl ScanTrace {
    pub fn new(phase: Vec<f64>, variance: Vec<f64>, which: JointSignal) -> Result<Self> {
        if phase.len() != variance.len() {
            return Err(Error::InvalidInput(format!(
                "phase and variance lengths differ ({} vs {})",
                phase.len(),
                variance.len()
            )));
        }
        if phase.len() < MIN_TRACE_LEN {
            return Err(Error::InvalidInput(format!(
                "scan trace needs at least {MIN_TRACE_LEN} points, got {}",
                phase.len()
            )));
        }
        if let Some(v) = variance.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidInput(format!("trace variance must be positive, got {v}")));
        }
        Ok(ScanTrace { phase, variance, which })
    }

    /// Phase span covered by the samples, counting half a sample spacing on
    /// either end.
    pub fn coverage(&self) -> f64 {
        let lo = self.phase.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.phase.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let span = hi - lo;
        span + span / (self.phase.len() - 1) as f64
    }
}

/// Least-squares fit of `a + p cos(kφ) + q sin(kφ)`; returns
/// `(a − sqrt(p² + q²), rms residual)`.
fn fit_harmonic(trace: &ScanTrace, k: f64) -> Option<(f64, f64)> {
    let mut ata = Matrix3::zeros();
    let mut aty = Vector3::zeros();
    for (&phi, &y) in trace.phase.iter().zip(&trace.variance) {
        let row = Vector3::new(1.0, (k * phi).cos(), (k * phi).sin());
        ata += row * row.transpose();
        aty += row * y;
    }
    let coef = ata.cholesky()?.solve(&aty);
    let rss: f64 = trace
        .phase
        .iter()
        .zip(&trace.variance)
        .map(|(&phi, &y)| {
            let model = coef[0] + coef[1] * (k * phi).cos() + coef[2] * (k * phi).sin();
            (y - model).powi(2)
        })
        .sum();
    let rms = (rss / trace.phase.len() as f64).sqrt();
    Some((coef[0] - coef[1].hypot(coef[2]), rms))
}

/// Minimum joint variance over a phase scan.
///
/// Fits a single harmonic with period `2π` (dual homodyne with one scanned
/// local oscillator) and with period `π`, keeps the better fit and returns
/// its minimum. If neither fit explains the trace to within 10% of its mean,
/// the raw minimum is returned instead.
pub fn scan_minimum(trace: &ScanTrace) -> Result<f64> {
    let coverage = trace.coverage();
    if coverage < 2.0 * PI - 1e-9 {
        return Err(Error::InsufficientScanRange(coverage));
    }
    let mean = trace.variance.iter().sum::<f64>() / trace.variance.len() as f64;
    let best = [1.0, 2.0]
        .iter()
        .filter_map(|&k| fit_harmonic(trace, k))
        .min_by(|x, y| x.1.total_cmp(&y.1));
    let raw = trace.variance.iter().cloned().fold(f64::INFINITY, f64::min);
    match best {
        Some((min, rms)) if rms <= FIT_RESIDUAL_FRACTION * mean && min > 0.0 => Ok(min),
        _ => {
            warn!("scan fit rejected, falling back to the raw minimum");
            Ok(raw)
        }
    }
}

/// Output of [`simulate_dual_homodyne`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualHomodyneScan {
    pub sum: ScanTrace,
    pub difference: ScanTrace,
    pub record: VarianceRecord,
}

/// Streams of running sums for zero-mean sample variances.
#[derive(Default, Clone, Copy)]
struct Moments {
    n: u64,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    /// Unbiased sample variance.
    fn variance(&self) -> f64 {
        let n = self.n as f64;
        (self.sum_sq - self.sum * self.sum / n) / (n - 1.0)
    }
}

/// Deterministic generator for substream `stream` of `seed`.
fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Monte Carlo dual-homodyne measurement of `sf`.
///
/// For every local-oscillator phase `φ` (applied to mode B), draws
/// `n_samples` quadrature vectors from the state and records the SNL-unit
/// variances of `(X_A − X_B(φ))/√2` and `(Y_A + Y_B(φ))/√2`, where
/// `X_B(φ) = X_B cos φ + Y_B sin φ` and `Y_B(φ) = −X_B sin φ + Y_B cos φ`.
/// Single-mode variances come from one further independent substream. Each
/// phase uses its own ChaCha substream, so the output does not depend on
/// thread scheduling.
pub fn simulate_dual_homodyne(
    sf: &StandardForm,
    n_samples: usize,
    phases: &[f64],
    seed: u64,
) -> Result<DualHomodyneScan> {
    symplectic_data(sf)?.require_physical()?;
    if n_samples < MIN_SIMULATION_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "simulation needs at least {MIN_SIMULATION_SAMPLES} samples, got {n_samples}"
        )));
    }
    let cov: Matrix4<f64> = *sf.embed().entries();
    let chol = cov.cholesky().ok_or(Error::NotPositiveDefinite)?.unpack();
    let draw = |rng: &mut ChaCha8Rng| -> Vector4<f64> {
        let z = Vector4::from_fn(|_, _| StandardNormal.sample(rng));
        chol * z
    };

    let per_phase: Vec<(f64, f64)> = phases
        .par_iter()
        .enumerate()
        .map(|(i, &phi)| {
            let mut rng = substream(seed, i as u64 + 1);
            let (s, c) = phi.sin_cos();
            let (mut diff, mut sum) = (Moments::default(), Moments::default());
            for _ in 0..n_samples {
                let q = draw(&mut rng);
                let xb = q[2] * c + q[3] * s;
                let yb = -q[2] * s + q[3] * c;
                diff.push((q[0] - xb) * FRAC_1_SQRT_2);
                sum.push((q[1] + yb) * FRAC_1_SQRT_2);
            }
            (2.0 * sum.variance(), 2.0 * diff.variance())
        })
        .collect();

    let mut rng = substream(seed, 0);
    let mut single = [Moments::default(); 4];
    for _ in 0..n_samples {
        let q = draw(&mut rng);
        for (acc, x) in single.iter_mut().zip(q.iter()) {
            acc.push(*x);
        }
    }

    let sum = ScanTrace::new(
        phases.to_vec(),
        per_phase.iter().map(|p| p.0).collect(),
        JointSignal::Sum,
    )?;
    let difference = ScanTrace::new(
        phases.to_vec(),
        per_phase.iter().map(|p| p.1).collect(),
        JointSignal::Difference,
    )?;
    let record = VarianceRecord {
        rf_hz: 0.0,
        var_xa: 2.0 * single[0].variance(),
        var_ya: 2.0 * single[1].variance(),
        var_xb: 2.0 * single[2].variance(),
        var_yb: 2.0 * single[3].variance(),
        var_xminus: scan_minimum(&difference)?,
        var_yplus: scan_minimum(&sum)?,
        snl_reference: 1.0,
        n_samples: n_samples as u64,
    };
    Ok(DualHomodyneScan { sum, difference, record })
}

/// `count` phases evenly spaced over `[0, 2π)`.
pub fn uniform_phases(count: usize) -> Vec<f64> {
    (0..count).map(|i| 2.0 * PI * i as f64 / count as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmsv_n1() -> StandardForm {
        let c = 3f64.sqrt() / 2.0;
        StandardForm::new(1.0, 1.0, c, c).unwrap()
    }

    fn record(xa: f64, xb: f64, xm: f64, yp: f64) -> VarianceRecord {
        VarianceRecord {
            rf_hz: 1e6,
            var_xa: xa,
            var_ya: xa,
            var_xb: xb,
            var_yb: xb,
            var_xminus: xm,
            var_yplus: yp,
            snl_reference: 1.0,
            n_samples: 1_000_000,
        }
    }

    #[test]
    fn vacuum_record() {
        let sf = extract_standard_form(&VarianceRecord::vacuum(0.0, 1000)).unwrap();
        assert_eq!(sf, StandardForm::vacuum());
    }

    #[test]
    fn tmsv_record() {
        let v = 2.0 - 3f64.sqrt();
        let sf = extract_standard_form(&record(2.0, 2.0, v, v)).unwrap();
        assert!((sf.n - 1.0).abs() < 1e-15 && (sf.m - 1.0).abs() < 1e-15);
        assert!((sf.c1 - 0.866_025_4).abs() < 1e-7 && (sf.c2 - 0.866_025_4).abs() < 1e-7);
        let sf = extract_standard_form(&record(2.0, 2.0, 0.268, 0.268)).unwrap();
        assert!((sf.c1 - 0.866).abs() < 1e-3);
        assert!(symplectic_data(&sf).unwrap().d_minus >= 0.5 - 1e-9);
    }

    #[test]
    fn near_pure_noise_is_projected_not_rejected() {
        // Simulated pure-TMSV record at 1e4 samples: d₋ lands near 0.40, which
        // is well inside 5 sigma once the noise is propagated to d₋.
        let rec = VarianceRecord {
            rf_hz: 0.0,
            var_xa: 1.934672651173062,
            var_ya: 2.0087218627111474,
            var_xb: 1.9443970058654554,
            var_yb: 2.03553622327974,
            var_xminus: 0.2738563085704535,
            var_yplus: 0.27475530961783723,
            snl_reference: 1.0,
            n_samples: 10_000,
        };
        let sf = extract_standard_form(&rec).unwrap();
        assert!(symplectic_data(&sf).unwrap().d_minus >= 0.5 - 1e-9);
        let mut many = rec;
        many.n_samples = 100_000_000;
        assert!(matches!(
            extract_standard_form(&many),
            Err(Error::UnphysicalReconstruction { .. })
        ));
    }

    #[test]
    fn product_thermal_record() {
        let sf = extract_standard_form(&record(2.0, 2.0, 2.0, 2.0)).unwrap();
        assert_eq!(sf, StandardForm::new(1.0, 1.0, 0.0, 0.0).unwrap());
    }

    #[test]
    fn raw_records_are_normalized() {
        let mut rec = record(2.0, 2.0, 2.0, 2.0);
        for v in [
            &mut rec.var_xa,
            &mut rec.var_ya,
            &mut rec.var_xb,
            &mut rec.var_yb,
            &mut rec.var_xminus,
            &mut rec.var_yplus,
        ] {
            *v *= 3.5e-4;
        }
        rec.snl_reference = 3.5e-4;
        let sf = extract_standard_form(&rec).unwrap();
        assert!((sf.n - 1.0).abs() < 1e-12 && sf.c1.abs() < 1e-12);
    }

    #[test]
    fn extraction_errors() {
        let mut rec = record(2.0, 2.0, 2.0, 2.0);
        rec.var_ya = 2.5;
        assert!(matches!(
            extract_standard_form(&rec),
            Err(Error::AsymmetricSingleModeNoise { mode: 'A', .. })
        ));
        // c = 0.95 at n = 1 is far outside the physical region.
        let rec = record(2.0, 2.0, 0.1, 0.1);
        assert!(matches!(
            extract_standard_form(&rec),
            Err(Error::UnphysicalReconstruction { .. })
        ));
        let mut rec = record(2.0, 2.0, 2.0, 2.0);
        rec.snl_reference = 0.0;
        assert!(extract_standard_form(&rec).is_err());
    }

    #[test]
    fn negative_correlation_clamped() {
        let sf = extract_standard_form(&record(2.0, 2.0, 2.01, 2.0)).unwrap();
        assert_eq!(sf.c1, 0.0);
    }

    #[test]
    fn scan_minimum_constant_and_cosine() {
        let phases = uniform_phases(64);
        let flat = ScanTrace::new(phases.clone(), vec![1.7; 64], JointSignal::Sum).unwrap();
        assert!((scan_minimum(&flat).unwrap() - 1.7).abs() < 1e-12);
        let v: Vec<f64> = phases.iter().map(|p| 1.5 + 0.5 * (2.0 * p).cos()).collect();
        let t = ScanTrace::new(phases.clone(), v, JointSignal::Difference).unwrap();
        assert!((scan_minimum(&t).unwrap() - 1.0).abs() < 1e-9);
        let v: Vec<f64> = phases.iter().map(|p| 1.2 - 0.9 * (p - 0.3).cos()).collect();
        let t = ScanTrace::new(phases, v, JointSignal::Difference).unwrap();
        assert!((scan_minimum(&t).unwrap() - 0.3).abs() < 1e-9);
    }

    #[test]
    fn scan_minimum_needs_full_period() {
        let phases: Vec<f64> = (0..32).map(|i| i as f64 * 0.1).collect();
        let t = ScanTrace::new(phases, vec![1.0; 32], JointSignal::Sum).unwrap();
        assert!(matches!(scan_minimum(&t), Err(Error::InsufficientScanRange(_))));
    }

    #[test]
    fn scan_minimum_falls_back_to_raw() {
        let phases = uniform_phases(64);
        // A square wave is poorly described by one harmonic.
        let v: Vec<f64> = phases.iter().map(|p| if p.sin() > 0.0 { 3.0 } else { 0.2 }).collect();
        let t = ScanTrace::new(phases, v, JointSignal::Sum).unwrap();
        assert_eq!(scan_minimum(&t).unwrap(), 0.2);
    }

    #[test]
    fn trace_validation() {
        assert!(ScanTrace::new(vec![0.0; 8], vec![1.0; 8], JointSignal::Sum).is_err());
        assert!(ScanTrace::new(vec![0.0; 16], vec![1.0; 17], JointSignal::Sum).is_err());
        let mut v = vec![1.0; 16];
        v[3] = -1.0;
        assert!(ScanTrace::new(uniform_phases(16), v, JointSignal::Sum).is_err());
    }

    #[test]
    fn simulation_is_deterministic() {
        let phases = uniform_phases(16);
        let a = simulate_dual_homodyne(&tmsv_n1(), 10_000, &phases, 5).unwrap();
        let b = simulate_dual_homodyne(&tmsv_n1(), 10_000, &phases, 5).unwrap();
        assert_eq!(a, b);
        let c = simulate_dual_homodyne(&tmsv_n1(), 10_000, &phases, 6).unwrap();
        assert_ne!(a.record, c.record);
    }

    #[test]
    fn simulation_rejects_bad_input() {
        let phases = uniform_phases(16);
        assert!(simulate_dual_homodyne(&tmsv_n1(), 100, &phases, 1).is_err());
        let bad = StandardForm::new(1.0, 1.0, 0.9, 0.9).unwrap();
        assert!(simulate_dual_homodyne(&bad, 10_000, &phases, 1).unwrap_err().is_unphysical());
    }

    #[test]
    fn vacuum_simulation_sits_at_shot_noise() {
        let n = 40_000;
        let scan =
            simulate_dual_homodyne(&StandardForm::vacuum(), n, &uniform_phases(32), 3).unwrap();
        let tol = 3.0 / (n as f64).sqrt();
        let r = scan.record;
        for v in [r.var_xa, r.var_ya, r.var_xb, r.var_yb, r.var_xminus, r.var_yplus] {
            assert!((v - 1.0).abs() < tol, "{r:?}");
        }
    }

    #[test]
    fn product_thermal_simulation_has_no_phase_dependence() {
        let sf = StandardForm::product_thermal(1.0, 1.0).unwrap();
        let scan = simulate_dual_homodyne(&sf, 20_000, &uniform_phases(32), 8).unwrap();
        let r = scan.record;
        assert!((r.var_xminus - 2.0).abs() < 0.06 && (r.var_xa - 2.0).abs() < 0.06);
        let spread = scan.difference.variance.iter().cloned().fold(0.0, f64::max)
            - scan.difference.variance.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread < 0.15, "{spread}");
    }
}
