//! Guided modes of 1D piecewise-constant index profiles.
//!
//! Solves slab waveguide modes by a transfer-matrix characteristic function
//! with bisection refinement, for both vertical layer stacks (effective-index
//! reduction) and transverse line cuts (source injection, transmission
//! decomposition).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::k0;

#[derive(Debug, Error)]
pub enum ModeSolverError {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("modes have mismatched wavelength ({0} vs {1})")]
    WavelengthMismatch(f64, f64),
    #[error("modes have mismatched polarization")]
    PolarizationMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarization {
    Te,
    Tm,
}

impl std::fmt::Display for Polarization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Polarization::Te => write!(f, "TE"),
            Polarization::Tm => write!(f, "TM"),
        }
    }
}

/// One finite layer of a slab profile.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Layer {
    pub index: f64,
    pub thickness: f64,
}

/// Piecewise-constant index profile: semi-infinite claddings around a finite
/// layer stack. Coordinates start at 0 on the left edge of the first layer.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlabProfile {
    pub n_left: f64,
    pub layers: Vec<Layer>,
    pub n_right: f64,
}

impl SlabProfile {
    pub fn new(n_left: f64, layers: Vec<Layer>, n_right: f64) -> Self {
        Self {
            n_left,
            layers,
            n_right,
        }
    }

    pub fn symmetric(n_clad: f64, n_core: f64, thickness: f64) -> Self {
        Self::new(
            n_clad,
            vec![Layer {
                index: n_core,
                thickness,
            }],
            n_clad,
        )
    }

    pub fn n_max(&self) -> f64 {
        self.layers
            .iter()
            .map(|l| l.index)
            .fold(self.n_left.max(self.n_right), f64::max)
    }

    pub fn n_clad_max(&self) -> f64 {
        self.n_left.max(self.n_right)
    }

    pub fn total_thickness(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness).sum()
    }

    /// Index at position y (0 = left edge of the first layer).
    pub fn index_at(&self, y: f64) -> f64 {
        if y < 0.0 {
            return self.n_left;
        }
        let mut edge = 0.0;
        for l in &self.layers {
            edge += l.thickness;
            if y < edge {
                return l.index;
            }
        }
        self.n_right
    }

    fn validate(&self) -> Result<(), ModeSolverError> {
        if self.n_left < 1.0 || self.n_right < 1.0 {
            return Err(ModeSolverError::InvalidProfile(
                "cladding index below 1".into(),
            ));
        }
        for l in &self.layers {
            if l.index < 1.0 {
                return Err(ModeSolverError::InvalidProfile("layer index below 1".into()));
            }
            if l.thickness <= 0.0 {
                return Err(ModeSolverError::InvalidProfile(
                    "layer thickness must be positive".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Sampled transverse mode field on a uniform grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModeProfile {
    /// Coordinate of the first sample (m).
    pub y0: f64,
    /// Sample spacing (m).
    pub dy: f64,
    /// Field samples (Ez for TE, Hz for TM), normalized to unit power flux.
    pub field: Vec<f64>,
    /// Local refractive index at each sample.
    pub index: Vec<f64>,
}

impl ModeProfile {
    pub fn position(&self, i: usize) -> f64 {
        self.y0 + self.dy * i as f64
    }

    /// Linear interpolation; zero outside the sampled window.
    pub fn sample_at(&self, y: f64) -> f64 {
        let t = (y - self.y0) / self.dy;
        if t < 0.0 || t >= (self.field.len() - 1) as f64 {
            return 0.0;
        }
        let i = t as usize;
        let frac = t - i as f64;
        self.field[i] * (1.0 - frac) + self.field[i + 1] * frac
    }
}

/// A guided slab mode.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Mode {
    pub wavelength: f64,
    pub polarization: Polarization,
    pub n_eff: f64,
    /// Mode order = number of field zero crossings.
    pub order: usize,
    pub profile: ModeProfile,
}

impl Mode {
    /// Power flux in solver units: TE `0.5*n_eff*int |psi|^2 dy`,
    /// TM `0.5*n_eff*int |psi|^2/n^2 dy`. Unity for a normalized mode.
    pub fn power_flux(&self) -> f64 {
        let p = &self.profile;
        let sum: f64 = match self.polarization {
            Polarization::Te => p.field.iter().map(|f| f * f).sum(),
            Polarization::Tm => p
                .field
                .iter()
                .zip(&p.index)
                .map(|(f, n)| f * f / (n * n))
                .sum(),
        };
        0.5 * self.n_eff * sum * p.dy
    }

    /// CSV table of (position_m, field) samples.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("position_m,field\n");
        for (i, f) in self.profile.field.iter().enumerate() {
            out.push_str(&format!("{:.9e},{:.9e}\n", self.profile.position(i), f));
        }
        out
    }

    /// JSON header describing the mode (pairs with the CSV export).
    pub fn header_json(&self) -> serde_json::Value {
        serde_json::json!({
            "wavelength_m": self.wavelength,
            "polarization": self.polarization.to_string(),
            "n_eff": self.n_eff,
            "order": self.order,
            "samples": self.profile.field.len(),
        })
    }
}

const SCAN_SAMPLES: usize = 2000;
const BISECT_TOL: f64 = 1e-9;
const PROFILE_SAMPLES: usize = 4096;
const CLADDING_DECAY_LENGTHS: f64 = 3.0;

/// All guided modes of a profile, sorted by descending effective index.
///
/// Returns an empty list when nothing is guided. The characteristic function
/// is scanned at 2000 points across (n_clad_max, n_max) and each sign change
/// is bisected to |dn| <= 1e-9.
pub fn solve_slab_modes(
    profile: &SlabProfile,
    wavelength: f64,
    polarization: Polarization,
) -> Result<Vec<Mode>, ModeSolverError> {
    profile.validate()?;
    if wavelength <= 0.0 {
        return Err(ModeSolverError::InvalidProfile(
            "wavelength must be positive".into(),
        ));
    }
    let n_lo = profile.n_clad_max();
    let n_hi = profile.n_max();
    if n_hi - n_lo < 1e-9 {
        return Ok(Vec::new());
    }
    let lo = n_lo + 1e-6;
    let hi = n_hi - 1e-6;
    if hi <= lo {
        return Ok(Vec::new());
    }

    let f = |ne: f64| characteristic(profile, wavelength, polarization, ne);

    let mut roots = Vec::new();
    let step = (hi - lo) / (SCAN_SAMPLES - 1) as f64;
    let mut prev_ne = lo;
    let mut prev_f = f(prev_ne);
    for i in 1..SCAN_SAMPLES {
        let ne = lo + step * i as f64;
        let fv = f(ne);
        if prev_f == 0.0 {
            roots.push(prev_ne);
        } else if prev_f.signum() != fv.signum() && fv != 0.0 {
            roots.push(bisect(&f, prev_ne, ne));
        }
        prev_ne = ne;
        prev_f = fv;
    }
    if prev_f == 0.0 {
        roots.push(prev_ne);
    }

    roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() < 10.0 * BISECT_TOL);

    Ok(roots
        .into_iter()
        .map(|ne| build_mode(profile, wavelength, polarization, ne))
        .collect())
}

fn bisect(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    while b - a > BISECT_TOL {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fa.signum() != fm.signum() {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

/// Transfer-matrix state: (u, v) = (psi, psi'/k0) for TE, (psi, psi'/(k0 n^2))
/// for TM; continuous across interfaces by construction.
fn characteristic(
    profile: &SlabProfile,
    wavelength: f64,
    polarization: Polarization,
    n_eff: f64,
) -> f64 {
    let k = k0(wavelength);
    let gamma_l = (n_eff * n_eff - profile.n_left * profile.n_left).max(0.0).sqrt();
    let gamma_r = (n_eff * n_eff - profile.n_right * profile.n_right)
        .max(0.0)
        .sqrt();

    let weight = |n: f64| match polarization {
        Polarization::Te => 1.0,
        Polarization::Tm => n * n,
    };

    let mut u = 1.0;
    let mut v = gamma_l / weight(profile.n_left);
    for layer in &profile.layers {
        let (nu, nv) = propagate(u, v, layer, k, n_eff, weight(layer.index));
        u = nu;
        v = nv;
        let s = u.abs().max(v.abs());
        if s > 1e12 {
            u /= s;
            v /= s;
        }
    }
    v + u * gamma_r / weight(profile.n_right)
}

/// Advance (u, v) across one uniform layer. `w` is 1 for TE, n^2 for TM;
/// kappa and gamma are in units of k0.
fn propagate(u: f64, v: f64, layer: &Layer, k: f64, n_eff: f64, w: f64) -> (f64, f64) {
    let d = k * layer.thickness;
    let q2 = layer.index * layer.index - n_eff * n_eff;
    if q2 >= 0.0 {
        let kap = q2.sqrt();
        if kap * d < 1e-12 {
            // Uniform limit: psi advances linearly.
            return (u + v * w * d, v);
        }
        let (s, c) = (kap * d).sin_cos();
        (c * u + (w / kap) * s * v, -(kap / w) * s * u + c * v)
    } else {
        let gam = (-q2).sqrt();
        let (sh, ch) = ((gam * d).sinh(), (gam * d).cosh());
        (ch * u + (w / gam) * sh * v, (gam / w) * sh * u + ch * v)
    }
}

fn build_mode(
    profile: &SlabProfile,
    wavelength: f64,
    polarization: Polarization,
    n_eff: f64,
) -> Mode {
    let k = k0(wavelength);
    let gamma_l = (n_eff * n_eff - profile.n_left * profile.n_left)
        .max(1e-12)
        .sqrt()
        * k;
    let gamma_r = (n_eff * n_eff - profile.n_right * profile.n_right)
        .max(1e-12)
        .sqrt()
        * k;

    let y_lo = -CLADDING_DECAY_LENGTHS / gamma_l;
    let y_hi = profile.total_thickness() + CLADDING_DECAY_LENGTHS / gamma_r;
    let dy = (y_hi - y_lo) / (PROFILE_SAMPLES - 1) as f64;

    let weight = |n: f64| match polarization {
        Polarization::Te => 1.0,
        Polarization::Tm => n * n,
    };

    // Interface values of (psi, psi') obtained by transfer through the stack.
    let mut edges = vec![0.0];
    for l in &profile.layers {
        edges.push(edges.last().unwrap() + l.thickness);
    }
    let mut states = Vec::with_capacity(profile.layers.len() + 1);
    let mut u = 1.0;
    let mut v = gamma_l / (k * weight(profile.n_left));
    states.push((u, v));
    for layer in &profile.layers {
        let (nu, nv) = propagate(u, v, layer, k, n_eff, weight(layer.index));
        u = nu;
        v = nv;
        states.push((u, v));
    }

    let mut field = Vec::with_capacity(PROFILE_SAMPLES);
    let mut index = Vec::with_capacity(PROFILE_SAMPLES);
    for i in 0..PROFILE_SAMPLES {
        let y = y_lo + dy * i as f64;
        index.push(profile.index_at(y));
        if y <= 0.0 {
            field.push(states[0].0 * (gamma_l * y).exp());
        } else if y >= *edges.last().unwrap() {
            let (ue, _) = states[states.len() - 1];
            field.push(ue * (-gamma_r * (y - edges.last().unwrap())).exp());
        } else {
            let li = profile
                .layers
                .iter()
                .zip(edges.windows(2))
                .position(|(_, e)| y >= e[0] && y < e[1])
                .unwrap_or(profile.layers.len() - 1);
            let layer = &profile.layers[li];
            let (ua, va) = states[li];
            let w = weight(layer.index);
            let t = k * (y - edges[li]);
            let q2 = layer.index * layer.index - n_eff * n_eff;
            let val = if q2 >= 0.0 {
                let kap = q2.sqrt();
                if kap * t < 1e-12 {
                    ua + va * w * t
                } else {
                    ua * (kap * t).cos() + (va * w / kap) * (kap * t).sin()
                }
            } else {
                let gam = (-q2).sqrt();
                ua * (gam * t).cosh() + (va * w / gam) * (gam * t).sinh()
            };
            field.push(val);
        }
    }

    // Unit power flux normalization.
    let raw: f64 = match polarization {
        Polarization::Te => field.iter().map(|f| f * f).sum::<f64>() * dy,
        Polarization::Tm => field
            .iter()
            .zip(&index)
            .map(|(f, n)| f * f / (n * n))
            .sum::<f64>()
            * dy,
    };
    let scale = (2.0 / (n_eff * raw)).sqrt();
    for f in &mut field {
        *f *= scale;
    }

    let peak = field.iter().fold(0.0f64, |m, f| m.max(f.abs()));
    let thresh = 1e-6 * peak;
    let mut order = 0;
    let mut last_sign = 0.0f64;
    for f in &field {
        if f.abs() > thresh {
            let s = f.signum();
            if last_sign != 0.0 && s != last_sign {
                order += 1;
            }
            last_sign = s;
        }
    }

    Mode {
        wavelength,
        polarization,
        n_eff,
        order,
        profile: ModeProfile {
            y0: y_lo,
            dy,
            field,
            index,
        },
    }
}

/// Power-coupling fraction between two modes: normalized squared overlap of
/// the scalar profiles on a common grid. Symmetric in its arguments.
pub fn mode_overlap(a: &Mode, b: &Mode) -> Result<f64, ModeSolverError> {
    if (a.wavelength - b.wavelength).abs() > 1e-15 {
        return Err(ModeSolverError::WavelengthMismatch(
            a.wavelength,
            b.wavelength,
        ));
    }
    if a.polarization != b.polarization {
        return Err(ModeSolverError::PolarizationMismatch);
    }
    let y_lo = a.profile.y0.min(b.profile.y0);
    let y_hi = (a.profile.y0 + a.profile.dy * (a.profile.field.len() - 1) as f64)
        .max(b.profile.y0 + b.profile.dy * (b.profile.field.len() - 1) as f64);
    let dy = a.profile.dy.min(b.profile.dy);
    let n = ((y_hi - y_lo) / dy).ceil() as usize + 1;

    let mut ab = 0.0;
    let mut aa = 0.0;
    let mut bb = 0.0;
    for i in 0..n {
        let y = y_lo + dy * i as f64;
        let fa = a.profile.sample_at(y);
        let fb = b.profile.sample_at(y);
        ab += fa * fb;
        aa += fa * fa;
        bb += fb * fb;
    }
    if aa == 0.0 || bb == 0.0 {
        return Err(ModeSolverError::InvalidProfile(
            "zero-power profile in overlap".into(),
        ));
    }
    Ok((ab * ab) / (aa * bb))
}

/// Translate a mode's sampling window by `offset` (m), leaving the field
/// otherwise untouched.
pub fn shifted(mode: &Mode, offset: f64) -> Mode {
    let mut m = mode.clone();
    m.profile.y0 += offset;
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::nm;
    use approx::assert_abs_diff_eq;

    /// Independent oracle: bisection on the closed-form symmetric-slab
    /// dispersion relation tan(kappa a) = gamma/kappa (even TE),
    /// tan(kappa a) = -kappa/gamma (odd TE); TM carries n^2 weights.
    pub fn symmetric_slab_oracle(
        n_core: f64,
        n_clad: f64,
        thickness: f64,
        wavelength: f64,
        polarization: Polarization,
    ) -> Vec<f64> {
        let a = 0.5 * thickness;
        let k = k0(wavelength);
        let v = k * a * (n_core * n_core - n_clad * n_clad).sqrt();
        let f = |x: f64, even: bool| -> f64 {
            let g = (v * v - x * x).sqrt();
            match (polarization, even) {
                (Polarization::Te, true) => x * x.tan() - g,
                (Polarization::Te, false) => x / x.tan() + g,
                (Polarization::Tm, true) => {
                    x * x.tan() - (n_core * n_core) / (n_clad * n_clad) * g
                }
                (Polarization::Tm, false) => {
                    x / x.tan() + (n_core * n_core) / (n_clad * n_clad) * g
                }
            }
        };
        let mut roots = Vec::new();
        for m in 0.. {
            let even = m % 2 == 0;
            // Root m lives in (m pi/2, min((m+1) pi/2, V)).
            let lo = m as f64 * std::f64::consts::FRAC_PI_2 + 1e-9;
            let hi = ((m + 1) as f64 * std::f64::consts::FRAC_PI_2 - 1e-9).min(v - 1e-12);
            if lo >= hi {
                break;
            }
            let (mut a_, mut b_) = (lo, hi);
            let (fa, fb) = (f(a_, even), f(b_, even));
            if fa.signum() == fb.signum() {
                continue;
            }
            for _ in 0..200 {
                let mid = 0.5 * (a_ + b_);
                if f(mid, even).signum() == fa.signum() {
                    a_ = mid;
                } else {
                    b_ = mid;
                }
            }
            let x = 0.5 * (a_ + b_);
            let kappa = x / a;
            roots.push((n_core * n_core - (kappa / k).powi(2)).sqrt());
        }
        roots
    }

    #[test]
    fn no_contrast_means_no_modes() {
        let p = SlabProfile::symmetric(2.0, 2.0, nm(280.0));
        let modes = solve_slab_modes(&p, nm(1300.0), Polarization::Te).unwrap();
        assert!(modes.is_empty());
    }

    #[test]
    fn inp_slab_matches_analytic_oracle() {
        let p = SlabProfile::symmetric(1.0, 3.17, nm(280.0));
        let modes = solve_slab_modes(&p, nm(1300.0), Polarization::Te).unwrap();
        let oracle = symmetric_slab_oracle(3.17, 1.0, nm(280.0), nm(1300.0), Polarization::Te);
        assert_eq!(modes.len(), oracle.len());
        for (m, ne) in modes.iter().zip(&oracle) {
            assert_abs_diff_eq!(m.n_eff, ne, epsilon = 1e-6);
        }
    }

    #[test]
    fn oracle_agreement_across_parameter_sets() {
        let cases = [
            (3.17, 1.0, 280.0, 1300.0, Polarization::Te),
            (3.17, 1.0, 280.0, 1300.0, Polarization::Tm),
            (3.17, 1.45, 280.0, 1300.0, Polarization::Te),
            (2.21, 1.45, 600.0, 1300.0, Polarization::Te),
            (2.21, 1.45, 600.0, 1300.0, Polarization::Tm),
            (2.21, 1.0, 300.0, 1300.0, Polarization::Te),
            (3.5, 1.45, 220.0, 1550.0, Polarization::Te),
            (3.5, 1.45, 220.0, 1550.0, Polarization::Tm),
            (2.0, 1.5, 1000.0, 1300.0, Polarization::Te),
            (3.17, 2.21, 500.0, 1300.0, Polarization::Te),
        ];
        for (nc, ncl, t, wl, pol) in cases {
            let p = SlabProfile::symmetric(ncl, nc, nm(t));
            let modes = solve_slab_modes(&p, nm(wl), pol).unwrap();
            let oracle = symmetric_slab_oracle(nc, ncl, nm(t), nm(wl), pol);
            assert_eq!(modes.len(), oracle.len(), "mode count for {nc}/{ncl}/{t}");
            for (m, ne) in modes.iter().zip(&oracle) {
                assert_abs_diff_eq!(m.n_eff, ne, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn modes_are_unit_power_and_ordered() {
        let p = SlabProfile::symmetric(1.45, 3.17, nm(500.0));
        let modes = solve_slab_modes(&p, nm(1300.0), Polarization::Te).unwrap();
        assert!(modes.len() >= 2);
        for (i, m) in modes.iter().enumerate() {
            assert_abs_diff_eq!(m.power_flux(), 1.0, epsilon = 1e-6);
            assert_eq!(m.order, i);
            assert!(m.n_eff > 1.45 && m.n_eff < 3.17);
        }
        assert!(modes.windows(2).all(|w| w[0].n_eff > w[1].n_eff));
    }

    #[test]
    fn self_overlap_is_unity_and_orthogonal_modes_vanish() {
        let p = SlabProfile::symmetric(1.45, 3.17, nm(500.0));
        let modes = solve_slab_modes(&p, nm(1300.0), Polarization::Te).unwrap();
        assert!(modes.len() >= 2);
        let o00 = mode_overlap(&modes[0], &modes[0]).unwrap();
        assert_abs_diff_eq!(o00, 1.0, epsilon = 1e-9);
        let o01 = mode_overlap(&modes[0], &modes[1]).unwrap();
        assert!(o01 < 1e-6, "TE0/TE1 overlap {o01}");
    }

    #[test]
    fn shifted_profile_overlap_is_negligible() {
        let p = SlabProfile::symmetric(1.45, 3.17, nm(500.0));
        let modes = solve_slab_modes(&p, nm(1300.0), Polarization::Te).unwrap();
        let moved = shifted(&modes[0], 5e-6);
        let o = mode_overlap(&modes[0], &moved).unwrap();
        assert!(o < 1e-3, "shifted overlap {o}");
    }

    #[test]
    fn mismatched_modes_error() {
        let p = SlabProfile::symmetric(1.45, 3.17, nm(500.0));
        let te = solve_slab_modes(&p, nm(1300.0), Polarization::Te).unwrap();
        let tm = solve_slab_modes(&p, nm(1300.0), Polarization::Tm).unwrap();
        assert!(matches!(
            mode_overlap(&te[0], &tm[0]),
            Err(ModeSolverError::PolarizationMismatch)
        ));
        let other = solve_slab_modes(&p, nm(1310.0), Polarization::Te).unwrap();
        assert!(matches!(
            mode_overlap(&te[0], &other[0]),
            Err(ModeSolverError::WavelengthMismatch(_, _))
        ));
    }

    #[test]
    fn completeness_bound_holds_for_arbitrary_fields() {
        let p = SlabProfile::symmetric(1.45, 3.0, nm(900.0));
        let modes = solve_slab_modes(&p, nm(1300.0), Polarization::Te).unwrap();
        assert!(modes.len() >= 3);
        // Synthetic unit-power field: mode mixture plus a broad Gaussian tail.
        let base = &modes[0].profile;
        let mut field: Vec<f64> = (0..base.field.len())
            .map(|i| {
                let y = base.position(i);
                0.8 * modes[0].profile.sample_at(y) + 0.5 * modes[1].profile.sample_at(y)
                    + 1e3 * (-((y - 2e-6) / 1.5e-6).powi(2)).exp()
            })
            .collect();
        let norm: f64 = field.iter().map(|f| f * f).sum::<f64>() * base.dy;
        let scale = (2.0 / (modes[0].n_eff * norm)).sqrt();
        field.iter_mut().for_each(|f| *f *= scale);
        let probe = Mode {
            wavelength: modes[0].wavelength,
            polarization: Polarization::Te,
            n_eff: modes[0].n_eff,
            order: 0,
            profile: ModeProfile {
                y0: base.y0,
                dy: base.dy,
                field,
                index: base.index.clone(),
            },
        };
        let total: f64 = modes
            .iter()
            .map(|m| mode_overlap(m, &probe).unwrap())
            .sum();
        assert!(total <= 1.0 + 1e-6, "completeness sum {total}");
    }

    #[test]
    fn n_eff_monotone_in_core_thickness() {
        let mut prev = 0.0;
        for i in 0..10 {
            let t = nm(150.0 + 80.0 * i as f64);
            let p = SlabProfile::symmetric(1.45, 3.17, t);
            let modes = solve_slab_modes(&p, nm(1300.0), Polarization::Te).unwrap();
            let ne = modes[0].n_eff;
            assert!(ne >= prev, "n_eff not monotone at thickness {t}");
            prev = ne;
        }
    }

    #[test]
    fn thick_slab_approaches_core_index() {
        let p = SlabProfile::symmetric(1.0, 3.17, 5e-6);
        let modes = solve_slab_modes(&p, nm(1300.0), Polarization::Te).unwrap();
        assert!((3.17 - modes[0].n_eff) < 5e-3);
    }

    #[test]
    fn asymmetric_stack_solves() {
        // InP on LN on SiO2: fundamental should sit in the InP layer.
        let p = SlabProfile::new(
            1.0,
            vec![
                Layer {
                    index: 3.17,
                    thickness: nm(280.0),
                },
                Layer {
                    index: 2.21,
                    thickness: nm(600.0),
                },
            ],
            1.45,
        );
        let modes = solve_slab_modes(&p, nm(1300.0), Polarization::Te).unwrap();
        assert!(!modes.is_empty());
        assert!(modes[0].n_eff > 2.5 && modes[0].n_eff < 3.17);
    }

    #[test]
    fn csv_export_has_header_and_rows() {
        let p = SlabProfile::symmetric(1.0, 3.17, nm(280.0));
        let modes = solve_slab_modes(&p, nm(1300.0), Polarization::Te).unwrap();
        let csv = modes[0].to_csv_string();
        assert!(csv.starts_with("position_m,field\n"));
        assert_eq!(csv.lines().count(), 4097);
        let hdr = modes[0].header_json();
        assert_eq!(hdr["polarization"], "TE");
    }
}
