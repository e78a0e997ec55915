//! Device-level checks of the studies: the bare guide, the assembled
//! mirror, the butt joint, and the |Ez|² transfer picture of the full
//! device.

use photonbench::experiments::{bragg_spectrum, taper_sweep, BraggConfig, TaperSweepConfig};
use photonbench::fdtd::source::{Envelope, Orientation, Source};
use photonbench::fdtd::{run, SimulationSpec, StopCondition};
use photonbench::geometry::{build_paper_device, rasterize};
use photonbench::modesolver::Polarization;
use photonbench::units::C0;

/// A guide with no holes is no mirror: modal reflection stays in the
/// noise across the band and the fed power arrives at the far port.
#[test]
fn bare_guide_reflects_nothing_across_the_band() {
    let mut c = BraggConfig::default();
    c.device.bragg_count = 0;
    c.wavelengths = vec![1.25e-6, 1.3e-6, 1.35e-6];
    let s = bragg_spectrum(&c).expect("bare guide run");
    assert!(s.converged);
    for k in 0..s.wavelengths.len() {
        assert!(s.reflectance[k] < 0.05, "R[{k}] = {}", s.reflectance[k]);
        assert!(
            s.transmittance[k] > 0.93 && s.transmittance[k] < 1.03,
            "T[{k}] = {}",
            s.transmittance[k]
        );
    }
}

/// The default ten-period mirror puts the design wavelength deep in its
/// stopband: under a tenth of the fed power crosses, reflection carries
/// the bulk, and the books stay under unity plus tolerance.
#[test]
fn ten_period_mirror_blocks_the_design_wavelength() {
    let mut c = BraggConfig::default();
    c.wavelengths = vec![1.3e-6];
    let s = bragg_spectrum(&c).expect("mirror run");
    assert!(s.converged);
    assert!(s.transmittance[0] < 0.10, "T = {}", s.transmittance[0]);
    assert!(s.reflectance[0] > 0.5, "R = {}", s.reflectance[0]);
    assert!(s.reflectance[0] + s.transmittance[0] <= 1.02);
}

/// An abrupt beam-to-strip junction transfers strictly less than the
/// adiabatic taper it replaces.
#[test]
fn butt_joint_transfers_less_than_the_adiabatic_taper() {
    let mut c = TaperSweepConfig::default();
    c.lengths = vec![0.0, 5e-6];
    let sweep = taper_sweep(&c).expect("two-point sweep");
    assert!(sweep.converged.iter().all(|&ok| ok));
    assert!(
        sweep.efficiency[0] < sweep.efficiency[1],
        "butt joint {} should fall below the 5 um taper {}",
        sweep.efficiency[0],
        sweep.efficiency[1]
    );
}

/// Drive a line emitter at the center of the assembled device and
/// accumulate |Ez|² over the whole run. Past the taper the light must sit
/// in the strip rather than the surrounding slab, and a solid share of
/// the power launched down the beam must arrive there — the transfer
/// picture the device is designed around.
#[test]
fn emitter_light_lands_in_the_strip_past_the_taper() {
    let p = TaperSweepConfig::default().device;
    let geom = build_paper_device(&p).expect("device geometry");

    // Same sampling rule as the studies: 25 cells per material wavelength,
    // at least 10.5 cells across the taper tip.
    let res = (25.0 * 2.83 / p.wavelength).max(10.5 / p.taper_tip);
    let map = rasterize(&geom, res).expect("raster");
    let (dx, dy) = (map.dx, map.dy);
    let nxp = map.nx + 1;
    let half_h = 0.5 * p.ln_width.max(p.beam_width) + p.margin;

    let mirror_len = p.bragg_count as f64 * p.bragg_period;
    let x_src = p.margin + mirror_len + 0.5 * p.beam_length;
    let x_taper_end = p.margin + mirror_len + p.beam_length + p.taper_length;

    let mut spec = SimulationSpec::new(map, Polarization::Te);
    let f0 = C0 / p.wavelength;
    spec.sources = vec![Source::point(
        (x_src / dx).round() as usize,
        (half_h / dy).round() as usize,
        Orientation::Z,
        Envelope::Gaussian {
            center_freq: f0,
            fwhm_freq: 0.2 * f0,
        },
    )];
    spec.accumulate_intensity = true;
    spec.stop = StopCondition::EnergyDecay {
        threshold: 1e-4,
        max_steps: 60_000,
    };
    let result = run(spec).expect("device run");
    let acc = result.intensity.expect("intensity map");

    // Window sum of the accumulated intensity over a physical box.
    let boxed = |x0: f64, x1: f64, y0: f64, y1: f64| -> f64 {
        let i0 = (x0 / dx).round() as usize;
        let i1 = (x1 / dx).round() as usize;
        let j0 = ((y0 + half_h) / dy).round() as usize;
        let j1 = ((y1 + half_h) / dy).round() as usize;
        let mut sum = 0.0;
        for j in j0..=j1 {
            for i in i0..=i1 {
                sum += acc[i + nxp * j];
            }
        }
        sum
    };

    // In the lead section the strip should carry the light, not the slab.
    let (lead0, lead1) = (x_taper_end + 0.5e-6, x_taper_end + 1.5e-6);
    let in_strip = boxed(lead0, lead1, -0.6e-6, 0.6e-6);
    let everywhere = boxed(lead0, lead1, -half_h, half_h);
    assert!(
        in_strip > 0.5 * everywhere,
        "strip fraction past the taper = {:.3}",
        in_strip / everywhere
    );

    // And a solid share of the power running down the beam gets there.
    let x_taper_start = x_taper_end - p.taper_length;
    let upstream = boxed(x_taper_start - 1.1e-6, x_taper_start - 0.1e-6, -0.6e-6, 0.6e-6);
    assert!(
        in_strip > 0.1 * upstream,
        "taper-fed intensity {:.3e} vs beam-section intensity {:.3e}",
        in_strip,
        upstream
    );
}
