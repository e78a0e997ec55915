//! Temporary numbers probe (not part of the suite; deleted before release).

use std::time::Instant;

use photonbench::experiments::{
    beta_factor, bragg_spectrum, grating_extraction, taper_cascade_estimate, taper_sweep,
    BetaConfig, BraggConfig, GratingConfig, TaperSweepConfig,
};

#[test]
#[ignore]
fn probe_membrane_bragg() {
    let t0 = Instant::now();
    let spec = bragg_spectrum(&BraggConfig::default()).unwrap();
    println!("membrane bragg default (count=10) in {:?}", t0.elapsed());
    for k in 0..spec.wavelengths.len() {
        println!(
            "  lam = {:6.1} nm  R = {:.4}  T = {:.4}  R+T = {:.4}",
            spec.wavelengths[k] * 1e9,
            spec.reflectance[k],
            spec.transmittance[k],
            spec.reflectance[k] + spec.transmittance[k]
        );
    }
    for count in [2usize, 4, 6] {
        let mut c = BraggConfig::default();
        c.device.bragg_count = count;
        c.wavelengths = vec![1.3e-6];
        let t1 = Instant::now();
        let s = bragg_spectrum(&c).unwrap();
        println!(
            "  count {:2}  R(1300) = {:.4}  T = {:.4} in {:?}",
            count,
            s.reflectance[0],
            s.transmittance[0],
            t1.elapsed()
        );
    }
}

#[test]
#[ignore]
fn probe_membrane_bragg_convergence() {
    for scale in [1.0f64, 1.5, 2.0, 2.5] {
        let mut c = BraggConfig::default();
        c.resolution_scale = scale;
        c.wavelengths = vec![1.25e-6, 1.3e-6, 1.35e-6];
        let t0 = Instant::now();
        let s = bragg_spectrum(&c).unwrap();
        println!(
            "  scale {:.1}  R(1250,1300,1350) = [{:.4}, {:.4}, {:.4}]  T = [{:.4}, {:.4}, {:.4}] in {:?}",
            scale,
            s.reflectance[0],
            s.reflectance[1],
            s.reflectance[2],
            s.transmittance[0],
            s.transmittance[1],
            s.transmittance[2],
            t0.elapsed()
        );
    }
}

#[test]
#[ignore]
fn probe_taper() {
    let c = TaperSweepConfig::default();
    let t0 = Instant::now();
    let sweep = taper_sweep(&c).unwrap();
    println!("taper default sweep in {:?}", t0.elapsed());
    for k in 0..sweep.parameter.len() {
        println!(
            "  L = {:5.1} um  eff = {:.4}  converged = {}",
            sweep.parameter[k] * 1e6,
            sweep.efficiency[k],
            sweep.converged[k]
        );
    }
    let mut cb = TaperSweepConfig::default();
    cb.lengths = vec![0.0];
    let t1 = Instant::now();
    let butt = taper_sweep(&cb).unwrap();
    println!("  butt joint eff = {:.4} in {:?}", butt.efficiency[0], t1.elapsed());
    let cascade = taper_cascade_estimate(&c.device, 50).unwrap();
    println!("  cascade(50) = {:.4}", cascade);
}

#[test]
#[ignore]
fn probe_beta() {
    let t0 = Instant::now();
    let centered = beta_factor(&BetaConfig::default()).unwrap();
    println!(
        "beta centered = {:.4} (guided {:.3e} / total {:.3e}) converged={} in {:?}",
        centered.band_center(),
        centered.guided[0],
        centered.total[0],
        centered.converged,
        t0.elapsed()
    );
    let mut off = BetaConfig::default();
    off.dipole_offset = 0.25e-6 + 5e-6;
    let t1 = Instant::now();
    let control = beta_factor(&off).unwrap();
    println!(
        "beta offset  = {:.5} converged={} in {:?}",
        control.band_center(),
        control.converged,
        t1.elapsed()
    );
}

#[test]
#[ignore]
fn probe_bragg() {
    let t0 = Instant::now();
    let s = bragg_spectrum(&BraggConfig::default()).unwrap();
    println!("bragg spectrum in {:?} converged={}", t0.elapsed(), s.converged);
    for k in 0..s.wavelengths.len() {
        println!(
            "  lambda = {:6.1} nm  R = {:.4}  T = {:.4}  R+T = {:.4}",
            s.wavelengths[k] * 1e9,
            s.reflectance[k],
            s.transmittance[k],
            s.reflectance[k] + s.transmittance[k]
        );
    }
    for count in [2usize, 4, 6, 10] {
        let mut c = BraggConfig::default();
        c.device.bragg_count = count;
        c.wavelengths = vec![1.3e-6];
        let t1 = Instant::now();
        let s = bragg_spectrum(&c).unwrap();
        println!(
            "  count {count:2}  R(1300) = {:.4} in {:?}",
            s.reflectance[0],
            t1.elapsed()
        );
    }
}

#[test]
#[ignore]
fn probe_grating() {
    let t0 = Instant::now();
    let g = grating_extraction(&GratingConfig::default()).unwrap();
    println!("grating in {:?} converged={}", t0.elapsed(), g.converged);
    for k in 0..g.wavelengths.len() {
        println!(
            "  lambda = {:6.1} nm  up = {:.4}  down = {:.4}  T = {:.4}  R = {:.4}  sum = {:.4}",
            g.wavelengths[k] * 1e9,
            g.up[k],
            g.down[k],
            g.transmitted[k],
            g.reflected[k],
            g.up[k] + g.down[k] + g.transmitted[k] + g.reflected[k]
        );
    }
    let mut zc = GratingConfig::default();
    zc.teeth = 0;
    let t1 = Instant::now();
    let z = grating_extraction(&zc).unwrap();
    println!(
        "  zero teeth: up = {:.5} sum = {:.4} in {:?}",
        z.up_at_center(),
        z.sums()[z.sums().len() / 2],
        t1.elapsed()
    );
}

#[test]
#[ignore]
fn probe_bragg_period_scan() {
    for period_nm in [255.0_f64, 265.0, 275.0, 290.0] {
        let mut c = BraggConfig::default();
        c.device.bragg_period = period_nm * 1e-9;
        c.wavelengths = vec![1.24e-6, 1.27e-6, 1.3e-6, 1.33e-6, 1.36e-6];
        let t0 = Instant::now();
        let s = bragg_spectrum(&c).unwrap();
        let r: Vec<String> = s.reflectance.iter().map(|r| format!("{r:.3}")).collect();
        println!(
            "  period {period_nm:5.0} nm  R(1240..1360 step 30) = [{}] in {:?}",
            r.join(", "),
            t0.elapsed()
        );
    }
}

#[test]
#[ignore]
fn probe_beta_variants() {
    // Width scan on the standard stack.
    for width_nm in [360.0_f64, 620.0] {
        let mut c = BetaConfig::default();
        c.device.beam_width = width_nm * 1e-9;
        let t0 = Instant::now();
        match beta_factor(&c) {
            Ok(r) => println!(
                "  width {width_nm:4.0} nm  beta = {:.4} converged={} in {:?}",
                r.band_center(),
                r.converged,
                t0.elapsed()
            ),
            Err(e) => println!("  width {width_nm:4.0} nm  error: {e}"),
        }
    }
    // Full ridge etch: the field outside the ridge is bare silica.
    let mut c = BetaConfig::default();
    c.device.stack.ln_etch_depth = c.device.stack.ln_film;
    let t0 = Instant::now();
    match beta_factor(&c) {
        Ok(r) => println!(
            "  full etch      beta = {:.4} converged={} in {:?}",
            r.band_center(),
            r.converged,
            t0.elapsed()
        ),
        Err(e) => println!("  full etch      error: {e}"),
    }
    // Full etch and a vanishing ridge: the beam alone over silica.
    let mut c = BetaConfig::default();
    c.device.stack.ln_etch_depth = c.device.stack.ln_film;
    c.device.ln_width = 1e-9;
    let t0 = Instant::now();
    match beta_factor(&c) {
        Ok(r) => println!(
            "  beam-only      beta = {:.4} converged={} in {:?}",
            r.band_center(),
            r.converged,
            t0.elapsed()
        ),
        Err(e) => println!("  beam-only      error: {e}"),
    }
}

#[test]
#[ignore]
fn probe_bragg_radius_scan() {
    for (radius_nm, period_nm) in [(120.0_f64, 290.0_f64), (130.0, 300.0), (150.0, 320.0), (160.0, 340.0)] {
        let mut c = BraggConfig::default();
        c.device.bragg_radius = radius_nm * 1e-9;
        c.device.bragg_period = period_nm * 1e-9;
        c.wavelengths = vec![1.25e-6, 1.3e-6, 1.35e-6];
        let t0 = Instant::now();
        match bragg_spectrum(&c) {
            Ok(s) => {
                let r: Vec<String> = s.reflectance.iter().map(|r| format!("{r:.3}")).collect();
                let t: Vec<String> = s.transmittance.iter().map(|t| format!("{t:.3}")).collect();
                println!(
                    "  r {radius_nm:4.0} period {period_nm:4.0}  R(1250,1300,1350) = [{}]  T = [{}] in {:?}",
                    r.join(", "),
                    t.join(", "),
                    t0.elapsed()
                );
            }
            Err(e) => println!("  r {radius_nm:4.0} period {period_nm:4.0}  error: {e}"),
        }
    }
}

#[test]
#[ignore]
fn probe_beta_width_scan() {
    for width_nm in [300.0_f64, 320.0, 335.0] {
        let mut c = BetaConfig::default();
        c.device.beam_width = width_nm * 1e-9;
        let t0 = Instant::now();
        match beta_factor(&c) {
            Ok(r) => println!(
                "  width {width_nm:4.0} nm  beta = {:.4} converged={} in {:?}",
                r.band_center(),
                r.converged,
                t0.elapsed()
            ),
            Err(e) => println!("  width {width_nm:4.0} nm  error: {e}"),
        }
    }
    // High-contrast diagnostic: a thin unetched LN film drops the pedestal
    // and background index together, approximating an isolated beam.
    for width_nm in [360.0_f64, 500.0] {
        let mut c = BetaConfig::default();
        c.device.stack.ln_film = 250e-9;
        c.device.stack.ln_etch_depth = 0.0;
        c.device.beam_width = width_nm * 1e-9;
        let t0 = Instant::now();
        match beta_factor(&c) {
            Ok(r) => println!(
                "  thin film w {width_nm:4.0} beta = {:.4} converged={} in {:?}",
                r.band_center(),
                r.converged,
                t0.elapsed()
            ),
            Err(e) => println!("  thin film w {width_nm:4.0} error: {e}"),
        }
    }
}

#[test]
#[ignore]
fn probe_tip_scan() {
    use photonbench::geometry::DeviceParams;
    for tip_nm in [80.0_f64, 100.0, 120.0, 140.0, 160.0, 180.0, 200.0] {
        let mut d = DeviceParams::default();
        d.margin = 2.5e-6;
        d.taper_tip = tip_nm * 1e-9;
        let cascade = taper_cascade_estimate(&d, 50).unwrap();
        println!("  tip {tip_nm:5.0} nm  cascade = {cascade:.4}");
    }
}
