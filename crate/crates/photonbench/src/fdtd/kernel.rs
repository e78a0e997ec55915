//! Yee-grid field storage and update kernels with CPML absorption.
//!
//! Fields use the normalized magnetic field H̃ = Z0·H so both update
//! coefficients reduce to multiples of c·dt. Energies drop the common ε0
//! factor: U = ½∫(εr·E² + H̃²) dA, flux S = c·E×H̃, which keeps the discrete
//! energy theorem exact in these units.

use crate::geometry::PermittivityMap;
use crate::modesolver::Polarization;
use crate::units::C0;

use super::{Boundary, PmlParams};

/// Per-axis CPML coefficient tables at integer (E) and half (H) positions.
/// Outside the absorbing strips `inv_kappa = 1` and `b = a = 0`, which keeps
/// the ψ accumulators identically zero there.
pub(super) struct AxisPml {
    pub inv_kap_e: Vec<f64>,
    pub b_e: Vec<f64>,
    pub a_e: Vec<f64>,
    pub inv_kap_h: Vec<f64>,
    pub b_h: Vec<f64>,
    pub a_h: Vec<f64>,
}

pub(super) fn build_axis_pml(
    n_cells: usize,
    d: f64,
    dt: f64,
    lo: Boundary,
    hi: Boundary,
    pml: &PmlParams,
) -> AxisPml {
    let w = pml.thickness as f64 * d;
    let sigma_max = pml.sigma_factor * (pml.grading + 1.0) * C0 / d;

    let coeff = |pos: f64| -> (f64, f64, f64) {
        let edge_lo = pml.thickness as f64 * d;
        let edge_hi = n_cells as f64 * d - edge_lo;
        let rho = if lo == Boundary::Pml && pos < edge_lo {
            (edge_lo - pos) / w
        } else if hi == Boundary::Pml && pos > edge_hi {
            (pos - edge_hi) / w
        } else {
            return (1.0, 0.0, 0.0);
        };
        let rho = rho.clamp(0.0, 1.0);
        let sigma = sigma_max * rho.powf(pml.grading);
        let kappa = 1.0 + (pml.kappa_max - 1.0) * rho.powf(pml.grading);
        let b = (-(sigma / kappa) * dt).exp();
        let a = (b - 1.0) / kappa;
        (1.0 / kappa, b, a)
    };

    let mut out = AxisPml {
        inv_kap_e: Vec::with_capacity(n_cells + 1),
        b_e: Vec::with_capacity(n_cells + 1),
        a_e: Vec::with_capacity(n_cells + 1),
        inv_kap_h: Vec::with_capacity(n_cells),
        b_h: Vec::with_capacity(n_cells),
        a_h: Vec::with_capacity(n_cells),
    };
    for i in 0..=n_cells {
        let (ik, b, a) = coeff(i as f64 * d);
        out.inv_kap_e.push(ik);
        out.b_e.push(b);
        out.a_e.push(a);
    }
    for i in 0..n_cells {
        let (ik, b, a) = coeff((i as f64 + 0.5) * d);
        out.inv_kap_h.push(ik);
        out.b_h.push(b);
        out.a_h.push(a);
    }
    out
}

/// Field arrays for one polarization plus the CPML ψ accumulators.
///
/// TE stores Ez on (nx+1)×(ny+1) nodes, H̃x on (nx+1)×(ny+2) with ghost rows
/// at j−1/2 = −1/2 and ny+1/2, H̃y on (nx+2)×(ny+1) with ghost columns.
/// Ghosts stay zero, which realizes PMC walls for boundary-row E updates.
/// TM stores H̃z on nx×ny cell centers, Ex on nx×(ny+1), Ey on (nx+1)×ny.
pub(super) struct Fields {
    pub nx: usize,
    pub ny: usize,
    pub polarization: Polarization,
    // TE
    pub ez: Vec<f64>,
    pub hx: Vec<f64>,
    pub hy: Vec<f64>,
    psi_ez_x: Vec<f64>,
    psi_ez_y: Vec<f64>,
    psi_hx: Vec<f64>,
    psi_hy: Vec<f64>,
    /// c·dt/εr at Ez nodes.
    pub ce: Vec<f64>,
    /// εr at Ez nodes (energy bookkeeping).
    pub eps_node: Vec<f64>,
    // TM
    pub hz: Vec<f64>,
    pub ex: Vec<f64>,
    pub ey: Vec<f64>,
    psi_hz_x: Vec<f64>,
    psi_hz_y: Vec<f64>,
    psi_ex: Vec<f64>,
    psi_ey: Vec<f64>,
    pub cex: Vec<f64>,
    pub cey: Vec<f64>,
    pub eps_ex: Vec<f64>,
    pub eps_ey: Vec<f64>,
}

impl Fields {
    pub fn new(map: &PermittivityMap, polarization: Polarization) -> Self {
        let (nx, ny) = (map.nx, map.ny);
        let mut f = Self {
            nx,
            ny,
            polarization,
            ez: Vec::new(),
            hx: Vec::new(),
            hy: Vec::new(),
            psi_ez_x: Vec::new(),
            psi_ez_y: Vec::new(),
            psi_hx: Vec::new(),
            psi_hy: Vec::new(),
            ce: Vec::new(),
            eps_node: Vec::new(),
            hz: Vec::new(),
            ex: Vec::new(),
            ey: Vec::new(),
            psi_hz_x: Vec::new(),
            psi_hz_y: Vec::new(),
            psi_ex: Vec::new(),
            psi_ey: Vec::new(),
            cex: Vec::new(),
            cey: Vec::new(),
            eps_ex: Vec::new(),
            eps_ey: Vec::new(),
        };
        match polarization {
            Polarization::Te => {
                f.ez = vec![0.0; (nx + 1) * (ny + 1)];
                f.hx = vec![0.0; (nx + 1) * (ny + 2)];
                f.hy = vec![0.0; (nx + 2) * (ny + 1)];
                f.psi_ez_x = vec![0.0; (nx + 1) * (ny + 1)];
                f.psi_ez_y = vec![0.0; (nx + 1) * (ny + 1)];
                f.psi_hx = vec![0.0; (nx + 1) * (ny + 2)];
                f.psi_hy = vec![0.0; (nx + 2) * (ny + 1)];
                f.eps_node = node_eps(map);
            }
            Polarization::Tm => {
                f.hz = vec![0.0; nx * ny];
                f.ex = vec![0.0; nx * (ny + 1)];
                f.ey = vec![0.0; (nx + 1) * ny];
                f.psi_hz_x = vec![0.0; nx * ny];
                f.psi_hz_y = vec![0.0; nx * ny];
                f.psi_ex = vec![0.0; nx * (ny + 1)];
                f.psi_ey = vec![0.0; (nx + 1) * ny];
                f.eps_ex = edge_eps_x(map);
                f.eps_ey = edge_eps_y(map);
            }
        }
        f
    }

    pub fn set_dt(&mut self, dt: f64) {
        let cdt = C0 * dt;
        match self.polarization {
            Polarization::Te => {
                self.ce = self.eps_node.iter().map(|e| cdt / e).collect();
            }
            Polarization::Tm => {
                self.cex = self.eps_ex.iter().map(|e| cdt / e).collect();
                self.cey = self.eps_ey.iter().map(|e| cdt / e).collect();
            }
        }
    }

    #[inline]
    pub fn ez_idx(&self, i: usize, j: usize) -> usize {
        i + (self.nx + 1) * j
    }

    /// H̃x at (i, j_half + 1/2); j_half ∈ [-1, ny] maps to rows [0, ny+1].
    #[inline]
    pub fn hx_idx(&self, i: usize, j_half: isize) -> usize {
        i + (self.nx + 1) * (j_half + 1) as usize
    }

    /// H̃y at (i_half + 1/2, j); i_half ∈ [-1, nx] maps to columns [0, nx+1].
    #[inline]
    pub fn hy_idx(&self, i_half: isize, j: usize) -> usize {
        (i_half + 1) as usize + (self.nx + 2) * j
    }

    #[inline]
    pub fn hz_idx(&self, i: usize, j: usize) -> usize {
        i + self.nx * j
    }

    /// Ex at (i + 1/2, j).
    #[inline]
    pub fn ex_idx(&self, i: usize, j: usize) -> usize {
        i + self.nx * j
    }

    /// Ey at (i, j + 1/2).
    #[inline]
    pub fn ey_idx(&self, i: usize, j: usize) -> usize {
        i + (self.nx + 1) * j
    }
}

fn node_eps(map: &PermittivityMap) -> Vec<f64> {
    let (nx, ny) = (map.nx, map.ny);
    let mut out = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            let mut acc = 0.0;
            let mut n = 0;
            for (ci, cj) in [
                (i.wrapping_sub(1), j.wrapping_sub(1)),
                (i, j.wrapping_sub(1)),
                (i.wrapping_sub(1), j),
                (i, j),
            ] {
                if ci < nx && cj < ny {
                    acc += map.at(ci, cj);
                    n += 1;
                }
            }
            out.push(acc / n as f64);
        }
    }
    out
}

fn edge_eps_x(map: &PermittivityMap) -> Vec<f64> {
    let (nx, ny) = (map.nx, map.ny);
    let mut out = Vec::with_capacity(nx * (ny + 1));
    for j in 0..=ny {
        for i in 0..nx {
            let mut acc = 0.0;
            let mut n = 0;
            for cj in [j.wrapping_sub(1), j] {
                if cj < ny {
                    acc += map.at(i, cj);
                    n += 1;
                }
            }
            out.push(acc / n as f64);
        }
    }
    out
}

fn edge_eps_y(map: &PermittivityMap) -> Vec<f64> {
    let (nx, ny) = (map.nx, map.ny);
    let mut out = Vec::with_capacity((nx + 1) * ny);
    for j in 0..ny {
        for i in 0..=nx {
            let mut acc = 0.0;
            let mut n = 0;
            for ci in [i.wrapping_sub(1), i] {
                if ci < nx {
                    acc += map.at(ci, j);
                    n += 1;
                }
            }
            out.push(acc / n as f64);
        }
    }
    out
}

/// Precomputed loop bounds and constants for the update kernels.
pub(super) struct Stencil {
    pub cdt: f64,
    pub inv_dx: f64,
    pub inv_dy: f64,
    /// Inclusive Ez (TE) / exclusive E-edge (TM) update ranges honoring the
    /// boundary kinds: PEC and PML-backed walls skip the boundary line, PMC
    /// walls include it (ghost H is zero).
    pub i_lo: usize,
    pub i_hi: usize,
    pub j_lo: usize,
    pub j_hi: usize,
}

impl Stencil {
    pub fn new(
        nx: usize,
        ny: usize,
        dx: f64,
        dy: f64,
        dt: f64,
        boundaries: &[Boundary; 4],
    ) -> Self {
        let open = |b: Boundary| b == Boundary::Pmc;
        Self {
            cdt: C0 * dt,
            inv_dx: 1.0 / dx,
            inv_dy: 1.0 / dy,
            i_lo: if open(boundaries[0]) { 0 } else { 1 },
            i_hi: if open(boundaries[1]) { nx } else { nx - 1 },
            j_lo: if open(boundaries[2]) { 0 } else { 1 },
            j_hi: if open(boundaries[3]) { ny } else { ny - 1 },
        }
    }
}

/// Advance H̃ by one half step (TE): H̃x and H̃y from the curl of Ez.
pub(super) fn update_h_te(f: &mut Fields, st: &Stencil, px: &AxisPml, py: &AxisPml) {
    let (nx, ny) = (f.nx, f.ny);
    let sx = nx + 1;
    // Hx rows: j_half between Ez rows j and j+1.
    for jh in 0..ny {
        let b = py.b_h[jh];
        let a = py.a_h[jh];
        let ik = py.inv_kap_h[jh];
        let row_h = sx * (jh + 1);
        let row_e0 = sx * jh;
        let row_e1 = sx * (jh + 1);
        for i in 0..=nx {
            let t = (f.ez[i + row_e1] - f.ez[i + row_e0]) * st.inv_dy;
            let p = b * f.psi_hx[i + row_h] + a * t;
            f.psi_hx[i + row_h] = p;
            f.hx[i + row_h] -= st.cdt * (t * ik + p);
        }
    }
    // Hy columns: i_half between Ez columns i and i+1.
    let sy = nx + 2;
    for j in 0..=ny {
        let row_e = sx * j;
        let row_h = sy * j;
        for ih in 0..nx {
            let t = (f.ez[ih + 1 + row_e] - f.ez[ih + row_e]) * st.inv_dx;
            let p = px.b_h[ih] * f.psi_hy[ih + 1 + row_h] + px.a_h[ih] * t;
            f.psi_hy[ih + 1 + row_h] = p;
            f.hy[ih + 1 + row_h] += st.cdt * (t * px.inv_kap_h[ih] + p);
        }
    }
}

/// Advance Ez by one full step (TE) from the curl of H̃.
pub(super) fn update_e_te(f: &mut Fields, st: &Stencil, px: &AxisPml, py: &AxisPml) {
    let sx = f.nx + 1;
    let sy = f.nx + 2;
    for j in st.j_lo..=st.j_hi {
        let by = py.b_e[j];
        let ay = py.a_e[j];
        let iky = py.inv_kap_e[j];
        let row = sx * j;
        let row_hx0 = sx * j; // j - 1/2
        let row_hx1 = sx * (j + 1); // j + 1/2
        let row_hy = sy * j;
        for i in st.i_lo..=st.i_hi {
            let k = i + row;
            let tx = (f.hy[i + 1 + row_hy] - f.hy[i + row_hy]) * st.inv_dx;
            let ty = (f.hx[i + row_hx1] - f.hx[i + row_hx0]) * st.inv_dy;
            let pxv = px.b_e[i] * f.psi_ez_x[k] + px.a_e[i] * tx;
            let pyv = by * f.psi_ez_y[k] + ay * ty;
            f.psi_ez_x[k] = pxv;
            f.psi_ez_y[k] = pyv;
            f.ez[k] += f.ce[k] * (tx * px.inv_kap_e[i] + pxv - ty * iky - pyv);
        }
    }
}

/// Advance H̃z by one half step (TM).
pub(super) fn update_h_tm(f: &mut Fields, st: &Stencil, px: &AxisPml, py: &AxisPml) {
    let (nx, _ny) = (f.nx, f.ny);
    let sey = nx + 1;
    for j in 0..f.ny {
        let by = py.b_h[j];
        let ay = py.a_h[j];
        let iky = py.inv_kap_h[j];
        let row_hz = nx * j;
        let row_ey = sey * j;
        let row_ex0 = nx * j;
        let row_ex1 = nx * (j + 1);
        for i in 0..nx {
            let k = i + row_hz;
            let tx = (f.ey[i + 1 + row_ey] - f.ey[i + row_ey]) * st.inv_dx;
            let ty = (f.ex[i + row_ex1] - f.ex[i + row_ex0]) * st.inv_dy;
            let pxv = px.b_h[i] * f.psi_hz_x[k] + px.a_h[i] * tx;
            let pyv = by * f.psi_hz_y[k] + ay * ty;
            f.psi_hz_x[k] = pxv;
            f.psi_hz_y[k] = pyv;
            f.hz[k] -= st.cdt * (tx * px.inv_kap_h[i] + pxv - ty * iky - pyv);
        }
    }
}

/// Advance Ex, Ey by one full step (TM). Wall-tangential E lines stay zero
/// (PEC semantics; PMC is rejected at validation for TM).
pub(super) fn update_e_tm(f: &mut Fields, st: &Stencil, px: &AxisPml, py: &AxisPml) {
    let nx = f.nx;
    for j in 1..f.ny {
        // Ex rows at integer j strictly inside the walls.
        let by = py.b_e[j];
        let ay = py.a_e[j];
        let iky = py.inv_kap_e[j];
        let row_e = nx * j;
        let row_h0 = nx * (j - 1);
        let row_h1 = nx * j;
        for i in 0..nx {
            let k = i + row_e;
            let t = (f.hz[i + row_h1] - f.hz[i + row_h0]) * st.inv_dy;
            let p = by * f.psi_ex[k] + ay * t;
            f.psi_ex[k] = p;
            f.ex[k] += f.cex[k] * (t * iky + p);
        }
    }
    let sey = nx + 1;
    for j in 0..f.ny {
        let row_e = sey * j;
        let row_h = nx * j;
        for i in 1..nx {
            let k = i + row_e;
            let t = (f.hz[i + row_h] - f.hz[i - 1 + row_h]) * st.inv_dx;
            let p = px.b_e[i] * f.psi_ey[k] + px.a_e[i] * t;
            f.psi_ey[k] = p;
            f.ey[k] -= f.cey[k] * (t * px.inv_kap_e[i] + p);
        }
    }
}

/// Field energy ½Σ(εr·E² + H̃²)·dA in the ε0-normalized units.
pub(super) fn total_energy(f: &Fields, dx: f64, dy: f64) -> f64 {
    let da = dx * dy;
    match f.polarization {
        Polarization::Te => {
            let ue: f64 = f
                .ez
                .iter()
                .zip(&f.eps_node)
                .map(|(e, eps)| eps * e * e)
                .sum();
            let uh: f64 =
                f.hx.iter().map(|h| h * h).sum::<f64>() + f.hy.iter().map(|h| h * h).sum::<f64>();
            0.5 * (ue + uh) * da
        }
        Polarization::Tm => {
            let ue: f64 = f
                .ex
                .iter()
                .zip(&f.eps_ex)
                .map(|(e, eps)| eps * e * e)
                .sum::<f64>()
                + f.ey
                    .iter()
                    .zip(&f.eps_ey)
                    .map(|(e, eps)| eps * e * e)
                    .sum::<f64>();
            let uh: f64 = f.hz.iter().map(|h| h * h).sum();
            0.5 * (ue + uh) * da
        }
    }
}

/// The exactly conserved leapfrog invariant: ½Σ εr·E² + ½Σ H̃^{n-1/2}·H̃^{n+1/2}.
/// Clones the magnetic field and advances it a half step against the current
/// E to form the staggered product; exact for source-free PEC evolution.
pub(super) fn conserved_energy(
    f: &Fields,
    st: &Stencil,
    px: &AxisPml,
    py: &AxisPml,
    dx: f64,
    dy: f64,
) -> f64 {
    let da = dx * dy;
    match f.polarization {
        Polarization::Te => {
            let mut probe = Fields {
                hx: f.hx.clone(),
                hy: f.hy.clone(),
                psi_hx: f.psi_hx.clone(),
                psi_hy: f.psi_hy.clone(),
                ez: f.ez.clone(),
                ce: Vec::new(),
                eps_node: Vec::new(),
                nx: f.nx,
                ny: f.ny,
                polarization: f.polarization,
                hz: Vec::new(),
                ex: Vec::new(),
                ey: Vec::new(),
                psi_ez_x: Vec::new(),
                psi_ez_y: Vec::new(),
                psi_hz_x: Vec::new(),
                psi_hz_y: Vec::new(),
                psi_ex: Vec::new(),
                psi_ey: Vec::new(),
                cex: Vec::new(),
                cey: Vec::new(),
                eps_ex: Vec::new(),
                eps_ey: Vec::new(),
            };
            update_h_te(&mut probe, st, px, py);
            let ue: f64 = f
                .ez
                .iter()
                .zip(&f.eps_node)
                .map(|(e, eps)| eps * e * e)
                .sum();
            let uh: f64 = f.hx.iter().zip(&probe.hx).map(|(a, b)| a * b).sum::<f64>()
                + f.hy.iter().zip(&probe.hy).map(|(a, b)| a * b).sum::<f64>();
            0.5 * (ue + uh) * da
        }
        Polarization::Tm => {
            let mut probe = Fields {
                hz: f.hz.clone(),
                psi_hz_x: f.psi_hz_x.clone(),
                psi_hz_y: f.psi_hz_y.clone(),
                ex: f.ex.clone(),
                ey: f.ey.clone(),
                nx: f.nx,
                ny: f.ny,
                polarization: f.polarization,
                ez: Vec::new(),
                hx: Vec::new(),
                hy: Vec::new(),
                psi_ez_x: Vec::new(),
                psi_ez_y: Vec::new(),
                psi_hx: Vec::new(),
                psi_hy: Vec::new(),
                psi_ex: Vec::new(),
                psi_ey: Vec::new(),
                ce: Vec::new(),
                eps_node: Vec::new(),
                cex: Vec::new(),
                cey: Vec::new(),
                eps_ex: Vec::new(),
                eps_ey: Vec::new(),
            };
            update_h_tm(&mut probe, st, px, py);
            let ue: f64 = f
                .ex
                .iter()
                .zip(&f.eps_ex)
                .map(|(e, eps)| eps * e * e)
                .sum::<f64>()
                + f.ey
                    .iter()
                    .zip(&f.eps_ey)
                    .map(|(e, eps)| eps * e * e)
                    .sum::<f64>();
            let uh: f64 = f.hz.iter().zip(&probe.hz).map(|(a, b)| a * b).sum();
            0.5 * (ue + uh) * da
        }
    }
}

/// Locate the first non-finite value for the NaN-abort diagnostic.
pub(super) fn find_non_finite(f: &Fields) -> Option<(&'static str, usize, usize)> {
    let scan = |name: &'static str, data: &[f64], stride: usize| -> Option<(&'static str, usize, usize)> {
        data.iter()
            .position(|v| !v.is_finite())
            .map(|k| (name, k % stride, k / stride))
    };
    match f.polarization {
        Polarization::Te => scan("Ez", &f.ez, f.nx + 1)
            .or_else(|| scan("Hx", &f.hx, f.nx + 1))
            .or_else(|| scan("Hy", &f.hy, f.nx + 2)),
        Polarization::Tm => scan("Hz", &f.hz, f.nx)
            .or_else(|| scan("Ex", &f.ex, f.nx))
            .or_else(|| scan("Ey", &f.ey, f.nx + 1)),
    }
}
