//! Steklov eigenvalues of the Laplacian: Δw = 0 in Ω, ∂w/∂ν = μw on ∂Ω,
//! discretized as K x = μ B x with the boundary mass B. The interior
//! unknowns are eliminated by a Schur complement onto the boundary block
//! (B is null there), leaving a small dense pencil.
//!
//! The spectrum 0 = μ_0 < μ_1 ≤ μ_2 ≤ … certifies admissibility of the
//! Robin parameter: β ≠ -μ_i.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fem::{append_boundary_mass, assemble_stiffness_and_load, Admissibility, RobinParameter};
use crate::linalg::{generalized_symmetric_eigenvalues, Csr, LdltFactor};
use crate::mesh::Mesh;

/// Leading Steklov eigenvalues μ_0 ≤ μ_1 ≤ … ≤ μ_m of a mesh.
#[derive(Debug, Clone)]
pub struct SteklovSpectrum {
    /// m+1 ascending eigenvalues, starting at μ_0 ≈ 0.
    pub eigenvalues: Vec<f64>,
    /// Count requested (m).
    pub requested: usize,
    pub h: f64,
    pub level: u32,
    pub order: u8,
}

impl SteklovSpectrum {
    pub fn mu(&self, i: usize) -> f64 {
        self.eigenvalues[i]
    }

    /// Largest computed eigenvalue (the admissibility window edge).
    pub fn mu_max(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    /// Default admissibility margin 0.05·μ_1.
    pub fn suggested_margin(&self) -> f64 {
        0.05 * self.eigenvalues[1]
    }
}

/// Computes the m+1 smallest Steklov eigenvalues of the mesh.
pub fn steklov_spectrum(mesh: &Arc<Mesh>, m: usize) -> Result<SteklovSpectrum> {
    if m < 1 {
        return Err(Error::InvalidInput("need m >= 1 eigenvalues".into()));
    }
    let n = mesh.n_nodes();
    let n_i = mesh.n_interior;
    let n_b = n - n_i;
    if m + 1 > n_b {
        return Err(Error::InvalidInput(format!(
            "m = {m} exceeds the {n_b} boundary unknowns of the mesh"
        )));
    }

    let (mut k_triplets, _) = assemble_stiffness_and_load(mesh);
    let k = Csr::from_triplets(n, &mut k_triplets);
    let mut b_triplets = Vec::new();
    append_boundary_mass(mesh, 1.0, &mut b_triplets);

    // Split K into interior/boundary blocks; boundary nodes are last.
    let mut kii_triplets = Vec::new();
    let mut kib_cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_b];
    let mut s = DMatrix::<f64>::zeros(n_b, n_b);
    for r in 0..n {
        for idx in k.row_ptr[r]..k.row_ptr[r + 1] {
            let c = k.cols[idx];
            let v = k.vals[idx];
            if r < n_i && c < n_i {
                kii_triplets.push((r, c, v));
            } else if r < n_i {
                kib_cols[c - n_i].push((r, v));
            } else if c >= n_i {
                s[(r - n_i, c - n_i)] += v;
            }
        }
    }
    let kii = Csr::from_triplets(n_i, &mut kii_triplets);
    let factor = LdltFactor::new(&kii)?;

    // S = K_bb - K_bi K_ii⁻¹ K_ib, one interior solve per boundary column.
    let mut rhs = vec![0.0f64; n_i];
    for j in 0..n_b {
        for v in rhs.iter_mut() {
            *v = 0.0;
        }
        for &(r, v) in &kib_cols[j] {
            rhs[r] = v;
        }
        let y = factor.solve(&rhs);
        for i in 0..n_b {
            let mut dot = 0.0;
            for &(r, v) in &kib_cols[i] {
                dot += v * y[r];
            }
            s[(i, j)] -= dot;
        }
    }
    let s_sym = (&s + s.transpose()) * 0.5;

    let mut b_bb = DMatrix::<f64>::zeros(n_b, n_b);
    for &(r, c, v) in &b_triplets {
        debug_assert!(r >= n_i && c >= n_i, "boundary mass touches interior node");
        b_bb[(r - n_i, c - n_i)] += v;
    }

    let eigenvalues = generalized_symmetric_eigenvalues(s_sym, b_bb)?;
    Ok(SteklovSpectrum {
        eigenvalues: eigenvalues[..=m].to_vec(),
        requested: m,
        h: mesh.h,
        level: mesh.level,
        order: mesh.order,
    })
}

/// Certifies β against the computed spectrum window: β > 0 is always
/// admissible; β < 0 is admissible when min_i |β + μ_i| > margin and the
/// window covers |β|.
pub fn check_admissibility(
    spectrum: &SteklovSpectrum,
    beta: f64,
    margin: f64,
) -> Result<RobinParameter> {
    if beta == 0.0 || !beta.is_finite() {
        return Err(Error::InvalidInput("β must be finite and nonzero".into()));
    }
    if beta > 0.0 {
        return Ok(RobinParameter { beta, admissible: Admissibility::Yes });
    }
    if beta.abs() >= spectrum.mu_max() {
        return Err(Error::WindowTooSmall { beta_abs: beta.abs(), mu_max: spectrum.mu_max() });
    }
    let min_distance = spectrum
        .eigenvalues
        .iter()
        .map(|&mu| (beta + mu).abs())
        .fold(f64::INFINITY, f64::min);
    let admissible =
        if min_distance > margin { Admissibility::Yes } else { Admissibility::No };
    Ok(RobinParameter { beta, admissible })
}
