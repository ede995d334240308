//! Exact radial oracle for balls B_R(z) in dimension N ≥ 2: the solution
//! q(x) = ½|x-z|² - ½R² - R/β of the Robin torsion problem, its boundary
//! data (q = -R/β, ⟨∇q,ν⟩ = R), the overdetermined-condition constant
//! C = -R² - R(N+1)/β, the torsional rigidity of the ball, and the Steklov
//! eigenvalues μ_k = k/R.

use crate::error::{Error, Result};

/// A ball B_R(z) ⊂ ℝ^N with a non-resonant Robin parameter (β·R ∉ -ℕ).
#[derive(Debug, Clone)]
pub struct RadialCase {
    pub n_dim: u32,
    pub radius: f64,
    pub beta: f64,
    pub center: Vec<f64>,
}

impl RadialCase {
    pub fn new(n_dim: u32, radius: f64, beta: f64, center: Vec<f64>) -> Result<Self> {
        if n_dim < 2 {
            return Err(Error::InvalidInput("dimension must be N ≥ 2".into()));
        }
        if !(radius > 0.0) {
            return Err(Error::InvalidInput("radius must be positive".into()));
        }
        if beta == 0.0 || !beta.is_finite() {
            return Err(Error::InvalidInput("β must be finite and nonzero".into()));
        }
        if center.len() != n_dim as usize {
            return Err(Error::InvalidInput("center dimension mismatch".into()));
        }
        // resonance guard: -β = k/R for some positive integer k means
        // β·R is a negative integer (exact when β·R is representable).
        let p = beta * radius;
        if p < -0.5 && (p - p.round()).abs() < 1e-9 * p.abs().max(1.0) {
            return Err(Error::ResonantRadialCase { beta_r: p });
        }
        Ok(RadialCase { n_dim, radius, beta, center })
    }

    /// Ball centered at the origin.
    pub fn origin(n_dim: u32, radius: f64, beta: f64) -> Result<Self> {
        Self::new(n_dim, radius, beta, vec![0.0; n_dim as usize])
    }

    fn distance(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.center)
            .map(|(a, z)| (a - z) * (a - z))
            .sum::<f64>()
            .sqrt()
    }

    /// q(x) = ½|x-z|² - ½R² - R/β on the closed ball.
    pub fn q_value(&self, x: &[f64]) -> Result<f64> {
        let d = self.distance(x);
        if d > self.radius * (1.0 + 1e-12) {
            return Err(Error::OutsideBall { distance: d, radius: self.radius });
        }
        Ok(0.5 * d * d - 0.5 * self.radius * self.radius - self.radius / self.beta)
    }

    /// ∇q = x - z.
    pub fn q_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let d = self.distance(x);
        if d > self.radius * (1.0 + 1e-12) {
            return Err(Error::OutsideBall { distance: d, radius: self.radius });
        }
        Ok(x.iter().zip(&self.center).map(|(a, z)| a - z).collect())
    }

    /// Δq = N everywhere.
    pub fn q_laplacian(&self) -> f64 {
        self.n_dim as f64
    }

    /// Trace q = -R/β on ∂B_R.
    pub fn boundary_value(&self) -> f64 {
        -self.radius / self.beta
    }

    /// ⟨∇q, ν⟩ = R on ∂B_R.
    pub fn boundary_normal_derivative(&self) -> f64 {
        self.radius
    }

    /// The constant of the overdetermined condition: C = -R² - R(N+1)/β.
    pub fn serrin_constant(&self) -> f64 {
        serrin_constant_formula(self.n_dim, self.radius, self.beta)
    }

    /// C evaluated from the boundary data
    /// |∇q|² + 2Nq - 2β²q² + (N-1)βq²·M0 with M0 = 1/R; must agree with
    /// `serrin_constant` identically.
    pub fn serrin_constant_from_boundary_data(&self) -> f64 {
        let n = self.n_dim as f64;
        let b = self.beta;
        let q = self.boundary_value();
        let dq = self.boundary_normal_derivative();
        let m0 = 1.0 / self.radius;
        dq * dq + 2.0 * n * q - 2.0 * b * b * q * q + (n - 1.0) * b * q * q * m0
    }

    /// T_β(B_R) = |B_R|/N · (R²/(N+2) + R/β).
    pub fn torsional_rigidity(&self) -> f64 {
        let n = self.n_dim as f64;
        let vol = ball_volume(self.n_dim, self.radius);
        vol / n * (self.radius * self.radius / (n + 2.0) + self.radius / self.beta)
    }

    /// Steklov eigenvalue μ_k(B_R) = k/R.
    pub fn steklov_eigenvalue(&self, k: u32) -> f64 {
        k as f64 / self.radius
    }

    /// The 2-D Steklov list with multiplicities: 0, 1/R, 1/R, 2/R, 2/R, …
    /// (m+1 entries).
    pub fn steklov_spectrum_2d(&self, m: usize) -> Vec<f64> {
        (0..=m).map(|i| (i as f64 / 2.0).ceil() / self.radius).collect()
    }

    /// Left and right sides of the boundary integral identities evaluated
    /// from the closed-form radial data (∇^τq = 0, ⟨∇q,ν⟩ = R, M = M0).
    /// Every side is identically zero on a ball.
    pub fn identity_sides(&self) -> RadialIdentitySides {
        let n = self.n_dim as f64;
        let surface = ball_surface(self.n_dim, self.radius);
        let r = self.radius;
        let m0 = 1.0 / r;
        // ΔP = |∇²q|² - (Δq)²/N = N - N
        let delta_p = ball_volume(self.n_dim, self.radius) * (n - n * n / n);
        let fundamental_rhs = -(n - 1.0) * surface * r * (r * m0 - 1.0);
        let sbt_lhs = delta_p + (n - 1.0) * m0 * surface * (r - r) * (r - r);
        let sbt_rhs = -(n - 1.0) * surface * r * r * (m0 - m0);
        let serrin_lhs = delta_p + self.beta * surface * (r - r) * (r - r);
        RadialIdentitySides {
            fundamental: (delta_p, fundamental_rhs),
            sbt: (sbt_lhs, sbt_rhs),
            serrin: (serrin_lhs, 0.0),
        }
    }
}

/// (lhs, rhs) pairs of the three integral identities on radial data.
#[derive(Debug, Clone, Copy)]
pub struct RadialIdentitySides {
    pub fundamental: (f64, f64),
    pub sbt: (f64, f64),
    pub serrin: (f64, f64),
}

/// C = -R² - R(N+1)/β as a bare formula. Unlike `RadialCase` it carries no
/// resonance guard: the constant is well-defined for every β ≠ 0 even where
/// the radial solution is not unique.
pub fn serrin_constant_formula(n_dim: u32, radius: f64, beta: f64) -> f64 {
    let n = n_dim as f64;
    -radius * radius - radius * (n + 1.0) / beta
}

/// Volume of the N-ball of radius r. Even dimensions use the exact
/// rational·π^k form to keep oracle values bit-stable.
pub fn ball_volume(n_dim: u32, r: f64) -> f64 {
    let n = n_dim as usize;
    let rn = r.powi(n_dim as i32);
    if n % 2 == 0 {
        let k = n / 2;
        let mut c = 1.0;
        for i in 1..=k {
            c *= std::f64::consts::PI / i as f64;
        }
        c * rn
    } else {
        let k = (n - 1) / 2;
        // |B1| = 2 · k! · (4π)^k / (2k+1)!
        let mut c = 2.0;
        for i in 1..=k {
            c *= 4.0 * std::f64::consts::PI * i as f64;
        }
        for i in 1..=(2 * k + 1) {
            c /= i as f64;
        }
        c * rn
    }
}

/// Surface measure |∂B_r| = N·ω_N·r^{N-1}.
pub fn ball_surface(n_dim: u32, r: f64) -> f64 {
    n_dim as f64 * ball_volume(n_dim, 1.0) * r.powi(n_dim as i32 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn q_values_at_center_and_boundary() {
        let c = RadialCase::origin(2, 1.0, 1.0).unwrap();
        assert_eq!(c.q_value(&[0.0, 0.0]).unwrap(), -1.5);
        assert_eq!(c.q_value(&[1.0, 0.0]).unwrap(), -1.0);
        assert_eq!(c.boundary_value(), -1.0);

        let c3 = RadialCase::origin(3, 2.0, -0.7).unwrap();
        let b = c3.boundary_value();
        assert!((b - 2.857142857142857).abs() < 1e-15);
        let x = [0.0, 0.0, 2.0];
        assert!((c3.q_value(&x).unwrap() - b).abs() < 1e-15);
        let g = c3.q_gradient(&[0.5, 0.3, 0.1]).unwrap();
        assert_eq!(g, vec![0.5, 0.3, 0.1]);

        let outside = c.q_value(&[1.5, 0.0]).unwrap_err();
        assert!(matches!(outside, Error::OutsideBall { .. }));
    }

    #[test]
    fn resonance_guard() {
        assert!(matches!(
            RadialCase::origin(2, 1.0, -1.0),
            Err(Error::ResonantRadialCase { .. })
        ));
        assert!(matches!(
            RadialCase::origin(2, 1.5, -2.0), // β·R = -3
            Err(Error::ResonantRadialCase { .. })
        ));
        assert!(RadialCase::origin(2, 2.0, -0.7).is_ok()); // β·R = -1.4
    }

    #[test]
    fn serrin_constants() {
        assert_eq!(RadialCase::origin(2, 1.0, 1.0).unwrap().serrin_constant(), -4.0);
        assert_eq!(RadialCase::origin(2, 2.0, 0.5).unwrap().serrin_constant(), -16.0);
        // N = 3, R = 1, β = -2: C = -1 + 4/2 = +1 (sign flips for β < 0).
        // β·R = -2 is resonant, so only the bare formula applies there.
        assert_eq!(serrin_constant_formula(3, 1.0, -2.0), 1.0);
        // Dirichlet limit: C → -R²
        let big = RadialCase::origin(2, 1.0, 1e12).unwrap();
        assert!((big.serrin_constant() + 1.0).abs() < 1e-9);
    }

    #[test]
    fn torsional_rigidity_matches_quadrature_oracle() {
        // oracle: T = (1/N)∫(-q) dx = (1/N)∫_0^R (-q(ρ))·N·ω_N·ρ^{N-1} dρ
        let quad_t = |case: &RadialCase| -> f64 {
            let n = case.n_dim as f64;
            let omega = ball_volume(case.n_dim, 1.0);
            let rule = gauss_legendre(32);
            let mut total = 0.0;
            for &(t, w) in &rule {
                let rho = t * case.radius;
                let q = 0.5 * rho * rho - 0.5 * case.radius * case.radius
                    - case.radius / case.beta;
                total += w * case.radius * (-q) * n * omega * rho.powi(case.n_dim as i32 - 1);
            }
            total / n
        };
        let cases = [
            (RadialCase::origin(2, 1.0, 1.0).unwrap(), 5.0 * PI / 8.0),
            (RadialCase::origin(2, 1.0, -0.5).unwrap(), -7.0 * PI / 8.0),
            (RadialCase::origin(2, 2.0, 1.0).unwrap(), 6.0 * PI),
        ];
        for (case, expected) in &cases {
            let t = case.torsional_rigidity();
            assert!((t - expected).abs() < 1e-12 * expected.abs(), "T = {t}, want {expected}");
            assert!((t - quad_t(case)).abs() < 1e-12 * t.abs().max(1.0));
        }
        // Dirichlet limit π/8 of the unit disk
        let dirichlet = RadialCase::origin(2, 1.0, 1e15).unwrap().torsional_rigidity();
        assert!((dirichlet - PI / 8.0).abs() < 1e-12);
    }

    #[test]
    fn rigidity_is_strictly_monotone_in_beta() {
        // T_β(B_R) = |B_R|/N·(R²/(N+2) + R/β) decreases in β on (0, ∞)
        // (dT/dβ = -|B_R|R/(Nβ²) < 0), blowing up at the Neumann end and
        // approaching the Dirichlet value π/8 from above.
        let mut prev = f64::INFINITY;
        for i in 1..100 {
            let beta = 0.05 * i as f64;
            let t = RadialCase::origin(2, 1.0, beta).unwrap().torsional_rigidity();
            assert!(t < prev);
            prev = t;
        }
        assert!(prev > PI / 8.0);
    }

    #[test]
    fn steklov_spectrum_of_the_ball() {
        let c = RadialCase::origin(2, 2.0, 1.0).unwrap();
        assert_eq!(c.steklov_eigenvalue(3), 1.5);
        assert_eq!(c.steklov_spectrum_2d(6), vec![0.0, 0.5, 0.5, 1.0, 1.0, 1.5, 1.5]);
    }

    #[test]
    fn ball_volumes() {
        assert!((ball_volume(2, 1.0) - PI).abs() < 1e-15);
        assert!((ball_volume(3, 1.0) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((ball_volume(4, 1.0) - PI * PI / 2.0).abs() < 1e-14);
        assert!((ball_surface(2, 2.0) - 4.0 * PI).abs() < 1e-14);
        assert!((ball_surface(3, 1.0) - 4.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn identity_sides_vanish_on_radial_data() {
        for case in [
            RadialCase::origin(2, 1.0, 1.0).unwrap(),
            RadialCase::origin(3, 2.0, -0.7).unwrap(),
            RadialCase::origin(5, 0.8, 3.0).unwrap(),
        ] {
            let sides = case.identity_sides();
            for (lhs, rhs) in [sides.fundamental, sides.sbt, sides.serrin] {
                assert_eq!(lhs, 0.0);
                assert_eq!(rhs, 0.0);
            }
            // the Robin condition holds exactly: ∂q/∂ν + βq = R - R = 0
            let robin = case.boundary_normal_derivative() + case.beta * case.boundary_value();
            assert!(robin.abs() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn constant_formula_matches_boundary_data(
            n in 2u32..6,
            r in 0.3..3.0f64,
            beta in prop::sample::select(vec![-2.3, -0.9, -0.31, 0.4, 1.0, 2.7, 10.0])
        ) {
            if let Ok(case) = RadialCase::origin(n, r, beta) {
                let c1 = case.serrin_constant();
                let c2 = case.serrin_constant_from_boundary_data();
                prop_assert!((c1 - c2).abs() < 1e-12 * c1.abs().max(1.0), "{c1} vs {c2}");
            }
        }
    }
}
