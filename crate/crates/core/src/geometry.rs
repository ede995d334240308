//! Planar star-shaped boundaries in Fourier polar form and their exact
//! differential geometry: r(θ) = r0 + Σ_k (a_k cos kθ + b_k sin kθ) around a
//! center z, with analytic tangent, outer normal, curvature and arclength
//! density, plus the global scalars |Ω|, |∂Ω|, R = N|Ω|/|∂Ω|, M0 = 1/R and
//! the curvature extrema.

use nalgebra::{Point2, Vector2};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral;

/// A C^∞ star-shaped boundary curve in Fourier polar parametrization.
///
/// Invariant: r(θ) > 0 for all θ, checked at construction through the
/// sufficient condition Σ_k(|a_k|+|b_k|) < r0 or, failing that, a dense
/// grid scan refined by golden-section search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryCurve {
    r0: f64,
    /// (a_k, b_k) for modes k = 1..=K.
    coeffs: Vec<(f64, f64)>,
    center: Point2<f64>,
}

/// Pointwise boundary data at a parameter angle θ.
#[derive(Debug, Clone, Copy)]
pub struct CurvePoint {
    pub point: Point2<f64>,
    /// Unit tangent along increasing θ (counterclockwise).
    pub tangent: Vector2<f64>,
    /// Unit outer normal.
    pub normal: Vector2<f64>,
    /// Signed curvature, positive for convex boundaries.
    pub curvature: f64,
    /// Arclength density |γ'(θ)| = √(r² + r'²).
    pub speed: f64,
}

/// Global scalars of a curve: area, perimeter, R = N|Ω|/|∂Ω| with N = 2,
/// M0 = 1/R and the curvature extrema over the whole boundary.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GeometrySummary {
    pub area: f64,
    pub perimeter: f64,
    /// R = N|Ω|/|∂Ω| (N = 2), the radius of the reference ball.
    pub r: f64,
    /// M0 = 1/R, the reference mean curvature.
    pub m0: f64,
    pub kappa_min: f64,
    pub kappa_max: f64,
}

impl BoundaryCurve {
    /// Builds a curve after verifying r(θ) > 0.
    pub fn new(r0: f64, coeffs: Vec<(f64, f64)>, center: Point2<f64>) -> Result<Self> {
        if !(r0 > 0.0) || !r0.is_finite() {
            return Err(Error::PositivityViolation { min_r: r0 });
        }
        let curve = BoundaryCurve { r0, coeffs, center };
        let norm: f64 = curve.coeffs.iter().map(|(a, b)| a.abs() + b.abs()).sum();
        if norm < r0 {
            return Ok(curve);
        }
        let min_r = curve.min_radius();
        if min_r <= 1e-12 * r0 {
            return Err(Error::PositivityViolation { min_r });
        }
        Ok(curve)
    }

    /// Builds a curve from sparse (k, a_k, b_k) mode triples.
    pub fn from_modes(r0: f64, modes: &[(usize, f64, f64)], center: Point2<f64>) -> Result<Self> {
        let k_max = modes.iter().map(|&(k, _, _)| k).max().unwrap_or(0);
        let mut coeffs = vec![(0.0, 0.0); k_max];
        for &(k, a, b) in modes {
            if k == 0 {
                return Err(Error::InvalidInput("mode index k must be >= 1".into()));
            }
            coeffs[k - 1].0 += a;
            coeffs[k - 1].1 += b;
        }
        Self::new(r0, coeffs, center)
    }

    /// Circle of radius `r` centered at the origin.
    pub fn circle(r: f64) -> Self {
        Self::new(r, Vec::new(), Point2::origin()).expect("radius must be positive")
    }

    /// Axis-aligned ellipse with semi-axes `a`, `b` centered at the origin,
    /// represented by Fourier projection of r(θ) = ab/√(b²cos²θ + a²sin²θ).
    ///
    /// The mode count is grown until the projection error drops below
    /// 1e-10·max(a,b) (up to K = 128). Returns the curve and the achieved
    /// max projection error on a dense grid.
    pub fn ellipse(a: f64, b: f64) -> Result<(Self, f64)> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::InvalidInput("ellipse semi-axes must be positive".into()));
        }
        let m = 8192;
        let angles = spectral::uniform_angles(m);
        let samples: Vec<f64> = angles
            .iter()
            .map(|&t| {
                let (s, c) = t.sin_cos();
                a * b / ((b * c).powi(2) + (a * s).powi(2)).sqrt()
            })
            .collect();
        let tol = 1e-10 * a.max(b);
        let mut best: Option<(Self, f64)> = None;
        for k_max in [16usize, 24, 32, 48, 64, 96, 128] {
            let (mean, coeffs) = spectral::fourier_project(&samples, k_max);
            let curve = Self::new(mean, coeffs, Point2::origin())?;
            let err = angles
                .iter()
                .zip(&samples)
                .map(|(&t, &s)| (curve.radius(t) - s).abs())
                .fold(0.0_f64, f64::max);
            best = Some((curve, err));
            if err < tol {
                break;
            }
        }
        Ok(best.expect("at least one projection attempted"))
    }

    /// The curve scaled by λ > 0 about its center.
    pub fn scaled(&self, lambda: f64) -> Self {
        assert!(lambda > 0.0);
        BoundaryCurve {
            r0: self.r0 * lambda,
            coeffs: self.coeffs.iter().map(|&(a, b)| (a * lambda, b * lambda)).collect(),
            center: self.center,
        }
    }

    pub fn center(&self) -> Point2<f64> {
        self.center
    }

    pub fn mean_radius(&self) -> f64 {
        self.r0
    }

    pub fn coeffs(&self) -> &[(f64, f64)] {
        &self.coeffs
    }

    /// Number of Fourier modes K.
    pub fn mode_count(&self) -> usize {
        self.coeffs.len()
    }

    /// Σ_k (a_k² + b_k²): the non-circular Fourier energy.
    pub fn noncircular_energy(&self) -> f64 {
        self.coeffs.iter().map(|(a, b)| a * a + b * b).sum()
    }

    pub fn radius(&self, theta: f64) -> f64 {
        let mut r = self.r0;
        for (i, &(a, b)) in self.coeffs.iter().enumerate() {
            let k = (i + 1) as f64;
            let (s, c) = (k * theta).sin_cos();
            r += a * c + b * s;
        }
        r
    }

    pub fn radius_d1(&self, theta: f64) -> f64 {
        let mut d = 0.0;
        for (i, &(a, b)) in self.coeffs.iter().enumerate() {
            let k = (i + 1) as f64;
            let (s, c) = (k * theta).sin_cos();
            d += k * (-a * s + b * c);
        }
        d
    }

    pub fn radius_d2(&self, theta: f64) -> f64 {
        let mut d = 0.0;
        for (i, &(a, b)) in self.coeffs.iter().enumerate() {
            let k = (i + 1) as f64;
            let (s, c) = (k * theta).sin_cos();
            d += -k * k * (a * c + b * s);
        }
        d
    }

    /// Boundary point with tangent frame, curvature and arclength density.
    pub fn eval(&self, theta: f64) -> CurvePoint {
        let r = self.radius(theta);
        let dr = self.radius_d1(theta);
        let ddr = self.radius_d2(theta);
        let (s, c) = theta.sin_cos();
        let point = self.center + Vector2::new(r * c, r * s);
        // γ'(θ) = r'·e_r + r·e_θ
        let gp = Vector2::new(dr * c - r * s, dr * s + r * c);
        let speed = gp.norm();
        let tangent = gp / speed;
        let normal = Vector2::new(tangent.y, -tangent.x);
        let curvature = (r * r + 2.0 * dr * dr - r * ddr) / speed.powi(3);
        debug_assert!((point - self.center).dot(&normal) > 0.0, "normal must point outward");
        CurvePoint { point, tangent, normal, curvature, speed }
    }

    /// Minimum of r over [0, 2π): dense grid scan polished by golden section.
    fn min_radius(&self) -> f64 {
        let n = (64 * (self.coeffs.len() + 1)).max(4096);
        let angles = spectral::uniform_angles(n);
        let radii: Vec<f64> = angles.iter().map(|&t| self.radius(t)).collect();
        let mut min_r = f64::INFINITY;
        let step = std::f64::consts::TAU / n as f64;
        for i in 0..n {
            let prev = radii[(i + n - 1) % n];
            let next = radii[(i + 1) % n];
            if radii[i] <= prev && radii[i] <= next {
                let t = angles[i];
                let polished = golden_min(|x| self.radius(x), t - step, t + step, 1e-12);
                min_r = min_r.min(polished);
            }
            min_r = min_r.min(radii[i]);
        }
        min_r
    }

    /// Global scalars via uniform trapezoid quadrature (spectrally accurate);
    /// the node count is raised to at least 4(K+1) and 64.
    pub fn summarize(&self, quadrature_nodes: usize) -> Result<GeometrySummary> {
        let n = quadrature_nodes.max(4 * (self.coeffs.len() + 1)).max(64);
        let angles = spectral::uniform_angles(n);
        let mut r2 = Vec::with_capacity(n);
        let mut speed = Vec::with_capacity(n);
        let mut kappa = Vec::with_capacity(n);
        for &t in &angles {
            let r = self.radius(t);
            if r <= 0.0 {
                return Err(Error::PositivityViolation { min_r: r });
            }
            let p = self.eval(t);
            r2.push(r * r);
            speed.push(p.speed);
            kappa.push(p.curvature);
        }
        let area = 0.5 * spectral::periodic_trapezoid(&r2);
        let perimeter = spectral::periodic_trapezoid(&speed);
        let r = 2.0 * area / perimeter;

        // Grid extrema of κ polished by golden-section search in each
        // bracketing interval; grid-only extrema would bias the κ_min-based
        // hypothesis checks.
        let step = std::f64::consts::TAU / n as f64;
        let mut kappa_min = f64::INFINITY;
        let mut kappa_max = f64::NEG_INFINITY;
        for i in 0..n {
            let prev = kappa[(i + n - 1) % n];
            let next = kappa[(i + 1) % n];
            kappa_min = kappa_min.min(kappa[i]);
            kappa_max = kappa_max.max(kappa[i]);
            if kappa[i] < prev && kappa[i] < next {
                let t = angles[i];
                kappa_min =
                    kappa_min.min(golden_min(|x| self.eval(x).curvature, t - step, t + step, 1e-12));
            }
            if kappa[i] > prev && kappa[i] > next {
                let t = angles[i];
                kappa_max = kappa_max
                    .max(-golden_min(|x| -self.eval(x).curvature, t - step, t + step, 1e-12));
            }
        }

        Ok(GeometrySummary { area, perimeter, r, m0: 1.0 / r, kappa_min, kappa_max })
    }

    /// Relative residual of the Minkowski identity
    /// ∮ κ ⟨x - z, ν⟩ dH = |∂Ω| (in the plane the mean curvature is κ).
    pub fn minkowski_residual(&self, quadrature_nodes: usize) -> f64 {
        let n = quadrature_nodes.max(4 * (self.coeffs.len() + 1)).max(64);
        let angles = spectral::uniform_angles(n);
        let mut integrand = Vec::with_capacity(n);
        let mut speed = Vec::with_capacity(n);
        for &t in &angles {
            let p = self.eval(t);
            let support = (p.point - self.center).dot(&p.normal);
            integrand.push(p.curvature * support * p.speed);
            speed.push(p.speed);
        }
        let lhs = spectral::periodic_trapezoid(&integrand);
        let perimeter = spectral::periodic_trapezoid(&speed);
        (lhs - perimeter).abs() / perimeter
    }

    /// Max pointwise residual of div_τ ν = κ along the curve, with the
    /// tangential divergence computed by spectral differentiation:
    /// div_τ ν = ⟨dν/ds, T⟩.
    pub fn tangential_divergence_residual(&self, quadrature_nodes: usize) -> f64 {
        let n = quadrature_nodes.max(8 * (self.coeffs.len() + 1)).max(128);
        let angles = spectral::uniform_angles(n);
        let points: Vec<CurvePoint> = angles.iter().map(|&t| self.eval(t)).collect();
        let nx: Vec<f64> = points.iter().map(|p| p.normal.x).collect();
        let ny: Vec<f64> = points.iter().map(|p| p.normal.y).collect();
        let dnx = spectral::periodic_derivative(&nx, 1);
        let dny = spectral::periodic_derivative(&ny, 1);
        let mut residual = 0.0_f64;
        for (i, p) in points.iter().enumerate() {
            let dn_ds = Vector2::new(dnx[i], dny[i]) / p.speed;
            let div_tau = dn_ds.dot(&p.tangent);
            residual = residual.max((div_tau - p.curvature).abs());
        }
        residual
    }

    /// Residual of the surface divergence theorem
    /// ∮ f Δ_τ v dH = -∮ ⟨∇^τ v, ∇^τ f⟩ dH for scalar fields restricted to
    /// the curve, with all tangential derivatives spectral.
    pub fn surface_divergence_residual(
        &self,
        f: impl Fn(Point2<f64>) -> f64,
        v: impl Fn(Point2<f64>) -> f64,
        quadrature_nodes: usize,
    ) -> f64 {
        let n = quadrature_nodes.max(8 * (self.coeffs.len() + 1)).max(128);
        let angles = spectral::uniform_angles(n);
        let points: Vec<CurvePoint> = angles.iter().map(|&t| self.eval(t)).collect();
        let speed: Vec<f64> = points.iter().map(|p| p.speed).collect();
        let fs: Vec<f64> = points.iter().map(|p| f(p.point)).collect();
        let vs: Vec<f64> = points.iter().map(|p| v(p.point)).collect();
        let dv_dtheta = spectral::periodic_derivative(&vs, 1);
        let df_dtheta = spectral::periodic_derivative(&fs, 1);
        // Δ_τ v = (1/|γ'|) d/dθ ( (1/|γ'|) dv/dθ )
        let dv_ds: Vec<f64> = dv_dtheta.iter().zip(&speed).map(|(d, s)| d / s).collect();
        let d2v = spectral::periodic_derivative(&dv_ds, 1);
        let mut lhs = Vec::with_capacity(n);
        let mut rhs = Vec::with_capacity(n);
        for i in 0..n {
            let lap_tau = d2v[i] / speed[i];
            lhs.push(fs[i] * lap_tau * speed[i]);
            rhs.push(dv_dtheta[i] * df_dtheta[i] / speed[i]);
        }
        (spectral::periodic_trapezoid(&lhs) + spectral::periodic_trapezoid(&rhs)).abs()
    }
}

/// Golden-section minimization on [a, b].
fn golden_min(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (a, b);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    fc.min(fd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_circle_pointwise_geometry() {
        let c = BoundaryCurve::circle(1.0);
        for &t in &[0.0, 0.7, PI, 4.1] {
            let p = c.eval(t);
            assert!((p.curvature - 1.0).abs() < 1e-14);
            assert!((p.speed - 1.0).abs() < 1e-14);
            assert!((p.normal - Vector2::new(t.cos(), t.sin())).norm() < 1e-14);
            assert!((p.tangent.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn ellipse_vertex_curvatures_match_closed_form() {
        // κ = ab/(a² sin²t + b² cos²t)^{3/2}: a/b² at t = 0, b/a² at t = π/2.
        let (e, proj_err) = BoundaryCurve::ellipse(2.0, 1.0).unwrap();
        assert!(proj_err < 1e-10, "projection error {proj_err:.3e}");
        assert!((e.eval(0.0).curvature - 2.0).abs() < 1e-6);
        assert!((e.eval(PI / 2.0).curvature - 0.25).abs() < 1e-6);
    }

    #[test]
    fn ellipse_projection_handles_aspect_three() {
        let (_, proj_err) = BoundaryCurve::ellipse(3.0, 1.0).unwrap();
        assert!(proj_err < 3e-10, "projection error {proj_err:.3e}");
    }

    #[test]
    fn summaries_of_fixture_curves() {
        let c = BoundaryCurve::circle(1.0).summarize(512).unwrap();
        assert!((c.area - PI).abs() < 1e-12);
        assert!((c.perimeter - 2.0 * PI).abs() < 1e-12);
        assert!((c.r - 1.0).abs() < 1e-12);
        assert_eq!(c.m0, 1.0 / c.r);
        assert!((c.kappa_min - 1.0).abs() < 1e-10);
        assert!((c.kappa_max - 1.0).abs() < 1e-10);

        let p = BoundaryCurve::from_modes(1.0, &[(2, 0.2, 0.0)], Point2::origin()).unwrap();
        let s = p.summarize(512).unwrap();
        assert!((s.area - 1.02 * PI).abs() < 1e-12);

        let (e, _) = BoundaryCurve::ellipse(2.0, 1.0).unwrap();
        let se = e.summarize(1024).unwrap();
        assert!((se.area - 2.0 * PI).abs() < 1e-9);
        assert!((se.kappa_min - 0.25).abs() < 1e-6);
        assert!((se.kappa_max - 2.0).abs() < 1e-6);
    }

    #[test]
    fn minkowski_identity_residuals() {
        assert!(BoundaryCurve::circle(1.0).minkowski_residual(512) < 1e-14);
        let p = BoundaryCurve::from_modes(1.0, &[(2, 0.2, 0.0)], Point2::origin()).unwrap();
        assert!(p.minkowski_residual(512) < 1e-10);
        let (e, _) = BoundaryCurve::ellipse(2.0, 1.0).unwrap();
        assert!(e.minkowski_residual(1024) < 1e-10);
    }

    #[test]
    fn tangential_divergence_of_normal_equals_curvature() {
        let p = BoundaryCurve::from_modes(1.0, &[(2, 0.2, 0.0), (3, 0.0, 0.05)], Point2::origin())
            .unwrap();
        assert!(p.tangential_divergence_residual(512) < 1e-8);
    }

    #[test]
    fn surface_divergence_theorem_holds_spectrally() {
        let p = BoundaryCurve::from_modes(1.0, &[(2, 0.2, 0.0)], Point2::origin()).unwrap();
        let res = p.surface_divergence_residual(|x| x.x * x.y, |x| (x.x).sin() + x.y, 512);
        assert!(res < 1e-8, "residual {res:.3e}");
    }

    #[test]
    fn positivity_violation_detected() {
        let err = BoundaryCurve::from_modes(1.0, &[(1, 1.1, 0.0)], Point2::origin()).unwrap_err();
        assert!(matches!(err, Error::PositivityViolation { .. }));
        // Fourier norm fails the sufficient test but the grid scan passes.
        let ok = BoundaryCurve::from_modes(1.0, &[(1, 0.999, 0.0)], Point2::origin());
        assert!(ok.is_ok());
    }

    proptest! {
        #[test]
        fn scaling_laws(a2 in -0.15..0.15f64, b3 in -0.1..0.1f64, lambda in 0.5..2.0f64) {
            let c = BoundaryCurve::from_modes(1.0, &[(2, a2, 0.0), (3, 0.0, b3)], Point2::origin()).unwrap();
            let s = c.summarize(512).unwrap();
            let sl = c.scaled(lambda).summarize(512).unwrap();
            prop_assert!(((sl.area / s.area) - lambda * lambda).abs() < 1e-9);
            prop_assert!(((sl.perimeter / s.perimeter) - lambda).abs() < 1e-9);
            prop_assert!(((sl.r / s.r) - lambda).abs() < 1e-9);
            prop_assert!((sl.kappa_min * lambda - s.kappa_min).abs() < 1e-8);
            prop_assert!((sl.kappa_max * lambda - s.kappa_max).abs() < 1e-8);
        }

        #[test]
        fn minkowski_residual_is_spectrally_small(a2 in -0.2..0.2f64, b4 in -0.1..0.1f64) {
            let c = BoundaryCurve::from_modes(1.0, &[(2, a2, 0.0), (4, 0.0, b4)], Point2::origin()).unwrap();
            prop_assert!(c.minkowski_residual(512) < 1e-9);
        }
    }
}
