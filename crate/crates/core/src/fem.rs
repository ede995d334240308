//! Finite element solver for the Robin torsion problem
//!
//!   Δu = N in Ω,   ∂u/∂ν + βu = 0 on ∂Ω,   N = 2,
//!
//! in weak form: find u with ∫⟨∇u,∇φ⟩ + β∮uφ = -N∫φ for all φ, i.e.
//! (K + βB)x = -N·m. Provides the torsional rigidity T_β = (1/N)∫(-u),
//! boundary traces against the exact curve geometry, and a patch-averaged
//! recovered Hessian for the P-function integrals.

use std::sync::{Arc, OnceLock};

use nalgebra::{Matrix2, Point2, Vector2};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{Csr, LdltFactor};
use crate::mesh::{p1_grads, p1_shapes, p2_grads, p2_ref_hessians, p2_shapes, Mesh};
use crate::quadrature;

/// Space dimension; the torsion source term is Δu = N.
pub const SOURCE_N: f64 = 2.0;

/// Reciprocal-condition threshold below which the Robin system is declared
/// singular (-β within discretization error of a Steklov eigenvalue).
pub const SINGULAR_RCOND: f64 = 1e-12;

const DEFAULT_TRACE_GAUSS: usize = 5;

/// Admissibility state of a Robin parameter relative to the Steklov spectrum
/// (condition β ≠ -μ_i).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admissibility {
    Yes,
    No,
    Unchecked,
}

/// The Robin parameter β ≠ 0 together with its admissibility state.
#[derive(Debug, Clone, Copy)]
pub struct RobinParameter {
    pub beta: f64,
    pub admissible: Admissibility,
}

impl RobinParameter {
    /// A parameter that has not been checked against a Steklov spectrum.
    /// β > 0 is always admissible.
    pub fn unchecked(beta: f64) -> Result<Self> {
        if beta == 0.0 || !beta.is_finite() {
            return Err(Error::InvalidInput("β must be finite and nonzero".into()));
        }
        let admissible = if beta > 0.0 { Admissibility::Yes } else { Admissibility::Unchecked };
        Ok(RobinParameter { beta, admissible })
    }
}

/// One boundary quadrature point of a solved problem: FEM traces combined
/// with the exact curve geometry (ν, κ and arclength from the curve, not
/// from the mesh).
#[derive(Debug, Clone, Copy)]
pub struct TracePoint {
    pub theta: f64,
    /// Arclength from θ = 0.
    pub s: f64,
    pub position: Point2<f64>,
    pub normal: Vector2<f64>,
    pub tangent: Vector2<f64>,
    pub u: f64,
    pub grad: Vector2<f64>,
    /// ⟨∇u, ν⟩ with the exact outer normal.
    pub du_dn: f64,
    /// Signed tangential derivative ⟨∇u, T⟩, so |∇^τ u| = |dt_u|.
    pub dt_u: f64,
    pub kappa: f64,
    /// Arclength quadrature weight.
    pub weight: f64,
    /// Element owning the trace point with its reference coordinates, for
    /// evaluating recovered volume fields on the boundary.
    pub element: usize,
    pub xi: f64,
    pub eta: f64,
}

/// Boundary trace of a Robin solution at per-edge Gauss points, ordered by θ.
#[derive(Debug, Clone)]
pub struct BoundaryTrace {
    pub points: Vec<TracePoint>,
}

impl BoundaryTrace {
    /// ∮ f dH over the boundary.
    pub fn integrate(&self, f: impl Fn(&TracePoint) -> f64) -> f64 {
        self.points.iter().map(|p| p.weight * f(p)).sum()
    }

    pub fn perimeter(&self) -> f64 {
        self.points.iter().map(|p| p.weight).sum()
    }

    /// Max pointwise Robin residual |⟨∇u,ν⟩ + βu|.
    pub fn robin_residual_max(&self, beta: f64) -> f64 {
        self.points.iter().map(|p| (p.du_dn + beta * p.u).abs()).fold(0.0, f64::max)
    }
}

/// Symmetric 2×2 tensor.
#[derive(Debug, Clone, Copy, Default)]
pub struct SymTensor2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl SymTensor2 {
    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    pub fn frobenius2(&self) -> f64 {
        self.xx * self.xx + 2.0 * self.xy * self.xy + self.yy * self.yy
    }

    /// ⟨H a, b⟩.
    pub fn bilinear(&self, a: Vector2<f64>, b: Vector2<f64>) -> f64 {
        let ha = Vector2::new(self.xx * a.x + self.xy * a.y, self.xy * a.x + self.yy * a.y);
        ha.dot(&b)
    }

    fn scaled_add(&mut self, c: f64, o: &SymTensor2) {
        self.xx += c * o.xx;
        self.xy += c * o.xy;
        self.yy += c * o.yy;
    }
}

/// Recovered second derivatives: element-constant Hessians of the quadratic
/// interpolant, patch-averaged at vertices and interpolated linearly.
#[derive(Debug, Clone)]
pub struct HessianField {
    mesh: Arc<Mesh>,
    /// Per-node values; only vertex nodes carry recovered data.
    vertex_values: Vec<SymTensor2>,
}

impl HessianField {
    /// Value at reference coordinates (ξ, η) of element `e` (P1 interpolation
    /// of the vertex values).
    pub fn at(&self, e: usize, xi: f64, eta: f64) -> SymTensor2 {
        let tri = self.mesh.tris[e];
        let shapes = p1_shapes(xi, eta);
        let mut h = SymTensor2::default();
        for (i, &v) in tri.iter().enumerate() {
            h.scaled_add(shapes[i], &self.vertex_values[v]);
        }
        h
    }

    /// Area-weighted mean of tr(∇²u) over Ω; converges to N = 2.
    pub fn mean_trace(&self) -> f64 {
        let rule = quadrature::triangle_rule_deg6();
        let mut total = 0.0;
        let mut area = 0.0;
        for e in 0..self.mesh.tris.len() {
            for q in rule {
                let det = self.mesh.map_at(e, q.xi, q.eta).det;
                total += q.weight * det * self.at(e, q.xi, q.eta).trace();
                area += q.weight * det;
            }
        }
        total / area
    }
}

/// Discrete solution of the Robin torsion problem.
#[derive(Debug)]
pub struct RobinSolution {
    mesh: Arc<Mesh>,
    beta: RobinParameter,
    dof_values: Vec<f64>,
    /// Relative algebraic residual of (K + βB)x = -N m.
    residual: f64,
    /// Reciprocal-condition estimate (computed for β < 0).
    rcond: Option<f64>,
    trace_cache: OnceLock<BoundaryTrace>,
    hessian_cache: OnceLock<HessianField>,
}

fn element_rule(order: u8) -> &'static [quadrature::TriPoint] {
    if order == 1 {
        quadrature::triangle_rule_deg5()
    } else {
        quadrature::triangle_rule_deg6()
    }
}

/// Reference coordinates of a point at parameter t ∈ [0,1] along a local
/// edge (0: v0→v1, 1: v1→v2, 2: v2→v0).
fn edge_ref_coords(local_edge: u8, t: f64) -> (f64, f64) {
    match local_edge {
        0 => (t, 0.0),
        1 => (1.0 - t, t),
        _ => (0.0, 1.0 - t),
    }
}

/// Assembles and solves (K + βB)x = -N·m.
///
/// β > 0 gives a symmetric positive definite system (factorized directly,
/// all pivots checked positive). For β < 0 the factorization is symmetric
/// indefinite and a spectral condition estimate guards against the excluded
/// resonant case β = -μ_i: `SingularSystem` is raised either when the
/// parameter was checked inadmissible or when the reciprocal condition
/// estimate falls below 1e-12.
pub fn solve_robin(mesh: &Arc<Mesh>, beta: RobinParameter) -> Result<RobinSolution> {
    if beta.beta == 0.0 || !beta.beta.is_finite() {
        return Err(Error::InvalidInput("β must be finite and nonzero".into()));
    }
    if beta.admissible == Admissibility::No {
        return Err(Error::SingularSystem { rcond: 0.0 });
    }
    let (mut triplets, load) = assemble_stiffness_and_load(mesh);
    append_boundary_mass(mesh, beta.beta, &mut triplets);
    let a = Csr::from_triplets(mesh.n_nodes(), &mut triplets);

    let factor = LdltFactor::new(&a)?;
    let mut rcond = None;
    if beta.beta > 0.0 {
        if factor.pivots().any(|d| d <= 0.0) {
            return Err(Error::SingularSystem { rcond: factor.estimate_rcond(&a) });
        }
    } else {
        let r = factor.estimate_rcond(&a);
        rcond = Some(r);
        if !(r >= SINGULAR_RCOND) {
            return Err(Error::SingularSystem { rcond: r });
        }
    }

    let rhs: Vec<f64> = load.iter().map(|&v| -SOURCE_N * v).collect();
    let mut x = factor.solve(&rhs);
    // one step of iterative refinement
    let mut ax = vec![0.0; a.n];
    a.matvec(&x, &mut ax);
    let correction: Vec<f64> = rhs.iter().zip(&ax).map(|(b, av)| b - av).collect();
    let dx = factor.solve(&correction);
    for (xi, di) in x.iter_mut().zip(&dx) {
        *xi += di;
    }
    let residual = a.relative_residual(&x, &rhs);

    Ok(RobinSolution {
        mesh: mesh.clone(),
        beta,
        dof_values: x,
        residual,
        rcond,
        trace_cache: OnceLock::new(),
        hessian_cache: OnceLock::new(),
    })
}

/// Same system solved by Jacobi-preconditioned CG (β > 0 only); used to
/// cross-check the direct factorization.
pub fn solve_robin_cg(mesh: &Arc<Mesh>, beta: RobinParameter) -> Result<RobinSolution> {
    if !(beta.beta > 0.0) {
        return Err(Error::InvalidInput("CG path requires β > 0".into()));
    }
    let (mut triplets, load) = assemble_stiffness_and_load(mesh);
    append_boundary_mass(mesh, beta.beta, &mut triplets);
    let a = Csr::from_triplets(mesh.n_nodes(), &mut triplets);
    let rhs: Vec<f64> = load.iter().map(|&v| -SOURCE_N * v).collect();
    let (x, _) = crate::linalg::pcg_jacobi(&a, &rhs, 1e-12, 200 * mesh.n_nodes())?;
    let residual = a.relative_residual(&x, &rhs);
    Ok(RobinSolution {
        mesh: mesh.clone(),
        beta,
        dof_values: x,
        residual,
        rcond: None,
        trace_cache: OnceLock::new(),
        hessian_cache: OnceLock::new(),
    })
}

pub(crate) fn assemble_stiffness_and_load(mesh: &Mesh) -> (Vec<(usize, usize, f64)>, Vec<f64>) {
    let rule = element_rule(mesh.order);
    let n_local = if mesh.order == 1 { 3 } else { 6 };
    let locals: Vec<([[f64; 6]; 6], [f64; 6])> = (0..mesh.tris.len())
        .into_par_iter()
        .map(|e| {
            let mut ke = [[0.0f64; 6]; 6];
            let mut me = [0.0f64; 6];
            for q in rule {
                let map = mesh.map_at(e, q.xi, q.eta);
                let w = q.weight * map.det;
                let inv_t = map
                    .jac
                    .try_inverse()
                    .expect("validated mesh has invertible Jacobians")
                    .transpose();
                if mesh.order == 1 {
                    let shapes = p1_shapes(q.xi, q.eta);
                    let grads = p1_grads();
                    let phys: Vec<Vector2<f64>> = grads
                        .iter()
                        .map(|g| inv_t * Vector2::new(g[0], g[1]))
                        .collect();
                    for i in 0..3 {
                        me[i] += w * shapes[i];
                        for j in 0..3 {
                            ke[i][j] += w * phys[i].dot(&phys[j]);
                        }
                    }
                } else {
                    let shapes = p2_shapes(q.xi, q.eta);
                    let grads = p2_grads(q.xi, q.eta);
                    let phys: Vec<Vector2<f64>> = grads
                        .iter()
                        .map(|g| inv_t * Vector2::new(g[0], g[1]))
                        .collect();
                    for i in 0..6 {
                        me[i] += w * shapes[i];
                        for j in 0..6 {
                            ke[i][j] += w * phys[i].dot(&phys[j]);
                        }
                    }
                }
            }
            (ke, me)
        })
        .collect();

    let mut triplets = Vec::with_capacity(mesh.tris.len() * n_local * n_local);
    let mut load = vec![0.0; mesh.n_nodes()];
    for (e, (ke, me)) in locals.iter().enumerate() {
        let ids = mesh.element_ids(e);
        for (i, &gi) in ids.iter().enumerate() {
            load[gi] += me[i];
            for (j, &gj) in ids.iter().enumerate() {
                triplets.push((gi, gj, ke[i][j]));
            }
        }
    }
    (triplets, load)
}

/// Boundary mass ∮ φ_i φ_j dH over the discrete (isoparametric) boundary,
/// scaled by β and appended to the system triplets.
pub(crate) fn append_boundary_mass(mesh: &Mesh, beta: f64, triplets: &mut Vec<(usize, usize, f64)>) {
    let rule = quadrature::gauss_legendre(DEFAULT_TRACE_GAUSS);
    for be in &mesh.boundary_edges {
        let x0 = mesh.nodes[be.v0].coords;
        let x1 = mesh.nodes[be.v1].coords;
        match be.mid {
            None => {
                let len = (x1 - x0).norm();
                // exact integrals of linear shapes on a straight edge
                let m = [[len / 3.0, len / 6.0], [len / 6.0, len / 3.0]];
                let ids = [be.v0, be.v1];
                for i in 0..2 {
                    for j in 0..2 {
                        triplets.push((ids[i], ids[j], beta * m[i][j]));
                    }
                }
            }
            Some(mid) => {
                let xm = mesh.nodes[mid].coords;
                let ids = [be.v0, be.v1, mid];
                let mut m = [[0.0f64; 3]; 3];
                for &(t, w) in &rule {
                    // quadratic Lagrange on t ∈ {0, 1, 1/2}
                    let shapes = [
                        (1.0 - t) * (1.0 - 2.0 * t),
                        t * (2.0 * t - 1.0),
                        4.0 * t * (1.0 - t),
                    ];
                    let dshapes = [4.0 * t - 3.0, 4.0 * t - 1.0, 4.0 - 8.0 * t];
                    let tangent = dshapes[0] * x0 + dshapes[1] * x1 + dshapes[2] * xm;
                    let jac = tangent.norm();
                    for i in 0..3 {
                        for j in 0..3 {
                            m[i][j] += w * jac * shapes[i] * shapes[j];
                        }
                    }
                }
                for i in 0..3 {
                    for j in 0..3 {
                        triplets.push((ids[i], ids[j], beta * m[i][j]));
                    }
                }
            }
        }
    }
}

impl RobinSolution {
    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn beta(&self) -> f64 {
        self.beta.beta
    }

    pub fn parameter(&self) -> RobinParameter {
        self.beta
    }

    pub fn node_values(&self) -> &[f64] {
        &self.dof_values
    }

    /// Relative algebraic residual of the solved system.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn rcond(&self) -> Option<f64> {
        self.rcond
    }

    pub fn value_at(&self, e: usize, xi: f64, eta: f64) -> f64 {
        let ids = self.mesh.element_ids(e);
        if self.mesh.order == 1 {
            let shapes = p1_shapes(xi, eta);
            ids.iter().enumerate().map(|(i, &id)| shapes[i] * self.dof_values[id]).sum()
        } else {
            let shapes = p2_shapes(xi, eta);
            ids.iter().enumerate().map(|(i, &id)| shapes[i] * self.dof_values[id]).sum()
        }
    }

    pub fn gradient_at(&self, e: usize, xi: f64, eta: f64) -> Vector2<f64> {
        let ids = self.mesh.element_ids(e);
        let map = self.mesh.map_at(e, xi, eta);
        let inv_t = map.jac.try_inverse().expect("invertible Jacobian").transpose();
        let mut g_ref = Vector2::zeros();
        if self.mesh.order == 1 {
            let grads = p1_grads();
            for (i, &id) in ids.iter().enumerate() {
                g_ref += self.dof_values[id] * Vector2::new(grads[i][0], grads[i][1]);
            }
        } else {
            let grads = p2_grads(xi, eta);
            for (i, &id) in ids.iter().enumerate() {
                g_ref += self.dof_values[id] * Vector2::new(grads[i][0], grads[i][1]);
            }
        }
        inv_t * g_ref
    }

    /// ∫_Ω f(x, u, ∇u) dx by element quadrature.
    pub fn integrate(&self, f: impl Fn(Point2<f64>, f64, Vector2<f64>) -> f64) -> f64 {
        let rule = element_rule(self.mesh.order);
        let mut total = 0.0;
        for e in 0..self.mesh.tris.len() {
            for q in rule {
                let map = self.mesh.map_at(e, q.xi, q.eta);
                let u = self.value_at(e, q.xi, q.eta);
                let g = self.gradient_at(e, q.xi, q.eta);
                total += q.weight * map.det * f(map.point, u, g);
            }
        }
        total
    }

    /// Robin torsional rigidity T_β = (1/N)∫_Ω (-u) dx.
    pub fn torsional_rigidity(&self) -> f64 {
        self.integrate(|_, u, _| -u) / SOURCE_N
    }

    /// Relative L² error against a reference solution.
    pub fn l2_error_against(&self, reference: impl Fn(Point2<f64>) -> f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        let rule = element_rule(self.mesh.order);
        for e in 0..self.mesh.tris.len() {
            for q in rule {
                let map = self.mesh.map_at(e, q.xi, q.eta);
                let u = self.value_at(e, q.xi, q.eta);
                let r = reference(map.point);
                num += q.weight * map.det * (u - r) * (u - r);
                den += q.weight * map.det * r * r;
            }
        }
        (num / den).sqrt()
    }

    /// Boundary trace at the default per-edge Gauss order (cached).
    pub fn boundary_trace(&self) -> &BoundaryTrace {
        self.trace_cache.get_or_init(|| self.boundary_trace_with(DEFAULT_TRACE_GAUSS))
    }

    /// Boundary trace with `gauss_order` points per boundary edge. FEM data
    /// is evaluated on the element edge; ν, κ and the arclength weight come
    /// from the exact curve.
    pub fn boundary_trace_with(&self, gauss_order: usize) -> BoundaryTrace {
        let g = gauss_order.clamp(2, 16);
        let rule = quadrature::gauss_legendre(g);
        let curve = &self.mesh.curve;
        let mut points = Vec::with_capacity(self.mesh.boundary_edges.len() * g);
        let mut s_start = 0.0;
        for be in &self.mesh.boundary_edges {
            let dtheta = be.theta1 - be.theta0;
            let tri = self.mesh.tris[be.tri];
            let le = be.local_edge as usize;
            let forward = tri[le] == be.v0;
            let mut edge_len = 0.0;
            for &(t, w) in &rule {
                let theta = be.theta0 + t * dtheta;
                let cp = curve.eval(theta);
                let t_local = if forward { t } else { 1.0 - t };
                let (xi, eta) = edge_ref_coords(be.local_edge, t_local);
                let u = self.value_at(be.tri, xi, eta);
                let grad = self.gradient_at(be.tri, xi, eta);
                let weight = w * dtheta * cp.speed;
                // partial arclength within the edge up to θ(t)
                let partial: f64 = rule
                    .iter()
                    .map(|&(tt, ww)| ww * t * dtheta * curve.eval(be.theta0 + tt * t * dtheta).speed)
                    .sum();
                points.push(TracePoint {
                    theta,
                    s: s_start + partial,
                    position: cp.point,
                    normal: cp.normal,
                    tangent: cp.tangent,
                    u,
                    grad,
                    du_dn: grad.dot(&cp.normal),
                    dt_u: grad.dot(&cp.tangent),
                    kappa: cp.curvature,
                    weight,
                    element: be.tri,
                    xi,
                    eta,
                });
                edge_len += weight;
            }
            s_start += edge_len;
        }
        BoundaryTrace { points }
    }

    /// Patch-averaged recovered Hessian (order-2 meshes only).
    pub fn recovered_hessian(&self) -> Result<&HessianField> {
        if self.mesh.order != 2 {
            return Err(Error::OrderTooLow);
        }
        Ok(self.hessian_cache.get_or_init(|| {
            let mesh = &self.mesh;
            let href = p2_ref_hessians();
            let mut acc = vec![SymTensor2::default(); mesh.n_nodes()];
            let mut wsum = vec![0.0f64; mesh.n_nodes()];
            let third = 1.0 / 3.0;
            for e in 0..mesh.tris.len() {
                let ids = mesh.element_ids(e);
                // Element Hessian at the centroid by the isoparametric chain
                // rule ∇²u = J⁻ᵀ(H_ref - Σ_k ∂u/∂x_k·Hess_ξ F_k)J⁻¹; the
                // geometric correction vanishes on straight elements.
                let map = mesh.map_at(e, third, third);
                let grad = self.gradient_at(e, third, third);
                let mut h_u = [0.0f64; 3];
                let mut h_fx = [0.0f64; 3];
                let mut h_fy = [0.0f64; 3];
                for (i, &id) in ids.iter().enumerate() {
                    let u = self.dof_values[id];
                    let x = mesh.nodes[id];
                    for c in 0..3 {
                        h_u[c] += u * href[i][c];
                        h_fx[c] += x.x * href[i][c];
                        h_fy[c] += x.y * href[i][c];
                    }
                }
                let eff = [
                    h_u[0] - grad.x * h_fx[0] - grad.y * h_fy[0],
                    h_u[1] - grad.x * h_fx[1] - grad.y * h_fy[1],
                    h_u[2] - grad.x * h_fx[2] - grad.y * h_fy[2],
                ];
                let jinv = map.jac.try_inverse().expect("positive element area");
                let eff_m = Matrix2::new(eff[0], eff[1], eff[1], eff[2]);
                let h_phys = jinv.transpose() * eff_m * jinv;
                let area = 0.5 * map.det;
                let h = SymTensor2 {
                    xx: h_phys[(0, 0)],
                    xy: 0.5 * (h_phys[(0, 1)] + h_phys[(1, 0)]),
                    yy: h_phys[(1, 1)],
                };
                for &v in &mesh.tris[e] {
                    acc[v].scaled_add(area, &h);
                    wsum[v] += area;
                }
            }
            for (a, &w) in acc.iter_mut().zip(&wsum) {
                if w > 0.0 {
                    let inv = 1.0 / w;
                    a.xx *= inv;
                    a.xy *= inv;
                    a.yy *= inv;
                }
            }
            HessianField { mesh: self.mesh.clone(), vertex_values: acc }
        }))
    }
}
