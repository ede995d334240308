//! Curved-boundary triangulations of star-shaped domains.
//!
//! A reference disk mesh (concentric rings, ring j carrying 6j vertices,
//! ring count doubling per refinement level) is pushed through the radial
//! map (ρ, φ) ↦ z + ρ·r(φ)·(cos φ, sin φ). Boundary nodes land exactly on
//! the curve; for order-2 meshes the outermost edges are isoparametric
//! (curved) while interior elements stay straight.

use std::collections::HashMap;
use std::fmt::Write as _;

use nalgebra::{Matrix2, Point2, Vector2};

use crate::error::{Error, Result};
use crate::geometry::BoundaryCurve;
use crate::quadrature;

/// Ring count at level 0; doubles per level, so h shrinks by ~0.5 per level.
const BASE_RINGS: usize = 4;

/// A boundary edge of the outermost ring: nodes v0 → v1 traverse the curve
/// counterclockwise over the parameter interval [theta0, theta1].
#[derive(Debug, Clone, Copy)]
pub struct BoundaryEdge {
    pub tri: usize,
    /// Local edge index in the owning triangle (0: v0v1, 1: v1v2, 2: v2v0).
    pub local_edge: u8,
    pub v0: usize,
    pub v1: usize,
    /// Midside node for order-2 meshes, placed on the curve.
    pub mid: Option<usize>,
    pub theta0: f64,
    pub theta1: f64,
}

/// Immutable curved-boundary triangulation.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub curve: BoundaryCurve,
    pub nodes: Vec<Point2<f64>>,
    /// Vertex triples per triangle, counterclockwise.
    pub tris: Vec<[usize; 3]>,
    /// Midside nodes [m01, m12, m20] per triangle (order 2 only).
    pub mids: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub order: u8,
    /// Max element diameter.
    pub h: f64,
    pub level: u32,
    /// True for nodes that are triangle vertices (as opposed to midsides).
    pub is_vertex: Vec<bool>,
    /// Boundary nodes occupy the trailing index range [n_interior..].
    pub n_interior: usize,
}

/// Geometric data of the element map at a reference point.
#[derive(Debug, Clone, Copy)]
pub struct MapData {
    pub point: Point2<f64>,
    pub jac: Matrix2<f64>,
    pub det: f64,
}

// P1 shape functions on the reference triangle.
pub fn p1_shapes(xi: f64, eta: f64) -> [f64; 3] {
    [1.0 - xi - eta, xi, eta]
}

pub fn p1_grads() -> [[f64; 2]; 3] {
    [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]]
}

// P2 shape functions: vertices then midsides [m01, m12, m20].
pub fn p2_shapes(xi: f64, eta: f64) -> [f64; 6] {
    let l0 = 1.0 - xi - eta;
    [
        l0 * (2.0 * l0 - 1.0),
        xi * (2.0 * xi - 1.0),
        eta * (2.0 * eta - 1.0),
        4.0 * xi * l0,
        4.0 * xi * eta,
        4.0 * eta * l0,
    ]
}

pub fn p2_grads(xi: f64, eta: f64) -> [[f64; 2]; 6] {
    let l0 = 1.0 - xi - eta;
    [
        [1.0 - 4.0 * l0, 1.0 - 4.0 * l0],
        [4.0 * xi - 1.0, 0.0],
        [0.0, 4.0 * eta - 1.0],
        [4.0 * (l0 - xi), -4.0 * xi],
        [4.0 * eta, 4.0 * xi],
        [-4.0 * eta, 4.0 * (l0 - eta)],
    ]
}

/// Constant reference Hessians [∂ξξ, ∂ξη, ∂ηη] of the six P2 shapes.
pub fn p2_ref_hessians() -> [[f64; 3]; 6] {
    [
        [4.0, 4.0, 4.0],
        [4.0, 0.0, 0.0],
        [0.0, 0.0, 4.0],
        [-8.0, -4.0, 0.0],
        [0.0, 4.0, 0.0],
        [0.0, -4.0, -8.0],
    ]
}

impl Mesh {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_boundary_nodes(&self) -> usize {
        self.nodes.len() - self.n_interior
    }

    /// Node ids of element `e`: 3 for order 1, 6 for order 2.
    pub fn element_ids(&self, e: usize) -> Vec<usize> {
        let v = self.tris[e];
        if self.order == 1 {
            v.to_vec()
        } else {
            let m = self.mids[e];
            vec![v[0], v[1], v[2], m[0], m[1], m[2]]
        }
    }

    /// Isoparametric map of element `e` evaluated at (ξ, η).
    pub fn map_at(&self, e: usize, xi: f64, eta: f64) -> MapData {
        let ids = self.element_ids(e);
        let mut point = Vector2::zeros();
        let mut jac = Matrix2::zeros();
        if self.order == 1 {
            let shapes = p1_shapes(xi, eta);
            let grads = p1_grads();
            for (i, &id) in ids.iter().enumerate() {
                let x = self.nodes[id].coords;
                point += shapes[i] * x;
                jac += x * Vector2::new(grads[i][0], grads[i][1]).transpose();
            }
        } else {
            let shapes = p2_shapes(xi, eta);
            let grads = p2_grads(xi, eta);
            for (i, &id) in ids.iter().enumerate() {
                let x = self.nodes[id].coords;
                point += shapes[i] * x;
                jac += x * Vector2::new(grads[i][0], grads[i][1]).transpose();
            }
        }
        MapData { point: Point2::from(point), jac, det: jac.determinant() }
    }

    /// Sum of element areas by quadrature.
    pub fn area(&self) -> f64 {
        let rule = if self.order == 1 {
            quadrature::triangle_rule_deg5()
        } else {
            quadrature::triangle_rule_deg6()
        };
        let mut total = 0.0;
        for e in 0..self.tris.len() {
            for q in rule {
                total += q.weight * self.map_at(e, q.xi, q.eta).det;
            }
        }
        total
    }

    /// Plain-text export with NODES / TRIANGLES / BOUNDARY sections.
    pub fn export_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "NODES {}", self.nodes.len());
        for (i, p) in self.nodes.iter().enumerate() {
            let _ = writeln!(out, "{} {:.17e} {:.17e}", i, p.x, p.y);
        }
        let _ = writeln!(out, "TRIANGLES {}", self.tris.len());
        for (e, t) in self.tris.iter().enumerate() {
            if self.order == 1 {
                let _ = writeln!(out, "{} {} {} {}", e, t[0], t[1], t[2]);
            } else {
                let m = self.mids[e];
                let _ =
                    writeln!(out, "{} {} {} {} {} {} {}", e, t[0], t[1], t[2], m[0], m[1], m[2]);
            }
        }
        let _ = writeln!(out, "BOUNDARY {}", self.boundary_edges.len());
        for (i, be) in self.boundary_edges.iter().enumerate() {
            let _ = writeln!(out, "{} {:.17e} {:.17e}", i, be.theta0, be.theta1);
        }
        out
    }
}

/// Builds the curved triangulation of the domain bounded by `curve`.
pub fn build_mesh(curve: &BoundaryCurve, level: u32, order: u8) -> Result<Mesh> {
    if order != 1 && order != 2 {
        return Err(Error::InvalidInput(format!("unsupported element order {order}")));
    }
    let n_rings = BASE_RINGS << level;
    let center = curve.center();

    // Reference vertices: (ring, angle), center first, then ring j with 6j
    // nodes at angles 2πm/(6j).
    let mut ring_of: Vec<usize> = vec![0];
    let mut angle_of: Vec<f64> = vec![0.0];
    let mut ring_start = vec![0usize; n_rings + 1];
    for j in 1..=n_rings {
        ring_start[j] = ring_of.len();
        let count = 6 * j;
        for m in 0..count {
            ring_of.push(j);
            angle_of.push(std::f64::consts::TAU * m as f64 / count as f64);
        }
    }
    let n_vertices = ring_of.len();

    // Physical vertex positions through the radial map; reference positions
    // are kept for the orientation fix below.
    let mut nodes: Vec<Point2<f64>> = Vec::with_capacity(n_vertices);
    let mut ref_pos: Vec<Point2<f64>> = Vec::with_capacity(n_vertices);
    for i in 0..n_vertices {
        let rho = ring_of[i] as f64 / n_rings as f64;
        let phi = angle_of[i];
        ref_pos.push(Point2::new(rho * phi.cos(), rho * phi.sin()));
        if ring_of[i] == 0 {
            nodes.push(center);
        } else {
            let r = curve.radius(phi);
            nodes.push(center + rho * r * Vector2::new(phi.cos(), phi.sin()));
        }
    }

    // Annulus strips: merge the two rings by angle, advancing whichever
    // pointer has the smaller next angle (outer wins ties).
    let mut tris: Vec<[usize; 3]> = Vec::new();
    for m in 0..6 {
        tris.push([0, ring_start[1] + m, ring_start[1] + (m + 1) % 6]);
    }
    for j in 2..=n_rings {
        let n_in = 6 * (j - 1);
        let n_out = 6 * j;
        let s_in = ring_start[j - 1];
        let s_out = ring_start[j];
        let (mut i, mut o) = (0usize, 0usize);
        for _ in 0..(n_in + n_out) {
            let next_in = (i + 1) as f64 / n_in as f64;
            let next_out = (o + 1) as f64 / n_out as f64;
            if next_out <= next_in && o < n_out {
                tris.push([s_in + i % n_in, s_out + o % n_out, s_out + (o + 1) % n_out]);
                o += 1;
            } else {
                tris.push([s_in + i % n_in, s_out + o % n_out, s_in + (i + 1) % n_in]);
                i += 1;
            }
        }
        debug_assert!(i == n_in && o == n_out);
    }

    // The merge above lists the inner-advance triangles clockwise; flip to
    // counterclockwise in the reference disk. The continuous radial map
    // preserves orientation, so any remaining negative mapped Jacobian is a
    // genuine inversion and is reported, not repaired.
    for t in tris.iter_mut() {
        let [a, b, c] = *t;
        let u = ref_pos[b] - ref_pos[a];
        let v = ref_pos[c] - ref_pos[a];
        if u.x * v.y - u.y * v.x < 0.0 {
            t.swap(1, 2);
        }
    }

    // Boundary edges: consecutive outer-ring vertices; θ-intervals
    // partition [0, 2π] exactly.
    let n_b = 6 * n_rings;
    let s_out = ring_start[n_rings];
    let dtheta = std::f64::consts::TAU / n_b as f64;
    let mut boundary_pairs: HashMap<(usize, usize), usize> = HashMap::new();
    let mut boundary_edges: Vec<BoundaryEdge> = Vec::with_capacity(n_b);
    for m in 0..n_b {
        let v0 = s_out + m;
        let v1 = s_out + (m + 1) % n_b;
        boundary_pairs.insert((v0.min(v1), v0.max(v1)), m);
        boundary_edges.push(BoundaryEdge {
            tri: usize::MAX,
            local_edge: 0,
            v0,
            v1,
            mid: None,
            theta0: m as f64 * dtheta,
            theta1: (m + 1) as f64 * dtheta,
        });
    }
    for (e, t) in tris.iter().enumerate() {
        for le in 0..3u8 {
            let (a, b) = (t[le as usize], t[(le as usize + 1) % 3]);
            if let Some(&idx) = boundary_pairs.get(&(a.min(b), a.max(b))) {
                boundary_edges[idx].tri = e;
                boundary_edges[idx].local_edge = le;
            }
        }
    }
    debug_assert!(boundary_edges.iter().all(|b| b.tri != usize::MAX));

    // Midside nodes for order 2: edge midpoints, except boundary midsides
    // which sit on the curve at the parameter midpoint.
    let mut mids: Vec<[usize; 3]> = Vec::new();
    let mut node_layer: Vec<usize> = ring_of.iter().map(|&r| 2 * r).collect();
    if order == 2 {
        let mut edge_nodes: HashMap<(usize, usize), usize> = HashMap::new();
        mids.reserve(tris.len());
        for t in &tris {
            let mut m_ids = [0usize; 3];
            for le in 0..3 {
                let (a, b) = (t[le], t[(le + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let id = *edge_nodes.entry(key).or_insert_with(|| {
                    let id = nodes.len();
                    if let Some(&bidx) = boundary_pairs.get(&key) {
                        let theta_mid =
                            0.5 * (boundary_edges[bidx].theta0 + boundary_edges[bidx].theta1);
                        nodes.push(curve.eval(theta_mid).point);
                        boundary_edges[bidx].mid = Some(id);
                    } else {
                        nodes.push(Point2::from(
                            0.5 * (nodes[a].coords + nodes[b].coords),
                        ));
                    }
                    node_layer.push(ring_of[a] + ring_of[b]);
                    id
                });
                m_ids[le] = id;
            }
            mids.push(m_ids);
        }
    }

    // Renumber nodes by (layer, angle): keeps the skyline profile narrow and
    // puts boundary nodes (layer 2·n_rings) last.
    let n_total = nodes.len();
    let mut order_keys: Vec<usize> = (0..n_total).collect();
    let angle_key = |i: usize| -> f64 {
        let d = nodes[i] - center;
        if d.norm() < 1e-300 {
            0.0
        } else {
            d.y.atan2(d.x).rem_euclid(std::f64::consts::TAU)
        }
    };
    order_keys.sort_by(|&a, &b| {
        node_layer[a]
            .cmp(&node_layer[b])
            .then(angle_key(a).partial_cmp(&angle_key(b)).unwrap())
            .then(a.cmp(&b))
    });
    let mut perm = vec![0usize; n_total];
    for (new_id, &old_id) in order_keys.iter().enumerate() {
        perm[old_id] = new_id;
    }
    let mut new_nodes = vec![Point2::origin(); n_total];
    let mut new_is_vertex = vec![false; n_total];
    for old in 0..n_total {
        new_nodes[perm[old]] = nodes[old];
        new_is_vertex[perm[old]] = old < n_vertices;
    }
    for t in tris.iter_mut() {
        for v in t.iter_mut() {
            *v = perm[*v];
        }
    }
    for m in mids.iter_mut() {
        for v in m.iter_mut() {
            *v = perm[*v];
        }
    }
    for be in boundary_edges.iter_mut() {
        be.v0 = perm[be.v0];
        be.v1 = perm[be.v1];
        be.mid = be.mid.map(|m| perm[m]);
    }
    let boundary_count = node_layer.iter().filter(|&&l| l == 2 * n_rings).count();
    let n_interior = n_total - boundary_count;

    let mut h: f64 = 0.0;
    for t in &tris {
        for le in 0..3 {
            h = h.max((new_nodes[t[le]] - new_nodes[t[(le + 1) % 3]]).norm());
        }
    }

    let mesh = Mesh {
        curve: curve.clone(),
        nodes: new_nodes,
        tris,
        mids,
        boundary_edges,
        order,
        h,
        level,
        is_vertex: new_is_vertex,
        n_interior,
    };

    // No inverted elements: the Jacobian must be positive at every
    // quadrature point of every element.
    let rule = if order == 1 {
        quadrature::triangle_rule_deg5()
    } else {
        quadrature::triangle_rule_deg6()
    };
    for e in 0..mesh.tris.len() {
        for q in rule {
            let det = mesh.map_at(e, q.xi, q.eta).det;
            if det <= 0.0 {
                return Err(Error::InvertedElement { element: e, jacobian: det });
            }
        }
    }

    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::fit_log_slope;
    use std::f64::consts::PI;

    fn circle() -> BoundaryCurve {
        BoundaryCurve::circle(1.0)
    }

    fn perturbed() -> BoundaryCurve {
        BoundaryCurve::from_modes(1.0, &[(2, 0.2, 0.0)], Point2::origin()).unwrap()
    }

    #[test]
    fn boundary_nodes_lie_on_curve() {
        let mesh = build_mesh(&perturbed(), 1, 2).unwrap();
        for be in &mesh.boundary_edges {
            let p0 = mesh.curve.eval(be.theta0).point;
            assert!((mesh.nodes[be.v0] - p0).norm() < 1e-14);
            let pm = mesh.curve.eval(0.5 * (be.theta0 + be.theta1)).point;
            assert!((mesh.nodes[be.mid.unwrap()] - pm).norm() < 1e-14);
        }
        // Circle level 0: all boundary nodes at distance exactly 1.
        let disk = build_mesh(&circle(), 0, 1).unwrap();
        for be in &disk.boundary_edges {
            assert!((disk.nodes[be.v0].coords.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn boundary_nodes_are_last() {
        for order in [1u8, 2] {
            let mesh = build_mesh(&perturbed(), 1, order).unwrap();
            let n_b = mesh.n_boundary_nodes();
            assert_eq!(n_b, if order == 1 { 48 } else { 96 });
            let mut flags = vec![false; mesh.n_nodes()];
            for be in &mesh.boundary_edges {
                flags[be.v0] = true;
                flags[be.v1] = true;
                if let Some(m) = be.mid {
                    flags[m] = true;
                }
            }
            for (i, f) in flags.iter().enumerate() {
                assert_eq!(*f, i >= mesh.n_interior, "node {i}");
            }
        }
    }

    #[test]
    fn disk_area_converges_at_expected_orders() {
        let mut errs1 = Vec::new();
        let mut errs2 = Vec::new();
        let mut hs = Vec::new();
        for level in 0..4 {
            let m1 = build_mesh(&circle(), level, 1).unwrap();
            let m2 = build_mesh(&circle(), level, 2).unwrap();
            hs.push(m1.h);
            errs1.push((m1.area() - PI).abs());
            errs2.push((m2.area() - PI).abs());
        }
        let slope1 = fit_log_slope(&hs, &errs1);
        let slope2 = fit_log_slope(&hs, &errs2);
        assert!(slope1 > 1.8, "order-1 area slope {slope1}");
        assert!(slope2 > 3.5, "order-2 area slope {slope2}");
    }

    #[test]
    fn perturbed_area_matches_closed_form() {
        let mesh = build_mesh(&perturbed(), 3, 2).unwrap();
        let exact = 1.02 * PI;
        assert!((mesh.area() - exact).abs() / exact < 1e-6);
        // A coarse level-0 order-1 mesh still has positive area.
        let coarse = build_mesh(&perturbed(), 0, 1).unwrap();
        assert!(coarse.area() > 0.0);
    }

    #[test]
    fn h_ratios_below_invariant_bound() {
        let mut prev = f64::NAN;
        for level in 0..4 {
            let mesh = build_mesh(&perturbed(), level, 1).unwrap();
            if level > 0 {
                assert!(mesh.h <= 0.6 * prev, "h ratio {}", mesh.h / prev);
            }
            prev = mesh.h;
        }
    }

    #[test]
    fn boundary_intervals_partition_the_circle() {
        let mesh = build_mesh(&perturbed(), 2, 2).unwrap();
        let mut edges = mesh.boundary_edges.clone();
        edges.sort_by(|a, b| a.theta0.partial_cmp(&b.theta0).unwrap());
        assert_eq!(edges[0].theta0, 0.0);
        for w in edges.windows(2) {
            assert_eq!(w[0].theta1, w[1].theta0);
        }
        assert!((edges.last().unwrap().theta1 - std::f64::consts::TAU).abs() < 1e-15);
    }

    #[test]
    fn triangles_positively_oriented_and_counts_match() {
        let mesh = build_mesh(&perturbed(), 1, 2).unwrap();
        let n = BASE_RINGS << 1;
        assert_eq!(mesh.tris.len(), 6 * n * n);
        for e in 0..mesh.tris.len() {
            assert!(mesh.map_at(e, 1.0 / 3.0, 1.0 / 3.0).det > 0.0);
        }
    }

    #[test]
    fn wild_curve_raises_inverted_element() {
        // Positive radius but oscillating faster than the level-0 mesh can
        // follow: the straight-vertex triangles tangle.
        let wild =
            BoundaryCurve::from_modes(1.0, &[(12, 0.49, 0.0)], Point2::origin()).unwrap();
        let err = build_mesh(&wild, 0, 1).unwrap_err();
        assert!(matches!(err, Error::InvertedElement { .. }), "got {err:?}");
    }

    #[test]
    fn export_has_all_sections() {
        let mesh = build_mesh(&circle(), 0, 2).unwrap();
        let text = mesh.export_text();
        assert!(text.contains(&format!("NODES {}", mesh.n_nodes())));
        assert!(text.contains(&format!("TRIANGLES {}", mesh.tris.len())));
        assert!(text.contains(&format!("BOUNDARY {}", mesh.boundary_edges.len())));
    }
}
