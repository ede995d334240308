use robin_torsion::*;
use robin_torsion::identities::*;
use std::sync::Arc;

fn main() {
    for beta in [1.0, 2.0] {
        println!("=== r=1+0.2cos2θ, beta={beta} ===");
        let c = BoundaryCurve::from_modes(1.0, &[(2, 0.2, 0.0)], nalgebra::Point2::origin()).unwrap();
        for level in 1..4u32 {
            let mesh = Arc::new(build_mesh(&c, level, 2).unwrap());
            let sol = solve_robin(&mesh, RobinParameter::unchecked(beta).unwrap()).unwrap();
            let f = fundamental_identity(&sol).unwrap();
            let s = sbt_identity(&sol).unwrap();
            let se = serrin_identity(&sol).unwrap();
            println!("L{level}: fund lhs={:+.5e} rhs={:+.5e} rel={:.3e} | sbt rel={:.3e} | serrin gap={:+.5e}",
                f.lhs, f.rhs, f.rel_gap, s.rel_gap, se.lhs - se.rhs);
        }
    }
    println!("=== ellipse a=1.3 b=1/1.3, beta=1 ===");
    let (e, _) = BoundaryCurve::ellipse(1.3, 1.0/1.3).unwrap();
    for level in 1..4u32 {
        let mesh = Arc::new(build_mesh(&e, level, 2).unwrap());
        let sol = solve_robin(&mesh, RobinParameter::unchecked(1.0).unwrap()).unwrap();
        let f = fundamental_identity(&sol).unwrap();
        println!("L{level}: fund rel={:.3e} abs={:.3e} floor={:.3e}", f.rel_gap, f.abs_gap, f.rel_floor);
    }
    // serrin on balls (criterion 4)
    println!("=== serrin identity on balls ===");
    for (r, beta) in [(1.0, 1.0), (2.0, 0.5)] {
        let c = BoundaryCurve::circle(r);
        for level in 1..4u32 {
            let mesh = Arc::new(build_mesh(&c, level, 2).unwrap());
            let sol = solve_robin(&mesh, RobinParameter::unchecked(beta).unwrap()).unwrap();
            let se = serrin_identity(&sol).unwrap();
            let ge = se.rel_floor / 1e-3; // not exactly grad energy; print raw
            println!("R={r} beta={beta} L{level}: lhs={:+.3e} rhs={:+.3e} (1e-3*gradE≈{:.3e})", se.lhs, se.rhs, 1e-3*ge*1e-3*0.0 + se.rel_floor);
        }
    }
}
