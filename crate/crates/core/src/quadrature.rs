//! Quadrature rules: symmetric Gauss rules on the reference triangle
//! {(ξ,η): ξ,η ≥ 0, ξ+η ≤ 1} and Gauss-Legendre on [0, 1].

/// A quadrature point on the reference triangle. Weights include the
/// reference area factor 1/2, so ∫_T f ≈ Σ w_i f(ξ_i, η_i)·|J_i| on a
/// mapped element.
#[derive(Debug, Clone, Copy)]
pub struct TriPoint {
    pub xi: f64,
    pub eta: f64,
    pub weight: f64,
}

/// Degree-5 rule, 7 points (Hammer-Marlowe-Stroud).
pub fn triangle_rule_deg5() -> &'static [TriPoint] {
    const A1: f64 = 0.797_426_985_353_087_3;
    const B1: f64 = 0.101_286_507_323_456_34;
    const W1: f64 = 0.125_939_180_544_827_15 / 2.0;
    const A2: f64 = 0.059_715_871_789_769_82;
    const B2: f64 = 0.470_142_064_105_115_09;
    const W2: f64 = 0.132_394_152_788_506_18 / 2.0;
    const W0: f64 = 0.225 / 2.0;
    const THIRD: f64 = 1.0 / 3.0;
    static RULE: [TriPoint; 7] = [
        TriPoint { xi: THIRD, eta: THIRD, weight: W0 },
        TriPoint { xi: A1, eta: B1, weight: W1 },
        TriPoint { xi: B1, eta: A1, weight: W1 },
        TriPoint { xi: B1, eta: B1, weight: W1 },
        TriPoint { xi: A2, eta: B2, weight: W2 },
        TriPoint { xi: B2, eta: A2, weight: W2 },
        TriPoint { xi: B2, eta: B2, weight: W2 },
    ];
    &RULE
}

/// Degree-6 rule, 12 points (Dunavant).
pub fn triangle_rule_deg6() -> &'static [TriPoint] {
    const A1: f64 = 0.501_426_509_658_179_0;
    const B1: f64 = 0.249_286_745_170_910_4;
    const W1: f64 = 0.116_786_275_726_379_4 / 2.0;
    const A2: f64 = 0.873_821_971_016_996_0;
    const B2: f64 = 0.063_089_014_491_502_05;
    const W2: f64 = 0.050_844_906_370_206_82 / 2.0;
    const C1: f64 = 0.053_145_049_844_816_95;
    const C2: f64 = 0.310_352_451_033_784_4;
    const C3: f64 = 0.636_502_499_121_398_6;
    const W3: f64 = 0.082_851_075_618_373_38 / 2.0;
    static RULE: [TriPoint; 12] = [
        TriPoint { xi: A1, eta: B1, weight: W1 },
        TriPoint { xi: B1, eta: A1, weight: W1 },
        TriPoint { xi: B1, eta: B1, weight: W1 },
        TriPoint { xi: A2, eta: B2, weight: W2 },
        TriPoint { xi: B2, eta: A2, weight: W2 },
        TriPoint { xi: B2, eta: B2, weight: W2 },
        TriPoint { xi: C1, eta: C2, weight: W3 },
        TriPoint { xi: C2, eta: C1, weight: W3 },
        TriPoint { xi: C1, eta: C3, weight: W3 },
        TriPoint { xi: C3, eta: C1, weight: W3 },
        TriPoint { xi: C2, eta: C3, weight: W3 },
        TriPoint { xi: C3, eta: C2, weight: W3 },
    ];
    &RULE
}

/// n-point Gauss-Legendre nodes and weights on [0, 1], exact for
/// polynomials of degree 2n-1. Nodes by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push(((1.0 - x) / 2.0, w / 2.0));
    }
    rule.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    rule
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrate_monomial(rule: &[TriPoint], p: u32, q: u32) -> f64 {
        rule.iter().map(|pt| pt.weight * pt.xi.powi(p as i32) * pt.eta.powi(q as i32)).sum()
    }

    /// ∫_T ξ^p η^q = p! q! / (p+q+2)!
    fn exact_monomial(p: u32, q: u32) -> f64 {
        let fact = |n: u32| (1..=n).map(|v| v as f64).product::<f64>().max(1.0);
        fact(p) * fact(q) / fact(p + q + 2)
    }

    #[test]
    fn triangle_rules_integrate_their_degree() {
        for (rule, degree) in [(triangle_rule_deg5(), 5u32), (triangle_rule_deg6(), 6u32)] {
            for p in 0..=degree {
                for q in 0..=(degree - p) {
                    let got = integrate_monomial(rule, p, q);
                    let want = exact_monomial(p, q);
                    assert!(
                        (got - want).abs() < 1e-14,
                        "deg {degree} rule failed on ξ^{p} η^{q}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn gauss_legendre_is_exact_to_its_degree() {
        for n in [2usize, 3, 5, 8] {
            let rule = gauss_legendre(n);
            for p in 0..=(2 * n as u32 - 1) {
                let got: f64 = rule.iter().map(|&(x, w)| w * x.powi(p as i32)).sum();
                let want = 1.0 / (p as f64 + 1.0);
                assert!((got - want).abs() < 1e-13, "n={n}, x^{p}: {got} vs {want}");
            }
        }
    }
}
