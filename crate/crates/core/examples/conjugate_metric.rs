//! Support function `L_λ(x, q)` of the sublevel `{H(x, ·) ≤ λ}` for a few
//! built-in Hamiltonians, with the closed-form radii that bracket it.

use supnorm::{HamiltonianSpec, Vec2};

fn main() -> supnorm::Result<()> {
    let kinds = [
        ("eikonal", HamiltonianSpec::eikonal()),
        ("power 3", HamiltonianSpec::isotropic_power(3.0)?),
        ("anisotropic diag(4, 1)", HamiltonianSpec::anisotropic([[4.0, 0.0], [0.0, 1.0]])?),
        ("plateau 0.5..0.75", HamiltonianSpec::plateau(0.5, 0.75)?),
    ];
    let x = Vec2::new(0.5, 0.5);
    for (name, spec) in &kinds {
        println!("{name}");
        for lambda in [0.25, 0.5, 1.0] {
            let row: Vec<String> = [0.0, 0.25, 0.5]
                .iter()
                .map(|t| {
                    let q = Vec2::from_angle(t * std::f64::consts::PI);
                    format!("{:.4}", spec.conjugate(x, q, lambda))
                })
                .collect();
            println!(
                "  λ = {lambda:<4}  L at 0°, 45°, 90°: {}   (inner {:.4}, outer {:.4})",
                row.join(", "),
                spec.inner_radius(lambda),
                spec.outer_radius(lambda)
            );
        }
    }
    Ok(())
}
