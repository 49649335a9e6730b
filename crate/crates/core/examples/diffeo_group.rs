//! The reparametrization group: composition, inversion, orientation, and
//! the separation functional Δ.
//!
//!     cargo run --example diffeo_group

use sobolev_curves::*;

fn main() -> Result<()> {
    let grid = Grid::new(128)?;
    let id = DiscreteDiffeo::identity(grid);
    let rev = DiscreteDiffeo::reversal(grid);
    let e = DiscreteDiffeo::exp_family(grid, 1.0)?;
    let h = DiscreteDiffeo::hermite(grid, 0.5, 1.5)?;

    let eh = e.compose(&h)?;
    println!("exp(1)∘hermite: {:?}", eh.orientation());
    println!("exp(1)∘reversal: {:?}", e.compose(&rev)?.orientation());

    // φ ∘ φ⁻¹ = id up to interpolation error; (φ⁻¹)' = 1/φ'(φ⁻¹)
    let inv = e.invert()?;
    let back = e.compose(&inv)?;
    let err = back.samples().iter().zip(id.samples()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("max |φ∘φ⁻¹ − id| = {err:.2e}");
    let y = 0.3;
    println!(
        "(φ⁻¹)'({y}) = {:.6}, 1/φ'(φ⁻¹({y})) = {:.6}",
        inv.derivative_at(y),
        1.0 / e.derivative_at(e.inverse_at(y))
    );

    // Δ(id, exp(a)) = |a|
    for a in [0.05, 0.5, 1.0, 2.0, -1.5] {
        let d = delta(&id, &DiscreteDiffeo::exp_family(grid, a)?)?;
        println!("Δ(id, exp({a:5})) = {d:.8}");
    }
    println!("Δ(exp(1), exp(1)∘hermite) = {:.6}", delta(&e, &eh)?);
    match delta(&id, &rev) {
        Err(err) => println!("Δ(id, reversal): {}", err.tag()),
        Ok(v) => println!("Δ(id, reversal) = {v}"),
    }
    Ok(())
}
