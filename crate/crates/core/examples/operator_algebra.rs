//! Pointwise algebra on mixed tensors: A, symmetrization, λ and μ, and the component graph.

use mirt::grid::GridSpec;
use mirt::presets::{make_preset, PresetKind};
use mirt::tensor::{apply_a, asa, component_graph, inner_product, lambda_op, mu_op, sym_full};

fn main() -> mirt::Result<()> {
    let grid = GridSpec::centered(64, 1.0)?;
    let (_, f) = make_preset(PresetKind::Gaussian, 2, 1, &grid, 7)?;
    let (_, g) = make_preset(PresetKind::Gaussian, 2, 1, &grid, 8)?;
    let (_, w) = make_preset(PresetKind::Gaussian, 1, 0, &grid, 9)?;

    // A² = (−1)^ℓ on (2,1) fields.
    let back = apply_a(&apply_a(&f)).add(&f)?;
    println!("|A A f + f|_inf          = {:.2e}", back.max_abs());

    let lhs = inner_product(&lambda_op(&w), &f)?;
    let rhs = inner_product(&w, &mu_op(&f)?)?;
    println!("<lambda w, f> - <w, mu f> = {:.2e}", lhs - rhs);

    let sa = inner_product(&asa(&f), &g)? - inner_product(&f, &asa(&g))?;
    println!("<AsA f, g> - <f, AsA g>   = {:.2e}", sa);
    println!("|sigma A lambda w|_inf    = {:.2e}", sym_full(&apply_a(&lambda_op(&w))).max_abs());

    for (k, l) in [(0, 2), (1, 1), (3, 2)] {
        let graph = component_graph(k, l);
        println!("graph ({k},{l}): {} nodes, {} edges, connected = {}", graph.nodes.len(), graph.edges.len(), graph.connected);
    }
    Ok(())
}
