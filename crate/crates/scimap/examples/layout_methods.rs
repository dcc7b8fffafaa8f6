//! The two layout methods side by side: the constrained quadratic layout
//! used for global maps, and stress majorization used for local maps.
//!
//!     cargo run --example layout_methods

use scimap::layout::{kamada_kawai, map_frame, vos_layout, DiagonalRule, LayoutConfig};
use scimap::simmat::{SimilarityKind, SimilarityMatrix};

fn euclid(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

fn main() -> scimap::Result<()> {
    // Two tight 5-cliques joined by one weak bridge.
    let mut pairs = Vec::new();
    for a in 0..5u32 {
        for b in (a + 1)..5 {
            pairs.push((a, b, 1.0));
            pairs.push((a + 5, b + 5, 1.0));
        }
    }
    pairs.push((4, 5, 0.05));
    let sim = SimilarityMatrix::from_pairs(10, SimilarityKind::Cosine, pairs)?;

    // The quadratic layout pulls similar nodes together under a unit
    // mean-distance constraint, so cliques contract and the bridge
    // stretches.
    let layout = vos_layout(&sim, &LayoutConfig::vos(3))?;
    let c = &layout.coords;
    let intra: f64 = (0..5)
        .flat_map(|a| ((a + 1)..5).map(move |b| (a, b)))
        .map(|(a, b)| euclid(c[a], c[b]))
        .sum::<f64>()
        / 10.0;
    let inter = euclid(
        (0..5).fold((0.0, 0.0), |acc, k| (acc.0 + c[k].0 / 5.0, acc.1 + c[k].1 / 5.0)),
        (5..10).fold((0.0, 0.0), |acc, k| (acc.0 + c[k].0 / 5.0, acc.1 + c[k].1 / 5.0)),
    );
    println!("quadratic layout: mean intra-clique distance {intra:.3}, clique separation {inter:.3}");
    assert!(inter > intra, "cliques must separate further than they spread");

    // The mean distance over connected pairs is normalized to exactly 1.
    let mut total = 0.0;
    let mut edges = 0usize;
    for (i, j, _) in sim.pairs() {
        total += euclid(c[i as usize], c[j as usize]);
        edges += 1;
    }
    println!("mean connected-pair distance: {:.9}", total / edges as f64);

    // Stress majorization instead matches distances to shortest paths —
    // on a symmetric star, every leaf lands at the same radius.
    let star = SimilarityMatrix::from_pairs(
        7,
        SimilarityKind::Cosine,
        (1..7u32).map(|leaf| (0, leaf, 1.0)).collect(),
    )?;
    let star_layout = kamada_kawai(&star, &LayoutConfig::kamada_kawai(3))?;
    let radii: Vec<f64> = (1..7)
        .map(|leaf| euclid(star_layout.coords[0], star_layout.coords[leaf]))
        .collect();
    println!("star radii under stress majorization: {radii:.3?}");
    let spread = radii.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - radii.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread < 1e-3, "leaves should sit on one circle");

    // The frame of a finished map: the diagonal every distance is
    // normalized by when measuring diversity.
    let frame = map_frame(&layout.coords, DiagonalRule::Square)?;
    println!(
        "map frame: x [{:.3}, {:.3}], y [{:.3}, {:.3}], diagonal {:.3}",
        frame.x_min, frame.x_max, frame.y_min, frame.y_max, frame.diagonal
    );
    Ok(())
}
