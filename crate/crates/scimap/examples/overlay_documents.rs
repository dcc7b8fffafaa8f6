//! Projecting a document set onto a base map: RIS parsing, exact title
//! matching, logarithmic node sizes, and the files an overlay produces.
//!
//!     cargo run --example overlay_documents

use scimap::diversity::{rao_stirling, DISPARITY, SUM_CONVENTION};
use scimap::layout::DiagonalRule;
use scimap::overlay::{
    match_titles, node_size, overlay_rows, parse_ris, write_overlay_stats_to, BaseMap,
    BaseMapEntry,
};

fn entry(id: u32, title: &str, x: f64, y: f64, cluster: u32) -> BaseMapEntry {
    BaseMapEntry {
        id,
        title: title.to_string(),
        normalized_title: scimap::corpus::normalize_title(title),
        x,
        y,
        cluster,
        alternate_cluster: cluster,
        total_cited: 500,
        total_citing: 400,
    }
}

fn main() -> scimap::Result<()> {
    // A tiny base map of five positioned journals.
    let basemap = BaseMap::new(vec![
        entry(0, "Journal of Informetrics", 0.0, 0.0, 1),
        entry(1, "Scientometrics", 0.4, 0.1, 1),
        entry(2, "Research Policy", 1.8, 1.2, 2),
        entry(3, "Social Studies of Science", 2.0, 1.5, 2),
        entry(4, "NeuroImage", -1.5, 2.2, 3),
    ])?;

    // A small RIS export: the source title is the first of T2 / JF / JO.
    let ris = "\
TY  - JOUR
T2  - Scientometrics
ER  -
TY  - JOUR
T2  - SCIENTOMETRICS
ER  -
TY  - JOUR
JF  - Journal of Informetrics
ER  -
TY  - JOUR
T2  - Scientometrics
ER  -
TY  - JOUR
T2  - A Journal Nobody Mapped
ER  -
";
    let titles = parse_ris(std::io::Cursor::new(ris))?;
    let overlay = match_titles(&titles, &basemap);

    println!(
        "{} documents: {} matched over {} journals, match rate {:.4}",
        overlay.n_documents_total,
        overlay.matched_documents(),
        overlay.n_journals(),
        overlay.match_rate()
    );
    for (title, n) in &overlay.unmatched {
        println!("  unmatched: {title} ({n})");
    }

    // Node sizes grow logarithmically: n = 3 documents -> size 1.
    for &(id, n) in &overlay.counts {
        println!(
            "  journal {id}: {n} documents -> node size {:.3}",
            node_size(n)
        );
    }
    assert_eq!(node_size(3), 1.0);

    // The map file: every base-map journal exactly once; unmatched
    // journals fade to grey cluster 0 with weight 0.
    let rows = overlay_rows(&basemap, &overlay);
    let faded = rows.iter().filter(|r| r.cluster == 0).count();
    println!("map file rows: {} total, {faded} faded to grey", rows.len());

    // The statistics file, with its match-rate trailer.
    let mut stats = Vec::new();
    write_overlay_stats_to(&mut stats, &basemap, &overlay).expect("in-memory write");
    print!("{}", String::from_utf8(stats).expect("utf8"));

    // Diversity of the set over the map.
    let report = rao_stirling(&basemap, &overlay, DiagonalRule::Square, "example")?;
    println!(
        "diversity = {:.6} ({SUM_CONVENTION} over {DISPARITY})",
        report.delta
    );
    Ok(())
}
