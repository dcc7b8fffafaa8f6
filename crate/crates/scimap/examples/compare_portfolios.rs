//! Comparing the diversity of several document portfolios on one base
//! map: a focused set, a spread set, and what the comparison guards
//! against.
//!
//!     cargo run --example compare_portfolios

use scimap::diversity::{compare_sets, rao_stirling, write_comparison};
use scimap::layout::DiagonalRule;
use scimap::overlay::{match_titles, BaseMap, BaseMapEntry};

fn entry(id: u32, x: f64, y: f64, cluster: u32) -> BaseMapEntry {
    let title = format!("Journal {id}");
    BaseMapEntry {
        id,
        normalized_title: scimap::corpus::normalize_title(&title),
        title,
        x,
        y,
        cluster,
        alternate_cluster: cluster,
        total_cited: 100,
        total_citing: 100,
    }
}

fn main() -> scimap::Result<()> {
    // Nine journals in three well-separated camps.
    let mut entries = Vec::new();
    for k in 0..3u32 {
        let (cx, cy) = [(0.0, 0.0), (10.0, 0.0), (5.0, 8.0)][k as usize];
        for i in 0..3u32 {
            entries.push(entry(k * 3 + i, cx + i as f64 * 0.3, cy, k + 1));
        }
    }
    let basemap = BaseMap::new(entries)?;

    // A focused portfolio publishes only in the first camp; a spread one
    // hits all three equally.
    let focused: Vec<String> = ["Journal 0", "Journal 1", "Journal 2"]
        .iter()
        .flat_map(|t| std::iter::repeat_n(t.to_string(), 4))
        .collect();
    let spread: Vec<String> = (0..9).map(|i| format!("Journal {i}")).collect();

    let focused_report = rao_stirling(
        &basemap,
        &match_titles(&focused, &basemap),
        DiagonalRule::Square,
        "focused",
    )?;
    let spread_report = rao_stirling(
        &basemap,
        &match_titles(&spread, &basemap),
        DiagonalRule::Square,
        "spread",
    )?;

    // Sorted descending by diversity; the spread portfolio wins.
    let sorted = compare_sets(&[focused_report.clone(), spread_report.clone()])?;
    let mut table = Vec::new();
    write_comparison(&mut table, &sorted).expect("in-memory write");
    print!("{}", String::from_utf8(table).expect("utf8"));
    assert_eq!(sorted[0].set_name, "spread");
    assert!(sorted[0].delta > 3.0 * sorted[1].delta);

    // The comparison refuses to mix different base maps silently: the
    // fingerprint of the map travels with every report.
    let other_map = BaseMap::new(vec![entry(0, 0.0, 0.0, 1), entry(1, 1.0, 1.0, 1)])?;
    let foreign = rao_stirling(
        &other_map,
        &match_titles(&spread[..2], &other_map),
        DiagonalRule::Square,
        "foreign",
    )?;
    let err = compare_sets(&[focused_report, foreign]).unwrap_err();
    println!("mixing maps is refused: {err}");
    Ok(())
}
