//! The similarity kernel close up: cosine similarity between citation
//! profiles, in both directions, with and without self-citations.
//!
//!     cargo run --example cosine_similarity

use scimap::corpus::CitationMatrix;
use scimap::simmat::{cosine_similarity, Direction};

fn main() -> scimap::Result<()> {
    // Three journals citing into a field of five. Journals 0 and 1 cite
    // almost the same journals; journal 2 cites different ones.
    let citations = CitationMatrix::from_entries(
        5,
        vec![
            // journal 0 cites 3 and 4 heavily
            (0, 3, 30),
            (0, 4, 20),
            // journal 1 cites the same two, plus itself a little
            (1, 3, 28),
            (1, 4, 25),
            (1, 1, 5),
            // journal 2 cites elsewhere
            (2, 0, 10),
            (2, 1, 12),
        ],
    )?;

    // Rows are citing profiles: "who do I cite?"
    let citing = cosine_similarity(&citations, Direction::Citing, true);
    println!("citing-side similarity (shared reference lists):");
    for (i, j, v) in citing.pairs() {
        println!("  {i} ~ {j}: {v:.4}");
    }

    // Columns are cited profiles: "who cites me?"
    let cited = cosine_similarity(&citations, Direction::Cited, true);
    println!("cited-side similarity (shared audiences):");
    for (i, j, v) in cited.pairs() {
        println!("  {i} ~ {j}: {v:.4}");
    }

    // Journal 1's self-citation cell sits on the diagonal; dropping it
    // nudges every similarity involving journal 1.
    let without = cosine_similarity(&citations, Direction::Citing, false);
    let with_self = citing.value_at(0, 1).unwrap();
    let no_self = without.value_at(0, 1).unwrap();
    println!("0 ~ 1 with self-citations {with_self:.6}, without {no_self:.6}");
    assert!(no_self > with_self, "dropping the diagonal sharpens this pair");

    // Values are true cosines: within [0, 1], and exactly 1 only for
    // identical profiles.
    assert!(citing.pairs().all(|(_, _, v)| (0.0..=1.0).contains(&v)));
    Ok(())
}
