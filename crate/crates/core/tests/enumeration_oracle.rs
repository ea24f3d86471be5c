mod common;

use std::collections::HashSet;

use common::brute_force;
use spincert::enumerate::{atlas_size, EnumOptions, MinimalAtlas};
use spincert::graph::LevelGraph;

fn library(g: i64, filter: bool) -> Vec<String> {
    MinimalAtlas::new(
        g,
        EnumOptions {
            nonempty_filter: filter,
        },
    )
    .unwrap()
    .collect()
    .iter()
    .map(LevelGraph::canonical_encoding)
    .collect()
}

#[test]
fn atlas_matches_brute_force() {
    for g in 2..=8 {
        for filter in [true, false] {
            let expected = brute_force(g, filter);
            let got = library(g, filter);
            let got_set: HashSet<String> = got.iter().cloned().collect();
            assert_eq!(got.len(), got_set.len(), "duplicates at g={g}");
            assert_eq!(got_set, expected, "g={g} filter={filter}");
            let counted = atlas_size(
                g,
                EnumOptions {
                    nonempty_filter: filter,
                },
            )
            .unwrap();
            assert_eq!(
                counted,
                (expected.len() as u64).into(),
                "count g={g} filter={filter}"
            );
        }
    }
}

#[test]
fn genus_two_counts() {
    assert_eq!(brute_force(2, true).len(), 2);
    assert_eq!(brute_force(2, false).len(), 3);
}

#[test]
fn every_graph_is_valid_and_round_trips() {
    for g in 2..=7 {
        for graph in MinimalAtlas::new(g, EnumOptions::default())
            .unwrap()
            .collect()
        {
            assert!(graph.is_valid(), "{}", graph.canonical_encoding());
            let back = LevelGraph::from_encoding(&graph.canonical_encoding()).unwrap();
            assert_eq!(back, graph);
        }
    }
}
