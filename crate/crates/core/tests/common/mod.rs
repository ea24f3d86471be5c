//! Brute-force oracle for the atlas: every assignment of prongs to every
//! choice of top vertices, deduplicated through a sorted normal form.

use std::collections::HashSet;

/// All prong vectors of length `deg` with entries >= 1 summing to `total`,
/// as compositions (order matters, duplicates removed later).
fn compositions(total: i64, deg: usize) -> Vec<Vec<i64>> {
    if deg == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total {
        for mut rest in compositions(total - first, deg - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

type Vertex = (i64, Vec<i64>);

fn normal_form(gb: i64, mut tops: Vec<Vertex>) -> (i64, Vec<Vertex>) {
    for t in tops.iter_mut() {
        t.1.sort();
    }
    tops.sort();
    (gb, tops)
}

fn encode(g: i64, gb: i64, tops: &[Vertex]) -> String {
    let items: Vec<String> = tops
        .iter()
        .map(|(genus, prongs)| {
            let ps: Vec<String> = prongs.iter().map(|p| p.to_string()).collect();
            format!("({genus},[{}])", ps.join(","))
        })
        .collect();
    format!("g={g};gb={gb};legs={};top=[{}]", 2 * g - 2, items.join(","))
}

/// The genus of a candidate is `g_b + sum g_i + h^1` with `h^1 = E - V + 1`.
pub fn brute_force(g: i64, filter: bool) -> HashSet<String> {
    // top vertices: genus >= 1, degree >= 1, prongs summing to
    // 2g_i - 2 + deg; one vertex raises the genus by genus_i + deg - 1,
    // which bounds the degree
    let mut vertices: Vec<Vertex> = Vec::new();
    for genus in 1..=g {
        for deg in 1..=(g - genus + 1) as usize {
            for c in compositions(2 * genus - 2 + deg as i64, deg) {
                vertices.push((genus, c));
            }
        }
    }
    let mut seen = HashSet::new();
    for gb in 0..g {
        let mut stack: Vec<(Vec<usize>, i64)> = vec![(vec![], 0)];
        while let Some((chosen, top_genus)) = stack.pop() {
            let tops: Vec<Vertex> = chosen.iter().map(|&i| vertices[i].clone()).collect();
            let e: i64 = tops.iter().map(|t| t.1.len() as i64).sum();
            let v = tops.len() as i64;
            let h1 = e - (v + 1) + 1;
            let total_genus = gb + top_genus + h1;
            if !tops.is_empty() && total_genus == g {
                let bottom_stable = 2 * gb - 2 + 1 + e > 0;
                let n_bot = 2 * gb + e - v;
                if bottom_stable && (!filter || n_bot >= 1) {
                    let (gb2, nf) = normal_form(gb, tops.clone());
                    seen.insert(encode(g, gb2, &nf));
                }
            }
            if total_genus >= g {
                continue;
            }
            let start = chosen.last().copied().unwrap_or(0);
            for (i, (genus_i, prongs)) in vertices.iter().enumerate().skip(start) {
                // adding a vertex raises the genus by genus_i + deg - 1
                if total_genus + genus_i + prongs.len() as i64 - 1 <= g {
                    let mut next = chosen.clone();
                    next.push(i);
                    stack.push((next, top_genus + genus_i));
                }
            }
        }
    }
    seen
}
