//! Canonical enumeration, counting and uniform sampling of the two-level
//! graphs of the minimal stratum.
//!
//! A top vertex of genus `g_i` with `d` edges has prongs summing to
//! `2g_i - 2 + d`, so its prong multiset is a partition of `2g_i - 2` into
//! at most `d` parts, each shifted up by one. It contributes `g_i + d - 1`
//! to the genus budget `g - g_b`. Graphs are non-decreasing sequences of
//! such vertex types, which makes each isomorphism class appear once.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{LevelGraph, TopVertex};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexType {
    pub genus: i64,
    /// Sorted ascending.
    pub prongs: Vec<i64>,
}

impl VertexType {
    pub fn degree(&self) -> i64 {
        self.prongs.len() as i64
    }

    /// Contribution `g_i + deg_i - 1` to `g - g_b`.
    pub fn weight(&self) -> i64 {
        self.genus + self.degree() - 1
    }

    pub fn to_vertex(&self) -> TopVertex {
        TopVertex::new(self.genus, self.prongs.clone())
    }
}

/// Partitions of `n` into at most `k` parts, parts non-increasing.
pub fn partitions_at_most(n: i64, k: i64) -> Vec<Vec<i64>> {
    fn rec(n: i64, k: i64, max: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        if k == 0 {
            return;
        }
        for p in (1..=max.min(n)).rev() {
            cur.push(p);
            rec(n - p, k - 1, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, n, &mut Vec::new(), &mut out);
    out
}

/// All vertex types of weight at most `max_weight`, in canonical order.
pub fn vertex_types(max_weight: i64) -> Vec<VertexType> {
    let mut out = Vec::new();
    for genus in 1..=max_weight {
        for deg in 1..=(max_weight - genus + 1) {
            for parts in partitions_at_most(2 * genus - 2, deg) {
                let mut prongs: Vec<i64> = parts.iter().map(|p| p + 1).collect();
                prongs.resize(deg as usize, 1);
                prongs.sort_unstable();
                out.push(VertexType { genus, prongs });
            }
        }
    }
    out.sort();
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumOptions {
    /// Drop graphs with `N^bot < 1`.
    pub nonempty_filter: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        Self {
            nonempty_filter: true,
        }
    }
}

/// Enumeration is split into units `(g_b, first vertex type)`; units are
/// independent and their concatenation in order is the canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct WorkUnit {
    pub bottom_genus: i64,
    pub first_type: usize,
}

#[derive(Clone, Debug)]
pub struct MinimalAtlas {
    pub genus: i64,
    pub opts: EnumOptions,
    types: Vec<VertexType>,
}

impl MinimalAtlas {
    pub fn new(genus: i64, opts: EnumOptions) -> Result<Self> {
        if genus < 2 {
            return Err(Error::GenusOutOfRange {
                genus,
                reason: "need g >= 2",
            });
        }
        Ok(Self {
            genus,
            opts,
            types: vertex_types(genus),
        })
    }

    pub fn types(&self) -> &[VertexType] {
        &self.types
    }

    pub fn work_units(&self) -> Vec<WorkUnit> {
        let mut out = Vec::new();
        for bottom_genus in 0..self.genus {
            let budget = self.genus - bottom_genus;
            for (i, t) in self.types.iter().enumerate() {
                if t.weight() <= budget {
                    out.push(WorkUnit {
                        bottom_genus,
                        first_type: i,
                    });
                }
            }
        }
        out
    }

    fn accepts(&self, bottom_genus: i64, seq: &[usize]) -> bool {
        if bottom_genus > 0 {
            return true;
        }
        let edges: i64 = seq.iter().map(|&i| self.types[i].degree()).sum();
        if self.opts.nonempty_filter {
            // N^bot = E - v here, positive iff some vertex has two edges
            seq.iter().any(|&i| self.types[i].degree() >= 2)
        } else {
            edges >= 2
        }
    }

    pub fn build(&self, bottom_genus: i64, seq: &[usize]) -> LevelGraph {
        let mut graph = LevelGraph::minimal(self.genus, bottom_genus, Vec::new());
        graph.top_vertices = seq.iter().map(|&i| self.types[i].to_vertex()).collect();
        graph
    }

    /// Visits the type-index sequences of one unit in canonical order.
    pub fn for_each_sequence_in_unit<F: FnMut(i64, &[usize])>(&self, unit: WorkUnit, mut visit: F) {
        let budget = self.genus - unit.bottom_genus;
        let w0 = self.types[unit.first_type].weight();
        if w0 > budget {
            return;
        }
        let mut seq = vec![unit.first_type];
        self.extend(unit.bottom_genus, budget - w0, &mut seq, &mut visit);
    }

    fn extend<F: FnMut(i64, &[usize])>(
        &self,
        gb: i64,
        remaining: i64,
        seq: &mut Vec<usize>,
        visit: &mut F,
    ) {
        if remaining == 0 {
            if self.accepts(gb, seq) {
                visit(gb, seq);
            }
            return;
        }
        let start = *seq.last().expect("non-empty prefix");
        for i in start..self.types.len() {
            let w = self.types[i].weight();
            if w > remaining {
                continue;
            }
            seq.push(i);
            self.extend(gb, remaining - w, seq, visit);
            seq.pop();
        }
    }

    pub fn for_each_in_unit<F: FnMut(&LevelGraph)>(&self, unit: WorkUnit, mut visit: F) {
        self.for_each_sequence_in_unit(unit, |gb, seq| visit(&self.build(gb, seq)));
    }

    pub fn for_each<F: FnMut(&LevelGraph)>(&self, mut visit: F) {
        for unit in self.work_units() {
            self.for_each_in_unit(unit, &mut visit);
        }
    }

    pub fn collect(&self) -> Vec<LevelGraph> {
        let mut out = Vec::new();
        self.for_each(|g| out.push(g.clone()));
        out
    }

    /// Maps every graph in parallel; the result is in canonical order.
    pub fn par_map<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&LevelGraph) -> T + Sync,
    {
        self.work_units()
            .into_par_iter()
            .map(|unit| {
                let mut out = Vec::new();
                self.for_each_in_unit(unit, |g| out.push(f(g)));
                out
            })
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    }
}

/// The full atlas of the minimal stratum in canonical order.
pub fn enumerate_minimal(genus: i64) -> Result<Vec<LevelGraph>> {
    Ok(MinimalAtlas::new(genus, EnumOptions::default())?.collect())
}

fn partition_count_table(n: usize, k: usize) -> Vec<Vec<BigUint>> {
    // t[n][k] = partitions of n into at most k parts
    let mut t = vec![vec![BigUint::zero(); k + 1]; n + 1];
    for row in t.iter_mut().take(n + 1) {
        row[0] = BigUint::zero();
    }
    t[0].fill(BigUint::one());
    for nn in 1..=n {
        for kk in 1..=k {
            let mut v = t[nn][kk - 1].clone();
            if nn >= kk {
                v += &t[nn - kk][kk];
            }
            t[nn][kk] = v;
        }
    }
    t
}

/// Number of vertex types of each weight `0..=max_weight`.
pub fn type_counts(max_weight: i64) -> Vec<BigUint> {
    let w = max_weight.max(0) as usize;
    let table = partition_count_table(2 * w, w + 1);
    let mut out = vec![BigUint::zero(); w + 1];
    for (weight, slot) in out.iter_mut().enumerate().skip(1) {
        for genus in 1..=weight {
            let deg = weight - genus + 1;
            *slot += &table[2 * genus - 2][deg];
        }
    }
    out
}

/// Number of graphs in the atlas, by counting multisets of vertex types.
pub fn atlas_size(genus: i64, opts: EnumOptions) -> Result<BigUint> {
    if genus < 2 {
        return Err(Error::GenusOutOfRange {
            genus,
            reason: "need g >= 2",
        });
    }
    let g = genus as usize;
    let counts = type_counts(genus);
    // multisets[w] = multisets of vertex types with total weight w
    let mut multisets = vec![BigUint::zero(); g + 1];
    multisets[0] = BigUint::one();
    // partitions[w] = multisets of degree-one types (one type per weight)
    let mut partitions = vec![BigUint::zero(); g + 1];
    partitions[0] = BigUint::one();
    for (w, count) in counts.iter().enumerate().skip(1) {
        // (1 - x^w)^(-count) = sum_k C(count + k - 1, k) x^(wk)
        let old = multisets.clone();
        let mut coeff = BigUint::one();
        for k in 1..=(g / w) {
            coeff = coeff * (count + BigUint::from(k - 1)) / BigUint::from(k);
            for total in (k * w)..=g {
                multisets[total] += &coeff * &old[total - k * w];
            }
        }
        for total in w..=g {
            let add = partitions[total - w].clone();
            partitions[total] += add;
        }
    }
    let mut total: BigUint = multisets[1..g].iter().sum();
    let excluded = if opts.nonempty_filter {
        partitions[g].clone()
    } else {
        BigUint::one()
    };
    total += &multisets[g] - excluded;
    Ok(total)
}

fn overflow() -> Error {
    Error::Degenerate("atlas too large to sample")
}

fn mul(a: u128, b: u128) -> Result<u128> {
    a.checked_mul(b).ok_or_else(overflow)
}

/// `C(n + k - 1, k)`, multisets of size `k` from `n` items.
fn multichoose(n: u128, k: u128) -> Result<u128> {
    let mut c: u128 = 1;
    for i in 0..k {
        c = mul(c, n + i)? / (i + 1);
    }
    Ok(c)
}

/// Uniform sampler over the (filtered) atlas. Works per weight class, so
/// the vertex types are never listed.
#[derive(Clone, Debug)]
pub struct AtlasSampler {
    genus: i64,
    // parts[n][m] = partitions of n with every part at most m
    parts: Vec<Vec<u128>>,
    // per_weight[w] = vertex types of weight w
    per_weight: Vec<u128>,
    // suffix[w][t] = multisets of total weight t using weights >= w
    suffix: Vec<Vec<u128>>,
    bottom_weights: Vec<u128>,
}

impl AtlasSampler {
    pub fn new(genus: i64) -> Result<Self> {
        if genus < 2 {
            return Err(Error::GenusOutOfRange {
                genus,
                reason: "need g >= 2",
            });
        }
        let g = genus as usize;
        let n_max = 2 * g;
        let mut parts = vec![vec![0u128; g + 2]; n_max + 1];
        parts[0].fill(1);
        for n in 1..=n_max {
            for m in 1..=g + 1 {
                let mut v = parts[n][m - 1];
                if n >= m {
                    v = v.checked_add(parts[n - m][m]).ok_or_else(overflow)?;
                }
                parts[n][m] = v;
            }
        }
        let mut per_weight = vec![0u128; g + 1];
        for (w, slot) in per_weight.iter_mut().enumerate().skip(1) {
            for genus_i in 1..=w {
                // at most `deg` parts is the conjugate of parts at most `deg`
                *slot += parts[2 * genus_i - 2][w - genus_i + 1];
            }
        }
        let mut suffix = vec![vec![0u128; g + 1]; g + 2];
        suffix[g + 1][0] = 1;
        for w in (1..=g).rev() {
            for total in 0..=g {
                let mut v = 0u128;
                for k in 0..=total / w {
                    let c = multichoose(per_weight[w], k as u128)?;
                    v = v
                        .checked_add(mul(c, suffix[w + 1][total - k * w])?)
                        .ok_or_else(overflow)?;
                }
                suffix[w][total] = v;
            }
        }
        let bottom_weights = (0..g)
            .map(|gb| {
                let full = suffix[1][g - gb];
                if gb == 0 {
                    // drop multisets of degree-one vertices: one type per weight
                    full - partition_count(g)
                } else {
                    full
                }
            })
            .collect();
        Ok(Self {
            genus,
            parts,
            per_weight,
            suffix,
            bottom_weights,
        })
    }

    pub fn size(&self) -> u128 {
        self.bottom_weights.iter().sum()
    }

    /// The `idx`-th vertex type of weight `w`.
    fn unrank_type(&self, w: usize, mut idx: u128) -> (i64, Vec<i64>) {
        for genus_i in 1..=w {
            let deg = w - genus_i + 1;
            let n = 2 * genus_i - 2;
            let count = self.parts[n][deg];
            if idx >= count {
                idx -= count;
                continue;
            }
            // partition of n with parts at most deg, then conjugate
            let mut rest = n;
            let mut max = deg;
            let mut small = Vec::new();
            while rest > 0 {
                let mut p = max.min(rest);
                loop {
                    let c = self.parts[rest - p][p];
                    if idx < c {
                        break;
                    }
                    idx -= c;
                    p -= 1;
                }
                small.push(p);
                rest -= p;
                max = p;
            }
            let mut prongs = vec![1i64; deg];
            for p in small {
                for slot in prongs.iter_mut().take(p) {
                    *slot += 1;
                }
            }
            prongs.sort_unstable();
            return (genus_i as i64, prongs);
        }
        unreachable!("type index out of range")
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> LevelGraph {
        loop {
            let mut r = rng.gen_range(0..self.size());
            let mut gb = 0usize;
            while r >= self.bottom_weights[gb] {
                r -= self.bottom_weights[gb];
                gb += 1;
            }
            let mut remaining = self.genus as usize - gb;
            let mut tops = Vec::new();
            let mut w = 1;
            while remaining > 0 {
                let mut r = rng.gen_range(0..self.suffix[w][remaining]);
                let mut k = 0;
                loop {
                    let c = multichoose(self.per_weight[w], k as u128).expect("checked in new")
                        * self.suffix[w + 1][remaining - k * w];
                    if r < c {
                        break;
                    }
                    r -= c;
                    k += 1;
                }
                if k > 0 {
                    // uniform k-multiset of the n types: a uniform k-subset
                    // of n + k - 1 slots, shifted down
                    let n = self.per_weight[w];
                    let mut chosen = std::collections::BTreeSet::new();
                    let span = n + k as u128 - 1;
                    for j in (span - k as u128)..span {
                        let t = rng.gen_range(0..=j);
                        if !chosen.insert(t) {
                            chosen.insert(j);
                        }
                    }
                    for (i, s) in chosen.into_iter().enumerate() {
                        tops.push(self.unrank_type(w, s - i as u128));
                    }
                }
                remaining -= k * w;
                w += 1;
            }
            if gb > 0 || tops.iter().any(|(_, p)| p.len() >= 2) {
                return LevelGraph::minimal(self.genus, gb as i64, tops);
            }
        }
    }
}

fn partition_count(n: usize) -> u128 {
    let mut p = vec![0u128; n + 1];
    p[0] = 1;
    for w in 1..=n {
        for total in w..=n {
            p[total] += p[total - w];
        }
    }
    p[n]
}
