//! Two-level boundary graphs and their derived invariants.
//!
//! Every graph here is a star: one bottom vertex, some top vertices, and
//! each edge runs from a top vertex down to the bottom vertex carrying a
//! prong `p >= 1`. An isomorphism class is therefore determined by the
//! bottom genus, the leg placement, and the multiset of top vertices, which
//! is what [`LevelGraph::canonical_encoding`] prints.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{format_rational, int, lcm_list, rat, Rational};
use crate::classes::kappa_mu;
use crate::error::{Error, Result};

/// A marked point: `label` is its 1-based index in the stratum signature.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Leg {
    pub label: usize,
    pub order: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TopVertex {
    pub genus: i64,
    /// Sorted ascending.
    pub prongs: Vec<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub legs: Vec<Leg>,
}

impl TopVertex {
    pub fn new(genus: i64, mut prongs: Vec<i64>) -> Self {
        prongs.sort_unstable();
        Self {
            genus,
            prongs,
            legs: Vec::new(),
        }
    }

    pub fn with_legs(genus: i64, prongs: Vec<i64>, mut legs: Vec<Leg>) -> Self {
        legs.sort();
        Self {
            legs,
            ..Self::new(genus, prongs)
        }
    }

    pub fn degree(&self) -> usize {
        self.prongs.len()
    }

    fn sort_key(&self) -> (i64, &[i64], &[Leg]) {
        (self.genus, &self.prongs, &self.legs)
    }
}

impl Ord for TopVertex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for TopVertex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LevelGraph {
    pub genus: i64,
    pub bottom_genus: i64,
    pub bottom_legs: Vec<Leg>,
    /// Sorted by (genus, prongs, legs).
    pub top_vertices: Vec<TopVertex>,
}

impl LevelGraph {
    /// Graph in the minimal stratum `(2g-2)`: the single leg sits on the
    /// bottom vertex.
    pub fn minimal(genus: i64, bottom_genus: i64, tops: Vec<(i64, Vec<i64>)>) -> Self {
        let top_vertices = tops
            .into_iter()
            .map(|(g, p)| TopVertex::new(g, p))
            .collect();
        Self::new(
            genus,
            bottom_genus,
            vec![Leg {
                label: 1,
                order: 2 * genus - 2,
            }],
            top_vertices,
        )
    }

    pub fn new(
        genus: i64,
        bottom_genus: i64,
        mut bottom_legs: Vec<Leg>,
        mut top_vertices: Vec<TopVertex>,
    ) -> Self {
        bottom_legs.sort();
        top_vertices.sort();
        Self {
            genus,
            bottom_genus,
            bottom_legs,
            top_vertices,
        }
    }

    /// The single-edge graph with a genus-`g-1` bottom and an elliptic top.
    pub fn elliptic_dumbbell(genus: i64) -> Self {
        Self::minimal(genus, genus - 1, vec![(1, vec![1])])
    }

    pub fn edge_count(&self) -> usize {
        self.top_vertices.iter().map(TopVertex::degree).sum()
    }

    pub fn v_top(&self) -> usize {
        self.top_vertices.len()
    }

    /// All legs of the graph, sorted by label.
    pub fn legs(&self) -> Vec<Leg> {
        let mut out = self.bottom_legs.clone();
        for t in &self.top_vertices {
            out.extend(t.legs.iter().cloned());
        }
        out.sort_by_key(|l| l.label);
        out
    }

    /// Leg orders in label order.
    pub fn signature(&self) -> Vec<i64> {
        self.legs().into_iter().map(|l| l.order).collect()
    }

    pub fn all_legs_on_bottom(&self) -> bool {
        self.top_vertices.iter().all(|t| t.legs.is_empty())
    }

    /// Prongs in canonical edge order: top vertices in sorted order, prongs
    /// ascending within each vertex.
    pub fn edge_prongs(&self) -> Vec<i64> {
        self.top_vertices
            .iter()
            .flat_map(|t| t.prongs.iter().copied())
            .collect()
    }

    /// Checks the invariant battery. Stability and nonemptiness are only
    /// examined once the balance conditions hold.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.genus < 1 {
            out.push("total genus must be positive".to_string());
        }
        if self.bottom_genus < 0 {
            out.push("negative bottom genus".to_string());
        }
        if self.top_vertices.is_empty() {
            out.push("no top vertices".to_string());
        }
        if self.top_vertices.iter().any(|t| t.prongs.is_empty()) {
            out.push("top vertex without edges".to_string());
        }
        if self.top_vertices.iter().any(|t| t.genus < 0) {
            out.push("negative top genus".to_string());
        }
        if self
            .top_vertices
            .iter()
            .flat_map(|t| &t.prongs)
            .any(|&p| p < 1)
        {
            out.push("non-positive prong".to_string());
        }
        let legs = self.legs();
        let labels_ok = legs.iter().enumerate().all(|(i, l)| l.label == i + 1);
        if legs.is_empty() || !labels_ok {
            out.push("legs must be labelled 1..n".to_string());
        }
        if legs.iter().map(|l| l.order).sum::<i64>() != 2 * self.genus - 2 {
            out.push("leg orders do not sum to 2g-2".to_string());
        }
        let top_genus: i64 = self.top_vertices.iter().map(|t| t.genus).sum();
        let e = self.edge_count() as i64;
        let v = self.v_top() as i64;
        if self.bottom_genus + top_genus + e - v != self.genus {
            out.push("genus balance violated".to_string());
        }
        for t in &self.top_vertices {
            let p: i64 = t.prongs.iter().sum();
            let legs: i64 = t.legs.iter().map(|l| l.order).sum();
            if p != 2 * t.genus - 2 + t.degree() as i64 - legs {
                out.push("prong balance violated at top vertex".to_string());
                break;
            }
        }
        if !out.is_empty() {
            return out;
        }

        let n_b = self.bottom_legs.len() as i64;
        if 2 * self.bottom_genus - 2 + n_b + e <= 0 {
            out.push("stability violated at bottom vertex".to_string());
        }
        if self
            .top_vertices
            .iter()
            .any(|t| 2 * t.genus - 2 + (t.degree() + t.legs.len()) as i64 <= 0)
        {
            out.push("stability violated at top vertex".to_string());
        }
        let (n_top, n_bot) = self.dimension_split();
        if n_bot < 1 {
            out.push("empty bottom stratum (N_bot < 1)".to_string());
        }
        if n_top < 1 {
            out.push("empty top stratum (N_top < 1)".to_string());
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// `(N^top, N^bot)`.
    pub fn dimension_split(&self) -> (i64, i64) {
        let n = 2 * self.genus + self.legs().len() as i64 - 1;
        let n_top: i64 = self
            .top_vertices
            .iter()
            .map(|t| 2 * t.genus - 1 + (t.degree() + t.legs.len()) as i64)
            .sum();
        (n_top, n - n_top)
    }

    pub fn canonical_encoding(&self) -> String {
        let single_leg = self.legs().len() == 1;
        let leg_text = |legs: &[Leg]| -> String {
            if single_leg {
                let mut orders: Vec<i64> = legs.iter().map(|l| l.order).collect();
                orders.sort_unstable();
                join(&orders)
            } else {
                legs.iter()
                    .map(|l| format!("{}@{}", l.order, l.label))
                    .collect::<Vec<_>>()
                    .join(",")
            }
        };
        let mut tops = self.top_vertices.clone();
        tops.sort();
        let tops: Vec<String> = tops
            .iter()
            .map(|t| {
                if t.legs.is_empty() {
                    format!("({},[{}])", t.genus, join(&t.prongs))
                } else {
                    format!(
                        "({},[{}];legs={})",
                        t.genus,
                        join(&t.prongs),
                        leg_text(&t.legs)
                    )
                }
            })
            .collect();
        format!(
            "g={};gb={};legs={};top=[{}]",
            self.genus,
            self.bottom_genus,
            leg_text(&self.bottom_legs),
            tops.join(",")
        )
    }

    /// Inverse of [`canonical_encoding`](Self::canonical_encoding).
    pub fn from_encoding(text: &str) -> Result<Self> {
        let bad = |why: &str| Error::MalformedGraph(format!("{why} in {text:?}"));
        let rest = text
            .trim()
            .strip_prefix("g=")
            .ok_or_else(|| bad("missing g="))?;
        let (g, rest) = rest.split_once(";gb=").ok_or_else(|| bad("missing gb="))?;
        let (gb, rest) = rest
            .split_once(";legs=")
            .ok_or_else(|| bad("missing legs="))?;
        let (legs, rest) = rest
            .split_once(";top=[")
            .ok_or_else(|| bad("missing top="))?;
        let tops = rest
            .strip_suffix(']')
            .ok_or_else(|| bad("unterminated top list"))?;
        let genus: i64 = g.parse().map_err(|_| bad("bad genus"))?;
        let bottom_genus: i64 = gb.parse().map_err(|_| bad("bad bottom genus"))?;

        let parse_legs = |s: &str| -> Result<Vec<Leg>> {
            if s.is_empty() {
                return Ok(Vec::new());
            }
            s.split(',')
                .map(|item| match item.split_once('@') {
                    Some((o, l)) => Ok(Leg {
                        order: o.parse().map_err(|_| bad("bad leg order"))?,
                        label: l.parse().map_err(|_| bad("bad leg label"))?,
                    }),
                    None => Ok(Leg {
                        order: item.parse().map_err(|_| bad("bad leg order"))?,
                        label: 1,
                    }),
                })
                .collect()
        };
        let bottom_legs = parse_legs(legs)?;

        let mut top_vertices = Vec::new();
        let mut s = tops;
        while !s.is_empty() {
            s = s.strip_prefix('(').ok_or_else(|| bad("expected '('"))?;
            let close = s.find(')').ok_or_else(|| bad("expected ')'"))?;
            let body = &s[..close];
            s = &s[close + 1..];
            s = s.strip_prefix(',').unwrap_or(s);
            let (tg, rest) = body.split_once(",[").ok_or_else(|| bad("bad top vertex"))?;
            let (prongs, tail) = rest.split_once(']').ok_or_else(|| bad("bad prong list"))?;
            let prongs: Vec<i64> = if prongs.is_empty() {
                Vec::new()
            } else {
                prongs
                    .split(',')
                    .map(|p| p.parse().map_err(|_| bad("bad prong")))
                    .collect::<Result<_>>()?
            };
            let legs = match tail.strip_prefix(";legs=") {
                Some(l) => parse_legs(l)?,
                None if tail.is_empty() => Vec::new(),
                None => return Err(bad("trailing text in top vertex")),
            };
            let tg: i64 = tg.parse().map_err(|_| bad("bad top genus"))?;
            top_vertices.push(TopVertex::with_legs(tg, prongs, legs));
        }
        Ok(Self::new(genus, bottom_genus, bottom_legs, top_vertices))
    }
}

impl fmt::Display for LevelGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_encoding())
    }
}

fn join(values: &[i64]) -> String {
    values
        .iter()
        .map(i64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum EdgeClass {
    Nct,
    Rbt,
    Oct,
    Edb,
}

impl EdgeClass {
    pub fn is_compact_type(self) -> bool {
        self != EdgeClass::Nct
    }

    /// Weight of one edge of this class in `R_NC`, before dividing by the
    /// prong.
    pub fn nc_weight(self) -> Rational {
        match self {
            EdgeClass::Nct => rat(1, 2),
            EdgeClass::Rbt => int(1),
            EdgeClass::Oct => int(2),
            EdgeClass::Edb => int(4),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeClass::Nct => "NCT",
            EdgeClass::Rbt => "RBT",
            EdgeClass::Oct => "OCT",
            EdgeClass::Edb => "EDB",
        }
    }
}

impl fmt::Display for EdgeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Boundary divisor of the moduli space of curves that an edge smooths to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DeltaTarget {
    Irr,
    Sep(i64),
}

impl fmt::Display for DeltaTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeltaTarget::Irr => f.write_str("irr"),
            DeltaTarget::Sep(i) => write!(f, "{i}"),
        }
    }
}

/// Per-edge classification, in [`LevelGraph::edge_prongs`] order.
pub fn classify_edges(graph: &LevelGraph) -> Vec<EdgeClass> {
    let single_edge = graph.edge_count() == 1;
    let lower_is_rational_point = graph.v_top() == 1 && graph.bottom_genus == 0;
    let mut out = Vec::with_capacity(graph.edge_count());
    for t in &graph.top_vertices {
        for _ in &t.prongs {
            let class = if t.degree() >= 2 {
                EdgeClass::Nct
            } else if single_edge && (t.genus == 1 || graph.bottom_genus == 1) {
                EdgeClass::Edb
            } else if lower_is_rational_point {
                EdgeClass::Rbt
            } else {
                EdgeClass::Oct
            };
            out.push(class);
        }
    }
    out
}

/// Per-edge smoothing target: a separating edge at top vertex `t` lands in
/// `Delta_min(g_t, g - g_t)`, anything else in `Delta_irr`.
pub fn delta_targets(graph: &LevelGraph) -> Vec<DeltaTarget> {
    let mut out = Vec::with_capacity(graph.edge_count());
    for t in &graph.top_vertices {
        for _ in &t.prongs {
            out.push(if t.degree() == 1 {
                DeltaTarget::Sep(t.genus.min(graph.genus - t.genus))
            } else {
                DeltaTarget::Irr
            });
        }
    }
    out
}

/// Shape proxy for the hyperelliptic banana backbone: every top vertex is
/// attached by a single edge or by two edges with equal prong, and at least
/// one such pair occurs.
pub fn hbb_shape(graph: &LevelGraph) -> bool {
    let mut pair = false;
    for t in &graph.top_vertices {
        match t.prongs.as_slice() {
            [_] => {}
            [a, b] if a == b => pair = true,
            _ => return false,
        }
    }
    pair
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantOptions {
    /// Apply the HBB shape test; when false `delta_H` is always zero.
    pub hbb_shape: bool,
}

impl Default for InvariantOptions {
    fn default() -> Self {
        Self { hbb_shape: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphInvariants {
    pub encoding: String,
    pub genus: i64,
    pub edge_count: usize,
    #[serde(rename = "P")]
    pub prong_sum: i64,
    #[serde(rename = "P_inv", with = "crate::arith::serde_rational")]
    pub prong_inv_sum: Rational,
    #[serde(with = "serde_bigint")]
    pub ell: BigInt,
    pub v_top: usize,
    #[serde(rename = "N_top")]
    pub n_top: i64,
    #[serde(rename = "N_bot")]
    pub n_bot: i64,
    #[serde(with = "crate::arith::serde_rational")]
    pub kappa_bot: Rational,
    #[serde(with = "crate::arith::serde_rational")]
    pub kappa_top: Rational,
    pub edge_prongs: Vec<i64>,
    pub edge_classes: Vec<EdgeClass>,
    pub delta_targets: Vec<DeltaTarget>,
    #[serde(rename = "R_NC", with = "crate::arith::serde_rational")]
    pub r_nc: Rational,
    #[serde(rename = "b_NC", with = "crate::arith::serde_rational")]
    pub b_nc: Rational,
    #[serde(rename = "delta_H")]
    pub delta_h: u8,
}

mod serde_bigint {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

impl GraphInvariants {
    pub fn ell_rational(&self) -> Rational {
        Rational::from_integer(self.ell.clone())
    }

    /// `P - P_{-1}`, which is also `kappa^top`.
    pub fn twist_excess(&self) -> Rational {
        int(self.prong_sum) - &self.prong_inv_sum
    }

    /// `R_Gamma = (b_NC + 1 + delta_H) / ell`.
    pub fn r_gamma(&self) -> Rational {
        (&self.b_nc + int(1) + int(self.delta_h as i64)) / self.ell_rational()
    }
}

pub fn graph_invariants(graph: &LevelGraph, opts: InvariantOptions) -> Result<GraphInvariants> {
    let violations = graph.validate();
    if !violations.is_empty() {
        return Err(Error::MalformedGraph(format!(
            "{}: {}",
            graph.canonical_encoding(),
            violations.join("; ")
        )));
    }
    let prongs = graph.edge_prongs();
    let prong_sum: i64 = prongs.iter().sum();
    let prong_inv_sum: Rational = prongs.iter().map(|&p| rat(1, p)).sum();
    let ell = BigInt::from(lcm_list(&prongs)?);
    let (n_top, n_bot) = graph.dimension_split();

    let mut bottom_sig: Vec<i64> = graph.bottom_legs.iter().map(|l| l.order).collect();
    bottom_sig.extend(prongs.iter().map(|p| -p - 1));
    let kappa_bot = kappa_mu(&bottom_sig);
    let kappa_top: Rational = graph
        .top_vertices
        .iter()
        .map(|t| {
            let mut sig: Vec<i64> = t.legs.iter().map(|l| l.order).collect();
            sig.extend(t.prongs.iter().map(|p| p - 1));
            kappa_mu(&sig)
        })
        .sum();

    let edge_classes = classify_edges(graph);
    let r_nc: Rational = edge_classes
        .iter()
        .zip(&prongs)
        .map(|(c, &p)| c.nc_weight() / int(p))
        .sum();
    let b_nc = Rational::from_integer(ell.clone()) * &r_nc - Rational::one();
    let delta_h = u8::from(opts.hbb_shape && hbb_shape(graph));

    Ok(GraphInvariants {
        encoding: graph.canonical_encoding(),
        genus: graph.genus,
        edge_count: prongs.len(),
        prong_sum,
        prong_inv_sum,
        ell,
        v_top: graph.v_top(),
        n_top,
        n_bot,
        kappa_bot,
        kappa_top,
        edge_prongs: prongs,
        delta_targets: delta_targets(graph),
        edge_classes,
        r_nc,
        b_nc,
        delta_h,
    })
}

/// Named per-graph identities for a minimal-stratum graph. Each entry is
/// `(name, holds)`; the prong bound is included as stated even though it
/// fails for the two-edge banana graphs with a rational bottom.
pub fn minimal_identity_checks(
    graph: &LevelGraph,
    inv: &GraphInvariants,
) -> Vec<(&'static str, bool)> {
    let g = graph.genus;
    let e = inv.edge_count as i64;
    let v = inv.v_top as i64;
    let kappa = kappa_mu(&[2 * g - 2]);
    let top_genus_ok = graph.top_vertices.iter().all(|t| t.genus >= 1);
    let ell_ok = graph
        .edge_prongs()
        .iter()
        .all(|p| (&inv.ell % BigInt::from(*p)).is_zero());
    vec![
        (
            "kappa_bot = kappa - (P - P_inv)",
            inv.kappa_bot == &kappa - inv.twist_excess(),
        ),
        ("kappa_top = P - P_inv", inv.kappa_top == inv.twist_excess()),
        ("N_top + N_bot = 2g", inv.n_top + inv.n_bot == 2 * g),
        (
            "N_bot = 2g_b + E - v_top",
            inv.n_bot == 2 * graph.bottom_genus + e - v,
        ),
        (
            "b_NC = ell R_NC - 1",
            inv.b_nc == inv.ell_rational() * &inv.r_nc - int(1),
        ),
        ("P <= 2g - 3", inv.prong_sum <= 2 * g - 3),
        (
            "P = 2g - 2g_b - E",
            inv.prong_sum == 2 * g - 2 * graph.bottom_genus - e,
        ),
        ("no RBT edges", !inv.edge_classes.contains(&EdgeClass::Rbt)),
        ("all top genera >= 1", top_genus_ok),
        ("ell divisible by every prong", ell_ok),
    ]
}

/// Text form of a rational-valued field, for CSV export.
pub fn csv_row(inv: &GraphInvariants) -> Vec<String> {
    vec![
        inv.encoding.clone(),
        inv.prong_sum.to_string(),
        format_rational(&inv.prong_inv_sum),
        inv.ell.to_string(),
        inv.v_top.to_string(),
        inv.n_bot.to_string(),
        format_rational(&inv.kappa_bot),
        format_rational(&inv.b_nc),
        inv.delta_h.to_string(),
        inv.edge_classes
            .iter()
            .map(|c| c.as_str())
            .collect::<Vec<_>>()
            .join(" "),
    ]
}

pub const CSV_HEADER: [&str; 10] = [
    "encoding",
    "P",
    "P_inv",
    "ell",
    "v_top",
    "N_bot",
    "kappa_bot",
    "b_NC",
    "delta_H",
    "edge_classes",
];

#[cfg(test)]
mod tests {
    use super::*;

    fn banana2() -> LevelGraph {
        LevelGraph::minimal(2, 0, vec![(1, vec![1, 1])])
    }

    #[test]
    fn encodings() {
        assert_eq!(
            LevelGraph::elliptic_dumbbell(2).canonical_encoding(),
            "g=2;gb=1;legs=2;top=[(1,[1])]"
        );
        assert_eq!(
            banana2().canonical_encoding(),
            "g=2;gb=0;legs=2;top=[(1,[1,1])]"
        );
        let a = LevelGraph::minimal(4, 1, vec![(2, vec![3]), (1, vec![1])]);
        let b = LevelGraph::minimal(4, 1, vec![(1, vec![1]), (2, vec![3])]);
        assert_eq!(a.canonical_encoding(), b.canonical_encoding());
        assert_eq!(
            a.canonical_encoding(),
            "g=4;gb=1;legs=6;top=[(1,[1]),(2,[3])]"
        );
    }

    #[test]
    fn encoding_round_trip() {
        let graphs = [
            banana2(),
            LevelGraph::minimal(5, 0, vec![(1, vec![1, 1]), (2, vec![1, 4])]),
            LevelGraph::new(
                5,
                2,
                vec![Leg { label: 1, order: 4 }],
                vec![TopVertex::with_legs(
                    1,
                    vec![5],
                    vec![Leg { label: 2, order: 4 }],
                )],
            ),
        ];
        for g in graphs {
            let text = g.canonical_encoding();
            assert_eq!(LevelGraph::from_encoding(&text).unwrap(), g, "{text}");
        }
        assert!(LevelGraph::from_encoding("g=2;gb=1").is_err());
    }

    #[test]
    fn validation_examples() {
        assert!(LevelGraph::elliptic_dumbbell(2).validate().is_empty());
        let g = LevelGraph::minimal(2, 0, vec![(1, vec![1])]);
        assert_eq!(g.validate(), vec!["genus balance violated"]);
        let g = LevelGraph::minimal(2, 0, vec![(0, vec![1, 1, 1])]);
        assert_eq!(g.validate(), vec!["prong balance violated at top vertex"]);
        let g = LevelGraph::minimal(2, 0, vec![(1, vec![1]), (1, vec![1])]);
        assert_eq!(g.validate(), vec!["empty bottom stratum (N_bot < 1)"]);
        let g = LevelGraph::minimal(2, 0, vec![(2, vec![3])]);
        assert_eq!(
            g.validate(),
            vec![
                "stability violated at bottom vertex",
                "empty bottom stratum (N_bot < 1)"
            ]
        );
    }

    #[test]
    fn edge_classes() {
        assert_eq!(
            classify_edges(&LevelGraph::elliptic_dumbbell(7)),
            vec![EdgeClass::Edb]
        );
        assert_eq!(
            classify_edges(&banana2()),
            vec![EdgeClass::Nct, EdgeClass::Nct]
        );
        let g = LevelGraph::minimal(4, 1, vec![(2, vec![3]), (1, vec![1])]);
        assert!(g.is_valid());
        assert_eq!(classify_edges(&g), vec![EdgeClass::Oct, EdgeClass::Oct]);
        // bottom genus one with a single edge is an elliptic dumbbell from below
        let g = LevelGraph::minimal(5, 1, vec![(4, vec![7])]);
        assert_eq!(classify_edges(&g), vec![EdgeClass::Edb]);
        let g = LevelGraph::minimal(5, 2, vec![(3, vec![5])]);
        assert_eq!(classify_edges(&g), vec![EdgeClass::Oct]);
    }

    #[test]
    fn invariants_of_small_graphs() {
        let inv = graph_invariants(&LevelGraph::elliptic_dumbbell(2), Default::default()).unwrap();
        assert_eq!(inv.prong_sum, 1);
        assert_eq!(inv.prong_inv_sum, int(1));
        assert_eq!(inv.ell, BigInt::from(1));
        assert_eq!((inv.v_top, inv.n_top, inv.n_bot), (1, 2, 2));
        assert_eq!(inv.kappa_bot, rat(8, 3));
        assert_eq!(inv.r_nc, int(4));
        assert_eq!(inv.b_nc, int(3));
        assert_eq!(inv.delta_h, 0);

        let inv = graph_invariants(&banana2(), Default::default()).unwrap();
        assert_eq!((inv.prong_sum, inv.n_top, inv.n_bot), (2, 3, 1));
        assert_eq!(inv.r_nc, int(1));
        assert_eq!(inv.b_nc, int(0));
        assert_eq!(inv.delta_h, 1);
        let off = graph_invariants(&banana2(), InvariantOptions { hbb_shape: false }).unwrap();
        assert_eq!(off.delta_h, 0);

        let inv = graph_invariants(&LevelGraph::elliptic_dumbbell(31), Default::default()).unwrap();
        assert_eq!(inv.kappa_bot, rat(3720, 61));
        assert_eq!(inv.twist_excess(), int(0));
        assert_eq!(inv.delta_targets, vec![DeltaTarget::Sep(1)]);
    }

    #[test]
    fn delta_targets_use_smaller_side() {
        let g = LevelGraph::minimal(6, 1, vec![(5, vec![9])]);
        assert_eq!(delta_targets(&g), vec![DeltaTarget::Sep(1)]);
        let g = LevelGraph::minimal(5, 1, vec![(1, vec![1, 1]), (2, vec![3])]);
        assert!(g.is_valid());
        assert_eq!(
            delta_targets(&g),
            vec![DeltaTarget::Irr, DeltaTarget::Irr, DeltaTarget::Sep(2)]
        );
    }

    #[test]
    fn hbb_shape_rules() {
        assert!(hbb_shape(&banana2()));
        assert!(!hbb_shape(&LevelGraph::elliptic_dumbbell(3)));
        let g = LevelGraph::minimal(4, 0, vec![(2, vec![1, 3])]);
        assert!(!hbb_shape(&g));
        let g = LevelGraph::minimal(4, 0, vec![(2, vec![2, 2])]);
        assert!(hbb_shape(&g));
    }

    #[test]
    fn banana_breaks_the_prong_bound() {
        let g = banana2();
        let inv = graph_invariants(&g, Default::default()).unwrap();
        let checks = minimal_identity_checks(&g, &inv);
        let failing: Vec<_> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
        assert_eq!(failing, vec!["P <= 2g - 3"]);
    }
}
