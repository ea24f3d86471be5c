//! Pullback of divisor classes from the stratum `mu` in genus `g+1` to the
//! minimal stratum in genus `g`, along the map that glues an elliptic tail
//! at the zero.
//!
//! On classes: `lambda -> lambda`, `psi_i -> 0`, `xi -> xi`, `D_h -> D_h`,
//! `D_{Gamma_1} -> -psi`, and a boundary graph with all legs on its bottom
//! vertex goes to the graph with one less bottom genus and the legs merged
//! into a single zero of order `2g-2`. Every other boundary graph goes to 0.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{int, rat, serde_rational, Rational};
use crate::classes::{
    exceptional_multiplicity, gen_weierstrass_class, twist_improvement_bound, wplus_class,
    ClassForm, DivisorClass, Stratum,
};
use crate::enumerate::enumerate_minimal;
use crate::error::{Error, Result};
use crate::graph::{graph_invariants, InvariantOptions, Leg, LevelGraph, TopVertex};
use crate::linseries::saturated_partition;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PulledGraph {
    Zero,
    Gamma1,
    Graph(LevelGraph),
}

fn legs_for(mu: &[i64]) -> Vec<Leg> {
    mu.iter()
        .enumerate()
        .map(|(i, &order)| Leg {
            label: i + 1,
            order,
        })
        .collect()
}

/// The exceptional graph in genus `g+1`: a genus-`g` top vertex joined by
/// one edge of prong `2g-1` to a genus-one bottom carrying every leg.
pub fn gamma1(g: i64, mu: &[i64]) -> LevelGraph {
    LevelGraph::new(
        g + 1,
        1,
        legs_for(mu),
        vec![TopVertex::new(g, vec![2 * g - 1])],
    )
}

pub fn is_gamma1(delta: &LevelGraph) -> bool {
    let g = delta.genus - 1;
    delta.bottom_genus == 1
        && delta.all_legs_on_bottom()
        && delta.top_vertices.len() == 1
        && delta.top_vertices[0].genus == g
        && delta.top_vertices[0].prongs == [2 * g - 1]
}

pub fn zeta_pull_graph(delta: &LevelGraph) -> Result<PulledGraph> {
    let violations = delta.validate();
    if !violations.is_empty() {
        return Err(Error::MalformedGraph(format!(
            "{}: {}",
            delta.canonical_encoding(),
            violations.join("; ")
        )));
    }
    if is_gamma1(delta) {
        return Ok(PulledGraph::Gamma1);
    }
    if !delta.all_legs_on_bottom() || delta.bottom_genus == 0 {
        return Ok(PulledGraph::Zero);
    }
    let g = delta.genus - 1;
    let mut out = LevelGraph::minimal(g, delta.bottom_genus - 1, Vec::new());
    out.top_vertices = delta.top_vertices.clone();
    if !out.is_valid() {
        return Ok(PulledGraph::Zero);
    }
    debug_assert_eq!(out.edge_prongs(), delta.edge_prongs());
    Ok(PulledGraph::Graph(out))
}

/// Inverse of [`zeta_pull_graph`] on graphs of the minimal stratum: raise the
/// bottom genus by one and split the zero into `mu`.
pub fn lift_graph(graph: &LevelGraph, mu: &[i64]) -> Result<LevelGraph> {
    if mu.iter().sum::<i64>() != 2 * graph.genus {
        return Err(Error::InvalidSignature(format!(
            "{mu:?} does not sum to 2g = {}",
            2 * graph.genus
        )));
    }
    if !graph.all_legs_on_bottom() || graph.legs().len() != 1 {
        return Err(Error::MalformedGraph(
            "lifting needs a minimal-stratum graph".into(),
        ));
    }
    Ok(LevelGraph::new(
        graph.genus + 1,
        graph.bottom_genus + 1,
        legs_for(mu),
        graph.top_vertices.clone(),
    ))
}

/// The genus-`g+1` graphs that matter for the pullback: the exceptional
/// graph and the lift of every genus-`g` graph.
pub fn correspondence(
    g: i64,
    mu: &[i64],
    atlas: &[LevelGraph],
    opts: InvariantOptions,
) -> Result<Stratum> {
    let mut graphs = vec![gamma1(g, mu)];
    for graph in atlas {
        graphs.push(lift_graph(graph, mu)?);
    }
    Stratum::new(g + 1, mu.to_vec(), graphs, opts)
}

/// Pulls a class on `source` (genus `g+1`) back to the minimal stratum in
/// genus `g`.
pub fn zeta_pull_class(c: &DivisorClass, source: &Stratum) -> Result<DivisorClass> {
    let mut out = DivisorClass {
        lambda: c.lambda.clone(),
        psi: vec![Rational::zero()],
        xi: c.xi.clone(),
        d_h: c.d_h.clone(),
        boundary: BTreeMap::new(),
    };
    for (key, coeff) in &c.boundary {
        let graph = match source.get(key) {
            Some(sg) => sg.graph.clone(),
            None => LevelGraph::from_encoding(key)?,
        };
        match zeta_pull_graph(&graph)? {
            PulledGraph::Zero => {}
            PulledGraph::Gamma1 => out.psi[0] -= coeff,
            PulledGraph::Graph(h) => out.add_boundary(&h.canonical_encoding(), coeff.clone()),
        }
    }
    Ok(out.pruned())
}

/// The genus-`g+1` class: generalized Weierstrass for the saturated
/// partition minus the exceptional graph with its exact multiplicity and
/// every other correspondence graph with its twist bound plus the
/// `ell (v_top - 1)/2` vanishing term.
pub fn saturated_weierstrass_class(source: &Stratum, alpha: &[i64]) -> Result<DivisorClass> {
    let g = source.genus - 1;
    let mut out = gen_weierstrass_class(source, alpha, ClassForm::Raw)?;
    for sg in &source.graphs {
        let coeff = if is_gamma1(&sg.graph) {
            exceptional_multiplicity(g)
        } else {
            let alpha_bot: i64 = sg.bottom_labels.iter().map(|&l| alpha[l - 1]).sum();
            let m_bot: i64 = sg
                .bottom_labels
                .iter()
                .map(|&l| source.signature[l - 1])
                .sum();
            twist_improvement_bound(&sg.inv, &int(alpha_bot), &int(m_bot))
                + sg.inv.ell_rational() * rat(sg.inv.v_top as i64 - 1, 2)
        };
        out.add_boundary(&sg.inv.encoding, -coeff);
    }
    Ok(out.pruned())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationReport {
    #[serde(rename = "match")]
    pub matched: bool,
    pub coordinate_diffs: BTreeMap<String, DiffValue>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DiffValue(#[serde(with = "serde_rational")] pub Rational);

/// Coordinates of `a - b`: the scalar symbols always, boundary entries only
/// where they differ.
pub fn coordinate_diffs(a: &DivisorClass, b: &DivisorClass) -> Result<BTreeMap<String, DiffValue>> {
    let d = a.sub(b)?;
    let mut out = BTreeMap::new();
    out.insert("lambda".to_string(), DiffValue(d.lambda.clone()));
    out.insert("xi".to_string(), DiffValue(d.xi.clone()));
    out.insert("d_h".to_string(), DiffValue(d.d_h.clone()));
    for (i, p) in d.psi.iter().enumerate() {
        let name = if d.psi.len() == 1 {
            "psi".to_string()
        } else {
            format!("psi_{}", i + 1)
        };
        out.insert(name, DiffValue(p.clone()));
    }
    for (k, v) in &d.boundary {
        out.insert(format!("D[{k}]"), DiffValue(v.clone()));
    }
    Ok(out)
}

fn check_mu(g: i64, mu: &[i64]) -> Result<()> {
    if g < 2 {
        return Err(Error::GenusOutOfRange {
            genus: g,
            reason: "need g >= 2",
        });
    }
    if mu.is_empty() || mu.iter().any(|&m| m < 1) || mu.iter().sum::<i64>() != 2 * g {
        return Err(Error::InvalidSignature(format!(
            "{mu:?} is not a positive partition of 2g = {}",
            2 * g
        )));
    }
    Ok(())
}

/// Builds the genus-`g+1` class for `(mu, k)`, pulls it back and compares it
/// with the raw extra-vanishing Weierstrass class in genus `g`.
pub fn wplus_derivation_check(g: i64, mu: &[i64], k: usize) -> Result<DerivationReport> {
    check_mu(g, mu)?;
    let alpha = saturated_partition(mu, k)?;
    let opts = InvariantOptions::default();
    let atlas = enumerate_minimal(g)?;
    let target_stratum = Stratum::minimal(g, atlas.clone(), opts)?;
    let source = correspondence(g, mu, &atlas, opts)?;
    let pulled = zeta_pull_class(&saturated_weierstrass_class(&source, &alpha)?, &source)?;
    let target = wplus_class(&target_stratum, ClassForm::Raw)?;
    let diffs = coordinate_diffs(&pulled, &target)?;
    Ok(DerivationReport {
        matched: diffs.values().all(|d| d.0.is_zero()),
        coordinate_diffs: diffs,
    })
}

/// Expands `xi` on both sides over the correspondence and compares the
/// reduced classes in genus `g`.
pub fn xi_identity_check(g: i64, mu: &[i64]) -> Result<bool> {
    check_mu(g, mu)?;
    let opts = InvariantOptions::default();
    let atlas = enumerate_minimal(g)?;
    let target = Stratum::minimal(g, atlas.clone(), opts)?;
    let source = correspondence(g, mu, &atlas, opts)?;

    // xi = (m_1 + 1) psi_1 - sum over graphs with leg 1 below of ell D
    let mut upstairs = DivisorClass::zero(mu.len());
    upstairs.psi[0] = int(mu[0] + 1);
    for sg in &source.graphs {
        if sg.bottom_labels.contains(&1) {
            upstairs.add_boundary(&sg.inv.encoding, -sg.inv.ell_rational());
        }
    }
    let pulled = zeta_pull_class(&upstairs, &source)?;

    let mut downstairs = DivisorClass::zero(1);
    downstairs.psi[0] = int(2 * g - 1);
    for sg in &target.graphs {
        downstairs.add_boundary(&sg.inv.encoding, -sg.inv.ell_rational());
    }
    Ok(pulled.reduce(&target)? == downstairs.pruned().reduce(&target)?)
}

/// Sanity data for the exceptional graph: its twist bound and multiplicity.
pub fn gamma1_bounds(g: i64, mu: &[i64]) -> Result<(Rational, Rational)> {
    check_mu(g, mu)?;
    let inv = graph_invariants(&gamma1(g, mu), InvariantOptions::default())?;
    Ok((
        twist_improvement_bound(&inv, &int(g), &int(2 * g)),
        exceptional_multiplicity(g),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_rules() {
        let g = 6;
        let mu = [g, g];
        assert_eq!(
            zeta_pull_graph(&gamma1(g, &mu)).unwrap(),
            PulledGraph::Gamma1
        );

        let delta = LevelGraph::new(
            g + 1,
            2,
            legs_for(&mu),
            vec![TopVertex::new(g - 1, vec![2 * g - 3])],
        );
        let expected = LevelGraph::minimal(g, 1, vec![(g - 1, vec![2 * g - 3])]);
        assert_eq!(
            zeta_pull_graph(&delta).unwrap(),
            PulledGraph::Graph(expected.clone())
        );
        assert_eq!(lift_graph(&expected, &mu).unwrap(), delta);

        // leg 2 on a top vertex
        let top = TopVertex::with_legs(4, vec![1], vec![Leg { label: 2, order: 6 }]);
        let delta = LevelGraph::new(7, 3, vec![Leg { label: 1, order: 6 }], vec![top]);
        assert!(delta.is_valid(), "{:?}", delta.validate());
        assert_eq!(zeta_pull_graph(&delta).unwrap(), PulledGraph::Zero);

        let bad = LevelGraph::new(7, 0, legs_for(&mu), vec![TopVertex::new(1, vec![1])]);
        assert!(zeta_pull_graph(&bad).is_err());
    }

    #[test]
    fn class_rules() {
        let g = 4;
        let mu = [4, 4];
        let atlas = enumerate_minimal(g).unwrap();
        let source = correspondence(g, &mu, &atlas, Default::default()).unwrap();

        let lam = DivisorClass::lambda(2);
        assert_eq!(
            zeta_pull_class(&lam, &source).unwrap(),
            DivisorClass::lambda(1)
        );

        let mut d1 = DivisorClass::zero(2);
        d1.add_boundary(&gamma1(g, &mu).canonical_encoding(), int(1));
        let pulled = zeta_pull_class(&d1, &source).unwrap();
        assert_eq!(pulled.psi, vec![int(-1)]);
        assert!(pulled.boundary.is_empty());

        let mut psis = DivisorClass::zero(2);
        psis.psi = vec![int(1), int(1)];
        assert_eq!(
            zeta_pull_class(&psis, &source).unwrap(),
            DivisorClass::zero(1)
        );
    }

    #[test]
    fn derivation_small() {
        let report = wplus_derivation_check(4, &[4, 4], 1).unwrap();
        assert!(report.matched, "{report:?}");
        assert_eq!(report.coordinate_diffs["psi"].0, int(0));
        assert!(wplus_derivation_check(4, &[5, 3], 1).is_err());
        assert!(wplus_derivation_check(4, &[4, 3], 1).is_err());
    }

    #[test]
    fn xi_identity_small() {
        for g in 2..=6 {
            assert!(xi_identity_check(g, &[g, g]).unwrap());
        }
    }
}
