//! Exact identity suites over the atlas of one genus.
//!
//! Small genera are checked on the full atlas, larger ones on a seeded
//! uniform sample. A few checked statements are bounds claimed without
//! proof; those are tallied as claims and do not count against the suite.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{int, rat, Rational};
use crate::certify::{assembly_mismatches, s_hor_literal, six_coefficients, y_hor, Decomposition};
use crate::classes::{
    gen_weierstrass_class, w_gamma, w_lambda, wplus_class, ClassForm, EffectiveDivisor, Stratum,
};
use crate::enumerate::{enumerate_minimal, AtlasSampler};
use crate::error::Result;
use crate::graph::{graph_invariants, minimal_identity_checks, InvariantOptions, LevelGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Identity,
    Claim,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckTally {
    pub name: String,
    pub kind: CheckKind,
    pub checked: u64,
    pub failed: u64,
    pub first_failure: Option<String>,
}

impl CheckTally {
    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub genus: i64,
    pub graphs: u64,
    pub sampled: bool,
    pub checks: Vec<CheckTally>,
}

impl IdentityReport {
    /// All identities hold; claims are not included.
    pub fn identities_hold(&self) -> bool {
        self.checks
            .iter()
            .filter(|c| c.kind == CheckKind::Identity)
            .all(CheckTally::passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckTally> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn record(&mut self, name: &str, kind: CheckKind, ok: bool, context: impl FnOnce() -> String) {
        let idx = match self.checks.iter().position(|c| c.name == name) {
            Some(i) => i,
            None => {
                self.checks.push(CheckTally {
                    name: name.to_string(),
                    kind,
                    checked: 0,
                    failed: 0,
                    first_failure: None,
                });
                self.checks.len() - 1
            }
        };
        let tally = &mut self.checks[idx];
        tally.checked += 1;
        if !ok {
            tally.failed += 1;
            if tally.first_failure.is_none() {
                tally.first_failure = Some(context());
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IdentityConfig {
    /// Genera up to this value use the full atlas.
    pub full_atlas_max: i64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for IdentityConfig {
    fn default() -> Self {
        Self {
            full_atlas_max: 10,
            samples: 500,
            seed: 0x5eed,
        }
    }
}

pub const CLAIMED_PRONG_BOUND: &str = "P <= 2g - 3";

/// Ten exact sample points in `[0, 1]`.
pub fn sample_ys() -> Vec<Rational> {
    [
        (0, 1),
        (1, 10),
        (1, 7),
        (147, 793),
        (1, 5),
        (1, 4),
        (1, 3),
        (1, 2),
        (3, 4),
        (1, 1),
    ]
    .iter()
    .map(|&(p, q)| rat(p, q))
    .collect()
}

/// Distinct graphs drawn uniformly from the atlas, in canonical order.
pub fn sample_graphs(g: i64, count: usize, seed: u64) -> Result<Vec<LevelGraph>> {
    let sampler = AtlasSampler::new(g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (g as u64));
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for _ in 0..count {
        let graph = sampler.sample(&mut rng);
        if seen.insert(graph.canonical_encoding()) {
            out.push(graph);
        }
    }
    out.sort_by_key(|gr| gr.canonical_encoding());
    Ok(out)
}

/// Graphs the suite runs over: the full atlas or a sample.
pub fn suite_graphs(g: i64, cfg: &IdentityConfig) -> Result<(Vec<LevelGraph>, bool)> {
    if g <= cfg.full_atlas_max {
        Ok((enumerate_minimal(g)?, false))
    } else {
        Ok((sample_graphs(g, cfg.samples, cfg.seed)?, true))
    }
}

pub fn identity_report(g: i64, cfg: &IdentityConfig) -> Result<IdentityReport> {
    let (graphs, sampled) = suite_graphs(g, cfg)?;
    let mut report = IdentityReport {
        genus: g,
        graphs: graphs.len() as u64,
        sampled,
        checks: Vec::new(),
    };
    let effdiv = EffectiveDivisor::auto(g);
    let dec = Decomposition::new(g, effdiv, true)?;
    let ys = sample_ys();
    let opts = InvariantOptions::default();

    for graph in &graphs {
        let inv = graph_invariants(graph, opts)?;
        for (name, ok) in minimal_identity_checks(graph, &inv) {
            let kind = if name == CLAIMED_PRONG_BOUND {
                CheckKind::Claim
            } else {
                CheckKind::Identity
            };
            report.record(name, kind, ok, || inv.encoding.clone());
        }
        let six = six_coefficients(&inv, effdiv);
        let split = int(12) * (&six.w_hat + int(g - 1) * int(inv.v_top as i64 - 1) / int(g + 11));
        report.record(
            "12 w_Gamma / w_lambda = 12 (w_hat + (g-1)(v_top-1)/(g+11))",
            CheckKind::Identity,
            int(12) * w_gamma(g, &inv) / w_lambda(g) == split && six.w_ratio == split,
            || inv.encoding.clone(),
        );
        let s = six.s_gamma();
        let bound = &six.t1 + &six.t2;
        report.record(
            "T1 + T2 <= s_Gamma",
            CheckKind::Identity,
            ys.iter().all(|y| bound.eval(y) <= s.eval(y)),
            || inv.encoding.clone(),
        );
        if let Some(line) = dec.graph_line(graph) {
            report.record(
                "top-vertex decomposition of s_Gamma",
                CheckKind::Identity,
                line == s,
                || inv.encoding.clone(),
            );
        }
    }

    if g >= 6 {
        report.record(
            "y_hor is the root of s_hor",
            CheckKind::Identity,
            s_hor_literal(g).root() == Some(y_hor(g)?),
            || format!("g={g}"),
        );
    }

    let stratum = Stratum::minimal(g, graphs, opts)?;
    if g >= 4 {
        let raw = wplus_class(&stratum, ClassForm::Raw)?;
        let reduced = wplus_class(&stratum, ClassForm::Reduced)?;
        report.record(
            "reduce(raw W+) = reduced W+",
            CheckKind::Identity,
            raw.reduce(&stratum)? == reduced,
            || format!("g={g}"),
        );
    }
    let alpha = [g - 1];
    let raw = gen_weierstrass_class(&stratum, &alpha, ClassForm::Raw)?;
    let reduced = gen_weierstrass_class(&stratum, &alpha, ClassForm::Reduced)?;
    report.record(
        "reduce(raw generalized Weierstrass) = reduced",
        CheckKind::Identity,
        raw.reduce(&stratum)? == reduced,
        || format!("g={g}"),
    );
    if g >= 4 && effdiv.check(g).is_ok() {
        for y in &ys {
            let bad = assembly_mismatches(&stratum, y, effdiv)?;
            report.record(
                "assembled class matches s_hor and ell s_Gamma",
                CheckKind::Identity,
                bad.is_empty(),
                || format!("y={y}: {}", bad.join("; ")),
            );
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_genus_suite() {
        for g in 2..=7 {
            let r = identity_report(g, &IdentityConfig::default()).unwrap();
            assert!(r.identities_hold(), "{r:?}");
            assert!(!r.sampled);
        }
    }

    #[test]
    fn prong_bound_claim_fails_on_bananas() {
        let r = identity_report(5, &IdentityConfig::default()).unwrap();
        let claim = r.check(CLAIMED_PRONG_BOUND).unwrap();
        assert_eq!(claim.kind, CheckKind::Claim);
        assert!(claim.failed > 0);
        assert!(claim.first_failure.as_ref().unwrap().contains("gb=0"));
    }

    #[test]
    fn samples_are_deterministic() {
        let a = sample_graphs(20, 50, 7).unwrap();
        let b = sample_graphs(20, 50, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(LevelGraph::is_valid));
    }
}
