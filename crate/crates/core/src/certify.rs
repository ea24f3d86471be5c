//! Positivity certificates for the convex combination
//! `(kappa/2g)(K - D_NC) - (12y/w_lambda) W+ - (1-y) 2 E`, where `E` is the
//! Brill-Noether or Hurwitz class.
//!
//! Its `D_h` coefficient is `s_hor(y)` and its `D_Gamma` coefficient is
//! `ell_Gamma s_Gamma(y)`; a certificate exhibits `y` in `[0, 1]` making all
//! of them strictly positive.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{
    affine_positivity_interval, format_rational, int, intersect_all, rat, serde_rational_opt,
    AffineInY, Rational, RationalInterval,
};
use crate::classes::{
    canonical_scale, d_nc_class, effective_class, kappa_mu, scaled_canonical_class, w_gamma, w_hor,
    w_lambda, wplus_class, ClassForm, DivisorClass, EffectiveDivisor, Stratum,
};
use crate::enumerate::{atlas_size, partitions_at_most, EnumOptions, MinimalAtlas, VertexType};
use crate::envelope::Envelope;
use crate::error::{Error, Result};
use crate::graph::{
    graph_invariants, DeltaTarget, EdgeClass, GraphInvariants, InvariantOptions, LevelGraph,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Coarse,
    Exact,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Coarse => "coarse",
            Mode::Exact => "exact",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffDivChoice {
    Auto,
    BrillNoether,
    Hurwitz,
}

impl EffDivChoice {
    pub fn resolve(self, g: i64) -> EffectiveDivisor {
        match self {
            EffDivChoice::Auto => EffectiveDivisor::auto(g),
            EffDivChoice::BrillNoether => EffectiveDivisor::BrillNoether,
            EffDivChoice::Hurwitz => EffectiveDivisor::Hurwitz,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YPolicy {
    AutoMidpoint,
    PaperRecipe,
    Fixed(#[serde(with = "crate::arith::serde_rational")] Rational),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactStrategy {
    /// Streaming for small atlases, decomposition otherwise.
    Auto,
    /// Evaluate every graph of the atlas.
    Stream,
    /// Additive decomposition over top vertices with an envelope DP.
    Decomposed,
}

/// Atlases up to this size are streamed graph by graph under
/// [`ExactStrategy::Auto`].
pub const STREAM_LIMIT: u128 = 200_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertRequest {
    pub genus: i64,
    pub mode: Mode,
    pub effective_divisor: EffDivChoice,
    pub y_policy: YPolicy,
    pub hbb_shape: bool,
    pub strategy: ExactStrategy,
}

impl CertRequest {
    pub fn new(genus: i64, mode: Mode) -> Self {
        Self {
            genus,
            mode,
            effective_divisor: EffDivChoice::Auto,
            y_policy: match mode {
                Mode::Coarse => YPolicy::PaperRecipe,
                Mode::Exact => YPolicy::AutoMidpoint,
            },
            hbb_shape: true,
            strategy: ExactStrategy::Auto,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Certified,
    Infeasible,
    CoarseBoundsConflict,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Certified => "certified",
            Status::Infeasible => "infeasible",
            Status::CoarseBoundsConflict => "coarse_bounds_conflict",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub genus: i64,
    pub mode: Mode,
    pub effective_divisor: EffectiveDivisor,
    #[serde(with = "serde_rational_opt")]
    pub y: Option<Rational>,
    pub feasible: RationalInterval,
    pub graph_count: u128,
    pub worst_graph: Option<String>,
    #[serde(with = "serde_rational_opt")]
    pub worst_margin: Option<Rational>,
    pub status: Status,
    pub notes: Vec<String>,
}

fn horizontal_line(g: i64, h: Rational) -> AffineInY {
    let f = canonical_scale(g);
    let twelve_w = rat(3 * (g + 3), g + 11);
    AffineInY::new(int(-1) - &f + int(2) * &h, twelve_w - int(2) * h)
}

/// `s_hor(y) = -1 - (2g-2)/(2g-1) + y 12 w_hor/w_lambda + (2-2y) H`.
pub fn s_hor_affine(g: i64, effdiv: EffectiveDivisor) -> Result<AffineInY> {
    effdiv.check(g)?;
    Ok(horizontal_line(g, effdiv.horizontal(g)))
}

/// The Brill-Noether form of `s_hor` without the parity check; this is what
/// the closed-form thresholds are written against.
pub fn s_hor_literal(g: i64) -> AffineInY {
    horizontal_line(g, EffectiveDivisor::BrillNoether.horizontal(g))
}

/// `(7g+77)/(2g^2-11g+5)`, the threshold above which `s_hor` is positive.
pub fn y_hor(g: i64) -> Result<Rational> {
    let denom = 2 * g * g - 11 * g + 5;
    if denom <= 0 {
        return Err(Error::Degenerate(
            "2g^2 - 11g + 5 must be positive (g >= 6)",
        ));
    }
    Ok(rat(7 * g + 77, denom))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SixCoefficients {
    pub c_gamma: Rational,
    pub r_gamma: Rational,
    pub b_gamma: Rational,
    /// `12 w_Gamma / w_lambda`.
    pub w_ratio: Rational,
    /// `(2g - 2 - P + P_{-1})/(g + 11)`.
    pub w_hat: Rational,
    pub t1: AffineInY,
    pub t2: AffineInY,
}

impl SixCoefficients {
    pub fn s_gamma(&self) -> AffineInY {
        AffineInY::new(&self.c_gamma + &self.b_gamma, &self.w_ratio - &self.b_gamma)
    }
}

pub fn six_coefficients(inv: &GraphInvariants, effdiv: EffectiveDivisor) -> SixCoefficients {
    let g = inv.genus;
    let f = canonical_scale(g);
    let r_gamma = inv.r_gamma();
    let c_gamma = &f * (int(inv.n_bot) - &r_gamma) - &inv.kappa_bot;
    let b_gamma = int(2) * effdiv.boundary_weight(g, inv) / inv.ell_rational();
    let w_ratio = int(12) * w_gamma(g, inv) / w_lambda(g);
    let w_hat = (int(2 * g - 2) - inv.twist_excess()) / int(g + 11);
    let v1 = int(inv.v_top as i64 - 1);
    let t1 = AffineInY::new(
        -(&f * &v1) + &b_gamma - &inv.prong_inv_sum - &f * &r_gamma,
        rat(12 * (g - 1), g + 11) * &v1 - &b_gamma,
    );
    let t2 = AffineInY::new(rat(inv.prong_sum, 2 * g - 1) - &f, int(12) * &w_hat);
    SixCoefficients {
        c_gamma,
        r_gamma,
        b_gamma,
        w_ratio,
        w_hat,
        t1,
        t2,
    }
}

/// `s_Gamma(y) = c_Gamma + y 12 w_Gamma/w_lambda + (1-y) b_Gamma`.
pub fn s_gamma_affine(inv: &GraphInvariants, effdiv: EffectiveDivisor) -> Result<AffineInY> {
    check_parity(inv.genus, effdiv)?;
    Ok(six_coefficients(inv, effdiv).s_gamma())
}

/// Parity only; the certifier also explores genera below the range where
/// the Hurwitz class is established.
fn check_parity(g: i64, effdiv: EffectiveDivisor) -> Result<()> {
    match effdiv.check(g) {
        Err(e @ Error::ParityMismatch { .. }) => Err(e),
        _ if g < 2 => Err(Error::GenusOutOfRange {
            genus: g,
            reason: "need g >= 2",
        }),
        _ => Ok(()),
    }
}

/// The assembled combination over `stratum`, in the reduced basis.
pub fn assembled_class(
    stratum: &Stratum,
    y: &Rational,
    effdiv: EffectiveDivisor,
) -> Result<DivisorClass> {
    let g = stratum.genus;
    let f = canonical_scale(g);
    let k = scaled_canonical_class(stratum)?;
    let nc = d_nc_class(stratum)?;
    let w = wplus_class(stratum, ClassForm::Reduced)?;
    let e = effective_class(stratum, effdiv)?;
    k.sub(&nc.scale(&f))?
        .sub(&w.scale(&(int(12) * y / w_lambda(g))))?
        .sub(&e.scale(&(int(2) * (int(1) - y))))
}

/// Compares the assembled class with `s_hor` and `ell s_Gamma` coordinate by
/// coordinate; returns the list of mismatches.
pub fn assembly_mismatches(
    stratum: &Stratum,
    y: &Rational,
    effdiv: EffectiveDivisor,
) -> Result<Vec<String>> {
    let c = assembled_class(stratum, y, effdiv)?;
    let mut out = Vec::new();
    if !c.lambda.is_zero() {
        out.push(format!(
            "lambda coefficient {} is not 0",
            format_rational(&c.lambda)
        ));
    }
    let sh = s_hor_affine(stratum.genus, effdiv)?.eval(y);
    if c.d_h != sh {
        out.push(format!(
            "D_h coefficient {} differs from s_hor {}",
            format_rational(&c.d_h),
            format_rational(&sh)
        ));
    }
    for sg in &stratum.graphs {
        let expected = sg.inv.ell_rational() * s_gamma_affine(&sg.inv, effdiv)?.eval(y);
        let got = c.boundary_coeff(&sg.inv.encoding);
        if got != expected {
            out.push(format!(
                "{}: coefficient {} differs from ell s_Gamma {}",
                sg.inv.encoding,
                format_rational(&got),
                format_rational(&expected)
            ));
        }
    }
    Ok(out)
}

/// `y_hor + 1/100000` for `31 <= g <= 46`, `3/20` from 47 on.
pub fn recipe_y(g: i64) -> Option<Rational> {
    if (31..=46).contains(&g) {
        y_hor(g).ok().map(|y| y + rat(1, 100_000))
    } else if g >= 47 {
        Some(rat(3, 20))
    } else {
        None
    }
}

/// The closed-form thresholds, all strict, intersected with `[0, 1]`.
pub fn coarse_bounds(g: i64) -> Vec<(&'static str, RationalInterval)> {
    let upper = if g % 2 == 1 {
        (
            "y < (g-5)/(4g-4)",
            RationalInterval::below(rat(g - 5, 4 * g - 4)),
        )
    } else {
        (
            "y < (g^2-7g)/(4g^2+16g-8)",
            RationalInterval::below(rat(g * g - 7 * g, 4 * g * g + 16 * g - 8)),
        )
    };
    vec![
        (
            "s_hor > 0",
            affine_positivity_interval(&s_hor_literal(g), &RationalInterval::unbounded()),
        ),
        (
            "y > (g+11)/(12g-6)",
            RationalInterval::above(rat(g + 11, 12 * g - 6)),
        ),
        (
            "y > (g+12)/(48g-24)",
            RationalInterval::above(rat(g + 12, 48 * g - 24)),
        ),
        upper,
    ]
}

fn count_graphs(g: i64) -> Result<u128> {
    atlas_size(g, EnumOptions::default())?
        .to_u128()
        .ok_or(Error::Degenerate("atlas size exceeds 128 bits"))
}

pub fn certify_coarse(req: &CertRequest) -> Result<Certificate> {
    let g = req.genus;
    if g < 2 {
        return Err(Error::GenusOutOfRange {
            genus: g,
            reason: "need g >= 2",
        });
    }
    let effective_divisor = req.effective_divisor.resolve(g);
    check_parity(g, effective_divisor)?;
    let unit = RationalInterval::unit();
    let bounds = coarse_bounds(g);
    let feasible = intersect_all(bounds.iter().map(|(_, iv)| iv).chain([&unit]));
    let y = match &req.y_policy {
        YPolicy::PaperRecipe => recipe_y(g),
        YPolicy::AutoMidpoint => feasible.midpoint(),
        YPolicy::Fixed(v) => Some(v.clone()),
    };
    let status = if feasible.is_empty() {
        Status::CoarseBoundsConflict
    } else if y.as_ref().is_some_and(|y| feasible.contains(y)) {
        Status::Certified
    } else {
        Status::Infeasible
    };
    let mut notes = vec![
        "coarse mode: positivity of the T1 term for every boundary graph is taken from an external \
         large-genus estimate and is not re-derived here"
            .to_string(),
        "coarse mode: worst_margin is the horizontal coefficient s_hor(y)".to_string(),
    ];
    if y.is_none() && !feasible.is_empty() {
        notes.push(format!("no recipe value of y is defined for g = {g}"));
    }
    for (name, iv) in &bounds {
        if let Some(y) = &y {
            if !iv.contains(y) {
                notes.push(format!("bound {name} fails at y = {}", format_rational(y)));
            }
        }
    }
    if g % 2 == 0 {
        let hur = horizontal_line(g, EffectiveDivisor::Hurwitz.horizontal(g));
        let root = hur
            .root()
            .map(|r| format_rational(&r))
            .unwrap_or_else(|| "none".into());
        match &y {
            Some(y) if hur.eval(y) <= Rational::zero() => notes.push(format!(
                "Hurwitz-substituted s_hor is {} <= 0 at this y (its root is {root}); the threshold \
                 bounds are written for the Brill-Noether form",
                format_rational(&hur.eval(y))
            )),
            Some(_) => notes.push(format!("Hurwitz-substituted s_hor is positive at this y (root {root})")),
            None => {}
        }
    }
    Ok(Certificate {
        genus: g,
        mode: Mode::Coarse,
        effective_divisor,
        worst_margin: y.as_ref().map(|y| s_hor_literal(g).eval(y)),
        y,
        feasible,
        graph_count: count_graphs(g)?,
        worst_graph: None,
        status,
        notes,
    })
}

/// Splits `s_Gamma` into a bottom term plus one term per top vertex, valid
/// for every graph with at least two edges; HBB-shaped graphs additionally
/// lose `f/ell`.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub genus: i64,
    pub effdiv: EffectiveDivisor,
    pub hbb_shape: bool,
    f: Rational,
    kappa: Rational,
    /// `12/(g+11)`
    k: Rational,
    irr6: Rational,
}

impl Decomposition {
    pub fn new(genus: i64, effdiv: EffectiveDivisor, hbb_shape: bool) -> Result<Self> {
        check_parity(genus, effdiv)?;
        Ok(Self {
            genus,
            effdiv,
            hbb_shape,
            f: canonical_scale(genus),
            kappa: kappa_mu(&[2 * genus - 2]),
            k: rat(12, genus + 11),
            irr6: int(2) * effdiv.irreducible(genus),
        })
    }

    /// `2f g_b - kappa + (12y/(g+11))(kappa - f - (g-1))`.
    pub fn base_line(&self, bottom_genus: i64) -> AffineInY {
        let g = self.genus;
        AffineInY::new(
            &self.f * int(2 * bottom_genus) - &self.kappa,
            &self.k * (&self.kappa - &self.f - int(g - 1)),
        )
    }

    fn line_from(
        &self,
        deg: i64,
        p_total: i64,
        s: &Rational,
        r: &Rational,
        bb: &Rational,
    ) -> AffineInY {
        let g = self.genus;
        let excess = int(p_total) - s;
        AffineInY::new(
            &self.f * int(deg - 1) - &self.f * r + &excess + bb,
            &self.k * (int(g - 1) - &excess) - bb,
        )
    }

    /// Contribution of a top vertex with reciprocal prong sum `s`.
    pub fn class_line(&self, genus: i64, deg: i64, s: &Rational) -> AffineInY {
        let p_total = 2 * genus - 2 + deg;
        if deg == 1 {
            let p = 2 * genus - 1;
            let j = genus.min(self.genus - genus);
            let bb = int(2) * self.effdiv.edge_weight(self.genus, DeltaTarget::Sep(j)) / int(p);
            self.line_from(1, p_total, s, &rat(2, p), &bb)
        } else {
            self.line_from(deg, p_total, s, &(s / int(2)), &(&self.irr6 * s))
        }
    }

    pub fn vertex_line(&self, t: &VertexType) -> AffineInY {
        let s: Rational = t.prongs.iter().map(|&p| rat(1, p)).sum();
        self.class_line(t.genus, t.degree(), &s)
    }

    pub fn hbb_shift(&self, ell: u128) -> Rational {
        if self.hbb_shape {
            &self.f / Rational::from_integer(ell.into())
        } else {
            Rational::zero()
        }
    }

    /// `s_Gamma` from the decomposition; graphs with one edge are not
    /// covered.
    pub fn graph_line(&self, graph: &LevelGraph) -> Option<AffineInY> {
        if graph.edge_count() < 2 {
            return None;
        }
        let mut line = self.base_line(graph.bottom_genus);
        let mut ell = 1u128;
        let mut hbb = true;
        let mut pair = false;
        for t in &graph.top_vertices {
            let vt = VertexType {
                genus: t.genus,
                prongs: t.prongs.clone(),
            };
            line = &line + &self.vertex_line(&vt);
            for &p in &t.prongs {
                ell = lcm_u128(ell, p as u128);
            }
            match t.prongs.as_slice() {
                [_] => {}
                [a, b] if a == b => pair = true,
                _ => hbb = false,
            }
        }
        if hbb && pair {
            line = &line - &AffineInY::constant(self.hbb_shift(ell));
        }
        Some(line)
    }
}

fn lcm_u128(a: u128, b: u128) -> u128 {
    fn gcd(mut a: u128, mut b: u128) -> u128 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    }
    a / gcd(a, b) * b
}

/// Smallest and largest reciprocal prong sum over top vertices of genus `g_i`
/// with `deg` edges.
pub fn reciprocal_extremes(genus: i64, deg: i64) -> (Rational, Rational) {
    let total = 2 * genus - 2 + deg;
    let (q, r) = (total / deg, total % deg);
    let s_min = rat(r, q + 1) + rat(deg - r, q);
    let s_max = int(deg - 1) + rat(1, 2 * genus - 1);
    (s_min, s_max)
}

/// Exact lower envelope of `s_Gamma` over the whole atlas, with the parts
/// kept apart for diagnostics.
#[derive(Clone, Debug)]
pub struct AtlasEnvelope {
    /// Graphs with at least two edges, HBB correction ignored.
    pub additive: Envelope,
    /// HBB-shaped graphs with the correction.
    pub hbb: Envelope,
    /// Single-edge graphs.
    pub single_edge: Envelope,
    pub hbb_states: usize,
}

impl AtlasEnvelope {
    pub fn total(&self) -> Envelope {
        self.additive.min(&self.hbb).min(&self.single_edge)
    }
}

fn zero_envelope() -> Envelope {
    Envelope::from_lines(&[AffineInY::zero()])
}

/// Flags of a partial multiset: edges capped at 2, and whether some vertex
/// has two or more edges.
fn flag_index(ecap: usize, multi: bool) -> usize {
    ecap * 2 + usize::from(multi)
}

pub fn atlas_envelope(dec: &Decomposition) -> Result<AtlasEnvelope> {
    let g = dec.genus;
    let gu = g as usize;

    // additive part: knapsack over (genus, degree) classes
    let mut table = vec![vec![Envelope::infinite(); 6]; gu + 1];
    table[0][flag_index(0, false)] = zero_envelope();
    for genus in 1..=g {
        for deg in 1..=(g - genus + 1) {
            let w = (genus + deg - 1) as usize;
            let (s_min, s_max) = reciprocal_extremes(genus, deg);
            let class_env = Envelope::from_lines(&[
                dec.class_line(genus, deg, &s_min),
                dec.class_line(genus, deg, &s_max),
            ]);
            for total in w..=gu {
                for ecap in 0..3 {
                    for multi in [false, true] {
                        let src = &table[total - w][flag_index(ecap, multi)];
                        if src.is_infinite() {
                            continue;
                        }
                        let cand = src.add(&class_env);
                        let to = flag_index((ecap + deg as usize).min(2), multi || deg >= 2);
                        table[total][to] = table[total][to].min(&cand);
                    }
                }
            }
        }
    }
    let mut additive = Envelope::infinite();
    for gb in 0..g {
        let w = (g - gb) as usize;
        for multi in [false, true] {
            if gb == 0 && !multi {
                continue;
            }
            let env = &table[w][flag_index(2, multi)];
            if !env.is_infinite() {
                additive = additive.min(&env.shift(&dec.base_line(gb)));
            }
        }
    }

    let mut single_edge = Envelope::infinite();
    for gb in 1..g {
        let top = g - gb;
        let graph = LevelGraph::minimal(g, gb, vec![(top, vec![2 * top - 1])]);
        let inv = graph_invariants(
            &graph,
            InvariantOptions {
                hbb_shape: dec.hbb_shape,
            },
        )?;
        single_edge = single_edge.min(&Envelope::from_lines(&[s_gamma_affine(&inv, dec.effdiv)?]));
    }

    // HBB-shaped graphs: singles (genus t, prong 2t-1) and equal pairs
    // (genus t, prongs t, t), tracked with their lcm
    let mut hbb = Envelope::infinite();
    let mut hbb_states = 0;
    if dec.hbb_shape {
        let mut states: Vec<HashMap<(u128, bool), Envelope>> = vec![HashMap::new(); gu + 1];
        states[0].insert((1, false), zero_envelope());
        let mut kinds = Vec::new();
        for t in 1..=g {
            kinds.push((
                t as usize,
                (2 * t - 1) as u128,
                false,
                dec.class_line(t, 1, &rat(1, 2 * t - 1)),
            ));
            if t < g {
                kinds.push((
                    (t + 1) as usize,
                    t as u128,
                    true,
                    dec.class_line(t, 2, &rat(2, t)),
                ));
            }
        }
        for (w, p, is_pair, line) in &kinds {
            if *w > gu {
                continue;
            }
            for total in *w..=gu {
                let src: Vec<((u128, bool), Envelope)> = states[total - w]
                    .iter()
                    .map(|(k, v)| (*k, v.clone()))
                    .collect();
                for ((ell, pair), env) in src {
                    let key = (lcm_u128(ell, *p), pair || *is_pair);
                    let cand = env.shift(line);
                    let slot = states[total].entry(key).or_insert_with(Envelope::infinite);
                    *slot = slot.min(&cand);
                }
            }
        }
        for gb in 0..g {
            for ((ell, pair), env) in &states[(g - gb) as usize] {
                if *pair {
                    hbb_states += 1;
                    let shift = &dec.base_line(gb) - &AffineInY::constant(dec.hbb_shift(*ell));
                    hbb = hbb.min(&env.shift(&shift));
                }
            }
        }
    }
    Ok(AtlasEnvelope {
        additive,
        hbb,
        single_edge,
        hbb_states,
    })
}

/// Top vertices of one (genus, degree) class.
struct VertexClass {
    genus: i64,
    deg: i64,
    weight: i64,
    /// Smallest vertex term at `y` over the class.
    min_value: Rational,
}

/// Prong multisets of a class, ascending, with their reciprocal sums.
fn class_members(genus: i64, deg: i64) -> Vec<(Vec<i64>, Rational)> {
    let mut out: Vec<(Vec<i64>, Rational)> = partitions_at_most(2 * genus - 2, deg)
        .into_iter()
        .map(|parts| {
            let mut prongs: Vec<i64> = parts.iter().map(|p| p + 1).collect();
            prongs.resize(deg as usize, 1);
            prongs.sort_unstable();
            let s = prongs.iter().map(|&p| rat(1, p)).sum();
            (prongs, s)
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// `table[genus][w]`: smallest sum of item values over multisets of items
/// `(genus, weight, value)` with genus at least `genus` and total weight `w`.
fn completion_table(g: i64, items: &[(i64, i64, Rational)]) -> Vec<Vec<Option<Rational>>> {
    let gu = g as usize;
    let mut table = vec![vec![None; gu + 1]; gu + 2];
    table[gu + 1][0] = Some(Rational::zero());
    for genus in (1..=g).rev() {
        let gi = genus as usize;
        table[gi] = table[gi + 1].clone();
        for (_, weight, value) in items.iter().filter(|it| it.0 == genus) {
            let w = *weight as usize;
            for total in w..=gu {
                if let Some(prev) = table[gi][total - w].clone() {
                    let cand = prev + value;
                    let slot: &mut Option<Rational> = &mut table[gi][total];
                    if slot.as_ref().is_none_or(|s| cand < *s) {
                        *slot = Some(cand);
                    }
                }
            }
        }
    }
    table
}

/// Sorted prongs of each class member with its value at `y`.
type Members = Vec<(Vec<i64>, Rational)>;

/// Branch-and-bound search for every graph attaining `target` at `y`. The
/// bounds come from the decomposition; leaves are evaluated exactly.
struct WorstSearch<'a> {
    dec: &'a Decomposition,
    y: &'a Rational,
    target: &'a Rational,
    classes: Vec<VertexClass>,
    /// completion[genus][w]: minimum over multisets of vertices of genus at
    /// least `genus` with total weight `w`, HBB correction ignored
    completion: Vec<Vec<Option<Rational>>>,
    /// the same restricted to single vertices and equal-prong pairs
    completion_hbb: Vec<Vec<Option<Rational>>>,
    /// members of each class with their value at `y`, filled on demand
    members: Vec<Option<Rc<Members>>>,
    best: Option<LevelGraph>,
}

impl<'a> WorstSearch<'a> {
    fn new(dec: &'a Decomposition, y: &'a Rational, target: &'a Rational) -> Self {
        let g = dec.genus;
        let mut classes = Vec::new();
        for genus in 1..=g {
            for deg in 1..=(g - genus + 1) {
                let (s_min, s_max) = reciprocal_extremes(genus, deg);
                let a = dec.class_line(genus, deg, &s_min).eval(y);
                let b = dec.class_line(genus, deg, &s_max).eval(y);
                classes.push(VertexClass {
                    genus,
                    deg,
                    weight: genus + deg - 1,
                    min_value: a.min(b),
                });
            }
        }
        let all: Vec<(i64, i64, Rational)> = classes
            .iter()
            .map(|c| (c.genus, c.weight, c.min_value.clone()))
            .collect();
        let mut hbb = Vec::new();
        for t in 1..=g {
            hbb.push((t, t, dec.class_line(t, 1, &rat(1, 2 * t - 1)).eval(y)));
            hbb.push((t, t + 1, dec.class_line(t, 2, &rat(2, t)).eval(y)));
        }
        let n = classes.len();
        Self {
            dec,
            y,
            target,
            completion: completion_table(g, &all),
            completion_hbb: completion_table(g, &hbb),
            classes,
            members: vec![None; n],
            best: None,
        }
    }

    fn members_of(&mut self, c: usize) -> Rc<Members> {
        if let Some(m) = &self.members[c] {
            return m.clone();
        }
        let (genus, deg) = (self.classes[c].genus, self.classes[c].deg);
        let list: Vec<(Vec<i64>, Rational)> = class_members(genus, deg)
            .into_iter()
            .map(|(prongs, s)| {
                let v = self.dec.class_line(genus, deg, &s).eval(self.y);
                (prongs, v)
            })
            .collect();
        let rc = Rc::new(list);
        self.members[c] = Some(rc.clone());
        rc
    }

    /// Lower bound for completing `prefix` with weight `rest` from genus
    /// `genus` on.
    fn bound(
        &self,
        prefix: &Rational,
        genus: i64,
        rest: i64,
        hbb_possible: bool,
        ell: u128,
    ) -> Option<Rational> {
        let plain = self.completion[genus as usize][rest as usize]
            .as_ref()
            .map(|c| prefix + c);
        let hbb = if hbb_possible && self.dec.hbb_shape {
            self.completion_hbb[genus as usize][rest as usize]
                .as_ref()
                .map(|c| prefix + c - self.dec.hbb_shift(ell))
        } else {
            None
        };
        match (plain, hbb) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    fn run(mut self) -> Result<Option<LevelGraph>> {
        let g = self.dec.genus;
        for gb in 0..g {
            let start = self.dec.base_line(gb).eval(self.y);
            let mut tops = Vec::new();
            self.descend(gb, &mut tops, &start, g - gb, 0, None, true, 1)?;
        }
        Ok(self.best)
    }

    /// `predicted` is the decomposition value, cross-checked here.
    fn offer(&mut self, graph: LevelGraph, predicted: Option<Rational>) -> Result<()> {
        let valid = graph.bottom_genus > 0 || graph.top_vertices.iter().any(|t| t.degree() >= 2);
        if !valid {
            return Ok(());
        }
        let inv = graph_invariants(
            &graph,
            InvariantOptions {
                hbb_shape: self.dec.hbb_shape,
            },
        )?;
        let exact = s_gamma_affine(&inv, self.dec.effdiv)?.eval(self.y);
        if predicted.as_ref().is_some_and(|p| *p != exact) {
            return Err(Error::InvariantViolation(format!(
                "{}: decomposition gives {}, direct formula {}",
                inv.encoding,
                format_rational(predicted.as_ref().expect("checked")),
                format_rational(&exact)
            )));
        }
        if exact != *self.target {
            return Ok(());
        }
        let earlier = match &self.best {
            None => true,
            Some(b) => {
                (graph.bottom_genus, &graph.top_vertices) < (b.bottom_genus, &b.top_vertices)
            }
        };
        if earlier {
            self.best = Some(graph);
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        &mut self,
        gb: i64,
        tops: &mut Vec<(i64, Vec<i64>)>,
        prefix: &Rational,
        remaining: i64,
        first_class: usize,
        lower: Option<&[i64]>,
        hbb_possible: bool,
        ell: u128,
    ) -> Result<()> {
        for c in first_class..self.classes.len() {
            let (genus, deg, w) = {
                let cls = &self.classes[c];
                (cls.genus, cls.deg, cls.weight)
            };
            if w > remaining {
                continue;
            }
            let rest = remaining - w;
            // a lone single-edge vertex is outside the decomposition
            let exempt = tops.is_empty() && rest == 0 && deg == 1;
            if !exempt {
                let start = prefix + &self.classes[c].min_value;
                match self.bound(&start, genus, rest, hbb_possible && deg <= 2, ell) {
                    Some(b) if b <= *self.target => {}
                    _ => continue,
                }
            }
            let members = self.members_of(c);
            for (prongs, term) in members.iter() {
                if c == first_class && lower.is_some_and(|lo| prongs.as_slice() < lo) {
                    continue;
                }
                let value = prefix + term;
                let child_ell = prongs.iter().fold(ell, |acc, &p| lcm_u128(acc, p as u128));
                let child_hbb = hbb_possible
                    && match prongs.as_slice() {
                        [_] => true,
                        [a, b] => a == b,
                        _ => false,
                    };
                tops.push((genus, prongs.clone()));
                if rest == 0 {
                    let graph = LevelGraph::minimal(self.dec.genus, gb, tops.clone());
                    if exempt {
                        self.offer(graph, None)?;
                    } else {
                        let mut v = value.clone();
                        if child_hbb && tops.iter().any(|t| t.1.len() == 2) {
                            v -= self.dec.hbb_shift(child_ell);
                        }
                        if v <= *self.target {
                            self.offer(graph, Some(v))?;
                        }
                    }
                } else if self
                    .bound(&value, genus, rest, child_hbb, child_ell)
                    .is_some_and(|b| b <= *self.target)
                {
                    self.descend(
                        gb,
                        tops,
                        &value,
                        rest,
                        c,
                        Some(prongs),
                        child_hbb,
                        child_ell,
                    )?;
                }
                tops.pop();
            }
        }
        Ok(())
    }
}

/// Canonical-first graph minimising `s_Gamma(y)`, found without walking the
/// atlas.
pub fn worst_graph_decomposed(
    dec: &Decomposition,
    env: &Envelope,
    y: &Rational,
) -> Result<(LevelGraph, Rational)> {
    let target = env.eval(y).ok_or(Error::Degenerate("empty envelope"))?;
    match WorstSearch::new(dec, y, &target).run()? {
        Some(graph) => Ok((graph, target)),
        None => Err(Error::InvariantViolation(format!(
            "no graph attains the envelope minimum {} at y = {}",
            format_rational(&target),
            format_rational(y)
        ))),
    }
}

type WorstAt = Box<dyn Fn(&Rational) -> Result<(String, Rational)> + Sync>;

struct Evaluated {
    feasible: RationalInterval,
    total: Envelope,
    graph_count: u128,
    worst: WorstAt,
    notes: Vec<String>,
}

fn evaluate_stream(g: i64, effdiv: EffectiveDivisor, hbb_shape: bool) -> Result<Evaluated> {
    let atlas = MinimalAtlas::new(g, EnumOptions::default())?;
    let opts = InvariantOptions { hbb_shape };
    let results: Vec<Result<(String, AffineInY)>> = atlas.par_map(|graph| {
        let inv = graph_invariants(graph, opts)?;
        if inv.edge_classes.contains(&EdgeClass::Rbt) {
            return Err(Error::InvariantViolation(format!(
                "RBT edge in {}",
                inv.encoding
            )));
        }
        Ok((inv.encoding.clone(), s_gamma_affine(&inv, effdiv)?))
    });
    let rows: Vec<(String, AffineInY)> = results.into_iter().collect::<Result<_>>()?;
    let total = Envelope::from_lines(rows.iter().map(|(_, l)| l));
    let feasible = total.positivity();
    let graph_count = rows.len() as u128;
    let worst = move |y: &Rational| -> Result<(String, Rational)> {
        let mut best: Option<(String, Rational)> = None;
        for (enc, line) in &rows {
            let v = line.eval(y);
            if best.as_ref().is_none_or(|(_, b)| v < *b) {
                best = Some((enc.clone(), v));
            }
        }
        best.ok_or(Error::Degenerate("empty atlas"))
    };
    Ok(Evaluated {
        feasible,
        total,
        graph_count,
        worst: Box::new(worst),
        notes: vec![format!("strategy: streamed {graph_count} graphs")],
    })
}

fn evaluate_decomposed(g: i64, effdiv: EffectiveDivisor, hbb_shape: bool) -> Result<Evaluated> {
    let dec = Decomposition::new(g, effdiv, hbb_shape)?;
    let env = atlas_envelope(&dec)?;
    let total = env.total();
    let feasible = total.positivity();
    let notes = vec![format!(
        "strategy: additive decomposition over top vertices ({} envelope lines, {} HBB lcm states)",
        total.pieces().len(),
        env.hbb_states
    )];
    let env_total = total.clone();
    let worst = move |y: &Rational| -> Result<(String, Rational)> {
        let (graph, value) = worst_graph_decomposed(&dec, &env_total, y)?;
        Ok((graph.canonical_encoding(), value))
    };
    Ok(Evaluated {
        feasible,
        total,
        graph_count: count_graphs(g)?,
        worst: Box::new(worst),
        notes,
    })
}

pub fn certify_exact(req: &CertRequest) -> Result<Certificate> {
    let g = req.genus;
    let effdiv = req.effective_divisor.resolve(g);
    check_parity(g, effdiv)?;
    let stream = match req.strategy {
        ExactStrategy::Stream => true,
        ExactStrategy::Decomposed => false,
        ExactStrategy::Auto => count_graphs(g)? <= STREAM_LIMIT,
    };
    let ev = if stream {
        evaluate_stream(g, effdiv, req.hbb_shape)?
    } else {
        evaluate_decomposed(g, effdiv, req.hbb_shape)?
    };
    let mut notes = ev.notes;
    if effdiv == EffectiveDivisor::Hurwitz && g < 6 {
        notes.push("the Hurwitz class is only established for g >= 6; exploratory run".into());
    }
    if !req.hbb_shape {
        notes.push("HBB shape test disabled: delta_H = 0 for every graph".into());
    }

    let sh = horizontal_line(g, effdiv.horizontal(g));
    let unit = RationalInterval::unit();
    let feasible = ev
        .feasible
        .intersect(&affine_positivity_interval(&sh, &unit));
    let y = match &req.y_policy {
        YPolicy::AutoMidpoint => feasible.midpoint(),
        YPolicy::PaperRecipe => {
            let y = recipe_y(g);
            if y.is_none() {
                notes.push(format!("no recipe value of y is defined for g = {g}"));
            }
            y
        }
        YPolicy::Fixed(v) => Some(v.clone()),
    };
    let status = match &y {
        Some(y) if feasible.contains(y) => Status::Certified,
        _ => Status::Infeasible,
    };
    let probe = match &y {
        Some(y) => Some(y.clone()),
        None => {
            let (ym, _) = ev.total.argmax().ok_or(Error::Degenerate("empty atlas"))?;
            notes.push(format!(
                "no admissible y; worst graph and margin are reported at y = {}, where the smallest \
                 boundary coefficient is largest",
                format_rational(&ym)
            ));
            Some(ym)
        }
    };
    let (worst_graph, worst_margin) = match &probe {
        Some(py) => {
            let (enc, v) = (ev.worst)(py)?;
            (Some(enc), Some(v))
        }
        None => (None, None),
    };
    if let Some(y) = &y {
        let hv = sh.eval(y);
        if hv <= Rational::zero() {
            notes.push(format!(
                "s_hor(y) = {} is not positive",
                format_rational(&hv)
            ));
        }
    }
    Ok(Certificate {
        genus: g,
        mode: Mode::Exact,
        effective_divisor: effdiv,
        y,
        feasible,
        graph_count: ev.graph_count,
        worst_graph,
        worst_margin,
        status,
        notes,
    })
}

pub fn certify(req: &CertRequest) -> Result<Certificate> {
    match req.mode {
        Mode::Coarse => certify_coarse(req),
        Mode::Exact => certify_exact(req),
    }
}

/// One certificate per genus in `from..=to`.
pub fn scan(from: i64, to: i64, template: &CertRequest) -> Result<Vec<Certificate>> {
    if from < 2 || from > to {
        return Err(Error::GenusOutOfRange {
            genus: from,
            reason: "need 2 <= from <= to",
        });
    }
    (from..=to)
        .into_par_iter()
        .map(|g| {
            certify(&CertRequest {
                genus: g,
                ..template.clone()
            })
        })
        .collect()
}

/// Smallest genus in a scan whose feasible interval is non-empty.
pub fn first_feasible(certs: &[Certificate]) -> Option<i64> {
    certs
        .iter()
        .find(|c| !c.feasible.is_empty())
        .map(|c| c.genus)
}

/// Per-graph `s_Gamma` from the decomposition, for cross-checking against
/// the direct formula.
pub fn decomposed_line(dec: &Decomposition, graph: &LevelGraph) -> Option<AffineInY> {
    dec.graph_line(graph)
}

/// Graph count as a big integer, also for genera beyond 64-bit counts.
pub fn graph_count_big(g: i64) -> Result<BigUint> {
    atlas_size(g, EnumOptions::default())
}

/// Coefficients of `w_hor`-scaled horizontal slope, for display.
pub fn horizontal_slope_term(g: i64) -> Rational {
    int(12) * w_hor(g) / w_lambda(g)
}
