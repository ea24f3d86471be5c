//! Divisor classes on a stratum as vectors in the basis
//! `(lambda, psi_i, xi, D_h, {D_Gamma})`, and their reduction to
//! `(lambda, D_h, {D_Gamma})`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{format_rational, int, parse_rational, rat, Rational};
use crate::enumerate::enumerate_minimal;
use crate::error::{Error, Result};
use crate::graph::{graph_invariants, DeltaTarget, GraphInvariants, InvariantOptions, LevelGraph};

/// `sum over m != -1 of m(m+2)/(m+1)`.
pub fn kappa_mu(orders: &[i64]) -> Rational {
    orders
        .iter()
        .filter(|&&m| m != -1)
        .map(|&m| rat(m * (m + 2), m + 1))
        .sum()
}

/// `sum of alpha_i(alpha_i+1) / (2(m_i+1))`.
pub fn theta(orders: &[i64], alpha: &[i64]) -> Result<Rational> {
    if orders.len() != alpha.len() {
        return Err(Error::LengthMismatch {
            left: orders.len(),
            right: alpha.len(),
        });
    }
    let mut acc = Rational::zero();
    for (&m, &a) in orders.iter().zip(alpha) {
        if m == -1 {
            return Err(Error::InvalidSignature(
                "theta is undefined at a simple pole".into(),
            ));
        }
        acc += rat(a * (a + 1), 2 * (m + 1));
    }
    Ok(acc)
}

/// `(2g-2)/(2g-1)`, which is `kappa_(2g-2) / 2g`.
pub fn canonical_scale(g: i64) -> Rational {
    rat(2 * g - 2, 2 * g - 1)
}

fn check_genus(g: i64, min: i64) -> Result<()> {
    if g < min {
        return Err(Error::GenusOutOfRange {
            genus: g,
            reason: match min {
                2 => "need g >= 2",
                3 => "need g >= 3",
                4 => "need g >= 4",
                6 => "need g >= 6",
                _ => "genus too small",
            },
        });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectiveDivisor {
    BrillNoether,
    Hurwitz,
}

impl EffectiveDivisor {
    /// Brill-Noether for odd genus, Hurwitz for even genus.
    pub fn auto(g: i64) -> Self {
        if g % 2 == 1 {
            EffectiveDivisor::BrillNoether
        } else {
            EffectiveDivisor::Hurwitz
        }
    }

    pub fn check(self, g: i64) -> Result<()> {
        match self {
            EffectiveDivisor::BrillNoether => {
                if g % 2 == 0 {
                    return Err(Error::ParityMismatch {
                        genus: g,
                        divisor: "Brill-Noether",
                        expected: "odd",
                    });
                }
                check_genus(g, 3)
            }
            EffectiveDivisor::Hurwitz => {
                if g % 2 != 0 {
                    return Err(Error::ParityMismatch {
                        genus: g,
                        divisor: "Hurwitz",
                        expected: "even",
                    });
                }
                check_genus(g, 6)
            }
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EffectiveDivisor::BrillNoether => "brill_noether",
            EffectiveDivisor::Hurwitz => "hurwitz",
        }
    }

    /// Minus the `D_h` coefficient of the class normalised to `6 lambda`.
    pub fn horizontal(self, g: i64) -> Rational {
        match self {
            EffectiveDivisor::BrillNoether => rat(g + 1, g + 3),
            EffectiveDivisor::Hurwitz => rat(3 * g * g + 12 * g - 6, (g + 8) * (3 * g - 1)),
        }
    }

    /// Weight of an edge smoothing into `Delta_i` (before dividing by the
    /// prong).
    pub fn separating(self, g: i64, i: i64) -> Rational {
        match self {
            EffectiveDivisor::BrillNoether => rat(6 * i * (g - i), g + 3),
            EffectiveDivisor::Hurwitz => rat(6 * i * (g - i) * (3 * g + 4), (g + 8) * (3 * g - 1)),
        }
    }

    /// Weight of an edge smoothing into `Delta_irr`.
    pub fn irreducible(self, g: i64) -> Rational {
        self.horizontal(g)
    }

    pub fn edge_weight(self, g: i64, target: DeltaTarget) -> Rational {
        match target {
            DeltaTarget::Irr => self.irreducible(g),
            DeltaTarget::Sep(i) => self.separating(g, i),
        }
    }

    /// `b_Gamma` (or `h_Gamma`): minus the `D_Gamma` coefficient.
    pub fn boundary_weight(self, g: i64, inv: &GraphInvariants) -> Rational {
        let sum: Rational = inv
            .delta_targets
            .iter()
            .zip(&inv.edge_prongs)
            .map(|(&t, &p)| self.edge_weight(g, t) / int(p))
            .sum();
        inv.ell_rational() * sum
    }
}

impl fmt::Display for EffectiveDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct StratumGraph {
    pub graph: LevelGraph,
    pub inv: GraphInvariants,
    /// Labels of the legs on the bottom vertex.
    pub bottom_labels: Vec<usize>,
}

/// A stratum together with the boundary graphs classes are expressed over.
#[derive(Clone, Debug)]
pub struct Stratum {
    pub genus: i64,
    pub signature: Vec<i64>,
    pub kappa: Rational,
    pub graphs: Vec<StratumGraph>,
    index: BTreeMap<String, usize>,
}

impl Stratum {
    pub fn new(
        genus: i64,
        signature: Vec<i64>,
        graphs: Vec<LevelGraph>,
        opts: InvariantOptions,
    ) -> Result<Self> {
        if signature.iter().sum::<i64>() != 2 * genus - 2 {
            return Err(Error::InvalidSignature(format!(
                "orders {signature:?} do not sum to 2g-2 = {}",
                2 * genus - 2
            )));
        }
        let mut out = Vec::with_capacity(graphs.len());
        let mut index = BTreeMap::new();
        for graph in graphs {
            if graph.genus != genus || graph.signature() != signature {
                return Err(Error::MalformedGraph(format!(
                    "{} does not belong to the stratum {signature:?} in genus {genus}",
                    graph.canonical_encoding()
                )));
            }
            let inv = graph_invariants(&graph, opts)?;
            let bottom_labels = graph.bottom_legs.iter().map(|l| l.label).collect();
            index.insert(inv.encoding.clone(), out.len());
            out.push(StratumGraph {
                graph,
                inv,
                bottom_labels,
            });
        }
        Ok(Self {
            genus,
            kappa: kappa_mu(&signature),
            signature,
            graphs: out,
            index,
        })
    }

    pub fn minimal(genus: i64, graphs: Vec<LevelGraph>, opts: InvariantOptions) -> Result<Self> {
        check_genus(genus, 2)?;
        Self::new(genus, vec![2 * genus - 2], graphs, opts)
    }

    /// The minimal stratum over its full atlas.
    pub fn minimal_atlas(genus: i64, opts: InvariantOptions) -> Result<Self> {
        Self::minimal(genus, enumerate_minimal(genus)?, opts)
    }

    pub fn get(&self, encoding: &str) -> Option<&StratumGraph> {
        self.index.get(encoding).map(|&i| &self.graphs[i])
    }

    pub fn is_minimal(&self) -> bool {
        self.signature.len() == 1
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DivisorClass {
    pub lambda: Rational,
    /// One entry per marked point, in label order.
    pub psi: Vec<Rational>,
    pub xi: Rational,
    pub d_h: Rational,
    pub boundary: BTreeMap<String, Rational>,
}

impl DivisorClass {
    pub fn zero(points: usize) -> Self {
        Self {
            psi: vec![Rational::zero(); points],
            ..Default::default()
        }
    }

    pub fn lambda(points: usize) -> Self {
        Self {
            lambda: Rational::one(),
            ..Self::zero(points)
        }
    }

    pub fn boundary_coeff(&self, encoding: &str) -> Rational {
        self.boundary
            .get(encoding)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn add_boundary(&mut self, encoding: &str, value: Rational) {
        let entry = self
            .boundary
            .entry(encoding.to_string())
            .or_insert_with(Rational::zero);
        *entry += value;
    }

    /// Drops zero boundary entries so that equality is coordinate equality.
    pub fn pruned(mut self) -> Self {
        self.boundary.retain(|_, v| !v.is_zero());
        self
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self {
            lambda: &self.lambda * factor,
            psi: self.psi.iter().map(|p| p * factor).collect(),
            xi: &self.xi * factor,
            d_h: &self.d_h * factor,
            boundary: self
                .boundary
                .iter()
                .map(|(k, v)| (k.clone(), v * factor))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.psi.len() != other.psi.len() {
            return Err(Error::LengthMismatch {
                left: self.psi.len(),
                right: other.psi.len(),
            });
        }
        let mut out = self.clone();
        out.lambda += &other.lambda;
        out.xi += &other.xi;
        out.d_h += &other.d_h;
        for (a, b) in out.psi.iter_mut().zip(&other.psi) {
            *a += b;
        }
        for (k, v) in &other.boundary {
            out.add_boundary(k, v.clone());
        }
        Ok(out.pruned())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&int(-1)))
    }

    pub fn is_reduced(&self) -> bool {
        self.xi.is_zero() && self.psi.iter().all(Zero::is_zero)
    }

    /// Eliminates `psi_i` through `(m_i+1) psi_i = xi + sum ell D_Gamma`
    /// (graphs with leg `i` on the bottom), then `xi` through
    /// `kappa xi = 12 lambda - D_h - sum ell kappa^bot D_Gamma`.
    pub fn reduce(&self, stratum: &Stratum) -> Result<Self> {
        if self.psi.len() != stratum.signature.len() {
            return Err(Error::LengthMismatch {
                left: self.psi.len(),
                right: stratum.signature.len(),
            });
        }
        let mut out = self.clone();
        for (i, (coeff, &m)) in self.psi.iter().zip(&stratum.signature).enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let c = coeff / int(m + 1);
            out.xi += &c;
            for sg in &stratum.graphs {
                if sg.bottom_labels.contains(&(i + 1)) {
                    out.add_boundary(&sg.inv.encoding, &c * sg.inv.ell_rational());
                }
            }
        }
        out.psi = vec![Rational::zero(); self.psi.len()];
        if !out.xi.is_zero() {
            if stratum.kappa.is_zero() {
                return Err(Error::Degenerate("kappa vanishes; xi cannot be eliminated"));
            }
            let c = &out.xi / &stratum.kappa;
            out.lambda += &c * int(12);
            out.d_h -= &c;
            for sg in &stratum.graphs {
                out.add_boundary(
                    &sg.inv.encoding,
                    -(&c * sg.inv.ell_rational() * &sg.inv.kappa_bot),
                );
            }
            out.xi = Rational::zero();
        }
        Ok(out.pruned())
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} lambda", format_rational(&self.lambda))?;
        for (i, p) in self.psi.iter().enumerate() {
            if !p.is_zero() {
                write!(f, " + {} psi_{}", format_rational(p), i + 1)?;
            }
        }
        if !self.xi.is_zero() {
            write!(f, " + {} xi", format_rational(&self.xi))?;
        }
        write!(f, " + {} D_h", format_rational(&self.d_h))?;
        for (k, v) in &self.boundary {
            write!(f, " + {} [{}]", format_rational(v), k)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PsiRepr {
    One(String),
    Many(Vec<String>),
}

#[derive(Serialize, Deserialize)]
struct ClassRepr {
    lambda: String,
    d_h: String,
    psi: PsiRepr,
    xi: String,
    boundary: BTreeMap<String, String>,
}

impl Serialize for DivisorClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let psi = if self.psi.len() == 1 {
            PsiRepr::One(format_rational(&self.psi[0]))
        } else {
            PsiRepr::Many(self.psi.iter().map(format_rational).collect())
        };
        ClassRepr {
            lambda: format_rational(&self.lambda),
            d_h: format_rational(&self.d_h),
            psi,
            xi: format_rational(&self.xi),
            boundary: self
                .boundary
                .iter()
                .map(|(k, v)| (k.clone(), format_rational(v)))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DivisorClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ClassRepr::deserialize(d)?;
        let p = |t: &str| parse_rational(t).map_err(D::Error::custom);
        let psi = match repr.psi {
            PsiRepr::One(t) => vec![p(&t)?],
            PsiRepr::Many(ts) => ts
                .iter()
                .map(|t| p(t))
                .collect::<std::result::Result<_, _>>()?,
        };
        let mut boundary = BTreeMap::new();
        for (k, v) in repr.boundary {
            boundary.insert(k, p(&v)?);
        }
        Ok(Self {
            lambda: p(&repr.lambda)?,
            psi,
            xi: p(&repr.xi)?,
            d_h: p(&repr.d_h)?,
            boundary,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassForm {
    Raw,
    Reduced,
}

fn require_minimal(stratum: &Stratum) -> Result<i64> {
    if !stratum.is_minimal() {
        return Err(Error::InvalidSignature(
            "this class lives on the minimal stratum".into(),
        ));
    }
    Ok(stratum.genus)
}

fn boundary_map<F>(stratum: &Stratum, mut f: F) -> BTreeMap<String, Rational>
where
    F: FnMut(&StratumGraph) -> Rational,
{
    stratum
        .graphs
        .iter()
        .map(|sg| (sg.inv.encoding.clone(), f(sg)))
        .filter(|(_, v)| !v.is_zero())
        .collect()
}

/// `D_Gamma` coefficient of the scaled canonical class, including the HBB
/// correction when `delta_H = 1`.
pub fn canonical_coefficient(g: i64, inv: &GraphInvariants) -> Rational {
    let f = canonical_scale(g);
    let ell = inv.ell_rational();
    -(&ell * &inv.kappa_bot - &f * (&ell * int(inv.n_bot) - int(1))) - &f * int(inv.delta_h as i64)
}

/// `(kappa/2g) c_1(K)` in the reduced basis.
pub fn scaled_canonical_class(stratum: &Stratum) -> Result<DivisorClass> {
    let g = require_minimal(stratum)?;
    Ok(DivisorClass {
        lambda: int(12),
        d_h: -(int(1) + canonical_scale(g)),
        boundary: boundary_map(stratum, |sg| canonical_coefficient(g, &sg.inv)),
        ..DivisorClass::zero(1)
    })
}

pub fn d_nc_class(stratum: &Stratum) -> Result<DivisorClass> {
    require_minimal(stratum)?;
    Ok(DivisorClass {
        boundary: boundary_map(stratum, |sg| sg.inv.b_nc.clone()),
        ..DivisorClass::zero(1)
    })
}

/// Brill-Noether or Hurwitz class, normalised to `6 lambda`.
pub fn effective_class(stratum: &Stratum, which: EffectiveDivisor) -> Result<DivisorClass> {
    let g = require_minimal(stratum)?;
    which.check(g)?;
    Ok(DivisorClass {
        lambda: int(6),
        d_h: -which.horizontal(g),
        boundary: boundary_map(stratum, |sg| -which.boundary_weight(g, &sg.inv)),
        ..DivisorClass::zero(1)
    })
}

pub fn bn_class(stratum: &Stratum) -> Result<DivisorClass> {
    effective_class(stratum, EffectiveDivisor::BrillNoether)
}

pub fn hur_class(stratum: &Stratum) -> Result<DivisorClass> {
    effective_class(stratum, EffectiveDivisor::Hurwitz)
}

pub fn w_lambda(g: i64) -> Rational {
    rat(g + 11, 2 * g - 2)
}

pub fn w_hor(g: i64) -> Rational {
    rat(g + 3, 8 * g - 8)
}

/// `w_Gamma` of the reduced form of the extra-vanishing Weierstrass class.
pub fn w_gamma(g: i64, inv: &GraphInvariants) -> Rational {
    let kappa = kappa_mu(&[2 * g - 2]);
    let a = rat(1, 2 * g - 1);
    &inv.kappa_bot / &kappa * (int(1) + &a) - &a + rat(inv.v_top as i64 - 1, 2)
}

/// Multiplicity of the exceptional graph in genus `g+1`, one more than the
/// twist bound there.
pub fn exceptional_multiplicity(g: i64) -> Rational {
    int(g * (g - 1) / 2 + 1)
}

/// Raw-form `D_Gamma` coefficient per `ell`: twist bound at the balanced
/// point plus the vanishing term `(v_top - 1)/2`.
pub fn wplus_raw_boundary(inv: &GraphInvariants) -> Rational {
    inv.twist_excess() / int(8) + rat(inv.v_top as i64 - 1, 2)
}

pub fn wplus_class(stratum: &Stratum, form: ClassForm) -> Result<DivisorClass> {
    let g = require_minimal(stratum)?;
    check_genus(g, 4)?;
    Ok(match form {
        ClassForm::Raw => DivisorClass {
            lambda: int(-1),
            psi: vec![exceptional_multiplicity(g)],
            xi: int(1),
            boundary: boundary_map(stratum, |sg| {
                -(wplus_raw_boundary(&sg.inv) * sg.inv.ell_rational())
            }),
            ..Default::default()
        },
        ClassForm::Reduced => DivisorClass {
            lambda: w_lambda(g),
            d_h: -w_hor(g),
            boundary: boundary_map(stratum, |sg| -(w_gamma(g, &sg.inv) * sg.inv.ell_rational())),
            ..DivisorClass::zero(1)
        },
    })
}

/// Checks `0 <= alpha_i <= m_i` and `sum alpha = g - 1`.
pub fn check_alpha(signature: &[i64], alpha: &[i64], genus: i64) -> Result<()> {
    if signature.len() != alpha.len() {
        return Err(Error::LengthMismatch {
            left: signature.len(),
            right: alpha.len(),
        });
    }
    if let Some((a, m)) = alpha.iter().zip(signature).find(|(a, m)| **a < 0 || a > m) {
        return Err(Error::InvalidPartition(format!(
            "alpha entry {a} outside [0, {m}]"
        )));
    }
    let total: i64 = alpha.iter().sum();
    if total != genus - 1 {
        return Err(Error::InvalidPartition(format!(
            "alpha sums to {total}, expected g-1 = {}",
            genus - 1
        )));
    }
    Ok(())
}

/// Generalized Weierstrass class for a partition `alpha` of `g-1`.
pub fn gen_weierstrass_class(
    stratum: &Stratum,
    alpha: &[i64],
    form: ClassForm,
) -> Result<DivisorClass> {
    check_alpha(&stratum.signature, alpha, stratum.genus)?;
    Ok(match form {
        ClassForm::Raw => DivisorClass {
            lambda: int(-1),
            psi: alpha.iter().map(|&a| rat(a * (a + 1), 2)).collect(),
            xi: int(1),
            ..Default::default()
        },
        ClassForm::Reduced => {
            let kappa = &stratum.kappa;
            let th = theta(&stratum.signature, alpha)?;
            let one_th = int(1) + &th;
            DivisorClass {
                lambda: (int(12) + int(12) * &th - kappa) / kappa,
                d_h: -(&one_th / kappa),
                boundary: boundary_map(stratum, |sg| {
                    let th_bot: Rational = sg
                        .bottom_labels
                        .iter()
                        .map(|&l| {
                            let (a, m) = (alpha[l - 1], stratum.signature[l - 1]);
                            rat(a * (a + 1), 2 * (m + 1))
                        })
                        .sum();
                    -(sg.inv.ell_rational() * (&sg.inv.kappa_bot * &one_th / kappa - th_bot))
                }),
                ..DivisorClass::zero(stratum.signature.len())
            }
        }
    })
}

/// `floor(ell/2)(alpha_bot - m_bot/2) + (ell/8)(P - P_{-1})`.
pub fn twist_improvement_bound(
    inv: &GraphInvariants,
    alpha_bot: &Rational,
    m_bot: &Rational,
) -> Rational {
    let half_ell = Rational::from_integer(&inv.ell / 2);
    half_ell * (alpha_bot - m_bot / int(2)) + inv.ell_rational() * inv.twist_excess() / int(8)
}
