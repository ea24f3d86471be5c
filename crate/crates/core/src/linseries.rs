//! Vanishing sequences of linear series and the compatibility conditions
//! between the two sides of a node.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly increasing orders `0 <= a_0 < ... < a_r <= d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SequenceRepr", into = "SequenceRepr")]
pub struct VanishingSequence {
    entries: Vec<i64>,
    degree: i64,
}

#[derive(Serialize, Deserialize)]
struct SequenceRepr {
    a: Vec<i64>,
    d: i64,
}

impl TryFrom<SequenceRepr> for VanishingSequence {
    type Error = Error;
    fn try_from(r: SequenceRepr) -> Result<Self> {
        Self::new(r.a, r.d)
    }
}

impl From<VanishingSequence> for SequenceRepr {
    fn from(v: VanishingSequence) -> Self {
        SequenceRepr {
            a: v.entries,
            d: v.degree,
        }
    }
}

impl VanishingSequence {
    pub fn new(entries: Vec<i64>, degree: i64) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidSequence("empty sequence".into()));
        }
        if entries[0] < 0 {
            return Err(Error::InvalidSequence(format!(
                "negative order {}",
                entries[0]
            )));
        }
        if let Some(w) = entries.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSequence(format!(
                "orders must increase strictly, found {} then {}",
                w[0], w[1]
            )));
        }
        let last = *entries.last().expect("non-empty");
        if last > degree {
            return Err(Error::InvalidSequence(format!(
                "order {last} exceeds degree {degree}"
            )));
        }
        Ok(Self { entries, degree })
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn rank(&self) -> usize {
        self.entries.len() - 1
    }
}

impl fmt::Display for VanishingSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.entries.iter().map(i64::to_string).collect();
        write!(f, "({}) d={}", items.join(","), self.degree)
    }
}

/// `b_i = d - a_{r-i}`, the smallest sequence compatible with `a`.
pub fn complementary_sequence(a: &VanishingSequence) -> VanishingSequence {
    let entries = a.entries.iter().rev().map(|x| a.degree - x).collect();
    VanishingSequence {
        entries,
        degree: a.degree,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Compatibility {
    Incompatible,
    Compatible,
    Refined,
}

pub fn is_compatible(a_y: &VanishingSequence, a_z: &VanishingSequence) -> Result<Compatibility> {
    if a_y.degree != a_z.degree {
        return Err(Error::InvalidSequence(format!(
            "degrees differ ({} vs {})",
            a_y.degree, a_z.degree
        )));
    }
    if a_y.rank() != a_z.rank() {
        return Err(Error::LengthMismatch {
            left: a_y.entries.len(),
            right: a_z.entries.len(),
        });
    }
    let r = a_y.rank();
    let d = a_y.degree;
    let sums: Vec<i64> = (0..=r)
        .map(|i| a_y.entries[i] + a_z.entries[r - i])
        .collect();
    Ok(if sums.iter().all(|&s| s == d) {
        Compatibility::Refined
    } else if sums.iter().all(|&s| s >= d) {
        Compatibility::Compatible
    } else {
        Compatibility::Incompatible
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinComponent {
    Hyp,
    Odd,
    Even,
}

/// Vanishing orders of the canonical series at the zero of a general
/// differential in each component of the minimal stratum.
pub fn bullock_sequence(g: i64, component: SpinComponent) -> Result<VanishingSequence> {
    let min = match component {
        SpinComponent::Hyp => 2,
        SpinComponent::Odd => 3,
        SpinComponent::Even => 4,
    };
    if g < min {
        return Err(Error::GenusOutOfRange {
            genus: g,
            reason: "component is empty in this genus",
        });
    }
    let entries = match component {
        SpinComponent::Hyp => (0..g).map(|i| 2 * i).collect(),
        SpinComponent::Odd => (0..=g - 2).chain([2 * g - 2]).collect(),
        SpinComponent::Even => (0..=g - 3).chain([g - 1, 2 * g - 2]).collect(),
    };
    VanishingSequence::new(entries, 2 * g - 2)
}

/// `alpha` is `k`-saturated for `mu` (sum `2g`): it sums to `g`, equals
/// `m_k` at the 1-based index `k`, is dominated by `mu`, and `m_k <= g`.
pub fn k_saturated_check(mu: &[i64], alpha: &[i64], k: usize) -> bool {
    if mu.len() != alpha.len() || k == 0 || k > mu.len() {
        return false;
    }
    let total: i64 = mu.iter().sum();
    if total % 2 != 0 {
        return false;
    }
    let g = total / 2;
    alpha.iter().sum::<i64>() == g
        && alpha[k - 1] == mu[k - 1]
        && alpha.iter().zip(mu).all(|(a, m)| 0 <= *a && a <= m)
        && mu[k - 1] <= g
}

/// The `k`-saturated partition that fills the remaining entries greedily in
/// label order.
pub fn saturated_partition(mu: &[i64], k: usize) -> Result<Vec<i64>> {
    if k == 0 || k > mu.len() {
        return Err(Error::InvalidPartition(format!(
            "index {k} outside 1..={}",
            mu.len()
        )));
    }
    let total: i64 = mu.iter().sum();
    if total % 2 != 0 || mu.iter().any(|&m| m < 1) {
        return Err(Error::InvalidPartition(format!(
            "{mu:?} is not a positive partition of an even number"
        )));
    }
    let g = total / 2;
    let mut alpha = vec![0; mu.len()];
    alpha[k - 1] = mu[k - 1];
    let mut left = g - mu[k - 1];
    for (i, m) in mu.iter().enumerate() {
        if i != k - 1 {
            let take = left.min(*m).max(0);
            alpha[i] = take;
            left -= take;
        }
    }
    if !k_saturated_check(mu, &alpha, k) {
        return Err(Error::InvalidPartition(format!(
            "no {k}-saturated partition for {mu:?}"
        )));
    }
    Ok(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(a: &[i64], d: i64) -> VanishingSequence {
        VanishingSequence::new(a.to_vec(), d).unwrap()
    }

    #[test]
    fn complements() {
        for g in 3..12 {
            let input: Vec<i64> = [0].into_iter().chain(2..g).chain([g + 1, 2 * g]).collect();
            let expected: Vec<i64> = [0, g - 1]
                .into_iter()
                .chain(g + 1..=2 * g - 2)
                .chain([2 * g])
                .collect();
            assert_eq!(
                complementary_sequence(&seq(&input, 2 * g)),
                seq(&expected, 2 * g)
            );
        }
        let id = seq(&[0, 1, 2, 3], 3);
        assert_eq!(complementary_sequence(&id), id);
    }

    #[test]
    fn compatibility() {
        let a = seq(&[0, 2, 5], 7);
        assert_eq!(
            is_compatible(&a, &complementary_sequence(&a)).unwrap(),
            Compatibility::Refined
        );
        let h = bullock_sequence(5, SpinComponent::Hyp).unwrap();
        assert_eq!(is_compatible(&h, &h).unwrap(), Compatibility::Refined);
        assert_eq!(
            is_compatible(&seq(&[0, 1], 3), &seq(&[0, 1], 3)).unwrap(),
            Compatibility::Incompatible
        );
        assert_eq!(
            is_compatible(&seq(&[1, 3], 3), &seq(&[1, 3], 3)).unwrap(),
            Compatibility::Compatible
        );
        assert!(is_compatible(&seq(&[0, 1], 3), &seq(&[0, 1], 4)).is_err());
        assert!(is_compatible(&seq(&[0, 1], 3), &seq(&[0, 1, 2], 3)).is_err());
    }

    #[test]
    fn bullock() {
        assert_eq!(
            bullock_sequence(4, SpinComponent::Even).unwrap(),
            seq(&[0, 1, 3, 6], 6)
        );
        assert_eq!(
            bullock_sequence(3, SpinComponent::Odd).unwrap(),
            seq(&[0, 1, 4], 4)
        );
        assert_eq!(
            bullock_sequence(2, SpinComponent::Hyp).unwrap(),
            seq(&[0, 2], 2)
        );
        assert!(bullock_sequence(3, SpinComponent::Even).is_err());
        for g in 4..20 {
            for c in [SpinComponent::Hyp, SpinComponent::Odd, SpinComponent::Even] {
                let s = bullock_sequence(g, c).unwrap();
                assert_eq!(s.rank() as i64, g - 1);
                assert_eq!(*s.entries().last().unwrap(), 2 * g - 2);
            }
        }
    }

    #[test]
    fn saturation() {
        for g in 2..10 {
            assert!(k_saturated_check(&[g, g], &[g, 0], 1));
            assert_eq!(saturated_partition(&[g, g], 1).unwrap(), vec![g, 0]);
        }
        assert!(!k_saturated_check(&[5, 3], &[5, 0], 1));
        assert!(!k_saturated_check(&[4, 4], &[3, 1], 1));
        assert!(saturated_partition(&[5, 3], 1).is_err());
        assert_eq!(saturated_partition(&[2, 3, 3], 1).unwrap(), vec![2, 2, 0]);
    }

    #[test]
    fn invalid_sequences() {
        assert!(VanishingSequence::new(vec![0, 0], 3).is_err());
        assert!(VanishingSequence::new(vec![-1, 2], 3).is_err());
        assert!(VanishingSequence::new(vec![0, 4], 3).is_err());
        let json = serde_json::to_string(&seq(&[0, 2], 4)).unwrap();
        assert_eq!(json, r#"{"a":[0,2],"d":4}"#);
        assert!(serde_json::from_str::<VanishingSequence>(r#"{"a":[2,1],"d":4}"#).is_err());
    }
}
