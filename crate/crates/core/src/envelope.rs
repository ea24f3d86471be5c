//! Exact lower envelopes of lines on `[0, 1]`.
//!
//! The pointwise minimum of finitely many affine functions of `y` is concave
//! and piecewise linear. It is stored as consecutive pieces, each carrying
//! the line that is active on it.

use std::collections::HashSet;

use num_traits::Zero;

use crate::arith::{affine_positivity_interval, int, AffineInY, Rational, RationalInterval};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub line: AffineInY,
    pub lo: Rational,
    pub hi: Rational,
}

/// Lower envelope on `[0, 1]`; no pieces means `+inf` (the minimum of no
/// lines).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Envelope {
    pieces: Vec<Piece>,
}

fn crossing(a: &AffineInY, b: &AffineInY) -> Option<Rational> {
    let ds = &a.slope - &b.slope;
    if ds.is_zero() {
        None
    } else {
        Some((&b.intercept - &a.intercept) / ds)
    }
}

impl Envelope {
    pub fn infinite() -> Self {
        Self::default()
    }

    pub fn is_infinite(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn lines(&self) -> impl Iterator<Item = &AffineInY> {
        self.pieces.iter().map(|p| &p.line)
    }

    pub fn from_lines<'a, I>(lines: I) -> Self
    where
        I: IntoIterator<Item = &'a AffineInY>,
    {
        let mut seen = HashSet::new();
        let lines: Vec<&AffineInY> = lines.into_iter().filter(|l| seen.insert(*l)).collect();
        if lines.is_empty() {
            return Self::infinite();
        }
        let zero = Rational::zero();
        let one = int(1);
        // active line at 0: smallest value, then smallest slope
        let mut cur = lines[0];
        for l in &lines[1..] {
            let (a, b) = (&l.intercept, &cur.intercept);
            if a < b || (a == b && l.slope < cur.slope) {
                cur = l;
            }
        }
        let mut pieces = Vec::new();
        let mut lo = zero;
        loop {
            // next line to take over: earliest crossing after lo among
            // lines with a smaller slope; ties go to the smallest slope
            let mut next: Option<(Rational, &AffineInY)> = None;
            for l in &lines {
                if l.slope >= cur.slope {
                    continue;
                }
                let y = crossing(cur, l).expect("slopes differ");
                if y < lo {
                    continue;
                }
                let better = match &next {
                    None => true,
                    Some((ny, nl)) => y < *ny || (y == *ny && l.slope < nl.slope),
                };
                if better {
                    next = Some((y, l));
                }
            }
            match next {
                Some((y, l)) if y < one => {
                    if y > lo {
                        pieces.push(Piece {
                            line: cur.clone(),
                            lo: lo.clone(),
                            hi: y.clone(),
                        });
                    }
                    lo = y;
                    cur = l;
                }
                _ => {
                    pieces.push(Piece {
                        line: cur.clone(),
                        lo,
                        hi: one,
                    });
                    break;
                }
            }
        }
        Self { pieces }
    }

    pub fn eval(&self, y: &Rational) -> Option<Rational> {
        self.pieces
            .iter()
            .find(|p| &p.lo <= y && y <= &p.hi)
            .map(|p| p.line.eval(y))
    }

    /// Pointwise minimum.
    pub fn min(&self, other: &Self) -> Self {
        if self.is_infinite() {
            return other.clone();
        }
        if other.is_infinite() {
            return self.clone();
        }
        Self::from_lines(self.lines().chain(other.lines()))
    }

    /// Pointwise sum.
    pub fn add(&self, other: &Self) -> Self {
        if self.is_infinite() || other.is_infinite() {
            return Self::infinite();
        }
        let mut pieces: Vec<Piece> = Vec::new();
        let (mut i, mut j) = (0, 0);
        let mut lo = Rational::zero();
        while i < self.pieces.len() && j < other.pieces.len() {
            let (a, b) = (&self.pieces[i], &other.pieces[j]);
            let hi = if a.hi < b.hi {
                a.hi.clone()
            } else {
                b.hi.clone()
            };
            let line = &a.line + &b.line;
            if hi > lo {
                match pieces.last_mut() {
                    Some(last) if last.line == line => last.hi = hi.clone(),
                    _ => pieces.push(Piece {
                        line,
                        lo: lo.clone(),
                        hi: hi.clone(),
                    }),
                }
            }
            if a.hi == hi {
                i += 1;
            }
            if b.hi == hi {
                j += 1;
            }
            lo = hi;
        }
        Self { pieces }
    }

    pub fn shift(&self, line: &AffineInY) -> Self {
        Self {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    line: &p.line + line,
                    lo: p.lo.clone(),
                    hi: p.hi.clone(),
                })
                .collect(),
        }
    }

    /// `{y in [0,1] : envelope(y) > 0}`.
    pub fn positivity(&self) -> RationalInterval {
        let unit = RationalInterval::unit();
        self.lines().fold(unit.clone(), |acc, l| {
            acc.intersect(&affine_positivity_interval(l, &unit))
        })
    }

    /// Largest value on `[0, 1]` and the smallest `y` attaining it.
    pub fn argmax(&self) -> Option<(Rational, Rational)> {
        let mut best: Option<(Rational, Rational)> = None;
        let candidates = self.pieces.iter().flat_map(|p| {
            [
                (p.lo.clone(), p.line.eval(&p.lo)),
                (p.hi.clone(), p.line.eval(&p.hi)),
            ]
        });
        for (y, v) in candidates {
            let better = match &best {
                None => true,
                Some((by, bv)) => v > *bv || (v == *bv && y < *by),
            };
            if better {
                best = Some((y, v));
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn line(a: i64, b: i64) -> AffineInY {
        AffineInY::new(int(a), int(b))
    }

    fn brute_min(lines: &[AffineInY], y: &Rational) -> Rational {
        lines.iter().map(|l| l.eval(y)).min().unwrap()
    }

    #[test]
    fn envelope_matches_pointwise_minimum() {
        let lines = vec![
            line(0, 1),
            line(1, -1),
            line(2, -3),
            line(1, 0),
            line(0, 1),
            line(-1, 5),
        ];
        let env = Envelope::from_lines(&lines);
        for k in 0..=60 {
            let y = rat(k, 60);
            assert_eq!(env.eval(&y).unwrap(), brute_min(&lines, &y), "y={y}");
        }
        assert_eq!(env.pieces().first().unwrap().lo, int(0));
        assert_eq!(env.pieces().last().unwrap().hi, int(1));
    }

    #[test]
    fn sum_and_min() {
        let a = Envelope::from_lines(&[line(0, 1), line(1, -1)]);
        let b = Envelope::from_lines(&[line(2, -3), line(0, 2)]);
        let s = a.add(&b);
        let m = a.min(&b);
        for k in 0..=24 {
            let y = rat(k, 24);
            let (va, vb) = (a.eval(&y).unwrap(), b.eval(&y).unwrap());
            assert_eq!(s.eval(&y).unwrap(), &va + &vb);
            assert_eq!(m.eval(&y).unwrap(), va.min(vb));
        }
        assert!(Envelope::infinite().add(&a).is_infinite());
        assert_eq!(Envelope::infinite().min(&a), a);
    }

    #[test]
    fn positivity_and_argmax() {
        // min(y - 1/4, 3/4 - y) peaks at 1/2
        let env = Envelope::from_lines(&[
            AffineInY::new(rat(-1, 4), int(1)),
            AffineInY::new(rat(3, 4), int(-1)),
        ]);
        assert_eq!(
            env.positivity(),
            RationalInterval::open(rat(1, 4), rat(3, 4))
        );
        assert_eq!(env.argmax().unwrap(), (rat(1, 2), rat(1, 4)));
        let flat = Envelope::from_lines(&[line(-1, 0)]);
        assert!(flat.positivity().is_empty());
        assert_eq!(flat.argmax().unwrap(), (int(0), int(-1)));
    }
}
