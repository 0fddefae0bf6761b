//! Potentials used to certify progress of the two-phase algorithms.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use crate::allocation::Allocation;
use crate::instance::{Instance, Side, Vertex};
use crate::rational::Rational;

/// `(sum of job loads, rank-weighted job load)`. Derived ordering is
/// lexicographic, so "decreases" means `new < old`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PotentialBetter {
    pub theta1: Rational,
    pub theta2: Rational,
}

pub fn potential_better(instance: &Instance, x: &Allocation) -> PotentialBetter {
    let mut theta1 = Rational::zero();
    let mut theta2 = Rational::zero();
    for (e, edge) in instance.edges().iter().enumerate() {
        let v = x.get(e);
        if v.is_zero() {
            continue;
        }
        theta1 += v;
        theta2 += v * Rational::from_integer(edge.rank(Side::Job).into());
    }
    PotentialBetter { theta1, theta2 }
}

/// A vertex's positively allocated edges as `(rank, value)`, best rank
/// first.
///
/// Ordered as the value vector indexed by rank: more allocation on a better
/// rank wins at the first rank where the two differ. Greater is better.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LexPosition(pub Vec<(u32, Rational)>);

impl Ord for LexPosition {
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut a, mut b) = (self.0.iter().peekable(), other.0.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((ra, va)), Some((rb, vb))) => match ra.cmp(rb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match va.cmp(vb) {
                        Ordering::Equal => {
                            a.next();
                            b.next();
                        }
                        unequal => return unequal,
                    },
                },
            }
        }
    }
}

impl PartialOrd for LexPosition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn lex_position(instance: &Instance, x: &Allocation, v: Vertex) -> LexPosition {
    LexPosition(
        instance
            .prefs(v)
            .iter()
            .filter(|&&e| x.get(e).is_positive())
            .map(|&e| (instance.rank(v, e), x.get(e).clone()))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fig2;
    use crate::rational::{int, ratio};

    #[test]
    fn running_example_values() {
        let (inst, x) = fig2();
        let p = potential_better(&inst, &x);
        assert_eq!(p.theta1, int(4));
        assert_eq!(p.theta2, int(7));
        let zero = potential_better(&inst, &Allocation::zero(&inst));
        assert_eq!((zero.theta1, zero.theta2), (int(0), int(0)));
        let m1 = inst.find_vertex("m1").unwrap();
        assert_eq!(
            lex_position(&inst, &x, m1),
            LexPosition(vec![(1, int(1)), (3, int(1))])
        );
    }

    #[test]
    fn lex_order() {
        let a = LexPosition(vec![(1, int(1))]);
        let b = LexPosition(vec![(2, int(5))]);
        let c = LexPosition(vec![(1, int(1)), (3, ratio(1, 2))]);
        let d = LexPosition(vec![(1, ratio(1, 2)), (2, int(9))]);
        assert!(a > b);
        assert!(c > a);
        assert!(a > d);
        assert!(LexPosition(vec![]) < b);
        assert_eq!(a.cmp(&a.clone()), Ordering::Equal);
    }
}
