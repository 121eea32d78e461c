use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::symexpr::Q;

/// Exponent vector over the base variables.
///
/// Ordered by decreasing total degree, then lexicographically decreasing, so
/// maps iterate as (3,0), (2,1), (1,2), (0,3), (2,0), …
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u8>);

impl MultiIndex {
    pub fn new(e: Vec<u8>) -> Self {
        MultiIndex(e)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn order(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn get(&self, i: usize) -> u8 {
        self.0[i]
    }

    pub fn exponents(&self) -> &[u8] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn plus(&self, i: usize) -> Self {
        let mut e = self.0.clone();
        e[i] += 1;
        MultiIndex(e)
    }

    pub fn minus(&self, i: usize) -> Option<Self> {
        let mut e = self.0.clone();
        e[i] = e[i].checked_sub(1)?;
        Some(MultiIndex(e))
    }

    /// First direction with a positive exponent.
    pub fn first_nonzero(&self) -> Option<usize> {
        self.0.iter().position(|&e| e > 0)
    }

    pub fn factorial(&self) -> u64 {
        self.0.iter().map(|&e| (1..=e as u64).product::<u64>()).product()
    }

    pub fn factorial_q(&self) -> Q {
        Q::from_integer(BigInt::from(self.factorial()))
    }

    /// Multinomial coefficient |α|!/α!.
    pub fn multinomial(&self) -> u64 {
        (1..=self.order() as u64).product::<u64>() / self.factorial()
    }

    /// All indices of total order `k`, in canonical order.
    pub fn of_order(dim: usize, k: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u8; dim];
        fill(&mut cur, 0, k, &mut out);
        out.sort();
        out
    }

    /// All indices with order at most `k`, in canonical order.
    pub fn up_to(dim: usize, k: usize) -> Vec<MultiIndex> {
        (0..=k).rev().flat_map(|j| Self::of_order(dim, j)).collect()
    }

    /// Index sequence (i₁ ≤ i₂ ≤ …) whose counts are α.
    pub fn to_sequence(&self) -> Vec<usize> {
        self.0.iter().enumerate().flat_map(|(i, &e)| std::iter::repeat(i).take(e as usize)).collect()
    }

    pub fn from_sequence(dim: usize, seq: &[usize]) -> Self {
        let mut e = vec![0u8; dim];
        for &i in seq {
            e[i] += 1;
        }
        MultiIndex(e)
    }

    /// Parses the comma-separated key form, e.g. `"2,1"`.
    pub fn parse(s: &str, dim: usize) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != dim {
            return Err(Error::Invalid(format!("multi-index `{s}` must have {dim} entries")));
        }
        let e = parts
            .iter()
            .map(|p| p.parse::<u8>().map_err(|_| Error::Invalid(format!("bad multi-index entry `{p}` in `{s}`"))))
            .collect::<Result<Vec<u8>>>()?;
        Ok(MultiIndex(e))
    }
}

fn fill(cur: &mut [u8], i: usize, left: usize, out: &mut Vec<MultiIndex>) {
    if i + 1 == cur.len() {
        cur[i] = left as u8;
        out.push(MultiIndex(cur.to_vec()));
        return;
    }
    for e in 0..=left {
        cur[i] = e as u8;
        fill(cur, i + 1, left - e, out);
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        other.order().cmp(&self.order()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_and_enumeration() {
        let all = MultiIndex::up_to(2, 1);
        let shown: Vec<String> = all.iter().map(|a| a.to_string()).collect();
        assert_eq!(shown, ["1,0", "0,1", "0,0"]);
        assert_eq!(MultiIndex::of_order(2, 3).len(), 4);
        assert_eq!(MultiIndex::of_order(1, 3), vec![MultiIndex::new(vec![3])]);
        assert_eq!(MultiIndex::up_to(2, 3).len(), 10);
    }

    #[test]
    fn factorials() {
        let a = MultiIndex::new(vec![2, 1]);
        assert_eq!(a.factorial(), 2);
        assert_eq!(a.multinomial(), 3);
        assert_eq!(a.to_sequence(), vec![0, 0, 1]);
        assert_eq!(MultiIndex::from_sequence(2, &[1, 0, 0]), a);
        assert_eq!(MultiIndex::parse("2, 1", 2).unwrap(), a);
        assert!(MultiIndex::parse("2", 2).is_err());
    }
}
