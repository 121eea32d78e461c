use std::cmp::Ordering;

use crate::symexpr::Mono;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderKind {
    Lex,
    GrLex,
}

/// Monomial order: a kind plus a variable priority list (highest first).
///
/// Variables missing from the priority list rank below all listed ones, in
/// their natural index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialOrder {
    kind: OrderKind,
    priority: Vec<usize>,
}

impl MonomialOrder {
    pub fn new(kind: OrderKind, priority: Vec<usize>) -> Self {
        let mut seen = std::collections::HashSet::new();
        assert!(priority.iter().all(|v| seen.insert(*v)), "repeated variable in priority list");
        MonomialOrder { kind, priority }
    }

    /// Lexicographic with variable 0 highest.
    pub fn lex() -> Self {
        Self::new(OrderKind::Lex, Vec::new())
    }

    pub fn grlex() -> Self {
        Self::new(OrderKind::GrLex, Vec::new())
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    /// Full ranking of the `n` variables, highest first.
    pub fn ranking(&self, n: usize) -> Vec<usize> {
        let mut r: Vec<usize> = self.priority.iter().copied().filter(|&v| v < n).collect();
        r.extend((0..n).filter(|v| !self.priority.contains(v)));
        r
    }

    pub fn cmp(&self, a: &Mono, b: &Mono) -> Ordering {
        if self.kind == OrderKind::GrLex {
            let o = a.degree().cmp(&b.degree());
            if o != Ordering::Equal {
                return o;
            }
        }
        if self.priority.is_empty() {
            return a.exponents().cmp(b.exponents());
        }
        for v in self.ranking(a.exponents().len()) {
            let o = a.exp(v).cmp(&b.exp(v));
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    }

    /// Lex with the natural variable order, which matches the storage order of terms.
    pub fn is_natural_lex(&self) -> bool {
        self.kind == OrderKind::Lex && self.priority.iter().enumerate().all(|(i, v)| i == *v)
    }

    /// True when every variable in `block` outranks every variable outside it.
    pub fn is_elimination_order_for(&self, block: &[usize], n: usize) -> bool {
        self.kind == OrderKind::Lex
            && self.ranking(n).iter().take(block.len()).all(|v| block.contains(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lex_and_grlex() {
        let a = Mono::from_exponents(&[1, 0]);
        let b = Mono::from_exponents(&[0, 3]);
        assert_eq!(MonomialOrder::lex().cmp(&a, &b), Ordering::Greater);
        assert_eq!(MonomialOrder::grlex().cmp(&a, &b), Ordering::Less);
        let y_first = MonomialOrder::new(OrderKind::Lex, vec![1]);
        assert_eq!(y_first.cmp(&a, &b), Ordering::Less);
        assert!(y_first.is_elimination_order_for(&[1], 2));
        assert!(!y_first.is_elimination_order_for(&[0], 2));
    }
}
