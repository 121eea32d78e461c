use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Ordered list of variable names shared by every polynomial of a session.
///
/// Position 0 is the most significant variable for the graded-lexicographic
/// order used to normalize denominators.
#[derive(Clone)]
pub struct VarSet(Arc<[String]>);

impl VarSet {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, n) in names.iter().enumerate() {
            if !is_identifier(n) {
                return Err(Error::Invalid(format!("`{n}` is not a valid variable name")));
            }
            if names[..i].contains(n) {
                return Err(Error::DuplicateVariable(n.clone()));
            }
        }
        Ok(VarSet(names.into()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn name(&self, i: usize) -> &str {
        &self.0[i]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Appends new variables; existing positions are preserved.
    pub fn extend<I, S>(&self, names: I) -> Result<VarSet>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        VarSet::new(
            self.0
                .iter()
                .cloned()
                .chain(names.into_iter().map(Into::into)),
        )
    }

    /// True when `self` lists exactly the first `self.len()` variables of `other`.
    pub fn is_prefix_of(&self, other: &VarSet) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.len() <= other.len() && self.0.iter().zip(other.0.iter()).all(|(a, b)| a == b))
    }
}

impl PartialEq for VarSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for VarSet {}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_bad_names() {
        assert!(matches!(
            VarSet::new(["x", "x"]),
            Err(Error::DuplicateVariable(_))
        ));
        assert!(VarSet::new(["1x"]).is_err());
        assert!(VarSet::new(["x1", "a3_x"]).is_ok());
    }

    #[test]
    fn extension_keeps_prefix() {
        let v = VarSet::new(["x", "y"]).unwrap();
        let w = v.extend(["f1"]).unwrap();
        assert!(v.is_prefix_of(&w));
        assert!(!w.is_prefix_of(&v));
        assert_eq!(w.index("f1"), Some(2));
    }
}
