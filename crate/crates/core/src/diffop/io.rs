use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symexpr::{parse_expr, VarSet};

use super::multiindex::MultiIndex;
use super::operator::{LinDiffOp, OperatorFamily};

/// JSON operator document:
/// `{"dim": 2, "vars": ["x1","x2"], "coeffs": {"2,1": "x1*x2"}, "family": false}`.
///
/// `vars` lists the base variables; families may also list `y`, which is
/// appended when missing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    pub dim: u8,
    pub vars: Vec<String>,
    pub coeffs: BTreeMap<String, String>,
    #[serde(default)]
    pub family: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Operator {
    Linear(LinDiffOp),
    Family(OperatorFamily),
}

impl Operator {
    /// The underlying operator; for a family, `y` is a frozen parameter.
    pub fn linear(&self) -> &LinDiffOp {
        match self {
            Operator::Linear(op) => op,
            Operator::Family(f) => f.operator(),
        }
    }

    pub fn dim(&self) -> usize {
        self.linear().dim()
    }

    /// The operator as a family (y-independent when not already one).
    pub fn to_family(&self) -> Result<OperatorFamily> {
        match self {
            Operator::Linear(op) => OperatorFamily::from_operator(op),
            Operator::Family(f) => Ok(f.clone()),
        }
    }
}

impl OperatorFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("operator file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn build(&self) -> Result<Operator> {
        let dim = self.dim as usize;
        if dim != 1 && dim != 2 {
            return Err(Error::Invalid(format!("dim must be 1 or 2, got {dim}")));
        }
        let mut names = self.vars.clone();
        let has_y = names.iter().any(|n| n == "y");
        if has_y && !self.family {
            return Err(Error::Invalid("`y` is reserved for the fiber variable of families".into()));
        }
        if self.family && !has_y {
            names.push("y".into());
        }
        if self.family && names.last().map(String::as_str) != Some("y") {
            return Err(Error::Invalid("`y` must be listed after the base variables".into()));
        }
        let base_count = names.len() - usize::from(self.family);
        if base_count != dim {
            return Err(Error::Invalid(format!("expected {dim} base variables, found {base_count}")));
        }
        let vars = VarSet::new(names)?;
        let mut coeffs = Vec::new();
        for (k, text) in &self.coeffs {
            let a = MultiIndex::parse(k, dim)?;
            let c = parse_expr(text, &vars).map_err(|e| match e {
                Error::Syntax { pos, msg } => Error::Syntax { pos, msg: format!("{msg} in coefficient \"{k}\"") },
                other => other,
            })?;
            coeffs.push((a, c));
        }
        let base: Vec<usize> = (0..dim).collect();
        let op = LinDiffOp::plain(&vars, &base, coeffs)?;
        if self.family {
            Ok(Operator::Family(OperatorFamily::new(op)?))
        } else {
            Ok(Operator::Linear(op))
        }
    }

    pub fn from_operator(op: &Operator) -> Self {
        let (lin, family) = match op {
            Operator::Linear(l) => (l, false),
            Operator::Family(f) => (f.operator(), true),
        };
        OperatorFile {
            dim: lin.dim() as u8,
            vars: lin.frame().base_names(),
            coeffs: lin.coeffs().iter().map(|(a, c)| (a.to_string(), c.to_string())).collect(),
            family,
        }
    }
}
