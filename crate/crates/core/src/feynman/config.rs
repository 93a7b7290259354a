//! TOML theory documents.
//!
//! ```toml
//! N = 2
//! A = [2.0, -1.0, -1.0, 2.0]   # row-major
//! externals = [0, 1]           # optional
//!
//! [[kernels]]
//! arity = 4
//! kind = "local"
//! g = 0.1
//!
//! [[kernels]]
//! arity = 3
//! kind = "dense"
//! g = 1.0                      # optional for dense, default 1
//! tensor = [...]               # N^arity entries, row-major
//! ```

use super::{Theory, TheoryError, VertexKernel};
use crate::operator::Operator;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Syntax(String),
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
}

fn field(name: impl Into<String>, message: impl ToString) -> ConfigError {
    ConfigError::Field {
        field: name.into(),
        message: message.to_string(),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTheory {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "A")]
    a: Vec<f64>,
    #[serde(default)]
    externals: Vec<usize>,
    #[serde(default)]
    kernels: Vec<RawKernel>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawKernel {
    arity: usize,
    kind: String,
    g: Option<f64>,
    tensor: Option<Vec<f64>>,
}

/// Parses and validates a theory document.
pub fn parse_theory(text: &str) -> Result<Theory, ConfigError> {
    let raw: RawTheory = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    if raw.n == 0 {
        return Err(field("N", "must be positive"));
    }
    if raw.a.len() != raw.n * raw.n {
        return Err(field("A", format!("expected {} entries, got {}", raw.n * raw.n, raw.a.len())));
    }
    let op = Operator::from_row_major(raw.n, &raw.a).map_err(|e| field("A", e))?;
    let mut kernels = Vec::new();
    for (i, k) in raw.kernels.into_iter().enumerate() {
        let name = |f: &str| format!("kernels[{i}].{f}");
        let kernel = match k.kind.as_str() {
            "local" => {
                if k.tensor.is_some() {
                    return Err(field(name("tensor"), "not allowed for local kernels"));
                }
                VertexKernel::local(k.arity, k.g.ok_or_else(|| field(name("g"), "missing"))?)
            }
            "dense" => VertexKernel::dense(
                k.arity,
                k.g.unwrap_or(1.0),
                k.tensor.ok_or_else(|| field(name("tensor"), "missing"))?,
            ),
            other => return Err(field(name("kind"), format!("expected `local` or `dense`, got `{other}`"))),
        };
        kernels.push(kernel);
    }
    Theory::new(op, kernels, raw.externals).map_err(|e| {
        let f = match e {
            TheoryError::SiteOutOfRange { .. } => "externals",
            TheoryError::TensorSize { .. } => "kernels.tensor",
            TheoryError::NonFinite => "kernels",
            TheoryError::ArityTooSmall(_) | TheoryError::DuplicateArity(_) => "kernels.arity",
        };
        field(f, e)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_mixed_theory() {
        let t = parse_theory(
            r#"
N = 2
A = [2.0, -1.0, -1.0, 2.0]
externals = [0, 1]

[[kernels]]
arity = 4
kind = "local"
g = 0.1

[[kernels]]
arity = 3
kind = "dense"
tensor = [1, 0, 0, 0, 0, 0, 0, 1]
"#,
        )
        .unwrap();
        assert_eq!(t.dim(), 2);
        assert_eq!(t.arities(), vec![4, 3]);
        assert_eq!(t.external_sites(), &[0, 1]);
    }

    #[test]
    fn errors_carry_context() {
        let err = parse_theory("N = 1\nA = [1.0]\n[[kernels]]\narity = 4\nkind = \"local\"\n").unwrap_err();
        assert!(err.to_string().contains("kernels[0].g"), "{err}");
        let err = parse_theory("N = 1\nA = [1.0, 2.0]\n").unwrap_err();
        assert!(err.to_string().contains("`A`"), "{err}");
        let err = parse_theory("N = 1\nA = [-1.0]\n").unwrap_err();
        assert!(err.to_string().contains("positive definite"), "{err}");
        let err = parse_theory("N = 1\nA = [1.0]\nexternals = [3]\n").unwrap_err();
        assert!(err.to_string().contains("externals"), "{err}");
        let err = parse_theory("N = 1\nA = [1.0\n").unwrap_err();
        assert!(err.to_string().contains("line"), "{err}");
    }
}
