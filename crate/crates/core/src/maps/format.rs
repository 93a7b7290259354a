//! Text record for maps:
//!
//! ```text
//! darts=6; sigma=(0)(1)(2 3 4 5); alpha=(0 2)(1 5)(3 4); externals=[0,1]
//! ```
//!
//! Fields are separated by `;` and may come in any order. `sigma` lists
//! cycles; darts absent from it are fixed points. `alpha` lists every edge
//! as a 2-cycle. `externals` is the ordered list of external darts.

use super::{CombinatorialMap, MapError};
use std::fmt;
use std::str::FromStr;

fn parse_err(field: &str, message: impl Into<String>) -> MapError {
    MapError::Parse {
        field: field.to_string(),
        message: message.into(),
    }
}

fn parse_cycles(field: &str, text: &str) -> Result<Vec<Vec<usize>>, MapError> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| parse_err(field, format!("expected `(` at `{rest}`")))?;
        let close = body
            .find(')')
            .ok_or_else(|| parse_err(field, "unclosed cycle"))?;
        let cycle = body[..close]
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| parse_err(field, format!("`{t}` is not a dart index")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if cycle.is_empty() {
            return Err(parse_err(field, "empty cycle"));
        }
        out.push(cycle);
        rest = body[close + 1..].trim_start();
    }
    Ok(out)
}

impl FromStr for CombinatorialMap {
    type Err = MapError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (mut darts, mut sigma, mut alpha, mut externals) = (None, None, None, None);
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| parse_err(part, "expected `name=value`"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "darts" => {
                    darts = Some(
                        value
                            .parse::<usize>()
                            .map_err(|_| parse_err(key, format!("`{value}` is not a count")))?,
                    )
                }
                "sigma" => sigma = Some(parse_cycles(key, value)?),
                "alpha" => {
                    let pairs = parse_cycles(key, value)?
                        .into_iter()
                        .map(|c| match c[..] {
                            [a, b] => Ok((a, b)),
                            _ => Err(parse_err(key, "every alpha cycle must have two darts")),
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    alpha = Some(pairs)
                }
                "externals" => {
                    let inner = value
                        .strip_prefix('[')
                        .and_then(|v| v.strip_suffix(']'))
                        .ok_or_else(|| parse_err(key, "expected `[d, ...]`"))?;
                    externals = Some(
                        inner
                            .split(',')
                            .map(str::trim)
                            .filter(|t| !t.is_empty())
                            .map(|t| {
                                t.parse::<usize>()
                                    .map_err(|_| parse_err(key, format!("`{t}` is not a dart index")))
                            })
                            .collect::<Result<Vec<_>, _>>()?,
                    )
                }
                other => return Err(parse_err(other, "unknown field")),
            }
        }
        let darts = darts.ok_or_else(|| parse_err("darts", "missing"))?;
        let sigma = sigma.unwrap_or_default();
        let alpha = alpha.ok_or_else(|| parse_err("alpha", "missing"))?;
        let externals = externals.ok_or_else(|| parse_err("externals", "missing"))?;
        CombinatorialMap::from_cycles(darts, &sigma, &alpha, externals)
    }
}

impl fmt::Display for CombinatorialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "darts={}; sigma=", self.dart_count())?;
        let mut seen = vec![false; self.dart_count()];
        for start in 0..self.dart_count() {
            if seen[start] {
                continue;
            }
            write!(f, "({start}")?;
            seen[start] = true;
            let mut h = self.sigma()[start];
            while h != start {
                write!(f, " {h}")?;
                seen[h] = true;
                h = self.sigma()[h];
            }
            write!(f, ")")?;
        }
        write!(f, "; alpha=")?;
        for (a, b) in self.edges() {
            write!(f, "({a} {b})")?;
        }
        let ext: Vec<String> = self.externals().iter().map(|e| e.to_string()).collect();
        write!(f, "; externals=[{}]", ext.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn round_trip() {
        for m in [example_map(), single_edge(), tadpole(), sunset()] {
            let text = m.to_string();
            let back: CombinatorialMap = text.parse().unwrap();
            assert_eq!(back, m, "{text}");
        }
    }

    #[test]
    fn parses_with_omitted_fixed_points() {
        let m: CombinatorialMap = "externals=[0, 1]; darts=6; sigma=(2 3 4 5); alpha=(0 2)(3 4)(5 1)"
            .parse()
            .unwrap();
        assert_eq!(m, tadpole());
    }

    #[test]
    fn parse_errors_name_the_field() {
        let err = "darts=2; alpha=(0 1 2); externals=[0,1]"
            .parse::<CombinatorialMap>()
            .unwrap_err();
        assert!(matches!(err, MapError::Parse { ref field, .. } if field == "alpha"));
        let err = "darts=x; alpha=(0 1); externals=[0,1]"
            .parse::<CombinatorialMap>()
            .unwrap_err();
        assert!(matches!(err, MapError::Parse { ref field, .. } if field == "darts"));
        let err = "darts=2; alpha=(0 1)".parse::<CombinatorialMap>().unwrap_err();
        assert!(matches!(err, MapError::Parse { ref field, .. } if field == "externals"));
    }
}
