//! Line-oriented system definition files. The grammar is documented in
//! `docs/system-format.md`.

use floquet_core::expr::{parse_polynomial_with, parse_rational, Polynomial, Rational};
use floquet_core::floquet::{FourierOrbit, FourierSeries, PolynomialSystem};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    /// 1-based; 0 when the problem is not tied to a line.
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

const SECTIONS: [&str; 4] = ["field", "manifolds", "cofactor", "orbit"];
const DIRECTIVES: [&str; 4] = ["name", "dimension", "variables", "params"];

/// A polynomial source line with its line number.
#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    pub number: usize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemDefinition {
    pub name: Option<String>,
    pub dimension: usize,
    pub variables: Vec<String>,
    pub params: Vec<(String, Rational)>,
    pub field: Vec<Line>,
    pub manifolds: Option<Vec<Line>>,
    /// Row-major `(n-1)^2` entries.
    pub cofactor: Option<Vec<Line>>,
    pub period: f64,
    /// Indexed like `variables`.
    pub orbit: Vec<FourierSeries>,
}

/// Polynomials of a definition after parameter substitution.
#[derive(Debug, Clone)]
pub struct BuiltDefinition {
    pub system: PolynomialSystem,
    pub manifolds: Option<Vec<Polynomial>>,
    pub cofactor: Option<Vec<Vec<Polynomial>>>,
    pub orbit: FourierOrbit,
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_real(line: usize, token: &str) -> Result<f64, ParseError> {
    match token.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => err(
            line,
            format!("expected a finite real number, got `{token}`"),
        ),
    }
}

impl SystemDefinition {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut name = None;
        let mut dimension: Option<(usize, usize)> = None;
        let mut variables: Option<(usize, Vec<String>)> = None;
        let mut params: Vec<(String, Rational)> = Vec::new();
        let mut sections: Vec<(usize, &str, Vec<Line>)> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let number = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (head, rest) = match content.split_once(char::is_whitespace) {
                Some((h, r)) => (h, r.trim()),
                None => (content, ""),
            };
            if SECTIONS.contains(&head) {
                if !rest.is_empty() {
                    return err(
                        number,
                        format!("section header `{head}` takes no arguments"),
                    );
                }
                if let Some((first, ..)) = sections.iter().find(|(_, s, _)| *s == head) {
                    return err(
                        number,
                        format!("duplicate section `{head}` (first at line {first})"),
                    );
                }
                sections.push((number, head, Vec::new()));
                continue;
            }
            if DIRECTIVES.contains(&head) && sections.is_empty() {
                match head {
                    "name" => {
                        if name.is_some() {
                            return err(number, "duplicate `name`");
                        }
                        if rest.is_empty() {
                            return err(number, "`name` needs a value");
                        }
                        name = Some(rest.to_string());
                    }
                    "dimension" => {
                        if dimension.is_some() {
                            return err(number, "duplicate `dimension`");
                        }
                        match rest.parse::<usize>() {
                            Ok(n) if n >= 2 => dimension = Some((number, n)),
                            _ => {
                                return err(
                                    number,
                                    format!("dimension must be an integer >= 2, got `{rest}`"),
                                )
                            }
                        }
                    }
                    "variables" => {
                        if variables.is_some() {
                            return err(number, "duplicate `variables`");
                        }
                        let vars: Vec<String> =
                            rest.split_whitespace().map(str::to_string).collect();
                        for v in &vars {
                            if !is_identifier(v)
                                || SECTIONS.contains(&v.as_str())
                                || DIRECTIVES.contains(&v.as_str())
                            {
                                return err(number, format!("invalid variable name `{v}`"));
                            }
                        }
                        variables = Some((number, vars));
                    }
                    _ => {
                        for item in rest.split_whitespace() {
                            let Some((key, value)) = item.split_once('=') else {
                                return err(number, format!("expected name=value, got `{item}`"));
                            };
                            if !is_identifier(key) {
                                return err(number, format!("invalid parameter name `{key}`"));
                            }
                            if params.iter().any(|(k, _)| k == key) {
                                return err(number, format!("duplicate parameter `{key}`"));
                            }
                            let value = parse_rational(value).map_err(|e| ParseError {
                                line: number,
                                message: format!("parameter `{key}`: {e}"),
                            })?;
                            params.push((key.to_string(), value));
                        }
                    }
                }
                continue;
            }
            match sections.last_mut() {
                Some((_, _, lines)) => lines.push(Line {
                    number,
                    text: content.to_string(),
                }),
                None => {
                    return err(
                        number,
                        format!("unexpected `{content}` outside any section"),
                    )
                }
            }
        }

        let Some((dim_line, n)) = dimension else {
            return err(0, "missing `dimension`");
        };
        let Some((var_line, variables)) = variables else {
            return err(0, "missing `variables`");
        };
        if variables.len() != n {
            return err(
                var_line,
                format!(
                    "dimension {n} (line {dim_line}) but {} variables",
                    variables.len()
                ),
            );
        }
        for (i, v) in variables.iter().enumerate() {
            if variables[..i].contains(v) {
                return err(var_line, format!("duplicate variable `{v}`"));
            }
            if params.iter().any(|(k, _)| k == v) {
                return err(
                    var_line,
                    format!("`{v}` is both a variable and a parameter"),
                );
            }
        }

        let take = |name: &str| {
            sections
                .iter()
                .find(|(_, s, _)| *s == name)
                .map(|(l, _, body)| (*l, body.clone()))
        };
        let counted = |name: &str, expected: usize| -> Result<Option<Vec<Line>>, ParseError> {
            match take(name) {
                None => Ok(None),
                Some((line, body)) if body.len() != expected => err(
                    line,
                    format!(
                        "section `{name}` needs {expected} lines for dimension {n}, found {}",
                        body.len()
                    ),
                ),
                Some((_, body)) => Ok(Some(body)),
            }
        };
        let Some(field) = counted("field", n)? else {
            return err(0, "missing `field` section");
        };
        let manifolds = counted("manifolds", n - 1)?;
        let cofactor = counted("cofactor", (n - 1) * (n - 1))?;
        if cofactor.is_some() && manifolds.is_none() {
            return err(
                take("cofactor").map_or(0, |(l, _)| l),
                "`cofactor` needs a `manifolds` section",
            );
        }

        let Some((orbit_line, orbit_body)) = take("orbit") else {
            return err(0, "missing `orbit` section");
        };
        let mut lines = orbit_body.iter();
        let period = match lines.next() {
            Some(l) => match l.text.split_whitespace().collect::<Vec<_>>().as_slice() {
                ["period", value] => {
                    let p = parse_real(l.number, value)?;
                    if p <= 0.0 {
                        return err(l.number, "period must be positive");
                    }
                    p
                }
                _ => {
                    return err(
                        l.number,
                        "the orbit section must start with `period <real>`",
                    )
                }
            },
            None => return err(orbit_line, "empty `orbit` section"),
        };
        let mut orbit: Vec<Option<FourierSeries>> = vec![None; n];
        for l in lines {
            let tokens: Vec<&str> = l.text.split_whitespace().collect();
            let Some(idx) = variables.iter().position(|v| v == tokens[0]) else {
                return err(l.number, format!("unknown orbit variable `{}`", tokens[0]));
            };
            if orbit[idx].is_some() {
                return err(
                    l.number,
                    format!("duplicate orbit line for `{}`", tokens[0]),
                );
            }
            if tokens.len() < 2 || tokens.len() % 2 == 1 {
                return err(l.number, "expected `var a0 [a1 b1 a2 b2 ...]`");
            }
            let coeffs = tokens[1..]
                .iter()
                .map(|t| parse_real(l.number, t))
                .collect::<Result<Vec<_>, _>>()?;
            orbit[idx] = Some(FourierSeries {
                a0: coeffs[0],
                harmonics: coeffs[1..].chunks(2).map(|c| (c[0], c[1])).collect(),
            });
        }
        let orbit = orbit
            .into_iter()
            .zip(&variables)
            .map(|(s, v)| {
                s.ok_or_else(|| ParseError {
                    line: orbit_line,
                    message: format!("no orbit line for `{v}`"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;

        Ok(Self {
            name,
            dimension: n,
            variables,
            params,
            field,
            manifolds,
            cofactor,
            period,
            orbit,
        })
    }

    /// Replaces parameter values; every override must name a declared
    /// parameter.
    pub fn override_params(&mut self, overrides: &[(String, Rational)]) -> Result<(), ParseError> {
        for (key, value) in overrides {
            match self.params.iter_mut().find(|(k, _)| k == key) {
                Some(slot) => slot.1 = value.clone(),
                None => return err(0, format!("the file declares no parameter `{key}`")),
            }
        }
        Ok(())
    }

    pub fn build(&self) -> Result<BuiltDefinition, ParseError> {
        let parse = |l: &Line| {
            parse_polynomial_with(&l.text, &self.variables, &self.params).map_err(|e| ParseError {
                line: l.number,
                message: e.to_string(),
            })
        };
        let field = self
            .field
            .iter()
            .map(parse)
            .collect::<Result<Vec<_>, _>>()?;
        let system = PolynomialSystem::new(field).map_err(|e| ParseError {
            line: 0,
            message: e.to_string(),
        })?;
        let manifolds = self
            .manifolds
            .as_ref()
            .map(|ls| ls.iter().map(parse).collect::<Result<Vec<_>, _>>())
            .transpose()?;
        let m = self.dimension - 1;
        let cofactor = self
            .cofactor
            .as_ref()
            .map(|ls| {
                let flat = ls.iter().map(parse).collect::<Result<Vec<_>, _>>()?;
                Ok::<_, ParseError>(flat.chunks(m).map(<[Polynomial]>::to_vec).collect())
            })
            .transpose()?;
        let orbit = FourierOrbit::new(self.period, self.orbit.clone()).map_err(|e| ParseError {
            line: 0,
            message: e.to_string(),
        })?;
        Ok(BuiltDefinition {
            system,
            manifolds,
            cofactor,
            orbit,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CIRCLE: &str = "\
# planar oscillator
name circle-file
dimension 2
variables x y
params s=1
field
-y - s*x*(x^2+y^2-1)
x - s*y*(x^2+y^2-1)
manifolds
x^2+y^2-1
cofactor
-2*s*(x^2+y^2)
orbit
period 6.283185307179586
x 0 1 0
y 0 0 1
";

    #[test]
    fn parses_a_complete_file() {
        let d = SystemDefinition::parse(CIRCLE).unwrap();
        assert_eq!(d.name.as_deref(), Some("circle-file"));
        assert_eq!(d.variables, vec!["x", "y"]);
        assert_eq!(d.field[1].number, 8);
        assert_eq!(d.orbit[1].harmonics, vec![(0.0, 1.0)]);
        let built = d.build().unwrap();
        assert_eq!(built.cofactor.unwrap()[0][0].to_string(), "-2*x^2 - 2*y^2");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = CIRCLE.replace("x - s*y*(x^2+y^2-1)", "x - s*y*(x^2+y^2-1");
        let e = SystemDefinition::parse(&bad).unwrap().build().unwrap_err();
        assert_eq!(e.line, 8);
        let missing = CIRCLE.replace("y 0 0 1\n", "");
        assert!(SystemDefinition::parse(&missing)
            .unwrap_err()
            .message
            .contains("no orbit line for `y`"));
        let extra = CIRCLE.replace("cofactor\n", "cofactor\n1\n");
        let e = SystemDefinition::parse(&extra).unwrap_err();
        assert_eq!(e.line, 11);
        let stray = format!("junk\n{CIRCLE}");
        assert_eq!(SystemDefinition::parse(&stray).unwrap_err().line, 1);
        let dim = CIRCLE.replace("dimension 2", "dimension 3");
        let e = SystemDefinition::parse(&dim).unwrap_err();
        assert_eq!(e.line, 4);
        assert!(e.message.contains("but 2 variables"));
    }

    #[test]
    fn overrides_must_name_declared_parameters() {
        let mut d = SystemDefinition::parse(CIRCLE).unwrap();
        d.override_params(&[("s".into(), Rational::from_integer(2.into()))])
            .unwrap();
        assert!(d.build().unwrap().system.components()[0]
            .to_string()
            .contains("2*x^3"));
        assert!(d
            .override_params(&[("t".into(), Rational::from_integer(2.into()))])
            .is_err());
    }

    #[test]
    fn cofactor_is_optional() {
        let text = CIRCLE.replace("cofactor\n-2*s*(x^2+y^2)\n", "");
        let d = SystemDefinition::parse(&text).unwrap();
        assert!(d.cofactor.is_none());
        assert!(d.manifolds.is_some());
    }
}
