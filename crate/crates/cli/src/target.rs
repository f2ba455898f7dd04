//! Resolution of a command target: a builtin name or a definition file.

use std::fmt::Write as _;

use floquet_core::expr::parse_rational;
use floquet_core::floquet::{
    discover_cofactor, InvariantManifoldSet, PeriodicOrbit, PolynomialSystem,
};
use floquet_core::systems::{
    builtin, builtin_parameters, example1_expected_multipliers, Example1Params, BUILTIN_NAMES,
};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::sysfile::SystemDefinition;

/// How the hypersurfaces of a target were obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum ManifoldSource {
    Builtin,
    File,
    Discovered { degree: u32 },
}

pub struct Target {
    pub name: String,
    /// `builtin` or the file path.
    pub source: String,
    pub parameters: Vec<(String, String)>,
    pub system: PolynomialSystem,
    /// `Err` carries the reason the cofactor route is unavailable.
    pub manifolds: Result<(InvariantManifoldSet, ManifoldSource), String>,
    pub orbit: Box<dyn PeriodicOrbit>,
    /// Closed-form multipliers, when known.
    pub reference: Option<Vec<f64>>,
}

impl Target {
    pub fn manifolds(&self) -> Result<&InvariantManifoldSet, CliError> {
        self.manifolds
            .as_ref()
            .map(|(m, _)| m)
            .map_err(|reason| CliError::Config(reason.clone()))
    }

    /// Hex sha256 of the variables, field, hypersurfaces, cofactor and
    /// period, each polynomial on its own line.
    pub fn hash(&self) -> String {
        let mut text = String::new();
        let _ = writeln!(text, "variables {}", self.system.variables().join(" "));
        text.push_str("field\n");
        for p in self.system.components() {
            let _ = writeln!(text, "{p}");
        }
        if let Ok((m, _)) = &self.manifolds {
            text.push_str("manifolds\n");
            for p in m.functions() {
                let _ = writeln!(text, "{p}");
            }
            text.push_str("cofactor\n");
            for p in m.cofactor_entries().iter().flatten() {
                let _ = writeln!(text, "{p}");
            }
        }
        let _ = writeln!(text, "period {:?}", self.orbit.period());
        format!("{:x}", Sha256::digest(text.as_bytes()))
    }
}

/// Splits `name=value`.
pub fn split_assignment(item: &str) -> Result<(String, String), CliError> {
    match item.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() && !v.trim().is_empty() => {
            Ok((k.trim().to_string(), v.trim().to_string()))
        }
        _ => Err(CliError::Config(format!(
            "expected --param name=value, got `{item}`"
        ))),
    }
}

pub fn load(
    spec: &str,
    params: &[String],
    discover_degree: Option<u32>,
) -> Result<Target, CliError> {
    let assignments = params
        .iter()
        .map(|p| split_assignment(p))
        .collect::<Result<Vec<_>, _>>()?;
    if BUILTIN_NAMES.contains(&spec) {
        load_builtin(spec, &assignments)
    } else {
        load_file(spec, &assignments, discover_degree)
    }
}

fn load_builtin(name: &str, assignments: &[(String, String)]) -> Result<Target, CliError> {
    let values = assignments
        .iter()
        .map(|(k, v)| match v.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok((k.clone(), x)),
            _ => Err(CliError::Config(format!(
                "parameter `{k}`: expected a finite real number, got `{v}`"
            ))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let effective = builtin_parameters(name, &values)?;
    let problem = builtin(name, &values)?;
    let reference = (problem.name == "example1").then(|| {
        example1_expected_multipliers(Example1Params {
            s: effective[0].1,
            k_param: effective[1].1,
        })
        .values
        .to_vec()
    });
    Ok(Target {
        name: problem.name,
        source: "builtin".into(),
        parameters: effective
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
        system: problem.system,
        manifolds: Ok((problem.manifolds, ManifoldSource::Builtin)),
        orbit: problem.orbit,
        reference,
    })
}

fn load_file(
    path: &str,
    assignments: &[(String, String)],
    discover_degree: Option<u32>,
) -> Result<Target, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Config(format!(
            "`{path}` is neither a builtin ({}) nor a readable file: {e}",
            BUILTIN_NAMES.join(", ")
        ))
    })?;
    let mut def = SystemDefinition::parse(&text)
        .map_err(|e| CliError::Config(format!("{path}: {}", CliError::from(e))))?;
    let overrides = assignments
        .iter()
        .map(|(k, v)| {
            parse_rational(v)
                .map(|r| (k.clone(), r))
                .map_err(|e| CliError::Config(format!("parameter `{k}`: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    def.override_params(&overrides)?;
    let built = def
        .build()
        .map_err(|e| CliError::Config(format!("{path}: {}", CliError::from(e))))?;

    let manifolds = match (built.manifolds, built.cofactor) {
        (None, _) => Err(format!("{path} has no `manifolds` section; only the variational method is available")),
        (Some(f), Some(k)) => Ok((InvariantManifoldSet::new(f, k)?, ManifoldSource::File)),
        (Some(f), None) => match discover_degree {
            Some(degree) => {
                let k = discover_cofactor(&built.system, &f, degree)?;
                Ok((InvariantManifoldSet::new(f, k)?, ManifoldSource::Discovered { degree }))
            }
            None => Err(format!(
                "{path} has a `manifolds` section but no `cofactor`; pass --discover-degree d to search for \
                 a cofactor of total degree <= d"
            )),
        },
    };
    let name = def.name.clone().unwrap_or_else(|| {
        std::path::Path::new(path)
            .file_stem()
            .map_or_else(|| path.to_string(), |s| s.to_string_lossy().into_owned())
    });
    Ok(Target {
        name,
        source: path.to_string(),
        parameters: def
            .params
            .iter()
            .map(|(k, v)| (k.clone(), v.to_string()))
            .collect(),
        system: built.system,
        manifolds,
        orbit: Box::new(built.orbit),
        reference: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_report_effective_parameters() {
        let t = load("example1", &["k=2".into()], None).unwrap();
        assert_eq!(
            t.parameters,
            vec![("s".into(), "1".into()), ("k".into(), "2".into())]
        );
        assert_eq!(t.reference.as_ref().map(Vec::len), Some(3));
        assert!(t.manifolds().is_ok());
    }

    #[test]
    fn hash_depends_on_parameters() {
        let a = load("mathieu", &[], None).unwrap().hash();
        let b = load("example2", &[], None).unwrap().hash();
        let c = load("mathieu", &["q=0.2".into()], None).unwrap().hash();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn bad_assignments_are_config_errors() {
        assert!(matches!(
            load("circle", &["x".into()], None),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            load("mathieu", &["a=zz".into()], None),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            load("mathieu", &["z=1".into()], None),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            load("/nonexistent/file.sys", &[], None),
            Err(CliError::Config(_))
        ));
    }
}
