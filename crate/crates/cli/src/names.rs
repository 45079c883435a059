//! Named models and points.

use std::path::Path;

use depthlab::models::{Density, Family, Point, ScaleRule, SequenceModel};

use crate::error::CliError;

fn params(spec: &str) -> (&str, Vec<&str>) {
    let mut parts = spec.split(':');
    let head = parts.next().unwrap_or_default();
    (head, parts.collect())
}

fn number(s: &str, what: &str) -> Result<f64, CliError> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| CliError::Config(format!("{what}: {s:?} is not a number")))
}

fn numbers(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(|t| number(t, what)).collect()
}

fn arity(name: &str, args: &[&str], allowed: &[usize]) -> Result<(), CliError> {
    if allowed.contains(&args.len()) {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} takes {allowed:?} parameters, got {}", args.len())))
    }
}

/// Models by name:
/// `gaussian_unit`, `gaussian:σ`, `gaussian_decay:γ` (σ_k = k^−γ),
/// `rademacher`, `uniform` on (0, 1), `uniform:lo:hi`, `cauchy[:c]`,
/// `stable:p[:c]`, `logistic[:λ]`.
pub fn parse_model(spec: &str) -> Result<SequenceModel, CliError> {
    let (name, args) = params(spec);
    let arg = |i: usize, default: f64| args.get(i).map_or(Ok(default), |s| number(s, name));
    let iid = |family: Family, scale: f64| SequenceModel::iid(family, ScaleRule::Constant(scale)).map_err(CliError::from);
    match name {
        "gaussian_unit" => {
            arity(name, &args, &[0])?;
            Ok(SequenceModel::gaussian_unit())
        }
        "gaussian" => {
            arity(name, &args, &[1])?;
            iid(Family::Gaussian, arg(0, 1.0)?)
        }
        "gaussian_decay" => {
            arity(name, &args, &[1])?;
            SequenceModel::iid(
                Family::Gaussian,
                ScaleRule::PowerLaw {
                    coef: 1.0,
                    gamma: -arg(0, 0.0)?,
                },
            )
            .map_err(CliError::from)
        }
        "rademacher" => {
            arity(name, &args, &[0])?;
            Ok(SequenceModel::rademacher())
        }
        "uniform" => {
            arity(name, &args, &[0, 2])?;
            iid(
                Family::Uniform {
                    lo: arg(0, 0.0)?,
                    hi: arg(1, 1.0)?,
                },
                1.0,
            )
        }
        "cauchy" => {
            arity(name, &args, &[0, 1])?;
            iid(Family::SymmetricStable { p: 1.0 }, arg(0, 1.0)?)
        }
        "stable" => {
            arity(name, &args, &[1, 2])?;
            iid(Family::SymmetricStable { p: arg(0, 2.0)? }, arg(1, 1.0)?)
        }
        "logistic" => {
            arity(name, &args, &[0, 1])?;
            iid(Family::Custom(Density::logistic()), arg(0, 1.0)?)
        }
        other => Err(CliError::Config(format!("unknown model {other:?}"))),
    }
}

/// Points by name:
/// `zero`, `inverse-k` (1/k), `inverse-sqrt-k` (1/√k), `ones`, `median`
/// (0.5 in every coordinate), `power:c:e` (c·k^e), `periodic:v1,v2,…`,
/// `coords:v1,v2,…` (zero afterwards), `file:path` (comma or newline
/// separated values, zero afterwards).
pub fn parse_point(spec: &str) -> Result<Point, CliError> {
    let (name, args) = params(spec);
    let bad = |e: depthlab::DepthError| CliError::Config(format!("point {spec:?}: {e}"));
    match name {
        "zero" => Ok(Point::zero()),
        "inverse-k" => Point::power_law(1.0, -1.0).map_err(bad),
        "inverse-sqrt-k" => Point::power_law(1.0, -0.5).map_err(bad),
        "ones" => Point::periodic(vec![1.0]).map_err(bad),
        "median" => Point::periodic(vec![0.5]).map_err(bad),
        "power" => {
            arity(name, &args, &[2])?;
            Point::power_law(number(args[0], name)?, number(args[1], name)?).map_err(bad)
        }
        "periodic" => {
            arity(name, &args, &[1])?;
            Point::periodic(numbers(args[0], name)?).map_err(bad)
        }
        "coords" => {
            arity(name, &args, &[1])?;
            Point::new(numbers(args[0], name)?).map_err(bad)
        }
        "file" => {
            let path = spec.trim_start_matches("file:");
            let text = std::fs::read_to_string(Path::new(path))
                .map_err(|e| CliError::Config(format!("cannot read point file {path}: {e}")))?;
            let values = text
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| number(t, path))
                .collect::<Result<Vec<_>, _>>()?;
            Point::new(values).map_err(bad)
        }
        other => Err(CliError::Config(format!("unknown point {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn models_parse() {
        for m in ["gaussian_unit", "gaussian:2", "gaussian_decay:0.5", "rademacher", "uniform", "uniform:-1:1", "cauchy", "stable:1.5", "logistic"] {
            parse_model(m).unwrap();
        }
        assert!(parse_model("gaussian").is_err());
        assert!(parse_model("stable:3").is_err());
        assert!(parse_model("poisson").is_err());
    }

    #[test]
    fn points_parse() {
        assert_eq!(parse_point("inverse-k").unwrap().value(4), 0.25);
        assert_eq!(parse_point("periodic:1,2").unwrap().value(3), 1.0);
        assert_eq!(parse_point("coords:0.5,-1").unwrap().value(3), 0.0);
        assert_eq!(parse_point("power:2:-2").unwrap().value(2), 0.5);
        assert!(parse_point("coords:x").is_err());
        assert!(parse_point("file:/nonexistent/point.csv").is_err());
    }
}
