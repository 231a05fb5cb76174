//! State files and the compact ω / potential grammars.

use std::fs;
use std::path::Path;

use gaussian_complexity_core::nonreversible::{Polynomial, VectorPotential};
use gaussian_complexity_core::phase_space::{GaussianState, StateKind};
use gaussian_complexity_core::weyl::{MonotoneCubic, WeylFactor};
use gaussian_complexity_core::{DMatrix, DVector, Error, Tolerance};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Boson,
    Fermion,
}

/// `{"kind", "n_modes", "sigma", "z"?}`. For fermions `sigma` is the
/// antisymmetric covariance and `z` must be absent.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    kind: Kind,
    n_modes: usize,
    sigma: Vec<Vec<f64>>,
    #[serde(default)]
    z: Option<Vec<f64>>,
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn parse_state(text: &str, path: &Path, tol: Tolerance) -> CliResult<GaussianState> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    if file.n_modes == 0 {
        return Err(CliError::Parse {
            path: path.to_path_buf(),
            message: "n_modes must be positive".into(),
        });
    }
    let dim = 2 * file.n_modes;
    if file.sigma.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: file.sigma.len(),
        }
        .into());
    }
    if let Some(row) = file.sigma.iter().find(|row| row.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: row.len(),
        }
        .into());
    }
    let sigma = DMatrix::from_fn(dim, dim, |i, j| file.sigma[i][j]);
    let kind = match file.kind {
        Kind::Boson => StateKind::Boson,
        Kind::Fermion => {
            if file.z.is_some() {
                return Err(Error::FermionDisplacement.into());
            }
            StateKind::Fermion
        }
    };
    let z = file.z.map(DVector::from_vec);
    Ok(GaussianState::from_covariance(kind, sigma, z, tol)?)
}

pub fn load_state(path: &Path, tol: Tolerance) -> CliResult<GaussianState> {
    parse_state(&read(path)?, path, tol)
}

fn spec_error(spec: &str, why: &str) -> CliError {
    CliError::InvalidSpec(format!("cannot parse \"{spec}\": {why}"))
}

fn number(s: &str, spec: &str) -> CliResult<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| spec_error(spec, &format!("\"{s}\" is not a finite number")))
}

/// Polynomial in `r`, e.g. `0.5r`, `1 - 0.2*r + 0.1r^2`.
pub fn parse_polynomial(text: &str) -> CliResult<Polynomial> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(spec_error(text, "empty polynomial"));
    }
    let mut terms = Vec::new();
    let mut start = 0;
    for (i, c) in compact.char_indices() {
        // A sign starts a new term unless it belongs to an exponent (1e-3).
        let prev = compact[..i].chars().last();
        if i > 0 && (c == '+' || c == '-') && !matches!(prev, Some('e' | 'E')) {
            terms.push(&compact[start..i]);
            start = i;
        }
    }
    terms.push(&compact[start..]);

    let mut coeffs: Vec<f64> = Vec::new();
    for term in terms {
        let (sign, body) = match term.as_bytes().first() {
            Some(b'-') => (-1.0, &term[1..]),
            Some(b'+') => (1.0, &term[1..]),
            _ => (1.0, term),
        };
        let (coef, power) = match body.find('r') {
            None => (number(body, text)?, 0),
            Some(pos) => {
                let head = body[..pos].trim_end_matches('*');
                let coef = if head.is_empty() {
                    1.0
                } else {
                    number(head, text)?
                };
                let tail = &body[pos + 1..];
                let power = match tail.strip_prefix('^') {
                    None if tail.is_empty() => 1,
                    None => return Err(spec_error(text, &format!("unexpected \"{tail}\""))),
                    Some(p) => p
                        .parse::<usize>()
                        .ok()
                        .filter(|&p| p <= 32)
                        .ok_or_else(|| spec_error(text, &format!("bad exponent \"{p}\"")))?,
                };
                (coef, power)
            }
        };
        if coeffs.len() <= power {
            coeffs.resize(power + 1, 0.0);
        }
        coeffs[power] += sign * coef;
    }
    Ok(Polynomial::new(coeffs)?)
}

/// `const:c`, `linear:beta` or `table:<csv of r, omega>`.
pub fn parse_omega(spec: &str) -> CliResult<WeylFactor> {
    let (tag, arg) = spec
        .split_once(':')
        .ok_or_else(|| spec_error(spec, "expected const:, linear: or table:"))?;
    match tag {
        "const" => Ok(WeylFactor::Constant(number(arg, spec)?)),
        "linear" => Ok(WeylFactor::Linear(number(arg, spec)?)),
        "table" => load_table(Path::new(arg)),
        _ => Err(spec_error(spec, &format!("unknown factor \"{tag}\""))),
    }
}

/// Two-column CSV of `r, omega`, with an optional header row.
fn load_table(path: &Path) -> CliResult<WeylFactor> {
    let text = read(path)?;
    let parse_error = |message: String| CliError::Parse {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_error(e.to_string()))?;
        if record.len() != 2 {
            return Err(parse_error(format!(
                "row {} has {} columns, expected 2",
                line + 1,
                record.len()
            )));
        }
        let values = (record[0].parse::<f64>(), record[1].parse::<f64>());
        match values {
            (Ok(x), Ok(y)) => {
                xs.push(x);
                ys.push(y);
            }
            _ if line == 0 => continue,
            _ => return Err(parse_error(format!("row {} is not numeric", line + 1))),
        }
    }
    Ok(WeylFactor::Tabulated(MonotoneCubic::new(xs, ys)?))
}

/// `none`, `const:f`, `grad:h=<poly>` or `mod:f0=<poly>,eps=<e>`.
pub fn parse_potential(spec: &str) -> CliResult<VectorPotential> {
    if spec.trim() == "none" {
        return Ok(VectorPotential::None);
    }
    let (tag, arg) = spec
        .split_once(':')
        .ok_or_else(|| spec_error(spec, "expected none, const:, grad: or mod:"))?;
    match tag {
        "const" => Ok(VectorPotential::Constant(number(arg, spec)?)),
        "grad" => {
            let h = arg
                .strip_prefix("h=")
                .ok_or_else(|| spec_error(spec, "expected grad:h=<polynomial>"))?;
            Ok(VectorPotential::Gradient(parse_polynomial(h)?))
        }
        "mod" => {
            let (f0, eps) = arg
                .rsplit_once(",eps=")
                .ok_or_else(|| spec_error(spec, "expected mod:f0=<polynomial>,eps=<number>"))?;
            let f0 = f0
                .strip_prefix("f0=")
                .ok_or_else(|| spec_error(spec, "expected mod:f0=<polynomial>,eps=<number>"))?;
            Ok(VectorPotential::Modulated {
                f0: parse_polynomial(f0)?,
                eps: number(eps, spec)?,
            })
        }
        _ => Err(spec_error(spec, &format!("unknown potential \"{tag}\""))),
    }
}

/// `a,b`.
pub fn parse_pair(text: &str) -> CliResult<(f64, f64)> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| spec_error(text, "expected two comma-separated numbers"))?;
    Ok((number(a, text)?, number(b, text)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn polynomials() {
        assert_eq!(
            parse_polynomial("0.5r").unwrap().coefficients(),
            &[0.0, 0.5]
        );
        assert_eq!(
            parse_polynomial("1 - 0.2*r + r^2").unwrap().coefficients(),
            &[1.0, -0.2, 1.0]
        );
        assert_eq!(
            parse_polynomial("-r^3+1e-3").unwrap().coefficients(),
            &[1e-3, 0.0, 0.0, -1.0]
        );
        assert_eq!(parse_polynomial("2").unwrap().coefficients(), &[2.0]);
        assert!(parse_polynomial("2x").is_err());
        assert!(parse_polynomial("r^").is_err());
        assert!(parse_polynomial("").is_err());
    }

    #[test]
    fn potentials() {
        assert!(matches!(
            parse_potential("none").unwrap(),
            VectorPotential::None
        ));
        assert!(
            matches!(parse_potential("const:0.3").unwrap(), VectorPotential::Constant(c) if c == 0.3)
        );
        match parse_potential("mod:f0=0.1+0.2r,eps=-0.5").unwrap() {
            VectorPotential::Modulated { f0, eps } => {
                assert_eq!(f0.coefficients(), &[0.1, 0.2]);
                assert_eq!(eps, -0.5);
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_potential("grad:0.5r").is_err());
        assert!(parse_potential("field:1").is_err());
    }

    #[test]
    fn omegas() {
        assert!(matches!(parse_omega("linear:2").unwrap(), WeylFactor::Linear(b) if b == 2.0));
        assert!(matches!(parse_omega("const:0").unwrap(), WeylFactor::Constant(c) if c == 0.0));
        assert!(parse_omega("linear:x").is_err());
        assert!(matches!(
            parse_omega("table:/nonexistent.csv"),
            Err(CliError::Io { .. })
        ));
    }

    #[test]
    fn state_files() {
        let p = Path::new("state.json");
        let vac = r#"{"kind": "boson", "n_modes": 1, "sigma": [[1, 0], [0, 1]], "z": [3, 4]}"#;
        let s = parse_state(vac, p, tol()).unwrap();
        assert_eq!(s.displacement().as_slice(), &[3.0, 4.0]);

        let thermal = r#"{"kind": "boson", "n_modes": 1, "sigma": [[2, 0], [0, 2]]}"#;
        let err = parse_state(thermal, p, tol()).unwrap_err();
        assert_eq!(err.name(), "NotPure");
        assert_eq!(err.exit_code(), 3);

        let fermion =
            r#"{"kind": "fermion", "n_modes": 1, "sigma": [[0, 1], [-1, 0]], "z": [0, 0]}"#;
        assert_eq!(
            parse_state(fermion, p, tol()).unwrap_err().name(),
            "FermionDisplacement"
        );

        let bad = r#"{"kind": "boson", "n_modes": 2, "sigma": [[1, 0], [0, 1]]}"#;
        assert_eq!(
            parse_state(bad, p, tol()).unwrap_err().name(),
            "DimensionMismatch"
        );
        assert_eq!(parse_state("{", p, tol()).unwrap_err().name(), "Parse");
    }
}
