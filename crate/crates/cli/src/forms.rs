//! Named forms and JSON form files accepted on the command line.

use std::path::Path;

use mulhecke_core::qseries::{ClassicalName, FormSpec};

use crate::CliError;

fn number<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, CliError> {
    s.parse().map_err(|_| CliError::Usage(format!("bad {what}: {s}")))
}

fn from_file(path: &str) -> Result<FormSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{path}: {e}")))
}

/// `j`, `delta`, `e4`, `e6`, `level11`, `level9`, `hauptmodul:N`, `faber:N:n`
/// or a path to a JSON form specification.
pub fn parse_form(s: &str) -> Result<FormSpec, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    Ok(match parts.as_slice() {
        ["j"] => FormSpec::Classical {
            name: ClassicalName::J,
            m: 1,
        },
        ["delta"] => FormSpec::delta(),
        ["e4"] => FormSpec::Classical {
            name: ClassicalName::E4,
            m: 1,
        },
        ["e6"] => FormSpec::Classical {
            name: ClassicalName::E6,
            m: 1,
        },
        ["level11"] => FormSpec::level11_weight2(),
        ["level9"] => FormSpec::level9_shifted("-9/2 - 3/2*sqrt(-3)".parse().expect("literal")),
        ["hauptmodul", n] => FormSpec::Hauptmodul {
            level: number(n, "level")?,
        },
        ["faber", level, n] => FormSpec::Faber {
            level: number(level, "level")?,
            n: number(n, "index")?,
        },
        _ if Path::new(s).is_file() => from_file(s)?,
        _ => return Err(CliError::Usage(format!("unknown form {s}"))),
    })
}

/// The `--fn` argument of `trace`: `faber:n`, `hauptmodul` or a JSON file.
pub fn parse_function(s: &str, level: u64) -> Result<FormSpec, CliError> {
    match s.split_once(':') {
        Some(("faber", n)) => Ok(FormSpec::Faber {
            level,
            n: number(n, "index")?,
        }),
        None if s == "hauptmodul" => Ok(FormSpec::Hauptmodul { level }),
        _ if Path::new(s).is_file() => from_file(s),
        _ => Err(CliError::Usage(format!(
            "unknown function {s}; expected faber:n, hauptmodul or a JSON file"
        ))),
    }
}
