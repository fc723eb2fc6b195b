//! Line-oriented instance files.
//!
//! ```text
//! # comment
//! general
//! 3/5 10
//! 3/10 4
//! ```
//!
//! The first non-blank line is `proportional` or `general`. Each further line
//! holds `<weight> <value>`; proportional files may give the weight alone.
//! Numbers are integers or `p/q`. `#` starts a comment anywhere on a line.

use std::fmt::Write as _;
use std::path::Path;

use crate::model::{Instance, Item, ModelError};
use crate::rat::{parse_rat, ParseRatError};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("missing header line (`proportional` or `general`)")]
    MissingHeader,
    #[error("line {line}: unknown header {found:?}")]
    BadHeader { line: usize, found: String },
    #[error("line {line}: {source}")]
    Number {
        line: usize,
        #[source]
        source: ParseRatError,
    },
    #[error("line {line}: expected `<weight> <value>`, found {fields} field(s)")]
    Fields { line: usize, fields: usize },
    #[error("line {line}: {source}")]
    Item {
        line: usize,
        #[source]
        source: ModelError,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    let mut proportional = None;
    let mut items = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some(prop) = proportional else {
            proportional = Some(match content {
                "proportional" => true,
                "general" => false,
                other => {
                    return Err(FormatError::BadHeader {
                        line,
                        found: other.to_string(),
                    })
                }
            });
            continue;
        };
        let fields: Vec<&str> = content.split_whitespace().collect();
        let num = |s: &str| parse_rat(s).map_err(|source| FormatError::Number { line, source });
        let (w, v) = match (fields.as_slice(), prop) {
            ([w], true) => {
                let w = num(w)?;
                (w.clone(), w)
            }
            ([w, v], _) => (num(w)?, num(v)?),
            _ => {
                return Err(FormatError::Fields {
                    line,
                    fields: fields.len(),
                })
            }
        };
        items.push(Item::new(w, v).map_err(|source| FormatError::Item { line, source })?);
    }
    let proportional = proportional.ok_or(FormatError::MissingHeader)?;
    Instance::new(items, proportional).map_err(|source| FormatError::Item { line: 0, source })
}

pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::new();
    if inst.is_flagged_proportional() {
        out.push_str("proportional\n");
        for x in inst.items() {
            let _ = writeln!(out, "{}", x.weight());
        }
    } else {
        out.push_str("general\n");
        for x in inst.items() {
            let _ = writeln!(out, "{} {}", x.weight(), x.value());
        }
    }
    out
}

pub fn read_instance(path: &Path) -> Result<Instance, FormatError> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn write_instance(path: &Path, inst: &Instance) -> Result<(), FormatError> {
    std::fs::write(path, serialize_instance(inst))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};

    #[test]
    fn parses_general_file() {
        let inst = parse_instance("# focus example\ngeneral\n3/5 10\n3/10 4 # second\n\n").unwrap();
        assert!(!inst.is_flagged_proportional());
        assert_eq!(inst.items()[0], Item::new(rat(3, 5), int(10)).unwrap());
        assert_eq!(inst.items()[1], Item::new(rat(3, 10), int(4)).unwrap());
    }

    #[test]
    fn proportional_value_column_is_optional() {
        let inst = parse_instance("proportional\n53/150\n197/300 197/300\n").unwrap();
        assert!(inst.is_flagged_proportional());
        assert!(inst.items().iter().all(Item::is_proportional));
        assert!(matches!(
            parse_instance("proportional\n1/2 1/3\n"),
            Err(FormatError::Item { .. })
        ));
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(matches!(parse_instance("# nothing\n"), Err(FormatError::MissingHeader)));
        assert!(matches!(
            parse_instance("weird\n"),
            Err(FormatError::BadHeader { line: 1, .. })
        ));
        assert!(matches!(
            parse_instance("general\n1/2\n"),
            Err(FormatError::Fields { line: 2, fields: 1 })
        ));
        assert!(matches!(
            parse_instance("general\n1/2 x\n"),
            Err(FormatError::Number { line: 2, .. })
        ));
        assert!(matches!(
            parse_instance("general\n3/2 1\n"),
            Err(FormatError::Item { line: 2, .. })
        ));
    }

    #[test]
    fn serialize_then_parse_is_identity() {
        for text in [
            "general\n3/5 10\n3/10 4\n1 0\n",
            "proportional\n53/150\n197/300\n103/300\n",
        ] {
            let inst = parse_instance(text).unwrap();
            assert_eq!(serialize_instance(&inst), text);
            assert_eq!(parse_instance(&serialize_instance(&inst)).unwrap(), inst);
        }
    }
}
