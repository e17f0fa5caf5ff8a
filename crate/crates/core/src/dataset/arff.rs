use std::path::Path;

use super::{dataset_name_from_path, Dataset};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq)]
enum AttrType {
    Numeric,
    Nominal(Vec<String>),
}

#[derive(Debug, Clone)]
struct Attribute {
    name: String,
    kind: AttrType,
}

/// Loads a dense ARFF file.
///
/// `labels_spec` follows the MEKA `-C` convention: a positive value selects the
/// first k attributes as labels, a negative value the last |k|. When absent the
/// `-C` token of the `@relation` line is used.
pub fn load_arff(path: &Path, labels_spec: Option<i64>) -> Result<Dataset> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_arff(&text, &dataset_name_from_path(path), labels_spec)
}

pub fn parse_arff(text: &str, name: &str, labels_spec: Option<i64>) -> Result<Dataset> {
    let mut relation_spec = None;
    let mut saw_relation = false;
    let mut attributes: Vec<Attribute> = Vec::new();
    let mut lines = text.lines().enumerate();

    // header
    let mut in_data = false;
    for (idx, raw) in lines.by_ref() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let (keyword, rest) = split_keyword(line);
        match keyword.to_ascii_lowercase().as_str() {
            "@relation" => {
                saw_relation = true;
                relation_spec = parse_meka_label_count(rest);
            }
            "@attribute" => attributes.push(parse_attribute(rest, lineno)?),
            "@data" => {
                in_data = true;
                break;
            }
            _ => {
                return Err(Error::arff(
                    lineno,
                    format!("unexpected header line `{line}`"),
                ))
            }
        }
    }
    if !saw_relation {
        return Err(Error::arff(0, "missing @relation line"));
    }
    if !in_data {
        return Err(Error::arff(0, "missing @data section"));
    }

    let spec = labels_spec
        .or(relation_spec)
        .ok_or(Error::MissingLabelSpec)?;
    let n_attrs = attributes.len();
    let q = spec.unsigned_abs() as usize;
    if spec == 0 || q >= n_attrs {
        return Err(Error::InvalidDataset(format!(
            "label spec {spec} is incompatible with {n_attrs} attributes"
        )));
    }
    if q < 2 {
        return Err(Error::InvalidDataset(
            "at least 2 label attributes are required".into(),
        ));
    }
    let label_range = if spec > 0 { 0..q } else { n_attrs - q..n_attrs };
    let is_label = |a: usize| label_range.contains(&a);

    for (a, attr) in attributes.iter().enumerate() {
        match (&attr.kind, is_label(a)) {
            (AttrType::Nominal(values), true) => {
                if let Some(bad) = values.iter().find(|v| *v != "0" && *v != "1") {
                    return Err(Error::InvalidLabel {
                        label: attr.name.clone(),
                        value: bad.clone(),
                    });
                }
            }
            (AttrType::Numeric, _) => {}
            (AttrType::Nominal(_), false) => {
                return Err(Error::arff(
                    0,
                    format!("feature attribute `{}` is not numeric", attr.name),
                ))
            }
        }
    }

    let k = n_attrs - q;
    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut n = 0usize;
    for (idx, raw) in lines {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if line.starts_with('{') {
            return Err(Error::arff(lineno, "sparse ARFF rows are not supported"));
        }
        let cells = split_row(line);
        if cells.len() != n_attrs {
            return Err(Error::arff(
                lineno,
                format!("expected {n_attrs} values, found {}", cells.len()),
            ));
        }
        for (a, cell) in cells.iter().enumerate() {
            if cell == "?" {
                return Err(Error::arff(
                    lineno,
                    "missing values ('?') are not supported",
                ));
            }
            if is_label(a) {
                labels.push(parse_label(cell, &attributes[a].name)?);
            } else {
                let v: f64 = cell
                    .parse()
                    .map_err(|_| Error::arff(lineno, format!("non-numeric value `{cell}`")))?;
                features.push(v);
            }
        }
        n += 1;
    }

    let feature_names = attributes
        .iter()
        .enumerate()
        .filter(|(a, _)| !is_label(*a))
        .map(|(_, at)| at.name.clone())
        .collect();
    let label_names = attributes
        .iter()
        .enumerate()
        .filter(|(a, _)| is_label(*a))
        .map(|(_, at)| at.name.clone())
        .collect();
    Dataset::new(
        name,
        Matrix::from_vec(n, k, features),
        Matrix::from_vec(n, q, labels),
        feature_names,
        label_names,
    )
}

fn split_keyword(line: &str) -> (&str, &str) {
    match line.find(char::is_whitespace) {
        Some(i) => (&line[..i], line[i..].trim()),
        None => (line, ""),
    }
}

/// Finds `-C <int>` anywhere in the relation name (MEKA stores options there).
fn parse_meka_label_count(relation: &str) -> Option<i64> {
    let cleaned: String = relation
        .chars()
        .map(|c| if c == '\'' || c == '"' { ' ' } else { c })
        .collect();
    let mut tokens = cleaned.split_whitespace();
    while let Some(t) = tokens.next() {
        if t == "-C" {
            return tokens.next()?.parse().ok();
        }
    }
    None
}

fn parse_attribute(rest: &str, lineno: usize) -> Result<Attribute> {
    let (name, ty) = if let Some(quote) = rest.chars().next().filter(|c| *c == '\'' || *c == '"') {
        let body = &rest[1..];
        let end = body
            .find(quote)
            .ok_or_else(|| Error::arff(lineno, "unterminated quoted attribute name"))?;
        (body[..end].to_string(), body[end + 1..].trim())
    } else {
        let (n, t) = split_keyword(rest);
        (n.to_string(), t)
    };
    if name.is_empty() || ty.is_empty() {
        return Err(Error::arff(lineno, "malformed @attribute declaration"));
    }
    let kind = if ty.starts_with('{') {
        let close = ty
            .rfind('}')
            .ok_or_else(|| Error::arff(lineno, "unterminated nominal value list"))?;
        AttrType::Nominal(split_row(&ty[1..close]))
    } else {
        match ty.to_ascii_lowercase().as_str() {
            "numeric" | "real" | "integer" => AttrType::Numeric,
            other => {
                return Err(Error::arff(
                    lineno,
                    format!("unsupported attribute type `{other}`"),
                ))
            }
        }
    };
    Ok(Attribute { name, kind })
}

fn parse_label(cell: &str, name: &str) -> Result<u8> {
    match cell {
        "0" => Ok(0),
        "1" => Ok(1),
        _ => match cell.parse::<f64>() {
            Ok(0.0) => Ok(0),
            Ok(1.0) => Ok(1),
            _ => Err(Error::InvalidLabel {
                label: name.to_string(),
                value: cell.to_string(),
            }),
        },
    }
}

/// Comma split honouring single and double quotes; cells are trimmed and unquoted.
fn split_row(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quote: Option<char> = None;
    for c in line.chars() {
        match quote {
            Some(q) if c == q => quote = None,
            Some(_) => cur.push(c),
            None if c == '\'' || c == '"' => quote = Some(c),
            None if c == ',' => {
                out.push(cur.trim().to_string());
                cur.clear();
            }
            None => cur.push(c),
        }
    }
    out.push(cur.trim().to_string());
    out
}
