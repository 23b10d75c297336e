//! Arrangement files: TOML with [group], [beta] and [theta] sections, or the same keys as JSON.

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use thiserror::Error;

use hyperchow_core::arrangement::{ArrangementError, StackyArrangement, ThetaInput};
use hyperchow_core::zlattice::FgAbGroup;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InputError {
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("value error: {0}")]
    Value(String),
    #[error("cannot read {0}: {1}")]
    Io(String, String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputDocument {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
    pub vectors: Vec<Vec<BigInt>>,
    pub theta: ThetaInput,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Toml,
    Json,
}

/// Format-neutral view of a parsed value.
enum Node {
    Int(BigInt),
    Text(String),
    List(Vec<Node>),
    Table(Vec<(String, Node)>),
    Other(&'static str),
}

impl Node {
    fn from_toml(v: &toml::Value) -> Node {
        match v {
            toml::Value::Integer(i) => Node::Int(BigInt::from(*i)),
            toml::Value::String(s) => Node::Text(s.clone()),
            toml::Value::Array(a) => Node::List(a.iter().map(Node::from_toml).collect()),
            toml::Value::Table(t) => Node::Table(t.iter().map(|(k, v)| (k.clone(), Node::from_toml(v))).collect()),
            toml::Value::Float(_) => Node::Other("float"),
            toml::Value::Boolean(_) => Node::Other("boolean"),
            toml::Value::Datetime(_) => Node::Other("datetime"),
        }
    }

    fn from_json(v: &serde_json::Value) -> Node {
        match v {
            serde_json::Value::Number(n) => match n.as_i64() {
                Some(i) => Node::Int(BigInt::from(i)),
                None => match n.as_u64() {
                    Some(u) => Node::Int(BigInt::from(u)),
                    None => Node::Other("float"),
                },
            },
            serde_json::Value::String(s) => Node::Text(s.clone()),
            serde_json::Value::Array(a) => Node::List(a.iter().map(Node::from_json).collect()),
            serde_json::Value::Object(o) => {
                Node::Table(o.iter().map(|(k, v)| (k.clone(), Node::from_json(v))).collect())
            }
            serde_json::Value::Bool(_) => Node::Other("boolean"),
            serde_json::Value::Null => Node::Other("null"),
        }
    }
}

fn int(n: &Node, key: &str) -> Result<BigInt, InputError> {
    match n {
        Node::Int(i) => Ok(i.clone()),
        Node::Text(s) => {
            s.trim().parse::<BigInt>().map_err(|_| InputError::Value(format!("{}: \"{}\" is not an integer", key, s)))
        }
        Node::Other(kind) => Err(InputError::Schema(format!("{}: expected an integer, found a {}", key, kind))),
        _ => Err(InputError::Schema(format!("{}: expected an integer", key))),
    }
}

fn int_list(n: &Node, key: &str) -> Result<Vec<BigInt>, InputError> {
    match n {
        Node::List(items) => items.iter().enumerate().map(|(i, x)| int(x, &format!("{}[{}]", key, i))).collect(),
        _ => Err(InputError::Schema(format!("{}: expected an array of integers", key))),
    }
}

fn table<'a>(n: &'a Node, key: &str, allowed: &[&str]) -> Result<&'a [(String, Node)], InputError> {
    let Node::Table(entries) = n else {
        return Err(InputError::Schema(format!("{}: expected a table", key)));
    };
    for (k, _) in entries {
        if !allowed.contains(&k.as_str()) {
            return Err(InputError::Schema(format!("unknown key {}.{}", key, k)));
        }
    }
    Ok(entries)
}

fn lookup<'a>(entries: &'a [(String, Node)], key: &str) -> Option<&'a Node> {
    entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
}

fn required<'a>(entries: &'a [(String, Node)], section: &str, key: &str) -> Result<&'a Node, InputError> {
    lookup(entries, key).ok_or_else(|| InputError::Schema(format!("missing key {}.{}", section, key)))
}

fn document(root: &Node) -> Result<InputDocument, InputError> {
    let top = table(root, "document", &["group", "beta", "theta"])?;
    let group = table(required(top, "document", "group")?, "group", &["rank", "torsion"])?;
    let beta = table(required(top, "document", "beta")?, "beta", &["vectors"])?;
    let theta = table(required(top, "document", "theta")?, "theta", &["value", "lift", "sign"])?;

    let rank = int(required(group, "group", "rank")?, "group.rank")?;
    let rank = rank
        .to_usize()
        .filter(|_| !rank.is_negative())
        .ok_or_else(|| InputError::Value(format!("group.rank: {} is not a valid rank", rank)))?;
    let torsion = match lookup(group, "torsion") {
        Some(t) => int_list(t, "group.torsion")?,
        None => Vec::new(),
    };
    let vectors = match required(beta, "beta", "vectors")? {
        Node::List(items) => items
            .iter()
            .enumerate()
            .map(|(i, v)| int_list(v, &format!("beta.vectors[{}]", i)))
            .collect::<Result<Vec<_>, _>>()?,
        _ => return Err(InputError::Schema("beta.vectors: expected an array of arrays".into())),
    };
    let theta = match (lookup(theta, "value"), lookup(theta, "lift")) {
        (Some(_), Some(_)) => return Err(InputError::Schema("theta.value and theta.lift are both present".into())),
        (None, None) => return Err(InputError::Schema("theta needs exactly one of value, lift".into())),
        (Some(v), None) => {
            if lookup(theta, "sign").is_some() {
                return Err(InputError::Schema("theta.sign only applies to theta.lift".into()));
            }
            ThetaInput::Value(int_list(v, "theta.value")?)
        }
        (None, Some(l)) => {
            let sign = match lookup(theta, "sign") {
                Some(s) => int(s, "theta.sign")?,
                None => BigInt::one(),
            };
            let sign = if sign.is_one() {
                1
            } else if sign == -BigInt::one() {
                -1
            } else {
                return Err(InputError::Value(format!("theta.sign: {} is not 1 or -1", sign)));
            };
            ThetaInput::Lift { lift: int_list(l, "theta.lift")?, sign }
        }
    };
    let doc = InputDocument { rank, torsion, vectors, theta };
    doc.check_values()?;
    Ok(doc)
}

fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

pub fn parse_str(text: &str, format: Format) -> Result<InputDocument, InputError> {
    let root = match format {
        Format::Toml => {
            let t: toml::Table = text.parse().map_err(|e: toml::de::Error| {
                let (line, col) = position(text, e.span().map_or(0, |s| s.start));
                let msg = e.message().trim().to_string();
                if msg.contains("duplicate key") {
                    InputError::Schema(format!("{} (line {}, column {})", msg, line, col))
                } else {
                    InputError::Parse { line, col, msg }
                }
            })?;
            Node::from_toml(&toml::Value::Table(t))
        }
        Format::Json => {
            let v: serde_json::Value = serde_json::from_str(text).map_err(|e| InputError::Parse {
                line: e.line(),
                col: e.column(),
                msg: e.to_string(),
            })?;
            Node::from_json(&v)
        }
    };
    document(&root)
}

/// JSON for `.json` files or text starting with `{`, TOML otherwise.
pub fn detect_format(path: &Path, text: &str) -> Format {
    let json_ext = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if json_ext || text.trim_start().starts_with('{') {
        Format::Json
    } else {
        Format::Toml
    }
}

pub fn parse_path(path: &Path) -> Result<InputDocument, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError::Io(path.display().to_string(), e.to_string()))?;
    parse_str(&text, detect_format(path, &text))
}

fn toml_int(x: &BigInt) -> String {
    if x.to_i64().is_some() {
        x.to_string()
    } else {
        format!("\"{}\"", x)
    }
}

fn toml_list(xs: &[BigInt]) -> String {
    format!("[{}]", xs.iter().map(toml_int).collect::<Vec<_>>().join(", "))
}

fn json_list(xs: &[BigInt]) -> serde_json::Value {
    serde_json::Value::Array(xs.iter().map(json_int).collect())
}

pub fn json_int(x: &BigInt) -> serde_json::Value {
    match x.to_i64() {
        Some(i) => serde_json::Value::from(i),
        None => serde_json::Value::String(x.to_string()),
    }
}

impl InputDocument {
    pub fn group(&self) -> Result<FgAbGroup, InputError> {
        FgAbGroup::new(self.rank, self.torsion.clone()).map_err(|e| InputError::Value(format!("group.torsion: {}", e)))
    }

    fn check_values(&self) -> Result<(), InputError> {
        let group = self.group()?;
        let n = group.ngens();
        for (i, v) in self.vectors.iter().enumerate() {
            if v.len() != n {
                return Err(InputError::Value(format!("beta.vectors[{}] has {} entries, N needs {}", i, v.len(), n)));
            }
            for (t, q) in group.torsion().iter().enumerate() {
                let r = &v[self.rank + t];
                if r.is_negative() || r >= q {
                    return Err(InputError::Value(format!(
                        "beta.vectors[{}]: residue {} is not reduced modulo {}",
                        i, r, q
                    )));
                }
            }
        }
        if let ThetaInput::Lift { lift, .. } = &self.theta {
            if lift.len() != self.vectors.len() {
                return Err(InputError::Value(format!(
                    "theta.lift has {} entries, expected {}",
                    lift.len(),
                    self.vectors.len()
                )));
            }
        }
        Ok(())
    }

    pub fn arrangement(&self) -> Result<StackyArrangement, ArrangementError> {
        let group = FgAbGroup::new(self.rank, self.torsion.clone())?;
        StackyArrangement::new(group, self.vectors.clone(), self.theta.clone())
    }

    pub fn to_toml_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[group]\nrank = {}\ntorsion = {}\n", self.rank, toml_list(&self.torsion));
        let vs: Vec<String> = self.vectors.iter().map(|v| toml_list(v)).collect();
        let _ = writeln!(s, "[beta]\nvectors = [{}]\n", vs.join(", "));
        match &self.theta {
            ThetaInput::Value(v) => {
                let _ = writeln!(s, "[theta]\nvalue = {}", toml_list(v));
            }
            ThetaInput::Lift { lift, sign } => {
                let _ = writeln!(s, "[theta]\nlift = {}\nsign = {}", toml_list(lift), sign);
            }
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        let theta = match &self.theta {
            ThetaInput::Value(v) => serde_json::json!({ "value": json_list(v) }),
            ThetaInput::Lift { lift, sign } => serde_json::json!({ "lift": json_list(lift), "sign": sign }),
        };
        serde_json::json!({
            "group": { "rank": self.rank, "torsion": json_list(&self.torsion) },
            "beta": { "vectors": self.vectors.iter().map(|v| json_list(v)).collect::<Vec<_>>() },
            "theta": theta,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    const P12: &str = "[group]\nrank = 1\ntorsion = []\n\n[beta]\nvectors = [[1], [-2]]\n\n[theta]\nvalue = [1]\n";

    #[test]
    fn parses_p12() {
        let d = parse_str(P12, Format::Toml).unwrap();
        assert_eq!(d.rank, 1);
        assert_eq!(d.vectors, vec![vec![BigInt::from(1)], vec![BigInt::from(-2)]]);
        assert_eq!(d.theta, ThetaInput::Value(vec![BigInt::one()]));
        assert_eq!(parse_str(&d.to_toml_string(), Format::Toml).unwrap(), d);
        assert_eq!(parse_str(&d.to_json().to_string(), Format::Json).unwrap(), d);
    }

    #[test]
    fn both_theta_forms_rejected() {
        let text = P12.replace("value = [1]", "value = [1]\nlift = [0, 1]");
        assert!(matches!(parse_str(&text, Format::Toml), Err(InputError::Schema(_))));
    }

    #[test]
    fn errors_are_classified() {
        let bad = parse_str("[group]\nrank = \n", Format::Toml);
        assert!(matches!(bad, Err(InputError::Parse { line: 2, .. })), "{:?}", bad);
        let dup = parse_str(&P12.replace("torsion = []", "torsion = []\nrank = 2"), Format::Toml);
        assert!(matches!(dup, Err(InputError::Schema(_))), "{:?}", dup);
        let missing = parse_str(&P12.replace("vectors = [[1], [-2]]", ""), Format::Toml);
        assert_eq!(missing, Err(InputError::Schema("missing key beta.vectors".into())));
        let text = "[group]\nrank = 1\ntorsion = [2]\n[beta]\nvectors = [[1, 3]]\n[theta]\nvalue = []\n";
        assert!(matches!(parse_str(text, Format::Toml), Err(InputError::Value(_))));
    }

    #[test]
    fn big_integers_as_strings() {
        let text = P12.replace("[[1], [-2]]", "[[\"123456789012345678901234567890\"], [-2]]");
        let d = parse_str(&text, Format::Toml).unwrap();
        assert_eq!(d.vectors[0][0], "123456789012345678901234567890".parse::<BigInt>().unwrap());
        assert_eq!(parse_str(&d.to_toml_string(), Format::Toml).unwrap(), d);
        assert!(!d.vectors[1][0].is_zero());
    }
}
