//! Line-oriented model files with `[model]`, `[region]` and `[analysis]`
//! sections.
//!
//! ```text
//! [model]
//! name = griffith
//! dim = 2
//! state = x, y
//! params = a: 1, b: 0.4
//! dx = "-a*x + y"
//! dy = "x^2/(1+x^2) - b*y"
//!
//! [region]
//! vertices = -0.5 -0.4, 4 -0.4, 4 3, -0.5 3
//! ```

use crate::dynsys::{ModelSpec, State};
use std::fmt::{self, Write as _};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelFileError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown section [{name}]")]
    UnknownSection { line: usize, name: String },
    #[error("line {line}: unknown key `{key}` in [{section}]")]
    UnknownKey {
        line: usize,
        section: String,
        key: String,
    },
    #[error("line {line}: duplicate key `{key}`")]
    Duplicate { line: usize, key: String },
    #[error("missing `{key}` in [{section}]")]
    Missing { section: String, key: String },
    #[error("line {line}: bad value for `{key}`: {msg}")]
    BadValue { line: usize, key: String, msg: String },
}

#[derive(Debug, Clone, PartialEq)]
pub enum RegionSpec {
    /// The hand-made region shipped with a named model.
    Builtin,
    Polygon(Vec<State>),
    Interval(f64, f64),
    Circle { center: State, radius: f64 },
}

/// Optional analysis settings; unset fields fall back to defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnalysisSpec {
    pub tol: Option<f64>,
    pub t_max: Option<f64>,
    pub seed: Option<u64>,
    pub grid: Option<usize>,
    pub boundary_samples: Option<usize>,
    pub rays: Option<usize>,
    pub side_samples: Option<usize>,
    pub cycle_scan: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub model: ModelSpec,
    pub region: RegionSpec,
    pub analysis: AnalysisSpec,
}

struct Entry {
    line: usize,
    key: String,
    value: String,
}

/// Strip a trailing comment and surrounding blanks, or unquote.
fn value_of(raw: &str, line: usize) -> Result<String, ModelFileError> {
    let t = raw.trim_start();
    let Some(body) = t.strip_prefix('"') else {
        let end = t.find('#').unwrap_or(t.len());
        return Ok(t[..end].trim_end().to_string());
    };
    let mut out = String::new();
    let mut chars = body.char_indices();
    while let Some((i, c)) = chars.next() {
        match c {
            '\\' => match chars.next() {
                Some((_, e @ ('"' | '\\'))) => out.push(e),
                Some((_, 'n')) => out.push('\n'),
                other => {
                    return Err(ModelFileError::Syntax {
                        line,
                        msg: format!("unknown escape {:?}", other.map(|o| o.1)),
                    })
                }
            },
            '"' => {
                let rest = body[i + 1..].trim();
                if !(rest.is_empty() || rest.starts_with('#')) {
                    return Err(ModelFileError::Syntax {
                        line,
                        msg: format!("text after closing quote: `{rest}`"),
                    });
                }
                return Ok(out);
            }
            c => out.push(c),
        }
    }
    Err(ModelFileError::Syntax {
        line,
        msg: "unterminated string".into(),
    })
}

fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn list(s: &str) -> Vec<String> {
    s.split(',')
        .map(|p| p.trim().to_string())
        .filter(|p| !p.is_empty())
        .collect()
}

fn bad(e: &Entry, msg: impl Into<String>) -> ModelFileError {
    ModelFileError::BadValue {
        line: e.line,
        key: e.key.clone(),
        msg: msg.into(),
    }
}

fn num(e: &Entry, s: &str) -> Result<f64, ModelFileError> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| bad(e, format!("`{}` is not a number", s.trim())))
}

fn nums(e: &Entry, n: usize) -> Result<Vec<f64>, ModelFileError> {
    let v: Vec<f64> = list(&e.value).iter().map(|s| num(e, s)).collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(bad(e, format!("expected {n} numbers, got {}", v.len())));
    }
    Ok(v)
}

fn int<T: std::str::FromStr>(e: &Entry) -> Result<T, ModelFileError> {
    e.value
        .trim()
        .parse::<T>()
        .map_err(|_| bad(e, format!("`{}` is not a nonnegative integer", e.value)))
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<ModelFile, ModelFileError> {
        let mut sections: Vec<(String, Vec<Entry>)> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            if let Some(name) = t.strip_prefix('[') {
                let name = name
                    .split('#')
                    .next()
                    .unwrap_or("")
                    .trim()
                    .strip_suffix(']')
                    .ok_or_else(|| ModelFileError::Syntax {
                        line,
                        msg: "unclosed section header".into(),
                    })?
                    .trim()
                    .to_string();
                if !matches!(name.as_str(), "model" | "region" | "analysis") {
                    return Err(ModelFileError::UnknownSection { line, name });
                }
                if sections.iter().any(|s| s.0 == name) {
                    return Err(ModelFileError::Duplicate { line, key: name });
                }
                sections.push((name, Vec::new()));
                continue;
            }
            let (key, _) = t.split_once('=').ok_or_else(|| ModelFileError::Syntax {
                line,
                msg: "expected `key = value`".into(),
            })?;
            let key = key.trim().to_string();
            let Some(section) = sections.last_mut() else {
                return Err(ModelFileError::Syntax {
                    line,
                    msg: "key outside any section".into(),
                });
            };
            if section.1.iter().any(|e| e.key == key) {
                return Err(ModelFileError::Duplicate { line, key });
            }
            let value = value_of(&raw[raw.find('=').unwrap() + 1..], line)?;
            section.1.push(Entry { line, key, value });
        }
        let take = |name: &str| sections.iter().find(|s| s.0 == name).map(|s| &s.1);

        let model_entries = take("model").ok_or_else(|| ModelFileError::Missing {
            section: "model".into(),
            key: "name".into(),
        })?;
        let model = parse_model(model_entries)?;
        let region = match take("region") {
            Some(es) => parse_region(es)?,
            None => RegionSpec::Builtin,
        };
        let analysis = match take("analysis") {
            Some(es) => parse_analysis(es)?,
            None => AnalysisSpec::default(),
        };
        Ok(ModelFile {
            model,
            region,
            analysis,
        })
    }
}

fn parse_model(es: &[Entry]) -> Result<ModelSpec, ModelFileError> {
    let get = |k: &str| es.iter().find(|e| e.key == k);
    let missing = |k: &str| ModelFileError::Missing {
        section: "model".into(),
        key: k.into(),
    };
    let name = get("name").ok_or_else(|| missing("name"))?.value.clone();
    let state_entry = get("state").ok_or_else(|| missing("state"))?;
    let states = list(&state_entry.value);
    if states.is_empty() {
        return Err(bad(state_entry, "no state variables"));
    }
    if let Some(d) = get("dim") {
        let dim: usize = int(d)?;
        if dim != states.len() {
            return Err(bad(d, format!("dim {dim} but {} state names", states.len())));
        }
    }
    let mut params = Vec::new();
    if let Some(p) = get("params") {
        for item in list(&p.value) {
            let (n, v) = item
                .split_once(':')
                .ok_or_else(|| bad(p, format!("`{item}` is not `name: value`")))?;
            params.push((n.trim().to_string(), num(p, v)?));
        }
    }
    let mut rhs = Vec::new();
    for s in &states {
        let key = format!("d{s}");
        rhs.push(get(&key).ok_or_else(|| missing(&key))?.value.clone());
    }
    for e in es {
        let known = matches!(e.key.as_str(), "name" | "dim" | "state" | "params")
            || states.iter().any(|s| e.key == format!("d{s}"));
        if !known {
            return Err(ModelFileError::UnknownKey {
                line: e.line,
                section: "model".into(),
                key: e.key.clone(),
            });
        }
    }
    Ok(ModelSpec {
        name,
        states,
        params,
        rhs,
    })
}

fn parse_region(es: &[Entry]) -> Result<RegionSpec, ModelFileError> {
    let mut out = None;
    for e in es {
        let spec = match e.key.as_str() {
            "builtin" => match e.value.as_str() {
                "true" => RegionSpec::Builtin,
                _ => return Err(bad(e, "only `builtin = true` is meaningful")),
            },
            "interval" => {
                let v = nums(e, 2)?;
                RegionSpec::Interval(v[0], v[1])
            }
            "circle" => {
                let v = nums(e, 3)?;
                RegionSpec::Circle {
                    center: [v[0], v[1]],
                    radius: v[2],
                }
            }
            "vertices" => {
                let mut pts = Vec::new();
                for pair in list(&e.value) {
                    let xy: Vec<&str> = pair.split_whitespace().collect();
                    if xy.len() != 2 {
                        return Err(bad(e, format!("vertex `{pair}` needs two coordinates")));
                    }
                    pts.push([num(e, xy[0])?, num(e, xy[1])?]);
                }
                RegionSpec::Polygon(pts)
            }
            _ => {
                return Err(ModelFileError::UnknownKey {
                    line: e.line,
                    section: "region".into(),
                    key: e.key.clone(),
                })
            }
        };
        if out.is_some() {
            return Err(bad(e, "a region takes exactly one shape"));
        }
        out = Some(spec);
    }
    out.ok_or_else(|| ModelFileError::Missing {
        section: "region".into(),
        key: "builtin, vertices, interval or circle".into(),
    })
}

fn parse_analysis(es: &[Entry]) -> Result<AnalysisSpec, ModelFileError> {
    let mut a = AnalysisSpec::default();
    for e in es {
        match e.key.as_str() {
            "tol" => a.tol = Some(num(e, &e.value)?),
            "t_max" => a.t_max = Some(num(e, &e.value)?),
            "seed" => a.seed = Some(int(e)?),
            "grid" => a.grid = Some(int(e)?),
            "boundary_samples" => a.boundary_samples = Some(int(e)?),
            "rays" => a.rays = Some(int(e)?),
            "side_samples" => a.side_samples = Some(int(e)?),
            "cycle_scan" => a.cycle_scan = Some(int(e)?),
            _ => {
                return Err(ModelFileError::UnknownKey {
                    line: e.line,
                    section: "analysis".into(),
                    key: e.key.clone(),
                })
            }
        }
    }
    Ok(a)
}

impl fmt::Display for ModelFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.model;
        let mut s = String::from("[model]\n");
        let _ = writeln!(s, "name = {}", quote(&m.name));
        let _ = writeln!(s, "dim = {}", m.states.len());
        let _ = writeln!(s, "state = {}", m.states.join(", "));
        if !m.params.is_empty() {
            let ps: Vec<String> = m.params.iter().map(|(n, v)| format!("{n}: {v}")).collect();
            let _ = writeln!(s, "params = {}", ps.join(", "));
        }
        for (st, r) in m.states.iter().zip(&m.rhs) {
            let _ = writeln!(s, "d{st} = {}", quote(r));
        }
        s.push_str("\n[region]\n");
        match &self.region {
            RegionSpec::Builtin => s.push_str("builtin = true\n"),
            RegionSpec::Interval(lo, hi) => {
                let _ = writeln!(s, "interval = {lo}, {hi}");
            }
            RegionSpec::Circle { center, radius } => {
                let _ = writeln!(s, "circle = {}, {}, {radius}", center[0], center[1]);
            }
            RegionSpec::Polygon(v) => {
                let pts: Vec<String> = v.iter().map(|p| format!("{} {}", p[0], p[1])).collect();
                let _ = writeln!(s, "vertices = {}", pts.join(", "));
            }
        }
        let a = &self.analysis;
        let mut lines = Vec::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                lines.push(format!("{k} = {v}"));
            }
        };
        put("tol", a.tol.map(|x| x.to_string()));
        put("t_max", a.t_max.map(|x| x.to_string()));
        put("seed", a.seed.map(|x| x.to_string()));
        put("grid", a.grid.map(|x| x.to_string()));
        put("boundary_samples", a.boundary_samples.map(|x| x.to_string()));
        put("rays", a.rays.map(|x| x.to_string()));
        put("side_samples", a.side_samples.map(|x| x.to_string()));
        put("cycle_scan", a.cycle_scan.map(|x| x.to_string()));
        if !lines.is_empty() {
            s.push_str("\n[analysis]\n");
            for l in lines {
                s.push_str(&l);
                s.push('\n');
            }
        }
        f.write_str(&s)
    }
}
