use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// One step of an access path.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Segment {
    /// The exports of a loaded module, keyed by canonical module path. Only
    /// valid as the first segment.
    Import(String),
    Name(String),
    Wildcard,
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Segment::Import(lib) => write!(f, "require('{lib}')"),
            Segment::Name(n) => f.write_str(n),
            Segment::Wildcard => f.write_str("*"),
        }
    }
}

/// A dotted access path from a root context. The first segment is the root:
/// a default-available name, an import root, or (in manifests only) a
/// leading wildcard.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjPath {
    segments: Vec<Segment>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PathError {
    #[error("empty path")]
    Empty,
    #[error("empty segment in `{0}`")]
    EmptySegment(String),
    #[error("import root must be the first segment in `{0}`")]
    MisplacedImport(String),
    #[error("malformed import root in `{0}`")]
    BadImport(String),
    #[error("segment `{0}` contains `*` next to other characters")]
    BadWildcard(String),
}

impl ObjPath {
    pub fn new(segments: Vec<Segment>) -> Self {
        debug_assert!(!segments.is_empty());
        ObjPath { segments }
    }

    /// A path consisting of one default-available root name.
    pub fn root(name: &str) -> Self {
        ObjPath::new(vec![Segment::Name(name.to_string())])
    }

    pub fn import_root(lib: &str) -> Self {
        ObjPath::new(vec![Segment::Import(lib.to_string())])
    }

    /// Build from a root name and dotted field names.
    pub fn from_names<'a>(root: &str, fields: impl IntoIterator<Item = &'a str>) -> Self {
        let mut p = ObjPath::root(root);
        for f in fields {
            p.segments.push(Segment::Name(f.to_string()));
        }
        p
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn root_segment(&self) -> &Segment {
        &self.segments[0]
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn child(&self, seg: Segment) -> ObjPath {
        let mut segments = self.segments.clone();
        segments.push(seg);
        ObjPath { segments }
    }

    pub fn field(&self, name: &str) -> ObjPath {
        self.child(Segment::Name(name.to_string()))
    }

    pub fn parent(&self) -> Option<ObjPath> {
        (self.segments.len() > 1).then(|| ObjPath {
            segments: self.segments[..self.segments.len() - 1].to_vec(),
        })
    }

    /// Strict prefixes, shortest first.
    pub fn prefixes(&self) -> impl Iterator<Item = ObjPath> + '_ {
        (1..self.segments.len()).map(|n| ObjPath {
            segments: self.segments[..n].to_vec(),
        })
    }

    pub fn last_name(&self) -> Option<&str> {
        match self.segments.last()? {
            Segment::Name(n) => Some(n),
            _ => None,
        }
    }

    pub fn has_wildcard(&self) -> bool {
        self.segments.contains(&Segment::Wildcard)
    }

    pub fn is_concrete(&self) -> bool {
        !self.has_wildcard()
    }

    pub fn is_import_rooted(&self) -> bool {
        matches!(self.segments[0], Segment::Import(_))
    }

    /// The import root itself: `require('<lib>')` with no fields.
    pub fn is_import_root(&self) -> bool {
        self.segments.len() == 1 && self.is_import_rooted()
    }

    pub fn import_lib(&self) -> Option<&str> {
        match &self.segments[0] {
            Segment::Import(l) => Some(l),
            _ => None,
        }
    }

    pub fn root_name(&self) -> Option<&str> {
        match &self.segments[0] {
            Segment::Name(n) => Some(n),
            _ => None,
        }
    }

    /// Parse the manifest path syntax: `a.b.c`, `require('lib').f`,
    /// `import("lib").f`, with `*` wildcard segments.
    pub fn parse(text: &str) -> Result<ObjPath, PathError> {
        let text = text.trim();
        if text.is_empty() {
            return Err(PathError::Empty);
        }
        let mut segments = Vec::new();
        let rest = if let Some((lib, rest)) = parse_import_root(text)? {
            segments.push(Segment::Import(lib));
            match rest.strip_prefix('.') {
                Some(r) => r,
                None if rest.is_empty() => return Ok(ObjPath { segments }),
                None => return Err(PathError::BadImport(text.to_string())),
            }
        } else {
            text
        };
        for seg in rest.split('.') {
            if seg.is_empty() {
                return Err(PathError::EmptySegment(text.to_string()));
            }
            if seg == "*" {
                segments.push(Segment::Wildcard);
            } else if seg.contains('*') {
                return Err(PathError::BadWildcard(seg.to_string()));
            } else if seg.contains('(') || seg.contains(')') || seg.contains('\'') || seg.contains('"') {
                return Err(PathError::MisplacedImport(text.to_string()));
            } else {
                segments.push(Segment::Name(seg.to_string()));
            }
        }
        Ok(ObjPath { segments })
    }
}

fn parse_import_root(text: &str) -> Result<Option<(String, &str)>, PathError> {
    let body = match text.strip_prefix("require(").or_else(|| text.strip_prefix("import(")) {
        Some(b) => b,
        None => return Ok(None),
    };
    let bad = || PathError::BadImport(text.to_string());
    let quote = body.chars().next().ok_or_else(bad)?;
    if quote != '\'' && quote != '"' {
        return Err(bad());
    }
    let inner = &body[1..];
    let end = inner.find(quote).ok_or_else(bad)?;
    let lib = &inner[..end];
    let after = inner[end + 1..].strip_prefix(')').ok_or_else(bad)?;
    if lib.is_empty() {
        return Err(bad());
    }
    Ok(Some((lib.to_string(), after)))
}

impl fmt::Display for ObjPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.segments.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl Serialize for ObjPath {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ObjPath {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        ObjPath::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Does `pattern` cover the concrete path?
///
/// A leading `*` stands for one or more segments; any other `*` stands for
/// exactly one segment.
pub fn match_path(pattern: &ObjPath, concrete: &ObjPath) -> bool {
    let pat = pattern.segments();
    let cs = concrete.segments();
    match pat.split_first() {
        Some((Segment::Wildcard, rest)) => {
            if rest.len() >= cs.len() {
                return false;
            }
            // The leading wildcard absorbs exactly cs.len() - rest.len() >= 1
            // segments, since the remainder matches segment-for-segment.
            match_fixed(rest, &cs[cs.len() - rest.len()..])
        }
        _ => match_fixed(pat, cs),
    }
}

fn match_fixed(pat: &[Segment], cs: &[Segment]) -> bool {
    pat.len() == cs.len()
        && pat
            .iter()
            .zip(cs)
            .all(|(p, c)| *p == Segment::Wildcard || p == c)
}

/// Precedence class of a matching pattern: higher is more specific.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Specificity {
    Leading = 0,
    Trailing = 1,
    Exact = 2,
}

pub(crate) fn specificity(pattern: &ObjPath) -> Specificity {
    if pattern.segments[0] == Segment::Wildcard {
        Specificity::Leading
    } else if pattern.has_wildcard() {
        Specificity::Trailing
    } else {
        Specificity::Exact
    }
}
