//! Tiling documents as JSON Lines.
//!
//! The first line is a header object
//! `{"format_version":"1","kind":...,"parameters":{...}}`; every further
//! line is one tile `{"id":{"strip":..,"col":..,"slot":..,"corner":..},"vertices":[[x,y],...]}`.
//! Coordinates are decimal strings with 17 significant digits, which
//! round-trip every binary64 value exactly.

use std::fmt::Write as _;
use std::str::FromStr;

use fairtile::geom::Corner;
use fairtile::{Point, Polygonal, Quadrangle, TileId, TileKey, Triangle};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, thiserror::Error)]
pub enum DocumentError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("empty document")]
    Empty,
    #[error("unsupported format version {0:?}")]
    Version(String),
    #[error("expected a {expected} document, found {found}")]
    WrongKind { expected: &'static str, found: Kind },
    #[error("tile {key}: {message}")]
    BadTile { key: TileKey, message: String },
    #[error("parameter {0:?} missing or malformed")]
    Parameter(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Strip,
    Plane,
    Quad,
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Kind::Strip => "strip",
            Kind::Plane => "plane",
            Kind::Quad => "quad",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TileRecord {
    pub key: TileKey,
    pub vertices: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TilingDocument {
    pub kind: Kind,
    pub parameters: Map<String, Value>,
    pub tiles: Vec<TileRecord>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    format_version: String,
    kind: Kind,
    parameters: Map<String, Value>,
}

#[derive(Serialize, Deserialize)]
struct IdRecord {
    strip: i64,
    col: i64,
    slot: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    corner: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct TileLine {
    id: IdRecord,
    vertices: Vec<[String; 2]>,
}

/// `v` with 17 significant digits.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn parse_real(s: &str) -> Option<f64> {
    f64::from_str(s).ok()
}

/// A real stored as a 17-digit string parameter.
pub fn real_value(v: f64) -> Value {
    Value::String(format_real(v))
}

impl TilingDocument {
    pub fn new(kind: Kind) -> Self {
        Self {
            kind,
            parameters: Map::new(),
            tiles: Vec::new(),
        }
    }

    pub fn with_tiles<K: Into<TileKey> + Copy, P: Polygonal<f64>>(kind: Kind, tiles: &[(K, P)]) -> Self {
        let mut d = Self::new(kind);
        d.tiles = tiles
            .iter()
            .map(|(k, p)| TileRecord {
                key: (*k).into(),
                vertices: p.vertices().to_vec(),
            })
            .collect();
        d
    }

    pub fn set(&mut self, name: &str, v: impl Into<Value>) -> &mut Self {
        self.parameters.insert(name.into(), v.into());
        self
    }

    pub fn real_param(&self, name: &'static str) -> Result<f64, DocumentError> {
        match self.parameters.get(name) {
            Some(Value::String(s)) => parse_real(s),
            Some(Value::Number(n)) => n.as_f64(),
            _ => None,
        }
        .ok_or(DocumentError::Parameter(name))
    }

    pub fn reals_param(&self, name: &'static str) -> Result<Vec<f64>, DocumentError> {
        let Some(Value::Array(items)) = self.parameters.get(name) else {
            return Err(DocumentError::Parameter(name));
        };
        items
            .iter()
            .map(|v| v.as_str().and_then(parse_real).ok_or(DocumentError::Parameter(name)))
            .collect()
    }

    pub fn serialize(&self) -> String {
        let header = Header {
            format_version: FORMAT_VERSION.into(),
            kind: self.kind,
            parameters: self.parameters.clone(),
        };
        let mut out = serde_json::to_string(&header).expect("header serializes");
        out.push('\n');
        for t in &self.tiles {
            let line = TileLine {
                id: IdRecord {
                    strip: t.key.id.strip,
                    col: t.key.id.col,
                    slot: t.key.id.slot,
                    corner: t.key.corner.map(|c| c.as_char().to_string()),
                },
                vertices: t.vertices.iter().map(|p| [format_real(p.x), format_real(p.y)]).collect(),
            };
            let _ = writeln!(out, "{}", serde_json::to_string(&line).expect("tile serializes"));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or(DocumentError::Empty)?;
        let header: Header = serde_json::from_str(first).map_err(|e| DocumentError::Malformed {
            line: 1,
            message: e.to_string(),
        })?;
        if header.format_version != FORMAT_VERSION {
            return Err(DocumentError::Version(header.format_version));
        }
        let mut tiles = Vec::new();
        for (n, line) in lines {
            let bad = |message: String| DocumentError::Malformed { line: n + 1, message };
            let t: TileLine = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
            let id = TileId::new(t.id.strip, t.id.col, t.id.slot).map_err(|e| bad(e.to_string()))?;
            let corner = match t.id.corner.as_deref() {
                None => None,
                Some(s) => {
                    let mut ch = s.chars();
                    match (ch.next().and_then(Corner::from_char), ch.next()) {
                        (Some(c), None) => Some(c),
                        _ => return Err(bad(format!("bad corner {s:?}"))),
                    }
                }
            };
            let vertices = t
                .vertices
                .iter()
                .map(|[x, y]| match (parse_real(x), parse_real(y)) {
                    (Some(x), Some(y)) => Ok(Point::new(x, y)),
                    _ => Err(bad(format!("bad coordinate pair [{x:?}, {y:?}]"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            tiles.push(TileRecord {
                key: TileKey { id, corner },
                vertices,
            });
        }
        Ok(Self {
            kind: header.kind,
            parameters: header.parameters,
            tiles,
        })
    }

    fn expect_kind(&self, kinds: &[Kind], expected: &'static str) -> Result<(), DocumentError> {
        if kinds.contains(&self.kind) {
            Ok(())
        } else {
            Err(DocumentError::WrongKind {
                expected,
                found: self.kind,
            })
        }
    }

    /// Tiles of a strip or plane document.
    pub fn triangles(&self) -> Result<Vec<(TileId, Triangle)>, DocumentError> {
        self.expect_kind(&[Kind::Strip, Kind::Plane], "strip or plane")?;
        self.tiles
            .iter()
            .map(|t| {
                let bad = |message: String| DocumentError::BadTile { key: t.key, message };
                match t.vertices[..] {
                    [a, b, c] if t.key.corner.is_none() => {
                        Triangle::new(a, b, c).map(|tri| (t.key.id, tri)).map_err(|e| bad(e.to_string()))
                    }
                    _ => Err(bad("expected a triangle".into())),
                }
            })
            .collect()
    }

    /// Tiles of a quad document.
    pub fn quadrangles(&self) -> Result<Vec<(TileKey, Quadrangle)>, DocumentError> {
        self.expect_kind(&[Kind::Quad], "quad")?;
        self.tiles
            .iter()
            .map(|t| {
                let bad = |message: String| DocumentError::BadTile { key: t.key, message };
                match t.vertices[..] {
                    [a, b, c, d] => Quadrangle::new([a, b, c, d]).map(|q| (t.key, q)).map_err(|e| bad(e.to_string())),
                    _ => Err(bad("expected a quadrangle".into())),
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 5e-324, f64::MAX, 0.0, -0.0, 2f64.sqrt()] {
            let s = format_real(v);
            assert_eq!(parse_real(&s).unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(format_real(1.5), "1.5000000000000000e0");
    }

    #[test]
    fn document_round_trip() {
        let t = Triangle::new(Point::new(0.1, 0.0), Point::new(2.0, 1e-17), Point::new(1.0, 1.0 / 3.0)).unwrap();
        let mut d = TilingDocument::with_tiles(Kind::Plane, &[(TileId::new(-1, 0, 4).unwrap(), t)]);
        d.set("y0", real_value(0.0049)).set("seed", 42);
        let s = d.serialize();
        let back = TilingDocument::parse(&s).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.serialize(), s);
        assert_eq!(back.real_param("y0").unwrap(), 0.0049);
        assert_eq!(back.triangles().unwrap()[0].1, t);
    }

    #[test]
    fn corner_ids() {
        let q = Quadrangle::new([
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ])
        .unwrap();
        let key = TileKey::quad(TileId::new(2, -3, 2).unwrap(), Corner::B);
        let d = TilingDocument::with_tiles(Kind::Quad, &[(key, q)]);
        let s = d.serialize();
        assert!(s.contains("\"corner\":\"B\""));
        assert_eq!(TilingDocument::parse(&s).unwrap().quadrangles().unwrap()[0].0, key);
        assert!(matches!(
            TilingDocument::parse(&s).unwrap().triangles(),
            Err(DocumentError::WrongKind { .. })
        ));
    }

    #[test]
    fn malformed_input() {
        assert!(matches!(TilingDocument::parse(""), Err(DocumentError::Empty)));
        let h = r#"{"format_version":"2","kind":"strip","parameters":{}}"#;
        assert!(matches!(TilingDocument::parse(h), Err(DocumentError::Version(_))));
        let h = r#"{"format_version":"1","kind":"strip","parameters":{}}"#;
        let bad = format!("{h}\n{{\"id\":{{\"strip\":0,\"col\":0,\"slot\":2}},\"vertices\":[]}}\n");
        assert!(matches!(TilingDocument::parse(&bad), Err(DocumentError::Malformed { line: 2, .. })));
        let bad = format!("{h}\n{{\"id\":{{\"strip\":0,\"col\":1,\"slot\":2}},\"vertices\":[[\"x\",\"1\"]]}}\n");
        assert!(TilingDocument::parse(&bad).is_err());
        assert!(TilingDocument::parse(h).unwrap().tiles.is_empty());
    }
}
