//! Minimal Wavefront OBJ support: `v` and `f` records only.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::Point;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObjData {
    pub vertices: Vec<Point>,
    /// Faces fan-triangulated, 0-based.
    pub triangles: Vec<[u32; 3]>,
}

fn parse_err(line_no: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("OBJ line {line_no}: {msg}"))
}

/// Resolves an OBJ vertex reference (`i`, `i/t`, `i//n`, `i/t/n`, negative
/// indices relative to the vertices read so far) to a 0-based index.
fn resolve_index(token: &str, defined: usize, line_no: usize) -> Result<u32> {
    let head = token.split('/').next().unwrap_or_default();
    let raw: i64 = head
        .parse()
        .map_err(|_| parse_err(line_no, format_args!("bad vertex reference {token:?}")))?;
    let idx = match raw {
        0 => return Err(parse_err(line_no, "vertex index 0 is invalid")),
        r if r > 0 => r - 1,
        r => defined as i64 + r,
    };
    if idx < 0 || idx > u32::MAX as i64 {
        return Err(parse_err(line_no, format_args!("vertex reference {token:?} out of range")));
    }
    Ok(idx as u32)
}

pub fn parse(bytes: &[u8]) -> Result<ObjData> {
    let text = std::str::from_utf8(bytes).map_err(|_| Error::Parse("OBJ is not UTF-8".into()))?;
    let mut data = ObjData::default();

    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.split('#').next().unwrap_or_default();
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let mut coord = [0.0f64; 3];
                for c in &mut coord {
                    let tok = tokens
                        .next()
                        .ok_or_else(|| parse_err(line_no, "vertex needs three coordinates"))?;
                    *c = tok
                        .parse()
                        .map_err(|_| parse_err(line_no, format_args!("bad coordinate {tok:?}")))?;
                    if !c.is_finite() {
                        return Err(parse_err(line_no, "non-finite coordinate"));
                    }
                }
                data.vertices.push(Point::from(coord));
            }
            Some("f") => {
                let defined = data.vertices.len();
                let refs = tokens
                    .map(|t| resolve_index(t, defined, line_no))
                    .collect::<Result<Vec<_>>>()?;
                if refs.len() < 3 {
                    return Err(parse_err(line_no, "face needs at least three vertices"));
                }
                for w in 1..refs.len() - 1 {
                    data.triangles.push([refs[0], refs[w], refs[w + 1]]);
                }
            }
            _ => {}
        }
    }

    let n = data.vertices.len();
    if let Some(bad) = data.triangles.iter().flatten().find(|&&v| v as usize >= n) {
        return Err(Error::Parse(format!(
            "OBJ face references vertex {} but only {n} exist",
            bad + 1
        )));
    }
    Ok(data)
}

pub fn write<W: Write>(mut out: W, vertices: &[Point], triangles: &[[u32; 3]]) -> io::Result<()> {
    for p in vertices {
        writeln!(out, "v {} {} {}", p.x, p.y, p.z)?;
    }
    for t in triangles {
        writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
    }
    out.flush()
}
