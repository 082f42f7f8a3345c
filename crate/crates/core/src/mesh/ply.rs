//! PLY reading and writing.
//!
//! The reader accepts ASCII and both binary encodings, any scalar type for
//! vertex coordinates, and skips elements and properties it does not use.
//! Extra scalar vertex properties are kept so analysis outputs (radius,
//! residual, lfs, weight) survive a round trip.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlyEncoding {
    Ascii,
    BinaryLittleEndian,
    BinaryBigEndian,
}

/// Contents of a PLY file relevant to meshes and point clouds.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlyData {
    pub vertices: Vec<Point>,
    /// Extra scalar vertex properties, in header order.
    pub scalars: Vec<(String, Vec<f64>)>,
    /// Polygon faces as read (not yet triangulated).
    pub faces: Vec<Vec<u32>>,
}

impl PlyData {
    pub fn scalar(&self, name: &str) -> Option<&[f64]> {
        self.scalars
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ScalarType {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl ScalarType {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "char" | "int8" => ScalarType::I8,
            "uchar" | "uint8" => ScalarType::U8,
            "short" | "int16" => ScalarType::I16,
            "ushort" | "uint16" => ScalarType::U16,
            "int" | "int32" => ScalarType::I32,
            "uint" | "uint32" => ScalarType::U32,
            "float" | "float32" => ScalarType::F32,
            "double" | "float64" => ScalarType::F64,
            _ => return None,
        })
    }

    fn is_integer(self) -> bool {
        !matches!(self, ScalarType::F32 | ScalarType::F64)
    }
}

#[derive(Debug, Clone)]
enum PropertyKind {
    Scalar(ScalarType),
    List { count: ScalarType, item: ScalarType },
}

#[derive(Debug, Clone)]
struct Property {
    name: String,
    kind: PropertyKind,
}

#[derive(Debug, Clone)]
struct Element {
    name: String,
    count: u64,
    properties: Vec<Property>,
}

struct Header {
    encoding: PlyEncoding,
    elements: Vec<Element>,
    body_offset: usize,
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    let mut offset = 0;
    let mut next_line = || -> Result<&str> {
        let rest = &bytes[offset..];
        let end = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| parse_err("PLY header is not terminated by end_header"))?;
        offset += end + 1;
        let line = std::str::from_utf8(&rest[..end])
            .map_err(|_| parse_err("PLY header is not valid UTF-8"))?;
        Ok(line.trim_end_matches('\r'))
    };

    if next_line()?.trim() != "ply" {
        return Err(parse_err("missing 'ply' magic"));
    }

    let mut encoding = None;
    let mut elements: Vec<Element> = Vec::new();
    loop {
        let line = next_line()?;
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            None | Some("comment") | Some("obj_info") => {}
            Some("format") => {
                encoding = Some(match tokens.next() {
                    Some("ascii") => PlyEncoding::Ascii,
                    Some("binary_little_endian") => PlyEncoding::BinaryLittleEndian,
                    Some("binary_big_endian") => PlyEncoding::BinaryBigEndian,
                    other => return Err(parse_err(format!("unknown PLY format {other:?}"))),
                });
            }
            Some("element") => {
                let name = tokens
                    .next()
                    .ok_or_else(|| parse_err("element without a name"))?;
                let count = tokens
                    .next()
                    .and_then(|c| c.parse::<u64>().ok())
                    .ok_or_else(|| parse_err(format!("element {name} has no valid count")))?;
                elements.push(Element {
                    name: name.to_string(),
                    count,
                    properties: Vec::new(),
                });
            }
            Some("property") => {
                let element = elements
                    .last_mut()
                    .ok_or_else(|| parse_err("property declared before any element"))?;
                let ty = tokens.next().ok_or_else(|| parse_err("empty property"))?;
                let kind = if ty == "list" {
                    let count = tokens
                        .next()
                        .and_then(ScalarType::parse)
                        .ok_or_else(|| parse_err("bad list count type"))?;
                    let item = tokens
                        .next()
                        .and_then(ScalarType::parse)
                        .ok_or_else(|| parse_err("bad list item type"))?;
                    if !count.is_integer() {
                        return Err(parse_err("list count type must be an integer"));
                    }
                    PropertyKind::List { count, item }
                } else {
                    PropertyKind::Scalar(
                        ScalarType::parse(ty)
                            .ok_or_else(|| parse_err(format!("unknown property type {ty}")))?,
                    )
                };
                let name = tokens
                    .next()
                    .ok_or_else(|| parse_err("property without a name"))?;
                element.properties.push(Property {
                    name: name.to_string(),
                    kind,
                });
            }
            Some("end_header") => break,
            Some(other) => return Err(parse_err(format!("unexpected header keyword {other}"))),
        }
    }

    Ok(Header {
        encoding: encoding.ok_or_else(|| parse_err("PLY header has no format line"))?,
        elements,
        body_offset: offset,
    })
}

/// Pulls typed values out of the body regardless of encoding.
trait ValueReader {
    fn read(&mut self, ty: ScalarType) -> Result<f64>;

    fn read_count(&mut self, ty: ScalarType) -> Result<u64> {
        let v = self.read(ty)?;
        if v < 0.0 || v.fract() != 0.0 {
            return Err(parse_err(format!("invalid list length {v}")));
        }
        Ok(v as u64)
    }
}

struct AsciiReader<'a> {
    tokens: std::str::SplitAsciiWhitespace<'a>,
}

impl ValueReader for AsciiReader<'_> {
    fn read(&mut self, ty: ScalarType) -> Result<f64> {
        let tok = self
            .tokens
            .next()
            .ok_or_else(|| parse_err("unexpected end of PLY body"))?;
        if ty.is_integer() {
            tok.parse::<i64>()
                .map(|v| v as f64)
                .map_err(|_| parse_err(format!("invalid integer {tok:?}")))
        } else {
            tok.parse::<f64>()
                .map_err(|_| parse_err(format!("invalid number {tok:?}")))
        }
    }
}

struct BinaryReader<'a> {
    data: &'a [u8],
    pos: usize,
    little: bool,
}

impl BinaryReader<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self
            .pos
            .checked_add(N)
            .filter(|&e| e <= self.data.len())
            .ok_or_else(|| parse_err("unexpected end of binary PLY body"))?;
        let mut buf = [0u8; N];
        buf.copy_from_slice(&self.data[self.pos..end]);
        self.pos = end;
        if self.little != cfg!(target_endian = "little") {
            buf.reverse();
        }
        Ok(buf)
    }
}

impl ValueReader for BinaryReader<'_> {
    fn read(&mut self, ty: ScalarType) -> Result<f64> {
        Ok(match ty {
            ScalarType::I8 => i8::from_ne_bytes(self.take()?) as f64,
            ScalarType::U8 => u8::from_ne_bytes(self.take()?) as f64,
            ScalarType::I16 => i16::from_ne_bytes(self.take()?) as f64,
            ScalarType::U16 => u16::from_ne_bytes(self.take()?) as f64,
            ScalarType::I32 => i32::from_ne_bytes(self.take()?) as f64,
            ScalarType::U32 => u32::from_ne_bytes(self.take()?) as f64,
            ScalarType::F32 => f32::from_ne_bytes(self.take()?) as f64,
            ScalarType::F64 => f64::from_ne_bytes(self.take()?),
        })
    }
}

/// Parses a complete PLY file held in memory.
pub fn parse(bytes: &[u8]) -> Result<PlyData> {
    let header = parse_header(bytes)?;
    let body = &bytes[header.body_offset..];
    match header.encoding {
        PlyEncoding::Ascii => {
            let text =
                std::str::from_utf8(body).map_err(|_| parse_err("ASCII PLY body is not UTF-8"))?;
            let mut reader = AsciiReader {
                tokens: text.split_ascii_whitespace(),
            };
            read_body(&header.elements, &mut reader)
        }
        PlyEncoding::BinaryLittleEndian | PlyEncoding::BinaryBigEndian => {
            let mut reader = BinaryReader {
                data: body,
                pos: 0,
                little: header.encoding == PlyEncoding::BinaryLittleEndian,
            };
            read_body(&header.elements, &mut reader)
        }
    }
}

fn read_body(elements: &[Element], reader: &mut impl ValueReader) -> Result<PlyData> {
    let mut data = PlyData::default();
    let mut seen_vertex = false;
    for element in elements {
        if element.properties.is_empty() {
            continue;
        }
        match element.name.as_str() {
            "vertex" if !seen_vertex => {
                seen_vertex = true;
                read_vertices(element, reader, &mut data)?;
            }
            "face" => read_faces(element, reader, &mut data)?,
            _ => {
                for _ in 0..element.count {
                    for prop in &element.properties {
                        skip_property(prop, reader)?;
                    }
                }
            }
        }
    }
    Ok(data)
}

fn skip_property(prop: &Property, reader: &mut impl ValueReader) -> Result<()> {
    match prop.kind {
        PropertyKind::Scalar(ty) => {
            reader.read(ty)?;
        }
        PropertyKind::List { count, item } => {
            let n = reader.read_count(count)?;
            for _ in 0..n {
                reader.read(item)?;
            }
        }
    }
    Ok(())
}

fn read_vertices(
    element: &Element,
    reader: &mut impl ValueReader,
    data: &mut PlyData,
) -> Result<()> {
    let coord_slot = |axis: &str| {
        element
            .properties
            .iter()
            .position(|p| p.name == axis && matches!(p.kind, PropertyKind::Scalar(_)))
            .ok_or_else(|| parse_err(format!("vertex element has no scalar '{axis}' property")))
    };
    let slots = [coord_slot("x")?, coord_slot("y")?, coord_slot("z")?];

    // Extra scalar properties, remembered by position in the property list.
    let extras: Vec<usize> = element
        .properties
        .iter()
        .enumerate()
        .filter(|(i, p)| !slots.contains(i) && matches!(p.kind, PropertyKind::Scalar(_)))
        .map(|(i, _)| i)
        .collect();
    data.scalars = extras
        .iter()
        .map(|&i| (element.properties[i].name.clone(), Vec::new()))
        .collect();

    let mut values = vec![0.0; element.properties.len()];
    for _ in 0..element.count {
        for (slot, prop) in element.properties.iter().enumerate() {
            match prop.kind {
                PropertyKind::Scalar(ty) => values[slot] = reader.read(ty)?,
                PropertyKind::List { .. } => skip_property(prop, reader)?,
            }
        }
        let p = Point::new(values[slots[0]], values[slots[1]], values[slots[2]]);
        if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
            return Err(parse_err("non-finite vertex coordinate"));
        }
        data.vertices.push(p);
        for (column, &slot) in data.scalars.iter_mut().zip(&extras) {
            column.1.push(values[slot]);
        }
    }
    Ok(())
}

fn read_faces(element: &Element, reader: &mut impl ValueReader, data: &mut PlyData) -> Result<()> {
    let index_slot = element
        .properties
        .iter()
        .position(|p| {
            matches!(p.kind, PropertyKind::List { .. })
                && (p.name == "vertex_indices" || p.name == "vertex_index")
        })
        .ok_or_else(|| parse_err("face element has no vertex_indices list"))?;

    for _ in 0..element.count {
        for (slot, prop) in element.properties.iter().enumerate() {
            match prop.kind {
                PropertyKind::List { count, item } if slot == index_slot => {
                    if !item.is_integer() {
                        return Err(parse_err("face indices must be integers"));
                    }
                    let n = reader.read_count(count)?;
                    let mut face = Vec::new();
                    for _ in 0..n {
                        let v = reader.read(item)?;
                        if v < 0.0 || v > u32::MAX as f64 {
                            return Err(parse_err(format!("face index {v} out of range")));
                        }
                        face.push(v as u32);
                    }
                    data.faces.push(face);
                }
                _ => skip_property(prop, reader)?,
            }
        }
    }
    Ok(())
}

/// Writes a PLY file with double-precision vertex coordinates, any number of
/// extra double scalar vertex properties and, if given, a triangle face list.
pub fn write<W: Write>(
    mut out: W,
    encoding: PlyEncoding,
    vertices: &[Point],
    scalars: &[(&str, &[f64])],
    triangles: Option<&[[u32; 3]]>,
) -> io::Result<()> {
    for (name, column) in scalars {
        if column.len() != vertices.len() {
            return Err(io::Error::new(
                io::ErrorKind::InvalidInput,
                format!("property {name} has {} values for {} vertices", column.len(), vertices.len()),
            ));
        }
    }

    let format = match encoding {
        PlyEncoding::Ascii => "ascii",
        PlyEncoding::BinaryLittleEndian => "binary_little_endian",
        PlyEncoding::BinaryBigEndian => "binary_big_endian",
    };
    writeln!(out, "ply")?;
    writeln!(out, "format {format} 1.0")?;
    writeln!(out, "element vertex {}", vertices.len())?;
    for axis in ["x", "y", "z"] {
        writeln!(out, "property double {axis}")?;
    }
    for (name, _) in scalars {
        writeln!(out, "property double {name}")?;
    }
    if let Some(tris) = triangles {
        writeln!(out, "element face {}", tris.len())?;
        writeln!(out, "property list uchar uint vertex_indices")?;
    }
    writeln!(out, "end_header")?;

    match encoding {
        PlyEncoding::Ascii => {
            for (i, p) in vertices.iter().enumerate() {
                write!(out, "{} {} {}", p.x, p.y, p.z)?;
                for (_, column) in scalars {
                    write!(out, " {}", column[i])?;
                }
                writeln!(out)?;
            }
            for t in triangles.unwrap_or_default() {
                writeln!(out, "3 {} {} {}", t[0], t[1], t[2])?;
            }
        }
        PlyEncoding::BinaryLittleEndian | PlyEncoding::BinaryBigEndian => {
            let little = encoding == PlyEncoding::BinaryLittleEndian;
            let f = |v: f64| if little { v.to_le_bytes() } else { v.to_be_bytes() };
            let u = |v: u32| if little { v.to_le_bytes() } else { v.to_be_bytes() };
            for (i, p) in vertices.iter().enumerate() {
                out.write_all(&f(p.x))?;
                out.write_all(&f(p.y))?;
                out.write_all(&f(p.z))?;
                for (_, column) in scalars {
                    out.write_all(&f(column[i]))?;
                }
            }
            for t in triangles.unwrap_or_default() {
                out.write_all(&[3u8])?;
                for &idx in t {
                    out.write_all(&u(idx))?;
                }
            }
        }
    }
    out.flush()
}
