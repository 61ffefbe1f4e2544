//! SPHERETRI text format.
//!
//! ```text
//! SPHERETRI 1
//! r nv nt
//! x y z        (nv lines)
//! i j k        (nt lines, 1-based)
//! ```
//!
//! Reals are written with 17 significant digits, which round-trips `f64`.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use arpist_core::{Error as CoreError, TriangleMesh, Vec3};
use thiserror::Error;

const MAGIC: &str = "SPHERETRI";
const VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum MeshIoError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn parse_err(line: usize, message: impl Into<String>) -> MeshIoError {
    MeshIoError::Parse { line, message: message.into() }
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_mesh<W: Write>(mesh: &TriangleMesh, mut w: W) -> io::Result<()> {
    let mut s = String::new();
    writeln!(s, "{MAGIC} {VERSION}").unwrap();
    writeln!(s, "{} {} {}", fmt_f64(mesh.radius()), mesh.vertices().len(), mesh.len()).unwrap();
    for v in mesh.vertices() {
        writeln!(s, "{} {} {}", fmt_f64(v.x), fmt_f64(v.y), fmt_f64(v.z)).unwrap();
    }
    for t in mesh.triangles() {
        writeln!(s, "{} {} {}", t[0] + 1, t[1] + 1, t[2] + 1).unwrap();
    }
    w.write_all(s.as_bytes())
}

pub fn save_mesh(mesh: &TriangleMesh, path: impl AsRef<Path>) -> Result<(), MeshIoError> {
    let path = path.as_ref();
    let io_err = |source| MeshIoError::Io { path: path.display().to_string(), source };
    let mut f = io::BufWriter::new(fs::File::create(path).map_err(io_err)?);
    write_mesh(mesh, &mut f).map_err(io_err)?;
    f.flush().map_err(io_err)
}

pub fn load_mesh(path: impl AsRef<Path>) -> Result<TriangleMesh, MeshIoError> {
    let path = path.as_ref();
    let f = fs::File::open(path).map_err(|source| MeshIoError::Io { path: path.display().to_string(), source })?;
    read_mesh(f)
}

fn fields<T: std::str::FromStr>(line: &str, n: usize, lineno: usize, what: &str) -> Result<Vec<T>, MeshIoError> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != n {
        return Err(parse_err(lineno, format!("expected {n} fields for {what}, found {}", parts.len())));
    }
    parts
        .iter()
        .map(|p| p.parse::<T>().map_err(|_| parse_err(lineno, format!("invalid {what} field {p:?}"))))
        .collect()
}

pub fn read_mesh<R: Read>(r: R) -> Result<TriangleMesh, MeshIoError> {
    let mut lines = BufReader::new(r).lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next = |expect: &str| -> Result<(usize, String), MeshIoError> {
        match lines.next() {
            Some((n, Ok(l))) => Ok((n, l)),
            Some((n, Err(e))) => Err(parse_err(n, e.to_string())),
            None => Err(parse_err(0, format!("unexpected end of file, expected {expect}"))),
        }
    };

    let header = match next("header") {
        Ok((_, l)) if !l.trim().is_empty() => l,
        _ => return Err(parse_err(1, "missing header")),
    };
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.first() != Some(&MAGIC) {
        return Err(parse_err(1, "missing header"));
    }
    if head.get(1) != Some(&VERSION) || head.len() != 2 {
        return Err(parse_err(1, format!("unsupported header {header:?}")));
    }

    let (ln, counts) = next("size line")?;
    let parts: Vec<&str> = counts.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(parse_err(ln, "expected `r nv nt`"));
    }
    let radius: f64 = parts[0].parse().map_err(|_| parse_err(ln, "invalid radius"))?;
    let nv: usize = parts[1].parse().map_err(|_| parse_err(ln, "invalid vertex count"))?;
    let nt: usize = parts[2].parse().map_err(|_| parse_err(ln, "invalid triangle count"))?;
    if nv > u32::MAX as usize {
        return Err(parse_err(ln, "too many vertices"));
    }

    let first_vertex_line = ln + 1;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, l) = next("vertex")?;
        let c: Vec<f64> = fields(&l, 3, n, "vertex")?;
        vertices.push(Vec3::new(c[0], c[1], c[2]));
    }
    let first_tri_line = first_vertex_line + nv;
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (n, l) = next("triangle")?;
        let c: Vec<u64> = fields(&l, 3, n, "triangle")?;
        let mut t = [0u32; 3];
        for (dst, &i) in t.iter_mut().zip(&c) {
            if i == 0 || i > nv as u64 {
                return Err(parse_err(n, format!("vertex index {i} out of range 1..={nv}")));
            }
            *dst = (i - 1) as u32;
        }
        triangles.push(t);
    }
    for (n, l) in lines {
        match l {
            Ok(l) if l.trim().is_empty() => {}
            _ => return Err(parse_err(n, "trailing content after last triangle")),
        }
    }

    TriangleMesh::new(vertices, triangles, radius).map_err(|e| match e {
        CoreError::NotOnSphere { vertex, .. } => parse_err(first_vertex_line + vertex, e.to_string()),
        CoreError::InvalidMesh { triangle, ref reason } => {
            parse_err(first_tri_line + triangle, format!("triangle {}: {reason}", triangle + 1))
        }
        other => parse_err(ln, other.to_string()),
    })
}
