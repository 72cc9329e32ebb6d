//! Legacy VTK `STRUCTURED_POINTS` files with a binary (big-endian) payload.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::volume::{Dims, ScalarField, VectorField};

/// Point data of a structured-points file.
#[derive(Debug, Clone, PartialEq)]
pub enum VtkData {
    Scalars(ScalarField),
    Vectors(VectorField),
}

fn header(dims: Dims, name: &str, body: &str) -> String {
    let [sx, sy, sz] = dims.spacing();
    format!(
        "# vtk DataFile Version 3.0\n{name}\nBINARY\nDATASET STRUCTURED_POINTS\n\
         DIMENSIONS {} {} {}\nORIGIN -1.0 -1.0 -1.0\nSPACING {sx:?} {sy:?} {sz:?}\n\
         POINT_DATA {}\n{body}",
        dims.nx,
        dims.ny,
        dims.nz,
        dims.count()
    )
}

fn write(path: &Path, head: String, values: impl Iterator<Item = f32>) -> Result<()> {
    let mut bytes = head.into_bytes();
    bytes.extend(values.flat_map(f32::to_be_bytes));
    bytes.push(b'\n');
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn write_vtk(field: &ScalarField, name: &str, path: &Path) -> Result<()> {
    let head = header(field.dims(), name, &format!("SCALARS {name} float 1\nLOOKUP_TABLE default\n"));
    write(path, head, field.data().iter().copied())
}

pub fn write_vtk_vectors(field: &VectorField, name: &str, path: &Path) -> Result<()> {
    let head = header(field.dims(), name, &format!("VECTORS {name} float\n"));
    write(path, head, field.data().iter().flatten().copied())
}

/// Reads back files produced by [`write_vtk`] / [`write_vtk_vectors`].
pub fn read_vtk(path: &Path) -> Result<VtkData> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let bad = |msg: &str| Error::Format(format!("{}: {msg}", path.display()));
    let mut pos = 0;
    let mut next_line = || -> Result<String> {
        let end = bytes[pos..]
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| bad("unexpected end of header"))?;
        let line = String::from_utf8_lossy(&bytes[pos..pos + end]).trim().to_string();
        pos += end + 1;
        Ok(line)
    };
    if !next_line()?.starts_with("# vtk DataFile") {
        return Err(bad("missing VTK signature"));
    }
    let _title = next_line()?;
    if next_line()? != "BINARY" {
        return Err(bad("only BINARY files are supported"));
    }
    if next_line()? != "DATASET STRUCTURED_POINTS" {
        return Err(bad("only STRUCTURED_POINTS datasets are supported"));
    }
    let mut dims = None;
    let components;
    loop {
        let line = next_line()?;
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("DIMENSIONS") => {
                let n: Vec<usize> = parts
                    .map(|t| t.parse().map_err(|_| bad("bad DIMENSIONS")))
                    .collect::<Result<_>>()?;
                if n.len() != 3 {
                    return Err(bad("DIMENSIONS needs three values"));
                }
                dims = Some(Dims::new(n[0], n[1], n[2]).map_err(|e| bad(&e.to_string()))?);
            }
            Some("ORIGIN") | Some("SPACING") | Some("POINT_DATA") | Some("LOOKUP_TABLE") => {}
            Some("SCALARS") => {
                if parts.nth(1) != Some("float") || parts.next().unwrap_or("1") != "1" {
                    return Err(bad("only single-component float SCALARS are supported"));
                }
                if next_line()? != "LOOKUP_TABLE default" {
                    return Err(bad("expected LOOKUP_TABLE default"));
                }
                components = 1;
                break;
            }
            Some("VECTORS") => {
                if parts.nth(1) != Some("float") {
                    return Err(bad("only float VECTORS are supported"));
                }
                components = 3;
                break;
            }
            Some(other) => return Err(bad(&format!("unexpected keyword {other}"))),
            None => {}
        }
    }
    let dims = dims.ok_or_else(|| bad("missing DIMENSIONS"))?;
    let len = dims.count() * components * 4;
    let payload = bytes
        .get(pos..pos + len)
        .ok_or_else(|| bad("payload shorter than DIMENSIONS imply"))?;
    let values: Vec<f32> = payload
        .chunks_exact(4)
        .map(|b| f32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .collect();
    Ok(if components == 1 {
        VtkData::Scalars(ScalarField::new(dims, values)?)
    } else {
        VtkData::Vectors(VectorField::new(
            dims,
            values.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect(),
        )?)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_for_two_cubed_zero_field() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("z.vtk");
        let f = ScalarField::new(Dims::cube(2).unwrap(), vec![0.0; 8]).unwrap();
        write_vtk(&f, "f", &path).unwrap();
        let bytes = fs::read(&path).unwrap();
        let text = String::from_utf8_lossy(&bytes);
        assert!(text.contains("DIMENSIONS 2 2 2\n"));
        assert!(text.contains("SPACING 2.0 2.0 2.0\n"));
        assert!(text.contains("ORIGIN -1.0 -1.0 -1.0\n"));
        assert!(text.contains("POINT_DATA 8\nSCALARS f float 1\nLOOKUP_TABLE default\n"));
    }

    #[test]
    fn scalar_round_trip_is_value_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.vtk");
        let f = ScalarField::from_fn(Dims::new(5, 3, 4).unwrap(), |x| (x[0] * 7.0).sin() + x[1] / 3.0 - x[2]).unwrap();
        write_vtk(&f, "f", &path).unwrap();
        assert_eq!(read_vtk(&path).unwrap(), VtkData::Scalars(f));
    }

    #[test]
    fn vector_payload_has_three_components() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.vtk");
        let f = VectorField::from_fn(Dims::cube(3).unwrap(), |x| [-x[1], x[0], 0.5]).unwrap();
        write_vtk_vectors(&f, "velocity", &path).unwrap();
        let bytes = fs::read(&path).unwrap();
        let text = String::from_utf8_lossy(&bytes);
        let head_end = text.find("VECTORS velocity float\n").unwrap() + "VECTORS velocity float\n".len();
        assert_eq!(bytes.len() - head_end, 27 * 3 * 4 + 1);
        assert_eq!(read_vtk(&path).unwrap(), VtkData::Vectors(f));
    }

    #[test]
    fn truncated_file_is_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.vtk");
        let f = ScalarField::new(Dims::cube(2).unwrap(), vec![1.0; 8]).unwrap();
        write_vtk(&f, "f", &path).unwrap();
        let bytes = fs::read(&path).unwrap();
        fs::write(&path, &bytes[..bytes.len() - 10]).unwrap();
        assert!(matches!(read_vtk(&path), Err(Error::Format(_))));
    }
}
