//! VTK and CSV output.

use std::fmt::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::fem::FeSpace;

const VTK_TRIANGLE: u8 = 5;
const VTK_QUADRATIC_TRIANGLE: u8 = 22;

pub(crate) fn write_text(path: &Path, text: &str) -> Result<(), HarnessError> {
    std::fs::write(path, text).map_err(|source| HarnessError::Io { path: path.display().to_string(), source })
}

/// Legacy ASCII unstructured grid with the point scalar `deflection`.
/// Quadratic spaces are written as 6-node triangles; other degrees as
/// linear triangles on the vertex values.
pub fn render_vtk(space: &FeSpace, coeffs: &[f64]) -> String {
    let mesh = space.mesh();
    let quadratic = space.degree() == 2;
    let npts = if quadratic { space.num_dofs() } else { mesh.num_vertices() };
    let per_cell = if quadratic { 6 } else { 3 };
    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\nplate deflection\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    writeln!(out, "POINTS {npts} double").unwrap();
    for p in &space.dof_nodes()[..npts] {
        writeln!(out, "{} {} 0", p.x, p.y).unwrap();
    }
    let nc = mesh.num_triangles();
    writeln!(out, "CELLS {nc} {}", nc * (per_cell + 1)).unwrap();
    for t in 0..nc {
        let dofs = &space.element_dofs(t)[..per_cell];
        let ids: Vec<String> = dofs.iter().map(usize::to_string).collect();
        writeln!(out, "{per_cell} {}", ids.join(" ")).unwrap();
    }
    writeln!(out, "CELL_TYPES {nc}").unwrap();
    let ty = if quadratic { VTK_QUADRATIC_TRIANGLE } else { VTK_TRIANGLE };
    for _ in 0..nc {
        writeln!(out, "{ty}").unwrap();
    }
    writeln!(out, "POINT_DATA {npts}\nSCALARS deflection double 1\nLOOKUP_TABLE default").unwrap();
    for v in &coeffs[..npts] {
        writeln!(out, "{v}").unwrap();
    }
    out
}

pub fn export_vtk(space: &FeSpace, coeffs: &[f64], path: &Path) -> Result<(), HarnessError> {
    space.check_len(coeffs)?;
    write_text(path, &render_vtk(space, coeffs))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodalValue {
    pub x: f64,
    pub y: f64,
    pub deflection: f64,
}

/// One row per DOF node.
pub fn export_solution_csv(space: &FeSpace, coeffs: &[f64], path: &Path) -> Result<(), HarnessError> {
    space.check_len(coeffs)?;
    let rows: Vec<NodalValue> = space.dof_nodes().iter().zip(coeffs).map(|(p, &v)| NodalValue { x: p.x, y: p.y, deflection: v }).collect();
    export_csv(&rows, path)
}

/// CSV with a header row taken from the field names of `R`.
pub fn export_csv<R: Serialize>(rows: &[R], path: &Path) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|source| HarnessError::Io { path: path.display().to_string(), source })
}

pub fn read_csv<R: DeserializeOwned>(path: &Path) -> Result<Vec<R>, HarnessError> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(HarnessError::from)).collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::mesh::{generate_structured_unit_square, Mesh};
    use nalgebra::Point2;

    #[test]
    fn single_triangle_vtk() {
        let mesh = Mesh::new(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)], vec![[0, 1, 2]]).unwrap();
        let space = FeSpace::new(Arc::new(mesh), 2).unwrap();
        let vtk = render_vtk(&space, &vec![0.0; 6]);
        assert!(vtk.contains("POINTS 6 double"));
        assert!(vtk.contains("CELLS 1 7\n6 0 1 2 3 4 5\n"));
        assert!(vtk.contains("CELL_TYPES 1\n22\n"));
        let scalars = vtk.split("LOOKUP_TABLE default\n").nth(1).unwrap();
        assert_eq!(scalars.lines().collect::<Vec<_>>(), vec!["0"; 6]);
    }

    #[test]
    fn cubic_space_falls_back_to_linear_cells() {
        let space = FeSpace::new(Arc::new(generate_structured_unit_square(1)), 3).unwrap();
        let vtk = render_vtk(&space, &vec![1.0; space.num_dofs()]);
        assert!(vtk.contains("POINTS 4 double") && vtk.contains("CELL_TYPES 2\n5\n5\n"));
    }

    #[test]
    fn solution_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let space = FeSpace::new(Arc::new(generate_structured_unit_square(2)), 2).unwrap();
        let coeffs = space.interpolate(|x, y| x * 0.1 + y / 3.0);
        let path = dir.path().join("s.csv");
        export_solution_csv(&space, &coeffs, &path).unwrap();
        let rows: Vec<NodalValue> = read_csv(&path).unwrap();
        assert_eq!(rows.len(), space.num_dofs());
        assert!(rows.iter().zip(&coeffs).all(|(r, c)| r.deflection == *c));
        assert!(std::fs::read_to_string(&path).unwrap().starts_with("x,y,deflection\n"));
        assert!(export_vtk(&space, &coeffs[1..], &path).is_err());
    }
}
