//! Uniform node-based meshes in one and two dimensions, cell gradients
//! and Dirichlet boundary data.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exponent_space::{Grid, GridFunction};

/// Dirichlet data on the boundary nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryTrace {
    /// 1-D values at the two endpoints.
    Endpoints { g0: f64, g1: f64 },
    /// `c + gx·x + gy·y + gxx·x² + gxy·xy + gyy·y²` restricted to the boundary.
    Quadratic {
        c: f64,
        gx: f64,
        gy: f64,
        gxx: f64,
        gxy: f64,
        gyy: f64,
    },
}

impl BoundaryTrace {
    pub fn affine(c: f64, gx: f64, gy: f64) -> Self {
        BoundaryTrace::Quadratic {
            c,
            gx,
            gy,
            gxx: 0.0,
            gxy: 0.0,
            gyy: 0.0,
        }
    }

    pub fn is_affine(&self) -> bool {
        match *self {
            BoundaryTrace::Endpoints { .. } => true,
            BoundaryTrace::Quadratic { gxx, gxy, gyy, .. } => gxx == 0.0 && gxy == 0.0 && gyy == 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshSpec {
    dimension: usize,
    origin: Vec<f64>,
    extent: Vec<f64>,
    cells: Vec<usize>,
    boundary: BoundaryTrace,
    grid: Arc<Grid>,
}

impl MeshSpec {
    pub fn new(
        origin: Vec<f64>,
        extent: Vec<f64>,
        cells: Vec<usize>,
        boundary: BoundaryTrace,
    ) -> Result<Self> {
        let dimension = origin.len();
        if !(1..=2).contains(&dimension) || extent.len() != dimension || cells.len() != dimension {
            return Err(Error::invalid("mesh", "origin, extent and cells need 1 or 2 matching entries"));
        }
        if let Some(c) = cells.iter().find(|c| **c < 2) {
            return Err(Error::invalid("mesh", format!("{c} cells on an axis, need at least 2")));
        }
        if extent.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return Err(Error::invalid("mesh", "extents must be positive"));
        }
        if dimension == 2 && matches!(boundary, BoundaryTrace::Endpoints { .. }) {
            return Err(Error::invalid("mesh", "endpoint boundary data only applies in 1-D"));
        }
        let grid = if dimension == 1 {
            Grid::uniform_1d(origin[0], origin[0] + extent[0], cells[0])?
        } else {
            Grid::uniform_2d([origin[0], origin[1]], [extent[0], extent[1]], [cells[0], cells[1]])?
        };
        Ok(Self {
            dimension,
            origin,
            extent,
            cells,
            boundary,
            grid: Arc::new(grid),
        })
    }

    /// `[x0, x1]` split into `cells` pieces with `u(x0) = g0`, `u(x1) = g1`.
    pub fn interval(x0: f64, x1: f64, cells: usize, g0: f64, g1: f64) -> Result<Self> {
        Self::new(vec![x0], vec![x1 - x0], vec![cells], BoundaryTrace::Endpoints { g0, g1 })
    }

    pub fn rectangle(origin: [f64; 2], extent: [f64; 2], cells: [usize; 2], boundary: BoundaryTrace) -> Result<Self> {
        Self::new(origin.to_vec(), extent.to_vec(), cells.to_vec(), boundary)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn extent(&self) -> &[f64] {
        &self.extent
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn boundary(&self) -> BoundaryTrace {
        self.boundary
    }

    /// Cell-center grid carrying the quadrature weights.
    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.extent[axis] / self.cells[axis] as f64
    }

    fn nodes_per_axis(&self, axis: usize) -> usize {
        self.cells[axis] + 1
    }

    pub fn node_count(&self) -> usize {
        (0..self.dimension).map(|a| self.nodes_per_axis(a)).product()
    }

    fn node_index(&self, node: usize) -> (usize, usize) {
        let nx = self.nodes_per_axis(0);
        (node % nx, node / nx)
    }

    pub fn node_coords(&self, node: usize) -> Vec<f64> {
        let (i, j) = self.node_index(node);
        let mut x = vec![self.origin[0] + i as f64 * self.spacing(0)];
        if self.dimension == 2 {
            x.push(self.origin[1] + j as f64 * self.spacing(1));
        }
        x
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        let (i, j) = self.node_index(node);
        let on_x = i == 0 || i == self.cells[0];
        if self.dimension == 1 {
            on_x
        } else {
            on_x || j == 0 || j == self.cells[1]
        }
    }

    pub fn interior_nodes(&self) -> Vec<usize> {
        (0..self.node_count()).filter(|n| !self.is_boundary(*n)).collect()
    }

    /// Dirichlet value at a boundary node.
    pub fn trace_value(&self, node: usize) -> f64 {
        let x = self.node_coords(node);
        match self.boundary {
            BoundaryTrace::Endpoints { g0, g1 } => {
                if self.node_index(node).0 == 0 {
                    g0
                } else {
                    g1
                }
            }
            BoundaryTrace::Quadratic {
                c,
                gx,
                gy,
                gxx,
                gxy,
                gyy,
            } => {
                let (px, py) = (x[0], x.get(1).copied().unwrap_or(0.0));
                c + gx * px + gy * py + gxx * px * px + gxy * px * py + gyy * py * py
            }
        }
    }

    /// Corner nodes of a cell and, per corner, `∂ξ_k/∂u_node` for each axis `k`.
    pub fn stencil(&self, cell: usize) -> Vec<(usize, [f64; 2])> {
        if self.dimension == 1 {
            let h = self.spacing(0);
            return vec![(cell, [-1.0 / h, 0.0]), (cell + 1, [1.0 / h, 0.0])];
        }
        let (cx, nx) = (self.cells[0], self.nodes_per_axis(0));
        let (i, j) = (cell % cx, cell / cx);
        let (hx, hy) = (self.spacing(0), self.spacing(1));
        let n00 = j * nx + i;
        let (n10, n01, n11) = (n00 + 1, n00 + nx, n00 + nx + 1);
        let (ax, ay) = (0.5 / hx, 0.5 / hy);
        vec![
            (n00, [-ax, -ay]),
            (n10, [ax, -ay]),
            (n01, [-ax, ay]),
            (n11, [ax, ay]),
        ]
    }
}

/// Node values on a mesh; boundary nodes hold the Dirichlet data when the
/// field comes from [`interpolate_boundary`].
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteField<'m> {
    mesh: &'m MeshSpec,
    nodes: Vec<f64>,
}

impl<'m> DiscreteField<'m> {
    pub fn new(mesh: &'m MeshSpec, nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() != mesh.node_count() {
            return Err(Error::invalid(
                "discrete field",
                format!("{} node values for {} nodes", nodes.len(), mesh.node_count()),
            ));
        }
        if nodes.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("discrete field", "non-finite node value"));
        }
        Ok(Self { mesh, nodes })
    }

    /// Samples `f` at every node, boundary included.
    pub fn from_fn(mesh: &'m MeshSpec, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let nodes = (0..mesh.node_count()).map(|n| f(&mesh.node_coords(n))).collect();
        Self::new(mesh, nodes)
    }

    pub fn mesh(&self) -> &'m MeshSpec {
        self.mesh
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            mesh: self.mesh,
            nodes: self.nodes.iter().map(|v| c * v).collect(),
        }
    }

    /// Cell averages of the corner values.
    pub fn cell_values(&self) -> GridFunction {
        let grid = self.mesh.grid();
        let values = (0..grid.len())
            .map(|c| {
                let st = self.mesh.stencil(c);
                st.iter().map(|(n, _)| self.nodes[*n]).sum::<f64>() / st.len() as f64
            })
            .collect();
        GridFunction::scalar(grid.clone(), values).expect("finite node values")
    }

    /// Largest absolute nodal difference.
    pub fn sup_distance(&self, other: &[f64]) -> f64 {
        self.nodes
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Cell-wise finite-difference gradient: a forward difference across the
/// cell in 1-D, the average of opposite edge differences in 2-D. Exact
/// for affine fields.
pub fn gradient(u: &DiscreteField<'_>) -> GridFunction {
    let mesh = u.mesh;
    let dim = mesh.dimension();
    let grid = mesh.grid();
    let mut values = Vec::with_capacity(grid.len() * dim);
    for c in 0..grid.len() {
        let mut g = [0.0; 2];
        for (n, coeff) in mesh.stencil(c) {
            for k in 0..dim {
                g[k] += coeff[k] * u.nodes[n];
            }
        }
        values.extend_from_slice(&g[..dim]);
    }
    GridFunction::new(grid.clone(), dim, values).expect("finite node values")
}

/// A feasible starting field: linear interpolation of the endpoint data in
/// 1-D, transfinite (Coons) interpolation of the boundary values in 2-D.
pub fn interpolate_boundary(mesh: &MeshSpec) -> DiscreteField<'_> {
    let mut nodes = vec![0.0; mesh.node_count()];
    if mesh.dimension() == 1 {
        let m = mesh.cells()[0];
        let (g0, g1) = (mesh.trace_value(0), mesh.trace_value(m));
        for (i, v) in nodes.iter_mut().enumerate() {
            let s = i as f64 / m as f64;
            *v = (1.0 - s) * g0 + s * g1;
        }
    } else {
        let (cx, cy) = (mesh.cells()[0], mesh.cells()[1]);
        let nx = cx + 1;
        let g = |i: usize, j: usize| mesh.trace_value(j * nx + i);
        for j in 0..=cy {
            for i in 0..=cx {
                let node = j * nx + i;
                nodes[node] = if mesh.is_boundary(node) {
                    mesh.trace_value(node)
                } else {
                    let s = i as f64 / cx as f64;
                    let t = j as f64 / cy as f64;
                    (1.0 - s) * g(0, j) + s * g(cx, j) + (1.0 - t) * g(i, 0) + t * g(i, cy)
                        - ((1.0 - s) * (1.0 - t) * g(0, 0)
                            + s * (1.0 - t) * g(cx, 0)
                            + (1.0 - s) * t * g(0, cy)
                            + s * t * g(cx, cy))
                };
            }
        }
    }
    DiscreteField { mesh, nodes }
}
