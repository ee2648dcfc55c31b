//! Piecewise-linear finite elements on a metric graph.
//!
//! Every edge carries at least two intervals; vertex degrees of freedom are
//! shared between incident edges, which enforces continuity. Dirichlet
//! vertices are eliminated from the system, a δ-strength γ lands on the
//! stiffness diagonal of its vertex degree of freedom.

use nalgebra::{DMatrix, DVector};

use crate::graph::{MetricGraph, VertexCondition};

use super::SpectralError;

/// Node layout of the P1 discretisation of a graph.
#[derive(Debug, Clone)]
pub struct FemMesh {
    /// Free degree of freedom of each vertex; `None` when Dirichlet.
    pub(crate) vertex_dof: Vec<Option<usize>>,
    /// Per edge: (number of intervals, first interior dof).
    pub(crate) edge_layout: Vec<(usize, usize)>,
    /// Total number of free degrees of freedom.
    pub(crate) num_dofs: usize,
    /// Interval length per edge.
    pub(crate) edge_h: Vec<f64>,
}

impl FemMesh {
    /// Builds the mesh with `points_per_unit` target density (at least two
    /// intervals per edge).
    pub fn new(g: &MetricGraph, points_per_unit: usize) -> Result<FemMesh, SpectralError> {
        if g.edges().is_empty() {
            return Err(SpectralError::EmptyGraph);
        }
        let mut vertex_dof = Vec::with_capacity(g.vertices().len());
        let mut next = 0usize;
        for v in g.vertices() {
            if v.condition.is_dirichlet() {
                vertex_dof.push(None);
            } else {
                vertex_dof.push(Some(next));
                next += 1;
            }
        }
        let mut edge_layout = Vec::with_capacity(g.edges().len());
        let mut edge_h = Vec::with_capacity(g.edges().len());
        for e in g.edges() {
            let n = ((points_per_unit as f64 * e.length).ceil() as usize).max(2);
            edge_layout.push((n, next));
            next += n - 1;
            edge_h.push(e.length / n as f64);
        }
        Ok(FemMesh {
            vertex_dof,
            edge_layout,
            num_dofs: next,
            edge_h,
        })
    }

    pub fn num_dofs(&self) -> usize {
        self.num_dofs
    }

    /// Free dof of node `j` (0..=n) on edge `ei`, `None` on Dirichlet ends.
    pub(crate) fn node_dof(&self, g: &MetricGraph, ei: usize, j: usize) -> Option<usize> {
        let (n, interior0) = self.edge_layout[ei];
        let e = &g.edges()[ei];
        if j == 0 {
            self.vertex_dof[g.vertex_position(&e.from).unwrap()]
        } else if j == n {
            self.vertex_dof[g.vertex_position(&e.to).unwrap()]
        } else {
            Some(interior0 + j - 1)
        }
    }

    /// Length-weighted mean square interval length, the scale in the P1
    /// eigenvalue error `lambda^2 h^2 / 12`.
    pub(crate) fn h_eff_sq(&self, g: &MetricGraph) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (e, h) in g.edges().iter().zip(&self.edge_h) {
            num += e.length * h * h;
            den += e.length;
        }
        num / den
    }
}

/// Assembles the stiffness matrix (with δ-terms) and the mass matrix.
pub(crate) fn assemble(g: &MetricGraph, mesh: &FemMesh) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = mesh.num_dofs;
    let mut k = DMatrix::zeros(n, n);
    let mut m = DMatrix::zeros(n, n);
    for (ei, _e) in g.edges().iter().enumerate() {
        let (nint, _) = mesh.edge_layout[ei];
        let h = mesh.edge_h[ei];
        let kloc = [[1.0 / h, -1.0 / h], [-1.0 / h, 1.0 / h]];
        let mloc = [[h / 3.0, h / 6.0], [h / 6.0, h / 3.0]];
        for j in 0..nint {
            let dofs = [mesh.node_dof(g, ei, j), mesh.node_dof(g, ei, j + 1)];
            for (a, da) in dofs.iter().enumerate() {
                let Some(da) = da else { continue };
                for (b, db) in dofs.iter().enumerate() {
                    let Some(db) = db else { continue };
                    k[(*da, *db)] += kloc[a][b];
                    m[(*da, *db)] += mloc[a][b];
                }
            }
        }
    }
    for (vi, v) in g.vertices().iter().enumerate() {
        if let VertexCondition::Delta { gamma } = v.condition {
            if let Some(d) = mesh.vertex_dof[vi] {
                k[(d, d)] += gamma;
            }
        }
    }
    (k, m)
}

/// Solves `K u = lambda M u` for all eigenvalues, ascending, via a Cholesky
/// reduction to a standard symmetric problem.
pub(crate) fn solve_generalized(
    k: &DMatrix<f64>,
    m: &DMatrix<f64>,
) -> Result<(Vec<f64>, DMatrix<f64>), SpectralError> {
    let chol = nalgebra::Cholesky::new(m.clone())
        .ok_or_else(|| SpectralError::SolverFailure("mass matrix not positive definite".into()))?;
    let l = chol.l();
    let b = l
        .solve_lower_triangular(k)
        .ok_or_else(|| SpectralError::SolverFailure("singular Cholesky factor".into()))?;
    let mut a = l
        .solve_lower_triangular(&b.transpose())
        .ok_or_else(|| SpectralError::SolverFailure("singular Cholesky factor".into()))?;
    // K is symmetric, so A is too; average away the rounding skew.
    let at = a.transpose();
    a = (a + at) * 0.5;
    let eig = a.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(a.nrows(), order.len());
    for (col, &i) in order.iter().enumerate() {
        let y = eig.eigenvectors.column(i).into_owned();
        // Back-substitute u = L^{-T} y.
        let u = l
            .transpose()
            .solve_upper_triangular(&y)
            .ok_or_else(|| SpectralError::SolverFailure("singular Cholesky factor".into()))?;
        vectors.set_column(col, &u);
    }
    Ok((values, vectors))
}

/// A continuous piecewise-linear function given by nodal values on a mesh;
/// Dirichlet vertices hold the implicit value zero.
#[derive(Debug, Clone)]
pub struct MeshFunction {
    pub mesh: FemMesh,
    pub values: DVector<f64>,
}

impl MeshFunction {
    /// Samples `f(edge index, x)` at every mesh node.
    pub fn from_fn(
        g: &MetricGraph,
        mesh: &FemMesh,
        f: impl Fn(usize, f64) -> f64,
    ) -> MeshFunction {
        let mut values = DVector::zeros(mesh.num_dofs);
        for ei in 0..g.edges().len() {
            let (n, _) = mesh.edge_layout[ei];
            let h = mesh.edge_h[ei];
            for j in 0..=n {
                if let Some(d) = mesh.node_dof(g, ei, j) {
                    values[d] = f(ei, j as f64 * h);
                }
            }
        }
        MeshFunction {
            mesh: mesh.clone(),
            values,
        }
    }

    pub fn node_value(&self, g: &MetricGraph, ei: usize, j: usize) -> f64 {
        match self.mesh.node_dof(g, ei, j) {
            Some(d) => self.values[d],
            None => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::MetricGraph;
    use crate::graph::VertexCondition::*;

    #[test]
    fn interval_neumann_fem_converges_to_pi_squared() {
        let g = MetricGraph::from_parts(
            [("a", Natural), ("b", Natural)],
            [("e", "a", "b", 1.0)],
        )
        .unwrap();
        let mesh = FemMesh::new(&g, 64).unwrap();
        let (k, m) = assemble(&g, &mesh);
        let (vals, _) = solve_generalized(&k, &m).unwrap();
        assert!(vals[0].abs() < 1e-10);
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((vals[1] - pi2).abs() < 1e-2, "lambda2 = {}", vals[1]);
    }

    #[test]
    fn dirichlet_interval_eliminates_vertex_dofs() {
        let g = MetricGraph::from_parts(
            [("a", Dirichlet), ("b", Dirichlet)],
            [("e", "a", "b", 1.0)],
        )
        .unwrap();
        let mesh = FemMesh::new(&g, 32).unwrap();
        assert_eq!(mesh.num_dofs(), 31);
        let (k, m) = assemble(&g, &mesh);
        let (vals, _) = solve_generalized(&k, &m).unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((vals[0] - pi2).abs() < 2e-2);
    }

    #[test]
    fn negative_gamma_gives_negative_bottom_eigenvalue() {
        // Dirichlet at one end, delta(-2) at the other: lambda1 < 0.
        let g = MetricGraph::from_parts(
            [("a", Dirichlet), ("b", Delta { gamma: -2.0 })],
            [("e", "a", "b", 1.0)],
        )
        .unwrap();
        let mesh = FemMesh::new(&g, 64).unwrap();
        let (k, m) = assemble(&g, &mesh);
        let (vals, _) = solve_generalized(&k, &m).unwrap();
        assert!(vals[0] < -0.5, "lambda1 = {}", vals[0]);
    }
}
