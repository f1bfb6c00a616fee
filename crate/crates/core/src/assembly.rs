//! Exact assembly of every term of the discrete weak form on a uniform P1 mesh.
//!
//! All element integrals are evaluated in closed form; the integrands are at
//! most cubic in the reference coordinate, so no quadrature rule is involved.
//! On element `[x_{j-1}, x_j]` the local basis is `1 - xi` (left node) and
//! `xi` (right node), with derivatives `-1/h` and `1/h`.

use crate::banded::Tridiagonal;
use crate::error::{check_len, Result};
use crate::mesh::{ElementField, Mesh, NodalField};
use crate::params::{PhysParams, Side};

/// Consistent mass matrix, `M_ij = (phi_j, phi_i)`.
pub fn mass_matrix(mesh: &Mesh) -> Tridiagonal {
    let h = mesh.h();
    assemble(mesh, [[h / 3.0, h / 6.0], [h / 6.0, h / 3.0]])
}

/// Stiffness matrix, `S_ij = (phi_j', phi_i')`.
pub fn stiffness_matrix(mesh: &Mesh) -> Tridiagonal {
    let k = 1.0 / mesh.h();
    assemble(mesh, [[k, -k], [-k, k]])
}

/// Convection matrix, `C_ij = (phi_j', phi_i)`.
pub fn convection_matrix(mesh: &Mesh) -> Tridiagonal {
    assemble(mesh, [[-0.5, 0.5], [-0.5, 0.5]])
}

/// Adds the same 2x2 element matrix (rows: test function, columns: trial) on
/// every element.
fn assemble(mesh: &Mesh, local: [[f64; 2]; 2]) -> Tridiagonal {
    let mut m = Tridiagonal::zeros(mesh.n_nodes());
    for e in 0..mesh.n_elements() {
        for (a, row) in local.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                m.add(e + a, e + b, v);
            }
        }
    }
    m
}

/// Load vector of the Burgers nonlinearity, `((W W_x), phi_i)`.
pub fn nonlinear_convection(w: &NodalField) -> NodalField {
    let mut out = vec![0.0; w.len()];
    for (e, pair) in w.windows(2).enumerate() {
        let (a, b) = (pair[0], pair[1]);
        out[e] += (b - a) * (2.0 * a + b) / 6.0;
        out[e + 1] += (b - a) * (a + 2.0 * b) / 6.0;
    }
    NodalField(out)
}

/// Jacobian of [`nonlinear_convection`] with respect to the nodal values.
pub fn nonlinear_convection_jacobian(w: &NodalField) -> Tridiagonal {
    let mut jac = Tridiagonal::zeros(w.len());
    for (e, pair) in w.windows(2).enumerate() {
        let (a, b) = (pair[0], pair[1]);
        jac.add(e, e, (b - 4.0 * a) / 6.0);
        jac.add(e, e + 1, (a + 2.0 * b) / 6.0);
        jac.add(e + 1, e, -(2.0 * a + b) / 6.0);
        jac.add(e + 1, e + 1, (4.0 * b - a) / 6.0);
    }
    jac
}

/// Load vector `(Z, phi_i')` of a piecewise-constant field: `-Z_e` on the
/// left node of each element and `+Z_e` on its right node.
pub fn memory_load(mesh: &Mesh, z: &ElementField) -> Result<NodalField> {
    check_len(mesh.n_elements(), z.len())?;
    let mut out = vec![0.0; mesh.n_nodes()];
    for (e, &ze) in z.iter().enumerate() {
        out[e] -= ze;
        out[e + 1] += ze;
    }
    Ok(NodalField(out))
}

/// Boundary terms of the closed-loop weak form: the feedback law's state
/// part at node 0 and at node N, zero elsewhere.
pub fn boundary_feedback_residual(w: &NodalField, params: &PhysParams) -> NodalField {
    let n = w.len();
    let mut out = vec![0.0; n];
    out[0] = params.boundary_flux(Side::Left, w.left());
    out[n - 1] = params.boundary_flux(Side::Right, w.right());
    NodalField(out)
}

/// Jacobian of [`boundary_feedback_residual`]; nonzero only at the two corners.
pub fn boundary_feedback_jacobian(w: &NodalField, params: &PhysParams) -> Tridiagonal {
    let n = w.len();
    let mut jac = Tridiagonal::zeros(n);
    jac.diag[0] = params.boundary_flux_derivative(Side::Left, w.left());
    jac.diag[n - 1] = params.boundary_flux_derivative(Side::Right, w.right());
    jac
}
