//! Uniform partitions of `[0, 1]` and the two field types living on them.
//!
//! A [`NodalField`] holds the coefficients of a continuous piecewise-linear
//! function in the hat-function basis; an [`ElementField`] holds one value
//! per element, which is the natural home of derivatives of P1 functions and
//! of the memory variable.

use std::ops::{Deref, DerefMut};

use crate::error::{check_len, Error, Result};

/// Uniform mesh `0 = x_0 < x_1 < ... < x_N = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    n_elements: usize,
    h: f64,
    nodes: Vec<f64>,
}

impl Mesh {
    /// Builds the uniform mesh with `n_elements` elements of width `1 / n_elements`.
    pub fn new(n_elements: usize) -> Result<Self> {
        if n_elements < 2 {
            return Err(Error::InvalidMesh(n_elements));
        }
        let h = 1.0 / n_elements as f64;
        // j / N rather than j * h so that the last node is exactly 1
        let nodes = (0..=n_elements)
            .map(|j| j as f64 / n_elements as f64)
            .collect();
        Ok(Mesh {
            n_elements,
            h,
            nodes,
        })
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn n_nodes(&self) -> usize {
        self.n_elements + 1
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate<F: Fn(f64) -> f64>(&self, f: F) -> NodalField {
        NodalField(self.nodes.iter().map(|&x| f(x)).collect())
    }

    pub fn zeros(&self) -> NodalField {
        NodalField(vec![0.0; self.n_nodes()])
    }

    pub fn element_zeros(&self) -> ElementField {
        ElementField(vec![0.0; self.n_elements])
    }

    /// Per-element slope of a P1 field.
    pub fn gradient(&self, w: &NodalField) -> Result<ElementField> {
        check_len(self.n_nodes(), w.len())?;
        Ok(ElementField(
            w.windows(2).map(|p| (p[1] - p[0]) / self.h).collect(),
        ))
    }

    /// Restriction of a fine-mesh nodal field onto this (coarser, nested) mesh.
    pub fn restrict(&self, fine: &NodalField) -> Result<NodalField> {
        let fine_elements = fine.len().saturating_sub(1);
        let ratio = nesting_ratio(self.n_elements, fine_elements)?;
        Ok(NodalField(fine.iter().step_by(ratio).copied().collect()))
    }

    /// Injects this mesh's field into a mesh refined `ratio` times by P1
    /// interpolation; values at the shared nodes are copied unchanged.
    pub fn prolong(&self, coarse: &NodalField, ratio: usize) -> Result<NodalField> {
        check_len(self.n_nodes(), coarse.len())?;
        if ratio == 0 {
            return Err(Error::param("ratio", "must be positive"));
        }
        let mut out = Vec::with_capacity(self.n_elements * ratio + 1);
        for pair in coarse.windows(2) {
            for s in 0..ratio {
                let xi = s as f64 / ratio as f64;
                out.push(pair[0] * (1.0 - xi) + pair[1] * xi);
            }
        }
        out.push(coarse[self.n_elements]);
        Ok(NodalField(out))
    }
}

/// Ratio `fine / coarse` when it is a power of two, else an error.
pub fn nesting_ratio(coarse: usize, fine: usize) -> Result<usize> {
    let nested = coarse > 0 && fine >= coarse && fine.is_multiple_of(coarse) && (fine / coarse).is_power_of_two();
    if nested {
        Ok(fine / coarse)
    } else {
        Err(Error::NonNestedMeshes {
            coarse,
            reference: fine,
        })
    }
}

/// Coefficients of a P1 function in the hat basis, one per node.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NodalField(pub Vec<f64>);

/// One value per element; piecewise-constant functions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ElementField(pub Vec<f64>);

macro_rules! field_impls {
    ($name:ident) => {
        impl $name {
            pub fn into_inner(self) -> Vec<f64> {
                self.0
            }

            /// Largest absolute value; for P1 fields this is the sup norm.
            pub fn max_abs(&self) -> f64 {
                self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
            }
        }

        impl Deref for $name {
            type Target = [f64];
            fn deref(&self) -> &[f64] {
                &self.0
            }
        }

        impl DerefMut for $name {
            fn deref_mut(&mut self) -> &mut [f64] {
                &mut self.0
            }
        }

        impl From<Vec<f64>> for $name {
            fn from(v: Vec<f64>) -> Self {
                $name(v)
            }
        }
    };
}

field_impls!(NodalField);
field_impls!(ElementField);

impl NodalField {
    pub fn left(&self) -> f64 {
        self.0[0]
    }

    pub fn right(&self) -> f64 {
        self.0[self.0.len() - 1]
    }
}
