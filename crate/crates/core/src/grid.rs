use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform discretization of `[0, L]` by `nodes` equally spaced points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RodGrid<T> {
    length: T,
    nodes: usize,
}

impl<T: Real> RodGrid<T> {
    pub fn new(length: T, nodes: usize) -> Result<Self> {
        if nodes < 2 {
            return Err(Error::InsufficientGrid { nodes, required: 2 });
        }
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::InvalidParameter {
                name: "length",
                value: length.to_f64_lossy(),
                reason: "must be positive and finite",
            });
        }
        Ok(Self { length, nodes })
    }

    pub fn unit(nodes: usize) -> Result<Self> {
        Self::new(T::one(), nodes)
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn spacing(&self) -> T {
        self.length / T::from_usize(self.nodes - 1).unwrap()
    }

    pub fn position(&self, i: usize) -> T {
        self.spacing() * T::from_usize(i).unwrap()
    }

    pub fn positions(&self) -> Vec<T> {
        (0..self.nodes).map(|i| self.position(i)).collect()
    }

    /// Composite trapezoid weights.
    pub fn weights(&self) -> Vec<T> {
        let h = self.spacing();
        let mut w = vec![h; self.nodes];
        w[0] = h * T::half();
        w[self.nodes - 1] = h * T::half();
        w
    }

    /// Trapezoid quadrature of nodal values.
    pub fn integrate(&self, values: &[T]) -> T {
        assert_eq!(values.len(), self.nodes, "value count must match node count");
        self.weights().iter().zip(values).map(|(w, v)| *w * *v).sum()
    }
}
