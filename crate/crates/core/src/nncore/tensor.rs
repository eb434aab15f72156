//! Dense tensors over a scalar type. 64-bit is used where finite-difference
//! gradient checks need headroom, 32-bit for training.

use num_traits::Float;
use std::fmt::{Debug, Display};

/// Scalar element of tensors: f32 in training, f64 in test mode.
pub trait Real:
    Float + Debug + Display + Default + Send + Sync + Copy + 'static + std::iter::Sum
{
    fn from_f64(v: f64) -> Self;
    fn into_f64(self) -> f64;
}

impl Real for f32 {
    fn from_f64(v: f64) -> Self {
        v as f32
    }
    fn into_f64(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn into_f64(self) -> f64 {
        self
    }
}

/// Contiguous row-major tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<R: Real> {
    shape: Vec<usize>,
    data: Vec<R>,
}

impl<R: Real> Tensor<R> {
    pub fn zeros(shape: &[usize]) -> Self {
        let len = shape.iter().product();
        Tensor {
            shape: shape.to_vec(),
            data: vec![R::zero(); len],
        }
    }

    pub fn filled(shape: &[usize], value: R) -> Self {
        let len = shape.iter().product();
        Tensor {
            shape: shape.to_vec(),
            data: vec![value; len],
        }
    }

    pub fn from_vec(shape: &[usize], data: Vec<R>) -> Self {
        assert_eq!(
            shape.iter().product::<usize>(),
            data.len(),
            "shape {:?} does not match data length {}",
            shape,
            data.len()
        );
        Tensor {
            shape: shape.to_vec(),
            data,
        }
    }

    pub fn scalar(value: R) -> Self {
        Tensor {
            shape: vec![1],
            data: vec![value],
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[R] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [R] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<R> {
        self.data
    }

    /// Reinterpret with a new shape of the same element count.
    pub fn reshaped(&self, shape: &[usize]) -> Tensor<R> {
        assert_eq!(shape.iter().product::<usize>(), self.data.len());
        Tensor {
            shape: shape.to_vec(),
            data: self.data.clone(),
        }
    }

    /// Rows of a 2-D tensor.
    pub fn rows(&self) -> usize {
        assert_eq!(self.shape.len(), 2);
        self.shape[0]
    }

    /// Columns of a 2-D tensor.
    pub fn cols(&self) -> usize {
        assert_eq!(self.shape.len(), 2);
        self.shape[1]
    }

    pub fn add_assign(&mut self, other: &Tensor<R>) {
        assert_eq!(self.shape, other.shape);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + *b;
        }
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.data.iter().map(|v| v.into_f64()).collect()
    }

    pub fn from_f64_slice(shape: &[usize], data: &[f64]) -> Tensor<R> {
        Tensor::from_vec(shape, data.iter().map(|&v| R::from_f64(v)).collect())
    }
}
