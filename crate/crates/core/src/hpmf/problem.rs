use super::HpmfError;
use crate::scalar::Scalar;
use crate::tensor::{DenseTensor, Shape, TensorError};

/// Boolean observation set over a tensor shape; `true` marks an observed entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationMask {
    shape: Shape,
    observed: Vec<bool>,
}

impl ObservationMask {
    pub fn new(shape: Shape, observed: Vec<bool>) -> Result<Self, TensorError> {
        if observed.len() != shape.element_count() {
            return Err(TensorError::DataLength {
                expected: shape.element_count(),
                actual: observed.len(),
            });
        }
        Ok(Self { shape, observed })
    }

    pub fn full(shape: Shape) -> Self {
        let n = shape.element_count();
        Self {
            shape,
            observed: vec![true; n],
        }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// Flags in tensor storage order.
    pub fn as_slice(&self) -> &[bool] {
        &self.observed
    }

    pub fn is_observed(&self, index: &[usize]) -> bool {
        self.observed[self.shape.offset(index)]
    }

    pub fn observed_count(&self) -> usize {
        self.observed.iter().filter(|&&b| b).count()
    }

    /// Fraction of observed entries.
    pub fn sampling_ratio(&self) -> f64 {
        self.observed_count() as f64 / self.observed.len() as f64
    }
}

/// A ground-truth tensor together with the set of entries the solver may see.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationProblem<T> {
    original: DenseTensor<T>,
    mask: ObservationMask,
}

impl<T: Scalar> ObservationProblem<T> {
    pub fn new(original: DenseTensor<T>, mask: ObservationMask) -> Result<Self, HpmfError> {
        if original.shape() != mask.shape() {
            return Err(HpmfError::Tensor(TensorError::ShapeMismatch(format!(
                "tensor {:?} vs mask {:?}",
                original.shape().dims(),
                mask.shape().dims()
            ))));
        }
        if mask.observed_count() == 0 {
            return Err(HpmfError::EmptyObservation);
        }
        Ok(Self { original, mask })
    }

    pub fn fully_observed(original: DenseTensor<T>) -> Self {
        let mask = ObservationMask::full(original.shape().clone());
        Self { original, mask }
    }

    pub fn original(&self) -> &DenseTensor<T> {
        &self.original
    }

    pub fn mask(&self) -> &ObservationMask {
        &self.mask
    }

    pub fn shape(&self) -> &Shape {
        self.original.shape()
    }

    /// `P_Omega(T)`: the original on observed entries, zero elsewhere.
    pub fn zero_filled(&self) -> DenseTensor<T> {
        let data = self
            .original
            .as_slice()
            .iter()
            .zip(self.mask.as_slice())
            .map(|(&v, &seen)| if seen { v } else { T::zero() })
            .collect();
        DenseTensor::from_vec(self.shape().clone(), data).expect("same shape")
    }

    /// True when `x` equals the original bit-for-bit on every observed entry.
    pub fn agrees_on_observed(&self, x: &DenseTensor<T>) -> bool {
        x.shape() == self.shape()
            && x
                .as_slice()
                .iter()
                .zip(self.original.as_slice())
                .zip(self.mask.as_slice())
                .all(|((&a, &b), &seen)| !seen || a.as_f64().to_bits() == b.as_f64().to_bits())
    }
}
