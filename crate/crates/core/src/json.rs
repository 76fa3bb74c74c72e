//! JSON interchange schemas for operators and unitaries.
//!
//! Matrices are stored as row-major 2D arrays of real and imaginary
//! parts in double precision, regardless of the in-memory scalar type.

use crate::error::{Error, Result};
use crate::family::HermitianUnitary;
use crate::operator::MultipartiteOperator;
use crate::scalar::Scalar;
use ndarray::Array2;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

/// Operator dump: `{"dims": [...], "re": [[...]], "im": [[...]]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OperatorDump {
    pub dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

fn split_matrix<T: Scalar>(m: &Array2<Complex<T>>) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let side = m.nrows();
    let mut re = Vec::with_capacity(side);
    let mut im = Vec::with_capacity(side);
    for r in 0..side {
        let mut re_row = Vec::with_capacity(side);
        let mut im_row = Vec::with_capacity(side);
        for c in 0..side {
            re_row.push(m[[r, c]].re.to_f64().unwrap_or(f64::NAN));
            im_row.push(m[[r, c]].im.to_f64().unwrap_or(f64::NAN));
        }
        re.push(re_row);
        im.push(im_row);
    }
    (re, im)
}

fn join_matrix<T: Scalar>(
    side: usize,
    re: &[Vec<f64>],
    im: &[Vec<f64>],
) -> Result<Array2<Complex<T>>> {
    let shape_ok = re.len() == side
        && im.len() == side
        && re.iter().all(|row| row.len() == side)
        && im.iter().all(|row| row.len() == side);
    if !shape_ok {
        return Err(Error::InvalidParameter(format!(
            "re/im arrays do not form a {side}x{side} matrix"
        )));
    }
    Ok(Array2::from_shape_fn((side, side), |(r, c)| {
        Complex::new(
            T::from_f64(re[r][c]).unwrap_or_else(T::zero),
            T::from_f64(im[r][c]).unwrap_or_else(T::zero),
        )
    }))
}

impl OperatorDump {
    pub fn from_operator<T: Scalar>(op: &MultipartiteOperator<T>) -> Self {
        let (re, im) = split_matrix(op.entries());
        OperatorDump {
            dims: op.dims().to_vec(),
            re,
            im,
        }
    }

    pub fn to_operator<T: Scalar>(&self) -> Result<MultipartiteOperator<T>> {
        let side: usize = self.dims.iter().product();
        let entries = join_matrix(side, &self.re, &self.im)?;
        MultipartiteOperator::new(self.dims.clone(), entries)
    }
}

/// Unitary input file: `{"d": D, "re": [[...]], "im": [[...]]}`;
/// validated Hermitian-unitary on load.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UnitaryDump {
    pub d: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl UnitaryDump {
    pub fn from_unitary<T: Scalar>(u: &HermitianUnitary<T>) -> Self {
        let (re, im) = split_matrix(u.matrix());
        UnitaryDump { d: u.dim(), re, im }
    }

    pub fn to_unitary<T: Scalar>(&self, tol: T) -> Result<HermitianUnitary<T>> {
        let matrix = join_matrix(self.d, &self.re, &self.im)?;
        HermitianUnitary::from_matrix(matrix, tol)
    }
}
