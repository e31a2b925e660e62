use crate::error::{Error, Result};

/// A set of fixed-dimension real vectors stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    rows: usize,
    dim: usize,
    data: Vec<f64>,
}

impl Batch {
    pub fn new(rows: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("batch dimension must be positive".into()));
        }
        if data.len() != rows * dim {
            return Err(Error::Shape(format!(
                "batch data length {} does not match {rows} x {dim}",
                data.len()
            )));
        }
        Ok(Self { rows, dim, data })
    }

    pub fn zeros(rows: usize, dim: usize) -> Self {
        Self {
            rows,
            dim,
            data: vec![0.0; rows * dim],
        }
    }

    /// Builds a batch from equal-length rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Shape("rows have differing lengths".into()));
        }
        Self::new(rows.len(), dim, rows.concat())
    }

    /// A batch of scalars (dimension 1).
    pub fn column(values: Vec<f64>) -> Self {
        Self {
            rows: values.len(),
            dim: 1,
            data: values,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Column `j` as a vector.
    pub fn column_values(&self, j: usize) -> Vec<f64> {
        self.iter_rows().map(|r| r[j]).collect()
    }
}
