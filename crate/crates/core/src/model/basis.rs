use crate::error::{Error, Result};

/// Row-major map between occupation vectors and linear indices of the
/// truncated Fock basis. Variable 0 is the most significant digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockBasis {
    n: usize,
    d: usize,
    dim: usize,
}

impl FockBasis {
    pub fn new(n: usize, d: usize, cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "at least one variable is required"));
        }
        if d < 2 {
            return Err(Error::invalid("d", "truncation must keep at least two levels"));
        }
        let requested = (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if requested > cap as u128 {
            return Err(Error::Capacity { requested, cap });
        }
        Ok(FockBasis {
            n,
            d,
            dim: requested as usize,
        })
    }

    pub fn variables(&self) -> usize {
        self.n
    }

    pub fn levels(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn occupations(&self, index: usize) -> Vec<usize> {
        debug_assert!(index < self.dim);
        let mut m = vec![0; self.n];
        let mut rest = index;
        for slot in m.iter_mut().rev() {
            *slot = rest % self.d;
            rest /= self.d;
        }
        m
    }

    pub fn index(&self, occupations: &[usize]) -> Result<usize> {
        if occupations.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: occupations.len(),
            });
        }
        occupations.iter().try_fold(0usize, |acc, &m| {
            if m >= self.d {
                Err(Error::invalid(
                    "occupation",
                    format!("level {m} outside truncation 0..{}", self.d),
                ))
            } else {
                Ok(acc * self.d + m)
            }
        })
    }

    /// Occupation of a single variable, without materializing the vector.
    pub fn level(&self, index: usize, variable: usize) -> usize {
        let stride = self.d.pow((self.n - 1 - variable) as u32);
        (index / stride) % self.d
    }

    /// Index reached by shifting `variable` by `delta` levels, if it stays
    /// inside the truncation.
    pub fn shifted(&self, index: usize, variable: usize, delta: isize) -> Option<usize> {
        let level = self.level(index, variable) as isize + delta;
        if level < 0 || level >= self.d as isize {
            return None;
        }
        let stride = self.d.pow((self.n - 1 - variable) as u32) as isize;
        Some((index as isize + delta * stride) as usize)
    }

    pub fn is_computational(&self, index: usize) -> bool {
        (0..self.n).all(|j| self.level(index, j) <= 1)
    }

    /// Full-basis indices of the 2^n qubit states, ordered as binary numbers
    /// with variable 0 most significant.
    pub fn computational_indices(&self) -> Vec<usize> {
        (0..1usize << self.n)
            .map(|q| {
                (0..self.n).fold(0usize, |acc, j| {
                    acc * self.d + ((q >> (self.n - 1 - j)) & 1)
                })
            })
            .collect()
    }
}
