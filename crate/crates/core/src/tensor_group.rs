//! Truncated tensor algebra `T²(ℝ^m)` and the step-2 free nilpotent group `G²(ℝ^m)`.
//!
//! A group element is stored in exponential coordinates: the increment `x` and the
//! antisymmetric Lévy area `A`, so that the tensor it stands for is
//! `1 + x + ½ x⊗x + A`. Products use the Chen rule
//!
//! ```text
//! (x, A) · (y, B) = (x + y, A + B + ½ x∧y),   (x∧y)_ij = x_i y_j − x_j y_i
//! ```
//!
//! The homogeneous norm is `max(|x|₂, √(2‖A‖_F))`. It is symmetric, homogeneous
//! under the dilation `(x, A) ↦ (λx, λ²A)` and sub-additive, hence
//! `d(g, h) = ‖g⁻¹h‖` is a left-invariant metric.

use crate::error::{check_dim, Error, Result};
use crate::scalar::{norm2, Scalar};

/// Element of `T²(ℝ^m)` with an implicit level-0 component.
///
/// Level-0 is taken to be 0 for Lie-algebra inputs of [`exp2`] and 1 for group-like
/// tensors (the inputs of [`log2`] and [`Level2Tensor::mul`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Level2Tensor<T> {
    dim: usize,
    level1: Vec<T>,
    level2: Vec<T>,
}

impl<T: Scalar> Level2Tensor<T> {
    /// `level2` is row-major `m×m`.
    pub fn new(level1: Vec<T>, level2: Vec<T>) -> Result<Self> {
        let dim = level1.len();
        if dim == 0 {
            return Err(Error::invalid("tensor dimension must be at least 1"));
        }
        check_dim(dim * dim, level2.len())?;
        if level1.iter().chain(level2.iter()).any(|v| !v.is_finite()) {
            return Err(Error::invalid("tensor entries must be finite"));
        }
        Ok(Level2Tensor {
            dim,
            level1,
            level2,
        })
    }

    pub fn zero(dim: usize) -> Self {
        Level2Tensor {
            dim,
            level1: vec![T::zero(); dim],
            level2: vec![T::zero(); dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level1(&self) -> &[T] {
        &self.level1
    }

    pub fn level2(&self) -> &[T] {
        &self.level2
    }

    pub fn level2_at(&self, i: usize, j: usize) -> T {
        self.level2[i * self.dim + j]
    }

    /// Truncated tensor product of two group-like tensors (level-0 = 1).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let m = self.dim;
        let level1 = self
            .level1
            .iter()
            .zip(&other.level1)
            .map(|(&a, &b)| a + b)
            .collect();
        let mut level2 = vec![T::zero(); m * m];
        for i in 0..m {
            for j in 0..m {
                let k = i * m + j;
                level2[k] = self.level2[k] + other.level2[k] + self.level1[i] * other.level1[j];
            }
        }
        Ok(Level2Tensor {
            dim: m,
            level1,
            level2,
        })
    }
}

/// `exp₂(a) = 1 + a + a⊗a/2` truncated at level 2, for `a` with zero level-0 part.
pub fn exp2<T: Scalar>(a: &Level2Tensor<T>) -> Result<Level2Tensor<T>> {
    let m = a.dim;
    check_dim(m, a.level1.len())?;
    check_dim(m * m, a.level2.len())?;
    let half = T::half();
    let mut level2 = a.level2.clone();
    for i in 0..m {
        for j in 0..m {
            level2[i * m + j] += half * a.level1[i] * a.level1[j];
        }
    }
    Ok(Level2Tensor {
        dim: m,
        level1: a.level1.clone(),
        level2,
    })
}

/// Inverse of [`exp2`] on group-like tensors: returns `(x, level2 − ½ x⊗x)`.
pub fn log2<T: Scalar>(g: &Level2Tensor<T>) -> Result<Level2Tensor<T>> {
    let m = g.dim;
    check_dim(m, g.level1.len())?;
    check_dim(m * m, g.level2.len())?;
    let half = T::half();
    let mut level2 = g.level2.clone();
    for i in 0..m {
        for j in 0..m {
            level2[i * m + j] -= half * g.level1[i] * g.level1[j];
        }
    }
    Ok(Level2Tensor {
        dim: m,
        level1: g.level1.clone(),
        level2,
    })
}

/// Element of `G²(ℝ^m)` in exponential coordinates (increment, antisymmetric area).
#[derive(Debug, Clone, PartialEq)]
pub struct Level2Group<T> {
    dim: usize,
    increment: Vec<T>,
    area: Vec<T>,
}

/// Absolute antisymmetry defect accepted by [`Level2Group::new`], scaled by the
/// largest area entry.
const ANTISYMMETRY_TOL: f64 = 1e-12;

impl<T: Scalar> Level2Group<T> {
    /// Builds an element from an increment and a row-major `m×m` area block.
    ///
    /// The area must be antisymmetric up to rounding; it is re-skew-symmetrised.
    pub fn new(increment: Vec<T>, area: Vec<T>) -> Result<Self> {
        let dim = increment.len();
        if dim == 0 {
            return Err(Error::invalid("group dimension must be at least 1"));
        }
        check_dim(dim * dim, area.len())?;
        if increment.iter().chain(area.iter()).any(|v| !v.is_finite()) {
            return Err(Error::invalid("group entries must be finite"));
        }
        let scale = area.iter().fold(T::one(), |acc, v| acc.max(v.abs()));
        let tol = T::lit(ANTISYMMETRY_TOL) * scale;
        for i in 0..dim {
            for j in i..dim {
                if (area[i * dim + j] + area[j * dim + i]).abs() > tol {
                    return Err(Error::invalid(format!(
                        "area is not antisymmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let mut g = Level2Group {
            dim,
            increment,
            area,
        };
        g.skew_symmetrize();
        Ok(g)
    }

    pub fn identity(dim: usize) -> Self {
        Level2Group {
            dim,
            increment: vec![T::zero(); dim],
            area: vec![T::zero(); dim * dim],
        }
    }

    /// Lift of a straight line with increment `x` (zero area).
    pub fn from_increment(increment: Vec<T>) -> Self {
        let dim = increment.len();
        Level2Group {
            dim,
            increment,
            area: vec![T::zero(); dim * dim],
        }
    }

    /// Reads a group-like tensor through [`log2`]; fails if the recovered area is
    /// not antisymmetric.
    pub fn from_tensor(t: &Level2Tensor<T>) -> Result<Self> {
        let a = log2(t)?;
        Level2Group::new(a.level1, a.level2)
    }

    /// `exp₂(x + A)`.
    pub fn to_tensor(&self) -> Level2Tensor<T> {
        let lie = Level2Tensor {
            dim: self.dim,
            level1: self.increment.clone(),
            level2: self.area.clone(),
        };
        exp2(&lie).expect("shapes are consistent by construction")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn increment(&self) -> &[T] {
        &self.increment
    }

    /// Row-major `m×m` antisymmetric area.
    pub fn area(&self) -> &[T] {
        &self.area
    }

    pub fn area_at(&self, i: usize, j: usize) -> T {
        self.area[i * self.dim + j]
    }

    pub fn is_identity(&self) -> bool {
        self.increment
            .iter()
            .chain(self.area.iter())
            .all(|v| v.is_zero())
    }

    fn skew_symmetrize(&mut self) {
        let m = self.dim;
        let half = T::half();
        for i in 0..m {
            self.area[i * m + i] = T::zero();
            for j in (i + 1)..m {
                let v = half * (self.area[i * m + j] - self.area[j * m + i]);
                self.area[i * m + j] = v;
                self.area[j * m + i] = -v;
            }
        }
    }

    /// Chen product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let m = self.dim;
        let half = T::half();
        let increment = self
            .increment
            .iter()
            .zip(&other.increment)
            .map(|(&a, &b)| a + b)
            .collect();
        let mut area = vec![T::zero(); m * m];
        for i in 0..m {
            for j in 0..m {
                let k = i * m + j;
                let wedge =
                    self.increment[i] * other.increment[j] - self.increment[j] * other.increment[i];
                area[k] = self.area[k] + other.area[k] + half * wedge;
            }
        }
        let mut g = Level2Group {
            dim: m,
            increment,
            area,
        };
        g.skew_symmetrize();
        g
    }

    pub fn inv(&self) -> Self {
        Level2Group {
            dim: self.dim,
            increment: self.increment.iter().map(|&v| -v).collect(),
            area: self.area.iter().map(|&v| -v).collect(),
        }
    }

    /// `self⁻¹ · other`, the increment from `self` to `other`.
    pub fn increment_to(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        Ok(self.inv().mul_unchecked(other))
    }

    /// Dilation `(x, A) ↦ (λx, λ²A)`.
    pub fn dilate(&self, lambda: T) -> Self {
        let l2 = lambda * lambda;
        Level2Group {
            dim: self.dim,
            increment: self.increment.iter().map(|&v| lambda * v).collect(),
            area: self.area.iter().map(|&v| l2 * v).collect(),
        }
    }

    /// Homogeneous norm `max(|x|₂, √(2‖A‖_F))`.
    pub fn norm(&self) -> T {
        let frob = norm2(&self.area);
        norm2(&self.increment).max((T::lit(2.0) * frob).sqrt())
    }

    /// `‖self⁻¹ · other‖`, computed without allocating.
    pub fn dist(&self, other: &Self) -> Result<T> {
        check_dim(self.dim, other.dim)?;
        Ok(self.dist_unchecked(other))
    }

    pub(crate) fn dist_unchecked(&self, other: &Self) -> T {
        let m = self.dim;
        let half = T::half();
        let mut inc2 = T::zero();
        for i in 0..m {
            let d = other.increment[i] - self.increment[i];
            inc2 += d * d;
        }
        // (-x)·y cross term: area = B - A - ½ x∧y
        let mut frob2 = T::zero();
        for i in 0..m {
            for j in (i + 1)..m {
                let k = i * m + j;
                let wedge =
                    self.increment[i] * other.increment[j] - self.increment[j] * other.increment[i];
                let a = other.area[k] - self.area[k] - half * wedge;
                frob2 += a * a;
            }
        }
        let frob = (T::lit(2.0) * frob2).sqrt();
        inc2.sqrt().max((T::lit(2.0) * frob).sqrt())
    }

    /// Largest absolute entry difference in increment and area.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.increment
            .iter()
            .zip(&other.increment)
            .chain(self.area.iter().zip(&other.area))
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }
}

/// Chen product.
pub fn group_mul<T: Scalar>(g: &Level2Group<T>, h: &Level2Group<T>) -> Result<Level2Group<T>> {
    g.mul(h)
}

pub fn group_inv<T: Scalar>(g: &Level2Group<T>) -> Level2Group<T> {
    g.inv()
}

pub fn homog_norm<T: Scalar>(g: &Level2Group<T>) -> T {
    g.norm()
}

/// `d(g, h) = ‖g⁻¹ h‖`.
pub fn dist<T: Scalar>(g: &Level2Group<T>, h: &Level2Group<T>) -> Result<T> {
    g.dist(h)
}
