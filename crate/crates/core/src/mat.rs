//! Minimal dense matrices, plus exact linear algebra over truncated Witt
//! rings: products, cofactor determinants, adjugates and unit inversion.
//! Heights at desk scale are tiny, so cofactor expansion is fine.

use crate::error::{Error, Result};
use crate::ring::Ring;
use crate::witt::WittVector;
use alloc::vec::Vec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Mat<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Mat<T> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Mat<T>> {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        for row in &rows {
            if row.len() != c {
                return Err(Error::ShapeMismatch("ragged rows".into()));
            }
        }
        Ok(Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn map<U: Clone>(&self, f: impl FnMut(&T) -> U) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<U: Clone>(&self, mut f: impl FnMut(&T) -> Result<U>) -> Result<Mat<U>> {
        let mut data = Vec::with_capacity(self.data.len());
        for t in &self.data {
            data.push(f(t)?);
        }
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn block(&self, i0: usize, j0: usize, r: usize, c: usize) -> Mat<T> {
        Mat::from_fn(r, c, |i, j| self.at(i0 + i, j0 + j).clone())
    }

    /// Assembles `[[a, b], [c, d]]`; empty blocks are allowed.
    pub fn from_blocks(a: &Mat<T>, b: &Mat<T>, c: &Mat<T>, d: &Mat<T>) -> Result<Mat<T>> {
        if a.rows != b.rows || c.rows != d.rows || a.cols != c.cols || b.cols != d.cols {
            return Err(Error::ShapeMismatch("block sizes do not align".into()));
        }
        let rows = a.rows + c.rows;
        let cols = a.cols + b.cols;
        Ok(Mat::from_fn(rows, cols, |i, j| {
            if i < a.rows {
                if j < a.cols {
                    a.at(i, j).clone()
                } else {
                    b.at(i, j - a.cols).clone()
                }
            } else if j < a.cols {
                c.at(i - a.rows, j).clone()
            } else {
                d.at(i - a.rows, j - a.cols).clone()
            }
        }))
    }
}

/// Matrices of truncated Witt vectors over a fixed ring and length.
pub type WMat = Mat<WittVector>;

pub fn w_zero(ring: &Ring, len: usize, rows: usize, cols: usize) -> WMat {
    Mat::from_fn(rows, cols, |_, _| WittVector::zero(ring, len))
}

pub fn w_identity(ring: &Ring, len: usize, n: usize) -> WMat {
    Mat::from_fn(n, n, |i, j| {
        if i == j {
            WittVector::one(ring, len)
        } else {
            WittVector::zero(ring, len)
        }
    })
}

pub fn w_scalar(ring: &Ring, len: usize, n: usize, k: i64) -> Result<WMat> {
    let v = WittVector::from_int(ring, k, len)?;
    Ok(Mat::from_fn(n, n, |i, j| {
        if i == j {
            v.clone()
        } else {
            WittVector::zero(ring, len)
        }
    }))
}

pub fn w_add(a: &WMat, b: &WMat) -> Result<WMat> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(Error::ShapeMismatch("matrix addition".into()));
    }
    Mat::from_fn(a.rows, a.cols, |i, j| (i, j)).try_map(|&(i, j)| a.at(i, j).add_trunc(b.at(i, j)))
}

pub fn w_sub(a: &WMat, b: &WMat) -> Result<WMat> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(Error::ShapeMismatch("matrix subtraction".into()));
    }
    Mat::from_fn(a.rows, a.cols, |i, j| (i, j)).try_map(|&(i, j)| a.at(i, j).sub_trunc(b.at(i, j)))
}

pub fn w_neg(a: &WMat) -> Result<WMat> {
    a.try_map(|x| x.neg())
}

/// Product; `ring` and `len` supply the zero when the inner dimension is
/// empty.
pub fn w_mul(a: &WMat, b: &WMat, ring: &Ring, len: usize) -> Result<WMat> {
    if a.cols != b.rows {
        return Err(Error::ShapeMismatch("matrix product".into()));
    }
    Mat::from_fn(a.rows, b.cols, |i, j| (i, j)).try_map(|&(i, j)| {
        let mut acc = WittVector::zero(ring, len);
        for k in 0..a.cols {
            acc = acc.add_trunc(&a.at(i, k).mul_trunc(b.at(k, j))?)?;
        }
        Ok(acc)
    })
}

pub fn w_mul_scalar(a: &WMat, s: &WittVector) -> Result<WMat> {
    a.try_map(|x| x.mul_trunc(s))
}

pub fn w_mul_p(a: &WMat) -> Result<WMat> {
    a.try_map(|x| x.mul_p())
}

/// Cofactor determinant. Empty matrices have determinant one.
pub fn w_det(a: &WMat, ring: &Ring, len: usize) -> Result<WittVector> {
    if a.rows != a.cols {
        return Err(Error::ShapeMismatch(
            "determinant of a non-square matrix".into(),
        ));
    }
    let n = a.rows;
    if n == 0 {
        return Ok(WittVector::one(ring, len));
    }
    if n == 1 {
        return Ok(a.at(0, 0).clone());
    }
    let mut acc: Option<WittVector> = None;
    for j in 0..n {
        let minor = w_minor(a, 0, j);
        let term = a.at(0, j).mul_trunc(&w_det(&minor, ring, len)?)?;
        let signed = if j % 2 == 0 { term } else { term.neg()? };
        acc = Some(match acc {
            None => signed,
            Some(s) => s.add_trunc(&signed)?,
        });
    }
    Ok(acc.unwrap())
}

fn w_minor(a: &WMat, skip_i: usize, skip_j: usize) -> WMat {
    Mat::from_fn(a.rows - 1, a.cols - 1, |i, j| {
        let ii = if i < skip_i { i } else { i + 1 };
        let jj = if j < skip_j { j } else { j + 1 };
        a.at(ii, jj).clone()
    })
}

/// Classical adjugate: `a · adj(a) = det(a) · 1`.
pub fn w_adjugate(a: &WMat, ring: &Ring, len: usize) -> Result<WMat> {
    if a.rows != a.cols {
        return Err(Error::ShapeMismatch(
            "adjugate of a non-square matrix".into(),
        ));
    }
    let n = a.rows;
    if n == 0 {
        return Ok(a.clone());
    }
    if n == 1 {
        return Ok(Mat::from_fn(1, 1, |_, _| WittVector::one(ring, len)));
    }
    Mat::from_fn(n, n, |i, j| (i, j)).try_map(|&(i, j)| {
        // adj[i][j] = (-1)^(i+j) · minor(j, i)
        let m = w_det(&w_minor(a, j, i), ring, len)?;
        if (i + j) % 2 == 0 {
            Ok(m)
        } else {
            m.neg()
        }
    })
}

/// Inverse of a matrix whose determinant is a unit.
pub fn w_invert(a: &WMat, ring: &Ring, len: usize) -> Result<WMat> {
    let det = w_det(a, ring, len)?;
    if !det.is_unit()? {
        return Err(Error::NotInvertible);
    }
    let det_inv = det.invert()?;
    w_mul_scalar(&w_adjugate(a, ring, len)?, &det_inv)
}

pub fn w_eq(a: &WMat, b: &WMat) -> bool {
    a == b
}

/// Equality after truncating every entry to the common shortest length.
pub fn w_eq_trunc(a: &WMat, b: &WMat) -> Result<bool> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(Error::ShapeMismatch("comparison".into()));
    }
    let mut min_len = usize::MAX;
    for x in a.entries().chain(b.entries()) {
        min_len = min_len.min(x.len());
    }
    if min_len == usize::MAX {
        return Ok(true); // no entries at all
    }
    if min_len == 0 {
        return Err(Error::PrecisionExhausted);
    }
    for i in 0..a.rows {
        for j in 0..a.cols {
            if a.at(i, j).truncate(min_len)? != b.at(i, j).truncate(min_len)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn w_truncate(a: &WMat, m: usize) -> Result<WMat> {
    a.try_map(|x| x.truncate(m.min(x.len())))
}

pub fn w_frobenius_endo(a: &WMat) -> Result<WMat> {
    a.try_map(|x| x.frobenius_endo())
}

pub fn w_is_zero(a: &WMat) -> bool {
    a.entries().all(|x| x.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{random_witt, SplitMix64};

    #[test]
    fn adjugate_identity_2x2() {
        // adj([[a,b],[c,d]]) = [[d,-b],[-c,a]]
        let r = Ring::finite_field(2, 2).unwrap();
        let mut rng = SplitMix64::new(1);
        let m = Mat::from_fn(2, 2, |_, _| random_witt(&mut rng, &r, 3));
        let adj = w_adjugate(&m, &r, 3).unwrap();
        assert_eq!(adj.at(0, 0), m.at(1, 1));
        assert_eq!(adj.at(1, 1), m.at(0, 0));
        assert_eq!(adj.at(0, 1), &m.at(0, 1).neg().unwrap());
        assert_eq!(adj.at(1, 0), &m.at(1, 0).neg().unwrap());
    }

    #[test]
    fn m_times_adjugate_is_det() {
        let r = Ring::finite_field(2, 2).unwrap();
        let mut rng = SplitMix64::new(2);
        for n in [1usize, 2, 3] {
            for _ in 0..20 {
                let m = Mat::from_fn(n, n, |_, _| random_witt(&mut rng, &r, 3));
                let adj = w_adjugate(&m, &r, 3).unwrap();
                let prod = w_mul(&m, &adj, &r, 3).unwrap();
                let det = w_det(&m, &r, 3).unwrap();
                let expect = w_mul_scalar(&w_identity(&r, 3, n), &det).unwrap();
                assert_eq!(prod, expect);
            }
        }
    }

    #[test]
    fn inversion_round_trip() {
        let r = Ring::finite_field(2, 2).unwrap();
        let g = r.var("g").unwrap();
        let u = Mat::from_rows(alloc::vec![
            alloc::vec![WittVector::zero(&r, 3), WittVector::one(&r, 3)],
            alloc::vec![WittVector::one(&r, 3), WittVector::teichmuller(&g, 3)],
        ])
        .unwrap();
        let inv = w_invert(&u, &r, 3).unwrap();
        assert_eq!(w_mul(&u, &inv, &r, 3).unwrap(), w_identity(&r, 3, 2));
        // p·identity is not invertible
        let p_id = w_scalar(&r, 3, 2, 2).unwrap();
        assert!(matches!(w_invert(&p_id, &r, 3), Err(Error::NotInvertible)));
    }

    #[test]
    fn empty_blocks_compose() {
        let r = Ring::prime_field(2).unwrap();
        let a = w_identity(&r, 2, 2);
        let b = w_zero(&r, 2, 2, 0);
        let c = w_zero(&r, 2, 0, 2);
        let d = w_zero(&r, 2, 0, 0);
        let m = Mat::from_blocks(&a, &b, &c, &d).unwrap();
        assert_eq!(m.rows(), 2);
        assert_eq!(m.cols(), 2);
        assert_eq!(w_det(&d, &r, 2).unwrap(), WittVector::one(&r, 2));
    }
}
