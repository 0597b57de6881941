//! Windows over a frame with free normal decomposition: a display is an
//! invertible structure matrix U over S together with a dimension split
//! h = d + c; a morphism is a block matrix (A, B, C, D) with the B block
//! in the filtration module, subject to the twisted structure equation
//! `M · U = U' · Phi(M)` where `Phi(M) = [[sigma(A), sigma_div(B)],
//! [p·sigma(C), sigma(D)]]`.

use crate::error::{Error, Result};
use crate::frame::{FilElt, Frame, FrameKind, Scalar};
use crate::mat::{self, Mat, WMat};
use crate::ring::{RingElement, RingMap};
use crate::witt::WittVector;
use alloc::string::ToString;
use alloc::vec::Vec;

#[derive(Clone, Debug)]
pub struct Display {
    frame: Frame,
    d: usize,
    u: WMat,
}

/// Shape of a display as seen by morphisms: (dimension, codimension).
pub type Shape = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    src: Shape,
    dst: Shape,
    pub a: Mat<Scalar>,
    pub b: Mat<FilElt>,
    pub c: Mat<Scalar>,
    pub d: Mat<Scalar>,
}

impl Display {
    /// Validates squareness and invertibility (a unit determinant,
    /// checked through the residue field since the kernel of the
    /// projection to R sits in the radical).
    pub fn new(frame: Frame, u: WMat, d: usize) -> Result<Display> {
        if u.rows() != u.cols() {
            return Err(Error::ShapeMismatch(
                "structure matrix must be square".into(),
            ));
        }
        if d > u.rows() {
            return Err(Error::ShapeMismatch("dimension exceeds height".into()));
        }
        for e in u.entries() {
            if e.ring() != frame.ring() {
                return Err(Error::RingMismatch);
            }
            if e.is_empty() {
                return Err(Error::PrecisionExhausted);
            }
        }
        let len = frame.s_len();
        let det = mat::w_det(&u, frame.ring(), len)?;
        if !det.is_unit()? {
            return Err(Error::NotInvertible);
        }
        Ok(Display { frame, d, u })
    }

    pub fn from_int_entries(frame: &Frame, entries: &[&[i64]], d: usize) -> Result<Display> {
        let len = frame.s_len();
        let rows = entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&k| WittVector::from_int(frame.ring(), k, len))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Display::new(frame.clone(), Mat::from_rows(rows)?, d)
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn matrix(&self) -> &WMat {
        &self.u
    }

    pub fn height(&self) -> usize {
        self.u.rows()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn codim(&self) -> usize {
        self.height() - self.d
    }

    pub fn shape(&self) -> Shape {
        (self.d, self.codim())
    }

    /// Effective precision: the least entry length (equals the frame's
    /// quotient length except on partially consumed precision frames).
    pub fn precision(&self) -> usize {
        self.u.entries().map(|e| e.len()).min().unwrap_or(0)
    }

    pub fn u_inverse(&self) -> Result<WMat> {
        mat::w_invert(&self.u, self.frame.ring(), self.frame.s_len())
    }

    pub fn det(&self) -> Result<WittVector> {
        mat::w_det(&self.u, self.frame.ring(), self.frame.s_len())
    }

    pub fn truncate(&self, level: usize) -> Result<Display> {
        let target = self.frame.truncate_frame(level)?;
        let u = mat::w_truncate(&self.u, target.s_len())?;
        Display::new(target, u, self.d)
    }

    pub fn base_change(&self, map: &RingMap) -> Result<Display> {
        if map.source() != self.frame.ring() {
            return Err(Error::UnsupportedMap("wrong source ring".to_string()));
        }
        let frame = match self.frame.kind() {
            FrameKind::TruncatedWitt { level } => {
                crate::frame::truncated_witt_frame(map.target(), *level)?
            }
            FrameKind::WittPrecision { precision } => {
                crate::frame::witt_frame(map.target(), *precision)?
            }
            FrameKind::Relative { .. } => {
                return Err(Error::UnsupportedMap(
                    "base change of relative frames is handled by the deformation layer"
                        .to_string(),
                ))
            }
        };
        let u = self.u.try_map(|e| e.map_ring(map))?;
        Display::new(frame, u, self.d)
    }

    /// Least e <= e_max such that the twisted product of the zeroth
    /// coordinates of the lower-right block of `U^{-1}` vanishes over
    /// R/p; `None` if there is none (non-nilpotent).
    pub fn nilpotency_order(&self, e_max: usize) -> Result<Option<usize>> {
        let c = self.codim();
        if c == 0 {
            return Ok(Some(0));
        }
        let uinv = self.u_inverse()?;
        let z_block = uinv.block(self.d, self.d, c, c);
        let (rp, to_rp) = self.frame.ring().mod_p()?;
        let z0: Mat<RingElement> = z_block.try_map(|e| to_rp.apply(e.coord(0)))?;
        let mut prod = z0.clone();
        for e in 1..=e_max {
            if prod.entries().all(|x| x.is_zero()) {
                return Ok(Some(e));
            }
            // prod_{e+1} = z0^(p^e) · prod_e
            let twisted = z0.map(|x| x.frobenius_pow(e as u32));
            prod = re_mat_mul(&twisted, &prod, &rp)?;
        }
        if prod.entries().all(|x| x.is_zero()) {
            return Ok(Some(e_max + 1));
        }
        Ok(None)
    }

    pub fn is_nilpotent(&self, e_max: usize) -> Result<bool> {
        Ok(self.nilpotency_order(e_max)?.is_some())
    }
}

fn re_mat_mul(
    a: &Mat<RingElement>,
    b: &Mat<RingElement>,
    ring: &crate::ring::Ring,
) -> Result<Mat<RingElement>> {
    if a.cols() != b.rows() {
        return Err(Error::ShapeMismatch("product".into()));
    }
    Ok(Mat::from_fn(a.rows(), b.cols(), |i, j| {
        let mut acc = ring.zero();
        for k in 0..a.cols() {
            acc = acc.add(&a.at(i, k).mul(b.at(k, j)));
        }
        acc
    }))
}

// ----- scalar-matrix helpers (entries in the frame's scalar ring) -----

pub fn s_mat_mul(frame: &Frame, a: &Mat<Scalar>, b: &Mat<Scalar>) -> Result<Mat<Scalar>> {
    if a.cols() != b.rows() {
        return Err(Error::ShapeMismatch("product".into()));
    }
    Mat::from_fn(a.rows(), b.cols(), |i, j| (i, j)).try_map(|&(i, j)| {
        let mut acc = frame.s_zero();
        for k in 0..a.cols() {
            acc = frame.s_add(&acc, &frame.s_mul(a.at(i, k), b.at(k, j))?)?;
        }
        Ok(acc)
    })
}

pub fn s_mat_add(frame: &Frame, a: &Mat<Scalar>, b: &Mat<Scalar>) -> Result<Mat<Scalar>> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::ShapeMismatch("sum".into()));
    }
    Mat::from_fn(a.rows(), a.cols(), |i, j| (i, j))
        .try_map(|&(i, j)| frame.s_add(a.at(i, j), b.at(i, j)))
}

pub fn s_mat_zero(frame: &Frame, rows: usize, cols: usize) -> Mat<Scalar> {
    Mat::from_fn(rows, cols, |_, _| frame.s_zero())
}

pub fn s_mat_identity(frame: &Frame, n: usize) -> Mat<Scalar> {
    Mat::from_fn(n, n, |i, j| {
        if i == j {
            frame.s_one()
        } else {
            frame.s_zero()
        }
    })
}

pub fn s_mat_det(frame: &Frame, a: &Mat<Scalar>) -> Result<Scalar> {
    if a.rows() != a.cols() {
        return Err(Error::ShapeMismatch("determinant".into()));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(frame.s_one());
    }
    if n == 1 {
        return Ok(a.at(0, 0).clone());
    }
    let mut acc = frame.s_zero();
    for j in 0..n {
        let minor = Mat::from_fn(n - 1, n - 1, |i, jj| {
            let ii = i + 1;
            let jjj = if jj < j { jj } else { jj + 1 };
            a.at(ii, jjj).clone()
        });
        let term = frame.s_mul(a.at(0, j), &s_mat_det(frame, &minor)?)?;
        let signed = if j % 2 == 0 {
            term
        } else {
            frame.s_neg(&term)?
        };
        acc = frame.s_add(&acc, &signed)?;
    }
    Ok(acc)
}

fn fil_mat_zero(frame: &Frame, rows: usize, cols: usize) -> Mat<FilElt> {
    Mat::from_fn(rows, cols, |_, _| frame.fil_zero())
}

/// `scalars · fils` with the module action.
fn smul_fil_mat(frame: &Frame, scalars: &Mat<Scalar>, fils: &Mat<FilElt>) -> Result<Mat<FilElt>> {
    if scalars.cols() != fils.rows() {
        return Err(Error::ShapeMismatch("product".into()));
    }
    Mat::from_fn(scalars.rows(), fils.cols(), |i, j| (i, j)).try_map(|&(i, j)| {
        let mut acc = frame.fil_zero();
        for k in 0..scalars.cols() {
            acc = frame.fil_add(&acc, &frame.fil_smul(scalars.at(i, k), fils.at(k, j))?)?;
        }
        Ok(acc)
    })
}

/// `fils · scalars` with the module action.
fn fil_mat_smul(frame: &Frame, fils: &Mat<FilElt>, scalars: &Mat<Scalar>) -> Result<Mat<FilElt>> {
    if fils.cols() != scalars.rows() {
        return Err(Error::ShapeMismatch("product".into()));
    }
    Mat::from_fn(fils.rows(), scalars.cols(), |i, j| (i, j)).try_map(|&(i, j)| {
        let mut acc = frame.fil_zero();
        for k in 0..fils.cols() {
            acc = frame.fil_add(&acc, &frame.fil_smul(scalars.at(k, j), fils.at(i, k))?)?;
        }
        Ok(acc)
    })
}

impl Morphism {
    pub fn new(
        src: Shape,
        dst: Shape,
        a: Mat<Scalar>,
        b: Mat<FilElt>,
        c: Mat<Scalar>,
        d: Mat<Scalar>,
    ) -> Result<Morphism> {
        let (sd, sc) = src;
        let (dd, dc) = dst;
        if a.rows() != dd || a.cols() != sd {
            return Err(Error::ShapeMismatch("A block".into()));
        }
        if b.rows() != dd || b.cols() != sc {
            return Err(Error::ShapeMismatch("B block".into()));
        }
        if c.rows() != dc || c.cols() != sd {
            return Err(Error::ShapeMismatch("C block".into()));
        }
        if d.rows() != dc || d.cols() != sc {
            return Err(Error::ShapeMismatch("D block".into()));
        }
        Ok(Morphism {
            src,
            dst,
            a,
            b,
            c,
            d,
        })
    }

    pub fn identity(display: &Display) -> Morphism {
        let frame = display.frame();
        let (d, c) = display.shape();
        Morphism {
            src: (d, c),
            dst: (d, c),
            a: s_mat_identity(frame, d),
            b: fil_mat_zero(frame, d, c),
            c: s_mat_zero(frame, c, d),
            d: s_mat_identity(frame, c),
        }
    }

    /// `k · identity` (all four blocks scaled).
    pub fn scalar(display: &Display, k: i64) -> Result<Morphism> {
        Morphism::identity(display).mul_int(display.frame(), k)
    }

    pub fn src_shape(&self) -> Shape {
        self.src
    }

    pub fn dst_shape(&self) -> Shape {
        self.dst
    }

    pub fn mul_int(&self, frame: &Frame, k: i64) -> Result<Morphism> {
        Ok(Morphism {
            src: self.src,
            dst: self.dst,
            a: self.a.try_map(|x| frame.s_mul_int(x, k))?,
            b: self
                .b
                .try_map(|x| x.map_parts(|v| v.mul_int(k), |l| Ok(l.mul_int(k))))?,
            c: self.c.try_map(|x| frame.s_mul_int(x, k))?,
            d: self.d.try_map(|x| frame.s_mul_int(x, k))?,
        })
    }

    pub fn mul_p(&self, frame: &Frame) -> Result<Morphism> {
        self.mul_int(frame, frame.ring().prime() as i64)
    }

    pub fn mul_p_pow(&self, frame: &Frame, times: usize) -> Result<Morphism> {
        let mut out = self.clone();
        for _ in 0..times {
            out = out.mul_p(frame)?;
        }
        Ok(out)
    }

    pub fn add(&self, frame: &Frame, other: &Morphism) -> Result<Morphism> {
        if self.src != other.src || self.dst != other.dst {
            return Err(Error::ShapeMismatch("morphism sum".into()));
        }
        Ok(Morphism {
            src: self.src,
            dst: self.dst,
            a: s_mat_add(frame, &self.a, &other.a)?,
            b: Mat::from_fn(self.b.rows(), self.b.cols(), |i, j| (i, j))
                .try_map(|&(i, j)| frame.fil_add(self.b.at(i, j), other.b.at(i, j)))?,
            c: s_mat_add(frame, &self.c, &other.c)?,
            d: s_mat_add(frame, &self.d, &other.d)?,
        })
    }

    pub fn sub(&self, frame: &Frame, other: &Morphism) -> Result<Morphism> {
        self.add(frame, &other.mul_int(frame, -1)?)
    }

    pub fn is_zero(&self) -> bool {
        self.a.entries().all(|x| x.is_zero())
            && self.b.entries().all(|x| x.is_zero())
            && self.c.entries().all(|x| x.is_zero())
            && self.d.entries().all(|x| x.is_zero())
    }

    /// The full h' x h matrix over the scalars (B included via iota).
    pub fn full_scalar_matrix(&self, frame: &Frame) -> Result<Mat<Scalar>> {
        let b_scal = self.b.try_map(|x| frame.iota(x))?;
        let top = |i: usize, j: usize| -> Scalar {
            if j < self.src.0 {
                self.a.at(i, j).clone()
            } else {
                b_scal.at(i, j - self.src.0).clone()
            }
        };
        let (sd, sc) = self.src;
        let (dd, dc) = self.dst;
        Ok(Mat::from_fn(dd + dc, sd + sc, |i, j| {
            if i < dd {
                top(i, j)
            } else if j < sd {
                self.c.at(i - dd, j).clone()
            } else {
                self.d.at(i - dd, j - sd).clone()
            }
        }))
    }

    /// The image of the full matrix in S (for products against structure
    /// matrices).
    pub fn full_s_matrix(&self, frame: &Frame) -> Result<WMat> {
        let full = self.full_scalar_matrix(frame)?;
        full.try_map(|x| frame.project(x))
    }

    /// Truncation of every block to the data of a lower-level frame.
    pub fn truncate(&self, frame: &Frame, target: &Frame) -> Result<Morphism> {
        Ok(Morphism {
            src: self.src,
            dst: self.dst,
            a: self.a.try_map(|x| frame.truncate_scalar(x, target))?,
            b: self.b.try_map(|x| frame.truncate_fil(x, target))?,
            c: self.c.try_map(|x| frame.truncate_scalar(x, target))?,
            d: self.d.try_map(|x| frame.truncate_scalar(x, target))?,
        })
    }

    pub fn base_change(&self, frame: &Frame, map: &RingMap, target: &Frame) -> Result<Morphism> {
        let _ = frame;
        Ok(Morphism {
            src: self.src,
            dst: self.dst,
            a: self
                .a
                .try_map(|x| target.scalar(crate::frame::Frame::scalar_rep(x).map_ring(map)?))?,
            b: self.b.try_map(|x| {
                let v = x.v_part().map_ring(map)?;
                // base change along the projection kills the kernel part
                target.fil_from_v(v)
            })?,
            c: self
                .c
                .try_map(|x| target.scalar(crate::frame::Frame::scalar_rep(x).map_ring(map)?))?,
            d: self
                .d
                .try_map(|x| target.scalar(crate::frame::Frame::scalar_rep(x).map_ring(map)?))?,
        })
    }
}

/// `Phi(M) = [[sigma(A), sigma_div(B)], [p·sigma(C), sigma(D)]]` over S.
pub fn phi(frame: &Frame, m: &Morphism) -> Result<WMat> {
    let a = m.a.try_map(|x| frame.sigma(x))?;
    let b = m.b.try_map(|x| frame.sigma_div(x))?;
    let c = m.c.try_map(|x| frame.sigma(x)?.mul_p())?;
    let d = m.d.try_map(|x| frame.sigma(x))?;
    Mat::from_blocks(&a, &b, &c, &d)
}

/// Does `M · U = U' · Phi(M)` hold at the common effective precision?
pub fn is_morphism(m: &Morphism, src: &Display, dst: &Display) -> Result<bool> {
    if m.src != src.shape() || m.dst != dst.shape() {
        return Err(Error::ShapeMismatch(
            "morphism against wrong displays".into(),
        ));
    }
    if src.frame() != dst.frame() {
        return Err(Error::DomainMismatch(
            "displays over different frames".into(),
        ));
    }
    let frame = src.frame();
    let ring = frame.ring();
    let len = frame.s_len();
    let lhs = mat::w_mul(&m.full_s_matrix(frame)?, src.matrix(), ring, len)?;
    let rhs = mat::w_mul(dst.matrix(), &phi(frame, m)?, ring, len)?;
    mat::w_eq_trunc(&lhs, &rhs)
}

/// Block composition; the B block recombines inside the filtration
/// module and the iota images feed the scalar blocks.
pub fn compose(frame: &Frame, m2: &Morphism, m1: &Morphism) -> Result<Morphism> {
    if m1.dst != m2.src {
        return Err(Error::ShapeMismatch("composition shapes".into()));
    }
    let b2_scal = m2.b.try_map(|x| frame.iota(x))?;
    let b1_scal = m1.b.try_map(|x| frame.iota(x))?;
    let a = s_mat_add(
        frame,
        &s_mat_mul(frame, &m2.a, &m1.a)?,
        &s_mat_mul(frame, &b2_scal, &m1.c)?,
    )?;
    let b = {
        let t1 = smul_fil_mat(frame, &m2.a, &m1.b)?;
        let t2 = fil_mat_smul(frame, &m2.b, &m1.d)?;
        Mat::from_fn(t1.rows(), t1.cols(), |i, j| (i, j))
            .try_map(|&(i, j)| frame.fil_add(t1.at(i, j), t2.at(i, j)))?
    };
    let c = s_mat_add(
        frame,
        &s_mat_mul(frame, &m2.c, &m1.a)?,
        &s_mat_mul(frame, &m2.d, &m1.c)?,
    )?;
    let d = s_mat_add(
        frame,
        &s_mat_mul(frame, &m2.d, &m1.d)?,
        &s_mat_mul(frame, &m2.c, &b1_scal)?,
    )?;
    Morphism::new(m1.src, m2.dst, a, b, c, d)
}

/// Determinant of the full matrix, an element of the scalar ring; for a
/// morphism of displays it satisfies `sigma(det M) = det(Phi(M))`.
pub fn det_morphism(frame: &Frame, m: &Morphism) -> Result<Scalar> {
    if m.src.0 != m.dst.0 || m.src.1 != m.dst.1 {
        return Err(Error::ShapeMismatch(
            "determinant needs equal height and dimension".into(),
        ));
    }
    s_mat_det(frame, &m.full_scalar_matrix(frame)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::truncated_witt_frame;
    use crate::ring::Ring;

    fn supersingular(frame: &Frame) -> Display {
        Display::from_int_entries(frame, &[&[0, 1], &[1, 0]], 1).unwrap()
    }

    #[test]
    fn make_display_validation() {
        let r = Ring::prime_field(2).unwrap();
        let fr = truncated_witt_frame(&r, 3).unwrap();
        // identity is a valid display for any split
        for d in 0..=2 {
            Display::from_int_entries(&fr, &[&[1, 0], &[0, 1]], d).unwrap();
        }
        // antidiagonal: det = -1, a unit
        supersingular(&fr);
        // p·identity has non-unit determinant
        assert!(matches!(
            Display::from_int_entries(&fr, &[&[2, 0], &[0, 1]], 1),
            Err(Error::NotInvertible)
        ));
    }

    #[test]
    fn identity_is_a_morphism() {
        let r = Ring::finite_field(2, 2).unwrap();
        let fr = truncated_witt_frame(&r, 3).unwrap();
        let p = supersingular(&fr);
        let id = Morphism::identity(&p);
        assert!(is_morphism(&id, &p, &p).unwrap());
        // phi(identity) = identity
        let ph = phi(&fr, &id).unwrap();
        assert_eq!(ph, mat::w_identity(&r, fr.s_len(), 2));
    }

    #[test]
    fn p_times_identity_is_a_morphism() {
        let r = Ring::finite_field(2, 2).unwrap();
        let fr = truncated_witt_frame(&r, 3).unwrap();
        let p = supersingular(&fr);
        let m = Morphism::scalar(&p, 2).unwrap();
        assert!(is_morphism(&m, &p, &p).unwrap());
    }

    #[test]
    fn perturbed_morphism_fails() {
        let r = Ring::finite_field(2, 2).unwrap();
        let fr = truncated_witt_frame(&r, 3).unwrap();
        let p = supersingular(&fr);
        let mut m = Morphism::identity(&p);
        let g = r.var("g").unwrap();
        m.a.set(0, 0, fr.scalar(WittVector::teichmuller(&g, 4)).unwrap());
        assert!(!is_morphism(&m, &p, &p).unwrap());
    }

    #[test]
    fn verschiebung_type_isogeny_is_a_morphism() {
        // M = [[0, V(1)], [1, 0]] against the antidiagonal display
        let r = Ring::finite_field(2, 2).unwrap();
        let fr = truncated_witt_frame(&r, 3).unwrap();
        let p = supersingular(&fr);
        let m = Morphism::new(
            (1, 1),
            (1, 1),
            s_mat_zero(&fr, 1, 1),
            Mat::from_fn(1, 1, |_, _| fr.fil_from_v(WittVector::one(&r, 3)).unwrap()),
            s_mat_identity(&fr, 1),
            s_mat_zero(&fr, 1, 1),
        )
        .unwrap();
        assert!(is_morphism(&m, &p, &p).unwrap());
        // composition with itself: still a morphism
        let mm = compose(&fr, &m, &m).unwrap();
        assert!(is_morphism(&mm, &p, &p).unwrap());
        // composing with the identity is the identity of composition
        let id = Morphism::identity(&p);
        assert_eq!(compose(&fr, &id, &m).unwrap(), m);
        assert_eq!(compose(&fr, &m, &id).unwrap(), m);
    }

    #[test]
    fn nilpotency_orders() {
        let r = Ring::prime_field(2).unwrap();
        let fr = truncated_witt_frame(&r, 3).unwrap();
        // supersingular: z-breve block of U^{-1} is 0, order 1
        assert_eq!(supersingular(&fr).nilpotency_order(4).unwrap(), Some(1));
        // identity with d = 0 (etale): never nilpotent
        let etale = Display::from_int_entries(&fr, &[&[1, 0], &[0, 1]], 0).unwrap();
        assert_eq!(etale.nilpotency_order(6).unwrap(), None);
        // c = 0: vacuously of order 0
        let mult = Display::from_int_entries(&fr, &[&[1]], 1).unwrap();
        assert_eq!(mult.nilpotency_order(4).unwrap(), Some(0));
    }

    #[test]
    fn morphisms_over_non_char_p_rings() {
        // the generic Frobenius path: truncated frame over Z/4
        let z4 = Ring::zmod(2, 2).unwrap();
        let fr = truncated_witt_frame(&z4, 3).unwrap();
        let p = supersingular(&fr);
        assert!(is_morphism(&Morphism::identity(&p), &p, &p).unwrap());
        let m = Morphism::scalar(&p, 2).unwrap();
        assert!(is_morphism(&m, &p, &p).unwrap());
        assert_eq!(p.nilpotency_order(4).unwrap(), Some(1));
        // determinant twist identity holds here too
        let det = det_morphism(&fr, &m).unwrap();
        let lhs = fr.sigma(&det).unwrap();
        let rhs = mat::w_det(&phi(&fr, &m).unwrap(), &z4, fr.s_len()).unwrap();
        let min = lhs.len().min(rhs.len());
        assert_eq!(lhs.truncate(min).unwrap(), rhs.truncate(min).unwrap());
    }

    #[test]
    fn det_twist_identity_on_samples() {
        let r = Ring::finite_field(2, 2).unwrap();
        let fr = truncated_witt_frame(&r, 3).unwrap();
        let p = supersingular(&fr);
        for k in [1i64, 2, 3, 6] {
            let m = Morphism::scalar(&p, k).unwrap();
            let det = det_morphism(&fr, &m).unwrap();
            let lhs = fr.sigma(&det).unwrap();
            let rhs = mat::w_det(&phi(&fr, &m).unwrap(), &r, fr.s_len()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn truncation_is_functorial() {
        let r = Ring::finite_field(2, 2).unwrap();
        let fr = truncated_witt_frame(&r, 3).unwrap();
        let tgt = truncated_witt_frame(&r, 2).unwrap();
        let p = supersingular(&fr);
        let m = Morphism::scalar(&p, 2).unwrap();
        let p2 = p.truncate(2).unwrap();
        let m2 = m.truncate(&fr, &tgt).unwrap();
        assert!(is_morphism(&m2, &p2, &p2).unwrap());
        // truncate(compose) = compose(truncate)
        let mm = compose(&fr, &m, &m).unwrap();
        assert_eq!(
            mm.truncate(&fr, &tgt).unwrap(),
            compose(&tgt, &m2, &m2).unwrap()
        );
    }

    #[test]
    fn base_change_preserves_structure() {
        let f2 = Ring::prime_field(2).unwrap();
        let f4 = Ring::finite_field(2, 2).unwrap();
        let map = RingMap::field_embedding(&f2, &f4).unwrap();
        let fr2 = truncated_witt_frame(&f2, 3).unwrap();
        let fr4 = truncated_witt_frame(&f4, 3).unwrap();
        let p = supersingular(&fr2);
        let m = Morphism::scalar(&p, 2).unwrap();
        let p4 = p.base_change(&map).unwrap();
        let m4 = m.base_change(&fr2, &map, &fr4).unwrap();
        assert!(is_morphism(&m4, &p4, &p4).unwrap());
        assert_eq!(p4.nilpotency_order(4).unwrap(), Some(1));
    }
}
