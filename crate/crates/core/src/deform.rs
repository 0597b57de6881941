//! Square-zero deformation theory and the extension of truncated
//! isogenies.
//!
//! Over a square-zero thickening B -> A with trivial divided powers, a
//! display over B is a relative display plus a lift of the Hodge
//! filtration; filtration lifts are graphs of kernel-valued matrices
//! against a chosen reference lift. Morphisms lift uniquely to relative
//! morphisms, computed here as an F_p-linear solve (corrections enter
//! linearly because the kernel squares to zero); the log part of the
//! lifted B block is the obstruction to being a genuine morphism over B.
//!
//! Truncated isogenies to a fixed reference display extend to exact
//! solutions at higher working precision through the adjugate
//! correction `U = U~ + p^n · unit^{-1} · M_adj · X`.

use crate::display::{self, s_mat_zero, Display, Morphism};
use crate::error::{Error, Result};
use crate::frame::{relative_frame, truncated_witt_frame, witt_frame, Frame, FrameKind, Scalar};
use crate::isogeny::{self, Isogeny, Reduced};
use crate::mat::{self, Mat, WMat};
use crate::ring::{RingElement, RingMap, SquareZeroIdeal};
use crate::witt::{Valuation, WittVector};
use alloc::string::ToString;
use alloc::vec::Vec;

/// Lift of the Hodge filtration, as the graph of a kernel-valued matrix
/// (rows indexed by the quotient part, columns by the filtration part).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationLift {
    pub graph: Mat<RingElement>,
}

impl FiltrationLift {
    pub fn zero(th: &SquareZeroIdeal, d: usize, c: usize) -> FiltrationLift {
        FiltrationLift {
            graph: Mat::from_fn(d, c, |_, _| th.ambient.zero()),
        }
    }

    pub fn new(th: &SquareZeroIdeal, graph: Mat<RingElement>) -> Result<FiltrationLift> {
        for e in graph.entries() {
            if !th.contains(e) {
                return Err(Error::DomainMismatch(
                    "filtration lift entries must lie in the kernel".to_string(),
                ));
            }
        }
        Ok(FiltrationLift { graph })
    }
}

/// The display over B lifting `p_a` along the filtration lift `y`:
/// `U_B = (1 + E(y)) · U_0` with `U_0` the coordinatewise section lift
/// and `E(y)` the Teichmüller block supported on the upper-right corner.
pub fn lift_display(p_a: &Display, y: &FiltrationLift, th: &SquareZeroIdeal) -> Result<Display> {
    let level = match p_a.frame().kind() {
        FrameKind::TruncatedWitt { level } => *level,
        _ => {
            return Err(Error::DomainMismatch(
                "display lifts start from truncated displays".to_string(),
            ))
        }
    };
    if p_a.frame().ring() != &th.base {
        return Err(Error::RingMismatch);
    }
    let (d, c) = p_a.shape();
    if y.graph.rows() != d || y.graph.cols() != c {
        return Err(Error::ShapeMismatch("filtration lift shape".to_string()));
    }
    let b = &th.ambient;
    let frame_b = truncated_witt_frame(b, level)?;
    let u0 = p_a.matrix().try_map(|w| w.map_ring(&th.sect))?;
    let h = p_a.height();
    let len = frame_b.s_len();
    let mut e_mat = mat::w_identity(b, len, h);
    for i in 0..d {
        for j in 0..c {
            e_mat.set(i, d + j, WittVector::teichmuller(y.graph.at(i, j), len));
        }
    }
    let u_b = mat::w_mul(&e_mat, &u0, b, len)?;
    Display::new(frame_b, u_b, d)
}

/// Reduction of a display over B back to A.
pub fn reduce_display(p_b: &Display, th: &SquareZeroIdeal) -> Result<Display> {
    p_b.base_change(&th.proj)
}

/// Re-frames a display over B as a relative display of the thickening.
pub fn relative_display(p_b: &Display, th: &SquareZeroIdeal, level: usize) -> Result<Display> {
    let frame = relative_frame(th, level)?;
    Display::new(frame, p_b.matrix().clone(), p_b.dim())
}

fn zero_morphism(frame: &Frame, src: (usize, usize), dst: (usize, usize)) -> Morphism {
    Morphism::new(
        src,
        dst,
        s_mat_zero(frame, dst.0, src.0),
        Mat::from_fn(dst.0, src.1, |_, _| frame.fil_zero()),
        s_mat_zero(frame, dst.1, src.0),
        s_mat_zero(frame, dst.1, src.1),
    )
    .expect("zero morphism shapes")
}

/// Gaussian elimination over F_p. Returns a particular solution of
/// `cols · x = rhs` (columns given separately) and a kernel basis.
fn fp_solve(p: u64, cols: &[Vec<u64>], rhs: &[u64]) -> (Option<Vec<u64>>, Vec<Vec<u64>>) {
    let rows = rhs.len();
    let ncols = cols.len();
    // augmented row-major matrix
    let mut a: Vec<Vec<u64>> = (0..rows)
        .map(|i| {
            let mut row: Vec<u64> = cols.iter().map(|c| c[i] % p).collect();
            row.push(rhs[i] % p);
            row
        })
        .collect();
    let inv = |x: u64| crate::ring::poly::powm(x, p - 2, p);
    let mut pivot_of_col: Vec<Option<usize>> = alloc::vec![None; ncols];
    let mut rank = 0usize;
    for col in 0..ncols {
        let mut piv = None;
        for r in rank..rows {
            if !a[r][col].is_multiple_of(p) {
                piv = Some(r);
                break;
            }
        }
        let Some(piv) = piv else { continue };
        a.swap(rank, piv);
        let scale = inv(a[rank][col]);
        for x in a[rank].iter_mut() {
            *x = (*x * scale) % p;
        }
        for r in 0..rows {
            if r != rank && a[r][col] != 0 {
                let f = a[r][col];
                let pivot_row = a[rank].clone();
                for (x, pv) in a[r].iter_mut().zip(&pivot_row) {
                    *x = (*x + (p - f % p) * pv) % p;
                }
            }
        }
        pivot_of_col[col] = Some(rank);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    // kernel basis: one vector per pivot-free column
    let mut kernel = Vec::new();
    for f in 0..ncols {
        if pivot_of_col[f].is_some() {
            continue;
        }
        let mut v = alloc::vec![0u64; ncols];
        v[f] = 1;
        for (c, piv) in pivot_of_col.iter().enumerate() {
            if let Some(r) = piv {
                v[c] = (p - a[*r][f] % p) % p;
            }
        }
        kernel.push(v);
    }
    // consistency: no row of the form (0,..,0 | nonzero)
    for r in rank..rows {
        if a[r][..ncols].iter().all(|&x| x % p == 0) && !a[r][ncols].is_multiple_of(p) {
            return (None, kernel);
        }
    }
    let mut sol = alloc::vec![0u64; ncols];
    for (col, piv) in pivot_of_col.iter().enumerate() {
        if let Some(r) = piv {
            sol[col] = a[*r][ncols] % p;
        }
    }
    // verify (cheap; catches the early-break corner cases)
    for r in 0..rows {
        let mut acc = 0u64;
        for (c, x) in sol.iter().enumerate() {
            acc = (acc + cols[c][r] % p * x) % p;
        }
        if acc != rhs[r] % p {
            return (None, kernel);
        }
    }
    (Some(sol), kernel)
}

/// Flattens a relative-frame defect matrix (entries with all Witt
/// coordinates in the kernel) into F_p coordinates.
fn flatten_defect(mat: &WMat, th: &SquareZeroIdeal) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for w in mat.entries() {
        for c in w.coords() {
            if !th.contains(c) {
                return Err(Error::DomainMismatch(
                    "defect does not vanish over the base".to_string(),
                ));
            }
            out.extend(th.fp_coords(c)?);
        }
    }
    Ok(out)
}

fn rel_defect(frame: &Frame, g: &Morphism, u_src: &WMat, u_dst: &WMat) -> Result<WMat> {
    let ring = frame.ring();
    let len = frame.s_len();
    let lhs = mat::w_mul(&g.full_s_matrix(frame)?, u_src, ring, len)?;
    let rhs = mat::w_mul(u_dst, &display::phi(frame, g)?, ring, len)?;
    mat::w_sub(&lhs, &rhs)
}

/// Result of a unique morphism lift: the relative morphism at the level
/// where it is unique, the obstruction to being a genuine morphism over
/// B (log parts of the B block), and the margin that was consumed.
#[derive(Clone, Debug)]
pub struct MorphismLift {
    pub frame: Frame,
    pub morphism: Morphism,
    pub obstruction: Mat<RingElement>,
    pub margin: usize,
}

/// The unique lift of a morphism over A to a relative morphism of the
/// thickening, computed as an F_p-linear solve (corrections enter
/// linearly because the kernel squares to zero).
///
/// Solutions at the working level carry a tail ambiguity killed by
/// truncation: the kernel of the linear system consists of morphisms
/// vanishing at level `n - margin`. The smallest sufficient margin is
/// found (at most `max_margin`) and reported; a kernel element surviving
/// every margin would falsify the relative divided-Frobenius rule and
/// surfaces as `NonUniqueSolution`.
pub fn lift_morphism_unique(
    f_a: &Morphism,
    p_b: &Display,
    q_b: &Display,
    th: &SquareZeroIdeal,
    max_margin: usize,
) -> Result<MorphismLift> {
    let level = match p_b.frame().kind() {
        FrameKind::TruncatedWitt { level } => *level,
        _ => {
            return Err(Error::DomainMismatch(
                "morphism lifts run at truncated level".to_string(),
            ))
        }
    };
    if !th.base.is_char_p() {
        return Err(Error::UnsupportedRing(
            "p times the kernel must vanish (base of characteristic p)".to_string(),
        ));
    }
    let rel = relative_frame(th, level)?;
    let b = &th.ambient;
    let (sd, sc) = p_b.shape();
    let (dd, dc) = q_b.shape();

    // initial lift of the blocks along the section
    let lift_scalar =
        |s: &Scalar| -> Result<Scalar> { rel.scalar(Frame::scalar_rep(s).map_ring(&th.sect)?) };
    let g0 = Morphism::new(
        (sd, sc),
        (dd, dc),
        f_a.a.try_map(|s| lift_scalar(s))?,
        f_a.b.try_map(|f| {
            let v = f.v_part().map_ring(&th.sect)?;
            rel.fil_from_v(v)
        })?,
        f_a.c.try_map(|s| lift_scalar(s))?,
        f_a.d.try_map(|s| lift_scalar(s))?,
    )?;

    let d0 = rel_defect(&rel, &g0, p_b.matrix(), q_b.matrix())?;
    let rhs_vec: Vec<u64> = {
        let p = b.prime();
        flatten_defect(&d0, th)?
            .iter()
            .map(|&x| (p - x % p) % p)
            .collect()
    };

    // parameter basis: kernel-valued perturbations of every block slot
    let a_basis = th.fp_basis()?;
    let mut params: Vec<Morphism> = Vec::new();
    let n = level;
    let mk_scalar_delta = |coord: usize, beta: &RingElement| -> Result<Scalar> {
        let mut coords: Vec<RingElement> = (0..n + 1).map(|_| b.zero()).collect();
        coords[coord] = beta.clone();
        rel.scalar(WittVector::new(b.clone(), coords)?)
    };
    for i in 0..dd {
        for j in 0..sd {
            for t in 0..n {
                for beta in &a_basis {
                    let mut m = zero_morphism(&rel, (sd, sc), (dd, dc));
                    m.a.set(i, j, mk_scalar_delta(t, beta)?);
                    params.push(m);
                }
            }
        }
    }
    for i in 0..dd {
        for j in 0..sc {
            // v-part coordinates
            for t in 0..n {
                for beta in &a_basis {
                    let mut m = zero_morphism(&rel, (sd, sc), (dd, dc));
                    let mut coords: Vec<RingElement> = (0..n).map(|_| b.zero()).collect();
                    coords[t] = beta.clone();
                    m.b.set(i, j, rel.fil_from_v(WittVector::new(b.clone(), coords)?)?);
                    params.push(m);
                }
            }
            // log part
            for beta in &a_basis {
                let mut m = zero_morphism(&rel, (sd, sc), (dd, dc));
                m.b.set(i, j, rel.fil_from_log(beta.clone())?);
                params.push(m);
            }
        }
    }
    for i in 0..dc {
        for j in 0..sd {
            for t in 0..n {
                for beta in &a_basis {
                    let mut m = zero_morphism(&rel, (sd, sc), (dd, dc));
                    m.c.set(i, j, mk_scalar_delta(t, beta)?);
                    params.push(m);
                }
            }
        }
    }
    for i in 0..dc {
        for j in 0..sc {
            for t in 0..n {
                for beta in &a_basis {
                    let mut m = zero_morphism(&rel, (sd, sc), (dd, dc));
                    m.d.set(i, j, mk_scalar_delta(t, beta)?);
                    params.push(m);
                }
            }
        }
    }

    // the defect is affine-linear in the perturbation
    let mut cols = Vec::with_capacity(params.len());
    for eta in &params {
        let g_eta = g0.add(&rel, eta)?;
        let d_eta = rel_defect(&rel, &g_eta, p_b.matrix(), q_b.matrix())?;
        let diff = mat::w_sub(&d_eta, &d0)?;
        cols.push(flatten_defect(&diff, th)?);
    }

    let (sol, kernel) = fp_solve(b.prime(), &cols, &rhs_vec);
    let sol = sol.ok_or(Error::NoSolution)?;
    let combine = |coeffs: &[u64]| -> Result<Morphism> {
        let mut g = zero_morphism(&rel, (sd, sc), (dd, dc));
        for (x, eta) in coeffs.iter().zip(&params) {
            if *x != 0 {
                g = g.add(&rel, &eta.mul_int(&rel, *x as i64)?)?;
            }
        }
        Ok(g)
    };
    let mut g = g0.add(&rel, &combine(&sol)?)?;
    // the solved lift must satisfy the relative structure equation
    let rel_src = relative_display(p_b, th, level)?;
    let rel_dst = relative_display(q_b, th, level)?;
    if !display::is_morphism(&g, &rel_src, &rel_dst)? {
        return Err(Error::NoSolution);
    }
    // find the least margin whose truncation kills the whole kernel
    let kernel_morphisms = kernel
        .iter()
        .map(|v| combine(v))
        .collect::<Result<Vec<_>>>()?;
    let mut margin = None;
    for try_margin in 0..=max_margin.min(level - 1) {
        let target = relative_frame(th, level - try_margin)?;
        let mut all_die = true;
        for km in &kernel_morphisms {
            if !km.truncate(&rel, &target)?.is_zero() {
                all_die = false;
                break;
            }
        }
        if all_die {
            margin = Some(try_margin);
            break;
        }
    }
    let Some(margin) = margin else {
        return Err(Error::NonUniqueSolution(kernel_morphisms.len()));
    };
    let out_frame = relative_frame(th, level - margin)?;
    if margin > 0 {
        g = g.truncate(&rel, &out_frame)?;
        let src_t = Display::new(
            out_frame.clone(),
            mat::w_truncate(rel_src.matrix(), out_frame.s_len())?,
            rel_src.dim(),
        )?;
        let dst_t = Display::new(
            out_frame.clone(),
            mat::w_truncate(rel_dst.matrix(), out_frame.s_len())?,
            rel_dst.dim(),
        )?;
        if !display::is_morphism(&g, &src_t, &dst_t)? {
            return Err(Error::NoSolution);
        }
    }
    let obstruction =
        g.b.map(|f| f.log_part().cloned().unwrap_or_else(|| b.zero()));
    Ok(MorphismLift {
        frame: out_frame,
        morphism: g,
        obstruction,
        margin,
    })
}

/// Tangent data of a display over a finite field: the dimension d·c and
/// the complete list of filtration lifts to the dual numbers.
#[derive(Clone, Debug)]
pub struct TangentSpace {
    pub dimension: usize,
    pub thickening: SquareZeroIdeal,
    pub lifts: Vec<(FiltrationLift, Display)>,
}

pub fn tangent_space(p: &Display) -> Result<TangentSpace> {
    let k = p.frame().ring().clone();
    if !k.is_perfect_field() {
        return Err(Error::NotPerfectField);
    }
    let th = k.square_zero_extension(1)?;
    let (d, c) = p.shape();
    let ideal_elems = th.elements()?;
    let mut lifts = Vec::new();
    let slots = d * c;
    let mut idx = alloc::vec![0usize; slots];
    loop {
        let graph = Mat::from_fn(d, c, |i, j| ideal_elems[idx[i * c + j]].clone());
        let y = FiltrationLift::new(&th, graph)?;
        let disp = lift_display(p, &y, &th)?;
        lifts.push((y, disp));
        let mut i = 0;
        loop {
            if i == slots {
                return Ok(TangentSpace {
                    dimension: d * c,
                    thickening: th,
                    lifts,
                });
            }
            idx[i] += 1;
            if idx[i] < ideal_elems.len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Output of the truncated-isogeny extension.
#[derive(Clone, Debug)]
pub struct Extended {
    pub frame: Frame,
    pub display: Display,
    pub morphism: Morphism,
    pub height: usize,
}

/// Extends a truncated isogeny `m_trunc: p_trunc -> u0[level]` of height
/// m to an exact solution of the structure equation at working precision
/// `n_prec`, by the adjugate correction. The output structure matrix
/// agrees with the input below level `level - m`, the output morphism
/// lifts `m_trunc`, and the structure equation holds exactly.
pub fn extend_isogeny(
    p_trunc: &Display,
    m_trunc: &Morphism,
    u0: &Display,
    n_prec: usize,
) -> Result<Extended> {
    let ring = p_trunc.frame().ring().clone();
    if !ring.is_char_p() {
        return Err(Error::NotCharP);
    }
    if u0.frame().ring() != &ring {
        return Err(Error::RingMismatch);
    }
    let level = p_trunc.frame().s_len();
    // height from the truncated determinant at the residue field
    let det_t = display::det_morphism(p_trunc.frame(), m_trunc)?;
    let (_, to_res) = ring.residue_field()?;
    let m_height = match Frame::scalar_rep(&det_t)
        .map_ring(&to_res)?
        .vp_valuation()?
    {
        Valuation::Finite(v) => v,
        Valuation::AtLeast(_) => return Err(Error::PrecisionExhausted),
    };
    if m_height >= level {
        return Err(Error::BadLevel(m_height, level));
    }
    let n_agree = level - m_height;
    let work = n_prec + m_height + 1;
    if u0.precision() < work {
        return Err(Error::PrecisionExhausted);
    }
    let wp = witt_frame(&ring, work)?;

    // arbitrary lifts: zero padding
    let u_approx = p_trunc.matrix().try_map(|w| Ok(w.pad_zero(work)))?;
    let m_lift = Morphism::new(
        m_trunc.src_shape(),
        m_trunc.dst_shape(),
        m_trunc
            .a
            .try_map(|s| wp.scalar(Frame::scalar_rep(s).pad_zero(work)))?,
        m_trunc
            .b
            .try_map(|f| wp.fil_from_v(f.v_part().pad_zero(work)))?,
        m_trunc
            .c
            .try_map(|s| wp.scalar(Frame::scalar_rep(s).pad_zero(work)))?,
        m_trunc
            .d
            .try_map(|s| wp.scalar(Frame::scalar_rep(s).pad_zero(work)))?,
    )?;
    let u0_work = u0.matrix().try_map(|w| w.truncate(work))?;

    // unit of the determinant: det(M) = p^m · unit
    let det = display::det_morphism(&wp, &m_lift)?;
    let unit = Frame::scalar_rep(&det)
        .divide_by_p_pow(m_height)
        .map_err(|e| match e {
            Error::NotDivisible => Error::NotSemiperfect,
            other => other,
        })?;
    if !unit.is_unit()? {
        return Err(Error::NotSemiperfect);
    }
    let unit_inv = unit.invert()?;

    // defect: M·U~ + p^level · X = U0 · Phi(M)
    let lhs = mat::w_mul(&m_lift.full_s_matrix(&wp)?, &u_approx, &ring, work)?;
    let rhs = mat::w_mul(&u0_work, &display::phi(&wp, &m_lift)?, &ring, work)?;
    let defect = mat::w_sub(&rhs, &lhs)?;
    let x = defect.try_map(|w| {
        w.divide_by_p_pow(level).map_err(|e| match e {
            Error::NotDivisible => Error::DefectNotDivisible(level),
            other => other,
        })
    })?;

    // U := U~ + p^{n_agree} · unit^{-1} · M_adj · X
    let m_adj = mat::w_adjugate(&m_lift.full_s_matrix(&wp)?, &ring, work)?;
    let correction = {
        let t = mat::w_mul_scalar(&mat::w_mul(&m_adj, &x, &ring, work)?, &unit_inv)?;
        let padded = t.try_map(|w| Ok(w.pad_zero(work)))?;
        let mut acc = padded;
        for _ in 0..n_agree {
            acc = mat::w_mul_p(&acc)?;
        }
        acc
    };
    let u_new = mat::w_add(&u_approx, &correction)?;

    let out_frame = witt_frame(&ring, n_prec)?;
    let u_out = u_new.try_map(|w| w.truncate(n_prec.min(w.len())))?;
    let display_out = Display::new(out_frame.clone(), u_out, p_trunc.dim())?;
    let m_out = m_lift.truncate(&wp, &out_frame)?;
    let u0_out = u0.truncate(n_prec)?;
    if !display::is_morphism(&m_out, &display_out, &u0_out)? {
        return Err(Error::NoSolution);
    }
    Ok(Extended {
        frame: out_frame,
        display: display_out,
        morphism: m_out,
        height: m_height,
    })
}

/// Decision procedure for the lifting problem `g = g' ∘ f`: divides
/// `(p^m g'^{-1}) ∘ g` by p^m. When the divisions succeed the solution
/// is unique and an isomorphism; mathematical failure is reported as a
/// nonzero obstruction. Missing Frobenius preimages trigger a perfection
/// cover, with the solution descended back afterwards.
pub fn solve_lifting_isomorphism(
    frame: &Frame,
    g: &Isogeny,
    p_src: &Display,
    g_prime: &Isogeny,
    q_src: &Display,
    target: &Display,
) -> Result<Reduced> {
    if g.height != g_prime.height {
        return Err(Error::ShapeMismatch("heights differ".to_string()));
    }
    let m = g.height;
    let inv = isogeny::invert_isogeny(frame, g_prime, q_src, target)?;
    let g_t = g.morphism.truncate(frame, &inv.frame)?;
    let p_t = p_src.truncate(inv.frame.s_len())?;
    let f_hat = display::compose(&inv.frame, &inv.morphism, &g_t)?;

    let mut cur = Reduced {
        frame: inv.frame.clone(),
        morphism: f_hat,
        src: p_t,
        dst: inv.src.clone(),
    };
    let mut divisions = 0usize;
    let mut cover: Option<RingMap> = None;
    let mut escalations = 0usize;
    while divisions < m {
        match isogeny::divide_morphism_by_p(&cur.frame, &cur.morphism, &cur.src, &cur.dst) {
            Ok(next) => {
                cur = next;
                divisions += 1;
            }
            Err(Error::PrepFailure(_)) if escalations < 3 => {
                // enlarge the ring so the Frobenius preimages exist;
                // repeated escalations compose the inclusions
                let e = cur
                    .src
                    .nilpotency_order(cur.frame.s_len() + 2)?
                    .unwrap_or(1)
                    .max(1);
                let stage = (e as u32 + 1) * (m as u32).max(1);
                let (_, incl) = cur.frame.ring().perfection_stage(stage)?;
                let prec = cur.frame.s_len();
                let big_frame = witt_frame(incl.target(), prec)?;
                let src = cur.src.base_change(&incl)?;
                let dst = cur.dst.base_change(&incl)?;
                let morphism = cur.morphism.base_change(&cur.frame, &incl, &big_frame)?;
                cover = Some(match cover {
                    None => incl,
                    Some(prev) => incl.compose(&prev)?,
                });
                escalations += 1;
                cur = Reduced {
                    frame: big_frame,
                    morphism,
                    src,
                    dst,
                };
            }
            Err(
                e @ (Error::ZerothCoordinateObstruction(_)
                | Error::ObstructionNonzero(_)
                | Error::NotDivisible
                | Error::NoSolution),
            ) => {
                let _ = e;
                return Err(Error::ObstructionNonzero(divisions));
            }
            Err(other) => return Err(other),
        }
    }
    // descend from the cover when one was taken
    if let Some(incl) = cover {
        let back = descend_morphism(&cur, &incl, frame)?;
        cur = back;
    }
    // the solution must be an isomorphism: unit determinant
    let det = display::det_morphism(&cur.frame, &cur.morphism)?;
    if !cur.frame.s_is_unit(&det)? {
        return Err(Error::ObstructionNonzero(m));
    }
    // g' ∘ f = g at the surviving precision
    let gp_t = g_prime.morphism.truncate(frame, &cur.frame)?;
    let comp = display::compose(&cur.frame, &gp_t, &cur.morphism)?;
    let g_cut = g.morphism.truncate(frame, &cur.frame)?;
    if !isogeny::morphism_eq_trunc(&cur.frame, &comp, &g_cut)? {
        return Err(Error::ObstructionNonzero(m));
    }
    Ok(cur)
}

fn descend_morphism(cur: &Reduced, incl: &RingMap, base_frame: &Frame) -> Result<Reduced> {
    let prec = cur.frame.s_len();
    let small_frame = base_frame.truncate_frame(prec)?;
    let pull_w = |w: &WittVector| -> Result<WittVector> {
        let coords = w
            .coords()
            .iter()
            .map(|c| incl.preimage(c)?.ok_or(Error::NoSolution))
            .collect::<Result<Vec<_>>>()?;
        WittVector::new(incl.source().clone(), coords)
    };
    let morphism = Morphism::new(
        cur.morphism.src_shape(),
        cur.morphism.dst_shape(),
        cur.morphism
            .a
            .try_map(|s| small_frame.scalar(pull_w(Frame::scalar_rep(s))?))?,
        cur.morphism
            .b
            .try_map(|f| small_frame.fil_from_v(pull_w(f.v_part())?))?,
        cur.morphism
            .c
            .try_map(|s| small_frame.scalar(pull_w(Frame::scalar_rep(s))?))?,
        cur.morphism
            .d
            .try_map(|s| small_frame.scalar(pull_w(Frame::scalar_rep(s))?))?,
    )?;
    let src = Display::new(
        small_frame.clone(),
        cur.src.matrix().try_map(|w| pull_w(w))?,
        cur.src.dim(),
    )?;
    let dst = Display::new(
        small_frame.clone(),
        cur.dst.matrix().try_map(|w| pull_w(w))?,
        cur.dst.dim(),
    )?;
    Ok(Reduced {
        frame: small_frame,
        morphism,
        src,
        dst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Ring;

    fn supersingular_tw(ring: &Ring, level: usize) -> Display {
        let fr = truncated_witt_frame(ring, level).unwrap();
        Display::from_int_entries(&fr, &[&[0, 1], &[1, 0]], 1).unwrap()
    }

    #[test]
    fn lift_display_counts_over_dual_numbers() {
        // supersingular over F_2: exactly |kernel|^(d·c) = 2 distinct lifts
        let k = Ring::prime_field(2).unwrap();
        let p = supersingular_tw(&k, 2);
        let ts = tangent_space(&p).unwrap();
        assert_eq!(ts.dimension, 1);
        assert_eq!(ts.lifts.len(), 2);
        // distinct filtration lifts give distinct matrices
        assert!(ts.lifts[0].1.matrix() != ts.lifts[1].1.matrix());
        // reduction returns the base display
        for (_, l) in &ts.lifts {
            let back = reduce_display(l, &ts.thickening).unwrap();
            assert_eq!(back.matrix(), p.matrix());
        }
    }

    #[test]
    fn tangent_dimensions_match() {
        // h = 3, d = 1 over F_2: dimension 2, 4 lifts
        let k = Ring::prime_field(2).unwrap();
        let fr = truncated_witt_frame(&k, 2).unwrap();
        let p = Display::from_int_entries(&fr, &[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]], 1).unwrap();
        let ts = tangent_space(&p).unwrap();
        assert_eq!(ts.dimension, 2);
        assert_eq!(ts.lifts.len(), 4);
        // d = 0: rigid
        let q = Display::from_int_entries(&fr, &[&[1, 0], &[0, 1]], 0).unwrap();
        let ts = tangent_space(&q).unwrap();
        assert_eq!(ts.dimension, 0);
        assert_eq!(ts.lifts.len(), 1);
    }

    #[test]
    fn identity_lifts_with_zero_obstruction() {
        let k = Ring::prime_field(2).unwrap();
        let p = supersingular_tw(&k, 2);
        let th = k.square_zero_extension(1).unwrap();
        let y0 = FiltrationLift::zero(&th, 1, 1);
        let pb = lift_display(&p, &y0, &th).unwrap();
        let id_a = Morphism::identity(&p);
        let lift = lift_morphism_unique(&id_a, &pb, &pb, &th, 1).unwrap();
        assert!(lift.obstruction.entries().all(|x| x.is_zero()));
        assert!(!lift.morphism.is_zero());
        assert!(lift.margin <= 1);
    }

    #[test]
    fn mismatched_lifts_obstruct() {
        let k = Ring::prime_field(2).unwrap();
        let p = supersingular_tw(&k, 2);
        let ts = tangent_space(&p).unwrap();
        let th = &ts.thickening;
        let (y0, p0) = &ts.lifts[0];
        let (y1, p1) = &ts.lifts[1];
        assert!(y0 != y1);
        let id_a = Morphism::identity(&p);
        let lift = lift_morphism_unique(&id_a, p0, p1, th, 1).unwrap();
        assert!(lift.obstruction.entries().any(|x| !x.is_zero()));
        // p·identity lifts with zero obstruction even between different lifts
        let p_id = Morphism::scalar(&p, 2).unwrap();
        let lift = lift_morphism_unique(&p_id, p0, p1, th, 1).unwrap();
        assert!(lift.obstruction.entries().all(|x| x.is_zero()));
    }

    #[test]
    fn extend_identity_recovers_reference() {
        let r = Ring::finite_field(2, 2).unwrap();
        let wp = witt_frame(&r, 8).unwrap();
        let u0 = Display::from_int_entries(&wp, &[&[0, 1], &[1, 0]], 1).unwrap();
        let p3 = supersingular_tw(&r, 3);
        let fr3 = truncated_witt_frame(&r, 3).unwrap();
        let id = Morphism::identity(&supersingular_tw(&r, 3));
        let _ = fr3;
        let ext = extend_isogeny(&p3, &id, &u0, 6).unwrap();
        assert_eq!(ext.height, 0);
        assert_eq!(
            ext.display.matrix(),
            &u0.truncate(6).unwrap().matrix().clone()
        );
    }

    #[test]
    fn lifting_isomorphism_identity_case() {
        let r = Ring::finite_field(2, 2).unwrap();
        let wp = witt_frame(&r, 14).unwrap();
        let p = Display::from_int_entries(&wp, &[&[0, 1], &[1, 0]], 1).unwrap();
        let m = Morphism::scalar(&p, 2).unwrap();
        let g = isogeny::verify_isogeny(&wp, &m, &p, &p).unwrap();
        let f = solve_lifting_isomorphism(&wp, &g, &p, &g, &p, &p).unwrap();
        let id = Morphism::identity(&f.src);
        assert!(isogeny::morphism_eq_trunc(&f.frame, &f.morphism, &id).unwrap());
    }
}
