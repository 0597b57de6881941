//! Exact evaluation of the universal Witt operations.
//!
//! Instead of expanding the universal structure polynomials (which is
//! hopeless beyond a handful of components), each operation lifts the
//! canonical coordinates into the same presentation with the modulus
//! raised to `p^(a+n)`, computes ghost components there, combines them,
//! and unghosts with exact division by `p^i`. Because the supported
//! rings are free `Z/p^a`-modules on their irreducible monomials, the
//! canonical coefficients of a value divisible by `p^i` are themselves
//! divisible, and the step-i division loses exactly i levels of the
//! padding — which is why the pad equals the output length.

use crate::error::Result;
use crate::ring::{Ring, RingElement};
use alloc::vec::Vec;

#[derive(Clone, Copy, Debug)]
pub enum GhostOp {
    Add,
    Sub,
    Mul,
    Neg,
    /// h_i = g_{i+1}(x); the output is one component shorter.
    Frobenius,
    MulInt(i64),
}

/// Ghost components `w_0 .. w_{upto-1}` of lifted coordinates.
fn ghosts(big: &Ring, coords: &[RingElement], upto: usize) -> Vec<RingElement> {
    let p = big.prime();
    let mut out = Vec::with_capacity(upto);
    // powers[j] holds x_j^(p^(i-j)), updated lazily per row i
    let mut powers: Vec<RingElement> = coords.iter().take(upto).cloned().collect();
    let mut pj: Vec<i64> = Vec::new();
    {
        let mut acc: i64 = 1;
        for _ in 0..upto {
            pj.push(acc);
            acc = acc.checked_mul(p as i64).expect("ghost weight overflow");
        }
    }
    for i in 0..upto {
        let mut w = big.zero();
        for j in 0..=i {
            w = w.add(&powers[j].mul_int(pj[j]));
        }
        out.push(w);
        for pw in powers.iter_mut().take(i + 1) {
            *pw = pw.pow(p);
        }
    }
    out
}

/// Recovers coordinates from ghost components known mod `p^(a+pad)`.
fn unghost(big: &Ring, hs: &[RingElement]) -> Result<Vec<RingElement>> {
    let p = big.prime();
    let mut zs: Vec<RingElement> = Vec::with_capacity(hs.len());
    for i in 0..hs.len() {
        let mut num = hs[i].clone();
        let mut pj: i64 = 1;
        for (j, z) in zs.iter().enumerate().take(i) {
            let mut zp = z.clone();
            for _ in 0..(i - j) {
                zp = zp.pow(p);
            }
            num = num.sub(&zp.mul_int(pj));
            pj = pj.checked_mul(p as i64).expect("ghost weight overflow");
        }
        zs.push(num.exact_div_p(i as u32)?);
    }
    Ok(zs)
}

// ----- dense fast path for scalar-like rings -----
//
// Rings whose only variable is the field generator (prime fields, finite
// fields, Z/p^a) admit a dense representation: k coefficients mod
// p^(a+pad) with a single monic reduction rule. The ghost computation is
// then plain u64 arithmetic, which matters in the exhaustive searches.

struct DenseCtx {
    p: u64,
    modulus: u64,
    k: usize,
    /// coefficients of g^k (length k); empty when k = 1
    tail: alloc::vec::Vec<u64>,
}

fn dense_ctx(ring: &Ring, pad: u32) -> Option<DenseCtx> {
    let nv = ring.vars().len();
    if nv > 1 {
        return None;
    }
    let k = ring.field_degree() as usize;
    if nv == 1 && (k < 2 || ring.rules().len() != 1) {
        return None;
    }
    let mut m: u64 = ring.modulus();
    for _ in 0..pad {
        m = m.checked_mul(ring.prime())?;
        if m >= (1u64 << 31) {
            return None; // fall back to the checked generic path
        }
    }
    let tail = if nv == 1 {
        let rule = &ring.rules()[0];
        let mut t = alloc::vec![0u64; k];
        for (mono, &c) in &rule.rhs.terms {
            t[mono.0[0] as usize] = c;
        }
        t
    } else {
        alloc::vec::Vec::new()
    };
    Some(DenseCtx {
        p: ring.prime(),
        modulus: m,
        k,
        tail,
    })
}

impl DenseCtx {
    fn from_elt(&self, x: &RingElement) -> alloc::vec::Vec<u64> {
        let mut out = alloc::vec![0u64; self.k];
        for (mono, &c) in &x.poly().terms {
            let deg = mono.0.first().copied().unwrap_or(0) as usize;
            out[deg] = c;
        }
        out
    }

    fn to_elt(&self, ring: &Ring, v: &[u64]) -> RingElement {
        let nvars = ring.vars().len();
        let mut poly = crate::ring::poly::Poly::zero();
        for (i, &c) in v.iter().enumerate() {
            let mono = if nvars == 0 {
                crate::ring::poly::Monomial::one(0)
            } else {
                crate::ring::poly::Monomial(alloc::vec![i as crate::ring::poly::Exp])
            };
            poly.add_term(mono, c % ring.modulus(), ring.modulus());
        }
        // coefficients are below the modulus and the degree below k, so
        // the polynomial is already in normal form
        ring.element_from_poly(poly)
    }

    fn add(&self, a: &[u64], b: &[u64]) -> alloc::vec::Vec<u64> {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| (x + y) % self.modulus)
            .collect()
    }

    fn sub(&self, a: &[u64], b: &[u64]) -> alloc::vec::Vec<u64> {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| (x + self.modulus - y % self.modulus) % self.modulus)
            .collect()
    }

    fn scale(&self, a: &[u64], c: i64) -> alloc::vec::Vec<u64> {
        let c = c.rem_euclid(self.modulus as i64) as u64;
        a.iter()
            .map(|&x| ((x as u128 * c as u128) % self.modulus as u128) as u64)
            .collect()
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> alloc::vec::Vec<u64> {
        let k = self.k;
        if k == 1 {
            return alloc::vec![((a[0] as u128 * b[0] as u128) % self.modulus as u128) as u64];
        }
        let mut prod = alloc::vec![0u64; 2 * k - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                prod[i + j] =
                    ((prod[i + j] as u128 + ai as u128 * bj as u128) % self.modulus as u128) as u64;
            }
        }
        // reduce g^(k+i) = tail · g^i from the top down
        for d in (k..2 * k - 1).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for (t, &tc) in self.tail.iter().enumerate() {
                prod[d - k + t] = ((prod[d - k + t] as u128 + c as u128 * tc as u128)
                    % self.modulus as u128) as u64;
            }
        }
        prod.truncate(k);
        prod
    }

    fn pow(&self, a: &[u64], mut e: u64) -> alloc::vec::Vec<u64> {
        let mut acc = alloc::vec![0u64; self.k];
        acc[0] = 1 % self.modulus;
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn exact_div_p(&self, a: &[u64], i: u32) -> Result<alloc::vec::Vec<u64>> {
        let mut q: u64 = 1;
        for _ in 0..i {
            q *= self.p;
        }
        let mut out = alloc::vec::Vec::with_capacity(self.k);
        for &c in a {
            if c % q != 0 {
                return Err(crate::error::Error::InexactDivision(i));
            }
            out.push(c / q);
        }
        Ok(out)
    }
}

fn run_dense(
    ring: &Ring,
    ctx: &DenseCtx,
    op: GhostOp,
    x: &[RingElement],
    y: Option<&[RingElement]>,
    out_len: usize,
) -> Result<Vec<RingElement>> {
    let ghost_len = match op {
        GhostOp::Frobenius => out_len + 1,
        _ => out_len,
    };
    let ghosts = |coords: &[RingElement]| -> alloc::vec::Vec<alloc::vec::Vec<u64>> {
        let mut powers: alloc::vec::Vec<alloc::vec::Vec<u64>> = coords
            .iter()
            .take(ghost_len)
            .map(|c| ctx.from_elt(c))
            .collect();
        let mut pj: alloc::vec::Vec<i64> = alloc::vec::Vec::new();
        let mut acc: i64 = 1;
        for _ in 0..ghost_len {
            pj.push(acc);
            acc = acc
                .checked_mul(ctx.p as i64)
                .expect("ghost weight overflow");
        }
        let mut out = alloc::vec::Vec::with_capacity(ghost_len);
        for i in 0..ghost_len {
            let mut w = alloc::vec![0u64; ctx.k];
            for j in 0..=i {
                w = ctx.add(&w, &ctx.scale(&powers[j], pj[j]));
            }
            out.push(w);
            for pw in powers.iter_mut().take(i + 1) {
                *pw = ctx.pow(pw, ctx.p);
            }
        }
        out
    };
    let gx = ghosts(x);
    let hs: alloc::vec::Vec<alloc::vec::Vec<u64>> = match op {
        GhostOp::Add => {
            let gy = ghosts(y.unwrap());
            gx.iter().zip(&gy).map(|(a, b)| ctx.add(a, b)).collect()
        }
        GhostOp::Sub => {
            let gy = ghosts(y.unwrap());
            gx.iter().zip(&gy).map(|(a, b)| ctx.sub(a, b)).collect()
        }
        GhostOp::Mul => {
            let gy = ghosts(y.unwrap());
            gx.iter().zip(&gy).map(|(a, b)| ctx.mul(a, b)).collect()
        }
        GhostOp::Neg => gx
            .iter()
            .map(|a| ctx.sub(&alloc::vec![0u64; ctx.k], a))
            .collect(),
        GhostOp::MulInt(kk) => gx.iter().map(|a| ctx.scale(a, kk)).collect(),
        GhostOp::Frobenius => gx[1..].to_vec(),
    };
    // unghost
    let mut zs: alloc::vec::Vec<alloc::vec::Vec<u64>> = alloc::vec::Vec::with_capacity(out_len);
    for i in 0..out_len {
        let mut num = hs[i].clone();
        let mut pj: i64 = 1;
        for (j, z) in zs.iter().enumerate().take(i) {
            let mut zp = z.clone();
            for _ in 0..(i - j) {
                zp = ctx.pow(&zp, ctx.p);
            }
            num = ctx.sub(&num, &ctx.scale(&zp, pj));
            pj = pj.checked_mul(ctx.p as i64).expect("ghost weight overflow");
        }
        zs.push(ctx.exact_div_p(&num, i as u32)?);
    }
    Ok(zs.iter().map(|z| ctx.to_elt(ring, z)).collect())
}

/// Runs a universal Witt operation on canonical coordinate lists over
/// `ring`, producing `out_len` exact output coordinates.
pub fn run(
    ring: &Ring,
    op: GhostOp,
    x: &[RingElement],
    y: Option<&[RingElement]>,
    out_len: usize,
) -> Result<Vec<RingElement>> {
    if out_len == 0 {
        return Ok(Vec::new());
    }
    if let Some(ctx) = dense_ctx(ring, out_len as u32) {
        return run_dense(ring, &ctx, op, x, y, out_len);
    }
    let ghost_len = match op {
        GhostOp::Frobenius => out_len + 1,
        _ => out_len,
    };
    let big = ring.lifted(out_len as u32)?;
    let xb: Vec<RingElement> = x.iter().map(|c| big.include_canonical(c)).collect();
    let gx = ghosts(&big, &xb, ghost_len);
    let hs: Vec<RingElement> = match op {
        GhostOp::Add => {
            let yb: Vec<RingElement> = y
                .unwrap()
                .iter()
                .map(|c| big.include_canonical(c))
                .collect();
            let gy = ghosts(&big, &yb, ghost_len);
            gx.iter().zip(&gy).map(|(a, b)| a.add(b)).collect()
        }
        GhostOp::Sub => {
            let yb: Vec<RingElement> = y
                .unwrap()
                .iter()
                .map(|c| big.include_canonical(c))
                .collect();
            let gy = ghosts(&big, &yb, ghost_len);
            gx.iter().zip(&gy).map(|(a, b)| a.sub(b)).collect()
        }
        GhostOp::Mul => {
            let yb: Vec<RingElement> = y
                .unwrap()
                .iter()
                .map(|c| big.include_canonical(c))
                .collect();
            let gy = ghosts(&big, &yb, ghost_len);
            gx.iter().zip(&gy).map(|(a, b)| a.mul(b)).collect()
        }
        GhostOp::Neg => gx.iter().map(|a| a.neg()).collect(),
        GhostOp::MulInt(k) => gx.iter().map(|a| a.mul_int(k)).collect(),
        GhostOp::Frobenius => gx[1..].to_vec(),
    };
    let zs = unghost(&big, &hs)?;
    Ok(zs.iter().map(|z| ring.reduce_canonical(z)).collect())
}

/// `k * 1` in W_n: all ghost components equal k.
pub fn from_int(ring: &Ring, k: i64, n: usize) -> Result<Vec<RingElement>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let big = ring.lifted(n as u32)?;
    let hs: Vec<RingElement> = (0..n).map(|_| big.from_int(k)).collect();
    let zs = unghost(&big, &hs)?;
    Ok(zs.iter().map(|z| ring.reduce_canonical(z)).collect())
}
