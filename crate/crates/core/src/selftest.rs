//! Seeded certification suites, one per acceptance criterion. Each suite
//! runs its exhaustive or sampled checks and reports pass/fail with a
//! short account of what was computed; the CLI exposes them as
//! `selftest <name>` and the acceptance tests run them all.

use crate::deform::{self, FiltrationLift};
use crate::display::{self, s_mat_identity, s_mat_zero, Display, Morphism};
use crate::error::{Error, Result};
use crate::frame::{truncated_witt_frame, witt_frame, Frame};
use crate::isogeny::{self};
use crate::mat::{self, Mat, WMat};
use crate::moduli;
use crate::ring::{Ring, RingElement};
use crate::rng::{random_element, random_witt, SplitMix64};
use crate::witt::{all_vectors, WittVector};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Debug)]
pub struct Outcome {
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
}

impl Outcome {
    fn pass(name: &'static str, details: String) -> Outcome {
        Outcome {
            name,
            passed: true,
            details,
        }
    }

    fn fail(name: &'static str, details: String) -> Outcome {
        Outcome {
            name,
            passed: false,
            details,
        }
    }
}

pub const SUITE_NAMES: &[&str] = &[
    "witt-ring",
    "lemma-homogeneous",
    "lemma-inhomogeneous",
    "det-functor",
    "p-torsionfree",
    "divide-invert",
    "extend-adjugate",
    "deformation",
    "moduli-counts",
    "lifting-isomorphism",
];

pub fn run_by_name(name: &str, seed: u64) -> Result<Outcome> {
    match name {
        "witt-ring" => witt_ring_certification(seed),
        "lemma-homogeneous" => lemma_homogeneous(seed),
        "lemma-inhomogeneous" => lemma_inhomogeneous(seed),
        "det-functor" => det_functor(seed),
        "p-torsionfree" => p_torsionfree(seed),
        "divide-invert" => divide_and_invert(seed),
        "extend-adjugate" => extend_adjugate(seed),
        "deformation" => deformation(seed),
        "moduli-counts" => moduli_counts(seed),
        "lifting-isomorphism" => lifting_isomorphism(seed),
        _ => Err(Error::UnsupportedRing(format!("unknown selftest {name}"))),
    }
}

pub fn run_all(seed: u64) -> Result<Vec<Outcome>> {
    SUITE_NAMES.iter().map(|n| run_by_name(n, seed)).collect()
}

// ---------- shared sample builders ----------

pub fn quotient_x4() -> Result<Ring> {
    Ring::new(crate::ring::RingDescriptor::PolynomialQuotient {
        base: alloc::boxed::Box::new(crate::ring::RingDescriptor::PrimeField { p: 2 }),
        vars: vec!["x".into()],
        rels: vec![crate::ring::Relation::MonomialZero(vec![("x".into(), 4)])],
    })
}

/// The supersingular reference display: antidiagonal structure matrix,
/// height 2, dimension 1 — nilpotent of order 1 over any char-p ring.
pub fn supersingular(frame: &Frame) -> Result<Display> {
    Display::from_int_entries(frame, &[&[0, 1], &[1, 0]], 1)
}

/// The Verschiebung-type height-one self-isogeny of the supersingular
/// display: `[[0, V(1)], [1, 0]]`.
pub fn verschiebung_isogeny(frame: &Frame) -> Result<Morphism> {
    let ring = frame.ring();
    let one_v = frame.fil_from_v(WittVector::one(ring, frame.fil_len()))?;
    Morphism::new(
        (1, 1),
        (1, 1),
        s_mat_zero(frame, 1, 1),
        Mat::from_fn(1, 1, |_, _| one_v.clone()),
        s_mat_identity(frame, 1),
        s_mat_zero(frame, 1, 1),
    )
}

/// Random morphism-shaped matrix with entries drawn from a coordinate
/// pool, resampled until its full matrix is invertible.
fn random_unit_twist(
    rng: &mut SplitMix64,
    frame: &Frame,
    shape: (usize, usize),
    pool: Option<&[RingElement]>,
) -> Result<Morphism> {
    let ring = frame.ring();
    let (d, c) = shape;
    let draw = |rng: &mut SplitMix64| -> RingElement {
        match pool {
            Some(p) => rng.pick(p).clone(),
            None => random_element(rng, ring),
        }
    };
    for _ in 0..200 {
        let mk_scalar = |rng: &mut SplitMix64| -> Result<crate::frame::Scalar> {
            let coords: Vec<RingElement> = (0..frame.scalar_len()).map(|_| draw(rng)).collect();
            frame.scalar(WittVector::new(ring.clone(), coords)?)
        };
        let a = {
            let mut rows = Vec::new();
            for _ in 0..d {
                let mut r = Vec::new();
                for _ in 0..d {
                    r.push(mk_scalar(rng)?);
                }
                rows.push(r);
            }
            Mat::from_rows(rows)?
        };
        let b = {
            let mut rows = Vec::new();
            for _ in 0..d {
                let mut r = Vec::new();
                for _ in 0..c {
                    let coords: Vec<RingElement> =
                        (0..frame.fil_len()).map(|_| draw(rng)).collect();
                    r.push(frame.fil_from_v(WittVector::new(ring.clone(), coords)?)?);
                }
                rows.push(r);
            }
            Mat::from_rows(rows)?
        };
        let cm = {
            let mut rows = Vec::new();
            for _ in 0..c {
                let mut r = Vec::new();
                for _ in 0..d {
                    r.push(mk_scalar(rng)?);
                }
                rows.push(r);
            }
            Mat::from_rows(rows)?
        };
        let dm = {
            let mut rows = Vec::new();
            for _ in 0..c {
                let mut r = Vec::new();
                for _ in 0..c {
                    r.push(mk_scalar(rng)?);
                }
                rows.push(r);
            }
            Mat::from_rows(rows)?
        };
        let h = Morphism::new(shape, shape, a, b, cm, dm)?;
        let det = display::det_morphism(frame, &h)?;
        if frame.s_is_unit(&det)? {
            return Ok(h);
        }
    }
    Err(Error::UnitInversionFailure)
}

/// Source re-coordinatization: `(M, U) -> (M ∘ h, H^{-1}·U·Phi(h))`,
/// preserving the structure equation against the fixed target.
fn twist_source(
    frame: &Frame,
    target_u: &Display,
    p_src: &Display,
    m: &Morphism,
    h: &Morphism,
) -> Result<(Display, Morphism)> {
    let ring = frame.ring();
    let len = frame.s_len();
    let h_full = h.full_s_matrix(frame)?;
    let h_inv = mat::w_invert(&h_full, ring, len)?;
    let u_new = mat::w_mul(
        &mat::w_mul(&h_inv, p_src.matrix(), ring, len)?,
        &display::phi(frame, h)?,
        ring,
        len,
    )?;
    let p_new = Display::new(frame.clone(), u_new, p_src.dim())?;
    let m_new = display::compose(frame, m, h)?;
    let _ = target_u;
    Ok((p_new, m_new))
}

/// Exact isogeny of height m onto the supersingular reference, with a
/// randomized source presentation; entries restricted to `pool` when
/// given (the rootable locus of imperfect rings).
pub fn sample_isogeny(
    rng: &mut SplitMix64,
    frame: &Frame,
    base: &Display,
    m: usize,
    pool: Option<&[RingElement]>,
) -> Result<(Display, Morphism)> {
    // seed of height m: V-isogeny powers and p-scalings
    let v_iso = verschiebung_isogeny(frame)?;
    let mut seed = Morphism::identity(base);
    let mut left = m;
    while left >= 2 {
        if rng.below(2) == 0 {
            seed = seed.mul_p(frame)?;
            left -= 2;
        } else {
            seed = display::compose(frame, &v_iso, &seed)?;
            left -= 1;
        }
    }
    if left == 1 {
        seed = display::compose(frame, &v_iso, &seed)?;
    }
    let h = random_unit_twist(rng, frame, base.shape(), pool)?;
    let (p_new, m_new) = twist_source(frame, base, base, &seed, &h)?;
    if !display::is_morphism(&m_new, &p_new, base)? {
        return Err(Error::DomainMismatch(
            "sampled isogeny failed verification".into(),
        ));
    }
    Ok((p_new, m_new))
}

/// Elements whose coordinates admit `depth` iterated Frobenius roots
/// (the sub-locus over which truncated data extends at a finite
/// perfection stage).
pub fn rootable_pool(ring: &Ring, depth: u32) -> Result<Vec<RingElement>> {
    let mut pool = Vec::new();
    for x in ring.elements()? {
        let mut cur = Some(x.clone());
        for _ in 0..depth {
            cur = match cur {
                Some(c) => ring.frobenius_root(&c)?,
                None => None,
            };
        }
        if cur.is_some() {
            pool.push(x);
        }
        if pool.len() >= 4096 {
            break;
        }
    }
    Ok(pool)
}

// ---------- criterion 1: Witt ring certification ----------

fn witt_ring_certification(seed: u64) -> Result<Outcome> {
    let name = "witt-ring";
    let mut rng = SplitMix64::new(seed);
    let mut checks = 0usize;

    // exhaustive ring axioms on W_2(F_2)
    let f2 = Ring::prime_field(2)?;
    let w2: Vec<WittVector> = all_vectors(&f2, 2)?.collect();
    for x in &w2 {
        for y in &w2 {
            if x.add(y)? != y.add(x)? || x.mul(y)? != y.mul(x)? {
                return Ok(Outcome::fail(
                    name,
                    "commutativity failed on W_2(F_2)".into(),
                ));
            }
            for z in &w2 {
                if x.add(y)?.add(z)? != x.add(&y.add(z)?)?
                    || x.mul(y)?.mul(z)? != x.mul(&y.mul(z)?)?
                    || x.mul(&y.add(z)?)? != x.mul(y)?.add(&x.mul(z)?)?
                {
                    return Ok(Outcome::fail(name, "ring axiom failed on W_2(F_2)".into()));
                }
                checks += 1;
            }
        }
    }

    let cases: Vec<(Ring, usize)> = vec![
        (Ring::finite_field(2, 2)?, 4),
        (Ring::prime_field(3)?, 3),
        (Ring::zmod(2, 2)?, 3),
        (quotient_x4()?, 3),
    ];
    for (ring, n) in &cases {
        let n = *n;
        let one = WittVector::one(ring, n);
        let zero = WittVector::zero(ring, n);
        for _ in 0..300 {
            let x = random_witt(&mut rng, ring, n);
            let y = random_witt(&mut rng, ring, n);
            let z = random_witt(&mut rng, ring, n);
            let ok = x.add(&y)? == y.add(&x)?
                && x.mul(&y)? == y.mul(&x)?
                && x.add(&y)?.add(&z)? == x.add(&y.add(&z)?)?
                && x.mul(&y)?.mul(&z)? == x.mul(&y.mul(&z)?)?
                && x.mul(&y.add(&z)?)? == x.mul(&y)?.add(&x.mul(&z)?)?
                && x.add(&zero)? == x
                && x.mul(&one)? == x
                && x.add(&x.neg()?)?.is_zero();
            if !ok {
                return Ok(Outcome::fail(
                    name,
                    format!("ring axiom failed over {:?}", ring.descriptor()),
                ));
            }
            // FV = p
            let xv = random_witt(&mut rng, ring, n);
            if xv.verschiebung().frobenius()? != xv.mul_p()? {
                return Ok(Outcome::fail(name, "FV = p failed".into()));
            }
            // V(x·F(y)) = V(x)·y
            let a = random_witt(&mut rng, ring, n.saturating_sub(1));
            let b = random_witt(&mut rng, ring, n);
            let lhs = a.mul(&b.frobenius()?)?.verschiebung();
            let rhs = a.verschiebung().mul(&b)?;
            if lhs != rhs {
                return Ok(Outcome::fail(name, "V(xF(y)) = V(x)y failed".into()));
            }
            // F([x]) = [x^p]
            let t = random_element(&mut rng, ring);
            if WittVector::teichmuller(&t, n).frobenius()?
                != WittVector::teichmuller(&t.pow(ring.prime()), n - 1)
            {
                return Ok(Outcome::fail(name, "F([x]) = [x^p] failed".into()));
            }
            // p·fdiv = F on the augmentation ideal
            let v = random_witt(&mut rng, ring, n - 1).verschiebung();
            if v.fdiv()?.mul_p()? != v.frobenius()? {
                return Ok(Outcome::fail(name, "p·Fdiv = F failed".into()));
            }
            checks += 5;
        }
    }

    // W_n(F_p) = Z/p^n exhaustively for p in {2, 3}, n <= 3
    for p in [2u64, 3] {
        let r = Ring::prime_field(p)?;
        for n in 1..=3usize {
            let pn = (p as i64).pow(n as u32);
            let mut seen = alloc::collections::BTreeSet::new();
            for k in 0..pn {
                let w = WittVector::from_int(&r, k, n)?;
                seen.insert(format!("{:?}", w.coords()));
                for l in 0..pn {
                    let wl = WittVector::from_int(&r, l, n)?;
                    if w.add(&wl)? != WittVector::from_int(&r, (k + l) % pn, n)?
                        || w.mul(&wl)? != WittVector::from_int(&r, (k * l) % pn, n)?
                    {
                        return Ok(Outcome::fail(name, "W_n(F_p) = Z/p^n failed".into()));
                    }
                    checks += 1;
                }
            }
            if seen.len() as i64 != pn {
                return Ok(Outcome::fail(name, "k -> k·1 not bijective".into()));
            }
        }
    }
    Ok(Outcome::pass(
        name,
        format!("{checks} identities checked, zero failures"),
    ))
}

// ---------- criterion 2: homogeneous equation ----------

fn lemma_homogeneous(seed: u64) -> Result<Outcome> {
    let name = "lemma-homogeneous";
    let mut rng = SplitMix64::new(seed);
    let n = 3usize;
    let e = 1usize;
    let mut total_solutions = 0usize;
    for ring in [Ring::prime_field(2)?, Ring::finite_field(2, 2)?] {
        for _ in 0..20 {
            // C with vanishing zeroth coordinate, so order e = 1 applies
            let cmat = Mat::from_fn(1, 1, |_, _| {
                random_witt(&mut rng, &ring, n + e - 1).verschiebung()
            });
            let bmat = Mat::from_fn(1, 1, |_, _| random_witt(&mut rng, &ring, n + e));
            // full-precision analogue: solutions at level n+e vanish at n
            let (trivial, count) =
                isogeny::homogeneous_trivial_to_level(&ring, n, &bmat, &cmat, e)?;
            if !trivial {
                return Ok(Outcome::fail(
                    name,
                    format!(
                        "nontrivial solution at level {n} over {:?}",
                        ring.descriptor()
                    ),
                ));
            }
            total_solutions += count;
            // truncated variant at level n: X[n-e] = 0 for every solution
            let bmat_n = bmat.try_map(|w| w.truncate(n))?;
            let cmat_n = cmat.try_map(|w| w.truncate(n))?;
            let sols = isogeny::homogeneous_solutions(&ring, n, &bmat_n, &cmat_n, e)?;
            for x in &sols {
                for w in x.entries() {
                    if !w.truncate(n - e)?.is_zero() {
                        return Ok(Outcome::fail(
                            name,
                            "truncated bound X[n-e] = 0 failed".into(),
                        ));
                    }
                }
            }
        }
    }
    Ok(Outcome::pass(
        name,
        format!("40 instances exhausted; padded-level solution sets of size {total_solutions} all vanish at level {n}"),
    ))
}

// ---------- criterion 3: inhomogeneous equation ----------

fn lemma_inhomogeneous(seed: u64) -> Result<Outcome> {
    let name = "lemma-inhomogeneous";
    let mut rng = SplitMix64::new(seed);
    let ring = Ring::finite_field(2, 2)?;
    let n = 6usize;
    let e = 1usize;
    let mut recovered = 0usize;
    for _ in 0..100 {
        let x = Mat::from_fn(1, 1, |_, _| random_witt(&mut rng, &ring, n));
        let bmat = Mat::from_fn(1, 1, |_, _| random_witt(&mut rng, &ring, n));
        let cmat = Mat::from_fn(1, 1, |_, _| {
            random_witt(&mut rng, &ring, n - 1).verschiebung()
        });
        // define A so that V(X) = F^{e+1}(B)·X·F^{e+1}(C) + A holds
        let bt = bmat.try_map(|w| w.frobenius_endo_pow((e + 1) as u32))?;
        let ct = cmat.try_map(|w| w.frobenius_endo_pow((e + 1) as u32))?;
        let vx = x.try_map(|w| Ok(w.truncate(n - 1)?.verschiebung()))?;
        let amat = mat::w_sub(
            &vx,
            &mat::w_mul(&mat::w_mul(&bt, &x, &ring, n)?, &ct, &ring, n)?,
        )?;
        let ymat = x.try_map(|w| w.frobenius())?;
        let witness = isogeny::nilpotence_witness(&cmat, e, &ring, n)?;
        let solved = isogeny::solve_inhomogeneous(&ring, &amat, &ymat, &bmat, &cmat, e, &witness)?;
        let avail = solved.at(0, 0).len();
        if solved.at(0, 0) != &x.at(0, 0).truncate(avail)? {
            return Ok(Outcome::fail(
                name,
                "forward-generated instance not recovered".into(),
            ));
        }
        recovered += 1;
    }
    let mut rejected = 0usize;
    for _ in 0..20 {
        let x = Mat::from_fn(1, 1, |_, _| random_witt(&mut rng, &ring, n));
        let bmat = Mat::from_fn(1, 1, |_, _| random_witt(&mut rng, &ring, n));
        let cmat = Mat::from_fn(1, 1, |_, _| {
            random_witt(&mut rng, &ring, n - 1).verschiebung()
        });
        let bt = bmat.try_map(|w| w.frobenius_endo_pow((e + 1) as u32))?;
        let ct = cmat.try_map(|w| w.frobenius_endo_pow((e + 1) as u32))?;
        let vx = x.try_map(|w| Ok(w.truncate(n - 1)?.verschiebung()))?;
        let mut amat = mat::w_sub(
            &vx,
            &mat::w_mul(&mat::w_mul(&bt, &x, &ring, n)?, &ct, &ring, n)?,
        )?;
        // corrupt the zeroth coordinate of A: the solvability condition
        // on the leading Witt components must reject it
        let g = ring.var("g")?;
        amat = mat::w_add(
            &amat,
            &Mat::from_fn(1, 1, |_, _| WittVector::teichmuller(&g, n)),
        )?;
        let ymat = x.try_map(|w| w.frobenius())?;
        let witness = isogeny::nilpotence_witness(&cmat, e, &ring, n)?;
        match isogeny::solve_inhomogeneous(&ring, &amat, &ymat, &bmat, &cmat, e, &witness) {
            Err(Error::ObstructionNonzero(_)) => rejected += 1,
            Ok(_) => return Ok(Outcome::fail(name, "corrupted instance accepted".into())),
            Err(e) => return Err(e),
        }
    }
    Ok(Outcome::pass(
        name,
        format!("{recovered}/100 round trips exact, {rejected}/20 corrupted instances rejected"),
    ))
}

// ---------- criterion 4: determinant functor ----------

fn det_functor(seed: u64) -> Result<Outcome> {
    let name = "det-functor";
    let mut rng = SplitMix64::new(seed);
    let ring = Ring::finite_field(2, 2)?;
    let mut checked = 0usize;

    let check = |frame: &Frame, m: &Morphism| -> Result<bool> {
        let det = display::det_morphism(frame, m)?;
        let lhs = frame.sigma(&det)?;
        let rhs = mat::w_det(&display::phi(frame, m)?, frame.ring(), frame.s_len())?;
        let min = lhs.len().min(rhs.len());
        Ok(lhs.truncate(min)? == rhs.truncate(min)?)
    };

    // working-precision and truncated frames over F_4
    for kind in 0..2 {
        let frame = if kind == 0 {
            witt_frame(&ring, 5)?
        } else {
            truncated_witt_frame(&ring, 4)?
        };
        let base = supersingular(&frame)?;
        for i in 0..100 {
            let (p_new, m) = sample_isogeny(&mut rng, &frame, &base, (i % 3) as usize, None)?;
            let _ = p_new;
            if !check(&frame, &m)? {
                return Ok(Outcome::fail(
                    name,
                    format!("twist identity failed (kind {kind})"),
                ));
            }
            checked += 1;
        }
    }

    // relative frame over the dual numbers of F_2
    let f2 = Ring::prime_field(2)?;
    let th = f2.square_zero_extension(1)?;
    let level = 3usize;
    let fr_a = truncated_witt_frame(&f2, level)?;
    let base_a = supersingular(&fr_a)?;
    let rel = crate::frame::relative_frame(&th, level)?;
    let ideal_elems = th.elements()?;
    for i in 0..100 {
        // random filtration lifts and a lifted morphism between them
        let y1 = FiltrationLift::new(
            &th,
            Mat::from_fn(1, 1, |_, _| rng.pick(&ideal_elems).clone()),
        )?;
        let y2 = FiltrationLift::new(
            &th,
            Mat::from_fn(1, 1, |_, _| rng.pick(&ideal_elems).clone()),
        )?;
        let pb = deform::lift_display(&base_a, &y1, &th)?;
        let qb = deform::lift_display(&base_a, &y2, &th)?;
        let f_a = Morphism::scalar(&base_a, if i % 2 == 0 { 2 } else { 4 })?;
        let lift = deform::lift_morphism_unique(&f_a, &pb, &qb, &th, 1)?;
        if !check(&lift.frame, &lift.morphism)? {
            return Ok(Outcome::fail(
                name,
                "twist identity failed (relative)".into(),
            ));
        }
        let _ = &rel;
        checked += 1;
    }
    Ok(Outcome::pass(
        name,
        format!("sigma(det M) = det(Phi M) on {checked} verified morphisms"),
    ))
}

// ---------- criterion 5: p-torsionfreeness ----------

fn p_torsionfree(_seed: u64) -> Result<Outcome> {
    let name = "p-torsionfree";
    let ring = Ring::prime_field(2)?;
    let level = 3usize;
    let fr = truncated_witt_frame(&ring, level)?;

    // all invertible nilpotent structure matrices at level 3
    let mut displays: Vec<Display> = Vec::new();
    let vecs: Vec<WittVector> = all_vectors(&ring, level)?.collect();
    let mut idx = [0usize; 4];
    'outer: loop {
        let u = Mat::from_fn(2, 2, |i, j| vecs[idx[i * 2 + j]].clone());
        if mat::w_det(&u, &ring, level)?.is_unit()? {
            let d = Display::new(fr.clone(), u, 1)?;
            if d.nilpotency_order(4)?.is_some() {
                displays.push(d);
            }
        }
        let mut c = 0;
        loop {
            if c == 4 {
                break 'outer;
            }
            idx[c] += 1;
            if idx[c] < vecs.len() {
                break;
            }
            idx[c] = 0;
            c += 1;
        }
    }

    // p-torsion morphism candidates: every block entry must be killed by
    // p, which pins all coordinates except the top one
    let torsion_scalars: Vec<crate::frame::Scalar> = (0..2u64)
        .map(|b| {
            let coords = vec![
                ring.zero(),
                ring.zero(),
                ring.from_int(b as i64),
                ring.zero(),
            ];
            fr.scalar(WittVector::new(ring.clone(), coords).unwrap())
        })
        .collect::<Result<Vec<_>>>()?;
    let torsion_fils: Vec<crate::frame::FilElt> = (0..2u64)
        .map(|b| {
            let coords = vec![ring.zero(), ring.zero(), ring.from_int(b as i64)];
            fr.fil_from_v(WittVector::new(ring.clone(), coords).unwrap())
        })
        .collect::<Result<Vec<_>>>()?;

    let sources: Vec<&Display> = displays
        .iter()
        .step_by(displays.len().max(1) / 8 + 1)
        .collect();
    let mut found_torsion = 0usize;
    let mut worst_margin = 0usize;
    for src in &sources {
        for dst in &displays {
            for a in 0..2usize {
                for b in 0..2usize {
                    for c in 0..2usize {
                        for d in 0..2usize {
                            if a + b + c + d == 0 {
                                continue;
                            }
                            let m = Morphism::new(
                                (1, 1),
                                (1, 1),
                                Mat::from_fn(1, 1, |_, _| torsion_scalars[a].clone()),
                                Mat::from_fn(1, 1, |_, _| torsion_fils[b].clone()),
                                Mat::from_fn(1, 1, |_, _| torsion_scalars[c].clone()),
                                Mat::from_fn(1, 1, |_, _| torsion_scalars[d].clone()),
                            )?;
                            if !m.mul_p(&fr)?.is_zero() {
                                return Ok(Outcome::fail(name, "candidate not p-torsion".into()));
                            }
                            if display::is_morphism(&m, src, dst)? {
                                found_torsion += 1;
                                // the truncated bound: f[n - margin] = 0
                                let mut margin = level;
                                for try_margin in 1..level {
                                    let tgt = truncated_witt_frame(&ring, level - try_margin)?;
                                    if m.truncate(&fr, &tgt)?.is_zero() {
                                        margin = try_margin;
                                        break;
                                    }
                                }
                                if margin >= level {
                                    return Ok(Outcome::fail(
                                        name,
                                        "nonzero p-torsion morphism survives all truncations"
                                            .into(),
                                    ));
                                }
                                worst_margin = worst_margin.max(margin);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(Outcome::pass(
        name,
        format!(
            "{} nilpotent displays; {} nonzero p-torsion truncated morphisms, all vanish after margin {} (full-precision torsion-freeness to level {})",
            displays.len(),
            found_torsion,
            worst_margin,
            level - worst_margin
        ),
    ))
}

// ---------- criterion 6: division by p and adjugate inversion ----------

fn divide_and_invert(seed: u64) -> Result<Outcome> {
    let name = "divide-invert";
    let mut rng = SplitMix64::new(seed);
    let ring = Ring::finite_field(2, 2)?;
    let prec = 9usize;
    let frame = witt_frame(&ring, prec)?;
    let base = supersingular(&frame)?;
    let mut divisions = 0usize;
    let mut inversions = 0usize;
    for i in 0..100 {
        let m_h = (i % 3) as usize;
        let (p_new, m) = sample_isogeny(&mut rng, &frame, &base, m_h, None)?;
        // divide p·M by p and recover M
        let pm = m.mul_p(&frame)?;
        let out = isogeny::divide_morphism_by_p(&frame, &pm, &p_new, &base)?;
        let m_cut = m.truncate(&frame, &out.frame)?;
        if !isogeny::morphism_eq_trunc(&out.frame, &out.morphism, &m_cut)? {
            return Ok(Outcome::fail(name, "divide(p·M) did not recover M".into()));
        }
        divisions += 1;
        // invert: composite equals p^m · identity
        let iso = isogeny::verify_isogeny(&frame, &m, &p_new, &base)?;
        if iso.height != m_h {
            return Ok(Outcome::fail(name, "sampled height drifted".into()));
        }
        let inv = isogeny::invert_isogeny(&frame, &iso, &p_new, &base)?;
        let comp = display::compose(&inv.frame, &inv.morphism, &m.truncate(&frame, &inv.frame)?)?;
        let pm_id = Morphism::identity(&inv.src).mul_p_pow(&inv.frame, m_h)?;
        if !isogeny::morphism_eq_trunc(&inv.frame, &comp, &pm_id)? {
            return Ok(Outcome::fail(name, "p^m round trip failed".into()));
        }
        inversions += 1;
    }
    // a unit is never divisible
    match isogeny::divide_morphism_by_p(&frame, &Morphism::identity(&base), &base, &base) {
        Err(Error::ZerothCoordinateObstruction(_)) => {}
        _ => return Ok(Outcome::fail(name, "identity reported divisible".into())),
    }
    Ok(Outcome::pass(
        name,
        format!("{divisions} exact divisions and {inversions} adjugate inversions verified"),
    ))
}

// ---------- criterion 7: extension of truncated isogenies ----------

fn extend_adjugate(seed: u64) -> Result<Outcome> {
    let name = "extend-adjugate";
    let mut rng = SplitMix64::new(seed);
    let mut extended = 0usize;

    // over F_4: unrestricted entries
    let f4 = Ring::finite_field(2, 2)?;
    for i in 0..30 {
        let m_h = i % 3;
        let n_lvl = m_h + 1 + (i % 2);
        extend_one(&mut rng, &f4, m_h, n_lvl, None, name)?;
        extended += 1;
    }
    // over the stage-2 perfection of F_2[x]/(x^4): entries from the
    // locus with enough Frobenius roots for the required divisions
    let (perf, _incl) = quotient_x4()?.perfection_stage(2)?;
    for i in 0..20 {
        let m_h = (i % 3) as usize;
        let n_lvl = m_h + 1;
        let pool = rootable_pool(&perf, (n_lvl + m_h) as u32)?;
        extend_one(&mut rng, &perf, m_h, n_lvl, Some(&pool), name)?;
        extended += 1;
    }

    // perturbing the input inside the valid family (a Verschiebung-power
    // junk term compatible with M through the adjugate) leaves the
    // output agreement-level truncation unchanged: the correction term
    // is divisible by p^n
    let m_h = 1usize;
    let n_lvl = 2usize;
    let level = n_lvl + m_h;
    let target_prec = level + 3;
    let wp_big = witt_frame(&f4, target_prec + m_h + 2)?;
    let u0 = supersingular(&wp_big)?;
    let frame_gen = witt_frame(&f4, level + m_h + 4)?;
    let base_gen = supersingular(&frame_gen)?;
    let (p_exact, m_exact) = sample_isogeny(&mut rng, &frame_gen, &base_gen, m_h, None)?;
    let fr_t = truncated_witt_frame(&f4, level)?;
    let p_t = Display::new(
        fr_t.clone(),
        p_exact.matrix().try_map(|w| w.truncate(level))?,
        p_exact.dim(),
    )?;
    let m_t = truncate_wp_to_tw(&frame_gen, &fr_t, &m_exact)?;
    let ext_clean = deform::extend_isogeny(&p_t, &m_t, &u0, target_prec)?;
    // junk direction: Delta U = V^n(adj(F^n(M)) · w), which keeps the
    // truncated structure equation because M · Delta U vanishes mod p^(n+m)
    let m_full = m_t.full_s_matrix(&fr_t)?;
    let m_twisted = m_full.try_map(|x| x.frobenius_endo_pow(n_lvl as u32))?;
    let adj = mat::w_adjugate(&m_twisted, &f4, level)?;
    let g = f4.var("g")?;
    let w_dir = Mat::from_fn(2, 2, |i, j| {
        if i == 0 && j == 0 {
            WittVector::teichmuller(&g, level)
        } else {
            WittVector::zero(&f4, level)
        }
    });
    let junk = mat::w_mul(&adj, &w_dir, &f4, level)?
        .try_map(|x| Ok(x.truncate(level - n_lvl)?.verschiebung_pow(n_lvl)))?;
    let u_corrupt = mat::w_add(p_t.matrix(), &junk)?;
    let p_c = Display::new(fr_t.clone(), u_corrupt, 1)?;
    let ext_corrupt = deform::extend_isogeny(&p_c, &m_t, &u0, target_prec)?;
    let a = ext_clean.display.truncate(n_lvl)?;
    let b = ext_corrupt.display.truncate(n_lvl)?;
    if a.matrix() != b.matrix() {
        return Ok(Outcome::fail(
            name,
            "perturbation leaked below the agreement level".into(),
        ));
    }
    // idempotence: re-extending already-extended data returns it
    let fr_back = truncated_witt_frame(&f4, level)?;
    let p_back = Display::new(
        fr_back.clone(),
        ext_clean.display.matrix().try_map(|w| w.truncate(level))?,
        1,
    )?;
    let m_back = truncate_wp_to_tw(&ext_clean.frame, &fr_back, &ext_clean.morphism)?;
    let ext_again = deform::extend_isogeny(&p_back, &m_back, &u0, target_prec)?;
    if ext_again.display.truncate(n_lvl)?.matrix() != ext_clean.display.truncate(n_lvl)?.matrix() {
        return Ok(Outcome::fail(
            name,
            "re-extension drifted below the agreement level".into(),
        ));
    }

    Ok(Outcome::pass(
        name,
        format!("{extended} truncated isogenies extended exactly; corruption confined above the agreement level"),
    ))
}

fn extend_one(
    rng: &mut SplitMix64,
    ring: &Ring,
    m_h: usize,
    n_lvl: usize,
    pool: Option<&[RingElement]>,
    name: &'static str,
) -> Result<()> {
    let level = n_lvl + m_h;
    let target_prec = level + 3;
    let wp_big = witt_frame(ring, target_prec + m_h + 2)?;
    let u0 = supersingular(&wp_big)?;
    // exact isogeny at high precision, then truncate to the input level
    let frame_gen = witt_frame(ring, level + m_h + 4)?;
    let base_gen = supersingular(&frame_gen)?;
    let (p_exact, m_exact) = sample_isogeny(rng, &frame_gen, &base_gen, m_h, pool)?;
    let fr_t = truncated_witt_frame(ring, level)?;
    let p_t = Display::new(
        fr_t.clone(),
        p_exact.matrix().try_map(|w| w.truncate(level))?,
        p_exact.dim(),
    )?;
    let m_t = truncate_wp_to_tw(&frame_gen, &fr_t, &m_exact)?;
    let ext = deform::extend_isogeny(&p_t, &m_t, &u0, target_prec)?;
    if ext.height != m_h {
        return Err(Error::DomainMismatch(format!("{name}: height drifted")));
    }
    // agreement below level - m
    let n_agree = level - m_h;
    if ext.display.matrix().try_map(|w| w.truncate(n_agree))?
        != p_t.matrix().try_map(|w| w.truncate(n_agree))?
    {
        return Err(Error::DomainMismatch(format!(
            "{name}: output does not agree with the input below the margin"
        )));
    }
    Ok(())
}

/// Reads a working-precision morphism as a truncated one (scalars gain
/// their class representative, the filtration part truncates).
pub fn truncate_wp_to_tw(wp: &Frame, tw: &Frame, m: &Morphism) -> Result<Morphism> {
    let level = tw.s_len();
    let to_scalar = |s: &crate::frame::Scalar| -> Result<crate::frame::Scalar> {
        let rep = Frame::scalar_rep(s);
        tw.scalar(rep.truncate(level.min(rep.len()))?.pad_zero(level + 1))
    };
    let _ = wp;
    Morphism::new(
        m.src_shape(),
        m.dst_shape(),
        m.a.try_map(|s| to_scalar(s))?,
        m.b.try_map(|f| {
            let v = f.v_part();
            tw.fil_from_v(v.truncate(level.min(v.len()))?.pad_zero(level))
        })?,
        m.c.try_map(|s| to_scalar(s))?,
        m.d.try_map(|s| to_scalar(s))?,
    )
}

// ---------- criterion 8: deformation theory ----------

fn deformation(seed: u64) -> Result<Outcome> {
    let name = "deformation";
    let mut rng = SplitMix64::new(seed);
    let mut tangents = 0usize;

    // tangent counts k^(d·c) for all h <= 3 over F_2 and F_3
    for p in [2u64, 3] {
        let k = Ring::prime_field(p)?;
        for h in 1..=3usize {
            for d in 0..=h {
                let fr = truncated_witt_frame(&k, 2)?;
                // cyclic permutation matrix is always invertible
                let u = Mat::from_fn(h, h, |i, j| {
                    if (i + 1) % h == j || (h == 1 && i == j) {
                        WittVector::one(&k, fr.s_len())
                    } else {
                        WittVector::zero(&k, fr.s_len())
                    }
                });
                let disp = Display::new(fr.clone(), u, d)?;
                let ts = deform::tangent_space(&disp)?;
                let expect = (p as usize).pow((d * (h - d)) as u32);
                if ts.dimension != d * (h - d) || ts.lifts.len() != expect {
                    return Ok(Outcome::fail(
                        name,
                        format!("tangent count mismatch at p={p}, h={h}, d={d}"),
                    ));
                }
                tangents += ts.lifts.len();
            }
        }
    }

    // 2-Cartesian, executable form: every lift of U_A over the dual
    // numbers is relatively isomorphic (over the identity downstairs) to
    // exactly one filtration-lift display
    let f2 = Ring::prime_field(2)?;
    let fr = truncated_witt_frame(&f2, 2)?;
    let p_a = supersingular(&fr)?;
    let ts = deform::tangent_space(&p_a)?;
    let th = &ts.thickening;
    let b = &th.ambient;
    let ideal_elems = th.elements()?;
    let mut matched = 0usize;
    let sect_u: WMat = p_a.matrix().try_map(|w| w.map_ring(&th.sect))?;
    let deltas: Vec<Vec<RingElement>> = {
        // all kernel-valued coordinate perturbations of the 2x2 matrix at
        // both levels: 8 slots over a kernel of size 2
        let slots = 2 * 2 * 2;
        let mut out = Vec::new();
        let mut idx = vec![0usize; slots];
        'odo: loop {
            out.push(idx.iter().map(|&i| ideal_elems[i].clone()).collect());
            let mut c = 0;
            loop {
                if c == slots {
                    break 'odo;
                }
                idx[c] += 1;
                if idx[c] < ideal_elems.len() {
                    break;
                }
                idx[c] = 0;
                c += 1;
            }
        }
        out
    };
    for delta in &deltas {
        let v = Mat::from_fn(2, 2, |i, j| {
            let mut coords = sect_u.at(i, j).coords().to_vec();
            for (lvl, co) in coords.iter_mut().enumerate() {
                *co = co.add(&delta[(i * 2 + j) * 2 + lvl]);
            }
            WittVector::new(b.clone(), coords).unwrap()
        });
        let vd = Display::new(fr_over(b, 2)?, v, 1)?;
        let id_a = Morphism::identity(&p_a);
        let mut hits = 0usize;
        for (_, lift) in &ts.lifts {
            let out = deform::lift_morphism_unique(&id_a, &vd, lift, th, 1)?;
            if out.obstruction.entries().all(|x| x.is_zero()) {
                hits += 1;
            }
        }
        if hits != 1 {
            return Ok(Outcome::fail(
                name,
                format!("a lift matched {hits} filtration classes instead of exactly 1"),
            ));
        }
        matched += 1;
    }

    // unique solvability of sampled morphism-lift systems
    let mut solves = 0usize;
    for i in 0..40 {
        let y1 = FiltrationLift::new(
            th,
            Mat::from_fn(1, 1, |_, _| rng.pick(&ideal_elems).clone()),
        )?;
        let y2 = FiltrationLift::new(
            th,
            Mat::from_fn(1, 1, |_, _| rng.pick(&ideal_elems).clone()),
        )?;
        let pb = deform::lift_display(&p_a, &y1, th)?;
        let qb = deform::lift_display(&p_a, &y2, th)?;
        let f_a = Morphism::scalar(&p_a, 2 * ((i % 2) + 1) as i64)?;
        let lift = deform::lift_morphism_unique(&f_a, &pb, &qb, th, 1)?;
        if lift.margin > 1 {
            return Ok(Outcome::fail(name, "lift needed margin above 1".into()));
        }
        solves += 1;
    }
    Ok(Outcome::pass(
        name,
        format!("{tangents} tangent lifts counted, {matched} exhaustive lifts matched bijectively, {solves} lift systems uniquely solvable"),
    ))
}

fn fr_over(ring: &Ring, level: usize) -> Result<Frame> {
    truncated_witt_frame(ring, level)
}

// ---------- criterion 9: moduli counts ----------

fn moduli_counts(_seed: u64) -> Result<Outcome> {
    let name = "moduli-counts";
    // single point at colength zero over both fields
    for ring in [Ring::prime_field(2)?, Ring::finite_field(2, 2)?] {
        let frame = witt_frame(&ring, 6)?;
        let base = supersingular(&frame)?;
        let pts = moduli::enumerate_points(&base, 0, 0)?;
        if pts.len() != 1 {
            return Ok(Outcome::fail(
                name,
                format!("colength-zero stratum has {} points", pts.len()),
            ));
        }
    }
    // lattice counts against the display oracle for r <= 1, s <= 2
    let f2 = Ring::prime_field(2)?;
    let frame = witt_frame(&f2, 10)?;
    let base = supersingular(&frame)?;
    let mut summary = String::new();
    for s in 0..=2usize {
        let oracle = moduli::oracle_enumerate_displays(&base, s, 3)?;
        for r in 0..=1usize {
            let pts = moduli::enumerate_points(&base, r, s)?;
            // disjointness: heights match the stratum
            for pt in &pts {
                if pt.s != s {
                    return Ok(Outcome::fail(name, "stratum height drifted".into()));
                }
            }
            if pts.len() != oracle {
                return Ok(Outcome::fail(
                    name,
                    format!("(r={r}, s={s}): lattice {} vs oracle {oracle}", pts.len()),
                ));
            }
        }
        summary.push_str(&format!("s={s}:{oracle} "));
    }
    // Galois-fixed recount: rational points inside the F_4 enumeration
    let f4 = Ring::finite_field(2, 2)?;
    let frame4 = witt_frame(&f4, 10)?;
    let base4 = supersingular(&frame4)?;
    for s in 0..=1usize {
        let over_f2 = moduli::enumerate_points(&base, 0, s)?.len();
        let pts4 = moduli::enumerate_points(&base4, 0, s)?;
        let fixed = pts4
            .iter()
            .filter(|pt| {
                pt.lattice.entries().all(|w| {
                    w.coords().iter().all(|c| {
                        // fixed under the Frobenius twist of F_4
                        c.pow(2) == *c
                    })
                })
            })
            .count();
        if fixed != over_f2 {
            return Ok(Outcome::fail(
                name,
                format!("Galois-fixed recount {fixed} != F_2 count {over_f2} at s={s}"),
            ));
        }
    }
    Ok(Outcome::pass(
        name,
        format!("counts agree with the oracle and are r-independent: {summary}; Galois recount consistent"),
    ))
}

// ---------- criterion 10: lifting isomorphisms ----------

fn lifting_isomorphism(seed: u64) -> Result<Outcome> {
    let name = "lifting-isomorphism";
    let mut rng = SplitMix64::new(seed);
    let ring = Ring::finite_field(2, 2)?;
    let prec = 14usize;
    let frame = witt_frame(&ring, prec)?;
    let base = supersingular(&frame)?;
    let mut recovered = 0usize;
    for i in 0..50 {
        let m_h = 1 + (i % 2) as usize;
        let (p_src, g_m) = sample_isogeny(&mut rng, &frame, &base, m_h, None)?;
        // g' := g ∘ h for a unit twist h: the solution must invert h
        let h = random_unit_twist(&mut rng, &frame, p_src.shape(), None)?;
        let (q_src, gp_m) = twist_source(&frame, &base, &p_src, &g_m, &h)?;
        let g = isogeny::verify_isogeny(&frame, &g_m, &p_src, &base)?;
        let gp = isogeny::verify_isogeny(&frame, &gp_m, &q_src, &base)?;
        // solve for f: q_src -> p_src with g ∘ f = g'
        let f = deform::solve_lifting_isomorphism(&frame, &gp, &q_src, &g, &p_src, &base)?;
        // f must invert h: f ∘ h-as-morphism = identity is checked
        // through the defining composition property instead (h is a
        // morphism q_src -> p_src only after re-coordinatization), so
        // verify g ∘ f = g' once more at the output precision
        let g_cut = g.morphism.truncate(&frame, &f.frame)?;
        let comp = display::compose(&f.frame, &g_cut, &f.morphism)?;
        let gp_cut = gp.morphism.truncate(&frame, &f.frame)?;
        if !isogeny::morphism_eq_trunc(&f.frame, &comp, &gp_cut)? {
            return Ok(Outcome::fail(
                name,
                "recovered map does not solve the square".into(),
            ));
        }
        recovered += 1;
    }
    // identity case
    {
        let m = Morphism::scalar(&base, 2)?;
        let g = isogeny::verify_isogeny(&frame, &m, &base, &base)?;
        let f = deform::solve_lifting_isomorphism(&frame, &g, &base, &g, &base, &base)?;
        if !isogeny::morphism_eq_trunc(&f.frame, &f.morphism, &Morphism::identity(&f.src))? {
            return Ok(Outcome::fail(
                name,
                "g = g' did not give the identity".into(),
            ));
        }
    }

    // engineered non-isomorphic pairs: distinct tangent deformations
    // over square-zero thickenings with p-multiplied isogenies. The
    // division source stays the zero deformation (its inverse structure
    // blocks vanish at the zeroth coordinate), variation lives on the
    // target side: tangent direction and Teichmüller automorphisms.
    let f2 = Ring::prime_field(2)?;
    let lvl = 16usize;
    let lvl_out = lvl - 1;
    let fr_a = truncated_witt_frame(&f2, lvl)?;
    let base_a = supersingular(&fr_a)?;
    let mut rejected = 0usize;
    let mut case = 0usize;
    for rank in [1u32, 2] {
        let th = f2.square_zero_extension(rank)?;
        let b = &th.ambient;
        let wp_out = witt_frame(b, lvl_out)?;
        let base_b = supersingular(&wp_out)?;
        // sigma-fixed unit scalars give automorphisms of the base
        let scalar_auts: [i64; 5] = [1, 3, 5, 7, 9];
        let id_a = Morphism::identity(&base_a);
        let reference = lift_of_base(&base_a, &th)?;
        let y_zero = FiltrationLift::zero(&th, 1, 1);
        let p0 = deform::lift_display(&base_a, &y_zero, &th)?;
        let l0 = deform::lift_morphism_unique(&id_a, &p0, &reference, &th, 1)?;
        let to_wp = |m: &Morphism| -> Result<Morphism> {
            Morphism::new(
                m.src_shape(),
                m.dst_shape(),
                m.a.try_map(|sc| wp_out.scalar(Frame::scalar_rep(sc).truncate(lvl_out)?))?,
                m.b.try_map(|f| {
                    let v = f.v_part();
                    wp_out.fil_from_v(v.truncate(lvl_out.min(v.len()))?)
                })?,
                m.c.try_map(|sc| wp_out.scalar(Frame::scalar_rep(sc).truncate(lvl_out)?))?,
                m.d.try_map(|sc| wp_out.scalar(Frame::scalar_rep(sc).truncate(lvl_out)?))?,
            )
        };
        let g0_m = to_wp(&l0.morphism.mul_p(&l0.frame)?)?;
        let p0_wp = Display::new(
            wp_out.clone(),
            p0.matrix().try_map(|w| w.truncate(lvl_out))?,
            1,
        )?;
        // nonzero tangent directions
        let nonzero_dirs: Vec<RingElement> = th
            .elements()?
            .into_iter()
            .filter(|x| !x.is_zero())
            .collect();
        for dir in &nonzero_dirs {
            let y = FiltrationLift::new(&th, Mat::from_fn(1, 1, |_, _| dir.clone()))?;
            let p1 = deform::lift_display(&base_a, &y, &th)?;
            let l1 = deform::lift_morphism_unique(&id_a, &p1, &reference, &th, 1)?;
            let g1_m = to_wp(&l1.morphism.mul_p(&l1.frame)?)?;
            let p1_wp = Display::new(
                wp_out.clone(),
                p1.matrix().try_map(|w| w.truncate(lvl_out))?,
                1,
            )?;
            for t in &scalar_auts {
                if case >= 20 {
                    break;
                }
                let aut = Morphism::scalar(&base_b, *t)?;
                if !display::is_morphism(&aut, &base_b, &base_b)? {
                    return Ok(Outcome::fail(name, "automorphism family broke".into()));
                }
                let g1_tw = display::compose(&wp_out, &aut, &g1_m)?;
                let g0 = isogeny::verify_isogeny(&wp_out, &g0_m, &p0_wp, &base_b)?;
                let g1 = isogeny::verify_isogeny(&wp_out, &g1_tw, &p1_wp, &base_b)?;
                match deform::solve_lifting_isomorphism(&wp_out, &g0, &p0_wp, &g1, &p1_wp, &base_b)
                {
                    Err(Error::ObstructionNonzero(_)) => {
                        rejected += 1;
                        case += 1;
                    }
                    Ok(_) => {
                        return Ok(Outcome::fail(
                            name,
                            "non-isomorphic tangent deformations accepted".into(),
                        ))
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(Outcome::pass(
        name,
        format!("{recovered}/50 unit twists recovered, identity case exact, {rejected}/{case} engineered pairs rejected"),
    ))
}

/// The reference display lifted to B along the section (zero filtration
/// twist).
fn lift_of_base(base_a: &Display, th: &crate::ring::SquareZeroIdeal) -> Result<Display> {
    let (d, c) = base_a.shape();
    deform::lift_display(base_a, &FiltrationLift::zero(th, d, c), th)
}
