//! Finitely presented commutative rings annihilated by a prime power.
//!
//! Supported classes: prime fields, finite fields, `Z/p^a`, polynomial
//! quotients by monomial or binomial relations, and square-zero
//! extensions. Elements are kept in canonical form: coefficients reduced
//! mod `p^a` and monomials reduced by a terminating, confluence-checked
//! rewrite system. Every ring here is finite, local, and free as a
//! `Z/p^a`-module on its irreducible monomials; several operations
//! (p-torsion, Frobenius roots, the Witt engine) rely on that freeness.

pub mod maps;
pub mod poly;

pub use maps::RingMap;
pub use poly::{Exp, Monomial, Poly};

use crate::error::{Error, Result};
use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

/// Named monomial as it appears in a relation, e.g. `[("x", 4)]` for `x^4`.
pub type NamedMonomial = Vec<(String, Exp)>;

/// A defining relation of a polynomial quotient.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Relation {
    /// `lhs = 0`
    MonomialZero(NamedMonomial),
    /// `lhs = coeff * rhs`, with `lhs` strictly larger in degree-lex order
    Binomial {
        lhs: NamedMonomial,
        coeff: i64,
        rhs: NamedMonomial,
    },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RingDescriptor {
    PrimeField {
        p: u64,
    },
    FiniteField {
        p: u64,
        k: u32,
    },
    IntegersModPPower {
        p: u64,
        a: u32,
    },
    PolynomialQuotient {
        base: Box<RingDescriptor>,
        vars: Vec<String>,
        rels: Vec<Relation>,
    },
    SquareZeroExtension {
        base: Box<RingDescriptor>,
        rank: u32,
    },
    /// Internal: same presentation with the coefficient modulus raised to
    /// `p^{a+pad}`. The Witt engine computes exact divisions here.
    Lifted {
        of: Box<RingDescriptor>,
        pad: u32,
    },
}

/// A rewrite rule `lhs -> rhs` with `rhs` strictly smaller in deg-lex.
#[derive(Clone, Debug)]
pub struct Rule {
    pub lhs: Monomial,
    pub rhs: Poly,
}

#[derive(Debug)]
pub struct RingData {
    desc: RingDescriptor,
    p: u64,
    a: u32,
    modulus: u64,
    vars: Vec<String>,
    rules: Vec<Rule>,
    /// Index of the finite-field generator among `vars`, if any.
    field_var: Option<usize>,
    /// Degree of the residue field over F_p.
    field_deg: u32,
    /// Irreducible monomials; `None` when the cap was exceeded.
    basis: Option<Vec<Monomial>>,
    /// True when every non-field variable is nilpotent (so the ring is
    /// local with residue field `F_{p^field_deg}`).
    local: bool,
    /// All rules except the field rule involve only nilpotent variables.
    structured_roots: bool,
    /// Residue field, precomputed for local non-field rings.
    residue: Option<Ring>,
}

const BASIS_CAP: usize = 1 << 14;
const NILP_CAP: u32 = 1 << 12;

/// Shared, immutable handle to a constructed ring.
///
/// ```
/// use wittcalc_core::ring::Ring;
///
/// let f4 = Ring::finite_field(2, 2)?;
/// let g = f4.var("g")?;
/// // the generator satisfies g^2 = g + 1
/// assert_eq!(g.mul(&g), g.add(&f4.one()));
/// // Frobenius roots invert squaring on a perfect field
/// let r = f4.frobenius_root(&g)?.unwrap();
/// assert_eq!(r.pow(2), g);
/// # Ok::<(), wittcalc_core::Error>(())
/// ```
#[derive(Clone, Debug)]
pub struct Ring(Arc<RingData>);

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.desc == other.0.desc
    }
}
impl Eq for Ring {}

/// An element in canonical form.
#[derive(Clone, Debug)]
pub struct RingElement {
    ring: Ring,
    poly: Poly,
}

impl PartialEq for RingElement {
    fn eq(&self, other: &Self) -> bool {
        assert!(
            self.ring == other.ring,
            "elements of different rings compared"
        );
        self.poly == other.poly
    }
}
impl Eq for RingElement {}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn checked_prime_power(p: u64, a: u32) -> Result<u64> {
    let mut m: u64 = 1;
    for _ in 0..a {
        m = m.checked_mul(p).ok_or(Error::Overflow)?;
        if m >= (1u64 << 62) {
            return Err(Error::Overflow);
        }
    }
    Ok(m)
}

// Dense univariate arithmetic over F_p, only used to find field minimal
// polynomials at construction time.
mod fppoly {
    use super::poly::{mulm, powm};
    use alloc::vec;
    use alloc::vec::Vec;

    pub fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn mul_mod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
        let mut prod = vec![0u64; a.len() + b.len()];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + mulm(ai, bj, p)) % p;
            }
        }
        rem(&mut prod, f, p);
        prod
    }

    /// prod mod f, f monic
    pub fn rem(v: &mut Vec<u64>, f: &[u64], p: u64) {
        let df = f.len() - 1;
        while v.len() > df {
            let lead = *v.last().unwrap();
            let dv = v.len() - 1;
            if lead != 0 {
                for i in 0..df {
                    let t = mulm(lead, f[i], p);
                    v[dv - df + i] = (v[dv - df + i] + p - t % p) % p;
                }
            }
            v.pop();
        }
        trim(v);
    }

    /// x^(p^e) mod f
    pub fn frob_power(f: &[u64], p: u64, e: u32) -> Vec<u64> {
        let mut x = vec![0u64, 1];
        rem(&mut x, f, p);
        for _ in 0..e {
            x = pol_pow(&x, p, f, p);
        }
        x
    }

    pub fn pol_pow(a: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(&acc, &base, f, p);
            }
            base = mul_mod(&base, &base, f, p);
            e >>= 1;
        }
        acc
    }

    pub fn gcd(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            // a mod b with b made monic
            let lead = *b.last().unwrap();
            let inv = powm(lead, p - 2, p);
            let bm: Vec<u64> = b.iter().map(|&c| mulm(c, inv, p)).collect();
            rem(&mut a, &bm, p);
            core::mem::swap(&mut a, &mut b);
        }
        trim(&mut a);
        a
    }

    pub fn is_irreducible(f: &[u64], p: u64, k: u32) -> bool {
        // x^(p^k) == x mod f, and gcd(x^(p^(k/l)) - x, f) = 1 for prime l | k
        let xq = frob_power(f, p, k);
        let mut diff = xq.clone();
        while diff.len() < 2 {
            diff.push(0);
        }
        diff[1] = (diff[1] + p - 1) % p;
        trim(&mut diff);
        if !diff.is_empty() {
            return false;
        }
        let mut m = k;
        let mut l = 2;
        let mut primes = Vec::new();
        while m > 1 {
            if m.is_multiple_of(l) {
                primes.push(l);
                while m.is_multiple_of(l) {
                    m /= l;
                }
            }
            l += 1;
        }
        for l in primes {
            let xe = frob_power(f, p, k / l);
            let mut diff = xe.clone();
            while diff.len() < 2 {
                diff.push(0);
            }
            diff[1] = (diff[1] + p - 1) % p;
            trim(&mut diff);
            let g = gcd(diff, f.to_vec(), p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }

    /// The minimal polynomial used for `F_{p^k}`: the monic irreducible of
    /// degree k whose tail, read as a base-p number, is smallest.
    pub fn minimal_polynomial(p: u64, k: u32) -> Vec<u64> {
        let mut tail = vec![0u64; k as usize];
        loop {
            let mut f = tail.clone();
            f.push(1);
            if is_irreducible(&f, p, k) {
                return f;
            }
            // increment tail as a little-endian base-p counter
            let mut i = 0;
            loop {
                tail[i] += 1;
                if tail[i] < p {
                    break;
                }
                tail[i] = 0;
                i += 1;
                assert!(i < k as usize, "no irreducible polynomial found");
            }
        }
    }
}

fn resolve_named(m: &NamedMonomial, vars: &[String]) -> Result<Monomial> {
    let mut out = Monomial::one(vars.len());
    for (name, e) in m {
        let idx = vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::InconsistentRelations(format!("unknown variable {name}")))?;
        out.0[idx] = out.0[idx].checked_add(*e).ok_or(Error::Overflow)?;
    }
    Ok(out)
}

impl RingData {
    fn compile(desc: &RingDescriptor) -> Result<RingData> {
        match desc {
            RingDescriptor::PrimeField { p } => {
                if !is_prime(*p) {
                    return Err(Error::NonPrimeModulus(*p));
                }
                Ok(RingData {
                    desc: desc.clone(),
                    p: *p,
                    a: 1,
                    modulus: *p,
                    vars: vec![],
                    rules: vec![],
                    field_var: None,
                    field_deg: 1,
                    basis: Some(vec![Monomial::one(0)]),
                    local: true,
                    structured_roots: true,
                    residue: None,
                })
            }
            RingDescriptor::FiniteField { p, k } => {
                if !is_prime(*p) {
                    return Err(Error::NonPrimeModulus(*p));
                }
                if *k == 0 {
                    return Err(Error::UnsupportedRing("field degree 0".into()));
                }
                if *k == 1 {
                    let mut d = Self::compile(&RingDescriptor::PrimeField { p: *p })?;
                    d.desc = desc.clone();
                    return Ok(d);
                }
                let f = fppoly::minimal_polynomial(*p, *k);
                // rule: g^k -> -(tail)
                let mut rhs = Poly::zero();
                for (i, &c) in f.iter().enumerate().take(*k as usize) {
                    if c != 0 {
                        rhs.add_term(Monomial(vec![i as Exp]), *p - c, *p);
                    }
                }
                let mut data = RingData {
                    desc: desc.clone(),
                    p: *p,
                    a: 1,
                    modulus: *p,
                    vars: vec!["g".into()],
                    rules: vec![Rule {
                        lhs: Monomial(vec![*k as Exp]),
                        rhs,
                    }],
                    field_var: Some(0),
                    field_deg: *k,
                    basis: None,
                    local: true,
                    structured_roots: true,
                    residue: None,
                };
                data.basis = data.compute_basis();
                Ok(data)
            }
            RingDescriptor::IntegersModPPower { p, a } => {
                if !is_prime(*p) {
                    return Err(Error::NonPrimeModulus(*p));
                }
                if *a == 0 {
                    return Err(Error::UnsupportedRing("exponent a = 0".into()));
                }
                let mut data = RingData {
                    desc: desc.clone(),
                    p: *p,
                    a: *a,
                    modulus: checked_prime_power(*p, *a)?,
                    vars: vec![],
                    rules: vec![],
                    field_var: None,
                    field_deg: 1,
                    basis: Some(vec![Monomial::one(0)]),
                    local: true,
                    structured_roots: true,
                    residue: None,
                };
                data.build_residue()?;
                Ok(data)
            }
            RingDescriptor::PolynomialQuotient { base, vars, rels } => {
                let base_data = Self::compile(base)?;
                match **base {
                    RingDescriptor::PrimeField { .. }
                    | RingDescriptor::FiniteField { .. }
                    | RingDescriptor::IntegersModPPower { .. } => {}
                    _ => {
                        return Err(Error::UnsupportedRing(
                            "polynomial quotients must have a scalar base".into(),
                        ))
                    }
                }
                if vars.is_empty() {
                    return Err(Error::UnsupportedRing("quotient without variables".into()));
                }
                let mut all_vars = base_data.vars.clone();
                for v in vars {
                    if all_vars.contains(v) {
                        return Err(Error::InconsistentRelations(format!(
                            "duplicate variable {v}"
                        )));
                    }
                    all_vars.push(v.clone());
                }
                let modulus = base_data.modulus;
                let mut rules = base_data.rules.clone();
                for r in &mut rules {
                    r.lhs.0.resize(all_vars.len(), 0);
                    r.rhs = Poly {
                        terms: r
                            .rhs
                            .terms
                            .iter()
                            .map(|(m, &c)| {
                                let mut m2 = m.clone();
                                m2.0.resize(all_vars.len(), 0);
                                (m2, c)
                            })
                            .collect(),
                    };
                }
                for rel in rels {
                    let rule = match rel {
                        Relation::MonomialZero(m) => Rule {
                            lhs: resolve_named(m, &all_vars)?,
                            rhs: Poly::zero(),
                        },
                        Relation::Binomial { lhs, coeff, rhs } => {
                            let l = resolve_named(lhs, &all_vars)?;
                            let r = resolve_named(rhs, &all_vars)?;
                            if r >= l {
                                return Err(Error::InconsistentRelations(
                                    "binomial right side must be strictly smaller".into(),
                                ));
                            }
                            let c = coeff.rem_euclid(modulus as i64) as u64;
                            Rule {
                                lhs: l,
                                rhs: Poly::monomial(r, c, modulus),
                            }
                        }
                    };
                    if rule.lhs.is_one() {
                        return Err(Error::InconsistentRelations("relation forces 1 = 0".into()));
                    }
                    rules.push(rule);
                }
                let mut data = RingData {
                    desc: desc.clone(),
                    p: base_data.p,
                    a: base_data.a,
                    modulus,
                    vars: all_vars,
                    rules,
                    field_var: base_data.field_var,
                    field_deg: base_data.field_deg,
                    basis: None,
                    local: false,
                    structured_roots: false,
                    residue: None,
                };
                data.check_confluence()?;
                data.basis = data.compute_basis();
                data.classify();
                data.build_residue()?;
                Ok(data)
            }
            RingDescriptor::SquareZeroExtension { base, rank } => {
                if *rank == 0 {
                    return Err(Error::UnsupportedRing("square-zero rank 0".into()));
                }
                let base_data = Self::compile(base)?;
                if matches!(**base, RingDescriptor::SquareZeroExtension { .. })
                    || matches!(**base, RingDescriptor::Lifted { .. })
                {
                    return Err(Error::UnsupportedRing(
                        "nested square-zero extensions".into(),
                    ));
                }
                let mut all_vars = base_data.vars.clone();
                let eps: Vec<String> = if *rank == 1 {
                    vec!["e".into()]
                } else {
                    (1..=*rank).map(|i| format!("e{i}")).collect()
                };
                for v in &eps {
                    if all_vars.contains(v) {
                        return Err(Error::InconsistentRelations(format!(
                            "variable {v} clashes with the square-zero generators"
                        )));
                    }
                }
                let off = all_vars.len();
                all_vars.extend(eps.iter().cloned());
                let mut rules = base_data.rules.clone();
                for r in &mut rules {
                    r.lhs.0.resize(all_vars.len(), 0);
                    r.rhs = Poly {
                        terms: r
                            .rhs
                            .terms
                            .iter()
                            .map(|(m, &c)| {
                                let mut m2 = m.clone();
                                m2.0.resize(all_vars.len(), 0);
                                (m2, c)
                            })
                            .collect(),
                    };
                }
                for i in 0..*rank as usize {
                    for j in i..*rank as usize {
                        let mut m = Monomial::one(all_vars.len());
                        m.0[off + i] += 1;
                        m.0[off + j] += 1;
                        rules.push(Rule {
                            lhs: m,
                            rhs: Poly::zero(),
                        });
                    }
                }
                let mut data = RingData {
                    desc: desc.clone(),
                    p: base_data.p,
                    a: base_data.a,
                    modulus: base_data.modulus,
                    vars: all_vars,
                    rules,
                    field_var: base_data.field_var,
                    field_deg: base_data.field_deg,
                    basis: None,
                    local: false,
                    structured_roots: false,
                    residue: None,
                };
                data.check_confluence()?;
                data.basis = data.compute_basis();
                data.classify();
                data.build_residue()?;
                Ok(data)
            }
            RingDescriptor::Lifted { of, pad } => {
                let mut data = Self::compile(of)?;
                data.a += *pad;
                data.modulus = checked_prime_power(data.p, data.a)?;
                data.desc = desc.clone();
                // rules carry coefficients below the old modulus; they stay valid
                data.build_residue()?;
                Ok(data)
            }
        }
    }

    fn normalize(&self, mut poly: Poly) -> Poly {
        'outer: loop {
            // scan from the largest monomial; rewriting strictly decreases
            for (m, &c) in poly.terms.iter().rev() {
                for rule in &self.rules {
                    if rule.lhs.divides(m) {
                        let rest = rule.lhs.div_into(m);
                        let m = m.clone();
                        poly.terms.remove(&m);
                        let repl = rule.rhs.mul_monomial(&rest).scale_coeff(c, self.modulus);
                        poly = poly.add(&repl, self.modulus);
                        continue 'outer;
                    }
                }
            }
            return poly;
        }
    }

    fn is_reducible(&self, m: &Monomial) -> bool {
        self.rules.iter().any(|r| r.lhs.divides(m))
    }

    fn compute_basis(&self) -> Option<Vec<Monomial>> {
        let nvars = self.vars.len();
        let mut basis = alloc::collections::BTreeSet::new();
        let mut queue = vec![Monomial::one(nvars)];
        basis.insert(Monomial::one(nvars));
        while let Some(m) = queue.pop() {
            for i in 0..nvars {
                let mut m2 = m.clone();
                m2.0[i] = m2.0[i].checked_add(1)?;
                if !self.is_reducible(&m2) && basis.insert(m2.clone()) {
                    if basis.len() > BASIS_CAP {
                        return None;
                    }
                    queue.push(m2);
                }
            }
        }
        Some(basis.into_iter().collect())
    }

    /// Buchberger-style check: overlapping rule pairs must reduce to the
    /// same normal form. Rules with coprime left sides are skipped.
    fn check_confluence(&self) -> Result<()> {
        for (i, r1) in self.rules.iter().enumerate() {
            for r2 in self.rules.iter().skip(i + 1) {
                let overlap = r1
                    .lhs
                    .0
                    .iter()
                    .zip(&r2.lhs.0)
                    .any(|(&a, &b)| a > 0 && b > 0);
                if !overlap {
                    continue;
                }
                let lcm = Monomial(
                    r1.lhs
                        .0
                        .iter()
                        .zip(&r2.lhs.0)
                        .map(|(&a, &b)| a.max(b))
                        .collect(),
                );
                let via1 = r1.rhs.mul_monomial(&r1.lhs.div_into(&lcm));
                let via2 = r2.rhs.mul_monomial(&r2.lhs.div_into(&lcm));
                if self.normalize(via1) != self.normalize(via2) {
                    return Err(Error::InconsistentRelations(
                        "relations are not confluent".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Fills `local` and `structured_roots` after basis computation.
    fn classify(&mut self) {
        let nvars = self.vars.len();
        let mut local = true;
        // nilpotency must be detectable past the largest relation degree
        let cap = NILP_CAP.max(
            self.rules
                .iter()
                .map(|r| r.lhs.total_deg())
                .max()
                .unwrap_or(0)
                .saturating_mul(2),
        );
        for i in 0..nvars {
            if Some(i) == self.field_var {
                continue;
            }
            let mut nilpotent = false;
            let mut e = 1u32;
            while e <= cap {
                let m = Monomial(
                    (0..nvars)
                        .map(|j| if j == i { e as Exp } else { 0 })
                        .collect(),
                );
                if self.normalize(Poly::monomial(m, 1, self.modulus)).is_zero() {
                    nilpotent = true;
                    break;
                }
                e = e.saturating_mul(2);
            }
            if !nilpotent {
                local = false;
            }
        }
        self.local = local;
        // structured p-th roots need: monomial rules only among the
        // nilpotent variables, and no rule mixing the field generator in.
        let mut ok = local;
        for r in &self.rules {
            let touches_field = self.field_var.map(|fv| r.lhs.0[fv] > 0).unwrap_or(false);
            if touches_field {
                // the field rule itself is fine; anything else is not
                if !(r.lhs.0.iter().enumerate().all(|(j, &e)| {
                    (Some(j) == self.field_var && e == self.field_deg as Exp) || e == 0
                })) {
                    ok = false;
                }
            } else if !r.rhs.is_zero() {
                ok = false; // binomial among nilpotent variables
            }
        }
        self.structured_roots = ok;
    }

    /// Precomputes the residue field for local rings that are not
    /// already fields (perfect fields are their own residue).
    fn build_residue(&mut self) -> Result<()> {
        if !self.local
            || matches!(
                self.desc,
                RingDescriptor::PrimeField { .. } | RingDescriptor::FiniteField { .. }
            )
        {
            return Ok(());
        }
        let rf = if self.field_deg == 1 {
            Ring::prime_field(self.p)?
        } else {
            Ring::finite_field(self.p, self.field_deg)?
        };
        self.residue = Some(rf);
        Ok(())
    }
}

impl Ring {
    pub fn new(desc: RingDescriptor) -> Result<Ring> {
        Ok(Ring(Arc::new(RingData::compile(&desc)?)))
    }

    pub fn prime_field(p: u64) -> Result<Ring> {
        Ring::new(RingDescriptor::PrimeField { p })
    }

    pub fn finite_field(p: u64, k: u32) -> Result<Ring> {
        Ring::new(RingDescriptor::FiniteField { p, k })
    }

    pub fn zmod(p: u64, a: u32) -> Result<Ring> {
        Ring::new(RingDescriptor::IntegersModPPower { p, a })
    }

    pub fn descriptor(&self) -> &RingDescriptor {
        &self.0.desc
    }

    pub fn prime(&self) -> u64 {
        self.0.p
    }

    /// The exponent a with p^a * 1 = 0.
    pub fn char_exponent(&self) -> u32 {
        self.0.a
    }

    pub fn modulus(&self) -> u64 {
        self.0.modulus
    }

    pub fn is_char_p(&self) -> bool {
        self.0.a == 1
    }

    pub fn is_perfect_field(&self) -> bool {
        matches!(
            self.0.desc,
            RingDescriptor::PrimeField { .. } | RingDescriptor::FiniteField { .. }
        )
    }

    pub fn is_local(&self) -> bool {
        self.0.local
    }

    pub fn vars(&self) -> &[String] {
        &self.0.vars
    }

    pub fn field_degree(&self) -> u32 {
        self.0.field_deg
    }

    /// Basis of irreducible monomials, smallest first.
    pub fn basis(&self) -> Result<&[Monomial]> {
        self.0
            .basis
            .as_deref()
            .ok_or_else(|| Error::UnsupportedRing("ring has no finite monomial basis".into()))
    }

    pub fn cardinality(&self) -> Result<u128> {
        let b = self.basis()?.len() as u32;
        let mut c: u128 = 1;
        for _ in 0..b {
            c = c
                .checked_mul(self.0.modulus as u128)
                .ok_or(Error::Overflow)?;
        }
        Ok(c)
    }

    pub fn zero(&self) -> RingElement {
        RingElement {
            ring: self.clone(),
            poly: Poly::zero(),
        }
    }

    pub fn one(&self) -> RingElement {
        self.from_int(1)
    }

    pub fn from_int(&self, k: i64) -> RingElement {
        let c = k.rem_euclid(self.0.modulus as i64) as u64;
        RingElement {
            ring: self.clone(),
            poly: Poly::constant(c, self.0.vars.len(), self.0.modulus),
        }
    }

    pub fn var(&self, name: &str) -> Result<RingElement> {
        let i = self
            .0
            .vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnsupportedRing(format!("no variable {name}")))?;
        Ok(RingElement {
            ring: self.clone(),
            poly: Poly::monomial(Monomial::var(self.0.vars.len(), i), 1, self.0.modulus),
        })
    }

    pub fn element_from_terms(&self, terms: &[(NamedMonomial, i64)]) -> Result<RingElement> {
        let mut p = Poly::zero();
        for (m, c) in terms {
            let mono = resolve_named(m, &self.0.vars)?;
            let c = c.rem_euclid(self.0.modulus as i64) as u64;
            p.add_term(mono, c, self.0.modulus);
        }
        Ok(RingElement {
            ring: self.clone(),
            poly: self.0.normalize(p),
        })
    }

    pub(crate) fn element_from_poly(&self, p: Poly) -> RingElement {
        RingElement {
            ring: self.clone(),
            poly: self.0.normalize(p),
        }
    }

    /// Same presentation with modulus raised to `p^{a+pad}`. Rules,
    /// basis and classification carry over verbatim (the coefficients of
    /// the rules are below the old modulus), so no recompilation runs.
    pub fn lifted(&self, pad: u32) -> Result<Ring> {
        if pad == 0 {
            return Ok(self.clone());
        }
        let a = self.0.a + pad;
        let data = RingData {
            desc: RingDescriptor::Lifted {
                of: Box::new(self.0.desc.clone()),
                pad,
            },
            p: self.0.p,
            a,
            modulus: checked_prime_power(self.0.p, a)?,
            vars: self.0.vars.clone(),
            rules: self.0.rules.clone(),
            field_var: self.0.field_var,
            field_deg: self.0.field_deg,
            basis: self.0.basis.clone(),
            local: self.0.local,
            structured_roots: self.0.structured_roots,
            residue: self
                .0
                .residue
                .clone()
                .or_else(|| self.is_perfect_field().then(|| self.clone())),
        };
        Ok(Ring(Arc::new(data)))
    }

    /// Reinterprets canonical coefficients of `x` in this (larger) ring.
    pub fn include_canonical(&self, x: &RingElement) -> RingElement {
        debug_assert!(self.0.modulus.is_multiple_of(x.ring.0.modulus));
        RingElement {
            ring: self.clone(),
            poly: x.poly.clone(),
        }
    }

    /// Reduces canonical coefficients of `x` into this (smaller) ring.
    pub fn reduce_canonical(&self, x: &RingElement) -> RingElement {
        debug_assert!(x.ring.0.modulus.is_multiple_of(self.0.modulus));
        let mut p = Poly::zero();
        for (m, &c) in &x.poly.terms {
            p.add_term(m.clone(), c % self.0.modulus, self.0.modulus);
        }
        RingElement {
            ring: self.clone(),
            poly: self.0.normalize(p),
        }
    }

    /// The residue field `F_{p^k}` together with the reduction map.
    pub fn residue_field(&self) -> Result<(Ring, RingMap)> {
        if !self.0.local {
            return Err(Error::UnsupportedRing(
                "ring is not local; decompose before taking residues".into(),
            ));
        }
        if self.is_perfect_field() {
            let id = RingMap::identity(self);
            return Ok((self.clone(), id));
        }
        let rf = self
            .0
            .residue
            .clone()
            .expect("residue field precomputed for local rings");
        let images: Vec<RingElement> = (0..self.0.vars.len())
            .map(|i| {
                if Some(i) == self.0.field_var {
                    rf.var("g").unwrap()
                } else {
                    rf.zero()
                }
            })
            .collect();
        let map = RingMap::new(self.clone(), rf.clone(), images)?;
        Ok((rf, map))
    }

    /// Reduction mod p: same presentation with exponent a = 1.
    pub fn mod_p(&self) -> Result<(Ring, RingMap)> {
        if self.0.a == 1 {
            return Ok((self.clone(), RingMap::identity(self)));
        }
        let target = reduce_descriptor_exponent(&self.0.desc, 1)?;
        let ring = Ring::new(target)?;
        let images: Vec<RingElement> = self.0.vars.iter().map(|v| ring.var(v).unwrap()).collect();
        let map = RingMap::new(self.clone(), ring.clone(), images)?;
        Ok((ring, map))
    }

    /// Unit test through the residue field: in normal form the residue
    /// is the sum of terms with no nilpotent variables, coefficients
    /// read mod p, and distinct field-generator powers cannot cancel.
    pub fn is_unit(&self, x: &RingElement) -> Result<bool> {
        if !self.0.local {
            return Err(Error::UnsupportedRing(
                "ring is not local; decompose before taking residues".into(),
            ));
        }
        let fv = self.0.field_var;
        Ok(x.poly.terms.iter().any(|(m, &c)| {
            c % self.0.p != 0
                && m.0
                    .iter()
                    .enumerate()
                    .all(|(i, &e)| e == 0 || Some(i) == fv)
        }))
    }

    /// Multiplicative inverse via residue inversion and Newton lifting.
    pub fn inverse(&self, x: &RingElement) -> Result<RingElement> {
        let (rf, res) = self.residue_field()?;
        let x0 = res.apply(x)?;
        if x0.is_zero() {
            return Err(Error::NotAUnit);
        }
        // inverse in the residue field: x0^(q-2)
        let q = rf.cardinality()? as u64;
        let inv0 = x0.pow(q - 2);
        let mut y = self.lift_residue(&inv0);
        let two = self.from_int(2);
        for _ in 0..64 {
            let xy = x.mul(&y);
            if xy == self.one() {
                return Ok(y);
            }
            y = y.mul(&two.sub(&xy));
        }
        Err(Error::UnitInversionFailure)
    }

    /// Canonical p-th root for char-p rings; `None` when no root exists.
    pub fn frobenius_root(&self, x: &RingElement) -> Result<Option<RingElement>> {
        if self.0.a != 1 {
            return Err(Error::NotCharP);
        }
        if self.0.structured_roots {
            let p = self.0.p;
            let k = self.0.field_deg;
            let fv = self.0.field_var;
            let mut root = Poly::zero();
            // group terms by their nilpotent part; the field part of a
            // coefficient is rooted inside F_q by x -> x^(p^(k-1))
            let mut groups: alloc::collections::BTreeMap<Monomial, Poly> =
                alloc::collections::BTreeMap::new();
            for (m, &c) in &x.poly.terms {
                let mut nil = m.clone();
                let mut fld = Monomial::one(self.0.vars.len());
                if let Some(i) = fv {
                    fld.0[i] = nil.0[i];
                    nil.0[i] = 0;
                }
                groups
                    .entry(nil)
                    .or_default()
                    .add_term(fld, c, self.0.modulus);
            }
            for (nil, alpha) in groups {
                let nil_root = match nilpotent_unscale(&nil, fv, p as u32) {
                    Some(r) => r,
                    None => return Ok(None),
                };
                let alpha_el = RingElement {
                    ring: self.clone(),
                    poly: alpha,
                };
                let alpha_root = if k == 1 {
                    alpha_el
                } else {
                    let mut e = 1u64;
                    for _ in 0..(k - 1) {
                        e = e.checked_mul(p).ok_or(Error::Overflow)?;
                    }
                    alpha_el.pow(e)
                };
                root = root.add(&alpha_root.poly.mul_monomial(&nil_root), self.0.modulus);
            }
            let cand = RingElement {
                ring: self.clone(),
                poly: self.0.normalize(root),
            };
            if cand.pow(self.0.p) == *x {
                return Ok(Some(cand));
            }
            return Ok(None);
        }
        // exhaustive fallback
        let card = self.cardinality()?;
        if card > (1 << 20) {
            return Err(Error::UnsupportedRing(
                "p-th roots need exhaustive search but the ring is too large".into(),
            ));
        }
        for y in self.elements()? {
            if y.pow(self.0.p) == *x {
                return Ok(Some(y));
            }
        }
        Ok(None)
    }

    /// Every p-th root, by exhaustive search.
    pub fn frobenius_roots_all(&self, x: &RingElement) -> Result<Vec<RingElement>> {
        if self.0.a != 1 {
            return Err(Error::NotCharP);
        }
        let card = self.cardinality()?;
        if card > (1 << 20) {
            return Err(Error::SearchSpaceTooLarge(128));
        }
        Ok(self.elements()?.filter(|y| y.pow(self.0.p) == *x).collect())
    }

    /// Adjoins p^k-th roots of the non-field variables: a faithfully flat
    /// extension in which every old generator becomes a p^k-th power.
    pub fn perfection_stage(&self, k: u32) -> Result<(Ring, RingMap)> {
        if self.0.a != 1 {
            return Err(Error::NotCharP);
        }
        if k == 0 || self.is_perfect_field() {
            return Ok((self.clone(), RingMap::identity(self)));
        }
        let scale = {
            let mut s: u32 = 1;
            for _ in 0..k {
                s = s.checked_mul(self.0.p as u32).ok_or(Error::Overflow)?;
            }
            s
        };
        let base = scalar_descriptor(self.0.p, self.0.a, self.0.field_deg);
        let nil_vars: Vec<String> = self
            .0
            .vars
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != self.0.field_var)
            .map(|(_, v)| v.clone())
            .collect();
        let mut rels = Vec::new();
        for r in &self.0.rules {
            if let Some(fv) = self.0.field_var {
                if r.lhs.0[fv] > 0 {
                    continue; // the field rule is regenerated by the base
                }
            }
            let lhs_named = named_of(&r.lhs.scale(scale), &self.0.vars);
            if r.rhs.is_zero() {
                rels.push(Relation::MonomialZero(lhs_named));
            } else {
                let (m, c) = r.rhs.leading().unwrap();
                rels.push(Relation::Binomial {
                    lhs: lhs_named,
                    coeff: c as i64,
                    rhs: named_of(&m.scale(scale), &self.0.vars),
                });
            }
        }
        let desc = RingDescriptor::PolynomialQuotient {
            base: Box::new(base),
            vars: nil_vars,
            rels,
        };
        let big = Ring::new(desc)?;
        let images: Vec<RingElement> = self
            .0
            .vars
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let x = big.var(v).unwrap();
                if Some(i) == self.0.field_var {
                    x
                } else {
                    x.pow(scale as u64)
                }
            })
            .collect();
        let map = RingMap::new(self.clone(), big.clone(), images)?;
        Ok((big, map))
    }

    /// B = A + free ideal of square zero on `rank` generators.
    pub fn square_zero_extension(&self, rank: u32) -> Result<SquareZeroIdeal> {
        let desc = RingDescriptor::SquareZeroExtension {
            base: Box::new(self.0.desc.clone()),
            rank,
        };
        let ambient = Ring::new(desc)?;
        let proj_images: Vec<RingElement> = self
            .0
            .vars
            .iter()
            .map(|v| self.var(v).unwrap())
            .chain((0..rank).map(|_| self.zero()))
            .collect();
        let proj = RingMap::new(ambient.clone(), self.clone(), proj_images)?;
        let sect_images: Vec<RingElement> = self
            .0
            .vars
            .iter()
            .map(|v| ambient.var(v).unwrap())
            .collect();
        let sect = RingMap::new(self.clone(), ambient.clone(), sect_images)?;
        let gens: Vec<RingElement> = (0..rank as usize)
            .map(|i| {
                let name = &ambient.0.vars[self.0.vars.len() + i];
                ambient.var(name).unwrap()
            })
            .collect();
        Ok(SquareZeroIdeal {
            ambient,
            base: self.clone(),
            rank,
            gens,
            proj,
            sect,
        })
    }

    /// Canonical coset representative of `x + R[p]`; `R[p] = R` when a = 1
    /// and `p^{a-1} R` otherwise (the supported classes are free modules).
    pub fn p_torsion_reduce(&self, x: &RingElement) -> Result<RingElement> {
        if self.0.a == 1 {
            return Ok(self.zero());
        }
        let q = self.0.modulus / self.0.p; // p^{a-1}
        let mut out = Poly::zero();
        for (m, &c) in &x.poly.terms {
            out.add_term(m.clone(), c % q, self.0.modulus);
        }
        Ok(RingElement {
            ring: self.clone(),
            poly: out,
        })
    }

    /// Is `t` annihilated by p?
    pub fn is_p_torsion(&self, t: &RingElement) -> bool {
        t.mul(&self.from_int(self.0.p as i64)).is_zero()
    }

    /// Deterministic enumeration of all elements (coefficient odometer
    /// over the monomial basis).
    pub fn elements(&self) -> Result<ElementIter> {
        let basis = self.basis()?.to_vec();
        Ok(ElementIter {
            ring: self.clone(),
            basis,
            counter: Vec::new(),
            done: false,
        })
    }

    /// Set-theoretic section of the residue map: re-embeds a residue
    /// field element along the field generator.
    pub fn lift_residue(&self, x0: &RingElement) -> RingElement {
        let nvars = self.0.vars.len();
        let mut p = Poly::zero();
        for (m, &c) in &x0.poly.terms {
            let mut m2 = Monomial::one(nvars);
            if let (Some(fv), Some(&e)) = (self.0.field_var, m.0.first()) {
                m2.0[fv] = e;
            }
            p.add_term(m2, c, self.0.modulus);
        }
        RingElement {
            ring: self.clone(),
            poly: p,
        }
    }

    pub(crate) fn rules(&self) -> &[Rule] {
        &self.0.rules
    }
}

fn nilpotent_unscale(m: &Monomial, field_var: Option<usize>, p: u32) -> Option<Monomial> {
    let mut out = m.clone();
    for (i, e) in out.0.iter_mut().enumerate() {
        if Some(i) == field_var {
            continue;
        }
        if *e % p != 0 {
            return None;
        }
        *e = (*e / p) as Exp;
    }
    Some(out)
}

fn named_of(m: &Monomial, vars: &[String]) -> NamedMonomial {
    m.0.iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| (vars[i].clone(), e))
        .collect()
}

fn scalar_descriptor(p: u64, a: u32, field_deg: u32) -> RingDescriptor {
    if field_deg > 1 {
        RingDescriptor::FiniteField { p, k: field_deg }
    } else if a > 1 {
        RingDescriptor::IntegersModPPower { p, a }
    } else {
        RingDescriptor::PrimeField { p }
    }
}

fn reduce_descriptor_exponent(desc: &RingDescriptor, a: u32) -> Result<RingDescriptor> {
    Ok(match desc {
        RingDescriptor::PrimeField { .. } | RingDescriptor::FiniteField { .. } => desc.clone(),
        RingDescriptor::IntegersModPPower { p, .. } => {
            if a == 1 {
                RingDescriptor::PrimeField { p: *p }
            } else {
                RingDescriptor::IntegersModPPower { p: *p, a }
            }
        }
        RingDescriptor::PolynomialQuotient { base, vars, rels } => {
            RingDescriptor::PolynomialQuotient {
                base: Box::new(reduce_descriptor_exponent(base, a)?),
                vars: vars.clone(),
                rels: rels.clone(),
            }
        }
        RingDescriptor::SquareZeroExtension { base, rank } => RingDescriptor::SquareZeroExtension {
            base: Box::new(reduce_descriptor_exponent(base, a)?),
            rank: *rank,
        },
        RingDescriptor::Lifted { .. } => {
            return Err(Error::UnsupportedMap("cannot reduce a lift ring".into()))
        }
    })
}

/// Square-zero thickening B -> A with kernel a free A-module.
#[derive(Clone, Debug)]
pub struct SquareZeroIdeal {
    pub ambient: Ring,
    pub base: Ring,
    pub rank: u32,
    pub gens: Vec<RingElement>,
    pub proj: RingMap,
    pub sect: RingMap,
}

impl SquareZeroIdeal {
    /// Splits a kernel element into its coordinates over the base.
    pub fn coords(&self, x: &RingElement) -> Result<Vec<RingElement>> {
        let off = self.base.vars().len();
        let nv = self.ambient.vars().len();
        let mut coords = vec![Poly::zero(); self.rank as usize];
        for (m, &c) in &x.poly.terms {
            let mut eps_idx = None;
            for i in off..nv {
                if m.0[i] > 0 {
                    if m.0[i] > 1 || eps_idx.is_some() {
                        return Err(Error::DomainMismatch(
                            "element is not in the square-zero ideal".into(),
                        ));
                    }
                    eps_idx = Some(i - off);
                }
            }
            match eps_idx {
                None => {
                    return Err(Error::DomainMismatch(
                        "element has a nonzero base component".into(),
                    ))
                }
                Some(j) => {
                    let mut m2 = m.clone();
                    m2.0[off + j] = 0;
                    m2.0.truncate(off);
                    coords[j].add_term(m2, c, self.base.modulus());
                }
            }
        }
        Ok(coords
            .into_iter()
            .map(|p| self.base.element_from_poly(p))
            .collect())
    }

    /// Builds the kernel element with the given base coordinates.
    pub fn from_coords(&self, coords: &[RingElement]) -> Result<RingElement> {
        if coords.len() != self.rank as usize {
            return Err(Error::ShapeMismatch("square-zero coordinate count".into()));
        }
        let mut acc = self.ambient.zero();
        for (i, c) in coords.iter().enumerate() {
            acc = acc.add(&self.sect.apply(c)?.mul(&self.gens[i]));
        }
        Ok(acc)
    }

    /// Membership test for the ideal.
    pub fn contains(&self, x: &RingElement) -> bool {
        self.proj.apply(x).map(|r| r.is_zero()).unwrap_or(false)
    }

    /// Deterministic enumeration of the whole ideal.
    pub fn elements(&self) -> Result<Vec<RingElement>> {
        let base_elems: Vec<RingElement> = self.base.elements()?.collect();
        let mut out = Vec::new();
        let mut idx = vec![0usize; self.rank as usize];
        loop {
            let coords: Vec<RingElement> = idx.iter().map(|&i| base_elems[i].clone()).collect();
            out.push(self.from_coords(&coords)?);
            let mut i = 0;
            loop {
                if i == idx.len() {
                    return Ok(out);
                }
                idx[i] += 1;
                if idx[i] < base_elems.len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
        }
    }

    /// F_p-basis of the ideal when the base has characteristic p.
    pub fn fp_basis(&self) -> Result<Vec<RingElement>> {
        if !self.base.is_char_p() {
            return Err(Error::UnsupportedRing(
                "kernel has no F_p structure unless the base has characteristic p".into(),
            ));
        }
        let basis = self.base.basis()?;
        let mut out = Vec::new();
        for g in &self.gens {
            for m in basis {
                let e =
                    self.base
                        .element_from_poly(Poly::monomial(m.clone(), 1, self.base.modulus()));
                out.push(self.sect.apply(&e)?.mul(g));
            }
        }
        Ok(out)
    }

    /// F_p-coordinates of an ideal element in the `fp_basis` order.
    pub fn fp_coords(&self, x: &RingElement) -> Result<Vec<u64>> {
        let coords = self.coords(x)?;
        let mut out = Vec::new();
        for c in &coords {
            out.extend(c.coefficients_on_basis()?);
        }
        Ok(out)
    }
}

pub struct ElementIter {
    ring: Ring,
    basis: Vec<Monomial>,
    counter: Vec<u64>,
    done: bool,
}

impl Iterator for ElementIter {
    type Item = RingElement;

    fn next(&mut self) -> Option<RingElement> {
        if self.done {
            return None;
        }
        if self.counter.is_empty() {
            self.counter = vec![0; self.basis.len()];
        } else {
            let m = self.ring.modulus();
            let mut i = 0;
            loop {
                if i == self.counter.len() {
                    self.done = true;
                    return None;
                }
                self.counter[i] += 1;
                if self.counter[i] < m {
                    break;
                }
                self.counter[i] = 0;
                i += 1;
            }
        }
        let mut p = Poly::zero();
        for (i, &c) in self.counter.iter().enumerate() {
            p.add_term(self.basis[i].clone(), c, self.ring.modulus());
        }
        Some(RingElement {
            ring: self.ring.clone(),
            poly: p,
        })
    }
}

impl RingElement {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn add(&self, other: &RingElement) -> RingElement {
        assert!(self.ring == other.ring, "ring mismatch");
        self.ring
            .element_from_poly(self.poly.add(&other.poly, self.ring.modulus()))
    }

    pub fn sub(&self, other: &RingElement) -> RingElement {
        assert!(self.ring == other.ring, "ring mismatch");
        self.ring
            .element_from_poly(self.poly.sub(&other.poly, self.ring.modulus()))
    }

    pub fn neg(&self) -> RingElement {
        self.ring
            .element_from_poly(self.poly.neg(self.ring.modulus()))
    }

    pub fn mul(&self, other: &RingElement) -> RingElement {
        assert!(self.ring == other.ring, "ring mismatch");
        self.ring
            .element_from_poly(self.poly.mul(&other.poly, self.ring.modulus()))
    }

    pub fn mul_int(&self, k: i64) -> RingElement {
        let c = k.rem_euclid(self.ring.modulus() as i64) as u64;
        self.ring
            .element_from_poly(self.poly.scale_coeff(c, self.ring.modulus()))
    }

    pub fn pow(&self, mut e: u64) -> RingElement {
        let mut acc = self.ring.one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub(crate) fn poly(&self) -> &Poly {
        &self.poly
    }

    /// Coefficient-wise exact division by p^i; errors when some canonical
    /// coefficient is not divisible. Valid because the supported rings are
    /// free modules on their irreducible monomials.
    pub fn exact_div_p(&self, i: u32) -> Result<RingElement> {
        let mut q: u64 = 1;
        for _ in 0..i {
            q = q.checked_mul(self.ring.prime()).ok_or(Error::Overflow)?;
        }
        let mut out = Poly::zero();
        for (m, &c) in &self.poly.terms {
            if c % q != 0 {
                return Err(Error::InexactDivision(i));
            }
            out.add_term(m.clone(), c / q, self.ring.modulus());
        }
        Ok(RingElement {
            ring: self.ring.clone(),
            poly: out,
        })
    }

    /// p-th power repeated `times` times.
    pub fn frobenius_pow(&self, times: u32) -> RingElement {
        let mut out = self.clone();
        for _ in 0..times {
            out = out.pow(self.ring.prime());
        }
        out
    }

    /// Canonical coefficients on the monomial basis, in basis order.
    pub fn coefficients_on_basis(&self) -> Result<Vec<u64>> {
        let basis = self.ring.basis()?;
        Ok(basis.iter().map(|m| self.poly.coeff(m)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quot_x4() -> Ring {
        Ring::new(RingDescriptor::PolynomialQuotient {
            base: Box::new(RingDescriptor::PrimeField { p: 2 }),
            vars: vec!["x".into()],
            rels: vec![Relation::MonomialZero(vec![("x".into(), 4)])],
        })
        .unwrap()
    }

    #[test]
    fn constructs_the_spec_examples() {
        let f2 = Ring::finite_field(2, 1).unwrap();
        assert!(f2.one().add(&f2.one()).is_zero());

        let z9 = Ring::zmod(3, 2).unwrap();
        assert!(z9.from_int(3).mul(&z9.from_int(3)).is_zero());
        assert!(!z9.from_int(3).is_zero());

        let r = quot_x4();
        assert_eq!(r.basis().unwrap().len(), 4);
        assert_eq!(r.cardinality().unwrap(), 16);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            Ring::prime_field(6),
            Err(Error::NonPrimeModulus(6))
        ));
        let res = Ring::new(RingDescriptor::PolynomialQuotient {
            base: Box::new(RingDescriptor::PrimeField { p: 2 }),
            vars: vec!["x".into()],
            rels: vec![Relation::MonomialZero(vec![])],
        });
        assert!(matches!(res, Err(Error::InconsistentRelations(_))));
    }

    #[test]
    fn normalization_is_idempotent_and_units_invert() {
        let r = quot_x4();
        let x = r.var("x").unwrap();
        let u = r.one().add(&x);
        // (1+x)^-1 = 1 + x + x^2 + x^3 in F_2[x]/(x^4)
        let inv = r.inverse(&u).unwrap();
        let expect = r.one().add(&x).add(&x.pow(2)).add(&x.pow(3));
        assert_eq!(inv, expect);
        assert!(u.mul(&inv) == r.one());
        assert!(!r.is_unit(&x).unwrap());
        // 3 is nilpotent in Z/9
        let z9 = Ring::zmod(3, 2).unwrap();
        assert!(!z9.is_unit(&z9.from_int(3)).unwrap());
        assert!(z9.is_unit(&z9.from_int(2)).unwrap());
        // 0 is never a unit
        let f2 = Ring::prime_field(2).unwrap();
        assert!(!f2.is_unit(&f2.zero()).unwrap());
    }

    #[test]
    fn finite_field_structure() {
        let f4 = Ring::finite_field(2, 2).unwrap();
        let g = f4.var("g").unwrap();
        // minimal polynomial is g^2 + g + 1
        assert_eq!(g.mul(&g), g.add(&f4.one()));
        assert_eq!(f4.cardinality().unwrap(), 4);
        // frobenius root of g is g^2 since squaring is inverse of itself on F_4
        let root = f4.frobenius_root(&g).unwrap().unwrap();
        assert_eq!(root.pow(2), g);
        assert_eq!(root, g.pow(2));
    }

    #[test]
    fn frobenius_root_examples() {
        // 1 is its own root in any char-p ring
        let r = quot_x4();
        assert_eq!(r.frobenius_root(&r.one()).unwrap().unwrap(), r.one());
        // x^2 has root x; x has no root
        let x = r.var("x").unwrap();
        assert_eq!(r.frobenius_root(&x.pow(2)).unwrap().unwrap(), x);
        assert!(r.frobenius_root(&x).unwrap().is_none());
        // t in F_2[t]/(t^2) has no square root; cross-check exhaustively
        let rt = Ring::new(RingDescriptor::PolynomialQuotient {
            base: Box::new(RingDescriptor::PrimeField { p: 2 }),
            vars: vec!["t".into()],
            rels: vec![Relation::MonomialZero(vec![("t".into(), 2)])],
        })
        .unwrap();
        let t = rt.var("t").unwrap();
        assert!(rt.frobenius_root(&t).unwrap().is_none());
        assert!(rt.frobenius_roots_all(&t).unwrap().is_empty());
        // non-perfect rings have several roots of 0
        assert!(rt.frobenius_roots_all(&rt.zero()).unwrap().len() == 2);
    }

    #[test]
    fn perfection_stage_examples() {
        let r = quot_x4();
        let (r1, incl) = r.perfection_stage(1).unwrap();
        // F_2[y]/(y^8), x -> y^2
        assert_eq!(r1.basis().unwrap().len(), 8);
        let x = r.var("x").unwrap();
        let y = r1.var("x").unwrap();
        assert_eq!(incl.apply(&x).unwrap(), y.pow(2));
        // composing stages is the same as one deeper stage
        let (r2a, incl2) = r1.perfection_stage(1).unwrap();
        let (r2b, incl_direct) = r.perfection_stage(2).unwrap();
        assert!(r2a == r2b);
        assert_eq!(
            incl2.apply(&incl.apply(&x).unwrap()).unwrap(),
            incl_direct.apply(&x).unwrap()
        );
        // perfect rings are their own perfection
        let f4 = Ring::finite_field(2, 2).unwrap();
        let (same, m) = f4.perfection_stage(3).unwrap();
        assert!(same == f4);
        let g = f4.var("g").unwrap();
        assert_eq!(m.apply(&g).unwrap(), g);
        // injectivity on the monomial basis (monomial bookkeeping)
        assert!(incl.injective_on_basis().unwrap());
        assert!(incl2.injective_on_basis().unwrap());
    }

    #[test]
    fn square_zero_extensions() {
        // dual numbers over F_2
        let f2 = Ring::prime_field(2).unwrap();
        let sz = f2.square_zero_extension(1).unwrap();
        let e = sz.gens[0].clone();
        assert!(e.mul(&e).is_zero());
        assert_eq!(sz.ambient.cardinality().unwrap(), 4);
        // rank 2 over F_3: all pairwise products vanish
        let f3 = Ring::prime_field(3).unwrap();
        let sz2 = f3.square_zero_extension(2).unwrap();
        for a in &sz2.gens {
            for b in &sz2.gens {
                assert!(a.mul(b).is_zero());
            }
        }
        // over Z/9: e*e = 0 but 3e != 0
        let z9 = Ring::zmod(3, 2).unwrap();
        let sz3 = z9.square_zero_extension(1).unwrap();
        let e = sz3.gens[0].clone();
        assert!(e.mul(&e).is_zero());
        assert!(!e.mul_int(3).is_zero());
        // exhaustive: every product of two kernel elements is zero
        for x in sz3.ambient.elements().unwrap() {
            if !sz3.contains(&x) {
                continue;
            }
            for y in sz3.ambient.elements().unwrap() {
                if sz3.contains(&y) {
                    assert!(x.mul(&y).is_zero());
                }
            }
        }
        // coordinate round trip
        let c = sz3.coords(&e.mul_int(5)).unwrap();
        assert_eq!(sz3.from_coords(&c).unwrap(), e.mul_int(5));
    }

    #[test]
    fn p_torsion_representatives() {
        let z4 = Ring::zmod(2, 2).unwrap();
        // R[p] = 2R; canonical representatives have coefficients mod 2
        assert!(z4.p_torsion_reduce(&z4.from_int(2)).unwrap().is_zero());
        assert_eq!(
            z4.p_torsion_reduce(&z4.from_int(3)).unwrap(),
            z4.from_int(1)
        );
        let f2 = Ring::prime_field(2).unwrap();
        assert!(f2.p_torsion_reduce(&f2.one()).unwrap().is_zero());
    }

    #[test]
    fn handles_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<Ring>();
        assert_send_sync::<RingElement>();
        assert_send_sync::<RingMap>();
        assert_send_sync::<SquareZeroIdeal>();
    }

    #[test]
    fn char_exponent_is_exact() {
        for ring in [
            Ring::prime_field(2).unwrap(),
            Ring::zmod(3, 2).unwrap(),
            quot_x4(),
        ] {
            let a = ring.char_exponent();
            let p = ring.prime() as i64;
            assert!(ring.from_int(p.pow(a)).is_zero());
            if a > 1 {
                assert!(!ring.from_int(p.pow(a - 1)).is_zero());
            } else {
                assert!(!ring.one().is_zero());
            }
        }
    }
}
