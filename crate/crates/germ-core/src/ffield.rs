//! Finite fields F_{p^m} in a canonical polynomial basis.
//!
//! A context is F_p[T]/(f) for a monic irreducible f chosen canonically:
//! the lexicographically least irreducible, comparing the coefficient of
//! T^0 first, then T^1, and so on. Elements are coefficient vectors in
//! that basis. All choices (moduli, embeddings, roots) are deterministic,
//! so equal inputs give bit-identical results across runs and platforms.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Largest prime accepted; keeps u128 accumulators safely in range.
const MAX_PRIME: u64 = (1 << 31) - 1;

// ---------------------------------------------------------------------------
// Context
// ---------------------------------------------------------------------------

#[derive(Debug)]
struct CtxInner {
    p: u64,
    m: usize,
    /// Monic modulus, dense from T^0; length m+1 with last entry 1.
    modulus: Vec<u64>,
}

/// A finite field F_{p^m}, shared cheaply by handle.
#[derive(Clone, Debug)]
pub struct FieldCtx(Arc<CtxInner>);

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p
                && self.0.m == other.0.m
                && self.0.modulus == other.0.modulus)
    }
}
impl Eq for FieldCtx {}

impl fmt::Display for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.0.p, self.0.m)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// --- dense polynomials over the prime field F_p (coefficients < p) ---------

fn fp_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn fp_rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    // f monic. Standard long division, remainder only.
    let mut r: Vec<u64> = a.to_vec();
    fp_trim(&mut r);
    let df = f.len() - 1;
    while r.len() > df {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - df;
        if lead != 0 {
            for i in 0..df {
                let sub = (lead as u128 * f[i] as u128 % p as u128) as u64;
                let idx = shift + i;
                r[idx] = (r[idx] + p - sub) % p;
            }
        }
        r.pop();
        fp_trim(&mut r);
    }
    r
}

fn fp_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u128; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] += ai as u128 * bj as u128;
        }
    }
    let red: Vec<u64> = prod.iter().map(|&c| (c % p as u128) as u64).collect();
    fp_rem(&red, f, p)
}

fn fp_powmod(base: &[u64], mut e: u128, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = fp_rem(base, f, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_mulmod(&acc, &b, f, p);
        }
        b = fp_mulmod(&b, &b, f, p);
        e >>= 1;
    }
    acc
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x: Vec<u64> = a.to_vec();
    let mut y: Vec<u64> = b.to_vec();
    fp_trim(&mut x);
    fp_trim(&mut y);
    while !y.is_empty() {
        // Make y monic before reducing so fp_rem applies.
        let inv = fp_scalar_inv(*y.last().unwrap(), p);
        let ym: Vec<u64> = y
            .iter()
            .map(|&c| (c as u128 * inv as u128 % p as u128) as u64)
            .collect();
        let r = fp_rem(&x, &ym, p);
        x = ym;
        y = r;
    }
    x
}

fn fp_scalar_inv(a: u64, p: u64) -> u64 {
    // Extended Euclid on integers.
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    assert!(r0 == 1, "inverse of non-unit scalar");
    (s0.rem_euclid(p as i128)) as u64
}

/// Irreducibility over F_p: T^{p^m} = T mod f, and for each prime q | m
/// the power T^{p^{m/q}} - T is coprime to f.
fn fp_is_irreducible(f: &[u64], p: u64) -> bool {
    let m = f.len() - 1;
    if m == 0 {
        return false;
    }
    let t = vec![0u64, 1];
    // Repeated Frobenius: t_k = T^{p^k} mod f, computed by iterating
    // power-by-p so exponents never overflow.
    let mut pow_table = Vec::with_capacity(m + 1);
    pow_table.push(fp_rem(&t, f, p));
    for _ in 0..m {
        let last = pow_table.last().unwrap();
        pow_table.push(fp_powmod(last, p as u128, f, p));
    }
    // T^{p^m} - T must be 0 mod f.
    let mut top = pow_table[m].clone();
    sub_poly(&mut top, &t, p);
    if !top.is_empty() {
        return false;
    }
    for q in prime_factors(m) {
        let mut mid = pow_table[m / q].clone();
        sub_poly(&mut mid, &t, p);
        let g = fp_gcd(&mid, f, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

fn sub_poly(a: &mut Vec<u64>, b: &[u64], p: u64) {
    if a.len() < b.len() {
        a.resize(b.len(), 0);
    }
    for (i, &bi) in b.iter().enumerate() {
        a[i] = (a[i] + p - bi) % p;
    }
    fp_trim(a);
}

/// Cache of canonical contexts so repeated extensions reuse the search.
fn ctx_cache() -> &'static Mutex<HashMap<(u64, usize), FieldCtx>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), FieldCtx>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl FieldCtx {
    /// The prime field F_p (canonical modulus T).
    pub fn prime(p: u64) -> Result<Self> {
        Self::canonical(p, 1)
    }

    /// The canonical F_{p^m}: modulus is the lexicographically least monic
    /// irreducible of degree m, comparing the constant coefficient first.
    pub fn canonical(p: u64, m: usize) -> Result<Self> {
        if !is_prime(p) || p > MAX_PRIME {
            return Err(Error::BadInput(format!("{p} is not an admissible prime")));
        }
        if m == 0 {
            return Err(Error::BadInput("extension degree must be positive".into()));
        }
        if let Some(ctx) = ctx_cache().lock().unwrap().get(&(p, m)) {
            return Ok(ctx.clone());
        }
        let ctx = if m == 1 {
            // T itself is the least monic irreducible of degree 1.
            FieldCtx(Arc::new(CtxInner {
                p,
                m,
                modulus: vec![0, 1],
            }))
        } else {
            // Enumerate coefficient tuples (c_0, ..., c_{m-1}) in lex order.
            // c_0 = 0 would make T a factor, so start the counter there.
            let mut digits = vec![0u64; m];
            digits[0] = 1;
            loop {
                let mut f = digits.clone();
                f.push(1);
                if fp_is_irreducible(&f, p) {
                    break FieldCtx(Arc::new(CtxInner { p, m, modulus: f }));
                }
                // Increment the tuple, least-significant digit last.
                let mut k = m;
                loop {
                    assert!(k > 0, "no irreducible of degree {m} over F_{p}");
                    k -= 1;
                    digits[k] += 1;
                    if digits[k] < p {
                        break;
                    }
                    digits[k] = 0;
                }
            }
        };
        ctx_cache()
            .lock()
            .unwrap()
            .insert((p, m), ctx.clone());
        Ok(ctx)
    }

    /// Build a context from an explicit monic irreducible modulus
    /// (dense coefficients from T^0, length m+1).
    pub fn from_modulus(p: u64, modulus: Vec<u64>) -> Result<Self> {
        if !is_prime(p) || p > MAX_PRIME {
            return Err(Error::BadInput(format!("{p} is not an admissible prime")));
        }
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 {
            return Err(Error::BadInput("modulus must be monic of positive degree".into()));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::BadInput("modulus coefficients must be reduced mod p".into()));
        }
        if !fp_is_irreducible(&modulus, p) {
            return Err(Error::BadInput("modulus is reducible".into()));
        }
        let m = modulus.len() - 1;
        Ok(FieldCtx(Arc::new(CtxInner { p, m, modulus })))
    }

    /// Characteristic p.
    pub fn p(&self) -> u64 {
        self.0.p
    }

    /// Extension degree m over the prime field.
    pub fn degree(&self) -> usize {
        self.0.m
    }

    /// Field size p^m as u128.
    pub fn order(&self) -> u128 {
        let mut q = 1u128;
        for _ in 0..self.0.m {
            q *= self.0.p as u128;
        }
        q
    }

    /// Modulus coefficients (dense from T^0, monic).
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    /// Slot count of a raw accumulator for `FieldElt::mul_into_raw`: the
    /// unreduced product of two degree-(m-1) coefficient vectors.
    pub(crate) fn raw_width(&self) -> usize {
        2 * self.0.m - 1
    }

    /// Collapse a raw accumulator into a field element: reduce the slots
    /// mod p, then take the remainder against the modulus.
    pub(crate) fn raw_reduce(&self, acc: &[u128]) -> FieldElt {
        let inner = &self.0;
        let p = inner.p as u128;
        let v: Vec<u64> = acc.iter().map(|&x| (x % p) as u64).collect();
        let mut coeffs = fp_rem(&v, &inner.modulus, inner.p);
        coeffs.resize(inner.m, 0);
        FieldElt {
            ctx: self.clone(),
            coeffs,
        }
    }

    /// The zero element.
    pub fn zero(&self) -> FieldElt {
        FieldElt {
            ctx: self.clone(),
            coeffs: vec![0; self.0.m],
        }
    }

    /// The unit element.
    pub fn one(&self) -> FieldElt {
        self.from_scalar(1)
    }

    /// Embed an integer scalar (reduced mod p).
    pub fn from_scalar(&self, c: u64) -> FieldElt {
        let mut coeffs = vec![0; self.0.m];
        coeffs[0] = c % self.0.p;
        FieldElt {
            ctx: self.clone(),
            coeffs,
        }
    }

    /// Element from basis coordinates (each reduced mod p; padded with 0).
    pub fn from_coeffs(&self, cs: &[u64]) -> Result<FieldElt> {
        if cs.len() > self.0.m {
            return Err(Error::BadInput(format!(
                "element has {} coordinates but the field has degree {}",
                cs.len(),
                self.0.m
            )));
        }
        let mut coeffs = vec![0; self.0.m];
        for (i, &c) in cs.iter().enumerate() {
            coeffs[i] = c % self.0.p;
        }
        Ok(FieldElt {
            ctx: self.clone(),
            coeffs,
        })
    }

    /// The residue class of T, a generator of the basis.
    pub fn gen(&self) -> FieldElt {
        if self.0.m == 1 {
            // T reduces to 0 modulo T.
            return self.zero();
        }
        let mut coeffs = vec![0; self.0.m];
        coeffs[1] = 1;
        FieldElt {
            ctx: self.clone(),
            coeffs,
        }
    }

    /// The element whose coordinate vector is the base-p digits of `index`
    /// (index 0 is zero, 1 is one, p is the generator, ...). Deterministic
    /// enumeration order used wherever "try elements in order" is needed.
    pub fn element_from_index(&self, index: u128) -> FieldElt {
        let mut coeffs = vec![0; self.0.m];
        let mut k = index;
        for c in coeffs.iter_mut() {
            *c = (k % self.0.p as u128) as u64;
            k /= self.0.p as u128;
        }
        FieldElt {
            ctx: self.clone(),
            coeffs,
        }
    }

    /// Extend to the canonical F_{p^{m*d}} together with the embedding.
    pub fn extend(&self, d: usize) -> Result<(FieldCtx, Embedding)> {
        assert!(d >= 1, "extension factor must be positive");
        let big = FieldCtx::canonical(self.0.p, self.0.m * d)?;
        let emb = Embedding::locate(self, &big)?;
        Ok((big, emb))
    }
}

// ---------------------------------------------------------------------------
// Elements
// ---------------------------------------------------------------------------

/// An element of F_{p^m}: coordinates in the power basis of the modulus.
#[derive(Clone, Debug)]
pub struct FieldElt {
    ctx: FieldCtx,
    coeffs: Vec<u64>,
}

impl PartialEq for FieldElt {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.coeffs == other.coeffs
    }
}
impl Eq for FieldElt {}

impl PartialOrd for FieldElt {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for FieldElt {
    /// Lexicographic on coordinates, lowest basis vector first.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        assert!(self.ctx == other.ctx, "ordering requires one context");
        self.coeffs.cmp(&other.coeffs)
    }
}

impl fmt::Display for FieldElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl FieldElt {
    /// Owning context.
    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    /// Basis coordinates (length m).
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// True for the zero element.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// True for the unit element.
    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    fn same_ctx(&self, other: &Self) {
        assert!(
            self.ctx == other.ctx,
            "field elements from different contexts; embed explicitly first"
        );
    }

    /// Sum.
    pub fn add(&self, other: &Self) -> Self {
        self.same_ctx(other);
        let p = self.ctx.p();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| (a + b) % p)
            .collect();
        FieldElt {
            ctx: self.ctx.clone(),
            coeffs,
        }
    }

    /// Difference.
    pub fn sub(&self, other: &Self) -> Self {
        self.same_ctx(other);
        let p = self.ctx.p();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| (a + p - b) % p)
            .collect();
        FieldElt {
            ctx: self.ctx.clone(),
            coeffs,
        }
    }

    /// Additive inverse.
    pub fn neg(&self) -> Self {
        let p = self.ctx.p();
        let coeffs = self.coeffs.iter().map(|&a| (p - a) % p).collect();
        FieldElt {
            ctx: self.ctx.clone(),
            coeffs,
        }
    }

    /// Product.
    pub fn mul(&self, other: &Self) -> Self {
        self.same_ctx(other);
        let inner = &self.ctx.0;
        let red = fp_mulmod(&self.coeffs, &other.coeffs, &inner.modulus, inner.p);
        let mut coeffs = red;
        coeffs.resize(inner.m, 0);
        FieldElt {
            ctx: self.ctx.clone(),
            coeffs,
        }
    }

    /// Accumulate the unreduced coefficient-wise product of `self` and
    /// `other` into `acc`, which must have length `raw_width()` of the
    /// context. No modular reduction happens here: with p < 2^31 each
    /// product is below 2^62, so a u128 slot absorbs astronomically many
    /// pairs before overflow. Finish with `FieldCtx::raw_reduce`.
    pub(crate) fn mul_into_raw(&self, other: &Self, acc: &mut [u128]) {
        for (i, &ai) in self.coeffs.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in other.coeffs.iter().enumerate() {
                if bj != 0 {
                    acc[i + j] += ai as u128 * bj as u128;
                }
            }
        }
    }

    /// Multiply by an integer scalar.
    pub fn scale(&self, c: u64) -> Self {
        let p = self.ctx.p();
        let c = c % p;
        let coeffs = self
            .coeffs
            .iter()
            .map(|&a| (a as u128 * c as u128 % p as u128) as u64)
            .collect();
        FieldElt {
            ctx: self.ctx.clone(),
            coeffs,
        }
    }

    /// Power with u128 exponent (square-and-multiply).
    pub fn pow(&self, mut e: u128) -> Self {
        let mut acc = self.ctx.one();
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // Extended Euclid in F_p[T] against the modulus.
        let inner = &self.ctx.0;
        let p = inner.p;
        let mut r0: Vec<u64> = inner.modulus.clone();
        let mut r1: Vec<u64> = self.coeffs.clone();
        fp_trim(&mut r1);
        let mut s0: Vec<u64> = Vec::new();
        let mut s1: Vec<u64> = vec![1];
        while !r1.is_empty() {
            // Divide r0 by r1: quotient q, remainder r.
            let lead_inv = fp_scalar_inv(*r1.last().unwrap(), p);
            let mut q = vec![0u64; r0.len().saturating_sub(r1.len()) + 1];
            let mut rem = r0.clone();
            while rem.len() >= r1.len() && !rem.is_empty() {
                let shift = rem.len() - r1.len();
                let factor =
                    (*rem.last().unwrap() as u128 * lead_inv as u128 % p as u128) as u64;
                q[shift] = (q[shift] + factor) % p;
                for (i, &c) in r1.iter().enumerate() {
                    let sub = (factor as u128 * c as u128 % p as u128) as u64;
                    rem[shift + i] = (rem[shift + i] + p - sub) % p;
                }
                fp_trim(&mut rem);
            }
            // s_{k+1} = s_{k-1} - q * s_k
            let mut qs = poly_mul_fp(&q, &s1, p);
            let mut s2 = s0.clone();
            sub_into(&mut s2, &mut qs, p);
            r0 = r1;
            r1 = rem;
            s0 = s1;
            s1 = s2;
        }
        // r0 is a nonzero constant gcd; normalize.
        assert!(r0.len() == 1, "element shares a factor with an irreducible modulus");
        let norm = fp_scalar_inv(r0[0], p);
        let mut coeffs: Vec<u64> = s0
            .iter()
            .map(|&c| (c as u128 * norm as u128 % p as u128) as u64)
            .collect();
        coeffs = fp_rem(&coeffs, &inner.modulus, p);
        coeffs.resize(inner.m, 0);
        Ok(FieldElt {
            ctx: self.ctx.clone(),
            coeffs,
        })
    }

    /// Frobenius x -> x^p.
    pub fn frobenius(&self) -> Self {
        self.pow(self.ctx.p() as u128)
    }

    /// Inverse Frobenius: the unique y with y^p = x (p^{m-1}-fold Frobenius).
    pub fn frobenius_inv(&self) -> Self {
        let mut out = self.clone();
        for _ in 0..self.ctx.degree().saturating_sub(1) {
            out = out.frobenius();
        }
        out
    }

    /// Trace to the prime field, returned as a scalar in [0, p).
    pub fn trace(&self) -> u64 {
        let mut acc = self.clone();
        let mut fr = self.clone();
        for _ in 1..self.ctx.degree() {
            fr = fr.frobenius();
            acc = acc.add(&fr);
        }
        debug_assert!(acc.coeffs[1..].iter().all(|&c| c == 0));
        acc.coeffs[0]
    }
}

fn poly_mul_fp(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u128; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai as u128 * bj as u128;
        }
    }
    let mut v: Vec<u64> = out.iter().map(|&c| (c % p as u128) as u64).collect();
    fp_trim(&mut v);
    v
}

fn sub_into(a: &mut Vec<u64>, b: &mut Vec<u64>, p: u64) {
    if a.len() < b.len() {
        a.resize(b.len(), 0);
    }
    for (i, &bi) in b.iter().enumerate() {
        a[i] = (a[i] + p - bi) % p;
    }
    fp_trim(a);
}

// ---------------------------------------------------------------------------
// Embeddings
// ---------------------------------------------------------------------------

/// A field homomorphism from one context into another, recorded by the
/// image of the source generator. Composition with arithmetic is exact.
#[derive(Clone, Debug)]
pub struct Embedding {
    from: FieldCtx,
    to: FieldCtx,
    gen_image: FieldElt,
}

impl Embedding {
    /// Identity embedding of a context into itself.
    pub fn identity(ctx: &FieldCtx) -> Self {
        Embedding {
            from: ctx.clone(),
            to: ctx.clone(),
            gen_image: ctx.gen(),
        }
    }

    /// Compute the canonical embedding: the image of the source generator
    /// is the lexicographically least root of the source modulus in the
    /// target. Errors if the target degree is not a multiple.
    pub fn locate(from: &FieldCtx, to: &FieldCtx) -> Result<Self> {
        if from.p() != to.p() || to.degree() % from.degree() != 0 {
            return Err(Error::IncompatibleFields(format!(
                "no embedding of {} into {}",
                from, to
            )));
        }
        if from == to {
            return Ok(Self::identity(from));
        }
        // Roots of the source modulus, coefficients read as scalars.
        let modulus: Vec<FieldElt> = from
            .modulus()
            .iter()
            .map(|&c| to.from_scalar(c))
            .collect();
        let poly = crate::poly::Poly::new(to.clone(), modulus);
        let roots = poly.roots_in_ctx()?;
        let gen_image = roots
            .into_iter()
            .min()
            .ok_or_else(|| Error::IncompatibleFields(format!("no root of the {from} modulus in {to}")))?;
        Ok(Embedding {
            from: from.clone(),
            to: to.clone(),
            gen_image,
        })
    }

    /// Source context.
    pub fn from_ctx(&self) -> &FieldCtx {
        &self.from
    }

    /// Target context.
    pub fn to_ctx(&self) -> &FieldCtx {
        &self.to
    }

    /// Apply the embedding to an element of the source field.
    pub fn map(&self, a: &FieldElt) -> FieldElt {
        assert!(a.ctx == self.from, "element is not in the embedding source");
        // Horner evaluation of the coordinate polynomial at gen_image.
        let mut acc = self.to.zero();
        for &c in a.coeffs.iter().rev() {
            acc = acc.mul(&self.gen_image);
            acc = acc.add(&self.to.from_scalar(c));
        }
        acc
    }

    /// Compose with a following embedding (self first, then next).
    pub fn then(&self, next: &Embedding) -> Embedding {
        assert!(self.to == next.from, "embeddings do not compose");
        Embedding {
            from: self.from.clone(),
            to: next.to.clone(),
            gen_image: next.map(&self.gen_image),
        }
    }
}

// ---------------------------------------------------------------------------
// Artin-Schreier roots
// ---------------------------------------------------------------------------

/// Result of solving t^p - t = a: the root, the context it lives in, and
/// the embedding of the input's context into it.
#[derive(Clone, Debug)]
pub struct AsRoot {
    /// Lexicographically least solution.
    pub root: FieldElt,
    /// Context containing the root (equals the input context when the
    /// equation is solvable there).
    pub ctx: FieldCtx,
    /// Embedding of the input context into `ctx`.
    pub embedding: Embedding,
}

/// Solve t^p - t = a, extending the field by degree p when the trace
/// obstruction blocks a solution in place. Among the p solutions the
/// lexicographically least is returned; the choice is deterministic.
pub fn artin_schreier_root(a: &FieldElt) -> Result<AsRoot> {
    if let Some(root) = solve_as_linear(a) {
        return Ok(AsRoot {
            root,
            ctx: a.ctx.clone(),
            embedding: Embedding::identity(&a.ctx),
        });
    }
    let (big, emb) = a.ctx.extend(a.ctx.p() as usize)?;
    let lifted = emb.map(a);
    let root = solve_as_linear(&lifted)
        .expect("t^p - t = a always splits after a degree-p extension");
    Ok(AsRoot {
        root,
        ctx: big,
        embedding: emb,
    })
}

/// t -> t^p - t is F_p-linear on F_{p^m}; solve by Gaussian elimination
/// over F_p on the m x m coordinate matrix. Returns the lex-least solution.
fn solve_as_linear(a: &FieldElt) -> Option<FieldElt> {
    let ctx = &a.ctx;
    let m = ctx.degree();
    let p = ctx.p();
    // Column j = coordinates of basis_j^p - basis_j.
    let mut cols = Vec::with_capacity(m);
    for j in 0..m {
        let mut basis = vec![0u64; m];
        basis[j] = 1;
        let e = FieldElt {
            ctx: ctx.clone(),
            coeffs: basis,
        };
        let img = e.frobenius().sub(&e);
        cols.push(img.coeffs);
    }
    // Augmented matrix rows: mat[i][j], rhs a_i.
    let mut mat = vec![vec![0u64; m]; m];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..m {
            mat[i][j] = col[i];
        }
    }
    let mut rhs = a.coeffs.clone();

    // Row-reduce; record pivot column per row.
    let mut pivot_of_col = vec![usize::MAX; m];
    let mut row = 0;
    for col in 0..m {
        let Some(pr) = (row..m).find(|&r| mat[r][col] != 0) else {
            continue;
        };
        mat.swap(row, pr);
        rhs.swap(row, pr);
        let inv = fp_scalar_inv(mat[row][col], p);
        for x in mat[row].iter_mut() {
            *x = (*x as u128 * inv as u128 % p as u128) as u64;
        }
        rhs[row] = (rhs[row] as u128 * inv as u128 % p as u128) as u64;
        for r in 0..m {
            if r != row && mat[r][col] != 0 {
                let f = mat[r][col];
                for c in 0..m {
                    let sub = (f as u128 * mat[row][c] as u128 % p as u128) as u64;
                    mat[r][c] = (mat[r][c] + p - sub) % p;
                }
                let sub = (f as u128 * rhs[row] as u128 % p as u128) as u64;
                rhs[r] = (rhs[r] + p - sub) % p;
            }
        }
        pivot_of_col[col] = row;
        row += 1;
    }
    // Inconsistent if a zero row has nonzero rhs.
    for r in row..m {
        if rhs[r] != 0 {
            return None;
        }
    }
    // Particular solution: free columns set to 0.
    let mut x0 = vec![0u64; m];
    for col in 0..m {
        if pivot_of_col[col] != usize::MAX {
            x0[col] = rhs[pivot_of_col[col]];
        }
    }
    let particular = FieldElt {
        ctx: ctx.clone(),
        coeffs: x0,
    };
    // Solution set is particular + F_p (the kernel of t^p - t); take the
    // lex-least of the p candidates.
    let mut best = particular.clone();
    for c in 1..p {
        let cand = particular.add(&ctx.from_scalar(c));
        if cand < best {
            best = cand;
        }
    }
    debug_assert!(best.frobenius().sub(&best) == *a);
    Some(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_f25_modulus() {
        // Least-lex irreducible quadratic over F_5 is T^2 + T + 1.
        let ctx = FieldCtx::canonical(5, 2).unwrap();
        assert_eq!(ctx.modulus(), &[1, 1, 1]);
    }

    #[test]
    fn prime_field_arithmetic() {
        let ctx = FieldCtx::prime(7).unwrap();
        let a = ctx.from_scalar(3);
        let b = ctx.from_scalar(5);
        assert_eq!(a.mul(&b), ctx.from_scalar(1));
        assert_eq!(a.inv().unwrap(), ctx.from_scalar(5));
    }

    #[test]
    fn inverse_round_trip_f25() {
        let ctx = FieldCtx::canonical(5, 2).unwrap();
        for idx in 1..25u128 {
            let a = ctx.element_from_index(idx);
            let ainv = a.inv().unwrap();
            assert!(a.mul(&ainv).is_one(), "inverse failed at index {idx}");
        }
    }

    #[test]
    fn frobenius_is_additive_and_fixes_prime_field() {
        let ctx = FieldCtx::canonical(5, 2).unwrap();
        for i in 0..25u128 {
            for j in 0..25u128 {
                let a = ctx.element_from_index(i);
                let b = ctx.element_from_index(j);
                assert_eq!(
                    a.add(&b).frobenius(),
                    a.frobenius().add(&b.frobenius())
                );
            }
        }
        for c in 0..5 {
            let a = ctx.from_scalar(c);
            assert_eq!(a.frobenius(), a);
        }
    }

    #[test]
    fn artin_schreier_in_place_and_with_extension() {
        let ctx = FieldCtx::prime(5).unwrap();
        // a = 0: least root is 0.
        let r = artin_schreier_root(&ctx.zero()).unwrap();
        assert!(r.root.is_zero());
        assert_eq!(r.ctx, ctx);
        // a = 1 over F_5: trace(1) = 1 != 0, so a degree-5 extension is forced.
        let r = artin_schreier_root(&ctx.one()).unwrap();
        assert_eq!(r.ctx.degree(), 5);
        let lifted = r.embedding.map(&ctx.one());
        assert_eq!(r.root.frobenius().sub(&r.root), lifted);
    }

    #[test]
    fn artin_schreier_trace_zero_in_f25() {
        let ctx = FieldCtx::canonical(5, 2).unwrap();
        // Find an element of trace zero other than 0 and solve in place.
        let a = (0..25u128)
            .map(|i| ctx.element_from_index(i))
            .find(|e| !e.is_zero() && e.trace() == 0)
            .unwrap();
        let r = artin_schreier_root(&a).unwrap();
        assert_eq!(r.ctx, ctx, "trace-zero element must solve without extension");
        assert_eq!(r.root.frobenius().sub(&r.root), a);
    }
}
