//! Polynomials in y whose coefficients are one-variable series in x.
//!
//! This is the working shape for monic germ data: Weierstrass
//! preparation turns a germ y^n + (tail)*x into a distinguished monic
//! polynomial, and resultants of prepared branches measure intersection
//! multiplicities exactly, with honest precision bookkeeping.

use crate::biseries::BiSeries;
use crate::error::{Error, Result};
use crate::ffield::{FieldCtx, FieldElt};
use crate::series::{Series1, PREC_EXACT};

/// Dense polynomial in y; index = power of y. Length is structural
/// (a trailing coefficient may be zero only to its precision).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YPoly {
    ctx: FieldCtx,
    coeffs: Vec<Series1>,
}

impl YPoly {
    /// Build from dense coefficients (lowest power first, at least one).
    pub fn new(ctx: FieldCtx, coeffs: Vec<Series1>) -> Self {
        assert!(!coeffs.is_empty(), "a y-polynomial needs at least one coefficient");
        YPoly { ctx, coeffs }
    }

    /// The constant polynomial 1.
    pub fn one(ctx: &FieldCtx) -> Self {
        YPoly::new(ctx.clone(), vec![Series1::one(ctx)])
    }

    /// The monomial y^k.
    pub fn y_pow(ctx: &FieldCtx, k: usize) -> Self {
        let mut coeffs = vec![Series1::zero_exact(ctx); k + 1];
        coeffs[k] = Series1::one(ctx);
        YPoly::new(ctx.clone(), coeffs)
    }

    /// Owning context.
    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    /// Structural degree (length - 1).
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients, lowest power first.
    pub fn coeffs(&self) -> &[Series1] {
        &self.coeffs
    }

    /// Coefficient of y^k (zero beyond the structural degree).
    pub fn coeff(&self, k: usize) -> Series1 {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| Series1::zero_exact(&self.ctx))
    }

    /// True when the leading coefficient is exactly 1.
    pub fn is_monic(&self) -> bool {
        let lead = self.coeffs.last().unwrap();
        *lead == Series1::one(&self.ctx)
    }

    /// Weakest precision among the coefficients, adjusted so that the
    /// associated two-variable series has this total-degree bound.
    pub fn joint_prec(&self) -> i64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                if c.is_exact() {
                    PREC_EXACT
                } else {
                    c.prec() + j as i64
                }
            })
            .min()
            .unwrap()
    }

    /// Sum (degrees may differ).
    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k).add(&other.coeff(k))).collect();
        YPoly::new(self.ctx.clone(), coeffs)
    }

    /// Difference.
    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k).sub(&other.coeff(k))).collect();
        YPoly::new(self.ctx.clone(), coeffs)
    }

    /// Product.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.coeffs.len() + other.coeffs.len() - 1;
        let mut coeffs = vec![Series1::zero_exact(&self.ctx); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        YPoly::new(self.ctx.clone(), coeffs)
    }

    /// Scale every coefficient by a series.
    pub fn scale(&self, s: &Series1) -> Self {
        YPoly::new(
            self.ctx.clone(),
            self.coeffs.iter().map(|c| c.mul(s)).collect(),
        )
    }

    /// Substitute y -> y + a for a field constant a (exact binomial shift).
    pub fn shift_y(&self, a: &FieldElt) -> Self {
        let n = self.coeffs.len();
        let mut out = vec![Series1::zero_exact(&self.ctx); n];
        for (j, c) in self.coeffs.iter().enumerate() {
            // (y + a)^j = sum_k C(j,k) a^{j-k} y^k; binomials mod p via Lucas.
            let mut apow = vec![self.ctx.one()];
            for _ in 0..j {
                apow.push(apow.last().unwrap().mul(a));
            }
            for k in 0..=j {
                let cjk = binom_mod_p(j as u64, k as u64, self.ctx.p());
                if cjk != 0 {
                    let factor = apow[j - k].scale(cjk);
                    out[k] = out[k].add(&c.scale(&factor));
                }
            }
        }
        YPoly::new(self.ctx.clone(), out)
    }

    /// Remainder of self modulo a monic divisor (long division in y).
    pub fn rem_monic(&self, divisor: &Self) -> Self {
        assert!(divisor.is_monic(), "division requires a monic divisor");
        let d = divisor.degree();
        let mut rem = self.coeffs.clone();
        while rem.len() > d {
            let lead = rem.pop().unwrap();
            if lead.is_zero_to_prec() && lead.is_exact() {
                continue;
            }
            let k = rem.len() - d; // lead multiplies y^{k} * divisor
            for (i, c) in divisor.coeffs.iter().take(d).enumerate() {
                rem[k + i] = rem[k + i].sub(&lead.mul(c));
            }
        }
        while rem.len() > 1
            && rem.last().map_or(false, |c| c.is_zero_to_prec() && c.is_exact())
        {
            rem.pop();
        }
        YPoly::new(self.ctx.clone(), rem)
    }

    /// Derivative in y.
    pub fn derive_y(&self) -> Self {
        if self.coeffs.len() == 1 {
            return YPoly::new(self.ctx.clone(), vec![Series1::zero_exact(&self.ctx)]);
        }
        let p = self.ctx.p();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.scale(&self.ctx.from_scalar((k as u64) % p)))
            .collect();
        YPoly::new(self.ctx.clone(), coeffs)
    }

    /// Coefficient-wise derivative in x.
    pub fn derive_x(&self) -> Self {
        YPoly::new(
            self.ctx.clone(),
            self.coeffs.iter().map(Series1::derive_x).collect(),
        )
    }

    /// Evaluate at a series value for y.
    pub fn eval_y(&self, v: &Series1) -> Series1 {
        let mut acc = Series1::zero_exact(&self.ctx);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(v).add(c);
        }
        acc
    }

    /// Expand into a two-variable series.
    pub fn to_biseries(&self) -> BiSeries {
        let mut acc = BiSeries::zero(&self.ctx, PREC_EXACT);
        for (j, c) in self.coeffs.iter().enumerate() {
            let slice = BiSeries::from_series_x(c).mul_monomial(0, j as i64);
            acc = acc.add(&slice);
        }
        acc
    }

    /// Read a two-variable series with bounded y-support as a y-polynomial.
    /// Slice j keeps precision (total prec - j).
    pub fn from_biseries(b: &BiSeries, y_degree: usize) -> Self {
        let coeffs = (0..=y_degree as i64).map(|j| b.y_slice(j)).collect();
        YPoly::new(b.ctx().clone(), coeffs)
    }

    /// Map all coefficients into a larger field along an embedding.
    pub fn map_ctx(&self, emb: &crate::ffield::Embedding) -> Self {
        YPoly {
            ctx: emb.to_ctx().clone(),
            coeffs: self.coeffs.iter().map(|c| c.map_ctx(emb)).collect(),
        }
    }
}

/// Determinant of an n x n matrix of y-polynomials, by the same
/// subset-memoized Laplace expansion as `det_series`.
pub fn det_ypoly(n: usize, ctx: &FieldCtx, entry: &dyn Fn(usize, usize) -> YPoly) -> YPoly {
    assert!(n <= 16, "determinant dimension out of the supported range");
    if n == 0 {
        return YPoly::one(ctx);
    }
    let full = (1usize << n) - 1;
    let mut dp: Vec<Option<YPoly>> = vec![None; full + 1];
    dp[0] = Some(YPoly::one(ctx));
    for mask in 1..=full {
        let row = (mask as u32).count_ones() as usize - 1;
        let mut acc = YPoly::new(ctx.clone(), vec![Series1::zero_exact(ctx)]);
        let mut pos = 0;
        for col in 0..n {
            if mask & (1 << col) == 0 {
                continue;
            }
            let sub = dp[mask & !(1 << col)]
                .clone()
                .expect("smaller masks are filled first");
            let term = entry(row, col).mul(&sub);
            acc = if (row + pos) % 2 == 1 {
                acc.sub(&term)
            } else {
                acc.add(&term)
            };
            pos += 1;
        }
        dp[mask] = Some(acc);
    }
    dp[full].clone().unwrap()
}

/// Binomial coefficient mod p via Lucas's theorem.
pub(crate) fn binom_mod_p(n: u64, k: u64, p: u64) -> u64 {
    if k > n {
        return 0;
    }
    let (mut n, mut k) = (n, k);
    let mut acc = 1u64;
    while n > 0 || k > 0 {
        let (nd, kd) = (n % p, k % p);
        if kd > nd {
            return 0;
        }
        // Small binomial by multiplicative formula, exact in u128.
        let mut num = 1u128;
        let mut den = 1u128;
        for t in 0..kd {
            num = num * (nd - t) as u128 % p as u128;
            den = den * (t + 1) as u128 % p as u128;
        }
        let den_inv = mod_inv(den as u64, p);
        acc = (acc as u128 * num % p as u128 * den_inv as u128 % p as u128) as u64;
        n /= p;
        k /= p;
    }
    acc
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // Fermat inverse, p prime.
    let mut acc = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * b as u128 % p as u128) as u64;
        }
        b = (b as u128 * b as u128 % p as u128) as u64;
        e >>= 1;
    }
    acc
}

// ---------------------------------------------------------------------------
// Weierstrass preparation
// ---------------------------------------------------------------------------

/// Distinguished monic polynomial associated with a germ f whose pure-y
/// part is exactly y^n: the unique monic W = y^n - r (deg_y r < n) with
/// f = (unit) * W. Coefficients are certified below x-precision
/// max(1, prec/n - 1); beyond that the division cascade could mix in
/// unknown terms, so the claim stops there.
pub fn weierstrass_prepare(f: &BiSeries, n: usize) -> Result<YPoly> {
    let ctx = f.ctx().clone();
    // Exact inputs still have an infinite unit cofactor, so pick a working
    // precision from the support; truncated inputs keep their own bound.
    let f = if f.is_exact() {
        let bound =
            2 * (f.max_x_degree().unwrap_or(0) + f.max_y_degree().unwrap_or(0) + n as i64 + 2);
        f.truncate(bound)
    } else {
        f.clone()
    };
    let total = f.prec();
    if total <= n as i64 {
        return Err(Error::Precision(format!(
            "preparation of a degree-{n} germ needs total precision above {n}"
        )));
    }
    let out_prec = ((total / n as i64) - 1).max(1);
    let y_cap = (total + n as i64) as usize; // slice-degree cap inside the cascade
    let slice = |e: i64| -> Vec<FieldElt> {
        let mut v = vec![ctx.zero(); y_cap + 1];
        for (&(i, j), c) in f.iter_terms() {
            if i == e && (j as usize) <= y_cap {
                v[j as usize] = c.clone();
            }
        }
        v
    };
    let f0 = slice(0);
    for (j, c) in f0.iter().enumerate() {
        let expect_one = j == n;
        if expect_one && !c.is_one() {
            return Err(Error::NotInClass(
                "pure-y part of the germ is not exactly y^n".into(),
            ));
        }
        if !expect_one && !c.is_zero() {
            return Err(Error::NotInClass(
                "pure-y part of the germ is not exactly y^n".into(),
            ));
        }
    }
    // Divide y^n by f, x-order by x-order: q_0 = 1, r_0 = 0, and for e >= 1
    //   t_e = -(sum_{d<e} q_d f_{e-d}),  q_e = t_e div y^n,  r_e = t_e mod y^n.
    let mut q: Vec<Vec<FieldElt>> = vec![{
        let mut v = vec![ctx.zero(); y_cap + 1];
        v[0] = ctx.one();
        v
    }];
    let mut r: Vec<Vec<FieldElt>> = vec![vec![ctx.zero(); n]];
    for e in 1..out_prec {
        let mut t = vec![ctx.zero(); y_cap + 1];
        for d in 0..(e as usize) {
            let fe = slice(e - d as i64);
            for (a, qa) in q[d].iter().enumerate() {
                if qa.is_zero() {
                    continue;
                }
                for (b, fb) in fe.iter().enumerate() {
                    if fb.is_zero() {
                        continue;
                    }
                    if a + b <= y_cap {
                        t[a + b] = t[a + b].sub(&qa.mul(fb));
                    }
                }
            }
        }
        // t_e = -(accumulated products)
        let re: Vec<FieldElt> = t[..n].to_vec();
        let mut qe = vec![ctx.zero(); y_cap + 1];
        for j in n..=y_cap {
            qe[j - n] = t[j].clone();
        }
        q.push(qe);
        r.push(re);
    }
    // W = y^n - r; coefficient k is the series -sum_e r_e[k] x^e.
    let mut coeffs = Vec::with_capacity(n + 1);
    for k in 0..n {
        let cs: Vec<FieldElt> = (0..out_prec as usize).map(|e| r[e][k].neg()).collect();
        coeffs.push(Series1::new(ctx.clone(), 0, cs, out_prec));
    }
    coeffs.push(Series1::one(&ctx));
    Ok(YPoly::new(ctx, coeffs))
}

// ---------------------------------------------------------------------------
// Determinants and resultants
// ---------------------------------------------------------------------------

/// Determinant of an n x n matrix of series, by Laplace expansion with
/// memoization over column subsets (exact, no divisions).
pub fn det_series(n: usize, ctx: &FieldCtx, entry: &dyn Fn(usize, usize) -> Series1) -> Series1 {
    assert!(n <= 16, "determinant dimension out of the supported range");
    if n == 0 {
        return Series1::one(ctx);
    }
    // dp[mask] = determinant of rows 0..popcount(mask) with columns mask.
    let full = (1usize << n) - 1;
    let mut dp: Vec<Option<Series1>> = vec![None; full + 1];
    dp[0] = Some(Series1::one(ctx));
    for mask in 1..=full {
        let row = (mask as u32).count_ones() as usize - 1;
        let mut acc = Series1::zero_exact(ctx);
        let mut pos = 0;
        for col in 0..n {
            if mask & (1 << col) == 0 {
                continue;
            }
            // Laplace along the last row of the submatrix: sign is
            // (-1)^{row + position of col within the mask}.
            let sub = dp[mask & !(1 << col)]
                .clone()
                .expect("smaller masks are filled first");
            let term = entry(row, col).mul(&sub);
            acc = if (row + pos) % 2 == 1 {
                acc.sub(&term)
            } else {
                acc.add(&term)
            };
            pos += 1;
        }
        dp[mask] = Some(acc);
    }
    dp[full].clone().unwrap()
}

/// Resultant in y of two y-polynomials (Sylvester determinant).
pub fn resultant_y(f: &YPoly, g: &YPoly) -> Series1 {
    let ctx = f.ctx().clone();
    let (df, dg) = (f.degree(), g.degree());
    if df == 0 {
        return f.coeff(0).pow_usize(dg);
    }
    if dg == 0 {
        return g.coeff(0).pow_usize(df);
    }
    let n = df + dg;
    let zero = Series1::zero_exact(&ctx);
    let entry = move |r: usize, c: usize| -> Series1 {
        if r < dg {
            // Row of f-coefficients, highest first, shifted by r.
            let idx = df as i64 - (c as i64 - r as i64);
            if idx < 0 || idx > df as i64 {
                zero.clone()
            } else {
                f.coeff(idx as usize)
            }
        } else {
            let rr = r - dg;
            let idx = dg as i64 - (c as i64 - rr as i64);
            if idx < 0 || idx > dg as i64 {
                zero.clone()
            } else {
                g.coeff(idx as usize)
            }
        }
    };
    det_series(n, &ctx, &entry)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn f5() -> FieldCtx {
        FieldCtx::prime(5).unwrap()
    }

    fn lin(ctx: &FieldCtx, c: u64) -> YPoly {
        // y + c*x
        YPoly::new(
            ctx.clone(),
            vec![
                Series1::monomial(ctx.from_scalar(c), 1),
                Series1::one(ctx),
            ],
        )
    }

    #[test]
    fn resultant_of_transverse_lines() {
        let ctx = f5();
        // Res_y(y + x, y + 2x) = 2x - x = x.
        let r = resultant_y(&lin(&ctx, 1), &lin(&ctx, 2));
        assert_eq!(r, Series1::monomial(ctx.one(), 1));
    }

    #[test]
    fn resultant_mixed_degrees() {
        let ctx = f5();
        // Res_y(y^2 + x, y - 1) = 1 + x.
        let f = YPoly::new(
            ctx.clone(),
            vec![
                Series1::monomial(ctx.one(), 1),
                Series1::zero_exact(&ctx),
                Series1::one(&ctx),
            ],
        );
        let g = YPoly::new(
            ctx.clone(),
            vec![
                Series1::monomial(ctx.from_scalar(4), 0),
                Series1::one(&ctx),
            ],
        );
        let r = resultant_y(&f, &g);
        assert_eq!(
            r,
            Series1::from_poly(&ctx, vec![ctx.one(), ctx.one()])
        );
    }

    #[test]
    fn weierstrass_of_linear_branch_recovers_implicit_root() {
        let ctx = f5();
        // f = y + (1 + y) x: the distinguished polynomial is y - v(x) with
        // v = -x + x^2 - x^3 + ... (v = -x(1+v) solved by iteration).
        let mut terms = BTreeMap::new();
        terms.insert((0, 1), ctx.one()); // y
        terms.insert((1, 0), ctx.one()); // x
        terms.insert((1, 1), ctx.one()); // xy
        let f = BiSeries::new(ctx.clone(), terms, 8);
        let w = weierstrass_prepare(&f, 1).unwrap();
        assert!(w.is_monic());
        let c0 = w.coeff(0);
        // W = y - v with v = -x/(1+x), so the constant coefficient is
        // -v = x/(1+x) = x - x^2 + x^3 - ...
        let x = Series1::monomial(ctx.one(), 1).truncate(c0.prec());
        let expect = x
            .div(&Series1::from_poly(&ctx, vec![ctx.one(), ctx.one()]))
            .unwrap();
        assert!(c0.eq_to_joint_prec(&expect));
    }

    #[test]
    fn rem_monic_reduces_degree() {
        let ctx = f5();
        let f = YPoly::y_pow(&ctx, 3); // y^3
        let w = lin(&ctx, 2); // y + 2x
        let r = f.rem_monic(&w);
        assert_eq!(r.degree(), 0);
        // y^3 mod (y + 2x): y = -2x => (-2x)^3 = -8x^3 = 2x^3 over F_5.
        assert_eq!(r.coeff(0), Series1::monomial(ctx.from_scalar(2), 3));
    }

    #[test]
    fn shift_y_is_substitution() {
        let ctx = f5();
        // (y+1)^2 = y^2 + 2y + 1 via shifting y^2 by a = 1.
        let f = YPoly::y_pow(&ctx, 2);
        let g = f.shift_y(&ctx.one());
        assert_eq!(g.coeff(0), Series1::one(&ctx));
        assert_eq!(g.coeff(1), Series1::monomial(ctx.from_scalar(2), 0));
        assert_eq!(g.coeff(2), Series1::one(&ctx));
    }
}
