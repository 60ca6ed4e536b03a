//! Parabolic combinatorics and germ classification.
//!
//! A germ class is cut out by a decreasing tuple (a partition): membership
//! means every monomial of f - y^n clears the staircase of exponents, and
//! the open locus additionally requires each staircase corner to carry a
//! unit. Members factor into branch factors y^l + c(x,y) x by a peeling
//! recursion that solves one residue equation per factor and lifts the
//! root order by order.

use std::collections::BTreeMap;

use crate::biseries::BiSeries;
use crate::error::{Error, Result};
use crate::ffield::{Embedding, FieldCtx, FieldElt};
use crate::poly::Poly;
use crate::series::Series1;
use crate::ypoly::{resultant_y, YPoly};

// ---------------------------------------------------------------------------
// Partitions and parabolic types
// ---------------------------------------------------------------------------

/// Weakly decreasing tuple of positive integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition(Vec<usize>);

impl Partition {
    /// Validate a decreasing tuple.
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::BadInput("partition must have at least one part".into()));
        }
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::BadInput("partition parts must be positive".into()));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::BadInput("partition parts must be weakly decreasing".into()));
        }
        Ok(Partition(parts))
    }

    /// Parts, largest first.
    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    /// Sum of the parts.
    pub fn n(&self) -> usize {
        self.0.iter().sum()
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// True when there is exactly one part.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Conjugate partition (transpose of the Young diagram).
    pub fn conjugate(&self) -> Partition {
        let max = self.0[0];
        let parts = (1..=max)
            .map(|i| self.0.iter().filter(|&&p| p >= i).count())
            .collect();
        Partition(parts)
    }

    /// Tail sums: gamma[i] = sum of parts after index i, so gamma[0] = n
    /// and gamma[s] = 0, strictly decreasing with steps equal to the parts.
    pub fn gamma(&self) -> Vec<i64> {
        let s = self.0.len();
        let mut g = vec![0i64; s + 1];
        for i in (0..s).rev() {
            g[i] = g[i + 1] + self.0[i] as i64;
        }
        g
    }
}

/// A parabolic type: a composition mu with its conjugate partition and
/// the derived staircase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParabolicType {
    mu: Vec<usize>,
    lambda: Partition,
}

impl ParabolicType {
    /// Build from the block sizes mu (any positive composition).
    pub fn from_mu(mu: Vec<usize>) -> Result<Self> {
        if mu.is_empty() || mu.iter().any(|&b| b == 0) {
            return Err(Error::BadInput("block sizes must be positive".into()));
        }
        let mut sorted = mu.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let lambda = Partition::new(sorted)?.conjugate();
        Ok(ParabolicType { mu, lambda })
    }

    /// Build directly from the partition side.
    pub fn from_lambda(lambda: Partition) -> Self {
        let mu = lambda.conjugate().0;
        ParabolicType { mu, lambda }
    }

    /// Block sizes.
    pub fn mu(&self) -> &[usize] {
        &self.mu
    }

    /// The partition conjugate to mu.
    pub fn lambda(&self) -> &Partition {
        &self.lambda
    }

    /// Total rank n.
    pub fn n(&self) -> usize {
        self.mu.iter().sum()
    }

    /// Exponents m_1..m_n: m_i is the unique j with
    /// gamma[j] <= n - i < gamma[j-1].
    pub fn m_exponents(&self) -> Vec<usize> {
        let n = self.n() as i64;
        let gamma = self.lambda.gamma();
        let s = self.lambda.len();
        (1..=n)
            .map(|i| {
                let target = n - i;
                (1..=s)
                    .find(|&j| gamma[j] <= target && target < gamma[j - 1])
                    .expect("staircase covers 0..n-1")
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Germ classification
// ---------------------------------------------------------------------------

/// Outcome of classifying a germ against a staircase class.
#[derive(Clone, Debug)]
pub struct GermClass {
    /// Membership in the class (every monomial clears the staircase).
    pub in_class: bool,
    /// Membership in the open locus (corners all carry units).
    pub in_open: bool,
    /// Extracted cofactors a_1..a_s (canonical witness), present only
    /// when `in_class`.
    pub witnesses: Vec<BiSeries>,
    /// Constant terms of the witnesses (the staircase corner values).
    pub corner_values: Vec<FieldElt>,
}

/// Classify f against the class of a decreasing tuple eta.
///
/// f must be known beyond total degree n = sum(eta); the canonical
/// witness assigns the monomial x^a y^b (a >= 1) to block min(a, s).
pub fn classify_germ(f: &BiSeries, eta: &Partition) -> Result<GermClass> {
    let n = eta.n() as i64;
    let s = eta.len();
    let gamma = eta.gamma();
    if f.prec() <= n {
        return Err(Error::Precision(format!(
            "classification against a degree-{n} staircase needs total precision above {n}"
        )));
    }
    let ctx = f.ctx().clone();
    let mut in_class = true;
    let mut blocks: Vec<BTreeMap<(i64, i64), FieldElt>> = vec![BTreeMap::new(); s + 1];
    for (&(a, b), c) in f.iter_terms() {
        if a == 0 {
            // The pure-y part must be exactly y^n.
            if b != n || !c.is_one() {
                in_class = false;
            }
            continue;
        }
        let block = (a as usize).min(s);
        if b < gamma[block] {
            in_class = false;
            continue;
        }
        blocks[block].insert((a - block as i64, b - gamma[block]), c.clone());
    }
    if f.coeff(0, n).is_zero() {
        in_class = false;
    }
    if !in_class {
        return Ok(GermClass {
            in_class: false,
            in_open: false,
            witnesses: Vec::new(),
            corner_values: Vec::new(),
        });
    }
    let mut witnesses = Vec::with_capacity(s);
    let mut corner_values = Vec::with_capacity(s);
    let mut in_open = true;
    for i in 1..=s {
        let prec = if f.is_exact() {
            crate::series::PREC_EXACT
        } else {
            f.prec() - i as i64 - gamma[i]
        };
        let w = BiSeries::new(ctx.clone(), std::mem::take(&mut blocks[i]), prec);
        let corner = w.eval_origin();
        if corner.is_zero() {
            in_open = false;
        }
        corner_values.push(corner);
        witnesses.push(w);
    }
    Ok(GermClass {
        in_class,
        in_open,
        witnesses,
        corner_values,
    })
}

// ---------------------------------------------------------------------------
// Hensel factorization into branch factors
// ---------------------------------------------------------------------------

/// One branch factor y^lambda + tail(x,y) * x.
#[derive(Clone, Debug)]
pub struct Branch {
    /// y-degree of the factor.
    pub lambda: usize,
    /// Cofactor c(x,y); the factor is y^lambda + c * x.
    pub tail: BiSeries,
}

impl Branch {
    /// Constant term of the cofactor (the branch's separating value).
    pub fn constant(&self) -> FieldElt {
        self.tail.eval_origin()
    }

    /// The factor as a two-variable series.
    pub fn to_biseries(&self) -> BiSeries {
        BiSeries::monomial(self.tail.ctx().one(), 0, self.lambda as i64)
            .add(&self.tail.mul_monomial(1, 0))
    }

    /// Map into a larger field.
    pub fn map_ctx(&self, emb: &Embedding) -> Branch {
        Branch {
            lambda: self.lambda,
            tail: self.tail.map_ctx(emb),
        }
    }
}

/// Result of a branch factorization: the (possibly extended) field the
/// branches live in, the embedding from the input field, and the branches
/// sorted by (lambda descending, constant ascending).
#[derive(Clone, Debug)]
pub struct Factorization {
    pub ctx: FieldCtx,
    pub embedding: Embedding,
    pub branches: Vec<Branch>,
}

impl Factorization {
    /// Product of all branch factors (for multiply-back checks).
    pub fn product(&self) -> BiSeries {
        let mut acc = BiSeries::constant(self.ctx.one());
        for b in &self.branches {
            acc = acc.mul(&b.to_biseries());
        }
        acc
    }
}

/// Factor a germ in the open staircase class into branch factors, one of
/// y-degree per part. Extends the field when a residue root requires it.
pub fn hensel_factor(f: &BiSeries, lambda: &Partition) -> Result<Factorization> {
    let class = classify_germ(f, lambda)?;
    if !class.in_class {
        return Err(Error::NotInClass(format!(
            "germ does not match the staircase of {:?}",
            lambda.parts()
        )));
    }
    if !class.in_open {
        return Err(Error::NotInClass(format!(
            "a staircase corner of {:?} carries a non-unit",
            lambda.parts()
        )));
    }
    let ctx = f.ctx().clone();
    // The lifting loop needs a finite window; exact inputs get a default
    // one wide enough to see every staircase interaction twice over.
    let f = if f.is_exact() {
        let maxdeg = f.iter_terms().map(|(&(i, j), _)| i + j).max().unwrap_or(0);
        f.truncate(2 * (maxdeg + lambda.n() as i64) + 6)
    } else {
        f.clone()
    };
    let (mut branches, ctx2, emb) = peel(f, lambda.parts().to_vec(), ctx)?;
    branches.sort_by(|a, b| {
        b.lambda
            .cmp(&a.lambda)
            .then_with(|| a.constant().cmp(&b.constant()))
    });
    Ok(Factorization {
        ctx: ctx2,
        embedding: emb,
        branches,
    })
}

/// Extract the canonical cofactors a_1..a_s of a germ already known to
/// match the staircase pattern.
fn extract_cofactors(f: &BiSeries, parts: &[usize]) -> Vec<BiSeries> {
    let s = parts.len();
    let gamma = Partition(parts.to_vec()).gamma();
    let ctx = f.ctx().clone();
    let mut blocks: Vec<BTreeMap<(i64, i64), FieldElt>> = vec![BTreeMap::new(); s + 1];
    for (&(a, b), c) in f.iter_terms() {
        if a == 0 {
            continue;
        }
        let block = (a as usize).min(s);
        debug_assert!(b >= gamma[block], "pattern violated during peeling");
        blocks[block].insert((a - block as i64, b - gamma[block]), c.clone());
    }
    (1..=s)
        .map(|i| {
            let prec = if f.is_exact() {
                crate::series::PREC_EXACT
            } else {
                f.prec() - i as i64 - gamma[i]
            };
            BiSeries::new(ctx.clone(), std::mem::take(&mut blocks[i]), prec)
        })
        .collect()
}

/// Evaluate a polynomial-in-c (coefficients low to high) at c.
fn eval_cpoly(coeffs: &[BiSeries], c: &BiSeries, ctx: &FieldCtx) -> BiSeries {
    let mut acc = BiSeries::zero(ctx, crate::series::PREC_EXACT);
    for k in coeffs.iter().rev() {
        acc = acc.mul(c).add(k);
    }
    acc
}

/// Recursive peeling: factor off one branch of the smallest part, then
/// recurse on the cofactor. Returns the branches, the final (possibly
/// extended) field, and the embedding from the field this call received.
fn peel(
    f: BiSeries,
    parts: Vec<usize>,
    ctx: FieldCtx,
) -> Result<(Vec<Branch>, FieldCtx, Embedding)> {
    let s = parts.len();
    let gamma = Partition(parts.clone()).gamma();
    let cof = extract_cofactors(&f, &parts);
    if s == 1 {
        let branch = Branch {
            lambda: parts[0],
            tail: cof.into_iter().next().unwrap(),
        };
        let ident = Embedding::identity(&ctx);
        return Ok((vec![branch], ctx, ident));
    }
    let lam_s = parts[s - 1] as i64;
    // Symbolic cofactor chain b_i(c) as polynomials in the unknown c:
    //   b_1 = a_1 - c y^{e_1},   b_i = a_i - b_{i-1} c y^{e_i},
    // with e_i = lambda_i - lambda_s >= 0. The peeled factor is
    // y^{lam_s} + c x and the constraint is Phi(c) = b_{s-1} c - a_s = 0.
    let e = |i: usize| -> i64 { parts[i - 1] as i64 - lam_s };
    let mut b: Vec<BiSeries> = vec![cof[0].clone(), BiSeries::monomial(ctx.one(), 0, e(1)).neg()];
    for i in 2..s {
        let ymon = BiSeries::monomial(ctx.one(), 0, e(i));
        let mut next = vec![cof[i - 1].clone()];
        for coeff in &b {
            next.push(coeff.mul(&ymon).neg());
        }
        b = next;
    }
    let mut phi: Vec<BiSeries> = Vec::with_capacity(b.len() + 1);
    phi.push(cof[s - 1].neg());
    phi.extend(b.iter().cloned());
    // Residue polynomial over the field: constant terms of the phi chain.
    let phibar = Poly::new(
        ctx.clone(),
        phi.iter().map(|q| q.eval_origin()).collect(),
    );
    let (root, big, emb) = phibar.least_root_with_extension()?;
    if big != ctx {
        // Restart this level in the extended field.
        let f2 = f.map_ctx(&emb);
        let (branches, fin, emb2) = peel(f2, parts, big)?;
        return Ok((branches, fin, emb.then(&emb2)));
    }
    let dphibar = phibar.derivative();
    let slope = dphibar.eval(&root);
    if slope.is_zero() {
        return Err(Error::RepeatedResidueRoot);
    }
    let slope_inv = BiSeries::constant(slope.inv()?);
    // Linear lifting: each step divides the defect by the constant slope,
    // improving the solution by at least one total order. After k steps
    // the defect vanishes below order k+1, so it is evaluated inside a
    // window that grows one degree per step — the correction's leading
    // stratum, the only part the order argument needs, is unaffected —
    // and the exit is certified by a full-window evaluation.
    let prec = f.prec();
    // The iterate's terms are exact field elements; the window bookkeeping
    // above, not the series' own precision label, tracks how far the
    // equation is satisfied.
    let reprec = |b: &BiSeries| -> BiSeries {
        BiSeries::new(
            ctx.clone(),
            b.iter_terms().map(|(&k, v)| (k, v.clone())).collect(),
            prec,
        )
    };
    let mut c = BiSeries::constant(root).truncate(prec);
    let mut order: i64 = 1;
    let mut steps = 0;
    loop {
        let w = (order + 1).min(prec);
        let cw = c.truncate(w);
        let phiw: Vec<BiSeries> = phi.iter().map(|q| q.truncate(w)).collect();
        let defect = eval_cpoly(&phiw, &cw, &ctx);
        if defect.is_zero_to_prec() && w >= prec {
            break;
        }
        if defect.is_zero_to_prec() {
            // No correction to apply: the defect already vanishes below w,
            // so widen the scan geometrically to find its first stratum.
            order = 2 * w;
        } else {
            // A correction divided by the constant slope kills the defect's
            // leading stratum, so the next defect starts one order higher.
            let gained = defect.ord_or_prec() + 1;
            c = reprec(&c.sub(&defect.mul(&slope_inv)));
            order = gained;
        }
        steps += 1;
        assert!(
            steps <= 4 * prec.max(4),
            "residue lifting failed to contract; defect order stalled"
        );
    }
    // Concrete cofactor chain at the solved c.
    let mut bvals: Vec<BiSeries> = Vec::with_capacity(s - 1);
    let ymon1 = BiSeries::monomial(ctx.one(), 0, e(1));
    bvals.push(cof[0].sub(&c.mul(&ymon1)));
    for i in 2..s {
        let ymon = BiSeries::monomial(ctx.one(), 0, e(i));
        let prev = bvals[i - 2].clone();
        bvals.push(cof[i - 1].sub(&prev.mul(&c).mul(&ymon)));
    }
    let branch = Branch {
        lambda: lam_s as usize,
        tail: c,
    };
    // Remaining cofactor germ g = y^{gamma_0 - lam_s} + sum b_i x^i y^{gamma_i - lam_s}.
    let mut g = BiSeries::monomial(ctx.one(), 0, gamma[0] - lam_s);
    for (i, bi) in bvals.iter().enumerate() {
        let idx = i + 1;
        g = g.add(&bi.mul_monomial(idx as i64, gamma[idx] - lam_s));
    }
    let (mut rest, fin, emb2) = peel(g, parts[..s - 1].to_vec(), ctx.clone())?;
    // If the recursion extended the field, lift the branch peeled here
    // along the exact embedding the recursion used.
    let branch = if fin != ctx {
        branch.map_ctx(&emb2)
    } else {
        branch
    };
    rest.push(branch);
    Ok((rest, fin, emb2))
}

// ---------------------------------------------------------------------------
// Chart-level membership check
// ---------------------------------------------------------------------------

/// Report of the three chart conditions for a monic y-polynomial with
/// polynomial coefficients: germ class at the origin, separation of
/// equal-part branches, and smoothness away from x = 0.
#[derive(Clone, Debug)]
pub struct ChartReport {
    /// Germ at the origin lies in the open staircase class.
    pub in_open_class: bool,
    /// Equal-part branches have pairwise distinct constants.
    pub distinct_constants: bool,
    /// The affine curve f = 0 is smooth at every point with x != 0.
    pub smooth_away_from_origin: bool,
    /// Branch data (part, constant) when factorization succeeded.
    pub branches: Vec<(usize, FieldElt)>,
    /// A singular point witness (x-coordinate as coefficients over an
    /// extension, extension degree) when smoothness fails.
    pub singular_witness: Option<(String, usize)>,
}

/// Evaluate the three chart conditions. Coefficients of f must be exact
/// polynomials in x.
pub fn bp0_check(f: &YPoly, lambda: &Partition, germ_prec: i64) -> Result<ChartReport> {
    let ctx = f.ctx().clone();
    for c in f.coeffs() {
        if !c.is_exact() {
            return Err(Error::BadInput(
                "chart check needs exact polynomial coefficients".into(),
            ));
        }
        if c.ord().map_or(false, |v| v < 0) {
            return Err(Error::BadInput(
                "chart coefficients must be polynomials, not Laurent series".into(),
            ));
        }
    }
    if !f.is_monic() {
        return Err(Error::BadInput("chart polynomial must be monic in y".into()));
    }
    let n = lambda.n();
    if f.degree() != n {
        return Err(Error::BadInput(format!(
            "chart polynomial has y-degree {} but the partition sums to {}",
            f.degree(),
            n
        )));
    }
    // (i) + (ii): classify and factor the germ at the origin.
    let germ = f.to_biseries().truncate(germ_prec.max(n as i64 + 2));
    let class = classify_germ(&germ, lambda)?;
    let mut distinct = false;
    let mut branches = Vec::new();
    if class.in_open {
        match hensel_factor(&germ, lambda) {
            Ok(fac) => {
                distinct = true;
                for pair in fac.branches.windows(2) {
                    if pair[0].lambda == pair[1].lambda
                        && pair[0].constant() == pair[1].constant()
                    {
                        distinct = false;
                    }
                }
                branches = fac
                    .branches
                    .iter()
                    .map(|b| (b.lambda, b.constant()))
                    .collect();
            }
            Err(Error::RepeatedResidueRoot) => distinct = false,
            Err(e) => return Err(e),
        }
    }
    // (iii): smoothness away from x = 0 by elimination.
    let (smooth, witness) = smooth_away_from_origin(f, &ctx)?;
    Ok(ChartReport {
        in_open_class: class.in_open,
        distinct_constants: distinct,
        smooth_away_from_origin: smooth,
        branches,
        singular_witness: witness,
    })
}

/// Convert an exact x-series to a dense polynomial over the field.
fn series_to_poly(s: &Series1, ctx: &FieldCtx) -> Poly {
    let mut coeffs = Vec::new();
    for (e, c) in s.iter_terms() {
        let e = e as usize;
        if coeffs.len() <= e {
            coeffs.resize(e + 1, ctx.zero());
        }
        coeffs[e] = c.clone();
    }
    Poly::new(ctx.clone(), coeffs)
}

/// Drop structurally-zero leading coefficients of an exact y-polynomial.
fn trim_exact(f: &YPoly) -> Option<YPoly> {
    let mut coeffs = f.coeffs().to_vec();
    while coeffs.len() > 1 {
        let last = coeffs.last().unwrap();
        if last.is_zero_to_prec() {
            coeffs.pop();
        } else {
            break;
        }
    }
    if coeffs.len() == 1 && coeffs[0].is_zero_to_prec() {
        return None;
    }
    Some(YPoly::new(f.ctx().clone(), coeffs))
}

/// Decide whether f = 0 is smooth at every closed point with x != 0,
/// searching extensions as needed. Returns the verdict and, when
/// singular, a witness x-coordinate (printed) with its extension degree.
fn smooth_away_from_origin(
    f: &YPoly,
    ctx: &FieldCtx,
) -> Result<(bool, Option<(String, usize)>)> {
    let fx = trim_exact(&f.derive_x());
    let fy = trim_exact(&f.derive_y());
    let (pivot, other) = match (&fy, &fx) {
        (Some(fy), _) => (fy.clone(), fx.clone()),
        (None, Some(fx)) => (fx.clone(), None),
        (None, None) => {
            // Both partials vanish identically: f is a p-th power, so the
            // curve is everywhere non-reduced (and has points with x != 0
            // since f is monic in y).
            return Ok((false, Some(("every point (non-reduced curve)".into(), 1))));
        }
    };
    let res_pivot = resultant_y(f, &pivot);
    if res_pivot.is_zero_to_prec() {
        // f shares a full component with the pivot partial: singular
        // along a component that meets x != 0 (f is monic in y).
        return Ok((false, Some(("a whole component".into(), 1))));
    }
    let mut cand = series_to_poly(&res_pivot, ctx);
    if let Some(other) = &other {
        let res_other = resultant_y(f, other);
        if !res_other.is_zero_to_prec() {
            cand = cand.gcd(&series_to_poly(&res_other, ctx));
        }
    }
    // Remove the x = 0 locus.
    while cand.degree().map_or(false, |d| d > 0) && cand.coeff(0).is_zero() {
        let shifted = cand.coeffs()[1..].to_vec();
        cand = Poly::new(ctx.clone(), shifted);
    }
    if cand.degree().map_or(true, |d| d == 0) {
        return Ok((true, None));
    }
    // Check every candidate x-coordinate over its minimal extension.
    for (d, part) in cand.distinct_degree_split()? {
        let (ectx, emb) = if d == 1 {
            (ctx.clone(), Embedding::identity(ctx))
        } else {
            ctx.extend(d)?
        };
        let roots = part.map_ctx(&emb).roots_in_ctx()?;
        for alpha in roots {
            if alpha.is_zero() {
                continue;
            }
            let at = |g: &YPoly| -> Poly {
                let coeffs = g
                    .coeffs()
                    .iter()
                    .map(|c| series_to_poly(c, ctx).map_ctx(&emb).eval(&alpha))
                    .collect();
                Poly::new(ectx.clone(), coeffs)
            };
            let mut common = at(f).gcd(&at(&pivot));
            if let Some(other) = &other {
                common = common.gcd(&at(other));
            }
            if common.degree().map_or(false, |deg| deg > 0) {
                return Ok((false, Some((alpha.to_string(), d))));
            }
        }
    }
    Ok((true, None))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> FieldCtx {
        FieldCtx::prime(5).unwrap()
    }

    fn germ(ctx: &FieldCtx, terms: &[(i64, i64, u64)], prec: i64) -> BiSeries {
        let map = terms
            .iter()
            .map(|&(i, j, c)| ((i, j), ctx.from_scalar(c)))
            .collect();
        BiSeries::new(ctx.clone(), map, prec)
    }

    #[test]
    fn conjugate_involution_and_examples() {
        let p = Partition::new(vec![2, 2, 1]).unwrap();
        assert_eq!(p.conjugate().parts(), &[3, 2]);
        assert_eq!(p.conjugate().conjugate(), p);
        let row = Partition::new(vec![4]).unwrap();
        assert_eq!(row.conjugate().parts(), &[1, 1, 1, 1]);
        let col = Partition::new(vec![1, 1, 1, 1]).unwrap();
        assert_eq!(col.conjugate().parts(), &[4]);
    }

    #[test]
    fn m_exponents_examples() {
        // lambda = (2,1), n = 3, gamma = (3,1,0) -> (1,1,2)
        let pt = ParabolicType::from_lambda(Partition::new(vec![2, 1]).unwrap());
        assert_eq!(pt.m_exponents(), vec![1, 1, 2]);
        // Full flag lambda = (1,1,1): m_i = i.
        let pt = ParabolicType::from_lambda(Partition::new(vec![1, 1, 1]).unwrap());
        assert_eq!(pt.m_exponents(), vec![1, 2, 3]);
        // Single row lambda = (3): m_i = 1.
        let pt = ParabolicType::from_lambda(Partition::new(vec![3]).unwrap());
        assert_eq!(pt.m_exponents(), vec![1, 1, 1]);
    }

    #[test]
    fn classify_staircase_examples() {
        let ctx = f5();
        // f = y^3 + x y + x^2, eta = (2,1), gamma = (3,1,0): open member.
        let f = germ(&ctx, &[(0, 3, 1), (1, 1, 1), (2, 0, 1)], 8);
        let eta = Partition::new(vec![2, 1]).unwrap();
        let class = classify_germ(&f, &eta).unwrap();
        assert!(class.in_class && class.in_open);
        assert!(class.corner_values.iter().all(FieldElt::is_one));
        // f = y^3 + x^2 y: in the class but corner a_1 is a non-unit.
        let f = germ(&ctx, &[(0, 3, 1), (2, 1, 1)], 8);
        let class = classify_germ(&f, &eta).unwrap();
        assert!(class.in_class && !class.in_open);
        // f = y^2 + x in the class of (2).
        let f = germ(&ctx, &[(0, 2, 1), (1, 0, 1)], 8);
        let class = classify_germ(&f, &Partition::new(vec![2]).unwrap()).unwrap();
        assert!(class.in_class && class.in_open);
        // f = y^3 + x y fails the staircase of (1,1,1) (gamma = (3,2,1,0)):
        // the monomial x y has b = 1 < gamma_1 = 2.
        let f = germ(&ctx, &[(0, 3, 1), (1, 1, 1)], 8);
        let class = classify_germ(&f, &Partition::new(vec![1, 1, 1]).unwrap()).unwrap();
        assert!(!class.in_class);
    }

    #[test]
    fn hensel_splits_two_transverse_lines() {
        let ctx = f5();
        // f = y^2 + 3xy + 2x^2 = (y + x)(y + 2x)
        let f = germ(&ctx, &[(0, 2, 1), (1, 1, 3), (2, 0, 2)], 12);
        let lam = Partition::new(vec![1, 1]).unwrap();
        let fac = hensel_factor(&f, &lam).unwrap();
        assert_eq!(fac.ctx, ctx);
        assert_eq!(fac.branches.len(), 2);
        let consts: Vec<u64> = fac
            .branches
            .iter()
            .map(|b| b.constant().coeffs()[0])
            .collect();
        assert_eq!(consts, vec![1, 2]);
        assert!(fac.product().eq_to_joint_prec(&f));
    }

    #[test]
    fn hensel_single_part_returns_input_shape() {
        let ctx = f5();
        let f = germ(&ctx, &[(0, 2, 1), (1, 0, 1), (1, 1, 2)], 9);
        let lam = Partition::new(vec![2]).unwrap();
        let fac = hensel_factor(&f, &lam).unwrap();
        assert_eq!(fac.branches.len(), 1);
        assert!(fac.product().eq_to_joint_prec(&f));
    }

    #[test]
    fn hensel_mixed_parts_round_trip() {
        let ctx = f5();
        // (y^2 + (1 + x + y) x) * (y + 2x) expanded.
        let b1 = germ(&ctx, &[(0, 2, 1), (1, 0, 1), (2, 0, 1), (1, 1, 1)], 14);
        let b2 = germ(&ctx, &[(0, 1, 1), (1, 0, 2)], 14);
        let f = b1.mul(&b2);
        let lam = Partition::new(vec![2, 1]).unwrap();
        let fac = hensel_factor(&f, &lam).unwrap();
        assert_eq!(fac.branches.len(), 2);
        assert_eq!(fac.branches[0].lambda, 2);
        assert_eq!(fac.branches[1].lambda, 1);
        assert!(fac.product().eq_to_joint_prec(&f));
    }

    #[test]
    fn hensel_equal_constants_fail() {
        let ctx = f5();
        // (y + x)^2 = y^2 + 2xy + x^2: repeated residue root.
        let f = germ(&ctx, &[(0, 2, 1), (1, 1, 2), (2, 0, 1)], 10);
        let lam = Partition::new(vec![1, 1]).unwrap();
        assert!(matches!(
            hensel_factor(&f, &lam),
            Err(Error::RepeatedResidueRoot)
        ));
    }

    #[test]
    fn hensel_extends_field_when_needed() {
        let ctx = f5();
        // y^2 + 4xy + x^2: residue roots are the roots of c^2 + 4c + 1,
        // wait: for lambda = (1,1) the constraint is on the two line slopes,
        // which solve t^2 - 4t + 1 ... the point is they lie in F_25.
        let f = germ(&ctx, &[(0, 2, 1), (1, 1, 4), (2, 0, 1)], 12);
        let lam = Partition::new(vec![1, 1]).unwrap();
        let fac = hensel_factor(&f, &lam).unwrap();
        assert_eq!(fac.ctx.degree(), 2);
        let lifted = f.map_ctx(&fac.embedding);
        assert!(fac.product().eq_to_joint_prec(&lifted));
        // The two constants are conjugate and distinct.
        let c0 = fac.branches[0].constant();
        let c1 = fac.branches[1].constant();
        assert_ne!(c0, c1);
        assert_eq!(c0.frobenius(), c1);
    }

    #[test]
    fn chart_check_three_verdicts() {
        let ctx = f5();
        // f = y^2 - x^3 - x, smooth away from 0 over F_5.
        let f = YPoly::new(
            ctx.clone(),
            vec![
                Series1::new(
                    ctx.clone(),
                    1,
                    vec![ctx.from_scalar(4), ctx.zero(), ctx.from_scalar(4)],
                    crate::series::PREC_EXACT,
                ),
                Series1::zero_exact(&ctx),
                Series1::one(&ctx),
            ],
        );
        let lam = Partition::new(vec![2]).unwrap();
        let report = bp0_check(&f, &lam, 12).unwrap();
        assert!(report.smooth_away_from_origin);
        // (y + x)^2: equal constants -> verdict (ii) false.
        let g = YPoly::new(
            ctx.clone(),
            vec![
                Series1::monomial(ctx.one(), 2),
                Series1::monomial(ctx.from_scalar(2), 1),
                Series1::one(&ctx),
            ],
        );
        let lam2 = Partition::new(vec![1, 1]).unwrap();
        let report = bp0_check(&g, &lam2, 12).unwrap();
        assert!(report.in_open_class);
        assert!(!report.distinct_constants);
    }
}
