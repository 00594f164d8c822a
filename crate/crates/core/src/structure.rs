//! Block structure of `T(x)` for wreath products of cyclic schemes: the
//! matrix units `G_{ab}`, their span `U`, the one-dimensional idempotents
//! `F`, and the resulting decomposition.

use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::cyclotomic::CycloNum;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::report::CheckReport;
use crate::scalar::Scalar;
use crate::span::{algebra_closure, SpanBasis};
use crate::terwilliger::{make_context, TerwilligerContext};
use crate::wreath::{wreath_of_cyclics, Moduli, WreathIndex};
use crate::Rational;

/// `1 + Σ (p_i - 1)`, the size of the large matrix block.
pub fn matrix_block(m: &Moduli) -> usize {
    m.num_classes()
}

/// `Σ_{h<i} (p_h - 1)(p_i - 1)`, the number of one-dimensional blocks.
pub fn one_dim_formula(m: &Moduli) -> usize {
    let p = m.as_slice();
    (0..p.len()).flat_map(|i| (0..i).map(move |h| (p[h] - 1) * (p[i] - 1))).sum()
}

/// `(1 + Σ (p_i - 1))² + Σ_{h<i} (p_h - 1)(p_i - 1)`.
pub fn dimension_formula(m: &Moduli) -> usize {
    matrix_block(m).pow(2) + one_dim_formula(m)
}

fn check_context<S: Scalar>(ctx: &TerwilligerContext<S>, m: &Moduli) -> Result<()> {
    if Some(ctx.order()) != m.order() || ctx.num_classes() != m.num_classes() {
        return Err(Error::Domain(format!(
            "context of order {} with {} classes does not match moduli {m}",
            ctx.order(),
            ctx.num_classes()
        )));
    }
    Ok(())
}

fn valency<S: Scalar>(ctx: &TerwilligerContext<S>, m: &Moduli, idx: WreathIndex) -> S {
    S::from_i64(ctx.support(m.flat(idx)).len() as i64)
}

/// Linear combination `Σ c · G_{ab}`.
fn combination<S: Scalar>(g: &GFamily<S>, terms: &[(S, usize, usize)]) -> Matrix<S> {
    let n = g.order();
    let mut out = Matrix::zeros(n, n);
    for (c, a, b) in terms {
        out.add_scaled(c, g.get(*a, *b)).expect("family matrices share a shape");
    }
    out
}

/// The matrix units `G_{ab}` for every ordered pair of class indices.
#[derive(Clone, Debug)]
pub struct GFamily<S> {
    moduli: Moduli,
    base_point: usize,
    size: usize,
    matrices: Vec<Matrix<S>>,
}

impl<S: Scalar> GFamily<S> {
    pub fn moduli(&self) -> &Moduli {
        &self.moduli
    }

    pub fn base_point(&self) -> usize {
        self.base_point
    }

    /// Number of class indices; the family has `size²` members.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn order(&self) -> usize {
        self.matrices[0].rows()
    }

    /// `G_{ab}` for flat indices `a`, `b`.
    pub fn get(&self, a: usize, b: usize) -> &Matrix<S> {
        &self.matrices[a * self.size + b]
    }

    pub fn matrices(&self) -> &[Matrix<S>] {
        &self.matrices
    }

    /// Span of the family.
    pub fn span(&self) -> Result<SpanBasis<S>> {
        let n = self.order();
        SpanBasis::from_matrices(n, n, &self.matrices)
    }
}

/// Builds every `G_{(i,α)(j,β)}`:
///
/// * `i < j`: `E*_{(i,α)} A_{(j,β)} E*_{(j,β)} / n_{(j,β)}`
/// * `i > j`: `E*_{(i,α)} A_{(i,α)}^t E*_{(j,β)} / n_{(j,β)}`
/// * `i = j`: `E*_{(i,α)} J E*_{(i,β)} / n_{(i,α)}`
///
/// and asserts that each one is `J / n_{(j,β)}` on its own block and zero
/// elsewhere.
pub fn build_g_family<S: Scalar>(ctx: &TerwilligerContext<S>, m: &Moduli) -> Result<GFamily<S>> {
    check_context(ctx, m)?;
    let n = ctx.order();
    let k = m.num_classes();
    let x = ctx.base_point();
    let ones = Matrix::ones(n, n);
    let mut matrices = Vec::with_capacity(k * k);
    for a in 0..k {
        let ia = m.index(a)?;
        for b in 0..k {
            let jb = m.index(b)?;
            let g = if ia.level < jb.level {
                let inv = valency(ctx, m, jb).try_inv().ok_or(Error::DivisionByZero)?;
                ctx.dual(a).try_mul(ctx.adjacency(b))?.try_mul(ctx.dual(b))?.scale(&inv)
            } else if ia.level > jb.level {
                let inv = valency(ctx, m, jb).try_inv().ok_or(Error::DivisionByZero)?;
                ctx.dual(a).try_mul(&ctx.adjacency(a).transpose())?.try_mul(ctx.dual(b))?.scale(&inv)
            } else {
                let inv = valency(ctx, m, ia).try_inv().ok_or(Error::DivisionByZero)?;
                ctx.dual(a).try_mul(&ones)?.try_mul(ctx.dual(b))?.scale(&inv)
            };
            let entry = S::from_ratio(1, ctx.support(b).len() as i64);
            for y in 0..n {
                for z in 0..n {
                    let inside = ctx.scheme().classify(x, y) == a && ctx.scheme().classify(x, z) == b;
                    let expected = if inside { entry.clone() } else { S::zero() };
                    if !g[(y, z)].approx_eq(&expected) {
                        return Err(Error::Structure(format!(
                            "G_{ia}{jb} at x={x}: entry ({y},{z}) is {:?}, expected {expected:?}",
                            g[(y, z)]
                        )));
                    }
                }
            }
            matrices.push(g);
        }
    }
    Ok(GFamily { moduli: m.clone(), base_point: x, size: k, matrices })
}

/// `G_{ab} G_{ce} = δ_{bc} G_{ae}` for all quadruples.
pub fn check_matrix_units<S: Scalar>(g: &GFamily<S>) -> Result<CheckReport> {
    let k = g.size();
    let mut report = CheckReport::new("matrix-units");
    let rows = (0..k)
        .into_par_iter()
        .map(|a| {
            let mut r = CheckReport::new("matrix-units");
            for b in 0..k {
                for c in 0..k {
                    for e in 0..k {
                        let product = g.get(a, b).try_mul(g.get(c, e))?;
                        let ok = if b == c { product == *g.get(a, e) } else { product.is_zero() };
                        r.tally(if b == c { "matched" } else { "mismatched" });
                        r.record(ok, || format!("G_{a}{b} G_{c}{e} violates the unit law"));
                    }
                }
            }
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    for r in rows {
        report.merge(r);
    }
    Ok(report)
}

/// Closed forms of `A_{(h,ξ)} G_{(i,α)(j,β)}` and `G_{(i,α)(j,β)} A_{(h,ξ)}`,
/// four rows each. For `h = 0` both products must equal `G` itself.
pub fn check_ag_forms<S: Scalar>(ctx: &TerwilligerContext<S>, m: &Moduli, g: &GFamily<S>) -> Result<CheckReport> {
    check_context(ctx, m)?;
    let k = m.num_classes();
    let n_of = |idx: WreathIndex| valency(ctx, m, idx);
    let below = |level: usize| -> Vec<usize> { (0..m.level_start(level)).collect() };
    let mut report = CheckReport::new("ag-forms");
    for hx in 0..k {
        let hidx = m.index(hx)?;
        let (h, xi) = (hidx.level, hidx.offset);
        let a_h = ctx.adjacency(hx);
        for a in 0..k {
            let aidx = m.index(a)?;
            let (i, alpha) = (aidx.level, aidx.offset);
            for b in 0..k {
                let bidx = m.index(b)?;
                let (j, beta) = (bidx.level, bidx.offset);
                let gab = g.get(a, b);
                let left = a_h.try_mul(gab)?;
                let right = gab.try_mul(a_h)?;
                if h == 0 {
                    report.tally("identity");
                    report.record(left == *gab && right == *gab, || format!("A_0 does not fix G_{aidx}{bidx}"));
                    continue;
                }
                let (row, expected) = if h < i {
                    ("AG h<i", combination(g, &[(n_of(hidx), a, b)]))
                } else if h == i && alpha == xi {
                    let terms: Vec<_> = below(i).into_iter().map(|r| (n_of(aidx), r, b)).collect();
                    ("AG h=i, a=xi", combination(g, &terms))
                } else if h == i {
                    let target = m.wrap(i, alpha as i64 - xi as i64).expect("alpha differs from xi");
                    ("AG h=i, a!=xi", combination(g, &[(n_of(aidx), m.flat(target), b)]))
                } else {
                    let target = m.wrap(h, -(xi as i64)).expect("xi is a nonzero offset");
                    ("AG h>i", combination(g, &[(n_of(aidx), m.flat(target), b)]))
                };
                report.tally(row);
                report.record(left == expected, || format!("{row}: A_{hidx} G_{aidx}{bidx} differs from its closed form"));
                let (row, expected) = if h < j {
                    ("GA h<j", combination(g, &[(n_of(hidx), a, b)]))
                } else if h == j {
                    match m.wrap(j, beta as i64 + xi as i64) {
                        Some(rho) => ("GA h=j, b+xi!=0", combination(g, &[(n_of(rho), a, m.flat(rho))])),
                        None => {
                            let terms: Vec<_> = below(j)
                                .into_iter()
                                .map(|r| (S::from_i64(ctx.support(r).len() as i64), a, r))
                                .collect();
                            ("GA h=j, b+xi=0", combination(g, &terms))
                        }
                    }
                } else {
                    ("GA h>j", combination(g, &[(n_of(hidx), a, hx)]))
                };
                report.tally(row);
                report.record(right == expected, || format!("{row}: G_{aidx}{bidx} A_{hidx} differs from its closed form"));
            }
        }
    }
    Ok(report)
}

/// Nonzero-block pattern of `A_{(j,β)}` with respect to the partition of the
/// vertices by class relative to the base point.
pub fn check_block_form<S: Scalar>(ctx: &TerwilligerContext<S>, m: &Moduli, jb: WreathIndex) -> Result<CheckReport> {
    check_context(ctx, m)?;
    if jb.is_zero() || !m.is_valid(jb) {
        return Err(Error::OutOfRange(format!("block form of A_{jb} for moduli {m}")));
    }
    let (j, beta) = (jb.level, jb.offset);
    let adjacency = ctx.adjacency(m.flat(jb));
    let mut report = CheckReport::new("block-form");
    for ia in m.indices() {
        for hx in m.indices() {
            let predicted = if ia.level < j {
                hx == jb
            } else if ia.level == j {
                let sum = (ia.offset + beta) % m.modulus(j);
                if sum == 0 {
                    hx.level < j
                } else {
                    hx.level == j && hx.offset == sum
                }
            } else {
                hx == ia
            };
            let block = adjacency.submatrix(ctx.support(m.flat(ia)), ctx.support(m.flat(hx)));
            let nonzero = !block.is_zero();
            // blocks meeting the ball of radius j around x are complete
            let complete = ia.level > j || !nonzero || block.as_slice().iter().all(|e| *e == S::one());
            report.tally(match (predicted, ia.level > j) {
                (false, _) => "zero block",
                (true, true) => "diagonal block",
                (true, false) => "all-ones block",
            });
            report.record(predicted == nonzero && complete, || {
                format!("A_{jb}: block ({ia},{hx}) nonzero = {nonzero}, predicted {predicted}, all-ones = {complete}")
            });
        }
    }
    Ok(report)
}

/// [`check_block_form`] for every nonzero class.
pub fn check_block_forms<S: Scalar>(ctx: &TerwilligerContext<S>, m: &Moduli) -> Result<CheckReport> {
    let mut report = CheckReport::new("block-form");
    for jb in m.indices().into_iter().filter(|i| !i.is_zero()) {
        let r = check_block_form(ctx, m, jb)?;
        report.absorb(&format!("x={}", ctx.base_point()), r);
    }
    Ok(report)
}

/// For `(i,α)` with `i ≥ 1` and classes `(j,β)`, `(h,ξ)` of level below `i`:
/// `E* A_{(j,β)} = A_{(j,β)} E*` and
/// `E* A_{(j,β)} E* E* A_{(h,ξ)} E* = E* A_{(j,β)} A_{(h,ξ)} E*`.
pub fn check_commutation<S: Scalar>(ctx: &TerwilligerContext<S>, m: &Moduli) -> Result<CheckReport> {
    check_context(ctx, m)?;
    let mut report = CheckReport::new("commutation");
    for a in 1..m.num_classes() {
        let ia = m.index(a)?;
        let lower = m.level_start(ia.level);
        let e = ctx.dual(a);
        let sandwiches: Vec<Matrix<S>> = (0..lower)
            .map(|j| e.try_mul(ctx.adjacency(j))?.try_mul(e))
            .collect::<Result<_>>()?;
        for j in 0..lower {
            let lhs = e.try_mul(ctx.adjacency(j))?;
            let rhs = ctx.adjacency(j).try_mul(e)?;
            report.tally("commute");
            report.record(lhs == rhs, || format!("E*_{ia} does not commute with A_{}", m.index(j).unwrap()));
            for h in 0..lower {
                let lhs = sandwiches[j].try_mul(&sandwiches[h])?;
                let rhs = e.try_mul(ctx.adjacency(j))?.try_mul(ctx.adjacency(h))?.try_mul(e)?;
                report.tally("sandwich");
                report.record(lhs == rhs, || {
                    format!("sandwich identity fails for E*_{ia}, A_{}, A_{}", m.index(j).unwrap(), m.index(h).unwrap())
                });
            }
        }
    }
    Ok(report)
}

/// One idempotent `F_{(i,α)(h,ξ)}`.
#[derive(Clone, Debug)]
pub struct FMember {
    pub outer: WreathIndex,
    pub inner: WreathIndex,
    pub matrix: Matrix<CycloNum>,
}

/// All candidates `F_{(i,α)(h,ξ)}` with `1 ≤ h < i`.
#[derive(Clone, Debug)]
pub struct FFamily {
    moduli: Moduli,
    base_point: usize,
    conductor: u64,
    members: Vec<FMember>,
}

impl FFamily {
    pub fn moduli(&self) -> &Moduli {
        &self.moduli
    }

    pub fn base_point(&self) -> usize {
        self.base_point
    }

    /// `lcm(p_1, …, p_{d-1})`, the field all members live in.
    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn members(&self) -> &[FMember] {
        &self.members
    }

    /// The same family with its members replaced.
    pub fn with_members(&self, members: Vec<FMember>) -> FFamily {
        FFamily { members, ..self.clone() }
    }

    pub fn nonzero_count(&self) -> usize {
        self.members.iter().filter(|f| !f.matrix.is_zero()).count()
    }
}

/// `ε^e` with `ε` a primitive `p`-th root of unity, inside `Q(ζ_L)`.
fn root_power(conductor: u64, p: usize, e: i64) -> Result<CycloNum> {
    CycloNum::zeta(conductor, e * (conductor / p as u64) as i64)
}

/// `F_{(i,α)(h,ξ)} = E*_{(i,α)} (Σ_{r<(h,1)} A_r + Σ_t ε^{tξ} A_{(h,t)}) E*_{(i,α)} / (p_h n_{(h,ξ)})`
/// with `ε` a primitive `p_h`-th root of unity.
pub fn build_f_family(ctx: &TerwilligerContext<CycloNum>, m: &Moduli) -> Result<FFamily> {
    check_context(ctx, m)?;
    let d = m.levels();
    let conductor = m.as_slice()[..d - 1].iter().fold(1u64, |acc, &p| acc.lcm(&(p as u64)));
    let n = ctx.order();
    let mut members = Vec::new();
    for i in 2..=d {
        for outer in m.level_indices(i) {
            let e = ctx.dual(m.flat(outer));
            for h in 1..i {
                let p = m.modulus(h);
                for inner in m.level_indices(h) {
                    let mut sum = Matrix::zeros(n, n);
                    for r in 0..m.level_start(h) {
                        sum.add_scaled(&CycloNum::one(), ctx.adjacency(r))?;
                    }
                    for t in m.level_indices(h) {
                        let coefficient = root_power(conductor, p, (t.offset * inner.offset) as i64)?;
                        sum.add_scaled(&coefficient, ctx.adjacency(m.flat(t)))?;
                    }
                    let scale = CycloNum::from_ratio(1, (p * ctx.support(m.flat(inner)).len()) as i64);
                    let matrix = e.try_mul(&sum)?.try_mul(e)?.scale(&scale);
                    members.push(FMember { outer, inner, matrix });
                }
            }
        }
    }
    Ok(FFamily { moduli: m.clone(), base_point: ctx.base_point(), conductor, members })
}

/// Scalar by which `A_{(j,β)}` acts on `F_{(i,α)(h,ξ)}` from either side.
fn f_eigenvalue(m: &Moduli, conductor: u64, member: &FMember, jb: WreathIndex) -> Result<(&'static str, CycloNum)> {
    let (i, h, xi) = (member.outer.level, member.inner.level, member.inner.offset);
    let n = CycloNum::integer(m.valency(jb) as i64);
    Ok(if jb.level >= i {
        ("j>=i", CycloNum::zero())
    } else if jb.level > h {
        ("h<j<i", CycloNum::zero())
    } else if jb.level == h {
        ("j=h", root_power(conductor, m.modulus(h), -((jb.offset * xi) as i64))? * n)
    } else {
        ("j<h", n)
    })
}

/// Idempotency, centrality against the generators with the predicted
/// eigenvalues, `F G = G F = 0`, mutual orthogonality, and the count of
/// nonzero members.
pub fn check_f_properties(ctx: &TerwilligerContext<CycloNum>, f: &FFamily, g: &GFamily<CycloNum>) -> Result<CheckReport> {
    let m = f.moduli();
    check_context(ctx, m)?;
    let mut report = CheckReport::new("f-family");
    let expected = one_dim_formula(m);
    report.record(f.nonzero_count() == expected, || {
        format!("{} nonzero idempotents, expected {expected}", f.nonzero_count())
    });
    let nonzero: Vec<&FMember> = f.members.iter().filter(|x| !x.matrix.is_zero()).collect();
    let per_member = nonzero
        .par_iter()
        .map(|member| {
            let label = format!("F_{}{}", member.outer, member.inner);
            let fm = &member.matrix;
            let mut r = CheckReport::new("f-family");
            r.record(fm.try_mul(fm)? == *fm, || format!("{label} is not idempotent"));
            for jb in m.indices() {
                let (row, lambda) = f_eigenvalue(m, f.conductor(), member, jb)?;
                let target = fm.scale(&lambda);
                let a = ctx.adjacency(m.flat(jb));
                r.tally(row);
                r.record(a.try_mul(fm)? == target && fm.try_mul(a)? == target, || {
                    format!("{label}: A_{jb} does not act by the predicted scalar ({row})")
                });
            }
            for (k, e) in ctx.duals().iter().enumerate() {
                r.record(e.try_mul(fm)? == fm.try_mul(e)?, || format!("{label} does not commute with E*_{k}"));
            }
            for gm in g.matrices() {
                r.record(fm.try_mul(gm)?.is_zero() && gm.try_mul(fm)?.is_zero(), || {
                    format!("{label} does not annihilate the matrix units")
                });
            }
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    for r in per_member {
        report.absorb(&format!("x={}", f.base_point()), r);
    }
    for (s, a) in nonzero.iter().enumerate() {
        for b in nonzero.iter().skip(s + 1) {
            report.record(a.matrix.try_mul(&b.matrix)?.is_zero() && b.matrix.try_mul(&a.matrix)?.is_zero(), || {
                format!("F_{}{} and F_{}{} are not orthogonal", a.outer, a.inner, b.outer, b.inner)
            });
        }
    }
    Ok(report)
}

/// Outcome of the full structural verification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompReport {
    pub moduli: Moduli,
    pub order: usize,
    pub num_classes: usize,
    pub base_points: Vec<usize>,
    /// `dim T(x)` from the closure oracle at the first base point.
    #[serde(rename = "dim_T")]
    pub dim_t: usize,
    pub dim_formula: usize,
    pub matrix_block: usize,
    /// Nonzero `F` members at the first base point.
    pub one_dim_count: usize,
    pub verdicts: Vec<CheckReport>,
}

impl DecompReport {
    pub fn passed(&self) -> bool {
        self.dim_t == self.dim_formula && self.verdicts.iter().all(CheckReport::passed)
    }

    pub fn verdict(&self, name: &str) -> Option<&CheckReport> {
        self.verdicts.iter().find(|v| v.name == name)
    }
}

struct PointOutcome {
    dim_t: usize,
    one_dim_count: usize,
    verdicts: Vec<CheckReport>,
}

fn single(name: &str, ok: bool, witness: impl FnOnce() -> String) -> CheckReport {
    let mut r = CheckReport::new(name);
    r.record(ok, witness);
    r
}

fn analyse_point(s: &crate::Scheme, m: &Moduli, x: usize) -> Result<PointOutcome> {
    let ctx = make_context::<Rational>(s, x)?;
    let k = m.num_classes();
    let closure = algebra_closure(&ctx.generators())?;
    let dim_t = closure.dimension();
    let formula = dimension_formula(m);
    let mut verdicts = vec![single("dimension", dim_t == formula, || format!("dim T = {dim_t}, formula {formula}"))];

    let g = match build_g_family(&ctx, m) {
        Ok(g) => g,
        Err(Error::Structure(w)) => {
            verdicts.push(single("g-family", false, || w));
            return Ok(PointOutcome { dim_t, one_dim_count: 0, verdicts });
        }
        Err(e) => return Err(e),
    };
    let units = g.span()?;
    let mut family = CheckReport::new("g-family");
    family.record(units.dimension() == k * k, || format!("rank {} instead of {}", units.dimension(), k * k));
    for (idx, gm) in g.matrices().iter().enumerate() {
        family.record(closure.contains_matrix(gm)?, || format!("G_{}{} lies outside T(x)", idx / k, idx % k));
    }
    verdicts.push(family);
    verdicts.push(check_matrix_units(&g)?);
    verdicts.push(check_ag_forms(&ctx, m, &g)?);

    let mut ideal = CheckReport::new("ideal");
    for gen in ctx.generators() {
        for gm in g.matrices() {
            ideal.record(units.contains_matrix(&gen.try_mul(gm)?)? && units.contains_matrix(&gm.try_mul(&gen)?)?, || {
                "a one-sided product of a generator with a matrix unit leaves U".to_string()
            });
        }
    }
    verdicts.push(ideal);

    let generators = ctx.generators();
    let mut quotient = CheckReport::new("quotient-commutative");
    for (s1, a) in generators.iter().enumerate() {
        for (s2, b) in generators.iter().enumerate().skip(s1 + 1) {
            quotient.record(units.contains_matrix(&a.commutator(b)?)?, || {
                format!("commutator of generators {s1} and {s2} lies outside U")
            });
        }
    }
    verdicts.push(quotient);

    let cctx = ctx.convert(|q| CycloNum::rational(q.clone()));
    let gc = build_g_family(&cctx, m)?;
    let f = build_f_family(&cctx, m)?;
    verdicts.push(check_f_properties(&cctx, &f, &gc)?);

    let n = ctx.order();
    let mut total = gc.span()?;
    for member in f.members() {
        total.insert_matrix(&member.matrix)?;
    }
    let mut accounting = CheckReport::new("identity-accounting");
    accounting.record(total.dimension() == dim_t, || {
        format!("U and the F family span {} dimensions, dim T = {dim_t}", total.dimension())
    });
    for basis in closure.basis_matrices() {
        let lifted = basis.map(|q| CycloNum::rational(q.clone()));
        accounting.record(total.contains_matrix(&lifted)?, || {
            "an element of T(x) lies outside U plus the F family".to_string()
        });
    }
    debug_assert_eq!(total.ambient(), n * n);
    verdicts.push(accounting);

    Ok(PointOutcome { dim_t, one_dim_count: f.nonzero_count(), verdicts })
}

/// Runs the structural verification at each base point (all of them when
/// `base_points` is `None`) and merges the verdicts.
pub fn decomposition_report(m: &Moduli, base_points: Option<&[usize]>) -> Result<DecompReport> {
    let s = wreath_of_cyclics(m);
    let points: Vec<usize> = match base_points {
        Some([]) => return Err(Error::Domain("no base points selected".into())),
        Some(p) => p.to_vec(),
        None => (0..s.order()).collect(),
    };
    if let Some(&bad) = points.iter().find(|&&x| x >= s.order()) {
        return Err(Error::OutOfRange(format!("base point {bad} of {}", s.order())));
    }
    let outcomes = points.par_iter().map(|&x| analyse_point(&s, m, x)).collect::<Result<Vec<_>>>()?;
    let mut verdicts: Vec<CheckReport> = Vec::new();
    let mut invariance = CheckReport::new("base-point-invariance");
    for (x, outcome) in points.iter().zip(&outcomes) {
        invariance.record(outcome.dim_t == outcomes[0].dim_t && outcome.one_dim_count == outcomes[0].one_dim_count, || {
            format!("x={x}: dim T = {}, {} idempotents", outcome.dim_t, outcome.one_dim_count)
        });
        for v in &outcome.verdicts {
            match verdicts.iter_mut().find(|e| e.name == v.name) {
                Some(existing) => existing.absorb(&format!("x={x}"), v.clone()),
                None => {
                    let mut fresh = CheckReport::new(v.name.clone());
                    fresh.absorb(&format!("x={x}"), v.clone());
                    verdicts.push(fresh);
                }
            }
        }
    }
    verdicts.push(invariance);
    Ok(DecompReport {
        moduli: m.clone(),
        order: s.order(),
        num_classes: s.num_classes(),
        base_points: points,
        dim_t: outcomes[0].dim_t,
        dim_formula: dimension_formula(m),
        matrix_block: matrix_block(m),
        one_dim_count: outcomes[0].one_dim_count,
        verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moduli(v: &[usize]) -> Moduli {
        Moduli::new(v.to_vec()).unwrap()
    }

    fn context(v: &[usize], x: usize) -> (Moduli, TerwilligerContext<Rational>) {
        let m = moduli(v);
        let ctx = make_context(&wreath_of_cyclics(&m), x).unwrap();
        (m, ctx)
    }

    #[test]
    fn formulas() {
        assert_eq!(dimension_formula(&moduli(&[2, 2])), 10);
        assert_eq!(dimension_formula(&moduli(&[3, 3])), 29);
        assert_eq!(dimension_formula(&moduli(&[2, 4])), 28);
        assert_eq!(dimension_formula(&moduli(&[5])), 25);
        assert_eq!(one_dim_formula(&moduli(&[2, 2, 2])), 3);
        assert_eq!(matrix_block(&moduli(&[2, 3])), 4);
    }

    #[test]
    fn g_zero_zero_is_a_single_entry() {
        let (m, ctx) = context(&[2, 2], 0);
        let g = build_g_family(&ctx, &m).unwrap();
        let expected = Matrix::from_fn(4, 4, |r, c| if r == 0 && c == 0 { Rational::one() } else { Rational::from_i64(0) });
        assert_eq!(g.get(0, 0), &expected);
        assert_eq!(g.span().unwrap().dimension(), 9);
    }

    #[test]
    fn g_block_for_2_2() {
        let (m, ctx) = context(&[2, 2], 0);
        let g = build_g_family(&ctx, &m).unwrap();
        let gm = g.get(1, 2);
        let half = Rational::from_ratio(1, 2);
        assert_eq!(gm.submatrix(ctx.support(1), ctx.support(2)), Matrix::from_fn(1, 2, |_, _| half.clone()));
        let manual = ctx.dual(1).try_mul(ctx.adjacency(2)).unwrap().try_mul(ctx.dual(2)).unwrap().scale(&half);
        assert_eq!(gm, &manual);
    }

    #[test]
    fn matrix_units_and_forms_on_2_3() {
        let (m, ctx) = context(&[2, 3], 0);
        let g = build_g_family(&ctx, &m).unwrap();
        let units = check_matrix_units(&g).unwrap();
        assert_eq!(units.checked, 256);
        assert!(units.passed(), "{units}");
        let forms = check_ag_forms(&ctx, &m, &g).unwrap();
        assert!(forms.passed(), "{forms}");
        assert_eq!(forms.tallies.len(), 9);
    }

    #[test]
    fn block_forms() {
        let (m, ctx) = context(&[2, 3], 0);
        let r = check_block_form(&ctx, &m, WreathIndex { level: 2, offset: 1 }).unwrap();
        assert!(r.passed(), "{r}");
        let a = ctx.adjacency(2);
        // wraparound: offset 2 + 1 ≡ 0 reaches every class of lower level
        for lower in 0..2 {
            assert!(!a.submatrix(ctx.support(3), ctx.support(lower)).is_zero());
        }
        let (m, ctx) = context(&[2, 2, 2], 5);
        let r = check_block_forms(&ctx, &m).unwrap();
        assert!(r.passed(), "{r}");
        assert!(!ctx.adjacency(2).submatrix(ctx.support(3), ctx.support(3)).is_zero());
        assert!(check_block_form(&ctx, &m, WreathIndex::ZERO).is_err());
    }

    #[test]
    fn commutation() {
        for v in [&[2, 3][..], &[2, 2, 2]] {
            let (m, ctx) = context(v, 1);
            let r = check_commutation(&ctx, &m).unwrap();
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn f_family_for_2_2() {
        let (m, ctx) = context(&[2, 2], 0);
        let cctx = ctx.convert(|q| CycloNum::rational(q.clone()));
        let f = build_f_family(&cctx, &m).unwrap();
        assert_eq!(f.members().len(), 1);
        let fm = &f.members()[0].matrix;
        let half = CycloNum::from_ratio(1, 2);
        let manual = cctx
            .dual(2)
            .try_mul(&cctx.adjacency(0).try_sub(cctx.adjacency(1)).unwrap())
            .unwrap()
            .try_mul(cctx.dual(2))
            .unwrap()
            .scale(&half);
        assert_eq!(fm, &manual);
        assert_eq!(fm.trace(), CycloNum::one());
        let g = build_g_family(&cctx, &m).unwrap();
        assert!(check_f_properties(&cctx, &f, &g).unwrap().passed());
    }

    #[test]
    fn f_family_for_2_3_and_single_level() {
        let (m, ctx) = context(&[2, 3], 0);
        let cctx = ctx.convert(|q| CycloNum::rational(q.clone()));
        let f = build_f_family(&cctx, &m).unwrap();
        assert_eq!(f.nonzero_count(), 2);
        let g = build_g_family(&cctx, &m).unwrap();
        let r = check_f_properties(&cctx, &f, &g).unwrap();
        assert!(r.passed(), "{r}");
        // A_{(1,1)} acts by ε^{-1} = -1
        let a = cctx.adjacency(1);
        let member = &f.members()[0].matrix;
        assert_eq!(a.try_mul(member).unwrap(), member.scale(&CycloNum::integer(-1)));

        let (m, ctx) = context(&[2], 0);
        let cctx = ctx.convert(|q| CycloNum::rational(q.clone()));
        assert!(build_f_family(&cctx, &m).unwrap().members().is_empty());
    }

    #[test]
    fn decomposition_small_cases() {
        let r = decomposition_report(&moduli(&[2, 2]), None).unwrap();
        assert!(r.passed(), "{:?}", r.verdicts);
        assert_eq!((r.dim_t, r.one_dim_count), (10, 1));
        let r = decomposition_report(&moduli(&[3]), None).unwrap();
        assert!(r.passed(), "{:?}", r.verdicts);
        assert_eq!((r.dim_t, r.one_dim_count), (9, 0));
        assert!(decomposition_report(&moduli(&[2]), Some(&[2])).is_err());
        assert!(decomposition_report(&moduli(&[2]), Some(&[])).is_err());
    }

    #[test]
    fn mismatched_context_is_rejected() {
        let (_, ctx) = context(&[2, 2], 0);
        assert!(build_g_family(&ctx, &moduli(&[2, 3])).is_err());
    }
}
