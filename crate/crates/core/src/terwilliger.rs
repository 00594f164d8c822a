//! Dual idempotents, triple products and the Terwilliger algebra `T(x)`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::report::CheckReport;
use crate::scalar::Scalar;
use crate::scheme::Scheme;
use crate::span::{algebra_closure, SpanBasis};
use crate::wreath::{wreath_of_cyclics, Moduli, WreathIndex};

/// A scheme with a fixed base point `x`, its adjacency matrices `A_i` and
/// dual idempotents `E_i^* = E_i^*(x)`.
#[derive(Clone, Debug)]
pub struct TerwilligerContext<S> {
    scheme: Scheme,
    base_point: usize,
    supports: Vec<Vec<usize>>,
    dual_idempotents: Vec<Matrix<S>>,
    adjacency: Vec<Matrix<S>>,
}

/// Materialises every `A_i` and `E_i^*(x)`.
pub fn make_context<S: Scalar>(s: &Scheme, x: usize) -> Result<TerwilligerContext<S>> {
    if x >= s.order() {
        return Err(Error::OutOfRange(format!("base point {x} of {}", s.order())));
    }
    let k = s.num_classes();
    let supports: Vec<Vec<usize>> = (0..k).map(|i| s.neighbourhood(x, i)).collect();
    let dual_idempotents = (0..k)
        .map(|i| Matrix::diagonal((0..s.order()).map(|y| if s.classify(x, y) == i { S::one() } else { S::zero() }).collect()))
        .collect();
    Ok(TerwilligerContext {
        scheme: s.clone(),
        base_point: x,
        supports,
        dual_idempotents,
        adjacency: s.adjacency_matrices(),
    })
}

impl<S: Scalar> TerwilligerContext<S> {
    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    pub fn base_point(&self) -> usize {
        self.base_point
    }

    pub fn order(&self) -> usize {
        self.scheme.order()
    }

    pub fn num_classes(&self) -> usize {
        self.scheme.num_classes()
    }

    /// `E_i^*`.
    pub fn dual(&self, i: usize) -> &Matrix<S> {
        &self.dual_idempotents[i]
    }

    /// `A_i`.
    pub fn adjacency(&self, i: usize) -> &Matrix<S> {
        &self.adjacency[i]
    }

    pub fn duals(&self) -> &[Matrix<S>] {
        &self.dual_idempotents
    }

    pub fn adjacencies(&self) -> &[Matrix<S>] {
        &self.adjacency
    }

    /// Vertices in `R_i(x)`, ascending.
    pub fn support(&self, i: usize) -> &[usize] {
        &self.supports[i]
    }

    /// The generating set `{A_i} ∪ {E_i^*}` of `T(x)`.
    pub fn generators(&self) -> Vec<Matrix<S>> {
        self.adjacency.iter().chain(&self.dual_idempotents).cloned().collect()
    }

    /// The same context over another scalar type.
    pub fn convert<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> TerwilligerContext<T> {
        TerwilligerContext {
            scheme: self.scheme.clone(),
            base_point: self.base_point,
            supports: self.supports.clone(),
            dual_idempotents: self.dual_idempotents.iter().map(|m| m.map(f)).collect(),
            adjacency: self.adjacency.iter().map(|m| m.map(f)).collect(),
        }
    }
}

/// `E_i^* A_j E_h^*` as an exact product.
pub fn triple_product<S: Scalar>(ctx: &TerwilligerContext<S>, i: usize, j: usize, h: usize) -> Result<Matrix<S>> {
    let k = ctx.num_classes();
    if i >= k || j >= k || h >= k {
        return Err(Error::OutOfRange(format!("triple ({i},{j},{h}) with {k} classes")));
    }
    ctx.dual(i).try_mul(ctx.adjacency(j))?.try_mul(ctx.dual(h))
}

/// Which case of the nonzero-triple-product list `E_a^* A_b E_c^*` falls
/// under, if any.
pub fn triple_case(m: &Moduli, a: WreathIndex, b: WreathIndex, c: WreathIndex) -> Option<u8> {
    let (i, alpha) = (a.level, a.offset);
    let (j, beta) = (b.level, b.offset);
    let (h, gamma) = (c.level, c.offset);
    if i == 0 && j == 0 && h == 0 {
        return Some(1);
    }
    if i != 0 && i == j && j == h && (alpha + beta) % m.modulus(i) == gamma % m.modulus(i) {
        return Some(2);
    }
    if h < i && i == j && (alpha + beta) % m.modulus(i) == 0 {
        return Some(3);
    }
    if j < i && i == h && alpha == gamma {
        return Some(4);
    }
    if i < j && j == h && beta == gamma {
        return Some(5);
    }
    None
}

/// Whether `E_a^* A_b E_c^*` is predicted to be nonzero.
pub fn predict_triple_nonzero(m: &Moduli, a: WreathIndex, b: WreathIndex, c: WreathIndex) -> bool {
    triple_case(m, a, b, c).is_some()
}

/// Compares the predicted nonzero triple products against the exact products
/// `E_a^* A_b E_c^*(x)` for every triple.
pub fn check_triple_list(m: &Moduli, x: usize) -> Result<CheckReport> {
    let s = wreath_of_cyclics(m);
    let ctx = make_context::<crate::Rational>(&s, x)?;
    let idx = m.indices();
    let mut report = CheckReport::new("triple-list");
    for &a in &idx {
        for &b in &idx {
            for &c in &idx {
                let case = triple_case(m, a, b, c);
                let actual = !triple_product(&ctx, m.flat(a), m.flat(b), m.flat(c))?.is_zero();
                report.tally(match case {
                    Some(n) => format!("case {n}"),
                    None => "zero".to_string(),
                });
                report.record(case.is_some() == actual, || {
                    format!("x={x}: E*_{a} A_{b} E*_{c} nonzero = {actual}, predicted {}", case.is_some())
                });
            }
        }
    }
    Ok(report)
}

/// Span (without closure) of all triple products `E_i^* A_j E_h^*`.
pub fn t0_span<S: Scalar>(ctx: &TerwilligerContext<S>) -> Result<SpanBasis<S>> {
    let n = ctx.order();
    let k = ctx.num_classes();
    let mut span = SpanBasis::for_matrices(n, n);
    for i in 0..k {
        for j in 0..k {
            for h in 0..k {
                span.insert_matrix(&triple_product(ctx, i, j, h)?)?;
            }
        }
    }
    Ok(span)
}

/// `dim T(x)` from the closure of the generators.
pub fn terwilliger_dimension<S: Scalar>(ctx: &TerwilligerContext<S>) -> Result<usize> {
    Ok(algebra_closure(&ctx.generators())?.dimension())
}

/// `|R_i(x) ∩ R_j(y) ∩ R_h(z)|` by enumeration.
#[allow(clippy::too_many_arguments)]
pub fn triple_intersection(s: &Scheme, x: usize, y: usize, z: usize, i: usize, j: usize, h: usize) -> Result<u64> {
    for v in [x, y, z] {
        if v >= s.order() {
            return Err(Error::OutOfRange(format!("vertex {v} of {}", s.order())));
        }
    }
    Ok((0..s.order())
        .filter(|&w| s.classify(x, w) == i && s.classify(y, w) == j && s.classify(z, w) == h)
        .count() as u64)
}

/// `dim T_0(x)` and `dim T(x)` at one base point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasePointDimensions {
    pub base_point: usize,
    pub dim_t0: usize,
    pub dim_t: usize,
}

/// Triple-regularity verdict together with the `T_0(x) = T(x)` comparison at
/// every base point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TriplyRegularReport {
    pub triply_regular: bool,
    pub witness: Option<String>,
    pub commutative: bool,
    pub dimensions: Vec<BasePointDimensions>,
}

impl TriplyRegularReport {
    /// For commutative schemes the verdict must coincide with `T_0(x) = T(x)`
    /// holding at every base point.
    pub fn consistent(&self) -> bool {
        let equal_everywhere = self.dimensions.iter().all(|d| d.dim_t0 == d.dim_t);
        !self.commutative || self.triply_regular == equal_everywhere
    }

    pub fn to_check(&self, name: &str) -> CheckReport {
        let mut r = CheckReport::new(name);
        r.record(self.triply_regular, || self.witness.clone().unwrap_or_default());
        for d in &self.dimensions {
            r.record(!self.commutative || self.triply_regular == (d.dim_t0 == d.dim_t), || {
                format!(
                    "x={}: dim T0 = {}, dim T = {} disagrees with triply-regular = {}",
                    d.base_point, d.dim_t0, d.dim_t, self.triply_regular
                )
            });
        }
        r
    }
}

type Triple = (usize, usize, usize);
/// Sorted `(class triple key, multiplicity)` pairs.
type Profile = Vec<(usize, u32)>;

/// Decides triple regularity by enumeration: for every `(x, y, z)`, the
/// multiset of class triples `(c(x,w), c(y,w), c(z,w))` over `w` must depend
/// only on `(c(x,y), c(x,z), c(y,z))`.
pub fn triple_regularity(s: &Scheme) -> (bool, Option<String>) {
    let n = s.order();
    let k = s.num_classes();
    let profile = |x: usize, y: usize, z: usize| -> Profile {
        let mut keys: Vec<usize> = (0..n)
            .map(|w| (s.classify(x, w) * k + s.classify(y, w)) * k + s.classify(z, w))
            .collect();
        keys.sort_unstable();
        let mut out: Profile = Vec::new();
        for key in keys {
            match out.last_mut() {
                Some((last, c)) if *last == key => *c += 1,
                _ => out.push((key, 1)),
            }
        }
        out
    };
    let mut seen: HashMap<Triple, (Triple, Profile)> = HashMap::new();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let label = (s.classify(x, y), s.classify(x, z), s.classify(y, z));
                let p = profile(x, y, z);
                match seen.get(&label) {
                    None => {
                        seen.insert(label, ((x, y, z), p));
                    }
                    Some((first, reference)) if *reference != p => {
                        let (key, a, b) = first_difference(reference, &p);
                        let (i, j, h) = (key / (k * k), (key / k) % k, key % k);
                        return (
                            false,
                            Some(format!(
                                "classes (l,m,n) = {label:?}: |R_{i}(x)∩R_{j}(y)∩R_{h}(z)| is {a} at {first:?} but {b} at {:?}",
                                (x, y, z)
                            )),
                        );
                    }
                    _ => {}
                }
            }
        }
    }
    (true, None)
}

fn first_difference(a: &[(usize, u32)], b: &[(usize, u32)]) -> (usize, u32, u32) {
    let lookup = |v: &[(usize, u32)], key: usize| v.iter().find(|(k, _)| *k == key).map_or(0, |(_, c)| *c);
    let mut keys: Vec<usize> = a.iter().chain(b).map(|(k, _)| *k).collect();
    keys.sort_unstable();
    keys.dedup();
    keys.into_iter()
        .map(|key| (key, lookup(a, key), lookup(b, key)))
        .find(|(_, x, y)| x != y)
        .expect("profiles differ")
}

/// Triple regularity plus `dim T_0(x)` and `dim T(x)` at the given base
/// points (all of them when `base_points` is `None`).
pub fn check_triply_regular(s: &Scheme, base_points: Option<&[usize]>) -> Result<TriplyRegularReport> {
    let (triply_regular, witness) = triple_regularity(s);
    let points: Vec<usize> = match base_points {
        Some(p) => p.to_vec(),
        None => (0..s.order()).collect(),
    };
    let dimensions = points
        .par_iter()
        .map(|&x| {
            let ctx = make_context::<crate::Rational>(s, x)?;
            Ok(BasePointDimensions {
                base_point: x,
                dim_t0: t0_span(&ctx)?.dimension(),
                dim_t: terwilliger_dimension(&ctx)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TriplyRegularReport { triply_regular, witness, commutative: s.is_commutative(), dimensions })
}

/// Checks that `span{E_i^* 1}` has dimension `d + 1` and is mapped into itself
/// by every generator of `T(x)`.
pub fn check_primary_module<S: Scalar>(ctx: &TerwilligerContext<S>) -> Result<CheckReport> {
    let n = ctx.order();
    let k = ctx.num_classes();
    let ones = vec![S::one(); n];
    let vectors: Vec<Vec<S>> = ctx.duals().iter().map(|e| e.apply(&ones)).collect::<Result<_>>()?;
    let mut report = CheckReport::new("primary-module");
    let mut span = SpanBasis::new(n);
    for (i, v) in vectors.iter().enumerate() {
        report.record(v.iter().any(|e| !e.is_negligible()), || format!("E*_{i} 1 is zero"));
        span.insert(v)?;
    }
    for i in 0..k {
        for j in (i + 1)..k {
            let dot = vectors[i].iter().zip(&vectors[j]).fold(S::zero(), |acc, (a, b)| acc + a.mul_ref(b));
            report.record(dot.is_negligible(), || format!("E*_{i} 1 and E*_{j} 1 are not orthogonal"));
        }
    }
    report.record(span.dimension() == k, || format!("span has dimension {} instead of {k}", span.dimension()));
    for (g, gen) in ctx.generators().iter().enumerate() {
        let name = if g < k { format!("A_{g}") } else { format!("E*_{}", g - k) };
        for (i, v) in vectors.iter().enumerate() {
            let image = gen.apply(v)?;
            report.record(span.contains(&image)?, || format!("{name} E*_{i} 1 leaves the primary module"));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wreath::cyclic_scheme;
    use crate::Rational;

    fn moduli(v: &[usize]) -> Moduli {
        Moduli::new(v.to_vec()).unwrap()
    }

    fn r(x: i64) -> Rational {
        Rational::from_i64(x)
    }

    #[test]
    fn context_of_c2() {
        let ctx = make_context::<Rational>(&cyclic_scheme(2).unwrap(), 0).unwrap();
        assert_eq!(ctx.dual(0), &Matrix::diagonal(vec![r(1), r(0)]));
        assert_eq!(ctx.dual(1), &Matrix::diagonal(vec![r(0), r(1)]));
        assert!(make_context::<Rational>(&cyclic_scheme(2).unwrap(), 2).is_err());
    }

    #[test]
    fn duals_partition_identity() {
        let s = wreath_of_cyclics(&moduli(&[2, 3]));
        let ctx = make_context::<Rational>(&s, 0).unwrap();
        let sum = ctx.duals().iter().skip(1).fold(ctx.dual(0).clone(), |a, e| &a + e);
        assert_eq!(sum, Matrix::identity(6));
        let sizes: Vec<usize> = (0..4).map(|i| ctx.support(i).len()).collect();
        assert_eq!(sizes, vec![1, 1, 2, 2]);
        for i in 0..4 {
            for j in 0..4 {
                let p = ctx.dual(i) * ctx.dual(j);
                if i == j {
                    assert_eq!(&p, ctx.dual(i));
                } else {
                    assert!(p.is_zero());
                }
            }
        }
    }

    #[test]
    fn triple_products_follow_intersection_numbers() {
        let s = wreath_of_cyclics(&moduli(&[2, 3]));
        let ctx = make_context::<Rational>(&s, 0).unwrap();
        assert_eq!(triple_product(&ctx, 0, 0, 0).unwrap(), *ctx.dual(0));
        for i in 0..4 {
            for j in 0..4 {
                for h in 0..4 {
                    let zero = triple_product(&ctx, i, j, h).unwrap().is_zero();
                    assert_eq!(zero, s.intersection_number(i, j, h).unwrap() == 0);
                }
            }
        }
        assert!(triple_product(&ctx, 0, 4, 0).is_err());
    }

    #[test]
    fn triple_case_examples() {
        let z = WreathIndex::ZERO;
        let m = moduli(&[2, 3]);
        assert!(predict_triple_nonzero(&m, z, z, z));
        let a = WreathIndex { level: 2, offset: 1 };
        let b = WreathIndex { level: 2, offset: 2 };
        assert_eq!(triple_case(&m, a, b, z), Some(3));
        let one = WreathIndex { level: 1, offset: 1 };
        assert!(!predict_triple_nonzero(&m, one, a, b));
    }

    #[test]
    fn triple_list_matches_products() {
        let r = check_triple_list(&moduli(&[2, 3]), 0).unwrap();
        assert_eq!(r.checked, 64);
        assert!(r.passed(), "{r}");
        assert!(check_triple_list(&moduli(&[2, 2, 2]), 0).unwrap().passed());
    }

    #[test]
    fn t0_dimensions() {
        let c2 = make_context::<Rational>(&cyclic_scheme(2).unwrap(), 0).unwrap();
        assert_eq!(t0_span(&c2).unwrap().dimension(), 4);
        for (v, dim) in [(vec![2, 2], 10), (vec![2, 3], 18)] {
            let ctx = make_context::<Rational>(&wreath_of_cyclics(&moduli(&v)), 0).unwrap();
            assert_eq!(t0_span(&ctx).unwrap().dimension(), dim);
            assert_eq!(terwilliger_dimension(&ctx).unwrap(), dim);
        }
    }

    #[test]
    fn triple_intersection_examples() {
        let m = moduli(&[2, 3]);
        let s = wreath_of_cyclics(&m);
        assert_eq!(triple_intersection(&s, 1, 1, 1, 0, 0, 0).unwrap(), 1);
        assert_eq!(triple_intersection(&s, 1, 2, 1, 0, 0, 0).unwrap(), 0);
        // l < i = j = h with equal offsets: x, y, z inside one level-1 ball
        // around each other, count = |R_{(2,1)}(x)|
        let (x, y, z) = (0, 1, 1);
        assert_eq!(s.classify(x, y), 1);
        assert_eq!(triple_intersection(&s, x, y, z, 2, 2, 2).unwrap(), 2);
        // summing over the first class gives |R_j(y) ∩ R_h(z)|
        for j in 0..4 {
            for h in 0..4 {
                let total: u64 = (0..4).map(|i| triple_intersection(&s, 0, 3, 4, i, j, h).unwrap()).sum();
                let direct = (0..6).filter(|&w| s.classify(3, w) == j && s.classify(4, w) == h).count() as u64;
                assert_eq!(total, direct);
            }
        }
        assert!(triple_intersection(&s, 6, 0, 0, 0, 0, 0).is_err());
    }

    #[test]
    fn triply_regular_wreaths() {
        for v in [vec![2, 3], vec![2, 2, 2]] {
            let report = check_triply_regular(&wreath_of_cyclics(&moduli(&v)), None).unwrap();
            assert!(report.triply_regular);
            assert!(report.consistent());
            assert!(report.dimensions.iter().all(|d| d.dim_t0 == d.dim_t));
        }
    }

    #[test]
    fn synthetic_classifier_is_not_triply_regular() {
        // vertex 3 sees everything through class 1 while the rest form a
        // triangle, so triple counts depend on the chosen triple
        let s = Scheme::from_fn(4, 2, |x, y| if x == y { 0 } else { 1 }).unwrap();
        assert!(triple_regularity(&s).0);
        let s = Scheme::from_fn(4, 3, |x, y| match (x, y) {
            _ if x == y => 0,
            (3, _) | (_, 3) => 2,
            _ => 1,
        })
        .unwrap();
        let (ok, witness) = triple_regularity(&s);
        assert!(!ok);
        assert!(witness.unwrap().contains("classes"));
    }

    #[test]
    fn primary_module_examples() {
        for (v, dim) in [(vec![2, 2], 3), (vec![2, 3], 4)] {
            let ctx = make_context::<Rational>(&wreath_of_cyclics(&moduli(&v)), 0).unwrap();
            let r = check_primary_module(&ctx).unwrap();
            assert!(r.passed(), "{r}");
            assert_eq!(ctx.num_classes(), dim);
        }
    }

    #[test]
    fn float_context_agrees_on_dimensions() {
        let s = wreath_of_cyclics(&moduli(&[2, 2]));
        let ctx = make_context::<f64>(&s, 0).unwrap();
        assert_eq!(terwilliger_dimension(&ctx).unwrap(), 10);
        assert_eq!(t0_span(&ctx).unwrap().dimension(), 10);
    }
}
