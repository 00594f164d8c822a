//! Cyclic schemes, wreath products, and the `(level, offset)` class calculus
//! of `C_{p_1} ≀ C_{p_2} ≀ ⋯ ≀ C_{p_d}`.
//!
//! Vertices of the iterated product are mixed-radix tuples `(x_1, …, x_d)`
//! with `x_d` most significant, i.e. vertex `x_1 + p_1 x_2 + p_1 p_2 x_3 + ⋯`.
//! Class `(i, α)` holds between `x` and `y` when `i` is the highest level at
//! which they differ and `y_i - x_i ≡ α (mod p_i)`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::CheckReport;
use crate::scheme::Scheme;

/// The moduli `p_1, …, p_d` of the cyclic factors, each at least 2.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Moduli(Vec<usize>);

/// A class of the iterated wreath product: level 0 is the diagonal relation,
/// otherwise `offset ∈ [1, p_level - 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct WreathIndex {
    pub level: usize,
    pub offset: usize,
}

impl WreathIndex {
    pub const ZERO: WreathIndex = WreathIndex { level: 0, offset: 0 };

    pub fn is_zero(&self) -> bool {
        self.level == 0
    }
}

impl fmt::Display for WreathIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.level == 0 {
            write!(f, "0")
        } else {
            write!(f, "({},{})", self.level, self.offset)
        }
    }
}

impl Moduli {
    pub fn new(moduli: Vec<usize>) -> Result<Self> {
        if moduli.is_empty() {
            return Err(Error::Domain("at least one modulus is required".into()));
        }
        if let Some(p) = moduli.iter().find(|&&p| p < 2) {
            return Err(Error::Domain(format!("modulus {p} is smaller than 2")));
        }
        Ok(Moduli(moduli))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Number of levels `d`.
    pub fn levels(&self) -> usize {
        self.0.len()
    }

    /// `p_level` for `1 <= level <= d`.
    pub fn modulus(&self, level: usize) -> usize {
        assert!(level >= 1 && level <= self.levels(), "level {level} out of range");
        self.0[level - 1]
    }

    /// Vertex count `p_1 ⋯ p_d`, or `None` on overflow.
    pub fn order(&self) -> Option<usize> {
        self.0.iter().try_fold(1usize, |acc, &p| acc.checked_mul(p))
    }

    /// `1 + Σ (p_i - 1)`.
    pub fn num_classes(&self) -> usize {
        1 + self.0.iter().map(|p| p - 1).sum::<usize>()
    }

    /// Flat index of `(level, 1)`; equals the number of classes of lower level.
    pub fn level_start(&self, level: usize) -> usize {
        if level == 0 {
            return 0;
        }
        1 + self.0[..level - 1].iter().map(|p| p - 1).sum::<usize>()
    }

    /// `Σ_{j<i} (p_j - 1) + α`, and 0 for level 0.
    pub fn flat(&self, idx: WreathIndex) -> usize {
        if idx.level == 0 {
            0
        } else {
            self.level_start(idx.level) + idx.offset - 1
        }
    }

    pub fn index(&self, flat: usize) -> Result<WreathIndex> {
        if flat == 0 {
            return Ok(WreathIndex::ZERO);
        }
        let mut start = 1;
        for (l, &p) in self.0.iter().enumerate() {
            if flat < start + p - 1 {
                return Ok(WreathIndex { level: l + 1, offset: flat - start + 1 });
            }
            start += p - 1;
        }
        Err(Error::OutOfRange(format!("class {flat} of {}", self.num_classes())))
    }

    /// Every class in flat order.
    pub fn indices(&self) -> Vec<WreathIndex> {
        (0..self.num_classes()).map(|f| self.index(f).expect("in range")).collect()
    }

    /// Classes of the given level, offsets ascending.
    pub fn level_indices(&self, level: usize) -> Vec<WreathIndex> {
        if level == 0 {
            return vec![WreathIndex::ZERO];
        }
        (1..self.modulus(level)).map(|offset| WreathIndex { level, offset }).collect()
    }

    /// `(level, offset mod p_level)`, or `None` when the offset is ≡ 0.
    pub fn wrap(&self, level: usize, offset: i64) -> Option<WreathIndex> {
        if level == 0 {
            return Some(WreathIndex::ZERO);
        }
        let p = self.modulus(level) as i64;
        let r = offset.rem_euclid(p);
        (r != 0).then_some(WreathIndex { level, offset: r as usize })
    }

    pub fn is_valid(&self, idx: WreathIndex) -> bool {
        if idx.level == 0 {
            idx.offset == 0
        } else {
            idx.level <= self.levels() && idx.offset >= 1 && idx.offset < self.modulus(idx.level)
        }
    }

    /// Valency of `(i, α)`: `p_1 ⋯ p_{i-1}`, and 1 for the diagonal.
    pub fn valency(&self, idx: WreathIndex) -> u64 {
        if idx.level == 0 {
            1
        } else {
            self.0[..idx.level - 1].iter().map(|&p| p as u64).product()
        }
    }

    /// Mixed-radix digits `(x_1, …, x_d)` of a vertex.
    pub fn coordinates(&self, mut vertex: usize) -> Vec<usize> {
        self.0
            .iter()
            .map(|&p| {
                let c = vertex % p;
                vertex /= p;
                c
            })
            .collect()
    }

    /// The first `levels` moduli, or `None` when `levels == 0`.
    pub fn prefix(&self, levels: usize) -> Option<Moduli> {
        (levels > 0).then(|| Moduli(self.0[..levels].to_vec()))
    }

    /// Direct evaluation of the class of `(x, y)` from coordinates.
    pub fn classify(&self, x: usize, y: usize) -> WreathIndex {
        let cx = self.coordinates(x);
        let cy = self.coordinates(y);
        for level in (1..=self.levels()).rev() {
            let (a, b) = (cx[level - 1], cy[level - 1]);
            if a != b {
                let p = self.modulus(level);
                return WreathIndex { level, offset: (b + p - a) % p };
            }
        }
        WreathIndex::ZERO
    }
}

impl fmt::Display for Moduli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// The cyclic scheme `C_n` on `ℤ/n` with `classify(x, y) = (y - x) mod n`.
pub fn cyclic_scheme(n: usize) -> Result<Scheme> {
    if n == 0 {
        return Err(Error::Domain("cyclic scheme of order 0".into()));
    }
    Scheme::from_fn(n, n, |x, y| (y + n - x) % n)
}

/// `inner ≀ outer`: `|outer|` copies of `inner`, with vertex `(x, y_j)`
/// stored as `j * |inner| + x`. Pairs inside a copy keep their inner class;
/// pairs in different copies get the outer class shifted by `d`.
pub fn wreath_product(inner: &Scheme, outer: &Scheme) -> Result<Scheme> {
    for (name, s) in [("inner", inner), ("outer", outer)] {
        let axioms = s.verify_axioms();
        if !axioms.all_hold() {
            return Err(Error::Domain(format!(
                "{name} factor is not an association scheme ({})",
                axioms.first_failure().unwrap_or_default()
            )));
        }
    }
    let u = inner.order();
    let v = outer.order();
    let d = inner.num_classes() - 1;
    let order = u.checked_mul(v).ok_or_else(|| Error::Domain("wreath product order overflows".into()))?;
    Scheme::from_fn(order, d + outer.num_classes(), |a, b| {
        let (ja, jb) = (a / u, b / u);
        if ja == jb {
            inner.classify(a % u, b % u)
        } else {
            d + outer.classify(ja, jb)
        }
    })
}

/// `C_{p_1} ≀ C_{p_2} ≀ ⋯ ≀ C_{p_d}` as a left fold of [`wreath_product`].
pub fn wreath_of_cyclics(moduli: &Moduli) -> Scheme {
    let mut it = moduli.as_slice().iter();
    let first = cyclic_scheme(*it.next().expect("moduli are nonempty")).expect("modulus >= 2");
    it.fold(first, |acc, &p| {
        wreath_product(&acc, &cyclic_scheme(p).expect("modulus >= 2")).expect("cyclic factors are schemes")
    })
}

/// Closed-form criterion for `p_{(i,α)(j,β)}^{(h,γ)} = 0`.
pub fn predict_vanishing(m: &Moduli, a: WreathIndex, b: WreathIndex, c: WreathIndex) -> bool {
    let (i, alpha) = (a.level, a.offset);
    let (j, beta) = (b.level, b.offset);
    let (h, gamma) = (c.level, c.offset);
    if i == j && j == h {
        // all-zero triple: p_{00}^0 = 1
        if i == 0 {
            return false;
        }
        return !(alpha + beta + m.modulus(i) - gamma).is_multiple_of(m.modulus(i));
    }
    if (i == j && i < h) || (i == h && i < j) || (j == h && j < i) {
        return true;
    }
    if h < i && i == j {
        return (alpha + beta) % m.modulus(i) != 0;
    }
    if j < i && i == h {
        return alpha != gamma;
    }
    if i < j && j == h {
        return beta != gamma;
    }
    // the three levels are pairwise distinct
    true
}

/// Compares [`predict_vanishing`] against brute-force intersection numbers on
/// every triple of classes.
pub fn check_vanishing_criterion(m: &Moduli) -> Result<CheckReport> {
    let s = wreath_of_cyclics(m);
    let table = s.intersection_numbers()?;
    let idx = m.indices();
    let mut report = CheckReport::new("vanishing");
    for &a in &idx {
        for &b in &idx {
            for &c in &idx {
                let predicted = predict_vanishing(m, a, b, c);
                let actual = table.get(m.flat(a), m.flat(b), m.flat(c));
                report.tally(if predicted { "vanishing" } else { "nonvanishing" });
                report.record(predicted == (actual == 0), || {
                    format!("p_{{{a}{b}}}^{c} = {actual} but the criterion predicts vanishing = {predicted}")
                });
            }
        }
    }
    Ok(report)
}

/// Checks, at every base point, that each ball `R_{(i,α)}(x)` induces the
/// wreath product of the lower levels, and the membership rules for pairs of
/// vertices drawn from two balls.
pub fn check_ball_structure(m: &Moduli) -> Result<CheckReport> {
    let s = wreath_of_cyclics(m);
    let n = s.order();
    let idx = m.indices();
    let mut report = CheckReport::new("ball-structure");
    for x in 0..n {
        let balls: Vec<Vec<usize>> = idx.iter().map(|&a| s.neighbourhood(x, m.flat(a))).collect();
        for &a in idx.iter().filter(|a| a.level >= 1) {
            let ball = &balls[m.flat(a)];
            let lower = match m.prefix(a.level - 1) {
                Some(p) => wreath_of_cyclics(&p),
                None => cyclic_scheme(1)?,
            };
            let radix = lower.order();
            let mut image: Vec<usize> = ball.iter().map(|&y| y % radix).collect();
            image.sort_unstable();
            report.record(image == (0..radix).collect::<Vec<_>>(), || {
                format!("x={x}: R_{a}(x) does not biject onto the lower-level product")
            });
            let mut used = vec![false; s.num_classes()];
            for &y in ball {
                for &z in ball {
                    let c = s.classify(y, z);
                    used[c] = true;
                    report.record(c == lower.classify(y % radix, z % radix), || {
                        format!("x={x}: classify({y},{z}) = {c} differs from the lower-level product in R_{a}(x)")
                    });
                }
            }
            let expected: Vec<bool> = (0..s.num_classes()).map(|c| c < m.level_start(a.level)).collect();
            report.record(used == expected, || {
                format!("x={x}: R_{a}(x) does not use exactly the classes of levels below {}", a.level)
            });
        }
        for &a in &idx {
            for &b in &idx {
                if a.level < b.level {
                    continue;
                }
                for &y in &balls[m.flat(a)] {
                    for &z in &balls[m.flat(b)] {
                        if a.level == b.level {
                            let c = m.index(s.classify(y, z))?;
                            report.tally("same-level");
                            report.record(c.level <= a.level, || {
                                format!("x={x}: y={y} in R_{a}, z={z} in R_{b} but (y,z) has level {}", c.level)
                            });
                        } else {
                            report.tally("lower-level");
                            let c = s.classify(z, y);
                            report.record(c == m.flat(a), || {
                                format!("x={x}: y={y} in R_{a}, z={z} in R_{b} but (z,y) is class {c}")
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moduli(v: &[usize]) -> Moduli {
        Moduli::new(v.to_vec()).unwrap()
    }

    #[test]
    fn moduli_validation() {
        assert!(Moduli::new(vec![]).is_err());
        assert!(Moduli::new(vec![2, 1]).is_err());
        assert_eq!(moduli(&[2, 3, 5]).order(), Some(30));
        assert_eq!(moduli(&[2, 3, 5]).num_classes(), 8);
    }

    #[test]
    fn flat_indexing() {
        let m = moduli(&[2, 3, 5]);
        assert_eq!(m.flat(WreathIndex::ZERO), 0);
        assert_eq!(m.flat(WreathIndex { level: 1, offset: 1 }), 1);
        assert_eq!(m.flat(WreathIndex { level: 2, offset: 2 }), 3);
        assert_eq!(m.flat(WreathIndex { level: 3, offset: 1 }), 4);
        assert_eq!(m.index(7).unwrap(), WreathIndex { level: 3, offset: 4 });
        assert!(m.index(8).is_err());
        for f in 0..m.num_classes() {
            assert_eq!(m.flat(m.index(f).unwrap()), f);
        }
        assert_eq!(m.wrap(2, 4), Some(WreathIndex { level: 2, offset: 1 }));
        assert_eq!(m.wrap(2, -1), Some(WreathIndex { level: 2, offset: 2 }));
        assert_eq!(m.wrap(2, 3), None);
    }

    #[test]
    fn cyclic_examples() {
        let c1 = cyclic_scheme(1).unwrap();
        assert_eq!((c1.order(), c1.num_classes()), (1, 1));
        let c3 = cyclic_scheme(3).unwrap();
        assert_eq!(c3.classify(0, 1), 1);
        assert_eq!(c3.classify(1, 0), 2);
        let c4 = cyclic_scheme(4).unwrap();
        assert!(c4.verify_axioms().all_hold());
        assert_eq!(c4.valencies().unwrap(), vec![1, 1, 1, 1]);
        assert!(cyclic_scheme(0).is_err());
    }

    #[test]
    fn wreath_product_examples() {
        let c2 = cyclic_scheme(2).unwrap();
        let w = wreath_product(&c2, &c2).unwrap();
        assert_eq!((w.order(), w.num_classes()), (4, 3));
        assert_eq!(w.valencies().unwrap(), vec![1, 1, 2]);

        // C_1 ≀ ψ is ψ itself under the identity bijection
        let c5 = cyclic_scheme(5).unwrap();
        assert_eq!(wreath_product(&cyclic_scheme(1).unwrap(), &c5).unwrap(), c5);

        let broken = Scheme::from_fn(2, 2, |_, _| 1).unwrap();
        assert!(wreath_product(&broken, &c2).is_err());
    }

    #[test]
    fn wreath_of_cyclics_examples() {
        assert_eq!(wreath_of_cyclics(&moduli(&[2])), cyclic_scheme(2).unwrap());
        let w = wreath_of_cyclics(&moduli(&[2, 3]));
        assert_eq!((w.order(), w.num_classes()), (6, 4));
        assert_eq!(w.valencies().unwrap(), vec![1, 1, 2, 2]);
        let w = wreath_of_cyclics(&moduli(&[2, 2, 2]));
        assert_eq!((w.order(), w.num_classes()), (8, 4));
        assert_eq!(w.valencies().unwrap(), vec![1, 1, 2, 4]);
    }

    #[test]
    fn fold_matches_coordinate_formula() {
        for v in [vec![2, 3], vec![3, 2, 2], vec![4, 3], vec![2, 3, 4]] {
            let m = moduli(&v);
            let s = wreath_of_cyclics(&m);
            for x in 0..s.order() {
                for y in 0..s.order() {
                    assert_eq!(s.classify(x, y), m.flat(m.classify(x, y)), "{m} at ({x},{y})");
                }
            }
        }
    }

    #[test]
    fn vanishing_examples() {
        let m = moduli(&[2]);
        let one = WreathIndex { level: 1, offset: 1 };
        assert!(predict_vanishing(&m, one, one, one));
        assert!(!predict_vanishing(&m, one, one, WreathIndex::ZERO));
        assert!(!predict_vanishing(&m, WreathIndex::ZERO, WreathIndex::ZERO, WreathIndex::ZERO));
        let m = moduli(&[2, 3, 5]);
        let a = WreathIndex { level: 1, offset: 1 };
        let b = WreathIndex { level: 2, offset: 1 };
        let c = WreathIndex { level: 3, offset: 1 };
        assert!(predict_vanishing(&m, a, b, c));
    }

    #[test]
    fn vanishing_criterion_agrees_with_counts() {
        for v in [vec![2, 3], vec![2, 2, 2], vec![3, 3]] {
            let r = check_vanishing_criterion(&moduli(&v)).unwrap();
            let k = moduli(&v).num_classes() as u64;
            assert_eq!(r.checked, k * k * k);
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn ball_structure_examples() {
        let m = moduli(&[2, 3]);
        let s = wreath_of_cyclics(&m);
        // R_{(2,1)}(0) has two vertices inducing C_2
        let ball = s.neighbourhood(0, 2);
        assert_eq!(ball.len(), 2);
        assert_eq!(s.induced(&ball).unwrap().classify(0, 1), 1);
        assert!(check_ball_structure(&m).unwrap().passed());
        assert!(check_ball_structure(&moduli(&[2, 2, 3])).unwrap().passed());
        let trivial = check_ball_structure(&moduli(&[2])).unwrap();
        assert!(trivial.passed());
        assert_eq!(trivial.tallies.get("lower-level").copied().unwrap_or(0), 2);
    }

    #[test]
    fn valency_formula_matches_counts() {
        for v in [vec![2, 3], vec![3, 2, 2], vec![2, 4]] {
            let m = moduli(&v);
            let s = wreath_of_cyclics(&m);
            for a in m.indices() {
                assert_eq!(s.valency(m.flat(a)).unwrap(), m.valency(a));
            }
        }
    }
}
