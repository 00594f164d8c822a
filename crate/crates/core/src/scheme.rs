//! Finite association schemes given by a dense class table.

use std::fmt::Write as _;
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// A finite association scheme: `classify(x, y)` names the relation holding
/// between vertices `x` and `y`.
///
/// Construction only checks the table shape. Whether the table really is an
/// association scheme is decided by [`Scheme::verify_axioms`].
#[derive(Clone, Debug)]
pub struct Scheme {
    order: usize,
    num_classes: usize,
    table: Vec<u32>,
    intersections: OnceLock<Result<Arc<IntersectionTable>>>,
}

impl PartialEq for Scheme {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.num_classes == other.num_classes && self.table == other.table
    }
}

impl Eq for Scheme {}

/// Outcome of one axiom, with the first counterexample found.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub holds: bool,
    pub counterexample: Option<String>,
}

impl AxiomCheck {
    fn pass() -> Self {
        AxiomCheck { holds: true, counterexample: None }
    }

    fn fail(why: String) -> Self {
        AxiomCheck { holds: false, counterexample: Some(why) }
    }
}

/// Verdicts for the four association-scheme axioms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    /// `A_0 = I`.
    pub identity: AxiomCheck,
    /// The relations are nonempty and partition `X × X`.
    pub partition: AxiomCheck,
    /// Every `A_i^t` is some `A_{i'}`.
    pub transpose: AxiomCheck,
    /// `A_i A_j` is a nonnegative integer combination of the `A_h`.
    pub regularity: AxiomCheck,
}

impl AxiomReport {
    pub fn all_hold(&self) -> bool {
        self.identity.holds && self.partition.holds && self.transpose.holds && self.regularity.holds
    }

    pub fn first_failure(&self) -> Option<String> {
        [
            ("identity", &self.identity),
            ("partition", &self.partition),
            ("transpose", &self.transpose),
            ("regularity", &self.regularity),
        ]
        .into_iter()
        .find(|(_, c)| !c.holds)
        .map(|(name, c)| format!("{name}: {}", c.counterexample.clone().unwrap_or_default()))
    }
}

/// Intersection numbers `p_{ij}^h`, valencies and the transpose pairing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionTable {
    classes: usize,
    numbers: Vec<u64>,
    valencies: Vec<u64>,
    transposes: Vec<usize>,
}

impl IntersectionTable {
    pub fn classes(&self) -> usize {
        self.classes
    }

    /// `p_{ij}^h`.
    pub fn get(&self, i: usize, j: usize, h: usize) -> u64 {
        self.numbers[(h * self.classes + i) * self.classes + j]
    }

    pub fn valency(&self, i: usize) -> u64 {
        self.valencies[i]
    }

    pub fn valencies(&self) -> &[u64] {
        &self.valencies
    }

    /// The class `i'` with `A_i^t = A_{i'}`.
    pub fn transpose(&self, i: usize) -> usize {
        self.transposes[i]
    }
}

impl Scheme {
    /// Wraps a row-major `order x order` class table.
    pub fn from_table(order: usize, num_classes: usize, table: Vec<u32>) -> Result<Self> {
        if order == 0 {
            return Err(Error::Domain("a scheme needs at least one vertex".into()));
        }
        if num_classes == 0 {
            return Err(Error::Domain("a scheme needs at least one class".into()));
        }
        if table.len() != order * order {
            return Err(Error::Dimension(format!("class table of length {} for order {order}", table.len())));
        }
        Ok(Scheme { order, num_classes, table, intersections: OnceLock::new() })
    }

    pub fn from_fn(order: usize, num_classes: usize, mut f: impl FnMut(usize, usize) -> usize) -> Result<Self> {
        let mut table = Vec::with_capacity(order * order);
        for x in 0..order {
            for y in 0..order {
                table.push(u32::try_from(f(x, y)).map_err(|_| Error::Domain("class index too large".into()))?);
            }
        }
        Self::from_table(order, num_classes, table)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of relations `d + 1`.
    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    #[inline]
    pub fn classify(&self, x: usize, y: usize) -> usize {
        self.table[x * self.order + y] as usize
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    /// `R_i(x)`, in increasing vertex order.
    pub fn neighbourhood(&self, x: usize, i: usize) -> Vec<usize> {
        (0..self.order).filter(|&y| self.classify(x, y) == i).collect()
    }

    fn check_class(&self, i: usize) -> Result<()> {
        if i >= self.num_classes {
            return Err(Error::OutOfRange(format!("class {i} of {}", self.num_classes)));
        }
        Ok(())
    }

    fn check_vertex(&self, x: usize) -> Result<()> {
        if x >= self.order {
            return Err(Error::OutOfRange(format!("vertex {x} of {}", self.order)));
        }
        Ok(())
    }

    /// The same classification with vertices renamed: vertex `v` of the
    /// result is vertex `perm[v]` of `self`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.order];
        if perm.len() != self.order || perm.iter().any(|&p| p >= self.order || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::Domain("relabelling is not a permutation".into()));
        }
        Self::from_fn(self.order, self.num_classes, |x, y| self.classify(perm[x], perm[y]))
    }

    /// The classification restricted to `vertices`, listed in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Result<Self> {
        for &v in vertices {
            self.check_vertex(v)?;
        }
        Self::from_fn(vertices.len(), self.num_classes, |a, b| self.classify(vertices[a], vertices[b]))
    }

    /// Exhaustive check of the four axioms.
    pub fn verify_axioms(&self) -> AxiomReport {
        let n = self.order;
        let k = self.num_classes;

        let identity = (|| {
            for x in 0..n {
                for y in 0..n {
                    let c = self.classify(x, y);
                    if x == y && c != 0 {
                        return AxiomCheck::fail(format!("classify({x},{x}) = {c}"));
                    }
                    if x != y && c == 0 {
                        return AxiomCheck::fail(format!("classify({x},{y}) = 0 off the diagonal"));
                    }
                }
            }
            AxiomCheck::pass()
        })();

        let partition = (|| {
            if let Some(pos) = self.table.iter().position(|&c| c as usize >= k) {
                return AxiomCheck::fail(format!(
                    "classify({},{}) = {} is not one of the {k} classes",
                    pos / n,
                    pos % n,
                    self.table[pos]
                ));
            }
            let mut used = vec![false; k];
            for &c in &self.table {
                used[c as usize] = true;
            }
            match used.iter().position(|u| !u) {
                Some(i) => AxiomCheck::fail(format!("relation R_{i} is empty")),
                None => AxiomCheck::pass(),
            }
        })();

        if !partition.holds {
            let skipped = AxiomCheck::fail("not evaluated: the class table is not a partition".into());
            return AxiomReport { identity, partition, transpose: skipped.clone(), regularity: skipped };
        }

        let transpose = match self.transpose_map() {
            Ok(_) => AxiomCheck::pass(),
            Err(e) => AxiomCheck::fail(e.to_string()),
        };

        let regularity = match self.compute_intersections() {
            Ok(_) => AxiomCheck::pass(),
            Err(e) => AxiomCheck::fail(e.to_string()),
        };

        AxiomReport { identity, partition, transpose, regularity }
    }

    fn transpose_map(&self) -> Result<Vec<usize>> {
        let n = self.order;
        let mut map: Vec<Option<usize>> = vec![None; self.num_classes];
        for x in 0..n {
            for y in 0..n {
                let i = self.classify(x, y);
                let t = self.classify(y, x);
                match map[i] {
                    None => map[i] = Some(t),
                    Some(prev) if prev != t => {
                        return Err(Error::AxiomViolation(format!(
                            "transpose of R_{i} meets both R_{prev} and R_{t} (pair ({y},{x}))"
                        )))
                    }
                    _ => {}
                }
            }
        }
        map.into_iter()
            .enumerate()
            .map(|(i, t)| t.ok_or_else(|| Error::AxiomViolation(format!("relation R_{i} is empty"))))
            .collect()
    }

    fn compute_intersections(&self) -> Result<Arc<IntersectionTable>> {
        let n = self.order;
        let k = self.num_classes;
        let transposes = self.transpose_map()?;
        let mut numbers: Vec<Option<Vec<u64>>> = vec![None; k];
        let mut witness: Vec<(usize, usize)> = vec![(0, 0); k];
        let mut counts = vec![0u64; k * k];
        for x in 0..n {
            for y in 0..n {
                counts.iter_mut().for_each(|c| *c = 0);
                for z in 0..n {
                    counts[self.classify(x, z) * k + self.classify(z, y)] += 1;
                }
                let h = self.classify(x, y);
                match &numbers[h] {
                    None => {
                        numbers[h] = Some(counts.clone());
                        witness[h] = (x, y);
                    }
                    Some(reference) if *reference != counts => {
                        let pos = reference.iter().zip(&counts).position(|(a, b)| a != b).expect("differs");
                        let (wx, wy) = witness[h];
                        return Err(Error::AxiomViolation(format!(
                            "p_{{{},{}}}^{h} is {} at ({wx},{wy}) but {} at ({x},{y})",
                            pos / k,
                            pos % k,
                            reference[pos],
                            counts[pos]
                        )));
                    }
                    _ => {}
                }
            }
        }
        let mut flat = Vec::with_capacity(k * k * k);
        for (h, entry) in numbers.into_iter().enumerate() {
            flat.extend(entry.ok_or_else(|| Error::AxiomViolation(format!("relation R_{h} is empty")))?);
        }
        let valencies = (0..k).map(|i| flat[i * k + transposes[i]]).collect();
        Ok(Arc::new(IntersectionTable { classes: k, numbers: flat, valencies, transposes }))
    }

    /// All intersection numbers; fails if the table is not an association
    /// scheme.
    pub fn intersection_numbers(&self) -> Result<Arc<IntersectionTable>> {
        self.intersections
            .get_or_init(|| {
                if let Some(pos) = self.table.iter().position(|&c| c as usize >= self.num_classes) {
                    return Err(Error::AxiomViolation(format!("entry {pos} outside the class range")));
                }
                self.compute_intersections()
            })
            .clone()
    }

    /// `p_{ij}^h`, checked to be independent of the pair in `R_h` used to
    /// count it.
    pub fn intersection_number(&self, i: usize, j: usize, h: usize) -> Result<u64> {
        self.check_class(i)?;
        self.check_class(j)?;
        self.check_class(h)?;
        Ok(self.intersection_numbers()?.get(i, j, h))
    }

    /// `n_i = |R_i(x)|`, checked to be the same for every `x`.
    pub fn valency(&self, i: usize) -> Result<u64> {
        self.check_class(i)?;
        let mut value = None;
        for x in 0..self.order {
            let c = (0..self.order).filter(|&y| self.classify(x, y) == i).count() as u64;
            match value {
                None => value = Some(c),
                Some(v) if v != c => {
                    return Err(Error::AxiomViolation(format!(
                        "|R_{i}(x)| is {v} at vertex 0 but {c} at vertex {x}"
                    )))
                }
                _ => {}
            }
        }
        Ok(value.unwrap_or(0))
    }

    pub fn valencies(&self) -> Result<Vec<u64>> {
        (0..self.num_classes).map(|i| self.valency(i)).collect()
    }

    /// Whether `A_i A_j = A_j A_i` for all classes. The `(x, y)` entry of
    /// `A_i A_j` is the number of `z` with `(x,z) ∈ R_i` and `(z,y) ∈ R_j`, so the
    /// products are compared entry by entry as exact integers.
    pub fn is_commutative(&self) -> bool {
        let n = self.order;
        let k = self.num_classes;
        let mut counts = vec![0u64; k * k];
        for x in 0..n {
            for y in 0..n {
                counts.iter_mut().for_each(|c| *c = 0);
                for z in 0..n {
                    let (a, b) = (self.classify(x, z), self.classify(z, y));
                    if a < k && b < k {
                        counts[a * k + b] += 1;
                    }
                }
                for i in 0..k {
                    for j in (i + 1)..k {
                        if counts[i * k + j] != counts[j * k + i] {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// The 0/1 adjacency matrix `A_i`.
    pub fn adjacency_matrix<S: Scalar>(&self, i: usize) -> Result<Matrix<S>> {
        self.check_class(i)?;
        Ok(Matrix::from_fn(self.order, self.order, |x, y| {
            if self.classify(x, y) == i {
                S::one()
            } else {
                S::zero()
            }
        }))
    }

    pub fn adjacency_matrices<S: Scalar>(&self) -> Vec<Matrix<S>> {
        (0..self.num_classes)
            .map(|i| self.adjacency_matrix(i).expect("class in range"))
            .collect()
    }

    /// Parses the text ingestion format: a header line `order d` followed by
    /// `order * order` whitespace-separated class indices.
    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = text
            .lines()
            .enumerate()
            .flat_map(|(ln, line)| line.split_whitespace().map(move |t| (ln + 1, t)));
        let mut next_number = |what: &str| -> Result<(usize, usize)> {
            let (line, tok) = tokens.next().ok_or(Error::Parse {
                line: text.lines().count().max(1),
                message: format!("unexpected end of input while reading {what}"),
            })?;
            let v = tok.parse::<usize>().map_err(|_| Error::Parse {
                line,
                message: format!("expected a nonnegative integer for {what}, found `{tok}`"),
            })?;
            Ok((line, v))
        };
        let (_, order) = next_number("the order")?;
        let (line, d) = next_number("the class count")?;
        if order == 0 {
            return Err(Error::Parse { line, message: "order must be positive".into() });
        }
        let mut table = Vec::with_capacity(order * order);
        for idx in 0..order * order {
            let (line, v) = next_number(&format!("entry ({}, {})", idx / order, idx % order))?;
            let v = u32::try_from(v).map_err(|_| Error::Parse { line, message: "class index too large".into() })?;
            table.push(v);
        }
        if let Some((line, tok)) = tokens.next() {
            return Err(Error::Parse { line, message: format!("trailing token `{tok}` after the class table") });
        }
        Self::from_table(order, d + 1, table)
    }

    /// Renders the ingestion format accepted by [`Scheme::parse`].
    pub fn to_table_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.order, self.num_classes - 1);
        for x in 0..self.order {
            let row: Vec<String> = (0..self.order).map(|y| self.classify(x, y).to_string()).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }
}
