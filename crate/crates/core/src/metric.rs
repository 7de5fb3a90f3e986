//! Finite metric spaces, self-maps, axiom validation and shortest-path repair.

use std::fmt;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `N` labeled points with a distance matrix that satisfies the metric
/// axioms. Instances can only be obtained through validating constructors.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace<S> {
    labels: Vec<String>,
    dist: Vec<Vec<S>>,
}

impl<S: Scalar> FiniteMetricSpace<S> {
    /// Validates `dist` and wraps it. Fails on the first violated axiom.
    pub fn new(labels: Vec<String>, dist: Vec<Vec<S>>) -> Result<Self> {
        let report = validate_metric(&dist)?;
        if let Some(v) = report.violations.first() {
            return Err(Error::InvalidMetric(v.describe(&labels)));
        }
        if labels.len() != dist.len() {
            return Err(Error::LabelCount {
                labels: labels.len(),
                points: dist.len(),
            });
        }
        Ok(Self { labels, dist })
    }

    /// Same as [`FiniteMetricSpace::new`] with labels `p0, p1, ...`.
    pub fn from_matrix(dist: Vec<Vec<S>>) -> Result<Self> {
        let labels = default_labels(dist.len());
        Self::new(labels, dist)
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> &S {
        &self.dist[i][j]
    }

    pub fn matrix(&self) -> &[Vec<S>] {
        &self.dist
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index,
                points: self.len(),
            })
        }
    }

    /// Converts every distance with `f`. The result is not re-validated, so
    /// this is meant for moving an exact space into a float view.
    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> FiniteMetricSpace<T> {
        FiniteMetricSpace {
            labels: self.labels.clone(),
            dist: self
                .dist
                .iter()
                .map(|row| row.iter().map(&f).collect())
                .collect(),
        }
    }
}

pub(crate) fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}

/// A total function `T: {0..N} -> {0..N}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SelfMap {
    image: Vec<usize>,
}

impl SelfMap {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let points = image.len();
        if let Some((index, &value)) = image.iter().enumerate().find(|(_, &v)| v >= points) {
            return Err(Error::MapOutOfRange {
                index,
                value,
                points,
            });
        }
        Ok(Self { image })
    }

    /// Checks that the map is defined on exactly the points of `space`.
    pub fn for_space<S: Scalar>(image: Vec<usize>, space: &FiniteMetricSpace<S>) -> Result<Self> {
        if image.len() != space.len() {
            return Err(Error::MapLength {
                map_len: image.len(),
                points: space.len(),
            });
        }
        Self::new(image)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            image: (0..n).collect(),
        }
    }

    pub fn constant(n: usize, value: usize) -> Result<Self> {
        Self::new(vec![value; n])
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.image[x]
    }

    /// `T^k(x)`.
    pub fn iterate(&self, mut x: usize, k: usize) -> usize {
        for _ in 0..k {
            x = self.image[x];
        }
        x
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axiom {
    ZeroDiagonal,
    Symmetry,
    Positivity,
    Triangle,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::ZeroDiagonal => "zero-diagonal",
            Axiom::Symmetry => "symmetry",
            Axiom::Positivity => "positivity",
            Axiom::Triangle => "triangle",
        })
    }
}

/// One violated axiom instance.
///
/// Index and value layout per axiom:
/// - zero diagonal: `[i]`, `[d(i,i)]`
/// - symmetry: `[i, j]`, `[d(i,j), d(j,i)]`
/// - positivity: `[i, j]`, `[d(i,j)]`
/// - triangle: `[i, j, k]`, `[d(i,j), d(i,k), d(k,j)]` with `d(i,j) > d(i,k) + d(k,j)`
#[derive(Debug, Clone, PartialEq)]
pub struct Violation<S> {
    pub axiom: Axiom,
    pub indices: Vec<usize>,
    pub values: Vec<S>,
}

impl<S: Scalar> Violation<S> {
    pub fn describe(&self, labels: &[String]) -> String {
        let name = |i: usize| labels.get(i).cloned().unwrap_or_else(|| i.to_string());
        let v = &self.values;
        match self.axiom {
            Axiom::ZeroDiagonal => format!("d({0},{0}) = {1} is not zero", name(self.indices[0]), v[0]),
            Axiom::Symmetry => format!(
                "d({0},{1}) = {2} but d({1},{0}) = {3}",
                name(self.indices[0]),
                name(self.indices[1]),
                v[0],
                v[1]
            ),
            Axiom::Positivity => format!(
                "d({},{}) = {} is not positive",
                name(self.indices[0]),
                name(self.indices[1]),
                v[0]
            ),
            Axiom::Triangle => format!(
                "triangle ({a},{b}) via {c}: {} > {} + {}",
                v[0],
                v[1],
                v[2],
                a = name(self.indices[0]),
                b = name(self.indices[1]),
                c = name(self.indices[2]),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport<S> {
    pub violations: Vec<Violation<S>>,
}

impl<S> ValidationReport<S> {
    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_square<S>(dist: &[Vec<S>]) -> Result<usize> {
    let n = dist.len();
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    for (row, r) in dist.iter().enumerate() {
        if r.len() != n {
            return Err(Error::NotSquare {
                row,
                len: r.len(),
                expected: n,
            });
        }
    }
    Ok(n)
}

/// Reports every violated axiom instance, over all ordered pairs and triples.
pub fn validate_metric<S: Scalar>(dist: &[Vec<S>]) -> Result<ValidationReport<S>> {
    let n = check_square(dist)?;
    let zero = S::zero();
    let mut violations = Vec::new();

    for (i, row) in dist.iter().enumerate() {
        if row[i] != zero {
            violations.push(Violation {
                axiom: Axiom::ZeroDiagonal,
                indices: vec![i],
                values: vec![row[i].clone()],
            });
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if dist[i][j] != dist[j][i] {
                violations.push(Violation {
                    axiom: Axiom::Symmetry,
                    indices: vec![i, j],
                    values: vec![dist[i][j].clone(), dist[j][i].clone()],
                });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && !(dist[i][j] > zero) {
                violations.push(Violation {
                    axiom: Axiom::Positivity,
                    indices: vec![i, j],
                    values: vec![dist[i][j].clone()],
                });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let via = dist[i][k].clone() + dist[k][j].clone();
                if dist[i][j] > via {
                    violations.push(Violation {
                        axiom: Axiom::Triangle,
                        indices: vec![i, j, k],
                        values: vec![dist[i][j].clone(), dist[i][k].clone(), dist[k][j].clone()],
                    });
                }
            }
        }
    }
    Ok(ValidationReport { violations })
}

/// All-pairs shortest-path closure (Floyd–Warshall) of a symmetric matrix
/// with zero diagonal and strictly positive off-diagonal entries.
///
/// The result is a metric, entrywise no larger than the input, and a fixpoint
/// of the closure.
pub fn metric_closure<S: Scalar>(labels: Vec<String>, dist: &[Vec<S>]) -> Result<FiniteMetricSpace<S>> {
    let n = check_square(dist)?;
    let zero = S::zero();
    for i in 0..n {
        if dist[i][i] != zero {
            return Err(Error::NotRepairable(format!(
                "dist[{i}][{i}] = {} is not zero",
                dist[i][i]
            )));
        }
        for j in 0..n {
            if i == j {
                continue;
            }
            if dist[i][j] == zero {
                return Err(Error::ZeroOffDiagonal { i, j });
            }
            if !(dist[i][j] > zero) {
                return Err(Error::NotRepairable(format!(
                    "dist[{i}][{j}] = {} is negative",
                    dist[i][j]
                )));
            }
            if dist[i][j] != dist[j][i] {
                return Err(Error::NotRepairable(format!(
                    "dist[{i}][{j}] = {} differs from dist[{j}][{i}] = {}",
                    dist[i][j], dist[j][i]
                )));
            }
        }
    }

    let mut closed = dist.to_vec();
    for k in 0..n {
        for i in 0..n {
            if i == k {
                continue;
            }
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                let via = closed[i][k].clone() + closed[k][j].clone();
                if via < closed[i][j] {
                    closed[i][j] = via;
                }
            }
        }
    }
    FiniteMetricSpace::new(labels, closed)
}

/// Seeded random space plus a uniformly random self-map.
///
/// Off-diagonal entries are drawn from `1..=scale` (upper triangle, row-major),
/// mirrored, and repaired with [`metric_closure`]; then `n_points` map images
/// are drawn uniformly. The same seed always yields the same output.
pub fn random_space<S: Scalar>(
    seed: u64,
    n_points: usize,
    scale: u64,
) -> Result<(FiniteMetricSpace<S>, SelfMap)> {
    if n_points < 2 {
        return Err(Error::Domain(format!(
            "random_space needs at least 2 points, got {n_points}"
        )));
    }
    if scale < 1 {
        return Err(Error::Domain("random_space needs scale >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw = vec![vec![0u64; n_points]; n_points];
    for i in 0..n_points {
        for j in i + 1..n_points {
            let v = rng.random_range(1..=scale);
            raw[i][j] = v;
            raw[j][i] = v;
        }
    }
    let dist: Vec<Vec<S>> = raw
        .iter()
        .map(|row| row.iter().map(|&v| from_u64::<S>(v)).collect())
        .collect();
    let space = metric_closure(default_labels(n_points), &dist)?;
    let points: Vec<usize> = (0..n_points).collect();
    let image = (0..n_points)
        .map(|_| *points.choose(&mut rng).expect("n_points >= 2"))
        .collect();
    Ok((space, SelfMap::new(image)?))
}

pub(crate) fn from_u64<S: Scalar>(v: u64) -> S {
    S::from_u64(v).expect("scalar type represents small integers")
}
