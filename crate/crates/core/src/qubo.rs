//! K-medoid QUBO assembly and energy evaluation.
//!
//! The selection of k exemplars out of n assets is encoded as an
//! unconstrained binary quadratic program over z in {0,1}^n:
//!
//! ```text
//! E(z) = z' (gamma 11' - (alpha/2) Delta) z + z' (beta Delta 1 - 2 gamma k 1)
//! ```
//!
//! The gamma terms expand to `gamma ((sum z - k)^2 - k^2)`, a soft
//! cardinality penalty minimized exactly on selections of size k; the alpha
//! term rewards spread-out exemplars and the beta term pulls them toward
//! central vertices. Default weights are `alpha = 1/k`, `beta = 1/n`,
//! `gamma = 2`.

use std::io::{BufRead, Write};

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Weights of the k-medoid objective, kept with the problem so the penalty
/// decomposition and feasibility checks can recover them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KmedoidParams {
    /// Weight of the exemplar-spread (quadratic) reward.
    pub alpha: f64,
    /// Weight of the centrality (linear) pull.
    pub beta: f64,
    /// Weight of the cardinality penalty.
    pub gamma: f64,
    /// Target number of exemplars.
    pub k: usize,
}

impl KmedoidParams {
    /// Default weights for an n-asset, k-exemplar instance:
    /// `alpha = 1/k`, `beta = 1/n`, `gamma = 2`.
    pub fn defaults(n: usize, k: usize) -> Self {
        Self {
            alpha: 1.0 / k as f64,
            beta: 1.0 / n as f64,
            gamma: 2.0,
            k,
        }
    }
}

/// A binary quadratic program `E(z) = z'Qz + c'z + offset`.
///
/// `Q` is stored symmetric. Problems built by [`build_kmedoid_qubo`] carry
/// their [`KmedoidParams`]; generic problems do not.
#[derive(Debug, Clone)]
pub struct QuboProblem {
    pub(crate) q: Array2<f64>,
    pub(crate) c: Array1<f64>,
    pub(crate) offset: f64,
    params: Option<KmedoidParams>,
}

impl QuboProblem {
    /// Build a generic problem from a symmetric quadratic matrix, linear
    /// vector and constant offset.
    pub fn new(q: Array2<f64>, c: Array1<f64>, offset: f64) -> Result<Self> {
        let n = q.nrows();
        if q.ncols() != n {
            return Err(Error::Dimension(format!(
                "quadratic matrix must be square, got {}x{}",
                q.nrows(),
                q.ncols()
            )));
        }
        if c.len() != n {
            return Err(Error::Dimension(format!(
                "linear vector has length {} but matrix is {n}x{n}",
                c.len()
            )));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if q[[i, j]] != q[[j, i]] {
                    return Err(Error::Validation(format!(
                        "quadratic matrix asymmetric at ({i}, {j}): {} vs {}",
                        q[[i, j]],
                        q[[j, i]]
                    )));
                }
            }
        }
        Ok(Self {
            q,
            c,
            offset,
            params: None,
        })
    }

    /// Number of binary variables.
    pub fn n(&self) -> usize {
        self.c.len()
    }

    /// Symmetric quadratic coefficient matrix.
    pub fn q(&self) -> &Array2<f64> {
        &self.q
    }

    /// Linear coefficient vector.
    pub fn c(&self) -> &Array1<f64> {
        &self.c
    }

    /// Constant added to every energy.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// K-medoid parameters, if the problem was built with them.
    pub fn params(&self) -> Option<&KmedoidParams> {
        self.params.as_ref()
    }

    fn check_state(&self, z: &[u8]) -> Result<()> {
        if z.len() != self.n() {
            return Err(Error::Dimension(format!(
                "state has length {}, problem has {} variables",
                z.len(),
                self.n()
            )));
        }
        if let Some(bad) = z.iter().find(|&&b| b > 1) {
            return Err(Error::Validation(format!(
                "state entries must be 0 or 1, found {bad}"
            )));
        }
        Ok(())
    }

    /// Exact energy `z'Qz + c'z + offset`.
    pub fn energy(&self, z: &[u8]) -> Result<f64> {
        self.check_state(z)?;
        Ok(self.energy_unchecked(z))
    }

    pub(crate) fn energy_unchecked(&self, z: &[u8]) -> f64 {
        let set: Vec<usize> = (0..z.len()).filter(|&i| z[i] == 1).collect();
        let mut e = self.offset;
        for &i in &set {
            e += self.c[i];
            for &j in &set {
                e += self.q[[i, j]];
            }
        }
        e
    }

    /// Energy change from flipping bit `i`:
    /// `E(z with bit i flipped) - E(z)`.
    ///
    /// For symmetric Q this is
    /// `(1 - 2 z_i) (Q_ii + c_i + 2 sum_{j != i} Q_ij z_j)`.
    pub fn delta_energy(&self, z: &[u8], i: usize) -> Result<f64> {
        self.check_state(z)?;
        if i >= self.n() {
            return Err(Error::Dimension(format!(
                "bit index {i} out of range for {} variables",
                self.n()
            )));
        }
        Ok(self.delta_energy_unchecked(z, i))
    }

    pub(crate) fn delta_energy_unchecked(&self, z: &[u8], i: usize) -> f64 {
        let row = self.q.row(i);
        let mut coupling = 0.0;
        for (j, &zj) in z.iter().enumerate() {
            if zj == 1 && j != i {
                coupling += row[j];
            }
        }
        let sign = 1.0 - 2.0 * z[i] as f64;
        sign * (self.q[[i, i]] + self.c[i] + 2.0 * coupling)
    }

    /// Split the energy into the cardinality penalty
    /// `gamma ((sum z - k)^2 - k^2)` and the remaining medoid objective.
    ///
    /// Only available on problems carrying [`KmedoidParams`].
    pub fn cardinality_penalty_decomposition(&self, z: &[u8]) -> Result<(f64, f64)> {
        let params = self.params.ok_or_else(|| {
            Error::UnsupportedProblem("penalty decomposition needs the k-medoid parameters".into())
        })?;
        self.check_state(z)?;
        let card = z.iter().filter(|&&b| b == 1).count() as f64;
        let k = params.k as f64;
        let penalty = params.gamma * ((card - k).powi(2) - k * k);
        let medoid_objective = self.energy_unchecked(z) - penalty;
        Ok((penalty, medoid_objective))
    }

    /// Write the problem in a plain-text sparse triplet format.
    ///
    /// One `i j value` line per nonzero upper-triangular coefficient.
    /// Diagonal lines carry `Q_ii + c_i` (for binary z, `z_i^2 = z_i`);
    /// off-diagonal lines carry `Q_ij + Q_ji`. The energy of a state is the
    /// sum of `value * z_i * z_j` over all lines, plus the offset.
    pub fn write_triplets<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# qubo n={} offset={}", self.n(), self.offset)?;
        writeln!(
            w,
            "# `i j value` upper-triangular terms; energy(z) = sum value*z_i*z_j + offset"
        )?;
        writeln!(
            w,
            "# diagonal lines (i == j) carry the quadratic diagonal plus the linear term"
        )?;
        for i in 0..self.n() {
            let diag = self.q[[i, i]] + self.c[i];
            if diag != 0.0 {
                writeln!(w, "{i} {i} {diag}")?;
            }
            for j in (i + 1)..self.n() {
                let v = 2.0 * self.q[[i, j]];
                if v != 0.0 {
                    writeln!(w, "{i} {j} {v}")?;
                }
            }
        }
        Ok(())
    }

    /// Read a problem written by [`QuboProblem::write_triplets`].
    ///
    /// The reconstruction stores diagonal coefficients in the linear vector,
    /// which leaves every binary energy unchanged. K-medoid parameters are
    /// not part of the format.
    pub fn read_triplets<R: BufRead>(r: R) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut offset = 0.0;
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            let lineno = lineno as u64 + 1;
            if line.starts_with('#') {
                for token in line.trim_start_matches('#').split_whitespace() {
                    if let Some(v) = token.strip_prefix("n=") {
                        n = Some(v.parse().map_err(|_| Error::MalformedInput {
                            line: lineno,
                            reason: format!("bad n in header: {token}"),
                        })?);
                    } else if let Some(v) = token.strip_prefix("offset=") {
                        offset = v.parse().map_err(|_| Error::MalformedInput {
                            line: lineno,
                            reason: format!("bad offset in header: {token}"),
                        })?;
                    }
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::MalformedInput {
                    line: lineno,
                    reason: format!("expected `i j value`, got `{line}`"),
                });
            }
            let parse = |s: &str| -> Result<usize> {
                s.parse().map_err(|_| Error::MalformedInput {
                    line: lineno,
                    reason: format!("bad index `{s}`"),
                })
            };
            let i = parse(fields[0])?;
            let j = parse(fields[1])?;
            let v: f64 = fields[2].parse().map_err(|_| Error::MalformedInput {
                line: lineno,
                reason: format!("bad value `{}`", fields[2]),
            })?;
            entries.push((i, j, v));
        }
        let n = n.ok_or_else(|| Error::MalformedInput {
            line: 1,
            reason: "missing `# qubo n=... offset=...` header".into(),
        })?;
        let mut q = Array2::zeros((n, n));
        let mut c = Array1::zeros(n);
        for (i, j, v) in entries {
            if i >= n || j >= n || j < i {
                return Err(Error::Validation(format!(
                    "triplet ({i}, {j}) outside upper triangle of a {n}-variable problem"
                )));
            }
            if i == j {
                c[i] += v;
            } else {
                q[[i, j]] += v / 2.0;
                q[[j, i]] += v / 2.0;
            }
        }
        QuboProblem::new(q, c, offset)
    }
}

/// Assemble the k-medoid QUBO from a decayed distance matrix with the
/// default weights `alpha = 1/k`, `beta = 1/n`, `gamma = 2`.
pub fn build_kmedoid_qubo(delta: &Array2<f64>, k: usize) -> Result<QuboProblem> {
    let n = delta.nrows();
    if n == 0 {
        return Err(Error::Dimension("empty dissimilarity matrix".into()));
    }
    let p = KmedoidParams::defaults(n, k);
    build_kmedoid_qubo_with(delta, k, p.alpha, p.beta, p.gamma)
}

/// Assemble the k-medoid QUBO with explicit weights.
///
/// `Q = gamma 11' - (alpha/2) Delta` and `c = beta Delta 1 - 2 gamma k 1`,
/// with zero offset.
pub fn build_kmedoid_qubo_with(
    delta: &Array2<f64>,
    k: usize,
    alpha: f64,
    beta: f64,
    gamma: f64,
) -> Result<QuboProblem> {
    let n = delta.nrows();
    if delta.ncols() != n {
        return Err(Error::Dimension(format!(
            "dissimilarity matrix must be square, got {}x{}",
            delta.nrows(),
            delta.ncols()
        )));
    }
    if k < 1 || k > n {
        return Err(Error::Parameter(format!("k must be in 1..={n}, got {k}")));
    }
    if gamma <= 0.0 {
        return Err(Error::Parameter(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if delta[[i, j]] != delta[[j, i]] {
                return Err(Error::Validation(format!(
                    "dissimilarity matrix asymmetric at ({i}, {j}): {} vs {}",
                    delta[[i, j]],
                    delta[[j, i]]
                )));
            }
        }
    }

    let mut q = Array2::zeros((n, n));
    let mut c = Array1::zeros(n);
    for i in 0..n {
        let mut row_sum = 0.0;
        for j in 0..n {
            q[[i, j]] = gamma - 0.5 * alpha * delta[[i, j]];
            row_sum += delta[[i, j]];
        }
        c[i] = beta * row_sum - 2.0 * gamma * k as f64;
    }
    Ok(QuboProblem {
        q,
        c,
        offset: 0.0,
        params: Some(KmedoidParams {
            alpha,
            beta,
            gamma,
            k,
        }),
    })
}

/// A binary selection over the problem's variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    z: Vec<u8>,
    exemplars: Vec<usize>,
}

impl Selection {
    /// Wrap a 0/1 vector, deriving the sorted exemplar index list.
    pub fn from_z(z: Vec<u8>) -> Result<Self> {
        if let Some(bad) = z.iter().find(|&&b| b > 1) {
            return Err(Error::Validation(format!(
                "selection entries must be 0 or 1, found {bad}"
            )));
        }
        let exemplars = (0..z.len()).filter(|&i| z[i] == 1).collect();
        Ok(Self { z, exemplars })
    }

    /// Build a selection of length `n` with the given indices set.
    pub fn from_exemplars(n: usize, exemplars: &[usize]) -> Result<Self> {
        let mut z = vec![0u8; n];
        for &i in exemplars {
            if i >= n {
                return Err(Error::Dimension(format!(
                    "exemplar index {i} out of range for {n} variables"
                )));
            }
            z[i] = 1;
        }
        Selection::from_z(z)
    }

    /// The raw 0/1 vector.
    pub fn z(&self) -> &[u8] {
        &self.z
    }

    /// Sorted indices of the set bits.
    pub fn exemplars(&self) -> &[usize] {
        &self.exemplars
    }

    /// Number of set bits.
    pub fn cardinality(&self) -> usize {
        self.exemplars.len()
    }
}
