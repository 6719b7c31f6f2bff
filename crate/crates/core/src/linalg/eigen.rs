use ndarray::{Array1, Array2, Axis};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::SymmetricMatrix;

/// Sweep cap for cyclic Jacobi.
pub const MAX_SWEEPS: usize = 100;
/// Convergence when the off-diagonal Frobenius norm drops below this
/// fraction of the input's Frobenius norm.
pub const RELATIVE_TOLERANCE: f64 = 1e-12;

/// Eigenpairs of a symmetric matrix, eigenvalues ascending.
///
/// Column `j` of `eigenvectors` pairs with `eigenvalues[j]`. Each column is
/// signed so that its entry of largest magnitude (lowest index on ties) is
/// nonnegative.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    eigenvalues: Array1<f64>,
    eigenvectors: Array2<f64>,
    sweeps: usize,
}

impl EigenDecomposition {
    pub fn eigenvalues(&self) -> &Array1<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &Array2<f64> {
        &self.eigenvectors
    }

    pub fn order(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Jacobi sweeps performed.
    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// `V · diag(f(λ)) · Vᵀ`, symmetrized.
    pub fn spectral_map(&self, f: impl Fn(f64) -> f64) -> SymmetricMatrix {
        let scale = self.eigenvalues.mapv(f);
        let scaled = &self.eigenvectors * &scale.view().insert_axis(Axis(0));
        let m = scaled.dot(&self.eigenvectors.t());
        SymmetricMatrix::from_fn(self.order(), |i, j| {
            if i == j {
                m[[i, i]]
            } else {
                0.5 * (m[[i, j]] + m[[j, i]])
            }
        })
    }

    /// `V · diag(λ) · Vᵀ`.
    pub fn reconstruct(&self) -> SymmetricMatrix {
        self.spectral_map(|l| l)
    }
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Rotations follow the round-robin (tournament) ordering: each sweep is
/// `n - 1` rounds of `n / 2` disjoint pairs, applied together as one pass
/// over the rows and one over the columns.
pub fn eigendecompose_symmetric(m: &SymmetricMatrix) -> Result<EigenDecomposition> {
    let n = m.order();
    if n == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    if m.as_array().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }

    // Row-major working copy; `vt` accumulates the rotations with
    // eigenvectors as rows.
    let mut a: Vec<f64> = m.as_array().iter().copied().collect();
    let mut vt = vec![0.0; n * n];
    for i in 0..n {
        vt[i * n + i] = 1.0;
    }

    let frobenius = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = RELATIVE_TOLERANCE * frobenius;
    let schedule = round_robin(n);
    let mut rotations: Vec<Rotation> = Vec::with_capacity(n / 2);
    let mut sweeps = 0;

    loop {
        let off = off_diagonal_norm(&a, n);
        if off <= target {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                residual: off,
            });
        }
        // Early sweeps only rotate the larger elements.
        let skip_below = if sweeps < 3 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };
        for round in &schedule {
            rotations.clear();
            for &(p, q) in round {
                let apq = 0.5 * (a[p * n + q] + a[q * n + p]);
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (a[p * n + p], a[q * n + q]);
                let g = 100.0 * apq.abs();
                if sweeps >= 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                if apq.abs() < skip_below {
                    continue;
                }
                rotations.push(Rotation::annihilating(p, q, app, aqq, apq));
            }
            if !rotations.is_empty() {
                apply_round(&mut a, &mut vt, n, &rotations);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]).then(i.cmp(&j)));

    let eigenvalues = Array1::from_iter(order.iter().map(|&i| a[i * n + i]));
    let mut eigenvectors = Array2::zeros((n, n));
    for (col, &src) in order.iter().enumerate() {
        let row = &vt[src * n..(src + 1) * n];
        let mut lead = 0;
        for (r, x) in row.iter().enumerate() {
            if x.abs() > row[lead].abs() {
                lead = r;
            }
        }
        let sign = if row[lead] < 0.0 { -1.0 } else { 1.0 };
        for (r, x) in row.iter().enumerate() {
            eigenvectors[[r, col]] = sign * x;
        }
    }

    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
        sweeps,
    })
}

/// Pairs for each round of a round-robin tournament over `n` players.
fn round_robin(n: usize) -> Vec<Vec<(usize, usize)>> {
    let m = n + n % 2;
    let mut players: Vec<usize> = (0..m).collect();
    let mut rounds = Vec::with_capacity(m.saturating_sub(1));
    for _ in 1..m {
        let round = (0..m / 2)
            .map(|i| (players[i], players[m - 1 - i]))
            .filter(|&(p, q)| p < n && q < n)
            .map(|(p, q)| (p.min(q), p.max(q)))
            .collect();
        rounds.push(round);
        // Circle method: keep the first player fixed, rotate the rest.
        players[1..].rotate_right(1);
    }
    rounds
}

#[derive(Clone, Copy, Debug)]
struct Rotation {
    p: usize,
    q: usize,
    c: f64,
    s: f64,
    /// Rotated diagonal entries.
    app: f64,
    aqq: f64,
}

impl Rotation {
    fn annihilating(p: usize, q: usize, app: f64, aqq: f64, apq: f64) -> Self {
        let theta = (aqq - app) / (2.0 * apq);
        let t = if theta.abs() > 1e150 {
            0.5 / theta
        } else {
            theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
        };
        let c = 1.0 / (t * t + 1.0).sqrt();
        Rotation {
            p,
            q,
            c,
            s: t * c,
            app: app - t * apq,
            aqq: aqq + t * apq,
        }
    }
}

/// `A ← JᵀAJ`, `Vᵀ ← JᵀVᵀ` for a set of disjoint rotations `J`.
fn apply_round(a: &mut [f64], vt: &mut [f64], n: usize, rotations: &[Rotation]) {
    rotate_rows(a, n, rotations);
    rotate_rows(vt, n, rotations);
    for row in a.chunks_exact_mut(n) {
        for r in rotations {
            let (g, h) = (row[r.p], row[r.q]);
            row[r.p] = r.c * g - r.s * h;
            row[r.q] = r.s * g + r.c * h;
        }
    }
    for r in rotations {
        a[r.p * n + r.p] = r.app;
        a[r.q * n + r.q] = r.aqq;
        a[r.p * n + r.q] = 0.0;
        a[r.q * n + r.p] = 0.0;
    }
}

/// `(row_p, row_q) ← (c·row_p − s·row_q, s·row_p + c·row_q)`.
fn rotate_rows(m: &mut [f64], n: usize, rotations: &[Rotation]) {
    for r in rotations {
        let (head, tail) = m.split_at_mut(r.q * n);
        let row_p = &mut head[r.p * n..(r.p + 1) * n];
        let row_q = &mut tail[..n];
        for (x, y) in row_p.iter_mut().zip(row_q.iter_mut()) {
            let (g, h) = (*x, *y);
            *x = r.c * g - r.s * h;
            *y = r.s * g + r.c * h;
        }
    }
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[i * n + j] * a[i * n + j];
            }
        }
    }
    sum.sqrt()
}

/// The `count` largest eigenpairs of a positive semi-definite matrix by
/// block subspace iteration with Rayleigh-Ritz extraction.
///
/// Deterministic: the starting block comes from a fixed-seed stream. Stops
/// when the wanted Ritz values move by less than `1e-12` relative, or after
/// `max_iterations`. Returns eigenvalues descending and the matching
/// eigenvectors as columns, signed like [`EigenDecomposition`].
pub fn dominant_eigenpairs(
    m: &SymmetricMatrix,
    count: usize,
    max_iterations: usize,
) -> Result<(Vec<f64>, Array2<f64>)> {
    let n = m.order();
    if count == 0 || count > n {
        return Err(Error::InvalidArgument(format!(
            "requested {count} eigenpairs of a matrix of order {n}"
        )));
    }
    if m.as_array().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let block = (count + 2).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut q = Array2::from_shape_simple_fn((n, block), || rng.random_range(-1.0..1.0));
    orthonormalize_columns(&mut q);

    let mat = m.as_array();
    let mut previous: Option<Vec<f64>> = None;
    for _ in 0..max_iterations {
        let z = mat.dot(&q);
        let ritz = SymmetricMatrix::symmetrized(&q.t().dot(&z))?;
        let mut theta = eigendecompose_symmetric(&ritz)?.eigenvalues().to_vec();
        theta.reverse();
        theta.truncate(count);
        let scale = theta[0].abs().max(f64::MIN_POSITIVE);
        let settled = previous.as_ref().is_some_and(|prev| {
            prev.iter().zip(&theta).all(|(a, b)| (a - b).abs() <= 1e-12 * scale)
        });
        previous = Some(theta);
        q = z;
        orthonormalize_columns(&mut q);
        if settled {
            break;
        }
    }

    let ritz = SymmetricMatrix::symmetrized(&q.t().dot(&mat.dot(&q)))?;
    let small = eigendecompose_symmetric(&ritz)?;
    let mut values = Vec::with_capacity(count);
    let mut vectors = Array2::zeros((n, count));
    for k in 0..count {
        let col = block - 1 - k;
        values.push(small.eigenvalues()[col]);
        let mut v = q.dot(&small.eigenvectors().column(col));
        let mut lead = 0;
        for (i, x) in v.iter().enumerate() {
            if x.abs() > v[lead].abs() {
                lead = i;
            }
        }
        if v[lead] < 0.0 {
            v.mapv_inplace(|x| -x);
        }
        vectors.column_mut(k).assign(&v);
    }
    Ok((values, vectors))
}

/// Modified Gram-Schmidt; columns that vanish are replaced by the first
/// coordinate axis that survives orthogonalization.
fn orthonormalize_columns(q: &mut Array2<f64>) {
    let (n, b) = q.dim();
    let mut fallback = 0;
    for j in 0..b {
        loop {
            for k in 0..j {
                let proj = q.column(k).dot(&q.column(j));
                let basis = q.column(k).to_owned();
                q.column_mut(j).scaled_add(-proj, &basis);
            }
            let norm = q.column(j).dot(&q.column(j)).sqrt();
            if norm > 1e-10 || fallback >= n {
                if norm > 0.0 {
                    q.column_mut(j).mapv_inplace(|x| x / norm);
                }
                break;
            }
            q.column_mut(j).fill(0.0);
            q[[fallback, j]] = 1.0;
            fallback += 1;
        }
    }
}

/// Rows of the eigenvectors of the `p` smallest eigenvalues, unweighted.
pub fn spectral_embedding(l: &SymmetricMatrix, p: usize) -> Result<Array2<f64>> {
    let eig = eigendecompose_symmetric(l)?;
    embedding_from(&eig, p)
}

pub fn embedding_from(eig: &EigenDecomposition, p: usize) -> Result<Array2<f64>> {
    if p == 0 || p > eig.order() {
        return Err(Error::InvalidArgument(format!(
            "embedding dimension {p} outside 1..={}",
            eig.order()
        )));
    }
    Ok(eig.eigenvectors().slice(ndarray::s![.., ..p]).to_owned())
}
