use nalgebra::{DMatrix, DMatrixView};

use crate::error::{Error, Result};
use crate::exec;

/// Finite section of a block operator: `p×p` blocks indexed by
/// `t_lo ≤ t, τ ≤ t_hi`, stored flattened time-major as an `(Lp)×(Lp)`
/// matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockWindow {
    t_lo: i64,
    t_hi: i64,
    p: usize,
    data: DMatrix<f64>,
    symmetric: bool,
}

impl BlockWindow {
    pub fn zeros(t_lo: i64, t_hi: i64, p: usize) -> Result<Self> {
        check_bounds(t_lo, t_hi, p)?;
        let n = (t_hi - t_lo + 1) as usize * p;
        Ok(BlockWindow {
            t_lo,
            t_hi,
            p,
            data: DMatrix::zeros(n, n),
            symmetric: true,
        })
    }

    pub fn identity(t_lo: i64, t_hi: i64, p: usize) -> Result<Self> {
        check_bounds(t_lo, t_hi, p)?;
        let n = (t_hi - t_lo + 1) as usize * p;
        Ok(BlockWindow {
            t_lo,
            t_hi,
            p,
            data: DMatrix::identity(n, n),
            symmetric: true,
        })
    }

    /// Wraps a flattened matrix. The symmetry flag is set iff the matrix is
    /// exactly symmetric.
    pub fn from_flat(t_lo: i64, p: usize, data: DMatrix<f64>) -> Result<Self> {
        if p == 0 || data.nrows() != data.ncols() || data.nrows() % p != 0 || data.nrows() == 0 {
            return Err(Error::Input(format!(
                "flattened window must be square with size a positive multiple of p={p}, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Input("non-finite entry in window".into()));
        }
        let l = (data.nrows() / p) as i64;
        let symmetric = is_exactly_symmetric(&data);
        Ok(BlockWindow {
            t_lo,
            t_hi: t_lo + l - 1,
            p,
            data,
            symmetric,
        })
    }

    /// Wraps `(M + Mᵀ)/2`, which is exactly symmetric.
    pub fn from_flat_symmetrized(t_lo: i64, p: usize, data: DMatrix<f64>) -> Result<Self> {
        let sym = symmetrize(&data);
        let mut w = Self::from_flat(t_lo, p, sym)?;
        w.symmetric = true;
        Ok(w)
    }

    /// Builds a general window block by block.
    pub fn from_fn<F>(t_lo: i64, t_hi: i64, p: usize, f: F) -> Result<Self>
    where
        F: Fn(i64, i64) -> DMatrix<f64> + Sync + Send,
    {
        check_bounds(t_lo, t_hi, p)?;
        let l = (t_hi - t_lo + 1) as usize;
        let rows = exec::map_indexed(l, |i| {
            (0..l)
                .map(|k| f(t_lo + i as i64, t_lo + k as i64))
                .collect::<Vec<_>>()
        });
        let mut data = DMatrix::zeros(l * p, l * p);
        for (i, row) in rows.iter().enumerate() {
            for (k, b) in row.iter().enumerate() {
                check_block(b, p)?;
                data.view_mut((i * p, k * p), (p, p)).copy_from(b);
            }
        }
        Self::from_flat(t_lo, p, data)
    }

    /// Builds a symmetric window from `f(t, τ)` evaluated for `t ≤ τ` only;
    /// the lower triangle is the exact transpose.
    pub fn from_fn_symmetric<F>(t_lo: i64, t_hi: i64, p: usize, f: F) -> Result<Self>
    where
        F: Fn(i64, i64) -> DMatrix<f64> + Sync + Send,
    {
        check_bounds(t_lo, t_hi, p)?;
        let l = (t_hi - t_lo + 1) as usize;
        let rows = exec::map_indexed(l, |i| {
            (i..l)
                .map(|k| f(t_lo + i as i64, t_lo + k as i64))
                .collect::<Vec<_>>()
        });
        let mut data = DMatrix::zeros(l * p, l * p);
        for (i, row) in rows.iter().enumerate() {
            for (off, b) in row.iter().enumerate() {
                check_block(b, p)?;
                let k = i + off;
                if i == k {
                    let s = symmetrize(b);
                    data.view_mut((i * p, i * p), (p, p)).copy_from(&s);
                } else {
                    data.view_mut((i * p, k * p), (p, p)).copy_from(b);
                    data.view_mut((k * p, i * p), (p, p)).copy_from(&b.transpose());
                }
            }
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Input("non-finite entry in window".into()));
        }
        Ok(BlockWindow {
            t_lo,
            t_hi,
            p,
            data,
            symmetric: true,
        })
    }

    /// Symmetric block-Toeplitz window with `blocks[t,τ] = lag(t − τ)`.
    /// `lag(r)` is only queried for `r ≤ 0` and transposed for `r > 0`.
    pub fn toeplitz<F>(t_lo: i64, t_hi: i64, p: usize, lag: F) -> Result<Self>
    where
        F: Fn(i64) -> DMatrix<f64> + Sync + Send,
    {
        check_bounds(t_lo, t_hi, p)?;
        let l = (t_hi - t_lo + 1) as usize;
        let lags: Vec<DMatrix<f64>> = exec::map_indexed(l, |k| lag(-(k as i64)));
        Self::from_fn_symmetric(t_lo, t_hi, p, |t, tau| lags[(tau - t) as usize].clone())
    }

    pub fn t_lo(&self) -> i64 {
        self.t_lo
    }
    pub fn t_hi(&self) -> i64 {
        self.t_hi
    }
    pub fn p(&self) -> usize {
        self.p
    }
    /// Number of time points `L`.
    pub fn len(&self) -> usize {
        (self.t_hi - self.t_lo + 1) as usize
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    /// Flattened dimension `L·p`.
    pub fn dim(&self) -> usize {
        self.data.nrows()
    }
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }
    pub fn contains(&self, t: i64) -> bool {
        t >= self.t_lo && t <= self.t_hi
    }
    pub fn flat(&self) -> &DMatrix<f64> {
        &self.data
    }
    pub fn into_flat(self) -> DMatrix<f64> {
        self.data
    }

    fn offset(&self, t: i64) -> usize {
        assert!(self.contains(t), "time {t} outside [{}, {}]", self.t_lo, self.t_hi);
        (t - self.t_lo) as usize * self.p
    }

    pub fn block_view(&self, t: i64, tau: i64) -> DMatrixView<'_, f64> {
        let (i, k) = (self.offset(t), self.offset(tau));
        self.data.view((i, k), (self.p, self.p))
    }

    pub fn block(&self, t: i64, tau: i64) -> DMatrix<f64> {
        self.block_view(t, tau).into_owned()
    }

    /// Restriction to `[lo, hi]`.
    pub fn sub_window(&self, lo: i64, hi: i64) -> Result<Self> {
        if lo > hi || !self.contains(lo) || !self.contains(hi) {
            return Err(Error::Input(format!(
                "sub-window [{lo}, {hi}] not inside [{}, {}]",
                self.t_lo, self.t_hi
            )));
        }
        let i = self.offset(lo);
        let n = (hi - lo + 1) as usize * self.p;
        Ok(BlockWindow {
            t_lo: lo,
            t_hi: hi,
            p: self.p,
            data: self.data.view((i, i), (n, n)).into_owned(),
            symmetric: self.symmetric,
        })
    }

    /// Interior after discarding `pad` time points at each end.
    pub fn interior(&self, pad: usize) -> Result<Self> {
        let pad = pad as i64;
        self.sub_window(self.t_lo + pad, self.t_hi - pad)
    }

    pub fn scaled(&self, c: f64) -> Self {
        BlockWindow {
            data: &self.data * c,
            ..self.clone()
        }
    }

    /// Maximum spectral norm over blocks at each lag `|t − τ| = ℓ`, for
    /// `ℓ = 0..L`.
    pub fn lag_max_norms(&self) -> Vec<f64> {
        let l = self.len();
        let per_row: Vec<Vec<f64>> = exec::map_indexed(l, |i| {
            (i..l)
                .map(|k| {
                    let t = self.t_lo + i as i64;
                    let tau = self.t_lo + k as i64;
                    let a = super::norms::spectral_norm_view(self.block_view(t, tau));
                    if self.symmetric {
                        a
                    } else {
                        a.max(super::norms::spectral_norm_view(self.block_view(tau, t)))
                    }
                })
                .collect()
        });
        let mut out = vec![0.0f64; l];
        for row in &per_row {
            for (off, &v) in row.iter().enumerate() {
                out[off] = out[off].max(v);
            }
        }
        out
    }
}

/// Banded truncation `B_M`: blocks with `|t − τ| > M` are exactly zero.
#[derive(Clone, Debug, PartialEq)]
pub struct BandedBlockWindow {
    base: BlockWindow,
    bandwidth: usize,
}

impl BandedBlockWindow {
    pub fn base(&self) -> &BlockWindow {
        &self.base
    }
    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }
    pub fn into_base(self) -> BlockWindow {
        self.base
    }
}

/// Copies blocks with `|t − τ| ≤ M` and zeroes the rest.
pub fn band_truncate(w: &BlockWindow, m: usize) -> BandedBlockWindow {
    let p = w.p;
    let l = w.len();
    let mut data = w.data.clone();
    for i in 0..l {
        for k in 0..l {
            if i.abs_diff(k) > m {
                data.view_mut((i * p, k * p), (p, p)).fill(0.0);
            }
        }
    }
    BandedBlockWindow {
        base: BlockWindow {
            data,
            ..w.clone()
        },
        bandwidth: m,
    }
}

pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub(crate) fn is_exactly_symmetric(m: &DMatrix<f64>) -> bool {
    let n = m.nrows();
    if n != m.ncols() {
        return false;
    }
    for j in 0..n {
        for i in (j + 1)..n {
            if m[(i, j)] != m[(j, i)] {
                return false;
            }
        }
    }
    true
}

fn check_bounds(t_lo: i64, t_hi: i64, p: usize) -> Result<()> {
    if t_hi < t_lo {
        return Err(Error::Input(format!("empty window [{t_lo}, {t_hi}]")));
    }
    if p == 0 {
        return Err(Error::Input("block dimension p must be positive".into()));
    }
    Ok(())
}

fn check_block(b: &DMatrix<f64>, p: usize) -> Result<()> {
    if b.nrows() != p || b.ncols() != p {
        return Err(Error::Input(format!(
            "block has shape {}x{}, expected {p}x{p}",
            b.nrows(),
            b.ncols()
        )));
    }
    Ok(())
}
