use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::operator_core::BlockWindow;

/// Component-major view of a block window: for each pair `(a, b)` an
/// `L × L` matrix with entries `cov[X_t^{(a)}, X_τ^{(b)}]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupedWindow {
    t_lo: i64,
    t_hi: i64,
    p: usize,
    symmetric: bool,
    pairs: Vec<DMatrix<f64>>,
}

impl GroupedWindow {
    pub fn t_lo(&self) -> i64 {
        self.t_lo
    }
    pub fn t_hi(&self) -> i64 {
        self.t_hi
    }
    pub fn p(&self) -> usize {
        self.p
    }
    pub fn len(&self) -> usize {
        (self.t_hi - self.t_lo + 1) as usize
    }
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn pair(&self, a: usize, b: usize) -> &DMatrix<f64> {
        &self.pairs[a * self.p + b]
    }

    /// Component-major dense matrix restricted to `comps`, in that order:
    /// row `i·L + k` is component `comps[i]` at time `t_lo + k`.
    pub fn stacked(&self, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
        let l = self.len();
        let mut m = DMatrix::zeros(rows.len() * l, cols.len() * l);
        for (i, &a) in rows.iter().enumerate() {
            for (j, &b) in cols.iter().enumerate() {
                m.view_mut((i * l, j * l), (l, l)).copy_from(self.pair(a, b));
            }
        }
        m
    }
}

pub fn regroup_by_component(c: &BlockWindow) -> GroupedWindow {
    let (p, l) = (c.p(), c.len());
    let flat = c.flat();
    let pairs = (0..p * p)
        .map(|ab| {
            let (a, b) = (ab / p, ab % p);
            DMatrix::from_fn(l, l, |i, k| flat[(i * p + a, k * p + b)])
        })
        .collect();
    GroupedWindow {
        t_lo: c.t_lo(),
        t_hi: c.t_hi(),
        p,
        symmetric: c.is_symmetric(),
        pairs,
    }
}

pub fn ungroup(g: &GroupedWindow) -> Result<BlockWindow> {
    let (p, l) = (g.p, g.len());
    let flat = DMatrix::from_fn(l * p, l * p, |r, s| g.pair(r % p, s % p)[(r / p, s / p)]);
    let w = BlockWindow::from_flat(g.t_lo, p, flat)?;
    if w.is_symmetric() != g.symmetric {
        return Err(Error::Input("grouped window symmetry flag is inconsistent".into()));
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_law_and_round_trip() {
        let w = BlockWindow::from_fn(-3, 4, 3, |t, tau| {
            DMatrix::from_fn(3, 3, |a, b| (t * 100 + tau * 10) as f64 + (a * 3 + b) as f64 * 0.1)
        })
        .unwrap();
        let g = regroup_by_component(&w);
        for t in -3..=4i64 {
            for tau in -3..=4i64 {
                for a in 0..3 {
                    for b in 0..3 {
                        assert_eq!(g.pair(a, b)[((t + 3) as usize, (tau + 3) as usize)], w.block(t, tau)[(a, b)]);
                    }
                }
            }
        }
        assert_eq!(ungroup(&g).unwrap(), w);
    }

    #[test]
    fn scalar_is_identity_transform() {
        let w = BlockWindow::from_fn(0, 5, 1, |t, tau| DMatrix::from_element(1, 1, (t - tau) as f64)).unwrap();
        assert_eq!(regroup_by_component(&w).pair(0, 0), w.flat());
    }
}
