//! Thin SVD backed by faer; singular values come back in nonincreasing order.

use crate::error::{Error, Result};
use crate::CMatrix;

pub(crate) struct ThinSvd {
    /// `d1 x r` left singular vectors.
    pub u: CMatrix,
    pub s: Vec<f64>,
    /// `d2 x r` right singular vectors, so that `m = u diag(s) v^H`.
    pub v: CMatrix,
}

pub(crate) fn thin_svd(m: &CMatrix) -> Result<ThinSvd> {
    if m.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFinite("matrix passed to the SVD"));
    }
    let (rows, cols) = m.shape();
    let a = faer::Mat::from_fn(rows, cols, |i, j| m[(i, j)]);
    let svd = a
        .thin_svd()
        .map_err(|_| Error::NonFinite("singular value decomposition"))?;
    let (u, v) = (svd.U(), svd.V());
    let s = svd.S().column_vector();
    let r = rows.min(cols);
    Ok(ThinSvd {
        u: CMatrix::from_fn(rows, r, |i, j| u[(i, j)]),
        s: (0..r).map(|i| s[i].re).collect(),
        v: CMatrix::from_fn(cols, r, |i, j| v[(i, j)]),
    })
}

pub(crate) fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    thin_svd(m).map(|svd| svd.s)
}
