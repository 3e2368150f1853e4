//! Partial top-k selection under the (distance, index) order.

use crate::error::{Error, Result};
use crate::neighbors::Neighbor;

/// The `k` smallest values of `row` with their indices, ascending, ties by
/// ascending index.
///
/// Runs an average `O(m)` selection followed by an `O(k log k)` sort of the
/// selected prefix; the output equals sorting the whole row and truncating.
pub fn select_k_smallest(row: &[f64], k: usize) -> Result<Vec<Neighbor>> {
    check_k(k, row.len())?;
    if row.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "row contains non-finite values".into(),
        ));
    }
    let mut buf: Vec<Neighbor> = row
        .iter()
        .enumerate()
        .map(|(i, &v)| Neighbor::new(i, v))
        .collect();
    let mut out = vec![Neighbor::default(); k];
    select_into(&mut buf, &mut out);
    Ok(out)
}

pub(crate) fn check_k(k: usize, available: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    if k > available {
        return Err(Error::KTooLarge { k, available });
    }
    Ok(())
}

/// Moves the `out.len()` smallest candidates of `buf` into `out`, sorted.
/// `buf` is reordered.
#[inline]
pub(crate) fn select_into(buf: &mut [Neighbor], out: &mut [Neighbor]) {
    let k = out.len();
    debug_assert!(k >= 1 && k <= buf.len());
    if k < buf.len() {
        buf.select_nth_unstable_by(k - 1, Neighbor::cmp_rank);
    }
    let head = &mut buf[..k];
    head.sort_unstable_by(Neighbor::cmp_rank);
    out.copy_from_slice(head);
}
