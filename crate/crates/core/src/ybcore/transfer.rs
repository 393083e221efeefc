use super::{SiteTuple, TwoSiteMap};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Zero-based slot for a 1-based cyclic index (`0` is read as `N`).
pub fn site_index(i: usize, len: usize) -> usize {
    assert!(len > 0, "empty tuple");
    (i + len - 1) % len
}

/// `R_ij`: applies `R(lambda_i, lambda_j)` to slots `i` and `j` (1-based,
/// cyclic) and leaves every other slot untouched. Slot `i` receives `x~`,
/// slot `j` receives `y~`; parameters stay in place.
pub fn lift_two_site<T, M>(
    map: &M,
    i: usize,
    j: usize,
    t: &SiteTuple<M::Value, T>,
) -> Result<SiteTuple<M::Value, T>>
where
    T: Scalar,
    M: TwoSiteMap<T>,
{
    let n = t.len();
    let (a, b) = (site_index(i, n), site_index(j, n));
    if a == b {
        return Err(Error::BadIndex { i, j, len: n });
    }
    let (si, sj) = (&t.sites()[a], &t.sites()[b]);
    let (x, y) = map
        .apply(&si.value, &si.param, &sj.value, &sj.param)
        .map_err(|e| match e {
            Error::MapUndefined { .. } => e,
            other => Error::MapUndefined {
                i: a + 1,
                j: b + 1,
                reason: other.to_string(),
            },
        })?;
    let mut out = t.clone();
    out.sites_mut()[a].value = x;
    out.sites_mut()[b].value = y;
    Ok(out)
}

/// Transfer map `T_i = R_{i,i+N-1} ... R_{i,i+2} R_{i,i+1}`; the rightmost
/// factor `R_{i,i+1}` acts first.
pub fn transfer_map<T, M>(
    map: &M,
    i: usize,
    t: &SiteTuple<M::Value, T>,
) -> Result<SiteTuple<M::Value, T>>
where
    T: Scalar,
    M: TwoSiteMap<T>,
{
    let n = t.len();
    if n < 2 {
        return Err(Error::InvalidInput("transfer maps need N >= 2".into()));
    }
    let i = site_index(i, n) + 1;
    let mut cur = t.clone();
    for k in 1..n {
        cur = lift_two_site(map, i, i + k, &cur)?;
    }
    Ok(cur)
}

/// Applies the operator product `T_{order[0]} ... T_{order[last]}` (the last
/// listed map acts first).
pub fn transfer_product<T, M>(
    map: &M,
    order: &[usize],
    t: &SiteTuple<M::Value, T>,
) -> Result<SiteTuple<M::Value, T>>
where
    T: Scalar,
    M: TwoSiteMap<T>,
{
    order
        .iter()
        .rev()
        .try_fold(t.clone(), |cur, &i| transfer_map(map, i, &cur))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ybcore::{Permutation, Site};
    use crate::Rational as Q;

    fn tuple(values: &[i64]) -> SiteTuple<Q, Q> {
        SiteTuple::new(
            values
                .iter()
                .enumerate()
                .map(|(k, &v)| Site::new(Q::from_i64(v), Q::from_i64(k as i64 + 1)))
                .collect(),
        )
        .unwrap()
    }

    fn values(t: &SiteTuple<Q, Q>) -> Vec<Q> {
        t.values().cloned().collect()
    }

    #[test]
    fn lift_swaps_only_the_named_slots() {
        let p = Permutation::<Q>::new();
        let t = tuple(&[10, 20, 30]);
        let out = lift_two_site(&p, 1, 2, &t).unwrap();
        assert_eq!(values(&out), values(&tuple(&[20, 10, 30])));
        assert_eq!(out.params(), t.params());
    }

    #[test]
    fn equal_indices_are_rejected() {
        let p = Permutation::<Q>::new();
        let t = tuple(&[1, 2, 3]);
        assert!(matches!(
            lift_two_site(&p, 2, 2, &t),
            Err(Error::BadIndex { .. })
        ));
        // cyclic: 4 is 1 for N = 3
        assert!(matches!(
            lift_two_site(&p, 1, 4, &t),
            Err(Error::BadIndex { .. })
        ));
    }

    #[test]
    fn two_site_transfer_is_the_map() {
        let p = Permutation::<Q>::new();
        let t = tuple(&[1, 2]);
        assert_eq!(
            transfer_map(&p, 1, &t).unwrap(),
            lift_two_site(&p, 1, 2, &t).unwrap()
        );
    }

    #[test]
    fn permutation_transfer_is_cyclic_shift() {
        let p = Permutation::<Q>::new();
        let t = tuple(&[1, 2, 3]);
        // T_1 = R_13 R_12: (x1,x2,x3) -> (x3,x1,x2)
        let out = transfer_map(&p, 1, &t).unwrap();
        assert_eq!(values(&out), values(&tuple(&[3, 1, 2])));
        assert_eq!(out.params(), t.params());
    }

    #[test]
    fn site_index_wraps() {
        assert_eq!(site_index(1, 3), 0);
        assert_eq!(site_index(3, 3), 2);
        assert_eq!(site_index(4, 3), 0);
        assert_eq!(site_index(0, 3), 2);
    }
}
