//! Reference answers by direct scans. Slow on purpose.

use super::{Permutation, QueryRect};
use crate::error::{Error, Result};

fn check(tau: &Permutation, i: usize) -> Result<()> {
    if i == 0 || i > tau.len() {
        Err(Error::OutOfRange { index: i, n: tau.len() })
    } else {
        Ok(())
    }
}

pub fn rank(tau: &Permutation, i: usize) -> Result<usize> {
    check(tau, i)?;
    Ok(tau.get(i) as usize)
}

pub fn unrank(tau: &Permutation, v: usize) -> Result<usize> {
    check(tau, v)?;
    Ok(tau.values().iter().position(|&x| x as usize == v).expect("bijection") + 1)
}

/// Index of the minimum of `τ_a..=τ_b`.
pub fn range_min(tau: &Permutation, a: usize, b: usize) -> Result<usize> {
    check(tau, a)?;
    check(tau, b)?;
    if a > b {
        return Err(Error::InvalidRange { lo: a, hi: b });
    }
    let mut best = a;
    for j in a..=b {
        if tau.get(j) < tau.get(best) {
            best = j;
        }
    }
    Ok(best)
}

/// Smallest `j > i` with `τ_j < τ_i`.
pub fn next_smaller(tau: &Permutation, i: usize) -> Result<Option<usize>> {
    check(tau, i)?;
    Ok((i + 1..=tau.len()).find(|&j| tau.get(j) < tau.get(i)))
}

pub fn rect_count(tau: &Permutation, rect: &QueryRect) -> Result<usize> {
    rect.validate(tau.len())?;
    Ok((rect.col_lo..=rect.col_hi).filter(|&i| rect.contains(i, tau.get(i) as usize)).count())
}

pub fn rect_min(tau: &Permutation, rect: &QueryRect) -> Result<Option<usize>> {
    rect.validate(tau.len())?;
    Ok((rect.col_lo..=rect.col_hi).map(|i| tau.get(i) as usize).filter(|v| (rect.row_lo..=rect.row_hi).contains(v)).min())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let id = Permutation::identity(5);
        assert_eq!(range_min(&id, 2, 4).unwrap(), 2);
        let rev = Permutation::new((1..=8).rev().collect()).unwrap();
        assert_eq!(next_smaller(&rev, 3).unwrap(), Some(4));
        assert_eq!(next_smaller(&rev, 8).unwrap(), None);
        let tau = Permutation::new(vec![3, 1, 4, 2]).unwrap();
        assert_eq!(rect_count(&tau, &QueryRect::full(4)).unwrap(), 4);
        assert_eq!(rect_min(&tau, &QueryRect::new(3, 4, 2, 4)).unwrap(), Some(4));
        assert_eq!(rect_min(&tau, &QueryRect::new(3, 3, 2, 2)).unwrap(), None);
        assert!(rank(&tau, 0).is_err());
        assert!(range_min(&tau, 3, 2).is_err());
        for i in 1..=4 {
            assert_eq!(unrank(&tau, rank(&tau, i).unwrap()).unwrap(), i);
        }
    }
}
