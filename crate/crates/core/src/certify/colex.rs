//! Colexicographic ranking of strictly increasing tuples.
//!
//! `rank(t) = Σ_i C(t_i, i + 1)` for `t_0 < t_1 < … < t_{r-1}`.

pub fn binom(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub fn rank(t: &[u64]) -> u128 {
    t.iter()
        .enumerate()
        .map(|(i, &c)| binom(c, i as u64 + 1))
        .sum()
}

pub fn unrank(mut rank: u128, r: usize) -> Vec<u64> {
    let mut t = vec![0u64; r];
    for i in (1..=r as u64).rev() {
        let mut hi = i.max(1);
        while binom(hi, i) <= rank {
            hi *= 2;
        }
        // largest c with C(c, i) <= rank lies in [i - 1, hi)
        let mut lo = i - 1;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if binom(mid, i) <= rank {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        t[i as usize - 1] = lo;
        rank -= binom(lo, i);
    }
    t
}

/// Colex successor in place; `false` when the tuple was the last one below `n`.
pub fn advance(t: &mut [u64], n: u64) -> bool {
    let r = t.len();
    for i in 0..r {
        let bound = if i + 1 < r { t[i + 1] } else { n };
        if t[i] + 1 < bound {
            t[i] += 1;
            for (j, x) in t.iter_mut().enumerate().take(i) {
                *x = j as u64;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_binomials() {
        assert_eq!(binom(12, 2), 66);
        assert_eq!(binom(360, 2), 64_620);
        assert_eq!(binom(3, 5), 0);
        assert_eq!(binom(41_580, 3), 11_980_387_617_660);
    }

    #[test]
    fn enumeration_matches_ranks() {
        let (n, r) = (9u64, 3usize);
        let mut t: Vec<u64> = (0..r as u64).collect();
        let mut k = 0u128;
        loop {
            assert_eq!(rank(&t), k);
            assert_eq!(unrank(k, r), t);
            k += 1;
            if !advance(&mut t, n) {
                break;
            }
        }
        assert_eq!(k, binom(n, r as u64));
    }

    proptest! {
        #[test]
        fn unrank_inverts_rank(x in 0u128..10_000_000_000_000, r in 1usize..5) {
            let t = unrank(x, r);
            prop_assert!(t.windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(rank(&t), x);
        }
    }
}
