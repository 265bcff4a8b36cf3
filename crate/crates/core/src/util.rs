//! Small combinatorial helpers.

use num_bigint::BigInt;
use num_traits::One;

/// All permutations of `0..n` with their parity (`true` for odd).
pub fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(n: usize, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<(Vec<usize>, bool)>) {
        if current.len() == n {
            let mut inversions = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if current[i] > current[j] {
                        inversions += 1;
                    }
                }
            }
            out.push((current.clone(), inversions % 2 == 1));
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                current.push(v);
                rec(n, current, used, out);
                current.pop();
                used[v] = false;
            }
        }
    }
    rec(n, &mut current, &mut used, &mut out);
    out
}

/// All `k`-subsets of `0..n` as increasing index lists.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Calls `f` on every map `0..q → 0..m`, given as a vector of images.
pub fn for_each_map<F: FnMut(&[usize])>(q: usize, m: usize, mut f: F) {
    if q > 0 && m == 0 {
        return;
    }
    let mut img = vec![0usize; q];
    loop {
        f(&img);
        let mut i = 0;
        loop {
            if i == q {
                return;
            }
            img[i] += 1;
            if img[i] < m {
                break;
            }
            img[i] = 0;
            i += 1;
        }
    }
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(3).iter().filter(|p| p.1).count(), 3);
        assert_eq!(permutations(0), vec![(vec![], false)]);
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        let mut n = 0;
        for_each_map(3, 2, |_| n += 1);
        assert_eq!(n, 8);
        let mut n = 0;
        for_each_map(0, 0, |_| n += 1);
        assert_eq!(n, 1);
        assert_eq!(binomial(5, 2), BigInt::from(10));
    }
}

/// Configures the global rayon pool once; `AROMAKIT_THREADS` caps its size.
pub fn init_thread_pool() {
    static ONCE: std::sync::Once = std::sync::Once::new();
    ONCE.call_once(|| {
        if let Some(n) = std::env::var("AROMAKIT_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    });
}
