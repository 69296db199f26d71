//! Small permutation helpers shared by the combinatorial modules.

/// Signature of a permutation given as an image array, by cycle decomposition.
///
/// Panics if `p` is not a permutation of `0..p.len()`.
pub fn signature(p: &[usize]) -> i8 {
    let n = p.len();
    let mut seen = vec![false; n];
    let mut sign = 1i8;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0usize;
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            k = p[k];
            assert!(k < n, "not a permutation");
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Returns true if `p` is a permutation of `0..p.len()`.
pub fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    for &x in p {
        if x >= p.len() || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

/// Inverse of a permutation.
pub fn inverse(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

/// Advances `a` to the next permutation in lexicographic order.
/// Returns false (leaving `a` sorted ascending) after the last one.
pub fn next_permutation<T: Ord>(a: &mut [T]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        a.reverse();
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..n).collect();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

/// Lexicographic rank of a permutation of `0..n` (Lehmer code).
pub fn rank(p: &[usize]) -> usize {
    let n = p.len();
    let mut r = 0usize;
    for i in 0..n {
        let smaller = p[i + 1..].iter().filter(|&&x| x < p[i]).count();
        r = r * (n - i) + smaller;
    }
    r
}

/// Inverse of [`rank`].
pub fn unrank(n: usize, mut r: usize) -> Vec<usize> {
    let mut fact = vec![1usize; n + 1];
    for i in 1..=n {
        fact[i] = fact[i - 1] * i;
    }
    let mut pool: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n);
    for i in (0..n).rev() {
        let q = r / fact[i];
        r %= fact[i];
        out.push(pool.remove(q));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signature_of_small_cycles() {
        assert_eq!(signature(&[0, 1, 2]), 1);
        assert_eq!(signature(&[1, 0, 2]), -1);
        assert_eq!(signature(&[1, 2, 0]), 1);
        assert_eq!(signature(&[1, 0, 3, 2]), 1);
    }

    #[test]
    fn rank_roundtrip_and_order() {
        let all = all_permutations(5);
        assert_eq!(all.len(), 120);
        for (i, p) in all.iter().enumerate() {
            assert_eq!(rank(p), i);
            assert_eq!(&unrank(5, i), p);
        }
    }

    #[test]
    fn signature_is_multiplicative() {
        let all = all_permutations(4);
        for p in &all {
            for q in &all {
                let pq: Vec<usize> = (0..4).map(|i| p[q[i]]).collect();
                assert_eq!(signature(&pq), signature(p) * signature(q));
            }
        }
    }
}
