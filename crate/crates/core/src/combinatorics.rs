//! Small enumeration helpers shared by the minor evaluators and sweeps.

/// All `k`-element subsets of `0..m` in lexicographic order.
pub fn k_subsets(m: usize, k: usize) -> KSubsets {
    KSubsets {
        m,
        current: if k <= m { Some((0..k).collect()) } else { None },
    }
}

pub struct KSubsets {
    m: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for KSubsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let c = self.current.as_mut().unwrap();
        let k = c.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if c[i] < self.m - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Sign of the permutation `i ↦ perm[i]` (`perm` must be a permutation of `0..n`).
pub fn permutation_sign(perm: &[usize]) -> i8 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1i8;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = perm[x];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_in_lex_order() {
        let all: Vec<_> = k_subsets(4, 2).collect();
        assert_eq!(
            all,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(
            k_subsets(3, 0).collect::<Vec<_>>(),
            vec![Vec::<usize>::new()]
        );
        assert_eq!(k_subsets(2, 3).count(), 0);
        for m in 0..8 {
            for k in 0..=m {
                assert_eq!(k_subsets(m, k).count() as u128, binomial(m, k));
            }
        }
    }

    #[test]
    fn permutations_in_lex_order() {
        assert_eq!(permutations(0), vec![Vec::<usize>::new()]);
        assert_eq!(
            permutations(3)[..3],
            [vec![0, 1, 2], vec![0, 2, 1], vec![1, 0, 2]]
        );
        assert_eq!(permutations(5).len(), 120);
    }

    #[test]
    fn signs() {
        assert_eq!(permutation_sign(&[]), 1);
        assert_eq!(permutation_sign(&[0, 1, 2]), 1);
        assert_eq!(permutation_sign(&[1, 0, 2]), -1);
        assert_eq!(permutation_sign(&[1, 2, 0]), 1);
        assert_eq!(permutation_sign(&[3, 2, 1, 0]), 1);
        assert_eq!(permutation_sign(&[1, 2, 3, 0]), -1);
    }
}
