//! Multi-index utilities over `ℕ₀^d`.
//!
//! A multi-index is stored as a `Vec<usize>` of length `d`. These helpers
//! enumerate index sets, compute component-wise binomials and provide the
//! order `|α| = Σ αᵢ` used throughout the derivative-atom machinery.

/// A multi-index `α ∈ ℕ₀^d`.
pub type MultiIndex = Vec<usize>;

/// Order `|α| = Σᵢ αᵢ`.
pub fn order(alpha: &[usize]) -> usize {
    alpha.iter().sum()
}

/// All multi-indices of dimension `d` with `|α| = n`, in lexicographic order.
pub fn indices_of_order(d: usize, n: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; d];
    fill_order(&mut out, &mut cur, 0, n);
    out
}

fn fill_order(out: &mut Vec<MultiIndex>, cur: &mut MultiIndex, pos: usize, rest: usize) {
    if pos + 1 == cur.len() {
        cur[pos] = rest;
        out.push(cur.clone());
        cur[pos] = 0;
        return;
    }
    for k in 0..=rest {
        cur[pos] = k;
        fill_order(out, cur, pos + 1, rest - k);
    }
    cur[pos] = 0;
}

/// All multi-indices of dimension `d` with `|α| ≤ n`, ordered by `|α|` then
/// lexicographically.
pub fn indices_up_to(d: usize, n: usize) -> Vec<MultiIndex> {
    (0..=n).flat_map(|k| indices_of_order(d, k)).collect()
}

/// All `α₁ ≤ α` (component-wise), lexicographic in the component ranges.
pub fn sub_indices(alpha: &[usize]) -> Vec<MultiIndex> {
    let mut out = vec![Vec::with_capacity(alpha.len())];
    for &a in alpha {
        let mut next = Vec::with_capacity(out.len() * (a + 1));
        for prefix in &out {
            for k in 0..=a {
                let mut v = prefix.clone();
                v.push(k);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Component-wise binomial coefficient `Πᵢ C(αᵢ, βᵢ)`; zero when `β ≰ α`.
pub fn binom_multi(alpha: &[usize], beta: &[usize]) -> f64 {
    assert_eq!(alpha.len(), beta.len(), "multi-index dimension mismatch");
    alpha.iter().zip(beta).map(|(&a, &b)| binom(a, b)).product()
}

/// Scalar binomial coefficient as f64 (exact for the small orders used here).
pub fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Component-wise difference `α − β`; panics when `β ≰ α`.
pub fn sub(alpha: &[usize], beta: &[usize]) -> MultiIndex {
    alpha
        .iter()
        .zip(beta)
        .map(|(&a, &b)| {
            assert!(b <= a, "multi-index subtraction underflow");
            a - b
        })
        .collect()
}

/// Component-wise sum `α + β`.
pub fn add(alpha: &[usize], beta: &[usize]) -> MultiIndex {
    alpha.iter().zip(beta).map(|(&a, &b)| a + b).collect()
}

/// The set `F_γ = {(α, γ−α) : |α| = N, α ≤ γ}` of splittings of `γ` into two
/// multi-indices of order `N` each. Empty unless `|γ| = 2N`.
pub fn split_pairs(gamma: &[usize], n: usize) -> Vec<(MultiIndex, MultiIndex)> {
    if order(gamma) != 2 * n {
        return Vec::new();
    }
    indices_of_order(gamma.len(), n)
        .into_iter()
        .filter(|alpha| alpha.iter().zip(gamma).all(|(&a, &g)| a <= g))
        .map(|alpha| {
            let beta = sub(gamma, &alpha);
            (alpha, beta)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_enumerate_completely() {
        // d = 2, |α| = 3 has 4 compositions.
        let v = indices_of_order(2, 3);
        assert_eq!(v, vec![vec![0, 3], vec![1, 2], vec![2, 1], vec![3, 0]]);
        // d = 3, |α| ≤ 2: C(2+3,3) = 10 indices.
        assert_eq!(indices_up_to(3, 2).len(), 10);
    }

    #[test]
    fn sub_indices_count_is_product_of_ranges() {
        let subs = sub_indices(&[2, 1]);
        assert_eq!(subs.len(), 6);
        assert!(subs.contains(&vec![0, 0]));
        assert!(subs.contains(&vec![2, 1]));
        assert!(!subs.contains(&vec![3, 0]));
    }

    #[test]
    fn binomials_match_pascal() {
        assert_eq!(binom(4, 2), 6.0);
        assert_eq!(binom(5, 0), 1.0);
        assert_eq!(binom(3, 5), 0.0);
        assert_eq!(binom_multi(&[2, 1], &[1, 1]), 2.0);
        assert_eq!(binom_multi(&[2, 1], &[1, 2]), 0.0);
    }

    #[test]
    fn split_pairs_matches_expected_set() {
        // γ = (1,1), N = 1: α ∈ {(1,0), (0,1)}, two splittings.
        let pairs = split_pairs(&[1, 1], 1);
        assert_eq!(pairs.len(), 2);
        assert!(pairs.contains(&(vec![1, 0], vec![0, 1])));
        assert!(pairs.contains(&(vec![0, 1], vec![1, 0])));
        // |γ| ≠ 2N yields nothing.
        assert!(split_pairs(&[1, 1], 2).is_empty());
    }
}
