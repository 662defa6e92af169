//! Enumeration helpers shared by the verifiers, oracles and solvers.

/// Loopless reflected mixed-radix Gray walk over `digits.len()` positions
/// with a uniform radix. Visits every state exactly once, changing a single
/// digit by one per step. `digits` must start all-zero; `step` is called
/// after each change with the new state plus `(index, old, new)`. The
/// all-zero initial state is the caller's to handle.
pub(crate) fn for_each_gray(
    radix: usize,
    digits: &mut [usize],
    mut step: impl FnMut(&[usize], usize, usize, usize),
) {
    let n = digits.len();
    debug_assert!(digits.iter().all(|&d| d == 0));
    if radix < 2 || n == 0 {
        return;
    }
    let mut focus: Vec<usize> = (0..=n).collect();
    let mut dir: Vec<isize> = vec![1; n];
    loop {
        let j = focus[0];
        focus[0] = 0;
        if j == n {
            break;
        }
        let old = digits[j];
        let new = (old as isize + dir[j]) as usize;
        digits[j] = new;
        if new == 0 || new == radix - 1 {
            dir[j] = -dir[j];
            focus[j] = focus[j + 1];
            focus[j + 1] = j + 1;
        }
        step(digits, j, old, new);
    }
}

/// Decode `code` into fixed-width base-`radix` digits, most significant
/// digit first (matches the canonical local-assignment index).
pub(crate) fn decode_counting(mut code: usize, radix: usize, out: &mut [usize]) {
    for slot in (0..out.len()).rev() {
        out[slot] = code % radix;
        code /= radix;
    }
    debug_assert_eq!(code, 0);
}

/// Visit every size-`k` combination of `pool` (in lexicographic order).
pub(crate) fn for_each_combination(
    pool: &[usize],
    k: usize,
    visit: &mut impl FnMut(&[usize]),
) {
    if k > pool.len() {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut buf: Vec<usize> = idx.iter().map(|&i| pool[i]).collect();
    loop {
        visit(&buf);
        // advance the combination
        let mut pos = k;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if idx[pos] + 1 <= pool.len() - (k - pos) {
                idx[pos] += 1;
                for j in pos + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                for j in pos..k {
                    buf[j] = pool[idx[j]];
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn gray_visits_every_state_once() {
        for (radix, n) in [(2usize, 5usize), (3, 3), (4, 2)] {
            let mut digits = vec![0usize; n];
            let mut seen = HashSet::new();
            seen.insert(digits.clone());
            for_each_gray(radix, &mut digits, |state, idx, old, new| {
                assert!(old.abs_diff(new) == 1);
                assert_eq!(state[idx], new);
                assert!(seen.insert(state.to_vec()));
            });
            assert_eq!(seen.len(), radix.pow(n as u32));
        }
    }

    #[test]
    fn combinations_are_lexicographic_and_complete() {
        let pool = [2usize, 5, 7, 9];
        let mut got = Vec::new();
        for_each_combination(&pool, 2, &mut |c| got.push(c.to_vec()));
        assert_eq!(
            got,
            vec![
                vec![2, 5],
                vec![2, 7],
                vec![2, 9],
                vec![5, 7],
                vec![5, 9],
                vec![7, 9]
            ]
        );
        let mut none = Vec::new();
        for_each_combination(&pool, 5, &mut |c| none.push(c.to_vec()));
        assert!(none.is_empty());
    }

    #[test]
    fn decode_counting_matches_manual_digits() {
        let mut out = [0usize; 3];
        decode_counting(5, 2, &mut out);
        assert_eq!(out, [1, 0, 1]);
        decode_counting(11, 3, &mut out);
        assert_eq!(out, [1, 0, 2]);
    }
}
