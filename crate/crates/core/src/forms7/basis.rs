//! Blade tables for exterior algebras of dimension at most 7.
//!
//! A blade `e^{i_1} ∧ … ∧ e^{i_k}` with `i_1 < … < i_k` is a bitmask.
//! Blades of a fixed degree are ordered lexicographically by their index
//! tuples.

use once_cell::sync::Lazy;

pub const MAX_DIM: usize = 7;
/// Largest number of blades in any single degree (`C(7,3)`).
pub const MAX_BLADES: usize = 35;

pub type Blade = u8;

struct Tables {
    blades: Vec<Vec<Vec<Blade>>>,
    index: Vec<[u8; 128]>,
    wedge_sign: Vec<i8>,
}

fn combinations(n: usize, k: usize) -> Vec<Blade> {
    fn rec(start: usize, n: usize, k: usize, acc: Blade, out: &mut Vec<Blade>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        for i in start..n {
            rec(i + 1, n, k - 1, acc | (1 << i), out);
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, 0, &mut out);
    out
}

static TABLES: Lazy<Tables> = Lazy::new(|| {
    let mut blades = Vec::with_capacity(MAX_DIM + 1);
    let mut index = Vec::with_capacity(MAX_DIM + 1);
    for d in 0..=MAX_DIM {
        let per_deg: Vec<Vec<Blade>> = (0..=d).map(|k| combinations(d, k)).collect();
        let mut idx = [u8::MAX; 128];
        for list in &per_deg {
            for (i, &b) in list.iter().enumerate() {
                idx[b as usize] = i as u8;
            }
        }
        blades.push(per_deg);
        index.push(idx);
    }
    let mut wedge_sign = vec![0i8; 128 * 128];
    for a in 0..128usize {
        for b in 0..128usize {
            if a & b != 0 {
                continue;
            }
            let mut inversions = 0u32;
            for y in 0..MAX_DIM {
                if b & (1 << y) != 0 {
                    inversions += (a >> (y + 1)).count_ones();
                }
            }
            wedge_sign[a * 128 + b] = if inversions % 2 == 0 { 1 } else { -1 };
        }
    }
    Tables { blades, index, wedge_sign }
});

/// Blades of degree `k` in dimension `dim`, in basis order.
#[inline]
pub fn blades(dim: usize, k: usize) -> &'static [Blade] {
    &TABLES.blades[dim][k]
}

/// Number of blades of degree `k` in dimension `dim`.
#[inline]
pub fn count(dim: usize, k: usize) -> usize {
    TABLES.blades[dim][k].len()
}

/// Position of a blade within its degree for dimension `dim`.
#[inline]
pub fn index_of(dim: usize, blade: Blade) -> usize {
    TABLES.index[dim][blade as usize] as usize
}

/// Sign of `e^A ∧ e^B = ± e^{A∪B}`, zero when the blades overlap.
#[inline]
pub fn wedge_sign(a: Blade, b: Blade) -> i8 {
    TABLES.wedge_sign[a as usize * 128 + b as usize]
}

/// Sign of `e_i ⨼ e^I = ± e^{I∖i}`, zero when `i ∉ I`.
#[inline]
pub fn interior_sign(i: usize, blade: Blade) -> i8 {
    if blade & (1 << i) == 0 {
        0
    } else if (blade & ((1u8 << i) - 1)).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

#[inline]
pub fn degree(blade: Blade) -> usize {
    blade.count_ones() as usize
}

/// Blade with every index of `0..dim`.
#[inline]
pub fn top(dim: usize) -> Blade {
    ((1u16 << dim) - 1) as Blade
}

/// Index list of a blade in increasing order.
pub fn indices(blade: Blade) -> Vec<usize> {
    (0..MAX_DIM).filter(|&i| blade & (1 << i) != 0).collect()
}

/// Blade for an index sequence with the sign of the sorting permutation;
/// sign zero when an index repeats.
pub fn from_indices(idx: &[usize]) -> (Blade, i8) {
    let mut blade: Blade = 0;
    let mut sign = 1i8;
    for &i in idx {
        assert!(i < MAX_DIM, "axis {i} out of range");
        let bit = 1u8 << i;
        if blade & bit != 0 {
            return (0, 0);
        }
        if (blade >> (i + 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        blade |= bit;
    }
    (blade, sign)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_are_binomial() {
        let binom = |n: usize, k: usize| -> usize { (0..k).fold(1, |a, i| a * (n - i) / (i + 1)) };
        for d in 0..=MAX_DIM {
            for k in 0..=d {
                assert_eq!(count(d, k), binom(d, k));
            }
        }
        assert_eq!(count(7, 3), MAX_BLADES);
    }

    #[test]
    fn order_is_lexicographic() {
        let b = blades(7, 2);
        assert_eq!(indices(b[0]), vec![0, 1]);
        assert_eq!(indices(b[6]), vec![1, 2]);
        assert_eq!(indices(*b.last().unwrap()), vec![5, 6]);
        let b4 = blades(4, 2);
        assert_eq!(indices(b4[3]), vec![1, 2]);
    }

    #[test]
    fn signs_match_permutation_parity() {
        assert_eq!(from_indices(&[1, 0]), (0b11, -1));
        assert_eq!(from_indices(&[2, 0, 1]), (0b111, 1));
        assert_eq!(wedge_sign(0b010, 0b001), -1);
        assert_eq!(wedge_sign(0b001, 0b110), 1);
        assert_eq!(wedge_sign(0b100, 0b011), 1);
        assert_eq!(interior_sign(1, 0b111), -1);
        assert_eq!(interior_sign(3, 0b111), 0);
    }
}
