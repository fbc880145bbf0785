//! Linear algebra over F2 on word-packed bit vectors.

#[inline]
fn bit(v: &[u64], i: usize) -> bool {
    (v[i / 64] >> (i % 64)) & 1 == 1
}

#[inline]
fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

/// Rank of a set of `len`-bit vectors.
pub fn rank(vectors: &[Vec<u64>], len: usize) -> usize {
    let mut basis = Basis::new(len);
    vectors.iter().filter(|v| basis.insert(v)).count()
}

/// Incrementally built row-echelon basis with one pivot per stored vector.
#[derive(Clone, Debug)]
pub struct Basis {
    len: usize,
    rows: Vec<(usize, Vec<u64>)>,
}

impl Basis {
    pub fn new(len: usize) -> Self {
        Self {
            len,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let mut r = v.to_vec();
        for (pivot, row) in &self.rows {
            if bit(&r, *pivot) {
                xor_into(&mut r, row);
            }
        }
        r
    }

    /// True when `v` lies in the span of the stored vectors.
    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&w| w == 0)
    }

    /// Adds `v` if it is independent of the basis; returns whether it was.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        let r = self.reduce(v);
        match (0..self.len).find(|&i| bit(&r, i)) {
            None => false,
            Some(pivot) => {
                // Keep earlier rows reduced against the new pivot so that a
                // single pass in `reduce` suffices.
                for (_, row) in &mut self.rows {
                    if bit(row, pivot) {
                        xor_into(row, &r);
                    }
                }
                self.rows.push((pivot, r));
                true
            }
        }
    }
}

/// Packs a bool slice into words.
pub fn pack(bits: &[bool]) -> Vec<u64> {
    let mut out = vec![0u64; bits.len().div_ceil(64)];
    for (i, &b) in bits.iter().enumerate() {
        if b {
            out[i / 64] |= 1 << (i % 64);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_ranks() {
        let v = |s: &[bool]| pack(s);
        let vs = vec![
            v(&[true, false, true]),
            v(&[false, true, true]),
            v(&[true, true, false]),
        ];
        assert_eq!(rank(&vs, 3), 2);
        assert_eq!(rank(&vs[..2], 3), 2);
        assert_eq!(rank(&[v(&[false, false, false])], 3), 0);
    }

    #[test]
    fn basis_membership() {
        let mut b = Basis::new(130);
        let mut a = vec![0u64; 3];
        a[2] = 1 << 1;
        a[0] = 1;
        assert!(b.insert(&a));
        assert!(!b.insert(&a));
        assert!(b.contains(&a));
        assert!(b.contains(&[0, 0, 0]));
        assert!(!b.contains(&[2, 0, 0]));
    }

    /// Brute force: rank = log2 of the number of distinct subset sums.
    fn brute_rank(vs: &[Vec<bool>]) -> usize {
        let mut span = std::collections::HashSet::new();
        for mask in 0u32..(1 << vs.len()) {
            let mut acc = vec![false; vs[0].len()];
            for (i, v) in vs.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    for (a, b) in acc.iter_mut().zip(v) {
                        *a ^= b;
                    }
                }
            }
            span.insert(acc);
        }
        span.len().trailing_zeros() as usize
    }

    proptest! {
        #[test]
        fn rank_matches_span_enumeration(
            vs in prop::collection::vec(prop::collection::vec(any::<bool>(), 6), 1..8)
        ) {
            let packed: Vec<_> = vs.iter().map(|v| pack(v)).collect();
            prop_assert_eq!(rank(&packed, 6), brute_rank(&vs));
        }
    }
}
