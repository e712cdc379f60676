//! Permutations of `{0,1,2,3}` represented as `[u8; 4]` lookup tables:
//! `p[i]` is the image of `i`.

/// A permutation of `{0,1,2,3}`; `p[i]` is the image of `i`.
pub type Perm = [u8; 4];

/// The identity permutation.
pub const IDENTITY: Perm = [0, 1, 2, 3];

/// Returns `true` iff `p` is a bijection of `{0,1,2,3}`.
pub fn is_permutation(p: Perm) -> bool {
    let mut seen = [false; 4];
    for &x in &p {
        if x > 3 || seen[x as usize] {
            return false;
        }
        seen[x as usize] = true;
    }
    true
}

/// Parity of a permutation: `true` for odd.
pub fn is_odd(p: Perm) -> bool {
    let mut inversions = 0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 1
}

/// Sign of a permutation: `+1` for even, `-1` for odd.
pub fn sign(p: Perm) -> i64 {
    if is_odd(p) {
        -1
    } else {
        1
    }
}

/// Composition `p ∘ q` (apply `q` first): `(p ∘ q)[i] = p[q[i]]`.
pub fn compose(p: Perm, q: Perm) -> Perm {
    [
        p[q[0] as usize],
        p[q[1] as usize],
        p[q[2] as usize],
        p[q[3] as usize],
    ]
}

/// Inverse permutation.
pub fn invert(p: Perm) -> Perm {
    let mut inv = [0u8; 4];
    for i in 0..4 {
        inv[p[i] as usize] = i as u8;
    }
    inv
}

/// All 24 permutations of `{0,1,2,3}` in lexicographic order.
pub fn all() -> impl Iterator<Item = Perm> {
    let mut perms = alloc::vec::Vec::with_capacity(24);
    for a in 0..4u8 {
        for b in 0..4u8 {
            for c in 0..4u8 {
                for d in 0..4u8 {
                    let p = [a, b, c, d];
                    if is_permutation(p) {
                        perms.push(p);
                    }
                }
            }
        }
    }
    perms.into_iter()
}

/// Sign of the permutation sending `(i,j,k,l)` to `(0,1,2,3)` (equivalently,
/// the sign of the arrangement `(i,j,k,l)` itself).
pub fn arrangement_sign(i: u8, j: u8, k: u8, l: u8) -> i64 {
    sign([i, j, k, l])
}
