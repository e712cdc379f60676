//! Exhaustive enumeration of small oriented ideal triangulations by
//! backtracking over face pairings.
//!
//! Faces are paired in a fixed order (always the first unpaired `(tet, face)`
//! in lexicographic order), each pairing using one of the three odd
//! vertex-label permutations that carry the source face to the target face.
//! Every completed gluing table is passed through [`Triangulation::new`], so
//! visitors only ever see valid oriented triangulations.

use alloc::vec::Vec;

use crate::perm::{self, Perm};
use crate::triangulation::{Gluing, Triangulation};

/// The odd permutations `p` with `p[from] == to`, i.e. the orientation-
/// compatible ways to glue face `from` onto face `to`.
pub fn face_perms(from: u8, to: u8) -> Vec<Perm> {
    perm::all()
        .filter(|p| perm::is_odd(*p) && p[from as usize] == to)
        .collect()
}

/// Calls `visit` for every valid oriented triangulation with `tet_count`
/// tetrahedra and all faces glued. Stops early if `visit` returns `false`.
///
/// The enumeration is exhaustive over labeled gluing tables (no quotient by
/// combinatorial isomorphism), which is fine for the intended uses: finding
/// witnesses and exercising invariants on small cases.
pub fn for_each_triangulation(
    tet_count: usize,
    visit: &mut dyn FnMut(&Triangulation) -> bool,
) -> bool {
    let mut table: Vec<[Option<Gluing>; 4]> = alloc::vec![[None; 4]; tet_count];
    backtrack(&mut table, visit)
}

fn backtrack(
    table: &mut Vec<[Option<Gluing>; 4]>,
    visit: &mut dyn FnMut(&Triangulation) -> bool,
) -> bool {
    let tet_count = table.len();
    let first_open = (0..tet_count * 4).find(|&k| table[k / 4][k % 4].is_none());
    let Some(src) = first_open else {
        if let Ok(tri) = Triangulation::new(table.clone()) {
            return visit(&tri);
        }
        return true;
    };
    let (st, sf) = (src / 4, (src % 4) as u8);
    for dst in src + 1..tet_count * 4 {
        let (dt, df) = (dst / 4, (dst % 4) as u8);
        if table[dt][df as usize].is_some() {
            continue;
        }
        for p in face_perms(sf, df) {
            table[st][sf as usize] = Some(Gluing {
                neighbor: dt,
                perm: p,
            });
            table[dt][df as usize] = Some(Gluing {
                neighbor: st,
                perm: perm::invert(p),
            });
            if !backtrack(table, visit) {
                return false;
            }
            table[st][sf as usize] = None;
            table[dt][df as usize] = None;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_tet_enumeration_finds_cusped_examples() {
        let mut valid = 0usize;
        let mut cusped = 0usize;
        for_each_triangulation(2, &mut |tri| {
            valid += 1;
            if matches!(tri.boundary_profile(), Ok(bp) if bp.c > 0) {
                cusped += 1;
            }
            true
        });
        assert!(valid > 0);
        assert!(cusped > 0);
    }
}
