//! The verification suites: symplectic structure, homology, boundary maps,
//! and multiplicative consistency. Every suite returns a list of
//! [`Check`]s; failures are report entries, never panics.

use anyhow::{anyhow, Result};
use glueq_core::cusp::{
    cartan_data, cusp_block, cusp_cocycle_curve, delta_matrix, delta_prime_matrix,
    gamma_generator_image, gamma_matrix, hexagon_chain, iota_curves, iota_label, level_col,
    pentagon_chain, standard_chain, BoundaryCurve, CuspError, CuspSurface,
};
use glueq_core::gluing::{
    evaluate_block, evaluate_unreduced, exponent_matrices, extend_shapes, log_reduce, C64,
    EquationBlock, ExponentMatrices,
};
use glueq_core::homology::{chain_homology, AbelianGroup, QuotientCoords};
use glueq_core::jcomplex::{
    hexagon_relation, local_chain_to_c1, omega_pairing, quad_relation, stokes_sides, JComplex,
};
use glueq_core::lattice::{self, PointKind};
use glueq_core::matrix::{rank, smith_normal_form, IntMatrix, Snf};
use glueq_core::mhat::mhat_homology;
use glueq_core::perm;
use glueq_core::Triangulation;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::format::Check;

/// Converts the core crate's plain error enums into `anyhow` errors.
trait MxExt<T> {
    fn m(self) -> Result<T>;
}

impl<T, E: core::fmt::Debug> MxExt<T> for core::result::Result<T, E> {
    fn m(self) -> Result<T> {
        self.map_err(|e| anyhow!("{e:?}"))
    }
}

/// Fixed seed of the random-shape sampler: committed so runs are
/// byte-identical.
pub const SHAPE_SEED: u64 = 0x1d_5eed_cafe;

/// Number of random shape assignments per multiplicative check.
pub const SHAPE_SAMPLES: usize = 100;

/// Everything the suites need for one `(triangulation, n)` pair.
pub struct Setup {
    pub tri: Triangulation,
    pub n: i64,
    pub jc: JComplex,
    pub surf: CuspSurface,
    /// Peripheral curves, flat, component-major; a basis of each peripheral
    /// `H₁`.
    pub curves: Vec<BoundaryCurve>,
    pub exp: ExponentMatrices,
    pub edges: EquationBlock,
    pub cusp: EquationBlock,
}

impl Setup {
    pub fn new(tri: &Triangulation, n: i64, curves: Vec<BoundaryCurve>) -> Result<Setup> {
        let jc = JComplex::new(tri, n).map_err(|e| anyhow!("{e:?}"))?;
        let surf = CuspSurface::new(tri).map_err(|e| anyhow!("{e:?}"))?;
        let exp = exponent_matrices(&jc.basis, &jc.classes);
        let edges = log_reduce(&exp).edges;
        let cusp =
            cusp_block(&jc.basis, tri, &surf, &curves, n).map_err(|e| anyhow!("{e:?}"))?;
        Ok(Setup {
            tri: tri.clone(),
            n,
            jc,
            surf,
            curves,
            exp,
            edges,
            cusp,
        })
    }

    /// ι(α, β) of two peripheral curves (0 across components).
    fn iota(&self, a: &BoundaryCurve, b: &BoundaryCurve) -> Result<BigInt> {
        match iota_curves(&self.surf, &self.tri, a, b) {
            Ok(v) => Ok(v),
            Err(CuspError::ComponentMismatch) => Ok(BigInt::zero()),
            Err(e) => Err(anyhow!("{e:?}")),
        }
    }
}

fn is_zero(v: &[BigInt]) -> bool {
    v.iter().all(Zero::is_zero)
}

// ---------------------------------------------------------------------------
// Symplectic suite.

/// Checks (i) gluing–gluing and (ii) gluing–cusp Ω-orthogonality, (iii) the
/// cusp–cusp pairing values ι(α,β)·A_g[r,s], and (iv) the rank of `(A|B)`.
pub fn verify_symplectic(setup: &Setup) -> Result<Vec<Check>> {
    let n = setup.n;
    let p = setup.jc.classes.p();
    let gluing_rows: Vec<Vec<BigInt>> = (0..p).map(|r| setup.edges.j_row(r)).collect();
    let cusp_rows: Vec<Vec<BigInt>> =
        (0..setup.cusp.a.rows()).map(|r| setup.cusp.j_row(r)).collect();

    let mut checks = Vec::new();

    let mut bad = 0usize;
    for x in &gluing_rows {
        for y in &gluing_rows {
            if !omega_pairing(x, y).m()?.is_zero() {
                bad += 1;
            }
        }
    }
    checks.push(Check::new(
        "sym-gluing-gluing",
        "all pairs of gluing rows are orthogonal for the standard symplectic form",
        bad == 0,
        format!("{} row pairs, {bad} nonzero products", gluing_rows.len() * gluing_rows.len()),
    ));

    let mut bad = 0usize;
    for x in &gluing_rows {
        for y in &cusp_rows {
            if !omega_pairing(x, y).m()?.is_zero() {
                bad += 1;
            }
        }
    }
    checks.push(Check::new(
        "sym-gluing-cusp",
        "every gluing row is orthogonal to every cusp row",
        bad == 0,
        format!("{} pairs, {bad} nonzero products", gluing_rows.len() * cusp_rows.len()),
    ));

    let cd = cartan_data(n);
    let levels = (n - 1) as usize;
    let mut bad = 0usize;
    let mut total = 0usize;
    for (ci, a) in setup.curves.iter().enumerate() {
        for (cj, b) in setup.curves.iter().enumerate() {
            let iota = setup.iota(a, b)?;
            for r in 0..levels {
                for s in 0..levels {
                    let x = &cusp_rows[ci * levels + r];
                    let y = &cusp_rows[cj * levels + s];
                    let want = &iota * cd.a_g.get(r, s);
                    total += 1;
                    if omega_pairing(x, y).m()? != want {
                        bad += 1;
                    }
                }
            }
        }
    }
    checks.push(Check::new(
        "sym-cusp-cusp",
        "cusp rows pair to the intersection number times the Cartan matrix \
         (twice the intersection form when n = 2)",
        bad == 0,
        format!("{total} pairs, {bad} mismatches"),
    ));

    let ab = setup.edges.a.hcat(&setup.edges.b).m()?;
    let got = rank(&ab);
    let c = setup.surf.profile.c;
    let want = p - c * levels;
    checks.push(Check::new(
        "sym-rank",
        "rank of (A|B) equals the non-vertex point-class count minus c·(n−1)",
        got == want,
        format!("P = {p}, c = {c}, rank = {got}, expected {want}"),
    ));

    Ok(checks)
}

// ---------------------------------------------------------------------------
// Homology suite.

/// The five homology groups `H₁ … H₅` of the chain complex.
pub fn complex_homology(jc: &JComplex) -> Result<Vec<AbelianGroup>> {
    let dims = [jc.c0_dim(), jc.c1_dim(), jc.j_dim(), jc.c1_dim(), jc.c0_dim()];
    let boundary = [
        jc.alpha_star.clone(),
        jc.beta_star.clone(),
        jc.beta.clone(),
        jc.alpha.clone(),
    ];
    chain_homology(&dims, &boundary).map_err(|e| anyhow!("{e:?}"))
}

/// The face-crossing word of a curve (input to the collapsed-manifold
/// homology presentation).
pub fn curve_word(curve: &BoundaryCurve) -> Vec<(usize, u8)> {
    curve.segments.iter().map(|s| (s.tet, s.exit)).collect()
}

/// Checks the five homology groups against the independently computed
/// homology of the manifold with collapsed boundary components.
pub fn verify_homology(setup: &Setup) -> Result<Vec<Check>> {
    let n = setup.n;
    let h = complex_homology(&setup.jc)?;
    let (h1, h2, h3, h4, h5) = (&h[0], &h[1], &h[2], &h[3], &h[4]);
    let mut checks = Vec::new();

    checks.push(Check::new(
        "hom-h5",
        "the top homology group vanishes",
        h5.is_trivial(),
        format!("H5 = {h5:?}"),
    ));
    checks.push(Check::new(
        "hom-h4",
        "the degree-4 homology group is cyclic of order n",
        *h4 == AbelianGroup::cyclic(n),
        format!("H4 = {h4:?}"),
    ));
    checks.push(Check::new(
        "hom-h1",
        "the degree-1 homology group is cyclic of order n",
        *h1 == AbelianGroup::cyclic(n),
        format!("H1 = {h1:?}"),
    ));

    let want_rank = 2 * setup.surf.profile.h * (n as usize - 1);
    checks.push(Check::new(
        "hom-h3-rank",
        "the free rank of the degree-3 homology group is 2h(n−1)",
        h3.rank == want_rank,
        format!("rank H3 = {}, expected {want_rank}", h3.rank),
    ));

    let words: Vec<Vec<(usize, u8)>> = setup.curves.iter().map(curve_word).collect();
    let h1_mhat = mhat_homology(&setup.tri, &words);
    let hom = h1_mhat.hom_mod(n);
    let h3_torsion = AbelianGroup {
        rank: 0,
        torsion: h3.torsion.clone(),
    };
    checks.push(Check::new(
        "hom-h3-torsion",
        "the torsion of the degree-3 homology group is Hom(H1 of the collapsed \
         manifold, Z/n)",
        h3_torsion == hom,
        format!("torsion H3 = {:?}, Hom(H1(collapsed), Z/n) = {:?} (H1(collapsed) = {h1_mhat:?})", h3.torsion, hom),
    ));

    let h2_want = h1_mhat.tensor_mod(n);
    checks.push(Check::new(
        "hom-h2",
        "the degree-2 homology group equals H1 of the collapsed manifold with \
         Z/n coefficients (universal coefficients on the dual-spine presentation)",
        *h2 == h2_want,
        format!("H2 = {h2:?}, expected {h2_want:?}"),
    ));

    Ok(checks)
}

// ---------------------------------------------------------------------------
// Boundary-map suite.

/// Image membership with a cached Smith normal form of the matrix.
struct ImageSolver {
    snf: Snf,
}

impl ImageSolver {
    fn new(m: &IntMatrix) -> ImageSolver {
        ImageSolver {
            snf: smith_normal_form(m),
        }
    }

    fn contains(&self, x: &[BigInt]) -> Result<bool> {
        let y = self.snf.u.mul_vec(x).m()?;
        let d = self.snf.diagonal();
        for (i, yi) in y.iter().enumerate() {
            if i < self.snf.rank {
                if (yi % &d[i]) != BigInt::zero() {
                    return Ok(false);
                }
            } else if !yi.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Checks the chain-complex composition identities, the β/β* adjointness,
/// and ∂∂ = 0 on all three boundary cellulations.
pub fn verify_chain_identities(setup: &Setup) -> Result<Vec<Check>> {
    let jc = &setup.jc;
    let surf = &setup.surf;
    let mut checks = Vec::new();

    checks.push(Check::new(
        "chain-compositions",
        "consecutive chain maps compose to zero",
        jc.beta_star.mul(&jc.beta).m()?.is_zero()
            && jc.alpha_star.mul(&jc.beta_star).m()?.is_zero()
            && jc.beta.mul(&jc.alpha).m()?.is_zero(),
        "beta*·beta, alpha*·beta*, beta·alpha".to_string(),
    ));

    let jdim = jc.j_dim();
    let mut bad = 0usize;
    for p in 0..jc.c1_dim() {
        let bp = jc.beta.col(p);
        for k in 0..jdim {
            let mut unit = vec![BigInt::zero(); jdim];
            unit[k] = BigInt::one();
            if jc.beta_star.get(p, k) != omega_pairing(&unit, &bp).m()? {
                bad += 1;
            }
        }
    }
    checks.push(Check::new(
        "adjoint-beta",
        "the coefficient of beta* matches the symplectic pairing against beta \
         on every generator pair",
        bad == 0,
        format!("{} pairs, {bad} mismatches", jc.c1_dim() * jdim),
    ));

    let dd = [
        ("standard", surf.standard.d1.mul(&surf.standard.d2).m()?),
        ("pentagon", surf.pentagon.d1.mul(&surf.pentagon.d2).m()?),
        ("hexagon", surf.hexagon.d1.mul(&surf.hexagon.d2).m()?),
    ];
    checks.push(Check::new(
        "boundary-squared",
        "the boundary of a boundary vanishes on all three cellulations",
        dd.iter().all(|(_, m)| m.is_zero()),
        dd.iter()
            .map(|(name, m)| format!("{name}: {}", if m.is_zero() { "zero" } else { "NONZERO" }))
            .collect::<Vec<_>>()
            .join(", "),
    ));

    Ok(checks)
}

/// Checks the δ/γ adjointness, the near–far composition, the level-scaling
/// relation between the two cusp maps, and the quad/hexagon/Stokes relation
/// oracles, prefixed by [`verify_chain_identities`].
pub fn verify_boundary_maps(setup: &Setup) -> Result<Vec<Check>> {
    let n = setup.n;
    let tri = &setup.tri;
    let jc = &setup.jc;
    let surf = &setup.surf;
    let basis = &jc.basis;
    let jdim = jc.j_dim();
    let mut checks = verify_chain_identities(setup)?;

    // Label-level adjointness of delta and gamma: the symplectic pairing of
    // delta(e^{ij} ⊗ e_r) against a J generator equals the intersection table
    // summed over gamma's label image inside the same simplex.
    let delta = delta_matrix(basis, surf, n).map_err(|e| anyhow!("{e:?}"))?;
    let subs = lattice::subsimplices(n).map_err(|e| anyhow!("{e:?}"))?;
    let mut bad = 0usize;
    let mut total = 0usize;
    for tet in 0..tri.tet_count() {
        for i in 0..4u8 {
            for j in 0..4u8 {
                if j == i {
                    continue;
                }
                for r in 1..n {
                    let xcol = level_col(surf.pentagon.e_index(tet, i, j), r, n);
                    let dx = delta.col(xcol);
                    for tet2 in 0..tri.tet_count() {
                        for &s in &subs {
                            for (xy, col) in
                                [((0u8, 1u8), basis.slot_a(tet2, s)), ((1, 2), basis.slot_b(tet2, s))]
                            {
                                let mut y = vec![BigInt::zero(); jdim];
                                y[col] = BigInt::one();
                                let lhs = omega_pairing(&dx, &y).m()?;
                                let mut rhs = BigInt::zero();
                                if tet2 == tet {
                                    for ((ip, jp, kp), lev, c) in
                                        gamma_generator_image(n, s, xy.0, xy.1)
                                    {
                                        if lev == r {
                                            rhs += iota_label(i, j, ip, jp, kp) * c;
                                        }
                                    }
                                }
                                total += 1;
                                if lhs != rhs {
                                    bad += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    checks.push(Check::new(
        "adjoint-delta-gamma",
        "delta and gamma are adjoint for the intersection pairing on every \
         generator pair",
        bad == 0,
        format!("{total} generator pairs, {bad} mismatches"),
    ));

    // Curve-level identities.
    let dp = delta_prime_matrix(basis, surf, n).map_err(|e| anyhow!("{e:?}"))?;
    let gamma = gamma_matrix(basis, surf, n).map_err(|e| anyhow!("{e:?}"))?;
    let coords = QuotientCoords::new(&surf.standard.d1, &surf.standard.d2)
        .map_err(|e| anyhow!("{e:?}"))?;
    let cd = cartan_data(n);
    let dad = cd.d.mul(&cd.a_g).m()?.mul(&cd.d).m()?;
    let beta_image = ImageSolver::new(&jc.beta);

    let mut kernel_bad = 0usize;
    let mut near_far_bad = 0usize;
    let mut scaling_bad = 0usize;
    for curve in &setup.curves {
        let pent = pentagon_chain(surf, curve);
        let hexc = hexagon_chain(surf, curve, tri).map_err(|e| anyhow!("{e:?}"))?;
        let base = coords
            .coords(&standard_chain(surf, curve)).m()?
            .ok_or_else(|| anyhow!("standard chain of a curve is not a cycle"))?;
        for r in 1..n {
            let mut xp = vec![BigInt::zero(); delta.cols()];
            for (cell, w) in pent.iter().enumerate() {
                xp[level_col(cell, r, n)] = w.clone();
            }
            let u = delta.mul_vec(&xp).m()?;
            if !is_zero(&jc.beta_star.mul_vec(&u).m()?) {
                kernel_bad += 1;
            }
            let mut xh = vec![BigInt::zero(); dp.cols()];
            for (cell, w) in hexc.iter().enumerate() {
                xh[level_col(cell, r, n)] = w.clone();
            }
            let up = dp.mul_vec(&xh).m()?;
            let diff: Vec<BigInt> = u.iter().zip(&up).map(|(a, b)| a - b * (n - r)).collect();
            if !beta_image.contains(&diff)? {
                scaling_bad += 1;
            }
            let v = gamma.mul_vec(&u).m()?;
            for rp in 1..n {
                let mut slice = vec![BigInt::zero(); surf.standard.edges.len()];
                for cls in 0..surf.standard.edges.len() {
                    slice[cls] = v[level_col(cls, rp, n)].clone();
                }
                let got = coords
                    .coords(&slice).m()?
                    .ok_or_else(|| anyhow!("gamma image is not a cycle"))?;
                let factor = dad.get((rp - 1) as usize, (r - 1) as usize);
                let want: Vec<BigInt> = base.iter().map(|x| x * &factor).collect();
                if got != want {
                    near_far_bad += 1;
                }
            }
        }
    }
    checks.push(Check::new(
        "delta-into-kernel",
        "delta of every basis cycle lies in the kernel of beta*",
        kernel_bad == 0,
        format!("{} (curve, level) pairs, {kernel_bad} failures", setup.curves.len() * (n as usize - 1)),
    ));
    checks.push(Check::new(
        "near-far",
        "gamma after delta acts on peripheral homology as the identity tensor \
         D·A·D (Cartan matrix conjugated by the level weights)",
        near_far_bad == 0,
        format!("{near_far_bad} mismatching (curve, level, level) triples"),
    ));
    checks.push(Check::new(
        "level-scaling",
        "the pentagon cusp map at level r equals (n−r) times the hexagon cusp \
         map modulo the image of beta",
        scaling_bad == 0,
        format!("{scaling_bad} failing (curve, level) pairs"),
    ));

    // Relation oracles.
    let beta_star_image = ImageSolver::new(&jc.beta_star);
    let mut quad_total = 0usize;
    let mut quad_bad = 0usize;
    for tet in 0..tri.tet_count() {
        for sigma in perm::all() {
            for k in 1..n {
                for l in 1..=(n - k) {
                    for a in corner_offsets(n - k - l) {
                        let (chain, preimage) = quad_relation(basis, tet, a, k, l, sigma)
                            .map_err(|e| anyhow!("{e:?}"))?;
                        let x = local_chain_to_c1(&jc.classes, tet, &chain);
                        quad_total += 1;
                        if !beta_star_image.contains(&x)?
                            || jc.beta_star.mul_vec(&preimage).m()? != x
                        {
                            quad_bad += 1;
                        }
                    }
                }
            }
        }
    }
    checks.push(Check::new(
        "quad-relations",
        "every quad relation lies in the image of beta* with the explicit \
         preimage verified",
        quad_bad == 0,
        format!("{quad_total} relations, {quad_bad} failures"),
    ));

    let mut hex_total = 0usize;
    let mut hex_bad = 0usize;
    for tet in 0..tri.tet_count() {
        for t in lattice::lattice_points(n).map_err(|e| anyhow!("{e:?}"))? {
            if lattice::classify_point(t).0 != PointKind::Face {
                continue;
            }
            let (chain, preimage) =
                hexagon_relation(basis, tet, t).map_err(|e| anyhow!("{e:?}"))?;
            let x = local_chain_to_c1(&jc.classes, tet, &chain);
            hex_total += 1;
            if !beta_star_image.contains(&x)? || jc.beta_star.mul_vec(&preimage).m()? != x {
                hex_bad += 1;
            }
        }
    }
    checks.push(Check::new(
        "hexagon-relations",
        "every hexagon relation lies in the image of beta* with the explicit \
         preimage verified",
        hex_bad == 0,
        format!("{hex_total} relations, {hex_bad} failures"),
    ));

    let mut stokes_bad = 0usize;
    for i in 0..4u8 {
        for r in 1..n {
            let (lhs, rhs) = stokes_sides(n, i, r).map_err(|e| anyhow!("{e:?}"))?;
            if lhs != rhs {
                stokes_bad += 1;
            }
        }
    }
    checks.push(Check::new(
        "stokes",
        "the interior and boundary sides of the single-simplex summation \
         identity agree at every (vertex, level)",
        stokes_bad == 0,
        format!("{} cases, {stokes_bad} failures", 4 * (n as usize - 1)),
    ));

    Ok(checks)
}

/// Nonnegative 4-tuples summing to `total`.
fn corner_offsets(total: i64) -> Vec<lattice::Point> {
    let mut out = Vec::new();
    for a0 in 0..=total {
        for a1 in 0..=(total - a0) {
            for a2 in 0..=(total - a0 - a1) {
                out.push([a0, a1, a2, total - a0 - a1 - a2]);
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Multiplicative suite.

/// A random nondegenerate shape vector (entries bounded away from 0 and 1).
pub fn random_shapes(rng: &mut impl Rng, cols: usize) -> Vec<C64> {
    (0..cols)
        .map(|_| {
            let re = rng.gen_range(-2.0..2.0);
            let im = rng.gen_range(0.2..1.8) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            C64::new(re, im)
        })
        .collect()
}

/// Checks that evaluation through the reduced `(A, B, ε)` system agrees with
/// the direct unreduced product, and that the cusp-row evaluation agrees with
/// the direct holonomy product, on [`SHAPE_SAMPLES`] seeded random shapes.
pub fn verify_multiplicative(setup: &Setup, tolerance: f64) -> Result<Vec<Check>> {
    let n = setup.n;
    let tet_count = setup.tri.tet_count();
    let cols = setup.jc.basis.columns();
    let mut rng = ChaCha8Rng::seed_from_u64(SHAPE_SEED);
    let mut edge_bad = 0usize;
    let mut cusp_bad = 0usize;
    let mut worst_edge = 0.0f64;
    let mut worst_cusp = 0.0f64;
    for _ in 0..SHAPE_SAMPLES {
        let raw = random_shapes(&mut rng, cols);
        let z = extend_shapes(&raw, tet_count, n).map_err(|e| anyhow!("{e:?}"))?;
        let reduced = evaluate_block(&setup.edges, &z).map_err(|e| anyhow!("{e:?}"))?;
        let unreduced = evaluate_unreduced(&setup.exp, &z).map_err(|e| anyhow!("{e:?}"))?;
        for (x, y) in reduced.iter().zip(&unreduced) {
            let rel = (x - y).norm() / y.norm().max(1e-300);
            worst_edge = worst_edge.max(rel);
            if rel > tolerance {
                edge_bad += 1;
            }
        }
        let cusp_vals = evaluate_block(&setup.cusp, &z).map_err(|e| anyhow!("{e:?}"))?;
        for (ci, curve) in setup.curves.iter().enumerate() {
            for r in 1..n {
                let row = ci * (n as usize - 1) + (r as usize - 1);
                let direct =
                    cusp_cocycle_curve(&setup.jc.basis, &setup.tri, &setup.surf, &z, curve, r, n)
                        .map_err(|e| anyhow!("{e:?}"))?;
                let rel = (cusp_vals[row] - direct).norm() / direct.norm().max(1e-300);
                worst_cusp = worst_cusp.max(rel);
                if rel > tolerance {
                    cusp_bad += 1;
                }
            }
        }
    }
    Ok(vec![
        Check::new(
            "mult-reduced-vs-unreduced",
            "the reduced (A, B, sign) evaluation reproduces the direct product \
             over all three shape parameters",
            edge_bad == 0,
            format!(
                "{SHAPE_SAMPLES} samples, worst relative error {worst_edge:.3e} (tolerance {tolerance:.1e})"
            ),
        ),
        Check::new(
            "mult-cusp-vs-holonomy",
            "the cusp rows reproduce the boundary holonomy product",
            cusp_bad == 0,
            format!(
                "{SHAPE_SAMPLES} samples, worst relative error {worst_cusp:.3e} (tolerance {tolerance:.1e})"
            ),
        ),
    ])
}

// ---------------------------------------------------------------------------
// Entry point.

/// Runs every suite and assembles the report.
pub fn run_all(name: &str, setup: &Setup, tolerance: f64) -> Result<crate::format::Report> {
    let mut checks = Vec::new();
    checks.extend(verify_symplectic(setup)?);
    checks.extend(verify_homology(setup)?);
    checks.extend(verify_boundary_maps(setup)?);
    checks.extend(verify_multiplicative(setup, tolerance)?);
    Ok(crate::format::Report::new(name, setup.n, checks))
}

/// Evaluates the full system at a shape vector: per-row residual records for
/// the edge block then the cusp block.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ResidualRecord {
    pub row: String,
    pub residual: [f64; 2],
    pub pass: bool,
}

pub fn residual_report(
    setup: &Setup,
    raw: &[C64],
    tolerance: f64,
) -> Result<Vec<ResidualRecord>> {
    let z = extend_shapes(raw, setup.tri.tet_count(), setup.n).map_err(|e| anyhow!("{e:?}"))?;
    let mut out = Vec::new();
    let edge_vals = evaluate_block(&setup.edges, &z).map_err(|e| anyhow!("{e:?}"))?;
    for (p, v) in edge_vals.iter().enumerate() {
        out.push(ResidualRecord {
            row: format!("edge-{p}"),
            residual: [v.re, v.im],
            pass: (v - C64::new(1.0, 0.0)).norm() <= tolerance,
        });
    }
    let cusp_vals = evaluate_block(&setup.cusp, &z).map_err(|e| anyhow!("{e:?}"))?;
    for (k, v) in cusp_vals.iter().enumerate() {
        let (curve, r) = (k / (setup.n as usize - 1), k % (setup.n as usize - 1) + 1);
        out.push(ResidualRecord {
            row: format!("cusp-{curve}-level-{r}"),
            residual: [v.re, v.im],
            pass: (v - C64::new(1.0, 0.0)).norm() <= tolerance,
        });
    }
    Ok(out)
}

/// Convenience: does every residual pass?
pub fn residuals_pass(records: &[ResidualRecord]) -> bool {
    records.iter().all(|r| r.pass)
}

/// Largest entry of the Smith diagonal, for summaries.
pub fn snf_summary(m: &IntMatrix) -> (usize, Vec<BigInt>) {
    let snf = smith_normal_form(m);
    (snf.rank, snf.diagonal().iter().filter(|d| d.to_i64() != Some(1)).cloned().collect())
}
