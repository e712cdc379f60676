//! Acceptance gate: one test (and one printed pass/fail line) per criterion.
//!
//! Every criterion runs on the bundled corpus (the two 2-tetrahedron census
//! triangulations and the 4-tetrahedron Whitehead-link triangulation) by
//! exact integer computation; the floating-point criteria pin their
//! tolerances as constants below.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

use glueq_cli::format::{resolve_curves, Check, TriangulationFile};
use glueq_cli::newton::{newton_solve, DEFAULT_START};
use glueq_cli::verify::{
    self, residual_report, residuals_pass, verify_boundary_maps, verify_chain_identities,
    verify_homology, verify_multiplicative, verify_symplectic, Setup,
};
use glueq_core::cusp::CuspSurface;
use glueq_core::gluing::C64;
use glueq_core::jcomplex::{omega_pairing, stokes_sides};
use glueq_core::matrix::rank;
use num_traits::Zero;

/// Relative tolerance of the multiplicative-consistency criterion.
const TOL_MULTIPLICATIVE: f64 = 1e-10;
/// Residual tolerance of the complete-solution criterion.
const TOL_COMPLETE: f64 = 1e-12;
/// Tolerance when comparing the recovered shape to the exact regular value.
const TOL_SHAPE: f64 = 1e-10;

fn corpus(name: &str) -> TriangulationFile {
    let path = format!("{}/../../corpus/{name}.json", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("reading {path}: {e}"));
    TriangulationFile::parse(&text).expect("corpus file parses")
}

type SetupCache = Mutex<BTreeMap<(String, i64), Arc<Setup>>>;

fn setup(name: &str, n: i64) -> Arc<Setup> {
    static CACHE: OnceLock<SetupCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    if let Some(s) = cache.lock().unwrap().get(&(name.to_string(), n)) {
        return Arc::clone(s);
    }
    let file = corpus(name);
    let tri = file.triangulation().expect("valid gluing table");
    let surf = CuspSurface::new(&tri).expect("cusp surface");
    let curves = resolve_curves(&tri, &surf, &file, None).expect("peripheral curves");
    let s = Arc::new(Setup::new(&tri, n, curves).expect("setup"));
    cache
        .lock()
        .unwrap()
        .insert((name.to_string(), n), Arc::clone(&s));
    s
}

/// The full boundary-map suite is the most expensive; cache it per input so
/// the criteria sharing its checks do not recompute it.
fn boundary_suite(name: &str, n: i64) -> Arc<Vec<Check>> {
    type SuiteCache = Mutex<BTreeMap<(String, i64), Arc<Vec<Check>>>>;
    static CACHE: OnceLock<SuiteCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    if let Some(s) = cache.lock().unwrap().get(&(name.to_string(), n)) {
        return Arc::clone(s);
    }
    let checks = Arc::new(verify_boundary_maps(&setup(name, n)).expect("boundary suite"));
    cache
        .lock()
        .unwrap()
        .insert((name.to_string(), n), Arc::clone(&checks));
    checks
}

fn collect(failures: &mut Vec<String>, name: &str, n: i64, checks: &[Check], ids: &[&str]) {
    for c in checks {
        if ids.contains(&c.id.as_str()) && !c.passed() {
            failures.push(format!("{name} n={n} {}: {}", c.id, c.details));
        }
    }
}

fn conclude(criterion: &str, summary: &str, failures: Vec<String>) {
    let verdict = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!("[{verdict}] {criterion}: {summary}");
    for f in &failures {
        println!("        {f}");
    }
    assert!(failures.is_empty(), "{criterion} failed:\n{}", failures.join("\n"));
}

#[test]
fn criterion_1_rank_values() {
    let mut failures = Vec::new();
    for (n, want_p, want_rank) in [(2, 2, 1), (3, 8, 6), (4, 20, 17), (5, 40, 36)] {
        let s = setup("m004", n);
        let p = s.jc.classes.p();
        let ab = s.edges.a.hcat(&s.edges.b).unwrap();
        let r = rank(&ab);
        if p != want_p || r != want_rank {
            failures.push(format!(
                "m004 n={n}: P = {p} (expected {want_p}), rank(A|B) = {r} (expected {want_rank})"
            ));
        }
    }
    for n in 2..=4i64 {
        let s = setup("m129", n);
        let p = s.jc.classes.p();
        let ab = s.edges.a.hcat(&s.edges.b).unwrap();
        let r = rank(&ab);
        let want = p - 2 * (n as usize - 1);
        if r != want {
            failures.push(format!(
                "m129 n={n}: rank(A|B) = {r}, expected P − 2(n−1) = {want} (P = {p})"
            ));
        }
    }
    conclude(
        "criterion-1",
        "exact ranks of the combined exponent matrix on both cusped inputs",
        failures,
    );
}

#[test]
fn criterion_2_symplectic() {
    let mut failures = Vec::new();
    for name in ["m004", "m129"] {
        for n in 2..=4i64 {
            let checks = verify_symplectic(&setup(name, n)).expect("symplectic suite");
            for c in &checks {
                if !c.passed() {
                    failures.push(format!("{name} n={n} {}: {}", c.id, c.details));
                }
            }
        }
    }
    conclude(
        "criterion-2",
        "symplectic orthogonality of all row pairs and cusp–cusp pairing values",
        failures,
    );
}

#[test]
fn criterion_3_homology() {
    let mut failures = Vec::new();
    for name in ["m004", "m129"] {
        for n in 2..=5i64 {
            let checks = verify_homology(&setup(name, n)).expect("homology suite");
            for c in &checks {
                if !c.passed() {
                    failures.push(format!("{name} n={n} {}: {}", c.id, c.details));
                }
            }
        }
    }
    conclude(
        "criterion-3",
        "all five homology groups of the chain complex on both cusped inputs, n = 2..5",
        failures,
    );
}

#[test]
fn criterion_4_chain_identities() {
    let mut failures = Vec::new();
    for name in ["m003", "m004", "m129"] {
        for n in 2..=5i64 {
            let checks = verify_chain_identities(&setup(name, n)).expect("chain identities");
            collect(
                &mut failures,
                name,
                n,
                &checks,
                &["chain-compositions", "adjoint-beta", "boundary-squared"],
            );
        }
    }
    conclude(
        "criterion-4",
        "chain compositions vanish, beta* is the symplectic adjoint of beta, \
         and the boundary squares to zero on all three cellulations (three \
         triangulations, n = 2..5)",
        failures,
    );
}

#[test]
fn criterion_5_relations() {
    let mut failures = Vec::new();
    for name in ["m004", "m129"] {
        for n in 2..=4i64 {
            let checks = boundary_suite(name, n);
            collect(
                &mut failures,
                name,
                n,
                &checks,
                &["quad-relations", "hexagon-relations", "stokes"],
            );
        }
    }
    // The single-simplex summation identity is triangulation-independent;
    // extend it to n = 5.
    for i in 0..4u8 {
        for r in 1..5i64 {
            let (lhs, rhs) = stokes_sides(5, i, r).expect("stokes sides");
            if lhs != rhs {
                failures.push(format!("stokes n=5 vertex={i} level={r}: sides differ"));
            }
        }
    }
    conclude(
        "criterion-5",
        "quad and hexagon relations lie in Im(beta*) with verified preimages; \
         summation identity holds through n = 5",
        failures,
    );
}

#[test]
fn criterion_6_cusp_maps() {
    let mut failures = Vec::new();
    for name in ["m004", "m129"] {
        for n in 2..=4i64 {
            let checks = boundary_suite(name, n);
            collect(
                &mut failures,
                name,
                n,
                &checks,
                &["adjoint-delta-gamma", "delta-into-kernel", "near-far", "level-scaling"],
            );
        }
    }
    conclude(
        "criterion-6",
        "delta/gamma adjointness, near–far composition D·A·D on peripheral \
         homology, and the level scaling between the two cusp maps",
        failures,
    );
}

#[test]
fn criterion_7_multiplicative() {
    let mut failures = Vec::new();
    for name in ["m003", "m004", "m129"] {
        for n in 2..=4i64 {
            let checks = verify_multiplicative(&setup(name, n), TOL_MULTIPLICATIVE)
                .expect("multiplicative suite");
            for c in &checks {
                if !c.passed() {
                    failures.push(format!("{name} n={n} {}: {}", c.id, c.details));
                }
            }
        }
    }

    // Newton from the committed start must land on the regular ideal shape
    // and solve every equation to the complete-solution tolerance.
    let s = setup("m004", 2);
    let cols = s.jc.basis.columns();
    let start = vec![DEFAULT_START; cols];
    match newton_solve(&[&s.edges, &s.cusp], s.tri.tet_count(), 2, &start, 100) {
        Ok(z) => {
            let regular = C64::new(0.5, 0.75f64.sqrt());
            for (k, zk) in z.iter().enumerate() {
                if (zk - regular).norm() > TOL_SHAPE {
                    failures.push(format!(
                        "m004 n=2 shape {k} = {zk} is not the regular value {regular}"
                    ));
                }
            }
            let records = residual_report(&s, &z, TOL_COMPLETE).expect("residuals");
            if !residuals_pass(&records) {
                for r in records.iter().filter(|r| !r.pass) {
                    failures.push(format!(
                        "m004 n=2 {}: residual ({:.3e}, {:.3e}) misses 1 beyond {TOL_COMPLETE:.0e}",
                        r.row, r.residual[0], r.residual[1]
                    ));
                }
            }
        }
        Err(e) => failures.push(format!("m004 n=2 newton failed: {e:#}")),
    }
    conclude(
        "criterion-7",
        &format!(
            "{} random shape samples per input agree through both evaluation \
             paths (relative tolerance {TOL_MULTIPLICATIVE:.0e}); the recovered \
             complete solution satisfies every equation to {TOL_COMPLETE:.0e}",
            verify::SHAPE_SAMPLES
        ),
        failures,
    );
}

#[test]
fn criterion_8_n2_regression() {
    let mut failures = Vec::new();
    let s = setup("m004", 2);
    let ab = s.edges.a.hcat(&s.edges.b).unwrap();
    if (ab.rows(), ab.cols()) != (2, 4) {
        failures.push(format!("(A|B) is {}x{}, expected 2x4", ab.rows(), ab.cols()));
    }
    if rank(&ab) != 1 {
        failures.push(format!("rank(A|B) = {}, expected 1", rank(&ab)));
    }

    // A basis of the gluing rows (one row) extended by one cusp row must have
    // full rank, and the two rows must be symplectically orthogonal.
    let gluing_row = (0..s.jc.classes.p())
        .map(|p| s.edges.j_row(p))
        .find(|r| r.iter().any(|v| !v.is_zero()))
        .expect("a nonzero gluing row");
    let cusp_row = s.cusp.j_row(0);
    let mut stacked = glueq_core::matrix::IntMatrix::zero(2, gluing_row.len());
    for (c, v) in gluing_row.iter().enumerate() {
        stacked.set(0, c, v.clone());
    }
    for (c, v) in cusp_row.iter().enumerate() {
        stacked.set(1, c, v.clone());
    }
    if rank(&stacked) != 2 {
        failures.push(format!(
            "gluing row basis plus one cusp row has rank {}, expected 2",
            rank(&stacked)
        ));
    }
    let pairing = omega_pairing(&gluing_row, &cusp_row).unwrap();
    if !pairing.is_zero() {
        failures.push(format!("gluing and cusp rows pair to {pairing}, expected 0"));
    }
    conclude(
        "criterion-8",
        "the n = 2 system on the 2-tetrahedron knot complement: 2x4 combined \
         matrix of rank 1, completed to rank 2 by one cusp row, with \
         orthogonal rows",
        failures,
    );
}
