//! `glueq` — generate, export, evaluate, and verify the generalized
//! gluing-equation matrices of oriented ideal triangulations.
//!
//! Exit codes: 0 success, 1 verification failure, 2 parse/usage error.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use glueq_core::cusp::CuspSurface;
use glueq_core::matrix::smith_normal_form;
use glueq_core::mhat::h1_manifold;
use glueq_core::Triangulation;
use num_traits::ToPrimitive;
use serde_json::json;

use glueq_cli::format::{
    self, matrix_to_csv, parse_matrix, to_json_string, MatrixJson, Report, TriangulationFile,
};
use glueq_cli::verify::{self, Setup};

/// Documented deterministic orderings, repeated in every export.
const ROW_ORDER: &str =
    "rows = non-vertex integral point classes: edge < face < interior, then smallest (tet, point)";
const COL_ORDER: &str =
    "cols = (tetrahedron, subsimplex) pairs, tetrahedron-major, subsimplices lexicographic";
const CUSP_ROW_ORDER: &str = "rows = (curve, level) pairs, curve-major, levels r = 1..n-1";

#[derive(Parser)]
#[command(name = "glueq", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Combinatorial summary: cells, boundary components, first homology.
    Info { file: PathBuf },
    /// The integral point classes indexing the gluing-equation rows.
    Points {
        file: PathBuf,
        #[arg(short)]
        n: i64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// The exponent matrices A, B with signs, plus the cusp blocks.
    Matrices {
        file: PathBuf,
        #[arg(short)]
        n: i64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Peripheral curves file overriding the triangulation file's section.
        #[arg(long)]
        curves: Option<PathBuf>,
    },
    /// The cusp-equation block only.
    CuspMatrices {
        file: PathBuf,
        #[arg(short)]
        n: i64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        curves: Option<PathBuf>,
    },
    /// The homology groups of the chain complex, one row per degree.
    Homology {
        file: PathBuf,
        /// Single value `N` or inclusive range `A..B`.
        #[arg(short)]
        n: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run the full verification suite and write a report.
    Verify {
        file: PathBuf,
        /// Single value `N` or inclusive range `A..B`.
        #[arg(short, default_value = "2..3")]
        n: String,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        curves: Option<PathBuf>,
        /// Relative tolerance of the floating-point (multiplicative) checks.
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
    },
    /// Evaluate all equations at a shape assignment.
    Eval {
        file: PathBuf,
        /// Shape-assignment JSON: {"tet,s0s1s2s3": [re, im]}.
        shapes: PathBuf,
        #[arg(short)]
        n: i64,
        #[arg(long)]
        curves: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
    },
    /// Smith normal form of an exported matrix file (JSON or CSV).
    Snf {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn parse_n_range(text: &str) -> Result<Vec<i64>> {
    if let Some((a, b)) = text.split_once("..") {
        let a: i64 = a.trim().parse().context("range start")?;
        let b: i64 = b.trim().parse().context("range end")?;
        if a < 2 || b < a {
            bail!("bad n range {text:?} (need 2 <= A <= B)");
        }
        Ok((a..=b).collect())
    } else {
        let n: i64 = text.trim().parse().context("n value")?;
        if n < 2 {
            bail!("n must be at least 2");
        }
        Ok(vec![n])
    }
}

fn load(path: &PathBuf) -> Result<(TriangulationFile, Triangulation)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file = TriangulationFile::parse(&text)?;
    let tri = file.triangulation()?;
    Ok((file, tri))
}

fn build_setup(
    file: &TriangulationFile,
    tri: &Triangulation,
    n: i64,
    curves: &Option<PathBuf>,
) -> Result<Setup> {
    let surf = CuspSurface::new(tri).map_err(|e| anyhow!("{e:?}"))?;
    let override_text = match curves {
        Some(path) => Some(
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        ),
        None => None,
    };
    let curves = format::resolve_curves(tri, &surf, file, override_text.as_deref())?;
    Setup::new(tri, n, curves)
}

fn group_json(g: &glueq_core::homology::AbelianGroup) -> serde_json::Value {
    json!({
        "rank": g.rank,
        "torsion": g.torsion.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
    })
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Info { file } => {
            let (file, tri) = load(&file)?;
            let cells = tri.cell_classes();
            let profile = tri.boundary_profile().map_err(|e| anyhow!("{e:?}"))?;
            let h1 = h1_manifold(&tri);
            let out = json!({
                "name": file.name,
                "tetrahedra": tri.tet_count(),
                "cells": {"vertices": cells.v(), "edges": cells.e(), "faces": cells.f()},
                "boundary": {
                    "components": profile.c,
                    "h": profile.h,
                    "genus": profile.components.iter().map(|c| c.genus).collect::<Vec<_>>(),
                },
                "h1_manifold": group_json(&h1),
                "curves_in_file": file.curves.is_some(),
            });
            print!("{}", to_json_string(&out)?);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Points { file, n, format } => {
            let (_, tri) = load(&file)?;
            let classes =
                glueq_core::lattice::point_classes(&tri, n).map_err(|e| anyhow!("{e:?}"))?;
            match format {
                Format::Json => {
                    let rows: Vec<_> = classes
                        .classes
                        .iter()
                        .enumerate()
                        .map(|(k, c)| {
                            json!({
                                "index": k,
                                "kind": format!("{:?}", c.kind).to_lowercase(),
                                "type": c.type_signature,
                                "members": c.members.iter()
                                    .map(|(tet, t)| json!([tet, t]))
                                    .collect::<Vec<_>>(),
                            })
                        })
                        .collect();
                    let out = json!({"n": n, "ordering": ROW_ORDER, "classes": rows});
                    print!("{}", to_json_string(&out)?);
                }
                Format::Csv => {
                    let mut out = String::new();
                    writeln!(out, "# integral point classes, n={n} ({ROW_ORDER})")?;
                    out.push_str("index,kind,members\n");
                    for (k, c) in classes.classes.iter().enumerate() {
                        writeln!(
                            out,
                            "{k},{},{}",
                            format!("{:?}", c.kind).to_lowercase(),
                            c.members.len()
                        )?;
                    }
                    print!("{out}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Matrices {
            file,
            n,
            format,
            curves,
        } => {
            let (tfile, tri) = load(&file)?;
            let setup = build_setup(&tfile, &tri, n, &curves)?;
            emit_blocks(&tfile.name, &setup, format, true)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::CuspMatrices {
            file,
            n,
            format,
            curves,
        } => {
            let (tfile, tri) = load(&file)?;
            let setup = build_setup(&tfile, &tri, n, &curves)?;
            emit_blocks(&tfile.name, &setup, format, false)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Homology { file, n, format } => {
            let (tfile, tri) = load(&file)?;
            let mut rows = Vec::new();
            for n in parse_n_range(&n)? {
                let jc = glueq_core::jcomplex::JComplex::new(&tri, n)
                    .map_err(|e| anyhow!("{e:?}"))?;
                let groups = verify::complex_homology(&jc)?;
                rows.push((n, groups));
            }
            match format {
                Format::Json => {
                    let out = json!({
                        "triangulation": tfile.name,
                        "homology": rows.iter().map(|(n, groups)| json!({
                            "n": n,
                            "groups": groups.iter().enumerate().map(|(k, g)| {
                                (format!("H{}", k + 1), group_json(g))
                            }).collect::<serde_json::Map<_, _>>(),
                        })).collect::<Vec<_>>(),
                    });
                    print!("{}", to_json_string(&out)?);
                }
                Format::Csv => {
                    let mut out = String::from("n,degree,rank,torsion\n");
                    for (n, groups) in &rows {
                        for (k, g) in groups.iter().enumerate() {
                            let tors: Vec<String> =
                                g.torsion.iter().map(|d| d.to_string()).collect();
                            writeln!(out, "{n},{},{},{}", k + 1, g.rank, tors.join(" "))?;
                        }
                    }
                    print!("{out}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify {
            file,
            n,
            report,
            curves,
            tolerance,
        } => {
            let (tfile, tri) = load(&file)?;
            let ns = parse_n_range(&n)?;
            // Independent n values run in parallel; printing and report
            // assembly stay serialized in n order.
            let results: Vec<Result<(Report, f64)>> = std::thread::scope(|scope| {
                let handles: Vec<_> = ns
                    .iter()
                    .map(|&n| {
                        let (tfile, tri, curves) = (&tfile, &tri, &curves);
                        scope.spawn(move || {
                            let started = std::time::Instant::now();
                            let setup = build_setup(tfile, tri, n, curves)?;
                            let rep = verify::run_all(&tfile.name, &setup, tolerance)?;
                            Ok((rep, started.elapsed().as_secs_f64()))
                        })
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
            });
            let mut reports: Vec<Report> = Vec::new();
            for (n, result) in ns.iter().zip(results) {
                let (rep, elapsed) = result?;
                for check in &rep.checks {
                    println!(
                        "[{}] n={n} {}: {}",
                        if check.passed() { "pass" } else { "FAIL" },
                        check.id,
                        check.details
                    );
                }
                println!("n={n} verified in {elapsed:.2}s");
                reports.push(rep);
            }
            let all_pass = reports.iter().all(|r| r.pass);
            if let Some(path) = report {
                fs::write(&path, to_json_string(&reports)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            println!("overall: {}", if all_pass { "pass" } else { "FAIL" });
            Ok(if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Cmd::Eval {
            file,
            shapes,
            n,
            curves,
            tolerance,
        } => {
            let (tfile, tri) = load(&file)?;
            let setup = build_setup(&tfile, &tri, n, &curves)?;
            let text = fs::read_to_string(&shapes)
                .with_context(|| format!("reading {}", shapes.display()))?;
            let raw = format::parse_shapes(&text, tri.tet_count(), n)?;
            let records = verify::residual_report(&setup, &raw, tolerance)?;
            print!("{}", to_json_string(&records)?);
            Ok(if verify::residuals_pass(&records) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Cmd::Snf { file, format } => {
            let text = fs::read_to_string(&file)
                .with_context(|| format!("reading {}", file.display()))?;
            let m = parse_matrix(&text)?;
            let snf = smith_normal_form(&m);
            match format {
                Format::Json => {
                    let out = json!({
                        "rows": m.rows(),
                        "cols": m.cols(),
                        "rank": snf.rank,
                        "diagonal": snf.diagonal().iter().map(|d| d.to_string()).collect::<Vec<_>>(),
                        "invariant_factors": snf.diagonal().iter()
                            .filter(|d| d.to_i64() != Some(1))
                            .map(|d| d.to_string()).collect::<Vec<_>>(),
                    });
                    print!("{}", to_json_string(&out)?);
                }
                Format::Csv => {
                    let mut out = format!(
                        "# smith normal form rows={} cols={} rank={}\n",
                        m.rows(),
                        m.cols(),
                        snf.rank
                    );
                    out.push_str("index,value\n");
                    for (k, d) in snf.diagonal().iter().enumerate() {
                        writeln!(out, "{k},{d}")?;
                    }
                    print!("{out}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Prints the equation blocks; `with_edges` selects the full export or the
/// cusp block alone.
fn emit_blocks(name: &str, setup: &Setup, format: Format, with_edges: bool) -> Result<()> {
    match format {
        Format::Json => {
            let mut out = serde_json::Map::new();
            out.insert("triangulation".into(), json!(name));
            out.insert("n".into(), json!(setup.n));
            out.insert("column_order".into(), json!(COL_ORDER));
            if with_edges {
                out.insert(
                    "edges".into(),
                    json!({
                        "row_order": ROW_ORDER,
                        "A": MatrixJson::of(&setup.edges.a),
                        "B": MatrixJson::of(&setup.edges.b),
                        "eps": setup.edges.eps,
                    }),
                );
            }
            out.insert(
                "cusp".into(),
                json!({
                    "row_order": CUSP_ROW_ORDER,
                    "A": MatrixJson::of(&setup.cusp.a),
                    "B": MatrixJson::of(&setup.cusp.b),
                    "eps": setup.cusp.eps,
                }),
            );
            print!("{}", to_json_string(&serde_json::Value::Object(out))?);
        }
        Format::Csv => {
            let mut text = String::new();
            writeln!(text, "# triangulation {name} n={setup_n}", setup_n = setup.n)?;
            writeln!(text, "# {COL_ORDER}")?;
            if with_edges {
                writeln!(text, "# {ROW_ORDER}")?;
                text.push_str(&matrix_to_csv("A", ROW_ORDER, &setup.edges.a));
                text.push_str(&matrix_to_csv("B", ROW_ORDER, &setup.edges.b));
                text.push_str("# signs eps\nrow,value\n");
                for (r, e) in setup.edges.eps.iter().enumerate() {
                    writeln!(text, "{r},{e}")?;
                }
            }
            text.push_str(&matrix_to_csv("A_cusp", CUSP_ROW_ORDER, &setup.cusp.a));
            text.push_str(&matrix_to_csv("B_cusp", CUSP_ROW_ORDER, &setup.cusp.b));
            text.push_str("# signs eps_cusp\nrow,value\n");
            for (r, e) in setup.cusp.eps.iter().enumerate() {
                writeln!(text, "{r},{e}")?;
            }
            print!("{text}");
        }
    }
    Ok(())
}
