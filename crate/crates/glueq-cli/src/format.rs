//! Canonical file formats.
//!
//! * Triangulation file: JSON object
//!   `{"name": string, "tetrahedra": int, "gluings": [[[nbr, [p0,p1,p2,p3]] ×4] ×t],
//!     "curves": optional}`.
//!   The gluing entry at face index `f` of tetrahedron `Δ` names the neighbor
//!   and the vertex-label permutation carrying labels of `Δ` to labels of the
//!   neighbor, with `p[f]` the glued face on the neighbor.
//! * Curves section: one list per boundary component, each curve a list of
//!   segments `[tet, vertex, enter_face, exit_face]`.
//! * Shape-assignment file: JSON map `{"tet,s0s1s2s3": [re, im]}` giving the
//!   ε₀₁ shape per `(tetrahedron, subsimplex)` column.
//! * Matrix export: CSV `row,col,value` triplets or JSON
//!   `{"rows", "cols", "triplets"}`; orderings are documented in the export
//!   header and are deterministic (byte-identical across runs).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use glueq_core::cusp::{BoundaryCurve, CurveSegment};
use glueq_core::gluing::C64;
use glueq_core::lattice::{subsimplices, Point};
use glueq_core::matrix::IntMatrix;
use glueq_core::perm::Perm;
use glueq_core::{Gluing, Triangulation};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

// ---------------------------------------------------------------------------
// Triangulation files.

/// One face pairing as stored on disk: `[neighbor, [p0, p1, p2, p3]]`.
pub type GluingEntry = (usize, [u8; 4]);

/// One curve segment as stored on disk: `[tet, vertex, enter_face, exit_face]`.
pub type SegmentEntry = [i64; 4];

/// The canonical triangulation file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TriangulationFile {
    pub name: String,
    pub tetrahedra: usize,
    pub gluings: Vec<[GluingEntry; 4]>,
    /// Peripheral curves, one list per boundary component.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curves: Option<Vec<Vec<Vec<SegmentEntry>>>>,
    /// How the file was produced (free-form provenance note).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derivation: Option<String>,
}

impl TriangulationFile {
    pub fn parse(text: &str) -> Result<TriangulationFile> {
        let file: TriangulationFile =
            serde_json::from_str(text).context("malformed triangulation JSON")?;
        if file.gluings.len() != file.tetrahedra {
            bail!(
                "triangulation {:?}: {} gluing rows for {} tetrahedra",
                file.name,
                file.gluings.len(),
                file.tetrahedra
            );
        }
        Ok(file)
    }

    /// Validates and builds the core triangulation.
    pub fn triangulation(&self) -> Result<Triangulation> {
        let mut table = Vec::with_capacity(self.tetrahedra);
        for row in &self.gluings {
            let mut entry = [None; 4];
            for (f, &(neighbor, p)) in row.iter().enumerate() {
                let perm: Perm = p;
                entry[f] = Some(Gluing { neighbor, perm });
            }
            table.push(entry);
        }
        Triangulation::new(table)
            .map_err(|e| anyhow!("invalid triangulation {:?}: {e:?}", self.name))
    }

    /// The curves section decoded per component (if present).
    pub fn curve_families(&self) -> Result<Option<Vec<Vec<BoundaryCurve>>>> {
        let Some(families) = &self.curves else {
            return Ok(None);
        };
        let mut out = Vec::with_capacity(families.len());
        for family in families {
            let mut list = Vec::with_capacity(family.len());
            for segments in family {
                list.push(decode_curve(segments)?);
            }
            out.push(list);
        }
        Ok(Some(out))
    }
}

pub fn decode_curve(segments: &[SegmentEntry]) -> Result<BoundaryCurve> {
    let mut out = Vec::with_capacity(segments.len());
    for &[tet, vertex, enter, exit] in segments {
        if tet < 0 || !(0..4).contains(&vertex) || !(0..4).contains(&enter) || !(0..4).contains(&exit) {
            bail!("curve segment [{tet}, {vertex}, {enter}, {exit}] out of range");
        }
        out.push(CurveSegment {
            tet: tet as usize,
            vertex: vertex as u8,
            enter: enter as u8,
            exit: exit as u8,
        });
    }
    Ok(BoundaryCurve { segments: out })
}

/// Encodes a curve back to its file form.
pub fn encode_curve(curve: &BoundaryCurve) -> Vec<SegmentEntry> {
    curve
        .segments
        .iter()
        .map(|s| [s.tet as i64, i64::from(s.vertex), i64::from(s.enter), i64::from(s.exit)])
        .collect()
}

/// A standalone curves file: either a bare per-component array or an object
/// with a `"curves"` field in the same schema as the triangulation file.
pub fn parse_curves_file(text: &str) -> Result<Vec<Vec<Vec<SegmentEntry>>>> {
    #[derive(Deserialize)]
    struct Wrapper {
        curves: Vec<Vec<Vec<SegmentEntry>>>,
    }
    if let Ok(w) = serde_json::from_str::<Wrapper>(text) {
        return Ok(w.curves);
    }
    serde_json::from_str(text).context("malformed curves JSON")
}

/// Resolves the peripheral curves to use: an explicit `--curves` file wins,
/// then the triangulation file's own section, then the computed homology
/// basis. Supplied curves are validated ("normalized") before use. Returns
/// the flat list (component-major).
pub fn resolve_curves(
    tri: &Triangulation,
    surf: &glueq_core::cusp::CuspSurface,
    file: &TriangulationFile,
    override_text: Option<&str>,
) -> Result<Vec<BoundaryCurve>> {
    let families: Vec<Vec<BoundaryCurve>> = if let Some(text) = override_text {
        parse_curves_file(text)?
            .iter()
            .map(|family| family.iter().map(|c| decode_curve(c)).collect())
            .collect::<Result<_>>()?
    } else if let Some(families) = file.curve_families()? {
        families
    } else {
        glueq_core::cusp::homology_basis_curves(tri, surf)
            .map_err(|e| anyhow!("homology basis curves: {e:?}"))?
    };
    let curves: Vec<BoundaryCurve> = families.into_iter().flatten().collect();
    for (k, curve) in curves.iter().enumerate() {
        curve
            .validate(tri)
            .map_err(|e| anyhow!("curve {k} invalid: {e:?}"))?;
    }
    Ok(curves)
}

// ---------------------------------------------------------------------------
// Shape-assignment files.

/// The key of the shape at subsimplex `s` of tetrahedron `tet`:
/// `"tet,s0s1s2s3"` with the coordinates as concatenated digits
/// (space-separated if any coordinate exceeds 9).
pub fn shape_key(tet: usize, s: Point) -> String {
    let digits: String = if s.iter().all(|&x| (0..10).contains(&x)) {
        s.iter().map(|x| x.to_string()).collect()
    } else {
        s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
    };
    format!("{tet},{digits}")
}

fn parse_shape_key(key: &str) -> Result<(usize, Point)> {
    let (tet, rest) = key
        .split_once(',')
        .ok_or_else(|| anyhow!("shape key {key:?}: expected \"tet,s0s1s2s3\""))?;
    let tet: usize = tet.trim().parse().context("shape key tetrahedron index")?;
    let rest = rest.trim();
    let coords: Vec<i64> = if rest.contains(' ') {
        rest.split_whitespace()
            .map(|x| x.parse::<i64>().context("shape key coordinate"))
            .collect::<Result<_>>()?
    } else {
        rest.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(i64::from)
                    .ok_or_else(|| anyhow!("shape key {key:?}: bad digit {c:?}"))
            })
            .collect::<Result<_>>()?
    };
    if coords.len() != 4 {
        bail!("shape key {key:?}: expected 4 coordinates");
    }
    Ok((tet, [coords[0], coords[1], coords[2], coords[3]]))
}

/// Parses a shape file into the column-ordered raw `z` vector
/// (tetrahedron-major, subsimplices in lexicographic order). Every column
/// must be present exactly once.
pub fn parse_shapes(text: &str, tet_count: usize, n: i64) -> Result<Vec<C64>> {
    let raw: BTreeMap<String, [f64; 2]> =
        serde_json::from_str(text).context("malformed shape JSON")?;
    let subs = subsimplices(n).map_err(|e| anyhow!("{e:?}"))?;
    let mut index: BTreeMap<(usize, Point), usize> = BTreeMap::new();
    for tet in 0..tet_count {
        for (k, &s) in subs.iter().enumerate() {
            index.insert((tet, s), tet * subs.len() + k);
        }
    }
    let mut out = vec![None; tet_count * subs.len()];
    for (key, [re, im]) in &raw {
        let (tet, s) = parse_shape_key(key)?;
        let col = *index
            .get(&(tet, s))
            .ok_or_else(|| anyhow!("shape key {key:?} is not a (tetrahedron, subsimplex) of this system"))?;
        if out[col].replace(C64::new(*re, *im)).is_some() {
            bail!("duplicate shape key {key:?}");
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(col, z)| z.ok_or_else(|| anyhow!("missing shape for column {col}")))
        .collect()
}

/// Serializes a column-ordered shape vector to the file format.
pub fn shapes_to_json(z: &[C64], tet_count: usize, n: i64) -> Result<String> {
    let subs = subsimplices(n).map_err(|e| anyhow!("{e:?}"))?;
    let mut map = BTreeMap::new();
    for tet in 0..tet_count {
        for (k, &s) in subs.iter().enumerate() {
            let v = z[tet * subs.len() + k];
            map.insert(shape_key(tet, s), [v.re, v.im]);
        }
    }
    Ok(serde_json::to_string_pretty(&map)?)
}

// ---------------------------------------------------------------------------
// Matrix export.

/// JSON form of a sparse integer matrix: dimensions plus sorted
/// `(row, col, value)` triplets (values as decimal strings).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub triplets: Vec<(usize, usize, String)>,
}

impl MatrixJson {
    pub fn of(m: &IntMatrix) -> MatrixJson {
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            triplets: m
                .triplets()
                .map(|(r, c, v)| (r, c, v.to_string()))
                .collect(),
        }
    }

    pub fn matrix(&self) -> Result<IntMatrix> {
        let mut m = IntMatrix::zero(self.rows, self.cols);
        for (r, c, v) in &self.triplets {
            if *r >= self.rows || *c >= self.cols {
                bail!("triplet ({r}, {c}) out of bounds {}x{}", self.rows, self.cols);
            }
            let value: BigInt = v.parse().map_err(|_| anyhow!("bad entry {v:?}"))?;
            m.set(*r, *c, value);
        }
        Ok(m)
    }
}

/// CSV export with a `#`-prefixed header documenting the orderings.
pub fn matrix_to_csv(name: &str, ordering: &str, m: &IntMatrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# matrix {name} rows={} cols={} ({ordering})", m.rows(), m.cols());
    out.push_str("row,col,value\n");
    for (r, c, v) in m.triplets() {
        let _ = writeln!(out, "{r},{c},{v}");
    }
    out
}

/// Parses either the JSON or the CSV matrix export.
pub fn parse_matrix(text: &str) -> Result<IntMatrix> {
    if let Ok(json) = serde_json::from_str::<MatrixJson>(text) {
        return json.matrix();
    }
    let mut triplets = Vec::new();
    let mut max_row = 0usize;
    let mut max_col = 0usize;
    let mut declared: Option<(usize, usize)> = None;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line == "row,col,value" {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            // Header comment; pick up declared dimensions when present.
            let mut rows = None;
            let mut cols = None;
            for token in rest.split_whitespace() {
                if let Some(v) = token.strip_prefix("rows=") {
                    rows = v.parse().ok();
                }
                if let Some(v) = token.strip_prefix("cols=") {
                    cols = v.parse().ok();
                }
            }
            if let (Some(r), Some(c)) = (rows, cols) {
                declared = Some((r, c));
            }
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 3 {
            bail!("bad CSV line {line:?}");
        }
        let r: usize = parts[0].trim().parse().context("CSV row")?;
        let c: usize = parts[1].trim().parse().context("CSV col")?;
        let v: BigInt = parts[2].trim().parse().map_err(|_| anyhow!("CSV value {:?}", parts[2]))?;
        max_row = max_row.max(r + 1);
        max_col = max_col.max(c + 1);
        triplets.push((r, c, v));
    }
    let (rows, cols) = declared.unwrap_or((max_row, max_col));
    let mut m = IntMatrix::zero(rows, cols);
    for (r, c, v) in triplets {
        if r >= rows || c >= cols {
            bail!("triplet ({r}, {c}) exceeds declared dimensions {rows}x{cols}");
        }
        m.set(r, c, v);
    }
    Ok(m)
}

// ---------------------------------------------------------------------------
// Reports.

/// One verification check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    /// The statement being checked, in words.
    #[serde(rename = "ref")]
    pub reference: String,
    /// `"pass"` or `"fail"`.
    pub status: String,
    pub details: String,
}

impl Check {
    pub fn new(id: &str, reference: &str, pass: bool, details: String) -> Check {
        Check {
            id: id.to_string(),
            reference: reference.to_string(),
            status: if pass { "pass" } else { "fail" }.to_string(),
            details,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

/// The per-(triangulation, n) verification report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub triangulation: String,
    pub n: i64,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl Report {
    pub fn new(triangulation: &str, n: i64, checks: Vec<Check>) -> Report {
        let pass = checks.iter().all(Check::passed);
        Report {
            triangulation: triangulation.to_string(),
            n,
            checks,
            pass,
        }
    }
}

/// Serializes any value as pretty JSON with a trailing newline
/// (deterministic: all maps are ordered).
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}
