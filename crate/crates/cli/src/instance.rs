//! The JSON instance format: a backend and field declaration, an
//! optional curve, named payload values, and one request. Scalars are
//! integers in `[0, p)` over prime fields and `"a/b"` strings over the
//! rationals; splitting types are sorted integer arrays; gluing matrices
//! are row-major; dual-number module maps are matrices on the standard
//! underlying basis (free generators, then their `e`-multiples, then the
//! socle lines).

use anyhow::{anyhow, bail, Context, Result};
use excat_core::backend::forms::FormMat;
use excat_core::backend::{Backend, ExactStructure, Mor, MorData, Obj};
use excat_core::complex::{ChainMap, Complex};
use excat_core::curve::{descend, NodalCurve, P1Point};
use excat_core::field::{parse_scalar, Field, Scalar};
use excat_core::matrix::Matrix;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceDocument {
    pub schema_version: String,
    pub backend: BackendSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveSpec>,
    #[serde(default)]
    pub payload: PayloadSpec,
    pub request: RequestSpec,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BackendSpec {
    pub kind: String,
    pub field: FieldSpec,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Prime { q: u64 },
    Name(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveSpec {
    /// Node list: pairs of points `[s, t]` of the line to identify.
    pub nodes: Vec<[[ScalarRepr; 2]; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarRepr {
    Int(i64),
    Str(String),
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct PayloadSpec {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub objects: BTreeMap<String, ObjectSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub morphisms: BTreeMap<String, MorphismSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub complexes: BTreeMap<String, ComplexSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub chain_maps: BTreeMap<String, ChainMapSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ObjectSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub socle: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub splitting: Option<Vec<i64>>,
    /// One invertible row-major matrix per node, for the nodal backend.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gluings: Option<Vec<Vec<Vec<ScalarRepr>>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MorphismSpec {
    pub source: String,
    pub target: String,
    /// Row-major scalar matrix (vector spaces, dual-number modules).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<ScalarRepr>>>,
    /// Matrix of binary forms, each a coefficient array with the power
    /// of `s` descending (curve backends). Empty arrays mean zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<Vec<Vec<ScalarRepr>>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexSpec {
    pub lo: i64,
    pub entries: Vec<String>,
    pub differentials: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainMapSpec {
    pub source: String,
    pub target: String,
    /// degree (as a string key) -> morphism name
    pub components: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RequestSpec {
    pub op: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub args: BTreeMap<String, serde_json::Value>,
}

/// Everything a request needs, resolved into core values.
pub struct Resolved {
    pub field: Field,
    pub backend: Backend,
    pub curve: Option<NodalCurve>,
    pub objects: BTreeMap<String, Obj>,
    pub morphisms: BTreeMap<String, Mor>,
    pub complexes: BTreeMap<String, Complex>,
    pub chain_maps: BTreeMap<String, ChainMap>,
    pub request: RequestSpec,
}

fn parse_scalar_repr(field: Field, r: &ScalarRepr) -> Result<Scalar> {
    match r {
        ScalarRepr::Int(n) => Ok(field.scalar(*n)),
        ScalarRepr::Str(s) => parse_scalar(field, s).map_err(|e| anyhow!(e)),
    }
}

fn parse_matrix(field: Field, rows: &[Vec<ScalarRepr>]) -> Result<Matrix> {
    let r = rows.len();
    let c = rows.first().map(|x| x.len()).unwrap_or(0);
    for row in rows {
        if row.len() != c {
            bail!("ragged matrix");
        }
    }
    let mut entries = Vec::with_capacity(r * c);
    for row in rows {
        for v in row {
            entries.push(parse_scalar_repr(field, v)?);
        }
    }
    Ok(Matrix::new(field, r, c, entries))
}

impl InstanceDocument {
    pub fn parse(text: &str) -> Result<InstanceDocument> {
        let doc: InstanceDocument = serde_json::from_str(text).context("malformed JSON")?;
        if doc.schema_version != SCHEMA_VERSION {
            bail!("unsupported schema version {:?} (expected {SCHEMA_VERSION:?})", doc.schema_version);
        }
        Ok(doc)
    }

    pub fn field(&self) -> Result<Field> {
        match &self.backend.field {
            FieldSpec::Prime { q } => Field::Fp(*q).validate().map_err(|e| anyhow!(e)),
            FieldSpec::Name(n) if n == "rational" => Ok(Field::Rat),
            FieldSpec::Name(n) => bail!("unknown field {n:?}"),
        }
    }

    pub fn backend_kind(&self) -> Result<Backend> {
        match self.backend.kind.as_str() {
            "finvect" => Ok(Backend::FinVect),
            "dualmod" => Ok(Backend::DualMod),
            "vect-p1" => Ok(Backend::VectP1),
            "vect-nodal" => Ok(Backend::VectNodal),
            other => bail!("unknown backend {other:?}"),
        }
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let field = self.field()?;
        let backend = self.backend_kind()?;
        let curve = match (&self.curve, backend) {
            (Some(spec), Backend::VectNodal) => {
                let mut nodes = Vec::new();
                for pair in &spec.nodes {
                    let a = P1Point::new(
                        parse_scalar_repr(field, &pair[0][0])?,
                        parse_scalar_repr(field, &pair[0][1])?,
                    )?;
                    let b = P1Point::new(
                        parse_scalar_repr(field, &pair[1][0])?,
                        parse_scalar_repr(field, &pair[1][1])?,
                    )?;
                    nodes.push((a, b));
                }
                Some(NodalCurve::new(field, nodes)?)
            }
            (None, Backend::VectNodal) => bail!("the nodal backend needs a curve"),
            (Some(_), _) => bail!("a curve was given for a non-curve backend"),
            (None, _) => None,
        };
        let mut objects = BTreeMap::new();
        for (name, spec) in &self.payload.objects {
            let obj = resolve_object(field, backend, curve.as_ref(), spec)
                .with_context(|| format!("object {name:?}"))?;
            objects.insert(name.clone(), obj);
        }
        let mut morphisms = BTreeMap::new();
        for (name, spec) in &self.payload.morphisms {
            let src = objects
                .get(&spec.source)
                .ok_or_else(|| anyhow!("morphism {name:?}: unknown source {:?}", spec.source))?;
            let dst = objects
                .get(&spec.target)
                .ok_or_else(|| anyhow!("morphism {name:?}: unknown target {:?}", spec.target))?;
            let mor = resolve_morphism(field, src, dst, spec).with_context(|| format!("morphism {name:?}"))?;
            morphisms.insert(name.clone(), mor);
        }
        let mut complexes = BTreeMap::new();
        for (name, spec) in &self.payload.complexes {
            let mut entries = Vec::new();
            for e in &spec.entries {
                entries.push(
                    objects
                        .get(e)
                        .cloned()
                        .ok_or_else(|| anyhow!("complex {name:?}: unknown object {e:?}"))?,
                );
            }
            let mut diffs = Vec::new();
            for d in &spec.differentials {
                diffs.push(
                    morphisms
                        .get(d)
                        .cloned()
                        .ok_or_else(|| anyhow!("complex {name:?}: unknown morphism {d:?}"))?,
                );
            }
            let structure = match spec.structure.as_deref() {
                None | Some("ambient") => ExactStructure::Ambient,
                Some("split") => ExactStructure::Split,
                Some(other) => bail!("complex {name:?}: unknown structure {other:?}"),
            };
            let c = Complex::new_in(structure, spec.lo, entries, diffs)
                .map_err(|e| anyhow!("complex {name:?}: {e}"))?;
            complexes.insert(name.clone(), c);
        }
        let mut chain_maps = BTreeMap::new();
        for (name, spec) in &self.payload.chain_maps {
            let src = complexes
                .get(&spec.source)
                .cloned()
                .ok_or_else(|| anyhow!("chain map {name:?}: unknown source {:?}", spec.source))?;
            let dst = complexes
                .get(&spec.target)
                .cloned()
                .ok_or_else(|| anyhow!("chain map {name:?}: unknown target {:?}", spec.target))?;
            let mut comps = BTreeMap::new();
            for (deg, mor_name) in &spec.components {
                let i: i64 = deg.parse().with_context(|| format!("chain map {name:?}: bad degree {deg:?}"))?;
                let m = morphisms
                    .get(mor_name)
                    .cloned()
                    .ok_or_else(|| anyhow!("chain map {name:?}: unknown morphism {mor_name:?}"))?;
                comps.insert(i, m);
            }
            let f = ChainMap::new(src, dst, comps).map_err(|e| anyhow!("chain map {name:?}: {e}"))?;
            chain_maps.insert(name.clone(), f);
        }
        Ok(Resolved {
            field,
            backend,
            curve,
            objects,
            morphisms,
            complexes,
            chain_maps,
            request: self.request.clone(),
        })
    }
}

fn resolve_object(
    field: Field,
    backend: Backend,
    curve: Option<&NodalCurve>,
    spec: &ObjectSpec,
) -> Result<Obj> {
    match backend {
        Backend::FinVect => {
            let dim = spec.dim.ok_or_else(|| anyhow!("finvect objects need a dim"))?;
            Ok(Obj::FinVect { field, dim })
        }
        Backend::DualMod => {
            let free = spec.free.ok_or_else(|| anyhow!("dualmod objects need free"))?;
            let socle = spec.socle.ok_or_else(|| anyhow!("dualmod objects need socle"))?;
            Ok(Obj::DualMod { field, free, socle })
        }
        Backend::VectP1 => {
            let mut twists = spec.splitting.clone().ok_or_else(|| anyhow!("vect-p1 objects need a splitting"))?;
            twists.sort_unstable_by_key(|t| std::cmp::Reverse(*t));
            Ok(Obj::VectP1 { field, twists })
        }
        Backend::VectNodal => {
            let twists = spec.splitting.clone().ok_or_else(|| anyhow!("vect-nodal objects need a splitting"))?;
            let gl = spec.gluings.as_ref().ok_or_else(|| anyhow!("vect-nodal objects need gluings"))?;
            let curve = curve.ok_or_else(|| anyhow!("vect-nodal objects need a curve"))?;
            let mut gluings = Vec::new();
            for g in gl {
                gluings.push(parse_matrix(field, g)?);
            }
            let b = descend(curve, &twists, &gluings)?;
            Ok(Obj::VectNodal(b))
        }
    }
}

fn resolve_morphism(field: Field, src: &Obj, dst: &Obj, spec: &MorphismSpec) -> Result<Mor> {
    match src.backend() {
        Backend::FinVect | Backend::DualMod => {
            let m = spec.matrix.as_ref().ok_or_else(|| anyhow!("expected a matrix"))?;
            let mat = parse_matrix(field, m)?;
            Ok(Mor::new(src.clone(), dst.clone(), MorData::Mat(mat))?)
        }
        Backend::VectP1 | Backend::VectNodal => {
            let rows = spec.entries.as_ref().ok_or_else(|| anyhow!("expected form entries"))?;
            let src_tw = p1_twists(src);
            let dst_tw = p1_twists(dst);
            if rows.len() != dst_tw.len() {
                bail!("expected {} rows of form entries", dst_tw.len());
            }
            let mut fm = FormMat::zero(field, dst_tw, src_tw);
            for (i, row) in rows.iter().enumerate() {
                if row.len() != src_tw.len() {
                    bail!("expected {} columns of form entries", src_tw.len());
                }
                for (j, coeffs) in row.iter().enumerate() {
                    if coeffs.is_empty() {
                        continue;
                    }
                    let deg = dst_tw[i] - src_tw[j];
                    if deg < 0 {
                        bail!("entry ({i},{j}) must be zero: its degree is negative");
                    }
                    if coeffs.len() != (deg + 1) as usize {
                        bail!("entry ({i},{j}) needs {} coefficients", deg + 1);
                    }
                    let parsed: Result<Vec<Scalar>> =
                        coeffs.iter().map(|c| parse_scalar_repr(field, c)).collect();
                    fm.set_entry(i, j, parsed?);
                }
            }
            Ok(Mor::new(src.clone(), dst.clone(), MorData::Forms(fm))?)
        }
    }
}

fn p1_twists(o: &Obj) -> &[i64] {
    match o {
        Obj::VectP1 { twists, .. } => twists,
        Obj::VectNodal(b) => &b.upstairs,
        _ => unreachable!(),
    }
}

// ---------------------------------------------------------------------------
// Serialization back out (used by reports and replay instances)
// ---------------------------------------------------------------------------

pub fn scalar_repr(s: &Scalar) -> ScalarRepr {
    match s {
        Scalar::Fp { v, .. } => ScalarRepr::Int(*v as i64),
        Scalar::Rat(_) => ScalarRepr::Str(format!("{s}")),
    }
}

pub fn matrix_spec(m: &Matrix) -> Vec<Vec<ScalarRepr>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| scalar_repr(m.get(i, j))).collect())
        .collect()
}

pub fn object_spec(o: &Obj) -> ObjectSpec {
    match o {
        Obj::FinVect { dim, .. } => ObjectSpec {
            dim: Some(*dim),
            free: None,
            socle: None,
            splitting: None,
            gluings: None,
        },
        Obj::DualMod { free, socle, .. } => ObjectSpec {
            dim: None,
            free: Some(*free),
            socle: Some(*socle),
            splitting: None,
            gluings: None,
        },
        Obj::VectP1 { twists, .. } => ObjectSpec {
            dim: None,
            free: None,
            socle: None,
            splitting: Some(twists.clone()),
            gluings: None,
        },
        Obj::VectNodal(b) => ObjectSpec {
            dim: None,
            free: None,
            socle: None,
            splitting: Some(b.upstairs.clone()),
            gluings: Some(b.gluings.iter().map(matrix_spec).collect()),
        },
    }
}

pub fn morphism_spec(f: &Mor, source: &str, target: &str) -> MorphismSpec {
    match &f.data {
        MorData::Mat(m) => MorphismSpec {
            source: source.into(),
            target: target.into(),
            matrix: Some(matrix_spec(m)),
            entries: None,
        },
        MorData::Forms(fm) => {
            let rows = (0..fm.rows())
                .map(|i| {
                    (0..fm.cols())
                        .map(|j| fm.entry(i, j).iter().map(scalar_repr).collect())
                        .collect()
                })
                .collect();
            MorphismSpec {
                source: source.into(),
                target: target.into(),
                matrix: None,
                entries: Some(rows),
            }
        }
    }
}

pub fn curve_spec(c: &NodalCurve) -> CurveSpec {
    CurveSpec {
        nodes: c
            .nodes
            .iter()
            .map(|(a, b)| {
                [
                    [scalar_repr(&a.s), scalar_repr(&a.t)],
                    [scalar_repr(&b.s), scalar_repr(&b.t)],
                ]
            })
            .collect(),
    }
}

pub fn field_spec(f: Field) -> FieldSpec {
    match f {
        Field::Fp(q) => FieldSpec::Prime { q },
        Field::Rat => FieldSpec::Name("rational".into()),
    }
}

pub fn backend_name(b: Backend) -> &'static str {
    match b {
        Backend::FinVect => "finvect",
        Backend::DualMod => "dualmod",
        Backend::VectP1 => "vect-p1",
        Backend::VectNodal => "vect-nodal",
    }
}

/// Packages a complex as a standalone replayable instance document.
pub fn complex_instance(c: &Complex, op: &str) -> InstanceDocument {
    let field = c.entries[0].field();
    let backend = c.entries[0].backend();
    let curve = match &c.entries[0] {
        Obj::VectNodal(b) => Some(curve_spec(&b.curve)),
        _ => None,
    };
    let mut objects = BTreeMap::new();
    let mut morphisms = BTreeMap::new();
    let mut entry_names = Vec::new();
    for (k, e) in c.entries.iter().enumerate() {
        let name = format!("E{k}");
        objects.insert(name.clone(), object_spec(e));
        entry_names.push(name);
    }
    let mut diff_names = Vec::new();
    for (k, d) in c.diffs.iter().enumerate() {
        let name = format!("d{k}");
        morphisms.insert(
            name.clone(),
            morphism_spec(d, &format!("E{k}"), &format!("E{}", k + 1)),
        );
        diff_names.push(name);
    }
    let mut complexes = BTreeMap::new();
    complexes.insert(
        "T".to_string(),
        ComplexSpec {
            lo: c.lo,
            entries: entry_names,
            differentials: diff_names,
            structure: match c.structure {
                ExactStructure::Ambient => None,
                ExactStructure::Split => Some("split".into()),
            },
        },
    );
    let mut args = BTreeMap::new();
    args.insert("complex".to_string(), serde_json::Value::String("T".into()));
    InstanceDocument {
        schema_version: SCHEMA_VERSION.into(),
        backend: BackendSpec { kind: backend_name(backend).into(), field: field_spec(field) },
        curve,
        payload: PayloadSpec {
            objects,
            morphisms,
            complexes,
            chain_maps: BTreeMap::new(),
        },
        request: RequestSpec { op: op.into(), args },
    }
}
