//! Deterministic brute-force oracle suites. Every suite is a pure
//! function of its seed; failures carry a replayable instance document
//! whenever the failing case is expressible as one.
//!
//! The acyclicity oracles here are deliberately independent of the
//! constructive certification path in the library: vector-space and
//! dual-number complexes are checked by rank conditions on the
//! underlying matrices, line-bundle complexes by exactness of twisted
//! global sections at one sufficiently large twist, and nodal complexes
//! by the twisted-section check upstairs plus exactness of the fiber
//! complexes at every node preimage.

use crate::instance::{self, InstanceDocument};
use excat_core::backend::forms::section_dim;
use excat_core::backend::{
    self, classify, compose, two_sided_inverse, Backend, ExactStructure, Mor, Obj, Verdict,
};
use excat_core::complex::{
    find_homotopy, is_acyclic, split_contractible, ChainMap, Complex,
};
use excat_core::curve::{
    descend, global_sections, pic_classes, pullback, rank_degree_slope, LineBundleClass, NodalCurve,
};
use excat_core::error::Obstruction;
use excat_core::field::Field;
use excat_core::matrix::{kernel_image, Matrix};
use excat_core::sample::{self, SampleCfg};
use excat_core::tstructure::{
    construct_heart_cover, ext_dim, hom_vanishing_witness, truncate, CoverOutcome,
};
use excat_core::fitting::{fitting_decompose, split_homotopy_idempotent};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub case: usize,
    pub description: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceDocument>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutcome {
    pub suite: String,
    pub seed: u64,
    pub cases: usize,
    pub failures: Vec<Failure>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn new(suite: &str, seed: u64) -> SuiteOutcome {
        SuiteOutcome { suite: suite.into(), seed, cases: 0, failures: Vec::new() }
    }

    fn fail(&mut self, description: String, instance: Option<InstanceDocument>) {
        self.failures.push(Failure { case: self.cases, description, instance });
    }
}

pub const SUITES: &[&str] = &[
    "linear-core",
    "category-laws",
    "degree-monotonicity",
    "injective-endo-iso",
    "descent-roundtrip",
    "acyclicity-oracle",
    "acyclicity-exhaustive-f2",
    "split-contractible",
    "tstructure-axioms",
    "hom-vanishing",
    "heart-cover-hereditary",
    "ext-vanishing",
    "fitting-uniqueness",
    "fitting-functoriality",
    "idempotent-splitting",
    "pic-enumeration",
    "sections-values",
];

pub fn run_suite(name: &str, seed: u64) -> Option<SuiteOutcome> {
    match name {
        "linear-core" => Some(linear_core(seed, 500)),
        "category-laws" => Some(category_laws(seed, 200)),
        "degree-monotonicity" => Some(degree_monotonicity(seed, 300)),
        "injective-endo-iso" => Some(injective_endo_iso(seed, 200)),
        "descent-roundtrip" => Some(descent_roundtrip(seed, 100)),
        "acyclicity-oracle" => Some(acyclicity_oracle(seed, 300)),
        "acyclicity-exhaustive-f2" => Some(acyclicity_exhaustive_f2(seed, 6)),
        "split-contractible" => Some(split_contractible_suite(seed, 100)),
        "tstructure-axioms" => Some(tstructure_axioms(seed, 300)),
        "hom-vanishing" => Some(hom_vanishing(seed, 100)),
        "heart-cover-hereditary" => Some(heart_cover_hereditary(seed, 12)),
        "ext-vanishing" => Some(ext_vanishing(seed, 100)),
        "fitting-uniqueness" => Some(fitting_uniqueness(seed, 200)),
        "fitting-functoriality" => Some(fitting_functoriality(seed, 200)),
        "idempotent-splitting" => Some(idempotent_splitting(seed, 200)),
        "pic-enumeration" => Some(pic_enumeration(seed)),
        "sections-values" => Some(sections_values(seed)),
        _ => None,
    }
}

fn f7() -> Field {
    Field::Fp(7)
}

fn f5() -> Field {
    Field::Fp(5)
}

fn cubic5() -> NodalCurve {
    NodalCurve::nodal_cubic(f5())
}

fn standard_configs() -> Vec<SampleCfg> {
    vec![
        SampleCfg::finvect(f7(), 4),
        SampleCfg::dualmod(Field::Fp(2), 3),
        SampleCfg::vectp1(f7(), 3, -2, 2),
        SampleCfg::nodal(cubic5(), 2, -1, 1),
    ]
}

// ---------------------------------------------------------------------------
// linear-core
// ---------------------------------------------------------------------------

pub fn linear_core(seed: u64, cases: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("linear-core", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = f7();
    for _ in 0..cases {
        out.cases += 1;
        let r = rng.gen_range(1..=8usize);
        let c = rng.gen_range(1..=8usize);
        let m = Matrix::from_fn(f, r, c, |_, _| sample::random_scalar(f, &mut rng));
        let (kernel, image, rank) = kernel_image(&m);
        if rank + kernel.dim() != c {
            out.fail("rank-nullity failed".into(), None);
            continue;
        }
        let mut ok = true;
        for j in 0..kernel.dim() {
            let v = kernel.basis.col(j);
            if !excat_core::matrix::mat_vec(&m, &v).iter().all(|s| s.is_zero()) {
                ok = false;
            }
        }
        let span = excat_core::matrix::column_space(&m);
        for j in 0..image.dim() {
            if span.coords(&image.basis.col(j)).is_none() {
                ok = false;
            }
        }
        if !ok {
            out.fail("kernel or image basis invalid".into(), None);
        }
        // affine solve round-trip
        let b = Matrix::from_fn(f, r, 1, |_, _| sample::random_scalar(f, &mut rng));
        match excat_core::matrix::solve_affine(&m, &b) {
            Some((x, _)) => {
                if excat_core::matrix::mat_vec(&m, &x) != b.col(0) {
                    out.fail("solution does not satisfy the system".into(), None);
                }
            }
            None => {
                if m.hstack(&b).rank() != m.rank() + 1 {
                    out.fail("inconsistency report was wrong".into(), None);
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// category-laws
// ---------------------------------------------------------------------------

pub fn category_laws(seed: u64, cases_per_backend: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("category-laws", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for cfg in standard_configs() {
        for _ in 0..cases_per_backend {
            out.cases += 1;
            let x = sample::random_obj(&cfg, false, &mut rng);
            let y = sample::random_obj(&cfg, false, &mut rng);
            let z = sample::random_obj(&cfg, false, &mut rng);
            let w = sample::random_obj(&cfg, false, &mut rng);
            let fm = sample::random_mor(&x, &y, &mut rng);
            let g = sample::random_mor(&y, &z, &mut rng);
            let h = sample::random_mor(&z, &w, &mut rng);
            if compose(&h, &compose(&g, &fm)) != compose(&compose(&h, &g), &fm) {
                out.fail("associativity violated".into(), None);
            }
            if compose(&fm, &Mor::identity(&x)) != fm || compose(&Mor::identity(&y), &fm) != fm {
                out.fail("identity law violated".into(), None);
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// curve arithmetic suites
// ---------------------------------------------------------------------------

fn is_injective(f: &Mor) -> bool {
    matches!(
        classify(f),
        Verdict::Iso { .. }
            | Verdict::AdmMono { .. }
            | Verdict::Neither { obstruction: Obstruction::TorsionCokernel { .. } }
    )
}

pub fn degree_monotonicity(seed: u64, cases: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("degree-monotonicity", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = SampleCfg::vectp1(f7(), 3, -2, 2);
    while out.cases < cases {
        let x = sample::random_obj(&cfg, false, &mut rng);
        let Obj::VectP1 { twists, .. } = &x else { unreachable!() };
        let shift: i64 = rng.gen_range(0..=1);
        let ty: Vec<i64> = twists.iter().map(|t| t + shift).collect();
        let y = Obj::VectP1 { field: f7(), twists: ty };
        let f = sample::random_mor(&x, &y, &mut rng);
        if !is_injective(&f) {
            continue;
        }
        out.cases += 1;
        let dx = rank_degree_slope(&x).unwrap().1;
        let dy = rank_degree_slope(&y).unwrap().1;
        if dx > dy {
            out.fail(format!("degree dropped along an injective map: {dx} > {dy}"), None);
        }
        if (dx == dy) != two_sided_inverse(&f).is_some() {
            out.fail("degree equality did not match invertibility".into(), None);
        }
    }
    out
}

pub fn injective_endo_iso(seed: u64, cases: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("injective-endo-iso", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = SampleCfg::nodal(cubic5(), 3, -2, 2);
    while out.cases < cases {
        let v = sample::random_obj(&cfg, false, &mut rng);
        let f = sample::random_mor(&v, &v, &mut rng);
        if !is_injective(&f) {
            continue;
        }
        out.cases += 1;
        if two_sided_inverse(&f).is_none() {
            out.fail("injective endomorphism is not an isomorphism".into(), None);
        }
    }
    out
}

pub fn descent_roundtrip(seed: u64, cases: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("descent-roundtrip", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let curve = cubic5();
    for _ in 0..cases {
        out.cases += 1;
        let rank = rng.gen_range(1..=3usize);
        let mut twists: Vec<i64> = (0..rank).map(|_| rng.gen_range(-2..=2)).collect();
        twists.sort_unstable_by_key(|t| std::cmp::Reverse(*t));
        let gluing = sample::random_invertible_matrix(f5(), rank, &mut rng);
        let v = descend(&curve, &twists, &[gluing.clone()]).unwrap();
        let (up, gl) = pullback(&v);
        if up != twists || gl != vec![gluing] {
            out.fail("descent data did not round-trip".into(), None);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// acyclicity oracles
// ---------------------------------------------------------------------------

fn underlying_matrix(f: &Mor) -> Matrix {
    f.mat().clone()
}

/// Rank-condition exactness for vector spaces and dual-number modules
/// (where every exact sequence is admissible).
fn rank_oracle(c: &Complex) -> bool {
    let t = c.trimmed();
    if t.is_zero_complex() {
        return true;
    }
    for i in t.lo..=t.hi() {
        let rank_in = if i > t.lo { underlying_matrix(&t.diff(i - 1)).rank() } else { 0 };
        let d_out = t.diff(i);
        let ker_dim = if i < t.hi() {
            let (k, _, _) = kernel_image(&underlying_matrix(&d_out));
            k.dim()
        } else {
            t.entry(i).size() // kernel of the terminal zero map
        };
        if ker_dim != rank_in {
            return false;
        }
    }
    true
}

/// Twisted-global-section exactness at one twist high enough that every
/// subsheaf in sight has no higher cohomology.
fn p1_graded_oracle(c: &Complex) -> bool {
    let t = c.trimmed();
    if t.is_zero_complex() {
        return true;
    }
    let twists = |o: &Obj| -> Vec<i64> {
        match o {
            Obj::VectP1 { twists, .. } => twists.clone(),
            Obj::VectNodal(b) => b.upstairs.clone(),
            _ => unreachable!(),
        }
    };
    let mut bound: i64 = 2 + t.entries.len() as i64;
    for e in &t.entries {
        for a in twists(e) {
            bound += a.abs() + 1;
        }
    }
    let n = bound;
    let sections = |o: &Obj| -> usize { twists(o).iter().map(|a| section_dim(*a, n)).sum() };
    for i in t.lo..=t.hi() {
        let rank_in = if i > t.lo { t.diff(i - 1).forms().section_map(n).rank() } else { 0 };
        let ker_dim = if i < t.hi() {
            sections(&t.entry(i)) - t.diff(i).forms().section_map(n).rank()
        } else {
            sections(&t.entry(i))
        };
        if ker_dim != rank_in {
            return false;
        }
    }
    true
}

/// Nodal oracle: downstairs acyclicity is equivalent to upstairs
/// exactness plus exactness of both fiber complexes over every node.
fn nodal_oracle(c: &Complex) -> bool {
    if !p1_graded_oracle(c) {
        return false;
    }
    let t = c.trimmed();
    if t.is_zero_complex() {
        return true;
    }
    let Obj::VectNodal(b0) = &t.entries[0] else { unreachable!() };
    let curve = b0.curve.clone();
    for (p1_pt, p2_pt) in &curve.nodes {
        for pt in [p1_pt, p2_pt] {
            // fiber complex at pt: evaluate every differential
            for i in t.lo..=t.hi() {
                let rank_in = if i > t.lo {
                    t.diff(i - 1).forms().eval(&pt.s, &pt.t).rank()
                } else {
                    0
                };
                let ker_dim = if i < t.hi() {
                    let m = t.diff(i).forms().eval(&pt.s, &pt.t);
                    let (k, _, _) = kernel_image(&m);
                    k.dim()
                } else {
                    t.entry(i).size()
                };
                if ker_dim != rank_in {
                    return false;
                }
            }
        }
    }
    true
}

fn independent_oracle(c: &Complex) -> bool {
    match c.entries[0].backend() {
        Backend::FinVect | Backend::DualMod => rank_oracle(c),
        Backend::VectP1 => p1_graded_oracle(c),
        Backend::VectNodal => nodal_oracle(c),
    }
}

pub fn acyclicity_oracle(seed: u64, cases_per_backend: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("acyclicity-oracle", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for cfg in standard_configs() {
        for k in 0..cases_per_backend {
            out.cases += 1;
            // alternate between arbitrary complexes and certified acyclics
            let c = if k % 2 == 0 {
                sample::random_complex(&cfg, -2, 4, &mut rng)
            } else {
                sample::random_acyclic(&cfg, -2, 4, ExactStructure::Ambient, &mut rng)
            };
            let ours = is_acyclic(&c).is_ok();
            let oracle = independent_oracle(&c);
            if ours != oracle {
                out.fail(
                    format!("is_acyclic said {ours} but the oracle said {oracle}"),
                    Some(instance::complex_instance(&c, "check-acyclic")),
                );
            }
        }
    }
    out
}

/// All complexes over F_2 vector spaces with total dimension at most
/// `max_total`, checked exhaustively.
pub fn acyclicity_exhaustive_f2(seed: u64, max_total: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("acyclicity-exhaustive-f2", seed);
    let f = Field::Fp(2);
    let mut dims_stack: Vec<Vec<usize>> = vec![vec![]];
    let mut shapes: Vec<Vec<usize>> = Vec::new();
    while let Some(d) = dims_stack.pop() {
        let total: usize = d.iter().sum();
        if !d.is_empty() {
            shapes.push(d.clone());
        }
        for next in 1..=(max_total - total) {
            if total + next <= max_total {
                let mut nd = d.clone();
                nd.push(next);
                dims_stack.push(nd);
            }
        }
    }
    shapes.sort();
    shapes.dedup();
    for dims in shapes {
        enumerate_diffs(f, &dims, 0, &mut Vec::new(), &mut out);
    }
    out
}

fn all_matrices(f: Field, rows: usize, cols: usize) -> Vec<Matrix> {
    let n = rows * cols;
    (0..(1u64 << n))
        .map(|bits| {
            Matrix::from_fn(f, rows, cols, |i, j| {
                if bits >> (i * cols + j) & 1 == 1 { f.one() } else { f.zero() }
            })
        })
        .collect()
}

fn enumerate_diffs(f: Field, dims: &[usize], k: usize, acc: &mut Vec<Matrix>, out: &mut SuiteOutcome) {
    if k + 1 >= dims.len() {
        let entries: Vec<Obj> = dims.iter().map(|d| Obj::FinVect { field: f, dim: *d }).collect();
        let diffs: Vec<Mor> = acc
            .iter()
            .enumerate()
            .map(|(i, m)| {
                Mor::new(entries[i].clone(), entries[i + 1].clone(), backend::MorData::Mat(m.clone()))
                    .unwrap()
            })
            .collect();
        let c = Complex::new(0, entries, diffs).expect("enumerated differentials compose to zero");
        out.cases += 1;
        let ours = is_acyclic(&c).is_ok();
        let oracle = rank_oracle(&c);
        if ours != oracle {
            out.fail(
                format!("exhaustive disagreement: is_acyclic {ours}, oracle {oracle}"),
                Some(instance::complex_instance(&c, "check-acyclic")),
            );
        }
        return;
    }
    for m in all_matrices(f, dims[k + 1], dims[k]) {
        if let Some(prev) = acc.last() {
            if !m.mul(prev).is_zero() {
                continue;
            }
        }
        acc.push(m);
        enumerate_diffs(f, dims, k + 1, acc, out);
        acc.pop();
    }
}

// ---------------------------------------------------------------------------
// split structure
// ---------------------------------------------------------------------------

pub fn split_contractible_suite(seed: u64, cases: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("split-contractible", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let configs = [SampleCfg::finvect(f7(), 4), SampleCfg::vectp1(f7(), 2, -1, 1)];
    for (ci, cfg) in configs.iter().enumerate() {
        let n = if ci == 0 { cases * 7 / 10 } else { cases - cases * 7 / 10 };
        for _ in 0..n {
            out.cases += 1;
            let c = sample::random_acyclic(cfg, -2, 4, ExactStructure::Split, &mut rng);
            match split_contractible(&c) {
                Ok(s) => {
                    let id = ChainMap::identity(&c.trimmed());
                    let z = ChainMap::zero(&c.trimmed(), &c.trimmed());
                    if !s.contraction.witnesses(&id, &z) {
                        out.fail("contraction failed validation".into(), None);
                    }
                }
                Err(e) => out.fail(
                    format!("split-acyclic complex rejected: {e}"),
                    Some(instance::complex_instance(&c, "check-acyclic")),
                ),
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// t-structure suites
// ---------------------------------------------------------------------------

fn axiom_configs() -> Vec<SampleCfg> {
    vec![
        SampleCfg::finvect(f7(), 4),
        SampleCfg::vectp1(f7(), 4, -2, 2),
        SampleCfg::nodal(cubic5(), 4, -1, 1),
    ]
}

pub fn tstructure_axioms(seed: u64, cases_per_backend: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("tstructure-axioms", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for cfg in axiom_configs() {
        for _ in 0..cases_per_backend {
            out.cases += 1;
            let len = rng.gen_range(3..=6usize);
            let lo = -rng.gen_range(1..=4i64) - 1;
            let t = sample::random_acyclic(&cfg, lo, len, ExactStructure::Ambient, &mut rng);
            let n = lo + rng.gen_range(0..len) as i64;
            let tri = match truncate(&t, n) {
                Ok(tri) => tri,
                Err(e) => {
                    out.fail(
                        format!("truncation failed: {e}"),
                        Some(instance::complex_instance(&t, "truncate")),
                    );
                    continue;
                }
            };
            let lower_ok = tri.a.is_zero_complex() || tri.a.trimmed().hi() <= n;
            let upper_ok = tri.b.is_zero_complex() || tri.b.trimmed().lo >= n - 1;
            if !lower_ok || !upper_ok {
                out.fail("membership violated".into(), Some(instance::complex_instance(&t, "truncate")));
                continue;
            }
            if is_acyclic(&tri.a).is_err() || is_acyclic(&tri.b).is_err() {
                out.fail("truncation pieces not acyclic".into(), None);
                continue;
            }
            let comp = &tri.comparison;
            let vu = comp.backward.compose(&comp.forward);
            let uv = comp.forward.compose(&comp.backward);
            if !comp.on_src.witnesses(&vu, &ChainMap::identity(&comp.forward.src))
                || !comp.on_dst.witnesses(&uv, &ChainMap::identity(&tri.b))
            {
                out.fail("cone comparison not certified".into(), None);
            }
        }
    }
    out
}

pub fn hom_vanishing(seed: u64, cases: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("hom-vanishing", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let configs = [
        SampleCfg::finvect(f7(), 3),
        SampleCfg::vectp1(f7(), 2, -1, 1),
        SampleCfg::nodal(cubic5(), 2, -1, 1),
    ];
    let per = cases / configs.len() + 1;
    for cfg in &configs {
        for _ in 0..per {
            if out.cases >= cases {
                break;
            }
            out.cases += 1;
            let a = sample::random_acyclic(cfg, -3, 4, ExactStructure::Ambient, &mut rng);
            let b = sample::random_acyclic(cfg, -1, 3, ExactStructure::Ambient, &mut rng);
            let f = sample::random_chain_map(&a, &b, &mut rng);
            match hom_vanishing_witness(&f) {
                Ok(w) => {
                    let zero = ChainMap::zero(&a, &b);
                    if !w.witnesses(&f, &zero) {
                        out.fail("vanishing witness failed validation".into(), None);
                    }
                    if find_homotopy(&f, &zero).is_none() {
                        out.fail("generic homotopy search disagreed".into(), None);
                    }
                }
                Err(e) => out.fail(format!("no vanishing witness: {e}"), None),
            }
        }
    }
    out
}

pub fn heart_cover_hereditary(seed: u64, cases_per_backend: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("heart-cover-hereditary", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let configs = [
        SampleCfg::finvect(f7(), 3),
        SampleCfg::vectp1(f7(), 2, -1, 1),
        SampleCfg::nodal(cubic5(), 2, -1, 1),
    ];
    for cfg in &configs {
        for _ in 0..cases_per_backend {
            out.cases += 1;
            let len = rng.gen_range(4..=5usize);
            let t =
                sample::random_acyclic(cfg, -(len as i64) + 1, len, ExactStructure::Ambient, &mut rng);
            match construct_heart_cover(&t) {
                Ok(CoverOutcome::Found(cover)) => {
                    if cover.heart.complex.trimmed().lo < -2 {
                        out.fail("cover is not a heart object".into(), None);
                    }
                }
                Ok(CoverOutcome::NoCover(_)) => out.fail(
                    "no cover found on a hereditary backend".into(),
                    Some(instance::complex_instance(&t, "heart-cover")),
                ),
                Err(e) => out.fail(format!("cover construction errored: {e}"), None),
            }
        }
    }
    // the periodic dual-number complex must be refused
    out.cases += 1;
    let t = dualmod_periodic_complex();
    match construct_heart_cover(&t) {
        Ok(CoverOutcome::NoCover(w)) => {
            if w.rho_subsystem_solvable && w.equation_rows == 0 {
                out.fail("degenerate witness".into(), None);
            }
        }
        Ok(CoverOutcome::Found(_)) => out.fail(
            "found a cover for the periodic dual-number complex".into(),
            Some(instance::complex_instance(&t, "heart-cover")),
        ),
        Err(e) => out.fail(format!("cover construction errored: {e}"), None),
    }
    out
}

/// `0 -> k -> R -> R -> k -> 0` over `F_2` via the socle inclusion,
/// multiplication by `e`, and the augmentation.
pub fn dualmod_periodic_complex() -> Complex {
    let field = Field::Fp(2);
    let k = Obj::DualMod { field, free: 0, socle: 1 };
    let r = Obj::DualMod { field, free: 1, socle: 0 };
    let socle_in = Mor::new(
        k.clone(),
        r.clone(),
        backend::MorData::Mat(Matrix::from_i64(field, &[&[0], &[1]])),
    )
    .unwrap();
    let eps = Mor::new(
        r.clone(),
        r.clone(),
        backend::MorData::Mat(Matrix::from_i64(field, &[&[0, 0], &[1, 0]])),
    )
    .unwrap();
    let aug = Mor::new(
        r.clone(),
        k.clone(),
        backend::MorData::Mat(Matrix::from_i64(field, &[&[1, 0]])),
    )
    .unwrap();
    Complex::new(-3, vec![k.clone(), r.clone(), r, k], vec![socle_in, eps, aug]).unwrap()
}

pub fn ext_vanishing(seed: u64, pairs_per_backend: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("ext-vanishing", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let configs = [
        SampleCfg::finvect(f7(), 4),
        SampleCfg::vectp1(f7(), 3, -3, 3),
        SampleCfg::nodal(cubic5(), 3, -2, 2),
    ];
    for cfg in &configs {
        for _ in 0..pairs_per_backend {
            out.cases += 1;
            let x = sample::random_obj(cfg, false, &mut rng);
            let y = sample::random_obj(cfg, false, &mut rng);
            for n in [2usize, 3] {
                match ext_dim(&x, &y, n) {
                    Ok(0) => {}
                    Ok(d) => out.fail(format!("nonzero derived hom in degree {n}: {d}"), None),
                    Err(e) => out.fail(format!("derived hom failed: {e}"), None),
                }
            }
        }
    }
    // the non-hereditary witness
    out.cases += 1;
    let k = Obj::DualMod { field: Field::Fp(2), free: 0, socle: 1 };
    if ext_dim(&k, &k, 2) != Ok(1) {
        out.fail("periodic resolution gave the wrong dimension".into(), None);
    }
    out
}

// ---------------------------------------------------------------------------
// fitting suites
// ---------------------------------------------------------------------------

pub fn fitting_uniqueness(seed: u64, cases: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("fitting-uniqueness", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let configs = [
        SampleCfg::finvect(f7(), 4),
        SampleCfg::vectp1(f7(), 2, -1, 1),
        SampleCfg::nodal(cubic5(), 2, -1, 1),
    ];
    let per = cases / configs.len() + 1;
    for cfg in &configs {
        for _ in 0..per {
            if out.cases >= cases {
                break;
            }
            out.cases += 1;
            let x = sample::random_obj(cfg, false, &mut rng);
            let f = sample::random_mor(&x, &x, &mut rng);
            let d = match fitting_decompose(&f) {
                Ok(d) => d,
                Err(e) => {
                    out.fail(format!("decomposition failed: {e}"), None);
                    continue;
                }
            };
            // identities
            let resum = backend::add(
                &compose(&d.include_inv, &d.project_inv),
                &compose(&d.include_nil, &d.project_nil),
            );
            if resum != Mor::identity(&x) {
                out.fail("inclusions/projections do not resolve the identity".into(), None);
            }
            let rebuilt = backend::add(
                &compose(&d.include_inv, &compose(&d.on_inv, &d.project_inv)),
                &compose(&d.include_nil, &compose(&d.on_nil, &d.project_nil)),
            );
            if rebuilt != f {
                out.fail("endomorphism does not decompose".into(), None);
            }
            // independent stabilization for vector spaces: canonical bases
            // of kernel and image of a high power agree exactly
            if x.backend() == Backend::FinVect {
                let mut p = Matrix::identity(f7(), x.size());
                for _ in 0..x.size() {
                    p = f.mat().mul(&p);
                }
                let (sk, si, _) = kernel_image(&p);
                if &sk.basis != d.include_nil.mat() || &si.basis != d.include_inv.mat() {
                    out.fail("stabilized kernel/image bases disagree".into(), None);
                }
            }
            if d.nilpotence_index > x.size() {
                out.fail("nilpotence index exceeded the rank bound".into(), None);
            }
        }
    }
    out
}

pub fn fitting_functoriality(seed: u64, cases: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("fitting-functoriality", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let configs = [SampleCfg::finvect(f7(), 3), SampleCfg::nodal(cubic5(), 2, -1, 1)];
    let per = cases / configs.len() + 1;
    for cfg in &configs {
        for _ in 0..per {
            if out.cases >= cases {
                break;
            }
            out.cases += 1;
            let x = sample::random_obj(cfg, false, &mut rng);
            let y = sample::random_obj(cfg, false, &mut rng);
            let rho = sample::random_mor(&x, &y, &mut rng);
            let (f, g) = sample::random_commuting_square(&x, &y, &rho, &mut rng);
            if compose(&rho, &f) != compose(&g, &rho) {
                out.fail("sampled square does not commute".into(), None);
                continue;
            }
            let df = match fitting_decompose(&f) {
                Ok(d) => d,
                Err(e) => {
                    out.fail(format!("decomposition failed: {e}"), None);
                    continue;
                }
            };
            let dg = match fitting_decompose(&g) {
                Ok(d) => d,
                Err(e) => {
                    out.fail(format!("decomposition failed: {e}"), None);
                    continue;
                }
            };
            let cross1 = compose(&dg.project_nil, &compose(&rho, &df.include_inv));
            let cross2 = compose(&dg.project_inv, &compose(&rho, &df.include_nil));
            if !cross1.is_zero() || !cross2.is_zero() {
                out.fail("map does not respect the decomposition".into(), None);
            }
        }
    }
    out
}

pub fn idempotent_splitting(seed: u64, cases: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("idempotent-splitting", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = SampleCfg::nodal(cubic5(), 2, -1, 1);
    for _ in 0..cases {
        out.cases += 1;
        let len = rng.gen_range(1..=2usize);
        let (_, e) = sample::random_homotopy_idempotent(&cfg, 0, len, &mut rng);
        match split_homotopy_idempotent(&e) {
            Ok(s) => {
                if s.project.compose(&s.include) != ChainMap::identity(&s.piece) {
                    out.fail("projection of the inclusion is not the identity".into(), None);
                }
                if !s.realizes.witnesses(&e, &s.include.compose(&s.project)) {
                    out.fail("splitting witness failed validation".into(), None);
                }
                let max_index = s.indices.iter().map(|(_, n)| *n).max().unwrap_or(0).max(1);
                if s.series_terms > max_index {
                    out.fail("geometric series exceeded the nilpotence bound".into(), None);
                }
            }
            Err(e) => out.fail(format!("splitting failed: {e}"), None),
        }
    }
    out
}

// ---------------------------------------------------------------------------
// picard group and sections
// ---------------------------------------------------------------------------

pub fn pic_enumeration(seed: u64) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("pic-enumeration", seed);
    for q in [2u64, 3, 5] {
        out.cases += 1;
        let curve = NodalCurve::nodal_cubic(Field::Fp(q));
        match pic_classes(&curve, 0) {
            Ok(classes) => {
                if classes.len() != (q - 1) as usize {
                    out.fail(format!("expected {} classes over F_{q}, got {}", q - 1, classes.len()), None);
                }
            }
            Err(e) => out.fail(format!("enumeration failed: {e}"), None),
        }
    }
    // two-node curve over F_5
    out.cases += 1;
    let f = f5();
    let curve = NodalCurve::new(
        f,
        vec![
            (
                excat_core::curve::P1Point::from_i64(f, 1, 0).unwrap(),
                excat_core::curve::P1Point::from_i64(f, 0, 1).unwrap(),
            ),
            (
                excat_core::curve::P1Point::from_i64(f, 1, 1).unwrap(),
                excat_core::curve::P1Point::from_i64(f, 1, 2).unwrap(),
            ),
        ],
    )
    .unwrap();
    match pic_classes(&curve, 0) {
        Ok(classes) => {
            if classes.len() != 16 {
                out.fail(format!("expected 16 classes, got {}", classes.len()), None);
            }
            // brute-force completeness: every gluing vector is isomorphic
            // to exactly one listed class
            let units: Vec<_> = f.elements().into_iter().filter(|u| !u.is_zero()).collect();
            for a in &units {
                for b in &units {
                    out.cases += 1;
                    let cand =
                        LineBundleClass::new(curve.clone(), 0, vec![a.clone(), b.clone()]).unwrap();
                    let mut hits = 0;
                    for cls in &classes {
                        if excat_core::curve::line_bundle_iso(cls, &cand).unwrap() {
                            hits += 1;
                        }
                    }
                    if hits != 1 {
                        out.fail(format!("gluing ({a}, {b}) matched {hits} classes"), None);
                    }
                }
            }
        }
        Err(e) => out.fail(format!("enumeration failed: {e}"), None),
    }
    out
}

pub fn sections_values(seed: u64) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("sections-values", seed);
    let curve = cubic5();
    // h^0(O_Y) = 1
    out.cases += 1;
    let o = LineBundleClass::new(curve.clone(), 0, vec![f5().one()]).unwrap();
    if global_sections(&o.to_bundle()).0 != 1 {
        out.fail("structure sheaf should have one section".into(), None);
    }
    // h^0(L(0, lambda)) = 0 for lambda != 1
    for lambda in 2..5i64 {
        out.cases += 1;
        let l = LineBundleClass::new(curve.clone(), 0, vec![f5().scalar(lambda)]).unwrap();
        if global_sections(&l.to_bundle()).0 != 0 {
            out.fail(format!("twisted gluing {lambda} should kill the sections"), None);
        }
    }
    // h^0(L(1, lambda)) = 1 for every unit
    for lambda in 1..5i64 {
        out.cases += 1;
        let l = LineBundleClass::new(curve.clone(), 1, vec![f5().scalar(lambda)]).unwrap();
        if global_sections(&l.to_bundle()).0 != 1 {
            out.fail(format!("degree-one bundle with gluing {lambda} should have one section"), None);
        }
    }
    // genus: h^1(O_Y) = 1
    out.cases += 1;
    if excat_core::curve::h1_nodal(&o.to_bundle()) != 1 {
        out.fail("structure sheaf should have one-dimensional first cohomology".into(), None);
    }
    out
}
