//! Seeded random generators for objects, morphisms, complexes and
//! homotopy idempotents. All randomness flows from a caller-provided RNG
//! so that every run is reproducible; nothing here reads the clock or
//! the OS entropy pool.

use crate::backend::{
    self, compose, direct_sum, two_sided_inverse, Backend, ExactStructure, HomSpace, Mor, Obj,
};
use crate::complex::{BlockSystem, ChainMap, Complex, Homotopy};
use crate::curve::{NodalBundle, NodalCurve};
use crate::field::{Field, Scalar};
use crate::matrix::{self, Matrix};
use rand::Rng;
use std::collections::BTreeMap;

/// Shape bounds for sampled objects.
#[derive(Clone, Debug)]
pub struct SampleCfg {
    pub backend: Backend,
    pub field: Field,
    pub curve: Option<NodalCurve>,
    pub max_rank: usize,
    pub twist_lo: i64,
    pub twist_hi: i64,
}

impl SampleCfg {
    pub fn finvect(field: Field, max_rank: usize) -> SampleCfg {
        SampleCfg { backend: Backend::FinVect, field, curve: None, max_rank, twist_lo: 0, twist_hi: 0 }
    }

    pub fn dualmod(field: Field, max_rank: usize) -> SampleCfg {
        SampleCfg { backend: Backend::DualMod, field, curve: None, max_rank, twist_lo: 0, twist_hi: 0 }
    }

    pub fn vectp1(field: Field, max_rank: usize, twist_lo: i64, twist_hi: i64) -> SampleCfg {
        SampleCfg { backend: Backend::VectP1, field, curve: None, max_rank, twist_lo, twist_hi }
    }

    pub fn nodal(curve: NodalCurve, max_rank: usize, twist_lo: i64, twist_hi: i64) -> SampleCfg {
        SampleCfg {
            backend: Backend::VectNodal,
            field: curve.field,
            curve: Some(curve),
            max_rank,
            twist_lo,
            twist_hi,
        }
    }
}

pub fn random_scalar(field: Field, rng: &mut impl Rng) -> Scalar {
    match field {
        Field::Fp(p) => Scalar::Fp { p, v: rng.gen_range(0..p) },
        Field::Rat => field.scalar(rng.gen_range(-9..=9)),
    }
}

pub fn random_unit(field: Field, rng: &mut impl Rng) -> Scalar {
    loop {
        let s = random_scalar(field, rng);
        if !s.is_zero() {
            return s;
        }
    }
}

pub fn random_invertible_matrix(field: Field, n: usize, rng: &mut impl Rng) -> Matrix {
    loop {
        let m = Matrix::from_fn(field, n, n, |_, _| random_scalar(field, rng));
        if matrix::inverse(&m).is_some() {
            return m;
        }
    }
}

/// A random object within the configured bounds; may be zero when
/// `allow_zero` is set.
pub fn random_obj(cfg: &SampleCfg, allow_zero: bool, rng: &mut impl Rng) -> Obj {
    let min_rank = if allow_zero { 0 } else { 1 };
    let rank = rng.gen_range(min_rank..=cfg.max_rank.max(min_rank));
    match cfg.backend {
        Backend::FinVect => Obj::FinVect { field: cfg.field, dim: rank },
        Backend::DualMod => {
            let free = rng.gen_range(0..=rank);
            Obj::DualMod { field: cfg.field, free, socle: rank - free }
        }
        Backend::VectP1 => {
            let mut twists: Vec<i64> =
                (0..rank).map(|_| rng.gen_range(cfg.twist_lo..=cfg.twist_hi)).collect();
            twists.sort_unstable_by_key(|t| std::cmp::Reverse(*t));
            Obj::VectP1 { field: cfg.field, twists }
        }
        Backend::VectNodal => {
            let curve = cfg.curve.clone().expect("nodal sampling needs a curve");
            let mut twists: Vec<i64> =
                (0..rank).map(|_| rng.gen_range(cfg.twist_lo..=cfg.twist_hi)).collect();
            twists.sort_unstable_by_key(|t| std::cmp::Reverse(*t));
            let gluings = (0..curve.nodes.len())
                .map(|_| random_invertible_matrix(cfg.field, rank, rng))
                .collect();
            Obj::VectNodal(NodalBundle { curve, upstairs: twists, gluings })
        }
    }
}

pub fn random_mor(x: &Obj, y: &Obj, rng: &mut impl Rng) -> Mor {
    let hs = HomSpace::new(x, y).expect("compatible objects");
    let coords: Vec<Scalar> = (0..hs.dim()).map(|_| random_scalar(x.field(), rng)).collect();
    hs.from_coords(&coords)
}

/// A random automorphism, found by rejection sampling over endomorphisms.
pub fn random_iso(x: &Obj, rng: &mut impl Rng) -> Mor {
    if x.is_zero() {
        return Mor::identity(x);
    }
    for _ in 0..64 {
        let f = random_mor(x, x, rng);
        if two_sided_inverse(&f).is_some() {
            return f;
        }
    }
    Mor::identity(x)
}

/// A random bounded acyclic complex: a chain of linking objects glued by
/// split exact sequences, then conjugated degreewise by random
/// automorphisms so the sequences stop being visibly split.
pub fn random_acyclic(
    cfg: &SampleCfg,
    lo: i64,
    len: usize,
    structure: ExactStructure,
    rng: &mut impl Rng,
) -> Complex {
    assert!(len >= 2);
    // linking objects K^{lo+1} .. K^{lo+len-1}
    let links: Vec<Obj> = (0..len - 1).map(|_| random_obj(cfg, true, rng)).collect();
    let zero = links[0].zero_like();
    let link = |i: usize| -> &Obj {
        if i == 0 || i > links.len() { &zero } else { &links[i - 1] }
    };
    let mut entries = Vec::new();
    let mut inc_second: Vec<Mor> = Vec::new(); // K^{i+1} -> E^i
    let mut proj_second: Vec<Mor> = Vec::new(); // E^i -> K^{i+1}
    for i in 0..len {
        let (sum, incs, projs) = direct_sum(&[link(i).clone(), link(i + 1).clone()]).unwrap();
        entries.push(sum);
        inc_second.push(incs[1].clone());
        proj_second.push(projs[1].clone());
    }
    let mut diffs = Vec::new();
    for i in 0..len - 1 {
        // E^i -> K^{i+1} -> E^{i+1}, using the first-summand inclusion
        let (_, incs, _) = direct_sum(&[link(i + 1).clone(), link(i + 2).clone()]).unwrap();
        let d = compose(&incs[0], &proj_second[i]);
        diffs.push(Mor { dst: entries[i + 1].clone(), ..d });
    }
    let _ = inc_second;
    let plain = Complex::new_in(structure, lo, entries, diffs).expect("split chain is a complex");
    // conjugate by random automorphisms
    let autos: Vec<Mor> = plain.entries.iter().map(|e| random_iso(e, rng)).collect();
    let inv: Vec<Mor> = autos.iter().map(|g| two_sided_inverse(g).unwrap()).collect();
    let diffs = (0..plain.diffs.len())
        .map(|k| compose(&autos[k + 1], &compose(&plain.diffs[k], &inv[k])))
        .collect();
    Complex::new_in(structure, lo, plain.entries.clone(), diffs).expect("conjugated complex")
}

/// A random bounded complex (not necessarily acyclic): the first
/// differential is arbitrary, later ones are sampled from the kernel of
/// composition with the previous differential.
pub fn random_complex(cfg: &SampleCfg, lo: i64, len: usize, rng: &mut impl Rng) -> Complex {
    assert!(len >= 1);
    let entries: Vec<Obj> = (0..len).map(|_| random_obj(cfg, true, rng)).collect();
    let mut diffs: Vec<Mor> = Vec::new();
    for k in 0..len.saturating_sub(1) {
        let (x, y) = (&entries[k], &entries[k + 1]);
        if k == 0 {
            diffs.push(random_mor(x, y, rng));
            continue;
        }
        let prev = &diffs[k - 1];
        let from = HomSpace::new(x, y).unwrap();
        let to = HomSpace::new(&prev.src, y).unwrap();
        if from.dim() == 0 || to.dim() == 0 {
            diffs.push(Mor::zero(x, y));
            continue;
        }
        let m = backend::pre_matrix(prev, &from, &to);
        let (ker, _, _) = matrix::kernel_image(&m);
        let mut coords = vec![cfg.field.zero(); from.dim()];
        for j in 0..ker.dim() {
            let c = random_scalar(cfg.field, rng);
            let col = ker.basis.col(j);
            for (i, v) in col.iter().enumerate() {
                coords[i] = coords[i].add(&c.mul(v));
            }
        }
        diffs.push(from.from_coords(&coords));
    }
    Complex::new(lo, entries, diffs).expect("sampled differentials compose to zero")
}

/// A random chain map, sampled uniformly from the solution space of the
/// commuting-square equations.
pub fn random_chain_map(x: &Complex, y: &Complex, rng: &mut impl Rng) -> ChainMap {
    let field = x.entries[0].field();
    let lo = x.lo.min(y.lo);
    let hi = x.hi().max(y.hi());
    let mut sys = BlockSystem::new(field);
    let mut idx: BTreeMap<i64, usize> = BTreeMap::new();
    for i in lo..=hi {
        let hs = HomSpace::new(&x.entry(i), &y.entry(i)).unwrap();
        if hs.dim() > 0 {
            idx.insert(i, sys.add_unknown(hs));
        }
    }
    for i in lo..hi {
        let target = HomSpace::new(&x.entry(i), &y.entry(i + 1)).unwrap();
        if target.dim() == 0 {
            continue;
        }
        let mut terms = Vec::new();
        if let Some(&k) = idx.get(&i) {
            terms.push((k, backend::post_matrix(&y.diff(i), sys.unknown(k), &target)));
        }
        if let Some(&k) = idx.get(&(i + 1)) {
            terms.push((k, backend::pre_matrix(&x.diff(i), sys.unknown(k), &target).neg()));
        }
        sys.add_equation(terms, vec![field.zero(); target.dim()]);
    }
    let (_, null) = sys.solve_full().expect("homogeneous system is consistent");
    let mut flat = vec![field.zero(); sys.total_cols()];
    for j in 0..null.dim() {
        let c = random_scalar(field, rng);
        let col = null.basis.col(j);
        for (i, v) in col.iter().enumerate() {
            flat[i] = flat[i].add(&c.mul(v));
        }
    }
    let sols = sys.split_vector(&flat);
    let comps = idx.iter().map(|(i, k)| (*i, sols[*k].clone())).collect();
    ChainMap::new(x.clone(), y.clone(), comps).expect("sampled map commutes")
}

/// A random homotopy: arbitrary components one degree down.
pub fn random_homotopy(x: &Complex, y: &Complex, rng: &mut impl Rng) -> Homotopy {
    let mut comps = BTreeMap::new();
    for i in (x.lo.min(y.lo))..=(x.hi().max(y.hi()) + 1) {
        comps.insert(i, random_mor(&x.entry(i), &y.entry(i - 1), rng));
    }
    Homotopy { comps }
}

/// A homotopy idempotent on a direct sum: the projection onto the first
/// summand perturbed by the boundary of a random homotopy.
pub fn random_homotopy_idempotent(
    cfg: &SampleCfg,
    lo: i64,
    len: usize,
    rng: &mut impl Rng,
) -> (Complex, ChainMap) {
    let a = random_complex(cfg, lo, len, rng);
    let b = random_complex(cfg, lo, len, rng);
    let (sum, ia, _, pa, _) = a.direct_sum(&b).unwrap();
    let e0 = ia.compose(&pa);
    let h = random_homotopy(&sum, &sum, rng);
    let mut comps = BTreeMap::new();
    for i in sum.lo..=sum.hi() {
        let dh = compose(&sum.diff(i - 1), &h.at(i, &sum, &sum));
        let hd = compose(&h.at(i + 1, &sum, &sum), &sum.diff(i));
        comps.insert(i, backend::add(&e0.at(i), &backend::add(&dh, &hd)));
    }
    let e = ChainMap::new(sum.clone(), sum.clone(), comps).expect("perturbed projection commutes");
    (sum, e)
}

/// Random pair `(f, g)` with `rho ∘ f = g ∘ rho` for a given `rho`,
/// sampled from the kernel of the intertwining equations.
pub fn random_commuting_square(
    x: &Obj,
    y: &Obj,
    rho: &Mor,
    rng: &mut impl Rng,
) -> (Mor, Mor) {
    let field = x.field();
    let mut sys = BlockSystem::new(field);
    let hs_f = HomSpace::new(x, x).unwrap();
    let hs_g = HomSpace::new(y, y).unwrap();
    let f_idx = sys.add_unknown(hs_f);
    let g_idx = sys.add_unknown(hs_g);
    let target = HomSpace::new(x, y).unwrap();
    if target.dim() > 0 {
        let m_f = backend::post_matrix(rho, sys.unknown(f_idx), &target);
        let m_g = backend::pre_matrix(rho, sys.unknown(g_idx), &target).neg();
        sys.add_equation(vec![(f_idx, m_f), (g_idx, m_g)], vec![field.zero(); target.dim()]);
    }
    let (_, null) = sys.solve_full().expect("homogeneous");
    let mut flat = vec![field.zero(); sys.total_cols()];
    for j in 0..null.dim() {
        let c = random_scalar(field, rng);
        let col = null.basis.col(j);
        for (i, v) in col.iter().enumerate() {
            flat[i] = flat[i].add(&c.mul(v));
        }
    }
    let sols = sys.split_vector(&flat);
    (sols[f_idx].clone(), sols[g_idx].clone())
}
