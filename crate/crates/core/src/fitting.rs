//! Canonical decomposition of an endomorphism into an invertible part
//! and a nilpotent part, its degreewise extension to chain complexes,
//! and splitting of homotopy idempotents via the geometric series on the
//! locally nilpotent half.

use crate::backend::{
    self, admissible_factorization, compose, direct_sum, kernel_of_epi, two_sided_inverse, Backend,
    ExactStructure, Mor, Obj,
};
use crate::complex::{find_homotopy, ChainMap, Complex, Homotopy};
use crate::error::Error;
use crate::matrix;
use std::collections::BTreeMap;

/// `V = V' ⊕ V''` with the endomorphism invertible on `V'` and nilpotent
/// on `V''`; the stabilized power is the nilpotence index.
#[derive(Clone, Debug)]
pub struct FittingDecomposition {
    pub invertible_part: Obj,
    pub nilpotent_part: Obj,
    pub include_inv: Mor,
    pub include_nil: Mor,
    pub project_inv: Mor,
    pub project_nil: Mor,
    pub on_inv: Mor,
    pub on_nil: Mor,
    pub nilpotence_index: usize,
}

fn kernel_rank(f: &Mor) -> usize {
    match f.src.backend() {
        Backend::FinVect => {
            let (k, _, _) = matrix::kernel_image(f.mat());
            k.dim()
        }
        Backend::VectP1 | Backend::VectNodal => {
            crate::backend::vectp1::graded_kernel(f.forms()).0.len()
        }
        Backend::DualMod => unreachable!("checked by the caller"),
    }
}

fn power(f: &Mor, n: usize) -> Mor {
    let mut acc = Mor::identity(&f.src);
    for _ in 0..n {
        acc = compose(f, &acc);
    }
    acc
}

/// Decomposes an endomorphism of a vector space or a bundle along the
/// stabilized kernels and images of its powers. Stabilization is
/// detected by kernel-rank equality at consecutive powers; ranks grow
/// strictly until stable, so the index is at most the rank of the object.
pub fn fitting_decompose(f: &Mor) -> Result<FittingDecomposition, Error> {
    if f.src != f.dst {
        return Err(Error::DimensionMismatch("not an endomorphism".into()));
    }
    if f.src.backend() == Backend::DualMod {
        return Err(Error::BackendMismatch(
            "the decomposition is implemented for vector spaces and curve bundles".into(),
        ));
    }
    let size = f.src.size();
    let mut n = 0;
    let mut prev_rank = 0; // kernel of the identity
    loop {
        let next_rank = kernel_rank(&power(f, n + 1));
        if next_rank == prev_rank {
            break;
        }
        prev_rank = next_rank;
        n += 1;
        if n > size {
            return Err(Error::Invalid("kernel ranks failed to stabilize".into()));
        }
    }
    let fn_pow = power(f, n);
    let inv_fac = admissible_factorization(&fn_pow, ExactStructure::Ambient)
        .map_err(|e| Error::Invalid(format!("stabilized image is not a summand: {e}")))?;
    let invertible_part = inv_fac.mid;
    let include_inv = inv_fac.mono;
    let (nilpotent_part, include_nil) = kernel_of_epi(&fn_pow);
    // certify V = V' ⊕ V''
    let (sum, _, projs) = direct_sum(&[invertible_part.clone(), nilpotent_part.clone()])?;
    let glue = backend::add(&compose(&include_inv, &projs[0]), &compose(&include_nil, &projs[1]));
    let glue = Mor { src: sum, ..glue };
    let split = two_sided_inverse(&glue)
        .ok_or_else(|| Error::Invalid("stabilized kernel and image do not split the object".into()))?;
    let project_inv = compose(&projs[0], &split);
    let project_nil = compose(&projs[1], &split);
    let on_inv = backend::solve_post(&include_inv, &compose(f, &include_inv))
        .ok_or_else(|| Error::Invalid("endomorphism does not preserve the stabilized image".into()))?;
    let on_nil = backend::solve_post(&include_nil, &compose(f, &include_nil))
        .ok_or_else(|| Error::Invalid("endomorphism does not preserve the stabilized kernel".into()))?;
    if two_sided_inverse(&on_inv).is_none() {
        return Err(Error::Invalid("restriction to the stabilized image is not invertible".into()));
    }
    if !power(&on_nil, n).is_zero() {
        return Err(Error::Invalid("restriction to the stabilized kernel is not nilpotent".into()));
    }
    Ok(FittingDecomposition {
        invertible_part,
        nilpotent_part,
        include_inv,
        include_nil,
        project_inv,
        project_nil,
        on_inv,
        on_nil,
        nilpotence_index: n,
    })
}

/// Degreewise decomposition of a chain endomorphism: entries split by
/// the decomposition of each component, and commutation with the
/// differentials forces the differentials to split along with them.
#[derive(Clone, Debug)]
pub struct ComplexFitting {
    pub invertible_summand: Complex,
    pub nilpotent_summand: Complex,
    pub include_inv: ChainMap,
    pub include_nil: ChainMap,
    pub project_inv: ChainMap,
    pub project_nil: ChainMap,
    pub on_inv: ChainMap,
    pub on_nil: ChainMap,
    /// Per-degree nilpotence indices of the nilpotent half.
    pub indices: Vec<(i64, usize)>,
}

pub fn fitting_decompose_complex(f: &ChainMap) -> Result<ComplexFitting, Error> {
    if f.src != f.dst {
        return Err(Error::DimensionMismatch("not a chain endomorphism".into()));
    }
    let x = f.src.clone();
    let mut per_degree: BTreeMap<i64, FittingDecomposition> = BTreeMap::new();
    for i in x.lo..=x.hi() {
        per_degree.insert(i, fitting_decompose(&f.at(i))?);
    }
    let build = |inv_side: bool| -> Result<(Complex, ChainMap, ChainMap, ChainMap), Error> {
        let entries: Vec<Obj> = (x.lo..=x.hi())
            .map(|i| {
                let d = &per_degree[&i];
                if inv_side { d.invertible_part.clone() } else { d.nilpotent_part.clone() }
            })
            .collect();
        let mut diffs = Vec::new();
        for i in x.lo..x.hi() {
            let d_here = &per_degree[&i];
            let d_next = &per_degree[&(i + 1)];
            let (incl, proj_next, proj_cross) = if inv_side {
                (&d_here.include_inv, &d_next.project_inv, &d_next.project_nil)
            } else {
                (&d_here.include_nil, &d_next.project_nil, &d_next.project_inv)
            };
            let restricted = compose(proj_next, &compose(&x.diff(i), incl));
            let cross = compose(proj_cross, &compose(&x.diff(i), incl));
            if !cross.is_zero() {
                return Err(Error::Invalid(
                    "differential does not respect the canonical decomposition".into(),
                ));
            }
            diffs.push(restricted);
        }
        let summand = Complex::new_in(x.structure, x.lo, entries, diffs)?;
        let mut inc = BTreeMap::new();
        let mut proj = BTreeMap::new();
        let mut on = BTreeMap::new();
        for i in x.lo..=x.hi() {
            let d = &per_degree[&i];
            if inv_side {
                inc.insert(i, d.include_inv.clone());
                proj.insert(i, d.project_inv.clone());
                on.insert(i, d.on_inv.clone());
            } else {
                inc.insert(i, d.include_nil.clone());
                proj.insert(i, d.project_nil.clone());
                on.insert(i, d.on_nil.clone());
            }
        }
        let include = ChainMap::new(summand.clone(), x.clone(), inc)?;
        let project = ChainMap::new(x.clone(), summand.clone(), proj)?;
        let on_map = ChainMap::new(summand.clone(), summand.clone(), on)?;
        Ok((summand, include, project, on_map))
    };
    let (invertible_summand, include_inv, project_inv, on_inv) = build(true)?;
    let (nilpotent_summand, include_nil, project_nil, on_nil) = build(false)?;
    let indices = (x.lo..=x.hi()).map(|i| (i, per_degree[&i].nilpotence_index)).collect();
    Ok(ComplexFitting {
        invertible_summand,
        nilpotent_summand,
        include_inv,
        include_nil,
        project_inv,
        project_nil,
        on_inv,
        on_nil,
        indices,
    })
}

/// A split homotopy idempotent: a direct summand with inclusion and
/// projection realizing the idempotent up to explicit homotopies.
#[derive(Clone, Debug)]
pub struct IdempotentSplitting {
    pub piece: Complex,
    pub include: ChainMap,
    pub project: ChainMap,
    /// Witness that the input squares to itself up to homotopy.
    pub idem_witness: Homotopy,
    /// Witness `include ∘ project ≃ e`. (`project ∘ include` is the
    /// identity exactly.)
    pub realizes: Homotopy,
    /// Per-degree nilpotence indices bounding the geometric series.
    pub indices: Vec<(i64, usize)>,
    /// Number of terms of the truncated geometric series actually used.
    pub series_terms: usize,
}

fn chain_power(e: &ChainMap, n: usize) -> ChainMap {
    let mut acc = ChainMap::identity(&e.src);
    for _ in 0..n {
        acc = e.compose(&acc);
    }
    acc
}

/// Splits a homotopy idempotent. The invertible half of the canonical
/// decomposition is homotopic to the identity, and the locally nilpotent
/// half is null-homotopic through the factorization
/// `e2 = (e2 - e2^2) ∘ (1 + e2 + e2^2 + ...)`, whose truncation never
/// needs more terms than the largest local nilpotence index.
pub fn split_homotopy_idempotent(e: &ChainMap) -> Result<IdempotentSplitting, Error> {
    let ee = e.compose(e);
    let idem_witness = find_homotopy(&ee, e).ok_or(Error::NotHomotopyIdempotent)?;
    let fit = fitting_decompose_complex(e)?;
    // invertible half: e1^2 - e1 is null-homotopic, hence e1 ≃ id
    let e1 = &fit.on_inv;
    let h_restrict = idem_witness.pre(&fit.include_inv).post(&fit.project_inv);
    let inv_comps: BTreeMap<i64, Mor> = (fit.invertible_summand.lo..=fit.invertible_summand.hi())
        .map(|i| {
            let m = two_sided_inverse(&e1.at(i)).expect("invertible half inverts degreewise");
            (i, m)
        })
        .collect();
    let e1_inv =
        ChainMap::new(fit.invertible_summand.clone(), fit.invertible_summand.clone(), inv_comps)?;
    let h_e1_id = h_restrict.post(&e1_inv);
    debug_assert!(h_e1_id.witnesses(e1, &ChainMap::identity(&fit.invertible_summand)));
    // nilpotent half: e2 = (e2 - e2^2) ∘ series and e2 - e2^2 ≃ 0
    let max_index = fit.indices.iter().map(|(_, n)| *n).max().unwrap_or(0).max(1);
    let mut series = ChainMap::identity(&fit.nilpotent_summand);
    for k in 1..max_index {
        series = series.add(&chain_power(&fit.on_nil, k));
    }
    let field = e.src.entries[0].field();
    let minus_one = field.scalar(-1);
    let h_nil = idem_witness.pre(&fit.include_nil).post(&fit.project_nil).scale(&minus_one);
    let h_e2_zero = h_nil.pre(&series);
    debug_assert!(h_e2_zero.witnesses(
        &fit.on_nil,
        &ChainMap::zero(&fit.nilpotent_summand, &fit.nilpotent_summand)
    ));
    // e - include∘project = inc1 (e1 - id) proj1 + inc2 e2 proj2
    let part1 = h_e1_id.pre(&fit.project_inv).post(&fit.include_inv);
    let part2 = h_e2_zero.pre(&fit.project_nil).post(&fit.include_nil);
    let realizes = part1.add(&part2, &e.src, &e.src);
    let ip = fit.include_inv.compose(&fit.project_inv);
    if !realizes.witnesses(e, &ip) {
        return Err(Error::Invalid("splitting witness failed validation".into()));
    }
    Ok(IdempotentSplitting {
        piece: fit.invertible_summand.clone(),
        include: fit.include_inv.clone(),
        project: fit.project_inv.clone(),
        idem_witness,
        realizes,
        indices: fit.indices.clone(),
        series_terms: max_index,
    })
}
