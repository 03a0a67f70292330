//! Bounded cochain complexes over any backend: chain maps, shifts, cones,
//! homotopy search, acyclicity certification, split contractions and
//! support truncation.
//!
//! A complex is acyclic when every differential factors as an admissible
//! epi onto a linking object followed by an admissible mono, and the
//! resulting short sequences are exact. This is decided constructively,
//! producing either a witness (the linking objects with their inclusion
//! and projection maps) or a pinpointed obstruction.

use crate::backend::{
    self, admissible_factorization, classify_in, compose, direct_sum, sub, two_sided_inverse,
    ExactStructure, HomSpace, Mor, Obj, Verdict,
};
use crate::error::{AcyclicityObstruction, Error};
use crate::field::Scalar;
use crate::matrix::{self, Matrix, SubspaceBasis};
use std::collections::BTreeMap;

/// A bounded cochain complex with explicit support `[lo, lo + entries.len())`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    pub structure: ExactStructure,
    pub lo: i64,
    pub entries: Vec<Obj>,
    pub diffs: Vec<Mor>,
}

impl Complex {
    /// Builds a complex, checking that differentials are adjacent and
    /// compose to zero.
    pub fn new(lo: i64, entries: Vec<Obj>, diffs: Vec<Mor>) -> Result<Complex, Error> {
        Self::new_in(ExactStructure::Ambient, lo, entries, diffs)
    }

    pub fn new_in(
        structure: ExactStructure,
        lo: i64,
        entries: Vec<Obj>,
        diffs: Vec<Mor>,
    ) -> Result<Complex, Error> {
        if entries.is_empty() {
            return Err(Error::Invalid("a complex needs at least one entry".into()));
        }
        if diffs.len() + 1 != entries.len() {
            return Err(Error::DimensionMismatch("differential count".into()));
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.src != entries[k] || d.dst != entries[k + 1] {
                return Err(Error::DimensionMismatch(format!(
                    "differential at degree {} does not match the entries",
                    lo + k as i64
                )));
            }
        }
        for k in 0..diffs.len().saturating_sub(1) {
            if !compose(&diffs[k + 1], &diffs[k]).is_zero() {
                return Err(Error::Invalid(format!(
                    "differentials do not compose to zero at degree {}",
                    lo + k as i64
                )));
            }
        }
        Ok(Complex { structure, lo, entries, diffs })
    }

    /// The zero complex in the backend of `like`.
    pub fn zero_like(like: &Obj, structure: ExactStructure) -> Complex {
        Complex { structure, lo: 0, entries: vec![like.zero_like()], diffs: Vec::new() }
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.entries.len() as i64 - 1
    }

    pub fn entry(&self, i: i64) -> Obj {
        if i < self.lo || i > self.hi() {
            self.entries[0].zero_like()
        } else {
            self.entries[(i - self.lo) as usize].clone()
        }
    }

    pub fn diff(&self, i: i64) -> Mor {
        if i >= self.lo && i < self.hi() {
            self.diffs[(i - self.lo) as usize].clone()
        } else {
            Mor::zero(&self.entry(i), &self.entry(i + 1))
        }
    }

    pub fn is_zero_complex(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Drops zero objects at both ends of the support.
    pub fn trimmed(&self) -> Complex {
        let mut lo = 0usize;
        let mut hi = self.entries.len();
        while lo < hi && self.entries[lo].is_zero() {
            lo += 1;
        }
        while hi > lo && self.entries[hi - 1].is_zero() {
            hi -= 1;
        }
        if lo == hi {
            return Complex::zero_like(&self.entries[0], self.structure);
        }
        Complex {
            structure: self.structure,
            lo: self.lo + lo as i64,
            entries: self.entries[lo..hi].to_vec(),
            diffs: self.diffs[lo..hi - 1].to_vec(),
        }
    }

    /// Shift by `n`: the degree-`i` entry becomes the old degree-`i+n`
    /// entry and differentials pick up the sign `(-1)^n`.
    pub fn shift(&self, n: i64) -> Complex {
        let sign_flip = n.rem_euclid(2) == 1;
        let field = self.entries[0].field();
        let minus_one = field.scalar(-1);
        let diffs = self
            .diffs
            .iter()
            .map(|d| if sign_flip { backend::scale(d, &minus_one) } else { d.clone() })
            .collect();
        Complex { structure: self.structure, lo: self.lo - n, entries: self.entries.clone(), diffs }
    }

    /// Degreewise direct sum.
    pub fn direct_sum(&self, other: &Complex) -> Result<(Complex, ChainMap, ChainMap, ChainMap, ChainMap), Error> {
        assert_eq!(self.structure, other.structure);
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let mut entries = Vec::new();
        let mut incl_a = BTreeMap::new();
        let mut incl_b = BTreeMap::new();
        let mut proj_a = BTreeMap::new();
        let mut proj_b = BTreeMap::new();
        let mut sums: Vec<Obj> = Vec::new();
        for i in lo..=hi {
            let (s, incs, projs) = direct_sum(&[self.entry(i), other.entry(i)])?;
            entries.push(s.clone());
            incl_a.insert(i, incs[0].clone());
            incl_b.insert(i, incs[1].clone());
            proj_a.insert(i, projs[0].clone());
            proj_b.insert(i, projs[1].clone());
            sums.push(s);
        }
        let mut diffs = Vec::new();
        for i in lo..hi {
            let d = backend::add(
                &compose(&incl_a[&(i + 1)], &compose(&self.diff(i), &proj_a[&i])),
                &compose(&incl_b[&(i + 1)], &compose(&other.diff(i), &proj_b[&i])),
            );
            diffs.push(d);
        }
        let sum = Complex::new_in(self.structure, lo, entries, diffs)?;
        let ia = ChainMap::new(self.clone(), sum.clone(), incl_a)?;
        let ib = ChainMap::new(other.clone(), sum.clone(), incl_b)?;
        let pa = ChainMap::new(sum.clone(), self.clone(), proj_a)?;
        let pb = ChainMap::new(sum.clone(), other.clone(), proj_b)?;
        Ok((sum, ia, ib, pa, pb))
    }

    /// Re-tags the complex with the split exact structure.
    pub fn split_wrap(&self) -> Complex {
        Complex { structure: ExactStructure::Split, ..self.clone() }
    }
}

/// A degreewise family of morphisms whose squares with the differentials
/// commute.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    pub src: Complex,
    pub dst: Complex,
    comps: BTreeMap<i64, Mor>,
}

impl ChainMap {
    pub fn new(src: Complex, dst: Complex, comps: BTreeMap<i64, Mor>) -> Result<ChainMap, Error> {
        let f = ChainMap { src, dst, comps };
        for (i, m) in &f.comps {
            if m.src != f.src.entry(*i) || m.dst != f.dst.entry(*i) {
                return Err(Error::DimensionMismatch(format!("component at degree {i}")));
            }
        }
        let lo = f.src.lo.min(f.dst.lo) - 1;
        let hi = f.src.hi().max(f.dst.hi()) + 1;
        for i in lo..hi {
            let lhs = compose(&f.dst.diff(i), &f.at(i));
            let rhs = compose(&f.at(i + 1), &f.src.diff(i));
            if lhs != rhs {
                return Err(Error::Invalid(format!("square at degree {i} does not commute")));
            }
        }
        Ok(f)
    }

    pub fn at(&self, i: i64) -> Mor {
        self.comps
            .get(&i)
            .cloned()
            .unwrap_or_else(|| Mor::zero(&self.src.entry(i), &self.dst.entry(i)))
    }

    pub fn identity(c: &Complex) -> ChainMap {
        let comps = (c.lo..=c.hi()).map(|i| (i, Mor::identity(&c.entry(i)))).collect();
        ChainMap { src: c.clone(), dst: c.clone(), comps }
    }

    pub fn zero(src: &Complex, dst: &Complex) -> ChainMap {
        ChainMap { src: src.clone(), dst: dst.clone(), comps: BTreeMap::new() }
    }

    pub fn compose(&self, first: &ChainMap) -> ChainMap {
        assert_eq!(first.dst, self.src, "chain map composition mismatch");
        let lo = first.src.lo.min(self.dst.lo);
        let hi = first.src.hi().max(self.dst.hi());
        let comps = (lo..=hi).map(|i| (i, compose(&self.at(i), &first.at(i)))).collect();
        ChainMap { src: first.src.clone(), dst: self.dst.clone(), comps }
    }

    pub fn add(&self, other: &ChainMap) -> ChainMap {
        assert_eq!((&self.src, &self.dst), (&other.src, &other.dst));
        let lo = self.src.lo.min(self.dst.lo);
        let hi = self.src.hi().max(self.dst.hi());
        let comps = (lo..=hi).map(|i| (i, backend::add(&self.at(i), &other.at(i)))).collect();
        ChainMap { src: self.src.clone(), dst: self.dst.clone(), comps }
    }

    pub fn sub(&self, other: &ChainMap) -> ChainMap {
        assert_eq!((&self.src, &self.dst), (&other.src, &other.dst));
        let lo = self.src.lo.min(self.dst.lo);
        let hi = self.src.hi().max(self.dst.hi());
        let comps = (lo..=hi).map(|i| (i, sub(&self.at(i), &other.at(i)))).collect();
        ChainMap { src: self.src.clone(), dst: self.dst.clone(), comps }
    }

    pub fn scale(&self, c: &Scalar) -> ChainMap {
        let comps = self.comps.iter().map(|(i, m)| (*i, backend::scale(m, c))).collect();
        ChainMap { src: self.src.clone(), dst: self.dst.clone(), comps }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.values().all(|m| m.is_zero())
    }

    /// Shifts both ends by `n`.
    pub fn shift(&self, n: i64) -> ChainMap {
        let comps = self.comps.iter().map(|(i, m)| (i - n, m.clone())).collect();
        ChainMap { src: self.src.shift(n), dst: self.dst.shift(n), comps }
    }

    /// The same components viewed between re-tagged complexes.
    pub fn with_structure(&self, structure: ExactStructure) -> ChainMap {
        ChainMap {
            src: Complex { structure, ..self.src.clone() },
            dst: Complex { structure, ..self.dst.clone() },
            comps: self.comps.clone(),
        }
    }
}

/// A homotopy: maps one degree down, witnessing `f - g = dh + hd`.
#[derive(Clone, Debug)]
pub struct Homotopy {
    pub comps: BTreeMap<i64, Mor>, // degree i: src entry i -> dst entry i-1
}

impl Homotopy {
    pub fn at(&self, i: i64, src: &Complex, dst: &Complex) -> Mor {
        self.comps
            .get(&i)
            .cloned()
            .unwrap_or_else(|| Mor::zero(&src.entry(i), &dst.entry(i - 1)))
    }

    /// Checks `f - g = d∘h + h∘d` degreewise, exactly.
    pub fn witnesses(&self, f: &ChainMap, g: &ChainMap) -> bool {
        let (src, dst) = (&f.src, &f.dst);
        let lo = src.lo.min(dst.lo) - 1;
        let hi = src.hi().max(dst.hi()) + 1;
        for i in lo..=hi {
            let dh = compose(&dst.diff(i - 1), &self.at(i, src, dst));
            let hd = compose(&self.at(i + 1, src, dst), &src.diff(i));
            let rhs = backend::add(&dh, &hd);
            let lhs = sub(&f.at(i), &g.at(i));
            if lhs != rhs {
                return false;
            }
        }
        true
    }

    /// Post-compose every component with a chain map `u` (so a homotopy
    /// for `f ≃ g` becomes one for `u∘f ≃ u∘g`).
    pub fn post(&self, u: &ChainMap) -> Homotopy {
        let comps = self.comps.iter().map(|(i, m)| (*i, compose(&u.at(i - 1), m))).collect();
        Homotopy { comps }
    }

    /// Pre-compose every component with a chain map `u`.
    pub fn pre(&self, u: &ChainMap) -> Homotopy {
        let comps = self.comps.iter().map(|(i, m)| (*i, compose(m, &u.at(*i)))).collect();
        Homotopy { comps }
    }

    pub fn scale(&self, c: &Scalar) -> Homotopy {
        let comps = self.comps.iter().map(|(i, m)| (*i, backend::scale(m, c))).collect();
        Homotopy { comps }
    }

    pub fn add(&self, other: &Homotopy, src: &Complex, dst: &Complex) -> Homotopy {
        let mut comps = BTreeMap::new();
        let keys: Vec<i64> = self.comps.keys().chain(other.comps.keys()).cloned().collect();
        for i in keys {
            comps.insert(i, backend::add(&self.at(i, src, dst), &other.at(i, src, dst)));
        }
        Homotopy { comps }
    }
}

// ---------------------------------------------------------------------------
// Linear systems over hom spaces
// ---------------------------------------------------------------------------

/// Sparse block linear system whose unknowns are morphisms, expressed in
/// hom-space coordinates. Used for homotopy search, chain-map search and
/// every lifting problem in the crate.
pub struct BlockSystem {
    unknowns: Vec<HomSpace>,
    offsets: Vec<usize>,
    total_cols: usize,
    rows: Vec<(Vec<(usize, Matrix)>, Vec<Scalar>)>,
    field: crate::field::Field,
}

impl BlockSystem {
    pub fn new(field: crate::field::Field) -> BlockSystem {
        BlockSystem { unknowns: Vec::new(), offsets: Vec::new(), total_cols: 0, rows: Vec::new(), field }
    }

    pub fn add_unknown(&mut self, hs: HomSpace) -> usize {
        let idx = self.unknowns.len();
        self.offsets.push(self.total_cols);
        self.total_cols += hs.dim();
        self.unknowns.push(hs);
        idx
    }

    pub fn unknown(&self, idx: usize) -> &HomSpace {
        &self.unknowns[idx]
    }

    /// Adds the equation `sum_k terms[k].1 * u_{terms[k].0} = rhs`.
    pub fn add_equation(&mut self, terms: Vec<(usize, Matrix)>, rhs: Vec<Scalar>) {
        for (idx, m) in &terms {
            assert_eq!(m.cols(), self.unknowns[*idx].dim());
            assert_eq!(m.rows(), rhs.len());
        }
        self.rows.push((terms, rhs));
    }

    fn assemble(&self) -> (Matrix, Matrix) {
        let total_rows: usize = self.rows.iter().map(|(_, r)| r.len()).sum();
        let mut a = Matrix::zeros(self.field, total_rows, self.total_cols);
        let mut b = Matrix::zeros(self.field, total_rows, 1);
        let mut r0 = 0;
        for (terms, rhs) in &self.rows {
            for (i, v) in rhs.iter().enumerate() {
                b.set(r0 + i, 0, v.clone());
            }
            for (idx, m) in terms {
                let c0 = self.offsets[*idx];
                for i in 0..m.rows() {
                    for j in 0..m.cols() {
                        let cur = a.get(r0 + i, c0 + j).add(m.get(i, j));
                        a.set(r0 + i, c0 + j, cur);
                    }
                }
            }
            r0 += rhs.len();
        }
        (a, b)
    }

    /// One solution per unknown, if the system is consistent.
    pub fn solve(&self) -> Option<Vec<Mor>> {
        let (sol, _) = self.solve_full()?;
        Some(sol)
    }

    /// Solution plus the nullspace of the assembled system (for sampling
    /// the full solution set).
    pub fn solve_full(&self) -> Option<(Vec<Mor>, SubspaceBasis)> {
        let (a, b) = self.assemble();
        let (x, null) = matrix::solve_affine(&a, &b)?;
        Some((self.split_vector(&x), null))
    }

    /// Interprets a flat coordinate vector as one morphism per unknown.
    pub fn split_vector(&self, x: &[Scalar]) -> Vec<Mor> {
        assert_eq!(x.len(), self.total_cols);
        self.unknowns
            .iter()
            .zip(self.offsets.iter())
            .map(|(hs, &off)| hs.from_coords(&x[off..off + hs.dim()]))
            .collect()
    }

    pub fn total_cols(&self) -> usize {
        self.total_cols
    }

    pub fn total_rows(&self) -> usize {
        self.rows.iter().map(|(_, r)| r.len()).sum()
    }
}

/// Searches for a homotopy between two chain maps with the same source
/// and target, solving one global linear system across all degrees.
pub fn find_homotopy(f: &ChainMap, g: &ChainMap) -> Option<Homotopy> {
    assert_eq!(f.src, g.src, "homotopy shape mismatch");
    assert_eq!(f.dst, g.dst, "homotopy shape mismatch");
    let (src, dst) = (&f.src, &f.dst);
    let field = src.entries[0].field();
    let lo = src.lo.min(dst.lo);
    let hi = src.hi().max(dst.hi()) + 1;
    let mut sys = BlockSystem::new(field);
    let mut unk: BTreeMap<i64, usize> = BTreeMap::new();
    for i in lo..=hi {
        let hs = HomSpace::new(&src.entry(i), &dst.entry(i - 1)).ok()?;
        if hs.dim() > 0 {
            unk.insert(i, sys.add_unknown(hs));
        }
    }
    for i in (lo - 1)..=hi {
        let target = HomSpace::new(&src.entry(i), &dst.entry(i)).ok()?;
        if target.dim() == 0 {
            continue;
        }
        let rhs = target.to_coords(&sub(&f.at(i), &g.at(i)));
        let mut terms = Vec::new();
        if let Some(&k) = unk.get(&i) {
            let m = backend::post_matrix(&dst.diff(i - 1), sys.unknown(k), &target);
            terms.push((k, m));
        }
        if let Some(&k) = unk.get(&(i + 1)) {
            let m = backend::pre_matrix(&src.diff(i), sys.unknown(k), &target);
            terms.push((k, m));
        }
        sys.add_equation(terms, rhs);
    }
    let sol = sys.solve()?;
    let mut comps = BTreeMap::new();
    for (i, k) in &unk {
        comps.insert(*i, sol[*k].clone());
    }
    let h = Homotopy { comps };
    debug_assert!(h.witnesses(f, g));
    Some(h)
}

/// Whether a complex is contractible, with the contraction as witness.
pub fn contraction(c: &Complex) -> Option<Homotopy> {
    let id = ChainMap::identity(c);
    let z = ChainMap::zero(c, c);
    find_homotopy(&id, &z)
}

// ---------------------------------------------------------------------------
// Mapping cones
// ---------------------------------------------------------------------------

/// The mapping cone of `f : X -> Y`, together with the inclusion of `Y`
/// and the projection onto the shift of `X`.
pub fn cone(f: &ChainMap) -> Result<(Complex, ChainMap, ChainMap), Error> {
    let (x, y) = (&f.src, &f.dst);
    assert_eq!(x.structure, y.structure);
    let lo = y.lo.min(x.lo - 1);
    let hi = y.hi().max(x.hi() - 1);
    let mut entries = Vec::new();
    let mut inc_y = BTreeMap::new();
    let mut proj_x = BTreeMap::new();
    let mut parts: BTreeMap<i64, (Mor, Mor, Mor, Mor)> = BTreeMap::new(); // (iY, iX, pY, pX)
    for i in lo..=hi {
        let (s, incs, projs) = direct_sum(&[y.entry(i), x.entry(i + 1)])?;
        entries.push(s);
        parts.insert(i, (incs[0].clone(), incs[1].clone(), projs[0].clone(), projs[1].clone()));
    }
    let field = x.entries[0].field();
    let minus_one = field.scalar(-1);
    let mut diffs = Vec::new();
    for i in lo..hi {
        let (_, _, ref p_y, ref p_x) = parts[&i];
        let (ref j_y, ref j_x, _, _) = parts[&(i + 1)];
        let a = compose(j_y, &compose(&y.diff(i), p_y));
        let b = compose(j_y, &compose(&f.at(i + 1), p_x));
        let c = compose(j_x, &backend::scale(&compose(&x.diff(i + 1), p_x), &minus_one));
        diffs.push(backend::add(&backend::add(&a, &b), &c));
    }
    let cone = Complex::new_in(x.structure, lo, entries, diffs)?;
    for i in lo..=hi {
        let (ref j_y, _, _, ref p_x) = parts[&i];
        inc_y.insert(i, j_y.clone());
        proj_x.insert(i, p_x.clone());
    }
    let incl = ChainMap::new(y.clone(), cone.clone(), inc_y)?;
    let shifted_x = x.shift(1);
    let proj = ChainMap::new(cone.clone(), shifted_x, proj_x)?;
    Ok((cone, incl, proj))
}

// ---------------------------------------------------------------------------
// Acyclicity
// ---------------------------------------------------------------------------

/// One admissible short exact sequence `0 -> K^i -> E^i -> K^{i+1} -> 0`.
#[derive(Clone, Debug)]
pub struct SesLink {
    pub sub: Obj,      // K^i
    pub include: Mor,  // K^i -> E^i
    pub project: Mor,  // E^i -> K^{i+1}
}

/// Degreewise factorization witnesses for an acyclic complex: the linking
/// objects with `d^i = include^{i+1} ∘ project^i`.
#[derive(Clone, Debug)]
pub struct AcyclicityWitness {
    pub lo: i64,
    pub links: Vec<SesLink>,
}

impl AcyclicityWitness {
    /// The linking object `K^i` (zero outside the support).
    pub fn link(&self, i: i64) -> Option<&SesLink> {
        if i < self.lo || i >= self.lo + self.links.len() as i64 {
            None
        } else {
            Some(&self.links[(i - self.lo) as usize])
        }
    }
}

/// Certifies acyclicity for the complex's exact structure, or reports the
/// first failing degree.
pub fn is_acyclic(c: &Complex) -> Result<AcyclicityWitness, AcyclicityObstruction> {
    let t = c.trimmed();
    if t.is_zero_complex() {
        return Ok(AcyclicityWitness { lo: t.lo, links: Vec::new() });
    }
    let lo = t.lo;
    let hi = t.hi();
    if lo == hi {
        return Err(AcyclicityObstruction::NotExactAt { degree: lo });
    }
    // factor every differential
    let mut mids: Vec<(Obj, Mor, Mor)> = Vec::new(); // at index k: K^{lo+k+1}
    for i in lo..hi {
        match admissible_factorization(&t.diff(i), t.structure) {
            Ok(f) => mids.push((f.mid, f.epi, f.mono)),
            Err(Error::NotAdmissible(ob)) => {
                return Err(AcyclicityObstruction::NotAdmissibleAt { degree: i, reason: ob })
            }
            Err(_) => return Err(AcyclicityObstruction::NotExactAt { degree: i }),
        }
    }
    let mut links = Vec::new();
    for i in lo..=hi {
        let k_lo: Option<&(Obj, Mor, Mor)> = if i == lo { None } else { Some(&mids[(i - lo - 1) as usize]) };
        let k_hi: Option<&(Obj, Mor, Mor)> = if i == hi { None } else { Some(&mids[(i - lo) as usize]) };
        let e = t.entry(i);
        match (k_lo, k_hi) {
            (None, Some((_, epi, _))) => {
                // bottom: the epi part must be an isomorphism
                if two_sided_inverse(epi).is_none() {
                    return Err(AcyclicityObstruction::NotExactAt { degree: i });
                }
                links.push(SesLink {
                    sub: e.zero_like(),
                    include: Mor::zero(&e.zero_like(), &e),
                    project: epi.clone(),
                });
            }
            (Some((mid, _, mono)), None) => {
                // top: the mono part must be an isomorphism
                if two_sided_inverse(mono).is_none() {
                    return Err(AcyclicityObstruction::NotExactAt { degree: i });
                }
                let _ = mid;
                links.push(SesLink {
                    sub: mid.clone(),
                    include: mono.clone(),
                    project: Mor::zero(&e, &e.zero_like()),
                });
            }
            (Some((mid, _, mono)), Some((_, epi, _))) => {
                // middle: image of the incoming mono must equal the kernel
                // of the outgoing epi, certified by mutually inverse
                // comparison maps through the kernel inclusion.
                let verdict = classify_in(epi, t.structure);
                let (_, kernel_mono) = match verdict {
                    Verdict::AdmEpi { kernel, mono } => (kernel, mono),
                    Verdict::Iso { .. } => {
                        // kernel is zero; exactness needs the mono to be zero too
                        if !mid.is_zero() {
                            return Err(AcyclicityObstruction::NotExactAt { degree: i });
                        }
                        links.push(SesLink { sub: mid.clone(), include: mono.clone(), project: epi.clone() });
                        continue;
                    }
                    _ => return Err(AcyclicityObstruction::NotExactAt { degree: i }),
                };
                let into_kernel = backend::solve_post(&kernel_mono, mono);
                let back = into_kernel.as_ref().and_then(two_sided_inverse);
                if into_kernel.is_none() || back.is_none() {
                    return Err(AcyclicityObstruction::NotExactAt { degree: i });
                }
                links.push(SesLink { sub: mid.clone(), include: mono.clone(), project: epi.clone() });
            }
            (None, None) => unreachable!("handled by the single-entry case"),
        }
    }
    Ok(AcyclicityWitness { lo, links })
}

// ---------------------------------------------------------------------------
// Split contraction
// ---------------------------------------------------------------------------

/// Decomposition of a split-acyclic complex into two-term identity pieces.
#[derive(Clone, Debug)]
pub struct SplitContraction {
    /// `(degree i, K^i)`: the piece `K -> K` sits in degrees `i-1, i`.
    pub pieces: Vec<(i64, Obj)>,
    /// Degreewise isomorphisms `K^i ⊕ K^{i+1} -> E^i`.
    pub isos: Vec<(i64, Mor)>,
    /// Null-homotopy of the identity assembled from the splittings.
    pub contraction: Homotopy,
}

/// Splits a complex carrying the split exact structure into two-term
/// identity pieces, with an explicit contraction.
pub fn split_contractible(c: &Complex) -> Result<SplitContraction, Error> {
    if c.structure != ExactStructure::Split {
        return Err(Error::Invalid("complex is not tagged with the split structure".into()));
    }
    let w = is_acyclic(c).map_err(|_| Error::NotSplitAcyclic)?;
    let t = c.trimmed();
    if t.is_zero_complex() {
        return Ok(SplitContraction {
            pieces: Vec::new(),
            isos: Vec::new(),
            contraction: Homotopy { comps: BTreeMap::new() },
        });
    }
    let (lo, hi) = (t.lo, t.hi());
    let mut pieces = Vec::new();
    let mut isos = Vec::new();
    let mut sections: BTreeMap<i64, Mor> = BTreeMap::new(); // sigma^i : K^{i+1} -> E^i
    let mut kpart: BTreeMap<i64, Mor> = BTreeMap::new(); // E^i -> K^i component
    for i in lo..=hi {
        let link = w.link(i).expect("in support");
        if !link.sub.is_zero() {
            pieces.push((i, link.sub.clone()));
        }
        let next_sub = w.link(i + 1).map(|l| l.sub.clone()).unwrap_or_else(|| t.entry(i).zero_like());
        let sigma = backend::solve_post(&link.project, &Mor::identity(&next_sub))
            .ok_or(Error::NotSplitAcyclic)?;
        let (sum, incs, projs) = direct_sum(&[link.sub.clone(), next_sub.clone()])?;
        let phi = backend::add(
            &compose(&link.include, &projs[0]),
            &compose(&sigma, &projs[1]),
        );
        let phi = Mor { src: sum.clone(), ..phi };
        let psi = two_sided_inverse(&phi).ok_or(Error::NotSplitAcyclic)?;
        kpart.insert(i, compose(&projs[0], &psi));
        sections.insert(i, sigma);
        isos.push((i, phi));
        let _ = incs;
    }
    let mut comps = BTreeMap::new();
    for i in (lo + 1)..=hi {
        // h^i = sigma^{i-1} ∘ (K^i component of E^i)
        let h = compose(&sections[&(i - 1)], &kpart[&i]);
        comps.insert(i, h);
    }
    let contraction = Homotopy { comps };
    let id = ChainMap::identity(&t);
    let z = ChainMap::zero(&t, &t);
    if !contraction.witnesses(&id, &z) {
        return Err(Error::NotSplitAcyclic);
    }
    Ok(SplitContraction { pieces, isos, contraction })
}

// ---------------------------------------------------------------------------
// Support truncation
// ---------------------------------------------------------------------------

/// A roof connecting a complex to its truncation: two honest chain maps
/// out of a common middle, each with an acyclic cone.
#[derive(Clone, Debug)]
pub struct TruncationRoof {
    pub truncated: Complex,
    pub mid: Complex,
    pub to_original: ChainMap,
    pub to_truncated: ChainMap,
    pub cone_to_original: AcyclicityWitness,
    pub cone_to_truncated: AcyclicityWitness,
}

/// Replaces a complex, exact outside `[a, b]`, by one supported in
/// `[a, b]`, connected to the original through a certified roof.
pub fn support_truncate(c: &Complex, a: i64, b: i64) -> Result<TruncationRoof, Error> {
    if a > b {
        return Err(Error::Invalid("empty window".into()));
    }
    let mut top = c.trimmed();
    let mut top_map = ChainMap::identity(&top); // top -> c
    let original = top.clone();
    // cut from above: replace E^{hi-1} -> E^{hi} by ker(d^{hi-1})
    while top.hi() > b && !top.is_zero_complex() {
        let hi = top.hi();
        if top.entry(hi).is_zero() {
            top = top.trimmed();
            continue;
        }
        let d = top.diff(hi - 1);
        let verdict = classify_in(&d, top.structure);
        let (kernel, kappa) = match verdict {
            Verdict::AdmEpi { kernel, mono } => (kernel, mono),
            Verdict::Iso { .. } => (top.entry(hi).zero_like(), Mor::zero(&top.entry(hi).zero_like(), &top.entry(hi - 1))),
            _ => return Err(Error::NotExactOutsideWindow { degree: hi }),
        };
        let mut entries: Vec<Obj> = (top.lo..hi - 1).map(|i| top.entry(i)).collect();
        entries.push(kernel.clone());
        let mut diffs: Vec<Mor> = (top.lo..hi - 2).map(|i| top.diff(i)).collect();
        if hi - 2 >= top.lo {
            let into_kernel = backend::solve_post(&kappa, &top.diff(hi - 2))
                .ok_or(Error::NotExactOutsideWindow { degree: hi - 1 })?;
            diffs.push(into_kernel);
        }
        let new_top = Complex::new_in(top.structure, top.lo, entries, diffs)?;
        let mut comps = BTreeMap::new();
        for i in new_top.lo..hi - 1 {
            comps.insert(i, Mor::identity(&new_top.entry(i)));
        }
        comps.insert(hi - 1, kappa);
        let step = ChainMap::new(new_top.clone(), top.clone(), comps)?;
        top_map = top_map.compose(&step);
        top = new_top.trimmed();
        top_map = ChainMap {
            src: top.clone(),
            dst: top_map.dst.clone(),
            comps: top_map.comps.clone(),
        };
    }
    // cut from below on the middle complex: replace E^{lo} -> E^{lo+1}
    // by coker(d^{lo})
    let mid = top.clone();
    let mut bot = top.clone();
    let mut bot_map = ChainMap::identity(&bot); // mid -> bot
    while bot.lo < a && !bot.is_zero_complex() {
        let lo = bot.lo;
        if bot.entry(lo).is_zero() {
            bot = bot.trimmed();
            continue;
        }
        let d = bot.diff(lo);
        let verdict = classify_in(&d, bot.structure);
        let (coker, q) = match verdict {
            Verdict::AdmMono { cokernel, epi } => (cokernel, epi),
            Verdict::Iso { .. } => (bot.entry(lo).zero_like(), Mor::zero(&bot.entry(lo + 1), &bot.entry(lo).zero_like())),
            _ => return Err(Error::NotExactOutsideWindow { degree: lo }),
        };
        let mut entries: Vec<Obj> = vec![coker.clone()];
        entries.extend((lo + 2..=bot.hi()).map(|i| bot.entry(i)));
        let mut diffs: Vec<Mor> = Vec::new();
        if lo + 2 <= bot.hi() {
            let induced = backend::solve_pre(&q, &bot.diff(lo + 1))
                .ok_or(Error::NotExactOutsideWindow { degree: lo + 1 })?;
            diffs.push(induced);
            diffs.extend((lo + 2..bot.hi()).map(|i| bot.diff(i)));
        }
        let new_bot = Complex::new_in(bot.structure, lo + 1, entries, diffs)?;
        let mut comps = BTreeMap::new();
        comps.insert(lo + 1, q);
        for i in lo + 2..=new_bot.hi() {
            comps.insert(i, Mor::identity(&new_bot.entry(i)));
        }
        let step = ChainMap::new(bot.clone(), new_bot.clone(), comps)?;
        bot_map = step.compose(&bot_map);
        bot = new_bot.trimmed();
        bot_map = ChainMap {
            src: bot_map.src.clone(),
            dst: bot.clone(),
            comps: bot_map.comps.clone(),
        };
    }
    let _ = original;
    let (cone_up, _, _) = cone(&top_map)?;
    let cone_to_original =
        is_acyclic(&cone_up).map_err(|_| Error::NotExactOutsideWindow { degree: top.hi() })?;
    let (cone_down, _, _) = cone(&bot_map)?;
    let cone_to_truncated =
        is_acyclic(&cone_down).map_err(|_| Error::NotExactOutsideWindow { degree: bot.lo })?;
    Ok(TruncationRoof {
        truncated: bot,
        mid,
        to_original: top_map,
        to_truncated: bot_map,
        cone_to_original,
        cone_to_truncated,
    })
}

// ---------------------------------------------------------------------------
// Homotopy equivalences
// ---------------------------------------------------------------------------

/// Witness of a homotopy equivalence along a given chain map.
#[derive(Clone, Debug)]
pub struct Equivalence {
    pub forward: ChainMap,
    pub backward: ChainMap,
    pub on_src: Homotopy, // backward ∘ forward ≃ id_src
    pub on_dst: Homotopy, // forward ∘ backward ≃ id_dst
}

/// Finds an inverse-up-to-homotopy for `u` by solving one linear system
/// for the backward map and both homotopies simultaneously.
pub fn certify_equivalence(u: &ChainMap) -> Option<Equivalence> {
    let (x, y) = (&u.src, &u.dst);
    let field = x.entries[0].field();
    let lo = x.lo.min(y.lo) - 1;
    let hi = x.hi().max(y.hi()) + 1;
    let mut sys = BlockSystem::new(field);
    let mut v_idx: BTreeMap<i64, usize> = BTreeMap::new();
    let mut hx_idx: BTreeMap<i64, usize> = BTreeMap::new();
    let mut hy_idx: BTreeMap<i64, usize> = BTreeMap::new();
    for i in lo..=hi {
        let hs = HomSpace::new(&y.entry(i), &x.entry(i)).ok()?;
        if hs.dim() > 0 {
            v_idx.insert(i, sys.add_unknown(hs));
        }
        let hx = HomSpace::new(&x.entry(i), &x.entry(i - 1)).ok()?;
        if hx.dim() > 0 {
            hx_idx.insert(i, sys.add_unknown(hx));
        }
        let hy = HomSpace::new(&y.entry(i), &y.entry(i - 1)).ok()?;
        if hy.dim() > 0 {
            hy_idx.insert(i, sys.add_unknown(hy));
        }
    }
    // v is a chain map: d_x v^i - v^{i+1} d_y = 0
    for i in lo..hi {
        let target = HomSpace::new(&y.entry(i), &x.entry(i + 1)).ok()?;
        if target.dim() == 0 {
            continue;
        }
        let mut terms = Vec::new();
        if let Some(&k) = v_idx.get(&i) {
            terms.push((k, backend::post_matrix(&x.diff(i), sys.unknown(k), &target)));
        }
        if let Some(&k) = v_idx.get(&(i + 1)) {
            let m = backend::pre_matrix(&y.diff(i), sys.unknown(k), &target).neg();
            terms.push((k, m));
        }
        sys.add_equation(terms, vec![field.zero(); target.dim()]);
    }
    // v∘u - id_x = d hx + hx d
    for i in lo..=hi {
        let target = HomSpace::new(&x.entry(i), &x.entry(i)).ok()?;
        if target.dim() == 0 {
            continue;
        }
        let mut terms = Vec::new();
        if let Some(&k) = v_idx.get(&i) {
            // v^i ∘ u^i as linear map of v
            let m_pre = backend::pre_matrix(&u.at(i), sys.unknown(k), &target);
            terms.push((k, m_pre));
        }
        if let Some(&k) = hx_idx.get(&i) {
            terms.push((k, backend::post_matrix(&x.diff(i - 1), sys.unknown(k), &target).neg()));
        }
        if let Some(&k) = hx_idx.get(&(i + 1)) {
            terms.push((k, backend::pre_matrix(&x.diff(i), sys.unknown(k), &target).neg()));
        }
        let rhs = target.to_coords(&Mor::identity(&x.entry(i)));
        sys.add_equation(terms, rhs);
    }
    // u∘v - id_y = d hy + hy d
    for i in lo..=hi {
        let target = HomSpace::new(&y.entry(i), &y.entry(i)).ok()?;
        if target.dim() == 0 {
            continue;
        }
        let mut terms = Vec::new();
        if let Some(&k) = v_idx.get(&i) {
            let m_post = backend::post_matrix(&u.at(i), sys.unknown(k), &target);
            terms.push((k, m_post));
        }
        if let Some(&k) = hy_idx.get(&i) {
            terms.push((k, backend::post_matrix(&y.diff(i - 1), sys.unknown(k), &target).neg()));
        }
        if let Some(&k) = hy_idx.get(&(i + 1)) {
            terms.push((k, backend::pre_matrix(&y.diff(i), sys.unknown(k), &target).neg()));
        }
        let rhs = target.to_coords(&Mor::identity(&y.entry(i)));
        sys.add_equation(terms, rhs);
    }
    let sol = sys.solve()?;
    let mut v_comps = BTreeMap::new();
    for (i, k) in &v_idx {
        v_comps.insert(*i, sol[*k].clone());
    }
    let backward = ChainMap::new(y.clone(), x.clone(), v_comps).ok()?;
    let mut hx = BTreeMap::new();
    for (i, k) in &hx_idx {
        hx.insert(*i, sol[*k].clone());
    }
    let mut hy = BTreeMap::new();
    for (i, k) in &hy_idx {
        hy.insert(*i, sol[*k].clone());
    }
    let on_src = Homotopy { comps: hx };
    let on_dst = Homotopy { comps: hy };
    let eq = Equivalence { forward: u.clone(), backward, on_src, on_dst };
    debug_assert!(eq.on_src.witnesses(&eq.backward.compose(&eq.forward), &ChainMap::identity(x)));
    debug_assert!(eq.on_dst.witnesses(&eq.forward.compose(&eq.backward), &ChainMap::identity(y)));
    Some(eq)
}
