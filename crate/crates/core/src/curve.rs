//! Nodal rational curves and vector bundles on them, presented by descent
//! data: a sum of line bundles on the projective line together with one
//! invertible gluing matrix per node, identifying the fibers over the two
//! preimages of the node.
//!
//! Trivializations are fixed once and for all: every point of the line is
//! stored as a canonical representative (`[1:t]`, or `[0:1]`), and a form
//! is trivialized at a point by evaluating its coefficients there. All
//! fiber computations below use these conventions consistently.

use crate::backend::forms::{eval_form, h1_dim, section_dim};
use crate::backend::{self, Obj};
use crate::error::Error;
use crate::field::{Field, Scalar};
use crate::matrix::{self, Matrix};
use num::BigRational;

/// A point of the projective line in canonical coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct P1Point {
    pub s: Scalar,
    pub t: Scalar,
}

impl P1Point {
    pub fn new(s: Scalar, t: Scalar) -> Result<Self, Error> {
        if s.is_zero() && t.is_zero() {
            return Err(Error::Invalid("[0:0] is not a point of the projective line".into()));
        }
        if !s.is_zero() {
            let inv = s.inv();
            Ok(P1Point { s: s.field().one(), t: t.mul(&inv) })
        } else {
            Ok(P1Point { s, t: t.field().one() })
        }
    }

    pub fn from_i64(field: Field, s: i64, t: i64) -> Result<Self, Error> {
        P1Point::new(field.scalar(s), field.scalar(t))
    }
}

/// A projective curve with one rational component and simple nodes, given
/// by the pairs of points of the normalization that get identified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodalCurve {
    pub field: Field,
    pub nodes: Vec<(P1Point, P1Point)>,
}

impl NodalCurve {
    pub fn new(field: Field, nodes: Vec<(P1Point, P1Point)>) -> Result<Self, Error> {
        let mut seen: Vec<&P1Point> = Vec::new();
        for (a, b) in &nodes {
            for p in [a, b] {
                if seen.contains(&p) {
                    return Err(Error::Invalid(format!(
                        "point [{}:{}] appears twice; only simple nodes are allowed",
                        p.s, p.t
                    )));
                }
                seen.push(p);
            }
        }
        Ok(NodalCurve { field, nodes })
    }

    /// The standard one-node curve identifying `[1:0]` with `[0:1]`.
    pub fn nodal_cubic(field: Field) -> Self {
        NodalCurve::new(
            field,
            vec![(P1Point::from_i64(field, 1, 0).unwrap(), P1Point::from_i64(field, 0, 1).unwrap())],
        )
        .unwrap()
    }
}

/// Descent data for a vector bundle: splitting type upstairs plus one
/// invertible gluing matrix per node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodalBundle {
    pub curve: NodalCurve,
    /// Twists of the pullback to the normalization, descending.
    pub upstairs: Vec<i64>,
    /// `gluings[i]` maps the fiber at the first preimage of node `i` to
    /// the fiber at the second, in the fixed trivializations.
    pub gluings: Vec<Matrix>,
}

impl NodalBundle {
    pub fn rank(&self) -> usize {
        self.upstairs.len()
    }
}

/// A line bundle given by its degree and one gluing scalar per node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineBundleClass {
    pub curve: NodalCurve,
    pub degree: i64,
    pub scalars: Vec<Scalar>,
}

impl LineBundleClass {
    pub fn new(curve: NodalCurve, degree: i64, scalars: Vec<Scalar>) -> Result<Self, Error> {
        if scalars.len() != curve.nodes.len() {
            return Err(Error::Invalid("one gluing scalar per node is required".into()));
        }
        if let Some(i) = scalars.iter().position(|s| s.is_zero()) {
            return Err(Error::NonInvertibleGluing { node: i });
        }
        Ok(LineBundleClass { curve, degree, scalars })
    }

    pub fn to_bundle(&self) -> NodalBundle {
        let gluings = self
            .scalars
            .iter()
            .map(|l| Matrix::new(self.curve.field, 1, 1, vec![l.clone()]))
            .collect();
        NodalBundle { curve: self.curve.clone(), upstairs: vec![self.degree], gluings }
    }
}

/// Builds and validates descent data; the splitting type is sorted into
/// canonical order and the gluings are conjugated accordingly.
pub fn descend(curve: &NodalCurve, upstairs: &[i64], gluings: &[Matrix]) -> Result<NodalBundle, Error> {
    let r = upstairs.len();
    if gluings.len() != curve.nodes.len() {
        return Err(Error::Invalid(format!(
            "expected {} gluing matrices, got {}",
            curve.nodes.len(),
            gluings.len()
        )));
    }
    for (i, g) in gluings.iter().enumerate() {
        if g.rows() != r || g.cols() != r {
            return Err(Error::RankMismatch { given: g.rows(), expected: r });
        }
        if matrix::inverse(g).is_none() {
            return Err(Error::NonInvertibleGluing { node: i });
        }
    }
    // stable sort descending, permuting fiber coordinates to match
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by_key(|&j| std::cmp::Reverse(upstairs[j]));
    let sorted: Vec<i64> = order.iter().map(|&j| upstairs[j]).collect();
    let field = curve.field;
    let perm = Matrix::from_fn(field, r, r, |new, old| {
        if order[new] == old { field.one() } else { field.zero() }
    });
    let perm_t = perm.transpose();
    let glued: Vec<Matrix> = gluings.iter().map(|g| perm.mul(g).mul(&perm_t)).collect();
    Ok(NodalBundle { curve: curve.clone(), upstairs: sorted, gluings: glued })
}

/// Inverse of [`descend`]: reads the descent data back off the bundle.
pub fn pullback(v: &NodalBundle) -> (Vec<i64>, Vec<Matrix>) {
    (v.upstairs.clone(), v.gluings.clone())
}

/// Rank, degree and slope of a bundle on the line or on a nodal curve.
/// The degree is computed upstairs; gluing data does not change it.
pub fn rank_degree_slope(v: &Obj) -> Result<(usize, i64, BigRational), Error> {
    let twists = match v {
        Obj::VectP1 { twists, .. } => twists.clone(),
        Obj::VectNodal(b) => b.upstairs.clone(),
        _ => {
            return Err(Error::BackendMismatch(
                "rank/degree/slope are defined for curve backends only".into(),
            ))
        }
    };
    let rank = twists.len();
    if rank == 0 {
        return Err(Error::Invalid("the zero bundle has no slope".into()));
    }
    let degree: i64 = twists.iter().sum();
    let slope = BigRational::new(degree.into(), (rank as i64).into());
    Ok((rank, degree, slope))
}

/// Evaluation of a tuple of sections of `⊕O(a_i)` at a point: one value per
/// summand, using the canonical trivializations.
fn eval_section(field: Field, twists: &[i64], coords: &[Scalar], p: &P1Point) -> Vec<Scalar> {
    let mut out = Vec::with_capacity(twists.len());
    let mut off = 0;
    for &a in twists {
        let d = section_dim(a, 0);
        out.push(eval_form(field, &coords[off..off + d], &p.s, &p.t));
        off += d;
    }
    out
}

/// The evaluation-difference map whose kernel is the space of global
/// sections: a section upstairs descends exactly when its value at the
/// second preimage of each node is the gluing transport of its value at
/// the first.
pub fn descent_difference_map(v: &NodalBundle) -> Matrix {
    let field = v.curve.field;
    let h0: usize = v.upstairs.iter().map(|a| section_dim(*a, 0)).sum();
    let r = v.rank();
    let n = v.curve.nodes.len();
    Matrix::from_fn(field, n * r, h0, |row, col| {
        let node = row / r;
        let comp = row % r;
        let mut coords = vec![field.zero(); h0];
        coords[col] = field.one();
        let (p1, p2) = &v.curve.nodes[node];
        let at_first = eval_section(field, &v.upstairs, &coords, p1);
        let at_second = eval_section(field, &v.upstairs, &coords, p2);
        let transported = matrix::mat_vec(&v.gluings[node], &at_first);
        at_second[comp].sub(&transported[comp])
    })
}

/// Dimension and basis (in upstairs section coordinates) of the space of
/// global sections of a nodal bundle.
pub fn global_sections(v: &NodalBundle) -> (usize, Matrix) {
    let d = descent_difference_map(v);
    let (kernel, _, _) = matrix::kernel_image(&d);
    (kernel.dim(), kernel.basis)
}

/// `dim H^1` of a nodal bundle: the upstairs contribution plus the
/// cokernel of the evaluation-difference map.
pub fn h1_nodal(v: &NodalBundle) -> usize {
    let upstairs: usize = v.upstairs.iter().map(|a| h1_dim(*a)).sum();
    let d = descent_difference_map(v);
    let coker = d.rows() - d.rank();
    upstairs + coker
}

/// Decides isomorphism of two line bundle classes on the same curve by
/// solving for a unit upstairs that intertwines the gluing scalars. The
/// upstairs automorphisms are the global scalars, which act trivially on
/// each gluing scalar, so this reduces to exact equality of descent data;
/// the orbit computation is still performed rather than assumed.
pub fn line_bundle_iso(a: &LineBundleClass, b: &LineBundleClass) -> Result<bool, Error> {
    if a.curve != b.curve {
        return Err(Error::BackendMismatch("line bundles on different curves".into()));
    }
    if a.degree != b.degree {
        return Ok(false);
    }
    // a map a -> b is a form of degree 0 upstairs, i.e. a constant c with
    // c * lambda_a = lambda_b * c at every node; it is an isomorphism iff
    // c is a unit. Solve the linear constraints and check for a unit.
    let x = Obj::VectNodal(a.to_bundle());
    let y = Obj::VectNodal(b.to_bundle());
    let homs = backend::hom_basis(&x, &y)?;
    for h in &homs {
        if backend::two_sided_inverse(h).is_some() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Complete, irredundant list of degree-`d` line bundle classes over a
/// finite field, found by enumerating all gluing data and discarding
/// duplicates via [`line_bundle_iso`].
pub fn pic_classes(curve: &NodalCurve, degree: i64) -> Result<Vec<LineBundleClass>, Error> {
    let Field::Fp(_) = curve.field else {
        return Err(Error::Invalid("class enumeration needs a finite field".into()));
    };
    let units: Vec<Scalar> =
        curve.field.elements().into_iter().filter(|u| !u.is_zero()).collect();
    let n = curve.nodes.len();
    let mut classes: Vec<LineBundleClass> = Vec::new();
    let mut stack: Vec<Vec<Scalar>> = vec![Vec::new()];
    while let Some(prefix) = stack.pop() {
        if prefix.len() == n {
            let cand = LineBundleClass::new(curve.clone(), degree, prefix)?;
            let mut dup = false;
            for c in &classes {
                if line_bundle_iso(c, &cand)? {
                    dup = true;
                    break;
                }
            }
            if !dup {
                classes.push(cand);
            }
            continue;
        }
        for u in units.iter().rev() {
            let mut next = prefix.clone();
            next.push(u.clone());
            stack.push(next);
        }
    }
    Ok(classes)
}
