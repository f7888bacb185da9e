//! Exact centrality checks and degree-bounded centralizer / center bases.
//!
//! Centrality reduces to commuting with the two generators, so the center
//! inside a degree window is the joint kernel of the two linear maps
//! `f -> [f, x]` and `f -> [f, y]` on the window's monomial basis.  The
//! kernels are computed by exact Gaussian elimination over the coefficient
//! field and returned as a canonical reduced basis: each vector has leading
//! coefficient 1 at a distinct monomial, the largest in its support.

use thiserror::Error;

use crate::algebra::AlgebraRef;
use crate::coeffs::FieldElem;
use crate::ncpoly::{Monomial, NcError, NcPoly};

/// Errors from centralizer computations.
#[derive(Clone, PartialEq, Debug, Error)]
pub enum CenterError {
    #[error(
        "the defining relation admits no nontrivial grading for these parameters"
    )]
    GradingUndefined,
    #[error(transparent)]
    Nc(#[from] NcError),
}

/// A finite monomial window: all `x^a y^b` with `a + b <= D`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct DegreeWindow {
    max_degree: u32,
}

impl DegreeWindow {
    pub fn new(max_degree: u32) -> DegreeWindow {
        DegreeWindow { max_degree }
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    /// `(D+1)(D+2)/2` - the number of monomials in the window.
    pub fn basis_size(&self) -> usize {
        let d = self.max_degree as usize;
        (d + 1) * (d + 2) / 2
    }

    /// The window's monomials in ascending order.
    pub fn monomials(&self) -> Vec<Monomial> {
        let mut out = Vec::with_capacity(self.basis_size());
        for d in 0..=self.max_degree {
            for b in (0..=d).rev() {
                out.push(Monomial::new(d - b, b).expect("window degrees are small"));
            }
        }
        out.sort();
        out
    }
}

/// The commutator `[f, g] = f*g - g*f`.
pub fn commutator(f: &NcPoly, g: &NcPoly) -> Result<NcPoly, NcError> {
    f.mul(g)?.sub(&g.mul(f)?)
}

/// True iff `f` commutes with both generators - equivalently, with every
/// element, since the generators generate.
pub fn is_central(f: &NcPoly) -> Result<bool, NcError> {
    let alg = f.algebra();
    let x = NcPoly::gen_x(alg);
    let y = NcPoly::gen_y(alg);
    Ok(commutator(f, &x)?.is_zero() && commutator(f, &y)?.is_zero())
}

/// A basis of `{f : deg f <= D, [f, g] = 0}`, echelonized: vectors are
/// listed by ascending leading monomial, each with leading coefficient 1,
/// and no vector's leading monomial occurs in another vector.
pub fn centralizer_basis(g: &NcPoly, window: DegreeWindow) -> Result<Vec<NcPoly>, NcError> {
    kernel_basis(g.algebra(), window, |u| commutator(u, g).map(|c| vec![c]))
}

/// A basis of the window slice of the center: the joint kernel of
/// commutation with `x` and with `y`.
pub fn center_basis(alg: &AlgebraRef, window: DegreeWindow) -> Result<Vec<NcPoly>, NcError> {
    let x = NcPoly::gen_x(alg);
    let y = NcPoly::gen_y(alg);
    kernel_basis(alg, window, |u| {
        Ok(vec![commutator(u, &x)?, commutator(u, &y)?])
    })
}

/// Solves `constraints(f) = 0` for `f` in the window span by exact
/// Gaussian elimination; `constraints` maps a basis monomial to the list
/// of polynomials that must vanish linearly.
fn kernel_basis<F>(
    alg: &AlgebraRef,
    window: DegreeWindow,
    constraints: F,
) -> Result<Vec<NcPoly>, NcError>
where
    F: Fn(&NcPoly) -> Result<Vec<NcPoly>, NcError>,
{
    let mode = alg.mode();
    let cols = window.monomials();
    let ncols = cols.len();
    // Images of the basis monomials under each constraint map.
    let mut images: Vec<Vec<NcPoly>> = Vec::with_capacity(ncols);
    for m in &cols {
        let u = NcPoly::monomial(alg, m.a(), m.b(), mode.one())?;
        images.push(constraints(&u)?);
    }
    // Row index: one row per (constraint map, monomial) pair that occurs.
    let mut row_of: std::collections::BTreeMap<(usize, Monomial), usize> =
        std::collections::BTreeMap::new();
    for imgs in &images {
        for (slot, p) in imgs.iter().enumerate() {
            for (m, _) in p.terms() {
                let next = row_of.len();
                row_of.entry((slot, *m)).or_insert(next);
            }
        }
    }
    let nrows = row_of.len();
    let mut matrix = vec![vec![mode.zero(); ncols]; nrows];
    for (col, imgs) in images.iter().enumerate() {
        for (slot, p) in imgs.iter().enumerate() {
            for (m, c) in p.terms() {
                let row = row_of[&(slot, *m)];
                matrix[row][col] = c.clone();
            }
        }
    }
    let null = nullspace(&matrix, ncols, mode)?;
    // Assemble polynomials and reduce them to the canonical echelon basis.
    let mut polys = Vec::with_capacity(null.len());
    for v in null {
        let mut p = NcPoly::zero(alg);
        for (i, c) in v.into_iter().enumerate() {
            if !c.is_zero() {
                p = p.add(&NcPoly::monomial(alg, cols[i].a(), cols[i].b(), c)?)?;
            }
        }
        polys.push(p);
    }
    echelonize(polys)
}

/// Nullspace of an exact matrix, by Gauss-Jordan elimination; columns are
/// processed last-to-first so pivots sit on the largest monomials of the
/// (ascending) window basis.
fn nullspace(
    matrix: &[Vec<FieldElem>],
    ncols: usize,
    mode: crate::coeffs::FieldMode,
) -> Result<Vec<Vec<FieldElem>>, NcError> {
    let mut m: Vec<Vec<FieldElem>> = matrix.to_vec();
    let nrows = m.len();
    // pivot_in_col[c] = row holding the pivot of column c, if any.
    let mut pivot_in_col: Vec<Option<usize>> = vec![None; ncols];
    let mut next_row = 0usize;
    for col in (0..ncols).rev() {
        // Find a row at or below next_row with a nonzero entry here.
        let Some(r) = (next_row..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(next_row, r);
        let inv = m[next_row][col].try_inv()?;
        for c in 0..ncols {
            m[next_row][c] = m[next_row][c].try_mul(&inv)?;
        }
        for r in 0..nrows {
            if r != next_row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in 0..ncols {
                    let delta = factor.try_mul(&m[next_row][c])?;
                    m[r][c] = m[r][c].try_sub(&delta)?;
                }
            }
        }
        pivot_in_col[col] = Some(next_row);
        next_row += 1;
        if next_row == nrows {
            break;
        }
    }
    // One special solution per free column.
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_in_col[free].is_some() {
            continue;
        }
        let mut v = vec![mode.zero(); ncols];
        v[free] = mode.one();
        for col in 0..ncols {
            if let Some(row) = pivot_in_col[col] {
                v[col] = m[row][free].neg();
            }
        }
        basis.push(v);
    }
    Ok(basis)
}

/// Gauss-Jordan reduction of a set of polynomials viewed as vectors over
/// the monomial coordinates: pivot on the largest remaining leading
/// monomial, normalize it to 1, clear it everywhere else.  Returns the
/// basis sorted by ascending leading monomial.
fn echelonize(mut polys: Vec<NcPoly>) -> Result<Vec<NcPoly>, NcError> {
    let mut done: Vec<NcPoly> = Vec::new();
    loop {
        polys.retain(|p| !p.is_zero());
        let Some(best) = polys
            .iter()
            .enumerate()
            .max_by_key(|(_, p)| p.leading_monomial())
            .map(|(i, _)| i)
        else {
            break;
        };
        let p = polys.swap_remove(best);
        let lead = p.leading_monomial().expect("nonzero polynomial");
        let lc = p.coeff(lead.a(), lead.b());
        let p = p.scalar_mul(&lc.try_inv()?)?;
        for other in polys.iter_mut().chain(done.iter_mut()) {
            let c = other.coeff(lead.a(), lead.b());
            if !c.is_zero() {
                *other = other.sub(&p.scalar_mul(&c)?)?;
            }
        }
        done.push(p);
    }
    done.sort_by_key(|p| p.leading_monomial());
    Ok(done)
}

/// The degree assignment `(deg x, deg y)` under which the defining
/// relation is homogeneous, when one exists:
///
/// * `alpha = beta = 0` (Weyl, q-Weyl, quantum/commutative plane, and any
///   `(q,0,0,gamma)`): `(-1, 1)`;
/// * only `beta` nonzero (shift-type rows): `(0, 1)`;
/// * only `alpha` nonzero (mirror shift rows): `(1, 0)`;
/// * otherwise no nontrivial grading exists.
pub fn grading(alg: &AlgebraRef) -> Result<(i64, i64), CenterError> {
    let a0 = alg.alpha().is_zero();
    let b0 = alg.beta().is_zero();
    let g0 = alg.gamma().is_zero();
    if a0 && b0 {
        Ok((-1, 1))
    } else if a0 && g0 {
        Ok((0, 1))
    } else if b0 && g0 {
        Ok((1, 0))
    } else {
        Err(CenterError::GradingUndefined)
    }
}

/// The grading degree of a single monomial.
pub fn monomial_grade(alg: &AlgebraRef, m: Monomial) -> Result<i64, CenterError> {
    let (dx, dy) = grading(alg)?;
    Ok(dx * m.a() as i64 + dy * m.b() as i64)
}

/// The monomials of the window lying in the `k`-th graded part.
pub fn graded_component(
    alg: &AlgebraRef,
    window: DegreeWindow,
    k: i64,
) -> Result<Vec<Monomial>, CenterError> {
    let (dx, dy) = grading(alg)?;
    Ok(window
        .monomials()
        .into_iter()
        .filter(|m| dx * m.a() as i64 + dy * m.b() as i64 == k)
        .collect())
}

/// True iff all terms of `f` share one grading degree (the zero polynomial
/// counts as homogeneous).
pub fn is_homogeneous(alg: &AlgebraRef, f: &NcPoly) -> Result<bool, CenterError> {
    let (dx, dy) = grading(alg)?;
    let mut grade = None;
    for (m, _) in f.terms() {
        let d = dx * m.a() as i64 + dy * m.b() as i64;
        match grade {
            None => grade = Some(d),
            Some(g) if g != d => return Ok(false),
            _ => {}
        }
    }
    Ok(true)
}
