//! Strata-preserving derivations `Der₀(g)` and the degree-zero algebra `g₀`.
//!
//! A degree-zero map is stored as one square block per layer. Subspaces of
//! such maps use the flat layout produced by [`DegreeZeroMap::to_flat`]:
//! for each basis element `X` in declaration order, the coordinates of
//! `D(X)` inside `X`'s layer. This is the same layout the prolongation uses
//! for level zero, so a `g₀` subspace can be handed over unchanged.

use num_traits::{One, Zero};

use crate::algebra::GradedLieAlgebra;
use crate::linalg::{Matrix, Rational, Subspace};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeZeroMap {
    /// `blocks[d][(r, c)]`: coefficient of the `r`-th element of layer
    /// `d + 1` in the image of its `c`-th element.
    pub blocks: Vec<Matrix>,
}

impl DegreeZeroMap {
    pub fn zero(g: &GradedLieAlgebra) -> Self {
        DegreeZeroMap {
            blocks: g.layer_dims().into_iter().map(|n| Matrix::zeros(n, n)).collect(),
        }
    }

    /// The grading derivation: multiplication by `-weight` on each layer.
    pub fn grading(g: &GradedLieAlgebra) -> Self {
        let mut d = Self::zero(g);
        for (k, block) in d.blocks.iter_mut().enumerate() {
            for i in 0..block.rows() {
                block[(i, i)] = Rational::from_integer((k as i64 + 1).into());
            }
        }
        d
    }

    pub fn flat_len(g: &GradedLieAlgebra) -> usize {
        g.layer_dims().iter().map(|n| n * n).sum()
    }

    pub fn from_flat(g: &GradedLieAlgebra, flat: &[Rational]) -> Self {
        assert_eq!(flat.len(), Self::flat_len(g));
        let mut d = Self::zero(g);
        let mut it = flat.iter();
        for block in &mut d.blocks {
            let n = block.rows();
            for c in 0..n {
                for r in 0..n {
                    block[(r, c)] = it.next().unwrap().clone();
                }
            }
        }
        d
    }

    pub fn to_flat(&self) -> Vec<Rational> {
        let mut out = Vec::new();
        for block in &self.blocks {
            let n = block.rows();
            for c in 0..n {
                for r in 0..n {
                    out.push(block[(r, c)].clone());
                }
            }
        }
        out
    }

    /// The block on the first layer (the horizontal part).
    pub fn first_block(&self) -> &Matrix {
        &self.blocks[0]
    }

    /// The block-diagonal matrix acting on full coordinate vectors.
    pub fn to_matrix(&self, g: &GradedLieAlgebra) -> Matrix {
        let n = g.dim();
        let mut m = Matrix::zeros(n, n);
        for (k, block) in self.blocks.iter().enumerate() {
            let layer = g.layer(-(k as i32) - 1);
            for (r, &gr) in layer.iter().enumerate() {
                for (c, &gc) in layer.iter().enumerate() {
                    m[(gr, gc)] = block[(r, c)].clone();
                }
            }
        }
        m
    }

    pub fn apply(&self, g: &GradedLieAlgebra, v: &[Rational]) -> Vec<Rational> {
        self.to_matrix(g).mul_vec(v)
    }

    /// Checks `D[S,T] = [DS,T] + [S,DT]` on all basis pairs.
    pub fn is_derivation(&self, g: &GradedLieAlgebra) -> bool {
        let m = self.to_matrix(g);
        let n = g.dim();
        for i in 0..n {
            for j in i + 1..n {
                let (ei, ej) = (g.basis(i), g.basis(j));
                let lhs = m.mul_vec(&g.bracket(&ei, &ej));
                let a = g.bracket(&m.mul_vec(&ei), &ej);
                let b = g.bracket(&ei, &m.mul_vec(&ej));
                if lhs.iter().zip(a.iter().zip(&b)).any(|(l, (x, y))| l != &(x + y)) {
                    return false;
                }
            }
        }
        true
    }
}

/// Position of the entry `(row, col)` of the full matrix in the flat layout.
/// Both indices must lie in the same layer.
fn flat_index(g: &GradedLieAlgebra, row: usize, col: usize) -> usize {
    let w = g.weight(col);
    debug_assert_eq!(w, g.weight(row));
    let dims = g.layer_dims();
    let offset: usize = dims[..(-w - 1) as usize].iter().map(|n| n * n).sum();
    let n = dims[(-w - 1) as usize];
    offset + g.position_in_layer(col) * n + g.position_in_layer(row)
}

/// All layer-preserving derivations, as a subspace of the flat layout.
///
/// Every block entry is an unknown, and the derivation law on each basis
/// pair contributes one linear equation per output coordinate.
pub fn strata_derivations(g: &GradedLieAlgebra) -> Subspace {
    let n = g.dim();
    let unknowns = DegreeZeroMap::flat_len(g);
    let mut rows = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                let mut row = vec![Rational::zero(); unknowns];
                // D[e_i, e_j] along e_k
                for (m, c) in g.structure_constants(i, j).iter().enumerate() {
                    if !c.is_zero() && g.weight(m) == g.weight(k) {
                        row[flat_index(g, k, m)] += c;
                    }
                }
                // -[D e_i, e_j] along e_k
                for &r in g.layer(g.weight(i)) {
                    let c = &g.structure_constants(r, j)[k];
                    if !c.is_zero() {
                        row[flat_index(g, r, i)] -= c;
                    }
                }
                // -[e_i, D e_j] along e_k
                for &r in g.layer(g.weight(j)) {
                    let c = &g.structure_constants(i, r)[k];
                    if !c.is_zero() {
                        row[flat_index(g, r, j)] -= c;
                    }
                }
                if row.iter().any(|v| !v.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    if rows.is_empty() {
        return Subspace::full(unknowns);
    }
    Matrix::from_rows(unknowns, rows).nullspace()
}

/// Restriction placed on the first-layer block when cutting `g₀` out of
/// `Der₀(g)`.
#[derive(Debug, Clone, PartialEq)]
pub enum GZeroConstraint {
    /// `A + Aᵗ = kI` for some scalar `k`: the conformal algebra `co(m)`.
    Conformal,
    /// No restriction: `g₀ = Der₀(g)`.
    FullDerivations,
    /// Linear conditions `Σ c_ij d_ij = 0` on the first-layer block. Each
    /// condition lists the `m × m` coefficients `c_ij` row-major.
    Explicit(Vec<Vec<Rational>>),
}

impl GZeroConstraint {
    pub fn kind(&self) -> &'static str {
        match self {
            GZeroConstraint::Conformal => "conformal",
            GZeroConstraint::FullDerivations => "full_derivations",
            GZeroConstraint::Explicit(_) => "explicit",
        }
    }

    /// The conditions as row-major functionals on the first-layer block.
    fn block_conditions(&self, m: usize) -> Vec<Vec<Rational>> {
        match self {
            GZeroConstraint::FullDerivations => Vec::new(),
            GZeroConstraint::Explicit(rows) => rows.clone(),
            GZeroConstraint::Conformal => {
                let mut rows = Vec::new();
                for i in 0..m {
                    for j in i + 1..m {
                        let mut row = vec![Rational::zero(); m * m];
                        row[i * m + j] = Rational::one();
                        row[j * m + i] = Rational::one();
                        rows.push(row);
                    }
                }
                for i in 1..m {
                    let mut row = vec![Rational::zero(); m * m];
                    row[i * m + i] = Rational::one();
                    row[0] = -Rational::one();
                    rows.push(row);
                }
                rows
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstraintError {
    #[error("explicit condition {index} has {got} coefficients, expected {expected}")]
    ConditionLength {
        index: usize,
        expected: usize,
        got: usize,
    },
}

/// `g₀ = {D ∈ ders : D|g₋₁ satisfies the constraint}`.
pub fn constrain_g0(
    g: &GradedLieAlgebra,
    ders: &Subspace,
    constraint: &GZeroConstraint,
) -> Result<Subspace, ConstraintError> {
    let m = g.layer_dims()[0];
    let unknowns = DegreeZeroMap::flat_len(g);
    let mut functionals = Vec::new();
    for (index, cond) in constraint.block_conditions(m).into_iter().enumerate() {
        if cond.len() != m * m {
            return Err(ConstraintError::ConditionLength {
                index,
                expected: m * m,
                got: cond.len(),
            });
        }
        let mut f = vec![Rational::zero(); unknowns];
        for r in 0..m {
            for c in 0..m {
                // first block is stored column-major at the front
                f[c * m + r] = cond[r * m + c].clone();
            }
        }
        functionals.push(f);
    }
    Ok(ders
        .restrict(&functionals)
        .expect("functionals built with the flat length"))
}

/// The maps spanning a subspace in the flat layout.
pub fn basis_maps(g: &GradedLieAlgebra, space: &Subspace) -> Vec<DegreeZeroMap> {
    space
        .basis()
        .iter()
        .map(|v| DegreeZeroMap::from_flat(g, v))
        .collect()
}
