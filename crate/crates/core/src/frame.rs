//! Polynomial vector fields and the left-invariant frame.
//!
//! A [`PolyVectorField`] is just a list of polynomial components; whether
//! they are taken along the coordinate fields `∂/∂x_i` or along the frame
//! `X̃_i` depends on context. Frame fields themselves are stored in
//! coordinate form, together with the polynomial inverse of the frame
//! matrix so that coordinate fields can be converted back.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::algebra::GradedLieAlgebra;
use crate::group::Group;
use crate::linalg::{Matrix, Rational};
use crate::poly::{monomials_up_to, Monomial, Polynomial};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolyVectorField {
    pub components: Vec<Polynomial>,
}

impl PolyVectorField {
    pub fn new(components: Vec<Polynomial>) -> Self {
        PolyVectorField { components }
    }

    pub fn zero(n: usize) -> Self {
        PolyVectorField {
            components: vec![Polynomial::zero(); n],
        }
    }

    /// Constant components, e.g. a left-invariant field in frame form.
    pub fn constant(coeffs: &[Rational]) -> Self {
        PolyVectorField {
            components: coeffs.iter().cloned().map(Polynomial::constant).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Polynomial::is_zero)
    }

    pub fn add(&self, other: &PolyVectorField) -> PolyVectorField {
        PolyVectorField {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &PolyVectorField) -> PolyVectorField {
        PolyVectorField {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> PolyVectorField {
        PolyVectorField {
            components: self.components.iter().map(|p| p.scale(c)).collect(),
        }
    }

    /// `Σ coeffs[i] · fields[i]`.
    pub fn combination(n: usize, coeffs: &[Rational], fields: &[PolyVectorField]) -> PolyVectorField {
        coeffs
            .iter()
            .zip(fields)
            .filter(|(c, _)| !c.is_zero())
            .fold(PolyVectorField::zero(n), |acc, (c, f)| acc.add(&f.scale(c)))
    }

    /// Applies a coordinate-form field to a function: `Σ v_i ∂f/∂x_i`.
    pub fn apply(&self, f: &Polynomial) -> Polynomial {
        self.components
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .fold(Polynomial::zero(), |acc, (i, c)| &acc + &(c * &f.derivative(i)))
    }

    /// Lie bracket of two coordinate-form fields: `[V,W]^j = V(W^j) - W(V^j)`.
    pub fn bracket(&self, other: &PolyVectorField) -> PolyVectorField {
        PolyVectorField {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(v, w)| &self.apply(w) - &other.apply(v))
                .collect(),
        }
    }

    pub fn eval(&self, point: &[Rational]) -> Vec<Rational> {
        self.components.iter().map(|c| c.eval(point)).collect()
    }

    /// Renders as `c₁·E₁ + c₂·E₂ + …`, skipping zero components.
    pub fn display(&self, coordinate_names: &[String], field_names: &[String]) -> String {
        let parts: Vec<String> = self
            .components
            .iter()
            .zip(field_names)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, name)| format!("({})*{name}", c.display(coordinate_names)))
            .collect();
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

/// The left-invariant frame `X̃_i` of a group in recipe coordinates.
#[derive(Debug, Clone)]
pub struct Frame {
    algebra: GradedLieAlgebra,
    coordinate_names: Vec<String>,
    weights: Vec<u32>,
    fields: Vec<PolyVectorField>,
    /// `inverse[i][j]`: frame component `i` of the coordinate field `∂/∂x_j`.
    inverse: Vec<Vec<Polynomial>>,
}

/// For each basis element `X`, the coordinate field of `t ↦ p·exp(tX)`.
pub fn left_invariant_frame(group: &Group) -> Frame {
    let g = group.algebra().clone();
    let n = g.dim();
    let fields: Vec<PolyVectorField> = (0..n)
        .map(|i| group.right_multiplication_generator(&g.basis(i)))
        .collect();
    // M[j][i] = ∂_j component of X̃_i, unipotent: M = I + N with N nilpotent.
    let nilpotent: Vec<Vec<Polynomial>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| {
                    let c = &fields[i].components[j];
                    if i == j {
                        c - &Polynomial::one()
                    } else {
                        c.clone()
                    }
                })
                .collect()
        })
        .collect();
    let identity: Vec<Vec<Polynomial>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| if i == j { Polynomial::one() } else { Polynomial::zero() })
                .collect()
        })
        .collect();
    let minus_n: Vec<Vec<Polynomial>> = nilpotent
        .iter()
        .map(|row| row.iter().map(|p| -p).collect())
        .collect();
    let mut inverse = identity.clone();
    let mut power = identity;
    for _ in 1..n {
        power = mat_mul(&power, &minus_n);
        inverse = mat_add(&inverse, &power);
    }
    Frame {
        weights: group.coordinate_weights(),
        coordinate_names: group.recipe().coordinate_names().to_vec(),
        algebra: g,
        fields,
        inverse,
    }
}

fn mat_mul(a: &[Vec<Polynomial>], b: &[Vec<Polynomial>]) -> Vec<Vec<Polynomial>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n).fold(Polynomial::zero(), |acc, k| {
                        if a[i][k].is_zero() || b[k][j].is_zero() {
                            acc
                        } else {
                            &acc + &(&a[i][k] * &b[k][j])
                        }
                    })
                })
                .collect()
        })
        .collect()
}

fn mat_add(a: &[Vec<Polynomial>], b: &[Vec<Polynomial>]) -> Vec<Vec<Polynomial>> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

impl Frame {
    pub fn algebra(&self) -> &GradedLieAlgebra {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.fields.len()
    }

    pub fn coordinate_names(&self) -> &[String] {
        &self.coordinate_names
    }

    /// Weights of the coordinates, for weighted degrees.
    pub fn coordinate_weights(&self) -> &[u32] {
        &self.weights
    }

    /// `X̃_i` in coordinate form.
    pub fn field(&self, i: usize) -> &PolyVectorField {
        &self.fields[i]
    }

    pub fn fields(&self) -> &[PolyVectorField] {
        &self.fields
    }

    pub fn inverse_matrix(&self) -> &[Vec<Polynomial>] {
        &self.inverse
    }

    /// `X̃_i f`.
    pub fn derivative(&self, i: usize, f: &Polynomial) -> Polynomial {
        self.fields[i].apply(f)
    }

    /// Applies a field given in frame components to a function.
    pub fn apply(&self, v: &PolyVectorField, f: &Polynomial) -> Polynomial {
        v.components
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .fold(Polynomial::zero(), |acc, (i, c)| &acc + &(c * &self.derivative(i, f)))
    }

    pub fn to_coordinates(&self, v: &PolyVectorField) -> PolyVectorField {
        let n = self.dim();
        let mut out = PolyVectorField::zero(n);
        for (i, a) in v.components.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (o, x) in out.components.iter_mut().zip(&self.fields[i].components) {
                if !x.is_zero() {
                    *o = &*o + &(a * x);
                }
            }
        }
        out
    }

    pub fn to_frame(&self, v: &PolyVectorField) -> PolyVectorField {
        PolyVectorField {
            components: self
                .inverse
                .iter()
                .map(|row| {
                    row.iter().zip(&v.components).fold(Polynomial::zero(), |acc, (m, c)| {
                        if m.is_zero() || c.is_zero() {
                            acc
                        } else {
                            &acc + &(m * c)
                        }
                    })
                })
                .collect(),
        }
    }

    /// Bracket of two fields in frame components, using
    /// `[X̃_i, X̃_j] = Σ c_ij^k X̃_k`:
    /// `[V,W] = Σ a_i b_j [X̃_i,X̃_j] + Σ V(b_j) X̃_j - Σ W(a_i) X̃_i`.
    pub fn bracket(&self, v: &PolyVectorField, w: &PolyVectorField) -> PolyVectorField {
        let n = self.dim();
        let mut out: Vec<Polynomial> = (0..n)
            .map(|j| &self.apply(v, &w.components[j]) - &self.apply(w, &v.components[j]))
            .collect();
        for (i, a) in v.components.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in w.components.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let c = self.algebra.structure_constants(i, j);
                if c.iter().all(Zero::is_zero) {
                    continue;
                }
                let ab = a * b;
                for (k, ck) in c.iter().enumerate() {
                    if !ck.is_zero() {
                        out[k] = &out[k] + &ab.scale(ck);
                    }
                }
            }
        }
        PolyVectorField { components: out }
    }
}

/// A finite-dimensional space of fields in frame form: each unknown is a
/// monomial placed in one frame component.
#[derive(Debug, Clone)]
pub struct FieldAnsatz {
    components: usize,
    unknowns: Vec<(usize, Monomial)>,
}

impl FieldAnsatz {
    /// Every component of weighted degree at most `max_degree`.
    pub fn uniform(weights: &[u32], components: usize, max_degree: u32) -> Self {
        let monos = monomials_up_to(weights, max_degree);
        let unknowns = (0..components)
            .flat_map(|c| monos.iter().map(move |m| (c, m.clone())))
            .collect();
        FieldAnsatz {
            components,
            unknowns,
        }
    }

    /// Explicit per-component monomial lists.
    pub fn from_monomials(per_component: Vec<Vec<Monomial>>) -> Self {
        let components = per_component.len();
        let unknowns = per_component
            .into_iter()
            .enumerate()
            .flat_map(|(c, ms)| ms.into_iter().map(move |m| (c, m)))
            .collect();
        FieldAnsatz {
            components,
            unknowns,
        }
    }

    pub fn len(&self) -> usize {
        self.unknowns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unknowns.is_empty()
    }

    pub fn unknowns(&self) -> &[(usize, Monomial)] {
        &self.unknowns
    }

    pub fn unit_field(&self, k: usize) -> PolyVectorField {
        let (c, m) = &self.unknowns[k];
        let mut v = PolyVectorField::zero(self.components);
        v.components[*c] = Polynomial::term(Rational::from_integer(1.into()), m.clone());
        v
    }

    pub fn field(&self, coeffs: &[Rational]) -> PolyVectorField {
        let mut v = PolyVectorField::zero(self.components);
        for ((c, m), k) in self.unknowns.iter().zip(coeffs) {
            if !k.is_zero() {
                v.components[*c] = &v.components[*c] + &Polynomial::term(k.clone(), m.clone());
            }
        }
        v
    }

    /// Coefficients of `v` in this ansatz, or `None` if some term of `v`
    /// falls outside it.
    pub fn express(&self, v: &PolyVectorField) -> Option<Vec<Rational>> {
        let index: BTreeMap<(usize, &Monomial), usize> = self
            .unknowns
            .iter()
            .enumerate()
            .map(|(k, (c, m))| ((*c, m), k))
            .collect();
        let mut out = vec![Rational::zero(); self.len()];
        for (c, p) in v.components.iter().enumerate() {
            for (m, coeff) in p.terms() {
                let k = index.get(&(c, m))?;
                out[*k] = coeff.clone();
            }
        }
        Some(out)
    }

    /// Matrix of a linear operator sending fields to lists of polynomial
    /// residuals: one column per unknown, one row per (residual, monomial)
    /// pair that occurs, rows sorted by that pair.
    pub fn linear_system<F>(&self, op: F) -> Matrix
    where
        F: Fn(&PolyVectorField) -> Vec<Polynomial>,
    {
        let columns = self.residual_columns(&op);
        let rows = row_index(&columns, &[]);
        assemble(self.len(), &columns, &rows)
    }

    /// Solves `op(v) = rhs` inside the ansatz. Returns the unique solution,
    /// `Err(None)` if the system is inconsistent and `Err(Some(dim))` if the
    /// solution is not unique (with `dim` the kernel dimension).
    pub fn solve<F>(&self, op: F, rhs: &[Polynomial]) -> Result<PolyVectorField, Option<usize>>
    where
        F: Fn(&PolyVectorField) -> Vec<Polynomial>,
    {
        let columns = self.residual_columns(&op);
        let rows = row_index(&columns, rhs);
        let a = assemble(self.len(), &columns, &rows);
        let mut b = vec![Rational::zero(); a.rows()];
        for (r, p) in rhs.iter().enumerate() {
            for (m, c) in p.terms() {
                b[rows[&(r, m.clone())]] = c.clone();
            }
        }
        let kernel = a.nullspace().dim();
        if kernel > 0 {
            return Err(Some(kernel));
        }
        a.solve(&b).map(|x| self.field(&x)).ok_or(None)
    }

    fn residual_columns<F>(&self, op: &F) -> Vec<Vec<(usize, Monomial, Rational)>>
    where
        F: Fn(&PolyVectorField) -> Vec<Polynomial>,
    {
        (0..self.len())
            .map(|k| {
                op(&self.unit_field(k))
                    .iter()
                    .enumerate()
                    .flat_map(|(r, p)| p.terms().map(move |(m, c)| (r, m.clone(), c.clone())))
                    .collect()
            })
            .collect()
    }
}

type RowIndex = BTreeMap<(usize, Monomial), usize>;

fn row_index(columns: &[Vec<(usize, Monomial, Rational)>], rhs: &[Polynomial]) -> RowIndex {
    let mut keys: BTreeMap<(usize, Monomial), usize> = BTreeMap::new();
    for (r, m, _) in columns.iter().flatten() {
        keys.insert((*r, m.clone()), 0);
    }
    for (r, p) in rhs.iter().enumerate() {
        for (m, _) in p.terms() {
            keys.insert((r, m.clone()), 0);
        }
    }
    for (i, v) in keys.values_mut().enumerate() {
        *v = i;
    }
    keys
}

fn assemble(cols: usize, columns: &[Vec<(usize, Monomial, Rational)>], rows: &RowIndex) -> Matrix {
    let mut m = Matrix::zeros(rows.len().max(1), cols);
    for (k, col) in columns.iter().enumerate() {
        for (r, mono, c) in col {
            m[(rows[&(*r, mono.clone())], k)] = c.clone();
        }
    }
    m
}
