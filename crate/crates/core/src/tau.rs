//! Realization of a terminated prolongation `s` as polynomial vector
//! fields on the group.
//!
//! Negative elements act by left multiplication `exp(tX)·p` and `g₀` by the
//! automorphism flow. Positive levels have no such direct description;
//! their fields are the unique solutions `W` without constant frame part of
//! `[W, τ(X)] = ε·τ([u,X])` for every negative `X`, where `ε` is the sign
//! already exhibited by the negative and degree-zero part.

use num_traits::Zero;
use thiserror::Error;

use crate::frame::{FieldAnsatz, Frame, PolyVectorField};
use crate::group::Group;
use crate::linalg::{int, Rational};
use crate::poly::{monomials_up_to, Monomial, Polynomial};
use crate::prolongation::{Element, ProlongationAlgebra};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TauError {
    #[error("the prolongation was cut off before terminating")]
    NotTerminated,
    #[error("group and prolongation are built on different algebras")]
    AlgebraMismatch,
    #[error("no nonzero bracket among negative and degree-zero elements fixes the sign")]
    SignUndetermined,
    #[error("the bracket relations do not determine a field for `{0}`")]
    Unsolvable(String),
}

#[derive(Debug, Clone)]
pub struct TauRealization {
    /// One field per basis element of `s`, in frame components.
    pub fields: Vec<PolyVectorField>,
    pub names: Vec<String>,
    /// `ε` in `[τ(A), τ(B)] = ε·τ([A,B])`.
    pub sign: i32,
}

/// Outcome of checking the homomorphism law on every basis pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignCheck {
    pub sign: i32,
    pub pairs_checked: usize,
    pub failures: Vec<(usize, usize)>,
}

pub fn realize_tau(s: &ProlongationAlgebra, group: &Group, frame: &Frame) -> Result<TauRealization, TauError> {
    if !s.is_terminated() {
        return Err(TauError::NotTerminated);
    }
    let g = s.negative();
    if g != group.algebra() {
        return Err(TauError::AlgebraMismatch);
    }
    let n = g.dim();
    let g0 = s.g0_maps();
    let mut fields: Vec<Option<PolyVectorField>> = vec![None; s.dim()];
    for i in 0..s.dim() {
        let coordinate_field = match s.element(i) {
            Element::Negative(j) => group.left_multiplication_generator(&g.basis(j)),
            Element::Level { k: 0, i: b } => group.automorphism_generator(&g0[b].to_matrix(g)),
            Element::Level { .. } => continue,
        };
        fields[i] = Some(frame.to_frame(&coordinate_field));
    }
    let sign = determine_sign(s, frame, &fields).ok_or(TauError::SignUndetermined)?;
    let eps = int(sign as i64);

    for i in 0..s.dim() {
        let Element::Level { k, .. } = s.element(i) else { continue };
        if k == 0 {
            continue;
        }
        let per_component: Vec<Vec<Monomial>> = (0..n)
            .map(|c| {
                monomials_up_to(frame.coordinate_weights(), g.weight(c).unsigned_abs() + k as u32)
                    .into_iter()
                    .filter(|m| !m.is_one())
                    .collect()
            })
            .collect();
        let ansatz = FieldAnsatz::from_monomials(per_component);
        let negatives: Vec<(PolyVectorField, PolyVectorField)> = (0..n)
            .map(|x| {
                let xs = s.negative_index(x);
                let target = s
                    .bracket(&s.basis(i), &s.basis(xs))
                    .expect("terminated prolongation has a full bracket table");
                let rhs = combine(n, &target, &fields).scale(&eps);
                (fields[xs].clone().expect("negative fields exist"), rhs)
            })
            .collect();
        let op = |w: &PolyVectorField| -> Vec<Polynomial> {
            negatives
                .iter()
                .flat_map(|(tx, _)| frame.bracket(w, tx).components)
                .collect()
        };
        let rhs: Vec<Polynomial> = negatives.iter().flat_map(|(_, r)| r.components.clone()).collect();
        let w = ansatz
            .solve(op, &rhs)
            .map_err(|_| TauError::Unsolvable(s.names()[i].clone()))?;
        fields[i] = Some(w);
    }
    Ok(TauRealization {
        fields: fields.into_iter().map(|f| f.expect("all fields built")).collect(),
        names: s.names().to_vec(),
        sign,
    })
}

/// `τ(v)` for `v` in the basis of `s`, from the fields computed so far.
fn combine(n: usize, v: &[Rational], fields: &[Option<PolyVectorField>]) -> PolyVectorField {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .fold(PolyVectorField::zero(n), |acc, (i, c)| {
            let f = fields[i].as_ref().expect("bracket lands in an earlier level");
            acc.add(&f.scale(c))
        })
}

fn determine_sign(s: &ProlongationAlgebra, frame: &Frame, fields: &[Option<PolyVectorField>]) -> Option<i32> {
    let n = s.negative().dim();
    for i in 0..s.dim() {
        for j in i + 1..s.dim() {
            let (Some(a), Some(b)) = (&fields[i], &fields[j]) else { continue };
            let ab = s.bracket(&s.basis(i), &s.basis(j))?;
            if ab.iter().all(Zero::is_zero) {
                continue;
            }
            let lhs = frame.bracket(a, b);
            let rhs = combine(n, &ab, fields);
            if lhs == rhs {
                return Some(1);
            }
            if lhs == rhs.scale(&int(-1)) {
                return Some(-1);
            }
            return None;
        }
    }
    None
}

impl TauRealization {
    /// `τ(v)` for an element of `s`.
    pub fn field_of(&self, v: &[Rational]) -> PolyVectorField {
        let n = self.fields.first().map_or(0, PolyVectorField::len);
        PolyVectorField::combination(n, v, &self.fields)
    }

    /// Checks `[τ(A), τ(B)] = ε·τ([A,B])` with the stored `ε` on all pairs.
    pub fn check_homomorphism(&self, s: &ProlongationAlgebra, frame: &Frame) -> SignCheck {
        let eps = int(self.sign as i64);
        let mut failures = Vec::new();
        let mut pairs_checked = 0;
        for i in 0..s.dim() {
            for j in i + 1..s.dim() {
                let Some(ab) = s.bracket(&s.basis(i), &s.basis(j)) else { continue };
                pairs_checked += 1;
                let lhs = frame.bracket(&self.fields[i], &self.fields[j]);
                if lhs != self.field_of(&ab).scale(&eps) {
                    failures.push((i, j));
                }
            }
        }
        SignCheck {
            sign: self.sign,
            pairs_checked,
            failures,
        }
    }
}
