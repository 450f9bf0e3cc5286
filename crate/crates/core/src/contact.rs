//! Contact and conformal conditions on vector fields, jets of contact
//! fields, and direct polynomial solvers for both systems.
//!
//! Fields are taken in frame components. Every residual is a polynomial,
//! so each condition is decided as an exact identity.

use num_traits::Zero;
use thiserror::Error;

use crate::algebra::GradedLieAlgebra;
use crate::derivations::DegreeZeroMap;
use crate::frame::{FieldAnsatz, Frame, PolyVectorField};
use crate::linalg::{Matrix, Rational, Subspace};
use crate::poly::{monomials_up_to, Monomial, Polynomial};
use crate::prolongation::ProlongationAlgebra;

pub const DEFAULT_ORACLE_DEGREE: u32 = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContactError {
    #[error("the field is not a contact field")]
    NotContact,
    #[error("jets are only defined up to order 1, got {0}")]
    UnsupportedOrder(usize),
    #[error("the h-system needs an algebra with layers of dimension 2, 1, 1")]
    NotEngelShaped,
}

/// Named residual polynomials of a system of equations.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectReport {
    pub residuals: Vec<(String, Polynomial)>,
    pub all_zero: bool,
}

impl DefectReport {
    fn new(residuals: Vec<(String, Polynomial)>) -> Self {
        let all_zero = residuals.iter().all(|(_, p)| p.is_zero());
        DefectReport { residuals, all_zero }
    }

    /// Labels of the nonzero residuals.
    pub fn failing(&self) -> Vec<&str> {
        self.residuals
            .iter()
            .filter(|(_, p)| !p.is_zero())
            .map(|(l, _)| l.as_str())
            .collect()
    }
}

fn contact_residuals(v: &PolyVectorField, frame: &Frame) -> Vec<Polynomial> {
    let g = frame.algebra();
    let n = g.dim();
    let mut out = Vec::new();
    for &h in g.layer(-1) {
        let mut e = PolyVectorField::zero(n);
        e.components[h] = Polynomial::one();
        let b = frame.bracket(v, &e);
        for (k, c) in b.components.into_iter().enumerate() {
            if g.weight(k) != -1 {
                out.push(c);
            }
        }
    }
    out
}

fn contact_labels(g: &GradedLieAlgebra) -> Vec<String> {
    let mut out = Vec::new();
    for &h in g.layer(-1) {
        for k in 0..g.dim() {
            if g.weight(k) != -1 {
                out.push(format!("[V,{}]|{}", g.names()[h], g.names()[k]));
            }
        }
    }
    out
}

/// `B[i][j] = X̃_j f_i` over the first layer: the horizontal block of `V`'s
/// first derivatives, whose membership in `co(m)` is the conformal condition.
fn horizontal_block(v: &PolyVectorField, frame: &Frame) -> Vec<Vec<Polynomial>> {
    let h = frame.algebra().layer(-1);
    h.iter()
        .map(|&i| h.iter().map(|&j| frame.derivative(j, &v.components[i])).collect())
        .collect()
}

fn conformal_residuals(v: &PolyVectorField, frame: &Frame) -> Vec<Polynomial> {
    let b = horizontal_block(v, frame);
    let m = b.len();
    let mut out = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            out.push(&b[i][j] + &b[j][i]);
        }
    }
    for i in 1..m {
        out.push(&b[i][i] - &b[0][0]);
    }
    out
}

fn conformal_labels(g: &GradedLieAlgebra) -> Vec<String> {
    let names: Vec<&String> = g.layer(-1).iter().map(|&i| &g.names()[i]).collect();
    let m = names.len();
    let mut out = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            out.push(format!("skew({},{})", names[i], names[j]));
        }
    }
    for i in 1..m {
        out.push(format!("trace({},{})", names[i], names[0]));
    }
    out
}

/// Residuals of "`[V, X̃]` is horizontal for each horizontal `X̃`": the
/// non-horizontal frame components of each such bracket.
pub fn contact_defect(v: &PolyVectorField, frame: &Frame) -> DefectReport {
    let labels = contact_labels(frame.algebra());
    DefectReport::new(labels.into_iter().zip(contact_residuals(v, frame)).collect())
}

/// Residuals of the `co(m)` condition on the horizontal derivative block:
/// `B_ij + B_ji` for `i < j` and `B_ii − B_00`.
pub fn conformal_defect(v: &PolyVectorField, frame: &Frame) -> Result<DefectReport, ContactError> {
    if !contact_defect(v, frame).all_zero {
        return Err(ContactError::NotContact);
    }
    let labels = conformal_labels(frame.algebra());
    Ok(DefectReport::new(labels.into_iter().zip(conformal_residuals(v, frame)).collect()))
}

/// Layered derivative data of a contact field at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactJet {
    pub point: Vec<Rational>,
    /// `A^{-w}` for `w = 1 … s`: the components of `V(p)` in each layer.
    pub minus_parts: Vec<Vec<Rational>>,
    /// `A⁰(X) = X̃(A^w)(p)` for `X` of weight `w`.
    pub zero_part: DegreeZeroMap,
    /// `A¹(X) = X̃(A^{w+1})(p)`, present for order 1.
    pub one_part: Option<FirstOrderJet>,
}

/// `A¹`: a degree-zero map on each horizontal generator, and a layer
/// vector on every other generator.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstOrderJet {
    pub horizontal: Vec<DegreeZeroMap>,
    /// Indexed by generator; empty for horizontal generators.
    pub lower: Vec<Vec<Rational>>,
}

impl FirstOrderJet {
    pub fn is_zero(&self) -> bool {
        self.horizontal.iter().all(|d| d.blocks.iter().all(Matrix::is_zero))
            && self.lower.iter().flatten().all(Zero::is_zero)
    }
}

/// Degree-zero map with block entries `(r, c) ↦ op(X̃_c a_r)` on each layer.
fn derivative_map(
    g: &GradedLieAlgebra,
    v: &PolyVectorField,
    frame: &Frame,
    op: impl Fn(&Polynomial) -> Rational,
) -> DegreeZeroMap {
    let mut d = DegreeZeroMap::zero(g);
    for (w, block) in d.blocks.iter_mut().enumerate() {
        let layer = g.layer(-(w as i32) - 1);
        for (r, &er) in layer.iter().enumerate() {
            for (c, &ec) in layer.iter().enumerate() {
                block[(r, c)] = op(&frame.derivative(ec, &v.components[er]));
            }
        }
    }
    d
}

pub fn jet(v: &PolyVectorField, frame: &Frame, point: &[Rational], order: usize) -> Result<ContactJet, ContactError> {
    if order > 1 {
        return Err(ContactError::UnsupportedOrder(order));
    }
    if !contact_defect(v, frame).all_zero {
        return Err(ContactError::NotContact);
    }
    let g = frame.algebra();
    let minus_parts = (1..=g.step() as i32)
        .map(|w| g.layer(-w).iter().map(|&i| v.components[i].eval(point)).collect())
        .collect();
    let zero_part = derivative_map(g, v, frame, |p| p.eval(point));
    let one_part = (order == 1).then(|| {
        let horizontal = g
            .layer(-1)
            .iter()
            .map(|&x| derivative_map(g, v, frame, |p| frame.derivative(x, p).eval(point)))
            .collect();
        let lower = (0..g.dim())
            .map(|x| {
                let w = g.weight(x);
                if w == -1 {
                    return Vec::new();
                }
                g.layer(w + 1)
                    .iter()
                    .map(|&r| frame.derivative(x, &v.components[r]).eval(point))
                    .collect()
            })
            .collect();
        FirstOrderJet { horizontal, lower }
    });
    Ok(ContactJet {
        point: point.to_vec(),
        minus_parts,
        zero_part,
        one_part,
    })
}

/// `A⁰[S,T] = [A⁰S, T] − [A⁰T, S]` on all basis pairs.
pub fn jet_jacobi_check(j: &ContactJet, g: &GradedLieAlgebra) -> bool {
    let d = &j.zero_part;
    (0..g.dim()).all(|s| {
        (s + 1..g.dim()).all(|t| {
            let lhs = d.apply(g, &g.bracket(&g.basis(s), &g.basis(t)));
            let a = g.bracket(&d.apply(g, &g.basis(s)), &g.basis(t));
            let b = g.bracket(&d.apply(g, &g.basis(t)), &g.basis(s));
            lhs.iter().zip(a.iter().zip(&b)).all(|(l, (x, y))| *l == x - y)
        })
    })
}

/// Whether `A⁰` lies in `g₀` (flat layout).
pub fn zero_part_in(j: &ContactJet, g0: &Subspace) -> bool {
    g0.contains(&j.zero_part.to_flat())
}

/// `A¹` as an action vector of level one of `s`, if its horizontal values
/// lie in `g₀`.
pub fn one_part_action(j: &ContactJet, s: &ProlongationAlgebra) -> Option<Vec<Rational>> {
    let one = j.one_part.as_ref()?;
    let g = s.negative();
    let g0 = &s.levels()[0];
    let mut out = Vec::new();
    let mut horizontal = one.horizontal.iter();
    for x in 0..g.dim() {
        if g.weight(x) == -1 {
            let d = horizontal.next().expect("one map per horizontal generator");
            out.extend(g0.coordinates(&d.to_flat())?);
        } else {
            out.extend(one.lower[x].iter().cloned());
        }
    }
    Some(out)
}

/// Whether `A¹` lies in the computed level one of `s`.
pub fn one_part_in(j: &ContactJet, s: &ProlongationAlgebra) -> bool {
    match (one_part_action(j, s), s.levels().get(1)) {
        (Some(a), Some(level)) => level.contains(&a),
        _ => false,
    }
}

/// The four scalar equations on `h` for the Engel layout, and the
/// reconstruction of `V` from a solution.
#[derive(Debug, Clone)]
pub struct HSystem {
    pub monomials: Vec<Monomial>,
    pub space: Subspace,
}

impl HSystem {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// The canonical basis of solutions as polynomials.
    pub fn basis(&self) -> Vec<Polynomial> {
        self.space.basis().iter().map(|c| self.polynomial(c)).collect()
    }

    pub fn polynomial(&self, coeffs: &[Rational]) -> Polynomial {
        self.monomials
            .iter()
            .zip(coeffs)
            .filter(|(_, c)| !c.is_zero())
            .fold(Polynomial::zero(), |acc, (m, c)| &acc + &Polynomial::term(c.clone(), m.clone()))
    }

    pub fn contains(&self, h: &Polynomial) -> bool {
        let index: std::collections::BTreeMap<&Monomial, usize> =
            self.monomials.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut v = vec![Rational::zero(); self.monomials.len()];
        for (m, c) in h.terms() {
            match index.get(m) {
                Some(&i) => v[i] = c.clone(),
                None => return false,
            }
        }
        self.space.contains(&v)
    }
}

struct EngelSlots {
    x1: usize,
    x2: usize,
    y: usize,
    z: usize,
}

fn engel_slots(g: &GradedLieAlgebra) -> Result<EngelSlots, ContactError> {
    if g.layer_dims() != [2, 1, 1] {
        return Err(ContactError::NotEngelShaped);
    }
    Ok(EngelSlots {
        x1: g.layer(-1)[0],
        x2: g.layer(-1)[1],
        y: g.layer(-2)[0],
        z: g.layer(-3)[0],
    })
}

/// Which equations on `h` to impose.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HEquations {
    /// `X̃₁³h = 0, X̃₂h = 0, Ỹ²h = 0, Z̃²h = 0` only.
    Reduced,
    /// The reduced equations together with the contact and conformal
    /// systems for the field reconstructed from `h`.
    Complete,
}

/// Solves the equations on `h` over polynomials of weighted degree at
/// most `max_degree`.
pub fn solve_h_system(frame: &Frame, max_degree: u32, equations: HEquations) -> Result<HSystem, ContactError> {
    let e = engel_slots(frame.algebra())?;
    let monomials = monomials_up_to(frame.coordinate_weights(), max_degree);
    let d = |i: usize, p: &Polynomial, times: usize| (0..times).fold(p.clone(), |q, _| frame.derivative(i, &q));
    let ansatz = FieldAnsatz::from_monomials(vec![monomials.clone()]);
    let system = ansatz.linear_system(|v| {
        let h = &v.components[0];
        let mut r = vec![d(e.x1, h, 3), d(e.x2, h, 1), d(e.y, h, 2), d(e.z, h, 2)];
        if equations == HEquations::Complete {
            let field = field_from_h(h, frame).expect("shape checked");
            r.extend(contact_residuals(&field, frame));
            r.extend(conformal_residuals(&field, frame));
        }
        r
    });
    Ok(HSystem {
        monomials,
        space: system.nullspace(),
    })
}

/// `V = (Ỹh) X̃₁ + (X̃₁²h) X̃₂ − (X̃₁h) Ỹ + h Z̃`.
pub fn field_from_h(h: &Polynomial, frame: &Frame) -> Result<PolyVectorField, ContactError> {
    let e = engel_slots(frame.algebra())?;
    let mut v = PolyVectorField::zero(4);
    v.components[e.x1] = frame.derivative(e.y, h);
    v.components[e.x2] = frame.derivative(e.x1, &frame.derivative(e.x1, h));
    v.components[e.y] = -frame.derivative(e.x1, h);
    v.components[e.z] = h.clone();
    Ok(v)
}

/// Polynomial conformal fields found by a direct linear solve.
#[derive(Debug, Clone)]
pub struct ConformalSolutions {
    pub ansatz: FieldAnsatz,
    pub space: Subspace,
}

impl ConformalSolutions {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn fields(&self) -> Vec<PolyVectorField> {
        self.space.basis().iter().map(|c| self.ansatz.field(c)).collect()
    }

    /// Whether the span of `fields` equals the solution space; `None` if
    /// some field does not fit in the ansatz.
    pub fn span_matches(&self, fields: &[PolyVectorField]) -> Option<bool> {
        let coords = fields
            .iter()
            .map(|f| self.ansatz.express(f))
            .collect::<Option<Vec<_>>>()?;
        let other = Subspace::span(self.ansatz.len(), coords);
        Some(other == self.space)
    }
}

/// All fields whose frame components have weighted degree at most
/// `max_degree` and satisfy both the contact and the conformal system.
pub fn solve_polynomial_conformal(frame: &Frame, max_degree: u32) -> ConformalSolutions {
    let ansatz = FieldAnsatz::uniform(frame.coordinate_weights(), frame.dim(), max_degree);
    let system = ansatz.linear_system(|v| {
        let mut r = contact_residuals(v, frame);
        r.extend(conformal_residuals(v, frame));
        r
    });
    ConformalSolutions {
        space: system.nullspace(),
        ansatz,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::left_invariant_frame;
    use crate::linalg::{int, rat};
    use crate::presets;

    fn engel() -> Frame {
        left_invariant_frame(&presets::engel_group())
    }

    fn p(frame: &Frame, s: &str) -> Polynomial {
        let names: Vec<&str> = frame.coordinate_names().iter().map(String::as_str).collect();
        Polynomial::parse(s, &names).unwrap()
    }

    fn field(frame: &Frame, comps: [&str; 4]) -> PolyVectorField {
        PolyVectorField::new(comps.iter().map(|c| p(frame, c)).collect())
    }

    #[test]
    fn vertical_field_is_contact() {
        let f = engel();
        assert!(contact_defect(&field(&f, ["0", "0", "0", "1"]), &f).all_zero);
        let y = contact_defect(&field(&f, ["0", "0", "1", "0"]), &f);
        assert!(!y.all_zero);
        assert_eq!(y.failing(), ["[V,X1]|Z"]);
    }

    #[test]
    fn conformal_needs_contact() {
        let f = engel();
        assert_eq!(
            conformal_defect(&field(&f, ["0", "0", "1", "0"]), &f),
            Err(ContactError::NotContact)
        );
    }

    #[test]
    fn dilation_field_jet() {
        let f = engel();
        let v = field(&f, ["x1", "x2", "2*y - x1*x2", "3*z - 2*x1*y + 1/2*x1^2*x2"]);
        assert!(conformal_defect(&v, &f).unwrap().all_zero);
        let j = jet(&v, &f, &[rat(1, 2), int(-3), rat(2, 7), int(5)], 1).unwrap();
        assert_eq!(j.zero_part, DegreeZeroMap::grading(f.algebra()));
        assert!(jet_jacobi_check(&j, f.algebra()));
        assert!(j.one_part.unwrap().is_zero());
    }

    #[test]
    fn corrupted_jet_fails_jacobi() {
        let f = engel();
        let v = field(&f, ["0", "0", "0", "1"]);
        let mut j = jet(&v, &f, &vec![int(0); 4], 0).unwrap();
        assert!(jet_jacobi_check(&j, f.algebra()));
        j.zero_part.blocks[0][(0, 1)] = int(1);
        assert!(!jet_jacobi_check(&j, f.algebra()));
    }

    #[test]
    fn h_system_and_reconstruction() {
        let f = engel();
        let hs = solve_h_system(&f, 6, HEquations::Complete).unwrap();
        assert_eq!(hs.dim(), 5);
        // the reduced equations alone leave two extra solutions
        let reduced = solve_h_system(&f, 6, HEquations::Reduced).unwrap();
        assert_eq!(reduced.dim(), 7);
        assert!(reduced.contains(&p(&f, "z - 1/2*x1^2*x2")));
        assert!(!hs.contains(&p(&f, "z - 1/2*x1^2*x2")));
        assert!(hs.contains(&p(&f, "3*z - 2*x1*y + 1/2*x1^2*x2")));
        let v = field_from_h(&p(&f, "-x1"), &f).unwrap();
        assert_eq!(v, field(&f, ["0", "0", "1", "-x1"]));
        for h in hs.basis() {
            let v = field_from_h(&h, &f).unwrap();
            assert!(conformal_defect(&v, &f).unwrap().all_zero);
        }
    }

    #[test]
    fn abelian_conformal_killing() {
        let f = left_invariant_frame(&presets::first_kind_group(presets::abelian(3)));
        assert_eq!(solve_polynomial_conformal(&f, 3).dim(), 10);
        let f = left_invariant_frame(&presets::first_kind_group(presets::abelian(1)));
        // co(1) is everything: all polynomials of degree at most 3
        assert_eq!(solve_polynomial_conformal(&f, 3).dim(), 4);
    }
}
