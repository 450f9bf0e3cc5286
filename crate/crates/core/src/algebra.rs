//! Stratified nilpotent Lie algebras given by structure constants.
//!
//! Generators are declared layer by layer; layer `d` (1-based) carries
//! weight `-d`. The declaration order is the basis order used by every
//! matrix in the crate.

use std::collections::HashMap;
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::linalg::{Rational, Subspace};

/// Coefficient ring for algebra elements: rationals for points of the
/// algebra, polynomials for elements depending on group coordinates.
pub trait Coefficient: Clone + PartialEq + fmt::Debug {
    fn null() -> Self;
    fn is_null(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn scaled(&self, r: &Rational) -> Self;
}

impl Coefficient for Rational {
    fn null() -> Self {
        Zero::zero()
    }
    fn is_null(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn scaled(&self, r: &Rational) -> Self {
        self * r
    }
}

/// `[left, right] = Σ coeff · target`.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketRelation {
    pub left: String,
    pub right: String,
    pub terms: Vec<(Rational, String)>,
}

/// Declarative description of an algebra: layers of generator names and
/// the nonzero brackets. Unlisted brackets are zero.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AlgebraSpec {
    pub name: String,
    pub layers: Vec<Vec<String>>,
    pub brackets: Vec<BracketRelation>,
}

impl AlgebraSpec {
    pub fn new(name: impl Into<String>) -> Self {
        AlgebraSpec {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn layer(mut self, names: &[&str]) -> Self {
        self.layers
            .push(names.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn bracket(mut self, left: &str, right: &str, terms: &[(Rational, &str)]) -> Self {
        self.brackets.push(BracketRelation {
            left: left.into(),
            right: right.into(),
            terms: terms
                .iter()
                .map(|(c, t)| (c.clone(), t.to_string()))
                .collect(),
        });
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("the algebra has no layers")]
    NoLayers,
    #[error("layer {0} is empty")]
    EmptyLayer(usize),
    #[error("generator `{0}` declared twice")]
    DuplicateGenerator(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("bracket [{left},{right}] listed more than once")]
    DuplicateBracket { left: String, right: String },
    #[error("antisymmetry violated by [{left},{right}]")]
    AntisymmetryViolation { left: String, right: String },
    #[error("grading violated: [{left},{right}] has a component along {target}")]
    GradingViolation {
        left: String,
        right: String,
        target: String,
    },
    #[error("Jacobi identity fails on ({a}, {b}, {c})")]
    JacobiViolation { a: String, b: String, c: String },
    #[error("layer {layer} is not spanned by brackets of layer 1 with layer {}", layer - 1)]
    GenerationFailure { layer: usize },
}

#[derive(Clone, PartialEq)]
pub struct GradedLieAlgebra {
    name: String,
    names: Vec<String>,
    weights: Vec<i32>,
    layers: Vec<Vec<usize>>,
    /// `structure[i][j]` = coordinates of `[e_i, e_j]`.
    structure: Vec<Vec<Vec<Rational>>>,
}

impl GradedLieAlgebra {
    /// Builds and fully validates an algebra: antisymmetry, grading,
    /// Jacobi and generation by the first layer.
    pub fn from_spec(spec: &AlgebraSpec) -> Result<Self, AlgebraError> {
        let g = Self::from_spec_ungenerated(spec)?;
        g.check_generation_detailed()?;
        Ok(g)
    }

    /// Like [`from_spec`](Self::from_spec) but accepts algebras whose lower
    /// layers are not generated by the first one.
    pub fn from_spec_ungenerated(spec: &AlgebraSpec) -> Result<Self, AlgebraError> {
        if spec.layers.is_empty() {
            return Err(AlgebraError::NoLayers);
        }
        let mut names = Vec::new();
        let mut weights = Vec::new();
        let mut layers = Vec::new();
        let mut index = HashMap::new();
        for (d, layer) in spec.layers.iter().enumerate() {
            if layer.is_empty() {
                return Err(AlgebraError::EmptyLayer(d + 1));
            }
            let mut ids = Vec::new();
            for name in layer {
                if index.insert(name.clone(), names.len()).is_some() {
                    return Err(AlgebraError::DuplicateGenerator(name.clone()));
                }
                ids.push(names.len());
                names.push(name.clone());
                weights.push(-(d as i32 + 1));
            }
            layers.push(ids);
        }
        let n = names.len();
        let lookup = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| AlgebraError::UnknownGenerator(s.to_string()))
        };

        let mut structure = vec![vec![vec![Rational::zero(); n]; n]; n];
        let mut listed: HashMap<(usize, usize), Vec<Rational>> = HashMap::new();
        for rel in &spec.brackets {
            let (i, j) = (lookup(&rel.left)?, lookup(&rel.right)?);
            let mut value = vec![Rational::zero(); n];
            for (c, t) in &rel.terms {
                let k = lookup(t)?;
                value[k] += c;
            }
            if i == j {
                if value.iter().any(|v| !v.is_zero()) {
                    return Err(AlgebraError::AntisymmetryViolation {
                        left: rel.left.clone(),
                        right: rel.right.clone(),
                    });
                }
                continue;
            }
            if listed.contains_key(&(i, j)) {
                return Err(AlgebraError::DuplicateBracket {
                    left: rel.left.clone(),
                    right: rel.right.clone(),
                });
            }
            if let Some(other) = listed.get(&(j, i)) {
                let negated: Vec<Rational> = other.iter().map(|v| -v).collect();
                return Err(if negated == value {
                    AlgebraError::DuplicateBracket {
                        left: rel.left.clone(),
                        right: rel.right.clone(),
                    }
                } else {
                    AlgebraError::AntisymmetryViolation {
                        left: rel.left.clone(),
                        right: rel.right.clone(),
                    }
                });
            }
            for (k, v) in value.iter().enumerate() {
                if !v.is_zero() && weights[k] != weights[i] + weights[j] {
                    return Err(AlgebraError::GradingViolation {
                        left: rel.left.clone(),
                        right: rel.right.clone(),
                        target: names[k].clone(),
                    });
                }
            }
            structure[j][i] = value.iter().map(|v| -v).collect();
            structure[i][j] = value.clone();
            listed.insert((i, j), value);
        }

        let g = GradedLieAlgebra {
            name: spec.name.clone(),
            names,
            weights,
            layers,
            structure,
        };
        g.check_jacobi()?;
        Ok(g)
    }

    fn check_jacobi(&self) -> Result<(), AlgebraError> {
        let n = self.dim();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    let (ea, eb, ec) = (self.basis(a), self.basis(b), self.basis(c));
                    let t1 = self.bracket(&ea, &self.bracket(&eb, &ec));
                    let t2 = self.bracket(&eb, &self.bracket(&ec, &ea));
                    let t3 = self.bracket(&ec, &self.bracket(&ea, &eb));
                    if t1.iter().zip(&t2).zip(&t3).any(|((x, y), z)| !(x + y + z).is_zero()) {
                        return Err(AlgebraError::JacobiViolation {
                            a: self.names[a].clone(),
                            b: self.names[b].clone(),
                            c: self.names[c].clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn check_generation_detailed(&self) -> Result<(), AlgebraError> {
        for k in 2..=self.step() {
            let target = &self.layers[k - 1];
            let mut spanning = Vec::new();
            for &x in &self.layers[0] {
                for &y in &self.layers[k - 2] {
                    let v = &self.structure[x][y];
                    spanning.push(target.iter().map(|&t| v[t].clone()).collect());
                }
            }
            if Subspace::span(target.len(), spanning).dim() != target.len() {
                return Err(AlgebraError::GenerationFailure { layer: k });
            }
        }
        Ok(())
    }

    /// True iff brackets of the first layer with layer `k-1` span layer `k`
    /// for every `k >= 2`.
    pub fn check_generation(&self) -> bool {
        self.check_generation_detailed().is_ok()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    /// Nilpotency step: the number of layers.
    pub fn step(&self) -> usize {
        self.layers.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn weight(&self, i: usize) -> i32 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[i32] {
        &self.weights
    }

    /// Basis indices of the layer with the given (negative) weight; empty if
    /// the weight is out of range.
    pub fn layer(&self, weight: i32) -> &[usize] {
        if weight >= 0 || -weight as usize > self.layers.len() {
            return &[];
        }
        &self.layers[(-weight - 1) as usize]
    }

    pub fn layer_dims(&self) -> Vec<usize> {
        self.layers.iter().map(Vec::len).collect()
    }

    /// Position of basis element `i` inside its own layer.
    pub fn position_in_layer(&self, i: usize) -> usize {
        self.layer(self.weights[i])
            .iter()
            .position(|&j| j == i)
            .expect("every basis element belongs to its layer")
    }

    pub fn basis(&self, i: usize) -> Vec<Rational> {
        crate::linalg::unit(self.dim(), i)
    }

    pub fn structure_constants(&self, i: usize, j: usize) -> &[Rational] {
        &self.structure[i][j]
    }

    /// Bilinear extension of the structure constants, over any coefficient ring.
    pub fn bracket<C: Coefficient>(&self, a: &[C], b: &[C]) -> Vec<C> {
        let n = self.dim();
        let mut out = vec![C::null(); n];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_null() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if bj.is_null() {
                    continue;
                }
                let c = &self.structure[i][j];
                if c.iter().all(Zero::is_zero) {
                    continue;
                }
                let prod = ai.times(bj);
                for (k, ck) in c.iter().enumerate() {
                    if !Zero::is_zero(ck) {
                        out[k] = out[k].plus(&prod.scaled(ck));
                    }
                }
            }
        }
        out
    }

    /// Coordinates of `v` restricted to the layer of the given weight.
    pub fn layer_coordinates(&self, v: &[Rational], weight: i32) -> Vec<Rational> {
        self.layer(weight).iter().map(|&i| v[i].clone()).collect()
    }

    /// Embeds layer coordinates back into the full basis.
    pub fn from_layer_coordinates(&self, coords: &[Rational], weight: i32) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim()];
        for (&i, c) in self.layer(weight).iter().zip(coords) {
            v[i] = c.clone();
        }
        v
    }
}

impl fmt::Debug for GradedLieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GradedLieAlgebra")
            .field("name", &self.name)
            .field("names", &self.names)
            .field("layer_dims", &self.layer_dims())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int, rat};
    use crate::presets;

    fn e(g: &GradedLieAlgebra, name: &str) -> Vec<Rational> {
        g.basis(g.index_of(name).unwrap())
    }

    #[test]
    fn engel_is_valid() {
        let g = presets::engel();
        assert_eq!(g.layer_dims(), vec![2, 1, 1]);
        assert_eq!(g.step(), 3);
        assert!(g.check_generation());
    }

    #[test]
    fn engel_brackets() {
        let g = presets::engel();
        assert_eq!(g.bracket(&e(&g, "X1"), &e(&g, "X2")), e(&g, "Y"));
        assert_eq!(g.bracket(&e(&g, "X1"), &e(&g, "Y")), e(&g, "Z"));
        assert!(g.bracket(&e(&g, "X2"), &e(&g, "Y")).iter().all(Zero::is_zero));
        // antisymmetry filled in
        let neg_y: Vec<Rational> = e(&g, "Y").iter().map(|v| -v).collect();
        assert_eq!(g.bracket(&e(&g, "X2"), &e(&g, "X1")), neg_y);
    }

    #[test]
    fn heisenberg_is_valid() {
        let g = presets::heisenberg();
        assert_eq!(g.layer_dims(), vec![2, 1]);
        assert!(g.check_generation());
    }

    #[test]
    fn grading_violation_is_rejected() {
        let spec = AlgebraSpec::new("bad")
            .layer(&["X1", "X2"])
            .layer(&["Y"])
            .bracket("X1", "X2", &[(int(1), "X1")]);
        assert_eq!(
            GradedLieAlgebra::from_spec(&spec),
            Err(AlgebraError::GradingViolation {
                left: "X1".into(),
                right: "X2".into(),
                target: "X1".into()
            })
        );
    }

    #[test]
    fn jacobi_violation_is_rejected() {
        let spec = AlgebraSpec::new("bad")
            .layer(&["A", "B"])
            .layer(&["C"])
            .layer(&["D", "F"])
            .layer(&["E"])
            .bracket("A", "B", &[(int(1), "C")])
            .bracket("A", "C", &[(int(1), "D")])
            .bracket("B", "C", &[(int(1), "F")])
            .bracket("A", "F", &[(int(1), "E")]);
        // Jacobi(A,B,C): [A,[B,C]] + [B,[C,A]] + [C,[A,B]] = [A,F] - [B,D] + 0 = E.
        assert_eq!(
            GradedLieAlgebra::from_spec(&spec),
            Err(AlgebraError::JacobiViolation {
                a: "A".into(),
                b: "B".into(),
                c: "C".into()
            })
        );
    }

    #[test]
    fn duplicate_and_conflicting_entries() {
        let base = AlgebraSpec::new("h").layer(&["X1", "X2"]).layer(&["Y"]);
        let dup = base
            .clone()
            .bracket("X1", "X2", &[(int(1), "Y")])
            .bracket("X2", "X1", &[(int(-1), "Y")]);
        assert!(matches!(
            GradedLieAlgebra::from_spec(&dup),
            Err(AlgebraError::DuplicateBracket { .. })
        ));
        let conflict = base
            .clone()
            .bracket("X1", "X2", &[(int(1), "Y")])
            .bracket("X2", "X1", &[(int(1), "Y")]);
        assert!(matches!(
            GradedLieAlgebra::from_spec(&conflict),
            Err(AlgebraError::AntisymmetryViolation { .. })
        ));
        let self_bracket = base.bracket("X1", "X1", &[(rat(1, 2), "Y")]);
        assert!(matches!(
            GradedLieAlgebra::from_spec(&self_bracket),
            Err(AlgebraError::AntisymmetryViolation { .. })
        ));
    }

    #[test]
    fn unreachable_layer_fails_generation() {
        let spec = AlgebraSpec::new("split").layer(&["A"]).layer(&["B"]);
        assert_eq!(
            GradedLieAlgebra::from_spec(&spec),
            Err(AlgebraError::GenerationFailure { layer: 2 })
        );
        let g = GradedLieAlgebra::from_spec_ungenerated(&spec).unwrap();
        assert!(!g.check_generation());
    }

    #[test]
    fn build_is_deterministic() {
        let a = presets::engel();
        let b = presets::engel();
        assert_eq!(a, b);
    }

    #[test]
    fn bracket_respects_grading() {
        let g = presets::engel();
        for i in 0..g.dim() {
            for j in 0..g.dim() {
                for (k, c) in g.structure_constants(i, j).iter().enumerate() {
                    if !c.is_zero() {
                        assert_eq!(g.weight(k), g.weight(i) + g.weight(j));
                    }
                }
            }
        }
    }
}
