//! The simply connected group of a graded nilpotent algebra, in exponential
//! coordinates described by a [`CoordinateRecipe`].
//!
//! A point with coordinates `x` is the product `exp(F₁(x))·…·exp(F_r(x))`
//! where each factor `F_i` collects the generators of one recipe factor.
//! Products are computed through the truncated BCH series and then
//! re-factored into recipe form. Because the coordinate change to the log
//! is unipotent and graded, re-factoring is a finite fixed-point iteration.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{Coefficient, GradedLieAlgebra};
use crate::frame::{Frame, PolyVectorField};
use crate::linalg::{Matrix, Rational};
use crate::poly::Polynomial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("BCH series is only implemented up to step 3, the algebra has step {0}")]
    UnsupportedStep(usize),
    #[error("coordinate recipe names unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("generator `{0}` appears in more than one recipe factor")]
    DuplicateGenerator(String),
    #[error("generator `{0}` is missing from the coordinate recipe")]
    MissingGenerator(String),
    #[error("dilation scale must be positive, got {0}")]
    NonpositiveScale(Rational),
    #[error("first-layer block does not extend to a graded automorphism")]
    NotAnAutomorphism,
    #[error("map does not push the horizontal frame forward invertibly")]
    NotInvertible,
}

fn add_vec<C: Coefficient>(a: &[C], b: &[C]) -> Vec<C> {
    a.iter().zip(b).map(|(x, y)| x.plus(y)).collect()
}

fn scale_vec<C: Coefficient>(a: &[C], r: &Rational) -> Vec<C> {
    a.iter().map(|x| x.scaled(r)).collect()
}

/// `log(exp(a)·exp(b))` in an algebra of step at most three:
/// `a + b + ½[a,b] + 1/12[a,[a,b]] + 1/12[b,[b,a]]`.
pub fn bch<C: Coefficient>(
    g: &GradedLieAlgebra,
    a: &[C],
    b: &[C],
) -> Result<Vec<C>, GroupError> {
    if g.step() > 3 {
        return Err(GroupError::UnsupportedStep(g.step()));
    }
    let ab = g.bracket(a, b);
    let mut out = add_vec(&add_vec(a, b), &scale_vec(&ab, &Rational::new(1.into(), 2.into())));
    if g.step() == 3 {
        let twelfth = Rational::new(1.into(), 12.into());
        let a_ab = g.bracket(a, &ab);
        // [b,[b,a]] = -[b,[a,b]]
        let b_ab = g.bracket(b, &ab);
        out = add_vec(&out, &scale_vec(&a_ab, &twelfth));
        out = add_vec(&out, &scale_vec(&b_ab, &-twelfth));
    }
    Ok(out)
}

/// Ordered exponential factors; coordinate `i` always belongs to basis
/// element `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateRecipe {
    factors: Vec<Vec<usize>>,
    names: Vec<String>,
}

impl CoordinateRecipe {
    /// Exponential coordinates of the first kind: a single factor, with
    /// coordinates named after the lowercased generators.
    pub fn first_kind(g: &GradedLieAlgebra) -> Self {
        CoordinateRecipe {
            factors: vec![(0..g.dim()).collect()],
            names: g.names().iter().map(|n| n.to_lowercase()).collect(),
        }
    }

    /// Factors are listed left to right as `(generator, coordinate name)`.
    pub fn new(
        g: &GradedLieAlgebra,
        factors: &[Vec<(String, String)>],
    ) -> Result<Self, GroupError> {
        let mut names: Vec<Option<String>> = vec![None; g.dim()];
        let mut out = Vec::new();
        for factor in factors {
            let mut ids = Vec::new();
            for (gen, coord) in factor {
                let i = g
                    .index_of(gen)
                    .ok_or_else(|| GroupError::UnknownGenerator(gen.clone()))?;
                if names[i].is_some() {
                    return Err(GroupError::DuplicateGenerator(gen.clone()));
                }
                names[i] = Some(coord.clone());
                ids.push(i);
            }
            out.push(ids);
        }
        let names = names
            .into_iter()
            .enumerate()
            .map(|(i, n)| n.ok_or_else(|| GroupError::MissingGenerator(g.names()[i].clone())))
            .collect::<Result<_, _>>()?;
        Ok(CoordinateRecipe {
            factors: out,
            names,
        })
    }

    pub fn factors(&self) -> &[Vec<usize>] {
        &self.factors
    }

    pub fn coordinate_names(&self) -> &[String] {
        &self.names
    }
}

/// A polynomial self-map of the coordinate space.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateMap {
    pub components: Vec<Polynomial>,
}

impl CoordinateMap {
    pub fn identity(n: usize) -> Self {
        CoordinateMap {
            components: (0..n).map(Polynomial::var).collect(),
        }
    }

    pub fn apply(&self, p: &[Rational]) -> Vec<Rational> {
        self.components.iter().map(|c| c.eval(p)).collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &CoordinateMap) -> CoordinateMap {
        CoordinateMap {
            components: self
                .components
                .iter()
                .map(|c| c.substitute(&other.components))
                .collect(),
        }
    }

    /// `jacobian[r][c] = ∂ component_r / ∂ x_c`.
    pub fn jacobian(&self) -> Vec<Vec<Polynomial>> {
        let n = self.components.len();
        self.components
            .iter()
            .map(|p| (0..n).map(|c| p.derivative(c)).collect())
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Group {
    algebra: GradedLieAlgebra,
    recipe: CoordinateRecipe,
}

impl Group {
    pub fn new(algebra: GradedLieAlgebra, recipe: CoordinateRecipe) -> Result<Self, GroupError> {
        if algebra.step() > 3 {
            return Err(GroupError::UnsupportedStep(algebra.step()));
        }
        Ok(Group { algebra, recipe })
    }

    pub fn algebra(&self) -> &GradedLieAlgebra {
        &self.algebra
    }

    pub fn recipe(&self) -> &CoordinateRecipe {
        &self.recipe
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Coordinate weights as used for weighted degrees: `|weight|` of the
    /// generator owning each coordinate.
    pub fn coordinate_weights(&self) -> Vec<u32> {
        self.algebra.weights().iter().map(|w| w.unsigned_abs()).collect()
    }

    /// `log(exp(F₁)·…·exp(F_r))` for explicit factor arguments.
    pub fn log_of_factors<C: Coefficient>(&self, factors: &[Vec<C>]) -> Vec<C> {
        let mut acc = vec![C::null(); self.dim()];
        for f in factors {
            acc = bch(&self.algebra, &acc, f).expect("step checked in Group::new");
        }
        acc
    }

    /// The factor arguments `F_i(x)` of a coordinate vector.
    pub fn factor_arguments<C: Coefficient>(&self, coords: &[C]) -> Vec<Vec<C>> {
        self.recipe
            .factors
            .iter()
            .map(|ids| {
                let mut v = vec![C::null(); self.dim()];
                for &i in ids {
                    v[i] = coords[i].clone();
                }
                v
            })
            .collect()
    }

    /// The log of the point with the given coordinates.
    pub fn log<C: Coefficient>(&self, coords: &[C]) -> Vec<C> {
        self.log_of_factors(&self.factor_arguments(coords))
    }

    /// Inverse of [`log`](Self::log): recipe coordinates of `exp(l)`.
    pub fn coordinates_of<C: Coefficient>(&self, l: &[C]) -> Vec<C> {
        let minus_one = -Rational::one();
        let mut c = l.to_vec();
        for _ in 0..=self.dim() {
            let nonlinear = add_vec(&self.log(&c), &scale_vec(&c, &minus_one));
            let next = add_vec(l, &scale_vec(&nonlinear, &minus_one));
            if next == c {
                return c;
            }
            c = next;
        }
        panic!("coordinate re-factoring did not stabilise; the recipe is not graded")
    }

    pub fn identity(&self) -> Vec<Rational> {
        vec![Rational::zero(); self.dim()]
    }

    pub fn product<C: Coefficient>(&self, p: &[C], q: &[C]) -> Vec<C> {
        let l = bch(&self.algebra, &self.log(p), &self.log(q)).expect("step checked");
        self.coordinates_of(&l)
    }

    pub fn inverse(&self, p: &[Rational]) -> Vec<Rational> {
        let l: Vec<Rational> = self.log(p).into_iter().map(|v| -v).collect();
        self.coordinates_of(&l)
    }

    /// `x ↦ p·x`.
    pub fn left_translation(&self, p: &[Rational]) -> CoordinateMap {
        let pc: Vec<Polynomial> = p.iter().cloned().map(Polynomial::constant).collect();
        let x = self.coordinate_vars();
        CoordinateMap {
            components: self.product(&pc, &x),
        }
    }

    /// The group automorphism induced by an automorphism `a` of the algebra
    /// (a full matrix on basis coordinates).
    pub fn automorphism_map(&self, a: &Matrix) -> CoordinateMap {
        let x = self.coordinate_vars();
        let factors: Vec<Vec<Polynomial>> = self
            .factor_arguments(&x)
            .iter()
            .map(|f| apply_matrix(a, f))
            .collect();
        CoordinateMap {
            components: self.coordinates_of(&self.log_of_factors(&factors)),
        }
    }

    /// The dilation scaling each coordinate by `λ^|weight|`.
    pub fn dilation(&self, lambda: &Rational) -> Result<CoordinateMap, GroupError> {
        dilation(&self.algebra, lambda)
    }

    pub(crate) fn coordinate_vars(&self) -> Vec<Polynomial> {
        (0..self.dim()).map(Polynomial::var).collect()
    }

    /// Coordinate vector field of `t ↦ x·exp(tX)` at `t = 0`.
    pub fn right_multiplication_generator(&self, element: &[Rational]) -> PolyVectorField {
        let t = self.dim();
        let x = self.coordinate_vars();
        let tx = element_times_var(element, t);
        let l = bch(&self.algebra, &self.log(&x), &tx).expect("step checked");
        derivative_at_zero(&self.coordinates_of(&l), t)
    }

    /// Coordinate vector field of `t ↦ exp(tX)·x` at `t = 0`.
    pub fn left_multiplication_generator(&self, element: &[Rational]) -> PolyVectorField {
        let t = self.dim();
        let x = self.coordinate_vars();
        let tx = element_times_var(element, t);
        let l = bch(&self.algebra, &tx, &self.log(&x)).expect("step checked");
        derivative_at_zero(&self.coordinates_of(&l), t)
    }

    /// Coordinate vector field generating the automorphism flow `exp(tD)`
    /// of a degree-zero derivation `D` (full matrix). Only first order in
    /// `t` matters, so `exp(tD)` is replaced by `I + tD` on each factor.
    pub fn automorphism_generator(&self, d: &Matrix) -> PolyVectorField {
        let n = self.dim();
        let t = Polynomial::var(n);
        let x = self.coordinate_vars();
        let factors: Vec<Vec<Polynomial>> = self
            .factor_arguments(&x)
            .iter()
            .map(|f| {
                let df = apply_matrix(d, f);
                f.iter().zip(&df).map(|(a, b)| a + &(&t * b)).collect()
            })
            .collect();
        let coords = self.coordinates_of(&self.log_of_factors(&factors));
        derivative_at_zero(&coords, n)
    }
}

fn element_times_var(element: &[Rational], var: usize) -> Vec<Polynomial> {
    element
        .iter()
        .map(|c| Polynomial::var(var).scale(c))
        .collect()
}

fn derivative_at_zero(coords: &[Polynomial], var: usize) -> PolyVectorField {
    PolyVectorField {
        components: coords
            .iter()
            .map(|p| p.derivative(var).set_var(var, &Rational::zero()))
            .collect(),
    }
}

fn apply_matrix(a: &Matrix, v: &[Polynomial]) -> Vec<Polynomial> {
    (0..a.rows())
        .map(|r| {
            (0..a.cols()).fold(Polynomial::zero(), |acc, c| {
                if a[(r, c)].is_zero() || v[c].is_zero() {
                    acc
                } else {
                    &acc + &v[c].scale(&a[(r, c)])
                }
            })
        })
        .collect()
}

/// `δ_λ(x) = (λ^|w_i| x_i)_i`.
pub fn dilation(g: &GradedLieAlgebra, lambda: &Rational) -> Result<CoordinateMap, GroupError> {
    if *lambda <= Rational::zero() {
        return Err(GroupError::NonpositiveScale(lambda.clone()));
    }
    Ok(CoordinateMap {
        components: g
            .weights()
            .iter()
            .enumerate()
            .map(|(i, w)| {
                Polynomial::var(i).scale(&num_traits::pow(lambda.clone(), w.unsigned_abs() as usize))
            })
            .collect(),
    })
}

/// Extends a first-layer block to the unique graded automorphism of `g`
/// it generates, if there is one.
pub fn extend_automorphism(g: &GradedLieAlgebra, first_block: &Matrix) -> Result<Matrix, GroupError> {
    let n = g.dim();
    let l1 = g.layer(-1);
    if first_block.rows() != l1.len() || first_block.cols() != l1.len() {
        return Err(GroupError::NotAnAutomorphism);
    }
    if first_block.rank() != l1.len() {
        return Err(GroupError::NotAnAutomorphism);
    }
    let mut a = Matrix::zeros(n, n);
    for (r, &gr) in l1.iter().enumerate() {
        for (c, &gc) in l1.iter().enumerate() {
            a[(gr, gc)] = first_block[(r, c)].clone();
        }
    }
    for k in 2..=g.step() as i32 {
        let target = g.layer(-k);
        let mut sources = Vec::new();
        let mut images = Vec::new();
        for &x in l1 {
            for &y in g.layer(1 - k) {
                let v = g.bracket(&g.basis(x), &g.basis(y));
                let w = g.bracket(&a.mul_vec(&g.basis(x)), &a.mul_vec(&g.basis(y)));
                sources.push(g.layer_coordinates(&v, -k));
                images.push(g.layer_coordinates(&w, -k));
            }
        }
        // Row r of the block B solves  sources · b_r = images[.][r].
        let system = Matrix::from_rows(target.len(), sources);
        for (r, &gr) in target.iter().enumerate() {
            let rhs: Vec<Rational> = images.iter().map(|w| w[r].clone()).collect();
            let b = system.solve(&rhs).ok_or(GroupError::NotAnAutomorphism)?;
            for (c, &gc) in target.iter().enumerate() {
                a[(gr, gc)] = b[c].clone();
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let lhs = a.mul_vec(&g.bracket(&g.basis(i), &g.basis(j)));
            let rhs = g.bracket(&a.mul_vec(&g.basis(i)), &a.mul_vec(&g.basis(j)));
            if lhs != rhs {
                return Err(GroupError::NotAnAutomorphism);
            }
        }
    }
    Ok(a)
}

/// Outcome of [`similarity_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct Similarity {
    /// The pushforward keeps the horizontal bundle horizontal.
    pub contact: bool,
    /// The horizontal block `A` satisfies `A·Aᵗ = k·I`.
    pub similar: bool,
    /// `k`, when `similar` holds.
    pub scale: Option<Polynomial>,
    /// The horizontal block of the pushforward, rows and columns indexed
    /// by the first layer.
    pub horizontal_block: Vec<Vec<Polynomial>>,
}

/// Decides whether the differential of `map` restricts to a similarity of
/// the horizontal space at every point, declaring the first-layer frame
/// orthonormal. The test is an exact polynomial identity.
pub fn similarity_check(map: &CoordinateMap, frame: &Frame) -> Result<Similarity, GroupError> {
    let g = frame.algebra();
    let n = g.dim();
    let jac = map.jacobian();
    let horizontal = g.layer(-1);
    let inverse_at_image: Vec<Vec<Polynomial>> = frame
        .inverse_matrix()
        .iter()
        .map(|row| row.iter().map(|p| p.substitute(&map.components)).collect())
        .collect();
    let mut contact = true;
    let mut block = vec![vec![Polynomial::zero(); horizontal.len()]; horizontal.len()];
    for (hc, &c) in horizontal.iter().enumerate() {
        // φ_* X̃_c in coordinates at φ(x)
        let field = &frame.field(c).components;
        let pushed: Vec<Polynomial> = (0..n)
            .map(|r| {
                (0..n).fold(Polynomial::zero(), |acc, k| &acc + &(&jac[r][k] * &field[k]))
            })
            .collect();
        for r in 0..n {
            let comp = (0..n).fold(Polynomial::zero(), |acc, k| {
                &acc + &(&inverse_at_image[r][k] * &pushed[k])
            });
            if g.weight(r) == -1 {
                block[g.position_in_layer(r)][hc] = comp;
            } else if !comp.is_zero() {
                contact = false;
            }
        }
    }
    let m = horizontal.len();
    let gram = |i: usize, j: usize| {
        (0..m).fold(Polynomial::zero(), |acc, k| &acc + &(&block[i][k] * &block[j][k]))
    };
    let k = gram(0, 0);
    if k.is_zero() {
        return Err(GroupError::NotInvertible);
    }
    let mut similar = contact;
    for i in 0..m {
        for j in 0..m {
            let entry = gram(i, j);
            let expected = if i == j { k.clone() } else { Polynomial::zero() };
            if entry != expected {
                similar = false;
            }
        }
    }
    Ok(Similarity {
        contact,
        similar,
        scale: similar.then_some(k),
        horizontal_block: block,
    })
}

/// `λ^|w|` as a rational, for weight `w`.
pub fn weight_power(lambda: &Rational, weight: i32) -> Rational {
    num_traits::pow(lambda.clone(), weight.unsigned_abs() as usize)
}
