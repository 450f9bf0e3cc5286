//! Ready-made algebras and groups used in examples and tests.

use crate::algebra::{AlgebraSpec, GradedLieAlgebra};
use crate::group::{CoordinateRecipe, Group};
use crate::linalg::int;

/// Engel algebra: `X1 X2 | Y | Z`, `[X1,X2] = Y`, `[X1,Y] = Z`.
pub fn engel_spec() -> AlgebraSpec {
    AlgebraSpec::new("engel")
        .layer(&["X1", "X2"])
        .layer(&["Y"])
        .layer(&["Z"])
        .bracket("X1", "X2", &[(int(1), "Y")])
        .bracket("X1", "Y", &[(int(1), "Z")])
}

/// Three-dimensional Heisenberg algebra: `X1 X2 | Y`, `[X1,X2] = Y`.
pub fn heisenberg_spec() -> AlgebraSpec {
    AlgebraSpec::new("heisenberg")
        .layer(&["X1", "X2"])
        .layer(&["Y"])
        .bracket("X1", "X2", &[(int(1), "Y")])
}

/// Abelian `ℝⁿ` in a single layer, generators `X1 … Xn`.
pub fn abelian_spec(n: usize) -> AlgebraSpec {
    let names: Vec<String> = (1..=n).map(|i| format!("X{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    AlgebraSpec::new(format!("r{n}")).layer(&refs)
}

pub fn engel() -> GradedLieAlgebra {
    GradedLieAlgebra::from_spec(&engel_spec()).expect("engel preset is valid")
}

pub fn heisenberg() -> GradedLieAlgebra {
    GradedLieAlgebra::from_spec(&heisenberg_spec()).expect("heisenberg preset is valid")
}

pub fn abelian(n: usize) -> GradedLieAlgebra {
    GradedLieAlgebra::from_spec(&abelian_spec(n)).expect("abelian preset is valid")
}

/// `(x1, x2, y, z) = exp(x2 X2 + y Y + z Z) · exp(x1 X1)`.
pub fn engel_recipe(g: &GradedLieAlgebra) -> CoordinateRecipe {
    let pair = |a: &str, b: &str| (a.to_string(), b.to_string());
    CoordinateRecipe::new(
        g,
        &[
            vec![pair("X2", "x2"), pair("Y", "y"), pair("Z", "z")],
            vec![pair("X1", "x1")],
        ],
    )
    .expect("engel recipe matches the engel algebra")
}

pub fn engel_group() -> Group {
    let g = engel();
    let recipe = engel_recipe(&g);
    Group::new(g, recipe).expect("engel has step 3")
}

/// Any algebra in exponential coordinates of the first kind.
pub fn first_kind_group(g: GradedLieAlgebra) -> Group {
    let recipe = CoordinateRecipe::first_kind(&g);
    Group::new(g, recipe).expect("step at most 3")
}
