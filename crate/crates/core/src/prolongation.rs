//! Tanaka prolongation `g₋ + g₀ + g₁ + …` through a chosen `g₀`.
//!
//! Level `k ≥ 0` is stored as a subspace of *action vectors*: for each
//! negative basis element `X` (declaration order) the coordinates of
//! `u(X)` in level `w_X + k`. When that level is negative the coordinates
//! are layer coordinates; otherwise they are coordinates in the canonical
//! basis of the earlier level. For `k = 0` this is exactly the flat layout
//! of [`DegreeZeroMap`], so a `g₀` subspace is used unchanged.

use num_traits::Zero;
use thiserror::Error;

use crate::algebra::GradedLieAlgebra;
use crate::derivations::{basis_maps, DegreeZeroMap};
use crate::linalg::{Matrix, Rational, Subspace};

pub const DEFAULT_MAX_K: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProlongationError {
    #[error("level {k} needs {k} earlier levels, got {got}")]
    PriorLevelsMissing { k: usize, got: usize },
    #[error("g0 lives in dimension {got}, expected {expected}")]
    G0Shape { expected: usize, got: usize },
    #[error("assembled bracket is inconsistent: {0}")]
    JacobiAssemblyFailure(String),
}

/// Sizes of the levels `≥ 0` computed so far, with the negative layers
/// read off the algebra.
struct Levels<'a> {
    g: &'a GradedLieAlgebra,
    dims: Vec<usize>,
}

impl Levels<'_> {
    fn dim(&self, level: i32) -> usize {
        if level < 0 {
            if -level as usize > self.g.step() {
                0
            } else {
                self.g.layer(level).len()
            }
        } else {
            self.dims.get(level as usize).copied().unwrap_or(0)
        }
    }

    /// Offsets of each negative generator's block inside an action vector
    /// of level `k`, and the total length.
    fn layout(&self, k: usize) -> (Vec<usize>, usize) {
        let mut offsets = Vec::with_capacity(self.g.dim());
        let mut total = 0;
        for i in 0..self.g.dim() {
            offsets.push(total);
            total += self.dim(self.g.weight(i) + k as i32);
        }
        (offsets, total)
    }
}

/// `[a, T]` for `a` an element of `level` (in that level's coordinates)
/// and `T` a negative basis element, as coordinates in `level + w_T`.
fn act(
    g: &GradedLieAlgebra,
    levels: &Levels,
    prior: &[Subspace],
    level: i32,
    a: &[Rational],
    t: usize,
) -> Vec<Rational> {
    let target = level + g.weight(t);
    let n = levels.dim(target);
    let mut out = vec![Rational::zero(); n];
    if n == 0 {
        return out;
    }
    if level < 0 {
        for (pos, &e) in g.layer(level).iter().enumerate() {
            if a[pos].is_zero() {
                continue;
            }
            let c = g.structure_constants(e, t);
            for (o, &r) in out.iter_mut().zip(g.layer(target)) {
                *o += &a[pos] * &c[r];
            }
        }
    } else {
        let (offsets, _) = levels.layout(level as usize);
        for (coef, b) in a.iter().zip(prior[level as usize].basis()) {
            if coef.is_zero() {
                continue;
            }
            for (o, v) in out.iter_mut().zip(&b[offsets[t]..offsets[t] + n]) {
                *o += coef * v;
            }
        }
    }
    out
}

/// The `k`-th prolongation space, given `prior = [g₀, …, g_{k−1}]`.
///
/// With `k = 0` and no prior levels this yields `Der₀(g)`.
pub fn prolong_step(
    g: &GradedLieAlgebra,
    prior: &[Subspace],
    k: usize,
) -> Result<Subspace, ProlongationError> {
    if prior.len() < k {
        return Err(ProlongationError::PriorLevelsMissing { k, got: prior.len() });
    }
    let prior = &prior[..k];
    let levels = Levels {
        g,
        dims: prior.iter().map(Subspace::dim).collect(),
    };
    let (offsets, unknowns) = levels.layout(k);
    let kk = k as i32;
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let n = g.dim();
    for s in 0..n {
        for t in s + 1..n {
            let target = g.weight(s) + g.weight(t) + kk;
            let m = levels.dim(target);
            if m == 0 {
                continue;
            }
            // eq[r][col]: row r of the block of equations for this pair
            let mut eq = vec![vec![Rational::zero(); unknowns]; m];
            // u([S,T])
            let st = g.structure_constants(s, t);
            for (e, c) in st.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (r, row) in eq.iter_mut().enumerate() {
                    row[offsets[e] + r] += c;
                }
            }
            // − [u(S),T] + [u(T),S]
            for (x, y, sign) in [(s, t, -1i64), (t, s, 1)] {
                let from = g.weight(x) + kk;
                for j in 0..levels.dim(from) {
                    let mut unit = vec![Rational::zero(); levels.dim(from)];
                    unit[j] = Rational::from_integer(1.into());
                    let image = act(g, &levels, prior, from, &unit, y);
                    for (r, v) in image.iter().enumerate() {
                        if !v.is_zero() {
                            eq[r][offsets[x] + j] += v * Rational::from_integer(sign.into());
                        }
                    }
                }
            }
            rows.extend(eq.into_iter().filter(|r| r.iter().any(|v| !v.is_zero())));
        }
    }
    if rows.is_empty() {
        return Ok(Subspace::full(unknowns));
    }
    Ok(Matrix::from_rows(unknowns, rows).nullspace())
}

/// `g_k = 0` implies all higher levels vanish exactly when the first layer
/// generates the algebra.
pub fn termination_valid(g: &GradedLieAlgebra) -> bool {
    g.check_generation()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    TerminatedAt(usize),
    CutoffReached,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerminationReport {
    pub status: Status,
    /// Dimensions of `g₀, g₁, …` as computed.
    pub level_dims: Vec<usize>,
    /// `dim g₋ + Σ level_dims`.
    pub total_dim: usize,
    /// Whether the algebra is generated by its first layer, so that a zero
    /// level really ends the prolongation.
    pub justified: bool,
}

/// What a basis element of `s` is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Element {
    /// Basis element of the negative part, by its index in `g`.
    Negative(usize),
    /// `i`-th canonical basis vector of level `k ≥ 0`.
    Level { k: usize, i: usize },
}

/// The assembled graded algebra `s`.
#[derive(Debug, Clone)]
pub struct ProlongationAlgebra {
    negative: GradedLieAlgebra,
    levels: Vec<Subspace>,
    terminated: bool,
    elements: Vec<Element>,
    names: Vec<String>,
    /// `table[i][j]`: `[e_i, e_j]` in the basis of `s`, or `None` when it
    /// lands beyond the computed levels of a truncated prolongation.
    table: Vec<Vec<Option<Vec<Rational>>>>,
}

/// Runs [`prolong_step`] from `k = 1` until a level vanishes or `max_k`
/// levels have been computed, then assembles and checks the bracket.
pub fn full_prolongation(
    g: &GradedLieAlgebra,
    g0: &Subspace,
    max_k: usize,
) -> Result<(ProlongationAlgebra, TerminationReport), ProlongationError> {
    let expected = DegreeZeroMap::flat_len(g);
    if g0.ambient_dim() != expected {
        return Err(ProlongationError::G0Shape {
            expected,
            got: g0.ambient_dim(),
        });
    }
    let mut levels = vec![g0.clone()];
    let mut status = if g0.is_zero() {
        Status::TerminatedAt(0)
    } else {
        Status::CutoffReached
    };
    if status == Status::CutoffReached {
        for k in 1..=max_k {
            let level = prolong_step(g, &levels, k)?;
            let zero = level.is_zero();
            levels.push(level);
            if zero {
                status = Status::TerminatedAt(k);
                break;
            }
        }
    }
    let level_dims: Vec<usize> = levels.iter().map(Subspace::dim).collect();
    let report = TerminationReport {
        status,
        total_dim: g.dim() + level_dims.iter().sum::<usize>(),
        level_dims,
        justified: termination_valid(g),
    };
    let s = ProlongationAlgebra::assemble(g, levels, matches!(status, Status::TerminatedAt(_)))?;
    Ok((s, report))
}

impl ProlongationAlgebra {
    fn assemble(
        g: &GradedLieAlgebra,
        levels: Vec<Subspace>,
        terminated: bool,
    ) -> Result<Self, ProlongationError> {
        let mut elements = Vec::new();
        let mut names = Vec::new();
        for w in (1..=g.step() as i32).rev() {
            for &i in g.layer(-w) {
                elements.push(Element::Negative(i));
                names.push(g.names()[i].clone());
            }
        }
        for (k, level) in levels.iter().enumerate() {
            for i in 0..level.dim() {
                elements.push(Element::Level { k, i });
                names.push(format!("g{k}_{}", i + 1));
            }
        }
        let n = elements.len();
        let mut s = ProlongationAlgebra {
            negative: g.clone(),
            levels,
            terminated,
            elements,
            names,
            table: vec![vec![None; n]; n],
        };
        s.fill_table()?;
        Ok(s)
    }

    pub fn negative(&self) -> &GradedLieAlgebra {
        &self.negative
    }

    pub fn levels(&self) -> &[Subspace] {
        &self.levels
    }

    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn element(&self, i: usize) -> Element {
        self.elements[i]
    }

    /// Grading of a basis element: its weight if negative, else its level.
    pub fn degree(&self, i: usize) -> i32 {
        match self.elements[i] {
            Element::Negative(j) => self.negative.weight(j),
            Element::Level { k, .. } => k as i32,
        }
    }

    /// Index in `s` of the negative generator with index `j` in `g`.
    pub fn negative_index(&self, j: usize) -> usize {
        self.elements
            .iter()
            .position(|e| *e == Element::Negative(j))
            .expect("every negative generator is in s")
    }

    fn level_index(&self, k: usize, i: usize) -> usize {
        self.elements
            .iter()
            .position(|e| *e == Element::Level { k, i })
            .expect("level element exists")
    }

    /// The degree-zero maps spanning `g₀`.
    pub fn g0_maps(&self) -> Vec<DegreeZeroMap> {
        basis_maps(&self.negative, &self.levels[0])
    }

    /// `e_i` as a vector of `s`.
    pub fn basis(&self, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim()];
        v[i] = Rational::from_integer(1.into());
        v
    }

    pub fn structure_constants(&self, i: usize, j: usize) -> Option<&[Rational]> {
        self.table[i][j].as_deref()
    }

    /// Bilinear bracket, `None` if some needed entry is unknown.
    pub fn bracket(&self, a: &[Rational], b: &[Rational]) -> Option<Vec<Rational>> {
        let mut out = vec![Rational::zero(); self.dim()];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let c = self.table[i][j].as_ref()?;
                let xy = x * y;
                for (o, v) in out.iter_mut().zip(c) {
                    if !v.is_zero() {
                        *o += &xy * v;
                    }
                }
            }
        }
        Some(out)
    }

    /// Embeds coordinates of an element of `level` into `s`.
    fn embed(&self, level: i32, coords: &[Rational]) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim()];
        for (pos, c) in coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let idx = if level < 0 {
                self.negative_index(self.negative.layer(level)[pos])
            } else {
                self.level_index(level as usize, pos)
            };
            v[idx] = c.clone();
        }
        v
    }

    fn levels_view(&self) -> Levels<'_> {
        Levels {
            g: &self.negative,
            dims: self.levels.iter().map(Subspace::dim).collect(),
        }
    }

    /// `u(X)` for the basis element `u` of level `k` and negative `X`, as a
    /// vector of `s`.
    pub fn action(&self, k: usize, i: usize, x: usize) -> Vec<Rational> {
        let levels = self.levels_view();
        let (offsets, _) = levels.layout(k);
        let target = k as i32 + self.negative.weight(x);
        let n = levels.dim(target);
        let b = &self.levels[k].basis()[i];
        self.embed(target, &b[offsets[x]..offsets[x] + n])
    }

    fn set(&mut self, i: usize, j: usize, v: Option<Vec<Rational>>) {
        let neg = v.as_ref().map(|v| v.iter().map(|x| -x).collect());
        self.table[i][j] = v;
        self.table[j][i] = neg;
    }

    fn fill_table(&mut self) -> Result<(), ProlongationError> {
        let n = self.dim();
        let g = self.negative.clone();
        let zero = vec![Rational::zero(); n];
        for i in 0..n {
            self.table[i][i] = Some(zero.clone());
        }
        // negative with negative, and levels with negatives
        for i in 0..n {
            for j in i + 1..n {
                let v = match (self.elements[i], self.elements[j]) {
                    (Element::Negative(a), Element::Negative(b)) => {
                        let c = g.structure_constants(a, b);
                        let mut v = zero.clone();
                        for (r, x) in c.iter().enumerate() {
                            if !x.is_zero() {
                                v[self.negative_index(r)] = x.clone();
                            }
                        }
                        v
                    }
                    (Element::Level { k, i: bi }, Element::Negative(x)) => self.action(k, bi, x),
                    (Element::Negative(x), Element::Level { k, i: bi }) => {
                        self.action(k, bi, x).iter().map(|v| -v).collect()
                    }
                    _ => continue,
                };
                self.set(i, j, Some(v));
            }
        }
        // levels with levels, by increasing target level
        let top = self.levels.len();
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if let (Element::Level { .. }, Element::Level { .. }) = (self.elements[i], self.elements[j]) {
                    pairs.push((i, j));
                }
            }
        }
        pairs.sort_by_key(|&(i, j)| (self.degree(i) + self.degree(j), i, j));
        for (i, j) in pairs {
            let target = (self.degree(i) + self.degree(j)) as usize;
            let v = self.level_bracket(i, j, target, top)?;
            self.set(i, j, v);
        }
        Ok(())
    }

    /// `[u,v]` for level elements via `([u,v])(X) = [u,[v,X]] − [v,[u,X]]`.
    fn level_bracket(
        &self,
        i: usize,
        j: usize,
        target: usize,
        top: usize,
    ) -> Result<Option<Vec<Rational>>, ProlongationError> {
        let g = &self.negative;
        let ui = self.basis(i);
        let vj = self.basis(j);
        let mut images = Vec::with_capacity(g.dim());
        for x in 0..g.dim() {
            let xs = self.basis(self.negative_index(x));
            let a = self.bracket(&vj, &xs).and_then(|vx| self.bracket(&ui, &vx));
            let b = self.bracket(&ui, &xs).and_then(|ux| self.bracket(&vj, &ux));
            match (a, b) {
                (Some(a), Some(b)) => images.push(a.iter().zip(&b).map(|(p, q)| p - q).collect::<Vec<_>>()),
                _ => return Ok(None),
            }
        }
        if target >= top {
            if self.terminated {
                if images.iter().all(|v| v.iter().all(Zero::is_zero)) {
                    return Ok(Some(vec![Rational::zero(); self.dim()]));
                }
                return Err(ProlongationError::JacobiAssemblyFailure(format!(
                    "[{}, {}] acts nontrivially beyond the last level",
                    self.names[i], self.names[j]
                )));
            }
            return Ok(None);
        }
        // read the action vector off the images
        let levels = self.levels_view();
        let (offsets, total) = levels.layout(target);
        let mut action = vec![Rational::zero(); total];
        for (x, img) in images.iter().enumerate() {
            let lvl = target as i32 + g.weight(x);
            for (pos, slot) in action[offsets[x]..offsets[x] + levels.dim(lvl)].iter_mut().enumerate() {
                let idx = if lvl < 0 {
                    self.negative_index(g.layer(lvl)[pos])
                } else {
                    self.level_index(lvl as usize, pos)
                };
                *slot = img[idx].clone();
            }
            // everything else in img must vanish
            let mut rest = img.clone();
            for pos in 0..levels.dim(lvl) {
                let idx = if lvl < 0 {
                    self.negative_index(g.layer(lvl)[pos])
                } else {
                    self.level_index(lvl as usize, pos)
                };
                rest[idx] = Rational::zero();
            }
            if rest.iter().any(|v| !v.is_zero()) {
                return Err(ProlongationError::JacobiAssemblyFailure(format!(
                    "[{}, {}] does not act with the right degree",
                    self.names[i], self.names[j]
                )));
            }
        }
        let coords = self.levels[target].coordinates(&action).ok_or_else(|| {
            ProlongationError::JacobiAssemblyFailure(format!(
                "[{}, {}] is not in level {target}",
                self.names[i], self.names[j]
            ))
        })?;
        Ok(Some(self.embed(target as i32, &coords)))
    }

    /// Basis triples `(i, j, k)` on which Jacobi fails; triples involving an
    /// unknown bracket are skipped. Also returns how many triples were checked.
    pub fn jacobi_failures(&self) -> (Vec<(usize, usize, usize)>, usize) {
        let n = self.dim();
        let mut failures = Vec::new();
        let mut checked = 0;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (a, b, c) = (self.basis(i), self.basis(j), self.basis(k));
                    let terms = [
                        self.bracket(&b, &c).and_then(|bc| self.bracket(&a, &bc)),
                        self.bracket(&c, &a).and_then(|ca| self.bracket(&b, &ca)),
                        self.bracket(&a, &b).and_then(|ab| self.bracket(&c, &ab)),
                    ];
                    if terms.iter().any(Option::is_none) {
                        continue;
                    }
                    checked += 1;
                    let sum = terms.iter().flatten().fold(vec![Rational::zero(); n], |acc, t| {
                        acc.iter().zip(t).map(|(x, y)| x + y).collect()
                    });
                    if sum.iter().any(|v| !v.is_zero()) {
                        failures.push((i, j, k));
                    }
                }
            }
        }
        (failures, checked)
    }

    /// Pairs whose bracket has a component outside degree `deg_i + deg_j`,
    /// or that are not antisymmetric.
    pub fn grading_failures(&self) -> Vec<(usize, usize)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let (Some(c), Some(d)) = (&self.table[i][j], &self.table[j][i]) else {
                    continue;
                };
                let deg = self.degree(i) + self.degree(j);
                let graded = c.iter().enumerate().all(|(r, v)| v.is_zero() || self.degree(r) == deg);
                let antisym = c.iter().zip(d).all(|(x, y)| (x + y).is_zero());
                if !graded || !antisym {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Mixed pairs `(u, X)` where the table disagrees with `u(X)`.
    pub fn action_failures(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, e) in self.elements.iter().enumerate() {
            let Element::Level { k, i: bi } = *e else { continue };
            for x in 0..self.negative.dim() {
                let j = self.negative_index(x);
                if self.table[i][j].as_deref() != Some(&self.action(k, bi, x)[..]) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}
