//! Classical and quantum (matrix) triple Massey products.
//!
//! A Massey product is a coset: a representative plus an ambiguity subspace, both stored as
//! flattened coordinates of an `n x n` matrix over a based module (`n = 1` for scalars).
//! Nontriviality is decided by an exact membership solve.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::ainf::{mu1_matrix, standard_homotopy_data, AInfinityStructure, CohomologyModel};
use crate::algebra::{matrix_mul, Basis, GradedAlgebra, MatrixElement};
use crate::error::{Error, Result};
use crate::gamma::{HomologyClass, HomologyLattice, IdealSpec};
use crate::gw::EnergyProducts;
use crate::linalg::{add_scaled, is_zero_vec, membership, scale, span_basis, unit_vec, zero_vec, Membership, Vector};
use crate::rational::{render, sign, Q};
use crate::y::{y_class_name, Convention, MainTerm, TorusAlgebra, YModel};

/// Span of tagged generators, with a row-reduced basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmbiguitySubspace {
    pub dim: usize,
    pub generators: Vec<(String, Vector)>,
    pub basis: Vec<Vector>,
}

impl AmbiguitySubspace {
    pub fn new(dim: usize, generators: Vec<(String, Vector)>) -> Self {
        let generators: Vec<(String, Vector)> = generators.into_iter().filter(|(_, v)| !is_zero_vec(v)).collect();
        let vs: Vec<Vector> = generators.iter().map(|(_, v)| v.clone()).collect();
        let basis = span_basis(dim, &vs);
        AmbiguitySubspace { dim, generators, basis }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn membership(&self, v: &[Q]) -> Membership {
        if is_zero_vec(v) {
            return Membership::Member { witness: zero_vec(self.generators.len()) };
        }
        let vs: Vec<Vector> = self.generators.iter().map(|(_, g)| g.clone()).collect();
        membership(self.dim, &vs, v)
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        self.membership(v).is_member()
    }
}

/// Representative modulo ambiguity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MasseyCoset {
    pub n: usize,
    pub basis: Basis,
    pub representative: Vector,
    pub ambiguity: AmbiguitySubspace,
}

impl MasseyCoset {
    pub fn representative_matrix(&self) -> MatrixElement {
        unflatten(self.n, self.basis.len(), &self.representative)
    }

    pub fn is_zero_coset(&self) -> bool {
        self.ambiguity.contains(&self.representative)
    }

    pub fn same_coset(&self, other: &MasseyCoset) -> bool {
        self.ambiguity.contains(&crate::linalg::sub(&self.representative, &other.representative))
    }

    pub fn render(&self) -> String {
        if self.n == 1 {
            self.basis.render_element(&self.representative)
        } else {
            self.representative_matrix().render(&self.basis)
        }
    }

    /// Name of flat coordinate `k`, e.g. `(1,2) t.ub3`.
    pub fn coordinate_name(&self, k: usize) -> String {
        coordinate_name(self.n, &self.basis, k)
    }
}

fn coordinate_name(n: usize, basis: &Basis, k: usize) -> String {
    let dim = basis.len();
    if n == 1 {
        return basis.label(k).to_string();
    }
    let (cell, x) = (k / dim, k % dim);
    format!("({},{}) {}", cell / n + 1, cell % n + 1, basis.label(x))
}

pub fn unflatten(n: usize, dim: usize, v: &[Q]) -> MatrixElement {
    let mut m = MatrixElement::zero(n, dim);
    for i in 0..n {
        for j in 0..n {
            let at = (i * n + j) * dim;
            m.entries[i][j] = v[at..at + dim].to_vec();
        }
    }
    m
}

/// Outcome of [`coset_nontrivial`]: a generator combination, or a separating functional.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub nontrivial: bool,
    /// Generator provenance and coefficient, when the representative lies in the ambiguity.
    pub witness: Vec<(String, String)>,
    /// Coordinate name and coefficient of a functional killing the ambiguity but not the representative.
    pub functional: Vec<(String, String)>,
}

pub fn coset_nontrivial(c: &MasseyCoset) -> Certificate {
    match c.ambiguity.membership(&c.representative) {
        Membership::Member { witness } => Certificate {
            nontrivial: false,
            witness: witness
                .iter()
                .zip(&c.ambiguity.generators)
                .filter(|(w, _)| !w.is_zero())
                .map(|(w, (tag, _))| (tag.clone(), render(w)))
                .collect(),
            functional: Vec::new(),
        },
        Membership::NotMember { functional } => Certificate {
            nontrivial: true,
            witness: Vec::new(),
            functional: functional
                .iter()
                .enumerate()
                .filter(|(_, f)| !f.is_zero())
                .map(|(k, f)| (c.coordinate_name(k), render(f)))
                .collect(),
        },
    }
}

// ---------------------------------------------------------------------------------------------
// Classical Massey products on a dg or A-infinity structure (energy zero only).

/// Cocycles `b_k` representing the inputs and cochains `h_2, h_1` with
/// `mu1 h_2 = mu2(b_3, b_2)`, `mu1 h_1 = mu2(b_2, b_1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefiningSystem {
    pub b: [Vector; 3],
    pub h2: Vector,
    pub h1: Vector,
}

fn mu2(s: &AInfinityStructure, x: &[Q], y: &[Q]) -> Vector {
    s.mu0(2).eval(&[x, y])
}

fn render_input(s: &AInfinityStructure, v: &[Q]) -> String {
    s.basis.render_element(v)
}

fn input_degree(s: &AInfinityStructure, v: &[Q]) -> Result<i64> {
    s.basis
        .homogeneous_degree(v)
        .ok_or_else(|| Error::Invalid(format!("input {} is zero or inhomogeneous", render_input(s, v))))
}

/// Solves `mu1 h = target`, or reports which product fails to vanish.
fn bound(s: &AInfinityStructure, target: &[Q], pair: (&[Q], &[Q])) -> Result<Vector> {
    if is_zero_vec(target) {
        return Ok(zero_vec(s.dim()));
    }
    mu1_matrix(s).solve(target).ok_or_else(|| {
        Error::Undefined(format!(
            "undefined product: {} . {} = {} is not exact",
            render_input(s, pair.0),
            render_input(s, pair.1),
            render_input(s, target)
        ))
    })
}

impl DefiningSystem {
    /// The defining system with `b_k = a_k` and the particular solutions for `h`.
    pub fn canonical(s: &AInfinityStructure, a3: &[Q], a2: &[Q], a1: &[Q]) -> Result<Self> {
        let h2 = bound(s, &mu2(s, a3, a2), (a3, a2))?;
        let h1 = bound(s, &mu2(s, a2, a1), (a2, a1))?;
        Ok(DefiningSystem { b: [a3.to_vec(), a2.to_vec(), a1.to_vec()], h2, h1 })
    }

    pub fn violations(&self, s: &AInfinityStructure) -> Vec<String> {
        let m = mu1_matrix(s);
        let mut out = Vec::new();
        for (k, b) in self.b.iter().enumerate() {
            if !is_zero_vec(&m.apply(b)) {
                out.push(format!("b{} is not closed", 3 - k));
            }
        }
        if m.apply(&self.h2) != mu2(s, &self.b[0], &self.b[1]) {
            out.push("mu1 h2 != mu2(b3, b2)".into());
        }
        if m.apply(&self.h1) != mu2(s, &self.b[1], &self.b[2]) {
            out.push("mu1 h1 != mu2(b2, b1)".into());
        }
        out
    }

    /// `(-1)^{|b_2|} (mu3(b3,b2,b1) - mu2(h2,b1) - mu2(b3,h1))`, a cocycle.
    pub fn cocycle(&self, s: &AInfinityStructure) -> Result<Vector> {
        let bad = self.violations(s);
        if !bad.is_empty() {
            return Err(Error::Invalid(format!("invalid defining system: {}", bad.join("; "))));
        }
        let [b3, b2, b1] = &self.b;
        let mut c = s.mu0(3).eval(&[b3, b2, b1]);
        add_scaled(&mut c, &-Q::one(), &mu2(s, &self.h2, b1));
        add_scaled(&mut c, &-Q::one(), &mu2(s, b3, &self.h1));
        Ok(scale(&sign(input_degree(s, b2)?), &c))
    }
}

/// All defining systems for fixed inputs: `b_k = a_k + mu1(beta)` and `h_k = particular + cocycle`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundingFamily {
    pub a: [Vector; 3],
    /// Exact directions available to each `b_k` (images of `mu1` in its degree).
    pub b_directions: [Vec<Vector>; 3],
    /// Closed directions available to each `h_k`, indexed `[h2, h1]`.
    pub h_directions: [Vec<Vector>; 2],
}

fn closed_in_degree(s: &AInfinityStructure, d: i64) -> Vec<Vector> {
    let n = s.dim();
    let m = mu1_matrix(s);
    let idx = s.basis.indices_of_degree(d);
    if idx.is_empty() {
        return Vec::new();
    }
    let cols: Vec<Vector> = idx.iter().map(|&i| m.apply(&unit_vec(n, i))).collect();
    crate::linalg::Matrix::from_cols(n, &cols)
        .kernel()
        .into_iter()
        .map(|w| {
            let mut v = zero_vec(n);
            for (c, &i) in w.iter().zip(&idx) {
                v[i] = c.clone();
            }
            v
        })
        .collect()
}

fn exact_in_degree(s: &AInfinityStructure, d: i64) -> Vec<Vector> {
    let n = s.dim();
    let m = mu1_matrix(s);
    let images: Vec<Vector> = s.basis.indices_of_degree(d - 1).into_iter().map(|i| m.apply(&unit_vec(n, i))).collect();
    span_basis(n, &images)
}

impl BoundingFamily {
    pub fn new(s: &AInfinityStructure, a3: &[Q], a2: &[Q], a1: &[Q]) -> Result<Self> {
        let degs = [input_degree(s, a3)?, input_degree(s, a2)?, input_degree(s, a1)?];
        let m = mu1_matrix(s);
        for a in [a3, a2, a1] {
            if !is_zero_vec(&m.apply(a)) {
                return Err(Error::Invalid(format!("input {} is not closed", render_input(s, a))));
            }
        }
        Ok(BoundingFamily {
            a: [a3.to_vec(), a2.to_vec(), a1.to_vec()],
            b_directions: [exact_in_degree(s, degs[0]), exact_in_degree(s, degs[1]), exact_in_degree(s, degs[2])],
            h_directions: [closed_in_degree(s, degs[0] + degs[1] - 1), closed_in_degree(s, degs[1] + degs[2] - 1)],
        })
    }

    /// Number of free parameters, in the order taken by [`BoundingFamily::member`].
    pub fn parameter_count(&self) -> usize {
        self.b_directions.iter().map(Vec::len).sum::<usize>() + self.h_directions.iter().map(Vec::len).sum::<usize>()
    }

    pub fn member(&self, s: &AInfinityStructure, params: &[Q]) -> Result<DefiningSystem> {
        if params.len() != self.parameter_count() {
            return Err(Error::Dimension(format!("{} parameters for a {}-parameter family", params.len(), self.parameter_count())));
        }
        let mut it = params.iter();
        let mut b = self.a.clone();
        for (k, dirs) in self.b_directions.iter().enumerate() {
            for d in dirs {
                add_scaled(&mut b[k], it.next().expect("counted"), d);
            }
        }
        let mut h2 = bound(s, &mu2(s, &b[0], &b[1]), (&b[0], &b[1]))?;
        let mut h1 = bound(s, &mu2(s, &b[1], &b[2]), (&b[1], &b[2]))?;
        for d in &self.h_directions[0] {
            add_scaled(&mut h2, it.next().expect("counted"), d);
        }
        for d in &self.h_directions[1] {
            add_scaled(&mut h1, it.next().expect("counted"), d);
        }
        Ok(DefiningSystem { b, h2, h1 })
    }
}

/// The coset in `H(mu1)` of a defining system, modulo `[a3] H + H [a1]`.
pub fn classical_coset(s: &AInfinityStructure, model: &CohomologyModel, system: &DefiningSystem) -> Result<MasseyCoset> {
    let c = system.cocycle(s)?;
    let hn = model.basis.len();
    let rep = model.data.pi.apply(&c);
    let target = s.basis.homogeneous_degree(&c);
    let [a3, _, a1] = &system.b;
    let mut gens = Vec::new();
    let (d3, d1) = (input_degree(s, a3)?, input_degree(s, a1)?);
    let expected = input_degree(s, &system.b[1])? + d3 + d1 - 1;
    if target.is_some_and(|t| t != expected) {
        return Err(Error::Internal("Massey cocycle has the wrong degree".into()));
    }
    for z in 0..hn {
        let lz = model.data.lambda.apply(&unit_vec(hn, z));
        let zl = model.basis.label(z);
        if model.basis.degree(z) + d3 == expected {
            gens.push((format!("a3*{zl}"), model.data.pi.apply(&mu2(s, a3, &lz))));
        }
        if model.basis.degree(z) + d1 == expected {
            gens.push((format!("{zl}*a1"), model.data.pi.apply(&mu2(s, &lz, a1))));
        }
    }
    Ok(MasseyCoset { n: 1, basis: model.basis.clone(), representative: rep, ambiguity: AmbiguitySubspace::new(hn, gens) })
}

/// `<a3, a2, a1>` for closed inputs, using the canonical defining system.
pub fn classical_massey(s: &AInfinityStructure, a3: &[Q], a2: &[Q], a1: &[Q]) -> Result<MasseyCoset> {
    let model = standard_homotopy_data(s)?;
    BoundingFamily::new(s, a3, a2, a1)?;
    let system = DefiningSystem::canonical(s, a3, a2, a1)?;
    classical_coset(s, &model, &system)
}

/// Relabels the basis: old index `i` becomes `perm[i]`.
pub fn permute_structure(s: &AInfinityStructure, perm: &[usize]) -> Result<AInfinityStructure> {
    let n = s.dim();
    let mut entries = vec![(String::new(), 0); n];
    for i in 0..n {
        entries[perm[i]] = (s.basis.label(i).to_string(), s.basis.degree(i));
    }
    let mut out = AInfinityStructure::new(Basis::new(entries)?, s.lattice.clone(), s.energies.clone(), s.arity_cap)?;
    for ((d, a), c) in &s.maps {
        let mut p = crate::ainf::Cochain::zero(c.arity, c.degree, n);
        for (t, v) in &c.values {
            p.add_at(t.iter().map(|&i| perm[i]).collect(), &Q::one(), &permute_vector(v, perm));
        }
        out.set(*d, a.clone(), p)?;
    }
    Ok(out)
}

pub fn permute_vector(v: &[Q], perm: &[usize]) -> Vector {
    let mut out = zero_vec(v.len());
    for (i, c) in v.iter().enumerate() {
        out[perm[i]] = c.clone();
    }
    out
}

/// Whether two cocycles agree modulo boundaries and `a3 Z + Z a1` at the chain level.
pub fn same_chain_coset(s: &AInfinityStructure, a3: &[Q], a1: &[Q], c: &[Q], c2: &[Q]) -> Result<bool> {
    let n = s.dim();
    let Some(d) = s.basis.homogeneous_degree(c).or_else(|| s.basis.homogeneous_degree(c2)) else { return Ok(true) };
    let mut gens = exact_in_degree(s, d);
    let (d3, d1) = (input_degree(s, a3)?, input_degree(s, a1)?);
    for z in closed_in_degree(s, d - d3) {
        gens.push(mu2(s, a3, &z));
    }
    for z in closed_in_degree(s, d - d1) {
        gens.push(mu2(s, &z, a1));
    }
    Ok(membership(n, &gens, &crate::linalg::sub(c, c2)).is_member())
}

// ---------------------------------------------------------------------------------------------
// Quantum matrix Massey products in the minimal regime.

/// Everything the quantum pipeline needs: a module with energy-refined products, a main term
/// at the pivot, and the coordinate slice on which the ambiguity is materialized.
#[derive(Clone, Debug)]
pub struct MasseySetting {
    pub basis: Basis,
    pub lattice: HomologyLattice,
    pub products: EnergyProducts,
    pub main: MainTerm,
    pub pivot: HomologyClass,
    /// Classes outside the ideal `I_A`, in increasing `c1`.
    pub surviving: Vec<HomologyClass>,
    /// Basis indices kept by the ambiguity slice (the `t`-part).
    pub slice: Vec<usize>,
    pub convention: Convention,
    pub class_names: BTreeMap<HomologyClass, String>,
}

impl MasseySetting {
    fn class_name(&self, a: &HomologyClass) -> String {
        self.class_names.get(a).cloned().unwrap_or_else(|| a.to_string())
    }

    fn star(&self, b: &HomologyClass, x: &MatrixElement, z: &MatrixElement) -> Result<MatrixElement> {
        matrix_mul(x, z, self.basis.len(), |u, v| Ok(self.products.apply(b, u, v)))
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }
}

fn t_slice(torus: &TorusAlgebra) -> Vec<usize> {
    (torus.base.dim()..torus.dim()).collect()
}

/// The pivot-`2F` setting on the torus algebra of `Y`.
pub fn y_setting(model: &YModel, conv: Convention) -> Result<MasseySetting> {
    let lattice = model.lattice().clone();
    let pivot = HomologyClass(vec![0, 2]);
    let mut surviving = IdealSpec::Pivot(pivot.clone()).surviving(&lattice);
    surviving.sort_by_key(|a| lattice.order_key(a));
    let class_names = surviving.iter().map(|a| (a.clone(), y_class_name(a))).collect();
    Ok(MasseySetting {
        basis: model.torus.algebra.basis.clone(),
        main: crate::y::mu3_2f_table(&model.torus, conv)?,
        products: model.torus_products.clone(),
        slice: t_slice(&model.torus),
        lattice,
        pivot,
        surviving,
        convention: conv,
        class_names,
    })
}

/// The genus-4 surface torus: cup product only, with the surface main term.
pub fn surface_setting(conv: Convention) -> Result<MasseySetting> {
    let base = GradedAlgebra::parse(&crate::data::load("surface_algebra.txt")?)?;
    let torus = TorusAlgebra::new(&base)?;
    let lattice = HomologyLattice::new(1, vec![1], vec![HomologyClass(vec![1])])?;
    let zero = lattice.zero();
    let mut products = EnergyProducts::new(torus.dim());
    products.tables.insert(zero.clone(), BTreeMap::new());
    for ((i, j), v) in &torus.algebra.products {
        products.set(&zero, *i, *j, v.clone());
    }
    let main = MainTerm::parse(&torus.algebra.basis, &crate::data::load("surface_mainterm.txt")?, conv)?;
    Ok(MasseySetting {
        basis: torus.algebra.basis.clone(),
        products,
        main,
        pivot: zero.clone(),
        surviving: vec![zero.clone()],
        slice: t_slice(&torus),
        lattice,
        convention: conv,
        class_names: [(zero, "0".to_string())].into_iter().collect(),
    })
}

/// One displayed product `X *_B Z` with the individual terms of every entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VanishingEntry {
    pub pair: String,
    pub class: String,
    pub product: String,
    pub zero: bool,
    /// Entries with at least one nonzero term: `(row, col, rendered terms, rendered sum)`.
    pub terms: Vec<(usize, usize, Vec<String>, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VanishingReport {
    pub entries: Vec<VanishingEntry>,
}

impl VanishingReport {
    pub fn holds(&self) -> bool {
        self.entries.iter().all(|e| e.zero)
    }

    pub fn first_failure(&self) -> Option<&VanishingEntry> {
        self.entries.iter().find(|e| !e.zero)
    }
}

/// Renders `v_1 + v_2 + ...` showing each term, e.g. `pt - pt` or `(l + 3*f) - (l + 3*f)`.
pub fn render_terms(basis: &Basis, terms: &[Vector]) -> String {
    let mut out = String::new();
    for (k, t) in terms.iter().enumerate() {
        let neg = t.iter().find(|c| !c.is_zero()).is_some_and(|c| c < &Q::zero());
        let body = if neg && k > 0 { basis.render_element(&scale(&-Q::one(), t)) } else { basis.render_element(t) };
        let multi = t.iter().filter(|c| !c.is_zero()).count() > 1;
        let body = if multi { format!("({body})") } else { body };
        if k == 0 {
            out.push_str(&body);
        } else {
            out.push_str(if neg { " - " } else { " + " });
            out.push_str(&body);
        }
    }
    out
}

fn product_entry(s: &MasseySetting, pair: &str, b: &HomologyClass, x: &MatrixElement, z: &MatrixElement) -> Result<VanishingEntry> {
    let p = s.star(b, x, z)?;
    let n = x.n;
    let mut terms = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let ts: Vec<Vector> = (0..n)
                .map(|k| s.products.apply(b, x.get(i, k), z.get(k, j)))
                .filter(|v| !is_zero_vec(v))
                .collect();
            if !ts.is_empty() {
                terms.push((i + 1, j + 1, ts.iter().map(|t| s.basis.render_element(t)).collect(), render_terms(&s.basis, &ts)));
            }
        }
    }
    Ok(VanishingEntry { pair: pair.to_string(), class: s.class_name(b), product: p.render(&s.basis), zero: p.is_zero(), terms })
}

/// `X3 *_B X2` and `X2 *_B X1` for every class outside `I_A`, first pair first.
pub fn vanishing_report(s: &MasseySetting, x3: &MatrixElement, x2: &MatrixElement, x1: &MatrixElement) -> Result<VanishingReport> {
    let mut entries = Vec::new();
    for (pair, x, z) in [("X3*X2", x3, x2), ("X2*X1", x2, x1)] {
        for b in &s.surviving {
            entries.push(product_entry(s, pair, b, x, z)?);
        }
    }
    Ok(VanishingReport { entries })
}

/// `Y_{i3 i0} = sum_{i2, i1} f((X3)_{i3 i2}, (X2)_{i2 i1}, (X1)_{i1 i0})`.
pub fn matrix_trilinear(x3: &MatrixElement, x2: &MatrixElement, x1: &MatrixElement, dim: usize, f: impl Fn(&[Q], &[Q], &[Q]) -> Vector) -> MatrixElement {
    let n = x3.n;
    let mut out = MatrixElement::zero(n, dim);
    for i3 in 0..n {
        for i0 in 0..n {
            for i2 in 0..n {
                for i1 in 0..n {
                    let (a, b, c) = (x3.get(i3, i2), x2.get(i2, i1), x1.get(i1, i0));
                    if is_zero_vec(a) || is_zero_vec(b) || is_zero_vec(c) {
                        continue;
                    }
                    crate::linalg::add_into(&mut out.entries[i3][i0], &f(a, b, c));
                }
            }
        }
    }
    out
}

fn project(slice: &[usize], n: usize, dim: usize, v: &[Q]) -> Vector {
    let mut out = zero_vec(v.len());
    for cell in 0..n * n {
        for &k in slice {
            out[cell * dim + k] = v[cell * dim + k].clone();
        }
    }
    out
}

/// Generators `X3 *_B M` and `M *_B X1` for matrix units `M` of the complementary degree,
/// projected to the slice.
pub fn ambiguity_subspace(s: &MasseySetting, x3: &MatrixElement, x1: &MatrixElement, target_degree: i64) -> Result<AmbiguitySubspace> {
    let n = x3.n;
    let dim = s.dim();
    let mut gens = Vec::new();
    let d3 = x3.degree(&s.basis)?;
    let d1 = x1.degree(&s.basis)?;
    for b in &s.surviving {
        let shift = 2 * s.lattice.c1(b);
        let bn = s.class_name(b);
        for (side, x, dx) in [("left", x3, d3), ("right", x1, d1)] {
            let Some(dx) = dx else { continue };
            for k in s.basis.indices_of_degree(target_degree - dx + shift) {
                for i in 0..n {
                    for j in 0..n {
                        let mut m = MatrixElement::zero(n, dim);
                        m.entries[i][j] = unit_vec(dim, k);
                        let (p, tag) = if side == "left" {
                            (s.star(b, x, &m)?, format!("X3 *_{bn} E{}{}.{}", i + 1, j + 1, s.basis.label(k)))
                        } else {
                            (s.star(b, &m, x)?, format!("E{}{}.{} *_{bn} X1", i + 1, j + 1, s.basis.label(k)))
                        };
                        gens.push((tag, project(&s.slice, n, dim, &p.flatten())));
                    }
                }
            }
        }
    }
    Ok(AmbiguitySubspace::new(n * n * dim, gens))
}

/// `<X3, X2, X1>_A` when `mu~1 = 0`: the bounding cochains vanish, so the product is the main
/// term `[mu~3_A(X3, X2, X1)]` modulo the ambiguity.
pub fn quantum_matrix_massey(s: &MasseySetting, x3: &MatrixElement, x2: &MatrixElement, x1: &MatrixElement) -> Result<MasseyCoset> {
    let n = x3.n;
    if x2.n != n || x1.n != n {
        return Err(Error::Dimension("inputs of different sizes".into()));
    }
    let report = vanishing_report(s, x3, x2, x1)?;
    if let Some(f) = report.first_failure() {
        return Err(Error::Undefined(format!("undefined product: {} at {} is {}", f.pair, f.class, f.product)));
    }
    let dim = s.dim();
    let rep = matrix_trilinear(x3, x2, x1, dim, |a, b, c| s.main.apply(a, b, c));
    let degs = [x3.degree(&s.basis)?, x2.degree(&s.basis)?, x1.degree(&s.basis)?];
    let ambiguity = match degs {
        [Some(p), Some(q), Some(r)] => ambiguity_subspace(s, x3, x1, p + q + r - 1 - 2 * s.lattice.c1(&s.pivot))?,
        _ => AmbiguitySubspace::new(n * n * dim, Vec::new()),
    };
    Ok(MasseyCoset { n, basis: s.basis.clone(), representative: project(&s.slice, n, dim, &rep.flatten()), ambiguity })
}

pub fn matrix(basis: &Basis, rows: &[[&str; 2]; 2]) -> Result<MatrixElement> {
    let text = format!("[[{}, {}], [{}, {}]]", rows[0][0], rows[0][1], rows[1][0], rows[1][1]);
    MatrixElement::parse(basis, &text)
}

/// Inputs of the main computation on `Y`.
pub fn main_inputs(basis: &Basis) -> Result<[MatrixElement; 3]> {
    Ok([
        matrix(basis, &[["ua1", "ua2"], ["0", "0"]])?,
        matrix(basis, &[["ub1", "0"], ["-ub2", "0"]])?,
        matrix(basis, &[["ub1", "ub3"], ["0", "0"]])?,
    ])
}

/// The first input as it appears in the displayed main-term evaluation, `[[ua1, ua1], [0, 0]]`.
pub fn main_display_x3(basis: &Basis) -> Result<MatrixElement> {
    matrix(basis, &[["ua1", "ua1"], ["0", "0"]])
}

pub fn surface_inputs(basis: &Basis) -> Result<[MatrixElement; 3]> {
    Ok([
        matrix(basis, &[["a1", "a2"], ["0", "0"]])?,
        matrix(basis, &[["b1", "0"], ["-b2", "0"]])?,
        matrix(basis, &[["b1", "b3"], ["0", "0"]])?,
    ])
}

pub fn surface_display_x3(basis: &Basis) -> Result<MatrixElement> {
    matrix(basis, &[["a1", "a1"], ["0", "0"]])
}

/// The ambiguity slice of the main computation.
pub fn ambiguity_subspace_main(model: &YModel, conv: Convention) -> Result<AmbiguitySubspace> {
    let s = y_setting(model, conv)?;
    let [x3, _, x1] = main_inputs(&s.basis)?;
    ambiguity_subspace(&s, &x3, &x1, 4)
}

/// `X *_B M` (or `M *_B X`) for a generic `M` with entries `q'_k t.u + q''_k t.h`, entry `k`
/// numbered row-major from 1: the matrix multiplying each parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericProduct {
    pub class: String,
    pub left: bool,
    pub coefficients: BTreeMap<String, MatrixElement>,
}

pub fn generic_product(s: &MasseySetting, b: &HomologyClass, x: &MatrixElement, left: bool, u: &str, h: &str) -> Result<GenericProduct> {
    let n = x.n;
    let dim = s.dim();
    let mut coefficients = BTreeMap::new();
    for (prime, label) in [("q'", u), ("q''", h)] {
        let k = s.basis.index(label)?;
        for i in 0..n {
            for j in 0..n {
                let mut m = MatrixElement::zero(n, dim);
                m.entries[i][j] = unit_vec(dim, k);
                let p = if left { s.star(b, x, &m)? } else { s.star(b, &m, x)? };
                coefficients.insert(format!("{prime}{}", i * n + j + 1), p);
            }
        }
    }
    Ok(GenericProduct { class: s.class_name(b), left, coefficients })
}

/// Verdict of one full run of the main pipeline on a given first input.
#[derive(Clone, Debug)]
pub struct MainRun {
    pub vanishing: VanishingReport,
    pub main_term: MatrixElement,
    pub coset: Option<MasseyCoset>,
    pub certificate: Option<Certificate>,
    pub error: Option<String>,
}

/// Vanishing, main term, coset and certificate. A vanishing failure is recorded, not raised.
pub fn run_system(s: &MasseySetting, x3: &MatrixElement, x2: &MatrixElement, x1: &MatrixElement) -> Result<MainRun> {
    let vanishing = vanishing_report(s, x3, x2, x1)?;
    let main_term = matrix_trilinear(x3, x2, x1, s.dim(), |a, b, c| s.main.apply(a, b, c));
    match quantum_matrix_massey(s, x3, x2, x1) {
        Ok(c) => {
            let cert = coset_nontrivial(&c);
            Ok(MainRun { vanishing, main_term, coset: Some(c), certificate: Some(cert), error: None })
        }
        Err(Error::Undefined(m)) => Ok(MainRun { vanishing, main_term, coset: None, certificate: None, error: Some(m) }),
        Err(e) => Err(e),
    }
}

/// The surface product under a convention.
pub fn surface_matrix_massey(conv: Convention) -> Result<(MasseyCoset, Certificate)> {
    let s = surface_setting(conv)?;
    let [x3, x2, x1] = surface_inputs(&s.basis)?;
    let c = quantum_matrix_massey(&s, &x3, &x2, &x1)?;
    let cert = coset_nontrivial(&c);
    Ok((c, cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainf::{formal_fixture, heisenberg};
    use crate::rational::q;

    fn el(s: &AInfinityStructure, t: &str) -> Vector {
        s.basis.parse_element(t).unwrap()
    }

    #[test]
    fn heisenberg_triple_product_is_nonzero() {
        let s = heisenberg().unwrap();
        let (x, y) = (el(&s, "x"), el(&s, "y"));
        let c = classical_massey(&s, &x, &x, &y).unwrap();
        assert!(!c.is_zero_coset(), "{}", c.render());
        assert!(coset_nontrivial(&c).nontrivial);
    }

    #[test]
    fn undefined_product_names_the_pair() {
        let s = heisenberg().unwrap();
        // x.yz is the top class, so the first pair does not vanish.
        let (x, yz) = (el(&s, "x"), el(&s, "yz"));
        let err = classical_massey(&s, &x, &yz, &x).unwrap_err().to_string();
        assert!(err.contains("undefined product: x . yz"), "{err}");
    }

    #[test]
    fn formal_fixture_gives_zero() {
        let s = formal_fixture().unwrap();
        let x = el(&s, "x");
        let c = classical_massey(&s, &x, &x, &x).unwrap();
        assert!(c.is_zero_coset());
    }

    #[test]
    fn multilinear_in_last_slot() {
        let s = heisenberg().unwrap();
        let (x, y) = (el(&s, "x"), el(&s, "y"));
        let mut xy = x.clone();
        add_scaled(&mut xy, &q(3), &y);
        let a = classical_massey(&s, &x, &x, &x).unwrap();
        let b = classical_massey(&s, &x, &x, &y).unwrap();
        let ab = classical_massey(&s, &x, &x, &xy).unwrap();
        let mut sum = a.representative.clone();
        add_scaled(&mut sum, &q(3), &b.representative);
        assert!(ab.ambiguity.contains(&crate::linalg::sub(&ab.representative, &sum)));
    }

    #[test]
    fn render_terms_shows_cancellation() {
        let b = Basis::new(vec![("l".into(), 4), ("f".into(), 4)]).unwrap();
        let v = vec![q(1), q(3)];
        let w = vec![q(-1), q(-3)];
        assert_eq!(render_terms(&b, &[v, w]), "(l + 3*f) - (l + 3*f)");
    }

    fn family_points(fam: &BoundingFamily) -> Vec<Vec<Q>> {
        let k = fam.parameter_count();
        let mut pts: Vec<Vec<Q>> = (0..1usize << k.min(10)).map(|m| (0..k).map(|i| q((m >> i & 1) as i64)).collect()).collect();
        pts.push((0..k).map(|i| crate::rational::qf(2 * i as i64 - 3, 5)).collect());
        pts
    }

    #[test]
    fn independent_of_defining_system() {
        for (s, ins) in [(formal_fixture().unwrap(), ["x", "x", "x"]), (heisenberg().unwrap(), ["x", "x", "y"])] {
            let model = standard_homotopy_data(&s).unwrap();
            let a: Vec<Vector> = ins.iter().map(|l| el(&s, l)).collect();
            let fam = BoundingFamily::new(&s, &a[0], &a[1], &a[2]).unwrap();
            assert!(fam.parameter_count() >= 3);
            let base = classical_coset(&s, &model, &fam.member(&s, &vec![q(0); fam.parameter_count()]).unwrap()).unwrap();
            for p in family_points(&fam) {
                let c = classical_coset(&s, &model, &fam.member(&s, &p).unwrap()).unwrap();
                assert!(c.same_coset(&base));
            }
        }
    }

    #[test]
    fn natural_under_basis_permutation() {
        let s = heisenberg().unwrap();
        let n = s.dim();
        let perm: Vec<usize> = (0..n).map(|i| (i * 3 + 1) % n).collect();
        let p = permute_structure(&s, &perm).unwrap();
        let (x, y) = (el(&s, "x"), el(&s, "y"));
        let c = DefiningSystem::canonical(&s, &x, &x, &y).unwrap().cocycle(&s).unwrap();
        let (px, py) = (permute_vector(&x, &perm), permute_vector(&y, &perm));
        let pc = DefiningSystem::canonical(&p, &px, &px, &py).unwrap().cocycle(&p).unwrap();
        assert!(same_chain_coset(&p, &px, &py, &permute_vector(&c, &perm), &pc).unwrap());
        let v1 = coset_nontrivial(&classical_massey(&s, &x, &x, &y).unwrap()).nontrivial;
        let v2 = coset_nontrivial(&classical_massey(&p, &px, &px, &py).unwrap()).nontrivial;
        assert_eq!(v1, v2);
    }

    fn y_model() -> YModel {
        YModel::build().unwrap()
    }

    #[test]
    fn main_ambiguity_patterns() {
        let m = y_model();
        let s = y_setting(&m, Convention::Stated).unwrap();
        let [x3, _, x1] = main_inputs(&s.basis).unwrap();
        let b = |l: &str| s.basis.index(l).unwrap();
        let (f, r) = (HomologyClass(vec![0, 1]), HomologyClass(vec![1, -3]));
        let cell = |mat: &MatrixElement, i: usize, j: usize, l: &str| mat.get(i, j)[b(l)].clone();
        let left_f = generic_product(&s, &f, &x3, true, "t.u", "t.h").unwrap();
        // Rows of the first display: q'1 -> t.ua1 at (1,1), q'3 -> t.ua2 at (1,1); q'' terms vanish.
        assert_eq!(cell(&left_f.coefficients["q'1"], 0, 0, "t.ua1"), q(-1));
        assert_eq!(cell(&left_f.coefficients["q'3"], 0, 0, "t.ua2"), q(-1));
        assert!(left_f.coefficients["q''1"].is_zero());
        let right_f = generic_product(&s, &f, &x1, false, "t.u", "t.h").unwrap();
        let g = &right_f.coefficients["q'1"];
        assert_eq!(cell(g, 0, 0, "t.ub1"), cell(g, 0, 1, "t.ub3"));
        let right_r = generic_product(&s, &r, &x1, false, "t.u", "t.h").unwrap();
        assert_eq!(cell(&right_r.coefficients["q'1"], 0, 0, "t.ub1"), q(-3));
        assert_eq!(cell(&right_r.coefficients["q''1"], 0, 0, "t.ub1"), q(-1));
        assert_eq!(cell(&right_r.coefficients["q'3"], 1, 1, "t.ub3"), q(-3));
        let amb = ambiguity_subspace_main(&m, Convention::Stated).unwrap();
        assert_eq!(amb.rank(), 6);
    }

    #[test]
    fn supplied_representatives_are_nontrivial() {
        let m = y_model();
        let amb = ambiguity_subspace_main(&m, Convention::Stated).unwrap();
        let basis = m.torus.algebra.basis.clone();
        for entry in ["t.ub3", "-t.ua3"] {
            let theta = matrix(&basis, &[["0", entry], ["0", "0"]]).unwrap();
            let c = MasseyCoset { n: 2, basis: basis.clone(), representative: theta.flatten(), ambiguity: amb.clone() };
            let cert = coset_nontrivial(&c);
            assert!(cert.nontrivial, "{entry}");
            assert!(!cert.functional.is_empty());
        }
        let (_, v) = amb.generators[0].clone();
        let c = MasseyCoset { n: 2, basis: basis.clone(), representative: v, ambiguity: amb.clone() };
        let cert = coset_nontrivial(&c);
        assert!(!cert.nontrivial && !cert.witness.is_empty());
    }

    #[test]
    fn zero_and_off_support_inputs_give_zero() {
        let m = y_model();
        let s = y_setting(&m, Convention::Tabulated).unwrap();
        let z = MatrixElement::zero(2, s.dim());
        assert!(quantum_matrix_massey(&s, &z, &z, &z).unwrap().representative.iter().all(|c| c.is_zero()));
        // Scalar triples of degree-3 classes outside the main-term support.
        let odd: Vec<usize> = s.basis.indices_of_degree(3);
        let mut checked = 0;
        for &i in &odd {
            for &j in &odd {
                for &k in &odd {
                    if s.main.entries.contains_key(&(i, j, k)) {
                        continue;
                    }
                    let e = |x: usize| MatrixElement { n: 1, entries: vec![vec![unit_vec(s.dim(), x)]] };
                    if let Ok(c) = quantum_matrix_massey(&s, &e(i), &e(j), &e(k)) {
                        assert!(is_zero_vec(&c.representative));
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn surface_vanishing_holds_and_display_fails() {
        let s = surface_setting(Convention::Stated).unwrap();
        let [x3, x2, x1] = surface_inputs(&s.basis).unwrap();
        assert!(vanishing_report(&s, &x3, &x2, &x1).unwrap().holds());
        let d3 = surface_display_x3(&s.basis).unwrap();
        assert!(!vanishing_report(&s, &d3, &x2, &x1).unwrap().holds());
    }
}
