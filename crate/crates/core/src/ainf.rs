//! A-infinity structures on finite based graded modules.
//!
//! Multilinear maps are stored sparsely on basis tuples written `(x_s, ..., x_1)`, leftmost
//! first. Each map carries an energy class `A`; `mu^d_A` has degree `2 - d - 2 c1(A)`.
//! All Koszul signs go through [`koszul`], which works with reduced degrees `|x|' = |x| - 1`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::algebra::{Basis, GradedAlgebra, MatrixElement};
use crate::error::{Error, Result};
use crate::gamma::{HomologyClass, HomologyLattice};
use crate::gw::EnergyProducts;
use crate::linalg::{add_scaled, is_zero_vec, membership, span_basis, unit_vec, zero_vec, Matrix, Vector};
use crate::rational::{q, sign, Q};

pub const DEFAULT_ARITY_CAP: usize = 4;

pub fn reduced_degree(basis: &Basis, i: usize) -> i64 {
    basis.degree(i) - 1
}

/// `(-1)^{k * (|x_1|' + ... )}` over `inputs`.
pub fn koszul(k: i64, basis: &Basis, inputs: &[usize]) -> Q {
    let m: i64 = inputs.iter().map(|&i| reduced_degree(basis, i)).sum();
    sign(k * m)
}

/// A multilinear map of length `arity` and internal degree `degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    pub arity: usize,
    pub degree: i64,
    pub dim: usize,
    pub values: BTreeMap<Vec<usize>, Vector>,
}

impl Cochain {
    pub fn zero(arity: usize, degree: i64, dim: usize) -> Self {
        Cochain { arity, degree, dim, values: BTreeMap::new() }
    }

    /// `|phi|' = s + t - 1`.
    pub fn shifted_degree(&self) -> i64 {
        self.arity as i64 + self.degree - 1
    }

    pub fn get(&self, tuple: &[usize]) -> Option<&Vector> {
        self.values.get(tuple)
    }

    pub fn add_at(&mut self, tuple: Vec<usize>, c: &Q, v: &[Q]) {
        if c.is_zero() || is_zero_vec(v) {
            return;
        }
        let dim = self.dim;
        let e = self.values.entry(tuple.clone()).or_insert_with(|| zero_vec(dim));
        add_scaled(e, c, v);
        if is_zero_vec(e) {
            self.values.remove(&tuple);
        }
    }

    pub fn add_scaled(&mut self, c: &Q, other: &Cochain) {
        for (t, v) in &other.values {
            self.add_at(t.clone(), c, v);
        }
    }

    pub fn scaled(&self, c: &Q) -> Cochain {
        let mut out = Cochain::zero(self.arity, self.degree, self.dim);
        out.add_scaled(c, self);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Multilinear evaluation on `inputs = (x_s, ..., x_1)`.
    pub fn eval(&self, inputs: &[&[Q]]) -> Vector {
        let mut out = zero_vec(self.dim);
        'outer: for (t, v) in &self.values {
            let mut c = Q::one();
            for (k, &i) in t.iter().enumerate() {
                let x = &inputs[k][i];
                if x.is_zero() {
                    continue 'outer;
                }
                c *= x;
            }
            add_scaled(&mut out, &c, v);
        }
        out
    }

    /// Every stored value must be homogeneous of degree `sum |x_k| + degree`.
    pub fn check_degrees(&self, basis: &Basis) -> Result<()> {
        for (t, v) in &self.values {
            if t.len() != self.arity {
                return Err(Error::Dimension(format!("tuple of length {} in a length-{} cochain", t.len(), self.arity)));
            }
            let want: i64 = t.iter().map(|&i| basis.degree(i)).sum::<i64>() + self.degree;
            if let Some((k, _)) = v.iter().enumerate().find(|(k, c)| !c.is_zero() && basis.degree(*k) != want) {
                let labels: Vec<&str> = t.iter().map(|&i| basis.label(i)).collect();
                return Err(Error::Invalid(format!(
                    "value on ({}) has a {} component of degree {}, expected degree {want}",
                    labels.join(","),
                    basis.label(k),
                    basis.degree(k)
                )));
            }
        }
        Ok(())
    }

    /// `(inputs, value)` pairs rendered with basis labels.
    pub fn render_entries(&self, basis: &Basis) -> Vec<(String, String)> {
        self.values
            .iter()
            .map(|(t, v)| {
                let labels: Vec<&str> = t.iter().map(|&i| basis.label(i)).collect();
                (format!("({})", labels.join(",")), basis.render_element(v))
            })
            .collect()
    }
}

/// `(phi o psi)(x_s..x_1) = sum (-1)^{|psi|' * mal_i} phi(x_s, .., psi(x_{i+j}..x_{i+1}), x_i, .., x_1)`.
pub fn compose(basis: &Basis, phi: &Cochain, psi: &Cochain) -> Cochain {
    let arity = phi.arity + psi.arity - 1;
    let mut out = Cochain::zero(arity, phi.degree + psi.degree, phi.dim);
    let psi_shift = psi.shifted_degree();
    let mut by_output: BTreeMap<usize, Vec<(&Vec<usize>, &Q)>> = BTreeMap::new();
    for (t, v) in &psi.values {
        for (k, c) in v.iter().enumerate() {
            if !c.is_zero() {
                by_output.entry(k).or_default().push((t, c));
            }
        }
    }
    for (tf, vf) in &phi.values {
        for pos in 0..tf.len() {
            let Some(list) = by_output.get(&tf[pos]) else { continue };
            let tail = &tf[pos + 1..];
            let s = koszul(psi_shift, basis, tail);
            for (tp, c) in list {
                let mut t = tf[..pos].to_vec();
                t.extend_from_slice(tp);
                t.extend_from_slice(tail);
                out.add_at(t, &(&s * *c), vf);
            }
        }
    }
    out
}

/// `[phi, psi] = phi o psi - (-1)^{|phi|'|psi|'} psi o phi`.
pub fn bracket(basis: &Basis, phi: &Cochain, psi: &Cochain) -> Cochain {
    let mut out = compose(basis, phi, psi);
    let s = sign(phi.shifted_degree() * psi.shifted_degree());
    out.add_scaled(&-s, &compose(basis, psi, phi));
    out
}

/// Family `mu^d_A` of multilinear maps, indexed by arity and energy class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AInfinityStructure {
    pub basis: Basis,
    pub lattice: HomologyLattice,
    /// Energy classes kept by the truncation, zero first.
    pub energies: Vec<HomologyClass>,
    pub arity_cap: usize,
    pub maps: BTreeMap<(usize, HomologyClass), Cochain>,
}

impl AInfinityStructure {
    pub fn new(basis: Basis, lattice: HomologyLattice, energies: Vec<HomologyClass>, arity_cap: usize) -> Result<Self> {
        let zero = lattice.zero();
        let mut energies = energies;
        if !energies.contains(&zero) {
            energies.push(zero);
        }
        if let Some(a) = energies.iter().find(|a| a.0.len() != lattice.rank || !lattice.is_effective(a)) {
            return Err(Error::Invalid(format!("energy class {a} is not an effective lattice class")));
        }
        energies.sort_by_key(|a| lattice.order_key(a));
        energies.dedup();
        Ok(AInfinityStructure { basis, lattice, energies, arity_cap, maps: BTreeMap::new() })
    }

    /// No energy grading: a rank-one lattice with only the zero class kept.
    pub fn plain(basis: Basis, arity_cap: usize) -> Self {
        let lattice = HomologyLattice::new(1, vec![1], vec![HomologyClass(vec![1])]).expect("valid lattice");
        let zero = lattice.zero();
        AInfinityStructure { basis, lattice, energies: vec![zero], arity_cap, maps: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn zero_class(&self) -> HomologyClass {
        self.lattice.zero()
    }

    pub fn expected_degree(&self, d: usize, a: &HomologyClass) -> i64 {
        2 - d as i64 - 2 * self.lattice.c1(a)
    }

    pub fn set(&mut self, d: usize, a: HomologyClass, c: Cochain) -> Result<()> {
        if d == 0 || d > self.arity_cap {
            return Err(Error::Invalid(format!("arity {d} outside 1..={}", self.arity_cap)));
        }
        if c.arity != d || c.dim != self.dim() {
            return Err(Error::Dimension(format!("mu^{d} given a length-{} cochain", c.arity)));
        }
        if !self.energies.contains(&a) {
            return Err(Error::Invalid(format!("energy class {a} is truncated away")));
        }
        let want = self.expected_degree(d, &a);
        if c.degree != want {
            return Err(Error::Invalid(format!("mu^{d}_[{a}] must have degree {want}, got {}", c.degree)));
        }
        c.check_degrees(&self.basis)?;
        self.maps.insert((d, a), c);
        Ok(())
    }

    pub fn mu(&self, d: usize, a: &HomologyClass) -> Option<&Cochain> {
        self.maps.get(&(d, a.clone()))
    }

    /// The energy-zero map, or the zero cochain.
    pub fn mu0(&self, d: usize) -> Cochain {
        let zero = self.zero_class();
        self.mu(d, &zero).cloned().unwrap_or_else(|| Cochain::zero(d, 2 - d as i64, self.dim()))
    }

    pub fn apply(&self, d: usize, a: &HomologyClass, inputs: &[&[Q]]) -> Vector {
        self.mu(d, a).map(|c| c.eval(inputs)).unwrap_or_else(|| zero_vec(self.dim()))
    }

    /// Parses `basis`, `arity-cap`, `lattice`, `c1`, `effective`, `energy` and
    /// `mu <d> <class coords> (<label>,...) = <combination>` lines.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        let mut cap = DEFAULT_ARITY_CAP;
        let mut rank = None;
        let mut c1 = None;
        let mut effective = Vec::new();
        let mut energies = Vec::new();
        let mut mus = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: &str| Error::Parse(format!("line {}: {m}: {raw:?}", lineno + 1));
            let mut words = line.split_whitespace();
            let head = words.next().unwrap_or("");
            let rest: Vec<&str> = words.collect();
            let ints = |ws: &[&str]| -> Result<Vec<i64>> {
                ws.iter().map(|w| w.parse::<i64>().map_err(|_| err("expected integers"))).collect()
            };
            match head {
                "basis" => {
                    if rest.len() != 2 {
                        return Err(err("expected `basis <label> <degree>`"));
                    }
                    entries.push((rest[0].to_string(), rest[1].parse().map_err(|_| err("bad degree"))?));
                }
                "arity-cap" => cap = rest.first().and_then(|w| w.parse().ok()).ok_or_else(|| err("bad arity cap"))?,
                "lattice" => rank = Some(rest.first().and_then(|w| w.parse::<usize>().ok()).ok_or_else(|| err("bad rank"))?),
                "c1" => c1 = Some(ints(&rest)?),
                "effective" => effective.push(HomologyClass(ints(&rest)?)),
                "energy" => energies.push(HomologyClass::parse_coords(rest.first().ok_or_else(|| err("missing class"))?)?),
                "mu" => mus.push((lineno, raw.to_string(), line.to_string())),
                _ => return Err(err("unknown statement")),
            }
        }
        let basis = Basis::new(entries)?;
        let mut s = match rank {
            Some(r) => {
                let lat = HomologyLattice::new(r, c1.unwrap_or_else(|| vec![0; r]), effective)?;
                AInfinityStructure::new(basis, lat, energies, cap)?
            }
            None => {
                let mut s = AInfinityStructure::plain(basis, cap);
                if energies.iter().any(|e| !e.is_zero()) {
                    return Err(Error::Parse("energy classes need a `lattice` declaration".into()));
                }
                s.arity_cap = cap;
                s
            }
        };
        let mut pending: BTreeMap<(usize, HomologyClass), Cochain> = BTreeMap::new();
        for (lineno, raw, line) in mus {
            let err = |m: &str| Error::Parse(format!("line {}: {m}: {raw:?}", lineno + 1));
            let (lhs, rhs) = line.split_once('=').ok_or_else(|| err("missing `=`"))?;
            let open = lhs.find('(').ok_or_else(|| err("missing `(`"))?;
            let close = lhs.rfind(')').ok_or_else(|| err("missing `)`"))?;
            let head: Vec<&str> = lhs[..open].split_whitespace().collect();
            if head.len() != 3 {
                return Err(err("expected `mu <d> <class> (...)`"));
            }
            let d: usize = head[1].parse().map_err(|_| err("bad arity"))?;
            let class = HomologyClass::parse_coords(head[2])?;
            let labels: Vec<usize> = lhs[open + 1..close]
                .split(',')
                .map(|l| s.basis.index(l.trim()))
                .collect::<Result<_>>()?;
            if labels.len() != d {
                return Err(err("number of inputs differs from the arity"));
            }
            let value = s.basis.parse_element(rhs)?;
            let degree = s.expected_degree(d, &class);
            let dim = s.dim();
            pending.entry((d, class)).or_insert_with(|| Cochain::zero(d, degree, dim)).add_at(labels, &Q::one(), &value);
        }
        for ((d, a), c) in pending {
            s.set(d, a, c)?;
        }
        Ok(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AinftyResidual {
    pub energy: String,
    pub inputs: Vec<String>,
    pub residual: String,
}

/// Nonzero values of `sum_{A+A'=B} mu_A o mu_A'` up to the arity cap, for every kept `B`.
pub fn ainfty_check(s: &AInfinityStructure) -> Vec<AinftyResidual> {
    let mut out = Vec::new();
    for b in &s.energies {
        let mut residuals: BTreeMap<usize, Cochain> = BTreeMap::new();
        for ((d1, a1), m1) in &s.maps {
            for ((d2, a2), m2) in &s.maps {
                if &a1.add(a2) != b || d1 + d2 - 1 > s.arity_cap {
                    continue;
                }
                let c = compose(&s.basis, m1, m2);
                residuals.entry(c.arity).or_insert_with(|| Cochain::zero(c.arity, c.degree, c.dim)).add_scaled(&Q::one(), &c);
            }
        }
        for r in residuals.values() {
            for (t, v) in &r.values {
                out.push(AinftyResidual {
                    energy: b.to_string(),
                    inputs: t.iter().map(|&i| s.basis.label(i).to_string()).collect(),
                    residual: s.basis.render_element(v),
                });
            }
        }
    }
    out
}

/// `mu^2(x_2, x_1) = (-1)^{|x_1|} x_2 x_1` for an algebra product.
fn signed_product(basis: &Basis, products: &BTreeMap<(usize, usize), Vector>, degree: i64) -> Cochain {
    let mut c = Cochain::zero(2, degree, basis.len());
    for ((i, j), v) in products {
        c.add_at(vec![*i, *j], &sign(basis.degree(*j)), v);
    }
    c
}

/// The trivial structure `mu_A` of a graded algebra: only `mu^2`.
pub fn trivial_mu2(alg: &GradedAlgebra) -> Cochain {
    signed_product(&alg.basis, &alg.products, 0)
}

/// dg-algebra packing: `mu^1(x) = (-1)^{|x|} dx`, `mu^2(x_2,x_1) = (-1)^{|x_1|} x_2 x_1`.
/// `d` acts on column vectors and must raise degree by one.
pub fn dg_packing(alg: &GradedAlgebra, d: Option<&Matrix>) -> Result<AInfinityStructure> {
    let mut s = AInfinityStructure::plain(alg.basis.clone(), DEFAULT_ARITY_CAP);
    let zero = s.zero_class();
    if let Some(d) = d {
        let n = alg.dim();
        if d.rows != n || d.cols != n {
            return Err(Error::Dimension(format!("differential must be {n}x{n}")));
        }
        let mut m1 = Cochain::zero(1, 1, n);
        for j in 0..n {
            m1.add_at(vec![j], &sign(alg.basis.degree(j)), &d.apply(&unit_vec(n, j)));
        }
        if !m1.is_zero() {
            s.set(1, zero.clone(), m1)?;
        }
    }
    s.set(2, zero, trivial_mu2(alg))?;
    Ok(s)
}

/// `mu^2_A(x_2, x_1) = (-1)^{|x_1|} x_2 *_A x_1` for every kept energy `A`.
pub fn from_energy_products(
    basis: &Basis,
    lattice: &HomologyLattice,
    energies: Vec<HomologyClass>,
    products: &EnergyProducts,
) -> Result<AInfinityStructure> {
    let mut s = AInfinityStructure::new(basis.clone(), lattice.clone(), energies, DEFAULT_ARITY_CAP)?;
    for a in s.energies.clone() {
        if let Some(table) = products.tables.get(&a) {
            let c = signed_product(basis, table, -2 * lattice.c1(&a));
            if !c.is_zero() {
                s.set(2, a, c)?;
            }
        }
    }
    Ok(s)
}

fn matrix_label(l: &str, i: usize, j: usize) -> String {
    format!("{l}[{},{}]", i + 1, j + 1)
}

/// Index of `x E_ij` in the `n x n` extension.
pub fn matrix_index(dim: usize, n: usize, x: usize, i: usize, j: usize) -> usize {
    (i * n + j) * dim + x
}

/// The structure on `n x n` matrices: `mu^d(x_d E_{i_0 i_1}, ..., x_1 E_{i_{d-1} i_d}) = mu^d(x_d..x_1) E_{i_0 i_d}`.
pub fn matrix_extension(s: &AInfinityStructure, n: usize) -> Result<AInfinityStructure> {
    let dim = s.dim();
    let mut entries = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for x in 0..dim {
                entries.push((matrix_label(s.basis.label(x), i, j), s.basis.degree(x)));
            }
        }
    }
    let mut out = AInfinityStructure::new(Basis::new(entries)?, s.lattice.clone(), s.energies.clone(), s.arity_cap)?;
    let big = dim * n * n;
    for ((d, a), c) in &s.maps {
        let mut lifted = Cochain::zero(*d, c.degree, big);
        let chains = n.pow(*d as u32 + 1);
        for (t, v) in &c.values {
            for code in 0..chains {
                let mut idx = Vec::with_capacity(d + 1);
                let mut r = code;
                for _ in 0..=*d {
                    idx.push(r % n);
                    r /= n;
                }
                let tuple: Vec<usize> = (0..*d).map(|k| matrix_index(dim, n, t[k], idx[k], idx[k + 1])).collect();
                let mut value = zero_vec(big);
                for (b, coef) in v.iter().enumerate() {
                    value[matrix_index(dim, n, b, idx[0], idx[*d])] = coef.clone();
                }
                lifted.add_at(tuple, &Q::one(), &value);
            }
        }
        out.set(*d, a.clone(), lifted)?;
    }
    Ok(out)
}

/// `Y_ij = mu^d(sum_k (X_d)_{i k_{d-1}} (x) ... (x) (X_1)_{k_1 j})`.
pub fn matrix_mu(s: &AInfinityStructure, d: usize, a: &HomologyClass, xs: &[&MatrixElement]) -> Result<MatrixElement> {
    if xs.len() != d || d == 0 {
        return Err(Error::Dimension(format!("mu^{d} needs {d} matrices")));
    }
    let n = xs[0].n;
    if xs.iter().any(|x| x.n != n) {
        return Err(Error::Dimension("matrices of different sizes".into()));
    }
    let mut out = MatrixElement::zero(n, s.dim());
    let Some(c) = s.mu(d, a) else { return Ok(out) };
    for i in 0..n {
        for j in 0..n {
            let inner = n.pow(d as u32 - 1);
            for code in 0..inner {
                let mut path = vec![i];
                let mut r = code;
                for _ in 0..d - 1 {
                    path.push(r % n);
                    r /= n;
                }
                path.push(j);
                let inputs: Vec<&[Q]> = (0..d).map(|k| xs[k].get(path[k], path[k + 1]).as_slice()).collect();
                if inputs.iter().any(|v| is_zero_vec(v)) {
                    continue;
                }
                let v = c.eval(&inputs);
                add_scaled(&mut out.entries[i][j], &Q::one(), &v);
            }
        }
    }
    Ok(out)
}

/// Basis of length-`s`, degree-`t` cochains as `(inputs, output)` pairs.
pub fn cochain_space(basis: &Basis, s: usize, t: i64) -> Vec<(Vec<usize>, usize)> {
    let n = basis.len();
    let mut out = Vec::new();
    let total = n.pow(s as u32);
    for code in 0..total {
        let mut tuple = vec![0; s];
        let mut r = code;
        for k in (0..s).rev() {
            tuple[k] = r % n;
            r /= n;
        }
        let want: i64 = tuple.iter().map(|&i| basis.degree(i)).sum::<i64>() + t;
        for o in basis.indices_of_degree(want) {
            out.push((tuple.clone(), o));
        }
    }
    out
}

fn basis_cochain(dim: usize, s: usize, t: i64, entry: &(Vec<usize>, usize)) -> Cochain {
    let mut c = Cochain::zero(s, t, dim);
    c.add_at(entry.0.clone(), &Q::one(), &unit_vec(dim, entry.1));
    c
}

/// Coordinates of several cochains against the union of their supports.
fn common_coordinates(cs: &[&Cochain]) -> Vec<Vector> {
    let mut index: BTreeMap<(Vec<usize>, usize), usize> = BTreeMap::new();
    for c in cs {
        for (t, v) in &c.values {
            for (k, x) in v.iter().enumerate() {
                if !x.is_zero() {
                    let len = index.len();
                    index.entry((t.clone(), k)).or_insert(len);
                }
            }
        }
    }
    cs.iter()
        .map(|c| {
            let mut v = zero_vec(index.len());
            for (t, val) in &c.values {
                for (k, x) in val.iter().enumerate() {
                    if !x.is_zero() {
                        v[index[&(t.clone(), k)]] = x.clone();
                    }
                }
            }
            v
        })
        .collect()
}

pub fn in_span(gens: &[Cochain], target: &Cochain) -> bool {
    if target.is_zero() {
        return true;
    }
    let mut all: Vec<&Cochain> = gens.iter().collect();
    all.push(target);
    let mut coords = common_coordinates(&all);
    let t = coords.pop().expect("target present");
    membership(t.len(), &coords, &t).is_member()
}

/// `d_A(phi) = [mu_A, phi]`: from `(s, t)` to `(s + 1, t)`.
pub fn hochschild_differential(basis: &Basis, mu2: &Cochain, phi: &Cochain) -> Cochain {
    bracket(basis, mu2, phi)
}

fn check_associative(alg: &GradedAlgebra) -> Result<()> {
    match alg.verify().into_iter().find(|v| v.axiom == "associativity" || v.axiom == "degree") {
        Some(v) => Err(Error::Invalid(format!("algebra fails {} on ({})", v.axiom, v.labels.join(",")))),
        None => Ok(()),
    }
}

/// Images under `d_A` of the basis of length-`(s-1)`, degree-`t` cochains.
pub fn coboundaries(alg: &GradedAlgebra, s: usize, t: i64) -> Vec<Cochain> {
    if s == 0 {
        return Vec::new();
    }
    let mu2 = trivial_mu2(alg);
    cochain_space(&alg.basis, s - 1, t)
        .iter()
        .map(|e| hochschild_differential(&alg.basis, &mu2, &basis_cochain(alg.dim(), s - 1, t, e)))
        .filter(|c| !c.is_zero())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HochschildGroup {
    pub s: usize,
    pub t: i64,
    pub dim: usize,
    pub cocycle_dim: usize,
    pub coboundary_dim: usize,
    pub representatives: Vec<Cochain>,
}

/// `HH^{s+t}(A, A)^t` of the trivial structure on `alg`, by exact ranks.
pub fn hochschild_cohomology(alg: &GradedAlgebra, s: usize, t: i64) -> Result<HochschildGroup> {
    check_associative(alg)?;
    let n = alg.dim();
    let mu2 = trivial_mu2(alg);
    let space = cochain_space(&alg.basis, s, t);
    let next: BTreeMap<(Vec<usize>, usize), usize> =
        cochain_space(&alg.basis, s + 1, t).into_iter().enumerate().map(|(k, e)| (e, k)).collect();
    let coords = |c: &Cochain, index: &BTreeMap<(Vec<usize>, usize), usize>| -> Result<Vector> {
        let mut v = zero_vec(index.len());
        for (tp, val) in &c.values {
            for (k, x) in val.iter().enumerate() {
                if !x.is_zero() {
                    let at = index.get(&(tp.clone(), k)).ok_or_else(|| Error::Internal("differential left its bidegree".into()))?;
                    v[*at] = x.clone();
                }
            }
        }
        Ok(v)
    };
    let here: BTreeMap<(Vec<usize>, usize), usize> = space.iter().cloned().enumerate().map(|(k, e)| (e, k)).collect();
    let cols: Vec<Vector> = space
        .iter()
        .map(|e| coords(&hochschild_differential(&alg.basis, &mu2, &basis_cochain(n, s, t, e)), &next))
        .collect::<Result<_>>()?;
    let cocycles = if space.is_empty() {
        Vec::new()
    } else if next.is_empty() {
        (0..space.len()).map(|k| unit_vec(space.len(), k)).collect()
    } else {
        Matrix::from_cols(next.len(), &cols).kernel()
    };
    let images: Vec<Vector> = coboundaries(alg, s, t).iter().map(|c| coords(c, &here)).collect::<Result<_>>()?;
    let mut spanned = span_basis(space.len(), &images);
    let coboundary_dim = spanned.len();
    let mut reps = Vec::new();
    for z in &cocycles {
        if !membership(space.len(), &spanned, z).is_member() {
            spanned.push(z.clone());
            let mut c = Cochain::zero(s, t, n);
            for (k, x) in z.iter().enumerate() {
                if !x.is_zero() {
                    c.add_at(space[k].0.clone(), x, &unit_vec(n, space[k].1));
                }
            }
            reps.push(c);
        }
    }
    Ok(HochschildGroup { s, t, dim: reps.len(), cocycle_dim: cocycles.len(), coboundary_dim, representatives: reps })
}

/// A Hochschild class: a representative modulo the span of `coboundaries`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HhCoset {
    pub representative: Cochain,
    pub coboundaries: Vec<Cochain>,
}

impl HhCoset {
    pub fn is_zero_class(&self) -> bool {
        in_span(&self.coboundaries, &self.representative)
    }

    pub fn contains(&self, c: &Cochain) -> bool {
        let mut d = c.clone();
        d.add_scaled(&-Q::one(), &self.representative);
        in_span(&self.coboundaries, &d)
    }

    pub fn same_class(&self, other: &HhCoset) -> bool {
        self.contains(&other.representative)
    }
}

/// `[mu^3] in HH^2(A, A)^{-1}` for a structure with `mu^1 = 0` and `mu^2 = mu_A`.
pub fn universal_massey(alg: &GradedAlgebra, s: &AInfinityStructure) -> Result<HhCoset> {
    check_associative(alg)?;
    if s.basis != alg.basis {
        return Err(Error::Invalid("structure and algebra have different bases".into()));
    }
    if !s.mu0(1).is_zero() {
        return Err(Error::Invalid("universal Massey product needs mu^1 = 0".into()));
    }
    let mu2 = trivial_mu2(alg);
    if s.mu0(2).values != mu2.values {
        return Err(Error::Invalid("mu^2 differs from the algebra product".into()));
    }
    let mu3 = s.mu0(3);
    if !hochschild_differential(&alg.basis, &mu2, &mu3).is_zero() {
        return Err(Error::Invalid("mu^3 is not a Hochschild cocycle".into()));
    }
    Ok(HhCoset { representative: mu3, coboundaries: coboundaries(alg, 3, -1) })
}

/// `G^1 = id` together with higher terms `G^d` of degree `1 - d`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GaugeTransformation {
    higher: BTreeMap<usize, Cochain>,
}

impl GaugeTransformation {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn with(mut self, d: usize, c: Cochain) -> Result<Self> {
        if d < 2 || c.arity != d || c.degree != 1 - d as i64 {
            return Err(Error::Invalid(format!("gauge term G^{d} must have length {d} and degree {}", 1 - d as i64)));
        }
        self.higher.insert(d, c);
        Ok(self)
    }

    pub fn term(&self, d: usize) -> Option<&Cochain> {
        self.higher.get(&d)
    }
}

/// `mu^3` after the gauge transformation:
/// `mu^3 + G(a3, mu(a2,a1)) + (-1)^{|a1|'} G(mu(a3,a2), a1) - mu(a3, G(a2,a1)) - mu(G(a3,a2), a1)`.
pub fn gauge_mu3(s: &AInfinityStructure, g: &GaugeTransformation) -> Result<Cochain> {
    let n = s.dim();
    let mu2 = s.mu0(2);
    let mut out = s.mu0(3);
    let Some(g2) = g.term(2) else { return Ok(out) };
    if g2.dim != n {
        return Err(Error::Dimension("gauge term on a different module".into()));
    }
    let e = |i: usize| unit_vec(n, i);
    for a3 in 0..n {
        for a2 in 0..n {
            for a1 in 0..n {
                let (x3, x2, x1) = (e(a3), e(a2), e(a1));
                let mut v = g2.eval(&[&x3, &mu2.eval(&[&x2, &x1])]);
                add_scaled(&mut v, &sign(reduced_degree(&s.basis, a1)), &g2.eval(&[&mu2.eval(&[&x3, &x2]), &x1]));
                add_scaled(&mut v, &-Q::one(), &mu2.eval(&[&x3, &g2.eval(&[&x2, &x1])]));
                add_scaled(&mut v, &-Q::one(), &mu2.eval(&[&g2.eval(&[&x3, &x2]), &x1]));
                out.add_at(vec![a3, a2, a1], &Q::one(), &v);
            }
        }
    }
    out.check_degrees(&s.basis)?;
    Ok(out)
}

/// Replaces `mu^3` (energy zero) of `s`.
pub fn with_mu3(s: &AInfinityStructure, mu3: Cochain) -> Result<AInfinityStructure> {
    let mut out = s.clone();
    out.maps.remove(&(3, s.zero_class()));
    if !mu3.is_zero() {
        out.set(3, s.zero_class(), mu3)?;
    }
    Ok(out)
}

/// Random integer cochain of bidegree `(s, t)`, each basis entry kept with probability `density`.
pub fn random_cochain<R: Rng>(rng: &mut R, basis: &Basis, s: usize, t: i64, density: f64, range: i64) -> Cochain {
    let mut c = Cochain::zero(s, t, basis.len());
    for (tuple, o) in cochain_space(basis, s, t) {
        if rng.gen_bool(density) {
            let x = rng.gen_range(-range..=range);
            c.add_at(tuple, &q(x), &unit_vec(basis.len(), o));
        }
    }
    c
}

/// `lambda: A -> B`, `pi: B -> A`, `h: B -> B[-1]`, all acting on column vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomotopyData {
    pub lambda: Matrix,
    pub pi: Matrix,
    pub h: Matrix,
}

/// Matrix of `mu^1` (energy zero): column `j` is `mu^1(e_j)`.
pub fn mu1_matrix(s: &AInfinityStructure) -> Matrix {
    let n = s.dim();
    let m1 = s.mu0(1);
    let cols: Vec<Vector> = (0..n).map(|j| m1.eval(&[&unit_vec(n, j)])).collect();
    Matrix::from_cols(n, &cols)
}

fn degree_shift_violation(m: &Matrix, target: &Basis, source: &Basis, shift: i64) -> Option<(usize, usize)> {
    for i in 0..m.rows {
        for j in 0..m.cols {
            if !m.data[i][j].is_zero() && target.degree(i) != source.degree(j) + shift {
                return Some((i, j));
            }
        }
    }
    None
}

impl HomotopyData {
    /// Failed identities among `pi mu1 = 0`, `mu1 lambda = 0`, `pi lambda = id`,
    /// `lambda pi - id = mu1 h + h mu1`, plus degree checks.
    pub fn violations(&self, mu1: &Matrix, a: &Basis, b: &Basis) -> Vec<String> {
        let (na, nb) = (a.len(), b.len());
        let mut out = Vec::new();
        if self.lambda.rows != nb || self.lambda.cols != na || self.pi.rows != na || self.pi.cols != nb || self.h.rows != nb || self.h.cols != nb {
            out.push("matrix sizes do not match the modules".to_string());
            return out;
        }
        let mul = |x: &Matrix, y: &Matrix| x.mul(y).expect("sizes checked");
        if !mul(&self.pi, mu1).is_zero() {
            out.push("pi mu1 != 0".into());
        }
        if !mul(mu1, &self.lambda).is_zero() {
            out.push("mu1 lambda != 0".into());
        }
        if mul(&self.pi, &self.lambda) != Matrix::identity(na) {
            out.push("pi lambda != id".into());
        }
        let lhs = mul(&self.lambda, &self.pi).sub(&Matrix::identity(nb));
        let mut rhs = mul(mu1, &self.h);
        let hm = mul(&self.h, mu1);
        for i in 0..nb {
            for j in 0..nb {
                rhs.data[i][j] += &hm.data[i][j];
            }
        }
        if lhs != rhs {
            out.push("lambda pi - id != mu1 h + h mu1".into());
        }
        if let Some((i, j)) = degree_shift_violation(&self.lambda, b, a, 0) {
            out.push(format!("lambda is not degree 0 at ({}, {})", b.label(i), a.label(j)));
        }
        if let Some((i, j)) = degree_shift_violation(&self.pi, a, b, 0) {
            out.push(format!("pi is not degree 0 at ({}, {})", a.label(i), b.label(j)));
        }
        if let Some((i, j)) = degree_shift_violation(&self.h, b, b, -1) {
            out.push(format!("h is not degree -1 at ({}, {})", b.label(i), b.label(j)));
        }
        out
    }
}

/// A chosen cohomology basis with homotopy data onto it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyModel {
    pub basis: Basis,
    pub data: HomotopyData,
}

fn extend_independent(current: &mut Vec<Vector>, candidates: impl IntoIterator<Item = Vector>, n: usize) -> Vec<Vector> {
    let mut added = Vec::new();
    for c in candidates {
        if is_zero_vec(&c) {
            continue;
        }
        if !membership(n, current, &c).is_member() {
            current.push(c.clone());
            added.push(c);
        }
    }
    added
}

/// Splits each degree as boundaries, cohomology representatives and a complement of the
/// cocycles. `h` inverts `mu^1` from boundaries back to the complement, with the sign making
/// `lambda pi - id = mu1 h + h mu1`.
pub fn standard_homotopy_data(s: &AInfinityStructure) -> Result<CohomologyModel> {
    let n = s.dim();
    let m = mu1_matrix(s);
    let mut degrees: Vec<i64> = s.basis.degrees.clone();
    degrees.sort_unstable();
    degrees.dedup();
    // Columns of the change of basis, tagged 0 = boundary, 1 = cohomology, 2 = complement.
    let mut columns: Vec<(u8, Vector)> = Vec::new();
    let mut complement_of: Vec<(Vector, Vector)> = Vec::new(); // (c, mu1 c)
    let mut boundaries: BTreeMap<i64, Vec<Vector>> = BTreeMap::new();
    let mut labels = Vec::new();
    for &k in &degrees {
        let idx = s.basis.indices_of_degree(k);
        let units: Vec<Vector> = idx.iter().map(|&i| unit_vec(n, i)).collect();
        let cocycle_units: Vec<Vector> = units.iter().filter(|v| is_zero_vec(&m.apply(v))).cloned().collect();
        // Kernel of mu^1 restricted to degree k.
        let restricted = Matrix::from_cols(n, &units.iter().map(|v| m.apply(v)).collect::<Vec<_>>());
        let kernel: Vec<Vector> = if idx.is_empty() {
            Vec::new()
        } else {
            restricted
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
        };
        let mut z = Vec::new();
        extend_independent(&mut z, cocycle_units.into_iter().chain(kernel), n);
        let bd = boundaries.remove(&k).unwrap_or_default();
        let mut acc = bd.clone();
        let reps = extend_independent(&mut acc, z.clone(), n);
        let mut full = z.clone();
        let comp = extend_independent(&mut full, units, n);
        for b in bd {
            columns.push((0, b));
        }
        for r in reps {
            let label = match r.iter().position(|c| !c.is_zero()) {
                Some(p) if r.iter().filter(|c| !c.is_zero()).count() == 1 && r[p].is_one() => s.basis.label(p).to_string(),
                _ => format!("c{}", labels.len() + 1),
            };
            labels.push((label, k));
            columns.push((1, r));
        }
        for c in comp {
            let image = m.apply(&c);
            boundaries.entry(k + 1).or_default().push(image.clone());
            complement_of.push((c.clone(), image));
            columns.push((2, c));
        }
    }
    if columns.len() != n {
        return Err(Error::Internal("cohomology splitting did not produce a basis".into()));
    }
    let p = Matrix::from_cols(n, &columns.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>());
    let pinv = p.inverse().ok_or_else(|| Error::Internal("change of basis is singular".into()))?;
    let hdim = labels.len();
    let mut lambda = Matrix::zeros(n, hdim);
    let mut pi = Matrix::zeros(hdim, n);
    let mut h = Matrix::zeros(n, n);
    let mut r = 0;
    for (col, (tag, v)) in columns.iter().enumerate() {
        match tag {
            1 => {
                for i in 0..n {
                    lambda.data[i][r] = v[i].clone();
                }
                pi.data[r] = pinv.data[col].clone();
                r += 1;
            }
            0 => {
                let (c, _) = complement_of
                    .iter()
                    .find(|(_, img)| img == v)
                    .ok_or_else(|| Error::Internal("boundary without a preimage".into()))?;
                for i in 0..n {
                    for j in 0..n {
                        if !c[i].is_zero() && !pinv.data[col][j].is_zero() {
                            h.data[i][j] -= &c[i] * &pinv.data[col][j];
                        }
                    }
                }
            }
            _ => {}
        }
    }
    let basis = Basis::new(labels)?;
    let data = HomotopyData { lambda, pi, h };
    let bad = data.violations(&m, &basis, &s.basis);
    if !bad.is_empty() {
        return Err(Error::Internal(format!("standard homotopy data invalid: {}", bad.join("; "))));
    }
    Ok(CohomologyModel { basis, data })
}

/// Directions `k` of degree -1 with `mu1 k + k mu1 = 0`: changing `h` along them keeps the data valid.
pub fn homotopy_directions(s: &AInfinityStructure) -> Vec<Matrix> {
    let n = s.dim();
    let m = mu1_matrix(s);
    let slots: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| s.basis.degree(i) == s.basis.degree(j) - 1).collect();
    if slots.is_empty() {
        return Vec::new();
    }
    let cols: Vec<Vector> = slots
        .iter()
        .map(|&(i, j)| {
            let mut k = Matrix::zeros(n, n);
            k.data[i][j] = Q::one();
            let a = m.mul(&k).expect("square");
            let b = k.mul(&m).expect("square");
            (0..n * n).map(|e| &a.data[e / n][e % n] + &b.data[e / n][e % n]).collect()
        })
        .collect();
    Matrix::from_cols(n * n, &cols)
        .kernel()
        .into_iter()
        .map(|w| {
            let mut k = Matrix::zeros(n, n);
            for (c, &(i, j)) in w.iter().zip(&slots) {
                k.data[i][j] = c.clone();
            }
            k
        })
        .collect()
}

/// The same `lambda`, `pi` with `h + sum_i c_i k_i`.
pub fn shifted_homotopy(data: &HomotopyData, directions: &[Matrix], coefficients: &[Q]) -> HomotopyData {
    let mut out = data.clone();
    for (k, c) in directions.iter().zip(coefficients) {
        for i in 0..k.rows {
            for j in 0..k.cols {
                if !k.data[i][j].is_zero() {
                    out.h.data[i][j] += c * &k.data[i][j];
                }
            }
        }
    }
    out
}

/// `mu^2_A(a_2, a_1) = pi mu^2_B(lambda a_2, lambda a_1)`.
pub fn transferred_mu2(s: &AInfinityStructure, a: &Basis, data: &HomotopyData) -> Cochain {
    let na = a.len();
    let mu2 = s.mu0(2);
    let mut out = Cochain::zero(2, 0, na);
    for i in 0..na {
        for j in 0..na {
            let (bi, bj) = (data.lambda.apply(&unit_vec(na, i)), data.lambda.apply(&unit_vec(na, j)));
            out.add_at(vec![i, j], &Q::one(), &data.pi.apply(&mu2.eval(&[&bi, &bj])));
        }
    }
    out
}

/// `pi mu3(b3,b2,b1) + pi mu2(h mu2(b3,b2), b1) + pi mu2(b3, h mu2(b2,b1))` with `b_k = lambda a_k`.
pub fn homotopy_transfer_mu3(s: &AInfinityStructure, a: &Basis, data: &HomotopyData) -> Result<Cochain> {
    let bad = data.violations(&mu1_matrix(s), a, &s.basis);
    if !bad.is_empty() {
        return Err(Error::Invalid(format!("invalid homotopy data: {}", bad.join("; "))));
    }
    let na = a.len();
    let (mu2, mu3) = (s.mu0(2), s.mu0(3));
    let b: Vec<Vector> = (0..na).map(|i| data.lambda.apply(&unit_vec(na, i))).collect();
    let mut out = Cochain::zero(3, -1, na);
    for i3 in 0..na {
        for i2 in 0..na {
            for i1 in 0..na {
                let (b3, b2, b1) = (&b[i3], &b[i2], &b[i1]);
                let mut v = mu3.eval(&[b3, b2, b1]);
                let h32 = data.h.apply(&mu2.eval(&[b3, b2]));
                add_scaled(&mut v, &Q::one(), &mu2.eval(&[&h32, b1]));
                let h21 = data.h.apply(&mu2.eval(&[b2, b1]));
                add_scaled(&mut v, &Q::one(), &mu2.eval(&[b3, &h21]));
                out.add_at(vec![i3, i2, i1], &Q::one(), &data.pi.apply(&v));
            }
        }
    }
    out.check_degrees(a)?;
    Ok(out)
}

/// `H(mu^1)` with `[x_2] . [x_1] = (-1)^{|x_1|} [mu^2(x_2, x_1)]`.
pub fn cohomology_algebra(s: &AInfinityStructure) -> Result<(GradedAlgebra, CohomologyModel)> {
    let m = mu1_matrix(s);
    if !m.mul(&m)?.is_zero() {
        return Err(Error::Invalid("mu^1 does not square to zero".into()));
    }
    let model = standard_homotopy_data(s)?;
    let mu2 = transferred_mu2(s, &model.basis, &model.data);
    let mut products = BTreeMap::new();
    for (t, v) in &mu2.values {
        let sv: Vector = v.iter().map(|c| &sign(model.basis.degree(t[1])) * c).collect();
        products.insert((t[0], t[1]), sv);
    }
    let n = model.basis.len();
    let unit = (0..n).find(|&u| {
        model.basis.degree(u) == 0
            && (0..n).all(|i| {
                let e = unit_vec(n, i);
                products.get(&(u, i)) == Some(&e) && products.get(&(i, u)) == Some(&e)
            })
    });
    let alg = GradedAlgebra {
        basis: model.basis.clone(),
        products,
        pairing: BTreeMap::new(),
        unit,
        lattice: None,
        evals: BTreeMap::new(),
    };
    if let Some(v) = alg.verify().into_iter().find(|v| v.axiom == "associativity" || v.axiom == "degree") {
        return Err(Error::Internal(format!("cohomology product fails {} on ({})", v.axiom, v.labels.join(","))));
    }
    Ok((alg, model))
}

/// Exterior algebra on degree-one generators; monomials ordered by length, then generator order.
pub fn exterior_algebra(gens: &[&str]) -> GradedAlgebra {
    let k = gens.len();
    let mut subsets: Vec<Vec<usize>> = (0..1usize << k).map(|m| (0..k).filter(|i| m >> i & 1 == 1).collect()).collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    let label = |s: &[usize]| if s.is_empty() { "1".to_string() } else { s.iter().map(|&i| gens[i]).collect::<String>() };
    let basis = Basis::new(subsets.iter().map(|s| (label(s), s.len() as i64)).collect()).expect("distinct monomials");
    let pos: BTreeMap<Vec<usize>, usize> = subsets.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let n = subsets.len();
    let mut products = BTreeMap::new();
    for (i, a) in subsets.iter().enumerate() {
        for (j, b) in subsets.iter().enumerate() {
            if a.iter().any(|x| b.contains(x)) {
                continue;
            }
            // Sign of sorting the concatenation: count pairs (x in a, y in b) with x > y.
            let inversions: usize = a.iter().map(|x| b.iter().filter(|y| *y < x).count()).sum();
            let mut m: Vec<usize> = a.iter().chain(b).copied().collect();
            m.sort_unstable();
            let mut v = zero_vec(n);
            v[pos[&m]] = sign(inversions as i64);
            products.insert((i, j), v);
        }
    }
    GradedAlgebra { basis, products, pairing: BTreeMap::new(), unit: Some(0), lattice: None, evals: BTreeMap::new() }
}

/// The derivation of an exterior algebra determined by the images of its generators.
pub fn exterior_derivation(alg: &GradedAlgebra, gens: &[&str], images: &[(&str, &str)]) -> Result<Matrix> {
    let n = alg.dim();
    let mut dgen: BTreeMap<usize, Vector> = BTreeMap::new();
    for (g, img) in images {
        let gi = gens.iter().position(|x| x == g).ok_or_else(|| Error::UnknownLabel(g.to_string()))?;
        dgen.insert(gi, alg.element(img)?);
    }
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let word: Vec<usize> = alg
            .basis
            .label(j)
            .chars()
            .filter_map(|c| gens.iter().position(|g| g.len() == 1 && g.starts_with(c)))
            .collect();
        let mut out = zero_vec(n);
        for (p, gi) in word.iter().enumerate() {
            let Some(dg) = dgen.get(gi) else { continue };
            let mut left = unit_vec(n, 0);
            for &w in &word[..p] {
                left = alg.cup(&left, &alg.element(gens[w])?);
            }
            let mut right = unit_vec(n, 0);
            for &w in &word[p + 1..] {
                right = alg.cup(&right, &alg.element(gens[w])?);
            }
            let term = alg.cup(&alg.cup(&left, dg), &right);
            add_scaled(&mut out, &sign(p as i64), &term);
        }
        cols.push(out);
    }
    Ok(Matrix::from_cols(n, &cols))
}

/// Verified graded algebras of rank at most four: `Q`, `Lambda(x)`, `Q[u]/u^2` with `|u| = 2`,
/// `Lambda(x, y)`.
pub fn small_algebras() -> Vec<GradedAlgebra> {
    let k = GradedAlgebra::parse("basis 1 0\nunit 1\n").expect("fixture parses");
    let u = GradedAlgebra::parse("basis 1 0\nbasis u 2\nunit 1\n").expect("fixture parses");
    vec![k, exterior_algebra(&["x"]), u, exterior_algebra(&["x", "y"])]
}

/// Minimal model of the Heisenberg cochains: the cohomology algebra, its `A_inf` structure with
/// transferred `mu^3`, and the homotopy data used.
pub fn heisenberg_minimal_model() -> Result<(GradedAlgebra, AInfinityStructure, CohomologyModel)> {
    let b = heisenberg()?;
    let (h, model) = cohomology_algebra(&b)?;
    let mu3 = homotopy_transfer_mu3(&b, &model.basis, &model.data)?;
    let a = with_mu3(&dg_packing(&h, None)?, mu3)?;
    Ok((h, a, model))
}

/// Cochains of the Heisenberg nilmanifold: `Lambda(x, y, z)` with `dz = xy`.
pub fn heisenberg() -> Result<AInfinityStructure> {
    let gens = ["x", "y", "z"];
    let alg = exterior_algebra(&gens);
    let d = exterior_derivation(&alg, &gens, &[("z", "xy")])?;
    dg_packing(&alg, Some(&d))
}

/// `Lambda(x, y)` plus an acyclic square-zero pair `de = f`: formal, with a nonzero differential.
pub fn formal_fixture() -> Result<AInfinityStructure> {
    let text = "basis 1 0\nbasis x 1\nbasis y 1\nbasis xy 2\nbasis e 0\nbasis f 1\nunit 1\n\
                cup x y = xy\ncup y x = -1*xy\n";
    let alg = GradedAlgebra::parse(text)?;
    let mut d = Matrix::zeros(6, 6);
    d.data[alg.basis.index("f")?][alg.basis.index("e")?] = Q::one();
    dg_packing(&alg, Some(&d))
}

/// `(passed, total)` for each family of the seeded property suite.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub dg_packings: (usize, usize),
    pub square_zero: (usize, usize),
    pub gauge_invariance: (usize, usize),
    pub transfer_independence: (usize, usize),
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        [self.dg_packings, self.square_zero, self.gauge_invariance, self.transfer_independence].iter().all(|(p, t)| p == t && *t > 0)
    }
}

/// Seeded property suite:
/// `A_inf` equations for dg packings of `algebras` and the Heisenberg and formal fixtures;
/// `d^2 = 0` on `cochains` random Hochschild cochains over [`small_algebras`];
/// gauge invariance of the universal Massey class of the Heisenberg minimal model;
/// independence of the transferred class along random homotopies.
pub fn property_suite(seed: u64, algebras: &[GradedAlgebra], cochains: usize, gauges: usize, homotopies: usize) -> Result<SuiteReport> {
    use rand::SeedableRng;
    let mut rep = SuiteReport::default();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut packs = Vec::new();
    for alg in algebras {
        packs.push(dg_packing(alg, None)?);
    }
    packs.push(heisenberg()?);
    packs.push(formal_fixture()?);
    for p in &packs {
        rep.dg_packings.1 += 1;
        rep.dg_packings.0 += usize::from(ainfty_check(p).is_empty());
    }
    let small = small_algebras();
    let bidegrees = [(1usize, 0i64), (1, 1), (2, -1), (2, 0), (3, -1), (3, -2)];
    for k in 0..cochains {
        let alg = &small[k % small.len()];
        let (sd, t) = bidegrees[(k / small.len()) % bidegrees.len()];
        let mu2 = trivial_mu2(alg);
        let phi = random_cochain(&mut rng, &alg.basis, sd, t, 0.6, 5);
        let d = hochschild_differential(&alg.basis, &mu2, &phi);
        rep.square_zero.1 += 1;
        rep.square_zero.0 += usize::from(hochschild_differential(&alg.basis, &mu2, &d).is_zero());
    }
    let b = heisenberg()?;
    let (h, a, model) = heisenberg_minimal_model()?;
    let class = universal_massey(&h, &a)?;
    for _ in 0..gauges {
        let g2 = random_cochain(&mut rng, &h.basis, 2, -1, 0.5, 4);
        let g = GaugeTransformation::identity().with(2, g2)?;
        let moved = universal_massey(&h, &with_mu3(&a, gauge_mu3(&a, &g)?)?)?;
        rep.gauge_invariance.1 += 1;
        rep.gauge_invariance.0 += usize::from(moved.same_class(&class));
    }
    let dirs = homotopy_directions(&b);
    let mu1 = mu1_matrix(&b);
    for _ in 0..homotopies {
        let coeffs: Vec<Q> = dirs.iter().map(|_| q(rng.gen_range(-4..=4))).collect();
        let data = shifted_homotopy(&model.data, &dirs, &coeffs);
        rep.transfer_independence.1 += 1;
        if !data.violations(&mu1, &model.basis, &b.basis).is_empty() {
            continue;
        }
        let mu3 = homotopy_transfer_mu3(&b, &model.basis, &data)?;
        let c = universal_massey(&h, &with_mu3(&a, mu3)?)?;
        rep.transfer_independence.0 += usize::from(c.same_class(&class));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dg_packings_satisfy_the_equations() {
        for alg in [crate::algebra::exterior_one(), exterior_algebra(&["x", "y"]), exterior_algebra(&["x", "y", "z"])] {
            assert!(alg.verify().iter().all(|v| v.axiom == "pairing" || v.axiom == "pairing-nondegenerate"));
            assert!(ainfty_check(&dg_packing(&alg, None).unwrap()).is_empty());
        }
        assert!(ainfty_check(&heisenberg().unwrap()).is_empty());
        assert!(ainfty_check(&formal_fixture().unwrap()).is_empty());
    }

    #[test]
    fn corrupted_sign_is_localized() {
        let alg = exterior_algebra(&["x", "y", "z"]);
        let mut s = dg_packing(&alg, None).unwrap();
        let zero = s.zero_class();
        let mut m2 = s.mu0(2);
        let (x, y) = (alg.basis.index("x").unwrap(), alg.basis.index("y").unwrap());
        let v = m2.values.get_mut(&vec![x, y]).unwrap();
        for c in v.iter_mut() {
            *c = -c.clone();
        }
        s.set(2, zero, m2).unwrap();
        let bad = ainfty_check(&s);
        assert!(!bad.is_empty());
        assert!(bad.iter().all(|r| r.inputs.len() == 3));
        assert!(bad.iter().all(|r| r.inputs.iter().any(|l| l == "x") || r.inputs.iter().any(|l| l == "y")));
    }

    #[test]
    fn degree_violations_rejected() {
        let alg = exterior_one();
        let mut s = AInfinityStructure::plain(alg.basis.clone(), 4);
        let mut c = Cochain::zero(2, 0, 2);
        c.add_at(vec![0, 0], &Q::one(), &unit_vec(2, 1));
        assert!(s.set(2, s.zero_class(), c).is_err());
        assert!(s.set(3, s.zero_class(), Cochain::zero(3, 0, 2)).is_err());
    }

    use crate::algebra::exterior_one;

    #[test]
    fn parse_round_trip() {
        let s = AInfinityStructure::parse(
            "basis 1 0\nbasis x 1\nmu 2 0 (1,1) = 1\nmu 2 0 (1,x) = -1*x\nmu 2 0 (x,1) = x\n",
        )
        .unwrap();
        assert_eq!(s.mu0(2), trivial_mu2(&exterior_one()));
        assert!(ainfty_check(&s).is_empty());
        assert!(AInfinityStructure::parse("basis x 1\nmu 2 0 (x,x) = x\n").is_err());
    }

    #[test]
    fn composition_with_identity_counts_inputs() {
        let alg = exterior_algebra(&["x", "y"]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut id = Cochain::zero(1, 0, alg.dim());
        for i in 0..alg.dim() {
            id.add_at(vec![i], &Q::one(), &unit_vec(alg.dim(), i));
        }
        for s in 0..=3 {
            for t in -1..=1 {
                let phi = random_cochain(&mut rng, &alg.basis, s, t, 0.5, 3);
                assert_eq!(compose(&alg.basis, &phi, &id), phi.scaled(&q(s as i64)));
            }
        }
    }

    #[test]
    fn hochschild_small_cases() {
        let k = GradedAlgebra::parse("basis 1 0\nunit 1\ncup 1 1 = 1\n").unwrap();
        assert_eq!(hochschild_cohomology(&k, 0, 0).unwrap().dim, 1);
        for s in 1..=3 {
            assert_eq!(hochschild_cohomology(&k, s, 0).unwrap().dim, 0);
        }
    }

    fn binom(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn hochschild_of_exterior_algebras_matches_polynomial_count() {
        // HH of Lambda(x_1..x_k) is Lambda(x) (x) Q[y_1..y_k] with y_i of bidegree (1, -1).
        for (k, gens) in [(1usize, vec!["x"]), (2, vec!["x", "y"])] {
            let alg = exterior_algebra(&gens);
            for s in 0..=3usize {
                for t in -(s as i64) - 1..=2 {
                    let a = t + s as i64;
                    let expected = if a < 0 { 0 } else { binom(k, a as usize) * binom(s + k - 1, k - 1) };
                    let g = hochschild_cohomology(&alg, s, t).unwrap();
                    assert_eq!(g.dim, expected, "k={k} s={s} t={t}");
                }
            }
        }
        assert_eq!(hochschild_cohomology(&exterior_algebra(&["x", "y"]), 3, -1).unwrap().dim, 4);
    }

    #[test]
    fn coboundary_matches_four_term_formula() {
        let alg = exterior_algebra(&["x", "y"]);
        let s = dg_packing(&alg, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let g2 = random_cochain(&mut rng, &alg.basis, 2, -1, 0.6, 4);
            let gauge = GaugeTransformation::identity().with(2, g2.clone()).unwrap();
            let shifted = gauge_mu3(&s, &gauge).unwrap();
            let d = hochschild_differential(&alg.basis, &trivial_mu2(&alg), &g2);
            assert_eq!(shifted, d.scaled(&-Q::one()));
        }
        assert_eq!(gauge_mu3(&s, &GaugeTransformation::identity()).unwrap(), s.mu0(3));
    }

    #[test]
    fn hochschild_differential_squares_to_zero() {
        for seed in 0..40u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for alg in small_algebras() {
                let mu2 = trivial_mu2(&alg);
                for (sd, t) in [(1usize, 0i64), (2, -1), (2, 0), (3, -1), (1, 1)] {
                    let phi = random_cochain(&mut rng, &alg.basis, sd, t, 0.5, 5);
                    let d = hochschild_differential(&alg.basis, &mu2, &phi);
                    assert!(hochschild_differential(&alg.basis, &mu2, &d).is_zero());
                }
            }
        }
    }

    #[test]
    fn universal_massey_is_gauge_invariant() {
        let (h, a, _) = heisenberg_minimal_model().unwrap();
        let class = universal_massey(&h, &a).unwrap();
        for seed in 0..10u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g2 = random_cochain(&mut rng, &h.basis, 2, -1, 0.5, 3);
            let g = GaugeTransformation::identity().with(2, g2).unwrap();
            let moved = with_mu3(&a, gauge_mu3(&a, &g).unwrap()).unwrap();
            let c = universal_massey(&h, &moved).unwrap();
            assert!(c.same_class(&class) && !c.is_zero_class());
        }
    }

    #[test]
    fn transfer_is_independent_of_the_homotopy() {
        let b = heisenberg().unwrap();
        let (h, a, model) = heisenberg_minimal_model().unwrap();
        let class = universal_massey(&h, &a).unwrap();
        let dirs = homotopy_directions(&b);
        assert!(!dirs.is_empty());
        let mu1 = mu1_matrix(&b);
        let mut moved = 0;
        for seed in 0..10u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let coeffs: Vec<Q> = dirs.iter().map(|_| q(rng.gen_range(-3..=3))).collect();
            let data = shifted_homotopy(&model.data, &dirs, &coeffs);
            assert!(data.violations(&mu1, &model.basis, &b.basis).is_empty());
            let mu3 = homotopy_transfer_mu3(&b, &model.basis, &data).unwrap();
            moved += usize::from(mu3 != a.mu0(3));
            let c = universal_massey(&h, &with_mu3(&a, mu3).unwrap()).unwrap();
            assert!(c.same_class(&class), "seed {seed}");
        }
        assert!(moved > 0, "the family never changed the representative");
    }

    #[test]
    fn heisenberg_cohomology_and_transfer() {
        let b = heisenberg().unwrap();
        let (h, model) = cohomology_algebra(&b).unwrap();
        let betti: Vec<usize> = (0..=3).map(|k| h.basis.indices_of_degree(k).len()).collect();
        assert_eq!(betti, vec![1, 2, 2, 1]);
        assert_eq!(h.unit, Some(0));
        let mu3 = homotopy_transfer_mu3(&b, &model.basis, &model.data).unwrap();
        let mut a = dg_packing(&h, None).unwrap();
        a = with_mu3(&a, mu3).unwrap();
        let class = universal_massey(&h, &a).unwrap();
        assert!(!class.is_zero_class());
    }

    #[test]
    fn matrix_extension_preserves_equations() {
        let b = heisenberg().unwrap();
        let m = matrix_extension(&b, 2).unwrap();
        assert_eq!(m.dim(), 32);
        assert!(ainfty_check(&m).is_empty());
        let alg = exterior_algebra(&["x", "y", "z"]);
        let mut bad = dg_packing(&alg, None).unwrap();
        let mut m2 = bad.mu0(2);
        let (x, y, xy) = (alg.basis.index("x").unwrap(), alg.basis.index("y").unwrap(), alg.basis.index("xy").unwrap());
        let v = m2.values.get_mut(&vec![x, y]).unwrap();
        v[xy] = -v[xy].clone();
        bad.set(2, bad.zero_class(), m2).unwrap();
        assert!(!ainfty_check(&matrix_extension(&bad, 2).unwrap()).is_empty());
    }
}
