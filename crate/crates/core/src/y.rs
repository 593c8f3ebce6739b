//! The blowup `Y` of P^3 along a canonical genus 4 curve, its quantum tables, the
//! mapping-torus algebra `H(Y)[t]/(t^2)` and the energy-2F main term.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{Basis, GradedAlgebra, Violation};
use crate::data;
use crate::error::{Error, Result};
use crate::gamma::{HomologyClass, HomologyLattice, IdealSpec};
use crate::gw::{star_at, EnergyProducts, GwTable, PdConvention, QuantumRing};
use crate::linalg::{add_scaled, is_zero_vec, sub, unit_vec, zero_vec, Matrix, Vector};
use crate::rational::{q, render, Q};

pub fn build_y() -> Result<GwTable> {
    build_y_from(&data::load("y_algebra.txt")?, &data::load("y_gw.txt")?)
}

pub fn build_y_from(algebra_text: &str, gw_text: &str) -> Result<GwTable> {
    let alg = GradedAlgebra::parse(algebra_text)?;
    GwTable::parse(alg, gw_text)
}

/// Classes by name (`F`, `2F`, `T`, `R`, `L`, `L-F`, `L-2F`, `0`), `aL+bF`, or coordinates `a,b`.
pub fn y_class(name: &str) -> Result<HomologyClass> {
    let s: String = name.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("not a class: {name:?}"));
    match s.as_str() {
        "T" => return Ok(HomologyClass(vec![1, -2])),
        "R" => return Ok(HomologyClass(vec![1, -3])),
        "0" => return Ok(HomologyClass(vec![0, 0])),
        _ => {}
    }
    if s.contains(',') {
        return HomologyClass::parse_coords(&s);
    }
    let (mut l, mut f) = (0i64, 0i64);
    let chars: Vec<char> = s.chars().collect();
    let mut start = 0;
    let mut terms = Vec::new();
    for i in 1..=chars.len() {
        if i == chars.len() || chars[i] == '+' || chars[i] == '-' {
            terms.push(chars[start..i].iter().collect::<String>());
            start = i;
        }
    }
    for t in terms {
        let (neg, body) = match t.strip_prefix('-') {
            Some(b) => (true, b),
            None => (false, t.strip_prefix('+').unwrap_or(&t)),
        };
        let (coef, gen) = body.split_at(body.len().checked_sub(1).ok_or_else(bad)?);
        let c: i64 = if coef.is_empty() { 1 } else { coef.trim_end_matches('*').parse().map_err(|_| bad())? };
        let c = if neg { -c } else { c };
        match gen {
            "L" => l += c,
            "F" => f += c,
            _ => return Err(bad()),
        }
    }
    Ok(HomologyClass(vec![l, f]))
}

/// Conventional name of a class in the `(L, F)` basis.
pub fn y_class_name(a: &HomologyClass) -> String {
    match a.0.as_slice() {
        [0, 0] => "0".into(),
        [1, -2] => "T".into(),
        [1, -3] => "R".into(),
        [l, f] => {
            let mut s = String::new();
            if *l != 0 {
                s = if *l == 1 { "L".into() } else { format!("{l}L") };
            }
            if *f != 0 {
                let mag = f.abs();
                let body = if mag == 1 { "F".to_string() } else { format!("{mag}F") };
                if s.is_empty() {
                    s = if *f < 0 { format!("-{body}") } else { body };
                } else {
                    s.push(if *f < 0 { '-' } else { '+' });
                    s.push_str(&body);
                }
            }
            s
        }
        _ => a.to_string(),
    }
}

/// `c1 = 4h + u` and `c2 = 12 l + 24 f`.
pub fn chern_data(alg: &GradedAlgebra) -> Result<(Vector, Vector)> {
    Ok((alg.element("4*h + u")?, alg.element("12*l + 24*f")?))
}

/// Whether `a = m F + n R` with `m, n >= 0`.
pub fn cone_contains(a: &HomologyClass) -> bool {
    let (l, f) = (a.0[0], a.0[1]);
    // R = (1,-3) fixes n = l; then m = f + 3l.
    l >= 0 && f + 3 * l >= 0
}

/// A literal quantum product table: `(class, x, z) -> x *_A z`.
pub type StarTable = BTreeMap<(HomologyClass, usize, usize), Vector>;

pub fn parse_star_table(basis: &Basis, text: &str) -> Result<StarTable> {
    let mut out = StarTable::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: &str| Error::Parse(format!("line {}: {m}: {raw:?}", lineno + 1));
        let (lhs, rhs) = line.split_once('=').ok_or_else(|| err("missing `=`"))?;
        let w: Vec<&str> = lhs.split_whitespace().collect();
        if w.len() != 4 || w[0] != "star" {
            return Err(err("expected `star <class> <x> <z> = <value>`"));
        }
        let class = HomologyClass::parse_coords(w[1])?;
        let (x, z) = (basis.index(w[2])?, basis.index(w[3])?);
        if out.insert((class, x, z), basis.parse_element(rhs)?).is_some() {
            return Err(err("duplicate entry"));
        }
    }
    Ok(out)
}

pub fn load_star_table(basis: &Basis) -> Result<StarTable> {
    parse_star_table(basis, &data::load("y_tables.txt")?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableMismatch {
    pub class: String,
    pub x: String,
    pub z: String,
    pub table: String,
    pub computed: String,
}

/// Compares every product `x *_A z` for `A` in `classes` against the literal table.
pub fn reproduce_tables(
    table: &GwTable,
    stars: &StarTable,
    classes: &[HomologyClass],
    conv: PdConvention,
) -> Result<Vec<TableMismatch>> {
    let alg = &table.target;
    let n = alg.dim();
    let mut out = Vec::new();
    for a in classes {
        for x in 0..n {
            for z in 0..n {
                let computed = star_at(table, conv, a, &alg.e(x), &alg.e(z))?;
                let lit = stars.get(&(a.clone(), x, z)).cloned().unwrap_or_else(|| zero_vec(n));
                if lit != computed {
                    out.push(TableMismatch {
                        class: y_class_name(a),
                        x: alg.basis.label(x).into(),
                        z: alg.basis.label(z).into(),
                        table: alg.render(&lit),
                        computed: alg.render(&computed),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Entries of the literal tables violating `x *_A z = (-1)^{|x||z|} z *_A x`.
pub fn table_commutativity_defects(alg: &GradedAlgebra, stars: &StarTable) -> Vec<TableMismatch> {
    let n = alg.dim();
    let mut out = Vec::new();
    let classes: std::collections::BTreeSet<_> = stars.keys().map(|k| k.0.clone()).collect();
    for a in classes {
        for x in 0..n {
            for z in x + 1..n {
                let xz = stars.get(&(a.clone(), x, z)).cloned().unwrap_or_else(|| zero_vec(n));
                let zx = stars.get(&(a.clone(), z, x)).cloned().unwrap_or_else(|| zero_vec(n));
                let s = crate::rational::sign(alg.basis.degree(x) * alg.basis.degree(z));
                let swapped: Vector = zx.iter().map(|c| &s * c).collect();
                if xz != swapped {
                    out.push(TableMismatch {
                        class: y_class_name(&a),
                        x: alg.basis.label(x).into(),
                        z: alg.basis.label(z).into(),
                        table: alg.render(&xz),
                        computed: format!("{} (swapped: {})", alg.render(&swapped), alg.render(&zx)),
                    });
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundTripFailure {
    pub invariant: String,
    pub stored: String,
    pub recovered: String,
}

/// For every stored 3-point invariant in `classes`, checks `integral (x *_A z) cup w = GW_A(x, z, w)`.
pub fn pd_round_trip(table: &GwTable, classes: &[HomologyClass]) -> Result<(usize, Vec<RoundTripFailure>)> {
    let alg = &table.target;
    let mut checked = 0;
    let mut out = Vec::new();
    for ((a, ins), stored) in &table.entries {
        if ins.len() != 3 || !classes.contains(a) {
            continue;
        }
        checked += 1;
        let prod = star_at(table, PdConvention::ProductFirst, a, &alg.e(ins[0]), &alg.e(ins[1]))?;
        let rec = alg.pair(&prod, &alg.e(ins[2]));
        if rec != *stored {
            out.push(RoundTripFailure {
                invariant: table.render_key(&(a.clone(), ins.clone())),
                stored: render(stored),
                recovered: render(&rec),
            });
        }
    }
    Ok((checked, out))
}

/// The quantum ring of `Y` truncated at the pivot `2F`.
pub fn y_ring(table: GwTable) -> QuantumRing {
    QuantumRing::new(table, IdealSpec::Pivot(HomologyClass(vec![0, 2])))
}

/// Violations of `sum_{A+A'=B} (x *_A y) *_A' z = sum x *_A (y *_A' z)` over surviving classes.
pub fn associativity_defects(
    alg_labels: &Basis,
    ep: &EnergyProducts,
    lattice: &HomologyLattice,
    surviving: &[HomologyClass],
    b: &HomologyClass,
) -> Vec<Violation> {
    let n = ep.dim;
    let splits: Vec<(HomologyClass, HomologyClass)> = lattice
        .effective_splittings(b)
        .into_iter()
        .filter(|(a1, a2)| surviving.contains(a1) && surviving.contains(a2))
        .collect();
    let mut out = Vec::new();
    let compose_left = |a1: &HomologyClass, a2: &HomologyClass, x: usize, y: usize, z: usize| -> Vector {
        let v = ep.basis(a1, x, y);
        let mut acc = zero_vec(n);
        for (k, c) in v.iter().enumerate() {
            if !c.is_zero() {
                add_scaled(&mut acc, c, &ep.basis(a2, k, z));
            }
        }
        acc
    };
    let compose_right = |a1: &HomologyClass, a2: &HomologyClass, x: usize, y: usize, z: usize| -> Vector {
        let v = ep.basis(a2, y, z);
        let mut acc = zero_vec(n);
        for (k, c) in v.iter().enumerate() {
            if !c.is_zero() {
                add_scaled(&mut acc, c, &ep.basis(a1, x, k));
            }
        }
        acc
    };
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let mut lhs = zero_vec(n);
                let mut rhs = zero_vec(n);
                for (a1, a2) in &splits {
                    crate::linalg::add_into(&mut lhs, &compose_left(a1, a2, x, y, z));
                    crate::linalg::add_into(&mut rhs, &compose_right(a1, a2, x, y, z));
                }
                if lhs != rhs {
                    out.push(Violation {
                        axiom: format!("associativity at {}", y_class_name(b)),
                        labels: vec![alg_labels.label(x).into(), alg_labels.label(y).into(), alg_labels.label(z).into()],
                        detail: format!("{} != {}", alg_labels.render_element(&lhs), alg_labels.render_element(&rhs)),
                    });
                }
            }
        }
    }
    out
}

/// `R~ = R[t]/(t^2)` with `t` of degree 1, basis `{x} + {t.x}`, and the product
/// `(a' + t a'')(b' + t b'') = a'b' + t(a'b'' + a''b')`.
#[derive(Clone, Debug)]
pub struct TorusAlgebra {
    pub base: GradedAlgebra,
    pub algebra: GradedAlgebra,
    pub t: Vector,
    /// Projection `R~ -> R` killing `t`.
    pub j: Matrix,
}

pub fn t_label(l: &str) -> String {
    format!("t.{l}")
}

impl TorusAlgebra {
    pub fn new(base: &GradedAlgebra) -> Result<Self> {
        let n = base.dim();
        let mut entries: Vec<(String, i64)> = (0..n).map(|i| (base.basis.label(i).to_string(), base.basis.degree(i))).collect();
        entries.extend((0..n).map(|i| (t_label(base.basis.label(i)), base.basis.degree(i) + 1)));
        let basis = Basis::new(entries)?;
        let mut products = BTreeMap::new();
        for (&(i, j), v) in &base.products {
            let tv = lift_t(v);
            products.insert((i, j), extend(v, 2 * n));
            products.insert((i, n + j), tv.clone());
            products.insert((n + i, j), tv);
        }
        let mut pairing = BTreeMap::new();
        for (&(i, j), c) in &base.pairing {
            pairing.insert((i, n + j), c.clone());
            pairing.insert((n + i, j), c.clone());
        }
        let algebra = GradedAlgebra {
            basis,
            products,
            pairing,
            unit: base.unit,
            lattice: base.lattice.clone(),
            evals: base.evals.clone(),
        };
        let unit = base.unit.ok_or_else(|| Error::Invalid("base algebra needs a unit".into()))?;
        let t = unit_vec(2 * n, n + unit);
        let mut j = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            j.data[i][i] = Q::one();
        }
        Ok(TorusAlgebra { base: base.clone(), algebra, t, j })
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Energy-wise extension of the base products by the torus formula.
    pub fn extend_products(&self, base: &EnergyProducts) -> EnergyProducts {
        let n = self.base.dim();
        let mut ep = EnergyProducts::new(2 * n);
        for (a, t) in &base.tables {
            ep.tables.entry(a.clone()).or_default();
            for (&(i, j), v) in t {
                ep.set(a, i, j, extend(v, 2 * n));
                ep.set(a, i, n + j, lift_t(v));
                ep.set(a, n + i, j, lift_t(v));
            }
        }
        ep
    }
}

fn extend(v: &[Q], m: usize) -> Vector {
    let mut out = v.to_vec();
    out.resize(m, Q::zero());
    out
}

fn lift_t(v: &[Q]) -> Vector {
    let mut out = zero_vec(v.len());
    out.extend(v.iter().cloned());
    out
}

/// `x *~_A z` on the torus algebra.
pub fn torus_product(torus: &TorusAlgebra, base: &EnergyProducts, a: &HomologyClass, x: &[Q], z: &[Q]) -> Vector {
    let n = torus.base.dim();
    let (x1, x2) = x.split_at(n);
    let (z1, z2) = z.split_at(n);
    let mut out = extend(&base.apply(a, x1, z1), 2 * n);
    let mut tpart = base.apply(a, x1, z2);
    crate::linalg::add_into(&mut tpart, &base.apply(a, x2, z1));
    for (k, c) in tpart.into_iter().enumerate() {
        out[n + k] += c;
    }
    out
}

/// Sign convention for the `(ua_i, ub_i, ub_j)` family of the main term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Convention {
    /// The table exactly as listed: `mu3(ua_i, ub_i, ub_j) = -t.ua_j`.
    Tabulated,
    /// The value used in the nontriviality argument: `mu3(ua_i, ub_i, ub_j) = t.ub_j`.
    Stated,
}

impl Convention {
    pub fn name(self) -> &'static str {
        match self {
            Convention::Tabulated => "tabulated",
            Convention::Stated => "stated",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "tabulated" => Ok(Convention::Tabulated),
            "stated" => Ok(Convention::Stated),
            _ => Err(Error::Parse(format!("unknown convention {s:?}"))),
        }
    }

    pub const ALL: [Convention; 2] = [Convention::Tabulated, Convention::Stated];
}

/// Sparse trilinear map on basis triples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MainTerm {
    pub dim: usize,
    pub entries: BTreeMap<(usize, usize, usize), Vector>,
}

impl MainTerm {
    pub fn parse(basis: &Basis, text: &str, conv: Convention) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: &str| Error::Parse(format!("line {}: {m}: {raw:?}", lineno + 1));
            let (lhs, rhs) = line.split_once('=').ok_or_else(|| err("missing `=`"))?;
            let w: Vec<&str> = lhs.split_whitespace().collect();
            if w.len() != 5 || w[0] != "mu3" {
                return Err(err("expected `mu3 <convention> x3 x2 x1 = value`"));
            }
            if w[1] != "both" {
                Convention::parse(w[1])?;
                if w[1] != conv.name() {
                    continue;
                }
            }
            let key = (basis.index(w[2])?, basis.index(w[3])?, basis.index(w[4])?);
            if entries.insert(key, basis.parse_element(rhs)?).is_some() {
                return Err(err("duplicate entry"));
            }
        }
        Ok(MainTerm { dim: basis.len(), entries })
    }

    pub fn apply(&self, x3: &[Q], x2: &[Q], x1: &[Q]) -> Vector {
        let mut out = zero_vec(self.dim);
        for ((i, j, k), v) in &self.entries {
            let c = &x3[*i] * &x2[*j] * &x1[*k];
            if !c.is_zero() {
                add_scaled(&mut out, &c, v);
            }
        }
        out
    }
}

/// The energy-2F main term on the torus algebra of `Y`.
pub fn mu3_2f_table(torus: &TorusAlgebra, conv: Convention) -> Result<MainTerm> {
    MainTerm::parse(&torus.algebra.basis, &data::load("y_mainterm.txt")?, conv)
}

pub fn mu3_2f(term: &MainTerm, x3: &[Q], x2: &[Q], x1: &[Q]) -> Vector {
    term.apply(x3, x2, x1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeCohomology {
    /// `dims[k] = dim H^k(cone)` for `k = 0..=top+1`.
    pub dims: Vec<usize>,
    /// `ker(id - phi)` in each degree, contributing to the same degree.
    pub kernel: BTreeMap<i64, Vec<Vector>>,
    /// Complement of `im(id - phi)` in each degree, contributing one degree higher.
    pub cokernel: BTreeMap<i64, Vec<Vector>>,
}

/// Cohomology of the cone of `id - phi`; `H^k = coker(id - phi on H^{k-1}) + ker(id - phi on H^k)`.
pub fn mapping_cone_cohomology(basis: &Basis, phi: &Matrix) -> Result<ConeCohomology> {
    let n = basis.len();
    if phi.rows != n || phi.cols != n {
        return Err(Error::Dimension(format!("phi is {}x{}, basis has {n} elements", phi.rows, phi.cols)));
    }
    for i in 0..n {
        for j in 0..n {
            if !phi.data[i][j].is_zero() && basis.degree(i) != basis.degree(j) {
                return Err(Error::Invalid(format!(
                    "phi mixes degrees: entry ({}, {})",
                    basis.label(i),
                    basis.label(j)
                )));
            }
        }
    }
    let top = basis.degrees.iter().copied().max().unwrap_or(0);
    let mut dims = vec![0usize; (top + 2).max(1) as usize];
    let mut kernel = BTreeMap::new();
    let mut cokernel = BTreeMap::new();
    for d in 0..=top {
        let idx = basis.indices_of_degree(d);
        if idx.is_empty() {
            continue;
        }
        let m = idx.len();
        let mut block = Matrix::zeros(m, m);
        for (r, &i) in idx.iter().enumerate() {
            for (c, &j) in idx.iter().enumerate() {
                let id = if i == j { Q::one() } else { Q::zero() };
                block.data[r][c] = id - &phi.data[i][j];
            }
        }
        let embed = |v: &Vector| {
            let mut out = zero_vec(n);
            for (k, &i) in idx.iter().enumerate() {
                out[i] = v[k].clone();
            }
            out
        };
        let ker: Vec<Vector> = block.kernel().iter().map(embed).collect();
        // Greedy completion of the image to a basis.
        let mut span: Vec<Vector> = (0..m).map(|c| block.data.iter().map(|row| row[c].clone()).collect()).collect();
        let mut rank = Matrix::from_rows(m, span.clone()).rank();
        let mut coker = Vec::new();
        for k in 0..m {
            span.push(unit_vec(m, k));
            let r = Matrix::from_rows(m, span.clone()).rank();
            if r > rank {
                rank = r;
                coker.push(embed(&unit_vec(m, k)));
            } else {
                span.pop();
            }
        }
        dims[d as usize] += ker.len();
        dims[d as usize + 1] += coker.len();
        kernel.insert(d, ker);
        cokernel.insert(d, coker);
    }
    Ok(ConeCohomology { dims, kernel, cokernel })
}

/// Parses a whitespace separated square matrix, or the word `identity`.
pub fn parse_matrix(text: &str, n: usize) -> Result<Matrix> {
    let rows: Vec<&str> = text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).filter(|l| !l.is_empty()).collect();
    if rows.len() == 1 && rows[0] == "identity" {
        return Ok(Matrix::identity(n));
    }
    let data = rows
        .iter()
        .map(|r| r.split_whitespace().map(crate::rational::parse_q).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    if data.len() != n || data.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension(format!("expected a {n}x{n} matrix")));
    }
    Ok(Matrix::from_rows(n, data))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtensionReport {
    /// Problems with the deformation data itself.
    pub malformed: Vec<String>,
    pub violations: Vec<Violation>,
}

impl ExtensionReport {
    pub fn is_empty(&self) -> bool {
        self.malformed.is_empty() && self.violations.is_empty()
    }

    pub fn count(&self, axiom: &str) -> usize {
        self.violations.iter().filter(|v| v.axiom.starts_with(axiom)).count()
    }
}

/// Checks that `psi_t` extends `psi` along the deformation `(tilde, t, j)`:
/// (1) `psi_t_0` is the cup product, (2) energy-split associativity for every surviving class,
/// (3) `psi_t_A(u, x) = 0` for degree-2 `u` with `<u, A> = 0` and `A != 0`, (4) `j psi_t = psi (j, j)`.
pub fn verify_extension(
    base: &GradedAlgebra,
    tilde: &GradedAlgebra,
    t: &[Q],
    j: &Matrix,
    psi: &EnergyProducts,
    psi_t: &EnergyProducts,
    ideal: &IdealSpec,
) -> Result<ExtensionReport> {
    let lattice = tilde.lattice.clone().ok_or_else(|| Error::Invalid("deformation has no lattice".into()))?;
    let n = tilde.dim();
    let basis = &tilde.basis;
    let mut rep = ExtensionReport::default();
    // Exactness of 0 -> tR~ -> R~ -> R -> 0.
    if !is_zero_vec(&tilde.cup(t, t)) {
        rep.malformed.push("t^2 != 0".into());
    }
    if j.rank() != base.dim() {
        rep.malformed.push("j is not surjective".into());
    }
    let t_image: Vec<Vector> = (0..n).map(|i| tilde.cup(t, &tilde.e(i))).collect();
    let t_rank = Matrix::from_rows(n, t_image.clone()).rank();
    let ker_dim = n - j.rank();
    if t_image.iter().any(|v| !is_zero_vec(&j.apply(v))) || t_rank != ker_dim {
        rep.malformed.push("kernel of j differs from t R~".into());
    }
    let lab = |ids: &[usize]| ids.iter().map(|&i| basis.label(i).to_string()).collect::<Vec<_>>();
    let zero = lattice.zero();
    // (1)
    for x in 0..n {
        for y in 0..n {
            let p = psi_t.basis(&zero, x, y);
            if p != tilde.basis_product(x, y) {
                rep.violations.push(Violation {
                    axiom: "1 (A = 0 is the cup product)".into(),
                    labels: lab(&[x, y]),
                    detail: format!("{} != {}", tilde.render(&p), tilde.render(&tilde.basis_product(x, y))),
                });
            }
        }
    }
    // (2)
    let surviving = ideal.surviving(&lattice);
    for b in &surviving {
        for mut v in associativity_defects(basis, psi_t, &lattice, &surviving, b) {
            v.axiom = format!("2 ({})", v.axiom);
            rep.violations.push(v);
        }
    }
    // (3)
    let deg2: Vec<usize> = (0..n).filter(|&i| basis.degree(i) == 2).collect();
    for a in surviving.iter().filter(|a| !a.is_zero()) {
        let mut f = Matrix::zeros(1, deg2.len());
        for (c, &i) in deg2.iter().enumerate() {
            let e = tilde.eval_on(i, a).ok_or_else(|| Error::Invalid(format!("no pairing for {}", basis.label(i))))?;
            f.data[0][c] = q(e);
        }
        for kv in f.kernel() {
            let mut u = zero_vec(n);
            for (c, &i) in deg2.iter().enumerate() {
                u[i] = kv[c].clone();
            }
            for x in 0..n {
                let p = psi_t.apply(a, &u, &tilde.e(x));
                if !is_zero_vec(&p) {
                    rep.violations.push(Violation {
                        axiom: format!("3 (<u, {}> = 0)", y_class_name(a)),
                        labels: vec![tilde.render(&u), basis.label(x).into()],
                        detail: tilde.render(&p),
                    });
                }
            }
        }
    }
    // (4)
    let classes: std::collections::BTreeSet<_> = psi_t.tables.keys().chain(psi.tables.keys()).cloned().collect();
    for a in &classes {
        for x in 0..n {
            for y in 0..n {
                let lhs = j.apply(&psi_t.basis(a, x, y));
                let rhs = psi.apply(a, &j.apply(&tilde.e(x)), &j.apply(&tilde.e(y)));
                if lhs != rhs {
                    rep.violations.push(Violation {
                        axiom: format!("4 (j-equivariance at {})", y_class_name(a)),
                        labels: lab(&[x, y]),
                        detail: format!("{} != {}", base.render(&lhs), base.render(&rhs)),
                    });
                }
            }
        }
    }
    Ok(rep)
}

/// Everything needed for the torus computations on `Y`.
#[derive(Clone, Debug)]
pub struct YModel {
    pub ring: QuantumRing,
    pub products: EnergyProducts,
    pub torus: TorusAlgebra,
    pub torus_products: EnergyProducts,
}

impl YModel {
    pub fn build() -> Result<Self> {
        Self::from_table(build_y()?)
    }

    pub fn from_table(table: GwTable) -> Result<Self> {
        let ring = y_ring(table);
        let products = ring.energy_products()?;
        let torus = TorusAlgebra::new(ring.base())?;
        let torus_products = torus.extend_products(&products);
        Ok(YModel { ring, products, torus, torus_products })
    }

    pub fn lattice(&self) -> &HomologyLattice {
        &self.ring.table.lattice
    }
}

/// `integral c1^3`, from the cup table.
pub fn c1_cubed(alg: &GradedAlgebra) -> Result<Q> {
    let (c1, _) = chern_data(alg)?;
    Ok(alg.triple_integral(&c1, &c1, &c1))
}

/// Difference of two elements, rendered.
pub fn render_difference(alg: &GradedAlgebra, a: &[Q], b: &[Q]) -> String {
    alg.render(&sub(a, b))
}

/// Intersection degree `deg(z2 z1)` on the curve for `x = u z` labels `ua<i>`, `ub<i>`:
/// `a_i b_i = 1`, `b_i a_i = -1`, all else 0.
pub fn curve_degree(x2: &str, x1: &str) -> i64 {
    let split = |l: &str| -> Option<(bool, String)> {
        l.strip_prefix("ua").map(|r| (true, r.to_string())).or_else(|| l.strip_prefix("ub").map(|r| (false, r.to_string())))
    };
    match (split(x2), split(x1)) {
        (Some((true, i)), Some((false, j))) if i == j => 1,
        (Some((false, i)), Some((true, j))) if i == j => -1,
        _ => 0,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DerivedValue {
    pub step: String,
    pub invariant: String,
    pub value: String,
    pub expected: String,
    pub ok: bool,
}

fn odd_labels(alg: &GradedAlgebra) -> Vec<usize> {
    (0..alg.dim()).filter(|&i| alg.basis.degree(i) % 2 != 0).collect()
}

/// Rederives invariants with WDVV and the Gathmann recursion from the seeds:
/// `GW_{L-F}(f,l,l)`, `GW_{L-F}(f,pt)`, `GW_{L-F}(l,l,x2,x1)`, then the odd `T` invariants
/// (with the stored ones withheld) and `GW_{R,2}`.
pub fn derivation_chain(table: &GwTable) -> Result<Vec<DerivedValue>> {
    use crate::gw::{gathmann_step, solve_single_unknown, wdvv_residual, Rule};
    let alg = table.target.clone();
    let ix = |l: &str| alg.basis.index(l);
    let (h, u, f, l, pt) = (ix("h")?, ix("u")?, ix("f")?, ix("l")?, ix("pt")?);
    let mut t = table.clone();
    let mut out = Vec::new();
    let mut record = |t: &GwTable, step: String, class: &HomologyClass, ins: &[usize], expected: Q| -> Result<()> {
        let v = t.km_reduce(class, ins)?;
        let labels: Vec<&str> = ins.iter().map(|&i| alg.basis.label(i)).collect();
        out.push(DerivedValue {
            step,
            invariant: format!("GW[{}]({})", y_class_name(class), labels.join(",")),
            value: render(&v),
            expected: render(&expected),
            ok: v == expected,
        });
        Ok(())
    };
    let solve_into = |t: &mut GwTable, rel: &dyn Fn(&GwTable) -> Result<Q>| -> Result<()> {
        match solve_single_unknown(t, rel)? {
            Some((k, v)) => {
                t.entries.insert(k, v);
                Ok(())
            }
            // Already determined (e.g. by graded symmetry): it must hold as stated.
            None => {
                let r = rel(t)?;
                if r.is_zero() {
                    Ok(())
                } else {
                    Err(Error::Invalid(format!("fully determined relation has residual {}", render(&r))))
                }
            }
        }
    };
    let lclass = y_class("L")?;
    let lf = y_class("L-F")?;
    let tc = y_class("T")?;
    let rc = y_class("R")?;
    for (xs, name) in [(vec![l, l], "E_L(l,l; h,h | u,f)"), (vec![pt], "E_L(pt; h,h | u,f)")] {
        let (x2, lc) = (xs.clone(), lclass.clone());
        solve_into(&mut t, &move |tt: &GwTable| wdvv_residual(tt, &lc, &x2, [h, h, u, f]))?;
        let mut ins = vec![f];
        ins.extend(xs);
        record(&t, name.into(), &lf, &ins, q(1))?;
    }
    let odd = odd_labels(&alg);
    for &x2 in &odd {
        for &x1 in &odd {
            let xs = vec![l, l, x2, x1];
            let id = gathmann_step(&t, -1, &xs)?;
            solve_into(&mut t, &|tt: &GwTable| id.residual(tt))?;
            let d = curve_degree(alg.basis.label(x2), alg.basis.label(x1));
            record(&t, "recursion a=-1".into(), &lf, &xs, q(d))?;
        }
    }
    // Withhold the stored odd T invariants so they are derived, not looked up.
    t.entries.retain(|(a, ins), _| !(a == &tc && ins.iter().any(|&i| alg.basis.degree(i) % 2 != 0)));
    t.rules.retain(|r| !matches!(r, Rule::Complete { class, .. } if class == &tc));
    for (lead, factor) in [(f, 1), (l, 5)] {
        for &x2 in &odd {
            for &x1 in &odd {
                let xs = vec![lead, x2, x1];
                let id = gathmann_step(&t, -2, &xs)?;
                solve_into(&mut t, &|tt: &GwTable| id.residual(tt))?;
                let d = curve_degree(alg.basis.label(x2), alg.basis.label(x1));
                record(&t, "recursion a=-2".into(), &tc, &xs, q(factor * d))?;
            }
        }
    }
    for &x2 in &odd {
        for &x1 in &odd {
            let xs = vec![x2, x1];
            let id = gathmann_step(&t, -3, &xs)?;
            solve_into(&mut t, &|tt: &GwTable| id.residual(tt))?;
            let d = curve_degree(alg.basis.label(x2), alg.basis.label(x1));
            record(&t, "recursion a=-3".into(), &rc, &xs, q(2 * d))?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_names_round_trip() {
        for s in ["F", "2F", "T", "R", "L", "L-F", "0", "4F"] {
            let c = y_class(s).unwrap();
            assert_eq!(y_class(&y_class_name(&c)).unwrap(), c, "{s}");
        }
        assert_eq!(y_class("L-2F").unwrap(), y_class("T").unwrap());
        assert_eq!(y_class("1,-3").unwrap(), y_class("R").unwrap());
        assert!(y_class("Q").is_err());
    }

    #[test]
    fn cone_examples() {
        assert!(cone_contains(&y_class("T").unwrap()));
        assert!(!cone_contains(&y_class("L-4F").unwrap()));
        assert!(cone_contains(&y_class("0").unwrap()));
        assert!(cone_contains(&y_class("L").unwrap()));
        assert!(!cone_contains(&y_class("-F").unwrap()));
    }
}
