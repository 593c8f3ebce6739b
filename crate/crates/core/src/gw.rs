//! Gromov-Witten tables with axiom-level reduction, quantum products, WDVV and the
//! Gathmann recursion on blowups of P^3 along a curve.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::algebra::GradedAlgebra;
use crate::error::{Error, Result};
use crate::gamma::{HomologyClass, HomologyLattice, IdealSpec};
use crate::linalg::{is_zero_vec, zero_vec, Matrix, Vector};
use crate::rational::{parse_q, q, render, sign, Q};

/// A canonical invariant key: class plus insertions sorted by basis index.
pub type Key = (HomologyClass, Vec<usize>);

/// Sorts insertions by basis index, returning the Koszul sign of the permutation.
pub fn koszul_sort(ins: &[usize], degree: impl Fn(usize) -> i64) -> (Vec<usize>, Q) {
    let mut v = ins.to_vec();
    let mut odd_swaps = 0i64;
    // insertion sort, counting transpositions of two odd entries
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            if degree(v[j - 1]) % 2 != 0 && degree(v[j]) % 2 != 0 {
                odd_swaps += 1;
            }
            v.swap(j - 1, j);
            j -= 1;
        }
    }
    (v, sign(odd_swaps))
}

/// Koszul sign of moving the entries at `picked` (kept in order) to the end of `ins`.
fn koszul_extract(ins: &[usize], picked: &[usize], degree: impl Fn(usize) -> i64) -> Q {
    let mut e = 0i64;
    for &p in picked {
        let dp = degree(ins[p]);
        for (k, &x) in ins.iter().enumerate().skip(p + 1) {
            if !picked.contains(&k) {
                e += dp * degree(x);
            }
        }
    }
    sign(e)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    /// Every invariant in the class vanishes.
    Zero { class: HomologyClass, reason: String },
    /// Invariants whose insertions contain the given multiset vanish.
    Vanish { class: HomologyClass, labels: Vec<usize>, reason: String },
    /// The stored `points`-point invariants are all the nonzero ones.
    Complete { class: HomologyClass, points: usize, reason: String },
}

/// Why a reduction stopped without a value.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Miss {
    Unknown(Key),
    Fail(Error),
}

impl From<Error> for Miss {
    fn from(e: Error) -> Self {
        Miss::Fail(e)
    }
}

type Outcome<T> = std::result::Result<T, Miss>;

#[derive(Clone, Debug)]
pub struct GwTable {
    pub target: GradedAlgebra,
    pub lattice: HomologyLattice,
    pub entries: BTreeMap<Key, Q>,
    pub rules: Vec<Rule>,
    /// Real dimension `2n` of the target.
    pub dimension: i64,
}

impl GwTable {
    pub fn new(target: GradedAlgebra) -> Result<Self> {
        let lattice = target.lattice.clone().ok_or_else(|| Error::Invalid("target algebra has no lattice".into()))?;
        let dimension = target.basis.degrees.iter().copied().max().unwrap_or(0);
        Ok(GwTable { target, lattice, entries: BTreeMap::new(), rules: Vec::new(), dimension })
    }

    fn deg(&self, i: usize) -> i64 {
        self.target.basis.degree(i)
    }

    pub fn canonical(&self, class: &HomologyClass, ins: &[usize]) -> (Key, Q) {
        let (sorted, s) = koszul_sort(ins, |i| self.deg(i));
        ((class.clone(), sorted), s)
    }

    /// Stores `GW_A(ins) = value` in canonical form; conflicting re-entries are errors.
    pub fn insert(&mut self, class: HomologyClass, ins: &[usize], value: Q) -> Result<()> {
        let (key, s) = self.canonical(&class, ins);
        let v = s * value;
        if let Some(old) = self.entries.get(&key) {
            if *old != v {
                return Err(Error::Invalid(format!(
                    "conflicting values for {}: {} and {}",
                    self.render_key(&key),
                    render(old),
                    render(&v)
                )));
            }
        }
        self.entries.insert(key, v);
        Ok(())
    }

    pub fn render_key(&self, key: &Key) -> String {
        let labels: Vec<&str> = key.1.iter().map(|&i| self.target.basis.label(i)).collect();
        format!("GW[{}]({})", key.0, labels.join(","))
    }

    /// Degree balance for a `k`-point invariant in class `a`.
    pub fn grading_ok(&self, a: &HomologyClass, ins: &[usize]) -> bool {
        let total: i64 = ins.iter().map(|&i| self.deg(i)).sum();
        total == self.dimension + 2 * self.lattice.c1(a) + 2 * ins.len() as i64 - 6
    }

    fn zero_class_reason(&self, a: &HomologyClass) -> Option<&str> {
        self.rules.iter().find_map(|r| match r {
            Rule::Zero { class, reason } if class == a => Some(reason.as_str()),
            _ => None,
        })
    }

    fn vanishing_reason(&self, a: &HomologyClass, sorted: &[usize]) -> Option<&str> {
        self.rules.iter().find_map(|r| match r {
            Rule::Vanish { class, labels, reason } if class == a && contains_multiset(sorted, labels) => Some(reason.as_str()),
            _ => None,
        })
    }

    fn complete_at(&self, a: &HomologyClass, k: usize) -> bool {
        self.rules.iter().any(|r| matches!(r, Rule::Complete { class, points, .. } if class == a && *points == k))
    }

    fn reduce(&self, a: &HomologyClass, ins: &[usize]) -> Outcome<Q> {
        if !self.lattice.is_effective(a) || !self.grading_ok(a, ins) {
            return Ok(Q::zero());
        }
        let alg = &self.target;
        if a.is_zero() {
            if ins.len() != 3 {
                return Ok(Q::zero());
            }
            return Ok(alg.triple_integral(&alg.e(ins[0]), &alg.e(ins[1]), &alg.e(ins[2])));
        }
        let (key, s) = self.canonical(a, ins);
        if let Some(v) = self.entries.get(&key) {
            return Ok(s * v);
        }
        if self.zero_class_reason(a).is_some() || self.vanishing_reason(a, &key.1).is_some() {
            return Ok(Q::zero());
        }
        if self.complete_at(a, ins.len()) {
            return Ok(Q::zero());
        }
        // Divisor axiom on the first degree-2 insertion with a known evaluation.
        if let Some(pos) = key.1.iter().position(|&i| self.deg(i) == 2 && alg.evals.contains_key(&i)) {
            let e = alg.eval_on(key.1[pos], a).unwrap_or(0);
            if e == 0 {
                return Ok(Q::zero());
            }
            let mut rest = key.1.clone();
            rest.remove(pos);
            return Ok(s * q(e) * self.reduce(a, &rest)?);
        }
        Err(Miss::Unknown(key))
    }

    fn lift(&self, r: Outcome<Q>) -> Result<Q> {
        r.map_err(|m| match m {
            Miss::Unknown(k) => Error::UnknownInvariant(self.render_key(&k)),
            Miss::Fail(e) => e,
        })
    }

    /// `GW_{A,k}` on basis insertions after axiom reduction.
    pub fn km_reduce(&self, a: &HomologyClass, ins: &[usize]) -> Result<Q> {
        self.lift(self.reduce(a, ins))
    }

    /// Same, by labels.
    pub fn lookup(&self, a: &HomologyClass, labels: &[&str]) -> Result<Q> {
        let ins = labels.iter().map(|l| self.target.basis.index(l)).collect::<Result<Vec<_>>>()?;
        self.km_reduce(a, &ins)
    }

    /// Multilinear extension to arbitrary elements.
    fn reduce_elements(&self, a: &HomologyClass, xs: &[&[Q]]) -> Outcome<Q> {
        let mut total = Q::zero();
        let mut idx = vec![0usize; xs.len()];
        let n = self.target.dim();
        let supports: Vec<Vec<usize>> = xs.iter().map(|x| (0..n).filter(|&i| !x[i].is_zero()).collect()).collect();
        if supports.iter().any(|s| s.is_empty()) {
            return Ok(total);
        }
        loop {
            let ins: Vec<usize> = idx.iter().zip(&supports).map(|(&k, s)| s[k]).collect();
            let coef: Q = ins.iter().zip(xs).map(|(&i, x)| x[i].clone()).product();
            let v = self.reduce(a, &ins)?;
            if !v.is_zero() {
                total += coef * v;
            }
            let mut p = 0;
            loop {
                if p == idx.len() {
                    return Ok(total);
                }
                idx[p] += 1;
                if idx[p] < supports[p].len() {
                    break;
                }
                idx[p] = 0;
                p += 1;
            }
        }
    }

    pub fn gw_elements(&self, a: &HomologyClass, xs: &[&[Q]]) -> Result<Q> {
        self.lift(self.reduce_elements(a, xs))
    }

    /// Parses the table format on top of a target algebra.
    pub fn parse(target: GradedAlgebra, text: &str) -> Result<Self> {
        let mut t = GwTable::new(target)?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: &str| Error::Parse(format!("line {}: {m}: {raw:?}", lineno + 1));
            let (kw, rest) = line.split_once(char::is_whitespace).ok_or_else(|| err("truncated statement"))?;
            let rest = rest.trim();
            let (coords, rest) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
            let class = HomologyClass::parse_coords(coords)?;
            if class.0.len() != t.lattice.rank {
                return Err(err("class rank differs from the lattice"));
            }
            let rest = rest.trim();
            match kw {
                "gw" => {
                    let open = rest.strip_prefix('(').ok_or_else(|| err("expected `(`"))?;
                    let (inner, after) = open.split_once(')').ok_or_else(|| err("expected `)`"))?;
                    let value = after.trim().strip_prefix('=').ok_or_else(|| err("expected `=`"))?;
                    let ins = inner
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(|l| t.target.basis.index(l))
                        .collect::<Result<Vec<_>>>()?;
                    t.insert(class, &ins, parse_q(value)?)?;
                }
                "gw-zero" => {
                    let reason = parse_reason(rest).ok_or_else(|| err("expected `reason \"...\"`"))?;
                    t.rules.push(Rule::Zero { class, reason });
                }
                "gw-vanish" => {
                    let body = rest.strip_prefix("when").ok_or_else(|| err("expected `when`"))?;
                    let (labels, tail) = body.split_once("reason").ok_or_else(|| err("expected `reason`"))?;
                    let reason = parse_reason(&format!("reason{tail}")).ok_or_else(|| err("bad reason"))?;
                    let mut ids = labels.split_whitespace().map(|l| t.target.basis.index(l)).collect::<Result<Vec<_>>>()?;
                    ids.sort_unstable();
                    t.rules.push(Rule::Vanish { class, labels: ids, reason });
                }
                "gw-complete" => {
                    let body = rest.strip_prefix("points").ok_or_else(|| err("expected `points`"))?.trim();
                    let (k, tail) = body.split_once(char::is_whitespace).ok_or_else(|| err("expected count"))?;
                    let points = k.parse::<usize>().map_err(|_| err("bad point count"))?;
                    let reason = parse_reason(tail.trim()).ok_or_else(|| err("bad reason"))?;
                    t.rules.push(Rule::Complete { class, points, reason });
                }
                _ => return Err(err("unknown statement")),
            }
        }
        Ok(t)
    }

    /// Stored entries whose value disagrees with the entry obtained by peeling a divisor.
    pub fn divisor_report(&self) -> Vec<DivisorCheck> {
        let alg = &self.target;
        let mut out = Vec::new();
        for (key, stored) in &self.entries {
            if key.0.is_zero() {
                continue;
            }
            let Some(pos) = key.1.iter().position(|&i| self.deg(i) == 2 && alg.evals.contains_key(&i)) else {
                continue;
            };
            let e = alg.eval_on(key.1[pos], &key.0).unwrap_or(0);
            let mut rest = key.1.clone();
            rest.remove(pos);
            let peeled = if e == 0 { Ok(Q::zero()) } else { self.km_reduce(&key.0, &rest).map(|v| q(e) * v) };
            out.push(DivisorCheck { key: key.clone(), label: self.render_key(key), stored: stored.clone(), peeled });
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorCheck {
    pub key: Key,
    pub label: String,
    pub stored: Q,
    /// Divisor-axiom value, or the error that prevented it.
    pub peeled: Result<Q>,
}

impl DivisorCheck {
    pub fn consistent(&self) -> bool {
        matches!(&self.peeled, Ok(v) if *v == self.stored)
    }
}

fn contains_multiset(sorted: &[usize], sub: &[usize]) -> bool {
    let mut it = sorted.iter();
    'outer: for s in sub {
        for x in it.by_ref() {
            if x == s {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn strip_comment(line: &str) -> &str {
    // `#` inside a quoted reason is kept
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

fn parse_reason(s: &str) -> Option<String> {
    let body = s.trim().strip_prefix("reason")?.trim();
    Some(body.strip_prefix('"')?.strip_suffix('"')?.to_string())
}

/// How the product is recovered from three-point invariants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PdConvention {
    /// `integral (x *_A y) cup g = GW_A(x, y, g)`.
    ProductFirst,
    /// `integral g cup (x *_A y) = GW_A(x, y, g)`.
    ProductLast,
}

#[derive(Clone, Debug)]
pub struct QuantumRing {
    pub table: GwTable,
    pub truncation: IdealSpec,
    pub convention: PdConvention,
}

/// Gamma-linear combination `sum (x *_A y) e^A`, keyed by surviving class.
pub type QuantumValue = BTreeMap<HomologyClass, Vector>;

impl QuantumRing {
    pub fn new(table: GwTable, truncation: IdealSpec) -> Self {
        QuantumRing { table, truncation, convention: PdConvention::ProductFirst }
    }

    pub fn base(&self) -> &GradedAlgebra {
        &self.table.target
    }

    pub fn surviving(&self) -> Vec<HomologyClass> {
        self.truncation.surviving(&self.table.lattice)
    }

    /// The energy-`A` component `x *_A y`.
    pub fn product_at(&self, a: &HomologyClass, x: &[Q], y: &[Q]) -> Result<Vector> {
        star_at(&self.table, self.convention, a, x, y)
    }

    pub fn product(&self, x: &[Q], y: &[Q]) -> Result<QuantumValue> {
        let mut out = BTreeMap::new();
        for a in self.surviving() {
            let v = self.product_at(&a, x, y)?;
            if !is_zero_vec(&v) {
                out.insert(a, v);
            }
        }
        Ok(out)
    }

    pub fn render(&self, v: &QuantumValue) -> String {
        if v.is_empty() {
            return "0".into();
        }
        let lat = &self.table.lattice;
        let mut terms: Vec<_> = v.iter().collect();
        terms.sort_by_key(|(a, _)| lat.order_key(a));
        terms.iter().map(|(a, x)| format!("({})*e^[{}]", self.base().render(x), a)).collect::<Vec<_>>().join(" + ")
    }
}

/// Bilinear maps on a fixed basis, one per energy class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnergyProducts {
    pub dim: usize,
    pub tables: BTreeMap<HomologyClass, BTreeMap<(usize, usize), Vector>>,
}

impl EnergyProducts {
    pub fn new(dim: usize) -> Self {
        EnergyProducts { dim, tables: BTreeMap::new() }
    }

    pub fn set(&mut self, a: &HomologyClass, i: usize, j: usize, v: Vector) {
        let t = self.tables.entry(a.clone()).or_default();
        if is_zero_vec(&v) {
            t.remove(&(i, j));
        } else {
            t.insert((i, j), v);
        }
    }

    pub fn basis(&self, a: &HomologyClass, i: usize, j: usize) -> Vector {
        self.tables.get(a).and_then(|t| t.get(&(i, j))).cloned().unwrap_or_else(|| zero_vec(self.dim))
    }

    pub fn apply(&self, a: &HomologyClass, x: &[Q], y: &[Q]) -> Vector {
        let mut out = zero_vec(self.dim);
        let Some(t) = self.tables.get(a) else { return out };
        for ((i, j), v) in t {
            let c = &x[*i] * &y[*j];
            if !c.is_zero() {
                crate::linalg::add_scaled(&mut out, &c, v);
            }
        }
        out
    }
}

impl QuantumRing {
    /// Basis products `e_i *_A e_j` for every surviving class.
    pub fn energy_products(&self) -> Result<EnergyProducts> {
        let n = self.base().dim();
        let mut ep = EnergyProducts::new(n);
        for a in self.surviving() {
            ep.tables.entry(a.clone()).or_default();
            for i in 0..n {
                for j in 0..n {
                    let v = self.product_at(&a, &self.base().e(i), &self.base().e(j))?;
                    ep.set(&a, i, j, v);
                }
            }
        }
        Ok(ep)
    }
}

/// `x *_A y` solved through the Poincare pairing.
pub fn star_at(table: &GwTable, conv: PdConvention, a: &HomologyClass, x: &[Q], y: &[Q]) -> Result<Vector> {
    let alg = &table.target;
    let n = alg.dim();
    let mut rhs = zero_vec(n);
    for (g, r) in rhs.iter_mut().enumerate() {
        let eg = alg.e(g);
        *r = table.gw_elements(a, &[x, y, &eg])?;
    }
    if is_zero_vec(&rhs) {
        return Ok(rhs);
    }
    // ProductFirst: rhs_g = sum_i z_i G[i][g], i.e. G^T z = rhs.
    let gm = alg.pairing_matrix();
    let m = match conv {
        PdConvention::ProductFirst => gm.transpose(),
        PdConvention::ProductLast => gm,
    };
    m.solve(&rhs).ok_or_else(|| Error::Invalid("degenerate Poincare pairing".into()))
}

/// Inverse metric `g^{ij}` of the declared pairing.
pub fn inverse_metric(alg: &GradedAlgebra) -> Result<Matrix> {
    alg.pairing_matrix().inverse().ok_or_else(|| Error::Invalid("degenerate Poincare pairing".into()))
}

/// `E_A(xs; m1, m2 | m3, m4)`: returns the residual of the WDVV relation.
pub fn wdvv_residual(table: &GwTable, a: &HomologyClass, xs: &[usize], mu: [usize; 4]) -> Result<Q> {
    table.lift(wdvv_outcome(table, a, xs, mu))
}

fn wdvv_outcome(table: &GwTable, a: &HomologyClass, xs: &[usize], mu: [usize; 4]) -> Outcome<Q> {
    let deg = |i: usize| table.target.basis.degree(i);
    let total: i64 = xs.iter().chain(mu.iter()).map(|&i| deg(i)).sum();
    let k = xs.len() as i64;
    // One less than the (k+4)-point grading: the relation lives on a divisor of M_{0,4}.
    let expected = table.dimension + 2 * table.lattice.c1(a) + 2 * (k + 4) - 8;
    if total != expected {
        return Err(Miss::Fail(Error::Invalid(format!("degree balance fails: {total} != {expected}"))));
    }
    let ginv = inverse_metric(&table.target)?;
    let n = table.target.dim();
    let [m1, m2, m3, m4] = mu;
    let swap_sign = sign(deg(m2) * deg(m3));
    let mut res = Q::zero();
    for (a1, a2) in table.lattice.effective_splittings(a) {
        for mask in 0u32..(1 << xs.len()) {
            let y: Vec<usize> = (0..xs.len()).filter(|b| mask & (1 << b) != 0).map(|b| xs[b]).collect();
            let z: Vec<usize> = (0..xs.len()).filter(|b| mask & (1 << b) == 0).map(|b| xs[b]).collect();
            let picked: Vec<usize> = (0..xs.len()).filter(|b| mask & (1 << b) == 0).collect();
            let shuffle = koszul_extract(xs, &picked, deg);
            for (pairs, s) in [((m1, m2, m3, m4), Q::one()), ((m1, m3, m2, m4), -swap_sign.clone())] {
                let (p1, p2, p3, p4) = pairs;
                // The left factor is independent of j; evaluate it first.
                for i in 0..n {
                    let mut left_ins = y.clone();
                    left_ins.extend([p1, p2, i]);
                    let left = table.reduce(&a1, &left_ins)?;
                    if left.is_zero() {
                        continue;
                    }
                    for j in 0..n {
                        let g = &ginv.data[i][j];
                        if g.is_zero() {
                            continue;
                        }
                        let mut right_ins = z.clone();
                        right_ins.extend([p3, p4, j]);
                        let right = table.reduce(&a2, &right_ins)?;
                        if !right.is_zero() {
                            res += &s * &shuffle * g * &left * right;
                        }
                    }
                }
            }
        }
    }
    Ok(res)
}

/// Solves `relation(table) = 0` for the single invariant it cannot resolve.
///
/// The relation is evaluated with the unknown set to 0, 1 and 2; it must be affine in it.
pub fn solve_single_unknown(
    table: &GwTable,
    relation: impl Fn(&GwTable) -> Result<Q>,
) -> Result<Option<(Key, Q)>> {
    let key = match probe(table, &relation)? {
        None => return Ok(None),
        Some(k) => k,
    };
    let mut vals = Vec::new();
    for x in 0..3 {
        let mut t = table.clone();
        t.entries.insert(key.clone(), q(x));
        match relation(&t) {
            Ok(v) => vals.push(v),
            Err(Error::UnknownInvariant(m)) => {
                return Err(Error::UnknownInvariant(format!("{m} (second unknown besides {})", table.render_key(&key))))
            }
            Err(e) => return Err(e),
        }
    }
    let slope = &vals[1] - &vals[0];
    if &vals[2] - &vals[1] != slope {
        return Err(Error::Invalid(format!("relation is not affine in {}", table.render_key(&key))));
    }
    if slope.is_zero() {
        return Err(Error::Invalid(format!("relation does not determine {}", table.render_key(&key))));
    }
    Ok(Some((key, -&vals[0] / slope)))
}

fn probe(table: &GwTable, relation: &impl Fn(&GwTable) -> Result<Q>) -> Result<Option<Key>> {
    match relation(table) {
        Ok(_) => Ok(None),
        Err(Error::UnknownInvariant(m)) => parse_rendered_key(table, &m).map(Some),
        Err(e) => Err(e),
    }
}

fn parse_rendered_key(t: &GwTable, m: &str) -> Result<Key> {
    let bad = || Error::Internal(format!("malformed key {m:?}"));
    let body = m.strip_prefix("GW[").ok_or_else(bad)?;
    let (coords, rest) = body.split_once(']').ok_or_else(bad)?;
    let inner = rest.strip_prefix('(').and_then(|r| r.split(')').next()).ok_or_else(bad)?;
    let ins = inner.split(',').filter(|s| !s.is_empty()).map(|l| t.target.basis.index(l)).collect::<Result<Vec<_>>>()?;
    Ok((HomologyClass::parse_coords(coords)?, ins))
}

/// One term `coef * GW_A(insertions)` of a linear identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GwTerm {
    pub coef: Q,
    pub class: HomologyClass,
    pub insertions: Vec<usize>,
}

/// `sum coef * GW = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearIdentity {
    pub terms: Vec<GwTerm>,
}

impl LinearIdentity {
    pub fn residual(&self, table: &GwTable) -> Result<Q> {
        let mut s = Q::zero();
        for t in &self.terms {
            if t.coef.is_zero() {
                continue;
            }
            s += &t.coef * table.km_reduce(&t.class, &t.insertions)?;
        }
        Ok(s)
    }

    pub fn solve(&self, table: &GwTable) -> Result<Option<(Key, Q)>> {
        solve_single_unknown(table, |t| self.residual(t))
    }

    pub fn render(&self, table: &GwTable) -> String {
        let parts: Vec<String> = self
            .terms
            .iter()
            .filter(|t| !t.coef.is_zero())
            .map(|t| {
                let labels: Vec<&str> = t.insertions.iter().map(|&i| table.target.basis.label(i)).collect();
                format!("{}*GW[{}]({})", render(&t.coef), t.class, labels.join(","))
            })
            .collect();
        format!("{} = 0", if parts.is_empty() { "0".to_string() } else { parts.join(" + ") })
    }
}

/// The recursion for `A = L + aF` on the blowup, with `L = (1,0)`, `F = (0,1)`:
///
/// `(a+b) GW_A(x) + sum +-GW_A(y, f) - 6(7+2a) GW_{A+F}(x, f) - ((a+1)^2-6) GW_{A+F}(x, l) = 0`
///
/// where `b` counts fibre classes and the sum runs over pairs `(ua_i, ub_i)` (sign +) and
/// `(ub_i, ua_i)` (sign -) in `x`, with `y` the remaining insertions.
pub fn gathmann_step(table: &GwTable, a: i64, xs: &[usize]) -> Result<LinearIdentity> {
    let basis = &table.target.basis;
    if table.lattice.rank != 2 {
        return Err(Error::Invalid("recursion needs the (L, F) lattice".into()));
    }
    if let Some(&bad) = xs.iter().find(|&&i| basis.degree(i) == 2) {
        return Err(Error::Invalid(format!("degree-2 insertion {} violates the hypothesis", basis.label(bad))));
    }
    let f = basis.index("f")?;
    let l = basis.index("l")?;
    let class = HomologyClass(vec![1, a]);
    let next = HomologyClass(vec![1, a + 1]);
    let b = xs.iter().filter(|&&i| i == f).count() as i64;
    let mut terms = vec![GwTerm { coef: q(a + b), class: class.clone(), insertions: xs.to_vec() }];
    let pair_of = |x: usize| -> Option<(bool, String)> {
        let lab = basis.label(x);
        lab.strip_prefix("ua").map(|s| (true, s.to_string())).or_else(|| lab.strip_prefix("ub").map(|s| (false, s.to_string())))
    };
    for p in 0..xs.len() {
        for r in p + 1..xs.len() {
            let (Some((pa, pi)), Some((ra, ri))) = (pair_of(xs[p]), pair_of(xs[r])) else { continue };
            if pi != ri || pa == ra {
                continue;
            }
            let s = if pa { q(1) } else { q(-1) };
            let k = koszul_extract(xs, &[p, r], |i| basis.degree(i));
            let mut ins: Vec<usize> = xs.iter().enumerate().filter(|(t, _)| *t != p && *t != r).map(|(_, &x)| x).collect();
            ins.push(f);
            terms.push(GwTerm { coef: s * k, class: class.clone(), insertions: ins });
        }
    }
    let mut with_f = xs.to_vec();
    with_f.push(f);
    let mut with_l = xs.to_vec();
    with_l.push(l);
    terms.push(GwTerm { coef: q(-6 * (7 + 2 * a)), class: next.clone(), insertions: with_f });
    terms.push(GwTerm { coef: q(-((a + 1) * (a + 1) - 6)), class: next, insertions: with_l });
    Ok(LinearIdentity { terms })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn koszul_sort_signs() {
        let deg = |i: usize| [0, 1, 1, 2][i];
        assert_eq!(koszul_sort(&[2, 1], deg), (vec![1, 2], q(-1)));
        assert_eq!(koszul_sort(&[3, 1], deg), (vec![1, 3], q(1)));
        assert_eq!(koszul_sort(&[2, 3, 1], deg), (vec![1, 2, 3], q(-1)));
    }

    #[test]
    fn multiset_containment() {
        assert!(contains_multiset(&[1, 2, 2, 5], &[2, 2]));
        assert!(!contains_multiset(&[1, 2, 5], &[2, 2]));
        assert!(contains_multiset(&[1], &[]));
    }

    #[test]
    fn comment_stripping_respects_quotes() {
        assert_eq!(strip_comment(r#"gw-zero 0,2 reason "a # b" # tail"#).trim(), r#"gw-zero 0,2 reason "a # b""#);
    }
}
