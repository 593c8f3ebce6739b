//! Finite graded-commutative algebras over the rationals, described by structure constants.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma::{HomologyClass, HomologyLattice};
use crate::linalg::{add_scaled, is_zero_vec, unit_vec, zero_vec, Matrix, Vector};
use crate::rational::{parse_q, render, sign, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis {
    pub labels: Vec<String>,
    pub degrees: Vec<i64>,
    index: HashMap<String, usize>,
}

impl Basis {
    pub fn new(entries: Vec<(String, i64)>) -> Result<Self> {
        let mut index = HashMap::new();
        let mut labels = Vec::new();
        let mut degrees = Vec::new();
        for (l, d) in entries {
            if index.insert(l.clone(), labels.len()).is_some() {
                return Err(Error::Parse(format!("duplicate basis label {l:?}")));
            }
            labels.push(l);
            degrees.push(d);
        }
        Ok(Basis { labels, degrees, index })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index(&self, label: &str) -> Result<usize> {
        self.index.get(label).copied().ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.degrees[i]
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// Degree of a nonzero homogeneous vector; `None` for zero or mixed vectors.
    pub fn homogeneous_degree(&self, v: &[Q]) -> Option<i64> {
        let mut deg = None;
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match deg {
                None => deg = Some(self.degrees[i]),
                Some(d) if d != self.degrees[i] => return None,
                _ => {}
            }
        }
        deg
    }

    pub fn indices_of_degree(&self, d: i64) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.degrees[i] == d).collect()
    }

    /// Parses a linear combination such as `30*f - 6*l` or `-1/2*pt`.
    pub fn parse_element(&self, s: &str) -> Result<Vector> {
        let mut v = zero_vec(self.len());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty linear combination".into()));
        }
        let chars: Vec<char> = compact.chars().collect();
        let mut terms = Vec::new();
        let mut start = 0;
        for i in 1..chars.len() {
            if (chars[i] == '+' || chars[i] == '-') && chars[i - 1] != '*' && chars[i - 1] != '/' {
                terms.push(chars[start..i].iter().collect::<String>());
                start = i;
            }
        }
        terms.push(chars[start..].iter().collect::<String>());
        for t in terms {
            let (neg, body) = match t.strip_prefix('-') {
                Some(b) => (true, b.to_string()),
                None => (false, t.strip_prefix('+').unwrap_or(&t).to_string()),
            };
            let (coef, label) = match body.split_once('*') {
                Some((c, l)) => (parse_q(c)?, Some(l.to_string())),
                None if self.index.contains_key(&body) => (Q::one(), Some(body.clone())),
                None => match parse_q(&body) {
                    Ok(c) => (c, None),
                    Err(_) => (Q::one(), Some(body.clone())),
                },
            };
            let coef = if neg { -coef } else { coef };
            match label {
                Some(l) => v[self.index(&l)?] += coef,
                None if coef.is_zero() => {}
                None => return Err(Error::Parse(format!("bare scalar {t:?} in linear combination"))),
            }
        }
        Ok(v)
    }

    pub fn render_element(&self, v: &[Q]) -> String {
        let mut out = String::new();
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c < &Q::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            let body = if mag.is_one() { self.labels[i].clone() } else { format!("{}*{}", render(&mag), self.labels[i]) };
            if out.is_empty() {
                out = if neg { format!("-{body}") } else { body };
            } else {
                out.push_str(if neg { " - " } else { " + " });
                out.push_str(&body);
            }
        }
        if out.is_empty() {
            "0".into()
        } else {
            out
        }
    }
}

/// Structure constants, Poincare pairing and optional lattice data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedAlgebra {
    pub basis: Basis,
    pub products: BTreeMap<(usize, usize), Vector>,
    pub pairing: BTreeMap<(usize, usize), Q>,
    pub unit: Option<usize>,
    pub lattice: Option<HomologyLattice>,
    /// Values of degree-2 basis classes on the lattice generators.
    pub evals: BTreeMap<usize, Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: String,
    pub labels: Vec<String>,
    pub detail: String,
}

impl GradedAlgebra {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_product(&self, i: usize, j: usize) -> Vector {
        self.products.get(&(i, j)).cloned().unwrap_or_else(|| zero_vec(self.dim()))
    }

    pub fn cup(&self, x: &[Q], y: &[Q]) -> Vector {
        let mut out = zero_vec(self.dim());
        for ((i, j), v) in &self.products {
            let c = &x[*i] * &y[*j];
            if !c.is_zero() {
                add_scaled(&mut out, &c, v);
            }
        }
        out
    }

    pub fn pair(&self, x: &[Q], y: &[Q]) -> Q {
        let mut s = Q::zero();
        for ((i, j), c) in &self.pairing {
            if !x[*i].is_zero() && !y[*j].is_zero() {
                s += &x[*i] * &y[*j] * c;
            }
        }
        s
    }

    /// `G_ij = pair(e_i, e_j)`.
    pub fn pairing_matrix(&self) -> Matrix {
        let n = self.dim();
        let mut m = Matrix::zeros(n, n);
        for ((i, j), c) in &self.pairing {
            m.data[*i][*j] = c.clone();
        }
        m
    }

    pub fn e(&self, i: usize) -> Vector {
        unit_vec(self.dim(), i)
    }

    pub fn element(&self, s: &str) -> Result<Vector> {
        self.basis.parse_element(s)
    }

    pub fn render(&self, v: &[Q]) -> String {
        self.basis.render_element(v)
    }

    /// `integral(x cup y cup z)`.
    pub fn triple_integral(&self, x: &[Q], y: &[Q], z: &[Q]) -> Q {
        self.pair(&self.cup(x, y), z)
    }

    /// Pairing of a degree-2 basis class with a homology class.
    pub fn eval_on(&self, i: usize, a: &HomologyClass) -> Option<i64> {
        self.evals.get(&i).map(|e| e.iter().zip(&a.0).map(|(x, y)| x * y).sum())
    }

    /// Every violated axiom instance; empty for a valid algebra.
    pub fn verify(&self) -> Vec<Violation> {
        let n = self.dim();
        let b = &self.basis;
        let mut out = Vec::new();
        let lab = |ids: &[usize]| ids.iter().map(|&i| b.label(i).to_string()).collect::<Vec<_>>();
        for i in 0..n {
            for j in 0..n {
                let xy = self.basis_product(i, j);
                if let Some(d) = b.homogeneous_degree(&xy) {
                    if d != b.degree(i) + b.degree(j) {
                        out.push(Violation {
                            axiom: "degree".into(),
                            labels: lab(&[i, j]),
                            detail: format!("product has degree {d}"),
                        });
                    }
                } else if !is_zero_vec(&xy) {
                    out.push(Violation { axiom: "degree".into(), labels: lab(&[i, j]), detail: "inhomogeneous product".into() });
                }
                if j > i {
                    continue;
                }
                let yx = self.basis_product(j, i);
                let s = sign(b.degree(i) * b.degree(j));
                let expected: Vector = yx.iter().map(|c| &s * c).collect();
                if xy != expected {
                    out.push(Violation {
                        axiom: "graded-commutativity".into(),
                        labels: lab(&[i, j]),
                        detail: format!("{} vs {}", self.render(&xy), self.render(&expected)),
                    });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let xy = self.basis_product(i, j);
                for k in 0..n {
                    let left = self.cup(&xy, &self.e(k));
                    let right = self.cup(&self.e(i), &self.basis_product(j, k));
                    if left != right {
                        out.push(Violation {
                            axiom: "associativity".into(),
                            labels: lab(&[i, j, k]),
                            detail: format!("{} vs {}", self.render(&left), self.render(&right)),
                        });
                    }
                    if !self.pairing.is_empty() {
                        let l = self.pair(&xy, &self.e(k));
                        let r = self.pair(&self.e(i), &self.basis_product(j, k));
                        if l != r {
                            out.push(Violation {
                                axiom: "pairing".into(),
                                labels: lab(&[i, j, k]),
                                detail: format!("<{}*{}, {}> = {} but <{}, {}*{}> = {}", b.label(i), b.label(j), b.label(k), render(&l), b.label(i), b.label(j), b.label(k), render(&r)),
                            });
                        }
                    }
                }
            }
        }
        match self.unit {
            Some(u) => {
                for i in 0..n {
                    let e = self.e(i);
                    if self.basis_product(u, i) != e || self.basis_product(i, u) != e {
                        out.push(Violation { axiom: "unit".into(), labels: lab(&[u, i]), detail: "unit does not act as identity".into() });
                    }
                }
            }
            None => out.push(Violation { axiom: "unit".into(), labels: vec![], detail: "no unit declared".into() }),
        }
        if !self.pairing.is_empty() && self.pairing_matrix().inverse().is_none() {
            out.push(Violation { axiom: "pairing-nondegenerate".into(), labels: vec![], detail: "pairing matrix is singular".into() });
        }
        out
    }

    /// Parses the line-oriented algebra description format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        let mut deferred = Vec::new();
        let mut lattice_rank = None;
        let mut c1 = None;
        let mut effective = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: &str| Error::Parse(format!("line {}: {m}: {raw:?}", lineno + 1));
            let mut words = line.split_whitespace();
            let kw = words.next().unwrap();
            let rest: Vec<&str> = words.collect();
            match kw {
                "basis" => {
                    if rest.len() != 2 {
                        return Err(err("expected `basis <label> <degree>`"));
                    }
                    let d = rest[1].parse::<i64>().map_err(|_| err("bad degree"))?;
                    entries.push((rest[0].to_string(), d));
                }
                "lattice" => {
                    lattice_rank = Some(rest.first().and_then(|r| r.parse::<usize>().ok()).ok_or_else(|| err("bad rank"))?);
                }
                "c1" => c1 = Some(parse_ints(&rest).map_err(|_| err("bad c1"))?),
                "effective" => effective.push(HomologyClass(parse_ints(&rest).map_err(|_| err("bad vector"))?)),
                "unit" | "cup" | "pair" | "eval" => deferred.push((lineno, raw, kw, rest.join(" "))),
                _ => return Err(err("unknown statement")),
            }
        }
        let basis = Basis::new(entries)?;
        let n = basis.len();
        let mut alg = GradedAlgebra {
            basis,
            products: BTreeMap::new(),
            pairing: BTreeMap::new(),
            unit: None,
            lattice: None,
            evals: BTreeMap::new(),
        };
        for (lineno, raw, kw, rest) in deferred {
            let err = |m: &str| Error::Parse(format!("line {}: {m}: {raw:?}", lineno + 1));
            match kw {
                "unit" => alg.unit = Some(alg.basis.index(rest.trim())?),
                "cup" | "pair" => {
                    let (lhs, rhs) = rest.split_once('=').ok_or_else(|| err("missing `=`"))?;
                    let ls: Vec<&str> = lhs.split_whitespace().collect();
                    if ls.len() != 2 {
                        return Err(err("expected two labels"));
                    }
                    let (i, j) = (alg.basis.index(ls[0])?, alg.basis.index(ls[1])?);
                    if kw == "cup" {
                        let v = alg.basis.parse_element(rhs)?;
                        if is_zero_vec(&v) {
                            alg.products.remove(&(i, j));
                        } else {
                            alg.products.insert((i, j), v);
                        }
                    } else {
                        let c = parse_q(rhs)?;
                        if c.is_zero() {
                            alg.pairing.remove(&(i, j));
                        } else {
                            alg.pairing.insert((i, j), c);
                        }
                    }
                }
                "eval" => {
                    let ws: Vec<&str> = rest.split_whitespace().collect();
                    if ws.is_empty() {
                        return Err(err("expected `eval <label> <integers>`"));
                    }
                    let i = alg.basis.index(ws[0])?;
                    alg.evals.insert(i, parse_ints(&ws[1..]).map_err(|_| err("bad integers"))?);
                }
                _ => unreachable!(),
            }
        }
        if let Some(u) = alg.unit {
            for i in 0..n {
                alg.products.entry((u, i)).or_insert_with(|| unit_vec(n, i));
                alg.products.entry((i, u)).or_insert_with(|| unit_vec(n, i));
            }
        }
        if let Some(r) = lattice_rank {
            let c1 = c1.ok_or_else(|| Error::Parse("lattice declared without c1".into()))?;
            alg.lattice = Some(HomologyLattice::new(r, c1, effective)?);
        }
        Ok(alg)
    }

    /// Serializes back to the description format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for i in 0..self.dim() {
            s.push_str(&format!("basis {} {}\n", self.basis.label(i), self.basis.degree(i)));
        }
        if let Some(u) = self.unit {
            s.push_str(&format!("unit {}\n", self.basis.label(u)));
        }
        for ((i, j), v) in &self.products {
            s.push_str(&format!("cup {} {} = {}\n", self.basis.label(*i), self.basis.label(*j), self.render(v)));
        }
        for ((i, j), c) in &self.pairing {
            s.push_str(&format!("pair {} {} = {}\n", self.basis.label(*i), self.basis.label(*j), render(c)));
        }
        if let Some(l) = &self.lattice {
            s.push_str(&format!("lattice {}\n", l.rank));
            s.push_str(&format!("c1 {}\n", join_ints(&l.c1)));
            for g in &l.effective_generators {
                s.push_str(&format!("effective {}\n", join_ints(&g.0)));
            }
        }
        for (i, e) in &self.evals {
            s.push_str(&format!("eval {} {}\n", self.basis.label(*i), join_ints(e)));
        }
        s
    }
}

fn parse_ints(ws: &[&str]) -> std::result::Result<Vec<i64>, ()> {
    ws.iter().flat_map(|w| w.split(',')).filter(|t| !t.is_empty()).map(|t| t.parse::<i64>().map_err(|_| ())).collect()
}

fn join_ints(v: &[i64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Entrywise-homogeneous square matrix of algebra elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixElement {
    pub n: usize,
    pub entries: Vec<Vec<Vector>>,
}

impl MatrixElement {
    pub fn zero(n: usize, dim: usize) -> Self {
        MatrixElement { n, entries: vec![vec![zero_vec(dim); n]; n] }
    }

    pub fn from_entries(entries: Vec<Vec<Vector>>) -> Result<Self> {
        let n = entries.len();
        if entries.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("matrix element must be square".into()));
        }
        Ok(MatrixElement { n, entries })
    }

    pub fn get(&self, i: usize, j: usize) -> &Vector {
        &self.entries[i][j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|v| is_zero_vec(v))
    }

    /// Common degree of the nonzero entries, if any.
    pub fn degree(&self, basis: &Basis) -> Result<Option<i64>> {
        let mut d = None;
        for v in self.entries.iter().flatten() {
            if is_zero_vec(v) {
                continue;
            }
            let dv = basis.homogeneous_degree(v).ok_or_else(|| Error::Invalid("inhomogeneous matrix entry".into()))?;
            if d.is_some_and(|x| x != dv) {
                return Err(Error::Invalid("matrix entries of different degrees".into()));
            }
            d = Some(dv);
        }
        Ok(d)
    }

    /// Concatenated coordinates, row-major.
    pub fn flatten(&self) -> Vector {
        self.entries.iter().flatten().flat_map(|v| v.iter().cloned()).collect()
    }

    pub fn sub(&self, other: &Self) -> Self {
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(r, s)| r.iter().zip(s).map(|(a, b)| crate::linalg::sub(a, b)).collect())
            .collect();
        MatrixElement { n: self.n, entries }
    }

    pub fn render(&self, basis: &Basis) -> String {
        let rows: Vec<String> =
            self.entries.iter().map(|r| format!("[{}]", r.iter().map(|v| basis.render_element(v)).collect::<Vec<_>>().join(", "))).collect();
        format!("[{}]", rows.join(", "))
    }

    /// Parses `[[a, b], [c, d]]` with linear combinations as entries.
    pub fn parse(basis: &Basis, s: &str) -> Result<Self> {
        let t = s.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|x| x.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("matrix must be bracketed: {s:?}")))?;
        let mut rows = Vec::new();
        let mut depth = 0;
        let mut cur = String::new();
        for c in inner.chars() {
            match c {
                '[' => {
                    depth += 1;
                    if depth == 1 {
                        cur.clear();
                        continue;
                    }
                }
                ']' => {
                    depth -= 1;
                    if depth == 0 {
                        rows.push(cur.clone());
                        continue;
                    }
                }
                _ => {}
            }
            if depth >= 1 {
                cur.push(c);
            }
        }
        let entries = rows
            .iter()
            .map(|r| r.split(',').map(|e| basis.parse_element(e)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_entries(entries)
    }
}

/// `(X Z)_ij = sum_k product(X_ik, Z_kj)`.
pub fn matrix_mul(
    x: &MatrixElement,
    z: &MatrixElement,
    dim: usize,
    product: impl Fn(&[Q], &[Q]) -> Result<Vector>,
) -> Result<MatrixElement> {
    if x.n != z.n {
        return Err(Error::Dimension(format!("{}x{} times {}x{}", x.n, x.n, z.n, z.n)));
    }
    let n = x.n;
    let mut out = MatrixElement::zero(n, dim);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if is_zero_vec(&x.entries[i][k]) || is_zero_vec(&z.entries[k][j]) {
                    continue;
                }
                let p = product(&x.entries[i][k], &z.entries[k][j])?;
                crate::linalg::add_into(&mut out.entries[i][j], &p);
            }
        }
    }
    Ok(out)
}

/// Exterior algebra on one generator of degree 1, used as a small fixture.
pub fn exterior_one() -> GradedAlgebra {
    GradedAlgebra::parse("basis 1 0\nbasis x 1\nunit 1\npair 1 x = 1\npair x 1 = 1\n").expect("fixture parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn exterior_algebra_is_valid() {
        assert!(exterior_one().verify().is_empty());
    }

    #[test]
    fn parse_linear_combinations() {
        let b = Basis::new(vec![("y".into(), 0), ("f".into(), 4), ("l".into(), 4)]).unwrap();
        let v = b.parse_element("30*f - 6*l").unwrap();
        assert_eq!(v, vec![q(0), q(30), q(-6)]);
        assert_eq!(b.render_element(&v), "30*f - 6*l");
        assert_eq!(b.parse_element("-1/2*y + f").unwrap(), vec![crate::rational::qf(-1, 2), q(1), q(0)]);
        assert_eq!(b.parse_element("0").unwrap(), vec![q(0), q(0), q(0)]);
        assert!(b.parse_element("3").is_err());
        assert!(b.parse_element("z").is_err());
    }

    #[test]
    fn matrix_parse_and_identity_product() {
        let alg = exterior_one();
        let x = MatrixElement::parse(&alg.basis, "[[x, 0], [2*x, 1]]").unwrap();
        let id = MatrixElement::parse(&alg.basis, "[[1, 0], [0, 1]]").unwrap();
        let p = matrix_mul(&id, &x, 2, |a, b| Ok(alg.cup(a, b))).unwrap();
        assert_eq!(p, x);
        let bad = MatrixElement::zero(3, 2);
        assert!(matrix_mul(&id, &bad, 2, |a, b| Ok(alg.cup(a, b))).is_err());
    }
}
