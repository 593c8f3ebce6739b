//! Free Lie algebras on `H = Z^{2g}`, the bracket contraction `H (x) L_k -> L_{k+1}` and the
//! closed-form Johnson values of bounding-pair and separating twists.
//!
//! Lie elements live inside the free associative algebra. Coordinates are taken in the Lyndon
//! basis (a Hall basis, words ordered by length then lexicographically with
//! `A_1 < .. < A_g < B_1 < .. < B_g`): the standard bracketing of a Lyndon word `w` expands to
//! `w` plus lexicographically larger words, so normal forms come from a triangular sweep.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::sparse_rank;
use crate::rational::{is_integral, q, render, Q};

pub type Word = Vec<u8>;
type Poly = BTreeMap<Word, Q>;

/// `H` with symplectic basis `A_1..A_g, B_1..B_g` and `A_i . B_i = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymplecticModule {
    pub g: usize,
}

impl SymplecticModule {
    pub fn new(g: usize) -> Result<Self> {
        if g == 0 || 2 * g > u8::MAX as usize {
            return Err(Error::Invalid(format!("genus {g} out of range")));
        }
        Ok(SymplecticModule { g })
    }

    pub fn rank(&self) -> usize {
        2 * self.g
    }

    pub fn a(&self, i: usize) -> u8 {
        (i - 1) as u8
    }

    pub fn b(&self, i: usize) -> u8 {
        (self.g + i - 1) as u8
    }

    pub fn label(&self, x: u8) -> String {
        let x = x as usize;
        if x < self.g {
            format!("A{}", x + 1)
        } else {
            format!("B{}", x - self.g + 1)
        }
    }

    pub fn parse_generator(&self, s: &str) -> Result<u8> {
        let s = s.trim();
        let bad = || Error::UnknownLabel(s.to_string());
        let (kind, idx) = s.split_at(1);
        let i: usize = idx.parse().map_err(|_| bad())?;
        if i == 0 || i > self.g {
            return Err(bad());
        }
        match kind {
            "A" => Ok(self.a(i)),
            "B" => Ok(self.b(i)),
            _ => Err(bad()),
        }
    }

    /// Intersection form: `A_i . B_i = 1 = -B_i . A_i`, all else zero.
    pub fn form(&self, x: u8, y: u8) -> i64 {
        let (x, y, g) = (x as usize, y as usize, self.g);
        if x < g && y == x + g {
            1
        } else if y < g && x == y + g {
            -1
        } else {
            0
        }
    }

    /// Duality `A_i -> B_i -> -A_i`, as a signed generator.
    pub fn dualize(&self, x: u8) -> (i64, u8) {
        let xi = x as usize;
        if xi < self.g {
            (1, x + self.g as u8)
        } else {
            (-1, x - self.g as u8)
        }
    }
}

/// Element of `L_k` in Lyndon coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieElement {
    pub degree: usize,
    pub coords: BTreeMap<Word, Q>,
}

impl LieElement {
    pub fn zero(degree: usize) -> Self {
        LieElement { degree, coords: BTreeMap::new() }
    }

    pub fn generator(x: u8) -> Self {
        LieElement { degree: 1, coords: [(vec![x], Q::one())].into_iter().collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_integral(&self) -> bool {
        self.coords.values().all(is_integral)
    }

    pub fn add_scaled(&mut self, c: &Q, other: &LieElement) {
        for (w, x) in &other.coords {
            add_term(&mut self.coords, w.clone(), &(c * x));
        }
    }

    pub fn to_poly(&self) -> Poly {
        let mut p = Poly::new();
        for (w, c) in &self.coords {
            for (v, d) in lyndon_polynomial(w) {
                add_term(&mut p, v, &(c * d));
            }
        }
        p
    }

    pub fn render(&self, h: &SymplecticModule) -> String {
        let terms: Vec<(String, Q)> = self.coords.iter().map(|(w, c)| (bracketing(h, w), c.clone())).collect();
        render_sum(&terms)
    }
}

fn add_term(p: &mut BTreeMap<Word, Q>, w: Word, c: &Q) {
    if c.is_zero() {
        return;
    }
    let e = p.entry(w.clone()).or_insert_with(Q::zero);
    *e += c;
    if e.is_zero() {
        p.remove(&w);
    }
}

fn render_sum(terms: &[(String, Q)]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (body, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if !a.is_one() {
            out.push_str(&render(&a));
            out.push('*');
        }
        out.push_str(body);
    }
    out
}

pub fn is_lyndon(w: &[u8]) -> bool {
    !w.is_empty() && (1..w.len()).all(|i| w < &w[i..])
}

/// Lyndon words of length `k` over `n` letters, in lexicographic order (Duval's generator).
pub fn lyndon_words(n: usize, k: usize) -> Vec<Word> {
    let mut out = Vec::new();
    if n == 0 || k == 0 {
        return out;
    }
    let mut w: Vec<usize> = vec![0];
    loop {
        if w.len() == k {
            out.push(w.iter().map(|&x| x as u8).collect());
        }
        let m = w.len();
        while w.len() < k {
            let x = w[w.len() - m];
            w.push(x);
        }
        while let Some(&last) = w.last() {
            if last == n - 1 {
                w.pop();
            } else {
                break;
            }
        }
        match w.last_mut() {
            Some(l) => *l += 1,
            None => break,
        }
    }
    out
}

/// `w = uv` with `v` the longest proper Lyndon suffix.
pub fn standard_factorization(w: &[u8]) -> (Word, Word) {
    for i in 1..w.len() {
        if is_lyndon(&w[i..]) {
            return (w[..i].to_vec(), w[i..].to_vec());
        }
    }
    unreachable!("a Lyndon word of length >= 2 has a proper Lyndon suffix")
}

fn poly_bracket(p: &Poly, r: &Poly) -> Poly {
    let mut out = Poly::new();
    for (u, a) in p {
        for (v, b) in r {
            let c = a * b;
            let mut uv = u.clone();
            uv.extend_from_slice(v);
            add_term(&mut out, uv, &c);
            let mut vu = v.clone();
            vu.extend_from_slice(u);
            add_term(&mut out, vu, &-c);
        }
    }
    out
}

/// Expansion of the standard bracketing of a Lyndon word.
pub fn lyndon_polynomial(w: &[u8]) -> Poly {
    if w.len() == 1 {
        return [(w.to_vec(), Q::one())].into_iter().collect();
    }
    let (u, v) = standard_factorization(w);
    poly_bracket(&lyndon_polynomial(&u), &lyndon_polynomial(&v))
}

/// Standard bracketing of a Lyndon word, e.g. `[A1,[A1,B1]]`.
pub fn bracketing(h: &SymplecticModule, w: &[u8]) -> String {
    if w.len() == 1 {
        return h.label(w[0]);
    }
    let (u, v) = standard_factorization(w);
    format!("[{},{}]", bracketing(h, &u), bracketing(h, &v))
}

/// Lyndon coordinates of a homogeneous Lie polynomial.
fn normal_form_poly(mut p: Poly, degree: usize) -> Result<LieElement> {
    let mut out = LieElement::zero(degree);
    while let Some((w, c)) = p.iter().next().map(|(w, c)| (w.clone(), c.clone())) {
        if w.len() != degree || !is_lyndon(&w) {
            return Err(Error::Invalid("polynomial is not a homogeneous Lie element".into()));
        }
        for (v, d) in lyndon_polynomial(&w) {
            add_term(&mut p, v, &-(&c * &d));
        }
        add_term(&mut out.coords, w, &c);
    }
    Ok(out)
}

pub fn lie_bracket(x: &LieElement, y: &LieElement) -> LieElement {
    normal_form_poly(poly_bracket(&x.to_poly(), &y.to_poly()), x.degree + y.degree).expect("brackets of Lie elements are Lie")
}

fn parse_expr(h: &SymplecticModule, s: &str) -> Result<LieElement> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('[').and_then(|x| x.strip_suffix(']')) {
        let mut depth = 0;
        for (i, ch) in inner.char_indices() {
            match ch {
                '[' => depth += 1,
                ']' => depth -= 1,
                ',' if depth == 0 => {
                    let x = parse_expr(h, &inner[..i])?;
                    let y = parse_expr(h, &inner[i + 1..])?;
                    return Ok(lie_bracket(&x, &y));
                }
                _ => {}
            }
        }
        return Err(Error::Parse(format!("bracket without a top-level comma: {s:?}")));
    }
    Ok(LieElement::generator(h.parse_generator(s)?))
}

/// Hall normal form of a bracket expression such as `[A1,[A1,B1]]`.
pub fn lie_normal_form(h: &SymplecticModule, expr: &str) -> Result<LieElement> {
    parse_expr(h, expr)
}

/// `dim L_k` over `n` generators, from the Lyndon basis.
pub fn lie_dimension(n: usize, k: usize) -> usize {
    lyndon_words(n, k).len()
}

/// Element of `H (x) L_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorElement {
    pub k: usize,
    pub terms: BTreeMap<(u8, Word), Q>,
}

impl TensorElement {
    pub fn zero(k: usize) -> Self {
        TensorElement { k, terms: BTreeMap::new() }
    }

    pub fn add(&mut self, c: &Q, x: u8, xi: &LieElement) {
        for (w, d) in &xi.coords {
            let key = (x, w.clone());
            let e = self.terms.entry(key.clone()).or_insert_with(Q::zero);
            *e += c * d;
            if e.is_zero() {
                self.terms.remove(&key);
            }
        }
    }

    pub fn add_scaled(&mut self, c: &Q, other: &TensorElement) {
        for ((x, w), d) in &other.terms {
            let key = (*x, w.clone());
            let e = self.terms.entry(key.clone()).or_insert_with(Q::zero);
            *e += c * d;
            if e.is_zero() {
                self.terms.remove(&key);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(is_integral)
    }

    pub fn render(&self, h: &SymplecticModule) -> String {
        let terms: Vec<(String, Q)> =
            self.terms.iter().map(|((x, w), c)| (format!("{}⊗{}", h.label(*x), bracketing(h, w)), c.clone())).collect();
        render_sum(&terms)
    }
}

/// `X (x) xi -> [X, xi]`.
pub fn bracket_map(t: &TensorElement) -> LieElement {
    let mut out = LieElement::zero(t.k + 1);
    for ((x, w), c) in &t.terms {
        let xi = LieElement { degree: t.k, coords: [(w.clone(), Q::one())].into_iter().collect() };
        out.add_scaled(c, &lie_bracket(&LieElement::generator(*x), &xi));
    }
    out
}

/// Dimensions of `D_k(H) = ker(H (x) L_k -> L_{k+1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelReport {
    pub g: usize,
    pub k: usize,
    pub domain: usize,
    pub codomain: usize,
    pub rank: usize,
    pub kernel: usize,
}

pub fn kernel_dk(h: &SymplecticModule, k: usize) -> KernelReport {
    let n = h.rank();
    let lk = lyndon_words(n, k);
    let target: BTreeMap<Word, usize> = lyndon_words(n, k + 1).into_iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut rows = Vec::new();
    for x in 0..n as u8 {
        for w in &lk {
            let mut t = TensorElement::zero(k);
            t.terms.insert((x, w.clone()), Q::one());
            let img = bracket_map(&t);
            rows.push(img.coords.iter().map(|(v, c)| (target[v], c.clone())).collect());
        }
    }
    let rank = sparse_rank(rows);
    let domain = n * lk.len();
    KernelReport { g: h.g, k, domain, codomain: target.len(), rank, kernel: domain - rank }
}

fn wedge(x: u8, y: u8) -> LieElement {
    lie_bracket(&LieElement::generator(x), &LieElement::generator(y))
}

/// `A (x) (B ∧ C) + B (x) (C ∧ A) + C (x) (A ∧ B)`, with `∧^2 H = L_2` via `X ∧ Y -> [X, Y]`.
pub fn embed_wedge3(a: u8, b: u8, c: u8) -> TensorElement {
    let mut t = TensorElement::zero(2);
    t.add(&Q::one(), a, &wedge(b, c));
    t.add(&Q::one(), b, &wedge(c, a));
    t.add(&Q::one(), c, &wedge(a, b));
    t
}

/// Rank of the span of `embed_wedge3` over all triples `a < b < c`.
pub fn wedge3_image_rank(h: &SymplecticModule) -> usize {
    let n = h.rank() as u8;
    let mut index: BTreeMap<(u8, Word), usize> = BTreeMap::new();
    let mut rows = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let t = embed_wedge3(a, b, c);
                let row = t
                    .terms
                    .iter()
                    .map(|(key, v)| {
                        let len = index.len();
                        (*index.entry(key.clone()).or_insert(len), v.clone())
                    })
                    .collect();
                rows.push(row);
            }
        }
    }
    sparse_rank(rows)
}

/// A term `c X ⊗ (Y ∧ Z)` kept exactly as written.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTerm {
    pub coefficient: i64,
    pub x: u8,
    pub y: u8,
    pub z: u8,
}

pub fn render_raw(h: &SymplecticModule, terms: &[RawTerm]) -> String {
    let ts: Vec<(String, Q)> =
        terms.iter().map(|t| (format!("{}⊗({}∧{})", h.label(t.x), h.label(t.y), h.label(t.z)), q(t.coefficient))).collect();
    render_sum(&ts)
}

pub fn raw_to_tensor(terms: &[RawTerm]) -> TensorElement {
    let mut out = TensorElement::zero(2);
    for t in terms {
        out.add(&q(t.coefficient), t.x, &wedge(t.y, t.z));
    }
    out
}

fn check_range(h: &SymplecticModule, hh: usize) -> Result<()> {
    if hh == 0 || hh >= h.g {
        return Err(Error::Invalid(format!("need 1 <= h < g, got h = {hh}, g = {}", h.g)));
    }
    Ok(())
}

/// `sum_i B_i ⊗ (B_{h+1} ∧ A_i) - A_i ⊗ (B_{h+1} ∧ B_i) + B_{h+1} ⊗ (A_i ∧ B_i)`, unnormalized.
pub fn tau1_bp_raw(h: &SymplecticModule, hh: usize) -> Result<Vec<RawTerm>> {
    check_range(h, hh)?;
    let c = h.b(hh + 1);
    let mut out = Vec::new();
    for i in 1..=hh {
        let (a, b) = (h.a(i), h.b(i));
        out.push(RawTerm { coefficient: 1, x: b, y: c, z: a });
        out.push(RawTerm { coefficient: -1, x: a, y: c, z: b });
        out.push(RawTerm { coefficient: 1, x: c, y: a, z: b });
    }
    Ok(out)
}

/// `tau_1` of the standard genus-`h` bounding pair twist: `embed(sum_{i<=h} A_i ∧ B_i ∧ B_{h+1})`.
pub fn tau1_bp(h: &SymplecticModule, hh: usize) -> Result<TensorElement> {
    check_range(h, hh)?;
    let mut out = TensorElement::zero(2);
    for i in 1..=hh {
        out.add_scaled(&Q::one(), &embed_wedge3(h.a(i), h.b(i), h.b(hh + 1)));
    }
    Ok(out)
}

/// `omega_h = sum_{i<=h} [A_i, B_i]`.
pub fn omega(h: &SymplecticModule, hh: usize) -> LieElement {
    let mut w = LieElement::zero(2);
    for i in 1..=hh {
        w.add_scaled(&Q::one(), &wedge(h.a(i), h.b(i)));
    }
    w
}

/// `tau_2` of the twist on the standard genus-`h` separating curve:
/// `sum_i B_i ⊗ [A_i, omega_h] - A_i ⊗ [B_i, omega_h]`.
pub fn tau2_bscc(h: &SymplecticModule, hh: usize) -> Result<TensorElement> {
    check_range(h, hh)?;
    let w = omega(h, hh);
    let mut out = TensorElement::zero(3);
    for i in 1..=hh {
        let (a, b) = (h.a(i), h.b(i));
        out.add(&Q::one(), b, &lie_bracket(&LieElement::generator(a), &w));
        out.add(&-Q::one(), a, &lie_bracket(&LieElement::generator(b), &w));
    }
    Ok(out)
}

/// `(X ∧ Y) ⊗ xi -> X ⊗ [Y, xi] - Y ⊗ [X, xi]` on `∧^2 H ⊗ ∧^2 H`, given as
/// `(c, X, Y, xi)` terms with `xi` in `L_2`.
pub fn wedge_tensor_map(terms: &[(Q, u8, u8, LieElement)]) -> TensorElement {
    let mut out = TensorElement::zero(3);
    for (c, x, y, xi) in terms {
        out.add(c, *x, &lie_bracket(&LieElement::generator(*y), xi));
        out.add(&-c, *y, &lie_bracket(&LieElement::generator(*x), xi));
    }
    out
}

/// Image of `-omega_h ⊗ omega_h`.
pub fn minus_omega_squared_image(h: &SymplecticModule, hh: usize) -> TensorElement {
    let w = omega(h, hh);
    let terms: Vec<(Q, u8, u8, LieElement)> = (1..=hh).map(|i| (-Q::one(), h.a(i), h.b(i), w.clone())).collect();
    wedge_tensor_map(&terms)
}

impl fmt::Display for KernelReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "g={} k={}: dim H⊗L_{} = {}, dim L_{} = {}, rank = {}, dim D_{} = {}",
            self.g,
            self.k,
            self.k,
            self.domain,
            self.k + 1,
            self.codomain,
            self.rank,
            self.k,
            self.kernel
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    /// Aperiodic necklaces of length `k` over `n` letters, by enumerating every word.
    fn necklaces(n: usize, k: usize) -> usize {
        let mut reps = std::collections::BTreeSet::new();
        let total = n.pow(k as u32);
        for code in 0..total {
            let mut w = Vec::with_capacity(k);
            let mut r = code;
            for _ in 0..k {
                w.push(r % n);
                r /= n;
            }
            let rots: Vec<Vec<usize>> = (0..k).map(|i| [&w[i..], &w[..i]].concat()).collect();
            if rots.iter().filter(|r| **r == w).count() == 1 {
                reps.insert(rots.into_iter().min().unwrap());
            }
        }
        reps.len()
    }

    #[test]
    fn witt_dimensions_match_necklaces() {
        for g in 1..=4 {
            for k in 1..=4 {
                assert_eq!(lie_dimension(2 * g, k), necklaces(2 * g, k), "g={g} k={k}");
            }
        }
        assert_eq!(lie_dimension(4, 2), 6);
    }

    #[test]
    fn normal_forms() {
        let h = SymplecticModule::new(2).unwrap();
        assert!(lie_normal_form(&h, "[A1,A1]").unwrap().is_zero());
        let x = lie_normal_form(&h, "[A1,[A1,B1]]").unwrap();
        assert_eq!(x.render(&h), "[A1,[A1,B1]]");
        let y = lie_normal_form(&h, "[[A1,B1],A1]").unwrap();
        assert_eq!(y.render(&h), "-[A1,[A1,B1]]");
        // Jacobi.
        let mut j = lie_normal_form(&h, "[A1,[A2,B1]]").unwrap();
        j.add_scaled(&Q::one(), &lie_normal_form(&h, "[A2,[B1,A1]]").unwrap());
        j.add_scaled(&Q::one(), &lie_normal_form(&h, "[B1,[A1,A2]]").unwrap());
        assert!(j.is_zero());
    }

    #[test]
    fn l2_brute_force_span() {
        for g in 1..=3 {
            let h = SymplecticModule::new(g).unwrap();
            let n = h.rank() as u8;
            let mut rows = Vec::new();
            let index: BTreeMap<Word, usize> = lyndon_words(n as usize, 2).into_iter().enumerate().map(|(i, w)| (w, i)).collect();
            for i in 0..n {
                for j in 0..n {
                    let b = wedge(i, j);
                    rows.push(b.coords.iter().map(|(w, c)| (index[w], c.clone())).collect());
                }
            }
            assert_eq!(sparse_rank(rows), binom(2 * g, 2));
        }
    }

    #[test]
    fn duality_squares_to_minus_identity() {
        let h = SymplecticModule::new(3).unwrap();
        assert_eq!(h.dualize(h.a(1)), (1, h.b(1)));
        assert_eq!(h.dualize(h.b(1)), (-1, h.a(1)));
        for x in 0..6u8 {
            let (s1, y) = h.dualize(x);
            let (s2, z) = h.dualize(y);
            assert_eq!((s1 * s2, z), (-1, x));
        }
    }

    #[test]
    fn wedge3_embedding() {
        let h = SymplecticModule::new(2).unwrap();
        let (a1, b1, b2) = (h.a(1), h.b(1), h.b(2));
        assert!(embed_wedge3(a1, a1, b2).is_zero());
        let e = embed_wedge3(a1, b1, b2);
        assert!(bracket_map(&e).is_zero());
        let mut alt = embed_wedge3(b1, a1, b2);
        alt.add_scaled(&Q::one(), &e);
        assert!(alt.is_zero());
        let mut t = TensorElement::zero(2);
        t.add(&Q::one(), a1, &wedge(a1, b1));
        assert_eq!(bracket_map(&t).render(&h), "[A1,[A1,B1]]");
        for g in 2..=4 {
            let h = SymplecticModule::new(g).unwrap();
            let r = kernel_dk(&h, 2);
            assert_eq!(r.kernel, binom(2 * g, 3));
            assert_eq!(wedge3_image_rank(&h), binom(2 * g, 3));
        }
    }

    #[test]
    fn tau1_values() {
        let h = SymplecticModule::new(2).unwrap();
        let raw = tau1_bp_raw(&h, 1).unwrap();
        assert_eq!(render_raw(&h, &raw), "B1⊗(B2∧A1) - A1⊗(B2∧B1) + B2⊗(A1∧B1)");
        let t = tau1_bp(&h, 1).unwrap();
        assert_eq!(raw_to_tensor(&raw), t);
        assert!(bracket_map(&t).is_zero() && t.is_integral());
        let h3 = SymplecticModule::new(3).unwrap();
        let raw = tau1_bp_raw(&h3, 2).unwrap();
        assert_eq!(raw.len(), 6);
        assert_eq!(raw_to_tensor(&raw), tau1_bp(&h3, 2).unwrap());
        assert!(tau1_bp(&h, 2).is_err());
    }

    #[test]
    fn tau2_values() {
        for (g, hh) in [(2, 1), (4, 1), (4, 2), (3, 2)] {
            let h = SymplecticModule::new(g).unwrap();
            let t = tau2_bscc(&h, hh).unwrap();
            assert_eq!(t, minus_omega_squared_image(&h, hh));
            assert!(t.is_integral());
            assert!(bracket_map(&t).is_zero());
        }
        let h = SymplecticModule::new(2).unwrap();
        let mut expected = TensorElement::zero(3);
        expected.add(&Q::one(), h.b(1), &lie_normal_form(&h, "[A1,[A1,B1]]").unwrap());
        expected.add(&-Q::one(), h.a(1), &lie_normal_form(&h, "[B1,[A1,B1]]").unwrap());
        assert_eq!(tau2_bscc(&h, 1).unwrap(), expected);
    }
}
