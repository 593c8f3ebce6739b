//! Planar stable trees, grafting, and the cubical cell complex of the associahedron `K_d`.
//!
//! A tree is stored as its root vertex; children are listed left to right and the `k`-th leaf in
//! that order is input `k`. Internal edges are numbered by preorder. Zero-length edges never
//! appear in a stored tree: they are contracted, which is how faces of `K_d` are reached.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    Finite,
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Child {
    Leaf,
    Edge(EdgeKind, Tree),
}

/// A planar tree with every internal vertex of valency at least three.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tree {
    pub children: Vec<Child>,
}

impl Tree {
    pub fn corolla(d: usize) -> Tree {
        Tree { children: vec![Child::Leaf; d] }
    }

    pub fn leaves(&self) -> usize {
        self.children
            .iter()
            .map(|c| match c {
                Child::Leaf => 1,
                Child::Edge(_, t) => t.leaves(),
            })
            .sum()
    }

    /// Internal edge kinds in preorder.
    pub fn edges(&self) -> Vec<EdgeKind> {
        let mut out = Vec::new();
        self.collect_edges(&mut out);
        out
    }

    fn collect_edges(&self, out: &mut Vec<EdgeKind>) {
        for c in &self.children {
            if let Child::Edge(k, t) = c {
                out.push(*k);
                t.collect_edges(out);
            }
        }
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    pub fn is_stable(&self) -> bool {
        self.children.len() >= 2
            && self.children.iter().all(|c| match c {
                Child::Leaf => true,
                Child::Edge(_, t) => t.is_stable(),
            })
    }

    pub fn is_trivalent(&self) -> bool {
        self.children.len() == 2
            && self.children.iter().all(|c| match c {
                Child::Leaf => true,
                Child::Edge(_, t) => t.is_trivalent(),
            })
    }

    /// Root-first, left-to-right traversal string: `*` a leaf, `(..)` a vertex, `~` an infinite edge.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        self.write_canonical(&mut s);
        s
    }

    fn write_canonical(&self, s: &mut String) {
        s.push('(');
        for c in &self.children {
            match c {
                Child::Leaf => s.push('*'),
                Child::Edge(k, t) => {
                    if *k == EdgeKind::Infinite {
                        s.push('~');
                    }
                    t.write_canonical(s);
                }
            }
        }
        s.push(')');
    }

    pub fn parse(s: &str) -> Result<Tree> {
        let bytes: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let t = parse_vertex(&bytes, &mut pos)?;
        if pos != bytes.len() {
            return Err(Error::Parse(format!("trailing input in tree {s:?}")));
        }
        Ok(t)
    }

    fn edge_mut(&mut self, target: usize, seen: &mut usize) -> Option<&mut Child> {
        for c in self.children.iter_mut() {
            if let Child::Edge(_, _) = c {
                if *seen == target {
                    return Some(c);
                }
                *seen += 1;
                if let Child::Edge(_, t) = c {
                    if let Some(found) = t.edge_mut(target, seen) {
                        return Some(found);
                    }
                }
            }
        }
        None
    }

    pub fn with_kind(&self, edge: usize, kind: EdgeKind) -> Result<Tree> {
        let mut t = self.clone();
        match t.edge_mut(edge, &mut 0) {
            Some(Child::Edge(k, _)) => *k = kind,
            _ => return Err(Error::Invalid(format!("no internal edge {edge}"))),
        }
        Ok(t)
    }

    /// Contract an internal edge, splicing the lower vertex into its parent.
    pub fn collapse(&self, edge: usize) -> Result<Tree> {
        let mut t = self.clone();
        if !t.collapse_in_place(edge, &mut 0) {
            return Err(Error::Invalid(format!("no internal edge {edge}")));
        }
        Ok(t)
    }

    fn collapse_in_place(&mut self, target: usize, seen: &mut usize) -> bool {
        for i in 0..self.children.len() {
            if let Child::Edge(_, _) = &self.children[i] {
                if *seen == target {
                    if let Child::Edge(_, sub) = self.children.remove(i) {
                        for (j, c) in sub.children.into_iter().enumerate() {
                            self.children.insert(i + j, c);
                        }
                    }
                    return true;
                }
                *seen += 1;
                if let Child::Edge(_, t) = &mut self.children[i] {
                    if t.collapse_in_place(target, seen) {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Internal edges passed before reaching leaf `j` (1-based) in preorder.
    fn edges_before_leaf(&self, j: usize) -> Option<usize> {
        fn walk(t: &Tree, j: usize, leaf: &mut usize, edges: &mut usize) -> bool {
            for c in &t.children {
                match c {
                    Child::Leaf => {
                        *leaf += 1;
                        if *leaf == j {
                            return true;
                        }
                    }
                    Child::Edge(_, s) => {
                        *edges += 1;
                        if walk(s, j, leaf, edges) {
                            return true;
                        }
                    }
                }
            }
            false
        }
        let (mut leaf, mut edges) = (0, 0);
        walk(self, j, &mut leaf, &mut edges).then_some(edges)
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

fn parse_vertex(s: &[char], pos: &mut usize) -> Result<Tree> {
    if s.get(*pos) != Some(&'(') {
        return Err(Error::Parse(format!("expected '(' at {pos}")));
    }
    *pos += 1;
    let mut children = Vec::new();
    loop {
        match s.get(*pos) {
            Some(')') => {
                *pos += 1;
                break;
            }
            Some('*') => {
                *pos += 1;
                children.push(Child::Leaf);
            }
            Some('~') => {
                *pos += 1;
                children.push(Child::Edge(EdgeKind::Infinite, parse_vertex(s, pos)?));
            }
            Some('(') => children.push(Child::Edge(EdgeKind::Finite, parse_vertex(s, pos)?)),
            _ => return Err(Error::Parse(format!("unexpected input at {pos}"))),
        }
    }
    let t = Tree { children };
    if !t.is_stable() {
        return Err(Error::Invalid(format!("unstable vertex in {}", t.canonical())));
    }
    Ok(t)
}

/// All stable planar trees with `d` leaves and finite internal edges.
pub fn enumerate_stable_trees(d: usize) -> Vec<Tree> {
    let mut memo: Vec<Vec<Tree>> = vec![Vec::new(); d.max(2) + 1];
    for n in 2..=d {
        let mut out = Vec::new();
        let mut current = Vec::new();
        compositions(n, n, &memo, &mut current, &mut out);
        memo[n] = out;
    }
    let mut trees = std::mem::take(&mut memo[d]);
    trees.sort_by_key(|t| t.canonical());
    trees
}

fn compositions(total: usize, remaining: usize, memo: &[Vec<Tree>], current: &mut Vec<Child>, out: &mut Vec<Tree>) {
    if remaining == 0 {
        if current.len() >= 2 {
            out.push(Tree { children: current.clone() });
        }
        return;
    }
    for part in 1..=remaining {
        if part == total {
            continue;
        }
        if part == 1 {
            current.push(Child::Leaf);
            compositions(total, remaining - 1, memo, current, out);
            current.pop();
        } else {
            for t in &memo[part] {
                current.push(Child::Edge(EdgeKind::Finite, t.clone()));
                compositions(total, remaining - part, memo, current, out);
                current.pop();
            }
        }
    }
}

pub fn trivalent_trees(d: usize) -> Vec<Tree> {
    enumerate_stable_trees(d).into_iter().filter(Tree::is_trivalent).collect()
}

/// Feed the output of `t2` into input `j` (1-based) of `t1` through a new infinite edge.
pub fn graft(t1: &Tree, j: usize, t2: &Tree) -> Result<Tree> {
    fn walk(t: &mut Tree, j: usize, leaf: &mut usize, t2: &Tree) -> bool {
        for c in t.children.iter_mut() {
            match c {
                Child::Leaf => {
                    *leaf += 1;
                    if *leaf == j {
                        *c = Child::Edge(EdgeKind::Infinite, t2.clone());
                        return true;
                    }
                }
                Child::Edge(_, s) => {
                    if walk(s, j, leaf, t2) {
                        return true;
                    }
                }
            }
        }
        false
    }
    let mut t = t1.clone();
    if j == 0 || !walk(&mut t, j, &mut 0, t2) {
        return Err(Error::Invalid(format!("input {j} out of range for a tree with {} inputs", t1.leaves())));
    }
    Ok(t)
}

/// `(-1)^{(d1 - k) d2 + d2 + k}`: product versus boundary orientation on the facet where a
/// `d2`-input tree is attached to input `k + 1` of a `d1`-input tree.
pub fn boundary_sign(d1: usize, d2: usize, k: usize) -> i64 {
    let e = (d1 - k) * d2 + d2 + k;
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Global factor between [`induced_facet_sign`] and [`boundary_sign`]. The induced sign uses the
/// outward-normal-first rule with the edge length as the normal coordinate; the formula is stated
/// for a collar `(-1, 0]` whose parameter runs against the length, which flips every facet at once.
pub const COLLAR_SIGN: i64 = -1;

/// Admissible `(d1, d2, k)` facet labels of `K_d`.
pub fn facet_labels(d: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for d1 in 2..d {
        let d2 = d + 1 - d1;
        if d2 < 2 {
            continue;
        }
        for k in 0..d1 {
            out.push((d1, d2, k));
        }
    }
    out
}

struct Arena {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    leaves: Vec<usize>,
    edge_index: BTreeMap<usize, usize>,
}

fn arena(t: &Tree) -> Arena {
    fn add(t: &Tree, parent: Option<usize>, a: &mut Arena, edges: &mut usize) -> usize {
        let id = a.parent.len();
        a.parent.push(parent);
        a.children.push(Vec::new());
        for c in &t.children {
            let cid = match c {
                Child::Leaf => {
                    let l = a.parent.len();
                    a.parent.push(Some(id));
                    a.children.push(Vec::new());
                    a.leaves.push(l);
                    l
                }
                Child::Edge(_, s) => {
                    let e = *edges;
                    *edges += 1;
                    let v = add(s, Some(id), a, edges);
                    a.edge_index.insert(v, e);
                    v
                }
            };
            a.children[id].push(cid);
        }
        id
    }
    let mut a = Arena { parent: Vec::new(), children: Vec::new(), leaves: Vec::new(), edge_index: BTreeMap::new() };
    add(t, None, &mut a, &mut 0);
    a
}

fn permutation_sign(seq: &[usize]) -> i64 {
    let mut inv = 0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sign of the standard orientation `(-1)^{r(T)} dt_{e_3} ∧ .. ∧ dt_{e_d}` of the top cell of a
/// trivalent tree, relative to the preorder wedge of its edge lengths.
///
/// Edges are named by the node above them. At the vertex `b_k` where the arcs from leaves `k-1`
/// and `k` meet, `e^r_k` is the incoming edge carrying leaf `k - 1` and `e^d_k` the outgoing one.
pub fn top_cell_orientation(t: &Tree) -> Result<i64> {
    if !t.is_trivalent() || t.edges().contains(&EdgeKind::Infinite) {
        return Err(Error::Invalid(format!("{} is not a finite trivalent tree", t.canonical())));
    }
    let a = arena(t);
    let d = a.leaves.len();
    let ancestors = |mut v: usize| {
        let mut out = vec![v];
        while let Some(p) = a.parent[v] {
            out.push(p);
            v = p;
        }
        out
    };
    let mut covered: BTreeSet<usize> = a.leaves.iter().copied().collect();
    covered.insert(0);
    let mut order = Vec::new();
    let mut r = 0;
    for k in 3..=d {
        let left = ancestors(a.leaves[k - 2]);
        let right: BTreeSet<usize> = ancestors(a.leaves[k - 1]).into_iter().collect();
        let pos = left.iter().position(|v| right.contains(v)).expect("leaves share the root");
        let b = left[pos];
        let er = left[pos - 1];
        let e = if covered.contains(&er) {
            b
        } else {
            r += 1;
            er
        };
        if !covered.insert(e) {
            return Err(Error::Internal(format!("edge ordering repeats an edge in {}", t.canonical())));
        }
        let idx = a
            .edge_index
            .get(&e)
            .ok_or_else(|| Error::Internal(format!("edge ordering reached an external edge in {}", t.canonical())))?;
        order.push(*idx);
    }
    Ok(if r % 2 == 0 { 1 } else { -1 } * permutation_sign(&order))
}

/// Compare the boundary orientation induced by the top-cell orientations with the product
/// orientation on the facet `(d1, d2, k)`; returns the common ratio over all trivalent pairs.
pub fn induced_facet_sign(d1: usize, d2: usize, k: usize) -> Result<i64> {
    let mut found: Option<i64> = None;
    for t1 in trivalent_trees(d1) {
        let m1 = t1.edge_count();
        let o1 = top_cell_orientation(&t1)?;
        let a = t1.edges_before_leaf(k + 1).ok_or_else(|| Error::Invalid(format!("k = {k} out of range")))?;
        for t2 in trivalent_trees(d2) {
            let m2 = t2.edge_count();
            let o2 = top_cell_orientation(&t2)?;
            let glued = graft(&t1, k + 1, &t2)?.with_kind(a, EdgeKind::Finite)?;
            let o = top_cell_orientation(&glued)?;
            // Outward normal first: the t_e = inf face of a preorder cube carries (-1)^a.
            let boundary = o * if a % 2 == 0 { 1 } else { -1 };
            let product = o1 * o2 * if (m2 * (m1 - a)) % 2 == 0 { 1 } else { -1 };
            let ratio = boundary * product;
            match found {
                None => found = Some(ratio),
                Some(x) if x != ratio => {
                    return Err(Error::Invalid(format!("facet ({d1},{d2},{k}) has no uniform sign")));
                }
                _ => {}
            }
        }
    }
    found.ok_or_else(|| Error::Invalid("empty facet".into()))
}

/// The cubical complex of `K_d`: cells are stable trees with each internal edge finite or
/// infinite, graded by the number of finite edges, each oriented by the preorder of its finite
/// edges.
#[derive(Clone, Debug)]
pub struct CubicalComplex {
    pub d: usize,
    pub cells: Vec<Vec<Tree>>,
    /// `boundary[n]` maps `n`-cells to `(n-1)`-cells: `(row, col) -> coefficient`.
    pub boundary: Vec<BTreeMap<(usize, usize), i64>>,
}

pub fn cubical_cells(d: usize) -> Vec<Vec<Tree>> {
    let mut cells = vec![Vec::new(); d.saturating_sub(1)];
    for t in enumerate_stable_trees(d) {
        let m = t.edge_count();
        for mask in 0u32..(1 << m) {
            let mut c = t.clone();
            for e in 0..m {
                if mask & (1 << e) != 0 {
                    c = c.with_kind(e, EdgeKind::Infinite).expect("edge exists");
                }
            }
            cells[m - mask.count_ones() as usize].push(c);
        }
    }
    for level in cells.iter_mut() {
        level.sort_by_key(|t| t.canonical());
    }
    cells
}

/// Boundary of a cell as `(face, coefficient)` pairs.
pub fn cell_boundary(c: &Tree) -> Vec<(Tree, i64)> {
    let mut out = Vec::new();
    let mut i = 0;
    for (e, k) in c.edges().into_iter().enumerate() {
        if k != EdgeKind::Finite {
            continue;
        }
        let s = if i % 2 == 0 { 1 } else { -1 };
        out.push((c.with_kind(e, EdgeKind::Infinite).expect("edge exists"), s));
        out.push((c.collapse(e).expect("edge exists"), -s));
        i += 1;
    }
    out
}

pub fn signed_boundary(d: usize) -> Result<CubicalComplex> {
    if !(2..=7).contains(&d) {
        return Err(Error::Invalid(format!("d = {d} outside 2..=7")));
    }
    let cells = cubical_cells(d);
    let index: Vec<BTreeMap<String, usize>> =
        cells.iter().map(|level| level.iter().enumerate().map(|(i, t)| (t.canonical(), i)).collect()).collect();
    let mut boundary = vec![BTreeMap::new()];
    for n in 1..cells.len() {
        let mut m: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for (col, c) in cells[n].iter().enumerate() {
            for (f, s) in cell_boundary(c) {
                let row = index[n - 1][&f.canonical()];
                *m.entry((row, col)).or_default() += s;
            }
        }
        m.retain(|_, v| *v != 0);
        boundary.push(m);
    }
    Ok(CubicalComplex { d, cells, boundary })
}

impl CubicalComplex {
    pub fn cell_counts(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells.iter().enumerate().map(|(n, c)| if n % 2 == 0 { c.len() as i64 } else { -(c.len() as i64) }).sum()
    }

    /// Nonzero entries of `∂_{n-1} ∂_n`, for every `n`.
    pub fn square_defects(&self) -> usize {
        let mut bad = 0;
        for n in 2..self.boundary.len() {
            let mut by_mid: BTreeMap<usize, Vec<(usize, i64)>> = BTreeMap::new();
            for (&(row, col), &v) in &self.boundary[n - 1] {
                by_mid.entry(col).or_default().push((row, v));
            }
            let mut prod: BTreeMap<(usize, usize), i64> = BTreeMap::new();
            for (&(mid, col), &v) in &self.boundary[n] {
                for (row, w) in by_mid.get(&mid).into_iter().flatten() {
                    *prod.entry((*row, col)).or_default() += v * w;
                }
            }
            bad += prod.values().filter(|v| **v != 0).count();
        }
        bad
    }

    /// `sum_T orientation(T) [T]` over the top cells.
    pub fn fundamental_chain(&self) -> Result<Vec<(usize, i64)>> {
        let top = self.cells.len() - 1;
        self.cells[top].iter().enumerate().map(|(i, t)| Ok((i, top_cell_orientation(t)?))).collect()
    }

    /// Boundary of the fundamental chain, as `(cell, coefficient)` in codimension one.
    pub fn fundamental_boundary(&self) -> Result<Vec<(Tree, i64)>> {
        let top = self.cells.len() - 1;
        if top == 0 {
            return Ok(Vec::new());
        }
        let chain: BTreeMap<usize, i64> = self.fundamental_chain()?.into_iter().collect();
        let mut out: BTreeMap<usize, i64> = BTreeMap::new();
        for (&(row, col), &v) in &self.boundary[top] {
            *out.entry(row).or_default() += v * chain[&col];
        }
        Ok(out.into_iter().filter(|(_, v)| *v != 0).map(|(r, v)| (self.cells[top - 1][r].clone(), v)).collect())
    }
}

/// Face counts of `K_d` indexed by dimension (a face is a stable tree; dimension is
/// `d - 2 - edges`).
pub fn face_counts(d: usize) -> Vec<usize> {
    let mut counts = vec![0; d - 1];
    for t in enumerate_stable_trees(d) {
        counts[d - 2 - t.edge_count()] += 1;
    }
    counts
}

pub fn face_euler_characteristic(d: usize) -> i64 {
    face_counts(d).iter().enumerate().map(|(n, c)| if n % 2 == 0 { *c as i64 } else { -(*c as i64) }).sum()
}

/// Facets of `K_d` found by enumeration: trees with one internal edge.
pub fn facet_count(d: usize) -> usize {
    enumerate_stable_trees(d).iter().filter(|t| t.edge_count() == 1).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalan(n: usize) -> usize {
        (0..n).fold(1usize, |c, i| c * 2 * (2 * i + 1) / (i + 2))
    }

    fn bracketings(d: usize) -> Vec<String> {
        if d == 1 {
            return vec!["x".into()];
        }
        let mut out = Vec::new();
        for i in 1..d {
            for l in bracketings(i) {
                for r in bracketings(d - i) {
                    out.push(format!("({l}{r})"));
                }
            }
        }
        out
    }

    #[test]
    fn counts() {
        assert_eq!(enumerate_stable_trees(2).len(), 1);
        assert_eq!(enumerate_stable_trees(4).len(), 11);
        for d in 2..=7 {
            assert_eq!(trivalent_trees(d).len(), catalan(d - 1));
            assert_eq!(trivalent_trees(d).len(), bracketings(d).len());
            let trees = enumerate_stable_trees(d);
            let set: BTreeSet<String> = trees.iter().map(Tree::canonical).collect();
            assert_eq!(set.len(), trees.len());
            for t in &trees {
                assert_eq!(Tree::parse(&t.canonical()).unwrap(), *t);
                assert_eq!(t.leaves(), d);
            }
        }
        assert_eq!(face_counts(4), vec![5, 5, 1]);
    }

    #[test]
    fn faces_and_euler() {
        for d in 2..=6 {
            assert_eq!(face_euler_characteristic(d), 1);
            let expected: usize = facet_labels(d).len();
            if d >= 3 {
                assert_eq!(facet_count(d), expected);
            }
        }
        assert_eq!(facet_labels(4).len(), 5);
    }

    #[test]
    fn grafting() {
        let c2 = Tree::corolla(2);
        let g = graft(&c2, 1, &c2).unwrap();
        assert_eq!(g.canonical(), "(~(**)*)");
        assert_eq!(g.leaves(), 3);
        assert!(graft(&c2, 3, &c2).is_err());
        assert_eq!(g.collapse(0).unwrap(), Tree::corolla(3));
        let c3 = Tree::corolla(3);
        for j in 1..=3 {
            assert_eq!(graft(&c3, j, &c2).unwrap().collapse(0).unwrap(), Tree::corolla(4));
        }
    }

    #[test]
    fn grafting_is_associative() {
        let small: Vec<Tree> = (2..=4).flat_map(enumerate_stable_trees).collect();
        for a in &small {
            for b in &small {
                for c in &small {
                    let (da, db) = (a.leaves(), b.leaves());
                    for j in 1..=da {
                        for i in 1..=db {
                            let left = graft(&graft(a, j, b).unwrap(), j + i - 1, c).unwrap();
                            let right = graft(a, j, &graft(b, i, c).unwrap()).unwrap();
                            assert_eq!(left, right);
                        }
                        for k in j + 1..=da {
                            let left = graft(&graft(a, j, b).unwrap(), k + db - 1, c).unwrap();
                            let right = graft(&graft(a, k, c).unwrap(), j, b).unwrap();
                            assert_eq!(left, right);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn induced_signs_follow_the_formula() {
        for d in 3..=6 {
            for (d1, d2, k) in facet_labels(d) {
                assert_eq!(induced_facet_sign(d1, d2, k).unwrap(), COLLAR_SIGN * boundary_sign(d1, d2, k), "({d1},{d2},{k})");
            }
        }
    }

    #[test]
    fn boundary_sign_examples() {
        assert_eq!(boundary_sign(2, 2, 0), 1);
        assert_eq!(boundary_sign(2, 2, 1), -1);
    }

    #[test]
    fn interval() {
        let c = signed_boundary(3).unwrap();
        assert_eq!(c.cell_counts(), vec![3, 2]);
        let b = c.fundamental_boundary().unwrap();
        let got: Vec<(String, i64)> = b.iter().map(|(t, v)| (t.canonical(), *v)).collect();
        assert_eq!(got, vec![("(*~(**))".to_string(), 1), ("(~(**)*)".to_string(), -1)]);
    }

    #[test]
    fn square_zero_and_orientation() {
        for d in 2..=6 {
            let c = signed_boundary(d).unwrap();
            assert_eq!(c.square_defects(), 0, "d={d}");
            assert_eq!(c.euler_characteristic(), 1);
            for (t, v) in c.fundamental_boundary().unwrap() {
                assert!(t.edges().contains(&EdgeKind::Infinite), "interior wall {t} survives with {v}");
            }
        }
    }
}
