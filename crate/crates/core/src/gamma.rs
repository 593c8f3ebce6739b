//! Second-homology lattices, the coefficient ring of effective classes and its ideals.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{render, Q};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct HomologyClass(pub Vec<i64>);

impl HomologyClass {
    pub fn zero(rank: usize) -> Self {
        HomologyClass(vec![0; rank])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        HomologyClass(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        HomologyClass(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> Self {
        HomologyClass(self.0.iter().map(|a| k * a).collect())
    }

    /// Parses a comma separated coordinate list such as `1,-2`.
    pub fn parse_coords(s: &str) -> Result<Self> {
        let coords = s
            .split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad class coordinates {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(HomologyClass(coords))
    }
}

impl fmt::Display for HomologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Integer lattice with a first Chern class functional and a cone of effective classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyLattice {
    pub rank: usize,
    pub c1: Vec<i64>,
    pub effective_generators: Vec<HomologyClass>,
}

impl HomologyLattice {
    pub fn new(rank: usize, c1: Vec<i64>, effective_generators: Vec<HomologyClass>) -> Result<Self> {
        if c1.len() != rank || effective_generators.iter().any(|g| g.0.len() != rank) {
            return Err(Error::Dimension("lattice rank mismatch".into()));
        }
        let lat = HomologyLattice { rank, c1, effective_generators };
        // Monotone setting: c1 is positive on every generator, so effective
        // decompositions of a class are finite in number.
        if let Some(g) = lat.effective_generators.iter().find(|g| lat.c1(g) <= 0) {
            return Err(Error::Invalid(format!("effective generator {g} has c1 <= 0")));
        }
        Ok(lat)
    }

    pub fn c1(&self, a: &HomologyClass) -> i64 {
        self.c1.iter().zip(&a.0).map(|(c, x)| c * x).sum()
    }

    pub fn zero(&self) -> HomologyClass {
        HomologyClass::zero(self.rank)
    }

    /// Membership in the nonnegative integer span of the generators (zero included).
    pub fn is_effective(&self, a: &HomologyClass) -> bool {
        if a.is_zero() {
            return true;
        }
        let c = self.c1(a);
        if c <= 0 {
            return false;
        }
        fn search(lat: &HomologyLattice, rest: &HomologyClass, from: usize) -> bool {
            if rest.is_zero() {
                return true;
            }
            if lat.c1(rest) <= 0 {
                return false;
            }
            for i in from..lat.effective_generators.len() {
                let next = rest.sub(&lat.effective_generators[i]);
                if search(lat, &next, i) {
                    return true;
                }
            }
            false
        }
        search(self, a, 0)
    }

    /// All effective classes with `c1 <= bound`, ordered by `(c1, coordinates)`.
    pub fn effective_up_to(&self, bound: i64) -> Vec<HomologyClass> {
        let mut found = std::collections::BTreeSet::new();
        let mut stack = vec![self.zero()];
        while let Some(a) = stack.pop() {
            if !found.insert(a.clone()) {
                continue;
            }
            for g in &self.effective_generators {
                let b = a.add(g);
                if self.c1(&b) <= bound && !found.contains(&b) {
                    stack.push(b);
                }
            }
        }
        let mut v: Vec<_> = found.into_iter().collect();
        v.sort_by_key(|a| self.order_key(a));
        v
    }

    pub fn order_key(&self, a: &HomologyClass) -> (i64, Vec<i64>) {
        (self.c1(a), a.0.clone())
    }

    /// Ordered pairs of effective classes `(A1, A2)` with `A1 + A2 = a`.
    pub fn effective_splittings(&self, a: &HomologyClass) -> Vec<(HomologyClass, HomologyClass)> {
        self.effective_up_to(self.c1(a))
            .into_iter()
            .filter_map(|a1| {
                let a2 = a.sub(&a1);
                self.is_effective(&a2).then_some((a1, a2))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum IdealSpec {
    /// Generated by classes with `c1 > level`.
    Level(i64),
    /// Classes with `c1(B) = c1(A), B != A` or `c1(B) > c1(A)`.
    Pivot(HomologyClass),
}

impl IdealSpec {
    pub fn contains(&self, lat: &HomologyLattice, b: &HomologyClass) -> bool {
        match self {
            IdealSpec::Level(c) => lat.c1(b) > *c,
            IdealSpec::Pivot(a) => {
                let (cb, ca) = (lat.c1(b), lat.c1(a));
                (cb == ca && b != a) || cb > ca
            }
        }
    }

    /// Largest c1 of a class outside the ideal.
    pub fn c1_bound(&self, lat: &HomologyLattice) -> i64 {
        match self {
            IdealSpec::Level(c) => *c,
            IdealSpec::Pivot(a) => lat.c1(a),
        }
    }

    /// Effective classes surviving the truncation.
    pub fn surviving(&self, lat: &HomologyLattice) -> Vec<HomologyClass> {
        lat.effective_up_to(self.c1_bound(lat)).into_iter().filter(|b| !self.contains(lat, b)).collect()
    }
}

/// Finite sum `sum lambda(A) e^A` over effective classes.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GammaElement {
    pub support: BTreeMap<HomologyClass, Q>,
}

impl GammaElement {
    pub fn monomial(a: HomologyClass, c: Q) -> Self {
        let mut g = GammaElement::default();
        g.add_term(a, c);
        g
    }

    pub fn add_term(&mut self, a: HomologyClass, c: Q) {
        let e = self.support.entry(a.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.support.remove(&a);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn check_effective(&self, lat: &HomologyLattice) -> Result<()> {
        match self.support.keys().find(|a| !lat.is_effective(a)) {
            Some(a) => Err(Error::Invalid(format!("class {a} is not effective"))),
            None => Ok(()),
        }
    }

    pub fn render(&self, lat: &HomologyLattice) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut terms: Vec<_> = self.support.iter().collect();
        terms.sort_by_key(|(a, _)| lat.order_key(a));
        terms.iter().map(|(a, c)| format!("{}*e^[{}]", render(c), a)).collect::<Vec<_>>().join(" + ")
    }
}

/// Convolution product `e^A e^B = e^{A+B}`.
pub fn gamma_mul(lat: &HomologyLattice, a: &GammaElement, b: &GammaElement) -> Result<GammaElement> {
    a.check_effective(lat)?;
    b.check_effective(lat)?;
    let mut out = GammaElement::default();
    for (x, cx) in &a.support {
        for (y, cy) in &b.support {
            out.add_term(x.add(y), cx * cy);
        }
    }
    if out.check_effective(lat).is_err() {
        return Err(Error::Internal("effective monoid not closed under addition".into()));
    }
    Ok(out)
}

pub fn truncate(lat: &HomologyLattice, x: &GammaElement, ideal: &IdealSpec) -> GammaElement {
    GammaElement {
        support: x.support.iter().filter(|(a, _)| !ideal.contains(lat, a)).map(|(a, c)| (a.clone(), c.clone())).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn y_lattice() -> HomologyLattice {
        HomologyLattice::new(2, vec![4, 1], vec![HomologyClass(vec![0, 1]), HomologyClass(vec![1, -3])]).unwrap()
    }

    fn cls(a: i64, b: i64) -> HomologyClass {
        HomologyClass(vec![a, b])
    }

    #[test]
    fn gamma_products() {
        let lat = y_lattice();
        let f = cls(0, 1);
        let r = cls(1, -3);
        let one = GammaElement::monomial(cls(0, 0), q(1));
        let ef = GammaElement::monomial(f.clone(), q(1));
        assert_eq!(gamma_mul(&lat, &one, &ef).unwrap(), ef);
        let p = gamma_mul(&lat, &GammaElement::monomial(f.clone(), q(2)), &GammaElement::monomial(f.clone(), q(3))).unwrap();
        assert_eq!(p, GammaElement::monomial(cls(0, 2), q(6)));
        let t = gamma_mul(&lat, &ef, &GammaElement::monomial(r, q(1))).unwrap();
        assert_eq!(t, GammaElement::monomial(cls(1, -2), q(1)));
    }

    #[test]
    fn ideal_membership() {
        let lat = y_lattice();
        let i2f = IdealSpec::Pivot(cls(0, 2));
        assert!(i2f.contains(&lat, &cls(1, -2)));
        assert!(!i2f.contains(&lat, &cls(0, 1)));
        assert!(!i2f.contains(&lat, &cls(0, 2)));
        let surv = i2f.surviving(&lat);
        assert_eq!(surv, vec![cls(0, 0), cls(0, 1), cls(1, -3), cls(0, 2)]);
    }

    #[test]
    fn truncation_examples() {
        let lat = y_lattice();
        let i2f = IdealSpec::Pivot(cls(0, 2));
        assert!(truncate(&lat, &GammaElement::monomial(cls(1, -2), q(1)), &i2f).is_zero());
        let mut x = GammaElement::monomial(cls(0, 0), q(1));
        x.add_term(cls(0, 1), q(1));
        assert_eq!(truncate(&lat, &x, &i2f), x);
        let mut y = GammaElement::monomial(cls(0, 2), q(1));
        y.add_term(cls(0, 3), q(1));
        assert_eq!(truncate(&lat, &y, &i2f), GammaElement::monomial(cls(0, 2), q(1)));
    }

    #[test]
    fn effectivity() {
        let lat = y_lattice();
        assert!(lat.is_effective(&cls(1, -2)));
        assert!(!lat.is_effective(&cls(1, -4)));
        assert!(lat.is_effective(&cls(0, 0)));
        assert!(!lat.is_effective(&cls(0, -1)));
        assert!(lat.is_effective(&cls(2, -5)));
    }
}
